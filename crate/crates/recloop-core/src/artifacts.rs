//! Per-run file artifacts and model-curve data.
//!
//! Everything here writes plain CSV (UTF-8, LF, `.` decimals) meant to be
//! fed straight into a plotting pipeline: likes per content, opinion
//! snapshots, the full recommendation trace, and samples of the payoff,
//! watch-rate, and watch-value curves.

use std::fs;
use std::path::{Path, PathBuf};

use crate::engine::RunResult;
use crate::model::{content_stance, engagement_payoffs, watch_rate};
use crate::recommender::watch_value;
use crate::sweep::SweepError;

fn write(path: &Path, content: String) -> Result<(), SweepError> {
    fs::write(path, content).map_err(|source| SweepError::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Write the per-run artifact files present in `result` into `out_dir`,
/// returning the paths created.
///
/// Always writes `likes_per_content.csv`, `likes_per_step.csv`, and
/// `opinions.csv` (initial and final vectors plus any snapshot cadence);
/// `recommendations.csv` appears only when the run traced them.
pub fn emit_run_artifacts(result: &RunResult, out_dir: &Path) -> Result<Vec<PathBuf>, SweepError> {
    fs::create_dir_all(out_dir).map_err(|source| SweepError::Io {
        path: out_dir.to_path_buf(),
        source,
    })?;
    let mut written = Vec::new();
    let k = result.cumulative_likes.len();
    let users = result.final_opinions.len();
    let steps = result.likes_per_step.len();

    let mut likes = String::from("stance,cumulative_likes\n");
    for (j, count) in result.cumulative_likes.iter().enumerate() {
        let stance = content_stance(j, k).expect("catalogue indices are in range");
        likes.push_str(&format!("{stance},{count}\n"));
    }
    let likes_path = out_dir.join("likes_per_content.csv");
    write(&likes_path, likes)?;
    written.push(likes_path);

    let mut opinions = String::from("t,user,opinion\n");
    let dump = |t: usize, xs: &[f64], out: &mut String| {
        for (i, x) in xs.iter().enumerate() {
            out.push_str(&format!("{t},{i},{x}\n"));
        }
    };
    let snapshot_at_zero = result
        .opinion_snapshots
        .first()
        .is_some_and(|(t, _)| *t == 0);
    if !snapshot_at_zero {
        dump(0, &result.initial_opinions, &mut opinions);
    }
    for (t, xs) in &result.opinion_snapshots {
        dump(*t, xs, &mut opinions);
    }
    dump(steps, &result.final_opinions, &mut opinions);
    let opinions_path = out_dir.join("opinions.csv");
    write(&opinions_path, opinions)?;
    written.push(opinions_path);

    if let Some(trace) = &result.recommendation_trace {
        let mut recs = String::from("t,user,content\n");
        for (idx, content) in trace.iter().enumerate() {
            let (t, user) = (idx / users, idx % users);
            recs.push_str(&format!("{t},{user},{content}\n"));
        }
        let recs_path = out_dir.join("recommendations.csv");
        write(&recs_path, recs)?;
        written.push(recs_path);
    }

    let mut per_step = String::from("t,likes\n");
    for (t, likes) in result.likes_per_step.iter().enumerate() {
        per_step.push_str(&format!("{t},{likes}\n"));
    }
    let per_step_path = out_dir.join("likes_per_step.csv");
    write(&per_step_path, per_step)?;
    written.push(per_step_path);

    Ok(written)
}

/// Sampled curves of the three behavioural maps, for plotting:
/// `engagement_payoffs.csv` over the opinion-stance gap, `watch_rate.csv`
/// over the alignment for several steepness values, and `watch_value.csv`
/// over the mean watch rate for several steepness values.
pub fn emit_curves(out_dir: &Path) -> Result<Vec<PathBuf>, SweepError> {
    fs::create_dir_all(out_dir).map_err(|source| SweepError::Io {
        path: out_dir.to_path_buf(),
        source,
    })?;
    let mut written = Vec::new();

    let mut payoffs = String::from("gap,like,dislike,neutral\n");
    for i in -200..=200 {
        let gap = f64::from(i) / 100.0;
        let (like, dislike, neutral) = engagement_payoffs(gap, 0.0);
        payoffs.push_str(&format!("{gap},{like},{dislike},{neutral}\n"));
    }
    let payoffs_path = out_dir.join("engagement_payoffs.csv");
    write(&payoffs_path, payoffs)?;
    written.push(payoffs_path);

    let mut rate = String::from("gamma,alignment,watch_rate\n");
    for gamma in [1.0, 3.0, 5.0, 10.0] {
        for i in -100..=100 {
            let v = f64::from(i) / 100.0;
            rate.push_str(&format!("{gamma},{v},{}\n", watch_rate(v, 1.0, gamma)));
        }
    }
    let rate_path = out_dir.join("watch_rate.csv");
    write(&rate_path, rate)?;
    written.push(rate_path);

    let mut value = String::from("mu,mean_watch,value\n");
    for mu in [1.0, 3.0, 5.0, 10.0] {
        for i in 0..=200 {
            let mean_watch = f64::from(i) / 200.0;
            value.push_str(&format!(
                "{mu},{mean_watch},{}\n",
                watch_value(mean_watch, mu)
            ));
        }
    }
    let value_path = out_dir.join("watch_value.csv");
    write(&value_path, value)?;
    written.push(value_path);

    Ok(written)
}
