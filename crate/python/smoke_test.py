#!/usr/bin/env python3
"""Smoke test for the recloop Python extension.

Builds nothing itself: it locates the compiled cdylib under target/
(release preferred), stages it as an importable module, runs a small
simulation twice, and checks determinism plus a few analytic anchors.

Usage:
    cargo build --release -p recloop-py
    python3 python/smoke_test.py
"""

import math
import shutil
import sys
import tempfile
from pathlib import Path

REPO = Path(__file__).resolve().parent.parent


def stage_module() -> Path:
    candidates = [
        REPO / "target" / "release" / "librecloop.so",
        REPO / "target" / "debug" / "librecloop.so",
        REPO / "target" / "release" / "librecloop.dylib",
        REPO / "target" / "debug" / "librecloop.dylib",
    ]
    built = next((p for p in candidates if p.exists()), None)
    if built is None:
        sys.exit(
            "no compiled extension found; run `cargo build --release -p recloop-py` first"
        )
    stage = Path(tempfile.mkdtemp(prefix="recloop-py-"))
    shutil.copy2(built, stage / "recloop.so")
    sys.path.insert(0, str(stage))
    return stage


def main() -> None:
    stage_module()
    import recloop

    # Analytic anchors of the behavioural maps.
    stances = recloop.content_stances(5)
    assert stances == [-1.0, -0.5, 0.0, 0.5, 1.0], stances
    assert recloop.watch_rate(0.7, 0.0) == 0.5
    like, dislike, neutral = recloop.engagement_payoffs(0.3, 0.3)
    assert abs(like - 1.0) < 1e-12 and abs(dislike) < 1e-12 and abs(neutral) < 1e-12

    # Population sampling: bounded, deterministic, roughly centred.
    xs = recloop.sample_ndic(20000, seed=7)
    assert all(-1.0 <= x <= 1.0 for x in xs)
    assert abs(sum(xs) / len(xs)) < 0.02
    assert xs == recloop.sample_ndic(20000, seed=7)
    assert xs != recloop.sample_ndic(20000, seed=8)

    # A short polarising run: two extreme stances drive engagement up.
    config = recloop.SimulationConfig(
        users=100, steps=300, k=2, delta=5, seed=11, distribution="ndic"
    )
    result = recloop.run(config)
    assert result.likes_pct > 80.0, result
    assert result.watch_rate_pct > 80.0, result
    md_change, mr_change = result.pct_changes()
    assert md_change is not None and md_change > 0.0
    assert mr_change is not None and mr_change > 0.0
    assert len(result.final_opinions()) == 100
    assert all(-1.0 <= x <= 1.0 for x in result.final_opinions())
    assert sum(result.cumulative_likes()) == result.total_likes

    # Determinism: same config, same numbers.
    again = recloop.run(config)
    assert again.final_opinions() == result.final_opinions()
    assert again.metrics()["likes_pct"] == result.likes_pct

    # A virality-dominant run coalesces opinions around neutral content.
    viral = recloop.run(
        recloop.SimulationConfig(
            users=100, steps=300, k=11, omega=0.9, delta=5, seed=3
        )
    )
    assert viral.dominance > 0.5, viral
    assert abs(viral.viral_stance) <= 0.4, viral
    assert not math.isnan(viral.radicalisation)

    print("smoke test passed")
    print(" ", result)
    print(" ", viral)


if __name__ == "__main__":
    main()
