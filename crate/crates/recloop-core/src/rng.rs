//! Deterministic random streams.
//!
//! Every simulation owns one 64-bit seed. The seed keys a ChaCha8 cipher;
//! stream 0 initialises the population and stream `i + 1` belongs to user
//! `i` for the whole run. Streams are independent by construction, so
//! per-user work can be scheduled across any number of workers without
//! changing a single draw.
//!
//! Sweep replications derive their run seeds from (master seed, canonical
//! grid key, replication index) through a splitmix64/FNV-1a mix, making
//! seeds independent of grid declaration order.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// splitmix64 finaliser; bijective on u64.
pub fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// FNV-1a over raw bytes; stable across platforms and runs.
pub fn fnv1a(bytes: &[u8]) -> u64 {
    let mut hash = 0xCBF2_9CE4_8422_2325u64;
    for b in bytes {
        hash ^= u64::from(*b);
        hash = hash.wrapping_mul(0x0000_0100_0000_01B3);
    }
    hash
}

/// Seed for one replication run: a pure function of the master seed, the
/// grid point's canonical key, and the replication index.
pub fn derive_run_seed(master_seed: u64, grid_key: &str, replication: u32) -> u64 {
    let key_hash = fnv1a(grid_key.as_bytes());
    splitmix64(master_seed ^ splitmix64(key_hash ^ splitmix64(u64::from(replication))))
}

/// Stream used to draw the initial opinion vector.
pub fn init_stream(seed: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(0);
    rng
}

/// Independent stream owned by user `user` for the whole run.
pub fn user_stream(seed: u64, user: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(user as u64 + 1);
    rng
}
