use proptest::test_runner::{Config, RngSeed};

/// Fixed unless `PROPTEST_RNG_SEED` is set.
pub const DEFAULT_SEED: u64 = 0x6b75_6d6d_6572;

pub fn config(cases: u32) -> Config {
    let mut c = Config::with_cases(cases);
    if c.rng_seed == RngSeed::Random {
        c.rng_seed = RngSeed::Fixed(DEFAULT_SEED);
    }
    c
}
