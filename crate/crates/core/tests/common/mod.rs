//! Helpers shared by the integration tests.
#![allow(dead_code)]

use curved_cc::manifold::{project_tangent, retract};
use curved_cc::solver::random_positions;
use curved_cc::{AmbientVector, Configuration, Sign};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random valid configuration with masses in `[0.5, 2]`.
pub fn random_config(sign: Sign, n: usize, rng: &mut ChaCha8Rng) -> Configuration {
    let q = random_positions(sign, n, 0.3, rng);
    let m = (0..n).map(|_| rng.random_range(0.5..2.0)).collect();
    Configuration::new(sign, m, q).unwrap()
}

/// One random tangent vector per body.
pub fn random_tangent(config: &Configuration, rng: &mut ChaCha8Rng) -> Vec<AmbientVector> {
    config
        .positions()
        .iter()
        .map(|&q| {
            let mut g = || rng.sample::<f64, _>(StandardNormal);
            project_tangent(q, AmbientVector::new(g(), g(), g(), g()), config.sign())
        })
        .collect()
}

/// `config` moved by `t * v` and retracted.
pub fn moved(config: &Configuration, v: &[AmbientVector], t: f64) -> Configuration {
    let q = config
        .positions()
        .iter()
        .zip(v)
        .map(|(&q, &v)| retract(q + v * t, config.sign()).unwrap())
        .collect();
    Configuration::new(config.sign(), config.masses().to_vec(), q).unwrap()
}

/// Central difference of `f` along the retraction curve through `config`.
pub fn directional_fd(
    f: impl Fn(&Configuration) -> f64,
    config: &Configuration,
    v: &[AmbientVector],
    h: f64,
) -> f64 {
    (f(&moved(config, v, h)) - f(&moved(config, v, -h))) / (2.0 * h)
}

pub fn max_abs_diff(a: AmbientVector, b: AmbientVector) -> f64 {
    (a - b).to_array().iter().fold(0.0, |m, d| m.max(d.abs()))
}
