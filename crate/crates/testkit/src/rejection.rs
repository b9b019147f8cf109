//! Rejection-sampling estimates of truncated means E[X | X > z].

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal, StudentT};

#[derive(Debug, Clone, Copy)]
pub struct Estimate {
    pub mean: f64,
    pub std_error: f64,
    pub accepted: u64,
}

fn keep_above<D: Distribution<f64>>(dist: D, z: f64, draws: u64, seed: u64) -> Estimate {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut n, mut mean, mut m2) = (0u64, 0.0f64, 0.0f64);
    for _ in 0..draws {
        let x = dist.sample(&mut rng);
        if x > z {
            n += 1;
            let d = x - mean;
            mean += d / n as f64;
            m2 += d * (x - mean);
        }
    }
    let var = if n > 1 { m2 / (n - 1) as f64 } else { f64::NAN };
    Estimate {
        mean,
        std_error: (var / n as f64).sqrt(),
        accepted: n,
    }
}

/// E[X | X > z] for X ~ N(mu, sigma²).
pub fn truncated_normal_mean(mu: f64, sigma: f64, z: f64, draws: u64, seed: u64) -> Estimate {
    keep_above(Normal::new(mu, sigma).unwrap(), z, draws, seed)
}

/// E[X | X > z] for X = mu + sigma·T, T a standard Student t with `delta` degrees of freedom.
pub fn truncated_t_mean(mu: f64, sigma: f64, delta: f64, z: f64, draws: u64, seed: u64) -> Estimate {
    let t = StudentT::new(delta).unwrap();
    keep_above(t.map(|x| mu + sigma * x), z, draws, seed)
}
