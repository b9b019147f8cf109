//! Seeded Monte Carlo simulation of the period-by-period adoption process.
//!
//! Each period draws a priority dimension, then an effect vector; the
//! innovation ships iff its effect on the priority dimension strictly
//! exceeds that dimension's hurdle, and then every dimension accumulates its
//! effect. Replication `r` of seed `s` uses ChaCha20 keyed by `s` on stream
//! `r`, so results are reproducible bit for bit and independent of thread
//! scheduling.

use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, Gamma, StandardNormal};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::models::{HurdlePolicy, Regime, RegimeModel, Validated};

/// Draws effect vectors from any of the four regimes.
#[derive(Debug, Clone)]
pub struct EffectSampler {
    kind: Kind,
}

#[derive(Debug, Clone)]
enum Kind {
    /// u = μ_u + σ_u·z₁, v = μ_v + σ_v·(ρ·z₁ + √(1−ρ²)·z₂).
    Bivariate {
        mu: [f64; 2],
        sigma: [f64; 2],
        rho: f64,
        tail: f64,
    },
    /// X_i = μ + common·f + own·(e_i − shift·ē).
    Equicorrelated {
        n: usize,
        mu: f64,
        common: f64,
        own: f64,
        shift: f64,
    },
    /// Normal with scale matrix Σ divided by √(χ²_δ/δ).
    StudentT {
        mu: f64,
        sigma: f64,
        rho: f64,
        tail: f64,
        delta: f64,
        chi_square: Gamma<f64>,
    },
}

impl EffectSampler {
    pub fn new(model: &Validated<RegimeModel>) -> Self {
        let kind = match &**model {
            RegimeModel::Symmetric(m) => Kind::Bivariate {
                mu: [m.mu, m.mu],
                sigma: [m.sigma, m.sigma],
                rho: m.rho,
                tail: (1.0 - m.rho * m.rho).sqrt(),
            },
            RegimeModel::Asymmetric(m) => Kind::Bivariate {
                mu: [m.mu_u, m.mu_v],
                sigma: [m.sigma_u, m.sigma_v],
                rho: m.rho,
                tail: (1.0 - m.rho * m.rho).sqrt(),
            },
            RegimeModel::Multi(m) => {
                let n = m.n as f64;
                if m.rho >= 0.0 {
                    Kind::Equicorrelated {
                        n: m.n,
                        mu: m.mu,
                        common: m.sigma * m.rho.sqrt(),
                        own: m.sigma * (1.0 - m.rho).sqrt(),
                        shift: 0.0,
                    }
                } else {
                    // Cov(e − c·ē·1) = I − ((2c − c²)/n)·J matches (1−ρ)I + ρJ after scaling.
                    let inner = (1.0 + n * m.rho / (1.0 - m.rho)).max(0.0);
                    Kind::Equicorrelated {
                        n: m.n,
                        mu: m.mu,
                        common: 0.0,
                        own: m.sigma * (1.0 - m.rho).sqrt(),
                        shift: 1.0 - inner.sqrt(),
                    }
                }
            }
            RegimeModel::StudentT(m) => Kind::StudentT {
                mu: m.mu,
                sigma: m.sigma,
                rho: m.rho,
                tail: (1.0 - m.rho * m.rho).sqrt(),
                delta: m.delta,
                chi_square: Gamma::new(0.5 * m.delta, 2.0).expect("delta > 2 after validation"),
            },
        };
        EffectSampler { kind }
    }

    pub fn dimensions(&self) -> usize {
        match self.kind {
            Kind::Equicorrelated { n, .. } => n,
            _ => 2,
        }
    }

    /// Fill `out` (length [`dimensions`](Self::dimensions)) with one draw.
    pub fn sample_into<R: Rng + ?Sized>(&self, rng: &mut R, out: &mut [f64]) {
        match self.kind {
            Kind::Bivariate { mu, sigma, rho, tail } => {
                let z1: f64 = rng.sample(StandardNormal);
                let mixed = if tail == 0.0 {
                    rho * z1
                } else {
                    let z2: f64 = rng.sample(StandardNormal);
                    rho * z1 + tail * z2
                };
                out[0] = mu[0] + sigma[0] * z1;
                out[1] = mu[1] + sigma[1] * mixed;
            }
            Kind::Equicorrelated {
                n,
                mu,
                common,
                own,
                shift,
            } => {
                let factor: f64 = if common > 0.0 { rng.sample(StandardNormal) } else { 0.0 };
                if own == 0.0 {
                    out.fill(mu + common * factor);
                    return;
                }
                let mut total = 0.0;
                for slot in out.iter_mut() {
                    let e: f64 = rng.sample(StandardNormal);
                    *slot = e;
                    total += e;
                }
                let centre = shift * total / n as f64;
                for slot in out.iter_mut() {
                    *slot = mu + common * factor + own * (*slot - centre);
                }
            }
            Kind::StudentT {
                mu,
                sigma,
                rho,
                tail,
                delta,
                ref chi_square,
            } => {
                let z1: f64 = rng.sample(StandardNormal);
                let mixed = if tail == 0.0 {
                    rho * z1
                } else {
                    let z2: f64 = rng.sample(StandardNormal);
                    rho * z1 + tail * z2
                };
                let w = chi_square.sample(rng);
                let scale = sigma / (w / delta).sqrt();
                out[0] = mu + scale * z1;
                out[1] = mu + scale * mixed;
            }
        }
    }
}

/// `count` independent effect vectors.
pub fn sample_effects<R: Rng + ?Sized>(model: &Validated<RegimeModel>, count: usize, rng: &mut R) -> Vec<Vec<f64>> {
    let sampler = EffectSampler::new(model);
    (0..count)
        .map(|_| {
            let mut x = vec![0.0; sampler.dimensions()];
            sampler.sample_into(rng, &mut x);
            x
        })
        .collect()
}

/// Draws which dimension the current test targets.
#[derive(Debug, Clone)]
pub struct PrioritySampler {
    cumulative: Vec<f64>,
}

impl PrioritySampler {
    pub fn new(model: &RegimeModel) -> Self {
        let probs = match model {
            RegimeModel::Symmetric(m) => vec![m.p_u, 1.0 - m.p_u],
            RegimeModel::Asymmetric(m) => vec![m.p_u, 1.0 - m.p_u],
            RegimeModel::StudentT(m) => vec![m.p_u, 1.0 - m.p_u],
            RegimeModel::Multi(m) => m.priority_probs.clone(),
        };
        let mut running = 0.0;
        let cumulative = probs
            .iter()
            .map(|p| {
                running += p;
                running
            })
            .collect();
        PrioritySampler { cumulative }
    }

    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        let u: f64 = rng.random();
        self.cumulative
            .iter()
            .position(|&c| u < c)
            .unwrap_or_else(|| self.last_reachable())
    }

    /// Rounding can leave the final cumulative sum just below 1.
    fn last_reachable(&self) -> usize {
        let mut previous = 0.0;
        let mut last = 0;
        for (i, &c) in self.cumulative.iter().enumerate() {
            if c > previous {
                last = i;
            }
            previous = c;
        }
        last
    }
}

/// The adoption rule. Ties are rejected.
#[inline]
pub fn adopts(effect: f64, hurdle: f64) -> bool {
    effect > hurdle
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimulationConfig {
    pub model: Validated<RegimeModel>,
    pub policy: HurdlePolicy,
    pub horizon: u64,
    pub seed: u64,
    pub batch: u32,
    pub record_trajectory: bool,
    /// Periods at which to report the running mean; strictly increasing.
    pub checkpoints: Vec<u64>,
}

impl SimulationConfig {
    pub fn new(model: impl Into<Validated<RegimeModel>>, policy: HurdlePolicy, horizon: u64, seed: u64) -> Self {
        SimulationConfig {
            model: model.into(),
            policy,
            horizon,
            seed,
            batch: 1,
            record_trajectory: false,
            checkpoints: Vec::new(),
        }
    }

    pub fn with_batch(mut self, batch: u32) -> Self {
        self.batch = batch;
        self
    }

    pub fn check(&self) -> Result<Vec<f64>> {
        if self.horizon == 0 {
            return Err(Error::Domain {
                name: "horizon",
                value: 0.0,
                requirement: "at least one period",
            });
        }
        if self.batch == 0 {
            return Err(Error::Domain {
                name: "batch",
                value: 0.0,
                requirement: "at least one replication",
            });
        }
        if !self.policy.is_finite() {
            return Err(Error::Policy {
                regime: self.model.regime().as_str(),
                reason: "hurdles must be finite",
            });
        }
        let increasing = self.checkpoints.windows(2).all(|w| w[0] < w[1]);
        let in_range = self.checkpoints.iter().all(|&c| c >= 1 && c <= self.horizon);
        if !(increasing && in_range) {
            return Err(Error::Domain {
                name: "checkpoints",
                value: f64::NAN,
                requirement: "strictly increasing periods within 1..=horizon",
            });
        }
        self.policy.hurdles(self.model.regime(), self.model.dimensions())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Checkpoint {
    pub periods: u64,
    pub mean_per_period: f64,
    pub std_error: f64,
}

/// Cumulative per-dimension performance after every period.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    dims: usize,
    cumulative: Vec<f64>,
    adopted: Vec<bool>,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.adopted.len()
    }

    pub fn is_empty(&self) -> bool {
        self.adopted.is_empty()
    }

    /// Cumulative vector after period `t` (1-based).
    pub fn cumulative_at(&self, t: usize) -> &[f64] {
        &self.cumulative[(t - 1) * self.dims..t * self.dims]
    }

    pub fn adopted_at(&self, t: usize) -> bool {
        self.adopted[t - 1]
    }

    /// Columns `t,U_t,V_t,adopted`; with more than two dimensions the
    /// cumulative columns are `X1_t..Xn_t`. `adopted` is 1 or 0.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let mut header = vec!["t".to_string()];
        if self.dims == 2 {
            header.extend(["U_t".to_string(), "V_t".to_string()]);
        } else {
            header.extend((1..=self.dims).map(|i| format!("X{i}_t")));
        }
        header.push("adopted".into());
        w.write_record(&header)?;
        let mut row = Vec::with_capacity(self.dims + 2);
        for t in 1..=self.len() {
            row.clear();
            row.push(t.to_string());
            row.extend(self.cumulative_at(t).iter().map(|x| x.to_string()));
            row.push(if self.adopted_at(t) { "1" } else { "0" }.to_string());
            w.write_record(&row)?;
        }
        w.flush()?;
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReplicationResult {
    pub replication: u32,
    /// Final cumulative performance per dimension, (U_T, V_T) for two.
    pub cumulative: Vec<f64>,
    pub adoption_count: u64,
    pub mean_per_period: f64,
    /// Standard error of the mean, treating periods as i.i.d.
    pub std_error: f64,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub checkpoints: Vec<Checkpoint>,
    #[serde(skip)]
    pub trajectory: Option<Trajectory>,
    #[serde(skip)]
    moments: Moments,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimulationResult {
    pub regime: Regime,
    pub horizon: u64,
    pub seed: u64,
    pub policy: HurdlePolicy,
    /// Pooled over every period of every replication.
    pub mean_per_period: f64,
    pub std_error: f64,
    pub adoption_count: u64,
    pub replications: Vec<ReplicationResult>,
}

/// Running count, mean and sum of squared deviations.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
struct Moments {
    count: u64,
    mean: f64,
    m2: f64,
}

impl Moments {
    fn push(&mut self, x: f64) {
        self.count += 1;
        let d = x - self.mean;
        self.mean += d / self.count as f64;
        self.m2 += d * (x - self.mean);
    }

    fn merge(self, other: Moments) -> Moments {
        if self.count == 0 {
            return other;
        }
        let count = self.count + other.count;
        let d = other.mean - self.mean;
        let w = other.count as f64 / count as f64;
        Moments {
            count,
            mean: self.mean + d * w,
            m2: self.m2 + other.m2 + d * d * self.count as f64 * w,
        }
    }

    fn std_error(&self) -> f64 {
        let n = self.count as f64;
        (self.m2 / (n - 1.0) / n).sqrt()
    }
}

pub(crate) fn replication_rng(seed: u64, replication: u64) -> ChaCha20Rng {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(replication);
    rng
}

fn run_replication(config: &SimulationConfig, hurdles: &[f64], replication: u32) -> ReplicationResult {
    let sampler = EffectSampler::new(&config.model);
    let priority = PrioritySampler::new(&config.model);
    let dims = sampler.dimensions();
    let mut rng = replication_rng(config.seed, u64::from(replication));

    let mut effects = vec![0.0; dims];
    let mut cumulative = vec![0.0; dims];
    let mut total = 0.0;
    let mut adoption_count = 0;
    let mut moments = Moments::default();
    let mut checkpoints = Vec::with_capacity(config.checkpoints.len());
    let mut next_checkpoint = config.checkpoints.iter().peekable();
    let mut trajectory = config.record_trajectory.then(|| Trajectory {
        dims,
        cumulative: Vec::with_capacity(config.horizon as usize * dims),
        adopted: Vec::with_capacity(config.horizon as usize),
    });

    for t in 1..=config.horizon {
        let a = priority.draw(&mut rng);
        sampler.sample_into(&mut rng, &mut effects);
        let adopted = adopts(effects[a], hurdles[a]);
        let mut contribution = 0.0;
        if adopted {
            adoption_count += 1;
            for (c, x) in cumulative.iter_mut().zip(&effects) {
                *c += x;
                contribution += x;
            }
        }
        total += contribution;
        moments.push(contribution);
        if let Some(tr) = trajectory.as_mut() {
            tr.cumulative.extend_from_slice(&cumulative);
            tr.adopted.push(adopted);
        }
        if next_checkpoint.peek() == Some(&&t) {
            next_checkpoint.next();
            checkpoints.push(Checkpoint {
                periods: t,
                mean_per_period: total / t as f64,
                std_error: moments.std_error(),
            });
        }
    }

    ReplicationResult {
        replication,
        cumulative,
        adoption_count,
        mean_per_period: total / config.horizon as f64,
        std_error: moments.std_error(),
        checkpoints,
        trajectory,
        moments,
    }
}

/// Run every replication of `config`, in parallel, merged in replication order.
pub fn run(config: &SimulationConfig) -> Result<SimulationResult> {
    let hurdles = config.check()?;
    let replications: Vec<ReplicationResult> = (0..config.batch)
        .into_par_iter()
        .map(|r| run_replication(config, &hurdles, r))
        .collect();
    let pooled = replications
        .iter()
        .fold(Moments::default(), |acc, r| acc.merge(r.moments));
    let grand_total: f64 = replications.iter().map(|r| r.mean_per_period * config.horizon as f64).sum();
    Ok(SimulationResult {
        regime: config.model.regime(),
        horizon: config.horizon,
        seed: config.seed,
        policy: config.policy,
        mean_per_period: grand_total / (config.horizon as f64 * f64::from(config.batch)),
        std_error: pooled.std_error(),
        adoption_count: replications.iter().map(|r| r.adoption_count).sum(),
        replications,
    })
}

/// Running mean and standard error of the first replication at each checkpoint.
pub fn convergence_report(config: &SimulationConfig, checkpoints: &[u64]) -> Result<Vec<Checkpoint>> {
    let single = SimulationConfig {
        batch: 1,
        horizon: config.horizon.max(checkpoints.last().copied().unwrap_or(0)),
        checkpoints: checkpoints.to_vec(),
        record_trajectory: false,
        ..config.clone()
    };
    let mut result = run(&single)?;
    Ok(std::mem::take(&mut result.replications[0].checkpoints))
}
