//! Historical A/B test records: CSV ingestion, moment estimation and hurdle
//! recommendations.
//!
//! CSV schema, one test per row after a header:
//!
//! ```text
//! test_id,primary_dim,primary_effect,secondary_effect,adopted
//! checkout-17,u,0.42,-0.61,true
//! search-3,v,-0.05,,
//! ```
//!
//! `primary_dim` is `u` or `v`. The last two columns may be left empty or
//! dropped entirely. Variances use the unbiased N − 1 convention.

use std::fmt;
use std::io::{Read, Write};

use serde::Serialize;

use crate::analysis::{optimal_hurdle_asymmetric, optimal_hurdle_symmetric};
use crate::closed_form::PerformanceValue;
use crate::error::{Error, Result};
use crate::models::{
    AsymmetricNormalModel, HurdlePolicy, Model, Regime, RegimeModel, SymmetricNormalModel, Validated,
    ValidationMode,
};
use crate::simulate::{adopts, replication_rng, EffectSampler, PrioritySampler};

pub const COLUMNS: [&str; 5] = ["test_id", "primary_dim", "primary_effect", "secondary_effect", "adopted"];
const REQUIRED: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Dimension {
    U,
    V,
}

impl Dimension {
    pub fn as_str(self) -> &'static str {
        match self {
            Dimension::U => "u",
            Dimension::V => "v",
        }
    }

    fn parse(s: &str) -> Option<Self> {
        match s.trim() {
            "u" | "U" => Some(Dimension::U),
            "v" | "V" => Some(Dimension::V),
            _ => None,
        }
    }
}

impl fmt::Display for Dimension {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One past experiment.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HistoricalRecord {
    pub test_id: String,
    pub primary_dim: Dimension,
    pub primary_effect: f64,
    /// Effect on the dimension the test did not target, when it was tracked.
    pub secondary_effect: Option<f64>,
    pub adopted: Option<bool>,
}

impl HistoricalRecord {
    /// (u, v) effects, either of which may be unknown.
    fn effects(&self) -> (Option<f64>, Option<f64>) {
        match self.primary_dim {
            Dimension::U => (Some(self.primary_effect), self.secondary_effect),
            Dimension::V => (self.secondary_effect, Some(self.primary_effect)),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RowError {
    /// 1-based line in the input, the header being line 1.
    pub line: u64,
    pub message: String,
}

impl fmt::Display for RowError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}: {}", self.line, self.message)
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct Ingested {
    pub records: Vec<HistoricalRecord>,
    pub errors: Vec<RowError>,
}

/// Parse a CSV stream. Bad rows are reported and skipped; only a missing or
/// malformed header is fatal.
pub fn ingest<R: Read>(input: R) -> Result<Ingested> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .from_reader(input);
    let mut rows = reader.records();
    let header = match rows.next() {
        None => return Err(Error::MissingHeader),
        Some(Err(e)) => return Err(e.into()),
        Some(Ok(h)) => h,
    };
    let names: Vec<&str> = header.iter().map(str::trim).collect();
    if names.first().map(|n| n.trim_start_matches('\u{feff}')) != Some(COLUMNS[0]) {
        return Err(Error::MissingHeader);
    }
    let width = names.len();
    if width < REQUIRED || width > COLUMNS.len() || names[1..] != COLUMNS[1..width] {
        return Err(Error::BadHeader(names.join(",")));
    }

    let mut out = Ingested::default();
    for row in rows {
        match row {
            Ok(row) => {
                let line = row.position().map_or(0, |p| p.line());
                match parse_row(&row, width) {
                    Ok(r) => out.records.push(r),
                    Err(message) => out.errors.push(RowError { line, message }),
                }
            }
            Err(e) => {
                let line = e.position().map_or(0, |p| p.line());
                out.errors.push(RowError {
                    line,
                    message: e.to_string(),
                });
            }
        }
    }
    Ok(out)
}

fn parse_row(row: &csv::StringRecord, width: usize) -> std::result::Result<HistoricalRecord, String> {
    if row.len() < REQUIRED || row.len() > width {
        return Err(format!("expected {REQUIRED} to {width} fields, found {}", row.len()));
    }
    let optional = |i: usize| row.get(i).map(str::trim).filter(|s| !s.is_empty());
    let effect = |name: &str, s: &str| match s.trim().parse::<f64>() {
        Ok(x) if x.is_finite() => Ok(x),
        _ => Err(format!("{name} {s:?} is not a finite number")),
    };
    let primary_dim = Dimension::parse(&row[1]).ok_or_else(|| format!("primary_dim {:?} is not u or v", &row[1]))?;
    let primary_effect = effect("primary_effect", &row[2])?;
    let secondary_effect = optional(3).map(|s| effect("secondary_effect", s)).transpose()?;
    let adopted = optional(4)
        .map(|s| match s {
            "true" | "TRUE" | "True" | "1" => Ok(true),
            "false" | "FALSE" | "False" | "0" => Ok(false),
            other => Err(format!("adopted {other:?} is not a boolean")),
        })
        .transpose()?;
    Ok(HistoricalRecord {
        test_id: row[0].to_string(),
        primary_dim,
        primary_effect,
        secondary_effect,
        adopted,
    })
}

/// Write records with the full five-column header. Numbers use the shortest
/// representation that parses back to the same value.
pub fn export<W: Write>(records: &[HistoricalRecord], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(COLUMNS)?;
    for r in records {
        w.write_record([
            r.test_id.clone(),
            r.primary_dim.to_string(),
            r.primary_effect.to_string(),
            r.secondary_effect.map(|x| x.to_string()).unwrap_or_default(),
            r.adopted.map(|b| b.to_string()).unwrap_or_default(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Sample mean and standard deviation of one dimension.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DimensionEstimate {
    pub n: usize,
    /// Needs at least one observation.
    pub mean: Option<f64>,
    /// Needs at least two observations.
    pub std_dev: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EstimatedModel {
    pub records: usize,
    pub u: DimensionEstimate,
    pub v: DimensionEstimate,
    /// Both dimensions treated as draws from one distribution.
    pub pooled: DimensionEstimate,
    /// Pearson correlation over records carrying both effects, clamped to [−1, 1].
    pub rho: Option<f64>,
    pub pairs: usize,
    /// Share of records whose primary dimension is u.
    pub p_u: Option<f64>,
    /// Records carrying an adopted flag, and how many of those were adopted.
    pub labelled: usize,
    pub adopted: usize,
    /// Quantities that could not be estimated.
    pub missing: Vec<&'static str>,
}

#[derive(Default)]
struct Accumulator {
    n: usize,
    mean: f64,
    m2: f64,
}

impl Accumulator {
    fn push(&mut self, x: f64) {
        self.n += 1;
        let d = x - self.mean;
        self.mean += d / self.n as f64;
        self.m2 += d * (x - self.mean);
    }

    fn estimate(&self) -> DimensionEstimate {
        DimensionEstimate {
            n: self.n,
            mean: (self.n >= 1).then_some(self.mean),
            std_dev: (self.n >= 2).then(|| (self.m2 / (self.n - 1) as f64).sqrt()),
        }
    }
}

pub fn estimate_moments(records: &[HistoricalRecord]) -> EstimatedModel {
    let (mut u, mut v) = (Accumulator::default(), Accumulator::default());
    let mut pairs = Vec::new();
    for r in records {
        match r.effects() {
            (Some(a), Some(b)) => {
                u.push(a);
                v.push(b);
                pairs.push((a, b));
            }
            (Some(a), None) => u.push(a),
            (None, Some(b)) => v.push(b),
            (None, None) => {}
        }
    }

    let pooled = {
        let n = u.n + v.n;
        let mean = (n >= 1).then(|| (u.mean * u.n as f64 + v.mean * v.n as f64) / n as f64);
        let groups = usize::from(u.n > 0) + usize::from(v.n > 0);
        let std_dev = (n > groups).then(|| ((u.m2 + v.m2) / (n - groups) as f64).sqrt());
        DimensionEstimate { n, mean, std_dev }
    };

    let rho = correlation(&pairs);
    let labelled = records.iter().filter(|r| r.adopted.is_some()).count();
    let adopted = records.iter().filter(|r| r.adopted == Some(true)).count();
    let p_u = (!records.is_empty())
        .then(|| records.iter().filter(|r| r.primary_dim == Dimension::U).count() as f64 / records.len() as f64);

    let (u, v) = (u.estimate(), v.estimate());
    let mut missing = Vec::new();
    for (name, present) in [
        ("mu_u", u.mean.is_some()),
        ("sigma_u", u.std_dev.is_some()),
        ("mu_v", v.mean.is_some()),
        ("sigma_v", v.std_dev.is_some()),
        ("rho", rho.is_some()),
    ] {
        if !present {
            missing.push(name);
        }
    }

    EstimatedModel {
        records: records.len(),
        u,
        v,
        pooled,
        rho,
        pairs: pairs.len(),
        p_u,
        labelled,
        adopted,
        missing,
    }
}

fn correlation(pairs: &[(f64, f64)]) -> Option<f64> {
    if pairs.len() < 2 {
        return None;
    }
    let n = pairs.len() as f64;
    let (mx, my) = pairs.iter().fold((0.0, 0.0), |(a, b), &(x, y)| (a + x / n, b + y / n));
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for &(x, y) in pairs {
        let (dx, dy) = (x - mx, y - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx == 0.0 || syy == 0.0 {
        return None;
    }
    Some((sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0))
}

/// Which model the estimates are plugged into.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum RecommendRegime {
    /// Common mean and standard deviation, pooled over both dimensions.
    Symmetric,
    Asymmetric,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Recommendation {
    pub regime: Regime,
    pub z_star: HurdlePolicy,
    pub performance_at_optimum: PerformanceValue,
    pub estimates: EstimatedModel,
    pub caveats: Vec<String>,
}

fn need(x: Option<f64>, name: &'static str) -> Result<f64> {
    x.ok_or(Error::Insufficient(name))
}

/// Plug the estimates into the chosen model and return its optimal hurdle.
pub fn recommend(estimated: &EstimatedModel, regime: RecommendRegime, mode: ValidationMode) -> Result<Recommendation> {
    let rho = need(estimated.rho, "rho")?;
    let optimum = match regime {
        RecommendRegime::Symmetric => {
            let model = SymmetricNormalModel::new(
                need(estimated.pooled.mean, "mu")?,
                need(estimated.pooled.std_dev, "sigma")?,
                rho,
            )
            .validate_with(mode)?;
            optimal_hurdle_symmetric(&model)?
        }
        RecommendRegime::Asymmetric => {
            let model = AsymmetricNormalModel {
                mu_u: need(estimated.u.mean, "mu_u")?,
                mu_v: need(estimated.v.mean, "mu_v")?,
                sigma_u: need(estimated.u.std_dev, "sigma_u")?,
                sigma_v: need(estimated.v.std_dev, "sigma_v")?,
                rho,
                p_u: need(estimated.p_u, "p_u")?,
            }
            .validate_with(mode)?;
            optimal_hurdle_asymmetric(&model)?
        }
    };

    let mut caveats = vec![format!(
        "parameters are estimated from {} records ({} with both effects); the recommended hurdle inherits their sampling error",
        estimated.records, estimated.pairs
    )];
    if estimated.labelled > 0 && estimated.adopted == estimated.labelled {
        caveats.push(
            "every labelled test was adopted: the data likely covers adopted tests only, so the moments describe a truncated distribution and are biased"
                .to_string(),
        );
    }
    if estimated.pairs < estimated.records {
        caveats.push(format!(
            "correlation uses only the {} of {} records that report a secondary effect",
            estimated.pairs, estimated.records
        ));
    }
    if mode == ValidationMode::Relaxed {
        caveats.push("relaxed validation: only the sum of the mean effects is required to be negative".to_string());
    }

    Ok(Recommendation {
        regime: optimum.regime,
        z_star: optimum.z_star,
        performance_at_optimum: optimum.performance_at_optimum,
        estimates: estimated.clone(),
        caveats,
    })
}

/// Simulated history: `count` tests from a two-dimensional model, each
/// recording both effects and whether `policy` adopted it.
pub fn synthesize_records(
    model: &Validated<RegimeModel>,
    policy: HurdlePolicy,
    count: usize,
    seed: u64,
) -> Result<Vec<HistoricalRecord>> {
    let hurdles = policy.hurdles(model.regime(), model.dimensions())?;
    if model.dimensions() != 2 {
        return Err(Error::Policy {
            regime: model.regime().as_str(),
            reason: "historical records describe two dimensions",
        });
    }
    let sampler = EffectSampler::new(model);
    let priority = PrioritySampler::new(model);
    let mut rng = replication_rng(seed, 0);
    let mut x = [0.0; 2];
    Ok((0..count)
        .map(|i| {
            let a = priority.draw(&mut rng);
            sampler.sample_into(&mut rng, &mut x);
            HistoricalRecord {
                test_id: format!("t{i}"),
                primary_dim: if a == 0 { Dimension::U } else { Dimension::V },
                primary_effect: x[a],
                secondary_effect: Some(x[1 - a]),
                adopted: Some(adopts(x[a], hurdles[a])),
            }
        })
        .collect())
}
