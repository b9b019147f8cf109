//! Merge command-line flags over a parameter file into a validated model.

use seesaw::{
    AsymmetricNormalModel, EquicorrelatedModel, HurdlePolicy, Model, RegimeModel, StudentTModel, SymmetricNormalModel,
    Validated, ValidationMode,
};
use serde_json::{Map, Value};

use crate::args::{HurdleArgs, ModelArgs, RegimeArg};
use crate::config::ConfigFile;
use crate::CliError;

pub struct Resolved {
    pub model: Validated<RegimeModel>,
    pub mode: ValidationMode,
    pub config: ConfigFile,
}

impl Resolved {
    /// Parameters as used, for echoing alongside results.
    pub fn echo(&self) -> Map<String, Value> {
        let mut map = match serde_json::to_value(&*self.model) {
            Ok(Value::Object(m)) => m,
            _ => Map::new(),
        };
        if self.mode == ValidationMode::Relaxed {
            map.insert("validation".into(), "relaxed".into());
        }
        map
    }
}

fn regime_of(args: &ModelArgs, config: &ConfigFile) -> Result<RegimeArg, CliError> {
    if let Some(r) = args.regime {
        return Ok(r);
    }
    match config.regime.as_deref() {
        Some("sym") => Ok(RegimeArg::Sym),
        Some("asym") => Ok(RegimeArg::Asym),
        Some("multi") => Ok(RegimeArg::Multi),
        Some("t") => Ok(RegimeArg::T),
        Some(other) => Err(CliError::Config(format!(
            "unknown regime [{other}] in config (expected sym, asym, multi or t)"
        ))),
        None => Err(CliError::Config(
            "no regime given: pass --regime or start the config file with a [regime] header".into(),
        )),
    }
}

fn applies(regime: RegimeArg, key: &str) -> bool {
    match key {
        "mu" | "sigma" => regime != RegimeArg::Asym,
        "rho" => true,
        "mu_u" | "mu_v" | "sigma_u" | "sigma_v" => regime == RegimeArg::Asym,
        "p_u" => regime != RegimeArg::Multi,
        "n" | "priority_probs" => regime == RegimeArg::Multi,
        "delta" => regime == RegimeArg::T,
        _ => true,
    }
}

pub fn load_config(args: &ModelArgs) -> Result<ConfigFile, CliError> {
    match &args.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
            ConfigFile::parse(&text)
        }
        None => Ok(ConfigFile::default()),
    }
}

pub fn resolve(args: &ModelArgs) -> Result<Resolved, CliError> {
    let config = load_config(args)?;
    let regime = regime_of(args, &config)?;

    let flags: [(&str, bool); 11] = [
        ("mu", args.mu.is_some()),
        ("sigma", args.sigma.is_some()),
        ("rho", args.rho.is_some()),
        ("mu_u", args.mu_u.is_some()),
        ("mu_v", args.mu_v.is_some()),
        ("sigma_u", args.sigma_u.is_some()),
        ("sigma_v", args.sigma_v.is_some()),
        ("p_u", args.p_u.is_some()),
        ("n", args.n.is_some()),
        ("priority_probs", args.priority_probs.is_some()),
        ("delta", args.delta.is_some()),
    ];
    let given = flags
        .iter()
        .filter(|(_, set)| *set)
        .map(|(k, _)| *k)
        .chain(config.values.keys().map(String::as_str));
    for key in given {
        if !applies(regime, key) {
            return Err(CliError::Config(format!(
                "{key} does not apply to the {} regime",
                regime_name(regime)
            )));
        }
    }

    // Absent values become NaN so validation names the bound they must meet.
    let num = |flag: Option<f64>, key: &str| -> Result<f64, CliError> {
        Ok(match flag {
            Some(v) => v,
            None => config.number(key)?.unwrap_or(f64::NAN),
        })
    };
    let p_u = match args.p_u {
        Some(p) => p,
        None => config.number("p_u")?.unwrap_or(0.5),
    };
    let mode = if args.relaxed {
        ValidationMode::Relaxed
    } else {
        ValidationMode::Strict
    };

    let model = match regime {
        RegimeArg::Sym => RegimeModel::Symmetric(SymmetricNormalModel {
            mu: num(args.mu, "mu")?,
            sigma: num(args.sigma, "sigma")?,
            rho: num(args.rho, "rho")?,
            p_u,
        }),
        RegimeArg::Asym => RegimeModel::Asymmetric(AsymmetricNormalModel {
            mu_u: num(args.mu_u, "mu_u")?,
            mu_v: num(args.mu_v, "mu_v")?,
            sigma_u: num(args.sigma_u, "sigma_u")?,
            sigma_v: num(args.sigma_v, "sigma_v")?,
            rho: num(args.rho, "rho")?,
            p_u,
        }),
        RegimeArg::Multi => {
            let n = match args.n {
                Some(n) => n,
                None => config.integer::<usize>("n")?.unwrap_or(0),
            };
            let priority_probs = match &args.priority_probs {
                Some(p) => p.clone(),
                None => config
                    .list("priority_probs")?
                    .unwrap_or_else(|| vec![1.0 / n as f64; n]),
            };
            RegimeModel::Multi(EquicorrelatedModel {
                n,
                mu: num(args.mu, "mu")?,
                sigma: num(args.sigma, "sigma")?,
                rho: num(args.rho, "rho")?,
                priority_probs,
            })
        }
        RegimeArg::T => RegimeModel::StudentT(StudentTModel {
            mu: num(args.mu, "mu")?,
            sigma: num(args.sigma, "sigma")?,
            rho: num(args.rho, "rho")?,
            delta: num(args.delta, "delta")?,
            p_u,
        }),
    };
    let model = model.validate_with(mode).map_err(seesaw::Error::from)?;
    Ok(Resolved { model, mode, config })
}

fn regime_name(r: RegimeArg) -> &'static str {
    match r {
        RegimeArg::Sym => "sym",
        RegimeArg::Asym => "asym",
        RegimeArg::Multi => "multi",
        RegimeArg::T => "t",
    }
}

/// Hurdle from `--z` or `--z-u/--z-v`, falling back to the parameter file.
pub fn hurdle(args: &HurdleArgs, config: &ConfigFile) -> Result<Option<HurdlePolicy>, CliError> {
    if let Some(z) = args.z {
        return Ok(Some(HurdlePolicy::Common(z)));
    }
    if let (Some(z_u), Some(z_v)) = (args.z_u, args.z_v) {
        return Ok(Some(HurdlePolicy::PerDimension { z_u, z_v }));
    }
    match (config.number("z")?, config.number("z_u")?, config.number("z_v")?) {
        (None, None, None) => Ok(None),
        (Some(z), None, None) => Ok(Some(HurdlePolicy::Common(z))),
        (None, Some(z_u), Some(z_v)) => Ok(Some(HurdlePolicy::PerDimension { z_u, z_v })),
        _ => Err(CliError::Config(
            "config must set either z or both z_u and z_v".into(),
        )),
    }
}
