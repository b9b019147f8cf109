use std::io::Write;
use std::path::Path;

use seesaw::analysis::{cross_check, normal_threshold, optimal_hurdle, seesaw_check, student_t_threshold};
use seesaw::closed_form::performance;
use seesaw::estimate::{estimate_moments, export, ingest, recommend, synthesize_records, RecommendRegime};
use seesaw::simulate::{self, SimulationConfig};
use seesaw::{HurdlePolicy, ValidationMode};
use serde_json::{json, Map, Value};

use crate::args::{Command, Format, HurdleArgs, ModelArgs, OutputArgs, RecommendRegimeArg};
use crate::params::{hurdle, resolve};
use crate::render::Report;
use crate::CliError;

pub fn execute(command: Command, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<(), CliError> {
    let (report, output, default) = match command {
        Command::Eval { model, hurdle, output } => (eval(&model, &hurdle)?, output, Format::Table),
        Command::Region { model, output } => (region(&model)?, output, Format::Table),
        Command::Optimize {
            model,
            cross_check,
            output,
        } => (optimize(&model, cross_check)?, output, Format::Table),
        Command::Simulate {
            model,
            hurdle,
            optimal,
            horizon,
            batch,
            checkpoints,
            trajectory,
            records,
            output,
        } => {
            let opts = SimulateOptions {
                optimal,
                horizon,
                batch,
                checkpoints,
                trajectory: trajectory.as_deref(),
                records: records.as_deref(),
            };
            (simulate(&model, &hurdle, opts)?, output, Format::Table)
        }
        Command::Figure2 {
            alpha_min,
            alpha_max,
            alpha_step,
            deltas,
            output,
        } => (figure2(alpha_min, alpha_max, alpha_step, &deltas)?, output, Format::Csv),
        Command::Recommend {
            input,
            regime,
            relaxed,
            output,
        } => (recommend_cmd(&input, regime, relaxed, stderr)?, output, Format::Json),
    };
    let OutputArgs { format, out } = output;
    report.emit(format.unwrap_or(default), out.as_deref(), stdout, stderr)
}

fn policy_text(p: HurdlePolicy) -> String {
    match p {
        HurdlePolicy::Common(z) => format!("{z}"),
        HurdlePolicy::PerDimension { z_u, z_v } => format!("z_u = {z_u}, z_v = {z_v}"),
    }
}

fn policy_columns(p: HurdlePolicy, suffix: &str) -> (Vec<String>, Vec<String>) {
    match p {
        HurdlePolicy::Common(z) => (vec![format!("z{suffix}")], vec![z.to_string()]),
        HurdlePolicy::PerDimension { z_u, z_v } => (
            vec![format!("z_u{suffix}"), format!("z_v{suffix}")],
            vec![z_u.to_string(), z_v.to_string()],
        ),
    }
}

fn eval(args: &ModelArgs, hurdle_args: &HurdleArgs) -> Result<Report, CliError> {
    let r = resolve(args)?;
    let policy = hurdle(hurdle_args, &r.config)?.unwrap_or_default();
    let value = performance(&r.model, policy)?;

    let mut rep = Report::new(r.echo());
    rep.field("hurdle", policy);
    rep.field("value", value.value);
    rep.line("hurdle", policy_text(policy));
    rep.line("long-run performance", value.value);
    let (mut header, mut cells) = (vec!["regime".to_string()], vec![value.regime.as_str().to_string()]);
    let (h, c) = policy_columns(policy, "");
    header.extend(h);
    cells.extend(c);
    header.push("value".into());
    cells.push(value.value.to_string());
    rep.csv(&header);
    rep.row(&cells);
    Ok(rep)
}

fn region(args: &ModelArgs) -> Result<Report, CliError> {
    let r = resolve(args)?;
    let v = seesaw_check(&r.model)?;

    let mut rep = Report::new(r.echo());
    rep.field("verdict", v);
    rep.line("rho", v.rho);
    rep.line("rho threshold", v.rho_threshold);
    if let Some([u, w]) = v.dimension_thresholds {
        rep.line("threshold (u priority)", u);
        rep.line("threshold (v priority)", w);
    }
    rep.line(
        "seesaw predicted",
        if v.predicted { "yes (rho below threshold)" } else { "no" },
    );
    rep.line("performance at z = 0", v.performance_at_zero.value);
    rep.line("negative at z = 0", v.negative_at_zero);

    let mut header = vec!["regime", "rho", "rho_threshold"];
    let mut cells = vec![
        r.model.regime().as_str().to_string(),
        v.rho.to_string(),
        v.rho_threshold.to_string(),
    ];
    if let Some([u, w]) = v.dimension_thresholds {
        header.extend(["rho_threshold_u", "rho_threshold_v"]);
        cells.extend([u.to_string(), w.to_string()]);
    }
    header.extend(["predicted", "performance_at_zero", "negative_at_zero"]);
    cells.extend([
        v.predicted.to_string(),
        v.performance_at_zero.value.to_string(),
        v.negative_at_zero.to_string(),
    ]);
    rep.csv(&header);
    rep.row(&cells);
    Ok(rep)
}

fn optimize(args: &ModelArgs, check: bool) -> Result<Report, CliError> {
    let r = resolve(args)?;
    let best = optimal_hurdle(&r.model)?;
    let mut rep = Report::new(r.echo());
    rep.field("optimum", best);
    rep.line("optimal hurdle", policy_text(best.z_star));
    rep.line("performance at optimum", best.performance_at_optimum.value);

    let (mut header, mut cells) = (vec!["regime".to_string()], vec![best.regime.as_str().to_string()]);
    let (h, c) = policy_columns(best.z_star, "_star");
    header.extend(h);
    cells.extend(c);
    header.push("performance_at_optimum".into());
    cells.push(best.performance_at_optimum.value.to_string());

    if check {
        let cc = cross_check(&r.model)?;
        rep.field("cross_check", cc);
        rep.line("numeric maximizer", policy_text(cc.numeric));
        rep.line("max |difference|", format!("{:.3e}", cc.max_abs_difference));
        let (h, c) = policy_columns(cc.numeric, "_numeric");
        header.extend(h);
        cells.extend(c);
        header.push("max_abs_difference".into());
        cells.push(cc.max_abs_difference.to_string());
    }
    rep.csv(&header);
    rep.row(&cells);
    Ok(rep)
}

struct SimulateOptions<'a> {
    optimal: bool,
    horizon: Option<u64>,
    batch: Option<u32>,
    checkpoints: Vec<u64>,
    trajectory: Option<&'a Path>,
    records: Option<&'a Path>,
}

fn simulate(args: &ModelArgs, hurdle_args: &HurdleArgs, opts: SimulateOptions) -> Result<Report, CliError> {
    let r = resolve(args)?;
    let policy = if opts.optimal {
        optimal_hurdle(&r.model)?.z_star
    } else {
        hurdle(hurdle_args, &r.config)?.unwrap_or_default()
    };
    let horizon = match opts.horizon {
        Some(h) => h,
        None => r
            .config
            .integer::<u64>("horizon")?
            .ok_or_else(|| CliError::Config("simulate needs --horizon".into()))?,
    };
    let batch = match opts.batch {
        Some(b) => b,
        None => r.config.integer::<u32>("batch")?.unwrap_or(1),
    };
    let seed = match args.seed {
        Some(s) => s,
        None => r.config.integer::<u64>("seed")?.unwrap_or(0),
    };

    let mut config = SimulationConfig::new(r.model.clone(), policy, horizon, seed).with_batch(batch);
    config.record_trajectory = opts.trajectory.is_some();
    config.checkpoints = opts.checkpoints;
    config.check()?;
    // Catch a bad records request before spending time on the run.
    if opts.records.is_some() && r.model.dimensions() != 2 {
        return Err(CliError::Config("--records needs a two-dimensional regime".into()));
    }
    let result = simulate::run(&config)?;

    if let Some(path) = opts.trajectory {
        let file = std::fs::File::create(path).map_err(|e| CliError::io(path, e))?;
        if let Some(t) = &result.replications[0].trajectory {
            t.write_csv(std::io::BufWriter::new(file))?;
        }
    }
    if let Some(path) = opts.records {
        let records = synthesize_records(&r.model, policy, horizon as usize, seed)?;
        let file = std::fs::File::create(path).map_err(|e| CliError::io(path, e))?;
        export(&records, std::io::BufWriter::new(file))?;
    }

    let closed = performance(&r.model, policy)?.value;
    let gap = (result.mean_per_period - closed) / result.std_error;

    let mut params = r.echo();
    params.insert("horizon".into(), horizon.into());
    params.insert("batch".into(), batch.into());
    params.insert("seed".into(), seed.into());
    let mut rep = Report::new(params);
    rep.field("result", &result);
    rep.field("closed_form", closed);
    rep.field("difference_in_std_errors", gap);

    rep.line("hurdle", policy_text(policy));
    rep.line("mean per period", result.mean_per_period);
    rep.line("std error", result.std_error);
    rep.line("closed form", closed);
    rep.line("difference / std error", gap);
    rep.line("adoptions", result.adoption_count);
    if batch > 1 || !config.checkpoints.is_empty() {
        rep.table.push(String::new());
        rep.table.push(format!(
            "{:>11} {:>12} {:>22} {:>22} {:>10}",
            "replication", "periods", "mean per period", "std error", "adoptions"
        ));
        for rep_result in &result.replications {
            for c in &rep_result.checkpoints {
                rep.table.push(format!(
                    "{:>11} {:>12} {:>22} {:>22} {:>10}",
                    rep_result.replication, c.periods, c.mean_per_period, c.std_error, ""
                ));
            }
            rep.table.push(format!(
                "{:>11} {:>12} {:>22} {:>22} {:>10}",
                rep_result.replication,
                horizon,
                rep_result.mean_per_period,
                rep_result.std_error,
                rep_result.adoption_count
            ));
        }
    }

    rep.csv(&["replication", "periods", "mean_per_period", "std_error", "adoption_count"]);
    for rep_result in &result.replications {
        let id = rep_result.replication.to_string();
        for c in &rep_result.checkpoints {
            rep.row(&[
                id.clone(),
                c.periods.to_string(),
                c.mean_per_period.to_string(),
                c.std_error.to_string(),
                String::new(),
            ]);
        }
        rep.row(&[
            id,
            horizon.to_string(),
            rep_result.mean_per_period.to_string(),
            rep_result.std_error.to_string(),
            rep_result.adoption_count.to_string(),
        ]);
    }
    rep.row(&[
        "all".to_string(),
        horizon.to_string(),
        result.mean_per_period.to_string(),
        result.std_error.to_string(),
        result.adoption_count.to_string(),
    ]);
    Ok(rep)
}

/// Grid `min, min + step, ...` up to `max`, built by index so it does not drift.
pub fn alpha_grid(min: f64, max: f64, step: f64) -> Result<Vec<f64>, CliError> {
    if !(min.is_finite() && max.is_finite() && step.is_finite() && step > 0.0 && min <= max) {
        return Err(CliError::Config(format!(
            "alpha grid needs finite alpha-min <= alpha-max and alpha-step > 0 (got {min}, {max}, {step})"
        )));
    }
    let count = ((max - min) / step + 1e-9).floor() as usize + 1;
    Ok((0..count)
        .map(|i| {
            let a = min + i as f64 * step;
            (a * 1e12).round() / 1e12
        })
        .collect())
}

fn figure2(min: f64, max: f64, step: f64, deltas: &[f64]) -> Result<Report, CliError> {
    let alphas = alpha_grid(min, max, step)?;
    if let Some(&d) = deltas.iter().find(|&&d| !(d > 2.0 && d.is_finite())) {
        return Err(CliError::Config(format!(
            "delta = {d}: every delta must be finite and > 2 (the variance is infinite otherwise)"
        )));
    }

    let mut params = Map::new();
    params.insert("alpha_min".into(), min.into());
    params.insert("alpha_max".into(), max.into());
    params.insert("alpha_step".into(), step.into());
    params.insert("deltas".into(), json!(deltas));
    let mut rep = Report::new(params);

    // Series-major: every alpha for the first delta, then the next, normal last.
    let mut columns: Vec<Vec<f64>> = Vec::new();
    let mut rows = Vec::new();
    for &d in deltas {
        let mut col = Vec::with_capacity(alphas.len());
        for &a in &alphas {
            let t = student_t_threshold(a, d)?;
            col.push(t);
            rows.push(json!({ "alpha": a, "delta": d, "threshold": t }));
        }
        columns.push(col);
    }
    let mut normal = Vec::with_capacity(alphas.len());
    for &a in &alphas {
        let t = normal_threshold(a)?;
        normal.push(t);
        rows.push(json!({ "alpha": a, "delta": "inf", "threshold": t }));
    }
    columns.push(normal);
    rep.field("rows", Value::Array(rows));

    rep.csv(&["alpha", "delta", "threshold"]);
    for (j, col) in columns.iter().enumerate() {
        let label = deltas.get(j).map_or("inf".to_string(), |d| d.to_string());
        for (a, t) in alphas.iter().zip(col) {
            rep.row(&[a.to_string(), label.clone(), t.to_string()]);
        }
    }

    let mut head = format!("{:>8}", "alpha");
    for d in deltas {
        head.push_str(&format!(" {:>12}", format!("delta={d}")));
    }
    head.push_str(&format!(" {:>12}", "normal"));
    rep.table.push(head);
    for (i, a) in alphas.iter().enumerate() {
        let mut line = format!("{a:>8}");
        for col in &columns {
            line.push_str(&format!(" {:>12.6}", col[i]));
        }
        rep.table.push(line);
    }
    Ok(rep)
}

fn recommend_cmd(
    input: &Path,
    regime: RecommendRegimeArg,
    relaxed: bool,
    stderr: &mut dyn Write,
) -> Result<Report, CliError> {
    let file = std::fs::File::open(input).map_err(|e| CliError::io(input, e))?;
    let ingested = ingest(std::io::BufReader::new(file))?;
    for e in &ingested.errors {
        let _ = writeln!(stderr, "warning: skipped {e}");
    }
    let (regime, name) = match regime {
        RecommendRegimeArg::Sym => (RecommendRegime::Symmetric, "sym"),
        RecommendRegimeArg::Asym => (RecommendRegime::Asymmetric, "asym"),
    };
    let mode = if relaxed {
        ValidationMode::Relaxed
    } else {
        ValidationMode::Strict
    };
    let estimated = estimate_moments(&ingested.records);
    let rec = recommend(&estimated, regime, mode)?;

    let mut params = Map::new();
    params.insert("input".into(), input.display().to_string().into());
    params.insert("regime".into(), name.into());
    if relaxed {
        params.insert("validation".into(), "relaxed".into());
    }
    let mut rep = Report::new(params);
    rep.field("regime", rec.regime);
    rep.field("z_star", rec.z_star);
    rep.field("performance_at_optimum", rec.performance_at_optimum.value);
    rep.field("estimates", &rec.estimates);
    rep.field("caveats", &rec.caveats);
    rep.field("skipped_rows", &ingested.errors);

    rep.line("records used", rec.estimates.records);
    rep.line("rows skipped", ingested.errors.len());
    rep.line("recommended hurdle", policy_text(rec.z_star));
    rep.line("performance at hurdle", rec.performance_at_optimum.value);
    for c in &rec.caveats {
        rep.table.push(format!("caveat: {c}"));
    }

    let (mut header, mut cells) = (vec!["regime".to_string()], vec![rec.regime.as_str().to_string()]);
    let (h, c) = policy_columns(rec.z_star, "_star");
    header.extend(h);
    cells.extend(c);
    header.extend(["performance_at_optimum".into(), "records".into()]);
    cells.extend([
        rec.performance_at_optimum.value.to_string(),
        rec.estimates.records.to_string(),
    ]);
    rep.csv(&header);
    rep.row(&cells);
    Ok(rep)
}
