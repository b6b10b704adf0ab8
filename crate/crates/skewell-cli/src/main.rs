//! Command-line front end: evaluate densities, tail densities, copula tail
//! densities and tail-dependence parameters on grids, sample models, and
//! run the validation suite. Output is CSV (17 significant digits) or
//! JSON; identical (config, seed) pairs produce byte-identical output.

use clap::{Args, Parser, Subcommand};
use serde::Deserialize;
use skewell::tail::{
    copula_tail_density_heavy, copula_tail_density_light, heavy_lower_tail_density,
    heavy_tail_density, light_lower_tail_density, light_tail_density, mixture_tail_density,
    CopulaTailDensity, Orientation, TailDensityResult,
};
use skewell::taildep::{empirical_taildep, skew_t_taildep, SkewTParams, TailDepParams};
use skewell::validate::known_checks;
use skewell::{default_suite, parse_model, run_suite, AnyModel, Error, SuiteConfig, TailKind};
use std::fs;
use std::io::Write;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "skewell",
    version,
    about = "Skew-elliptical densities, tail densities and tail dependence"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Default)]
struct IoArgs {
    /// JSON file with the command parameters (flags override it)
    #[arg(long)]
    config: Option<String>,
    /// Output path (stdout when omitted)
    #[arg(long)]
    out: Option<String>,
    /// Output format
    #[arg(long, value_parser = ["csv", "json"])]
    format: Option<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate the joint density on a grid
    Pdf {
        /// Model: family shorthand or a JSON model spec
        #[arg(long)]
        model: Option<String>,
        /// Axis specs min:max:count, comma-separated per dimension
        #[arg(long, allow_hyphen_values = true)]
        grid: Option<String>,
        #[command(flatten)]
        io: IoArgs,
    },
    /// Evaluate the tail density lambda(w) on a grid
    Tail {
        #[arg(long)]
        model: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        grid: Option<String>,
        /// Tail orientation
        #[arg(long, value_parser = ["upper", "lower"])]
        orientation: Option<String>,
        /// Override the heavy-regime normalizing constant K
        #[arg(long)]
        k: Option<f64>,
        #[command(flatten)]
        io: IoArgs,
    },
    /// Evaluate the copula tail density lambda_U/lambda_L on a grid
    CopulaTail {
        #[arg(long)]
        model: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        grid: Option<String>,
        #[arg(long, value_parser = ["upper", "lower"])]
        orientation: Option<String>,
        #[arg(long)]
        k: Option<f64>,
        #[command(flatten)]
        io: IoArgs,
    },
    /// Bivariate tail-dependence parameters of a skew-t model
    Taildep {
        #[arg(long)]
        model: Option<String>,
        /// Also report the rank-based empirical estimate
        #[arg(long)]
        empirical: bool,
        /// Sample count for the empirical estimate
        #[arg(long)]
        n: Option<u64>,
        #[arg(long)]
        seed: Option<u64>,
        /// Threshold for the empirical estimate
        #[arg(long)]
        u: Option<f64>,
        #[command(flatten)]
        io: IoArgs,
    },
    /// Draw samples from a model
    Sample {
        #[arg(long)]
        model: Option<String>,
        #[arg(long)]
        n: Option<u64>,
        #[arg(long)]
        seed: Option<u64>,
        #[command(flatten)]
        io: IoArgs,
    },
    /// Run the validation suite (exit status 0 iff all checks pass)
    Validate {
        /// Suite config JSON; the built-in battery when omitted
        #[arg(long)]
        config: Option<String>,
        /// List known check names and exit
        #[arg(long)]
        list: bool,
        #[arg(long)]
        out: Option<String>,
    },
}

fn config_err(detail: impl Into<String>) -> Error {
    Error::ConfigError {
        detail: detail.into(),
    }
}

/// Axis specs "min:max:count" per dimension, comma-separated; the grid is
/// the cross product.
fn parse_grid(text: &str, dim: usize) -> Result<Vec<Vec<f64>>, Error> {
    let axes: Vec<&str> = text.split(',').collect();
    if axes.len() != dim {
        return Err(config_err(format!(
            "grid has {} axes but the model has dimension {dim}",
            axes.len()
        )));
    }
    let mut axis_points = Vec::with_capacity(dim);
    for ax in axes {
        let parts: Vec<&str> = ax.split(':').collect();
        if parts.len() != 3 {
            return Err(config_err(format!("axis '{ax}' must be min:max:count")));
        }
        let lo: f64 = parts[0]
            .parse()
            .map_err(|_| config_err(format!("invalid grid min '{}'", parts[0])))?;
        let hi: f64 = parts[1]
            .parse()
            .map_err(|_| config_err(format!("invalid grid max '{}'", parts[1])))?;
        let count: usize = parts[2]
            .parse()
            .map_err(|_| config_err(format!("invalid count '{}'", parts[2])))?;
        if count < 1 {
            return Err(config_err("grid count must be at least 1"));
        }
        let pts: Vec<f64> = if count == 1 {
            vec![lo]
        } else {
            (0..count)
                .map(|i| lo + (hi - lo) * i as f64 / (count - 1) as f64)
                .collect()
        };
        axis_points.push(pts);
    }
    let mut grid = vec![Vec::new()];
    for axis in &axis_points {
        let mut next = Vec::with_capacity(grid.len() * axis.len());
        for prefix in &grid {
            for &v in axis {
                let mut p = prefix.clone();
                p.push(v);
                next.push(p);
            }
        }
        grid = next;
    }
    Ok(grid)
}

/// Defaults loaded from --config JSON; explicit flags win.
#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    model: Option<String>,
    grid: Option<String>,
    orientation: Option<String>,
    k: Option<f64>,
    u: Option<f64>,
    n: Option<u64>,
    seed: Option<u64>,
    out: Option<String>,
    format: Option<String>,
    empirical: Option<bool>,
}

fn load_config(path: &Option<String>) -> Result<FileConfig, Error> {
    match path {
        None => Ok(FileConfig::default()),
        Some(p) => {
            let text = fs::read_to_string(p)
                .map_err(|e| config_err(format!("cannot read config {p}: {e}")))?;
            serde_json::from_str(&text).map_err(|e| config_err(format!("invalid config: {e}")))
        }
    }
}

fn write_output(out: &Option<String>, content: &str) -> Result<(), Error> {
    match out {
        None => {
            print!("{content}");
            std::io::stdout()
                .flush()
                .map_err(|e| config_err(format!("stdout: {e}")))?;
        }
        Some(path) => {
            fs::write(path, content).map_err(|e| config_err(format!("write {path}: {e}")))?;
        }
    }
    Ok(())
}

fn csv_row(values: &[f64]) -> String {
    values
        .iter()
        .map(|v| format!("{v:.16e}"))
        .collect::<Vec<_>>()
        .join(",")
}

fn grid_table(
    points: &[Vec<f64>],
    values: &[f64],
    dim: usize,
    axis_prefix: &str,
    value_name: &str,
    format: &str,
) -> String {
    match format {
        "json" => {
            let rows: Vec<serde_json::Value> = points
                .iter()
                .zip(values)
                .map(|(p, v)| serde_json::json!({ "point": p, value_name: v }))
                .collect();
            let mut s = serde_json::to_string_pretty(&rows).expect("serializable");
            s.push('\n');
            s
        }
        _ => {
            let mut s = String::new();
            let header: Vec<String> = (1..=dim).map(|i| format!("{axis_prefix}_{i}")).collect();
            s.push_str(&header.join(","));
            s.push_str(&format!(",{value_name}\n"));
            for (p, v) in points.iter().zip(values) {
                s.push_str(&csv_row(p));
                s.push_str(&format!(",{v:.16e}\n"));
            }
            s
        }
    }
}

fn parse_orientation(text: Option<&str>) -> Result<Orientation, Error> {
    match text.unwrap_or("upper") {
        "upper" => Ok(Orientation::Upper),
        "lower" => Ok(Orientation::Lower),
        other => Err(config_err(format!("orientation '{other}'"))),
    }
}

fn tail_result(
    model: &AnyModel,
    orientation: Orientation,
    k: Option<f64>,
) -> Result<TailDensityResult, Error> {
    match model {
        AnyModel::Mixture(m) => {
            if orientation == Orientation::Lower {
                return Err(config_err("the mixture family exposes the upper tail only"));
            }
            Ok(mixture_tail_density(m)?.0)
        }
        AnyModel::Skew(m) => {
            let class = m.generator().classify_tail()?;
            Ok(match (class.kind, orientation) {
                (TailKind::RegularlyVarying { .. }, Orientation::Upper) => {
                    heavy_tail_density(m, k)?
                }
                (TailKind::RegularlyVarying { .. }, Orientation::Lower) => {
                    heavy_lower_tail_density(m, k)?
                }
                (TailKind::GumbelQuadratic { .. }, Orientation::Upper) => light_tail_density(m)?,
                (TailKind::GumbelQuadratic { .. }, Orientation::Lower) => {
                    light_lower_tail_density(m)?
                }
            })
        }
    }
}

fn copula_result(
    model: &AnyModel,
    orientation: Orientation,
    k: Option<f64>,
) -> Result<CopulaTailDensity, Error> {
    match model {
        AnyModel::Mixture(m) => {
            if orientation == Orientation::Lower {
                return Err(config_err("the mixture family exposes the upper tail only"));
            }
            Ok(mixture_tail_density(m)?.1)
        }
        AnyModel::Skew(_) => {
            let tdr = tail_result(model, orientation, k)?;
            Ok(match tdr.regime {
                skewell::Regime::Heavy => copula_tail_density_heavy(&tdr)?,
                skewell::Regime::Light => copula_tail_density_light(&tdr)?,
            })
        }
    }
}

fn taildep_json(
    td: &TailDepParams,
    params: &SkewTParams,
    empirical: Option<&TailDepParams>,
) -> String {
    let mut v = serde_json::json!({
        "b_upper": td.b_upper,
        "b_lower": td.b_lower,
        "method": td.method,
        "error": td.error_estimate,
        "params": params,
    });
    if let Some(e) = empirical {
        v["empirical"] = serde_json::json!({
            "b_upper": e.b_upper,
            "b_lower": e.b_lower,
            "method": e.method,
            "error": e.error_estimate,
        });
    }
    let mut s = serde_json::to_string_pretty(&v).expect("serializable");
    s.push('\n');
    s
}

fn run() -> Result<bool, Error> {
    let cli = Cli::parse();
    match cli.command {
        Command::Pdf { model, grid, io } => {
            let cfg = load_config(&io.config)?;
            let model_text = model
                .or(cfg.model)
                .ok_or_else(|| config_err("pdf requires --model"))?;
            let grid_text = grid
                .or(cfg.grid)
                .ok_or_else(|| config_err("pdf requires --grid"))?;
            let format = io.format.or(cfg.format).unwrap_or_else(|| "csv".into());
            let out = io.out.or(cfg.out);
            let m = parse_model(&model_text)?;
            let points = parse_grid(&grid_text, m.dim())?;
            let mut values = Vec::with_capacity(points.len());
            for p in &points {
                values.push(m.pdf(p)?);
            }
            write_output(
                &out,
                &grid_table(&points, &values, m.dim(), "y", "pdf", &format),
            )?;
            Ok(true)
        }
        Command::Tail {
            model,
            grid,
            orientation,
            k,
            io,
        } => {
            let cfg = load_config(&io.config)?;
            let model_text = model
                .or(cfg.model)
                .ok_or_else(|| config_err("tail requires --model"))?;
            let grid_text = grid
                .or(cfg.grid)
                .ok_or_else(|| config_err("tail requires --grid"))?;
            let orientation = parse_orientation(orientation.or(cfg.orientation).as_deref())?;
            let format = io.format.or(cfg.format).unwrap_or_else(|| "csv".into());
            let out = io.out.or(cfg.out);
            let m = parse_model(&model_text)?;
            let tdr = tail_result(&m, orientation, k.or(cfg.k))?;
            let points = parse_grid(&grid_text, m.dim())?;
            let mut values = Vec::with_capacity(points.len());
            for p in &points {
                values.push(tdr.lambda(p)?);
            }
            write_output(
                &out,
                &grid_table(&points, &values, m.dim(), "w", "lambda", &format),
            )?;
            Ok(true)
        }
        Command::CopulaTail {
            model,
            grid,
            orientation,
            k,
            io,
        } => {
            let cfg = load_config(&io.config)?;
            let model_text = model
                .or(cfg.model)
                .ok_or_else(|| config_err("copula-tail requires --model"))?;
            let grid_text = grid
                .or(cfg.grid)
                .ok_or_else(|| config_err("copula-tail requires --grid"))?;
            let orientation = parse_orientation(orientation.or(cfg.orientation).as_deref())?;
            let format = io.format.or(cfg.format).unwrap_or_else(|| "csv".into());
            let out = io.out.or(cfg.out);
            let m = parse_model(&model_text)?;
            let ctd = copula_result(&m, orientation, k.or(cfg.k))?;
            let points = parse_grid(&grid_text, m.dim())?;
            let mut values = Vec::with_capacity(points.len());
            for p in &points {
                values.push(ctd.eval(p)?);
            }
            write_output(
                &out,
                &grid_table(&points, &values, m.dim(), "w", "lambda", &format),
            )?;
            Ok(true)
        }
        Command::Taildep {
            model,
            empirical,
            n,
            seed,
            u,
            io,
        } => {
            let cfg = load_config(&io.config)?;
            let model_text = model
                .or(cfg.model)
                .ok_or_else(|| config_err("taildep requires --model"))?;
            let out = io.out.or(cfg.out);
            let m = parse_model(&model_text)?;
            let skew = match &m {
                AnyModel::Skew(s) => s,
                AnyModel::Mixture(_) => {
                    return Err(config_err("taildep requires a d=2 skew-t model"))
                }
            };
            let nu = match skew.family() {
                skewell::ModelFamily::StudentT { nu } => nu,
                _ => return Err(config_err("taildep requires a d=2 skew-t model")),
            };
            if skew.dim() != 2 {
                return Err(config_err("taildep requires a d=2 skew-t model"));
            }
            let params = SkewTParams::new(
                nu,
                skew.sigma().entry(0, 1),
                skew.delta()[0],
                skew.delta()[1],
            )?;
            let td = skew_t_taildep(&params)?;
            let want_empirical = empirical || cfg.empirical.unwrap_or(false);
            let emp = if want_empirical {
                let n = n.or(cfg.n).unwrap_or(1_000_000) as usize;
                let seed = seed.or(cfg.seed).unwrap_or(1);
                let u = u.or(cfg.u).unwrap_or(0.005);
                let samples = skew.sample(n, seed)?;
                Some(empirical_taildep(&samples, u)?)
            } else {
                None
            };
            write_output(&out, &taildep_json(&td, &params, emp.as_ref()))?;
            Ok(true)
        }
        Command::Sample { model, n, seed, io } => {
            let cfg = load_config(&io.config)?;
            let model_text = model
                .or(cfg.model)
                .ok_or_else(|| config_err("sample requires --model"))?;
            let n = n.or(cfg.n).ok_or_else(|| config_err("sample requires --n"))? as usize;
            let seed = seed.or(cfg.seed).unwrap_or(0);
            let format = io.format.or(cfg.format).unwrap_or_else(|| "csv".into());
            let out = io.out.or(cfg.out);
            let m = parse_model(&model_text)?;
            let skew = match &m {
                AnyModel::Skew(s) => s,
                AnyModel::Mixture(_) => {
                    return Err(config_err("sampling the mixture family is not supported"))
                }
            };
            let samples = skew.sample(n, seed)?;
            let content = match format.as_str() {
                "json" => {
                    let rows: Vec<Vec<f64>> = (0..n)
                        .map(|i| (0..skew.dim()).map(|j| samples[(i, j)]).collect())
                        .collect();
                    let mut s = serde_json::to_string(&rows).expect("serializable");
                    s.push('\n');
                    s
                }
                _ => {
                    let mut s = String::new();
                    let header: Vec<String> = (1..=skew.dim()).map(|i| format!("y_{i}")).collect();
                    s.push_str(&header.join(","));
                    s.push('\n');
                    for i in 0..n {
                        let row: Vec<f64> = (0..skew.dim()).map(|j| samples[(i, j)]).collect();
                        s.push_str(&csv_row(&row));
                        s.push('\n');
                    }
                    s
                }
            };
            write_output(&out, &content)?;
            Ok(true)
        }
        Command::Validate { config, list, out } => {
            if list {
                let mut s = String::new();
                for name in known_checks() {
                    s.push_str(name);
                    s.push('\n');
                }
                write_output(&out, &s)?;
                return Ok(true);
            }
            let suite: SuiteConfig = match &config {
                None => default_suite(),
                Some(path) => {
                    let text = fs::read_to_string(path)
                        .map_err(|e| config_err(format!("cannot read config {path}: {e}")))?;
                    serde_json::from_str(&text)
                        .map_err(|e| config_err(format!("invalid suite config: {e}")))?
                }
            };
            let reports = run_suite(&suite)?;
            let mut s = String::new();
            for r in &reports {
                s.push_str(&serde_json::to_string(r).expect("serializable"));
                s.push('\n');
            }
            write_output(&out, &s)?;
            Ok(reports.iter().all(|r| r.passed))
        }
    }
}

fn main() -> ExitCode {
    match run() {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
