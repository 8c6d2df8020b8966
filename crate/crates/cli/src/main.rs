//! `qcap`: capacity estimates, superactivation sweeps, zero-error codes and
//! enclosing information balls from the command line.

#![forbid(unsafe_code)]

mod error;
mod input;
mod report;

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use qcap_core::capacity::{
    hsw_capacity, hsw_capacity_candidates, mixed_input_candidates, private_capacity_single_use, pure_input_candidates,
    quantum_capacity_single_use, CapacityResult, HswOptions,
};
use qcap_core::channels::{build_model, tensor_channels, ChannelModel, KrausChannel};
use qcap_core::infogeo::{
    minimax_center_oracle, seb_basic, seb_improved, BlochEntropy, OracleOptions, SebOptions, WeightedPointSet,
};
use qcap_core::qmath::{density_to_bloch, BlochVector, DensityMatrix, Ensemble};
use qcap_core::superact::{linear_grid, sweep, ReferenceModel};
use qcap_core::zeroerr::{build_confusability_graph, zero_error_rate, ADJACENCY_TOL};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{CliError, Result};
use crate::report::{
    check_report, check_sweep_rows, BallReport, Balls, CapacityReport, EnsembleMember, Metadata, PrivateReport, Report,
    ResultBody, StateJson, SweepPoint, SweepReport, ZeroErrorReport,
};

#[derive(Debug, Parser)]
#[command(name = "qcap", version, about = "Quantum channel capacities as enclosing information balls")]
struct Cli {
    /// Seed for every randomized step.
    #[arg(long, global = true, default_value_t = 42)]
    seed: u64,

    /// Output file; standard output when omitted.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Single-use capacity of a channel.
    Capacity {
        channel: PathBuf,
        #[arg(long, value_enum, default_value_t = Mode::Holevo)]
        mode: Mode,
        /// Target gap between the upper and lower Holevo bounds, in bits.
        #[arg(long, default_value_t = 1e-7)]
        eps: f64,
        /// Number of candidate inputs for searches over input lists.
        #[arg(long, default_value_t = 200)]
        candidates: usize,
        #[arg(long, default_value_t = 10_000)]
        max_iter: usize,
    },
    /// Joint radius of the superactivation model over a grid of p_C.
    Sweep {
        /// Model file; the built-in reference model when omitted.
        #[arg(long)]
        model: Option<PathBuf>,
        #[arg(long, default_value_t = 0.0)]
        pc_min: f64,
        #[arg(long, default_value_t = 0.1)]
        pc_max: f64,
        #[arg(long, default_value_t = 1000)]
        steps: usize,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
    },
    /// Largest zero-error code over a list of input states.
    Zeroerr {
        channel: PathBuf,
        inputs: PathBuf,
        #[arg(long, default_value_t = 1)]
        uses: usize,
        /// Count each input as an entangled pair (halves the rate).
        #[arg(long)]
        epr: bool,
        /// Write the confusability graph in DOT format.
        #[arg(long)]
        dot: Option<PathBuf>,
    },
    /// Smallest enclosing information ball of qubit states.
    Ball {
        points: PathBuf,
        #[arg(long, value_enum, default_value_t = Algorithm::Improved)]
        algorithm: Algorithm,
        #[arg(long, default_value_t = 0.05)]
        eps: f64,
    },
    /// Check a JSON report or a sweep CSV written by this tool.
    Validate { file: PathBuf },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Mode {
    Holevo,
    Quantum,
    Private,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Algorithm {
    Basic,
    Improved,
    Oracle,
}

fn value_name<T: ValueEnum>(v: T) -> String {
    v.to_possible_value().map(|p| p.get_name().to_string()).unwrap_or_default()
}

/// Text to write and whether the computation converged.
struct Output {
    text: String,
    converged: bool,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(out) => {
            if let Err(e) = emit(cli.out.as_deref(), &out.text) {
                eprintln!("error: {e}");
                return ExitCode::from(e.exit_code());
            }
            if out.converged {
                ExitCode::SUCCESS
            } else {
                eprintln!("warning: did not converge; result written");
                ExitCode::from(2)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

fn emit(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => fs::write(p, text).map_err(|source| CliError::Io { path: p.to_path_buf(), source }),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes()).map_err(|source| CliError::Io { path: PathBuf::from("<stdout>"), source })
        }
    }
}

fn run(cli: &Cli) -> Result<Output> {
    match &cli.command {
        Command::Capacity { channel, mode, eps, candidates, max_iter } => {
            let mut flags = BTreeMap::new();
            flags.insert("channel".into(), channel.display().to_string());
            flags.insert("mode".into(), value_name(*mode));
            flags.insert("eps".into(), eps.to_string());
            flags.insert("candidates".into(), candidates.to_string());
            flags.insert("max_iter".into(), max_iter.to_string());
            let model = build_model(&input::read_channel(channel)?)?;
            let opts = HswOptions { tol: *eps, max_iter: *max_iter, ..HswOptions::default() };
            let (body, converged) = cmd_capacity(&model, *mode, &opts, *candidates, cli.seed)?;
            json_output(Report { metadata: Metadata::new("capacity", cli.seed, flags), result: body }, converged)
        }
        Command::Sweep { model, pc_min, pc_max, steps, format } => {
            let mut flags = BTreeMap::new();
            flags.insert("model".into(), model.as_ref().map_or("reference".into(), |p| p.display().to_string()));
            flags.insert("pc_min".into(), pc_min.to_string());
            flags.insert("pc_max".into(), pc_max.to_string());
            flags.insert("steps".into(), steps.to_string());
            flags.insert("format".into(), value_name(*format));
            let model = match model {
                Some(p) => input::read_model(p)?,
                None => ReferenceModel::default(),
            };
            let result = sweep(&linear_grid(*pc_min, *pc_max, *steps)?, &model)?;
            let metadata = Metadata::new("sweep", cli.seed, flags);
            match format {
                Format::Csv => {
                    let mut header = metadata.header_lines();
                    header.push(format!(
                        "model P1={} window=({}, {}) r_H2_inside={} (declared model data)",
                        model.p1, model.window.0, model.window.1, model.r_h2_inside
                    ));
                    Ok(Output { text: result.to_csv(&header), converged: true })
                }
                Format::Json => {
                    let body = ResultBody::Sweep(SweepReport {
                        p1_bits: model.p1,
                        window: [model.window.0, model.window.1],
                        detected_window: result.detected_window().map(|(a, b)| [a, b]),
                        rows: result
                            .rows
                            .iter()
                            .map(|r| SweepPoint { p_c: r.p_c, r_h2: r.r_h2, r_super: r.r_super })
                            .collect(),
                    });
                    json_output(Report { metadata, result: body }, true)
                }
            }
        }
        Command::Zeroerr { channel, inputs, uses, epr, dot } => {
            let mut flags = BTreeMap::new();
            flags.insert("channel".into(), channel.display().to_string());
            flags.insert("inputs".into(), inputs.display().to_string());
            flags.insert("uses".into(), uses.to_string());
            flags.insert("epr".into(), epr.to_string());
            let ch = kraus_of(&build_model(&input::read_channel(channel)?)?, "zero-error")?;
            let states = input::read_inputs(inputs)?;
            // Two-system inputs such as entangled pairs use the channel on both halves.
            let d = ch.in_dim();
            let ch = if d > 1 && states[0].dim() == d * d { tensor_channels(&ch, &ch) } else { ch };
            let graph = build_confusability_graph(&ch, &states, *uses, ADJACENCY_TOL)?;
            let res = zero_error_rate(&ch, &states, *uses, *epr)?;
            if let Some(path) = dot {
                fs::write(path, graph.to_dot("confusability"))
                    .map_err(|source| CliError::Io { path: path.clone(), source })?;
            }
            let body = ResultBody::ZeroError(ZeroErrorReport {
                k: res.k,
                rate_bits: res.rate_bits,
                n_uses: res.n_uses,
                epr_normalized: res.normalized,
                inputs: states.len(),
                vertices: graph.vertex_count(),
                edges: graph.edge_count(),
                codewords: res.codewords,
            });
            json_output(Report { metadata: Metadata::new("zeroerr", cli.seed, flags), result: body }, true)
        }
        Command::Ball { points, algorithm, eps } => {
            let mut flags = BTreeMap::new();
            flags.insert("points".into(), points.display().to_string());
            flags.insert("algorithm".into(), value_name(*algorithm));
            flags.insert("eps".into(), eps.to_string());
            let set = input::read_points(points)?;
            let (body, converged) = cmd_ball(&set, *algorithm, *eps)?;
            json_output(Report { metadata: Metadata::new("ball", cli.seed, flags), result: body }, converged)
        }
        Command::Validate { file } => {
            let summary = cmd_validate(file)?;
            Ok(Output { text: summary, converged: true })
        }
    }
}

fn json_output(report: Report, converged: bool) -> Result<Output> {
    let mut text = serde_json::to_string_pretty(&report)?;
    text.push('\n');
    Ok(Output { text, converged })
}

fn kraus_of(model: &ChannelModel, what: &str) -> Result<KrausChannel> {
    model.kraus().cloned().ok_or_else(|| {
        CliError::Input(format!("{what} estimates need a Kraus form; the declared channel has no 'inner' table"))
    })
}

fn cmd_capacity(
    model: &ChannelModel,
    mode: Mode,
    opts: &HswOptions,
    candidates: usize,
    seed: u64,
) -> Result<(ResultBody, bool)> {
    match mode {
        Mode::Holevo => {
            let ch = kraus_of(model, "Holevo")?;
            let (res, cands) = if ch.is_qubit() {
                (hsw_capacity(&ch, opts)?, None)
            } else {
                let inputs = pure_input_candidates(ch.in_dim(), candidates, seed);
                (hsw_capacity_candidates(&ch, &inputs, opts)?, Some(inputs.len()))
            };
            let converged = res.converged;
            Ok((ResultBody::Capacity(capacity_report("holevo", &res, cands)), converged))
        }
        Mode::Quantum => {
            let ch = kraus_of(model, "quantum")?;
            let inputs = mixed_input_candidates(ch.in_dim(), candidates, seed);
            let res = quantum_capacity_single_use(&ch, &inputs)?;
            Ok((ResultBody::Capacity(capacity_report("quantum", &res, Some(inputs.len()))), res.converged))
        }
        Mode::Private => {
            let (ensembles, declared) = match model {
                ChannelModel::Declared(_) => (Vec::new(), true),
                ChannelModel::Kraus(ch) => (private_ensembles(ch.in_dim(), candidates, seed)?, false),
            };
            let value = private_capacity_single_use(model, &ensembles)?;
            let body =
                ResultBody::Private(PrivateReport { value_bits: value, declared, ensembles_tested: ensembles.len() });
            Ok((body, true))
        }
    }
}

/// Two-state ensembles for the private-information search: antipodal pure
/// pairs for qubits; the basis ensemble and random pure pairs otherwise.
fn private_ensembles(d: usize, count: usize, seed: u64) -> Result<Vec<Ensemble>> {
    if d == 2 {
        return pure_input_candidates(2, count, seed)
            .iter()
            .map(|rho| {
                let b = density_to_bloch(rho)?;
                let anti = BlochVector::new(-b.x(), -b.y(), -b.z())?;
                Ok(Ensemble::uniform(vec![rho.clone(), qcap_core::qmath::bloch_to_density(&anti)])?)
            })
            .collect();
    }
    let mut out =
        vec![Ensemble::uniform((0..d).map(|i| DensityMatrix::basis(d, i)).collect::<qcap_core::Result<_>>()?)?];
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..count {
        let a = qcap_core::qmath::random_pure_state(&mut rng, d);
        let b = qcap_core::qmath::random_pure_state(&mut rng, d);
        out.push(Ensemble::uniform(vec![a, b])?);
    }
    Ok(out)
}

fn capacity_report(mode: &str, res: &CapacityResult, candidates: Option<usize>) -> CapacityReport {
    CapacityReport {
        mode: mode.to_string(),
        value_bits: res.value_bits,
        radius: res.radius,
        lower_bound: res.lower_bound,
        center: StateJson::from_state(&res.center),
        ensemble: res
            .optimal_ensemble
            .entries()
            .iter()
            .map(|(w, s)| EnsembleMember { weight: *w, state: StateJson::from_state(s) })
            .collect(),
        iterations: res.iterations,
        converged: res.converged,
        balls: res.balls.map(|b| Balls { r_ab: b.r_ab, r_ae: b.r_ae, r_coh: b.r_coh }),
        candidates,
    }
}

fn cmd_ball(set: &input::PointSet, algorithm: Algorithm, eps: f64) -> Result<(ResultBody, bool)> {
    let n = set.points.len();
    let report = |center: [f64; 3], radius, lower_bound, iterations, converged| BallReport {
        algorithm: value_name(algorithm),
        points: n,
        center_bloch: center,
        radius,
        lower_bound,
        iterations,
        converged,
    };
    let body = match algorithm {
        Algorithm::Oracle => {
            let (c, r) = minimax_center_oracle(&set.points, &set.radii, &OracleOptions::default())?;
            report([c.x, c.y, c.z], r, None, 0, true)
        }
        Algorithm::Basic | Algorithm::Improved => {
            let mut wps = WeightedPointSet::with_radii(set.points.clone(), set.radii.clone())?;
            wps.weights = set.weights.clone();
            wps.validate()?;
            let opts = SebOptions::default();
            let (res, converged) = if algorithm == Algorithm::Basic {
                (seb_basic(&BlochEntropy, &wps, eps, &opts)?, true)
            } else {
                let res = seb_improved(&BlochEntropy, &wps, eps, &opts)?;
                let converged = res.brackets.last().is_none_or(|b| b.delta <= eps);
                (res, converged)
            };
            let c = res.ball.center;
            report([c.x, c.y, c.z], res.ball.radius, Some(res.lower_bound), res.iterations, converged)
        }
    };
    let converged = body.converged;
    Ok((ResultBody::Ball(body), converged))
}

fn cmd_validate(path: &Path) -> Result<String> {
    let text = input::read_text(path)?;
    if text.trim_start().starts_with('{') {
        let original: serde_json::Value = serde_json::from_str(&text)?;
        let report: Report = serde_json::from_value(original.clone()).map_err(|e| CliError::Invalid(e.to_string()))?;
        if serde_json::to_value(&report)? != original {
            return Err(CliError::Invalid("report does not round-trip through the schema".into()));
        }
        check_report(&report).map_err(CliError::Invalid)?;
        Ok(format!(
            "ok: {} report from {} {}\n",
            report.metadata.command, report.metadata.tool, report.metadata.version
        ))
    } else {
        let rows = parse_sweep_csv(&text)?;
        check_sweep_rows(&rows).map_err(CliError::Invalid)?;
        Ok(format!("ok: sweep CSV with {} rows\n", rows.len()))
    }
}

fn parse_sweep_csv(text: &str) -> Result<Vec<SweepPoint>> {
    let mut reader = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(text.as_bytes());
    let headers = reader.headers()?.clone();
    if headers.iter().collect::<Vec<_>>() != ["p_C", "r_H2", "r_super"] {
        return Err(CliError::Invalid(format!("unexpected CSV header {:?}", headers.iter().collect::<Vec<_>>())));
    }
    reader
        .records()
        .map(|record| {
            let record = record?;
            let field = |i: usize| -> Result<f64> {
                record
                    .get(i)
                    .and_then(|s| s.parse().ok())
                    .ok_or_else(|| CliError::Invalid(format!("bad number in row {:?}", record)))
            };
            Ok(SweepPoint { p_c: field(0)?, r_h2: field(1)?, r_super: field(2)? })
        })
        .collect()
}
