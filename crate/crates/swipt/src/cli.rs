//! `swipt` command line.
//!
//! Exit codes: 0 on success, 1 when a solve is infeasible or the solver
//! fails, 2 for usage and configuration errors.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use swipt_core::beamform::{self, Method};
use swipt_core::complexity::{complexity_of, reduction_ratio, ComplexityInputs};
use swipt_core::nullspace::{build_bases, build_equivalents};
use swipt_core::system_model::{corrupt_csi, generate_channels};

use crate::config;
use crate::harness::{self, scenarios, Scenario, Strategy};
use crate::AppError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Plotdata,
}

#[derive(Debug, Parser)]
#[command(name = "swipt", version, about = "Null-space SWIPT beamforming experiments")]
pub struct Cli {
    /// Base seed for every random draw.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Monte Carlo trials per sweep point.
    #[arg(long, global = true)]
    pub trials: Option<usize>,
    /// Output file; standard output when absent.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Interior-point tolerance.
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run a built-in scenario or one defined in a configuration file.
    RunScenario { scenario: String },
    /// Solve one channel draw and print the beams and their evaluation.
    Solve {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        method: String,
    },
    /// Operation counts and reduction ratios of every method.
    ComplexityTable {
        #[arg(long = "M")]
        m: usize,
        #[arg(long = "KI")]
        k_i: usize,
        #[arg(long = "KE")]
        k_e: usize,
        #[arg(long = "rI")]
        r_i: Option<usize>,
        #[arg(long = "rE")]
        r_e: Option<usize>,
    },
    /// Names and descriptions of the built-in scenarios.
    ListScenarios,
}

/// Parses `args` (program name first) and runs the command.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                let _ = write!(stderr, "{text}");
                2
            } else {
                let _ = write!(stdout, "{text}");
                0
            };
        }
    };
    match execute(&cli, stdout, stderr) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.exit_code()
        }
    }
}

fn known_scenarios() -> String {
    let mut s = String::from("known scenarios:");
    for (name, _) in scenarios::NAMES {
        s.push_str("\n  ");
        s.push_str(name);
    }
    s
}

fn resolve_scenario(arg: &str) -> Result<Scenario, AppError> {
    if let Some(sc) = scenarios::named(arg) {
        return Ok(sc);
    }
    let path = Path::new(arg);
    if path.is_file() {
        return Scenario::from_file(path);
    }
    Err(AppError::Config(format!("unknown scenario {arg:?}\n{}", known_scenarios())))
}

/// Writes through `--out` when given, otherwise to `stdout`.
fn emit(cli: &Cli, stdout: &mut dyn Write, f: impl FnOnce(&mut dyn Write) -> Result<(), AppError>) -> Result<(), AppError> {
    match &cli.out {
        Some(path) => {
            let mut w = BufWriter::new(File::create(path)?);
            f(&mut w)?;
            w.flush()?;
            Ok(())
        }
        None => f(stdout),
    }
}

fn check_tol(tol: f64) -> Result<f64, AppError> {
    if tol > 0.0 && tol < 1.0 {
        Ok(tol)
    } else {
        Err(AppError::Config(format!("--tol must lie in (0, 1), got {tol}")))
    }
}

fn execute(cli: &Cli, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<(), AppError> {
    match &cli.command {
        Command::ListScenarios => {
            for (name, desc) in scenarios::NAMES {
                writeln!(stdout, "{name}\t{desc}")?;
            }
            Ok(())
        }
        Command::RunScenario { scenario } => {
            let mut sc = resolve_scenario(scenario)?;
            if let Some(s) = cli.seed {
                sc.seed = s;
            }
            if let Some(t) = cli.trials {
                sc.n_trials = t;
            }
            if let Some(t) = cli.tol {
                sc.solver.tol = check_tol(t)?;
            }
            let table = harness::run_scenario(&sc)?;
            for note in &table.notes {
                writeln!(stderr, "note: {note}")?;
            }
            emit(cli, stdout, |w| match cli.format {
                Format::Csv => harness::write_csv(&table, w),
                Format::Plotdata => harness::write_plotdata(&table, w),
            })
        }
        Command::Solve { config: path, method } => {
            let fc = config::load(path)?;
            let strategy = Strategy::parse(method).ok_or_else(|| {
                let names: Vec<&str> = Strategy::ALL.iter().map(|s| s.name()).collect();
                AppError::Config(format!("unknown method {method:?}; expected one of {}", names.join(", ")))
            })?;
            let mut solver = fc.solver;
            if let Some(t) = cli.tol {
                solver.tol = check_tol(t)?;
            }
            let cfg = &fc.system;
            let seed = cli.seed.unwrap_or(cfg.rng_seed);
            let ch = generate_channels(cfg, seed)?;
            let sol = match strategy {
                Strategy::Benchmark | Strategy::BenchmarkNoV => {
                    beamform::solve_benchmark_with(&ch, cfg, strategy == Strategy::Benchmark, &solver)?
                }
                _ => {
                    let (ri, re) = cfg.default_ranks();
                    let basis = build_bases(&ch, ri, re)?;
                    let eq = build_equivalents(&ch, &basis)?;
                    match strategy {
                        Strategy::Alg1 => beamform::solve_alg1_with(&ch, &basis, &eq, cfg, &solver)?,
                        Strategy::P22 => beamform::solve_p24_with(
                            &ch,
                            &basis,
                            &eq,
                            cfg,
                            &beamform::EtaPolicy::fixed(1.0),
                            &solver,
                        )?,
                        Strategy::P24 => beamform::solve_p24_with(&ch, &basis, &eq, cfg, &fc.eta, &solver)?,
                        _ => beamform::solve_alg2(&ch, &basis, &eq, cfg)?,
                    }
                }
            };
            let eval_ch = match fc.csi {
                Some(spec) if spec.rho > 0.0 => corrupt_csi(&ch, &spec, harness::sub_seed(seed, 1))?,
                _ => ch,
            };
            let opts = beamform::EvalOptions { seed: harness::sub_seed(seed, 2), ..Default::default() };
            let rep = beamform::evaluate_with(&eval_ch, &sol, cfg, &opts)?;
            let mut text = String::new();
            let fmt_err = |_| AppError::Config("formatting failed".into());
            sol.write_record(&mut text).map_err(fmt_err)?;
            writeln!(text, "waveform {:?}", rep.waveform).map_err(fmt_err)?;
            for (k, (g, c)) in rep.sinr.iter().zip(&rep.capacity).enumerate() {
                writeln!(text, "iu {k} sinr {g:e} capacity {c:.6}").map_err(fmt_err)?;
            }
            for (l, p) in rep.rf_power.iter().enumerate() {
                write!(text, "eu {l} rf {p:e}").map_err(fmt_err)?;
                if let (Some(dc), Some(se)) = (rep.dc_power.get(l), rep.dc_stderr.get(l)) {
                    write!(text, " dc {dc:e} dc_stderr {se:e}").map_err(fmt_err)?;
                }
                writeln!(text).map_err(fmt_err)?;
            }
            emit(cli, stdout, |w| Ok(w.write_all(text.as_bytes())?))
        }
        Command::ComplexityTable { m, k_i, k_e, r_i, r_e } => {
            let mut inp = ComplexityInputs::with_default_ranks(*m, *k_i, *k_e);
            if let Some(r) = r_i {
                inp.r_i = *r;
            }
            if let Some(r) = r_e {
                inp.r_e = *r;
            }
            if inp.k_i == 0 || inp.m < inp.k_i + inp.k_e || inp.r_i >= inp.m || inp.r_e >= inp.m {
                return Err(AppError::Config(format!(
                    "need K_I >= 1, M >= K_I + K_E and ranks below M, got {inp:?}"
                )));
            }
            emit(cli, stdout, |w| {
                let mut out = csv::Writer::from_writer(w);
                out.write_record(["kind", "method", "reference", "m", "k_i", "k_e", "r_i", "r_e", "value"])?;
                let dims = [inp.m, inp.k_i, inp.k_e, inp.r_i, inp.r_e].map(|d| d.to_string());
                for method in Method::ALL {
                    let mut row = vec!["complexity".to_string(), method.name().into(), String::new()];
                    row.extend(dims.iter().cloned());
                    row.push(format!("{:.2}", complexity_of(method, &inp)));
                    out.write_record(&row)?;
                }
                for reference in [Method::Alg1, Method::P24, Method::Benchmark, Method::BenchmarkNoV] {
                    let mut row = vec!["reduction_pct".to_string(), Method::Alg2.name().into(), reference.name().into()];
                    row.extend(dims.iter().cloned());
                    row.push(format!("{:.2}", reduction_ratio(Method::Alg2, reference, &inp)));
                    out.write_record(&row)?;
                }
                out.flush()?;
                Ok(())
            })
        }
    }
}
