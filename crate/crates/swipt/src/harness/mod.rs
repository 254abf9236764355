//! Seeded Monte Carlo runner.
//!
//! A [`Scenario`] is a list of sweep points, each a set of [`Param`]
//! overrides on a base [`SystemConfig`], and a list of strategies. Every
//! trial index maps to one channel seed shared by all points and strategies,
//! so curves are compared on common random numbers. Points that differ only
//! in the CSI error level share one design per trial; the beams are designed
//! on the nominal channel and evaluated on the corrupted one.

pub mod output;
pub mod scenarios;

use std::fmt;
use std::path::Path;

use rayon::prelude::*;
use swipt_core::beamform::{
    self, BeamformingSolution, EtaPolicy, EvalOptions, EvalReport, Method, SolverOptions,
};
use swipt_core::energy_harvest::{eh_transfer, rf_dc_efficiency, small_signal_efficiency};
use swipt_core::nullspace::{build_bases, build_equivalents, EquivalentChannels, NullSpaceBasis};
use swipt_core::system_model::{corrupt_csi, generate_channels, ChannelSet, CsiErrorSpec, SystemConfig};

use crate::config::{self, FileConfig};
use crate::AppError;

pub use output::{format_dbm, summarize, write_csv, write_plotdata};

/// Beamforming strategy as run by the harness. `P22` is the energy-beam
/// problem with a unit reward factor.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Strategy {
    Alg1,
    P22,
    P24,
    Alg2,
    Benchmark,
    BenchmarkNoV,
}

impl Strategy {
    pub const ALL: [Strategy; 6] = [
        Strategy::Alg1,
        Strategy::P22,
        Strategy::P24,
        Strategy::Alg2,
        Strategy::Benchmark,
        Strategy::BenchmarkNoV,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Strategy::P22 => "p22",
            other => other.method().name(),
        }
    }

    pub fn parse(s: &str) -> Option<Strategy> {
        Strategy::ALL.into_iter().find(|m| m.name().eq_ignore_ascii_case(s.trim()))
    }

    pub fn method(self) -> Method {
        match self {
            Strategy::Alg1 => Method::Alg1,
            Strategy::P22 | Strategy::P24 => Method::P24,
            Strategy::Alg2 => Method::Alg2,
            Strategy::Benchmark => Method::Benchmark,
            Strategy::BenchmarkNoV => Method::BenchmarkNoV,
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// One override applied to the base configuration of a scenario.
#[derive(Debug, Clone, PartialEq)]
pub enum Param {
    PMax(f64),
    CThre(f64),
    Antennas(usize),
    /// `(K_I, K_E)`.
    Users(usize, usize),
    /// Rician factor of every user.
    Kappa(f64),
    /// `(r_I, r_E)`; otherwise the configuration's default ranks.
    Ranks(usize, usize),
    /// CSI error level of the evaluation channel.
    Rho(f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepPoint {
    pub label: String,
    /// Abscissa for plot data.
    pub x: f64,
    /// Curve the point belongs to.
    pub series: String,
    pub params: Vec<Param>,
}

impl SweepPoint {
    pub fn new(label: impl Into<String>, x: f64, series: impl Into<String>, params: Vec<Param>) -> Self {
        SweepPoint { label: label.into(), x, series: series.into(), params }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScenarioKind {
    MonteCarlo,
    /// Evaluates the EH curve at each point's `x` (input RF power in W).
    EfficiencyCurve,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub name: String,
    pub description: String,
    pub kind: ScenarioKind,
    pub base: SystemConfig,
    pub points: Vec<SweepPoint>,
    pub strategies: Vec<Strategy>,
    pub n_trials: usize,
    pub seed: u64,
    /// Symbol periods for the harvested-DC estimate; 0 skips it.
    pub n_symbols: usize,
    pub solver: SolverOptions,
    pub eta: EtaPolicy,
    /// Metrics to report; empty means all that apply.
    pub metrics: Vec<String>,
}

/// Metric names in output order. Power metrics are in watts.
pub const METRICS: [&str; 9] = [
    "worst_capacity",
    "mean_capacity",
    "qos_met",
    "rf_total",
    "dc_total",
    "total_power",
    "energy_fraction",
    "power_ratio_db",
    "leakage_inr",
];

/// Metrics reported in watts, converted to dBm by [`summarize`].
pub const POWER_METRICS: [&str; 3] = ["rf_total", "dc_total", "total_power"];

const QOS_SLACK: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq)]
struct PointSetup {
    cfg: SystemConfig,
    ranks: (usize, usize),
    rho: f64,
}

fn setup(base: &SystemConfig, point: &SweepPoint) -> Result<PointSetup, AppError> {
    let mut cfg = base.clone();
    for p in &point.params {
        match *p {
            Param::Antennas(m) => cfg = cfg.with_antennas(m),
            Param::Users(ki, ke) => cfg = cfg.with_users(ki, ke),
            _ => {}
        }
    }
    let mut ranks = None;
    let mut rho = 0.0;
    for p in &point.params {
        match *p {
            Param::PMax(v) => cfg.p_max = v,
            Param::CThre(v) => cfg.c_thre = v,
            Param::Kappa(k) => cfg = cfg.with_kappa(k),
            Param::Ranks(ri, re) => ranks = Some((ri, re)),
            Param::Rho(r) => rho = r,
            Param::Antennas(_) | Param::Users(..) => {}
        }
    }
    let bad = |msg: String| AppError::Config(format!("point {}: {msg}", point.label));
    cfg.validate().map_err(|e| bad(e.to_string()))?;
    let ranks = ranks.unwrap_or(cfg.default_ranks());
    if ranks.0 >= cfg.m || ranks.1 >= cfg.m {
        return Err(bad(format!("ranks {ranks:?} must be below M = {}", cfg.m)));
    }
    if !(0.0..=1.0).contains(&rho) {
        return Err(bad(format!("rho must lie in [0, 1], got {rho}")));
    }
    Ok(PointSetup { cfg, ranks, rho })
}

impl Scenario {
    pub fn validate(&self) -> Result<(), AppError> {
        if self.points.is_empty() {
            return Err(AppError::Config(format!("scenario {} has no sweep points", self.name)));
        }
        if self.kind == ScenarioKind::EfficiencyCurve {
            self.base.eh.validate()?;
            if self.points.iter().any(|p| !(p.x >= 0.0 && p.x.is_finite())) {
                return Err(AppError::Config("input powers must be finite and nonnegative".into()));
            }
            return Ok(());
        }
        if self.n_trials == 0 {
            return Err(AppError::Config("n_trials must be at least 1".into()));
        }
        if self.strategies.is_empty() {
            return Err(AppError::Config(format!("scenario {} lists no methods", self.name)));
        }
        if !(self.solver.tol > 0.0 && self.solver.tol < 1.0) || self.solver.max_iter == 0 {
            return Err(AppError::Config("solver tol must lie in (0, 1) and max_iter be positive".into()));
        }
        if let Some(m) = self.metrics.iter().find(|m| !METRICS.contains(&m.as_str())) {
            return Err(AppError::Config(format!("unknown metric {m}")));
        }
        for p in &self.points {
            setup(&self.base, p)?;
        }
        Ok(())
    }

    /// Builds a one-axis sweep from a configuration file with a
    /// `[scenario]` table.
    pub fn from_file(path: &Path) -> Result<Scenario, AppError> {
        Scenario::from_config(config::load(path)?)
    }

    pub fn from_config(fc: FileConfig) -> Result<Scenario, AppError> {
        let raw = fc
            .scenario
            .ok_or_else(|| AppError::Config("configuration has no [scenario] table".into()))?;
        let strategies = raw
            .methods
            .iter()
            .map(|m| Strategy::parse(m).ok_or_else(|| AppError::Config(format!("unknown method {m}"))))
            .collect::<Result<Vec<_>, _>>()?;
        let axis = raw.sweep.trim().to_ascii_lowercase();
        let mut points = Vec::with_capacity(raw.values.len());
        for &v in &raw.values {
            let count = |v: f64| -> Result<usize, AppError> {
                if v >= 1.0 && v.fract() == 0.0 {
                    Ok(v as usize)
                } else {
                    Err(AppError::Config(format!("{axis} values must be positive integers, got {v}")))
                }
            };
            let mut params = vec![match axis.as_str() {
                "p_max" => Param::PMax(v),
                "c_thre" => Param::CThre(v),
                "m" => Param::Antennas(count(v)?),
                "k" => Param::Users(count(v)?, count(v)?),
                "kappa" => Param::Kappa(v),
                "rho" => Param::Rho(v),
                other => return Err(AppError::Config(format!("cannot sweep {other:?}"))),
            }];
            if let (Some(csi), false) = (fc.csi, axis == "rho") {
                params.push(Param::Rho(csi.rho));
            }
            points.push(SweepPoint::new(format!("{axis}={v}"), v, axis.clone(), params));
        }
        let sc = Scenario {
            name: raw.name,
            description: format!("sweep of {axis} from a configuration file"),
            kind: ScenarioKind::MonteCarlo,
            base: fc.system.clone(),
            points,
            strategies,
            n_trials: raw.trials.unwrap_or(scenarios::DEFAULT_TRIALS),
            seed: fc.system.rng_seed,
            n_symbols: raw.n_symbols.unwrap_or(0),
            solver: fc.solver,
            eta: fc.eta,
            metrics: Vec::new(),
        };
        sc.validate()?;
        Ok(sc)
    }

    fn metric_applies(&self, s: Strategy, metric: &str) -> bool {
        let wanted = self.metrics.is_empty() || self.metrics.iter().any(|m| m == metric);
        wanted
            && match metric {
                "dc_total" => self.n_symbols > 0,
                "power_ratio_db" => s == Strategy::Alg2,
                _ => true,
            }
    }
}

/// One aggregated (point, method, metric) cell.
#[derive(Debug, Clone, PartialEq)]
pub struct ResultRow {
    pub scenario: String,
    pub point: String,
    pub x: f64,
    pub series: String,
    pub method: String,
    pub metric: String,
    /// Mean over the feasible trials.
    pub mean: f64,
    /// Sample standard deviation over `sqrt(n_feasible)`.
    pub stderr: f64,
    pub n_trials: usize,
    pub n_feasible: usize,
    pub n_infeasible: usize,
    /// Trials where the solver stopped without a certificate or errored.
    pub n_failed: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ResultTable {
    pub rows: Vec<ResultRow>,
    /// First few failure messages, for diagnosis.
    pub notes: Vec<String>,
}

impl ResultTable {
    pub fn get(&self, point: &str, method: &str, metric: &str) -> Option<&ResultRow> {
        self.rows.iter().find(|r| r.point == point && r.method == method && r.metric == metric)
    }

    /// Rows of one curve in sweep order.
    pub fn curve(&self, series: &str, method: &str, metric: &str) -> Vec<&ResultRow> {
        self.rows.iter().filter(|r| r.series == series && r.method == method && r.metric == metric).collect()
    }
}

/// SplitMix64 finaliser.
pub fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Channel seed of trial `trial`.
pub fn trial_seed(base: u64, trial: usize) -> u64 {
    splitmix64(base ^ splitmix64(trial as u64))
}

/// Independent stream `stream` derived from a trial seed.
pub fn sub_seed(seed: u64, stream: u64) -> u64 {
    splitmix64(seed.wrapping_add(stream.wrapping_mul(0xD1B5_4A32_D192_ED03)))
}

const CSI_STREAM: u64 = 1;
const SYMBOL_STREAM: u64 = 2;

#[derive(Debug, Clone, PartialEq)]
enum Outcome {
    Feasible([Option<f64>; METRICS.len()]),
    Infeasible,
    Failed(String),
}

/// Solves one strategy on one draw.
fn design(
    s: Strategy,
    ch: &ChannelSet,
    cfg: &SystemConfig,
    null: &mut Option<swipt_core::Result<(NullSpaceBasis, EquivalentChannels)>>,
    ranks: (usize, usize),
    sc: &Scenario,
) -> swipt_core::Result<BeamformingSolution> {
    match s {
        Strategy::Benchmark => return beamform::solve_benchmark_with(ch, cfg, true, &sc.solver),
        Strategy::BenchmarkNoV => return beamform::solve_benchmark_with(ch, cfg, false, &sc.solver),
        _ => {}
    }
    let built = null.get_or_insert_with(|| {
        let basis = build_bases(ch, ranks.0, ranks.1)?;
        let eq = build_equivalents(ch, &basis)?;
        Ok((basis, eq))
    });
    let (basis, eq) = built.as_ref().map_err(Clone::clone)?;
    match s {
        Strategy::Alg1 => beamform::solve_alg1_with(ch, basis, eq, cfg, &sc.solver),
        Strategy::P22 => beamform::solve_p24_with(ch, basis, eq, cfg, &EtaPolicy::fixed(1.0), &sc.solver),
        Strategy::P24 => beamform::solve_p24_with(ch, basis, eq, cfg, &sc.eta, &sc.solver),
        Strategy::Alg2 => beamform::solve_alg2(ch, basis, eq, cfg),
        Strategy::Benchmark | Strategy::BenchmarkNoV => unreachable!(),
    }
}

/// Sum over IUs of the interference-to-noise ratio.
fn leakage_inr(ch: &ChannelSet, sol: &BeamformingSolution, cfg: &SystemConfig) -> f64 {
    ch.h_i
        .iter()
        .enumerate()
        .map(|(k, h)| {
            let interference: f64 = sol
                .w
                .iter()
                .enumerate()
                .filter(|(i, _)| *i != k)
                .map(|(_, b)| b)
                .chain(&sol.v)
                .map(|b| h.dotc(b).norm_sqr())
                .sum();
            interference * ch.rho_i[k] / cfg.sigma0_sq
        })
        .sum()
}

fn metrics(s: Strategy, sol: &BeamformingSolution, rep: &EvalReport, ch: &ChannelSet, cfg: &SystemConfig) -> [Option<f64>; METRICS.len()] {
    let worst = rep.worst_capacity();
    let energy = sol.diagnostics.energy_trace.unwrap_or_else(|| sol.energy_power());
    [
        Some(worst),
        Some(rep.mean_capacity()),
        Some(if worst >= cfg.c_thre - QOS_SLACK { 1.0 } else { 0.0 }),
        Some(rep.total_rf()),
        (!rep.dc_power.is_empty()).then(|| rep.total_dc()),
        Some(sol.total_power()),
        Some(energy / cfg.p_max),
        (s == Strategy::Alg2).then(|| 10.0 * (sol.energy_power() / sol.info_power()).log10()),
        Some(leakage_inr(ch, sol, cfg)),
    ]
}

/// Runs every strategy on one draw and evaluates it at each CSI level in
/// `members`.
fn run_group(sc: &Scenario, setups: &[PointSetup], members: &[usize], trial: usize) -> Vec<Vec<Outcome>> {
    let first = &setups[members[0]];
    let seed = trial_seed(sc.seed, trial);
    let failed_all = |msg: String| vec![vec![Outcome::Failed(msg); sc.strategies.len()]; members.len()];
    let ch = match generate_channels(&first.cfg, seed) {
        Ok(ch) => ch,
        Err(e) => return failed_all(e.to_string()),
    };
    let mut eval_channels = Vec::with_capacity(members.len());
    for &p in members {
        let rho = setups[p].rho;
        if rho > 0.0 {
            match corrupt_csi(&ch, &CsiErrorSpec::new(rho), sub_seed(seed, CSI_STREAM)) {
                Ok(c) => eval_channels.push(c),
                Err(e) => return failed_all(e.to_string()),
            }
        } else {
            eval_channels.push(ch.clone());
        }
    }
    let opts = EvalOptions { waveform: None, n_symbols: sc.n_symbols, seed: sub_seed(seed, SYMBOL_STREAM) };
    let mut out = vec![Vec::with_capacity(sc.strategies.len()); members.len()];
    let mut null = None;
    for &s in &sc.strategies {
        match design(s, &ch, &first.cfg, &mut null, first.ranks, sc) {
            Ok(sol) => {
                for (slot, ech) in out.iter_mut().zip(&eval_channels) {
                    slot.push(match beamform::evaluate_with(ech, &sol, &first.cfg, &opts) {
                        Ok(rep) => Outcome::Feasible(metrics(s, &sol, &rep, ech, &first.cfg)),
                        Err(e) => Outcome::Failed(e.to_string()),
                    });
                }
            }
            Err(swipt_core::Error::Infeasible(_)) => out.iter_mut().for_each(|o| o.push(Outcome::Infeasible)),
            Err(e) => {
                let msg = format!("{s}: {e}");
                out.iter_mut().for_each(|o| o.push(Outcome::Failed(msg.clone())));
            }
        }
    }
    out
}

fn mean_stderr(v: &[f64]) -> (f64, f64) {
    if v.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let n = v.len() as f64;
    let mean = v.iter().sum::<f64>() / n;
    if v.len() < 2 {
        return (mean, 0.0);
    }
    let var = v.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

const MAX_NOTES: usize = 8;

/// Runs a validated scenario. The result does not depend on the number of
/// worker threads.
pub fn run_scenario(sc: &Scenario) -> Result<ResultTable, AppError> {
    sc.validate()?;
    if sc.kind == ScenarioKind::EfficiencyCurve {
        return efficiency_curve(sc);
    }
    let setups = sc.points.iter().map(|p| setup(&sc.base, p)).collect::<Result<Vec<_>, _>>()?;

    // Points equal up to the CSI level share a design.
    let mut groups: Vec<Vec<usize>> = Vec::new();
    for (i, s) in setups.iter().enumerate() {
        let key = |t: &PointSetup| (t.cfg.clone(), t.ranks);
        match groups.iter_mut().find(|g| key(&setups[g[0]]) == key(s)) {
            Some(g) => g.push(i),
            None => groups.push(vec![i]),
        }
    }
    let jobs: Vec<(usize, usize)> =
        (0..groups.len()).flat_map(|g| (0..sc.n_trials).map(move |t| (g, t))).collect();
    let results: Vec<Vec<Vec<Outcome>>> =
        jobs.par_iter().map(|&(g, t)| run_group(sc, &setups, &groups[g], t)).collect();

    // outcomes[point][trial][strategy]
    let mut outcomes: Vec<Vec<Vec<Outcome>>> = vec![Vec::with_capacity(sc.n_trials); sc.points.len()];
    for (&(g, _), res) in jobs.iter().zip(results) {
        for (&p, o) in groups[g].iter().zip(res) {
            outcomes[p].push(o);
        }
    }

    let mut table = ResultTable::default();
    for (p, point) in sc.points.iter().enumerate() {
        for (si, &s) in sc.strategies.iter().enumerate() {
            let cell: Vec<&Outcome> = outcomes[p].iter().map(|t| &t[si]).collect();
            let n_infeasible = cell.iter().filter(|o| matches!(o, Outcome::Infeasible)).count();
            let mut n_failed = 0;
            for o in &cell {
                if let Outcome::Failed(msg) = o {
                    n_failed += 1;
                    if table.notes.len() < MAX_NOTES {
                        table.notes.push(format!("{} {}: {msg}", point.label, s));
                    }
                }
            }
            let n_feasible = cell.len() - n_infeasible - n_failed;
            for (mi, &metric) in METRICS.iter().enumerate() {
                if !sc.metric_applies(s, metric) {
                    continue;
                }
                let values: Vec<f64> = cell
                    .iter()
                    .filter_map(|o| match o {
                        Outcome::Feasible(m) => m[mi],
                        _ => None,
                    })
                    .collect();
                let (mean, stderr) = mean_stderr(&values);
                table.rows.push(ResultRow {
                    scenario: sc.name.clone(),
                    point: point.label.clone(),
                    x: point.x,
                    series: point.series.clone(),
                    method: s.name().to_string(),
                    metric: metric.to_string(),
                    mean,
                    stderr,
                    n_trials: sc.n_trials,
                    n_feasible,
                    n_infeasible,
                    n_failed,
                    seed: sc.seed,
                });
            }
        }
    }
    Ok(table)
}

fn efficiency_curve(sc: &Scenario) -> Result<ResultTable, AppError> {
    let mut table = ResultTable::default();
    for point in &sc.points {
        let dc = eh_transfer(point.x, &sc.base.eh)?;
        let eff = if point.x > 0.0 {
            rf_dc_efficiency(point.x, &sc.base.eh)?
        } else {
            small_signal_efficiency(&sc.base.eh)
        };
        for (metric, value) in [("dc_power", dc), ("efficiency", eff)] {
            table.rows.push(ResultRow {
                scenario: sc.name.clone(),
                point: point.label.clone(),
                x: point.x,
                series: point.series.clone(),
                method: "eh".into(),
                metric: metric.into(),
                mean: value,
                stderr: 0.0,
                n_trials: 1,
                n_feasible: 1,
                n_infeasible: 0,
                n_failed: 0,
                seed: sc.seed,
            });
        }
    }
    Ok(table)
}
