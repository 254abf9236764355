//! Beamforming strategies and the per-user evaluator.
//!
//! * [`solve_alg1`]: null-space SDR without energy beams (Gaussian waveform).
//! * [`solve_p24`]: null-space SDR with an `eta`-rewarded energy covariance.
//! * [`solve_alg2`]: closed form; MRT information beams at minimum power plus a
//!   single energy beam on the dominant eigenvector of `S_E`.
//! * [`solve_benchmark`]: SDR over full `M x M` covariances with explicit
//!   interference terms.
//!
//! Infeasible instances come back as [`Error::Infeasible`]; an SDP that stops
//! without a certificate comes back as [`Error::NotConverged`].

mod closed_form;
mod sdr;

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt::{self, Write};

use crate::energy_harvest::{harvested_dc_estimate, received_rf_power, Waveform};
use crate::linalg::{self, CMat, CVec, HermitianEigen};
use crate::sdp::SolveStatus;
use crate::system_model::{ChannelSet, SystemConfig};
use crate::{math, Complex64, Error, Result};

pub use closed_form::solve_alg2;
pub use sdr::{solve_alg1, solve_alg1_with, solve_benchmark, solve_benchmark_with, solve_p24, solve_p24_with};

/// Relative inflation of the capacity thresholds, turning `>` into `>=`.
pub const STRICT_MARGIN: f64 = 1e-9;
/// Rank residual ratio above which a warning is recorded.
pub const RANK_WARNING: f64 = 1e-4;
/// Energy-covariance eigenvalues below this fraction of the trace are dropped.
pub const EIGEN_FLOOR: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Method {
    Alg1,
    P24,
    Alg2,
    Benchmark,
    BenchmarkNoV,
}

impl Method {
    pub const ALL: [Method; 5] = [Method::Alg1, Method::P24, Method::Alg2, Method::Benchmark, Method::BenchmarkNoV];

    pub fn name(self) -> &'static str {
        match self {
            Method::Alg1 => "alg1",
            Method::P24 => "p24",
            Method::Alg2 => "alg2",
            Method::Benchmark => "benchmark",
            Method::BenchmarkNoV => "benchmark_no_v",
        }
    }

    pub fn parse(s: &str) -> Option<Method> {
        Method::ALL.into_iter().find(|m| m.name().eq_ignore_ascii_case(s))
    }

    /// Waveform the method is designed for.
    pub fn natural_waveform(self) -> Waveform {
        match self {
            Method::Alg2 | Method::P24 => Waveform::DeterministicSinusoid,
            _ => Waveform::Gaussian,
        }
    }

    pub fn uses_null_space(self) -> bool {
        matches!(self, Method::Alg1 | Method::P24 | Method::Alg2)
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Reward-factor rule for [`solve_p24`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EtaPolicy {
    pub delta: f64,
    pub explicit_eta: Option<f64>,
}

impl Default for EtaPolicy {
    fn default() -> Self {
        EtaPolicy { delta: 10.0, explicit_eta: None }
    }
}

impl EtaPolicy {
    pub fn fixed(eta: f64) -> Self {
        EtaPolicy { explicit_eta: Some(eta), ..Self::default() }
    }

    /// `max_i xi_max(S_Ei) / xi_max(S_E) + delta` unless overridden.
    pub fn eta(&self, s_ei: &[CMat], s_e: &CMat) -> Result<f64> {
        if let Some(e) = self.explicit_eta {
            if !(e >= 0.0 && e.is_finite()) {
                return Err(Error::config("explicit eta must be finite and nonnegative"));
            }
            return Ok(e);
        }
        if !(self.delta > 0.0 && self.delta.is_finite()) {
            return Err(Error::config("eta policy delta must be positive"));
        }
        let top_i = s_ei.iter().map(|s| HermitianEigen::new(s).max_value()).fold(0.0, f64::max);
        let top_e = HermitianEigen::new(s_e).max_value();
        Ok(if top_e > 0.0 { top_i / top_e + self.delta } else { self.delta })
    }
}

/// Interior-point settings used by the SDR methods.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverOptions {
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions { tol: 1e-9, max_iter: 100 }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Diagnostics {
    pub status: Option<SolveStatus>,
    pub duality_gap: Option<f64>,
    pub iterations: Option<usize>,
    /// SDP objective (unweighted EU channel gain, path loss excluded).
    pub objective: Option<f64>,
    /// `xi_2 / xi_max` per information covariance.
    pub rank_ratios: Vec<f64>,
    pub eta: Option<f64>,
    /// Trace of the energy covariance (`D` or `V`) before splitting.
    pub energy_trace: Option<f64>,
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BeamformingSolution {
    pub w: Vec<CVec>,
    pub v: Vec<CVec>,
    pub p_i: Vec<f64>,
    pub p_e: Vec<f64>,
    pub method: Method,
    pub diagnostics: Diagnostics,
}

impl BeamformingSolution {
    fn assemble(method: Method, w: Vec<CVec>, v: Vec<CVec>, diagnostics: Diagnostics) -> Self {
        let p_i = w.iter().map(|b| b.norm_squared()).collect();
        let p_e = v.iter().map(|b| b.norm_squared()).collect();
        BeamformingSolution { w, v, p_i, p_e, method, diagnostics }
    }

    pub fn info_power(&self) -> f64 {
        self.p_i.iter().sum()
    }

    pub fn energy_power(&self) -> f64 {
        self.p_e.iter().sum()
    }

    pub fn total_power(&self) -> f64 {
        self.info_power() + self.energy_power()
    }

    /// Plain-text record: method, powers, diagnostics, then each beam as
    /// `re im` pairs.
    pub fn write_record<W: Write>(&self, out: &mut W) -> fmt::Result {
        writeln!(out, "method {}", self.method)?;
        let list = |out: &mut W, key: &str, v: &[f64]| -> fmt::Result {
            write!(out, "{key}")?;
            for x in v {
                write!(out, " {x:e}")?;
            }
            writeln!(out)
        };
        list(out, "p_i", &self.p_i)?;
        list(out, "p_e", &self.p_e)?;
        let d = &self.diagnostics;
        if let Some(s) = d.status {
            writeln!(out, "status {s:?}")?;
        }
        if let Some(g) = d.duality_gap {
            writeln!(out, "duality_gap {g:e}")?;
        }
        if let Some(e) = d.eta {
            writeln!(out, "eta {e:e}")?;
        }
        if let Some(t) = d.energy_trace {
            writeln!(out, "energy_trace {t:e}")?;
        }
        list(out, "rank_ratios", &d.rank_ratios)?;
        for w in &d.warnings {
            writeln!(out, "warning {w}")?;
        }
        for (tag, beams) in [("w", &self.w), ("v", &self.v)] {
            for (i, b) in beams.iter().enumerate() {
                write!(out, "{tag} {i}")?;
                for z in b.iter() {
                    write!(out, " {:e} {:e}", z.re, z.im)?;
                }
                writeln!(out)?;
            }
        }
        Ok(())
    }
}

/// Per-user link metrics of one solution on one channel.
#[derive(Debug, Clone, PartialEq)]
pub struct EvalReport {
    pub sinr: Vec<f64>,
    /// bit/s/Hz
    pub capacity: Vec<f64>,
    /// Symbol-averaged received RF power per EU, W.
    pub rf_power: Vec<f64>,
    /// Mean harvested DC power per EU, W; empty when not requested.
    pub dc_power: Vec<f64>,
    pub dc_stderr: Vec<f64>,
    pub waveform: Waveform,
}

impl EvalReport {
    pub fn worst_capacity(&self) -> f64 {
        self.capacity.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn mean_capacity(&self) -> f64 {
        if self.capacity.is_empty() {
            return 0.0;
        }
        self.capacity.iter().sum::<f64>() / self.capacity.len() as f64
    }

    pub fn total_rf(&self) -> f64 {
        self.rf_power.iter().sum()
    }

    pub fn total_dc(&self) -> f64 {
        self.dc_power.iter().sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvalOptions {
    /// `None` uses the method's natural waveform.
    pub waveform: Option<Waveform>,
    /// Symbol periods for the harvested-power estimate; 0 skips it.
    pub n_symbols: usize,
    pub seed: u64,
}

impl Default for EvalOptions {
    fn default() -> Self {
        EvalOptions { waveform: None, n_symbols: 10_000, seed: 0 }
    }
}

/// [`evaluate_with`] using the default options.
pub fn evaluate(ch: &ChannelSet, sol: &BeamformingSolution, cfg: &SystemConfig) -> Result<EvalReport> {
    evaluate_with(ch, sol, cfg, &EvalOptions::default())
}

/// SINR and capacity per IU, received RF and harvested DC power per EU.
///
/// Interference from every other information beam and every energy beam is
/// counted, so the same evaluator serves null-space beams, the benchmark and
/// beams designed on mismatched CSI.
pub fn evaluate_with(
    ch: &ChannelSet,
    sol: &BeamformingSolution,
    cfg: &SystemConfig,
    opts: &EvalOptions,
) -> Result<EvalReport> {
    let m = ch.antennas();
    if sol.w.iter().chain(&sol.v).any(|b| b.len() != m) {
        return Err(Error::shape("beam length differs from the antenna count"));
    }
    if sol.w.len() != ch.k_i() {
        return Err(Error::shape(alloc::format!(
            "{} information beams for {} IUs",
            sol.w.len(),
            ch.k_i()
        )));
    }
    let mut sinr = Vec::with_capacity(ch.k_i());
    for (k, h) in ch.h_i.iter().enumerate() {
        let gain = |b: &CVec| h.dotc(b).norm_sqr();
        let signal = gain(&sol.w[k]);
        let interference: f64 = sol
            .w
            .iter()
            .enumerate()
            .filter(|(i, _)| *i != k)
            .map(|(_, b)| gain(b))
            .chain(sol.v.iter().map(gain))
            .sum();
        sinr.push(signal / (interference + cfg.sigma0_sq / ch.rho_i[k]));
    }
    let capacity = sinr.iter().map(|g| math::log2(1.0 + g)).collect();
    let waveform = opts.waveform.unwrap_or(sol.method.natural_waveform());
    let mut rf_power = Vec::with_capacity(ch.k_e());
    let mut dc_power = Vec::new();
    let mut dc_stderr = Vec::new();
    for l in 0..ch.k_e() {
        rf_power.push(received_rf_power(ch, sol, l, waveform, None)?);
        if opts.n_symbols > 0 {
            let seed = opts.seed ^ (l as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15);
            let e = harvested_dc_estimate(ch, sol, l, waveform, &cfg.eh, opts.n_symbols, seed)?;
            dc_power.push(e.mean);
            dc_stderr.push(e.std_err);
        }
    }
    Ok(EvalReport { sinr, capacity, rf_power, dc_power, dc_stderr, waveform })
}

/// `c_k = (2^C - 1) sigma^2 / rho_k`, the minimum `|h_k^H w_k|^2`.
pub fn capacity_thresholds(ch: &ChannelSet, cfg: &SystemConfig) -> Vec<f64> {
    let target = cfg.sinr_target();
    ch.rho_i.iter().map(|r| target * cfg.sigma0_sq / r).collect()
}

/// Splits a PSD covariance into beams `basis (sqrt(xi) u)`, one per
/// eigenvalue above `EIGEN_FLOOR * trace`.
pub(crate) fn split_covariance(cov: &CMat, basis: Option<&CMat>) -> Vec<CVec> {
    let tr = linalg::real_trace(cov);
    if !(tr > 0.0) {
        return Vec::new();
    }
    let eig = HermitianEigen::new(cov);
    let mut out = Vec::new();
    for (k, &xi) in eig.values.iter().enumerate().rev() {
        if xi <= EIGEN_FLOOR * tr {
            continue;
        }
        let local = eig.vectors.column(k) * Complex64::new(math::sqrt(xi), 0.0);
        let mut beam = match basis {
            Some(n) => n * local,
            None => local.into_owned(),
        };
        linalg::normalize_phase(&mut beam);
        out.push(beam);
    }
    out
}

/// Raises beam `k` onto its capacity threshold when it falls short by no
/// more than a relative `1e-6`, which absorbs solver round-off.
pub(crate) fn lift_to_threshold(w: &mut [CVec], ch: &ChannelSet, thresholds: &[f64]) {
    for ((b, h), &c) in w.iter_mut().zip(&ch.h_i).zip(thresholds) {
        let g = h.dotc(b).norm_sqr();
        if g > 0.0 && g < c && c / g - 1.0 <= 1e-6 {
            *b *= Complex64::new(math::sqrt(c * (1.0 + 1e-12) / g), 0.0);
        }
    }
}
