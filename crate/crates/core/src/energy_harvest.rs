//! Logistic RF-to-DC conversion and waveform-aware received power.

use alloc::format;
use alloc::vec::Vec;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;

use crate::beamform::BeamformingSolution;
use crate::system_model::{cscg, ChannelSet};
use crate::{math, Error, Result};

/// Parameters of the logistic harvester model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EhParams {
    /// Steepness, 1/W.
    pub a: f64,
    /// Turn-on level, W.
    pub b: f64,
    /// Saturation level, W.
    pub ms: f64,
    /// Additive constant of the first-order expansion. Reported only; it never
    /// enters an optimisation objective.
    pub p0: f64,
}

impl EhParams {
    /// `a = 150`, `b = 0.024`, `Ms = 24 mW`.
    pub const fn reference() -> Self {
        EhParams { a: 150.0, b: 0.024, ms: 0.024, p0: 0.0 }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("a", self.a), ("b", self.b), ("ms", self.ms)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::config(format!("EH parameter {name} must be positive, got {v}")));
            }
        }
        if !self.p0.is_finite() {
            return Err(Error::config("EH constant p0 must be finite"));
        }
        Ok(())
    }

    /// `X = e^{ab} / (1 + e^{ab})`
    pub fn x(&self) -> f64 {
        logistic(self.a * self.b)
    }

    /// `Y = Ms / e^{ab}`
    pub fn y(&self) -> f64 {
        self.ms * math::exp(-self.a * self.b)
    }
}

impl Default for EhParams {
    fn default() -> Self {
        Self::reference()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Waveform {
    /// Energy symbols are `CN(0, 1)`, like the information symbols.
    Gaussian,
    /// Constant-envelope energy symbols, `|s| = 1`.
    DeterministicSinusoid,
}

fn logistic(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + math::exp(-x))
    } else {
        let e = math::exp(x);
        e / (1.0 + e)
    }
}

/// Harvested DC power for input RF power `p`:
/// `Ms / (X (1 + exp(-a (p - b)))) - Y`.
///
/// Evaluated as `Ms (1 + e^{-ab}) (s(a(p - b)) - s(-ab))` with `s` the
/// logistic function, which is the same expression rearranged so that
/// `f(0) = 0` holds exactly in floating point.
pub fn eh_transfer(p: f64, params: &EhParams) -> Result<f64> {
    if !(p >= 0.0) {
        return Err(Error::domain(format!("input RF power must be non-negative, got {p}")));
    }
    let ab = params.a * params.b;
    let gain = params.ms * (1.0 + math::exp(-ab));
    let out = gain * (logistic(params.a * (p - params.b)) - logistic(-ab));
    Ok(out.clamp(0.0, params.ms))
}

/// `f(p) / p`.
pub fn rf_dc_efficiency(p: f64, params: &EhParams) -> Result<f64> {
    if !(p > 0.0) {
        return Err(Error::domain(format!("efficiency needs positive input power, got {p}")));
    }
    Ok(eh_transfer(p, params)? / p)
}

/// Efficiency limit as the input power goes to zero,
/// `Ms a e^{ab} / (X (1 + e^{ab})^2)`.
pub fn small_signal_efficiency(params: &EhParams) -> f64 {
    let e = math::exp(params.a * params.b);
    params.ms * params.a * e / (params.x() * (1.0 + e) * (1.0 + e))
}

/// One symbol period of transmitted symbols.
#[derive(Debug, Clone, PartialEq)]
pub struct SymbolDraw {
    /// One symbol per information beam.
    pub info: Vec<Complex64>,
    /// One symbol per energy beam.
    pub energy: Vec<Complex64>,
}

impl SymbolDraw {
    /// Information symbols are always `CN(0, 1)`. Energy symbols are `CN(0, 1)`
    /// for the Gaussian waveform and the constant `1` for the sinusoid.
    pub fn sample<R: Rng + ?Sized>(rng: &mut R, n_info: usize, n_energy: usize, wf: Waveform) -> Self {
        let info = (0..n_info).map(|_| cscg(rng, 1.0)).collect();
        let energy = match wf {
            Waveform::Gaussian => (0..n_energy).map(|_| cscg(rng, 1.0)).collect(),
            Waveform::DeterministicSinusoid => alloc::vec![Complex64::new(1.0, 0.0); n_energy],
        };
        SymbolDraw { info, energy }
    }
}

/// Per-beam received powers `(rho |h^H w_i|^2, rho |h^H v_j|^2)` at EU `l`.
fn beam_gains(ch: &ChannelSet, sol: &BeamformingSolution, l: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    let h = ch
        .h_e
        .get(l)
        .ok_or_else(|| Error::shape(format!("EU index {l} out of range ({} EUs)", ch.k_e())))?;
    let rho = ch.rho_e[l];
    let gain = |beam: &crate::linalg::CVec| -> Result<f64> {
        if beam.len() != h.len() {
            return Err(Error::shape(format!(
                "beam has {} entries, channel has {}",
                beam.len(),
                h.len()
            )));
        }
        Ok(rho * h.dotc(beam).norm_sqr())
    };
    let info = sol.w.iter().map(gain).collect::<Result<Vec<_>>>()?;
    let energy = sol.v.iter().map(gain).collect::<Result<Vec<_>>>()?;
    Ok((info, energy))
}

fn instantaneous(info: &[f64], energy: &[f64], s: &SymbolDraw) -> f64 {
    let a: f64 = info.iter().zip(&s.info).map(|(g, z)| g * z.norm_sqr()).sum();
    let b: f64 = energy.iter().zip(&s.energy).map(|(g, z)| g * z.norm_sqr()).sum();
    a + b
}

/// Received RF power at EU `l`.
///
/// With a symbol draw the value is for that symbol period. Without one it is
/// the symbol average (unit second moments), which is the same for both
/// waveforms.
pub fn received_rf_power(
    ch: &ChannelSet,
    sol: &BeamformingSolution,
    l: usize,
    _wf: Waveform,
    symbols: Option<&SymbolDraw>,
) -> Result<f64> {
    let (info, energy) = beam_gains(ch, sol, l)?;
    match symbols {
        None => Ok(info.iter().sum::<f64>() + energy.iter().sum::<f64>()),
        Some(s) => {
            if s.info.len() != info.len() || s.energy.len() != energy.len() {
                return Err(Error::shape("symbol draw does not match the beam counts"));
            }
            Ok(instantaneous(&info, &energy, s))
        }
    }
}

/// Sample mean and its standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeanEstimate {
    pub mean: f64,
    pub std_err: f64,
    pub n: usize,
}

/// Monte Carlo estimate of the harvested DC power at EU `l`.
///
/// Each of the `n_symbols` periods draws fresh information symbols; energy
/// symbols are Gaussian or unit-modulus depending on `wf`, and the harvester
/// sees the instantaneous received power of that period.
pub fn harvested_dc_estimate(
    ch: &ChannelSet,
    sol: &BeamformingSolution,
    l: usize,
    wf: Waveform,
    params: &EhParams,
    n_symbols: usize,
    seed: u64,
) -> Result<MeanEstimate> {
    if n_symbols == 0 {
        return Err(Error::domain("n_symbols must be at least 1"));
    }
    let (info, energy) = beam_gains(ch, sol, l)?;
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    // Welford
    let mut mean = 0.0;
    let mut m2 = 0.0;
    for n in 0..n_symbols {
        let s = SymbolDraw::sample(&mut rng, info.len(), energy.len(), wf);
        let x = eh_transfer(instantaneous(&info, &energy, &s), params)?;
        let d = x - mean;
        mean += d / (n + 1) as f64;
        m2 += d * (x - mean);
    }
    let std_err = if n_symbols > 1 {
        math::sqrt(m2 / (n_symbols - 1) as f64 / n_symbols as f64)
    } else {
        0.0
    };
    Ok(MeanEstimate { mean, std_err, n: n_symbols })
}

/// [`harvested_dc_estimate`] without the error bar.
pub fn harvested_dc_power(
    ch: &ChannelSet,
    sol: &BeamformingSolution,
    l: usize,
    wf: Waveform,
    params: &EhParams,
    n_symbols: usize,
    seed: u64,
) -> Result<f64> {
    harvested_dc_estimate(ch, sol, l, wf, params, n_symbols, seed).map(|e| e.mean)
}
