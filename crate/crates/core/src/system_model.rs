//! Scenario parameters, Rician channel draws over a half-wavelength ULA, path
//! loss and the imperfect-CSI model.

use alloc::format;
use alloc::vec::Vec;
use core::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rand_distr::StandardNormal;

use crate::energy_harvest::EhParams;
use crate::linalg::{CMat, CVec};
use crate::{math, Error, Result};

/// Rician factor used when none is given (Rayleigh fading).
pub const DEFAULT_KAPPA: f64 = 0.0;

#[derive(Debug, Clone, PartialEq)]
pub struct SystemConfig {
    /// Transmit antennas at the access point.
    pub m: usize,
    /// Information users.
    pub k_i: usize,
    /// Energy users.
    pub k_e: usize,
    /// Total transmit power, W.
    pub p_max: f64,
    /// Per-IU capacity requirement, bit/s/Hz.
    pub c_thre: f64,
    /// Rician factors; `f64::INFINITY` gives a pure line-of-sight row.
    pub kappa_i: Vec<f64>,
    pub kappa_e: Vec<f64>,
    /// Access-point-to-user distances, m.
    pub d_i: Vec<f64>,
    pub d_e: Vec<f64>,
    pub alpha_i: f64,
    pub alpha_e: f64,
    /// Attenuation at the 1 m reference distance, dB.
    pub l_ref_db: f64,
    /// Receiver noise power, W.
    pub sigma0_sq: f64,
    pub eh: EhParams,
    pub rng_seed: u64,
    /// Fixed angles of departure (radians); drawn uniformly on
    /// `(-pi/2, pi/2)` when `None`.
    pub aod_i: Option<Vec<f64>>,
    pub aod_e: Option<Vec<f64>>,
}

impl SystemConfig {
    /// The evaluation setup used throughout the experiments: 16 antennas, two
    /// IUs at 50 m, two EUs at 5 m, 2 W, 8 bit/s/Hz, -84 dBm noise.
    pub fn reference() -> Self {
        let mut cfg = SystemConfig {
            m: 16,
            k_i: 2,
            k_e: 2,
            p_max: 2.0,
            c_thre: 8.0,
            kappa_i: Vec::new(),
            kappa_e: Vec::new(),
            d_i: Vec::new(),
            d_e: Vec::new(),
            alpha_i: 3.2,
            alpha_e: 2.2,
            l_ref_db: 30.0,
            sigma0_sq: noise_power_from_dbm(-84.0),
            eh: EhParams::reference(),
            rng_seed: 0,
            aod_i: None,
            aod_e: None,
        };
        cfg.kappa_i = alloc::vec![DEFAULT_KAPPA; 2];
        cfg.kappa_e = alloc::vec![DEFAULT_KAPPA; 2];
        cfg.d_i = alloc::vec![50.0; 2];
        cfg.d_e = alloc::vec![5.0; 2];
        cfg
    }

    /// Changes the user counts, extending per-user vectors with their last
    /// value (or the reference default when empty).
    pub fn with_users(mut self, k_i: usize, k_e: usize) -> Self {
        fn resize(v: &mut Vec<f64>, n: usize, fallback: f64) {
            let fill = v.last().copied().unwrap_or(fallback);
            v.resize(n, fill);
        }
        self.k_i = k_i;
        self.k_e = k_e;
        resize(&mut self.kappa_i, k_i, DEFAULT_KAPPA);
        resize(&mut self.kappa_e, k_e, DEFAULT_KAPPA);
        resize(&mut self.d_i, k_i, 50.0);
        resize(&mut self.d_e, k_e, 5.0);
        if let Some(a) = self.aod_i.as_mut() {
            resize(a, k_i, 0.0);
        }
        if let Some(a) = self.aod_e.as_mut() {
            resize(a, k_e, 0.0);
        }
        self
    }

    pub fn with_antennas(mut self, m: usize) -> Self {
        self.m = m;
        self
    }

    /// Sets every Rician factor, IU and EU alike.
    pub fn with_kappa(mut self, kappa: f64) -> Self {
        self.kappa_i.iter_mut().for_each(|k| *k = kappa);
        self.kappa_e.iter_mut().for_each(|k| *k = kappa);
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.m == 0 {
            return Err(Error::config("antenna count must be at least 1"));
        }
        if self.k_i == 0 {
            return Err(Error::config("at least one information user is required"));
        }
        if self.m < self.k_i + self.k_e {
            return Err(Error::config(format!(
                "need M >= K_I + K_E, got M={} K_I={} K_E={}",
                self.m, self.k_i, self.k_e
            )));
        }
        let lens = [
            ("kappa_i", self.kappa_i.len(), self.k_i),
            ("kappa_e", self.kappa_e.len(), self.k_e),
            ("d_i", self.d_i.len(), self.k_i),
            ("d_e", self.d_e.len(), self.k_e),
        ];
        for (name, got, want) in lens {
            if got != want {
                return Err(Error::config(format!("{name} has {got} entries, expected {want}")));
            }
        }
        if let Some(a) = &self.aod_i {
            if a.len() != self.k_i {
                return Err(Error::config("aod_i length must equal K_I"));
            }
        }
        if let Some(a) = &self.aod_e {
            if a.len() != self.k_e {
                return Err(Error::config("aod_e length must equal K_E"));
            }
        }
        let positive = [
            ("p_max", self.p_max),
            ("alpha_i", self.alpha_i),
            ("alpha_e", self.alpha_e),
            ("sigma0_sq", self.sigma0_sq),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::config(format!("{name} must be positive and finite, got {v}")));
            }
        }
        if !(self.c_thre >= 0.0 && self.c_thre.is_finite()) {
            return Err(Error::config("c_thre must be a finite non-negative rate"));
        }
        if !self.l_ref_db.is_finite() {
            return Err(Error::config("l_ref_db must be finite"));
        }
        for &d in self.d_i.iter().chain(&self.d_e) {
            if !(d > 0.0 && d.is_finite()) {
                return Err(Error::config(format!("distances must be positive, got {d}")));
            }
        }
        for &k in self.kappa_i.iter().chain(&self.kappa_e) {
            if !(k >= 0.0) {
                return Err(Error::config(format!("Rician factor must be >= 0, got {k}")));
            }
        }
        self.eh.validate()
    }

    /// The retained ranks `(r_I, r_E) = (K_I - 1, K_I)` that remove all
    /// intra-user and energy-beam interference with the fewest dimensions.
    pub fn default_ranks(&self) -> (usize, usize) {
        (self.k_i - 1, self.k_i)
    }

    /// SINR target `2^C - 1`.
    pub fn sinr_target(&self) -> f64 {
        math::powf(2.0, self.c_thre) - 1.0
    }
}

/// Channel vectors of one realisation. Each `h` is the column vector of the
/// model, so the received signal at a user is `h^H x`. Path loss is kept apart
/// from the small-scale fading.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelSet {
    pub h_i: Vec<CVec>,
    pub h_e: Vec<CVec>,
    /// Linear path-loss gains.
    pub rho_i: Vec<f64>,
    pub rho_e: Vec<f64>,
    /// Angles of departure, radians.
    pub aod_i: Vec<f64>,
    pub aod_e: Vec<f64>,
}

impl ChannelSet {
    pub fn antennas(&self) -> usize {
        self.h_i.first().or(self.h_e.first()).map_or(0, |h| h.len())
    }

    pub fn k_i(&self) -> usize {
        self.h_i.len()
    }

    pub fn k_e(&self) -> usize {
        self.h_e.len()
    }

    /// `H_I` with rows `h_I^{iH}`.
    pub fn h_i_matrix(&self) -> CMat {
        crate::linalg::stack_adjoint_rows(&self.h_i, self.antennas())
    }

    /// `H_E` with rows `h_E^{jH}`.
    pub fn h_e_matrix(&self) -> CMat {
        crate::linalg::stack_adjoint_rows(&self.h_e, self.antennas())
    }

    /// `H_I` with row `i` removed.
    pub fn h_i_without(&self, i: usize) -> CMat {
        let others: Vec<CVec> = self
            .h_i
            .iter()
            .enumerate()
            .filter(|&(k, _)| k != i)
            .map(|(_, h)| h.clone())
            .collect();
        crate::linalg::stack_adjoint_rows(&others, self.antennas())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CsiErrorSpec {
    /// Error level in `[0, 1]`.
    pub rho: f64,
    /// Variance of each error entry.
    pub sigma_h_sq: f64,
}

impl CsiErrorSpec {
    pub fn new(rho: f64) -> Self {
        CsiErrorSpec { rho, sigma_h_sq: 1.0 }
    }
}

/// `10^((x - 30) / 10)` W.
pub fn noise_power_from_dbm(x_dbm: f64) -> f64 {
    math::powf(10.0, (x_dbm - 30.0) / 10.0)
}

/// Linear path-loss gain `10^(-L/10) * d^(-alpha)`.
pub fn path_loss(l_ref_db: f64, distance: f64, alpha: f64) -> f64 {
    math::powf(10.0, -l_ref_db / 10.0) * math::powf(distance, -alpha)
}

/// Unit-norm ULA steering vector with half-wavelength spacing:
/// entry `m` is `exp(i m pi sin(phi)) / sqrt(M)`.
pub fn los_vector(m: usize, aod: f64) -> CVec {
    let phase = PI * math::sin(aod);
    let amp = 1.0 / math::sqrt(m as f64);
    CVec::from_fn(m, |k, _| Complex64::from_polar(amp, phase * k as f64))
}

/// One draw of `CN(0, variance)`.
pub(crate) fn cscg<R: Rng + ?Sized>(rng: &mut R, variance: f64) -> Complex64 {
    let s = math::sqrt(variance / 2.0);
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(s * re, s * im)
}

fn rician_row<R: Rng + ?Sized>(rng: &mut R, m: usize, kappa: f64, aod: f64) -> CVec {
    let (w_los, w_nlos) = if kappa.is_infinite() {
        (1.0, 0.0)
    } else {
        (math::sqrt(kappa / (1.0 + kappa)), math::sqrt(1.0 / (1.0 + kappa)))
    };
    let los = los_vector(m, aod);
    // the scattered part is always drawn so the stream layout does not depend on kappa
    let nlos = CVec::from_fn(m, |_, _| cscg(rng, 1.0));
    los * Complex64::new(w_los, 0.0) + nlos * Complex64::new(w_nlos, 0.0)
}

fn draw_aod<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    let u: f64 = rng.random();
    -FRAC_PI_2 + PI * u
}

/// Draws one channel realisation. Deterministic in `(cfg, seed)`.
///
/// Per user (IUs first, then EUs) the stream yields the angle of departure
/// (unless fixed) followed by the scattered component.
pub fn generate_channels(cfg: &SystemConfig, seed: u64) -> Result<ChannelSet> {
    cfg.validate()?;
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let mut h_i = Vec::with_capacity(cfg.k_i);
    let mut aod_i = Vec::with_capacity(cfg.k_i);
    for i in 0..cfg.k_i {
        let aod = match &cfg.aod_i {
            Some(fixed) => fixed[i],
            None => draw_aod(&mut rng),
        };
        h_i.push(rician_row(&mut rng, cfg.m, cfg.kappa_i[i], aod));
        aod_i.push(aod);
    }
    let mut h_e = Vec::with_capacity(cfg.k_e);
    let mut aod_e = Vec::with_capacity(cfg.k_e);
    for j in 0..cfg.k_e {
        let aod = match &cfg.aod_e {
            Some(fixed) => fixed[j],
            None => draw_aod(&mut rng),
        };
        h_e.push(rician_row(&mut rng, cfg.m, cfg.kappa_e[j], aod));
        aod_e.push(aod);
    }
    let rho_i = cfg.d_i.iter().map(|&d| path_loss(cfg.l_ref_db, d, cfg.alpha_i)).collect();
    let rho_e = cfg.d_e.iter().map(|&d| path_loss(cfg.l_ref_db, d, cfg.alpha_e)).collect();
    Ok(ChannelSet { h_i, h_e, rho_i, rho_e, aod_i, aod_e })
}

/// `H^e = sqrt(1 - rho^2) H + rho H_n` with `H_n` i.i.d. `CN(0, sigma_H^2)`.
/// Path loss and angles are copied unchanged.
pub fn corrupt_csi(ch: &ChannelSet, spec: &CsiErrorSpec, seed: u64) -> Result<ChannelSet> {
    if !(0.0..=1.0).contains(&spec.rho) {
        return Err(Error::config(format!("CSI error level must lie in [0, 1], got {}", spec.rho)));
    }
    if !(spec.sigma_h_sq >= 0.0 && spec.sigma_h_sq.is_finite()) {
        return Err(Error::config("CSI error variance must be finite and non-negative"));
    }
    if spec.rho == 0.0 {
        return Ok(ch.clone());
    }
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let keep = math::sqrt(1.0 - spec.rho * spec.rho);
    let mut corrupt = |h: &CVec| {
        CVec::from_fn(h.len(), |k, _| {
            h[k] * keep + cscg(&mut rng, spec.sigma_h_sq) * spec.rho
        })
    };
    let h_i = ch.h_i.iter().map(&mut corrupt).collect();
    let h_e = ch.h_e.iter().map(&mut corrupt).collect();
    Ok(ChannelSet { h_i, h_e, ..ch.clone() })
}
