//! TOML configuration files.
//!
//! ```toml
//! [system]
//! m = 16
//! k_i = 2
//! k_e = 2
//! p_max = 2.0
//! c_thre = 8.0
//! sigma0_dbm = -84.0      # or sigma0_sq in watts
//! rng_seed = 0
//!
//! [channel]
//! kappa_i = 0.0           # one value for every user, or one per user
//! kappa_e = [0.0, inf]    # `inf` (or "inf") gives a pure line-of-sight row
//! d_i = 50.0
//! d_e = 5.0
//! alpha_i = 3.2
//! alpha_e = 2.2
//! l_ref_db = 30.0
//! aod_i = [0.1, -0.4]     # optional, radians
//!
//! [eh]
//! a = 150.0
//! b = 0.024
//! ms = 0.024
//!
//! [solver]
//! tol = 1e-9
//! max_iter = 100
//! delta = 10.0            # eta = bound + delta for p24
//! eta = 1.0               # optional explicit eta
//!
//! [csi]
//! rho = 0.1
//! sigma_h_sq = 1.0
//! ```
//!
//! Every key is optional; missing keys keep the reference setup.
//! A `[scenario]` table turns the file into a scenario definition, see
//! [`crate::harness::Scenario::from_file`].

use std::path::Path;

use serde::Deserialize;
use swipt_core::beamform::{EtaPolicy, SolverOptions};
use swipt_core::energy_harvest::EhParams;
use swipt_core::system_model::{noise_power_from_dbm, CsiErrorSpec, SystemConfig};

use crate::AppError;

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
enum Num {
    Float(f64),
    Int(i64),
    Text(String),
}

impl Num {
    fn value(&self, key: &str) -> Result<f64, AppError> {
        match self {
            Num::Float(v) => Ok(*v),
            Num::Int(v) => Ok(*v as f64),
            Num::Text(s) => match s.trim().to_ascii_lowercase().as_str() {
                "inf" | "+inf" | "infinity" => Ok(f64::INFINITY),
                other => other
                    .parse()
                    .map_err(|_| AppError::Config(format!("{key}: cannot read {s:?} as a number"))),
            },
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
enum PerUser {
    One(Num),
    Many(Vec<Num>),
}

impl PerUser {
    fn expand(&self, key: &str, n: usize) -> Result<Vec<f64>, AppError> {
        match self {
            PerUser::One(v) => Ok(vec![v.value(key)?; n]),
            PerUser::Many(vs) => {
                if vs.len() != n {
                    return Err(AppError::Config(format!("{key} lists {} values for {n} users", vs.len())));
                }
                vs.iter().map(|v| v.value(key)).collect()
            }
        }
    }
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSystem {
    m: Option<usize>,
    k_i: Option<usize>,
    k_e: Option<usize>,
    p_max: Option<f64>,
    c_thre: Option<f64>,
    sigma0_sq: Option<f64>,
    sigma0_dbm: Option<f64>,
    rng_seed: Option<u64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawChannel {
    kappa_i: Option<PerUser>,
    kappa_e: Option<PerUser>,
    d_i: Option<PerUser>,
    d_e: Option<PerUser>,
    alpha_i: Option<f64>,
    alpha_e: Option<f64>,
    l_ref_db: Option<f64>,
    aod_i: Option<PerUser>,
    aod_e: Option<PerUser>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawEh {
    a: Option<f64>,
    b: Option<f64>,
    ms: Option<f64>,
    p0: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSolver {
    tol: Option<f64>,
    max_iter: Option<usize>,
    delta: Option<f64>,
    eta: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawCsi {
    rho: f64,
    sigma_h_sq: Option<f64>,
}

/// `[scenario]` table.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawScenario {
    pub name: String,
    pub methods: Vec<String>,
    /// Swept parameter, e.g. `p_max`, `c_thre`, `m`, `k`, `kappa`, `rho`.
    pub sweep: String,
    pub values: Vec<f64>,
    pub trials: Option<usize>,
    pub n_symbols: Option<usize>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawFile {
    system: Option<RawSystem>,
    channel: Option<RawChannel>,
    eh: Option<RawEh>,
    solver: Option<RawSolver>,
    csi: Option<RawCsi>,
    scenario: Option<RawScenario>,
}

/// Everything a configuration file can specify.
#[derive(Debug, Clone)]
pub struct FileConfig {
    pub system: SystemConfig,
    pub solver: SolverOptions,
    pub eta: EtaPolicy,
    pub csi: Option<CsiErrorSpec>,
    pub scenario: Option<RawScenario>,
}

pub fn load(path: &Path) -> Result<FileConfig, AppError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| AppError::Config(format!("cannot read {}: {e}", path.display())))?;
    parse(&text)
}

pub fn parse(text: &str) -> Result<FileConfig, AppError> {
    let raw: RawFile = toml::from_str(text).map_err(|e| AppError::Config(e.to_string()))?;
    let sys = raw.system.unwrap_or_default();
    let mut cfg = SystemConfig::reference();
    if let Some(m) = sys.m {
        cfg.m = m;
    }
    let (ki, ke) = (sys.k_i.unwrap_or(cfg.k_i), sys.k_e.unwrap_or(cfg.k_e));
    cfg = cfg.with_users(ki, ke);
    if let Some(v) = sys.p_max {
        cfg.p_max = v;
    }
    if let Some(v) = sys.c_thre {
        cfg.c_thre = v;
    }
    match (sys.sigma0_sq, sys.sigma0_dbm) {
        (Some(_), Some(_)) => {
            return Err(AppError::Config("give either sigma0_sq or sigma0_dbm, not both".into()));
        }
        (Some(w), None) => cfg.sigma0_sq = w,
        (None, Some(dbm)) => cfg.sigma0_sq = noise_power_from_dbm(dbm),
        (None, None) => {}
    }
    if let Some(s) = sys.rng_seed {
        cfg.rng_seed = s;
    }

    let ch = raw.channel.unwrap_or_default();
    let (ki, ke) = (cfg.k_i, cfg.k_e);
    if let Some(v) = &ch.kappa_i {
        cfg.kappa_i = v.expand("kappa_i", ki)?;
    }
    if let Some(v) = &ch.kappa_e {
        cfg.kappa_e = v.expand("kappa_e", ke)?;
    }
    if let Some(v) = &ch.d_i {
        cfg.d_i = v.expand("d_i", ki)?;
    }
    if let Some(v) = &ch.d_e {
        cfg.d_e = v.expand("d_e", ke)?;
    }
    if let Some(v) = &ch.aod_i {
        cfg.aod_i = Some(v.expand("aod_i", ki)?);
    }
    if let Some(v) = &ch.aod_e {
        cfg.aod_e = Some(v.expand("aod_e", ke)?);
    }
    if let Some(v) = ch.alpha_i {
        cfg.alpha_i = v;
    }
    if let Some(v) = ch.alpha_e {
        cfg.alpha_e = v;
    }
    if let Some(v) = ch.l_ref_db {
        cfg.l_ref_db = v;
    }

    let eh = raw.eh.unwrap_or_default();
    let base = EhParams::reference();
    cfg.eh = EhParams {
        a: eh.a.unwrap_or(base.a),
        b: eh.b.unwrap_or(base.b),
        ms: eh.ms.unwrap_or(base.ms),
        p0: eh.p0.unwrap_or(base.p0),
    };
    cfg.validate()?;

    let s = raw.solver.unwrap_or_default();
    let defaults = SolverOptions::default();
    let solver = SolverOptions { tol: s.tol.unwrap_or(defaults.tol), max_iter: s.max_iter.unwrap_or(defaults.max_iter) };
    if !(solver.tol > 0.0 && solver.tol < 1.0) {
        return Err(AppError::Config(format!("solver tol must lie in (0, 1), got {}", solver.tol)));
    }
    let eta = EtaPolicy { delta: s.delta.unwrap_or(EtaPolicy::default().delta), explicit_eta: s.eta };
    if !(eta.delta > 0.0) {
        return Err(AppError::Config("solver delta must be positive".into()));
    }

    let csi = match raw.csi {
        Some(c) => {
            let spec = CsiErrorSpec { rho: c.rho, sigma_h_sq: c.sigma_h_sq.unwrap_or(1.0) };
            if !(0.0..=1.0).contains(&spec.rho) {
                return Err(AppError::Config(format!("csi rho must lie in [0, 1], got {}", spec.rho)));
            }
            Some(spec)
        }
        None => None,
    };
    Ok(FileConfig { system: cfg, solver, eta, csi, scenario: raw.scenario })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_file_is_reference() {
        let f = parse("").unwrap();
        assert_eq!(f.system, SystemConfig::reference());
        assert!(f.csi.is_none());
    }

    #[test]
    fn scalar_and_list_users() {
        let f = parse(
            "[system]\nk_i = 3\nk_e = 1\n[channel]\nkappa_i = [0, 5, inf]\nkappa_e = \"inf\"\nd_e = 7\n",
        )
        .unwrap();
        assert_eq!(f.system.kappa_i, vec![0.0, 5.0, f64::INFINITY]);
        assert_eq!(f.system.kappa_e, vec![f64::INFINITY]);
        assert_eq!(f.system.d_e, vec![7.0]);
        assert_eq!(f.system.d_i, vec![50.0; 3]);
    }

    #[test]
    fn noise_in_dbm() {
        let f = parse("[system]\nsigma0_dbm = 0\n").unwrap();
        assert!((f.system.sigma0_sq - 1e-3).abs() < 1e-18);
        assert!(parse("[system]\nsigma0_dbm = 0\nsigma0_sq = 1e-3\n").is_err());
    }

    #[test]
    fn rejects_bad_input() {
        assert!(parse("[system]\nbogus = 1\n").is_err());
        assert!(parse("[channel]\nkappa_i = [1, 2, 3]\n").is_err());
        assert!(parse("[system]\nm = 3\n").is_err());
        assert!(parse("[csi]\nrho = 1.5\n").is_err());
        assert!(parse("[channel]\nd_i = \"far\"\n").is_err());
        assert!(parse("[solver]\ntol = 0\n").is_err());
    }
}
