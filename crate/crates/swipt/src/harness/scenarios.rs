//! Built-in scenarios at desk scale.

use swipt_core::beamform::{EtaPolicy, SolverOptions};
use swipt_core::system_model::SystemConfig;

use super::{Param, Scenario, ScenarioKind, Strategy, SweepPoint};

pub const DEFAULT_TRIALS: usize = 200;
pub const TAB4_TRIALS: usize = 500;
/// Symbol periods per harvested-DC estimate.
pub const DC_SYMBOLS: usize = 10_000;

/// `(name, description)` of every built-in scenario.
pub const NAMES: [(&str, &str); 8] = [
    ("fig4_fig5_rank_sweep", "P22 over (r_I, r_E) grids at M=16, K=4, P in {2,4,8} W"),
    ("capacity_demand", "Alg. 1 over C_thre in 2..12 bps/Hz, kappa in {0, inf}, P in {2,8} W"),
    ("user_count", "Alg. 1 and benchmark over K = 1..7, P in {2,4,8} W, kappa in {0,5}"),
    ("fig6_csi_error", "Alg. 1 designed on nominal CSI, rho in {0,0.05,0.1,0.2}, P in {2,8} W, K in {2,4}"),
    ("fig7_transmit_power", "Alg. 1, P24 and benchmark over P in 1..10 W, M in {8,16,32}"),
    ("fig8_eh_efficiency", "RF-to-DC transfer and efficiency of the logistic EH model"),
    ("fig9_waveform", "harvested DC, Gaussian (Alg. 1) against DSW (Alg. 2, P24), P in 1..128 W, M in {16,32}"),
    ("tab4_power_ratio", "Alg. 2 energy-to-information power ratio, P in 1..10 W, M in {16,32}, K in {2,4}"),
];

fn scenario(name: &str, base: SystemConfig, points: Vec<SweepPoint>, strategies: Vec<Strategy>) -> Scenario {
    let description = NAMES.iter().find(|(n, _)| *n == name).map(|(_, d)| d.to_string()).unwrap_or_default();
    Scenario {
        name: name.to_string(),
        description,
        kind: ScenarioKind::MonteCarlo,
        seed: base.rng_seed,
        base,
        points,
        strategies,
        n_trials: DEFAULT_TRIALS,
        n_symbols: 0,
        solver: SolverOptions::default(),
        eta: EtaPolicy::default(),
        metrics: Vec::new(),
    }
}

fn fmt_kappa(k: f64) -> String {
    if k.is_infinite() { "inf".into() } else { format!("{k}") }
}

fn rank_sweep() -> Scenario {
    let base = SystemConfig::reference().with_users(4, 4);
    let mut points = Vec::new();
    for p in [2.0, 4.0, 8.0] {
        for ri in 1..=6 {
            for re in 1..=6 {
                points.push(SweepPoint::new(
                    format!("P={p};rI={ri};rE={re}"),
                    re as f64,
                    format!("P={p};rI={ri}"),
                    vec![Param::PMax(p), Param::Ranks(ri, re)],
                ));
            }
        }
    }
    let mut sc = scenario("fig4_fig5_rank_sweep", base, points, vec![Strategy::P22]);
    sc.metrics = ["worst_capacity", "qos_met", "rf_total", "energy_fraction"].map(String::from).to_vec();
    sc
}

fn capacity_demand() -> Scenario {
    let mut points = Vec::new();
    for kappa in [0.0, f64::INFINITY] {
        for p in [2.0, 8.0] {
            for c in [2.0, 4.0, 6.0, 8.0, 10.0, 12.0] {
                let k = fmt_kappa(kappa);
                points.push(SweepPoint::new(
                    format!("kappa={k};P={p};C={c}"),
                    c,
                    format!("kappa={k};P={p}"),
                    vec![Param::Kappa(kappa), Param::PMax(p), Param::CThre(c)],
                ));
            }
        }
    }
    scenario("capacity_demand", SystemConfig::reference(), points, vec![Strategy::Alg1])
}

fn user_count() -> Scenario {
    let mut points = Vec::new();
    for kappa in [0.0, 5.0] {
        for p in [2.0, 4.0, 8.0] {
            for k in 1..=7 {
                points.push(SweepPoint::new(
                    format!("kappa={kappa};P={p};K={k}"),
                    k as f64,
                    format!("kappa={kappa};P={p}"),
                    vec![Param::Users(k, k), Param::Kappa(kappa), Param::PMax(p)],
                ));
            }
        }
    }
    scenario("user_count", SystemConfig::reference(), points, vec![Strategy::Alg1, Strategy::Benchmark])
}

/// CSI error levels of the mismatch study.
pub const CSI_RHOS: [f64; 4] = [0.0, 0.05, 0.1, 0.2];

fn csi_error() -> Scenario {
    let mut points = Vec::new();
    for k in [2, 4] {
        for p in [2.0, 8.0] {
            for rho in CSI_RHOS {
                points.push(SweepPoint::new(
                    format!("K={k};P={p};rho={rho}"),
                    rho,
                    format!("K={k};P={p}"),
                    vec![Param::Users(k, k), Param::PMax(p), Param::Rho(rho)],
                ));
            }
        }
    }
    let mut sc = scenario("fig6_csi_error", SystemConfig::reference(), points, vec![Strategy::Alg1]);
    sc.metrics = ["worst_capacity", "mean_capacity", "qos_met", "rf_total", "leakage_inr"].map(String::from).to_vec();
    sc
}

fn transmit_power() -> Scenario {
    let mut points = Vec::new();
    for m in [8, 16, 32] {
        for p in [1.0, 2.0, 4.0, 6.0, 8.0, 10.0] {
            points.push(SweepPoint::new(
                format!("M={m};P={p}"),
                p,
                format!("M={m}"),
                vec![Param::Antennas(m), Param::PMax(p)],
            ));
        }
    }
    scenario(
        "fig7_transmit_power",
        SystemConfig::reference(),
        points,
        vec![Strategy::Alg1, Strategy::P24, Strategy::Benchmark],
    )
}

fn eh_efficiency() -> Scenario {
    // 10 uW to 1 W, ten points per decade
    let points = (0..=50)
        .map(|k| {
            let p = 1e-5 * 10f64.powf(k as f64 / 10.0);
            SweepPoint::new(format!("Pin={p:.4e}"), p, "logistic", Vec::new())
        })
        .collect();
    let mut sc = scenario("fig8_eh_efficiency", SystemConfig::reference(), points, Vec::new());
    sc.kind = ScenarioKind::EfficiencyCurve;
    sc.n_trials = 1;
    sc
}

/// Transmit powers of the waveform comparison, in W.
pub const WAVEFORM_POWERS: [f64; 8] = [1.0, 2.0, 4.0, 8.0, 16.0, 32.0, 64.0, 128.0];

fn waveform() -> Scenario {
    let mut points = Vec::new();
    for m in [16, 32] {
        for p in WAVEFORM_POWERS {
            points.push(SweepPoint::new(
                format!("M={m};P={p}"),
                p,
                format!("M={m}"),
                vec![Param::Antennas(m), Param::PMax(p)],
            ));
        }
    }
    let mut sc = scenario(
        "fig9_waveform",
        SystemConfig::reference(),
        points,
        vec![Strategy::Alg1, Strategy::Alg2, Strategy::P24],
    );
    sc.n_symbols = DC_SYMBOLS;
    sc.metrics = ["worst_capacity", "rf_total", "dc_total", "energy_fraction"].map(String::from).to_vec();
    sc
}

fn power_ratio() -> Scenario {
    let mut points = Vec::new();
    for m in [16, 32] {
        for k in [2, 4] {
            for p in 1..=10 {
                let p = p as f64;
                points.push(SweepPoint::new(
                    format!("M={m};K={k};P={p}"),
                    p,
                    format!("M={m};K={k}"),
                    vec![Param::Antennas(m), Param::Users(k, k), Param::PMax(p)],
                ));
            }
        }
    }
    let mut sc = scenario("tab4_power_ratio", SystemConfig::reference(), points, vec![Strategy::Alg2]);
    sc.n_trials = TAB4_TRIALS;
    sc.metrics = vec!["power_ratio_db".into()];
    sc
}

/// Built-in scenario by name, with its default trial count and seed.
pub fn named(name: &str) -> Option<Scenario> {
    Some(match name {
        "fig4_fig5_rank_sweep" => rank_sweep(),
        "capacity_demand" => capacity_demand(),
        "user_count" => user_count(),
        "fig6_csi_error" => csi_error(),
        "fig7_transmit_power" => transmit_power(),
        "fig8_eh_efficiency" => eh_efficiency(),
        "fig9_waveform" => waveform(),
        "tab4_power_ratio" => power_ratio(),
        _ => return None,
    })
}
