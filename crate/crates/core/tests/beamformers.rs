use swipt_core::beamform::{
    capacity_thresholds, evaluate_with, solve_alg1, solve_alg2, solve_benchmark, solve_p24, BeamformingSolution,
    EtaPolicy, EvalOptions,
};
use swipt_core::nullspace::{build_bases, build_equivalents};
use swipt_core::system_model::{corrupt_csi, generate_channels, ChannelSet, CsiErrorSpec, SystemConfig};
use swipt_core::Error;

fn setup(cfg: &SystemConfig, seed: u64) -> (ChannelSet, swipt_core::nullspace::NullSpaceBasis, swipt_core::nullspace::EquivalentChannels) {
    let ch = generate_channels(cfg, seed).unwrap();
    let (r_i, r_e) = cfg.default_ranks();
    let b = build_bases(&ch, r_i, r_e).unwrap();
    let eq = build_equivalents(&ch, &b).unwrap();
    (ch, b, eq)
}

fn no_dc() -> EvalOptions {
    EvalOptions { n_symbols: 0, ..EvalOptions::default() }
}

/// `sum_j |h_E^j^H x|^2` over every beam, the objective every SDR maximises.
fn energy_objective(ch: &ChannelSet, sol: &BeamformingSolution) -> f64 {
    ch.h_e.iter().map(|h| sol.w.iter().chain(&sol.v).map(|b| h.dotc(b).norm_sqr()).sum::<f64>()).sum()
}

#[test]
fn single_pair_matches_planar_optimum() {
    // One IU and one EU: the optimum lies in span(h_I, h_E). With
    // h_E = alpha e1 + beta e2 (e1 along h_I) and w = sqrt(P)(cos t e1 + sin t e2),
    // the harvested term is P (|alpha| cos t + beta sin t)^2, maximised at
    // t* = atan(beta / |alpha|) unless the rate constraint cos^2 t >= c / (P ||h_I||^2)
    // binds first.
    let mut checked = 0;
    for (seed, p_max, c_thre) in [(1u64, 2.0, 8.0), (2, 0.05, 12.0), (3, 10.0, 4.0), (4, 0.2, 10.0)] {
        let mut cfg = SystemConfig::reference().with_antennas(6).with_users(1, 1);
        cfg.p_max = p_max;
        cfg.c_thre = c_thre;
        let (ch, b, eq) = setup(&cfg, seed);
        let sol = match solve_alg1(&ch, &b, &eq, &cfg) {
            Ok(s) => s,
            Err(Error::Infeasible(_)) => continue,
            Err(e) => panic!("{e}"),
        };
        let hi = &ch.h_i[0];
        let he = &ch.h_e[0];
        let e1 = hi / swipt_core::Complex64::new(hi.norm(), 0.0);
        let alpha = e1.dotc(he).norm();
        let beta = (he.norm_squared() - alpha * alpha).max(0.0).sqrt();
        let c = capacity_thresholds(&ch, &cfg)[0];
        let t_star = beta.atan2(alpha);
        let t_max = (c / (p_max * hi.norm_squared())).sqrt().min(1.0).acos();
        let t = t_star.min(t_max);
        let want = p_max * (alpha * t.cos() + beta * t.sin()).powi(2);
        let got = he.dotc(&sol.w[0]).norm_sqr();
        assert!((got - want).abs() <= 1e-6 * want, "seed {seed}: {got} vs {want}");
        checked += 1;
    }
    assert!(checked >= 3, "only {checked} feasible cases");
}

#[test]
fn every_method_meets_capacity_within_budget() {
    for (m, k) in [(8, 2), (16, 2), (16, 4)] {
        let cfg = SystemConfig::reference().with_antennas(m).with_users(k, k);
        for seed in 0..4 {
            let (ch, b, eq) = setup(&cfg, seed);
            let sols = [
                solve_alg1(&ch, &b, &eq, &cfg).unwrap(),
                solve_p24(&ch, &b, &eq, &cfg, &EtaPolicy::default()).unwrap(),
                solve_alg2(&ch, &b, &eq, &cfg).unwrap(),
                solve_benchmark(&ch, &cfg, true).unwrap(),
                solve_benchmark(&ch, &cfg, false).unwrap(),
            ];
            for s in &sols {
                let rep = evaluate_with(&ch, s, &cfg, &no_dc()).unwrap();
                assert!(rep.worst_capacity() >= cfg.c_thre - 1e-6, "{} M={m} K={k}", s.method);
                assert!(s.total_power() <= cfg.p_max * (1.0 + 1e-9), "{} uses {}", s.method, s.total_power());
            }
        }
    }
}

#[test]
fn null_space_beams_cause_no_interference() {
    let cfg = SystemConfig::reference().with_users(3, 3);
    let (ch, b, eq) = setup(&cfg, 9);
    for s in [
        solve_alg1(&ch, &b, &eq, &cfg).unwrap(),
        solve_p24(&ch, &b, &eq, &cfg, &EtaPolicy::default()).unwrap(),
        solve_alg2(&ch, &b, &eq, &cfg).unwrap(),
    ] {
        for (k, h) in ch.h_i.iter().enumerate() {
            let scale = h.norm() * cfg.p_max.sqrt();
            for (i, w) in s.w.iter().enumerate().filter(|(i, _)| *i != k) {
                assert!(h.dotc(w).norm() <= 1e-8 * scale, "{} beam {i} leaks into IU {k}", s.method);
            }
            for v in &s.v {
                assert!(h.dotc(v).norm() <= 1e-8 * scale, "{} energy beam leaks into IU {k}", s.method);
            }
        }
    }
}

#[test]
fn closed_form_meets_rate_with_equality() {
    let cfg = SystemConfig::reference().with_users(3, 2);
    for seed in 0..10 {
        let (ch, b, eq) = setup(&cfg, seed);
        let s = solve_alg2(&ch, &b, &eq, &cfg).unwrap();
        let rep = evaluate_with(&ch, &s, &cfg, &no_dc()).unwrap();
        for c in &rep.capacity {
            assert!((c - cfg.c_thre).abs() <= 1e-9 * cfg.c_thre);
        }
        // P_i = c_i / beta_i with beta_i = ||N_i^H h_i||^2
        let thresholds = capacity_thresholds(&ch, &cfg);
        for ((p, g), c) in s.p_i.iter().zip(&eq.h_ii).zip(&thresholds) {
            assert!((p - c / g.norm_squared()).abs() <= 1e-12 * p);
        }
        assert!((s.total_power() - cfg.p_max).abs() <= 1e-9 * cfg.p_max);
        assert_eq!(s.v.len(), 1);
    }
}

#[test]
fn closed_form_reports_power_shortfall() {
    let mut cfg = SystemConfig::reference();
    cfg.p_max = 1e-9;
    let (ch, b, eq) = setup(&cfg, 0);
    match solve_alg2(&ch, &b, &eq, &cfg) {
        Err(Error::Infeasible(msg)) => assert!(msg.contains("power shortfall")),
        other => panic!("expected a shortfall, got {other:?}"),
    }
    assert!(matches!(solve_alg1(&ch, &b, &eq, &cfg), Err(Error::Infeasible(_))));
    assert!(matches!(solve_benchmark(&ch, &cfg, true), Err(Error::Infeasible(_))));
}

#[test]
fn unit_reward_leaves_energy_covariance_empty() {
    let cfg = SystemConfig::reference();
    for seed in 0..5 {
        let (ch, b, eq) = setup(&cfg, seed);
        let s = solve_p24(&ch, &b, &eq, &cfg, &EtaPolicy::fixed(1.0)).unwrap();
        assert!(s.diagnostics.energy_trace.unwrap() <= 1e-6 * cfg.p_max);
        let rewarded = solve_p24(&ch, &b, &eq, &cfg, &EtaPolicy::default()).unwrap();
        assert!(rewarded.diagnostics.energy_trace.unwrap() > 0.1 * cfg.p_max);
        assert!(rewarded.diagnostics.eta.unwrap() > 10.0);
    }
}

#[test]
fn benchmark_is_an_upper_bound() {
    let cfg = SystemConfig::reference();
    for seed in 0..5 {
        let (ch, b, eq) = setup(&cfg, seed);
        let bench = energy_objective(&ch, &solve_benchmark(&ch, &cfg, true).unwrap());
        let no_v = energy_objective(&ch, &solve_benchmark(&ch, &cfg, false).unwrap());
        let alg1 = energy_objective(&ch, &solve_alg1(&ch, &b, &eq, &cfg).unwrap());
        assert!(bench >= alg1 * (1.0 - 1e-6));
        assert!((bench - no_v).abs() <= 1e-6 * bench);
    }
}

#[test]
fn single_iu_benchmark_equals_alg1() {
    let cfg = SystemConfig::reference().with_users(1, 3);
    let (ch, b, eq) = setup(&cfg, 12);
    let bench = energy_objective(&ch, &solve_benchmark(&ch, &cfg, true).unwrap());
    let alg1 = energy_objective(&ch, &solve_alg1(&ch, &b, &eq, &cfg).unwrap());
    assert!((bench - alg1).abs() <= 1e-6 * bench);
}

#[test]
fn harvested_objective_is_monotone_in_budget_and_demand() {
    let base = SystemConfig::reference();
    let (ch, b, eq) = setup(&base, 21);
    let value = |p: f64, c: f64| {
        let mut cfg = base.clone();
        cfg.p_max = p;
        cfg.c_thre = c;
        energy_objective(&ch, &solve_alg1(&ch, &b, &eq, &cfg).unwrap())
    };
    let by_p: Vec<f64> = [1.0, 2.0, 4.0, 8.0].iter().map(|&p| value(p, 8.0)).collect();
    assert!(by_p.windows(2).all(|w| w[1] >= w[0] * (1.0 - 1e-7)));
    let by_c: Vec<f64> = [2.0, 6.0, 10.0, 12.0].iter().map(|&c| value(8.0, c)).collect();
    assert!(by_c.windows(2).all(|w| w[1] <= w[0] * (1.0 + 1e-7)));
}

#[test]
fn csi_error_grows_leakage() {
    let cfg = SystemConfig::reference().with_users(3, 2);
    let mut totals = [0.0; 3];
    for seed in 0..20 {
        let (ch, b, eq) = setup(&cfg, seed);
        let s = solve_alg1(&ch, &b, &eq, &cfg).unwrap();
        for (t, rho) in totals.iter_mut().zip([0.0, 0.1, 0.3]) {
            let bad = corrupt_csi(&ch, &CsiErrorSpec::new(rho), 1000 + seed).unwrap();
            for (k, h) in bad.h_i.iter().enumerate() {
                *t += s.w.iter().enumerate().filter(|(i, _)| *i != k).map(|(_, w)| h.dotc(w).norm_sqr()).sum::<f64>();
            }
        }
    }
    assert!(totals[0] < 1e-12 * totals[1]);
    assert!(totals[2] > 4.0 * totals[1]);
}

#[test]
fn shape_mismatch_is_rejected() {
    let cfg = SystemConfig::reference();
    let (ch, b, eq) = setup(&cfg, 0);
    let other = SystemConfig::reference().with_antennas(8);
    assert!(matches!(solve_alg1(&ch, &b, &eq, &other), Err(Error::Shape(_))));
    assert!(matches!(solve_benchmark(&ch, &other, true), Err(Error::Shape(_))));
}
