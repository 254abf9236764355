use proptest::prelude::*;
use rand::SeedableRng;
use swipt_core::beamform::{BeamformingSolution, Diagnostics, Method};
use swipt_core::energy_harvest::{
    eh_transfer, harvested_dc_estimate, received_rf_power, rf_dc_efficiency, small_signal_efficiency, EhParams,
    SymbolDraw, Waveform,
};
use swipt_core::linalg::CVec;
use swipt_core::system_model::{corrupt_csi, generate_channels, path_loss, ChannelSet, CsiErrorSpec, SystemConfig};
use swipt_core::Complex64;

const DRAWS: u64 = 2000;

fn nlos(m: usize) -> SystemConfig {
    SystemConfig::reference().with_antennas(m)
}

#[test]
fn scattered_channel_energy_is_antenna_count() {
    let cfg = nlos(16);
    let mut sum = 0.0;
    let mut n = 0.0;
    for seed in 0..DRAWS {
        let ch = generate_channels(&cfg, seed).unwrap();
        for h in ch.h_i.iter().chain(&ch.h_e) {
            sum += h.norm_squared();
            n += 1.0;
        }
    }
    // mean of 8000 Gamma(16, 1) draws: standard error 0.045
    assert!((sum / n - 16.0).abs() < 0.25, "{}", sum / n);
}

#[test]
fn path_loss_matches_reference_values() {
    // 30 dB at 1 m, then d^-alpha
    let g = path_loss(30.0, 50.0, 3.2);
    assert!((10.0 * g.log10() - (-30.0 - 32.0 * 50f64.log10())).abs() < 1e-10);
    let ch = generate_channels(&SystemConfig::reference(), 0).unwrap();
    assert!((ch.rho_e[0] - path_loss(30.0, 5.0, 2.2)).abs() < 1e-20);
}

fn corr_stats(rho: f64) -> (f64, f64, f64) {
    // (|E h^H h_e| / M, mean |h_e - sqrt(1 - rho^2) h|^2 / M, E ||h_e||^2 / M)
    let cfg = nlos(8);
    let spec = CsiErrorSpec::new(rho);
    let keep = (1.0 - rho * rho).sqrt();
    let (mut cross, mut err, mut energy, mut n) = (Complex64::new(0.0, 0.0), 0.0, 0.0, 0.0);
    for seed in 0..DRAWS {
        let ch = generate_channels(&cfg, seed).unwrap();
        let bad = corrupt_csi(&ch, &spec, seed + 1_000_000).unwrap();
        for (h, e) in ch.h_i.iter().zip(&bad.h_i) {
            cross += h.dotc(e);
            err += (e - h * Complex64::new(keep, 0.0)).norm_squared();
            energy += e.norm_squared();
            n += 8.0;
        }
    }
    (cross.norm() / n, err / n, energy / n)
}

#[test]
fn full_error_decorrelates() {
    let (cross, err, energy) = corr_stats(1.0);
    assert!(cross < 0.02, "{cross}");
    assert!((err - 1.0).abs() < 0.03);
    assert!((energy - 1.0).abs() < 0.03);
}

#[test]
fn small_error_has_rho_squared_variance() {
    let (cross, err, energy) = corr_stats(0.1);
    assert!((cross - (1.0 - 0.01f64).sqrt()).abs() < 0.03);
    assert!((err - 0.01).abs() < 0.0005, "{err}");
    assert!((energy - 1.0).abs() < 0.03);
}

#[test]
fn zero_error_is_identity() {
    let ch = generate_channels(&SystemConfig::reference(), 3).unwrap();
    assert_eq!(corrupt_csi(&ch, &CsiErrorSpec::new(0.0), 9).unwrap(), ch);
    assert!(corrupt_csi(&ch, &CsiErrorSpec::new(1.5), 9).is_err());
}

proptest! {
    #[test]
    fn transfer_is_monotone_and_bounded(p in 0.0f64..2.0, dp in 0.0f64..0.5) {
        let eh = EhParams::reference();
        let a = eh_transfer(p, &eh).unwrap();
        let b = eh_transfer(p + dp, &eh).unwrap();
        prop_assert!(b >= a);
        prop_assert!((0.0..=eh.ms).contains(&a));
    }

    #[test]
    fn efficiency_never_exceeds_peak(p in 1e-6f64..1.0) {
        let eh = EhParams::reference();
        let e = rf_dc_efficiency(p, &eh).unwrap();
        prop_assert!(e > 0.0 && e <= 1.0);
    }
}

#[test]
fn small_signal_limit() {
    let eh = EhParams::reference();
    let lim = small_signal_efficiency(&eh);
    let e = rf_dc_efficiency(1e-9, &eh).unwrap();
    assert!((e - lim).abs() < 1e-6 * lim);
    assert!(eh_transfer(-1.0, &eh).is_err());
}

/// One IU beam and, optionally, one energy beam, both MRT to EU 0.
fn mrt(ch: &ChannelSet, p_info: f64, p_energy: f64) -> BeamformingSolution {
    let dir = &ch.h_e[0] / Complex64::new(ch.h_e[0].norm(), 0.0);
    let beam = |p: f64| -> CVec { &dir * Complex64::new(p.sqrt(), 0.0) };
    let v = if p_energy > 0.0 { vec![beam(p_energy)] } else { Vec::new() };
    BeamformingSolution {
        w: vec![beam(p_info)],
        v,
        p_i: vec![p_info],
        p_e: if p_energy > 0.0 { vec![p_energy] } else { Vec::new() },
        method: Method::Alg2,
        diagnostics: Diagnostics::default(),
    }
}

#[test]
fn mrt_received_power_oracle() {
    let cfg = SystemConfig::reference().with_users(1, 1);
    let ch = generate_channels(&cfg, 5).unwrap();
    let sol = mrt(&ch, 0.5, 1.5);
    let rf = received_rf_power(&ch, &sol, 0, Waveform::Gaussian, None).unwrap();
    let want = ch.rho_e[0] * 2.0 * ch.h_e[0].norm_squared();
    assert!((rf - want).abs() < 1e-12 * want);
    assert!(received_rf_power(&ch, &sol, 3, Waveform::Gaussian, None).is_err());
}

#[test]
fn symbol_average_matches_deterministic_power() {
    let cfg = SystemConfig::reference().with_users(1, 1);
    let ch = generate_channels(&cfg, 6).unwrap();
    let sol = mrt(&ch, 0.7, 1.3);
    let want = received_rf_power(&ch, &sol, 0, Waveform::Gaussian, None).unwrap();
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
    let n = 100_000;
    let mut sum = 0.0;
    for _ in 0..n {
        let s = SymbolDraw::sample(&mut rng, 1, 1, Waveform::Gaussian);
        sum += received_rf_power(&ch, &sol, 0, Waveform::Gaussian, Some(&s)).unwrap();
    }
    // the sum of two exponentials with weights 0.7, 1.3 has relative sd ~0.76
    assert!((sum / n as f64 - want).abs() < 0.012 * want);
}

/// Scales the beams so EU 0 receives `target` watts on average.
fn at_input(ch: &ChannelSet, target: f64, energy_share: f64) -> BeamformingSolution {
    let unit = ch.rho_e[0] * ch.h_e[0].norm_squared();
    let total = target / unit;
    mrt(ch, total * (1.0 - energy_share), total * energy_share)
}

#[test]
fn standard_error_shrinks_with_sample_size() {
    let cfg = SystemConfig::reference().with_users(1, 1);
    let ch = generate_channels(&cfg, 8).unwrap();
    let sol = at_input(&ch, 0.01, 0.5);
    let eh = EhParams::reference();
    let small = harvested_dc_estimate(&ch, &sol, 0, Waveform::Gaussian, &eh, 2_000, 1).unwrap();
    let large = harvested_dc_estimate(&ch, &sol, 0, Waveform::Gaussian, &eh, 32_000, 1).unwrap();
    let ratio = small.std_err / large.std_err;
    assert!((ratio - 4.0).abs() < 0.4, "{ratio}");
    assert!((small.mean - large.mean).abs() < 3.0 * small.std_err);
}

#[test]
fn fluctuations_help_below_the_knee_and_hurt_above() {
    // The logistic curve is convex well below b and concave above it, so a
    // Gaussian energy symbol (random power) beats a constant envelope at b/4
    // and loses at 2b.
    let cfg = SystemConfig::reference().with_users(1, 1);
    let ch = generate_channels(&cfg, 10).unwrap();
    let eh = EhParams::reference();
    for (input, gaussian_wins) in [(eh.b / 4.0, true), (2.0 * eh.b, false)] {
        let sol = at_input(&ch, input, 0.99);
        let g = harvested_dc_estimate(&ch, &sol, 0, Waveform::Gaussian, &eh, 50_000, 2).unwrap();
        let d = harvested_dc_estimate(&ch, &sol, 0, Waveform::DeterministicSinusoid, &eh, 50_000, 2).unwrap();
        assert_eq!(g.mean > d.mean + 3.0 * (g.std_err + d.std_err), gaussian_wins, "input {input}");
        assert_eq!(d.mean > g.mean + 3.0 * (g.std_err + d.std_err), !gaussian_wins, "input {input}");
    }
}
