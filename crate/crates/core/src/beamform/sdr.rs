use alloc::format;
use alloc::vec::Vec;

use super::{
    capacity_thresholds, lift_to_threshold, split_covariance, BeamformingSolution, Diagnostics, EtaPolicy, Method,
    SolverOptions, RANK_WARNING, STRICT_MARGIN,
};
use crate::linalg::{self, CMat, CVec};
use crate::nullspace::{self, EquivalentChannels, NullSpaceBasis};
use crate::sdp::{self, Constraint, SdpProblem, SdpSolution, Sense, SolveStatus};
use crate::system_model::{ChannelSet, SystemConfig};
use crate::{Error, Result};

fn check_inputs(ch: &ChannelSet, basis: &NullSpaceBasis, eq: &EquivalentChannels, cfg: &SystemConfig) -> Result<()> {
    if ch.antennas() != cfg.m || ch.k_i() != cfg.k_i || ch.k_e() != cfg.k_e {
        return Err(Error::shape("channel dimensions differ from the configuration"));
    }
    if basis.n_i.len() != ch.k_i() || eq.s_ei.len() != ch.k_i() || eq.h_ii.len() != ch.k_i() {
        return Err(Error::shape("null-space data does not match the IU count"));
    }
    if !(cfg.p_max > 0.0) {
        return Err(Error::config("p_max must be positive"));
    }
    Ok(())
}

fn run_sdp(prob: &SdpProblem, opts: &SolverOptions, what: &str) -> Result<SdpSolution> {
    let sol = sdp::solve(prob, opts.tol, opts.max_iter)?;
    match sol.status {
        SolveStatus::Optimal => Ok(sol),
        SolveStatus::Infeasible => Err(Error::Infeasible(format!(
            "{what}: the capacity requirements cannot be met within the power budget"
        ))),
        SolveStatus::MaxIter => Err(Error::NotConverged(format!(
            "{what}: no certificate after {} iterations",
            sol.iterations
        ))),
    }
}

fn base_diagnostics(sol: &SdpSolution) -> Diagnostics {
    Diagnostics {
        status: Some(sol.status),
        duality_gap: Some(sol.duality_gap),
        iterations: Some(sol.iterations),
        objective: Some(sol.objective_value),
        ..Diagnostics::default()
    }
}

/// Rank-one factors of the information covariances mapped through `basis`.
fn info_beams(blocks: &[CMat], basis: Option<&[CMat]>, diag: &mut Diagnostics) -> Result<Vec<CVec>> {
    let mut w = Vec::with_capacity(blocks.len());
    for (i, b) in blocks.iter().enumerate() {
        let r = sdp::extract_rank1(b)?;
        if r.residual_ratio > RANK_WARNING {
            diag.warnings.push(format!("information covariance {i} has rank residual {:e}", r.residual_ratio));
        }
        diag.rank_ratios.push(r.residual_ratio);
        let mut beam = match basis {
            Some(n) => &n[i] * r.vector,
            None => r.vector,
        };
        linalg::normalize_phase(&mut beam);
        w.push(beam);
    }
    Ok(w)
}

/// Blocks `B_1..B_K` (and optionally `D`) with the IU capacity rows and the
/// total-power row.
fn null_space_problem(ch: &ChannelSet, eq: &EquivalentChannels, cfg: &SystemConfig, eta: Option<f64>) -> SdpProblem {
    let k_i = ch.k_i();
    let mut dims: Vec<usize> = eq.s_ei.iter().map(|s| s.nrows()).collect();
    if eta.is_some() {
        dims.push(eq.s_e.nrows());
    }
    let nb = dims.len();
    let mut prob = SdpProblem::new(dims.clone());
    for (o, s) in prob.objective.iter_mut().zip(&eq.s_ei) {
        *o = s.clone();
    }
    if let Some(eta) = eta {
        prob.objective[k_i] = linalg::scale(&eq.s_e, eta);
    }
    for (k, c) in capacity_thresholds(ch, cfg).into_iter().enumerate() {
        let mut coeffs = alloc::vec![None; nb];
        coeffs[k] = Some(linalg::outer(&eq.h_ii[k]));
        prob.push(Constraint::new(coeffs, Sense::Ge, c * (1.0 + STRICT_MARGIN)));
    }
    let power = dims.iter().map(|&n| Some(linalg::identity(n))).collect();
    prob.push(Constraint::new(power, Sense::Le, cfg.p_max));
    prob
}

/// Null-space SDR without energy beams, solved at default solver settings.
pub fn solve_alg1(
    ch: &ChannelSet,
    basis: &NullSpaceBasis,
    eq: &EquivalentChannels,
    cfg: &SystemConfig,
) -> Result<BeamformingSolution> {
    solve_alg1_with(ch, basis, eq, cfg, &SolverOptions::default())
}

pub fn solve_alg1_with(
    ch: &ChannelSet,
    basis: &NullSpaceBasis,
    eq: &EquivalentChannels,
    cfg: &SystemConfig,
    opts: &SolverOptions,
) -> Result<BeamformingSolution> {
    check_inputs(ch, basis, eq, cfg)?;
    let prob = null_space_problem(ch, eq, cfg, None);
    let sol = run_sdp(&prob, opts, "alg1")?;
    let mut diag = base_diagnostics(&sol);
    let mut w = info_beams(&sol.blocks, Some(&basis.n_i), &mut diag)?;
    lift_to_threshold(&mut w, ch, &capacity_thresholds(ch, cfg));
    Ok(BeamformingSolution::assemble(Method::Alg1, w, Vec::new(), diag))
}

/// Null-space SDR with a shared energy covariance `D` rewarded by `eta`.
pub fn solve_p24(
    ch: &ChannelSet,
    basis: &NullSpaceBasis,
    eq: &EquivalentChannels,
    cfg: &SystemConfig,
    pol: &EtaPolicy,
) -> Result<BeamformingSolution> {
    solve_p24_with(ch, basis, eq, cfg, pol, &SolverOptions::default())
}

pub fn solve_p24_with(
    ch: &ChannelSet,
    basis: &NullSpaceBasis,
    eq: &EquivalentChannels,
    cfg: &SystemConfig,
    pol: &EtaPolicy,
    opts: &SolverOptions,
) -> Result<BeamformingSolution> {
    check_inputs(ch, basis, eq, cfg)?;
    let eta = pol.eta(&eq.s_ei, &eq.s_e)?;
    let prob = null_space_problem(ch, eq, cfg, Some(eta));
    let sol = run_sdp(&prob, opts, "p24")?;
    let mut diag = base_diagnostics(&sol);
    diag.eta = Some(eta);
    let k_i = ch.k_i();
    let mut w = info_beams(&sol.blocks[..k_i], Some(&basis.n_i), &mut diag)?;
    lift_to_threshold(&mut w, ch, &capacity_thresholds(ch, cfg));
    let d = &sol.blocks[k_i];
    diag.energy_trace = Some(linalg::real_trace(d));
    let v = split_covariance(d, Some(&basis.n_e));
    Ok(BeamformingSolution::assemble(Method::P24, w, v, diag))
}

/// SDR over full covariances with explicit interference terms.
pub fn solve_benchmark(ch: &ChannelSet, cfg: &SystemConfig, with_v: bool) -> Result<BeamformingSolution> {
    solve_benchmark_with(ch, cfg, with_v, &SolverOptions::default())
}

pub fn solve_benchmark_with(
    ch: &ChannelSet,
    cfg: &SystemConfig,
    with_v: bool,
    opts: &SolverOptions,
) -> Result<BeamformingSolution> {
    let m = ch.antennas();
    let k_i = ch.k_i();
    if m != cfg.m || k_i != cfg.k_i || ch.k_e() != cfg.k_e {
        return Err(Error::shape("channel dimensions differ from the configuration"));
    }
    let nb = k_i + usize::from(with_v);
    let mut prob = SdpProblem::new(alloc::vec![m; nb]);
    let s = nullspace::energy_gram(ch);
    for o in prob.objective.iter_mut() {
        *o = s.clone();
    }
    let target = cfg.sinr_target();
    for (i, h) in ch.h_i.iter().enumerate() {
        let hh = linalg::outer(h);
        let coeffs = (0..nb)
            .map(|b| Some(if b == i { linalg::scale(&hh, 1.0 / target) } else { -hh.clone() }))
            .collect();
        let floor = cfg.sigma0_sq / ch.rho_i[i];
        prob.push(Constraint::new(coeffs, Sense::Ge, floor * (1.0 + STRICT_MARGIN)));
    }
    prob.push(Constraint::new(alloc::vec![Some(linalg::identity(m)); nb], Sense::Le, cfg.p_max));
    let method = if with_v { Method::Benchmark } else { Method::BenchmarkNoV };
    let sol = run_sdp(&prob, opts, method.name())?;
    let mut diag = base_diagnostics(&sol);
    let w = info_beams(&sol.blocks[..k_i], None, &mut diag)?;
    let v = if with_v {
        diag.energy_trace = Some(linalg::real_trace(&sol.blocks[k_i]));
        split_covariance(&sol.blocks[k_i], None)
    } else {
        Vec::new()
    };
    Ok(BeamformingSolution::assemble(method, w, v, diag))
}
