//! Phase-one search for a strictly feasible point.
//!
//! With `X = X' + t I`, `X' PSD`, the auxiliary problem maximises the margin
//! `t` subject to every row holding with slack `t w_c`, where
//! `w_c = 1 + sum_b sqrt(n_b) ||A_cb||_F`. A positive optimum means some
//! `X >= t I` satisfies all rows strictly. Writing `t = u - T0` with `u >= 0`
//! and `T0 = 1 + max |b_c|` makes the auxiliary problem strictly feasible at
//! `X' = u = small`, so the same interior-point code applies. `t` is capped at
//! 1 and a tiny `tr X'` penalty keeps the problem bounded.

use alloc::vec::Vec;

use num_complex::Complex64;

use super::ipm::{run, Scaled};
use super::{Constraint, SdpProblem, Sense};
use crate::linalg::{self, CMat};
use crate::math;

const PROBE_TOL: f64 = 1e-9;
const PROBE_MAX_ITER: usize = 200;
const PENALTY: f64 = 1e-6;

/// `true` iff a strictly feasible point exists. Invalid problems are reported
/// as infeasible.
pub fn feasibility_probe(prob: &SdpProblem) -> bool {
    if prob.validate().is_err() {
        return false;
    }
    if prob.constraints.is_empty() {
        return true;
    }
    let t0 = 1.0 + prob.constraints.iter().map(|c| c.bound.abs()).fold(0.0, f64::max);
    match strict_margin(prob, t0) {
        Some(t) => t > 1e-8 * t0,
        None => false,
    }
}

/// Optimal margin `t`, or `None` when the auxiliary solve does not converge.
fn strict_margin(prob: &SdpProblem, t0: f64) -> Option<f64> {
    let nb = prob.blocks.len();
    let mut blocks = prob.blocks.clone();
    blocks.push(1);
    let mut aux = SdpProblem::new(blocks);
    for (o, &n) in aux.objective.iter_mut().zip(&prob.blocks) {
        *o = linalg::scale(&linalg::identity(n), -PENALTY);
    }
    aux.objective[nb] = linalg::identity(1);
    let one = |v: f64| CMat::from_element(1, 1, Complex64::new(v, 0.0));
    for con in &prob.constraints {
        let tr: f64 = con.coeffs.iter().flatten().map(linalg::real_trace).sum();
        let w = 1.0
            + con
                .coeffs
                .iter()
                .zip(&prob.blocks)
                .filter_map(|(a, &n)| a.as_ref().map(|a| math::sqrt(n as f64) * a.norm()))
                .sum::<f64>();
        let coef = match con.sense {
            Sense::Le => tr + w,
            Sense::Ge => tr - w,
        };
        let mut coeffs: Vec<Option<CMat>> = con.coeffs.clone();
        coeffs.push(Some(one(coef)));
        aux.push(Constraint::new(coeffs, con.sense, con.bound + t0 * coef));
    }
    let mut cap: Vec<Option<CMat>> = alloc::vec![None; nb];
    cap.push(Some(one(1.0)));
    aux.push(Constraint::new(cap, Sense::Le, t0 + 1.0));

    let out = run(&Scaled::new(&aux), PROBE_TOL, PROBE_MAX_ITER);
    out.converged.then(|| out.it.x[nb][(0, 0)].re - t0)
}
