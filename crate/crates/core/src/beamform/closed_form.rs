use alloc::format;
use alloc::vec::Vec;

use super::{capacity_thresholds, BeamformingSolution, Diagnostics, Method};
use crate::linalg::{self, HermitianEigen};
use crate::nullspace::{EquivalentChannels, NullSpaceBasis};
use crate::system_model::{ChannelSet, SystemConfig};
use crate::{math, Complex64, Error, Result};

/// Closed-form design for the deterministic sinusoid.
///
/// Each IU gets MRT inside its null space, `w_i = N_i N_i^H h_i / ||N_i^H h_i||`
/// scaled to the least power meeting its capacity threshold,
/// `P_i = c_i / ||N_i^H h_i||^2`. What remains of `p_max` goes to one energy
/// beam `N_E d` with `d` the dominant eigenvector of `S_E`.
pub fn solve_alg2(
    ch: &ChannelSet,
    basis: &NullSpaceBasis,
    eq: &EquivalentChannels,
    cfg: &SystemConfig,
) -> Result<BeamformingSolution> {
    if basis.n_i.len() != ch.k_i() || eq.h_ii.len() != ch.k_i() {
        return Err(Error::shape("null-space data does not match the IU count"));
    }
    let thresholds = capacity_thresholds(ch, cfg);
    let mut w = Vec::with_capacity(ch.k_i());
    let mut used = 0.0;
    for (i, (g, n)) in eq.h_ii.iter().zip(&basis.n_i).enumerate() {
        let beta = g.norm_squared();
        if !(beta > 0.0) {
            return Err(Error::Infeasible(format!("IU {i} has no gain inside its null space")));
        }
        let p = thresholds[i] / beta;
        used += p;
        let mut beam = n * g * Complex64::new(math::sqrt(p / beta), 0.0);
        linalg::normalize_phase(&mut beam);
        w.push(beam);
    }
    if used > cfg.p_max {
        return Err(Error::Infeasible(format!(
            "power shortfall: information beams need {used:e} W, budget is {:e} W",
            cfg.p_max
        )));
    }
    let rest = cfg.p_max - used;
    let mut v = Vec::new();
    if rest > 0.0 && eq.s_e.nrows() > 0 {
        let d = HermitianEigen::new(&eq.s_e).top_vector();
        let mut beam = &basis.n_e * d * Complex64::new(math::sqrt(rest), 0.0);
        linalg::normalize_phase(&mut beam);
        v.push(beam);
    }
    Ok(BeamformingSolution::assemble(Method::Alg2, w, v, Diagnostics::default()))
}
