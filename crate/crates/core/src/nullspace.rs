//! Null-space bases of the information channels and the equivalent channels
//! seen through them.
//!
//! Information beam `i` lives in the null space of the other IUs' channels and
//! every energy beam lives in the null space of all IU channels, so neither
//! leaks into any information user.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::linalg::{self, CMat, CVec};
use crate::system_model::ChannelSet;
use crate::{Error, Result};

/// Absolute slack allowed by [`interlacing_check`].
pub const INTERLACING_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct NullSpaceBasis {
    /// `M x (M - r_I)` orthonormal basis per IU.
    pub n_i: Vec<CMat>,
    /// `M x (M - r_E)` orthonormal basis shared by the energy beams.
    pub n_e: CMat,
    pub r_i: usize,
    pub r_e: usize,
    /// Non-fatal findings, e.g. a rank-deficient `H_I`.
    pub diagnostics: Vec<String>,
}

impl NullSpaceBasis {
    pub fn info_dim(&self) -> usize {
        self.n_i.first().map_or(0, |n| n.ncols())
    }

    pub fn energy_dim(&self) -> usize {
        self.n_e.ncols()
    }
}

/// Channels projected onto the null spaces, and the aggregate EU matrices.
#[derive(Debug, Clone, PartialEq)]
pub struct EquivalentChannels {
    /// `h_ei[k][i] = N_I[i]^H h_E^k`
    pub h_ei: Vec<Vec<CVec>>,
    /// `h_ee[k] = N_E^H h_E^k`
    pub h_ee: Vec<CVec>,
    /// `h_ii[k] = N_I[k]^H h_I^k`
    pub h_ii: Vec<CVec>,
    /// `S_Ei[i] = sum_k h_ei[k][i] h_ei[k][i]^H`
    pub s_ei: Vec<CMat>,
    /// `S_E = sum_k h_ee[k] h_ee[k]^H`
    pub s_e: CMat,
    /// `S = sum_j h_E^j h_E^{jH}`
    pub s: CMat,
}

/// The last `M - r` right singular vectors of `a` (`rows x M`), singular values
/// ordered descending. When `r >= rank(a)` the columns span a subspace of the
/// null space of `a`.
pub fn null_space_of(a: &CMat, r: usize) -> Result<CMat> {
    let m = a.ncols();
    if m == 0 || r >= m {
        return Err(Error::config(format!("retained rank {r} must be below the antenna count {m}")));
    }
    let (_, v) = linalg::right_singular_basis(a);
    Ok(v.columns(r, m - r).into_owned())
}

/// `||A N||_F`
pub fn annihilation_residual(a: &CMat, n: &CMat) -> f64 {
    if a.nrows() == 0 {
        return 0.0;
    }
    (a * n).norm()
}

/// Per-IU information bases and the shared energy basis.
///
/// `r_i = K_I - 1` and `r_e = K_I` are the smallest ranks that still cancel
/// all interference; smaller values are accepted for rank sweeps.
pub fn build_bases(ch: &ChannelSet, r_i: usize, r_e: usize) -> Result<NullSpaceBasis> {
    let m = ch.antennas();
    if r_i >= m || r_e >= m {
        return Err(Error::config(format!(
            "retained ranks (r_I={r_i}, r_E={r_e}) must be below M={m}"
        )));
    }
    let mut diagnostics = Vec::new();
    let h_i = ch.h_i_matrix();
    let rank = linalg::numerical_rank(&h_i);
    if rank < ch.k_i() {
        diagnostics.push(format!(
            "H_I is rank deficient: rank {rank} with {} information users",
            ch.k_i()
        ));
    }
    let n_i = (0..ch.k_i())
        .map(|i| null_space_of(&ch.h_i_without(i), r_i))
        .collect::<Result<Vec<_>>>()?;
    let n_e = null_space_of(&h_i, r_e)?;
    Ok(NullSpaceBasis { n_i, n_e, r_i, r_e, diagnostics })
}

/// Projects every channel onto the bases.
pub fn build_equivalents(ch: &ChannelSet, basis: &NullSpaceBasis) -> Result<EquivalentChannels> {
    let m = ch.antennas();
    if basis.n_i.len() != ch.k_i() {
        return Err(Error::shape(format!(
            "basis has {} IU blocks, channel has {} IUs",
            basis.n_i.len(),
            ch.k_i()
        )));
    }
    if basis.n_i.iter().any(|n| n.nrows() != m) || basis.n_e.nrows() != m {
        return Err(Error::shape("basis row count does not match the antenna count"));
    }
    let h_ei: Vec<Vec<CVec>> = ch
        .h_e
        .iter()
        .map(|h| basis.n_i.iter().map(|n| n.ad_mul(h)).collect())
        .collect();
    let h_ee: Vec<CVec> = ch.h_e.iter().map(|h| basis.n_e.ad_mul(h)).collect();
    let h_ii: Vec<CVec> = ch.h_i.iter().zip(&basis.n_i).map(|(h, n)| n.ad_mul(h)).collect();
    let s_ei = (0..ch.k_i())
        .map(|i| {
            let dim = basis.n_i[i].ncols();
            h_ei.iter()
                .fold(CMat::zeros(dim, dim), |acc, per_k| acc + linalg::outer(&per_k[i]))
        })
        .collect();
    let de = basis.n_e.ncols();
    let s_e = h_ee.iter().fold(CMat::zeros(de, de), |acc, h| acc + linalg::outer(h));
    let s = energy_gram(ch);
    Ok(EquivalentChannels { h_ei, h_ee, h_ii, s_ei, s_e, s })
}

/// `G = sum_j h_E^j h_E^{jH}` (`M x M`).
pub fn energy_gram(ch: &ChannelSet) -> CMat {
    let m = ch.antennas();
    ch.h_e.iter().fold(CMat::zeros(m, m), |acc, h| acc + linalg::outer(h))
}

/// The leading `dim` columns of an information basis, i.e. `N_I[i] P` with
/// `P = [I; 0]`. Its span sits inside the span of `n_info`.
pub fn nested_basis(n_info: &CMat, dim: usize) -> Result<CMat> {
    if dim > n_info.ncols() {
        return Err(Error::shape(format!(
            "nested dimension {dim} exceeds the basis dimension {}",
            n_info.ncols()
        )));
    }
    Ok(n_info.columns(0, dim).into_owned())
}

#[derive(Debug, Clone, PartialEq)]
pub struct InterlacingReport {
    pub holds: bool,
    /// Eigenvalues of `S_Ei`, ascending.
    pub outer: Vec<f64>,
    /// Eigenvalues of `S_E`, ascending.
    pub inner: Vec<f64>,
    /// First (0-based) index `j` where the bound fails.
    pub violation: Option<usize>,
}

/// Checks `xi_Ei[j] <= xi_E[j] <= xi_Ei[j + r_E - r_I]` for every `j`
/// (ascending eigenvalues, `INTERLACING_SLACK` absolute slack). In particular
/// the dominant eigenvalue of `S_E` cannot exceed that of `S_Ei`.
pub fn interlacing_check(s_ei: &CMat, s_e: &CMat, r_i: usize, r_e: usize) -> Result<InterlacingReport> {
    for (name, s) in [("S_Ei", s_ei), ("S_E", s_e)] {
        if !linalg::is_hermitian(s, 1e-12) {
            return Err(Error::domain(format!("{name} is not Hermitian")));
        }
    }
    let (n_outer, n_inner) = (s_ei.nrows(), s_e.nrows());
    if r_e < r_i || n_outer < n_inner || n_outer - n_inner != r_e - r_i {
        return Err(Error::shape(format!(
            "dimensions {n_outer} and {n_inner} do not match ranks r_I={r_i}, r_E={r_e}"
        )));
    }
    let shift = r_e - r_i;
    let outer = linalg::hermitian_eigenvalues(s_ei);
    let inner = linalg::hermitian_eigenvalues(s_e);
    let violation = (0..n_inner).find(|&j| {
        outer[j] > inner[j] + INTERLACING_SLACK || inner[j] > outer[j + shift] + INTERLACING_SLACK
    });
    Ok(InterlacingReport { holds: violation.is_none(), outer, inner, violation })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::system_model::{generate_channels, SystemConfig};
    use crate::linalg::HermitianEigen;
    use num_complex::Complex64;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn canonical_null_space() {
        let a = CMat::from_row_slice(1, 4, &[c(1.0), c(0.0), c(0.0), c(0.0)]);
        let n = null_space_of(&a, 1).unwrap();
        assert_eq!(n.shape(), (4, 3));
        assert!(annihilation_residual(&a, &n) < 1e-15);
        // first coordinate is never used
        assert!(n.row(0).iter().all(|z| z.norm() < 1e-15));
        let gram = n.ad_mul(&n);
        assert!((gram - CMat::identity(3, 3)).norm() < 1e-14);
    }

    #[test]
    fn rank_out_of_range() {
        let a = CMat::zeros(1, 4);
        assert!(matches!(null_space_of(&a, 4), Err(Error::Config(_))));
        let ch = generate_channels(&SystemConfig::reference(), 0).unwrap();
        assert!(build_bases(&ch, 16, 2).is_err());
        assert!(build_bases(&ch, 1, 16).is_err());
    }

    #[test]
    fn single_iu_keeps_full_space() {
        let cfg = SystemConfig::reference().with_users(1, 2);
        let ch = generate_channels(&cfg, 5).unwrap();
        let b = build_bases(&ch, 0, 1).unwrap();
        assert_eq!(b.n_i[0].shape(), (16, 16));
        assert!((b.n_i[0].ad_mul(&b.n_i[0]) - CMat::identity(16, 16)).norm() < 1e-12);
    }

    #[test]
    fn single_eu_gram_is_rank_one() {
        let cfg = SystemConfig::reference().with_users(2, 1);
        let ch = generate_channels(&cfg, 8).unwrap();
        let b = build_bases(&ch, 1, 2).unwrap();
        let eq = build_equivalents(&ch, &b).unwrap();
        let eig = HermitianEigen::new(&eq.s);
        assert!((linalg::real_trace(&eq.s) - ch.h_e[0].norm_squared()).abs() < 1e-12);
        assert!(eig.values[..15].iter().all(|v| v.abs() < 1e-10));
    }

    #[test]
    fn diagonal_interlacing() {
        let outer = CMat::from_diagonal(&CVec::from_vec(alloc::vec![c(3.0), c(2.0), c(1.0)]));
        let inner = outer.view((0, 0), (2, 2)).into_owned();
        let rep = interlacing_check(&outer, &inner, 1, 2).unwrap();
        assert!(rep.holds);
        assert_eq!(rep.inner, alloc::vec![2.0, 3.0]);
    }

    #[test]
    fn interlacing_flags_violation() {
        let outer = CMat::from_diagonal(&CVec::from_vec(alloc::vec![c(3.0), c(2.0), c(1.0)]));
        let inner = CMat::from_diagonal(&CVec::from_vec(alloc::vec![c(5.0), c(2.0)]));
        let rep = interlacing_check(&outer, &inner, 1, 2).unwrap();
        assert!(!rep.holds);
        assert_eq!(rep.violation, Some(1));
    }

    #[test]
    fn interlacing_rejects_non_hermitian() {
        let mut m = CMat::identity(3, 3);
        m[(0, 1)] = c(1.0);
        let inner = CMat::identity(2, 2);
        assert!(matches!(interlacing_check(&m, &inner, 1, 2), Err(Error::Domain(_))));
    }

    #[test]
    fn nested_basis_too_large() {
        let n = CMat::identity(4, 3);
        assert!(nested_basis(&n, 4).is_err());
        assert_eq!(nested_basis(&n, 2).unwrap().ncols(), 2);
    }
}
