//! Dense semidefinite programs over Hermitian PSD blocks.
//!
//! ```text
//! maximize    sum_b Re tr(C_b X_b)
//! subject to  sum_b Re tr(A_cb X_b)  (<= | >=)  bound_c,   X_b PSD
//! ```
//!
//! [`solve`] runs a primal-dual path-following method with the HKM search
//! direction and Mehrotra predictor-corrector steps. Inequalities become
//! equalities with a nonnegative slack, each slack being a `1 x 1` block.

mod ipm;
mod probe;

use alloc::format;
use alloc::vec::Vec;
use core::fmt::{self, Write};

use crate::linalg::{self, CMat, CVec, HermitianEigen};
use crate::{Error, Result};

pub use ipm::solve;
pub use probe::feasibility_probe;

pub const DEFAULT_TOL: f64 = 1e-7;
pub const DEFAULT_MAX_ITER: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sense {
    Le,
    Ge,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Constraint {
    /// One coefficient matrix per block; `None` means the block does not appear.
    pub coeffs: Vec<Option<CMat>>,
    pub sense: Sense,
    pub bound: f64,
}

impl Constraint {
    pub fn new(coeffs: Vec<Option<CMat>>, sense: Sense, bound: f64) -> Self {
        Constraint { coeffs, sense, bound }
    }

    /// `sum_b Re tr(A_cb X_b)`
    pub fn lhs(&self, blocks: &[CMat]) -> f64 {
        self.coeffs
            .iter()
            .zip(blocks)
            .filter_map(|(a, x)| a.as_ref().map(|a| linalg::inner(a, x)))
            .sum()
    }

    /// Signed distance to the boundary; nonnegative when satisfied.
    pub fn slack(&self, blocks: &[CMat]) -> f64 {
        match self.sense {
            Sense::Le => self.bound - self.lhs(blocks),
            Sense::Ge => self.lhs(blocks) - self.bound,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SdpProblem {
    pub blocks: Vec<usize>,
    /// Hermitian objective matrix per block (maximised).
    pub objective: Vec<CMat>,
    pub constraints: Vec<Constraint>,
}

impl SdpProblem {
    /// A problem with zero objective and no constraints.
    pub fn new(blocks: Vec<usize>) -> Self {
        let objective = blocks.iter().map(|&n| CMat::zeros(n, n)).collect();
        SdpProblem { blocks, objective, constraints: Vec::new() }
    }

    pub fn push(&mut self, c: Constraint) {
        self.constraints.push(c);
    }

    pub fn objective_value(&self, blocks: &[CMat]) -> f64 {
        self.objective.iter().zip(blocks).map(|(c, x)| linalg::inner(c, x)).sum()
    }

    pub fn validate(&self) -> Result<()> {
        let nb = self.blocks.len();
        if nb == 0 {
            return Err(Error::shape("an SDP needs at least one block"));
        }
        if self.blocks.contains(&0) {
            return Err(Error::shape("block dimensions must be positive"));
        }
        if self.objective.len() != nb {
            return Err(Error::shape(format!(
                "{} objective matrices for {nb} blocks",
                self.objective.len()
            )));
        }
        let check = |m: &CMat, n: usize, what: &str| -> Result<()> {
            if m.shape() != (n, n) {
                return Err(Error::shape(format!("{what} is {:?}, block is {n}x{n}", m.shape())));
            }
            if m.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
                return Err(Error::domain(format!("{what} has non-finite entries")));
            }
            if !linalg::is_hermitian(m, 1e-10) {
                return Err(Error::domain(format!("{what} is not Hermitian")));
            }
            Ok(())
        };
        for (b, (c, &n)) in self.objective.iter().zip(&self.blocks).enumerate() {
            check(c, n, &format!("objective block {b}"))?;
        }
        for (k, con) in self.constraints.iter().enumerate() {
            if con.coeffs.len() != nb {
                return Err(Error::shape(format!(
                    "constraint {k} has {} coefficient slots for {nb} blocks",
                    con.coeffs.len()
                )));
            }
            if !con.bound.is_finite() {
                return Err(Error::domain(format!("constraint {k} has a non-finite bound")));
            }
            for (b, a) in con.coeffs.iter().enumerate() {
                if let Some(a) = a {
                    check(a, self.blocks[b], &format!("constraint {k} block {b}"))?;
                }
            }
        }
        Ok(())
    }

    /// Plain-text dump: a header line, then every matrix as a
    /// `rows cols` line followed by row-major `re im` pairs.
    pub fn write_dump<W: Write>(&self, out: &mut W) -> fmt::Result {
        writeln!(out, "sdp {} {}", self.blocks.len(), self.constraints.len())?;
        write!(out, "blocks")?;
        for n in &self.blocks {
            write!(out, " {n}")?;
        }
        writeln!(out)?;
        for (b, c) in self.objective.iter().enumerate() {
            writeln!(out, "objective {b}")?;
            write_matrix(out, c)?;
        }
        for (k, con) in self.constraints.iter().enumerate() {
            let s = match con.sense {
                Sense::Le => "le",
                Sense::Ge => "ge",
            };
            writeln!(out, "constraint {k} {s} {:e}", con.bound)?;
            for (b, a) in con.coeffs.iter().enumerate() {
                if let Some(a) = a {
                    writeln!(out, "coeff {b}")?;
                    write_matrix(out, a)?;
                }
            }
        }
        Ok(())
    }
}

/// Writes `rows cols` then one line per row of `re im` pairs.
pub fn write_matrix<W: Write>(out: &mut W, m: &CMat) -> fmt::Result {
    writeln!(out, "{} {}", m.nrows(), m.ncols())?;
    for r in 0..m.nrows() {
        for c in 0..m.ncols() {
            if c > 0 {
                write!(out, " ")?;
            }
            let z = m[(r, c)];
            write!(out, "{:e} {:e}", z.re, z.im)?;
        }
        writeln!(out)?;
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SolveStatus {
    Optimal,
    Infeasible,
    MaxIter,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SdpSolution {
    pub blocks: Vec<CMat>,
    pub objective_value: f64,
    pub dual_objective: f64,
    /// Nonnegative multiplier per constraint.
    pub dual_values: Vec<f64>,
    /// `|dual_objective - objective_value|`
    pub duality_gap: f64,
    pub primal_infeasibility: f64,
    pub dual_infeasibility: f64,
    pub iterations: usize,
    pub status: SolveStatus,
}

impl SdpSolution {
    pub fn is_optimal(&self) -> bool {
        self.status == SolveStatus::Optimal
    }
}

/// Leading eigenpair of a PSD matrix as a vector.
#[derive(Debug, Clone, PartialEq)]
pub struct Rank1 {
    /// `sqrt(xi_max) u_max`, phase-normalised.
    pub vector: CVec,
    /// `xi_2 / xi_max`; zero for an exact rank-one input.
    pub residual_ratio: f64,
}

impl Rank1 {
    pub fn within(&self, rel_tol: f64) -> bool {
        self.residual_ratio <= rel_tol
    }
}

/// Best rank-one factor `x x^H` of a Hermitian PSD matrix.
///
/// The phase is fixed so that the largest-magnitude entry is real and
/// positive (the first one among ties). A zero matrix gives a zero vector and
/// ratio 0.
pub fn extract_rank1(x: &CMat) -> Result<Rank1> {
    if !x.is_square() {
        return Err(Error::shape(format!("expected a square matrix, got {:?}", x.shape())));
    }
    if !linalg::is_hermitian(x, 1e-9) {
        return Err(Error::domain("rank-one extraction needs a Hermitian matrix"));
    }
    let n = x.nrows();
    if n == 0 {
        return Ok(Rank1 { vector: CVec::zeros(0), residual_ratio: 0.0 });
    }
    let eig = HermitianEigen::new(x);
    let top = eig.max_value();
    if top <= 0.0 {
        return Ok(Rank1 { vector: CVec::zeros(n), residual_ratio: 0.0 });
    }
    let second = if n > 1 { eig.values[n - 2].max(0.0) } else { 0.0 };
    let mut vector = eig.top_vector() * crate::Complex64::new(crate::math::sqrt(top), 0.0);
    linalg::normalize_phase(&mut vector);
    Ok(Rank1 { vector, residual_ratio: second / top })
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::String;
    use alloc::vec;
    use num_complex::Complex64;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn rank1_of_outer_product() {
        let u = CVec::from_vec(vec![c(0.6, 0.0), c(0.0, 0.8)]);
        let x = linalg::outer(&u) * c(4.0, 0.0);
        let r = extract_rank1(&x).unwrap();
        assert!(r.residual_ratio < 1e-15);
        assert!((linalg::outer(&r.vector) - x).norm() < 1e-13);
        // largest entry is the second one, made real positive
        assert!((r.vector[1] - c(1.6, 0.0)).norm() < 1e-13);
    }

    #[test]
    fn rank1_near_diagonal() {
        let x = CMat::from_diagonal(&CVec::from_vec(vec![c(4.0, 0.0), c(4e-9, 0.0)]));
        let r = extract_rank1(&x).unwrap();
        assert!((r.residual_ratio - 1e-9).abs() < 1e-20);
        assert!((r.vector[0] - c(2.0, 0.0)).norm() < 1e-15);
        assert!(r.vector[1].norm() < 1e-15);
        assert!(r.within(1e-6));
        assert!(!r.within(1e-10));
    }

    #[test]
    fn rank1_of_zero() {
        let r = extract_rank1(&CMat::zeros(3, 3)).unwrap();
        assert_eq!(r.residual_ratio, 0.0);
        assert!(r.vector.iter().all(|z| *z == c(0.0, 0.0)));
    }

    #[test]
    fn rank1_rejects_non_hermitian() {
        let mut x = CMat::identity(2, 2);
        x[(0, 1)] = c(0.0, 1.0);
        assert!(matches!(extract_rank1(&x), Err(Error::Domain(_))));
    }

    #[test]
    fn validate_catches_shapes() {
        let mut p = SdpProblem::new(vec![2]);
        p.push(Constraint::new(vec![Some(CMat::identity(3, 3))], Sense::Le, 1.0));
        assert!(matches!(p.validate(), Err(Error::Shape(_))));
        let mut q = SdpProblem::new(vec![2]);
        q.objective[0][(0, 1)] = c(1.0, 0.0);
        assert!(matches!(q.validate(), Err(Error::Domain(_))));
        assert!(SdpProblem::new(vec![]).validate().is_err());
    }

    #[test]
    fn dump_format() {
        let mut p = SdpProblem::new(vec![1]);
        p.objective[0][(0, 0)] = c(2.0, 0.0);
        p.push(Constraint::new(vec![Some(CMat::identity(1, 1))], Sense::Le, 1.0));
        let mut s = String::new();
        p.write_dump(&mut s).unwrap();
        assert_eq!(
            s,
            "sdp 1 1\nblocks 1\nobjective 0\n1 1\n2e0 0e0\nconstraint 0 le 1e0\ncoeff 0\n1 1\n1e0 0e0\n"
        );
    }
}
