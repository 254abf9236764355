//! Complex dense helpers shared by the null-space, SDP and beamforming code.

use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

use crate::math;

pub type CMat = DMatrix<Complex64>;
pub type CVec = DVector<Complex64>;

/// Eigendecomposition of a Hermitian matrix with eigenvalues sorted ascending.
#[derive(Debug, Clone)]
pub struct HermitianEigen {
    pub values: Vec<f64>,
    /// Unit eigenvectors as columns, in the same order as `values`.
    pub vectors: CMat,
}

impl HermitianEigen {
    pub fn new(m: &CMat) -> Self {
        let n = m.nrows();
        if n == 0 {
            return HermitianEigen {
                values: Vec::new(),
                vectors: CMat::zeros(0, 0),
            };
        }
        let eig = SymmetricEigen::new(hermitian_part(m));
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
        let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
        let vectors = CMat::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);
        HermitianEigen { values, vectors }
    }

    pub fn max_value(&self) -> f64 {
        self.values.last().copied().unwrap_or(0.0)
    }

    pub fn min_value(&self) -> f64 {
        self.values.first().copied().unwrap_or(0.0)
    }

    /// Eigenvector of the largest eigenvalue.
    pub fn top_vector(&self) -> CVec {
        let n = self.vectors.ncols();
        self.vectors.column(n - 1).into_owned()
    }
}

/// Eigenvalues of a Hermitian matrix, ascending, without eigenvectors.
pub fn hermitian_eigenvalues(m: &CMat) -> Vec<f64> {
    if m.nrows() == 0 {
        return Vec::new();
    }
    let mut v: Vec<f64> = hermitian_part(m).symmetric_eigenvalues().iter().copied().collect();
    v.sort_by(f64::total_cmp);
    v
}

/// `(A + A^H) / 2`
pub fn hermitian_part(m: &CMat) -> CMat {
    (m + m.adjoint()) * Complex64::new(0.5, 0.0)
}

pub fn is_hermitian(m: &CMat, rel_tol: f64) -> bool {
    if !m.is_square() {
        return false;
    }
    let scale = 1.0 + m.norm();
    (m - m.adjoint()).norm() <= rel_tol * scale
}

/// Real trace inner product `Re tr(A^H B)`.
pub fn inner(a: &CMat, b: &CMat) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| x.re * y.re + x.im * y.im).sum()
}

pub fn real_trace(m: &CMat) -> f64 {
    m.diagonal().iter().map(|z| z.re).sum()
}

/// `h h^H`
pub fn outer(h: &CVec) -> CMat {
    h * h.adjoint()
}

pub fn identity(n: usize) -> CMat {
    CMat::identity(n, n)
}

pub fn scale(m: &CMat, s: f64) -> CMat {
    m * Complex64::new(s, 0.0)
}

/// Rotates `v` so that its largest-magnitude entry is real and positive.
///
/// Entries within a relative `1e-12` of the maximum magnitude count as tied;
/// the first of them is used.
pub fn normalize_phase(v: &mut CVec) {
    let max = v.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if max == 0.0 {
        return;
    }
    let pivot = v
        .iter()
        .find(|z| z.norm() >= max * (1.0 - 1e-12))
        .copied()
        .unwrap_or(Complex64::new(1.0, 0.0));
    let rot = pivot.conj() / pivot.norm();
    for z in v.iter_mut() {
        *z *= rot;
    }
}

/// Singular values (descending, padded with zeros to length `M`) and a full
/// `M x M` unitary matrix of right singular vectors of `a` (`rows x M`).
pub fn right_singular_basis(a: &CMat) -> (Vec<f64>, CMat) {
    let m = a.ncols();
    if a.nrows() == 0 || m == 0 {
        return (alloc::vec![0.0; m], CMat::identity(m, m));
    }
    // Zero-padding to a square matrix makes the SVD return all M right
    // singular vectors, including a basis for the null space.
    let rows = a.nrows().max(m);
    let mut padded = CMat::zeros(rows, m);
    padded.view_mut((0, 0), (a.nrows(), m)).copy_from(a);
    let svd = padded.svd(false, true);
    let v_t = svd.v_t.expect("right singular vectors requested");
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&x, &y| svd.singular_values[y].total_cmp(&svd.singular_values[x]));
    let values = order.iter().map(|&i| svd.singular_values[i]).collect();
    let v = CMat::from_fn(m, m, |r, c| v_t[(order[c], r)].conj());
    (values, v)
}

/// Numerical rank with the usual `max(dims) * eps * sigma_max` cutoff.
pub fn numerical_rank(a: &CMat) -> usize {
    let (sv, _) = right_singular_basis(a);
    let smax = sv.first().copied().unwrap_or(0.0);
    if smax == 0.0 {
        return 0;
    }
    let cutoff = (a.nrows().max(a.ncols()) as f64) * f64::EPSILON * smax * 16.0;
    sv.iter().filter(|&&s| s > cutoff).count()
}

/// Stacks `vecs` as the conjugate-transposed rows of a `len x M` matrix.
pub fn stack_adjoint_rows(vecs: &[CVec], m: usize) -> CMat {
    let mut out = CMat::zeros(vecs.len(), m);
    for (i, h) in vecs.iter().enumerate() {
        for j in 0..m {
            out[(i, j)] = h[j].conj();
        }
    }
    out
}

pub fn frobenius(m: &CMat) -> f64 {
    m.norm()
}

pub fn db(x: f64) -> f64 {
    10.0 * math::log10(x)
}
