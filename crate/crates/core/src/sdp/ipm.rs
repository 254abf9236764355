//! Infeasible-start primal-dual path following (HKM direction, Mehrotra
//! predictor-corrector) on the scaled standard form
//!
//! ```text
//! min <C, X>  s.t.  A(X) + sign .* s = b,  X PSD, s >= 0
//! max b'y     s.t.  C - A'(y) = Z PSD,  -sign .* y = z_s >= 0
//! ```

use alloc::vec::Vec;

use nalgebra::{Cholesky, DMatrix, DVector, Dyn, LU};
use num_complex::Complex64;

use super::{probe, SdpProblem, SdpSolution, Sense, SolveStatus};
use crate::linalg::{self, CMat};
use crate::{math, Error, Result};

const STEP_FRACTION: f64 = 0.98;
const BLOWUP: f64 = 1e13;

/// Solves `prob` to relative accuracy `tol`.
///
/// `Optimal` means the relative primal and dual residuals are below `tol` and
/// the duality gap is below `tol (1 + |objective|)`. When the iteration stops
/// without that certificate, a phase-one probe decides between `Infeasible`
/// and `MaxIter`.
pub fn solve(prob: &SdpProblem, tol: f64, max_iter: usize) -> Result<SdpSolution> {
    prob.validate()?;
    if !(tol > 0.0 && tol < 1.0) {
        return Err(Error::config("solver tolerance must lie in (0, 1)"));
    }
    let data = Scaled::new(prob);
    let out = run(&data, tol, max_iter);
    let status = if out.converged {
        SolveStatus::Optimal
    } else if probe::feasibility_probe(prob) {
        SolveStatus::MaxIter
    } else {
        SolveStatus::Infeasible
    };
    let blocks: Vec<CMat> = out.it.x.iter().map(linalg::hermitian_part).collect();
    let objective_value = prob.objective_value(&blocks);
    let dual_objective = -data.obj_scale * dot(&data.b, &out.it.y);
    let dual_values = (0..data.m())
        .map(|c| data.obj_scale * out.it.zs[c] / data.row_scale[c])
        .collect();
    Ok(SdpSolution {
        blocks,
        objective_value,
        dual_objective,
        dual_values,
        duality_gap: (dual_objective - objective_value).abs(),
        primal_infeasibility: out.pinf,
        dual_infeasibility: out.dinf,
        iterations: out.iterations,
        status,
    })
}

/// Row- and objective-normalised copy of a problem in minimisation form.
pub(super) struct Scaled {
    dims: Vec<usize>,
    c: Vec<CMat>,
    /// `a[constraint][block]`
    a: Vec<Vec<Option<CMat>>>,
    sign: Vec<f64>,
    b: Vec<f64>,
    row_scale: Vec<f64>,
    obj_scale: f64,
}

impl Scaled {
    pub(super) fn new(p: &SdpProblem) -> Self {
        let norm = math::sqrt(p.objective.iter().map(|c| c.norm_squared()).sum());
        let obj_scale = if norm > 0.0 { norm } else { 1.0 };
        let c = p.objective.iter().map(|c| linalg::scale(c, -1.0 / obj_scale)).collect();
        let mut a = Vec::with_capacity(p.constraints.len());
        let mut sign = Vec::new();
        let mut b = Vec::new();
        let mut row_scale = Vec::new();
        for con in &p.constraints {
            let n2: f64 = con.coeffs.iter().flatten().map(|m| m.norm_squared()).sum();
            let r = if n2 > 0.0 { math::sqrt(n2) } else { 1.0 };
            a.push(
                con.coeffs
                    .iter()
                    .map(|m| m.as_ref().map(|m| linalg::scale(m, 1.0 / r)))
                    .collect(),
            );
            sign.push(match con.sense {
                Sense::Le => 1.0,
                Sense::Ge => -1.0,
            });
            b.push(con.bound / r);
            row_scale.push(r);
        }
        Scaled { dims: p.blocks.clone(), c, a, sign, b, row_scale, obj_scale }
    }

    fn m(&self) -> usize {
        self.b.len()
    }

    /// `A(X) + sign .* s`
    fn apply(&self, x: &[CMat], xs: &[f64]) -> Vec<f64> {
        (0..self.m())
            .map(|c| {
                let mut v = self.sign[c] * xs[c];
                for (a, x) in self.a[c].iter().zip(x) {
                    if let Some(a) = a {
                        v += linalg::inner(a, x);
                    }
                }
                v
            })
            .collect()
    }

    /// Block part of `A'(y)`; the slack part is `sign .* y`.
    fn adjoint(&self, y: &[f64]) -> Vec<CMat> {
        let mut out: Vec<CMat> = self.dims.iter().map(|&n| CMat::zeros(n, n)).collect();
        for (c, row) in self.a.iter().enumerate() {
            for (o, a) in out.iter_mut().zip(row) {
                if let Some(a) = a {
                    *o += linalg::scale(a, y[c]);
                }
            }
        }
        out
    }
}

pub(super) struct Iterate {
    pub x: Vec<CMat>,
    pub xs: Vec<f64>,
    pub y: Vec<f64>,
    pub z: Vec<CMat>,
    pub zs: Vec<f64>,
}

pub(super) struct Outcome {
    pub it: Iterate,
    pub iterations: usize,
    pub converged: bool,
    pub pinf: f64,
    pub dinf: f64,
}

struct Direction {
    dx: Vec<CMat>,
    dxs: Vec<f64>,
    dy: Vec<f64>,
    dz: Vec<CMat>,
    dzs: Vec<f64>,
}

enum Factor {
    Chol(Cholesky<f64, Dyn>),
    Lu(LU<f64, Dyn, Dyn>),
}

impl Factor {
    fn new(m: DMatrix<f64>) -> Option<Self> {
        if let Some(ch) = Cholesky::new(m.clone()) {
            return Some(Factor::Chol(ch));
        }
        let lu = LU::new(m);
        lu.is_invertible().then_some(Factor::Lu(lu))
    }

    fn solve(&self, rhs: &[f64]) -> Option<Vec<f64>> {
        let r = DVector::from_column_slice(rhs);
        let s = match self {
            Factor::Chol(ch) => ch.solve(&r),
            Factor::Lu(lu) => lu.solve(&r)?,
        };
        s.iter().all(|v| v.is_finite()).then(|| s.iter().copied().collect())
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    math::sqrt(dot(a, a))
}

/// `Re tr(A P)`
fn re_tr_prod(a: &CMat, p: &CMat) -> f64 {
    let n = a.nrows();
    let mut s = 0.0;
    for k in 0..n {
        for l in 0..n {
            let (x, y) = (a[(k, l)], p[(l, k)]);
            s += x.re * y.re - x.im * y.im;
        }
    }
    s
}

fn lower_factor(m: &CMat) -> Option<CMat> {
    Cholesky::new(m.clone()).map(|c| c.l())
}

/// Largest `alpha` keeping `L L^H + alpha dX` PSD.
fn max_step_block(l: &CMat, dx: &CMat) -> f64 {
    if l.nrows() == 1 {
        let (x, d) = (l[(0, 0)].norm_sqr(), dx[(0, 0)].re);
        return if d < 0.0 { -x / d } else { f64::INFINITY };
    }
    let Some(y) = l.solve_lower_triangular(dx) else { return 0.0 };
    let Some(t) = l.solve_lower_triangular(&y.adjoint()) else { return 0.0 };
    let lmin = linalg::hermitian_eigenvalues(&t).first().copied().unwrap_or(0.0);
    if lmin < 0.0 {
        -1.0 / lmin
    } else {
        f64::INFINITY
    }
}

fn max_step(l: &[CMat], s: &[f64], d: &[CMat], ds: &[f64]) -> f64 {
    let mut a = f64::INFINITY;
    for (&v, &dv) in s.iter().zip(ds) {
        if dv < 0.0 {
            a = a.min(-v / dv);
        }
    }
    for (l, d) in l.iter().zip(d) {
        a = a.min(max_step_block(l, d));
    }
    a
}

fn initial_point(d: &Scaled) -> Iterate {
    let m = d.m();
    let x = d
        .dims
        .iter()
        .enumerate()
        .map(|(bi, &n)| {
            let rn = math::sqrt(n as f64);
            let mut xi = 10.0f64.max(rn);
            let mut eta = 10.0f64.max(rn).max(d.c[bi].norm());
            for c in 0..m {
                if let Some(a) = &d.a[c][bi] {
                    let an = a.norm();
                    xi = xi.max(rn * (1.0 + d.b[c].abs()) / (1.0 + an));
                    eta = eta.max(an);
                }
            }
            (linalg::scale(&linalg::identity(n), xi), linalg::scale(&linalg::identity(n), eta))
        })
        .collect::<Vec<_>>();
    let (x, z) = x.into_iter().unzip();
    Iterate {
        x,
        xs: d.b.iter().map(|b| 10.0f64.max(1.0 + b.abs())).collect(),
        y: alloc::vec![0.0; m],
        z,
        zs: alloc::vec![10.0; m],
    }
}

/// Schur complement `M_ij = Re tr(A_i X A_j Z^-1) + delta_ij s_i / z_i`.
fn schur(d: &Scaled, it: &Iterate, zinv: &[CMat]) -> DMatrix<f64> {
    let m = d.m();
    let mut out = DMatrix::zeros(m, m);
    for (b, (x, zi)) in it.x.iter().zip(zinv).enumerate() {
        let touching: Vec<usize> = (0..m).filter(|&c| d.a[c][b].is_some()).collect();
        for &j in &touching {
            let p = x * d.a[j][b].as_ref().expect("filtered") * zi;
            for &i in &touching {
                out[(i, j)] += re_tr_prod(d.a[i][b].as_ref().expect("filtered"), &p);
            }
        }
    }
    let mut out = (&out + out.transpose()) * 0.5;
    for c in 0..m {
        out[(c, c)] += it.xs[c] / it.zs[c];
    }
    out
}

#[allow(clippy::too_many_arguments)]
fn direction(
    d: &Scaled,
    it: &Iterate,
    zinv: &[CMat],
    fac: &Factor,
    rp: &[f64],
    rd: &[CMat],
    rd_s: &[f64],
    k: &[CMat],
    k_s: &[f64],
) -> Option<Direction> {
    let g: Vec<CMat> = it
        .x
        .iter()
        .zip(rd)
        .zip(zinv)
        .map(|((x, r), zi)| linalg::hermitian_part(&(x * r * zi)))
        .collect();
    let g_s: Vec<f64> = (0..d.m()).map(|c| it.xs[c] * rd_s[c] / it.zs[c]).collect();
    let ak = d.apply(k, k_s);
    let ag = d.apply(&g, &g_s);
    let rhs: Vec<f64> = (0..d.m()).map(|c| rp[c] - ak[c] + ag[c]).collect();
    let dy = if d.m() == 0 { Vec::new() } else { fac.solve(&rhs)? };
    let aty = d.adjoint(&dy);
    let dz: Vec<CMat> = rd.iter().zip(&aty).map(|(r, a)| r - a).collect();
    let dzs: Vec<f64> = (0..d.m()).map(|c| rd_s[c] - d.sign[c] * dy[c]).collect();
    let dx = k
        .iter()
        .zip(&it.x)
        .zip(&dz)
        .zip(zinv)
        .map(|(((k, x), dz), zi)| k - linalg::hermitian_part(&(x * dz * zi)))
        .collect();
    let dxs = (0..d.m()).map(|c| k_s[c] - it.xs[c] * dzs[c] / it.zs[c]).collect();
    Some(Direction { dx, dxs, dy, dz, dzs })
}

fn pair_inner(x: &[CMat], xs: &[f64], z: &[CMat], zs: &[f64]) -> f64 {
    x.iter().zip(z).map(|(a, b)| linalg::inner(a, b)).sum::<f64>() + dot(xs, zs)
}

fn stepped(x: &[CMat], dx: &[CMat], a: f64) -> Vec<CMat> {
    x.iter().zip(dx).map(|(x, d)| x + linalg::scale(d, a)).collect()
}

fn stepped_s(x: &[f64], dx: &[f64], a: f64) -> Vec<f64> {
    x.iter().zip(dx).map(|(x, d)| x + a * d).collect()
}

pub(super) fn run(d: &Scaled, tol: f64, max_iter: usize) -> Outcome {
    let m = d.m();
    let n_tot = (d.dims.iter().sum::<usize>() + m) as f64;
    let b_norm = norm(&d.b);
    let c_norm = math::sqrt(d.c.iter().map(|c| c.norm_squared()).sum());
    let mut it = initial_point(d);
    let mut converged = false;
    let mut iterations = 0;
    let (mut pinf, mut dinf);
    let mut stalls = 0;
    loop {
        let ax = d.apply(&it.x, &it.xs);
        let rp: Vec<f64> = (0..m).map(|c| d.b[c] - ax[c]).collect();
        let aty = d.adjoint(&it.y);
        let rd: Vec<CMat> = (0..d.dims.len()).map(|b| &d.c[b] - &it.z[b] - &aty[b]).collect();
        let rd_s: Vec<f64> = (0..m).map(|c| -it.zs[c] - d.sign[c] * it.y[c]).collect();
        let pobj: f64 = d.c.iter().zip(&it.x).map(|(c, x)| linalg::inner(c, x)).sum();
        let dobj = dot(&d.b, &it.y);
        pinf = norm(&rp) / (1.0 + b_norm);
        dinf = math::sqrt(rd.iter().map(|r| r.norm_squared()).sum::<f64>() + dot(&rd_s, &rd_s))
            / (1.0 + c_norm);
        let gap = d.obj_scale * (pobj - dobj).abs();
        if gap <= tol * (1.0 + d.obj_scale * pobj.abs()) && pinf <= tol && dinf <= tol {
            converged = true;
            break;
        }
        if iterations >= max_iter || stalls >= 3 {
            break;
        }
        let size = it.x.iter().chain(&it.z).map(linalg::real_trace).fold(0.0, f64::max);
        if !(size < BLOWUP) {
            break;
        }
        let mu = pair_inner(&it.x, &it.xs, &it.z, &it.zs) / n_tot;

        let Some(lx) = it.x.iter().map(lower_factor).collect::<Option<Vec<_>>>() else { break };
        let Some(lz) = it.z.iter().map(lower_factor).collect::<Option<Vec<_>>>() else { break };
        let zinv: Vec<CMat> = lz
            .iter()
            .map(|l| {
                let n = l.nrows();
                let li = l.solve_lower_triangular(&linalg::identity(n)).unwrap_or_else(|| CMat::zeros(n, n));
                li.ad_mul(&li)
            })
            .collect();
        let Some(fac) = Factor::new(schur(d, &it, &zinv)) else { break };

        // predictor
        let k: Vec<CMat> = it.x.iter().map(|x| -x).collect();
        let k_s: Vec<f64> = it.xs.iter().map(|v| -v).collect();
        let Some(aff) = direction(d, &it, &zinv, &fac, &rp, &rd, &rd_s, &k, &k_s) else { break };
        let ap = max_step(&lx, &it.xs, &aff.dx, &aff.dxs).min(1.0);
        let ad = max_step(&lz, &it.zs, &aff.dz, &aff.dzs).min(1.0);
        let mu_aff = pair_inner(
            &stepped(&it.x, &aff.dx, ap),
            &stepped_s(&it.xs, &aff.dxs, ap),
            &stepped(&it.z, &aff.dz, ad),
            &stepped_s(&it.zs, &aff.dzs, ad),
        ) / n_tot;
        let sigma = if mu > 0.0 { math::powi((mu_aff / mu).max(0.0), 3).min(1.0) } else { 0.0 };

        // corrector
        let smu = Complex64::new(sigma * mu, 0.0);
        let k: Vec<CMat> = (0..d.dims.len())
            .map(|b| {
                let second = linalg::hermitian_part(&(&aff.dx[b] * &aff.dz[b] * &zinv[b]));
                &zinv[b] * smu - &it.x[b] - second
            })
            .collect();
        let k_s: Vec<f64> = (0..m)
            .map(|c| (sigma * mu - aff.dxs[c] * aff.dzs[c]) / it.zs[c] - it.xs[c])
            .collect();
        let Some(dir) = direction(d, &it, &zinv, &fac, &rp, &rd, &rd_s, &k, &k_s) else { break };
        let ap = (STEP_FRACTION * max_step(&lx, &it.xs, &dir.dx, &dir.dxs)).min(1.0);
        let ad = (STEP_FRACTION * max_step(&lz, &it.zs, &dir.dz, &dir.dzs)).min(1.0);
        stalls = if ap < 1e-10 && ad < 1e-10 { stalls + 1 } else { 0 };

        it.x = stepped(&it.x, &dir.dx, ap).iter().map(linalg::hermitian_part).collect();
        it.xs = stepped_s(&it.xs, &dir.dxs, ap);
        it.z = stepped(&it.z, &dir.dz, ad).iter().map(linalg::hermitian_part).collect();
        it.zs = stepped_s(&it.zs, &dir.dzs, ad);
        it.y = stepped_s(&it.y, &dir.dy, ad);
        iterations += 1;
    }
    Outcome { it, iterations, converged, pinf, dinf }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sdp::{Constraint, DEFAULT_MAX_ITER, DEFAULT_TOL};
    use alloc::vec;

    fn diag(v: &[f64]) -> CMat {
        CMat::from_diagonal(&crate::linalg::CVec::from_iterator(
            v.len(),
            v.iter().map(|&x| Complex64::new(x, 0.0)),
        ))
    }

    #[test]
    fn dominant_direction_of_objective() {
        let mut p = SdpProblem::new(vec![2]);
        p.objective[0] = diag(&[2.0, 1.0]);
        p.push(Constraint::new(vec![Some(CMat::identity(2, 2))], Sense::Le, 1.0));
        let s = solve(&p, DEFAULT_TOL, DEFAULT_MAX_ITER).unwrap();
        assert_eq!(s.status, SolveStatus::Optimal);
        assert!((s.objective_value - 2.0).abs() < 1e-6);
        assert!((&s.blocks[0] - diag(&[1.0, 0.0])).norm() < 1e-6);
        assert!((s.dual_values[0] - 2.0).abs() < 1e-5);
    }

    #[test]
    fn rejects_bad_tolerance() {
        let p = SdpProblem::new(vec![1]);
        assert!(solve(&p, 0.0, 10).is_err());
        assert!(solve(&p, f64::NAN, 10).is_err());
    }

    #[test]
    fn re_tr_prod_matches_trace() {
        let a = CMat::from_fn(3, 3, |r, c| Complex64::new((r + 2 * c) as f64, r as f64 - c as f64));
        let p = CMat::from_fn(3, 3, |r, c| Complex64::new(1.0 / (1 + r + c) as f64, c as f64));
        assert!((re_tr_prod(&a, &p) - (&a * &p).trace().re).abs() < 1e-12);
    }

    #[test]
    fn step_to_boundary() {
        let l = CMat::identity(2, 2);
        let dx = diag(&[-2.0, 1.0]);
        assert!((max_step_block(&l, &dx) - 0.5).abs() < 1e-14);
        assert_eq!(max_step_block(&l, &diag(&[1.0, 0.0])), f64::INFINITY);
    }
}
