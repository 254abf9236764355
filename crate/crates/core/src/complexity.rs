//! Leading-order operation counts of each strategy, with unit constants.

use crate::beamform::Method;
use crate::math;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ComplexityInputs {
    pub m: usize,
    pub k_i: usize,
    pub k_e: usize,
    pub r_i: usize,
    pub r_e: usize,
}

impl ComplexityInputs {
    /// Uses the minimal interference-free ranks `r_I = K_I - 1`, `r_E = K_I`.
    pub fn with_default_ranks(m: usize, k_i: usize, k_e: usize) -> Self {
        ComplexityInputs { m, k_i, k_e, r_i: k_i.saturating_sub(1), r_e: k_i }
    }
}

/// `x^3.5` as `x^3 sqrt(x)`.
fn p35(x: f64) -> f64 {
    x * x * x * math::sqrt(x)
}

fn cube(x: f64) -> f64 {
    x * x * x
}

pub fn complexity_of(method: Method, inp: &ComplexityInputs) -> f64 {
    let m = inp.m as f64;
    let ki = inp.k_i as f64;
    let ke = inp.k_e as f64;
    let ni = m - inp.r_i as f64;
    let ne = m - inp.r_e as f64;
    let ri = inp.r_i as f64;
    let null_space = ki * m * (ki - 1.0) * (ki - 1.0);
    match method {
        Method::Alg1 => p35(ki) * p35(ni) + ki * cube(ni) + ki * ke * cube(m) + null_space - ki * ke * m * m * ri,
        Method::P24 => {
            p35(ki) * p35(ni) + p35(ne) + ki * cube(ni) + cube(ne) + ki * ke * cube(m) + null_space + m * ki * ki
                - ki * ke * m * m * ri
        }
        Method::Alg2 => cube(ne) + ki * m * m * ni + null_space + m * ki * ki,
        Method::Benchmark => (p35(ki) + 1.0) * p35(m) + (ki + 1.0) * cube(m),
        Method::BenchmarkNoV => p35(ki) * p35(m) + ki * cube(m),
    }
}

/// `100 (1 - C_a / C_b)` percent.
pub fn reduction_ratio(a: Method, b: Method, inp: &ComplexityInputs) -> f64 {
    100.0 * (1.0 - complexity_of(a, inp) / complexity_of(b, inp))
}
