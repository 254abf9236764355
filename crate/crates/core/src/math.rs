//! f64 helpers that resolve to `std` when available and to `libm` otherwise.

use num_traits::Float;

#[inline]
pub fn sqrt(x: f64) -> f64 {
    Float::sqrt(x)
}

#[inline]
pub fn exp(x: f64) -> f64 {
    Float::exp(x)
}


#[inline]
pub fn log2(x: f64) -> f64 {
    Float::log2(x)
}

#[inline]
pub fn log10(x: f64) -> f64 {
    Float::log10(x)
}

#[inline]
pub fn powf(x: f64, e: f64) -> f64 {
    Float::powf(x, e)
}

#[inline]
pub fn powi(x: f64, e: i32) -> f64 {
    Float::powi(x, e)
}

#[inline]
pub fn sin(x: f64) -> f64 {
    Float::sin(x)
}

