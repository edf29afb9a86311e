//! Fast, accurate sine/cosine for large arguments of the form t·log p.
//!
//! Library `sin`/`cos` fall back to a slow huge-argument reduction path above
//! ~1e8, which dominates the cost of the prime-sum evaluators. We instead
//! reduce the argument modulo 2π with a Cody–Waite scheme whose constants are
//! 15-bit chunks of 2π: for |x| ≤ 1e12 the reduction multiplier k satisfies
//! k < 2^38, so every product k·Cᵢ is exact in double precision and the
//! reduced argument carries an absolute error below ~1e-14 — Payne–Hanek
//! quality over the supported range at a fraction of the cost.

/// Largest argument magnitude the reduction is specified for. Callers cap
/// the maximum phase t·log p at this value; beyond it the f64 representation
/// of the phase itself has already lost the accuracy the experiments rely on.
pub const PHASE_CAP: f64 = 1e12;

const INV_2PI: f64 = 0.159_154_943_091_895_35;

// 2π split into five 15-bit chunks plus an f64 tail. Σ Cᵢ reproduces 2π to
// ~128 bits; each of C1..C5 has a 15-bit significand so k·Cᵢ is exact for
// integer k < 2^38 = 2.7e11 (covers |x| ≤ 1e12, where k ≤ 1.6e11).
const C1: f64 = 6.282_958_984_375;
const C2: f64 = 2.263_188_362_121_582e-4;
const C3: f64 = 3.968_352_757_510_729e-9;
const C4: f64 = 2.156_087_808_291_573_5e-14;
const C5: f64 = 3.333_471_694_139_697_3e-19;
const C6: f64 = 2.547_326_865_404_38e-24;

/// Reduce `x` to r ∈ [−π, π] with x ≡ r (mod 2π), exact to a few ulps of r
/// for |x| ≤ [`PHASE_CAP`].
#[inline]
pub fn reduce_2pi(x: f64) -> f64 {
    debug_assert!(x.abs() <= PHASE_CAP * 1.000_001);
    let k = (x * INV_2PI).round();
    let mut r = x - k * C1;
    r -= k * C2;
    r -= k * C3;
    r -= k * C4;
    r -= k * C5;
    r -= k * C6;
    r
}

/// sin(x) for |x| ≤ [`PHASE_CAP`].
#[inline]
pub fn sin(x: f64) -> f64 {
    reduce_2pi(x).sin()
}

/// cos(x) for |x| ≤ [`PHASE_CAP`].
#[inline]
pub fn cos(x: f64) -> f64 {
    reduce_2pi(x).cos()
}

/// (sin(x), cos(x)) for |x| ≤ [`PHASE_CAP`].
#[inline]
pub fn sin_cos(x: f64) -> (f64, f64) {
    reduce_2pi(x).sin_cos()
}
