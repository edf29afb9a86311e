//! Closed-form Stein–Malliavin discrepancy expressions and the Monte Carlo
//! statistics built on them.
//!
//! Every double sum over prime pairs (p₁, p₂) factorizes exactly into
//! products of four single prime sums:
//!
//! - C(t)  = Σ (log p/√p)·sin(t log p)   (heavy sine sum)
//! - D(t)  = Σ sin(t log p)/(√p log p)   (light sine sum)
//! - Ch(t) = Σ (log p/√p)·cos(t log p)   (heavy cosine sum)
//! - Cd(t) = Σ cos(t log p)/(√p log p)   (light cosine sum)
//!
//! so all evaluators run in O(π(T)) per draw instead of O(π(T)²).

use rayon::prelude::*;

use crate::primes::{Kahan, PrimeTable};
use crate::sampler::{row_rng, sample_u, Part, SampleMode, ShiftSchedule};
use crate::stats;
use crate::trig;
use crate::{Error, Result};

/// E U^k = 1/(k+1) for U uniform on (0,1].
pub fn u_moment(k: f64) -> Result<f64> {
    if k <= 0.0 {
        return Err(Error::Domain(format!("u_moment requires k > 0, got {k}")));
    }
    Ok(1.0 / (k + 1.0))
}

/// Closed form of the auxiliary Gaussian expectation
/// E' exp(−k[(a·wf + √(1−a²)Z₁)² + (a·wg + √(1−a²)Z₂)²]).
pub fn aux_g_expectation(k: f64, a: f64, wf: f64, wg: f64) -> f64 {
    let denom = 1.0 + 2.0 * k * (1.0 - a * a);
    (1.0 / denom) * (-k * a * a * (wf * wf + wg * wg) / denom).exp()
}

/// Which Gaussian coordinate carries the linear factor in the mixed
/// auxiliary expectation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Which {
    F,
    G,
}

/// Closed form of E'[Z₁ · exp(−k(a·w + √(1−a²)Z₁)² − k(a·w' + √(1−a²)Z₂)²)],
/// with w = wf or wg according to `which`.
pub fn aux_gw_expectation(k: f64, a: f64, wf: f64, wg: f64, which: Which) -> f64 {
    let w = match which {
        Which::F => wf,
        Which::G => wg,
    };
    let denom = 1.0 + 2.0 * k * (1.0 - a * a);
    -(-k * a * a * (wf * wf + wg * wg) / denom).exp() * 2.0 * k * a * w
        * (1.0 - a * a).sqrt()
        / (denom * denom)
}

/// Symmetrized Malliavin bracket for the pair (U^{2k} − E, U^{2l} − E):
/// u^{2k}·(2k/(2l+1))·(1 − u^{2l}) + u^{2l}·(2l/(2k+1))·(1 − u^{2k}).
/// Valid for real positive orders (odd powers enter via half-integers).
pub fn lemma1_cross(k: f64, l: f64, u: f64) -> f64 {
    u.powf(2.0 * k) * (2.0 * k / (2.0 * l + 1.0)) * (1.0 - u.powf(2.0 * l))
        + u.powf(2.0 * l) * (2.0 * l / (2.0 * k + 1.0)) * (1.0 - u.powf(2.0 * k))
}

fn check(table: &PrimeTable, t_cap: f64, t: f64) -> Result<usize> {
    if t_cap > table.limit as f64 {
        return Err(Error::OutOfRange(format!(
            "t_cap = {t_cap} exceeds table limit {}",
            table.limit
        )));
    }
    // Largest phase in any term is |t|·log p with p ≤ t_cap.
    let phase = t.abs() * t_cap.max(2.0).ln();
    if phase > trig::PHASE_CAP {
        return Err(Error::PhaseCap {
            phase,
            cap: trig::PHASE_CAP,
        });
    }
    Ok(table.count_upto(t_cap))
}

fn sin_sums(table: &PrimeTable, n: usize, t: f64) -> (f64, f64) {
    let (mut kc, mut kd) = (Kahan::default(), Kahan::default());
    for i in 0..n {
        let lp = table.ln_p[i];
        let s = trig::sin(t * lp) * table.inv_sqrt_p[i];
        kc.add(s * lp);
        kd.add(s / lp);
    }
    (kc.value(), kd.value())
}

fn cos_sums(table: &PrimeTable, n: usize, t: f64) -> (f64, f64) {
    let (mut kc, mut kd) = (Kahan::default(), Kahan::default());
    for i in 0..n {
        let lp = table.ln_p[i];
        let c = trig::cos(t * lp) * table.inv_sqrt_p[i];
        kc.add(c * lp);
        kd.add(c / lp);
    }
    (kc.value(), kd.value())
}

/// Diagonal real-part discrepancy ⟨DX_T, D(−L)^{−1}X_T⟩ in factorized form:
/// C(Tu)·(D(Tu) − u·D(T)).
pub fn discrepancy_real(table: &PrimeTable, t_cap: f64, u: f64) -> Result<f64> {
    let n = check(table, t_cap, t_cap)?;
    let (_, d_t) = sin_sums(table, n, t_cap);
    let (c_u, d_u) = sin_sums(table, n, t_cap * u);
    Ok(c_u * (d_u - u * d_t))
}

/// Diagonal imaginary-part discrepancy in factorized form:
/// Ch(Tu)·(Cd(Tu) − u·Cd(T) + (u−1)·Cd(0)).
pub fn discrepancy_imag(table: &PrimeTable, t_cap: f64, u: f64) -> Result<f64> {
    let n = check(table, t_cap, t_cap)?;
    let (_, cd_t) = cos_sums(table, n, t_cap);
    let (_, cd_0) = cos_sums(table, n, 0.0);
    let (ch_u, cd_u) = cos_sums(table, n, t_cap * u);
    Ok(ch_u * (cd_u - u * cd_t + (u - 1.0) * cd_0))
}

/// Symmetrized big-shift cross discrepancy
/// ⟨DX^(i), D(−L)^{−1}X^(j)⟩ + ⟨DX^(j), D(−L)^{−1}X^(i)⟩ in factorized form.
///
/// Real part:
///   C((u+j)T)·[D((u+i)T) + (u−1)·D(iT) − u·D((i+1)T)] + (i ↔ j);
/// imaginary part replaces C, D by their cosine analogues (with the constant
/// light sum Cd(0) entering through the i = 0 terms).
pub fn discrepancy_cross_big(
    table: &PrimeTable,
    t_cap: f64,
    u: f64,
    i: usize,
    j: usize,
    part: Part,
) -> Result<f64> {
    let d = *[i, j].iter().max().unwrap() as f64 + 1.0;
    let n = check(table, t_cap, d * t_cap)?;
    let (fi, fj) = (i as f64 * t_cap, j as f64 * t_cap);
    cross_from_sums(table, n, t_cap, u, fi, fj, part)
}

/// Symmetrized small-shift cross discrepancy at offsets f_i, f_j:
///   C(Tu+f_j)·[D(Tu+f_i) + (u−1)·D(f_i) − u·D(T+f_i)] + (i ↔ j)
/// for the real part, cosine analogues for the imaginary part.
pub fn discrepancy_cross_small(
    table: &PrimeTable,
    t_cap: f64,
    u: f64,
    f_i: f64,
    f_j: f64,
    part: Part,
) -> Result<f64> {
    if f_i < 0.0 || f_j < 0.0 {
        return Err(Error::Domain("shift offsets must be ≥ 0".into()));
    }
    let n = check(table, t_cap, t_cap + f_i.max(f_j))?;
    cross_from_sums(table, n, t_cap, u, f_i, f_j, part)
}

/// Shared factorized evaluation: big shifts are the special case f = i·T.
fn cross_from_sums(
    table: &PrimeTable,
    n: usize,
    t_cap: f64,
    u: f64,
    f_i: f64,
    f_j: f64,
    part: Part,
) -> Result<f64> {
    let heavy_light = |t: f64| match part {
        Part::Real => sin_sums(table, n, t),
        Part::Imaginary => cos_sums(table, n, t),
    };
    let (heavy_i, light_i) = heavy_light(t_cap * u + f_i);
    let (heavy_j, light_j) = if f_j == f_i {
        (heavy_i, light_i)
    } else {
        heavy_light(t_cap * u + f_j)
    };
    let (_, light_at_fi) = heavy_light(f_i);
    let (_, light_at_fj) = heavy_light(f_j);
    let (_, light_at_tfi) = heavy_light(t_cap + f_i);
    let (_, light_at_tfj) = heavy_light(t_cap + f_j);
    Ok(heavy_j * (light_i + (u - 1.0) * light_at_fi - u * light_at_tfi)
        + heavy_i * (light_j + (u - 1.0) * light_at_fj - u * light_at_tfj))
}

/// Lemma-6 prime sum: (1/log log T) Σ_{p≤T} cos(δ log p)/p.
pub fn lemma6_sum(table: &PrimeTable, t_cap: f64, delta: f64) -> Result<f64> {
    if t_cap < 16.0 {
        return Err(Error::Domain(format!(
            "lemma6_sum requires t_cap ≥ 16, got {t_cap}"
        )));
    }
    let n = check(table, t_cap, delta)?;
    let mut k = Kahan::default();
    for i in 0..n {
        k.add(trig::cos(delta * table.ln_p[i]) / table.primes[i] as f64);
    }
    Ok(k.value() / t_cap.ln().ln())
}

/// Monte Carlo summary of a Stein–Malliavin discrepancy statistic for one
/// evaluation-point pair.
#[derive(Debug, Clone, serde::Serialize)]
pub struct DiscrepancyReport {
    pub t_cap: f64,
    pub pair: (usize, usize),
    /// E|1 − normalized diagonal| or E|2c_ij − normalized cross sum|.
    pub statistic: f64,
    pub std_error: f64,
    pub samples: usize,
    /// The covariance target c_ij entering the bound.
    pub target_c: f64,
}

/// Monte Carlo estimate of the Stein–Malliavin discrepancy statistic.
///
/// Diagonal pairs measure E|1 − ⟨DF, D(−L)^{−1}F⟩| with the normalization
/// (1/2)·log log T; off-diagonal pairs measure E|2c_ij − cross sum|.
pub fn stein_statistic(
    table: &PrimeTable,
    t_cap: f64,
    schedule: &ShiftSchedule,
    part: Part,
    pair: (usize, usize),
    m: usize,
    seed: u64,
) -> Result<DiscrepancyReport> {
    schedule.validate()?;
    if m < 100 {
        return Err(Error::Domain(format!(
            "stein_statistic requires M ≥ 100, got {m}"
        )));
    }
    let (i, j) = pair;
    let points = schedule.points();
    if i >= points || j >= points {
        return Err(Error::Domain(format!(
            "pair ({i},{j}) out of range for a {points}-point schedule"
        )));
    }
    let norm = 0.5 * t_cap.ln().ln();
    if !(norm > 0.0) {
        return Err(Error::Domain(format!(
            "stein_statistic requires t_cap ≥ 16, got {t_cap}"
        )));
    }
    let (f_i, f_j) = if schedule.is_big() {
        (i as f64 * t_cap, j as f64 * t_cap)
    } else {
        (schedule.offset(i, t_cap)?, schedule.offset(j, t_cap)?)
    };
    let n = check(table, t_cap, t_cap + f_i.max(f_j))?;

    // u-independent light sums.
    let heavy_light = |t: f64| match part {
        Part::Real => sin_sums(table, n, t),
        Part::Imaginary => cos_sums(table, n, t),
    };
    let light_at_fi = heavy_light(f_i).1;
    let light_at_fj = heavy_light(f_j).1;
    let light_at_tfi = heavy_light(t_cap + f_i).1;
    let light_at_tfj = heavy_light(t_cap + f_j).1;

    let target = stats::target_covariance(table, schedule, t_cap)?;
    let c_ij = target.matrix[i][j];

    let values: Vec<f64> = (0..m)
        .into_par_iter()
        .map(|r| {
            let mut rng = row_rng(seed, r as u64);
            let u = sample_u(&mut rng, SampleMode::Direct).u;
            let (heavy_i, light_i) = heavy_light(t_cap * u + f_i);
            let (heavy_j, light_j) = if f_j == f_i {
                (heavy_i, light_i)
            } else {
                heavy_light(t_cap * u + f_j)
            };
            let cross = heavy_j * (light_i + (u - 1.0) * light_at_fi - u * light_at_tfi)
                + heavy_i * (light_j + (u - 1.0) * light_at_fj - u * light_at_tfj);
            if i == j {
                // The symmetrized bracket double-counts the diagonal.
                (1.0 - (cross / 2.0) / norm).abs()
            } else {
                (2.0 * c_ij - cross / norm).abs()
            }
        })
        .collect();
    let statistic = stats::mean(&values);
    let std_error = (stats::variance(&values) / m as f64).sqrt();
    Ok(DiscrepancyReport {
        t_cap,
        pair,
        statistic,
        std_error,
        samples: m,
        target_c: c_ij,
    })
}
