//! Empirical distribution distances, covariance estimation, and the target
//! covariance matrices of the multidimensional limit theorems.

use crate::malliavin::lemma6_sum;
use crate::primes::PrimeTable;
use crate::sampler::{SampleMatrix, ShiftSchedule};
use crate::{Error, Result};

/// Standard normal CDF via the complementary error function.
pub fn normal_cdf(x: f64) -> f64 {
    0.5 * statrs::function::erf::erfc(-x / std::f64::consts::SQRT_2)
}

/// Standard normal density.
pub fn normal_pdf(x: f64) -> f64 {
    (-0.5 * x * x).exp() / (2.0 * std::f64::consts::PI).sqrt()
}

/// Standard normal quantile function.
pub fn normal_quantile(p: f64) -> f64 {
    use statrs::distribution::ContinuousCDF;
    statrs::distribution::Normal::standard().inverse_cdf(p)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub enum DistanceMetric {
    Kolmogorov,
    Wasserstein1,
}

#[derive(Debug, Clone, serde::Serialize)]
pub struct DistanceReport {
    pub metric: DistanceMetric,
    pub value: f64,
    pub sample_size: usize,
}

fn sorted_copy(sample: &[f64]) -> Result<Vec<f64>> {
    if sample.is_empty() {
        return Err(Error::Domain("empty sample".into()));
    }
    let mut xs = sample.to_vec();
    xs.sort_unstable_by(|a, b| a.partial_cmp(b).expect("NaN in sample"));
    Ok(xs)
}

/// Two-sided Kolmogorov distance between the empirical CDF and Φ.
pub fn kolmogorov_distance(sample: &[f64]) -> Result<DistanceReport> {
    let xs = sorted_copy(sample)?;
    let n = xs.len() as f64;
    let mut sup = 0.0_f64;
    for (i, &x) in xs.iter().enumerate() {
        let phi = normal_cdf(x);
        let hi = ((i as f64 + 1.0) / n - phi).abs();
        let lo = (phi - i as f64 / n).abs();
        sup = sup.max(hi).max(lo);
    }
    Ok(DistanceReport {
        metric: DistanceMetric::Kolmogorov,
        value: sup,
        sample_size: xs.len(),
    })
}

/// ∫ Φ(t) dt from −∞ to x.
fn phi_antideriv(x: f64) -> f64 {
    x * normal_cdf(x) + normal_pdf(x)
}

/// Exact piecewise ∫ |F_M − Φ| against the standard normal.
pub fn wasserstein1_distance(sample: &[f64]) -> Result<DistanceReport> {
    let xs = sorted_copy(sample)?;
    let n = xs.len() as f64;
    // Left tail: F_M = 0, so the integrand is Φ.
    let mut total = phi_antideriv(xs[0]);
    // Right tail: integrand is 1 − Φ; ∫_x^∞ (1 − Φ) = φ(x) − x(1 − Φ(x)).
    let last = xs[xs.len() - 1];
    total += normal_pdf(last) - last * (1.0 - normal_cdf(last));
    // Between consecutive order statistics F_M = c = i/n; Φ crosses level c
    // at most once, at the normal quantile of c.
    for i in 0..xs.len() - 1 {
        let (a, b) = (xs[i], xs[i + 1]);
        if a == b {
            continue;
        }
        let c = (i as f64 + 1.0) / n;
        // ∫_lo^hi (Φ − c)
        let seg = |lo: f64, hi: f64| phi_antideriv(hi) - phi_antideriv(lo) - c * (hi - lo);
        let cross = normal_quantile(c);
        if a < cross && cross < b {
            total += -seg(a, cross) + seg(cross, b);
        } else {
            total += seg(a, b).abs();
        }
    }
    Ok(DistanceReport {
        metric: DistanceMetric::Wasserstein1,
        value: total,
        sample_size: xs.len(),
    })
}

/// Fixed-order pairwise-tree sum, independent of any thread partitioning.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    match xs.len() {
        0 => 0.0,
        1 => xs[0],
        2 => xs[0] + xs[1],
        n => {
            let mid = n / 2;
            pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
        }
    }
}

/// Sample mean via pairwise summation.
pub fn mean(xs: &[f64]) -> f64 {
    pairwise_sum(xs) / xs.len() as f64
}

/// Unbiased sample variance via pairwise summation.
pub fn variance(xs: &[f64]) -> f64 {
    let m = mean(xs);
    let sq: Vec<f64> = xs.iter().map(|&x| (x - m) * (x - m)).collect();
    pairwise_sum(&sq) / (xs.len() - 1) as f64
}

/// Unbiased sample covariance matrix of the columns of a sample matrix.
pub fn empirical_covariance(matrix: &SampleMatrix) -> Result<Vec<Vec<f64>>> {
    let m = matrix.rows;
    let d = matrix.cols;
    if m < 2 {
        return Err(Error::Domain("covariance needs at least 2 rows".into()));
    }
    let cols: Vec<Vec<f64>> = (0..d).map(|j| matrix.column(j)).collect();
    let means: Vec<f64> = cols.iter().map(|c| mean(c)).collect();
    let mut cov = vec![vec![0.0; d]; d];
    for i in 0..d {
        for j in i..d {
            let prods: Vec<f64> = (0..m)
                .map(|r| (cols[i][r] - means[i]) * (cols[j][r] - means[j]))
                .collect();
            let v = pairwise_sum(&prods) / (m - 1) as f64;
            cov[i][j] = v;
            cov[j][i] = v;
        }
    }
    Ok(cov)
}

/// Correlation matrix derived from a covariance matrix.
pub fn correlation_from_covariance(cov: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let d = cov.len();
    let mut corr = vec![vec![0.0; d]; d];
    for i in 0..d {
        for j in 0..d {
            corr[i][j] = cov[i][j] / (cov[i][i] * cov[j][j]).sqrt();
        }
    }
    corr
}

/// Limit covariance matrix of the shifted vector together with its finite-T
/// surrogate.
#[derive(Debug, Clone, serde::Serialize)]
pub struct CovarianceTarget {
    pub dimension: usize,
    /// Limit matrix: identity for big shifts, c_ij = a_ij ∧ 1 for small ones.
    pub matrix: Vec<Vec<f64>>,
    /// Finite-T surrogate with off-diagonal entries from the Lemma-6 prime sum.
    pub finite_t_matrix: Vec<Vec<f64>>,
}

/// Target covariance of the normalized vector for the given schedule.
///
/// Big shifts give the identity in both matrices. For small shifts the limit
/// entry is clamp(a_ij, 0, 1) with a_ij the decay exponent of the offset
/// difference on the log log T scale, and the finite-T entry is the Lemma-6
/// prime sum at the actual offset difference.
pub fn target_covariance(
    table: &PrimeTable,
    schedule: &ShiftSchedule,
    t_cap: f64,
) -> Result<CovarianceTarget> {
    if t_cap < 16.0 {
        return Err(Error::Domain(format!(
            "target_covariance requires t_cap ≥ 16, got {t_cap}"
        )));
    }
    let d = schedule.points();
    let mut limit = vec![vec![0.0; d]; d];
    let mut finite = vec![vec![0.0; d]; d];
    for i in 0..d {
        limit[i][i] = 1.0;
        finite[i][i] = 1.0;
    }
    if !schedule.is_big() {
        let lnln = t_cap.ln().ln();
        for i in 0..d {
            for j in (i + 1)..d {
                let diff = (schedule.offset(i, t_cap)? - schedule.offset(j, t_cap)?).abs();
                let a_ij = if diff == 0.0 {
                    f64::INFINITY
                } else {
                    -diff.ln() / lnln
                };
                let c = a_ij.clamp(0.0, 1.0);
                limit[i][j] = c;
                limit[j][i] = c;
                let s = lemma6_sum(table, t_cap, diff)?;
                finite[i][j] = s;
                finite[j][i] = s;
            }
        }
    }
    Ok(CovarianceTarget {
        dimension: d,
        matrix: limit,
        finite_t_matrix: finite,
    })
}

fn check_window(alpha: f64, beta: f64) -> Result<()> {
    if !(0.0 <= alpha && alpha < beta) {
        return Err(Error::Domain(format!(
            "window must satisfy 0 ≤ α < β, got ({alpha}, {beta})"
        )));
    }
    Ok(())
}

/// Mesoscopic zero-count covariance kernel, as printed:
/// 1[α=α′, β=β′] + ½·1[α=α′, β≠β′] + ½·1[α≠α′, β=β′] − ½·1[β=α′].
pub fn mesoscopic_covariance(alpha: f64, beta: f64, alpha2: f64, beta2: f64) -> Result<f64> {
    check_window(alpha, beta)?;
    check_window(alpha2, beta2)?;
    let mut v = 0.0;
    if alpha == alpha2 && beta == beta2 {
        v += 1.0;
    }
    if alpha == alpha2 && beta != beta2 {
        v += 0.5;
    }
    if alpha != alpha2 && beta == beta2 {
        v += 0.5;
    }
    if beta == alpha2 {
        v -= 0.5;
    }
    Ok(v)
}

/// Symmetrized variant of the kernel: adds the mirror term −½·1[β′=α] so the
/// kernel is invariant under exchanging the two windows.
pub fn mesoscopic_covariance_symmetrized(
    alpha: f64,
    beta: f64,
    alpha2: f64,
    beta2: f64,
) -> Result<f64> {
    let mut v = mesoscopic_covariance(alpha, beta, alpha2, beta2)?;
    if beta2 == alpha {
        v -= 0.5;
    }
    Ok(v)
}
