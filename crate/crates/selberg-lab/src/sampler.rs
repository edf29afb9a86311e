//! Uniform height draws and the centered, normalized Dirichlet polynomials
//! that approximate log zeta on the critical line.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::primes::{Kahan, PrimeTable};
use crate::trig;
use crate::{Error, Result};

/// A draw of the uniform height variable, optionally carrying the Gaussian
/// pair that represents it as U = exp(−(wf² + wg²)/2).
#[derive(Debug, Clone, Copy)]
pub struct UniformDraw {
    pub u: f64,
    pub wf: Option<f64>,
    pub wg: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum SampleMode {
    Direct,
    GaussianPair,
}

/// Real or imaginary component of the Dirichlet polynomial.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum Part {
    Real,
    Imaginary,
}

/// Evaluation-point layout: big shifts t_i = T(u+i), small shifts
/// t_i = Tu + f_T^(i) with f_T^(i) = (log T)^{−δ_i} (δ = ∞ meaning offset 0),
/// or explicitly listed offsets.
#[derive(Debug, Clone, PartialEq)]
pub enum ShiftSchedule {
    Big { dimension: usize },
    Small { exponents: Vec<f64> },
    Explicit { offsets: Vec<f64> },
}

impl ShiftSchedule {
    /// Number of evaluation points (d+1).
    pub fn points(&self) -> usize {
        match self {
            ShiftSchedule::Big { dimension } => *dimension,
            ShiftSchedule::Small { exponents } => exponents.len(),
            ShiftSchedule::Explicit { offsets } => offsets.len(),
        }
    }

    pub fn is_big(&self) -> bool {
        matches!(self, ShiftSchedule::Big { .. })
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            ShiftSchedule::Big { dimension } => {
                if *dimension == 0 {
                    return Err(Error::Config {
                        field: "schedule".into(),
                        message: "big schedule needs at least one point".into(),
                    });
                }
            }
            ShiftSchedule::Small { exponents } => {
                if exponents.is_empty() {
                    return Err(Error::Config {
                        field: "schedule".into(),
                        message: "small schedule needs at least one exponent".into(),
                    });
                }
                for w in exponents.windows(2) {
                    // Strictly decreasing exponents give strictly increasing
                    // offsets (log T)^{−δ}.
                    if !(w[1] < w[0]) {
                        return Err(Error::Config {
                            field: "schedule".into(),
                            message: format!(
                                "small-shift exponents must be strictly decreasing, got {} then {}",
                                w[0], w[1]
                            ),
                        });
                    }
                }
                if exponents.iter().any(|&d| d <= 0.0) {
                    return Err(Error::Config {
                        field: "schedule".into(),
                        message: "small-shift exponents must be positive (or inf)".into(),
                    });
                }
            }
            ShiftSchedule::Explicit { offsets } => {
                if offsets.is_empty() {
                    return Err(Error::Config {
                        field: "schedule".into(),
                        message: "explicit schedule needs at least one offset".into(),
                    });
                }
                if offsets[0] < 0.0 {
                    return Err(Error::Config {
                        field: "schedule".into(),
                        message: "offsets must be non-negative".into(),
                    });
                }
                for w in offsets.windows(2) {
                    if !(w[1] > w[0]) {
                        return Err(Error::Config {
                            field: "schedule".into(),
                            message: "explicit offsets must be strictly increasing".into(),
                        });
                    }
                }
            }
        }
        Ok(())
    }

    /// Additive offset f_T^(i) for small-type schedules; big shifts have no
    /// additive offset (the point is t_i = T(u+i)).
    pub fn offset(&self, i: usize, t_cap: f64) -> Result<f64> {
        match self {
            ShiftSchedule::Big { .. } => Ok(0.0),
            ShiftSchedule::Small { exponents } => {
                let d = exponents[i];
                Ok(if d.is_infinite() { 0.0 } else { t_cap.ln().powf(-d) })
            }
            ShiftSchedule::Explicit { offsets } => Ok(offsets[i]),
        }
    }

    /// Evaluation point t_i for a given draw u.
    pub fn point(&self, i: usize, t_cap: f64, u: f64) -> Result<f64> {
        match self {
            ShiftSchedule::Big { .. } => Ok(t_cap * (u + i as f64)),
            _ => Ok(t_cap * u + self.offset(i, t_cap)?),
        }
    }
}

/// Deterministic per-row random stream: one ChaCha key per seed, one stream
/// per row index, so any partitioning of rows reproduces the same values.
pub fn row_rng(seed: u64, row: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(row);
    rng
}

/// Draw the uniform height variable on (0,1].
pub fn sample_u<R: Rng>(rng: &mut R, mode: SampleMode) -> UniformDraw {
    match mode {
        SampleMode::Direct => UniformDraw {
            u: 1.0 - rng.random::<f64>(),
            wf: None,
            wg: None,
        },
        SampleMode::GaussianPair => {
            // Box–Muller from two uniforms in (0,1].
            let u1 = 1.0 - rng.random::<f64>();
            let u2 = rng.random::<f64>();
            let r = (-2.0 * u1.ln()).sqrt();
            let (s, c) = (std::f64::consts::TAU * u2).sin_cos();
            let (wf, wg) = (r * c, r * s);
            UniformDraw {
                u: (-(wf * wf + wg * wg) / 2.0).exp(),
                wf: Some(wf),
                wg: Some(wg),
            }
        }
    }
}

fn check_phase(t_cap: f64, t: f64) -> Result<()> {
    // Largest phase in any term is |t|·log p with p ≤ t_cap.
    let phase = t.abs() * t_cap.max(2.0).ln();
    if phase > trig::PHASE_CAP {
        return Err(Error::PhaseCap {
            phase,
            cap: trig::PHASE_CAP,
        });
    }
    Ok(())
}

fn check_table(table: &PrimeTable, t_cap: f64) -> Result<()> {
    if t_cap > table.limit as f64 {
        return Err(Error::OutOfRange(format!(
            "t_cap = {t_cap} exceeds table limit {}",
            table.limit
        )));
    }
    Ok(())
}

/// Σ_{p ≤ t_cap} cos(t log p)/√p in ascending prime order.
pub fn dirichlet_real(table: &PrimeTable, t_cap: f64, t: f64) -> Result<f64> {
    check_table(table, t_cap)?;
    check_phase(t_cap, t)?;
    let n = table.count_upto(t_cap);
    let mut k = Kahan::default();
    for i in 0..n {
        k.add(trig::cos(t * table.ln_p[i]) * table.inv_sqrt_p[i]);
    }
    Ok(k.value())
}

/// Σ_{p ≤ t_cap} sin(t log p)/√p in ascending prime order.
pub fn dirichlet_imag(table: &PrimeTable, t_cap: f64, t: f64) -> Result<f64> {
    check_table(table, t_cap)?;
    check_phase(t_cap, t)?;
    let n = table.count_upto(t_cap);
    let mut k = Kahan::default();
    for i in 0..n {
        k.add(trig::sin(t * table.ln_p[i]) * table.inv_sqrt_p[i]);
    }
    Ok(k.value())
}

/// Exact mean over u ∈ [0,1] of the trig factor at evaluation point `i`.
///
/// Big shifts, real part: [sin(T(i+1) log p) − sin(Ti log p)]/(T log p);
/// imaginary part: [cos(Ti log p) − cos(T(i+1) log p)]/(T log p). Small
/// shifts use the same integrals at t = Tu + f_T^(i).
pub fn centering_mean(
    t_cap: f64,
    p: u64,
    schedule: &ShiftSchedule,
    i: usize,
    part: Part,
) -> Result<f64> {
    if (p as f64) > t_cap {
        return Err(Error::Domain(format!("prime {p} exceeds t_cap {t_cap}")));
    }
    let lp = (p as f64).ln();
    let tl = t_cap * lp;
    let (lo, hi) = if schedule.is_big() {
        (i as f64 * tl, (i as f64 + 1.0) * tl)
    } else {
        let f = schedule.offset(i, t_cap)? * lp;
        (f, tl + f)
    };
    Ok(match part {
        Part::Real => (trig::sin(hi) - trig::sin(lo)) / tl,
        Part::Imaginary => (trig::cos(lo) - trig::cos(hi)) / tl,
    })
}

/// M × (d+1) matrix of centered, normalized Dirichlet-polynomial values, one
/// row per Monte Carlo draw of u.
#[derive(Debug, Clone)]
pub struct SampleMatrix {
    pub t_cap: f64,
    pub rows: usize,
    pub cols: usize,
    /// Row-major values.
    pub values: Vec<f64>,
    pub part: Part,
    pub seed: u64,
}

impl SampleMatrix {
    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.rows).map(|r| self.values[r * self.cols + j]).collect()
    }
}

/// Normalization √((1/2) log log T).
pub fn normalization(t_cap: f64) -> Result<f64> {
    if t_cap < 16.0 {
        return Err(Error::Domain(format!(
            "normalization requires t_cap ≥ 16, got {t_cap}"
        )));
    }
    Ok((0.5 * t_cap.ln().ln()).sqrt())
}

/// One row of centered, normalized values for a given draw u.
pub fn sample_row(
    table: &PrimeTable,
    t_cap: f64,
    schedule: &ShiftSchedule,
    part: Part,
    u: f64,
    centering: &[f64],
) -> Result<Vec<f64>> {
    let norm = normalization(t_cap)?;
    let mut row = Vec::with_capacity(schedule.points());
    for i in 0..schedule.points() {
        let t = schedule.point(i, t_cap, u)?;
        let raw = match part {
            Part::Real => dirichlet_real(table, t_cap, t)?,
            Part::Imaginary => dirichlet_imag(table, t_cap, t)?,
        };
        row.push((raw - centering[i]) / norm);
    }
    Ok(row)
}

/// Σ_p centering_mean(p, i)/√p for each point i; u-independent, computed once.
pub fn centering_sums(
    table: &PrimeTable,
    t_cap: f64,
    schedule: &ShiftSchedule,
    part: Part,
) -> Result<Vec<f64>> {
    let n = table.count_upto(t_cap);
    let mut out = Vec::with_capacity(schedule.points());
    for i in 0..schedule.points() {
        let mut k = Kahan::default();
        for idx in 0..n {
            let p = table.primes[idx] as u64;
            k.add(centering_mean(t_cap, p, schedule, i, part)? * table.inv_sqrt_p[idx]);
        }
        out.push(k.value());
    }
    Ok(out)
}

/// Build the full Monte Carlo sample matrix. Deterministic given the seed and
/// independent of thread partitioning.
pub fn build_sample_matrix(
    table: &PrimeTable,
    t_cap: f64,
    schedule: &ShiftSchedule,
    part: Part,
    m: usize,
    seed: u64,
) -> Result<SampleMatrix> {
    schedule.validate()?;
    check_table(table, t_cap)?;
    normalization(t_cap)?;
    if m == 0 {
        return Err(Error::Domain("sample count must be ≥ 1".into()));
    }
    // Reject up front if the largest evaluation point can exceed the phase cap.
    let max_t = match schedule {
        ShiftSchedule::Big { dimension } => t_cap * *dimension as f64,
        _ => t_cap + schedule.offset(schedule.points() - 1, t_cap)?,
    };
    check_phase(t_cap, max_t)?;

    let centering = centering_sums(table, t_cap, schedule, part)?;
    let rows: Vec<Vec<f64>> = (0..m)
        .into_par_iter()
        .map(|r| {
            let mut rng = row_rng(seed, r as u64);
            let u = sample_u(&mut rng, SampleMode::Direct).u;
            sample_row(table, t_cap, schedule, part, u, &centering)
        })
        .collect::<Result<_>>()?;
    let cols = schedule.points();
    let mut values = Vec::with_capacity(m * cols);
    for row in rows {
        values.extend_from_slice(&row);
    }
    Ok(SampleMatrix {
        t_cap,
        rows: m,
        cols,
        values,
        part,
        seed,
    })
}

/// Closed-form prediction of the variance of the normalized one-point
/// real-part value: Σ_p Var(cos(Tu log p))/p divided by (1/2) log log T,
/// with the per-prime moments from exact integrals over u.
pub fn predicted_variance(table: &PrimeTable, t_cap: f64) -> Result<f64> {
    check_table(table, t_cap)?;
    let norm_sq = 0.5 * t_cap.ln().ln();
    let n = table.count_upto(t_cap);
    let mut k = Kahan::default();
    for i in 0..n {
        let tl = t_cap * table.ln_p[i];
        let mean = trig::sin(tl) / tl;
        let second = 0.5 + trig::sin(2.0 * tl) / (4.0 * tl);
        k.add((second - mean * mean) / (table.primes[i] as f64));
    }
    Ok(k.value() / norm_sq)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::primes::build_prime_table;

    #[test]
    fn gaussian_pair_identity_points() {
        // u = exp(−(wf²+wg²)/2) is honored by construction.
        let mut rng = row_rng(1, 0);
        for _ in 0..100 {
            let d = sample_u(&mut rng, SampleMode::GaussianPair);
            let s = d.wf.unwrap().powi(2) + d.wg.unwrap().powi(2);
            assert!((d.u - (-s / 2.0).exp()).abs() < 1e-15);
            assert!(d.u > 0.0 && d.u <= 1.0);
        }
    }

    #[test]
    fn sample_u_deterministic_across_instances() {
        let mut a = row_rng(42, 7);
        let mut b = row_rng(42, 7);
        assert_eq!(
            sample_u(&mut a, SampleMode::Direct).u,
            sample_u(&mut b, SampleMode::Direct).u
        );
    }

    #[test]
    fn both_modes_are_uniform() {
        // Kolmogorov distance of u against Uniform(0,1) within the 1% KS band.
        let m = 10_000;
        for mode in [SampleMode::Direct, SampleMode::GaussianPair] {
            let mut us: Vec<f64> = (0..m)
                .map(|r| sample_u(&mut row_rng(3, r), mode).u)
                .collect();
            us.sort_unstable_by(|a, b| a.partial_cmp(b).unwrap());
            let n = us.len() as f64;
            let mut sup = 0.0_f64;
            for (i, &x) in us.iter().enumerate() {
                sup = sup
                    .max(((i as f64 + 1.0) / n - x).abs())
                    .max((x - i as f64 / n).abs());
            }
            assert!(sup <= 1.63 / n.sqrt(), "mode {mode:?}: d_K = {sup}");
        }
    }

    #[test]
    fn dirichlet_trivial_values() {
        let t = build_prime_table(100).unwrap();
        let v = dirichlet_real(&t, 2.0, 0.0).unwrap();
        assert!((v - 1.0 / 2.0_f64.sqrt()).abs() < 1e-15);
        let v = dirichlet_real(&t, 2.0, std::f64::consts::PI / 2.0_f64.ln()).unwrap();
        assert!((v + 1.0 / 2.0_f64.sqrt()).abs() < 1e-12);
        let v = dirichlet_real(&t, 10.0, 0.0).unwrap();
        let want: f64 = [2.0, 3.0, 5.0, 7.0_f64].iter().map(|p| 1.0 / p.sqrt()).sum();
        assert!((v - want).abs() < 1e-14);
        assert_eq!(dirichlet_imag(&t, 10.0, 0.0).unwrap(), 0.0);
        let v = dirichlet_imag(&t, 2.0, std::f64::consts::FRAC_PI_2 / 2.0_f64.ln()).unwrap();
        assert!((v - 1.0 / 2.0_f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn dirichlet_imag_direct_sum() {
        let t = build_prime_table(10).unwrap();
        let v = dirichlet_imag(&t, 3.0, 1.0).unwrap();
        let want = 2.0_f64.ln().sin() / 2.0_f64.sqrt() + 3.0_f64.ln().sin() / 3.0_f64.sqrt();
        assert!((v - want).abs() < 1e-14);
    }

    #[test]
    fn phase_cap_is_enforced() {
        let t = build_prime_table(100).unwrap();
        assert!(matches!(
            dirichlet_real(&t, 100.0, 3e11),
            Err(Error::PhaseCap { .. })
        ));
    }

    #[test]
    fn centering_trivial_points() {
        let sched = ShiftSchedule::Big { dimension: 1 };
        // i = 0, real: sin(T log p)/(T log p)
        let t_cap = 100.0;
        let v = centering_mean(t_cap, 2, &sched, 0, Part::Real).unwrap();
        let tl = t_cap * 2.0_f64.ln();
        assert!((v - tl.sin() / tl).abs() < 1e-15);
        // imaginary, full period: zero
        let p = 3u64;
        let t_full = std::f64::consts::TAU / (p as f64).ln();
        let v = centering_mean(t_full, p, &sched, 0, Part::Imaginary).unwrap();
        assert!(v.abs() < 1e-12);
    }

    #[test]
    fn centering_matches_quadrature() {
        use crate::oracle::adaptive_simpson;
        let sched = ShiftSchedule::Big { dimension: 2 };
        let t_cap = 100.0;
        let lp = 2.0_f64.ln();
        let v = centering_mean(t_cap, 2, &sched, 1, Part::Real).unwrap();
        let q = adaptive_simpson(&|u: f64| (t_cap * (u + 1.0) * lp).cos(), 0.0, 1.0, 1e-12);
        assert!((v - q).abs() < 1e-10, "closed {v} vs quad {q}");
    }

    #[test]
    fn forced_zero_draw_row_value() {
        // At u→0 the uncentered real sum is Σ 1/√p, so the centered row is
        // (Σ 1/√p − Σ centering/√p)/norm.
        let table = build_prime_table(100).unwrap();
        let sched = ShiftSchedule::Big { dimension: 1 };
        let centering = centering_sums(&table, 100.0, &sched, Part::Real).unwrap();
        let row = sample_row(&table, 100.0, &sched, Part::Real, 0.0, &centering).unwrap();
        let sum_inv_sqrt: f64 = table.inv_sqrt_p[..table.count_upto(100.0)].iter().sum();
        let want = (sum_inv_sqrt - centering[0]) / normalization(100.0).unwrap();
        assert!((row[0] - want).abs() < 1e-12);
    }

    #[test]
    fn big_shift_rows_translate() {
        // Evaluation point at (u, i) equals the one at (u+i, 0).
        let sched = ShiftSchedule::Big { dimension: 2 };
        let u = 0.37;
        let t1 = sched.point(1, 1000.0, u).unwrap();
        let t0 = sched.point(0, 1000.0, u + 1.0).unwrap();
        assert_eq!(t1, t0);
    }

    #[test]
    fn matrix_mean_is_centered() {
        let table = build_prime_table(10_000).unwrap();
        let sched = ShiftSchedule::Big { dimension: 1 };
        let m = 2_000;
        let mat = build_sample_matrix(&table, 1e4, &sched, Part::Real, m, 11).unwrap();
        let col = mat.column(0);
        let mean = crate::stats::mean(&col);
        let sd = crate::stats::variance(&col).sqrt();
        assert!(mean.abs() <= 4.0 * sd / (m as f64).sqrt(), "mean {mean}");
    }

    #[test]
    fn seed_prefix_reproducible() {
        let table = build_prime_table(1000).unwrap();
        let sched = ShiftSchedule::Big { dimension: 1 };
        let a = build_sample_matrix(&table, 1000.0, &sched, Part::Real, 64, 5).unwrap();
        let b = build_sample_matrix(&table, 1000.0, &sched, Part::Real, 128, 5).unwrap();
        assert_eq!(&a.values[..], &b.values[..64]);
    }

    #[test]
    fn small_schedule_offsets() {
        let sched = ShiftSchedule::Small {
            exponents: vec![f64::INFINITY, 0.5],
        };
        sched.validate().unwrap();
        assert_eq!(sched.offset(0, 1e6).unwrap(), 0.0);
        let want = (1e6_f64).ln().powf(-0.5);
        assert!((sched.offset(1, 1e6).unwrap() - want).abs() < 1e-15);
    }

    #[test]
    fn schedule_validation_rejects_bad_exponents() {
        assert!(ShiftSchedule::Small { exponents: vec![0.5, 0.5] }.validate().is_err());
        assert!(ShiftSchedule::Small { exponents: vec![0.2, 0.5] }.validate().is_err());
        assert!(ShiftSchedule::Explicit { offsets: vec![0.1, 0.1] }.validate().is_err());
    }

    #[test]
    fn low_t_cap_rejected() {
        let table = build_prime_table(100).unwrap();
        let sched = ShiftSchedule::Big { dimension: 1 };
        assert!(build_sample_matrix(&table, 10.0, &sched, Part::Real, 10, 1).is_err());
    }
}
