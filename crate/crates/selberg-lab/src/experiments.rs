//! Experiment orchestration: maps each subcommand name to a concrete
//! numerical run producing an `ExperimentReport`.

use crate::config::ExperimentConfig;
use crate::malliavin::{self, lemma6_sum, stein_statistic};
use crate::oracle::{self, GaussHermite, SeriesKind};
use crate::primes::{self, PrimeTable, SumKind};
use crate::report::ExperimentReport;
use crate::sampler::{self, build_sample_matrix, Part, ShiftSchedule};
use crate::stats;
use crate::zeta::{self, ZeroScan};
use crate::{Error, Result};

/// Conservative Monte Carlo standard error for the CDF-distance metrics: the
/// binomial bound sup_x √(F(1−F)/M) ≤ 0.5/√M.
fn distance_se(m: usize) -> f64 {
    0.5 / (m as f64).sqrt()
}

/// Runs the experiment named in the config over its T grid and returns the
/// report (not yet written to disk).
pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentReport> {
    config.validate()?;
    match config.experiment.as_str() {
        "primes" => run_primes(config),
        "oracles" => run_oracles(config),
        "onedim" => run_onedim(config),
        "multidim-big" => run_multidim(config, true),
        "multidim-small" => run_multidim(config, false),
        "zeros" => run_zeros(config),
        "mesoscopic" => run_mesoscopic(config),
        other => Err(Error::Config {
            field: "experiment".into(),
            message: format!("unknown experiment '{other}'"),
        }),
    }
}

/// Prime-sum asymptotics at each grid point x: Mertens residual
/// Σ1/p − log log x, Chebyshev ratio Σlog p / x, and the ratio of Σ p^{−1/2}
/// to its logarithmic-integral asymptote.
fn run_primes(config: &ExperimentConfig) -> Result<ExperimentReport> {
    let table = primes::build_prime_table(config.prime_limit)?;
    let mut rows = Vec::new();
    for &x in &config.t_grid {
        let mertens = prime_sum_residual(&table, x)?;
        let chebyshev = primes::prime_sum(&table, x, SumKind::Logp)? / x;
        let power = primes::asymptotic_ratio(&table, x, SumKind::Power(0.5))?;
        rows.push(vec![x, mertens, chebyshev, power]);
    }
    ExperimentReport::new(
        config.clone(),
        vec!["t", "mertens_residual", "chebyshev_ratio", "power_half_ratio"],
        rows,
    )
}

fn prime_sum_residual(table: &PrimeTable, x: f64) -> Result<f64> {
    Ok(primes::prime_sum(table, x, SumKind::Reciprocal)? - x.ln().ln())
}

/// Identity suite: closed forms against independent quadrature / series
/// evaluations. One row per check, columns (check id, max error).
/// Check ids: 0 aux_g, 1 aux_gw, 2 lemma-1 cross moments (relative errors);
/// 3–6 factorized discrepancy sums vs series truncation, in the order
/// real-big, imag-big, real-small, imag-small (absolute errors).
fn run_oracles(config: &ExperimentConfig) -> Result<ExperimentReport> {
    // 150 nodes push the quadrature error of the widest test Gaussians
    // (k = 4, a = 0.95) below 1e-13.
    let gh = GaussHermite::new(150);
    let ks = [0.25, 0.5, 1.0, 2.0, 4.0];
    let avals = [0.0, 0.25, 0.5, 0.75, 0.95];
    let wfs = [-1.5, -0.5, 0.0, 0.8, 2.0];
    let wgs = [-2.0, -0.7, 0.0, 0.6, 1.4];

    let mut err_g = 0.0_f64;
    let mut err_gw = 0.0_f64;
    for &k in &ks {
        for &a in &avals {
            for &wf in &wfs {
                for &wg in &wgs {
                    let closed = malliavin::aux_g_expectation(k, a, wf, wg);
                    let quad = gh.aux_g(k, a, wf, wg);
                    err_g = err_g.max(rel_err(closed, quad));
                    let closed =
                        malliavin::aux_gw_expectation(k, a, wf, wg, malliavin::Which::F);
                    let quad = gh.aux_gw(k, a, wf, wg);
                    err_gw = err_gw.max(rel_err(closed, quad));
                }
            }
        }
    }

    let mut err_l1 = 0.0_f64;
    for k in 1..=5 {
        for l in 1..=5 {
            for &u in &[0.1, 0.3, 0.5, 0.7, 0.9] {
                let closed = malliavin::lemma1_cross(k as f64, l as f64, u);
                let quad = oracle::lemma1_quadrature(k as f64, l as f64, u);
                err_l1 = err_l1.max(rel_err(closed, quad));
            }
        }
    }

    // Series cross-checks on the two smallest primes at T small enough for
    // the truncated exponential series to converge to 1e-12.
    let small_table = primes::build_prime_table(3)?;
    let series_primes = [2u64, 3];
    let t = 3.0;
    let us = [0.25, 0.5, 0.75];
    let big_pairs = [(0usize, 0usize), (0, 1), (1, 1)];
    let small_pairs = [(0.0, 0.0), (0.0, 0.2), (0.15, 0.3)];
    let mut err_series = [0.0_f64; 4];
    for &u in &us {
        for &(i, j) in &big_pairs {
            for (slot, part) in [(0, Part::Real), (1, Part::Imaginary)] {
                let got = malliavin::discrepancy_cross_big(&small_table, t, u, i, j, part)?;
                let kind = match part {
                    Part::Real => SeriesKind::RealBig { i, j },
                    Part::Imaginary => SeriesKind::ImagBig { i, j },
                };
                let want = oracle::series_discrepancy(&series_primes, t, u, kind, 40);
                err_series[slot] = err_series[slot].max((got - want).abs());
            }
        }
        for &(f_i, f_j) in &small_pairs {
            for (slot, part) in [(2, Part::Real), (3, Part::Imaginary)] {
                let got =
                    malliavin::discrepancy_cross_small(&small_table, t, u, f_i, f_j, part)?;
                let kind = match part {
                    Part::Real => SeriesKind::RealSmall { f_i, f_j },
                    Part::Imaginary => SeriesKind::ImagSmall { f_i, f_j },
                };
                let want = oracle::series_discrepancy(&series_primes, t, u, kind, 40);
                err_series[slot] = err_series[slot].max((got - want).abs());
            }
        }
    }

    let rows = vec![
        vec![0.0, err_g],
        vec![1.0, err_gw],
        vec![2.0, err_l1],
        vec![3.0, err_series[0]],
        vec![4.0, err_series[1]],
        vec![5.0, err_series[2]],
        vec![6.0, err_series[3]],
    ];
    ExperimentReport::new(config.clone(), vec!["check", "max_error"], rows)
}

/// Relative error with an absolute floor, so identically-zero targets
/// (reached only to roundoff by the quadrature) do not divide by ~0.
fn rel_err(got: f64, want: f64) -> f64 {
    (got - want).abs() / want.abs().max(1e-8)
}

/// One-dimensional central limit experiment: per T, the Kolmogorov and
/// Wasserstein-1 distances of the normalized real part to the standard
/// normal, the empirical vs predicted variance, and the Monte Carlo
/// Stein-discrepancy statistic E|1 − V|.
fn run_onedim(config: &ExperimentConfig) -> Result<ExperimentReport> {
    let table = primes::build_prime_table(config.prime_limit)?;
    let schedule = ShiftSchedule::Big { dimension: 1 };
    let m = config.samples;
    let mut rows = Vec::new();
    for &t in &config.t_grid {
        let matrix = build_sample_matrix(&table, t, &schedule, Part::Real, m, config.seed)?;
        let sample = matrix.column(0);
        let d_k = stats::kolmogorov_distance(&sample)?.value;
        let d_w = stats::wasserstein1_distance(&sample)?.value;
        let variance = stats::variance(&sample);
        let predicted = sampler::predicted_variance(&table, t)?;
        let stein = stein_statistic(&table, t, &schedule, Part::Real, (0, 0), m, config.seed)?;
        rows.push(vec![
            t,
            d_k,
            distance_se(m),
            d_w,
            distance_se(m),
            variance,
            predicted,
            stein.statistic,
            stein.std_error,
        ]);
    }
    ExperimentReport::new(
        config.clone(),
        vec![
            "t",
            "d_k",
            "d_k_se",
            "d_w",
            "d_w_se",
            "variance",
            "predicted_variance",
            "stein_diag",
            "stein_diag_se",
        ],
        rows,
    )
}

/// Multidimensional experiment: per T and coordinate pair i < j, the
/// empirical correlation, its covariance target, the finite-T surrogate,
/// and the marginal Kolmogorov distances of both coordinates.
fn run_multidim(config: &ExperimentConfig, big: bool) -> Result<ExperimentReport> {
    let table = primes::build_prime_table(config.prime_limit)?;
    let schedule = config.schedule()?;
    if schedule.is_big() != big {
        return Err(Error::Config {
            field: "schedule".into(),
            message: format!(
                "experiment '{}' needs a {} schedule, got '{}'",
                config.experiment,
                if big { "big" } else { "small" },
                config.schedule
            ),
        });
    }
    let d = schedule.points();
    if d < 2 {
        return Err(Error::Config {
            field: "schedule".into(),
            message: format!("need at least 2 evaluation points, got {d}"),
        });
    }
    let m = config.samples;
    let mut rows = Vec::new();
    for &t in &config.t_grid {
        let matrix = build_sample_matrix(&table, t, &schedule, Part::Real, m, config.seed)?;
        let corr = stats::correlation_from_covariance(&stats::empirical_covariance(&matrix)?);
        let target = stats::target_covariance(&table, &schedule, t)?;
        let d_ks: Vec<f64> = (0..d)
            .map(|j| Ok(stats::kolmogorov_distance(&matrix.column(j))?.value))
            .collect::<Result<_>>()?;
        for i in 0..d {
            for j in (i + 1)..d {
                rows.push(vec![
                    t,
                    i as f64,
                    j as f64,
                    corr[i][j],
                    target.matrix[i][j],
                    target.finite_t_matrix[i][j],
                    d_ks[i],
                    d_ks[j],
                ]);
            }
        }
    }
    ExperimentReport::new(
        config.clone(),
        vec![
            "t",
            "i",
            "j",
            "correlation",
            "target_c",
            "finite_t_c",
            "d_k_i",
            "d_k_j",
        ],
        rows,
    )
}

/// Zero-count scanning is quadratic-ish in T on a single core; keep the
/// sign-change scan below this height inside the experiment harness.
const MAX_SCAN_T: f64 = 20_000.0;

/// Zero-counting experiment: per T, the zero count and S(T), the mean and
/// variance of the normalized fluctuation Δ(UT, UT+T)/(π√(log log T)) over
/// `samples` uniform draws, and the second moment of the Dirichlet
/// approximation residual over min(samples, 1000) draws.
fn run_zeros(config: &ExperimentConfig) -> Result<ExperimentReport> {
    let table = primes::build_prime_table(config.prime_limit)?;
    let mut rows = Vec::new();
    for &t in &config.t_grid {
        if t > MAX_SCAN_T {
            return Err(Error::ResourceLimit(format!(
                "zero scan at T = {t} exceeds the supported height {MAX_SCAN_T}"
            )));
        }
        let scan = ZeroScan::new(2.0 * t)?;
        let count = scan.count(t)?;
        // S(t) = arg ζ/π, so the N(0,1)-normalized fluctuation is π·Δ/√(log log T).
        let norm = t.ln().ln().sqrt() / std::f64::consts::PI;
        let deltas: Vec<f64> = (0..config.samples)
            .map(|r| {
                let mut rng = sampler::row_rng(config.seed, r as u64);
                let u = sampler::sample_u(&mut rng, sampler::SampleMode::Direct).u;
                Ok(scan.delta_fluctuation(u * t, u * t + t)? / norm)
            })
            .collect::<Result<_>>()?;
        let residuals = residual_draws(&table, t, config.samples.min(1000), config.seed)?;
        let residual_m2 = stats::mean(&residuals.iter().map(|r| r * r).collect::<Vec<_>>());
        rows.push(vec![
            t,
            count.n as f64,
            count.s_t,
            stats::mean(&deltas),
            stats::variance(&deltas),
            residual_m2,
        ]);
    }
    ExperimentReport::new(
        config.clone(),
        vec!["t", "n_t", "s_t", "delta_mean", "delta_var", "residual_m2"],
        rows,
    )
}

/// Draws of log|ζ(1/2 + iTu)| − Σ_{p≤T} cos(Tu log p)/√p with u uniform,
/// resampling the rare draws with Tu below the Riemann–Siegel domain.
pub fn residual_draws(table: &PrimeTable, t_cap: f64, m: usize, seed: u64) -> Result<Vec<f64>> {
    (0..m)
        .map(|r| {
            let mut rng = sampler::row_rng(seed, r as u64);
            loop {
                let u = sampler::sample_u(&mut rng, sampler::SampleMode::Direct).u;
                if t_cap * u >= 10.0 {
                    return zeta::approximation_residual(table, t_cap, u);
                }
            }
        })
        .collect()
}

/// Mesoscopic limit-covariance kernel on a fixed set of window pairs, in
/// both the printed and the symmetrized form. The T grid plays no role:
/// the limit kernel depends only on the windows.
fn run_mesoscopic(config: &ExperimentConfig) -> Result<ExperimentReport> {
    let windows = [
        (0.0, 1.0, 0.0, 1.0),
        (0.0, 1.0, 1.0, 2.0),
        (0.0, 1.0, 2.0, 3.0),
        (0.0, 2.0, 1.0, 3.0),
        (0.0, 1.0, 0.5, 1.5),
        (1.0, 2.0, 0.0, 1.0),
    ];
    let mut rows = Vec::new();
    for &(a1, b1, a2, b2) in &windows {
        rows.push(vec![
            a1,
            b1,
            a2,
            b2,
            stats::mesoscopic_covariance(a1, b1, a2, b2)?,
            stats::mesoscopic_covariance_symmetrized(a1, b1, a2, b2)?,
        ]);
    }
    ExperimentReport::new(
        config.clone(),
        vec!["alpha1", "beta1", "alpha2", "beta2", "kernel", "kernel_symmetrized"],
        rows,
    )
}

/// Small-shift surrogate used by the correlation experiments and acceptance
/// checks: lemma6_sum at the offset difference of the schedule's points.
pub fn small_shift_surrogate(table: &PrimeTable, t_cap: f64, delta: f64) -> Result<f64> {
    lemma6_sum(table, t_cap, delta)
}
