//! Riemann–Siegel evaluation of zeta on the critical line, zero counting,
//! S(t), and the zero-count fluctuation statistics.

use crate::primes::PrimeTable;
use crate::sampler::dirichlet_real;
use crate::{Error, Result};

/// Height cap for Z(t): one Riemann–Siegel correction term holds 1e-6
/// absolute accuracy comfortably below this.
pub const MAX_HEIGHT: f64 = 1.0e7;

/// Value of zeta on the critical line through the Riemann–Siegel Z function.
#[derive(Debug, Clone, Copy)]
pub struct CriticalLineValue {
    pub t: f64,
    pub z: f64,
    pub theta: f64,
    pub log_abs_zeta: f64,
}

/// Zero count up to a height, together with the fluctuating part S(t).
#[derive(Debug, Clone, Copy)]
pub struct ZeroCount {
    pub t: f64,
    pub n: usize,
    pub s_t: f64,
}

fn check_height(t: f64) -> Result<()> {
    if t < 10.0 {
        return Err(Error::Domain(format!(
            "Riemann–Siegel expansion requires t ≥ 10, got {t}"
        )));
    }
    if t > MAX_HEIGHT {
        return Err(Error::ResourceLimit(format!(
            "height {t} exceeds supported maximum {MAX_HEIGHT}"
        )));
    }
    Ok(())
}

/// Riemann–Siegel phase θ(t) by its asymptotic expansion
/// t/2·log(t/2π) − t/2 − π/8 + 1/(48t) + 7/(5760t³).
pub fn rs_theta(t: f64) -> Result<f64> {
    check_height(t)?;
    Ok(t / 2.0 * (t / std::f64::consts::TAU).ln() - t / 2.0 - std::f64::consts::FRAC_PI_8
        + 1.0 / (48.0 * t)
        + 7.0 / (5760.0 * t * t * t))
}

/// Smooth main term of the zero-counting function:
/// t/(2π)·log(t/(2πe)).
pub fn main_term(t: f64) -> f64 {
    t / std::f64::consts::TAU * (t / (std::f64::consts::TAU * std::f64::consts::E)).ln()
}

/// First Riemann–Siegel correction term C₀(p) = cos(2π(p² − p − 1/16))/cos(2πp),
/// with the removable singularities at p = 1/4, 3/4 handled by l'Hôpital.
fn rs_c0(p: f64) -> f64 {
    let num = (std::f64::consts::TAU * (p * p - p - 1.0 / 16.0)).cos();
    let den = (std::f64::consts::TAU * p).cos();
    if den.abs() > 1e-8 {
        num / den
    } else {
        let dnum =
            -(std::f64::consts::TAU * (p * p - p - 1.0 / 16.0)).sin() * (2.0 * p - 1.0);
        let dden = -(std::f64::consts::TAU * p).sin();
        dnum / dden
    }
}

/// Riemann–Siegel Z(t): main sum plus the first correction term.
/// |Z(t)| = |ζ(1/2 + it)|.
pub fn rs_z(t: f64) -> Result<f64> {
    let theta = rs_theta(t)?;
    let a = (t / std::f64::consts::TAU).sqrt();
    let n = a as usize;
    let mut sum = 0.0;
    for k in 1..=n {
        let kf = k as f64;
        sum += 2.0 * (theta - t * kf.ln()).cos() / kf.sqrt();
    }
    let p = a - n as f64;
    let sign = if n % 2 == 1 { 1.0 } else { -1.0 }; // (−1)^{N−1}
    Ok(sum + sign * a.powf(-0.5) * rs_c0(p))
}

/// Z, θ and log|ζ| at height t.
pub fn critical_line_value(t: f64) -> Result<CriticalLineValue> {
    let z = rs_z(t)?;
    Ok(CriticalLineValue {
        t,
        z,
        theta: rs_theta(t)?,
        log_abs_zeta: z.abs().ln(),
    })
}

/// A completed sign-change scan of Z on (0, t_max] with all located zero
/// ordinates, enabling O(log n) zero counts at any height below t_max.
pub struct ZeroScan {
    pub t_max: f64,
    /// Ascending ordinates of the located sign changes of Z.
    pub zeros: Vec<f64>,
}

/// First zero is at 14.13…; scanning starts safely below it.
const SCAN_START: f64 = 10.0;
/// Endpoint |Z| below this triggers subdivision (near-miss guard for close
/// pairs such as the Lehmer pair near t = 7005).
const NEAR_MISS: f64 = 1.0;
/// Exploration floor: intervals narrower than this are only bisected, not
/// subdivided further.
const MIN_WIDTH: f64 = 1e-3;

impl ZeroScan {
    pub fn new(t_max: f64) -> Result<Self> {
        Self::with_refinement(t_max, 1.0)
    }

    /// Scan with the base step π/(4 log t) divided by `refine` (≥ 1).
    pub fn with_refinement(t_max: f64, refine: f64) -> Result<Self> {
        if !(t_max > 0.0) {
            return Err(Error::Domain(format!("t_max must be positive, got {t_max}")));
        }
        if t_max > MAX_HEIGHT {
            return Err(Error::ResourceLimit(format!(
                "scan height {t_max} exceeds supported maximum {MAX_HEIGHT}"
            )));
        }
        let mut zeros = Vec::new();
        if t_max <= SCAN_START {
            return Ok(ZeroScan { t_max, zeros });
        }
        let mut a = SCAN_START;
        let mut za = rs_z(a)?;
        while a < t_max {
            let step = std::f64::consts::FRAC_PI_4 / a.max(20.0).ln() / refine;
            let b = (a + step).min(t_max);
            let zb = rs_z(b)?;
            subdivide(a, za, b, zb, 0, &mut zeros)?;
            a = b;
            za = zb;
        }
        Ok(ZeroScan { t_max, zeros })
    }

    /// Zero count N(t) with the fluctuating part s_t = n − θ(t)/π − 1.
    pub fn count(&self, t: f64) -> Result<ZeroCount> {
        if !(t > 0.0 && t <= self.t_max) {
            return Err(Error::Domain(format!(
                "count height {t} outside scanned range (0, {}]",
                self.t_max
            )));
        }
        if t >= SCAN_START && rs_z(t)?.abs() < 1e-9 {
            return Err(Error::NearZero { t });
        }
        let n = self.zeros.partition_point(|&z| z <= t);
        let s_t = if t >= 10.0 {
            n as f64 - rs_theta(t)? / std::f64::consts::PI - 1.0
        } else {
            // Below the expansion's validity (and below the first zero) the
            // fluctuating part is pinned by N(t) = 0.
            f64::NAN
        };
        Ok(ZeroCount { t, n, s_t })
    }

    /// Fluctuation Δ(t₁, t₂) = (N(t₂) − N(t₁)) − (main(t₂) − main(t₁)).
    pub fn delta_fluctuation(&self, t1: f64, t2: f64) -> Result<f64> {
        if !(0.0 < t1 && t1 <= t2) {
            return Err(Error::Domain(format!(
                "delta_fluctuation requires 0 < t1 ≤ t2, got ({t1}, {t2})"
            )));
        }
        let n1 = self.count(t1)?.n as f64;
        let n2 = self.count(t2)?.n as f64;
        Ok((n2 - n1) - (main_term(t2) - main_term(t1)))
    }
}

/// Recursive interval handler: force two levels of subdivision, keep
/// splitting while an endpoint is suspiciously small, and bisect each
/// bracketed sign change to 1e-9.
fn subdivide(a: f64, za: f64, b: f64, zb: f64, depth: u32, zeros: &mut Vec<f64>) -> Result<()> {
    let width = b - a;
    if width > MIN_WIDTH && (depth < 2 || za.abs().min(zb.abs()) < NEAR_MISS) {
        let m = 0.5 * (a + b);
        let zm = rs_z(m)?;
        subdivide(a, za, m, zm, depth + 1, zeros)?;
        subdivide(m, zm, b, zb, depth + 1, zeros)?;
        return Ok(());
    }
    if za.signum() != zb.signum() {
        zeros.push(bisect(a, za, b));
    }
    Ok(())
}

/// Bisection refinement of a bracketed sign change to width 1e-9.
fn bisect(mut a: f64, za: f64, mut b: f64) -> f64 {
    let sa = za.signum();
    while b - a > 1e-9 {
        let m = 0.5 * (a + b);
        let zm = rs_z(m).expect("bisect stays within the scanned range");
        if zm.signum() == sa {
            a = m;
        } else {
            b = m;
        }
    }
    0.5 * (a + b)
}

/// Standalone zero count: scans from scratch up to t.
pub fn count_zeros(t: f64) -> Result<ZeroCount> {
    ZeroScan::new(t)?.count(t)
}

/// Residual of the Dirichlet approximation:
/// log|ζ(1/2 + i·t_cap·u)| − Σ_{p≤t_cap} cos(t_cap·u·log p)/√p.
pub fn approximation_residual(table: &PrimeTable, t_cap: f64, u: f64) -> Result<f64> {
    let t = t_cap * u;
    let z = rs_z(t)?;
    if z.abs() < 1e-9 {
        return Err(Error::NearZero { t });
    }
    Ok(z.abs().ln() - dirichlet_real(table, t_cap, t)?)
}
