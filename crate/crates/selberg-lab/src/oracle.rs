//! Independent oracles: trial division, Gauss–Hermite quadrature, adaptive
//! Simpson quadrature, series-truncation evaluation of the Malliavin
//! brackets, and an Euler–Maclaurin zeta evaluator. These deliberately share
//! no code with the closed forms they check.

use num_complex::Complex64;

use crate::primes::Kahan;

/// Primes ≤ limit by trial division (reference for the sieve).
pub fn trial_division_primes(limit: u64) -> Vec<u32> {
    let mut primes = Vec::new();
    'outer: for n in 2..=limit {
        let mut d = 2;
        while d * d <= n {
            if n % d == 0 {
                continue 'outer;
            }
            d += 1;
        }
        primes.push(n as u32);
    }
    primes
}

/// Gauss–Hermite rule for the weight e^{−x²} (physicists' convention).
pub struct GaussHermite {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussHermite {
    /// Nodes and weights by Newton iteration on the recurrence-evaluated
    /// Hermite polynomials.
    pub fn new(n: usize) -> Self {
        const PIM4: f64 = 0.751_125_544_464_942_5; // π^{-1/4}
        let nf = n as f64;
        let m = (n + 1) / 2;
        let mut x = vec![0.0; n];
        let mut w = vec![0.0; n];
        let mut z = 0.0_f64;
        for i in 0..m {
            z = match i {
                0 => (2.0 * nf + 1.0).sqrt() - 1.85575 * (2.0 * nf + 1.0).powf(-1.0 / 6.0),
                1 => z - 1.14 * nf.powf(0.426) / z,
                2 => 1.86 * z - 0.86 * x[0],
                3 => 1.91 * z - 0.91 * x[1],
                _ => 2.0 * z - x[i - 2],
            };
            let mut pp = 0.0;
            for _ in 0..200 {
                let mut p1 = PIM4;
                let mut p2 = 0.0;
                for j in 0..n {
                    let p3 = p2;
                    p2 = p1;
                    let jf = j as f64;
                    p1 = z * (2.0 / (jf + 1.0)).sqrt() * p2 - (jf / (jf + 1.0)).sqrt() * p3;
                }
                pp = (2.0 * nf).sqrt() * p2;
                let z1 = z;
                z = z1 - p1 / pp;
                if (z - z1).abs() < 1e-15 {
                    break;
                }
            }
            x[i] = z;
            x[n - 1 - i] = -z;
            w[i] = 2.0 / (pp * pp);
            w[n - 1 - i] = w[i];
        }
        GaussHermite { nodes: x, weights: w }
    }

    /// E f(Z) for Z standard normal.
    pub fn expect<F: Fn(f64) -> f64>(&self, f: F) -> f64 {
        let inv_sqrt_pi = 1.0 / std::f64::consts::PI.sqrt();
        let mut k = Kahan::default();
        for (&x, &w) in self.nodes.iter().zip(&self.weights) {
            k.add(w * f(std::f64::consts::SQRT_2 * x));
        }
        k.value() * inv_sqrt_pi
    }

    /// Quadrature of E' exp(−k[(a·wf+√(1−a²)Z₁)² + (a·wg+√(1−a²)Z₂)²]),
    /// which factorizes over the two independent Gaussians.
    pub fn aux_g(&self, k: f64, a: f64, wf: f64, wg: f64) -> f64 {
        let s = (1.0 - a * a).sqrt();
        let one = |w: f64| self.expect(|z| (-k * (a * w + s * z).powi(2)).exp());
        one(wf) * one(wg)
    }

    /// Quadrature of E'[Z₁ exp(−k(a·wf+√(1−a²)Z₁)²)] · E' exp(−k(a·wg+√(1−a²)Z₂)²).
    pub fn aux_gw(&self, k: f64, a: f64, wf: f64, wg: f64) -> f64 {
        let s = (1.0 - a * a).sqrt();
        let lin = self.expect(|z| z * (-k * (a * wf + s * z).powi(2)).exp());
        let plain = self.expect(|z| (-k * (a * wg + s * z).powi(2)).exp());
        lin * plain
    }
}

/// Adaptive Simpson quadrature with Richardson acceptance.
pub fn adaptive_simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> f64 {
    fn simpson<F: Fn(f64) -> f64>(f: &F, a: f64, fa: f64, b: f64, fb: f64) -> (f64, f64, f64) {
        let m = 0.5 * (a + b);
        let fm = f(m);
        ((b - a) / 6.0 * (fa + 4.0 * fm + fb), m, fm)
    }
    #[allow(clippy::too_many_arguments)]
    fn rec<F: Fn(f64) -> f64>(
        f: &F,
        a: f64,
        fa: f64,
        b: f64,
        fb: f64,
        whole: f64,
        m: f64,
        fm: f64,
        tol: f64,
        depth: u32,
    ) -> f64 {
        let (left, lm, flm) = simpson(f, a, fa, m, fm);
        let (right, rm, frm) = simpson(f, m, fm, b, fb);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol {
            left + right + delta / 15.0
        } else {
            rec(f, a, fa, m, fm, left, lm, flm, tol / 2.0, depth - 1)
                + rec(f, m, fm, b, fb, right, rm, frm, tol / 2.0, depth - 1)
        }
    }
    let (fa, fb) = (f(a), f(b));
    let (whole, m, fm) = simpson(f, a, fa, b, fb);
    rec(f, a, fa, b, fb, whole, m, fm, tol, 40)
}

/// Quadrature representation of the symmetrized bracket for orders (2k, 2l):
/// 4klS ∫₀¹ [u^{2k}·a/(1+2l(1−a²))²·e^{−l a² S/(1+2l(1−a²))} + (k ↔ l)] da
/// with S = −2 log u.
pub fn lemma1_quadrature(k: f64, l: f64, u: f64) -> f64 {
    let s_var = -2.0 * u.ln();
    // The u^{2k}, u^{2l} prefactors are pulled out of the integrals so each
    // piece is integrated at full relative accuracy even when the prefactor
    // is tiny (e.g. u^{10} at u = 0.1).
    let piece = |c: f64| {
        let integrand = |a: f64| {
            let denom = 1.0 + 2.0 * c * (1.0 - a * a);
            a / (denom * denom) * (-c * a * a * s_var / denom).exp()
        };
        adaptive_simpson(&integrand, 0.0, 1.0, 1e-13)
    };
    4.0 * k * l * s_var * (u.powf(2.0 * k) * piece(l) + u.powf(2.0 * l) * piece(k))
}

/// Which shifted discrepancy the series oracle targets. Big shifts use
/// t_i = T(u+i); small shifts use t_i = Tu + f.
#[derive(Debug, Clone, Copy)]
pub enum SeriesKind {
    RealBig { i: usize, j: usize },
    ImagBig { i: usize, j: usize },
    RealSmall { f_i: f64, f_j: f64 },
    ImagSmall { f_i: f64, f_j: f64 },
}

/// Symmetrized Malliavin bracket for the shifted powers
/// ((U+a)^m − E, (U+b)^n − E), from the binomial expansion over the base
/// brackets: m(U+a)^{m−1}U · [(b+1)^{n+1} − b^{n+1} − ((U+b)^{n+1} − b^{n+1})/U]/(n+1)
/// plus the (m,a) ↔ (n,b) term.
pub fn shifted_bracket(m: f64, n: f64, a: f64, b: f64, u: f64) -> f64 {
    let part = |m: f64, n: f64, a: f64, b: f64| {
        if m == 0.0 {
            return 0.0;
        }
        m * (u + a).powf(m - 1.0) * u / (n + 1.0)
            * ((b + 1.0).powf(n + 1.0)
                - b.powf(n + 1.0)
                - ((u + b).powf(n + 1.0) - b.powf(n + 1.0)) / u)
    };
    part(m, n, a, b) + part(n, m, b, a)
}

/// Truncated double Taylor series for the symmetrized cross discrepancy over
/// the given primes. Diagonal (singular, non-symmetrized) targets are half
/// of the (i,i) value. Accuracy requires T·log p ≲ 20 and kmax ≈ 40.
pub fn series_discrepancy(primes: &[u64], t: f64, u: f64, kind: SeriesKind, kmax: usize) -> f64 {
    let (odd, a, b) = match kind {
        SeriesKind::RealBig { i, j } => (false, i as f64, j as f64),
        SeriesKind::ImagBig { i, j } => (true, i as f64, j as f64),
        SeriesKind::RealSmall { f_i, f_j } => (false, f_i / t, f_j / t),
        SeriesKind::ImagSmall { f_i, f_j } => (true, f_i / t, f_j / t),
    };
    let mut total = Kahan::default();
    for &p1 in primes {
        for &p2 in primes {
            let (l1, l2) = ((p1 as f64).ln(), (p2 as f64).ln());
            let (x1, x2) = (t * l1, t * l2);
            let w = 1.0 / ((p1 * p2) as f64).sqrt();
            // ck = (−1)^k x1^{m_k}/m_k! with m_k = 2k (+1 if odd orders).
            let mut ck = if odd { -x1 } else { 1.0 };
            let mut mk = if odd { 1.0 } else { 0.0 };
            for _k in 0..=kmax {
                let mut cl = if odd { -x2 } else { 1.0 };
                let mut ml = if odd { 1.0 } else { 0.0 };
                for _l in 0..=kmax {
                    // Signs: ck/cl carry (−1)^{k+1} for odd orders (from the
                    // sine series); compensate so the product is (−1)^{k+l}.
                    total.add(w * ck * cl * shifted_bracket(mk, ml, a, b, u));
                    cl *= -x2 * x2 / ((ml + 1.0) * (ml + 2.0));
                    ml += 2.0;
                }
                ck *= -x1 * x1 / ((mk + 1.0) * (mk + 2.0));
                mk += 2.0;
            }
        }
    }
    total.value()
}

const BERNOULLI_2K: [f64; 8] = [
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
    -3617.0 / 510.0,
];

/// ζ(1/2 + it) by Euler–Maclaurin summation.
pub fn euler_maclaurin_zeta_half(t: f64) -> Complex64 {
    let s = Complex64::new(0.5, t);
    let n = (2.0 * t.abs()).max(30.0).ceil() as u32;
    let nf = n as f64;
    let mut sum = Complex64::new(0.0, 0.0);
    for k in 1..n {
        sum += (-s * (k as f64).ln()).exp();
    }
    let n_pow_minus_s = (-s * nf.ln()).exp();
    sum += n_pow_minus_s * nf / (s - 1.0); // N^{1−s}/(s−1)
    sum += 0.5 * n_pow_minus_s;
    // B_{2j}/(2j)! · s(s+1)···(s+2j−2) · N^{−s−2j+1}
    let mut rising = s; // s(s+1)···(s+2j−2), built incrementally
    let mut fact = 2.0; // (2j)!
    let mut n_term = n_pow_minus_s / nf; // N^{−s−2j+1}
    for (j, &b) in BERNOULLI_2K.iter().enumerate() {
        let two_j = 2.0 * (j as f64 + 1.0);
        sum += b / fact * rising * n_term;
        // Extend the rising product by (s+2j−1)(s+2j), the factorial and the
        // power of N accordingly.
        rising *= (s + (two_j - 1.0)) * (s + two_j);
        fact *= (two_j + 1.0) * (two_j + 2.0);
        n_term /= nf * nf;
    }
    sum
}
