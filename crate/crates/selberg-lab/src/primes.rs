//! Prime tables and the prime-sum asymptotics that normalize every series in
//! the workbench.

use crate::{Error, Result};

/// Hard ceiling for table construction; 10^8 keeps the table and its caches
/// within desk memory while covering every experiment scale.
pub const MAX_PRIME_LIMIT: u64 = 100_000_000;

/// Which prime sum to evaluate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SumKind {
    /// Σ 1/p
    Reciprocal,
    /// Σ p^{-s} for s < 1
    Power(f64),
    /// Σ log p / p
    LogpOverP,
    /// Σ log p
    Logp,
}

/// Immutable ascending list of primes ≤ `limit` with cached per-prime
/// constants and compensated prefix sums of 1/p and log p / p.
#[derive(Debug)]
pub struct PrimeTable {
    pub limit: u64,
    pub primes: Vec<u32>,
    /// log p, cached because every series evaluator needs it per term.
    pub ln_p: Vec<f64>,
    /// 1/√p, cached for the Dirichlet-polynomial weights.
    pub inv_sqrt_p: Vec<f64>,
    prefix_recip: Vec<f64>,
    prefix_logp_over_p: Vec<f64>,
}

impl PrimeTable {
    pub fn count(&self) -> usize {
        self.primes.len()
    }

    /// Number of primes ≤ x (x need not be prime).
    pub fn count_upto(&self, x: f64) -> usize {
        if x < 2.0 {
            return 0;
        }
        let xi = x.min(u64::MAX as f64) as u64;
        self.primes.partition_point(|&p| (p as u64) <= xi)
    }

    fn check_range(&self, x: f64) -> Result<usize> {
        if !(x >= 0.0) {
            return Err(Error::Domain(format!("x = {x} must be ≥ 0")));
        }
        if x > self.limit as f64 {
            return Err(Error::OutOfRange(format!(
                "x = {x} exceeds table limit {}",
                self.limit
            )));
        }
        Ok(self.count_upto(x))
    }
}

/// Segmented sieve of Eratosthenes with odd-only storage.
pub fn build_prime_table(limit: u64) -> Result<PrimeTable> {
    if limit > MAX_PRIME_LIMIT {
        return Err(Error::ResourceLimit(format!(
            "prime limit {limit} exceeds configured maximum {MAX_PRIME_LIMIT}"
        )));
    }
    let primes = sieve(limit);
    let n = primes.len();
    let mut ln_p = Vec::with_capacity(n);
    let mut inv_sqrt_p = Vec::with_capacity(n);
    let mut prefix_recip = Vec::with_capacity(n);
    let mut prefix_logp_over_p = Vec::with_capacity(n);
    let mut kr = Kahan::default();
    let mut kl = Kahan::default();
    for &p in &primes {
        let pf = p as f64;
        let lp = pf.ln();
        ln_p.push(lp);
        inv_sqrt_p.push(1.0 / pf.sqrt());
        kr.add(1.0 / pf);
        kl.add(lp / pf);
        prefix_recip.push(kr.value());
        prefix_logp_over_p.push(kl.value());
    }
    Ok(PrimeTable {
        limit,
        primes,
        ln_p,
        inv_sqrt_p,
        prefix_recip,
        prefix_logp_over_p,
    })
}

fn sieve(limit: u64) -> Vec<u32> {
    let mut primes = Vec::new();
    if limit < 2 {
        return primes;
    }
    primes.push(2);
    if limit < 3 {
        return primes;
    }
    // Base sieve of odd numbers up to √limit.
    let root = (limit as f64).sqrt() as u64 + 1;
    let base_len = (root / 2 + 1) as usize; // index i represents 2i+1
    let mut base = vec![true; base_len];
    base[0] = false; // 1 is not prime
    let mut i = 1usize;
    while (2 * i + 1) * (2 * i + 1) <= 2 * base_len {
        if base[i] {
            let p = 2 * i + 1;
            let mut j = (p * p) / 2;
            while j < base_len {
                base[j] = false;
                j += p;
            }
        }
        i += 1;
    }
    let base_primes: Vec<u64> = (1..base_len)
        .filter(|&i| base[i])
        .map(|i| (2 * i + 1) as u64)
        .filter(|&p| p <= root)
        .collect();

    // Sieve odd numbers in segments of 1M candidates.
    const SEG: u64 = 1 << 20;
    let mut seg = vec![true; SEG as usize];
    let mut low = 3u64; // segment covers odds in [low, low + 2*SEG)
    while low <= limit {
        let high = (low + 2 * SEG - 1).min(limit + 1);
        let len = ((high - low) / 2 + 1) as usize;
        for s in seg[..len].iter_mut() {
            *s = true;
        }
        for &p in &base_primes {
            if p * p > high {
                break;
            }
            // First odd multiple of p in [low, high] that is ≥ p².
            let mut start = p * p;
            if start < low {
                let k = (low + p - 1) / p;
                start = p * k.max(p);
                if start % 2 == 0 {
                    start += p;
                }
            }
            let mut j = ((start - low) / 2) as usize;
            while j < len {
                seg[j] = false;
                j += p as usize;
            }
        }
        for (j, &is_prime) in seg[..len].iter().enumerate() {
            let n = low + 2 * j as u64;
            if is_prime && n <= limit {
                primes.push(n as u32);
            }
        }
        low += 2 * SEG;
    }
    primes
}

/// Compensated (Kahan) accumulator.
#[derive(Default, Clone, Copy)]
pub struct Kahan {
    sum: f64,
    c: f64,
}

impl Kahan {
    #[inline]
    pub fn add(&mut self, x: f64) {
        let y = x - self.c;
        let t = self.sum + y;
        self.c = (t - self.sum) - y;
        self.sum = t;
    }

    #[inline]
    pub fn value(&self) -> f64 {
        self.sum
    }
}

/// Σ_{p ≤ x} f(p) for the requested kind, summed in ascending prime order.
pub fn prime_sum(table: &PrimeTable, x: f64, kind: SumKind) -> Result<f64> {
    let n = table.check_range(x)?;
    if n == 0 {
        return Ok(0.0);
    }
    match kind {
        SumKind::Reciprocal => Ok(table.prefix_recip[n - 1]),
        SumKind::LogpOverP => Ok(table.prefix_logp_over_p[n - 1]),
        SumKind::Power(s) => {
            if s >= 1.0 {
                return Err(Error::Domain(format!("power kind requires s < 1, got {s}")));
            }
            let mut k = Kahan::default();
            for &p in &table.primes[..n] {
                k.add((p as f64).powf(-s));
            }
            Ok(k.value())
        }
        SumKind::Logp => {
            let mut k = Kahan::default();
            for &lp in &table.ln_p[..n] {
                k.add(lp);
            }
            Ok(k.value())
        }
    }
}

/// prime_sum divided by its predicted asymptote:
/// x^{1-s}/((1-s) log x) for power, x for logp, log x for logp_over_p,
/// log log x for reciprocal.
pub fn asymptotic_ratio(table: &PrimeTable, x: f64, kind: SumKind) -> Result<f64> {
    if x < 100.0 {
        return Err(Error::Domain(format!(
            "asymptotic_ratio requires x ≥ 100, got {x}"
        )));
    }
    let sum = prime_sum(table, x, kind)?;
    let asymptote = match kind {
        SumKind::Power(s) => x.powf(1.0 - s) / ((1.0 - s) * x.ln()),
        SumKind::Logp => x,
        SumKind::LogpOverP => x.ln(),
        SumKind::Reciprocal => x.ln().ln(),
    };
    Ok(sum / asymptote)
}

/// Mertens constant, the limit of Σ_{p≤x} 1/p − log log x.
pub const MERTENS: f64 = 0.261_497_212_847_642_8;

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::trial_division_primes;

    #[test]
    fn small_limits() {
        assert!(build_prime_table(1).unwrap().primes.is_empty());
        assert_eq!(build_prime_table(2).unwrap().primes, vec![2]);
        assert_eq!(
            build_prime_table(30).unwrap().primes,
            vec![2, 3, 5, 7, 11, 13, 17, 19, 23, 29]
        );
    }

    #[test]
    fn limit_above_maximum_is_a_resource_error() {
        match build_prime_table(MAX_PRIME_LIMIT + 1) {
            Err(Error::ResourceLimit(_)) => {}
            other => panic!("expected resource-limit error, got {other:?}"),
        }
    }

    #[test]
    fn sieve_matches_trial_division() {
        for limit in [0u64, 1, 2, 3, 4, 100, 1_000, 10_000] {
            let sieved = build_prime_table(limit).unwrap().primes;
            let trial = trial_division_primes(limit);
            assert_eq!(sieved, trial, "limit {limit}");
        }
    }

    #[test]
    fn segmented_sieve_spans_segment_boundaries() {
        // 2^21 odds per segment → boundary near 3 + 2^21*2; check a limit
        // past the first boundary against a count reference.
        let t = build_prime_table(5_000_000).unwrap();
        assert_eq!(t.count(), 348_513); // π(5·10^6)
        assert_eq!(*t.primes.last().unwrap(), 4_999_999);
    }

    #[test]
    fn reciprocal_sums() {
        let t = build_prime_table(100).unwrap();
        assert_eq!(prime_sum(&t, 2.0, SumKind::Reciprocal).unwrap(), 0.5);
        let want = 0.5 + 1.0 / 3.0 + 0.2 + 1.0 / 7.0;
        assert!((prime_sum(&t, 10.0, SumKind::Reciprocal).unwrap() - want).abs() < 1e-15);
    }

    #[test]
    fn power_zero_counts_primes() {
        let t = build_prime_table(1_000).unwrap();
        assert_eq!(prime_sum(&t, 1000.0, SumKind::Power(0.0)).unwrap(), 168.0);
    }

    #[test]
    fn power_requires_s_below_one() {
        let t = build_prime_table(100).unwrap();
        assert!(prime_sum(&t, 10.0, SumKind::Power(1.0)).is_err());
    }

    #[test]
    fn out_of_range_never_truncates() {
        let t = build_prime_table(100).unwrap();
        match prime_sum(&t, 101.0, SumKind::Reciprocal) {
            Err(Error::OutOfRange(_)) => {}
            other => panic!("expected out-of-range, got {other:?}"),
        }
    }

    #[test]
    fn monotone_in_x() {
        let t = build_prime_table(10_000).unwrap();
        for kind in [
            SumKind::Reciprocal,
            SumKind::Power(0.5),
            SumKind::LogpOverP,
            SumKind::Logp,
        ] {
            let mut prev = 0.0;
            for x in [10.0, 100.0, 1_000.0, 10_000.0] {
                let s = prime_sum(&t, x, kind).unwrap();
                assert!(s >= prev);
                prev = s;
            }
        }
    }

    #[test]
    fn chebyshev_ratio_trend_improves() {
        let t = build_prime_table(1_000_000).unwrap();
        let r4 = asymptotic_ratio(&t, 1e4, SumKind::Logp).unwrap();
        let r6 = asymptotic_ratio(&t, 1e6, SumKind::Logp).unwrap();
        assert!((r6 - 1.0).abs() < (r4 - 1.0).abs());
    }

    #[test]
    fn mertens_residual_at_moderate_x() {
        let t = build_prime_table(1_000_000).unwrap();
        let residual = prime_sum(&t, 1e6, SumKind::Reciprocal).unwrap() - (1e6_f64).ln().ln();
        assert!((residual - MERTENS).abs() < 5e-3, "residual {residual}");
    }
}
