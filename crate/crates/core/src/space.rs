//! Space formulas and the shared space report.

use num_bigint::BigUint;

/// Largest supported universe bound. Values live in `[0, m]` with `m <= MAX_UNIVERSE`.
pub const MAX_UNIVERSE: u64 = (1 << 63) - 1;

/// Below this universe `b_bits` is computed with exact big-integer arithmetic.
pub const EXACT_B_BITS_LIMIT: u64 = 1 << 20;

/// Low-part width ⌈log2(m/n)⌉, clamped at 0: the smallest ℓ with n·2^ℓ ≥ m.
pub fn low_width(n: u64, m: u64) -> u32 {
    if n == 0 {
        return 0;
    }
    let mut ell = 0u32;
    while (n as u128) << ell < m as u128 {
        ell += 1;
    }
    ell
}

/// Number of bucket terminators needed in H: ⌈m / 2^ℓ⌉.
#[inline]
pub fn high_buckets(m: u64, ell: u32) -> u64 {
    if ell >= 64 {
        return u64::from(m > 0);
    }
    (m >> ell) + u64::from(m & ((1u64 << ell) - 1) != 0)
}

/// EF(n, m) = nφ + n + ⌈m/2^φ⌉ with φ = ⌈log2(m/n)⌉; 0 for n = 0.
pub fn ef_bits(n: u64, m: u64) -> u64 {
    if n == 0 {
        return 0;
    }
    let phi = low_width(n, m);
    n * phi as u64 + n + high_buckets(m, phi)
}

/// The looser bound n⌈log2(m/n)⌉ + 2n.
pub fn ef_upper_bound(n: u64, m: u64) -> u64 {
    n * low_width(n, m) as u64 + 2 * n
}

/// B(n, m) = ⌈log2 C(m+1, n)⌉ for an n-subset of `[0, m]`.
pub fn b_bits(n: u64, m: u64) -> u64 {
    let total = m as u128 + 1;
    if n as u128 > total {
        return 0;
    }
    let total = total as u64;
    let k = n.min(total - n);
    if k == 0 {
        return 0;
    }
    if m <= EXACT_B_BITS_LIMIT {
        b_bits_exact(total, k)
    } else {
        b_bits_approx(total, k)
    }
}

/// ⌈log2 C(total, k)⌉ from the prime factorization of the binomial.
pub(crate) fn b_bits_exact(total: u64, k: u64) -> u64 {
    let k = k.min(total - k);
    if k == 0 {
        return 0;
    }
    let n = total as usize;
    let mut composite = vec![false; n + 1];
    let mut factors = Vec::new();
    for p in 2..=n {
        if composite[p] {
            continue;
        }
        let mut q = p * p;
        while q <= n {
            composite[q] = true;
            q += p;
        }
        // Legendre: exponent of p in total! / (k! (total-k)!).
        let p64 = p as u64;
        let mut e = 0u32;
        let mut pk = p64;
        loop {
            e += (total / pk - k / pk - (total - k) / pk) as u32;
            match pk.checked_mul(p64) {
                Some(next) if next <= total => pk = next,
                _ => break,
            }
        }
        if e > 0 {
            factors.push(BigUint::from(p64).pow(e));
        }
    }
    let product = product_tree(factors);
    let bits = product.bits();
    if product.trailing_zeros() == Some(bits - 1) {
        bits - 1
    } else {
        bits
    }
}

fn product_tree(mut xs: Vec<BigUint>) -> BigUint {
    if xs.is_empty() {
        return BigUint::from(1u32);
    }
    while xs.len() > 1 {
        let mut next = Vec::with_capacity(xs.len().div_ceil(2));
        let mut it = xs.into_iter();
        while let Some(a) = it.next() {
            match it.next() {
                Some(b) => next.push(a * b),
                None => next.push(a),
            }
        }
        xs = next;
    }
    xs.pop().unwrap()
}

/// Upper estimate of ⌈log2 C(total, k)⌉: the floating value plus its error bound, rounded up.
pub(crate) fn b_bits_approx(total: u64, k: u64) -> u64 {
    let k = k.min(total - k);
    if k == 0 {
        return 0;
    }
    let (log2c, err) = log2_binomial(total, k);
    (log2c + err).ceil() as u64
}

/// log2 C(N, k) and an absolute error bound, for 1 ≤ k ≤ N/2.
fn log2_binomial(total: u64, k: u64) -> (f64, f64) {
    let n = total as f64;
    let kf = k as f64;
    if k <= 4096 {
        // Direct sum: Σ log2((N - i) / (k - i)).
        let mut s = 0.0f64;
        for i in 0..k {
            s += ((total - i) as f64 / (k - i) as f64).log2();
        }
        let err = k as f64 * 4.0 * f64::EPSILON * (s.abs() / k as f64 + 1.0) + 1e-9;
        return (s, err);
    }
    let r = n - kf;
    // ln C = k ln(N/k) - (N-k) ln(1 - k/N) + ½ ln(N / (2π k (N-k))) + Stirling corrections.
    let mut ln = kf * (n / kf).ln() - r * (-kf / n).ln_1p()
        + 0.5 * (n / (2.0 * std::f64::consts::PI * kf * r)).ln();
    ln += 1.0 / (12.0 * n) - 1.0 / (12.0 * kf) - 1.0 / (12.0 * r);
    ln -= 1.0 / (360.0 * n.powi(3)) - 1.0 / (360.0 * kf.powi(3)) - 1.0 / (360.0 * r.powi(3));
    let value = ln / std::f64::consts::LN_2;
    // Truncation after the k^-3 term is below 1/(1260 k^5); rounding grows with the magnitude.
    let err = value.abs() * 64.0 * f64::EPSILON + 1.0 / (1260.0 * kf.powi(5)) + 1e-9;
    (value, err)
}

/// Measured space of a structure against the EF and information-theoretic references.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpaceReport {
    pub n: u64,
    pub m: u64,
    pub ef_bits: u64,
    pub b_bits: u64,
    /// Everything the structure holds in memory, indexes included.
    pub measured_bits: u64,
    /// The compressed element payload alone (high and low parts).
    pub payload_bits: u64,
    /// measured_bits − ef_bits.
    pub redundancy_bits: i64,
    /// measured_bits − b_bits.
    pub b_gap_bits: i64,
    pub components: Vec<(&'static str, u64)>,
}

impl SpaceReport {
    pub fn new(n: u64, m: u64, payload_bits: u64, components: Vec<(&'static str, u64)>) -> Self {
        let measured: u64 = components.iter().map(|&(_, b)| b).sum();
        let ef = ef_bits(n, m);
        let b = b_bits(n, m);
        Self {
            n,
            m,
            ef_bits: ef,
            b_bits: b,
            measured_bits: measured,
            payload_bits,
            redundancy_bits: measured as i64 - ef as i64,
            b_gap_bits: measured as i64 - b as i64,
            components,
        }
    }

    pub fn redundancy_per_n(&self) -> f64 {
        if self.n == 0 {
            0.0
        } else {
            self.redundancy_bits as f64 / self.n as f64
        }
    }

    pub fn bits_per_element(&self) -> f64 {
        if self.n == 0 {
            0.0
        } else {
            self.measured_bits as f64 / self.n as f64
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn ceil_log2_ratio_f64(n: u64, m: u64) -> u32 {
        if m <= n {
            0
        } else {
            (m as f64 / n as f64).log2().ceil() as u32
        }
    }

    #[test]
    fn low_width_examples() {
        assert_eq!(low_width(12, 63), 3);
        assert_eq!(low_width(6, 15), 2);
        assert_eq!(low_width(1, 1), 0);
        assert_eq!(low_width(10, 5), 0);
        assert_eq!(low_width(4, 8), 1);
        assert_eq!(low_width(4, 9), 2);
        assert_eq!(low_width(1, MAX_UNIVERSE), 63);
    }

    #[test]
    fn low_width_matches_float_away_from_powers() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..10_000 {
            let n = rng.random_range(1..10_000u64);
            let m = rng.random_range(n..1u64 << 40);
            let ratio = m as f64 / n as f64;
            if (ratio.log2() - ratio.log2().round()).abs() > 1e-9 {
                assert_eq!(low_width(n, m), ceil_log2_ratio_f64(n, m));
            }
        }
    }

    #[test]
    fn ef_bits_examples() {
        assert_eq!(ef_bits(12, 63), 56);
        assert_eq!(ef_bits(6, 15), 22);
        assert_eq!(ef_bits(1, 1), 2);
        assert_eq!(ef_bits(6, 48), 30);
        assert_eq!(ef_bits(0, 100), 0);
    }

    #[test]
    fn ef_bits_within_lemma_bound() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..10_000 {
            let n = rng.random_range(1..10_000u64);
            let m = rng.random_range(n..1u64 << 40);
            assert!(ef_bits(n, m) <= ef_upper_bound(n, m));
        }
    }

    fn binomial_u128(n: u64, k: u64) -> u128 {
        let mut c = 1u128;
        for i in 0..k {
            c = c * (n - i) as u128 / (i + 1) as u128;
        }
        c
    }

    fn ceil_log2_u128(x: u128) -> u64 {
        if x <= 1 {
            0
        } else {
            128 - (x - 1).leading_zeros() as u64
        }
    }

    #[test]
    fn b_bits_small_exact() {
        assert_eq!(b_bits(1, 1), 1);
        assert_eq!(b_bits(0, 10), 0);
        assert_eq!(b_bits(11, 10), 0);
        assert_eq!(b_bits(12, 63), ceil_log2_u128(binomial_u128(64, 12)));
        for total in 1..=60u64 {
            for k in 0..=total {
                let want = ceil_log2_u128(binomial_u128(total, k));
                assert_eq!(b_bits(k, total - 1), want, "C({total},{k})");
            }
        }
    }

    #[test]
    fn b_bits_power_of_two_boundary() {
        // C(4,1) = 4 exactly: two bits, not three.
        assert_eq!(b_bits(1, 3), 2);
        assert_eq!(b_bits_exact(8, 1), 3);
    }

    #[test]
    fn b_bits_routes_agree() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut equal = 0;
        let trials = 60;
        for _ in 0..trials {
            let total = rng.random_range(1u64 << 16..1 << 20);
            let k = rng.random_range(1..=total / 2);
            let exact = b_bits_exact(total, k);
            let approx = b_bits_approx(total, k);
            assert!(approx == exact || approx == exact + 1, "C({total},{k}): {exact} vs {approx}");
            if approx == exact {
                equal += 1;
            }
        }
        assert!(equal >= trials - 2, "only {equal}/{trials} exact");
    }

    #[test]
    fn b_bits_below_ef_plus_2n() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..2000 {
            let n = rng.random_range(1..5000u64);
            let m = rng.random_range(n..1u64 << 40);
            assert!(b_bits(n, m) <= ef_bits(n, m) + 2 * n);
        }
    }

    #[test]
    fn space_report_arithmetic() {
        let r = SpaceReport::new(12, 63, 55, vec![("payload", 55), ("index", 10)]);
        assert_eq!(r.measured_bits, 65);
        assert_eq!(r.ef_bits, 56);
        assert_eq!(r.redundancy_bits, 9);
        assert_eq!(r.b_gap_bits, 65 - r.b_bits as i64);
    }
}
