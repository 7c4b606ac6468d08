//! Static Elias-Fano encoding of a non-decreasing sequence over `[0, m]`.
//!
//! Each value is split into ℓ low bits, stored verbatim in a packed array,
//! and a high part `h = v >> ℓ` written in negated unary: element `i` sets
//! bit `h_i + i` of the high bit vector. The high vector has one terminating
//! zero per bucket, so its length is `n + ⌈m / 2^ℓ⌉`.
//!
//! ```
//! use efset::EliasFano;
//!
//! let s = [3, 4, 7, 13, 14, 15, 21, 25, 36, 38, 54, 62];
//! let ef = EliasFano::encode(&s, 63).unwrap();
//! assert_eq!(ef.low_width(), 3);
//! assert_eq!(ef.access(8).unwrap(), 36);
//! assert_eq!(ef.predecessor(30), Some(25));
//! ```

use std::io::{Read, Write};

use crate::bitvec::BitVector;
use crate::codec;
use crate::error::{check_index, Error, Result};
use crate::packed::PackedInts;
use crate::space::{ef_bits, high_buckets, low_width, SpaceReport, MAX_UNIVERSE};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EliasFano {
    n: usize,
    universe: u64,
    ell: u32,
    low: PackedInts,
    high: BitVector,
}

pub(crate) fn check_universe(m: u64) -> Result<()> {
    if m > MAX_UNIVERSE {
        Err(Error::UniverseTooLarge(m))
    } else {
        Ok(())
    }
}

/// Checks the input is non-decreasing and bounded by `m`.
fn check_monotone(values: &[u64], m: u64) -> Result<()> {
    check_universe(m)?;
    for (i, w) in values.windows(2).enumerate() {
        if w[1] < w[0] {
            return Err(Error::Unsorted { position: i + 1 });
        }
    }
    if let Some(&last) = values.last() {
        if last > m {
            return Err(Error::OutOfUniverse {
                value: last,
                universe: m,
            });
        }
    }
    Ok(())
}

/// Checks the input is strictly increasing and bounded by `m`.
pub fn check_strict(values: &[u64], m: u64) -> Result<()> {
    check_monotone(values, m)?;
    for (i, w) in values.windows(2).enumerate() {
        if w[1] == w[0] {
            return Err(Error::Duplicate {
                position: i + 1,
                value: w[1],
            });
        }
    }
    Ok(())
}

impl EliasFano {
    /// Encodes `values` (non-decreasing, each ≤ `m`) with ℓ = ⌈log2(m/n)⌉.
    pub fn encode(values: &[u64], m: u64) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::Empty);
        }
        check_universe(m)?;
        let ell = low_width(values.len() as u64, m);
        Self::encode_with_low_width(values, m, ell)
    }

    /// Encodes with an explicit low width. The high part grows to `n + ⌈m/2^ℓ⌉` bits.
    pub fn encode_with_low_width(values: &[u64], m: u64, ell: u32) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::Empty);
        }
        if ell > 63 {
            return Err(Error::ValueTooWide {
                value: ell as u64,
                width: 6,
            });
        }
        check_monotone(values, m)?;
        let n = values.len();
        let buckets = high_buckets(m, ell);
        let high_len = n + buckets as usize;
        let mut high = BitVector::zeros(high_len);
        let mut low = PackedInts::with_len(ell, n);
        let mask = (1u64 << ell) - 1;
        for (i, &v) in values.iter().enumerate() {
            high.set_bit((v >> ell) as usize + i)?;
            low.set(i, v & mask)?;
        }
        high.build_index();
        Ok(Self {
            n,
            universe: m,
            ell,
            low,
            high,
        })
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    #[inline]
    pub fn universe(&self) -> u64 {
        self.universe
    }

    #[inline]
    pub fn low_width(&self) -> u32 {
        self.ell
    }

    pub fn high(&self) -> &BitVector {
        &self.high
    }

    pub fn low(&self) -> &PackedInts {
        &self.low
    }

    /// The `i`-th smallest element: `((select1(i) − i) << ℓ) | low[i]`.
    #[inline]
    pub fn access(&self, i: usize) -> Result<u64> {
        check_index(i, self.n)?;
        Ok(self.value(i))
    }

    #[inline]
    fn value(&self, i: usize) -> u64 {
        let pos = self.high.select1(i).expect("index built at encode");
        (((pos - i) as u64) << self.ell) | self.low.get(i)
    }

    /// Number of elements strictly smaller than `x`.
    pub fn rank(&self, x: u64) -> usize {
        let n = self.n;
        let h = (x >> self.ell) as usize;
        let zeros = self.high.zeros_count();
        // Elements with high part h occupy ranks [start, end). select0 is 0-based,
        // so bucket h begins right after the (h-1)-th zero.
        let start = if h == 0 {
            0
        } else if h - 1 < zeros {
            self.high.select0(h - 1).expect("index built") - (h - 1)
        } else {
            return n;
        };
        let end = if h < zeros {
            self.high.select0(h).expect("index built") - h
        } else {
            n
        };
        let xl = x & ((1u64 << self.ell) - 1);
        let (mut lo, mut hi) = (start, end);
        while lo < hi {
            let mid = lo + (hi - lo) / 2;
            if self.low.get(mid) < xl {
                lo = mid + 1;
            } else {
                hi = mid;
            }
        }
        lo
    }

    /// Largest element strictly below `x`.
    pub fn predecessor(&self, x: u64) -> Option<u64> {
        match self.rank(x) {
            0 => None,
            r => Some(self.value(r - 1)),
        }
    }

    /// Smallest element ≥ `x`.
    pub fn successor(&self, x: u64) -> Option<u64> {
        let r = self.rank(x);
        (r < self.n).then(|| self.value(r))
    }

    pub fn contains(&self, x: u64) -> bool {
        self.successor(x) == Some(x)
    }

    /// Sequential decoder: walks H once instead of selecting per element.
    pub fn iter(&self) -> Iter<'_> {
        Iter {
            ef: self,
            i: 0,
            word_idx: 0,
            word: self.high.words().first().copied().unwrap_or(0),
        }
    }

    pub fn decode(&self) -> Vec<u64> {
        self.iter().collect()
    }

    /// Bits of H plus bits of L; with the default ℓ this equals `ef_bits(n, m)`.
    pub fn payload_bits(&self) -> usize {
        self.high.payload_bits() + self.low.payload_bits()
    }

    /// Select index plus word padding and header fields.
    pub fn overhead_bits(&self) -> usize {
        self.size_bits() - self.payload_bits()
    }

    pub fn size_bits(&self) -> usize {
        self.high.size_bits() + self.low.words().len() * 64 + 4 * 64
    }

    pub fn space_report(&self) -> SpaceReport {
        let padding = self.low.words().len() * 64 - self.low.payload_bits()
            + self.high.words().len() * 64
            - self.high.payload_bits();
        SpaceReport::new(
            self.n as u64,
            self.universe,
            self.payload_bits() as u64,
            vec![
                ("high", self.high.payload_bits() as u64),
                ("low", self.low.payload_bits() as u64),
                ("select_index", self.high.index_bits() as u64),
                ("padding", padding as u64),
                ("header", 7 * 64),
            ],
        )
    }

    /// Writes the `EFST` form.
    pub fn write_to<W: Write>(&self, w: &mut W) -> Result<()> {
        codec::write_header(w, b"EFST")?;
        codec::write_u64(w, self.n as u64)?;
        codec::write_u64(w, self.universe)?;
        codec::write_u64(w, self.ell as u64)?;
        self.high.write_to(w)?;
        codec::write_words(w, self.low.words())
    }

    pub fn read_from<R: Read>(r: &mut R) -> Result<Self> {
        codec::read_header(r, b"EFST")?;
        let n = codec::to_usize(codec::read_u64(r)?, "element count")?;
        let universe = codec::read_u64(r)?;
        let ell = codec::read_u64(r)?;
        check_universe(universe)?;
        if ell > 63 {
            return Err(Error::Format(format!("low width {ell} too large")));
        }
        let ell = ell as u32;
        let high = BitVector::read_from(r)?;
        if high.ones() != n {
            return Err(Error::Format(format!(
                "high part has {} ones for {n} elements",
                high.ones()
            )));
        }
        if high.len() != n + high_buckets(universe, ell) as usize {
            return Err(Error::Format("high part length disagrees with header".into()));
        }
        let words = codec::read_words(r, (n as u64 * ell as u64).div_ceil(64))?;
        let low = PackedInts::from_raw(ell, n, words)?;
        let ef = Self {
            n,
            universe,
            ell,
            low,
            high,
        };
        if n > 0 && ef.value(n - 1) > universe {
            return Err(Error::Format("last element exceeds universe".into()));
        }
        Ok(ef)
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::new();
        self.write_to(&mut out).expect("writing to a Vec cannot fail");
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let mut cur = bytes;
        let ef = Self::read_from(&mut cur)?;
        if !cur.is_empty() {
            return Err(Error::Format("trailing bytes".into()));
        }
        Ok(ef)
    }
}

pub struct Iter<'a> {
    ef: &'a EliasFano,
    i: usize,
    word_idx: usize,
    word: u64,
}

impl Iterator for Iter<'_> {
    type Item = u64;

    fn next(&mut self) -> Option<u64> {
        if self.i >= self.ef.n {
            return None;
        }
        let words = self.ef.high.words();
        while self.word == 0 {
            self.word_idx += 1;
            self.word = words[self.word_idx];
        }
        let pos = self.word_idx * 64 + self.word.trailing_zeros() as usize;
        self.word &= self.word - 1;
        let v = (((pos - self.i) as u64) << self.ef.ell) | self.ef.low.get(self.i);
        self.i += 1;
        Some(v)
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let r = self.ef.n - self.i;
        (r, Some(r))
    }
}

impl ExactSizeIterator for Iter<'_> {}

/// Result of splitting a set at rank `k`.
#[derive(Clone, Debug)]
pub struct Split {
    /// `S[0, k)` over universe `S[k−1]`.
    pub left: EliasFano,
    /// `S[l] − S[k−1] + 1` for `l ≥ k`, over universe `S[n−1] − S[k−1] + 1`.
    pub right: EliasFano,
    /// `S[k−1]`, needed to map the right part back.
    pub pivot: u64,
}

impl Split {
    /// Re-assembles the original values.
    pub fn decode(&self) -> Vec<u64> {
        let mut out = self.left.decode();
        out.extend(self.right.iter().map(|v| v + self.pivot - 1));
        out
    }

    pub fn ef_bits_sum(&self) -> u64 {
        ef_bits(self.left.len() as u64, self.left.universe())
            + ef_bits(self.right.len() as u64, self.right.universe())
    }
}

/// Splits a strictly increasing set at rank `k` (1 ≤ k < n), remapping the tail.
pub fn split(values: &[u64], k: usize) -> Result<Split> {
    let n = values.len();
    if k == 0 || k >= n {
        return Err(Error::OutOfRange {
            index: k as u64,
            len: n as u64,
        });
    }
    check_strict(values, MAX_UNIVERSE)?;
    let pivot = values[k - 1];
    let left = EliasFano::encode(&values[..k], pivot)?;
    let tail: Vec<u64> = values[k..].iter().map(|&v| v - pivot + 1).collect();
    let right = EliasFano::encode(&tail, values[n - 1] - pivot + 1)?;
    Ok(Split { left, right, pivot })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::seq::index::sample;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    pub(crate) const TWELVE: [u64; 12] = [3, 4, 7, 13, 14, 15, 21, 25, 36, 38, 54, 62];

    fn random_set(rng: &mut ChaCha8Rng, n: usize, m: u64) -> Vec<u64> {
        let mut v: Vec<u64> = if (m as usize) < 4 * n + 64 {
            sample(rng, m as usize + 1, n).into_iter().map(|x| x as u64).collect()
        } else {
            let mut s = std::collections::BTreeSet::new();
            while s.len() < n {
                s.insert(rng.random_range(0..=m));
            }
            s.into_iter().collect()
        };
        v.sort_unstable();
        v
    }

    #[test]
    fn twelve_encoding() {
        let ef = EliasFano::encode(&TWELVE, 63).unwrap();
        assert_eq!(ef.low_width(), 3);
        assert_eq!(ef.high().to_string(), "11101110101011001010");
        let lows: Vec<u64> = ef.low().iter().collect();
        assert_eq!(lows, [3, 4, 7, 5, 6, 7, 5, 1, 4, 6, 6, 6]);
        assert_eq!(ef.access(8).unwrap(), 36);
        assert_eq!(ef.access(0).unwrap(), 3);
        assert_eq!(ef.predecessor(30), Some(25));
        assert_eq!(ef.predecessor(3), None);
        assert_eq!(ef.predecessor(63), Some(62));
        assert_eq!(ef.successor(30), Some(36));
        assert_eq!(ef.successor(63), None);
        assert_eq!(ef.payload_bits(), 56);
        assert_eq!(ef.decode(), TWELVE);
    }

    #[test]
    fn single_element() {
        let ef = EliasFano::encode(&[0], 1).unwrap();
        assert_eq!(ef.low_width(), 0);
        assert_eq!(ef.high().to_string(), "10");
        assert_eq!(ef.access(0).unwrap(), 0);
        assert!(ef.access(1).is_err());
    }

    #[test]
    fn encode_errors() {
        assert!(matches!(EliasFano::encode(&[], 5), Err(Error::Empty)));
        assert!(matches!(
            EliasFano::encode(&[1, 3, 2], 5),
            Err(Error::Unsorted { position: 2 })
        ));
        assert!(matches!(
            EliasFano::encode(&[1, 9], 5),
            Err(Error::OutOfUniverse { .. })
        ));
        assert!(matches!(
            EliasFano::encode(&[1], u64::MAX),
            Err(Error::UniverseTooLarge(_))
        ));
    }

    #[test]
    fn duplicates_are_encodable() {
        let v = [2, 2, 2, 5, 5, 9];
        let ef = EliasFano::encode(&v, 9).unwrap();
        assert_eq!(ef.decode(), v);
        assert_eq!(ef.predecessor(5), Some(2));
        assert_eq!(ef.rank(5), 3);
        assert!(check_strict(&v, 9).is_err());
    }

    #[test]
    fn round_trip_random() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let v = random_set(&mut rng, 100, (1 << 20) - 1);
        let ef = EliasFano::encode(&v, (1 << 20) - 1).unwrap();
        assert_eq!(ef.decode(), v);
        for (i, &x) in v.iter().enumerate() {
            assert_eq!(ef.access(i).unwrap(), x);
        }
    }

    #[test]
    fn exhaustive_small_universes() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..200 {
            let m = rng.random_range(1..=1u64 << 12);
            let n = rng.random_range(1..=64.min(m as usize + 1));
            let v = random_set(&mut rng, n, m);
            let ef = EliasFano::encode(&v, m).unwrap();
            assert_eq!(ef.payload_bits() as u64, ef_bits(n as u64, m));
            let mut r = 0;
            for x in 0..=m {
                while r < n && v[r] < x {
                    r += 1;
                }
                assert_eq!(ef.rank(x), r);
                let want = if r == 0 { None } else { Some(v[r - 1]) };
                assert_eq!(ef.predecessor(x), want, "x={x} m={m}");
            }
            assert_eq!(ef.rank(m + 1000), n);
        }
    }

    #[test]
    fn forced_low_width() {
        let v = [1u64, 40, 41, 300];
        for ell in 0..10 {
            let ef = EliasFano::encode_with_low_width(&v, 300, ell).unwrap();
            assert_eq!(ef.decode(), v);
            assert_eq!(ef.predecessor(41), Some(40));
            assert_eq!(ef.high().len(), 4 + high_buckets(300, ell) as usize);
        }
    }

    #[test]
    fn twelve_split() {
        let s = split(&TWELVE, 6).unwrap();
        assert_eq!(s.left.decode(), [3, 4, 7, 13, 14, 15]);
        assert_eq!(s.left.universe(), 15);
        assert_eq!(s.right.decode(), [7, 11, 22, 24, 40, 48]);
        assert_eq!(s.right.universe(), 48);
        assert_eq!(s.pivot, 15);
        assert_eq!(ef_bits(6, 15), 22);
        assert_eq!(ef_bits(6, 48), 30);
        assert_eq!(s.ef_bits_sum(), 52);
        assert!(s.ef_bits_sum() <= 56);
        assert_eq!(s.decode(), TWELVE);

        let s1 = split(&TWELVE, 1).unwrap();
        assert_eq!(s1.left.decode(), [3]);
        assert_eq!(s1.decode(), TWELVE);
        assert!(split(&TWELVE, 0).is_err());
        assert!(split(&TWELVE, 12).is_err());
    }

    #[test]
    fn serialization_round_trip() {
        let ef = EliasFano::encode(&TWELVE, 63).unwrap();
        let bytes = ef.to_bytes();
        assert_eq!(&bytes[..4], b"EFST");
        let back = EliasFano::from_bytes(&bytes).unwrap();
        assert_eq!(back, ef);
        assert_eq!(back.to_bytes(), bytes);
        assert_eq!(back.predecessor(30), Some(25));
        assert!(EliasFano::from_bytes(&bytes[..bytes.len() - 3]).is_err());
    }

    proptest! {
        #[test]
        fn access_and_predecessor_match_sorted_oracle(
            mut v in proptest::collection::vec(0u64..1 << 40, 1..300),
            queries in proptest::collection::vec(0u64..1 << 41, 50),
        ) {
            v.sort_unstable();
            v.dedup();
            let m = (1u64 << 40) - 1;
            let ef = EliasFano::encode(&v, m).unwrap();
            for (i, &x) in v.iter().enumerate() {
                prop_assert_eq!(ef.access(i).unwrap(), x);
            }
            for q in queries {
                let r = v.partition_point(|&y| y < q);
                prop_assert_eq!(ef.rank(q), r);
                prop_assert_eq!(ef.predecessor(q), r.checked_sub(1).map(|i| v[i]));
                prop_assert_eq!(ef.successor(q), v.get(r).copied());
            }
        }

        #[test]
        fn split_round_trips(mut v in proptest::collection::vec(0u64..1 << 30, 2..200), k in any::<prop::sample::Index>()) {
            v.sort_unstable();
            v.dedup();
            prop_assume!(v.len() >= 2);
            let k = 1 + k.index(v.len() - 1);
            let s = split(&v, k).unwrap();
            prop_assert_eq!(s.decode(), v);
        }
    }
}
