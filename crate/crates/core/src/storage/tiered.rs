//! Dynamic array of fixed-width integers with O(1) access and O(n^ε) updates.
//!
//! Elements live in power-of-two segments stored as circular buffers inside
//! one packed word vector. Every segment except the last is full, so the
//! segment of rank `i` is `i >> shift`. An insert shifts within one segment
//! and then moves one element across each later segment boundary by rotating
//! the circular heads.

use crate::bits::{low_mask, read_bits, write_bits, WORD_BITS};
use crate::error::{check_index, Error, Result};

const MIN_SHIFT: u32 = 3;

#[derive(Clone, Debug)]
pub struct TieredArray {
    width: u32,
    epsilon: f64,
    shift: u32,
    seg_words: usize,
    data: Vec<u64>,
    heads: Vec<u32>,
    len: usize,
}

impl PartialEq for TieredArray {
    fn eq(&self, other: &Self) -> bool {
        self.width == other.width && self.len == other.len && self.iter().eq(other.iter())
    }
}

impl TieredArray {
    /// Empty array of `width`-bit elements with the default ε = 1/2.
    pub fn new(width: u32) -> Self {
        Self::with_epsilon(width, 0.5)
    }

    pub fn with_epsilon(width: u32, epsilon: f64) -> Self {
        assert!(width <= 64, "width {width} exceeds 64");
        assert!(epsilon > 0.0 && epsilon < 1.0, "epsilon must be in (0, 1)");
        let mut t = Self {
            width,
            epsilon,
            shift: MIN_SHIFT,
            seg_words: 0,
            data: Vec::new(),
            heads: Vec::new(),
            len: 0,
        };
        t.seg_words = t.words_per_segment(t.shift);
        t
    }

    pub fn from_slice(width: u32, values: &[u64]) -> Result<Self> {
        Self::from_slice_with_epsilon(width, 0.5, values)
    }

    pub fn from_slice_with_epsilon(width: u32, epsilon: f64, values: &[u64]) -> Result<Self> {
        let mut t = Self::with_epsilon(width, epsilon);
        for &v in values {
            t.check_value(v)?;
        }
        t.fill(values, t.target_shift(values.len()));
        Ok(t)
    }

    fn words_per_segment(&self, shift: u32) -> usize {
        ((self.width as usize) << shift).div_ceil(WORD_BITS)
    }

    fn target_shift(&self, len: usize) -> u32 {
        let cap = (len.max(1) as f64).powf(self.epsilon).ceil() as usize;
        cap.next_power_of_two().trailing_zeros().max(MIN_SHIFT)
    }

    /// Lays out `values` from scratch with segment capacity `2^shift`.
    fn fill(&mut self, values: &[u64], shift: u32) {
        self.shift = shift;
        self.seg_words = self.words_per_segment(shift);
        let cap = 1usize << shift;
        let segs = values.len().div_ceil(cap);
        self.heads = vec![0; segs];
        self.data = vec![0; segs * self.seg_words];
        self.len = values.len();
        for (i, &v) in values.iter().enumerate() {
            let pos = self.bit_pos(i >> shift, i & (cap - 1));
            write_bits(&mut self.data, pos, self.width, v);
        }
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.len
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn width(&self) -> u32 {
        self.width
    }

    /// Current segment capacity.
    pub fn segment_capacity(&self) -> usize {
        1 << self.shift
    }

    /// Number of directory slots (segments).
    pub fn directory_len(&self) -> usize {
        self.heads.len()
    }

    fn check_value(&self, v: u64) -> Result<()> {
        if v & !low_mask(self.width) != 0 {
            Err(Error::ValueTooWide {
                value: v,
                width: self.width,
            })
        } else {
            Ok(())
        }
    }

    /// Bit offset of logical slot `off` of segment `seg`.
    #[inline]
    fn bit_pos(&self, seg: usize, off: usize) -> usize {
        let cap_mask = (1usize << self.shift) - 1;
        let slot = (self.heads[seg] as usize + off) & cap_mask;
        seg * self.seg_words * WORD_BITS + slot * self.width as usize
    }

    #[inline]
    fn read(&self, seg: usize, off: usize) -> u64 {
        read_bits(&self.data, self.bit_pos(seg, off), self.width)
    }

    #[inline]
    fn write(&mut self, seg: usize, off: usize, v: u64) {
        let pos = self.bit_pos(seg, off);
        write_bits(&mut self.data, pos, self.width, v);
    }

    /// Element `i` without bounds reporting; panics in debug builds when out of range.
    #[inline]
    pub fn get(&self, i: usize) -> u64 {
        debug_assert!(i < self.len);
        self.read(i >> self.shift, i & ((1 << self.shift) - 1))
    }

    pub fn access(&self, i: usize) -> Result<u64> {
        check_index(i, self.len)?;
        Ok(self.get(i))
    }

    pub fn set(&mut self, i: usize, v: u64) -> Result<()> {
        check_index(i, self.len)?;
        self.check_value(v)?;
        self.write(i >> self.shift, i & ((1 << self.shift) - 1), v);
        Ok(())
    }

    fn seg_count(&self, seg: usize) -> usize {
        let cap = 1usize << self.shift;
        if seg + 1 < self.heads.len() {
            cap
        } else {
            self.len - seg * cap
        }
    }

    pub fn push(&mut self, v: u64) -> Result<()> {
        self.insert(self.len, v)
    }

    /// Inserts `v` before position `i` (`i == len` appends).
    pub fn insert(&mut self, i: usize, v: u64) -> Result<()> {
        if i > self.len {
            return Err(Error::OutOfRange {
                index: i as u64,
                len: self.len as u64 + 1,
            });
        }
        self.check_value(v)?;
        let cap = 1usize << self.shift;
        if self.len == self.heads.len() * cap {
            self.heads.push(0);
            self.data.resize(self.data.len() + self.seg_words, 0);
        }
        let last = self.heads.len() - 1;
        let seg = i >> self.shift;
        // Carry one element from the tail of each full segment into the next one.
        for t in (seg + 1..=last).rev() {
            let carried = self.read(t - 1, cap - 1);
            self.heads[t] = (self.heads[t] + cap as u32 - 1) & (cap as u32 - 1);
            self.write(t, 0, carried);
        }
        let count = if seg < last { cap - 1 } else { self.seg_count(seg) };
        let off = i & (cap - 1);
        for j in (off..count).rev() {
            let x = self.read(seg, j);
            self.write(seg, j + 1, x);
        }
        self.write(seg, off, v);
        self.len += 1;
        self.maybe_resize();
        Ok(())
    }

    /// Removes and returns element `i`.
    pub fn delete(&mut self, i: usize) -> Result<u64> {
        check_index(i, self.len)?;
        let cap = 1usize << self.shift;
        let last = self.heads.len() - 1;
        let seg = i >> self.shift;
        let off = i & (cap - 1);
        let count = self.seg_count(seg);
        let removed = self.read(seg, off);
        for j in off + 1..count {
            let x = self.read(seg, j);
            self.write(seg, j - 1, x);
        }
        for t in seg + 1..=last {
            let carried = self.read(t, 0);
            self.heads[t] = (self.heads[t] + 1) & (cap as u32 - 1);
            self.write(t - 1, cap - 1, carried);
        }
        self.len -= 1;
        if self.len == last * cap {
            self.heads.pop();
            self.data.truncate(self.heads.len() * self.seg_words);
        }
        self.maybe_resize();
        Ok(removed)
    }

    fn maybe_resize(&mut self) {
        if self.len % 64 != 0 {
            return;
        }
        let want = self.target_shift(self.len);
        if want >= self.shift + 2 || want + 2 <= self.shift {
            let values = self.to_vec();
            self.fill(&values, want);
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = u64> + '_ {
        (0..self.len).map(move |i| self.get(i))
    }

    pub fn to_vec(&self) -> Vec<u64> {
        self.iter().collect()
    }

    /// Element bits: exactly `len * width`.
    pub fn payload_bits(&self) -> usize {
        self.len * self.width as usize
    }

    /// Unused slots, directory heads and the fixed header fields.
    pub fn overhead_bits(&self) -> usize {
        self.data.len() * WORD_BITS - self.payload_bits() + self.heads.len() * 32 + 4 * 64
    }

    pub fn size_bits(&self) -> usize {
        self.payload_bits() + self.overhead_bits()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn sequential_fill_and_access() {
        let mut t = TieredArray::new(7);
        for v in 0..100 {
            t.push(v).unwrap();
        }
        assert_eq!(t.access(42).unwrap(), 42);
        assert!(t.access(100).is_err());
        assert_eq!(t.to_vec(), (0..100).collect::<Vec<_>>());
    }

    #[test]
    fn insert_front_shifts() {
        let mut t = TieredArray::from_slice(8, &[1, 2, 3]).unwrap();
        t.insert(0, 9).unwrap();
        assert_eq!(t.access(0).unwrap(), 9);
        assert_eq!(t.access(1).unwrap(), 1);
        let mut e = TieredArray::new(4);
        e.insert(0, 7).unwrap();
        assert_eq!(e.to_vec(), [7]);
    }

    #[test]
    fn delete_to_empty() {
        let mut t = TieredArray::from_slice(10, &(0..300).collect::<Vec<_>>()).unwrap();
        while !t.is_empty() {
            let last = t.len() - 1;
            assert_eq!(t.delete(last).unwrap(), last as u64);
        }
        assert_eq!(t.len(), 0);
        assert_eq!(t.directory_len(), 0);
        assert!(t.delete(0).is_err());
    }

    #[test]
    fn width_errors() {
        let mut t = TieredArray::new(3);
        assert!(matches!(t.push(8), Err(Error::ValueTooWide { .. })));
        assert!(t.insert(2, 1).is_err());
    }

    #[test]
    fn zero_width_elements() {
        let mut t = TieredArray::new(0);
        for _ in 0..1000 {
            t.push(0).unwrap();
        }
        t.insert(500, 0).unwrap();
        assert_eq!(t.delete(3).unwrap(), 0);
        assert_eq!(t.len(), 1000);
        assert_eq!(t.payload_bits(), 0);
    }

    fn differential(epsilon: f64, ops: usize, seed: u64) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let width = 13;
        let mut t = TieredArray::with_epsilon(width, epsilon);
        let mut oracle: Vec<u64> = Vec::new();
        for step in 0..ops {
            let v = rng.random_range(0..1u64 << width);
            if oracle.is_empty() || rng.random_bool(0.55) {
                let i = rng.random_range(0..=oracle.len());
                t.insert(i, v).unwrap();
                oracle.insert(i, v);
            } else if rng.random_bool(0.8) {
                let i = rng.random_range(0..oracle.len());
                assert_eq!(t.delete(i).unwrap(), oracle.remove(i));
            } else {
                let i = rng.random_range(0..oracle.len());
                t.set(i, v).unwrap();
                oracle[i] = v;
            }
            if !oracle.is_empty() {
                let i = rng.random_range(0..oracle.len());
                assert_eq!(t.access(i).unwrap(), oracle[i]);
            }
            if step % 5000 == 0 {
                assert_eq!(t.to_vec(), oracle);
                let cap = t.segment_capacity();
                assert!(t.directory_len() <= oracle.len().div_ceil(cap));
            }
        }
        assert_eq!(t.to_vec(), oracle);
    }

    #[test]
    fn differential_against_vec() {
        differential(0.5, 100_000, 1);
    }

    #[test]
    fn differential_small_epsilon() {
        differential(0.15, 30_000, 2);
    }

    #[test]
    fn directory_scales_with_epsilon() {
        let n = 1 << 16;
        let vals: Vec<u64> = (0..n).map(|v| v & 0xff).collect();
        let t = TieredArray::from_slice(8, &vals).unwrap();
        // ε = 1/2: about √n segments.
        assert!(t.directory_len() <= 2 * (n as f64).sqrt() as usize);
        assert!(t.segment_capacity() <= 2 * (n as f64).sqrt() as usize);
    }
}
