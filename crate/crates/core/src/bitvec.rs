//! Plain bit vector with a rank/select index.
//!
//! Bits are packed LSB-first in 64-bit words. A vector is mutable until
//! [`BitVector::build_index`] is called; any later mutation bumps a
//! generation counter and queries fail with [`Error::StaleIndex`] until the
//! index is rebuilt.
//!
//! The index keeps an absolute count every 4096 bits, a 16-bit relative count
//! every 512 bits, and one block hint every [`SELECT_SAMPLE`] ones and zeros.
//! Rank reads one sample pair plus at most eight popcounts. Select jumps to the
//! sampled block, narrows by binary search on block counts, then scans at most
//! eight words.

use std::io::{Read, Write};

use crate::bits::{select_in_word, words_for, WORD_BITS};
use crate::codec;
use crate::error::{Error, Result};

/// One sampled block hint every this many ones (and zeros).
pub const SELECT_SAMPLE: usize = 512;

const BLOCK_BITS: usize = 512;
const BLOCK_WORDS: usize = BLOCK_BITS / WORD_BITS;
const SUPER_BLOCKS: usize = 8;

#[derive(Clone, Debug, Default, PartialEq, Eq)]
struct RankSelectIndex {
    generation: u64,
    supers: Vec<u64>,
    blocks: Vec<u16>,
    sel1: Vec<u32>,
    sel0: Vec<u32>,
}

impl RankSelectIndex {
    fn size_bits(&self) -> usize {
        64 + self.supers.len() * 64
            + self.blocks.len() * 16
            + self.sel1.len() * 32
            + self.sel0.len() * 32
    }
}

#[derive(Clone, Debug, Default)]
pub struct BitVector {
    words: Vec<u64>,
    len: usize,
    ones: usize,
    generation: u64,
    index: Option<RankSelectIndex>,
}

impl PartialEq for BitVector {
    fn eq(&self, other: &Self) -> bool {
        self.len == other.len && self.words == other.words
    }
}

impl Eq for BitVector {}

impl BitVector {
    /// All-zero vector of `len` bits.
    pub fn zeros(len: usize) -> Self {
        Self {
            words: vec![0; words_for(len)],
            len,
            ones: 0,
            generation: 0,
            index: None,
        }
    }

    /// Vector with ones at the given positions (any order, duplicates allowed).
    pub fn from_positions(len: usize, positions: &[usize]) -> Result<Self> {
        let mut bv = Self::zeros(len);
        for &p in positions {
            bv.set_bit(p)?;
        }
        Ok(bv)
    }

    pub fn from_bools(bits: &[bool]) -> Self {
        let mut bv = Self::zeros(bits.len());
        for (i, &b) in bits.iter().enumerate() {
            if b {
                bv.words[i / WORD_BITS] |= 1 << (i % WORD_BITS);
            }
        }
        bv.ones = bv.words.iter().map(|w| w.count_ones() as usize).sum();
        bv
    }

    /// Takes ownership of raw words. Bits at or beyond `len` must be zero.
    pub fn from_words(words: Vec<u64>, len: usize) -> Result<Self> {
        if words.len() != words_for(len) {
            return Err(Error::Format(format!(
                "{} words cannot hold exactly {len} bits",
                words.len()
            )));
        }
        if len % WORD_BITS != 0 {
            if let Some(&last) = words.last() {
                if last >> (len % WORD_BITS) != 0 {
                    return Err(Error::Format("bits set beyond length".into()));
                }
            }
        }
        let ones = words.iter().map(|w| w.count_ones() as usize).sum();
        Ok(Self {
            words,
            len,
            ones,
            generation: 0,
            index: None,
        })
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
    pub fn ones(&self) -> usize {
        self.ones
    }

    #[inline]
    pub fn zeros_count(&self) -> usize {
        self.len - self.ones
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    pub fn generation(&self) -> u64 {
        self.generation
    }

    pub fn get(&self, pos: usize) -> Result<bool> {
        crate::error::check_index(pos, self.len)?;
        Ok(self.words[pos / WORD_BITS] >> (pos % WORD_BITS) & 1 == 1)
    }

    pub fn set_bit(&mut self, pos: usize) -> Result<()> {
        self.assign(pos, true)
    }

    pub fn clear_bit(&mut self, pos: usize) -> Result<()> {
        self.assign(pos, false)
    }

    fn assign(&mut self, pos: usize, value: bool) -> Result<()> {
        crate::error::check_index(pos, self.len)?;
        let w = &mut self.words[pos / WORD_BITS];
        let mask = 1u64 << (pos % WORD_BITS);
        let was = *w & mask != 0;
        if was != value {
            *w ^= mask;
            if value {
                self.ones += 1;
            } else {
                self.ones -= 1;
            }
        }
        self.generation += 1;
        Ok(())
    }

    /// Appends one bit.
    pub fn push(&mut self, bit: bool) {
        if self.len % WORD_BITS == 0 {
            self.words.push(0);
        }
        if bit {
            self.words[self.len / WORD_BITS] |= 1 << (self.len % WORD_BITS);
            self.ones += 1;
        }
        self.len += 1;
        self.generation += 1;
    }

    /// Builds (or rebuilds) the rank/select index for the current contents.
    pub fn build_index(&mut self) {
        let nblocks = words_for(self.len).div_ceil(BLOCK_WORDS);
        let nsupers = nblocks.div_ceil(SUPER_BLOCKS);
        let mut supers = Vec::with_capacity(nsupers + 1);
        let mut blocks = Vec::with_capacity(nblocks);
        let mut sel1 = Vec::with_capacity(self.ones / SELECT_SAMPLE + 1);
        let mut sel0 = Vec::with_capacity(self.zeros_count() / SELECT_SAMPLE + 1);
        let mut total = 0usize;
        let mut super_start = 0usize;
        for b in 0..nblocks {
            if b % SUPER_BLOCKS == 0 {
                supers.push(total as u64);
                super_start = total;
            }
            blocks.push((total - super_start) as u16);
            let lo = b * BLOCK_WORDS;
            let hi = (lo + BLOCK_WORDS).min(self.words.len());
            let c: usize = self.words[lo..hi]
                .iter()
                .map(|w| w.count_ones() as usize)
                .sum();
            let bit_start = b * BLOCK_BITS;
            let bits_here = (self.len - bit_start).min(BLOCK_BITS);
            let zeros_before = bit_start - total;
            // Record every sample whose occurrence falls inside this block.
            while sel1.len() * SELECT_SAMPLE < total + c {
                sel1.push(b as u32);
            }
            while sel0.len() * SELECT_SAMPLE < zeros_before + (bits_here - c) {
                sel0.push(b as u32);
            }
            total += c;
        }
        supers.push(total as u64);
        debug_assert_eq!(total, self.ones);
        self.index = Some(RankSelectIndex {
            generation: self.generation,
            supers,
            blocks,
            sel1,
            sel0,
        });
    }

    /// True when an index exists and matches the current contents.
    pub fn has_valid_index(&self) -> bool {
        matches!(&self.index, Some(ix) if ix.generation == self.generation)
    }

    #[inline]
    fn index(&self) -> Result<&RankSelectIndex> {
        match &self.index {
            Some(ix) if ix.generation == self.generation => Ok(ix),
            _ => Err(Error::StaleIndex),
        }
    }

    #[inline]
    fn ones_before_block(ix: &RankSelectIndex, b: usize) -> usize {
        ix.supers[b / SUPER_BLOCKS] as usize + ix.blocks[b] as usize
    }

    /// Number of ones strictly before `pos`.
    #[inline]
    pub fn rank1(&self, pos: usize) -> Result<usize> {
        let ix = self.index()?;
        if pos > self.len {
            return Err(Error::OutOfRange {
                index: pos as u64,
                len: self.len as u64 + 1,
            });
        }
        if pos == self.len {
            return Ok(self.ones);
        }
        let b = pos / BLOCK_BITS;
        let mut r = Self::ones_before_block(ix, b);
        let w = pos / WORD_BITS;
        for &word in &self.words[b * BLOCK_WORDS..w] {
            r += word.count_ones() as usize;
        }
        let off = pos % WORD_BITS;
        if off > 0 {
            r += (self.words[w] & ((1u64 << off) - 1)).count_ones() as usize;
        }
        Ok(r)
    }

    #[inline]
    pub fn rank0(&self, pos: usize) -> Result<usize> {
        Ok(pos - self.rank1(pos)?)
    }

    /// Position of the `i`-th one (0-based).
    #[inline]
    pub fn select1(&self, i: usize) -> Result<usize> {
        let ix = self.index()?;
        if i >= self.ones {
            return Err(Error::OutOfRange {
                index: i as u64,
                len: self.ones as u64,
            });
        }
        let s = i / SELECT_SAMPLE;
        let lo = ix.sel1[s] as usize;
        let hi = ix.sel1.get(s + 1).map_or(ix.blocks.len() - 1, |&b| b as usize);
        let b = Self::last_block_at_most(lo, hi, i, |b| Self::ones_before_block(ix, b));
        let rest = i - Self::ones_before_block(ix, b);
        Ok(self.scan_block(b, rest, false))
    }

    /// Position of the `i`-th zero (0-based).
    #[inline]
    pub fn select0(&self, i: usize) -> Result<usize> {
        let ix = self.index()?;
        if i >= self.zeros_count() {
            return Err(Error::OutOfRange {
                index: i as u64,
                len: self.zeros_count() as u64,
            });
        }
        let s = i / SELECT_SAMPLE;
        let lo = ix.sel0[s] as usize;
        let hi = ix.sel0.get(s + 1).map_or(ix.blocks.len() - 1, |&b| b as usize);
        let zeros_before = |b: usize| b * BLOCK_BITS - Self::ones_before_block(ix, b);
        let b = Self::last_block_at_most(lo, hi, i, zeros_before);
        let rest = i - zeros_before(b);
        Ok(self.scan_block(b, rest, true))
    }

    /// Largest block `b` in `[lo, hi]` with `before(b) <= i`; `before(lo) <= i` holds.
    #[inline]
    fn last_block_at_most(
        mut lo: usize,
        mut hi: usize,
        i: usize,
        before: impl Fn(usize) -> usize,
    ) -> usize {
        while lo < hi {
            let mid = lo + (hi - lo).div_ceil(2);
            if before(mid) <= i {
                lo = mid;
            } else {
                hi = mid - 1;
            }
        }
        lo
    }

    #[inline]
    fn scan_block(&self, b: usize, mut rest: usize, zeros: bool) -> usize {
        let start = b * BLOCK_WORDS;
        let end = (start + BLOCK_WORDS).min(self.words.len());
        for w in start..end {
            let word = if zeros { !self.words[w] } else { self.words[w] };
            let c = word.count_ones() as usize;
            if rest < c {
                return w * WORD_BITS + select_in_word(word, rest as u32) as usize;
            }
            rest -= c;
        }
        unreachable!("select sample pointed past the target occurrence")
    }

    /// Bits used by the raw words (rounded up to whole words).
    pub fn payload_bits(&self) -> usize {
        self.len
    }

    /// Bits of the rank/select index, or 0 if none is built.
    pub fn index_bits(&self) -> usize {
        self.index.as_ref().map_or(0, RankSelectIndex::size_bits)
    }

    /// Everything held in memory: padded words, index, and the len/ones/generation fields.
    pub fn size_bits(&self) -> usize {
        self.words.len() * WORD_BITS + self.index_bits() + 3 * 64
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.len).map(move |i| self.words[i / WORD_BITS] >> (i % WORD_BITS) & 1 == 1)
    }

    /// Writes the `EFBV` form.
    pub fn write_to<W: Write>(&self, w: &mut W) -> Result<()> {
        codec::write_header(w, b"EFBV")?;
        codec::write_u64(w, self.len as u64)?;
        codec::write_u64(w, self.ones as u64)?;
        codec::write_words(w, &self.words)
    }

    /// Reads the `EFBV` form and rebuilds the index.
    pub fn read_from<R: Read>(r: &mut R) -> Result<Self> {
        codec::read_header(r, b"EFBV")?;
        let len = codec::to_usize(codec::read_u64(r)?, "bit length")?;
        let ones = codec::read_u64(r)?;
        let words = codec::read_words(r, words_for(len) as u64)?;
        let mut bv = Self::from_words(words, len)?;
        if bv.ones as u64 != ones {
            return Err(Error::Format(format!(
                "header says {ones} ones, payload has {}",
                bv.ones
            )));
        }
        bv.build_index();
        Ok(bv)
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::new();
        self.write_to(&mut out).expect("writing to a Vec cannot fail");
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let mut cur = bytes;
        let bv = Self::read_from(&mut cur)?;
        if !cur.is_empty() {
            return Err(Error::Format("trailing bytes".into()));
        }
        Ok(bv)
    }
}

impl std::fmt::Display for BitVector {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for b in self.iter() {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    const TWELVE_H: [usize; 12] = [0, 1, 2, 4, 5, 6, 8, 10, 12, 13, 16, 18];

    fn twelve() -> BitVector {
        let mut bv = BitVector::from_positions(20, &TWELVE_H).unwrap();
        bv.build_index();
        bv
    }

    #[test]
    fn set_bit_single_and_idempotent() {
        let mut bv = BitVector::zeros(8);
        bv.set_bit(3).unwrap();
        assert_eq!(bv.to_string(), "00010000");
        assert_eq!(bv.ones(), 1);
        bv.set_bit(3).unwrap();
        assert_eq!(bv.ones(), 1);
        assert!(matches!(bv.set_bit(8), Err(Error::OutOfRange { .. })));
    }

    #[test]
    fn twelve_rank_select() {
        let bv = twelve();
        assert_eq!(bv.ones(), 12);
        assert_eq!(bv.to_string(), "11101110101011001010");
        assert_eq!(bv.rank1(0).unwrap(), 0);
        assert_eq!(bv.rank1(13).unwrap(), 9);
        assert_eq!(bv.rank1(20).unwrap(), 12);
        assert_eq!(bv.select1(0).unwrap(), 0);
        assert_eq!(bv.select1(8).unwrap(), 12);
        assert_eq!(bv.select1(11).unwrap(), 18);
        assert_eq!(bv.select0(0).unwrap(), 3);
        assert_eq!(bv.select0(2).unwrap(), 9);
        assert!(bv.select1(12).is_err());
        assert!(bv.rank1(21).is_err());
    }

    #[test]
    fn select0_on_all_ones_fails() {
        let mut bv = BitVector::from_bools(&[true; 100]);
        bv.build_index();
        assert!(matches!(bv.select0(0), Err(Error::OutOfRange { .. })));
    }

    #[test]
    fn stale_index_is_an_error() {
        let mut bv = twelve();
        bv.set_bit(19).unwrap();
        assert!(matches!(bv.rank1(3), Err(Error::StaleIndex)));
        assert!(matches!(bv.select1(0), Err(Error::StaleIndex)));
        bv.build_index();
        assert_eq!(bv.rank1(20).unwrap(), 13);
        let fresh = BitVector::zeros(10);
        assert!(matches!(fresh.select0(0), Err(Error::StaleIndex)));
    }

    #[test]
    fn empty_vector() {
        let mut bv = BitVector::zeros(0);
        bv.build_index();
        assert_eq!(bv.rank1(0).unwrap(), 0);
        assert!(bv.select1(0).is_err());
        assert!(bv.select0(0).is_err());
    }

    fn check_against_scan(bits: &[bool]) {
        let mut bv = BitVector::from_bools(bits);
        bv.build_index();
        let mut ones = Vec::new();
        let mut zeros = Vec::new();
        for (i, &b) in bits.iter().enumerate() {
            if b {
                ones.push(i);
            } else {
                zeros.push(i);
            }
        }
        let mut r = 0;
        for pos in 0..=bits.len() {
            assert_eq!(bv.rank1(pos).unwrap(), r, "rank1({pos})");
            assert_eq!(bv.rank0(pos).unwrap(), pos - r);
            if pos < bits.len() && bits[pos] {
                r += 1;
            }
        }
        for (i, &p) in ones.iter().enumerate() {
            assert_eq!(bv.select1(i).unwrap(), p);
        }
        for (i, &p) in zeros.iter().enumerate() {
            assert_eq!(bv.select0(i).unwrap(), p);
        }
        assert!(bv.select1(ones.len()).is_err());
        assert!(bv.select0(zeros.len()).is_err());
    }

    #[test]
    fn scan_oracle_random_densities() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for &density in &[0.01, 0.1, 0.5, 0.9, 0.99] {
            for &len in &[1usize, 63, 64, 65, 511, 512, 513, 4095, 4097, 100_000] {
                let bits: Vec<bool> = (0..len).map(|_| rng.random_bool(density)).collect();
                check_against_scan(&bits);
            }
        }
    }

    #[test]
    fn long_sparse_gaps() {
        // A few ones separated by runs much longer than a sample block.
        let mut bits = vec![false; 300_000];
        for p in [5usize, 70_000, 70_001, 250_000, 299_999] {
            bits[p] = true;
        }
        check_against_scan(&bits);
    }

    #[test]
    fn serialization_round_trip() {
        let bv = twelve();
        let bytes = bv.to_bytes();
        assert_eq!(&bytes[..4], b"EFBV");
        assert_eq!(bytes.len(), 5 + 16 + 8);
        let back = BitVector::from_bytes(&bytes).unwrap();
        assert_eq!(back, bv);
        assert_eq!(back.to_bytes(), bytes);
        assert_eq!(back.select1(8).unwrap(), 12);
    }

    #[test]
    fn serialization_rejects_corruption() {
        let mut bytes = twelve().to_bytes();
        bytes[13] ^= 1;
        assert!(matches!(BitVector::from_bytes(&bytes), Err(Error::Format(_))));
        let mut bytes = twelve().to_bytes();
        bytes[0] = b'X';
        assert!(BitVector::from_bytes(&bytes).is_err());
        let bytes = twelve().to_bytes();
        assert!(BitVector::from_bytes(&bytes[..bytes.len() - 1]).is_err());
    }

    proptest! {
        #[test]
        fn rank_select_inverse(bits in proptest::collection::vec(any::<bool>(), 0..3000)) {
            let mut bv = BitVector::from_bools(&bits);
            bv.build_index();
            for pos in 0..=bits.len() {
                prop_assert_eq!(bv.rank1(pos).unwrap() + bv.rank0(pos).unwrap(), pos);
            }
            for i in 0..bv.ones() {
                let p = bv.select1(i).unwrap();
                prop_assert!(bits[p]);
                prop_assert_eq!(bv.rank1(p).unwrap(), i);
            }
            for i in 0..bv.zeros_count() {
                let p = bv.select0(i).unwrap();
                prop_assert!(!bits[p]);
                prop_assert_eq!(bv.rank0(p).unwrap(), i);
            }
        }
    }
}
