//! Append-only set: an uncompressed tail buffer sealed into EF blocks.
//!
//! Every `k` appends the buffer is encoded as its differential sequence
//! `A[i] - A[0]` and the pair `(A[0], low width)` is recorded in a directory.
//! A y-fast trie over block bases routes predecessor queries; the buffer is
//! searched directly when the query lands above its first element.

use std::io::{Read, Write};

use crate::codec;
use crate::ef::{check_universe, EliasFano};
use crate::error::{check_index, Error, Result};
use crate::space::{low_width, SpaceReport};
use crate::yfast::YFastTrie;

const MAGIC: &[u8; 4] = b"EFAO";
const FLAG_RAW_LOW: u8 = 1;
const FLAG_FROZEN: u8 = 2;

/// Default buffer length.
pub const DEFAULT_K: usize = 256;

/// Directory entry of a sealed block.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BlockEntry {
    pub base: u64,
    pub low: u8,
    pub count: u32,
}

#[derive(Clone, Debug)]
pub struct AppendOnlySet {
    k: usize,
    universe: u64,
    raw_low: bool,
    frozen: bool,
    buffer: Vec<u64>,
    blocks: Vec<EliasFano>,
    directory: Vec<BlockEntry>,
    router: YFastTrie<u32>,
    len: usize,
}

impl AppendOnlySet {
    pub fn new(universe: u64) -> Result<Self> {
        Self::with_block_len(universe, DEFAULT_K)
    }

    /// Empty set sealing every `k` appends (`k ≥ 2`).
    pub fn with_block_len(universe: u64, k: usize) -> Result<Self> {
        check_universe(universe)?;
        if !(2..=u32::MAX as usize).contains(&k) {
            return Err(Error::Capacity {
                requested: k,
                limit: u32::MAX as usize,
            });
        }
        Ok(Self {
            k,
            universe,
            raw_low: false,
            frozen: false,
            buffer: Vec::with_capacity(k),
            blocks: Vec::new(),
            directory: Vec::new(),
            router: YFastTrie::for_universe(universe),
            len: 0,
        })
    }

    /// Takes the low width from the raw last value, `⌈log2(A[k-1]/k)⌉`,
    /// instead of the differential universe. Only affects blocks sealed later.
    pub fn use_raw_low_rule(mut self, raw: bool) -> Self {
        self.raw_low = raw;
        self
    }

    pub fn from_sorted(values: &[u64], universe: u64, k: usize) -> Result<Self> {
        let mut s = Self::with_block_len(universe, k)?;
        for &v in values {
            s.append(v)?;
        }
        Ok(s)
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn block_len(&self) -> usize {
        self.k
    }

    pub fn universe(&self) -> u64 {
        self.universe
    }

    pub fn is_frozen(&self) -> bool {
        self.frozen
    }

    pub fn directory(&self) -> &[BlockEntry] {
        &self.directory
    }

    pub fn blocks(&self) -> &[EliasFano] {
        &self.blocks
    }

    pub fn buffer(&self) -> &[u64] {
        &self.buffer
    }

    pub fn max(&self) -> Option<u64> {
        match self.buffer.last() {
            Some(&v) => Some(v),
            None => self.directory.last().map(|d| {
                let b = &self.blocks[self.blocks.len() - 1];
                d.base + b.access(b.len() - 1).unwrap()
            }),
        }
    }

    pub fn append(&mut self, x: u64) -> Result<()> {
        if self.frozen {
            return Err(Error::Frozen);
        }
        if x > self.universe {
            return Err(Error::OutOfUniverse {
                value: x,
                universe: self.universe,
            });
        }
        if let Some(max) = self.max() {
            if x <= max {
                return Err(Error::NonMonotone { value: x, max });
            }
        }
        self.buffer.push(x);
        self.len += 1;
        if self.buffer.len() == self.k {
            self.seal()?;
        }
        Ok(())
    }

    fn seal(&mut self) -> Result<()> {
        let first = self.buffer[0];
        let last = self.buffer[self.buffer.len() - 1];
        let count = self.buffer.len();
        let diff: Vec<u64> = self.buffer.iter().map(|v| v - first).collect();
        let span = last - first;
        let low = if self.raw_low {
            low_width(count as u64, last)
        } else {
            low_width(count as u64, span)
        };
        let ef = EliasFano::encode_with_low_width(&diff, span, low)?;
        self.router.insert(first, self.blocks.len() as u32);
        self.directory.push(BlockEntry {
            base: first,
            low: low as u8,
            count: count as u32,
        });
        self.blocks.push(ef);
        self.buffer.clear();
        Ok(())
    }

    /// Seals a non-empty buffer as a short final block; no appends afterwards.
    pub fn freeze(&mut self) -> Result<()> {
        if !self.frozen && !self.buffer.is_empty() {
            self.seal()?;
        }
        self.frozen = true;
        Ok(())
    }

    fn sealed(&self) -> usize {
        self.len - self.buffer.len()
    }

    pub fn access(&self, i: usize) -> Result<u64> {
        check_index(i, self.len)?;
        let sealed = self.sealed();
        if i >= sealed {
            return Ok(self.buffer[i - sealed]);
        }
        let p = i / self.k;
        self.blocks[p].access(i - p * self.k).map(|v| self.directory[p].base + v)
    }

    /// Largest element strictly below `x`.
    pub fn predecessor(&self, x: u64) -> Option<u64> {
        if let Some(&first) = self.buffer.first() {
            if x > first {
                let r = self.buffer.partition_point(|&v| v < x);
                return Some(self.buffer[r - 1]);
            }
        }
        let (base, &p) = self.router.predecessor(x)?;
        self.blocks[p as usize].predecessor(x - base).map(|v| base + v)
    }

    pub fn contains(&self, x: u64) -> bool {
        x < u64::MAX && self.predecessor(x + 1) == Some(x)
    }

    pub fn iter(&self) -> impl Iterator<Item = u64> + '_ {
        self.directory
            .iter()
            .zip(&self.blocks)
            .flat_map(|(d, b)| b.iter().map(move |v| d.base + v))
            .chain(self.buffer.iter().copied())
    }

    /// High and low bits of the sealed blocks.
    pub fn payload_bits(&self) -> u64 {
        self.blocks.iter().map(|b| b.payload_bits() as u64).sum()
    }

    pub fn space_report(&self) -> SpaceReport {
        let index: u64 = self.blocks.iter().map(|b| (b.size_bits() - b.payload_bits()) as u64).sum();
        let components = vec![
            ("blocks", self.payload_bits()),
            ("block_index", index),
            ("directory", self.directory.len() as u64 * (64 + 8 + 32)),
            ("router", self.router.size_bits() as u64),
            ("buffer", self.k as u64 * 64),
            ("fields", 8 * 64),
        ];
        SpaceReport::new(self.len as u64, self.universe, self.payload_bits(), components)
    }

    /// `EFAO` snapshot: header, directory, block encodings, then the raw buffer.
    pub fn write_to<W: Write>(&self, w: &mut W) -> Result<()> {
        codec::write_header(w, MAGIC)?;
        codec::write_u64(w, self.len as u64)?;
        codec::write_u64(w, self.k as u64)?;
        codec::write_u64(w, self.universe)?;
        let flags = if self.raw_low { FLAG_RAW_LOW } else { 0 } | if self.frozen { FLAG_FROZEN } else { 0 };
        codec::write_u8(w, flags)?;
        codec::write_u64(w, self.directory.len() as u64)?;
        for d in &self.directory {
            codec::write_u64(w, d.base)?;
            codec::write_u8(w, d.low)?;
            codec::write_u32(w, d.count)?;
        }
        for b in &self.blocks {
            b.write_to(w)?;
        }
        codec::write_u64(w, self.buffer.len() as u64)?;
        codec::write_words(w, &self.buffer)
    }

    pub fn read_from<R: Read>(r: &mut R) -> Result<Self> {
        let bad = |msg: String| Error::Format(msg);
        codec::read_header(r, MAGIC)?;
        let n = codec::read_u64(r)?;
        let k = codec::to_usize(codec::read_u64(r)?, "block length")?;
        let universe = codec::read_u64(r)?;
        let flags = codec::read_u8(r)?;
        if flags & !(FLAG_RAW_LOW | FLAG_FROZEN) != 0 {
            return Err(bad(format!("unknown flags {flags:#x}")));
        }
        let mut s = Self::with_block_len(universe, k).map_err(|e| bad(e.to_string()))?;
        s.raw_low = flags & FLAG_RAW_LOW != 0;
        let count = codec::read_u64(r)?;
        if count > n {
            return Err(bad(format!("{count} blocks for {n} values")));
        }
        let mut dir = Vec::with_capacity(count as usize);
        for _ in 0..count {
            let base = codec::read_u64(r)?;
            let low = codec::read_u8(r)?;
            let c = codec::read_u32(r)?;
            dir.push(BlockEntry { base, low, count: c });
        }
        let mut prev_max: Option<u64> = None;
        for (p, d) in dir.iter().enumerate() {
            let ef = EliasFano::read_from(r)?;
            let short_ok = flags & FLAG_FROZEN != 0 && p + 1 == dir.len();
            let size_ok = d.count as usize == k || (short_ok && d.count >= 1 && (d.count as usize) < k);
            if !size_ok || ef.len() != d.count as usize || ef.low_width() != d.low as u32 {
                return Err(bad(format!("block {p} disagrees with its directory entry")));
            }
            if ef.access(0)? != 0 || prev_max.is_some_and(|m| m >= d.base) {
                return Err(bad(format!("block {p} is out of order")));
            }
            if d.base.checked_add(ef.universe()).is_none_or(|t| t > universe) {
                return Err(bad(format!("block {p} leaves the universe")));
            }
            prev_max = Some(d.base + ef.access(ef.len() - 1)?);
            s.router.insert(d.base, p as u32);
            s.blocks.push(ef);
        }
        s.directory = dir;
        let blen = codec::read_u64(r)?;
        if blen >= k as u64 {
            return Err(bad(format!("buffer of {blen} with block length {k}")));
        }
        s.buffer = codec::read_words(r, blen)?;
        for (i, &v) in s.buffer.iter().enumerate() {
            let floor = if i == 0 { prev_max } else { Some(s.buffer[i - 1]) };
            if v > universe || floor.is_some_and(|f| v <= f) {
                return Err(bad(format!("buffer value {v} out of order")));
            }
        }
        s.len = s.directory.iter().map(|d| d.count as usize).sum::<usize>() + s.buffer.len();
        if s.len as u64 != n {
            return Err(bad(format!("holds {} values, header says {n}", s.len)));
        }
        if flags & FLAG_FROZEN != 0 {
            if !s.buffer.is_empty() {
                return Err(bad("frozen set with a buffer".into()));
            }
            s.frozen = true;
        }
        Ok(s)
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::new();
        self.write_to(&mut out).expect("writing to memory");
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let mut r = bytes;
        let s = Self::read_from(&mut r)?;
        if !r.is_empty() {
            return Err(Error::Format(format!("{} trailing bytes", r.len())));
        }
        Ok(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::ef_bits;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    const TWELVE: [u64; 12] = [3, 4, 7, 13, 14, 15, 21, 25, 36, 38, 54, 62];

    fn twelve() -> AppendOnlySet {
        AppendOnlySet::from_sorted(&TWELVE, 63, 4).unwrap()
    }

    #[test]
    fn twelve_blocks() {
        let s = twelve();
        let bases: Vec<u64> = s.directory().iter().map(|d| d.base).collect();
        let lows: Vec<u8> = s.directory().iter().map(|d| d.low).collect();
        assert_eq!(bases, [3, 14, 36]);
        assert_eq!(lows, [2, 2, 3]);
        assert!(s.buffer().is_empty());
        assert_eq!(s.access(8).unwrap(), 36);
        assert_eq!(s.predecessor(30), Some(25));
        assert_eq!(s.predecessor(3), None);
        assert_eq!(s.predecessor(0), None);
        for x in 0..=70 {
            assert_eq!(s.predecessor(x), TWELVE.iter().rev().find(|&&y| y < x).copied(), "x={x}");
        }
        assert!(s.payload_bits() <= ef_bits(12, 63));
    }

    #[test]
    fn raw_low_rule_still_decodes() {
        let s = AppendOnlySet::with_block_len(63, 4).unwrap().use_raw_low_rule(true);
        let mut s = s;
        for v in TWELVE {
            s.append(v).unwrap();
        }
        let lows: Vec<u8> = s.directory().iter().map(|d| d.low).collect();
        assert_eq!(lows, [2, 3, 4]);
        assert!(s.iter().eq(TWELVE));
        let back = AppendOnlySet::from_bytes(&s.to_bytes()).unwrap();
        assert!(back.iter().eq(TWELVE));
    }

    #[test]
    fn buffer_only_and_errors() {
        let mut s = AppendOnlySet::with_block_len(100, 4).unwrap();
        s.append(5).unwrap();
        assert_eq!(s.buffer(), [5]);
        assert!(s.directory().is_empty());
        assert!(matches!(s.append(5), Err(Error::NonMonotone { value: 5, max: 5 })));
        assert!(matches!(s.append(101), Err(Error::OutOfUniverse { .. })));
        s.append(9).unwrap();
        assert_eq!(s.access(1).unwrap(), 9);
        assert_eq!(s.predecessor(9), Some(5));
        assert_eq!(s.predecessor(10), Some(9));
    }

    #[test]
    fn freeze_seals_short_block() {
        let mut s = AppendOnlySet::from_sorted(&TWELVE[..10], 63, 4).unwrap();
        s.freeze().unwrap();
        assert_eq!(s.directory().len(), 3);
        assert_eq!(s.directory()[2].count, 2);
        assert!(s.iter().eq(TWELVE[..10].iter().copied()));
        assert_eq!(s.access(9).unwrap(), 38);
        assert!(matches!(s.append(63), Err(Error::Frozen)));
        let back = AppendOnlySet::from_bytes(&s.to_bytes()).unwrap();
        assert!(back.is_frozen());
        assert_eq!(back.to_bytes(), s.to_bytes());
    }

    #[test]
    fn replay_and_predecessor_random() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let mut vals = Vec::new();
        let mut x = 0u64;
        for _ in 0..100_000 {
            x += rng.random_range(1..1000);
            vals.push(x);
        }
        let s = AppendOnlySet::from_sorted(&vals, x + 10, DEFAULT_K).unwrap();
        assert!(s.iter().eq(vals.iter().copied()));
        for (i, &v) in vals.iter().enumerate() {
            assert_eq!(s.access(i).unwrap(), v);
        }
        for _ in 0..100_000 {
            let q = rng.random_range(0..=x + 10);
            let r = vals.partition_point(|&v| v < q);
            assert_eq!(s.predecessor(q), r.checked_sub(1).map(|i| vals[i]));
        }
        for (d, b) in s.directory().iter().zip(s.blocks()) {
            assert_eq!(b.payload_bits() as u64, ef_bits(d.count as u64, b.universe()));
        }
    }

    #[test]
    fn exhaustive_small() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for k in [2, 3, 8] {
            let m = 1 << 10;
            let mut vals: Vec<u64> = (0..300).map(|_| rng.random_range(0..=m)).collect();
            vals.sort_unstable();
            vals.dedup();
            let s = AppendOnlySet::from_sorted(&vals, m, k).unwrap();
            for q in 0..=m + 1 {
                let r = vals.partition_point(|&v| v < q);
                assert_eq!(s.predecessor(q), r.checked_sub(1).map(|i| vals[i]));
            }
        }
    }

    #[test]
    fn round_trip_and_rejects_corruption() {
        let s = twelve();
        let mut s2 = s.clone();
        s2.freeze().unwrap();
        let mut more = AppendOnlySet::from_sorted(&TWELVE[..7], 63, 4).unwrap();
        more.append(30).unwrap();
        for set in [s, s2, more] {
            let bytes = set.to_bytes();
            let back = AppendOnlySet::from_bytes(&bytes).unwrap();
            assert_eq!(back.to_bytes(), bytes);
            assert!(back.iter().eq(set.iter()));
            assert!(AppendOnlySet::from_bytes(&bytes[..bytes.len() - 1]).is_err());
        }
        let mut bytes = twelve().to_bytes();
        bytes[4 + 1 + 8 + 8 + 8 + 1 + 8] ^= 0xff;
        assert!(AppendOnlySet::from_bytes(&bytes).is_err());
    }
}
