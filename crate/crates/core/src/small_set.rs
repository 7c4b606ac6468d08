//! Dynamic set of polylogarithmic size stored as Elias-Fano mini-blocks.
//!
//! The elements are cut into mini-blocks of Θ((log log n̂)²) consecutive
//! values. All blocks share one low width μ. Low parts sit in a list of tiered
//! arrays in global rank order; each block keeps only its high parts, written
//! in negated unary relative to the block's first high part, followed by that
//! first high part in a fixed-width field. A counted tree of fanout τ over the
//! blocks holds the element counts, so a block's low parts start at the rank
//! the tree reports for it.
//!
//! Every block rewrite is a full re-encode of that block. μ is recomputed and
//! every block re-encoded every `p` updates (fewer while the tree is small).

use std::io::{Read, Write};

use smallvec::SmallVec;

use crate::bits::{bit_width, read_bits, select1_scan, write_bits};
use crate::codec;
use crate::counted::{CountedTree, Path};
use crate::ef::{check_strict, check_universe};
use crate::error::{check_index, Error, Result};
use crate::space::{ef_bits, low_width, SpaceReport};
use crate::storage::{BlockId, BlockStore, TieredArray};

/// Smallest capacity class, 2^4.
pub const MIN_CLASS_LOG: u32 = 4;

type Values = SmallVec<[u64; 64]>;

/// Size parameters derived from a capacity class n̂ = 2^class_log.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TreeParams {
    pub class_log: u32,
    /// cap_mini = max(8, ⌈(lg lg n̂)²⌉); blocks hold between cap_mini/2 and 2·cap_mini values.
    pub mini_capacity: usize,
    /// ⌈(lg n̂ · lg lg n̂)²⌉
    pub tree_capacity: usize,
    /// τ = max(4, ⌈(lg n̂)^(2/3)⌉); nodes have between τ and 4τ children.
    pub fanout: usize,
    /// p = ⌈(lg n̂)² · lg lg n̂⌉
    pub rebuild_period: usize,
    /// Target length of each tiered low array, (lg n̂)².
    pub low_array_len: usize,
}

fn ceil_f(x: f64) -> usize {
    (x - 1e-9).ceil().max(0.0) as usize
}

impl TreeParams {
    pub fn for_class_log(class_log: u32) -> Self {
        let class_log = class_log.clamp(MIN_CLASS_LOG, 62);
        let lg = class_log as f64;
        let llg = lg.log2();
        Self {
            class_log,
            mini_capacity: ceil_f(llg * llg).max(8),
            tree_capacity: ceil_f((lg * llg).powi(2)),
            fanout: ceil_f(lg.powf(2.0 / 3.0)).max(4),
            rebuild_period: ceil_f(lg * lg * llg),
            low_array_len: (class_log as usize).pow(2).max(64),
        }
    }

    /// Parameters for the smallest power-of-two class ≥ `n_hat`.
    pub fn for_class(n_hat: u64) -> Self {
        Self::for_class_log(n_hat.max(1).next_power_of_two().trailing_zeros())
    }

    /// Same parameters with a different mini-block capacity (at least 2).
    pub fn with_mini_capacity(mut self, cap: usize) -> Self {
        self.mini_capacity = cap.max(2);
        self
    }

    pub fn class(&self) -> u64 {
        1 << self.class_log
    }

    fn min_block(&self) -> usize {
        (self.mini_capacity / 2).max(1)
    }

    fn max_block(&self) -> usize {
        2 * self.mini_capacity
    }
}

/// Block sizes for a bulk load: `target` each, a short tail folded into the last block.
pub(crate) fn chunk_sizes(n: usize, target: usize, min: usize) -> Vec<usize> {
    if n == 0 {
        return Vec::new();
    }
    let mut sizes = vec![target; n / target];
    let rest = n % target;
    if rest >= min || sizes.is_empty() {
        sizes.push(rest);
    } else if rest > 0 {
        *sizes.last_mut().unwrap() += rest;
    }
    sizes
}

/// Low parts of all elements in rank order, split over tiered arrays.
#[derive(Clone, Debug)]
struct LowStore {
    width: u32,
    target: usize,
    arrays: Vec<TieredArray>,
    starts: Vec<usize>,
    len: usize,
}

impl LowStore {
    fn new(width: u32, target: usize) -> Self {
        Self {
            width,
            target,
            arrays: Vec::new(),
            starts: Vec::new(),
            len: 0,
        }
    }

    fn from_values(width: u32, target: usize, values: &[u64]) -> Self {
        let mut s = Self::new(width, target);
        let mut start = 0;
        for size in chunk_sizes(values.len(), target, target / 2) {
            let arr = TieredArray::from_slice(width, &values[start..start + size])
                .expect("low parts fit the width");
            s.arrays.push(arr);
            s.starts.push(start);
            start += size;
        }
        s.len = values.len();
        s
    }

    /// (array, offset) holding `rank`; `rank == len` maps past the last array's end.
    #[inline]
    fn locate(&self, rank: usize) -> (usize, usize) {
        let a = self.starts.partition_point(|&s| s <= rank) - 1;
        (a, rank - self.starts[a])
    }

    #[inline]
    fn get(&self, rank: usize) -> u64 {
        let (a, off) = self.locate(rank);
        self.arrays[a].get(off)
    }

    fn insert(&mut self, rank: usize, v: u64) -> Result<()> {
        if self.arrays.is_empty() {
            self.arrays.push(TieredArray::new(self.width));
            self.starts.push(0);
        }
        let (a, off) = self.locate(rank);
        self.arrays[a].insert(off, v)?;
        for s in &mut self.starts[a + 1..] {
            *s += 1;
        }
        self.len += 1;
        if self.arrays[a].len() > 2 * self.target {
            let all = self.arrays[a].to_vec();
            let half = all.len() / 2;
            self.arrays[a] = TieredArray::from_slice(self.width, &all[..half])?;
            self.arrays
                .insert(a + 1, TieredArray::from_slice(self.width, &all[half..])?);
            self.starts.insert(a + 1, self.starts[a] + half);
        }
        Ok(())
    }

    fn remove(&mut self, rank: usize) -> u64 {
        let (a, off) = self.locate(rank);
        let v = self.arrays[a].delete(off).expect("rank in range");
        for s in &mut self.starts[a + 1..] {
            *s -= 1;
        }
        self.len -= 1;
        let size = self.arrays[a].len();
        if size == 0 {
            self.arrays.remove(a);
            self.starts.remove(a);
        } else if size < self.target / 2 && self.arrays.len() > 1 {
            let (l, r) = if a + 1 < self.arrays.len() { (a, a + 1) } else { (a - 1, a) };
            let mut all = self.arrays[l].to_vec();
            all.extend(self.arrays[r].iter());
            self.arrays.remove(r);
            self.starts.remove(r);
            if all.len() > 2 * self.target {
                let half = all.len() / 2;
                self.arrays[l] = TieredArray::from_slice(self.width, &all[..half]).unwrap();
                self.arrays
                    .insert(r, TieredArray::from_slice(self.width, &all[half..]).unwrap());
                self.starts.insert(r, self.starts[l] + half);
            } else {
                self.arrays[l] = TieredArray::from_slice(self.width, &all).unwrap();
            }
        }
        v
    }

    fn overhead_bits(&self) -> usize {
        self.arrays.iter().map(TieredArray::overhead_bits).sum::<usize>()
            + self.starts.len() * 64
            + 4 * 64
    }

    fn check(&self) -> std::result::Result<(), String> {
        let mut start = 0;
        for (a, arr) in self.arrays.iter().enumerate() {
            if self.starts[a] != start {
                return Err(format!("low array {a} starts at {}, expected {start}", self.starts[a]));
            }
            if arr.is_empty() || arr.len() > 2 * self.target || arr.width() != self.width {
                return Err(format!("low array {a} has length {} width {}", arr.len(), arr.width()));
            }
            start += arr.len();
        }
        if start != self.len {
            return Err(format!("low store holds {start} values, expected {}", self.len));
        }
        Ok(())
    }
}

#[derive(Clone, Debug)]
pub struct SmallSetTree {
    params: TreeParams,
    universe: u64,
    mu: u32,
    head_width: u32,
    len: usize,
    blocks: BlockStore,
    lows: LowStore,
    index: CountedTree<u32>,
    updates: usize,
    period: usize,
    rebuilds: usize,
}

impl SmallSetTree {
    /// Empty tree over values in `[0, universe]`.
    pub fn new(universe: u64, params: TreeParams) -> Result<Self> {
        check_universe(universe)?;
        let mu = low_width(1, universe);
        Ok(Self {
            params,
            universe,
            mu,
            head_width: bit_width(universe >> mu),
            len: 0,
            blocks: BlockStore::new(u32::MAX as usize),
            lows: LowStore::new(mu, params.low_array_len),
            index: CountedTree::new(params.fanout, 4 * params.fanout),
            updates: 0,
            period: 1,
            rebuilds: 0,
        })
    }

    /// Bulk load from a strictly increasing sequence.
    pub fn from_sorted(values: &[u64], universe: u64, params: TreeParams) -> Result<Self> {
        check_strict(values, universe)?;
        let mut t = Self::new(universe, params)?;
        if values.is_empty() {
            return Ok(t);
        }
        let sizes = chunk_sizes(values.len(), params.mini_capacity, params.min_block());
        t.len = values.len();
        t.load(values, &sizes, None)?;
        Ok(t)
    }

    /// Lays out `values` in blocks of the given sizes, with a fresh μ unless one is given.
    fn load(&mut self, values: &[u64], sizes: &[usize], mu: Option<u32>) -> Result<()> {
        let n = values.len();
        self.mu = mu.unwrap_or_else(|| low_width(n.max(1) as u64, self.universe));
        self.head_width = bit_width(self.universe >> self.mu);
        let mask = (1u64 << self.mu) - 1;
        let lows: Vec<u64> = values.iter().map(|v| v & mask).collect();
        self.lows = LowStore::from_values(self.mu, self.params.low_array_len, &lows);
        self.blocks = BlockStore::new(u32::MAX as usize);
        let mut leaves = Vec::with_capacity(sizes.len());
        let mut start = 0;
        for &size in sizes {
            let id = self.new_block(&values[start..start + size])?;
            leaves.push((id, size as u64));
            start += size;
        }
        self.index = CountedTree::from_leaves(self.params.fanout, 4 * self.params.fanout, &leaves);
        self.updates = 0;
        self.period = self.params.rebuild_period.min((n / 2).max(1));
        Ok(())
    }

    pub fn params(&self) -> &TreeParams {
        &self.params
    }

    pub fn universe(&self) -> u64 {
        self.universe
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Current shared low width ⌈μ⌉.
    pub fn mu(&self) -> u32 {
        self.mu
    }

    /// ⌈log2(m′/n′)⌉ for the current size, what a rebuild would set.
    pub fn fresh_mu(&self) -> u32 {
        low_width(self.len.max(1) as u64, self.universe)
    }

    pub fn updates_since_rebuild(&self) -> usize {
        self.updates
    }

    /// Updates between μ-rebuilds at the current size.
    pub fn effective_period(&self) -> usize {
        self.period
    }

    pub fn rebuild_count(&self) -> usize {
        self.rebuilds
    }

    pub fn block_count(&self) -> usize {
        self.index.num_leaves()
    }

    /// Node levels of the τ-tree.
    pub fn tree_height(&self) -> usize {
        self.index.height()
    }

    /// (H length, first high part) of a block.
    #[inline]
    fn meta(&self, id: BlockId) -> (usize, u64) {
        let bits = self.blocks.bits(id);
        let hlen = bits - self.head_width as usize;
        (hlen, read_bits(self.blocks.words(id), hlen, self.head_width))
    }

    #[inline]
    fn high_at(&self, id: BlockId, head: u64, i: usize) -> u64 {
        head + (select1_scan(self.blocks.words(id), i) - i) as u64
    }

    #[inline]
    fn value_at(&self, id: BlockId, head: u64, start: usize, i: usize) -> u64 {
        (self.high_at(id, head, i) << self.mu) | self.lows.get(start + i)
    }

    /// Largest value of a block, from its H length and count without a select.
    #[inline]
    fn last_value(&self, id: BlockId, count: u64, end: u64) -> u64 {
        let (hlen, head) = self.meta(id);
        let h_last = head + (hlen - count as usize) as u64;
        (h_last << self.mu) | self.lows.get(end as usize - 1)
    }

    fn decode_block(&self, id: BlockId, start: usize, count: usize) -> Values {
        let (_, head) = self.meta(id);
        let words = self.blocks.words(id);
        let mut out = Values::with_capacity(count);
        let mut i = 0;
        'outer: for (w, &word) in words.iter().enumerate() {
            let mut bits = word;
            while bits != 0 {
                if i == count {
                    break 'outer;
                }
                let pos = w * 64 + bits.trailing_zeros() as usize;
                bits &= bits - 1;
                let high = head + (pos - i) as u64;
                out.push((high << self.mu) | self.lows.get(start + i));
                i += 1;
            }
        }
        out
    }

    fn block_bits(&self, vals: &[u64]) -> (usize, u64) {
        let head = vals[0] >> self.mu;
        let last = vals[vals.len() - 1] >> self.mu;
        ((last - head) as usize + vals.len(), head)
    }

    fn encode_into(&mut self, id: BlockId, vals: &[u64], hlen: usize, head: u64) {
        let mu = self.mu;
        let hw = self.head_width;
        let words = self.blocks.words_mut(id);
        words.fill(0);
        for (i, &v) in vals.iter().enumerate() {
            let pos = ((v >> mu) - head) as usize + i;
            words[pos / 64] |= 1 << (pos % 64);
        }
        write_bits(words, hlen, hw, head);
    }

    fn new_block(&mut self, vals: &[u64]) -> Result<BlockId> {
        let (hlen, head) = self.block_bits(vals);
        let id = self.blocks.alloc(hlen + self.head_width as usize)?;
        self.encode_into(id, vals, hlen, head);
        Ok(id)
    }

    fn rewrite_block(&mut self, id: BlockId, vals: &[u64]) -> Result<()> {
        let (hlen, head) = self.block_bits(vals);
        self.blocks.realloc(id, hlen + self.head_width as usize)?;
        self.encode_into(id, vals, hlen, head);
        Ok(())
    }

    /// First block whose last value is ≥ x, with its start rank.
    fn route(&self, x: u64) -> Option<(Path, u64)> {
        self.index
            .first_by_last(|leaf, count, end| self.last_value(leaf, count, end) >= x)
    }

    /// Elements of block at `path` smaller than `x`.
    fn count_less(&self, id: BlockId, start: usize, count: usize, x: u64) -> usize {
        let (_, head) = self.meta(id);
        let (mut lo, mut hi) = (0, count);
        while lo < hi {
            let mid = lo + (hi - lo) / 2;
            if self.value_at(id, head, start, mid) < x {
                lo = mid + 1;
            } else {
                hi = mid;
            }
        }
        lo
    }

    fn check_value(&self, x: u64) -> Result<()> {
        if x > self.universe {
            Err(Error::OutOfUniverse {
                value: x,
                universe: self.universe,
            })
        } else {
            Ok(())
        }
    }

    /// Inserts `x`; returns false if it was already present.
    pub fn insert(&mut self, x: u64) -> Result<bool> {
        self.check_value(x)?;
        let low = x & ((1u64 << self.mu) - 1);
        if self.len == 0 {
            let id = self.new_block(&[x])?;
            self.index.push_back(id, 1);
            self.lows.insert(0, low)?;
            self.len = 1;
            self.note_update()?;
            return Ok(true);
        }
        let (path, start) = match self.route(x) {
            Some(found) => found,
            None => {
                let p = self.index.last().expect("non-empty");
                let s = self.index.start_rank(&p);
                (p, s)
            }
        };
        let id = self.index.leaf(&path);
        let count = self.index.count(&path) as usize;
        let start = start as usize;
        let mut vals = self.decode_block(id, start, count);
        let r = vals.partition_point(|&v| v < x);
        if r < count && vals[r] == x {
            return Ok(false);
        }
        vals.insert(r, x);
        self.lows.insert(start + r, low)?;
        self.len += 1;
        if vals.len() > self.params.max_block() {
            let half = vals.len() / 2;
            self.rewrite_block(id, &vals[..half])?;
            let right = self.new_block(&vals[half..])?;
            self.index.set_count(&path, half as u64);
            self.index.insert_after(&path, right, (vals.len() - half) as u64);
        } else {
            self.rewrite_block(id, &vals)?;
            self.index.add(&path, 1);
        }
        self.note_update()?;
        Ok(true)
    }

    /// Removes `x`; returns false if it was absent.
    pub fn delete(&mut self, x: u64) -> Result<bool> {
        if self.len == 0 || x > self.universe {
            return Ok(false);
        }
        let Some((path, start)) = self.route(x) else {
            return Ok(false);
        };
        let id = self.index.leaf(&path);
        let count = self.index.count(&path) as usize;
        let start = start as usize;
        let mut vals = self.decode_block(id, start, count);
        let r = vals.partition_point(|&v| v < x);
        if r == count || vals[r] != x {
            return Ok(false);
        }
        vals.remove(r);
        self.lows.remove(start + r);
        self.len -= 1;
        if vals.is_empty() {
            self.blocks.free(id);
            self.index.remove(&path);
        } else if vals.len() < self.params.min_block() && self.index.num_leaves() > 1 {
            self.merge_with_neighbor(path, id, start, vals)?;
        } else {
            self.rewrite_block(id, &vals)?;
            self.index.add(&path, -1);
        }
        self.note_update()?;
        Ok(true)
    }

    /// Joins an underfull block with its right (or left) neighbor, re-splitting if too large.
    fn merge_with_neighbor(&mut self, path: Path, id: BlockId, start: usize, vals: Values) -> Result<()> {
        let own = vals.len();
        let (lpath, rpath, combined) = if let Some(next) = self.index.next(&path) {
            let nid = self.index.leaf(&next);
            let ncount = self.index.count(&next) as usize;
            let mut all = vals;
            all.extend(self.decode_block(nid, start + own, ncount));
            (path, next, all)
        } else {
            let prev = self.index.prev(&path).expect("at least two blocks");
            let pid = self.index.leaf(&prev);
            let pcount = self.index.count(&prev) as usize;
            let mut all = self.decode_block(pid, start - pcount, pcount);
            all.extend(vals);
            (prev, path, all)
        };
        let (lid, rid) = (self.index.leaf(&lpath), self.index.leaf(&rpath));
        if combined.len() <= self.params.max_block() {
            self.rewrite_block(lid, &combined)?;
            self.index.set_count(&lpath, combined.len() as u64);
            // Both paths share ancestors; the removal below sees the updated sums.
            self.index.remove(&rpath);
            self.blocks.free(rid);
        } else {
            let half = combined.len() / 2;
            self.rewrite_block(lid, &combined[..half])?;
            self.rewrite_block(rid, &combined[half..])?;
            self.index.set_count(&lpath, half as u64);
            self.index.set_count(&rpath, (combined.len() - half) as u64);
        }
        let _ = id;
        Ok(())
    }

    fn note_update(&mut self) -> Result<()> {
        self.updates += 1;
        if self.updates >= self.period {
            self.rebuild_low_width()?;
        }
        Ok(())
    }

    /// Re-encodes every block with μ = ⌈log2(m′/n′)⌉, keeping the block partition.
    pub fn rebuild_low_width(&mut self) -> Result<()> {
        let values = self.to_vec();
        let sizes: Vec<usize> = self.index.leaves().iter().map(|&(_, c)| c as usize).collect();
        self.load(&values, &sizes, None)?;
        self.rebuilds += 1;
        Ok(())
    }

    pub fn access(&self, i: usize) -> Result<u64> {
        check_index(i, self.len)?;
        let (path, off) = self.index.select(i as u64).expect("rank in range");
        let id = self.index.leaf(&path);
        let (_, head) = self.meta(id);
        Ok(self.value_at(id, head, i - off as usize, off as usize))
    }

    /// Number of elements strictly below `x`.
    pub fn rank(&self, x: u64) -> usize {
        match self.route(x) {
            None => self.len,
            Some((path, start)) => {
                let id = self.index.leaf(&path);
                let count = self.index.count(&path) as usize;
                start as usize + self.count_less(id, start as usize, count, x)
            }
        }
    }

    /// Largest element strictly below `x`.
    pub fn predecessor(&self, x: u64) -> Option<u64> {
        if self.len == 0 || x == 0 {
            return None;
        }
        let Some((path, start)) = self.route(x) else {
            return self.max();
        };
        let id = self.index.leaf(&path);
        let count = self.index.count(&path) as usize;
        let start = start as usize;
        let r = self.count_less(id, start, count, x);
        if r > 0 {
            let (_, head) = self.meta(id);
            return Some(self.value_at(id, head, start, r - 1));
        }
        let prev = self.index.prev(&path)?;
        let pid = self.index.leaf(&prev);
        Some(self.last_value(pid, self.index.count(&prev), start as u64))
    }

    /// Smallest element ≥ `x`.
    pub fn successor(&self, x: u64) -> Option<u64> {
        let (path, start) = self.route(x)?;
        let id = self.index.leaf(&path);
        let count = self.index.count(&path) as usize;
        let r = self.count_less(id, start as usize, count, x);
        let (_, head) = self.meta(id);
        Some(self.value_at(id, head, start as usize, r))
    }

    pub fn contains(&self, x: u64) -> bool {
        self.successor(x) == Some(x)
    }

    pub fn min(&self) -> Option<u64> {
        (self.len > 0).then(|| self.access(0).unwrap())
    }

    pub fn max(&self) -> Option<u64> {
        let p = self.index.last()?;
        Some(self.last_value(self.index.leaf(&p), self.index.count(&p), self.len as u64))
    }

    pub fn to_vec(&self) -> Vec<u64> {
        let mut out = Vec::with_capacity(self.len);
        let mut start = 0;
        for (id, count) in self.index.leaves() {
            out.extend(self.decode_block(id, start, count as usize));
            start += count as usize;
        }
        out
    }

    /// Bits of the negated-unary high parts plus n′·μ low bits.
    pub fn payload_bits(&self) -> u64 {
        let highs: usize = self
            .index
            .leaves()
            .iter()
            .map(|&(id, _)| self.blocks.bits(id) - self.head_width as usize)
            .sum();
        (highs + self.len * self.mu as usize) as u64
    }

    pub fn space_components(&self) -> Vec<(&'static str, u64)> {
        let blocks = self.block_count() as u64;
        let highs = self.payload_bits() - (self.len * self.mu as usize) as u64;
        vec![
            ("high", highs),
            ("low", (self.len * self.mu as usize) as u64),
            ("block_heads", blocks * self.head_width as u64),
            ("block_store", self.blocks.overhead_bits() as u64),
            ("low_store", self.lows.overhead_bits() as u64),
            ("tau_tree", self.index.size_bits() as u64),
            ("fields", 12 * 64),
        ]
    }

    pub fn space_report(&self) -> SpaceReport {
        SpaceReport::new(
            self.len as u64,
            self.universe,
            self.payload_bits(),
            self.space_components(),
        )
    }

    /// Full structural audit.
    pub fn check(&self) -> std::result::Result<(), String> {
        self.index.check()?;
        self.lows.check()?;
        if self.index.total() != self.len as u64 || self.lows.len != self.len {
            return Err(format!(
                "size {} disagrees with counters {} / lows {}",
                self.len,
                self.index.total(),
                self.lows.len
            ));
        }
        if self.index.height() > 3 {
            return Err(format!("τ-tree height {}", self.index.height()));
        }
        let leaves = self.index.leaves();
        let (min_b, max_b) = (self.params.min_block(), self.params.max_block());
        let mut start = 0usize;
        let mut prev: Option<u64> = None;
        for &(id, count) in &leaves {
            let count = count as usize;
            if count > max_b || (leaves.len() > 1 && count < min_b) {
                return Err(format!("block {id} holds {count} values"));
            }
            let (hlen, head) = self.meta(id);
            let ones: usize = (0..hlen)
                .step_by(64)
                .map(|p| read_bits(self.blocks.words(id), p, (hlen - p).min(64) as u32).count_ones() as usize)
                .sum();
            if ones != count {
                return Err(format!("block {id} has {ones} ones for {count} values"));
            }
            let vals = self.decode_block(id, start, count);
            if vals[0] >> self.mu != head || (vals[count - 1] >> self.mu) - head + count as u64 != hlen as u64 {
                return Err(format!("block {id} high part is not trimmed"));
            }
            for &v in &vals {
                if prev.is_some_and(|p| p >= v) || v > self.universe {
                    return Err(format!("value {v} out of order or universe"));
                }
                prev = Some(v);
            }
            start += count;
        }
        if self.updates >= self.period && self.len > 0 {
            return Err("μ-rebuild overdue".into());
        }
        Ok(())
    }

    /// Serialized payload: universe, μ, and the `EFST` of the values.
    pub fn write_to<W: Write>(&self, w: &mut W) -> Result<()> {
        codec::write_u64(w, self.universe)?;
        codec::write_u8(w, self.mu as u8)?;
        let vals = self.to_vec();
        codec::write_u64(w, vals.len() as u64)?;
        if !vals.is_empty() {
            crate::EliasFano::encode(&vals, self.universe)?.write_to(w)?;
        }
        Ok(())
    }

    pub fn read_from<R: Read>(r: &mut R, params: TreeParams) -> Result<Self> {
        let universe = codec::read_u64(r)?;
        let mu = codec::read_u8(r)? as u32;
        let n = codec::read_u64(r)?;
        let mut t = Self::new(universe, params).map_err(|e| Error::Format(e.to_string()))?;
        if n == 0 {
            return Ok(t);
        }
        let fresh = low_width(n, universe);
        if mu + 1 < fresh || mu > fresh + 1 {
            return Err(Error::Format(format!("low width {mu} is more than 1 from {fresh}")));
        }
        let ef = crate::EliasFano::read_from(r)?;
        if ef.len() as u64 != n || ef.universe() != universe {
            return Err(Error::Format("tree payload disagrees with its header".into()));
        }
        let vals = ef.decode();
        let sizes = chunk_sizes(vals.len(), params.mini_capacity, params.min_block());
        t.len = vals.len();
        t.load(&vals, &sizes, Some(mu))?;
        Ok(t)
    }
}

/// Ranks ef_bits of a tree at its current size; the payload bound after a rebuild.
pub fn tree_ef_bits(t: &SmallSetTree) -> u64 {
    ef_bits(t.len() as u64, t.universe())
}
