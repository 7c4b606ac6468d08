//! Fully dynamic set: a forest of small-set trees.
//!
//! Elements are partitioned into consecutive runs of Θ((lg n · lg lg n)²)
//! values, each held by a [`SmallSetTree`] over its own local universe. Tree
//! `i` owns the absolute range `[base_i, base_{i+1})` and stores values
//! relative to `base_i`. The first tree always has base 0, so a new global
//! minimum never moves a base. A y-fast trie maps bases to trees for
//! predecessor routing and a counted tree over the forest gives ranks.

use std::io::{Read, Write};

use crate::codec;
use crate::counted::{CountedTree, Path};
use crate::ef::{check_strict, check_universe};
use crate::error::{check_index, Error, Result};
use crate::small_set::{chunk_sizes, SmallSetTree, TreeParams};
use crate::space::SpaceReport;
use crate::yfast::YFastTrie;

const MAGIC: &[u8; 4] = b"EFDS";
const NIL: u32 = u32::MAX;

/// Smallest capacity class n̂ = 2^10.
pub const MIN_DYN_CLASS_LOG: u32 = 10;

#[derive(Clone, Debug)]
struct Slot {
    base: u64,
    tree: SmallSetTree,
    prev: u32,
    next: u32,
}

#[derive(Clone, Debug)]
pub struct DynSet {
    universe: u64,
    params: TreeParams,
    slots: Vec<Option<Slot>>,
    free: Vec<u32>,
    head: u32,
    trees: usize,
    upper: CountedTree<u64>,
    router: YFastTrie<u32>,
    len: usize,
    class_rebuilds: usize,
}

fn upper_fanout(class_log: u32) -> (usize, usize) {
    let lo = (class_log as usize / 2).max(4);
    (lo, 4 * lo)
}

fn class_for(n: usize) -> u32 {
    (n.max(1).next_power_of_two().trailing_zeros()).max(MIN_DYN_CLASS_LOG)
}

impl DynSet {
    /// Empty set over `[0, universe]`.
    pub fn new(universe: u64) -> Result<Self> {
        check_universe(universe)?;
        Ok(Self::empty(universe, MIN_DYN_CLASS_LOG))
    }

    fn empty(universe: u64, class_log: u32) -> Self {
        let (lo, hi) = upper_fanout(class_log);
        Self {
            universe,
            params: TreeParams::for_class_log(class_log),
            slots: Vec::new(),
            free: Vec::new(),
            head: NIL,
            trees: 0,
            upper: CountedTree::new(lo, hi),
            router: YFastTrie::for_universe(universe),
            len: 0,
            class_rebuilds: 0,
        }
    }

    /// Bulk load from a strictly increasing sequence.
    pub fn from_sorted(values: &[u64], universe: u64) -> Result<Self> {
        check_strict(values, universe)?;
        let mut s = Self::empty(universe, class_for(values.len()));
        s.load(values)?;
        Ok(s)
    }

    fn load(&mut self, values: &[u64]) -> Result<()> {
        let cap = self.params.tree_capacity;
        let sizes = chunk_sizes(values.len(), cap, cap / 2);
        let mut bases = Vec::with_capacity(sizes.len());
        let mut start = 0;
        for &size in &sizes {
            bases.push(if start == 0 { 0 } else { values[start] });
            start += size;
        }
        let mut leaves = Vec::with_capacity(sizes.len());
        let mut start = 0;
        for (i, &size) in sizes.iter().enumerate() {
            let base = bases[i];
            let top = bases.get(i + 1).map_or(self.universe, |&b| b - 1);
            let local: Vec<u64> = values[start..start + size].iter().map(|v| v - base).collect();
            let tree = SmallSetTree::from_sorted(&local, top - base, self.params)?;
            let id = self.attach(base, tree);
            leaves.push((id, size as u64));
            start += size;
        }
        let (lo, hi) = upper_fanout(self.params.class_log);
        self.upper = CountedTree::from_leaves(lo, hi, &leaves);
        self.len = values.len();
        Ok(())
    }

    /// Puts a tree in a free slot, linked after the current last tree when loading in order.
    fn attach(&mut self, base: u64, tree: SmallSetTree) -> u32 {
        let slot = Slot {
            base,
            tree,
            prev: NIL,
            next: NIL,
        };
        let id = match self.free.pop() {
            Some(id) => {
                self.slots[id as usize] = Some(slot);
                id
            }
            None => {
                self.slots.push(Some(slot));
                (self.slots.len() - 1) as u32
            }
        };
        self.router.insert(base, id);
        self.trees += 1;
        if self.head == NIL {
            self.head = id;
        } else {
            let mut last = self.head;
            while self.slot(last).next != NIL {
                last = self.slot(last).next;
            }
            self.link_after(last, id);
        }
        id
    }

    fn link_after(&mut self, at: u32, id: u32) {
        let next = self.slot(at).next;
        self.slot_mut(id).prev = at;
        self.slot_mut(id).next = next;
        self.slot_mut(at).next = id;
        if next != NIL {
            self.slot_mut(next).prev = id;
        }
    }

    fn detach(&mut self, id: u32) -> Slot {
        let s = self.slots[id as usize].take().expect("live slot");
        if s.prev != NIL {
            self.slot_mut(s.prev).next = s.next;
        } else {
            self.head = s.next;
        }
        if s.next != NIL {
            self.slot_mut(s.next).prev = s.prev;
        }
        self.router.remove(s.base);
        self.free.push(id);
        self.trees -= 1;
        s
    }

    #[inline]
    fn slot(&self, id: u32) -> &Slot {
        self.slots[id as usize].as_ref().expect("live slot")
    }

    #[inline]
    fn slot_mut(&mut self, id: u32) -> &mut Slot {
        self.slots[id as usize].as_mut().expect("live slot")
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

    /// Current capacity class n̂.
    pub fn class(&self) -> u64 {
        self.params.class()
    }

    pub fn params(&self) -> &TreeParams {
        &self.params
    }

    pub fn tree_count(&self) -> usize {
        self.trees
    }

    pub fn class_rebuilds(&self) -> usize {
        self.class_rebuilds
    }

    /// Bases of the trees in order.
    pub fn bases(&self) -> Vec<u64> {
        self.slot_ids().map(|id| self.slot(id).base).collect()
    }

    /// The trees in order, with their bases.
    pub fn trees(&self) -> impl Iterator<Item = (u64, &SmallSetTree)> + '_ {
        self.slot_ids().map(|id| {
            let s = self.slot(id);
            (s.base, &s.tree)
        })
    }

    fn slot_ids(&self) -> impl Iterator<Item = u32> + '_ {
        let mut cur = self.head;
        std::iter::from_fn(move || {
            (cur != NIL).then(|| {
                let id = cur;
                cur = self.slot(id).next;
                id
            })
        })
    }

    /// Tree owning absolute value `x`.
    #[inline]
    fn owner(&self, x: u64) -> u32 {
        *self.router.predecessor(x + 1).expect("base 0 is always present").1
    }

    /// Upper-tree path to the tree owning `x`, with the tree's start rank.
    fn upper_path(&self, x: u64) -> (Path, u64) {
        self.upper
            .last_by_first(|leaf| self.slot(leaf).base <= x)
            .expect("base 0 is always present")
    }

    /// Upper bound of the local universe of a tree with base `base` followed by `next`.
    fn top(&self, next: u32) -> u64 {
        if next == NIL {
            self.universe
        } else {
            self.slot(next).base - 1
        }
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

    /// Inserts `x`; returns whether the set changed.
    pub fn insert(&mut self, x: u64) -> Result<bool> {
        self.check_value(x)?;
        if self.trees == 0 {
            let tree = SmallSetTree::new(self.universe, self.params)?;
            let id = self.attach(0, tree);
            self.upper.push_back(id, 0);
        }
        let id = self.owner(x);
        let base = self.slot(id).base;
        if !self.slot_mut(id).tree.insert(x - base)? {
            return Ok(false);
        }
        self.len += 1;
        let (path, _) = self.upper_path(x);
        self.upper.add(&path, 1);
        if self.slot(id).tree.len() > 2 * self.params.tree_capacity {
            self.split(id, &path)?;
        }
        if self.len > 4 * self.class() as usize {
            self.rebuild_class()?;
        }
        Ok(true)
    }

    /// Removes `x`; returns whether the set changed.
    pub fn delete(&mut self, x: u64) -> Result<bool> {
        if self.len == 0 || x > self.universe {
            return Ok(false);
        }
        let id = self.owner(x);
        let base = self.slot(id).base;
        if !self.slot_mut(id).tree.delete(x - base)? {
            return Ok(false);
        }
        self.len -= 1;
        let (path, _) = self.upper_path(x);
        self.upper.add(&path, -1);
        if self.slot(id).tree.len() < self.params.tree_capacity / 2 && self.trees > 1 {
            self.merge(id)?;
        }
        let class = self.class() as usize;
        if self.params.class_log > MIN_DYN_CLASS_LOG && self.len < class / 4 {
            self.rebuild_class()?;
        }
        Ok(true)
    }

    /// Splits tree `id` at its median; the right half gets the median as base.
    fn split(&mut self, id: u32, path: &Path) -> Result<()> {
        let (base, next) = (self.slot(id).base, self.slot(id).next);
        let top = self.top(next);
        let vals = self.slot(id).tree.to_vec();
        let half = vals.len() / 2;
        let pivot = base + vals[half];
        let left = SmallSetTree::from_sorted(&vals[..half], pivot - 1 - base, self.params)?;
        let right: Vec<u64> = vals[half..].iter().map(|v| v + base - pivot).collect();
        let right = SmallSetTree::from_sorted(&right, top - pivot, self.params)?;
        self.slot_mut(id).tree = left;
        let new = self.insert_slot(pivot, right);
        self.link_after(id, new);
        self.upper.set_count(path, half as u64);
        self.upper.insert_after(path, new, (vals.len() - half) as u64);
        Ok(())
    }

    fn insert_slot(&mut self, base: u64, tree: SmallSetTree) -> u32 {
        let slot = Slot {
            base,
            tree,
            prev: NIL,
            next: NIL,
        };
        let id = match self.free.pop() {
            Some(id) => {
                self.slots[id as usize] = Some(slot);
                id
            }
            None => {
                self.slots.push(Some(slot));
                (self.slots.len() - 1) as u32
            }
        };
        self.router.insert(base, id);
        self.trees += 1;
        id
    }

    /// Joins an underfull tree with its smaller neighbor, re-splitting if the union is too big.
    fn merge(&mut self, id: u32) -> Result<()> {
        let (prev, next) = (self.slot(id).prev, self.slot(id).next);
        let partner = match (prev, next) {
            (NIL, n) => n,
            (p, NIL) => p,
            (p, n) => {
                if self.slot(p).tree.len() <= self.slot(n).tree.len() {
                    p
                } else {
                    n
                }
            }
        };
        let (left, right) = if partner == prev { (prev, id) } else { (id, partner) };
        let lbase = self.slot(left).base;
        let rbase = self.slot(right).base;
        let top = self.top(self.slot(right).next);
        let mut vals = self.slot(left).tree.to_vec();
        vals.extend(self.slot(right).tree.to_vec().into_iter().map(|v| v + rbase - lbase));
        let (rpath, _) = self.upper_path(rbase);
        self.upper.remove(&rpath);
        self.detach(right);
        self.slot_mut(left).tree = SmallSetTree::from_sorted(&vals, top - lbase, self.params)?;
        let (lpath, _) = self.upper_path(lbase);
        self.upper.set_count(&lpath, vals.len() as u64);
        if vals.len() > 2 * self.params.tree_capacity {
            self.split(left, &lpath)?;
        }
        Ok(())
    }

    /// Re-derives the capacity class from the current size and re-partitions the forest.
    pub fn rebuild_class(&mut self) -> Result<()> {
        let values = self.to_vec();
        let rebuilds = self.class_rebuilds;
        *self = Self::empty(self.universe, class_for(values.len()));
        self.load(&values)?;
        self.class_rebuilds = rebuilds + 1;
        Ok(())
    }

    pub fn access(&self, i: usize) -> Result<u64> {
        check_index(i, self.len)?;
        let (path, off) = self.upper.select(i as u64).expect("rank in range");
        let s = self.slot(self.upper.leaf(&path));
        Ok(s.base + s.tree.access(off as usize)?)
    }

    /// Number of elements strictly below `x`.
    pub fn rank(&self, x: u64) -> usize {
        if self.len == 0 {
            return 0;
        }
        let x = x.min(self.universe + 1);
        let probe = x.min(self.universe);
        let (path, start) = self.upper_path(probe);
        let s = self.slot(self.upper.leaf(&path));
        start as usize + s.tree.rank(x - s.base)
    }

    /// Largest element strictly below `x`.
    pub fn predecessor(&self, x: u64) -> Option<u64> {
        if self.len == 0 || x == 0 {
            return None;
        }
        let (_, &id) = self.router.predecessor(x.min(self.universe + 1))?;
        let s = self.slot(id);
        if let Some(v) = s.tree.predecessor(x - s.base) {
            return Some(s.base + v);
        }
        if s.prev == NIL {
            return None;
        }
        let p = self.slot(s.prev);
        p.tree.max().map(|v| p.base + v)
    }

    /// Smallest element ≥ `x`.
    pub fn successor(&self, x: u64) -> Option<u64> {
        if self.len == 0 || x > self.universe {
            return None;
        }
        let s = self.slot(self.owner(x));
        if let Some(v) = s.tree.successor(x - s.base) {
            return Some(s.base + v);
        }
        if s.next == NIL {
            return None;
        }
        let n = self.slot(s.next);
        n.tree.min().map(|v| n.base + v)
    }

    pub fn contains(&self, x: u64) -> bool {
        x <= self.universe && self.successor(x) == Some(x)
    }

    pub fn min(&self) -> Option<u64> {
        self.successor(0)
    }

    pub fn max(&self) -> Option<u64> {
        let s = self.slot(self.upper.leaf(&self.upper.last()?));
        s.tree.max().map(|v| s.base + v)
    }

    pub fn iter(&self) -> impl Iterator<Item = u64> + '_ {
        self.trees().flat_map(|(base, t)| t.to_vec().into_iter().map(move |v| v + base))
    }

    pub fn to_vec(&self) -> Vec<u64> {
        let mut out = Vec::with_capacity(self.len);
        out.extend(self.iter());
        out
    }

    /// Compressed element payload summed over all trees.
    pub fn payload_bits(&self) -> u64 {
        self.trees().map(|(_, t)| t.payload_bits()).sum()
    }

    pub fn space_report(&self) -> SpaceReport {
        let mut components: Vec<(&'static str, u64)> = Vec::new();
        for (_, t) in self.trees() {
            for (name, bits) in t.space_components() {
                match components.iter_mut().find(|(n, _)| *n == name) {
                    Some(c) => c.1 += bits,
                    None => components.push((name, bits)),
                }
            }
        }
        components.push(("bases", 64 * self.trees as u64));
        components.push(("slots", (64 * self.slots.len() + 32 * self.free.len()) as u64));
        components.push(("upper_tree", self.upper.size_bits() as u64));
        components.push(("router", self.router.size_bits() as u64));
        components.push(("set_fields", 10 * 64));
        SpaceReport::new(self.len as u64, self.universe, self.payload_bits(), components)
    }

    /// Full structural audit of the forest, router, rank tree and every tree.
    pub fn check(&self) -> std::result::Result<(), String> {
        self.upper.check()?;
        self.router.check()?;
        let leaves = self.upper.leaves();
        let ids: Vec<u32> = self.slot_ids().collect();
        if ids.len() != self.trees || leaves.len() != self.trees || self.router.len() != self.trees {
            return Err(format!(
                "{} trees, {} linked, {} ranked, {} routed",
                self.trees,
                ids.len(),
                leaves.len(),
                self.router.len()
            ));
        }
        let cap = self.params.tree_capacity;
        let mut total = 0usize;
        for (k, (&id, &(leaf, count))) in ids.iter().zip(&leaves).enumerate() {
            if id != leaf {
                return Err(format!("tree {k}: linked slot {id} but ranked slot {leaf}"));
            }
            let s = self.slot(id);
            if k == 0 && s.base != 0 {
                return Err(format!("first base is {}", s.base));
            }
            if k > 0 && self.slot(s.prev).base >= s.base {
                return Err(format!("base {} not above its predecessor", s.base));
            }
            if self.router.get(s.base) != Some(&id) {
                return Err(format!("router does not map base {} to slot {id}", s.base));
            }
            if s.tree.len() as u64 != count {
                return Err(format!("tree {k} holds {} but is counted {count}", s.tree.len()));
            }
            if s.tree.universe() != self.top(s.next) - s.base {
                return Err(format!("tree {k} universe {} mismatches its range", s.tree.universe()));
            }
            if self.trees > 1 && (s.tree.len() < cap / 2 || s.tree.len() > 2 * cap) {
                return Err(format!("tree {k} holds {} outside [{}, {}]", s.tree.len(), cap / 2, 2 * cap));
            }
            if *s.tree.params() != self.params {
                return Err(format!("tree {k} uses a stale class"));
            }
            s.tree.check().map_err(|e| format!("tree {k}: {e}"))?;
            total += s.tree.len();
        }
        if total != self.len {
            return Err(format!("trees hold {total}, set says {}", self.len));
        }
        let class = self.class() as usize;
        if self.len > 4 * class || (self.params.class_log > MIN_DYN_CLASS_LOG && self.len < class / 4) {
            return Err(format!("size {} outside class {class}", self.len));
        }
        Ok(())
    }

    /// `EFDS` snapshot: header, then per tree its base and payload.
    pub fn write_to<W: Write>(&self, w: &mut W) -> Result<()> {
        codec::write_header(w, MAGIC)?;
        codec::write_u64(w, self.len as u64)?;
        codec::write_u64(w, self.universe)?;
        codec::write_u64(w, self.class())?;
        codec::write_u64(w, self.trees as u64)?;
        for (base, t) in self.trees() {
            codec::write_u64(w, base)?;
            t.write_to(w)?;
        }
        Ok(())
    }

    pub fn read_from<R: Read>(r: &mut R) -> Result<Self> {
        codec::read_header(r, MAGIC)?;
        let n = codec::read_u64(r)?;
        let universe = codec::read_u64(r)?;
        check_universe(universe).map_err(|e| Error::Format(e.to_string()))?;
        let class = codec::read_u64(r)?;
        if !class.is_power_of_two() || class.trailing_zeros() < MIN_DYN_CLASS_LOG || class.trailing_zeros() > 62 {
            return Err(Error::Format(format!("bad capacity class {class}")));
        }
        let count = codec::read_u64(r)?;
        if count > n.max(1) {
            return Err(Error::Format(format!("{count} trees for {n} values")));
        }
        let mut s = Self::empty(universe, class.trailing_zeros());
        let mut records = Vec::new();
        for _ in 0..count {
            let base = codec::read_u64(r)?;
            let tree = SmallSetTree::read_from(r, s.params)?;
            records.push((base, tree));
        }
        let mut leaves = Vec::new();
        for k in 0..records.len() {
            let base = records[k].0;
            let top = records.get(k + 1).map_or(Some(universe), |next| next.0.checked_sub(1));
            let ok = if k == 0 { base == 0 } else { base > records[k - 1].0 };
            if !ok || top.is_none_or(|t| t < base || records[k].1.universe() != t - base) {
                return Err(Error::Format(format!("tree {k} has an inconsistent range")));
            }
        }
        let mut total = 0u64;
        for (base, tree) in records {
            total += tree.len() as u64;
            let size = tree.len() as u64;
            let id = s.attach(base, tree);
            leaves.push((id, size));
        }
        if total != n {
            return Err(Error::Format(format!("trees hold {total} values, header says {n}")));
        }
        let (lo, hi) = upper_fanout(s.params.class_log);
        s.upper = CountedTree::from_leaves(lo, hi, &leaves);
        s.len = n as usize;
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
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::collections::BTreeSet;

    const TWELVE: [u64; 12] = [3, 4, 7, 13, 14, 15, 21, 25, 36, 38, 54, 62];

    #[test]
    fn twelve_single_block() {
        let s = DynSet::from_sorted(&TWELVE, 63).unwrap();
        s.check().unwrap();
        assert_eq!(s.tree_count(), 1);
        assert_eq!(s.access(8).unwrap(), 36);
        assert_eq!(s.access(0).unwrap(), 3);
        assert_eq!(s.access(11).unwrap(), 62);
        assert_eq!(s.predecessor(30), Some(25));
        assert_eq!(s.predecessor(3), None);
        assert!(s.payload_bits() <= 56);
        let r = s.space_report();
        assert_eq!(r.ef_bits, 56);
        assert_eq!(r.payload_bits, s.payload_bits());
    }

    #[test]
    fn shuffled_inserts_and_duplicates() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let mut vals = TWELVE.to_vec();
        for i in (1..vals.len()).rev() {
            vals.swap(i, rng.random_range(0..=i));
        }
        let mut s = DynSet::new(63).unwrap();
        for &v in &vals {
            assert!(s.insert(v).unwrap());
        }
        assert_eq!(s.to_vec(), TWELVE);
        assert!(!s.insert(14).unwrap());
        assert_eq!(s.len(), 12);
        assert!(s.insert(64).is_err());
        s.check().unwrap();
    }

    #[test]
    fn empty_set() {
        let s = DynSet::new(1000).unwrap();
        assert_eq!(s.predecessor(10), None);
        assert_eq!(s.successor(0), None);
        assert!(s.access(0).is_err());
        assert_eq!(s.space_report().payload_bits, 0);
        s.check().unwrap();
    }

    #[test]
    fn forced_split() {
        let mut s = DynSet::new(1 << 30).unwrap();
        let cap = s.params().tree_capacity;
        for i in 0..=2 * cap as u64 {
            s.insert(i * 7 + 100).unwrap();
        }
        s.check().unwrap();
        assert_eq!(s.tree_count(), 2);
        let bases = s.bases();
        assert!(bases[0] < bases[1]);
        assert_eq!(s.len(), 2 * cap + 1);
        assert_eq!(s.rank(bases[1]), cap);
    }

    #[test]
    fn new_minimum_below_everything() {
        let mut s = DynSet::from_sorted(&[500, 600, 700], 1000).unwrap();
        assert!(s.insert(0).unwrap());
        assert!(s.insert(1).unwrap());
        assert_eq!(s.min(), Some(0));
        assert_eq!(s.bases(), [0]);
        s.check().unwrap();
    }

    fn tape(m: u64, ops: usize, target: usize, seed: u64, audit_every: usize) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut s = DynSet::new(m).unwrap();
        let mut oracle = BTreeSet::new();
        let mut sorted: Vec<u64> = Vec::new();
        let mut dirty = false;
        for step in 0..ops {
            let x = rng.random_range(0..=m);
            let roll = rng.random_range(0..100);
            let deleting = oracle.len() >= target;
            if roll < 40 && !deleting {
                assert_eq!(s.insert(x).unwrap(), oracle.insert(x), "insert {x} at {step}");
                dirty = true;
            } else if roll < 50 || (deleting && roll < 90) {
                let y = if oracle.is_empty() || rng.random_bool(0.1) {
                    x
                } else {
                    s.access(rng.random_range(0..oracle.len())).unwrap()
                };
                assert_eq!(s.delete(y).unwrap(), oracle.remove(&y), "delete {y} at {step}");
                dirty = true;
            } else if roll < 75 {
                if oracle.is_empty() {
                    continue;
                }
                if dirty {
                    sorted = oracle.iter().copied().collect();
                    dirty = false;
                }
                let i = rng.random_range(0..sorted.len());
                assert_eq!(s.access(i).unwrap(), sorted[i], "access {i} at {step}");
            } else {
                assert_eq!(s.predecessor(x), oracle.range(..x).next_back().copied(), "pred {x} at {step}");
                assert_eq!(s.successor(x), oracle.range(x..).next().copied());
            }
            assert_eq!(s.len(), oracle.len());
            if step % audit_every == 0 {
                s.check().unwrap_or_else(|e| panic!("audit at {step}: {e}"));
            }
        }
        s.check().unwrap();
        assert!(s.iter().eq(oracle.iter().copied()));
        for &v in oracle.iter().step_by(97) {
            assert_eq!(s.access(s.rank(v)).unwrap(), v);
        }
    }

    #[test]
    fn differential_small_universe() {
        tape(1 << 12, 40_000, 3000, 1, 500);
    }

    #[test]
    fn differential_large_universe() {
        tape((1 << 40) - 1, 60_000, 20_000, 2, 5000);
    }

    #[test]
    fn exhaustive_predecessor() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let m = 1 << 12;
        let vals: BTreeSet<u64> = (0..2500).map(|_| rng.random_range(0..=m)).collect();
        let v: Vec<u64> = vals.iter().copied().collect();
        let s = DynSet::from_sorted(&v, m).unwrap();
        for x in 0..=m + 1 {
            assert_eq!(s.predecessor(x), vals.range(..x).next_back().copied());
        }
        for i in 0..v.len() {
            assert_eq!(s.rank(v[i]), i);
        }
    }

    #[test]
    fn grow_and_shrink_across_classes() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let m = 1 << 36;
        let mut s = DynSet::new(m).unwrap();
        let mut oracle = BTreeSet::new();
        while oracle.len() < 40_000 {
            let x = rng.random_range(0..=m);
            s.insert(x).unwrap();
            oracle.insert(x);
        }
        assert!(s.class_rebuilds() >= 1);
        assert!(s.class() >= 1 << 14);
        s.check().unwrap();
        let all: Vec<u64> = oracle.iter().copied().collect();
        for &x in &all[1..] {
            s.delete(x).unwrap();
        }
        assert_eq!(s.len(), 1);
        assert_eq!(s.to_vec(), [all[0]]);
        assert_eq!(s.class(), 1 << MIN_DYN_CLASS_LOG);
        s.check().unwrap();
    }

    #[test]
    fn round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let m = 1 << 40;
        let mut s = DynSet::new(m).unwrap();
        for _ in 0..30_000 {
            s.insert(rng.random_range(0..=m)).unwrap();
        }
        let bytes = s.to_bytes();
        let back = DynSet::from_bytes(&bytes).unwrap();
        back.check().unwrap();
        assert_eq!(back.to_vec(), s.to_vec());
        assert_eq!(back.bases(), s.bases());
        assert_eq!(back.to_bytes(), bytes);
        assert!(DynSet::from_bytes(&bytes[..bytes.len() - 1]).is_err());
    }
}
