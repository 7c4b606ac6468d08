//! Y-fast trie over `w`-bit keys with satellite payloads.
//!
//! Keys are kept in sorted buckets of Θ(w) keys. Each bucket has a
//! representative, a lower bound of its keys, and the representatives live
//! in an x-fast trie: one hash table per prefix length, each entry holding the
//! smallest and largest representative below that prefix. A lookup binary
//! searches the prefix lengths for the longest match.

use std::cell::Cell;
use std::collections::HashMap;
use std::hash::{BuildHasher, Hasher};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Multiply-shift hashing: high 64 bits of `a·x + b` over 128-bit words.
#[derive(Clone, Copy, Debug)]
pub struct MulShift {
    a: u128,
    b: u128,
}

impl MulShift {
    pub fn from_seed(seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Self {
            a: rng.random::<u128>() | 1,
            b: rng.random(),
        }
    }
}

impl BuildHasher for MulShift {
    type Hasher = MulShiftHasher;

    fn build_hasher(&self) -> MulShiftHasher {
        MulShiftHasher {
            a: self.a,
            b: self.b,
            h: 0,
        }
    }
}

pub struct MulShiftHasher {
    a: u128,
    b: u128,
    h: u64,
}

impl Hasher for MulShiftHasher {
    fn finish(&self) -> u64 {
        self.h
    }

    fn write(&mut self, bytes: &[u8]) {
        for chunk in bytes.chunks(8) {
            let mut buf = [0u8; 8];
            buf[..chunk.len()].copy_from_slice(chunk);
            self.write_u64(u64::from_le_bytes(buf));
        }
    }

    fn write_u64(&mut self, x: u64) {
        let x = (x ^ self.h) as u128;
        self.h = (self.a.wrapping_mul(x).wrapping_add(self.b) >> 64) as u64;
    }
}

type Table<V> = HashMap<u64, V, MulShift>;

const NIL: u32 = u32::MAX;

#[derive(Clone, Debug)]
struct Bucket<V> {
    rep: u64,
    keys: Vec<u64>,
    vals: Vec<V>,
    prev: u32,
    next: u32,
}

/// Default hash seed; fixed so that runs are reproducible.
pub const DEFAULT_SEED: u64 = 0x5eed_0f_7a1e;

#[derive(Clone, Debug)]
pub struct YFastTrie<V> {
    width: u32,
    target: usize,
    /// `levels[d]` maps each d-bit prefix of a representative to (min rep, max rep).
    levels: Vec<Table<(u64, u64)>>,
    /// Representative → bucket id.
    leaves: Table<u32>,
    buckets: Vec<Option<Bucket<V>>>,
    free: Vec<u32>,
    head: u32,
    len: usize,
    probes: Cell<u64>,
}

impl<V: Clone> YFastTrie<V> {
    /// Trie over keys below `2^width` (1 ≤ width ≤ 64).
    pub fn new(width: u32) -> Self {
        Self::with_seed(width, DEFAULT_SEED)
    }

    /// Trie sized for keys in `[0, universe]`.
    pub fn for_universe(universe: u64) -> Self {
        Self::new(crate::bits::bit_width(universe).max(1))
    }

    pub fn with_seed(width: u32, seed: u64) -> Self {
        assert!((1..=64).contains(&width), "key width must be in 1..=64");
        let hasher = MulShift::from_seed(seed);
        Self {
            width,
            target: width as usize,
            levels: (0..=width).map(|_| HashMap::with_hasher(hasher)).collect(),
            leaves: HashMap::with_hasher(hasher),
            buckets: Vec::new(),
            free: Vec::new(),
            head: NIL,
            len: 0,
            probes: Cell::new(0),
        }
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Smallest and largest allowed bucket sizes (the lower one applies only with 2+ buckets).
    pub fn bucket_bounds(&self) -> (usize, usize) {
        ((self.target / 4).max(1), 2 * self.target)
    }

    pub fn bucket_count(&self) -> usize {
        self.leaves.len()
    }

    /// Hash-table probes issued by lookups since the last reset.
    pub fn probes(&self) -> u64 {
        self.probes.get()
    }

    pub fn reset_probes(&self) {
        self.probes.set(0);
    }

    #[inline]
    fn prefix(&self, x: u64, d: u32) -> u64 {
        if d == 0 {
            0
        } else {
            x >> (self.width - d)
        }
    }

    #[inline]
    fn bucket(&self, id: u32) -> &Bucket<V> {
        self.buckets[id as usize].as_ref().expect("live bucket")
    }

    #[inline]
    fn bucket_mut(&mut self, id: u32) -> &mut Bucket<V> {
        self.buckets[id as usize].as_mut().expect("live bucket")
    }

    fn check_key(&self, key: u64) {
        assert!(
            self.width == 64 || key >> self.width == 0,
            "key {key} does not fit in {} bits",
            self.width
        );
    }

    /// Largest representative ≤ x, via binary search over prefix lengths.
    fn rep_at_most(&self, x: u64) -> Option<u64> {
        if self.head == NIL {
            return None;
        }
        if self.width < 64 && x >> self.width != 0 {
            // Above every possible key: the last representative.
            return self.levels[0].get(&0).map(|&(_, max)| max);
        }
        let probes = &self.probes;
        probes.set(probes.get() + 1);
        if self.leaves.contains_key(&x) {
            return Some(x);
        }
        // Invariant: prefix of length lo is present, length hi + 1 is absent.
        let (mut lo, mut hi) = (0u32, self.width - 1);
        while lo < hi {
            let mid = lo + (hi - lo).div_ceil(2);
            probes.set(probes.get() + 1);
            if self.levels[mid as usize].contains_key(&self.prefix(x, mid)) {
                lo = mid;
            } else {
                hi = mid - 1;
            }
        }
        probes.set(probes.get() + 1);
        let &(min, max) = &self.levels[lo as usize][&self.prefix(x, lo)];
        let bit = x >> (self.width - lo - 1) & 1;
        if bit == 1 {
            Some(max)
        } else {
            // Everything under this prefix is above x; step back one representative.
            let b = self.bucket(self.leaves[&min]);
            (b.prev != NIL).then(|| self.bucket(b.prev).rep)
        }
    }

    /// Bucket whose range contains x, or the first bucket when x precedes every representative.
    fn bucket_for(&self, x: u64) -> Option<u32> {
        match self.rep_at_most(x) {
            Some(r) => Some(self.leaves[&r]),
            None => (self.head != NIL).then_some(self.head),
        }
    }

    fn xfast_insert(&mut self, r: u64) {
        for d in 0..=self.width {
            let p = self.prefix(r, d);
            self.levels[d as usize]
                .entry(p)
                .and_modify(|e| {
                    e.0 = e.0.min(r);
                    e.1 = e.1.max(r);
                })
                .or_insert((r, r));
        }
    }

    fn xfast_remove(&mut self, r: u64, pred: Option<u64>, succ: Option<u64>) {
        for d in 0..=self.width {
            let p = self.prefix(r, d);
            let same = |o: Option<u64>| o.filter(|&q| self.prefix(q, d) == p);
            let (pred_d, succ_d) = (same(pred), same(succ));
            let table = &mut self.levels[d as usize];
            let e = table.get_mut(&p).expect("prefix of a stored representative");
            if e.0 == r && e.1 == r {
                table.remove(&p);
            } else {
                if e.0 == r {
                    e.0 = succ_d.expect("subtree keeps a larger representative");
                }
                if e.1 == r {
                    e.1 = pred_d.expect("subtree keeps a smaller representative");
                }
            }
        }
    }

    fn alloc_bucket(&mut self, b: Bucket<V>) -> u32 {
        match self.free.pop() {
            Some(id) => {
                self.buckets[id as usize] = Some(b);
                id
            }
            None => {
                self.buckets.push(Some(b));
                (self.buckets.len() - 1) as u32
            }
        }
    }

    /// Inserts or replaces. Returns the previous payload if the key was present.
    pub fn insert(&mut self, key: u64, val: V) -> Option<V> {
        self.check_key(key);
        let Some(id) = self.bucket_for(key) else {
            let id = self.alloc_bucket(Bucket {
                rep: key,
                keys: vec![key],
                vals: vec![val],
                prev: NIL,
                next: NIL,
            });
            self.head = id;
            self.leaves.insert(key, id);
            self.xfast_insert(key);
            self.len = 1;
            return None;
        };
        let b = self.bucket_mut(id);
        let pos = b.keys.partition_point(|&k| k < key);
        if pos < b.keys.len() && b.keys[pos] == key {
            return Some(std::mem::replace(&mut b.vals[pos], val));
        }
        b.keys.insert(pos, key);
        b.vals.insert(pos, val);
        let (rep, size) = (b.rep, b.keys.len());
        self.len += 1;
        if key < rep {
            // New global minimum: the first bucket's representative moves down.
            let next_rep = self.next_rep(id);
            self.xfast_remove(rep, None, next_rep);
            self.leaves.remove(&rep);
            self.bucket_mut(id).rep = key;
            self.leaves.insert(key, id);
            self.xfast_insert(key);
        }
        if size > 2 * self.target {
            self.split_bucket(id);
        }
        None
    }

    fn next_rep(&self, id: u32) -> Option<u64> {
        let n = self.bucket(id).next;
        (n != NIL).then(|| self.bucket(n).rep)
    }

    fn prev_rep(&self, id: u32) -> Option<u64> {
        let p = self.bucket(id).prev;
        (p != NIL).then(|| self.bucket(p).rep)
    }

    fn split_bucket(&mut self, id: u32) {
        let b = self.bucket_mut(id);
        let mid = b.keys.len() / 2;
        let keys = b.keys.split_off(mid);
        let vals = b.vals.split_off(mid);
        let next = b.next;
        let rep = keys[0];
        let new = self.alloc_bucket(Bucket {
            rep,
            keys,
            vals,
            prev: id,
            next,
        });
        self.bucket_mut(id).next = new;
        if next != NIL {
            self.bucket_mut(next).prev = new;
        }
        self.leaves.insert(rep, new);
        self.xfast_insert(rep);
    }

    /// Unlinks bucket `id` and drops its representative.
    fn remove_bucket(&mut self, id: u32) -> Bucket<V> {
        let (pred, succ) = (self.prev_rep(id), self.next_rep(id));
        let b = self.buckets[id as usize].take().expect("live bucket");
        self.xfast_remove(b.rep, pred, succ);
        self.leaves.remove(&b.rep);
        if b.prev != NIL {
            self.bucket_mut(b.prev).next = b.next;
        } else {
            self.head = b.next;
        }
        if b.next != NIL {
            self.bucket_mut(b.next).prev = b.prev;
        }
        self.free.push(id);
        b
    }

    pub fn remove(&mut self, key: u64) -> Option<V> {
        let id = self.bucket_for(key)?;
        let b = self.bucket_mut(id);
        let pos = b.keys.binary_search(&key).ok()?;
        b.keys.remove(pos);
        let val = b.vals.remove(pos);
        let size = b.keys.len();
        self.len -= 1;
        let (min_size, max_size) = self.bucket_bounds();
        if size == 0 && self.bucket(id).prev == NIL && self.bucket(id).next == NIL {
            self.remove_bucket(id);
        } else if size < min_size && self.bucket_count() > 1 {
            let b = self.bucket(id);
            // Merge into the left neighbor when there is one, else absorb the right one.
            let (left, right) = if b.prev != NIL { (b.prev, id) } else { (id, b.next) };
            let gone = self.remove_bucket(right);
            let l = self.bucket_mut(left);
            l.keys.extend(gone.keys);
            l.vals.extend(gone.vals);
            if l.keys.len() > max_size {
                self.split_bucket(left);
            }
        }
        Some(val)
    }

    pub fn get(&self, key: u64) -> Option<&V> {
        let id = self.bucket_for(key)?;
        let b = self.bucket(id);
        b.keys.binary_search(&key).ok().map(|p| &b.vals[p])
    }

    pub fn contains(&self, key: u64) -> bool {
        self.get(key).is_some()
    }

    /// Largest key strictly below `x`, with its payload.
    pub fn predecessor(&self, x: u64) -> Option<(u64, &V)> {
        if x == 0 {
            return None;
        }
        let r = self.rep_at_most(x - 1)?;
        let id = self.leaves[&r];
        let b = self.bucket(id);
        let pos = b.keys.partition_point(|&k| k < x);
        if pos > 0 {
            return Some((b.keys[pos - 1], &b.vals[pos - 1]));
        }
        // The representative is only a lower bound; the answer is the previous bucket's maximum.
        if b.prev == NIL {
            return None;
        }
        let p = self.bucket(b.prev);
        Some((*p.keys.last().unwrap(), p.vals.last().unwrap()))
    }

    /// Smallest key ≥ `x`, with its payload.
    pub fn successor(&self, x: u64) -> Option<(u64, &V)> {
        let id = self.bucket_for(x)?;
        let b = self.bucket(id);
        let pos = b.keys.partition_point(|&k| k < x);
        if pos < b.keys.len() {
            return Some((b.keys[pos], &b.vals[pos]));
        }
        if b.next == NIL {
            return None;
        }
        let n = self.bucket(b.next);
        Some((n.keys[0], &n.vals[0]))
    }

    pub fn min(&self) -> Option<(u64, &V)> {
        (self.head != NIL).then(|| {
            let b = self.bucket(self.head);
            (b.keys[0], &b.vals[0])
        })
    }

    pub fn iter(&self) -> impl Iterator<Item = (u64, &V)> + '_ {
        let mut id = self.head;
        std::iter::from_fn(move || {
            if id == NIL {
                return None;
            }
            let b = self.bucket(id);
            id = b.next;
            Some(b.keys.iter().copied().zip(b.vals.iter()))
        })
        .flatten()
    }

    pub fn clear(&mut self) {
        *self = Self::with_seed_like(self);
    }

    fn with_seed_like(other: &Self) -> Self {
        let hasher = *other.leaves.hasher();
        Self {
            width: other.width,
            target: other.target,
            levels: (0..=other.width).map(|_| HashMap::with_hasher(hasher)).collect(),
            leaves: HashMap::with_hasher(hasher),
            buckets: Vec::new(),
            free: Vec::new(),
            head: NIL,
            len: 0,
            probes: Cell::new(0),
        }
    }

    /// Bits held: keys, payloads, bucket headers, prefix tables and leaf map entries.
    pub fn size_bits(&self) -> usize {
        let payload = std::mem::size_of::<V>() * 8;
        let entries: usize = self.levels.iter().map(HashMap::len).sum();
        self.len * (64 + payload)
            + self.bucket_count() * (64 * 3 + 2 * 32)
            + entries * 3 * 64
            + self.leaves.len() * (64 + 32)
            + self.free.len() * 32
    }

    /// Verifies every structural invariant; returns a description of the first violation.
    pub fn check(&self) -> Result<(), String> {
        let (min_size, max_size) = self.bucket_bounds();
        let mut count = 0;
        let mut prev_key: Option<u64> = None;
        let mut prev_id = NIL;
        let mut id = self.head;
        let mut reps = Vec::new();
        let buckets = self.bucket_count();
        while id != NIL {
            let b = self.bucket(id);
            if b.prev != prev_id {
                return Err(format!("bucket {id} has a broken back link"));
            }
            if b.keys.is_empty() || b.keys.len() != b.vals.len() {
                return Err(format!("bucket {id} is empty or misaligned"));
            }
            if b.keys.len() > max_size || (buckets > 1 && b.keys.len() < min_size) {
                return Err(format!("bucket {id} has size {}", b.keys.len()));
            }
            if b.keys[0] < b.rep || prev_key.is_some_and(|p| p >= b.rep) {
                return Err(format!("representative {} is not a separating lower bound", b.rep));
            }
            for w in b.keys.windows(2) {
                if w[0] >= w[1] {
                    return Err(format!("bucket {id} is not strictly sorted"));
                }
            }
            if self.leaves.get(&b.rep) != Some(&id) {
                return Err(format!("leaf map misses representative {}", b.rep));
            }
            reps.push(b.rep);
            count += b.keys.len();
            prev_key = b.keys.last().copied();
            prev_id = id;
            id = b.next;
        }
        if count != self.len || reps.len() != buckets {
            return Err(format!("counted {count} keys in {} buckets", reps.len()));
        }
        for d in 0..=self.width {
            let mut want: HashMap<u64, (u64, u64)> = HashMap::new();
            for &r in &reps {
                want.entry(self.prefix(r, d))
                    .and_modify(|e| e.1 = r)
                    .or_insert((r, r));
            }
            let table = &self.levels[d as usize];
            if table.len() != want.len() || want.iter().any(|(k, v)| table.get(k) != Some(v)) {
                return Err(format!("prefix table at depth {d} is inconsistent"));
            }
        }
        Ok(())
    }
}
