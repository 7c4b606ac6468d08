//! Plain ordered set used as a reference in differential tests.
//!
//! A list of sorted chunks: every operation is a binary search over chunk
//! maxima plus a linear scan of chunk lengths, so rank and select stay cheap
//! at a million elements, unlike `BTreeSet::iter().nth`.

const CHUNK: usize = 512;

#[derive(Clone, Debug, Default)]
pub struct SortedOracle {
    chunks: Vec<Vec<u64>>,
    len: usize,
}

impl SortedOracle {
    pub fn new() -> Self {
        Self::default()
    }

    /// From a strictly increasing sequence.
    pub fn from_sorted(values: &[u64]) -> Self {
        debug_assert!(values.windows(2).all(|w| w[0] < w[1]));
        Self {
            chunks: values.chunks(CHUNK).map(<[u64]>::to_vec).collect(),
            len: values.len(),
        }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Chunk that holds `x` if present: the first whose maximum is ≥ x.
    fn chunk_of(&self, x: u64) -> usize {
        self.chunks.partition_point(|c| *c.last().unwrap() < x)
    }

    pub fn contains(&self, x: u64) -> bool {
        let c = self.chunk_of(x);
        c < self.chunks.len() && self.chunks[c].binary_search(&x).is_ok()
    }

    pub fn insert(&mut self, x: u64) -> bool {
        if self.chunks.is_empty() {
            self.chunks.push(vec![x]);
            self.len = 1;
            return true;
        }
        let c = self.chunk_of(x).min(self.chunks.len() - 1);
        let chunk = &mut self.chunks[c];
        match chunk.binary_search(&x) {
            Ok(_) => return false,
            Err(i) => chunk.insert(i, x),
        }
        if chunk.len() > 2 * CHUNK {
            let tail = chunk.split_off(CHUNK);
            self.chunks.insert(c + 1, tail);
        }
        self.len += 1;
        true
    }

    pub fn remove(&mut self, x: u64) -> bool {
        let c = self.chunk_of(x);
        if c == self.chunks.len() {
            return false;
        }
        let Ok(i) = self.chunks[c].binary_search(&x) else {
            return false;
        };
        self.chunks[c].remove(i);
        if self.chunks[c].is_empty() {
            self.chunks.remove(c);
        }
        self.len -= 1;
        true
    }

    /// Element of rank `i`.
    pub fn select(&self, i: usize) -> Option<u64> {
        let mut i = i;
        for c in &self.chunks {
            if i < c.len() {
                return Some(c[i]);
            }
            i -= c.len();
        }
        None
    }

    /// Number of elements strictly below `x`.
    pub fn rank(&self, x: u64) -> usize {
        let c = self.chunk_of(x);
        let before: usize = self.chunks[..c].iter().map(Vec::len).sum();
        before + self.chunks.get(c).map_or(0, |ch| ch.partition_point(|&v| v < x))
    }

    /// Largest element strictly below `x`.
    pub fn predecessor(&self, x: u64) -> Option<u64> {
        let c = self.chunk_of(x);
        if let Some(ch) = self.chunks.get(c) {
            let r = ch.partition_point(|&v| v < x);
            if r > 0 {
                return Some(ch[r - 1]);
            }
        }
        c.checked_sub(1).map(|p| *self.chunks[p].last().unwrap())
    }

    /// Smallest element ≥ `x`.
    pub fn successor(&self, x: u64) -> Option<u64> {
        let ch = self.chunks.get(self.chunk_of(x))?;
        Some(ch[ch.partition_point(|&v| v < x)])
    }

    pub fn iter(&self) -> impl Iterator<Item = u64> + '_ {
        self.chunks.iter().flatten().copied()
    }

    pub fn to_vec(&self) -> Vec<u64> {
        self.iter().collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::collections::BTreeSet;

    #[test]
    fn agrees_with_btreeset() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let mut o = SortedOracle::new();
        let mut b = BTreeSet::new();
        for _ in 0..60_000 {
            let x = rng.random_range(0..5000u64);
            match rng.random_range(0..4) {
                0 | 1 => assert_eq!(o.insert(x), b.insert(x)),
                2 => assert_eq!(o.remove(x), b.remove(&x)),
                _ => {
                    assert_eq!(o.predecessor(x), b.range(..x).next_back().copied());
                    assert_eq!(o.successor(x), b.range(x..).next().copied());
                    assert_eq!(o.rank(x), b.range(..x).count());
                    assert_eq!(o.contains(x), b.contains(&x));
                }
            }
            assert_eq!(o.len(), b.len());
        }
        assert!(o.iter().eq(b.iter().copied()));
        for (i, &v) in b.iter().enumerate().step_by(37) {
            assert_eq!(o.select(i), Some(v));
        }
        assert_eq!(o.select(b.len()), None);
    }

    #[test]
    fn from_sorted_matches_inserts() {
        let v: Vec<u64> = (0..3000).map(|i| i * 5).collect();
        let o = SortedOracle::from_sorted(&v);
        assert_eq!(o.len(), 3000);
        assert_eq!(o.select(1234), Some(6170));
        assert_eq!(o.predecessor(6170), Some(6165));
        assert_eq!(o.rank(6170), 1234);
    }
}
