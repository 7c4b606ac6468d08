//! Counted B+ tree over opaque leaf ids.
//!
//! Internal nodes store their children and the running (prefix) sums of the
//! element counts below each child. Leaves are caller-owned ids with a
//! positive count. Searches return a root-to-bottom [`Path`], which update
//! operations consume; there are no parent pointers.

use smallvec::SmallVec;

const NIL: u32 = u32::MAX;

/// Unsigned counter type stored in the prefix sums.
pub trait Count: Copy + Default + Ord + std::fmt::Debug {
    const BITS: u32;
    fn to_u64(self) -> u64;
    fn from_u64(v: u64) -> Self;
}

macro_rules! impl_count {
    ($($t:ty),*) => {$(
        impl Count for $t {
            const BITS: u32 = <$t>::BITS;
            #[inline]
            fn to_u64(self) -> u64 {
                self as u64
            }
            #[inline]
            fn from_u64(v: u64) -> Self {
                <$t>::try_from(v).expect("count overflows the counter type")
            }
        }
    )*};
}

impl_count!(u16, u32, u64);

/// `(node, child index)` pairs from the root down to the bottom level.
pub type Path = SmallVec<[(u32, u32); 8]>;

#[derive(Clone, Debug, Default)]
struct Node<C> {
    children: Vec<u32>,
    prefix: Vec<C>,
}

impl<C: Count> Node<C> {
    #[inline]
    fn total(&self) -> u64 {
        self.prefix.last().map_or(0, |c| c.to_u64())
    }

    #[inline]
    fn before(&self, i: usize) -> u64 {
        if i == 0 {
            0
        } else {
            self.prefix[i - 1].to_u64()
        }
    }

    #[inline]
    fn count(&self, i: usize) -> u64 {
        self.prefix[i].to_u64() - self.before(i)
    }

    fn add_from(&mut self, i: usize, delta: i64) {
        for p in &mut self.prefix[i..] {
            *p = C::from_u64((p.to_u64() as i64 + delta) as u64);
        }
    }
}

#[derive(Clone, Debug)]
pub struct CountedTree<C> {
    min_fanout: usize,
    max_fanout: usize,
    nodes: Vec<Node<C>>,
    free: Vec<u32>,
    root: u32,
    height: usize,
    leaves: usize,
}

impl<C: Count> CountedTree<C> {
    /// Empty tree whose non-root nodes keep between `min_fanout` and `max_fanout` children.
    pub fn new(min_fanout: usize, max_fanout: usize) -> Self {
        assert!(min_fanout >= 2 && max_fanout >= 2 * min_fanout);
        Self {
            min_fanout,
            max_fanout,
            nodes: Vec::new(),
            free: Vec::new(),
            root: NIL,
            height: 0,
            leaves: 0,
        }
    }

    /// Bottom-up build over `(leaf, count)` pairs in order.
    pub fn from_leaves(min_fanout: usize, max_fanout: usize, leaves: &[(u32, u64)]) -> Self {
        let mut t = Self::new(min_fanout, max_fanout);
        if leaves.is_empty() {
            return t;
        }
        t.leaves = leaves.len();
        let mut level: Vec<(u32, u64)> = leaves.to_vec();
        loop {
            let groups = if level.len() <= max_fanout {
                1
            } else {
                level.len().div_ceil((min_fanout + max_fanout) / 2)
            };
            let mut next = Vec::with_capacity(groups);
            let mut it = level.iter();
            for g in 0..groups {
                let size = level.len() / groups + usize::from(g < level.len() % groups);
                let mut node = Node {
                    children: Vec::with_capacity(size),
                    prefix: Vec::with_capacity(size),
                };
                let mut sum = 0u64;
                for &(child, count) in it.by_ref().take(size) {
                    sum += count;
                    node.children.push(child);
                    node.prefix.push(C::from_u64(sum));
                }
                next.push((t.alloc(node), sum));
            }
            t.height += 1;
            if next.len() == 1 {
                t.root = next[0].0;
                return t;
            }
            level = next;
        }
    }

    fn alloc(&mut self, node: Node<C>) -> u32 {
        match self.free.pop() {
            Some(id) => {
                self.nodes[id as usize] = node;
                id
            }
            None => {
                self.nodes.push(node);
                (self.nodes.len() - 1) as u32
            }
        }
    }

    fn release(&mut self, id: u32) {
        self.nodes[id as usize] = Node::default();
        self.free.push(id);
    }

    #[inline]
    fn node(&self, id: u32) -> &Node<C> {
        &self.nodes[id as usize]
    }

    #[inline]
    fn node_mut(&mut self, id: u32) -> &mut Node<C> {
        &mut self.nodes[id as usize]
    }

    pub fn is_empty(&self) -> bool {
        self.root == NIL
    }

    pub fn num_leaves(&self) -> usize {
        self.leaves
    }

    /// Number of node levels (0 when empty).
    pub fn height(&self) -> usize {
        self.height
    }

    pub fn fanout_bounds(&self) -> (usize, usize) {
        (self.min_fanout, self.max_fanout)
    }

    pub fn total(&self) -> u64 {
        if self.root == NIL {
            0
        } else {
            self.node(self.root).total()
        }
    }

    #[inline]
    pub fn leaf(&self, path: &Path) -> u32 {
        let &(n, i) = path.last().expect("non-empty path");
        self.node(n).children[i as usize]
    }

    #[inline]
    pub fn count(&self, path: &Path) -> u64 {
        let &(n, i) = path.last().expect("non-empty path");
        self.node(n).count(i as usize)
    }

    /// Total count of the leaves before the one at `path`.
    pub fn start_rank(&self, path: &Path) -> u64 {
        path.iter()
            .map(|&(n, i)| self.node(n).before(i as usize))
            .sum()
    }

    /// Leaf holding rank `rank` and the offset of that rank inside it.
    pub fn select(&self, rank: u64) -> Option<(Path, u64)> {
        if rank >= self.total() {
            return None;
        }
        let mut path = Path::new();
        let mut node = self.root;
        let mut r = rank;
        for level in (0..self.height).rev() {
            let n = self.node(node);
            let i = n.prefix.partition_point(|p| p.to_u64() <= r);
            r -= n.before(i);
            path.push((node, i as u32));
            if level > 0 {
                node = n.children[i];
            }
        }
        Some((path, r))
    }

    /// Rightmost leaf under child `i` of `node` (at `level`), with its count.
    fn edge_leaf(&self, node: u32, i: usize, level: usize, rightmost: bool) -> (u32, u64) {
        let mut n = self.node(node);
        let mut i = i;
        for _ in 0..level {
            n = self.node(n.children[i]);
            i = if rightmost { n.children.len() - 1 } else { 0 };
        }
        (n.children[i], n.count(i))
    }

    /// First leaf (in order) for which `f(leaf, count, end_rank)` holds, where
    /// `end_rank` is the exclusive end of the leaf's rank range. `f` must be
    /// monotone: false on a prefix of the leaves, true afterwards.
    pub fn first_by_last<F>(&self, mut f: F) -> Option<(Path, u64)>
    where
        F: FnMut(u32, u64, u64) -> bool,
    {
        if self.root == NIL {
            return None;
        }
        let mut path = Path::new();
        let mut node = self.root;
        let mut base = 0u64;
        for level in (0..self.height).rev() {
            let n = self.node(node);
            let (mut lo, mut hi) = (0usize, n.children.len());
            while lo < hi {
                let mid = lo + (hi - lo) / 2;
                let (leaf, count) = self.edge_leaf(node, mid, level, true);
                if f(leaf, count, base + n.prefix[mid].to_u64()) {
                    hi = mid;
                } else {
                    lo = mid + 1;
                }
            }
            if lo == n.children.len() {
                debug_assert!(path.is_empty(), "monotone predicate failed below the root");
                return None;
            }
            base += n.before(lo);
            path.push((node, lo as u32));
            if level > 0 {
                node = n.children[lo];
            }
        }
        Some((path, base))
    }

    /// Last leaf whose leftmost descendant satisfies `f(leaf)`; `f` must be
    /// true on a prefix of the leaves and false afterwards.
    pub fn last_by_first<F>(&self, mut f: F) -> Option<(Path, u64)>
    where
        F: FnMut(u32) -> bool,
    {
        if self.root == NIL {
            return None;
        }
        let mut path = Path::new();
        let mut node = self.root;
        let mut base = 0u64;
        for level in (0..self.height).rev() {
            let n = self.node(node);
            let (mut lo, mut hi) = (0usize, n.children.len());
            while lo < hi {
                let mid = lo + (hi - lo) / 2;
                if f(self.edge_leaf(node, mid, level, false).0) {
                    lo = mid + 1;
                } else {
                    hi = mid;
                }
            }
            if lo == 0 {
                debug_assert!(path.is_empty(), "monotone predicate failed below the root");
                return None;
            }
            let i = lo - 1;
            base += n.before(i);
            path.push((node, i as u32));
            if level > 0 {
                node = n.children[i];
            }
        }
        Some((path, base))
    }

    /// Completes `path` down to the bottom level along the first or last children.
    fn descend(&self, path: &mut Path, rightmost: bool) {
        while path.len() < self.height {
            let &(n, i) = path.last().unwrap();
            let child = self.node(n).children[i as usize];
            let idx = if rightmost {
                self.node(child).children.len() - 1
            } else {
                0
            };
            path.push((child, idx as u32));
        }
    }

    pub fn first(&self) -> Option<Path> {
        if self.root == NIL {
            return None;
        }
        let mut path = Path::new();
        path.push((self.root, 0));
        self.descend(&mut path, false);
        Some(path)
    }

    pub fn last(&self) -> Option<Path> {
        if self.root == NIL {
            return None;
        }
        let mut path = Path::new();
        path.push((self.root, (self.node(self.root).children.len() - 1) as u32));
        self.descend(&mut path, true);
        Some(path)
    }

    pub fn next(&self, path: &Path) -> Option<Path> {
        let mut p = path.clone();
        while let Some((n, i)) = p.pop() {
            if (i as usize) + 1 < self.node(n).children.len() {
                p.push((n, i + 1));
                self.descend(&mut p, false);
                return Some(p);
            }
        }
        None
    }

    pub fn prev(&self, path: &Path) -> Option<Path> {
        let mut p = path.clone();
        while let Some((n, i)) = p.pop() {
            if i > 0 {
                p.push((n, i - 1));
                self.descend(&mut p, true);
                return Some(p);
            }
        }
        None
    }

    /// Adds `delta` to the count of the leaf at `path`.
    pub fn add(&mut self, path: &Path, delta: i64) {
        for &(n, i) in path {
            self.node_mut(n).add_from(i as usize, delta);
        }
    }

    pub fn set_count(&mut self, path: &Path, count: u64) {
        let delta = count as i64 - self.count(path) as i64;
        self.add(path, delta);
    }

    /// Inserts a leaf right after the one at `path`.
    pub fn insert_after(&mut self, path: &Path, leaf: u32, count: u64) {
        self.insert_at(path, 1, leaf, count);
    }

    /// Inserts a leaf right before the one at `path`.
    pub fn insert_before(&mut self, path: &Path, leaf: u32, count: u64) {
        self.insert_at(path, 0, leaf, count);
    }

    /// Appends a leaf after every existing one.
    pub fn push_back(&mut self, leaf: u32, count: u64) {
        match self.last() {
            Some(p) => self.insert_after(&p, leaf, count),
            None => {
                self.root = self.alloc(Node {
                    children: vec![leaf],
                    prefix: vec![C::from_u64(count)],
                });
                self.height = 1;
                self.leaves = 1;
            }
        }
    }

    fn insert_at(&mut self, path: &Path, shift: u32, leaf: u32, count: u64) {
        let depth = path.len();
        for &(n, i) in &path[..depth - 1] {
            self.node_mut(n).add_from(i as usize, count as i64);
        }
        let (bottom, idx) = path[depth - 1];
        let pos = (idx + shift) as usize;
        {
            let b = self.node_mut(bottom);
            let before = b.before(pos);
            b.children.insert(pos, leaf);
            b.prefix.insert(pos, C::from_u64(before + count));
            b.add_from(pos + 1, count as i64);
        }
        self.leaves += 1;
        // Split overflowing nodes bottom-up.
        for k in (0..depth).rev() {
            let node = path[k].0;
            if self.node(node).children.len() <= self.max_fanout {
                break;
            }
            let n = self.node_mut(node);
            let mid = n.children.len() / 2;
            let left_total = n.prefix[mid - 1].to_u64();
            let children = n.children.split_off(mid);
            let prefix: Vec<C> = n
                .prefix
                .split_off(mid)
                .into_iter()
                .map(|p| C::from_u64(p.to_u64() - left_total))
                .collect();
            let right = self.alloc(Node { children, prefix });
            if k == 0 {
                let total = left_total + self.node(right).total();
                self.root = self.alloc(Node {
                    children: vec![node, right],
                    prefix: vec![C::from_u64(left_total), C::from_u64(total)],
                });
                self.height += 1;
            } else {
                let (parent, pi) = path[k - 1];
                let p = self.node_mut(parent);
                let pi = pi as usize;
                let old = p.prefix[pi];
                p.prefix[pi] = C::from_u64(p.before(pi) + left_total);
                p.children.insert(pi + 1, right);
                p.prefix.insert(pi + 1, old);
            }
        }
    }

    /// Removes the leaf at `path`.
    pub fn remove(&mut self, path: &Path) {
        let depth = path.len();
        let c = self.count(path) as i64;
        for &(n, i) in &path[..depth - 1] {
            self.node_mut(n).add_from(i as usize, -c);
        }
        let (bottom, idx) = path[depth - 1];
        {
            let b = self.node_mut(bottom);
            b.children.remove(idx as usize);
            b.prefix.remove(idx as usize);
            b.add_from(idx as usize, -c);
        }
        self.leaves -= 1;
        for k in (1..depth).rev() {
            let node = path[k].0;
            if self.node(node).children.len() >= self.min_fanout {
                break;
            }
            let (parent, pi) = path[k - 1];
            let pi = pi as usize;
            let plen = self.node(parent).children.len();
            let (l, r) = if pi + 1 < plen { (pi, pi + 1) } else { (pi - 1, pi) };
            let (lid, rid) = {
                let p = self.node(parent);
                (p.children[l], p.children[r])
            };
            let combined = self.node(lid).children.len() + self.node(rid).children.len();
            if combined <= self.max_fanout {
                let rnode = std::mem::take(self.node_mut(rid));
                let ln = self.node_mut(lid);
                let base = ln.total();
                ln.children.extend(rnode.children);
                ln.prefix
                    .extend(rnode.prefix.into_iter().map(|p| C::from_u64(p.to_u64() + base)));
                self.release(rid);
                let p = self.node_mut(parent);
                p.prefix[l] = p.prefix[r];
                p.children.remove(r);
                p.prefix.remove(r);
            } else {
                let rnode = std::mem::take(self.node_mut(rid));
                let lnode = std::mem::take(self.node_mut(lid));
                let mut counts: Vec<(u32, u64)> = Vec::with_capacity(combined);
                for n in [&lnode, &rnode] {
                    for i in 0..n.children.len() {
                        counts.push((n.children[i], n.count(i)));
                    }
                }
                let half = combined / 2;
                let build = |part: &[(u32, u64)]| {
                    let mut sum = 0;
                    let mut node = Node {
                        children: Vec::with_capacity(part.len()),
                        prefix: Vec::with_capacity(part.len()),
                    };
                    for &(ch, c) in part {
                        sum += c;
                        node.children.push(ch);
                        node.prefix.push(C::from_u64(sum));
                    }
                    node
                };
                let new_l = build(&counts[..half]);
                let left_total = new_l.total();
                *self.node_mut(lid) = new_l;
                *self.node_mut(rid) = build(&counts[half..]);
                let p = self.node_mut(parent);
                p.prefix[l] = C::from_u64(p.before(l) + left_total);
            }
        }
        let root = self.node(self.root);
        if root.children.is_empty() {
            let r = self.root;
            self.release(r);
            self.root = NIL;
            self.height = 0;
        } else if self.height > 1 && root.children.len() == 1 {
            let old = self.root;
            self.root = root.children[0];
            self.release(old);
            self.height -= 1;
        }
    }

    /// All `(leaf, count)` pairs in order.
    pub fn leaves(&self) -> Vec<(u32, u64)> {
        let mut out = Vec::with_capacity(self.leaves);
        let mut cur = self.first();
        while let Some(p) = cur {
            out.push((self.leaf(&p), self.count(&p)));
            cur = self.next(&p);
        }
        out
    }

    pub fn clear(&mut self) {
        *self = Self::new(self.min_fanout, self.max_fanout);
    }

    /// Child ids and counters of every live node, plus a length word per node.
    pub fn size_bits(&self) -> usize {
        let live = self.nodes.len() - self.free.len();
        let entries: usize = self.nodes.iter().map(|n| n.children.len()).sum();
        entries * (32 + C::BITS as usize) + live * 64 + self.free.len() * 32 + 4 * 64
    }

    /// Checks fanout bounds, uniform depth and every stored prefix sum.
    pub fn check(&self) -> Result<(), String> {
        if self.root == NIL {
            return if self.leaves == 0 && self.height == 0 {
                Ok(())
            } else {
                Err("empty tree with leaves or height".into())
            };
        }
        let mut leaves = 0;
        self.check_node(self.root, self.height - 1, true, &mut leaves)?;
        if leaves != self.leaves {
            return Err(format!("found {leaves} leaves, expected {}", self.leaves));
        }
        Ok(())
    }

    fn check_node(&self, id: u32, level: usize, is_root: bool, leaves: &mut usize) -> Result<u64, String> {
        let n = self.node(id);
        let len = n.children.len();
        if len != n.prefix.len() {
            return Err(format!("node {id} has misaligned arrays"));
        }
        let lo = if is_root {
            if level > 0 {
                2
            } else {
                1
            }
        } else {
            self.min_fanout
        };
        if len < lo || len > self.max_fanout {
            return Err(format!("node {id} at level {level} has {len} children"));
        }
        let mut sum = 0u64;
        for i in 0..len {
            let c = if level == 0 {
                *leaves += 1;
                n.count(i)
            } else {
                self.check_node(n.children[i], level - 1, false, leaves)?
            };
            if c == 0 {
                return Err(format!("node {id} child {i} has count 0"));
            }
            sum += c;
            if n.prefix[i].to_u64() != sum {
                return Err(format!("node {id} prefix {i} is {:?}, expected {sum}", n.prefix[i]));
            }
        }
        Ok(sum)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn bulk_build_and_select() {
        let leaves: Vec<(u32, u64)> = (0..1000).map(|i| (i, (i % 7 + 1) as u64)).collect();
        let t = CountedTree::<u32>::from_leaves(4, 16, &leaves);
        t.check().unwrap();
        assert_eq!(t.total(), leaves.iter().map(|l| l.1).sum::<u64>());
        let mut rank = 0;
        for &(leaf, count) in &leaves {
            for off in 0..count {
                let (p, o) = t.select(rank + off).unwrap();
                assert_eq!((t.leaf(&p), o), (leaf, off));
                assert_eq!(t.start_rank(&p), rank);
            }
            rank += count;
        }
        assert!(t.select(rank).is_none());
        assert_eq!(t.leaves(), leaves);
    }

    #[test]
    fn searches_by_edge_values() {
        // Leaf i covers keys [10 i, 10 i + 9].
        let leaves: Vec<(u32, u64)> = (0..500).map(|i| (i, 2)).collect();
        let t = CountedTree::<u64>::from_leaves(3, 12, &leaves);
        for x in [0u64, 5, 9, 10, 4999, 2345] {
            let (p, start) = t.first_by_last(|leaf, _, _| 10 * leaf as u64 + 9 >= x).unwrap();
            assert_eq!(t.leaf(&p) as u64, x / 10);
            assert_eq!(start, 2 * (x / 10));
            let (p, _) = t.last_by_first(|leaf| 10 * leaf as u64 <= x).unwrap();
            assert_eq!(t.leaf(&p) as u64, x / 10);
        }
        assert!(t.first_by_last(|leaf, _, _| 10 * leaf as u64 + 9 >= 5000).is_none());
        assert!(t.last_by_first(|_| false).is_none());
    }

    #[test]
    fn end_rank_passed_to_predicate() {
        let leaves: Vec<(u32, u64)> = (0..100).map(|i| (i, 3)).collect();
        let t = CountedTree::<u16>::from_leaves(2, 8, &leaves);
        let mut ok = true;
        t.first_by_last(|leaf, count, end| {
            ok &= count == 3 && end == 3 * (leaf as u64 + 1);
            leaf >= 50
        });
        assert!(ok);
    }

    #[test]
    fn differential_against_vec() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        let mut t = CountedTree::<u32>::new(3, 12);
        let mut oracle: Vec<(u32, u64)> = Vec::new();
        let mut next_id = 0u32;
        for step in 0..20_000 {
            let op = rng.random_range(0..10);
            if oracle.is_empty() || op < 4 {
                let count = rng.random_range(1..50);
                let pos = rng.random_range(0..=oracle.len());
                if oracle.is_empty() {
                    t.push_back(next_id, count);
                } else if pos == oracle.len() {
                    let p = t.last().unwrap();
                    t.insert_after(&p, next_id, count);
                } else {
                    let rank: u64 = oracle[..pos].iter().map(|l| l.1).sum();
                    let (p, _) = t.select(rank).unwrap();
                    t.insert_before(&p, next_id, count);
                }
                oracle.insert(pos, (next_id, count));
                next_id += 1;
            } else if op < 7 {
                let pos = rng.random_range(0..oracle.len());
                let rank: u64 = oracle[..pos].iter().map(|l| l.1).sum();
                let (p, _) = t.select(rank).unwrap();
                assert_eq!(t.leaf(&p), oracle[pos].0);
                t.remove(&p);
                oracle.remove(pos);
            } else {
                let pos = rng.random_range(0..oracle.len());
                let rank: u64 = oracle[..pos].iter().map(|l| l.1).sum();
                let (p, _) = t.select(rank).unwrap();
                let c = rng.random_range(1..50);
                t.set_count(&p, c);
                oracle[pos].1 = c;
            }
            if step % 250 == 0 {
                t.check().unwrap();
                assert_eq!(t.leaves(), oracle);
            }
        }
        t.check().unwrap();
        assert_eq!(t.leaves(), oracle);
        while let Some(p) = t.first() {
            t.remove(&p);
        }
        assert!(t.is_empty());
        t.check().unwrap();
    }

    #[test]
    fn next_prev_walk() {
        let leaves: Vec<(u32, u64)> = (0..300).map(|i| (i, 1)).collect();
        let t = CountedTree::<u32>::from_leaves(4, 16, &leaves);
        let mut p = t.last().unwrap();
        let mut seen = vec![t.leaf(&p)];
        while let Some(q) = t.prev(&p) {
            seen.push(t.leaf(&q));
            p = q;
        }
        seen.reverse();
        assert_eq!(seen, (0..300).collect::<Vec<_>>());
        assert!(t.height() <= 4);
    }
}
