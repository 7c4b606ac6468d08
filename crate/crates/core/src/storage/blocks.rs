//! Arena of variable-length bit blocks addressed by stable ids.
//!
//! All blocks share one word vector. A slot records a block's word offset
//! and bit length. Growing a block that does not fit its words moves it to
//! the end of the arena; when dead words exceed the live ones the arena is
//! compacted. Addresses are valid until the next `realloc`, `alloc` or `free`.

use crate::bits::{read_bits, words_for, write_bits, WORD_BITS};
use crate::error::{Error, Result};

pub type BlockId = u32;

const DEAD: u32 = u32::MAX;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
struct Slot {
    offset: u32,
    bits: u32,
}

/// Location of a block inside the arena.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BlockAddr {
    pub offset_words: usize,
    pub bits: usize,
}

#[derive(Clone, Debug)]
pub struct BlockStore {
    arena: Vec<u64>,
    slots: Vec<Slot>,
    free_ids: Vec<BlockId>,
    live_words: usize,
    max_block_bits: usize,
    compactions: usize,
}

impl BlockStore {
    /// Store whose blocks may hold at most `max_block_bits` bits.
    pub fn new(max_block_bits: usize) -> Self {
        assert!(max_block_bits <= u32::MAX as usize);
        Self {
            arena: Vec::new(),
            slots: Vec::new(),
            free_ids: Vec::new(),
            live_words: 0,
            max_block_bits,
            compactions: 0,
        }
    }

    pub fn max_block_bits(&self) -> usize {
        self.max_block_bits
    }

    /// Live block count.
    pub fn len(&self) -> usize {
        self.slots.len() - self.free_ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn compactions(&self) -> usize {
        self.compactions
    }

    fn check_bits(&self, bits: usize) -> Result<()> {
        if bits > self.max_block_bits {
            Err(Error::Capacity {
                requested: bits,
                limit: self.max_block_bits,
            })
        } else {
            Ok(())
        }
    }

    fn slot(&self, id: BlockId) -> Slot {
        let s = self.slots[id as usize];
        assert!(s.offset != DEAD, "block {id} is not live");
        s
    }

    fn end_offset(&self) -> Result<u32> {
        u32::try_from(self.arena.len()).map_err(|_| Error::Capacity {
            requested: self.arena.len() * WORD_BITS,
            limit: u32::MAX as usize * WORD_BITS,
        })
    }

    /// New zeroed block of `bits` bits.
    pub fn alloc(&mut self, bits: usize) -> Result<BlockId> {
        self.check_bits(bits)?;
        let offset = self.end_offset()?;
        let words = words_for(bits);
        self.arena.resize(self.arena.len() + words, 0);
        self.live_words += words;
        let slot = Slot {
            offset,
            bits: bits as u32,
        };
        Ok(match self.free_ids.pop() {
            Some(id) => {
                self.slots[id as usize] = slot;
                id
            }
            None => {
                self.slots.push(slot);
                (self.slots.len() - 1) as BlockId
            }
        })
    }

    pub fn free(&mut self, id: BlockId) {
        let s = self.slot(id);
        self.live_words -= words_for(s.bits as usize);
        self.slots[id as usize].offset = DEAD;
        self.free_ids.push(id);
        self.maybe_compact();
    }

    #[inline]
    pub fn address(&self, id: BlockId) -> BlockAddr {
        let s = self.slot(id);
        BlockAddr {
            offset_words: s.offset as usize,
            bits: s.bits as usize,
        }
    }

    #[inline]
    pub fn bits(&self, id: BlockId) -> usize {
        self.slot(id).bits as usize
    }

    /// The words backing block `id`.
    #[inline]
    pub fn words(&self, id: BlockId) -> &[u64] {
        let s = self.slot(id);
        let start = s.offset as usize;
        &self.arena[start..start + words_for(s.bits as usize)]
    }

    #[inline]
    pub fn words_mut(&mut self, id: BlockId) -> &mut [u64] {
        let s = self.slot(id);
        let start = s.offset as usize;
        &mut self.arena[start..start + words_for(s.bits as usize)]
    }

    pub fn read(&self, id: BlockId, pos: usize, width: u32) -> u64 {
        debug_assert!(pos + width as usize <= self.bits(id));
        read_bits(self.words(id), pos, width)
    }

    pub fn write(&mut self, id: BlockId, pos: usize, width: u32, value: u64) {
        debug_assert!(pos + width as usize <= self.bits(id));
        write_bits(self.words_mut(id), pos, width, value)
    }

    /// Changes the length of block `id`, keeping the first min(old, new) bits
    /// and zero-filling any growth.
    pub fn realloc(&mut self, id: BlockId, new_bits: usize) -> Result<()> {
        self.check_bits(new_bits)?;
        let s = self.slot(id);
        let old_bits = s.bits as usize;
        let (old_words, new_words) = (words_for(old_bits), words_for(new_bits));
        let start = s.offset as usize;
        if new_words <= old_words {
            let keep = new_bits.min(old_bits);
            let words = &mut self.arena[start..start + old_words];
            if keep % WORD_BITS != 0 {
                words[keep / WORD_BITS] &= (1u64 << (keep % WORD_BITS)) - 1;
            }
            for w in words.iter_mut().skip(keep.div_ceil(WORD_BITS)) {
                *w = 0;
            }
            self.live_words -= old_words - new_words;
            self.slots[id as usize].bits = new_bits as u32;
            // Freed tail words become garbage (or shrink the arena when at the end).
            if start + old_words == self.arena.len() {
                self.arena.truncate(start + new_words);
            }
            self.maybe_compact();
            return Ok(());
        }
        if start + old_words == self.arena.len() {
            self.arena.resize(start + new_words, 0);
        } else {
            let offset = self.end_offset()?;
            self.arena.extend_from_within(start..start + old_words);
            self.arena.resize(offset as usize + new_words, 0);
            self.slots[id as usize].offset = offset;
        }
        self.live_words += new_words - old_words;
        self.slots[id as usize].bits = new_bits as u32;
        self.maybe_compact();
        Ok(())
    }

    /// Words in the arena not owned by a live block.
    pub fn garbage_words(&self) -> usize {
        self.arena.len() - self.live_words
    }

    fn maybe_compact(&mut self) {
        if self.garbage_words() > self.live_words.max(64) {
            self.compact();
        }
    }

    /// Rewrites the arena with live blocks packed in offset order.
    pub fn compact(&mut self) {
        let mut order: Vec<BlockId> = (0..self.slots.len() as BlockId)
            .filter(|&id| self.slots[id as usize].offset != DEAD)
            .collect();
        order.sort_unstable_by_key(|&id| self.slots[id as usize].offset);
        let mut arena = Vec::with_capacity(self.live_words);
        for id in order {
            let s = self.slots[id as usize];
            let start = s.offset as usize;
            let offset = arena.len() as u32;
            arena.extend_from_slice(&self.arena[start..start + words_for(s.bits as usize)]);
            self.slots[id as usize].offset = offset;
        }
        self.arena = arena;
        self.compactions += 1;
    }

    /// Sum of live block lengths in bits.
    pub fn payload_bits(&self) -> usize {
        self.slots
            .iter()
            .filter(|s| s.offset != DEAD)
            .map(|s| s.bits as usize)
            .sum()
    }

    /// Slot table, free list, garbage words and word-rounding slack.
    pub fn overhead_bits(&self) -> usize {
        self.slots.len() * 64
            + self.free_ids.len() * 32
            + self.arena.len() * WORD_BITS
            - self.payload_bits()
            + 4 * 64
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
    use std::collections::HashMap;

    #[test]
    fn three_blocks_round_trip_and_local_realloc() {
        let mut s = BlockStore::new(1 << 12);
        let ids: Vec<BlockId> = (0..3).map(|_| s.alloc(64).unwrap()).collect();
        let patterns = [0xdead_beef_u64, 0x0123_4567_89ab_cdef, u64::MAX];
        for (&id, &p) in ids.iter().zip(&patterns) {
            s.write(id, 0, 64, p);
        }
        s.realloc(ids[1], 128).unwrap();
        assert_eq!(s.read(ids[0], 0, 64), patterns[0]);
        assert_eq!(s.read(ids[2], 0, 64), patterns[2]);
        assert_eq!(s.read(ids[1], 0, 64), patterns[1]);
        assert_eq!(s.read(ids[1], 64, 64), 0);
        assert_eq!(s.address(ids[1]).bits, 128);
    }

    #[test]
    fn capacity_error() {
        let mut s = BlockStore::new(100);
        assert!(matches!(s.alloc(101), Err(Error::Capacity { .. })));
        let id = s.alloc(10).unwrap();
        assert!(s.realloc(id, 200).is_err());
        assert_eq!(s.bits(id), 10);
    }

    #[test]
    fn shrink_clears_tail_bits() {
        let mut s = BlockStore::new(1000);
        let id = s.alloc(100).unwrap();
        s.write(id, 36, 64, u64::MAX);
        s.realloc(id, 40).unwrap();
        s.realloc(id, 100).unwrap();
        assert_eq!(s.read(id, 36, 4), 0xf);
        assert_eq!(s.read(id, 40, 60), 0);
    }

    fn read_all(s: &BlockStore, id: BlockId) -> Vec<bool> {
        (0..s.bits(id)).map(|i| s.read(id, i, 1) == 1).collect()
    }

    #[test]
    fn differential_against_bitstring_map() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let max = 700;
        let mut s = BlockStore::new(max);
        let mut oracle: HashMap<BlockId, Vec<bool>> = HashMap::new();
        for step in 0..10_000 {
            let ids: Vec<BlockId> = oracle.keys().copied().collect();
            match rng.random_range(0..10) {
                0 | 1 if oracle.len() < 200 => {
                    let bits = rng.random_range(0..max);
                    let id = s.alloc(bits).unwrap();
                    assert!(oracle.insert(id, vec![false; bits]).is_none());
                }
                2 if !ids.is_empty() => {
                    let id = ids[rng.random_range(0..ids.len())];
                    s.free(id);
                    oracle.remove(&id);
                }
                3..=5 if !ids.is_empty() => {
                    let id = ids[rng.random_range(0..ids.len())];
                    let bits = rng.random_range(0..max);
                    s.realloc(id, bits).unwrap();
                    oracle.get_mut(&id).unwrap().resize(bits, false);
                }
                _ if !ids.is_empty() => {
                    let id = ids[rng.random_range(0..ids.len())];
                    let len = oracle[&id].len();
                    if len > 0 {
                        let pos = rng.random_range(0..len);
                        let width = rng.random_range(1..=(len - pos).min(64)) as u32;
                        let v = rng.random::<u64>() & crate::bits::low_mask(width);
                        s.write(id, pos, width, v);
                        for b in 0..width as usize {
                            oracle.get_mut(&id).unwrap()[pos + b] = v >> b & 1 == 1;
                        }
                    }
                }
                _ => {}
            }
            if step % 500 == 0 {
                for (&id, bits) in &oracle {
                    assert_eq!(&read_all(&s, id), bits, "block {id} at step {step}");
                }
                assert!(s.garbage_words() <= s.live_words.max(64));
            }
        }
        assert!(s.compactions() > 0);
        for (&id, bits) in &oracle {
            assert_eq!(&read_all(&s, id), bits);
        }
    }
}
