//! Static predecessor over an EF sequence cut into logical blocks of
//! `block_len` elements, with a y-fast trie on each block's first element.
//!
//! A query asks the router for the block whose head is the largest one below
//! `x`, then binary searches that block through `access`.

use std::io::{Read, Write};

use crate::ef::{check_strict, EliasFano};
use crate::error::{Error, Result};
use crate::space::SpaceReport;
use crate::yfast::YFastTrie;

#[derive(Clone, Debug)]
pub struct SampledPredecessor {
    ef: EliasFano,
    block_len: usize,
    router: YFastTrie<u32>,
}

impl SampledPredecessor {
    /// Builds over a strictly increasing set with values in `[0, m]`.
    pub fn build(values: &[u64], m: u64, block_len: usize) -> Result<Self> {
        check_strict(values, m)?;
        let ef = EliasFano::encode(values, m)?;
        Self::from_ef(ef, block_len)
    }

    pub fn from_ef(ef: EliasFano, block_len: usize) -> Result<Self> {
        if block_len < 2 {
            return Err(Error::OutOfRange {
                index: block_len as u64,
                len: 2,
            });
        }
        let mut router = YFastTrie::for_universe(ef.universe());
        for (b, start) in (0..ef.len()).step_by(block_len).enumerate() {
            router.insert(ef.access(start)?, b as u32);
        }
        Ok(Self {
            ef,
            block_len,
            router,
        })
    }

    pub fn ef(&self) -> &EliasFano {
        &self.ef
    }

    pub fn block_len(&self) -> usize {
        self.block_len
    }

    pub fn router(&self) -> &YFastTrie<u32> {
        &self.router
    }

    pub fn len(&self) -> usize {
        self.ef.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ef.is_empty()
    }

    pub fn access(&self, i: usize) -> Result<u64> {
        self.ef.access(i)
    }

    /// Largest element strictly below `x`.
    pub fn predecessor(&self, x: u64) -> Option<u64> {
        // The block whose head is the largest element below x holds the answer.
        let (_, &b) = self.router.predecessor(x)?;
        let lo = b as usize * self.block_len;
        let hi = (lo + self.block_len).min(self.ef.len());
        let (mut l, mut h) = (lo + 1, hi);
        while l < h {
            let mid = l + (h - l) / 2;
            if self.ef.access(mid).expect("in range") < x {
                l = mid + 1;
            } else {
                h = mid;
            }
        }
        Some(self.ef.access(l - 1).expect("in range"))
    }

    pub fn space_report(&self) -> SpaceReport {
        let mut r = self.ef.space_report();
        r.components.push(("router", self.router.size_bits() as u64));
        SpaceReport::new(r.n, r.m, r.payload_bits, r.components)
    }

    /// Writes the EF part (`EFST`); the router is derived state.
    pub fn write_to<W: Write>(&self, w: &mut W) -> Result<()> {
        self.ef.write_to(w)
    }

    pub fn read_from<R: Read>(r: &mut R, block_len: usize) -> Result<Self> {
        Self::from_ef(EliasFano::read_from(r)?, block_len)
    }
}
