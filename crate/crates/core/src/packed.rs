//! Fixed-width packed integer array.

use crate::bits::{low_mask, read_bits, words_for, write_bits, WORD_BITS};
use crate::error::{check_index, Error, Result};

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PackedInts {
    width: u32,
    len: usize,
    words: Vec<u64>,
}

impl PackedInts {
    pub fn new(width: u32) -> Self {
        assert!(width <= 64, "width {width} exceeds 64");
        Self {
            width,
            len: 0,
            words: Vec::new(),
        }
    }

    pub fn with_len(width: u32, len: usize) -> Self {
        assert!(width <= 64, "width {width} exceeds 64");
        Self {
            width,
            len,
            words: vec![0; words_for(len * width as usize)],
        }
    }

    pub fn from_slice(width: u32, values: &[u64]) -> Result<Self> {
        let mut p = Self::with_len(width, values.len());
        for (i, &v) in values.iter().enumerate() {
            p.set(i, v)?;
        }
        Ok(p)
    }

    pub(crate) fn from_raw(width: u32, len: usize, words: Vec<u64>) -> Result<Self> {
        let bits = len * width as usize;
        if words.len() != words_for(bits) {
            return Err(Error::Format(format!(
                "{} words cannot hold {len} values of {width} bits",
                words.len()
            )));
        }
        if bits % WORD_BITS != 0 && words.last().is_some_and(|&w| w >> (bits % WORD_BITS) != 0) {
            return Err(Error::Format("bits set beyond packed length".into()));
        }
        Ok(Self { width, len, words })
    }

    #[inline]
    pub fn width(&self) -> u32 {
        self.width
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.len
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    #[inline]
    pub fn get(&self, i: usize) -> u64 {
        debug_assert!(i < self.len);
        read_bits(&self.words, i * self.width as usize, self.width)
    }

    pub fn try_get(&self, i: usize) -> Result<u64> {
        check_index(i, self.len)?;
        Ok(self.get(i))
    }

    pub fn set(&mut self, i: usize, v: u64) -> Result<()> {
        check_index(i, self.len)?;
        if v & !low_mask(self.width) != 0 {
            return Err(Error::ValueTooWide {
                value: v,
                width: self.width,
            });
        }
        write_bits(&mut self.words, i * self.width as usize, self.width, v);
        Ok(())
    }

    pub fn push(&mut self, v: u64) -> Result<()> {
        self.len += 1;
        let need = words_for(self.len * self.width as usize);
        self.words.resize(need, 0);
        let r = self.set(self.len - 1, v);
        if r.is_err() {
            self.len -= 1;
            self.words.truncate(words_for(self.len * self.width as usize));
        }
        r
    }

    /// Payload bits: exactly `len * width`.
    pub fn payload_bits(&self) -> usize {
        self.len * self.width as usize
    }

    pub fn iter(&self) -> impl Iterator<Item = u64> + '_ {
        (0..self.len).map(move |i| self.get(i))
    }
}
