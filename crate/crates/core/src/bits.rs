//! Word-level helpers shared by the bit vectors and packed arrays.

pub(crate) const WORD_BITS: usize = 64;

#[inline]
pub(crate) fn words_for(bits: usize) -> usize {
    bits.div_ceil(WORD_BITS)
}

#[inline]
pub(crate) fn low_mask(width: u32) -> u64 {
    if width >= 64 {
        u64::MAX
    } else {
        (1u64 << width) - 1
    }
}

/// Number of bits needed to write `v` in binary (0 for 0).
#[inline]
pub fn bit_width(v: u64) -> u32 {
    64 - v.leading_zeros()
}

/// Position of the `k`-th (0-based) set bit of `word`. `k` must be below the popcount.
#[inline]
pub(crate) fn select_in_word(word: u64, k: u32) -> u32 {
    debug_assert!(k < word.count_ones());
    // Byte-wise popcounts, then inclusive prefix sums in each byte lane.
    let s = word - ((word >> 1) & 0x5555_5555_5555_5555);
    let s = (s & 0x3333_3333_3333_3333) + ((s >> 2) & 0x3333_3333_3333_3333);
    let s = (s + (s >> 4)) & 0x0f0f_0f0f_0f0f_0f0f;
    let prefix = s.wrapping_mul(0x0101_0101_0101_0101);
    let mut byte = 0u32;
    while byte < 7 && ((prefix >> (8 * byte)) & 0xff) as u32 <= k {
        byte += 1;
    }
    let before = if byte == 0 {
        0
    } else {
        ((prefix >> (8 * (byte - 1))) & 0xff) as u32
    };
    let mut rest = k - before;
    let mut b = (word >> (8 * byte)) & 0xff;
    loop {
        let tz = b.trailing_zeros();
        if rest == 0 {
            return 8 * byte + tz;
        }
        b &= b - 1;
        rest -= 1;
    }
}

/// Reads `width` (≤ 64) bits starting at bit `pos`, LSB-first.
#[inline]
pub(crate) fn read_bits(words: &[u64], pos: usize, width: u32) -> u64 {
    if width == 0 {
        return 0;
    }
    let w = pos / WORD_BITS;
    let off = (pos % WORD_BITS) as u32;
    let lo = words[w] >> off;
    if off + width <= 64 {
        lo & low_mask(width)
    } else {
        (lo | (words[w + 1] << (64 - off))) & low_mask(width)
    }
}

/// Writes the low `width` bits of `value` at bit `pos`, LSB-first.
#[inline]
pub(crate) fn write_bits(words: &mut [u64], pos: usize, width: u32, value: u64) {
    if width == 0 {
        return;
    }
    let mask = low_mask(width);
    let value = value & mask;
    let w = pos / WORD_BITS;
    let off = (pos % WORD_BITS) as u32;
    words[w] = (words[w] & !(mask << off)) | (value << off);
    if off + width > 64 {
        let spill = off + width - 64;
        let hi_mask = low_mask(spill);
        words[w + 1] = (words[w + 1] & !hi_mask) | (value >> (64 - off));
    }
}

/// Position of the `k`-th set bit in a short run of words, scanning from the start.
#[inline]
pub(crate) fn select1_scan(words: &[u64], k: usize) -> usize {
    let mut rest = k;
    for (i, &w) in words.iter().enumerate() {
        let c = w.count_ones() as usize;
        if rest < c {
            return i * WORD_BITS + select_in_word(w, rest as u32) as usize;
        }
        rest -= c;
    }
    panic!("select1_scan: fewer than {} ones", k + 1);
}

#[cfg(test)]
mod tests {
    use super::*;

    fn naive_select(word: u64, k: u32) -> u32 {
        let mut seen = 0;
        for i in 0..64 {
            if word >> i & 1 == 1 {
                if seen == k {
                    return i;
                }
                seen += 1;
            }
        }
        unreachable!()
    }

    #[test]
    fn select_in_word_matches_scan() {
        let words = [
            1u64,
            u64::MAX,
            0x8000_0000_0000_0000,
            0xdead_beef_0123_4567,
            0x0101_0101_0101_0101,
            0xf000_0000_0000_000f,
        ];
        for &w in &words {
            for k in 0..w.count_ones() {
                assert_eq!(select_in_word(w, k), naive_select(w, k), "{w:#x} k={k}");
            }
        }
    }

    #[test]
    fn read_write_across_word_boundary() {
        let mut words = vec![0u64; 3];
        write_bits(&mut words, 60, 10, 0x3ff);
        assert_eq!(read_bits(&words, 60, 10), 0x3ff);
        assert_eq!(words[0] >> 60, 0xf);
        assert_eq!(words[1] & 0x3f, 0x3f);
        write_bits(&mut words, 62, 64, 0x0123_4567_89ab_cdef);
        assert_eq!(read_bits(&words, 62, 64), 0x0123_4567_89ab_cdef);
        assert_eq!(read_bits(&words, 60, 2), 0x3);
    }

    #[test]
    fn bit_width_edges() {
        assert_eq!(bit_width(0), 0);
        assert_eq!(bit_width(1), 1);
        assert_eq!(bit_width(63), 6);
        assert_eq!(bit_width(64), 7);
        assert_eq!(bit_width(u64::MAX), 64);
    }
}
