//! Packed bit vectors: the backing store for GF(2) power series windows,
//! matrix rows, and one-variable polynomial coefficient lists.
//!
//! Invariant maintained everywhere: bits at positions >= len in the last
//! word are zero.  That makes word-wise equality, hashing and xor valid
//! without masking on the read side.

const WORD: usize = 64;

#[derive(Clone, PartialEq, Eq, Hash)]
pub(crate) struct BitVec {
    len: usize,
    words: Vec<u64>,
}

impl BitVec {
    pub fn zeros(len: usize) -> Self {
        BitVec {
            len,
            words: vec![0u64; len.div_ceil(WORD)],
        }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    #[inline]
    pub fn get(&self, n: usize) -> bool {
        debug_assert!(n < self.len);
        (self.words[n / WORD] >> (n % WORD)) & 1 != 0
    }

    #[inline]
    pub fn set(&mut self, n: usize, bit: bool) {
        debug_assert!(n < self.len);
        let mask = 1u64 << (n % WORD);
        if bit {
            self.words[n / WORD] |= mask;
        } else {
            self.words[n / WORD] &= !mask;
        }
    }

    #[inline]
    pub fn toggle(&mut self, n: usize) {
        debug_assert!(n < self.len);
        self.words[n / WORD] ^= 1u64 << (n % WORD);
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn first_set(&self) -> Option<usize> {
        self.words
            .iter()
            .position(|&w| w != 0)
            .map(|i| i * WORD + self.words[i].trailing_zeros() as usize)
    }

    pub fn last_set(&self) -> Option<usize> {
        self.words
            .iter()
            .rposition(|&w| w != 0)
            .map(|i| i * WORD + (WORD - 1 - self.words[i].leading_zeros() as usize))
    }

    /// Ascending positions of set bits.
    pub fn iter_ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(i, &word)| {
            let mut w = word;
            std::iter::from_fn(move || {
                if w == 0 {
                    None
                } else {
                    let b = w.trailing_zeros() as usize;
                    w &= w - 1;
                    Some(i * WORD + b)
                }
            })
        })
    }

    /// self ^= other, where other must not be longer than self.
    pub fn xor_assign(&mut self, other: &BitVec) {
        assert!(other.len <= self.len, "xor_assign length mismatch");
        for (a, b) in self.words.iter_mut().zip(other.words.iter()) {
            *a ^= b;
        }
    }

    /// self ^= other << shift, bits shifted past self.len are dropped.
    pub fn xor_shifted_assign(&mut self, other: &BitVec, shift: usize) {
        if shift >= self.len {
            return;
        }
        let nwords = self.words.len();
        let wshift = shift / WORD;
        let bshift = shift % WORD;
        if bshift == 0 {
            for (i, &w) in other.words.iter().enumerate() {
                let j = i + wshift;
                if j >= nwords {
                    break;
                }
                self.words[j] ^= w;
            }
        } else {
            for (i, &w) in other.words.iter().enumerate() {
                let j = i + wshift;
                if j >= nwords {
                    break;
                }
                self.words[j] ^= w << bshift;
                if j + 1 < nwords {
                    self.words[j + 1] ^= w >> (WORD - bshift);
                }
            }
        }
        self.mask_tail();
    }

    /// Copy of the first new_len bits.
    pub fn truncated(&self, new_len: usize) -> BitVec {
        assert!(new_len <= self.len, "truncated may only shrink");
        let mut out = BitVec {
            len: new_len,
            words: self.words[..new_len.div_ceil(WORD)].to_vec(),
        };
        out.mask_tail();
        out
    }

    /// Bits n -> k*n into a fresh vector of length new_len.
    pub fn spread(&self, k: usize, new_len: usize) -> BitVec {
        let mut out = BitVec::zeros(new_len);
        for n in self.iter_ones() {
            let m = n * k;
            if m < new_len {
                out.set(m, true);
            }
        }
        out
    }

    fn mask_tail(&mut self) {
        let r = self.len % WORD;
        if r != 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= (1u64 << r) - 1;
            }
        }
    }
}

impl std::fmt::Debug for BitVec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "BitVec(len={}, ones=[", self.len)?;
        for (i, n) in self.iter_ones().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            if i >= 16 {
                write!(f, "...")?;
                break;
            }
            write!(f, "{n}")?;
        }
        write!(f, "])")
    }
}
