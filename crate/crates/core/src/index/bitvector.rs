//! Plain bitvector with a two-level rank directory.

const SUPER_BITS: usize = 512;
const WORDS_PER_SUPER: usize = SUPER_BITS / 64;

#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct BitVector {
    len: usize,
    // always len / 64 + 1 words so rank(len) needs no branch
    words: Vec<u64>,
    // ones before each superblock, plus one trailing total
    supers: Vec<u64>,
    // ones before each word, relative to its superblock
    blocks: Vec<u16>,
}

impl BitVector {
    pub fn from_bits(bits: impl IntoIterator<Item = bool>) -> Self {
        let mut words = Vec::new();
        let mut len = 0;
        for b in bits {
            if len % 64 == 0 {
                words.push(0);
            }
            if b {
                *words.last_mut().unwrap() |= 1 << (len % 64);
            }
            len += 1;
        }
        Self::from_words(words, len)
    }

    /// Builds from raw little-endian words; bits past `len` are cleared.
    pub fn from_words(mut words: Vec<u64>, len: usize) -> Self {
        words.resize(len / 64 + 1, 0);
        if !len.is_multiple_of(64) {
            words[len / 64] &= (1u64 << (len % 64)) - 1;
        } else {
            words[len / 64] = 0;
        }
        let mut supers = Vec::with_capacity(words.len() / WORDS_PER_SUPER + 2);
        let mut blocks = Vec::with_capacity(words.len());
        let mut total = 0u64;
        let mut in_super = 0u16;
        for (i, w) in words.iter().enumerate() {
            if i % WORDS_PER_SUPER == 0 {
                supers.push(total);
                in_super = 0;
            }
            blocks.push(in_super);
            let c = w.count_ones();
            in_super += c as u16;
            total += c as u64;
        }
        supers.push(total);
        Self {
            len,
            words,
            supers,
            blocks,
        }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn ones(&self) -> usize {
        *self.supers.last().unwrap_or(&0) as usize
    }

    /// The stored words, `len / 64 + 1` of them.
    pub fn words(&self) -> &[u64] {
        &self.words
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        debug_assert!(i < self.len);
        self.words[i / 64] >> (i % 64) & 1 == 1
    }

    /// Ones in positions `< i`, for `i <= len`.
    #[inline]
    pub fn rank1(&self, i: usize) -> usize {
        debug_assert!(i <= self.len);
        let w = i / 64;
        let below = self.words[w] & ((1u64 << (i % 64)) - 1);
        self.supers[w / WORDS_PER_SUPER] as usize
            + self.blocks[w] as usize
            + below.count_ones() as usize
    }

    #[inline]
    pub fn rank0(&self, i: usize) -> usize {
        i - self.rank1(i)
    }

    /// Position of the one with rank `k` (0-based), so `rank1(select1(k)) == k`.
    pub fn select1(&self, k: usize) -> Option<usize> {
        if k >= self.ones() {
            return None;
        }
        let k = k as u64;
        // last superblock whose prefix count is <= k
        let sb = self.supers.partition_point(|&c| c <= k) - 1;
        let mut rest = (k - self.supers[sb]) as u16;
        let first = sb * WORDS_PER_SUPER;
        let last = (first + WORDS_PER_SUPER).min(self.words.len());
        let w = first + self.blocks[first..last].partition_point(|&c| c <= rest) - 1;
        rest -= self.blocks[w];
        let mut word = self.words[w];
        for _ in 0..rest {
            word &= word - 1;
        }
        Some(w * 64 + word.trailing_zeros() as usize)
    }

    pub fn heap_words(&self) -> usize {
        self.words.len() + self.supers.len() + self.blocks.len().div_ceil(4)
    }
}
