//! Pointerless wavelet tree over fixed-width keys, with a `u32` satellite
//! carried to the leaves.
//!
//! Level `d` stores bit `h - 1 - d` of every key, arranged in the order
//! obtained by stably sorting on the top `d` bits. After the last level the
//! sequence is stably sorted by key, so each leaf is a contiguous run of
//! the leaf array holding its satellites in original order.

use super::bitvector::BitVector;

#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct WaveletTree {
    pub(crate) len: usize,
    pub(crate) levels: Vec<BitVector>,
    /// Satellites in leaf order.
    pub(crate) leaves: Vec<u32>,
}

/// A node and a subrange of it, both as half-open ranges of one level.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Cursor {
    pub depth: usize,
    node: (usize, usize),
    range: (usize, usize),
}

impl Cursor {
    pub fn is_empty(&self) -> bool {
        self.range.0 >= self.range.1
    }

    /// The selected range; in leaf coordinates once fully descended.
    pub fn range(&self) -> (usize, usize) {
        self.range
    }
}

impl WaveletTree {
    /// `keys[i] < 2^height` for all `i`.
    pub fn new(keys: &[u32], satellites: &[u32], height: usize) -> Self {
        assert_eq!(keys.len(), satellites.len());
        assert!(height < 32);
        debug_assert!(keys.iter().all(|&k| (k as u64) < 1u64 << height));
        let mut cur: Vec<(u32, u32)> = keys.iter().copied().zip(satellites.iter().copied()).collect();
        let mut levels = Vec::with_capacity(height);
        for d in 0..height {
            let shift = height - 1 - d;
            levels.push(BitVector::from_bits(cur.iter().map(|&(k, _)| k >> shift & 1 == 1)));
            cur.sort_by_key(|&(k, _)| k >> shift);
        }
        Self {
            len: keys.len(),
            levels,
            leaves: cur.into_iter().map(|(_, s)| s).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn height(&self) -> usize {
        self.levels.len()
    }

    pub fn leaves(&self) -> &[u32] {
        &self.leaves
    }

    pub fn root(&self, l: usize, r: usize) -> Cursor {
        debug_assert!(l <= r && r <= self.len);
        Cursor {
            depth: 0,
            node: (0, self.len),
            range: (l, r),
        }
    }

    /// Follows one key bit down from `c`.
    #[inline]
    pub fn child(&self, c: Cursor, bit: bool) -> Cursor {
        let bv = &self.levels[c.depth];
        let (s, e) = c.node;
        let (l, r) = c.range;
        let (rs, rl, rr, re) = (bv.rank1(s), bv.rank1(l), bv.rank1(r), bv.rank1(e));
        let zeros = (e - s) - (re - rs);
        if bit {
            let base = s + zeros;
            Cursor {
                depth: c.depth + 1,
                node: (base, e),
                range: (base + rl - rs, base + rr - rs),
            }
        } else {
            Cursor {
                depth: c.depth + 1,
                node: (s, s + zeros),
                range: (s + (l - s) - (rl - rs), s + (r - s) - (rr - rs)),
            }
        }
    }

    /// Descends `bits` levels following the top bits of `prefix`.
    pub fn descend(&self, mut c: Cursor, prefix: u32, bits: usize) -> Cursor {
        for b in (0..bits).rev() {
            if c.is_empty() {
                break;
            }
            c = self.child(c, prefix >> b & 1 == 1);
        }
        c
    }

    /// Leaf-array range of positions `[l, r)` whose key is `key`.
    pub fn leaf_range(&self, l: usize, r: usize, key: u32) -> (usize, usize) {
        let c = self.descend(self.root(l, r), key, self.height());
        if c.is_empty() {
            (0, 0)
        } else {
            c.range
        }
    }

    /// Key and satellite of the element at original position `i`.
    pub fn access(&self, i: usize) -> (u32, u32) {
        let mut c = self.root(i, i + 1);
        let mut key = 0;
        for d in 0..self.height() {
            let bit = self.levels[d].get(c.range.0);
            key = key << 1 | bit as u32;
            c = self.child(c, bit);
        }
        (key, self.leaves[c.range.0])
    }

    pub fn heap_words(&self) -> usize {
        self.levels.iter().map(BitVector::heap_words).sum::<usize>() + self.leaves.len().div_ceil(2)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn check(keys: &[u32], height: usize) {
        let sats: Vec<u32> = (0..keys.len() as u32).map(|i| i * 7 + 1).collect();
        let wt = WaveletTree::new(keys, &sats, height);
        for i in 0..keys.len() {
            assert_eq!(wt.access(i), (keys[i], sats[i]));
        }
        // leaves in key order reproduce the sequence grouped by key
        let mut expect: Vec<(u32, u32)> = keys.iter().copied().zip(sats.iter().copied()).collect();
        expect.sort_by_key(|&(k, _)| k);
        assert_eq!(wt.leaves(), expect.iter().map(|&(_, s)| s).collect::<Vec<_>>());
        for l in 0..=keys.len() {
            for r in l..=keys.len() {
                for key in 0..(1u32 << height) {
                    let (x, y) = wt.leaf_range(l, r, key);
                    let want: Vec<u32> = (l..r).filter(|&i| keys[i] == key).map(|i| sats[i]).collect();
                    assert_eq!(&wt.leaves()[x..y], &want[..], "[{l},{r}) key {key}");
                }
            }
        }
    }

    #[test]
    fn zero_height_is_one_leaf() {
        check(&[0, 0, 0], 0);
        check(&[], 0);
    }

    #[test]
    fn small_sequences() {
        check(&[3, 1, 2, 1, 0, 3, 3, 2], 2);
        check(&[5, 0, 7, 2, 2, 6, 1, 4, 5, 5], 3);
    }

    proptest! {
        #[test]
        fn leaf_reconstruction(keys in proptest::collection::vec(0u32..16, 0..40)) {
            check(&keys, 4);
        }
    }
}
