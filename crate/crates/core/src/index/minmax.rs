//! Range minimum and maximum over a fixed `u32` slice.
//!
//! Blocks of 32 values keep in-block prefix and suffix extrema; a sparse
//! table over the block extrema answers the middle part. Space is linear
//! and a query touches at most one block scan plus two table cells.

pub(crate) const BLOCK: usize = 32;

#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct RangeMinMax {
    pub(crate) len: usize,
    pub(crate) prefix_min: Vec<u32>,
    pub(crate) prefix_max: Vec<u32>,
    pub(crate) suffix_min: Vec<u32>,
    pub(crate) suffix_max: Vec<u32>,
    // table_min[k][b]: min over blocks b .. b + 2^k
    pub(crate) table_min: Vec<Vec<u32>>,
    pub(crate) table_max: Vec<Vec<u32>>,
}

impl RangeMinMax {
    pub fn new(values: &[u32]) -> Self {
        let n = values.len();
        let mut prefix_min = vec![0; n];
        let mut prefix_max = vec![0; n];
        let mut suffix_min = vec![0; n];
        let mut suffix_max = vec![0; n];
        let mut block_min = Vec::with_capacity(n.div_ceil(BLOCK));
        let mut block_max = Vec::with_capacity(n.div_ceil(BLOCK));
        for start in (0..n).step_by(BLOCK) {
            let end = (start + BLOCK).min(n);
            let (mut lo, mut hi) = (u32::MAX, 0);
            for i in start..end {
                lo = lo.min(values[i]);
                hi = hi.max(values[i]);
                prefix_min[i] = lo;
                prefix_max[i] = hi;
            }
            block_min.push(lo);
            block_max.push(hi);
            let (mut lo, mut hi) = (u32::MAX, 0);
            for i in (start..end).rev() {
                lo = lo.min(values[i]);
                hi = hi.max(values[i]);
                suffix_min[i] = lo;
                suffix_max[i] = hi;
            }
        }
        Self {
            len: n,
            prefix_min,
            prefix_max,
            suffix_min,
            suffix_max,
            table_min: sparse(block_min, u32::min),
            table_max: sparse(block_max, u32::max),
        }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// `(min, max)` of `values[l..r]`, `None` when the range is empty.
    /// `values` must be the slice the structure was built from.
    #[inline]
    pub fn query(&self, values: &[u32], l: usize, r: usize) -> Option<(u32, u32)> {
        if l >= r {
            return None;
        }
        debug_assert!(r <= self.len && values.len() == self.len);
        let (bl, br) = (l / BLOCK, (r - 1) / BLOCK);
        if bl == br {
            let slice = &values[l..r];
            let lo = *slice.iter().min().unwrap();
            let hi = *slice.iter().max().unwrap();
            return Some((lo, hi));
        }
        let mut lo = self.suffix_min[l].min(self.prefix_min[r - 1]);
        let mut hi = self.suffix_max[l].max(self.prefix_max[r - 1]);
        if bl + 1 < br {
            let (a, b) = (bl + 1, br);
            let k = (b - a).ilog2() as usize;
            let w = 1 << k;
            lo = lo.min(self.table_min[k][a]).min(self.table_min[k][b - w]);
            hi = hi.max(self.table_max[k][a]).max(self.table_max[k][b - w]);
        }
        Some((lo, hi))
    }

    pub fn heap_words(&self) -> usize {
        let cells: usize = 4 * self.len
            + self.table_min.iter().map(Vec::len).sum::<usize>()
            + self.table_max.iter().map(Vec::len).sum::<usize>();
        cells.div_ceil(2)
    }
}

fn sparse(base: Vec<u32>, op: fn(u32, u32) -> u32) -> Vec<Vec<u32>> {
    let len = base.len();
    let mut table = vec![base];
    let mut w = 1;
    while 2 * w <= len {
        let prev = table.last().unwrap();
        let next: Vec<u32> = (0..=len - 2 * w).map(|b| op(prev[b], prev[b + w])).collect();
        table.push(next);
        w *= 2;
    }
    table
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn block_boundaries() {
        let values: Vec<u32> = (0..200).map(|i| (i * 37 % 101) as u32).collect();
        let rmq = RangeMinMax::new(&values);
        for l in 0..values.len() {
            for r in l + 1..=values.len() {
                let s = &values[l..r];
                assert_eq!(
                    rmq.query(&values, l, r),
                    Some((*s.iter().min().unwrap(), *s.iter().max().unwrap())),
                    "[{l}, {r})"
                );
            }
        }
        assert_eq!(rmq.query(&values, 5, 5), None);
    }

    proptest! {
        #[test]
        fn agrees_with_scan(values in proptest::collection::vec(0u32..1000, 1..700), a in any::<usize>(), b in any::<usize>()) {
            let rmq = RangeMinMax::new(&values);
            let (mut l, mut r) = (a % values.len(), b % (values.len() + 1));
            if l > r { std::mem::swap(&mut l, &mut r); }
            let want = (l < r).then(|| {
                let s = &values[l..r];
                (*s.iter().min().unwrap(), *s.iter().max().unwrap())
            });
            prop_assert_eq!(rmq.query(&values, l, r), want);
        }
    }
}
