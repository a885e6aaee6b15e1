//! Dense binary relations over `0..n` and certified partial orders.

use std::fmt;

use thiserror::Error;

use crate::automaton::StateId;

/// Square bit-matrix holding the strict (off-diagonal) pairs of a relation.
/// The diagonal is not stored: reflexivity is a single flag, set by
/// closure operations.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Relation {
    n: usize,
    words_per_row: usize,
    bits: Vec<u64>,
    reflexive: bool,
}

impl Relation {
    pub fn new(n: usize) -> Self {
        let words_per_row = n.div_ceil(64);
        Self {
            n,
            words_per_row,
            bits: vec![0; n * words_per_row],
            reflexive: false,
        }
    }

    pub fn from_pairs(n: usize, pairs: impl IntoIterator<Item = (StateId, StateId)>) -> Self {
        let mut rel = Self::new(n);
        for (u, v) in pairs {
            rel.insert(u, v);
        }
        rel
    }

    /// Dimension of the underlying set.
    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn is_reflexive(&self) -> bool {
        self.reflexive
    }

    pub fn set_reflexive(&mut self, reflexive: bool) {
        self.reflexive = reflexive;
    }

    pub fn contains(&self, u: StateId, v: StateId) -> bool {
        if u == v {
            return self.reflexive;
        }
        self.bit(u, v)
    }

    #[inline]
    fn bit(&self, u: StateId, v: StateId) -> bool {
        self.bits[u * self.words_per_row + v / 64] >> (v % 64) & 1 == 1
    }

    /// Inserts the strict pair `(u, v)`; returns whether it was new.
    /// Pairs `(u, u)` are ignored, see [`Relation::set_reflexive`].
    pub fn insert(&mut self, u: StateId, v: StateId) -> bool {
        if u == v {
            return false;
        }
        let w = &mut self.bits[u * self.words_per_row + v / 64];
        let mask = 1u64 << (v % 64);
        let fresh = *w & mask == 0;
        *w |= mask;
        fresh
    }

    pub fn remove(&mut self, u: StateId, v: StateId) {
        if u != v {
            self.bits[u * self.words_per_row + v / 64] &= !(1u64 << (v % 64));
        }
    }

    /// Number of strict pairs.
    pub fn strict_count(&self) -> usize {
        self.bits.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn has_strict_pairs(&self) -> bool {
        self.bits.iter().any(|&w| w != 0)
    }

    /// Strict pairs in row-major (sorted) order.
    pub fn pairs(&self) -> impl Iterator<Item = (StateId, StateId)> + '_ {
        (0..self.n).flat_map(move |u| self.successors(u).map(move |v| (u, v)))
    }

    /// All `v != u` with `(u, v)` in the relation, ascending.
    pub fn successors(&self, u: StateId) -> impl Iterator<Item = StateId> + '_ {
        let row = &self.bits[u * self.words_per_row..(u + 1) * self.words_per_row];
        row.iter().enumerate().flat_map(|(wi, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    return None;
                }
                let b = w.trailing_zeros() as usize;
                w &= w - 1;
                Some(wi * 64 + b)
            })
        })
    }

    /// `row(dst) |= row(src)`
    pub(crate) fn or_row_into(&mut self, src: StateId, dst: StateId) {
        let w = self.words_per_row;
        if src == dst {
            return;
        }
        let (a, b) = (src * w, dst * w);
        for k in 0..w {
            let x = self.bits[a + k];
            self.bits[b + k] |= x;
        }
    }

    pub(crate) fn clear_diagonal(&mut self) {
        for u in 0..self.n {
            self.bits[u * self.words_per_row + u / 64] &= !(1u64 << (u % 64));
        }
    }

    /// Whether some distinct `u, v` have both `(u, v)` and `(v, u)`.
    pub fn is_antisymmetric(&self) -> bool {
        self.pairs().all(|(u, v)| !self.bit(v, u))
    }

    pub fn is_transitive(&self) -> bool {
        for u in 0..self.n {
            for v in self.successors(u) {
                for w in self.successors(v) {
                    if w != u && !self.bit(u, w) {
                        return false;
                    }
                }
            }
        }
        true
    }
}

impl fmt::Debug for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Relation")
            .field("n", &self.n)
            .field("reflexive", &self.reflexive)
            .field("pairs", &self.pairs().collect::<Vec<_>>())
            .finish()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OrderError {
    #[error("relation is not reflexive")]
    NotReflexive,
    #[error("relation is not antisymmetric: ({0}, {1}) and ({1}, {0})")]
    NotAntisymmetric(StateId, StateId),
    #[error("relation is not transitive: ({0}, {1}), ({1}, {2}) but not ({0}, {2})")]
    NotTransitive(StateId, StateId, StateId),
}

/// A relation certified reflexive, antisymmetric and transitive.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PartialOrder {
    rel: Relation,
}

impl PartialOrder {
    /// Checks the three partial-order laws by matrix scan.
    pub fn certify(rel: Relation) -> Result<Self, OrderError> {
        if !rel.is_reflexive() && !rel.is_empty() {
            return Err(OrderError::NotReflexive);
        }
        for (u, v) in rel.pairs() {
            if rel.contains(v, u) {
                return Err(OrderError::NotAntisymmetric(u, v));
            }
        }
        for u in 0..rel.len() {
            for v in rel.successors(u) {
                for w in rel.successors(v) {
                    if w != u && !rel.contains(u, w) {
                        return Err(OrderError::NotTransitive(u, v, w));
                    }
                }
            }
        }
        Ok(Self { rel })
    }

    /// The discrete order (every element only related to itself).
    pub fn antichain(n: usize) -> Self {
        let mut rel = Relation::new(n);
        rel.set_reflexive(true);
        Self { rel }
    }

    pub fn len(&self) -> usize {
        self.rel.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rel.is_empty()
    }

    pub fn relation(&self) -> &Relation {
        &self.rel
    }

    pub fn into_relation(self) -> Relation {
        self.rel
    }

    /// `u < v`
    pub fn less(&self, u: StateId, v: StateId) -> bool {
        u != v && self.rel.contains(u, v)
    }

    /// `u ≤ v`
    pub fn leq(&self, u: StateId, v: StateId) -> bool {
        self.rel.contains(u, v)
    }

    pub fn comparable(&self, u: StateId, v: StateId) -> bool {
        self.leq(u, v) || self.leq(v, u)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn diagonal_is_a_flag() {
        let mut r = Relation::new(3);
        assert!(!r.insert(1, 1));
        assert!(!r.contains(1, 1));
        r.set_reflexive(true);
        assert!(r.contains(2, 2));
        assert_eq!(r.strict_count(), 0);
    }

    #[test]
    fn pairs_iterate_in_order() {
        let r = Relation::from_pairs(130, [(2, 129), (0, 5), (2, 64), (0, 1)]);
        assert_eq!(
            r.pairs().collect::<Vec<_>>(),
            vec![(0, 1), (0, 5), (2, 64), (2, 129)]
        );
    }

    #[test]
    fn certification() {
        let mut r = Relation::from_pairs(3, [(0, 1), (1, 2)]);
        r.set_reflexive(true);
        assert_eq!(
            PartialOrder::certify(r.clone()),
            Err(OrderError::NotTransitive(0, 1, 2))
        );
        r.insert(0, 2);
        assert!(PartialOrder::certify(r.clone()).is_ok());
        r.insert(2, 0);
        assert!(matches!(
            PartialOrder::certify(r),
            Err(OrderError::NotAntisymmetric(..))
        ));
    }
}
