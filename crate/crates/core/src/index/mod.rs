//! Path index over a chain partition of a weakly path coherent order.
//!
//! For every chain `i` the outgoing edges of its states, taken in chain
//! order, form a sequence `W_i` of `(label, target chain, target position)`
//! triples. A boundary bitvector marks where each state's edges start, a
//! wavelet tree over the `(label, target chain)` keys groups equal keys
//! while keeping source order, and a range min/max structure over the
//! target positions in leaf order turns one source interval into one target
//! interval per chain.
//!
//! Membership queries start from the initial state alone. That stays an
//! interval tuple: if `u ⊴ v` then every string reaching `u` is co-lex
//! smaller than every string reaching `v` unless shared, so the states
//! reached from the initial state by a fixed string form a convex set, by
//! the same argument that makes `B(P)` convex.

mod bitvector;
mod minmax;
mod serial;
mod wavelet;

use std::fmt;

use thiserror::Error;

use crate::automaton::{Alphabet, Nfa, StateId, Symbol, SENTINEL};
use crate::order::ChainPartition;

pub use bitvector::BitVector;
pub use minmax::RangeMinMax;
pub use serial::FormatError;
pub use wavelet::{Cursor, WaveletTree};

/// One interval `(l, r)` per chain, 1-based and inclusive. The empty
/// interval is always `(1, 0)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct IntervalTuple {
    iv: Vec<(usize, usize)>,
}

pub const EMPTY_INTERVAL: (usize, usize) = (1, 0);

impl IntervalTuple {
    pub fn empty(t: usize) -> Self {
        Self {
            iv: vec![EMPTY_INTERVAL; t],
        }
    }

    /// Normalizes every `l > r` to `(1, 0)`.
    pub fn from_intervals(iv: Vec<(usize, usize)>) -> Self {
        Self {
            iv: iv
                .into_iter()
                .map(|(l, r)| if l > r || r == 0 { EMPTY_INTERVAL } else { (l, r) })
                .collect(),
        }
    }

    pub fn num_chains(&self) -> usize {
        self.iv.len()
    }

    pub fn get(&self, i: usize) -> (usize, usize) {
        self.iv[i]
    }

    pub fn intervals(&self) -> &[(usize, usize)] {
        &self.iv
    }

    pub fn is_empty(&self) -> bool {
        self.iv.iter().all(|&(l, r)| l > r)
    }
}

impl fmt::Display for IntervalTuple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, (l, r)) in self.iv.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "({l},{r})")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum IndexError {
    #[error("partition covers {partition} states but the automaton has {automaton}")]
    PartitionMismatch { partition: usize, automaton: usize },
    #[error("{0} chains and {1} symbols do not fit a 31-bit key")]
    TooWide(usize, usize),
}

#[derive(Clone, Debug, PartialEq, Eq)]
struct ChainIndex {
    // original state id at each position
    states: Vec<u32>,
    finals: BitVector,
    // per position a one followed by one zero per outgoing edge, then a final one
    boundaries: BitVector,
    wavelet: WaveletTree,
    minmax: RangeMinMax,
}

impl ChainIndex {
    fn len(&self) -> usize {
        self.states.len()
    }

    /// Range of `W_i` holding the edges of positions `l..=r`.
    #[inline]
    fn edge_range(&self, l: usize, r: usize) -> (usize, usize) {
        let b = &self.boundaries;
        let start = b.select1(l - 1).expect("position in range") - (l - 1);
        let end = b.select1(r).expect("terminal marker") - r;
        (start, end)
    }

    fn heap_words(&self) -> usize {
        self.states.len().div_ceil(2)
            + self.finals.heap_words()
            + self.boundaries.heap_words()
            + self.wavelet.heap_words()
            + self.minmax.heap_words()
    }
}

/// Summary numbers for reports.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IndexStats {
    pub chains: usize,
    pub states: usize,
    pub edges: usize,
    pub sigma: usize,
    pub chain_lengths: Vec<usize>,
    pub key_bits: usize,
    pub heap_words: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PathIndex {
    alphabet: Alphabet,
    num_states: usize,
    num_edges: usize,
    label_bits: usize,
    chain_bits: usize,
    initial: (usize, usize),
    chains: Vec<ChainIndex>,
}

fn ceil_log2(x: usize) -> usize {
    if x <= 1 {
        0
    } else {
        (x - 1).ilog2() as usize + 1
    }
}

/// Builds the index. Any partition into chains is accepted; query results
/// are exact only if the chains come from an order under which every
/// `B(P)` is convex, such as [`crate::colex::triangle_order`].
pub fn build_index(a: &Nfa, cp: &ChainPartition) -> Result<PathIndex, IndexError> {
    if cp.num_states() != a.num_states() {
        return Err(IndexError::PartitionMismatch {
            partition: cp.num_states(),
            automaton: a.num_states(),
        });
    }
    let t = cp.num_chains();
    let label_bits = ceil_log2(a.sigma());
    let chain_bits = ceil_log2(t);
    if label_bits + chain_bits > 31 {
        return Err(IndexError::TooWide(t, a.sigma()));
    }
    let mut chains = Vec::with_capacity(t);
    for i in 0..t {
        let chain = cp.chain(i);
        let mut keys = Vec::new();
        let mut targets = Vec::new();
        let mut marks = Vec::with_capacity(chain.len() + 1);
        for &u in chain {
            marks.push(true);
            for &(label, v) in a.successors(u) {
                let (j, q) = cp.coords(v);
                keys.push(((label - 1) << chain_bits) | j as u32);
                targets.push(q as u32);
                marks.push(false);
            }
        }
        marks.push(true);
        let wavelet = WaveletTree::new(&keys, &targets, label_bits + chain_bits);
        let minmax = RangeMinMax::new(wavelet.leaves());
        chains.push(ChainIndex {
            states: chain.iter().map(|&u| u as u32).collect(),
            finals: BitVector::from_bits(chain.iter().map(|&u| a.is_final(u))),
            boundaries: BitVector::from_bits(marks),
            wavelet,
            minmax,
        });
    }
    Ok(PathIndex {
        alphabet: a.alphabet().clone(),
        num_states: a.num_states(),
        num_edges: a.num_edges(),
        label_bits,
        chain_bits,
        initial: cp.coords(a.initial()),
        chains,
    })
}

impl PathIndex {
    pub fn num_chains(&self) -> usize {
        self.chains.len()
    }

    pub fn num_states(&self) -> usize {
        self.num_states
    }

    pub fn num_edges(&self) -> usize {
        self.num_edges
    }

    pub fn sigma(&self) -> usize {
        self.alphabet.len()
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn chain_len(&self, i: usize) -> usize {
        self.chains[i].len()
    }

    /// `(chain, position)` of the initial state.
    pub fn initial_coords(&self) -> (usize, usize) {
        self.initial
    }

    /// State at 1-based position `k` of chain `i`.
    pub fn state_at(&self, i: usize, k: usize) -> StateId {
        self.chains[i].states[k - 1] as StateId
    }

    pub fn is_final_at(&self, i: usize, k: usize) -> bool {
        self.chains[i].finals.get(k - 1)
    }

    /// `OUT_i[k]`: `(label, target chain, target position)` for every edge
    /// leaving position `k` of chain `i`, decoded from the wavelet tree.
    pub fn out(&self, i: usize, k: usize) -> Vec<(Symbol, usize, usize)> {
        let ch = &self.chains[i];
        let (s, e) = ch.edge_range(k, k);
        let mask = (1u32 << self.chain_bits) - 1;
        (s..e)
            .map(|p| {
                let (key, q) = ch.wavelet.access(p);
                ((key >> self.chain_bits) + 1, (key & mask) as usize, q as usize)
            })
            .collect()
    }

    /// Every position of every chain.
    pub fn full(&self) -> IntervalTuple {
        IntervalTuple {
            iv: self.chains.iter().map(|c| (1, c.len())).collect(),
        }
    }

    /// Only the initial state.
    pub fn start(&self) -> IntervalTuple {
        let mut iv = IntervalTuple::empty(self.num_chains());
        let (c, p) = self.initial;
        iv.iv[c] = (p, p);
        iv
    }

    fn known(&self, a: Symbol) -> bool {
        a != SENTINEL && (a as usize) <= self.sigma()
    }

    fn finish(lo: Vec<usize>, hi: Vec<usize>) -> IntervalTuple {
        IntervalTuple {
            iv: lo
                .into_iter()
                .zip(hi)
                .map(|(m, big_m)| if big_m == 0 { EMPTY_INTERVAL } else { (m, big_m) })
                .collect(),
        }
    }

    /// Forward extension by direct scan: every edge leaving every state in
    /// the source intervals is decoded and the extreme target positions
    /// per chain are kept.
    pub fn extend(&self, iv: &IntervalTuple, a: Symbol) -> IntervalTuple {
        let t = self.num_chains();
        if !self.known(a) {
            return IntervalTuple::empty(t);
        }
        let mut lo: Vec<usize> = self.chains.iter().map(|c| c.len() + 1).collect();
        let mut hi = vec![0; t];
        for (i, &(l, r)) in iv.iv.iter().enumerate() {
            for k in l..=r {
                for (label, j, q) in self.out(i, k) {
                    if label == a {
                        lo[j] = lo[j].min(q);
                        hi[j] = hi[j].max(q);
                    }
                }
            }
        }
        Self::finish(lo, hi)
    }

    /// Same result as [`PathIndex::extend`] with logarithmic work per
    /// pair of chains: boundary select maps the source interval into
    /// `W_i`, the wavelet tree narrows it to the key `(a, j)`, and the
    /// min/max structure reads the target interval.
    pub fn extend_fast(&self, iv: &IntervalTuple, a: Symbol) -> IntervalTuple {
        let t = self.num_chains();
        if !self.known(a) {
            return IntervalTuple::empty(t);
        }
        let mut lo = vec![usize::MAX; t];
        let mut hi = vec![0; t];
        for (i, &(l, r)) in iv.iv.iter().enumerate() {
            if l > r {
                continue;
            }
            let ch = &self.chains[i];
            let (s, e) = ch.edge_range(l, r);
            if s == e {
                continue;
            }
            let wt = &ch.wavelet;
            let c = wt.descend(wt.root(s, e), a - 1, self.label_bits);
            if c.is_empty() {
                continue;
            }
            self.visit_targets(ch, c, 0, self.chain_bits, &mut |j, (x, y)| {
                let (m, big_m) = ch.minmax.query(wt.leaves(), x, y).expect("non-empty leaf range");
                lo[j] = lo[j].min(m as usize);
                hi[j] = hi[j].max(big_m as usize);
            });
        }
        Self::finish(lo, hi)
    }

    fn visit_targets(
        &self,
        ch: &ChainIndex,
        c: Cursor,
        prefix: usize,
        remaining: usize,
        f: &mut impl FnMut(usize, (usize, usize)),
    ) {
        if remaining == 0 {
            f(prefix, c.range());
            return;
        }
        for bit in [false, true] {
            let j = prefix << 1 | bit as usize;
            if j << (remaining - 1) >= self.num_chains() {
                break;
            }
            let child = ch.wavelet.child(c, bit);
            if !child.is_empty() {
                self.visit_targets(ch, child, j, remaining - 1, f);
            }
        }
    }

    fn fold(&self, mut iv: IntervalTuple, pattern: &[Symbol]) -> IntervalTuple {
        for &a in pattern {
            if iv.is_empty() {
                break;
            }
            iv = self.extend_fast(&iv, a);
        }
        iv
    }

    /// `B(pattern)`: states reached by some path whose label ends with
    /// `pattern`.
    pub fn match_anywhere(&self, pattern: &[Symbol]) -> IntervalTuple {
        self.fold(self.full(), pattern)
    }

    /// States reached from the initial state by reading `pattern`.
    pub fn match_from_start(&self, pattern: &[Symbol]) -> IntervalTuple {
        self.fold(self.start(), pattern)
    }

    pub fn count(&self, iv: &IntervalTuple) -> usize {
        iv.iv
            .iter()
            .filter(|(l, r)| l <= r)
            .map(|(l, r)| r - l + 1)
            .sum()
    }

    /// State ids in the tuple, ascending.
    pub fn locate(&self, iv: &IntervalTuple) -> Vec<StateId> {
        let mut out: Vec<StateId> = iv
            .iv
            .iter()
            .enumerate()
            .filter(|(_, (l, r))| l <= r)
            .flat_map(|(i, &(l, r))| self.chains[i].states[l - 1..r].iter().map(|&u| u as StateId))
            .collect();
        out.sort_unstable();
        out
    }

    /// Whether some state in the tuple is final.
    pub fn has_final(&self, iv: &IntervalTuple) -> bool {
        iv.iv.iter().enumerate().any(|(i, &(l, r))| {
            l <= r && {
                let f = &self.chains[i].finals;
                f.rank1(r) > f.rank1(l - 1)
            }
        })
    }

    pub fn is_member(&self, pattern: &[Symbol]) -> bool {
        self.has_final(&self.match_from_start(pattern))
    }

    /// Heap usage in 64-bit words.
    pub fn heap_words(&self) -> usize {
        self.chains.iter().map(ChainIndex::heap_words).sum::<usize>() + self.alphabet.len().div_ceil(2)
    }

    pub fn stats(&self) -> IndexStats {
        IndexStats {
            chains: self.num_chains(),
            states: self.num_states,
            edges: self.num_edges,
            sigma: self.sigma(),
            chain_lengths: self.chains.iter().map(ChainIndex::len).collect(),
            key_bits: self.label_bits + self.chain_bits,
            heap_words: self.heap_words(),
        }
    }

    pub fn serialize(&self) -> Vec<u8> {
        serial::write(self)
    }

    pub fn deserialize(bytes: &[u8]) -> Result<Self, FormatError> {
        serial::read(bytes)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automaton::fixtures::two_chains;
    use crate::automaton::{parse_nfa, run};
    use crate::colex::triangle_order;
    use crate::oracle::{gen_lp, gen_primes_nfa, gen_random_nfa, naive_b, RandomNfaParams};
    use crate::order::min_chain_partition;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn index_of(a: &Nfa) -> PathIndex {
        let cp = min_chain_partition(&triangle_order(a));
        build_index(a, &cp).unwrap()
    }

    #[test]
    fn two_chains_structure() {
        let a = two_chains();
        let idx = index_of(&a);
        assert_eq!(idx.num_chains(), 2);
        let triples: usize = (0..2)
            .map(|i| (1..=idx.chain_len(i)).map(|k| idx.out(i, k).len()).sum::<usize>())
            .sum();
        assert_eq!(triples, 9);
        // every edge comes back out of OUT exactly once
        let mut decoded = Vec::new();
        for i in 0..2 {
            for k in 1..=idx.chain_len(i) {
                for (label, j, q) in idx.out(i, k) {
                    decoded.push((idx.state_at(i, k), idx.state_at(j, q), label));
                }
            }
        }
        decoded.sort();
        let mut edges: Vec<_> = a.edges().iter().map(|e| (e.from, e.to, e.label)).collect();
        edges.sort();
        assert_eq!(decoded, edges);
    }

    #[test]
    fn two_chains_queries() {
        let a = two_chains();
        let idx = index_of(&a);
        let enc = |s: &str| a.alphabet().encode(s);
        let x = idx.match_anywhere(&enc("x"));
        assert_eq!(idx.count(&x), 2);
        assert_eq!(idx.locate(&x), vec![3, 4]);
        assert_eq!(idx.locate(&idx.extend(&x, enc("y")[0])), vec![5]);
        assert_eq!(idx.locate(&idx.extend(&idx.full(), enc("a")[0])), vec![1]);
        assert_eq!(idx.match_anywhere(&[]), idx.full());
        assert_eq!(idx.count(&idx.full()), 7);
        assert!(idx.match_anywhere(&enc("zz")).is_empty());
        assert_eq!(idx.count(&IntervalTuple::empty(2)), 0);
        assert_eq!(idx.locate(&idx.match_from_start(&enc("ax"))), vec![3, 4]);
        assert_eq!(idx.locate(&idx.match_from_start(&enc("bx"))), vec![4]);
        assert_eq!(idx.locate(&idx.match_from_start(&[])), vec![0]);
        assert_eq!(idx.locate(&idx.match_from_start(&enc("axxy"))), vec![5]);
        assert!(idx.is_member(&enc("axy")));
        assert!(!idx.is_member(&enc("ax")));
        assert!(idx.match_anywhere(&enc("q")).is_empty());
    }

    #[test]
    fn empty_tuple_stays_empty() {
        let idx = index_of(&two_chains());
        let e = IntervalTuple::empty(2);
        for a in 0..=6 {
            assert_eq!(idx.extend(&e, a), e);
            assert_eq!(idx.extend_fast(&e, a), e);
        }
    }

    #[test]
    fn trivial_and_unary_automata() {
        let single = parse_nfa("states 1\ninitial 0\nfinal 0\n").unwrap();
        let idx = index_of(&single);
        assert_eq!(idx.num_chains(), 1);
        assert_eq!(idx.num_edges(), 0);
        assert!(idx.is_member(&[]));
        assert!(!idx.is_member(&[1]));

        let lp4 = gen_lp(4);
        let idx = index_of(&lp4);
        for i in 0..idx.num_chains() {
            for k in 1..=idx.chain_len(i) {
                assert!(idx.out(i, k).iter().all(|&(label, _, _)| label == 1));
            }
        }
        let lp3 = index_of(&gen_lp(3));
        assert!(lp3.is_member(&[1, 1, 1]));
        assert!(!lp3.is_member(&[1, 1]));
    }

    #[test]
    fn partition_must_match() {
        let a = two_chains();
        let cp = ChainPartition::new(3, vec![vec![0, 1, 2]]).unwrap();
        assert_eq!(
            build_index(&a, &cp),
            Err(IndexError::PartitionMismatch {
                partition: 3,
                automaton: 7
            })
        );
    }

    #[test]
    fn agrees_with_oracles_on_random_automata() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let mut corpus = vec![two_chains(), gen_primes_nfa(&[2, 3]), gen_lp(5).into_nfa()];
        for seed in 0..40 {
            corpus.push(
                gen_random_nfa(&RandomNfaParams {
                    states: 10,
                    labels: 3,
                    density: 0.2,
                    seed,
                    deterministic: seed % 3 == 0,
                })
                .unwrap(),
            );
        }
        for a in &corpus {
            let idx = index_of(a);
            for _ in 0..100 {
                let len = rng.gen_range(0..6);
                let p: Vec<Symbol> = (0..len).map(|_| rng.gen_range(1..=a.sigma() as Symbol)).collect();
                assert_eq!(idx.locate(&idx.match_anywhere(&p)), naive_b(a, &p), "{p:?}");
                let from_s = run(a, &[a.initial()], &p);
                assert_eq!(idx.locate(&idx.match_from_start(&p)), from_s);
                assert_eq!(idx.is_member(&p), from_s.iter().any(|&u| a.is_final(u)));
                let mut iv = idx.full();
                for &c in &p {
                    let slow = idx.extend(&iv, c);
                    assert_eq!(slow, idx.extend_fast(&iv, c));
                    iv = slow;
                }
            }
        }
    }

    #[test]
    fn space_is_linear() {
        for seed in 0..20 {
            let a = gen_random_nfa(&RandomNfaParams {
                states: 30,
                labels: 4,
                density: 0.15,
                seed,
                deterministic: false,
            })
            .unwrap();
            let idx = index_of(&a);
            let budget = 16 * (a.num_edges() + a.num_states()) + 64 * idx.num_chains();
            assert!(idx.heap_words() <= budget, "{} > {budget}", idx.heap_words());
        }
    }
}
