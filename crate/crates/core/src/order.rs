//! Partial-order utilities: closure, acyclicity, Dilworth width, minimum
//! chain partitions, antichains and convexity.

use std::collections::VecDeque;

use thiserror::Error;

use crate::automaton::StateId;
use crate::relation::{PartialOrder, Relation};

/// Smallest reflexive and transitive superset of `rel` (bit-parallel
/// Warshall). Cycles in `rel` survive as symmetric pairs.
pub fn transitive_reflexive_closure(rel: &Relation) -> Relation {
    let mut out = rel.clone();
    let n = out.len();
    for k in 0..n {
        for i in 0..n {
            if i != k && out.contains(i, k) {
                out.or_row_into(k, i);
            }
        }
    }
    out.clear_diagonal();
    out.set_reflexive(true);
    out
}

/// True iff the strict pairs contain no directed cycle (Kahn peeling).
pub fn is_acyclic(rel: &Relation) -> bool {
    let n = rel.len();
    let mut indeg = vec![0usize; n];
    for (_, v) in rel.pairs() {
        indeg[v] += 1;
    }
    let mut queue: Vec<StateId> = (0..n).filter(|&u| indeg[u] == 0).collect();
    let mut removed = 0;
    while let Some(u) = queue.pop() {
        removed += 1;
        for v in rel.successors(u) {
            indeg[v] -= 1;
            if indeg[v] == 0 {
                queue.push(v);
            }
        }
    }
    removed == n
}

/// Maximum matching in a bipartite graph with `n` left and `n` right
/// vertices (Hopcroft–Karp).
struct Matching {
    left: Vec<Option<usize>>,
    right: Vec<Option<usize>>,
    size: usize,
}

fn hopcroft_karp(n: usize, adj: &[Vec<usize>]) -> Matching {
    const INF: usize = usize::MAX;
    let mut left: Vec<Option<usize>> = vec![None; n];
    let mut right: Vec<Option<usize>> = vec![None; n];
    let mut dist = vec![INF; n];
    let mut size = 0;

    loop {
        // layer the graph from free left vertices
        let mut queue = VecDeque::new();
        for u in 0..n {
            if left[u].is_none() {
                dist[u] = 0;
                queue.push_back(u);
            } else {
                dist[u] = INF;
            }
        }
        let mut found = false;
        while let Some(u) = queue.pop_front() {
            for &v in &adj[u] {
                match right[v] {
                    None => found = true,
                    Some(w) if dist[w] == INF => {
                        dist[w] = dist[u] + 1;
                        queue.push_back(w);
                    }
                    _ => {}
                }
            }
        }
        if !found {
            break;
        }
        // iterative DFS along the layers
        let mut it = vec![0usize; n];
        for root in 0..n {
            if left[root].is_some() {
                continue;
            }
            let mut stack = vec![root];
            while let Some(&u) = stack.last() {
                if it[u] == adj[u].len() {
                    dist[u] = INF;
                    stack.pop();
                    continue;
                }
                let v = adj[u][it[u]];
                it[u] += 1;
                match right[v] {
                    None => {
                        // augment along the stack
                        let mut v = v;
                        for &x in stack.iter().rev() {
                            let prev = left[x];
                            left[x] = Some(v);
                            right[v] = Some(x);
                            match prev {
                                Some(p) => v = p,
                                None => break,
                            }
                        }
                        size += 1;
                        break;
                    }
                    Some(w) if dist[w] == dist[u] + 1 => stack.push(w),
                    _ => {}
                }
            }
        }
    }
    Matching { left, right, size }
}

fn comparability_matching(ord: &PartialOrder) -> Matching {
    let n = ord.len();
    let adj: Vec<Vec<usize>> = (0..n)
        .map(|u| ord.relation().successors(u).collect())
        .collect();
    hopcroft_karp(n, &adj)
}

/// Width of the order: size of a minimum chain cover, computed as
/// `n - |maximum matching|` over the strict comparability pairs.
pub fn order_width(ord: &PartialOrder) -> usize {
    ord.len() - comparability_matching(ord).size
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PartitionError {
    #[error("state {0} appears in more than one chain")]
    Duplicate(StateId),
    #[error("state {0} is not covered by any chain")]
    Missing(StateId),
    #[error("state {0} out of range")]
    OutOfRange(StateId),
    #[error("chain {0} is empty")]
    EmptyChain(usize),
}

/// A partition of `0..n` into sequences. Chain ids are 0-based; positions
/// inside a chain are 1-based, so `chains()[i][k - 1]` sits at position `k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChainPartition {
    chains: Vec<Vec<StateId>>,
    coords: Vec<(usize, usize)>,
}

impl ChainPartition {
    pub fn new(num_states: usize, chains: Vec<Vec<StateId>>) -> Result<Self, PartitionError> {
        let mut coords = vec![(usize::MAX, 0); num_states];
        for (i, chain) in chains.iter().enumerate() {
            if chain.is_empty() {
                return Err(PartitionError::EmptyChain(i));
            }
            for (k, &u) in chain.iter().enumerate() {
                if u >= num_states {
                    return Err(PartitionError::OutOfRange(u));
                }
                if coords[u].0 != usize::MAX {
                    return Err(PartitionError::Duplicate(u));
                }
                coords[u] = (i, k + 1);
            }
        }
        if let Some(u) = coords.iter().position(|c| c.0 == usize::MAX) {
            return Err(PartitionError::Missing(u));
        }
        Ok(Self { chains, coords })
    }

    pub fn num_chains(&self) -> usize {
        self.chains.len()
    }

    pub fn num_states(&self) -> usize {
        self.coords.len()
    }

    pub fn chains(&self) -> &[Vec<StateId>] {
        &self.chains
    }

    pub fn chain(&self, i: usize) -> &[StateId] {
        &self.chains[i]
    }

    /// `(chain, position)` of a state.
    pub fn coords(&self, u: StateId) -> (usize, usize) {
        self.coords[u]
    }

    /// Whether every chain is sorted increasingly by `ord`.
    pub fn respects(&self, ord: &PartialOrder) -> bool {
        ord.len() == self.num_states()
            && self
                .chains
                .iter()
                .all(|c| c.windows(2).all(|w| ord.less(w[0], w[1])))
    }
}

/// Minimum chain partition read off a maximum matching: each state links to
/// its matched successor. Chains are listed by ascending minimum state id.
pub fn min_chain_partition(ord: &PartialOrder) -> ChainPartition {
    let n = ord.len();
    let m = comparability_matching(ord);
    let mut chains: Vec<Vec<StateId>> = Vec::new();
    for start in 0..n {
        if m.right[start].is_some() {
            continue;
        }
        let mut chain = vec![start];
        let mut u = start;
        while let Some(v) = m.left[u] {
            chain.push(v);
            u = v;
        }
        chains.push(chain);
    }
    chains.sort_by_key(|c| *c.iter().min().expect("chains are nonempty"));
    ChainPartition::new(n, chains).expect("matching chains partition the states")
}

/// A largest antichain, via König's theorem on the comparability matching.
pub fn max_antichain(ord: &PartialOrder) -> Vec<StateId> {
    let n = ord.len();
    let m = comparability_matching(ord);
    // alternating search from free left vertices
    let mut left_seen = vec![false; n];
    let mut right_seen = vec![false; n];
    let mut queue: VecDeque<StateId> = (0..n).filter(|&u| m.left[u].is_none()).collect();
    for &u in &queue {
        left_seen[u] = true;
    }
    while let Some(u) = queue.pop_front() {
        for v in ord.relation().successors(u) {
            if right_seen[v] || m.left[u] == Some(v) {
                continue;
            }
            right_seen[v] = true;
            if let Some(w) = m.right[v] {
                if !left_seen[w] {
                    left_seen[w] = true;
                    queue.push_back(w);
                }
            }
        }
    }
    // minimum vertex cover = (L \ seen) ∪ (R ∩ seen); its complement in both sides is the antichain
    (0..n)
        .filter(|&x| left_seen[x] && !right_seen[x])
        .collect()
}

/// Literal convexity test: no `v` outside `set` lies strictly between two
/// members of `set`.
pub fn is_convex(ord: &PartialOrder, set: &[StateId]) -> bool {
    let n = ord.len();
    let mut member = vec![false; n];
    for &u in set {
        member[u] = true;
    }
    (0..n).filter(|&v| !member[v]).all(|v| {
        let below = set.iter().any(|&u| ord.less(u, v));
        let above = set.iter().any(|&z| ord.less(v, z));
        !(below && above)
    })
}
