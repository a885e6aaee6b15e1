//! Co-lex orders on automata and the polynomial-time order ⊴.
//!
//! A co-lex order is a partial order on states such that
//!
//! 1. states with a smaller incoming label come first, and
//! 2. whenever `u < v` share an incoming label, every predecessor of `u`
//!    is `≤` every predecessor of `v` (along equally labeled edges).
//!
//! [`closure_with_pair`] decides whether some co-lex order contains a given
//! pair, [`rho_exists`] collects every such pair, and [`build_triangle`]
//! turns that relation into a partial order whose width never exceeds the
//! automaton's width and whose states reached by a common suffix form
//! convex sets.

use rayon::prelude::*;
use thiserror::Error;

use crate::automaton::{Nfa, StateId};
use crate::order::{is_acyclic, transitive_reflexive_closure};
use crate::relation::{PartialOrder, Relation};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ColexViolation {
    /// `λ(u) ≺ λ(v)` but not `u < v`.
    LabelOrder { u: StateId, v: StateId },
    /// `u < v` with equal labels, yet predecessors `u_pred` of `u` and
    /// `v_pred` of `v` violate `u_pred ≤ v_pred`.
    Predecessors {
        u: StateId,
        v: StateId,
        u_pred: StateId,
        v_pred: StateId,
    },
}

impl ColexViolation {
    pub fn axiom(&self) -> u8 {
        match self {
            ColexViolation::LabelOrder { .. } => 1,
            ColexViolation::Predecessors { .. } => 2,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ColexCertificate {
    Ok,
    Violation(ColexViolation),
}

impl ColexCertificate {
    pub fn is_ok(&self) -> bool {
        matches!(self, ColexCertificate::Ok)
    }
}

/// Checks both co-lex axioms for `ord` on `a`, returning the first witness
/// of a violation.
pub fn check_colex(a: &Nfa, ord: &PartialOrder) -> ColexCertificate {
    let n = a.num_states();
    assert_eq!(ord.len(), n, "order and automaton sizes differ");
    let labels = a.labels();
    for u in 0..n {
        for v in 0..n {
            if labels[u] < labels[v] && !ord.less(u, v) {
                return ColexCertificate::Violation(ColexViolation::LabelOrder { u, v });
            }
        }
    }
    for u in 0..n {
        for v in ord.relation().successors(u) {
            if labels[u] != labels[v] {
                continue;
            }
            for &(lu, up) in a.predecessors(u) {
                for &(lv, vp) in a.predecessors(v) {
                    if lu == lv && !ord.leq(up, vp) {
                        return ColexCertificate::Violation(ColexViolation::Predecessors {
                            u,
                            v,
                            u_pred: up,
                            v_pred: vp,
                        });
                    }
                }
            }
        }
    }
    ColexCertificate::Ok
}

/// The relation forced on every co-lex order that contains `(u, v)`, or
/// `None` when no co-lex order contains `(u, v)`.
///
/// Seeds the relation with `(u, v)` and all label-forced pairs, then walks
/// a stack of pairs backwards along equally labeled edges. A reversed pair
/// already present aborts immediately; otherwise the final relation is
/// returned only if it is acyclic. The reflexive-transitive closure of a
/// returned relation is a co-lex order containing `(u, v)`.
pub fn closure_with_pair(a: &Nfa, u: StateId, v: StateId) -> Option<Relation> {
    closure_with_picker(a, u, v, |len| len - 1)
}

/// As [`closure_with_pair`], but `pick(len)` chooses which of the `len`
/// pending pairs is processed next. Used to check that the result does not
/// depend on the processing order.
pub(crate) fn closure_with_picker(
    a: &Nfa,
    u: StateId,
    v: StateId,
    mut pick: impl FnMut(usize) -> usize,
) -> Option<Relation> {
    assert_ne!(u, v, "closure_with_pair needs two distinct states");
    let n = a.num_states();
    let mut rho = Relation::new(n);
    let mut stack = Vec::new();
    rho.insert(u, v);
    stack.push((u, v));

    // label-forced pairs
    let labels = a.labels();
    let mut by_label: Vec<StateId> = (0..n).collect();
    by_label.sort_by_key(|&q| labels[q]);
    for (i, &x) in by_label.iter().enumerate() {
        for &y in &by_label[i + 1..] {
            if labels[x] < labels[y] {
                rho.insert(x, y);
            }
        }
    }

    while !stack.is_empty() {
        let k = pick(stack.len());
        let (x, y) = stack.swap_remove(k);
        for &(lx, xp) in a.predecessors(x) {
            for &(ly, yp) in a.predecessors(y) {
                if lx != ly || xp == yp {
                    continue;
                }
                if rho.contains(yp, xp) {
                    return None;
                }
                if rho.insert(xp, yp) {
                    stack.push((xp, yp));
                }
            }
        }
    }

    is_acyclic(&rho).then_some(rho)
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct RhoOptions {
    /// Once a pair's closure is found nonempty, mark every strict pair of
    /// its reflexive-transitive closure as belonging to ρ_∃ without running
    /// the closure on them.
    pub seed_from_closures: bool,
}

/// ρ_∃: every ordered pair of distinct states contained in some co-lex
/// order.
pub fn rho_exists(a: &Nfa) -> Relation {
    rho_exists_with(a, RhoOptions::default())
}

pub fn rho_exists_with(a: &Nfa, opts: RhoOptions) -> Relation {
    let n = a.num_states();
    let mut rho = Relation::new(n);
    if opts.seed_from_closures {
        let mut decided = Relation::new(n);
        for u in 0..n {
            for v in 0..n {
                if u == v || decided.contains(u, v) {
                    continue;
                }
                decided.insert(u, v);
                if let Some(r) = closure_with_pair(a, u, v) {
                    let order = transitive_reflexive_closure(&r);
                    for (x, y) in order.pairs() {
                        rho.insert(x, y);
                        decided.insert(x, y);
                    }
                }
            }
        }
    } else {
        let rows: Vec<Vec<StateId>> = (0..n)
            .into_par_iter()
            .map(|u| {
                (0..n)
                    .filter(|&v| v != u && closure_with_pair(a, u, v).is_some())
                    .collect()
            })
            .collect();
        for (u, row) in rows.into_iter().enumerate() {
            for v in row {
                rho.insert(u, v);
            }
        }
    }
    rho
}

/// Strongly connected components of a relation viewed as a digraph.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Components {
    /// Component id per element; ids are assigned in order of each
    /// component's smallest element.
    pub of: Vec<usize>,
    pub count: usize,
}

impl Components {
    pub fn same(&self, u: StateId, v: StateId) -> bool {
        self.of[u] == self.of[v]
    }
}

/// Tarjan's algorithm, iterative.
pub fn scc(rel: &Relation) -> Components {
    let n = rel.len();
    const NONE: usize = usize::MAX;
    let mut index = vec![NONE; n];
    let mut low = vec![0; n];
    let mut on_stack = vec![false; n];
    let mut stack = Vec::new();
    let mut raw = vec![NONE; n];
    let mut count = 0;
    let mut next_index = 0;
    let succ: Vec<Vec<StateId>> = (0..n).map(|u| rel.successors(u).collect()).collect();

    for root in 0..n {
        if index[root] != NONE {
            continue;
        }
        let mut call: Vec<(StateId, usize)> = vec![(root, 0)];
        index[root] = next_index;
        low[root] = next_index;
        next_index += 1;
        stack.push(root);
        on_stack[root] = true;
        while let Some(&mut (u, ref mut pos)) = call.last_mut() {
            if *pos < succ[u].len() {
                let w = succ[u][*pos];
                *pos += 1;
                if index[w] == NONE {
                    index[w] = next_index;
                    low[w] = next_index;
                    next_index += 1;
                    stack.push(w);
                    on_stack[w] = true;
                    call.push((w, 0));
                } else if on_stack[w] {
                    low[u] = low[u].min(index[w]);
                }
            } else {
                call.pop();
                if let Some(&(parent, _)) = call.last() {
                    low[parent] = low[parent].min(low[u]);
                }
                if low[u] == index[u] {
                    loop {
                        let w = stack.pop().expect("tarjan stack holds the component");
                        on_stack[w] = false;
                        raw[w] = count;
                        if w == u {
                            break;
                        }
                    }
                    count += 1;
                }
            }
        }
    }

    // renumber by smallest member
    let mut remap = vec![NONE; count];
    let mut next = 0;
    let mut of = vec![0; n];
    for u in 0..n {
        if remap[raw[u]] == NONE {
            remap[raw[u]] = next;
            next += 1;
        }
        of[u] = remap[raw[u]];
    }
    Components { of, count }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TriangleError {
    #[error("enumeration has length {got}, expected {expected}")]
    EnumerationLength { got: usize, expected: usize },
    #[error("enumeration is not a permutation (rank {0} repeated or out of range)")]
    NotPermutation(usize),
}

/// Everything computed on the way to ⊴.
#[derive(Clone, Debug)]
pub struct Triangle {
    pub rho_exists: Relation,
    pub classes: Components,
    pub order: PartialOrder,
}

/// Builds ⊴ for the given enumeration. `rank[q]` is the position of state
/// `q` in the enumeration; it must be a permutation of `0..n`.
///
/// Inside a strongly connected component of ρ_∃ states are ordered by rank;
/// across components ρ_∃ decides. ⊴ is the reflexive-transitive closure of
/// that relation.
pub fn compute_triangle(a: &Nfa, rank: &[usize]) -> Result<Triangle, TriangleError> {
    compute_triangle_with(a, rank, RhoOptions::default())
}

pub fn compute_triangle_with(
    a: &Nfa,
    rank: &[usize],
    opts: RhoOptions,
) -> Result<Triangle, TriangleError> {
    let n = a.num_states();
    if rank.len() != n {
        return Err(TriangleError::EnumerationLength {
            got: rank.len(),
            expected: n,
        });
    }
    let mut seen = vec![false; n];
    for &r in rank {
        if r >= n || seen[r] {
            return Err(TriangleError::NotPermutation(r));
        }
        seen[r] = true;
    }

    let rho = rho_exists_with(a, opts);
    let classes = scc(&rho);
    let mut r = Relation::new(n);
    for u in 0..n {
        for v in 0..n {
            if u == v {
                continue;
            }
            let related = if classes.same(u, v) {
                rank[u] < rank[v]
            } else {
                rho.contains(u, v)
            };
            if related {
                r.insert(u, v);
            }
        }
    }
    let closed = transitive_reflexive_closure(&r);
    let order = match PartialOrder::certify(closed) {
        Ok(o) => o,
        Err(e) => panic!("⊴ must be a partial order, closure check failed: {e}"),
    };
    Ok(Triangle {
        rho_exists: rho,
        classes,
        order,
    })
}

/// ⊴ under the given enumeration (see [`compute_triangle`]).
pub fn build_triangle(a: &Nfa, rank: &[usize]) -> Result<PartialOrder, TriangleError> {
    compute_triangle(a, rank).map(|t| t.order)
}

/// ⊴ under the identity enumeration (state ids in input order).
pub fn triangle_order(a: &Nfa) -> PartialOrder {
    let rank: Vec<usize> = (0..a.num_states()).collect();
    build_triangle(a, &rank).expect("identity is a permutation")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automaton::fixtures::two_chains;
    use crate::automaton::parse_nfa;
    use crate::oracle::{colex_pair_union, gen_lp, gen_random_nfa, EnumerationBudget, RandomNfaParams};
    use crate::order::{max_antichain, min_chain_partition, order_width};
    use rand::{Rng, SeedableRng};

    fn two_chains_witness_order() -> PartialOrder {
        let a = two_chains();
        let labels = a.labels();
        let mut r = Relation::from_pairs(7, [(0, 1), (1, 3), (3, 5), (0, 2), (2, 4), (4, 6)]);
        for u in 0..7 {
            for v in 0..7 {
                if labels[u] < labels[v] {
                    r.insert(u, v);
                }
            }
        }
        PartialOrder::certify(transitive_reflexive_closure(&r)).unwrap()
    }

    /// Independent fixpoint: apply both closure rules to a pair set until
    /// nothing changes, with no worklist.
    fn naive_closure(a: &Nfa, u: StateId, v: StateId) -> Option<Relation> {
        let n = a.num_states();
        let labels = a.labels();
        let mut pairs = vec![vec![false; n]; n];
        pairs[u][v] = true;
        for x in 0..n {
            for y in 0..n {
                if labels[x] < labels[y] {
                    pairs[x][y] = true;
                }
            }
        }
        loop {
            let mut changed = false;
            for x in 0..n {
                for y in 0..n {
                    if !pairs[x][y] || labels[x] != labels[y] {
                        continue;
                    }
                    for e in a.edges().iter().filter(|e| e.to == x) {
                        for f in a.edges().iter().filter(|f| f.to == y) {
                            if e.from != f.from && !pairs[e.from][f.from] {
                                pairs[e.from][f.from] = true;
                                changed = true;
                            }
                        }
                    }
                }
            }
            if !changed {
                break;
            }
        }
        let rel = Relation::from_pairs(
            n,
            (0..n).flat_map(|x| (0..n).map(move |y| (x, y))).filter(|&(x, y)| x != y && pairs[x][y]),
        );
        let closed = transitive_reflexive_closure(&rel);
        closed.is_antisymmetric().then_some(rel)
    }

    #[test]
    fn two_chains_witness_is_colex() {
        assert!(check_colex(&two_chains(), &two_chains_witness_order()).is_ok());
    }

    #[test]
    fn two_chains_states_3_and_4_are_never_comparable() {
        let a = two_chains();
        assert!(closure_with_pair(&a, 3, 4).is_none());
        assert!(closure_with_pair(&a, 4, 3).is_none());
        let mut r = two_chains_witness_order().into_relation();
        r.insert(3, 4);
        let ord = PartialOrder::certify(transitive_reflexive_closure(&r)).unwrap();
        assert!(!check_colex(&a, &ord).is_ok());
    }

    #[test]
    fn identity_order_breaks_label_axiom() {
        let cert = check_colex(&two_chains(), &PartialOrder::antichain(7));
        match cert {
            ColexCertificate::Violation(v) => assert_eq!(v.axiom(), 1),
            ColexCertificate::Ok => panic!("identity order accepted"),
        }
    }

    #[test]
    fn closure_of_two_chains_pair_1_2() {
        let a = two_chains();
        let rho = closure_with_pair(&a, 1, 2).expect("a co-lex order relates 1 and 2");
        assert_eq!(Some(rho.clone()), naive_closure(&a, 1, 2));
        let ord = PartialOrder::certify(transitive_reflexive_closure(&rho)).unwrap();
        assert!(ord.less(1, 2));
        assert!(check_colex(&a, &ord).is_ok());
    }

    #[test]
    fn two_cycle_pairs_are_rejected() {
        // 0 -a-> 1 -a-> 2 -a-> 1
        let a = parse_nfa("states 3\ninitial 0\nfinal 2\nedge 0 1 a\nedge 1 2 a\nedge 2 1 a\n").unwrap();
        assert!(closure_with_pair(&a, 1, 2).is_none());
        assert!(closure_with_pair(&a, 2, 1).is_none());
    }

    #[test]
    fn rho_exists_on_two_chains() {
        let a = two_chains();
        let rho = rho_exists(&a);
        assert!(!rho.contains(3, 4) && !rho.contains(4, 3));
        let labels = a.labels();
        for u in 0..7 {
            for v in 0..7 {
                if labels[u] < labels[v] {
                    assert!(rho.contains(u, v), "({u},{v})");
                }
            }
        }
        let classes = scc(&rho);
        assert_eq!(classes.count, 7);
        // oracle: no two states mutually reachable in the transitive closure
        let closed = transitive_reflexive_closure(&rho);
        assert!(closed.is_antisymmetric());
        assert!(is_acyclic(&rho));
    }

    #[test]
    fn rho_exists_on_a_three_cycle() {
        let a = gen_lp(3);
        let rho = rho_exists(&a);
        let union = colex_pair_union(&a, &EnumerationBudget::default()).unwrap();
        for u in 1..4 {
            for v in 1..4 {
                if u != v {
                    assert!(!rho.contains(u, v));
                    assert!(!union.contains(u, v));
                }
            }
        }
    }

    #[test]
    fn scc_basics() {
        let c = scc(&Relation::from_pairs(4, [(1, 2), (2, 1)]));
        assert_eq!(c.count, 3);
        assert!(c.same(1, 2));
        assert!(!c.same(0, 1));
        let c = scc(&Relation::from_pairs(4, [(0, 1), (1, 2), (2, 3)]));
        assert_eq!(c.count, 4);
        let c = scc(&Relation::from_pairs(5, [(0, 1), (1, 2), (2, 0), (3, 4), (4, 3)]));
        assert_eq!(c.of, vec![0, 0, 0, 1, 1]);
    }

    #[test]
    fn triangle_on_two_chains() {
        let a = two_chains();
        let ord = triangle_order(&a);
        assert_eq!(order_width(&ord), 2);
        let cp = min_chain_partition(&ord);
        assert_eq!(cp.num_chains(), 2);
        assert_ne!(cp.coords(3).0, cp.coords(4).0);
        let mut anti = max_antichain(&ord);
        anti.sort_unstable();
        assert_eq!(anti.len(), 2);
        assert!(!ord.comparable(anti[0], anti[1]));
        assert!(!ord.comparable(3, 4));
    }

    #[test]
    fn triangle_on_lp3_has_width_3() {
        let ord = triangle_order(&gen_lp(3));
        assert_eq!(order_width(&ord), 3);
        assert!(check_colex(&gen_lp(3), &ord).is_ok());
    }

    #[test]
    fn triangle_on_a_single_state() {
        let a = parse_nfa("states 1\ninitial 0\nfinal 0\n").unwrap();
        let ord = triangle_order(&a);
        assert_eq!(ord.len(), 1);
        assert_eq!(order_width(&ord), 1);
    }

    #[test]
    fn bad_enumerations() {
        let a = two_chains();
        assert!(matches!(
            build_triangle(&a, &[0, 1, 2]),
            Err(TriangleError::EnumerationLength { .. })
        ));
        assert!(matches!(
            build_triangle(&a, &[0, 1, 2, 3, 4, 5, 5]),
            Err(TriangleError::NotPermutation(5))
        ));
    }

    #[test]
    fn closure_is_independent_of_processing_order() {
        for seed in 0..60u64 {
            let a = gen_random_nfa(&RandomNfaParams {
                states: 7,
                labels: 2,
                density: 0.4,
                seed,
                deterministic: false,
            })
            .unwrap();
            let n = a.num_states();
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            for u in 0..n {
                for v in 0..n {
                    if u == v {
                        continue;
                    }
                    let reference = closure_with_pair(&a, u, v);
                    assert_eq!(reference, naive_closure(&a, u, v), "seed {seed} ({u},{v})");
                    for _ in 0..3 {
                        let shuffled = closure_with_picker(&a, u, v, |len| rng.gen_range(0..len));
                        assert_eq!(reference, shuffled);
                    }
                }
            }
        }
    }

    #[test]
    fn closure_seeding_matches_reference() {
        for seed in 0..40u64 {
            let a = gen_random_nfa(&RandomNfaParams {
                states: 8,
                labels: 3,
                density: 0.3,
                seed,
                deterministic: false,
            })
            .unwrap();
            let plain = rho_exists(&a);
            let seeded = rho_exists_with(&a, RhoOptions { seed_from_closures: true });
            assert_eq!(plain, seeded, "seed {seed}");
        }
    }

    #[test]
    fn triangle_is_colex_on_dfas() {
        for seed in 0..40u64 {
            let a = gen_random_nfa(&RandomNfaParams {
                states: 7,
                labels: 2,
                density: 0.4,
                seed,
                deterministic: true,
            })
            .unwrap();
            assert!(a.is_deterministic());
            let ord = triangle_order(&a);
            assert!(check_colex(&a, &ord).is_ok(), "seed {seed}");
        }
    }
}
