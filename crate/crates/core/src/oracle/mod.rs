//! Brute-force reference implementations and automaton generators.
//!
//! Everything here is deliberately naive and shares no code path with the
//! polynomial algorithms it is used to check, apart from the automaton
//! representation itself.

mod gen;

use std::ops::ControlFlow;

use thiserror::Error;

use crate::automaton::{Nfa, StateId, Symbol};
use crate::order::order_width;
use crate::relation::{PartialOrder, Relation};

pub use gen::{gen_layered, gen_lp, gen_primes_nfa, gen_random_nfa, GenError, LayeredNfa, LayeredParams, RandomNfaParams};

/// Hard limits for the exponential searches.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EnumerationBudget {
    pub max_states: usize,
    pub max_pattern_len: usize,
    /// The enumeration fails rather than truncating once this many orders
    /// have been produced.
    pub max_orders: usize,
}

impl Default for EnumerationBudget {
    fn default() -> Self {
        Self {
            max_states: 5,
            max_pattern_len: 8,
            max_orders: 200_000,
        }
    }
}

impl EnumerationBudget {
    pub fn with_max_states(mut self, max_states: usize) -> Self {
        self.max_states = max_states;
        self
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BudgetError {
    #[error("{states} states exceed the enumeration budget of {max}")]
    TooManyStates { states: usize, max: usize },
    #[error("more than {0} co-lex orders; enumeration aborted")]
    TooManyOrders(usize),
    #[error("pattern length {len} exceeds the budget of {max}")]
    PatternTooLong { len: usize, max: usize },
}

/// States reached by some path whose label ends with `pattern`: the union
/// of `δ(u, pattern)` over all states `u`.
pub fn naive_b(a: &Nfa, pattern: &[Symbol]) -> Vec<StateId> {
    let all: Vec<StateId> = (0..a.num_states()).collect();
    crate::automaton::run(a, &all, pattern)
}

/// Second oracle for the same set: walk each state backwards over the
/// reversed pattern using the raw edge list.
pub fn naive_b_backward(a: &Nfa, pattern: &[Symbol]) -> Vec<StateId> {
    let n = a.num_states();
    (0..n)
        .filter(|&v| {
            let mut frontier = vec![false; n];
            frontier[v] = true;
            for &sym in pattern.iter().rev() {
                let mut prev = vec![false; n];
                let mut any = false;
                for e in a.edges() {
                    if e.label == sym && frontier[e.to] {
                        prev[e.from] = true;
                        any = true;
                    }
                }
                if !any {
                    return false;
                }
                frontier = prev;
            }
            true
        })
        .collect()
}

const MAX_ENUM_STATES: usize = 16;

struct Search<'a> {
    a: &'a Nfa,
    labels: Vec<Symbol>,
    pairs: Vec<(StateId, StateId)>,
}

#[derive(Clone)]
struct Partial {
    lt: Vec<u32>,
    incomparable: Vec<u32>,
}

impl Partial {
    fn less(&self, x: StateId, y: StateId) -> bool {
        self.lt[x] >> y & 1 == 1
    }

    fn decided(&self, x: StateId, y: StateId) -> bool {
        self.less(x, y) || self.less(y, x) || self.incomparable[x] >> y & 1 == 1
    }
}

impl Search<'_> {
    /// Adds `x < y` and everything transitivity and the predecessor axiom
    /// force; false on a contradiction.
    fn add(&self, st: &mut Partial, x: StateId, y: StateId) -> bool {
        let n = self.labels.len();
        let mut work = vec![(x, y)];
        while let Some((x, y)) = work.pop() {
            if x == y || st.less(y, x) || st.incomparable[x] >> y & 1 == 1 {
                return false;
            }
            if st.less(x, y) {
                continue;
            }
            st.lt[x] |= 1 << y;
            for w in 0..n {
                if st.less(w, x) {
                    work.push((w, y));
                }
                if st.less(y, w) {
                    work.push((x, w));
                }
            }
            if self.labels[x] == self.labels[y] {
                for &(lx, xp) in self.a.predecessors(x) {
                    for &(ly, yp) in self.a.predecessors(y) {
                        if lx == ly && xp != yp {
                            work.push((xp, yp));
                        }
                    }
                }
            }
        }
        true
    }

    fn run(
        &self,
        st: Partial,
        from: usize,
        visit: &mut dyn FnMut(&Partial) -> ControlFlow<()>,
    ) -> ControlFlow<()> {
        let Some(k) = (from..self.pairs.len()).find(|&k| {
            let (x, y) = self.pairs[k];
            !st.decided(x, y)
        }) else {
            return visit(&st);
        };
        let (x, y) = self.pairs[k];
        let mut forward = st.clone();
        if self.add(&mut forward, x, y) {
            self.run(forward, k + 1, visit)?;
        }
        let mut backward = st.clone();
        if self.add(&mut backward, y, x) {
            self.run(backward, k + 1, visit)?;
        }
        let mut apart = st;
        apart.incomparable[x] |= 1 << y;
        apart.incomparable[y] |= 1 << x;
        self.run(apart, k + 1, visit)
    }
}

fn to_order(st: &Partial) -> PartialOrder {
    let n = st.lt.len();
    let mut rel = Relation::new(n);
    for x in 0..n {
        for y in 0..n {
            if st.less(x, y) {
                rel.insert(x, y);
            }
        }
    }
    rel.set_reflexive(true);
    PartialOrder::certify(rel).expect("enumerated relations are closed partial orders")
}

/// Calls `visit` on every co-lex order of `a`, each exactly once. Returns
/// how many were visited.
///
/// The search branches on each undecided pair of states (`x < y`, `y < x`,
/// incomparable) after seeding the label-forced pairs, propagating
/// transitivity and the predecessor axiom after every decision.
pub fn for_each_colex_order(
    a: &Nfa,
    budget: &EnumerationBudget,
    mut visit: impl FnMut(&PartialOrder),
) -> Result<usize, BudgetError> {
    let n = a.num_states();
    let max = budget.max_states.min(MAX_ENUM_STATES);
    if n > max {
        return Err(BudgetError::TooManyStates { states: n, max });
    }
    let search = Search {
        a,
        labels: a.labels(),
        pairs: (0..n)
            .flat_map(|x| (x + 1..n).map(move |y| (x, y)))
            .collect(),
    };
    let mut st = Partial {
        lt: vec![0; n],
        incomparable: vec![0; n],
    };
    for x in 0..n {
        for y in 0..n {
            if search.labels[x] < search.labels[y] && !search.add(&mut st, x, y) {
                // label-forced pairs alone cannot conflict on input-consistent automata
                return Ok(0);
            }
        }
    }
    let mut count = 0usize;
    let mut overflow = false;
    let _ = search.run(st, 0, &mut |p| {
        count += 1;
        if count > budget.max_orders {
            overflow = true;
            return ControlFlow::Break(());
        }
        visit(&to_order(p));
        ControlFlow::Continue(())
    });
    if overflow {
        return Err(BudgetError::TooManyOrders(budget.max_orders));
    }
    Ok(count)
}

/// Every co-lex order of `a`, in search order.
pub fn enumerate_colex_orders(
    a: &Nfa,
    budget: &EnumerationBudget,
) -> Result<Vec<PartialOrder>, BudgetError> {
    let mut out = Vec::new();
    for_each_colex_order(a, budget, |o| out.push(o.clone()))?;
    Ok(out)
}

/// Strict pairs that occur in at least one co-lex order.
pub fn colex_pair_union(a: &Nfa, budget: &EnumerationBudget) -> Result<Relation, BudgetError> {
    let n = a.num_states();
    let mut union = Relation::new(n);
    for_each_colex_order(a, budget, |o| {
        for (u, v) in o.relation().pairs() {
            union.insert(u, v);
        }
    })?;
    Ok(union)
}

/// Smallest width of a co-lex order on `a`.
pub fn exact_width(a: &Nfa, budget: &EnumerationBudget) -> Result<usize, BudgetError> {
    let mut best = usize::MAX;
    for_each_colex_order(a, budget, |o| best = best.min(order_width(o)))?;
    Ok(best)
}

/// Largest antichain by exhaustive branch-and-bound; for small orders only.
pub fn brute_max_antichain(ord: &PartialOrder) -> Vec<StateId> {
    let n = ord.len();
    assert!(n <= 24, "brute-force antichain search limited to 24 elements");
    fn go(
        ord: &PartialOrder,
        k: usize,
        current: &mut Vec<StateId>,
        best: &mut Vec<StateId>,
    ) {
        let n = ord.len();
        if current.len() + (n - k) <= best.len() {
            return;
        }
        if k == n {
            *best = current.clone();
            return;
        }
        if current.iter().all(|&c| !ord.comparable(c, k)) {
            current.push(k);
            go(ord, k + 1, current, best);
            current.pop();
        }
        go(ord, k + 1, current, best);
    }
    let mut best = Vec::new();
    go(ord, 0, &mut Vec::new(), &mut best);
    best
}

/// Every word over `1..=sigma` of length at most `max_len`, shortest first.
pub fn all_words(sigma: usize, max_len: usize) -> Vec<Vec<Symbol>> {
    let mut out = vec![Vec::new()];
    let mut level: Vec<Vec<Symbol>> = vec![Vec::new()];
    for _ in 0..max_len {
        let mut next = Vec::with_capacity(level.len() * sigma);
        for w in &level {
            for s in 1..=sigma as Symbol {
                let mut x = w.clone();
                x.push(s);
                next.push(x);
            }
        }
        out.extend(next.iter().cloned());
        level = next;
    }
    out
}
