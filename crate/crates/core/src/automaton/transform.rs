use std::collections::HashMap;
use std::collections::VecDeque;
use std::fmt;

use thiserror::Error;

use super::{coreachable, forward_reachable, Dfa, Edge, Nfa, StateId, Symbol};

/// Trimming removed every state: the automaton accepts nothing.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
#[error("the automaton accepts the empty language")]
pub struct EmptyLanguage;

/// Drops states that are unreachable from the initial state or cannot reach
/// a final state. Surviving states keep their relative order.
pub fn trim(a: &Nfa) -> Result<Nfa, EmptyLanguage> {
    trim_with_map(a).map(|(nfa, _)| nfa)
}

/// As [`trim`], also returning the original id of each surviving state.
pub fn trim_with_map(a: &Nfa) -> Result<(Nfa, Vec<StateId>), EmptyLanguage> {
    let reach = forward_reachable(a, a.initial());
    let coreach = coreachable(a);
    if !coreach[a.initial()] {
        return Err(EmptyLanguage);
    }
    let keep: Vec<StateId> = (0..a.num_states())
        .filter(|&u| reach[u] && coreach[u])
        .collect();
    let mut new_id = vec![usize::MAX; a.num_states()];
    for (i, &u) in keep.iter().enumerate() {
        new_id[u] = i;
    }
    let edges = a
        .edges()
        .iter()
        .filter(|e| new_id[e.from] != usize::MAX && new_id[e.to] != usize::MAX)
        .map(|e| Edge::new(new_id[e.from], new_id[e.to], e.label));
    let finals = a.finals().filter(|&f| new_id[f] != usize::MAX).map(|f| new_id[f]);
    let trimmed = Nfa::new(
        a.alphabet().clone(),
        keep.len(),
        new_id[a.initial()],
        finals,
        edges,
    )
    .expect("restriction of a well-formed automaton");
    Ok((trimmed.compact_alphabet(), keep))
}

/// Where a state produced by [`split_states`] came from.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct StateOrigin {
    pub state: StateId,
    /// The incoming label this copy is dedicated to, when the original state
    /// had to be split.
    pub label: Option<Symbol>,
}

impl StateOrigin {
    /// Debug name: `q` for an unsplit state, `q@c` for the copy of `q`
    /// entered by label `c`.
    pub fn name(&self, a: &Nfa) -> String {
        match self.label {
            None => self.state.to_string(),
            Some(l) => format!("{}@{}", self.state, a.alphabet().char_of(l).unwrap_or('?')),
        }
    }
}

impl fmt::Display for StateOrigin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.label {
            None => write!(f, "{}", self.state),
            Some(l) => write!(f, "{}@{}", self.state, l),
        }
    }
}

/// Splits every state entered by several labels into one copy per label
/// actually present. Each copy inherits the whole out-neighborhood and the
/// final flag, so the accepted language is unchanged.
pub fn split_states(a: &Nfa) -> (Nfa, Vec<StateOrigin>) {
    let n = a.num_states();
    let mut origin = Vec::with_capacity(n);
    // copies[q] = (label, new id) pairs; a single entry with label None when unsplit
    let mut copies: Vec<Vec<(Option<Symbol>, StateId)>> = Vec::with_capacity(n);
    for q in 0..n {
        let mut labels: Vec<Symbol> = a.predecessors(q).iter().map(|&(l, _)| l).collect();
        labels.dedup();
        if q == a.initial() || labels.len() <= 1 {
            copies.push(vec![(None, origin.len())]);
            origin.push(StateOrigin { state: q, label: None });
        } else {
            let mut list = Vec::with_capacity(labels.len());
            for l in labels {
                list.push((Some(l), origin.len()));
                origin.push(StateOrigin {
                    state: q,
                    label: Some(l),
                });
            }
            copies.push(list);
        }
    }
    let target = |q: StateId, l: Symbol| -> StateId {
        let list = &copies[q];
        if list.len() == 1 {
            list[0].1
        } else {
            list.iter()
                .find(|(cl, _)| *cl == Some(l))
                .expect("a copy exists for every incoming label")
                .1
        }
    };
    let mut edges = Vec::with_capacity(a.num_edges());
    for e in a.edges() {
        let to = target(e.to, e.label);
        for &(_, from) in &copies[e.from] {
            edges.push(Edge::new(from, to, e.label));
        }
    }
    let finals = origin
        .iter()
        .enumerate()
        .filter(|(_, o)| a.is_final(o.state))
        .map(|(i, _)| i)
        .collect::<Vec<_>>();
    let initial = copies[a.initial()][0].1;
    let nfa = Nfa::new(a.alphabet().clone(), origin.len(), initial, finals, edges)
        .expect("split preserves well-formedness");
    (nfa, origin)
}

/// Input-consistent automaton accepting the same language. See
/// [`split_states`].
pub fn make_input_consistent(a: &Nfa) -> Nfa {
    split_states(a).0
}

/// Repairs all four structural assumptions without changing the language:
/// a fresh initial state is added if edges enter the old one, then the
/// automaton is trimmed, split to input-consistency, and trimmed again.
pub fn normalize(a: &Nfa) -> Result<Nfa, EmptyLanguage> {
    normalize_with_names(a).map(|(nfa, _)| nfa)
}

/// As [`normalize`], also naming every resulting state after the input
/// state it came from: `q`, or `q@c` for a split copy. An added initial
/// state is named `init`.
pub fn normalize_with_names(a: &Nfa) -> Result<(Nfa, Vec<String>), EmptyLanguage> {
    let entered = !a.predecessors(a.initial()).is_empty();
    let mut names: Vec<String> = (0..a.num_states()).map(|q| q.to_string()).collect();
    let base = if entered {
        let fresh = a.num_states();
        let mut edges: Vec<Edge> = a.edges().to_vec();
        edges.extend(
            a.successors(a.initial())
                .iter()
                .map(|&(l, v)| Edge::new(fresh, v, l)),
        );
        let mut finals: Vec<StateId> = a.finals().collect();
        if a.is_final(a.initial()) {
            finals.push(fresh);
        }
        names.push("init".to_string());
        Nfa::new(a.alphabet().clone(), fresh + 1, fresh, finals, edges)
            .expect("adding a state keeps indices in range")
    } else {
        a.clone()
    };
    let (trimmed, keep) = trim_with_map(&base)?;
    let names: Vec<String> = keep.into_iter().map(|q| std::mem::take(&mut names[q])).collect();
    let (split, origin) = split_states(&trimmed);
    let names: Vec<String> = origin
        .iter()
        .map(|o| match o.label {
            None => names[o.state].clone(),
            Some(l) => format!("{}@{}", names[o.state], trimmed.alphabet().char_of(l).unwrap_or('?')),
        })
        .collect();
    let (out, keep) = trim_with_map(&split)?;
    let names = keep.into_iter().map(|q| names[q].clone()).collect();
    Ok((out, names))
}

/// Result of the subset construction.
#[derive(Clone, Debug)]
pub struct Powerset {
    pub dfa: Dfa,
    /// `subsets[q]` is the sorted set of source states that DFA state `q`
    /// stands for.
    pub subsets: Vec<Vec<StateId>>,
}

/// Subset construction restricted to the sets `δ(s, α)` that are nonempty.
/// States are numbered in breadth-first discovery order, symbols visited in
/// alphabet order, so the output is deterministic. On a valid input the
/// result is trim and input-consistent.
pub fn powerset(a: &Nfa) -> Powerset {
    let n = a.num_states();
    let mut ids: HashMap<Vec<StateId>, StateId> = HashMap::new();
    let mut subsets: Vec<Vec<StateId>> = Vec::new();
    let mut queue = VecDeque::new();
    let start = vec![a.initial()];
    ids.insert(start.clone(), 0);
    subsets.push(start);
    queue.push_back(0);
    let mut edges = Vec::new();
    let mut mark = vec![false; n];
    while let Some(q) = queue.pop_front() {
        let set = subsets[q].clone();
        for sym in a.alphabet().symbols() {
            let mut next = Vec::new();
            for &u in &set {
                for v in a.step(u, sym) {
                    if !mark[v] {
                        mark[v] = true;
                        next.push(v);
                    }
                }
            }
            if next.is_empty() {
                continue;
            }
            for &v in &next {
                mark[v] = false;
            }
            next.sort_unstable();
            let target = match ids.get(&next) {
                Some(&id) => id,
                None => {
                    let id = subsets.len();
                    ids.insert(next.clone(), id);
                    subsets.push(next);
                    queue.push_back(id);
                    id
                }
            };
            edges.push(Edge::new(q, target, sym));
        }
    }
    let finals: Vec<StateId> = subsets
        .iter()
        .enumerate()
        .filter(|(_, s)| s.iter().any(|&u| a.is_final(u)))
        .map(|(i, _)| i)
        .collect();
    let nfa = Nfa::new(a.alphabet().clone(), subsets.len(), 0, finals, edges)
        .expect("subset construction yields a well-formed automaton")
        .compact_alphabet();
    let dfa = Dfa::try_from(nfa).expect("subset construction is deterministic");
    Powerset { dfa, subsets }
}
