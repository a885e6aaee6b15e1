//! Nondeterministic automata without ε-transitions.
//!
//! States are dense integers `0..num_states`. Edge labels are dense symbol
//! codes `1..=sigma` assigned by the alphabet order; code `0` is reserved for
//! the sentinel `#` that labels the (edge-less) entry into the initial state
//! and precedes every real symbol.
//!
//! An [`Nfa`] value may describe an automaton that breaks one of the four
//! structural assumptions the ordering machinery relies on (reachability,
//! co-reachability, no edge into the initial state, input-consistency).
//! [`validate`] reports such breaches and [`normalize`] repairs them.

mod parse;
mod transform;

use std::fmt;

use thiserror::Error;

pub use parse::{parse_automaton, parse_nfa, ParseError, ParseErrorKind};
pub use transform::{
    make_input_consistent, normalize, normalize_with_names, powerset, split_states, trim, trim_with_map, EmptyLanguage,
    Powerset, StateOrigin,
};

pub type StateId = usize;
pub type Symbol = u32;

/// Code of the sentinel `#`, the incoming label of the initial state.
pub const SENTINEL: Symbol = 0;
/// Code produced by [`Alphabet::encode`] for characters outside the alphabet.
/// No edge carries it, so every lookup with it comes back empty.
pub const UNKNOWN_SYMBOL: Symbol = Symbol::MAX;

/// Totally ordered alphabet. The symbol with code `c >= 1` is `chars[c - 1]`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Alphabet {
    chars: Vec<char>,
}

impl Alphabet {
    /// Builds an alphabet whose order is the order of `chars`.
    pub fn new(chars: Vec<char>) -> Result<Self, NfaError> {
        for (i, &c) in chars.iter().enumerate() {
            if c == '#' || c.is_whitespace() {
                return Err(NfaError::ReservedSymbol(c));
            }
            if chars[..i].contains(&c) {
                return Err(NfaError::DuplicateSymbol(c));
            }
        }
        Ok(Self { chars })
    }

    /// Alphabet of the given characters in ascending code-point order.
    pub fn sorted(chars: impl IntoIterator<Item = char>) -> Result<Self, NfaError> {
        let mut chars: Vec<char> = chars.into_iter().collect();
        chars.sort_unstable();
        chars.dedup();
        Self::new(chars)
    }

    pub fn len(&self) -> usize {
        self.chars.len()
    }

    pub fn is_empty(&self) -> bool {
        self.chars.is_empty()
    }

    pub fn chars(&self) -> &[char] {
        &self.chars
    }

    pub fn symbol(&self, c: char) -> Option<Symbol> {
        self.chars
            .iter()
            .position(|&x| x == c)
            .map(|i| i as Symbol + 1)
    }

    /// Character for a symbol code; the sentinel prints as `#`.
    pub fn char_of(&self, sym: Symbol) -> Option<char> {
        if sym == SENTINEL {
            return Some('#');
        }
        self.chars.get(sym as usize - 1).copied()
    }

    /// Encodes a pattern. Characters outside the alphabet become
    /// [`UNKNOWN_SYMBOL`].
    pub fn encode(&self, pattern: &str) -> Vec<Symbol> {
        pattern
            .chars()
            .map(|c| self.symbol(c).unwrap_or(UNKNOWN_SYMBOL))
            .collect()
    }

    pub fn decode(&self, word: &[Symbol]) -> String {
        word.iter()
            .map(|&s| self.char_of(s).unwrap_or('?'))
            .collect()
    }

    pub fn symbols(&self) -> impl Iterator<Item = Symbol> {
        1..=self.chars.len() as Symbol
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Edge {
    pub from: StateId,
    pub to: StateId,
    pub label: Symbol,
}

impl Edge {
    pub fn new(from: StateId, to: StateId, label: Symbol) -> Self {
        Self { from, to, label }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NfaError {
    #[error("automaton must have at least one state")]
    NoStates,
    #[error("state {state} out of range (automaton has {num_states} states)")]
    StateOutOfRange { state: StateId, num_states: usize },
    #[error("symbol code {0} is not in the alphabet")]
    SymbolOutOfRange(Symbol),
    #[error("symbol {0:?} is reserved")]
    ReservedSymbol(char),
    #[error("symbol {0:?} declared twice")]
    DuplicateSymbol(char),
}

/// A labeled transition system `(Q, s, δ, F)` over an ordered alphabet.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Nfa {
    alphabet: Alphabet,
    initial: StateId,
    finals: Vec<bool>,
    // sorted by (from, to, label), no duplicates
    edges: Vec<Edge>,
    // out[u]: (label, target) sorted
    out: Vec<Vec<(Symbol, StateId)>>,
    // inc[v]: (label, source) sorted
    inc: Vec<Vec<(Symbol, StateId)>>,
}

impl Nfa {
    /// Assembles an automaton. Duplicate edges collapse into one. No
    /// structural assumption is checked here beyond index ranges; see
    /// [`validate`].
    pub fn new(
        alphabet: Alphabet,
        num_states: usize,
        initial: StateId,
        finals: impl IntoIterator<Item = StateId>,
        edges: impl IntoIterator<Item = Edge>,
    ) -> Result<Self, NfaError> {
        if num_states == 0 {
            return Err(NfaError::NoStates);
        }
        let check = |state: StateId| {
            if state >= num_states {
                Err(NfaError::StateOutOfRange { state, num_states })
            } else {
                Ok(())
            }
        };
        check(initial)?;
        let mut final_mask = vec![false; num_states];
        for f in finals {
            check(f)?;
            final_mask[f] = true;
        }
        let sigma = alphabet.len() as Symbol;
        let mut edges: Vec<Edge> = edges.into_iter().collect();
        for e in &edges {
            check(e.from)?;
            check(e.to)?;
            if e.label == SENTINEL || e.label > sigma {
                return Err(NfaError::SymbolOutOfRange(e.label));
            }
        }
        edges.sort_unstable();
        edges.dedup();
        let mut out = vec![Vec::new(); num_states];
        let mut inc = vec![Vec::new(); num_states];
        for e in &edges {
            out[e.from].push((e.label, e.to));
            inc[e.to].push((e.label, e.from));
        }
        for list in out.iter_mut().chain(inc.iter_mut()) {
            list.sort_unstable();
        }
        Ok(Self {
            alphabet,
            initial,
            finals: final_mask,
            edges,
            out,
            inc,
        })
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn sigma(&self) -> usize {
        self.alphabet.len()
    }

    pub fn num_states(&self) -> usize {
        self.finals.len()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn initial(&self) -> StateId {
        self.initial
    }

    pub fn is_final(&self, u: StateId) -> bool {
        self.finals[u]
    }

    pub fn finals(&self) -> impl Iterator<Item = StateId> + '_ {
        self.finals
            .iter()
            .enumerate()
            .filter_map(|(i, &f)| f.then_some(i))
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    /// Outgoing `(label, target)` pairs of `u`, sorted.
    pub fn successors(&self, u: StateId) -> &[(Symbol, StateId)] {
        &self.out[u]
    }

    /// Incoming `(label, source)` pairs of `v`, sorted.
    pub fn predecessors(&self, v: StateId) -> &[(Symbol, StateId)] {
        &self.inc[v]
    }

    /// Targets of `a`-edges leaving `u`.
    pub fn step(&self, u: StateId, a: Symbol) -> impl Iterator<Item = StateId> + '_ {
        let list = &self.out[u];
        let start = list.partition_point(|&(l, _)| l < a);
        list[start..]
            .iter()
            .take_while(move |&&(l, _)| l == a)
            .map(|&(_, v)| v)
    }

    /// λ(u): the label shared by all edges entering `u`. The initial state
    /// (and any state without incoming edges) gets the sentinel. Only
    /// meaningful on input-consistent automata; otherwise the smallest
    /// incoming label is returned.
    pub fn label(&self, u: StateId) -> Symbol {
        if u == self.initial {
            return SENTINEL;
        }
        self.inc[u].first().map_or(SENTINEL, |&(l, _)| l)
    }

    pub fn labels(&self) -> Vec<Symbol> {
        (0..self.num_states()).map(|u| self.label(u)).collect()
    }

    pub fn is_deterministic(&self) -> bool {
        self.out
            .iter()
            .all(|list| list.windows(2).all(|w| w[0].0 != w[1].0))
    }

    /// Same automaton with the alphabet restricted to symbols that label at
    /// least one edge. Codes are reassigned densely, preserving order.
    pub(crate) fn compact_alphabet(&self) -> Nfa {
        let sigma = self.sigma();
        let mut used = vec![false; sigma + 1];
        for e in &self.edges {
            used[e.label as usize] = true;
        }
        if used[1..].iter().all(|&u| u) {
            return self.clone();
        }
        let mut remap = vec![SENTINEL; sigma + 1];
        let mut chars = Vec::new();
        for sym in 1..=sigma {
            if used[sym] {
                chars.push(self.alphabet.chars[sym - 1]);
                remap[sym] = chars.len() as Symbol;
            }
        }
        let edges = self
            .edges
            .iter()
            .map(|e| Edge::new(e.from, e.to, remap[e.label as usize]));
        Nfa::new(
            Alphabet { chars },
            self.num_states(),
            self.initial,
            self.finals(),
            edges,
        )
        .expect("remapping preserves validity")
    }
}

/// The structural assumption an automaton breaks.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    /// Assumption 1: `state` is not reachable from the initial state.
    Unreachable { state: StateId },
    /// Assumption 2: no final state is reachable from `state`.
    NoFinalReachable { state: StateId },
    /// Assumption 3: an edge enters the initial state.
    InitialHasIncoming { edge: Edge },
    /// Assumption 4: edges into `state` carry more than one label.
    MixedIncomingLabels { state: StateId, labels: Vec<char> },
}

impl Violation {
    pub fn assumption(&self) -> u8 {
        match self {
            Violation::Unreachable { .. } => 1,
            Violation::NoFinalReachable { .. } => 2,
            Violation::InitialHasIncoming { .. } => 3,
            Violation::MixedIncomingLabels { .. } => 4,
        }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "assumption {}: ", self.assumption())?;
        match self {
            Violation::Unreachable { state } => {
                write!(f, "state {state} is not reachable from the initial state")
            }
            Violation::NoFinalReachable { state } => {
                write!(f, "state {state} cannot reach a final state")
            }
            Violation::InitialHasIncoming { edge } => write!(
                f,
                "edge {} -> {} enters the initial state",
                edge.from, edge.to
            ),
            Violation::MixedIncomingLabels { state, labels } => {
                let labels: Vec<String> = labels.iter().map(|c| c.to_string()).collect();
                write!(
                    f,
                    "state {state} has incoming labels {} (not input-consistent)",
                    labels.join(", ")
                )
            }
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_empty(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn breaks(&self, assumption: u8) -> bool {
        self.violations.iter().any(|v| v.assumption() == assumption)
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.violations.is_empty() {
            return writeln!(f, "ok");
        }
        for v in &self.violations {
            writeln!(f, "{v}")?;
        }
        Ok(())
    }
}

pub(crate) fn forward_reachable(a: &Nfa, from: StateId) -> Vec<bool> {
    let mut seen = vec![false; a.num_states()];
    let mut stack = vec![from];
    seen[from] = true;
    while let Some(u) = stack.pop() {
        for &(_, v) in a.successors(u) {
            if !seen[v] {
                seen[v] = true;
                stack.push(v);
            }
        }
    }
    seen
}

pub(crate) fn coreachable(a: &Nfa) -> Vec<bool> {
    let mut seen = vec![false; a.num_states()];
    let mut stack: Vec<StateId> = a.finals().collect();
    for &f in &stack {
        seen[f] = true;
    }
    while let Some(v) = stack.pop() {
        for &(_, u) in a.predecessors(v) {
            if !seen[u] {
                seen[u] = true;
                stack.push(u);
            }
        }
    }
    seen
}

/// Lists every breach of the four structural assumptions.
pub fn validate(a: &Nfa) -> ValidationReport {
    let mut violations = Vec::new();
    let reach = forward_reachable(a, a.initial());
    let coreach = coreachable(a);
    for u in 0..a.num_states() {
        if !reach[u] {
            violations.push(Violation::Unreachable { state: u });
        }
    }
    for u in 0..a.num_states() {
        if !coreach[u] {
            violations.push(Violation::NoFinalReachable { state: u });
        }
    }
    for &(label, from) in a.predecessors(a.initial()) {
        violations.push(Violation::InitialHasIncoming {
            edge: Edge::new(from, a.initial(), label),
        });
    }
    for v in 0..a.num_states() {
        let mut labels: Vec<Symbol> = a.predecessors(v).iter().map(|&(l, _)| l).collect();
        labels.dedup();
        if labels.len() > 1 {
            violations.push(Violation::MixedIncomingLabels {
                state: v,
                labels: labels
                    .iter()
                    .map(|&l| a.alphabet().char_of(l).unwrap_or('?'))
                    .collect(),
            });
        }
    }
    ValidationReport { violations }
}

/// Extended transition function: all states reachable from some state of
/// `from` by reading `word`. Returns a sorted, duplicate-free list.
pub fn run(a: &Nfa, from: &[StateId], word: &[Symbol]) -> Vec<StateId> {
    let n = a.num_states();
    let mut current = vec![false; n];
    for &u in from {
        current[u] = true;
    }
    let mut next = vec![false; n];
    for &sym in word {
        next.iter_mut().for_each(|b| *b = false);
        let mut any = false;
        for u in (0..n).filter(|&u| current[u]) {
            for v in a.step(u, sym) {
                next[v] = true;
                any = true;
            }
        }
        std::mem::swap(&mut current, &mut next);
        if !any {
            return Vec::new();
        }
    }
    (0..n).filter(|&u| current[u]).collect()
}

/// Whether the automaton accepts `word`.
pub fn accepts(a: &Nfa, word: &[Symbol]) -> bool {
    run(a, &[a.initial()], word)
        .into_iter()
        .any(|u| a.is_final(u))
}

/// An automaton with at most one `a`-successor per state and symbol.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Dfa(Nfa);

impl Dfa {
    pub fn into_nfa(self) -> Nfa {
        self.0
    }

    pub fn as_nfa(&self) -> &Nfa {
        &self.0
    }
}

impl TryFrom<Nfa> for Dfa {
    type Error = Nfa;

    fn try_from(a: Nfa) -> Result<Self, Self::Error> {
        if a.is_deterministic() {
            Ok(Dfa(a))
        } else {
            Err(a)
        }
    }
}

impl std::ops::Deref for Dfa {
    type Target = Nfa;

    fn deref(&self) -> &Nfa {
        &self.0
    }
}

impl fmt::Display for Nfa {
    /// Writes the line-oriented text format accepted by [`parse_nfa`].
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if !self.alphabet.is_empty() {
            let chars: Vec<String> = self.alphabet.chars.iter().map(|c| c.to_string()).collect();
            writeln!(f, "alphabet {}", chars.join(" "))?;
        }
        writeln!(f, "states {}", self.num_states())?;
        writeln!(f, "initial {}", self.initial)?;
        let finals: Vec<String> = self.finals().map(|u| u.to_string()).collect();
        if !finals.is_empty() {
            writeln!(f, "final {}", finals.join(" "))?;
        }
        for e in &self.edges {
            writeln!(
                f,
                "edge {} {} {}",
                e.from,
                e.to,
                self.alphabet.char_of(e.label).unwrap_or('?')
            )?;
        }
        Ok(())
    }
}

impl fmt::Display for Dfa {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}


#[cfg(test)]
mod tests {
    use super::fixtures::two_chains;
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn two_chains_loads_and_is_valid() {
        let a = two_chains();
        assert_eq!(a.num_states(), 7);
        assert_eq!(a.num_edges(), 9);
        assert!(validate(&a).is_empty());
        assert_eq!(a.label(0), SENTINEL);
        let x = a.alphabet().symbol('x').unwrap();
        assert_eq!(a.label(3), x);
        assert_eq!(a.label(4), x);
    }

    #[test]
    fn incoming_edges_share_the_state_label() {
        let a = two_chains();
        for v in 0..a.num_states() {
            for &(l, _) in a.predecessors(v) {
                assert_eq!(l, a.label(v));
            }
        }
    }

    #[test]
    fn mixed_labels_are_reported_at_the_state() {
        let a = parse_nfa("states 2\ninitial 0\nfinal 1\nedge 0 1 a\nedge 0 1 b\n").unwrap();
        let report = validate(&a);
        assert_eq!(report.violations.len(), 1);
        assert_eq!(
            report.violations[0],
            Violation::MixedIncomingLabels {
                state: 1,
                labels: vec!['a', 'b']
            }
        );
    }

    #[test]
    fn unreachable_state_is_named() {
        let a = parse_nfa("states 3\ninitial 0\nfinal 1 2\nedge 0 1 a\n").unwrap();
        let report = validate(&a);
        assert_eq!(report.violations, vec![Violation::Unreachable { state: 2 }]);
    }

    #[test]
    fn run_matches_hand_traces() {
        let a = two_chains();
        let enc = |s: &str| a.alphabet().encode(s);
        assert_eq!(run(&a, &[0], &enc("ax")), vec![3, 4]);
        assert_eq!(run(&a, &[0], &enc("bx")), vec![4]);
        assert_eq!(run(&a, &[2, 5], &[]), vec![2, 5]);
        assert_eq!(run(&a, &[0], &enc("aq")), Vec::<StateId>::new());
        assert!(accepts(&a, &enc("axy")));
        assert!(!accepts(&a, &enc("ax")));
    }

    #[test]
    fn unknown_symbols_encode_to_nothing() {
        let a = two_chains();
        let w = a.alphabet().encode("a?");
        assert_eq!(w[1], UNKNOWN_SYMBOL);
        assert!(run(&a, &[0], &w).is_empty());
    }

    #[test]
    fn text_round_trip() {
        let a = two_chains();
        let again = parse_nfa(&a.to_string()).unwrap();
        assert_eq!(a, again);
    }

    proptest! {
        #[test]
        fn run_splits_over_concatenation(word in proptest::collection::vec(1u32..=5, 0..8), cut in 0usize..8) {
            let a = two_chains();
            let cut = cut.min(word.len());
            let whole = run(&a, &[0], &word);
            let mid = run(&a, &[0], &word[..cut]);
            prop_assert_eq!(whole, run(&a, &mid, &word[cut..]));
        }
    }
}
