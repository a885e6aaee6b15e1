//! Automaton generators: the `a^(kp)` and primes families, seeded random NFAs and
//! large trie-shaped automata with a known chain partition.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::automaton::{normalize, validate, Alphabet, Dfa, Edge, Nfa, StateId, Symbol};
use crate::order::{transitive_reflexive_closure, ChainPartition};
use crate::relation::{PartialOrder, Relation};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GenError {
    #[error("no non-empty automaton after {0} attempts")]
    GaveUp(usize),
    #[error("invalid generator parameters: {0}")]
    BadParams(&'static str),
}

fn letters(k: usize) -> Alphabet {
    Alphabet::new(('a'..='z').take(k).collect()).expect("distinct letters")
}

/// The DFA for `{a^(kp) | k ≥ 0}`: a tail state `0` leading into a
/// `p`-cycle `1..=p`. States `0` and `p` are final.
pub fn gen_lp(p: usize) -> Dfa {
    assert!(p >= 1, "p must be positive");
    let mut edges: Vec<Edge> = (0..p).map(|i| Edge::new(i, i + 1, 1)).collect();
    edges.push(Edge::new(p, 1, 1));
    let a = Nfa::new(letters(1), p + 1, 0, [0, p], edges).expect("well-formed");
    Dfa::try_from(a).expect("deterministic by construction")
}

/// The unary NFA accepting `a^r` iff some listed prime divides `r`: one
/// cycle per prime, all entered from state `0`.
pub fn gen_primes_nfa(primes: &[usize]) -> Nfa {
    assert!(!primes.is_empty(), "need at least one prime");
    let mut edges = Vec::new();
    let mut finals = vec![0];
    let mut base = 1;
    for &p in primes {
        assert!(p >= 1);
        edges.push(Edge::new(0, base, 1));
        for k in 0..p - 1 {
            edges.push(Edge::new(base + k, base + k + 1, 1));
        }
        edges.push(Edge::new(base + p - 1, base, 1));
        finals.push(base + p - 1);
        base += p;
    }
    Nfa::new(letters(1), base, 0, finals, edges).expect("well-formed")
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RandomNfaParams {
    /// Upper bound on the number of states after trimming.
    pub states: usize,
    pub labels: usize,
    /// Probability of each candidate edge beyond the spanning tree.
    pub density: f64,
    pub seed: u64,
    pub deterministic: bool,
}

const MAX_ATTEMPTS: u64 = 64;

/// Seeded random automaton satisfying all four assumptions.
///
/// Every non-initial state draws its incoming label first, so the raw
/// automaton is already input-consistent; a random spanning tree keeps
/// it connected and trimming removes what cannot reach a final state.
pub fn gen_random_nfa(params: &RandomNfaParams) -> Result<Nfa, GenError> {
    if params.states == 0 {
        return Err(GenError::BadParams("states must be positive"));
    }
    if params.labels == 0 || params.labels > 26 {
        return Err(GenError::BadParams("labels must be in 1..=26"));
    }
    for attempt in 0..MAX_ATTEMPTS {
        let seed = params.seed.wrapping_add(attempt.wrapping_mul(0x9e37_79b9_7f4a_7c15));
        if let Some(a) = random_attempt(params, seed) {
            debug_assert!(validate(&a).is_empty());
            return Ok(a);
        }
    }
    Err(GenError::GaveUp(MAX_ATTEMPTS as usize))
}

fn random_attempt(params: &RandomNfaParams, seed: u64) -> Option<Nfa> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = params.states;
    let label: Vec<Symbol> = (0..n)
        .map(|v| if v == 0 { 0 } else { rng.gen_range(1..=params.labels as Symbol) })
        .collect();
    // has[u][a]: u already has an a-successor (only tracked for DFAs)
    let mut has = vec![vec![false; params.labels + 1]; n];
    let mut edges = Vec::new();
    for v in 1..n {
        let free: Vec<StateId> = (0..v)
            .filter(|&u| !params.deterministic || !has[u][label[v] as usize])
            .collect();
        if free.is_empty() {
            continue;
        }
        let u = free[rng.gen_range(0..free.len())];
        has[u][label[v] as usize] = true;
        edges.push(Edge::new(u, v, label[v]));
    }
    for u in 0..n {
        for v in 1..n {
            if rng.gen_bool(params.density.clamp(0.0, 1.0))
                && !(params.deterministic && has[u][label[v] as usize])
            {
                has[u][label[v] as usize] = true;
                edges.push(Edge::new(u, v, label[v]));
            }
        }
    }
    let mut finals: Vec<StateId> = (0..n).filter(|_| rng.gen_bool(0.3)).collect();
    finals.push(n - 1);
    let raw = Nfa::new(letters(params.labels), n, 0, finals, edges).ok()?;
    normalize(&raw).ok()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LayeredParams {
    /// Approximate state count; the result may overshoot by one string.
    pub states: usize,
    pub chains: usize,
    pub sigma: usize,
    pub max_len: usize,
    pub seed: u64,
}

/// A union of `chains` tries sharing the initial state as root. Each trie,
/// sorted by reversed access string, is a chain of a co-lex order.
#[derive(Clone, Debug)]
pub struct LayeredNfa {
    pub nfa: Nfa,
    pub partition: ChainPartition,
    /// The inserted strings, for sampling patterns that occur.
    pub strings: Vec<Vec<Symbol>>,
}

impl LayeredNfa {
    /// The co-lex order the partition was built from: total inside each
    /// trie, label order across tries, the root below everything.
    /// Quadratic in the number of states.
    pub fn order(&self) -> PartialOrder {
        let n = self.nfa.num_states();
        let labels = self.nfa.labels();
        let mut rel = Relation::new(n);
        for chain in self.partition.chains() {
            for (k, &u) in chain.iter().enumerate() {
                for &v in &chain[k + 1..] {
                    rel.insert(u, v);
                }
            }
        }
        for u in 0..n {
            for v in 0..n {
                if labels[u] < labels[v] || (u == 0 && v != 0) {
                    rel.insert(u, v);
                }
            }
        }
        PartialOrder::certify(transitive_reflexive_closure(&rel)).expect("co-lex by construction")
    }

    /// A random substring of length `len` of some inserted string, or a
    /// random word if no string is that long.
    pub fn sample_pattern(&self, len: usize, rng: &mut impl Rng) -> Vec<Symbol> {
        let long: Vec<&Vec<Symbol>> = self.strings.iter().filter(|s| s.len() >= len).collect();
        if long.is_empty() {
            let sigma = self.nfa.sigma().max(1) as Symbol;
            return (0..len).map(|_| rng.gen_range(1..=sigma)).collect();
        }
        let s = long[rng.gen_range(0..long.len())];
        let start = rng.gen_range(0..=s.len() - len);
        s[start..start + len].to_vec()
    }
}

pub fn gen_layered(params: &LayeredParams) -> Result<LayeredNfa, GenError> {
    if params.chains == 0 || params.sigma == 0 || params.sigma > 26 || params.max_len == 0 {
        return Err(GenError::BadParams("chains, sigma and max_len must be positive, sigma ≤ 26"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let per_trie = (params.states.saturating_sub(1) / params.chains).max(1);

    // nodes of every trie: (parent, label); parent None means the shared root
    struct Trie {
        nodes: Vec<(Option<usize>, Symbol)>,
        children: Vec<Vec<(Symbol, usize)>>,
        root_children: Vec<(Symbol, usize)>,
        leaf: Vec<bool>,
    }
    let mut tries = Vec::with_capacity(params.chains);
    let mut strings = Vec::new();
    for _ in 0..params.chains {
        let mut t = Trie {
            nodes: Vec::new(),
            children: Vec::new(),
            root_children: Vec::new(),
            leaf: Vec::new(),
        };
        while t.nodes.len() < per_trie {
            let len = rng.gen_range(1..=params.max_len);
            let s: Vec<Symbol> = (0..len)
                .map(|_| rng.gen_range(1..=params.sigma as Symbol))
                .collect();
            let mut at: Option<usize> = None;
            for &c in &s {
                let kids = match at {
                    None => &t.root_children,
                    Some(x) => &t.children[x],
                };
                at = Some(match kids.iter().find(|&&(l, _)| l == c) {
                    Some(&(_, y)) => y,
                    None => {
                        let y = t.nodes.len();
                        t.nodes.push((at, c));
                        t.children.push(Vec::new());
                        t.leaf.push(false);
                        match at {
                            None => t.root_children.push((c, y)),
                            Some(x) => t.children[x].push((c, y)),
                        }
                        y
                    }
                });
            }
            t.leaf[at.expect("non-empty string")] = true;
            strings.push(s);
        }
        tries.push(t);
    }

    let mut edges = Vec::new();
    let mut finals = Vec::new();
    let mut chains: Vec<Vec<StateId>> = Vec::with_capacity(params.chains);
    let mut next = 1;
    for (ti, t) in tries.iter().enumerate() {
        let reversed_key = |mut x: usize| {
            let mut key = Vec::new();
            loop {
                let (parent, c) = t.nodes[x];
                key.push(c);
                match parent {
                    Some(p) => x = p,
                    None => return key,
                }
            }
        };
        let mut sorted: Vec<(Vec<Symbol>, usize)> =
            (0..t.nodes.len()).map(|x| (reversed_key(x), x)).collect();
        sorted.sort();
        let mut id = vec![0; t.nodes.len()];
        let mut chain = if ti == 0 { vec![0] } else { Vec::new() };
        for (_, x) in &sorted {
            id[*x] = next;
            chain.push(next);
            next += 1;
        }
        for (x, &(parent, c)) in t.nodes.iter().enumerate() {
            edges.push(Edge::new(parent.map_or(0, |p| id[p]), id[x], c));
            if t.leaf[x] {
                finals.push(id[x]);
            }
        }
        chains.push(chain);
    }
    let full = letters(params.sigma);
    let nfa = Nfa::new(full.clone(), next, 0, finals, edges)
        .expect("well-formed")
        .compact_alphabet();
    if nfa.sigma() != params.sigma {
        let remap = |c: Symbol| {
            let ch = full.char_of(c).expect("generated symbol");
            nfa.alphabet().symbol(ch).expect("used symbols survive compaction")
        };
        for s in &mut strings {
            s.iter_mut().for_each(|c| *c = remap(*c));
        }
    }
    let partition = ChainPartition::new(next, chains).expect("tries partition the states");
    Ok(LayeredNfa {
        nfa,
        partition,
        strings,
    })
}
