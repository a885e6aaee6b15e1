use std::collections::BTreeSet;

use thiserror::Error;

use super::{Alphabet, Edge, Nfa, NfaError, StateId};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {kind}")]
pub struct ParseError {
    /// 1-based; 0 when the problem is not tied to a line (e.g. a missing
    /// directive).
    pub line: usize,
    pub kind: ParseErrorKind,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseErrorKind {
    #[error("unknown directive {0:?}")]
    UnknownDirective(String),
    #[error("expected {0}")]
    Expected(&'static str),
    #[error("invalid number {0:?}")]
    BadNumber(String),
    #[error("label {0:?} must be a single character")]
    BadLabel(String),
    #[error("label {0:?} is not in the declared alphabet")]
    UndeclaredLabel(char),
    #[error("directive {0:?} given twice")]
    Repeated(&'static str),
    #[error("missing directive {0:?}")]
    Missing(&'static str),
    #[error("edge {0} -> {1} enters the initial state (assumption 3)")]
    EdgeIntoInitial(StateId, StateId),
    #[error(transparent)]
    Automaton(#[from] NfaError),
}

fn err(line: usize, kind: ParseErrorKind) -> ParseError {
    ParseError { line, kind }
}

fn number(line: usize, tok: Option<&str>) -> Result<usize, ParseError> {
    let tok = tok.ok_or_else(|| err(line, ParseErrorKind::Expected("a number")))?;
    tok.parse()
        .map_err(|_| err(line, ParseErrorKind::BadNumber(tok.to_string())))
}

fn label(line: usize, tok: Option<&str>) -> Result<char, ParseError> {
    let tok = tok.ok_or_else(|| err(line, ParseErrorKind::Expected("a label")))?;
    let mut chars = tok.chars();
    match (chars.next(), chars.next()) {
        (Some(c), None) => Ok(c),
        _ => Err(err(line, ParseErrorKind::BadLabel(tok.to_string()))),
    }
}

/// Parses the text format without rejecting edges into the initial state,
/// so that [`super::validate`] can report them.
pub fn parse_automaton(text: &str) -> Result<Nfa, ParseError> {
    parse_inner(text, false)
}

/// Parses the line-oriented automaton format:
///
/// ```text
/// alphabet a b x y z   # optional; default is ascending order of labels seen
/// states 7
/// initial 0
/// final 5 6
/// edge 0 1 a
/// ```
///
/// Symbols the alphabet declares but no edge uses are dropped. Repeated
/// edges collapse into one.
pub fn parse_nfa(text: &str) -> Result<Nfa, ParseError> {
    parse_inner(text, true)
}

fn parse_inner(text: &str, reject_into_initial: bool) -> Result<Nfa, ParseError> {
    let mut declared: Option<(usize, Vec<char>)> = None;
    let mut states: Option<usize> = None;
    let mut initial: Option<(usize, StateId)> = None;
    let mut finals = Vec::new();
    let mut raw_edges: Vec<(usize, StateId, StateId, char)> = Vec::new();

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("");
        let mut toks = content.split_whitespace();
        let Some(directive) = toks.next() else {
            continue;
        };
        match directive {
            "alphabet" => {
                if declared.is_some() {
                    return Err(err(line, ParseErrorKind::Repeated("alphabet")));
                }
                let chars = toks
                    .map(|t| label(line, Some(t)))
                    .collect::<Result<Vec<_>, _>>()?;
                declared = Some((line, chars));
                continue;
            }
            "states" => {
                if states.is_some() {
                    return Err(err(line, ParseErrorKind::Repeated("states")));
                }
                states = Some(number(line, toks.next())?);
            }
            "initial" => {
                if initial.is_some() {
                    return Err(err(line, ParseErrorKind::Repeated("initial")));
                }
                initial = Some((line, number(line, toks.next())?));
            }
            "final" => {
                for t in toks.by_ref() {
                    finals.push((line, number(line, Some(t))?));
                }
                continue;
            }
            "edge" => {
                let from = number(line, toks.next())?;
                let to = number(line, toks.next())?;
                let c = label(line, toks.next())?;
                raw_edges.push((line, from, to, c));
            }
            other => return Err(err(line, ParseErrorKind::UnknownDirective(other.to_string()))),
        }
        if let Some(extra) = toks.next() {
            return Err(err(
                line,
                ParseErrorKind::UnknownDirective(format!("trailing token {extra}")),
            ));
        }
    }

    let num_states = states.ok_or_else(|| err(0, ParseErrorKind::Missing("states")))?;
    let (init_line, initial) = initial.ok_or_else(|| err(0, ParseErrorKind::Missing("initial")))?;
    let range = |line: usize, state: StateId| {
        if state >= num_states {
            Err(err(
                line,
                NfaError::StateOutOfRange { state, num_states }.into(),
            ))
        } else {
            Ok(())
        }
    };
    if num_states == 0 {
        return Err(err(0, NfaError::NoStates.into()));
    }
    range(init_line, initial)?;
    for &(line, f) in &finals {
        range(line, f)?;
    }

    let used: BTreeSet<char> = raw_edges.iter().map(|e| e.3).collect();
    let alphabet = match declared {
        Some((line, chars)) => {
            let full = Alphabet::new(chars).map_err(|e| err(line, e.into()))?;
            if let Some(&(eline, _, _, c)) = raw_edges.iter().find(|e| full.symbol(e.3).is_none()) {
                return Err(err(eline, ParseErrorKind::UndeclaredLabel(c)));
            }
            let kept: Vec<char> = full
                .chars()
                .iter()
                .copied()
                .filter(|c| used.contains(c))
                .collect();
            Alphabet::new(kept).expect("subset of a valid alphabet")
        }
        None => {
            Alphabet::sorted(used.iter().copied()).map_err(|e| err(0, e.into()))?
        }
    };

    let mut edges = Vec::with_capacity(raw_edges.len());
    for &(line, from, to, c) in &raw_edges {
        range(line, from)?;
        range(line, to)?;
        if reject_into_initial && to == initial {
            return Err(err(line, ParseErrorKind::EdgeIntoInitial(from, to)));
        }
        let sym = alphabet.symbol(c).expect("alphabet covers every used label");
        edges.push(Edge::new(from, to, sym));
    }

    Nfa::new(
        alphabet,
        num_states,
        initial,
        finals.into_iter().map(|(_, f)| f),
        edges,
    )
    .map_err(|e| err(0, e.into()))
}
