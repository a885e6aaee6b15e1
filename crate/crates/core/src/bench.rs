//! Query latency measurement on trie-shaped automata with a known chain
//! partition, shared by the CLI `bench` command and the acceptance suite.

use std::hint::black_box;
use std::io::{self, Write};
use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::index::build_index;
use crate::oracle::{gen_layered, GenError, LayeredParams};

/// Machine-relative smoke bound on how much the per-character cost may
/// grow across automaton sizes at a fixed number of chains. Not derived
/// from any theoretical constant.
pub const SIZE_RATIO_BOUND: f64 = 3.0;

#[derive(Clone, Debug, PartialEq)]
pub struct BenchCase {
    pub states: usize,
    pub chains: usize,
    pub seed: u64,
    pub sigma: usize,
    pub max_len: usize,
    pub pattern_len: usize,
    pub patterns: usize,
    /// Timed passes over the pattern set; the fastest one is reported.
    pub repeats: usize,
}

impl Default for BenchCase {
    fn default() -> Self {
        Self {
            states: 1000,
            chains: 2,
            seed: 1,
            sigma: 4,
            max_len: 16,
            pattern_len: 8,
            patterns: 2000,
            repeats: 5,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BenchRow {
    pub seed: u64,
    pub states: usize,
    pub edges: usize,
    pub t: usize,
    pub pattern_len: usize,
    pub ns_per_char: f64,
}

pub const CSV_HEADER: &str = "seed,states,edges,t,pattern_len,ns_per_char";

impl BenchRow {
    pub fn csv(&self) -> String {
        format!(
            "{},{},{},{},{},{:.2}",
            self.seed, self.states, self.edges, self.t, self.pattern_len, self.ns_per_char
        )
    }
}

/// Builds the automaton and index for `case`, then times `match_anywhere`
/// over sampled patterns that occur in it. `None` when there are no
/// patterns to time.
pub fn run_case(case: &BenchCase) -> Result<Option<BenchRow>, GenError> {
    if case.patterns == 0 || case.pattern_len == 0 {
        return Ok(None);
    }
    let g = gen_layered(&LayeredParams {
        states: case.states,
        chains: case.chains,
        sigma: case.sigma,
        max_len: case.max_len,
        seed: case.seed,
    })?;
    let idx = build_index(&g.nfa, &g.partition).expect("partition matches the automaton");
    let mut rng = ChaCha8Rng::seed_from_u64(case.seed ^ 0x5eed);
    let patterns: Vec<_> = (0..case.patterns)
        .map(|_| g.sample_pattern(case.pattern_len, &mut rng))
        .collect();
    // warm-up
    for p in &patterns {
        black_box(idx.match_anywhere(black_box(p)));
    }
    let mut best = f64::INFINITY;
    for _ in 0..case.repeats.max(1) {
        let start = Instant::now();
        for p in &patterns {
            black_box(idx.match_anywhere(black_box(p)));
        }
        let ns = start.elapsed().as_nanos() as f64;
        best = best.min(ns / (patterns.len() * case.pattern_len) as f64);
    }
    Ok(Some(BenchRow {
        seed: case.seed,
        states: g.nfa.num_states(),
        edges: g.nfa.num_edges(),
        t: g.partition.num_chains(),
        pattern_len: case.pattern_len,
        ns_per_char: best,
    }))
}

pub fn write_csv(rows: &[BenchRow], mut out: impl Write) -> io::Result<()> {
    writeln!(out, "{CSV_HEADER}")?;
    for r in rows {
        writeln!(out, "{}", r.csv())?;
    }
    Ok(())
}

/// Largest over smallest per-character cost.
pub fn spread(rows: &[BenchRow]) -> f64 {
    let lo = rows.iter().map(|r| r.ns_per_char).fold(f64::INFINITY, f64::min);
    let hi = rows.iter().map(|r| r.ns_per_char).fold(0.0, f64::max);
    hi / lo
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_case_runs() {
        let row = run_case(&BenchCase {
            states: 100,
            patterns: 50,
            repeats: 1,
            ..BenchCase::default()
        })
        .unwrap()
        .unwrap();
        assert_eq!(row.t, 2);
        assert!(row.states >= 100);
        assert_eq!(row.edges, row.states - 1);
        assert!(row.ns_per_char > 0.0);
    }

    #[test]
    fn no_patterns_no_rows() {
        let case = BenchCase {
            patterns: 0,
            ..BenchCase::default()
        };
        assert_eq!(run_case(&case).unwrap(), None);
        let mut out = Vec::new();
        write_csv(&[], &mut out).unwrap();
        assert_eq!(String::from_utf8(out).unwrap(), format!("{CSV_HEADER}\n"));
    }
}
