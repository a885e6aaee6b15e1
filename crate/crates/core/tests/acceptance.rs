//! Acceptance suite: twelve criteria, one PASS/FAIL line each.
//!
//! Runs without the libtest harness so the lines always reach stdout.
//! Exits non-zero if any criterion fails.

use std::panic::{self, AssertUnwindSafe};
use std::process::ExitCode;
use std::sync::Mutex;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use nfa_colex::automaton::{parse_nfa, powerset, run, validate, Nfa, Symbol, UNKNOWN_SYMBOL};
use nfa_colex::bench::{run_case, spread, BenchCase, SIZE_RATIO_BOUND};
use nfa_colex::colex::{check_colex, closure_with_pair, rho_exists, triangle_order};
use nfa_colex::index::{build_index, BitVector, PathIndex, RangeMinMax, WaveletTree};
use nfa_colex::oracle::{
    all_words, colex_pair_union, enumerate_colex_orders, exact_width, gen_lp, gen_primes_nfa,
    gen_random_nfa, naive_b, EnumerationBudget, RandomNfaParams,
};
use nfa_colex::order::{is_convex, min_chain_partition, order_width, transitive_reflexive_closure};
use nfa_colex::relation::{PartialOrder, Relation};

const TWO_CHAINS: &str = "\
alphabet a b x y z
states 7
initial 0
final 5 6
edge 0 1 a
edge 0 2 b
edge 1 3 x
edge 1 4 x
edge 2 4 x
edge 3 3 x
edge 3 5 y
edge 4 4 x
edge 4 6 z
";

type Check = fn() -> Result<(), String>;

// extra text for the current criterion's result line
static DETAIL: Mutex<String> = Mutex::new(String::new());

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        if !$cond {
            return Err(format!($($fmt)+));
        }
    };
}

fn two_chains() -> Nfa {
    parse_nfa(TWO_CHAINS).expect("fixture parses")
}

fn width(a: &Nfa) -> usize {
    order_width(&triangle_order(a))
}

/// Random NFAs with at most five states; every fourth one deterministic.
fn small_corpus(count: u64) -> Vec<Nfa> {
    (0..count)
        .map(|seed| {
            gen_random_nfa(&RandomNfaParams {
                states: 5,
                labels: 2,
                density: 0.3,
                seed,
                deterministic: seed % 4 == 0,
            })
            .expect("generator succeeds")
        })
        .collect()
}

fn medium_corpus() -> Vec<Nfa> {
    (0..100u64)
        .map(|seed| {
            gen_random_nfa(&RandomNfaParams {
                states: 12,
                labels: 3,
                density: 0.12,
                seed: 1000 + seed,
                deterministic: seed % 5 == 0,
            })
            .expect("generator succeeds")
        })
        .collect()
}

fn c1_two_chains() -> Result<(), String> {
    let a = two_chains();
    ensure!(validate(&a).is_empty(), "fixture invalid");
    let w = width(&a);
    ensure!(w == 2, "width(⊴) = {w}, want 2");
    let rho = rho_exists(&a);
    ensure!(!rho.contains(3, 4) && !rho.contains(4, 3), "3 and 4 related in ρ_∃");
    let labels = a.labels();
    let mut rel = Relation::from_pairs(7, [(0, 1), (1, 3), (3, 5), (0, 2), (2, 4), (4, 6)]);
    for u in 0..7 {
        for v in 0..7 {
            if labels[u] < labels[v] {
                rel.insert(u, v);
            }
        }
    }
    let ord = PartialOrder::certify(transitive_reflexive_closure(&rel)).map_err(|e| e.to_string())?;
    ensure!(check_colex(&a, &ord).is_ok(), "given order is not co-lex: {:?}", check_colex(&a, &ord));
    Ok(())
}

fn c2_lp_family() -> Result<(), String> {
    for p in 1..=6 {
        let w = width(&gen_lp(p));
        ensure!(w == p, "p = {p}: width(⊴) = {w}");
        if p <= 4 {
            let e = exact_width(&gen_lp(p), &EnumerationBudget::default()).map_err(|e| e.to_string())?;
            ensure!(e == p, "p = {p}: exact width {e}");
        }
    }
    Ok(())
}

fn c3_cycles() -> Result<(), String> {
    for m in 2..=5 {
        // the m-cycle 1..=m entered from 0
        let a = gen_lp(m);
        let budget = EnumerationBudget::default().with_max_states(m + 1);
        let orders = enumerate_colex_orders(&a, &budget).map_err(|e| e.to_string())?;
        ensure!(!orders.is_empty(), "m = {m}: no co-lex order found");
        for o in &orders {
            for u in 1..=m {
                for v in u + 1..=m {
                    ensure!(!o.comparable(u, v), "m = {m}: cycle states {u}, {v} comparable");
                }
            }
        }
        let e = exact_width(&a, &budget).map_err(|e| e.to_string())?;
        ensure!(e >= m, "m = {m}: exact width {e}");
    }
    Ok(())
}

fn c4_powerset_bound() -> Result<(), String> {
    small_corpus(200)
        .par_iter()
        .enumerate()
        .try_for_each(|(seed, a)| {
            let e = exact_width(a, &EnumerationBudget::default()).map_err(|e| e.to_string())?;
            let p = powerset(a);
            ensure!(validate(&p.dfa).is_empty(), "seed {seed}: powerset invalid");
            let w = width(&p.dfa);
            ensure!(w < 1 << e, "seed {seed}: width(A*) = {w} > 2^{e} - 1");
            Ok(())
        })
}

fn c5_primes() -> Result<(), String> {
    let a = gen_primes_nfa(&[2, 3]);
    let w = width(&a);
    ensure!(w <= 5, "width(⊴) of the NFA = {w}, want ≤ 5");
    let d = width(&powerset(&a).dfa);
    ensure!(d >= 6, "width(⊴) of the powerset = {d}, want ≥ 6");
    Ok(())
}

fn c6_algorithm1() -> Result<(), String> {
    small_corpus(300)
        .par_iter()
        .enumerate()
        .try_for_each(|(seed, a)| {
            let union = colex_pair_union(a, &EnumerationBudget::default()).map_err(|e| e.to_string())?;
            let n = a.num_states();
            for u in 0..n {
                for v in 0..n {
                    if u == v {
                        continue;
                    }
                    let closure = closure_with_pair(a, u, v);
                    ensure!(
                        closure.is_some() == union.contains(u, v),
                        "seed {seed}, pair ({u},{v}): closure {} but enumerator {}",
                        closure.is_some(),
                        union.contains(u, v)
                    );
                    if let Some(rho) = closure {
                        let ord = PartialOrder::certify(transitive_reflexive_closure(&rho))
                            .map_err(|e| format!("seed {seed}, ({u},{v}): {e}"))?;
                        ensure!(ord.less(u, v), "seed {seed}: closure misses ({u},{v})");
                        ensure!(check_colex(a, &ord).is_ok(), "seed {seed}, ({u},{v}): closure not co-lex");
                    }
                }
            }
            Ok(())
        })
}

fn c7_width_domination() -> Result<(), String> {
    let dfas = small_corpus(300)
        .par_iter()
        .enumerate()
        .map(|(seed, a)| {
            let e = exact_width(a, &EnumerationBudget::default()).map_err(|e| e.to_string())?;
            let w = width(a);
            ensure!(w <= e, "seed {seed}: width(⊴) = {w} > exact {e}");
            if a.is_deterministic() {
                ensure!(w == e, "seed {seed}: DFA with width(⊴) = {w} ≠ exact {e}");
                return Ok(1);
            }
            Ok(0)
        })
        .collect::<Result<Vec<usize>, String>>()?;
    let dfas: usize = dfas.iter().sum();
    ensure!(dfas >= 50, "corpus has only {dfas} DFAs");
    Ok(())
}

fn c8_convexity() -> Result<(), String> {
    medium_corpus().par_iter().enumerate().try_for_each(|(k, a)| {
        let ord = triangle_order(a);
        for w in all_words(a.sigma(), 5) {
            let b = naive_b(a, &w);
            ensure!(is_convex(&ord, &b), "automaton {k}: B({w:?}) = {b:?} not convex");
            let from_s = run(a, &[a.initial()], &w);
            ensure!(is_convex(&ord, &from_s), "automaton {k}: δ(s, {w:?}) = {from_s:?} not convex");
        }
        Ok(())
    })
}

fn random_pattern(a: &Nfa, rng: &mut ChaCha8Rng) -> Vec<Symbol> {
    let len = rng.gen_range(0..=8);
    match rng.gen_range(0..10) {
        // label of a random walk, so that long matches occur
        0..=5 => {
            let mut u = rng.gen_range(0..a.num_states());
            let mut w = Vec::with_capacity(len);
            for _ in 0..len {
                let succ = a.successors(u);
                if succ.is_empty() {
                    break;
                }
                let (label, v) = succ[rng.gen_range(0..succ.len())];
                w.push(label);
                u = v;
            }
            w
        }
        6 => {
            let mut w: Vec<Symbol> = (0..len).map(|_| rng.gen_range(1..=a.sigma().max(1) as Symbol)).collect();
            if !w.is_empty() {
                let i = rng.gen_range(0..w.len());
                w[i] = UNKNOWN_SYMBOL;
            }
            w
        }
        _ => (0..len).map(|_| rng.gen_range(1..=a.sigma().max(1) as Symbol)).collect(),
    }
}

fn check_index(a: &Nfa, idx: &PathIndex, patterns: usize, seed: u64) -> Result<(), String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..patterns {
        let p = random_pattern(a, &mut rng);
        let mut any = idx.full();
        let mut from = idx.start();
        for &c in &p {
            let (slow, fast) = (idx.extend(&any, c), idx.extend_fast(&any, c));
            ensure!(slow == fast, "{p:?}: extend {slow} vs extend_fast {fast}");
            let (slow_s, fast_s) = (idx.extend(&from, c), idx.extend_fast(&from, c));
            ensure!(slow_s == fast_s, "{p:?}: anchored extend {slow_s} vs {fast_s}");
            any = fast;
            from = fast_s;
        }
        ensure!(any == idx.match_anywhere(&p), "{p:?}: fold differs from match_anywhere");
        ensure!(from == idx.match_from_start(&p), "{p:?}: fold differs from match_from_start");
        let want = naive_b(a, &p);
        let got = idx.locate(&any);
        ensure!(got == want, "{p:?}: locate {got:?}, naive {want:?}");
        ensure!(idx.count(&any) == want.len(), "{p:?}: count {}", idx.count(&any));
        let reach = run(a, &[a.initial()], &p);
        ensure!(idx.locate(&from) == reach, "{p:?}: anchored locate differs from run");
        let member = reach.iter().any(|&u| a.is_final(u));
        ensure!(idx.is_member(&p) == member, "{p:?}: is_member {}", !member);
    }
    Ok(())
}

fn index_corpus() -> Vec<Nfa> {
    let mut corpus = medium_corpus();
    corpus.push(two_chains());
    for p in 1..=5 {
        corpus.push(gen_lp(p).into_nfa());
    }
    corpus.push(gen_primes_nfa(&[2, 3]));
    corpus
}

fn index_of(a: &Nfa) -> PathIndex {
    build_index(a, &min_chain_partition(&triangle_order(a))).expect("partition matches")
}

fn c9_index() -> Result<(), String> {
    index_corpus()
        .par_iter()
        .enumerate()
        .try_for_each(|(k, a)| check_index(a, &index_of(a), 10_000, k as u64).map_err(|e| format!("automaton {k}: {e}")))
}

fn c10_succinct() -> Result<(), String> {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    for case in 0..1000 {
        let len = rng.gen_range(0..4000);
        let density = rng.gen_range(0.0..1.0);
        let bits: Vec<bool> = (0..len).map(|_| rng.gen_bool(density)).collect();
        let bv = BitVector::from_bits(bits.iter().copied());
        let prefix: Vec<usize> = std::iter::once(0)
            .chain(bits.iter().scan(0, |c, &b| {
                *c += b as usize;
                Some(*c)
            }))
            .collect();
        for _ in 0..100 {
            let i = rng.gen_range(0..=len);
            ensure!(bv.rank1(i) == prefix[i], "case {case}: rank1({i})");
            if bv.ones() > 0 {
                let k = rng.gen_range(0..bv.ones());
                let s = bv.select1(k).ok_or("select1 failed")?;
                ensure!(bits[s] && prefix[s] == k, "case {case}: select1({k}) = {s}");
                ensure!(bv.select1(bv.rank1(s)) == Some(s), "case {case}: select/rank dual at {k}");
            }
        }
    }
    for case in 0..1000 {
        let height = rng.gen_range(0..6);
        let len = rng.gen_range(0..300);
        let keys: Vec<u32> = (0..len).map(|_| rng.gen_range(0..1u32 << height)).collect();
        let sats: Vec<u32> = (0..len).map(|_| rng.gen()).collect();
        let wt = WaveletTree::new(&keys, &sats, height);
        let mut sorted: Vec<(u32, u32)> = keys.iter().copied().zip(sats.iter().copied()).collect();
        sorted.sort_by_key(|&(k, _)| k);
        ensure!(
            wt.leaves().iter().eq(sorted.iter().map(|(_, s)| s)),
            "case {case}: leaves are not the key-sorted satellites"
        );
        for _ in 0..100 {
            if len > 0 {
                let i = rng.gen_range(0..len);
                ensure!(wt.access(i) == (keys[i], sats[i]), "case {case}: access({i})");
            }
            let l = rng.gen_range(0..=len);
            let r = rng.gen_range(l..=len);
            let key = rng.gen_range(0..1u32 << height);
            let (x, y) = wt.leaf_range(l, r, key);
            let want: Vec<u32> = (l..r).filter(|&i| keys[i] == key).map(|i| sats[i]).collect();
            ensure!(wt.leaves()[x..y] == want[..], "case {case}: leaf range [{l},{r}) key {key}");
        }
    }
    for case in 0..1000 {
        let len = rng.gen_range(1..2000);
        let values: Vec<u32> = (0..len).map(|_| rng.gen_range(0..10_000)).collect();
        let rmq = RangeMinMax::new(&values);
        for _ in 0..100 {
            let l = rng.gen_range(0..len);
            let r = rng.gen_range(l + 1..=len);
            let s = &values[l..r];
            let want = (*s.iter().min().unwrap(), *s.iter().max().unwrap());
            ensure!(rmq.query(&values, l, r) == Some(want), "case {case}: [{l},{r})");
        }
    }
    Ok(())
}

fn c11_serialization() -> Result<(), String> {
    let corpus = index_corpus();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for (k, a) in corpus.iter().take(50).enumerate() {
        let idx = index_of(a);
        let bytes = idx.serialize();
        let back = PathIndex::deserialize(&bytes).map_err(|e| format!("index {k}: {e}"))?;
        ensure!(back.serialize() == bytes, "index {k}: re-serialization differs");
        for _ in 0..100 {
            let p = random_pattern(a, &mut rng);
            ensure!(
                idx.match_anywhere(&p) == back.match_anywhere(&p)
                    && idx.match_from_start(&p) == back.match_from_start(&p)
                    && idx.is_member(&p) == back.is_member(&p),
                "index {k}: {p:?} answered differently after round trip"
            );
            let any = back.match_anywhere(&p);
            ensure!(back.locate(&any) == naive_b(a, &p), "index {k}: {p:?} wrong after round trip");
        }
        ensure!(PathIndex::deserialize(&[]).is_err(), "empty stream accepted");
        for _ in 0..20 {
            let mut bad = bytes.clone();
            let at = rng.gen_range(0..bad.len());
            bad[at] ^= 1 << rng.gen_range(0..8);
            ensure!(PathIndex::deserialize(&bad).is_err(), "index {k}: flipped byte {at} accepted");
            let cut = rng.gen_range(0..bytes.len());
            ensure!(PathIndex::deserialize(&bytes[..cut]).is_err(), "index {k}: prefix {cut} accepted");
        }
        let mut bad = bytes.clone();
        bad[..4].copy_from_slice(b"NOPE");
        let err = PathIndex::deserialize(&bad).err().ok_or("bad magic accepted")?;
        ensure!(err.is_version_mismatch(), "bad magic gave {err}");
    }
    Ok(())
}

fn c12_performance() -> Result<(), String> {
    let mut rows = Vec::new();
    for states in [100, 1_000, 10_000] {
        let row = run_case(&BenchCase {
            states,
            chains: 2,
            seed: 7,
            patterns: 3000,
            repeats: 7,
            ..BenchCase::default()
        })
        .map_err(|e| e.to_string())?
        .ok_or("no rows")?;
        rows.push(row);
    }
    let ratio = spread(&rows);
    let costs: Vec<String> = rows.iter().map(|r| format!("{}:{:.0}ns", r.states, r.ns_per_char)).collect();
    ensure!(
        ratio < SIZE_RATIO_BOUND,
        "per-character cost spread {ratio:.2} ≥ {SIZE_RATIO_BOUND} ({})",
        costs.join(" ")
    );
    let a = gen_random_nfa(&RandomNfaParams {
        states: 200,
        labels: 3,
        density: 0.02,
        seed: 12,
        deterministic: false,
    })
    .map_err(|e| e.to_string())?;
    ensure!(a.num_states() >= 150, "random automaton trimmed to {} states", a.num_states());
    let labels = a.labels();
    let (u, v) = (1..a.num_states())
        .flat_map(|u| (u + 1..a.num_states()).map(move |v| (u, v)))
        .find(|&(u, v)| labels[u] == labels[v])
        .ok_or("no equally labeled pair")?;
    let start = Instant::now();
    std::hint::black_box(closure_with_pair(&a, u, v));
    std::hint::black_box(closure_with_pair(&a, v, u));
    let took = start.elapsed();
    ensure!(took < Duration::from_secs(5), "closure on 200 states took {took:?}");
    *DETAIL.lock().unwrap() = format!("{}, spread {ratio:.2}, closure pair {took:.1?}", costs.join(" "));
    Ok(())
}

fn main() -> ExitCode {
    let criteria: [(&str, Check, Duration); 12] = [
        ("two_chains width and incomparable pair", c1_two_chains, Duration::from_secs(1)),
        ("L_p widths", c2_lp_family, Duration::from_secs(10)),
        ("cycle lower bound", c3_cycles, Duration::from_secs(30)),
        ("powerset width bound", c4_powerset_bound, Duration::from_secs(300)),
        ("primes separation", c5_primes, Duration::from_secs(10)),
        ("pair closure soundness and completeness", c6_algorithm1, Duration::from_secs(600)),
        ("width domination", c7_width_domination, Duration::from_secs(600)),
        ("weak path coherency", c8_convexity, Duration::from_secs(300)),
        ("index queries against oracles", c9_index, Duration::from_secs(600)),
        ("succinct structures", c10_succinct, Duration::from_secs(60)),
        ("serialization round trip", c11_serialization, Duration::from_secs(60)),
        ("performance smoke", c12_performance, Duration::from_secs(600)),
    ];
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (i, (name, check, limit)) in criteria.iter().enumerate() {
        let n = i + 1;
        if !filter.is_empty() && !filter.iter().any(|f| f == &n.to_string()) {
            continue;
        }
        let start = Instant::now();
        let outcome = panic::catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|p| {
            Err(p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panicked".into()))
        });
        let took = start.elapsed();
        let outcome = outcome.and_then(|()| {
            if took <= *limit {
                Ok(())
            } else {
                Err(format!("took {took:.1?}, limit {limit:?}"))
            }
        });
        match outcome {
            Ok(()) => {
                let detail = std::mem::take(&mut *DETAIL.lock().unwrap());
                let detail = if detail.is_empty() { detail } else { format!(" [{detail}]") };
                println!("criterion {n:2} PASS  {name} ({took:.2?}){detail}");
            }
            Err(e) => {
                failed += 1;
                println!("criterion {n:2} FAIL  {name} ({took:.2?}): {e}");
            }
        }
    }
    let _ = panic::take_hook();
    if failed == 0 {
        println!("acceptance: all criteria passed");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: {failed} criteria failed");
        ExitCode::FAILURE
    }
}
