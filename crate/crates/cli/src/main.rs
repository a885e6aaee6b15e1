//! `colex`: validate, order and index automata from the command line.
//!
//! Exit codes: 0 success, 1 domain failure (invalid automaton, empty
//! language, enumeration budget), 2 I/O, format or usage error.

use std::fs;
use std::io::{self, BufRead, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;

use nfa_colex::automaton::{normalize, normalize_with_names, parse_automaton, powerset, validate, Nfa, UNKNOWN_SYMBOL};
use nfa_colex::bench::{run_case, write_csv, BenchCase};
use nfa_colex::colex::compute_triangle;
use nfa_colex::index::{build_index, PathIndex};
use nfa_colex::oracle::{exact_width, gen_lp, gen_primes_nfa, gen_random_nfa, EnumerationBudget, RandomNfaParams};
use nfa_colex::order::{min_chain_partition, order_width};

#[derive(Parser, Debug)]
#[command(name = "colex", version, about = "Co-lex orders and path indexes for NFAs")]
struct Cli {
    /// Print reports as JSON.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check the four structural assumptions.
    Validate { input: PathBuf },
    /// Trim and split states so that all assumptions hold.
    Normalize {
        input: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
        /// Write `state name` lines tracing each state to the input.
        #[arg(long)]
        names: Option<PathBuf>,
    },
    /// Subset construction.
    Powerset {
        input: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
        /// Write `state: members` lines for every DFA state here.
        #[arg(long)]
        subsets: Option<PathBuf>,
    },
    /// Compute ⊴, its width and a minimum chain partition.
    Order(OrderArgs),
    /// Build and save a path index.
    Build {
        input: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
        /// Also write a structural dump of the index as JSON.
        #[arg(long)]
        dump_json: Option<PathBuf>,
    },
    /// Query an index with one pattern, or one pattern per stdin line.
    Query(QueryArgs),
    /// Time queries on generated automata and print CSV.
    Bench(BenchArgs),
    /// Print automata from the generator families.
    Gen {
        #[command(subcommand)]
        family: GenFamily,
        #[arg(short, long, global = true)]
        output: Option<PathBuf>,
    },
    /// Print the header and sizes of an index file.
    Inspect { index: PathBuf },
}

#[derive(Args, Debug)]
struct OrderArgs {
    input: PathBuf,
    /// Print ρ_∃ and the strict pairs of ⊴ as `u v` lines.
    #[arg(long)]
    dump_pairs: bool,
    /// Print `state chain position` lines.
    #[arg(long)]
    dump_chains: bool,
    /// Also compute the exact width by enumeration.
    #[arg(long)]
    exact: bool,
    /// State limit for `--exact`.
    #[arg(long, default_value_t = 5)]
    max_states: usize,
    /// Normalize the input first instead of rejecting it.
    #[arg(long)]
    normalize: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Mode {
    /// States reached by a path whose label ends with the pattern.
    Anywhere,
    /// States reached from the initial state by the whole pattern.
    Member,
}

#[derive(Args, Debug)]
struct QueryArgs {
    index: PathBuf,
    /// Pattern; read from stdin, one per line, when absent.
    pattern: Option<String>,
    #[arg(long, value_enum, default_value_t = Mode::Anywhere)]
    mode: Mode,
    /// Print the number of states.
    #[arg(long)]
    count: bool,
    /// Print the state ids.
    #[arg(long)]
    locate: bool,
    /// Print whether the pattern is accepted.
    #[arg(long)]
    member: bool,
}

#[derive(Args, Debug)]
struct BenchArgs {
    /// State counts for the fixed-chain sweep.
    #[arg(long, value_delimiter = ',', default_values_t = [100, 1000, 10000])]
    sizes: Vec<usize>,
    /// Chains for the size sweep.
    #[arg(long, default_value_t = 2)]
    chains: usize,
    /// Chain counts for the fixed-size sweep.
    #[arg(long, value_delimiter = ',', default_values_t = [1, 2, 4, 8])]
    chain_sweep: Vec<usize>,
    /// State count for the chain sweep.
    #[arg(long, default_value_t = 1000)]
    sweep_states: usize,
    #[arg(long, value_delimiter = ',', default_values_t = [1])]
    seeds: Vec<u64>,
    /// Patterns per automaton.
    #[arg(long, default_value_t = 2000)]
    patterns: usize,
    #[arg(long, default_value_t = 8)]
    pattern_len: usize,
    #[arg(long, default_value_t = 4)]
    sigma: usize,
    /// Longest string inserted into the generating tries.
    #[arg(long, default_value_t = 16)]
    max_len: usize,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum GenFamily {
    /// DFA for a^(kp).
    Lp { p: usize },
    /// NFA for a^r with some listed prime dividing r.
    Primes {
        #[arg(required = true)]
        primes: Vec<usize>,
    },
    /// Seeded random automaton.
    Random {
        #[arg(long, default_value_t = 8)]
        states: usize,
        #[arg(long, default_value_t = 2)]
        labels: usize,
        #[arg(long, default_value_t = 0.2)]
        density: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        deterministic: bool,
    },
}

enum Failure {
    /// Exit 1. The report, if any, is already printed.
    Domain(String),
    /// Exit 2.
    Io(String),
}

type Outcome = Result<(), Failure>;

fn io_err(what: impl std::fmt::Display, e: impl std::fmt::Display) -> Failure {
    Failure::Io(format!("{what}: {e}"))
}

fn read_text(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| io_err(path.display(), e))
}

fn write_file(path: &Path, bytes: &[u8]) -> Outcome {
    fs::write(path, bytes).map_err(|e| io_err(path.display(), e))
}

/// Writes to `path`, or stdout when absent.
fn emit(path: Option<&Path>, text: &str) -> Outcome {
    match path {
        Some(p) => write_file(p, text.as_bytes()),
        None => {
            let mut out = io::stdout().lock();
            out.write_all(text.as_bytes()).map_err(|e| io_err("stdout", e))
        }
    }
}

fn print(text: impl AsRef<str>) -> Outcome {
    let mut out = io::stdout().lock();
    writeln!(out, "{}", text.as_ref()).map_err(|e| io_err("stdout", e))
}

/// Parses and requires all four assumptions.
fn load_valid(path: &Path) -> Result<Nfa, Failure> {
    let text = read_text(path)?;
    let a = parse_automaton(&text).map_err(|e| io_err(path.display(), e))?;
    let report = validate(&a);
    if !report.is_empty() {
        return Err(Failure::Domain(format!("{}: invalid automaton\n{report}", path.display())));
    }
    Ok(a)
}

fn load_index(path: &Path) -> Result<PathIndex, Failure> {
    let bytes = fs::read(path).map_err(|e| io_err(path.display(), e))?;
    PathIndex::deserialize(&bytes).map_err(|e| io_err(path.display(), e))
}

fn cmd_validate(json: bool, input: &Path) -> Outcome {
    let text = read_text(input)?;
    let a = parse_automaton(&text).map_err(|e| io_err(input.display(), e))?;
    let report = validate(&a);
    if json {
        let violations: Vec<_> = report
            .violations
            .iter()
            .map(|v| json!({"assumption": v.assumption(), "message": v.to_string()}))
            .collect();
        print(json!({"valid": report.is_empty(), "violations": violations}).to_string())?;
    } else {
        print(report.to_string().trim_end())?;
    }
    if report.is_empty() {
        Ok(())
    } else {
        Err(Failure::Domain(String::new()))
    }
}

fn cmd_normalize(input: &Path, output: Option<&Path>, names: Option<&Path>) -> Outcome {
    let text = read_text(input)?;
    let a = parse_automaton(&text).map_err(|e| io_err(input.display(), e))?;
    let (b, origin) =
        normalize_with_names(&a).map_err(|e| Failure::Domain(format!("{}: {e}", input.display())))?;
    emit(output, &b.to_string())?;
    if let Some(path) = names {
        let lines: String = origin.iter().enumerate().map(|(q, n)| format!("{q} {n}\n")).collect();
        write_file(path, lines.as_bytes())?;
    }
    Ok(())
}

fn cmd_powerset(json: bool, input: &Path, output: Option<&Path>, subsets: Option<&Path>) -> Outcome {
    let a = load_valid(input)?;
    let p = powerset(&a);
    emit(output, &p.dfa.to_string())?;
    if let Some(path) = subsets {
        let text = if json {
            serde_json::to_string(&p.subsets).expect("vectors serialize") + "\n"
        } else {
            p.subsets
                .iter()
                .enumerate()
                .map(|(q, s)| {
                    let members: Vec<String> = s.iter().map(|u| u.to_string()).collect();
                    format!("{q}: {}\n", members.join(" "))
                })
                .collect()
        };
        write_file(path, text.as_bytes())?;
    }
    Ok(())
}

#[derive(Serialize)]
struct OrderReport {
    states: usize,
    width: usize,
    chains: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    exact: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    rho_exists: Option<Vec<(usize, usize)>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    order: Option<Vec<(usize, usize)>>,
    /// `(state, chain, position)`, chains numbered from 1.
    #[serde(skip_serializing_if = "Option::is_none")]
    chain_of: Option<Vec<(usize, usize, usize)>>,
}

fn cmd_order(json: bool, args: &OrderArgs) -> Outcome {
    let a = if args.normalize {
        let text = read_text(&args.input)?;
        let raw = parse_automaton(&text).map_err(|e| io_err(args.input.display(), e))?;
        normalize(&raw).map_err(|e| Failure::Domain(format!("{}: {e}", args.input.display())))?
    } else {
        load_valid(&args.input)?
    };
    let n = a.num_states();
    let rank: Vec<usize> = (0..n).collect();
    let tri = compute_triangle(&a, &rank).expect("identity enumeration");
    let width = order_width(&tri.order);
    let cp = min_chain_partition(&tri.order);
    let exact = if args.exact {
        let budget = EnumerationBudget::default().with_max_states(args.max_states);
        Some(exact_width(&a, &budget).map_err(|e| Failure::Domain(format!("--exact: {e}")))?)
    } else {
        None
    };
    let report = OrderReport {
        states: n,
        width,
        chains: cp.num_chains(),
        exact,
        rho_exists: args.dump_pairs.then(|| tri.rho_exists.pairs().collect()),
        order: args.dump_pairs.then(|| tri.order.relation().pairs().collect()),
        chain_of: args.dump_chains.then(|| {
            (0..n)
                .map(|u| {
                    let (c, p) = cp.coords(u);
                    (u, c + 1, p)
                })
                .collect()
        }),
    };
    if json {
        return print(serde_json::to_string(&report).expect("report serializes"));
    }
    let mut out = format!("states {n}\nwidth {width}\nchains {}\n", report.chains);
    if let Some(e) = exact {
        out += &format!("exact {e}\norder {width}\nmatch {}\n", if e == width { "yes" } else { "no" });
    }
    let pairs = |title: &str, list: &[(usize, usize)]| {
        let mut s = format!("# {title}\n");
        for (u, v) in list {
            s += &format!("{u} {v}\n");
        }
        s
    };
    if let (Some(rho), Some(ord)) = (&report.rho_exists, &report.order) {
        out += &pairs("rho_exists", rho);
        out += &pairs("order", ord);
    }
    if let Some(rows) = &report.chain_of {
        out += "# state chain position\n";
        for (u, c, p) in rows {
            out += &format!("{u} {c} {p}\n");
        }
    }
    emit(None, &out)
}

fn index_dump(idx: &PathIndex) -> serde_json::Value {
    let sigma = idx.alphabet();
    let chains: Vec<_> = (0..idx.num_chains())
        .map(|i| {
            let len = idx.chain_len(i);
            let nodes: Vec<_> = (1..=len)
                .map(|k| {
                    let out: Vec<_> = idx
                        .out(i, k)
                        .into_iter()
                        .map(|(a, j, q)| {
                            json!({
                                "label": sigma.char_of(a).map(String::from),
                                "chain": j + 1,
                                "position": q,
                            })
                        })
                        .collect();
                    json!({
                        "position": k,
                        "state": idx.state_at(i, k),
                        "final": idx.is_final_at(i, k),
                        "out": out,
                    })
                })
                .collect();
            json!({"chain": i + 1, "length": len, "nodes": nodes})
        })
        .collect();
    let s = idx.stats();
    let (ic, ip) = idx.initial_coords();
    json!({
        "chains": s.chains,
        "states": s.states,
        "edges": s.edges,
        "alphabet": sigma.chars().iter().map(|c| c.to_string()).collect::<Vec<_>>(),
        "key_bits": s.key_bits,
        "heap_words": s.heap_words,
        "initial": {"chain": ic + 1, "position": ip},
        "layout": chains,
    })
}

fn cmd_build(json: bool, input: &Path, output: &Path, dump: Option<&Path>) -> Outcome {
    let a = load_valid(input)?;
    let cp = min_chain_partition(&nfa_colex::colex::triangle_order(&a));
    let idx = build_index(&a, &cp).expect("partition of the same automaton");
    let bytes = idx.serialize();
    write_file(output, &bytes)?;
    if let Some(path) = dump {
        let text = serde_json::to_string_pretty(&index_dump(&idx)).expect("dump serializes") + "\n";
        write_file(path, text.as_bytes())?;
    }
    let t = idx.num_chains();
    if json {
        print(
            json!({"t": t, "states": a.num_states(), "edges": a.num_edges(), "bytes": bytes.len()})
                .to_string(),
        )
    } else {
        print(format!(
            "t {t}\nstates {}\nedges {}\nbytes {}",
            a.num_states(),
            a.num_edges(),
            bytes.len()
        ))
    }
}

#[derive(Serialize)]
struct QueryResult {
    pattern: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    count: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    states: Option<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    member: Option<bool>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    unknown: Vec<char>,
}

fn cmd_query(json: bool, args: &QueryArgs) -> Outcome {
    let idx = load_index(&args.index)?;
    let patterns: Vec<String> = match &args.pattern {
        Some(p) => vec![p.clone()],
        None => io::stdin()
            .lock()
            .lines()
            .map(|l| l.map(|s| s.trim_end_matches('\r').to_string()))
            .collect::<Result<_, _>>()
            .map_err(|e| io_err("stdin", e))?,
    };
    let count = args.count || !(args.locate || args.member);
    let results: Vec<QueryResult> = patterns
        .par_iter()
        .map(|p| {
            let word = idx.alphabet().encode(p);
            let unknown: Vec<char> = p
                .chars()
                .zip(&word)
                .filter(|(_, &s)| s == UNKNOWN_SYMBOL)
                .map(|(c, _)| c)
                .collect();
            let iv = match args.mode {
                Mode::Anywhere => idx.match_anywhere(&word),
                Mode::Member => idx.match_from_start(&word),
            };
            QueryResult {
                pattern: p.clone(),
                count: count.then(|| idx.count(&iv)),
                states: args.locate.then(|| idx.locate(&iv)),
                member: args.member.then(|| idx.is_member(&word)),
                unknown,
            }
        })
        .collect();
    let mut out = io::stdout().lock();
    let mut err = io::stderr().lock();
    for (line, r) in results.iter().enumerate() {
        if !r.unknown.is_empty() {
            let chars: String = r.unknown.iter().collect();
            let _ = writeln!(err, "colex: pattern {}: symbols not in the alphabet: {chars:?}", line + 1);
        }
        let text = if json {
            serde_json::to_string(r).expect("result serializes")
        } else {
            let mut fields = Vec::new();
            if let Some(c) = r.count {
                fields.push(c.to_string());
            }
            if let Some(s) = &r.states {
                fields.push(s.iter().map(|u| u.to_string()).collect::<Vec<_>>().join(" "));
            }
            if let Some(m) = r.member {
                fields.push(m.to_string());
            }
            fields.join("\t")
        };
        writeln!(out, "{text}").map_err(|e| io_err("stdout", e))?;
    }
    Ok(())
}

fn cmd_bench(args: &BenchArgs) -> Outcome {
    let mut cases = Vec::new();
    for &seed in &args.seeds {
        let base = BenchCase {
            seed,
            sigma: args.sigma,
            max_len: args.max_len,
            pattern_len: args.pattern_len,
            patterns: args.patterns,
            ..BenchCase::default()
        };
        for &states in &args.sizes {
            cases.push(BenchCase {
                states,
                chains: args.chains,
                ..base.clone()
            });
        }
        for &chains in &args.chain_sweep {
            cases.push(BenchCase {
                states: args.sweep_states,
                chains,
                ..base.clone()
            });
        }
    }
    let mut rows = Vec::new();
    for case in &cases {
        if let Some(row) = run_case(case).map_err(|e| Failure::Domain(e.to_string()))? {
            rows.push(row);
        }
    }
    let mut buf = Vec::new();
    write_csv(&rows, &mut buf).map_err(|e| io_err("csv", e))?;
    emit(args.output.as_deref(), std::str::from_utf8(&buf).expect("csv is ascii"))
}

fn cmd_gen(family: &GenFamily, output: Option<&Path>) -> Outcome {
    let a = match family {
        GenFamily::Lp { p } => {
            if *p == 0 {
                return Err(Failure::Domain("p must be positive".into()));
            }
            gen_lp(*p).into_nfa()
        }
        GenFamily::Primes { primes } => {
            let mut sorted = primes.clone();
            sorted.sort_unstable();
            sorted.dedup();
            if sorted.len() != primes.len() || primes.contains(&0) {
                return Err(Failure::Domain("primes must be positive and distinct".into()));
            }
            gen_primes_nfa(primes)
        }
        GenFamily::Random {
            states,
            labels,
            density,
            seed,
            deterministic,
        } => gen_random_nfa(&RandomNfaParams {
            states: *states,
            labels: *labels,
            density: *density,
            seed: *seed,
            deterministic: *deterministic,
        })
        .map_err(|e| Failure::Domain(e.to_string()))?,
    };
    emit(output, &a.to_string())
}

fn cmd_inspect(json: bool, path: &Path) -> Outcome {
    let idx = load_index(path)?;
    let s = idx.stats();
    let alphabet: String = idx.alphabet().chars().iter().collect();
    if json {
        return print(
            json!({
                "version": 1,
                "chains": s.chains,
                "states": s.states,
                "edges": s.edges,
                "alphabet": alphabet,
                "chain_lengths": s.chain_lengths,
                "key_bits": s.key_bits,
                "heap_words": s.heap_words,
            })
            .to_string(),
        );
    }
    let lengths: Vec<String> = s.chain_lengths.iter().map(|l| l.to_string()).collect();
    print(format!(
        "version 1\nchains {}\nstates {}\nedges {}\nalphabet {alphabet}\nchain_lengths {}\nkey_bits {}\nheap_words {}",
        s.chains,
        s.states,
        s.edges,
        lengths.join(" "),
        s.key_bits,
        s.heap_words
    ))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let json = cli.json;
    let result = match &cli.command {
        Command::Validate { input } => cmd_validate(json, input),
        Command::Normalize {
            input,
            output,
            names,
        } => cmd_normalize(input, output.as_deref(), names.as_deref()),
        Command::Powerset {
            input,
            output,
            subsets,
        } => cmd_powerset(json, input, output.as_deref(), subsets.as_deref()),
        Command::Order(args) => cmd_order(json, args),
        Command::Build {
            input,
            output,
            dump_json,
        } => cmd_build(json, input, output, dump_json.as_deref()),
        Command::Query(args) => cmd_query(json, args),
        Command::Bench(args) => cmd_bench(args),
        Command::Gen { family, output } => cmd_gen(family, output.as_deref()),
        Command::Inspect { index } => cmd_inspect(json, index),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Domain(msg)) => {
            if !msg.is_empty() {
                eprintln!("colex: {msg}");
            }
            ExitCode::from(1)
        }
        Err(Failure::Io(msg)) => {
            eprintln!("colex: {msg}");
            ExitCode::from(2)
        }
    }
}
