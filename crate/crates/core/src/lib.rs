//! Co-lex orders on finite automata and an interval-based path index.
//!
//! The pipeline is: parse or generate an [`Nfa`], compute the order
//! [`triangle_order`], split it into chains with [`min_chain_partition`],
//! then [`build_index`] and query it.

pub mod automaton;
pub mod bench;
pub mod colex;
pub mod index;
pub mod oracle;
pub mod order;
pub mod relation;

pub use automaton::{parse_nfa, validate, Alphabet, Dfa, Edge, Nfa, StateId, Symbol};
pub use index::{build_index, IntervalTuple, PathIndex};
pub use colex::{build_triangle, check_colex, closure_with_pair, rho_exists, triangle_order};
pub use order::{min_chain_partition, order_width, ChainPartition};
pub use relation::{PartialOrder, Relation};
