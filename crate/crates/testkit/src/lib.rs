//! Test support: a seeded generator of small Solidity contracts whose
//! state accesses are known by construction, and a brute-force conflict
//! oracle that works on that ground truth without touching the analyzer.

pub mod gen;
pub mod oracle;

pub use gen::{random_call_graph, CallGraph, GenConfig, Generated, ModelContract, ModelFunction};
pub use oracle::{oracle_conflicts, pairs_with_shared_write, reachability, OracleConflict};
