//! Brute-force conflict reference over a [`ModelContract`]'s ground truth.
//!
//! Everything here works on plain strings and index sets: transitive
//! accesses come from a Floyd–Warshall closure, and every transactional
//! pair is checked with the set definitions directly.

use std::collections::BTreeSet;

use crate::gen::ModelContract;

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct OracleConflict {
    pub first: String,
    pub second: String,
    pub kind: &'static str,
    pub variables: BTreeSet<String>,
}

/// Reflexive-transitive reachability matrix of a call relation.
pub fn reachability(calls: &[BTreeSet<usize>]) -> Vec<Vec<bool>> {
    let n = calls.len();
    let mut r = vec![vec![false; n]; n];
    for (i, out) in calls.iter().enumerate() {
        r[i][i] = true;
        for &j in out {
            r[i][j] = true;
        }
    }
    for k in 0..n {
        for i in 0..n {
            if r[i][k] {
                let via = r[k].clone();
                for (cell, hit) in r[i].iter_mut().zip(via) {
                    *cell |= hit;
                }
            }
        }
    }
    r
}

struct Sets {
    key: String,
    reads: BTreeSet<String>,
    writes: BTreeSet<String>,
    t_reads: BTreeSet<String>,
    t_writes: BTreeSet<String>,
    read_only: bool,
}

fn closure(m: &ModelContract) -> Vec<Sets> {
    let calls: Vec<_> = m.functions.iter().map(|f| f.calls.clone()).collect();
    let reach = reachability(&calls);
    let q = |vs: &BTreeSet<String>| vs.iter().map(|v| m.qualified(v)).collect::<BTreeSet<_>>();
    let mut sets: Vec<Sets> = m
        .functions
        .iter()
        .enumerate()
        .filter(|(_, f)| f.is_transactional())
        .map(|(i, f)| {
            let mut t_reads = BTreeSet::new();
            let mut t_writes = BTreeSet::new();
            for (j, g) in m.functions.iter().enumerate() {
                if reach[i][j] {
                    t_reads.extend(q(&g.reads));
                    t_writes.extend(q(&g.writes));
                }
            }
            Sets {
                key: m.key(i),
                reads: q(&f.reads),
                writes: q(&f.writes),
                t_reads,
                t_writes,
                read_only: f.is_read_only(),
            }
        })
        .collect();
    sets.sort_by(|a, b| a.key.cmp(&b.key));
    sets
}

fn and(a: &BTreeSet<String>, b: &BTreeSet<String>) -> BTreeSet<String> {
    a.intersection(b).cloned().collect()
}

/// Every conflict the analyzer should report for `m`, canonically sorted.
pub fn oracle_conflicts(m: &ModelContract) -> Vec<OracleConflict> {
    let sets = closure(m);
    let mut out = Vec::new();
    for (i, a) in sets.iter().enumerate() {
        for b in &sets[i + 1..] {
            if a.read_only && b.read_only {
                continue;
            }
            let ww = and(&a.writes, &b.writes);
            let rw: BTreeSet<String> = and(&a.reads, &b.writes)
                .union(&and(&b.reads, &a.writes))
                .filter(|v| !ww.contains(*v))
                .cloned()
                .collect();
            let mut transitive = and(&a.t_writes, &b.t_writes);
            transitive.extend(and(&a.t_reads, &b.t_writes));
            transitive.extend(and(&b.t_reads, &a.t_writes));
            let fc: BTreeSet<String> = transitive
                .into_iter()
                .filter(|v| !ww.contains(v) && !rw.contains(v))
                .collect();
            for (kind, vars) in [("RWC", rw), ("WWC", ww), ("FCC", fc)] {
                if !vars.is_empty() {
                    out.push(OracleConflict {
                        first: a.key.clone(),
                        second: b.key.clone(),
                        kind,
                        variables: vars,
                    });
                }
            }
        }
    }
    out.sort();
    out
}

/// Transactional pairs whose transitive accesses share a variable that at
/// least one side writes.
pub fn pairs_with_shared_write(m: &ModelContract) -> BTreeSet<(String, String)> {
    let sets = closure(m);
    let mut out = BTreeSet::new();
    for (i, a) in sets.iter().enumerate() {
        for b in &sets[i + 1..] {
            let a_all: BTreeSet<_> = a.t_reads.union(&a.t_writes).cloned().collect();
            let b_all: BTreeSet<_> = b.t_reads.union(&b.t_writes).cloned().collect();
            let hit = a_all.iter().any(|v| b.t_writes.contains(v))
                || b_all.iter().any(|v| a.t_writes.contains(v));
            if hit {
                out.insert((a.key.clone(), b.key.clone()));
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gen::{generate, random_call_graph, GenConfig};

    #[test]
    fn reachability_handles_cycles() {
        let calls = vec![
            [1].into_iter().collect(),
            [0, 2].into_iter().collect(),
            BTreeSet::new(),
        ];
        let r = reachability(&calls);
        assert!(r[0][2] && r[1][0] && r[2][2]);
        assert!(!r[2][0]);
    }

    #[test]
    fn generation_is_seeded() {
        let cfg = GenConfig::default();
        assert_eq!(generate(7, &cfg, "G"), generate(7, &cfg, "G"));
        assert_ne!(generate(7, &cfg, "G").render(), generate(8, &cfg, "G").render());
    }

    #[test]
    fn generated_mutability_is_consistent() {
        for seed in 0..200 {
            let m = generate(seed, &GenConfig::default(), "G");
            assert!(m.functions.len() <= 8 && m.vars.len() <= 6);
            for f in &m.functions {
                if f.mutability == 0 {
                    assert!(f.reads.is_empty() && f.writes.is_empty());
                }
                if f.mutability <= 1 {
                    assert!(f.writes.is_empty());
                }
                for &c in &f.calls {
                    assert!(m.functions[c].mutability <= f.mutability);
                }
            }
        }
    }

    #[test]
    fn call_graphs_have_cycles() {
        for seed in 0..50 {
            let g = random_call_graph(seed, 1 + seed as usize % 12, 4);
            let r = reachability(&g.calls);
            let cyclic = (0..g.calls.len())
                .any(|i| g.calls[i].iter().any(|&j| r[j][i]));
            assert!(cyclic, "seed {seed}");
        }
    }
}
