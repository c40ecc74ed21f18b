use std::collections::{BTreeMap, BTreeSet};

use crate::engine::{AnalysisResult, ConflictKind};

/// Width of the conflict-percentage histogram buckets, in percent.
pub const PERCENT_BUCKET: usize = 10;

#[derive(Debug, Clone, PartialEq, Default)]
pub struct AggregateStats {
    pub total_contracts: usize,
    /// Distinct conflicts; a cross-contract conflict listed under both of
    /// its contracts counts once.
    pub total_conflicts: usize,
    pub counts_by_kind: BTreeMap<ConflictKind, usize>,
    /// Share of each kind in percent; `None` when there are no conflicts.
    pub percent_by_kind: Option<BTreeMap<ConflictKind, f64>>,
    pub contracts_with_conflicts: usize,
    /// `contracts_with_conflicts / total_contracts`, 0 for an empty corpus.
    pub contracts_with_conflicts_fraction: f64,
    pub mean_conflicts_per_contract: f64,
    pub max_conflicts_per_contract: usize,
    /// Per-contract conflict ratios in [0, 1], in result order.
    pub conflict_percentages: Vec<f64>,
    /// Counts of contracts per percentage bucket `[10k, 10k+10)`; the last
    /// bucket includes 100.
    pub percentage_histogram: [usize; 100 / PERCENT_BUCKET],
    pub analysis_ms: Vec<u64>,
}

impl AggregateStats {
    pub fn mean_conflict_percentage(&self) -> f64 {
        mean(self.conflict_percentages.iter().copied())
    }

    pub fn mean_analysis_ms(&self) -> f64 {
        mean(self.analysis_ms.iter().map(|&t| t as f64))
    }

    pub fn max_analysis_ms(&self) -> u64 {
        self.analysis_ms.iter().copied().max().unwrap_or(0)
    }

    pub fn total_analysis_ms(&self) -> u64 {
        self.analysis_ms.iter().sum()
    }
}

fn mean(values: impl ExactSizeIterator<Item = f64>) -> f64 {
    let n = values.len();
    if n == 0 {
        0.0
    } else {
        values.sum::<f64>() / n as f64
    }
}

pub fn aggregate(results: &[AnalysisResult]) -> AggregateStats {
    let mut distinct = BTreeSet::new();
    for r in results {
        for c in &r.conflicts {
            distinct.insert((r.path.as_str(), &c.first, &c.second, c.kind));
        }
    }
    let mut counts_by_kind: BTreeMap<ConflictKind, usize> =
        ConflictKind::ALL.iter().map(|k| (*k, 0)).collect();
    for (_, _, _, kind) in &distinct {
        *counts_by_kind.entry(*kind).or_default() += 1;
    }
    let total_conflicts = distinct.len();
    let percent_by_kind = (total_conflicts > 0).then(|| {
        counts_by_kind
            .iter()
            .map(|(k, n)| (*k, 100.0 * *n as f64 / total_conflicts as f64))
            .collect()
    });

    let per_contract: Vec<usize> = results.iter().map(|r| r.conflicts.len()).collect();
    let contracts_with_conflicts = per_contract.iter().filter(|&&n| n > 0).count();
    let mut percentage_histogram = [0; 100 / PERCENT_BUCKET];
    for r in results {
        let bucket = (r.conflict_percentage * 100.0) as usize / PERCENT_BUCKET;
        percentage_histogram[bucket.min(percentage_histogram.len() - 1)] += 1;
    }

    AggregateStats {
        total_contracts: results.len(),
        total_conflicts,
        counts_by_kind,
        percent_by_kind,
        contracts_with_conflicts,
        contracts_with_conflicts_fraction: if results.is_empty() {
            0.0
        } else {
            contracts_with_conflicts as f64 / results.len() as f64
        },
        mean_conflicts_per_contract: mean(per_contract.iter().map(|&n| n as f64)),
        max_conflicts_per_contract: per_contract.iter().copied().max().unwrap_or(0),
        conflict_percentages: results.iter().map(|r| r.conflict_percentage).collect(),
        percentage_histogram,
        analysis_ms: results.iter().map(|r| r.analysis_ms).collect(),
    }
}
