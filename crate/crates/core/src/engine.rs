//! Pairwise conflict detection over transactional functions.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use crate::access::{AccessMaps, AccessMode, AnalysisError, FunctionKey, Program, VarName};
use crate::frontend::{Contract, Function, FunctionKind, Mutability, SourceUnit, Visibility};

/// Variable name used for conflicts introduced by unresolved external
/// calls in conservative mode.
pub const EXTERNAL_SENTINEL: &str = "<external>";

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ConflictKind {
    Rwc,
    Wwc,
    Fcc,
}

impl ConflictKind {
    pub const ALL: [ConflictKind; 3] = [ConflictKind::Rwc, ConflictKind::Wwc, ConflictKind::Fcc];

    pub fn as_str(self) -> &'static str {
        match self {
            ConflictKind::Rwc => "RWC",
            ConflictKind::Wwc => "WWC",
            ConflictKind::Fcc => "FCC",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|k| k.as_str() == s)
    }
}

impl fmt::Display for ConflictKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Whether the overlap behind a conflict involves two writes or a read
/// against a write.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Overlap {
    ReadWrite,
    WriteWrite,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Severity {
    High,
    Medium,
    Low,
}

impl Severity {
    pub fn as_str(self) -> &'static str {
        match self {
            Severity::High => "High",
            Severity::Medium => "Medium",
            Severity::Low => "Low",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        [Severity::High, Severity::Medium, Severity::Low]
            .into_iter()
            .find(|v| v.as_str() == s)
    }
}

impl fmt::Display for Severity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SeverityPolicy {
    pub wwc: Severity,
    pub rwc: Severity,
    pub fcc_write_write: Severity,
    pub fcc_read_write: Severity,
}

impl Default for SeverityPolicy {
    fn default() -> Self {
        SeverityPolicy {
            wwc: Severity::High,
            rwc: Severity::Medium,
            fcc_write_write: Severity::High,
            fcc_read_write: Severity::Medium,
        }
    }
}

impl SeverityPolicy {
    pub fn assign(&self, kind: ConflictKind, overlap: Overlap) -> Severity {
        match (kind, overlap) {
            (ConflictKind::Wwc, _) => self.wwc,
            (ConflictKind::Rwc, _) => self.rwc,
            (ConflictKind::Fcc, Overlap::WriteWrite) => self.fcc_write_write,
            (ConflictKind::Fcc, Overlap::ReadWrite) => self.fcc_read_write,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Conflict {
    /// Lexicographically smaller key of the pair.
    pub first: FunctionKey,
    pub second: FunctionKey,
    pub kind: ConflictKind,
    pub variables: BTreeSet<VarName>,
    pub overlap: Overlap,
    pub severity: Severity,
    pub description: String,
}

impl Conflict {
    fn new(
        a: &FunctionKey,
        b: &FunctionKey,
        kind: ConflictKind,
        variables: BTreeSet<VarName>,
        overlap: Overlap,
    ) -> Self {
        let (first, second) = ordered(a, b);
        let mut c = Conflict {
            first: first.clone(),
            second: second.clone(),
            kind,
            variables,
            overlap,
            severity: Severity::Medium,
            description: String::new(),
        };
        c.severity = assign_severity(&c);
        c.description = describe(&c);
        c
    }

    pub fn pair(&self) -> (&FunctionKey, &FunctionKey) {
        (&self.first, &self.second)
    }

    pub fn involves_contract(&self, contract: &str) -> bool {
        self.first.contract() == contract || self.second.contract() == contract
    }

    fn sort_key(&self) -> (&FunctionKey, &FunctionKey, ConflictKind) {
        (&self.first, &self.second, self.kind)
    }
}

fn ordered<'k>(a: &'k FunctionKey, b: &'k FunctionKey) -> (&'k FunctionKey, &'k FunctionKey) {
    if a <= b {
        (a, b)
    } else {
        (b, a)
    }
}

fn join_vars(vars: &BTreeSet<VarName>) -> String {
    vars.iter().map(VarName::as_str).collect::<Vec<_>>().join(", ")
}

fn describe(c: &Conflict) -> String {
    let (a, b) = (c.first.as_str(), c.second.as_str());
    let vars = join_vars(&c.variables);
    match c.kind {
        ConflictKind::Wwc => format!("{a} and {b} both write {vars}."),
        ConflictKind::Rwc => format!("{a} and {b} access {vars}; one reads what the other writes."),
        ConflictKind::Fcc => {
            let how = match c.overlap {
                Overlap::WriteWrite => "write-write",
                Overlap::ReadWrite => "read-write",
            };
            format!("{a} and {b} reach {vars} through nested calls ({how} overlap).")
        }
    }
}

/// Severity under the default policy.
pub fn assign_severity(c: &Conflict) -> Severity {
    SeverityPolicy::default().assign(c.kind, c.overlap)
}

/// Functions excluded from pairwise analysis.
pub fn should_skip(f: &Function) -> bool {
    matches!(f.visibility, Visibility::Private | Visibility::Internal)
        || f.mutability == Mutability::Pure
        || f.kind == FunctionKind::Constructor
        || f.body.is_none()
}

pub fn is_read_only(f: &Function) -> bool {
    f.mutability == Mutability::View
}

fn intersect(a: &BTreeSet<VarName>, b: &BTreeSet<VarName>) -> BTreeSet<VarName> {
    a.intersection(b).cloned().collect()
}

/// Variables one function reads while the other writes, in either direction.
pub fn detect_rwc(f1: &FunctionKey, f2: &FunctionKey, maps: &AccessMaps) -> Option<Conflict> {
    let vars = rw_vars(f1, f2, maps);
    (!vars.is_empty()).then(|| Conflict::new(f1, f2, ConflictKind::Rwc, vars, Overlap::ReadWrite))
}

fn rw_vars(f1: &FunctionKey, f2: &FunctionKey, maps: &AccessMaps) -> BTreeSet<VarName> {
    let mut vars = intersect(maps.reads_of(f1), maps.writes_of(f2));
    vars.extend(intersect(maps.reads_of(f2), maps.writes_of(f1)));
    vars
}

pub fn detect_wwc(f1: &FunctionKey, f2: &FunctionKey, maps: &AccessMaps) -> Option<Conflict> {
    let vars = intersect(maps.writes_of(f1), maps.writes_of(f2));
    (!vars.is_empty()).then(|| Conflict::new(f1, f2, ConflictKind::Wwc, vars, Overlap::WriteWrite))
}

/// A function's own accesses plus those of everything it reaches through
/// resolved calls.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TransitiveAccess {
    pub reads: BTreeSet<VarName>,
    pub writes: BTreeSet<VarName>,
    /// Whether any reachable function has an unresolved callee.
    pub unresolved: bool,
}

impl TransitiveAccess {
    pub fn records(&self) -> BTreeSet<(VarName, AccessMode)> {
        let reads = self.reads.iter().map(|v| (v.clone(), AccessMode::Read));
        let writes = self.writes.iter().map(|v| (v.clone(), AccessMode::Write));
        reads.chain(writes).collect()
    }
}

fn transitive(f: &FunctionKey, maps: &AccessMaps) -> TransitiveAccess {
    let mut out = TransitiveAccess::default();
    let mut visited = BTreeSet::new();
    let mut stack = vec![f];
    while let Some(g) = stack.pop() {
        if !visited.insert(g) {
            continue;
        }
        out.reads.extend(maps.reads_of(g).iter().cloned());
        out.writes.extend(maps.writes_of(g).iter().cloned());
        out.unresolved |= maps.unresolved_of(g).next().is_some();
        stack.extend(maps.calls_of(g).filter(|h| !visited.contains(h)));
    }
    out
}

pub fn recursive_access(f: &FunctionKey, maps: &AccessMaps) -> BTreeSet<(VarName, AccessMode)> {
    transitive(f, maps).records()
}

/// Direct overlap of a pair: everything RWC or WWC would report.
fn direct_overlap(f1: &FunctionKey, f2: &FunctionKey, maps: &AccessMaps) -> BTreeSet<VarName> {
    let mut vars = intersect(maps.writes_of(f1), maps.writes_of(f2));
    vars.extend(rw_vars(f1, f2, maps));
    vars
}

fn fcc_from(
    f1: &FunctionKey,
    f2: &FunctionKey,
    t1: &TransitiveAccess,
    t2: &TransitiveAccess,
    maps: &AccessMaps,
) -> Option<Conflict> {
    let direct = direct_overlap(f1, f2, maps);
    let ww = intersect(&t1.writes, &t2.writes);
    let mut vars: BTreeSet<VarName> = ww.clone();
    vars.extend(intersect(&t1.reads, &t2.writes));
    vars.extend(intersect(&t2.reads, &t1.writes));
    vars.retain(|v| !direct.contains(v));
    if vars.is_empty() {
        return None;
    }
    let overlap = if vars.iter().any(|v| ww.contains(v)) {
        Overlap::WriteWrite
    } else {
        Overlap::ReadWrite
    };
    Some(Conflict::new(f1, f2, ConflictKind::Fcc, vars, overlap))
}

/// Overlaps visible only through nested calls, excluding anything the
/// direct detectors already report for the pair.
pub fn detect_fcc(f1: &FunctionKey, f2: &FunctionKey, maps: &AccessMaps) -> Option<Conflict> {
    fcc_from(f1, f2, &transitive(f1, maps), &transitive(f2, maps), maps)
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct EngineOptions {
    /// Treat a state-changing function with unresolved callees as
    /// conflicting with every other transactional function.
    pub conservative_external: bool,
    pub severity: SeverityPolicy,
}

#[derive(Debug, Default)]
pub struct DetectionState {
    pub visited_pairs: BTreeSet<(FunctionKey, FunctionKey)>,
    pub conflicts: Vec<Conflict>,
}

impl DetectionState {
    /// Marks the unordered pair as visited; false for self-pairs and
    /// pairs seen before.
    pub fn visit(&mut self, a: &FunctionKey, b: &FunctionKey) -> bool {
        if a == b {
            return false;
        }
        let (x, y) = ordered(a, b);
        self.visited_pairs.insert((x.clone(), y.clone()))
    }
}

/// Boolean conflict matrix over an ordered list of functions.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ConflictMatrix {
    pub functions: Vec<FunctionKey>,
    cells: BTreeSet<(usize, usize)>,
}

impl ConflictMatrix {
    pub fn new(functions: Vec<FunctionKey>) -> Self {
        ConflictMatrix {
            functions,
            cells: BTreeSet::new(),
        }
    }

    fn index(&self, key: &FunctionKey) -> Option<usize> {
        self.functions.iter().position(|k| k == key)
    }

    pub fn mark(&mut self, a: &FunctionKey, b: &FunctionKey) {
        if let (Some(i), Some(j)) = (self.index(a), self.index(b)) {
            if i != j {
                self.cells.insert((i.min(j), i.max(j)));
            }
        }
    }

    pub fn get(&self, i: usize, j: usize) -> bool {
        self.cells.contains(&(i.min(j), i.max(j)))
    }

    /// Number of unordered pairs marked as conflicting.
    pub fn conflicting_pairs(&self) -> usize {
        self.cells.len()
    }

    pub fn len(&self) -> usize {
        self.functions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.functions.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AnalysisResult {
    pub contract: Contract,
    /// Path of the source the contract was parsed from.
    pub path: String,
    pub function_keys: Vec<FunctionKey>,
    /// Transactional functions of this contract, canonically ordered.
    pub transactional: Vec<FunctionKey>,
    pub conflicts: Vec<Conflict>,
    pub matrix: ConflictMatrix,
    pub conflict_percentage: f64,
    pub counts_by_kind: BTreeMap<ConflictKind, usize>,
    pub analysis_ms: u64,
}

impl AnalysisResult {
    pub fn is_transactional(&self, key: &FunctionKey) -> bool {
        self.transactional.binary_search(key).is_ok()
    }
}

/// Share of the contract's own transactional pairs that conflict.
pub fn conflict_percentage(transactional: &[FunctionKey], conflicts: &[Conflict]) -> f64 {
    let n = transactional.len();
    if n < 2 {
        return 0.0;
    }
    let own: BTreeSet<&FunctionKey> = transactional.iter().collect();
    let pairs: BTreeSet<_> = conflicts
        .iter()
        .filter(|c| own.contains(&c.first) && own.contains(&c.second))
        .map(Conflict::pair)
        .collect();
    pairs.len() as f64 / (n * (n - 1) / 2) as f64
}

/// Runs detection on every unordered pair of transactional functions of
/// the program and groups the conflicts per contract.
pub fn detect_program(
    program: &Program,
    maps: &AccessMaps,
    options: &EngineOptions,
) -> Vec<AnalysisResult> {
    let mut candidates: Vec<(&FunctionKey, &Function)> = program
        .functions()
        .filter(|(_, _, f)| !should_skip(f))
        .map(|(k, _, f)| (k, f))
        .collect();
    candidates.sort_by(|a, b| a.0.cmp(b.0));

    let mut memo: HashMap<&FunctionKey, TransitiveAccess> = HashMap::new();
    for (k, _) in &candidates {
        memo.insert(k, transitive(k, maps));
    }
    if !options.conservative_external {
        for (k, _) in &candidates {
            let unresolved: BTreeSet<_> = maps.unresolved_of(k).collect();
            if !unresolved.is_empty() {
                log::warn!("{k}: ignoring unresolved calls to {unresolved:?}");
            }
        }
    }

    let mut state = DetectionState::default();
    for (i, (k1, f1)) in candidates.iter().enumerate() {
        for (k2, f2) in &candidates[i + 1..] {
            if !state.visit(k1, k2) || (is_read_only(f1) && is_read_only(f2)) {
                continue;
            }
            let pair = detect_pair(k1, f1, k2, f2, &memo[k1], &memo[k2], maps, options);
            state.conflicts.extend(pair);
        }
    }
    for c in &mut state.conflicts {
        c.severity = options.severity.assign(c.kind, c.overlap);
    }
    state.conflicts.sort_by(|a, b| a.sort_key().cmp(&b.sort_key()));

    program
        .contracts()
        .map(|contract| {
            let function_keys: Vec<FunctionKey> = (0..contract.functions.len())
                .filter_map(|i| program.key_of(&contract.name, i).cloned())
                .collect();
            let mut transactional: Vec<FunctionKey> = function_keys
                .iter()
                .zip(&contract.functions)
                .filter(|(_, f)| !should_skip(f))
                .map(|(k, _)| k.clone())
                .collect();
            transactional.sort();
            let conflicts: Vec<Conflict> = state
                .conflicts
                .iter()
                .filter(|c| c.involves_contract(&contract.name))
                .cloned()
                .collect();
            let mut matrix_keys: BTreeSet<FunctionKey> = transactional.iter().cloned().collect();
            for c in &conflicts {
                matrix_keys.insert(c.first.clone());
                matrix_keys.insert(c.second.clone());
            }
            let mut matrix = ConflictMatrix::new(matrix_keys.into_iter().collect());
            for c in &conflicts {
                matrix.mark(&c.first, &c.second);
            }
            let mut counts_by_kind: BTreeMap<ConflictKind, usize> =
                ConflictKind::ALL.iter().map(|k| (*k, 0)).collect();
            for c in &conflicts {
                *counts_by_kind.entry(c.kind).or_default() += 1;
            }
            AnalysisResult {
                contract: contract.clone(),
                path: String::new(),
                conflict_percentage: conflict_percentage(&transactional, &conflicts),
                function_keys,
                transactional,
                conflicts,
                matrix,
                counts_by_kind,
                analysis_ms: 0,
            }
        })
        .collect()
}

#[allow(clippy::too_many_arguments)]
fn detect_pair(
    k1: &FunctionKey,
    f1: &Function,
    k2: &FunctionKey,
    f2: &Function,
    t1: &TransitiveAccess,
    t2: &TransitiveAccess,
    maps: &AccessMaps,
    options: &EngineOptions,
) -> Vec<Conflict> {
    let mut out = Vec::new();
    let wwc = detect_wwc(k1, k2, maps);
    let ww_vars = wwc.as_ref().map(|c| c.variables.clone()).unwrap_or_default();
    out.extend(wwc);
    if let Some(mut rwc) = detect_rwc(k1, k2, maps) {
        rwc.variables.retain(|v| !ww_vars.contains(v));
        if !rwc.variables.is_empty() {
            rwc.description = describe(&rwc);
            out.push(rwc);
        }
    }
    let mut fcc = fcc_from(k1, k2, t1, t2, maps);
    if options.conservative_external {
        let external = |f: &Function, t: &TransitiveAccess| !is_read_only(f) && t.unresolved;
        if external(f1, t1) || external(f2, t2) {
            let sentinel = VarName::from_qualified(EXTERNAL_SENTINEL);
            let c = fcc.get_or_insert_with(|| {
                Conflict::new(k1, k2, ConflictKind::Fcc, BTreeSet::new(), Overlap::WriteWrite)
            });
            c.variables.insert(sentinel);
            c.overlap = Overlap::WriteWrite;
            c.description = describe(c);
        }
    }
    out.extend(fcc);
    out
}

/// [`detect_program`] over parsed units.
pub fn detect_all(
    units: &[SourceUnit],
    maps: &AccessMaps,
    options: &EngineOptions,
) -> Result<Vec<AnalysisResult>, AnalysisError> {
    let program = Program::new(units)?;
    let mut results = detect_program(&program, maps, options);
    attach_paths(units, &mut results);
    Ok(results)
}

/// Access extraction followed by detection.
pub fn analyze(units: &[SourceUnit], options: &EngineOptions) -> Result<Vec<AnalysisResult>, AnalysisError> {
    let program = Program::new(units)?;
    let maps = AccessMaps::from_program(&program);
    let mut results = detect_program(&program, &maps, options);
    attach_paths(units, &mut results);
    Ok(results)
}

fn attach_paths(units: &[SourceUnit], results: &mut [AnalysisResult]) {
    let paths: HashMap<&str, &str> = units
        .iter()
        .flat_map(|u| u.contracts.iter().map(move |c| (c.name.as_str(), u.path.as_str())))
        .collect();
    for r in results {
        if let Some(p) = paths.get(r.contract.name.as_str()) {
            r.path = p.to_string();
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frontend::parse;

    fn key(s: &str) -> FunctionKey {
        let (c, rest) = s.split_once('.').unwrap();
        let (n, a) = rest.split_once('/').unwrap();
        FunctionKey::new(c, n, a.parse().unwrap())
    }

    fn vars(names: &[&str]) -> BTreeSet<VarName> {
        names.iter().map(|n| VarName::from_qualified(*n)).collect()
    }

    type Entry<'a> = (&'a str, &'a [&'a str], &'a [&'a str], &'a [&'a str]);

    fn maps_of(entries: &[Entry]) -> AccessMaps {
        let mut m = AccessMaps::default();
        for (f, r, w, c) in entries {
            let k = key(f);
            m.reads.insert(k.clone(), vars(r));
            m.writes.insert(k.clone(), vars(w));
            m.calls.insert(k.clone(), c.iter().map(|s| key(s)).collect());
        }
        m
    }

    fn analyze_src(src: &str) -> Vec<AnalysisResult> {
        analyze(&[parse(src, "t.sol").unwrap()], &EngineOptions::default()).unwrap()
    }

    #[test]
    fn should_skip_table() {
        let unit = parse(
            "contract C { function a() private {} function b() public pure {} function c() public view {} \
             function d() external {} constructor() {} fallback() external {} receive() external payable {} \
             function e() internal {} }",
            "",
        )
        .unwrap();
        let skipped: Vec<bool> = unit.contracts[0].functions.iter().map(should_skip).collect();
        assert_eq!(skipped, [true, true, false, false, true, false, false, true]);
    }

    #[test]
    fn rwc_and_wwc_definitions() {
        let m = maps_of(&[
            ("C.f/0", &["C.a"], &["C.x"], &[]),
            ("C.g/0", &[], &["C.a", "C.x", "C.y"], &[]),
            ("C.h/0", &["C.b"], &[], &[]),
        ]);
        let rwc = detect_rwc(&key("C.f/0"), &key("C.g/0"), &m).unwrap();
        assert_eq!(rwc.variables, vars(&["C.a"]));
        assert_eq!(rwc.severity, Severity::Medium);
        let wwc = detect_wwc(&key("C.g/0"), &key("C.f/0"), &m).unwrap();
        assert_eq!(wwc.variables, vars(&["C.x"]));
        assert_eq!((wwc.first.as_str(), wwc.second.as_str()), ("C.f/0", "C.g/0"));
        assert_eq!(wwc.severity, Severity::High);
        assert!(detect_rwc(&key("C.f/0"), &key("C.h/0"), &m).is_none());
        assert!(detect_wwc(&key("C.h/0"), &key("C.g/0"), &m).is_none());
    }

    #[test]
    fn recursive_access_examples() {
        let m = maps_of(&[
            ("C.f/0", &["C.a"], &[], &["C.g/0"]),
            ("C.g/0", &[], &["C.b"], &["C.f/0"]),
            ("C.p/0", &[], &[], &["C.q/0"]),
            ("C.q/0", &[], &[], &["C.r/0"]),
            ("C.r/0", &[], &["C.v"], &[]),
        ]);
        let got = recursive_access(&key("C.f/0"), &m);
        let want: BTreeSet<_> = [
            (VarName::from_qualified("C.a"), AccessMode::Read),
            (VarName::from_qualified("C.b"), AccessMode::Write),
        ]
        .into_iter()
        .collect();
        assert_eq!(got, want);
        assert_eq!(recursive_access(&key("C.g/0"), &m), want);
        assert_eq!(
            recursive_access(&key("C.p/0"), &m),
            [(VarName::from_qualified("C.v"), AccessMode::Write)].into_iter().collect()
        );
    }

    #[test]
    fn fcc_only_call_mediated() {
        let m = maps_of(&[
            ("C.f1/0", &[], &[], &["C.g/0"]),
            ("C.g/0", &[], &["C.v"], &[]),
            ("C.f2/0", &["C.v"], &[], &[]),
            ("C.f3/0", &[], &["C.v"], &["C.g/0"]),
            ("C.f4/0", &[], &["C.v"], &[]),
            ("C.r1/0", &[], &[], &["C.r2/0"]),
            ("C.r2/0", &["C.v"], &[], &[]),
        ]);
        let c = detect_fcc(&key("C.f1/0"), &key("C.f2/0"), &m).unwrap();
        assert_eq!(c.variables, vars(&["C.v"]));
        assert_eq!(c.overlap, Overlap::ReadWrite);
        assert_eq!(c.severity, Severity::Medium);
        assert!(detect_fcc(&key("C.r1/0"), &key("C.f2/0"), &m).is_none());
        assert!(detect_fcc(&key("C.f3/0"), &key("C.f4/0"), &m).is_none());
        let ww = detect_fcc(&key("C.f1/0"), &key("C.f4/0"), &m).unwrap();
        assert_eq!(ww.severity, Severity::High);
    }

    #[test]
    fn example_has_no_conflicts() {
        let results = analyze_src(include_str!("../tests/fixtures/example.sol"));
        assert_eq!(results.len(), 1);
        assert!(results[0].conflicts.is_empty());
        assert_eq!(results[0].conflict_percentage, 0.0);
        assert_eq!(results[0].transactional.len(), 2);
        assert_eq!(results[0].matrix.conflicting_pairs(), 0);
    }

    #[test]
    fn view_pairs_are_skipped_and_view_vs_writer_conflicts() {
        let r = analyze_src(
            "contract C { uint x; function a() public view returns (uint) { return x; } \
             function b() public view returns (uint) { return x; } function c() public { x = 1; } }",
        );
        let pairs: Vec<_> = r[0].conflicts.iter().map(|c| (c.first.local(), c.second.local(), c.kind)).collect();
        assert_eq!(
            pairs,
            [("a/0", "c/0", ConflictKind::Rwc), ("b/0", "c/0", ConflictKind::Rwc)]
        );
        assert!((r[0].conflict_percentage - 2.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn wwc_takes_precedence_over_rwc() {
        let r = analyze_src("contract C { uint x; function a() public { x += 1; } function b() public { x = 2; } }");
        let kinds: Vec<_> = r[0].conflicts.iter().map(|c| c.kind).collect();
        assert_eq!(kinds, [ConflictKind::Wwc]);
    }

    #[test]
    fn internal_helpers_produce_fcc() {
        let r = analyze_src(
            "contract C { uint x; function _w() internal { x = 1; } \
             function a() public { _w(); } function b() public view returns (uint) { return x; } }",
        );
        assert_eq!(r[0].conflicts.len(), 1);
        let c = &r[0].conflicts[0];
        assert_eq!(c.kind, ConflictKind::Fcc);
        assert_eq!(c.variables, vars(&["C.x"]));
        assert_eq!(r[0].transactional.len(), 2);
    }

    #[test]
    fn same_named_variables_do_not_cross_contracts() {
        let r = analyze_src(
            "contract A { uint x; function f() public { x = 1; } } contract B { uint x; function f() public { x = 1; } }",
        );
        assert!(r.iter().all(|r| r.conflicts.is_empty()));
    }

    #[test]
    fn cross_contract_conflicts_attach_to_both() {
        let r = analyze_src(
            "contract A { uint x; function set() public { x = 1; } } \
             contract B { A a; function poke() public { a.set(); } }",
        );
        assert_eq!(r[0].conflicts, r[1].conflicts);
        assert_eq!(r[0].conflicts.len(), 1);
        assert_eq!(r[0].conflicts[0].kind, ConflictKind::Fcc);
        assert_eq!(r[0].conflict_percentage, 0.0);
        assert_eq!(r[1].matrix.len(), 2);
        assert_eq!(r[1].matrix.conflicting_pairs(), 1);
    }

    #[test]
    fn conservative_external_mode() {
        let src = "contract C { uint x; function a(address t) public { t.call(\"\"); } \
                   function b() public view returns (uint) { return x; } function c() public { x = 1; } }";
        let units = [parse(src, "t.sol").unwrap()];
        let off = analyze(&units, &EngineOptions::default()).unwrap();
        assert_eq!(off[0].conflicts.len(), 1);
        let opts = EngineOptions {
            conservative_external: true,
            ..EngineOptions::default()
        };
        let on = analyze(&units, &opts).unwrap();
        let ext: Vec<_> = on[0]
            .conflicts
            .iter()
            .filter(|c| c.variables.contains(&VarName::from_qualified(EXTERNAL_SENTINEL)))
            .map(|c| (c.second.local(), c.kind, c.severity))
            .collect();
        assert_eq!(
            ext,
            [("b/0", ConflictKind::Fcc, Severity::High), ("c/0", ConflictKind::Fcc, Severity::High)]
        );
    }

    #[test]
    fn percentage_arithmetic() {
        let keys = [key("C.a/0"), key("C.b/0"), key("C.c/0")];
        let m = maps_of(&[("C.a/0", &[], &["C.x"], &[]), ("C.b/0", &[], &["C.x"], &[])]);
        let c = detect_wwc(&keys[0], &keys[1], &m).unwrap();
        assert!((conflict_percentage(&keys, std::slice::from_ref(&c)) - 1.0 / 3.0).abs() < 1e-12);
        assert_eq!(conflict_percentage(&keys, &[]), 0.0);
        assert_eq!(conflict_percentage(&keys[..1], &[c]), 0.0);
    }

    #[test]
    fn custom_severity_policy() {
        let opts = EngineOptions {
            severity: SeverityPolicy {
                rwc: Severity::Low,
                ..SeverityPolicy::default()
            },
            ..EngineOptions::default()
        };
        let units = [parse(
            "contract C { uint x; function a() public view returns (uint) { return x; } function b() public { x = 1; } }",
            "",
        )
        .unwrap()];
        let r = analyze(&units, &opts).unwrap();
        assert_eq!(r[0].conflicts[0].severity, Severity::Low);
    }
}
