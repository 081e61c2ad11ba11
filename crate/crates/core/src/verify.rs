//! Exhaustive checks of the nim-sum characterizations over bounded domains.
//!
//! Every check returns a [`VerificationReport`]. A failed check is data, not
//! an error: only malformed inputs (wrong `k`, oversized bounds) produce
//! [`VerifyError`].

use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use crate::game::{self, Bounds, Cut, Position, RuleSet};
use crate::grundy::{self, GrundyError, GrundyTable, Outcome};

/// Why a position shows up in a report.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Reason {
    /// Grundy value 0 but the characterizing nim-sum is nonzero.
    PWithNonzeroNimSum,
    /// Grundy value nonzero but the characterizing nim-sum is 0.
    NWithZeroNimSum,
    /// Grundy value differs from the plain nim-sum.
    GrundyNotNimSum,
    /// A nim-sum-zero position has a nim-sum-zero successor via this cut.
    ZeroToZero(Cut),
    /// A nim-sum-nonzero position has no nim-sum-zero successor.
    NoZeroSuccessor,
}

impl Reason {
    pub fn tag(self) -> &'static str {
        match self {
            Reason::PWithNonzeroNimSum => "p_nonzero_nim_sum",
            Reason::NWithZeroNimSum => "n_zero_nim_sum",
            Reason::GrundyNotNimSum => "grundy_ne_nim_sum",
            Reason::ZeroToZero(Cut::X) => "zero_to_zero_x",
            Reason::ZeroToZero(Cut::Y) => "zero_to_zero_y",
            Reason::ZeroToZero(Cut::Z) => "zero_to_zero_z",
            Reason::NoZeroSuccessor => "no_zero_successor",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Discrepancy {
    pub position: Position,
    pub reason: Reason,
}

/// Which check produced a report.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Check {
    Characterization,
    MoveClosure,
    GrundyVsNimSum,
    Conjecture4m1,
    Rectangular,
}

impl Check {
    pub fn name(self) -> &'static str {
        match self {
            Check::Characterization => "characterization",
            Check::MoveClosure => "move_closure",
            Check::GrundyVsNimSum => "grundy_vs_nim_sum",
            Check::Conjecture4m1 => "conjecture_4m1",
            Check::Rectangular => "rectangular",
        }
    }

    /// Whether this check is defined for `rules`.
    pub fn accepts(self, rules: RuleSet) -> Result<(), VerifyError> {
        match self {
            Check::Characterization | Check::MoveClosure => require_k(rules, 3, 3, "k = 4m + 3").map(drop),
            Check::Conjecture4m1 => require_k(rules, 1, 5, "k = 4m + 1 with k >= 5").map(drop),
            Check::GrundyVsNimSum => Ok(()),
            Check::Rectangular if rules == RuleSet::Rectangular => Ok(()),
            Check::Rectangular => Err(VerifyError::UnsupportedRules { rules, expected: "rectangular rules" }),
        }
    }
}

/// Result of one exhaustive check.
///
/// `passed` holds exactly when `discrepancies` is empty. `listings` carries
/// informational position lists that do not count as failures.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VerificationReport {
    pub check: Check,
    pub rules: RuleSet,
    pub bounds: Bounds,
    pub discrepancies: Vec<Discrepancy>,
    pub counts: BTreeMap<String, u64>,
    pub listings: BTreeMap<String, Vec<Position>>,
    pub passed: bool,
}

impl VerificationReport {
    fn new(check: Check, rules: RuleSet, bounds: Bounds) -> Self {
        VerificationReport {
            check,
            rules,
            bounds,
            discrepancies: Vec::new(),
            counts: BTreeMap::new(),
            listings: BTreeMap::new(),
            passed: true,
        }
    }

    fn count(&mut self, key: &str, n: u64) {
        self.counts.insert(key.to_string(), n);
    }

    fn bump(&mut self, key: &str) {
        *self.counts.entry(key.to_string()).or_insert(0) += 1;
    }

    fn flag(&mut self, position: Position, reason: Reason) {
        self.bump(reason.tag());
        self.discrepancies.push(Discrepancy { position, reason });
    }

    fn finish(mut self) -> Self {
        self.discrepancies.sort();
        self.discrepancies.dedup();
        self.passed = self.discrepancies.is_empty();
        self
    }

    /// Distinct discrepant positions, sorted.
    pub fn positions(&self) -> Vec<Position> {
        let mut v: Vec<Position> = self.discrepancies.iter().map(|d| d.position).collect();
        v.dedup();
        v
    }

    pub fn with_reason(&self, reason: Reason) -> Vec<Position> {
        self.discrepancies.iter().filter(|d| d.reason == reason).map(|d| d.position).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum VerifyError {
    /// The check needs a triangular `k` of a specific residue.
    UnsupportedRules {
        rules: RuleSet,
        expected: &'static str,
    },
    Grundy(GrundyError),
}

impl From<GrundyError> for VerifyError {
    fn from(e: GrundyError) -> Self {
        VerifyError::Grundy(e)
    }
}

impl fmt::Display for VerifyError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            VerifyError::UnsupportedRules { rules, expected } => {
                write!(f, "check needs {expected}, got {rules}")
            }
            VerifyError::Grundy(e) => e.fmt(f),
        }
    }
}

impl core::error::Error for VerifyError {}

fn require_k(rules: RuleSet, residue: u64, min: u64, expected: &'static str) -> Result<u64, VerifyError> {
    match rules {
        RuleSet::Triangular(k) if k % 4 == residue && k >= min => Ok(k),
        _ => Err(VerifyError::UnsupportedRules { rules, expected }),
    }
}

/// Split of the valid positions in bounds by nim-sum.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CharacterizationSets {
    /// Nim-sum zero.
    pub a: Vec<Position>,
    /// Nim-sum nonzero.
    pub b: Vec<Position>,
}

impl CharacterizationSets {
    pub fn new(rules: RuleSet, bounds: Bounds) -> Self {
        let (a, b) = game::positions_iter(rules, bounds).partition(|p| p.nim_sum() == 0);
        CharacterizationSets { a, b }
    }
}

/// Compares Grundy-zero with `key(p) == 0` across a table.
fn outcome_vs_key(
    report: &mut VerificationReport,
    table: &GrundyTable,
    domain: impl Fn(Position) -> bool,
    key: impl Fn(Position) -> bool,
) {
    let (mut p_count, mut zero_count, mut checked) = (0, 0, 0);
    for (p, g) in table.iter().filter(|&(p, _)| domain(p)) {
        checked += 1;
        let is_p = g == 0;
        let zero = key(p);
        p_count += is_p as u64;
        zero_count += zero as u64;
        match (is_p, zero) {
            (true, false) => report.flag(p, Reason::PWithNonzeroNimSum),
            (false, true) => report.flag(p, Reason::NWithZeroNimSum),
            _ => {}
        }
    }
    report.count("positions", checked);
    report.count("p_positions", p_count);
    report.count("nim_sum_zero", zero_count);
    for reason in [Reason::PWithNonzeroNimSum, Reason::NWithZeroNimSum] {
        report.counts.entry(reason.tag().to_string()).or_insert(0);
    }
}

/// P-positions are exactly the nim-sum-zero positions (`k = 4m + 3`).
pub fn check_characterization(table: &GrundyTable) -> Result<VerificationReport, VerifyError> {
    require_k(table.rules(), 3, 3, "k = 4m + 3")?;
    let mut r = VerificationReport::new(Check::Characterization, table.rules(), table.bounds());
    outcome_vs_key(&mut r, table, |_| true, |p| p.nim_sum() == 0);
    Ok(r.finish())
}

pub fn verify_characterization(k: u64, bounds: Bounds) -> Result<VerificationReport, VerifyError> {
    let rules = RuleSet::Triangular(k);
    require_k(rules, 3, 3, "k = 4m + 3")?;
    check_characterization(&grundy::build_table(rules, bounds)?)
}

/// Some successor of `p` with nim-sum zero, if any (first in move order).
pub fn zero_successor(rules: RuleSet, p: Position) -> Option<Position> {
    let mut found = None;
    game::for_each_move(rules, p, |_, q| {
        if found.is_none() && q.nim_sum() == 0 {
            found = Some(q);
        }
    });
    found
}

/// Nim-sum-zero positions only move to nonzero ones, and nonzero positions
/// always have a nim-sum-zero successor (`k = 4m + 3`). Needs no Grundy table.
pub fn verify_move_closure(k: u64, bounds: Bounds) -> Result<VerificationReport, VerifyError> {
    let rules = RuleSet::Triangular(k);
    require_k(rules, 3, 3, "k = 4m + 3")?;
    if bounds.cell_count().is_none_or(|c| c > grundy::MAX_TABLE_CELLS) {
        return Err(GrundyError::TableTooLarge { bounds }.into());
    }
    let mut r = VerificationReport::new(Check::MoveClosure, rules, bounds);
    let (mut a, mut b) = (0, 0);
    for p in game::positions_iter(rules, bounds) {
        if p.nim_sum() == 0 {
            a += 1;
            let mut bad = Vec::new();
            game::for_each_move(rules, p, |cut, q| {
                if q.nim_sum() == 0 {
                    bad.push(cut);
                }
            });
            for cut in bad {
                r.flag(p, Reason::ZeroToZero(cut));
            }
        } else {
            b += 1;
            match zero_successor(rules, p) {
                Some(q) if game::is_valid(rules, q) => r.bump("witnesses"),
                _ => r.flag(p, Reason::NoZeroSuccessor),
            }
        }
    }
    r.count("a_positions", a);
    r.count("b_positions", b);
    r.counts.entry("witnesses".to_string()).or_insert(0);
    Ok(r.finish())
}

/// Counts positions whose Grundy value equals the nim-sum. Informational:
/// the report always passes. With `list_unequal`, the mismatches are listed
/// under `listings["unequal"]`.
pub fn compare_grundy_nimsum(table: &GrundyTable, list_unequal: bool) -> VerificationReport {
    let mut r = VerificationReport::new(Check::GrundyVsNimSum, table.rules(), table.bounds());
    let (mut equal, mut unequal, mut class_mismatch) = (0, 0, 0);
    let mut listed = Vec::new();
    for (p, g) in table.iter() {
        let ns = p.nim_sum();
        if g as u64 == ns {
            equal += 1;
        } else {
            unequal += 1;
            if list_unequal {
                listed.push(p);
            }
        }
        class_mismatch += ((g == 0) != (ns == 0)) as u64;
    }
    r.count("equal", equal);
    r.count("unequal", unequal);
    r.count("total", equal + unequal);
    r.count("outcome_mismatch", class_mismatch);
    if list_unequal {
        r.listings.insert("unequal".to_string(), listed);
    }
    r.finish()
}

fn shifted_nim_sum(p: Position) -> u64 {
    (p.x - 1) ^ p.y ^ (p.z - 1)
}

/// P-positions are exactly those with `(x-1) ^ y ^ (z-1) == 0`, for
/// `k = 4m + 1 >= 5`, checked over `x >= 1, z >= 1`. Positions with `x == 0`
/// or `z == 0` are tallied under `boundary_*` counts and their P-positions
/// listed under `listings["boundary_p"]`, without asserting anything.
pub fn check_conjecture_4m1(table: &GrundyTable) -> Result<VerificationReport, VerifyError> {
    require_k(table.rules(), 1, 5, "k = 4m + 1 with k >= 5")?;
    let mut r = VerificationReport::new(Check::Conjecture4m1, table.rules(), table.bounds());
    let interior = |p: Position| p.x >= 1 && p.z >= 1;
    outcome_vs_key(&mut r, table, interior, |p| shifted_nim_sum(p) == 0);
    let boundary: Vec<(Position, u32)> = table.iter().filter(|&(p, _)| !interior(p)).collect();
    let boundary_p: Vec<Position> = boundary.iter().filter(|(_, g)| *g == 0).map(|(p, _)| *p).collect();
    r.count("boundary_positions", boundary.len() as u64);
    r.count("boundary_p_positions", boundary_p.len() as u64);
    r.listings.insert("boundary_p".to_string(), boundary_p);
    Ok(r.finish())
}

pub fn verify_conjecture_4m1(k: u64, bounds: Bounds) -> Result<VerificationReport, VerifyError> {
    let rules = RuleSet::Triangular(k);
    require_k(rules, 1, 5, "k = 4m + 1 with k >= 5")?;
    check_conjecture_4m1(&grundy::build_table(rules, bounds)?)
}

/// Which outcome classes [`enumerate_outcomes`] keeps.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutcomeFilter {
    P,
    N,
    All,
}

impl OutcomeFilter {
    pub fn keeps(self, o: Outcome) -> bool {
        match self {
            OutcomeFilter::All => true,
            OutcomeFilter::P => o == Outcome::P,
            OutcomeFilter::N => o == Outcome::N,
        }
    }
}

/// Positions of a table whose outcome passes `filter`, lexicographically.
pub fn enumerate_outcomes(table: &GrundyTable, filter: OutcomeFilter) -> Vec<Position> {
    table.iter().filter(|&(_, g)| filter.keeps(Outcome::from_grundy(g))).map(|(p, _)| p).collect()
}

/// Rectangular rules: P-positions are the nim-sum-zero ones and every Grundy
/// value equals the nim-sum.
pub fn check_rectangular(table: &GrundyTable) -> Result<VerificationReport, VerifyError> {
    if table.rules() != RuleSet::Rectangular {
        return Err(VerifyError::UnsupportedRules { rules: table.rules(), expected: "rectangular rules" });
    }
    let mut r = VerificationReport::new(Check::Rectangular, RuleSet::Rectangular, table.bounds());
    outcome_vs_key(&mut r, table, |_| true, |p| p.nim_sum() == 0);
    for (p, g) in table.iter() {
        if g as u64 != p.nim_sum() {
            r.flag(p, Reason::GrundyNotNimSum);
        }
    }
    r.counts.entry(Reason::GrundyNotNimSum.tag().to_string()).or_insert(0);
    Ok(r.finish())
}

pub fn verify_rectangular(bounds: Bounds) -> Result<VerificationReport, VerifyError> {
    check_rectangular(&grundy::build_table(RuleSet::Rectangular, bounds)?)
}
