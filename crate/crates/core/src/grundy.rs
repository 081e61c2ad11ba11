//! Mex, Grundy values and outcome classes.
//!
//! [`GrundyTable`] stores a dense value array over the bounding box. Every move
//! strictly lowers the coordinate sum, so the table is filled layer by layer
//! in increasing `x + y + z`; all dependencies of a layer live in earlier
//! layers. [`TableBuilder`] exposes that schedule so callers can evaluate a
//! layer in parallel and commit it afterwards.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;
use core::fmt;

use crate::game::{self, Bounds, GameError, Position, RuleSet};

/// Upper bound on bounding-box cells for a table build.
pub const MAX_TABLE_CELLS: u64 = 100_000_000;

const UNSET: u32 = u32::MAX;

/// Outcome class of a position under normal play.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Outcome {
    /// Previous player wins (Grundy value 0).
    P,
    /// Next player wins.
    N,
}

impl Outcome {
    pub fn from_grundy(g: u32) -> Self {
        if g == 0 {
            Outcome::P
        } else {
            Outcome::N
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Outcome::P => "P",
            Outcome::N => "N",
        }
    }
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GrundyError {
    Game(GameError),
    /// Bounding box exceeds [`MAX_TABLE_CELLS`] (or overflows `u64`).
    TableTooLarge {
        bounds: Bounds,
    },
    /// A move generator produced a successor that is not yet evaluated or
    /// lies outside the table.
    MissingSuccessor {
        from: Position,
        to: Position,
    },
    /// A table entry disagrees with the mex recursion.
    Inconsistent {
        position: Position,
        stored: u32,
        expected: u32,
    },
    /// A table entry was expected but absent, or present outside the domain.
    Domain {
        position: Position,
    },
    Duplicate {
        position: Position,
    },
}

impl From<GameError> for GrundyError {
    fn from(e: GameError) -> Self {
        GrundyError::Game(e)
    }
}

impl fmt::Display for GrundyError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GrundyError::Game(e) => e.fmt(f),
            GrundyError::TableTooLarge { bounds } => write!(
                f,
                "bounds ({},{},{}) exceed the table limit of {MAX_TABLE_CELLS} cells",
                bounds.x, bounds.y, bounds.z
            ),
            GrundyError::MissingSuccessor { from, to } => {
                write!(f, "successor {to} of {from} has no value in the table")
            }
            GrundyError::Inconsistent { position, stored, expected } => {
                write!(f, "table value {stored} at {position} differs from mex {expected}")
            }
            GrundyError::Domain { position } => {
                write!(f, "position {position} does not match the table domain")
            }
            GrundyError::Duplicate { position } => write!(f, "duplicate entry for {position}"),
        }
    }
}

impl core::error::Error for GrundyError {}

/// Reusable presence bitmap for mex computation.
#[derive(Debug, Default, Clone)]
pub struct MexScratch {
    seen: Vec<bool>,
}

impl MexScratch {
    pub fn new() -> Self {
        Self::default()
    }

    /// Mex of `values`, where at most `capacity` values will be supplied.
    fn run(&mut self, capacity: usize, fill: impl FnOnce(&mut dyn FnMut(u32))) -> u32 {
        self.seen.clear();
        self.seen.resize(capacity + 1, false);
        let seen = &mut self.seen;
        fill(&mut |v| {
            if let Some(slot) = seen.get_mut(v as usize) {
                *slot = true;
            }
        });
        self.seen.iter().position(|&b| !b).unwrap_or(capacity + 1) as u32
    }
}

/// Smallest non-negative integer absent from `values`.
pub fn mex(values: &[u32]) -> u32 {
    MexScratch::new().run(values.len(), |push| values.iter().for_each(|&v| push(v)))
}

/// Grundy value of a disjunctive sum: the nim-sum of the component values.
pub fn sum_value(components: &[u32]) -> u32 {
    components.iter().fold(0, |acc, v| acc ^ v)
}

/// Source of successor positions for a table build.
///
/// [`RuleSet`] is the canonical implementation; other generators exist so
/// verification can be exercised against deliberately broken move rules.
pub trait MoveGenerator {
    fn rules(&self) -> RuleSet;
    fn successors(&self, p: Position, out: &mut dyn FnMut(Position));
}

impl MoveGenerator for RuleSet {
    fn rules(&self) -> RuleSet {
        *self
    }

    fn successors(&self, p: Position, out: &mut dyn FnMut(Position)) {
        game::for_each_move(*self, p, |_, q| out(q));
    }
}

/// Memo for single-position Grundy queries.
pub type GrundyMemo = BTreeMap<Position, u32>;

/// Grundy value of `p`, extending `memo` with every position evaluated.
pub fn grundy(rules: RuleSet, p: Position, memo: &mut GrundyMemo) -> Result<u32, GrundyError> {
    game::check_position(rules, p)?;
    if let Some(&g) = memo.get(&p) {
        return Ok(g);
    }
    let mut scratch = MexScratch::new();
    let mut stack = alloc::vec![p];
    let mut pending = Vec::new();
    while let Some(&top) = stack.last() {
        if memo.contains_key(&top) {
            stack.pop();
            continue;
        }
        pending.clear();
        game::for_each_move(rules, top, |_, q| {
            if !memo.contains_key(&q) {
                pending.push(q);
            }
        });
        if pending.is_empty() {
            let g = scratch.run(game::branching(top), |push| game::for_each_move(rules, top, |_, q| push(memo[&q])));
            memo.insert(top, g);
            stack.pop();
        } else {
            stack.extend_from_slice(&pending);
        }
    }
    Ok(memo[&p])
}

/// Outcome class of `p`.
pub fn outcome(rules: RuleSet, p: Position) -> Result<Outcome, GrundyError> {
    grundy(rules, p, &mut GrundyMemo::new()).map(Outcome::from_grundy)
}

/// Dense Grundy values for every valid position inside a bounding box.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GrundyTable {
    rules: RuleSet,
    bounds: Bounds,
    values: Vec<u32>,
    len: usize,
}

impl GrundyTable {
    fn empty(rules: RuleSet, bounds: Bounds) -> Result<Self, GrundyError> {
        if let RuleSet::Triangular(0) = rules {
            return Err(GameError::InvalidK(0).into());
        }
        let cells =
            bounds.cell_count().filter(|&c| c <= MAX_TABLE_CELLS).ok_or(GrundyError::TableTooLarge { bounds })?;
        Ok(GrundyTable { rules, bounds, values: alloc::vec![UNSET; cells as usize], len: 0 })
    }

    pub fn rules(&self) -> RuleSet {
        self.rules
    }

    pub fn bounds(&self) -> Bounds {
        self.bounds
    }

    /// Number of positions in the domain.
    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    fn index(&self, p: Position) -> Option<usize> {
        if !self.bounds.contains(p) {
            return None;
        }
        let b = self.bounds;
        Some(((p.x * (b.y + 1) + p.y) * (b.z + 1) + p.z) as usize)
    }

    /// Grundy value of `p`, or `None` outside the domain.
    pub fn get(&self, p: Position) -> Option<u32> {
        self.index(p).map(|i| self.values[i]).filter(|&v| v != UNSET)
    }

    pub fn outcome(&self, p: Position) -> Option<Outcome> {
        self.get(p).map(Outcome::from_grundy)
    }

    /// `(position, value)` pairs in lexicographic order.
    pub fn iter(&self) -> impl Iterator<Item = (Position, u32)> + '_ {
        game::positions_iter(self.rules, self.bounds).map(move |p| {
            let v = self.values[self.index(p).expect("enumerated position is in bounds")];
            (p, v)
        })
    }

    /// Rebuilds a table from externally supplied entries (e.g. a CSV export).
    ///
    /// Entries must cover the domain exactly once; values are not checked
    /// against the recursion here, see [`GrundyTable::validate`].
    pub fn from_entries(
        rules: RuleSet,
        bounds: Bounds,
        entries: impl IntoIterator<Item = (Position, u32)>,
    ) -> Result<Self, GrundyError> {
        let mut t = Self::empty(rules, bounds)?;
        for (p, v) in entries {
            if !game::is_valid(rules, p) || v == UNSET {
                return Err(GrundyError::Domain { position: p });
            }
            let i = t.index(p).ok_or(GrundyError::Domain { position: p })?;
            if t.values[i] != UNSET {
                return Err(GrundyError::Duplicate { position: p });
            }
            t.values[i] = v;
            t.len += 1;
        }
        if let Some(p) = game::positions_iter(rules, bounds).find(|&p| t.get(p).is_none()) {
            return Err(GrundyError::Domain { position: p });
        }
        Ok(t)
    }

    /// Checks every entry against the mex recursion under the table's rules.
    pub fn validate(&self) -> Result<(), GrundyError> {
        let mut scratch = MexScratch::new();
        for (p, stored) in self.iter() {
            let mut missing = None;
            let expected = scratch.run(game::branching(p), |push| {
                game::for_each_move(self.rules, p, |_, q| match self.get(q) {
                    Some(v) => push(v),
                    None => missing = Some(q),
                })
            });
            if let Some(q) = missing {
                return Err(GrundyError::MissingSuccessor { from: p, to: q });
            }
            if stored != expected {
                return Err(GrundyError::Inconsistent { position: p, stored, expected });
            }
        }
        Ok(())
    }
}

/// Layer-by-layer table construction.
///
/// Layer `s` holds the valid positions with `x + y + z == s`. Evaluating a
/// position only reads earlier layers, so all of a layer can be evaluated
/// concurrently through `&self` before committing the results.
#[derive(Debug)]
pub struct TableBuilder<G = RuleSet> {
    table: GrundyTable,
    moves: G,
}

impl TableBuilder<RuleSet> {
    pub fn new(rules: RuleSet, bounds: Bounds) -> Result<Self, GrundyError> {
        Self::with_moves(rules, bounds)
    }
}

impl<G: MoveGenerator> TableBuilder<G> {
    pub fn with_moves(moves: G, bounds: Bounds) -> Result<Self, GrundyError> {
        Ok(TableBuilder { table: GrundyTable::empty(moves.rules(), bounds)?, moves })
    }

    /// Index of the last layer.
    pub fn max_layer(&self) -> u64 {
        let b = self.table.bounds;
        b.x + b.y + b.z
    }

    /// Valid positions on layer `s`, lexicographically ordered.
    pub fn layer(&self, s: u64) -> Vec<Position> {
        let b = self.table.bounds;
        let rules = self.table.rules;
        let mut out = Vec::new();
        for x in 0..=b.x.min(s) {
            for y in 0..=b.y.min(s - x) {
                let z = s - x - y;
                let p = Position::new(x, y, z);
                if z <= b.z && game::is_valid(rules, p) {
                    out.push(p);
                }
            }
        }
        out
    }

    /// Mex over the already-committed successors of `p`.
    pub fn evaluate(&self, p: Position, scratch: &mut MexScratch) -> Result<u32, GrundyError> {
        let mut missing = None;
        let g = scratch.run(game::branching(p), |push| {
            self.moves.successors(p, &mut |q| match self.table.get(q) {
                Some(v) => push(v),
                None => missing = Some(q),
            })
        });
        match missing {
            Some(q) => Err(GrundyError::MissingSuccessor { from: p, to: q }),
            None => Ok(g),
        }
    }

    /// Stores the value of `p`. Panics if `p` is outside the box.
    pub fn commit(&mut self, p: Position, value: u32) {
        let i = self.table.index(p).expect("committed position is in bounds");
        debug_assert!(value != UNSET);
        if self.table.values[i] == UNSET {
            self.table.len += 1;
        }
        self.table.values[i] = value;
    }

    pub fn finish(self) -> GrundyTable {
        debug_assert_eq!(self.table.len, game::positions_iter(self.table.rules, self.table.bounds).count());
        self.table
    }

    /// Runs every layer sequentially.
    pub fn run(mut self) -> Result<GrundyTable, GrundyError> {
        let mut scratch = MexScratch::new();
        for s in 0..=self.max_layer() {
            for p in self.layer(s) {
                let g = self.evaluate(p, &mut scratch)?;
                self.commit(p, g);
            }
        }
        Ok(self.finish())
    }
}

/// Builds the full table for `rules` over `bounds` on the current thread.
pub fn build_table(rules: RuleSet, bounds: Bounds) -> Result<GrundyTable, GrundyError> {
    TableBuilder::new(rules, bounds)?.run()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::{enumerate_positions, moves};
    use proptest::prelude::*;

    const TRI3: RuleSet = RuleSet::Triangular(3);

    #[test]
    fn mex_examples() {
        assert_eq!(mex(&[]), 0);
        assert_eq!(mex(&[1, 0, 3, 2]), 4);
        assert_eq!(mex(&[1, 2, 5]), 0);
        assert_eq!(mex(&[0, 0, 0]), 1);
        assert_eq!(mex(&[u32::MAX - 1, 0]), 1);
    }

    #[test]
    fn grundy_counterexample_values() {
        let mut memo = GrundyMemo::new();
        let cases = [
            ((0, 0, 0), 0),
            ((1, 0, 0), 1),
            ((0, 0, 1), 1),
            ((1, 0, 1), 0),
            ((0, 0, 2), 2),
            ((1, 0, 2), 3),
            ((1, 1, 2), 4),
        ];
        for (p, g) in cases {
            assert_eq!(grundy(TRI3, p.into(), &mut memo).unwrap(), g, "{p:?}");
        }
        // Memo picked up everything reachable from (1,1,2).
        assert!(memo.contains_key(&Position::new(1, 0, 1)));
    }

    #[test]
    fn grundy_rejects_invalid() {
        let mut memo = GrundyMemo::new();
        assert!(grundy(TRI3, Position::new(0, 1, 0), &mut memo).is_err());
    }

    #[test]
    fn outcome_examples() {
        assert_eq!(outcome(RuleSet::Rectangular, Position::new(0, 4, 4)).unwrap(), Outcome::P);
        assert_eq!(outcome(TRI3, Position::new(1, 0, 1)).unwrap(), Outcome::P);
        assert_eq!(outcome(TRI3, Position::new(1, 0, 0)).unwrap(), Outcome::N);
    }

    #[test]
    fn rectangular_grundy_is_nim_sum() {
        let mut memo = GrundyMemo::new();
        for x in 0..=8u64 {
            for y in 0..=8 {
                for z in 0..=8 {
                    let g = grundy(RuleSet::Rectangular, Position::new(x, y, z), &mut memo).unwrap();
                    assert_eq!(g as u64, x ^ y ^ z);
                }
            }
        }
    }

    #[test]
    fn small_triangular_table() {
        let t = build_table(TRI3, Bounds::new(2, 1, 2)).unwrap();
        assert_eq!(t.get(Position::new(1, 1, 2)), Some(4));
        assert_eq!(t.get(Position::new(1, 0, 2)), Some(3));
        assert_eq!(t.get(Position::new(0, 1, 0)), None);
        assert_eq!(t.len(), enumerate_positions(TRI3, t.bounds()).len());
        t.validate().unwrap();
    }

    #[test]
    fn table_size_guard() {
        let err = build_table(TRI3, Bounds::uniform(1000)).unwrap_err();
        assert!(matches!(err, GrundyError::TableTooLarge { .. }));
        assert!(build_table(TRI3, Bounds::uniform(u64::MAX)).is_err());
    }

    #[test]
    fn table_matches_memo_recursion() {
        for rules in [TRI3, RuleSet::Triangular(2), RuleSet::Triangular(5), RuleSet::Rectangular] {
            let t = build_table(rules, Bounds::new(9, 6, 9)).unwrap();
            let mut memo = GrundyMemo::new();
            for (p, v) in t.iter() {
                assert_eq!(grundy(rules, p, &mut memo).unwrap(), v);
            }
        }
    }

    #[test]
    fn mex_soundness_and_completeness() {
        let t = build_table(TRI3, Bounds::new(12, 8, 12)).unwrap();
        for (p, v) in t.iter() {
            let succ: Vec<u32> = moves(TRI3, p).unwrap().into_iter().map(|q| t.get(q).unwrap()).collect();
            assert!(!succ.contains(&v));
            for g in 0..v {
                assert!(succ.contains(&g));
            }
        }
    }

    #[test]
    fn from_entries_roundtrip_and_errors() {
        let t = build_table(TRI3, Bounds::uniform(6)).unwrap();
        let back = GrundyTable::from_entries(TRI3, t.bounds(), t.iter()).unwrap();
        assert_eq!(back, t);

        let mut short: Vec<_> = t.iter().collect();
        short.pop();
        assert!(GrundyTable::from_entries(TRI3, t.bounds(), short.clone()).is_err());
        short.push(short[0]);
        assert!(matches!(GrundyTable::from_entries(TRI3, t.bounds(), short), Err(GrundyError::Duplicate { .. })));

        let tampered = t.iter().map(|(p, v)| if p == Position::new(1, 1, 2) { (p, 2) } else { (p, v) });
        let bad = GrundyTable::from_entries(TRI3, t.bounds(), tampered).unwrap();
        assert!(matches!(bad.validate(), Err(GrundyError::Inconsistent { .. })));
    }

    /// Brute-force Grundy value of the disjunctive sum of two triangular
    /// positions, moving in exactly one component per turn.
    fn product_grundy(rules: RuleSet, a: Position, b: Position, memo: &mut BTreeMap<(Position, Position), u32>) -> u32 {
        if let Some(&g) = memo.get(&(a, b)) {
            return g;
        }
        let mut succ = Vec::new();
        for q in moves(rules, a).unwrap() {
            succ.push(product_grundy(rules, q, b, memo));
        }
        for q in moves(rules, b).unwrap() {
            succ.push(product_grundy(rules, a, q, memo));
        }
        let g = mex(&succ);
        memo.insert((a, b), g);
        g
    }

    #[test]
    fn sum_value_examples() {
        assert_eq!(sum_value(&[1, 1]), 0);
        assert_eq!(sum_value(&[4, 2]), 6);
        let mut memo = BTreeMap::new();
        assert_eq!(product_grundy(TRI3, Position::new(1, 1, 2), Position::new(0, 0, 2), &mut memo), 6);
        assert_eq!(product_grundy(TRI3, Position::new(1, 0, 0), Position::new(0, 0, 1), &mut memo), 0);
    }

    #[test]
    fn sum_value_matches_product_game() {
        let b = Bounds::new(3, 1, 3);
        let t = build_table(TRI3, b).unwrap();
        let ps = enumerate_positions(TRI3, b);
        let mut memo = BTreeMap::new();
        for &a in &ps {
            for &c in &ps {
                let direct = product_grundy(TRI3, a, c, &mut memo);
                assert_eq!(direct, sum_value(&[t.get(a).unwrap(), t.get(c).unwrap()]), "{a} + {c}");
            }
        }
    }

    proptest! {
        #[test]
        fn mex_is_least_absent(values in proptest::collection::vec(0u32..20, 0..16)) {
            let m = mex(&values);
            prop_assert!(!values.contains(&m));
            prop_assert!(m as usize <= values.len());
            for g in 0..m {
                prop_assert!(values.contains(&g));
            }
        }
    }
}
