//! Positions, rule sets and move generation for the two chocolate-bar games.
//!
//! A position is the triple `(x, y, z)` of cuts still available in each of the
//! three directions. Under [`RuleSet::Rectangular`] every triple is a legal bar
//! and the game is three-heap Nim. Under [`RuleSet::Triangular`] the bar has a
//! slanted edge: a position is legal only when `k * y <= x + z`, and a cut that
//! shortens `x` or `z` may also drag `y` down to `floor((x + z) / k)`.

use alloc::vec::Vec;
use core::fmt;

/// Which chocolate-bar game is being played.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum RuleSet {
    /// Unconstrained rectangular bar; equivalent to three-heap Nim.
    Rectangular,
    /// Triangular bar with slope parameter `k >= 1`.
    Triangular(u64),
}

impl RuleSet {
    /// Triangular rules, rejecting `k == 0`.
    pub fn triangular(k: u64) -> Result<Self, GameError> {
        if k == 0 {
            return Err(GameError::InvalidK(k));
        }
        Ok(RuleSet::Triangular(k))
    }

    /// The slope parameter, if any.
    pub fn k(self) -> Option<u64> {
        match self {
            RuleSet::Rectangular => None,
            RuleSet::Triangular(k) => Some(k),
        }
    }

    /// Largest legal `y` for the given `x` and `z`.
    #[inline]
    pub fn y_cap(self, x: u64, z: u64) -> u64 {
        match self {
            RuleSet::Rectangular => u64::MAX,
            RuleSet::Triangular(k) => (x + z) / k,
        }
    }
}

impl fmt::Display for RuleSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RuleSet::Rectangular => f.write_str("rect"),
            RuleSet::Triangular(k) => write!(f, "tri(k={k})"),
        }
    }
}

/// A chocolate-bar position. Ordering is lexicographic on `(x, y, z)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Position {
    pub x: u64,
    pub y: u64,
    pub z: u64,
}

impl Position {
    pub const END: Position = Position { x: 0, y: 0, z: 0 };

    pub const fn new(x: u64, y: u64, z: u64) -> Self {
        Position { x, y, z }
    }

    /// Nim-sum of the three coordinates.
    #[inline]
    pub fn nim_sum(self) -> u64 {
        self.x ^ self.y ^ self.z
    }

    pub fn sum(self) -> u64 {
        self.x + self.y + self.z
    }

    /// `self <= other` coordinate-wise.
    pub fn le_product(self, other: Position) -> bool {
        self.x <= other.x && self.y <= other.y && self.z <= other.z
    }
}

impl From<(u64, u64, u64)> for Position {
    fn from((x, y, z): (u64, u64, u64)) -> Self {
        Position { x, y, z }
    }
}

impl fmt::Display for Position {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},{})", self.x, self.y, self.z)
    }
}

/// Per-coordinate inclusive maxima for sweeps over the position space.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct Bounds {
    pub x: u64,
    pub y: u64,
    pub z: u64,
}

impl Bounds {
    pub const fn new(x: u64, y: u64, z: u64) -> Self {
        Bounds { x, y, z }
    }

    pub const fn uniform(m: u64) -> Self {
        Bounds { x: m, y: m, z: m }
    }

    pub fn contains(&self, p: Position) -> bool {
        p.x <= self.x && p.y <= self.y && p.z <= self.z
    }

    /// Number of cells in the bounding box, or `None` on overflow.
    pub fn cell_count(&self) -> Option<u64> {
        self.x.checked_add(1)?.checked_mul(self.y.checked_add(1)?)?.checked_mul(self.z.checked_add(1)?)
    }

    /// Coordinate-wise `self <= other`.
    pub fn le(&self, other: &Bounds) -> bool {
        self.x <= other.x && self.y <= other.y && self.z <= other.z
    }
}

/// Coordinates must stay below this so `x + z` never overflows.
pub const COORD_LIMIT: u64 = 1 << 62;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GameError {
    /// The position breaks the `k * y <= x + z` constraint.
    ConstraintViolation {
        rules: RuleSet,
        position: Position,
    },
    /// A coordinate is at or above [`COORD_LIMIT`].
    CoordinateTooLarge(Position),
    InvalidK(u64),
}

impl fmt::Display for GameError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GameError::ConstraintViolation { rules, position } => {
                write!(f, "position {position} is not valid under {rules}")
            }
            GameError::CoordinateTooLarge(p) => {
                write!(f, "position {p} has a coordinate >= 2^62")
            }
            GameError::InvalidK(k) => write!(f, "invalid k = {k}: must be >= 1"),
        }
    }
}

impl core::error::Error for GameError {}

/// Whether `p` is a legal bar under `rules`.
pub fn is_valid(rules: RuleSet, p: Position) -> bool {
    match rules {
        RuleSet::Rectangular => true,
        // y <= floor((x+z)/k) is equivalent to k*y <= x+z and cannot overflow.
        RuleSet::Triangular(k) => k != 0 && p.y <= p.x.saturating_add(p.z) / k,
    }
}

pub(crate) fn check_position(rules: RuleSet, p: Position) -> Result<(), GameError> {
    if let RuleSet::Triangular(0) = rules {
        return Err(GameError::InvalidK(0));
    }
    if p.x >= COORD_LIMIT || p.y >= COORD_LIMIT || p.z >= COORD_LIMIT {
        return Err(GameError::CoordinateTooLarge(p));
    }
    if !is_valid(rules, p) {
        return Err(GameError::ConstraintViolation { rules, position: p });
    }
    Ok(())
}

/// Bitwise XOR of all values; `0` for an empty slice.
pub fn nim_sum(values: &[u64]) -> u64 {
    values.iter().fold(0, |acc, v| acc ^ v)
}

/// The direction a move cuts in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Cut {
    X,
    Y,
    Z,
}

/// Calls `f` once per successor of a position already known to be valid.
///
/// The three families never overlap and never yield `p`, so no
/// deduplication is required. Order: x-cuts, then y-cuts, then z-cuts,
/// each ascending in the cut coordinate.
#[inline]
pub fn for_each_move(rules: RuleSet, p: Position, mut f: impl FnMut(Cut, Position)) {
    let Position { x, y, z } = p;
    for u in 0..x {
        f(Cut::X, Position::new(u, y.min(rules.y_cap(u, z)), z));
    }
    for v in 0..y {
        f(Cut::Y, Position::new(x, v, z));
    }
    for w in 0..z {
        f(Cut::Z, Position::new(x, y.min(rules.y_cap(x, w)), w));
    }
}

/// All positions reachable from `p` in one move, sorted lexicographically.
pub fn moves(rules: RuleSet, p: Position) -> Result<Vec<Position>, GameError> {
    check_position(rules, p)?;
    let mut out = Vec::with_capacity(branching(p));
    for_each_move(rules, p, |_, q| out.push(q));
    out.sort_unstable();
    out.dedup();
    Ok(out)
}

/// Number of successors of `p` (every family contributes one per cut).
pub fn branching(p: Position) -> usize {
    (p.x + p.y + p.z) as usize
}

/// Every valid position inside `bounds`, in lexicographic order.
pub fn enumerate_positions(rules: RuleSet, bounds: Bounds) -> Vec<Position> {
    positions_iter(rules, bounds).collect()
}

/// Lazy form of [`enumerate_positions`].
pub fn positions_iter(rules: RuleSet, bounds: Bounds) -> impl Iterator<Item = Position> {
    let b = bounds;
    (0..=b.x).flat_map(move |x| {
        (0..=b.y).flat_map(move |y| (0..=b.z).map(move |z| Position::new(x, y, z)).filter(move |&p| is_valid(rules, p)))
    })
}
