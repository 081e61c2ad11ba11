//! Step sequences and the bit-sequence generated by a position.
//!
//! For odd `k`, three affine steps act on even integers:
//! `P1(h) = 2h + 2`, `P2(h) = 2h`, `P3(h) = 2h + 1 - k`. Starting from 2 and
//! applying steps yields a [`StepSequence`], which either stays inside
//! `[0, k)` (Type 1), escapes upwards (Type 2) or escapes below zero (Type 3).
//!
//! Reading the binary digits of a nim-sum-zero triple `(x, y, z)` from the
//! top bit down produces such a sequence whose last term is `x + z - k*y`.
//! With `k = 4m + 3` the sequence is Type 1 exactly when `y = floor((x+z)/k)`,
//! and the window `[0, 2m]` vs `[2m+2, k)` of each term determines the next
//! bits uniquely ([`complete_yz`]).

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

/// One of the three affine steps.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum StepFunction {
    /// `2h + 2`
    P1,
    /// `2h`
    P2,
    /// `2h + 1 - k`
    P3,
}

impl StepFunction {
    pub const ALL: [StepFunction; 3] = [StepFunction::P1, StepFunction::P2, StepFunction::P3];
}

/// Classification of a step sequence.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SeqType {
    /// Every term lies in `[0, k)`.
    Type1,
    /// Leaves `[0, k)` upwards and stays at or above `k`.
    Type2,
    /// Leaves `[0, k)` downwards and stays negative.
    Type3,
}

/// Position of `y` relative to `floor((x + z) / k)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FloorRelation {
    /// `y == floor((x+z)/k)`, i.e. `0 <= x + z - k*y < k`.
    AtFloor,
    /// `y < floor((x+z)/k)`, i.e. `x + z - k*y >= k`.
    BelowFloor,
    /// `y > floor((x+z)/k)`, i.e. `x + z - k*y < 0`.
    AboveFloor,
}

/// Which part of the top-bit frame `x_n = z_n = 1, y_n = 0` is broken.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FrameBit {
    /// `x_n != 1`
    X,
    /// `z_n != 1`
    Z,
    /// `y_n != 0`, or `y` has bits above `n`.
    Y,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SequenceError {
    /// `k` must be odd (and below 2^62); some operations need `k % 4 == 3`.
    InvalidK {
        k: u64,
        expected: &'static str,
    },
    EmptySequence,
    /// The first term is not 2.
    BadStart(i64),
    /// `terms[index]` is not the image of `terms[index - 1]` under any step.
    NotAStep {
        index: usize,
    },
    Overflow,
    Frame(FrameBit),
    NonZeroNimSum {
        x: u64,
        y: u64,
        z: u64,
    },
    /// `complete_yz` requires `x >= 1`.
    ZeroX,
    /// Extension requires a Type 1 sequence.
    NotType1,
}

impl fmt::Display for SequenceError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SequenceError::InvalidK { k, expected } => write!(f, "invalid k = {k}: expected {expected}"),
            SequenceError::EmptySequence => f.write_str("empty sequence"),
            SequenceError::BadStart(t) => write!(f, "sequence must start at 2, found {t}"),
            SequenceError::NotAStep { index } => {
                write!(f, "term {index} is not reachable from term {} by any step", index - 1)
            }
            SequenceError::Overflow => f.write_str("sequence term overflows 64-bit arithmetic"),
            SequenceError::Frame(FrameBit::X) => f.write_str("top bit x_n is not set"),
            SequenceError::Frame(FrameBit::Z) => f.write_str("top bit z_n is not set"),
            SequenceError::Frame(FrameBit::Y) => f.write_str("y has a set bit at or above position n"),
            SequenceError::NonZeroNimSum { x, y, z } => {
                write!(f, "nim-sum of ({x},{y},{z}) is {} (must be 0)", x ^ y ^ z)
            }
            SequenceError::ZeroX => f.write_str("x must be at least 1"),
            SequenceError::NotType1 => f.write_str("sequence is not Type 1"),
        }
    }
}

impl core::error::Error for SequenceError {}

const K_LIMIT: u64 = 1 << 62;

fn odd_k(k: u64) -> Result<i64, SequenceError> {
    if k % 2 == 1 && k < K_LIMIT {
        Ok(k as i64)
    } else {
        Err(SequenceError::InvalidK { k, expected: "odd k below 2^62" })
    }
}

fn k_4m3(k: u64) -> Result<i64, SequenceError> {
    if k % 4 == 3 && k < K_LIMIT {
        Ok(k as i64)
    } else {
        Err(SequenceError::InvalidK { k, expected: "k = 4m + 3" })
    }
}

fn step(k: i64, f: StepFunction, h: i64) -> Option<i64> {
    let doubled = h.checked_mul(2)?;
    match f {
        StepFunction::P1 => doubled.checked_add(2),
        StepFunction::P2 => Some(doubled),
        StepFunction::P3 => doubled.checked_add(1 - k),
    }
}

/// Applies one step for odd `k`.
pub fn apply_step(k: u64, f: StepFunction, h: i64) -> Result<i64, SequenceError> {
    step(odd_k(k)?, f, h).ok_or(SequenceError::Overflow)
}

/// A sequence starting at 2 and advanced one step at a time.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StepSequence {
    k: u64,
    terms: Vec<i64>,
}

impl StepSequence {
    /// The one-term sequence `{2}`.
    pub fn new(k: u64) -> Result<Self, SequenceError> {
        odd_k(k)?;
        Ok(StepSequence { k, terms: vec![2] })
    }

    pub fn from_steps(k: u64, steps: &[StepFunction]) -> Result<Self, SequenceError> {
        let mut s = Self::new(k)?;
        for &f in steps {
            s.push(f)?;
        }
        Ok(s)
    }

    /// Wraps explicit terms after checking every transition is a step.
    /// An empty list is accepted here and rejected by [`classify_sequence`].
    pub fn from_terms(k: u64, terms: Vec<i64>) -> Result<Self, SequenceError> {
        let kk = odd_k(k)?;
        if let Some(&first) = terms.first() {
            if first != 2 {
                return Err(SequenceError::BadStart(first));
            }
        }
        for (i, w) in terms.windows(2).enumerate() {
            if !StepFunction::ALL.iter().any(|&f| step(kk, f, w[0]) == Some(w[1])) {
                return Err(SequenceError::NotAStep { index: i + 1 });
            }
        }
        Ok(StepSequence { k, terms })
    }

    pub fn k(&self) -> u64 {
        self.k
    }

    pub fn terms(&self) -> &[i64] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn last(&self) -> Option<i64> {
        self.terms.last().copied()
    }

    pub fn push(&mut self, f: StepFunction) -> Result<i64, SequenceError> {
        let last = self.last().ok_or(SequenceError::EmptySequence)?;
        let next = step(self.k as i64, f, last).ok_or(SequenceError::Overflow)?;
        self.terms.push(next);
        Ok(next)
    }

    /// The step taken between each pair of consecutive terms.
    pub fn steps(&self) -> Vec<StepFunction> {
        let k = self.k as i64;
        self.terms
            .windows(2)
            .map(|w| {
                *StepFunction::ALL
                    .iter()
                    .find(|&&f| step(k, f, w[0]) == Some(w[1]))
                    .expect("transitions are validated on construction")
            })
            .collect()
    }

    pub fn classify(&self) -> Result<SeqType, SequenceError> {
        classify_sequence(self)
    }

    /// Extends a Type 1 sequence to `len` terms while staying Type 1.
    ///
    /// Requires `k = 4m + 3`. A term in `[0, 2m]` is followed by `P1` when
    /// `upper(i)` returns true for the new index `i` and by `P2` otherwise; a
    /// term in `[2m + 2, k)` is always followed by `P3`.
    pub fn extend_type1(&mut self, len: usize, mut upper: impl FnMut(usize) -> bool) -> Result<(), SequenceError> {
        let k = k_4m3(self.k)?;
        let m = (k - 3) / 4;
        if self.classify()? != SeqType::Type1 {
            return Err(SequenceError::NotType1);
        }
        while self.terms.len() < len {
            let h = self.terms[self.terms.len() - 1];
            let f = if h <= 2 * m {
                if upper(self.terms.len()) {
                    StepFunction::P1
                } else {
                    StepFunction::P2
                }
            } else {
                StepFunction::P3
            };
            self.push(f)?;
        }
        Ok(())
    }
}

/// Classifies by the last term: `[0,k)` is Type 1, `>= k` Type 2, `< 0` Type 3.
pub fn classify_sequence(seq: &StepSequence) -> Result<SeqType, SequenceError> {
    let last = seq.last().ok_or(SequenceError::EmptySequence)?;
    Ok(if last < 0 {
        SeqType::Type3
    } else if last as u64 >= seq.k {
        SeqType::Type2
    } else {
        SeqType::Type1
    })
}

/// Where `y` sits relative to `floor((x + z) / k)`.
pub fn inequality_class(k: u64, x: u64, y: u64, z: u64) -> FloorRelation {
    let d = x as i128 + z as i128 - k as i128 * y as i128;
    if d < 0 {
        FloorRelation::AboveFloor
    } else if d >= k as i128 {
        FloorRelation::BelowFloor
    } else {
        FloorRelation::AtFloor
    }
}

/// A triple in the top-bit frame `x_n = z_n = 1, y_n = 0`, where `n` is the
/// highest set bit of `max(x, z)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BitTriple {
    pub x: u64,
    pub y: u64,
    pub z: u64,
    n: u32,
}

impl BitTriple {
    pub fn new(x: u64, y: u64, z: u64) -> Result<Self, SequenceError> {
        let top = x.max(z);
        if top == 0 {
            return Err(SequenceError::Frame(FrameBit::X));
        }
        let n = 63 - top.leading_zeros();
        if (x >> n) & 1 == 0 {
            return Err(SequenceError::Frame(FrameBit::X));
        }
        if (z >> n) & 1 == 0 {
            return Err(SequenceError::Frame(FrameBit::Z));
        }
        if y >> n != 0 {
            return Err(SequenceError::Frame(FrameBit::Y));
        }
        Ok(BitTriple { x, y, z, n })
    }

    /// Index of the top bit.
    pub fn n(&self) -> u32 {
        self.n
    }

    /// `(x_i, y_i, z_i)`.
    pub fn bits(&self, i: u32) -> (u8, u8, u8) {
        let b = |v: u64| ((v >> i) & 1) as u8;
        (b(self.x), b(self.y), b(self.z))
    }
}

/// The sequence `s_0..s_n` generated by a nim-sum-zero triple, where
/// `s_j = sum_{i=n-j}^{n} (x_i + z_i - k*y_i) * 2^(i+j-n)`.
pub fn generate_sequence(k: u64, bt: &BitTriple) -> Result<StepSequence, SequenceError> {
    let kk = odd_k(k)?;
    if bt.x ^ bt.y ^ bt.z != 0 {
        return Err(SequenceError::NonZeroNimSum { x: bt.x, y: bt.y, z: bt.z });
    }
    let n = bt.n;
    let mut terms = Vec::with_capacity(n as usize + 1);
    for j in 0..=n {
        let mut s: i64 = 0;
        for i in (n - j)..=n {
            let (xi, yi, zi) = bt.bits(i);
            let digit = xi as i64 + zi as i64 - kk * yi as i64;
            let weight = 1i64.checked_shl(i + j - n).filter(|&w| w > 0).ok_or(SequenceError::Overflow)?;
            s = digit.checked_mul(weight).and_then(|t| s.checked_add(t)).ok_or(SequenceError::Overflow)?;
        }
        terms.push(s);
    }
    Ok(StepSequence { k, terms })
}

/// Type of the sequence generated by a nim-sum-zero triple in the top-bit frame.
pub fn classify_position(k: u64, x: u64, y: u64, z: u64) -> Result<SeqType, SequenceError> {
    k_4m3(k)?;
    if x ^ y ^ z != 0 {
        return Err(SequenceError::NonZeroNimSum { x, y, z });
    }
    let bt = BitTriple::new(x, y, z)?;
    classify_sequence(&generate_sequence(k, &bt)?)
}

/// The unique `(y, z)` with `z`'s top bit equal to `x`'s, `y_n = 0`,
/// `x ^ y ^ z == 0` and `y == floor((x + z) / k)`, for `k = 4m + 3`.
///
/// Built from the top bit down: while the running term is in `[0, 2m]` the
/// next bits are `(y_i, z_i) = (0, x_i)`, and while it is in `[2m + 2, k)`
/// they are `(1, 1 - x_i)`.
pub fn complete_yz(k: u64, x: u64) -> Result<(u64, u64), SequenceError> {
    let k = k_4m3(k)?;
    if x == 0 {
        return Err(SequenceError::ZeroX);
    }
    let m = (k - 3) / 4;
    let n = 63 - x.leading_zeros();
    let (mut y, mut z) = (0u64, 1u64 << n);
    let mut s: i64 = 2;
    for i in (0..n).rev() {
        let xi = (x >> i) & 1;
        if s <= 2 * m {
            z |= xi << i;
            s = 2 * s + 2 * xi as i64;
        } else {
            y |= 1 << i;
            z |= (1 - xi) << i;
            s = 2 * s + 1 - k;
        }
        debug_assert!((0..k).contains(&s));
    }
    Ok((y, z))
}
