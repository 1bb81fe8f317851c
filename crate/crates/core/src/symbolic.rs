//! Sets described only by their cardinality, finite or `INF` (countably
//! infinite or larger; one token suffices when only finite subsets are
//! tested).
//!
//! Spans between such sets have a finite center of size `u` and are
//! determined up to isomorphism by `u` and the two complement sizes. Back
//! and forth then reduce to complement arithmetic: to extend a span of
//! center `u` over a finite test set of size `g` on the left, the worst
//! case adds `min(g, |X| − u)` new elements, which must fit into the
//! `|Y| − u` elements outside the image.

use std::fmt;
use std::str::FromStr;

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::span::Direction;

/// A cardinal: a natural number or `INF`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CardToken {
    Fin(u64),
    Inf,
}

impl CardToken {
    pub fn is_finite(self) -> bool {
        matches!(self, CardToken::Fin(_))
    }

    /// `self − k`; `INF − k = INF`, and `n − k` needs `k ≤ n`.
    pub fn checked_sub(self, k: u64) -> Option<CardToken> {
        match self {
            CardToken::Inf => Some(CardToken::Inf),
            CardToken::Fin(n) => n.checked_sub(k).map(CardToken::Fin),
        }
    }

    fn finite(self) -> Option<u64> {
        match self {
            CardToken::Fin(n) => Some(n),
            CardToken::Inf => None,
        }
    }
}

impl fmt::Display for CardToken {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CardToken::Fin(n) => write!(f, "{n}"),
            CardToken::Inf => write!(f, "INF"),
        }
    }
}

impl FromStr for CardToken {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.eq_ignore_ascii_case("inf") {
            return Ok(CardToken::Inf);
        }
        s.parse()
            .map(CardToken::Fin)
            .map_err(|_| Error::invalid(format!("`{s}` is neither a natural number nor INF")))
    }
}

impl Serialize for CardToken {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

/// Sets of these sizes admit a dense family of spans exactly when they
/// have the same finite size or are both infinite.
pub fn sym_equivalent(a: CardToken, b: CardToken) -> bool {
    a == b
}

/// A span with finite center between symbolic sets.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct SymSpan {
    pub center: u64,
    pub left_rest: CardToken,
    pub right_rest: CardToken,
}

impl SymSpan {
    pub fn new(center: u64, a: CardToken, b: CardToken) -> Option<SymSpan> {
        Some(SymSpan {
            center,
            left_rest: a.checked_sub(center)?,
            right_rest: b.checked_sub(center)?,
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "kebab-case")]
pub enum SymDensityVerdict {
    Dense,
    NotDense {
        span: SymSpan,
        direction: Direction,
        test: u64,
    },
}

impl SymDensityVerdict {
    pub fn is_dense(&self) -> bool {
        matches!(self, SymDensityVerdict::Dense)
    }
}

/// How many new elements a test of size `g` can force, against how many
/// are available on the other side.
fn step_fails(g: u64, rest_here: CardToken, rest_there: CardToken) -> bool {
    let forced = match rest_here {
        CardToken::Fin(r) => g.min(r),
        CardToken::Inf => g,
    };
    match rest_there {
        CardToken::Fin(r) => forced > r,
        CardToken::Inf => false,
    }
}

/// Finite test sizes that matter: up to the set's size, and beyond every
/// finite complement when the set is infinite.
fn test_sizes(side: CardToken, other: CardToken) -> std::ops::RangeInclusive<u64> {
    match side {
        CardToken::Fin(n) => 0..=n,
        CardToken::Inf => 0..=other.finite().unwrap_or(0) + 1,
    }
}

/// Number of centers examined when both sides are infinite; every center
/// behaves the same then, since both complements stay `INF`.
const INFINITE_CENTERS: u64 = 3;

/// Back and forth for the family of all finite-center spans between sets
/// of sizes `a` and `b`.
///
/// A failure reports the largest failing center, then back before forth,
/// then the smallest test size.
pub fn sym_density_check(a: CardToken, b: CardToken) -> SymDensityVerdict {
    let top = match (a.finite(), b.finite()) {
        (Some(x), Some(y)) => x.min(y),
        (Some(x), None) | (None, Some(x)) => x,
        (None, None) => INFINITE_CENTERS,
    };
    for u in (0..=top).rev() {
        let span = SymSpan::new(u, a, b).expect("center fits both sides");
        for g in test_sizes(a, b) {
            if step_fails(g, span.left_rest, span.right_rest) {
                return SymDensityVerdict::NotDense {
                    span,
                    direction: Direction::Back,
                    test: g,
                };
            }
        }
        for g in test_sizes(b, a) {
            if step_fails(g, span.right_rest, span.left_rest) {
                return SymDensityVerdict::NotDense {
                    span,
                    direction: Direction::Forth,
                    test: g,
                };
            }
        }
    }
    SymDensityVerdict::Dense
}

/// An injection between symbolic sets, marked bijective or not.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct SymMap {
    pub src: CardToken,
    pub dst: CardToken,
    pub bijective: bool,
}

impl SymMap {
    pub fn new(src: CardToken, dst: CardToken, bijective: bool) -> Result<SymMap> {
        if src > dst {
            return Err(Error::invalid(format!("no injection from a set of size {src} into one of size {dst}")));
        }
        match (src, dst, bijective) {
            (CardToken::Fin(m), CardToken::Fin(n), true) if m != n => {
                Err(Error::invalid(format!("no bijection between sizes {m} and {n}")))
            }
            (CardToken::Fin(_), CardToken::Inf, true) => Err(Error::invalid("no bijection from a finite set onto INF")),
            (CardToken::Fin(m), CardToken::Fin(n), false) if m == n => Err(Error::invalid(format!(
                "an injection between sets of size {m} is a bijection"
            ))),
            _ => Ok(SymMap { src, dst, bijective }),
        }
    }
}

/// Witness that a finite test subset of the source factors through a span.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct SymWitness {
    pub test: u64,
    pub span: SymSpan,
}

/// Searches, for each finite test size, a finite-center span of the dense
/// family through which the test subset factors compatibly with the map.
/// `None` when no dense family of finite-center spans exists.
pub fn sym_embedding_witnesses(f: SymMap) -> Option<Vec<SymWitness>> {
    if !sym_density_check(f.src, f.dst).is_dense() {
        return None;
    }
    // The family holds every finite-center span; a test subset of size `g`
    // factors through the restriction of the map to it, a span with center
    // `g`, provided that span exists.
    let mut out = Vec::new();
    for g in test_sizes(f.src, f.dst) {
        let span = SymSpan::new(g, f.src, f.dst)?;
        out.push(SymWitness { test: g, span });
    }
    Some(out)
}

/// Whether an injection of the given kind is a finitary embedding of sets.
pub fn sym_embedding(src: CardToken, dst: CardToken, bijective: bool) -> Result<bool> {
    let f = SymMap::new(src, dst, bijective)?;
    Ok(sym_embedding_witnesses(f).is_some())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Tail {
    /// Identity maps from the last stage on.
    Constant,
    /// Proper inclusions forever after the last stage.
    StrictlyIncreasing,
}

/// A chain of injections given by a finite prefix of sizes and a tail.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SymChain {
    pub prefix: Vec<CardToken>,
    pub tail: Tail,
}

impl SymChain {
    pub fn new(prefix: Vec<CardToken>, tail: Tail) -> Result<SymChain> {
        if prefix.is_empty() {
            return Err(Error::invalid("a chain needs at least one stage"));
        }
        if prefix.windows(2).any(|w| w[0] > w[1]) {
            return Err(Error::invalid("chain sizes must be non-decreasing under injections"));
        }
        Ok(SymChain { prefix, tail })
    }

    pub fn colimit(&self) -> CardToken {
        match self.tail {
            Tail::Constant => *self.prefix.last().expect("non-empty"),
            Tail::StrictlyIncreasing => CardToken::Inf,
        }
    }

    /// Prefix steps as maps; a step between equal finite sizes is a bijection.
    /// Steps between `INF` stages are taken as proper inclusions.
    pub fn steps(&self) -> Vec<SymMap> {
        self.prefix
            .windows(2)
            .map(|w| SymMap {
                src: w[0],
                dst: w[1],
                bijective: w[0] == w[1] && w[0].is_finite(),
            })
            .collect()
    }

    /// The repeating map of the tail.
    pub fn tail_step(&self) -> SymMap {
        let last = *self.prefix.last().expect("non-empty");
        match self.tail {
            Tail::Constant => SymMap {
                src: last,
                dst: last,
                bijective: true,
            },
            Tail::StrictlyIncreasing => SymMap {
                src: last,
                dst: match last {
                    CardToken::Fin(n) => CardToken::Fin(n + 1),
                    CardToken::Inf => CardToken::Inf,
                },
                bijective: false,
            },
        }
    }
}

impl FromStr for SymChain {
    type Err = Error;
    /// `1,2,3,+` (strictly increasing tail) or `3,3,=` (constant tail);
    /// without a marker the tail is constant.
    fn from_str(s: &str) -> Result<Self> {
        let mut parts: Vec<&str> = s.split(',').map(str::trim).filter(|p| !p.is_empty()).collect();
        let tail = match parts.last() {
            Some(&"+") => Tail::StrictlyIncreasing,
            Some(&"=") => Tail::Constant,
            _ => {
                parts.push("=");
                Tail::Constant
            }
        };
        parts.pop();
        let prefix = parts.into_iter().map(str::parse).collect::<Result<Vec<CardToken>>>()?;
        SymChain::new(prefix, tail)
    }
}

pub fn sym_chain_colimit(c: &SymChain) -> CardToken {
    c.colimit()
}

/// A ladder of symbolic chains: one component per prefix stage, each marked
/// bijective or not; tail stages repeat the last component.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SymLadder {
    pub lower: SymChain,
    pub upper: SymChain,
    pub components: Vec<SymMap>,
}

impl SymLadder {
    pub fn new(lower: SymChain, upper: SymChain, bijective: &[bool]) -> Result<SymLadder> {
        if lower.prefix.len() != upper.prefix.len() || bijective.len() != lower.prefix.len() {
            return Err(Error::invalid("ladder chains and components differ in length"));
        }
        let components = lower
            .prefix
            .iter()
            .zip(&upper.prefix)
            .zip(bijective)
            .map(|((&a, &b), &bij)| SymMap::new(a, b, bij))
            .collect::<Result<Vec<_>>>()?;
        if lower.tail == Tail::StrictlyIncreasing && upper.colimit().is_finite() {
            return Err(Error::invalid("a growing chain cannot inject into a chain of bounded finite size"));
        }
        Ok(SymLadder {
            lower,
            upper,
            components,
        })
    }

    /// The map between colimits.
    pub fn colimit_map(&self) -> SymMap {
        let (src, dst) = (self.lower.colimit(), self.upper.colimit());
        let last = *self.components.last().expect("non-empty");
        let bijective = match (src, dst) {
            (CardToken::Fin(_), CardToken::Fin(_)) => last.bijective,
            (CardToken::Inf, CardToken::Inf) => last.bijective && self.lower.tail == self.upper.tail,
            _ => false,
        };
        SymMap { src, dst, bijective }
    }
}

/// Ladder check for symbolic chains, mirroring
/// [`crate::chain::verify_ladder`].
pub fn sym_verify_ladder(ladder: &SymLadder) -> Result<crate::chain::LadderReport> {
    let mut failures = Vec::new();
    for (label, chain) in [("lower", &ladder.lower), ("upper", &ladder.upper)] {
        for (i, s) in chain.steps().iter().enumerate() {
            if !sym_embedding(s.src, s.dst, s.bijective)? {
                failures.push(format!("{label} map {i}"));
            }
        }
        let t = chain.tail_step();
        if !sym_embedding(t.src, t.dst, t.bijective)? {
            failures.push(format!("{label} tail"));
        }
    }
    for (i, c) in ladder.components.iter().enumerate() {
        if !sym_embedding(c.src, c.dst, c.bijective)? {
            failures.push(format!("component {i}"));
        }
    }
    if !failures.is_empty() {
        return Ok(crate::chain::LadderReport {
            hypothesis_ok: false,
            conclusion_ok: None,
            failures,
        });
    }
    let f = ladder.colimit_map();
    Ok(crate::chain::LadderReport {
        hypothesis_ok: true,
        conclusion_ok: Some(sym_embedding(f.src, f.dst, f.bijective)?),
        failures,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use CardToken::{Fin, Inf};

    #[test]
    fn equivalence_examples() {
        assert!(sym_equivalent(Fin(3), Fin(3)));
        assert!(!sym_equivalent(Fin(2), Fin(5)));
        assert!(sym_equivalent(Inf, Inf));
        assert!(!sym_equivalent(Fin(4), Inf));
    }

    #[test]
    fn density_examples() {
        assert!(sym_density_check(Inf, Inf).is_dense());
        assert!(sym_density_check(Fin(0), Fin(0)).is_dense());
        assert_eq!(
            sym_density_check(Fin(2), Fin(3)),
            SymDensityVerdict::NotDense {
                span: SymSpan {
                    center: 2,
                    left_rest: Fin(0),
                    right_rest: Fin(1)
                },
                direction: Direction::Forth,
                test: 1,
            }
        );
    }

    #[test]
    fn token_arithmetic() {
        assert_eq!(Inf.checked_sub(5), Some(Inf));
        assert_eq!(Fin(3).checked_sub(4), None);
        assert!(Fin(100) < Inf);
        assert_eq!("inf".parse::<CardToken>().unwrap(), Inf);
        assert!("-1".parse::<CardToken>().is_err());
    }

    #[test]
    fn embedding_examples() {
        assert!(sym_embedding(Inf, Inf, false).unwrap());
        assert!(!sym_embedding(Fin(2), Fin(3), false).unwrap());
        assert!(sym_embedding(Fin(4), Fin(4), true).unwrap());
        assert!(sym_embedding(Fin(3), Fin(2), false).is_err());
    }

    #[test]
    fn chains_and_ladders() {
        let c: SymChain = "1,2,3,+".parse().unwrap();
        assert_eq!(c.colimit(), Inf);
        let infs: SymChain = "INF,INF".parse().unwrap();
        let l = SymLadder::new(infs.clone(), infs, &[false, false]).unwrap();
        let r = sym_verify_ladder(&l).unwrap();
        assert_eq!((r.hypothesis_ok, r.conclusion_ok), (true, Some(true)));
        let threes: SymChain = "3,3,=".parse().unwrap();
        let l = SymLadder::new(threes.clone(), threes, &[true, true]).unwrap();
        let r = sym_verify_ladder(&l).unwrap();
        assert_eq!((r.hypothesis_ok, r.conclusion_ok), (true, Some(true)));
        assert!("3,2".parse::<SymChain>().is_err());
    }
}
