//! Density checking against explicit test objects, and the reference
//! (unoptimized) greatest-family pruning used to cross-check the fast one.

use std::collections::BTreeSet;
use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use super::encode::{EncodedSpan, EncodedTest, TupleIndex};
use super::{Span, SpanFamily};
use crate::caps::Caps;
use crate::error::{Error, Result};
use crate::structure::subobject::relation_choices;
use crate::structure::{
    elements_of, enumerate_test_objects, full_mask, search_maps, MapKind, Mode, Structure, TestObject,
};

/// Which side a test object lives on: `Back` tests objects of `X`,
/// `Forth` tests objects of `Y`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Back,
    Forth,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum DensityFailure {
    /// The family has no spans at all.
    Empty,
    /// No member extends `span` over `test`.
    Unextendable {
        #[serde(skip)]
        span: Span,
        direction: Direction,
        test: TestObject,
    },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DensityVerdict {
    Dense,
    NotDense(DensityFailure),
}

impl DensityVerdict {
    pub fn is_dense(&self) -> bool {
        matches!(self, DensityVerdict::Dense)
    }

    pub fn to_json(&self, family: &SpanFamily) -> Value {
        match self {
            DensityVerdict::Dense => json!({ "dense": true }),
            DensityVerdict::NotDense(DensityFailure::Empty) => {
                json!({ "dense": false, "counterexample": { "kind": "empty" } })
            }
            DensityVerdict::NotDense(DensityFailure::Unextendable { span, direction, test }) => {
                let sig = family.left().signature();
                let named = test.relations.as_ref().map(|rels| {
                    sig.relations()
                        .iter()
                        .zip(rels)
                        .map(|(s, r)| (s.name.clone(), json!(r)))
                        .collect::<serde_json::Map<_, _>>()
                });
                json!({
                    "dense": false,
                    "counterexample": {
                        "kind": "unextendable",
                        "span": span.to_json(sig),
                        "direction": direction,
                        "test": { "carrier": test.carrier, "relations": named },
                    }
                })
            }
        }
    }
}

/// How the reference pruning removes failing spans.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PruneStrategy {
    /// Every failing span of a round is removed at once.
    Rounds,
    /// Spans are revisited in order and removed as soon as they fail,
    /// so later checks see earlier removals.
    OneAtATime,
}

struct Checker {
    spans: Vec<EncodedSpan>,
    tests_x: Vec<EncodedTest>,
    tests_y: Vec<EncodedTest>,
}

impl Checker {
    fn new(x: &Structure, y: &Structure, mode: Mode, spans: &[Span], caps: &Caps) -> Result<(Self, Vec<TestObject>, Vec<TestObject>)> {
        let ix = TupleIndex::new(x);
        let iy = TupleIndex::new(y);
        let objects_x = enumerate_test_objects(x, mode, caps)?;
        let objects_y = enumerate_test_objects(y, mode, caps)?;
        let checker = Checker {
            spans: spans.iter().map(|s| EncodedSpan::new(s, x.size(), &ix, &iy)).collect(),
            tests_x: objects_x.iter().map(|t| EncodedTest::new(t, &ix)).collect(),
            tests_y: objects_y.iter().map(|t| EncodedTest::new(t, &iy)).collect(),
        };
        Ok((checker, objects_x, objects_y))
    }

    /// First failing test for span `i` against the live members, back
    /// tests before forth tests.
    fn first_failure(&self, i: usize, alive: &[bool]) -> Option<(Direction, usize)> {
        let span = &self.spans[i];
        let ext: Vec<&EncodedSpan> = self
            .spans
            .iter()
            .zip(alive)
            .filter(|(j, &live)| live && j.extends(span))
            .map(|(j, _)| j)
            .collect();
        let back = self
            .tests_x
            .iter()
            .position(|t| !ext.iter().any(|j| t.mask & !j.dom == 0 && t.rels.is_subset(&j.rx)));
        if let Some(k) = back {
            return Some((Direction::Back, k));
        }
        self.tests_y
            .iter()
            .position(|t| !ext.iter().any(|j| t.mask & !j.img == 0 && t.rels.is_subset(&j.ry)))
            .map(|k| (Direction::Forth, k))
    }
}

/// Checks the back and forth conditions of every member against every test
/// object. The reported failure is the least (span, direction, test) triple.
pub fn check_density(family: &SpanFamily, caps: &Caps) -> Result<DensityVerdict> {
    if family.is_empty() {
        return Ok(DensityVerdict::NotDense(DensityFailure::Empty));
    }
    let spans: Vec<Span> = family.iter().cloned().collect();
    let (checker, objects_x, objects_y) = Checker::new(family.left(), family.right(), family.mode(), &spans, caps)?;
    let alive = vec![true; spans.len()];
    let failure = (0..spans.len())
        .into_par_iter()
        .find_map_first(|i| checker.first_failure(i, &alive).map(|f| (i, f)));
    Ok(match failure {
        None => DensityVerdict::Dense,
        Some((i, (direction, k))) => {
            let test = match direction {
                Direction::Back => objects_x[k].clone(),
                Direction::Forth => objects_y[k].clone(),
            };
            DensityVerdict::NotDense(DensityFailure::Unextendable {
                span: spans[i].clone(),
                direction,
                test,
            })
        }
    })
}

/// Every canonical span between `x` and `y`, sorted.
///
/// `Emb`: partial isomorphisms between closed subsets. `Str`: every partial
/// injection with every relation choice its legs allow.
pub fn all_canonical_spans(x: &Structure, y: &Structure, mode: Mode, caps: &Caps) -> Result<Vec<Span>> {
    if x.signature() != y.signature() {
        return Err(Error::SignatureMismatch("span ends use different signatures".into()));
    }
    mode.check_signature(x.signature())?;
    caps.check_structure(x)?;
    caps.check_structure(y)?;
    let mut out = Vec::new();
    let mut overflow = false;
    let no_relations = vec![BTreeSet::new(); x.relations().len()];
    let masks = match mode {
        Mode::Emb => x.closed_masks(),
        Mode::Str => (0..=full_mask(x.size())).collect(),
    };
    for mask in masks {
        let domain = elements_of(mask);
        let kind = match mode {
            Mode::Emb => MapKind::Embedding,
            Mode::Str => MapKind::InjectiveHom(Some(&no_relations)),
        };
        search_maps(x, y, &domain, &[], y.full_mask(), kind, &mut |table| {
            let map: Vec<usize> = domain.iter().map(|&a| table[a]).collect();
            match mode {
                Mode::Emb => out.push(Span {
                    domain: domain.clone(),
                    map,
                    relations: None,
                }),
                Mode::Str => {
                    let full: Vec<BTreeSet<Vec<usize>>> = x
                        .induced_relations(mask)
                        .into_iter()
                        .enumerate()
                        .map(|(r, rel)| {
                            rel.into_iter()
                                .filter(|t| y.holds(r, &t.iter().map(|&a| table[a]).collect::<Vec<_>>()))
                                .collect()
                        })
                        .collect();
                    for rels in relation_choices(&full) {
                        out.push(Span {
                            domain: domain.clone(),
                            map: map.clone(),
                            relations: Some(rels),
                        });
                    }
                }
            }
            overflow = out.len() > caps.max_spans;
            !overflow
        });
        caps.check_spans(out.len())?;
    }
    out.sort();
    Ok(out)
}

/// The greatest dense family by explicit pruning of all canonical spans.
/// Slow; kept as the reference the fast path is tested against.
pub fn greatest_dense_family_explicit(
    x: &Arc<Structure>,
    y: &Arc<Structure>,
    mode: Mode,
    caps: &Caps,
    strategy: PruneStrategy,
) -> Result<SpanFamily> {
    let spans = all_canonical_spans(x, y, mode, caps)?;
    let (checker, _, _) = Checker::new(x, y, mode, &spans, caps)?;
    let mut alive = vec![true; spans.len()];
    match strategy {
        PruneStrategy::Rounds => loop {
            let failing: Vec<usize> = (0..spans.len())
                .into_par_iter()
                .filter(|&i| alive[i] && checker.first_failure(i, &alive).is_some())
                .collect();
            if failing.is_empty() {
                break;
            }
            for i in failing {
                alive[i] = false;
            }
        },
        PruneStrategy::OneAtATime => loop {
            let mut changed = false;
            for i in 0..spans.len() {
                if alive[i] && checker.first_failure(i, &alive).is_some() {
                    alive[i] = false;
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        },
    }
    let survivors = spans.into_iter().zip(alive).filter(|(_, a)| *a).map(|(s, _)| s).collect();
    Ok(SpanFamily::from_trusted(x.clone(), y.clone(), mode, survivors))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bare(n: usize) -> Arc<Structure> {
        Arc::new(Structure::bare(n))
    }

    #[test]
    fn all_partial_bijections_of_a_pair_are_dense() {
        let x = bare(2);
        let spans = all_canonical_spans(&x, &x, Mode::Emb, &Caps::default()).unwrap();
        assert_eq!(spans.len(), 7);
        let fam = SpanFamily::new(x.clone(), x, Mode::Emb, spans).unwrap();
        assert!(check_density(&fam, &Caps::default()).unwrap().is_dense());
    }

    #[test]
    fn empty_span_alone_fails_back_on_a_singleton() {
        let x = bare(2);
        let fam = SpanFamily::new(x.clone(), x.clone(), Mode::Emb, [Span::empty(&x, Mode::Emb)]).unwrap();
        match check_density(&fam, &Caps::default()).unwrap() {
            DensityVerdict::NotDense(DensityFailure::Unextendable { direction, test, .. }) => {
                assert_eq!(direction, Direction::Back);
                assert_eq!(test.carrier, vec![0]);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn empty_family_is_not_dense() {
        let x = bare(1);
        let fam = SpanFamily::empty(x.clone(), x, Mode::Emb).unwrap();
        assert_eq!(
            check_density(&fam, &Caps::default()).unwrap(),
            DensityVerdict::NotDense(DensityFailure::Empty)
        );
    }

    #[test]
    fn explicit_pruning_on_bare_sets() {
        let caps = Caps::default();
        for strategy in [PruneStrategy::Rounds, PruneStrategy::OneAtATime] {
            assert_eq!(greatest_dense_family_explicit(&bare(2), &bare(2), Mode::Emb, &caps, strategy).unwrap().len(), 7);
            assert!(greatest_dense_family_explicit(&bare(2), &bare(3), Mode::Emb, &caps, strategy).unwrap().is_empty());
            assert_eq!(greatest_dense_family_explicit(&bare(1), &bare(1), Mode::Emb, &caps, strategy).unwrap().len(), 2);
        }
    }

    #[test]
    fn str_spans_count_relation_choices() {
        let e = Arc::new(Structure::digraph(2, &[(0, 1)]).unwrap());
        let spans = all_canonical_spans(&e, &e, Mode::Str, &Caps::default()).unwrap();
        // 7 partial injections; the identity admits the edge, so one extra.
        assert_eq!(spans.len(), 8);
    }
}
