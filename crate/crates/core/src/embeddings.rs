//! The finitary embedding condition for morphisms, and purity.
//!
//! A map `f: X → Y` is a finitary embedding when, for some dense family
//! between `X` and `Y`, every finitely generated subobject `g: G ↣ X`
//! factors through a member `X ↢ U ↣ Y` by some `t: G → U` with `ut = g`
//! and `vt = fg`. It suffices to test the greatest dense family.

use std::collections::BTreeSet;

use serde::Serialize;
use serde_json::{json, Value};

use crate::caps::Caps;
use crate::error::{Error, Result};
use crate::span::{check_density, greatest_core, DensityVerdict, PMap, Span, SpanFamily};
use crate::structure::{
    elements_of, enumerate_test_objects, full_mask, mask_of, search_maps, ElementMask, MapKind, Mode, Morphism,
    Structure, TestObject,
};

/// A factorization of one test object through one span.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EmbeddingWitness {
    pub test: TestObject,
    pub span: Span,
    /// `t`: position `k` of the test carrier goes to position `connecting[k]`
    /// of the span domain.
    pub connecting: Vec<usize>,
}

impl EmbeddingWitness {
    /// `ut = g`, `vt = fg`, and `t` maps the test relations into the center's.
    pub fn verify(&self, f: &Morphism) -> bool {
        let s = &self.span;
        let n = self.test.carrier.len();
        if self.connecting.len() != n {
            return false;
        }
        let commutes = (0..n).all(|k| {
            let i = self.connecting[k];
            let g = self.test.carrier[k];
            i < s.domain.len() && s.domain[i] == g && s.map[i] == f.apply(g)
        });
        let relations = match (&self.test.relations, &s.relations) {
            (Some(rg), Some(ru)) => rg.iter().zip(ru).all(|(a, b)| a.is_subset(b)),
            (None, None) => true,
            _ => false,
        };
        commutes && relations
    }

    pub fn to_json(&self, x: &Structure) -> Value {
        json!({
            "test": test_json(&self.test, x),
            "span": self.span.to_json(x.signature()),
            "connecting": self.connecting,
        })
    }

    /// Reads the output of [`EmbeddingWitness::to_json`] back.
    pub fn from_json(v: &Value, x: &Structure, mode: Mode) -> Result<EmbeddingWitness> {
        let field = |key: &str| v.get(key).ok_or_else(|| Error::invalid(format!("witness lacks `{key}`")));
        let test = field("test")?;
        let carrier: Vec<usize> = serde_json::from_value(test.get("carrier").cloned().unwrap_or(Value::Null))
            .map_err(|e| Error::invalid(format!("witness test carrier: {e}")))?;
        let relations = match mode {
            Mode::Emb => None,
            Mode::Str => {
                let mut rels = vec![BTreeSet::new(); x.signature().relations().len()];
                if let Some(obj) = test.get("relations").and_then(Value::as_object) {
                    for (name, tuples) in obj {
                        let r = x
                            .signature()
                            .relation_index(name)
                            .ok_or_else(|| Error::unknown("relation", name))?;
                        rels[r] = serde_json::from_value(tuples.clone())
                            .map_err(|e| Error::invalid(format!("witness test relation `{name}`: {e}")))?;
                    }
                }
                Some(rels)
            }
        };
        let connecting = serde_json::from_value(field("connecting")?.clone())
            .map_err(|e| Error::invalid(format!("witness connecting map: {e}")))?;
        Ok(EmbeddingWitness {
            test: TestObject { carrier, relations },
            span: Span::from_json(field("span")?, x.signature(), mode)?,
            connecting,
        })
    }
}

pub(crate) fn test_json(t: &TestObject, x: &Structure) -> Value {
    let rels = t.relations.as_ref().map(|rels| {
        x.signature()
            .relations()
            .iter()
            .zip(rels)
            .map(|(s, r)| (s.name.clone(), json!(r)))
            .collect::<serde_json::Map<_, _>>()
    });
    json!({ "carrier": t.carrier, "relations": rels })
}

/// Outcome of [`check_embedding_condition`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EmbeddingVerdict {
    pub map: Vec<usize>,
    pub holds: bool,
    /// One witness per test object that has one, in test-object order.
    pub witnesses: Vec<EmbeddingWitness>,
    /// The least test object without a witness.
    pub failure: Option<TestObject>,
}

/// Tests the embedding condition of `f` against a dense family.
///
/// The family is rejected with [`Error::NotDense`] when it is not dense.
pub fn check_embedding_condition(f: &Morphism, family: &SpanFamily, caps: &Caps) -> Result<EmbeddingVerdict> {
    if **family.left() != **f.source() || **family.right() != **f.target() {
        return Err(Error::invalid("span family does not run between the morphism's source and target"));
    }
    if let DensityVerdict::NotDense(reason) = check_density(family, caps)? {
        return Err(Error::NotDense(format!("{reason:?}")));
    }
    let tests = enumerate_test_objects(f.source(), family.mode(), caps)?;
    let mut witnesses = Vec::new();
    let mut failure = None;
    for test in tests {
        match family.iter().find_map(|s| witness_in(f, s, &test)) {
            Some(w) => witnesses.push(w),
            None => {
                failure.get_or_insert(test);
            }
        }
    }
    Ok(EmbeddingVerdict {
        map: f.map().to_vec(),
        holds: failure.is_none(),
        witnesses,
        failure,
    })
}

fn witness_in(f: &Morphism, s: &Span, test: &TestObject) -> Option<EmbeddingWitness> {
    let connecting: Option<Vec<usize>> = test
        .carrier
        .iter()
        .map(|g| {
            let i = s.domain.binary_search(g).ok()?;
            (s.map[i] == f.apply(*g)).then_some(i)
        })
        .collect();
    let w = EmbeddingWitness {
        test: test.clone(),
        span: s.clone(),
        connecting: connecting?,
    };
    w.verify(f).then_some(w)
}

fn test_masks(x: &Structure, mode: Mode) -> Vec<ElementMask> {
    match mode {
        Mode::Emb => x.closed_masks(),
        Mode::Str => (0..=full_mask(x.size())).collect(),
    }
}

/// Whether `f` is a finitary embedding in the given mode's category.
pub fn decide_lambda_embedding(f: &Morphism, mode: Mode, caps: &Caps) -> Result<bool> {
    let core = greatest_core(f.source(), f.target(), mode, caps)?;
    Ok(embedding_against_core(f, &core))
}

pub(crate) fn embedding_against_core(f: &Morphism, core: &crate::span::Core) -> bool {
    // The greatest family is closed under restriction, so a witness for a
    // test object on `B` exists iff `f|B` itself is a member admitting the
    // largest relation choice on `B`.
    !core.is_empty()
        && test_masks(f.source(), core.mode)
            .into_iter()
            .all(|b| core.admits(&PMap::restricted(f.map(), b)))
}

/// A commuting square with no filler: `A ⊆ B ⊆ Y`, `A` inside the image
/// of `f`, and no mono `t: B → X` with `t = f⁻¹` on `A`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PuritySquare {
    pub outer: Vec<usize>,
    pub inner: Vec<usize>,
}

/// The least square (by outer, then inner carrier) without a filler.
///
/// Squares range over subobjects `B` of the target and subobjects `A` of `B`
/// inside the image. In `Str` mode the hardest relation choices are used:
/// all induced tuples on `B`, none on `A`.
pub fn purity_counterexample(f: &Morphism, mode: Mode, caps: &Caps) -> Result<Option<PuritySquare>> {
    let (x, y) = (f.source(), f.target());
    mode.check_signature(x.signature())?;
    caps.check_structure(x)?;
    caps.check_structure(y)?;
    if !f.is_mono_in(mode) {
        return Err(Error::precondition(format!("purity is defined for monos; map is {}", f.classify().as_str())));
    }
    let mut inverse = vec![usize::MAX; y.size()];
    for (a, &b) in f.map().iter().enumerate() {
        inverse[b] = a;
    }
    let image = mask_of(f.map().iter().copied());
    let mut outers = test_masks(y, mode);
    outers.sort_by_key(|&m| elements_of(m));
    for b in outers {
        let mut inners: Vec<ElementMask> = test_masks(y, mode).into_iter().filter(|&a| a & !(b & image) == 0).collect();
        inners.sort_by_key(|&m| elements_of(m));
        let induced = y.induced_relations(b);
        for a in inners {
            if !has_filler(y, x, b, a, &inverse, &induced, mode) {
                return Ok(Some(PuritySquare {
                    outer: elements_of(b),
                    inner: elements_of(a),
                }));
            }
        }
    }
    Ok(None)
}

fn has_filler(
    y: &Structure,
    x: &Structure,
    outer: ElementMask,
    inner: ElementMask,
    inverse: &[usize],
    induced: &[BTreeSet<Vec<usize>>],
    mode: Mode,
) -> bool {
    let fixed: Vec<(usize, usize)> = elements_of(inner).into_iter().map(|a| (a, inverse[a])).collect();
    // the search only checks tuples touching a newly placed element
    let fixed_ok = induced.iter().enumerate().all(|(r, rel)| {
        rel.iter()
            .filter(|t| t.iter().all(|&e| inner & (1u64 << e) != 0))
            .all(|t| x.holds(r, &t.iter().map(|&e| inverse[e]).collect::<Vec<_>>()))
    });
    if !fixed_ok {
        return false;
    }
    let free = elements_of(outer & !inner);
    let kind = match mode {
        Mode::Emb => MapKind::Embedding,
        Mode::Str => MapKind::InjectiveHom(Some(induced)),
    };
    let mut found = false;
    search_maps(y, x, &free, &fixed, x.full_mask(), kind, &mut |_| {
        found = true;
        false
    });
    found
}

pub fn check_purity(f: &Morphism, mode: Mode, caps: &Caps) -> Result<bool> {
    Ok(purity_counterexample(f, mode, caps)?.is_none())
}

/// The embedding verdict of `f` against the greatest dense family, or
/// `None` when that family is empty (the ends are not even equivalent).
pub fn explain_lambda_embedding(f: &Morphism, mode: Mode, caps: &Caps) -> Result<Option<EmbeddingVerdict>> {
    let family = crate::span::greatest_dense_family(f.source(), f.target(), mode, caps)?;
    if family.is_empty() {
        return Ok(None);
    }
    check_embedding_condition(f, &family, caps).map(Some)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::sync::Arc;
    use crate::span::{all_canonical_spans, greatest_dense_family};

    fn bare(n: usize) -> Arc<Structure> {
        Arc::new(Structure::bare(n))
    }

    fn morphism(x: &Arc<Structure>, y: &Arc<Structure>, map: &[usize]) -> Result<Morphism> {
        Morphism::new(x.clone(), y.clone(), map.to_vec())
    }

    #[test]
    fn identity_is_an_embedding() {
        let caps = Caps::default();
        let x = Arc::new(Structure::digraph(3, &[(0, 1), (1, 2)]).unwrap());
        let id = Morphism::identity(x.clone());
        for mode in [Mode::Emb, Mode::Str] {
            let fam = greatest_dense_family(&x, &x, mode, &caps).unwrap();
            let v = check_embedding_condition(&id, &fam, &caps).unwrap();
            assert!(v.holds);
            assert!(v.witnesses.iter().all(|w| w.verify(&id)));
            assert!(decide_lambda_embedding(&id, mode, &caps).unwrap());
        }
    }

    #[test]
    fn inclusion_of_a_point_is_rejected() {
        let caps = Caps::default();
        let f = morphism(&bare(1), &bare(2), &[0]).unwrap();
        let fam = greatest_dense_family(&bare(1), &bare(2), Mode::Emb, &caps).unwrap();
        assert!(fam.is_empty());
        assert!(matches!(check_embedding_condition(&f, &fam, &caps), Err(Error::NotDense(_))));
        assert!(!decide_lambda_embedding(&f, Mode::Emb, &caps).unwrap());
        assert!(explain_lambda_embedding(&f, Mode::Emb, &caps).unwrap().is_none());
    }

    #[test]
    fn swap_of_a_pair_is_an_embedding() {
        let caps = Caps::default();
        let x = bare(2);
        let swap = morphism(&x, &x, &[1, 0]).unwrap();
        let all = SpanFamily::new(x.clone(), x.clone(), Mode::Emb, all_canonical_spans(&x, &x, Mode::Emb, &caps).unwrap()).unwrap();
        assert_eq!(all.len(), 7);
        assert!(check_embedding_condition(&swap, &all, &caps).unwrap().holds);
    }

    #[test]
    fn collapsing_hom_is_not_an_embedding() {
        let caps = Caps::default();
        let x = bare(2);
        let collapse = morphism(&x, &x, &[0, 0]).unwrap();
        assert!(!decide_lambda_embedding(&collapse, Mode::Emb, &caps).unwrap());
        assert!(!decide_lambda_embedding(&collapse, Mode::Str, &caps).unwrap());
    }

    #[test]
    fn purity_examples() {
        let caps = Caps::default();
        let inc = morphism(&bare(1), &bare(2), &[0]).unwrap();
        let sq = purity_counterexample(&inc, Mode::Emb, &caps).unwrap().unwrap();
        assert_eq!(sq.outer, vec![0, 1]);
        let x = Arc::new(Structure::digraph(3, &[(0, 1), (1, 2)]).unwrap());
        assert!(check_purity(&Morphism::identity(x.clone()), Mode::Str, &caps).unwrap());
        let collapse = morphism(&bare(2), &bare(2), &[0, 0]).unwrap();
        assert!(matches!(check_purity(&collapse, Mode::Emb, &caps), Err(Error::Precondition(_))));
    }

    #[test]
    fn fast_decision_matches_explicit_verdict() {
        let caps = Caps::default();
        let c3 = Arc::new(Structure::digraph(3, &[(0, 1), (1, 2), (2, 0)]).unwrap());
        for map in [[1, 2, 0], [0, 2, 1], [0, 1, 2], [0, 0, 1]] {
            let f = morphism(&c3, &c3, &map).unwrap();
            for mode in [Mode::Emb, Mode::Str] {
                let fast = decide_lambda_embedding(&f, mode, &caps).unwrap();
                let slow = explain_lambda_embedding(&f, mode, &caps).unwrap().is_some_and(|v| v.holds);
                assert_eq!(fast, slow, "{map:?} {mode}");
            }
        }
    }
}
