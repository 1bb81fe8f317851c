//! Spans between two structures, span families, density and the
//! greatest dense family, and ⋆-composition.
//!
//! A span `X ↢ U ↣ Y` is kept in canonical form: the left leg is the
//! inclusion of a subset `A ⊆ X` (the domain), the right leg a partial
//! injection `p: A → Y`. In `Str` mode the center additionally carries a
//! relation choice, written in `X`'s element names.

mod compose;
mod density;
mod encode;
mod greatest;

pub use compose::{sieve_closure, star_compose};
pub use density::{
    all_canonical_spans, check_density, greatest_dense_family_explicit, DensityFailure, DensityVerdict,
    Direction, PruneStrategy,
};
pub(crate) use greatest::{greatest_core, Core, PMap};
pub use greatest::{decide_equivalent, greatest_dense_family};

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use serde::Serialize;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::structure::{mask_of, ElementMask, Mode, Morphism, Signature, Structure};

/// A span in canonical form; see the module docs.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Span {
    /// Strictly increasing elements of `X`.
    pub domain: Vec<usize>,
    /// `map[i]` is the image of `domain[i]` in `Y`.
    pub map: Vec<usize>,
    /// `Str` mode only: the center's relations, per relation symbol.
    pub relations: Option<Vec<BTreeSet<Vec<usize>>>>,
}

impl Span {
    /// The identity span of `x`: all of `x`, identity map, all relations.
    pub fn identity(x: &Structure, mode: Mode) -> Span {
        Span {
            domain: (0..x.size()).collect(),
            map: (0..x.size()).collect(),
            relations: (mode == Mode::Str).then(|| x.relations().to_vec()),
        }
    }

    pub fn empty(x: &Structure, mode: Mode) -> Span {
        Span {
            domain: Vec::new(),
            map: Vec::new(),
            relations: (mode == Mode::Str).then(|| vec![BTreeSet::new(); x.relations().len()]),
        }
    }

    pub fn domain_mask(&self) -> ElementMask {
        mask_of(self.domain.iter().copied())
    }

    pub fn image_mask(&self) -> ElementMask {
        mask_of(self.map.iter().copied())
    }

    pub fn apply(&self, a: usize) -> Option<usize> {
        self.domain.binary_search(&a).ok().map(|i| self.map[i])
    }

    /// The center's relations in `X`'s names (induced ones in `Emb` mode).
    pub fn center_relations(&self, x: &Structure) -> Vec<BTreeSet<Vec<usize>>> {
        match &self.relations {
            Some(r) => r.clone(),
            None => x.induced_relations(self.domain_mask()),
        }
    }

    /// Whether `self` extends `smaller`: larger domain, same values on the
    /// smaller domain, and (in `Str` mode) more relation tuples.
    pub fn extends(&self, smaller: &Span) -> bool {
        let values_agree = smaller
            .domain
            .iter()
            .zip(&smaller.map)
            .all(|(&a, &b)| self.apply(a) == Some(b));
        let relations_grow = match (&smaller.relations, &self.relations) {
            (Some(r), Some(s)) => r.iter().zip(s).all(|(r, s)| r.is_subset(s)),
            _ => true,
        };
        values_agree && relations_grow
    }

    /// The same span read from `Y` to `X`.
    pub fn reversed(&self) -> Span {
        let mut pairs: Vec<(usize, usize)> = self.map.iter().copied().zip(self.domain.iter().copied()).collect();
        pairs.sort_unstable();
        let relations = self.relations.as_ref().map(|rels| {
            rels.iter()
                .map(|rel| {
                    rel.iter()
                        .map(|t| t.iter().map(|&a| self.apply(a).expect("tuple inside domain")).collect())
                        .collect()
                })
                .collect()
        });
        Span {
            domain: pairs.iter().map(|p| p.0).collect(),
            map: pairs.iter().map(|p| p.1).collect(),
            relations,
        }
    }

    /// Restriction to the elements of `mask` (which must lie in the domain);
    /// relation tuples leaving `mask` are dropped.
    pub fn restrict(&self, mask: ElementMask) -> Span {
        let (domain, map) = self
            .domain
            .iter()
            .zip(&self.map)
            .filter(|(&a, _)| mask & (1u64 << a) != 0)
            .map(|(&a, &b)| (a, b))
            .unzip();
        let relations = self.relations.as_ref().map(|rels| {
            rels.iter()
                .map(|rel| {
                    rel.iter()
                        .filter(|t| t.iter().all(|&e| mask & (1u64 << e) != 0))
                        .cloned()
                        .collect()
                })
                .collect()
        });
        Span {
            domain,
            map,
            relations,
        }
    }

    /// The center and both legs as morphisms.
    pub fn legs(&self, x: &Arc<Structure>, y: &Arc<Structure>) -> Result<(Arc<Structure>, Morphism, Morphism)> {
        self.check_shape(x, y)?;
        let mask = self.domain_mask();
        if !x.is_closed(mask) {
            return Err(Error::invalid(format!(
                "span domain {:?} is not closed under the function symbols",
                self.domain
            )));
        }
        let (center, carrier) = x.relabel_subset(mask, self.center_relations(x));
        let center = Arc::new(center);
        let left = Morphism::new(center.clone(), x.clone(), carrier)?;
        let right = Morphism::new(center.clone(), y.clone(), self.map.clone())?;
        Ok((center, left, right))
    }

    fn check_shape(&self, x: &Structure, y: &Structure) -> Result<()> {
        if self.domain.len() != self.map.len() {
            return Err(Error::invalid("span domain and map differ in length"));
        }
        if self.domain.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::invalid("span domain must be strictly increasing"));
        }
        if let Some(&bad) = self.domain.iter().find(|&&a| a >= x.size()) {
            return Err(Error::invalid(format!("span domain element {bad} outside left carrier")));
        }
        if let Some(&bad) = self.map.iter().find(|&&b| b >= y.size()) {
            return Err(Error::invalid(format!("span map value {bad} outside right carrier")));
        }
        if let Some(rels) = &self.relations {
            if rels.len() != x.relations().len() {
                return Err(Error::invalid("span relation choice has the wrong number of symbols"));
            }
            let mask = self.domain_mask();
            for (rel, sym) in rels.iter().zip(x.signature().relations()) {
                if rel.iter().any(|t| t.len() != sym.arity) {
                    return Err(Error::invalid(format!("span relation tuple for `{}` has the wrong arity", sym.name)));
                }
                if rel.iter().flatten().any(|&e| e >= 64 || mask & (1u64 << e) == 0) {
                    return Err(Error::invalid("span relation tuple leaves the domain"));
                }
            }
        }
        Ok(())
    }

    /// Checks that both legs are monos of the mode's category.
    pub fn validate(&self, x: &Arc<Structure>, y: &Arc<Structure>, mode: Mode) -> Result<()> {
        match (mode, &self.relations) {
            (Mode::Emb, Some(_)) => return Err(Error::invalid("relation choice given for an emb-mode span")),
            (Mode::Str, None) => return Err(Error::invalid("str-mode span without a relation choice")),
            _ => {}
        }
        let (_, left, right) = self.legs(x, y)?;
        if !(left.is_mono_in(mode) && right.is_mono_in(mode)) {
            return Err(Error::invalid(format!(
                "span with domain {:?} and map {:?} does not have mono legs in {mode} mode",
                self.domain, self.map
            )));
        }
        Ok(())
    }

    pub fn to_json(&self, sig: &Signature) -> Value {
        let mut v = json!({ "domain": self.domain, "map": self.map });
        if let Some(rels) = &self.relations {
            let named: BTreeMap<&str, &BTreeSet<Vec<usize>>> =
                sig.relations().iter().map(|s| s.name.as_str()).zip(rels).collect();
            v["relations"] = json!(named);
        }
        v
    }

    pub fn from_json(v: &Value, sig: &Signature, mode: Mode) -> Result<Span> {
        let list = |key: &str| -> Result<Vec<usize>> {
            serde_json::from_value(v.get(key).cloned().unwrap_or(Value::Null))
                .map_err(|e| Error::invalid(format!("span field `{key}`: {e}")))
        };
        let domain = list("domain")?;
        let map = list("map")?;
        let relations = match mode {
            Mode::Emb => None,
            Mode::Str => {
                let mut rels = vec![BTreeSet::new(); sig.relations().len()];
                if let Some(obj) = v.get("relations") {
                    let named: BTreeMap<String, Vec<Vec<usize>>> = serde_json::from_value(obj.clone())
                        .map_err(|e| Error::invalid(format!("span field `relations`: {e}")))?;
                    for (name, tuples) in named {
                        let r = sig.relation_index(&name).ok_or_else(|| Error::unknown("relation", &name))?;
                        rels[r] = tuples.into_iter().collect();
                    }
                }
                Some(rels)
            }
        };
        Ok(Span {
            domain,
            map,
            relations,
        })
    }
}

/// A morphism between two spans of a family: a map of centers commuting
/// with both legs. Centers are indexed by position in the span domain.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SpanMorphismWitness {
    #[serde(skip)]
    pub source: Span,
    #[serde(skip)]
    pub target: Span,
    pub map: Vec<usize>,
}

impl SpanMorphismWitness {
    /// The connecting map when `target` extends `source`.
    pub fn between(source: &Span, target: &Span) -> Option<SpanMorphismWitness> {
        if !target.extends(source) {
            return None;
        }
        let map = source
            .domain
            .iter()
            .map(|a| target.domain.binary_search(a).expect("extension covers domain"))
            .collect();
        Some(SpanMorphismWitness {
            source: source.clone(),
            target: target.clone(),
            map,
        })
    }

    /// Both triangles commute and the center map preserves the relation choice.
    pub fn verify(&self) -> bool {
        if self.map.len() != self.source.domain.len() {
            return false;
        }
        let triangles = self.map.iter().enumerate().all(|(k, &m)| {
            m < self.target.domain.len()
                && self.target.domain[m] == self.source.domain[k]
                && self.target.map[m] == self.source.map[k]
        });
        let relations = match (&self.source.relations, &self.target.relations) {
            (Some(r), Some(s)) => r.iter().zip(s).all(|(r, s)| r.is_subset(s)),
            (None, None) => true,
            _ => false,
        };
        triangles && relations
    }
}

/// A finite set of canonical spans between fixed `X` and `Y`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpanFamily {
    left: Arc<Structure>,
    right: Arc<Structure>,
    mode: Mode,
    spans: BTreeSet<Span>,
}

impl SpanFamily {
    /// Validates every span; duplicates collapse.
    pub fn new(
        left: Arc<Structure>,
        right: Arc<Structure>,
        mode: Mode,
        spans: impl IntoIterator<Item = Span>,
    ) -> Result<SpanFamily> {
        if left.signature() != right.signature() {
            return Err(Error::SignatureMismatch("span family ends use different signatures".into()));
        }
        mode.check_signature(left.signature())?;
        let spans: BTreeSet<Span> = spans.into_iter().collect();
        for s in &spans {
            s.validate(&left, &right, mode)?;
        }
        Ok(SpanFamily {
            left,
            right,
            mode,
            spans,
        })
    }

    pub(crate) fn from_trusted(left: Arc<Structure>, right: Arc<Structure>, mode: Mode, spans: BTreeSet<Span>) -> Self {
        SpanFamily {
            left,
            right,
            mode,
            spans,
        }
    }

    pub fn empty(left: Arc<Structure>, right: Arc<Structure>, mode: Mode) -> Result<SpanFamily> {
        SpanFamily::new(left, right, mode, [])
    }

    pub fn left(&self) -> &Arc<Structure> {
        &self.left
    }

    pub fn right(&self) -> &Arc<Structure> {
        &self.right
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn spans(&self) -> &BTreeSet<Span> {
        &self.spans
    }

    pub fn iter(&self) -> impl Iterator<Item = &Span> {
        self.spans.iter()
    }

    pub fn len(&self) -> usize {
        self.spans.len()
    }

    pub fn is_empty(&self) -> bool {
        self.spans.is_empty()
    }

    pub fn contains(&self, s: &Span) -> bool {
        self.spans.contains(s)
    }

    fn same_ends(&self, other: &SpanFamily) -> bool {
        self.mode == other.mode && *self.left == *other.left && *self.right == *other.right
    }

    pub fn union(&self, other: &SpanFamily) -> Result<SpanFamily> {
        if !self.same_ends(other) {
            return Err(Error::invalid("union of span families with different ends or modes"));
        }
        let spans = self.spans.union(&other.spans).cloned().collect();
        Ok(SpanFamily::from_trusted(self.left.clone(), self.right.clone(), self.mode, spans))
    }

    pub fn is_subfamily_of(&self, other: &SpanFamily) -> bool {
        self.same_ends(other) && self.spans.is_subset(&other.spans)
    }

    /// Every span read from `Y` to `X`.
    pub fn reversed(&self) -> SpanFamily {
        SpanFamily::from_trusted(
            self.right.clone(),
            self.left.clone(),
            self.mode,
            self.spans.iter().map(Span::reversed).collect(),
        )
    }

    /// Whether every restriction of a member (to a closed subset, and in
    /// `Str` mode with fewer relation tuples) is again a member.
    pub fn is_sieve(&self) -> bool {
        self.spans.iter().all(|s| {
            let mask = s.domain_mask();
            let mut sub = mask;
            loop {
                if self.left.is_closed(sub) {
                    let r = s.restrict(sub);
                    if !self.spans.contains(&r) {
                        return false;
                    }
                    if let Some(rels) = &r.relations {
                        // dropping any single tuple must stay inside the family
                        for (i, rel) in rels.iter().enumerate() {
                            for t in rel {
                                let mut smaller = r.clone();
                                smaller.relations.as_mut().expect("str span")[i].remove(t);
                                if !self.spans.contains(&smaller) {
                                    return false;
                                }
                            }
                        }
                    }
                }
                if sub == 0 {
                    return true;
                }
                sub = (sub - 1) & mask;
            }
        })
    }

    pub fn to_json(&self) -> Value {
        Value::Array(self.spans.iter().map(|s| s.to_json(self.left.signature())).collect())
    }

    /// Reads a JSON array of spans and validates it against the ends.
    pub fn from_json(v: &Value, left: Arc<Structure>, right: Arc<Structure>, mode: Mode) -> Result<SpanFamily> {
        let items = v
            .as_array()
            .ok_or_else(|| Error::invalid("span family must be a JSON array"))?;
        let sig = left.signature().clone();
        let spans = items
            .iter()
            .map(|item| Span::from_json(item, &sig, mode))
            .collect::<Result<Vec<_>>>()?;
        SpanFamily::new(left, right, mode, spans)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn arc(s: Structure) -> Arc<Structure> {
        Arc::new(s)
    }

    #[test]
    fn reversal_is_an_involution() {
        let s = Span {
            domain: vec![0, 2],
            map: vec![1, 0],
            relations: Some(vec![BTreeSet::from([vec![0, 2]])]),
        };
        let r = s.reversed();
        assert_eq!(r.domain, vec![0, 1]);
        assert_eq!(r.map, vec![2, 0]);
        assert_eq!(r.relations, Some(vec![BTreeSet::from([vec![1, 0]])]));
        assert_eq!(r.reversed(), s);
    }

    #[test]
    fn validation_checks_legs() {
        let x = arc(Structure::digraph(2, &[(0, 1)]).unwrap());
        let y = arc(Structure::digraph(2, &[]).unwrap());
        let partial = Span {
            domain: vec![0, 1],
            map: vec![0, 1],
            relations: None,
        };
        assert!(partial.validate(&x, &y, Mode::Emb).is_err());
        let str_span = Span {
            relations: Some(vec![BTreeSet::new()]),
            ..partial.clone()
        };
        assert!(str_span.validate(&x, &y, Mode::Str).is_ok());
        let with_edge = Span {
            relations: Some(vec![BTreeSet::from([vec![0, 1]])]),
            ..partial
        };
        assert!(with_edge.validate(&x, &y, Mode::Str).is_err());
    }

    #[test]
    fn span_morphism_witness_commutes() {
        let small = Span {
            domain: vec![1],
            map: vec![0],
            relations: None,
        };
        let big = Span {
            domain: vec![0, 1],
            map: vec![1, 0],
            relations: None,
        };
        let w = SpanMorphismWitness::between(&small, &big).unwrap();
        assert_eq!(w.map, vec![1]);
        assert!(w.verify());
        assert!(SpanMorphismWitness::between(&big, &small).is_none());
    }

    #[test]
    fn json_round_trip() {
        let x = arc(Structure::digraph(3, &[(0, 1), (1, 2)]).unwrap());
        let fam = SpanFamily::new(
            x.clone(),
            x.clone(),
            Mode::Str,
            [Span::identity(&x, Mode::Str), Span::empty(&x, Mode::Str)],
        )
        .unwrap();
        let back = SpanFamily::from_json(&fam.to_json(), x.clone(), x, Mode::Str).unwrap();
        assert_eq!(back, fam);
    }
}
