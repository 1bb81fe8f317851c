//! ⋆-composition of span families and downward (sieve) closure.

use std::collections::{BTreeSet, HashSet};

use super::{Span, SpanFamily};
use crate::caps::Caps;
use crate::error::{Error, Result};
use crate::structure::subobject::relation_choices;
use crate::structure::ElementMask;

/// Composes families `X — Y` and `Y — Z` through `Y`.
///
/// Each pair `(s, t)` contributes the span on `{a ∈ dom s : s(a) ∈ dom t}`
/// with map `t ∘ s`; in `Str` mode its relations are the tuples of `s`
/// whose image is a tuple of `t`. The result is closed under restriction.
pub fn star_compose(first: &SpanFamily, second: &SpanFamily, caps: &Caps) -> Result<SpanFamily> {
    if *first.right() != *second.left() {
        return Err(Error::MiddleMismatch);
    }
    if first.mode() != second.mode() {
        return Err(Error::invalid("composed families use different modes"));
    }
    let mut composed = BTreeSet::new();
    for s in first.iter() {
        for t in second.iter() {
            composed.insert(compose_pair(s, t));
        }
    }
    let raw = SpanFamily::from_trusted(first.left().clone(), second.right().clone(), first.mode(), composed);
    sieve_closure(&raw, caps)
}

fn compose_pair(s: &Span, t: &Span) -> Span {
    let mut domain = Vec::new();
    let mut map = Vec::new();
    for (&a, &b) in s.domain.iter().zip(&s.map) {
        if let Some(c) = t.apply(b) {
            domain.push(a);
            map.push(c);
        }
    }
    let relations = match (&s.relations, &t.relations) {
        (Some(rs), Some(rt)) => Some(
            rs.iter()
                .zip(rt)
                .map(|(rs, rt)| {
                    rs.iter()
                        .filter(|tuple| {
                            let image: Option<Vec<usize>> = tuple.iter().map(|&a| s.apply(a)).collect();
                            image.is_some_and(|im| rt.contains(&im))
                        })
                        .cloned()
                        .collect()
                })
                .collect(),
        ),
        _ => None,
    };
    Span {
        domain,
        map,
        relations,
    }
}

/// Adds every restriction of every member: to each closed subset of its
/// domain, and in `Str` mode with each smaller relation choice.
pub fn sieve_closure(family: &SpanFamily, caps: &Caps) -> Result<SpanFamily> {
    let x = family.left();
    let mut seen: HashSet<(ElementMask, Vec<usize>)> = HashSet::new();
    let mut out = BTreeSet::new();
    // Str-mode members on the same restricted map differ only in relations;
    // the union of their relation sets generates all choices below them.
    for s in family.iter() {
        let mask = s.domain_mask();
        let mut sub = mask;
        loop {
            if x.is_closed(sub) {
                let r = s.restrict(sub);
                match &r.relations {
                    None => {
                        out.insert(r);
                    }
                    Some(rels) => {
                        let key = (sub, r.map.clone());
                        let count: usize = rels.iter().map(BTreeSet::len).sum();
                        if count == 0 && seen.contains(&key) {
                            // nothing new below a relation-free restriction
                        } else {
                            seen.insert(key);
                            caps.check_spans(out.len().saturating_add(1usize.checked_shl(count as u32).unwrap_or(usize::MAX)))?;
                            for choice in relation_choices(rels) {
                                out.insert(Span {
                                    relations: Some(choice),
                                    ..r.clone()
                                });
                            }
                        }
                    }
                }
                caps.check_spans(out.len())?;
            }
            if sub == 0 {
                break;
            }
            sub = (sub - 1) & mask;
        }
    }
    Ok(SpanFamily::from_trusted(x.clone(), family.right().clone(), family.mode(), out))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::span::{all_canonical_spans, check_density, greatest_dense_family};
    use crate::structure::{Mode, Structure};
    use std::sync::Arc;

    #[test]
    fn full_families_compose_to_all_partial_bijections() {
        let caps = Caps::default();
        let x = Arc::new(Structure::bare(2));
        let full = greatest_dense_family(&x, &x, Mode::Emb, &caps).unwrap();
        let c = star_compose(&full, &full, &caps).unwrap();
        assert_eq!(c.len(), 7);
        assert_eq!(c, full);
    }

    #[test]
    fn empty_input_gives_empty_output() {
        let caps = Caps::default();
        let x = Arc::new(Structure::bare(2));
        let full = greatest_dense_family(&x, &x, Mode::Emb, &caps).unwrap();
        let empty = SpanFamily::empty(x.clone(), x, Mode::Emb).unwrap();
        assert!(star_compose(&full, &empty, &caps).unwrap().is_empty());
        assert!(star_compose(&empty, &full, &caps).unwrap().is_empty());
    }

    #[test]
    fn identity_composes_to_its_restrictions() {
        let caps = Caps::default();
        let x = Arc::new(Structure::digraph(3, &[(0, 1), (1, 2)]).unwrap());
        for mode in [Mode::Emb, Mode::Str] {
            let id = SpanFamily::new(x.clone(), x.clone(), mode, [Span::identity(&x, mode)]).unwrap();
            let c = star_compose(&id, &id, &caps).unwrap();
            // oracle: every canonical span whose map is the identity on its domain
            let expected: BTreeSet<Span> = all_canonical_spans(&x, &x, mode, &caps)
                .unwrap()
                .into_iter()
                .filter(|s| s.domain == s.map)
                .collect();
            assert_eq!(c.spans(), &expected);
            assert!(c.is_sieve());
        }
    }

    #[test]
    fn middle_mismatch_is_rejected() {
        let caps = Caps::default();
        let a = Arc::new(Structure::bare(1));
        let b = Arc::new(Structure::bare(2));
        let f = SpanFamily::empty(a.clone(), a.clone(), Mode::Emb).unwrap();
        let g = SpanFamily::empty(b.clone(), b, Mode::Emb).unwrap();
        assert_eq!(star_compose(&f, &g, &caps), Err(Error::MiddleMismatch));
    }

    #[test]
    fn composite_of_dense_is_dense_for_isomorphic_triangles() {
        let caps = Caps::default();
        let t = Arc::new(Structure::digraph(3, &[(0, 1), (1, 2), (2, 0)]).unwrap());
        let u = Arc::new(t.permuted(&[2, 0, 1]).unwrap());
        let f = greatest_dense_family(&t, &u, Mode::Str, &caps).unwrap();
        let g = greatest_dense_family(&u, &t, Mode::Str, &caps).unwrap();
        let c = star_compose(&f, &g, &caps).unwrap();
        assert!(check_density(&c, &caps).unwrap().is_dense());
    }
}
