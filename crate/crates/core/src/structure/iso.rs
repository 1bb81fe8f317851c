use std::collections::BTreeSet;
use std::sync::Arc;

use super::{elements_of, tuples, ElementMask, Morphism, Structure};

pub(crate) const UNASSIGNED: usize = usize::MAX;

/// Constraint family for [`search_maps`].
#[derive(Clone, Copy, Debug)]
pub(crate) enum MapKind<'a> {
    /// Injective; preserves and reflects relations among assigned elements;
    /// commutes with functions wherever arguments and value are assigned.
    Embedding,
    /// Injective; maps the given tuples (all source tuples when `None`)
    /// into the target relations. Relational signatures only.
    InjectiveHom(Option<&'a [BTreeSet<Vec<usize>>]>),
}

/// Depth-first enumeration of maps from `domain` (elements of `x`, assigned
/// in the given order) into `codomain ⊆ y`, extending `fixed`.
///
/// `visit` receives a table of length `|x|` with [`UNASSIGNED`] outside the
/// domain; returning `false` stops the search.
pub(crate) fn search_maps(
    x: &Structure,
    y: &Structure,
    domain: &[usize],
    fixed: &[(usize, usize)],
    codomain: ElementMask,
    kind: MapKind<'_>,
    visit: &mut dyn FnMut(&[usize]) -> bool,
) {
    let mut table = vec![UNASSIGNED; x.size()];
    let mut preimage = vec![UNASSIGNED; y.size()];
    for &(a, b) in fixed {
        table[a] = b;
        preimage[b] = a;
    }
    let mut search = Search {
        x,
        y,
        domain,
        codomain,
        kind,
        table,
        preimage,
    };
    search.run(0, visit);
}

struct Search<'a> {
    x: &'a Structure,
    y: &'a Structure,
    domain: &'a [usize],
    codomain: ElementMask,
    kind: MapKind<'a>,
    table: Vec<usize>,
    preimage: Vec<usize>,
}

impl Search<'_> {
    fn run(&mut self, depth: usize, visit: &mut dyn FnMut(&[usize]) -> bool) -> bool {
        if depth == self.domain.len() {
            return visit(&self.table);
        }
        let a = self.domain[depth];
        for b in elements_of(self.codomain) {
            if self.preimage[b] != UNASSIGNED {
                continue;
            }
            self.table[a] = b;
            self.preimage[b] = a;
            let ok = self.consistent(a);
            if ok && !self.run(depth + 1, visit) {
                self.table[a] = UNASSIGNED;
                self.preimage[b] = UNASSIGNED;
                return false;
            }
            self.table[a] = UNASSIGNED;
            self.preimage[b] = UNASSIGNED;
        }
        true
    }

    fn assigned(&self, e: usize) -> bool {
        self.table[e] != UNASSIGNED
    }

    fn consistent(&self, a: usize) -> bool {
        let b = self.table[a];
        let image = |t: &[usize]| -> Vec<usize> { t.iter().map(|&e| self.table[e]).collect() };
        match self.kind {
            MapKind::Embedding => {
                for (r, rel) in self.x.relations().iter().enumerate() {
                    for t in rel {
                        if t.contains(&a) && t.iter().all(|&e| self.assigned(e)) && !self.y.holds(r, &image(t)) {
                            return false;
                        }
                    }
                }
                for (r, rel) in self.y.relations().iter().enumerate() {
                    for s in rel {
                        if s.contains(&b) && s.iter().all(|&e| self.preimage[e] != UNASSIGNED) {
                            let pre: Vec<usize> = s.iter().map(|&e| self.preimage[e]).collect();
                            if !self.x.holds(r, &pre) {
                                return false;
                            }
                        }
                    }
                }
                let assigned: Vec<usize> = (0..self.x.size()).filter(|&e| self.assigned(e)).collect();
                for (f, sym) in self.x.signature().functions().iter().enumerate() {
                    for args in tuples(&assigned, sym.arity) {
                        let out = self.x.apply(f, &args);
                        if !(args.contains(&a) || out == a) || !self.assigned(out) {
                            continue;
                        }
                        if self.table[out] != self.y.apply(f, &image(&args)) {
                            return false;
                        }
                    }
                }
                true
            }
            MapKind::InjectiveHom(chosen) => {
                let check = |r: usize, t: &Vec<usize>| {
                    !(t.contains(&a) && t.iter().all(|&e| self.assigned(e))) || self.y.holds(r, &image(t))
                };
                match chosen {
                    Some(rels) => rels.iter().enumerate().all(|(r, rel)| rel.iter().all(|t| check(r, t))),
                    None => self
                        .x
                        .relations()
                        .iter()
                        .enumerate()
                        .all(|(r, rel)| rel.iter().all(|t| check(r, t))),
                }
            }
        }
    }
}

/// Some isomorphism `x → y`, found by backtracking over bijections in
/// lexicographic order, or `None`.
pub fn iso_oracle(x: &Arc<Structure>, y: &Arc<Structure>) -> Option<Morphism> {
    if x.signature() != y.signature() || x.size() != y.size() {
        return None;
    }
    let domain: Vec<usize> = (0..x.size()).collect();
    let mut found = None;
    search_maps(x, y, &domain, &[], y.full_mask(), MapKind::Embedding, &mut |t| {
        found = Some(t.to_vec());
        false
    });
    found.map(|map| Morphism::new(x.clone(), y.clone(), map).expect("valid table"))
}

/// Every isomorphism `x → y`.
pub fn all_isomorphisms(x: &Arc<Structure>, y: &Arc<Structure>) -> Vec<Morphism> {
    if x.signature() != y.signature() || x.size() != y.size() {
        return Vec::new();
    }
    let domain: Vec<usize> = (0..x.size()).collect();
    let mut out = Vec::new();
    search_maps(x, y, &domain, &[], y.full_mask(), MapKind::Embedding, &mut |t| {
        out.push(Morphism::new(x.clone(), y.clone(), t.to_vec()).expect("valid table"));
        true
    });
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::structure::MorphismClass;

    fn arc(s: Structure) -> Arc<Structure> {
        Arc::new(s)
    }

    #[test]
    fn triangle_identity_found() {
        let t = arc(Structure::digraph(3, &[(0, 1), (1, 2), (2, 0)]).unwrap());
        let iso = iso_oracle(&t, &t).unwrap();
        assert_eq!(iso.map(), &[0, 1, 2]);
        assert_eq!(all_isomorphisms(&t, &t).len(), 3);
    }

    #[test]
    fn path_is_not_two_points() {
        let p = arc(Structure::digraph(2, &[(0, 1)]).unwrap());
        let d = arc(Structure::digraph(2, &[]).unwrap());
        assert!(iso_oracle(&p, &d).is_none());
    }

    #[test]
    fn z4_is_not_klein() {
        let sig = std::sync::Arc::new(crate::structure::Signature::from_symbols(&[], &[("add", 2)]).unwrap());
        let z4 = arc(Structure::builder(sig.clone(), 4).function_fn("add", |a| (a[0] + a[1]) % 4).unwrap().build().unwrap());
        let v4 = arc(Structure::builder(sig, 4).function_fn("add", |a| a[0] ^ a[1]).unwrap().build().unwrap());
        assert!(iso_oracle(&z4, &v4).is_none());
        assert!(iso_oracle(&v4, &z4).is_none());
        assert_eq!(all_isomorphisms(&v4, &v4).len(), 6);
        assert_eq!(all_isomorphisms(&z4, &z4).len(), 2);
    }

    #[test]
    fn found_isomorphisms_classify_as_iso() {
        let c4 = arc(Structure::digraph(4, &[(0, 1), (1, 2), (2, 3), (3, 0)]).unwrap());
        let rotated = arc(c4.permuted(&[2, 3, 0, 1]).unwrap());
        for iso in all_isomorphisms(&c4, &rotated) {
            assert_eq!(iso.classify(), MorphismClass::Iso);
        }
        assert_eq!(all_isomorphisms(&c4, &rotated).len(), 4);
    }
}
