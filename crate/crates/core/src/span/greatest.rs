//! Fast computation of the greatest dense family.
//!
//! Two facts keep this tractable. First, the pruning rounds start from the
//! set of all canonical spans, which is closed under restriction, and every
//! round keeps it that way; so "some member extends `s` and covers `B`" can
//! be tested on the single candidate domain `closure(dom s ∪ B)`.
//!
//! Second, in `Str` mode the relation choice of a span never decides its
//! survival. Every round leaves a family of the shape "partial injection
//! `p` with any relation choice `R ⊆ Rmax(p)`", where `Rmax(p)` holds the
//! tuples of the domain that `p` sends into `Y`'s relations. Against a test
//! object `B` with the largest relation choice (the hardest one), `(A, p)`
//! survives the back step iff some member `(A ∪ B, p')` extending it is a
//! homomorphism on the induced structure of `B`; symmetrically forth. So
//! pruning runs on partial injections alone.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::sync::Arc;

use rayon::prelude::*;

use super::{Span, SpanFamily};
use crate::caps::Caps;
use crate::error::{Error, Result};
use crate::structure::subobject::relation_choices;
use crate::structure::{elements_of, full_mask, mask_of, search_maps, ElementMask, MapKind, Mode, Structure};

const UNASSIGNED: usize = usize::MAX;

/// A partial injection `X ⇀ Y` as masks plus a full-length table.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub(crate) struct PMap {
    pub dom: ElementMask,
    pub img: ElementMask,
    pub table: Vec<usize>,
}

impl PMap {
    pub(crate) fn from_table(table: Vec<usize>) -> Self {
        let dom = mask_of((0..table.len()).filter(|&a| table[a] != UNASSIGNED));
        let img = mask_of(table.iter().copied().filter(|&b| b != UNASSIGNED));
        PMap { dom, img, table }
    }

    /// Restriction of a total or partial map to `mask`.
    pub(crate) fn restricted(table: &[usize], mask: ElementMask) -> Self {
        let t = (0..table.len())
            .map(|a| if mask & (1u64 << a) != 0 { table[a] } else { UNASSIGNED })
            .collect();
        PMap::from_table(t)
    }

    fn extends(&self, smaller: &PMap) -> bool {
        smaller.dom & !self.dom == 0 && elements_of(smaller.dom).into_iter().all(|a| self.table[a] == smaller.table[a])
    }

    fn span(&self, relations: Option<Vec<BTreeSet<Vec<usize>>>>) -> Span {
        let domain = elements_of(self.dom);
        let map = domain.iter().map(|&a| self.table[a]).collect();
        Span {
            domain,
            map,
            relations,
        }
    }

    /// Supports of the relation tuples of `x` inside the domain that the map
    /// does not send into `y`.
    fn bad_supports_back(&self, x: &Structure, y: &Structure) -> Vec<ElementMask> {
        let mut out = Vec::new();
        for (r, rel) in x.relations().iter().enumerate() {
            for t in rel {
                if t.iter().all(|&a| self.dom & (1u64 << a) != 0) {
                    let image: Vec<usize> = t.iter().map(|&a| self.table[a]).collect();
                    if !y.holds(r, &image) {
                        out.push(mask_of(t.iter().copied()));
                    }
                }
            }
        }
        out
    }

    /// Same as [`PMap::bad_supports_back`] for the inverse map, in `Y`.
    fn bad_supports_forth(&self, x: &Structure, y: &Structure) -> Vec<ElementMask> {
        let mut inverse = vec![UNASSIGNED; y.size()];
        for a in elements_of(self.dom) {
            inverse[self.table[a]] = a;
        }
        let mut out = Vec::new();
        for (r, rel) in y.relations().iter().enumerate() {
            for s in rel {
                if s.iter().all(|&b| self.img & (1u64 << b) != 0) {
                    let pre: Vec<usize> = s.iter().map(|&b| inverse[b]).collect();
                    if !x.holds(r, &pre) {
                        out.push(mask_of(s.iter().copied()));
                    }
                }
            }
        }
        out
    }

    /// Tuples of the domain sent into `y`'s relations.
    fn max_relations(&self, x: &Structure, y: &Structure) -> Vec<BTreeSet<Vec<usize>>> {
        x.induced_relations(self.dom)
            .into_iter()
            .enumerate()
            .map(|(r, rel)| {
                rel.into_iter()
                    .filter(|t| y.holds(r, &t.iter().map(|&a| self.table[a]).collect::<Vec<_>>()))
                    .collect()
            })
            .collect()
    }
}

/// The surviving partial maps of the fast pruning. In `Emb` mode these are
/// exactly the spans of the greatest family; in `Str` mode each stands for
/// all of its relation choices.
#[derive(Debug)]
pub(crate) struct Core {
    pub x: Arc<Structure>,
    pub y: Arc<Structure>,
    pub mode: Mode,
    pub maps: Vec<PMap>,
    members: HashSet<PMap>,
}

impl Core {
    pub(crate) fn contains(&self, m: &PMap) -> bool {
        self.members.contains(m)
    }

    pub(crate) fn is_empty(&self) -> bool {
        self.maps.is_empty()
    }

    /// Whether `m` is a member and, in `Str` mode, a homomorphism on the
    /// full induced structure of its domain (so it admits every relation
    /// choice of a test object on that domain).
    pub(crate) fn admits(&self, m: &PMap) -> bool {
        self.contains(m) && (self.mode == Mode::Emb || m.bad_supports_back(&self.x, &self.y).is_empty())
    }

    pub(crate) fn expand(&self, caps: &Caps) -> Result<SpanFamily> {
        let mut spans = BTreeSet::new();
        for m in &self.maps {
            match self.mode {
                Mode::Emb => {
                    spans.insert(m.span(None));
                }
                Mode::Str => {
                    let full = m.max_relations(&self.x, &self.y);
                    let count: usize = full.iter().map(BTreeSet::len).sum();
                    caps.check_spans(spans.len().saturating_add(1usize.checked_shl(count as u32).unwrap_or(usize::MAX)))?;
                    for rels in relation_choices(&full) {
                        spans.insert(m.span(Some(rels)));
                    }
                }
            }
        }
        Ok(SpanFamily::from_trusted(self.x.clone(), self.y.clone(), self.mode, spans))
    }
}

fn enumerate_pmaps(x: &Structure, y: &Structure, mode: Mode, caps: &Caps) -> Result<Vec<PMap>> {
    let mut out = Vec::new();
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
        let mut overflow = false;
        search_maps(x, y, &domain, &[], y.full_mask(), kind, &mut |table| {
            out.push(PMap::from_table(table.to_vec()));
            overflow = out.len() > caps.max_spans;
            !overflow
        });
        caps.check_spans(out.len())?;
    }
    Ok(out)
}

/// Runs the fast pruning between `x` and `y`.
pub(crate) fn greatest_core(x: &Arc<Structure>, y: &Arc<Structure>, mode: Mode, caps: &Caps) -> Result<Core> {
    if x.signature() != y.signature() {
        return Err(Error::SignatureMismatch("span ends use different signatures".into()));
    }
    mode.check_signature(x.signature())?;
    caps.check_structure(x)?;
    caps.check_structure(y)?;

    let maps = enumerate_pmaps(x, y, mode, caps)?;
    let mut by_dom: HashMap<ElementMask, Vec<usize>> = HashMap::new();
    let mut by_img: HashMap<ElementMask, Vec<usize>> = HashMap::new();
    for (i, m) in maps.iter().enumerate() {
        by_dom.entry(m.dom).or_default().push(i);
        by_img.entry(m.img).or_default().push(i);
    }
    let (tests_x, tests_y) = match mode {
        Mode::Emb => (x.closed_masks(), y.closed_masks()),
        Mode::Str => (
            (0..=full_mask(x.size())).collect::<Vec<_>>(),
            (0..=full_mask(y.size())).collect::<Vec<_>>(),
        ),
    };
    let (bad_x, bad_y): (Vec<Vec<ElementMask>>, Vec<Vec<ElementMask>>) = match mode {
        Mode::Emb => (vec![Vec::new(); maps.len()], vec![Vec::new(); maps.len()]),
        Mode::Str => maps
            .par_iter()
            .map(|m| (m.bad_supports_back(x, y), m.bad_supports_forth(x, y)))
            .unzip(),
    };
    let clean = |bad: &[ElementMask], b: ElementMask| bad.iter().all(|&s| s & !b != 0);

    let survives = |i: usize, alive: &[bool]| -> bool {
        let m = &maps[i];
        let back = tests_x.iter().all(|&b| {
            let target = x.closure(m.dom | b);
            by_dom.get(&target).is_some_and(|cands| {
                cands
                    .iter()
                    .any(|&j| alive[j] && maps[j].extends(m) && clean(&bad_x[j], b))
            })
        });
        back && tests_y.iter().all(|&b| {
            let target = y.closure(m.img | b);
            by_img.get(&target).is_some_and(|cands| {
                cands
                    .iter()
                    .any(|&j| alive[j] && maps[j].extends(m) && clean(&bad_y[j], b))
            })
        })
    };

    let mut alive = vec![true; maps.len()];
    loop {
        let failing: Vec<usize> = (0..maps.len())
            .into_par_iter()
            .filter(|&i| alive[i] && !survives(i, &alive))
            .collect();
        if failing.is_empty() {
            break;
        }
        for i in failing {
            alive[i] = false;
        }
    }
    let mut survivors: Vec<PMap> = maps.into_iter().zip(alive).filter(|(_, a)| *a).map(|(m, _)| m).collect();
    survivors.sort_by(|a, b| elements_of(a.dom).cmp(&elements_of(b.dom)).then_with(|| a.table.cmp(&b.table)));
    let members = survivors.iter().cloned().collect();
    Ok(Core {
        x: x.clone(),
        y: y.clone(),
        mode,
        maps: survivors,
        members,
    })
}

/// The greatest dense family between `x` and `y` (empty when the two are
/// not equivalent).
pub fn greatest_dense_family(x: &Arc<Structure>, y: &Arc<Structure>, mode: Mode, caps: &Caps) -> Result<SpanFamily> {
    greatest_core(x, y, mode, caps)?.expand(caps)
}

/// Whether some dense family of spans between `x` and `y` exists.
pub fn decide_equivalent(x: &Arc<Structure>, y: &Arc<Structure>, mode: Mode, caps: &Caps) -> Result<bool> {
    Ok(!greatest_core(x, y, mode, caps)?.is_empty())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::span::{greatest_dense_family_explicit, PruneStrategy};

    fn arc(s: Structure) -> Arc<Structure> {
        Arc::new(s)
    }

    #[test]
    fn bare_set_examples() {
        let caps = Caps::default();
        let b = |n| arc(Structure::bare(n));
        assert_eq!(greatest_dense_family(&b(2), &b(2), Mode::Emb, &caps).unwrap().len(), 7);
        assert!(greatest_dense_family(&b(2), &b(3), Mode::Emb, &caps).unwrap().is_empty());
        assert_eq!(greatest_dense_family(&b(1), &b(1), Mode::Emb, &caps).unwrap().len(), 2);
    }

    #[test]
    fn rotated_four_cycles_are_equivalent() {
        let c4 = arc(Structure::digraph(4, &[(0, 1), (1, 2), (2, 3), (3, 0)]).unwrap());
        let rot = arc(c4.permuted(&[1, 2, 3, 0]).unwrap());
        let path = arc(Structure::digraph(4, &[(0, 1), (1, 2), (2, 3)]).unwrap());
        for mode in [Mode::Emb, Mode::Str] {
            assert!(decide_equivalent(&c4, &rot, mode, &Caps::default()).unwrap());
            assert!(!decide_equivalent(&c4, &path, mode, &Caps::default()).unwrap());
        }
    }

    #[test]
    fn fast_matches_explicit_on_small_digraphs() {
        let caps = Caps::default();
        let graphs = [
            arc(Structure::digraph(2, &[(0, 1)]).unwrap()),
            arc(Structure::digraph(2, &[(1, 0)]).unwrap()),
            arc(Structure::digraph(2, &[(0, 0)]).unwrap()),
            arc(Structure::digraph(2, &[]).unwrap()),
            arc(Structure::digraph(3, &[(0, 1), (1, 2)]).unwrap()),
        ];
        for x in &graphs {
            for y in &graphs {
                for mode in [Mode::Emb, Mode::Str] {
                    let fast = greatest_dense_family(x, y, mode, &caps).unwrap();
                    let slow = greatest_dense_family_explicit(x, y, mode, &caps, PruneStrategy::Rounds).unwrap();
                    assert_eq!(fast, slow);
                }
            }
        }
    }

    #[test]
    fn group_families_are_partial_isos_of_subgroups() {
        let z4 = arc(crate::groups::cyclic(4));
        let fam = greatest_dense_family(&z4, &z4, Mode::Emb, &Caps::default()).unwrap();
        // subgroups {0}, {0,2}, Z4; automorphisms 1, 1, 2
        assert_eq!(fam.len(), 4);
    }
}
