use std::collections::BTreeSet;
use std::sync::Arc;

use serde::Serialize;

use super::{elements_of, full_mask, mask_of, ElementMask, Mode, Morphism, Structure};
use crate::caps::Caps;
use crate::error::{Error, Result};

/// A substructure of `X` together with its inclusion map.
#[derive(Clone, Debug)]
pub struct Substructure {
    pub carrier: Vec<usize>,
    pub structure: Arc<Structure>,
    pub inclusion: Morphism,
}

/// The substructure generated by `seed`: closure under all function symbols,
/// relations induced from `x`.
pub fn generated_substructure(x: &Arc<Structure>, seed: &[usize]) -> Result<Substructure> {
    if let Some(&bad) = seed.iter().find(|&&e| e >= x.size()) {
        return Err(Error::precondition(format!("seed element {bad} outside carrier")));
    }
    let mask = x.closure(mask_of(seed.iter().copied()));
    let (sub, carrier) = x.induced(mask)?;
    let structure = Arc::new(sub);
    let inclusion = Morphism::new(structure.clone(), x.clone(), carrier.clone())?;
    Ok(Substructure {
        carrier,
        structure,
        inclusion,
    })
}

/// A finitely generated subobject `G ↣ X`, identified with its image.
///
/// In `Emb` mode the relations are the induced ones and `relations` is
/// `None`; in `Str` mode any subset of the induced tuples may be chosen.
/// Tuples are written in `X`'s element names.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct TestObject {
    pub carrier: Vec<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub relations: Option<Vec<BTreeSet<Vec<usize>>>>,
}

impl TestObject {
    pub fn mask(&self) -> ElementMask {
        mask_of(self.carrier.iter().copied())
    }

    /// The object `G` and the mono `G ↣ X`.
    pub fn to_mono(&self, x: &Arc<Structure>) -> Result<(Arc<Structure>, Morphism)> {
        let rels = match &self.relations {
            Some(r) => r.clone(),
            None => x.induced_relations(self.mask()),
        };
        let (g, carrier) = x.relabel_subset(self.mask(), rels);
        let g = Arc::new(g);
        let mono = Morphism::new(g.clone(), x.clone(), carrier)?;
        Ok((g, mono))
    }
}

/// Size of a smallest generating set of the closed subset `mask`.
pub(crate) fn generator_count(x: &Structure, mask: ElementMask) -> usize {
    if x.signature().is_relational() {
        return mask.count_ones() as usize;
    }
    let elems = elements_of(mask);
    for k in 0..=elems.len() {
        if subsets_of_size(&elems, k).any(|s| x.closure(mask_of(s)) == mask) {
            return k;
        }
    }
    elems.len()
}

fn subsets_of_size(elems: &[usize], k: usize) -> impl Iterator<Item = Vec<usize>> + '_ {
    let n = elems.len();
    (0..(1u64 << n))
        .filter(move |m| m.count_ones() as usize == k)
        .map(move |m| elements_of(m).into_iter().map(|i| elems[i]).collect())
}

/// All subsets of a tuple list, as relation choices per symbol.
pub(crate) fn relation_choices(
    induced: &[BTreeSet<Vec<usize>>],
) -> impl Iterator<Item = Vec<BTreeSet<Vec<usize>>>> + '_ {
    let flat: Vec<(usize, &Vec<usize>)> = induced
        .iter()
        .enumerate()
        .flat_map(|(r, rel)| rel.iter().map(move |t| (r, t)))
        .collect();
    let count = 1u64 << flat.len();
    (0..count).map(move |bits| {
        let mut out = vec![BTreeSet::new(); induced.len()];
        for (i, (r, t)) in flat.iter().enumerate() {
            if bits & (1u64 << i) != 0 {
                out[*r].insert((*t).clone());
            }
        }
        out
    })
}

/// One test object per subobject of `x`, sorted.
///
/// `Emb`: every closed subset with induced relations. `Str`: every subset
/// paired with every choice of a subset of the induced tuples.
pub fn enumerate_test_objects(x: &Structure, mode: Mode, caps: &Caps) -> Result<Vec<TestObject>> {
    mode.check_signature(x.signature())?;
    caps.check_structure(x)?;
    let within_budget = |mask: ElementMask, tuples: usize| match caps.generation_budget {
        None => true,
        Some(b) => generator_count(x, mask) < b && (mode == Mode::Emb || tuples < b),
    };
    let mut out = Vec::new();
    match mode {
        Mode::Emb => {
            for mask in x.closed_masks() {
                if within_budget(mask, 0) {
                    out.push(TestObject {
                        carrier: elements_of(mask),
                        relations: None,
                    });
                }
            }
        }
        Mode::Str => {
            let mut total = 0usize;
            for mask in 0..=full_mask(x.size()) {
                let induced = x.induced_relations(mask);
                let count: usize = induced.iter().map(BTreeSet::len).sum();
                total = total.saturating_add(1usize.checked_shl(count as u32).unwrap_or(usize::MAX));
                caps.check_test_objects(total)?;
                for rels in relation_choices(&induced) {
                    let tuples = rels.iter().map(BTreeSet::len).sum();
                    if within_budget(mask, tuples) {
                        out.push(TestObject {
                            carrier: elements_of(mask),
                            relations: Some(rels),
                        });
                    }
                }
            }
        }
    }
    caps.check_test_objects(out.len())?;
    out.sort();
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::structure::Signature;

    #[test]
    fn bare_pair_has_four_subobjects() {
        let x = Structure::bare(2);
        let t = enumerate_test_objects(&x, Mode::Emb, &Caps::default()).unwrap();
        assert_eq!(t.len(), 4);
    }

    #[test]
    fn z2_with_zero_has_two_subobjects() {
        let sig = Arc::new(Signature::from_symbols(&[], &[("add", 2), ("zero", 0)]).unwrap());
        let z2 = Structure::builder(sig, 2)
            .function_fn("add", |a| (a[0] + a[1]) % 2)
            .unwrap()
            .function("zero", vec![0])
            .unwrap()
            .build()
            .unwrap();
        let t = enumerate_test_objects(&z2, Mode::Emb, &Caps::default()).unwrap();
        let carriers: Vec<_> = t.iter().map(|o| o.carrier.clone()).collect();
        assert_eq!(carriers, vec![vec![0], vec![0, 1]]);
    }

    #[test]
    fn str_mode_counts_relation_choices() {
        let x = Structure::digraph(2, &[(0, 1)]).unwrap();
        let t = enumerate_test_objects(&x, Mode::Str, &Caps::default()).unwrap();
        assert_eq!(t.len(), 5);
    }

    #[test]
    fn str_mode_rejects_functions() {
        let z3 = Structure::group(3, |a, b| (a + b) % 3).unwrap();
        assert!(matches!(
            enumerate_test_objects(&z3, Mode::Str, &Caps::default()),
            Err(Error::UnsupportedMode(_))
        ));
    }

    #[test]
    fn generated_substructure_of_z4() {
        let z4 = Arc::new(Structure::group(4, |a, b| (a + b) % 4).unwrap());
        assert_eq!(generated_substructure(&z4, &[2]).unwrap().carrier, vec![0, 2]);
        assert_eq!(generated_substructure(&z4, &[1]).unwrap().carrier, vec![0, 1, 2, 3]);
        let g = Arc::new(Structure::digraph(3, &[(0, 1)]).unwrap());
        let s = generated_substructure(&g, &[1]).unwrap();
        assert_eq!(s.carrier, vec![1]);
        assert!(s.inclusion.classify().is_embedding());
    }

    #[test]
    fn budget_filters_large_generators() {
        let x = Structure::bare(3);
        let caps = Caps {
            generation_budget: Some(2),
            ..Caps::default()
        };
        let t = enumerate_test_objects(&x, Mode::Emb, &caps).unwrap();
        assert!(t.iter().all(|o| o.carrier.len() < 2));
        assert_eq!(t.len(), 4);
    }
}
