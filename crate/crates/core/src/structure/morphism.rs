use std::collections::BTreeSet;
use std::sync::Arc;

use serde::Serialize;

use super::{mask_of, tuples, Structure};
use crate::error::{Error, Result};

/// Strength of a map between structures, weakest first.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum MorphismClass {
    NotHom,
    Hom,
    MonoHom,
    Embedding,
    Iso,
}

impl MorphismClass {
    pub fn is_hom(self) -> bool {
        self >= MorphismClass::Hom
    }

    pub fn is_mono(self) -> bool {
        self >= MorphismClass::MonoHom
    }

    pub fn is_embedding(self) -> bool {
        self >= MorphismClass::Embedding
    }

    pub fn as_str(self) -> &'static str {
        match self {
            MorphismClass::NotHom => "not-hom",
            MorphismClass::Hom => "hom",
            MorphismClass::MonoHom => "mono-hom",
            MorphismClass::Embedding => "embedding",
            MorphismClass::Iso => "iso",
        }
    }
}

/// A total carrier map between two structures over the same signature.
/// Its class is computed on demand, never stored.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Morphism {
    source: Arc<Structure>,
    target: Arc<Structure>,
    map: Vec<usize>,
}

impl Morphism {
    pub fn new(source: Arc<Structure>, target: Arc<Structure>, map: Vec<usize>) -> Result<Self> {
        if source.signature() != target.signature() {
            return Err(Error::SignatureMismatch(
                "morphism source and target use different signatures".into(),
            ));
        }
        if map.len() != source.size() {
            return Err(Error::invalid(format!(
                "map has {} entries, source has {} elements",
                map.len(),
                source.size()
            )));
        }
        if let Some(&bad) = map.iter().find(|&&y| y >= target.size()) {
            return Err(Error::invalid(format!(
                "map value {bad} outside target carrier 0..{}",
                target.size()
            )));
        }
        Ok(Morphism { source, target, map })
    }

    pub fn identity(x: Arc<Structure>) -> Self {
        let map = (0..x.size()).collect();
        Morphism {
            source: x.clone(),
            target: x,
            map,
        }
    }

    pub fn source(&self) -> &Arc<Structure> {
        &self.source
    }

    pub fn target(&self) -> &Arc<Structure> {
        &self.target
    }

    pub fn map(&self) -> &[usize] {
        &self.map
    }

    pub fn apply(&self, x: usize) -> usize {
        self.map[x]
    }

    /// `then ∘ self`.
    pub fn then(&self, then: &Morphism) -> Result<Morphism> {
        if *self.target != *then.source {
            return Err(Error::invalid("composed morphisms do not share the middle object"));
        }
        Ok(Morphism {
            source: self.source.clone(),
            target: then.target.clone(),
            map: self.map.iter().map(|&x| then.map[x]).collect(),
        })
    }

    pub fn is_injective(&self) -> bool {
        let mut seen = vec![false; self.target.size()];
        self.map.iter().all(|&y| !std::mem::replace(&mut seen[y], true))
    }

    pub fn is_surjective(&self) -> bool {
        mask_of(self.map.iter().copied()) == self.target.full_mask()
    }

    pub fn preserves_functions(&self) -> bool {
        let all: Vec<usize> = (0..self.source.size()).collect();
        self.source
            .signature()
            .functions()
            .iter()
            .enumerate()
            .all(|(f, sym)| {
                tuples(&all, sym.arity).all(|args| {
                    let image: Vec<usize> = args.iter().map(|&a| self.map[a]).collect();
                    self.map[self.source.apply(f, &args)] == self.target.apply(f, &image)
                })
            })
    }

    pub fn preserves_relations(&self) -> bool {
        self.source.relations().iter().enumerate().all(|(r, rel)| {
            rel.iter()
                .all(|t| self.target.holds(r, &t.iter().map(|&a| self.map[a]).collect::<Vec<_>>()))
        })
    }

    /// Every target tuple over the image comes from a source tuple.
    /// Meaningful for injective maps.
    pub fn reflects_relations(&self) -> bool {
        let mut preimage = vec![usize::MAX; self.target.size()];
        for (x, &y) in self.map.iter().enumerate() {
            preimage[y] = x;
        }
        self.target.relations().iter().enumerate().all(|(r, rel)| {
            rel.iter().all(|t| {
                let pre: Option<Vec<usize>> = t
                    .iter()
                    .map(|&y| Some(preimage[y]).filter(|&x| x != usize::MAX))
                    .collect();
                pre.is_none_or(|pre| self.source.holds(r, &pre))
            })
        })
    }

    pub fn classify(&self) -> MorphismClass {
        if !(self.preserves_functions() && self.preserves_relations()) {
            return MorphismClass::NotHom;
        }
        if !self.is_injective() {
            return MorphismClass::Hom;
        }
        if !self.reflects_relations() {
            return MorphismClass::MonoHom;
        }
        if self.is_surjective() {
            MorphismClass::Iso
        } else {
            MorphismClass::Embedding
        }
    }

    /// Mono in the given category: embeddings in `Emb`, injective homs in `Str`.
    pub fn is_mono_in(&self, mode: super::Mode) -> bool {
        match mode {
            super::Mode::Emb => self.classify().is_embedding(),
            super::Mode::Str => self.classify().is_mono(),
        }
    }

    /// Set-theoretic image.
    pub fn image(&self) -> BTreeSet<usize> {
        self.map.iter().copied().collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::structure::Signature;

    fn arc(s: Structure) -> Arc<Structure> {
        Arc::new(s)
    }

    #[test]
    fn identity_is_iso() {
        let x = arc(Structure::digraph(3, &[(0, 1), (1, 2)]).unwrap());
        assert_eq!(Morphism::identity(x).classify(), MorphismClass::Iso);
    }

    #[test]
    fn adding_an_edge_is_mono_hom_only() {
        let empty = arc(Structure::digraph(2, &[]).unwrap());
        let edge = arc(Structure::digraph(2, &[(0, 1)]).unwrap());
        let f = Morphism::new(empty.clone(), edge.clone(), vec![0, 1]).unwrap();
        assert_eq!(f.classify(), MorphismClass::MonoHom);
        let g = Morphism::new(edge, empty, vec![0, 1]).unwrap();
        assert_eq!(g.classify(), MorphismClass::NotHom);
    }

    #[test]
    fn collapsing_map_is_hom() {
        let path = arc(Structure::digraph(2, &[(0, 1)]).unwrap());
        let lp = arc(Structure::digraph(1, &[(0, 0)]).unwrap());
        let f = Morphism::new(path, lp, vec![0, 0]).unwrap();
        assert_eq!(f.classify(), MorphismClass::Hom);
    }

    #[test]
    fn signature_mismatch_is_rejected() {
        let a = arc(Structure::bare(2));
        let b = arc(Structure::digraph(2, &[]).unwrap());
        assert!(matches!(
            Morphism::new(a, b, vec![0, 1]),
            Err(Error::SignatureMismatch(_))
        ));
    }

    #[test]
    fn group_hom_mod_two() {
        let z4 = arc(Structure::group(4, |a, b| (a + b) % 4).unwrap());
        let z2 = arc(Structure::group(2, |a, b| (a + b) % 2).unwrap());
        let f = Morphism::new(z4.clone(), z2, vec![0, 1, 0, 1]).unwrap();
        assert_eq!(f.classify(), MorphismClass::Hom);
        let bad = Morphism::new(z4.clone(), z4, vec![0, 2, 1, 3]).unwrap();
        assert_eq!(bad.classify(), MorphismClass::NotHom);
        let _ = Signature::group();
    }
}
