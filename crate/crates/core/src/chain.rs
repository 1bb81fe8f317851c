//! Finite chains of morphisms, their colimits, and ladders of chains.
//!
//! A finite chain `X0 → X1 → … → Xn` has its last object as colimit, with
//! the composites into it as cocone.

use std::sync::Arc;

use serde::Serialize;

use crate::engine::Engine;
use crate::error::{Error, Result};
use crate::structure::{Mode, Morphism, Structure};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChainDiagram {
    objects: Vec<Arc<Structure>>,
    maps: Vec<Morphism>,
}

impl ChainDiagram {
    /// `maps[i]` must run from `objects[i]` to `objects[i + 1]`.
    pub fn new(objects: Vec<Arc<Structure>>, maps: Vec<Morphism>) -> Result<ChainDiagram> {
        if objects.is_empty() {
            return Err(Error::invalid("a chain needs at least one object"));
        }
        if maps.len() + 1 != objects.len() {
            return Err(Error::invalid(format!(
                "a chain of {} objects needs {} maps, got {}",
                objects.len(),
                objects.len() - 1,
                maps.len()
            )));
        }
        for (i, m) in maps.iter().enumerate() {
            if **m.source() != *objects[i] || **m.target() != *objects[i + 1] {
                return Err(Error::invalid(format!("map {i} does not run from object {i} to object {}", i + 1)));
            }
        }
        Ok(ChainDiagram { objects, maps })
    }

    /// A chain built from its maps alone.
    pub fn from_maps(maps: Vec<Morphism>) -> Result<ChainDiagram> {
        let first = maps
            .first()
            .ok_or_else(|| Error::invalid("empty map list; use ChainDiagram::new for one object"))?;
        let mut objects = vec![first.source().clone()];
        objects.extend(maps.iter().map(|m| m.target().clone()));
        ChainDiagram::new(objects, maps)
    }

    pub fn constant(x: Arc<Structure>, stages: usize) -> ChainDiagram {
        let maps = (1..stages.max(1)).map(|_| Morphism::identity(x.clone())).collect();
        ChainDiagram {
            objects: vec![x; stages.max(1)],
            maps,
        }
    }

    pub fn len(&self) -> usize {
        self.objects.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn objects(&self) -> &[Arc<Structure>] {
        &self.objects
    }

    pub fn maps(&self) -> &[Morphism] {
        &self.maps
    }

    /// The composite `Xi → Xj` for `i ≤ j`.
    pub fn composite(&self, i: usize, j: usize) -> Result<Morphism> {
        if i > j || j >= self.objects.len() {
            return Err(Error::invalid(format!("no composite from stage {i} to stage {j}")));
        }
        let mut m = Morphism::identity(self.objects[i].clone());
        for step in &self.maps[i..j] {
            m = m.then(step)?;
        }
        Ok(m)
    }

    pub fn colimit(&self, mode: Mode) -> Result<Colimit> {
        if let Some(i) = self.maps.iter().position(|m| !m.is_mono_in(mode)) {
            return Err(Error::precondition(format!("connecting map {i} is not a mono in {mode} mode")));
        }
        let last = self.objects.len() - 1;
        let cocone = (0..=last).map(|i| self.composite(i, last)).collect::<Result<_>>()?;
        Ok(Colimit {
            object: self.objects[last].clone(),
            cocone,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Colimit {
    pub object: Arc<Structure>,
    pub cocone: Vec<Morphism>,
}

impl Colimit {
    /// The unique map out of the colimit into a competing cocone.
    pub fn mediate(&self, competing: &[Morphism]) -> Result<Morphism> {
        if competing.len() != self.cocone.len() {
            return Err(Error::invalid("competing cocone has the wrong number of components"));
        }
        let m = competing.last().expect("non-empty cocone").clone();
        for (i, (c, leg)) in competing.iter().zip(&self.cocone).enumerate() {
            if leg.then(&m)? != *c {
                return Err(Error::invalid(format!("competing cocone does not commute at stage {i}")));
            }
        }
        Ok(m)
    }
}

/// Two chains over the same stages with a natural transformation between
/// them, component `i` running from the lower chain to the upper one.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LadderInstance {
    pub lower: ChainDiagram,
    pub upper: ChainDiagram,
    pub components: Vec<Morphism>,
}

impl LadderInstance {
    pub fn new(lower: ChainDiagram, upper: ChainDiagram, components: Vec<Morphism>) -> Result<LadderInstance> {
        if lower.len() != upper.len() || components.len() != lower.len() {
            return Err(Error::invalid("ladder chains and components differ in length"));
        }
        for (i, c) in components.iter().enumerate() {
            if **c.source() != *lower.objects[i] || **c.target() != *upper.objects[i] {
                return Err(Error::invalid(format!("component {i} does not connect the stage-{i} objects")));
            }
        }
        for i in 0..lower.maps.len() {
            let left = lower.maps[i].then(&components[i + 1])?;
            let right = components[i].then(&upper.maps[i])?;
            if left != right {
                return Err(Error::invalid(format!("naturality square {i} does not commute")));
            }
        }
        Ok(LadderInstance {
            lower,
            upper,
            components,
        })
    }

    /// The induced map between the colimits (the last component).
    pub fn colimit_map(&self) -> &Morphism {
        self.components.last().expect("non-empty ladder")
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LadderReport {
    pub hypothesis_ok: bool,
    /// `None` when the hypothesis fails: nothing is claimed then.
    pub conclusion_ok: Option<bool>,
    /// Maps failing the hypothesis, e.g. `lower map 0`, `component 2`.
    pub failures: Vec<String>,
}

/// Checks that the colimit map is a finitary embedding whenever all chain
/// maps and components are.
pub fn verify_ladder(ladder: &LadderInstance, mode: Mode, engine: &Engine) -> Result<LadderReport> {
    let mut failures = Vec::new();
    for (label, maps) in [
        ("lower map", ladder.lower.maps()),
        ("upper map", ladder.upper.maps()),
        ("component", &ladder.components[..]),
    ] {
        for (i, m) in maps.iter().enumerate() {
            if !engine.decide_lambda_embedding(m, mode)? {
                failures.push(format!("{label} {i}"));
            }
        }
    }
    if !failures.is_empty() {
        return Ok(LadderReport {
            hypothesis_ok: false,
            conclusion_ok: None,
            failures,
        });
    }
    let lower = ladder.lower.colimit(mode)?;
    let upper = ladder.upper.colimit(mode)?;
    let f = ladder.colimit_map();
    for i in 0..ladder.lower.len() {
        if lower.cocone[i].then(f)? != ladder.components[i].then(&upper.cocone[i])? {
            return Err(Error::TheoremViolation(format!("colimit map does not commute at stage {i}")));
        }
    }
    Ok(LadderReport {
        hypothesis_ok: true,
        conclusion_ok: Some(engine.decide_lambda_embedding(f, mode)?),
        failures,
    })
}

/// Checks that `X0 → colim` is a finitary embedding when every step is.
pub fn verify_smooth_composition(chain: &ChainDiagram, mode: Mode, engine: &Engine) -> Result<LadderReport> {
    let mut failures = Vec::new();
    for (i, m) in chain.maps().iter().enumerate() {
        if !engine.decide_lambda_embedding(m, mode)? {
            failures.push(format!("map {i}"));
        }
    }
    if !failures.is_empty() {
        return Ok(LadderReport {
            hypothesis_ok: false,
            conclusion_ok: None,
            failures,
        });
    }
    let colim = chain.colimit(mode)?;
    Ok(LadderReport {
        hypothesis_ok: true,
        conclusion_ok: Some(engine.decide_lambda_embedding(&colim.cocone[0], mode)?),
        failures,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn arc(s: Structure) -> Arc<Structure> {
        Arc::new(s)
    }

    fn inclusion(m: usize, n: usize) -> Morphism {
        Morphism::new(arc(Structure::bare(m)), arc(Structure::bare(n)), (0..m).collect()).unwrap()
    }

    #[test]
    fn colimit_of_growing_sets() {
        let c = ChainDiagram::from_maps(vec![inclusion(1, 2), inclusion(2, 3)]).unwrap();
        let colim = c.colimit(Mode::Emb).unwrap();
        assert_eq!(colim.object.size(), 3);
        assert_eq!(colim.cocone[0].map(), &[0]);
        assert_eq!(colim.cocone[1].map(), &[0, 1]);
        let single = ChainDiagram::new(vec![arc(Structure::bare(2))], vec![]).unwrap();
        assert_eq!(single.colimit(Mode::Emb).unwrap().object.size(), 2);
    }

    #[test]
    fn mediating_map_is_the_last_component() {
        let c = ChainDiagram::from_maps(vec![inclusion(1, 2)]).unwrap();
        let colim = c.colimit(Mode::Emb).unwrap();
        let z = arc(Structure::bare(3));
        let c1 = Morphism::new(arc(Structure::bare(2)), z.clone(), vec![2, 0]).unwrap();
        let c0 = Morphism::new(arc(Structure::bare(1)), z, vec![2]).unwrap();
        assert_eq!(colim.mediate(&[c0.clone(), c1.clone()]).unwrap(), c1);
        let bad = Morphism::new(arc(Structure::bare(1)), c1.target().clone(), vec![0]).unwrap();
        assert!(colim.mediate(&[bad, c1]).is_err());
    }

    #[test]
    fn non_mono_chain_has_no_colimit_here() {
        let x = arc(Structure::bare(2));
        let collapse = Morphism::new(x.clone(), x, vec![0, 0]).unwrap();
        let c = ChainDiagram::from_maps(vec![collapse]).unwrap();
        assert!(matches!(c.colimit(Mode::Emb), Err(Error::Precondition(_))));
    }

    #[test]
    fn ladder_examples() {
        let engine = Engine::default();
        let x = arc(Structure::digraph(3, &[(0, 1), (1, 2), (2, 0)]).unwrap());
        let constant = ChainDiagram::constant(x.clone(), 3);
        let ids = vec![Morphism::identity(x.clone()); 3];
        let l = LadderInstance::new(constant.clone(), constant.clone(), ids).unwrap();
        let r = verify_ladder(&l, Mode::Emb, &engine).unwrap();
        assert_eq!((r.hypothesis_ok, r.conclusion_ok), (true, Some(true)));

        let rot = Morphism::new(x.clone(), x.clone(), vec![1, 2, 0]).unwrap();
        let rotating = ChainDiagram::from_maps(vec![rot.clone(), rot.clone()]).unwrap();
        let comps = vec![Morphism::identity(x.clone()); 3];
        let l = LadderInstance::new(rotating.clone(), rotating, comps).unwrap();
        let r = verify_ladder(&l, Mode::Str, &engine).unwrap();
        assert_eq!((r.hypothesis_ok, r.conclusion_ok), (true, Some(true)));

        let b = arc(Structure::bare(2));
        let merge = Morphism::new(b.clone(), b.clone(), vec![0, 0]).unwrap();
        let cb = ChainDiagram::constant(b.clone(), 1);
        let l = LadderInstance::new(cb.clone(), cb, vec![merge]).unwrap();
        let r = verify_ladder(&l, Mode::Emb, &engine).unwrap();
        assert!(!r.hypothesis_ok);
        assert_eq!(r.conclusion_ok, None);
    }

    #[test]
    fn naturality_is_checked() {
        let x = arc(Structure::bare(2));
        let swap = Morphism::new(x.clone(), x.clone(), vec![1, 0]).unwrap();
        let lower = ChainDiagram::from_maps(vec![swap]).unwrap();
        let upper = ChainDiagram::constant(x.clone(), 2);
        let ids = vec![Morphism::identity(x.clone()); 2];
        assert!(LadderInstance::new(lower, upper, ids).is_err());
    }

    #[test]
    fn smooth_composition_examples() {
        let engine = Engine::default();
        let t = arc(Structure::digraph(3, &[(0, 1), (1, 2), (2, 0)]).unwrap());
        let rot = Morphism::new(t.clone(), t.clone(), vec![1, 2, 0]).unwrap();
        let c = ChainDiagram::from_maps(vec![rot.clone(), rot]).unwrap();
        assert_eq!(verify_smooth_composition(&c, Mode::Emb, &engine).unwrap().conclusion_ok, Some(true));
        let ids = ChainDiagram::constant(t, 3);
        assert_eq!(verify_smooth_composition(&ids, Mode::Emb, &engine).unwrap().conclusion_ok, Some(true));
        let grow = ChainDiagram::from_maps(vec![inclusion(1, 2)]).unwrap();
        assert!(!verify_smooth_composition(&grow, Mode::Emb, &engine).unwrap().hypothesis_ok);
    }
}
