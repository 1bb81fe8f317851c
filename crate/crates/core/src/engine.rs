//! A caching front end for repeated decisions over the same structures.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use crate::caps::Caps;
use crate::embeddings::embedding_against_core;
use crate::error::Result;
use crate::span::{greatest_core, Core, SpanFamily};
use crate::structure::{Mode, Morphism, Structure};

type Key = (Structure, Structure, Mode);

/// Holds size caps and remembers every greatest dense family it computed.
///
/// The decisions are pure functions of their inputs, so cached results are
/// shared freely between threads.
#[derive(Debug, Default)]
pub struct Engine {
    caps: Caps,
    cache: Mutex<HashMap<Key, Arc<Core>>>,
}

impl Engine {
    pub fn new(caps: Caps) -> Self {
        Engine {
            caps,
            cache: Mutex::new(HashMap::new()),
        }
    }

    pub fn caps(&self) -> &Caps {
        &self.caps
    }

    pub(crate) fn core(&self, x: &Arc<Structure>, y: &Arc<Structure>, mode: Mode) -> Result<Arc<Core>> {
        let key = ((**x).clone(), (**y).clone(), mode);
        if let Some(hit) = self.cache.lock().expect("cache lock").get(&key) {
            return Ok(hit.clone());
        }
        let core = Arc::new(greatest_core(x, y, mode, &self.caps)?);
        self.cache.lock().expect("cache lock").insert(key, core.clone());
        Ok(core)
    }

    pub fn decide_equivalent(&self, x: &Arc<Structure>, y: &Arc<Structure>, mode: Mode) -> Result<bool> {
        Ok(!self.core(x, y, mode)?.is_empty())
    }

    pub fn greatest_dense_family(&self, x: &Arc<Structure>, y: &Arc<Structure>, mode: Mode) -> Result<SpanFamily> {
        self.core(x, y, mode)?.expand(&self.caps)
    }

    pub fn decide_lambda_embedding(&self, f: &Morphism, mode: Mode) -> Result<bool> {
        let core = self.core(f.source(), f.target(), mode)?;
        Ok(embedding_against_core(f, &core))
    }

    pub fn cached(&self) -> usize {
        self.cache.lock().expect("cache lock").len()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cache_reuses_results() {
        let engine = Engine::default();
        let x = Arc::new(Structure::digraph(3, &[(0, 1)]).unwrap());
        assert!(engine.decide_equivalent(&x, &x, Mode::Emb).unwrap());
        assert!(engine.decide_lambda_embedding(&Morphism::identity(x.clone()), Mode::Emb).unwrap());
        assert_eq!(engine.cached(), 1);
        assert_eq!(engine.greatest_dense_family(&x, &x, Mode::Emb).unwrap().len(), 8);
    }
}
