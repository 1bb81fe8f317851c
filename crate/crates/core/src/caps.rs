use crate::error::{Error, Result};
use crate::structure::Structure;

/// Hard ceiling on carrier size; element sets are packed into `u64` masks.
pub const MAX_ELEMENTS: usize = 64;

/// Size limits enforced by every enumeration in the engine.
///
/// Exceeding a limit yields [`Error::CapExceeded`] instead of an
/// unbounded search.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Caps {
    pub max_carrier: usize,
    pub max_arity: usize,
    pub max_spans: usize,
    pub max_test_objects: usize,
    /// Exploration only: when set, test objects and span centers must be
    /// generated by fewer than this many elements. The decision procedures
    /// are only meaningful with `None` (every finitely generated object).
    pub generation_budget: Option<usize>,
}

impl Default for Caps {
    fn default() -> Self {
        Caps {
            max_carrier: 8,
            max_arity: 3,
            max_spans: 400_000,
            max_test_objects: 200_000,
            generation_budget: None,
        }
    }
}

impl Caps {
    pub fn with_max_carrier(mut self, n: usize) -> Self {
        self.max_carrier = n.min(MAX_ELEMENTS);
        self
    }

    pub fn check_structure(&self, s: &Structure) -> Result<()> {
        if s.size() > self.max_carrier {
            return Err(Error::CapExceeded {
                what: "carrier size",
                limit: self.max_carrier,
                actual: s.size(),
            });
        }
        let max_arity = s.signature().max_arity();
        if max_arity > self.max_arity {
            return Err(Error::CapExceeded {
                what: "symbol arity",
                limit: self.max_arity,
                actual: max_arity,
            });
        }
        Ok(())
    }

    pub(crate) fn check_spans(&self, n: usize) -> Result<()> {
        if n > self.max_spans {
            return Err(Error::CapExceeded {
                what: "span count",
                limit: self.max_spans,
                actual: n,
            });
        }
        Ok(())
    }

    pub(crate) fn check_test_objects(&self, n: usize) -> Result<()> {
        if n > self.max_test_objects {
            return Err(Error::CapExceeded {
                what: "test object count",
                limit: self.max_test_objects,
                actual: n,
            });
        }
        Ok(())
    }
}
