pub mod acceptance;
pub mod caps;
pub mod chain;
pub mod cli;
pub mod corpus;
pub mod embeddings;
pub mod engine;
pub mod error;
pub mod functor;
pub mod groups;
pub mod span;
pub mod structure;
pub mod symbolic;
pub mod theory;
pub mod workspace;

pub use caps::Caps;
pub use error::{Error, Result};
