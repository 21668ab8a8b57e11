//! Exact tools for the bin packing game and the subset-sum packing heuristic:
//! packing algorithms, equilibrium checks, closed-form bounds, adversarial
//! instance families and certificate audits.

pub mod audit;
pub mod bounds;
pub mod error;
pub mod game;
pub mod generators;
pub mod model;
pub mod rational;
pub mod solver;

pub use error::{Error, Result};
pub use model::{Instance, Item, ItemId, Packing};
pub use rational::Rational;

/// Version of the JSON interchange documents (packings, traces, manifests, reports).
pub const FORMAT_VERSION: u32 = 1;
