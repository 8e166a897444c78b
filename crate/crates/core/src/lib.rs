//! Hard-core boson operator algebra, parent Hamiltonians of the W state and
//! verification of equally spaced quasiparticle towers.

pub mod circuit;
pub mod decomp;
pub mod error;
pub mod fock;
pub mod graph;
pub mod models;
pub mod ops;
pub mod tower;
pub mod verify;

pub use error::{Error, Result};
pub use fock::SparseState;
pub use graph::SiteGraph;
pub use ops::{Monomial, Operator};
pub use tower::TowerSpec;
