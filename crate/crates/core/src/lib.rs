//! Global cracking elements for 2D quasi-brittle fracture.
//!
//! Cracks are represented element by element, without tracking a crack
//! path: a cracked nine-node element reuses its center-node degrees of
//! freedom as the crack opening, and a mixed-mode cohesive law closes the
//! system. The crate covers the cohesive law, element kernels, mesh
//! handling, the crack search, the nonlinear solver and run I/O.

pub mod cohesive;
pub mod crack;
pub mod element;
pub mod error;
pub mod io;
pub mod material;
pub mod mesh;
pub mod solver;

pub use error::{Error, Result};
