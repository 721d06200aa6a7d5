//! Simulation library for charged-particle motion ("magnetic geodesics") on
//! Riemannian domains whose magnetic field diverges at the boundary.
//!
//! The library provides:
//!
//! - [`geometry`]: charts, metrics, finite-difference Christoffel symbols and
//!   collar (boundary-distance) coordinates for the built-in domains;
//! - [`forms`]: differential 1- and 2-forms as component fields, the Lorentz
//!   force operator and numerical exterior-derivative checks;
//! - [`fields`]: magnetic walls built from a diverging intensity profile and a
//!   closed boundary 1-form, their vector potentials and perturbations;
//! - [`dynamics`]: adaptive trajectory integration in both the Lorentz
//!   (second-order) and Hamiltonian (canonical) formulations, with escape
//!   detection and conservation monitoring;
//! - [`scenarios`]: ready-made configurations (disc, ball, solid torus,
//!   log-cylinder) with tunable profiles and perturbations;
//! - [`ensemble`]: seeded, reproducible batches of trajectories with summary
//!   statistics, running in parallel by default (feature `parallel`);
//! - [`verify`]: runtime check suites mirroring the library's invariants.

pub mod dynamics;
pub mod ensemble;
pub mod error;
pub mod fields;
pub mod forms;
pub mod geometry;
pub mod numerics;
pub mod scenarios;
pub mod verify;

pub use error::{Error, Result};
