//! Effective front shapes of periodic line networks.
//!
//! Purpose
//! - Given a finite set of rational plane directions, this crate builds a
//!   periodic continuous speed field whose large-scale front propagation has
//!   a prescribed polygonal effective shape, and then measures that shape
//!   back out of the field with independent PDE estimators.
//!
//! Pipeline
//! 1. `polygon`: exact geometry of the target bodies (generator hull and its
//!    polar constraint polygon).
//! 2. `network`: the periodic line arrangement, the local model potential at
//!    crossings, and its gradient-flow curves.
//! 3. `speed`: synthesis of the speed field (tube potentials, calibration,
//!    correctors, certificates).
//! 4. `homog`: front-speed measurements — eikonal distances, stable norms,
//!    unit balls, cell-problem time averages, and upper-bound certification.
//! 5. `config` / `report` / `pipeline` / `fig`: driver plumbing and artifacts.
//!
//! Parallelism
//! - Heavy sweeps go through `par`, which maps to rayon under the default
//!   `parallel` feature and to plain iterators without it; results are
//!   bit-identical either way.

pub mod network;
pub mod par;
pub mod polygon;
pub mod quad;
pub mod vec2;
