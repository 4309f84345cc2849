//! Periodic line network with explicit crossing potentials.
//!
//! Purpose: everything geometric that happens *before* a speed field exists —
//! placing the line families on the torus in general position, enumerating
//! their crossings, the closed-form potential that models one crossing, the
//! gradient flows of that potential, and the perturbed periodic curves that
//! replace the straight lines near crossings.
//!
//! Layout: [`potential`] and [`flow`] are pure model-scale mathematics (one
//! crossing, unit frame); [`lines`] is exact rational lattice geometry;
//! [`curves`] assembles the physical periodic curves from both.

pub mod curves;
pub mod flow;
pub mod lines;
pub mod potential;

use thiserror::Error;

/// Errors from network construction and flow tracing.
#[derive(Debug, Error)]
pub enum NetworkError {
    /// The crossing-potential constant is at or below the confinement
    /// threshold 2k(4k+1); below it the backward flow region is not
    /// invariant and the multiplicity construction fails.
    #[error("model constant C = {c} must exceed 2k(4k+1) = {min} for k = {k}")]
    BadConstant { k: u32, c: f64, min: f64 },

    /// The adaptive integrator demanded a step below the hard floor while
    /// still far from the origin — the one place a small step is legitimate.
    #[error("integrator step collapsed at ({x:.6}, {y:.6}), |x| = {dist:.3e}")]
    StepCollapse { x: f64, y: f64, dist: f64 },

    /// A shooting bracket could not be established or classified.
    #[error("bisection bracket failed: {context}")]
    BisectionFailure { context: String },

    /// Offset search could not certify general position.
    #[error("could not certify general position after {attempts} offset draws (seed {seed})")]
    ExhaustedRetries { seed: u64, attempts: usize },

    /// Explicit offsets put three lines through one torus point.
    #[error("three lines meet at ({x}, {y}); offsets are not in general position")]
    TriplePoint { x: String, y: String },

    /// Requested perturbation radius violates 0 < r < d/10.
    #[error("perturbation radius {r} outside (0, d/10) for spacing d = {d}")]
    BadRadius { r: f64, d: f64 },

    /// A bend spline could not meet its endpoint conditions.
    #[error("splice solve failed at crossing of families ({i}, {j}): {context}")]
    SpliceFailure { i: usize, j: usize, context: String },
}
