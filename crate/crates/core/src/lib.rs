//! Landau levels of a charged particle in a uniform magnetic field, worked
//! through the canonical variables `Q, Qbar, P, Pbar` that turn the
//! problem into a single harmonic oscillator.
//!
//! - [`physcore`]: constants, gauges, grids and sampled fields.
//! - [`hermite`]: oscillator eigenfunctions and Gauss-Hermite rules.
//! - [`wavefunctions`]: closed-form Landau and non-free states.
//! - [`operators`]: finite-difference operators, commutator and residual
//!   checks, and the spectrum solver.
//! - [`mqtransform`]: the integral transform from `(Q, Qbar)` to `(x, y)`.
//! - [`dynamics`]: classical cyclotron orbits and Heisenberg flow.

pub mod dynamics;
pub mod error;
pub mod hermite;
pub mod mqtransform;
pub mod operators;
pub mod physcore;
pub mod wavefunctions;

pub use error::{LandauError, Result};
pub use num_complex::Complex64;
pub use physcore::{
    ComplexField, GaugeChoice, Grid2D, GridSpec, ParamInputs, PhysicalParams, QuantumNumbers,
};
pub use operators::{DiscreteOperator, OperatorKind, StencilOrder};
pub use wavefunctions::{NonFreeCoefficients, Wavefunction};
