//! Physical constants, gauge and quantum-number types, grids and sampled
//! complex fields shared by every other module.

mod field;
mod grid;
mod params;

pub use field::{field_norm, ComplexField};
pub use grid::{Grid2D, GridSpec, MIN_POINTS};
pub use params::{GaugeChoice, ParamInputs, PhysicalParams, QuantumNumbers};

/// Builds [`PhysicalParams`] from the five dimensional inputs.
pub fn derive_params(
    hbar: f64,
    mass: f64,
    charge: f64,
    light_speed: f64,
    field: f64,
) -> crate::Result<PhysicalParams> {
    PhysicalParams::new(hbar, mass, charge, light_speed, field)
}

/// Uniform grid over `x_bounds x y_bounds`.
pub fn make_grid(
    x_bounds: (f64, f64),
    y_bounds: (f64, f64),
    nx: usize,
    ny: usize,
) -> crate::Result<Grid2D> {
    Grid2D::new(x_bounds, y_bounds, nx, ny)
}
