use num_complex::Complex64;
use rayon::prelude::*;

use super::grid::Grid2D;
use crate::error::{domain, LandauError, Result};

/// Complex samples on a [`Grid2D`], stored row-major with y varying
/// fastest: `values[i * ny + j]` is the sample at `(x_i, y_j)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexField {
    grid: Grid2D,
    values: Vec<Complex64>,
}

impl ComplexField {
    pub fn new(grid: Grid2D, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.len() {
            return domain(format!(
                "field has {} values but the grid has {} points",
                values.len(),
                grid.len()
            ));
        }
        if let Some(p) = values.iter().position(|v| !(v.re.is_finite() && v.im.is_finite())) {
            return Err(LandauError::Evaluation {
                i: p / grid.ny(),
                j: p % grid.ny(),
            });
        }
        Ok(Self { grid, values })
    }

    pub fn zeros(grid: Grid2D) -> Self {
        Self {
            values: vec![Complex64::new(0.0, 0.0); grid.len()],
            grid,
        }
    }

    /// Samples `f(x, y)`; rows are filled in parallel but every sample is
    /// independent, so the result does not depend on the thread count.
    pub fn from_fn<F>(grid: Grid2D, f: F) -> Result<Self>
    where
        F: Fn(f64, f64) -> Complex64 + Sync,
    {
        let ny = grid.ny();
        let mut values = vec![Complex64::new(0.0, 0.0); grid.len()];
        values.par_chunks_mut(ny).enumerate().for_each(|(i, row)| {
            let x = grid.x(i);
            for (j, v) in row.iter_mut().enumerate() {
                *v = f(x, grid.y(j));
            }
        });
        Self::new(grid, values)
    }

    pub(crate) fn from_raw(grid: Grid2D, values: Vec<Complex64>) -> Self {
        debug_assert_eq!(values.len(), grid.len());
        Self { grid, values }
    }

    pub fn grid(&self) -> &Grid2D {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    #[inline]
    pub fn at(&self, i: usize, j: usize) -> Complex64 {
        self.values[self.grid.index(i, j)]
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    pub fn scale(&self, alpha: Complex64) -> Self {
        Self::from_raw(self.grid, self.values.iter().map(|v| alpha * v).collect())
    }

    /// `self + alpha * other`.
    pub fn axpy(&self, alpha: Complex64, other: &ComplexField) -> Result<Self> {
        self.check_same_grid(other)?;
        Ok(Self::from_raw(
            self.grid,
            self.values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| a + alpha * b)
                .collect(),
        ))
    }

    pub fn sub(&self, other: &ComplexField) -> Result<Self> {
        self.axpy(Complex64::new(-1.0, 0.0), other)
    }

    /// Field on the transposed grid with `g(y, x) = f(x, y)`.
    pub fn transposed(&self) -> Self {
        let grid = self.grid.transposed();
        let (nx, ny) = (self.grid.nx(), self.grid.ny());
        let mut values = Vec::with_capacity(self.values.len());
        for j in 0..ny {
            for i in 0..nx {
                values.push(self.values[i * ny + j]);
            }
        }
        Self::from_raw(grid, values)
    }

    pub fn check_same_grid(&self, other: &ComplexField) -> Result<()> {
        if self.grid != other.grid {
            return domain("fields live on different grids");
        }
        Ok(())
    }

    /// Trapezoid L2 norm over the whole grid.
    pub fn norm(&self) -> f64 {
        self.norm_interior(0)
    }

    /// Trapezoid L2 norm over the sub-rectangle that leaves out `margin`
    /// points on every side. The sub-rectangle gets its own trapezoid edge
    /// weights.
    pub fn norm_interior(&self, margin: usize) -> f64 {
        weighted_sum(&self.grid, margin, |p| self.values[p].norm_sqr())
            .max(0.0)
            .sqrt()
    }

    /// Trapezoid approximation of `integral conj(self) * other` over the
    /// interior that leaves out `margin` points on every side.
    pub fn inner_interior(&self, other: &ComplexField, margin: usize) -> Result<Complex64> {
        self.check_same_grid(other)?;
        let re = weighted_sum(&self.grid, margin, |p| {
            (self.values[p].conj() * other.values[p]).re
        });
        let im = weighted_sum(&self.grid, margin, |p| {
            (self.values[p].conj() * other.values[p]).im
        });
        Ok(Complex64::new(re, im))
    }
}

/// Trapezoid-weighted sum of `term(p)` over the index window
/// `[margin, n - 1 - margin]` in both axes. Summation order is fixed.
fn weighted_sum(grid: &Grid2D, margin: usize, term: impl Fn(usize) -> f64) -> f64 {
    let (nx, ny) = (grid.nx(), grid.ny());
    if 2 * margin + 1 >= nx || 2 * margin + 1 >= ny {
        return 0.0;
    }
    let (i0, i1) = (margin, nx - 1 - margin);
    let (j0, j1) = (margin, ny - 1 - margin);
    let mut total = 0.0;
    for i in i0..=i1 {
        let wi = if i == i0 || i == i1 { 0.5 } else { 1.0 };
        let mut row = 0.0;
        for j in j0..=j1 {
            let wj = if j == j0 || j == j1 { 0.5 } else { 1.0 };
            row += wj * term(i * ny + j);
        }
        total += wi * row;
    }
    total * grid.hx() * grid.hy()
}

/// L2 norm of a field.
pub fn field_norm(field: &ComplexField) -> f64 {
    field.norm()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn zero_field_has_zero_norm() {
        let g = Grid2D::square(-1.0, 1.0, 9).unwrap();
        assert_eq!(field_norm(&ComplexField::zeros(g)), 0.0);
    }

    #[test]
    fn constant_on_unit_square() {
        let g = Grid2D::square(0.0, 1.0, 11).unwrap();
        let f = ComplexField::from_fn(g, |_, _| c(1.0)).unwrap();
        assert!((field_norm(&f) - 1.0).abs() < 1e-14);
    }

    #[test]
    fn separable_gaussian_is_normalized() {
        // Oracle: integral of pi^{-1/2} exp(-s^2) over the line is 1.
        let g = Grid2D::square(-10.0, 10.0, 257).unwrap();
        let psi0 = |s: f64| PI.powf(-0.25) * (-0.5 * s * s).exp();
        let f = ComplexField::from_fn(g, |x, y| c(psi0(x) * psi0(y))).unwrap();
        assert!((field_norm(&f) - 1.0).abs() < 1e-8);
    }

    #[test]
    fn rejects_wrong_length_and_nan() {
        let g = Grid2D::square(0.0, 1.0, 9).unwrap();
        assert!(ComplexField::new(g, vec![c(0.0); 80]).is_err());
        let mut v = vec![c(0.0); 81];
        v[10] = c(f64::NAN);
        match ComplexField::new(g, v) {
            Err(LandauError::Evaluation { i, j }) => assert_eq!((i, j), (1, 1)),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn grid_mismatch_is_an_error() {
        let a = ComplexField::zeros(Grid2D::square(0.0, 1.0, 9).unwrap());
        let b = ComplexField::zeros(Grid2D::square(0.0, 1.0, 10).unwrap());
        assert!(a.inner_interior(&b, 0).is_err());
    }

    #[test]
    fn transpose_roundtrip() {
        let g = Grid2D::new((0.0, 1.0), (0.0, 2.0), 9, 12).unwrap();
        let f = ComplexField::from_fn(g, |x, y| Complex64::new(x, y * y)).unwrap();
        let t = f.transposed();
        assert_eq!(t.at(3, 5), f.at(5, 3));
        assert_eq!(t.transposed(), f);
    }

    proptest::proptest! {
        #[test]
        fn norm_is_absolutely_homogeneous(
            re in -5.0f64..5.0, im in -5.0f64..5.0, w in 0.2f64..3.0,
        ) {
            let g = Grid2D::square(-3.0, 3.0, 33).unwrap();
            let f = ComplexField::from_fn(g, |x, y| {
                Complex64::new((-(x * x + y * y) / w).exp(), x * y * (-x * x).exp())
            }).unwrap();
            let alpha = Complex64::new(re, im);
            let lhs = f.scale(alpha).norm();
            let rhs = alpha.norm() * f.norm();
            proptest::prop_assert!((lhs - rhs).abs() <= 1e-13 * rhs.max(1e-300));
        }
    }
}
