//! Closed-form Landau eigenfunctions: the plane-wave (free) solution, the
//! delta-line term and their two-term superposition.
//!
//! Formulas are written for `GaugeChoice::LandauX`; the other gauge is
//! obtained by evaluating at the rotated point returned by
//! [`GaugeChoice::to_landau_x_frame`].

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::hermite::psi_n;
use crate::physcore::{ComplexField, GaugeChoice, Grid2D, PhysicalParams, QuantumNumbers};

/// `exp(i k x / hbar) Psi_n(sqrt(beta/hbar) (y - k/beta))`.
pub fn eval_landau(
    params: &PhysicalParams,
    gauge: GaugeChoice,
    n: usize,
    k: f64,
    x: f64,
    y: f64,
) -> Complex64 {
    let (x, y) = gauge.to_landau_x_frame(x, y);
    let s = (y - k / params.beta()) * params.inverse_length();
    Complex64::from_polar(psi_n(n, s), k * x / params.hbar())
}

/// `exp(i (beta/hbar) (x - k'/beta) y) Psi_n(sqrt(beta/hbar) (x - k'/beta))`.
pub fn eval_nonfree_term(
    params: &PhysicalParams,
    gauge: GaugeChoice,
    n: usize,
    kprime: f64,
    x: f64,
    y: f64,
) -> Complex64 {
    let (x, y) = gauge.to_landau_x_frame(x, y);
    let shifted = x - kprime / params.beta();
    let s = shifted * params.inverse_length();
    Complex64::from_polar(psi_n(n, s), params.beta() * shifted * y / params.hbar())
}

/// Weights of the two summands of the non-free wavefunction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NonFreeCoefficients {
    pub c_plane: Complex64,
    pub c_delta: Complex64,
}

impl NonFreeCoefficients {
    pub fn new(c_plane: Complex64, c_delta: Complex64) -> Result<Self> {
        let ok = |c: Complex64| c.re.is_finite() && c.im.is_finite();
        if !ok(c_plane) || !ok(c_delta) {
            return domain("coefficients must be finite");
        }
        if c_plane == Complex64::new(0.0, 0.0) && c_delta == Complex64::new(0.0, 0.0) {
            return domain("at least one coefficient must be non-zero");
        }
        Ok(Self { c_plane, c_delta })
    }
}

impl Default for NonFreeCoefficients {
    fn default() -> Self {
        Self {
            c_plane: Complex64::new(1.0, 0.0),
            c_delta: Complex64::new(1.0, 0.0),
        }
    }
}

pub fn eval_nonfree(
    params: &PhysicalParams,
    gauge: GaugeChoice,
    qn: &QuantumNumbers,
    coeffs: &NonFreeCoefficients,
    x: f64,
    y: f64,
) -> Complex64 {
    coeffs.c_plane * eval_landau(params, gauge, qn.n, qn.k, x, y)
        + coeffs.c_delta * eval_nonfree_term(params, gauge, qn.n, qn.kprime, x, y)
}

/// Which closed form to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Wavefunction {
    Landau { n: usize, k: f64 },
    NonFreeTerm { n: usize, kprime: f64 },
    NonFree {
        qn: QuantumNumbers,
        coeffs: NonFreeCoefficients,
    },
}

impl Wavefunction {
    pub fn level(&self) -> usize {
        match self {
            Wavefunction::Landau { n, .. } | Wavefunction::NonFreeTerm { n, .. } => *n,
            Wavefunction::NonFree { qn, .. } => qn.n,
        }
    }

    pub fn eval(&self, params: &PhysicalParams, gauge: GaugeChoice, x: f64, y: f64) -> Complex64 {
        match self {
            Wavefunction::Landau { n, k } => eval_landau(params, gauge, *n, *k, x, y),
            Wavefunction::NonFreeTerm { n, kprime } => {
                eval_nonfree_term(params, gauge, *n, *kprime, x, y)
            }
            Wavefunction::NonFree { qn, coeffs } => eval_nonfree(params, gauge, qn, coeffs, x, y),
        }
    }

    pub fn sample(
        &self,
        params: &PhysicalParams,
        gauge: GaugeChoice,
        grid: Grid2D,
    ) -> Result<ComplexField> {
        sample_field(|x, y| self.eval(params, gauge, x, y), grid)
    }

    /// Warnings for oscillator centres that sit outside the grid or too
    /// close to its edge for boundary-free residuals.
    pub fn center_warnings(
        &self,
        params: &PhysicalParams,
        gauge: GaugeChoice,
        grid: &Grid2D,
    ) -> Vec<String> {
        let n = self.level();
        let reach = ((2 * n + 1) as f64).sqrt() + 6.0;
        let mut out = Vec::new();
        let mut check = |label: &str, axis_is_x: bool, center: f64| {
            let (lo, hi) = if axis_is_x { grid.x_bounds() } else { grid.y_bounds() };
            let axis = if axis_is_x { "x" } else { "y" };
            let margin = (center - lo).min(hi - center) / params.mag_length();
            if margin < 0.0 {
                out.push(format!(
                    "{label}: oscillator centre {axis} = {center} lies outside [{lo}, {hi}]"
                ));
            } else if margin < reach {
                out.push(format!(
                    "{label}: oscillator centre {axis} = {center} is {margin:.2} magnetic lengths \
                     from the edge (< {reach:.2}); boundary contamination likely"
                ));
            }
        };
        let beta = params.beta();
        // LandauX: Gaussian in y centred at k/beta, in x centred at k'/beta.
        // LandauY: the quarter turn moves these to x = -k/beta and y = k'/beta.
        let plane = |k: f64| match gauge {
            GaugeChoice::LandauX => (false, k / beta),
            GaugeChoice::LandauY => (true, -k / beta),
        };
        let delta = |kp: f64| match gauge {
            GaugeChoice::LandauX => (true, kp / beta),
            GaugeChoice::LandauY => (false, kp / beta),
        };
        match self {
            Wavefunction::Landau { k, .. } => {
                let (ax, c) = plane(*k);
                check("plane-wave term", ax, c);
            }
            Wavefunction::NonFreeTerm { kprime, .. } => {
                let (ax, c) = delta(*kprime);
                check("delta-line term", ax, c);
            }
            Wavefunction::NonFree { qn, coeffs } => {
                if coeffs.c_plane != Complex64::new(0.0, 0.0) {
                    let (ax, c) = plane(qn.k);
                    check("plane-wave term", ax, c);
                }
                if coeffs.c_delta != Complex64::new(0.0, 0.0) {
                    let (ax, c) = delta(qn.kprime);
                    check("delta-line term", ax, c);
                }
            }
        }
        out
    }
}

/// Samples a closed-form evaluator on the grid; a non-finite sample is an
/// error carrying its grid index.
pub fn sample_field<F>(evaluator: F, grid: Grid2D) -> Result<ComplexField>
where
    F: Fn(f64, f64) -> Complex64 + Sync,
{
    ComplexField::from_fn(grid, evaluator)
}

/// Trapezoid approximation of `integral conj(f) g dx dy`.
pub fn overlap(f: &ComplexField, g: &ComplexField) -> Result<Complex64> {
    f.inner_interior(g, 0)
}

/// `2 pi hbar j / L`: momenta whose plane waves are orthogonal on a box of
/// width `L`.
pub fn quantized_momentum(params: &PhysicalParams, j: i64, box_length: f64) -> f64 {
    2.0 * PI * params.hbar() * j as f64 / box_length
}

#[cfg(test)]
mod tests {
    use super::*;

    fn nat() -> PhysicalParams {
        PhysicalParams::natural()
    }
    const X: GaugeChoice = GaugeChoice::LandauX;

    #[test]
    fn landau_ground_state_at_origin() {
        let v = eval_landau(&nat(), X, 0, 0.0, 0.0, 0.0);
        assert!((v - Complex64::new(PI.powf(-0.25), 0.0)).norm() < 1e-15);
    }

    #[test]
    fn landau_peak_moves_with_k() {
        let p = nat();
        let peak = eval_landau(&p, X, 0, 1.0, 0.3, 1.0).norm();
        assert!((peak - PI.powf(-0.25)).abs() < 1e-15);
        for dy in [-0.5, -0.1, 0.1, 0.5] {
            assert!(eval_landau(&p, X, 0, 1.0, 0.3, 1.0 + dy).norm() < peak);
        }
    }

    #[test]
    fn landau_modulus_ignores_x() {
        let p = nat();
        for x in [-5.0, 0.0, 3.0, 7.5] {
            let v = eval_landau(&p, X, 0, 0.0, x, 0.0);
            assert!((v.norm() - PI.powf(-0.25)).abs() < 1e-15);
        }
    }

    #[test]
    fn nonfree_term_values() {
        let p = nat();
        let v = eval_nonfree_term(&p, X, 0, 0.0, 0.0, 0.0);
        assert!((v.re - PI.powf(-0.25)).abs() < 1e-15 && v.im == 0.0);
        let peak = eval_nonfree_term(&p, X, 0, 2.0, 2.0, 0.7).norm();
        assert!((peak - PI.powf(-0.25)).abs() < 1e-15);
        assert!(eval_nonfree_term(&p, X, 0, 2.0, 1.5, 0.7).norm() < peak);
        for y in [-3.0, 0.0, 2.0] {
            assert_eq!(eval_nonfree_term(&p, X, 1, 0.0, 0.0, y).norm(), 0.0);
        }
    }

    #[test]
    fn superposition_projections() {
        let p = nat();
        let qn = QuantumNumbers::new(2, 0.4, -0.7).unwrap();
        let one = Complex64::new(1.0, 0.0);
        let zero = Complex64::new(0.0, 0.0);
        let plane_only = NonFreeCoefficients::new(one, zero).unwrap();
        let delta_only = NonFreeCoefficients::new(zero, one).unwrap();
        for &(x, y) in &[(0.1, -0.3), (1.2, 0.8), (-2.0, 1.5)] {
            assert_eq!(
                eval_nonfree(&p, X, &qn, &plane_only, x, y),
                eval_landau(&p, X, 2, 0.4, x, y)
            );
            assert_eq!(
                eval_nonfree(&p, X, &qn, &delta_only, x, y),
                eval_nonfree_term(&p, X, 2, -0.7, x, y)
            );
        }
        let both = NonFreeCoefficients::default();
        let qn0 = QuantumNumbers::new(0, 0.0, 0.0).unwrap();
        let v = eval_nonfree(&p, X, &qn0, &both, 0.0, 0.0);
        assert!((v.re - 2.0 * PI.powf(-0.25)).abs() < 1e-15);
        assert!(NonFreeCoefficients::new(zero, zero).is_err());
    }

    #[test]
    fn zero_evaluator_gives_zero_field() {
        let g = Grid2D::square(-1.0, 1.0, 9).unwrap();
        let f = sample_field(|_, _| Complex64::new(0.0, 0.0), g).unwrap();
        assert_eq!(f.max_abs(), 0.0);
        assert!(sample_field(|_, _| Complex64::new(f64::INFINITY, 0.0), g).is_err());
    }

    #[test]
    fn column_norms_match_gaussian_strip() {
        // Oracle: 1-D trapezoid of Psi_0^2 over y, times the strip width.
        let g = Grid2D::square(-10.0, 10.0, 257).unwrap();
        let f = Wavefunction::Landau { n: 0, k: 0.0 }.sample(&nat(), X, g).unwrap();
        let h = g.hy();
        let mut line = 0.0;
        for j in 0..g.ny() {
            let w = if j == 0 || j == g.ny() - 1 { 0.5 } else { 1.0 };
            line += w * psi_n(0, g.y(j)).powi(2) * h;
        }
        let width = g.x_bounds().1 - g.x_bounds().0;
        assert!((f.norm().powi(2) - line * width).abs() < 1e-12);
        assert!((line - 1.0).abs() < 1e-12);
    }

    #[test]
    fn transposed_moduli_agree() {
        let g = Grid2D::square(-6.0, 6.0, 49).unwrap();
        let p = nat();
        let a = Wavefunction::NonFreeTerm { n: 0, kprime: 0.0 }.sample(&p, X, g).unwrap();
        let b = Wavefunction::Landau { n: 0, k: 0.0 }.sample(&p, X, g).unwrap();
        let t = a.transposed();
        for (u, v) in t.values().iter().zip(b.values()) {
            assert!((u.norm() - v.norm()).abs() < 1e-15);
        }
    }

    #[test]
    fn overlaps() {
        let g = Grid2D::square(-10.0, 10.0, 257).unwrap();
        let p = nat();
        let f = Wavefunction::Landau { n: 0, k: 0.3 }.sample(&p, X, g).unwrap();
        let self_overlap = overlap(&f, &f).unwrap();
        assert!((self_overlap.re - f.norm().powi(2)).abs() < 1e-12 * self_overlap.re);

        let g1 = Wavefunction::Landau { n: 1, k: 0.3 }.sample(&p, X, g).unwrap();
        assert!(overlap(&f, &g1).unwrap().norm() < 1e-8);

        let k = quantized_momentum(&p, 4, 20.0);
        assert!((k - 2.0 * PI * 4.0 / 20.0).abs() < 1e-15);
        let f0 = Wavefunction::Landau { n: 0, k: 0.0 }.sample(&p, X, g).unwrap();
        let fk = Wavefunction::Landau { n: 0, k }.sample(&p, X, g).unwrap();
        assert!(overlap(&f0, &fk).unwrap().norm() < 1e-8);
    }

    #[test]
    fn gauge_y_is_quarter_turn() {
        let p = nat();
        let g = Grid2D::square(-4.0, 4.0, 33).unwrap();
        for i in 0..g.nx() {
            for j in 0..g.ny() {
                let (x, y) = (g.x(i), g.y(j));
                let a = eval_landau(&p, GaugeChoice::LandauY, 2, 0.7, x, y);
                let b = eval_landau(&p, X, 2, 0.7, y, -x);
                assert_eq!(a, b);
                // The moduli are the x<->y mirror images up to k -> -k.
                let m = eval_landau(&p, X, 2, -0.7, y, x).norm();
                assert!((a.norm() - m).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn modulus_structure_on_grid() {
        let p = nat();
        let g = Grid2D::square(-5.0, 5.0, 33).unwrap();
        let a = Wavefunction::Landau { n: 3, k: 0.5 }.sample(&p, X, g).unwrap();
        let b = Wavefunction::NonFreeTerm { n: 3, kprime: -0.5 }.sample(&p, X, g).unwrap();
        for i in 0..g.nx() {
            for j in 0..g.ny() {
                assert!((a.at(i, j).norm() - a.at(0, j).norm()).abs() < 1e-14);
                assert!((b.at(i, j).norm() - b.at(i, 0).norm()).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn centre_warnings() {
        let p = nat();
        let g = Grid2D::square(-10.0, 10.0, 65).unwrap();
        assert!(Wavefunction::Landau { n: 0, k: 0.0 }.center_warnings(&p, X, &g).is_empty());
        let w = Wavefunction::NonFreeTerm { n: 0, kprime: 12.0 }.center_warnings(&p, X, &g);
        assert_eq!(w.len(), 1);
        assert!(w[0].contains("outside"));
        let w = Wavefunction::Landau { n: 4, k: 7.0 }.center_warnings(&p, X, &g);
        assert!(w[0].contains("contamination"));
    }
}
