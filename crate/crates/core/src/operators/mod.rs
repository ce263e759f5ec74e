//! Finite-difference operators on [`ComplexField`]s: momenta, coordinate
//! multiplications, the Hamiltonian and the canonical variables
//! `Q, Qbar, P, Pbar`; commutator and eigen-residual checks; and the
//! matrix-free spectrum solver.
//!
//! Every derivative-carrying operator evaluates central stencils only where
//! they fit inside the grid. The outer ring of `half_width` points (the
//! boundary skin) is set to zero and excluded from every norm; composing
//! operators widens the excluded ring accordingly.

mod spectrum;
mod stencil;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{domain, LandauError, Result};
use crate::physcore::{ComplexField, GaugeChoice, Grid2D, PhysicalParams};

pub use spectrum::{
    cluster_eigenvalues, spectrum, spectrum_with, Cluster, DirichletHamiltonian, SolverConfig,
    SpectrumResult,
};
pub use stencil::StencilOrder;

/// Boundary modulus allowed, relative to the field maximum, before an
/// operator refuses to act.
pub const DECAY_LIMIT: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OperatorKind {
    Px,
    Py,
    MultX,
    MultY,
    /// `(p_x - beta y)^2 / 2m + p_y^2 / 2m` in the `LandauX` gauge.
    Hamiltonian,
    /// `beta^2 Q^2 / 2m + P^2 / 2m`, with `Q` and `P` applied twice.
    CanonicalHamiltonian,
    Q,
    Qbar,
    P,
    Pbar,
}

impl OperatorKind {
    pub fn symbol(self) -> &'static str {
        match self {
            OperatorKind::Px => "px",
            OperatorKind::Py => "py",
            OperatorKind::MultX => "x",
            OperatorKind::MultY => "y",
            OperatorKind::Hamiltonian => "H",
            OperatorKind::CanonicalHamiltonian => "H_QP",
            OperatorKind::Q => "Q",
            OperatorKind::Qbar => "Qbar",
            OperatorKind::P => "P",
            OperatorKind::Pbar => "Pbar",
        }
    }
}

/// What an operator does when its input does not vanish at the boundary.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BoundaryPolicy {
    /// Fail with [`LandauError::Contamination`].
    #[default]
    RequireDecay,
    /// Act anyway; only the skin-excluded interior is meaningful. Used
    /// for pointwise residuals of non-normalizable eigenfunctions.
    SkinOnly,
}

/// How the magnetic kinetic term `(p - beta A)^2` is discretized.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum KineticForm {
    /// `p^2 - 2 beta A p + beta^2 A^2` with ordinary stencils.
    #[default]
    Expanded,
    /// `exp(i phi) p^2 exp(-i phi)` with the gauge phase folded into the
    /// stencil weights. Exact on fields whose only fast variation is the
    /// gauge phase, such as the `Qbar` eigenstates.
    Covariant,
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Deriv {
    Id,
    Dx,
    Dy,
    Dxx,
    Dyy,
    /// Second difference along x with neighbour `+-k` weighted by
    /// `exp(-+i k rate y h_x)`; `CovYy` uses `x h_y` instead.
    CovXx(f64),
    CovYy(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Coord {
    One,
    X,
    Y,
    X2,
    Y2,
}

impl Coord {
    #[inline]
    fn at(self, x: f64, y: f64) -> f64 {
        match self {
            Coord::One => 1.0,
            Coord::X => x,
            Coord::Y => y,
            Coord::X2 => x * x,
            Coord::Y2 => y * y,
        }
    }
}

/// `coef * coord(x, y) * deriv f`.
#[derive(Debug, Clone, Copy)]
struct Term {
    coef: Complex64,
    coord: Coord,
    deriv: Deriv,
}

fn term(coef: Complex64, coord: Coord, deriv: Deriv) -> Term {
    Term { coef, coord, deriv }
}

/// A linear map on fields, fixed by its kind, the physical constants, the
/// gauge and the stencil order.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiscreteOperator {
    pub kind: OperatorKind,
    pub params: PhysicalParams,
    pub gauge: GaugeChoice,
    pub order: StencilOrder,
    pub policy: BoundaryPolicy,
    pub kinetic: KineticForm,
    /// Test hook: flips the sign of the Hamiltonian's cross term.
    pub break_gauge: bool,
}

impl DiscreteOperator {
    pub fn new(kind: OperatorKind, params: PhysicalParams, gauge: GaugeChoice) -> Self {
        Self {
            kind,
            params,
            gauge,
            order: StencilOrder::Fourth,
            policy: BoundaryPolicy::RequireDecay,
            kinetic: KineticForm::Expanded,
            break_gauge: false,
        }
    }

    pub fn hamiltonian(params: PhysicalParams, gauge: GaugeChoice) -> Self {
        Self::new(OperatorKind::Hamiltonian, params, gauge)
    }

    pub fn with_order(mut self, order: StencilOrder) -> Self {
        self.order = order;
        self
    }

    pub fn with_policy(mut self, policy: BoundaryPolicy) -> Self {
        self.policy = policy;
        self
    }

    pub fn with_kinetic(mut self, kinetic: KineticForm) -> Self {
        self.kinetic = kinetic;
        self
    }

    pub fn with_broken_gauge(mut self, broken: bool) -> Self {
        self.break_gauge = broken;
        self
    }

    /// Same configuration, different kind.
    pub fn sibling(&self, kind: OperatorKind) -> Self {
        Self { kind, ..*self }
    }

    fn has_derivatives(&self) -> bool {
        !matches!(self.kind, OperatorKind::MultX | OperatorKind::MultY)
    }

    /// Width of the ring of output points that is not computed.
    pub fn skin(&self) -> usize {
        match self.kind {
            OperatorKind::MultX | OperatorKind::MultY => 0,
            OperatorKind::CanonicalHamiltonian => 2 * self.order.half_width(),
            _ => self.order.half_width(),
        }
    }

    fn terms(&self) -> Vec<Term> {
        let hbar = self.params.hbar();
        let m = self.params.mass();
        let beta = self.params.beta();
        let ih = Complex64::new(0.0, hbar);
        let re = |v: f64| Complex64::new(v, 0.0);
        let kinetic = re(-hbar * hbar / (2.0 * m));
        let cross_sign = if self.break_gauge { -1.0 } else { 1.0 };
        use GaugeChoice::*;
        use OperatorKind::*;
        let covariant = self.kinetic == KineticForm::Covariant;
        match (self.kind, self.gauge) {
            (Hamiltonian, LandauX) if covariant => {
                vec![
                    term(kinetic, Coord::One, Deriv::CovXx(cross_sign * beta / hbar)),
                    term(kinetic, Coord::One, Deriv::Dyy),
                ]
            }
            (Hamiltonian, LandauY) if covariant => {
                vec![
                    term(kinetic, Coord::One, Deriv::Dxx),
                    term(kinetic, Coord::One, Deriv::CovYy(-cross_sign * beta / hbar)),
                ]
            }
            (Px, _) => vec![term(-ih, Coord::One, Deriv::Dx)],
            (Py, _) => vec![term(-ih, Coord::One, Deriv::Dy)],
            (MultX, _) => vec![term(re(1.0), Coord::X, Deriv::Id)],
            (MultY, _) => vec![term(re(1.0), Coord::Y, Deriv::Id)],
            // (p_x - beta y)^2 = p_x^2 - 2 beta y p_x + beta^2 y^2
            (Hamiltonian, LandauX) => vec![
                term(kinetic, Coord::One, Deriv::Dxx),
                term(kinetic, Coord::One, Deriv::Dyy),
                term(cross_sign * ih * beta / m, Coord::Y, Deriv::Dx),
                term(re(beta * beta / (2.0 * m)), Coord::Y2, Deriv::Id),
            ],
            // (p_y + beta x)^2 = p_y^2 + 2 beta x p_y + beta^2 x^2
            (Hamiltonian, LandauY) => vec![
                term(kinetic, Coord::One, Deriv::Dxx),
                term(kinetic, Coord::One, Deriv::Dyy),
                term(-cross_sign * ih * beta / m, Coord::X, Deriv::Dy),
                term(re(beta * beta / (2.0 * m)), Coord::X2, Deriv::Id),
            ],
            // Q = -(p_x - beta y)/beta, Qbar = -(p_y - beta x)/beta,
            // P = p_y, Pbar = p_x
            (Q, LandauX) => vec![
                term(ih / beta, Coord::One, Deriv::Dx),
                term(re(1.0), Coord::Y, Deriv::Id),
            ],
            (Qbar, LandauX) => vec![
                term(ih / beta, Coord::One, Deriv::Dy),
                term(re(1.0), Coord::X, Deriv::Id),
            ],
            (P, LandauX) => vec![term(-ih, Coord::One, Deriv::Dy)],
            (Pbar, LandauX) => vec![term(-ih, Coord::One, Deriv::Dx)],
            // Quarter-turn images: Q = -(p_y + beta x)/beta,
            // Qbar = (p_x + beta y)/beta, P = -p_x, Pbar = p_y
            (Q, LandauY) => vec![
                term(ih / beta, Coord::One, Deriv::Dy),
                term(re(-1.0), Coord::X, Deriv::Id),
            ],
            (Qbar, LandauY) => vec![
                term(-ih / beta, Coord::One, Deriv::Dx),
                term(re(1.0), Coord::Y, Deriv::Id),
            ],
            (P, LandauY) => vec![term(ih, Coord::One, Deriv::Dx)],
            (Pbar, LandauY) => vec![term(-ih, Coord::One, Deriv::Dy)],
            (CanonicalHamiltonian, _) => unreachable!("composite operator has no term list"),
        }
    }

    /// Applies the operator. Under [`BoundaryPolicy::RequireDecay`] a
    /// derivative-carrying operator first checks that the input vanishes on
    /// the boundary ring.
    pub fn apply(&self, f: &ComplexField) -> Result<ComplexField> {
        if self.policy == BoundaryPolicy::RequireDecay && self.has_derivatives() {
            check_boundary_decay(f, self.order.half_width(), DECAY_LIMIT)?;
        }
        Ok(self.apply_unchecked(f))
    }

    /// Applies the operator without the boundary check.
    pub fn apply_unchecked(&self, f: &ComplexField) -> ComplexField {
        match self.kind {
            OperatorKind::CanonicalHamiltonian => {
                let m = self.params.mass();
                let beta = self.params.beta();
                let q = self.sibling(OperatorKind::Q);
                let p = self.sibling(OperatorKind::P);
                let qq = q.apply_unchecked(&q.apply_unchecked(f));
                let pp = p.apply_unchecked(&p.apply_unchecked(f));
                let a = Complex64::new(beta * beta / (2.0 * m), 0.0);
                let b = Complex64::new(1.0 / (2.0 * m), 0.0);
                let values = qq
                    .values()
                    .iter()
                    .zip(pp.values())
                    .map(|(u, v)| a * u + b * v)
                    .collect();
                ComplexField::from_raw(*f.grid(), values)
            }
            _ => apply_terms(&self.terms(), self.order, self.skin(), f),
        }
    }
}

fn apply_terms(terms: &[Term], order: StencilOrder, skin: usize, f: &ComplexField) -> ComplexField {
    let grid = *f.grid();
    let (nx, ny) = (grid.nx(), grid.ny());
    let v = f.values();
    let c1 = order.first();
    let c2 = order.second();
    let (ihx, ihy) = (1.0 / grid.hx(), 1.0 / grid.hy());
    let (ihx2, ihy2) = (ihx * ihx, ihy * ihy);
    let mut out = vec![Complex64::new(0.0, 0.0); grid.len()];
    if nx <= 2 * skin || ny <= 2 * skin {
        return ComplexField::from_raw(grid, out);
    }
    out.par_chunks_mut(ny).enumerate().for_each(|(i, row)| {
        if i < skin || i >= nx - skin {
            return;
        }
        let x = grid.x(i);
        for j in skin..ny - skin {
            let y = grid.y(j);
            let p = i * ny + j;
            let mut acc = Complex64::new(0.0, 0.0);
            for t in terms {
                let d = match t.deriv {
                    Deriv::Id => v[p],
                    Deriv::Dx => {
                        let mut s = Complex64::new(0.0, 0.0);
                        for (k, c) in c1.iter().enumerate() {
                            let o = (k + 1) * ny;
                            s += (v[p + o] - v[p - o]) * *c;
                        }
                        s * ihx
                    }
                    Deriv::Dy => {
                        let mut s = Complex64::new(0.0, 0.0);
                        for (k, c) in c1.iter().enumerate() {
                            let o = k + 1;
                            s += (v[p + o] - v[p - o]) * *c;
                        }
                        s * ihy
                    }
                    Deriv::Dxx => {
                        let mut s = v[p] * c2[0];
                        for (k, c) in c2.iter().enumerate().skip(1) {
                            let o = k * ny;
                            s += (v[p + o] + v[p - o]) * *c;
                        }
                        s * ihx2
                    }
                    Deriv::Dyy => {
                        let mut s = v[p] * c2[0];
                        for (k, c) in c2.iter().enumerate().skip(1) {
                            s += (v[p + k] + v[p - k]) * *c;
                        }
                        s * ihy2
                    }
                    Deriv::CovXx(rate) => {
                        let theta = rate * y * grid.hx();
                        let mut s = v[p] * c2[0];
                        for (k, c) in c2.iter().enumerate().skip(1) {
                            let o = k * ny;
                            let ph = Complex64::from_polar(1.0, -theta * k as f64);
                            s += (v[p + o] * ph + v[p - o] * ph.conj()) * *c;
                        }
                        s * ihx2
                    }
                    Deriv::CovYy(rate) => {
                        let theta = rate * x * grid.hy();
                        let mut s = v[p] * c2[0];
                        for (k, c) in c2.iter().enumerate().skip(1) {
                            let ph = Complex64::from_polar(1.0, -theta * k as f64);
                            s += (v[p + k] * ph + v[p - k] * ph.conj()) * *c;
                        }
                        s * ihy2
                    }
                };
                acc += t.coef * t.coord.at(x, y) * d;
            }
            row[j] = acc;
        }
    });
    ComplexField::from_raw(grid, out)
}

/// Fails when any point in the outer `width` ring carries more than
/// `limit * max|f|`; the error names the worst point.
pub fn check_boundary_decay(f: &ComplexField, width: usize, limit: f64) -> Result<()> {
    let peak = f.max_abs();
    if peak == 0.0 {
        return Ok(());
    }
    let g = f.grid();
    let (nx, ny) = (g.nx(), g.ny());
    let width = width.max(1);
    let mut worst = (0.0, 0, 0);
    for i in 0..nx {
        let edge_row = i < width || i + width >= nx;
        for j in 0..ny {
            if edge_row || j < width || j + width >= ny {
                let r = f.at(i, j).norm() / peak;
                if r > worst.0 {
                    worst = (r, i, j);
                }
            }
        }
    }
    if worst.0 > limit {
        let (ratio, i, j) = worst;
        return Err(LandauError::Contamination {
            i,
            j,
            x: g.x(i),
            y: g.y(j),
            ratio,
            limit,
        });
    }
    Ok(())
}

/// `a(b(f)) - b(a(f))`.
pub fn commutator_apply(
    a: &DiscreteOperator,
    b: &DiscreteOperator,
    f: &ComplexField,
) -> Result<ComplexField> {
    let ab = a.apply(&b.apply(f)?)?;
    let ba = b.apply(&a.apply(f)?)?;
    ab.sub(&ba)
}

/// `||[a, b] f - (expected i hbar) f|| / ||f||` over the interior that both
/// compositions leave untouched.
pub fn commutator_residual(
    a: &DiscreteOperator,
    b: &DiscreteOperator,
    f: &ComplexField,
    ihbar_multiple: f64,
) -> Result<f64> {
    let c = commutator_apply(a, b, f)?;
    let margin = a.skin() + b.skin();
    let target = Complex64::new(0.0, a.params.hbar() * ihbar_multiple);
    let diff = c.axpy(-target, f)?;
    relative(diff.norm_interior(margin), f.norm_interior(margin))
}

fn relative(num: f64, den: f64) -> Result<f64> {
    if den == 0.0 {
        return domain("reference field vanishes on the interior");
    }
    Ok(num / den)
}

/// `||H f - E f|| / ||f||` over the skin-excluded interior, with
/// fourth-order stencils and the covariant kinetic term.
pub fn eigen_residual(
    params: &PhysicalParams,
    gauge: GaugeChoice,
    f: &ComplexField,
    energy: f64,
) -> Result<f64> {
    let h = DiscreteOperator::hamiltonian(*params, gauge)
        .with_policy(BoundaryPolicy::SkinOnly)
        .with_kinetic(KineticForm::Covariant);
    eigen_residual_with(&h, f, energy)
}

/// [`eigen_residual`] for an explicitly configured Hamiltonian.
pub fn eigen_residual_with(h: &DiscreteOperator, f: &ComplexField, energy: f64) -> Result<f64> {
    let margin = h.skin();
    let fnorm = f.norm_interior(margin);
    if fnorm == 0.0 {
        return domain("eigen residual of a field that vanishes on the interior");
    }
    let hf = h.apply(f)?;
    let r = hf.axpy(Complex64::new(-energy, 0.0), f)?;
    Ok(r.norm_interior(margin) / fnorm)
}

/// Operators that commute with the Landau Hamiltonian.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Conserved {
    Pbar,
    Qbar,
}

impl Conserved {
    pub fn kind(self) -> OperatorKind {
        match self {
            Conserved::Pbar => OperatorKind::Pbar,
            Conserved::Qbar => OperatorKind::Qbar,
        }
    }
}

/// `||[H, which] f|| / ||f||`.
pub fn conserved_operator_check(
    params: &PhysicalParams,
    gauge: GaugeChoice,
    which: Conserved,
    f: &ComplexField,
) -> Result<f64> {
    let h = DiscreteOperator::hamiltonian(*params, gauge);
    commutator_norm(&h, &h.sibling(which.kind()), f)
}

/// `||[a, b] f|| / ||f||`.
pub fn commutator_norm(a: &DiscreteOperator, b: &DiscreteOperator, f: &ComplexField) -> Result<f64> {
    commutator_residual(a, b, f, 0.0)
}

/// `|<f, A g> - conj(<g, A f>)| / (||f|| ||g||)`.
pub fn hermiticity_defect(op: &DiscreteOperator, f: &ComplexField, g: &ComplexField) -> Result<f64> {
    let ag = op.apply(g)?;
    let af = op.apply(f)?;
    let lhs = f.inner_interior(&ag, 0)?;
    let rhs = g.inner_interior(&af, 0)?.conj();
    relative((lhs - rhs).norm(), f.norm() * g.norm())
}

/// Relative difference between the Hamiltonian in `(x, y, p_x, p_y)` form
/// and in `beta^2 Q^2 / 2m + P^2 / 2m` form, on the interior both leave
/// untouched.
pub fn canonical_form_defect(
    params: &PhysicalParams,
    gauge: GaugeChoice,
    f: &ComplexField,
) -> Result<f64> {
    let h = DiscreteOperator::hamiltonian(*params, gauge);
    let hq = h.sibling(OperatorKind::CanonicalHamiltonian);
    let a = h.apply(f)?;
    let b = hq.apply(f)?;
    let margin = hq.skin();
    relative(a.sub(&b)?.norm_interior(margin), a.norm_interior(margin))
}

/// A commutator with its expected value as a multiple of `i hbar`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CommutatorPair {
    pub a: OperatorKind,
    pub b: OperatorKind,
    pub ihbar_multiple: f64,
}

/// Every unordered pair (self-pairs included) of `Q, Qbar, P, Pbar`.
pub fn canonical_pairs() -> [CommutatorPair; 10] {
    use OperatorKind::*;
    let pair = |a, b, m| CommutatorPair {
        a,
        b,
        ihbar_multiple: m,
    };
    [
        pair(Q, P, 1.0),
        pair(Qbar, Pbar, 1.0),
        pair(Q, Qbar, 0.0),
        pair(P, Pbar, 0.0),
        pair(Q, Pbar, 0.0),
        pair(Qbar, P, 0.0),
        pair(Q, Q, 0.0),
        pair(Qbar, Qbar, 0.0),
        pair(P, P, 0.0),
        pair(Pbar, Pbar, 0.0),
    ]
}

/// Smooth, boundary-decaying probe for operator identities.
#[derive(Debug, Clone, Copy)]
pub struct TestFunction {
    pub label: &'static str,
    eval: fn(f64, f64) -> Complex64,
}

impl TestFunction {
    /// Value at `(x, y)` measured in magnetic lengths.
    pub fn eval_scaled(&self, s: f64, t: f64) -> Complex64 {
        (self.eval)(s, t)
    }

    pub fn sample(&self, params: &PhysicalParams, grid: Grid2D) -> Result<ComplexField> {
        let l = params.mag_length();
        ComplexField::from_fn(grid, |x, y| (self.eval)(x / l, y / l))
    }
}

fn gauss(s: f64, t: f64, s0: f64, t0: f64, ws: f64, wt: f64) -> f64 {
    (-0.5 * ((s - s0) * (s - s0) / (ws * ws) + (t - t0) * (t - t0) / (wt * wt))).exp()
}

/// Half-width, in magnetic lengths, of a square domain on which every
/// member of [`gaussian_test_suite`] has decayed below [`DECAY_LIMIT`].
pub const TEST_SUITE_REACH: f64 = 15.0;

/// Five Gaussian-times-polynomial probes (some with phases). Widths are
/// near two magnetic lengths so that fourth-order truncation errors stay
/// well below the identities' tolerances at `h = 0.02 l`.
pub fn gaussian_test_suite() -> [TestFunction; 5] {
    [
        TestFunction {
            label: "gauss",
            eval: |s, t| Complex64::new(gauss(s, t, 0.0, 0.0, 2.0, 2.0), 0.0),
        },
        TestFunction {
            label: "linear*gauss*phase",
            eval: |s, t| {
                Complex64::from_polar(
                    (s - 0.5 * t) * gauss(s, t, 0.3, -0.2, 2.0, 2.0),
                    0.4 * s - 0.3 * t,
                )
            },
        },
        TestFunction {
            label: "quadratic*anisotropic-gauss",
            eval: |s, t| Complex64::new((1.0 + s * s - t) * gauss(s, t, 0.0, 0.0, 2.0, 1.8), 0.0),
        },
        TestFunction {
            label: "st*gauss*phase",
            eval: |s, t| {
                Complex64::from_polar(s * t * gauss(s, t, -0.5, 0.5, 2.0, 2.0), 0.3 * s)
            },
        },
        TestFunction {
            label: "vortex*gauss*phase",
            eval: |s, t| {
                Complex64::new(s, t)
                    * Complex64::from_polar(gauss(s, t, 0.2, 0.0, 2.0, 2.0), -0.5 * t)
            },
        },
    ]
}

/// Square grid of half-width [`TEST_SUITE_REACH`] magnetic lengths and
/// spacing `h` (absolute units).
pub fn test_suite_grid(params: &PhysicalParams, h: f64) -> Result<Grid2D> {
    Grid2D::square_with_spacing(TEST_SUITE_REACH * params.mag_length(), h)
}
