//! The integral transform from the oscillator variables `(Q, Qbar)` to the
//! coordinates `(x, y)`:
//!
//! `T f(x, y) = (beta / 2 pi) iint exp[i (beta/hbar)(Q Qbar + x y - x Q - y Qbar)] f(Q, Qbar) dQ dQbar`.
//!
//! Two inputs collapse analytically. A plane wave `exp(i k Qbar / hbar)`
//! makes the `Qbar` integral a delta function in `Q`; a delta line
//! `delta(Qbar - k'/beta)` leaves a Fourier transform of `Psi_n`, which is
//! `Psi_n` again up to the constant [`delta_constant`]. The numerical path
//! regulates the oscillatory integral with a Gaussian damping of width
//! `1/eps`, realizes the delta line as a normalized Gaussian of width
//! `eps l`, and extrapolates the regulated values to `eps = 0`.
//!
//! The kernel is unitary up to a factor `hbar`: `<T f, T g> = hbar^2 <f, g>`.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{domain, LandauError, Result};
use crate::hermite::{cached_rule, fourier_of_psi, minus_i_pow, psi_n};
use crate::physcore::{GaugeChoice, PhysicalParams};
use crate::wavefunctions::{eval_landau, eval_nonfree_term};

/// `(beta / 2 pi) exp[i (beta/hbar)(Q Qbar + x y - x Q - y Qbar)]`.
pub fn mq_kernel(params: &PhysicalParams, q: f64, qbar: f64, x: f64, y: f64) -> Complex64 {
    let beta = params.beta();
    // (Q - y)(Qbar - x) expands to the phase polynomial and loses less
    // precision for large arguments.
    let phase = beta / params.hbar() * (q - y) * (qbar - x);
    Complex64::from_polar(beta / (2.0 * PI), phase)
}

/// Transform of `exp(i k Qbar / hbar) Psi_n(sqrt(beta/hbar) Q)`:
/// `hbar exp(i k x / hbar) Psi_n(sqrt(beta/hbar)(y - k/beta))`.
///
/// The factor `hbar` comes from `integral exp(i a s) ds = 2 pi delta(a)`
/// with `a` carrying `beta / hbar`; it is 1 in natural units.
pub fn transform_planewave(params: &PhysicalParams, n: usize, k: f64, x: f64, y: f64) -> Complex64 {
    eval_landau(params, GaugeChoice::LandauX, n, k, x, y) * params.hbar()
}

/// `(-i)^n sqrt(beta hbar / 2 pi)`, the constant that the delta-line input
/// picks up relative to the closed-form non-free term.
pub fn delta_constant(params: &PhysicalParams, n: usize) -> Complex64 {
    minus_i_pow(n) * (params.beta() * params.hbar() / (2.0 * PI)).sqrt()
}

/// Transform of `delta(Qbar - k'/beta) Psi_n(sqrt(beta/hbar) Q)`:
/// `C_n exp(i (beta/hbar)(x - k'/beta) y) Psi_n(sqrt(beta/hbar)(x - k'/beta))`.
pub fn transform_delta(params: &PhysicalParams, n: usize, kprime: f64, x: f64, y: f64) -> Complex64 {
    delta_constant(params, n) * eval_nonfree_term(params, GaugeChoice::LandauX, n, kprime, x, y)
}

/// The delta-line transform with the remaining `Q` integral done by
/// Gauss-Hermite quadrature instead of the closed form; used to pin the
/// constant `C_n` independently of [`delta_constant`].
pub fn transform_delta_quadrature(
    params: &PhysicalParams,
    n: usize,
    kprime: f64,
    x: f64,
    y: f64,
) -> Result<Complex64> {
    let rule = cached_rule((2 * n + 40).max(60))?;
    let a = params.inverse_length();
    let shifted = x - kprime / params.beta();
    let ft = fourier_of_psi(n, a * shifted, &rule)?;
    let phase = Complex64::from_polar(1.0, params.beta() * shifted * y / params.hbar());
    Ok(phase * ft * (params.beta() / (2.0 * PI) / a * (2.0 * PI).sqrt()))
}

/// A function of `(Q, Qbar)` supplied by the caller.
#[derive(Clone)]
pub struct CustomInput {
    pub label: String,
    f: Arc<dyn Fn(f64, f64) -> Complex64 + Send + Sync>,
}

impl CustomInput {
    pub fn new<F>(label: impl Into<String>, f: F) -> Self
    where
        F: Fn(f64, f64) -> Complex64 + Send + Sync + 'static,
    {
        Self {
            label: label.into(),
            f: Arc::new(f),
        }
    }

    pub fn eval(&self, q: f64, qbar: f64) -> Complex64 {
        (self.f)(q, qbar)
    }

    /// `a * self + b * other`.
    pub fn combine(&self, a: Complex64, other: &CustomInput, b: Complex64) -> CustomInput {
        let (f, g) = (self.f.clone(), other.f.clone());
        CustomInput::new(format!("{a}*{} + {b}*{}", self.label, other.label), move |q, qb| {
            a * f(q, qb) + b * g(q, qb)
        })
    }
}

impl fmt::Debug for CustomInput {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CustomInput").field("label", &self.label).finish()
    }
}

#[derive(Debug, Clone)]
pub enum TransformInput {
    /// `exp(i k Qbar / hbar) Psi_n(sqrt(beta/hbar) Q)`.
    PlaneWave { n: usize, k: f64 },
    /// `delta(Qbar - k'/beta) Psi_n(sqrt(beta/hbar) Q)`.
    DeltaLine { n: usize, kprime: f64 },
    /// Must decay within the quadrature box in both arguments.
    Custom(CustomInput),
}

impl TransformInput {
    fn level(&self) -> usize {
        match self {
            TransformInput::PlaneWave { n, .. } | TransformInput::DeltaLine { n, .. } => *n,
            TransformInput::Custom(_) => 0,
        }
    }

    /// Closed-form limit, where one exists.
    pub fn analytic(&self, params: &PhysicalParams, x: f64, y: f64) -> Option<Complex64> {
        match self {
            TransformInput::PlaneWave { n, k } => Some(transform_planewave(params, *n, *k, x, y)),
            TransformInput::DeltaLine { n, kprime } => Some(transform_delta(params, *n, *kprime, x, y)),
            TransformInput::Custom(_) => None,
        }
    }
}

/// Regulator widths and quadrature resolution for [`transform_numeric`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RegulatorSchedule {
    /// Strictly decreasing, at least three. The plane-wave regulator is
    /// `exp(-eps^2 Qbar^2 / 2 l^2)`; the delta line becomes a Gaussian of
    /// width `eps l`.
    pub epsilons: Vec<f64>,
    /// Half-width of the `Q` box in magnetic lengths; `None` picks
    /// `max(8, sqrt(2n + 1) + 6)`.
    pub half_width: Option<f64>,
    /// Nodes per magnetic length along directions without a finer
    /// resolution requirement.
    pub nodes_per_unit: usize,
}

impl Default for RegulatorSchedule {
    fn default() -> Self {
        Self {
            epsilons: vec![0.4, 0.2, 0.1, 0.05],
            half_width: None,
            nodes_per_unit: 16,
        }
    }
}

impl RegulatorSchedule {
    pub fn validate(&self) -> Result<()> {
        if self.epsilons.len() < 3 {
            return domain("regulator schedule needs at least three epsilons");
        }
        if self.epsilons.iter().any(|e| !(e.is_finite() && *e > 0.0)) {
            return domain("regulator epsilons must be positive and finite");
        }
        if self.epsilons.windows(2).any(|w| w[1] >= w[0]) {
            return domain("regulator epsilons must be strictly decreasing");
        }
        if let Some(h) = self.half_width {
            if !(h.is_finite() && h > 0.0) {
                return domain("quadrature half-width must be positive");
            }
        }
        if self.nodes_per_unit < 2 {
            return domain("nodes_per_unit must be >= 2");
        }
        Ok(())
    }

    /// Box half-width in magnetic lengths for level `n`.
    pub fn reach(&self, n: usize) -> f64 {
        self.half_width
            .unwrap_or_else(|| 8.0f64.max(((2 * n + 1) as f64).sqrt() + 6.0))
    }
}

/// Extrapolated transform value with its spread and the raw regulated
/// sequence `(eps, value)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TransformEstimate {
    pub value: Complex64,
    pub error: f64,
    pub sequence: Vec<(f64, Complex64)>,
}

/// Regulated quadrature at every schedule point, extrapolated to zero
/// regulator.
pub fn transform_numeric(
    params: &PhysicalParams,
    input: &TransformInput,
    x: f64,
    y: f64,
    schedule: &RegulatorSchedule,
) -> Result<TransformEstimate> {
    schedule.validate()?;
    let sequence: Vec<(f64, Complex64)> = schedule
        .epsilons
        .iter()
        .map(|&eps| (eps, regulated(params, input, x, y, eps, schedule)))
        .collect();
    // Natural size of the transform: hbar for inputs of unit height, |C_n|
    // for the delta line. Near a node of the output the sequence itself is
    // pure rounding, so this sets the noise floor.
    let typical = match input {
        TransformInput::DeltaLine { n, .. } => delta_constant(params, *n).norm(),
        _ => params.hbar(),
    };
    check_monotone(&sequence, 1e-10 * typical)?;
    let all = extrapolate_to_zero(&sequence);
    let fewer = extrapolate_to_zero(&sequence[1..]);
    Ok(TransformEstimate {
        value: all,
        error: (all - fewer).norm(),
        sequence,
    })
}

/// Fails unless successive increments of the sequence shrink, up to
/// rounding noise of `1e-12` times the largest term or `floor`, whichever
/// is larger.
fn check_monotone(sequence: &[(f64, Complex64)], floor: f64) -> Result<()> {
    let scale = sequence.iter().fold(0.0f64, |m, (_, v)| m.max(v.norm()));
    let steps: Vec<f64> = sequence.windows(2).map(|w| (w[1].1 - w[0].1).norm()).collect();
    let noise = (1e-12 * scale).max(floor);
    if steps.windows(2).any(|w| w[1] > w[0] + noise) {
        return Err(LandauError::Divergence {
            sequence: sequence.to_vec(),
        });
    }
    Ok(())
}

/// Neville extrapolation in `eps^2` to `eps = 0`.
fn extrapolate_to_zero(seq: &[(f64, Complex64)]) -> Complex64 {
    let t: Vec<f64> = seq.iter().map(|(e, _)| e * e).collect();
    let mut p: Vec<Complex64> = seq.iter().map(|(_, v)| *v).collect();
    let m = p.len();
    for level in 1..m {
        for i in 0..m - level {
            let (ti, tj) = (t[i], t[i + level]);
            p[i] = (p[i + 1] * ti - p[i] * tj) / (ti - tj);
        }
    }
    p[0]
}

/// Uniform trapezoid nodes `a, a + h, ..., b` with `h <= max_step`.
fn nodes(a: f64, b: f64, max_step: f64) -> (f64, f64, usize) {
    let count = (((b - a) / max_step).ceil() as usize).max(2) + 1;
    (a, (b - a) / (count - 1) as f64, count)
}

/// Nested trapezoid over `Q` (outer, parallel) and `Qbar` (inner). Each
/// outer node's partial sum is computed independently and the partial
/// sums are added in index order.
fn nested_trapezoid<F>(q: (f64, f64, usize), qbar: (f64, f64, usize), f: F) -> Complex64
where
    F: Fn(f64, f64) -> Complex64 + Sync,
{
    let (q0, hq, nq) = q;
    let (b0, hb, nb) = qbar;
    let edge = |i: usize, n: usize| if i == 0 || i + 1 == n { 0.5 } else { 1.0 };
    let partial: Vec<Complex64> = (0..nq)
        .into_par_iter()
        .map(|i| {
            let qv = q0 + i as f64 * hq;
            let mut s = Complex64::new(0.0, 0.0);
            for j in 0..nb {
                s += f(qv, b0 + j as f64 * hb) * edge(j, nb);
            }
            s * edge(i, nq)
        })
        .collect();
    partial.iter().sum::<Complex64>() * (hq * hb)
}

fn regulated(
    params: &PhysicalParams,
    input: &TransformInput,
    x: f64,
    y: f64,
    eps: f64,
    schedule: &RegulatorSchedule,
) -> Complex64 {
    let l = params.mag_length();
    let a = params.inverse_length();
    let beta_hbar = params.beta() / params.hbar();
    let reach = schedule.reach(input.level()) * l;
    let fine = l / schedule.nodes_per_unit as f64;
    let damp = |qb: f64| (-0.5 * eps * eps * qb * qb / (l * l)).exp();
    match input {
        TransformInput::PlaneWave { n, k } => {
            // Inner integrand: Gaussian envelope of width l/eps times a
            // phase of frequency at most omega.
            let omega = beta_hbar * (reach + y.abs()) + k.abs() / params.hbar();
            let hb = PI / (omega + 9.0 * eps / l);
            let qb_max = 9.0 * l / eps;
            // The Qbar sum leaves a Gaussian of width eps l in Q.
            let q = nodes(-reach, reach, fine.min(0.5 * eps * l));
            let qb = nodes(-qb_max, qb_max, hb);
            nested_trapezoid(q, qb, |qv, qbv| {
                mq_kernel(params, qv, qbv, x, y)
                    * Complex64::from_polar(psi_n(*n, a * qv) * damp(qbv), k * qbv / params.hbar())
            })
        }
        TransformInput::DeltaLine { n, kprime } => {
            let sigma = eps * l;
            let center = kprime / params.beta();
            let omega = beta_hbar * (reach + y.abs());
            let hb = PI / (omega + 9.0 / sigma);
            let q = nodes(-reach, reach, fine);
            let qb = nodes(center - 9.0 * sigma, center + 9.0 * sigma, hb);
            let norm = 1.0 / (sigma * (2.0 * PI).sqrt());
            nested_trapezoid(q, qb, |qv, qbv| {
                let d = (qbv - center) / sigma;
                mq_kernel(params, qv, qbv, x, y) * (psi_n(*n, a * qv) * norm * (-0.5 * d * d).exp())
            })
        }
        TransformInput::Custom(f) => {
            let q = nodes(-reach, reach, fine);
            nested_trapezoid(q, q, |qv, qbv| mq_kernel(params, qv, qbv, x, y) * f.eval(qv, qbv) * damp(qbv))
        }
    }
}

/// Unregulated quadrature of an absolutely integrable input over the box
/// `[-reach l, reach l]^2` with `nodes_per_unit` nodes per magnetic length.
pub fn transform_direct(
    params: &PhysicalParams,
    f: &CustomInput,
    x: f64,
    y: f64,
    reach: f64,
    nodes_per_unit: usize,
) -> Result<Complex64> {
    if !(reach > 0.0) || nodes_per_unit < 2 {
        return domain("reach must be positive and nodes_per_unit >= 2");
    }
    let l = params.mag_length();
    let q = nodes(-reach * l, reach * l, l / nodes_per_unit as f64);
    Ok(nested_trapezoid(q, q, |qv, qbv| mq_kernel(params, qv, qbv, x, y) * f.eval(qv, qbv)))
}

/// The 5x5 grid of probe points spanning `[-2 l, 2 l]^2`.
pub fn probe_grid(params: &PhysicalParams) -> Vec<(f64, f64)> {
    let l = params.mag_length();
    let ticks: Vec<f64> = (0..5).map(|i| (-2.0 + i as f64) * l).collect();
    ticks
        .iter()
        .flat_map(|&x| ticks.iter().map(move |&y| (x, y)))
        .collect()
}

#[cfg(test)]
mod tests;
