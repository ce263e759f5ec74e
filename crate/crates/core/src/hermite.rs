//! Normalized harmonic-oscillator eigenfunctions and Gauss-Hermite rules.
//!
//! `psi_n` uses the three-term recurrence on the normalized functions
//! themselves, so magnitudes stay near one for any level and the raw
//! Hermite polynomials (which overflow near degree 150) never appear.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Arc, OnceLock, RwLock};

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{domain, LandauError, Result};

pub const MAX_ORDER: usize = 200;

/// Beyond this |s| the Gaussian seed exp(-s^2/2) is below the smallest
/// normal double and the eigenfunction is reported as exactly 0.
const UNDERFLOW_S: f64 = 37.62;

/// Normalized eigenfunction of `-f'' + s^2 f = (2n + 1) f`, with parity
/// `(-1)^n` and unit L2 norm on the real line.
pub fn psi_n(n: usize, s: f64) -> f64 {
    if !(s.abs() < UNDERFLOW_S) {
        return 0.0;
    }
    let seed = PI.powf(-0.25) * (-0.5 * s * s).exp();
    if n == 0 {
        return seed;
    }
    let mut prev = seed;
    let mut cur = 2f64.sqrt() * s * seed;
    for j in 1..n {
        let jf = j as f64;
        let next = (2.0 / (jf + 1.0)).sqrt() * s * cur - (jf / (jf + 1.0)).sqrt() * prev;
        prev = cur;
        cur = next;
    }
    cur
}

/// `Psi_0(s) .. Psi_n(s)` in one pass.
pub fn psi_all(n: usize, s: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(n + 1);
    if !(s.abs() < UNDERFLOW_S) {
        out.resize(n + 1, 0.0);
        return out;
    }
    out.push(PI.powf(-0.25) * (-0.5 * s * s).exp());
    if n >= 1 {
        out.push(2f64.sqrt() * s * out[0]);
    }
    for j in 1..n {
        let jf = j as f64;
        let next = (2.0 / (jf + 1.0)).sqrt() * s * out[j] - (jf / (jf + 1.0)).sqrt() * out[j - 1];
        out.push(next);
    }
    out
}

/// Signed-level entry point for callers that receive untrusted input.
pub fn try_psi_n(n: i64, s: f64) -> Result<f64> {
    if n < 0 {
        return domain(format!("oscillator level must be >= 0, got {n}"));
    }
    Ok(psi_n(n as usize, s))
}

/// Gauss-Hermite rule for the weight `exp(-s^2)`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    nodes: Vec<f64>,
    weights: Vec<f64>,
    modified: Vec<f64>,
}

impl QuadratureRule {
    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    /// Weights for `integral p(s) exp(-s^2) ds ~ sum w_i p(s_i)`.
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// `w_i exp(s_i^2)`: integrates a function that already carries its
    /// Gaussian decay, `integral f(s) ds ~ sum w~_i f(s_i)`.
    pub fn modified_weights(&self) -> &[f64] {
        &self.modified
    }

    /// `integral f(s) ds` for an `f` that decays like a Gaussian.
    pub fn integrate<T, F>(&self, f: F) -> T
    where
        T: std::iter::Sum<T>,
        F: Fn(f64) -> T,
        T: std::ops::Mul<f64, Output = T>,
    {
        self.nodes
            .iter()
            .zip(&self.modified)
            .map(|(&s, &w)| f(s) * w)
            .sum()
    }

    /// Same as [`integrate`](Self::integrate) but on nodes stretched by
    /// sqrt(2); exact for `poly(s) * exp(-s^2/2)` integrands, which is the
    /// natural decay of a single oscillator eigenfunction.
    pub fn integrate_half_gaussian<F>(&self, f: F) -> Complex64
    where
        F: Fn(f64) -> Complex64,
    {
        let stretch = 2f64.sqrt();
        self.nodes
            .iter()
            .zip(&self.modified)
            .map(|(&u, &w)| f(stretch * u) * (w * stretch))
            .sum()
    }
}

/// Builds the `order`-point rule from the eigen-decomposition of the
/// symmetric tridiagonal Jacobi matrix. Nodes are symmetrized exactly;
/// weights come from the Christoffel function evaluated with the
/// normalized recurrence, which stays accurate in the tails where the
/// eigenvector components underflow.
pub fn gauss_hermite(order: usize) -> Result<QuadratureRule> {
    if !(1..=MAX_ORDER).contains(&order) {
        return domain(format!("quadrature order must be in 1..={MAX_ORDER}, got {order}"));
    }
    let mut jacobi = DMatrix::<f64>::zeros(order, order);
    for k in 1..order {
        let off = (k as f64 / 2.0).sqrt();
        jacobi[(k, k - 1)] = off;
        jacobi[(k - 1, k)] = off;
    }
    let eig = jacobi.symmetric_eigen();
    let mut raw: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    raw.sort_by(|a, b| a.total_cmp(b));

    let mut nodes = vec![0.0; order];
    for i in 0..order {
        nodes[i] = 0.5 * (raw[i] - raw[order - 1 - i]);
    }
    if order % 2 == 1 {
        nodes[order / 2] = 0.0;
    }

    let mut modified = vec![0.0; order];
    for i in 0..order {
        // Christoffel function: 1 / sum_k p_k(s)^2 for orthonormal p_k,
        // written with Psi_k = p_k exp(-s^2/2).
        let s = nodes[i];
        let psis = psi_all(order - 1, s);
        let sum: f64 = psis.iter().map(|p| p * p).sum();
        modified[i] = 1.0 / sum;
    }
    for i in 0..order / 2 {
        let avg = 0.5 * (modified[i] + modified[order - 1 - i]);
        modified[i] = avg;
        modified[order - 1 - i] = avg;
    }
    let weights = nodes
        .iter()
        .zip(&modified)
        .map(|(s, m)| m * (-s * s).exp())
        .collect();
    Ok(QuadratureRule {
        nodes,
        weights,
        modified,
    })
}

/// Shared, lazily built rules. Lookups take a read lock; a miss builds the
/// rule outside any lock and inserts it.
pub fn cached_rule(order: usize) -> Result<Arc<QuadratureRule>> {
    static TABLE: OnceLock<RwLock<HashMap<usize, Arc<QuadratureRule>>>> = OnceLock::new();
    let table = TABLE.get_or_init(|| RwLock::new(HashMap::new()));
    if let Some(rule) = table.read().expect("rule table poisoned").get(&order) {
        return Ok(rule.clone());
    }
    let rule = Arc::new(gauss_hermite(order)?);
    let mut w = table.write().expect("rule table poisoned");
    Ok(w.entry(order).or_insert(rule).clone())
}

/// `(1 / sqrt(2 pi)) integral Psi_n(s) exp(-i t s) ds` by quadrature.
///
/// The exact answer is `(-i)^n Psi_n(t)`: purely real for even `n`, purely
/// imaginary for odd `n`. The component that parity forbids is used as the
/// accuracy check.
pub fn fourier_of_psi(n: usize, t: f64, rule: &QuadratureRule) -> Result<Complex64> {
    let needed = 2 * n + 20;
    if rule.order() < needed {
        return Err(LandauError::Accuracy(format!(
            "Fourier transform of Psi_{n} needs a rule of order >= {needed}, got {}",
            rule.order()
        )));
    }
    let integral = rule.integrate_half_gaussian(|s| {
        Complex64::from_polar(psi_n(n, s), -t * s)
    });
    let value = integral / (2.0 * PI).sqrt();
    let forbidden = if n.is_multiple_of(2) { value.im } else { value.re };
    if forbidden.abs() > 1e-10 {
        return Err(LandauError::Accuracy(format!(
            "parity-forbidden component {forbidden:.3e} of the Fourier transform of Psi_{n} at t = {t}"
        )));
    }
    Ok(value)
}

/// `(-i)^n`.
pub fn minus_i_pow(n: usize) -> Complex64 {
    match n % 4 {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, -1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, 1.0),
    }
}
