//! Lowest eigenvalues of the Dirichlet-truncated Hamiltonian by
//! Chebyshev-filtered subspace iteration.
//!
//! The operator is only ever applied matrix-free. Each outer iteration
//! filters the block through a Chebyshev polynomial that damps
//! `[cut, upper]` (with `upper` a Gershgorin bound), re-orthonormalizes it
//! by Householder QR and performs a Rayleigh-Ritz step. A block larger
//! than the number of wanted eigenvalues keeps whole near-degenerate
//! clusters inside the subspace.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::stencil::StencilOrder;
use crate::error::{domain, LandauError, Result};
use crate::physcore::{GaugeChoice, Grid2D, ParamInputs, PhysicalParams};

/// The Hamiltonian restricted to interior grid nodes with zero values on
/// and beyond the boundary.
#[derive(Debug, Clone)]
pub struct DirichletHamiltonian {
    params: PhysicalParams,
    gauge: GaugeChoice,
    grid: Grid2D,
    order: StencilOrder,
    break_gauge: bool,
    xs: Vec<f64>,
    ys: Vec<f64>,
}

impl DirichletHamiltonian {
    pub fn new(params: PhysicalParams, gauge: GaugeChoice, grid: Grid2D, order: StencilOrder) -> Self {
        let xs = (1..grid.nx() - 1).map(|i| grid.x(i)).collect();
        let ys = (1..grid.ny() - 1).map(|j| grid.y(j)).collect();
        Self {
            params,
            gauge,
            grid,
            order,
            break_gauge: false,
            xs,
            ys,
        }
    }

    pub fn with_broken_gauge(mut self, broken: bool) -> Self {
        self.break_gauge = broken;
        self
    }

    pub fn dim(&self) -> usize {
        self.xs.len() * self.ys.len()
    }

    pub fn grid(&self) -> &Grid2D {
        &self.grid
    }

    fn kinetic(&self) -> f64 {
        -self.params.hbar() * self.params.hbar() / (2.0 * self.params.mass())
    }

    fn cross(&self) -> Complex64 {
        let sign = if self.break_gauge { -1.0 } else { 1.0 };
        let c = Complex64::new(0.0, self.params.hbar() * self.params.beta() / self.params.mass());
        match self.gauge {
            GaugeChoice::LandauX => c * sign,
            GaugeChoice::LandauY => -c * sign,
        }
    }

    fn potential_coef(&self) -> f64 {
        self.params.beta() * self.params.beta() / (2.0 * self.params.mass())
    }

    /// Gershgorin upper bound on the spectrum.
    pub fn upper_bound(&self) -> f64 {
        let (hx, hy) = (self.grid.hx(), self.grid.hy());
        let o = self.order;
        let kin = self.kinetic().abs() * o.second_abs_sum() * (1.0 / (hx * hx) + 1.0 / (hy * hy));
        let coord_max = |v: &[f64]| v.iter().fold(0.0f64, |a, b| a.max(b.abs()));
        let (lever, h) = match self.gauge {
            GaugeChoice::LandauX => (coord_max(&self.ys), hx),
            GaugeChoice::LandauY => (coord_max(&self.xs), hy),
        };
        let cross = self.cross().norm() * lever * o.first_abs_sum() / h;
        let pot = self.potential_coef() * lever * lever;
        kin + cross + pot
    }

    /// `out = H v`.
    pub fn apply(&self, v: &[Complex64], out: &mut [Complex64]) {
        let (mx, my) = (self.xs.len(), self.ys.len());
        assert_eq!(v.len(), mx * my);
        assert_eq!(out.len(), mx * my);
        let w = self.order.half_width() as isize;
        let c1 = self.order.first();
        let c2 = self.order.second();
        let kin_x = self.kinetic() / (self.grid.hx() * self.grid.hx());
        let kin_y = self.kinetic() / (self.grid.hy() * self.grid.hy());
        let cross = self.cross();
        let pot = self.potential_coef();
        let ihx = 1.0 / self.grid.hx();
        let ihy = 1.0 / self.grid.hy();
        let (mxi, myi) = (mx as isize, my as isize);
        let zero = Complex64::new(0.0, 0.0);
        for ii in 0..mxi {
            let x = self.xs[ii as usize];
            for jj in 0..myi {
                let y = self.ys[jj as usize];
                let p = (ii * myi + jj) as usize;
                let at = |a: isize, b: isize| -> Complex64 {
                    if a < 0 || a >= mxi || b < 0 || b >= myi {
                        zero
                    } else {
                        v[(a * myi + b) as usize]
                    }
                };
                let mut sxx = v[p] * c2[0];
                let mut syy = v[p] * c2[0];
                for k in 1..=w {
                    let c = c2[k as usize];
                    sxx += (at(ii + k, jj) + at(ii - k, jj)) * c;
                    syy += (at(ii, jj + k) + at(ii, jj - k)) * c;
                }
                let (d1, lever) = match self.gauge {
                    GaugeChoice::LandauX => {
                        let mut s = zero;
                        for k in 1..=w {
                            s += (at(ii + k, jj) - at(ii - k, jj)) * c1[(k - 1) as usize];
                        }
                        (s * ihx, y)
                    }
                    GaugeChoice::LandauY => {
                        let mut s = zero;
                        for k in 1..=w {
                            s += (at(ii, jj + k) - at(ii, jj - k)) * c1[(k - 1) as usize];
                        }
                        (s * ihy, x)
                    }
                };
                out[p] = sxx * kin_x + syy * kin_y + cross * lever * d1 + v[p] * (pot * lever * lever);
            }
        }
    }
}

/// Knobs of the subspace iteration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub n_eigs: usize,
    /// Extra block vectors beyond `n_eigs`; `None` picks `max(16, n_eigs/2)`.
    pub guard: Option<usize>,
    /// Chebyshev filter degree per outer iteration.
    pub degree: usize,
    /// Residual tolerance in units of `hbar omega_c`.
    pub tol: f64,
    pub max_iter: usize,
    pub seed: u64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            n_eigs: 48,
            guard: None,
            degree: 40,
            tol: 1e-6,
            max_iter: 60,
            seed: 0,
        }
    }
}

impl SolverConfig {
    pub fn block_size(&self) -> usize {
        self.n_eigs + self.guard.unwrap_or((self.n_eigs / 2).max(16))
    }
}

/// Near-degenerate eigenvalues reported together.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Cluster {
    pub id: usize,
    pub center: f64,
    pub multiplicity: usize,
    pub first_index: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectrumResult {
    pub eigenvalues: Vec<f64>,
    pub residuals: Vec<f64>,
    pub cluster_ids: Vec<usize>,
    pub clusters: Vec<Cluster>,
    /// Absolute residual tolerance (energy units).
    pub tolerance: f64,
    pub iterations: usize,
    pub matvecs: usize,
    pub grid: Grid2D,
    pub params: ParamInputs,
    pub gauge: GaugeChoice,
    pub seed: u64,
    pub warnings: Vec<String>,
}

impl SpectrumResult {
    /// Number of eigenvalues within `window` of `target`.
    pub fn count_near(&self, target: f64, window: f64) -> usize {
        self.eigenvalues
            .iter()
            .filter(|e| (*e - target).abs() <= window)
            .count()
    }
}

/// Groups sorted eigenvalues: neighbours closer than `gap` share a cluster.
pub fn cluster_eigenvalues(values: &[f64], gap: f64) -> (Vec<usize>, Vec<Cluster>) {
    let mut ids = Vec::with_capacity(values.len());
    let mut clusters: Vec<Cluster> = Vec::new();
    let mut sum = 0.0;
    for (i, &v) in values.iter().enumerate() {
        let new = i == 0 || (v - values[i - 1]).abs() > gap;
        if new {
            if let Some(c) = clusters.last_mut() {
                c.center = sum / c.multiplicity as f64;
            }
            clusters.push(Cluster {
                id: clusters.len(),
                center: 0.0,
                multiplicity: 0,
                first_index: i,
            });
            sum = 0.0;
        }
        let c = clusters.last_mut().expect("cluster exists");
        c.multiplicity += 1;
        sum += v;
        ids.push(c.id);
    }
    if let Some(c) = clusters.last_mut() {
        c.center = sum / c.multiplicity as f64;
    }
    (ids, clusters)
}

/// The `n_eigs` lowest Landau-Hamiltonian eigenvalues on `grid` with
/// default solver settings and fourth-order stencils.
pub fn spectrum(
    params: &PhysicalParams,
    gauge: GaugeChoice,
    grid: Grid2D,
    n_eigs: usize,
    seed: u64,
) -> Result<SpectrumResult> {
    let h = DirichletHamiltonian::new(*params, gauge, grid, StencilOrder::Fourth);
    let cfg = SolverConfig {
        n_eigs,
        seed,
        ..SolverConfig::default()
    };
    spectrum_with(&h, &cfg)
}

pub fn spectrum_with(h: &DirichletHamiltonian, cfg: &SolverConfig) -> Result<SpectrumResult> {
    let n = h.dim();
    let b = cfg.block_size();
    if cfg.n_eigs == 0 {
        return domain("n_eigs must be >= 1");
    }
    if b > n {
        return domain(format!("block size {b} exceeds the problem dimension {n}"));
    }
    if cfg.degree < 2 || !(cfg.tol > 0.0) || cfg.max_iter == 0 {
        return domain("degree must be >= 2, tol > 0 and max_iter >= 1");
    }
    let params = h.params;
    let tol = cfg.tol * params.hbar() * params.omega_c();

    let mut warnings = Vec::new();
    let g = h.grid();
    let half = 0.5 * (g.x_bounds().1 - g.x_bounds().0).min(g.y_bounds().1 - g.y_bounds().0);
    if half < 8.0 * params.mag_length() {
        warnings.push(format!(
            "domain half-width {half} is below 8 magnetic lengths ({}); hard walls will shift levels",
            8.0 * params.mag_length()
        ));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut v = DMatrix::<Complex64>::from_fn(n, b, |_, _| {
        Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)
    });
    v = v.qr().q();

    let upper = h.upper_bound();
    let mut matvecs = 0usize;
    let (mut theta, mut v, mut w) = rayleigh_ritz(h, v, &mut matvecs);
    let mut residuals = ritz_residuals(&v, &w, &theta, cfg.n_eigs);

    let mut iterations = 0;
    while iterations < cfg.max_iter && !converged(&residuals, tol) {
        iterations += 1;
        let cut = theta[b - 1];
        let low = theta[0];
        if !(cut < upper) {
            return domain("Ritz values exceed the Gershgorin bound");
        }
        chebyshev_filter(h, &mut v, cfg.degree, cut, upper, low, &mut matvecs);
        let q = v.qr().q();
        let rr = rayleigh_ritz(h, q, &mut matvecs);
        theta = rr.0;
        v = rr.1;
        w = rr.2;
        residuals = ritz_residuals(&v, &w, &theta, cfg.n_eigs);
    }

    if !converged(&residuals, tol) {
        let worst = residuals.iter().fold(0.0f64, |a, &r| a.max(r));
        return Err(LandauError::Solver {
            iterations,
            tolerance: tol,
            worst_residual: worst,
            residuals,
        });
    }

    let eigenvalues: Vec<f64> = theta[..cfg.n_eigs].to_vec();
    let (cluster_ids, clusters) = cluster_eigenvalues(&eigenvalues, 10.0 * tol);
    Ok(SpectrumResult {
        eigenvalues,
        residuals,
        cluster_ids,
        clusters,
        tolerance: tol,
        iterations,
        matvecs,
        grid: *g,
        params: ParamInputs::from(&params),
        gauge: h.gauge,
        seed: cfg.seed,
        warnings,
    })
}

fn converged(res: &[f64], tol: f64) -> bool {
    res.iter().all(|&r| r < tol)
}

/// Applies `H` to every column; columns are independent so the parallel
/// map is deterministic.
fn apply_block(h: &DirichletHamiltonian, v: &DMatrix<Complex64>, matvecs: &mut usize) -> DMatrix<Complex64> {
    let n = v.nrows();
    let mut w = DMatrix::<Complex64>::zeros(n, v.ncols());
    w.as_mut_slice()
        .par_chunks_mut(n)
        .zip(v.as_slice().par_chunks(n))
        .for_each(|(out, col)| h.apply(col, out));
    *matvecs += v.ncols();
    w
}

/// Returns ascending Ritz values with the rotated basis `V Y` and `H V Y`.
fn rayleigh_ritz(
    h: &DirichletHamiltonian,
    v: DMatrix<Complex64>,
    matvecs: &mut usize,
) -> (Vec<f64>, DMatrix<Complex64>, DMatrix<Complex64>) {
    let w = apply_block(h, &v, matvecs);
    let g = v.ad_mul(&w);
    let g = (&g + g.adjoint()) * Complex64::new(0.5, 0.0);
    let eig = g.symmetric_eigen();
    let mut idx: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    idx.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let theta: Vec<f64> = idx.iter().map(|&i| eig.eigenvalues[i]).collect();
    let y = DMatrix::from_fn(eig.eigenvectors.nrows(), idx.len(), |r, c| eig.eigenvectors[(r, idx[c])]);
    (theta, &v * &y, &w * &y)
}

fn ritz_residuals(v: &DMatrix<Complex64>, w: &DMatrix<Complex64>, theta: &[f64], k: usize) -> Vec<f64> {
    let n = v.nrows();
    (0..k)
        .map(|j| {
            let vc = &v.as_slice()[j * n..(j + 1) * n];
            let wc = &w.as_slice()[j * n..(j + 1) * n];
            let s: f64 = vc
                .iter()
                .zip(wc)
                .map(|(a, b)| (b - a * theta[j]).norm_sqr())
                .sum();
            s.sqrt()
        })
        .collect()
}

/// Scaled Chebyshev filter damping `[cut, upper]`, normalized at `low`.
fn chebyshev_filter(
    h: &DirichletHamiltonian,
    v: &mut DMatrix<Complex64>,
    degree: usize,
    cut: f64,
    upper: f64,
    low: f64,
    matvecs: &mut usize,
) {
    let n = v.nrows();
    let e = 0.5 * (upper - cut);
    let c = 0.5 * (upper + cut);
    let sigma1 = e / (low - c);
    let tau = 2.0 / sigma1;
    v.as_mut_slice().par_chunks_mut(n).for_each(|x| {
        let mut hx = vec![Complex64::new(0.0, 0.0); n];
        let mut prev = x.to_vec();
        h.apply(&prev, &mut hx);
        let mut cur: Vec<Complex64> = hx
            .iter()
            .zip(&prev)
            .map(|(a, b)| (a - b * c) * (sigma1 / e))
            .collect();
        let mut sigma = sigma1;
        for _ in 2..=degree {
            let sigma_new = 1.0 / (tau - sigma);
            h.apply(&cur, &mut hx);
            let a = 2.0 * sigma_new / e;
            let bcoef = sigma * sigma_new;
            for ((p, hc), cc) in prev.iter_mut().zip(&hx).zip(&cur) {
                *p = (hc - cc * c) * a - *p * bcoef;
            }
            std::mem::swap(&mut prev, &mut cur);
            sigma = sigma_new;
        }
        x.copy_from_slice(&cur);
    });
    *matvecs += degree * v.ncols();
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn clustering_groups_neighbours() {
        let v = [0.5, 0.5 + 1e-7, 0.5 + 2e-7, 0.9, 1.5, 1.5 + 5e-8];
        let (ids, cl) = cluster_eigenvalues(&v, 1e-5);
        assert_eq!(ids, vec![0, 0, 0, 1, 2, 2]);
        assert_eq!(cl.len(), 3);
        assert_eq!(cl[0].multiplicity, 3);
        assert_eq!(cl[2].first_index, 4);
        assert!((cl[0].center - (0.5 + 1e-7)).abs() < 1e-15);
    }

    #[test]
    fn dirichlet_operator_is_hermitian() {
        let p = PhysicalParams::natural();
        let g = Grid2D::square(-3.0, 3.0, 13).unwrap();
        for gauge in [GaugeChoice::LandauX, GaugeChoice::LandauY] {
            let h = DirichletHamiltonian::new(p, gauge, g, StencilOrder::Fourth);
            let n = h.dim();
            let mut dense = DMatrix::<Complex64>::zeros(n, n);
            let mut e = vec![Complex64::new(0.0, 0.0); n];
            let mut out = vec![Complex64::new(0.0, 0.0); n];
            for j in 0..n {
                e.iter_mut().for_each(|z| *z = Complex64::new(0.0, 0.0));
                e[j] = Complex64::new(1.0, 0.0);
                h.apply(&e, &mut out);
                for i in 0..n {
                    dense[(i, j)] = out[i];
                }
            }
            let defect = (&dense - dense.adjoint()).camax();
            assert!(defect < 1e-12, "{gauge:?}: {defect}");
            let eig = dense.clone().symmetric_eigen();
            let top = eig.eigenvalues.iter().fold(f64::MIN, |a, &b| a.max(b));
            assert!(top <= h.upper_bound());
        }
    }

    #[test]
    fn matches_dense_diagonalization_on_small_grid() {
        // Oracle: dense Hermitian eigen-decomposition of the same operator.
        let p = PhysicalParams::natural();
        let g = Grid2D::square(-4.0, 4.0, 21).unwrap();
        let h = DirichletHamiltonian::new(p, GaugeChoice::LandauX, g, StencilOrder::Fourth);
        let n = h.dim();
        let mut dense = DMatrix::<Complex64>::zeros(n, n);
        let mut e = vec![Complex64::new(0.0, 0.0); n];
        let mut out = vec![Complex64::new(0.0, 0.0); n];
        for j in 0..n {
            e.iter_mut().for_each(|z| *z = Complex64::new(0.0, 0.0));
            e[j] = Complex64::new(1.0, 0.0);
            h.apply(&e, &mut out);
            for i in 0..n {
                dense[(i, j)] = out[i];
            }
        }
        let mut exact: Vec<f64> = dense.symmetric_eigen().eigenvalues.iter().copied().collect();
        exact.sort_by(|a, b| a.total_cmp(b));
        let cfg = SolverConfig {
            n_eigs: 10,
            tol: 1e-8,
            seed: 3,
            ..SolverConfig::default()
        };
        let r = spectrum_with(&h, &cfg).unwrap();
        for (a, b) in r.eigenvalues.iter().zip(&exact) {
            assert!((a - b).abs() < 1e-8, "{a} vs {b}");
        }
        assert!(r.residuals.iter().all(|&x| x < 1e-8));
    }

    #[test]
    fn rejects_oversized_block() {
        let p = PhysicalParams::natural();
        let g = Grid2D::square(-1.0, 1.0, 8).unwrap();
        let h = DirichletHamiltonian::new(p, GaugeChoice::LandauX, g, StencilOrder::Fourth);
        let cfg = SolverConfig {
            n_eigs: 30,
            ..SolverConfig::default()
        };
        assert!(spectrum_with(&h, &cfg).is_err());
    }

    #[test]
    fn iteration_cap_reports_residuals() {
        let p = PhysicalParams::natural();
        let g = Grid2D::square(-6.0, 6.0, 49).unwrap();
        let h = DirichletHamiltonian::new(p, GaugeChoice::LandauX, g, StencilOrder::Fourth);
        let cfg = SolverConfig {
            n_eigs: 8,
            max_iter: 1,
            degree: 2,
            tol: 1e-12,
            ..SolverConfig::default()
        };
        match spectrum_with(&h, &cfg) {
            Err(LandauError::Solver { residuals, .. }) => assert_eq!(residuals.len(), 8),
            other => panic!("expected solver error, got {other:?}"),
        }
    }
}
