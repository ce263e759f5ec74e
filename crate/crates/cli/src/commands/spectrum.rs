use landau_core::operators::{spectrum_with, DirichletHamiltonian, SolverConfig};

use crate::error::CliError;
use crate::manifest::Run;
use crate::output::{fmt_f64, write_csv};

pub fn run(run: &mut Run) -> Result<bool, CliError> {
    let s = run.settings().clone();
    let params = s.params()?;
    let grid = s.grid()?;
    let p = s.spectrum;
    let cfg = SolverConfig {
        n_eigs: p.n_eigs,
        guard: p.guard,
        degree: p.degree,
        tol: p.tol,
        max_iter: p.max_iter,
        seed: s.seed,
    };
    let h = DirichletHamiltonian::new(params, s.gauge, grid, s.order);
    let result = spectrum_with(&h, &cfg)?;
    for w in &result.warnings {
        run.warn(w.clone());
    }
    run.derive("clusters", &result.clusters);
    run.derive("iterations", result.iterations);
    run.derive("matvecs", result.matvecs);
    run.derive("tolerance", result.tolerance);
    run.derive("hbar_omega_c", params.hbar() * params.omega_c());

    run.record_output("spectrum.csv");
    let rows = (0..result.eigenvalues.len()).map(|i| {
        vec![
            i.to_string(),
            fmt_f64(result.eigenvalues[i]),
            result.cluster_ids[i].to_string(),
            fmt_f64(result.residuals[i]),
        ]
    });
    write_csv(&run.path("spectrum.csv"), &["index", "eigenvalue", "cluster_id", "residual"], rows)?;
    Ok(true)
}
