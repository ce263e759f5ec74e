use landau_core::mqtransform::{
    delta_constant, probe_grid, transform_delta_quadrature, transform_direct, transform_numeric, CustomInput,
    TransformInput,
};
use landau_core::wavefunctions::eval_nonfree_term;
use landau_core::{Complex64, GaugeChoice, LandauError};

use crate::config::Branch;
use crate::error::CliError;
use crate::manifest::Run;
use crate::output::{fmt_f64, write_csv};

/// Probes where the delta-line reference is smaller than this are skipped
/// in the constant-ratio check.
const RATIO_FLOOR: f64 = 1e-3;

pub fn run(run: &mut Run) -> Result<bool, CliError> {
    let s = run.settings().clone();
    let params = s.params()?;
    let t = s.transform.clone();
    t.schedule.validate().map_err(|e| CliError::Usage(e.to_string()))?;
    if !(t.tolerance > 0.0) {
        return Err(CliError::Usage(format!("tolerance must be positive, got {}", t.tolerance)));
    }
    let l = params.mag_length();
    let input = match t.branch {
        Branch::PlaneWave => TransformInput::PlaneWave { n: t.n, k: t.k },
        Branch::Delta => TransformInput::DeltaLine { n: t.n, kprime: t.kprime },
        Branch::CustomGaussian => TransformInput::Custom(CustomInput::new("gaussian", move |q, qb| {
            Complex64::new((-(q * q + qb * qb) / (2.0 * l * l)).exp(), 0.0)
        })),
    };

    let probes = probe_grid(&params);
    let mut rows = Vec::with_capacity(probes.len());
    let mut worst = 0.0f64;
    let mut worst_estimate = 0.0f64;
    for &(x, y) in &probes {
        let est = match transform_numeric(&params, &input, x, y, &t.schedule) {
            Ok(e) => e,
            Err(LandauError::Divergence { sequence }) => {
                run.derive("diverged_at", [x, y]);
                run.derive("divergent_sequence", sequence.iter().map(|(e, v)| [*e, v.re, v.im]).collect::<Vec<_>>());
                return Err(CliError::Failed(format!("regulator extrapolation diverged at ({x}, {y})")));
            }
            Err(e) => return Err(e.into()),
        };
        let reference = match &input {
            TransformInput::Custom(f) => transform_direct(&params, f, x, y, 9.0, 24)?,
            other => other.analytic(&params, x, y).expect("analytic branch"),
        };
        let diff = (est.value - reference).norm();
        worst = worst.max(diff);
        worst_estimate = worst_estimate.max(est.error);
        rows.push(vec![
            fmt_f64(x),
            fmt_f64(y),
            fmt_f64(est.value.re),
            fmt_f64(est.value.im),
            fmt_f64(reference.re),
            fmt_f64(reference.im),
            fmt_f64(diff),
            fmt_f64(est.error),
        ]);
    }
    run.derive("max_abs_diff", worst);
    run.derive("max_error_estimate", worst_estimate);
    run.derive("tolerance", t.tolerance);

    if t.branch == Branch::Delta {
        let c = delta_constant(&params, t.n);
        run.derive("c_n", [c.re, c.im]);
        let mut spread = 0.0f64;
        for &(x, y) in &probes {
            let r = eval_nonfree_term(&params, GaugeChoice::LandauX, t.n, t.kprime, x, y);
            if r.norm() < RATIO_FLOOR {
                continue;
            }
            let q = transform_delta_quadrature(&params, t.n, t.kprime, x, y)?;
            spread = spread.max((q / r - c).norm());
        }
        run.derive("c_n_quadrature_spread", spread);
    }

    run.record_output("transform.csv");
    write_csv(
        &run.path("transform.csv"),
        &["x", "y", "numeric_re", "numeric_im", "reference_re", "reference_im", "abs_diff", "error_estimate"],
        rows,
    )?;
    if worst > t.tolerance {
        eprintln!("error: max |numeric - reference| = {worst:.3e} exceeds {:.1e}", t.tolerance);
        return Ok(false);
    }
    Ok(true)
}
