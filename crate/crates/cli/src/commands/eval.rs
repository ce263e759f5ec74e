use landau_core::mqtransform::delta_constant;
use landau_core::operators::eigen_residual;
use landau_core::physcore::field_norm;
use landau_core::{ComplexField, NonFreeCoefficients, QuantumNumbers, Wavefunction};

use crate::config::complex;
use crate::error::CliError;
use crate::manifest::Run;
use crate::output::{write_density_png, write_field_csv};

pub fn run(run: &mut Run) -> Result<bool, CliError> {
    let s = run.settings().clone();
    let e = s.eval;
    let n = e.n.ok_or_else(|| CliError::Usage("the level --n is required".into()))?;
    let params = s.params()?;
    let grid = s.grid()?;
    let qn = QuantumNumbers::new(n, e.k, e.kprime).map_err(|err| CliError::Usage(err.to_string()))?;
    let wf = if e.nonfree {
        let coeffs = NonFreeCoefficients::new(complex(e.c_plane), complex(e.c_delta))
            .map_err(|err| CliError::Usage(err.to_string()))?;
        Wavefunction::NonFree { qn, coeffs }
    } else {
        Wavefunction::Landau { n, k: e.k }
    };
    for w in wf.center_warnings(&params, s.gauge, &grid) {
        run.warn(w);
    }

    let field = wf.sample(&params, s.gauge, grid)?;
    let energy = params.landau_level(n);
    run.derive("energy", energy);
    run.derive("max_abs2", field.values().iter().map(|v| v.norm_sqr()).fold(0.0, f64::max));
    run.derive("norm", field_norm(&field));
    if e.nonfree {
        let c = delta_constant(&params, n);
        run.derive("c_n", [c.re, c.im]);
    }
    match eigen_residual(&params, s.gauge, &field, energy) {
        Ok(r) => run.derive("eigen_residual", r),
        Err(err) => run.warn(format!("eigen residual unavailable: {err}")),
    }

    run.record_output("field.csv");
    write_field_csv(&run.path("field.csv"), &field)?;

    if e.heatmap {
        run.record_output("density.png");
        if let Wavefunction::NonFree { qn, coeffs } = wf {
            let plane = Wavefunction::Landau { n, k: qn.k }.sample(&params, s.gauge, grid)?;
            let delta = Wavefunction::NonFreeTerm { n, kprime: qn.kprime }.sample(&params, s.gauge, grid)?;
            let plane = plane.scale(coeffs.c_plane);
            let delta = delta.scale(coeffs.c_delta);
            let panels: [&ComplexField; 3] = [&plane, &delta, &field];
            write_density_png(&run.path("density.png"), &panels)?;
        } else {
            write_density_png(&run.path("density.png"), &[&field])?;
        }
    }
    Ok(true)
}
