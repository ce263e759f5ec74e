use landau_core::dynamics::{canonical_momenta, conserved_pair, guiding_center, integrate_orbit, ClassicalState};

use crate::error::CliError;
use crate::manifest::Run;
use crate::output::{fmt_f64, write_csv};

pub fn run(run: &mut Run) -> Result<bool, CliError> {
    let s = run.settings().clone();
    let params = s.params()?;
    let o = s.orbit;
    let period = params.cyclotron_period();
    let dt = o.dt.unwrap_or(period / 1000.0);
    let s0 = ClassicalState::new(o.x0, o.y0, o.vx0, o.vy0).map_err(|e| CliError::Usage(e.to_string()))?;
    let traj = integrate_orbit(&params, s0, dt, o.steps).map_err(|e| CliError::Usage(e.to_string()))?;

    let c0 = conserved_pair(&params, &s0);
    let g0 = guiding_center(&params, &s0);
    let scale = params.mass() * s0.speed();
    let (mut d1, mut d2, mut dg) = (0.0f64, 0.0f64, 0.0f64);
    for st in &traj {
        let c = conserved_pair(&params, st);
        d1 = d1.max((c.c1 - c0.c1).abs());
        d2 = d2.max((c.c2 - c0.c2).abs());
        let g = guiding_center(&params, st);
        dg = dg.max((g.0 - g0.0).abs().max((g.1 - g0.1).abs()));
    }
    run.derive("dt", dt);
    run.derive("cyclotron_period", period);
    run.derive("radius", s0.speed() / params.omega_c());
    run.derive("guiding_center", [g0.0, g0.1]);
    run.derive("c1", c0.c1);
    run.derive("c2", c0.c2);
    run.derive("max_drift_c1", d1);
    run.derive("max_drift_c2", d2);
    run.derive("max_drift_guiding_center", dg);
    if scale > 0.0 {
        run.derive("relative_drift", (d1.max(d2)) / scale);
    }

    run.record_output("orbit.csv");
    let gauge = s.gauge;
    let rows = traj.iter().map(|st| {
        let c = conserved_pair(&params, st);
        let p = canonical_momenta(&params, gauge, st);
        [st.t, st.x, st.y, st.vx, st.vy, c.c1, c.c2, p.px, p.py]
            .iter()
            .map(|v| fmt_f64(*v))
            .collect()
    });
    write_csv(&run.path("orbit.csv"), &["t", "x", "y", "vx", "vy", "c1", "c2", "px", "py"], rows)?;
    Ok(true)
}
