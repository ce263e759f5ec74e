use landau_core::mqtransform::delta_constant;

use crate::error::CliError;
use crate::manifest::Run;

pub fn run(run: &mut Run) -> Result<bool, CliError> {
    let params = run.settings().params()?;
    let levels = run.settings().params.levels;
    let energies: Vec<f64> = (0..levels).map(|n| params.landau_level(n)).collect();
    let constants: Vec<[f64; 2]> = (0..levels)
        .map(|n| {
            let c = delta_constant(&params, n);
            [c.re, c.im]
        })
        .collect();
    run.derive("omega_c", params.omega_c());
    run.derive("beta", params.beta());
    run.derive("mag_length", params.mag_length());
    run.derive("cyclotron_period", params.cyclotron_period());
    run.derive("landau_levels", &energies);
    run.derive("c_n", &constants);

    if run.json() {
        return Ok(true);
    }
    println!("omega_c          {:.16e}", params.omega_c());
    println!("beta             {:.16e}", params.beta());
    println!("magnetic length  {:.16e}", params.mag_length());
    println!("cyclotron period {:.16e}", params.cyclotron_period());
    for (n, e) in energies.iter().enumerate() {
        println!("E_{n:<3}            {e:.16e}");
    }
    Ok(true)
}
