//! CSV and PNG writers.
//!
//! Floats are written as `{:.16e}`: 17 significant digits, enough to
//! round-trip any `f64`.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use anyhow::Context;
use landau_core::ComplexField;

use crate::error::CliError;

pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

/// Writes a header and rows of already formatted cells.
pub fn write_csv<I>(path: &Path, header: &[&str], rows: I) -> Result<(), CliError>
where
    I: IntoIterator<Item = Vec<String>>,
{
    let file = File::create(path).with_context(|| format!("creating {}", path.display()))?;
    let mut w = BufWriter::new(file);
    let io = |e: std::io::Error| CliError::from(anyhow::Error::new(e).context(format!("writing {}", path.display())));
    writeln!(w, "{}", header.join(",")).map_err(io)?;
    for row in rows {
        writeln!(w, "{}", row.join(",")).map_err(io)?;
    }
    w.flush().map_err(io)?;
    Ok(())
}

/// `x,y,re,im,abs2`, x-major with y fastest.
pub fn write_field_csv(path: &Path, field: &ComplexField) -> Result<(), CliError> {
    let g = *field.grid();
    let rows = (0..g.nx()).flat_map(move |i| {
        (0..g.ny()).map(move |j| {
            let v = field.at(i, j);
            vec![
                fmt_f64(g.x(i)),
                fmt_f64(g.y(j)),
                fmt_f64(v.re),
                fmt_f64(v.im),
                fmt_f64(v.norm_sqr()),
            ]
        })
    });
    write_csv(path, &["x", "y", "re", "im", "abs2"], rows)
}

/// Grayscale `|f|^2`, each panel normalized to its own maximum, panels
/// placed left to right with a one-pixel black separator. `y` increases
/// upwards.
pub fn write_density_png(path: &Path, panels: &[&ComplexField]) -> Result<(), CliError> {
    let Some(first) = panels.first() else {
        return Err(CliError::Failed("no panels to draw".into()));
    };
    let (nx, ny) = (first.grid().nx(), first.grid().ny());
    let width = panels.len() * nx + panels.len().saturating_sub(1);
    let mut img = image::GrayImage::new(width as u32, ny as u32);
    for (p, field) in panels.iter().enumerate() {
        let peak = field.values().iter().map(|v| v.norm_sqr()).fold(0.0, f64::max);
        let x0 = p * (nx + 1);
        for i in 0..nx {
            for j in 0..ny {
                let d = if peak > 0.0 { field.at(i, j).norm_sqr() / peak } else { 0.0 };
                let px = (d * 255.0).round().clamp(0.0, 255.0) as u8;
                img.put_pixel((x0 + i) as u32, (ny - 1 - j) as u32, image::Luma([px]));
            }
        }
    }
    img.save(path)
        .with_context(|| format!("writing {}", path.display()))
        .map_err(CliError::from)
}

#[cfg(test)]
mod tests {
    use super::*;
    use landau_core::{Complex64, Grid2D};

    #[test]
    fn floats_round_trip() {
        for v in [0.1, -1.0 / 3.0, 1e-300, 6.02214076e23, f64::MIN_POSITIVE] {
            assert_eq!(fmt_f64(v).parse::<f64>().unwrap(), v);
        }
    }

    #[test]
    fn field_csv_order() {
        let dir = tempfile::tempdir().unwrap();
        let grid = Grid2D::new((0.0, 7.0), (0.0, 8.0), 8, 9).unwrap();
        let f = ComplexField::from_fn(grid, Complex64::new).unwrap();
        let path = dir.path().join("field.csv");
        write_field_csv(&path, &f).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "x,y,re,im,abs2");
        assert_eq!(lines.len(), 1 + 8 * 9);
        assert!(lines[1].starts_with("0.0000000000000000e0,0.0000000000000000e0"));
        assert!(lines[2].starts_with("0.0000000000000000e0,1.0000000000000000e0"));
        assert!(lines[10].starts_with("1.0000000000000000e0,0.0000000000000000e0"));
    }

    #[test]
    fn png_has_side_by_side_panels() {
        let dir = tempfile::tempdir().unwrap();
        let grid = Grid2D::new((-1.0, 1.0), (-1.0, 1.0), 10, 8).unwrap();
        let f = ComplexField::from_fn(grid, |x, y| Complex64::new((-(x * x + y * y)).exp(), 0.0)).unwrap();
        let path = dir.path().join("density.png");
        write_density_png(&path, &[&f, &f]).unwrap();
        let img = image::open(&path).unwrap().to_luma8();
        assert_eq!(img.dimensions(), (21, 8));
    }
}
