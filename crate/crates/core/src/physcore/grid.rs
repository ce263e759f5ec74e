use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};

pub const MIN_POINTS: usize = 8;

/// Uniform tensor grid on `[x_min, x_max] x [y_min, y_max]`, both
/// endpoints included.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "GridSpec", into = "GridSpec")]
pub struct Grid2D {
    x_min: f64,
    x_max: f64,
    y_min: f64,
    y_max: f64,
    nx: usize,
    ny: usize,
    hx: f64,
    hy: f64,
}

/// Serialized form of a grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub x_min: f64,
    pub x_max: f64,
    pub nx: usize,
    pub y_min: f64,
    pub y_max: f64,
    pub ny: usize,
}

impl TryFrom<GridSpec> for Grid2D {
    type Error = crate::LandauError;
    fn try_from(s: GridSpec) -> Result<Self> {
        Grid2D::new((s.x_min, s.x_max), (s.y_min, s.y_max), s.nx, s.ny)
    }
}

impl From<Grid2D> for GridSpec {
    fn from(g: Grid2D) -> Self {
        GridSpec {
            x_min: g.x_min,
            x_max: g.x_max,
            nx: g.nx,
            y_min: g.y_min,
            y_max: g.y_max,
            ny: g.ny,
        }
    }
}

impl Grid2D {
    pub fn new(x_bounds: (f64, f64), y_bounds: (f64, f64), nx: usize, ny: usize) -> Result<Self> {
        let (x_min, x_max) = x_bounds;
        let (y_min, y_max) = y_bounds;
        if ![x_min, x_max, y_min, y_max].iter().all(|v| v.is_finite()) {
            return domain("grid bounds must be finite");
        }
        if x_max <= x_min || y_max <= y_min {
            return domain(format!(
                "degenerate grid bounds [{x_min}, {x_max}] x [{y_min}, {y_max}]"
            ));
        }
        if nx < MIN_POINTS || ny < MIN_POINTS {
            return domain(format!("grid needs at least {MIN_POINTS} points per axis, got {nx} x {ny}"));
        }
        Ok(Self {
            x_min,
            x_max,
            y_min,
            y_max,
            nx,
            ny,
            hx: (x_max - x_min) / (nx - 1) as f64,
            hy: (y_max - y_min) / (ny - 1) as f64,
        })
    }

    /// `[min, max]^2` with `n` points per axis.
    pub fn square(min: f64, max: f64, n: usize) -> Result<Self> {
        Self::new((min, max), (min, max), n, n)
    }

    /// Square grid `[-half, half]^2` whose spacing is `h` (rounded so that
    /// `2 half / h` is an integer number of cells).
    pub fn square_with_spacing(half: f64, h: f64) -> Result<Self> {
        if !(h > 0.0 && half > 0.0) {
            return domain("spacing and half-width must be positive");
        }
        let cells = (2.0 * half / h).round() as usize;
        Self::square(-half, half, cells + 1)
    }

    pub fn nx(&self) -> usize {
        self.nx
    }
    pub fn ny(&self) -> usize {
        self.ny
    }
    pub fn hx(&self) -> f64 {
        self.hx
    }
    pub fn hy(&self) -> f64 {
        self.hy
    }
    pub fn x_bounds(&self) -> (f64, f64) {
        (self.x_min, self.x_max)
    }
    pub fn y_bounds(&self) -> (f64, f64) {
        (self.y_min, self.y_max)
    }
    pub fn len(&self) -> usize {
        self.nx * self.ny
    }
    pub fn is_empty(&self) -> bool {
        false
    }

    #[inline]
    pub fn x(&self, i: usize) -> f64 {
        if i + 1 == self.nx {
            self.x_max
        } else {
            self.x_min + i as f64 * self.hx
        }
    }

    #[inline]
    pub fn y(&self, j: usize) -> f64 {
        if j + 1 == self.ny {
            self.y_max
        } else {
            self.y_min + j as f64 * self.hy
        }
    }

    /// Flat index; y varies fastest.
    #[inline]
    pub fn index(&self, i: usize, j: usize) -> usize {
        i * self.ny + j
    }

    pub fn contains(&self, x: f64, y: f64) -> bool {
        (self.x_min..=self.x_max).contains(&x) && (self.y_min..=self.y_max).contains(&y)
    }

    /// Smallest distance from `(x, y)` to the edge of the domain (negative
    /// when outside).
    pub fn distance_to_edge(&self, x: f64, y: f64) -> f64 {
        (x - self.x_min)
            .min(self.x_max - x)
            .min(y - self.y_min)
            .min(self.y_max - y)
    }

    /// Grid with the x and y axes exchanged.
    pub fn transposed(&self) -> Self {
        Self::new(
            (self.y_min, self.y_max),
            (self.x_min, self.x_max),
            self.ny,
            self.nx,
        )
        .expect("transpose of a valid grid is valid")
    }

    pub fn spec(&self) -> GridSpec {
        (*self).into()
    }
}
