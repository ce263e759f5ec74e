use serde::{Deserialize, Serialize};

/// Accuracy order of the central difference stencils.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub enum StencilOrder {
    #[serde(rename = "2")]
    Second,
    #[default]
    #[serde(rename = "4")]
    Fourth,
}

impl StencilOrder {
    pub fn from_order(order: u32) -> Option<Self> {
        match order {
            2 => Some(StencilOrder::Second),
            4 => Some(StencilOrder::Fourth),
            _ => None,
        }
    }

    pub fn order(self) -> u32 {
        match self {
            StencilOrder::Second => 2,
            StencilOrder::Fourth => 4,
        }
    }

    /// Number of neighbours on each side.
    pub fn half_width(self) -> usize {
        match self {
            StencilOrder::Second => 1,
            StencilOrder::Fourth => 2,
        }
    }

    /// First-derivative weights for offsets `1..=half_width`; the weight of
    /// `-d` is the negative of the weight of `+d`. Multiply by `1/h`.
    pub fn first(self) -> &'static [f64] {
        match self {
            StencilOrder::Second => &[0.5],
            StencilOrder::Fourth => &[8.0 / 12.0, -1.0 / 12.0],
        }
    }

    /// Second-derivative weights for offsets `0..=half_width` (symmetric).
    /// Multiply by `1/h^2`.
    pub fn second(self) -> &'static [f64] {
        match self {
            StencilOrder::Second => &[-2.0, 1.0],
            StencilOrder::Fourth => &[-30.0 / 12.0, 16.0 / 12.0, -1.0 / 12.0],
        }
    }

    /// Sum of absolute first-derivative weights over both sides.
    pub fn first_abs_sum(self) -> f64 {
        2.0 * self.first().iter().map(|c| c.abs()).sum::<f64>()
    }

    /// Sum of absolute second-derivative weights over the full stencil.
    pub fn second_abs_sum(self) -> f64 {
        let w = self.second();
        w[0].abs() + 2.0 * w[1..].iter().map(|c| c.abs()).sum::<f64>()
    }
}
