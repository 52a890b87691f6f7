//! Grid geometry for the line operators and the truncated half-plane.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// Boundary handling for 1D line operators.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LineBoundary {
    /// Periodic wrap; required by the spectral path.
    Periodic,
    /// Truncated domain, samples assumed to decay to zero toward the edges;
    /// used by the singular-integral path with an analytic tail closure.
    Truncated,
}

/// Uniform 1D grid `x_i = x0 + i h`, `i = 0..n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LineGrid {
    pub n: usize,
    pub h: f64,
    pub x0: f64,
    pub boundary: LineBoundary,
}

impl LineGrid {
    pub fn new(n: usize, h: f64, x0: f64, boundary: LineBoundary) -> Result<Self> {
        if n < 16 {
            return Err(Error::Grid(format!("need at least 16 points, got {n}")));
        }
        if !(h > 0.0) || !h.is_finite() {
            return Err(Error::Grid(format!("spacing must be positive, got {h}")));
        }
        Ok(Self { n, h, x0, boundary })
    }

    /// Periodic grid covering `[-half_len, half_len)`.
    pub fn periodic(n: usize, half_len: f64) -> Result<Self> {
        let h = 2.0 * half_len / n as f64;
        Self::new(n, h, -half_len, LineBoundary::Periodic)
    }

    /// Truncated grid symmetric about the origin: `x_i = -(n-1)h/2 + i h`.
    pub fn symmetric(n: usize, h: f64) -> Result<Self> {
        Self::new(n, h, -0.5 * (n as f64 - 1.0) * h, LineBoundary::Truncated)
    }

    #[inline]
    pub fn x(&self, i: usize) -> f64 {
        self.x0 + i as f64 * self.h
    }

    pub fn points(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n).map(move |i| self.x(i))
    }

    /// Total covered length `n h` (the period for the spectral path).
    pub fn length(&self) -> f64 {
        self.n as f64 * self.h
    }

    pub fn is_power_of_two(&self) -> bool {
        self.n.is_power_of_two()
    }
}

/// Truncation of the half-plane to `[-X, X) x [0, Y]`, periodic in `x`.
/// `x_i = -X + i hx` with `hx = 2X/nx`; `y_j = j hy` with `Y = (ny-1) hy`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RectGrid {
    pub nx: usize,
    pub ny: usize,
    pub hx: f64,
    pub hy: f64,
    pub half_width: f64,
}

impl RectGrid {
    pub fn new(nx: usize, ny: usize, half_width: f64, height: f64) -> Result<Self> {
        if !nx.is_power_of_two() {
            return Err(Error::NotPowerOfTwo(nx));
        }
        if ny < 3 {
            return Err(Error::Grid(format!("need at least 3 rows, got {ny}")));
        }
        if !(half_width > 0.0) || !(height > 0.0) {
            return Err(Error::Grid("degenerate extents".into()));
        }
        if height < 10.0 {
            return Err(Error::Grid(format!(
                "height must cover several diffusion lengths (>= 10), got {height}"
            )));
        }
        let hx = 2.0 * half_width / nx as f64;
        let hy = height / (ny as f64 - 1.0);
        Ok(Self {
            nx,
            ny,
            hx,
            hy,
            half_width,
        })
    }

    #[inline]
    pub fn x(&self, i: usize) -> f64 {
        -self.half_width + i as f64 * self.hx
    }

    #[inline]
    pub fn y(&self, j: usize) -> f64 {
        j as f64 * self.hy
    }

    pub fn height(&self) -> f64 {
        (self.ny as f64 - 1.0) * self.hy
    }

    /// The road axis of this grid, as a periodic line grid.
    pub fn road_axis(&self) -> LineGrid {
        LineGrid {
            n: self.nx,
            h: self.hx,
            x0: -self.half_width,
            boundary: LineBoundary::Periodic,
        }
    }

    /// Physical wavenumber of spectral mode `m` on the periodic x-axis.
    #[inline]
    pub fn wavenumber(&self, m: usize) -> f64 {
        let n = self.nx as i64;
        let m = m as i64;
        let signed = if m <= n / 2 { m } else { m - n };
        2.0 * std::f64::consts::PI * signed as f64 / (self.nx as f64 * self.hx)
    }
}
