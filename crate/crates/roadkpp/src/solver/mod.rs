//! Time-stepping for the coupled road-field system and its reduced variants.
//!
//! One step advances `t` by `dt` in Strang order: a reaction half-step in the
//! field, the diffusion block, and a second reaction half-step. The diffusion
//! block solves the `y`-direction diffusion, the exchange condition and the
//! road decay in one coupled implicit solve per `x`-column (an arrowhead
//! system eliminated into a tridiagonal one), then applies the `x`-direction
//! multipliers spectrally: `1/(1 + dt q^2)` on field rows and
//! `1/(1 + dt |q|^{2 alpha})` on the road.
//!
//! Solving the exchange implicitly together with the `y`-lines makes the
//! road-field mass transfer cancel exactly in the discrete mass balance, and
//! the eliminated system is an M-matrix, so the Thomas sweeps involve only
//! additions of nonnegative quantities: nonnegative data cannot leave the
//! nonnegative cone through this stage.

mod runs;
mod scheme;
mod steady;

pub use runs::{run, RunResult, Snapshot, SnapshotPolicy};
pub use scheme::{BottomBc, SchemeConfig, Stepper};
pub use steady::{solve_steady, Reduced1D, SteadyState};

use crate::error::{Error, Result};
use crate::grid::RectGrid;
use ndarray::Array2;

/// Gridded state of the coupled system. `v` is indexed `[y-row, x-column]`,
/// `u` lives on the `y = 0` axis of the same grid.
#[derive(Debug, Clone)]
pub struct SystemState {
    pub v: Array2<f64>,
    pub u: Vec<f64>,
    pub t: f64,
}

impl SystemState {
    pub fn zero(grid: &RectGrid) -> Self {
        Self {
            v: Array2::zeros((grid.ny, grid.nx)),
            u: vec![0.0; grid.nx],
            t: 0.0,
        }
    }

    /// Road bump used as the reference initial datum: an indicator-like
    /// plateau of width 2 and height about 1, with smooth shoulders of scale
    /// `shoulder` so the spectral road operator sees a rapidly decaying
    /// spectrum. The field starts empty.
    pub fn road_bump(grid: &RectGrid, shoulder: f64) -> Self {
        let mut state = Self::zero(grid);
        for (i, ui) in state.u.iter_mut().enumerate() {
            let x = grid.x(i);
            *ui = 0.5 * (((x + 1.0) / shoulder).tanh() - ((x - 1.0) / shoulder).tanh());
        }
        state
    }

    pub fn matches(&self, grid: &RectGrid) -> bool {
        self.v.dim() == (grid.ny, grid.nx) && self.u.len() == grid.nx
    }

    pub fn sup_v(&self) -> f64 {
        self.v.iter().fold(0.0f64, |m, &x| m.max(x.abs()))
    }

    pub fn sup_u(&self) -> f64 {
        self.u.iter().fold(0.0f64, |m, &x| m.max(x.abs()))
    }

    pub fn min_value(&self) -> f64 {
        let mv = self.v.iter().copied().fold(f64::INFINITY, f64::min);
        let mu = self.u.iter().copied().fold(f64::INFINITY, f64::min);
        mv.min(mu)
    }

    /// Positivity and boundedness invariants: values above `-1e-10`, and
    /// for KPP data below the steady state the sup stays below
    /// `cap + 1e-6` (`None` skips the upper check, e.g. linearized runs).
    pub fn check_invariants(&self, sup_cap: Option<f64>) -> Result<()> {
        if self.min_value() < -1e-10 {
            return Err(Error::InvalidParameter(format!(
                "state has negative values below tolerance: min = {:e}",
                self.min_value()
            )));
        }
        if let Some(cap) = sup_cap {
            let sup = self.sup_v().max(self.sup_u());
            if sup > cap + 1e-6 {
                return Err(Error::InvalidParameter(format!(
                    "state exceeds bound {cap}: sup = {sup}"
                )));
            }
        }
        Ok(())
    }

    /// Discrete mass `hx (sum_i u_i + hy sum_j w_j v_{ji})` with trapezoid
    /// weights in `y`; the exchange terms cancel in this functional.
    pub fn mass(&self, grid: &RectGrid) -> f64 {
        let mut vmass = 0.0;
        for j in 0..grid.ny {
            let w = if j == 0 || j == grid.ny - 1 { 0.5 } else { 1.0 };
            vmass += w * self.v.row(j).sum();
        }
        let umass: f64 = self.u.iter().sum();
        grid.hx * (umass + grid.hy * vmass)
    }
}
