//! The implicit stepper: coupled y-line/exchange/road solve plus spectral
//! x-direction multipliers, wrapped in Strang reaction half-steps.

use super::SystemState;
use crate::error::{Error, Result};
use crate::grid::RectGrid;
use crate::model::ModelParams;
use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};
use std::sync::Arc;

/// Bottom boundary handling for the field.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BottomBc {
    /// Ghost-point Robin exchange `-dv/dy = mu u - v` coupled to the road.
    Exchange,
    /// Sudden death: `v(x, 0, t) = 0`, no road.
    Dirichlet,
    /// Reflecting wall, used by whole-plane comparison oracles; no road.
    Neumann,
}

/// Time-stepping configuration. The splitting is fixed (Strang on the
/// reaction around the implicit diffusion block); flags select the reduced
/// variants used as oracles.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct SchemeConfig {
    pub dt: f64,
    /// Replace `f(v)` by `f'(0) v`.
    pub linearized: bool,
    /// Drop the reaction entirely (`f = 0`).
    pub no_reaction: bool,
    pub bottom: BottomBc,
}

impl SchemeConfig {
    pub fn new(dt: f64) -> Self {
        Self {
            dt,
            linearized: false,
            no_reaction: false,
            bottom: BottomBc::Exchange,
        }
    }

    pub fn validate(&self, params: &ModelParams) -> Result<()> {
        if !(self.dt > 0.0) || !self.dt.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "dt must be positive, got {}",
                self.dt
            )));
        }
        // Accuracy guard, not stability: diffusion is implicit.
        if !self.no_reaction && self.dt * params.fprime0() > 0.1 + 1e-12 {
            return Err(Error::InvalidParameter(format!(
                "dt f'(0) = {} exceeds the accuracy guard 0.1",
                self.dt * params.fprime0()
            )));
        }
        Ok(())
    }
}

/// Precomputed Thomas factorization of the implicit y-direction system with
/// the road eliminated into row 0. All sweep coefficients are stored with
/// the signs arranged so that both sweeps only add nonnegative multiples of
/// nonnegative data.
#[derive(Debug, Clone)]
pub(crate) struct ThomasPlan {
    /// `-m_j >= 0`, forward-elimination factor against the previous row.
    neg_m: Vec<f64>,
    /// `1 / d'_j > 0`.
    inv_d: Vec<f64>,
    /// `-c_j >= 0`, back-substitution factor against the next row.
    c_pos: Vec<f64>,
    /// Row-0 source factor `2 q mu / beta` applied to the old road value.
    pub u_source: f64,
    /// `1 / (1 + dt (mu + k))`, road recovery factor.
    pub inv_beta: f64,
    pub dt: f64,
    couples_road: bool,
    dirichlet: bool,
}

impl ThomasPlan {
    pub fn new(grid: &RectGrid, params: &ModelParams, dt: f64, bottom: BottomBc) -> Self {
        let ny = grid.ny;
        let r = dt / (grid.hy * grid.hy);
        let q = dt / grid.hy;
        let beta = 1.0 + dt * (params.mu + params.k);
        let mut b = vec![1.0 + 2.0 * r; ny];
        let mut c = vec![-r; ny];
        let mut a = vec![-r; ny];
        match bottom {
            BottomBc::Exchange => {
                b[0] = 1.0 + 2.0 * r + 2.0 * q * (1.0 + dt * params.k) / beta;
                c[0] = -2.0 * r;
            }
            BottomBc::Dirichlet => {
                b[0] = 1.0;
                c[0] = 0.0;
            }
            BottomBc::Neumann => {
                c[0] = -2.0 * r;
            }
        }
        a[ny - 1] = -2.0 * r;

        let mut neg_m = vec![0.0; ny];
        let mut inv_d = vec![0.0; ny];
        let mut d_prev = b[0];
        inv_d[0] = 1.0 / d_prev;
        for j in 1..ny {
            let m = a[j] / d_prev;
            neg_m[j] = -m;
            d_prev = b[j] - m * c[j - 1];
            inv_d[j] = 1.0 / d_prev;
        }
        let c_pos: Vec<f64> = c.iter().map(|&x| -x).collect();
        ThomasPlan {
            neg_m,
            inv_d,
            c_pos,
            u_source: 2.0 * q * params.mu / beta,
            inv_beta: 1.0 / beta,
            dt,
            couples_road: bottom == BottomBc::Exchange,
            dirichlet: bottom == BottomBc::Dirichlet,
        }
    }

    /// Solves the implicit y-system in place for every x-column at once.
    /// `v` is the row-major field slab (`ny` rows of length `nx`), holding
    /// the right-hand side on entry and the solution on exit; `u` is the
    /// road vector, advanced through the eliminated row when coupled.
    pub fn solve(&self, v: &mut [f64], u: &mut [f64], nx: usize) {
        let ny = v.len() / nx;
        if self.dirichlet {
            v[..nx].fill(0.0);
        } else if self.couples_road {
            for i in 0..nx {
                v[i] += self.u_source * u[i];
            }
        }
        for j in 1..ny {
            let (prev, cur) = v.split_at_mut(j * nx);
            let prev_row = &prev[(j - 1) * nx..];
            let f = self.neg_m[j];
            for i in 0..nx {
                cur[i] += f * prev_row[i];
            }
        }
        let last = ny - 1;
        let f = self.inv_d[last];
        for x in &mut v[last * nx..] {
            *x *= f;
        }
        for j in (0..last).rev() {
            let (cur, next) = v.split_at_mut((j + 1) * nx);
            let cur_row = &mut cur[j * nx..];
            let next_row = &next[..nx];
            let (cp, id) = (self.c_pos[j], self.inv_d[j]);
            for i in 0..nx {
                cur_row[i] = (cur_row[i] + cp * next_row[i]) * id;
            }
        }
        if self.couples_road {
            for i in 0..nx {
                u[i] = (u[i] + self.dt * v[i]) * self.inv_beta;
            }
        }
    }
}

/// One-step integrator holding every precomputed ingredient: the Thomas
/// factorization, the spectral multipliers, FFT plans and scratch buffers.
pub struct Stepper {
    pub grid: RectGrid,
    pub params: ModelParams,
    pub cfg: SchemeConfig,
    thomas: ThomasPlan,
    mult_field: Vec<f64>,
    mult_road: Vec<f64>,
    fft: Arc<dyn Fft<f64>>,
    ifft: Arc<dyn Fft<f64>>,
    row_buf: Vec<Complex64>,
    scratch: Vec<Complex64>,
}

impl Stepper {
    pub fn new(grid: RectGrid, params: ModelParams, cfg: SchemeConfig) -> Result<Self> {
        cfg.validate(&params)?;
        let thomas = ThomasPlan::new(&grid, &params, cfg.dt, cfg.bottom);
        let mut mult_field = Vec::with_capacity(grid.nx);
        let mut mult_road = Vec::with_capacity(grid.nx);
        for m in 0..grid.nx {
            let q = grid.wavenumber(m).abs();
            mult_field.push(1.0 / (1.0 + cfg.dt * q * q));
            mult_road.push(1.0 / (1.0 + cfg.dt * q.powf(2.0 * params.alpha)));
        }
        let mut planner = FftPlanner::new();
        let fft = planner.plan_fft_forward(grid.nx);
        let ifft = planner.plan_fft_inverse(grid.nx);
        let scratch_len = fft
            .get_inplace_scratch_len()
            .max(ifft.get_inplace_scratch_len());
        Ok(Self {
            grid,
            params,
            cfg,
            thomas,
            mult_field,
            mult_road,
            fft,
            ifft,
            row_buf: vec![Complex64::new(0.0, 0.0); grid.nx],
            scratch: vec![Complex64::new(0.0, 0.0); scratch_len],
        })
    }

    fn reaction_half_step(&self, state: &mut SystemState) {
        if self.cfg.no_reaction {
            return;
        }
        let half = 0.5 * self.cfg.dt;
        if self.cfg.linearized {
            let factor = (self.params.fprime0() * half).exp();
            state.v.mapv_inplace(|v| v * factor);
        } else {
            let decay = (-self.params.reaction.rate * half).exp();
            state.v.mapv_inplace(|v| {
                let denom = v + (1.0 - v) * decay;
                if denom != 0.0 {
                    v / denom
                } else {
                    v
                }
            });
        }
    }

    /// Applies one x-direction multiplier to a real row through the FFT.
    fn spectral_row(&mut self, row: &mut [f64], mult: &[f64]) {
        let n = row.len();
        for (b, &x) in self.row_buf.iter_mut().zip(row.iter()) {
            *b = Complex64::new(x, 0.0);
        }
        self.fft
            .process_with_scratch(&mut self.row_buf, &mut self.scratch);
        for (b, &m) in self.row_buf.iter_mut().zip(mult.iter()) {
            *b *= m;
        }
        self.ifft
            .process_with_scratch(&mut self.row_buf, &mut self.scratch);
        let scale = 1.0 / n as f64;
        for (x, b) in row.iter_mut().zip(self.row_buf.iter()) {
            *x = b.re * scale;
        }
    }

    fn diffusion_step(&mut self, state: &mut SystemState) {
        let nx = self.grid.nx;
        let v = state
            .v
            .as_slice_mut()
            .expect("field slab must be contiguous");
        self.thomas.solve(v, &mut state.u, nx);
        // Manual re-borrow per row: spectral_row needs &mut self.
        let ny = self.grid.ny;
        let mult_field = std::mem::take(&mut self.mult_field);
        for j in 0..ny {
            let v = state.v.as_slice_mut().unwrap();
            self.spectral_row(&mut v[j * nx..(j + 1) * nx], &mult_field);
        }
        self.mult_field = mult_field;
        if self.cfg.bottom == BottomBc::Exchange {
            let mult_road = std::mem::take(&mut self.mult_road);
            self.spectral_row(&mut state.u, &mult_road);
            self.mult_road = mult_road;
        }
    }

    /// Advances the state by `dt` in Strang order
    /// reaction / diffusion / reaction.
    pub fn step(&mut self, state: &mut SystemState) {
        self.reaction_half_step(state);
        self.diffusion_step(state);
        self.reaction_half_step(state);
        state.t += self.cfg.dt;
    }
}
