//! Model parameters, the KPP reaction term and derived scalar constants.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// KPP reaction term. Logistic by default: `f(v) = a v (1 - v)` with
/// `f'(0) = a`. The formula is evaluated as-is outside `[0, 1]`; the logistic
/// is already negative above 1, which is what the comparison arguments need.
#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq)]
pub struct ReactionSpec {
    /// Growth rate `a = f'(0)`.
    pub rate: f64,
}

impl Default for ReactionSpec {
    fn default() -> Self {
        Self { rate: 1.0 }
    }
}

impl ReactionSpec {
    pub fn new(rate: f64) -> Result<Self> {
        if !(rate > 0.0) || !rate.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "reaction rate must be positive and finite, got {rate}"
            )));
        }
        Ok(Self { rate })
    }

    /// `f(v) = a v (1 - v)`. Total function.
    #[inline]
    pub fn eval(&self, v: f64) -> f64 {
        self.rate * v * (1.0 - v)
    }

    /// `f'(0)`.
    #[inline]
    pub fn fprime0(&self) -> f64 {
        self.rate
    }

    /// Exact-in-time flow of `v' = f(v)` over a step `dt`, used by the
    /// reaction half-steps. Monotone in the initial value.
    #[inline]
    pub fn flow(&self, v: f64, dt: f64) -> f64 {
        // v(t) = v0 / (v0 + (1 - v0) e^{-a t}), valid on either side of 1.
        let e = (-self.rate * dt).exp();
        let denom = v + (1.0 - v) * e;
        if denom == 0.0 {
            // Only reachable far outside the physical range.
            return v;
        }
        v / denom
    }

    /// Exact flow of the linearized reaction `v' = f'(0) v`.
    #[inline]
    pub fn flow_linearized(&self, v: f64, dt: f64) -> f64 {
        v * (self.rate * dt).exp()
    }
}

/// Physical parameters of the coupled system. The field exchange rate `nu`
/// is normalized to 1 and the field diffusivity to 1.
#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq)]
pub struct ModelParams {
    /// Fractional order of the road operator, in (0, 1).
    pub alpha: f64,
    /// Road-to-field exchange rate, positive.
    pub mu: f64,
    /// Road mortality, nonnegative.
    pub k: f64,
    /// Reaction term in the field.
    pub reaction: ReactionSpec,
}

impl ModelParams {
    pub fn new(alpha: f64, mu: f64, k: f64, reaction: ReactionSpec) -> Result<Self> {
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "alpha must lie in (0, 1), got {alpha}"
            )));
        }
        if !(mu > 0.0) || !mu.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "mu must be positive, got {mu}"
            )));
        }
        if !(k >= 0.0) || !k.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "k must be nonnegative, got {k}"
            )));
        }
        Ok(Self {
            alpha,
            mu,
            k,
            reaction,
        })
    }

    #[inline]
    pub fn fprime0(&self) -> f64 {
        self.reaction.fprime0()
    }

    pub fn derive(&self) -> Result<DerivedConstants> {
        DerivedConstants::from_params(self)
    }
}

/// Scalar constants derived from the model parameters.
#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq)]
pub struct DerivedConstants {
    /// KPP spreading speed in the field, `2 sqrt(f'(0))`.
    pub c_k: f64,
    /// Exponential spreading rate on the road, `f'(0) / (1 + 2 alpha)`.
    pub gamma_star: f64,
    /// Unique root of `r^2 = r^{2 alpha} + f'(0) + k` above `sqrt(f'(0))`.
    pub r0: f64,
}

impl DerivedConstants {
    pub fn from_params(params: &ModelParams) -> Result<Self> {
        let a = params.fprime0();
        let c_k = 2.0 * a.sqrt();
        let gamma_star = a / (1.0 + 2.0 * params.alpha);
        let r0 = solve_r0(params.alpha, a, params.k)?;
        Ok(Self {
            c_k,
            gamma_star,
            r0,
        })
    }
}

/// The residual of the `r0` equation, `h(r) = r^2 - r^{2 alpha} - f'(0) - k`.
/// Strictly increasing on `r >= 1`.
fn r0_residual(r: f64, alpha: f64, fp0: f64, k: f64) -> f64 {
    r * r - r.powf(2.0 * alpha) - fp0 - k
}

/// Bisection for `r0` starting from the bracket
/// `[max(1, sqrt(f'(0)+k)), f'(0)+k+2]`, to absolute tolerance 1e-12.
/// `h` is strictly increasing for `r >= 1`, so the root is unique there; the
/// upper end is doubled until it captures the root, which moves far out as
/// `alpha` approaches 1. Bisection rather than Newton: monotone bracketing
/// stays robust with `alpha` near 0 or 1.
fn solve_r0(alpha: f64, fp0: f64, k: f64) -> Result<f64> {
    let mut lo = 1.0_f64.max((fp0 + k).sqrt());
    let mut hi = fp0 + k + 2.0;
    let flo = r0_residual(lo, alpha, fp0, k);
    let mut fhi = r0_residual(hi, alpha, fp0, k);
    while fhi < 0.0 && hi < 1e12 {
        hi *= 2.0;
        fhi = r0_residual(hi, alpha, fp0, k);
    }
    if flo > 0.0 || fhi < 0.0 {
        return Err(Error::BracketFailure {
            what: "r0",
            lo,
            hi,
            flo,
            fhi,
        });
    }
    if flo == 0.0 {
        return Ok(lo);
    }
    while hi - lo > 1e-12 {
        let mid = 0.5 * (lo + hi);
        if r0_residual(mid, alpha, fp0, k) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::{Rng, SeedableRng};

    #[test]
    fn reaction_vanishes_at_zero_and_one() {
        let f = ReactionSpec::default();
        assert_eq!(f.eval(0.0), 0.0);
        assert_eq!(f.eval(1.0), 0.0);
        assert_eq!(f.eval(0.5), 0.25);
    }

    #[test]
    fn reaction_is_kpp_and_concave_on_sampled_grid() {
        let f = ReactionSpec::new(1.7).unwrap();
        let a = f.fprime0();
        // f(s) <= f'(0) s on (0, 2]; strictly concave by second differences.
        let n = 400;
        let h = 2.0 / n as f64;
        for i in 1..=n {
            let s = i as f64 * h;
            assert!(f.eval(s) <= a * s + 1e-14, "KPP bound fails at s={s}");
            if i + 1 <= n {
                let d2 = f.eval(s + h) - 2.0 * f.eval(s) + f.eval(s - h);
                assert!(d2 < 0.0, "second difference not negative at s={s}");
            }
        }
        // f < 0 above 1.
        assert!(f.eval(1.5) < 0.0);
    }

    #[test]
    fn exact_flow_matches_ode_and_is_monotone() {
        let f = ReactionSpec::new(1.0).unwrap();
        // Fine explicit Euler as an independent oracle.
        let mut v = 0.2;
        let dt = 1e-6;
        for _ in 0..1_000_000 {
            v += dt * f.eval(v);
        }
        assert_abs_diff_eq!(f.flow(0.2, 1.0), v, epsilon = 1e-5);
        // Monotone in the initial value, also across 1.
        let mut prev = f.flow(0.0, 0.7);
        for i in 1..60 {
            let v0 = i as f64 * 0.05;
            let cur = f.flow(v0, 0.7);
            assert!(cur > prev);
            prev = cur;
        }
        // Fixed points.
        assert_eq!(f.flow(0.0, 2.0), 0.0);
        assert_eq!(f.flow(1.0, 2.0), 1.0);
    }

    #[test]
    fn golden_ratio_root() {
        // alpha = 1/2, f'(0) = 1, k = 0: r^2 = r + 1, the golden ratio.
        let p = ModelParams::new(0.5, 1.0, 0.0, ReactionSpec::new(1.0).unwrap()).unwrap();
        let d = p.derive().unwrap();
        let golden = (1.0 + 5.0_f64.sqrt()) / 2.0;
        assert_abs_diff_eq!(d.r0, golden, epsilon = 1e-10);
        assert_abs_diff_eq!(d.gamma_star, 0.5, epsilon = 0.0);
        assert_abs_diff_eq!(d.c_k, 2.0, epsilon = 0.0);
    }

    #[test]
    fn r0_residual_vanishes_and_bracket_changes_sign() {
        let cases = [(0.3, 1.0, 0.0), (0.5, 2.0, 1.0), (0.9, 0.3, 0.2)];
        for (alpha, a, k) in cases {
            let r0 = solve_r0(alpha, a, k).unwrap();
            assert!(r0_residual(r0, alpha, a, k).abs() < 1e-10);
            let lo = 1.0_f64.max((a + k).sqrt());
            let hi = a + k + 2.0;
            assert!(r0_residual(lo, alpha, a, k) <= 0.0);
            assert!(r0_residual(hi, alpha, a, k) > 0.0);
        }
    }

    #[test]
    fn r0_exceeds_sqrt_fprime0_randomized() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..200 {
            let alpha: f64 = rng.gen_range(0.02..0.98);
            let a: f64 = rng.gen_range(0.05..5.0);
            let k: f64 = rng.gen_range(0.0..3.0);
            let r0 = solve_r0(alpha, a, k).unwrap();
            assert!(
                r0 > a.sqrt(),
                "r0 = {r0} <= sqrt(f'(0)) = {} for alpha={alpha}, a={a}, k={k}",
                a.sqrt()
            );
        }
    }

    #[test]
    fn gamma_star_identity() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..50 {
            let alpha: f64 = rng.gen_range(0.05..0.95);
            let a: f64 = rng.gen_range(0.1..4.0);
            let p = ModelParams::new(alpha, 1.0, 0.0, ReactionSpec::new(a).unwrap()).unwrap();
            let d = p.derive().unwrap();
            assert_abs_diff_eq!(d.gamma_star * (1.0 + 2.0 * alpha), a, epsilon = 1e-15 * a);
        }
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(ModelParams::new(0.0, 1.0, 0.0, ReactionSpec::default()).is_err());
        assert!(ModelParams::new(1.0, 1.0, 0.0, ReactionSpec::default()).is_err());
        assert!(ModelParams::new(0.5, 0.0, 0.0, ReactionSpec::default()).is_err());
        assert!(ModelParams::new(0.5, 1.0, -0.1, ReactionSpec::default()).is_err());
        assert!(ReactionSpec::new(0.0).is_err());
    }
}
