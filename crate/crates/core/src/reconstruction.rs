//! Well-balanced reconstruction of a scalar cell field.
//!
//! Each cell carries its own stationary profile `X^e`. The reconstruction adds
//! a constant (first order) or limited linear (second order) fluctuation on
//! top of that profile, so data sampled from a steady solution is reproduced
//! exactly at every point of the cell.

use std::fmt;
use std::str::FromStr;

use crate::grid::N_GHOST;
use crate::steady::{CENTER, LEFT_CENTER, LEFT_FACE, RIGHT_CENTER, RIGHT_FACE};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Order {
    #[default]
    First,
    Second,
}

impl Order {
    pub fn as_u8(self) -> u8 {
        match self {
            Order::First => 1,
            Order::Second => 2,
        }
    }

    pub fn from_u8(v: u8) -> Option<Self> {
        match v {
            1 => Some(Order::First),
            2 => Some(Order::Second),
            _ => None,
        }
    }
}

impl fmt::Display for Order {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.as_u8())
    }
}

/// Which one-sided difference each limiter weight multiplies.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum LimiterPairing {
    /// `(phi_+ d_- + phi_- d_+) / dx`. With `phi_-` proportional to `|d_-|`
    /// this is the harmonic-mean (van Leer) slope.
    #[default]
    Cross,
    /// `(phi_- d_- + phi_+ d_+) / dx`; not TVD at extrema.
    SameSide,
}

impl FromStr for LimiterPairing {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "cross" => Ok(LimiterPairing::Cross),
            "same_side" => Ok(LimiterPairing::SameSide),
            other => Err(format!("unknown limiter pairing '{other}' (cross|same_side)")),
        }
    }
}

impl fmt::Display for LimiterPairing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            LimiterPairing::Cross => "cross",
            LimiterPairing::SameSide => "same_side",
        })
    }
}

/// Limiter weights `(phi_-, phi_+)` with `phi_- = |d_-| / (|d_-| + |d_+|)`.
pub fn limiter_weights(d_minus: f64, d_plus: f64) -> (f64, f64) {
    let denom = d_minus.abs() + d_plus.abs();
    if denom > 0.0 {
        (d_minus.abs() / denom, d_plus.abs() / denom)
    } else {
        (0.0, 0.0)
    }
}

/// Limited slope from the stencil differences and frozen weights.
#[inline]
pub fn weighted_slope(d_minus: f64, d_plus: f64, weights: (f64, f64), dx: f64, pairing: LimiterPairing) -> f64 {
    let (wm, wp) = weights;
    match pairing {
        LimiterPairing::Cross => (wp * d_minus + wm * d_plus) / dx,
        LimiterPairing::SameSide => (wm * d_minus + wp * d_plus) / dx,
    }
}

/// Slope of the fluctuations `(X_{i-1}, X_i, X_{i+1})` taken relative to cell i's profile.
pub fn slope_fluctuation(fluct: [f64; 3], weights: (f64, f64), dx: f64, pairing: LimiterPairing) -> f64 {
    weighted_slope(fluct[1] - fluct[0], fluct[2] - fluct[1], weights, dx, pairing)
}

/// `X^e(x) + X_i - X^e(x_i)`.
#[inline]
pub fn reconstruct_o1(steady_x: f64, steady_center: f64, x_i_value: f64) -> f64 {
    steady_x + x_i_value - steady_center
}

/// `X^e(x) - X^e(x_i) + slope_t0 (x - x_i) + X_i(t) + slope_t (x - x_i)`.
#[inline]
pub fn reconstruct_o2(steady_x: f64, steady_center: f64, slope_t0: f64, x_i_value: f64, slope_t: f64, offset: f64) -> f64 {
    steady_x - steady_center + slope_t0 * offset + x_i_value + slope_t * offset
}

/// Face values of one scalar variable on every cell, ghosts included.
///
/// Indexing matches [`crate::steady::SteadyField::cell`]: position `j + 2`
/// holds cell `j` for `-2 <= j < n + 2`.
#[derive(Clone, Debug, Default)]
pub struct ScalarReconstruction {
    pub values: Vec<f64>,
    pub weights: Vec<(f64, f64)>,
    pub slopes: Vec<f64>,
    /// Reconstruction at `x_{j-1/2}` from inside cell `j`.
    pub left: Vec<f64>,
    /// Reconstruction at `x_{j+1/2}` from inside cell `j`.
    pub right: Vec<f64>,
}

impl ScalarReconstruction {
    /// Build from the ghosted values and a sampler `steady(j, slot)` returning
    /// cell j's profile at one of the five stencil slots.
    pub fn build(
        values: Vec<f64>,
        steady: impl Fn(usize, usize) -> f64,
        order: Order,
        dx: f64,
        pairing: LimiterPairing,
    ) -> Self {
        let m = values.len();
        let mut weights = vec![(0.0, 0.0); m];
        let mut slopes = vec![0.0; m];
        let mut left = vec![0.0; m];
        let mut right = vec![0.0; m];
        for j in 0..m {
            let center = steady(j, CENTER);
            let xj = values[j];
            let interior_stencil = j >= 1 && j + 1 < m;
            if order == Order::Second && interior_stencil {
                let fm = values[j - 1] - steady(j, LEFT_CENTER);
                let f0 = xj - center;
                let fp = values[j + 1] - steady(j, RIGHT_CENTER);
                let w = limiter_weights(f0 - fm, fp - f0);
                let s = slope_fluctuation([fm, f0, fp], w, dx, pairing);
                weights[j] = w;
                slopes[j] = s;
                left[j] = reconstruct_o2(steady(j, LEFT_FACE), center, s, xj, 0.0, -0.5 * dx);
                right[j] = reconstruct_o2(steady(j, RIGHT_FACE), center, s, xj, 0.0, 0.5 * dx);
            } else {
                left[j] = reconstruct_o1(steady(j, LEFT_FACE), center, xj);
                right[j] = reconstruct_o1(steady(j, RIGHT_FACE), center, xj);
            }
        }
        Self {
            values,
            weights,
            slopes,
            left,
            right,
        }
    }

    /// Value at `x_{k-1/2}` seen from the left (cell `k-1`), for `0 <= k <= n`.
    #[inline]
    pub fn face_minus(&self, k: usize) -> f64 {
        self.right[k + N_GHOST - 1]
    }

    /// Value at `x_{k-1/2}` seen from the right (cell `k`), for `0 <= k <= n`.
    #[inline]
    pub fn face_plus(&self, k: usize) -> f64 {
        self.left[k + N_GHOST]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn o1_examples() {
        assert_eq!(reconstruct_o1(2.0, 2.0, 2.0), 2.0);
        assert_eq!(reconstruct_o1(7.0, 7.0, 1.5), 1.5);
        let x2 = |x: f64| x * x;
        assert_eq!(reconstruct_o1(x2(1.25), x2(1.0), 1.5), 2.0625);
    }

    #[test]
    fn weight_examples() {
        assert_eq!(limiter_weights(1.0, 1.0), (0.5, 0.5));
        assert_eq!(limiter_weights(0.0, 0.0), (0.0, 0.0));
        assert_eq!(limiter_weights(3.0, 1.0), (0.75, 0.25));
    }

    #[test]
    fn slope_examples() {
        let p = LimiterPairing::Cross;
        assert_eq!(slope_fluctuation([0.0; 3], (0.0, 0.0), 1.0, p), 0.0);
        let f = [0.0, 1.0, 2.0];
        assert_eq!(slope_fluctuation(f, limiter_weights(1.0, 1.0), 1.0, p), 1.0);
        let f = [0.0, 1.0, 1.0];
        assert_eq!(slope_fluctuation(f, limiter_weights(1.0, 0.0), 1.0, p), 0.0);
        // Same-side pairing keeps the steep side at a one-sided kink.
        assert_eq!(slope_fluctuation(f, limiter_weights(1.0, 0.0), 1.0, LimiterPairing::SameSide), 1.0);
    }

    #[test]
    fn cross_pairing_is_harmonic_mean() {
        for &(a, b) in &[(1.0, 3.0), (0.2, 0.7), (-2.0, -0.5)] {
            let s = weighted_slope(a, b, limiter_weights(a, b), 1.0, LimiterPairing::Cross);
            assert!((s - 2.0 * a * b / (a + b)).abs() < 1e-14);
        }
        assert_eq!(weighted_slope(1.0, -2.0, limiter_weights(1.0, -2.0), 1.0, LimiterPairing::Cross), 0.0);
    }

    #[test]
    fn linear_data_on_trivial_profiles_is_exact() {
        let dx = 0.1;
        let values: Vec<f64> = (0..8).map(|j| j as f64 * dx).collect();
        let vals = values.clone();
        let r = ScalarReconstruction::build(values, |j, _| vals[j], Order::Second, dx, LimiterPairing::Cross);
        for j in 1..7 {
            assert!((r.slopes[j] - 1.0).abs() < 1e-12);
            assert!((r.right[j] - (vals[j] + 0.5 * dx)).abs() < 1e-14);
            assert!((r.left[j] - (vals[j] - 0.5 * dx)).abs() < 1e-14);
        }
    }

    #[test]
    fn steady_samples_are_reproduced() {
        // Profile X^e(x) = x^3 shared by every cell, data sampled from it.
        let dx = 0.2;
        let xs: Vec<f64> = (0..7).map(|j| j as f64 * dx).collect();
        let f = |x: f64| x * x * x;
        let values: Vec<f64> = xs.iter().map(|&x| f(x)).collect();
        let steady = |j: usize, slot: usize| {
            let off = [-1.0, -0.5, 0.0, 0.5, 1.0][slot];
            f(xs[j] + off * dx)
        };
        for order in [Order::First, Order::Second] {
            let r = ScalarReconstruction::build(values.clone(), steady, order, dx, LimiterPairing::Cross);
            for j in 0..7 {
                assert_eq!(r.slopes[j], 0.0);
                assert!((r.left[j] - f(xs[j] - 0.5 * dx)).abs() < 1e-15);
                assert!((r.right[j] - f(xs[j] + 0.5 * dx)).abs() < 1e-15);
            }
        }
    }
}
