//! Relaxed linearized moment system: state layout, fluxes, eigenvalues and
//! the Riemann-invariant change of variables used by the pressure step.
//!
//! A cell state is the vector `(h, hu_0, ..., hu_N, h*pi)` of length `N + 3`.

use std::ops::{Index, IndexMut};

use smallvec::SmallVec;

use crate::basis;
use crate::error::{Error, Result};

/// Inline storage large enough for `N <= 9` without touching the heap.
pub type Components = SmallVec<[f64; 12]>;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ModelParams {
    pub g: f64,
    pub n_moments: usize,
    /// Relaxation speed `a`, in units of `h * velocity`.
    pub relaxation_speed: f64,
}

impl ModelParams {
    pub fn new(g: f64, n_moments: usize, relaxation_speed: f64) -> Result<Self> {
        if !(g > 0.0) {
            return Err(Error::Domain(format!("gravity must be positive, got {g}")));
        }
        if !(relaxation_speed > 0.0) {
            return Err(Error::Domain(format!(
                "relaxation speed must be positive, got {relaxation_speed}"
            )));
        }
        Ok(Self {
            g,
            n_moments,
            relaxation_speed,
        })
    }

    pub fn with_relaxation_speed(self, a: f64) -> Result<Self> {
        Self::new(self.g, self.n_moments, a)
    }

    /// Number of components per cell, `N + 3`.
    pub fn width(&self) -> usize {
        self.n_moments + 3
    }
}

/// Conserved cell state `(h, hu_0..hu_N, h*pi)`.
#[derive(Clone, Debug, PartialEq)]
pub struct State {
    comps: Components,
}

impl State {
    pub fn new(h: f64, q: &[f64], hpi: f64) -> Self {
        let mut comps = Components::with_capacity(q.len() + 2);
        comps.push(h);
        comps.extend_from_slice(q);
        comps.push(hpi);
        Self { comps }
    }

    /// Build from primitive variables `h`, `u_0..u_N` and `pi`.
    pub fn from_primitive(h: f64, u: &[f64], pi: f64) -> Self {
        let mut comps = Components::with_capacity(u.len() + 2);
        comps.push(h);
        comps.extend(u.iter().map(|uj| h * uj));
        comps.push(h * pi);
        Self { comps }
    }

    /// State with `pi` at its equilibrium value `g h^2 / 2`.
    pub fn relaxed(h: f64, q: &[f64], g: f64) -> Self {
        Self::new(h, q, 0.5 * g * h * h * h)
    }

    pub fn from_slice(comps: &[f64]) -> Self {
        debug_assert!(comps.len() >= 3);
        Self {
            comps: Components::from_slice(comps),
        }
    }

    pub fn zeros(n_moments: usize) -> Self {
        Self {
            comps: SmallVec::from_elem(0.0, n_moments + 3),
        }
    }

    pub fn n_moments(&self) -> usize {
        self.comps.len() - 3
    }

    pub fn len(&self) -> usize {
        self.comps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.comps.is_empty()
    }

    #[inline]
    pub fn h(&self) -> f64 {
        self.comps[0]
    }

    /// Conserved moment `h u_j`, `j = 0..=N`.
    #[inline]
    pub fn q(&self, j: usize) -> f64 {
        self.comps[1 + j]
    }

    pub fn moments(&self) -> &[f64] {
        &self.comps[1..self.comps.len() - 1]
    }

    #[inline]
    pub fn hpi(&self) -> f64 {
        self.comps[self.comps.len() - 1]
    }

    #[inline]
    pub fn u(&self, j: usize) -> f64 {
        self.q(j) / self.h()
    }

    #[inline]
    pub fn pi(&self) -> f64 {
        self.hpi() / self.h()
    }

    pub fn set_hpi(&mut self, hpi: f64) {
        let last = self.comps.len() - 1;
        self.comps[last] = hpi;
    }

    /// Reset `pi` to `g h^2 / 2`.
    pub fn relax(&mut self, g: f64) {
        let h = self.h();
        self.set_hpi(0.5 * g * h * h * h);
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.comps
    }

    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.comps
    }

    /// `sum_{i>=1} 3 u_i^2 / (2i+1)`, the moment contribution to the wave speeds.
    pub fn moment_radicand(&self) -> f64 {
        (1..=self.n_moments())
            .map(|i| {
                let ui = self.u(i);
                3.0 * ui * ui / (2 * i + 1) as f64
            })
            .sum()
    }

    fn check_positive(&self) -> Result<()> {
        if self.h() > 0.0 {
            Ok(())
        } else {
            Err(Error::Domain(format!(
                "water height must be positive, got {}",
                self.h()
            )))
        }
    }
}

impl Index<usize> for State {
    type Output = f64;
    fn index(&self, k: usize) -> &f64 {
        &self.comps[k]
    }
}

impl IndexMut<usize> for State {
    fn index_mut(&mut self, k: usize) -> &mut f64 {
        &mut self.comps[k]
    }
}

/// Vector with the `State` layout holding a flux, source or fluctuation.
#[derive(Clone, Debug, PartialEq)]
pub struct FluxVector {
    comps: Components,
}

impl FluxVector {
    pub fn zeros(width: usize) -> Self {
        Self {
            comps: SmallVec::from_elem(0.0, width),
        }
    }

    pub fn from_slice(comps: &[f64]) -> Self {
        Self {
            comps: Components::from_slice(comps),
        }
    }

    pub fn from_fn(width: usize, f: impl FnMut(usize) -> f64) -> Self {
        Self {
            comps: (0..width).map(f).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.comps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.comps.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.comps
    }
}

impl Index<usize> for FluxVector {
    type Output = f64;
    fn index(&self, k: usize) -> &f64 {
        &self.comps[k]
    }
}

impl IndexMut<usize> for FluxVector {
    fn index_mut(&mut self, k: usize) -> &mut f64 {
        &mut self.comps[k]
    }
}

/// Horizontal velocity at relative depth `zeta`, `u_0 + sum_i u_i phi_i(zeta)`.
pub fn velocity_profile(s: &State, zeta: f64) -> Result<f64> {
    s.check_positive()?;
    if !(0.0..=1.0).contains(&zeta) {
        return Err(Error::Domain(format!("zeta={zeta} outside [0, 1]")));
    }
    if s.n_moments() > basis::MAX_DEGREE {
        return Err(Error::Domain(format!(
            "{} moments exceed the basis table",
            s.n_moments()
        )));
    }
    Ok((1..=s.n_moments()).fold(s.u(0), |acc, i| {
        acc + s.u(i) * basis::phi_unchecked(i, zeta)
    }))
}

/// Transport flux `F(U) = (hu_0, hu_0^2 + sum hu_i^2/(2i+1), 2hu_0u_1, ..., 2hu_0u_N, 0)`.
pub fn flux_transport(s: &State) -> FluxVector {
    debug_assert!(s.h() > 0.0);
    let n = s.n_moments();
    let u0 = s.u(0);
    let mut f = FluxVector::zeros(n + 3);
    f[0] = s.q(0);
    let mut momentum = s.q(0) * u0;
    for i in 1..=n {
        momentum += s.q(i) * s.u(i) / (2 * i + 1) as f64;
        f[1 + i] = 2.0 * s.q(i) * u0;
    }
    f[1] = momentum;
    f
}

/// Pressure flux `F_P(U) = (0, pi, 0, ..., 0, a^2 u_0)`.
pub fn flux_pressure(s: &State, p: &ModelParams) -> FluxVector {
    debug_assert!(s.h() > 0.0);
    let a = p.relaxation_speed;
    let mut f = FluxVector::zeros(s.len());
    f[1] = s.pi();
    let last = f.len() - 1;
    f[last] = a * a * s.u(0);
    f
}

/// Non-conservative product `B(U) * jump` with `B = -diag(0, 0, u_0, ..., u_0, 0)`.
pub fn apply_b(s: &State, jump: &[f64]) -> FluxVector {
    debug_assert!(s.h() > 0.0);
    let u0 = s.u(0);
    let width = s.len();
    FluxVector::from_fn(width, |k| {
        if k >= 2 && k + 1 < width {
            -u0 * jump[k]
        } else {
            0.0
        }
    })
}

/// Topography source `S(U) = (0, g h, 0, ..., 0)`; the caller multiplies by `dz/dx`.
pub fn source(s: &State, p: &ModelParams) -> FluxVector {
    let mut f = FluxVector::zeros(s.len());
    f[1] = p.g * s.h();
    f
}

/// Radicand of the acoustic eigenvalues, `g h + sum 3 u_i^2/(2i+1)`.
pub fn full_radicand(s: &State, g: f64) -> f64 {
    g * s.h() + s.moment_radicand()
}

/// Radicand of the transport-subsystem eigenvalues, `sum 3 u_i^2/(2i+1)`.
pub fn transport_radicand(s: &State) -> f64 {
    s.moment_radicand()
}

/// Extreme eigenvalues `u_0 -+ sqrt(g h + sum 3 u_i^2/(2i+1))`.
pub fn eigenvalues_full(s: &State, p: &ModelParams) -> (f64, f64) {
    let u0 = s.u(0);
    let c = full_radicand(s, p.g).sqrt();
    (u0 - c, u0 + c)
}

/// Extreme eigenvalues of the transport subsystem, `u_0 -+ sqrt(sum 3 u_i^2/(2i+1))`.
pub fn eigenvalues_transport(s: &State) -> (f64, f64) {
    let u0 = s.u(0);
    let c = transport_radicand(s).sqrt();
    (u0 - c, u0 + c)
}

pub fn froude(s: &State, p: &ModelParams) -> f64 {
    s.u(0).abs() / (p.g * s.h()).sqrt()
}

/// Froude number including the moment contribution to the wave speed.
/// Diagnostic only; the scheme classifies regimes with [`froude`].
pub fn froude_extended(s: &State, p: &ModelParams) -> f64 {
    s.u(0).abs() / full_radicand(s, p.g).sqrt()
}

/// `max_i h_i sqrt(g h_i)` over the given states.
pub fn relaxation_speed<'a>(states: impl IntoIterator<Item = &'a State>, g: f64) -> Result<f64> {
    relaxation_speed_from_heights(states.into_iter().map(State::h), g)
}

pub fn relaxation_speed_from_heights(heights: impl IntoIterator<Item = f64>, g: f64) -> Result<f64> {
    let mut best: Option<f64> = None;
    for h in heights {
        if !(h > 0.0) {
            return Err(Error::Domain(format!(
                "relaxation speed needs positive heights, got {h}"
            )));
        }
        let v = h * (g * h).sqrt();
        best = Some(best.map_or(v, |b: f64| b.max(v)));
    }
    best.ok_or_else(|| Error::Domain("relaxation speed of an empty state set".into()))
}

/// `(pi + a u_0, pi - a u_0)`.
pub fn to_riemann_invariants(pi: f64, u0: f64, a: f64) -> Result<(f64, f64)> {
    if !(a > 0.0) {
        return Err(Error::Domain(format!("relaxation speed must be positive, got {a}")));
    }
    Ok((pi + a * u0, pi - a * u0))
}

/// Inverse of [`to_riemann_invariants`]: `(pi, u_0)`.
pub fn from_riemann_invariants(w_fwd: f64, w_bwd: f64, a: f64) -> Result<(f64, f64)> {
    if !(a > 0.0) {
        return Err(Error::Domain(format!("relaxation speed must be positive, got {a}")));
    }
    Ok((0.5 * (w_fwd + w_bwd), (w_fwd - w_bwd) / (2.0 * a)))
}
