//! Local stationary solutions.
//!
//! A steady state of the linearized moment system satisfies
//!
//! ```text
//! h u_0 = C1
//! u_0^2 / 2 + g (h + z) + (3/2) sum_i u_i^2 / (2i+1) = C2
//! u_i / h = C_{i+2}                     (i >= 1)
//! ```
//!
//! Eliminating the velocities leaves the scalar equation
//! `R(h) = C1^2 / (2 h^2) + g (h + z) + K h^2 / 2 - C2 = 0` with
//! `K = 3 sum_i C_{i+2}^2 / (2i+1)`. `R` is strictly convex on `h > 0`, so it
//! has at most one root on each side of its minimiser, the critical height.
//! The subcritical root lies above it, the supercritical one below.

use crate::error::{Error, Result};
use crate::field::Field;
use crate::grid::{Grid, Topography, N_GHOST};
use crate::model::{froude, ModelParams, State};

/// Half-width of the Froude dead band around 1 treated as critical.
pub const CRITICAL_BAND: f64 = 1e-8;
pub const MAX_NEWTON_ITER: usize = 50;
/// Residual tolerance, relative to `max(1, |C2|)`.
pub const RESIDUAL_TOL: f64 = 1e-13;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Branch {
    Subcritical,
    Supercritical,
    /// Constant-in-x extension of the anchoring state.
    Trivial,
}

impl Branch {
    pub fn name(self) -> &'static str {
        match self {
            Branch::Subcritical => "subcritical",
            Branch::Supercritical => "supercritical",
            Branch::Trivial => "trivial",
        }
    }
}

pub fn classify_branch(s: &State, p: &ModelParams) -> Branch {
    let fr = froude(s, p);
    if fr < 1.0 - CRITICAL_BAND {
        Branch::Subcritical
    } else if fr > 1.0 + CRITICAL_BAND {
        Branch::Supercritical
    } else {
        Branch::Trivial
    }
}

/// The algebraic invariants `C1`, `C2`, `C_3..C_{N+2}` of a stationary solution.
#[derive(Clone, Debug, PartialEq)]
pub struct SteadyConstants {
    pub c1: f64,
    pub c2: f64,
    /// `ck[i - 1]` pairs with moment `u_i`.
    pub ck: Vec<f64>,
}

impl SteadyConstants {
    pub fn new(c1: f64, c2: f64, ck: Vec<f64>) -> Self {
        Self { c1, c2, ck }
    }

    /// `K = 3 sum_i C_{i+2}^2 / (2i+1)`.
    pub fn moment_coefficient(&self) -> f64 {
        self.ck
            .iter()
            .enumerate()
            .map(|(idx, c)| 3.0 * c * c / (2 * (idx + 1) + 1) as f64)
            .sum()
    }

    pub fn residual(&self, h: f64, z: f64, g: f64) -> f64 {
        residual(self.c1, self.c2, self.moment_coefficient(), h, z, g)
    }

    /// Minimiser of `R`, where `g h^3 + K h^4 = C1^2`. Zero when `C1 = 0`.
    pub fn critical_height(&self, g: f64) -> f64 {
        critical_height(self.c1, self.moment_coefficient(), g)
    }

    /// Root of `R(h) = 0` on `branch`, Newton-iterated from `h_guess`.
    /// Returns the root and the number of iterations used.
    pub fn solve_height(&self, z: f64, g: f64, branch: Branch, h_guess: f64) -> Result<(f64, usize)> {
        solve(self.c1, self.c2, self.moment_coefficient(), z, g, branch, h_guess)
    }

    /// Stationary state at bottom elevation `z`, with `pi = g h^2 / 2`.
    pub fn state_at(&self, z: f64, g: f64, branch: Branch, h_guess: f64) -> Result<State> {
        let (h, _) = self.solve_height(z, g, branch, h_guess)?;
        Ok(self.state_from_height(h, g))
    }

    fn state_from_height(&self, h: f64, g: f64) -> State {
        let mut s = State::zeros(self.ck.len());
        s[0] = h;
        s[1] = self.c1;
        for (idx, c) in self.ck.iter().enumerate() {
            s[2 + idx] = c * h * h;
        }
        s.relax(g);
        s
    }
}

#[inline]
fn residual(c1: f64, c2: f64, k: f64, h: f64, z: f64, g: f64) -> f64 {
    0.5 * c1 * c1 / (h * h) + g * (h + z) + 0.5 * k * h * h - c2
}

#[inline]
fn residual_derivative(c1: f64, k: f64, h: f64, g: f64) -> f64 {
    -c1 * c1 / (h * h * h) + g + k * h
}

fn critical_height(c1: f64, k: f64, g: f64) -> f64 {
    if c1 == 0.0 {
        return 0.0;
    }
    let target = c1 * c1;
    // f(h) = g h^3 + K h^4 - C1^2 is increasing and convex; Newton from the
    // moment-free estimate approaches the root monotonically from above.
    let mut h = (target / g).cbrt();
    for _ in 0..MAX_NEWTON_ITER {
        let f = g * h * h * h + k * h * h * h * h - target;
        let df = 3.0 * g * h * h + 4.0 * k * h * h * h;
        let next = h - f / df;
        if !(next > 0.0) || (next - h).abs() <= 4.0 * f64::EPSILON * h {
            break;
        }
        h = next;
    }
    h
}

fn no_root(branch: Branch, c1: f64, c2: f64, z: f64) -> Error {
    Error::NoSteadyRoot {
        branch: branch.name(),
        c1,
        c2,
        z,
    }
}

fn solve(c1: f64, c2: f64, k: f64, z: f64, g: f64, branch: Branch, h_guess: f64) -> Result<(f64, usize)> {
    if !(g.is_finite() && g > 0.0) || ![c1, c2, k, z].iter().all(|v| v.is_finite()) {
        return Err(Error::Domain(format!(
            "steady constants C1={c1}, C2={c2}, K={k}, z={z}, g={g} must be finite with g > 0"
        )));
    }
    if c1 == 0.0 && k == 0.0 {
        // Lake at rest: R is linear in h.
        let h = c2 / g - z;
        return if branch == Branch::Subcritical && h > 0.0 && h.is_finite() {
            Ok((h, 0))
        } else {
            Err(no_root(branch, c1, c2, z))
        };
    }
    let h_crit = critical_height(c1, k, g);
    let r = |h: f64| residual(c1, c2, k, h, z, g);
    // Bracket [lo, hi] with R(lo) and R(hi) of opposite sign. `rising` is true
    // when R increases across the bracket (subcritical side).
    let (mut lo, mut hi, rising) = match branch {
        Branch::Subcritical => {
            // R(h) >= g (h + z) - C2, so R(C2/g - z) >= 0.
            let hi = c2 / g - z;
            if !(hi > h_crit && hi.is_finite()) || (c1 != 0.0 && r(h_crit) > 0.0) {
                return Err(no_root(branch, c1, c2, z));
            }
            (h_crit, hi, true)
        }
        Branch::Supercritical => {
            let head = c2 - g * z;
            if c1 == 0.0 || !(head > 0.0) || r(h_crit) > 0.0 {
                return Err(no_root(branch, c1, c2, z));
            }
            // R(h) >= C1^2/(2h^2) + g z - C2, so R(|C1| / sqrt(2 (C2 - g z))) >= 0.
            let lo = c1.abs() / (2.0 * head).sqrt();
            if !(lo < h_crit && h_crit.is_finite()) {
                return Err(no_root(branch, c1, c2, z));
            }
            (lo, h_crit, false)
        }
        Branch::Trivial => return Err(no_root(branch, c1, c2, z)),
    };

    let mut h = if h_guess.is_finite() && h_guess > lo && h_guess < hi {
        h_guess
    } else {
        0.5 * (lo + hi)
    };
    let scale = c2.abs().max(1.0);
    for iter in 1..=MAX_NEWTON_ITER {
        let f = r(h);
        if f == 0.0 {
            return Ok((h, iter));
        }
        if (f < 0.0) == rising {
            lo = h;
        } else {
            hi = h;
        }
        let df = residual_derivative(c1, k, h, g);
        let mut next = h - f / df;
        // A root at the bracket end can be overshot by rounding alone.
        let snap = 1e-12 * hi;
        if next > hi && next <= hi + snap {
            next = hi;
        } else if next < lo && next >= lo - snap {
            next = lo;
        }
        if !(next >= lo && next <= hi) || !next.is_finite() {
            next = 0.5 * (lo + hi);
        }
        let step = next - h;
        h = next;
        if step.abs() <= 4.0 * f64::EPSILON * h {
            if r(h).abs() <= RESIDUAL_TOL * scale {
                return Ok((h, iter));
            }
            return Err(no_root(branch, c1, c2, z));
        }
    }
    Err(no_root(branch, c1, c2, z))
}

/// Stationary solution through one cell state, evaluable anywhere in x.
#[derive(Clone, Debug, PartialEq)]
pub struct SteadyProfile {
    pub constants: SteadyConstants,
    pub branch: Branch,
    pub h_ref: f64,
    pub x_ref: f64,
    pub z_ref: f64,
    /// Anchoring state with `pi` relaxed.
    anchor: State,
}

impl SteadyProfile {
    pub fn c1(&self) -> f64 {
        self.constants.c1
    }

    pub fn c2(&self) -> f64 {
        self.constants.c2
    }

    pub fn ck(&self) -> &[f64] {
        &self.constants.ck
    }

    pub fn anchor(&self) -> &State {
        &self.anchor
    }

    pub fn is_trivial(&self) -> bool {
        self.branch == Branch::Trivial
    }

    /// Same anchor, constant extension.
    pub fn into_trivial(mut self) -> Self {
        self.branch = Branch::Trivial;
        self
    }

    /// Algebraic steady residual at elevation `z` and height `h`.
    pub fn residual(&self, h: f64, z: f64, g: f64) -> f64 {
        self.constants.residual(h, z, g)
    }
}

/// Invariants of the stationary solution passing through `s` at elevation `z_center`.
pub fn steady_constants(s: &State, x_ref: f64, z_center: f64, p: &ModelParams) -> Result<SteadyProfile> {
    let h = s.h();
    if !(h > 0.0) {
        return Err(Error::Domain(format!(
            "steady anchoring needs positive height, got {h}"
        )));
    }
    let u0 = s.u(0);
    let n = s.n_moments();
    let mut c2 = 0.5 * u0 * u0 + p.g * (h + z_center);
    let mut ck = Vec::with_capacity(n);
    let mut moments = 0.0;
    for i in 1..=n {
        let ui = s.u(i);
        moments += ui * ui / (2 * i + 1) as f64;
        ck.push(ui / h);
    }
    c2 += 1.5 * moments;
    let constants = SteadyConstants::new(s.q(0), c2, ck);
    let mut branch = classify_branch(s, p);
    // Froude classification ignores the moments; the branch must still contain the anchor.
    let h_crit = constants.critical_height(p.g);
    match branch {
        Branch::Subcritical if h < h_crit => branch = Branch::Trivial,
        Branch::Supercritical if h > h_crit => branch = Branch::Trivial,
        _ => {}
    }
    let mut anchor = s.clone();
    anchor.relax(p.g);
    Ok(SteadyProfile {
        constants,
        branch,
        h_ref: h,
        x_ref,
        z_ref: z_center,
        anchor,
    })
}

/// Height of `profile` at elevation `z_x`. Trivial profiles return `h_ref`.
pub fn steady_height(profile: &SteadyProfile, z_x: f64, p: &ModelParams, h_guess: f64) -> Result<f64> {
    steady_height_iter(profile, z_x, p, h_guess).map(|(h, _)| h)
}

pub(crate) fn steady_height_iter(
    profile: &SteadyProfile,
    z_x: f64,
    p: &ModelParams,
    h_guess: f64,
) -> Result<(f64, usize)> {
    if !(h_guess > 0.0) {
        return Err(Error::Domain(format!("Newton guess must be positive, got {h_guess}")));
    }
    if profile.is_trivial() || z_x == profile.z_ref {
        return Ok((profile.h_ref, 0));
    }
    profile
        .constants
        .solve_height(z_x, p.g, profile.branch, h_guess)
}

/// `U^e(x)` in conserved form, `pi^e = g h^2 / 2`.
pub fn steady_eval(profile: &SteadyProfile, x: f64, topo: &Topography, p: &ModelParams) -> Result<State> {
    steady_eval_iter(profile, topo.z(x), p).map(|(s, _)| s)
}

fn steady_eval_iter(profile: &SteadyProfile, z_x: f64, p: &ModelParams) -> Result<(State, usize)> {
    if profile.is_trivial() || z_x == profile.z_ref {
        return Ok((profile.anchor.clone(), 0));
    }
    let (h, iters) = steady_height_iter(profile, z_x, p, profile.h_ref)?;
    Ok((profile.constants.state_from_height(h, p.g), iters))
}

/// Sample slots of [`CellSteady::samples`].
pub const LEFT_CENTER: usize = 0;
pub const LEFT_FACE: usize = 1;
pub const CENTER: usize = 2;
pub const RIGHT_FACE: usize = 3;
pub const RIGHT_CENTER: usize = 4;

/// A cell's profile sampled on its stencil:
/// `x_{i-1}`, `x_{i-1/2}`, `x_i`, `x_{i+1/2}`, `x_{i+1}`.
#[derive(Clone, Debug)]
pub struct CellSteady {
    pub profile: SteadyProfile,
    pub state: State,
    pub samples: [State; 5],
}

/// Profiles of every cell plus [`N_GHOST`] ghost cells per side, frozen at
/// the start of a substep.
#[derive(Clone, Debug)]
pub struct SteadyField {
    cells: Vec<CellSteady>,
    n_cells: usize,
    /// Cells whose profile fell back to the trivial branch.
    pub fallbacks: usize,
    pub max_newton_iterations: usize,
}

impl SteadyField {
    /// Anchor a profile in every cell. With `neighbors = false` the
    /// neighbour-center samples are not evaluated (first-order stencils).
    pub fn build(field: &Field, grid: &Grid, topo: &Topography, p: &ModelParams, neighbors: bool) -> Result<Self> {
        let n = field.n_cells();
        let mut out = SteadyField {
            cells: Vec::with_capacity(n + 2 * N_GHOST),
            n_cells: n,
            fallbacks: 0,
            max_newton_iterations: 0,
        };

        let mut interior = Vec::with_capacity(n);
        for i in 0..n {
            let s = field.state(i);
            if !(s.h() > 0.0) {
                return Err(Error::Positivity {
                    cell: i,
                    time: f64::NAN,
                    variable: "h",
                    value: s.h(),
                });
            }
            let x = grid.center(i as isize);
            let profile = steady_constants(&s, x, topo.z(x), p)?;
            interior.push((profile, s));
        }

        let ghosts_left: Vec<_> = (1..=N_GHOST as isize)
            .rev()
            .map(|k| out.ghost(&interior[0], -k, grid, topo, p))
            .collect();
        let ghosts_right: Vec<_> = (0..N_GHOST as isize)
            .map(|k| out.ghost(&interior[n - 1], n as isize + k, grid, topo, p))
            .collect();

        let positions: Vec<isize> = (-(N_GHOST as isize)..(n + N_GHOST) as isize).collect();
        let anchored = ghosts_left.into_iter().chain(interior).chain(ghosts_right);
        for (j, (profile, state)) in positions.into_iter().zip(anchored) {
            let cell = out.sample(profile, state, j, grid, topo, p, neighbors);
            out.cells.push(cell);
        }
        Ok(out)
    }

    /// Ghost at index `j`: the boundary profile extended to the ghost center,
    /// carrying the boundary cell's fluctuation.
    fn ghost(
        &mut self,
        boundary: &(SteadyProfile, State),
        j: isize,
        grid: &Grid,
        topo: &Topography,
        p: &ModelParams,
    ) -> (SteadyProfile, State) {
        let (profile, state) = boundary;
        let x = grid.center(j);
        match steady_eval_iter(profile, topo.z(x), p) {
            Ok((at_ghost, _)) => {
                let at_anchor = profile.anchor();
                let mut s = at_ghost;
                for k in 0..s.len() {
                    s[k] += state[k] - at_anchor[k];
                }
                (profile.clone(), s)
            }
            Err(_) => {
                self.fallbacks += 1;
                (profile.clone().into_trivial(), state.clone())
            }
        }
    }

    #[allow(clippy::too_many_arguments)]
    fn sample(
        &mut self,
        profile: SteadyProfile,
        state: State,
        j: isize,
        grid: &Grid,
        topo: &Topography,
        p: &ModelParams,
        neighbors: bool,
    ) -> CellSteady {
        let xs = [
            grid.center(j - 1),
            grid.interface(j),
            grid.center(j),
            grid.interface(j + 1),
            grid.center(j + 1),
        ];
        let mut eval_all = |profile: &SteadyProfile| -> Result<[State; 5]> {
            let mut at = |k: usize| -> Result<State> {
                if !neighbors && (k == LEFT_CENTER || k == RIGHT_CENTER) {
                    return Ok(profile.anchor().clone());
                }
                let (s, iters) = steady_eval_iter(profile, topo.z(xs[k]), p)?;
                self.max_newton_iterations = self.max_newton_iterations.max(iters);
                Ok(s)
            };
            Ok([at(0)?, at(1)?, at(2)?, at(3)?, at(4)?])
        };
        match eval_all(&profile) {
            Ok(samples) => CellSteady {
                profile,
                state,
                samples,
            },
            Err(_) => {
                self.fallbacks += 1;
                // Re-anchor on the cell's own state so the constant extension
                // reproduces it.
                let x = xs[CENTER];
                let profile = steady_constants(&state, x, topo.z(x), p)
                    .map(SteadyProfile::into_trivial)
                    .unwrap_or_else(|_| profile.into_trivial());
                let a = profile.anchor().clone();
                CellSteady {
                    profile,
                    state,
                    samples: [a.clone(), a.clone(), a.clone(), a.clone(), a],
                }
            }
        }
    }

    pub fn n_cells(&self) -> usize {
        self.n_cells
    }

    /// Cell `i`, where `-2 <= i < n + 2` reaches into the ghost layers.
    #[inline]
    pub fn cell(&self, i: isize) -> &CellSteady {
        &self.cells[(i + N_GHOST as isize) as usize]
    }

    pub fn cells(&self) -> &[CellSteady] {
        &self.cells
    }
}
