//! Acoustic (pressure) substep in Riemann invariants `w_f = pi + a u_0` and
//! `w_b = pi - a u_0`.
//!
//! With `h` frozen, the relaxed pressure system reduces to two linear
//! advection equations with speeds `+a/h` and `-a/h`. Interface values are
//! upwinded: `w_f` from the left cell, `w_b` from the right cell. Both are
//! measured against each cell's stationary profile so that steady data is a
//! fixed point. Only `hu_0` and `h pi` change.

use std::fmt;
use std::str::FromStr;

use crate::banded::BandedSystem;
use crate::error::{Error, Result};
use crate::field::Field;
use crate::grid::{Grid, Topography, N_GHOST};
use crate::model::ModelParams;
use crate::reconstruction::{LimiterPairing, Order, ScalarReconstruction};
use crate::steady::{SteadyField, LEFT_FACE, RIGHT_FACE};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Mode {
    #[default]
    Explicit,
    Implicit,
}

impl FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "explicit" => Ok(Mode::Explicit),
            "implicit" => Ok(Mode::Implicit),
            other => Err(format!("unknown mode '{other}' (explicit|implicit)")),
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Explicit => "explicit",
            Mode::Implicit => "implicit",
        })
    }
}

/// Everything the pressure update needs, frozen at the substep's initial time.
#[derive(Clone, Debug)]
pub struct PressureSetup {
    pub wf: ScalarReconstruction,
    pub wb: ScalarReconstruction,
    /// `a dt / (h_i dx)` per interior cell.
    pub mu: Vec<f64>,
    /// Explicit residual of the `w_f` equation: `w_f' = -mu r_f`.
    pub r_f: Vec<f64>,
    /// Explicit residual of the `w_b` equation: `w_b' = +mu r_b`.
    pub r_b: Vec<f64>,
    pub order: Order,
    pub pairing: LimiterPairing,
}

impl PressureSetup {
    pub fn new(
        steady: &SteadyField,
        grid: &Grid,
        topo: &Topography,
        p: &ModelParams,
        dt: f64,
        order: Order,
        pairing: LimiterPairing,
    ) -> Self {
        let n = steady.n_cells();
        let a = p.relaxation_speed;
        let cells = steady.cells();
        let w = |s: &crate::model::State, sign: f64| s.pi() + sign * a * s.u(0);
        let build = |sign: f64| {
            let values = cells.iter().map(|c| w(&c.state, sign)).collect();
            ScalarReconstruction::build(
                values,
                |j, slot| w(&cells[j].samples[slot], sign),
                order,
                grid.dx,
                pairing,
            )
        };
        let wf = build(1.0);
        let wb = build(-1.0);

        let mut mu = Vec::with_capacity(n);
        let mut r_f = Vec::with_capacity(n);
        let mut r_b = Vec::with_capacity(n);
        for i in 0..n {
            let cell = steady.cell(i as isize);
            let h = cell.state.h();
            mu.push(a * dt / (h * grid.dx));
            let (corr_f, corr_b) = if cell.profile.is_trivial() {
                // A constant profile does not balance the bottom slope; the
                // source integral is kept as a pressure-like jump.
                let dz = topo.z(grid.interface(i as isize + 1)) - topo.z(grid.interface(i as isize));
                let dpi = -p.g * h * dz;
                (dpi, dpi)
            } else {
                let (l, r) = (&cell.samples[LEFT_FACE], &cell.samples[RIGHT_FACE]);
                (w(r, 1.0) - w(l, 1.0), w(r, -1.0) - w(l, -1.0))
            };
            r_f.push(wf.face_minus(i + 1) - wf.face_minus(i) - corr_f);
            r_b.push(wb.face_plus(i + 1) - wb.face_plus(i) - corr_b);
        }
        Self {
            wf,
            wb,
            mu,
            r_f,
            r_b,
            order,
            pairing,
        }
    }

    pub fn n_cells(&self) -> usize {
        self.mu.len()
    }

    /// Coefficients `(c_minus, c_plus)` of the backward and forward
    /// differences in the frozen time-fluctuation slope of ghosted cell `e`,
    /// already multiplied by `dx / 2`.
    fn half_slope_coeffs(&self, recon: &ScalarReconstruction, e: usize) -> (f64, f64) {
        if self.order == Order::First {
            return (0.0, 0.0);
        }
        let (wm, wp) = recon.weights[e];
        match self.pairing {
            LimiterPairing::Cross => (0.5 * wp, 0.5 * wm),
            LimiterPairing::SameSide => (0.5 * wm, 0.5 * wp),
        }
    }

    /// Linear systems for the increments of `w_f` and `w_b` over the substep.
    pub fn assemble(&self) -> (BandedSystem, BandedSystem) {
        let n = self.n_cells();
        let g = N_GHOST as isize;
        let clamp = |j: isize| j.clamp(0, n as isize - 1) as usize;

        // Face value perturbation of ghosted cell j on its right (sign=+1) or
        // left (sign=-1) face, as (column offset, coefficient) triples.
        let face = |recon: &ScalarReconstruction, j: isize, sign: f64| -> [(isize, f64); 3] {
            let (cm, cp) = self.half_slope_coeffs(recon, (j + g) as usize);
            // delta_j + sign * (cm (d_j - d_{j-1}) + cp (d_{j+1} - d_j))
            [
                (j - 1, -sign * cm),
                (j, 1.0 + sign * (cm - cp)),
                (j + 1, sign * cp),
            ]
        };

        let mut fwd = BandedSystem::new(n, 2, 1);
        let mut bwd = BandedSystem::new(n, 1, 2);
        for i in 0..n {
            let ii = i as isize;
            let mu = self.mu[i];
            fwd.add(i, i, 1.0);
            for (j, c) in face(&self.wf, ii, 1.0) {
                fwd.add(i, clamp(j), mu * c);
            }
            for (j, c) in face(&self.wf, ii - 1, 1.0) {
                fwd.add(i, clamp(j), -mu * c);
            }
            fwd.set_rhs(i, -mu * self.r_f[i]);

            bwd.add(i, i, 1.0);
            for (j, c) in face(&self.wb, ii + 1, -1.0) {
                bwd.add(i, clamp(j), -mu * c);
            }
            for (j, c) in face(&self.wb, ii, -1.0) {
                bwd.add(i, clamp(j), mu * c);
            }
            bwd.set_rhs(i, mu * self.r_b[i]);
        }
        (fwd, bwd)
    }
}

/// Advance `hu_0` and `h pi` over `dt`. `steady` must be anchored on `field`
/// after `pi` was reset to equilibrium.
#[allow(clippy::too_many_arguments)]
pub fn pressure_step(
    field: &mut Field,
    steady: &SteadyField,
    grid: &Grid,
    topo: &Topography,
    p: &ModelParams,
    dt: f64,
    order: Order,
    mode: Mode,
    pairing: LimiterPairing,
) -> Result<()> {
    let n = field.n_cells();
    if steady.n_cells() != n {
        return Err(Error::GridMismatch(format!(
            "{} cells in field, {} in steady profiles",
            n,
            steady.n_cells()
        )));
    }
    if dt == 0.0 {
        return Ok(());
    }
    let setup = PressureSetup::new(steady, grid, topo, p, dt, order, pairing);
    let a = p.relaxation_speed;
    let q0 = 1;
    let hpi = field.width() - 1;
    match mode {
        Mode::Explicit => {
            let ratio = dt / grid.dx;
            for i in 0..n {
                let (rf, rb) = (setup.r_f[i], setup.r_b[i]);
                let cell = field.cell_mut(i);
                cell[q0] -= ratio * 0.5 * (rf + rb);
                cell[hpi] -= ratio * a * 0.5 * (rf - rb);
            }
        }
        Mode::Implicit => {
            let (fwd, bwd) = setup.assemble();
            let df = fwd.solve()?;
            let db = bwd.solve()?;
            for i in 0..n {
                let cell = field.cell_mut(i);
                let h = cell[0];
                cell[q0] += h * (df[i] - db[i]) / (2.0 * a);
                cell[hpi] += h * 0.5 * (df[i] + db[i]);
            }
        }
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
pub fn pressure_explicit(
    field: &mut Field,
    steady: &SteadyField,
    grid: &Grid,
    topo: &Topography,
    p: &ModelParams,
    dt: f64,
    order: Order,
    pairing: LimiterPairing,
) -> Result<()> {
    pressure_step(field, steady, grid, topo, p, dt, order, Mode::Explicit, pairing)
}

#[allow(clippy::too_many_arguments)]
pub fn pressure_implicit(
    field: &mut Field,
    steady: &SteadyField,
    grid: &Grid,
    topo: &Topography,
    p: &ModelParams,
    dt: f64,
    order: Order,
    pairing: LimiterPairing,
) -> Result<()> {
    pressure_step(field, steady, grid, topo, p, dt, order, Mode::Implicit, pairing)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cases::{build_ic, TestCase};
    use crate::model::{relaxation_speed_from_heights, State};

    const G: f64 = 9.812;

    struct Setup {
        grid: Grid,
        topo: Topography,
        params: ModelParams,
        field: Field,
    }

    fn setup(field: Field, grid: Grid, topo: Topography) -> Setup {
        let n = field.n_moments();
        let a = relaxation_speed_from_heights(field.heights(), G).unwrap();
        let mut field = field;
        field.relax(G);
        Setup {
            grid,
            topo,
            params: ModelParams::new(G, n, a).unwrap(),
            field,
        }
    }

    fn case(case: TestCase, n: usize) -> Setup {
        let d = case.defaults();
        let grid = Grid::new(d.x_left, d.x_right, n).unwrap();
        let field = build_ic(case, &grid, &d.topography, G, d.n_moments, 0.0).unwrap();
        setup(field, grid, d.topography)
    }

    fn step(s: &Setup, dt: f64, order: Order, mode: Mode) -> Field {
        let steady = SteadyField::build(&s.field, &s.grid, &s.topo, &s.params, order == Order::Second).unwrap();
        let mut out = s.field.clone();
        pressure_step(&mut out, &steady, &s.grid, &s.topo, &s.params, dt, order, mode, LimiterPairing::Cross).unwrap();
        out
    }

    fn smooth(n: usize, n_moments: usize) -> Setup {
        let grid = Grid::new(0.0, 1.0, n).unwrap();
        let states: Vec<State> = grid
            .centers()
            .iter()
            .map(|&x| {
                let mut u = vec![0.0; n_moments + 1];
                u[0] = 0.3 * (2.0 * std::f64::consts::PI * x).sin();
                if n_moments > 0 {
                    u[1] = 0.01 * x;
                }
                State::from_primitive(1.0 + 0.2 * (std::f64::consts::PI * x).cos(), &u, 0.0)
            })
            .collect();
        setup(Field::from_states(&states).unwrap(), grid, Topography::Flat { level: 0.0 })
    }

    #[test]
    fn steady_states_are_fixed_points() {
        for tc in [TestCase::LakeAtRest, TestCase::Subcritical, TestCase::Moments] {
            let s = case(tc, 100);
            for order in [Order::First, Order::Second] {
                for mode in [Mode::Explicit, Mode::Implicit] {
                    let dt = if mode == Mode::Implicit { 0.05 } else { 1e-3 };
                    let out = step(&s, dt, order, mode);
                    for i in 0..100 {
                        for (a, b) in out.cell(i).iter().zip(s.field.cell(i)) {
                            assert!((a - b).abs() <= 1e-12 * b.abs().max(1.0), "{tc} {order} {mode} cell {i}");
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn explicit_first_order_matches_interface_fluxes() {
        // Three cells on a flat bottom; fluxes built from pi* and u* at each face.
        let grid = Grid::new(0.0, 0.3, 3).unwrap();
        let states = [
            State::from_primitive(2.0, &[0.25, -0.005], 0.0),
            State::from_primitive(1.5, &[0.8, 0.01], 0.0),
            State::from_primitive(1.0, &[0.25, 0.0], 0.0),
        ];
        let s = setup(Field::from_states(&states).unwrap(), grid, Topography::Flat { level: 0.0 });
        let a = s.params.relaxation_speed;
        let dt = 1e-3;
        let out = step(&s, dt, Order::First, Mode::Explicit);

        let pi: Vec<f64> = states.iter().map(|st| 0.5 * G * st.h() * st.h()).collect();
        let u: Vec<f64> = states.iter().map(|st| st.u(0)).collect();
        let at = |k: isize| k.clamp(0, 2) as usize;
        let face = |k: isize| {
            let (l, r) = (at(k - 1), at(k));
            let wf = pi[l] + a * u[l];
            let wb = pi[r] - a * u[r];
            (0.5 * (wf + wb), (wf - wb) / (2.0 * a))
        };
        for i in 0..3 {
            let (p_l, u_l) = face(i as isize);
            let (p_r, u_r) = face(i as isize + 1);
            let q = states[i].q(0) - dt / 0.1 * (p_r - p_l);
            let hpi = states[i].h() * pi[i] - dt / 0.1 * a * a * (u_r - u_l);
            let c = out.cell(i);
            assert!((c[1] - q).abs() < 1e-13, "cell {i}: {} vs {q}", c[1]);
            assert!((c[3] - hpi).abs() < 1e-12 * hpi.abs(), "cell {i}");
            assert_eq!(c[0], states[i].h());
            assert_eq!(c[2], states[i].q(1));
        }
    }

    #[test]
    fn only_momentum_and_pressure_change() {
        let s = smooth(40, 3);
        for mode in [Mode::Explicit, Mode::Implicit] {
            let out = step(&s, 5e-3, Order::Second, mode);
            for i in 0..40 {
                let (a, b) = (out.cell(i), s.field.cell(i));
                assert_eq!(a[0], b[0]);
                assert_eq!(&a[2..5], &b[2..5]);
            }
        }
    }

    #[test]
    fn implicit_approaches_explicit_as_dt_shrinks() {
        let s = smooth(50, 1);
        // Largest implicit/explicit gap relative to the explicit increment.
        let gap = |dt: f64| {
            let e = step(&s, dt, Order::Second, Mode::Explicit);
            let i = step(&s, dt, Order::Second, Mode::Implicit);
            let max = |f: &dyn Fn(usize) -> f64| (0..50).map(f).fold(0.0, f64::max);
            max(&|k| (e.cell(k)[1] - i.cell(k)[1]).abs()) / max(&|k| (e.cell(k)[1] - s.field.cell(k)[1]).abs())
        };
        let (g1, g2, g3) = (gap(2.5e-4), gap(1.25e-4), gap(6.25e-5));
        assert!(g1 / g2 > 1.8 && g2 / g3 > 1.8, "{g1} {g2} {g3}");
        assert!(g3 < 0.1, "{g3}");
    }

    #[test]
    fn first_order_systems_are_diagonally_dominant() {
        let s = smooth(30, 0);
        let steady = SteadyField::build(&s.field, &s.grid, &s.topo, &s.params, false).unwrap();
        for dt in [1e-4, 1e-2, 1.0] {
            let setup = PressureSetup::new(&steady, &s.grid, &s.topo, &s.params, dt, Order::First, LimiterPairing::Cross);
            let (fwd, bwd) = setup.assemble();
            assert!(fwd.diagonally_dominant() && bwd.diagonally_dominant());
            assert_eq!(fwd.bandwidths(), (2, 1));
            assert_eq!(bwd.bandwidths(), (1, 2));
        }
    }

    #[test]
    fn zero_step_and_layout_errors() {
        let s = smooth(10, 0);
        assert_eq!(step(&s, 0.0, Order::Second, Mode::Implicit), s.field);
        let steady = SteadyField::build(&s.field, &s.grid, &s.topo, &s.params, false).unwrap();
        let mut short = Field::new(5, 0);
        let r = pressure_step(&mut short, &steady, &s.grid, &s.topo, &s.params, 1e-3, Order::First, Mode::Explicit, LimiterPairing::Cross);
        assert!(matches!(r, Err(Error::GridMismatch(_))));
        assert_eq!("implicit".parse::<Mode>().unwrap(), Mode::Implicit);
        assert!("sideways".parse::<Mode>().is_err());
    }
}
