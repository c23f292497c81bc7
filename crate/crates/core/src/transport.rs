//! Material (transport) substep: HLL fluxes plus path-averaged
//! non-conservative fluctuations, written relative to each cell's stationary
//! profile.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::field::Field;
use crate::grid::Grid;
use crate::model::{apply_b, eigenvalues_full, eigenvalues_transport, flux_transport, FluxVector, ModelParams, State};
use crate::reconstruction::{LimiterPairing, Order, ScalarReconstruction};
use crate::steady::{SteadyField, LEFT_FACE, RIGHT_FACE};

/// Eigenvalues used for the HLL speed estimates.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum WaveSpeedMode {
    /// `u_0 -+ sqrt(sum 3 u_i^2 / (2i+1))`, the speeds of the transport subsystem.
    #[default]
    Transport,
    /// `u_0 -+ sqrt(g h + sum 3 u_i^2 / (2i+1))`.
    Full,
}

impl FromStr for WaveSpeedMode {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "transport" => Ok(WaveSpeedMode::Transport),
            "full" => Ok(WaveSpeedMode::Full),
            other => Err(format!("unknown wave speed mode '{other}' (transport|full)")),
        }
    }
}

impl fmt::Display for WaveSpeedMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            WaveSpeedMode::Transport => "transport",
            WaveSpeedMode::Full => "full",
        })
    }
}

/// `(S^L, S^R)` from the extreme eigenvalues of both sides.
pub fn wave_speeds(left: &State, right: &State, p: &ModelParams, mode: WaveSpeedMode) -> (f64, f64) {
    let eig = |s: &State| match mode {
        WaveSpeedMode::Transport => eigenvalues_transport(s),
        WaveSpeedMode::Full => eigenvalues_full(s, p),
    };
    let (l_min, l_max) = eig(left);
    let (r_min, r_max) = eig(right);
    (l_min.min(r_min), l_max.max(r_max))
}

/// HLL coefficients `(alpha_0, alpha_1)`. When both speeds coincide the
/// limit of the formulas is taken: pure upwinding, or the centered flux at
/// zero speed.
pub fn hll_coefficients(s_left: f64, s_right: f64) -> (f64, f64) {
    let width = s_right - s_left;
    if width > 0.0 {
        (
            (s_right * s_left.abs() - s_left * s_right.abs()) / width,
            (s_right.abs() - s_left.abs()) / width,
        )
    } else if s_left > 0.0 {
        (0.0, 1.0)
    } else if s_left < 0.0 {
        (0.0, -1.0)
    } else {
        (0.0, 0.0)
    }
}

/// One interface with its one-sided reconstructed states.
#[derive(Clone, Debug)]
pub struct InterfaceData {
    pub left: State,
    pub right: State,
    pub s_left: f64,
    pub s_right: f64,
    pub alpha0: f64,
    pub alpha1: f64,
}

impl InterfaceData {
    pub fn new(left: State, right: State, p: &ModelParams, mode: WaveSpeedMode) -> Self {
        let (s_left, s_right) = wave_speeds(&left, &right, p, mode);
        Self::with_speeds(left, right, s_left, s_right)
    }

    pub fn with_speeds(left: State, right: State, s_left: f64, s_right: f64) -> Self {
        let (alpha0, alpha1) = hll_coefficients(s_left, s_right);
        Self {
            left,
            right,
            s_left,
            s_right,
            alpha0,
            alpha1,
        }
    }

    /// `(F_L + F_R)/2 - (alpha_0 (U_R - U_L) + alpha_1 (F_R - F_L)) / 2`.
    pub fn flux(&self) -> FluxVector {
        hll_flux(&self.left, &self.right, self.alpha0, self.alpha1)
    }

    /// `(B_-, B_+)` with `B_-+ = (1 -+ alpha_1) B(avg) (U_R - U_L) / 2`.
    pub fn fluctuations(&self) -> (FluxVector, FluxVector) {
        nonconservative_fluctuations(&self.left, &self.right, self.alpha1)
    }
}

pub fn hll_flux(left: &State, right: &State, alpha0: f64, alpha1: f64) -> FluxVector {
    let fl = flux_transport(left);
    let fr = flux_transport(right);
    FluxVector::from_fn(fl.len(), |k| {
        0.5 * (fl[k] + fr[k]) - 0.5 * (alpha0 * (right[k] - left[k]) + alpha1 * (fr[k] - fl[k]))
    })
}

pub fn nonconservative_fluctuations(left: &State, right: &State, alpha1: f64) -> (FluxVector, FluxVector) {
    let width = left.len();
    let avg = State::from_slice(
        &(0..width)
            .map(|k| 0.5 * (left[k] + right[k]))
            .collect::<Vec<_>>(),
    );
    let jump: Vec<f64> = (0..width).map(|k| right[k] - left[k]).collect();
    let bj = apply_b(&avg, &jump);
    let minus = FluxVector::from_fn(width, |k| 0.5 * (1.0 - alpha1) * bj[k]);
    let plus = FluxVector::from_fn(width, |k| 0.5 * (1.0 + alpha1) * bj[k]);
    (minus, plus)
}

/// Fluxes of `h` through the two domain boundaries during one substep.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct BoundaryFlux {
    /// Mass flux through `x_left`, positive into the domain.
    pub left: f64,
    /// Mass flux through `x_right`, positive out of the domain.
    pub right: f64,
}

/// Advance every component except `h pi` over `dt`.
#[allow(clippy::too_many_arguments)]
pub fn transport_explicit(
    field: &mut Field,
    steady: &SteadyField,
    grid: &Grid,
    p: &ModelParams,
    dt: f64,
    order: Order,
    pairing: LimiterPairing,
    speeds: WaveSpeedMode,
) -> Result<BoundaryFlux> {
    let n = field.n_cells();
    if steady.n_cells() != n {
        return Err(Error::GridMismatch(format!(
            "{} cells in field, {} in steady profiles",
            n,
            steady.n_cells()
        )));
    }
    let width = field.width();
    let moving = width - 1;
    let cells = steady.cells();

    let recon: Vec<ScalarReconstruction> = (0..moving)
        .map(|k| {
            let values = cells.iter().map(|c| c.state[k]).collect();
            ScalarReconstruction::build(values, |j, slot| cells[j].samples[slot][k], order, grid.dx, pairing)
        })
        .collect();

    let face_state = |pick: &dyn Fn(&ScalarReconstruction) -> f64, cell: usize| -> Result<State> {
        let mut s = State::zeros(width - 3);
        for (k, r) in recon.iter().enumerate() {
            s[k] = pick(r);
        }
        if !(s.h() > 0.0) {
            return Err(Error::Positivity {
                cell,
                time: f64::NAN,
                variable: "reconstructed h",
                value: s.h(),
            });
        }
        Ok(s)
    };

    // Interface k sits at x_{k-1/2}; cells k-1 and k meet there.
    let mut minus = Vec::with_capacity(n + 1);
    let mut plus = Vec::with_capacity(n + 1);
    let mut fluxes = Vec::with_capacity(n + 1);
    let mut fluct = Vec::with_capacity(n + 1);
    for k in 0..=n {
        let ul = face_state(&|r| r.face_minus(k), k.saturating_sub(1).min(n - 1))?;
        let ur = face_state(&|r| r.face_plus(k), k.min(n - 1))?;
        let iface = InterfaceData::new(ul, ur, p, speeds);
        fluxes.push(iface.flux());
        fluct.push(iface.fluctuations());
        minus.push(iface.left);
        plus.push(iface.right);
    }

    if dt == 0.0 {
        return Ok(BoundaryFlux::default());
    }
    let ratio = dt / grid.dx;
    for i in 0..n {
        let cell = steady.cell(i as isize);
        let eq_r = &cell.samples[RIGHT_FACE];
        let eq_l = &cell.samples[LEFT_FACE];
        let fe_r = flux_transport(eq_r);
        let fe_l = flux_transport(eq_l);
        let inner: Vec<f64> = (0..width)
            .map(|k| (minus[i + 1][k] - eq_r[k]) - (plus[i][k] - eq_l[k]))
            .collect();
        let b_in = apply_b(&cell.state, &inner);
        let (b_minus_right, _) = &fluct[i + 1];
        let (_, b_plus_left) = &fluct[i];
        let (fr, fl) = (&fluxes[i + 1], &fluxes[i]);
        let out = field.cell_mut(i);
        for k in 0..moving {
            let div = (fr[k] - fe_r[k]) - (fl[k] - fe_l[k]);
            out[k] -= ratio * (div + b_minus_right[k] + b_plus_left[k] + b_in[k]);
        }
    }
    Ok(BoundaryFlux {
        left: fluxes[0][0] * dt,
        right: fluxes[n][0] * dt,
    })
}
