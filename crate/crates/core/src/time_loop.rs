//! Time stepping: CFL control, relaxation reset, profile refresh and the
//! first-order (pressure then transport) and Strang (T/2, P, T/2) compositions.

use std::time::Instant;

use crate::error::{Error, Result};
use crate::field::Field;
use crate::grid::{Grid, Topography};
use crate::model::{eigenvalues_transport, relaxation_speed_from_heights, ModelParams};
use crate::pressure::{pressure_step, Mode};
use crate::reconstruction::{LimiterPairing, Order};
use crate::steady::SteadyField;
use crate::transport::{transport_explicit, WaveSpeedMode};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SchemeConfig {
    pub order: Order,
    pub mode: Mode,
    pub cfl: f64,
    pub pairing: LimiterPairing,
    pub wave_speeds: WaveSpeedMode,
    /// Upper bound on implicit steps; `None` means `t_end / 10`.
    pub dt_max: Option<f64>,
}

impl Default for SchemeConfig {
    fn default() -> Self {
        Self {
            order: Order::First,
            mode: Mode::Explicit,
            cfl: 0.9,
            pairing: LimiterPairing::Cross,
            wave_speeds: WaveSpeedMode::Transport,
            dt_max: None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StepPlan {
    pub dt: f64,
    /// `dx min_i h_i / a`.
    pub dt_pressure_limit: f64,
    /// `dx / (2 max |lambda^T|)`, infinite when nothing moves.
    pub dt_transport_limit: f64,
    pub mode: Mode,
    pub order: Order,
}

/// Largest admissible step for the current field.
///
/// Explicit runs take `cfl * min(dt_P, dt_T)`. Implicit runs lift the
/// acoustic bound by the CFL factor but stay under the transport bound:
/// `min(cfl * dt_P, dt_T, dt_max)`.
pub fn compute_dt(field: &Field, grid: &Grid, p: &ModelParams, scheme: &SchemeConfig, dt_max: f64) -> Result<StepPlan> {
    let mut h_min = f64::INFINITY;
    let mut speed = 0.0f64;
    for s in field.states() {
        if !(s.h() > 0.0) {
            return Err(Error::Domain(format!("time step needs positive heights, got {}", s.h())));
        }
        h_min = h_min.min(s.h());
        let (lo, hi) = eigenvalues_transport(&s);
        speed = speed.max(lo.abs()).max(hi.abs());
    }
    let dt_pressure_limit = grid.dx * h_min / p.relaxation_speed;
    let dt_transport_limit = if speed > 0.0 {
        grid.dx / (2.0 * speed)
    } else {
        f64::INFINITY
    };
    let dt = match scheme.mode {
        Mode::Explicit => scheme.cfl * dt_pressure_limit.min(dt_transport_limit),
        Mode::Implicit => (scheme.cfl * dt_pressure_limit).min(dt_transport_limit).min(dt_max),
    };
    if !(dt > 0.0) || !dt.is_finite() {
        return Err(Error::Domain(format!("no admissible time step (dt={dt})")));
    }
    Ok(StepPlan {
        dt,
        dt_pressure_limit,
        dt_transport_limit,
        mode: scheme.mode,
        order: scheme.order,
    })
}

/// Output of [`Solver::run`].
#[derive(Clone, Debug)]
pub struct RunRecord {
    pub scheme: SchemeConfig,
    pub initial: Field,
    pub final_state: Field,
    pub final_time: f64,
    /// `(t, field)` at each requested snapshot time, in increasing order.
    pub snapshots: Vec<(f64, Field)>,
    pub dts: Vec<f64>,
    pub steps: usize,
    /// Wall time of the stepping loop only.
    pub wall_seconds: f64,
    /// Integrated mass flux through the boundaries, inflow minus outflow.
    pub boundary_inflow: f64,
    pub max_newton_iterations: usize,
    /// Profile evaluations that fell back to a constant extension.
    pub fallbacks: usize,
}

impl RunRecord {
    pub fn mean_dt(&self) -> f64 {
        if self.dts.is_empty() {
            0.0
        } else {
            self.dts.iter().sum::<f64>() / self.dts.len() as f64
        }
    }
}

/// A configured scheme on a fixed mesh and bottom.
#[derive(Clone, Debug)]
pub struct Solver {
    pub grid: Grid,
    pub topo: Topography,
    pub params: ModelParams,
    pub scheme: SchemeConfig,
    boundary_inflow: f64,
    max_newton: usize,
    fallbacks: usize,
}

impl Solver {
    pub fn new(grid: Grid, topo: Topography, g: f64, n_moments: usize, scheme: SchemeConfig) -> Result<Self> {
        if !(scheme.cfl > 0.0) {
            return Err(Error::Domain(format!("cfl must be positive, got {}", scheme.cfl)));
        }
        Ok(Self {
            grid,
            topo,
            params: ModelParams::new(g, n_moments, 1.0)?,
            scheme,
            boundary_inflow: 0.0,
            max_newton: 0,
            fallbacks: 0,
        })
    }

    /// Recompute `a = max h sqrt(g h)` from the field.
    pub fn refresh_relaxation_speed(&mut self, field: &Field) -> Result<f64> {
        let a = relaxation_speed_from_heights(field.heights(), self.params.g)?;
        self.params = self.params.with_relaxation_speed(a)?;
        Ok(a)
    }

    fn profiles(&mut self, field: &Field) -> Result<SteadyField> {
        let neighbors = self.scheme.order == Order::Second;
        let steady = SteadyField::build(field, &self.grid, &self.topo, &self.params, neighbors)?;
        self.max_newton = self.max_newton.max(steady.max_newton_iterations);
        self.fallbacks += steady.fallbacks;
        Ok(steady)
    }

    fn pressure(&mut self, field: &mut Field, dt: f64) -> Result<()> {
        field.relax(self.params.g);
        let steady = self.profiles(field)?;
        pressure_step(
            field,
            &steady,
            &self.grid,
            &self.topo,
            &self.params,
            dt,
            self.scheme.order,
            self.scheme.mode,
            self.scheme.pairing,
        )
    }

    fn transport(&mut self, field: &mut Field, dt: f64) -> Result<()> {
        let steady = self.profiles(field)?;
        let flux = transport_explicit(
            field,
            &steady,
            &self.grid,
            &self.params,
            dt,
            self.scheme.order,
            self.scheme.pairing,
            self.scheme.wave_speeds,
        )?;
        self.boundary_inflow += flux.left - flux.right;
        Ok(())
    }

    /// Pressure over `dt`, then transport over `dt` from the intermediate state.
    pub fn advance_o1(&mut self, field: &mut Field, t: f64, dt: f64) -> Result<()> {
        if dt == 0.0 {
            return Ok(());
        }
        self.pressure(field, dt).map_err(|e| e.at_time(t))?;
        self.transport(field, dt).map_err(|e| e.at_time(t))?;
        field.check_positive(t + dt)
    }

    /// Transport over `dt/2`, pressure over `dt`, transport over `dt/2`.
    pub fn advance_o2(&mut self, field: &mut Field, t: f64, dt: f64) -> Result<()> {
        if dt == 0.0 {
            return Ok(());
        }
        self.transport(field, 0.5 * dt).map_err(|e| e.at_time(t))?;
        field.check_positive(t + 0.5 * dt)?;
        self.pressure(field, dt).map_err(|e| e.at_time(t))?;
        self.transport(field, 0.5 * dt).map_err(|e| e.at_time(t + 0.5 * dt))?;
        field.check_positive(t + dt)
    }

    pub fn advance(&mut self, field: &mut Field, t: f64, dt: f64) -> Result<()> {
        match self.scheme.order {
            Order::First => self.advance_o1(field, t, dt),
            Order::Second => self.advance_o2(field, t, dt),
        }
    }

    /// Step from `t = 0` to `t_end`, landing exactly on every snapshot time.
    pub fn run(&mut self, ic: &Field, t_end: f64, snapshot_times: &[f64]) -> Result<RunRecord> {
        if !(t_end >= 0.0) || !t_end.is_finite() {
            return Err(Error::Domain(format!("t_end must be finite and non-negative, got {t_end}")));
        }
        if ic.n_cells() != self.grid.n_cells {
            return Err(Error::GridMismatch(format!(
                "initial field has {} cells, grid has {}",
                ic.n_cells(),
                self.grid.n_cells
            )));
        }
        ic.check_positive(0.0)?;
        self.boundary_inflow = 0.0;
        self.max_newton = 0;
        self.fallbacks = 0;

        let mut targets: Vec<f64> = snapshot_times
            .iter()
            .copied()
            .filter(|&s| s > 0.0 && s < t_end)
            .collect();
        targets.push(t_end);
        targets.sort_by(|a, b| a.partial_cmp(b).expect("finite snapshot times"));
        targets.dedup();

        let dt_max = self.scheme.dt_max.unwrap_or(t_end / 10.0);
        let mut field = ic.clone();
        field.relax(self.params.g);
        let initial = field.clone();
        let mut snapshots = Vec::new();
        let mut dts = Vec::new();
        let mut t = 0.0;
        let clock = Instant::now();
        for &target in &targets {
            while t < target {
                self.refresh_relaxation_speed(&field)?;
                let plan = compute_dt(&field, &self.grid, &self.params, &self.scheme, dt_max)
                    .map_err(|e| e.at_time(t))?;
                let slack = 1e-14 * target.max(1.0);
                let (dt, landing) = if t + plan.dt >= target - slack {
                    (target - t, true)
                } else {
                    (plan.dt, false)
                };
                self.advance(&mut field, t, dt)?;
                dts.push(dt);
                t = if landing { target } else { t + dt };
            }
            if target == t_end || snapshot_times.contains(&target) {
                snapshots.push((target, field.clone()));
            }
        }
        let wall_seconds = clock.elapsed().as_secs_f64();
        Ok(RunRecord {
            scheme: self.scheme,
            initial,
            final_state: field,
            final_time: t,
            snapshots,
            steps: dts.len(),
            dts,
            wall_seconds,
            boundary_inflow: self.boundary_inflow,
            max_newton_iterations: self.max_newton,
            fallbacks: self.fallbacks,
        })
    }
}
