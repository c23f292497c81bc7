//! Drivers behind the command-line tool: single runs, well-balance tables,
//! convergence studies and explicit/implicit timing comparisons.

use std::fmt::Write as _;
use std::path::Path;

use crate::cases::{build_ic, TestCase};
use crate::config::RunConfig;
use crate::error::{Error, Result};
use crate::field::Field;
use crate::grid::{Grid, Topography};
use crate::norms::{l1_error, l1_error_moments, observed_order, restrict_average, total_mass, Variable};
use crate::output::{velocity_profiles_csv, write_snapshot, write_text};
use crate::pressure::Mode;
use crate::reconstruction::Order;
use crate::time_loop::{RunRecord, Solver};

/// Errors at or below this level count as round-off.
pub const WELL_BALANCE_TOL: f64 = 1e-11;

/// A titled table rendered as aligned text and mirrored to CSV.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Table {
    /// File stem of the CSV mirror.
    pub name: String,
    pub title: String,
    pub headers: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(name: &str, title: &str, headers: &[&str]) -> Self {
        Self {
            name: name.into(),
            title: title.into(),
            headers: headers.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        self.rows.push(row);
    }

    pub fn render(&self) -> String {
        let cols = self.headers.len();
        let mut widths: Vec<usize> = self.headers.iter().map(String::len).collect();
        for row in &self.rows {
            for (w, cell) in widths.iter_mut().zip(row) {
                *w = (*w).max(cell.len());
            }
        }
        let line = |cells: &[String]| {
            let parts: Vec<String> = (0..cols)
                .map(|k| format!("{:>w$}", cells.get(k).map_or("", String::as_str), w = widths[k]))
                .collect();
            parts.join("  ")
        };
        let mut out = format!("{}\n{}\n", self.title, line(&self.headers));
        let _ = writeln!(out, "{}", "-".repeat(widths.iter().sum::<usize>() + 2 * cols.saturating_sub(1)));
        for row in &self.rows {
            let _ = writeln!(out, "{}", line(row));
        }
        out
    }

    pub fn to_csv(&self) -> String {
        let mut out = self.headers.join(",");
        out.push('\n');
        for row in &self.rows {
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }
}

/// Tables and summary lines of one command, plus its verdict.
#[derive(Clone, Debug, Default)]
pub struct Report {
    pub tables: Vec<Table>,
    pub notes: Vec<String>,
    pub pass: bool,
}

impl Report {
    pub fn render(&self) -> String {
        let mut out = String::new();
        for t in &self.tables {
            out.push_str(&t.render());
            out.push('\n');
        }
        for n in &self.notes {
            out.push_str(n);
            out.push('\n');
        }
        out.push_str(if self.pass { "PASS\n" } else { "FAIL\n" });
        out
    }

    /// Write each table as `<dir>/<name>.csv`.
    pub fn write_csv(&self, dir: &Path) -> Result<()> {
        for t in &self.tables {
            write_text(&dir.join(format!("{}.csv", t.name)), &t.to_csv())?;
        }
        Ok(())
    }
}

fn sci(v: f64) -> String {
    format!("{v:.3e}")
}

/// Mesh, bottom and initial field for a configuration.
pub fn setup(cfg: &RunConfig) -> Result<(Grid, Topography, Field)> {
    cfg.validate()?;
    let grid = Grid::new(cfg.domain_left, cfg.domain_right, cfg.n_cells)?;
    let topo = cfg.topography()?;
    let ic = build_ic(cfg.test, &grid, &topo, cfg.g, cfg.n_moments, cfg.perturbation_amplitude)?;
    Ok((grid, topo, ic))
}

/// Run `cfg` as configured and return the record with its mesh and bottom.
pub fn simulate(cfg: &RunConfig) -> Result<(RunRecord, Grid, Topography)> {
    let (grid, topo, ic) = setup(cfg)?;
    let mut solver = Solver::new(grid.clone(), topo.clone(), cfg.g, cfg.n_moments, cfg.scheme())?;
    let record = solver.run(&ic, cfg.t_end, &cfg.snapshot_times)?;
    Ok((record, grid, topo))
}

/// Conserved variables compared by the well-balance checks: `h`, then `hu_j`.
fn conserved_variables(n_moments: usize) -> Vec<Variable> {
    std::iter::once(Variable::H)
        .chain((0..=n_moments).map(Variable::Q))
        .collect()
}

fn is_unperturbed_steady(cfg: &RunConfig) -> bool {
    cfg.test.is_steady() && cfg.perturbation_amplitude == 0.0 && cfg.topography_table.is_none()
}

/// Single simulation. Writes `snapshot_t<t>.csv` for every requested time,
/// `final.csv`, and `profiles.csv` when profile points are configured.
pub fn cmd_run(cfg: &RunConfig, out_dir: &Path) -> Result<(RunRecord, Report)> {
    let (record, grid, topo) = simulate(cfg)?;
    for (t, field) in &record.snapshots {
        if *t < cfg.t_end {
            write_snapshot(&out_dir.join(format!("snapshot_t{t}.csv")), field, &grid, &topo)?;
        }
    }
    write_snapshot(&out_dir.join("final.csv"), &record.final_state, &grid, &topo)?;
    if !cfg.profile_points.is_empty() {
        let text = velocity_profiles_csv(&record.final_state, &grid, &cfg.profile_points)?;
        write_text(&out_dir.join("profiles.csv"), &text)?;
    }

    let mut report = Report {
        pass: true,
        ..Default::default()
    };
    let mass0 = total_mass(&record.initial, grid.dx);
    let mass1 = total_mass(&record.final_state, grid.dx);
    report.notes.push(format!(
        "test {} order {} {} cfl {}: t={} steps={} mean_dt={:.4e} wall={:.3}s mass_drift={:.3e}",
        cfg.test,
        cfg.order,
        cfg.mode,
        cfg.cfl,
        record.final_time,
        record.steps,
        record.mean_dt(),
        record.wall_seconds,
        (mass1 - mass0 - record.boundary_inflow) / mass0,
    ));
    if is_unperturbed_steady(cfg) {
        let mut t = Table::new("run_l1", "L1 distance to the initial state (dx-weighted)", &["variable", "L1"]);
        for v in conserved_variables(cfg.n_moments) {
            let e = l1_error(&record.final_state, &record.initial, grid.dx, v)?;
            report.pass &= e <= WELL_BALANCE_TOL;
            t.push(vec![v.to_string(), sci(e)]);
        }
        report.tables.push(t);
    }
    Ok((record, report))
}

/// The four scheme variants: `(order, mode, cfl)`.
pub fn variants(cfg: &RunConfig) -> [(Order, Mode, f64); 4] {
    let explicit_cfl = explicit_cfl(cfg);
    [
        (Order::First, Mode::Explicit, explicit_cfl),
        (Order::First, Mode::Implicit, cfg.cfl_implicit),
        (Order::Second, Mode::Explicit, explicit_cfl),
        (Order::Second, Mode::Implicit, cfg.cfl_implicit),
    ]
}

fn explicit_cfl(cfg: &RunConfig) -> f64 {
    if cfg.mode == Mode::Explicit {
        cfg.cfl
    } else {
        0.9
    }
}

fn variant_label(order: Order, mode: Mode, cfl: f64) -> String {
    let m = match mode {
        Mode::Explicit => "EXP",
        Mode::Implicit => "IMP",
    };
    format!("{m}o{order}(cfl {cfl})")
}

fn with_variant(cfg: &RunConfig, order: Order, mode: Mode, cfl: f64) -> RunConfig {
    RunConfig {
        order,
        mode,
        cfl,
        ..cfg.clone()
    }
}

/// L1 distance to the initial state for all four variants. Passes iff every
/// entry is at most [`WELL_BALANCE_TOL`].
pub fn cmd_wellbalance(cfg: &RunConfig) -> Result<Report> {
    if !matches!(cfg.test, TestCase::LakeAtRest | TestCase::Subcritical | TestCase::LowFroude | TestCase::Moments) {
        return Err(Error::Config {
            line: 0,
            message: format!("wellbalance needs a steady test (1, 2, 2_lowfroude, 3), got {}", cfg.test),
        });
    }
    let runs = variants(cfg);
    let mut headers = vec!["variable".to_string()];
    headers.extend(runs.iter().map(|&(o, m, c)| variant_label(o, m, c)));
    let mut table = Table {
        name: format!("wellbalance_test{}", cfg.test),
        title: format!(
            "Test {}: L1 errors at t={} on {} cells (dx-weighted)",
            cfg.test, cfg.t_end, cfg.n_cells
        ),
        headers,
        rows: Vec::new(),
    };
    let vars = conserved_variables(cfg.n_moments);
    let mut errors = vec![Vec::new(); vars.len()];
    let mut notes = Vec::new();
    for &(order, mode, cfl) in &runs {
        let (record, grid, _) = simulate(&with_variant(cfg, order, mode, cfl))?;
        notes.push(format!(
            "{}: steps={} wall={:.3}s",
            variant_label(order, mode, cfl),
            record.steps,
            record.wall_seconds
        ));
        for (k, &v) in vars.iter().enumerate() {
            errors[k].push(l1_error(&record.final_state, &record.initial, grid.dx, v)?);
        }
    }
    let mut pass = true;
    for (v, errs) in vars.iter().zip(&errors) {
        pass &= errs.iter().all(|&e| e <= WELL_BALANCE_TOL);
        let mut row = vec![v.to_string()];
        row.extend(errs.iter().map(|&e| sci(e)));
        table.push(row);
    }
    Ok(Report {
        tables: vec![table],
        notes,
        pass,
    })
}

/// Grid sizes of the convergence study.
pub const CONVERGENCE_GRIDS: [usize; 4] = [25, 50, 100, 200];
/// Cells of the self-computed reference solution.
pub const CONVERGENCE_REFERENCE: usize = 800;

/// Errors of one convergence level against the restricted reference.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LevelError {
    pub n_cells: usize,
    pub h: f64,
    pub u0: f64,
    /// Largest error over `u_1..u_N`.
    pub moments: f64,
}

/// Run the study and return one [`LevelError`] per grid of `grids`.
pub fn convergence_errors(cfg: &RunConfig, grids: &[usize], reference: usize) -> Result<Vec<LevelError>> {
    let reference_cfg = RunConfig {
        n_cells: reference,
        snapshot_times: Vec::new(),
        ..cfg.clone()
    };
    let (fine, ..) = simulate(&reference_cfg)?;
    grids
        .iter()
        .map(|&n| {
            if !reference.is_multiple_of(n) {
                return Err(Error::GridMismatch(format!("{reference} cells do not refine {n}")));
            }
            let (record, grid, _) = simulate(&RunConfig {
                n_cells: n,
                ..reference_cfg.clone()
            })?;
            let exact = restrict_average(&fine.final_state, reference / n)?;
            let f = &record.final_state;
            Ok(LevelError {
                n_cells: n,
                h: l1_error(f, &exact, grid.dx, Variable::H)?,
                u0: l1_error(f, &exact, grid.dx, Variable::U(0))?,
                moments: l1_error_moments(f, &exact, grid.dx)?,
            })
        })
        .collect()
}

/// Observed orders between consecutive levels; `None` when both errors are
/// at round-off level.
pub fn orders(errors: &[f64]) -> Vec<Option<f64>> {
    errors
        .windows(2)
        .map(|w| {
            if w[0] <= WELL_BALANCE_TOL && w[1] <= WELL_BALANCE_TOL {
                None
            } else {
                Some(observed_order(w[0], w[1]))
            }
        })
        .collect()
}

/// Smallest order accepted on the finest pair for a given scheme order.
pub fn convergence_threshold(order: Order) -> f64 {
    match order {
        Order::First => 0.75,
        Order::Second => 1.5,
    }
}

/// Error/order table on 25..200 cells against an 800-cell reference.
pub fn cmd_convergence(cfg: &RunConfig) -> Result<Report> {
    let levels = convergence_errors(cfg, &CONVERGENCE_GRIDS, CONVERGENCE_REFERENCE)?;
    let mut table = Table::new(
        &format!("convergence_test{}_o{}_{}", cfg.test, cfg.order, cfg.mode),
        &format!(
            "Test {}: order {} {} cfl {}, L1 errors at t={} vs {}-cell reference",
            cfg.test, cfg.order, cfg.mode, cfg.cfl, cfg.t_end, CONVERGENCE_REFERENCE
        ),
        &["cells", "err h", "order h", "err u0", "order u0", "err uj", "order uj"],
    );
    let series = [
        levels.iter().map(|l| l.h).collect::<Vec<_>>(),
        levels.iter().map(|l| l.u0).collect(),
        levels.iter().map(|l| l.moments).collect(),
    ];
    let ords: Vec<Vec<Option<f64>>> = series.iter().map(|s| orders(s)).collect();
    let show = |o: Option<f64>| o.map_or("exact".to_string(), |v| format!("{v:.3}"));
    for (k, l) in levels.iter().enumerate() {
        let mut row = vec![l.n_cells.to_string()];
        for (s, o) in series.iter().zip(&ords) {
            row.push(sci(s[k]));
            row.push(if k == 0 { "-".into() } else { show(o[k - 1]) });
        }
        table.push(row);
    }
    let threshold = convergence_threshold(cfg.order);
    // Moments that are identically zero have nothing to converge.
    let pass = ords.iter().enumerate().all(|(k, o)| match o.last().copied().flatten() {
        Some(v) => v >= threshold || (k == 2 && cfg.n_moments == 0),
        None => true,
    });
    Ok(Report {
        tables: vec![table],
        notes: vec![format!("finest-pair orders must be at least {threshold}")],
        pass,
    })
}

/// Timing of one explicit/implicit pair at a given order.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SpeedupRow {
    pub order: Order,
    pub cfl_explicit: f64,
    pub cfl_implicit: f64,
    pub steps_explicit: usize,
    pub steps_implicit: usize,
    pub wall_explicit: f64,
    pub wall_implicit: f64,
}

impl SpeedupRow {
    pub fn speedup(&self) -> f64 {
        self.wall_explicit / self.wall_implicit
    }

    /// Half of the CFL ratio.
    pub fn required(&self) -> f64 {
        0.5 * self.cfl_implicit / self.cfl_explicit
    }

    pub fn pass(&self) -> bool {
        self.speedup() >= self.required()
    }
}

/// Time one configuration after a discarded warm-up run. Only the stepping
/// loop is measured.
fn timed(cfg: &RunConfig) -> Result<RunRecord> {
    let (grid, topo, ic) = setup(cfg)?;
    let mut solver = Solver::new(grid, topo, cfg.g, cfg.n_moments, cfg.scheme())?;
    solver.run(&ic, cfg.t_end, &[])?;
    solver.run(&ic, cfg.t_end, &[])
}

pub fn speedup(cfg: &RunConfig, order: Order) -> Result<SpeedupRow> {
    let cfl_explicit = explicit_cfl(cfg);
    let exp = timed(&with_variant(cfg, order, Mode::Explicit, cfl_explicit))?;
    let imp = timed(&with_variant(cfg, order, Mode::Implicit, cfg.cfl_implicit))?;
    Ok(SpeedupRow {
        order,
        cfl_explicit,
        cfl_implicit: cfg.cfl_implicit,
        steps_explicit: exp.steps,
        steps_implicit: imp.steps,
        wall_explicit: exp.wall_seconds,
        wall_implicit: imp.wall_seconds,
    })
}

/// Explicit versus implicit wall time for both orders.
pub fn cmd_benchmark(cfg: &RunConfig) -> Result<Report> {
    let mut table = Table::new(
        &format!("benchmark_test{}", cfg.test),
        &format!("Test {}: wall time to t={} on {} cells", cfg.test, cfg.t_end, cfg.n_cells),
        &["order", "cfl exp", "cfl imp", "steps exp", "steps imp", "time exp (s)", "time imp (s)", "speedup", "required"],
    );
    let mut pass = true;
    for order in [Order::First, Order::Second] {
        let r = speedup(cfg, order)?;
        pass &= r.pass();
        table.push(vec![
            order.to_string(),
            r.cfl_explicit.to_string(),
            r.cfl_implicit.to_string(),
            r.steps_explicit.to_string(),
            r.steps_implicit.to_string(),
            format!("{:.4}", r.wall_explicit),
            format!("{:.4}", r.wall_implicit),
            format!("{:.2}", r.speedup()),
            format!("{:.2}", r.required()),
        ]);
    }
    Ok(Report {
        tables: vec![table],
        notes: vec!["timings exclude setup and output; each run follows a discarded warm-up".into()],
        pass,
    })
}
