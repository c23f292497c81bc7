//! CSV snapshots and vertical velocity profiles.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::field::Field;
use crate::grid::{Grid, Topography};
use crate::model::{velocity_profile, State};

/// Column names of a snapshot with `n_moments` moments.
pub fn snapshot_header(n_moments: usize) -> Vec<String> {
    let mut cols: Vec<String> = ["x", "z", "h", "eta"].iter().map(|s| s.to_string()).collect();
    cols.extend((0..=n_moments).map(|j| format!("u{j}")));
    cols.extend((0..=n_moments).map(|j| format!("q{j}")));
    cols.push("pi".into());
    cols
}

fn number(v: f64) -> String {
    format!("{v:.16e}")
}

/// One row per cell: `x, z, h, eta, u0..uN, q0..qN, pi`.
pub fn snapshot_csv(field: &Field, grid: &Grid, topo: &Topography) -> String {
    let mut out = snapshot_header(field.n_moments()).join(",");
    out.push('\n');
    for (i, x) in grid.centers().into_iter().enumerate() {
        let s = field.state(i);
        let z = topo.z(x);
        let mut row = vec![number(x), number(z), number(s.h()), number(s.h() + z)];
        row.extend((0..=s.n_moments()).map(|j| number(s.u(j))));
        row.extend(s.moments().iter().map(|&q| number(q)));
        row.push(number(s.pi()));
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

pub fn write_snapshot(path: &Path, field: &Field, grid: &Grid, topo: &Topography) -> Result<()> {
    write_text(path, &snapshot_csv(field, grid, topo))
}

/// Create parent directories and write `text` to `path`.
pub fn write_text(path: &Path, text: &str) -> Result<()> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
    }
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

/// A snapshot read back from CSV.
#[derive(Clone, Debug, PartialEq)]
pub struct Snapshot {
    pub x: Vec<f64>,
    pub z: Vec<f64>,
    pub field: Field,
}

/// Parse the output of [`snapshot_csv`]. The state is rebuilt from `h`, the
/// `q` columns and `pi`; the derived columns only have to be numbers.
pub fn read_snapshot(text: &str) -> Result<Snapshot> {
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
    let (_, header) = lines.next().ok_or(Error::Parse {
        line: 0,
        message: "empty snapshot".into(),
    })?;
    let cols: Vec<&str> = header.split(',').map(str::trim).collect();
    if cols.len() < 7 || !(cols.len() - 7).is_multiple_of(2) {
        return Err(Error::Parse {
            line: 1,
            message: format!("{} columns do not describe a snapshot", cols.len()),
        });
    }
    let n_moments = (cols.len() - 7) / 2;
    if cols != snapshot_header(n_moments) {
        return Err(Error::Parse {
            line: 1,
            message: format!("unexpected header {header:?}"),
        });
    }

    let (mut x, mut z, mut states) = (Vec::new(), Vec::new(), Vec::new());
    for (idx, raw) in lines {
        let line = idx + 1;
        let values = raw
            .split(',')
            .map(|v| {
                v.trim()
                    .parse::<f64>()
                    .ok()
                    .filter(|v| v.is_finite())
                    .ok_or_else(|| Error::Parse {
                        line,
                        message: format!("bad number {:?}", v.trim()),
                    })
            })
            .collect::<Result<Vec<f64>>>()?;
        if values.len() != cols.len() {
            return Err(Error::Parse {
                line,
                message: format!("expected {} values, got {}", cols.len(), values.len()),
            });
        }
        let h = values[2];
        let q = &values[5 + n_moments..6 + 2 * n_moments];
        let pi = values[cols.len() - 1];
        x.push(values[0]);
        z.push(values[1]);
        states.push(State::new(h, q, h * pi));
    }
    if states.is_empty() {
        return Err(Error::Parse {
            line: 1,
            message: "snapshot has no rows".into(),
        });
    }
    Ok(Snapshot {
        x,
        z,
        field: Field::from_states(&states)?,
    })
}

/// Cell holding abscissa `x`, clamped to the mesh.
pub fn cell_at(grid: &Grid, x: f64) -> usize {
    let k = ((x - grid.x_left) / grid.dx).floor();
    if k.is_nan() || k < 0.0 {
        0
    } else {
        (k as usize).min(grid.n_cells - 1)
    }
}

/// `u(zeta)` at `zeta = 0, 0.01, ..., 1` in the cells containing each point.
pub fn velocity_profiles_csv(field: &Field, grid: &Grid, points: &[f64]) -> Result<String> {
    let states: Vec<State> = points.iter().map(|&x| field.state(cell_at(grid, x))).collect();
    let mut out = String::from("zeta");
    for x in points {
        let _ = write!(out, ",u(x={x})");
    }
    out.push('\n');
    for k in 0..=100 {
        let zeta = k as f64 / 100.0;
        out.push_str(&number(zeta));
        for s in &states {
            out.push(',');
            out.push_str(&number(velocity_profile(s, zeta)?));
        }
        out.push('\n');
    }
    Ok(out)
}
