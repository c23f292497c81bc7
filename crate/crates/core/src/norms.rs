//! Error norms, grid transfer and total variation.

use std::fmt;

use crate::error::{Error, Result};
use crate::field::Field;
use crate::grid::{Grid, Topography};

/// Scalar quantity extracted from a cell state.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Variable {
    H,
    /// Conserved momentum `h u_j`.
    Q(usize),
    /// Velocity moment `u_j`.
    U(usize),
    /// Relaxed pressure `pi`.
    Pi,
}

impl Variable {
    pub fn extract(self, field: &Field, i: usize) -> f64 {
        let c = field.cell(i);
        match self {
            Variable::H => c[0],
            Variable::Q(j) => c[1 + j],
            Variable::U(j) => c[1 + j] / c[0],
            Variable::Pi => c[c.len() - 1] / c[0],
        }
    }

    pub fn values(self, field: &Field) -> Vec<f64> {
        (0..field.n_cells()).map(|i| self.extract(field, i)).collect()
    }

    fn check(self, field: &Field) -> Result<()> {
        match self {
            Variable::Q(j) | Variable::U(j) if j > field.n_moments() => Err(Error::Domain(format!(
                "moment {j} requested from a field with {} moments",
                field.n_moments()
            ))),
            _ => Ok(()),
        }
    }
}

impl fmt::Display for Variable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Variable::H => write!(f, "h"),
            Variable::Q(j) => write!(f, "q{j}"),
            Variable::U(j) => write!(f, "u{j}"),
            Variable::Pi => write!(f, "pi"),
        }
    }
}

/// `sum_i |a_i - b_i| dx` over interior cells.
pub fn l1_error(a: &Field, b: &Field, dx: f64, variable: Variable) -> Result<f64> {
    a.same_layout(b)?;
    variable.check(a)?;
    Ok((0..a.n_cells())
        .map(|i| (variable.extract(a, i) - variable.extract(b, i)).abs())
        .sum::<f64>()
        * dx)
}

/// Largest [`l1_error`] over the moments `u_1..u_N`; zero without moments.
pub fn l1_error_moments(a: &Field, b: &Field, dx: f64) -> Result<f64> {
    a.same_layout(b)?;
    (1..=a.n_moments()).try_fold(0.0f64, |acc, j| Ok(acc.max(l1_error(a, b, dx, Variable::U(j))?)))
}

/// Average blocks of `ratio` consecutive fine cells onto one coarse cell.
/// Velocities are recovered from the averaged conserved variables.
pub fn restrict_average(fine: &Field, ratio: usize) -> Result<Field> {
    if ratio == 0 || !fine.n_cells().is_multiple_of(ratio) {
        return Err(Error::GridMismatch(format!(
            "{} cells cannot be coarsened by {ratio}",
            fine.n_cells()
        )));
    }
    let n = fine.n_cells() / ratio;
    let w = fine.width();
    let mut out = Field::new(n, fine.n_moments());
    for i in 0..n {
        let dst = out.cell_mut(i);
        for m in 0..ratio {
            for (d, s) in dst.iter_mut().zip(fine.cell(i * ratio + m)) {
                *d += s;
            }
        }
        for d in dst.iter_mut().take(w) {
            *d /= ratio as f64;
        }
    }
    Ok(out)
}

/// `sum_i |v_{i+1} - v_i|`.
pub fn total_variation(values: &[f64]) -> f64 {
    values.windows(2).map(|w| (w[1] - w[0]).abs()).sum()
}

/// Free surface `h + z` at the cell centers.
pub fn free_surface(field: &Field, grid: &Grid, topo: &Topography) -> Vec<f64> {
    grid.centers()
        .into_iter()
        .enumerate()
        .map(|(i, x)| field.h(i) + topo.z(x))
        .collect()
}

/// `sum_i h_i dx`.
pub fn total_mass(field: &Field, dx: f64) -> f64 {
    field.heights().sum::<f64>() * dx
}

/// Observed order `log2(e_coarse / e_fine)` for a mesh refined by two.
pub fn observed_order(e_coarse: f64, e_fine: f64) -> f64 {
    (e_coarse / e_fine).log2()
}
