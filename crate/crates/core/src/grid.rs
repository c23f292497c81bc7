//! Uniform 1D mesh and bottom topography.

use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Ghost cells padded on each side for the second-order stencil.
pub const N_GHOST: usize = 2;

#[derive(Clone, Debug, PartialEq)]
pub struct Grid {
    pub x_left: f64,
    pub x_right: f64,
    pub n_cells: usize,
    pub dx: f64,
}

impl Grid {
    pub fn new(x_left: f64, x_right: f64, n_cells: usize) -> Result<Self> {
        if n_cells == 0 {
            return Err(Error::Domain("grid needs at least one cell".into()));
        }
        let dx = (x_right - x_left) / n_cells as f64;
        if !(dx > 0.0) || !dx.is_finite() {
            return Err(Error::Domain(format!(
                "invalid domain [{x_left}, {x_right}]"
            )));
        }
        Ok(Self {
            x_left,
            x_right,
            n_cells,
            dx,
        })
    }

    pub fn length(&self) -> f64 {
        self.x_right - self.x_left
    }

    /// Center of cell `i`; negative or past-the-end indices address ghost cells.
    #[inline]
    pub fn center(&self, i: isize) -> f64 {
        self.x_left + (i as f64 + 0.5) * self.dx
    }

    /// Interface `x_{i-1/2}` for `i = 0..=n_cells`.
    #[inline]
    pub fn interface(&self, i: isize) -> f64 {
        self.x_left + i as f64 * self.dx
    }

    pub fn centers(&self) -> Vec<f64> {
        (0..self.n_cells as isize).map(|i| self.center(i)).collect()
    }

    pub fn interfaces(&self) -> Vec<f64> {
        (0..=self.n_cells as isize).map(|i| self.interface(i)).collect()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Topography {
    Flat { level: f64 },
    /// `2 - x^2` on `[-0.5, 0.5]`, `1.75` elsewhere.
    ParabolicBump,
    /// `(cos(5 pi (x + 1/2)) + 1) / 4` on `[1.3, 1.7]`, zero elsewhere.
    CosineBump,
    /// Piecewise-linear through sorted nodes, clamped outside the table.
    Tabulated { xs: Vec<f64>, zs: Vec<f64> },
}

impl Topography {
    /// Bottom elevation and slope at `x`.
    pub fn eval(&self, x: f64) -> (f64, f64) {
        match self {
            Topography::Flat { level } => (*level, 0.0),
            Topography::ParabolicBump => {
                if (-0.5..=0.5).contains(&x) {
                    (2.0 - x * x, -2.0 * x)
                } else {
                    (1.75, 0.0)
                }
            }
            Topography::CosineBump => {
                if (1.3..=1.7).contains(&x) {
                    let arg = (x + 0.5) * 5.0 * PI;
                    (0.25 * (arg.cos() + 1.0), -0.25 * 5.0 * PI * arg.sin())
                } else {
                    (0.0, 0.0)
                }
            }
            Topography::Tabulated { xs, zs } => tabulated(xs, zs, x),
        }
    }

    #[inline]
    pub fn z(&self, x: f64) -> f64 {
        self.eval(x).0
    }

    pub fn is_flat(&self) -> bool {
        matches!(self, Topography::Flat { .. })
    }

    /// Parse a two-column `x,z` table. Blank lines and `#` comments are skipped;
    /// abscissae must be finite and strictly increasing.
    pub fn parse_table(text: &str) -> Result<Self> {
        let mut xs = Vec::new();
        let mut zs = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |message: String| Error::Parse {
                line: lineno + 1,
                message,
            };
            let mut parts = line.split(|c: char| c == ',' || c.is_whitespace()).filter(|s| !s.is_empty());
            let (Some(xs_raw), Some(zs_raw), None) = (parts.next(), parts.next(), parts.next()) else {
                return Err(err(format!("expected two columns, got {line:?}")));
            };
            let x: f64 = xs_raw
                .parse()
                .map_err(|_| err(format!("bad abscissa {xs_raw:?}")))?;
            let z: f64 = zs_raw
                .parse()
                .map_err(|_| err(format!("bad elevation {zs_raw:?}")))?;
            if !x.is_finite() || !z.is_finite() {
                return Err(err("non-finite value".into()));
            }
            if let Some(&prev) = xs.last() {
                if x <= prev {
                    return Err(err(format!("abscissa {x} not increasing")));
                }
            }
            xs.push(x);
            zs.push(z);
        }
        if xs.is_empty() {
            return Err(Error::Parse {
                line: 0,
                message: "empty topography table".into(),
            });
        }
        Ok(Topography::Tabulated { xs, zs })
    }
}

fn tabulated(xs: &[f64], zs: &[f64], x: f64) -> (f64, f64) {
    let n = xs.len();
    if n == 0 {
        return (0.0, 0.0);
    }
    if x <= xs[0] {
        return (zs[0], 0.0);
    }
    if x >= xs[n - 1] {
        return (zs[n - 1], 0.0);
    }
    let k = xs.partition_point(|&xk| xk <= x) - 1;
    let slope = (zs[k + 1] - zs[k]) / (xs[k + 1] - xs[k]);
    (zs[k] + slope * (x - xs[k]), slope)
}
