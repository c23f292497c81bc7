//! Cell storage: one flat buffer, `N + 3` contiguous components per cell.

use crate::error::{Error, Result};
use crate::model::State;

#[derive(Clone, Debug, PartialEq)]
pub struct Field {
    n_moments: usize,
    data: Vec<f64>,
}

impl Field {
    pub fn new(n_cells: usize, n_moments: usize) -> Self {
        Self {
            n_moments,
            data: vec![0.0; n_cells * (n_moments + 3)],
        }
    }

    pub fn from_states(states: &[State]) -> Result<Self> {
        let Some(first) = states.first() else {
            return Err(Error::Domain("field needs at least one cell".into()));
        };
        let n_moments = first.n_moments();
        let mut data = Vec::with_capacity(states.len() * (n_moments + 3));
        for s in states {
            if s.n_moments() != n_moments {
                return Err(Error::GridMismatch(format!(
                    "mixed moment counts {} and {}",
                    n_moments,
                    s.n_moments()
                )));
            }
            data.extend_from_slice(s.as_slice());
        }
        Ok(Self { n_moments, data })
    }

    #[inline]
    pub fn width(&self) -> usize {
        self.n_moments + 3
    }

    pub fn n_moments(&self) -> usize {
        self.n_moments
    }

    pub fn n_cells(&self) -> usize {
        self.data.len() / self.width()
    }

    #[inline]
    pub fn cell(&self, i: usize) -> &[f64] {
        let w = self.width();
        &self.data[i * w..(i + 1) * w]
    }

    #[inline]
    pub fn cell_mut(&mut self, i: usize) -> &mut [f64] {
        let w = self.width();
        &mut self.data[i * w..(i + 1) * w]
    }

    pub fn state(&self, i: usize) -> State {
        State::from_slice(self.cell(i))
    }

    pub fn set_state(&mut self, i: usize, s: &State) {
        self.cell_mut(i).copy_from_slice(s.as_slice());
    }

    pub fn states(&self) -> impl Iterator<Item = State> + '_ {
        self.data.chunks_exact(self.width()).map(State::from_slice)
    }

    #[inline]
    pub fn h(&self, i: usize) -> f64 {
        self.data[i * self.width()]
    }

    /// Component `k` of every cell.
    pub fn component(&self, k: usize) -> Vec<f64> {
        self.data.chunks_exact(self.width()).map(|c| c[k]).collect()
    }

    pub fn heights(&self) -> impl Iterator<Item = f64> + '_ {
        self.data.iter().step_by(self.width()).copied()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    /// Reset `pi = g h^2 / 2` in every cell.
    pub fn relax(&mut self, g: f64) {
        let w = self.width();
        for c in self.data.chunks_exact_mut(w) {
            let h = c[0];
            c[w - 1] = 0.5 * g * h * h * h;
        }
    }

    pub fn check_positive(&self, time: f64) -> Result<()> {
        for (i, h) in self.heights().enumerate() {
            if !(h > 0.0) {
                return Err(Error::Positivity {
                    cell: i,
                    time,
                    variable: "h",
                    value: h,
                });
            }
        }
        Ok(())
    }

    pub fn same_layout(&self, other: &Field) -> Result<()> {
        if self.n_moments != other.n_moments || self.data.len() != other.data.len() {
            return Err(Error::GridMismatch(format!(
                "{} cells x {} moments vs {} cells x {} moments",
                self.n_cells(),
                self.n_moments,
                other.n_cells(),
                other.n_moments
            )));
        }
        Ok(())
    }
}
