//! Catalog of benchmark problems and their initial conditions.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::field::Field;
use crate::grid::{Grid, Topography};
use crate::model::State;
use crate::steady::{Branch, SteadyConstants};
use crate::transport::WaveSpeedMode;

pub const DEFAULT_G: f64 = 9.812;
pub const DEFAULT_MOMENTS: usize = 8;
/// Energy level shared by the moving steady states.
pub const ENERGY: f64 = 21.15525;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum TestCase {
    /// Lake at rest over a parabolic bump, `h = 3 - z`.
    LakeAtRest,
    /// Moving subcritical flow over a cosine bump, `C1 = 3.5`, no moments.
    Subcritical,
    /// As [`TestCase::Subcritical`] with `C1 = 0.5`.
    LowFroude,
    /// Low-Froude flow with all moment constants `0.005`.
    Moments,
    /// [`TestCase::Moments`] plus a Gaussian bump in `h` around `x = 2`.
    Convergence,
    /// Two moments with constants `-0.005` and `-0.001`, perturbed like the convergence case.
    Perturbation,
    /// Dam break on a flat bottom.
    DamBreak,
}

impl TestCase {
    pub const ALL: [TestCase; 7] = [
        TestCase::LakeAtRest,
        TestCase::Subcritical,
        TestCase::LowFroude,
        TestCase::Moments,
        TestCase::Convergence,
        TestCase::Perturbation,
        TestCase::DamBreak,
    ];

    pub fn id(self) -> &'static str {
        match self {
            TestCase::LakeAtRest => "1",
            TestCase::Subcritical => "2",
            TestCase::LowFroude => "2_lowfroude",
            TestCase::Moments => "3",
            TestCase::Convergence => "4",
            TestCase::Perturbation => "5",
            TestCase::DamBreak => "6",
        }
    }

    pub fn defaults(self) -> CaseDefaults {
        let moving = |cfl_implicit| CaseDefaults {
            x_left: 0.0,
            x_right: 3.0,
            n_cells: 400,
            n_moments: DEFAULT_MOMENTS,
            t_end: 0.5,
            cfl_implicit,
            topography: Topography::CosineBump,
            perturbation: 0.0,
            snapshot_times: Vec::new(),
            profile_points: vec![1.5],
            wave_speeds: WaveSpeedMode::Transport,
        };
        match self {
            TestCase::LakeAtRest => CaseDefaults {
                x_left: -1.0,
                x_right: 1.0,
                topography: Topography::ParabolicBump,
                profile_points: vec![0.0],
                ..moving(10.0)
            },
            TestCase::Subcritical => moving(1.26),
            TestCase::LowFroude => moving(10.0),
            TestCase::Moments => moving(9.15),
            TestCase::Convergence => CaseDefaults {
                t_end: 0.1,
                n_cells: 200,
                perturbation: 1e-4,
                ..moving(2.0)
            },
            TestCase::Perturbation => CaseDefaults {
                t_end: 0.1,
                n_moments: 2,
                perturbation: 1e-4,
                profile_points: vec![2.25],
                ..moving(5.0)
            },
            TestCase::DamBreak => CaseDefaults {
                x_left: -0.4,
                x_right: 0.4,
                t_end: 0.1,
                topography: Topography::Flat { level: 0.0 },
                snapshot_times: vec![0.01],
                profile_points: vec![0.0, 0.15],
                wave_speeds: WaveSpeedMode::Full,
                ..moving(2.0)
            },
        }
    }

    /// Whether the unperturbed initial condition is an exact steady state.
    pub fn is_steady(self) -> bool {
        matches!(
            self,
            TestCase::LakeAtRest | TestCase::Subcritical | TestCase::LowFroude | TestCase::Moments
        )
    }

    /// Steady constants of the base flow, if it is a moving steady state.
    pub fn constants(self, n_moments: usize) -> Result<Option<SteadyConstants>> {
        let constants = match self {
            TestCase::LakeAtRest | TestCase::DamBreak => return Ok(None),
            TestCase::Subcritical => SteadyConstants::new(3.5, ENERGY, vec![0.0; n_moments]),
            TestCase::LowFroude => SteadyConstants::new(0.5, ENERGY, vec![0.0; n_moments]),
            TestCase::Moments | TestCase::Convergence => {
                SteadyConstants::new(0.5, ENERGY, vec![0.005; n_moments])
            }
            TestCase::Perturbation => {
                if n_moments < 2 {
                    return Err(Error::Domain(format!(
                        "test 5 needs at least 2 moments, got {n_moments}"
                    )));
                }
                let mut ck = vec![0.0; n_moments];
                ck[0] = -0.005;
                ck[1] = -0.001;
                SteadyConstants::new(0.5, ENERGY, ck)
            }
        };
        Ok(Some(constants))
    }
}

impl FromStr for TestCase {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        TestCase::ALL
            .into_iter()
            .find(|c| c.id() == s)
            .ok_or_else(|| format!("unknown test '{s}' (1, 2, 2_lowfroude, 3, 4, 5, 6)"))
    }
}

impl fmt::Display for TestCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

/// Per-test settings used when a configuration leaves them unspecified.
#[derive(Clone, Debug, PartialEq)]
pub struct CaseDefaults {
    pub x_left: f64,
    pub x_right: f64,
    pub n_cells: usize,
    pub n_moments: usize,
    pub t_end: f64,
    pub cfl_implicit: f64,
    pub topography: Topography,
    /// Amplitude of the Gaussian added to `h`.
    pub perturbation: f64,
    pub snapshot_times: Vec<f64>,
    /// Abscissae where vertical velocity profiles are exported.
    pub profile_points: Vec<f64>,
    /// HLL speed estimate. The full speeds are unstable once the implicit
    /// step exceeds the acoustic limit, so only the dam break uses them.
    pub wave_speeds: WaveSpeedMode,
}

/// `amplitude * exp(-200 (x - 2)^2)`.
pub fn perturbation(x: f64, amplitude: f64) -> f64 {
    amplitude * (-200.0 * (x - 2.0) * (x - 2.0)).exp()
}

/// Cell-center initial states with `pi = g h^2 / 2`.
pub fn build_ic(
    case: TestCase,
    grid: &Grid,
    topo: &Topography,
    g: f64,
    n_moments: usize,
    amplitude: f64,
) -> Result<Field> {
    let constants = case.constants(n_moments)?;
    let mut states = Vec::with_capacity(grid.n_cells);
    for x in grid.centers() {
        let z = topo.z(x);
        let mut s = match (case, &constants) {
            (TestCase::LakeAtRest, _) => State::relaxed(3.0 - z, &vec![0.0; n_moments + 1], g),
            (TestCase::DamBreak, _) => {
                if n_moments < 8 {
                    return Err(Error::Domain(format!(
                        "test 6 needs at least 8 moments, got {n_moments}"
                    )));
                }
                let h = if x <= 0.0 { 2.0 } else { 1.0 };
                let mut u = vec![0.0; n_moments + 1];
                u[0] = 0.25;
                u[1] = -0.005;
                u[8] = 0.005;
                let mut s = State::from_primitive(h, &u, 0.0);
                s.relax(g);
                s
            }
            (_, Some(c)) => {
                let guess = c.c2 / g - z;
                c.state_at(z, g, Branch::Subcritical, guess)?
            }
            (_, None) => unreachable!("every moving case carries constants"),
        };
        if amplitude != 0.0 {
            s[0] += perturbation(x, amplitude);
            s.relax(g);
        }
        states.push(s);
    }
    Field::from_states(&states)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::froude;
    use crate::model::ModelParams;

    const G: f64 = DEFAULT_G;

    fn ic(case: TestCase, n: usize) -> (Grid, Field) {
        let d = case.defaults();
        let grid = Grid::new(d.x_left, d.x_right, n).unwrap();
        let f = build_ic(case, &grid, &d.topography, G, d.n_moments, d.perturbation).unwrap();
        (grid, f)
    }

    #[test]
    fn ids_round_trip() {
        for c in TestCase::ALL {
            assert_eq!(c.id().parse::<TestCase>().unwrap(), c);
        }
        assert!("7".parse::<TestCase>().is_err());
    }

    #[test]
    fn lake_at_rest_center() {
        // Two cells on [-1, 1]: centers at -0.5 and 0.5 sit on the bump edge.
        let (_, f) = ic(TestCase::LakeAtRest, 4);
        let grid = Grid::new(-0.25, 0.25, 1).unwrap();
        let one = build_ic(TestCase::LakeAtRest, &grid, &Topography::ParabolicBump, G, 8, 0.0).unwrap();
        assert_eq!(one.h(0), 1.0);
        assert!(one.state(0).moments().iter().all(|&q| q == 0.0));
        assert_eq!(f.n_moments(), 8);
    }

    #[test]
    fn dam_break_left_state() {
        let grid = Grid::new(-0.2, 0.0, 1).unwrap();
        let f = build_ic(TestCase::DamBreak, &grid, &Topography::Flat { level: 0.0 }, G, 8, 0.0).unwrap();
        let s = f.state(0);
        assert_eq!(s.h(), 2.0);
        assert_eq!(s.u(0), 0.25);
        assert_eq!(s.u(1), -0.005);
        assert_eq!(s.u(8), 0.005);
        assert!((2..8).all(|j| s.u(j) == 0.0));
        assert!(build_ic(TestCase::DamBreak, &grid, &Topography::Flat { level: 0.0 }, G, 4, 0.0).is_err());
    }

    #[test]
    fn subcritical_far_from_bump() {
        let grid = Grid::new(0.0, 0.2, 1).unwrap();
        let f = build_ic(TestCase::Subcritical, &grid, &Topography::CosineBump, G, 8, 0.0).unwrap();
        assert!((f.h(0) - 2.0).abs() < 1e-14);
        assert!((f.state(0).u(0) - 1.75).abs() < 1e-14);
    }

    #[test]
    fn steady_ics_have_small_residual() {
        for case in [TestCase::Subcritical, TestCase::LowFroude, TestCase::Moments, TestCase::Perturbation] {
            let d = case.defaults();
            let (grid, f) = ic(case, 400);
            let c = case.constants(d.n_moments).unwrap().unwrap();
            for (i, x) in grid.centers().into_iter().enumerate() {
                let h = f.h(i) - perturbation(x, d.perturbation);
                let r = c.residual(h, d.topography.z(x), G);
                assert!(r.abs() <= 1e-13 * c.c2.abs().max(1.0) * 4.0, "{case} cell {i}: {r}");
            }
        }
    }

    #[test]
    fn froude_ranges() {
        let p = ModelParams::new(G, 8, 1.0).unwrap();
        let (_, f) = ic(TestCase::Subcritical, 400);
        let fr: Vec<f64> = f.states().map(|s| froude(&s, &p)).collect();
        let (lo, hi) = fr.iter().fold((f64::MAX, 0.0f64), |(a, b), &v| (a.min(v), b.max(v)));
        assert!((lo - 0.395).abs() < 1e-3 && hi < 0.8 && hi > 0.7, "{lo} {hi}");
        let (_, f) = ic(TestCase::Moments, 400);
        assert!(f.states().all(|s| (0.04..0.08).contains(&froude(&s, &p))));
    }
}
