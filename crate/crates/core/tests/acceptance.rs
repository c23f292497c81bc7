//! End-to-end acceptance checks. Each test prints one `criterion N: PASS|FAIL` line.

use std::io::Write as _;

use swlme::basis::basis_phi;
use swlme::cases::TestCase;
use swlme::config::RunConfig;
use swlme::harness::{convergence_errors, simulate, speedup};
use swlme::model::{apply_b, flux_transport, from_riemann_invariants, relaxation_speed_from_heights, to_riemann_invariants};
use swlme::pressure::pressure_step;
use swlme::steady::{Branch, SteadyConstants, SteadyField};
use swlme::transport::{hll_coefficients, hll_flux, nonconservative_fluctuations};
use swlme::{Field, Grid, LimiterPairing, Mode, ModelParams, Order, State, Topography};

const G: f64 = 9.812;

/// Bypasses the test harness capture so the verdict always reaches the log.
fn verdict(n: usize, pass: bool, detail: &str) {
    let word = if pass { "PASS" } else { "FAIL" };
    let mut out = std::io::stdout();
    let _ = writeln!(out, "criterion {n}: {word} {detail}");
    let _ = out.flush();
    assert!(pass, "criterion {n} failed: {detail}");
}

fn l1(a: &[f64], b: &[f64], dx: f64) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum::<f64>() * dx
}

fn column(field: &Field, k: usize) -> Vec<f64> {
    (0..field.n_cells()).map(|i| field.cell(i)[k]).collect()
}

/// Largest L1 distance between final and initial state over `h` and `hu_j`,
/// across the given `(order, mode, cfl)` runs.
fn steady_drift(cfg: &RunConfig, runs: &[(Order, Mode, f64)]) -> (f64, String) {
    let mut worst: f64 = 0.0;
    let mut detail = Vec::new();
    for &(order, mode, cfl) in runs {
        let run = RunConfig {
            order,
            mode,
            cfl,
            ..cfg.clone()
        };
        let (record, grid, _) = simulate(&run).unwrap();
        assert!((record.final_time - cfg.t_end).abs() < 1e-12);
        let err = (0..cfg.n_moments + 2)
            .map(|k| l1(&column(&record.final_state, k), &column(&record.initial, k), grid.dx))
            .fold(0.0, f64::max);
        worst = worst.max(err);
        detail.push(format!("{mode}/o{order}/cfl{cfl}={err:.1e}"));
    }
    (worst, detail.join(" "))
}

fn all_variants(implicit_cfl: f64) -> [(Order, Mode, f64); 4] {
    [
        (Order::First, Mode::Explicit, 0.9),
        (Order::First, Mode::Implicit, implicit_cfl),
        (Order::Second, Mode::Explicit, 0.9),
        (Order::Second, Mode::Implicit, implicit_cfl),
    ]
}

#[test]
fn criterion_1_lake_at_rest() {
    let cfg = RunConfig {
        n_cells: 400,
        t_end: 0.5,
        ..RunConfig::for_test(TestCase::LakeAtRest)
    };
    let mut slowest: f64 = 0.0;
    let mut worst: f64 = 0.0;
    let mut detail = Vec::new();
    for run in all_variants(cfg.cfl_implicit) {
        let start = std::time::Instant::now();
        let (err, d) = steady_drift(&cfg, &[run]);
        slowest = slowest.max(start.elapsed().as_secs_f64());
        worst = worst.max(err);
        detail.push(d);
    }
    let pass = worst <= 1e-11 && slowest < 60.0;
    verdict(1, pass, &format!("max L1 {worst:.2e}, slowest {slowest:.2}s ({})", detail.join(" ")));
}

#[test]
fn criterion_2_moving_steady_state() {
    let cfg = RunConfig {
        n_cells: 400,
        t_end: 0.5,
        ..RunConfig::for_test(TestCase::Subcritical)
    };
    let (err, detail) = steady_drift(&cfg, &all_variants(1.26));
    verdict(2, err <= 1e-11, &format!("max L1 {err:.2e} ({detail})"));
}

#[test]
fn criterion_3_moment_steady_state() {
    let cfg = RunConfig {
        n_moments: 8,
        ..RunConfig::for_test(TestCase::Moments)
    };
    let (err, detail) = steady_drift(&cfg, &all_variants(9.15));
    verdict(3, err <= 1e-11, &format!("max L1 {err:.2e} ({detail})"));
}

#[test]
fn criterion_4_convergence() {
    let base = RunConfig::for_test(TestCase::Convergence);
    let expected = [
        (Mode::Explicit, 0.9, [1.76, 1.78, 2.15]),
        (Mode::Implicit, 2.0, [1.75, 1.77, 2.13]),
    ];
    let mut pass = true;
    let mut detail = Vec::new();
    for (mode, cfl, expect) in expected {
        let cfg = RunConfig {
            order: Order::Second,
            mode,
            cfl,
            ..base.clone()
        };
        let levels = convergence_errors(&cfg, &[25, 50, 100, 200], 800).unwrap();
        let observed: Vec<f64> = levels.windows(2).map(|w| (w[0].h / w[1].h).log2()).collect();
        for (o, e) in observed.iter().zip(expect) {
            pass &= (o - e).abs() <= 0.35;
        }
        pass &= observed[2] >= 1.5;
        detail.push(format!(
            "{mode}: {:.3} {:.3} {:.3}",
            observed[0], observed[1], observed[2]
        ));
    }
    verdict(4, pass, &detail.join("; "));
}

#[test]
fn criterion_5_speedup() {
    let mut pass = true;
    let mut detail = Vec::new();
    for case in [TestCase::LowFroude, TestCase::Moments] {
        let cfg = RunConfig {
            cfl: 0.9,
            mode: Mode::Explicit,
            cfl_implicit: 10.0,
            ..RunConfig::for_test(case)
        };
        for order in [Order::First, Order::Second] {
            // Wall time is noisy when tests share the machine; keep the best of three.
            let best = (0..3)
                .map(|_| speedup(&cfg, order).unwrap().speedup())
                .fold(0.0, f64::max);
            pass &= best >= 5.0;
            detail.push(format!("test {case} o{order}: {best:.2}"));
        }
    }
    verdict(5, pass, &detail.join(", "));
}

#[test]
fn criterion_6_dam_break() {
    let base = RunConfig::for_test(TestCase::DamBreak);
    let tv = |cfg: &RunConfig| -> (f64, bool, f64) {
        let (record, grid, _) = simulate(cfg).unwrap();
        let h = column(&record.final_state, 0);
        let positive = h.iter().all(|&v| v > 0.0);
        let m0: f64 = column(&record.initial, 0).iter().sum::<f64>() * grid.dx;
        let m1: f64 = h.iter().sum::<f64>() * grid.dx;
        let drift = ((m1 - m0 - record.boundary_inflow) / m0).abs();
        // Flat bottom, so eta = h.
        let tv = h.windows(2).map(|w| (w[1] - w[0]).abs()).sum();
        (tv, positive, drift)
    };
    let reference = RunConfig {
        n_cells: 3200,
        order: Order::Second,
        mode: Mode::Explicit,
        cfl: 0.9,
        snapshot_times: Vec::new(),
        ..base.clone()
    };
    let (tv_ref, ..) = tv(&reference);

    let mut pass = true;
    let mut detail = vec![format!("TV ref {tv_ref:.4}")];
    for (mode, cfl) in [(Mode::Explicit, 0.9), (Mode::Implicit, 1.0), (Mode::Implicit, 2.0)] {
        let mut tvs = [0.0; 2];
        for (k, order) in [Order::First, Order::Second].into_iter().enumerate() {
            let cfg = RunConfig {
                n_cells: 400,
                order,
                mode,
                cfl,
                ..base.clone()
            };
            let (t, positive, drift) = tv(&cfg);
            pass &= positive && drift <= 1e-12;
            tvs[k] = t;
        }
        pass &= tvs[0] <= tvs[1];
        if mode == Mode::Explicit {
            pass &= tvs[1] <= tv_ref;
        }
        detail.push(format!("{mode} cfl {cfl}: o1 {:.4} o2 {:.4}", tvs[0], tvs[1]));
    }
    verdict(6, pass, &detail.join(", "));
}

/// Gauss-Legendre rule on `[0, 1]` by Newton iteration on `P_n`.
fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    (0..n)
        .map(|k| {
            let mut x = (std::f64::consts::PI * (k as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 1.0;
            for _ in 0..100 {
                let (mut p0, mut p1) = (1.0, x);
                for m in 2..=n {
                    let p2 = ((2 * m - 1) as f64 * x * p1 - (m - 1) as f64 * p0) / m as f64;
                    p0 = p1;
                    p1 = p2;
                }
                dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
                let step = p1 / dp;
                x -= step;
                if step.abs() < 1e-16 {
                    break;
                }
            }
            (0.5 * (x + 1.0), 1.0 / ((1.0 - x * x) * dp * dp))
        })
        .collect()
}

/// Small deterministic generator so the sweep is reproducible without extra crates.
struct Lcg(u64);

impl Lcg {
    fn unit(&mut self) -> f64 {
        self.0 = self.0.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        (self.0 >> 11) as f64 / (1u64 << 53) as f64
    }

    fn range(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.unit()
    }
}

fn random_state(rng: &mut Lcg, n_moments: usize) -> State {
    let h = rng.range(0.2, 3.0);
    let mut u = vec![rng.range(-2.0, 2.0)];
    u.extend((0..n_moments).map(|_| rng.range(-0.2, 0.2)));
    State::from_primitive(h, &u, 0.5 * G * h * h)
}

#[test]
fn criterion_7_property_suites() {
    let mut rng = Lcg(0x5eed);
    let mut detail = Vec::new();

    let rule = gauss_legendre(24);
    let mut orth: f64 = 0.0;
    for i in 1..=12 {
        for j in 1..=12 {
            let ip: f64 = rule
                .iter()
                .map(|&(z, w)| w * basis_phi(i, z).unwrap() * basis_phi(j, z).unwrap())
                .sum();
            let expect = if i == j { 1.0 / (2 * i + 1) as f64 } else { 0.0 };
            orth = orth.max((ip - expect).abs());
        }
    }
    let orth_ok = orth <= 1e-12;
    detail.push(format!("orthogonality {orth:.1e}"));

    let mut rt: f64 = 0.0;
    for _ in 0..1000 {
        let (pi, u, a) = (rng.range(-1e3, 1e3), rng.range(-50.0, 50.0), rng.range(1e-2, 1e3));
        let (wf, wb) = to_riemann_invariants(pi, u, a).unwrap();
        let (pi2, u2) = from_riemann_invariants(wf, wb, a).unwrap();
        let scale = pi.abs() + a * u.abs();
        rt = rt.max(((pi2 - pi).abs() + a * (u2 - u).abs()) / scale);
    }
    let rt_ok = rt <= 8.0 * f64::EPSILON;
    detail.push(format!("riemann round trip {rt:.1e}"));

    let mut hll_ok = true;
    let mut fluct: f64 = 0.0;
    for _ in 0..500 {
        let n = (rng.unit() * 9.0) as usize;
        let (l, r) = (random_state(&mut rng, n), random_state(&mut rng, n));
        let sl = rng.range(-10.0, 10.0);
        let (a0, a1) = hll_coefficients(sl, sl + rng.range(0.0, 10.0));
        hll_ok &= hll_flux(&l, &l, a0, a1) == flux_transport(&l);
        let (minus, plus) = nonconservative_fluctuations(&l, &r, a1);
        let avg = State::from_slice(&(0..l.len()).map(|k| 0.5 * (l[k] + r[k])).collect::<Vec<_>>());
        let jump: Vec<f64> = (0..l.len()).map(|k| r[k] - l[k]).collect();
        let whole = apply_b(&avg, &jump);
        for k in 0..l.len() {
            let scale = whole[k].abs().max(f64::MIN_POSITIVE);
            fluct = fluct.max((minus[k] + plus[k] - whole[k]).abs() / scale);
        }
    }
    let fluct_ok = fluct <= 2.0 * f64::EPSILON;
    detail.push(format!("hll consistent {hll_ok}, fluctuation identity {fluct:.1e}"));

    let mut newton: f64 = 0.0;
    let test_constants = [
        (3.5, vec![0.0; 8]),
        (0.5, vec![0.0; 8]),
        (0.5, vec![0.005; 8]),
        (0.5, vec![-0.005, -0.001]),
    ];
    for (c1, ck) in test_constants {
        let constants = SteadyConstants::new(c1, swlme::cases::ENERGY, ck);
        for k in 0..=50 {
            let z = Topography::CosineBump.z(1.3 + 0.4 * k as f64 / 50.0);
            let (h, _) = constants
                .solve_height(z, G, Branch::Subcritical, swlme::cases::ENERGY / G - z)
                .unwrap();
            newton = newton.max(constants.residual(h, z, G).abs());
        }
    }
    let newton_ok = newton <= 1e-13;
    detail.push(format!("newton residual {newton:.1e}"));

    let mut ratios = Vec::new();
    for _ in 0..10 {
        let grid = Grid::new(0.0, 1.0, 40).unwrap();
        let (c, phase, n) = (rng.range(-1.0, 1.0), rng.range(0.0, 6.0), (rng.unit() * 3.0) as usize);
        let states: Vec<State> = grid
            .centers()
            .iter()
            .map(|&x| {
                let s = (2.0 * std::f64::consts::PI * x + phase).sin();
                let h = 1.0 + 0.2 * c * s;
                let mut u = vec![0.3 * s; n + 1];
                u[0] = 0.5 * c * (2.0 * std::f64::consts::PI * x).cos();
                State::from_primitive(h, &u, 0.5 * G * h * h)
            })
            .collect();
        let field = Field::from_states(&states).unwrap();
        let a = relaxation_speed_from_heights(field.heights(), G).unwrap();
        let p = ModelParams::new(G, n, a).unwrap();
        let topo = Topography::Flat { level: 0.0 };
        let steady = SteadyField::build(&field, &grid, &topo, &p, true).unwrap();
        let gap = |dt: f64| {
            let (mut e, mut i) = (field.clone(), field.clone());
            for (f, mode) in [(&mut e, Mode::Explicit), (&mut i, Mode::Implicit)] {
                pressure_step(f, &steady, &grid, &topo, &p, dt, Order::Second, mode, LimiterPairing::Cross).unwrap();
            }
            let change = (0..40).map(|k| (e.cell(k)[1] - field.cell(k)[1]).abs()).fold(0.0, f64::max);
            let diff = (0..40).map(|k| (e.cell(k)[1] - i.cell(k)[1]).abs()).fold(0.0, f64::max);
            diff / change
        };
        let dt = 0.02 * grid.dx / a;
        ratios.push(gap(dt) / gap(0.5 * dt));
    }
    // Relative gap between the two updates is O(dt): halving dt halves it.
    let worst_ratio = ratios.iter().copied().fold(f64::INFINITY, f64::min);
    let odt_ok = worst_ratio >= 1.8;
    detail.push(format!("implicit/explicit gap ratio {worst_ratio:.2}"));

    verdict(
        7,
        orth_ok && rt_ok && hll_ok && fluct_ok && newton_ok && odt_ok,
        &detail.join(", "),
    );
}
