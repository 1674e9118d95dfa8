use std::f64::consts::PI;

use kds_core::diagnostics::*;
use kds_core::solver::*;
use kds_core::spacetime::{BlackHoleParams, KerrDeSitter, Minkowski};
use kds_core::{Error, C64};

fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}

fn sds() -> KerrDeSitter {
    KerrDeSitter::new(BlackHoleParams::new(1.0, 0.06, 0.0).unwrap()).unwrap()
}

fn core_source(p: &BlackHoleParams, m: i32, l: u32, amp: C64) -> SourceSpec {
    let mid = 0.5 * (p.r_minus() + p.r_plus());
    SourceSpec::new(m, amp, (0.0, 4.0), (mid - 0.6, mid + 0.6), AngularProfile::Legendre { l }, Support::InsideKDelta)
        .unwrap()
}

/// Adaptive Simpson with Richardson correction.
fn simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    fn rec(f: &dyn Fn(f64) -> f64, a: f64, b: f64, fa: f64, fm: f64, fb: f64, whole: f64, tol: f64, depth: u32) -> f64 {
        let m = 0.5 * (a + b);
        let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
        let (flm, frm) = (f(lm), f(rm));
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol {
            return left + right + delta / 15.0;
        }
        rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) + rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
    }
    let (fa, fm, fb) = (f(a), f(0.5 * (a + b)), f(b));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    rec(f, a, b, fa, fm, fb, whole, tol, 40)
}

#[test]
fn pi0_of_a_box_has_the_closed_form() {
    let p = BlackHoleParams::new(1.0, 0.06, 0.0).unwrap();
    let (t, r, th) = ((0.0, 2.0), (3.0, 4.0), (0.5, 1.5));
    let got = pi0_integral(&p, &|_, _, _| c(1.0), t, r, th, 4);
    let (rm, rp) = (p.r_minus(), p.r_plus());
    let vol = 2.0 * PI * (t.1 - t.0) * (r.1.powi(3) - r.0.powi(3)) / 3.0 * (th.0.cos() - th.1.cos());
    let want = vol / (4.0 * PI * (rp * rp + rm * rm));
    assert!((got.re - want).abs() < 1e-12 * want, "{got} vs {want}");
    assert_eq!(pi0_integral(&p, &|_, _, _| c(0.0), t, r, th, 4), c(0.0));
}

#[test]
fn pi0_matches_adaptive_quadrature() {
    for a in [0.0, 0.02] {
        let kds = KerrDeSitter::new(BlackHoleParams::new(1.0, 0.06, a).unwrap()).unwrap();
        let p = kds.params();
        for profile in [AngularProfile::Legendre { l: 0 }, AngularProfile::Gaussian { center: 1.1, width: 0.5 }] {
            let mid = 0.5 * (p.r_minus() + p.r_plus());
            let src =
                SourceSpec::new(0, C64::new(0.7, -0.2), (1.0, 3.5), (mid - 1.0, mid + 0.5), profile, Support::General)
                    .unwrap();
            let got = pi0(p, &src);
            let time = simpson(&|t| src.time.value(t), 1.0, 3.5, 1e-14);
            let space = simpson(
                &|r| {
                    simpson(
                        &|th| src.radial.value(r) * src.angular.value(0, th) * p.rho2(r, th) * th.sin(),
                        0.0,
                        PI,
                        1e-14,
                    )
                },
                mid - 1.0,
                mid + 0.5,
                1e-13,
            );
            let (rm, rp) = (p.r_minus(), p.r_plus());
            let al = p.alpha;
            let want = src.amplitude * (1.0 + al) / (4.0 * PI * (rp * rp + rm * rm + 2.0 * a * a))
                * (2.0 * PI * time * space / ((1.0 + al) * (1.0 + al)));
            assert!((got - want).norm() < 1e-8 * want.norm(), "a = {a}: {got} vs {want}");
        }
    }
}

#[test]
fn pi0_ignores_sources_outside_the_exterior_and_nonzero_modes() {
    let p = BlackHoleParams::new(1.0, 0.06, 0.0).unwrap();
    let rp = p.r_plus();
    let outside = SourceSpec::new(
        0,
        c(1.0),
        (0.0, 1.0),
        (rp + 0.01, rp + p.delta),
        AngularProfile::Legendre { l: 0 },
        Support::General,
    )
    .unwrap();
    assert_eq!(pi0(&p, &outside), c(0.0));
    // A source straddling r_+ only counts its inner part.
    let straddle = SourceSpec::new(
        0,
        c(1.0),
        (0.0, 1.0),
        (rp - 0.2, rp + 0.2),
        AngularProfile::Legendre { l: 0 },
        Support::General,
    )
    .unwrap();
    let inner = pi0_integral(&p, &|t, r, th| straddle.value(t, r, th), (0.0, 1.0), (rp - 0.2, rp), (0.0, PI), 24);
    let got = pi0(&p, &straddle);
    assert!(got.re > 0.0 && (got - inner).norm() < 1e-8 * got.norm());
    let m1 = core_source(&p, 1, 1, c(1.0));
    assert_eq!(pi0(&p, &m1), c(0.0));
}

#[test]
fn pi0_is_linear() {
    let p = BlackHoleParams::new(1.0, 0.06, 0.01).unwrap();
    let f = core_source(&p, 0, 0, c(1.0));
    let g = SourceSpec::new(
        0,
        c(1.0),
        (0.5, 2.0),
        (3.0, 4.5),
        AngularProfile::Gaussian { center: 0.8, width: 0.4 },
        Support::General,
    )
    .unwrap();
    let (al, be) = (C64::new(2.5, 1.0), C64::new(-0.75, 0.0));
    let combined = |t: f64, r: f64, th: f64| f.value(t, r, th) * al + g.value(t, r, th) * be;
    let lhs = pi0_integral(&p, &combined, (0.0, 4.0), (p.r_minus(), p.r_plus()), (0.0, PI), 48);
    let rhs = pi0(&p, &f) * al + pi0(&p, &g) * be;
    assert!((lhs - rhs).norm() < 1e-8 * rhs.norm(), "{lhs} vs {rhs}");
}

#[test]
fn late_time_limit_is_pi0_and_vanishes_for_m1() {
    let kds = sds();
    let p = kds.params();
    let grid = Grid2D::extended(p, 61, 16).unwrap();
    let opts = SolveOptions { t_start: 0.0, t_end: 120.0, cadence: 4.0, cfl: DEFAULT_CFL };
    let f = core_source(p, 0, 0, c(1.0));
    let snaps = forward_solve(&kds, &grid, &f, &opts, None).unwrap();
    let op = WaveOperator::new(&kds, &grid, 0, DEFAULT_CFL, None).unwrap();
    let want = pi0(p, &f);
    let last = snaps.last().unwrap();
    let mean = mean_value(&op, last, None);
    assert!((mean - want).norm() < 1e-3 * want.norm(), "{mean} vs {want}");
    let spread = last.u.iter().map(|z| (*z - want).norm()).fold(0.0, f64::max);
    assert!(spread < 1e-3 * want.norm(), "pointwise spread {spread}");

    let g = core_source(p, 1, 1, c(1.0));
    let op1 = WaveOperator::new(&kds, &grid, 1, DEFAULT_CFL, None).unwrap();
    let snaps1 = forward_solve(&kds, &grid, &g, &opts, None).unwrap();
    let peak = snaps1.iter().map(|s| l2_norm(&op1, s, None)).fold(0.0, f64::max);
    let end = l2_norm(&op1, snaps1.last().unwrap(), None);
    assert!(end < 1e-3 * peak, "m = 1 did not decay: {end} of {peak}");
}

fn synthetic(f: impl Fn(f64) -> f64, t_end: f64, dt: f64) -> Vec<(f64, f64)> {
    (0..=((t_end / dt) as usize)).map(|k| k as f64 * dt).map(|t| (t, f(t))).collect()
}

#[test]
fn decay_fit_recovers_synthetic_rates() {
    let s = synthetic(|t| (-0.3 * t).exp() * (2.0 * t).cos(), 40.0, 0.01);
    let fit = decay_fit(&s, 0.0, FitWindow::whole()).unwrap();
    assert!(fit.envelope && fit.good, "{fit:?}");
    assert!((fit.rate - 0.3).abs() < 0.01, "{fit:?}");

    let smooth = synthetic(|t| 3.0 * (-0.25 * t).exp() + 1.5, 30.0, 0.1);
    let fit = decay_fit(&smooth, 1.5, FitWindow::whole()).unwrap();
    assert!(!fit.envelope && fit.good && (fit.rate - 0.25).abs() < 1e-6);
    assert!((fit.amplitude - 3.0).abs() < 1e-5);
}

#[test]
fn decay_fit_finds_the_slowest_rate() {
    let monotone = synthetic(|t| (-0.1 * t).exp() + 4.0 * (-0.3 * t).exp(), 150.0, 0.1);
    let fit = decay_fit(&monotone, 0.0, FitWindow::new(0.0, 150.0)).unwrap();
    assert!((fit.rate - 0.1).abs() < 0.002, "{fit:?}");
    let ringing = synthetic(
        |t| (-0.07 * t).exp() * (0.8 * t).cos() + 3.0 * (-0.2 * t).exp() * (1.7 * t + 0.4).cos(),
        200.0,
        0.02,
    );
    let fit = decay_fit(&ringing, 0.0, FitWindow::new(10.0, 200.0)).unwrap();
    assert!(fit.good && (fit.rate - 0.07).abs() < 0.02 * 0.07, "{fit:?}");
}

#[test]
fn decay_fit_refuses_bad_data() {
    let flat = synthetic(|_| 0.42, 10.0, 0.1);
    assert_eq!(decay_fit(&flat, 0.42, FitWindow::whole()), Err(Error::InsufficientData));
    assert_eq!(decay_fit(&[], 0.0, FitWindow::whole()), Err(Error::InsufficientData));
    let noisy = synthetic(|t| (-0.2 * t + 0.6 * (37.0 * t).sin() * (11.0 * t).cos()).exp(), 30.0, 0.1);
    let fit = decay_fit(&noisy, 0.0, FitWindow::whole()).unwrap();
    assert!(fit.log_residual > MAX_LOG_RESIDUAL && !fit.good);
    // Under three periods of ringing is not a trustworthy fit.
    let short = synthetic(|t| (-0.3 * t).exp() * (2.0 * t).cos(), 6.0, 0.01);
    let fit = decay_fit(&short, 0.0, FitWindow::whole()).unwrap();
    assert!(fit.envelope && !fit.good, "{fit:?}");
}

fn flat_gaussian(n: usize, w: f64, time: f64) -> (WaveOperator, WaveState) {
    let grid = Grid2D::periodic_box((-4.0, 4.0), n, (-4.0, 4.0), n).unwrap();
    let op = WaveOperator::new(&Minkowski, &grid, 0, DEFAULT_CFL, None).unwrap();
    let s = WaveState::from_fn(&grid, 0, time, |x, y| c((-(x * x + y * y) / (w * w)).exp()), |_, _| c(0.0));
    (op, s)
}

#[test]
fn weighted_norms_match_closed_forms() {
    let (op, s) = flat_gaussian(32, 1.0, 0.0);
    let zero = WaveState { u: vec![c(0.0); s.u.len()], v: vec![c(0.0); s.u.len()], ..s };
    for order in [SobolevOrder::L2, SobolevOrder::H1, SobolevOrder::H2] {
        assert_eq!(weighted_norm(&op, std::slice::from_ref(&zero), order, 0.3, None, None).unwrap(), 0.0);
    }
    let w = 1.0;
    let (op, s) = flat_gaussian(800, w, 2.0);
    let nu = 0.15;
    // ∫u² = πw²/2 and ∫|∇u|² = π for u = exp(−|x|²/w²).
    let l2 = weighted_norm(&op, std::slice::from_ref(&s), SobolevOrder::L2, nu, None, None).unwrap();
    let want0 = (nu * 2.0).exp() * (PI * w * w / 2.0).sqrt();
    assert!((l2 - want0).abs() < 1e-10 * want0);
    assert!((l2 - (nu * 2.0).exp() * l2_norm(&op, &s, None)).abs() < 1e-12 * l2);
    let h1 = weighted_norm(&op, std::slice::from_ref(&s), SobolevOrder::H1, 0.0, None, None).unwrap();
    let want1 = (PI * w * w / 2.0 + PI).sqrt();
    assert!((h1 - want1).abs() < 1e-4 * want1, "{h1} vs {want1}");
    // On flat space u_tt = Δu, so H² adds ∫(Δu)² = 4π/w² and
    // ∫(u_xx² + u_xy² + u_yy²) = 7π/(2w²).
    let h2 = weighted_norm(&op, std::slice::from_ref(&s), SobolevOrder::H2, 0.0, None, None).unwrap();
    let want2 = (PI * w * w / 2.0 + PI + 7.5 * PI / (w * w)).sqrt();
    assert!((h2 - want2).abs() < 1e-3 * want2, "{h2} vs {want2}");
}

#[test]
fn space_time_norm_integrates_the_weight() {
    let (op, s) = flat_gaussian(64, 1.0, 0.0);
    let nu = 0.2;
    let series: Vec<WaveState> = (0..=400).map(|k| WaveState { time: k as f64 * 0.01, ..s.clone() }).collect();
    let slice = weighted_norm(&op, std::slice::from_ref(&s), SobolevOrder::L2, 0.0, None, None).unwrap();
    let got = weighted_norm(&op, &series, SobolevOrder::L2, nu, None, None).unwrap();
    let want = slice * (((2.0 * nu * 4.0).exp() - 1.0) / (2.0 * nu)).sqrt();
    assert!((got - want).abs() < 1e-5 * want, "{got} vs {want}");
}

fn sds_budget(factor: usize) -> FluxBudget {
    let kds = sds();
    let p = kds.params();
    let base = Grid2D::extended(p, 41, 16).unwrap();
    let grid = base.refined(factor).unwrap();
    let f = core_source(p, 0, 1, c(1.0));
    let opts = SolveOptions { t_start: 0.0, t_end: 10.0, cadence: 0.1 / factor as f64, cfl: DEFAULT_CFL };
    let op = WaveOperator::new(&kds, &grid, 0, DEFAULT_CFL, None).unwrap();
    let snaps = solve_with(&op, &f, &opts).unwrap();
    let x = SliceNormal { metric: &kds };
    budget_report(&kds, &op, &x, &snaps, Some(&f), &BudgetRegion { nu: 0.05, ..Default::default() }).unwrap()
}

#[test]
fn energy_budget_closes_at_second_order() {
    let coarse = sds_budget(1);
    let fine = sds_budget(2);
    for b in [&coarse, &fine] {
        assert!(b.signs_ok(0.0), "{b:?}");
        assert!(b.surfaces.iter().filter(|s| s.expect_nonnegative).count() == 3, "{b:?}");
        assert!(b.relative_defect() < 5e-2, "{b:?}");
    }
    let ratio = coarse.defect.abs() / fine.defect.abs();
    assert!((3.0..5.5).contains(&ratio), "defect ratio {ratio}: {coarse:?} {fine:?}");
}

#[test]
fn zero_field_has_a_zero_budget() {
    let kds = sds();
    let grid = Grid2D::extended(kds.params(), 41, 16).unwrap();
    let op = WaveOperator::new(&kds, &grid, 0, DEFAULT_CFL, None).unwrap();
    let snaps: Vec<WaveState> = (0..5).map(|k| WaveState::zeros(&grid, 0, k as f64)).collect();
    let x = SliceNormal { metric: &kds };
    let chi = |r: f64| ((r - 4.0).sin(), (r - 4.0).cos());
    let region = BudgetRegion { q1: Some((3.0, 5.0)), nu: 0.1, cutoff: Some(&chi) };
    let b = budget_report(&kds, &op, &x, &snaps, None, &region).unwrap();
    assert!(b.surfaces.iter().all(|s| s.flux == 0.0) && b.interior == 0.0 && b.defect == 0.0);
    assert_eq!(budget_report(&kds, &op, &x, &snaps[..1], None, &region), Err(Error::InsufficientData));
}

#[test]
fn cutoff_budget_inside_the_core_closes() {
    let kds = sds();
    let p = kds.params();
    let (lo, hi) = (p.r_minus() + p.delta, p.r_plus() - p.delta);
    let chi = move |r: f64| {
        let b = kds_core::numerics::smooth::Bump::new(lo, hi);
        (b.value(r), b.derivative(r))
    };
    let run = |factor: usize| {
        let grid = Grid2D::extended(p, 41, 16).unwrap().refined(factor).unwrap();
        let f = core_source(p, 0, 0, c(1.0));
        let opts = SolveOptions { t_start: 0.0, t_end: 10.0, cadence: 0.1 / factor as f64, cfl: DEFAULT_CFL };
        let op = WaveOperator::new(&kds, &grid, 0, DEFAULT_CFL, None).unwrap();
        let snaps = solve_with(&op, &f, &opts).unwrap();
        let x = SliceNormal { metric: &kds };
        let region = BudgetRegion { q1: Some((lo, hi)), nu: 0.0, cutoff: Some(&chi) };
        budget_report(&kds, &op, &x, &snaps, Some(&f), &region).unwrap()
    };
    let (a, b) = (run(1), run(2));
    let ratio = a.defect.abs() / b.defect.abs();
    assert!(ratio > 3.0, "defect ratio {ratio}: {a:?} {b:?}");
}

#[test]
fn flat_benchmark_converges_at_second_order() {
    let designations = [
        Designation::new("u_center", Expectation::Order { order: 2.0, tol: 0.3 }),
        Designation::new("l2", Expectation::Order { order: 2.0, tol: 0.3 }),
    ];
    let report = convergence_runner(&[64, 128, 256], &designations, flat_pulse_observables).unwrap();
    assert!(report.pass(), "{report:?}");

    let wrong = [
        Designation::new("u_center", Expectation::Order { order: 4.0, tol: 0.3 }),
        Designation::new("l2", Expectation::Order { order: 2.0, tol: 0.3 }),
    ];
    let report = convergence_runner(&[64, 128, 256], &wrong, flat_pulse_observables).unwrap();
    assert!(!report.pass());
    assert_eq!(report.failures(), vec!["u_center"]);
}

#[test]
fn convergence_runner_contracts() {
    let scenario = |n: usize| Ok(vec![("rate".to_string(), 0.07 * (1.0 + 0.5 / (n * n) as f64))]);
    let cauchy = [Designation::new("rate", Expectation::Cauchy { rel_tol: 0.02 })];
    assert!(convergence_runner(&[10, 20, 40], &cauchy, scenario).unwrap().pass());
    let exact = [Designation::new("rate", Expectation::OrderTo { exact: 0.07, order: 2.0, tol: 1e-9 })];
    let r = convergence_runner(&[10, 20, 40], &exact, scenario).unwrap();
    assert!(r.pass(), "{r:?}");
    assert!(convergence_runner(&[10, 20], &cauchy, scenario).is_err());
    let missing = [Designation::new("absent", Expectation::Cauchy { rel_tol: 0.02 })];
    assert!(convergence_runner(&[10, 20, 40], &missing, scenario).is_err());
}

#[test]
fn flat_cone_estimate_holds_with_quadratic_slack() {
    let mut consts = Vec::new();
    for n in [64, 128, 256] {
        let (b, h) = flat_cone_budget(n).unwrap();
        assert!(b.mantle_flux > 0.0, "{b:?}");
        assert!(b.excess <= b.defect.abs(), "{b:?}");
        consts.push(b.defect.abs() / (h * h));
    }
    for w in consts.windows(2) {
        let r = w[1] / w[0];
        assert!((0.5..=2.0).contains(&r), "slack constants {consts:?}");
    }
}
