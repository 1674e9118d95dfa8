use std::f64::consts::PI;

use kds_core::solver::{l2_norm, Boundary, Evolution, Grid2D, WaveOperator, WaveState, DEFAULT_CFL};
use kds_core::spacetime::{surface_gravity, BlackHoleParams, KerrDeSitter};
use kds_core::spectral::*;
use kds_core::{Error, C64};
use nalgebra::DMatrix;

type Z = nalgebra::Complex<f64>;

fn sds() -> BlackHoleParams {
    BlackHoleParams::new(1.0, 0.06, 0.0).unwrap()
}

fn z(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

fn to_z(c: C64) -> Z {
    Z::new(c.re, c.im)
}

/// Barycentric differentiation matrix on arbitrary distinct nodes.
fn diff_matrix(x: &[f64]) -> DMatrix<f64> {
    let n = x.len();
    // Barycentric weights; the factor 2 keeps products in range on [−1, 1].
    let mut w = vec![1.0; n];
    for j in 0..n {
        for k in 0..n {
            if k != j {
                w[j] /= 2.0 * (x[j] - x[k]);
            }
        }
    }
    let mut d = DMatrix::zeros(n, n);
    for i in 0..n {
        let mut diag = 0.0;
        for j in 0..n {
            if i != j {
                d[(i, j)] = (w[j] / w[i]) / (x[i] - x[j]);
                diag -= d[(i, j)];
            }
        }
        d[(i, i)] = diag;
    }
    d
}

fn nearest(eigs: &[Z], target: C64) -> C64 {
    let t = to_z(target);
    let best = eigs.iter().min_by(|a, b| (*a - t).norm().total_cmp(&(*b - t).norm())).unwrap();
    z(best.re, best.im)
}

/// Chebyshev–Gauss collocation of the angular problem for `y` in
/// `S = (1−x²)^{|m|/2} y`, solved densely.
fn angular_oracle(a: f64, alpha: f64, omega: C64, m: i32, n: usize) -> Vec<Z> {
    let x: Vec<f64> = (0..n).map(|j| -(PI * (2 * j + 1) as f64 / (2 * n) as f64).cos()).collect();
    let d = diff_matrix(&x);
    let d2 = &d * &d;
    let mu = m.unsigned_abs() as f64 / 2.0;
    let mf = m as f64;
    let om = to_z(omega);
    let mut op = DMatrix::<Z>::zeros(n, n);
    for i in 0..n {
        let xi = x[i];
        let s2 = 1.0 - xi * xi;
        let dth = 1.0 + alpha * xi * xi;
        let ddth = 2.0 * alpha * xi;
        let t = om * (a * s2) - mf;
        let pot = t * t * ((1.0 + alpha) * (1.0 + alpha) / (dth * s2));
        let zeroth = -dth * (-2.0 * mu + 4.0 * mu * mu * xi * xi / s2) + ddth * 2.0 * mu * xi;
        for j in 0..n {
            let v = -dth * (s2 * d2[(i, j)] - 2.0 * (1.0 + 2.0 * mu) * xi * d[(i, j)]) - ddth * s2 * d[(i, j)];
            op[(i, j)] = Z::new(v, 0.0);
        }
        op[(i, i)] += pot + zeroth;
    }
    op.eigenvalues().expect("dense eigenvalues").iter().copied().collect()
}

/// Chebyshev–Lobatto collocation of the radial problem at `a = 0` after the
/// conjugation `R = e^{iωΦ}w` with `ΔΦ' = r²σ_lin`, which makes the regular
/// solutions analytic at both horizons; a quadratic pencil in `ω`.
fn radial_oracle(p: &BlackHoleParams, lambda: f64, n: usize) -> Vec<Z> {
    let (rm, rp) = (p.r_minus(), p.r_plus());
    let rn = p.roots()[0];
    let l3 = p.lambda / 3.0;
    let x: Vec<f64> = (0..n).map(|j| -(PI * j as f64 / (n - 1) as f64).cos()).collect();
    let half = 0.5 * (rp - rm);
    let dx = diff_matrix(&x);
    let d = &dx / half;
    let d2 = &d * &d;
    let mut l0 = DMatrix::<Z>::zeros(n, n);
    let mut l1 = DMatrix::<Z>::zeros(n, n);
    let mut einv = vec![0.0; n];
    for i in 0..n {
        let r = rm + (x[i] + 1.0) * half;
        let dl = p.delta_r(r);
        let ddl = p.delta_r_prime(r);
        let sig = (2.0 * r - rm - rp) / (rp - rm);
        let g = r * r * sig;
        let dg = 2.0 * r * sig + 2.0 * r * r / (rp - rm);
        einv[i] = ((rp - rm).powi(2) * l3 * (r - rn)) / (4.0 * r.powi(3));
        for j in 0..n {
            l0[(i, j)] = Z::new(dl * d2[(i, j)] + ddl * d[(i, j)], 0.0);
            l1[(i, j)] = Z::new(0.0, 2.0 * g * d[(i, j)]);
        }
        l0[(i, i)] -= Z::new(lambda, 0.0);
        l1[(i, i)] += Z::new(0.0, dg);
    }
    let mut comp = DMatrix::<Z>::zeros(2 * n, 2 * n);
    for i in 0..n {
        comp[(i, n + i)] = Z::new(1.0, 0.0);
        for j in 0..n {
            comp[(n + i, j)] = -l0[(i, j)] * einv[i];
            comp[(n + i, n + j)] = -l1[(i, j)] * einv[i];
        }
    }
    comp.eigenvalues().expect("dense eigenvalues").iter().copied().collect()
}

#[test]
fn spherical_spectrum_is_exact() {
    for omega in [z(0.0, 0.0), z(0.3, -0.1), z(-1.2, 0.4)] {
        for l in 0..=8usize {
            for m in -(l as i32)..=(l as i32) {
                let lam = angular_eigenvalue(0.0, 0.0, omega, m, l).unwrap();
                assert!((lam - z((l * (l + 1)) as f64, 0.0)).norm() < 1e-10, "l={l} m={m} {lam}");
            }
        }
    }
    let first = angular_eigenvalues(0.0, 0.0, z(0.2, 0.0), 0, 3).unwrap();
    for (lam, want) in first.iter().zip([0.0, 2.0, 6.0]) {
        assert!((lam.re - want).abs() < 1e-10 && lam.im.abs() < 1e-12);
    }
    assert!((angular_eigenvalues(0.0, 0.0, z(0.0, 0.0), 2, 1).unwrap()[0].re - 6.0).abs() < 1e-10);
    assert!(matches!(AngularProblem::new(0.0, 0.0, z(0.0, 0.0), 0, 0), Err(Error::InvalidParameter { .. })));
}

#[test]
fn deformed_spectrum_matches_collocation_oracle() {
    for (a, omega, m) in
        [(0.05, z(0.3, 0.0), 1), (0.05, z(0.3, -0.1), 0), (0.3, z(1.5, -0.4), 2), (0.2, z(0.8, -0.2), -1)]
    {
        let alpha = 0.06 * a * a / 3.0;
        let ours = angular_eigenvalues(a, alpha, omega, m, 4).unwrap();
        let oracle = angular_oracle(a, alpha, omega, m, 2 * DEFAULT_BASIS);
        for (k, lam) in ours.iter().enumerate() {
            let l = m.unsigned_abs() as usize + k;
            let o = nearest(&oracle, *lam);
            assert!((o - lam).norm() < 1e-8 * lam.norm().max(1.0), "a={a} m={m} l={l}: {lam} vs {o}");
            let shift = (lam - z((l * (l + 1)) as f64, 0.0)).norm();
            assert!(shift < 2.0 * (a * a + a * omega.norm()) * (1.0 + omega.norm()), "{shift}");
        }
    }
}

#[test]
fn angular_modes_solve_the_angular_equation_pointwise() {
    let (a, omega, m) = (0.1, z(0.6, -0.15), 1);
    let alpha = 0.06 * a * a / 3.0;
    let prob = AngularProblem::new(a, alpha, omega, m, DEFAULT_BASIS).unwrap();
    for l in 1..4 {
        let md = prob.mode(l).unwrap();
        for theta in [0.2, 0.9, 1.6, 2.7] {
            let (s, _) = md.eval(theta);
            let ps = md.apply_operator(a, alpha, omega, theta);
            assert!((ps - md.lambda * s).norm() < 1e-8 * (1.0 + s.norm() * md.lambda.norm()), "l={l}");
        }
    }
}

#[test]
fn constants_span_the_zero_mode() {
    let p = sds();
    let kds = KerrDeSitter::new(p).unwrap();
    let mode = radial_qnm(&p, z(0.0, 0.0), 0, z(0.0, 0.0)).unwrap();
    assert_eq!(mode.omega, z(0.0, 0.0));
    assert_eq!(mode.residual, 0.0);
    let one = |_: f64, _: f64| z(1.0, 0.0);
    for (r, th) in [(3.0, 0.4), (4.5, 1.9)] {
        assert_eq!(apply_stationary(&kds, z(0.0, 0.0), 0, &one, r, th), z(0.0, 0.0));
    }
    let grid = Grid2D::radial(3.0, 5.0, 40, 16, Boundary::Outflow, Boundary::Outflow).unwrap();
    let res = stationary_residual_check(&kds, &grid, z(0.0, 0.0), 0, &one).unwrap();
    assert!(res.solver < 1e-12 && res.assembly < 1e-12, "{res:?}");
}

#[test]
fn fundamental_mode_matches_collocation_oracle() {
    let p = sds();
    let mode = radial_qnm(&p, z(2.0, 0.0), 0, z(0.2, -0.06)).unwrap();
    assert!(mode.residual < 1e-10);
    for n in [40, 56] {
        let o = nearest(&radial_oracle(&p, 2.0, n), mode.omega);
        assert!((o - mode.omega).norm() < 5e-4 * mode.omega.norm(), "n={n}: {} vs {o}", mode.omega);
    }
    // The coupled solver agrees with the fixed-λ one at a = 0.
    let coupled = qnm(&p, 1, 0, z(0.2, -0.06)).unwrap();
    assert!((coupled.omega - mode.omega).norm() < 1e-12);
    assert_eq!(coupled.l, Some(1));
}

#[test]
fn modes_come_in_reflected_pairs() {
    let p = BlackHoleParams::new(1.0, 0.06, 0.02).unwrap();
    let fwd = qnm(&p, 1, 1, z(0.19, -0.07)).unwrap();
    let back = qnm(&p, 1, -1, -fwd.omega.conj()).unwrap();
    assert!((back.omega + fwd.omega.conj()).norm() < 1e-9, "{} {}", fwd.omega, back.omega);
    assert!((back.lambda - fwd.lambda.conj()).norm() < 1e-9);
    let lam = radial_qnm(&p, fwd.lambda, 1, fwd.omega).unwrap();
    assert!((lam.omega - fwd.omega).norm() < 1e-9);
}

#[test]
fn indicial_exponents_match_surface_gravities() {
    let p = sds();
    let (k_minus, k_plus) = surface_gravity(&p).unwrap();
    for omega in [z(0.3, -0.1), z(-0.07, 0.2)] {
        let [lo, hi] = indicial_exponents(&p, omega, 0).unwrap();
        assert_eq!(lo.0, z(0.0, 0.0));
        assert_eq!(hi.0, z(0.0, 0.0));
        let i = z(0.0, 1.0);
        assert!((lo.1 - i * omega / k_minus).norm() < 1e-8, "{} {}", lo.1, i * omega / k_minus);
        assert!((hi.1 - i * omega / k_plus).norm() < 1e-8);
    }
}

#[test]
fn slow_rotation_moves_modes_continuously() {
    let base = qnm(&sds(), 1, 1, z(0.19, -0.07)).unwrap();
    let shift = |a: f64| {
        let p = BlackHoleParams::new(1.0, 0.06, a).unwrap();
        qnm(&p, 1, 1, base.omega).unwrap().omega - base.omega
    };
    let (d1, d2) = (shift(0.01), shift(0.02));
    let ratio = d2.norm() / d1.norm();
    assert!((1.7..2.3).contains(&ratio), "shift ratio {ratio}");
    assert!(d2.norm() < 0.1 * base.omega.norm());
    // Axisymmetric modes move only at second order.
    let p = BlackHoleParams::new(1.0, 0.06, 0.02).unwrap();
    let axi = qnm(&p, 1, 0, base.omega).unwrap().omega - base.omega;
    assert!(axi.norm() < 0.2 * d2.norm());
}

#[test]
fn degenerate_and_unstable_inputs_are_rejected() {
    let p = sds();
    // Far from any zero, Newton leaves the search disc.
    assert!(matches!(radial_qnm(&p, z(2.0, 0.0), 0, z(3.0, 2.0)), Err(Error::NoRoot)));
    assert!(matches!(qnm(&p, 0, 1, z(0.1, 0.0)), Err(Error::InvalidParameter { .. })));
}

#[test]
fn gap_scan_certifies_the_default_box() {
    let p = sds();
    let cfg = GapScanConfig { m_max: 0, ..GapScanConfig::default() };
    let rep = spectral_gap_scan(&p, &cfg).unwrap();
    assert!(rep.zero_mode());
    let zeros: Vec<_> = rep.roots.iter().filter(|r| r.omega.norm() < ZERO_MODE_TOL).collect();
    assert_eq!(zeros.len(), 1);
    assert_eq!((zeros[0].l, zeros[0].m), (0, 0));
    let nu = rep.gap().unwrap();
    assert!(nu > 0.05 && nu < 0.08, "{nu}");
    assert!(rep.certifies(nu));
    let upper: Vec<_> = rep.roots.iter().filter(|r| r.omega.im >= -0.5 * nu).collect();
    assert_eq!(upper.len(), 1);
    // Counts and roots agree cell by cell.
    assert_eq!(rep.cells.iter().map(|c| c.count).sum::<usize>(), rep.roots.len());
    for r in &rep.roots {
        assert!(r.residual < 1e-8 && r.omega.im <= UNSTABLE_TOL);
    }
    // The l = 1 fundamental is among them and agrees with direct polish.
    let fund = qnm(&p, 1, 0, z(0.2, -0.07)).unwrap();
    assert!(rep.roots.iter().any(|r| r.l == 1 && (r.omega - fund.omega).norm() < 1e-9));
}

#[test]
fn gap_scan_counts_small_boxes() {
    let p = sds();
    let empty = GapScanConfig { re: (0.6, 0.9), im: (-0.03, 0.05), l_max: 2, m_max: 0, ..Default::default() };
    let rep = spectral_gap_scan(&p, &empty).unwrap();
    assert!(rep.roots.is_empty() && rep.cells.is_empty());
    let around = GapScanConfig { re: (0.15, 0.22), im: (-0.1, -0.04), l_max: 1, m_max: 0, ..Default::default() };
    let rep = spectral_gap_scan(&p, &around).unwrap();
    assert_eq!(rep.roots.len(), 1);
    let fund = qnm(&p, 1, 0, z(0.2, -0.07)).unwrap();
    assert!((rep.roots[0].omega - fund.omega).norm() < 1e-10);
    assert!(!rep.certifies(0.0));
}

fn smooth_test_function(r: f64, theta: f64) -> C64 {
    // Polynomial bump in r ∈ (3, 5) times a low-order angular polynomial.
    let x = (r - 4.0) / 1.0;
    if x.abs() >= 1.0 {
        return z(0.0, 0.0);
    }
    let b = (1.0 - x * x).powi(6);
    let c = theta.cos();
    z(b * (1.0 + 0.3 * c + 0.2 * c * c * x), b * 0.1 * (x - c))
}

#[test]
fn solver_reproduces_the_stationary_operator() {
    let p = BlackHoleParams::new(1.0, 0.06, 0.02).unwrap();
    let kds = KerrDeSitter::new(p).unwrap();
    let omega = z(0.25, -0.05);
    let res = |n: usize| {
        let g = Grid2D::radial(2.9, 5.1, n, 16, Boundary::Outflow, Boundary::Outflow).unwrap();
        stationary_residual_check(&kds, &g, omega, 0, &smooth_test_function).unwrap()
    };
    let (c, f) = (res(41), res(81));
    assert!(c.assembly < 1e-6 * c.scale, "{c:?}");
    let ratio = c.solver / f.solver;
    // The θ grid is fixed; the angular error is far below the radial one.
    assert!((3.3..4.7).contains(&ratio), "ratio {ratio} ({c:?} {f:?})");
}

#[test]
fn injected_mode_decays_at_its_rate() {
    let p = sds();
    let kds = KerrDeSitter::new(p).unwrap();
    let mode = qnm(&p, 1, 0, z(0.2, -0.07)).unwrap();
    let prof = ModeProfile::for_mode(&kds, &mode).unwrap();
    let grid = Grid2D::extended(&p, 101, 16).unwrap();
    let minus_i_omega = z(0.0, -1.0) * mode.omega;
    let mut init = WaveState::zeros(&grid, 0, 0.0);
    for i in 0..grid.q1.n {
        for j in 0..grid.q2.n {
            let k = grid.index(i, j);
            let v = prof.value(grid.q1.node(i), grid.q2.node(j)).unwrap();
            init.u[k] = v;
            init.v[k] = minus_i_omega * v;
        }
    }
    let scale = init.max_abs();
    init.u.iter_mut().chain(init.v.iter_mut()).for_each(|x| *x /= scale);
    let op = WaveOperator::new(&kds, &grid, 0, DEFAULT_CFL, None).unwrap();
    let mut evo = Evolution::new(&op, init, None).unwrap();
    let dt = op.max_dt();
    let mut norms = Vec::new();
    let every = (2.0 / dt).ceil() as usize;
    evo.run(80.0, 80.0 / (80.0 / dt).ceil(), every, |s| norms.push((s.time, l2_norm(&op, s, None)))).unwrap();
    let (t0, n0) = norms[5];
    let (t1, n1) = *norms.last().unwrap();
    let rate = -(n1 / n0).ln() / (t1 - t0);
    let want = mode.decay_rate();
    assert!((rate - want).abs() < 0.05 * want, "rate {rate} vs {want}");
}
