use std::f64::consts::PI;

use kds_core::numerics::linalg::{det_inverse4, identity4, max_abs_diff4, mul4, sym_eigen4, Mat4};
use kds_core::spacetime::*;
use kds_core::Error;

fn sds() -> BlackHoleParams {
    BlackHoleParams::new(1.0, 0.06, 0.0).unwrap()
}

/// Newton iteration on r³ − 50r + 100, the reduced a = 0 polynomial.
fn cubic_root(guess: f64) -> f64 {
    let mut r = guess;
    for _ in 0..60 {
        r -= (r * r * r - 50.0 * r + 100.0) / (3.0 * r * r - 50.0);
    }
    r
}

fn signature(g: &Mat4) -> (usize, usize) {
    let (ev, _) = sym_eigen4(g);
    (ev.iter().filter(|&&e| e > 0.0).count(), ev.iter().filter(|&&e| e < 0.0).count())
}

#[test]
fn delta_r_values() {
    assert_eq!(delta_r_raw(1.0, 0.0, 0.0, 2.0), 0.0);
    assert!((delta_r_raw(1.0, 0.06, 0.0, 1.0) + 1.02).abs() < 1e-15);
    let v = delta_r_raw(1.0, 0.06, 0.1, 3.0);
    // (9.01)(0.82) − 6 in exact decimal arithmetic.
    assert!(((v - 1.3882) / 1.3882).abs() < 1e-14);
}

#[test]
fn horizons_match_cubic_oracle() {
    let p = sds();
    let h = find_horizons(&p).unwrap();
    assert!((h.r_minus - cubic_root(2.2)).abs() < 1e-10);
    assert!((h.r_plus - cubic_root(5.7)).abs() < 1e-10);
    assert!(p.delta_r(h.r_minus).abs() < 1e-10);
    assert!(p.delta_r(h.r_plus).abs() < 1e-10);
    assert!(h.d_delta_minus > 0.0 && h.d_delta_plus < 0.0);
    for k in 1..1000 {
        let r = h.r_minus + (h.r_plus - h.r_minus) * k as f64 / 1000.0;
        assert!(p.delta_r(r) > 0.0);
    }
}

#[test]
fn schwarzschild_limit_is_not_admissible() {
    assert!(matches!(BlackHoleParams::new(1.0, 0.0, 0.0), Err(Error::NotAdmissible(_))));
    assert!(matches!(BlackHoleParams::new(1.0, 0.2, 0.0), Err(Error::NotAdmissible(_))));
}

#[test]
fn rotating_roots_are_perturbative() {
    let p0 = sds();
    let p = BlackHoleParams::new(1.0, 0.06, 0.05).unwrap();
    assert!((p.r_minus() - p0.r_minus()).abs() < 4.0 * 0.05 * 0.05);
    assert!((p.r_plus() - p0.r_plus()).abs() < 4.0 * 0.05 * 0.05);
    let roots = p.roots();
    assert!(roots.iter().sum::<f64>().abs() < 1e-12);
    for r in roots {
        assert!(p.delta_r(r).abs() < 1e-10);
    }
}

#[test]
fn width_validation() {
    let e = BlackHoleParams::with_widths(1.0, 0.06, 0.0, Some(1.0), None);
    assert!(matches!(e, Err(Error::InvalidParameter { name: "delta", .. })));
    let e = BlackHoleParams::with_widths(1.0, 0.06, 0.0, None, Some(-0.1));
    assert!(matches!(e, Err(Error::InvalidParameter { name: "epsilon", .. })));
}

#[test]
fn boyer_lindquist_reduces_to_sds() {
    let p = sds();
    let kds = KerrDeSitter::new(p).unwrap();
    for (r, th) in [(2.5, 0.3), (4.0, 1.5), (5.5, 2.9)] {
        let m = kds.metric_bl(&SpacetimePoint::new(Chart::BoyerLindquist, 0.0, r, th, 1.0)).unwrap();
        let d = p.delta_r(r);
        let s2 = th.sin().powi(2);
        let mut e = [[0.0; 4]; 4];
        e[0][0] = d / (r * r);
        e[1][1] = -r * r / d;
        e[2][2] = -r * r;
        e[3][3] = -r * r * s2;
        assert!(max_abs_diff4(&m.g, &e) < 1e-12);
        let inv = inverse_metric(&m).unwrap();
        let mut ei = [[0.0; 4]; 4];
        ei[0][0] = r * r / d;
        ei[1][1] = -d / (r * r);
        ei[2][2] = -1.0 / (r * r);
        ei[3][3] = -1.0 / (r * r * s2);
        assert!(max_abs_diff4(&inv, &ei) < 1e-12);
    }
    let out = kds.metric_bl(&SpacetimePoint::new(Chart::BoyerLindquist, 0.0, 6.0, 1.0, 0.0));
    assert!(matches!(out, Err(Error::OutOfChart { .. })));
}

#[test]
fn equatorial_metric_matches_expansion() {
    let (m0, lam, a) = (1.0, 0.06, 0.1);
    let p = BlackHoleParams::new(m0, lam, a).unwrap();
    let kds = KerrDeSitter::new(p).unwrap();
    let r = 3.3;
    let g = kds.metric_bl(&SpacetimePoint::new(Chart::BoyerLindquist, 0.0, r, PI / 2.0, 0.0)).unwrap().g;
    // At θ = π/2: Δ_θ = 1, ρ² = r², sin θ = 1 (up to rounding in cos).
    let alpha = lam * a * a / 3.0;
    let d = (r * r + a * a) * (1.0 - lam * r * r / 3.0) - 2.0 * m0 * r;
    let k = (1.0 + alpha) * (1.0 + alpha) * r * r;
    let gtt = (d - a * a) / k;
    let gtp = a * (r * r + a * a - d) / k;
    let gpp = (d * a * a - (r * r + a * a) * (r * r + a * a)) / k;
    assert!((g[0][0] - gtt).abs() < 1e-12);
    assert!((g[0][3] - gtp).abs() < 1e-12);
    assert!((g[3][3] - gpp).abs() < 1e-12);
    assert!((g[1][1] + r * r / d).abs() < 1e-12);
    assert!((g[2][2] + r * r).abs() < 1e-12);
    assert!(g[0][3] != 0.0);
    assert_eq!(signature(&g), (1, 3));
    let sd = sqrt_det(&Metric4 { g, point: SpacetimePoint::new(Chart::BoyerLindquist, 0.0, r, PI / 2.0, 0.0) });
    assert!((sd - r * r / (1.0 + alpha).powi(2)).abs() < 1e-12);
}

#[test]
fn kerr_star_regular_at_horizons() {
    for a in [0.0, 0.05] {
        let p = BlackHoleParams::new(1.0, 0.06, a).unwrap();
        let kds = KerrDeSitter::new(p).unwrap();
        for r in [p.r_minus(), p.r_plus()] {
            for th in [0.2, 1.0, 2.5] {
                let m = kds.metric_star(&SpacetimePoint::new(Chart::KerrStar, 0.0, r, th, 0.0)).unwrap();
                assert!(m.g.iter().flatten().all(|v| v.is_finite()));
                assert_eq!(signature(&m.g), (1, 3));
                let rel = (sqrt_det(&m) - kds.volume_density(r, th)).abs() / kds.volume_density(r, th);
                assert!(rel < 1e-10);
                if a == 0.0 {
                    assert_eq!(m.g[1][1], 0.0);
                    let c = causal_character(&m.g, &[0.0, 1.0, 0.0, 0.0], 1e-12).unwrap();
                    assert_eq!(c, CausalCharacter::Null);
                }
            }
        }
    }
}

#[test]
fn closed_form_agrees_with_pushforward() {
    for a in [0.0, 0.05, 0.1] {
        let p = BlackHoleParams::new(1.0, 0.06, a).unwrap();
        let kds = KerrDeSitter::new(p).unwrap();
        let (lo, hi) = kds.transition().band();
        // Collars inside the exterior, then the switching band.
        let mut rs = vec![p.r_minus() + 0.3 * p.epsilon, p.r_minus() + 0.9 * p.epsilon];
        rs.extend([p.r_plus() - 0.5 * p.epsilon, p.r_plus() - 0.95 * p.epsilon]);
        rs.extend((0..7).map(|k| lo + (hi - lo) * k as f64 / 6.0));
        for r in rs {
            for th in [0.4, 1.3, 2.2] {
                let push = kds.star_pushforward(r, th);
                let closed = kds.star_components(r, th);
                let scale = push.iter().flatten().fold(1.0f64, |m, v| m.max(v.abs()));
                assert!(max_abs_diff4(&push, &closed) < 1e-10 * scale, "a={a} r={r}");
                let m = kds.metric_star(&SpacetimePoint::new(Chart::KerrStar, 0.0, r, th, 0.0)).unwrap();
                assert!(max_abs_diff4(&m.g, &closed) < 1e-10 * scale);
            }
        }
    }
}

#[test]
fn pulling_back_recovers_boyer_lindquist() {
    let p = BlackHoleParams::new(1.0, 0.06, 0.08).unwrap();
    let kds = KerrDeSitter::new(p).unwrap();
    let tr = kds.transition();
    for r in [p.r_minus() + 1.5 * p.epsilon, 3.7, p.r_plus() - 1.5 * p.epsilon] {
        let th = 0.9;
        let star = kds.star_components(r, th);
        let mut jinv = identity4();
        jinv[0][1] = -tr.ft_prime(r);
        jinv[3][1] = -tr.fphi_prime(r);
        let mut jt = jinv;
        for i in 0..4 {
            for j in 0..4 {
                jt[i][j] = jinv[j][i];
            }
        }
        let back = mul4(&jt, &mul4(&star, &jinv));
        let bl = kds.bl_components(r, th);
        let scale = bl.iter().flatten().fold(1.0f64, |m, v| m.max(v.abs()));
        assert!(max_abs_diff4(&back, &bl) < 1e-10 * scale);
    }
}

#[test]
fn transition_identities() {
    for a in [0.0, 0.07] {
        let p = BlackHoleParams::new(1.0, 0.06, a).unwrap();
        let kds = KerrDeSitter::new(p).unwrap();
        let tr = kds.transition();
        let al = p.alpha;
        for r in [p.r_plus() - 0.5 * p.epsilon, p.r_plus() - 0.01 * p.epsilon] {
            let d = p.delta_r(r);
            assert!((tr.ft_prime(r) - (1.0 + al) * (r * r + a * a) / d).abs() < 1e-12 * tr.ft_prime(r).abs());
            assert!((tr.fphi_prime(r) - (1.0 + al) * a / d).abs() <= 1e-12 * tr.fphi_prime(r).abs());
        }
        for r in [p.r_minus() + 0.5 * p.epsilon, p.r_minus() + 0.01 * p.epsilon] {
            let d = p.delta_r(r);
            assert!((tr.ft_prime(r) + (1.0 + al) * (r * r + a * a) / d).abs() < 1e-12 * tr.ft_prime(r).abs());
            assert!((tr.fphi_prime(r) + (1.0 + al) * a / d).abs() <= 1e-12 * tr.fphi_prime(r).abs());
        }
        // The antiderivatives are consistent with the derivatives everywhere
        // in the exterior, including across the switching band.
        let h = 1e-5;
        for k in 1..40 {
            let r = p.r_minus() + (p.r_plus() - p.r_minus()) * k as f64 / 40.0;
            let fd = (tr.ft(r + h) - tr.ft(r - h)) / (2.0 * h);
            assert!((fd - tr.ft_prime(r)).abs() < 1e-6 * (1.0 + tr.ft_prime(r).abs()), "r = {r}");
            let fd = (tr.fphi(r + h) - tr.fphi(r - h)) / (2.0 * h);
            assert!((fd - tr.fphi_prime(r)).abs() < 1e-6 * (1.0 + tr.fphi_prime(r).abs()));
            if a == 0.0 {
                assert_eq!(tr.fphi(r), 0.0);
                assert_eq!(tr.fphi_prime(r), 0.0);
            }
            let hh = kds.shift();
            let fd = (hh.h(r + h) - hh.h(r - h)) / (2.0 * h);
            assert!((fd - hh.h_prime(r)).abs() < 1e-7);
        }
    }
}

#[test]
fn inverse_and_volume_in_every_chart() {
    let p = BlackHoleParams::new(1.0, 0.06, 0.1).unwrap();
    let base = KerrDeSitter::new(p).unwrap();
    let (lo, hi) = base.extended_range();
    for chart in [Chart::BoyerLindquist, Chart::KerrStar, Chart::ShiftedKerrStar] {
        let kds = base.in_chart(chart);
        for k in 0..=30 {
            let mut r = lo + (hi - lo) * k as f64 / 30.0;
            if chart == Chart::BoyerLindquist {
                r = p.r_minus() + (p.r_plus() - p.r_minus()) * (k as f64 + 0.5) / 31.0;
            }
            for th in [0.3, 1.2, 2.8] {
                let g = kds.metric(r, th);
                let gi = kds.inverse_metric(r, th).unwrap();
                let scale = gi.iter().flatten().fold(1.0f64, |m, v| m.max(v.abs()))
                    * g.iter().flatten().fold(1.0f64, |m, v| m.max(v.abs()));
                assert!(max_abs_diff4(&mul4(&g, &gi), &identity4()) < 1e-12 * scale, "{chart:?} r={r}");
                let (det, _) = det_inverse4(&g).unwrap();
                let rel = (det.abs().sqrt() - kds.volume_density(r, th)).abs() / kds.volume_density(r, th);
                assert!(rel < 1e-10, "{chart:?} r={r}");
                assert_eq!(signature(&g), (1, 3));
            }
        }
    }
}

#[test]
fn slices_and_radial_surfaces_are_spacelike() {
    for a in [0.0, 0.02, 0.1] {
        let p = BlackHoleParams::new(1.0, 0.06, a).unwrap();
        let kds = KerrDeSitter::new(p).unwrap();
        let (lo, hi) = kds.extended_range();
        for k in 0..=200 {
            let r = lo + (hi - lo) * k as f64 / 200.0;
            for th in [0.05, 1.0, PI / 2.0, 3.0] {
                assert!(kds.shifted_inverse(r, th)[0][0] > 0.0);
            }
        }
        for r in [p.r_plus() + 0.5 * p.delta, p.r_minus() - 0.5 * p.delta] {
            assert!(kds.star_inverse(r, 1.0)[1][1] > 0.0);
        }
    }
}

#[test]
fn causal_characters() {
    let kds = KerrDeSitter::new(sds()).unwrap();
    let g = kds.bl_components(4.0, 1.0);
    assert_eq!(causal_character(&g, &[1.0, 0.0, 0.0, 0.0], 1e-12).unwrap(), CausalCharacter::Timelike);
    assert_eq!(causal_character(&g, &[0.0, 0.0, 1.0, 0.0], 1e-12).unwrap(), CausalCharacter::Spacelike);
    assert_eq!(causal_character(&g, &[0.0; 4], 1e-12), Err(Error::ZeroVector));
    let m = Minkowski.metric(0.0, 0.0);
    assert_eq!(causal_character(&m, &[1.0, 1.0, 0.0, 0.0], 1e-12).unwrap(), CausalCharacter::Null);
}

#[test]
fn ergosphere_indicator_signs() {
    let kds = KerrDeSitter::new(sds()).unwrap();
    let p = *kds.params();
    for k in 1..50 {
        let r = p.r_minus() + (p.r_plus() - p.r_minus()) * k as f64 / 50.0;
        let e = kds.ergosphere_indicator(r, 0.7);
        assert!((e - p.delta_r(r) / (r * r)).abs() < 1e-14 && e > 0.0);
    }
    let p = BlackHoleParams::new(1.0, 0.06, 0.1).unwrap();
    let kds = KerrDeSitter::new(p).unwrap();
    assert!(kds.ergosphere_indicator(p.r_minus() + 1e-3, PI / 2.0) < 0.0);
    for k in 1..50 {
        let r = p.r_minus() + (p.r_plus() - p.r_minus()) * k as f64 / 50.0;
        assert!(kds.ergosphere_indicator(r, 0.0) > 0.0);
    }
}

#[test]
fn christoffels_flat_and_sds() {
    let g = christoffel(&Minkowski, 0.3, -1.0).unwrap();
    assert!(g.iter().flatten().flatten().all(|&v| v == 0.0));

    let p = sds();
    let kds = KerrDeSitter::new(p).unwrap().in_chart(Chart::BoyerLindquist);
    let (r, th) = (3.1, 0.8);
    let gam = christoffel(&kds, r, th).unwrap();
    let f = p.delta_r(r) / (r * r);
    let fp = p.delta_r_prime(r) / (r * r) - 2.0 * p.delta_r(r) / (r * r * r);
    let (s, c) = (th.sin(), th.cos());
    let expect = [
        ((0, 0, 1), fp / (2.0 * f)),
        ((1, 0, 0), f * fp / 2.0),
        ((1, 1, 1), -fp / (2.0 * f)),
        ((1, 2, 2), -r * f),
        ((1, 3, 3), -r * f * s * s),
        ((2, 1, 2), 1.0 / r),
        ((2, 3, 3), -s * c),
        ((3, 1, 3), 1.0 / r),
        ((3, 2, 3), c / s),
    ];
    let mut seen = [[[false; 4]; 4]; 4];
    for ((m, n, q), v) in expect {
        assert!((gam[m][n][q] - v).abs() < 1e-8, "Γ^{m}_{n}{q}");
        assert_eq!(gam[m][n][q], gam[m][q][n]);
        seen[m][n][q] = true;
        seen[m][q][n] = true;
    }
    for m in 0..4 {
        for n in 0..4 {
            for q in 0..4 {
                if !seen[m][n][q] {
                    assert!(gam[m][n][q].abs() < 1e-8);
                }
            }
        }
    }
}

#[test]
fn surface_gravities() {
    let p = sds();
    let (km, kp) = surface_gravity(&p).unwrap();
    let expect_m = p.delta_r_prime(p.r_minus()).abs() / (2.0 * p.r_minus().powi(2));
    let expect_p = p.delta_r_prime(p.r_plus()).abs() / (2.0 * p.r_plus().powi(2));
    assert!((km - expect_m).abs() < 1e-8);
    assert!((kp - expect_p).abs() < 1e-8);
    for a in [0.01, 0.05, 0.1, 0.2] {
        for lam in [0.02, 0.06, 0.1] {
            let p = BlackHoleParams::new(1.0, lam, a).unwrap();
            let h = find_horizons(&p).unwrap();
            assert!(h.kappa_minus > 0.0 && h.kappa_plus > 0.0);
            for (r, d, k) in [(h.r_minus, h.d_delta_minus, h.kappa_minus), (h.r_plus, h.d_delta_plus, h.kappa_plus)] {
                let closed = d.abs() / (2.0 * (1.0 + p.alpha) * (r * r + a * a));
                assert!((k - closed).abs() < 1e-7 * closed, "a={a} lam={lam}");
            }
        }
    }
}
