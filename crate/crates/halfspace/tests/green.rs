use halfspace_rtm::green::GreenEngine;
use halfspace_rtm::{ElasticMedium, Tensor2C, C64};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;

fn engine() -> GreenEngine {
    GreenEngine::new(&ElasticMedium::new(0.5, 0.25, 2.0 * PI).unwrap())
}

fn rel(a: &Tensor2C, b: &Tensor2C) -> f64 {
    (*a - *b).norm() / b.norm()
}

fn parity(t: &Tensor2C) -> Tensor2C {
    t.parity()
}

/// Fourth-order central difference with one Richardson level.
fn central<F: Fn(f64) -> Tensor2C>(f: F, h: f64) -> Tensor2C {
    let d = |h: f64| (f(-2.0 * h) - f(-h).scale_re(8.0) + f(h).scale_re(8.0) - f(2.0 * h)).scale_re(1.0 / (12.0 * h));
    let a = d(h);
    let b = d(h / 2.0);
    (b.scale_re(16.0) - a).scale_re(1.0 / 15.0)
}

/// Fourth-order forward difference with one Richardson level.
fn forward<F: Fn(f64) -> Tensor2C>(f: F, h: f64) -> Tensor2C {
    let d = |h: f64| {
        (f(0.0).scale_re(-25.0) + f(h).scale_re(48.0) - f(2.0 * h).scale_re(36.0) + f(3.0 * h).scale_re(16.0)
            - f(4.0 * h).scale_re(3.0))
        .scale_re(1.0 / (12.0 * h))
    };
    let a = d(h);
    let b = d(h / 2.0);
    (b.scale_re(32.0) - a).scale_re(1.0 / 31.0)
}

fn fd_gradient(e: &GreenEngine, x: [f64; 2], y: [f64; 2]) -> [Tensor2C; 2] {
    let h = 1e-4 * 2.0 * PI / e.wavenumbers().k_s * 20.0;
    let g1 = central(|t| e.neumann_green([x[0] + t, x[1]], y).unwrap(), h);
    let g2 = if x[1] == 0.0 {
        forward(|t| e.neumann_green([x[0], t], y).unwrap(), h)
    } else {
        central(|t| e.neumann_green([x[0], x[1] + t], y).unwrap(), h)
    };
    [g1, g2]
}

fn random_points(seed: u64, n: usize) -> Vec<([f64; 2], [f64; 2])> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| {
            let x = [rng.gen_range(-3.0..3.0), rng.gen_range(0.5..4.0)];
            let y = [rng.gen_range(-3.0..3.0), rng.gen_range(0.5..4.0)];
            (x, y)
        })
        .collect()
}

#[test]
fn reciprocity_interior_pairs() {
    let e = engine();
    for (x, y) in random_points(11, 10) {
        let a = e.neumann_green(x, y).unwrap();
        let b = e.neumann_green(y, x).unwrap().transpose();
        assert!(rel(&b, &a) < 1e-6, "{x:?} {y:?}: {}", rel(&b, &a));
    }
}

#[test]
fn reciprocity_surface_to_bulk() {
    let e = engine();
    let s = [1.2, 0.0];
    let b = [-0.3, 2.2];
    let a = e.neumann_green(s, b).unwrap();
    let c = e.neumann_green(b, [s[0], 1e-12]).unwrap().transpose();
    assert!(rel(&c, &a) < 1e-6, "{}", rel(&c, &a));
}

#[test]
fn limiting_absorption_converges_linearly() {
    let e = engine();
    let x = [3.0, 0.0];
    let y = [0.0, 10.0];
    let n = e.neumann_green(x, y).unwrap();
    let err = |eps: f64| rel(&e.neumann_green_complex_freq(x, y, eps).unwrap(), &n);
    let (e3, e4) = (err(1e-3), err(1e-4));
    let ratio = e3 / e4;
    assert!((7.0..13.0).contains(&ratio), "ratio {ratio}: {e3} {e4}");
}

#[test]
fn traction_free_on_surface() {
    let e = engine();
    let m = *e.medium();
    let cases = [([3.0, 0.0], [0.0, 1.0]), ([0.5, 0.0], [0.0, 2.0]), ([-1.3, 0.0], [0.4, 0.7]), ([2.0, 0.0], [-1.0, 3.0]), ([0.0, 0.0], [0.2, 1.5])];
    for (x, y) in cases {
        let g = fd_gradient(&e, x, y);
        let t = halfspace_rtm::green::traction_tensor(&m, &g, [0.0, 1.0]);
        let scale = g[0].norm() + g[1].norm();
        assert!(t.norm() <= 1e-3 * scale, "{x:?}: {}", t.norm() / scale);
        let ts = e.neumann_green_stress(x, [0.0, 1.0], y, [C64::new(1.0, 0.0), C64::new(0.3, -0.2)]).unwrap();
        assert!((ts[0].norm() + ts[1].norm()) < 1e-6 * scale);
    }
}

#[test]
fn stress_matches_finite_differences() {
    let e = engine();
    let m = *e.medium();
    let q = [C64::new(0.7, 0.1), C64::new(-0.2, 0.5)];
    for (x, y) in random_points(5, 5) {
        let nu = [0.6, -0.8];
        let g = fd_gradient(&e, x, y);
        let fd = halfspace_rtm::green::stress_from_gradient(&m, &g, nu, q);
        let st = e.neumann_green_stress(x, nu, y, q).unwrap();
        let err = ((fd[0] - st[0]).norm_sqr() + (fd[1] - st[1]).norm_sqr()).sqrt();
        let nrm = (st[0].norm_sqr() + st[1].norm_sqr()).sqrt();
        assert!(err < 1e-4 * nrm, "{x:?} {y:?}: {}", err / nrm);
    }
}

#[test]
fn stress_is_linear_in_polarization() {
    let e = engine();
    let x = [0.4, 1.0];
    let y = [-0.5, 2.0];
    let nu = [0.0, 1.0];
    let q1 = [C64::new(1.0, 0.0), C64::new(0.0, 0.0)];
    let q2 = [C64::new(0.0, 0.0), C64::new(0.0, 2.0)];
    let a = e.neumann_green_stress(x, nu, y, q1).unwrap();
    let b = e.neumann_green_stress(x, nu, y, q2).unwrap();
    let c = e.neumann_green_stress(x, nu, y, [q1[0] + q2[0], q1[1] + q2[1]]).unwrap();
    for k in 0..2 {
        assert!((a[k] + b[k] - c[k]).norm() < 1e-13 * c[k].norm().max(1.0));
    }
}

#[test]
fn evaluation_paths_agree() {
    let e = engine();
    for (x, y) in random_points(23, 5) {
        let x = [x[0], 0.0];
        let surf = e.neumann_green(x, y).unwrap();
        let bulk = e.neumann_green([x[0], 1e-7], y).unwrap();
        let damped = e.neumann_green_complex_freq(x, y, 1e-5).unwrap();
        assert!(rel(&bulk, &surf) < 1e-5, "bulk {}", rel(&bulk, &surf));
        assert!(rel(&damped, &surf) < 1e-3, "damped {}", rel(&damped, &surf));
    }
}

#[test]
fn surface_transform_parity() {
    let e = engine();
    for x in [0.7, 2.5, 6.0] {
        let a = e.neumann_green([x, 0.0], [0.0, 1.4]).unwrap();
        let b = e.neumann_green([-x, 0.0], [0.0, 1.4]).unwrap();
        assert!(rel(&b, &parity(&a)) < 1e-9);
        let d = e.neumann_green_complex_freq([-x, 0.0], [0.0, 1.4], 1e-2).unwrap();
        let c = e.neumann_green_complex_freq([x, 0.0], [0.0, 1.4], 1e-2).unwrap();
        assert!(rel(&d, &parity(&c)) < 1e-9);
    }
}

#[test]
fn damped_tensor_decays_with_offset() {
    let e = engine();
    let v: Vec<f64> = [2.0, 8.0, 32.0]
        .iter()
        .map(|&x| e.neumann_green_complex_freq([x, 0.0], [0.0, 1.0], 1e-2).unwrap().norm())
        .collect();
    assert!(v.iter().all(|x| x.is_finite()));
    assert!(v[0] > v[1] && v[1] > v[2]);
}

#[test]
fn residue_bracket_decays_exponentially() {
    let e = engine();
    let w = e.wavenumbers();
    let depths = [1.0, 2.0, 4.0, 8.0];
    let logs: Vec<f64> = depths.iter().map(|&y| e.residue_bracket_surface(0.5, y).norm().ln()).collect();
    for p in logs.windows(2) {
        assert!(p[1] < p[0]);
    }
    let mx = depths.iter().sum::<f64>() / 4.0;
    let my = logs.iter().sum::<f64>() / 4.0;
    let sxy: f64 = depths.iter().zip(&logs).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = depths.iter().map(|x| (x - mx).powi(2)).sum();
    let slope = sxy / sxx;
    let expect = -(w.k_r * w.k_r - w.k_s * w.k_s).sqrt();
    assert!((slope / expect - 1.0).abs() < 0.1, "slope {slope} vs {expect}");
    let bound = (expect * 1.0).exp() / e.medium().mu();
    assert!(e.residue_bracket_surface(0.5, 1.0).norm() < 10.0 * bound * w.k_s);
}

#[test]
fn dirichlet_traction_properties() {
    let e = engine();
    let a = e.dirichlet_traction([1.3, 0.0], [0.2, 2.0]).unwrap();
    let b = e.dirichlet_traction([-1.3, 0.0], [-0.2, 2.0]).unwrap();
    assert!(rel(&b, &parity(&a)) < 1e-9);
    let t20 = e.dirichlet_traction([20.0, 0.0], [0.0, 10.0]).unwrap().norm();
    let t40 = e.dirichlet_traction([40.0, 0.0], [0.0, 10.0]).unwrap().norm();
    let r = t40 / t20 / 2f64.powf(-1.5);
    assert!((0.7..1.3).contains(&r), "{r}");
}

#[test]
fn fullspace_log_growth() {
    let e = engine();
    let y = [0.0, 5.0];
    let g3 = e.fullspace_green([1e-3, 5.0], y).unwrap().norm();
    let g4 = e.fullspace_green([1e-4, 5.0], y).unwrap().norm();
    let la0 = e.fullspace().diagonal_constants().1;
    let slope = (g4 - g3) / (10f64.ln());
    assert!((slope / (la0.abs() * 2f64.sqrt()) - 1.0).abs() < 0.05, "{slope}");
    assert!(e.fullspace_green(y, y).is_err());
}

#[test]
fn validation_suite_passes_for_default_medium() {
    let m = ElasticMedium::new(0.5, 0.25, 2.0 * PI).unwrap();
    let r = halfspace_rtm::validate::run_validation(&m);
    assert!(r.all_passed(), "{r}");
    let names: Vec<&str> = r.checks.iter().map(|c| c.name).collect();
    let mut uniq = names.clone();
    uniq.sort();
    uniq.dedup();
    assert_eq!(uniq.len(), names.len());
    let bad = halfspace_rtm::validate::run_validation_with(&m, Some(1.01 * r_k(&m)));
    let failed: Vec<&str> = bad.failures().map(|c| c.name).collect();
    assert_eq!(failed, ["rayleigh-root residual"]);
}

fn r_k(m: &ElasticMedium) -> f64 {
    GreenEngine::new(m).wavenumbers().k_r
}
