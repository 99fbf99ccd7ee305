use halfspace_rtm::forward::*;
use halfspace_rtm::green::GreenEngine;
use halfspace_rtm::{ElasticMedium, C64};
use nalgebra::DMatrix;
use std::f64::consts::PI;

fn medium() -> ElasticMedium {
    ElasticMedium::new(0.5, 0.25, 2.0 * PI).unwrap()
}

fn circle() -> BoundaryCurve {
    make_curve(CurveKind::Circle { radius: 1.0 }, [0.0, 10.0], 1.0).unwrap()
}

fn solver(obs: &[Obstacle], n: usize) -> ForwardSolver {
    let curves: Vec<_> = obs.iter().map(|o| o.curve.clone()).collect();
    let mesh = Mesh::with_counts(&curves, vec![n; obs.len()]).unwrap();
    ForwardSolver::with_mesh(GreenEngine::new(&medium()), obs, mesh, 1e12).unwrap()
}

const E1: [C64; 2] = [C64 { re: 1.0, im: 0.0 }, C64 { re: 0.0, im: 0.0 }];
const E2: [C64; 2] = [C64 { re: 0.0, im: 0.0 }, C64 { re: 1.0, im: 0.0 }];

/// Boundary data of the field radiated by point sources inside the obstacles;
/// the boundary system must reproduce that field at the receivers.
fn point_source_error(obs: &[Obstacle], inner: &[[f64; 2]], n: usize) -> f64 {
    let s = solver(obs, n);
    let e = s.engine();
    let p = [C64::new(0.8, 0.3), C64::new(-0.4, 1.0)];
    let mesh = s.mesh();
    let mut b = DMatrix::<C64>::zeros(2 * mesh.len(), 1);
    let field = |x: [f64; 2]| {
        let mut u = [C64::new(0.0, 0.0); 2];
        for z in inner {
            let v = e.neumann_green(x, *z).unwrap().mul_vec(p);
            u[0] += v[0];
            u[1] += v[1];
        }
        u
    };
    for j in 0..mesh.len() {
        let pt = mesh.point(j);
        let o = &obs[mesh.curve_of(j)];
        let u = field(pt.x);
        let mut t = [C64::new(0.0, 0.0); 2];
        for z in inner {
            let v = e.neumann_green_stress(pt.x, pt.normal(), *z, p).unwrap();
            t[0] += v[0];
            t[1] += v[1];
        }
        let row = match o.bc {
            BcKind::Dirichlet => u,
            BcKind::Neumann => t,
            BcKind::Impedance(pr) => {
                let eta = C64::new(0.0, pr.eval(mesh.param(j)));
                [t[0] + eta * u[0], t[1] + eta * u[1]]
            }
        };
        b[(2 * j, 0)] = row[0];
        b[(2 * j + 1, 0)] = row[1];
    }
    let phi = s.solve(&b).unwrap();
    let rcv = [-15.0, -2.0, 0.5, 7.0, 30.0];
    let u = s.receiver_matrix(&rcv).unwrap() * phi;
    let (mut num, mut den) = (0.0, 0.0);
    for (r, &x) in rcv.iter().enumerate() {
        let ex = field([x, 0.0]);
        for c in 0..2 {
            num += (u[(2 * r + c, 0)] - ex[c]).norm_sqr();
            den += ex[c].norm_sqr();
        }
    }
    (num / den).sqrt()
}

#[test]
fn point_source_oracle_all_conditions() {
    let kite = make_curve(CurveKind::Kite, [0.0, 9.0], 1.0).unwrap();
    let z = [-0.2, 9.0];
    assert!(kite.contains(z));
    for bc in [
        BcKind::Dirichlet,
        BcKind::Neumann,
        BcKind::Impedance(ImpedanceProfile::Constant(1.0)),
        BcKind::Impedance(ImpedanceProfile::Cosine { mean: 2.0, amp: 1.0, freq: 2 }),
    ] {
        let ob = Obstacle::new(kite.clone(), bc).unwrap();
        let err = point_source_error(&[ob], &[z], 64);
        assert!(err < 1e-6, "{}: {err:e}", bc.name());
    }
}

#[test]
fn point_source_oracle_two_obstacles() {
    let a = make_curve(CurveKind::Circle { radius: 0.6 }, [-1.5, 8.0], 1.0).unwrap();
    let b = make_curve(CurveKind::Leaf { p: 3 }, [1.5, 9.0], 0.7).unwrap();
    let obs = [Obstacle::new(a, BcKind::Dirichlet).unwrap(), Obstacle::new(b, BcKind::Neumann).unwrap()];
    let err = point_source_error(&obs, &[[-1.5, 8.1], [1.5, 9.0]], 48);
    assert!(err < 1e-6, "{err:e}");
}

#[test]
fn dirichlet_midpoint_residual() {
    let s = solver(&[Obstacle::new(circle(), BcKind::Dirichlet).unwrap()], 40);
    for (xs, q) in [(0.0, E1), (3.0, E2), (-20.0, E1)] {
        let phi = s.solve_density(xs, q).unwrap();
        let r = s.dirichlet_residual(&phi, xs, q).unwrap();
        assert!(r < 1e-3, "{xs}: {r:e}");
    }
}

#[test]
fn receiver_data_converges_spectrally() {
    let ob = [Obstacle::new(circle(), BcKind::Dirichlet).unwrap()];
    let src = [-8.0, 0.0, 4.0];
    let rcv = [-12.0, -1.0, 0.0, 9.0];
    let u: Vec<DMatrix<C64>> = [12usize, 16, 20, 64].iter().map(|&n| solver(&ob, n).scattered(&src, &rcv).unwrap()).collect();
    let err: Vec<f64> = u[..3].iter().map(|x| (x - &u[3]).norm() / u[3].norm()).collect();
    assert!(err[0] / err[1] >= 10.0 || err[1] < 1e-12, "{err:?}");
    let fine = solver(&ob, 128).scattered(&src, &rcv).unwrap();
    assert!((&u[3] - &fine).norm() / fine.norm() < 1e-4);
}

#[test]
fn density_is_linear_in_polarization() {
    let s = solver(&[Obstacle::new(circle(), BcKind::Neumann).unwrap()], 32);
    let a = s.solve_density(1.0, E1).unwrap();
    let b = s.solve_density(1.0, E2).unwrap();
    let c = s.solve_density(1.0, [E1[0] + E2[0], E1[1] + E2[1]]).unwrap();
    assert!((&a + &b - &c).norm() < 1e-12 * c.norm());
}

fn dataset(obs: &[Obstacle], survey: &SurveyGeometry) -> ScatterDataSet {
    let opts = SolverOptions { points_per_wavelength: 10.0, min_nodes: 64, max_condition: 1e12 };
    synthesize_data(obs, survey, &medium(), opts).unwrap()
}

#[test]
fn data_reciprocity() {
    let survey = SurveyGeometry::new(10.0, 5, 5).unwrap();
    for bc in [BcKind::Dirichlet, BcKind::Impedance(ImpedanceProfile::Constant(1.0))] {
        let kite = make_curve(CurveKind::Kite, [0.3, 9.0], 1.0).unwrap();
        let d = dataset(&[Obstacle::new(kite, bc).unwrap()], &survey);
        let scale = d.max_abs();
        for s in 0..5 {
            for r in 0..5 {
                for q in 0..2 {
                    for c in 0..2 {
                        let e = (d.get(s, r, q, c) - d.get(r, s, c, q)).norm();
                        assert!(e < 1e-3 * scale, "{} {s} {r} {q} {c}: {e:e}", bc.name());
                    }
                }
            }
        }
    }
}

#[test]
fn data_parity() {
    let survey = SurveyGeometry::new(6.0, 3, 4).unwrap();
    let leaf = make_curve(CurveKind::Leaf { p: 4 }, [0.0, 8.0], 1.0).unwrap();
    let d = dataset(&[Obstacle::new(leaf, BcKind::Neumann).unwrap()], &survey);
    let sign = |i: usize| if i == 0 { 1.0 } else { -1.0 };
    for s in 0..3 {
        for r in 0..4 {
            for q in 0..2 {
                for c in 0..2 {
                    let m = d.get(2 - s, 3 - r, q, c) * (sign(q) * sign(c));
                    assert!((m - d.get(s, r, q, c)).norm() < 1e-8 * d.max_abs());
                }
            }
        }
    }
}

#[test]
fn impedance_approaches_dirichlet() {
    let survey = SurveyGeometry::new(8.0, 3, 3).unwrap();
    let u_d = dataset(&[Obstacle::new(circle(), BcKind::Dirichlet).unwrap()], &survey);
    let dist: Vec<f64> = [0.0, 1.0, 10.0]
        .iter()
        .map(|&eta| {
            let ob = Obstacle::new(circle(), BcKind::Impedance(ImpedanceProfile::Constant(eta))).unwrap();
            let u = dataset(&[ob], &survey);
            let n: f64 = u.values().iter().zip(u_d.values()).map(|(a, b)| (a - b).norm_sqr()).sum();
            n.sqrt()
        })
        .collect();
    assert!(dist[0] > dist[1] && dist[1] > dist[2], "{dist:?}");
}

#[test]
fn amplitude_decays_with_offset() {
    let s = solver(&[Obstacle::new(circle(), BcKind::Dirichlet).unwrap()], 40);
    let u = s.scattered(&[0.0], &[10.0, 20.0, 40.0]).unwrap();
    let amp: Vec<f64> = (0..3).map(|r| u.rows(2 * r, 2).norm()).collect();
    assert!(amp[0] > amp[1] && amp[1] > amp[2], "{amp:?}");
}

#[test]
fn no_obstacle_gives_zero_data() {
    let survey = SurveyGeometry::new(5.0, 4, 3).unwrap();
    let d = dataset(&[], &survey);
    assert_eq!(d.values().len(), 48);
    assert!(d.values().iter().all(|z| *z == C64::new(0.0, 0.0)));
}

#[test]
fn per_source_results_ignore_thread_count() {
    let s = solver(&[Obstacle::new(circle(), BcKind::Dirichlet).unwrap()], 32);
    let src = [-3.0, 0.0, 2.0, 5.0];
    let rcv = [-1.0, 1.0];
    let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
    let serial = pool.install(|| s.scattered(&src, &rcv).unwrap());
    let pool4 = rayon::ThreadPoolBuilder::new().num_threads(4).build().unwrap();
    let par = pool4.install(|| s.scattered(&src, &rcv).unwrap());
    assert_eq!(serial, par);
    let one = s.scattered(&src[2..3], &rcv).unwrap();
    let sub = serial.columns(4, 2).into_owned();
    assert!((one - &sub).norm() < 1e-10 * sub.norm());
}

#[test]
fn noise_power_matches_level() {
    let m = medium();
    let survey = SurveyGeometry::new(1.0, 125, 200).unwrap();
    let v: Vec<C64> = (0..100_000).map(|k| C64::from_polar(1.0 + (k % 7) as f64, k as f64)).collect();
    let d = ScatterDataSet::from_values(m, survey, "synthetic", v).unwrap();
    let sigma = 0.2;
    let n = add_noise(&d, sigma, 42).unwrap();
    let mean: f64 = n.values().iter().zip(d.values()).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>() / 1e5;
    let expect = (sigma * d.max_abs()).powi(2);
    assert!((mean / expect - 1.0).abs() < 0.03, "{mean} vs {expect}");
}

#[test]
fn obstacle_checks() {
    assert!(Obstacle::new(circle(), BcKind::Impedance(ImpedanceProfile::Constant(-1.0))).is_err());
    assert!(Obstacle::new(circle(), BcKind::Impedance(ImpedanceProfile::Cosine { mean: 0.5, amp: 1.0, freq: 1 })).is_err());
    let a = Obstacle::new(circle(), BcKind::Dirichlet).unwrap();
    let b = Obstacle::new(make_curve(CurveKind::Circle { radius: 1.0 }, [0.5, 10.0], 1.0).unwrap(), BcKind::Dirichlet).unwrap();
    let mesh = Mesh::with_counts(&[a.curve.clone(), b.curve.clone()], vec![16, 16]).unwrap();
    assert!(ForwardSolver::with_mesh(GreenEngine::new(&medium()), &[a, b], mesh, 1e12).is_err());
}
