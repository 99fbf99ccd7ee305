//! Nyström discretization of the single-layer operator `S` and its traction
//! `K'` on closed curves, with `N = G + [−G(·, y') + C]` split so that only the
//! closed-form full-space part carries the log and Cauchy singularities.

use super::curve::{BoundaryCurve, CurvePoint};
use crate::error::{Error, Result};
use crate::green::separable::{correction_block, correction_block_with, PoleNodes};
use crate::green::{traction_tensor, GreenEngine};
use crate::{Tensor2C, C64};
use nalgebra::DMatrix;
use rayon::prelude::*;
use std::f64::consts::PI;

/// Quadrature nodes `t_j = jπ/n`, `j < 2n`, on each of a list of curves.
#[derive(Clone, Debug)]
pub struct Mesh {
    curves: Vec<BoundaryCurve>,
    n_half: Vec<usize>,
    offset: Vec<usize>,
    t: Vec<f64>,
    pts: Vec<CurvePoint>,
    curve_of: Vec<usize>,
}

impl Mesh {
    /// At least `ppw` nodes per shear wavelength and `min_nodes` per curve.
    pub fn new(curves: &[BoundaryCurve], k_s: f64, ppw: f64, min_nodes: usize) -> Result<Self> {
        if !(ppw > 0.0) {
            return Err(Error::InvalidParameter("points per wavelength must be positive".into()));
        }
        let lambda_s = 2.0 * PI / k_s;
        let counts = curves
            .iter()
            .map(|c| {
                let need = (ppw * c.length() / lambda_s).ceil() as usize;
                need.max(min_nodes).div_ceil(2)
            })
            .collect();
        Self::with_counts(curves, counts)
    }

    /// `n_half[c]` is `n` for curve `c` (it receives `2n` nodes).
    pub fn with_counts(curves: &[BoundaryCurve], n_half: Vec<usize>) -> Result<Self> {
        if curves.len() != n_half.len() {
            return Err(Error::GeometryMismatch("one node count per curve".into()));
        }
        if n_half.iter().any(|&n| n < 4) {
            return Err(Error::InvalidParameter("at least 8 nodes per curve".into()));
        }
        let mut offset = Vec::new();
        let mut t = Vec::new();
        let mut pts = Vec::new();
        let mut curve_of = Vec::new();
        for (c, (curve, &n)) in curves.iter().zip(&n_half).enumerate() {
            offset.push(t.len());
            for j in 0..2 * n {
                let tj = j as f64 * PI / n as f64;
                t.push(tj);
                pts.push(curve.eval(tj));
                curve_of.push(c);
            }
        }
        Ok(Mesh { curves: curves.to_vec(), n_half, offset, t, pts, curve_of })
    }

    pub fn len(&self) -> usize {
        self.t.len()
    }

    pub fn is_empty(&self) -> bool {
        self.t.is_empty()
    }

    pub fn curves(&self) -> &[BoundaryCurve] {
        &self.curves
    }

    pub fn n_half(&self, curve: usize) -> usize {
        self.n_half[curve]
    }

    pub fn curve_of(&self, i: usize) -> usize {
        self.curve_of[i]
    }

    pub fn point(&self, i: usize) -> &CurvePoint {
        &self.pts[i]
    }

    pub fn param(&self, i: usize) -> f64 {
        self.t[i]
    }

    pub fn positions(&self) -> Vec<[f64; 2]> {
        self.pts.iter().map(|p| p.x).collect()
    }

    /// Trapezoid weight times arc element, `(π/n)|z'(t_j)|`.
    pub fn weight(&self, j: usize) -> f64 {
        PI / self.n_half[self.curve_of[j]] as f64 * self.pts[j].speed()
    }

    fn local(&self, i: usize) -> usize {
        i - self.offset[self.curve_of[i]]
    }
}

/// `R(s) = −(2π/n) Σ_{m<n} cos(ms)/m − (π/n²) cos(ns)`: weights of the
/// periodic rule for `∫ ln(4 sin²((t−τ)/2)) f(τ) dτ`.
pub fn log_weight(n: usize, s: f64) -> f64 {
    let nf = n as f64;
    let sum: f64 = (1..n).map(|m| (m as f64 * s).cos() / m as f64).sum();
    -2.0 * PI / nf * sum - PI / (nf * nf) * (nf * s).cos()
}

/// `(1/2n)[2 Σ_{m<n} sin(ms) + sin(ns)]`: weights of the rule for
/// `(1/2π) p.v.∫ cot((t−τ)/2) f(τ) dτ`.
pub fn hilbert_weight(n: usize, s: f64) -> f64 {
    let nf = n as f64;
    let sum: f64 = (1..n).map(|m| (m as f64 * s).sin()).sum();
    (2.0 * sum + (nf * s).sin()) / (2.0 * nf)
}

fn e_rot() -> Tensor2C {
    Tensor2C::from_real(0.0, 1.0, -1.0, 0.0)
}

/// Dense operators on a mesh; block `(i, j)` occupies rows `2i..2i+2`, columns `2j..2j+2`.
pub struct Operators {
    pub single_layer: Option<DMatrix<C64>>,
    pub traction: Option<DMatrix<C64>>,
}

struct Constants {
    a0: C64,
    la0: f64,
    b0: f64,
    mu: f64,
    m: f64,
}

fn constants(engine: &GreenEngine) -> Constants {
    let (a0, la0, b0) = engine.fullspace().diagonal_constants();
    let med = engine.medium();
    Constants { a0, la0, b0, mu: med.mu(), m: med.p_modulus() }
}

/// Self term of the traction kernel after removing the Cauchy and log parts.
fn traction_diagonal(c: &Constants, p: &CurvePoint) -> Tensor2C {
    let sp = p.speed();
    let zz = p.d1[0] * p.d2[0] + p.d1[1] * p.d2[1];
    let nz = (p.d1[1] * p.d2[0] - p.d1[0] * p.d2[1]) / sp;
    let tau = p.tangent();
    let rot = e_rot().scale_re(c.mu / (2.0 * PI * c.m) * (-zz / (2.0 * sp * sp)));
    let sym = (Tensor2C::identity().scale_re(c.mu / (4.0 * PI * c.m))
        + Tensor2C::outer_re(tau).scale_re((1.0 - c.mu / c.m) / (2.0 * PI)))
    .scale_re(nz / sp);
    rot + sym
}

fn single_layer_diagonal(c: &Constants, p: &CurvePoint) -> Tensor2C {
    let sp = p.speed();
    (Tensor2C::identity().scale(c.a0 + c.la0 * sp.ln()) + Tensor2C::outer_re(p.tangent()).scale_re(c.b0)).scale_re(sp)
}

/// Assembles `S` and/or `K'` (traction with the outward normal at the row point).
pub fn assemble(engine: &GreenEngine, mesh: &Mesh, want_s: bool, want_k: bool) -> Result<Operators> {
    let n = mesh.len();
    let pos = mesh.positions();
    let corr = correction_block(engine, &pos, &pos, want_k)?;
    let fs = *engine.fullspace();
    let med = *engine.medium();
    let cst = constants(engine);
    let per_curve: Vec<(Vec<f64>, Vec<f64>)> = (0..mesh.curves.len())
        .map(|c| {
            let nh = mesh.n_half[c];
            let s = |d: usize| d as f64 * PI / nh as f64;
            ((0..2 * nh).map(|d| log_weight(nh, s(d))).collect(), (0..2 * nh).map(|d| hilbert_weight(nh, s(d))).collect())
        })
        .collect();
    let rows: Vec<(Vec<Tensor2C>, Vec<Tensor2C>)> = (0..n)
        .into_par_iter()
        .map(|i| {
            let pi = &mesh.pts[i];
            let x = pi.x;
            let nu = pi.normal();
            let mut srow = Vec::with_capacity(if want_s { n } else { 0 });
            let mut krow = Vec::with_capacity(if want_k { n } else { 0 });
            for j in 0..n {
                let pj = &mesh.pts[j];
                let y = pj.x;
                let yi = [y[0], -y[1]];
                let sp = pj.speed();
                let cj = mesh.curve_of[j];
                let nh = mesh.n_half[cj];
                let w = PI / nh as f64;
                let same = mesh.curve_of[i] == cj;
                let cb = &corr[i * n + j];
                let smooth = cb[0] - fs.green(x, yi);
                let d = (mesh.local(i) + 2 * nh - mesh.local(j)) % (2 * nh);
                let (rw, hw) = (&per_curve[cj].0, &per_curve[cj].1);
                let lg = if same && i != j {
                    (4.0 * (0.5 * (mesh.t[i] - mesh.t[j])).sin().powi(2)).ln()
                } else {
                    0.0
                };
                if want_s {
                    let e = if !same {
                        (fs.green(x, y) + smooth).scale_re(w * sp)
                    } else if i != j {
                        let (g, lgt) = fs.green_split(x, y);
                        let m1 = lgt.scale_re(0.5 * sp);
                        let m2 = (g + smooth).scale_re(sp) - m1.scale_re(lg);
                        m1.scale_re(rw[d]) + m2.scale_re(w)
                    } else {
                        let m1 = Tensor2C::identity().scale_re(0.5 * cst.la0 * sp);
                        let m2 = single_layer_diagonal(&cst, pj) + smooth.scale_re(sp);
                        m1.scale_re(rw[0]) + m2.scale_re(w)
                    };
                    srow.push(e);
                }
                if want_k {
                    let gi = fs.gradient(x, yi);
                    let tsm = traction_tensor(&med, &[cb[1] - gi[0], cb[2] - gi[1]], nu);
                    let e = if !same {
                        (fs.traction(x, y, nu) + tsm).scale_re(w * sp)
                    } else if i != j {
                        let (t, lt) = fs.traction_split(x, y, nu);
                        let kf = (t + tsm).scale_re(sp);
                        let k1 = lt.scale_re(0.5 * sp);
                        let cot = 1.0 / (0.5 * (mesh.t[i] - mesh.t[j])).tan();
                        let cq = e_rot().scale_re(cst.mu / (4.0 * PI * cst.m) * cot);
                        let k2 = kf - cq - k1.scale_re(lg);
                        e_rot().scale_re(cst.mu / (2.0 * cst.m) * hw[d]) + k1.scale_re(rw[d]) + k2.scale_re(w)
                    } else {
                        (traction_diagonal(&cst, pj) + tsm.scale_re(sp)).scale_re(w)
                    };
                    krow.push(e);
                }
            }
            (srow, krow)
        })
        .collect();
    let build = |pick: &dyn Fn(&(Vec<Tensor2C>, Vec<Tensor2C>)) -> &Vec<Tensor2C>| {
        let mut m = DMatrix::<C64>::zeros(2 * n, 2 * n);
        for (i, r) in rows.iter().enumerate() {
            for (j, t) in pick(r).iter().enumerate() {
                for a in 0..2 {
                    for b in 0..2 {
                        m[(2 * i + a, 2 * j + b)] = t.m[a][b];
                    }
                }
            }
        }
        m
    };
    Ok(Operators {
        single_layer: want_s.then(|| build(&|r| &r.0)),
        traction: want_k.then(|| build(&|r| &r.1)),
    })
}

/// `(Sφ)(x(t))` at parameters `ts` of curve `c`, off the collocation nodes.
pub fn single_layer_at(engine: &GreenEngine, mesh: &Mesh, curve: usize, ts: &[f64], phi: &[C64]) -> Result<Vec<[C64; 2]>> {
    let n = mesh.len();
    if phi.len() != 2 * n {
        return Err(Error::GeometryMismatch("density length".into()));
    }
    let pts: Vec<CurvePoint> = ts.iter().map(|&t| mesh.curves[curve].eval(t)).collect();
    let xs: Vec<[f64; 2]> = pts.iter().map(|p| p.x).collect();
    let ys = mesh.positions();
    let mut all: Vec<[f64; 2]> = xs.clone();
    all.extend(ys.iter().copied());
    let (x_max, d_min, d_max) = {
        let lo = all.iter().map(|p| p[0]).fold(f64::INFINITY, f64::min);
        let hi = all.iter().map(|p| p[0]).fold(f64::NEG_INFINITY, f64::max);
        let dl = all.iter().map(|p| p[1]).fold(f64::INFINITY, f64::min);
        let dh = all.iter().map(|p| p[1]).fold(0.0, f64::max);
        (hi - lo, 2.0 * dl, 2.0 * dh)
    };
    let nodes = PoleNodes::new(engine, x_max, d_min, d_max)?;
    let corr = correction_block_with(engine, &nodes, &xs, &ys, false);
    let fs = engine.fullspace();
    Ok(ts
        .par_iter()
        .enumerate()
        .map(|(i, &t)| {
            let x = xs[i];
            let mut acc = [C64::new(0.0, 0.0); 2];
            for j in 0..n {
                let pj = &mesh.pts[j];
                let y = pj.x;
                let sp = pj.speed();
                let cj = mesh.curve_of[j];
                let nh = mesh.n_half[cj];
                let w = PI / nh as f64;
                let smooth = corr[i * n + j][0] - fs.green(x, [y[0], -y[1]]);
                let e = if cj != curve {
                    (fs.green(x, y) + smooth).scale_re(w * sp)
                } else {
                    let s = t - mesh.t[j];
                    let (g, lgt) = fs.green_split(x, y);
                    let m1 = lgt.scale_re(0.5 * sp);
                    let lg = (4.0 * (0.5 * s).sin().powi(2)).ln();
                    let m2 = (g + smooth).scale_re(sp) - m1.scale_re(lg);
                    m1.scale_re(log_weight(nh, s)) + m2.scale_re(w)
                };
                let v = e.mul_vec([phi[2 * j], phi[2 * j + 1]]);
                acc[0] += v[0];
                acc[1] += v[1];
            }
            acc
        })
        .collect())
}
