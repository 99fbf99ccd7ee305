//! Batched evaluation of the spectral parts of `N` between point sets.
//!
//! Both the reflected correction `C(x, y)` and the surface tensor
//! `N((a,0), y)` factor over the quadrature nodes as products of a field-point
//! exponential and a source-point exponential, so a whole block of tensors is
//! a sum of rank-one terms.

use super::GreenEngine;
use crate::error::Result;
use crate::green::axis::NodeSet;
use crate::green::spectral::Deriv;
use crate::{Tensor2C, C64};
use rayon::prelude::*;
use std::f64::consts::PI;

const I: C64 = C64 { re: 0.0, im: 1.0 };

/// Nodes on the whole real axis with complex weights; the weights carry the
/// `1/2π`, the `1/δ` and, for the two pole entries, the bracket `±iπ/δ'`.
#[derive(Clone, Debug)]
pub struct PoleNodes {
    pub xi: Vec<f64>,
    pub c: Vec<C64>,
}

impl PoleNodes {
    pub fn new(engine: &GreenEngine, x_max: f64, d_min: f64, d_max: f64) -> Result<Self> {
        let sm = engine.spectral();
        let ns = NodeSet::new(&sm.wn, x_max, d_min, d_max, true)?;
        let mut xi = Vec::with_capacity(2 * ns.len() + 2);
        let mut c = Vec::with_capacity(2 * ns.len() + 2);
        for (&x, &w) in ns.xi.iter().zip(&ns.w) {
            for s in [x, -x] {
                xi.push(s);
                c.push(w / sm.pieces(s).delta);
            }
        }
        let kr = sm.wn.k_r;
        let f = I * PI / (2.0 * PI);
        xi.push(kr);
        c.push(f / sm.delta_prime(kr));
        xi.push(-kr);
        c.push(-f / sm.delta_prime(-kr));
        Ok(PoleNodes { xi, c })
    }

    pub fn len(&self) -> usize {
        self.xi.len()
    }

    pub fn is_empty(&self) -> bool {
        self.xi.is_empty()
    }
}

fn bounds(xs: &[[f64; 2]], ys: &[[f64; 2]]) -> (f64, f64, f64) {
    let (mut x_max, mut lo, mut hi) = (0.0f64, f64::INFINITY, 0.0f64);
    let (xl, xh) = xs.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), p| (a.min(p[0]), b.max(p[0])));
    let (yl, yh) = ys.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), p| (a.min(p[0]), b.max(p[0])));
    x_max = x_max.max((xh - yl).abs()).max((yh - xl).abs());
    let x2 = xs.iter().fold((f64::INFINITY, 0.0f64), |(a, b), p| (a.min(p[1]), b.max(p[1])));
    let y2 = ys.iter().fold((f64::INFINITY, 0.0f64), |(a, b), p| (a.min(p[1]), b.max(p[1])));
    lo = lo.min(x2.0 + y2.0);
    hi = hi.max(x2.1 + y2.1);
    (x_max, lo, hi)
}

/// `C(x_i, y_j)` and, with `grad`, its field-point derivatives. Row-major
/// `xs.len() × ys.len()`; entry `[value, ∂x₁, ∂x₂]`.
pub fn correction_block(engine: &GreenEngine, xs: &[[f64; 2]], ys: &[[f64; 2]], grad: bool) -> Result<Vec<[Tensor2C; 3]>> {
    if xs.is_empty() || ys.is_empty() {
        return Ok(Vec::new());
    }
    let (x_max, d_min, d_max) = bounds(xs, ys);
    let nodes = PoleNodes::new(engine, x_max, d_min, d_max)?;
    Ok(correction_block_with(engine, &nodes, xs, ys, grad))
}

pub fn correction_block_with(
    engine: &GreenEngine,
    nodes: &PoleNodes,
    xs: &[[f64; 2]],
    ys: &[[f64; 2]],
    grad: bool,
) -> Vec<[Tensor2C; 3]> {
    let sm = engine.spectral();
    let nj = ys.len();
    let nk = nodes.len();
    let io2 = I / (sm.omega * sm.omega);
    // v[((k*2 + α)*4 + e)*nj + j] = c_k Σ_β (i/ω²) A_αβ[e] e^{iμ_β y₂ − iξ y₁}
    let per_k: Vec<(Vec<C64>, [C64; 2])> = (0..nk)
        .into_par_iter()
        .map(|k| {
            let xi = nodes.xi[k];
            let p = sm.pieces(xi);
            let mu = [p.mu_s, p.mu_p];
            let mut v = vec![C64::new(0.0, 0.0); 8 * nj];
            for (j, y) in ys.iter().enumerate() {
                let h = C64::new(0.0, -xi * y[0]);
                let q = [(I * mu[0] * y[1] + h).exp(), (I * mu[1] * y[1] + h).exp()];
                for a in 0..2 {
                    for e in 0..4 {
                        let s = p.a[2 * a].m[e / 2][e % 2] * q[0] + p.a[2 * a + 1].m[e / 2][e % 2] * q[1];
                        v[(a * 4 + e) * nj + j] = s * io2 * nodes.c[k];
                    }
                }
            }
            (v, mu)
        })
        .collect();
    let nd = if grad { 3 } else { 1 };
    xs.par_iter()
        .flat_map_iter(|x| {
            let mut acc = vec![C64::new(0.0, 0.0); nd * 4 * nj];
            for (k, (v, mu)) in per_k.iter().enumerate() {
                let xi = nodes.xi[k];
                let h = C64::new(0.0, xi * x[0]);
                for a in 0..2 {
                    let pa = (I * mu[a] * x[1] + h).exp();
                    let mult = [pa, pa * I * xi, pa * I * mu[a]];
                    for (d, &m) in mult.iter().enumerate().take(nd) {
                        for e in 0..4 {
                            let src = &v[(a * 4 + e) * nj..(a * 4 + e + 1) * nj];
                            let dst = &mut acc[(d * 4 + e) * nj..(d * 4 + e + 1) * nj];
                            for (o, s) in dst.iter_mut().zip(src) {
                                *o += m * s;
                            }
                        }
                    }
                }
            }
            (0..nj)
                .map(|j| {
                    let mut out = [Tensor2C::zero(); 3];
                    for (d, t) in out.iter_mut().enumerate().take(nd) {
                        for e in 0..4 {
                            t.m[e / 2][e % 2] = acc[(d * 4 + e) * nj + j];
                        }
                    }
                    out
                })
                .collect::<Vec<_>>()
        })
        .collect()
}

/// `N((a_m, 0), y_j)` and, with `grad`, its source-point derivatives
/// `[value, ∂y₁, ∂y₂]`. Row-major `abscissas.len() × ys.len()`.
pub fn surface_block(engine: &GreenEngine, abscissas: &[f64], ys: &[[f64; 2]], grad: bool) -> Result<Vec<[Tensor2C; 3]>> {
    if abscissas.is_empty() || ys.is_empty() {
        return Ok(Vec::new());
    }
    let xs: Vec<[f64; 2]> = abscissas.iter().map(|&a| [a, 0.0]).collect();
    let (x_max, d_min, d_max) = bounds(&xs, ys);
    let nodes = PoleNodes::new(engine, x_max, d_min, d_max)?;
    let sm = engine.spectral();
    let nj = ys.len();
    let nd = if grad { 3 } else { 1 };
    let derivs = [Deriv::None, Deriv::D1, Deriv::D2];
    let per_k: Vec<Vec<C64>> = (0..nodes.len())
        .into_par_iter()
        .map(|k| {
            let xi = nodes.xi[k];
            let mut v = vec![C64::new(0.0, 0.0); nd * 4 * nj];
            for (j, y) in ys.iter().enumerate() {
                let ph = C64::new(0.0, -xi * y[0]).exp() * nodes.c[k];
                for (d, dv) in derivs.iter().enumerate().take(nd) {
                    let t = sm.surface_numerator(xi, y[1], *dv);
                    for e in 0..4 {
                        v[(d * 4 + e) * nj + j] = t.m[e / 2][e % 2] * ph;
                    }
                }
            }
            v
        })
        .collect();
    Ok(abscissas
        .par_iter()
        .flat_map_iter(|&a| {
            let mut acc = vec![C64::new(0.0, 0.0); nd * 4 * nj];
            for (k, v) in per_k.iter().enumerate() {
                let (s, c) = (nodes.xi[k] * a).sin_cos();
                let m = C64::new(c, s);
                for (o, s) in acc.iter_mut().zip(v) {
                    *o += m * s;
                }
            }
            (0..nj)
                .map(|j| {
                    let mut out = [Tensor2C::zero(); 3];
                    for (d, t) in out.iter_mut().enumerate().take(nd) {
                        for e in 0..4 {
                            t.m[e / 2][e % 2] = acc[(d * 4 + e) * nj + j];
                        }
                    }
                    out
                })
                .collect::<Vec<_>>()
        })
        .collect())
}
