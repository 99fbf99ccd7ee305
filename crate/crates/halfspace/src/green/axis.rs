//! Real-axis layout for horizontal Fourier inversion: segment splits at the
//! branch points and the Rayleigh pole, adaptive evaluation and fixed-node tables.

use crate::error::{Error, Result};
use crate::quadrature::{gauss_legendre, integrate_segments, Segment, SegmentMap};
use crate::{Tensor2C, ToleranceSpec, WaveNumbers, C64};
use std::f64::consts::PI;

/// Folded half-width around `±k_R`.
pub(crate) fn pole_halfwidth(wn: &WaveNumbers) -> f64 {
    wn.d_r
}

/// Segments covering `[-xi_max, xi_max]`. With `fold` the windows around `±k_R`
/// are symmetric folds centred on the pole.
pub(crate) fn layout(wn: &WaveNumbers, xi_max: f64, fold: bool) -> Vec<(f64, f64, SegmentMap)> {
    let d = pole_halfwidth(wn);
    let w = if fold { SegmentMap::Folded } else { SegmentMap::Linear };
    let lo = wn.k_r - d;
    let hi = wn.k_r + d;
    let xi_max = xi_max.max(hi + d);
    let pos = [
        (0.0, wn.k_p, SegmentMap::SqrtRight),
        (wn.k_p, wn.k_s, SegmentMap::SqrtBoth),
        (wn.k_s, lo, SegmentMap::SqrtLeft),
        (lo, hi, w),
        (hi, xi_max, SegmentMap::Linear),
    ];
    let mirror = |m: SegmentMap| match m {
        SegmentMap::SqrtLeft => SegmentMap::SqrtRight,
        SegmentMap::SqrtRight => SegmentMap::SqrtLeft,
        other => other,
    };
    let mut out: Vec<_> = pos.iter().rev().map(|&(a, b, m)| (-b, -a, mirror(m))).collect();
    out.extend(pos.iter().copied());
    out
}

/// Total variation of the complex phase `X ξ + D μ_α(ξ)` over a segment, the
/// larger of the two wave types: oscillation and decay measured in radians.
fn phase_variation(seg: &Segment<f64, 1>, x: f64, depth: f64, wn: &WaveNumbers) -> f64 {
    let tv = |k: f64| {
        let phase = |xi: f64| {
            let t = k * k - xi * xi;
            let m = if t >= 0.0 { C64::new(t.sqrt(), 0.0) } else { C64::new(0.0, (-t).sqrt()) };
            C64::new(x.abs() * xi.abs(), 0.0) + m * depth
        };
        let n = 64;
        let mut acc = 0.0;
        let mut prev = phase(seg.point(0.0).0);
        for i in 1..=n {
            let cur = phase(seg.point(i as f64 / n as f64).0);
            acc += (cur - prev).norm();
            prev = cur;
        }
        acc
    };
    let v = tv(wn.k_s).max(tv(wn.k_p));
    if seg.map == SegmentMap::Folded {
        2.0 * v
    } else {
        v
    }
}

fn vnorm<const N: usize>(v: &[C64; N]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Marches outward from the last special point until the integrand at `±ξ` is
/// negligible compared with `abs_tol` over one decay length.
fn cutoff<const N: usize, F: Fn(f64) -> [C64; N]>(wn: &WaveNumbers, depth: f64, f: &F, abs_tol: f64) -> f64 {
    let start = (wn.k_r + 2.0 * pole_halfwidth(wn)).max(wn.k_s + 10.0 / depth);
    let step = 2.0 / depth;
    let mut xi = start;
    for _ in 0..2000 {
        let m = vnorm(&f(xi)) + vnorm(&f(-xi));
        if m / depth < 1e-3 * abs_tol {
            return xi;
        }
        xi += step;
    }
    xi
}

/// `(1/2π) p.v.∫ f(ξ) dξ` plus an optional pole bracket `iπ·sign·(r(k_R) − r(−k_R))`.
/// `f` already carries the `e^{iXξ}` phase and the `1/2π`. `depth` is the
/// vertical decay length scale of the integrand.
pub(crate) fn fourier_adaptive<const N: usize, F, R>(
    wn: &WaveNumbers,
    x: f64,
    depth: f64,
    f: &F,
    bracket: Option<(&R, f64)>,
    tol: &ToleranceSpec,
    context: &str,
) -> Result<[C64; N]>
where
    F: Fn(f64) -> [C64; N],
    R: Fn(f64) -> [C64; N],
{
    if !(depth > 0.0) || !depth.is_finite() {
        return Err(Error::Domain(format!("{context}: vertical decay length must be positive")));
    }
    let xi_max = cutoff(wn, depth, f, tol.abs_tol);
    let segs: Vec<Segment<f64, N>> = layout(wn, xi_max, bracket.is_some())
        .into_iter()
        .map(|(a, b, m)| {
            let probe = Segment::<f64, 1>::new(a, b, m, 1);
            let n = (phase_variation(&probe, x, depth, wn) / PI).ceil() as usize;
            Segment::new(a, b, m, n.clamp(2, 100_000))
        })
        .collect();
    let r = integrate_segments(&segs, f, tol).map_err(|e| e.with_context(context))?;
    let mut v = r.value;
    if let Some((res, sign)) = bracket {
        let rp = res(wn.k_r);
        let rm = res(-wn.k_r);
        let c = C64::new(0.0, PI * sign);
        for k in 0..N {
            v[k] += c * (rp[k] - rm[k]);
        }
    }
    Ok(v)
}

/// Fixed quadrature nodes on `ξ > 0`; the negative half uses `-ξ` with the same
/// weights. Weights include the `1/2π` of the inverse transform.
#[derive(Clone, Debug)]
pub struct NodeSet {
    pub xi: Vec<f64>,
    pub w: Vec<f64>,
    pub x_max: f64,
    pub folded: bool,
}

const PANEL_PHASE: f64 = 3.0 * PI;
const TAIL_EXPONENT: f64 = 40.0;

impl NodeSet {
    /// Nodes accurate for offsets `|X| ≤ x_max` and vertical decay lengths in
    /// `[d_min, d_max]`.
    pub fn new(wn: &WaveNumbers, x_max: f64, d_min: f64, d_max: f64, fold: bool) -> Result<Self> {
        if !(d_min > 0.0) || d_max < d_min {
            return Err(Error::Domain("node set needs 0 < d_min <= d_max".into()));
        }
        let xi_max = wn.k_s + TAIL_EXPONENT / d_min;
        let (gx, gw) = gauss_legendre(16);
        let mut xi = Vec::new();
        let mut w = Vec::new();
        for (a, b, m) in layout(wn, xi_max, fold) {
            if b <= 0.0 {
                continue;
            }
            let seg = Segment::<f64, 1>::new(a, b, m, 1);
            let n = ((phase_variation(&seg, x_max, d_max, wn) / PANEL_PHASE).ceil() as usize).max(2);
            let h = 1.0 / n as f64;
            for p in 0..n {
                for (t, wt) in gx.iter().zip(&gw) {
                    let u = h * (p as f64 + 0.5 * (t + 1.0));
                    let (z, jac) = seg.point(u);
                    let ww = 0.5 * h * wt * jac / (2.0 * PI);
                    xi.push(z);
                    w.push(ww);
                    if m == SegmentMap::Folded {
                        let c = 0.5 * (a + b);
                        xi.push(2.0 * c - z);
                        w.push(ww);
                    }
                }
            }
        }
        Ok(NodeSet { xi, w, x_max, folded: fold })
    }

    pub fn len(&self) -> usize {
        self.xi.len()
    }

    pub fn is_empty(&self) -> bool {
        self.xi.is_empty()
    }
}

/// Precomputed weighted samples `W±_k = w_k g(±ξ_k)` so that
/// `eval(X) = Σ W+_k e^{iXξ_k} + W-_k e^{-iXξ_k}` plus the pole bracket.
#[derive(Clone, Debug)]
pub struct FourierTable<const M: usize> {
    xi: Vec<f64>,
    plus: Vec<[Tensor2C; M]>,
    minus: Vec<[Tensor2C; M]>,
    k_r: f64,
    bracket: Option<([Tensor2C; M], [Tensor2C; M], f64)>,
    x_max: f64,
}

impl<const M: usize> FourierTable<M> {
    /// `g` is the spectral amplitude without the horizontal phase; `residue`
    /// gives `numerator/δ'` at `±k_R` and the bracket sign.
    pub fn build<G, R>(nodes: &NodeSet, k_r: f64, g: G, residue: Option<(R, f64)>) -> Self
    where
        G: Fn(f64) -> [Tensor2C; M],
        R: Fn(f64) -> [Tensor2C; M],
    {
        let mut plus = Vec::with_capacity(nodes.len());
        let mut minus = Vec::with_capacity(nodes.len());
        for (&x, &w) in nodes.xi.iter().zip(&nodes.w) {
            plus.push(g(x).map(|t| t.scale_re(w)));
            minus.push(g(-x).map(|t| t.scale_re(w)));
        }
        let bracket = residue.map(|(r, s)| {
            let f = 1.0 / (2.0 * PI);
            (r(k_r).map(|t| t.scale_re(f)), r(-k_r).map(|t| t.scale_re(f)), s)
        });
        FourierTable { xi: nodes.xi.clone(), plus, minus, k_r, bracket, x_max: nodes.x_max }
    }

    pub fn x_max(&self) -> f64 {
        self.x_max
    }

    pub fn eval(&self, x: f64) -> [Tensor2C; M] {
        debug_assert!(x.abs() <= self.x_max * (1.0 + 1e-9) + 1e-9, "offset outside table range");
        let mut acc = [[C64::new(0.0, 0.0); 4]; M];
        for k in 0..self.xi.len() {
            let (s, c) = (x * self.xi[k]).sin_cos();
            let ep = C64::new(c, s);
            let em = C64::new(c, -s);
            let (p, m) = (&self.plus[k], &self.minus[k]);
            for j in 0..M {
                for (e, slot) in acc[j].iter_mut().enumerate() {
                    *slot += p[j].m[e / 2][e % 2] * ep + m[j].m[e / 2][e % 2] * em;
                }
            }
        }
        let mut out = acc.map(Tensor2C::from_array);
        if let Some((rp, rm, sign)) = &self.bracket {
            let (s, c) = (x * self.k_r).sin_cos();
            let ep = C64::new(c, s);
            let em = C64::new(c, -s);
            let ipi = C64::new(0.0, PI * sign);
            for j in 0..M {
                out[j] += (rp[j].scale(ep) - rm[j].scale(em)).scale(ipi);
            }
        }
        out
    }
}

impl<const M: usize> FourierTable<M> {
    /// `eval(x0 + i·dx)` for `i < count`, using a per-node phase rotation
    /// reseeded every `RESEED` steps.
    pub fn eval_lattice(&self, x0: f64, dx: f64, count: usize) -> Vec<[Tensor2C; M]> {
        const RESEED: usize = 32;
        let mut acc = vec![[[C64::new(0.0, 0.0); 4]; M]; count];
        for k in 0..self.xi.len() {
            let xi = self.xi[k];
            let (s, c) = (dx * xi).sin_cos();
            let rot = C64::new(c, s);
            let (p, m) = (&self.plus[k], &self.minus[k]);
            let mut ep = C64::new(1.0, 0.0);
            for (i, a) in acc.iter_mut().enumerate() {
                if i % RESEED == 0 {
                    let (s, c) = ((x0 + i as f64 * dx) * xi).sin_cos();
                    ep = C64::new(c, s);
                } else {
                    ep *= rot;
                }
                let em = ep.conj();
                for j in 0..M {
                    for (e, slot) in a[j].iter_mut().enumerate() {
                        *slot += p[j].m[e / 2][e % 2] * ep + m[j].m[e / 2][e % 2] * em;
                    }
                }
            }
        }
        acc.into_iter()
            .enumerate()
            .map(|(i, a)| {
                let mut out = a.map(Tensor2C::from_array);
                if let Some((rp, rm, sign)) = &self.bracket {
                    let x = x0 + i as f64 * dx;
                    let (s, c) = (x * self.k_r).sin_cos();
                    let ep = C64::new(c, s);
                    let ipi = C64::new(0.0, PI * sign);
                    for j in 0..M {
                        out[j] += (rp[j].scale(ep) - rm[j].scale(ep.conj())).scale(ipi);
                    }
                }
                out
            })
            .collect()
    }
}
