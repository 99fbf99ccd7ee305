//! Quadrature kernels: the branch-correct square root, adaptive
//! Gauss–Kronrod integration over mapped segments, principal values through
//! simple poles and truncated-axis integration of decaying integrands.

use crate::error::{Error, Result};
use crate::scalar::Real;
use num_complex::Complex;
use std::cmp::Ordering;
use std::collections::BinaryHeap;

const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
];
const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ToleranceSpec<T: Real> {
    pub rel_tol: T,
    pub abs_tol: T,
    pub max_panels: usize,
}

impl<T: Real> Default for ToleranceSpec<T> {
    fn default() -> Self {
        ToleranceSpec {
            rel_tol: T::lit(1e-8),
            abs_tol: T::lit(1e-12),
            max_panels: 200_000,
        }
    }
}

impl<T: Real> ToleranceSpec<T> {
    pub fn new(rel_tol: T, abs_tol: T, max_panels: usize) -> Result<Self> {
        if !(rel_tol > T::zero()) || !(abs_tol > T::zero()) || max_panels < 16 {
            return Err(Error::InvalidParameter(
                "tolerances must be positive and max_panels at least 16".into(),
            ));
        }
        Ok(ToleranceSpec {
            rel_tol,
            abs_tol,
            max_panels,
        })
    }
}

/// A simple pole `residue_factor / (ξ - location)` to be removed before integration.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PoleSpec<T: Real> {
    pub location: T,
    pub residue_factor: Complex<T>,
}

/// Square root with non-negative imaginary part. The positive real axis is
/// rejected because its side is ambiguous; use [`crate::medium::mu_alpha`] there.
pub fn branch_sqrt<T: Real>(z: Complex<T>) -> Result<Complex<T>> {
    if z.im == T::zero() && z.re > T::zero() {
        return Err(Error::Domain(format!(
            "branch_sqrt is ambiguous on the positive real axis ({})",
            z.re
        )));
    }
    Ok(branch_sqrt_raw(z))
}

pub(crate) fn branch_sqrt_raw<T: Real>(z: Complex<T>) -> Complex<T> {
    let r = z.norm();
    let half = T::lit(0.5);
    let two = T::lit(2.0);
    let sgn = if z.im < T::zero() { -T::one() } else { T::one() };
    // the larger of the two half-sums is formed directly, the other via Im z to avoid cancellation
    let (a, b) = if z.re >= T::zero() {
        let a = ((r + z.re) * half).sqrt();
        let b = if a > T::zero() { z.im.abs() / (two * a) } else { T::zero() };
        (a, b)
    } else {
        let b = ((r - z.re) * half).sqrt();
        (z.im.abs() / (two * b), b)
    };
    Complex::new(sgn * a, b)
}

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut pp = 0.0;
        for _ in 0..100 {
            let mut p1 = 1.0;
            let mut p2 = 0.0;
            for j in 0..n {
                let p3 = p2;
                p2 = p1;
                p1 = ((2 * j + 1) as f64 * z * p2 - j as f64 * p3) / (j + 1) as f64;
            }
            pp = n as f64 * (z * p1 - p2) / (z * z - 1.0);
            let dz = p1 / pp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * pp * pp);
        w[n - 1 - i] = w[i];
    }
    (x, w)
}

/// Change of variables `u ∈ [0,1] → ξ ∈ [a,b]` removing square-root endpoint behaviour.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SegmentMap {
    Linear,
    /// `ξ = a + (b-a)u²`
    SqrtLeft,
    /// `ξ = b - (b-a)(1-u)²`
    SqrtRight,
    /// `ξ = a + (b-a)(1 - cos πu)/2`
    SqrtBoth,
    /// Integrates `f(c+s) + f(c-s)` for `s ∈ [0, (b-a)/2]`, `c` the midpoint.
    /// The pole at `c` (if any) is removed in the symmetric pair.
    Folded,
}

/// A piece of the integration range. `subtract` removes `r/(ξ - ξ₀)` componentwise
/// before integration; for [`SegmentMap::Folded`] segments centred on `ξ₀` the removed
/// term integrates to zero, otherwise its log integral is added back.
#[derive(Clone, Debug)]
pub struct Segment<T: Real, const N: usize> {
    pub a: T,
    pub b: T,
    pub map: SegmentMap,
    pub initial_panels: usize,
    pub subtract: Option<(T, [Complex<T>; N])>,
}

impl<T: Real, const N: usize> Segment<T, N> {
    pub fn new(a: T, b: T, map: SegmentMap, initial_panels: usize) -> Self {
        Segment {
            a,
            b,
            map,
            initial_panels: initial_panels.max(1),
            subtract: None,
        }
    }

    /// Maps `u` to `(ξ, dξ/du)`; folded segments return the `+s` branch.
    pub fn point(&self, u: T) -> (T, T) {
        let (a, b) = (self.a, self.b);
        let l = b - a;
        let two = T::lit(2.0);
        match self.map {
            SegmentMap::Linear => (a + l * u, l),
            SegmentMap::SqrtLeft => (a + l * u * u, two * l * u),
            SegmentMap::SqrtRight => {
                let v = T::one() - u;
                (b - l * v * v, two * l * v)
            }
            SegmentMap::SqrtBoth => {
                let pi = T::PI();
                (
                    a + l * (T::one() - (pi * u).cos()) / two,
                    l * pi * (pi * u).sin() / two,
                )
            }
            SegmentMap::Folded => {
                let c = (a + b) / two;
                (c + l / two * u, l / two)
            }
        }
    }

    /// Integrand value in the `u` variable, Jacobian included.
    fn eval<F: Fn(T) -> [Complex<T>; N]>(&self, f: &F, u: T) -> [Complex<T>; N] {
        let (xi, jac) = self.point(u);
        let mut v = f(xi);
        if let SegmentMap::Folded = self.map {
            let c = (self.a + self.b) / T::lit(2.0);
            let s = xi - c;
            let w = f(c - s);
            for k in 0..N {
                v[k] = v[k] + w[k];
            }
            // the subtracted pole terms cancel exactly between ±s
        } else if let Some((x0, r)) = &self.subtract {
            let d = xi - *x0;
            for k in 0..N {
                v[k] = v[k] - r[k] / d;
            }
        }
        for z in v.iter_mut() {
            *z = *z * jac;
        }
        v
    }

    /// Analytic integral of the removed pole term over this segment.
    fn removed_part(&self) -> [Complex<T>; N] {
        let mut out = [Complex::new(T::zero(), T::zero()); N];
        if let (Some((x0, r)), false) = (&self.subtract, self.map == SegmentMap::Folded) {
            let lg = ((self.b - *x0) / (self.a - *x0)).abs().ln();
            for k in 0..N {
                out[k] = r[k] * lg;
            }
        }
        out
    }
}

#[derive(Clone, Debug)]
pub struct QuadResult<T: Real, const N: usize> {
    pub value: [Complex<T>; N],
    pub error: T,
    pub panels: usize,
}

struct Panel<T: Real, const N: usize> {
    seg: usize,
    u0: T,
    u1: T,
    value: [Complex<T>; N],
    error: T,
    id: usize,
}

impl<T: Real, const N: usize> PartialEq for Panel<T, N> {
    fn eq(&self, o: &Self) -> bool {
        self.cmp(o) == Ordering::Equal
    }
}
impl<T: Real, const N: usize> Eq for Panel<T, N> {}
impl<T: Real, const N: usize> PartialOrd for Panel<T, N> {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}
impl<T: Real, const N: usize> Ord for Panel<T, N> {
    fn cmp(&self, o: &Self) -> Ordering {
        self.error
            .partial_cmp(&o.error)
            .unwrap_or(Ordering::Equal)
            .then_with(|| o.id.cmp(&self.id))
    }
}

fn vnorm<T: Real, const N: usize>(v: &[Complex<T>; N]) -> T {
    v.iter().fold(T::zero(), |s, z| s + z.norm_sqr()).sqrt()
}

fn gk15<T: Real, const N: usize, F: Fn(T) -> [Complex<T>; N]>(
    seg: &Segment<T, N>,
    f: &F,
    u0: T,
    u1: T,
) -> ([Complex<T>; N], T) {
    let zero = Complex::new(T::zero(), T::zero());
    let c = (u0 + u1) / T::lit(2.0);
    let h = (u1 - u0) / T::lit(2.0);
    let mut k = [zero; N];
    let mut g = [zero; N];
    let fc = seg.eval(f, c);
    for j in 0..N {
        k[j] = fc[j] * T::lit(WGK[7]);
        g[j] = fc[j] * T::lit(WG[3]);
    }
    for i in 0..7 {
        let dx = h * T::lit(XGK[i]);
        let f1 = seg.eval(f, c - dx);
        let f2 = seg.eval(f, c + dx);
        for j in 0..N {
            let s = f1[j] + f2[j];
            k[j] = k[j] + s * T::lit(WGK[i]);
            if i % 2 == 1 {
                g[j] = g[j] + s * T::lit(WG[i / 2]);
            }
        }
    }
    let mut diff = [zero; N];
    for j in 0..N {
        k[j] = k[j] * h;
        g[j] = g[j] * h;
        diff[j] = k[j] - g[j];
    }
    (k, vnorm(&diff))
}

/// Globally adaptive GK(7,15) integration over a list of mapped segments.
/// Panels with the largest error estimate are bisected first; the final sum is
/// taken in positional order so results do not depend on refinement history.
pub fn integrate_segments<T, const N: usize, F>(
    segments: &[Segment<T, N>],
    f: &F,
    tol: &ToleranceSpec<T>,
) -> Result<QuadResult<T, N>>
where
    T: Real,
    F: Fn(T) -> [Complex<T>; N],
{
    let zero = Complex::new(T::zero(), T::zero());
    let mut heap = BinaryHeap::new();
    let mut next_id = 0usize;
    let mut total = [zero; N];
    let mut err = T::zero();
    for (si, seg) in segments.iter().enumerate() {
        let n = seg.initial_panels;
        for p in 0..n {
            let u0 = T::from_usize(p).unwrap() / T::from_usize(n).unwrap();
            let u1 = T::from_usize(p + 1).unwrap() / T::from_usize(n).unwrap();
            let (v, e) = gk15(seg, f, u0, u1);
            for j in 0..N {
                total[j] = total[j] + v[j];
            }
            err += e;
            heap.push(Panel {
                seg: si,
                u0,
                u1,
                value: v,
                error: e,
                id: next_id,
            });
            next_id += 1;
        }
        let extra = seg.removed_part();
        for j in 0..N {
            total[j] = total[j] + extra[j];
        }
    }
    loop {
        let target = tol.abs_tol.max(tol.rel_tol * vnorm(&total));
        if !(err > target) {
            break;
        }
        if !err.is_finite() {
            return Err(Error::Quadrature {
                context: "non-finite integrand".into(),
                estimate: f64::INFINITY,
                panels: heap.len(),
            });
        }
        if heap.len() >= tol.max_panels {
            return Err(Error::Quadrature {
                context: "panel budget exhausted".into(),
                estimate: err.as_f64(),
                panels: heap.len(),
            });
        }
        let p = heap.pop().expect("non-empty panel heap");
        let seg = &segments[p.seg];
        let mid = (p.u0 + p.u1) / T::lit(2.0);
        let (v1, e1) = gk15(seg, f, p.u0, mid);
        let (v2, e2) = gk15(seg, f, mid, p.u1);
        for j in 0..N {
            total[j] = total[j] - p.value[j] + v1[j] + v2[j];
        }
        err = err - p.error + e1 + e2;
        for (u0, u1, v, e) in [(p.u0, mid, v1, e1), (mid, p.u1, v2, e2)] {
            heap.push(Panel {
                seg: p.seg,
                u0,
                u1,
                value: v,
                error: e,
                id: next_id,
            });
            next_id += 1;
        }
    }
    // deterministic positional summation
    let mut panels: Vec<Panel<T, N>> = heap.into_vec();
    panels.sort_by(|a, b| {
        a.seg
            .cmp(&b.seg)
            .then(a.u0.partial_cmp(&b.u0).unwrap_or(Ordering::Equal))
    });
    let mut value = [zero; N];
    let mut error = T::zero();
    for p in &panels {
        for j in 0..N {
            value[j] = value[j] + p.value[j];
        }
        error += p.error;
    }
    for seg in segments {
        let extra = seg.removed_part();
        for j in 0..N {
            value[j] = value[j] + extra[j];
        }
    }
    Ok(QuadResult {
        value,
        error,
        panels: panels.len(),
    })
}

/// Plain adaptive integral of a scalar function over `[a, b]`.
pub fn integrate<T: Real, F: Fn(T) -> Complex<T>>(
    f: F,
    a: T,
    b: T,
    tol: &ToleranceSpec<T>,
) -> Result<Complex<T>> {
    let seg = [Segment::<T, 1>::new(a, b, SegmentMap::Linear, 1)];
    Ok(integrate_segments(&seg, &|x| [f(x)], tol)?.value[0])
}

/// Principal value of `∫_a^b f`. Each pole gets the widest symmetric window that
/// fits inside `(a, b)` and away from its neighbours; inside it the pole term is
/// subtracted and the symmetric pair makes its principal value vanish.
pub fn pv_integrate<T: Real, F: Fn(T) -> Complex<T>>(
    f: F,
    a: T,
    b: T,
    poles: &[PoleSpec<T>],
    tol: &ToleranceSpec<T>,
) -> Result<Complex<T>> {
    let mut ps: Vec<PoleSpec<T>> = poles.to_vec();
    ps.sort_by(|x, y| x.location.partial_cmp(&y.location).unwrap_or(Ordering::Equal));
    let sep = T::lit(10.0) * T::epsilon() * (b - a);
    for p in &ps {
        if !(p.location > a + sep && p.location < b - sep) || !p.residue_factor.norm().is_finite() {
            return Err(Error::Domain(format!(
                "pole {} must lie strictly inside ({a}, {b})",
                p.location
            )));
        }
    }
    for w in ps.windows(2) {
        if w[1].location - w[0].location <= sep {
            return Err(Error::Domain("poles are not separated".into()));
        }
    }
    let mut segs: Vec<Segment<T, 1>> = Vec::new();
    let mut cursor = a;
    for (i, p) in ps.iter().enumerate() {
        let x0 = p.location;
        let mut w = (x0 - a).min(b - x0);
        if i > 0 {
            w = w.min((x0 - ps[i - 1].location) / T::lit(2.0));
        }
        if i + 1 < ps.len() {
            w = w.min((ps[i + 1].location - x0) / T::lit(2.0));
        }
        if x0 - w > cursor {
            segs.push(Segment::new(cursor, x0 - w, SegmentMap::Linear, 1));
        }
        let mut s = Segment::new(x0 - w, x0 + w, SegmentMap::Folded, 1);
        s.subtract = Some((x0, [p.residue_factor]));
        segs.push(s);
        cursor = x0 + w;
    }
    if b > cursor {
        segs.push(Segment::new(cursor, b, SegmentMap::Linear, 1));
    }
    Ok(integrate_segments(&segs, &|x| [f(x)], tol)?.value[0])
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    Plus,
    Minus,
}

/// `p.v.∫_a^b γ(t)/(t - t₀) dt ± iπ γ(t₀)`, the boundary value from above or below.
pub fn sokhotski_limit_check<T: Real, F: Fn(T) -> Complex<T>>(
    gamma_fn: F,
    a: T,
    b: T,
    t0: T,
    side: Side,
    tol: &ToleranceSpec<T>,
) -> Result<Complex<T>> {
    let g0 = gamma_fn(t0);
    let pole = PoleSpec {
        location: t0,
        residue_factor: g0,
    };
    let pv = pv_integrate(|t| gamma_fn(t) / (t - t0), a, b, &[pole], tol)?;
    let s = match side {
        Side::Plus => T::one(),
        Side::Minus => -T::one(),
    };
    Ok(pv + Complex::new(T::zero(), s * T::PI()) * g0)
}

/// Describes a real-axis integrand bounded by `M e^{-c(|ξ| - onset)}` beyond `onset`.
#[derive(Clone, Debug)]
pub struct AxisSpec<T: Real> {
    pub onset: T,
    pub decay_rate: T,
    pub bound: T,
    /// Largest phase rate `|dφ/dξ|` of the oscillatory factors.
    pub phase_rate: T,
    pub breakpoints: Vec<T>,
}

impl<T: Real> AxisSpec<T> {
    pub fn new(onset: T, decay_rate: T, bound: T, phase_rate: T) -> Self {
        AxisSpec {
            onset,
            decay_rate,
            bound,
            phase_rate,
            breakpoints: Vec::new(),
        }
    }

    /// Truncation point `Ξ = onset + max(10, -ln(abs_tol/M))/c`.
    pub fn cutoff(&self, tol: &ToleranceSpec<T>) -> T {
        let m = self.bound.max(T::min_positive_value());
        let l = (-(tol.abs_tol / m).ln()).max(T::lit(10.0));
        self.onset + l / self.decay_rate
    }
}

/// Number of initial panels so that none exceeds a quarter oscillation.
pub fn quarter_wave_panels<T: Real>(len: T, rate: T) -> usize {
    if !(rate > T::zero()) {
        return 1;
    }
    let w = T::PI() / (T::lit(2.0) * rate);
    (len / w).ceil().as_f64().clamp(1.0, 1e7) as usize
}

/// Integrates over `[-Ξ, Ξ]` with the cutoff of [`AxisSpec::cutoff`].
pub fn truncated_axis_integrate<T: Real, F: Fn(T) -> Complex<T>>(
    f: F,
    spec: &AxisSpec<T>,
    tol: &ToleranceSpec<T>,
) -> Result<Complex<T>> {
    if !(spec.decay_rate > T::zero()) {
        return Err(Error::InvalidParameter("decay rate must be positive".into()));
    }
    let xi_max = spec.cutoff(tol);
    let mut cuts = vec![-xi_max];
    let mut bp: Vec<T> = spec
        .breakpoints
        .iter()
        .copied()
        .filter(|x| x.abs() < xi_max)
        .collect();
    bp.sort_by(|x, y| x.partial_cmp(y).unwrap_or(Ordering::Equal));
    cuts.extend(bp);
    cuts.push(xi_max);
    let segs: Vec<Segment<T, 1>> = cuts
        .windows(2)
        .filter(|w| w[1] > w[0])
        .map(|w| {
            let n = quarter_wave_panels(w[1] - w[0], spec.phase_rate);
            Segment::new(w[0], w[1], SegmentMap::Linear, n)
        })
        .collect();
    Ok(integrate_segments(&segs, &|x| [f(x)], tol)?.value[0])
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;
    use std::f64::consts::PI;

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    #[test]
    fn branch_sqrt_examples() {
        let r = branch_sqrt(Complex64::new(-4.0, 0.0)).unwrap();
        assert!((r - Complex64::new(0.0, 2.0)).norm() < 1e-15);
        let r = branch_sqrt(Complex64::new(3.0, 4.0)).unwrap();
        assert!((r - Complex64::new(2.0, 1.0)).norm() < 1e-15);
        let r = branch_sqrt(Complex64::new(3.0, -4.0)).unwrap();
        assert!((r - Complex64::new(-2.0, 1.0)).norm() < 1e-15);
        assert!(branch_sqrt(Complex64::new(2.0, 0.0)).is_err());
    }

    #[test]
    fn gauss_legendre_exact_for_polynomials() {
        let (x, w) = gauss_legendre(16);
        let s: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(30)).sum();
        assert!((s - 2.0 / 31.0).abs() < 1e-14);
        assert!((w.iter().sum::<f64>() - 2.0).abs() < 1e-14);
    }

    #[test]
    fn pv_examples() {
        let tol = ToleranceSpec::default();
        let odd = pv_integrate(
            |t: f64| c(1.0 / t),
            -1.0,
            1.0,
            &[PoleSpec { location: 0.0, residue_factor: c(1.0) }],
            &tol,
        )
        .unwrap();
        assert!(odd.norm() < 1e-12);
        let reg = pv_integrate(
            |t: f64| c(t / (t - 0.0)),
            -1.0,
            1.0,
            &[PoleSpec { location: 0.0, residue_factor: c(0.0) }],
            &tol,
        )
        .unwrap();
        assert!((reg - 2.0).norm() < 1e-12);
        let shifted = pv_integrate(
            |t: f64| c(1.0 / (t - 0.3)),
            -1.0,
            1.0,
            &[PoleSpec { location: 0.3, residue_factor: c(1.0) }],
            &tol,
        )
        .unwrap();
        assert!((shifted.re - (0.7f64 / 1.3).ln()).abs() < 1e-10);
    }

    #[test]
    fn pv_rejects_bad_poles() {
        let tol = ToleranceSpec::default();
        let p = PoleSpec { location: 1.0, residue_factor: c(1.0) };
        assert!(pv_integrate(|t: f64| c(t), -1.0, 1.0, &[p], &tol).is_err());
    }

    #[test]
    fn pv_with_two_poles_and_smooth_part() {
        // p.v.∫_{-2}^{3} e^t/(t-a)(t-b) with a = -0.5, b = 1.25, against a
        // fine midpoint oracle on the subtracted integrand.
        let (a, b) = (-0.5f64, 1.25f64);
        let f = |t: f64| c(t.exp() / ((t - a) * (t - b)));
        let ra = a.exp() / (a - b);
        let rb = b.exp() / (b - a);
        let tol = ToleranceSpec::default();
        let got = pv_integrate(
            f,
            -2.0,
            3.0,
            &[
                PoleSpec { location: a, residue_factor: c(ra) },
                PoleSpec { location: b, residue_factor: c(rb) },
            ],
            &tol,
        )
        .unwrap();
        let n = 2_000_000;
        let h = 5.0 / n as f64;
        let mut s = 0.0;
        for i in 0..n {
            let t = -2.0 + (i as f64 + 0.5) * h;
            s += t.exp() / ((t - a) * (t - b)) - ra / (t - a) - rb / (t - b);
        }
        s *= h;
        s += ra * ((3.0 - a) / (a + 2.0)).abs().ln() + rb * ((3.0 - b) / (b + 2.0)).abs().ln();
        assert!((got.re - s).abs() < 1e-7, "{} vs {}", got.re, s);
    }

    #[test]
    fn sokhotski_examples() {
        let tol = ToleranceSpec::default();
        let p = sokhotski_limit_check(|_t: f64| c(1.0), -1.0, 1.0, 0.0, Side::Plus, &tol).unwrap();
        assert!((p - Complex64::new(0.0, PI)).norm() < 1e-10);
        let m = sokhotski_limit_check(|_t: f64| c(1.0), -1.0, 1.0, 0.0, Side::Minus, &tol).unwrap();
        assert!((m - Complex64::new(0.0, -PI)).norm() < 1e-10);
        for side in [Side::Plus, Side::Minus] {
            let v = sokhotski_limit_check(|t: f64| c(t), -1.0, 1.0, 0.0, side, &tol).unwrap();
            assert!((v - 2.0).norm() < 1e-10);
        }
    }

    #[test]
    fn sokhotski_matches_small_damping() {
        // ∫ γ(t)/(t - t0 - iε) → p.v. + iπγ(t0) as ε → 0⁺
        let tol = ToleranceSpec { rel_tol: 1e-12, abs_tol: 1e-14, max_panels: 100_000 };
        let g = |t: f64| c((2.0 * t).cos() + t * t);
        let t0 = 0.2;
        let lim = sokhotski_limit_check(g, -1.0, 1.0, t0, Side::Plus, &tol).unwrap();
        let eps = 1e-5;
        let damped = integrate(|t: f64| g(t) / Complex64::new(t - t0, -eps), -1.0, 1.0, &tol).unwrap();
        assert!((damped - lim).norm() < 1e-4);
    }

    #[test]
    fn truncated_examples() {
        let tol = ToleranceSpec::default();
        let s = AxisSpec::new(0.0, 1.0, 1.0, 0.0);
        let v = truncated_axis_integrate(|x: f64| c((-x.abs()).exp()), &s, &tol).unwrap();
        let xi = s.cutoff(&tol);
        assert!((v.re - 2.0 * (1.0 - (-xi).exp())).abs() < 1e-10);
        let mut g = AxisSpec::new(0.0, 1.0, 1.0, 0.0);
        g.breakpoints.push(0.0);
        let v = truncated_axis_integrate(|x: f64| c((-x * x).exp()), &g, &tol).unwrap();
        assert!((v.re - PI.sqrt()).abs() < 1e-8 * PI.sqrt());
        let mut l = AxisSpec::new(0.0, 1.0, 1.0, 10.0);
        l.breakpoints.push(0.0);
        let v = truncated_axis_integrate(|x: f64| c((10.0 * x).cos() * (-x.abs()).exp()), &l, &tol)
            .unwrap();
        assert!((v.re - 2.0 / 101.0).abs() < 1e-9);
        let bad = AxisSpec::new(0.0, 0.0, 1.0, 0.0);
        assert!(truncated_axis_integrate(|_x: f64| c(1.0), &bad, &tol).is_err());
    }

    #[test]
    fn sqrt_maps_handle_endpoint_singularities() {
        let tol = ToleranceSpec { rel_tol: 1e-12, abs_tol: 1e-15, max_panels: 1000 };
        // ∫_0^1 1/√x = 2, ∫_0^1 √(1-x) = 2/3, ∫_0^1 1/√(x(1-x)) = π
        let s = [Segment::<f64, 1>::new(0.0, 1.0, SegmentMap::SqrtLeft, 1)];
        let r = integrate_segments(&s, &|x: f64| [c(1.0 / x.sqrt())], &tol).unwrap();
        assert!((r.value[0].re - 2.0).abs() < 1e-12 && r.panels < 10);
        let s = [Segment::<f64, 1>::new(0.0, 1.0, SegmentMap::SqrtRight, 1)];
        let r = integrate_segments(&s, &|x: f64| [c((1.0 - x).sqrt())], &tol).unwrap();
        assert!((r.value[0].re - 2.0 / 3.0).abs() < 1e-12);
        let s = [Segment::<f64, 1>::new(0.0, 1.0, SegmentMap::SqrtBoth, 1)];
        let r = integrate_segments(&s, &|x: f64| [c(1.0 / (x * (1.0 - x)).sqrt())], &tol).unwrap();
        assert!((r.value[0].re - PI).abs() < 1e-11);
    }

    #[test]
    fn budget_failure_reports_estimate() {
        let tol = ToleranceSpec { rel_tol: 1e-14, abs_tol: 1e-16, max_panels: 16 };
        let r = integrate(|x: f64| c((1.0 / (x + 1e-9)).sin()), 0.0, 1.0, &tol);
        match r {
            Err(Error::Quadrature { estimate, .. }) => assert!(estimate > 0.0),
            other => panic!("expected failure, got {other:?}"),
        }
    }

    #[test]
    fn single_precision_integration() {
        let tol = ToleranceSpec::<f32> { rel_tol: 1e-5, abs_tol: 1e-7, max_panels: 1000 };
        let v = integrate(|x: f32| Complex::new(x.exp(), 0.0), 0.0, 1.0, &tol).unwrap();
        assert!((v.re - (std::f32::consts::E - 1.0)).abs() < 1e-5);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(1000))]
            #[test]
            fn branch_sqrt_squares_back(re in -1e3f64..1e3, im in -1e3f64..1e3) {
                prop_assume!(!(im == 0.0 && re > 0.0));
                let z = Complex64::new(re, im);
                let r = branch_sqrt(z).unwrap();
                prop_assert!((r * r - z).norm() <= 1e-14 * z.norm().max(1e-300) * 4.0);
                prop_assert!(r.im >= -1e-16);
            }
        }

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(32))]
            #[test]
            fn symmetric_pv_matches_plain(a0 in 0.1f64..2.0, w in 0.2f64..1.0) {
                // even regular part g(t) = cos(a0 t) on a window symmetric about 0:
                // p.v.∫ g/t = 0 and the regularised form integrates g(t)/t - g(0)/t
                let tol = ToleranceSpec::default();
                let g = move |t: f64| c((a0 * t).cos());
                let pv = pv_integrate(move |t| g(t) / t, -w, w,
                    &[PoleSpec { location: 0.0, residue_factor: g(0.0) }], &tol).unwrap();
                let reg = move |t: f64| c(((a0 * t).cos() - 1.0) / t);
                let plain = integrate(reg, -w, 0.0, &tol).unwrap() + integrate(reg, 0.0, w, &tol).unwrap();
                prop_assert!((pv - plain).norm() <= 1e-12);
            }

            #[test]
            fn tighter_tolerance_never_worse(k in 1.0f64..40.0) {
                let f = move |x: f64| [c((k * x).sin() * (-x).exp())];
                let s = [Segment::<f64, 1>::new(0.0, 3.0, SegmentMap::Linear, 1)];
                let mut prev = f64::INFINITY;
                for rt in [1e-4, 5e-5, 2.5e-5, 1.25e-5, 6e-6] {
                    let tol = ToleranceSpec { rel_tol: rt, abs_tol: 1e-300, max_panels: 10_000 };
                    let r = integrate_segments(&s, &f, &tol).unwrap();
                    prop_assert!(r.error <= prev * (1.0 + 1e-12));
                    prev = r.error;
                }
            }
        }
    }
}
