//! Point spread functions: the finite-aperture `J_d`, its infinite-aperture
//! limit `J` in spectral form, and the propagating core `F`.

use crate::error::{Error, Result};
use crate::green::axis::fourier_adaptive;
use crate::green::{FourierTable, GreenEngine, SpectralMedium};
use crate::imaging::{check_window, GridSpec};
use crate::quadrature::{gauss_legendre, integrate_segments, Segment, SegmentMap};
use crate::{ElasticMedium, Tensor2C, C64};
use rayon::prelude::*;
use std::f64::consts::PI;

const I: C64 = C64 { re: 0.0, im: 1.0 };

fn to4(t: Tensor2C) -> [C64; 4] {
    t.to_array()
}

fn check_upper(p: [f64; 2], name: &str) -> Result<()> {
    if !(p[1] > 0.0) || !p[0].is_finite() || !p[1].is_finite() {
        return Err(Error::Domain(format!("{name} must lie in the upper half plane")));
    }
    Ok(())
}

/// `T_α(ξ)ᵀ conj(N_β(ξ))` for the four `(α, β)` pairs, ordered `pp, ps, sp, ss`,
/// with the exponents `μ_α` and `conj(μ_β)`.
fn products(sm: &SpectralMedium, xi: f64) -> ([Tensor2C; 4], [(C64, C64); 4], C64) {
    let p = sm.pieces(xi);
    let t = [p.t_p, p.t_s];
    let n = [p.n_p.conj(), p.n_s.conj()];
    let mu = [p.mu_p, p.mu_s];
    let mut prod = [Tensor2C::zero(); 4];
    let mut ex = [(C64::new(0.0, 0.0), C64::new(0.0, 0.0)); 4];
    for a in 0..2 {
        for b in 0..2 {
            prod[2 * a + b] = t[a].transpose().matmul(&n[b]);
            ex[2 * a + b] = (mu[a], mu[b].conj());
        }
    }
    (prod, ex, p.delta)
}

/// `F(z, y)`: the `p`-`p` product over `(−k_p, k_p)` plus the `s`-`s` product
/// over `(−k_s, k_s)`, both divided by `conj δ`.
pub fn psf_f(engine: &GreenEngine, z: [f64; 2], y: [f64; 2]) -> Result<Tensor2C> {
    check_upper(z, "z")?;
    check_upper(y, "y")?;
    let sm = *engine.spectral();
    let wn = sm.wn;
    let xx = y[0] - z[0];
    let dz = z[1] - y[1];
    let f = |xi: f64| {
        let (prod, ex, delta) = products(&sm, xi);
        let h = C64::new(0.0, xx * xi).exp() / (2.0 * PI * delta.conj());
        let mut acc = prod[3].scale((I * ex[3].0 * dz).exp() * h);
        if xi.abs() < wn.k_p {
            acc += prod[0].scale((I * ex[0].0 * dz).exp() * h);
        }
        to4(acc)
    };
    let rate = 2.0 * wn.k_s * xx.abs() + wn.k_s * dz.abs();
    let seg = |a: f64, b: f64| {
        let n = ((b - a) * rate / (wn.k_s * PI)).ceil() as usize + 1;
        Segment::new(a, b, SegmentMap::SqrtBoth, n)
    };
    let segs = [seg(-wn.k_s, -wn.k_p), seg(-wn.k_p, wn.k_p), seg(wn.k_p, wn.k_s)];
    let r = integrate_segments(&segs, &f, engine.tolerance()).map_err(|e| e.with_context("psf_f"))?;
    Ok(Tensor2C::from_array(r.value))
}

fn j_integrand(sm: &SpectralMedium, xi: f64, z: [f64; 2], y: [f64; 2], denom: C64) -> [C64; 4] {
    let (prod, ex, _) = products(sm, xi);
    let h = C64::new(0.0, (y[0] - z[0]) * xi).exp() / (2.0 * PI * denom.conj());
    let mut acc = Tensor2C::zero();
    for k in 0..4 {
        acc += prod[k].scale((I * (ex[k].0 * z[1] - ex[k].1 * y[1])).exp() * h);
    }
    to4(acc)
}

/// `J(z, y)`: principal-value spectral integral plus `−(i/2)[…/conj δ']` at `±k_R`.
pub fn psf_j(engine: &GreenEngine, z: [f64; 2], y: [f64; 2]) -> Result<Tensor2C> {
    check_upper(z, "z")?;
    check_upper(y, "y")?;
    let sm = *engine.spectral();
    let f = |xi: f64| j_integrand(&sm, xi, z, y, sm.pieces(xi).delta);
    let r = |xi: f64| j_integrand(&sm, xi, z, y, sm.delta_prime(xi));
    let v = fourier_adaptive(&sm.wn, y[0] - z[0], z[1] + y[1], &f, Some((&r, -1.0)), engine.tolerance(), "psf_j")?;
    Ok(Tensor2C::from_array(v))
}

/// The pole bracket of `J` alone.
pub fn psf_j_bracket(engine: &GreenEngine, z: [f64; 2], y: [f64; 2]) -> Tensor2C {
    let sm = *engine.spectral();
    let r = |xi: f64| Tensor2C::from_array(j_integrand(&sm, xi, z, y, sm.delta_prime(xi)));
    (r(sm.wn.k_r) - r(-sm.wn.k_r)).scale(-I * PI)
}

fn aperture_panels(engine: &GreenEngine, d: f64) -> usize {
    // the product oscillates at up to 2k_s; one panel per half shear wavelength
    let k_s = engine.wavenumbers().k_s;
    ((2.0 * d * k_s / PI).ceil() as usize).max(1)
}

/// `J_d(z, y) = ∫_{−d}^{d} T_D(x, z)ᵀ conj N(x, y) dx`, adaptive over fixed-node tables.
pub fn psf_jd(engine: &GreenEngine, z: [f64; 2], y: [f64; 2], d: f64) -> Result<Tensor2C> {
    check_upper(z, "z")?;
    check_upper(y, "y")?;
    if !(d > 0.0) || !d.is_finite() {
        return Err(Error::InvalidParameter(format!("aperture {d}")));
    }
    let td = engine.dirichlet_traction_table(d + z[0].abs(), z[1])?;
    let nt = engine.surface_table(d + y[0].abs(), y[1])?;
    let f = |x: f64| {
        let t = td.eval(x - z[0])[0];
        let n = nt.eval(x - y[0])[0];
        to4(t.transpose().matmul(&n.conj()))
    };
    let segs = [Segment::new(-d, d, SegmentMap::Linear, aperture_panels(engine, d))];
    let r = integrate_segments(&segs, &f, engine.tolerance()).map_err(|e| e.with_context("psf_jd"))?;
    Ok(Tensor2C::from_array(r.value))
}

/// Fixed composite Gauss rule over `[−d, d]` with `conj N(x, y)` stored at the
/// nodes, for sweeping `J_d(·, y)` over a grid.
pub struct JdSweep {
    x: Vec<f64>,
    w: Vec<f64>,
    n_conj: Vec<Tensor2C>,
    d: f64,
}

impl JdSweep {
    pub fn new(engine: &GreenEngine, y: [f64; 2], d: f64) -> Result<Self> {
        check_upper(y, "y")?;
        if !(d > 0.0) {
            return Err(Error::InvalidParameter(format!("aperture {d}")));
        }
        let panels = aperture_panels(engine, d);
        let (gx, gw) = gauss_legendre(16);
        let h = 2.0 * d / panels as f64;
        let mut x = Vec::with_capacity(16 * panels);
        let mut w = Vec::with_capacity(16 * panels);
        for p in 0..panels {
            for (t, wt) in gx.iter().zip(&gw) {
                x.push(-d + h * (p as f64 + 0.5 * (t + 1.0)));
                w.push(0.5 * h * wt);
            }
        }
        let nt = engine.surface_table(d + y[0].abs(), y[1])?;
        let n_conj = x.par_iter().map(|&xk| nt.eval(xk - y[0])[0].conj()).collect();
        Ok(JdSweep { x, w, n_conj, d })
    }

    /// `J_d` at `(z1_0 + i·dz1, z2)` for `i < count`.
    pub fn row(&self, engine: &GreenEngine, z1_0: f64, dz1: f64, count: usize, z2: f64) -> Result<Vec<Tensor2C>> {
        let z1_max = z1_0.abs().max((z1_0 + dz1 * count.saturating_sub(1) as f64).abs());
        let td: FourierTable<1> = engine.dirichlet_traction_table(self.d + z1_max, z2)?;
        let parts: Vec<Vec<Tensor2C>> = (0..self.x.len())
            .into_par_iter()
            .with_min_len(64)
            .map(|k| {
                let t = td.eval_lattice(self.x[k] - z1_0, -dz1, count);
                t.iter().map(|v| v[0].transpose().matmul(&self.n_conj[k]).scale_re(self.w[k])).collect()
            })
            .collect();
        let mut out = vec![Tensor2C::zero(); count];
        for p in &parts {
            for (o, v) in out.iter_mut().zip(p) {
                *o += *v;
            }
        }
        Ok(out)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PsfConfig {
    pub medium: ElasticMedium,
    pub d: f64,
    pub grid: GridSpec,
    pub c1: f64,
    pub c2: f64,
}

impl PsfConfig {
    pub fn new(medium: ElasticMedium, d: f64, grid: GridSpec) -> Result<Self> {
        let c = PsfConfig { medium, d, grid, c1: 0.9, c2: 10.0 };
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.d > 0.0) {
            return Err(Error::InvalidParameter(format!("aperture {}", self.d)));
        }
        let w = check_window(&self.grid, self.d, self.c1, self.c2);
        if let Some(m) = w.first() {
            return Err(Error::InvalidParameter(m.clone()));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PeakSummary {
    pub value: f64,
    pub location: [f64; 2],
    /// Full width at half maximum along the horizontal and vertical cuts.
    pub fwhm: [f64; 2],
}

#[derive(Clone, Debug)]
pub struct PsfReport {
    pub grid: GridSpec,
    pub y: [f64; 2],
    pub im_f11: Vec<f64>,
    pub im_f22: Vec<f64>,
    pub abs_f: Vec<f64>,
    pub abs_jd_minus_f: Vec<f64>,
    /// Peaks of `−Im F₁₁` and `−Im F₂₂`.
    pub peaks: [PeakSummary; 2],
    /// Median of `|F|` over the grid.
    pub background_median: f64,
}

fn median(v: &[f64]) -> f64 {
    let mut s = v.to_vec();
    s.sort_by(f64::total_cmp);
    let n = s.len();
    if n % 2 == 1 {
        s[n / 2]
    } else {
        0.5 * (s[n / 2 - 1] + s[n / 2])
    }
}

/// Width of the region around `i0` where `v ≥ v[i0]/2`, interpolating linearly.
fn fwhm_1d(v: &[f64], i0: usize, h: f64) -> f64 {
    let half = 0.5 * v[i0];
    let lo;
    let mut i = i0;
    loop {
        if i == 0 {
            lo = 0.0;
            break;
        }
        if v[i - 1] < half {
            lo = (i - 1) as f64 + (half - v[i - 1]) / (v[i] - v[i - 1]);
            break;
        }
        i -= 1;
    }
    let mut hi;
    let mut j = i0;
    loop {
        if j + 1 == v.len() {
            hi = j as f64;
            break;
        }
        if v[j + 1] < half {
            hi = j as f64 + (v[j] - half) / (v[j] - v[j + 1]);
            break;
        }
        j += 1;
    }
    if hi < lo {
        hi = lo;
    }
    (hi - lo) * h
}

fn peak(grid: &GridSpec, v: &[f64]) -> PeakSummary {
    let (idx, &val) = v.iter().enumerate().max_by(|a, b| a.1.total_cmp(b.1)).expect("nonempty grid");
    let (i1, i2) = (idx % grid.n1, idx / grid.n1);
    let row: Vec<f64> = (0..grid.n1).map(|i| v[i2 * grid.n1 + i]).collect();
    let col: Vec<f64> = (0..grid.n2).map(|j| v[j * grid.n1 + i1]).collect();
    let sp = grid.spacing();
    PeakSummary { value: val, location: grid.point(i1, i2), fwhm: [fwhm_1d(&row, i1, sp[0]), fwhm_1d(&col, i2, sp[1])] }
}

/// Sweeps `z` over the grid with `y` at the window centre.
pub fn psf_resolution_profile(config: &PsfConfig) -> Result<PsfReport> {
    config.validate()?;
    let engine = GreenEngine::new(&config.medium);
    let g = config.grid;
    let y = g.center();
    let pts: Vec<[f64; 2]> = (0..g.n2).flat_map(|j| (0..g.n1).map(move |i| g.point(i, j))).collect();
    let f: Vec<Tensor2C> = pts.par_iter().map(|&z| psf_f(&engine, z, y)).collect::<Result<_>>()?;
    let sweep = JdSweep::new(&engine, y, config.d)?;
    let sp = g.spacing();
    let mut jd = Vec::with_capacity(pts.len());
    for j in 0..g.n2 {
        jd.extend(sweep.row(&engine, g.z1[0], sp[0], g.n1, g.point(0, j)[1])?);
    }
    let im_f11: Vec<f64> = f.iter().map(|t| t.m[0][0].im).collect();
    let im_f22: Vec<f64> = f.iter().map(|t| t.m[1][1].im).collect();
    let abs_f: Vec<f64> = f.iter().map(|t| t.norm()).collect();
    let abs_jd_minus_f: Vec<f64> = jd.iter().zip(&f).map(|(a, b)| (*a - *b).norm()).collect();
    let all = im_f11.iter().chain(&im_f22).chain(&abs_f).chain(&abs_jd_minus_f);
    if all.into_iter().any(|v| !v.is_finite()) {
        return Err(Error::Domain("non-finite PSF value".into()));
    }
    let n11: Vec<f64> = im_f11.iter().map(|v| -v).collect();
    let n22: Vec<f64> = im_f22.iter().map(|v| -v).collect();
    let peaks = [peak(&g, &n11), peak(&g, &n22)];
    let background_median = median(&abs_f);
    Ok(PsfReport { grid: g, y, im_f11, im_f22, abs_f, abs_jd_minus_f, peaks, background_median })
}

impl PsfReport {
    pub fn summary(&self) -> String {
        let mut s = String::new();
        s.push_str(&format!("y {:.6} {:.6}\n", self.y[0], self.y[1]));
        for (name, p) in ["-Im F11", "-Im F22"].iter().zip(&self.peaks) {
            s.push_str(&format!(
                "{name}: peak {:.6e} at ({:.6}, {:.6}), fwhm horizontal {:.6} vertical {:.6}\n",
                p.value, p.location[0], p.location[1], p.fwhm[0], p.fwhm[1]
            ));
        }
        s.push_str(&format!("median |F| {:.6e}\n", self.background_median));
        let max_err = self.abs_jd_minus_f.iter().cloned().fold(0.0, f64::max);
        s.push_str(&format!("max |J_d - F| {:.6e}\n", max_err));
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn engine() -> GreenEngine {
        GreenEngine::new(&ElasticMedium::new(0.5, 0.25, 2.0 * PI).unwrap())
    }

    #[test]
    fn fwhm_of_triangle() {
        let v = [0.0, 0.5, 1.0, 0.5, 0.0];
        assert!((fwhm_1d(&v, 2, 1.0) - 2.0).abs() < 1e-12);
        assert!((median(&[3.0, 1.0, 2.0, 10.0]) - 2.5).abs() < 1e-12);
    }

    #[test]
    fn sweep_matches_adaptive() {
        let e = engine();
        let y = [0.1, 3.0];
        let d = 8.0;
        let s = JdSweep::new(&e, y, d).unwrap();
        let row = s.row(&e, -0.5, 0.25, 5, 3.2).unwrap();
        for (i, v) in row.iter().enumerate() {
            let a = psf_jd(&e, [-0.5 + 0.25 * i as f64, 3.2], y, d).unwrap();
            assert!((*v - a).norm() < 1e-8 * a.norm(), "{i}: {}", (*v - a).norm() / a.norm());
        }
    }

    #[test]
    fn rejects_bad_points() {
        let e = engine();
        assert!(psf_f(&e, [0.0, -1.0], [0.0, 1.0]).is_err());
        assert!(psf_jd(&e, [0.0, 1.0], [0.0, 1.0], 0.0).is_err());
    }
}
