//! Reverse-time-migration imaging: incident and back-propagated fields and the
//! cross-correlation imaging function on a rectangular grid.

use crate::error::{Error, Result};
use crate::forward::{ScatterDataSet, SurveyGeometry};
use crate::green::GreenEngine;
use crate::{Tensor2C, C64};
use rayon::prelude::*;
use std::io::Write;

/// Rectangular sampling grid `[z1₀, z1₁] × [z2₀, z2₁]` with `n1 × n2` points,
/// endpoints included. Values are stored row-major with `z2` as the row index.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GridSpec {
    pub z1: [f64; 2],
    pub z2: [f64; 2],
    pub n1: usize,
    pub n2: usize,
}

impl GridSpec {
    pub fn new(z1: [f64; 2], z2: [f64; 2], n1: usize, n2: usize) -> Result<Self> {
        let ok = |r: [f64; 2]| r[0].is_finite() && r[1].is_finite() && r[1] > r[0];
        if !ok(z1) || !ok(z2) {
            return Err(Error::InvalidParameter("grid ranges must be increasing".into()));
        }
        if n1 < 2 || n2 < 2 {
            return Err(Error::InvalidParameter("grid needs at least 2 points per axis".into()));
        }
        if !(z2[0] > 0.0) {
            return Err(Error::InvalidParameter("grid must lie in the upper half plane".into()));
        }
        Ok(GridSpec { z1, z2, n1, n2 })
    }

    pub fn spacing(&self) -> [f64; 2] {
        [(self.z1[1] - self.z1[0]) / (self.n1 - 1) as f64, (self.z2[1] - self.z2[0]) / (self.n2 - 1) as f64]
    }

    pub fn point(&self, i1: usize, i2: usize) -> [f64; 2] {
        let h = self.spacing();
        [self.z1[0] + i1 as f64 * h[0], self.z2[0] + i2 as f64 * h[1]]
    }

    pub fn center(&self) -> [f64; 2] {
        [0.5 * (self.z1[0] + self.z1[1]), 0.5 * (self.z2[0] + self.z2[1])]
    }

    pub fn len(&self) -> usize {
        self.n1 * self.n2
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn points(&self) -> Vec<[f64; 2]> {
        (0..self.n2).flat_map(|j| (0..self.n1).map(move |i| self.point(i, j))).collect()
    }
}

/// Violations of `max|z₁| ≤ c₁ d` and `diam ≤ c₂ h`, `h` the window's distance
/// to the surface.
pub fn check_window(grid: &GridSpec, d: f64, c1: f64, c2: f64) -> Vec<String> {
    let mut out = Vec::new();
    let m = grid.z1[0].abs().max(grid.z1[1].abs());
    if m > c1 * d {
        out.push(format!("window reaches |z1| = {m} > {c1}·d = {}", c1 * d));
    }
    let diam = (grid.z1[1] - grid.z1[0]).hypot(grid.z2[1] - grid.z2[0]);
    let h = grid.z2[0];
    if diam > c2 * h {
        out.push(format!("window diameter {diam} > {c2}·h = {}", c2 * h));
    }
    out
}

/// Quadrature weights over the acquisition line.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum ApertureWeights {
    /// `2d/N` for every point.
    #[default]
    Uniform,
    /// Trapezoid rule on the uniform positions.
    Trapezoid,
}

impl ApertureWeights {
    pub fn weights(&self, d: f64, n: usize) -> Vec<f64> {
        match self {
            ApertureWeights::Uniform => vec![2.0 * d / n as f64; n],
            ApertureWeights::Trapezoid if n == 1 => vec![2.0 * d],
            ApertureWeights::Trapezoid => {
                let h = 2.0 * d / (n - 1) as f64;
                (0..n).map(|i| if i == 0 || i == n - 1 { 0.5 * h } else { h }).collect()
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ImagingGrid {
    pub spec: GridSpec,
    pub values: Vec<f64>,
}

fn unit(q: usize) -> [C64; 2] {
    let mut v = [C64::new(0.0, 0.0); 2];
    v[q] = C64::new(1.0, 0.0);
    v
}

/// Incident displacement `T_D(x_s, z)ᵀ q` of a surface point force.
pub fn incident_field(engine: &GreenEngine, z: [f64; 2], x_s: f64, q: [C64; 2]) -> Result<[C64; 2]> {
    Ok(engine.dirichlet_traction([x_s, 0.0], z)?.transpose().mul_vec(q))
}

/// Back-propagated field `(2d/N_r) Σ_r T_D(x_r, z)ᵀ conj(u_q(x_r, x_s))` for
/// source `s`, polarization `q`.
pub fn backprop_field(engine: &GreenEngine, z: [f64; 2], data: &ScatterDataSet, s: usize, q: usize) -> Result<[C64; 2]> {
    let sv = &data.survey;
    if s >= sv.n_src || q > 1 {
        return Err(Error::GeometryMismatch(format!("source {s} / polarization {q}")));
    }
    let w = 2.0 * sv.d / sv.n_rcv as f64;
    let mut v = [C64::new(0.0, 0.0); 2];
    for (r, &x) in sv.receivers().iter().enumerate() {
        let u = [data.get(s, r, q, 0).conj(), data.get(s, r, q, 1).conj()];
        let t = engine.dirichlet_traction([x, 0.0], z)?.transpose().mul_vec(u);
        v[0] += t[0] * w;
        v[1] += t[1] * w;
    }
    Ok(v)
}

fn lattice_rows(engine: &GreenEngine, pos: &[f64], grid: &GridSpec, d: f64, j: usize) -> Result<Vec<Vec<Tensor2C>>> {
    let z = grid.point(0, j);
    let h = grid.spacing()[0];
    let reach = pos.iter().fold(d, |m, x| m.max(x.abs())) + grid.z1[0].abs().max(grid.z1[1].abs());
    let table = engine.dirichlet_traction_table(reach, z[1])?;
    Ok(pos.par_iter().map(|&x| table.eval_lattice(x - z[0], -h, grid.n1).into_iter().map(|t| t[0]).collect()).collect())
}

/// `I(z) = Im Σ_q Σ_s w_s (T_D(x_s,z)ᵀq)·(Σ_r w_r T_D(x_r,z)ᵀ conj u_q(x_r,x_s))`.
/// Sums run in index order, so the result does not depend on the thread count.
pub fn image(data: &ScatterDataSet, grid: &GridSpec, weights: ApertureWeights) -> Result<ImagingGrid> {
    let sv: SurveyGeometry = data.survey;
    let engine = GreenEngine::new(&data.medium);
    let src = sv.sources();
    let rcv = sv.receivers();
    let ws = weights.weights(sv.d, sv.n_src);
    let wr = weights.weights(sv.d, sv.n_rcv);
    let shared = src == rcv;
    let mut values = vec![0.0; grid.len()];
    for j in 0..grid.n2 {
        let ts = lattice_rows(&engine, &src, grid, sv.d, j)?;
        let tr_own;
        let tr = if shared {
            &ts
        } else {
            tr_own = lattice_rows(&engine, &rcv, grid, sv.d, j)?;
            &tr_own
        };
        let row: Vec<f64> = (0..grid.n1)
            .into_par_iter()
            .map(|i| {
                let mut acc = C64::new(0.0, 0.0);
                for q in 0..2 {
                    for s in 0..sv.n_src {
                        let mut v = [C64::new(0.0, 0.0); 2];
                        for r in 0..sv.n_rcv {
                            let u = [data.get(s, r, q, 0).conj(), data.get(s, r, q, 1).conj()];
                            let t = tr[r][i].transpose().mul_vec(u);
                            v[0] += t[0] * wr[r];
                            v[1] += t[1] * wr[r];
                        }
                        let inc = ts[s][i].transpose().mul_vec(unit(q));
                        acc += (inc[0] * v[0] + inc[1] * v[1]) * ws[s];
                    }
                }
                acc.im
            })
            .collect();
        values[j * grid.n1..(j + 1) * grid.n1].copy_from_slice(&row);
    }
    Ok(ImagingGrid { spec: *grid, values })
}

/// Pointwise sum of images on a common grid. Each point sums its values in
/// sorted order, so the result does not depend on the order of `images`.
pub fn stack(images: &[ImagingGrid]) -> Result<ImagingGrid> {
    let first = images.first().ok_or_else(|| Error::InvalidParameter("nothing to stack".into()))?;
    if images.iter().any(|im| im.spec != first.spec) {
        return Err(Error::GeometryMismatch("images have different grids".into()));
    }
    let mut col = vec![0.0; images.len()];
    let values = (0..first.values.len())
        .map(|k| {
            for (c, im) in col.iter_mut().zip(images) {
                *c = im.values[k];
            }
            col.sort_by(f64::total_cmp);
            col.iter().sum()
        })
        .collect();
    Ok(ImagingGrid { spec: first.spec, values })
}

impl ImagingGrid {
    pub fn get(&self, i1: usize, i2: usize) -> f64 {
        self.values[i2 * self.spec.n1 + i1]
    }

    /// Location and value of the largest entry.
    pub fn argmax(&self) -> ([f64; 2], f64) {
        let (k, &v) = self.values.iter().enumerate().max_by(|a, b| a.1.total_cmp(b.1)).expect("nonempty grid");
        (self.spec.point(k % self.spec.n1, k / self.spec.n1), v)
    }

    /// Mean of `|I|` over grid points where `keep` holds.
    pub fn mean_abs_where(&self, keep: impl Fn([f64; 2]) -> bool) -> Option<f64> {
        let (mut s, mut n) = (0.0, 0usize);
        for (k, v) in self.values.iter().enumerate() {
            if keep(self.spec.point(k % self.spec.n1, k / self.spec.n1)) {
                s += v.abs();
                n += 1;
            }
        }
        (n > 0).then(|| s / n as f64)
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        let mut buf = String::from("z1,z2,value\n");
        for j in 0..self.spec.n2 {
            for i in 0..self.spec.n1 {
                let p = self.spec.point(i, j);
                buf.push_str(&format!("{:.16e},{:.16e},{:.16e}\n", p[0], p[1], self.get(i, j)));
            }
        }
        w.write_all(buf.as_bytes())?;
        Ok(())
    }

    /// Sidecar header: grid geometry, frequencies and input digests.
    pub fn header(&self, omegas: &[f64], digests: &[(String, String)]) -> String {
        let g = &self.spec;
        let mut s = String::new();
        s.push_str(&format!("z1 {:.16e} {:.16e} {}\n", g.z1[0], g.z1[1], g.n1));
        s.push_str(&format!("z2 {:.16e} {:.16e} {}\n", g.z2[0], g.z2[1], g.n2));
        let om: Vec<String> = omegas.iter().map(|o| format!("{o:.16e}")).collect();
        s.push_str(&format!("omega {}\n", om.join(" ")));
        for (name, dg) in digests {
            s.push_str(&format!("dataset {name} sha256 {dg}\n"));
        }
        s
    }

    /// Binary 8-bit graymap, min-max scaled; row 0 is the shallowest grid row.
    pub fn write_pgm<W: Write>(&self, mut w: W) -> Result<()> {
        let lo = self.values.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = self.values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let scale = if hi > lo { 255.0 / (hi - lo) } else { 0.0 };
        write!(w, "P5\n{} {}\n255\n", self.spec.n1, self.spec.n2)?;
        let px: Vec<u8> = self.values.iter().map(|v| ((v - lo) * scale).round().clamp(0.0, 255.0) as u8).collect();
        w.write_all(&px)?;
        Ok(())
    }
}
