//! Closed-form full-space elastodynamic tensor, its gradient and traction,
//! together with the logarithmic parts used by the boundary quadrature.

use crate::special::{bessel_set, BesselSet};
use crate::{ElasticMedium, Tensor2C, C64};
use std::f64::consts::PI;

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Radial functions of `G = a I + b r̂r̂ᵀ`.
#[derive(Clone, Copy, Debug)]
pub struct Radial {
    pub a: C64,
    pub b: C64,
    pub da: C64,
    pub db: C64,
    /// Coefficients of `ln r` hidden in `a, b, a', b'` (real analytic in r).
    pub la: f64,
    pub lb: f64,
    pub lda: f64,
    pub ldb: f64,
}

#[derive(Clone, Copy, Debug)]
pub struct FullSpace {
    pub lambda: f64,
    pub mu: f64,
    pub omega: f64,
    pub k_p: f64,
    pub k_s: f64,
}

struct Wave {
    phi: C64,
    dphi: C64,
    psi: C64,
    chi: C64,
    dchi: C64,
    l_phi: f64,
    l_dphi: f64,
    l_psi: f64,
    l_chi: f64,
    l_dchi: f64,
}

fn wave(k: f64, r: f64) -> Wave {
    let x = k * r;
    let b: BesselSet = bessel_set(x);
    let h = |n: usize| C64::new(b.j[n], b.y[n]);
    let i4 = C64::new(0.0, 0.25);
    let tp = 2.0 * PI;
    Wave {
        phi: i4 * h(0),
        dphi: -i4 * k * h(1),
        psi: -i4 * (k / r) * h(1),
        chi: i4 * k * k * h(2),
        dchi: i4 * k * k * k * (h(1) - h(2) * (2.0 / x)),
        l_phi: -b.j[0] / tp,
        l_dphi: k * b.j[1] / tp,
        l_psi: k * b.j[1] / (tp * r),
        l_chi: -k * k * b.j[2] / tp,
        l_dchi: -k * k * k * b.j2_prime(x) / tp,
    }
}

impl FullSpace {
    pub fn new(m: &ElasticMedium) -> Self {
        let w = crate::medium::derive_wavenumbers(m);
        FullSpace { lambda: m.lambda(), mu: m.mu(), omega: m.omega(), k_p: w.k_p, k_s: w.k_s }
    }

    pub fn radial(&self, r: f64) -> Radial {
        let s = wave(self.k_s, r);
        let p = wave(self.k_p, r);
        let w2 = self.omega * self.omega;
        Radial {
            a: s.phi / self.mu + (s.psi - p.psi) / w2,
            b: (s.chi - p.chi) / w2,
            da: s.dphi / self.mu + (s.chi - p.chi) / (r * w2),
            db: (s.dchi - p.dchi) / w2,
            la: s.l_phi / self.mu + (s.l_psi - p.l_psi) / w2,
            lb: (s.l_chi - p.l_chi) / w2,
            lda: s.l_dphi / self.mu + (s.l_chi - p.l_chi) / (r * w2),
            ldb: (s.l_dchi - p.l_dchi) / w2,
        }
    }

    /// `G(x, y)`; `x != y`.
    pub fn green(&self, x: [f64; 2], y: [f64; 2]) -> Tensor2C {
        let (r, rh) = unit(x, y);
        let rad = self.radial(r);
        Tensor2C::identity().scale(rad.a) + Tensor2C::outer_re(rh).scale(rad.b)
    }

    /// `G(x, y)` and the coefficient tensor of `ln r` inside it.
    pub fn green_split(&self, x: [f64; 2], y: [f64; 2]) -> (Tensor2C, Tensor2C) {
        let (r, rh) = unit(x, y);
        let rad = self.radial(r);
        let o = Tensor2C::outer_re(rh);
        (
            Tensor2C::identity().scale(rad.a) + o.scale(rad.b),
            Tensor2C::identity().scale_re(rad.la) + o.scale_re(rad.lb),
        )
    }

    /// `[∂G/∂x₁, ∂G/∂x₂]`.
    pub fn gradient(&self, x: [f64; 2], y: [f64; 2]) -> [Tensor2C; 2] {
        let (r, rh) = unit(x, y);
        let rad = self.radial(r);
        let bo = rad.b / r;
        let mut out = [Tensor2C::zero(); 2];
        for (k, g) in out.iter_mut().enumerate() {
            for i in 0..2 {
                for j in 0..2 {
                    let dij = if i == j { 1.0 } else { 0.0 };
                    let dik = if i == k { 1.0 } else { 0.0 };
                    let djk = if j == k { 1.0 } else { 0.0 };
                    g.m[i][j] = rad.da * (rh[k] * dij)
                        + rad.db * (rh[k] * rh[i] * rh[j])
                        + bo * ((dik - rh[i] * rh[k]) * rh[j] + rh[i] * (djk - rh[j] * rh[k]));
                }
            }
        }
        out
    }

    /// Traction `σ_x(G(·,y)q)ν` as a tensor acting on `q`, plus its `ln r` coefficient.
    pub fn traction_split(&self, x: [f64; 2], y: [f64; 2], nu: [f64; 2]) -> (Tensor2C, Tensor2C) {
        let (r, rh) = unit(x, y);
        let rad = self.radial(r);
        let full = traction_form(self.lambda, self.mu, rad.da, rad.db, rad.b / r, rh, nu);
        let c = |v: f64| C64::new(v, 0.0);
        let log = traction_form(self.lambda, self.mu, c(rad.lda), c(rad.ldb), c(rad.lb / r), rh, nu);
        (full, log)
    }

    pub fn traction(&self, x: [f64; 2], y: [f64; 2], nu: [f64; 2]) -> Tensor2C {
        self.traction_split(x, y, nu).0
    }

    /// Limits as `r → 0`: `a = la0 ln r + a0 + o(1)`, `b → b0`.
    pub fn diagonal_constants(&self) -> (C64, f64, f64) {
        let w2 = self.omega * self.omega;
        let (ks, kp) = (self.k_s, self.k_p);
        let lg = |k: f64| (k / 2.0).ln() + EULER_GAMMA;
        let phi0 = C64::new(-lg(ks) / (2.0 * PI), 0.25);
        let dpsi = C64::new(
            (ks * ks * (lg(ks) - 0.5) - kp * kp * (lg(kp) - 0.5)) / (4.0 * PI),
            -(ks * ks - kp * kp) / 8.0,
        );
        let a0 = phi0 / self.mu + dpsi / w2;
        let la0 = -1.0 / (2.0 * PI * self.mu) + (ks * ks - kp * kp) / (4.0 * PI * w2);
        let b0 = (ks * ks - kp * kp) / (4.0 * PI * w2);
        (a0, la0, b0)
    }
}

fn unit(x: [f64; 2], y: [f64; 2]) -> (f64, [f64; 2]) {
    let d = [x[0] - y[0], x[1] - y[1]];
    let r = d[0].hypot(d[1]);
    (r, [d[0] / r, d[1] / r])
}

/// `T_ij = λPν_i r̂_j + μ[Q(rn δ_ij + r̂_i ν_j) + 2(b/r)ν_i r̂_j + (2b' − 4b/r) rn r̂_i r̂_j]`
/// with `P = a' + b' + b/r`, `Q = a' + b/r`, `rn = r̂·ν`; column j is the field of `e_j`.
fn traction_form(lambda: f64, mu: f64, da: C64, db: C64, bo: C64, rh: [f64; 2], nu: [f64; 2]) -> Tensor2C {
    let p = da + db + bo;
    let q = da + bo;
    let rn = rh[0] * nu[0] + rh[1] * nu[1];
    let mut t = Tensor2C::zero();
    for i in 0..2 {
        for j in 0..2 {
            let dij = if i == j { 1.0 } else { 0.0 };
            t.m[i][j] = p * (lambda * nu[i] * rh[j])
                + (q * (rn * dij + rh[i] * nu[j]) + bo * (2.0 * nu[i] * rh[j]) + (db * 2.0 - bo * 4.0) * (rn * rh[i] * rh[j]))
                    * mu;
        }
    }
    t
}
