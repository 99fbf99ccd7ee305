//! Spectral (horizontal Fourier) forms of the half-space tensors.

use crate::error::{Error, Result};
use crate::medium::{derive_wavenumbers, mu_alpha};
use crate::{ElasticMedium, WaveNumbers};
use crate::quadrature::branch_sqrt_raw;
use crate::{Tensor2C, C64};

const I: C64 = C64 { re: 0.0, im: 1.0 };

/// Medium constants in the form used by the spectral formulas. The wavenumbers
/// and frequency are complex so the same code serves the damped oracle.
#[derive(Clone, Copy, Debug)]
pub struct SpectralMedium {
    pub lambda: f64,
    pub mu: f64,
    pub omega: C64,
    pub k_p: C64,
    pub k_s: C64,
    pub wn: WaveNumbers,
    damped: bool,
}

/// Which derivative of the spectral integrand is wanted.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Deriv {
    None,
    /// `∂/∂x₁` of the field point (`iξ`) or `∂/∂y₁` of the source (`-iξ`).
    D1,
    /// `∂/∂x₂` or `∂/∂y₂` (`iμ_α` on the matching exponential).
    D2,
}

impl SpectralMedium {
    pub fn new(m: &ElasticMedium) -> Self {
        let wn = derive_wavenumbers(m);
        SpectralMedium {
            lambda: m.lambda(),
            mu: m.mu(),
            omega: C64::new(m.omega(), 0.0),
            k_p: C64::new(wn.k_p, 0.0),
            k_s: C64::new(wn.k_s, 0.0),
            wn,
            damped: false,
        }
    }

    /// Frequency `ω(1 + iε)`; wavenumbers scale by the same factor.
    pub fn damped(m: &ElasticMedium, eps: f64) -> Self {
        let mut s = Self::new(m);
        let f = C64::new(1.0, eps);
        s.omega *= f;
        s.k_p *= f;
        s.k_s *= f;
        s.damped = eps != 0.0;
        s
    }

    pub fn is_damped(&self) -> bool {
        self.damped
    }

    fn vertical(&self, xi: f64, k: C64) -> C64 {
        if self.damped {
            branch_sqrt_raw(k * k - xi * xi)
        } else {
            mu_alpha(xi, k.re)
        }
    }

    pub fn mu_s(&self, xi: f64) -> C64 {
        self.vertical(xi, self.k_s)
    }

    pub fn mu_p(&self, xi: f64) -> C64 {
        self.vertical(xi, self.k_p)
    }

    pub fn pieces(&self, xi: f64) -> SpectralPieces {
        SpectralPieces::at(self, xi)
    }

    fn check_pole(&self, xi: f64) -> Result<()> {
        if !self.damped && xi.abs() == self.wn.k_r {
            return Err(Error::Domain("spectral tensor evaluated at the Rayleigh pole".into()));
        }
        Ok(())
    }

    /// `Ĝ(ξ; x₂, y₂)`: the full-space tensor in the horizontal Fourier variable.
    pub fn fullspace_hat(&self, xi: f64, x2: f64, y2: f64) -> Result<Tensor2C> {
        if x2 == y2 {
            return Err(Error::Domain("fullspace_hat needs x2 != y2".into()));
        }
        Ok(self.fullspace_hat_d(xi, x2, y2, Deriv::None))
    }

    /// `Ĝ` or its `x₂` derivative (`Deriv::D2`); `Deriv::D1` multiplies by `iξ`.
    pub fn fullspace_hat_d(&self, xi: f64, x2: f64, y2: f64, d: Deriv) -> Tensor2C {
        let s = (x2 - y2).signum();
        let a = (x2 - y2).abs();
        let ms = self.mu_s(xi);
        let mp = self.mu_p(xi);
        let pre = I / (2.0 * self.omega * self.omega);
        let es = (I * ms * a).exp();
        let ep = (I * mp * a).exp();
        let x = C64::new(xi, 0.0);
        let gs = Tensor2C::new(ms, -x * s, -x * s, x * x / ms);
        let gp = Tensor2C::new(x * x / mp, x * s, x * s, mp);
        let (fs, fp) = match d {
            Deriv::None => (C64::new(1.0, 0.0), C64::new(1.0, 0.0)),
            Deriv::D1 => (I * xi, I * xi),
            Deriv::D2 => (I * ms * s, I * mp * s),
        };
        (gs.scale(es * fs) + gp.scale(ep * fp)).scale(pre)
    }

    /// Numerator of the reflected correction, `(i/ω²) Σ A_{αβ} e^{i(μ_α x₂ + μ_β y₂)}`
    /// (to be divided by δ). `dx` differentiates in the field point, `dy` in the source.
    pub fn correction_numerator(&self, xi: f64, x2: f64, y2: f64, dx: Deriv, dy: Deriv) -> Tensor2C {
        let p = self.pieces(xi);
        let m = [p.mu_s, p.mu_p];
        let mut acc = Tensor2C::zero();
        for (ia, ma) in m.iter().enumerate() {
            let ex = (I * ma * x2).exp();
            let fx = match dx {
                Deriv::None => C64::new(1.0, 0.0),
                Deriv::D1 => I * xi,
                Deriv::D2 => I * ma,
            };
            for (ib, mb) in m.iter().enumerate() {
                let ey = (I * mb * y2).exp();
                let fy = match dy {
                    Deriv::None => C64::new(1.0, 0.0),
                    Deriv::D1 => -I * xi,
                    Deriv::D2 => I * mb,
                };
                acc += p.a[2 * ia + ib].scale(ex * ey * fx * fy);
            }
        }
        acc.scale(I / (self.omega * self.omega))
    }

    /// Spectral Neumann tensor in the bulk: `Ĝ(x₂;y₂) − Ĝ(x₂;−y₂) + (i/ω²δ) Σ A e^{…}`.
    pub fn neumann_bulk_hat(&self, xi: f64, x2: f64, y2: f64) -> Result<Tensor2C> {
        self.check_pole(xi)?;
        if x2 == y2 {
            return Err(Error::Domain("neumann_bulk_hat needs x2 != y2".into()));
        }
        let d = self.pieces(xi).delta;
        Ok(self.fullspace_hat_d(xi, x2, y2, Deriv::None) - self.fullspace_hat_d(xi, x2, -y2, Deriv::None)
            + self.correction_numerator(xi, x2, y2, Deriv::None, Deriv::None).scale(1.0 / d))
    }

    /// `x₂` derivative of [`Self::neumann_bulk_hat`].
    pub fn neumann_bulk_hat_dx2(&self, xi: f64, x2: f64, y2: f64) -> Tensor2C {
        let d = self.pieces(xi).delta;
        self.fullspace_hat_d(xi, x2, y2, Deriv::D2) - self.fullspace_hat_d(xi, x2, -y2, Deriv::D2)
            + self.correction_numerator(xi, x2, y2, Deriv::D2, Deriv::None).scale(1.0 / d)
    }

    /// `N_p e^{iμ_p y₂} + N_s e^{iμ_s y₂}` (to be divided by δ), optionally
    /// differentiated in the source coordinates.
    pub fn surface_numerator(&self, xi: f64, y2: f64, dy: Deriv) -> Tensor2C {
        let p = self.pieces(xi);
        let (fp, fs) = match dy {
            Deriv::None => (C64::new(1.0, 0.0), C64::new(1.0, 0.0)),
            Deriv::D1 => (-I * xi, -I * xi),
            Deriv::D2 => (I * p.mu_p, I * p.mu_s),
        };
        p.n_p.scale((I * p.mu_p * y2).exp() * fp) + p.n_s.scale((I * p.mu_s * y2).exp() * fs)
    }

    /// Spectral Neumann tensor on the surface, `(N_p e^{iμ_p y₂} + N_s e^{iμ_s y₂})/δ`.
    pub fn neumann_surface_hat(&self, xi: f64, y2: f64) -> Result<Tensor2C> {
        self.check_pole(xi)?;
        if !(y2 > 0.0) {
            return Err(Error::Domain("source depth must be positive".into()));
        }
        let d = self.pieces(xi).delta;
        Ok(self.surface_numerator(xi, y2, Deriv::None).scale(1.0 / d))
    }

    /// Spectral Dirichlet tensor `Ĝ(x₂;y₂) − Ĝ(x₂;−y₂) + (i/ω²γ) Σ B e^{…}`, or its `x₂` derivative.
    pub fn dirichlet_bulk_hat(&self, xi: f64, x2: f64, y2: f64, d: Deriv) -> Tensor2C {
        let p = self.pieces(xi);
        let m = [p.mu_s, p.mu_p];
        let mut acc = Tensor2C::zero();
        for (ia, ma) in m.iter().enumerate() {
            let f = if d == Deriv::D2 { I * ma } else { C64::new(1.0, 0.0) };
            for (ib, mb) in m.iter().enumerate() {
                acc += p.b[2 * ia + ib].scale((I * (ma * x2 + mb * y2)).exp() * f);
            }
        }
        let dd = if d == Deriv::D2 { Deriv::D2 } else { Deriv::None };
        self.fullspace_hat_d(xi, x2, y2, dd) - self.fullspace_hat_d(xi, x2, -y2, dd)
            + acc.scale(I / (self.omega * self.omega * p.gamma))
    }

    /// Spectral surface traction of the Dirichlet tensor, `T_p e^{iμ_p z₂} + T_s e^{iμ_s z₂}`.
    pub fn dirichlet_traction_hat(&self, xi: f64, z2: f64) -> Tensor2C {
        let p = self.pieces(xi);
        p.t_p.scale((I * p.mu_p * z2).exp()) + p.t_s.scale((I * p.mu_s * z2).exp())
    }

    /// Traction `σ(U)e₂` of a spectral displacement tensor (columns are the
    /// displacement fields) given `U` and `∂U/∂x₂`; `∂/∂x₁` acts as `iξ`.
    pub fn spectral_traction_e2(&self, xi: f64, u: &Tensor2C, du2: &Tensor2C) -> Tensor2C {
        let d1 = u.scale(I * xi);
        let mut t = Tensor2C::zero();
        for j in 0..2 {
            let div = d1.m[0][j] + du2.m[1][j];
            t.m[0][j] = (du2.m[0][j] + d1.m[1][j]) * self.mu;
            t.m[1][j] = div * self.lambda + du2.m[1][j] * (2.0 * self.mu);
        }
        t
    }

    /// `δ'(ξ)` for real ξ away from branch points (undamped medium).
    pub fn delta_prime(&self, xi: f64) -> C64 {
        self.wn.delta_prime(xi)
    }
}

/// All spectral matrices and scalars at one ξ.
#[derive(Clone, Copy, Debug)]
pub struct SpectralPieces {
    pub xi: f64,
    pub mu_s: C64,
    pub mu_p: C64,
    pub beta: C64,
    pub delta: C64,
    pub gamma: C64,
    pub n_p: Tensor2C,
    pub n_s: Tensor2C,
    pub t_p: Tensor2C,
    pub t_s: Tensor2C,
    /// `A_ss, A_sp, A_ps, A_pp`
    pub a: [Tensor2C; 4],
    /// `B_ss, B_sp, B_ps, B_pp`
    pub b: [Tensor2C; 4],
}

impl SpectralPieces {
    pub fn at(sm: &SpectralMedium, xi: f64) -> Self {
        let ms = sm.mu_s(xi);
        let mp = sm.mu_p(xi);
        let x = C64::new(xi, 0.0);
        let x2 = x * x;
        let x3 = x2 * x;
        let x4 = x2 * x2;
        let beta = sm.k_s * sm.k_s - 2.0 * x2;
        let b2 = beta * beta;
        let msp = ms * mp;
        let delta = b2 + 4.0 * x2 * msp;
        let gamma = x2 + msp;
        let im = I / sm.mu;
        let n_p = Tensor2C::new(2.0 * x2 * ms, -2.0 * x * msp, -x * beta, mp * beta).scale(im);
        let n_s = Tensor2C::new(ms * beta, x * beta, 2.0 * x * msp, 2.0 * x2 * mp).scale(im);
        let ig = 1.0 / gamma;
        let t_p = Tensor2C::new(x2, -x * mp, -x * ms, msp).scale(ig);
        let t_s = Tensor2C::new(msp, x * mp, x * ms, x2).scale(ig);
        let a_ss = Tensor2C::new(b2 * ms, -4.0 * x3 * msp, -x * b2, 4.0 * x4 * mp);
        let a_sp = Tensor2C::new(2.0 * x2 * beta * ms, -2.0 * x * beta * msp, -2.0 * x3 * beta, 2.0 * x2 * beta * mp);
        let a_ps = Tensor2C::new(2.0 * x2 * beta * ms, 2.0 * x3 * beta, 2.0 * x * beta * msp, 2.0 * x2 * beta * mp);
        let a_pp = Tensor2C::new(4.0 * x4 * ms, x * b2, 4.0 * x3 * msp, b2 * mp);
        let b_ss = Tensor2C::new(x2 * ms, -x * msp, -x3, x2 * mp);
        let b_pp = Tensor2C::new(x2 * ms, x3, x * msp, x2 * mp);
        SpectralPieces {
            xi,
            mu_s: ms,
            mu_p: mp,
            beta,
            delta,
            gamma,
            n_p,
            n_s,
            t_p,
            t_s,
            a: [a_ss, a_sp, a_ps, a_pp],
            b: [b_ss, -b_ss, -b_pp, b_pp],
        }
    }
}
