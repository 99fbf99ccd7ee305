//! Physical parameters and the medium-dependent spectral scalars.

use crate::error::{Error, Result};
use crate::scalar::Real;
use num_complex::Complex;

/// Isotropic elastic medium with unit density.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ElasticMedium<T: Real> {
    lambda: T,
    mu: T,
    omega: T,
}

impl<T: Real> ElasticMedium<T> {
    pub fn new(lambda: T, mu: T, omega: T) -> Result<Self> {
        let ok = |v: T| v.is_finite() && v > T::zero();
        if !ok(lambda) || !ok(mu) || !ok(omega) {
            return Err(Error::InvalidParameter(format!(
                "lambda, mu and omega must be finite and positive (got {lambda}, {mu}, {omega})"
            )));
        }
        Ok(ElasticMedium { lambda, mu, omega })
    }

    pub fn lambda(&self) -> T {
        self.lambda
    }
    pub fn mu(&self) -> T {
        self.mu
    }
    pub fn omega(&self) -> T {
        self.omega
    }
    pub fn rho(&self) -> T {
        T::one()
    }

    /// The same material at another frequency.
    pub fn with_omega(&self, omega: T) -> Result<Self> {
        Self::new(self.lambda, self.mu, omega)
    }

    /// P-wave modulus `λ + 2μ`.
    pub fn p_modulus(&self) -> T {
        self.lambda + T::lit(2.0) * self.mu
    }
}

/// Wavenumbers derived from an [`ElasticMedium`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WaveNumbers<T: Real> {
    pub k_p: T,
    pub k_s: T,
    pub kappa: T,
    pub k_r: T,
    /// Half gap `(k_R - k_s)/2`, the pole-window half width.
    pub d_r: T,
}

pub fn derive_wavenumbers<T: Real>(medium: &ElasticMedium<T>) -> WaveNumbers<T> {
    let k_p = medium.omega / medium.p_modulus().sqrt();
    let k_s = medium.omega / medium.mu.sqrt();
    let kappa = k_p / k_s;
    let k_r = rayleigh_root(k_p, k_s);
    WaveNumbers {
        k_p,
        k_s,
        kappa,
        k_r,
        d_r: (k_r - k_s) / T::lit(2.0),
    }
}

/// Rayleigh secular function in `t = (ξ/k_s)²`.
pub fn rayleigh_f<T: Real>(t: T, kappa: T) -> T {
    let two = T::lit(2.0);
    let a = two * t - T::one();
    a * a - T::lit(4.0) * t * (t - T::one()).sqrt() * (t - kappa * kappa).sqrt()
}

/// Upper end of the bracket that always contains the Rayleigh root.
pub fn rayleigh_bracket_top<T: Real>(kappa: T) -> T {
    let k2 = kappa * kappa;
    (T::lit(2.0) - k2) / (T::one() - k2)
}

fn rayleigh_root<T: Real>(k_p: T, k_s: T) -> T {
    let kappa = k_p / k_s;
    let mut lo = T::one();
    let mut hi = rayleigh_bracket_top(kappa);
    let tol = T::lit(1e-14).max(T::epsilon() * T::lit(4.0));
    for _ in 0..200 {
        let mid = (lo + hi) / T::lit(2.0);
        if rayleigh_f(mid, kappa) > T::zero() {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= tol * hi {
            break;
        }
    }
    let mut xi = ((lo + hi) / T::lit(2.0)).sqrt() * k_s;
    // one Newton step on δ itself
    let d = delta_real_beyond(xi, k_p, k_s);
    let dp = delta_prime_beyond(xi, k_p, k_s);
    if dp != T::zero() {
        let step = d / dp;
        if step.abs() < T::lit(1e-6) * xi {
            xi = xi - step;
        }
    }
    xi
}

fn delta_real_beyond<T: Real>(xi: T, k_p: T, k_s: T) -> T {
    let beta = k_s * k_s - T::lit(2.0) * xi * xi;
    let a = (xi * xi - k_s * k_s).sqrt();
    let b = (xi * xi - k_p * k_p).sqrt();
    beta * beta - T::lit(4.0) * xi * xi * a * b
}

fn delta_prime_beyond<T: Real>(xi: T, k_p: T, k_s: T) -> T {
    let ms = Complex::new(T::zero(), (xi * xi - k_s * k_s).sqrt());
    let mp = Complex::new(T::zero(), (xi * xi - k_p * k_p).sqrt());
    delta_prime_from(xi, k_s, ms, mp).re
}

fn delta_prime_from<T: Real>(xi: T, k_s: T, ms: Complex<T>, mp: Complex<T>) -> Complex<T> {
    let beta = k_s * k_s - T::lit(2.0) * xi * xi;
    let x3 = xi * xi * xi;
    -(Complex::new(T::lit(8.0) * xi * beta, T::zero())) + ms * mp * T::lit(8.0) * xi
        - (mp / ms + ms / mp) * T::lit(4.0) * x3
}

/// Vertical wavenumber `(k² - ξ²)^{1/2}` on the branch with non-negative imaginary part.
pub fn mu_alpha<T: Real>(xi: T, k: T) -> Complex<T> {
    let a = xi.abs();
    if a < k {
        Complex::new((k * k - xi * xi).sqrt(), T::zero())
    } else {
        Complex::new(T::zero(), (xi * xi - k * k).sqrt())
    }
}

impl<T: Real> WaveNumbers<T> {
    pub fn mu_s(&self, xi: T) -> Complex<T> {
        mu_alpha(xi, self.k_s)
    }

    pub fn mu_p(&self, xi: T) -> Complex<T> {
        mu_alpha(xi, self.k_p)
    }

    pub fn beta(&self, xi: T) -> T {
        self.k_s * self.k_s - T::lit(2.0) * xi * xi
    }

    pub fn delta(&self, xi: T) -> Complex<T> {
        let b = self.beta(xi);
        self.mu_s(xi) * self.mu_p(xi) * (T::lit(4.0) * xi * xi) + b * b
    }

    /// `dδ/dξ`; valid away from the branch points `±k_p`, `±k_s`.
    pub fn delta_prime(&self, xi: T) -> Complex<T> {
        delta_prime_from(xi, self.k_s, self.mu_s(xi), self.mu_p(xi))
    }

    pub fn gamma(&self, xi: T) -> Complex<T> {
        self.mu_s(xi) * self.mu_p(xi) + xi * xi
    }

    /// `δ₁(ξ) = δ(ξ)/(ξ² - k_R²)` on the pole band `|ξ| ∈ [k_R - d_R, k_R + d_R]`.
    pub fn delta_factor(&self, xi: T) -> Result<Complex<T>> {
        let a = xi.abs();
        let slack = T::lit(1e-12) * self.k_r;
        if a < self.k_r - self.d_r - slack || a > self.k_r + self.d_r + slack {
            return Err(Error::Domain(format!(
                "delta_factor needs |xi| within the Rayleigh band, got {xi}"
            )));
        }
        let den = xi * xi - self.k_r * self.k_r;
        if den.abs() <= T::lit(1e-9) * self.k_r * self.k_r {
            // removable point, first-order expansion about ±k_R
            let s = xi.signum();
            let root = s * self.k_r;
            let d0 = self.delta_prime(root) / (T::lit(2.0) * root);
            let h = xi - root;
            let d2 = self.delta_second_numeric(root);
            let corr = (d2 / T::lit(2.0) - d0) / (T::lit(2.0) * root);
            return Ok(d0 + corr * h);
        }
        Ok(self.delta(xi) / den)
    }

    fn delta_second_numeric(&self, xi: T) -> Complex<T> {
        let h = T::lit(1e-4) * self.k_s;
        (self.delta_prime(xi + h) - self.delta_prime(xi - h)) / (T::lit(2.0) * h)
    }

    /// Root residual `|δ(k_R)| / k_s⁴`.
    pub fn root_residual(&self) -> T {
        self.delta(self.k_r).norm() / self.k_s.powi(4)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn default_medium() -> ElasticMedium<f64> {
        ElasticMedium::new(0.5, 0.25, 2.0 * PI).unwrap()
    }

    /// Rayleigh speed ratio from the classical cubic in η = (c_R/c_s)², solved
    /// by plain bisection on (0, 1).
    fn cubic_oracle(kappa: f64) -> f64 {
        let k2 = kappa * kappa;
        let g = |e: f64| e * e * e - 8.0 * e * e + 8.0 * (3.0 - 2.0 * k2) * e - 16.0 * (1.0 - k2);
        let (mut lo, mut hi) = (1e-9, 1.0 - 1e-15);
        for _ in 0..200 {
            let m = 0.5 * (lo + hi);
            if g(lo) * g(m) <= 0.0 {
                hi = m;
            } else {
                lo = m;
            }
        }
        1.0 / (0.5 * (lo + hi)).sqrt()
    }

    #[test]
    fn wavenumbers_default() {
        let w = derive_wavenumbers(&default_medium());
        assert!((w.k_p - 2.0 * PI).abs() < 1e-14);
        assert!((w.k_s - 4.0 * PI).abs() < 1e-14);
        assert!((w.kappa - 0.5).abs() < 1e-15);
    }

    #[test]
    fn wavenumbers_unit() {
        let w = derive_wavenumbers(&ElasticMedium::new(1.0, 1.0, 1.0).unwrap());
        assert!((w.k_p - 1.0 / 3f64.sqrt()).abs() < 1e-15);
        assert!((w.k_s - 1.0).abs() < 1e-15);
        assert!((w.kappa - 1.0 / 3f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn rayleigh_ratio_matches_cubic() {
        let w = derive_wavenumbers(&default_medium());
        let r = w.k_r / w.k_s;
        assert!((r - cubic_oracle(0.5)).abs() < 1e-10, "{r}");
        assert!((r - 1.0724).abs() < 1e-4);
        assert!(w.root_residual() < 1e-10);
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(ElasticMedium::new(0.0, 1.0, 1.0).is_err());
        assert!(ElasticMedium::new(1.0, -1.0, 1.0).is_err());
        assert!(ElasticMedium::new(1.0, 1.0, f64::NAN).is_err());
    }

    #[test]
    fn mu_alpha_branches() {
        assert_eq!(mu_alpha(0.0, 2.0), Complex::new(2.0, 0.0));
        let z = mu_alpha(2.0, 1.0);
        assert!(z.re == 0.0 && (z.im - 3f64.sqrt()).abs() < 1e-15);
        assert_eq!(mu_alpha(1.5, 1.5), Complex::new(0.0, 0.0));
    }

    #[test]
    fn delta_values() {
        let w = derive_wavenumbers(&default_medium());
        let ks4 = w.k_s.powi(4);
        assert!((w.delta(0.0) - ks4).norm() < 1e-12 * ks4);
        assert!((w.delta(w.k_s) - ks4).norm() < 1e-12 * ks4);
        assert!(w.delta(w.k_r).norm() < 1e-10 * ks4);
    }

    #[test]
    fn delta_factor_band() {
        let w = derive_wavenumbers(&default_medium());
        let at_root = w.delta_factor(w.k_r).unwrap();
        let expect = w.delta_prime(w.k_r) / (2.0 * w.k_r);
        assert!((at_root - expect).norm() < 1e-9 * expect.norm());
        for s in [-0.5, 0.5] {
            let v = w.delta_factor(w.k_r + s * w.d_r).unwrap();
            assert!(v.norm() >= 0.1 * w.k_s * w.k_s);
        }
        for i in 0..20 {
            let xi = w.k_r - w.d_r + 2.0 * w.d_r * (i as f64 + 0.37) / 20.0;
            let lhs = w.delta_factor(xi).unwrap() * (xi * xi - w.k_r * w.k_r);
            let rhs = w.delta(xi);
            assert!((lhs - rhs).norm() <= 1e-12 * rhs.norm().max(1e-3 * w.k_s.powi(4)));
        }
        assert!(w.delta_factor(w.k_s).is_err());
    }

    #[test]
    fn delta_factor_continuous_through_root() {
        let w = derive_wavenumbers(&default_medium());
        let a = w.delta_factor(w.k_r).unwrap();
        let b = w.delta_factor(w.k_r + 1e-6).unwrap();
        assert!((a - b).norm() < 1e-6 * a.norm());
    }

    #[test]
    fn gamma_values() {
        let w = derive_wavenumbers(&default_medium());
        assert!((w.gamma(0.0).re - w.k_s * w.k_p).abs() < 1e-12);
        let xi = 2.0 * w.k_s;
        let expect = 4.0 * w.k_s * w.k_s
            - (3.0 * w.k_s * w.k_s).sqrt() * (4.0 * w.k_s * w.k_s - w.k_p * w.k_p).sqrt();
        assert!((w.gamma(xi).re - expect).abs() < 1e-10 && expect > 0.0);
        for i in 0..100 {
            let xi = w.k_s * 10f64.powf(-3.0 + 4.0 * i as f64 / 99.0);
            assert!(w.gamma(xi).norm() > 0.0);
        }
    }

    #[test]
    fn single_precision_root() {
        let m = ElasticMedium::<f32>::new(0.5, 0.25, 2.0 * std::f32::consts::PI).unwrap();
        let w = derive_wavenumbers(&m);
        assert!((w.k_r / w.k_s - 1.0724).abs() < 1e-3);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn delta_gamma_even(xi in -60.0f64..60.0) {
                let w = derive_wavenumbers(&default_medium());
                prop_assert!((w.delta(xi) - w.delta(-xi)).norm() <= 1e-12 * w.delta(xi).norm().max(1.0));
                prop_assert!((w.gamma(xi) - w.gamma(-xi)).norm() <= 1e-12 * w.gamma(xi).norm().max(1.0));
            }

            #[test]
            fn delta_real_and_bounded_beyond_ks(s in 0.0f64..4.0) {
                let w = derive_wavenumbers(&default_medium());
                let xi = w.k_s * (1.0 + s);
                let d = w.delta(xi);
                prop_assert!(d.im.abs() <= 1e-12 * d.norm().max(1.0));
                if xi >= w.k_r {
                    // the slope of f(t) tends to -2(1-κ²), so that is the usable constant
                    let c = 2.0 * (1.0 - w.kappa * w.kappa);
                    let bound = c * w.k_s * w.k_s * (xi * xi - w.k_r * w.k_r);
                    prop_assert!(d.re.abs() + 1e-9 * w.k_s.powi(4) >= bound);
                }
            }

            #[test]
            fn bracket_has_sign_change(kappa in 0.05f64..0.7) {
                prop_assert!(rayleigh_f(1.0, kappa) > 0.0);
                prop_assert!(rayleigh_f(rayleigh_bracket_top(kappa), kappa) < 0.0);
            }
        }
    }
}
