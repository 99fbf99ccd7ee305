//! Green tensors of the traction-free elastic half plane `x₂ > 0`.
//!
//! [`GreenEngine`] evaluates single tensors with adaptive quadrature; the
//! fixed-node [`FourierTable`]s serve the many-evaluation loops of the solver
//! and the imaging code.

pub mod axis;
pub mod fullspace;
pub mod separable;
pub mod spectral;

pub use axis::{FourierTable, NodeSet};
pub use fullspace::FullSpace;
pub use spectral::{Deriv, SpectralMedium, SpectralPieces};

use crate::error::{Error, Result};
use crate::{ElasticMedium, Tensor2C, ToleranceSpec, WaveNumbers, C64};
use dashmap::DashMap;
use std::f64::consts::PI;

const I: C64 = C64 { re: 0.0, im: 1.0 };

fn to4(t: Tensor2C) -> [C64; 4] {
    t.to_array()
}

fn check_point(p: [f64; 2], name: &str) -> Result<()> {
    if !(p[0].is_finite() && p[1].is_finite()) {
        return Err(Error::InvalidParameter(format!("{name} is not finite")));
    }
    Ok(())
}

/// Adaptive evaluator for the half-space Green tensors of one medium.
#[derive(Clone, Debug)]
pub struct GreenEngine {
    medium: ElasticMedium,
    sm: SpectralMedium,
    fs: FullSpace,
    tol: ToleranceSpec,
}

impl GreenEngine {
    pub fn new(medium: &ElasticMedium) -> Self {
        GreenEngine {
            medium: *medium,
            sm: SpectralMedium::new(medium),
            fs: FullSpace::new(medium),
            tol: ToleranceSpec::new(1e-10, 1e-13, 400_000).expect("valid default tolerance"),
        }
    }

    pub fn with_tolerance(mut self, tol: ToleranceSpec) -> Self {
        self.tol = tol;
        self
    }

    pub fn medium(&self) -> &ElasticMedium {
        &self.medium
    }

    pub fn wavenumbers(&self) -> &WaveNumbers {
        &self.sm.wn
    }

    pub fn spectral(&self) -> &SpectralMedium {
        &self.sm
    }

    pub fn fullspace(&self) -> &FullSpace {
        &self.fs
    }

    pub fn tolerance(&self) -> &ToleranceSpec {
        &self.tol
    }

    pub fn spectral_pieces(&self, xi: f64) -> SpectralPieces {
        self.sm.pieces(xi)
    }

    pub fn spectral_fullspace(&self, xi: f64, x2: f64, y2: f64) -> Result<Tensor2C> {
        self.sm.fullspace_hat(xi, x2, y2)
    }

    pub fn spectral_neumann_bulk(&self, xi: f64, x2: f64, y2: f64) -> Result<Tensor2C> {
        if !(x2 > 0.0 && y2 > 0.0) {
            return Err(Error::Domain("bulk spectral tensor needs x2 > 0 and y2 > 0".into()));
        }
        self.sm.neumann_bulk_hat(xi, x2, y2)
    }

    pub fn spectral_neumann_surface(&self, xi: f64, y2: f64) -> Result<Tensor2C> {
        self.sm.neumann_surface_hat(xi, y2)
    }

    /// Closed-form full-space tensor `G(x, y)`.
    pub fn fullspace_green(&self, x: [f64; 2], y: [f64; 2]) -> Result<Tensor2C> {
        check_point(x, "x")?;
        check_point(y, "y")?;
        if x == y {
            return Err(Error::Domain("fullspace_green: x == y".into()));
        }
        Ok(self.fs.green(x, y))
    }

    /// Inverse Fourier transform of the spectral full-space tensor (slow reference).
    pub fn fullspace_green_spectral(&self, x: [f64; 2], y: [f64; 2]) -> Result<Tensor2C> {
        let (x2, y2) = (x[1], y[1]);
        if x2 == y2 {
            return Err(Error::Domain("spectral full-space inversion needs x2 != y2".into()));
        }
        let xx = x[0] - y[0];
        let f = |xi: f64| to4(self.sm.fullspace_hat_d(xi, x2, y2, Deriv::None).scale(phase(xx, xi) / (2.0 * PI)));
        let v = axis::fourier_adaptive::<4, _, fn(f64) -> [C64; 4]>(
            &self.sm.wn,
            xx,
            (x2 - y2).abs(),
            &f,
            None,
            &self.tol,
            "fullspace_green_spectral",
        )?;
        Ok(Tensor2C::from_array(v))
    }

    /// Half-space Neumann tensor `N(x, y)` with `x₂ ≥ 0`, `y₂ > 0`.
    pub fn neumann_green(&self, x: [f64; 2], y: [f64; 2]) -> Result<Tensor2C> {
        validate_pair(x, y)?;
        if x[1] == 0.0 {
            return self.neumann_surface(x[0] - y[0], y[1]);
        }
        let y_img = [y[0], -y[1]];
        let c = self.correction(x, y, Deriv::None)?;
        Ok(self.fs.green(x, y) - self.fs.green(x, y_img) + c)
    }

    /// Surface form `N((x₁,0), y)` as a function of the offset `x₁ − y₁`.
    pub fn neumann_surface(&self, offset: f64, y2: f64) -> Result<Tensor2C> {
        if !(y2 > 0.0) {
            return Err(Error::Domain("source depth must be positive".into()));
        }
        let sm = &self.sm;
        let f = |xi: f64| {
            let d = sm.pieces(xi).delta;
            to4(sm.surface_numerator(xi, y2, Deriv::None).scale(phase(offset, xi) / (2.0 * PI * d)))
        };
        let r = |xi: f64| {
            to4(sm.surface_numerator(xi, y2, Deriv::None).scale(phase(offset, xi) / (2.0 * PI * sm.delta_prime(xi))))
        };
        let v = axis::fourier_adaptive(&sm.wn, offset, y2, &f, Some((&r, 1.0)), &self.tol, "neumann_green (surface)")?;
        Ok(Tensor2C::from_array(v))
    }

    /// The pole bracket of the surface form alone, `iπ(r(k_R) − r(−k_R))`.
    pub fn residue_bracket_surface(&self, offset: f64, y2: f64) -> Tensor2C {
        let sm = &self.sm;
        let r = |xi: f64| {
            sm.surface_numerator(xi, y2, Deriv::None)
                .scale(phase(offset, xi) / (2.0 * PI * sm.delta_prime(xi)))
        };
        (r(sm.wn.k_r) - r(-sm.wn.k_r)).scale(I * PI)
    }

    /// Reflected correction `C(x, y)` (spectral `A`-term plus bracket), or a
    /// derivative of it in the field point.
    fn correction(&self, x: [f64; 2], y: [f64; 2], dx: Deriv) -> Result<Tensor2C> {
        let v = self.correction_multi::<4>(x, y, &[dx])?;
        Ok(Tensor2C::from_array(v))
    }

    fn correction_multi<const N: usize>(&self, x: [f64; 2], y: [f64; 2], ds: &[Deriv]) -> Result<[C64; N]> {
        debug_assert_eq!(4 * ds.len(), N);
        let sm = &self.sm;
        let xx = x[0] - y[0];
        let (x2, y2) = (x[1], y[1]);
        let build = |xi: f64, denom: C64| {
            let mut out = [C64::new(0.0, 0.0); N];
            let ph = phase(xx, xi) / (2.0 * PI * denom);
            for (k, d) in ds.iter().enumerate() {
                let t = sm.correction_numerator(xi, x2, y2, *d, Deriv::None).scale(ph);
                out[4 * k..4 * k + 4].copy_from_slice(&t.to_array());
            }
            out
        };
        let f = |xi: f64| build(xi, sm.pieces(xi).delta);
        let r = |xi: f64| build(xi, sm.delta_prime(xi));
        axis::fourier_adaptive(&sm.wn, xx, x2 + y2, &f, Some((&r, 1.0)), &self.tol, "neumann_green (bulk correction)")
    }

    /// `[∂N/∂x₁, ∂N/∂x₂]` at a field point with `x₂ ≥ 0`.
    pub fn neumann_green_grad(&self, x: [f64; 2], y: [f64; 2]) -> Result<[Tensor2C; 2]> {
        validate_pair(x, y)?;
        let y_img = [y[0], -y[1]];
        let c = self.correction_multi::<8>(x, y, &[Deriv::D1, Deriv::D2])?;
        let g = self.fs.gradient(x, y);
        let gi = self.fs.gradient(x, y_img);
        let c1 = Tensor2C::from_array([c[0], c[1], c[2], c[3]]);
        let c2 = Tensor2C::from_array([c[4], c[5], c[6], c[7]]);
        Ok([g[0] - gi[0] + c1, g[1] - gi[1] + c2])
    }

    /// Traction `σ(N(·,y)q)(x)·ν`.
    pub fn neumann_green_stress(&self, x: [f64; 2], normal: [f64; 2], y: [f64; 2], q: [C64; 2]) -> Result<[C64; 2]> {
        let g = self.neumann_green_grad(x, y)?;
        Ok(stress_from_gradient(&self.medium, &g, normal, q))
    }

    /// Damped reference `N_ε`: frequency `ω(1+iε)`, plain inversion of the full
    /// bulk spectral tensor.
    pub fn neumann_green_complex_freq(&self, x: [f64; 2], y: [f64; 2], eps: f64) -> Result<Tensor2C> {
        if !(eps > 0.0) {
            return Err(Error::InvalidParameter("eps must be positive".into()));
        }
        validate_pair(x, y)?;
        let (x2, y2) = (x[1], y[1]);
        if x2 == y2 {
            return Err(Error::Domain("complex-frequency inversion needs x2 != y2".into()));
        }
        let sm = SpectralMedium::damped(&self.medium, eps);
        let xx = x[0] - y[0];
        let f = |xi: f64| {
            let t = sm.neumann_bulk_hat(xi, x2, y2).unwrap_or_else(|_| Tensor2C::zero());
            to4(t.scale(phase(xx, xi) / (2.0 * PI)))
        };
        let depth = (x2 - y2).abs().min(x2 + y2);
        let v = axis::fourier_adaptive::<4, _, fn(f64) -> [C64; 4]>(
            &self.sm.wn,
            xx,
            depth,
            &f,
            None,
            &self.tol,
            "neumann_green_complex_freq",
        )?;
        Ok(Tensor2C::from_array(v))
    }

    /// Surface traction `T_D(x, z)` of the Dirichlet tensor, `x ∈ Γ₀`.
    pub fn dirichlet_traction(&self, x: [f64; 2], z: [f64; 2]) -> Result<Tensor2C> {
        check_point(x, "x")?;
        check_point(z, "z")?;
        if !(z[1] > 0.0) {
            return Err(Error::Domain("dirichlet_traction needs z2 > 0".into()));
        }
        if x[1] != 0.0 {
            return Err(Error::Domain("dirichlet_traction needs x on the surface".into()));
        }
        let sm = &self.sm;
        let xx = x[0] - z[0];
        let z2 = z[1];
        let f = |xi: f64| to4(sm.dirichlet_traction_hat(xi, z2).scale(phase(xx, xi) / (2.0 * PI)));
        let v = axis::fourier_adaptive::<4, _, fn(f64) -> [C64; 4]>(&sm.wn, xx, z2, &f, None, &self.tol, "dirichlet_traction")?;
        Ok(Tensor2C::from_array(v))
    }

    /// Fixed-node table of `T_D((x₁,0), (z₁,z₂))` in the offset `x₁ − z₁`.
    pub fn dirichlet_traction_table(&self, x_max: f64, z2: f64) -> Result<FourierTable<1>> {
        let nodes = NodeSet::new(&self.sm.wn, x_max, z2, z2, false)?;
        let sm = self.sm;
        Ok(FourierTable::build(
            &nodes,
            sm.wn.k_r,
            move |xi| [sm.dirichlet_traction_hat(xi, z2)],
            None::<(fn(f64) -> [Tensor2C; 1], f64)>,
        ))
    }

    /// Fixed-node table of the surface tensor `N((x₁,0), (y₁,y₂))` and its
    /// `y₁`, `y₂` derivatives, in the offset `x₁ − y₁`.
    pub fn surface_table(&self, x_max: f64, y2: f64) -> Result<FourierTable<3>> {
        let nodes = NodeSet::new(&self.sm.wn, x_max, y2, y2, true)?;
        let sm = self.sm;
        let num = move |xi: f64| {
            [
                sm.surface_numerator(xi, y2, Deriv::None),
                sm.surface_numerator(xi, y2, Deriv::D1),
                sm.surface_numerator(xi, y2, Deriv::D2),
            ]
        };
        Ok(FourierTable::build(
            &nodes,
            sm.wn.k_r,
            move |xi| {
                let d = 1.0 / sm.pieces(xi).delta;
                num(xi).map(|t| t.scale(d))
            },
            Some((
                move |xi: f64| {
                    let d = 1.0 / sm.delta_prime(xi);
                    num(xi).map(|t| t.scale(d))
                },
                1.0,
            )),
        ))
    }
}

fn phase(x: f64, xi: f64) -> C64 {
    let (s, c) = (x * xi).sin_cos();
    C64::new(c, s)
}

fn validate_pair(x: [f64; 2], y: [f64; 2]) -> Result<()> {
    check_point(x, "x")?;
    check_point(y, "y")?;
    if !(y[1] > 0.0) {
        return Err(Error::Domain("source point must satisfy y2 > 0".into()));
    }
    if x[1] < 0.0 {
        return Err(Error::Domain("field point must satisfy x2 >= 0".into()));
    }
    if x == y {
        return Err(Error::Domain("x == y".into()));
    }
    Ok(())
}

/// Traction `σ(u)ν` of `u = N q` from `[∂N/∂x₁, ∂N/∂x₂]`.
pub fn stress_from_gradient(m: &ElasticMedium, g: &[Tensor2C; 2], nu: [f64; 2], q: [C64; 2]) -> [C64; 2] {
    // du[k][i] = ∂u_i/∂x_k
    let du = [g[0].mul_vec(q), g[1].mul_vec(q)];
    let div = du[0][0] + du[1][1];
    let mut t = [C64::new(0.0, 0.0); 2];
    for (i, ti) in t.iter_mut().enumerate() {
        let mut s = div * m.lambda() * nu[i];
        for k in 0..2 {
            s += (du[k][i] + du[i][k]) * m.mu() * nu[k];
        }
        *ti = s;
    }
    t
}

/// Traction tensor `σ(N·)ν` whose column j is the traction of `N e_j`.
pub fn traction_tensor(m: &ElasticMedium, g: &[Tensor2C; 2], nu: [f64; 2]) -> Tensor2C {
    let one = C64::new(1.0, 0.0);
    let zero = C64::new(0.0, 0.0);
    let a = stress_from_gradient(m, g, nu, [one, zero]);
    let b = stress_from_gradient(m, g, nu, [zero, one]);
    Tensor2C::new(a[0], b[0], a[1], b[1])
}

fn quantize(v: f64) -> u64 {
    const DROP: u32 = 12;
    let bits = v.to_bits();
    let half = 1u64 << (DROP - 1);
    (bits.wrapping_add(half)) & !((1u64 << DROP) - 1)
}

/// Memo table for Neumann tensor evaluations keyed by the quantized
/// `(x₁ − y₁, x₂, y₂)`. Evaluations always use the quantized coordinates so a
/// hit is bit-identical to a fresh computation.
#[derive(Default, Debug)]
pub struct GreenCache {
    map: DashMap<[u64; 3], Tensor2C>,
}

impl GreenCache {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    pub fn neumann_green(&self, engine: &GreenEngine, x: [f64; 2], y: [f64; 2]) -> Result<Tensor2C> {
        let key = [quantize(x[0] - y[0]), quantize(x[1]), quantize(y[1])];
        if let Some(v) = self.map.get(&key) {
            return Ok(*v);
        }
        let off = f64::from_bits(key[0]);
        let v = engine.neumann_green([off, f64::from_bits(key[1])], [0.0, f64::from_bits(key[2])])?;
        Ok(*self.map.entry(key).or_insert(v))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn engine() -> GreenEngine {
        GreenEngine::new(&ElasticMedium::new(0.5, 0.25, 2.0 * PI).unwrap())
    }

    fn rel(a: &Tensor2C, b: &Tensor2C) -> f64 {
        (*a - *b).norm() / b.norm()
    }

    #[test]
    fn closed_form_matches_spectral_inversion() {
        let e = engine();
        let y = [0.0, 3.0];
        let a = 30f64.to_radians();
        let x = [a.cos(), 3.0 + a.sin()];
        let c = e.fullspace_green(x, y).unwrap();
        let s = e.fullspace_green_spectral(x, y).unwrap();
        assert!(rel(&s, &c) < 1e-6, "{}", rel(&s, &c));
    }

    #[test]
    fn surface_form_matches_bulk_limit() {
        let e = engine();
        let y = [0.4, 1.3];
        let s = e.neumann_green([-0.8, 0.0], y).unwrap();
        let b = e.neumann_green([-0.8, 1e-9], y).unwrap();
        assert!(rel(&b, &s) < 1e-7, "{}", rel(&b, &s));
    }

    #[test]
    fn bracket_sign_agrees_with_damping() {
        // shallow source so the Rayleigh contribution is visible
        let e = engine();
        let x = [1.5, 0.0];
        let y = [0.0, 0.6];
        let n = e.neumann_green(x, y).unwrap();
        let ne = e.neumann_green_complex_freq(x, y, 1e-4).unwrap();
        let br = e.residue_bracket_surface(1.5, 0.6);
        assert!(br.norm() > 0.1 * n.norm());
        assert!(rel(&ne, &n) < 1e-2, "{}", rel(&ne, &n));
    }

    #[test]
    fn cache_hits_are_identical() {
        let e = engine();
        let c = GreenCache::new();
        let a = c.neumann_green(&e, [0.3, 0.0], [0.0, 2.0]).unwrap();
        let b = c.neumann_green(&e, [0.3, 0.0], [0.0, 2.0]).unwrap();
        assert_eq!(a, b);
        assert_eq!(c.len(), 1);
    }

    #[test]
    fn surface_table_matches_adaptive() {
        let e = engine();
        let t = e.surface_table(6.0, 1.1).unwrap();
        for x in [-6.0, -1.0, 0.0, 2.5] {
            let a = e.neumann_surface(x, 1.1).unwrap();
            let b = t.eval(x)[0];
            assert!(rel(&b, &a) < 1e-8, "x={x}: {}", rel(&b, &a));
        }
    }

    #[test]
    fn traction_table_matches_adaptive() {
        let e = engine();
        let t = e.dirichlet_traction_table(12.0, 2.0).unwrap();
        for x in [-12.0, 0.0, 4.5] {
            let a = e.dirichlet_traction([x, 0.0], [0.0, 2.0]).unwrap();
            let b = t.eval(x)[0];
            assert!(rel(&b, &a) < 1e-8, "x={x}: {}", rel(&b, &a));
        }
    }
}
