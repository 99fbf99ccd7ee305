//! Self-checks of the Green engine and PSF against known identities.

use crate::error::Result;
use crate::green::{traction_tensor, GreenEngine};
use crate::psf::psf_f;
use crate::quadrature::{pv_integrate, sokhotski_limit_check, Side};
use crate::{ElasticMedium, PoleSpec, Tensor2C, ToleranceSpec, WaveNumbers, C64};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;
use std::fmt;

#[derive(Clone, Debug, PartialEq)]
pub struct CheckResult {
    pub name: &'static str,
    pub measured: f64,
    pub threshold: f64,
    pub passed: bool,
    pub detail: String,
}

impl CheckResult {
    fn at_most(name: &'static str, measured: f64, threshold: f64) -> Self {
        let passed = measured.is_finite() && measured <= threshold;
        CheckResult { name, measured, threshold, passed, detail: format!("measured {measured:.3e} <= {threshold:.3e}") }
    }

    fn at_least(name: &'static str, measured: f64, threshold: f64) -> Self {
        let passed = measured.is_finite() && measured >= threshold;
        CheckResult { name, measured, threshold, passed, detail: format!("measured {measured:.6e} >= {threshold:.6e}") }
    }

    fn within(name: &'static str, measured: f64, lo: f64, hi: f64) -> Self {
        let passed = measured >= lo && measured <= hi;
        CheckResult { name, measured, threshold: hi, passed, detail: format!("measured {measured:.4} in [{lo}, {hi}]") }
    }

    fn failed(name: &'static str, err: crate::Error) -> Self {
        CheckResult { name, measured: f64::NAN, threshold: f64::NAN, passed: false, detail: format!("error: {err}") }
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct ValidationReport {
    pub checks: Vec<CheckResult>,
}

impl ValidationReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckResult> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            writeln!(f, "{} {}: {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail)?;
        }
        Ok(())
    }
}

fn rel(a: &Tensor2C, b: &Tensor2C) -> f64 {
    (*a - *b).norm() / b.norm()
}

/// `|δ(k_R)|/k_s⁴` for the given wavenumbers.
pub fn check_rayleigh(wn: &WaveNumbers) -> CheckResult {
    let r = wn.delta(wn.k_r).norm() / wn.k_s.powi(4);
    let mut c = CheckResult::at_most("rayleigh-root residual", r, 1e-10);
    if !(wn.k_r > wn.k_s) {
        c.passed = false;
        c.detail.push_str(&format!("; k_R = {} not above k_s = {}", wn.k_r, wn.k_s));
    }
    c
}

/// Boundary value of the Cauchy integral of `γ ≡ 1` and a log principal value.
pub fn check_sokhotski() -> Vec<CheckResult> {
    let tol = ToleranceSpec::default();
    let one = |_t: f64| C64::new(1.0, 0.0);
    let a = match sokhotski_limit_check(one, -1.0, 1.0, 0.0, Side::Plus, &tol) {
        Ok(v) => CheckResult::at_most("sokhotski-plemelj limit", (v - C64::new(0.0, PI)).norm(), 1e-8),
        Err(e) => CheckResult::failed("sokhotski-plemelj limit", e),
    };
    let pole = PoleSpec { location: 0.3, residue_factor: C64::new(1.0, 0.0) };
    let b = match pv_integrate(|t| C64::new(1.0 / (t - 0.3), 0.0), -1.0, 1.0, &[pole], &tol) {
        Ok(v) => CheckResult::at_most("principal value 1/(t-0.3)", (v - C64::new((0.7f64 / 1.3).ln(), 0.0)).norm(), 1e-8),
        Err(e) => CheckResult::failed("principal value 1/(t-0.3)", e),
    };
    vec![a, b]
}

/// `max ‖N(x,y) − N(y,x)ᵀ‖/‖N(x,y)‖` over seeded interior pairs.
pub fn check_reciprocity(engine: &GreenEngine, seed: u64, pairs: usize) -> CheckResult {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    for _ in 0..pairs {
        let x = [rng.gen_range(-3.0..3.0), rng.gen_range(0.5..4.0)];
        let y = [rng.gen_range(-3.0..3.0), rng.gen_range(0.5..4.0)];
        let r = engine.neumann_green(x, y).and_then(|a| Ok(rel(&engine.neumann_green(y, x)?.transpose(), &a)));
        match r {
            Ok(v) => worst = worst.max(v),
            Err(e) => return CheckResult::failed("reciprocity", e),
        }
    }
    CheckResult::at_most("reciprocity", worst, 1e-6)
}

/// Fourth-order difference stencil with one Richardson level.
fn richardson<F: Fn(f64) -> Result<Tensor2C>>(f: F, h: f64, one_sided: bool) -> Result<Tensor2C> {
    let d = |h: f64| -> Result<Tensor2C> {
        if one_sided {
            Ok((f(0.0)?.scale_re(-25.0) + f(h)?.scale_re(48.0) - f(2.0 * h)?.scale_re(36.0) + f(3.0 * h)?.scale_re(16.0)
                - f(4.0 * h)?.scale_re(3.0))
            .scale_re(1.0 / (12.0 * h)))
        } else {
            Ok((f(-2.0 * h)? - f(-h)?.scale_re(8.0) + f(h)?.scale_re(8.0) - f(2.0 * h)?).scale_re(1.0 / (12.0 * h)))
        }
    };
    let (a, b) = (d(h)?, d(h / 2.0)?);
    let k = if one_sided { 32.0 } else { 16.0 };
    Ok((b.scale_re(k) - a).scale_re(1.0 / (k - 1.0)))
}

/// Surface traction of `N(·,y)` from finite differences, relative to the
/// gradient size, worst over five source positions.
pub fn check_traction_free(engine: &GreenEngine) -> CheckResult {
    let cases = [([3.0, 0.0], [0.0, 1.0]), ([0.5, 0.0], [0.0, 2.0]), ([-1.3, 0.0], [0.4, 0.7]), ([2.0, 0.0], [-1.0, 3.0]), ([0.0, 0.0], [0.2, 1.5])];
    let h = 0.02 * PI / engine.wavenumbers().k_s;
    let mut worst: f64 = 0.0;
    for (x, y) in cases {
        let g = richardson(|t| engine.neumann_green([x[0] + t, 0.0], y), h, false)
            .and_then(|g1| Ok([g1, richardson(|t| engine.neumann_green([x[0], t], y), h, true)?]));
        match g {
            Ok(g) => {
                let t = traction_tensor(engine.medium(), &g, [0.0, 1.0]);
                worst = worst.max(t.norm() / (g[0].norm() + g[1].norm()));
            }
            Err(e) => return CheckResult::failed("traction-free surface", e),
        }
    }
    CheckResult::at_most("traction-free surface", worst, 1e-3)
}

/// Error ratio of the damped tensor between `ε = 1e-3` and `1e-4` at
/// `(x₁ − y₁, y₂) = (3, 10)`; first-order convergence gives about 10.
pub fn check_limiting_absorption(engine: &GreenEngine) -> CheckResult {
    let (x, y) = ([3.0, 0.0], [0.0, 10.0]);
    let r = engine.neumann_green(x, y).and_then(|n| {
        let e3 = rel(&engine.neumann_green_complex_freq(x, y, 1e-3)?, &n);
        let e4 = rel(&engine.neumann_green_complex_freq(x, y, 1e-4)?, &n);
        Ok(e3 / e4)
    });
    match r {
        Ok(v) => CheckResult::within("limiting absorption", v, 7.0, 13.0),
        Err(e) => CheckResult::failed("limiting absorption", e),
    }
}

/// Lower bound on `−Im F_ii(y, y)` and symmetry of `F`.
pub fn check_psf_bound(engine: &GreenEngine) -> Vec<CheckResult> {
    let y = [0.0, 10.0];
    let f = match psf_f(engine, y, y) {
        Ok(f) => f,
        Err(e) => return vec![CheckResult::failed("psf lower bound", e)],
    };
    let bound = 1.0 / (4.0 * engine.medium().p_modulus());
    let low = (-f.m[0][0].im).min(-f.m[1][1].im);
    let off = f.m[0][1].im.abs().max(f.m[1][0].im.abs()) / f.norm();
    let sym = (f - f.transpose()).norm() / f.norm();
    vec![
        CheckResult::at_least("psf lower bound", low, bound),
        CheckResult::at_most("psf off-diagonal imaginary part", off, 1e-8),
        CheckResult::at_most("psf symmetry", sym, 1e-8),
    ]
}

/// Every check for `medium`, with the wavenumbers it derives.
pub fn run_validation(medium: &ElasticMedium) -> ValidationReport {
    run_validation_with(medium, None)
}

/// As [`run_validation`], optionally replacing the Rayleigh wavenumber used by
/// the root-residual check.
pub fn run_validation_with(medium: &ElasticMedium, k_r: Option<f64>) -> ValidationReport {
    let engine = GreenEngine::new(medium);
    let mut wn = *engine.wavenumbers();
    if let Some(k) = k_r {
        wn.k_r = k;
    }
    let mut checks = vec![check_rayleigh(&wn)];
    checks.extend(check_sokhotski());
    checks.push(check_reciprocity(&engine, 11, 10));
    checks.push(check_traction_free(&engine));
    checks.push(check_limiting_absorption(&engine));
    checks.extend(check_psf_bound(&engine));
    ValidationReport { checks }
}
