//! Bessel functions of the first and second kind, orders 0–2, real argument.

use std::f64::consts::PI;

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;
const SERIES_LIMIT: f64 = 14.0;

/// `J_n(x)` and `Y_n(x)` for `n = 0, 1, 2` at one argument.
#[derive(Clone, Copy, Debug)]
pub struct BesselSet {
    pub j: [f64; 3],
    pub y: [f64; 3],
}

impl BesselSet {
    /// `J₂'(x) = J₁(x) - 2 J₂(x)/x`.
    pub fn j2_prime(&self, x: f64) -> f64 {
        self.j[1] - 2.0 * self.j[2] / x
    }
}

pub fn bessel_set(x: f64) -> BesselSet {
    assert!(x > 0.0, "Bessel argument must be positive");
    if x < SERIES_LIMIT {
        series(x)
    } else {
        asymptotic(x)
    }
}

pub fn j0(x: f64) -> f64 {
    if x == 0.0 {
        return 1.0;
    }
    bessel_set(x.abs()).j[0]
}

pub fn j1(x: f64) -> f64 {
    if x == 0.0 {
        return 0.0;
    }
    x.signum() * bessel_set(x.abs()).j[1]
}

pub fn y0(x: f64) -> f64 {
    bessel_set(x).y[0]
}

pub fn y1(x: f64) -> f64 {
    bessel_set(x).y[1]
}

/// Miller backward recurrence with the normalisation `J₀ + 2ΣJ₂ₖ = 1`, then
/// Neumann series for `Y₀` and its derivative for `Y₁`.
fn series(x: f64) -> BesselSet {
    let top = 2 * (((x + 40.0) / 2.0).ceil() as usize);
    let mut jn = [0.0f64; 64];
    jn[top] = 1e-300;
    for n in (1..=top).rev() {
        jn[n - 1] = 2.0 * n as f64 / x * jn[n] - jn[n + 1];
        if jn[n - 1].abs() > 1e250 {
            for v in jn.iter_mut().skip(n - 1) {
                *v *= 1e-250;
            }
        }
    }
    let mut norm = jn[0];
    for k in (2..=top).step_by(2) {
        norm += 2.0 * jn[k];
    }
    for v in jn.iter_mut() {
        *v /= norm;
    }
    let lg = (x / 2.0).ln() + EULER_GAMMA;
    let mut s0 = 0.0;
    let mut s1 = 0.0;
    let mut sign = -1.0;
    for k in 1..=(top / 2 - 1) {
        let kf = k as f64;
        s0 += sign * jn[2 * k] / kf;
        s1 += sign * (jn[2 * k - 1] - jn[2 * k + 1]) / kf;
        sign = -sign;
    }
    let y0 = (2.0 / PI) * (lg * jn[0] - 2.0 * s0);
    let y1 = -(2.0 / PI) * (jn[0] / x - lg * jn[1] - s1);
    let y2 = 2.0 * y1 / x - y0;
    BesselSet {
        j: [jn[0], jn[1], jn[2]],
        y: [y0, y1, y2],
    }
}

fn hankel_pq(nu: f64, x: f64) -> (f64, f64) {
    let mu = 4.0 * nu * nu;
    let mut p = 1.0;
    let mut q = 0.0;
    let mut a = 1.0;
    let mut last = f64::INFINITY;
    for k in 1..60 {
        let kf = k as f64;
        let odd = 2.0 * kf - 1.0;
        let next = a * (mu - odd * odd) / (kf * 8.0 * x);
        if next.abs() >= last && k > 2 {
            break;
        }
        last = next.abs();
        a = next;
        // a_k / x^k with alternating signs split by parity
        match k % 4 {
            1 => q += a,
            2 => p -= a,
            3 => q -= a,
            _ => p += a,
        }
        if a.abs() < 1e-17 {
            break;
        }
    }
    (p, q)
}

fn asymptotic(x: f64) -> BesselSet {
    let amp = (2.0 / (PI * x)).sqrt();
    let mut j = [0.0; 3];
    let mut y = [0.0; 3];
    for n in 0..2 {
        let nu = n as f64;
        let (p, q) = hankel_pq(nu, x);
        let chi = x - (nu / 2.0 + 0.25) * PI;
        let (s, c) = chi.sin_cos();
        j[n] = amp * (p * c - q * s);
        y[n] = amp * (p * s + q * c);
    }
    j[2] = 2.0 * j[1] / x - j[0];
    y[2] = 2.0 * y[1] / x - y[0];
    BesselSet { j, y }
}
