//! Closed boundary curves, parametrized counterclockwise on `[0, 2π)`.

use crate::error::{Error, Result};
use std::f64::consts::PI;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum CurveKind {
    Circle { radius: f64 },
    /// `(cos θ + 0.65 cos 2θ − 0.65, 1.5 sin θ)`
    Kite,
    /// `r(θ) = 1 + 0.2 cos(pθ)`
    Leaf { p: u32 },
    /// `(cos θ + 0.2 cos 3θ, sin θ + 0.2 sin 3θ)`
    Peanut,
    /// `r(θ) = (cos⁴θ + sin⁴θ)^{-1/4}`
    RoundedSquare,
}

impl CurveKind {
    pub fn name(&self) -> String {
        match self {
            CurveKind::Circle { radius } => format!("circle(radius={radius})"),
            CurveKind::Kite => "kite".into(),
            CurveKind::Leaf { p } => format!("leaf(p={p})"),
            CurveKind::Peanut => "peanut".into(),
            CurveKind::RoundedSquare => "rounded_square".into(),
        }
    }
}

/// A validated curve: shape, translation and uniform scale.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BoundaryCurve {
    kind: CurveKind,
    center: [f64; 2],
    scale: f64,
}

/// Point, first and second derivative at one parameter value.
#[derive(Clone, Copy, Debug)]
pub struct CurvePoint {
    pub x: [f64; 2],
    pub d1: [f64; 2],
    pub d2: [f64; 2],
}

impl CurvePoint {
    pub fn speed(&self) -> f64 {
        self.d1[0].hypot(self.d1[1])
    }

    /// Outward unit normal for a counterclockwise parametrization.
    pub fn normal(&self) -> [f64; 2] {
        let s = self.speed();
        [self.d1[1] / s, -self.d1[0] / s]
    }

    pub fn tangent(&self) -> [f64; 2] {
        let s = self.speed();
        [self.d1[0] / s, self.d1[1] / s]
    }

    pub fn curvature(&self) -> f64 {
        (self.d1[0] * self.d2[1] - self.d1[1] * self.d2[0]) / self.speed().powi(3)
    }
}

const SCAN: usize = 512;

fn radial(r: f64, dr: f64, ddr: f64, t: f64) -> ([f64; 2], [f64; 2], [f64; 2]) {
    let (s, c) = t.sin_cos();
    (
        [r * c, r * s],
        [dr * c - r * s, dr * s + r * c],
        [(ddr - r) * c - 2.0 * dr * s, (ddr - r) * s + 2.0 * dr * c],
    )
}

pub fn make_curve(kind: CurveKind, center: [f64; 2], scale: f64) -> Result<BoundaryCurve> {
    if !(scale > 0.0) || !scale.is_finite() {
        return Err(Error::InvalidParameter("curve scale must be positive".into()));
    }
    match kind {
        CurveKind::Circle { radius } if !(radius > 0.0) || !radius.is_finite() => {
            return Err(Error::InvalidParameter("circle radius must be positive".into()));
        }
        CurveKind::Leaf { p } if p == 0 => {
            return Err(Error::InvalidParameter("leaf count must be positive".into()));
        }
        _ => {}
    }
    if !(center[0].is_finite() && center[1].is_finite()) {
        return Err(Error::InvalidParameter("curve center must be finite".into()));
    }
    let c = BoundaryCurve { kind, center, scale };
    c.validate()?;
    Ok(c)
}

impl BoundaryCurve {
    pub fn kind(&self) -> CurveKind {
        self.kind
    }

    pub fn center(&self) -> [f64; 2] {
        self.center
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn eval(&self, t: f64) -> CurvePoint {
        let (x, d1, d2) = match self.kind {
            CurveKind::Circle { radius } => radial(radius, 0.0, 0.0, t),
            CurveKind::Kite => {
                let (s, c) = t.sin_cos();
                let (s2, c2) = (2.0 * t).sin_cos();
                ([c + 0.65 * c2 - 0.65, 1.5 * s], [-s - 1.3 * s2, 1.5 * c], [-c - 2.6 * c2, -1.5 * s])
            }
            CurveKind::Leaf { p } => {
                let p = p as f64;
                let (s, c) = (p * t).sin_cos();
                radial(1.0 + 0.2 * c, -0.2 * p * s, -0.2 * p * p * c, t)
            }
            CurveKind::Peanut => {
                let (s, c) = t.sin_cos();
                let (s3, c3) = (3.0 * t).sin_cos();
                (
                    [c + 0.2 * c3, s + 0.2 * s3],
                    [-s - 0.6 * s3, c + 0.6 * c3],
                    [-c - 1.8 * c3, -s - 1.8 * s3],
                )
            }
            CurveKind::RoundedSquare => {
                let (s4, c4) = (4.0 * t).sin_cos();
                let q = 1.0 - 0.5 * (2.0 * t).sin().powi(2);
                let dq = -s4;
                let ddq = -4.0 * c4;
                let r = q.powf(-0.25);
                let dr = -0.25 * q.powf(-1.25) * dq;
                let ddr = 0.3125 * q.powf(-2.25) * dq * dq - 0.25 * q.powf(-1.25) * ddq;
                radial(r, dr, ddr, t)
            }
        };
        let k = self.scale;
        CurvePoint {
            x: [self.center[0] + k * x[0], self.center[1] + k * x[1]],
            d1: [k * d1[0], k * d1[1]],
            d2: [k * d2[0], k * d2[1]],
        }
    }

    /// Polygonal approximation with `n` vertices.
    pub fn sample(&self, n: usize) -> Vec<[f64; 2]> {
        (0..n).map(|i| self.eval(2.0 * PI * i as f64 / n as f64).x).collect()
    }

    pub fn length(&self) -> f64 {
        // trapezoid rule is spectrally accurate for periodic integrands
        let n = 1024;
        (0..n).map(|i| self.eval(2.0 * PI * i as f64 / n as f64).speed()).sum::<f64>() * 2.0 * PI / n as f64
    }

    pub fn min_depth(&self) -> f64 {
        self.sample(SCAN).iter().map(|p| p[1]).fold(f64::INFINITY, f64::min)
    }

    pub fn max_depth(&self) -> f64 {
        self.sample(SCAN).iter().map(|p| p[1]).fold(f64::NEG_INFINITY, f64::max)
    }

    /// Whether a point is enclosed (even-odd rule on the sampled polygon).
    pub fn contains(&self, p: [f64; 2]) -> bool {
        let v = self.sample(SCAN);
        let mut inside = false;
        let mut j = v.len() - 1;
        for i in 0..v.len() {
            let (a, b) = (v[i], v[j]);
            if (a[1] > p[1]) != (b[1] > p[1]) && p[0] < (b[0] - a[0]) * (p[1] - a[1]) / (b[1] - a[1]) + a[0] {
                inside = !inside;
            }
            j = i;
        }
        inside
    }

    /// Distance from a point to the sampled curve.
    pub fn distance(&self, p: [f64; 2]) -> f64 {
        let v = self.sample(2048);
        let mut best = f64::INFINITY;
        for i in 0..v.len() {
            let a = v[i];
            let b = v[(i + 1) % v.len()];
            best = best.min(segment_distance(p, a, b));
        }
        best
    }

    fn validate(&self) -> Result<()> {
        if !(self.min_depth() > 0.0) {
            return Err(Error::Domain(format!("curve {} reaches the surface x2 <= 0", self.kind.name())));
        }
        let v = self.sample(SCAN);
        if polygon_self_intersects(&v) {
            return Err(Error::Domain(format!("curve {} self-intersects", self.kind.name())));
        }
        if (0..SCAN).any(|i| !(self.eval(2.0 * PI * i as f64 / SCAN as f64).speed() > 0.0)) {
            return Err(Error::Domain("curve has a singular parametrization".into()));
        }
        Ok(())
    }
}

fn segment_distance(p: [f64; 2], a: [f64; 2], b: [f64; 2]) -> f64 {
    let d = [b[0] - a[0], b[1] - a[1]];
    let l2 = d[0] * d[0] + d[1] * d[1];
    let t = if l2 > 0.0 { (((p[0] - a[0]) * d[0] + (p[1] - a[1]) * d[1]) / l2).clamp(0.0, 1.0) } else { 0.0 };
    (p[0] - a[0] - t * d[0]).hypot(p[1] - a[1] - t * d[1])
}

fn orient(a: [f64; 2], b: [f64; 2], c: [f64; 2]) -> f64 {
    (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])
}

fn segments_cross(a: [f64; 2], b: [f64; 2], c: [f64; 2], d: [f64; 2]) -> bool {
    let o1 = orient(a, b, c);
    let o2 = orient(a, b, d);
    let o3 = orient(c, d, a);
    let o4 = orient(c, d, b);
    o1 * o2 < 0.0 && o3 * o4 < 0.0
}

pub(crate) fn polygon_self_intersects(v: &[[f64; 2]]) -> bool {
    let n = v.len();
    for i in 0..n {
        let (a, b) = (v[i], v[(i + 1) % n]);
        for j in (i + 2)..n {
            if i == 0 && j == n - 1 {
                continue;
            }
            if segments_cross(a, b, v[j], v[(j + 1) % n]) {
                return true;
            }
        }
    }
    false
}

/// Whether two sampled curves overlap or intersect.
pub(crate) fn curves_overlap(a: &BoundaryCurve, b: &BoundaryCurve) -> bool {
    let va = a.sample(SCAN);
    let vb = b.sample(SCAN);
    for i in 0..va.len() {
        for j in 0..vb.len() {
            if segments_cross(va[i], va[(i + 1) % va.len()], vb[j], vb[(j + 1) % vb.len()]) {
                return true;
            }
        }
    }
    a.contains(vb[0]) || b.contains(va[0])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: [f64; 2], b: [f64; 2]) -> bool {
        (a[0] - b[0]).abs() < 1e-12 && (a[1] - b[1]).abs() < 1e-12
    }

    #[test]
    fn documented_points() {
        let k = make_curve(CurveKind::Kite, [0.0, 10.0], 1.0).unwrap();
        assert!(close(k.eval(0.0).x, [1.0, 10.0]));
        let l = make_curve(CurveKind::Leaf { p: 3 }, [0.0, 10.0], 1.0).unwrap();
        assert!(close(l.eval(0.0).x, [1.2, 10.0]));
        let c = make_curve(CurveKind::Circle { radius: 1.0 }, [0.0, 10.0], 1.0).unwrap();
        assert!(close(c.eval(PI / 2.0).x, [0.0, 11.0]));
    }

    #[test]
    fn derivatives_match_differences() {
        let kinds = [
            CurveKind::Circle { radius: 0.7 },
            CurveKind::Kite,
            CurveKind::Leaf { p: 5 },
            CurveKind::Peanut,
            CurveKind::RoundedSquare,
        ];
        let h = 1e-5;
        for k in kinds {
            let c = make_curve(k, [0.3, 6.0], 1.3).unwrap();
            for t in [0.1, 1.3, 2.9, 4.4, 6.0] {
                let (p, m, z) = (c.eval(t + h), c.eval(t - h), c.eval(t));
                for i in 0..2 {
                    let d1 = (p.x[i] - m.x[i]) / (2.0 * h);
                    let d2 = (p.x[i] - 2.0 * z.x[i] + m.x[i]) / (h * h);
                    assert!((d1 - z.d1[i]).abs() < 1e-8, "{k:?} d1");
                    assert!((d2 - z.d2[i]).abs() < 1e-4, "{k:?} d2");
                }
            }
        }
    }

    #[test]
    fn orientation_is_counterclockwise() {
        let c = make_curve(CurveKind::Kite, [0.0, 10.0], 1.0).unwrap();
        let v = c.sample(400);
        let area: f64 = (0..v.len()).map(|i| {
            let (a, b) = (v[i], v[(i + 1) % v.len()]);
            a[0] * b[1] - a[1] * b[0]
        }).sum::<f64>() / 2.0;
        assert!(area > 0.0);
        // outward normal at the rightmost circle point is +e1
        let o = make_curve(CurveKind::Circle { radius: 1.0 }, [0.0, 5.0], 1.0).unwrap();
        let n = o.eval(0.0).normal();
        assert!(close(n, [1.0, 0.0]));
        assert!((o.eval(1.0).curvature() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_invalid_curves() {
        assert!(make_curve(CurveKind::Circle { radius: 1.0 }, [0.0, 0.5], 1.0).is_err());
        assert!(make_curve(CurveKind::Circle { radius: -1.0 }, [0.0, 5.0], 1.0).is_err());
        assert!(make_curve(CurveKind::Leaf { p: 0 }, [0.0, 5.0], 1.0).is_err());
        // the literal printed square x = cos3θ + cosθ passes through its own center
        let v: Vec<[f64; 2]> = (0..512)
            .map(|i| {
                let t = 2.0 * PI * i as f64 / 512.0;
                [(3.0 * t).cos() + t.cos(), (3.0 * t).sin() + t.sin() + 10.0]
            })
            .collect();
        assert!(polygon_self_intersects(&v));
    }

    #[test]
    fn circle_length_and_distance() {
        let c = make_curve(CurveKind::Circle { radius: 1.0 }, [0.0, 10.0], 1.0).unwrap();
        assert!((c.length() - 2.0 * PI).abs() < 1e-12);
        assert!((c.distance([0.0, 12.0]) - 1.0).abs() < 1e-5);
        assert!(c.contains([0.1, 10.2]) && !c.contains([0.0, 12.0]));
        let d = make_curve(CurveKind::Circle { radius: 1.0 }, [1.5, 10.0], 1.0).unwrap();
        let e = make_curve(CurveKind::Circle { radius: 1.0 }, [4.0, 10.0], 1.0).unwrap();
        assert!(curves_overlap(&c, &d));
        assert!(!curves_overlap(&c, &e));
    }
}
