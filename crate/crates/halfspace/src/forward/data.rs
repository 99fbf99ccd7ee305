use super::solver::{ForwardSolver, Obstacle, SolverOptions};
use crate::error::{Error, Result};
use crate::{ElasticMedium, C64};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use std::fmt::Write as _;
use std::io::{BufRead, Write};

pub const FORMAT_VERSION: u32 = 1;

/// Sources and receivers spread uniformly over `[−d, d]` on the surface.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SurveyGeometry {
    pub d: f64,
    pub n_src: usize,
    pub n_rcv: usize,
}

fn uniform(d: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![0.0];
    }
    (0..n).map(|i| -d + 2.0 * d * i as f64 / (n - 1) as f64).collect()
}

impl SurveyGeometry {
    pub fn new(d: f64, n_src: usize, n_rcv: usize) -> Result<Self> {
        if !(d > 0.0) || !d.is_finite() {
            return Err(Error::InvalidParameter(format!("aperture d = {d}")));
        }
        if n_src == 0 || n_rcv == 0 {
            return Err(Error::InvalidParameter("need at least one source and receiver".into()));
        }
        Ok(SurveyGeometry { d, n_src, n_rcv })
    }

    pub fn sources(&self) -> Vec<f64> {
        uniform(self.d, self.n_src)
    }

    pub fn receivers(&self) -> Vec<f64> {
        uniform(self.d, self.n_rcv)
    }
}

/// Scattered displacement `u^s_q(x_r, x_s)·e_c` for every source `s`,
/// receiver `r`, polarization `q` and component `c`.
#[derive(Clone, Debug, PartialEq)]
pub struct ScatterDataSet {
    pub medium: ElasticMedium,
    pub survey: SurveyGeometry,
    pub obstacle: String,
    pub seed: u64,
    pub sigma: f64,
    data: Vec<C64>,
}

impl ScatterDataSet {
    pub fn zeros(medium: ElasticMedium, survey: SurveyGeometry, obstacle: &str) -> Self {
        let len = survey.n_src * survey.n_rcv * 4;
        ScatterDataSet { medium, survey, obstacle: obstacle.into(), seed: 0, sigma: 0.0, data: vec![C64::new(0.0, 0.0); len] }
    }

    pub fn from_values(medium: ElasticMedium, survey: SurveyGeometry, obstacle: &str, data: Vec<C64>) -> Result<Self> {
        let mut d = Self::zeros(medium, survey, obstacle);
        if data.len() != d.data.len() {
            return Err(Error::GeometryMismatch(format!("{} values for {} entries", data.len(), d.data.len())));
        }
        if data.iter().any(|z| !z.is_finite()) {
            return Err(Error::Domain("non-finite data".into()));
        }
        d.data = data;
        Ok(d)
    }

    pub fn omega(&self) -> f64 {
        self.medium.omega()
    }

    pub fn index(&self, s: usize, r: usize, q: usize, c: usize) -> usize {
        ((s * self.survey.n_rcv + r) * 2 + q) * 2 + c
    }

    pub fn get(&self, s: usize, r: usize, q: usize, c: usize) -> C64 {
        self.data[self.index(s, r, q, c)]
    }

    pub fn values(&self) -> &[C64] {
        &self.data
    }

    pub fn values_mut(&mut self) -> &mut [C64] {
        &mut self.data
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn scaled(&self, a: f64) -> Self {
        let mut o = self.clone();
        o.data.iter_mut().for_each(|z| *z *= a);
        o
    }

    pub fn write_to<W: Write>(&self, mut w: W) -> Result<()> {
        let mut h = String::new();
        let _ = writeln!(h, "format_version {FORMAT_VERSION}");
        let _ = writeln!(h, "omega {:.16e}", self.medium.omega());
        let _ = writeln!(h, "lambda {:.16e}", self.medium.lambda());
        let _ = writeln!(h, "mu {:.16e}", self.medium.mu());
        let _ = writeln!(h, "d {:.16e}", self.survey.d);
        let _ = writeln!(h, "n_src {}", self.survey.n_src);
        let _ = writeln!(h, "n_rcv {}", self.survey.n_rcv);
        let _ = writeln!(h, "obstacle {}", self.obstacle);
        let _ = writeln!(h, "seed {}", self.seed);
        let _ = writeln!(h, "sigma {:.16e}", self.sigma);
        let _ = writeln!(h, "data s r q c re im");
        w.write_all(h.as_bytes())?;
        let mut line = String::with_capacity(96);
        for s in 0..self.survey.n_src {
            for r in 0..self.survey.n_rcv {
                for q in 0..2 {
                    for c in 0..2 {
                        let z = self.get(s, r, q, c);
                        line.clear();
                        let _ = writeln!(line, "{s} {r} {q} {c} {:.16e} {:.16e}", z.re, z.im);
                        w.write_all(line.as_bytes())?;
                    }
                }
            }
        }
        Ok(())
    }

    pub fn to_text(&self) -> String {
        let mut v = Vec::new();
        self.write_to(&mut v).expect("writing to memory");
        String::from_utf8(v).expect("ascii output")
    }

    pub fn read_from<R: BufRead>(r: R) -> Result<Self> {
        let mut lines = r.lines();
        let mut field = |key: &str| -> Result<String> {
            let l = lines.next().ok_or_else(|| Error::Format(format!("missing {key}")))??;
            let rest = l.strip_prefix(key).and_then(|s| s.strip_prefix(' '));
            rest.map(str::to_string).ok_or_else(|| Error::Format(format!("expected {key}, found {l:?}")))
        };
        fn num<T: std::str::FromStr>(s: &str, key: &str) -> Result<T> {
            s.trim().parse().map_err(|_| Error::Format(format!("bad {key}: {s:?}")))
        }
        let version: u32 = num(&field("format_version")?, "format_version")?;
        if version != FORMAT_VERSION {
            return Err(Error::Format(format!("unsupported format version {version}")));
        }
        let omega: f64 = num(&field("omega")?, "omega")?;
        let lambda: f64 = num(&field("lambda")?, "lambda")?;
        let mu: f64 = num(&field("mu")?, "mu")?;
        let d: f64 = num(&field("d")?, "d")?;
        let n_src: usize = num(&field("n_src")?, "n_src")?;
        let n_rcv: usize = num(&field("n_rcv")?, "n_rcv")?;
        let obstacle = field("obstacle")?;
        let seed: u64 = num(&field("seed")?, "seed")?;
        let sigma: f64 = num(&field("sigma")?, "sigma")?;
        if field("data")?.trim() != "s r q c re im" {
            return Err(Error::Format("bad data header".into()));
        }
        let medium = ElasticMedium::new(lambda, mu, omega)?;
        let survey = SurveyGeometry::new(d, n_src, n_rcv)?;
        let mut out = Self::zeros(medium, survey, &obstacle);
        out.seed = seed;
        out.sigma = sigma;
        let mut count = 0;
        for l in lines {
            let l = l?;
            if l.trim().is_empty() {
                continue;
            }
            let t: Vec<&str> = l.split_whitespace().collect();
            if t.len() != 6 {
                return Err(Error::Format(format!("bad row {l:?}")));
            }
            let (s, r, q, c): (usize, usize, usize, usize) = (num(t[0], "s")?, num(t[1], "r")?, num(t[2], "q")?, num(t[3], "c")?);
            if s >= n_src || r >= n_rcv || q > 1 || c > 1 {
                return Err(Error::Format(format!("index out of range in {l:?}")));
            }
            let idx = out.index(s, r, q, c);
            if idx != count {
                return Err(Error::Format(format!("row out of order: {l:?}")));
            }
            let z = C64::new(num(t[4], "re")?, num(t[5], "im")?);
            if !z.is_finite() {
                return Err(Error::Format(format!("non-finite value in {l:?}")));
            }
            out.data[idx] = z;
            count += 1;
        }
        if count != out.data.len() {
            return Err(Error::Format(format!("{count} rows, expected {}", out.data.len())));
        }
        Ok(out)
    }
}

/// Scattered data for the given obstacles; an empty list yields zeros.
pub fn synthesize_data(obstacles: &[Obstacle], survey: &SurveyGeometry, medium: &ElasticMedium, opts: SolverOptions) -> Result<ScatterDataSet> {
    let desc: Vec<String> = obstacles.iter().map(|o| o.descriptor()).collect();
    let desc = if desc.is_empty() { "none".to_string() } else { desc.join("; ") };
    if obstacles.is_empty() {
        return Ok(ScatterDataSet::zeros(*medium, *survey, &desc));
    }
    let solver = ForwardSolver::new(medium, obstacles, opts)?;
    synthesize_with(&solver, survey, &desc)
}

pub fn synthesize_with(solver: &ForwardSolver, survey: &SurveyGeometry, desc: &str) -> Result<ScatterDataSet> {
    let u = solver.scattered(&survey.sources(), &survey.receivers())?;
    let medium = *solver.engine().medium();
    let mut out = ScatterDataSet::zeros(medium, *survey, desc);
    for s in 0..survey.n_src {
        for r in 0..survey.n_rcv {
            for q in 0..2 {
                for c in 0..2 {
                    let i = out.index(s, r, q, c);
                    out.data[i] = u[(2 * r + c, 2 * s + q)];
                }
            }
        }
    }
    if out.data.iter().any(|z| !z.is_finite()) {
        return Err(Error::Domain("non-finite scattered field".into()));
    }
    Ok(out)
}

/// Adds `(σ max|u|/√2)(ε₁ + iε₂)` to each entry; the normal pair for the
/// entry at flat index `k` comes from stream `k` of a generator seeded by `seed`.
pub fn add_noise(data: &ScatterDataSet, sigma: f64, seed: u64) -> Result<ScatterDataSet> {
    if !(sigma >= 0.0) {
        return Err(Error::InvalidParameter(format!("noise level {sigma}")));
    }
    let mut out = data.clone();
    out.seed = seed;
    out.sigma = sigma;
    if sigma == 0.0 {
        return Ok(out);
    }
    let amp = sigma * data.max_abs() / std::f64::consts::SQRT_2;
    for (k, z) in out.data.iter_mut().enumerate() {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(k as u64);
        let e1: f64 = StandardNormal.sample(&mut rng);
        let e2: f64 = StandardNormal.sample(&mut rng);
        *z += C64::new(e1, e2) * amp;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn sample() -> ScatterDataSet {
        let m = ElasticMedium::new(0.5, 0.25, 2.0 * PI).unwrap();
        let s = SurveyGeometry::new(5.0, 3, 4).unwrap();
        let v = (0..48).map(|k| C64::new(k as f64 * 0.1, 1.0 / (k as f64 + 1.0))).collect();
        ScatterDataSet::from_values(m, s, "circle", v).unwrap()
    }

    #[test]
    fn positions_are_uniform() {
        let s = SurveyGeometry::new(50.0, 101, 5).unwrap();
        let p = s.sources();
        assert_eq!(p[0], -50.0);
        assert_eq!(p[100], 50.0);
        assert!((p[50]).abs() < 1e-12);
        assert_eq!(s.receivers(), vec![-50.0, -25.0, 0.0, 25.0, 50.0]);
        assert_eq!(SurveyGeometry::new(1.0, 1, 1).unwrap().sources(), vec![0.0]);
        assert!(SurveyGeometry::new(1.0, 0, 1).is_err());
    }

    #[test]
    fn layout_is_source_major() {
        let d = sample();
        assert_eq!(d.index(0, 0, 0, 1), 1);
        assert_eq!(d.index(0, 0, 1, 0), 2);
        assert_eq!(d.index(0, 1, 0, 0), 4);
        assert_eq!(d.index(1, 0, 0, 0), 16);
    }

    #[test]
    fn text_format_is_lossless() {
        let d = sample();
        let t = d.to_text();
        let back = ScatterDataSet::read_from(t.as_bytes()).unwrap();
        assert_eq!(back, d);
        assert!(t.lines().nth(11).unwrap().starts_with("0 0 0 0 "));
    }

    #[test]
    fn reader_rejects_bad_input() {
        let t = sample().to_text();
        let v2 = t.replacen("format_version 1", "format_version 2", 1);
        assert!(matches!(ScatterDataSet::read_from(v2.as_bytes()), Err(Error::Format(_))));
        let short: String = t.lines().take(20).map(|l| format!("{l}\n")).collect();
        assert!(ScatterDataSet::read_from(short.as_bytes()).is_err());
    }

    #[test]
    fn zero_noise_is_identity() {
        let d = sample();
        let n = add_noise(&d, 0.0, 9).unwrap();
        assert_eq!(n.values(), d.values());
    }

    #[test]
    fn noise_is_seeded() {
        let d = sample();
        let a = add_noise(&d, 0.2, 1).unwrap();
        let b = add_noise(&d, 0.2, 1).unwrap();
        let c = add_noise(&d, 0.2, 2).unwrap();
        assert_eq!(a.values(), b.values());
        assert_ne!(a.values(), c.values());
        assert!(add_noise(&d, -1.0, 0).is_err());
    }
}
