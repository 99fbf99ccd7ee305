use super::curve::BoundaryCurve;
use super::nystrom::{assemble, single_layer_at, Mesh};
use crate::error::{Error, Result};
use crate::green::separable::surface_block;
use crate::green::{traction_tensor, GreenEngine};
use crate::{ElasticMedium, Tensor2C, C64};
use nalgebra::{DMatrix, DVector, Dyn, LU};
use rayon::prelude::*;
use std::f64::consts::PI;

/// Impedance coefficient as a function of the curve parameter.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ImpedanceProfile {
    Constant(f64),
    /// `mean + amp·cos(freq·θ)`
    Cosine { mean: f64, amp: f64, freq: u32 },
}

impl ImpedanceProfile {
    pub fn eval(&self, t: f64) -> f64 {
        match *self {
            ImpedanceProfile::Constant(c) => c,
            ImpedanceProfile::Cosine { mean, amp, freq } => mean + amp * (freq as f64 * t).cos(),
        }
    }

    fn min_value(&self) -> f64 {
        match *self {
            ImpedanceProfile::Constant(c) => c,
            ImpedanceProfile::Cosine { mean, amp, .. } => mean - amp.abs(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum BcKind {
    Dirichlet,
    Neumann,
    Impedance(ImpedanceProfile),
}

impl BcKind {
    pub fn name(&self) -> &'static str {
        match self {
            BcKind::Dirichlet => "dirichlet",
            BcKind::Neumann => "neumann",
            BcKind::Impedance(_) => "impedance",
        }
    }
}

#[derive(Clone, Debug)]
pub struct Obstacle {
    pub curve: BoundaryCurve,
    pub bc: BcKind,
}

impl Obstacle {
    pub fn new(curve: BoundaryCurve, bc: BcKind) -> Result<Self> {
        if let BcKind::Impedance(p) = bc {
            if !(p.min_value() >= 0.0) {
                return Err(Error::InvalidParameter("impedance must be nonnegative".into()));
            }
        }
        Ok(Obstacle { curve, bc })
    }

    pub fn descriptor(&self) -> String {
        let c = self.curve.center();
        let bc = match self.bc {
            BcKind::Impedance(ImpedanceProfile::Constant(e)) => format!("impedance(eta={e})"),
            BcKind::Impedance(ImpedanceProfile::Cosine { mean, amp, freq }) => {
                format!("impedance(eta={mean}+{amp}cos({freq}t))")
            }
            other => other.name().to_string(),
        };
        format!("{} center=({},{}) scale={} bc={}", self.curve.kind().name(), c[0], c[1], self.curve.scale(), bc)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SolverOptions {
    pub points_per_wavelength: f64,
    pub min_nodes: usize,
    pub max_condition: f64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions { points_per_wavelength: 16.0, min_nodes: 64, max_condition: 1e12 }
    }
}

/// Factorized boundary system for a set of disjoint obstacles at one frequency.
pub struct ForwardSolver {
    engine: GreenEngine,
    obstacles: Vec<Obstacle>,
    mesh: Mesh,
    lu: LU<C64, Dyn, Dyn>,
    condition: f64,
}

fn one_norm(m: &DMatrix<C64>) -> f64 {
    m.column_iter().map(|c| c.iter().map(|z| z.norm()).sum::<f64>()).fold(0.0, f64::max)
}

impl ForwardSolver {
    pub fn new(medium: &ElasticMedium, obstacles: &[Obstacle], opts: SolverOptions) -> Result<Self> {
        let engine = GreenEngine::new(medium);
        let curves: Vec<BoundaryCurve> = obstacles.iter().map(|o| o.curve.clone()).collect();
        let mesh = Mesh::new(&curves, engine.wavenumbers().k_s, opts.points_per_wavelength, opts.min_nodes)?;
        Self::with_mesh(engine, obstacles, mesh, opts.max_condition)
    }

    pub fn with_mesh(engine: GreenEngine, obstacles: &[Obstacle], mesh: Mesh, max_condition: f64) -> Result<Self> {
        if obstacles.is_empty() {
            return Err(Error::InvalidParameter("no obstacles".into()));
        }
        for (a, o) in obstacles.iter().enumerate() {
            for p in &obstacles[a + 1..] {
                if super::curve::curves_overlap(&o.curve, &p.curve) {
                    return Err(Error::InvalidParameter("obstacles overlap".into()));
                }
            }
        }
        let need_s = obstacles.iter().any(|o| !matches!(o.bc, BcKind::Neumann));
        let need_k = obstacles.iter().any(|o| !matches!(o.bc, BcKind::Dirichlet));
        let ops = assemble(&engine, &mesh, need_s, need_k)?;
        let n = mesh.len();
        let mut a = DMatrix::<C64>::zeros(2 * n, 2 * n);
        for i in 0..n {
            let o = &obstacles[mesh.curve_of(i)];
            for r in 2 * i..2 * i + 2 {
                match o.bc {
                    BcKind::Dirichlet => {
                        let s = ops.single_layer.as_ref().unwrap();
                        a.row_mut(r).copy_from(&s.row(r));
                    }
                    BcKind::Neumann | BcKind::Impedance(_) => {
                        let k = ops.traction.as_ref().unwrap();
                        a.row_mut(r).copy_from(&k.row(r));
                        a[(r, r)] -= C64::new(0.5, 0.0);
                        if let BcKind::Impedance(p) = o.bc {
                            let eta = p.eval(mesh.param(i));
                            let s = ops.single_layer.as_ref().unwrap();
                            for c in 0..2 * n {
                                a[(r, c)] += C64::new(0.0, eta) * s[(r, c)];
                            }
                        }
                    }
                }
            }
        }
        let norm_a = one_norm(&a);
        let lu = a.lu();
        let inv = lu.try_inverse().ok_or(Error::Singular)?;
        let condition = norm_a * one_norm(&inv);
        if !condition.is_finite() || condition > max_condition {
            return Err(Error::IllConditioned(condition));
        }
        Ok(ForwardSolver { engine, obstacles: obstacles.to_vec(), mesh, lu, condition })
    }

    pub fn condition_estimate(&self) -> f64 {
        self.condition
    }

    pub fn mesh(&self) -> &Mesh {
        &self.mesh
    }

    pub fn engine(&self) -> &GreenEngine {
        &self.engine
    }

    /// Right-hand sides for sources at `(a, 0)`; column `2s + q`.
    pub fn rhs(&self, sources: &[f64]) -> Result<DMatrix<C64>> {
        let n = self.mesh.len();
        let pos = self.mesh.positions();
        let need_grad = self.obstacles.iter().any(|o| !matches!(o.bc, BcKind::Dirichlet));
        let blk = surface_block(&self.engine, sources, &pos, need_grad)?;
        let med = *self.engine.medium();
        let mut b = DMatrix::<C64>::zeros(2 * n, 2 * sources.len());
        for s in 0..sources.len() {
            for j in 0..n {
                let e = &blk[s * n + j];
                // N(x_j, x_s) = N(x_s, x_j)ᵀ
                let nv = e[0].transpose();
                let o = &self.obstacles[self.mesh.curve_of(j)];
                let t = match o.bc {
                    BcKind::Dirichlet => nv,
                    _ => {
                        let p = self.mesh.point(j);
                        let mut t = traction_tensor(&med, &[e[1].transpose(), e[2].transpose()], p.normal());
                        if let BcKind::Impedance(pr) = o.bc {
                            t = t + nv.scale(C64::new(0.0, pr.eval(self.mesh.param(j))));
                        }
                        t
                    }
                };
                for a in 0..2 {
                    for q in 0..2 {
                        b[(2 * j + a, 2 * s + q)] = -t.m[a][q];
                    }
                }
            }
        }
        Ok(b)
    }

    pub fn solve(&self, rhs: &DMatrix<C64>) -> Result<DMatrix<C64>> {
        let x = self.lu.solve(rhs).ok_or(Error::Singular)?;
        if x.iter().all(|z| z.is_finite()) {
            Ok(x)
        } else {
            Err(Error::Singular)
        }
    }

    /// Density for one source and polarization.
    pub fn solve_density(&self, x_s: f64, q: [C64; 2]) -> Result<DVector<C64>> {
        let b = self.rhs(&[x_s])?;
        let rhs = b.column(0) * q[0] + b.column(1) * q[1];
        let x = self.lu.solve(&rhs).ok_or(Error::Singular)?;
        Ok(x)
    }

    /// Maps densities to displacements at surface receivers; row `2r + c`.
    pub fn receiver_matrix(&self, receivers: &[f64]) -> Result<DMatrix<C64>> {
        let n = self.mesh.len();
        let pos = self.mesh.positions();
        let blk = surface_block(&self.engine, receivers, &pos, false)?;
        let mut m = DMatrix::<C64>::zeros(2 * receivers.len(), 2 * n);
        for r in 0..receivers.len() {
            for j in 0..n {
                let t: Tensor2C = blk[r * n + j][0].scale_re(self.mesh.weight(j));
                for c in 0..2 {
                    for b in 0..2 {
                        m[(2 * r + c, 2 * j + b)] = t.m[c][b];
                    }
                }
            }
        }
        Ok(m)
    }

    /// Scattered displacements, row `2r + c`, column `2s + q`. Each source is
    /// processed independently so results do not depend on the thread count.
    pub fn scattered(&self, sources: &[f64], receivers: &[f64]) -> Result<DMatrix<C64>> {
        let rm = self.receiver_matrix(receivers)?;
        let b = self.rhs(sources)?;
        let cols: Vec<Result<DMatrix<C64>>> = (0..sources.len())
            .into_par_iter()
            .map(|s| {
                let x = self.solve(&b.columns(2 * s, 2).into_owned())?;
                Ok(&rm * x)
            })
            .collect();
        let mut out = DMatrix::<C64>::zeros(2 * receivers.len(), 2 * sources.len());
        for (s, c) in cols.into_iter().enumerate() {
            out.columns_mut(2 * s, 2).copy_from(&c?);
        }
        Ok(out)
    }

    /// Relative residual of the Dirichlet condition at the midpoints between
    /// nodes, over all Dirichlet obstacles.
    pub fn dirichlet_residual(&self, density: &DVector<C64>, x_s: f64, q: [C64; 2]) -> Result<f64> {
        let phi: Vec<C64> = density.iter().copied().collect();
        let (mut num, mut den) = (0.0, 0.0);
        for (c, o) in self.obstacles.iter().enumerate() {
            if o.bc != BcKind::Dirichlet {
                continue;
            }
            let nh = self.mesh.n_half(c);
            let ts: Vec<f64> = (0..2 * nh).map(|j| (j as f64 + 0.5) * PI / nh as f64).collect();
            let su = single_layer_at(&self.engine, &self.mesh, c, &ts, &phi)?;
            let mids: Vec<[f64; 2]> = ts.iter().map(|&t| o.curve.eval(t).x).collect();
            let blk = surface_block(&self.engine, &[x_s], &mids, false)?;
            for (k, u) in su.iter().enumerate() {
                let inc = blk[k][0].transpose().mul_vec(q);
                for a in 0..2 {
                    num += (u[a] + inc[a]).norm_sqr();
                    den += inc[a].norm_sqr();
                }
            }
        }
        if den == 0.0 {
            return Err(Error::InvalidParameter("no Dirichlet obstacle".into()));
        }
        Ok((num / den).sqrt())
    }
}
