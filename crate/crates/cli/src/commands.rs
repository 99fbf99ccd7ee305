use crate::config::ExperimentConfig;
use crate::error::CliError;
use crate::output::{sha256_hex, OutputSet, RunManifest};
use halfspace_rtm::forward::{add_noise, synthesize_data, ScatterDataSet};
use halfspace_rtm::imaging::{check_window, image, stack, ImagingGrid};
use halfspace_rtm::psf::{psf_resolution_profile, PsfConfig};
use halfspace_rtm::validate::{run_validation, ValidationReport};
use halfspace_rtm::{ElasticMedium, Error};
use std::f64::consts::PI;
use std::io::BufReader;
use std::path::{Path, PathBuf};
use std::time::Instant;

/// Relative frequency slack when matching datasets to the config; covers the
/// 0.1% perturbation applied on an ill-conditioned retry.
const OMEGA_SLACK: f64 = 1.5e-3;

#[derive(Clone, Debug, Default)]
pub struct RunOptions {
    pub out: PathBuf,
    pub seed: Option<u64>,
    pub config_sha256: Option<String>,
    pub data: Vec<PathBuf>,
}

pub fn dataset_name(k: usize) -> String {
    format!("dataset_w{k}.txt")
}

/// Noise seed for frequency `k`, so each frequency draws independent noise.
pub fn frequency_seed(seed: u64, k: usize) -> u64 {
    seed.wrapping_add((k as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15))
}

fn csv_bytes(g: &ImagingGrid) -> Result<Vec<u8>, CliError> {
    let mut v = Vec::new();
    g.write_csv(&mut v).map_err(|e| CliError::numerical("write grid", e))?;
    Ok(v)
}

fn pgm_bytes(g: &ImagingGrid) -> Result<Vec<u8>, CliError> {
    let mut v = Vec::new();
    g.write_pgm(&mut v).map_err(|e| CliError::numerical("write heatmap", e))?;
    Ok(v)
}

pub fn cmd_synthesize(cfg: &ExperimentConfig, opts: &RunOptions) -> Result<Vec<PathBuf>, CliError> {
    let obstacles = cfg.obstacles()?;
    if obstacles.is_empty() {
        return Err(CliError::Config("synthesize needs at least one [[obstacle]]".into()));
    }
    let survey = cfg.survey()?;
    let seed = opts.seed.unwrap_or(cfg.noise.seed);
    let sigma = cfg.noise.sigma;
    let mut manifest = RunManifest::new("synthesize", opts.config_sha256.clone(), Some(seed));
    let mut out = OutputSet::new(&opts.out);
    for (k, medium) in cfg.media()?.into_iter().enumerate() {
        let t = Instant::now();
        let data = match synthesize_data(&obstacles, &survey, &medium, cfg.solver_options()) {
            Err(Error::IllConditioned(c)) if cfg.retry_perturbed() => {
                let w = medium.omega() * 1.001;
                manifest.warn(format!("omega {} ill-conditioned (estimate {c:.3e}); retrying at {w}", medium.omega()));
                let m = medium.with_omega(w).map_err(|e| CliError::numerical("synthesize", e))?;
                synthesize_data(&obstacles, &survey, &m, cfg.solver_options())
            }
            other => other,
        }
        .map_err(|e| CliError::numerical(format!("synthesize omega {}", medium.omega()), e))?;
        let data = add_noise(&data, sigma, frequency_seed(seed, k)).map_err(|e| CliError::numerical("noise", e))?;
        manifest.stage(format!("synthesize w{k}"), t.elapsed().as_secs_f64());
        out.add(dataset_name(k), data.to_text().into_bytes());
    }
    out.commit(manifest)
}

fn read_dataset(path: &Path) -> Result<(ScatterDataSet, String), CliError> {
    let bytes = std::fs::read(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    let d = ScatterDataSet::read_from(BufReader::new(&bytes[..]))
        .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    Ok((d, sha256_hex(&bytes)))
}

fn same(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-12 * a.abs().max(b.abs())
}

pub fn cmd_image(cfg: &ExperimentConfig, opts: &RunOptions) -> Result<Vec<PathBuf>, CliError> {
    let grid = cfg.grid()?;
    let weights = cfg.weights()?;
    let survey = cfg.survey()?;
    let omegas = cfg.omegas()?;
    let (c1, c2) = cfg.psf_window();
    let mut manifest = RunManifest::new("image", opts.config_sha256.clone(), None);
    for w in check_window(&grid, survey.d, c1, c2) {
        manifest.warn(w);
    }
    let paths: Vec<PathBuf> = if opts.data.is_empty() {
        (0..omegas.len()).map(|k| opts.out.join(dataset_name(k))).collect()
    } else {
        opts.data.clone()
    };
    let mut slots: Vec<Option<(ScatterDataSet, String, String)>> = vec![None; omegas.len()];
    for p in &paths {
        let (d, digest) = read_dataset(p)?;
        if d.survey != survey {
            return Err(CliError::Input(format!("{}: survey does not match the config", p.display())));
        }
        if !same(d.medium.lambda(), cfg.medium.lambda) || !same(d.medium.mu(), cfg.medium.mu) {
            return Err(CliError::Input(format!("{}: Lamé constants do not match the config", p.display())));
        }
        let k = omegas
            .iter()
            .position(|w| (d.omega() / w - 1.0).abs() <= OMEGA_SLACK)
            .ok_or_else(|| CliError::Input(format!("{}: omega {} is not in the config", p.display(), d.omega())))?;
        if slots[k].is_some() {
            return Err(CliError::Input(format!("two datasets for omega {}", omegas[k])));
        }
        let name = p.file_name().and_then(|n| n.to_str()).unwrap_or("dataset").to_string();
        slots[k] = Some((d, name, digest));
    }
    let mut out = OutputSet::new(&opts.out);
    let mut images = Vec::new();
    let mut used = Vec::new();
    for (k, slot) in slots.iter().enumerate() {
        let Some((d, name, digest)) = slot else { continue };
        let t = Instant::now();
        let im = image(d, &grid, weights).map_err(|e| CliError::numerical(format!("image omega {}", d.omega()), e))?;
        manifest.stage(format!("image w{k}"), t.elapsed().as_secs_f64());
        let digests = [(name.clone(), digest.clone())];
        out.add(format!("image_w{k}.csv"), csv_bytes(&im)?);
        out.add(format!("image_w{k}.hdr"), im.header(&[d.omega()], &digests).into_bytes());
        out.add(format!("image_w{k}.pgm"), pgm_bytes(&im)?);
        used.push((d.omega(), name.clone(), digest.clone()));
        images.push(im);
    }
    if images.len() > 1 {
        let st = stack(&images).map_err(|e| CliError::numerical("stack", e))?;
        let om: Vec<f64> = used.iter().map(|u| u.0).collect();
        let dg: Vec<(String, String)> = used.iter().map(|u| (u.1.clone(), u.2.clone())).collect();
        out.add("image_stacked.csv", csv_bytes(&st)?);
        out.add("image_stacked.hdr", st.header(&om, &dg).into_bytes());
        out.add("image_stacked.pgm", pgm_bytes(&st)?);
    }
    out.commit(manifest)
}

pub fn cmd_psf(cfg: &ExperimentConfig, opts: &RunOptions) -> Result<Vec<PathBuf>, CliError> {
    let grid = cfg.grid()?;
    let d = cfg.survey()?.d;
    let (c1, c2) = cfg.psf_window();
    let mut manifest = RunManifest::new("psf", opts.config_sha256.clone(), None);
    let mut out = OutputSet::new(&opts.out);
    for (k, medium) in cfg.media()?.into_iter().enumerate() {
        let pc = PsfConfig { medium, d, grid, c1, c2 };
        pc.validate().map_err(|e| CliError::Config(e.to_string()))?;
        let t = Instant::now();
        let r = psf_resolution_profile(&pc).map_err(|e| CliError::numerical(format!("psf omega {}", medium.omega()), e))?;
        manifest.stage(format!("psf w{k}"), t.elapsed().as_secs_f64());
        let fields = [("im_f11", &r.im_f11), ("im_f22", &r.im_f22), ("abs_f", &r.abs_f), ("abs_jd_minus_f", &r.abs_jd_minus_f)];
        for (name, v) in fields {
            let g = ImagingGrid { spec: grid, values: v.clone() };
            out.add(format!("psf_w{k}_{name}.csv"), csv_bytes(&g)?);
        }
        out.add(format!("psf_w{k}_summary.txt"), format!("omega {:.16e}\n{}", medium.omega(), r.summary()).into_bytes());
    }
    out.commit(manifest)
}

/// Runs the self-checks for the config's first medium, or the default one.
pub fn cmd_validate(cfg: Option<&ExperimentConfig>, out: Option<&Path>) -> Result<ValidationReport, CliError> {
    let medium = match cfg {
        Some(c) => c.media()?[0],
        None => ElasticMedium::new(0.5, 0.25, 2.0 * PI).expect("default medium"),
    };
    let report = run_validation(&medium);
    print!("{report}");
    if let Some(dir) = out {
        let mut set = OutputSet::new(dir);
        set.add("validation_report.txt", report.to_string().into_bytes());
        set.commit(RunManifest::new("validate", None, None))?;
    }
    if report.all_passed() {
        Ok(report)
    } else {
        let names: Vec<String> = report.failures().map(|c| format!("{} ({})", c.name, c.detail)).collect();
        Err(CliError::Validation(names.join("; ")))
    }
}
