use std::path::{Path, PathBuf};
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::flow::{DensityField, DensitySnapshot, FlowConfig};
use crate::interior::{MfsConfig, BALL_TOLERANCE};
use crate::sphere::{certify_convex, DerivativeScheme, FieldSnapshot, SphereGrid, SupportField};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BodyKind {
    Ball,
    Ellipse,
    Fourier,
    Snapshot,
}

/// `[body]`: the initial support function.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BodySection {
    pub kind: BodyKind,
    pub radius: f64,
    /// Semi-axes of the ellipse (equatorial and polar for n = 3).
    pub a: f64,
    pub b: f64,
    pub mean: f64,
    pub cos: Vec<f64>,
    pub sin: Vec<f64>,
    pub path: Option<PathBuf>,
    /// Amplitude of a seeded random trigonometric perturbation added to `h`.
    pub perturbation: f64,
    pub perturbation_modes: usize,
}

impl Default for BodySection {
    fn default() -> Self {
        BodySection {
            kind: BodyKind::Ball,
            radius: 1.0,
            a: 1.0,
            b: 1.0,
            mean: 1.0,
            cos: Vec::new(),
            sin: Vec::new(),
            path: None,
            perturbation: 0.0,
            perturbation_modes: 4,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DensityKind {
    Constant,
    Fourier,
    File,
}

/// `[density]`: the prescribed data `f`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DensitySection {
    pub kind: DensityKind,
    pub value: f64,
    pub mean: f64,
    pub cos: Vec<f64>,
    pub sin: Vec<f64>,
    pub path: Option<PathBuf>,
}

impl Default for DensitySection {
    fn default() -> Self {
        DensitySection {
            kind: DensityKind::Constant,
            value: 1.0,
            mean: 1.0,
            cos: Vec::new(),
            sin: Vec::new(),
            path: None,
        }
    }
}

/// `[output]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputSection {
    pub dir: PathBuf,
    /// Snapshot every `snapshot_stride` accepted steps; 0 disables.
    pub snapshot_stride: usize,
}

impl Default for OutputSection {
    fn default() -> Self {
        OutputSection { dir: PathBuf::from("out"), snapshot_stride: 500 }
    }
}

/// `[hadamard]`: direction `θ` as a trigonometric polynomial and the `ε` sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct HadamardSection {
    pub mean: f64,
    pub cos: Vec<f64>,
    pub sin: Vec<f64>,
    pub eps: Vec<f64>,
}

impl Default for HadamardSection {
    fn default() -> Self {
        HadamardSection { mean: 1.0, cos: Vec::new(), sin: Vec::new(), eps: vec![1e-2, 1e-3, 1e-4] }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub dimension: usize,
    pub order: usize,
    pub grid: usize,
    pub scheme: DerivativeScheme,
    pub seed: u64,
    pub body: BodySection,
    pub density: DensitySection,
    pub flow: FlowConfig,
    pub mfs: MfsConfig,
    pub output: OutputSection,
    pub hadamard: HadamardSection,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            dimension: 2,
            order: 1,
            grid: 128,
            scheme: DerivativeScheme::Fd4,
            seed: 0,
            body: BodySection::default(),
            density: DensitySection::default(),
            flow: FlowConfig::default(),
            mfs: MfsConfig::default(),
            output: OutputSection::default(),
            hadamard: HadamardSection::default(),
        }
    }
}

/// Parse and validate a TOML document. Relative paths stay relative to the
/// working directory; use [`load_config`] to resolve them against the file.
pub fn parse_config(text: &str) -> Result<RunConfig> {
    let cfg = parse_config_unchecked(text)?;
    cfg.validate()?;
    Ok(cfg)
}

pub fn load_config(path: &Path) -> Result<RunConfig> {
    let text = std::fs::read_to_string(path)?;
    let base = path.parent().unwrap_or(Path::new("."));
    let mut cfg: RunConfig = parse_config_unchecked(&text)?;
    for p in [&mut cfg.body.path, &mut cfg.density.path].into_iter().flatten() {
        if p.is_relative() {
            *p = base.join(&*p);
        }
    }
    cfg.validate()?;
    Ok(cfg)
}

fn parse_config_unchecked(text: &str) -> Result<RunConfig> {
    toml::from_str(text).map_err(|e| {
        let line = e.span().map(|span| text[..span.start.min(text.len())].matches('\n').count() + 1);
        Error::Config { line, message: e.message().to_string() }
    })
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        if !matches!(self.dimension, 2 | 3) {
            return Err(Error::UnsupportedDimension(self.dimension));
        }
        if self.order < 1 || self.order > self.dimension - 1 {
            return Err(Error::config(format!("order = {} outside 1..={}", self.order, self.dimension - 1)));
        }
        self.flow.validate()?;
        self.mfs.validate()?;
        let b = &self.body;
        match b.kind {
            BodyKind::Ball if !(b.radius > 0.0) => return Err(Error::config("body.radius must be positive")),
            BodyKind::Ellipse if !(b.a > 0.0 && b.b > 0.0) => {
                return Err(Error::config("body.a and body.b must be positive"))
            }
            BodyKind::Snapshot if b.path.is_none() => {
                return Err(Error::config("body.path is required for kind = \"snapshot\""))
            }
            _ => {}
        }
        if !(b.perturbation >= 0.0) {
            return Err(Error::config("body.perturbation must be non-negative"));
        }
        let d = &self.density;
        match d.kind {
            DensityKind::Constant if !(d.value > 0.0) => return Err(Error::config("density.value must be positive")),
            DensityKind::File if d.path.is_none() => {
                return Err(Error::config("density.path is required for kind = \"file\""))
            }
            _ => {}
        }
        for path in [&b.path, &d.path].into_iter().flatten() {
            if !path.exists() {
                return Err(Error::config(format!("file {} does not exist", path.display())));
            }
        }
        if self.hadamard.eps.iter().any(|e| !(*e > 0.0)) || self.hadamard.eps.is_empty() {
            return Err(Error::config("hadamard.eps must be a non-empty list of positive values"));
        }
        let round_body = b.kind == BodyKind::Ball && b.perturbation == 0.0;
        if self.order >= 2 && !round_body && b.kind != BodyKind::Snapshot {
            return Err(Error::Capability {
                dim: self.dimension,
                k: self.order,
                hint: "k >= 2 runs need a ball as initial body; other shapes need a fully nonlinear interior solver"
                    .into(),
            });
        }
        Ok(())
    }

    pub fn sphere_grid(&self) -> Result<Arc<SphereGrid>> {
        SphereGrid::with_scheme(self.dimension, self.grid, self.scheme)
    }

    pub fn initial_body(&self, grid: &Arc<SphereGrid>) -> Result<SupportField> {
        let b = &self.body;
        let body = match b.kind {
            BodyKind::Ball => SupportField::ball(grid.clone(), b.radius)?,
            BodyKind::Ellipse => SupportField::ellipse(grid.clone(), b.a, b.b)?,
            BodyKind::Fourier => SupportField::fourier(grid.clone(), b.mean, &b.cos, &b.sin)?,
            BodyKind::Snapshot => {
                let path = b.path.as_ref().ok_or_else(|| Error::config("body.path missing"))?;
                let snap: FieldSnapshot = serde_json::from_str(&std::fs::read_to_string(path)?)?;
                let body = SupportField::from_snapshot(&snap, self.scheme)?;
                if body.grid() != grid {
                    return Err(Error::Snapshot("snapshot grid differs from the configured grid".into()));
                }
                body
            }
        };
        let body = if b.perturbation > 0.0 { self.perturb(&body)? } else { body };
        if self.order >= 2 {
            let mean = body.mean();
            if body.values().iter().any(|v| (v - mean).abs() > BALL_TOLERANCE * mean) {
                return Err(Error::Capability {
                    dim: self.dimension,
                    k: self.order,
                    hint: "initial body is not a ball".into(),
                });
            }
        }
        certify_convex(&body)?;
        Ok(body)
    }

    /// Adds `Σ_{m=2}^{M+1} (a_m cos mθ + b_m sin mθ)` with coefficients drawn
    /// uniformly from `[−ε/m², ε/m²]` by a generator seeded with `seed`.
    fn perturb(&self, body: &SupportField) -> Result<SupportField> {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        let amp = self.body.perturbation;
        let modes = self.body.perturbation_modes;
        let mut cos = vec![0.0; modes + 1];
        let mut sin = vec![0.0; modes + 1];
        for m in 2..=modes + 1 {
            let bound = amp / (m * m) as f64;
            cos[m - 1] = rng.random_range(-bound..=bound);
            if self.dimension == 2 {
                sin[m - 1] = rng.random_range(-bound..=bound);
            }
        }
        let grid = body.grid();
        let bump = crate::sphere::fourier_values(grid, 0.0, &cos, &sin)?;
        SupportField::new(grid.clone(), body.values().iter().zip(bump).map(|(h, p)| h + p).collect())
    }

    pub fn density_field(&self, grid: &Arc<SphereGrid>) -> Result<DensityField> {
        let d = &self.density;
        match d.kind {
            DensityKind::Constant => DensityField::constant(grid.clone(), d.value),
            DensityKind::Fourier => DensityField::fourier(grid.clone(), d.mean, &d.cos, &d.sin),
            DensityKind::File => {
                let path = d.path.as_ref().ok_or_else(|| Error::config("density.path missing"))?;
                let snap: DensitySnapshot = serde_json::from_str(&std::fs::read_to_string(path)?)?;
                DensityField::from_snapshot(&snap, grid.clone())
            }
        }
    }

    pub fn hadamard_direction(&self, grid: &Arc<SphereGrid>) -> Result<SupportField> {
        let h = &self.hadamard;
        SupportField::fourier(grid.clone(), h.mean, &h.cos, &h.sin)
    }
}
