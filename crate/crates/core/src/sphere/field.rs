use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::grid::{DerivativeScheme, SphereGrid};
use crate::error::{Error, Result};
use crate::Vec3;

/// Sampled support function `h > 0` of a convex body.
#[derive(Debug, Clone, PartialEq)]
pub struct SupportField {
    grid: Arc<SphereGrid>,
    values: Vec<f64>,
}

impl SupportField {
    pub fn new(grid: Arc<SphereGrid>, values: Vec<f64>) -> Result<Self> {
        grid.check_len(values.len())?;
        if let Some((node, &value)) = values.iter().enumerate().find(|(_, v)| !(**v > 0.0)) {
            return Err(Error::NonPositive { node, value });
        }
        Ok(SupportField { grid, values })
    }

    pub fn from_fn(grid: Arc<SphereGrid>, f: impl Fn(f64) -> f64) -> Result<Self> {
        let values = grid.angles().iter().map(|&t| f(t)).collect();
        Self::new(grid, values)
    }

    /// Ball of radius `radius` centred at the origin.
    pub fn ball(grid: Arc<SphereGrid>, radius: f64) -> Result<Self> {
        Self::new(grid.clone(), vec![radius; grid.len()])
    }

    /// Ball of radius `radius` centred at `center` (`center` must lie inside).
    pub fn translated_ball(grid: Arc<SphereGrid>, radius: f64, center: Vec3) -> Result<Self> {
        let values = grid.directions().iter().map(|x| radius + center.dot(x)).collect();
        Self::new(grid, values)
    }

    /// Ellipse `x²/a² + y²/b² ≤ 1` (n = 2), or the prolate/oblate spheroid with
    /// equatorial semi-axis `a` and polar semi-axis `b` (axisymmetric n = 3).
    pub fn ellipse(grid: Arc<SphereGrid>, a: f64, b: f64) -> Result<Self> {
        if !(a > 0.0 && b > 0.0) {
            return Err(Error::Parameter(format!("ellipse semi-axes must be positive, got a = {a}, b = {b}")));
        }
        let values = grid
            .directions()
            .iter()
            .map(|x| match grid.dim() {
                2 => (a * a * x.x * x.x + b * b * x.y * x.y).sqrt(),
                _ => (a * a * x.x * x.x + b * b * x.z * x.z).sqrt(),
            })
            .collect();
        Self::new(grid, values)
    }

    /// `h(θ) = c₀ + Σ (a_m cos mθ + b_m sin mθ)`; for the axisymmetric sphere
    /// only cosine modes are smooth, so sine coefficients are rejected there.
    pub fn fourier(grid: Arc<SphereGrid>, mean: f64, cos: &[f64], sin: &[f64]) -> Result<Self> {
        let values = fourier_values(&grid, mean, cos, sin)?;
        Self::new(grid, values)
    }

    pub fn grid(&self) -> &Arc<SphereGrid> {
        &self.grid
    }

    pub fn dim(&self) -> usize {
        self.grid.dim()
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.len() as f64
    }

    /// Pointwise scaling `λh` (the dilated body `λΩ`).
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        Self::new(self.grid.clone(), self.values.iter().map(|v| v * factor).collect())
    }

    /// `h(x) + v·x`: the body translated by `v`.
    pub fn translated(&self, shift: Vec3) -> Result<Self> {
        let values = self.values.iter().zip(self.grid.directions()).map(|(h, x)| h + shift.dot(x)).collect();
        Self::new(self.grid.clone(), values)
    }

    pub(crate) fn same_grid(&self, other_grid: &SphereGrid) -> Result<()> {
        if *self.grid != *other_grid {
            return Err(Error::GridMismatch);
        }
        Ok(())
    }

    pub fn snapshot(&self) -> FieldSnapshot {
        FieldSnapshot {
            dim: self.dim(),
            n_nodes: self.len(),
            angles: self.grid.angles().to_vec(),
            h: self.values.clone(),
        }
    }

    /// Rebuild a field from a snapshot; the angles must be exactly those of
    /// the grid regenerated from `(dim, n_nodes)`.
    pub fn from_snapshot(snapshot: &FieldSnapshot, scheme: DerivativeScheme) -> Result<Self> {
        let grid = SphereGrid::with_scheme(snapshot.dim, snapshot.n_nodes, scheme)?;
        if snapshot.angles.len() != snapshot.n_nodes || snapshot.h.len() != snapshot.n_nodes {
            return Err(Error::Snapshot(format!(
                "expected {} angles and values, found {} and {}",
                snapshot.n_nodes,
                snapshot.angles.len(),
                snapshot.h.len()
            )));
        }
        if grid.angles() != snapshot.angles.as_slice() {
            return Err(Error::Snapshot("angles do not match the standard grid".into()));
        }
        Self::new(grid, snapshot.h.clone())
    }
}

pub(crate) fn fourier_values(grid: &SphereGrid, mean: f64, cos: &[f64], sin: &[f64]) -> Result<Vec<f64>> {
    if grid.dim() == 3 && sin.iter().any(|s| *s != 0.0) {
        return Err(Error::Parameter("sine modes are not smooth axisymmetric functions on S^2".into()));
    }
    Ok(grid
        .angles()
        .iter()
        .map(|&t| {
            let mut v = mean;
            for (m, c) in cos.iter().enumerate() {
                v += c * ((m + 1) as f64 * t).cos();
            }
            for (m, s) in sin.iter().enumerate() {
                v += s * ((m + 1) as f64 * t).sin();
            }
            v
        })
        .collect())
}

/// JSON form `{dim, n_nodes, angles[], h[]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldSnapshot {
    pub dim: usize,
    pub n_nodes: usize,
    pub angles: Vec<f64>,
    pub h: Vec<f64>,
}
