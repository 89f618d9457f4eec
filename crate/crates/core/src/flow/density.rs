use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sphere::{fourier_values, SphereGrid};

/// Prescribed positive data `f` on the grid.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityField {
    grid: Arc<SphereGrid>,
    values: Vec<f64>,
    generator: Option<String>,
}

impl DensityField {
    pub fn new(grid: Arc<SphereGrid>, values: Vec<f64>) -> Result<Self> {
        grid.check_len(values.len())?;
        if let Some((node, &value)) = values.iter().enumerate().find(|(_, v)| !(**v > 0.0 && v.is_finite())) {
            return Err(Error::NonPositive { node, value });
        }
        Ok(DensityField { grid, values, generator: None })
    }

    pub fn constant(grid: Arc<SphereGrid>, c: f64) -> Result<Self> {
        let mut f = Self::new(grid.clone(), vec![c; grid.len()])?;
        f.generator = Some(format!("constant {c}"));
        Ok(f)
    }

    /// `f(θ) = c₀ + Σ (a_m cos mθ + b_m sin mθ)`.
    pub fn fourier(grid: Arc<SphereGrid>, mean: f64, cos: &[f64], sin: &[f64]) -> Result<Self> {
        let values = fourier_values(&grid, mean, cos, sin)?;
        let mut f = Self::new(grid, values)?;
        f.generator = Some(format!("fourier mean={mean} cos={cos:?} sin={sin:?}"));
        Ok(f)
    }

    pub fn grid(&self) -> &Arc<SphereGrid> {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn generator(&self) -> Option<&str> {
        self.generator.as_deref()
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn scaled(&self, c: f64) -> Result<Self> {
        let mut f = Self::new(self.grid.clone(), self.values.iter().map(|v| v * c).collect())?;
        f.generator = self.generator.as_ref().map(|g| format!("{c} * ({g})"));
        Ok(f)
    }

    pub fn snapshot(&self) -> DensitySnapshot {
        DensitySnapshot {
            dim: self.grid.dim(),
            n_nodes: self.grid.len(),
            angles: self.grid.angles().to_vec(),
            f: self.values.clone(),
        }
    }

    /// Load tabulated values; the angles must be those of `grid`.
    pub fn from_snapshot(snapshot: &DensitySnapshot, grid: Arc<SphereGrid>) -> Result<Self> {
        if snapshot.dim != grid.dim() || snapshot.n_nodes != grid.len() {
            return Err(Error::Snapshot(format!(
                "density is tabulated for n = {} on {} nodes, grid has n = {} on {} nodes",
                snapshot.dim,
                snapshot.n_nodes,
                grid.dim(),
                grid.len()
            )));
        }
        if snapshot.angles != grid.angles() {
            return Err(Error::Snapshot("density angles do not match the grid".into()));
        }
        let mut f = Self::new(grid, snapshot.f.clone())?;
        f.generator = Some("table".into());
        Ok(f)
    }
}

/// JSON form `{dim, n_nodes, angles[], f[]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DensitySnapshot {
    pub dim: usize,
    pub n_nodes: usize,
    pub angles: Vec<f64>,
    pub f: Vec<f64>,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_non_positive() {
        let grid = SphereGrid::circle(16).unwrap();
        assert!(DensityField::fourier(grid.clone(), 1.0, &[1.5], &[]).is_err());
        assert!(DensityField::constant(grid, 0.0).is_err());
    }

    #[test]
    fn snapshot_round_trip() {
        let grid = SphereGrid::circle(16).unwrap();
        let f = DensityField::fourier(grid.clone(), 1.0, &[0.1], &[]).unwrap();
        let text = serde_json::to_string(&f.snapshot()).unwrap();
        let back = DensityField::from_snapshot(&serde_json::from_str(&text).unwrap(), grid).unwrap();
        assert_eq!(back.values(), f.values());
        let other = SphereGrid::circle(32).unwrap();
        assert!(DensityField::from_snapshot(&f.snapshot(), other).is_err());
    }
}
