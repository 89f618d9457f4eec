use std::f64::consts::PI;
use std::sync::Arc;

use rustfft::num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::Vec3;

/// Minimum node count for the finite-difference stencil.
pub const MIN_FD_NODES: usize = 8;

/// How angular derivatives are taken on the grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DerivativeScheme {
    /// Fourth-order periodic central differences.
    #[default]
    Fd4,
    /// Trigonometric interpolation (FFT).
    Spectral,
}

/// Discretization of the unit sphere `S^{n-1}`.
///
/// For `n = 2` the nodes are `θ_i = 2πi/N` on the full circle. For `n = 3` the
/// grid carries axisymmetric fields: `M` polar angles `θ_j = (j + ½)π/M`, the
/// poles excluded, each node standing for the ring of latitude through it.
/// Directions and tangents are stored on the meridian `φ = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct SphereGrid {
    dim: usize,
    angles: Vec<f64>,
    directions: Vec<Vec3>,
    tangents: Vec<Vec3>,
    weights: Vec<f64>,
    scheme: DerivativeScheme,
}

impl SphereGrid {
    /// Uniform periodic grid on `S^1`.
    pub fn circle(nodes: usize) -> Result<Arc<Self>> {
        Self::with_scheme(2, nodes, DerivativeScheme::default())
    }

    /// Open polar grid on `S^2` for axisymmetric fields.
    pub fn axisymmetric(nodes: usize) -> Result<Arc<Self>> {
        Self::with_scheme(3, nodes, DerivativeScheme::default())
    }

    pub fn with_scheme(dim: usize, nodes: usize, scheme: DerivativeScheme) -> Result<Arc<Self>> {
        if nodes < 3 {
            return Err(Error::GridTooSmall { nodes, min: 3 });
        }
        let grid = match dim {
            2 => {
                let step = 2.0 * PI / nodes as f64;
                let angles: Vec<f64> = (0..nodes).map(|i| step * i as f64).collect();
                let directions = angles.iter().map(|&t| Vec3::new(t.cos(), t.sin(), 0.0)).collect();
                let tangents = angles.iter().map(|&t| Vec3::new(-t.sin(), t.cos(), 0.0)).collect();
                SphereGrid { dim, angles, directions, tangents, weights: vec![step; nodes], scheme }
            }
            3 => {
                let step = PI / nodes as f64;
                let angles: Vec<f64> = (0..nodes).map(|j| step * (j as f64 + 0.5)).collect();
                let directions = angles.iter().map(|&t| Vec3::new(t.sin(), 0.0, t.cos())).collect();
                let tangents = angles.iter().map(|&t| Vec3::new(t.cos(), 0.0, -t.sin())).collect();
                // exact area of the latitude band around each node; the bands tile S^2
                let half = (0.5 * step).sin();
                let weights = angles.iter().map(|&t| 4.0 * PI * t.sin() * half).collect();
                SphereGrid { dim, angles, directions, tangents, weights, scheme }
            }
            other => return Err(Error::UnsupportedDimension(other)),
        };
        Ok(Arc::new(grid))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.angles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.angles.is_empty()
    }

    pub fn scheme(&self) -> DerivativeScheme {
        self.scheme
    }

    pub fn angles(&self) -> &[f64] {
        &self.angles
    }

    /// Unit normals `x_i`.
    pub fn directions(&self) -> &[Vec3] {
        &self.directions
    }

    /// Unit tangent `e` (circle) or `e_θ` (axisymmetric sphere) at each node.
    pub fn tangents(&self) -> &[Vec3] {
        &self.tangents
    }

    /// The azimuthal tangent `e_φ` on the meridian `φ = 0`.
    pub fn azimuthal_tangent(&self) -> Vec3 {
        Vec3::new(0.0, 1.0, 0.0)
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Area of `S^{n-1}`.
    pub fn sphere_area(&self) -> f64 {
        if self.dim == 2 {
            2.0 * PI
        } else {
            4.0 * PI
        }
    }

    /// Quadrature `∫ g dx` of a sampled field.
    pub fn integrate(&self, values: &[f64]) -> f64 {
        debug_assert_eq!(values.len(), self.len());
        self.weights.iter().zip(values).map(|(w, v)| w * v).sum()
    }

    /// `∫ g·x dx` as a vector (first moment).
    pub fn first_moment(&self, values: &[f64]) -> Vec3 {
        let mut moment = Vec3::zeros();
        for ((w, v), x) in self.weights.iter().zip(values).zip(&self.directions) {
            // ring average of x over φ keeps only the axial component
            let x = if self.dim == 3 { Vec3::new(0.0, 0.0, x.z) } else { *x };
            moment += x * (w * v);
        }
        moment
    }

    pub(crate) fn check_len(&self, got: usize) -> Result<()> {
        if got != self.len() {
            return Err(Error::LengthMismatch { expected: self.len(), got });
        }
        Ok(())
    }

    /// First and second angular derivatives of a sampled field
    /// (`d/dθ` on the circle, `∂_θ` along the meridian for axisymmetric fields).
    pub fn derivatives(&self, values: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
        self.check_len(values.len())?;
        if self.scheme == DerivativeScheme::Fd4 && self.len() < MIN_FD_NODES {
            return Err(Error::GridTooSmall { nodes: self.len(), min: MIN_FD_NODES });
        }
        match self.dim {
            2 => Ok(self.periodic_derivatives(values, 2.0 * PI / self.len() as f64)),
            _ => {
                // reflect through both poles: an axisymmetric field is an even,
                // 2π-periodic function of the polar angle
                let m = self.len();
                let mut extended = Vec::with_capacity(2 * m);
                extended.extend_from_slice(values);
                extended.extend(values.iter().rev());
                let (mut first, mut second) = self.periodic_derivatives(&extended, PI / m as f64);
                first.truncate(m);
                second.truncate(m);
                Ok((first, second))
            }
        }
    }

    fn periodic_derivatives(&self, values: &[f64], spacing: f64) -> (Vec<f64>, Vec<f64>) {
        match self.scheme {
            DerivativeScheme::Fd4 => fd4_periodic(values, spacing),
            DerivativeScheme::Spectral => spectral_periodic(values, spacing),
        }
    }

    /// Largest magnitude of the discrete second-derivative symbol, i.e. the
    /// stiffest angular mode the grid resolves.
    pub fn second_derivative_bound(&self) -> f64 {
        let spacing = match self.dim {
            2 => 2.0 * PI / self.len() as f64,
            _ => PI / self.len() as f64,
        };
        match self.scheme {
            DerivativeScheme::Fd4 => 16.0 / (3.0 * spacing * spacing),
            DerivativeScheme::Spectral => (PI / spacing).powi(2),
        }
    }
}

fn fd4_periodic(values: &[f64], spacing: f64) -> (Vec<f64>, Vec<f64>) {
    let n = values.len();
    let at = |i: isize| values[i.rem_euclid(n as isize) as usize];
    let mut first = Vec::with_capacity(n);
    let mut second = Vec::with_capacity(n);
    for i in 0..n as isize {
        let (m2, m1, c, p1, p2) = (at(i - 2), at(i - 1), at(i), at(i + 1), at(i + 2));
        first.push((m2 - 8.0 * m1 + 8.0 * p1 - p2) / (12.0 * spacing));
        second.push((-m2 + 16.0 * m1 - 30.0 * c + 16.0 * p1 - p2) / (12.0 * spacing * spacing));
    }
    (first, second)
}

fn spectral_periodic(values: &[f64], spacing: f64) -> (Vec<f64>, Vec<f64>) {
    let n = values.len();
    let mut planner = FftPlanner::<f64>::new();
    let forward = planner.plan_fft_forward(n);
    let inverse = planner.plan_fft_inverse(n);

    let mut spectrum: Vec<Complex64> = values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    forward.process(&mut spectrum);
    // drop modes at the round-off level; differentiation would amplify them by k²
    let peak = spectrum.iter().map(|c| c.norm()).fold(0.0, f64::max);
    let floor = n as f64 * f64::EPSILON * peak;
    for c in spectrum.iter_mut().filter(|c| c.norm() <= floor) {
        *c = Complex64::new(0.0, 0.0);
    }

    // angular wavenumbers for a period of n·spacing
    let scale = 2.0 * PI / (n as f64 * spacing);
    let mut first_hat = spectrum.clone();
    let mut second_hat = spectrum;
    for (idx, (a, b)) in first_hat.iter_mut().zip(second_hat.iter_mut()).enumerate() {
        let signed = if idx <= n / 2 { idx as f64 } else { idx as f64 - n as f64 };
        let wave = signed * scale;
        if n % 2 == 0 && idx == n / 2 {
            *a = Complex64::new(0.0, 0.0);
        } else {
            *a *= Complex64::new(0.0, wave);
        }
        *b *= -wave * wave;
    }
    inverse.process(&mut first_hat);
    inverse.process(&mut second_hat);
    let norm = 1.0 / n as f64;
    (first_hat.iter().map(|c| c.re * norm).collect(), second_hat.iter().map(|c| c.re * norm).collect())
}
