use std::sync::Arc;

use rand::Rng;
use rand_distr::StandardNormal;
use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::{SeedTree, StreamTag};

pub const MIN_RESOLUTION: usize = 64;
pub const MAX_RESOLUTION: usize = 4096;

/// Factor taking the graph-normalized field (variance `≈ log(N)/2π`) to the
/// normalization used by the area measure (variance `≈ log N`).
pub fn lqg_normalization() -> f64 {
    (2.0 * std::f64::consts::PI).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BoundaryCondition {
    ZeroDirichlet,
    /// Synthetic fields with arbitrary boundary values.
    Unconstrained,
}

/// Field on the vertices `(x, y) ∈ {0..=N}²` of an `N×N` grid covering the
/// square `[-1, 1]²`; stored row-major (`y` outer).
#[derive(Debug, Clone, PartialEq)]
pub struct GridField {
    resolution: usize,
    values: Vec<f64>,
    seed: Option<u64>,
    boundary: BoundaryCondition,
}

fn check_resolution(resolution: usize) -> Result<()> {
    if !resolution.is_power_of_two() || !(MIN_RESOLUTION..=MAX_RESOLUTION).contains(&resolution) {
        return Err(Error::param(
            "resolution",
            format!("{resolution} must be a power of 2 in [{MIN_RESOLUTION}, {MAX_RESOLUTION}]"),
        ));
    }
    Ok(())
}

impl GridField {
    pub fn from_fn(resolution: usize, f: impl Fn(usize, usize) -> f64) -> Result<Self> {
        check_resolution(resolution)?;
        let side = resolution + 1;
        let values = (0..side * side).map(|k| f(k % side, k / side)).collect();
        Ok(GridField {
            resolution,
            values,
            seed: None,
            boundary: BoundaryCondition::Unconstrained,
        })
    }

    pub fn constant(resolution: usize, c: f64) -> Result<Self> {
        Self::from_fn(resolution, |_, _| c)
    }

    pub(crate) fn from_parts(
        resolution: usize,
        values: Vec<f64>,
        seed: Option<u64>,
        boundary: BoundaryCondition,
    ) -> Result<Self> {
        check_resolution(resolution)?;
        if values.len() != (resolution + 1) * (resolution + 1) {
            return Err(Error::param("values", format!("expected {} values", (resolution + 1).pow(2))));
        }
        Ok(GridField {
            resolution,
            values,
            seed,
            boundary,
        })
    }

    pub fn resolution(&self) -> usize {
        self.resolution
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn seed(&self) -> Option<u64> {
        self.seed
    }

    pub fn boundary(&self) -> BoundaryCondition {
        self.boundary
    }

    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.values[y * (self.resolution + 1) + x]
    }

    /// Grid spacing in the physical square.
    pub fn spacing(&self) -> f64 {
        2.0 / self.resolution as f64
    }

    /// Grid coordinates of a physical point.
    pub fn to_grid(&self, z: Complex64) -> (f64, f64) {
        let h = self.spacing();
        ((z.re + 1.0) / h, (z.im + 1.0) / h)
    }

    pub fn to_physical(&self, x: f64, y: f64) -> Complex64 {
        let h = self.spacing();
        Complex64::new(x * h - 1.0, y * h - 1.0)
    }

    pub fn in_domain(&self, x: f64, y: f64) -> bool {
        let n = self.resolution as f64;
        (0.0..=n).contains(&x) && (0.0..=n).contains(&y)
    }

    /// Bilinear interpolation; `None` outside the grid.
    pub fn interpolate(&self, x: f64, y: f64) -> Option<f64> {
        if !self.in_domain(x, y) {
            return None;
        }
        let n = self.resolution;
        let i = (x.floor() as usize).min(n - 1);
        let j = (y.floor() as usize).min(n - 1);
        let (fx, fy) = (x - i as f64, y - j as f64);
        let (v00, v10) = (self.get(i, j), self.get(i + 1, j));
        let (v01, v11) = (self.get(i, j + 1), self.get(i + 1, j + 1));
        let lo = v00 + fx * (v10 - v00);
        let hi = v01 + fx * (v11 - v01);
        Some(lo + fy * (hi - lo))
    }

    pub fn add(&self, other: &GridField) -> Result<GridField> {
        if self.resolution != other.resolution {
            return Err(Error::param("other", "resolutions differ"));
        }
        let values = self.values.iter().zip(&other.values).map(|(a, b)| a + b).collect();
        GridField::from_parts(self.resolution, values, None, BoundaryCondition::Unconstrained)
    }

    pub fn scaled(&self, factor: f64) -> GridField {
        GridField {
            values: self.values.iter().map(|v| v * factor).collect(),
            ..self.clone()
        }
    }
}

/// Spectral factorization of the Dirichlet Laplacian on an `N×N` grid.
///
/// Eigenvectors are products of `√(2/N) sin(πjx/N)`, eigenvalues
/// `4 - 2cos(πj/N) - 2cos(πk/N)`.
pub struct DgffSampler {
    resolution: usize,
    inv_sqrt_eig: Vec<f64>,
    fft: Arc<dyn Fft<f64>>,
}

impl std::fmt::Debug for DgffSampler {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("DgffSampler").field("resolution", &self.resolution).finish()
    }
}

pub(crate) fn eigenvalue(n: usize, j: usize, k: usize) -> f64 {
    let w = std::f64::consts::PI / n as f64;
    4.0 - 2.0 * (w * j as f64).cos() - 2.0 * (w * k as f64).cos()
}

impl DgffSampler {
    pub fn new(resolution: usize) -> Result<Self> {
        check_resolution(resolution)?;
        let m = resolution - 1;
        let mut inv_sqrt_eig = Vec::with_capacity(m * m);
        for j in 1..resolution {
            for k in 1..resolution {
                inv_sqrt_eig.push(eigenvalue(resolution, j, k).sqrt().recip());
            }
        }
        let fft = FftPlanner::new().plan_fft_forward(2 * resolution);
        Ok(DgffSampler {
            resolution,
            inv_sqrt_eig,
            fft,
        })
    }

    pub fn resolution(&self) -> usize {
        self.resolution
    }

    /// In place `x_k ← Σ_n x_n sin(πnk/N)` for a length-`N-1` slice.
    fn dst1(&self, data: &mut [f64], buf: &mut [Complex64]) {
        let n = self.resolution;
        buf.fill(Complex64::new(0.0, 0.0));
        for (i, &v) in data.iter().enumerate() {
            buf[i + 1].re = v;
            buf[2 * n - 1 - i].re = -v;
        }
        self.fft.process(buf);
        for (i, v) in data.iter_mut().enumerate() {
            *v = -0.5 * buf[i + 1].im;
        }
    }

    /// Field from mode coefficients `xi[(j-1)(N-1) + (k-1)]`.
    pub(crate) fn synthesize(&self, mut coeffs: Vec<f64>, seed: Option<u64>) -> GridField {
        let n = self.resolution;
        let m = n - 1;
        let norm = 2.0 / n as f64;
        for (c, s) in coeffs.iter_mut().zip(&self.inv_sqrt_eig) {
            *c *= s * norm;
        }
        let mut buf = vec![Complex64::new(0.0, 0.0); 2 * n];
        // rows: j fixed, transform over k → y
        for row in coeffs.chunks_exact_mut(m) {
            self.dst1(row, &mut buf);
        }
        // columns: y fixed, transform over j → x
        let mut col = vec![0.0; m];
        let side = n + 1;
        let mut values = vec![0.0; side * side];
        for y in 0..m {
            for (j, c) in col.iter_mut().enumerate() {
                *c = coeffs[j * m + y];
            }
            self.dst1(&mut col, &mut buf);
            for (x, &v) in col.iter().enumerate() {
                values[(y + 1) * side + x + 1] = v;
            }
        }
        GridField {
            resolution: n,
            values,
            seed,
            boundary: BoundaryCondition::ZeroDirichlet,
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> GridField {
        let m = self.resolution - 1;
        let xi: Vec<f64> = (0..m * m).map(|_| rng.sample(StandardNormal)).collect();
        self.synthesize(xi, None)
    }

    pub fn sample_seeded(&self, seed: u64) -> GridField {
        let mut rng = SeedTree::new(seed).stream(StreamTag::Field, 0);
        let mut f = self.sample(&mut rng);
        f.seed = Some(seed);
        f
    }

    /// `Var h(x, y)` for the vertex `(x, y)`, summed over modes.
    pub fn green_diagonal(&self, x: usize, y: usize) -> f64 {
        self.variance_of(|j, k| {
            let w = std::f64::consts::PI / self.resolution as f64;
            (w * (j * x) as f64).sin() * (w * (k * y) as f64).sin()
        })
    }

    /// Variance of a linear functional given its pairing with the unnormalized
    /// sine products `sin(πjx/N) sin(πky/N)`.
    pub fn variance_of(&self, pairing: impl Fn(usize, usize) -> f64) -> f64 {
        let n = self.resolution;
        let norm = 2.0 / n as f64;
        let mut acc = 0.0;
        for j in 1..n {
            for k in 1..n {
                let p = pairing(j, k) * norm;
                acc += p * p / eigenvalue(n, j, k);
            }
        }
        acc
    }
}

/// Zero-boundary discrete Gaussian free field with covariance the inverse of
/// the graph Laplacian.
pub fn sample_dgff(resolution: usize, seed: u64) -> Result<GridField> {
    Ok(DgffSampler::new(resolution)?.sample_seeded(seed))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stats::RunningMean;

    /// `-Δu = δ_p` by conjugate gradients, for the Green's function oracle.
    fn green_by_cg(n: usize, px: usize, py: usize) -> f64 {
        let side = n + 1;
        let apply = |u: &[f64], out: &mut [f64]| {
            for y in 1..n {
                for x in 1..n {
                    let k = y * side + x;
                    out[k] = 4.0 * u[k] - u[k - 1] - u[k + 1] - u[k - side] - u[k + side];
                }
            }
        };
        let mut b = vec![0.0; side * side];
        b[py * side + px] = 1.0;
        let mut u = vec![0.0; side * side];
        let mut r = b.clone();
        let mut p = r.clone();
        let mut ap = vec![0.0; side * side];
        let mut rr: f64 = r.iter().map(|v| v * v).sum();
        for _ in 0..10 * n * n {
            apply(&p, &mut ap);
            let alpha = rr / p.iter().zip(&ap).map(|(a, b)| a * b).sum::<f64>();
            for k in 0..u.len() {
                u[k] += alpha * p[k];
                r[k] -= alpha * ap[k];
            }
            let next: f64 = r.iter().map(|v| v * v).sum();
            if next < 1e-28 {
                break;
            }
            for k in 0..p.len() {
                p[k] = r[k] + next / rr * p[k];
            }
            rr = next;
        }
        u[py * side + px]
    }

    #[test]
    fn resolution_is_validated() {
        assert!(sample_dgff(100, 0).is_err());
        assert!(sample_dgff(32, 0).is_err());
        assert!(sample_dgff(64, 0).is_ok());
    }

    #[test]
    fn spectral_green_matches_a_direct_solve() {
        let s = DgffSampler::new(64).unwrap();
        for (x, y) in [(32, 32), (5, 40), (1, 1)] {
            let g = s.green_diagonal(x, y);
            assert!((g - green_by_cg(64, x, y)).abs() < 1e-9, "{x} {y}");
        }
    }

    #[test]
    fn synthesis_inverts_the_laplacian() {
        // a single mode must come back as an eigenvector
        let s = DgffSampler::new(64).unwrap();
        let mut xi = vec![0.0; 63 * 63];
        xi[2 * 63 + 4] = 1.0;
        let f = s.synthesize(xi, None);
        let lam = eigenvalue(64, 3, 5);
        for (x, y) in [(10, 20), (33, 7), (60, 60)] {
            let expected = 2.0 / 64.0 / lam.sqrt()
                * (std::f64::consts::PI * 3.0 * x as f64 / 64.0).sin()
                * (std::f64::consts::PI * 5.0 * y as f64 / 64.0).sin();
            assert!((f.get(x, y) - expected).abs() < 1e-14);
        }
    }

    #[test]
    fn boundary_is_zero() {
        let f = sample_dgff(128, 3).unwrap();
        for t in 0..=128 {
            for (x, y) in [(t, 0), (t, 128), (0, t), (128, t)] {
                assert_eq!(f.get(x, y), 0.0);
            }
        }
        assert_eq!(f.boundary(), BoundaryCondition::ZeroDirichlet);
    }

    #[test]
    fn center_variance_ratio_across_resolutions() {
        let mut empirical = Vec::new();
        let mut oracle = Vec::new();
        for n in [128, 256] {
            let s = DgffSampler::new(n).unwrap();
            let tree = SeedTree::new(n as u64);
            let acc: RunningMean = (0..3000)
                .map(|i| {
                    let f = s.sample(&mut tree.stream(StreamTag::Field, i));
                    f.get(n / 2, n / 2).powi(2)
                })
                .collect();
            let g = s.green_diagonal(n / 2, n / 2);
            assert!((acc.mean() - g).abs() < 4.0 * acc.std_error(), "{n}: {} vs {g}", acc.mean());
            empirical.push(acc.mean());
            oracle.push(g);
        }
        // grows like log(N)/2π
        assert!(((oracle[1] - oracle[0]) / (2.0f64.ln() / (2.0 * std::f64::consts::PI)) - 1.0).abs() < 0.01);
        let ratio = empirical[1] / empirical[0];
        assert!((ratio / (oracle[1] / oracle[0]) - 1.0).abs() < 0.1, "{ratio}");
    }

    #[test]
    fn linear_functionals_are_centered() {
        let s = DgffSampler::new(64).unwrap();
        let tree = SeedTree::new(8);
        let acc: RunningMean = (0..2000)
            .map(|i| {
                let f = s.sample(&mut tree.stream(StreamTag::Field, i));
                f.get(20, 30) + 2.0 * f.get(40, 41) - f.get(5, 60)
            })
            .collect();
        assert!(acc.mean().abs() < 3.0 * acc.std_error());
    }

    #[test]
    fn seeded_samples_are_reproducible() {
        assert_eq!(sample_dgff(64, 11).unwrap(), sample_dgff(64, 11).unwrap());
        assert_ne!(sample_dgff(64, 11).unwrap(), sample_dgff(64, 12).unwrap());
    }

    #[test]
    fn interpolation_is_exact_on_vertices_and_constants() {
        let f = sample_dgff(64, 1).unwrap();
        assert_eq!(f.interpolate(10.0, 12.0), Some(f.get(10, 12)));
        assert_eq!(f.interpolate(64.0, 3.0), Some(0.0));
        assert_eq!(f.interpolate(64.5, 3.0), None);
        let c = GridField::constant(64, 0.1).unwrap();
        assert_eq!(c.interpolate(3.3, 7.9), Some(0.1));
    }
}
