use rustfft::num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::field::{lqg_normalization, GridField};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LqgParams {
    gamma: f64,
    q: f64,
}

impl LqgParams {
    pub fn new(gamma: f64) -> Result<Self> {
        if !(0.0..2.0).contains(&gamma) {
            return Err(Error::param("gamma", format!("{gamma} not in [0, 2)")));
        }
        Ok(LqgParams {
            gamma,
            q: 2.0 / gamma + gamma / 2.0,
        })
    }

    pub fn pure_gravity() -> Self {
        Self::new((8.0f64 / 3.0).sqrt()).unwrap()
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    /// `2/γ + γ/2`; infinite at `γ = 0`.
    pub fn q(&self) -> f64 {
        self.q
    }

    /// `γ·Q = 2 + γ²/2`, finite at `γ = 0`.
    pub fn gamma_q(&self) -> f64 {
        2.0 + self.gamma * self.gamma / 2.0
    }
}

fn circle_points(eps: f64) -> usize {
    ((2.0 * std::f64::consts::PI * eps).ceil() as usize).max(16)
}

/// Mean of `value(center + eps·e^{iθ})` over equispaced angles, in grid units.
fn average_on_circle(
    center: (f64, f64),
    eps: f64,
    mut value: impl FnMut(f64, f64) -> Option<f64>,
) -> Result<f64> {
    let n = circle_points(eps);
    let mut mean = 0.0;
    for k in 0..n {
        let th = 2.0 * std::f64::consts::PI * k as f64 / n as f64;
        let (x, y) = (center.0 + eps * th.cos(), center.1 + eps * th.sin());
        let v = value(x, y).ok_or_else(|| {
            Error::Domain(format!("circle of radius {eps} at ({:.3}, {:.3})", center.0, center.1))
        })?;
        mean += (v - mean) / (k + 1) as f64;
    }
    Ok(mean)
}

/// Average of the field on the circle of radius `eps` (grid units) around
/// `z` (grid coordinates), by bilinear interpolation.
pub fn circle_average(field: &GridField, z: (f64, f64), eps: f64) -> Result<f64> {
    if !(eps >= 2.0) {
        return Err(Error::param("eps", format!("{eps} must be at least 2 grid cells")));
    }
    average_on_circle(z, eps, |x, y| field.interpolate(x, y))
}

/// Set of grid cells; cell `(i, j)` is the square `[i, i+1]×[j, j+1]`.
#[derive(Debug, Clone, PartialEq)]
pub enum Region {
    Cells(Vec<(usize, usize)>),
    /// Disk in physical coordinates; contains the cells whose centers it holds.
    Disk { center: Complex64, radius: f64 },
}

impl Region {
    pub fn cells(&self, resolution: usize) -> Vec<(usize, usize)> {
        match self {
            Region::Cells(c) => c.clone(),
            Region::Disk { center, radius } => {
                let h = 2.0 / resolution as f64;
                let mut out = Vec::new();
                for j in 0..resolution {
                    for i in 0..resolution {
                        let z = Complex64::new((i as f64 + 0.5) * h - 1.0, (j as f64 + 0.5) * h - 1.0);
                        if (z - center).norm() <= *radius {
                            out.push((i, j));
                        }
                    }
                }
                out
            }
        }
    }

    fn contains(&self, z: Complex64, resolution: usize) -> bool {
        match self {
            Region::Disk { center, radius } => (z - center).norm() <= *radius,
            Region::Cells(c) => {
                let h = 2.0 / resolution as f64;
                let (x, y) = ((z.re + 1.0) / h, (z.im + 1.0) / h);
                x >= 0.0 && y >= 0.0 && c.contains(&(x as usize, y as usize))
            }
        }
    }
}

fn check_dyadic(eps: usize) -> Result<()> {
    if !eps.is_power_of_two() || eps < 4 {
        return Err(Error::param("eps", format!("{eps} must be a power of 2, at least 4 cells")));
    }
    Ok(())
}

/// Regularized area density `ε^{γ²/2} e^{γ h_ε}` on every cell whose circle
/// fits in the domain; other cells are `None`.
#[derive(Debug, Clone, PartialEq)]
pub struct LqgMeasure {
    pub eps: usize,
    pub resolution: usize,
    pub cell_masses: Vec<Option<f64>>,
}

impl LqgMeasure {
    pub fn new(field: &GridField, params: &LqgParams, eps: usize) -> Result<Self> {
        check_dyadic(eps)?;
        let n = field.resolution();
        let mut cell_masses = vec![None; n * n];
        for j in 0..n {
            for i in 0..n {
                let c = (i as f64 + 0.5, j as f64 + 0.5);
                if let Ok(m) = cell_mass(field, params, eps, c) {
                    cell_masses[j * n + i] = Some(m);
                }
            }
        }
        Ok(LqgMeasure {
            eps,
            resolution: n,
            cell_masses,
        })
    }

    pub fn area(&self, region: &Region) -> Result<f64> {
        let n = self.resolution;
        region
            .cells(n)
            .into_iter()
            .map(|(i, j)| {
                self.cell_masses
                    .get(j * n + i)
                    .copied()
                    .flatten()
                    .ok_or_else(|| Error::Domain(format!("cell ({i}, {j}) at eps {}", self.eps)))
            })
            .sum()
    }
}

fn cell_mass(field: &GridField, params: &LqgParams, eps: usize, center: (f64, f64)) -> Result<f64> {
    let g = params.gamma();
    let cell = field.spacing();
    let avg = circle_average(field, center, eps as f64)? * lqg_normalization();
    let e = eps as f64 * cell;
    Ok(e.powf(g * g / 2.0) * (g * avg).exp() * cell * cell)
}

/// `Σ_{cells} ε^{γ²/2} e^{γ h_ε(center)} · cell area` with `ε = eps` cells.
pub fn lqg_area(field: &GridField, params: &LqgParams, eps: usize, region: &Region) -> Result<f64> {
    check_dyadic(eps)?;
    let mut total = 0.0;
    for (i, j) in region.cells(field.resolution()) {
        if i >= field.resolution() || j >= field.resolution() {
            return Err(Error::Domain(format!("cell ({i}, {j})")));
        }
        total += cell_mass(field, params, eps, (i as f64 + 0.5, j as f64 + 0.5))?;
    }
    Ok(total)
}

/// Disk automorphism `z ↦ (z - a)/(1 - āz)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mobius {
    pub a: Complex64,
}

impl Mobius {
    pub fn new(a: Complex64) -> Result<Self> {
        if !(a.norm() < 1.0) {
            return Err(Error::param("a", format!("|a| = {} must be < 1", a.norm())));
        }
        Ok(Mobius { a })
    }

    pub fn identity() -> Self {
        Mobius {
            a: Complex64::new(0.0, 0.0),
        }
    }

    pub fn inverse(&self) -> Self {
        Mobius { a: -self.a }
    }

    pub fn apply(&self, z: Complex64) -> Complex64 {
        (z - self.a) / (1.0 - self.a.conj() * z)
    }

    pub fn log_abs_derivative(&self, z: Complex64) -> f64 {
        let d = 1.0 - self.a.conj() * z;
        (1.0 - self.a.norm_sqr()).ln() - 2.0 * d.norm().ln()
    }
}

/// `|μ_{h₁}(A) − μ_{h₂}(φ(A))| / μ_{h₂}(φ(A))` where `h₁ = h₂∘φ + Q log|φ'|`.
///
/// `A` must be a disk inside the unit disk. The circle average of the
/// harmonic term `Q log|φ'|` is its value at the center, so only `h₂∘φ` is
/// resampled on the circles.
pub fn coord_change_check(
    field: &GridField,
    params: &LqgParams,
    phi: &Mobius,
    region: &Region,
    eps: usize,
) -> Result<f64> {
    check_dyadic(eps)?;
    let Region::Disk { center, radius } = region else {
        return Err(Error::param("region", "coordinate change needs a disk"));
    };
    if center.norm() + radius >= 1.0 {
        return Err(Error::Domain("region must lie inside the unit disk".into()));
    }
    let n = field.resolution();
    let h = field.spacing();
    let g = params.gamma();
    let e = eps as f64;
    let norm = lqg_normalization();
    let cell_area = h * h;
    let scale = (e * h).powf(g * g / 2.0);

    let margin_ok = |x: f64, y: f64| x >= e && y >= e && x <= n as f64 - e && y <= n as f64 - e;
    let mut pulled_back = 0.0;
    for (i, j) in region.cells(n) {
        let c = (i as f64 + 0.5, j as f64 + 0.5);
        let z = field.to_physical(c.0, c.1);
        let (fx, fy) = field.to_grid(phi.apply(z));
        if !margin_ok(fx, fy) {
            return Err(Error::Domain(format!("φ(A) within {eps} cells of the boundary")));
        }
        let avg = average_on_circle(c, e, |x, y| {
            let (px, py) = field.to_grid(phi.apply(field.to_physical(x, y)));
            field.interpolate(px, py)
        })?;
        let weight = (g * norm * avg + params.gamma_q() * phi.log_abs_derivative(z)).exp();
        pulled_back += scale * weight * cell_area;
    }

    let inv = phi.inverse();
    let mut direct = 0.0;
    for j in 0..n {
        for i in 0..n {
            let c = (i as f64 + 0.5, j as f64 + 0.5);
            let w = field.to_physical(c.0, c.1);
            if w.norm() >= 1.0 || !region.contains(inv.apply(w), n) {
                continue;
            }
            if !margin_ok(c.0, c.1) {
                return Err(Error::Domain(format!("φ(A) within {eps} cells of the boundary")));
            }
            direct += cell_mass(field, params, eps, c)?;
        }
    }
    if !(direct > 0.0) {
        return Err(Error::Domain("φ(A) contains no cells".into()));
    }
    Ok((pulled_back - direct).abs() / direct)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoordChangeSummary {
    pub gamma: f64,
    pub resolution: usize,
    pub eps: usize,
    pub discrepancies: Vec<f64>,
    pub median: f64,
    pub lower_quartile: f64,
    pub upper_quartile: f64,
}

/// Coordinate-change discrepancy over `fields` independent fields, for the
/// disk of radius `radius` at the origin and `z ↦ (z - shift)/(1 - shift·z)`.
pub fn coord_change_experiment(
    params: &LqgParams,
    resolution: usize,
    eps: usize,
    fields: u64,
    shift: f64,
    radius: f64,
    seed: u64,
) -> Result<CoordChangeSummary> {
    if fields == 0 {
        return Err(Error::param("fields", "need at least one field"));
    }
    let sampler = super::field::DgffSampler::new(resolution)?;
    let phi = Mobius::new(Complex64::new(shift, 0.0))?;
    let region = Region::Disk {
        center: Complex64::new(0.0, 0.0),
        radius,
    };
    let tree = crate::rng::SeedTree::new(seed);
    let mut discrepancies = (0..fields)
        .map(|i| {
            let field = sampler.sample(&mut tree.stream(crate::rng::StreamTag::Field, i));
            coord_change_check(&field, params, &phi, &region, eps)
        })
        .collect::<Result<Vec<_>>>()?;
    let mut sorted = discrepancies.clone();
    sorted.sort_by(f64::total_cmp);
    let q = |p: f64| sorted[((sorted.len() - 1) as f64 * p).round() as usize];
    let summary = CoordChangeSummary {
        gamma: params.gamma(),
        resolution,
        eps,
        median: q(0.5),
        lower_quartile: q(0.25),
        upper_quartile: q(0.75),
        discrepancies: std::mem::take(&mut discrepancies),
    };
    Ok(summary)
}

/// One-dimensional analog of the boundary measure: `Σ ε^{γ²/4} e^{γ h_ε/2}·h`
/// over the vertices of the horizontal chord at row `y`, columns `x0..=x1`.
pub fn chord_boundary_length(
    field: &GridField,
    params: &LqgParams,
    eps: usize,
    y: usize,
    (x0, x1): (usize, usize),
) -> Result<f64> {
    check_dyadic(eps)?;
    if x0 > x1 || x1 > field.resolution() || y > field.resolution() {
        return Err(Error::Domain(format!("chord at row {y}, columns {x0}..={x1}")));
    }
    let g = params.gamma();
    let h = field.spacing();
    let scale = (eps as f64 * h).powf(g * g / 4.0);
    let mut total = 0.0;
    for x in x0..=x1 {
        let avg = circle_average(field, (x as f64, y as f64), eps as f64)? * lqg_normalization();
        total += scale * (g * avg / 2.0).exp() * h;
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lqg::field::{sample_dgff, DgffSampler};
    use crate::rng::{SeedTree, StreamTag};
    use crate::stats::RunningMean;

    #[test]
    fn q_identity() {
        for g in [0.1, 0.5, 1.0, (8.0f64 / 3.0).sqrt(), 1.99] {
            let p = LqgParams::new(g).unwrap();
            assert!((p.q() - (2.0 / g + g / 2.0)).abs() < 1e-15);
            assert!((p.gamma() * p.q() - p.gamma_q()).abs() < 1e-14);
        }
        assert!(LqgParams::new(2.0).is_err());
        assert!(LqgParams::new(-0.1).is_err());
        assert_eq!(LqgParams::new(0.0).unwrap().gamma_q(), 2.0);
    }

    #[test]
    fn circle_average_basics() {
        let c = GridField::constant(64, 0.37).unwrap();
        assert_eq!(circle_average(&c, (20.3, 31.0), 5.5).unwrap(), 0.37);
        assert!(circle_average(&c, (3.0, 31.0), 4.0).is_err());
        assert!(circle_average(&c, (30.0, 31.0), 1.0).is_err());
        let f = sample_dgff(64, 1).unwrap();
        let g = sample_dgff(64, 2).unwrap();
        let sum = f.add(&g).unwrap();
        for (z, e) in [((32.0, 32.0), 4.0), ((20.5, 40.2), 7.3)] {
            let lhs = circle_average(&sum, z, e).unwrap();
            let rhs = circle_average(&f, z, e).unwrap() + circle_average(&g, z, e).unwrap();
            assert!((lhs - rhs).abs() < 1e-12);
        }
    }

    /// Pairing of the circle-average functional with the sine modes, using
    /// the same bilinear weights as the interpolation.
    fn circle_variance(s: &DgffSampler, z: (f64, f64), eps: f64) -> f64 {
        let n = s.resolution();
        let pts = circle_points(eps);
        let mut weights: Vec<((usize, usize), f64)> = Vec::new();
        for k in 0..pts {
            let th = 2.0 * std::f64::consts::PI * k as f64 / pts as f64;
            let (x, y) = (z.0 + eps * th.cos(), z.1 + eps * th.sin());
            let (i, j) = (x.floor() as usize, y.floor() as usize);
            let (fx, fy) = (x - i as f64, y - j as f64);
            let w = 1.0 / pts as f64;
            weights.push(((i, j), w * (1.0 - fx) * (1.0 - fy)));
            weights.push(((i + 1, j), w * fx * (1.0 - fy)));
            weights.push(((i, j + 1), w * (1.0 - fx) * fy));
            weights.push(((i + 1, j + 1), w * fx * fy));
        }
        let wn = std::f64::consts::PI / n as f64;
        s.variance_of(|a, b| {
            weights
                .iter()
                .map(|&((x, y), w)| w * (wn * (a * x) as f64).sin() * (wn * (b * y) as f64).sin())
                .sum()
        })
    }

    #[test]
    fn circle_average_variance_decays_logarithmically() {
        let s = DgffSampler::new(256).unwrap();
        let z = (128.0, 128.0);
        let ladder = [4.0, 8.0, 16.0, 32.0];
        let oracle: Vec<f64> = ladder.iter().map(|&e| circle_variance(&s, z, e)).collect();
        let diffs: Vec<f64> = oracle.windows(2).map(|w| w[0] - w[1]).collect();
        let log2 = 2.0f64.ln() / (2.0 * std::f64::consts::PI);
        for d in &diffs {
            assert!((d / log2 - 1.0).abs() < 0.15, "{diffs:?}");
        }
        let tree = SeedTree::new(17);
        let mut acc = vec![RunningMean::new(); ladder.len()];
        for i in 0..1500 {
            let f = s.sample(&mut tree.stream(StreamTag::Field, i));
            for (a, &e) in acc.iter_mut().zip(&ladder) {
                a.push(circle_average(&f, z, e).unwrap().powi(2));
            }
        }
        for (a, o) in acc.iter().zip(&oracle) {
            assert!((a.mean() - o).abs() < 3.0 * a.std_error(), "{} vs {o}", a.mean());
        }
    }

    #[test]
    fn flat_measure_is_lebesgue() {
        let f = sample_dgff(64, 5).unwrap();
        let p = LqgParams::new(0.0).unwrap();
        let region = Region::Cells(vec![(20, 20), (21, 20), (30, 35)]);
        let a = lqg_area(&f, &p, 4, &region).unwrap();
        assert!((a / (3.0 * f.spacing() * f.spacing()) - 1.0).abs() < 1e-15);
        assert!(lqg_area(&f, &p, 4, &Region::Cells(vec![(1, 1)])).is_err());
        assert!(lqg_area(&f, &p, 6, &region).is_err());
    }

    #[test]
    fn area_is_additive_and_matches_the_measure_grid() {
        let f = sample_dgff(128, 6).unwrap();
        let p = LqgParams::pure_gravity();
        let a = Region::Disk {
            center: Complex64::new(0.0, 0.0),
            radius: 0.2,
        };
        let b = Region::Disk {
            center: Complex64::new(0.5, 0.0),
            radius: 0.2,
        };
        let mut both = a.cells(128);
        both.extend(b.cells(128));
        let sum = lqg_area(&f, &p, 4, &a).unwrap() + lqg_area(&f, &p, 4, &b).unwrap();
        let joint = lqg_area(&f, &p, 4, &Region::Cells(both)).unwrap();
        assert!((sum - joint).abs() <= 1e-12 * joint);
        let m = LqgMeasure::new(&f, &p, 4).unwrap();
        assert!(m.cell_masses.iter().flatten().all(|v| v.is_finite() && *v >= 0.0));
        assert!((m.area(&a).unwrap() - lqg_area(&f, &p, 4, &a).unwrap()).abs() < 1e-15);
    }

    #[test]
    fn doubling_the_field_squares_the_exponential() {
        let f = sample_dgff(64, 9).unwrap();
        let p = LqgParams::new(1.0).unwrap();
        let cells = Region::Cells(vec![(32, 32)]);
        let e = 4.0 * f.spacing();
        let one = lqg_area(&f, &p, 4, &cells).unwrap();
        let two = lqg_area(&f.scaled(2.0), &p, 4, &cells).unwrap();
        let base = e.powf(0.5) * f.spacing().powi(2);
        assert!(((two / base) / (one / base).powi(2) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn dyadic_levels_agree() {
        let p = LqgParams::pure_gravity();
        let region = Region::Disk {
            center: Complex64::new(0.0, 0.0),
            radius: 0.4,
        };
        let s = DgffSampler::new(512).unwrap();
        let (mut fine, mut coarse) = (0.0, 0.0);
        for seed in 0..4 {
            let f = s.sample_seeded(seed);
            fine += lqg_area(&f, &p, 4, &region).unwrap();
            coarse += lqg_area(&f, &p, 8, &region).unwrap();
        }
        assert!((fine / coarse - 1.0).abs() < 0.2, "{fine} {coarse}");
    }

    #[test]
    fn coordinate_change_controls() {
        let f = sample_dgff(256, 4).unwrap();
        let a = Region::Disk {
            center: Complex64::new(0.0, 0.0),
            radius: 0.3,
        };
        let p = LqgParams::pure_gravity();
        assert!(coord_change_check(&f, &p, &Mobius::identity(), &a, 8).unwrap() < 1e-12);
        let phi = Mobius::new(Complex64::new(0.3, 0.0)).unwrap();
        let flat = LqgParams::new(0.0).unwrap();
        let d = coord_change_check(&f, &flat, &phi, &a, 8).unwrap();
        let d_inv = coord_change_check(&f, &flat, &phi.inverse(), &a, 8).unwrap();
        assert!(d < 0.01 && d_inv < 0.01, "{d} {d_inv}");
        let edge = Region::Disk {
            center: Complex64::new(0.0, 0.0),
            radius: 0.95,
        };
        assert!(matches!(coord_change_check(&f, &p, &phi, &edge, 8), Err(Error::Domain(_))));
    }

    #[test]
    fn coordinate_change_small_ensemble() {
        let s = coord_change_experiment(&LqgParams::pure_gravity(), 256, 8, 10, 0.3, 0.3, 2).unwrap();
        assert_eq!(s.discrepancies.len(), 10);
        assert!(s.lower_quartile <= s.median && s.median <= s.upper_quartile);
        assert!(s.median < 0.1, "{s:?}");
    }

    #[test]
    fn mobius_inverse_round_trips() {
        let phi = Mobius::new(Complex64::new(0.3, -0.2)).unwrap();
        for z in [Complex64::new(0.1, 0.5), Complex64::new(-0.7, 0.0)] {
            assert!((phi.inverse().apply(phi.apply(z)) - z).norm() < 1e-15);
        }
        assert!(Mobius::new(Complex64::new(1.0, 0.0)).is_err());
    }

    #[test]
    fn chord_length_smoke() {
        let f = sample_dgff(64, 2).unwrap();
        let flat = LqgParams::new(0.0).unwrap();
        let len = chord_boundary_length(&f, &flat, 4, 32, (10, 50)).unwrap();
        assert!((len - 41.0 * f.spacing()).abs() < 1e-14);
        let l = chord_boundary_length(&f, &LqgParams::pure_gravity(), 4, 32, (10, 50)).unwrap();
        assert!(l.is_finite() && l > 0.0);
        assert!(chord_boundary_length(&f, &flat, 4, 2, (10, 50)).is_err());
    }
}
