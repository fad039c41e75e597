//! The elliptical Radon transform
//!
//! `R f(u, t) = ∫ f(x) δ(|A⁻¹(x − (u, 0))| − t) dx = |a|₁ tⁿ⁻¹ ∫_{|y|=1} f(A y t + (u, 0)) dS(y)`
//!
//! evaluated by quadrature on the unit sphere, plus sinogram assembly,
//! bistatic data ingestion and reproducible noise.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geometry::AnisotropyParams;
use crate::grid::{Axis, GridImage};
use crate::phantom::Phantom;

/// Minimum azimuthal node count for the planar quadrature.
pub const MIN_NODES: usize = 720;

/// Node count giving at least two azimuthal nodes per pixel crossed:
/// `max(720, ⌈4π t max(a1, a2) / pixel⌉)`, rounded up to a multiple of 4 so
/// the node set is symmetric in both axes.
pub fn default_nodes(t: f64, a1: f64, a2: f64, pixel: f64) -> usize {
    let adaptive = (4.0 * PI * t * a1.max(a2) / pixel).ceil();
    if adaptive.is_finite() && adaptive > MIN_NODES as f64 {
        (adaptive as usize).next_multiple_of(4)
    } else {
        MIN_NODES
    }
}

/// How many azimuthal nodes to use per evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NodeCount {
    Fixed(usize),
    /// [`default_nodes`] for the given target pixel size.
    Adaptive { pixel: f64 },
}

impl NodeCount {
    pub fn resolve(&self, t: f64, a1: f64, a2: f64) -> usize {
        match *self {
            NodeCount::Fixed(n) => n.max(1),
            NodeCount::Adaptive { pixel } => default_nodes(t, a1, a2, pixel),
        }
    }
}

/// Unit-circle node `k` of an `n`-point trapezoid rule. Nodes `k` and
/// `n − k` are exact mirror images so that even integrands stay even; when
/// `4 | n`, nodes `k` and `n/2 − k` are mirrored in the other axis as well.
#[inline]
fn circle_node(k: usize, n: usize) -> (f64, f64) {
    if k == 0 {
        (1.0, 0.0)
    } else if 2 * k == n {
        (-1.0, 0.0)
    } else if 2 * k < n {
        if n.is_multiple_of(4) && 4 * k >= n {
            if 4 * k == n {
                return (0.0, 1.0);
            }
            let (c, s) = circle_node(n / 2 - k, n);
            return (-c, s);
        }
        let (s, c) = (2.0 * PI * k as f64 / n as f64).sin_cos();
        (c, s)
    } else {
        let (c, s) = circle_node(n - k, n);
        (c, -s)
    }
}

/// Planar transform of `f` by the `nodes`-point trapezoid rule in the angle.
pub fn elliptical_forward_2d<F>(f: F, a1: f64, a2: f64, u: f64, t: f64, nodes: usize) -> f64
where
    F: Fn(f64, f64) -> f64,
{
    if t == 0.0 {
        return 0.0;
    }
    let n = nodes.max(1);
    let (rx, ry) = (a1 * t, a2 * t);
    let mut acc = f(u + rx, 0.0);
    if n.is_multiple_of(2) {
        acc += f(u - rx, 0.0);
    }
    for k in 1..n.div_ceil(2) {
        let (c, s) = circle_node(k, n);
        let x = u + rx * c;
        let y = ry * s;
        acc += f(x, y) + f(x, -y);
    }
    a1 * a2 * t * acc * (2.0 * PI / n as f64)
}

/// Gauss–Legendre nodes and weights on `[−1, 1]`, mirrored exactly.
fn gauss_legendre(m: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; m];
    let mut w = vec![0.0; m];
    for i in 0..m.div_ceil(2) {
        let mut z = (PI * (i as f64 + 0.75) / (m as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, 0.0);
            for j in 0..m {
                let p2 = p1;
                p1 = p0;
                p0 = ((2 * j + 1) as f64 * z * p1 - j as f64 * p2) / (j + 1) as f64;
            }
            dp = m as f64 * (z * p0 - p1) / (z * z - 1.0);
            let dz = p0 / dp;
            z -= dz;
            if dz.abs() < 1e-15 {
                break;
            }
        }
        x[i] = -z;
        x[m - 1 - i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
        w[m - 1 - i] = w[i];
    }
    if m % 2 == 1 {
        x[m / 2] = 0.0;
    }
    (x, w)
}

/// `R f(u, t)` for `n ∈ {2, 3}`.
///
/// In the plane this is the trapezoid rule over `φ ∈ [0, 2π)` with `nodes`
/// points; on `S²` a Gauss–Legendre rule in `cos ϑ` (with `max(nodes/2, 2)`
/// points) times the trapezoid rule in the azimuth.
pub fn elliptical_forward_point<F>(f: F, params: &AnisotropyParams, u: &[f64], t: f64, nodes: usize) -> Result<f64>
where
    F: Fn(&[f64]) -> f64,
{
    if !(t >= 0.0 && t.is_finite()) {
        return Err(Error::domain(format!("t = {t} must be non-negative")));
    }
    let n = params.dim();
    if u.len() + 1 != n {
        return Err(Error::invalid(format!("u has {} components, expected {}", u.len(), n - 1)));
    }
    let a = params.scales();
    match n {
        2 => Ok(elliptical_forward_2d(|x1, x2| f(&[x1, x2]), a[0], a[1], u[0], t, nodes)),
        3 => {
            if t == 0.0 {
                return Ok(0.0);
            }
            let azimuth = nodes.max(1);
            let (mu, w) = gauss_legendre((nodes / 2).max(2));
            let mut acc = 0.0;
            for (&m, &wm) in mu.iter().zip(&w) {
                let ring = (1.0 - m * m).max(0.0).sqrt();
                let x3 = a[2] * t * m;
                let mut ring_sum = 0.0;
                for k in 0..azimuth {
                    let (c, s) = circle_node(k, azimuth);
                    ring_sum += f(&[u[0] + a[0] * t * ring * c, u[1] + a[1] * t * ring * s, x3]);
                }
                acc += wm * ring_sum;
            }
            Ok(params.product() * t * t * acc * (2.0 * PI / azimuth as f64))
        }
        _ => Err(Error::invalid(format!("quadrature is implemented for n = 2, 3; got n = {n}"))),
    }
}

/// Same node set as [`elliptical_forward_2d`] applied to `phantom.eval`, but
/// each disk only visits the nodes inside its angular window.
pub fn phantom_ellipse_integral(phantom: &Phantom, a1: f64, a2: f64, u: f64, t: f64, nodes: usize) -> f64 {
    if t == 0.0 {
        return 0.0;
    }
    let n = nodes.max(1);
    let step = 2.0 * PI / n as f64;
    let (rx, ry) = (a1 * t, a2 * t);
    let amin = a1.min(a2);
    let mut total = 0.0;
    for disk in phantom.disks() {
        // In y = A⁻¹(x − (u, 0)) the ellipse is the circle |y| = t and the disk
        // sits inside a circle of radius rho around cy.
        let cy = ((disk.center[0] - u) / a1, disk.center[1] / a2);
        let rho = disk.radius / amin;
        let d = cy.0.hypot(cy.1);
        if t < d - rho || t > d + rho {
            continue;
        }
        let (first, count) = if d <= rho {
            (0_i64, n)
        } else {
            let half = (rho / d).min(1.0).asin() + 1e-9;
            let psi = cy.1.atan2(cy.0);
            let lo = ((psi - half) / step).floor() as i64 - 1;
            let hi = ((psi + half) / step).ceil() as i64 + 1;
            (lo, ((hi - lo + 1) as usize).min(n))
        };
        let mut hits = 0usize;
        for j in 0..count {
            let k = (first + j as i64).rem_euclid(n as i64) as usize;
            let (c, s) = circle_node(k, n);
            if disk.contains(u + rx * c, ry * s) {
                hits += 1;
            }
        }
        total += disk.value * hits as f64;
    }
    a1 * a2 * t * total * step
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ForwardMode {
    Quadrature,
    Pixel,
}

/// Identifier of the noise generator: ChaCha20 seeded with `seed_from_u64`,
/// standard normals from the `rand_distr` ziggurat sampler, one draw per
/// sample in storage order.
pub const NOISE_ALGORITHM_CHACHA20_ZIGGURAT: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseInfo {
    pub algorithm: u32,
    pub seed: u64,
    pub ratio: f64,
}

/// Samples of `R f` on a `(u, t)` grid, stored `u`-major
/// (`data[iu * nt + it]`).
#[derive(Debug, Clone, PartialEq)]
pub struct EllipticalSinogram {
    pub params: AnisotropyParams,
    pub u: Axis,
    pub t: Axis,
    pub data: Vec<f64>,
    pub mode: ForwardMode,
    pub noise: Option<NoiseInfo>,
}

impl EllipticalSinogram {
    pub fn new(params: AnisotropyParams, u: Axis, t: Axis, data: Vec<f64>, mode: ForwardMode) -> Result<Self> {
        params.require_planar()?;
        if t.range.lo < 0.0 {
            return Err(Error::invalid(format!("t-range starts at {} < 0", t.range.lo)));
        }
        if data.len() != u.n * t.n {
            return Err(Error::invalid(format!(
                "sinogram data length {} does not match {}x{}",
                data.len(),
                u.n,
                t.n
            )));
        }
        if data.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("sinogram contains non-finite samples"));
        }
        Ok(EllipticalSinogram { params, u, t, data, mode, noise: None })
    }

    pub fn get(&self, iu: usize, it: usize) -> f64 {
        self.data[iu * self.t.n + it]
    }

    /// Bilinear interpolation in `(u, t)`; `None` outside the sampled ranges.
    pub fn interpolate(&self, u: f64, t: f64) -> Option<f64> {
        let (iu, wu) = self.u.locate(u)?;
        let (it, wt) = self.t.locate(t)?;
        let nt = self.t.n;
        let row = |i: usize| self.data[i * nt + it] * (1.0 - wt) + self.data[i * nt + it + 1] * wt;
        Some(row(iu) * (1.0 - wu) + row(iu + 1) * wu)
    }

    pub fn l2_norm(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum::<f64>().sqrt()
    }
}

fn assemble<F>(params: &AnisotropyParams, u: Axis, t: Axis, mode: ForwardMode, sample: F) -> Result<EllipticalSinogram>
where
    F: Fn(f64, f64) -> f64 + Sync,
{
    let mut data = vec![0.0; u.n * t.n];
    data.par_chunks_mut(t.n).enumerate().for_each(|(iu, row)| {
        let uu = u.node(iu);
        for (it, v) in row.iter_mut().enumerate() {
            *v = sample(uu, t.node(it));
        }
    });
    EllipticalSinogram::new(params.clone(), u, t, data, mode)
}

/// `R f` of a phantom at every `(u, t)` node by quadrature.
pub fn elliptical_sinogram(
    phantom: &Phantom,
    params: &AnisotropyParams,
    u: Axis,
    t: Axis,
    nodes: NodeCount,
) -> Result<EllipticalSinogram> {
    let (a1, a2) = params.require_planar()?;
    if t.range.lo < 0.0 {
        return Err(Error::domain(format!("t-range starts at {} < 0", t.range.lo)));
    }
    assemble(params, u, t, ForwardMode::Quadrature, |uu, tt| {
        phantom_ellipse_integral(phantom, a1, a2, uu, tt, nodes.resolve(tt, a1, a2))
    })
}

/// Discrete projector that sums the pixels hit along the ellipse, weighted by
/// `a1 a2 t Δφ`. Mirrors pixel-counting projectors for comparison runs.
pub fn pixel_forward_point(img: &GridImage, a1: f64, a2: f64, u: f64, t: f64) -> f64 {
    let pixel = img.geometry.dx().min(img.geometry.dy());
    let n = default_nodes(t, a1, a2, pixel);
    elliptical_forward_2d(|x1, x2| img.nearest(x1, x2), a1, a2, u, t, n)
}

pub fn pixel_sinogram(img: &GridImage, params: &AnisotropyParams, u: Axis, t: Axis) -> Result<EllipticalSinogram> {
    let (a1, a2) = params.require_planar()?;
    assemble(params, u, t, ForwardMode::Pixel, |uu, tt| pixel_forward_point(img, a1, a2, uu, tt))
}

/// Adds seeded standard-normal noise rescaled to `‖noise‖ = ratio ‖data‖`.
/// Returns the norm of the added noise.
pub fn perturb(data: &mut [f64], ratio: f64, seed: u64) -> Result<f64> {
    if !(ratio >= 0.0 && ratio.is_finite()) {
        return Err(Error::invalid(format!("noise ratio {ratio} must be non-negative")));
    }
    let signal: f64 = data.iter().map(|v| v * v).sum::<f64>().sqrt();
    if ratio == 0.0 || signal == 0.0 {
        return Ok(0.0);
    }
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let noise: Vec<f64> = (0..data.len()).map(|_| rng.sample(StandardNormal)).collect();
    let raw: f64 = noise.iter().map(|v| v * v).sum::<f64>().sqrt();
    let scale = ratio * signal / raw;
    for (d, e) in data.iter_mut().zip(&noise) {
        *d += scale * e;
    }
    Ok(ratio * signal)
}

pub fn add_noise(sinogram: &EllipticalSinogram, ratio: f64, seed: u64) -> Result<EllipticalSinogram> {
    let mut out = sinogram.clone();
    if ratio == 0.0 {
        return Ok(out);
    }
    perturb(&mut out.data, ratio, seed)?;
    out.noise = Some(NoiseInfo {
        algorithm: NOISE_ALGORITHM_CHACHA20_ZIGGURAT,
        seed,
        ratio,
    });
    Ok(out)
}

/// One bistatic measurement with source `(s, u₂…, 0)`, receiver `(r, u₂…, 0)`
/// and travel time `t`.
#[derive(Debug, Clone, PartialEq)]
pub struct BistaticRecord {
    pub s: f64,
    pub r: f64,
    /// `u₂, …, u_{n−1}`; empty in the plane.
    pub transverse: Vec<f64>,
    pub t: f64,
    pub g: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScatteredSample {
    pub u: Vec<f64>,
    pub t: f64,
    pub g: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BistaticData {
    /// Common `(r − s)/t` of all records.
    pub aperture: f64,
    pub params: AnisotropyParams,
    pub samples: Vec<ScatteredSample>,
}

/// Tolerance on the spread of `(r − s)/t` across records.
pub const APERTURE_TOL: f64 = 1e-9;

/// Converts bistatic records with a fixed ratio `a = (r − s)/t` into samples
/// of the elliptical transform with `A = diag(1/2, √(1 − a²)/2, …)` and
/// focus center `u = (s + r)/2`.
pub fn ingest_bistatic(records: &[BistaticRecord]) -> Result<BistaticData> {
    let first = records
        .first()
        .ok_or_else(|| Error::invalid("no bistatic records"))?;
    let dim = first.transverse.len() + 2;
    let mut apertures = Vec::with_capacity(records.len());
    for (i, rec) in records.iter().enumerate() {
        if !(rec.t > 0.0 && rec.t.is_finite()) {
            return Err(Error::invalid(format!("record {i}: travel time {} must be positive", rec.t)));
        }
        if rec.r < rec.s {
            return Err(Error::invalid(format!("record {i}: receiver {} precedes source {}", rec.r, rec.s)));
        }
        if rec.transverse.len() + 2 != dim {
            return Err(Error::invalid(format!("record {i}: dimension differs from record 0")));
        }
        apertures.push((rec.r - rec.s) / rec.t);
    }
    let min = apertures.iter().copied().fold(f64::INFINITY, f64::min);
    let max = apertures.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max - min > APERTURE_TOL {
        return Err(Error::InconsistentAperture { min, max });
    }
    let aperture = apertures.iter().sum::<f64>() / apertures.len() as f64;
    if aperture >= 1.0 {
        return Err(Error::domain(format!("aperture ratio {aperture} ≥ 1 gives degenerate ellipses")));
    }
    let minor = (1.0 - aperture * aperture).sqrt() / 2.0;
    let mut scales = vec![0.5];
    scales.extend(std::iter::repeat_n(minor, dim - 1));
    let params = AnisotropyParams::new(scales)?;
    let samples = records
        .iter()
        .map(|rec| {
            let mut u = vec![(rec.s + rec.r) / 2.0];
            u.extend_from_slice(&rec.transverse);
            ScatteredSample { u, t: rec.t, g: rec.g }
        })
        .collect();
    Ok(BistaticData { aperture, params, samples })
}

impl BistaticData {
    /// Averages planar samples onto the nearest `(u, t)` grid node. Nodes
    /// without samples are zero; samples outside the grid are dropped.
    pub fn bin(&self, u: Axis, t: Axis) -> Result<EllipticalSinogram> {
        self.params.require_planar()?;
        let mut sum = vec![0.0; u.n * t.n];
        let mut count = vec![0u32; u.n * t.n];
        for smp in &self.samples {
            if let (Some(iu), Some(it)) = (u.nearest(smp.u[0]), t.nearest(smp.t)) {
                sum[iu * t.n + it] += smp.g;
                count[iu * t.n + it] += 1;
            }
        }
        let data = sum
            .iter()
            .zip(&count)
            .map(|(s, &c)| if c > 0 { s / c as f64 } else { 0.0 })
            .collect();
        EllipticalSinogram::new(self.params.clone(), u, t, data, ForwardMode::Quadrature)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::ImageGeometry;
    use crate::phantom::{rasterize, Disk};

    #[test]
    fn zero_radius_gives_zero() {
        let p = Phantom::paper();
        let a = AnisotropyParams::planar(0.8, 1.0).unwrap();
        let v = elliptical_forward_point(|x| p.eval(x[0], x[1]), &a, &[0.0], 0.0, 720).unwrap();
        assert_eq!(v, 0.0);
        assert_eq!(phantom_ellipse_integral(&p, 0.8, 1.0, 0.3, 0.0, 720), 0.0);
    }

    #[test]
    fn disjoint_support_gives_zero() {
        let p = Phantom::paper();
        let a = AnisotropyParams::planar(0.8, 1.0).unwrap();
        let v = elliptical_forward_point(|x| p.eval(x[0], x[1]), &a, &[10.0], 0.1, 720).unwrap();
        assert_eq!(v, 0.0);
    }

    #[test]
    fn rejects_bad_arguments() {
        let a = AnisotropyParams::planar(0.8, 1.0).unwrap();
        assert!(elliptical_forward_point(|_| 1.0, &a, &[0.0], -1.0, 10).is_err());
        let a4 = AnisotropyParams::identity(4).unwrap();
        assert!(elliptical_forward_point(|_| 1.0, &a4, &[0.0, 0.0, 0.0], 1.0, 10).is_err());
    }

    #[test]
    fn constant_integrand_gives_circumference_measure() {
        // ∫ δ(|A⁻¹x| − t) dx over ℝ² is 2π a1 a2 t.
        let a = AnisotropyParams::planar(0.7, 1.3).unwrap();
        let v = elliptical_forward_point(|_| 1.0, &a, &[0.2], 0.9, 33).unwrap();
        assert!((v - 2.0 * PI * 0.7 * 1.3 * 0.9).abs() < 1e-12);
        // and 4π a1 a2 a3 t² in three dimensions
        let a = AnisotropyParams::new(vec![0.7, 1.3, 0.5]).unwrap();
        let v = elliptical_forward_point(|_| 1.0, &a, &[0.2, -0.1], 0.9, 40).unwrap();
        assert!((v - 4.0 * PI * 0.7 * 1.3 * 0.5 * 0.81).abs() < 1e-12);
    }

    #[test]
    fn sphere_quadrature_integrates_polynomials() {
        // ∫_{S²} y3² dS = 4π/3; with A = I, t = 1, u = 0 and f = x3².
        let a = AnisotropyParams::identity(3).unwrap();
        let v = elliptical_forward_point(|x| x[2] * x[2], &a, &[0.0, 0.0], 1.0, 16).unwrap();
        assert!((v - 4.0 * PI / 3.0).abs() < 1e-12, "{v}");
    }

    #[test]
    fn gauss_legendre_is_symmetric_and_exact() {
        let (x, w) = gauss_legendre(7);
        for i in 0..7 {
            assert_eq!(x[i], -x[6 - i]);
        }
        let quartic: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(4)).sum();
        assert!((quartic - 0.4).abs() < 1e-14);
    }

    #[test]
    fn windowed_phantom_sum_matches_plain_quadrature() {
        let p = Phantom::paper();
        for &(u, t) in &[(0.0, 0.5), (0.3, 0.7), (-1.2, 1.6), (4.0, 5.1), (0.1, 0.05)] {
            for &n in &[720, 1001, 4096] {
                let plain = elliptical_forward_2d(|x, y| p.eval(x, y), 0.8, 1.0, u, t, n);
                let fast = phantom_ellipse_integral(&p, 0.8, 1.0, u, t, n);
                assert!((plain - fast).abs() <= 1e-12 * plain.abs().max(1.0), "{u} {t} {n}: {plain} {fast}");
            }
        }
    }

    #[test]
    fn symmetric_phantom_gives_symmetric_sinogram() {
        let p = Phantom::new(&[Disk { center: [0.0, 0.5], radius: 0.2, value: 1.0 }]).unwrap();
        let a = AnisotropyParams::planar(0.8, 1.0).unwrap();
        let s = elliptical_sinogram(&p, &a, Axis::new(-1.0, 1.0, 21).unwrap(), Axis::new(0.0, 2.0, 17).unwrap(), NodeCount::Fixed(2000)).unwrap();
        for iu in 0..21 {
            for it in 0..17 {
                assert!((s.get(iu, it) - s.get(20 - iu, it)).abs() < 1e-12);
            }
        }
        // t = 0 column vanishes
        assert!((0..21).all(|iu| s.get(iu, 0) == 0.0));
    }

    #[test]
    fn empty_phantom_sinogram_is_zero() {
        let a = AnisotropyParams::planar(0.8, 1.0).unwrap();
        let s = elliptical_sinogram(&Phantom::default(), &a, Axis::new(-1.0, 1.0, 8).unwrap(), Axis::new(0.0, 2.0, 8).unwrap(), NodeCount::Adaptive { pixel: 2.0 / 256.0 }).unwrap();
        assert!(s.data.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn pixel_mode_edge_cases() {
        let g = ImageGeometry::square(64, -1.0, 1.0).unwrap();
        let zero = GridImage::zeros(g);
        assert_eq!(pixel_forward_point(&zero, 0.8, 1.0, 0.0, 0.5), 0.0);
        let img = rasterize(&Phantom::paper(), g, false);
        assert_eq!(pixel_forward_point(&img, 0.8, 1.0, 5.0, 0.5), 0.0);
    }

    #[test]
    fn noise_has_requested_norm_and_is_deterministic() {
        let a = AnisotropyParams::planar(0.8, 1.0).unwrap();
        let s = elliptical_sinogram(&Phantom::paper(), &a, Axis::new(-1.0, 1.0, 32).unwrap(), Axis::new(0.0, 2.0, 32).unwrap(), NodeCount::Fixed(720)).unwrap();
        assert_eq!(add_noise(&s, 0.0, 1).unwrap(), s);
        let n1 = add_noise(&s, 0.05, 7).unwrap();
        let n2 = add_noise(&s, 0.05, 7).unwrap();
        assert_eq!(n1, n2);
        assert_eq!(n1.noise.unwrap().seed, 7);
        let diff: f64 = n1.data.iter().zip(&s.data).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
        assert!((diff / s.l2_norm() - 0.05).abs() < 1e-12);
        assert_ne!(add_noise(&s, 0.05, 8).unwrap().data, n1.data);
        assert!(add_noise(&s, -0.1, 1).is_err());
    }

    #[test]
    fn ingest_examples() {
        let rec = |s: f64, r: f64, t: f64| BistaticRecord { s, r, transverse: vec![], t, g: 1.0 };
        let d = ingest_bistatic(&[rec(0.0, 0.4, 0.5)]).unwrap();
        assert!((d.aperture - 0.8).abs() < 1e-15);
        assert!((d.params.scales()[0] - 0.5).abs() < 1e-15);
        assert!((d.params.scales()[1] - 0.3).abs() < 1e-12);
        assert!((d.samples[0].u[0] - 0.2).abs() < 1e-15);

        let d = ingest_bistatic(&[rec(0.3, 0.3, 1.0), rec(-1.0, -1.0, 0.2)]).unwrap();
        assert_eq!(d.params.scales(), &[0.5, 0.5]);

        let err = ingest_bistatic(&[rec(0.0, 0.4, 0.5), rec(0.0, 0.25, 0.5)]).unwrap_err();
        assert!(matches!(err, Error::InconsistentAperture { .. }));
        assert!(ingest_bistatic(&[rec(0.0, 1.0, 1.0)]).is_err());
        assert!(ingest_bistatic(&[]).is_err());
    }

    #[test]
    fn binning_averages_nearest_node() {
        let rec = |s: f64, t: f64, g: f64| BistaticRecord { s, r: s + 0.5 * t, transverse: vec![], t, g };
        let d = ingest_bistatic(&[rec(0.0, 1.0, 2.0), rec(0.01, 1.02, 4.0), rec(5.0, 1.0, 9.0)]).unwrap();
        let s = d.bin(Axis::new(0.0, 1.0, 5).unwrap(), Axis::new(0.0, 2.0, 5).unwrap()).unwrap();
        // u = 0.25 and 0.265 both round to node 1, t = 1.0 and 1.02 to node 2
        assert_eq!(s.get(1, 2), 3.0);
        assert_eq!(s.data.iter().filter(|&&v| v != 0.0).count(), 1);
    }
}
