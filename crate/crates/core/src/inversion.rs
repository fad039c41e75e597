//! Inversion of the planar elliptical Radon transform.
//!
//! Under `m⁻¹`, ellipses become lines, so with
//! `k(z) = f(m(z)) / √(z2 − z1²)` the elliptical data are regular Radon data of
//! `k`:
//!
//! `Rk(θ, s) = |csc θ| / (2 a1 a2 h) · R f(−a1 cot θ / 2, h)`,
//! `h = √(s csc θ + cot² θ / 4)`, whenever `s csc θ > −cot² θ / 4`, and zero
//! otherwise. `k` is recovered by filtered backprojection and `f` follows from
//! `f(x) = |x2| a2⁻¹ k(x1/a1, (x1/a1)² + (x2/a2)²)`.
//!
//! A closed-form band-limited inversion and a Fourier-slice diagnostic are
//! provided as independent routes.

use std::fmt::Write as _;
use std::sync::atomic::{AtomicU64, Ordering};
use std::time::{Duration, Instant};

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::forward::{perturb, phantom_ellipse_integral, EllipticalSinogram, NodeCount};
use crate::geometry::{inverse_map_2d, AnisotropyParams};
use crate::grid::{Axis, GridImage, ImageGeometry};
use crate::phantom::Phantom;
use crate::radon::{fbp, RadonSinogram, RampWindow};

/// Anything that can answer `R f(u, t)` queries.
pub trait EllipticalData: Sync {
    fn sample(&self, u: f64, t: f64) -> f64;

    /// Queries that fell outside the data and were answered with zero.
    fn clipped(&self) -> u64 {
        0
    }
}

/// Evaluates the transform of a phantom on demand.
#[derive(Debug, Clone)]
pub struct AnalyticSource<'a> {
    pub phantom: &'a Phantom,
    pub a1: f64,
    pub a2: f64,
    pub nodes: NodeCount,
}

impl<'a> AnalyticSource<'a> {
    pub fn new(phantom: &'a Phantom, params: &AnisotropyParams, nodes: NodeCount) -> Result<Self> {
        let (a1, a2) = params.require_planar()?;
        Ok(AnalyticSource { phantom, a1, a2, nodes })
    }
}

impl EllipticalData for AnalyticSource<'_> {
    fn sample(&self, u: f64, t: f64) -> f64 {
        let n = self.nodes.resolve(t, self.a1, self.a2);
        phantom_ellipse_integral(self.phantom, self.a1, self.a2, u, t, n)
    }
}

/// Bilinear interpolation of a sampled sinogram with zero extension.
#[derive(Debug)]
pub struct GriddedSource<'a> {
    pub sinogram: &'a EllipticalSinogram,
    clipped: AtomicU64,
}

impl<'a> GriddedSource<'a> {
    pub fn new(sinogram: &'a EllipticalSinogram) -> Self {
        GriddedSource {
            sinogram,
            clipped: AtomicU64::new(0),
        }
    }

    /// `(u, t)` ranges covered by the grid.
    pub fn coverage(&self) -> ((f64, f64), (f64, f64)) {
        let s = self.sinogram;
        ((s.u.range.lo, s.u.range.hi), (s.t.range.lo, s.t.range.hi))
    }
}

impl EllipticalData for GriddedSource<'_> {
    fn sample(&self, u: f64, t: f64) -> f64 {
        match self.sinogram.interpolate(u, t) {
            Some(v) => v,
            None => {
                self.clipped.fetch_add(1, Ordering::Relaxed);
                0.0
            }
        }
    }

    fn clipped(&self) -> u64 {
        self.clipped.load(Ordering::Relaxed)
    }
}

/// Wraps a closure `(u, t) ↦ R f(u, t)`.
pub struct FnSource<F>(pub F);

impl<F: Fn(f64, f64) -> f64 + Sync> EllipticalData for FnSource<F> {
    fn sample(&self, u: f64, t: f64) -> f64 {
        (self.0)(u, t)
    }
}

/// Rows with `|sin θ|` below this fraction of `4/nθ` are dropped.
pub fn theta_cutoff(ntheta: usize) -> f64 {
    4.0 / ntheta as f64
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ReductionReport {
    /// `θ` rows zeroed because `|sin θ| < 4/nθ`.
    pub zeroed_rows: usize,
    /// Nodes in the guard region `s csc θ ≤ −cot² θ / 4`.
    pub guarded: u64,
    /// Queries outside a gridded source.
    pub clipped: u64,
}

/// Elliptical samples at the `(u, t)` images of a `(θ, s)` grid, together
/// with the factors turning them into `Rk`.
#[derive(Debug, Clone)]
pub struct ReductionSamples {
    pub ntheta: usize,
    pub s: Axis,
    /// `R f(u, t)` per node, zero where no ellipse corresponds.
    pub values: Vec<f64>,
    /// `|csc θ| / (2 a1 a2 h)` per node, zero where no ellipse corresponds.
    pub factors: Vec<f64>,
    pub report: ReductionReport,
}

/// Ellipse `(u, t)` matching the line `(θ, s)`, or `None` in the guard region
/// or near `sin θ = 0`. Also returns the `Rk` factor.
#[inline]
fn line_to_ellipse(theta: f64, s: f64, a1: f64, a2: f64) -> Option<(f64, f64, f64)> {
    let (sn, cs) = theta.sin_cos();
    let csc = 1.0 / sn;
    let cot = cs / sn;
    let arg = s * csc + cot * cot / 4.0;
    if arg <= 0.0 {
        return None;
    }
    let h = arg.sqrt();
    Some((-a1 * cot / 2.0, h, csc.abs() / (2.0 * a1 * a2 * h)))
}

pub fn sample_reduction(src: &dyn EllipticalData, params: &AnisotropyParams, ntheta: usize, s: Axis) -> Result<ReductionSamples> {
    let (a1, a2) = params.require_planar()?;
    if ntheta == 0 {
        return Err(Error::invalid("need at least one angle"));
    }
    let cutoff = theta_cutoff(ntheta);
    let dtheta = 2.0 * std::f64::consts::PI / ntheta as f64;
    let mut values = vec![0.0; ntheta * s.n];
    let mut factors = vec![0.0; ntheta * s.n];
    let (zeroed_rows, guarded) = values
        .par_chunks_mut(s.n)
        .zip(factors.par_chunks_mut(s.n))
        .enumerate()
        .map(|(j, (vals, facs))| {
            let theta = dtheta * j as f64;
            if theta.sin().abs() < cutoff {
                return (1usize, 0u64);
            }
            let mut guarded = 0;
            for (i, (v, f)) in vals.iter_mut().zip(facs.iter_mut()).enumerate() {
                match line_to_ellipse(theta, s.node(i), a1, a2) {
                    Some((u, t, factor)) => {
                        *v = src.sample(u, t);
                        *f = factor;
                    }
                    None => guarded += 1,
                }
            }
            (0, guarded)
        })
        .reduce(|| (0, 0), |a, b| (a.0 + b.0, a.1 + b.1));
    Ok(ReductionSamples {
        ntheta,
        s,
        values,
        factors,
        report: ReductionReport {
            zeroed_rows,
            guarded,
            clipped: src.clipped(),
        },
    })
}

impl ReductionSamples {
    /// Adds seeded noise to the elliptical samples that correspond to an
    /// ellipse, scaled to `ratio` times their norm.
    pub fn add_noise(&mut self, ratio: f64, seed: u64) -> Result<()> {
        let live: Vec<usize> = (0..self.values.len()).filter(|&i| self.factors[i] != 0.0).collect();
        let mut picked: Vec<f64> = live.iter().map(|&i| self.values[i]).collect();
        perturb(&mut picked, ratio, seed)?;
        for (&i, v) in live.iter().zip(picked) {
            self.values[i] = v;
        }
        Ok(())
    }

    pub fn to_radon(&self) -> RadonSinogram {
        RadonSinogram {
            ntheta: self.ntheta,
            s: self.s,
            data: self.values.iter().zip(&self.factors).map(|(v, f)| v * f).collect(),
        }
    }
}

/// Regular Radon sinogram of `k` from elliptical data of `f`.
pub fn reduce_to_radon(
    src: &dyn EllipticalData,
    params: &AnisotropyParams,
    ntheta: usize,
    s: Axis,
) -> Result<(RadonSinogram, ReductionReport)> {
    let samples = sample_reduction(src, params, ntheta, s)?;
    Ok((samples.to_radon(), samples.report))
}

/// `f(x) = |x2| a2⁻¹ k(x1/a1, (x1/a1)² + (x2/a2)²)` on `target`, with
/// bilinear interpolation of `k` and zero outside its grid.
pub fn lift_k_to_f(k: &GridImage, params: &AnisotropyParams, target: ImageGeometry) -> Result<GridImage> {
    let (a1, a2) = params.require_planar()?;
    let data = (0..target.len())
        .into_par_iter()
        .map(|idx| {
            let (x1, x2) = target.center(idx);
            if x2 == 0.0 {
                return 0.0;
            }
            let (z1, z2) = inverse_map_2d(x1, x2, a1, a2);
            x2.abs() / a2 * k.bilinear(z1, z2)
        })
        .collect();
    Ok(GridImage { geometry: target, data })
}

/// The function `k(z) = f(m(z)) / √(z2 − z1²)` inside the paraboloid region.
pub fn k_from_f<F: Fn(f64, f64) -> f64>(f: F, a1: f64, a2: f64) -> impl Fn(f64, f64) -> f64 {
    move |z1, z2| {
        let gap = z2 - z1 * z1;
        if gap <= 0.0 {
            return 0.0;
        }
        let root = gap.sqrt();
        f(a1 * z1, a2 * root) / root
    }
}

#[derive(Debug, Clone, Copy)]
pub struct NoiseSpec {
    pub ratio: f64,
    pub seed: u64,
}

#[derive(Debug, Clone)]
pub struct ReconstructConfig {
    pub ntheta: usize,
    pub s: Axis,
    /// Grid on which `k` is reconstructed.
    pub k_geometry: ImageGeometry,
    /// Grid on which `f` is returned.
    pub f_geometry: ImageGeometry,
    pub window: RampWindow,
    /// Noise added to the elliptical samples before reduction.
    pub noise: Option<NoiseSpec>,
}

impl ReconstructConfig {
    /// `nθ = ns = size`, `s ∈ [−1, 1]`, both images `size²` over `[−1, 1]²`.
    pub fn square(size: usize) -> Result<Self> {
        let g = ImageGeometry::square(size, -1.0, 1.0)?;
        Ok(ReconstructConfig {
            ntheta: size,
            s: Axis::new(-1.0, 1.0, size)?,
            k_geometry: g,
            f_geometry: g,
            window: RampWindow::RamLak,
            noise: None,
        })
    }
}

#[derive(Debug, Clone)]
pub struct Diagnostics {
    pub a1: f64,
    pub a2: f64,
    pub ntheta: usize,
    pub ns: usize,
    pub reduction: ReductionReport,
    pub backproject_clipped: u64,
    pub noise: Option<NoiseSpec>,
    pub timings: Vec<(&'static str, Duration)>,
}

impl Diagnostics {
    /// Plain `key = value` lines.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "a1 = {}", self.a1);
        let _ = writeln!(out, "a2 = {}", self.a2);
        let _ = writeln!(out, "ntheta = {}", self.ntheta);
        let _ = writeln!(out, "ns = {}", self.ns);
        let _ = writeln!(out, "zeroed_theta_rows = {}", self.reduction.zeroed_rows);
        let _ = writeln!(out, "guard_region_nodes = {}", self.reduction.guarded);
        let _ = writeln!(out, "source_clipped_samples = {}", self.reduction.clipped);
        let _ = writeln!(out, "backproject_clipped_samples = {}", self.backproject_clipped);
        match self.noise {
            Some(n) => {
                let _ = writeln!(out, "noise_ratio = {}", n.ratio);
                let _ = writeln!(out, "noise_seed = {}", n.seed);
            }
            None => {
                let _ = writeln!(out, "noise_ratio = 0");
            }
        }
        for (name, d) in &self.timings {
            let _ = writeln!(out, "time_{name}_s = {:.6}", d.as_secs_f64());
        }
        out
    }
}

#[derive(Debug, Clone)]
pub struct Reconstruction {
    pub f: GridImage,
    pub k: GridImage,
    pub radon: RadonSinogram,
    pub diagnostics: Diagnostics,
}

/// Reduction to Radon data, filtered backprojection for `k`, then the lift to `f`.
pub fn reconstruct(src: &dyn EllipticalData, params: &AnisotropyParams, cfg: &ReconstructConfig) -> Result<Reconstruction> {
    let (a1, a2) = params.require_planar()?;
    let mut timings = Vec::new();

    let start = Instant::now();
    let mut samples = sample_reduction(src, params, cfg.ntheta, cfg.s)?;
    if let Some(noise) = cfg.noise {
        samples.add_noise(noise.ratio, noise.seed)?;
    }
    let radon = samples.to_radon();
    timings.push(("reduce", start.elapsed()));

    let start = Instant::now();
    let (k, bp) = fbp(&radon, cfg.k_geometry, cfg.window)?;
    timings.push(("fbp", start.elapsed()));

    let start = Instant::now();
    let f = lift_k_to_f(&k, params, cfg.f_geometry)?;
    timings.push(("lift", start.elapsed()));

    Ok(Reconstruction {
        f,
        k,
        radon,
        diagnostics: Diagnostics {
            a1,
            a2,
            ntheta: cfg.ntheta,
            ns: cfg.s.n,
            reduction: samples.report,
            backproject_clipped: bp.clipped,
            noise: cfg.noise,
            timings,
        },
    })
}

/// Band-limited kernel `K_B(D) = ∫_{−B}^{B} |β| e^{iβD} dβ
/// = 2B sin(BD)/D + 2(cos(BD) − 1)/D²`, with `K_B(0) = B²`.
#[inline]
pub fn band_limited_kernel(d: f64, band: f64) -> f64 {
    let x = band * d;
    if x.abs() < 0.05 {
        let b2 = band * band;
        let x2 = x * x;
        b2 * (1.0 - x2 / 4.0 + x2 * x2 / 72.0)
    } else {
        let (s, c) = x.sin_cos();
        2.0 * band * s / d + 2.0 * (c - 1.0) / (d * d)
    }
}

/// Default band limit `π / Δ_D`, where `Δ_D` is the median spacing of `t²`
/// over the sinogram's `t` axis.
pub fn default_band(sin: &EllipticalSinogram) -> f64 {
    let mut gaps: Vec<f64> = (0..sin.t.n - 1)
        .map(|i| {
            let (t0, t1) = (sin.t.node(i), sin.t.node(i + 1));
            (t1 * t1 - t0 * t0).abs()
        })
        .collect();
    gaps.sort_by(f64::total_cmp);
    std::f64::consts::PI / gaps[gaps.len() / 2]
}

fn trapezoid_weight(i: usize, axis: &Axis) -> f64 {
    if i == 0 || i + 1 == axis.n {
        0.5 * axis.step()
    } else {
        axis.step()
    }
}

/// Closed-form inversion with the band-limited kernel:
/// `f(x) = |x2| / (2π² a1² a2²) ∬ K_B(D) R f(α, t) dt dα`,
/// `D = ((α − x1)/a1)² + (x2/a2)² − t²`, by the trapezoid rule on the grid.
pub fn direct_invert(sin: &EllipticalSinogram, geometry: ImageGeometry, band: f64) -> Result<GridImage> {
    if !(band > 0.0 && band.is_finite()) {
        return Err(Error::invalid(format!("band limit {band} must be positive")));
    }
    let (a1, a2) = sin.params.require_planar()?;
    let mut terms = Vec::new();
    for iu in 0..sin.u.n {
        for it in 0..sin.t.n {
            let v = sin.get(iu, it);
            if v != 0.0 {
                let t = sin.t.node(it);
                let w = trapezoid_weight(iu, &sin.u) * trapezoid_weight(it, &sin.t);
                terms.push((sin.u.node(iu), t * t, w * v));
            }
        }
    }
    let scale = 1.0 / (2.0 * std::f64::consts::PI.powi(2) * (a1 * a2).powi(2));
    let data = (0..geometry.len())
        .into_par_iter()
        .map(|idx| {
            let (x1, x2) = geometry.center(idx);
            let height = (x2 / a2).powi(2);
            let acc: f64 = terms
                .iter()
                .map(|&(u, t2, wv)| {
                    let d = ((u - x1) / a1).powi(2) + height - t2;
                    band_limited_kernel(d, band) * wv
                })
                .sum();
            x2.abs() * scale * acc
        })
        .collect();
    Ok(GridImage { geometry, data })
}

/// Fourier transform of `k` at `(α, β)` from the elliptical data:
/// `k̂(α, β) = (a1 a2)⁻¹ e^{iα²/(4β)} ∫₀^{t_max} R f(−a1 α/(2β), t) e^{−iβt²} dt`,
/// with `k̂(ξ) = ∫ k(z) e^{−i z·ξ} dz`. The `t` integral uses the trapezoid
/// rule with `nodes` intervals.
pub fn projection_slice(
    src: &dyn EllipticalData,
    params: &AnisotropyParams,
    alpha: f64,
    beta: f64,
    t_max: f64,
    nodes: usize,
) -> Result<Complex64> {
    let (a1, a2) = params.require_planar()?;
    if beta == 0.0 || !beta.is_finite() {
        return Err(Error::domain(format!("β = {beta} must be nonzero")));
    }
    if !(t_max > 0.0) || nodes == 0 {
        return Err(Error::invalid("t_max and nodes must be positive"));
    }
    let u = -a1 * alpha / (2.0 * beta);
    let h = t_max / nodes as f64;
    let mut acc = Complex64::new(0.0, 0.0);
    for i in 0..=nodes {
        let t = i as f64 * h;
        let w = if i == 0 || i == nodes { 0.5 } else { 1.0 };
        let v = src.sample(u, t);
        if v != 0.0 {
            acc += Complex64::from_polar(w * v, -beta * t * t);
        }
    }
    Ok(Complex64::from_polar(1.0 / (a1 * a2), alpha * alpha / (4.0 * beta)) * acc * h)
}
