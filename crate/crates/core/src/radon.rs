//! Regular Radon transform on a full turn of angles and its filtered
//! backprojection inverse.
//!
//! Angles are `θ_j = 2πj/nθ` with `e_θ = (cos θ, sin θ)`. The ramp filter
//! approximates the operator with Fourier multiplier `|σ|`, band-limited at
//! the Nyquist frequency of the `s` axis, so that
//! `k(z) = (1/4π) ∫₀^{2π} (Λ Rk)(θ, z·e_θ) dθ`.

use std::f64::consts::PI;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::grid::{Axis, GridImage, ImageGeometry};

#[derive(Debug, Clone, PartialEq)]
pub struct RadonSinogram {
    pub ntheta: usize,
    pub s: Axis,
    /// `θ`-major: `data[j * ns + i]`.
    pub data: Vec<f64>,
}

impl RadonSinogram {
    pub fn zeros(ntheta: usize, s: Axis) -> Self {
        RadonSinogram {
            ntheta,
            s,
            data: vec![0.0; ntheta * s.n],
        }
    }

    pub fn new(ntheta: usize, s: Axis, data: Vec<f64>) -> Result<Self> {
        if ntheta == 0 {
            return Err(Error::invalid("sinogram needs at least one angle"));
        }
        if data.len() != ntheta * s.n {
            return Err(Error::invalid(format!(
                "sinogram data length {} does not match {}x{}",
                data.len(),
                ntheta,
                s.n
            )));
        }
        if data.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("sinogram contains non-finite samples"));
        }
        Ok(RadonSinogram { ntheta, s, data })
    }

    pub fn theta(&self, j: usize) -> f64 {
        2.0 * PI * j as f64 / self.ntheta as f64
    }

    pub fn dtheta(&self) -> f64 {
        2.0 * PI / self.ntheta as f64
    }

    pub fn row(&self, j: usize) -> &[f64] {
        &self.data[j * self.s.n..(j + 1) * self.s.n]
    }

    pub fn get(&self, j: usize, i: usize) -> f64 {
        self.data[j * self.s.n + i]
    }
}

/// `∫ k(s e_θ + η e_θ^⊥) dη` by the midpoint rule with spacing at most
/// `step`, over the chord of the disk `|z| ≤ support_radius`.
pub fn line_integral<F>(k: &F, theta: f64, s: f64, step: f64, support_radius: f64) -> f64
where
    F: Fn(f64, f64) -> f64 + ?Sized,
{
    if s.abs() >= support_radius {
        return 0.0;
    }
    let half = (support_radius * support_radius - s * s).sqrt();
    let m = ((2.0 * half / step).ceil() as usize).max(1);
    let h = 2.0 * half / m as f64;
    let (sn, cs) = theta.sin_cos();
    let mut acc = 0.0;
    for i in 0..m {
        let eta = -half + (i as f64 + 0.5) * h;
        acc += k(s * cs - eta * sn, s * sn + eta * cs);
    }
    acc * h
}

/// Samples `Rk` on `ntheta` angles over `[0, 2π)` and the nodes of `s`.
pub fn radon_forward<F>(k: F, ntheta: usize, s: Axis, step: f64, support_radius: f64) -> Result<RadonSinogram>
where
    F: Fn(f64, f64) -> f64 + Sync,
{
    if !(step > 0.0) {
        return Err(Error::invalid(format!("integration step {step} must be positive")));
    }
    let mut sin = RadonSinogram::zeros(ntheta, s);
    let dtheta = sin.dtheta();
    sin.data.par_chunks_mut(s.n).enumerate().for_each(|(j, row)| {
        let theta = dtheta * j as f64;
        for (i, v) in row.iter_mut().enumerate() {
            *v = line_integral(&k, theta, s.node(i), step, support_radius);
        }
    });
    Ok(sin)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RampWindow {
    /// Unapodized band-limited ramp.
    #[default]
    RamLak,
    /// Ramp times `(1 + cos(πσ/Ω))/2`.
    Hann,
}

/// Samples `g(m Δs)` of the spatial kernel of the band-limited ramp, for
/// `m = 0..len`. Ram-Lak: `g(0) = π/(2Δs²)`, `g(m) = −2/(π m² Δs²)` for odd
/// `m`, zero for even `m ≠ 0`; this is `2π` times the textbook kernel
/// `1/(4Δs²)`, `−1/(π² m² Δs²)`.
pub fn ramp_kernel(len: usize, ds: f64, window: RampWindow) -> Vec<f64> {
    match window {
        RampWindow::RamLak => (0..len)
            .map(|m| {
                let q = if m == 0 {
                    1.0 / (4.0 * ds * ds)
                } else if m % 2 == 0 {
                    0.0
                } else {
                    -1.0 / (PI * PI * (m * m) as f64 * ds * ds)
                };
                2.0 * PI * q
            })
            .collect(),
        RampWindow::Hann => {
            // (1/π) ∫₀^Ω σ W(σ) cos(σ m Δs) dσ by composite Simpson
            let omega = PI / ds;
            let panels = 4096;
            let h = omega / panels as f64;
            (0..len)
                .map(|m| {
                    let x = m as f64 * ds;
                    let g = |w: f64| w * 0.5 * (1.0 + (PI * w / omega).cos()) * (w * x).cos();
                    let mut acc = g(0.0) + g(omega);
                    for i in 1..panels {
                        acc += if i % 2 == 1 { 4.0 } else { 2.0 } * g(i as f64 * h);
                    }
                    acc * h / 3.0 / PI
                })
                .collect()
        }
    }
}

/// Convolves each `θ` row with the ramp kernel (zero-padded linear
/// convolution) and scales by `Δs`.
pub fn ramp_filter(sin: &RadonSinogram, window: RampWindow) -> Result<RadonSinogram> {
    let ns = sin.s.n;
    if ns < 2 {
        return Err(Error::invalid("ramp filter needs at least two s samples"));
    }
    let ds = sin.s.step();
    let kernel = ramp_kernel(ns, ds, window);
    let mut out = RadonSinogram::zeros(sin.ntheta, sin.s);
    out.data
        .par_chunks_mut(ns)
        .zip(sin.data.par_chunks(ns))
        .for_each(|(dst, src)| {
            for (i, d) in dst.iter_mut().enumerate() {
                let mut acc = 0.0;
                for (j, &p) in src.iter().enumerate() {
                    if p != 0.0 {
                        acc += kernel[i.abs_diff(j)] * p;
                    }
                }
                *d = acc * ds;
            }
        });
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct BackprojectReport {
    /// `(pixel, angle)` pairs whose projection `z·e_θ` fell outside the s-range.
    pub clipped: u64,
}

/// `k(z) = (Δθ/4π) Σ_j row_j(z·e_{θ_j})` with linear interpolation in `s`.
pub fn backproject(filtered: &RadonSinogram, geometry: ImageGeometry) -> (GridImage, BackprojectReport) {
    let dtheta = filtered.dtheta();
    let trig: Vec<(f64, f64)> = (0..filtered.ntheta)
        .map(|j| {
            let (s, c) = filtered.theta(j).sin_cos();
            (c, s)
        })
        .collect();
    let scale = dtheta / (4.0 * PI);
    let s_axis = filtered.s;
    let mut data = vec![0.0; geometry.len()];
    let clipped: u64 = data
        .par_chunks_mut(geometry.nx)
        .enumerate()
        .map(|(iy, row)| {
            let y = geometry.y_center(iy);
            let mut clipped = 0;
            for (ix, px) in row.iter_mut().enumerate() {
                let x = geometry.x_center(ix);
                let mut acc = 0.0;
                for (j, &(c, s)) in trig.iter().enumerate() {
                    match s_axis.interpolate(filtered.row(j), x * c + y * s) {
                        Some(v) => acc += v,
                        None => clipped += 1,
                    }
                }
                *px = acc * scale;
            }
            clipped
        })
        .sum();
    (GridImage { geometry, data }, BackprojectReport { clipped })
}

/// Ramp filter followed by backprojection.
pub fn fbp(sin: &RadonSinogram, geometry: ImageGeometry, window: RampWindow) -> Result<(GridImage, BackprojectReport)> {
    let filtered = ramp_filter(sin, window)?;
    Ok(backproject(&filtered, geometry))
}
