//! Test objects: weighted sums of disk indicators, mirrored across `x2 = 0`.

use std::f64::consts::PI;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{inverse_map_2d, AnisotropyParams};
use crate::grid::{GridImage, ImageGeometry};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Disk {
    pub center: [f64; 2],
    pub radius: f64,
    pub value: f64,
}

impl Disk {
    pub fn new(center: [f64; 2], radius: f64, value: f64) -> Result<Self> {
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::invalid(format!("disk radius {radius} must be positive")));
        }
        if !(value.is_finite() && center.iter().all(|c| c.is_finite())) {
            return Err(Error::invalid("disk center and value must be finite"));
        }
        Ok(Disk { center, radius, value })
    }

    /// Boundary counts as inside.
    #[inline]
    pub fn contains(&self, x1: f64, x2: f64) -> bool {
        let d1 = x1 - self.center[0];
        let d2 = x2 - self.center[1];
        d1 * d1 + d2 * d2 <= self.radius * self.radius
    }

    pub fn mirrored(&self) -> Disk {
        Disk {
            center: [self.center[0], -self.center[1]],
            ..*self
        }
    }

    pub fn area(&self) -> f64 {
        PI * self.radius * self.radius
    }
}

/// A phantom even in `x2`. Built from upper-half disks only; `disks()` holds
/// each input disk followed by its mirror image.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Phantom {
    disks: Vec<Disk>,
}

/// Reflection-closed phantom without the support-separation check. Used to
/// build comparison fields that straddle the axis; not exposed as a `Phantom`.
pub(crate) fn mirrored_pairs(half_disks: &[Disk]) -> Vec<Disk> {
    half_disks.iter().flat_map(|d| [*d, d.mirrored()]).collect()
}

impl Phantom {
    pub fn new(half_disks: &[Disk]) -> Result<Self> {
        let offenders: Vec<usize> = half_disks
            .iter()
            .enumerate()
            .filter(|(_, d)| d.center[1] <= d.radius)
            .map(|(i, _)| i)
            .collect();
        if !offenders.is_empty() {
            return Err(Error::SupportIntersectsAxis { offenders });
        }
        Ok(Phantom {
            disks: mirrored_pairs(half_disks),
        })
    }

    /// Four disks above the axis plus their reflections.
    pub fn paper() -> Self {
        let half = [
            Disk { center: [0.2, 0.4], radius: 0.2, value: 1.0 },
            Disk { center: [0.0, 0.5], radius: 0.15, value: 0.5 },
            Disk { center: [-0.3, 0.3], radius: 0.05, value: 1.5 },
            Disk { center: [-0.5, 0.2], radius: 0.05, value: 2.0 },
        ];
        Phantom::new(&half).expect("reference phantom is valid")
    }

    pub fn disks(&self) -> &[Disk] {
        &self.disks
    }

    /// The disks above the axis, in input order.
    pub fn upper_disks(&self) -> impl Iterator<Item = &Disk> {
        self.disks.iter().step_by(2)
    }

    pub fn is_empty(&self) -> bool {
        self.disks.is_empty()
    }

    /// `∫ f`, counting overlaps with multiplicity.
    pub fn mass(&self) -> f64 {
        self.disks.iter().map(|d| d.value * d.area()).sum()
    }

    /// Smallest radius `R` with the support inside `|x| ≤ R`.
    pub fn support_radius(&self) -> f64 {
        self.disks
            .iter()
            .map(|d| d.center[0].hypot(d.center[1]) + d.radius)
            .fold(0.0, f64::max)
    }

    #[inline]
    pub fn eval(&self, x1: f64, x2: f64) -> f64 {
        self.disks
            .iter()
            .filter(|d| d.contains(x1, x2))
            .map(|d| d.value)
            .sum()
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        let spec: PhantomSpec = serde_json::from_str(text)?;
        let disks = spec.into_disks();
        for d in &disks {
            Disk::new(d.center, d.radius, d.value)?;
        }
        Phantom::new(&disks)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json_str(&std::fs::read_to_string(path)?)
    }

    pub fn to_json(&self) -> String {
        let half: Vec<Disk> = self.upper_disks().copied().collect();
        serde_json::to_string_pretty(&PhantomSpec::Object { disks: half }).expect("disks serialize")
    }
}

/// JSON phantom file: either a bare list of disks or `{"disks": [...]}`.
#[derive(Debug, Serialize, Deserialize)]
#[serde(untagged)]
enum PhantomSpec {
    List(Vec<Disk>),
    Object { disks: Vec<Disk> },
}

impl PhantomSpec {
    fn into_disks(self) -> Vec<Disk> {
        match self {
            PhantomSpec::List(d) | PhantomSpec::Object { disks: d } => d,
        }
    }
}

/// Samples `field` at pixel centers, or as the mean of a `supersample²`
/// sub-grid per pixel when `supersample > 1`.
pub fn rasterize_fn<F>(field: F, geometry: ImageGeometry, supersample: usize) -> GridImage
where
    F: Fn(f64, f64) -> f64 + Sync,
{
    let ss = supersample.max(1);
    let (dx, dy) = (geometry.dx(), geometry.dy());
    let mut data = vec![0.0; geometry.len()];
    data.par_chunks_mut(geometry.nx)
        .enumerate()
        .for_each(|(iy, row)| {
            for (ix, px) in row.iter_mut().enumerate() {
                *px = if ss == 1 {
                    field(geometry.x_center(ix), geometry.y_center(iy))
                } else {
                    let x0 = geometry.x.lo + ix as f64 * dx;
                    let y0 = geometry.y.lo + iy as f64 * dy;
                    let mut acc = 0.0;
                    for sy in 0..ss {
                        let y = y0 + (sy as f64 + 0.5) * dy / ss as f64;
                        for sx in 0..ss {
                            acc += field(x0 + (sx as f64 + 0.5) * dx / ss as f64, y);
                        }
                    }
                    acc / (ss * ss) as f64
                };
            }
        });
    GridImage { geometry, data }
}

/// Supersampling factor used when a raster serves as an error reference.
pub const REFERENCE_SUPERSAMPLE: usize = 4;

pub fn rasterize(phantom: &Phantom, geometry: ImageGeometry, supersample: bool) -> GridImage {
    let ss = if supersample { REFERENCE_SUPERSAMPLE } else { 1 };
    rasterize_fn(|x, y| phantom.eval(x, y), geometry, ss)
}

#[derive(Debug, Clone, PartialEq)]
pub struct AdmissibilityReport {
    /// Every disk maps into the open unit ball under `m⁻¹`.
    pub admissible: bool,
    /// Largest `|m⁻¹(x)|` over the sampled support points.
    pub max_norm: f64,
    /// Indices (into `Phantom::disks`) of disks reaching `|m⁻¹(x)| ≥ 1`.
    pub offenders: Vec<usize>,
}

const BOUNDARY_SAMPLES: usize = 720;

/// Checks that `k = f∘m / √(z2 − z1²)` is supported in the unit ball, so that
/// `s ∈ [−1, 1]` covers every line meeting it.
///
/// `|m⁻¹(x)|²` is convex in `x`, so its maximum over a disk sits on the
/// boundary; the boundary is sampled at fixed angles together with the center.
pub fn validate_admissible(phantom: &Phantom, params: &AnisotropyParams) -> Result<AdmissibilityReport> {
    let (a1, a2) = params.require_planar()?;
    let norm = |x1: f64, x2: f64| {
        let (z1, z2) = inverse_map_2d(x1, x2, a1, a2);
        z1.hypot(z2)
    };
    let mut max_norm: f64 = 0.0;
    let mut offenders = Vec::new();
    for (i, d) in phantom.disks().iter().enumerate() {
        let mut disk_max = norm(d.center[0], d.center[1]);
        for k in 0..BOUNDARY_SAMPLES {
            let phi = 2.0 * PI * k as f64 / BOUNDARY_SAMPLES as f64;
            let (s, c) = phi.sin_cos();
            disk_max = disk_max.max(norm(d.center[0] + d.radius * c, d.center[1] + d.radius * s));
        }
        if disk_max >= 1.0 {
            offenders.push(i);
        }
        max_norm = max_norm.max(disk_max);
    }
    Ok(AdmissibilityReport {
        admissible: offenders.is_empty(),
        max_norm,
        offenders,
    })
}
