//! Image comparison metrics.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::grid::GridImage;
use crate::phantom::Phantom;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Mask {
    #[default]
    All,
    /// Union of the phantom disks.
    Disks,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DiskMean {
    /// Index into `Phantom::disks`.
    pub index: usize,
    pub center: [f64; 2],
    pub true_value: f64,
    pub mean: f64,
    pub pixels: usize,
}

impl DiskMean {
    pub fn relative_error(&self) -> f64 {
        (self.mean - self.true_value).abs() / self.true_value.abs()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MetricsReport {
    /// `‖b − a‖ / ‖a‖` over the mask, `a` being the reference.
    pub rel_l2: f64,
    pub max_abs: f64,
    /// `10 log10(peak² / mse)` with `peak = max |a|`; `None` when the images agree.
    pub psnr: Option<f64>,
    pub mask_pixels: usize,
    pub disk_means: Vec<DiskMean>,
}

impl MetricsReport {
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "relative_l2 = {}", self.rel_l2);
        let _ = writeln!(out, "max_abs_error = {}", self.max_abs);
        match self.psnr {
            Some(p) => {
                let _ = writeln!(out, "psnr_db = {p}");
            }
            None => {
                let _ = writeln!(out, "psnr_db = inf");
            }
        }
        let _ = writeln!(out, "mask_pixels = {}", self.mask_pixels);
        for d in &self.disk_means {
            let _ = writeln!(
                out,
                "disk {} center = ({}, {}) true = {} mean = {} pixels = {}",
                d.index, d.center[0], d.center[1], d.true_value, d.mean, d.pixels
            );
        }
        out
    }
}

/// Pixels whose centers lie inside some disk.
pub fn disk_mask(phantom: &Phantom, img: &GridImage) -> Vec<bool> {
    let g = &img.geometry;
    (0..g.len())
        .map(|i| {
            let (x, y) = g.center(i);
            phantom.disks().iter().any(|d| d.contains(x, y))
        })
        .collect()
}

pub fn compare(a: &GridImage, b: &GridImage, mask: Option<&[bool]>) -> Result<MetricsReport> {
    if a.geometry != b.geometry {
        return Err(Error::GeometryMismatch(format!("{:?} vs {:?}", a.geometry, b.geometry)));
    }
    if let Some(m) = mask {
        if m.len() != a.data.len() {
            return Err(Error::GeometryMismatch(format!("mask has {} entries, images {}", m.len(), a.data.len())));
        }
    }
    let selected = |i: usize| mask.is_none_or(|m| m[i]);
    let (mut ref_sq, mut diff_sq, mut max_abs, mut peak, mut count) = (0.0, 0.0, 0.0f64, 0.0f64, 0usize);
    for i in (0..a.data.len()).filter(|&i| selected(i)) {
        let d = b.data[i] - a.data[i];
        ref_sq += a.data[i] * a.data[i];
        diff_sq += d * d;
        max_abs = max_abs.max(d.abs());
        peak = peak.max(a.data[i].abs());
        count += 1;
    }
    let rel_l2 = if ref_sq > 0.0 {
        (diff_sq / ref_sq).sqrt()
    } else if diff_sq == 0.0 {
        0.0
    } else {
        return Err(Error::invalid("reference image is zero on the mask"));
    };
    let psnr = (diff_sq > 0.0 && count > 0).then(|| 10.0 * (peak * peak / (diff_sq / count as f64)).log10());
    Ok(MetricsReport {
        rel_l2,
        max_abs,
        psnr,
        mask_pixels: count,
        disk_means: Vec::new(),
    })
}

/// Mean of `img` over the interior of each disk: points at least `margin`
/// inside the disk and at least `margin` outside every other disk, so the
/// true value there is the disk's own value.
pub fn disk_interior_means(img: &GridImage, phantom: &Phantom, margin: f64) -> Vec<DiskMean> {
    let g = &img.geometry;
    let disks = phantom.disks();
    disks
        .iter()
        .enumerate()
        .map(|(i, d)| {
            let (mut sum, mut n) = (0.0, 0usize);
            for idx in 0..g.len() {
                let (x, y) = g.center(idx);
                let inside = (x - d.center[0]).hypot(y - d.center[1]) <= d.radius - margin;
                let isolated = disks
                    .iter()
                    .enumerate()
                    .all(|(j, o)| j == i || (x - o.center[0]).hypot(y - o.center[1]) >= o.radius + margin);
                if inside && isolated {
                    sum += img.data[idx];
                    n += 1;
                }
            }
            DiskMean {
                index: i,
                center: d.center,
                true_value: d.value,
                mean: if n > 0 { sum / n as f64 } else { f64::NAN },
                pixels: n,
            }
        })
        .collect()
}

/// Center of the disk of the given radius with the largest mean of `img`
/// (restricted to pixels with `y > 0`). A zero radius gives the plain argmax.
///
/// For a flat-topped object the argmax wanders with ringing; the moving
/// average picks the object center instead.
pub fn locate_peak(img: &GridImage, radius: f64) -> Option<(f64, f64)> {
    let g = &img.geometry;
    let (dx, dy) = (g.dx(), g.dy());
    let (rx, ry) = ((radius / dx).floor() as i64, (radius / dy).floor() as i64);
    let stencil: Vec<(i64, i64)> = (-ry..=ry)
        .flat_map(|j| (-rx..=rx).map(move |i| (i, j)))
        .filter(|&(i, j)| (i as f64 * dx).hypot(j as f64 * dy) <= radius)
        .collect();
    let (nx, ny) = (g.nx as i64, g.ny as i64);
    (0..g.len())
        .filter(|&idx| g.center(idx).1 > 0.0)
        .map(|idx| {
            let (ix, iy) = ((idx % g.nx) as i64, (idx / g.nx) as i64);
            let (mut sum, mut n) = (0.0, 0usize);
            for &(i, j) in &stencil {
                let (x, y) = (ix + i, iy + j);
                if (0..nx).contains(&x) && (0..ny).contains(&y) {
                    sum += img.data[(y * nx + x) as usize];
                    n += 1;
                }
            }
            (idx, sum / n as f64)
        })
        .max_by(|a, b| a.1.total_cmp(&b.1))
        .map(|(idx, _)| g.center(idx))
}

/// Default interior margin: two pixels.
pub fn default_margin(img: &GridImage) -> f64 {
    2.0 * img.geometry.dx().max(img.geometry.dy())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::ImageGeometry;
    use crate::phantom::rasterize;

    fn ramp() -> GridImage {
        let g = ImageGeometry::square(16, -1.0, 1.0).unwrap();
        GridImage { geometry: g, data: (0..256).map(|i| (i % 7) as f64 - 2.0).collect() }
    }

    #[test]
    fn identical_images() {
        let x = ramp();
        let r = compare(&x, &x, None).unwrap();
        assert_eq!(r.rel_l2, 0.0);
        assert_eq!(r.psnr, None);
        assert!(r.to_text().contains("psnr_db = inf"));
    }

    #[test]
    fn constant_offset_gives_exact_relative_error() {
        let x = ramp();
        let shift = 0.1 * x.l2_norm() / (x.data.len() as f64).sqrt();
        let y = GridImage { geometry: x.geometry, data: x.data.iter().map(|v| v + shift).collect() };
        let r = compare(&x, &y, None).unwrap();
        assert!((r.rel_l2 - 0.1).abs() < 1e-12);
    }

    #[test]
    fn disjoint_supports() {
        let g = ImageGeometry::square(4, 0.0, 1.0).unwrap();
        let a = GridImage { geometry: g, data: (0..16).map(|i| if i < 8 { 1.0 + i as f64 } else { 0.0 }).collect() };
        let b = GridImage { geometry: g, data: (0..16).map(|i| if i >= 8 { 2.0 } else { 0.0 }).collect() };
        let r = compare(&a, &b, None).unwrap();
        let want = (a.l2_norm().powi(2) + b.l2_norm().powi(2)).sqrt() / a.l2_norm();
        assert!((r.rel_l2 - want).abs() < 1e-12);
    }

    #[test]
    fn geometry_mismatch_is_an_error() {
        let a = ramp();
        let b = GridImage::zeros(ImageGeometry::square(8, -1.0, 1.0).unwrap());
        assert!(matches!(compare(&a, &b, None), Err(Error::GeometryMismatch(_))));
    }

    #[test]
    fn interior_means_of_exact_raster_are_exact() {
        let p = Phantom::paper();
        let img = rasterize(&p, ImageGeometry::square(256, -1.0, 1.0).unwrap(), false);
        let means = disk_interior_means(&img, &p, default_margin(&img));
        assert_eq!(means.len(), 8);
        for m in means {
            assert!(m.pixels > 20, "{m:?}");
            assert_eq!(m.mean, m.true_value);
        }
        let mask = disk_mask(&p, &img);
        let r = compare(&img, &img, Some(&mask)).unwrap();
        assert!(r.mask_pixels > 0 && r.mask_pixels < 256 * 256);
    }

    #[test]
    fn peak_of_flat_disk_is_its_center() {
        let p = Phantom::new(&[crate::phantom::Disk { center: [0.25, 0.5], radius: 0.2, value: 1.0 }]).unwrap();
        let mut img = rasterize(&p, ImageGeometry::square(64, -1.0, 1.0).unwrap(), false);
        // a ringing spike near the rim must not win
        let rim = img.geometry.nx * 47 + 38;
        img.data[rim] = 1.5;
        let (x, y) = locate_peak(&img, 0.2).unwrap();
        assert!((x - 0.25).abs() <= 2.0 * img.geometry.dx() && (y - 0.5).abs() <= 2.0 * img.geometry.dy(), "{x} {y}");
        assert_eq!(locate_peak(&img, 0.0), Some(img.geometry.center(rim)));
    }
}
