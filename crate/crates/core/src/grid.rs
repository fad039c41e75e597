//! Sample grids shared by sinograms and images.
//!
//! Two conventions are used. Sinogram axes ([`Axis`]) place `n` nodes on a
//! closed interval including both endpoints. Images ([`ImageGeometry`]) split
//! each range into `n` equal cells and sample at the cell centers.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A closed interval `[lo, hi]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite()) || hi <= lo {
            return Err(Error::invalid(format!("degenerate interval [{lo}, {hi}]")));
        }
        Ok(Interval { lo, hi })
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn contains(&self, x: f64) -> bool {
        x >= self.lo && x <= self.hi
    }
}

/// `n` uniformly spaced nodes on a closed interval, endpoints included.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Axis {
    pub range: Interval,
    pub n: usize,
}

impl Axis {
    pub fn new(lo: f64, hi: f64, n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::invalid(format!("axis needs at least 2 nodes, got {n}")));
        }
        Ok(Axis {
            range: Interval::new(lo, hi)?,
            n,
        })
    }

    pub fn step(&self) -> f64 {
        self.range.width() / (self.n - 1) as f64
    }

    /// Counted from the nearer endpoint, so a range symmetric about zero
    /// gives exactly symmetric nodes.
    pub fn node(&self, i: usize) -> f64 {
        if 2 * i < self.n {
            self.range.lo + i as f64 * self.step()
        } else {
            self.range.hi - (self.n - 1 - i) as f64 * self.step()
        }
    }

    pub fn nodes(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n).map(move |i| self.node(i))
    }

    /// Lower node index and linear weight of the upper node for `x`, or `None`
    /// when `x` is outside the axis range.
    pub fn locate(&self, x: f64) -> Option<(usize, f64)> {
        if !self.range.contains(x) {
            return None;
        }
        let pos = (x - self.range.lo) / self.step();
        let i = (pos.floor() as usize).min(self.n - 2);
        Some((i, (pos - i as f64).clamp(0.0, 1.0)))
    }

    /// Index of the nearest node, or `None` outside the range.
    pub fn nearest(&self, x: f64) -> Option<usize> {
        if !self.range.contains(x) {
            return None;
        }
        let pos = ((x - self.range.lo) / self.step()).round() as usize;
        Some(pos.min(self.n - 1))
    }

    /// Linear interpolation of `row` (one value per node); zero outside.
    pub fn interpolate(&self, row: &[f64], x: f64) -> Option<f64> {
        self.locate(x)
            .map(|(i, w)| row[i] * (1.0 - w) + row[i + 1] * w)
    }
}

/// Pixel layout of an image: `nx × ny` cells covering `x × y`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ImageGeometry {
    pub nx: usize,
    pub ny: usize,
    pub x: Interval,
    pub y: Interval,
}

impl ImageGeometry {
    pub fn new(nx: usize, ny: usize, x: Interval, y: Interval) -> Result<Self> {
        if nx == 0 || ny == 0 {
            return Err(Error::invalid(format!("image size {nx}x{ny}")));
        }
        Ok(ImageGeometry { nx, ny, x, y })
    }

    /// Square `n × n` image over `[lo, hi]²`.
    pub fn square(n: usize, lo: f64, hi: f64) -> Result<Self> {
        let r = Interval::new(lo, hi)?;
        Self::new(n, n, r, r)
    }

    pub fn dx(&self) -> f64 {
        self.x.width() / self.nx as f64
    }

    pub fn dy(&self) -> f64 {
        self.y.width() / self.ny as f64
    }

    pub fn pixel_area(&self) -> f64 {
        self.dx() * self.dy()
    }

    pub fn len(&self) -> usize {
        self.nx * self.ny
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn x_center(&self, ix: usize) -> f64 {
        self.x.lo + (ix as f64 + 0.5) * self.dx()
    }

    pub fn y_center(&self, iy: usize) -> f64 {
        self.y.lo + (iy as f64 + 0.5) * self.dy()
    }

    pub fn center(&self, idx: usize) -> (f64, f64) {
        (self.x_center(idx % self.nx), self.y_center(idx / self.nx))
    }
}

/// A scalar field sampled at pixel centers, row-major with `x` fastest.
#[derive(Debug, Clone, PartialEq)]
pub struct GridImage {
    pub geometry: ImageGeometry,
    pub data: Vec<f64>,
}

impl GridImage {
    pub fn zeros(geometry: ImageGeometry) -> Self {
        GridImage {
            data: vec![0.0; geometry.len()],
            geometry,
        }
    }

    pub fn from_data(geometry: ImageGeometry, data: Vec<f64>) -> Result<Self> {
        if data.len() != geometry.len() {
            return Err(Error::invalid(format!(
                "image data length {} does not match {}x{}",
                data.len(),
                geometry.nx,
                geometry.ny
            )));
        }
        if let Some(i) = data.iter().position(|v| !v.is_finite()) {
            return Err(Error::invalid(format!("non-finite image sample at index {i}")));
        }
        Ok(GridImage { geometry, data })
    }

    pub fn get(&self, ix: usize, iy: usize) -> f64 {
        self.data[iy * self.geometry.nx + ix]
    }

    /// Value of the pixel containing `(x, y)`; zero outside the image.
    pub fn nearest(&self, x: f64, y: f64) -> f64 {
        let g = &self.geometry;
        if !(g.x.contains(x) && g.y.contains(y)) {
            return 0.0;
        }
        let ix = (((x - g.x.lo) / g.dx()) as usize).min(g.nx - 1);
        let iy = (((y - g.y.lo) / g.dy()) as usize).min(g.ny - 1);
        self.get(ix, iy)
    }

    /// Bilinear interpolation between pixel centers. Points outside the image
    /// extent give zero; inside the half-pixel border the edge value is held.
    pub fn bilinear(&self, x: f64, y: f64) -> f64 {
        let g = &self.geometry;
        if !(g.x.contains(x) && g.y.contains(y)) {
            return 0.0;
        }
        let (ix, wx) = cell_weight((x - g.x.lo) / g.dx() - 0.5, g.nx);
        let (iy, wy) = cell_weight((y - g.y.lo) / g.dy() - 0.5, g.ny);
        let ix1 = (ix + 1).min(g.nx - 1);
        let iy1 = (iy + 1).min(g.ny - 1);
        let top = self.get(ix, iy) * (1.0 - wx) + self.get(ix1, iy) * wx;
        let bottom = self.get(ix, iy1) * (1.0 - wx) + self.get(ix1, iy1) * wx;
        top * (1.0 - wy) + bottom * wy
    }

    pub fn l2_norm(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    /// Riemann sum of the field over the image extent.
    pub fn integral(&self) -> f64 {
        self.data.iter().sum::<f64>() * self.geometry.pixel_area()
    }
}

fn cell_weight(pos: f64, n: usize) -> (usize, f64) {
    let max = (n - 1) as f64;
    let p = pos.clamp(0.0, max);
    let i = (p.floor() as usize).min(n.saturating_sub(2));
    (i, (p - i as f64).clamp(0.0, 1.0))
}
