//! 16-bit binary PGM (P5) rendering.

use std::io::Write;
use std::path::Path;

use crate::error::{Error, Result};
use crate::grid::GridImage;

/// Linear window `[lo, hi]` mapped onto `0..=65535`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Window {
    pub lo: f64,
    pub hi: f64,
}

impl Window {
    /// `[min, max]` of the image.
    pub fn auto(img: &GridImage) -> Window {
        let lo = img.data.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = img.data.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        Window { lo, hi }
    }

    /// Gray level of `v`. A degenerate window (`lo == hi`) maps everything to 0.
    pub fn level(&self, v: f64) -> u16 {
        if self.hi <= self.lo {
            return 0;
        }
        let x = ((v - self.lo) / (self.hi - self.lo)).clamp(0.0, 1.0);
        (x * 65535.0).round() as u16
    }
}

/// Encodes the image as P5 with maxval 65535. The first row written is the
/// top of the image (largest `y`), samples are big-endian.
pub fn encode_pgm(img: &GridImage, window: Option<Window>) -> Result<Vec<u8>> {
    let g = &img.geometry;
    if g.is_empty() {
        return Err(Error::invalid("cannot render an empty image"));
    }
    let window = window.unwrap_or_else(|| Window::auto(img));
    let mut out = format!("P5\n{} {}\n65535\n", g.nx, g.ny).into_bytes();
    out.reserve(2 * g.len());
    for iy in (0..g.ny).rev() {
        for ix in 0..g.nx {
            out.extend_from_slice(&window.level(img.get(ix, iy)).to_be_bytes());
        }
    }
    Ok(out)
}

pub fn render_pgm(img: &GridImage, path: impl AsRef<Path>, window: Option<Window>) -> Result<()> {
    let bytes = encode_pgm(img, window)?;
    std::fs::File::create(path)?.write_all(&bytes)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::ImageGeometry;
    use crate::phantom::{rasterize, Phantom};

    fn pixels(bytes: &[u8], header_len: usize) -> Vec<u16> {
        bytes[header_len..].chunks_exact(2).map(|c| u16::from_be_bytes([c[0], c[1]])).collect()
    }

    #[test]
    fn constant_image_renders_black() {
        let g = ImageGeometry::square(4, 0.0, 1.0).unwrap();
        let img = GridImage { geometry: g, data: vec![0.7; 16] };
        let bytes = encode_pgm(&img, None).unwrap();
        let header = b"P5\n4 4\n65535\n";
        assert_eq!(&bytes[..header.len()], header);
        assert!(pixels(&bytes, header.len()).iter().all(|&p| p == 0));
    }

    #[test]
    fn single_pixel_image() {
        let g = ImageGeometry::square(1, 0.0, 1.0).unwrap();
        let img = GridImage { geometry: g, data: vec![1.0] };
        let bytes = encode_pgm(&img, Some(Window { lo: 0.0, hi: 2.0 })).unwrap();
        assert_eq!(bytes, [b"P5\n1 1\n65535\n".as_slice(), &32768u16.to_be_bytes()].concat());
    }

    #[test]
    fn brightest_pixels_are_the_value_two_disks() {
        let g = ImageGeometry::square(256, -1.0, 1.0).unwrap();
        let img = rasterize(&Phantom::paper(), g, false);
        let header = b"P5\n256 256\n65535\n".len();
        let px = pixels(&encode_pgm(&img, None).unwrap(), header);
        let max = *px.iter().max().unwrap();
        assert_eq!(max, 65535);
        for (i, &p) in px.iter().enumerate() {
            if p == max {
                let (col, row) = (i % 256, i / 256);
                let x = g.x_center(col);
                let y = g.y_center(255 - row);
                assert!((x + 0.5).hypot(y.abs() - 0.2) <= 0.05 + 1e-12, "({x}, {y})");
            }
        }
        // top half of the file is the upper half-plane
        let top_row_of_disk = 255 - ((0.2 + 1.0) / g.dy()) as usize;
        assert!(px[top_row_of_disk * 256..(top_row_of_disk + 1) * 256].contains(&max));
    }
}
