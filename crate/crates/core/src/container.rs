//! ERSG binary container.
//!
//! All multi-byte fields are little-endian.
//!
//! ```text
//! offset  size  field
//! 0       4     magic "ERSG"
//! 4       4     version (u32) = 1
//! 8       1     kind (u8): 0 elliptical sinogram, 1 regular sinogram, 2 image
//! 9       ...   kind-specific header, then f64 samples
//! ```
//!
//! Elliptical sinogram header: `a1, a2` (f64), `nu, nt` (u32),
//! `u_lo, u_hi, t_lo, t_hi` (f64), `mode` (u8: 0 quadrature, 1 pixel),
//! `noise_algorithm` (u32, 0 = none), `noise_seed` (u64), `noise_ratio` (f64).
//! Data `nu·nt` samples, `u`-major.
//!
//! Regular sinogram header: `ntheta, ns` (u32), `s_lo, s_hi` (f64). Data
//! `ntheta·ns` samples, `θ`-major, `θ_j = 2πj/ntheta`.
//!
//! Image header: `nx, ny` (u32), `x_lo, x_hi, y_lo, y_hi` (f64). Data `nx·ny`
//! samples, row-major with `x` fastest, pixel-center sampling.

use std::path::Path;

use thiserror::Error;

use crate::error::Result;
use crate::forward::{EllipticalSinogram, ForwardMode, NoiseInfo};
use crate::geometry::AnisotropyParams;
use crate::grid::{Axis, GridImage, ImageGeometry, Interval};
use crate::radon::RadonSinogram;

pub const MAGIC: &[u8; 4] = b"ERSG";
pub const VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u8)]
pub enum Kind {
    Elliptical = 0,
    Radon = 1,
    Image = 2,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ErsgObject {
    Elliptical(EllipticalSinogram),
    Radon(RadonSinogram),
    Image(GridImage),
}

impl ErsgObject {
    pub fn kind(&self) -> Kind {
        match self {
            ErsgObject::Elliptical(_) => Kind::Elliptical,
            ErsgObject::Radon(_) => Kind::Radon,
            ErsgObject::Image(_) => Kind::Image,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ContainerError {
    #[error("bad magic {found:?} at byte 0")]
    BadMagic { found: [u8; 4] },
    #[error("unsupported version {version} at byte {offset}")]
    UnsupportedVersion { version: u32, offset: usize },
    #[error("unsupported kind {kind} at byte {offset}")]
    UnsupportedKind { kind: u8, offset: usize },
    #[error("truncated: field `{field}` needs {needed} bytes at byte {offset}, file has {len}")]
    Truncated {
        field: &'static str,
        offset: usize,
        needed: usize,
        len: usize,
    },
    #[error("invalid header field `{field}` at byte {offset}: {reason}")]
    InvalidHeader {
        field: &'static str,
        offset: usize,
        reason: String,
    },
    #[error("{extra} trailing bytes after payload at byte {offset}")]
    TrailingBytes { extra: usize, offset: usize },
    #[error("expected a {expected} container, found {found:?}")]
    WrongKind { expected: &'static str, found: Kind },
}

struct Reader<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, field: &'static str, n: usize) -> std::result::Result<&'a [u8], ContainerError> {
        if self.buf.len() - self.pos < n {
            return Err(ContainerError::Truncated {
                field,
                offset: self.pos,
                needed: n,
                len: self.buf.len(),
            });
        }
        let out = &self.buf[self.pos..self.pos + n];
        self.pos += n;
        Ok(out)
    }

    fn u8(&mut self, field: &'static str) -> std::result::Result<u8, ContainerError> {
        Ok(self.take(field, 1)?[0])
    }

    fn u32(&mut self, field: &'static str) -> std::result::Result<u32, ContainerError> {
        Ok(u32::from_le_bytes(self.take(field, 4)?.try_into().unwrap()))
    }

    fn u64(&mut self, field: &'static str) -> std::result::Result<u64, ContainerError> {
        Ok(u64::from_le_bytes(self.take(field, 8)?.try_into().unwrap()))
    }

    fn f64(&mut self, field: &'static str) -> std::result::Result<f64, ContainerError> {
        Ok(f64::from_le_bytes(self.take(field, 8)?.try_into().unwrap()))
    }

    fn samples(&mut self, count: usize) -> std::result::Result<Vec<f64>, ContainerError> {
        let bytes = self.take("data", count.saturating_mul(8))?;
        Ok(bytes
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
            .collect())
    }

    /// Runs `check` on a value read at `offset`, mapping failures to a header error.
    fn check<T>(&self, field: &'static str, offset: usize, r: Result<T>) -> std::result::Result<T, ContainerError> {
        r.map_err(|e| ContainerError::InvalidHeader {
            field,
            offset,
            reason: e.to_string(),
        })
    }
}

fn put_f64s(out: &mut Vec<u8>, vals: &[f64]) {
    for v in vals {
        out.extend_from_slice(&v.to_le_bytes());
    }
}

pub fn encode(obj: &ErsgObject) -> Vec<u8> {
    let mut out = Vec::new();
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&VERSION.to_le_bytes());
    out.push(obj.kind() as u8);
    match obj {
        ErsgObject::Elliptical(s) => {
            put_f64s(&mut out, s.params.scales());
            out.extend_from_slice(&(s.u.n as u32).to_le_bytes());
            out.extend_from_slice(&(s.t.n as u32).to_le_bytes());
            put_f64s(&mut out, &[s.u.range.lo, s.u.range.hi, s.t.range.lo, s.t.range.hi]);
            out.push(match s.mode {
                ForwardMode::Quadrature => 0,
                ForwardMode::Pixel => 1,
            });
            let noise = s.noise.unwrap_or(NoiseInfo { algorithm: 0, seed: 0, ratio: 0.0 });
            out.extend_from_slice(&noise.algorithm.to_le_bytes());
            out.extend_from_slice(&noise.seed.to_le_bytes());
            put_f64s(&mut out, &[noise.ratio]);
            put_f64s(&mut out, &s.data);
        }
        ErsgObject::Radon(s) => {
            out.extend_from_slice(&(s.ntheta as u32).to_le_bytes());
            out.extend_from_slice(&(s.s.n as u32).to_le_bytes());
            put_f64s(&mut out, &[s.s.range.lo, s.s.range.hi]);
            put_f64s(&mut out, &s.data);
        }
        ErsgObject::Image(img) => {
            let g = &img.geometry;
            out.extend_from_slice(&(g.nx as u32).to_le_bytes());
            out.extend_from_slice(&(g.ny as u32).to_le_bytes());
            put_f64s(&mut out, &[g.x.lo, g.x.hi, g.y.lo, g.y.hi]);
            put_f64s(&mut out, &img.data);
        }
    }
    out
}

pub fn decode(buf: &[u8]) -> std::result::Result<ErsgObject, ContainerError> {
    let mut r = Reader { buf, pos: 0 };
    let magic = r.take("magic", 4)?;
    if magic != MAGIC {
        return Err(ContainerError::BadMagic {
            found: magic.try_into().unwrap(),
        });
    }
    let version = r.u32("version")?;
    if version != VERSION {
        return Err(ContainerError::UnsupportedVersion { version, offset: 4 });
    }
    let kind = r.u8("kind")?;
    let obj = match kind {
        0 => {
            let off = r.pos;
            let a1 = r.f64("a1")?;
            let a2 = r.f64("a2")?;
            let params = r.check("a1/a2", off, AnisotropyParams::planar(a1, a2))?;
            let nu = r.u32("nu")? as usize;
            let nt = r.u32("nt")? as usize;
            let off = r.pos;
            let (ulo, uhi) = (r.f64("u_lo")?, r.f64("u_hi")?);
            let u = r.check("u-range", off, Axis::new(ulo, uhi, nu))?;
            let off = r.pos;
            let (tlo, thi) = (r.f64("t_lo")?, r.f64("t_hi")?);
            let t = r.check("t-range", off, Axis::new(tlo, thi, nt))?;
            let off = r.pos;
            let mode = match r.u8("mode")? {
                0 => ForwardMode::Quadrature,
                1 => ForwardMode::Pixel,
                m => {
                    return Err(ContainerError::InvalidHeader {
                        field: "mode",
                        offset: off,
                        reason: format!("unknown forward mode {m}"),
                    })
                }
            };
            let algorithm = r.u32("noise_algorithm")?;
            let seed = r.u64("noise_seed")?;
            let ratio = r.f64("noise_ratio")?;
            let off = r.pos;
            let data = r.samples(nu * nt)?;
            let mut s = r.check("data", off, EllipticalSinogram::new(params, u, t, data, mode))?;
            if algorithm != 0 {
                s.noise = Some(NoiseInfo { algorithm, seed, ratio });
            }
            ErsgObject::Elliptical(s)
        }
        1 => {
            let ntheta = r.u32("ntheta")? as usize;
            let ns = r.u32("ns")? as usize;
            let off = r.pos;
            let (lo, hi) = (r.f64("s_lo")?, r.f64("s_hi")?);
            let s = r.check("s-range", off, Axis::new(lo, hi, ns))?;
            let off = r.pos;
            let data = r.samples(ntheta * ns)?;
            ErsgObject::Radon(r.check("data", off, RadonSinogram::new(ntheta, s, data))?)
        }
        2 => {
            let nx = r.u32("nx")? as usize;
            let ny = r.u32("ny")? as usize;
            let off = r.pos;
            let (xlo, xhi, ylo, yhi) = (r.f64("x_lo")?, r.f64("x_hi")?, r.f64("y_lo")?, r.f64("y_hi")?);
            let geometry = r.check(
                "extent",
                off,
                Interval::new(xlo, xhi).and_then(|x| ImageGeometry::new(nx, ny, x, Interval::new(ylo, yhi)?)),
            )?;
            let off = r.pos;
            let data = r.samples(nx * ny)?;
            ErsgObject::Image(r.check("data", off, GridImage::from_data(geometry, data))?)
        }
        k => return Err(ContainerError::UnsupportedKind { kind: k, offset: 8 }),
    };
    if r.pos != buf.len() {
        return Err(ContainerError::TrailingBytes {
            extra: buf.len() - r.pos,
            offset: r.pos,
        });
    }
    Ok(obj)
}

pub fn write_container(path: impl AsRef<Path>, obj: &ErsgObject) -> Result<()> {
    std::fs::write(path, encode(obj))?;
    Ok(())
}

pub fn read_container(path: impl AsRef<Path>) -> Result<ErsgObject> {
    Ok(decode(&std::fs::read(path)?)?)
}

pub fn read_elliptical(path: impl AsRef<Path>) -> Result<EllipticalSinogram> {
    match read_container(path)? {
        ErsgObject::Elliptical(s) => Ok(s),
        other => Err(ContainerError::WrongKind { expected: "elliptical sinogram", found: other.kind() }.into()),
    }
}

pub fn read_radon(path: impl AsRef<Path>) -> Result<RadonSinogram> {
    match read_container(path)? {
        ErsgObject::Radon(s) => Ok(s),
        other => Err(ContainerError::WrongKind { expected: "regular sinogram", found: other.kind() }.into()),
    }
}

pub fn read_image(path: impl AsRef<Path>) -> Result<GridImage> {
    match read_container(path)? {
        ErsgObject::Image(i) => Ok(i),
        other => Err(ContainerError::WrongKind { expected: "image", found: other.kind() }.into()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn image() -> GridImage {
        let g = ImageGeometry::square(3, -1.0, 1.0).unwrap();
        GridImage::from_data(g, (0..9).map(|i| i as f64 * 0.25 - 1.0).collect()).unwrap()
    }

    #[test]
    fn header_layout() {
        let bytes = encode(&ErsgObject::Image(image()));
        assert_eq!(&bytes[..4], b"ERSG");
        assert_eq!(&bytes[4..8], &[1, 0, 0, 0]);
        assert_eq!(bytes[8], 2);
        assert_eq!(bytes.len(), 9 + 8 + 32 + 9 * 8);
    }

    #[test]
    fn truncation_names_the_field() {
        let bytes = encode(&ErsgObject::Image(image()));
        match decode(&bytes[..15]).unwrap_err() {
            ContainerError::Truncated { field, offset, .. } => {
                assert_eq!(field, "ny");
                assert_eq!(offset, 13);
            }
            e => panic!("{e}"),
        }
        match decode(&bytes[..bytes.len() - 1]).unwrap_err() {
            ContainerError::Truncated { field, .. } => assert_eq!(field, "data"),
            e => panic!("{e}"),
        }
        assert!(matches!(decode(&bytes[..2]), Err(ContainerError::Truncated { field: "magic", .. })));
    }

    #[test]
    fn rejects_bad_magic_version_kind() {
        let mut bytes = encode(&ErsgObject::Image(image()));
        bytes[8] = 7;
        assert_eq!(decode(&bytes).unwrap_err(), ContainerError::UnsupportedKind { kind: 7, offset: 8 });
        bytes[8] = 2;
        bytes[4] = 2;
        assert!(matches!(decode(&bytes), Err(ContainerError::UnsupportedVersion { version: 2, .. })));
        bytes[0] = b'X';
        assert!(matches!(decode(&bytes), Err(ContainerError::BadMagic { .. })));
    }

    #[test]
    fn rejects_inconsistent_headers() {
        let mut bytes = encode(&ErsgObject::Image(image()));
        bytes.push(0);
        assert!(matches!(decode(&bytes), Err(ContainerError::TrailingBytes { extra: 1, .. })));
        let mut bytes = encode(&ErsgObject::Image(image()));
        // x_hi = x_lo
        bytes[25..33].copy_from_slice(&(-1.0f64).to_le_bytes());
        assert!(matches!(decode(&bytes), Err(ContainerError::InvalidHeader { field: "extent", offset: 17, .. })));
    }
}
