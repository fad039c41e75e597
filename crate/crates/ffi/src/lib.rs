//! C ABI for `ert-core`.
//!
//! Objects cross the boundary as opaque handles created by `ert_*_new` /
//! `ert_*_read` style calls and released with the matching `ert_*_free`.
//! Every fallible call returns an [`ErtStatus`]; on failure the message is
//! available from [`ert_last_error`] on the same thread until the next call.
//! Panics are caught at the boundary and reported as `ERT_STATUS_PANIC`.

#![allow(clippy::missing_safety_doc)]

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use std::ptr;

use ert_core::container::{read_elliptical, read_image, write_container, ErsgObject};
use ert_core::forward::{add_noise, elliptical_sinogram, phantom_ellipse_integral, ForwardMode};
use ert_core::geometry::{forward_map, inverse_map, HalfSpacePoint, ParaboloidPoint};
use ert_core::inversion::{default_band, direct_invert, reconstruct, AnalyticSource, GriddedSource, NoiseSpec, ReconstructConfig};
use ert_core::metrics::compare;
use ert_core::phantom::rasterize;
use ert_core::radon::RampWindow;
use ert_core::{AnisotropyParams, Axis, Disk, EllipticalSinogram, Error, GridImage, ImageGeometry, NodeCount, Phantom};

/// Result codes. Zero is success.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErtStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Domain = 3,
    GeometryMismatch = 4,
    Io = 5,
    Format = 6,
    BufferTooSmall = 7,
    Panic = 8,
}

/// A phantom: weighted disk indicators, mirrored in `x2 = 0`.
pub struct ErtPhantom(Phantom);

/// Samples of the elliptical transform on a `(u, t)` grid.
pub struct ErtSinogram(EllipticalSinogram);

/// A scalar field on a uniform grid.
pub struct ErtImage(GridImage);

/// Ramp filter apodization, passed as `uint32_t` in [`ErtReconstructConfig`].
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErtWindow {
    RamLak = 0,
    Hann = 1,
}

/// Parameters of reduction, filtered backprojection and lift. `f` and `k`
/// share a `size × size` grid over `[-1, 1]²`. `noise_ratio = 0` adds no noise.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct ErtReconstructConfig {
    pub ntheta: u32,
    pub ns: u32,
    pub s_lo: f64,
    pub s_hi: f64,
    pub size: u32,
    /// An [`ErtWindow`] value.
    pub window: u32,
    pub noise_ratio: f64,
    pub noise_seed: u64,
}

/// Quadrature node rule: `fixed > 0` uses that many nodes, otherwise the
/// count adapts to `t` so that node spacing stays near `pixel`.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct ErtNodes {
    pub fixed: u32,
    pub pixel: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let msg = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(msg));
}

fn clear_error() {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
}

fn status_of(err: &Error) -> ErtStatus {
    match err {
        Error::Domain(_) => ErtStatus::Domain,
        Error::InvalidArgument(_) | Error::SupportIntersectsAxis { .. } | Error::InconsistentAperture { .. } => {
            ErtStatus::InvalidArgument
        }
        Error::GeometryMismatch(_) => ErtStatus::GeometryMismatch,
        Error::Container(_) | Error::Json(_) => ErtStatus::Format,
        Error::Io(_) => ErtStatus::Io,
    }
}

/// Internal failure carrying its status code.
struct Fail(ErtStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail(status_of(&e), e.to_string())
    }
}

type Outcome<T> = Result<T, Fail>;

fn null(what: &str) -> Fail {
    Fail(ErtStatus::NullPointer, format!("{what} is null"))
}

fn invalid(msg: impl Into<String>) -> Fail {
    Fail(ErtStatus::InvalidArgument, msg.into())
}

/// Runs `body`, records any failure, and converts it to a status.
fn guard(body: impl FnOnce() -> Outcome<()>) -> ErtStatus {
    clear_error();
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => ErtStatus::Ok,
        Ok(Err(Fail(status, msg))) => {
            set_error(msg);
            status
        }
        Err(panic) => {
            let msg = panic
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| panic.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            set_error(format!("internal panic: {msg}"));
            ErtStatus::Panic
        }
    }
}

unsafe fn deref<'a, T>(p: *const T, what: &str) -> Outcome<&'a T> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn out<'a, T>(p: *mut T, what: &str) -> Outcome<&'a mut T> {
    p.as_mut().ok_or_else(|| null(what))
}

unsafe fn slice<'a>(p: *const f64, len: usize, what: &str) -> Outcome<&'a [f64]> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(null(what));
    }
    Ok(std::slice::from_raw_parts(p, len))
}

unsafe fn path(p: *const c_char) -> Outcome<PathBuf> {
    if p.is_null() {
        return Err(null("path"));
    }
    let s = CStr::from_ptr(p).to_str().map_err(|_| invalid("path is not UTF-8"))?;
    Ok(PathBuf::from(s))
}

fn boxed<T>(v: T) -> *mut T {
    Box::into_raw(Box::new(v))
}

/// Copies `src` into `dst` (capacity `cap`); `len` receives `src.len()`
/// either way so that callers can size a second attempt.
unsafe fn copy_out(src: &[f64], dst: *mut f64, cap: usize, len: *mut usize) -> Outcome<()> {
    if let Some(l) = len.as_mut() {
        *l = src.len();
    }
    if dst.is_null() {
        return Err(null("buffer"));
    }
    if cap < src.len() {
        return Err(Fail(ErtStatus::BufferTooSmall, format!("buffer holds {cap} values, need {}", src.len())));
    }
    ptr::copy_nonoverlapping(src.as_ptr(), dst, src.len());
    Ok(())
}

fn unit_square(size: u32) -> Outcome<ImageGeometry> {
    Ok(ImageGeometry::square(size as usize, -1.0, 1.0)?)
}

impl ErtNodes {
    fn rule(&self) -> Outcome<NodeCount> {
        if self.fixed > 0 {
            Ok(NodeCount::Fixed(self.fixed as usize))
        } else if self.pixel > 0.0 && self.pixel.is_finite() {
            Ok(NodeCount::Adaptive { pixel: self.pixel })
        } else {
            Err(invalid(format!("node rule needs fixed > 0 or pixel > 0, got pixel = {}", self.pixel)))
        }
    }
}

impl ErtReconstructConfig {
    fn to_core(self) -> Outcome<ReconstructConfig> {
        let geometry = unit_square(self.size)?;
        Ok(ReconstructConfig {
            ntheta: self.ntheta as usize,
            s: Axis::new(self.s_lo, self.s_hi, self.ns as usize)?,
            k_geometry: geometry,
            f_geometry: geometry,
            window: match self.window {
                w if w == ErtWindow::RamLak as u32 => RampWindow::RamLak,
                w if w == ErtWindow::Hann as u32 => RampWindow::Hann,
                w => return Err(invalid(format!("unknown window {w}"))),
            },
            noise: (self.noise_ratio != 0.0).then_some(NoiseSpec { ratio: self.noise_ratio, seed: self.noise_seed }),
        })
    }
}

/// Message of the last failed call on this thread, or null. The pointer is
/// valid until the next `ert_*` call on the same thread.
#[no_mangle]
pub extern "C" fn ert_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn ert_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Defaults matching the reference experiment: 256 angles and offsets over
/// `s ∈ [-1, 1]`, a 256² grid, Ram-Lak, no noise.
#[no_mangle]
pub extern "C" fn ert_reconstruct_config_default() -> ErtReconstructConfig {
    ErtReconstructConfig {
        ntheta: 256,
        ns: 256,
        s_lo: -1.0,
        s_hi: 1.0,
        size: 256,
        window: ErtWindow::RamLak as u32,
        noise_ratio: 0.0,
        noise_seed: 0,
    }
}

/// `m(z) = (Ā z', a_n √(z_n − |z'|²))` for `z, x, a` of length `n`.
#[no_mangle]
pub unsafe extern "C" fn ert_forward_map(a: *const f64, n: usize, z: *const f64, x: *mut f64) -> ErtStatus {
    guard(|| {
        let params = AnisotropyParams::new(slice(a, n, "a")?.to_vec())?;
        let img = forward_map(&ParaboloidPoint(slice(z, n, "z")?.to_vec()), &params)?;
        copy_out(&img.0, x, n, ptr::null_mut())
    })
}

/// `m⁻¹(x) = (Ā⁻¹ x', |A⁻¹ x|²)` for `x, z, a` of length `n`.
#[no_mangle]
pub unsafe extern "C" fn ert_inverse_map(a: *const f64, n: usize, x: *const f64, z: *mut f64) -> ErtStatus {
    guard(|| {
        let params = AnisotropyParams::new(slice(a, n, "a")?.to_vec())?;
        let pre = inverse_map(&HalfSpacePoint(slice(x, n, "x")?.to_vec()), &params)?;
        copy_out(&pre.0, z, n, ptr::null_mut())
    })
}

/// The four-disk reference phantom and its mirror image.
#[no_mangle]
pub unsafe extern "C" fn ert_phantom_paper(out_phantom: *mut *mut ErtPhantom) -> ErtStatus {
    guard(|| {
        *out(out_phantom, "out_phantom")? = boxed(ErtPhantom(Phantom::paper()));
        Ok(())
    })
}

/// Phantom from `count` disks above the axis: `centers` holds `2·count`
/// coordinates; mirrored copies are added.
#[no_mangle]
pub unsafe extern "C" fn ert_phantom_new(
    centers: *const f64,
    radii: *const f64,
    values: *const f64,
    count: usize,
    out_phantom: *mut *mut ErtPhantom,
) -> ErtStatus {
    guard(|| {
        let c = slice(centers, 2 * count, "centers")?;
        let r = slice(radii, count, "radii")?;
        let v = slice(values, count, "values")?;
        let disks = (0..count)
            .map(|i| Disk::new([c[2 * i], c[2 * i + 1]], r[i], v[i]))
            .collect::<ert_core::Result<Vec<_>>>()?;
        *out(out_phantom, "out_phantom")? = boxed(ErtPhantom(Phantom::new(&disks)?));
        Ok(())
    })
}

/// Phantom from JSON text: a list of `{center, radius, value}` disks or
/// `{"disks": [...]}`.
#[no_mangle]
pub unsafe extern "C" fn ert_phantom_from_json(json: *const c_char, out_phantom: *mut *mut ErtPhantom) -> ErtStatus {
    guard(|| {
        if json.is_null() {
            return Err(null("json"));
        }
        let text = CStr::from_ptr(json).to_str().map_err(|_| invalid("json is not UTF-8"))?;
        *out(out_phantom, "out_phantom")? = boxed(ErtPhantom(Phantom::from_json_str(text)?));
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn ert_phantom_free(phantom: *mut ErtPhantom) {
    if !phantom.is_null() {
        drop(Box::from_raw(phantom));
    }
}

#[no_mangle]
pub unsafe extern "C" fn ert_phantom_eval(phantom: *const ErtPhantom, x1: f64, x2: f64, value: *mut f64) -> ErtStatus {
    guard(|| {
        *out(value, "value")? = deref(phantom, "phantom")?.0.eval(x1, x2);
        Ok(())
    })
}

/// `R f(u, t)` of a phantom by the `nodes`-point trapezoid rule.
#[no_mangle]
pub unsafe extern "C" fn ert_phantom_transform(
    phantom: *const ErtPhantom,
    a1: f64,
    a2: f64,
    u: f64,
    t: f64,
    nodes: ErtNodes,
    value: *mut f64,
) -> ErtStatus {
    guard(|| {
        let p = deref(phantom, "phantom")?;
        let params = AnisotropyParams::planar(a1, a2)?;
        if !(t >= 0.0 && t.is_finite()) {
            return Err(Fail(ErtStatus::Domain, format!("t = {t} must be non-negative")));
        }
        let n = nodes.rule()?.resolve(t, a1, a2);
        *out(value, "value")? = phantom_ellipse_integral(&p.0, params.scales()[0], params.scales()[1], u, t, n);
        Ok(())
    })
}

/// Pixel-center (or 4×4 supersampled) raster on a `size²` grid over `[-1, 1]²`.
#[no_mangle]
pub unsafe extern "C" fn ert_phantom_rasterize(
    phantom: *const ErtPhantom,
    size: u32,
    supersample: bool,
    out_image: *mut *mut ErtImage,
) -> ErtStatus {
    guard(|| {
        let p = deref(phantom, "phantom")?;
        let img = rasterize(&p.0, unit_square(size)?, supersample);
        *out(out_image, "out_image")? = boxed(ErtImage(img));
        Ok(())
    })
}

/// Elliptical sinogram of a phantom on `nu` offsets in `[u_lo, u_hi]` and
/// `nt` radii in `[t_lo, t_hi]`.
#[no_mangle]
pub unsafe extern "C" fn ert_sinogram_forward(
    phantom: *const ErtPhantom,
    a1: f64,
    a2: f64,
    u_lo: f64,
    u_hi: f64,
    nu: u32,
    t_lo: f64,
    t_hi: f64,
    nt: u32,
    nodes: ErtNodes,
    out_sinogram: *mut *mut ErtSinogram,
) -> ErtStatus {
    guard(|| {
        let p = deref(phantom, "phantom")?;
        let params = AnisotropyParams::planar(a1, a2)?;
        let u = Axis::new(u_lo, u_hi, nu as usize)?;
        let t = Axis::new(t_lo, t_hi, nt as usize)?;
        let sin = elliptical_sinogram(&p.0, &params, u, t, nodes.rule()?)?;
        *out(out_sinogram, "out_sinogram")? = boxed(ErtSinogram(sin));
        Ok(())
    })
}

/// Wraps caller data, `u`-major (`data[iu * nt + it]`), as a sinogram.
#[no_mangle]
pub unsafe extern "C" fn ert_sinogram_from_data(
    a1: f64,
    a2: f64,
    u_lo: f64,
    u_hi: f64,
    nu: u32,
    t_lo: f64,
    t_hi: f64,
    nt: u32,
    data: *const f64,
    len: usize,
    out_sinogram: *mut *mut ErtSinogram,
) -> ErtStatus {
    guard(|| {
        let params = AnisotropyParams::planar(a1, a2)?;
        let u = Axis::new(u_lo, u_hi, nu as usize)?;
        let t = Axis::new(t_lo, t_hi, nt as usize)?;
        let values = slice(data, len, "data")?.to_vec();
        let sin = EllipticalSinogram::new(params, u, t, values, ForwardMode::Quadrature)?;
        *out(out_sinogram, "out_sinogram")? = boxed(ErtSinogram(sin));
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn ert_sinogram_free(sinogram: *mut ErtSinogram) {
    if !sinogram.is_null() {
        drop(Box::from_raw(sinogram));
    }
}

#[no_mangle]
pub unsafe extern "C" fn ert_sinogram_dims(sinogram: *const ErtSinogram, nu: *mut u32, nt: *mut u32) -> ErtStatus {
    guard(|| {
        let s = deref(sinogram, "sinogram")?;
        *out(nu, "nu")? = s.0.u.n as u32;
        *out(nt, "nt")? = s.0.t.n as u32;
        Ok(())
    })
}

/// Copies the samples, `u`-major, into `buffer`.
#[no_mangle]
pub unsafe extern "C" fn ert_sinogram_data(
    sinogram: *const ErtSinogram,
    buffer: *mut f64,
    capacity: usize,
    len: *mut usize,
) -> ErtStatus {
    guard(|| copy_out(&deref(sinogram, "sinogram")?.0.data, buffer, capacity, len))
}

/// A copy of `sinogram` plus Gaussian noise of norm `ratio · ‖data‖`.
#[no_mangle]
pub unsafe extern "C" fn ert_sinogram_add_noise(
    sinogram: *const ErtSinogram,
    ratio: f64,
    seed: u64,
    out_sinogram: *mut *mut ErtSinogram,
) -> ErtStatus {
    guard(|| {
        let noisy = add_noise(&deref(sinogram, "sinogram")?.0, ratio, seed)?;
        *out(out_sinogram, "out_sinogram")? = boxed(ErtSinogram(noisy));
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn ert_sinogram_write(sinogram: *const ErtSinogram, file: *const c_char) -> ErtStatus {
    guard(|| {
        let s = deref(sinogram, "sinogram")?;
        Ok(write_container(path(file)?, &ErsgObject::Elliptical(s.0.clone()))?)
    })
}

#[no_mangle]
pub unsafe extern "C" fn ert_sinogram_read(file: *const c_char, out_sinogram: *mut *mut ErtSinogram) -> ErtStatus {
    guard(|| {
        let sin = read_elliptical(path(file)?)?;
        *out(out_sinogram, "out_sinogram")? = boxed(ErtSinogram(sin));
        Ok(())
    })
}

/// Reduction, filtered backprojection and lift from gridded data.
#[no_mangle]
pub unsafe extern "C" fn ert_reconstruct_sinogram(
    sinogram: *const ErtSinogram,
    config: *const ErtReconstructConfig,
    out_image: *mut *mut ErtImage,
) -> ErtStatus {
    guard(|| {
        let s = deref(sinogram, "sinogram")?;
        let cfg = deref(config, "config")?.to_core()?;
        let rec = reconstruct(&GriddedSource::new(&s.0), &s.0.params, &cfg)?;
        *out(out_image, "out_image")? = boxed(ErtImage(rec.f));
        Ok(())
    })
}

/// Reduction, filtered backprojection and lift with the transform of a
/// phantom evaluated on demand at each reduction node.
#[no_mangle]
pub unsafe extern "C" fn ert_reconstruct_phantom(
    phantom: *const ErtPhantom,
    a1: f64,
    a2: f64,
    nodes: ErtNodes,
    config: *const ErtReconstructConfig,
    out_image: *mut *mut ErtImage,
) -> ErtStatus {
    guard(|| {
        let p = deref(phantom, "phantom")?;
        let cfg = deref(config, "config")?.to_core()?;
        let params = AnisotropyParams::planar(a1, a2)?;
        let src = AnalyticSource::new(&p.0, &params, nodes.rule()?)?;
        let rec = reconstruct(&src, &params, &cfg)?;
        *out(out_image, "out_image")? = boxed(ErtImage(rec.f));
        Ok(())
    })
}

/// The default band limit `π / median |Δ(t²)|` of a sinogram.
#[no_mangle]
pub unsafe extern "C" fn ert_default_band(sinogram: *const ErtSinogram, band: *mut f64) -> ErtStatus {
    guard(|| {
        *out(band, "band")? = default_band(&deref(sinogram, "sinogram")?.0);
        Ok(())
    })
}

/// Closed-form inversion with band limit `band` on a `size²` grid; `band ≤ 0`
/// selects the default band.
#[no_mangle]
pub unsafe extern "C" fn ert_direct_invert(
    sinogram: *const ErtSinogram,
    size: u32,
    band: f64,
    out_image: *mut *mut ErtImage,
) -> ErtStatus {
    guard(|| {
        let s = deref(sinogram, "sinogram")?;
        let band = if band > 0.0 { band } else { default_band(&s.0) };
        let img = direct_invert(&s.0, unit_square(size)?, band)?;
        *out(out_image, "out_image")? = boxed(ErtImage(img));
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn ert_image_free(image: *mut ErtImage) {
    if !image.is_null() {
        drop(Box::from_raw(image));
    }
}

#[no_mangle]
pub unsafe extern "C" fn ert_image_dims(image: *const ErtImage, nx: *mut u32, ny: *mut u32) -> ErtStatus {
    guard(|| {
        let g = deref(image, "image")?.0.geometry;
        *out(nx, "nx")? = g.nx as u32;
        *out(ny, "ny")? = g.ny as u32;
        Ok(())
    })
}

/// Copies the pixels, row-major with `x2` increasing, into `buffer`.
#[no_mangle]
pub unsafe extern "C" fn ert_image_data(
    image: *const ErtImage,
    buffer: *mut f64,
    capacity: usize,
    len: *mut usize,
) -> ErtStatus {
    guard(|| copy_out(&deref(image, "image")?.0.data, buffer, capacity, len))
}

/// `‖b − a‖ / ‖a‖` over all pixels; the grids must agree.
#[no_mangle]
pub unsafe extern "C" fn ert_image_relative_error(a: *const ErtImage, b: *const ErtImage, error: *mut f64) -> ErtStatus {
    guard(|| {
        let report = compare(&deref(a, "a")?.0, &deref(b, "b")?.0, None)?;
        *out(error, "error")? = report.rel_l2;
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn ert_image_write(image: *const ErtImage, file: *const c_char) -> ErtStatus {
    guard(|| {
        let img = deref(image, "image")?;
        Ok(write_container(path(file)?, &ErsgObject::Image(img.0.clone()))?)
    })
}

#[no_mangle]
pub unsafe extern "C" fn ert_image_read(file: *const c_char, out_image: *mut *mut ErtImage) -> ErtStatus {
    guard(|| {
        let img = read_image(path(file)?)?;
        *out(out_image, "out_image")? = boxed(ErtImage(img));
        Ok(())
    })
}
