//! Independent oracles shared by the integration and acceptance tests. None
//! of these call into the quadrature or inversion code they check.

#![allow(dead_code)]

use std::f64::consts::PI;

use ert_core::Phantom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

pub fn rng(seed: u64) -> ChaCha20Rng {
    ChaCha20Rng::seed_from_u64(seed)
}

pub fn uniform(rng: &mut ChaCha20Rng, lo: f64, hi: f64) -> f64 {
    lo + (hi - lo) * rng.random::<f64>()
}

/// Measure of `{φ ∈ [0, 2π) : (u + a1 t cos φ, a2 t sin φ) ∈ disk}` found by
/// bracketing the sign changes of `|p(φ) − c|² − r²` and bisecting each root
/// to machine precision.
pub fn arc_measure(center: [f64; 2], radius: f64, a1: f64, a2: f64, u: f64, t: f64) -> f64 {
    let g = |phi: f64| {
        let dx = u + a1 * t * phi.cos() - center[0];
        let dy = a2 * t * phi.sin() - center[1];
        dx * dx + dy * dy - radius * radius
    };
    let m = 8192;
    let h = 2.0 * PI / m as f64;
    let mut roots = Vec::new();
    for i in 0..m {
        let (mut lo, mut hi) = (i as f64 * h, (i + 1) as f64 * h);
        let (glo, ghi) = (g(lo), g(hi));
        if (glo <= 0.0) == (ghi <= 0.0) {
            continue;
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if (g(mid) <= 0.0) == (glo <= 0.0) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        roots.push(0.5 * (lo + hi));
    }
    if roots.is_empty() {
        return if g(0.0) <= 0.0 { 2.0 * PI } else { 0.0 };
    }
    // Walk the arcs between consecutive roots, testing the midpoint.
    let mut total = 0.0;
    for (k, &r0) in roots.iter().enumerate() {
        let r1 = if k + 1 < roots.len() { roots[k + 1] } else { roots[0] + 2.0 * PI };
        if g(0.5 * (r0 + r1)) <= 0.0 {
            total += r1 - r0;
        }
    }
    total
}

/// `R f(u, t)` of a phantom from the exact arc measures.
pub fn exact_transform(phantom: &Phantom, a1: f64, a2: f64, u: f64, t: f64) -> f64 {
    phantom
        .disks()
        .iter()
        .map(|d| d.value * a1 * a2 * t * arc_measure(d.center, d.radius, a1, a2, u, t))
        .sum()
}

/// Angular measure of the part of the circle of radius `t` about `(u, 0)`
/// inside a disk, from the law of cosines.
pub fn circle_disk_angle(center: [f64; 2], radius: f64, u: f64, t: f64) -> f64 {
    let d = (center[0] - u).hypot(center[1]);
    if t == 0.0 {
        return 0.0;
    }
    if d + t <= radius {
        return 2.0 * PI;
    }
    if t >= d + radius || t <= d - radius || d <= radius - t {
        return if d <= radius - t { 2.0 * PI } else { 0.0 };
    }
    let c = (t * t + d * d - radius * radius) / (2.0 * t * d);
    2.0 * c.clamp(-1.0, 1.0).acos()
}

/// Circular-mean transform `t ∫ f` over circles about `(u, 0)` in closed form.
pub fn circular_transform(phantom: &Phantom, u: f64, t: f64) -> f64 {
    phantom
        .disks()
        .iter()
        .map(|d| d.value * t * circle_disk_angle(d.center, d.radius, u, t))
        .sum()
}

/// `(1 − ρ²)³` on the disk, `ρ = |x − c| / r`; a C² bump.
pub fn bump(x1: f64, x2: f64, center: [f64; 2], radius: f64) -> f64 {
    let rho2 = ((x1 - center[0]).powi(2) + (x2 - center[1]).powi(2)) / (radius * radius);
    if rho2 >= 1.0 {
        0.0
    } else {
        (1.0 - rho2).powi(3)
    }
}

/// Mirrored bump pair, even in `x2`.
pub fn even_bump(x1: f64, x2: f64, center: [f64; 2], radius: f64) -> f64 {
    bump(x1, x2, center, radius) + bump(x1, -x2, center, radius)
}

/// Composite Simpson rule on `[lo, hi]` with `panels` (even) panels.
pub fn simpson<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, panels: usize) -> f64 {
    let h = (hi - lo) / panels as f64;
    let mut acc = f(lo) + f(hi);
    for i in 1..panels {
        acc += if i % 2 == 1 { 4.0 } else { 2.0 } * f(lo + i as f64 * h);
    }
    acc * h / 3.0
}

pub fn rel_l2(reference: &[f64], other: &[f64]) -> f64 {
    let num: f64 = reference.iter().zip(other).map(|(a, b)| (a - b) * (a - b)).sum();
    let den: f64 = reference.iter().map(|a| a * a).sum();
    (num / den).sqrt()
}
