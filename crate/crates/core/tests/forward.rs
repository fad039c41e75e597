mod common;

use std::f64::consts::PI;

use rand::Rng;

use common::{arc_measure, bump, even_bump, exact_transform, rng, simpson, uniform};
use ert_core::forward::{
    add_noise, elliptical_forward_2d, elliptical_forward_point, elliptical_sinogram, phantom_ellipse_integral,
    pixel_sinogram,
};
use ert_core::phantom::rasterize;
use ert_core::{AnisotropyParams, Axis, Disk, ImageGeometry, NodeCount, Phantom};

#[test]
fn arc_measure_of_a_centered_circle_is_full_or_empty() {
    assert_eq!(arc_measure([0.0, 0.5], 0.2, 1.0, 1.0, 0.0, 0.05), 0.0);
    // the circle of radius 0.5 about the origin passes through (0, 0.5)
    let half_angle = arc_measure([0.0, 0.5], 0.2, 1.0, 1.0, 0.0, 0.5) / 2.0;
    // chord geometry: cos ψ = (t² + d² − r²) / (2 t d) with t = d = 0.5
    assert!((half_angle - (1.0f64 - 0.04 / 0.5).acos()).abs() < 1e-14);
}

#[test]
fn dense_quadrature_agrees_with_arc_measure() {
    let p = Phantom::paper();
    for &(u, t) in &[(0.0, 0.5), (0.3, 0.45), (-0.4, 0.35), (0.1, 0.8)] {
        let exact = exact_transform(&p, 0.8, 1.0, u, t);
        // the windowed sum visits the same nodes as the plain trapezoid rule;
        // each boundary crossing costs at most a1 a2 t · value · 2π/N
        let dense = phantom_ellipse_integral(&p, 0.8, 1.0, u, t, 1 << 26);
        assert!(exact > 0.0);
        assert!((dense - exact).abs() <= 1e-6, "({u}, {t}): {dense} vs {exact}");
    }
}

#[test]
fn plain_and_windowed_quadrature_coincide_at_dense_nodes() {
    let p = Phantom::paper();
    let plain = elliptical_forward_2d(|x, y| p.eval(x, y), 0.8, 1.0, 0.0, 0.5, 1_000_000);
    let windowed = phantom_ellipse_integral(&p, 0.8, 1.0, 0.0, 0.5, 1_000_000);
    assert!((plain - windowed).abs() < 1e-12);
}

#[test]
fn sinogram_matches_point_operator_at_random_nodes() {
    let p = Phantom::paper();
    let a = AnisotropyParams::planar(0.8, 1.0).unwrap();
    let (u, t) = (Axis::new(-1.0, 1.0, 256).unwrap(), Axis::new(0.0, 2.0, 256).unwrap());
    let nodes = NodeCount::Adaptive { pixel: 2.0 / 256.0 };
    let sin = elliptical_sinogram(&p, &a, u, t, nodes).unwrap();
    let mut r = rng(7);
    for _ in 0..20 {
        let (iu, it) = (r.random_range(0..256), r.random_range(0..256));
        let (uu, tt) = (u.node(iu), t.node(it));
        let n = nodes.resolve(tt, 0.8, 1.0);
        let point = elliptical_forward_point(|x| p.eval(x[0], x[1]), &a, &[uu], tt, n).unwrap();
        assert!((sin.get(iu, it) - point).abs() < 1e-6, "({uu}, {tt})");
    }
    assert!((0..256).all(|iu| sin.get(iu, 0) == 0.0));
}

#[test]
fn odd_functions_are_annihilated() {
    let a = AnisotropyParams::planar(0.8, 1.0).unwrap();
    let odd = |x: &[f64]| bump(x[0], x[1], [0.1, 0.4], 0.3) - bump(x[0], -x[1], [0.1, 0.4], 0.3);
    for iu in 0..64 {
        for it in 0..64 {
            let (u, t) = (-1.5 + 3.0 * iu as f64 / 63.0, 2.0 * it as f64 / 63.0);
            let v = elliptical_forward_point(odd, &a, &[u], t, 1440).unwrap();
            assert!(v.abs() < 1e-10);
        }
    }
}

#[test]
fn circles_reproduce_the_circular_mean_integral() {
    let id = AnisotropyParams::identity(2).unwrap();
    let f = |x1: f64, x2: f64| even_bump(x1, x2, [0.1, 0.5], 0.3);
    for &(u, t) in &[(0.0, 0.5), (0.2, 0.3), (-0.3, 0.8)] {
        let ours = elliptical_forward_point(|x| f(x[0], x[1]), &id, &[u], t, 4000).unwrap();
        let independent = 2.0 * t * simpson(|phi| f(u + t * phi.cos(), t * phi.sin()), 0.0, PI, 20000);
        assert!((ours - independent).abs() < 1e-9 * independent.max(1.0), "{ours} vs {independent}");
    }
}

#[test]
fn quadrature_converges_for_smooth_data() {
    let a = AnisotropyParams::planar(0.8, 1.0).unwrap();
    let f = |x: &[f64]| even_bump(x[0], x[1], [0.1, 0.5], 0.3);
    for &(u, t) in &[(0.0, 0.5), (0.4, 0.6), (-0.2, 0.9)] {
        let coarse = elliptical_forward_point(f, &a, &[u], t, 720).unwrap();
        let fine = elliptical_forward_point(f, &a, &[u], t, 1440).unwrap();
        assert!((coarse - fine).abs() < 1e-8);
    }
}

#[test]
fn scaling_the_axes_rescales_the_transform() {
    // R_{λA} f(u, t/λ) = λ R_A f(u, t) in the plane
    let mut r = rng(3);
    for _ in 0..10 {
        let (c1, rad) = (uniform(&mut r, -0.5, 0.5), uniform(&mut r, 0.05, 0.3));
        let p = Phantom::new(&[Disk::new([c1, rad + uniform(&mut r, 0.05, 0.5)], rad, 1.0).unwrap()]).unwrap();
        let (a1, a2, lambda) = (uniform(&mut r, 0.5, 1.5), uniform(&mut r, 0.5, 1.5), uniform(&mut r, 0.5, 2.0));
        let (u, t) = (uniform(&mut r, -0.5, 0.5), uniform(&mut r, 0.2, 1.0));
        let base = exact_transform(&p, a1, a2, u, t);
        let scaled = exact_transform(&p, lambda * a1, lambda * a2, u, t / lambda);
        assert!((scaled - lambda * base).abs() < 1e-12 * base.max(1.0));
        let a = AnisotropyParams::planar(lambda * a1, lambda * a2).unwrap();
        let q = elliptical_forward_point(|x| p.eval(x[0], x[1]), &a, &[u], t / lambda, 200_000).unwrap();
        assert!((q - lambda * base).abs() < 1e-4 * base.max(1.0));
    }
}

#[test]
fn three_dimensional_quadrature_of_a_constant() {
    // f ≡ 1: |a|₁ t² · 4π
    let a = AnisotropyParams::new(vec![0.5, 0.8, 1.2]).unwrap();
    let v = elliptical_forward_point(|_| 1.0, &a, &[0.3, -0.2], 0.7, 64).unwrap();
    assert!((v - 0.5 * 0.8 * 1.2 * 0.49 * 4.0 * PI).abs() < 1e-12);
}

#[test]
fn pixel_projector_agrees_with_quadrature() {
    // Short arcs through a disk edge carry an O(pixel / arc length) error in
    // both modes, so agreement is asserted over the strong nodes as a whole
    // and for the bulk of them individually.
    let p = Phantom::paper();
    let a = AnisotropyParams::planar(0.8, 1.0).unwrap();
    let (u, t) = (Axis::new(-1.0, 1.0, 48).unwrap(), Axis::new(0.0, 2.0, 48).unwrap());
    let quad = elliptical_sinogram(&p, &a, u, t, NodeCount::Adaptive { pixel: 2.0 / 256.0 }).unwrap();
    let img = rasterize(&p, ImageGeometry::square(256, -1.0, 1.0).unwrap(), false);
    let pix = pixel_sinogram(&img, &a, u, t).unwrap();
    let max = quad.data.iter().copied().fold(0.0, f64::max);
    let strong: Vec<(f64, f64)> = quad.data.iter().zip(&pix.data).filter(|(q, _)| **q > 0.1 * max).map(|(q, x)| (*q, *x)).collect();
    let within = strong.iter().filter(|(q, x)| (q - x).abs() <= 0.05 * q).count();
    let (q, x): (Vec<f64>, Vec<f64>) = strong.iter().copied().unzip();
    let err = common::rel_l2(&q, &x);
    assert!(err < 0.05);
    assert!(within as f64 >= 0.9 * strong.len() as f64);
}

#[test]
fn noise_has_the_requested_norm_and_is_seeded() {
    let p = Phantom::paper();
    let a = AnisotropyParams::planar(0.8, 1.0).unwrap();
    let sin = elliptical_sinogram(&p, &a, Axis::new(-1.0, 1.0, 64).unwrap(), Axis::new(0.0, 2.0, 64).unwrap(), NodeCount::Fixed(720)).unwrap();
    let noisy = add_noise(&sin, 0.05, 11).unwrap();
    let diff: f64 = noisy.data.iter().zip(&sin.data).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt();
    assert!((diff / sin.l2_norm() - 0.05).abs() < 1e-12);
    assert_eq!(add_noise(&sin, 0.05, 11).unwrap(), noisy);
    assert_ne!(add_noise(&sin, 0.05, 12).unwrap().data, noisy.data);
    assert_eq!(add_noise(&sin, 0.0, 11).unwrap(), sin);
}

