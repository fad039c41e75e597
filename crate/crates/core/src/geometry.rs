//! The paraboloid change of variables that turns ellipsoids with centers on
//! the hyperplane `x_n = 0` into hyperplanes.
//!
//! With `A = diag(a_1, …, a_n)` and `Ā = diag(a_1, …, a_{n-1})`, the map
//! `m(z) = (Ā z', a_n √(z_n − |z'|²))` sends the region `|z'|² ≤ z_n` onto the
//! closed upper half-space, and its inverse `m⁻¹(x) = (Ā⁻¹ x', |A⁻¹ x|²)` sends
//! the upper half of the ellipsoid `|A⁻¹(x − (u, 0))| = t` into the hyperplane
//! `z · (−2Ā⁻¹u, 1)/ν = (t² − |Ā⁻¹u|²)/ν`, `ν = √(1 + 4|Ā⁻¹u|²)`.

use crate::error::{Error, Result};

/// Absolute slack allowed on the domain boundaries `|z'|² = z_n` and `x_n = 0`.
pub const DOMAIN_TOL: f64 = 1e-12;

/// Axis scales `a_1, …, a_n` of the ellipsoid family.
#[derive(Debug, Clone, PartialEq)]
pub struct AnisotropyParams {
    a: Vec<f64>,
}

impl AnisotropyParams {
    pub fn new(a: Vec<f64>) -> Result<Self> {
        if a.len() < 2 {
            return Err(Error::invalid(format!(
                "dimension must be at least 2, got {}",
                a.len()
            )));
        }
        if let Some(bad) = a.iter().find(|v| !(v.is_finite() && **v > 0.0)) {
            return Err(Error::invalid(format!("axis scale {bad} is not a positive finite number")));
        }
        Ok(AnisotropyParams { a })
    }

    pub fn planar(a1: f64, a2: f64) -> Result<Self> {
        Self::new(vec![a1, a2])
    }

    pub fn identity(n: usize) -> Result<Self> {
        Self::new(vec![1.0; n])
    }

    pub fn dim(&self) -> usize {
        self.a.len()
    }

    pub fn scales(&self) -> &[f64] {
        &self.a
    }

    /// Scales of the first `n − 1` axes (the diagonal of `Ā`).
    pub fn tangential(&self) -> &[f64] {
        &self.a[..self.a.len() - 1]
    }

    pub fn normal_scale(&self) -> f64 {
        self.a[self.a.len() - 1]
    }

    /// `a_1 a_2 ⋯ a_n`.
    pub fn product(&self) -> f64 {
        self.a.iter().product()
    }

    pub(crate) fn require_planar(&self) -> Result<(f64, f64)> {
        match self.a.as_slice() {
            &[a1, a2] => Ok((a1, a2)),
            _ => Err(Error::invalid(format!(
                "operation is two-dimensional, got n = {}",
                self.a.len()
            ))),
        }
    }

    fn check_dim(&self, len: usize, what: &str) -> Result<()> {
        if len != self.a.len() {
            return Err(Error::invalid(format!(
                "{what} has dimension {len}, parameters have {}",
                self.a.len()
            )));
        }
        Ok(())
    }

    /// `|Ā⁻¹u|²` for a focus-center offset `u ∈ ℝⁿ⁻¹`.
    fn scaled_norm_sq(&self, u: &[f64]) -> f64 {
        u.iter().zip(self.tangential()).map(|(ui, ai)| (ui / ai).powi(2)).sum()
    }

    /// `ν_Ā(u) = √(1 + 4|Ā⁻¹u|²)`.
    pub fn nu(&self, u: &[f64]) -> f64 {
        (1.0 + 4.0 * self.scaled_norm_sq(u)).sqrt()
    }
}

/// A point of the paraboloid region `|z'|² ≤ z_n`.
#[derive(Debug, Clone, PartialEq)]
pub struct ParaboloidPoint(pub Vec<f64>);

/// A point of the closed upper half-space `x_n ≥ 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct HalfSpacePoint(pub Vec<f64>);

/// A hyperplane `{z : z · normal = offset}` in paraboloid coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct HyperplaneCoords {
    pub normal: Vec<f64>,
    pub offset: f64,
}

pub fn forward_map(z: &ParaboloidPoint, params: &AnisotropyParams) -> Result<HalfSpacePoint> {
    let z = &z.0;
    params.check_dim(z.len(), "point")?;
    let n = z.len();
    let tangential_sq: f64 = z[..n - 1].iter().map(|v| v * v).sum();
    let gap = z[n - 1] - tangential_sq;
    if gap < -DOMAIN_TOL || !gap.is_finite() {
        return Err(Error::domain(format!(
            "|z'|² = {tangential_sq} exceeds z_n = {}",
            z[n - 1]
        )));
    }
    let mut x: Vec<f64> = z[..n - 1]
        .iter()
        .zip(params.tangential())
        .map(|(zi, ai)| ai * zi)
        .collect();
    x.push(params.normal_scale() * gap.max(0.0).sqrt());
    Ok(HalfSpacePoint(x))
}

pub fn inverse_map(x: &HalfSpacePoint, params: &AnisotropyParams) -> Result<ParaboloidPoint> {
    let x = &x.0;
    params.check_dim(x.len(), "point")?;
    let n = x.len();
    if x[n - 1] < -DOMAIN_TOL || !x[n - 1].is_finite() {
        return Err(Error::domain(format!("x_n = {} is negative", x[n - 1])));
    }
    let mut z: Vec<f64> = x[..n - 1]
        .iter()
        .zip(params.tangential())
        .map(|(xi, ai)| xi / ai)
        .collect();
    let height = z.iter().map(|v| v * v).sum::<f64>() + (x[n - 1] / params.normal_scale()).powi(2);
    z.push(height);
    Ok(ParaboloidPoint(z))
}

/// The hyperplane that `m⁻¹` maps the ellipsoid `|A⁻¹(x − (u, 0))| = t` onto.
pub fn ellipse_to_hyperplane(u: &[f64], t: f64, params: &AnisotropyParams) -> Result<HyperplaneCoords> {
    params.check_dim(u.len() + 1, "focus center (with x_n appended)")?;
    if !(t >= 0.0 && t.is_finite()) {
        return Err(Error::domain(format!("t = {t} must be non-negative")));
    }
    let nu = params.nu(u);
    let mut normal: Vec<f64> = u
        .iter()
        .zip(params.tangential())
        .map(|(ui, ai)| -2.0 * ui / ai / nu)
        .collect();
    normal.push(1.0 / nu);
    let offset = (t * t - params.scaled_norm_sq(u)) / nu;
    Ok(HyperplaneCoords { normal, offset })
}

/// `m⁻¹` in two dimensions without allocation; no domain check.
#[inline]
pub fn inverse_map_2d(x1: f64, x2: f64, a1: f64, a2: f64) -> (f64, f64) {
    let z1 = x1 / a1;
    (z1, z1 * z1 + (x2 / a2).powi(2))
}

/// `m` in two dimensions without allocation. Points outside the paraboloid
/// region return `None`.
#[inline]
pub fn forward_map_2d(z1: f64, z2: f64, a1: f64, a2: f64) -> Option<(f64, f64)> {
    let gap = z2 - z1 * z1;
    if gap < -DOMAIN_TOL {
        return None;
    }
    Some((a1 * z1, a2 * gap.max(0.0).sqrt()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(a: &[f64]) -> AnisotropyParams {
        AnisotropyParams::new(a.to_vec()).unwrap()
    }

    #[test]
    fn forward_map_examples() {
        let id = params(&[1.0, 1.0]);
        assert_eq!(forward_map(&ParaboloidPoint(vec![0.0, 1.0]), &id).unwrap().0, vec![0.0, 1.0]);

        let x = forward_map(&ParaboloidPoint(vec![0.5, 0.5]), &params(&[0.8, 1.0])).unwrap();
        assert!((x.0[0] - 0.4).abs() < 1e-15);
        assert!((x.0[1] - 0.5).abs() < 1e-15);

        // boundary of the paraboloid lands on the hyperplane
        let x = forward_map(&ParaboloidPoint(vec![0.3, -0.4, 0.25]), &params(&[2.0, 0.5, 3.0])).unwrap();
        assert_eq!(x.0[2], 0.0);
    }

    #[test]
    fn forward_map_rejects_outside_paraboloid() {
        let err = forward_map(&ParaboloidPoint(vec![1.0, 0.5]), &params(&[1.0, 1.0]));
        assert!(matches!(err, Err(Error::Domain(_))));
        // rounding slack at the boundary is accepted
        assert!(forward_map(&ParaboloidPoint(vec![1.0, 1.0 - 1e-13]), &params(&[1.0, 1.0])).is_ok());
    }

    #[test]
    fn inverse_map_examples() {
        let id = params(&[1.0, 1.0]);
        assert_eq!(inverse_map(&HalfSpacePoint(vec![0.0, 1.0]), &id).unwrap().0, vec![0.0, 1.0]);

        let z = inverse_map(&HalfSpacePoint(vec![0.4, 0.5]), &params(&[0.8, 1.0])).unwrap();
        assert!((z.0[0] - 0.5).abs() < 1e-15);
        assert!((z.0[1] - 0.5).abs() < 1e-15);

        let z = inverse_map(&HalfSpacePoint(vec![0.6, 0.0]), &params(&[0.8, 1.0])).unwrap();
        assert!((z.0[1] - z.0[0] * z.0[0]).abs() < 1e-15);

        assert!(matches!(
            inverse_map(&HalfSpacePoint(vec![0.0, -0.1]), &id),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn hyperplane_examples() {
        let h = ellipse_to_hyperplane(&[0.0], 1.0, &params(&[0.8, 1.0])).unwrap();
        assert_eq!(h.normal, vec![0.0, 1.0]);
        assert_eq!(h.offset, 1.0);

        let h = ellipse_to_hyperplane(&[0.4], 1.0, &params(&[0.8, 1.0])).unwrap();
        let r2 = std::f64::consts::FRAC_1_SQRT_2;
        assert!((h.normal[0] + r2).abs() < 1e-15);
        assert!((h.normal[1] - r2).abs() < 1e-15);
        assert!((h.offset - 0.75 * r2).abs() < 1e-15);

        let h = ellipse_to_hyperplane(&[0.0, 0.0], 0.0, &params(&[1.0, 2.0, 3.0])).unwrap();
        assert_eq!(h.normal, vec![0.0, 0.0, 1.0]);
        assert_eq!(h.offset, 0.0);

        assert!(ellipse_to_hyperplane(&[0.0], -1.0, &params(&[1.0, 1.0])).is_err());
    }

    #[test]
    fn nu_is_at_least_one() {
        let p = params(&[0.8, 1.3, 1.0]);
        assert_eq!(p.nu(&[0.0, 0.0]), 1.0);
        assert!(p.nu(&[1e-3, 0.0]) > 1.0);
    }

    #[test]
    fn params_validation() {
        assert!(AnisotropyParams::new(vec![1.0]).is_err());
        assert!(AnisotropyParams::new(vec![1.0, 0.0]).is_err());
        assert!(AnisotropyParams::new(vec![1.0, f64::INFINITY]).is_err());
        // a_i > 1 is allowed
        assert!(AnisotropyParams::new(vec![3.0, 2.0]).is_ok());
    }
}
