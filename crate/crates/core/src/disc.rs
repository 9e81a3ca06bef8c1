//! Geometry of the unit disc and circle: arcs, Carleson boxes, Möbius maps and
//! the dyadic grids over which suprema are discretised.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};

/// Reduces an angle to `[0, 2π)`.
pub fn wrap_angle(theta: f64) -> f64 {
    let r = theta.rem_euclid(TAU);
    if r >= TAU {
        0.0
    } else {
        r
    }
}

/// Signed difference `a - b` reduced to `(-π, π]`.
pub fn angle_diff(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(TAU);
    if d > PI {
        d - TAU
    } else {
        d
    }
}

/// `e^{iθ}`.
#[inline]
pub fn unit(theta: f64) -> Complex64 {
    Complex64::from_polar(1.0, theta)
}

/// A boundary arc of normalized length `length` (a fraction of the full circle).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Arc {
    center_angle: f64,
    length: f64,
}

impl Arc {
    pub fn new(center_angle: f64, length: f64) -> Result<Self> {
        if !(length > 0.0 && length <= 1.0) || !center_angle.is_finite() {
            return Err(LabError::Domain(format!(
                "arc length must lie in (0, 1], got {length}"
            )));
        }
        Ok(Arc {
            center_angle: wrap_angle(center_angle),
            length,
        })
    }

    pub fn center_angle(&self) -> f64 {
        self.center_angle
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    /// Width of the arc in radians, `2π·|I|`.
    pub fn angular_width(&self) -> f64 {
        TAU * self.length
    }

    /// Start and end angle, unwrapped so that `start < end` and `end - start`
    /// equals the angular width.
    pub fn endpoints(&self) -> (f64, f64) {
        let half = 0.5 * self.angular_width();
        (self.center_angle - half, self.center_angle + half)
    }

    pub fn contains_angle(&self, theta: f64) -> bool {
        self.length >= 1.0 || angle_diff(theta, self.center_angle).abs() <= 0.5 * self.angular_width()
    }

    pub fn rotated(&self, by: f64) -> Arc {
        Arc {
            center_angle: wrap_angle(self.center_angle + by),
            length: self.length,
        }
    }
}

/// The Carleson box `S(I) = {z : 1 - |I| <= |z| < 1, z/|z| ∈ I}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CarlesonBox {
    pub arc: Arc,
    pub inner_radius: f64,
}

impl CarlesonBox {
    pub fn contains(&self, z: Complex64) -> bool {
        let r = z.norm();
        if !(r >= self.inner_radius && r < 1.0) {
            return false;
        }
        if r == 0.0 {
            // only the full-circle box reaches the origin
            return self.arc.length() >= 1.0;
        }
        self.arc.contains_angle(z.arg())
    }
}

pub fn carleson_box(arc: Arc) -> CarlesonBox {
    CarlesonBox {
        arc,
        inner_radius: 1.0 - arc.length(),
    }
}

/// The involutive disc automorphism `φ_a(z) = (a - z)/(1 - ā z)`.
pub fn mobius_transform(a: Complex64, z: Complex64) -> Result<Complex64> {
    if !(a.norm() < 1.0) {
        return Err(LabError::Domain(format!(
            "Möbius parameter must satisfy |a| < 1, got |a| = {}",
            a.norm()
        )));
    }
    Ok(mobius_unchecked(a, z))
}

#[inline]
pub(crate) fn mobius_unchecked(a: Complex64, z: Complex64) -> Complex64 {
    (a - z) / (Complex64::new(1.0, 0.0) - a.conj() * z)
}

/// Derivative of `φ_a` at `z`: `(|a|² - 1)/(1 - ā z)²`.
#[inline]
pub(crate) fn mobius_derivative(a: Complex64, z: Complex64) -> Complex64 {
    let d = Complex64::new(1.0, 0.0) - a.conj() * z;
    Complex64::new(a.norm_sqr() - 1.0, 0.0) / (d * d)
}

/// Element of a discretisation grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum GridElement {
    Arc { center_angle: f64, length: f64 },
    Point { re: f64, im: f64 },
}

impl GridElement {
    /// Scale coordinate used in CSV output (`|I|` for arcs, `|z|` for points).
    pub fn scale(&self) -> f64 {
        match *self {
            GridElement::Arc { length, .. } => length,
            GridElement::Point { re, im } => re.hypot(im),
        }
    }

    /// Angular coordinate used in CSV output.
    pub fn angle(&self) -> f64 {
        match *self {
            GridElement::Arc { center_angle, .. } => center_angle,
            GridElement::Point { re, im } => wrap_angle(im.atan2(re)),
        }
    }
}

impl From<Arc> for GridElement {
    fn from(a: Arc) -> Self {
        GridElement::Arc {
            center_angle: a.center_angle(),
            length: a.length(),
        }
    }
}

impl From<Complex64> for GridElement {
    fn from(z: Complex64) -> Self {
        GridElement::Point { re: z.re, im: z.im }
    }
}

/// Discretisation of the suprema over arcs and over disc points.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    /// Arc lengths `2^{-k}`, in decreasing order.
    pub arc_levels: Vec<f64>,
    pub centers_per_level: usize,
    /// Radii `1 - 2^{-k}`, in increasing order.
    pub point_radii: Vec<f64>,
    pub angles_per_radius: usize,
    /// Rotation applied to every arc center and point angle.
    #[serde(default)]
    pub angle_offset: f64,
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec::dyadic(0..=10, 64, 0..=12, 64)
    }
}

impl GridSpec {
    /// Arc lengths `2^{-k}` for `k` in `arc_k` and radii `1 - 2^{-k}` for `k` in `radius_k`.
    pub fn dyadic(
        arc_k: std::ops::RangeInclusive<u32>,
        centers_per_level: usize,
        radius_k: std::ops::RangeInclusive<u32>,
        angles_per_radius: usize,
    ) -> Self {
        GridSpec {
            arc_levels: arc_k.map(|k| 0.5f64.powi(k as i32)).collect(),
            centers_per_level,
            point_radii: radius_k.map(|k| 1.0 - 0.5f64.powi(k as i32)).collect(),
            angles_per_radius,
            angle_offset: 0.0,
        }
    }

    pub fn rotated(&self, by: f64) -> Self {
        GridSpec {
            angle_offset: self.angle_offset + by,
            ..self.clone()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.arc_levels.iter().any(|&l| !(l > 0.0 && l <= 1.0)) {
            return Err(LabError::Domain("arc lengths must lie in (0, 1]".into()));
        }
        if self.point_radii.iter().any(|&r| !(0.0..1.0).contains(&r)) {
            return Err(LabError::Domain("grid radii must lie in [0, 1)".into()));
        }
        if self.centers_per_level == 0 || self.angles_per_radius == 0 {
            return Err(LabError::Domain(
                "grid needs at least one center and one angle".into(),
            ));
        }
        Ok(())
    }

    /// Arcs of one level; the full circle is only listed once.
    pub fn arcs_at(&self, length: f64) -> Vec<Arc> {
        let n = if length >= 1.0 { 1 } else { self.centers_per_level };
        (0..n)
            .map(|j| {
                let c = self.angle_offset + TAU * j as f64 / self.centers_per_level as f64;
                Arc::new(c, length).expect("validated arc length")
            })
            .collect()
    }

    pub fn arcs(&self) -> Vec<Arc> {
        self.arc_levels.iter().flat_map(|&l| self.arcs_at(l)).collect()
    }

    /// Points of one radius; the origin is only listed once.
    pub fn points_at(&self, radius: f64) -> Vec<Complex64> {
        let n = if radius == 0.0 { 1 } else { self.angles_per_radius };
        (0..n)
            .map(|j| {
                let th = self.angle_offset + TAU * j as f64 / self.angles_per_radius as f64;
                Complex64::from_polar(radius, th)
            })
            .collect()
    }

    pub fn points(&self) -> Vec<Complex64> {
        self.point_radii.iter().flat_map(|&r| self.points_at(r)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn mobius_examples() {
        let a = c(0.5, 0.0);
        assert!((mobius_transform(a, c(0.0, 0.0)).unwrap() - a).norm() < 1e-15);
        assert!(mobius_transform(a, a).unwrap().norm() < 1e-15);
        // (0.5 - i)/(1 - 0.5 i) = (1 - 0.75 i)/1.25
        let w = mobius_transform(a, c(0.0, 1.0)).unwrap();
        assert!((w - c(0.8, -0.6)).norm() < 1e-15);
        assert!((w.norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn mobius_rejects_boundary_parameter() {
        assert!(mobius_transform(c(1.0, 0.0), c(0.0, 0.0)).is_err());
        assert!(mobius_transform(c(0.8, 0.7), c(0.0, 0.0)).is_err());
    }

    #[test]
    fn mobius_is_involutive() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..1000 {
            let a = Complex64::from_polar(rng.gen_range(0.0..0.99), rng.gen_range(0.0..TAU));
            let z = Complex64::from_polar(rng.gen_range(0.0..1.0), rng.gen_range(0.0..TAU));
            let back = mobius_transform(a, mobius_transform(a, z).unwrap()).unwrap();
            assert!((back - z).norm() < 1e-14, "a={a} z={z}");
        }
    }

    #[test]
    fn carleson_box_examples() {
        let full = carleson_box(Arc::new(0.0, 1.0).unwrap());
        assert_eq!(full.inner_radius, 0.0);
        assert!(full.contains(c(0.0, 0.0)));
        assert!(full.contains(c(-0.3, 0.9)));

        let b = carleson_box(Arc::new(0.0, 0.25).unwrap());
        assert_eq!(b.inner_radius, 0.75);
        assert!((b.arc.angular_width() - PI / 2.0).abs() < 1e-15);
        assert!(b.contains(c(0.9, 0.0)));
        assert!(!b.contains(Complex64::from_polar(0.9, PI)));
        assert!(!b.contains(c(0.5, 0.0)));
    }

    #[test]
    fn arc_rejects_bad_length() {
        assert!(Arc::new(0.0, 0.0).is_err());
        assert!(Arc::new(0.0, 1.5).is_err());
    }

    #[test]
    fn default_grid_shape() {
        let g = GridSpec::default();
        g.validate().unwrap();
        assert_eq!(g.arc_levels.len(), 11);
        assert_eq!(g.arcs().len(), 1 + 10 * 64);
        assert_eq!(g.points().len(), 1 + 12 * 64);
        assert_eq!(g.point_radii[0], 0.0);
    }
}
