//! Analytic functions on the disc as evaluator pairs, and the gallery of test
//! functions addressed by string labels.

use std::f64::consts::TAU;
use std::fmt;
use std::sync::Arc as Shared;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::disc::{unit, wrap_angle};
use crate::error::{LabError, Result};
use crate::quadrature::pairwise_sum;

pub(crate) type Eval = Shared<dyn Fn(Complex64) -> Complex64 + Send + Sync>;

const ONE: Complex64 = Complex64 { re: 1.0, im: 0.0 };

/// Default truncation order when converting closed forms to power series.
pub const DEFAULT_SERIES_ORDER: usize = 256;

/// An analytic function on the disc given by value and derivative evaluators.
///
/// `singular_angles` lists boundary points where the function or its
/// derivative blows up; quadrature rules are graded toward them and never
/// sample them. When `boundary_radius` is set, boundary integrands are sampled
/// on that circle instead of on the unit circle.
#[derive(Clone)]
pub struct AnalyticFunction {
    value: Eval,
    deriv: Eval,
    series: Option<Shared<[Complex64]>>,
    label: String,
    singular_angles: Vec<f64>,
    boundary_radius: Option<f64>,
}

impl fmt::Debug for AnalyticFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("AnalyticFunction")
            .field("label", &self.label)
            .field("singular_angles", &self.singular_angles)
            .field("series_len", &self.series.as_ref().map(|s| s.len()))
            .finish()
    }
}

impl AnalyticFunction {
    pub fn new(
        label: impl Into<String>,
        value: impl Fn(Complex64) -> Complex64 + Send + Sync + 'static,
        deriv: impl Fn(Complex64) -> Complex64 + Send + Sync + 'static,
    ) -> Self {
        AnalyticFunction {
            value: Shared::new(value),
            deriv: Shared::new(deriv),
            series: None,
            label: label.into(),
            singular_angles: Vec::new(),
            boundary_radius: None,
        }
    }

    pub fn with_singular_angles(mut self, angles: impl IntoIterator<Item = f64>) -> Self {
        self.singular_angles = normalize_angles(angles);
        self
    }

    pub fn with_boundary_radius(mut self, radius: f64) -> Self {
        self.boundary_radius = Some(radius);
        self
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn constant(c: Complex64) -> Self {
        from_power_series(&[c]).expect("nonempty coefficients")
    }

    #[inline]
    pub fn value_at(&self, z: Complex64) -> Complex64 {
        (self.value)(z)
    }

    #[inline]
    pub fn deriv_at(&self, z: Complex64) -> Complex64 {
        (self.deriv)(z)
    }

    pub fn series(&self) -> Option<&[Complex64]> {
        self.series.as_deref()
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn singular_angles(&self) -> &[f64] {
        &self.singular_angles
    }

    pub fn boundary_radius(&self) -> Option<f64> {
        self.boundary_radius
    }

    /// Boundary value at angle `θ` (or the value on the sampling circle).
    #[inline]
    pub fn boundary_value(&self, theta: f64) -> Complex64 {
        match self.boundary_radius {
            None => self.value_at(unit(theta)),
            Some(r) => self.value_at(Complex64::from_polar(r, theta)),
        }
    }

    /// `c·f`.
    pub fn scaled(&self, c: Complex64) -> Self {
        let (v, d) = (self.value.clone(), self.deriv.clone());
        AnalyticFunction {
            value: Shared::new(move |z| c * v(z)),
            deriv: Shared::new(move |z| c * d(z)),
            series: self
                .series
                .as_ref()
                .map(|s| s.iter().map(|a| c * a).collect::<Vec<_>>().into()),
            label: format!("({c})*{}", self.label),
            singular_angles: self.singular_angles.clone(),
            boundary_radius: self.boundary_radius,
        }
    }

    /// `f - g`.
    pub fn minus(&self, other: &AnalyticFunction) -> Self {
        let (v1, d1) = (self.value.clone(), self.deriv.clone());
        let (v2, d2) = (other.value.clone(), other.deriv.clone());
        let series = match (&self.series, &other.series) {
            (Some(a), Some(b)) => {
                let n = a.len().max(b.len());
                let get = |s: &[Complex64], k: usize| s.get(k).copied().unwrap_or_default();
                Some((0..n).map(|k| get(a, k) - get(b, k)).collect::<Vec<_>>().into())
            }
            _ => None,
        };
        AnalyticFunction {
            value: Shared::new(move |z| v1(z) - v2(z)),
            deriv: Shared::new(move |z| d1(z) - d2(z)),
            series,
            label: format!("{} - {}", self.label, other.label),
            singular_angles: normalize_angles(
                self.singular_angles.iter().chain(&other.singular_angles).copied(),
            ),
            boundary_radius: self.boundary_radius.or(other.boundary_radius),
        }
    }

    /// `f - c`.
    pub fn minus_constant(&self, c: Complex64) -> Self {
        self.minus(&AnalyticFunction::constant(c))
    }
}

pub(crate) fn normalize_angles(angles: impl IntoIterator<Item = f64>) -> Vec<f64> {
    let mut v: Vec<f64> = angles.into_iter().map(wrap_angle).collect();
    v.sort_by(f64::total_cmp);
    v.dedup_by(|a, b| (*a - *b).abs() < 1e-15);
    v
}

/// `(1 - ζ̄z)^{-β}` on the principal branch.
pub fn principal_power(zeta: Complex64, beta: f64, z: Complex64) -> Result<Complex64> {
    if !(z.norm() < 1.0) {
        return Err(LabError::Domain(format!("point {z} is outside the open disc")));
    }
    if (zeta.norm() - 1.0).abs() > 1e-12 {
        return Err(LabError::Domain(format!("base point {zeta} is not unimodular")));
    }
    Ok(power_unchecked(zeta, beta, z))
}

#[inline]
fn power_unchecked(zeta: Complex64, beta: f64, z: Complex64) -> Complex64 {
    (-beta * (ONE - zeta.conj() * z).ln()).exp()
}

fn check_lambda(lambda: f64) -> Result<()> {
    if lambda > 0.0 && lambda < 1.0 {
        Ok(())
    } else {
        Err(LabError::Domain(format!("λ must lie in (0, 1), got {lambda}")))
    }
}

/// `f_λ(z) = (1 - z)^{-(1-λ)/2}`, the function of maximal growth.
pub fn make_f_lambda(lambda: f64) -> Result<AnalyticFunction> {
    check_lambda(lambda)?;
    let beta = 0.5 * (1.0 - lambda);
    Ok(AnalyticFunction::new(
        format!("f_lambda({lambda})"),
        move |z| power_unchecked(ONE, beta, z),
        move |z| beta * power_unchecked(ONE, beta + 1.0, z),
    )
    .with_singular_angles([0.0]))
}

/// `h(z) = ((1+z)/(1-z))^{(1-λ)/2} - 1`, the Koenigs map of the spirallike example.
pub fn make_spirallike_h(lambda: f64) -> Result<AnalyticFunction> {
    check_lambda(lambda)?;
    let beta = 0.5 * (1.0 - lambda);
    // arg(1+z) and arg(1-z) lie in (-π/2, π/2), so the difference of principal
    // logarithms is the principal logarithm of the quotient.
    let q = move |z: Complex64| (beta * ((ONE + z).ln() - (ONE - z).ln())).exp();
    Ok(AnalyticFunction::new(
        format!("spirallike_h({lambda})"),
        move |z| q(z) - ONE,
        move |z| 2.0 * beta * q(z) / ((ONE + z) * (ONE - z)),
    )
    .with_singular_angles([0.0, std::f64::consts::PI]))
}

/// `f_ζ(z) = f(ζ̄ z)`.
pub fn rotate_argument(f: &AnalyticFunction, zeta: Complex64) -> AnalyticFunction {
    let zeta = zeta / zeta.norm();
    let zc = zeta.conj();
    let (v, d) = (f.value.clone(), f.deriv.clone());
    let shift = zeta.arg();
    AnalyticFunction {
        value: Shared::new(move |z| v(zc * z)),
        deriv: Shared::new(move |z| zc * d(zc * z)),
        series: f.series.as_ref().map(|s| {
            let mut p = ONE;
            s.iter()
                .map(|a| {
                    let out = a * p;
                    p *= zc;
                    out
                })
                .collect::<Vec<_>>()
                .into()
        }),
        label: format!("{}@{:.6}", f.label, shift),
        singular_angles: normalize_angles(f.singular_angles.iter().map(|a| a + shift)),
        boundary_radius: f.boundary_radius,
    }
}

/// Value and derivative of a polynomial by Horner's scheme.
pub fn horner(coeffs: &[Complex64], z: Complex64) -> (Complex64, Complex64) {
    let mut p = Complex64::default();
    let mut dp = Complex64::default();
    for &a in coeffs.iter().rev() {
        dp = dp * z + p;
        p = p * z + a;
    }
    (p, dp)
}

pub fn from_power_series(coeffs: &[Complex64]) -> Result<AnalyticFunction> {
    if coeffs.is_empty() {
        return Err(LabError::Domain("power series needs at least one coefficient".into()));
    }
    let c: Shared<[Complex64]> = coeffs.to_vec().into();
    let (c1, c2) = (c.clone(), c.clone());
    let label = format!(
        "poly:{}",
        coeffs
            .iter()
            .map(|a| if a.im == 0.0 { format!("{}", a.re) } else { format!("{a}") })
            .collect::<Vec<_>>()
            .join(",")
    );
    Ok(AnalyticFunction {
        value: Shared::new(move |z| horner(&c1, z).0),
        deriv: Shared::new(move |z| horner(&c2, z).1),
        series: Some(c),
        label,
        singular_angles: Vec::new(),
        boundary_radius: None,
    })
}

/// Truncated Taylor coefficients `a_0..a_order` of a closed form, from the
/// trapezoid rule on a circle of radius `0.98`, together with an estimate of
/// the omitted `H²` mass on that circle.
pub fn truncated_series(f: &AnalyticFunction, order: usize) -> Result<(Vec<Complex64>, f64)> {
    const RADIUS: f64 = 0.98;
    let n = (8 * (order + 1)).next_power_of_two().max(4096);
    let samples: Vec<Complex64> = (0..n)
        .map(|j| f.value_at(Complex64::from_polar(RADIUS, TAU * j as f64 / n as f64)))
        .collect();
    if let Some(j) = samples.iter().position(|v| !(v.re.is_finite() && v.im.is_finite())) {
        return Err(LabError::non_finite(format!("series sample {j}")));
    }
    let mut coeffs = Vec::with_capacity(order + 1);
    let mut terms = vec![Complex64::default(); n];
    for k in 0..=order {
        for (j, (t, s)) in terms.iter_mut().zip(&samples).enumerate() {
            *t = s * unit(-TAU * ((k * j) % n) as f64 / n as f64);
        }
        coeffs.push(pairwise_sum(&terms) / (n as f64 * RADIUS.powi(k as i32)));
    }
    let mean_sq: Vec<f64> = samples.iter().map(|v| v.norm_sqr()).collect();
    let total = pairwise_sum(&mean_sq) / n as f64;
    let kept: Vec<f64> = coeffs
        .iter()
        .enumerate()
        .map(|(k, a)| a.norm_sqr() * RADIUS.powi(2 * k as i32))
        .collect();
    let tail = (total - pairwise_sum(&kept)).max(0.0);
    Ok((coeffs, tail))
}

/// Largest relative mismatch between `f'` and the central difference of `f`
/// over a 100-point grid in `|z| <= 0.9`.
pub fn derivative_mismatch(f: &AnalyticFunction) -> f64 {
    let mut worst: f64 = 0.0;
    for i in 0..10 {
        let r = 0.9 * (i as f64 + 0.5) / 10.0;
        for j in 0..10 {
            let z = Complex64::from_polar(r, TAU * (j as f64 + 0.25) / 10.0);
            let h = 1e-5;
            let fd = (f.value_at(z + h) - f.value_at(z - h)) / (2.0 * h);
            let d = f.deriv_at(z);
            let err = (fd - d).norm() / d.norm().max(1.0);
            worst = worst.max(err);
        }
    }
    worst
}

/// Exact identity satisfied by a gallery function.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "relation", rename_all = "snake_case")]
pub enum NormRelation {
    /// `f∘φ_t = e^{t·exponent} f` under the affine semigroup `e^{-t}z + 1 - e^{-t}`.
    AffineEigenfunction { exponent: f64 },
    /// `f∘φ_t = e^{-t} f` under the semigroup whose Koenigs map is `f`.
    KoenigsEigenfunction,
    /// `|f(r)|(1 - r)^{exponent} = 1` for every `r ∈ [0, 1)`.
    MaximalGrowth { exponent: f64 },
}

#[derive(Debug, Clone)]
pub struct GalleryEntry {
    pub function: AnalyticFunction,
    pub lambda: Option<f64>,
    pub known_norm_relations: Vec<NormRelation>,
}

pub const FUNCTION_LABELS: &[&str] = &["f_lambda", "spirallike_h", "monomial:k", "poly:c0,c1,..."];

fn unknown_function(label: &str) -> LabError {
    LabError::UnknownLabel {
        label: label.to_string(),
        known: FUNCTION_LABELS.join(", "),
    }
}

/// Resolves a gallery label; `lambda` parametrises the λ-dependent entries.
pub fn gallery_entry(label: &str, lambda: f64) -> Result<GalleryEntry> {
    let beta = 0.5 * (1.0 - lambda);
    let (name, arg) = match label.split_once(':') {
        Some((n, a)) => (n.trim(), Some(a.trim())),
        None => (label.trim(), None),
    };
    match (name, arg) {
        ("f_lambda", None) => Ok(GalleryEntry {
            function: make_f_lambda(lambda)?.with_label("f_lambda"),
            lambda: Some(lambda),
            known_norm_relations: vec![
                NormRelation::AffineEigenfunction { exponent: beta },
                NormRelation::MaximalGrowth { exponent: beta },
            ],
        }),
        ("spirallike_h", None) => Ok(GalleryEntry {
            function: make_spirallike_h(lambda)?.with_label("spirallike_h"),
            lambda: Some(lambda),
            known_norm_relations: vec![NormRelation::KoenigsEigenfunction],
        }),
        ("monomial", Some(k)) => {
            let k: usize = k.parse().map_err(|_| unknown_function(label))?;
            let mut c = vec![Complex64::default(); k + 1];
            c[k] = ONE;
            Ok(GalleryEntry {
                function: from_power_series(&c)?.with_label(label),
                lambda: None,
                known_norm_relations: vec![],
            })
        }
        ("poly", Some(list)) => {
            let coeffs = list
                .split(',')
                .map(|s| s.trim().parse::<f64>().map(|x| Complex64::new(x, 0.0)))
                .collect::<std::result::Result<Vec<_>, _>>()
                .map_err(|_| unknown_function(label))?;
            Ok(GalleryEntry {
                function: from_power_series(&coeffs)?.with_label(label),
                lambda: None,
                known_norm_relations: vec![],
            })
        }
        _ => Err(unknown_function(label)),
    }
}

pub fn function_from_label(label: &str, lambda: f64) -> Result<AnalyticFunction> {
    Ok(gallery_entry(label, lambda)?.function)
}

/// Eight non-constant test functions used for seminorm comparisons at `λ`.
pub fn comparison_gallery(lambda: f64) -> Result<Vec<AnalyticFunction>> {
    let f = make_f_lambda(lambda)?.with_label("f_lambda");
    let rot = rotate_argument(&f, unit(TAU / 6.0)).with_label("f_lambda@pi/3");
    Ok(vec![
        f,
        make_spirallike_h(lambda)?.with_label("spirallike_h"),
        rot,
        function_from_label("monomial:1", lambda)?,
        function_from_label("monomial:2", lambda)?,
        function_from_label("monomial:5", lambda)?,
        function_from_label("poly:1,0.5,0.25", lambda)?,
        function_from_label("poly:0,1,0,-0.3,0.1", lambda)?,
    ])
}
