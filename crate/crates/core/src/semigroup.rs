//! Semigroups of holomorphic self-maps of the disc: generators and their
//! Berkson–Porta quotients, Koenigs-model and closed-form flows, an adaptive
//! Runge–Kutta fallback, and the built-in gallery.

use std::f64::consts::TAU;
use std::fmt;
use std::sync::Arc as Shared;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::disc::{angle_diff, unit, wrap_angle};
use crate::error::{LabError, Result};
use crate::function::{make_spirallike_h, normalize_angles, AnalyticFunction, Eval};
use crate::quadrature::gauss_legendre;
use crate::seminorms::boundary_preimages as numeric_preimages;

const ONE: Complex64 = Complex64 { re: 1.0, im: 0.0 };

/// Local error tolerance of the Runge–Kutta integrator.
pub const ODE_TOL: f64 = 1e-10;
/// Hard cap on accepted plus rejected integrator steps.
pub const ODE_MAX_STEPS: usize = 1_000_000;
/// Integration stops once the orbit comes this close to the unit circle.
pub const ODE_BOUNDARY_GUARD: f64 = 1e-12;

const NEWTON_TOL: f64 = 1e-12;
const NEWTON_MAX_ITER: usize = 50;

/// Complex derivative by the four-point rule `Σ i^{-k} g(z + i^k h)/(4h)`.
pub(crate) fn complex_derivative(g: &dyn Fn(Complex64) -> Complex64, z: Complex64, h: f64) -> Complex64 {
    let i = Complex64::i();
    (g(z + h) - g(z - h) - i * (g(z + i * h) - g(z - i * h))) / (4.0 * h)
}

/// An infinitesimal generator `G` with its Denjoy–Wolff point `b`.
#[derive(Clone)]
pub struct Generator {
    g: Eval,
    b: Complex64,
    description: String,
    synthetic: bool,
}

impl fmt::Debug for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Generator")
            .field("description", &self.description)
            .field("b", &self.b)
            .field("synthetic", &self.synthetic)
            .finish()
    }
}

/// 500 interior points (20 radii up to 0.99, 25 angles) used for generator checks.
fn check_grid() -> Vec<Complex64> {
    let mut pts = Vec::with_capacity(500);
    for i in 0..20 {
        let r = 0.99 * (i as f64 + 0.5) / 20.0;
        for j in 0..25 {
            pts.push(Complex64::from_polar(r, TAU * (j as f64 + 0.5 * (i % 2) as f64) / 25.0));
        }
    }
    pts
}

impl Generator {
    /// Checks `G(b) = 0` for interior `b` and `Re P >= -1e-10` on a 500-point grid.
    pub fn new(
        description: impl Into<String>,
        g: impl Fn(Complex64) -> Complex64 + Send + Sync + 'static,
        b: Complex64,
    ) -> Result<Self> {
        let gen = Generator::unchecked(description, g, b, false)?;
        if gen.is_interior() && gen.at(b).norm() > 1e-10 {
            return Err(LabError::InvalidGenerator(format!(
                "|G(b)| = {} at the interior Denjoy–Wolff point",
                gen.at(b).norm()
            )));
        }
        for z in check_grid() {
            let p = gen.p_at(z);
            if !(p.re >= -1e-10) {
                return Err(LabError::InvalidGenerator(format!("Re P = {} at z = {z}", p.re)));
            }
        }
        Ok(gen)
    }

    /// A generator whose Berkson–Porta check is waived, for negative controls.
    pub fn synthetic(
        description: impl Into<String>,
        g: impl Fn(Complex64) -> Complex64 + Send + Sync + 'static,
        b: Complex64,
    ) -> Result<Self> {
        Generator::unchecked(format!("synthetic: {}", description.into()), g, b, true)
    }

    fn unchecked(
        description: impl Into<String>,
        g: impl Fn(Complex64) -> Complex64 + Send + Sync + 'static,
        b: Complex64,
        synthetic: bool,
    ) -> Result<Self> {
        if b.norm() > 1.0 + 1e-12 {
            return Err(LabError::Domain(format!("Denjoy–Wolff point {b} is outside the closed disc")));
        }
        Ok(Generator {
            g: Shared::new(g),
            b,
            description: description.into(),
            synthetic,
        })
    }

    #[inline]
    pub fn at(&self, z: Complex64) -> Complex64 {
        (self.g)(z)
    }

    pub fn dw_point(&self) -> Complex64 {
        self.b
    }

    pub fn is_interior(&self) -> bool {
        self.b.norm() < 1.0 - 1e-12
    }

    pub fn description(&self) -> &str {
        &self.description
    }

    pub fn is_synthetic(&self) -> bool {
        self.synthetic
    }

    fn p_direct(&self, z: Complex64) -> Complex64 {
        let b = self.b;
        self.at(z) / ((b.conj() * z - 1.0) * (z - b))
    }

    /// Berkson–Porta quotient `P(z) = G(z)/((b̄z - 1)(z - b))`; near an interior
    /// `b` the removable singularity is bridged by Cauchy's formula on a
    /// circle of radius `1e-4` with 16 nodes.
    pub fn p_at(&self, z: Complex64) -> Complex64 {
        if !self.is_interior() || (z - self.b).norm() >= 1e-5 {
            return self.p_direct(z);
        }
        const N: usize = 16;
        const RHO: f64 = 1e-4;
        let mut acc = Complex64::default();
        for j in 0..N {
            let d = Complex64::from_polar(RHO, TAU * (j as f64 + 0.5) / N as f64);
            let zeta = self.b + d;
            acc += self.p_direct(zeta) * d / (zeta - z);
        }
        acc / N as f64
    }
}

/// `P` as an analytic function; fails when `Re P < -1e-6` on the check grid.
pub fn berkson_porta_p(generator: &Generator) -> Result<AnalyticFunction> {
    for z in check_grid() {
        let p = generator.p_at(z);
        if !(p.re >= -1e-6) {
            return Err(LabError::InvalidGenerator(format!(
                "{}: Re P = {} at z = {z}",
                generator.description(),
                p.re
            )));
        }
    }
    let (g1, g2) = (generator.clone(), generator.clone());
    Ok(AnalyticFunction::new(
        format!("P[{}]", generator.description()),
        move |z| g1.p_at(z),
        move |z| {
            let h = 1e-3 * (1.0 - z.norm()).max(1e-6);
            complex_derivative(&|w| g2.p_at(w), z, h)
        },
    ))
}

/// How a flow value was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FlowMethod {
    ClosedForm,
    Koenigs,
    Ode,
}

pub type TimeMap = Shared<dyn Fn(f64, Complex64) -> Complex64 + Send + Sync>;
pub type PreimageMap = Shared<dyn Fn(f64, &[f64]) -> Vec<f64> + Send + Sync>;

/// Flow family `φ_t` in closed form.
#[derive(Clone)]
pub struct ClosedForm {
    pub value: TimeMap,
    pub deriv: TimeMap,
    /// Boundary angles mapped by `φ_t` onto the given target angles.
    pub preimages: PreimageMap,
}

#[derive(Clone)]
pub enum FlowModel {
    /// `φ_t = h^{-1}(e^{-ct}h)`.
    InteriorKoenigs { h: AnalyticFunction, c: Complex64 },
    /// `φ_t = h^{-1}(h + ct)`.
    BoundaryKoenigs { h: AnalyticFunction, c: Complex64 },
    ClosedForm(ClosedForm),
    OdeOnly,
}

impl FlowModel {
    pub fn name(&self) -> &'static str {
        match self {
            FlowModel::InteriorKoenigs { .. } => "interior_koenigs",
            FlowModel::BoundaryKoenigs { .. } => "boundary_koenigs",
            FlowModel::ClosedForm(_) => "closed_form",
            FlowModel::OdeOnly => "ode_only",
        }
    }
}

#[derive(Clone)]
pub struct Semigroup {
    generator: Generator,
    model: FlowModel,
    label: String,
    singular_angles: Vec<f64>,
}

impl fmt::Debug for Semigroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Semigroup")
            .field("label", &self.label)
            .field("model", &self.model.name())
            .field("generator", &self.generator)
            .finish()
    }
}

/// One flow evaluation with its provenance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FlowPoint {
    pub value: Complex64,
    pub method: FlowMethod,
    /// Set when Newton failed and the integrator produced the value.
    pub fell_back: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FlowResult {
    pub t: f64,
    pub points_in: Vec<Complex64>,
    pub points_out: Vec<Complex64>,
    pub method: FlowMethod,
    /// Largest deviation from the integrator when a second method was run, else 0.
    pub max_residual: f64,
    pub fallbacks: usize,
}

impl FlowResult {
    /// Rows `t,re_in,im_in,re_out,im_out`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t,re_in,im_in,re_out,im_out\n");
        for (a, b) in self.points_in.iter().zip(&self.points_out) {
            out.push_str(&format!("{},{},{},{},{}\n", self.t, a.re, a.im, b.re, b.im));
        }
        out
    }
}

fn check_time(t: f64) -> Result<()> {
    if t >= 0.0 && t.is_finite() {
        Ok(())
    } else {
        Err(LabError::Domain(format!("flow time must be nonnegative, got {t}")))
    }
}

fn check_point(z: Complex64, closed: bool) -> Result<()> {
    let r = z.norm();
    let ok = if closed { r <= 1.0 + 1e-14 } else { r < 1.0 };
    if ok {
        Ok(())
    } else {
        Err(LabError::Domain(format!(
            "point {z} is outside the {} disc",
            if closed { "closed" } else { "open" }
        )))
    }
}

/// Solves `h(z) = w` by damped Newton from `z_init`, keeping iterates in the
/// closed disc and the residual non-increasing.
pub fn koenigs_invert(h: &AnalyticFunction, w: Complex64, z_init: Complex64) -> Result<Complex64> {
    let mut z = if z_init.norm() > 1.0 { z_init / z_init.norm() } else { z_init };
    let mut res = h.value_at(z) - w;
    let noise = 8.0 * f64::EPSILON * (w.norm() + 1.0);
    let fail = |why: String| LabError::NewtonDivergence(format!("h(z) = {w} from {z_init}: {why}"));
    if !(res.re.is_finite() && res.im.is_finite()) {
        return Err(fail("non-finite residual at the initial point".into()));
    }
    for _ in 0..NEWTON_MAX_ITER {
        let d = h.deriv_at(z);
        let step = res / d;
        if !(step.re.is_finite() && step.im.is_finite()) {
            return Err(fail(format!("singular derivative at {z}")));
        }
        let mut lam = 1.0;
        let (cand, cres) = loop {
            let cand = z - step * lam;
            if cand.norm() <= 1.0 {
                let cres = h.value_at(cand) - w;
                if cres.norm() <= res.norm() + noise {
                    break (cand, cres);
                }
            }
            lam *= 0.5;
            if lam < 1e-12 {
                return Err(fail(format!("line search stalled at {z}")));
            }
        };
        let moved = (cand - z).norm();
        z = cand;
        res = cres;
        if moved <= NEWTON_TOL {
            // one polishing step; kept only if it does not leave the disc
            let polished = z - res / h.deriv_at(z);
            if polished.norm() <= 1.0 && (h.value_at(polished) - w).norm() <= res.norm() + noise {
                z = polished;
            }
            return Ok(z);
        }
    }
    Err(fail(format!("no convergence in {NEWTON_MAX_ITER} iterations")))
}

/// Integrates `w' = F(w)` for a state of one or two complex components with
/// classical RK4, step doubling and Richardson correction.
fn integrate(
    f: &dyn Fn(&[Complex64; 2]) -> [Complex64; 2],
    y0: [Complex64; 2],
    t: f64,
) -> Result<[Complex64; 2]> {
    let step = |y: &[Complex64; 2], h: f64| -> [Complex64; 2] {
        let add = |a: &[Complex64; 2], k: &[Complex64; 2], s: f64| [a[0] + k[0] * s, a[1] + k[1] * s];
        let k1 = f(y);
        let k2 = f(&add(y, &k1, 0.5 * h));
        let k3 = f(&add(y, &k2, 0.5 * h));
        let k4 = f(&add(y, &k3, h));
        [
            y[0] + (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0]) * (h / 6.0),
            y[1] + (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1]) * (h / 6.0),
        ]
    };
    let mut y = y0;
    let mut time = 0.0;
    let mut h = t.min(0.05);
    let mut steps = 0usize;
    while time < t {
        if steps >= ODE_MAX_STEPS {
            return Err(LabError::FlowLeftRegion(format!("step cap reached at time {time}")));
        }
        steps += 1;
        let h_try = h.min(t - time);
        let big = step(&y, h_try);
        let half = step(&step(&y, 0.5 * h_try), 0.5 * h_try);
        let err = ((half[0] - big[0]).norm().max((half[1] - big[1]).norm() / y[1].norm().max(1.0))) / 15.0;
        if !err.is_finite() {
            return Err(LabError::FlowLeftRegion(format!("non-finite state at time {time}")));
        }
        if err <= ODE_TOL {
            y = [
                half[0] + (half[0] - big[0]) / 15.0,
                half[1] + (half[1] - big[1]) / 15.0,
            ];
            time = if t - time <= h_try { t } else { time + h_try };
            if y[0].norm() > 1.0 - ODE_BOUNDARY_GUARD {
                return Err(LabError::FlowLeftRegion(format!(
                    "orbit reached |w| = {} at time {time}",
                    y[0].norm()
                )));
            }
            let grow = if err == 0.0 { 2.0 } else { (0.9 * (ODE_TOL / err).powf(0.2)).min(2.0) };
            h = h_try * grow.max(1.0);
        } else {
            h = h_try * (0.9 * (ODE_TOL / err).powf(0.2)).max(0.1);
            if h < 1e-14 * t.max(1.0) {
                return Err(LabError::FlowLeftRegion(format!("step size underflow at time {time}")));
            }
        }
    }
    Ok(y)
}

/// `φ_t(z)` by integrating `w' = G(w)` from `w(0) = z`.
pub fn ode_flow(generator: &Generator, t: f64, z: Complex64) -> Result<Complex64> {
    check_time(t)?;
    check_point(z, false)?;
    if t == 0.0 {
        return Ok(z);
    }
    let f = |y: &[Complex64; 2]| [generator.at(y[0]), Complex64::default()];
    Ok(integrate(&f, [z, Complex64::default()], t)?[0])
}

/// `(φ_t(z), ∂φ_t/∂z)` from the flow together with its variational equation
/// `D' = G'(w) D`.
pub fn ode_flow_with_derivative(generator: &Generator, t: f64, z: Complex64) -> Result<(Complex64, Complex64)> {
    check_time(t)?;
    check_point(z, false)?;
    if t == 0.0 {
        return Ok((z, ONE));
    }
    let g = |w: Complex64| generator.at(w);
    let f = |y: &[Complex64; 2]| {
        let h = 1e-3 * (1.0 - y[0].norm()).max(1e-9);
        [g(y[0]), complex_derivative(&g, y[0], h) * y[1]]
    };
    let y = integrate(&f, [z, ONE], t)?;
    Ok((y[0], y[1]))
}

impl Semigroup {
    pub fn new(label: impl Into<String>, generator: Generator, model: FlowModel) -> Self {
        let singular_angles = match &model {
            FlowModel::InteriorKoenigs { h, .. } | FlowModel::BoundaryKoenigs { h, .. } => h.singular_angles().to_vec(),
            _ => Vec::new(),
        };
        Semigroup {
            generator,
            model,
            label: label.into(),
            singular_angles,
        }
    }

    pub fn with_singular_angles(mut self, angles: impl IntoIterator<Item = f64>) -> Self {
        self.singular_angles = normalize_angles(angles);
        self
    }

    /// The same flow paired with another generator (used for negative controls).
    pub fn with_generator(&self, generator: Generator) -> Self {
        Semigroup {
            generator,
            label: format!("{} (mismatched generator)", self.label),
            ..self.clone()
        }
    }

    pub fn generator(&self) -> &Generator {
        &self.generator
    }

    pub fn model(&self) -> &FlowModel {
        &self.model
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// Boundary angles near which the flow derivative may be irregular.
    pub fn singular_angles(&self) -> &[f64] {
        &self.singular_angles
    }

    /// Preferred evaluation method.
    pub fn method(&self) -> FlowMethod {
        match self.model {
            FlowModel::ClosedForm(_) => FlowMethod::ClosedForm,
            FlowModel::InteriorKoenigs { .. } | FlowModel::BoundaryKoenigs { .. } => FlowMethod::Koenigs,
            FlowModel::OdeOnly => FlowMethod::Ode,
        }
    }

    fn koenigs_target(&self, t: f64, hz: Complex64) -> Option<Complex64> {
        match &self.model {
            FlowModel::InteriorKoenigs { c, .. } => Some((-c * t).exp() * hz),
            FlowModel::BoundaryKoenigs { c, .. } => Some(hz + c * t),
            _ => None,
        }
    }

    fn koenigs_flow(&self, h: &AnalyticFunction, t: f64, z: Complex64) -> Result<Complex64> {
        let hz = h.value_at(z);
        let target = |s: f64| self.koenigs_target(s, hz).expect("Koenigs model");
        if let Ok(w) = koenigs_invert(h, target(t), z) {
            return Ok(w);
        }
        // continuation in t, warm-starting every solve from the previous one
        let mut last = None;
        for n in [2usize, 4, 8, 16, 32, 64] {
            let mut w = z;
            let mut ok = true;
            for k in 1..=n {
                match koenigs_invert(h, target(t * k as f64 / n as f64), w) {
                    Ok(v) => w = v,
                    Err(e) => {
                        last = Some(e);
                        ok = false;
                        break;
                    }
                }
            }
            if ok {
                return Ok(w);
            }
        }
        Err(last.expect("at least one failure"))
    }

    /// `φ_t(z)` with the method that produced it.
    pub fn flow_point(&self, t: f64, z: Complex64) -> Result<FlowPoint> {
        check_time(t)?;
        let closed_ok = !matches!(self.model, FlowModel::OdeOnly);
        check_point(z, closed_ok)?;
        if t == 0.0 {
            return Ok(FlowPoint {
                value: z,
                method: self.method(),
                fell_back: false,
            });
        }
        match &self.model {
            FlowModel::ClosedForm(cf) => Ok(FlowPoint {
                value: (cf.value)(t, z),
                method: FlowMethod::ClosedForm,
                fell_back: false,
            }),
            FlowModel::InteriorKoenigs { h, .. } | FlowModel::BoundaryKoenigs { h, .. } => {
                match self.koenigs_flow(h, t, z) {
                    Ok(value) => Ok(FlowPoint {
                        value,
                        method: FlowMethod::Koenigs,
                        fell_back: false,
                    }),
                    Err(e) if z.norm() < 1.0 => match ode_flow(&self.generator, t, z) {
                        Ok(value) => Ok(FlowPoint {
                            value,
                            method: FlowMethod::Ode,
                            fell_back: true,
                        }),
                        Err(_) => Err(e),
                    },
                    Err(e) => Err(e),
                }
            }
            FlowModel::OdeOnly => Ok(FlowPoint {
                value: ode_flow(&self.generator, t, z)?,
                method: FlowMethod::Ode,
                fell_back: false,
            }),
        }
    }

    pub fn flow(&self, t: f64, z: Complex64) -> Result<Complex64> {
        Ok(self.flow_point(t, z)?.value)
    }

    /// `φ_t(z)` by an explicitly chosen method.
    pub fn flow_with_method(&self, method: FlowMethod, t: f64, z: Complex64) -> Result<Complex64> {
        check_time(t)?;
        match (method, &self.model) {
            (FlowMethod::Ode, _) => ode_flow(&self.generator, t, z),
            (FlowMethod::ClosedForm, FlowModel::ClosedForm(cf)) => {
                check_point(z, true)?;
                Ok(if t == 0.0 { z } else { (cf.value)(t, z) })
            }
            (FlowMethod::Koenigs, FlowModel::InteriorKoenigs { h, .. } | FlowModel::BoundaryKoenigs { h, .. }) => {
                check_point(z, true)?;
                if t == 0.0 {
                    Ok(z)
                } else {
                    self.koenigs_flow(h, t, z)
                }
            }
            (m, _) => Err(LabError::Domain(format!(
                "method {m:?} is not available for the {} model",
                self.model.name()
            ))),
        }
    }

    /// `∂φ_t/∂z`: analytic for closed forms and Koenigs models, from the
    /// variational equation otherwise.
    pub fn flow_derivative(&self, t: f64, z: Complex64) -> Result<Complex64> {
        Ok(self.flow_and_derivative(t, z)?.1)
    }

    /// `(φ_t(z), ∂φ_t/∂z)` sharing one flow evaluation.
    pub fn flow_and_derivative(&self, t: f64, z: Complex64) -> Result<(Complex64, Complex64)> {
        check_time(t)?;
        if t == 0.0 {
            check_point(z, true)?;
            return Ok((z, ONE));
        }
        let fp = match &self.model {
            FlowModel::OdeOnly => return ode_flow_with_derivative(&self.generator, t, z),
            _ => self.flow_point(t, z)?,
        };
        if fp.fell_back {
            return ode_flow_with_derivative(&self.generator, t, z);
        }
        let d = match &self.model {
            FlowModel::ClosedForm(cf) => (cf.deriv)(t, z),
            FlowModel::InteriorKoenigs { h, c } => (-c * t).exp() * h.deriv_at(z) / h.deriv_at(fp.value),
            FlowModel::BoundaryKoenigs { h, .. } => h.deriv_at(z) / h.deriv_at(fp.value),
            FlowModel::OdeOnly => unreachable!("handled above"),
        };
        Ok((fp.value, d))
    }

    /// Boundary angles `σ` with `φ_t(e^{iσ}) = e^{iα}`, `α ∈ targets`.
    pub fn boundary_preimages(&self, t: f64, targets: &[f64]) -> Vec<f64> {
        if t == 0.0 || targets.is_empty() {
            return normalize_angles(targets.iter().copied());
        }
        match &self.model {
            FlowModel::ClosedForm(cf) => normalize_angles((cf.preimages)(t, targets)),
            FlowModel::OdeOnly => Vec::new(),
            _ => {
                let (fixed, rest): (Vec<f64>, Vec<f64>) = targets
                    .iter()
                    .map(|&a| wrap_angle(a))
                    .partition(|a| self.singular_angles.iter().any(|s| (s - a).abs() < 1e-14));
                let sg = self.clone();
                let phi = move |z: Complex64| sg.flow(t, z).unwrap_or(Complex64::new(f64::NAN, f64::NAN));
                let found = numeric_preimages(&phi, &rest);
                normalize_angles(fixed.into_iter().chain(found))
            }
        }
    }

    /// Flows every point; when `cross_check` is set the integrator is run as
    /// well and the largest deviation is recorded.
    pub fn flow_points(&self, t: f64, points: &[Complex64], cross_check: bool) -> Result<FlowResult> {
        let mut out = Vec::with_capacity(points.len());
        let mut fallbacks = 0;
        let mut max_residual: f64 = 0.0;
        for &z in points {
            let fp = self.flow_point(t, z)?;
            if fp.value.norm() > 1.0 - 1e-15 && z.norm() < 1.0 {
                return Err(LabError::FlowLeftRegion(format!("φ_{t}({z}) = {} is not strictly inside", fp.value)));
            }
            fallbacks += fp.fell_back as usize;
            if cross_check && fp.method != FlowMethod::Ode && z.norm() < 1.0 {
                let w = ode_flow(&self.generator, t, z)?;
                max_residual = max_residual.max((w - fp.value).norm());
            }
            out.push(fp.value);
        }
        Ok(FlowResult {
            t,
            points_in: points.to_vec(),
            points_out: out,
            method: self.method(),
            max_residual,
            fallbacks,
        })
    }
}

/// Largest of the two generator identities over `points`:
/// `|(φ_t(z) - z)/t - G(z)|` after one Richardson step in `t`, and
/// `|G(φ_t(z)) - G(z)∂φ_t/∂z|` with a central difference in `z`.
pub fn generator_residual(semigroup: &Semigroup, points: &[Complex64], t_small: f64) -> Result<f64> {
    let g = semigroup.generator();
    let mut worst: f64 = 0.0;
    for &z in points {
        let q = |t: f64| -> Result<Complex64> { Ok((semigroup.flow(t, z)? - z) / t) };
        let rich = 2.0 * q(0.5 * t_small)? - q(t_small)?;
        worst = worst.max((rich - g.at(z)).norm());
        let h = 1e-4 * (1.0 - z.norm());
        let d = (semigroup.flow(t_small, z + h)? - semigroup.flow(t_small, z - h)?) / (2.0 * h);
        let lhs = g.at(semigroup.flow(t_small, z)?);
        worst = worst.max((lhs - g.at(z) * d).norm());
    }
    Ok(worst)
}

/// `ψ(z) = ∫_0^z ζ/G(ζ) dζ = -z∫_0^1 ds/P(sz)` for a generator with Denjoy–Wolff
/// point `0`, by 32-point Gauss–Legendre; `ψ' = z/G(z)`.
pub fn psi_test_function(generator: &Generator) -> Result<AnalyticFunction> {
    if generator.dw_point().norm() > 1e-14 {
        return Err(LabError::Precondition(format!(
            "ψ requires the Denjoy–Wolff point at 0, got {}",
            generator.dw_point()
        )));
    }
    for z in check_grid() {
        if generator.p_at(z).norm() < 1e-12 {
            return Err(LabError::SingularGenerator(format!("|P| < 1e-12 at z = {z}")));
        }
    }
    let g1 = generator.clone();
    let g2 = generator.clone();
    let value = move |z: Complex64| {
        let gl = gauss_legendre(32);
        let mut acc = Complex64::default();
        for (x, w) in gl.nodes.iter().zip(&gl.weights) {
            let s = 0.5 * (x + 1.0);
            let p = g1.p_at(z * s);
            if p.norm() < 1e-12 {
                return Complex64::new(f64::NAN, f64::NAN);
            }
            acc += 0.5 * w / p;
        }
        -z * acc
    };
    let deriv = move |z: Complex64| -1.0 / g2.p_at(z);
    Ok(AnalyticFunction::new(format!("psi[{}]", generator.description()), value, deriv))
}

pub const SEMIGROUP_LABELS: &[&str] = &["rotation:a", "dilation", "affine", "koenigs_lambda:λ"];

fn unknown_semigroup(label: &str) -> LabError {
    LabError::UnknownLabel {
        label: label.to_string(),
        known: SEMIGROUP_LABELS.join(", "),
    }
}

pub fn rotation(a: f64) -> Result<Semigroup> {
    let i = Complex64::i();
    let g = Generator::new(format!("G(z) = {a}iz"), move |z| i * a * z, Complex64::default())?;
    let cf = ClosedForm {
        value: Shared::new(move |t, z| unit(a * t) * z),
        deriv: Shared::new(move |t, _| unit(a * t)),
        preimages: Shared::new(move |t, targets| targets.iter().map(|&al| al - a * t).collect()),
    };
    Ok(Semigroup::new(format!("rotation:{a}"), g, FlowModel::ClosedForm(cf)))
}

pub fn dilation() -> Result<Semigroup> {
    let g = Generator::new("G(z) = -z", |z| -z, Complex64::default())?;
    let cf = ClosedForm {
        value: Shared::new(|t, z| (-t).exp() * z),
        deriv: Shared::new(|t, _| Complex64::new((-t).exp(), 0.0)),
        preimages: Shared::new(|_, _| Vec::new()),
    };
    Ok(Semigroup::new("dilation", g, FlowModel::ClosedForm(cf)))
}

pub fn affine() -> Result<Semigroup> {
    let g = Generator::new("G(z) = 1 - z", |z| ONE - z, ONE)?;
    let cf = ClosedForm {
        value: Shared::new(|t, z| (-t).exp() * z + (1.0 - (-t).exp())),
        deriv: Shared::new(|t, _| Complex64::new((-t).exp(), 0.0)),
        // φ_t maps the circle onto a circle internally tangent at 1
        preimages: Shared::new(|_, targets| {
            targets
                .iter()
                .filter(|&&a| angle_diff(a, 0.0).abs() < 1e-14)
                .map(|_| 0.0)
                .collect()
        }),
    };
    Ok(Semigroup::new("affine", g, FlowModel::ClosedForm(cf)))
}

/// Interior Koenigs model with the spirallike `h` and `c = 1`; `G = -h/h'`.
pub fn koenigs_lambda(lambda: f64) -> Result<Semigroup> {
    let h = make_spirallike_h(lambda)?;
    let hg = h.clone();
    let g = Generator::new(
        format!("G = -h/h' for spirallike_h({lambda})"),
        move |z| -hg.value_at(z) / hg.deriv_at(z),
        Complex64::default(),
    )?;
    Ok(Semigroup::new(
        format!("koenigs_lambda:{lambda}"),
        g,
        FlowModel::InteriorKoenigs { h, c: ONE },
    ))
}

pub fn semigroup_from_label(label: &str) -> Result<Semigroup> {
    let (name, arg) = match label.split_once(':') {
        Some((n, a)) => (n.trim(), Some(a.trim())),
        None => (label.trim(), None),
    };
    let num = |a: &str| a.parse::<f64>().map_err(|_| unknown_semigroup(label));
    match (name, arg) {
        ("rotation", Some(a)) => rotation(num(a)?),
        ("rotation", None) => rotation(1.0),
        ("dilation", None) => dilation(),
        ("affine", None) => affine(),
        ("koenigs_lambda", Some(l)) => koenigs_lambda(num(l)?),
        _ => Err(unknown_semigroup(label)),
    }
}

/// The four gallery semigroups, with `λ` for the Koenigs entry.
pub fn gallery(lambda: f64) -> Result<Vec<Semigroup>> {
    Ok(vec![rotation(1.0)?, dilation()?, affine()?, koenigs_lambda(lambda)?])
}

/// `n` interior points on a polar grid of radii up to `r_max`.
pub fn interior_points(n_radii: usize, n_angles: usize, r_max: f64) -> Vec<Complex64> {
    let mut pts = Vec::with_capacity(n_radii * n_angles);
    for i in 0..n_radii {
        let r = r_max * (i as f64 + 1.0) / n_radii as f64;
        for j in 0..n_angles {
            let th = TAU * (j as f64 + 0.37 * (i % 3) as f64) / n_angles as f64;
            pts.push(Complex64::from_polar(r, th));
        }
    }
    pts
}

/// Angle in `[0, 2π)` at which `|h(e^{iθ})|` is smallest on a 4096-point sample.
pub fn claim_direction(h: &AnalyticFunction) -> f64 {
    let n = 4096;
    let mut best = (f64::INFINITY, 0.0);
    for j in 0..n {
        let th = TAU * (j as f64 + 0.5) / n as f64;
        let v = h.value_at(unit(th)).norm();
        if v < best.0 {
            best = (v, th);
        }
    }
    best.1
}
