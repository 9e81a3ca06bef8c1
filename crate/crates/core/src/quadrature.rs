//! Quadrature primitives shared by every module: Gauss–Legendre panels with
//! geometric grading toward singular points, the equispaced circle rule and the
//! Carleson-box tensor rule. All reductions use a fixed pairwise order.

use std::f64::consts::{PI, TAU};
use std::ops::Add;
use std::sync::OnceLock;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::disc::{unit, Arc, CarlesonBox};
use crate::error::{LabError, Result};

/// Boundary cutoff for area integrals, `2^{-24}`.
pub const EPS_CUT: f64 = 1.0 / 16_777_216.0;

/// Ratio between consecutive panels of a geometric mesh.
pub const GRADING_RATIO: f64 = 0.25;

/// Widest panel allowed in the angular direction.
pub const MAX_ANGULAR_PANEL: f64 = PI / 8.0;

/// Innermost offset resolved around a boundary singularity. Kept at about
/// 1e5 ulps of the angle so the nodes of the innermost panel stay distinct
/// from it.
pub(crate) fn singular_floor(angle: f64) -> f64 {
    (1e5 * f64::EPSILON * angle.abs()).max(1e-14)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuadratureConfig {
    /// Node count of the equispaced circle rule.
    pub circle_nodes: usize,
    /// Gauss–Legendre order used on every panel.
    pub radial_nodes: usize,
    /// Increasing radii `1 - 2^{-k}` used for limits `ρ → 1`.
    pub radius_schedule: Vec<f64>,
    pub abs_tol: f64,
    pub rel_tol: f64,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        QuadratureConfig {
            circle_nodes: 64,
            radial_nodes: 12,
            radius_schedule: dyadic_radii(1..=12),
            abs_tol: 1e-14,
            rel_tol: 1e-10,
        }
    }
}

/// Radii `1 - 2^{-k}`.
pub fn dyadic_radii(k: std::ops::RangeInclusive<u32>) -> Vec<f64> {
    k.map(|k| 1.0 - 0.5f64.powi(k as i32)).collect()
}

impl QuadratureConfig {
    pub fn validate(&self) -> Result<()> {
        if self.circle_nodes < 4 || self.radial_nodes < 4 {
            return Err(LabError::Domain("quadrature node counts must be >= 4".into()));
        }
        if self.radial_nodes > MAX_GL_ORDER {
            return Err(LabError::Domain(format!(
                "Gauss-Legendre order is limited to {MAX_GL_ORDER}"
            )));
        }
        let s = &self.radius_schedule;
        if s.is_empty() || s.iter().any(|&r| !(0.0..1.0).contains(&r)) {
            return Err(LabError::Domain("radius schedule must lie in [0, 1)".into()));
        }
        if s.windows(2).any(|w| w[1] <= w[0]) {
            return Err(LabError::Domain("radius schedule must be strictly increasing".into()));
        }
        if !(self.abs_tol >= 0.0 && self.rel_tol >= 0.0) {
            return Err(LabError::Domain("tolerances must be nonnegative".into()));
        }
        Ok(())
    }
}

/// Pairwise (cascade) summation in a fixed order.
pub fn pairwise_sum<T: Copy + Add<Output = T> + Default>(xs: &[T]) -> T {
    const BLOCK: usize = 16;
    if xs.len() <= BLOCK {
        let mut acc = T::default();
        for &x in xs {
            acc = acc + x;
        }
        return acc;
    }
    let mid = xs.len() / 2;
    pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
}

/// Nodes and weights of a one-dimensional rule.
#[derive(Debug, Clone, Default)]
pub struct Rule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl Rule {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn total_weight(&self) -> f64 {
        pairwise_sum(&self.weights)
    }
}

const MAX_GL_ORDER: usize = 64;

/// Gauss–Legendre rule of order `n` on `[-1, 1]`, computed once per order.
pub fn gauss_legendre(n: usize) -> &'static Rule {
    static CACHE: [OnceLock<Rule>; MAX_GL_ORDER + 1] = [const { OnceLock::new() }; MAX_GL_ORDER + 1];
    assert!((1..=MAX_GL_ORDER).contains(&n), "unsupported Gauss-Legendre order {n}");
    CACHE[n].get_or_init(|| compute_gauss_legendre(n))
}

fn compute_gauss_legendre(n: usize) -> Rule {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        // Tricomi initial guess, then Newton on P_n.
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (p, d) = legendre(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre(n, x);
        dp = if d.is_finite() { d } else { dp };
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    Rule { nodes, weights }
}

/// `(P_n(x), P_n'(x))` by the three-term recurrence.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// A point toward which a composite rule is geometrically graded, down to
/// offsets of size `floor`.
#[derive(Debug, Clone, Copy)]
pub struct Feature {
    pub at: f64,
    pub floor: f64,
}

/// Breakpoints of a composite rule on `[lo, hi]` graded toward `features`.
pub fn graded_breakpoints(lo: f64, hi: f64, features: &[Feature], max_panel: f64) -> Vec<f64> {
    let span = hi - lo;
    let mut pts = vec![lo, hi];
    for f in features {
        if f.at > lo && f.at < hi {
            pts.push(f.at);
        }
        let floor = f.floor.max(f64::MIN_POSITIVE);
        let mut d = span;
        while d > floor {
            for x in [f.at - d, f.at + d] {
                if x > lo && x < hi {
                    pts.push(x);
                }
            }
            d *= GRADING_RATIO;
        }
    }
    pts.sort_by(f64::total_cmp);
    // periodic images of a feature can land a few ulps off each other
    let tie = 16.0 * f64::EPSILON * lo.abs().max(hi.abs()).max(1.0);
    pts.dedup_by(|b, a| *b - *a <= tie);
    if pts.len() > 1 && hi - pts[pts.len() - 1] < tie {
        pts.pop();
    }
    if *pts.last().unwrap() != hi {
        pts.push(hi);
    }
    let mut out = Vec::with_capacity(pts.len() * 2);
    out.push(pts[0]);
    for w in pts.windows(2) {
        let width = w[1] - w[0];
        let pieces = (width / max_panel).ceil().max(1.0) as usize;
        for j in 1..=pieces {
            out.push(if j == pieces {
                w[1]
            } else {
                w[0] + width * j as f64 / pieces as f64
            });
        }
    }
    out
}

/// Composite Gauss–Legendre rule of order `order` on the given breakpoints.
pub fn composite_rule(breaks: &[f64], order: usize) -> Rule {
    let gl = gauss_legendre(order);
    let mut rule = Rule {
        nodes: Vec::with_capacity(breaks.len() * order),
        weights: Vec::with_capacity(breaks.len() * order),
    };
    for w in breaks.windows(2) {
        let (a, b) = (w[0], w[1]);
        if b <= a {
            continue;
        }
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        for (x, wt) in gl.nodes.iter().zip(&gl.weights) {
            rule.nodes.push(mid + half * x);
            rule.weights.push(half * wt);
        }
    }
    rule
}

/// Periodic images of `angles` that fall near `[lo, hi]`, as grading features.
pub(crate) fn angle_features(lo: f64, hi: f64, angles: &[f64], floor: impl Fn(f64) -> f64) -> Vec<Feature> {
    let span = hi - lo;
    let mut out = Vec::new();
    for &a in angles {
        for m in -2..=2 {
            let x = a + TAU * m as f64;
            if x >= lo - span && x <= hi + span {
                out.push(Feature { at: x, floor: floor(x) });
            }
        }
    }
    out
}

/// Rule on an arc for the normalized measure `dθ/2π` (weights sum to `|I|`),
/// graded toward the given boundary singularities.
pub fn arc_rule(arc: &Arc, singular_angles: &[f64], cfg: &QuadratureConfig) -> Rule {
    let (lo, hi) = arc.endpoints();
    let feats = angle_features(lo, hi, singular_angles, singular_floor);
    let max_panel = MAX_ANGULAR_PANEL.min(0.5 * (hi - lo));
    let mut rule = composite_rule(&graded_breakpoints(lo, hi, &feats, max_panel), cfg.radial_nodes);
    for w in &mut rule.weights {
        *w /= TAU;
    }
    rule
}

/// `(1/2π)∫ g(e^{iθ}) dθ` by the equispaced trapezoid rule with `cfg.circle_nodes` nodes.
pub fn circle_integral(
    g: impl Fn(Complex64) -> Complex64,
    cfg: &QuadratureConfig,
) -> Result<Complex64> {
    circle_integral_n(|th| g(unit(th)), cfg.circle_nodes)
}

/// Equispaced trapezoid mean of `g(θ)` over `n` nodes.
pub(crate) fn circle_integral_n(g: impl Fn(f64) -> Complex64, n: usize) -> Result<Complex64> {
    let mut vals = Vec::with_capacity(n);
    for j in 0..n {
        let th = TAU * j as f64 / n as f64;
        let v = g(th);
        if !(v.re.is_finite() && v.im.is_finite()) {
            return Err(LabError::non_finite(format!("circle node {j} (θ = {th})")));
        }
        vals.push(v);
    }
    Ok(pairwise_sum(&vals) / n as f64)
}

/// Result of an area integral over a Carleson box.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoxEstimate {
    /// `raw + tail`.
    pub value: f64,
    /// Integral over `1 - |I| <= |z| <= 1 - s_min`, where `s_min = |I|/4^k` is the
    /// first panel break at or below [`EPS_CUT`].
    pub raw: f64,
    /// Contribution of the panel adjacent to the boundary cutoff, i.e. the
    /// change caused by the last refinement level.
    pub delta: f64,
    /// Geometric extrapolation of the strip `1 - ε_cut < |z| < 1` from the
    /// ratio of the last two panel contributions; zero when they are not
    /// geometrically decaying.
    pub tail: f64,
}

/// `∫_{S(I)} w(z) dA(z)` with the normalized area measure.
///
/// Tensor rule: Gauss–Legendre in `s = 1 - |z|` on panels shrinking
/// geometrically from `|I|` down to about [`EPS_CUT`], and Gauss–Legendre in `θ`
/// graded toward `singular_angles`.
pub fn box_integral(
    w: impl Fn(Complex64) -> f64,
    bx: &CarlesonBox,
    singular_angles: &[f64],
    cfg: &QuadratureConfig,
) -> Result<BoxEstimate> {
    let ell = bx.arc.length();
    let (lo, hi) = bx.arc.endpoints();
    let feats = angle_features(lo, hi, singular_angles, |_| 0.25 * EPS_CUT);
    let max_panel = MAX_ANGULAR_PANEL.min(0.5 * (hi - lo));
    let theta = composite_rule(&graded_breakpoints(lo, hi, &feats, max_panel), cfg.radial_nodes);
    let units: Vec<Complex64> = theta.nodes.iter().map(|&t| unit(t)).collect();

    let mut s_breaks = vec![ell];
    let mut s = ell;
    // strictly geometric panels, so the last two contributions predict the tail
    while s > EPS_CUT {
        s *= GRADING_RATIO;
        s_breaks.push(s);
    }
    let gl = gauss_legendre(cfg.radial_nodes);

    let mut panel_sums = Vec::with_capacity(s_breaks.len());
    let mut row = vec![0.0; units.len()];
    let mut col = Vec::with_capacity(gl.nodes.len());
    for pair in s_breaks.windows(2) {
        let (s_hi, s_lo) = (pair[0], pair[1]);
        let half = 0.5 * (s_hi - s_lo);
        let mid = 0.5 * (s_hi + s_lo);
        col.clear();
        for (x, ws) in gl.nodes.iter().zip(&gl.weights) {
            let s = mid + half * x;
            let r = 1.0 - s;
            for (k, u) in units.iter().enumerate() {
                let z = u * r;
                let v = w(z);
                if !v.is_finite() {
                    return Err(LabError::non_finite(format!("box node z = {z}")));
                }
                row[k] = v * theta.weights[k];
            }
            col.push(pairwise_sum(&row) * r * half * ws);
        }
        panel_sums.push(pairwise_sum(&col));
    }
    let raw = pairwise_sum(&panel_sums) / PI;
    let n = panel_sums.len();
    let last = panel_sums[n - 1];
    let tail = if n >= 2 {
        let q = last / panel_sums[n - 2];
        if q > 0.0 && q < 0.9 {
            last * q / (1.0 - q) / PI
        } else {
            0.0
        }
    } else {
        0.0
    };
    Ok(BoxEstimate {
        value: raw + tail,
        raw,
        delta: last / PI,
        tail,
    })
}
