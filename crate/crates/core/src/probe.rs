//! Strong-continuity experiments: continuity curves `t ↦ ‖f∘φ_t - f‖`,
//! membership classification, the generator conditions on Carleson boxes and
//! along radii, and the Bloch-type lower bound for rotations.

use std::f64::consts::TAU;
use std::sync::atomic::{AtomicUsize, Ordering};

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::disc::{carleson_box, unit, Arc, GridSpec};
use crate::error::{LabError, Result};
use crate::function::AnalyticFunction;
use crate::quadrature::{box_integral, dyadic_radii, QuadratureConfig};
use crate::semigroup::{Generator, Semigroup};
use crate::seminorms::{decay_verdict, morrey_norm, radial_profile, DecayVerdict, SeminormKind, Thresholds};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Converges,
    BoundedAway,
    Diverges,
    Indeterminate,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContinuityCurve {
    pub kind: SeminormKind,
    /// `λ`, or `α` for Bloch-type curves.
    pub parameter: f64,
    pub t_values: Vec<f64>,
    /// `None` where the flow or the quadrature failed; see `failures`.
    pub norm_values: Vec<Option<f64>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub failures: Vec<String>,
}

impl ContinuityCurve {
    /// Rows `t,value` (empty value for failed entries).
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t,value\n");
        for (t, v) in self.t_values.iter().zip(&self.norm_values) {
            match v {
                Some(v) => out.push_str(&format!("{t},{v}\n")),
                None => out.push_str(&format!("{t},\n")),
            }
        }
        out
    }

    pub fn values(&self) -> Option<Vec<f64>> {
        self.norm_values.iter().copied().collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Evidence {
    Curve(ContinuityCurve),
    Sequence { scale: String, scales: Vec<f64>, values: Vec<f64> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbeVerdict {
    pub verdict: Verdict,
    /// Tail minimum for bounded-away curves, empirical maximum for bound checks, else 0.
    pub floor_estimate: f64,
    /// Truth of the tested condition, for the generator checkers.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub condition_holds: Option<bool>,
    pub evidence: Evidence,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub flags: Vec<String>,
}

impl ProbeVerdict {
    pub fn to_csv(&self) -> String {
        match &self.evidence {
            Evidence::Curve(c) => c.to_csv(),
            Evidence::Sequence { scales, values, .. } => {
                let mut out = String::from("scale,value\n");
                for (s, v) in scales.iter().zip(values) {
                    out.push_str(&format!("{s},{v}\n"));
                }
                out
            }
        }
    }
}

/// `2^{-k}` for `k = 2..9`.
pub fn default_t_schedule() -> Vec<f64> {
    (2..=9).map(|k| 0.5f64.powi(k)).collect()
}

fn check_lambda(lambda: f64) -> Result<()> {
    if lambda > 0.0 && lambda < 1.0 {
        Ok(())
    } else {
        Err(LabError::Domain(format!("λ must lie in (0, 1), got {lambda}")))
    }
}

fn check_times(ts: &[f64]) -> Result<()> {
    if ts.is_empty() || ts.iter().any(|&t| !(t > 0.0 && t.is_finite())) {
        return Err(LabError::Domain("t values must be positive".into()));
    }
    if ts.windows(2).any(|w| w[1] >= w[0]) {
        return Err(LabError::Domain("t values must be strictly decreasing".into()));
    }
    Ok(())
}

/// `f∘φ_t`, with the chain-rule derivative and singular angles pulled back by `φ_t`.
pub fn compose_with_flow(f: &AnalyticFunction, semigroup: &Semigroup, t: f64) -> Result<AnalyticFunction> {
    if !(t >= 0.0) {
        return Err(LabError::Domain(format!("flow time must be nonnegative, got {t}")));
    }
    if t == 0.0 {
        return Ok(f.clone());
    }
    let nan = Complex64::new(f64::NAN, f64::NAN);
    let (f1, f2) = (f.clone(), f.clone());
    let (s1, s2) = (semigroup.clone(), semigroup.clone());
    let pre = semigroup.boundary_preimages(t, f.singular_angles());
    Ok(AnalyticFunction::new(
        format!("{}∘φ_{t}[{}]", f.label(), semigroup.label()),
        move |z| s1.flow(t, z).map(|w| f1.value_at(w)).unwrap_or(nan),
        move |z| {
            s2.flow_and_derivative(t, z)
                .map(|(w, d)| f2.deriv_at(w) * d)
                .unwrap_or(nan)
        },
    )
    .with_singular_angles(pre.into_iter().chain(semigroup.singular_angles().iter().copied())))
}

/// `‖f∘φ_t - f‖_{2,λ}` (with `|(f∘φ_t - f)(0)|` included) for each `t`.
#[allow(clippy::too_many_arguments)]
pub fn continuity_curve(
    f: &AnalyticFunction,
    semigroup: &Semigroup,
    lambda: f64,
    kind: SeminormKind,
    t_values: &[f64],
    grid: &GridSpec,
    cfg: &QuadratureConfig,
) -> Result<ContinuityCurve> {
    check_lambda(lambda)?;
    check_times(t_values)?;
    let mut norm_values = Vec::with_capacity(t_values.len());
    let mut failures = Vec::new();
    for &t in t_values {
        let value = compose_with_flow(f, semigroup, t)
            .and_then(|g| morrey_norm(&g.minus(f), lambda, kind, grid, cfg));
        match value {
            Ok(v) => norm_values.push(Some(v)),
            Err(e) => {
                failures.push(format!("t = {t}: {e}"));
                norm_values.push(None);
            }
        }
    }
    Ok(ContinuityCurve {
        kind,
        parameter: lambda,
        t_values: t_values.to_vec(),
        norm_values,
        failures,
    })
}

/// Classifies a continuity curve given the norm of `f`: converges when the tail
/// is non-increasing and ends below `vanish·(first + 1e-3·‖f‖)`, bounded away
/// when its minimum is at least `persist·max`.
pub fn classify_curve(curve: ContinuityCurve, f_norm: f64, th: &Thresholds) -> ProbeVerdict {
    let Some(values) = curve.values() else {
        return ProbeVerdict {
            verdict: Verdict::Indeterminate,
            floor_estimate: 0.0,
            condition_holds: None,
            flags: vec![format!("{} curve entries failed", curve.failures.len())],
            evidence: Evidence::Curve(curve),
        };
    };
    let tail = &values[values.len().saturating_sub(th.tail)..];
    let tail_max = tail.iter().cloned().fold(0.0, f64::max);
    let tail_min = tail.iter().cloned().fold(f64::INFINITY, f64::min);
    let max = values.iter().cloned().fold(0.0, f64::max);
    // the tail has to be falling and end below the bound
    let falling = tail.windows(2).all(|w| w[1] <= w[0] * (1.0 + 1e-9));
    let last = tail[tail.len() - 1];
    let (verdict, floor_estimate) = if tail_max == 0.0 || (falling && last < th.vanish * (values[0] + f_norm * 1e-3)) {
        (Verdict::Converges, 0.0)
    } else if tail_min > 0.0 && tail_min >= th.persist * max {
        (Verdict::BoundedAway, tail_min)
    } else {
        (Verdict::Indeterminate, 0.0)
    };
    ProbeVerdict {
        verdict,
        floor_estimate,
        condition_holds: None,
        evidence: Evidence::Curve(curve),
        flags: Vec::new(),
    }
}

/// Decides whether `f ∈ [φ_t, H^{2,λ}]` from the curve over `t_values`
/// (by default `2^{-k}`, `k = 2..9`).
#[allow(clippy::too_many_arguments)]
pub fn classify_membership(
    f: &AnalyticFunction,
    semigroup: &Semigroup,
    lambda: f64,
    kind: SeminormKind,
    t_values: Option<&[f64]>,
    grid: &GridSpec,
    cfg: &QuadratureConfig,
    th: &Thresholds,
) -> Result<ProbeVerdict> {
    let default = default_t_schedule();
    let ts = t_values.unwrap_or(&default);
    let f_norm = morrey_norm(f, lambda, kind, grid, cfg)?;
    let curve = continuity_curve(f, semigroup, lambda, kind, ts, grid, cfg)?;
    Ok(classify_curve(curve, f_norm, th))
}

fn boundary_zero_angles(generator: &Generator) -> Vec<f64> {
    if generator.is_interior() {
        Vec::new()
    } else {
        vec![generator.dw_point().arg()]
    }
}

/// `(1/|I|)∫_{S(I)} (1 - |z|)/|G(z)|² dA`, worst case over `centers` arcs per
/// dyadic length in `lengths`.
pub fn thm2_decay(
    generator: &Generator,
    lengths: &[f64],
    centers: usize,
    cfg: &QuadratureConfig,
    th: &Thresholds,
) -> Result<ProbeVerdict> {
    if lengths.len() < 2 || centers == 0 {
        return Err(LabError::Domain("need at least two scales and one center".into()));
    }
    let b = generator.dw_point();
    let interior = generator.is_interior();
    let singular = boundary_zero_angles(generator);
    let excised = AtomicUsize::new(0);
    let values = lengths
        .par_iter()
        .map(|&ell| {
            let mut worst: f64 = 0.0;
            for j in 0..centers {
                let arc = Arc::new(TAU * j as f64 / centers as f64, ell)?;
                let est = box_integral(
                    |z| {
                        if interior && (z - b).norm() < 1e-6 {
                            excised.fetch_add(1, Ordering::Relaxed);
                            return 0.0;
                        }
                        (1.0 - z.norm()) / generator.at(z).norm_sqr()
                    },
                    &carleson_box(arc),
                    &singular,
                    cfg,
                )?;
                worst = worst.max(est.value / ell);
            }
            Ok(worst)
        })
        .collect::<Result<Vec<f64>>>()?;
    let (verdict, holds) = match decay_verdict(&values, th) {
        DecayVerdict::Vanishes => (Verdict::Converges, Some(true)),
        DecayVerdict::Persists => (Verdict::BoundedAway, Some(false)),
        DecayVerdict::Indeterminate => (Verdict::Indeterminate, None),
    };
    let floor = if verdict == Verdict::BoundedAway {
        values[values.len().saturating_sub(th.tail)..].iter().cloned().fold(f64::INFINITY, f64::min)
    } else {
        0.0
    };
    let mut flags = Vec::new();
    let n = excised.load(Ordering::Relaxed);
    if n > 0 {
        flags.push(format!("{n} quadrature nodes within 1e-6 of the interior zero were excised"));
    }
    Ok(ProbeVerdict {
        verdict,
        floor_estimate: floor,
        condition_holds: holds,
        evidence: Evidence::Sequence {
            scale: "arc_length".into(),
            scales: lengths.to_vec(),
            values,
        },
        flags,
    })
}

/// Per-radius maxima of `(1 - |z|)^α/|G(z)|` over the grid points with `|z| >= 1/2`.
pub fn corollary_bound(generator: &Generator, alpha: f64, grid: &GridSpec) -> Result<ProbeVerdict> {
    if !(alpha > 0.0 && alpha < 0.5) {
        return Err(LabError::Domain(format!("α must lie in (0, 1/2), got {alpha}")));
    }
    grid.validate()?;
    let radii: Vec<f64> = grid.point_radii.iter().copied().filter(|&r| r >= 0.5).collect();
    if radii.is_empty() {
        return Err(LabError::Domain("grid has no radius >= 1/2".into()));
    }
    let mut flags = Vec::new();
    let mut values = Vec::with_capacity(radii.len());
    for &r in &radii {
        let mut m: f64 = 0.0;
        for z in grid.points_at(r) {
            let g = generator.at(z).norm();
            if g == 0.0 || !g.is_finite() {
                flags.push(format!("G vanishes or is undefined at {z}; sample excluded"));
                continue;
            }
            m = m.max((1.0 - r).powf(alpha) / g);
        }
        values.push(m);
    }
    let max = values.iter().cloned().fold(0.0, f64::max);
    let cut = 1.0 - 2f64.powi(-6);
    let late: Vec<f64> = radii.iter().zip(&values).filter(|(r, _)| **r >= cut).map(|(_, v)| *v).collect();
    let non_increasing = late.windows(2).all(|w| w[1] <= w[0] * (1.0 + 1e-12));
    let growing = values.last().copied() == Some(max) && values.len() > 1 && max > values[0];
    let (verdict, holds) = if non_increasing {
        (Verdict::Converges, Some(true))
    } else if growing {
        (Verdict::Diverges, Some(false))
    } else {
        (Verdict::Indeterminate, None)
    };
    Ok(ProbeVerdict {
        verdict,
        floor_estimate: max,
        condition_holds: holds,
        evidence: Evidence::Sequence {
            scale: "radius".into(),
            scales: radii,
            values,
        },
        flags,
    })
}

/// `max_θ (1 - r)^{(3-λ)/2}/|G(re^{iθ})|` along `radii` with `angles` directions.
pub fn thm4_radial(
    generator: &Generator,
    lambda: f64,
    radii: &[f64],
    angles: usize,
    th: &Thresholds,
) -> Result<ProbeVerdict> {
    check_lambda(lambda)?;
    if !generator.is_interior() {
        return Err(LabError::Precondition(format!(
            "the radial condition assumes an interior Denjoy–Wolff point, got {}",
            generator.dw_point()
        )));
    }
    if radii.len() < 2 || angles == 0 {
        return Err(LabError::Domain("need at least two radii and one angle".into()));
    }
    let alpha = 0.5 * (3.0 - lambda);
    let values: Vec<f64> = radii
        .iter()
        .map(|&r| {
            (0..angles)
                .map(|j| {
                    let z = Complex64::from_polar(r, TAU * j as f64 / angles as f64);
                    (1.0 - r).powf(alpha) / generator.at(z).norm()
                })
                .fold(0.0, f64::max)
        })
        .collect();
    if let Some(i) = values.iter().position(|v| !v.is_finite()) {
        return Err(LabError::non_finite(format!("radius {}", radii[i])));
    }
    let max = values.iter().cloned().fold(0.0, f64::max);
    let (verdict, holds) = match decay_verdict(&values, th) {
        DecayVerdict::Vanishes => (Verdict::Converges, Some(true)),
        _ if values.last().copied() == Some(max) && max > values[0] => (Verdict::Diverges, Some(false)),
        _ => (Verdict::Indeterminate, None),
    };
    let mut flags = Vec::new();
    if generator.is_synthetic() {
        flags.push("synthetic generator: Berkson–Porta check waived".into());
    }
    Ok(ProbeVerdict {
        verdict,
        floor_estimate: 0.0,
        condition_holds: holds,
        evidence: Evidence::Sequence {
            scale: "radius".into(),
            scales: radii.to_vec(),
            values,
        },
        flags,
    })
}

/// Radii `1 - 2^{-k}`, `k = 1..14`, used for the Bloch-type limsup.
pub fn claim_radii() -> Vec<f64> {
    dyadic_radii(1..=14)
}

/// For each `t`, the largest of the last three values of
/// `|(f∘φ_t - f)'(rζ)|(1 - r)^{(3-λ)/2}` over `r = 1 - 2^{-k}`, `k <= 14`,
/// maximized over the singular directions `ζ` of `f∘φ_t - f`.
pub fn claim_lower_bound(
    f: &AnalyticFunction,
    semigroup: &Semigroup,
    lambda: f64,
    t_values: &[f64],
) -> Result<ContinuityCurve> {
    check_lambda(lambda)?;
    check_times(t_values)?;
    let alpha = 0.5 * (3.0 - lambda);
    let radii = claim_radii();
    let mut norm_values = Vec::with_capacity(t_values.len());
    let mut failures = Vec::new();
    for &t in t_values {
        let value = compose_with_flow(f, semigroup, t).and_then(|g| {
            let diff = g.minus(f);
            let mut best: f64 = 0.0;
            for &th in diff.singular_angles() {
                let prof = radial_profile(&diff, unit(th), alpha, &radii)?;
                let tail = prof[prof.len() - 3..].iter().cloned().fold(0.0, f64::max);
                best = best.max(tail);
            }
            Ok(best)
        });
        match value {
            Ok(v) => norm_values.push(Some(v)),
            Err(e) => {
                failures.push(format!("t = {t}: {e}"));
                norm_values.push(None);
            }
        }
    }
    Ok(ContinuityCurve {
        kind: SeminormKind::BlochAlpha,
        parameter: alpha,
        t_values: t_values.to_vec(),
        norm_values,
        failures,
    })
}

/// A converging box condition for a generator means `[φ_t, H^{2,λ}] = H^{2,λ}_0`,
/// so a function outside the little space must not converge.
pub fn consistent_with_membership(condition: &ProbeVerdict, outside_little_space: &ProbeVerdict) -> bool {
    condition.condition_holds != Some(true) || outside_little_space.verdict != Verdict::Converges
}
