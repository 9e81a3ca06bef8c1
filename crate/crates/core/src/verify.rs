//! The acceptance suite: named numerical criteria with measured values,
//! tolerances and runtimes.

use std::f64::consts::TAU;
use std::time::Instant;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::disc::{Arc, GridSpec};
use crate::error::{LabError, Result};
use crate::function::{comparison_gallery, horner, make_f_lambda, make_spirallike_h, AnalyticFunction};
use crate::probe::{
    claim_lower_bound, claim_radii, classify_membership, continuity_curve, corollary_bound, thm2_decay,
    thm4_radial, Evidence, Verdict,
};
use crate::quadrature::{dyadic_radii, QuadratureConfig};
use crate::semigroup::{
    affine, dilation, gallery, generator_residual, interior_points, koenigs_lambda, rotation, FlowMethod,
};
use crate::seminorms::{arc_oscillation, growth_ratio, morrey_norm, radial_profile, seminorm, SeminormKind, Thresholds};

/// Floor of `‖f_λ∘φ_t - f_λ‖` (p3, λ = 1/2, rotation) from a run on arc levels
/// `0..=14`; the suite's default-grid value must reproduce it.
pub const PINNED_ROTATION_FLOOR_P3: f64 = 0.433_459_099_393_143;
/// The same floor for p2.
pub const PINNED_ROTATION_FLOOR_P2: f64 = 0.858_381_816_554_684;

pub const CRITERIA: &[&str] = &[
    "eigenrelation",
    "norm-scaling",
    "koenigs-example",
    "thm1-probe",
    "averaging-identity",
    "semigroup-law",
    "generator-consistency",
    "thm2-dilation",
    "thm2-affine",
    "thm4-quantity",
    "claim",
    "growth-bound",
    "seminorm-equivalence",
];

/// Numerical settings shared by the criteria.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Settings {
    pub grid: GridSpec,
    pub quadrature: QuadratureConfig,
    pub thresholds: Thresholds,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Measurement {
    pub name: String,
    pub value: f64,
    /// Human-readable bound, e.g. `<= 1e-8`.
    pub bound: String,
    pub ok: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriterionResult {
    pub name: String,
    pub description: String,
    pub passed: bool,
    pub measurements: Vec<Measurement>,
    pub runtime_s: f64,
    pub runtime_budget_s: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl CriterionResult {
    /// One-line summary.
    pub fn summary(&self) -> String {
        let worst = self
            .measurements
            .iter()
            .find(|m| !m.ok)
            .or_else(|| self.measurements.first())
            .map(|m| format!("{} = {:.6e} ({})", m.name, m.value, m.bound))
            .unwrap_or_default();
        let status = if self.passed { "PASS" } else { "FAIL" };
        match &self.error {
            Some(e) => format!("{status} {} [{:.1}s] error: {e}", self.name, self.runtime_s),
            None => format!(
                "{status} {} [{:.1}s/{:.0}s] {worst}",
                self.name, self.runtime_s, self.runtime_budget_s
            ),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub passed: bool,
    pub n_passed: usize,
    pub n_total: usize,
    pub criteria: Vec<CriterionResult>,
}

struct Sheet(Vec<Measurement>);

impl Sheet {
    fn new() -> Self {
        Sheet(Vec::new())
    }

    fn at_most(&mut self, name: impl Into<String>, value: f64, bound: f64) {
        self.0.push(Measurement {
            name: name.into(),
            value,
            bound: format!("<= {bound:e}"),
            ok: value <= bound,
        });
    }

    fn at_least(&mut self, name: impl Into<String>, value: f64, bound: f64) {
        self.0.push(Measurement {
            name: name.into(),
            value,
            bound: format!(">= {bound:e}"),
            ok: value >= bound,
        });
    }

    fn within(&mut self, name: impl Into<String>, value: f64, lo: f64, hi: f64) {
        self.0.push(Measurement {
            name: name.into(),
            value,
            bound: format!("in [{lo:e}, {hi:e}]"),
            ok: value >= lo && value <= hi,
        });
    }

    fn holds(&mut self, name: impl Into<String>, ok: bool) {
        self.0.push(Measurement {
            name: name.into(),
            value: ok as u8 as f64,
            bound: "== 1".into(),
            ok,
        });
    }
}

fn budget(name: &str) -> f64 {
    match name {
        "eigenrelation" | "thm4-quantity" => 5.0,
        "averaging-identity" | "generator-consistency" => 10.0,
        "semigroup-law" | "growth-bound" => 30.0,
        "thm1-probe" => 120.0,
        "seminorm-equivalence" => 300.0,
        // the two box-condition checks share one 60 s budget
        "thm2-dilation" | "thm2-affine" => 30.0,
        _ => 60.0,
    }
}

fn description(name: &str) -> &'static str {
    match name {
        "eigenrelation" => "f_λ∘φ_t = e^{t/4} f_λ for the affine semigroup, closed-form and ODE flows",
        "norm-scaling" => "‖f_λ∘φ_t - f_λ‖ = (e^{t/4} - 1)‖f_λ‖ for the affine semigroup, p2 and p3",
        "koenigs-example" => "‖h∘φ_t - h‖ = (1 - e^{-t})‖h‖ for the Koenigs semigroup",
        "thm1-probe" => "z² converges and f_λ stays bounded away under rotation",
        "averaging-identity" => "centered and double-integral oscillation forms agree",
        "semigroup-law" => "φ_s∘φ_t = φ_{s+t} for every gallery semigroup",
        "generator-consistency" => "generator identities hold; mismatched pair is rejected",
        "thm2-dilation" => "dilation satisfies the box and pointwise generator conditions",
        "thm2-affine" => "the affine generator fails the box condition",
        "thm4-quantity" => "(1 - r)^{5/4}/|G| for the dilation generator",
        "claim" => "radial Bloch-type lower bound for f_λ under rotation",
        "growth-bound" => "pointwise growth of f_λ and of the gallery",
        "seminorm-equivalence" => "p1/p3 and p2/p3 stay within [1/20, 20]",
        _ => "",
    }
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn max_rel_dev(values: &[f64], expect: &[f64]) -> f64 {
    values
        .iter()
        .zip(expect)
        .map(|(v, e)| ((v - e) / e).abs())
        .fold(0.0, f64::max)
}

fn eigenrelation(_: &Settings, s: &mut Sheet) -> Result<()> {
    let f = make_f_lambda(0.5)?;
    let sg = affine()?;
    let pts = interior_points(20, 50, 0.95);
    for t in [0.05f64, 0.1, 0.2] {
        let k = (0.25 * t).exp();
        let mut closed: f64 = 0.0;
        let mut ode: f64 = 0.0;
        for &z in &pts {
            let target = k * f.value_at(z);
            closed = closed.max((f.value_at(sg.flow(t, z)?) - target).norm());
            ode = ode.max((f.value_at(sg.flow_with_method(FlowMethod::Ode, t, z)?) - target).norm());
        }
        s.at_most(format!("closed-form max deviation, t = {t}"), closed, 1e-8);
        s.at_most(format!("ODE max deviation, t = {t}"), ode, 1e-6);
    }
    Ok(())
}

fn norm_scaling(st: &Settings, s: &mut Sheet) -> Result<()> {
    let lambda = 0.5;
    let f = make_f_lambda(lambda)?;
    let ts = [0.2, 0.1, 0.05];
    let expect: Vec<f64> = ts.iter().map(|t| (t * 0.5 * (1.0 - lambda)).exp() - 1.0).collect();
    for kind in [SeminormKind::P2, SeminormKind::P3] {
        let norm = morrey_norm(&f, lambda, kind, &st.grid, &st.quadrature)?;
        let curve = continuity_curve(&f, &affine()?, lambda, kind, &ts, &st.grid, &st.quadrature)?;
        let ratios: Vec<f64> = curve.values().ok_or_else(|| failed_curve(&curve.failures))?.iter().map(|v| v / norm).collect();
        s.at_most(format!("{kind} max relative deviation"), max_rel_dev(&ratios, &expect), 0.02);
    }
    Ok(())
}

fn failed_curve(failures: &[String]) -> LabError {
    LabError::Consistency(format!("curve entries failed: {}", failures.join("; ")))
}

fn koenigs_example(st: &Settings, s: &mut Sheet) -> Result<()> {
    let lambda = 0.5;
    let h = make_spirallike_h(lambda)?;
    let ts = [0.5, 0.1];
    let expect: Vec<f64> = ts.iter().map(|t: &f64| 1.0 - (-t).exp()).collect();
    for kind in [SeminormKind::P2, SeminormKind::P3] {
        let norm = morrey_norm(&h, lambda, kind, &st.grid, &st.quadrature)?;
        let curve = continuity_curve(&h, &koenigs_lambda(lambda)?, lambda, kind, &ts, &st.grid, &st.quadrature)?;
        let ratios: Vec<f64> = curve.values().ok_or_else(|| failed_curve(&curve.failures))?.iter().map(|v| v / norm).collect();
        s.at_most(format!("{kind} max relative deviation"), max_rel_dev(&ratios, &expect), 0.02);
    }
    Ok(())
}

fn thm1_probe(st: &Settings, s: &mut Sheet) -> Result<()> {
    let lambda = 0.5;
    let rot = rotation(1.0)?;
    let sq = crate::function::from_power_series(&[c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)])?;
    let f = make_f_lambda(lambda)?;
    let t_last = 0.5f64.powi(9);
    for (kind, pinned) in [(SeminormKind::P3, PINNED_ROTATION_FLOOR_P3), (SeminormKind::P2, PINNED_ROTATION_FLOOR_P2)] {
        let norm = morrey_norm(&sq, lambda, kind, &st.grid, &st.quadrature)?;
        let curve = continuity_curve(&sq, &rot, lambda, kind, &[t_last], &st.grid, &st.quadrature)?;
        let v = curve.values().ok_or_else(|| failed_curve(&curve.failures))?[0];
        s.at_most(format!("{kind} z² curve at t = 2^-9 / ‖z²‖"), v / norm, 0.02);
        let fnorm = morrey_norm(&f, lambda, kind, &st.grid, &st.quadrature)?;
        let verdict = classify_membership(&f, &rot, lambda, kind, None, &st.grid, &st.quadrature, &st.thresholds)?;
        s.holds(format!("{kind} f_λ verdict bounded-away"), verdict.verdict == Verdict::BoundedAway);
        s.at_least(format!("{kind} f_λ floor / ‖f_λ‖"), verdict.floor_estimate / fnorm, 0.05);
        s.at_most(
            format!("{kind} f_λ floor vs pinned value, relative"),
            ((verdict.floor_estimate - pinned) / pinned).abs(),
            0.01,
        );
    }
    Ok(())
}

fn averaging_identity(st: &Settings, s: &mut Sheet) -> Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let deg_pos = rng.gen_range(0..=8);
        let deg_neg = rng.gen_range(0..=8);
        let mut draw = |n: usize| -> Vec<Complex64> {
            (0..=n).map(|_| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect()
        };
        let pos = draw(deg_pos);
        let mut neg = draw(deg_neg);
        neg[0] = c(0.0, 0.0);
        let f = AnalyticFunction::new(
            "trigonometric polynomial",
            move |z| horner(&pos, z).0 + horner(&neg, z.conj()).0,
            |_| c(0.0, 0.0),
        );
        let arc = Arc::new(rng.gen_range(0.0..TAU), 2f64.powf(-rng.gen_range(0.0..10.0)))?;
        let o = arc_oscillation(&f, &arc, &st.quadrature)?;
        let scale = o.centered.abs().max(o.double_integral.abs());
        if scale > 0.0 {
            worst = worst.max((o.centered - o.double_integral).abs() / scale);
        }
    }
    s.at_most("max relative disagreement over 100 arcs", worst, 1e-10);
    Ok(())
}

fn semigroup_law(_: &Settings, s: &mut Sheet) -> Result<()> {
    let pts = interior_points(10, 10, 0.9);
    for sg in gallery(0.5)? {
        let mut own: f64 = 0.0;
        let mut ode: f64 = 0.0;
        for &(a, b) in &[(0.1, 0.1), (0.1, 0.7), (0.7, 0.1), (0.7, 0.7)] {
            for &z in &pts {
                let lhs = sg.flow(a, sg.flow(b, z)?)?;
                own = own.max((lhs - sg.flow(a + b, z)?).norm());
                let f = |t, z| sg.flow_with_method(FlowMethod::Ode, t, z);
                ode = ode.max((f(a, f(b, z)?)? - f(a + b, z)?).norm());
            }
        }
        s.at_most(format!("{} ({:?}) residual", sg.label(), sg.method()), own, 1e-9);
        s.at_most(format!("{} ODE residual", sg.label()), ode, 1e-6);
    }
    Ok(())
}

fn generator_consistency(_: &Settings, s: &mut Sheet) -> Result<()> {
    let pts = interior_points(10, 10, 0.9);
    for sg in gallery(0.5)? {
        s.at_most(format!("{} residual", sg.label()), generator_residual(&sg, &pts, 1e-4)?, 1e-6);
    }
    let mismatched = dilation()?.with_generator(rotation(1.0)?.generator().clone());
    s.at_least("mismatched dilation/rotation residual", generator_residual(&mismatched, &pts, 1e-4)?, 0.1);
    Ok(())
}

fn thm2_lengths() -> Vec<f64> {
    (3..=10).map(|k| 0.5f64.powi(k)).collect()
}

fn sequence(e: &Evidence) -> &[f64] {
    match e {
        Evidence::Sequence { values, .. } => values,
        Evidence::Curve(_) => &[],
    }
}

fn thm2_dilation(st: &Settings, s: &mut Sheet) -> Result<()> {
    let g = dilation()?;
    let cor = corollary_bound(g.generator(), 0.25, &st.grid)?;
    s.holds("corollary bound converges", cor.verdict == Verdict::Converges);
    s.at_most("corollary empirical max", cor.floor_estimate, 2.0);
    let box_check = thm2_decay(g.generator(), &thm2_lengths(), 64, &st.quadrature, &st.thresholds)?;
    s.holds("box condition holds", box_check.condition_holds == Some(true));
    Ok(())
}

fn thm2_affine(st: &Settings, s: &mut Sheet) -> Result<()> {
    let v = thm2_decay(affine()?.generator(), &thm2_lengths(), 64, &st.quadrature, &st.thresholds)?;
    let seq = sequence(&v.evidence);
    let max = seq.iter().cloned().fold(0.0, f64::max);
    let min = seq.iter().cloned().fold(f64::INFINITY, f64::min);
    s.holds("box condition fails", v.condition_holds == Some(false));
    s.at_least("sequence min / max over k = 3..10", min / max, 0.1);
    Ok(())
}

fn thm4_quantity(st: &Settings, s: &mut Sheet) -> Result<()> {
    let radii = dyadic_radii(1..=12);
    let v = thm4_radial(dilation()?.generator(), 0.5, &radii, 64, &st.thresholds)?;
    let seq = sequence(&v.evidence);
    let i8 = radii.iter().position(|&r| r == 1.0 - 0.5f64.powi(8)).expect("radius 1 - 2^-8 is scheduled");
    s.at_most("value at r = 1 - 2^-8", seq[i8], 1e-3);
    let dev = radii
        .iter()
        .zip(seq)
        .map(|(r, v)| {
            let exact = (1.0 - r).powf(1.25) / r;
            ((v - exact) / exact).abs()
        })
        .fold(0.0, f64::max);
    s.at_most("max relative deviation from (1 - r)^{5/4}/r", dev, 1e-12);
    s.holds("verdict converges", v.verdict == Verdict::Converges);
    Ok(())
}

fn claim(_: &Settings, s: &mut Sheet) -> Result<()> {
    let lambda = 0.5;
    let f = make_f_lambda(lambda)?;
    let prof = radial_profile(&f, c(1.0, 0.0), 1.25, &claim_radii())?;
    let dev = prof.iter().map(|v| (v - 0.25).abs()).fold(0.0, f64::max);
    s.at_most("max |radial quantity - 1/4|", dev, 1e-12);
    let curve = claim_lower_bound(&f, &rotation(1.0)?, lambda, &[0.2, 0.1, 0.05])?;
    let vals = curve.values().ok_or_else(|| failed_curve(&curve.failures))?;
    s.at_least("min claim value over t", vals.iter().cloned().fold(f64::INFINITY, f64::min), 0.2375);
    Ok(())
}

fn growth_bound(st: &Settings, s: &mut Sheet) -> Result<()> {
    let lambda = 0.5;
    let f = make_f_lambda(lambda)?;
    let q: Vec<f64> = st
        .quadrature
        .radius_schedule
        .iter()
        .map(|&r| f.value_at(c(r, 0.0)).norm() * (1.0 - r).powf(0.5 * (1.0 - lambda)))
        .collect();
    let (lo, hi) = q.iter().fold((f64::INFINITY, 0.0f64), |(a, b), &v| (a.min(v), b.max(v)));
    s.at_most("f_λ growth quantity spread (max/min - 1)", hi / lo - 1.0, 0.01);
    for g in comparison_gallery(lambda)? {
        let r = growth_ratio(&g, lambda, &st.grid, &st.quadrature)?;
        s.within(format!("{} growth ratio", g.label()), r, 0.0, 10.0);
    }
    Ok(())
}

fn seminorm_equivalence(st: &Settings, s: &mut Sheet) -> Result<()> {
    for lambda in [0.3, 0.5, 0.7] {
        for g in comparison_gallery(lambda)? {
            let p = |k| seminorm(&g, k, lambda, &st.grid, &st.quadrature).map(|r| r.supremum);
            let p3 = p(SeminormKind::P3)?;
            s.within(format!("{} λ = {lambda} p1/p3", g.label()), p(SeminormKind::P1)? / p3, 0.05, 20.0);
            s.within(format!("{} λ = {lambda} p2/p3", g.label()), p(SeminormKind::P2)? / p3, 0.05, 20.0);
        }
    }
    Ok(())
}

type Check = fn(&Settings, &mut Sheet) -> Result<()>;

fn check_for(name: &str) -> Option<Check> {
    Some(match name {
        "eigenrelation" => eigenrelation,
        "norm-scaling" => norm_scaling,
        "koenigs-example" => koenigs_example,
        "thm1-probe" => thm1_probe,
        "averaging-identity" => averaging_identity,
        "semigroup-law" => semigroup_law,
        "generator-consistency" => generator_consistency,
        "thm2-dilation" => thm2_dilation,
        "thm2-affine" => thm2_affine,
        "thm4-quantity" => thm4_quantity,
        "claim" => claim,
        "growth-bound" => growth_bound,
        "seminorm-equivalence" => seminorm_equivalence,
        _ => return None,
    })
}

/// Resolves a selection; an empty selection or `all` means every criterion.
pub fn resolve_selection(selection: &[String]) -> Result<Vec<&'static str>> {
    if selection.is_empty() || selection.iter().any(|s| s == "all") {
        return Ok(CRITERIA.to_vec());
    }
    selection
        .iter()
        .map(|s| {
            CRITERIA.iter().copied().find(|c| c == s).ok_or_else(|| LabError::UnknownLabel {
                label: s.clone(),
                known: CRITERIA.join(", "),
            })
        })
        .collect()
}

/// Runs one criterion. Numerical errors are recorded as a failure.
pub fn run_criterion(name: &str, settings: &Settings) -> Result<CriterionResult> {
    let check = check_for(name).ok_or_else(|| LabError::UnknownLabel {
        label: name.to_string(),
        known: CRITERIA.join(", "),
    })?;
    let mut sheet = Sheet::new();
    let start = Instant::now();
    let outcome = check(settings, &mut sheet);
    let runtime_s = start.elapsed().as_secs_f64();
    let runtime_budget_s = budget(name);
    let error = outcome.err().map(|e| e.to_string());
    let passed = error.is_none() && !sheet.0.is_empty() && sheet.0.iter().all(|m| m.ok) && runtime_s < runtime_budget_s;
    Ok(CriterionResult {
        name: name.to_string(),
        description: description(name).to_string(),
        passed,
        measurements: sheet.0,
        runtime_s,
        runtime_budget_s,
        error,
    })
}

/// Runs the selected criteria in order, calling `on_result` after each one.
pub fn verify_suite_with(
    selection: &[String],
    settings: &Settings,
    mut on_result: impl FnMut(&CriterionResult),
) -> Result<VerifyReport> {
    let names = resolve_selection(selection)?;
    let mut criteria = Vec::with_capacity(names.len());
    for name in names {
        let r = run_criterion(name, settings)?;
        on_result(&r);
        criteria.push(r);
    }
    let n_passed = criteria.iter().filter(|c| c.passed).count();
    Ok(VerifyReport {
        passed: n_passed == criteria.len(),
        n_passed,
        n_total: criteria.len(),
        criteria,
    })
}

pub fn verify_suite(selection: &[String], settings: &Settings) -> Result<VerifyReport> {
    verify_suite_with(selection, settings, |_| {})
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn selection_resolution() {
        assert_eq!(resolve_selection(&[]).unwrap().len(), CRITERIA.len());
        assert_eq!(resolve_selection(&["all".into()]).unwrap().len(), CRITERIA.len());
        assert_eq!(resolve_selection(&["claim".into()]).unwrap(), vec!["claim"]);
        assert!(matches!(
            resolve_selection(&["nope".into()]),
            Err(LabError::UnknownLabel { .. })
        ));
        for name in CRITERIA {
            assert!(check_for(name).is_some());
            assert!(!description(name).is_empty());
        }
    }

    #[test]
    fn quick_criteria_pass() {
        let rep = verify_suite(
            &["eigenrelation".into(), "thm2-dilation".into(), "thm4-quantity".into()],
            &Settings::default(),
        )
        .unwrap();
        assert!(rep.passed, "{rep:#?}");
        assert_eq!(rep.n_total, 3);
    }
}
