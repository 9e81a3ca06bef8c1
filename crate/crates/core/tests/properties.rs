use morrey_core::disc::GridSpec;
use morrey_core::function::{from_power_series, make_f_lambda};
use morrey_core::probe::{
    claim_lower_bound, classify_membership, consistent_with_membership, default_t_schedule, thm2_decay, Verdict,
};
use morrey_core::quadrature::QuadratureConfig;
use morrey_core::semigroup::{dilation, gallery, rotation};
use morrey_core::seminorms::{SeminormKind, Thresholds};
use num_complex::Complex64;
use proptest::prelude::*;

#[test]
fn box_condition_implies_f_lambda_stays_away() {
    let cfg = QuadratureConfig::default();
    let grid = GridSpec::default();
    let th = Thresholds::default();
    let lengths: Vec<f64> = (3..=10).map(|k| 0.5f64.powi(k)).collect();
    let f = make_f_lambda(0.5).unwrap();
    for sg in [dilation().unwrap(), rotation(1.0).unwrap()] {
        let cond = thm2_decay(sg.generator(), &lengths, 64, &cfg, &th).unwrap();
        assert_eq!(cond.verdict, Verdict::Converges, "{}", sg.label());
        let member = classify_membership(&f, &sg, 0.5, SeminormKind::P2, None, &grid, &cfg, &th).unwrap();
        assert_eq!(member.verdict, Verdict::BoundedAway, "{}", sg.label());
        assert!(member.floor_estimate > 0.0);
        assert!(consistent_with_membership(&cond, &member));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn polynomials_converge(coeffs in prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), 2..=5), which in 0usize..4) {
        prop_assume!(coeffs[1..].iter().any(|&(a, b)| a.abs() + b.abs() > 0.05));
        let cs: Vec<Complex64> = coeffs.iter().map(|&(a, b)| Complex64::new(a, b)).collect();
        let f = from_power_series(&cs).unwrap();
        let sg = gallery(0.5).unwrap().swap_remove(which);
        let grid = GridSpec::dyadic(0..=6, 16, 0..=8, 16);
        let v = classify_membership(&f, &sg, 0.5, SeminormKind::P2, None, &grid, &QuadratureConfig::default(), &Thresholds::default()).unwrap();
        prop_assert_eq!(v.verdict, Verdict::Converges, "{}", sg.label());
    }

    #[test]
    fn claim_stays_above_half_gap(lambda in 0.1..0.9f64) {
        let f = make_f_lambda(lambda).unwrap();
        let curve = claim_lower_bound(&f, &rotation(1.0).unwrap(), lambda, &default_t_schedule()).unwrap();
        for v in curve.values().unwrap() {
            prop_assert!(v >= 0.5 * (1.0 - lambda) - 0.05, "λ = {}: {}", lambda, v);
        }
    }
}
