use num_rational::BigRational;
use proptest::prelude::*;

use finfree::analytic::{alpha, cauchy, log_potential, saddle, tilted_r};
use finfree::convolution::{boxplus, superadditivity_report};
use finfree::oracles::{bell_numbers, enumerate_partitions, finite_diff, quad_laplace};
use finfree::transforms::{
    fff, fff_linearization_check, finite_R, finite_cumulants_logseries, finite_r_series, ln_fff,
};
use finfree::{ExactPoly, FloatPoly, ReferenceMeasure};

fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

fn rational() -> impl Strategy<Value = BigRational> + Clone {
    (-12i64..=12, 1i64..=4).prop_map(|(n, d)| q(n, d))
}

fn negative_rational() -> impl Strategy<Value = BigRational> + Clone {
    (1i64..=16, 1i64..=4).prop_map(|(n, d)| q(-n, d))
}

fn exact_triple(max_n: usize) -> impl Strategy<Value = (ExactPoly, ExactPoly, ExactPoly)> {
    (1..=max_n).prop_flat_map(|n| {
        let roots = prop::collection::vec(rational(), n);
        (roots.clone(), roots.clone(), roots).prop_map(|(a, b, c)| {
            (
                ExactPoly::from_roots(a).unwrap(),
                ExactPoly::from_roots(b).unwrap(),
                ExactPoly::from_roots(c).unwrap(),
            )
        })
    })
}

fn negative_pair(max_n: usize) -> impl Strategy<Value = (ExactPoly, ExactPoly)> {
    (1..=max_n).prop_flat_map(|n| {
        let roots = prop::collection::vec(negative_rational(), n);
        (roots.clone(), roots).prop_map(|(a, b)| {
            (ExactPoly::from_roots(a).unwrap(), ExactPoly::from_roots(b).unwrap())
        })
    })
}

fn negative_float_poly(max_n: usize) -> impl Strategy<Value = FloatPoly> {
    prop::collection::vec(0.05f64..6.0, 1..=max_n)
        .prop_map(|l| FloatPoly::from_roots(l.into_iter().map(|x| -x).collect()).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn convolution_is_commutative_and_associative((p, r, t) in exact_triple(6)) {
        prop_assert_eq!(boxplus(&p, &r).unwrap(), boxplus(&r, &p).unwrap());
        let left = boxplus(&boxplus(&p, &r).unwrap(), &t).unwrap();
        let right = boxplus(&p, &boxplus(&r, &t).unwrap()).unwrap();
        prop_assert_eq!(left, right);
    }

    #[test]
    fn convolving_with_a_point_mass_shifts((p, _, _) in exact_triple(7), a in rational()) {
        let point = ExactPoly::power_of_linear(a.clone(), p.degree()).unwrap();
        let shifted = p.shift(&a);
        let conv = boxplus(&p, &point).unwrap();
        prop_assert_eq!(conv.etilde(), shifted.etilde());
    }

    #[test]
    fn cumulants_linearize((p, r, _) in exact_triple(8)) {
        let sum = boxplus(&p, &r).unwrap();
        let (kp, kr, ks) = (
            finite_cumulants_logseries(&p),
            finite_cumulants_logseries(&r),
            finite_cumulants_logseries(&sum),
        );
        for i in 0..p.degree() {
            prop_assert_eq!(ks.kappa()[i].clone(), kp.kappa()[i].clone() + kr.kappa()[i].clone());
        }
        prop_assert!(fff_linearization_check(&p, &r).unwrap());
    }

    #[test]
    fn fff_is_multiplicative_mod_degree((p, r, _) in exact_triple(7)) {
        let n = p.degree();
        let prod = fff(&p).poly_mul(&fff(&r)).truncate(n);
        prop_assert_eq!(prod, fff(&boxplus(&p, &r).unwrap()));
    }

    #[test]
    fn r_series_is_the_cumulant_sequence((p, _, _) in exact_triple(7)) {
        let k = finite_cumulants_logseries(&p);
        let series = finite_r_series(&p);
        prop_assert_eq!(series.coeffs(), k.kappa());
    }

    #[test]
    fn superadditivity_identity_is_exact((p, r) in negative_pair(6), num in 1i64..=12) {
        let s = q(num, 6);
        let rep = superadditivity_report(&p, &r, &s).unwrap();
        prop_assert!(rep.gap >= q(0, 1));
        prop_assert_eq!(&rep.gap, &rep.correction);
        prop_assert!(rep.one_minus_g > q(0, 1) && rep.one_minus_g < q(1, 1));
    }

    #[test]
    fn tilted_expectation_matches_exactly((p, _) in negative_pair(7), num in 1i64..=20) {
        let s = q(num, 7);
        prop_assert_eq!(tilted_r(&p, &s).unwrap(), finite_R(&p, &s).unwrap());
    }

    #[test]
    fn finite_r_sits_above_voiculescu_r_up_to_the_envelope(
        p in negative_float_poly(40),
        frac in 0.05f64..0.95,
    ) {
        let s = frac * alpha(&p).unwrap();
        let ctx = saddle(&p, s).unwrap();
        prop_assert!((ctx.cauchy(ctx.x_s()) - s).abs() <= 1e-12 * s);
        let cert = ctx.certify_r_sandwich().unwrap();
        prop_assert!(cert.holds, "{:?}", cert);
    }

    #[test]
    fn psi_is_nonpositive(p in negative_float_poly(20), frac in 0.05f64..0.95, x in 0.0f64..50.0) {
        let ctx = saddle(&p, frac * alpha(&p).unwrap()).unwrap();
        prop_assert!(ctx.psi(x).unwrap() <= 1e-15);
    }

    #[test]
    fn kernel_inequalities_hold(p in negative_float_poly(30), frac in 0.05f64..0.95) {
        let ctx = saddle(&p, frac * alpha(&p).unwrap()).unwrap();
        let grid = ctx.default_grid(33);
        let cert = ctx.certify_kernel_inequalities(&grid).unwrap();
        prop_assert!(cert.holds && cert.slack > 0.0, "{:?}", cert);
    }

    #[test]
    fn quadrature_matches_closed_form_laplace(p in negative_float_poly(30), s in 0.1f64..2.0) {
        let n = p.degree();
        let ln_fact: f64 = (1..=n).map(|k| (k as f64).ln()).sum();
        let closed = ln_fff(&p, &s).unwrap() + ln_fact - (n as f64 + 1.0) * s.ln();
        let quad = quad_laplace(&p, s, 1).unwrap();
        prop_assert!((closed - quad.ln_value).abs() < 1e-8);
    }
}

#[test]
fn partition_counts_are_bell_numbers() {
    let bell = bell_numbers(12);
    for (n, want) in bell.iter().enumerate().skip(1) {
        let parts: Vec<_> = enumerate_partitions(n).unwrap().collect();
        assert_eq!(parts.len() as u64, *want);
        if n >= 2 {
            assert_eq!(parts.iter().map(|p| p.mobius).sum::<i64>(), 0);
        }
    }
}

#[test]
fn finite_differences_are_second_order() {
    let p = FloatPoly::from_roots(vec![-0.5, -1.0, -2.5, -4.0]).unwrap();
    let x = 0.8;
    let g = cauchy(&p, x).unwrap();
    let e1 = (finite_diff(|y| log_potential(&p, y).unwrap(), x, 1e-2) - g).abs();
    let e2 = (finite_diff(|y| log_potential(&p, y).unwrap(), x, 1e-3) - g).abs();
    let ratio = e1 / e2;
    assert!((80.0..120.0).contains(&ratio), "ratio {ratio}");

    let ctx = saddle(&p, 0.3).unwrap();
    let dg = finite_diff(|y| cauchy(&p, y).unwrap(), ctx.x_s(), 1e-5);
    assert!((dg + ctx.sigma2()).abs() < 1e-8);
}

#[test]
fn float_convolution_tracks_exact() {
    let roots_p = [-1.0, -0.25, -3.5, -2.0, -0.75];
    let roots_q = [-0.5, -1.5, -4.0, -2.25, -1.0];
    let exact = boxplus(
        &ExactPoly::from_roots(roots_p.iter().map(|&r| q((r * 4.0) as i64, 4)).collect()).unwrap(),
        &ExactPoly::from_roots(roots_q.iter().map(|&r| q((r * 4.0) as i64, 4)).collect()).unwrap(),
    )
    .unwrap();
    let float = boxplus(
        &FloatPoly::from_roots(roots_p.to_vec()).unwrap(),
        &FloatPoly::from_roots(roots_q.to_vec()).unwrap(),
    )
    .unwrap();
    for (e, f) in exact.etilde().iter().zip(float.etilde()) {
        let e = finfree::Scalar::to_f64_lossy(e);
        assert!((e - f).abs() <= 1e-12 * e.abs());
    }
}

#[test]
fn discretizations_converge_in_cauchy_transform() {
    for spec in ["uniform:-2:-1", "semicircle:-3:1", "atomic:-1@0.3,-2@0.7"] {
        let mu: ReferenceMeasure = spec.parse().unwrap();
        let x = 0.7;
        let target = mu.cauchy(x).unwrap();
        let errs: Vec<f64> = [8, 32, 128]
            .iter()
            .map(|&n| (cauchy(&mu.quantile_poly(n).unwrap(), x).unwrap() - target).abs())
            .collect();
        assert!(errs[2] <= errs[0], "{spec}: {errs:?}");
        assert!(errs[2] < 1e-3, "{spec}: {errs:?}");
    }
}
