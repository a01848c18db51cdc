use aqrm_core::bethe::{exceptional_cal_e, solve_bethe_newton, to_gaudin};
use aqrm_core::constraint::{constraint_poly_coeffs, q_sequence, qp_proportionality_residual};
use aqrm_core::model::{regular_spectrum_with, DiagConfig};
use aqrm_core::poly::matched_distance;
use aqrm_core::potentials::{
    full_energy, full_potential, full_potential_on_segment, gaudin_potential, qes_potential,
    qes_product,
};
use aqrm_core::{qes_energy, qes_points, solve_bethe, Branch, Form, ModelParams, QesPoint};
use num_complex::Complex64;
use proptest::prelude::*;

fn branch() -> impl Strategy<Value = Branch> {
    prop_oneof![Just(Branch::Plus), Just(Branch::Minus)]
}

/// Δ, ε and ω with 2ε/ω kept away from integers.
fn model() -> impl Strategy<Value = (f64, f64, f64)> {
    (0.3f64..2.0, -0.45f64..0.45, 0.6f64..1.6).prop_map(|(d, r, w)| (d, r * w, w))
}

fn points(delta: f64, epsilon: f64, omega: f64, n_max: usize) -> Vec<QesPoint> {
    let mut out = Vec::new();
    for b in Branch::BOTH {
        for n in 1..=n_max {
            out.extend(qes_points(delta, epsilon, omega, n, b).unwrap().points);
        }
    }
    out
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1.0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn spectrum_is_invariant_under_bias_reflection(delta in 0.0f64..2.0, eps in -1.0f64..1.0, g in 0.0f64..1.0) {
        let cfg = DiagConfig { margin: 30, tolerance: 1e-9, max_doublings: 2 };
        let p = ModelParams::new(delta, eps, 1.0, g).unwrap();
        let a = regular_spectrum_with(&p, 8, 60, &cfg).unwrap().values();
        let b = regular_spectrum_with(&p.with_epsilon(-eps), 8, 60, &cfg).unwrap().values();
        for (x, y) in a.iter().zip(&b) {
            prop_assert!((x - y).abs() < 1e-8, "{x} vs {y}");
        }
    }
}

proptest! {
    #[test]
    fn constraint_polynomial_has_exact_degree(n in 1usize..=10, y in 0.0f64..4.0, (_, eps, w) in model()) {
        let c = constraint_poly_coeffs(n, y, eps, w).unwrap();
        prop_assert_eq!(c.len(), n + 1);
        prop_assert!(c[n] != 0.0);
    }

    #[test]
    fn symmetric_model_branches_share_points(delta in 0.2f64..2.0, w in 0.6f64..1.6, n in 1usize..=6) {
        let plus = qes_points(delta, 0.0, w, n, Branch::Plus).unwrap().points;
        let minus = qes_points(delta, 0.0, w, n, Branch::Minus).unwrap().points;
        let gp: Vec<f64> = plus.iter().map(|p| p.g).collect();
        let gm: Vec<f64> = minus.iter().map(|p| p.g).collect();
        prop_assert_eq!(gp, gm);
    }

    #[test]
    fn q_recurrence_is_proportional_to_constraint(
        (delta, eps, w) in model(), g in 0.0f64..1.0, n in 1usize..=8, b in branch(),
    ) {
        let p = ModelParams::new(delta, eps, w, g).unwrap();
        prop_assert!(qp_proportionality_residual(n, &p, b).unwrap() < 1e-10);
    }

    #[test]
    fn q_sequence_truncates_at_exceptional_points((delta, eps, w) in model()) {
        for pt in points(delta, eps, w, 4) {
            let p = pt.params(delta, eps, w);
            let q = q_sequence(pt.n, &p, pt.branch).unwrap();
            prop_assert!(q.truncation_coefficient().abs() < 1e-8, "n = {}: {}", pt.n, q.truncation_coefficient());
        }
    }

    #[test]
    fn bethe_roots_are_consistent((delta, eps, w) in model()) {
        for pt in points(delta, eps, w, 4) {
            let p = pt.params(delta, eps, w);
            let roots = solve_bethe(&p, pt.n, pt.branch).unwrap();
            let z = &roots.roots;
            // Conjugate closure.
            let conj: Vec<Complex64> = z.iter().map(|c| c.conj()).collect();
            prop_assert!(matched_distance(z, &conj) < 1e-8);
            // Newton route seeded off the polynomial route lands on the same set.
            let newton = solve_bethe_newton(&p, pt.n, pt.branch, z).unwrap();
            prop_assert!(matched_distance(z, &newton) < 1e-8);
            // Energy from the Gaudin parameters.
            let gp = to_gaudin(&roots).unwrap();
            prop_assert!(rel(gp.cal_e, exceptional_cal_e(&p, pt.n)) < 1e-8);
        }
    }

    #[test]
    fn bethe_branches_mirror_under_bias_reflection((delta, eps, w) in model()) {
        for pt in qes_points(delta, eps, w, 3, Branch::Plus).unwrap().points {
            let p = pt.params(delta, eps, w);
            let plus = solve_bethe(&p, pt.n, Branch::Plus).unwrap().roots;
            let minus = solve_bethe(&p.with_epsilon(-eps), pt.n, Branch::Minus).unwrap().roots;
            let negated: Vec<Complex64> = minus.iter().map(|z| -z).collect();
            prop_assert!(matched_distance(&plus, &negated) < 1e-8);
        }
    }

    #[test]
    fn potential_forms_agree(
        (delta, eps, w) in model(), g in 0.05f64..1.0, n in 1usize..=6, e in -3.0f64..6.0,
        x in 0.2f64..8.0, b in branch(),
    ) {
        let p = ModelParams::new(delta, eps, w, g).unwrap();
        let pf = qes_potential(&p, n, b, x, Form::PartialFraction).unwrap();
        let hy = qes_potential(&p, n, b, x, Form::Hyperbolic).unwrap();
        prop_assert!(rel(pf, hy) < 1e-11, "qes {pf} vs {hy}");
        let pf = full_potential(&p, e, b, x, Form::PartialFraction).unwrap();
        let hy = full_potential(&p, e, b, x, Form::Hyperbolic).unwrap();
        prop_assert!(rel(pf, hy) < 1e-11, "full {pf} vs {hy}");
    }

    #[test]
    fn potentials_are_even(
        (delta, eps, w) in model(), g in 0.05f64..1.0, n in 1usize..=6, e in -3.0f64..6.0,
        x in 0.2f64..8.0, b in branch(),
    ) {
        let p = ModelParams::new(delta, eps, w, g).unwrap();
        for form in [Form::PartialFraction, Form::Hyperbolic] {
            prop_assert_eq!(qes_potential(&p, n, b, x, form).unwrap(), qes_potential(&p, n, b, -x, form).unwrap());
            prop_assert_eq!(full_potential(&p, e, b, x, form).unwrap(), full_potential(&p, e, b, -x, form).unwrap());
        }
    }

    #[test]
    fn branch_potentials_mirror_under_bias_reflection(
        (delta, eps, w) in model(), g in 0.05f64..1.0, e in -3.0f64..6.0, theta in 0.05f64..3.09,
    ) {
        // Reflecting ε swaps the branches together with cosh x -> -cosh x,
        // which on the segment x = iθ is θ -> π - θ.
        let p = ModelParams::new(delta, eps, w, g).unwrap();
        let q = p.with_epsilon(-eps);
        let a = full_potential_on_segment(&p, e, Branch::Plus, theta);
        let b = full_potential_on_segment(&q, e, Branch::Minus, std::f64::consts::PI - theta);
        prop_assert!(rel(a, b) < 1e-10, "{a} vs {b}");
    }

    #[test]
    fn full_potential_reduces_at_exceptional_points((delta, eps, w) in model(), x in 0.2f64..6.0) {
        for pt in points(delta, eps, w, 4) {
            let p = pt.params(delta, eps, w);
            let e = qes_energy(&p, pt.n, pt.branch);
            let full = full_potential(&p, e, pt.branch, x, Form::PartialFraction).unwrap();
            let qes = qes_potential(&p, pt.n, pt.branch, x, Form::PartialFraction).unwrap();
            prop_assert!(rel(full, qes) < 1e-12, "{full} vs {qes}");
            prop_assert!(rel(full_energy(&p, e, pt.branch), exceptional_cal_e(&p, pt.n)) < 1e-12);
            let gp = to_gaudin(&solve_bethe(&p, pt.n, pt.branch).unwrap()).unwrap();
            let gaudin = gaudin_potential(&gp, x).unwrap();
            prop_assert!(rel(gaudin, qes) < 1e-12, "gaudin {gaudin} vs {qes}");
        }
    }

    #[test]
    fn wavefunctions_are_even((delta, eps, w) in model(), x in 0.2f64..4.0) {
        for pt in points(delta, eps, w, 3) {
            let p = pt.params(delta, eps, w);
            let v: Vec<Complex64> = solve_bethe(&p, pt.n, pt.branch).unwrap().roots.iter().map(|z| -z).collect();
            let psi = qes_product(&p, pt.n, pt.branch, &v);
            let (a, b) = (psi.value(x).unwrap(), psi.value(-x).unwrap());
            prop_assert!(rel(a, b) < 1e-12 * a.abs().max(1.0), "{a} vs {b}");
        }
    }
}
