use core::f64::consts::PI;

use num_complex::Complex64;
use pdcnot_core::hilbert::{overlap2, LabeledState, LinearOperator, Probability, Subsystem};
use pdcnot_core::metrics::{purified_fidelity, SourceFidelity};
use pdcnot_core::routing::{hadamard_operator, mw_hadamard_operator, um_operator, us_operator};
use pdcnot_core::scattering::{cpf_apply, cpf_operator, reflection, CavityEmitterParams, ReflectionPair, SpinBranch};
use proptest::prelude::*;

fn amps(n: usize) -> impl Strategy<Value = Vec<Complex64>> {
    prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), n)
        .prop_filter("nonzero", |v| v.iter().any(|(a, b)| a.abs() + b.abs() > 1e-3))
        .prop_map(|v| v.into_iter().map(|(a, b)| Complex64::new(a, b)).collect())
}

fn state(labels: &[(&str, usize)], a: Vec<Complex64>) -> LabeledState {
    let subs = labels.iter().map(|(n, d)| Subsystem::new(*n, *d).unwrap()).collect();
    LabeledState::new(subs, a).unwrap().normalized().unwrap()
}

fn phase_unitary(label: &str, theta: f64, phi: f64) -> LinearOperator {
    let (s, c) = theta.sin_cos();
    let e = Complex64::from_polar(1.0, phi);
    LinearOperator::unitary(
        vec![Subsystem::new(label, 2).unwrap()],
        vec![c.into(), -e.conj() * s, e * s, c.into()],
    )
    .unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn unitaries_preserve_norm(a in amps(16), theta in 0.0..PI, phi in 0.0..2.0 * PI) {
        let s = state(&[("p", 2), ("t", 4), ("x", 2)], a);
        for op in [
            phase_unitary("x", theta, phi),
            us_operator("p", "x").unwrap(),
            um_operator("t").unwrap(),
            mw_hadamard_operator("t").unwrap(),
            hadamard_operator("p").unwrap(),
        ] {
            prop_assert!((s.apply(&op).unwrap().norm_sqr() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn projections_are_complete(a in amps(12)) {
        let s = state(&[("a", 3), ("b", 4)], a);
        for label in ["a", "b"] {
            let d = s.dim_of(label).unwrap();
            let total: f64 = (0..d).map(|i| s.project(label, i, Probability::Absolute).unwrap().0).sum();
            prop_assert!((total - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn local_operators_commute_with_tensor(a in amps(2), b in amps(4), theta in 0.0..PI, phi in 0.0..2.0 * PI) {
        let x = state(&[("x", 2)], a);
        let y = state(&[("y", 4)], b);
        let u = phase_unitary("x", theta, phi);
        let lhs = x.tensor(&y).unwrap().apply(&u).unwrap();
        let rhs = x.apply(&u).unwrap().tensor(&y).unwrap();
        prop_assert!((lhs.inner(&rhs).unwrap().re - 1.0).abs() < 1e-12);
    }

    #[test]
    fn overlap_ignores_register_order(a in amps(8), b in amps(8)) {
        let s = state(&[("a", 2), ("b", 4)], a);
        let t = state(&[("a", 2), ("b", 4)], b);
        let t_swapped = t.permuted(&["b", "a"]).unwrap();
        let o = overlap2(&s, &t).unwrap();
        prop_assert!((o - overlap2(&s, &t_swapped).unwrap()).abs() < 1e-12);
        prop_assert!((o - overlap2(&t_swapped, &s).unwrap()).abs() < 1e-12);
        prop_assert!((-1e-12..=1.0 + 1e-12).contains(&o));
    }

    #[test]
    fn cpf_commutes_with_other_registers(a in amps(8), theta in 0.0..PI, phi in 0.0..2.0 * PI,
                                         c in 0.0..300.0f64, d in 50.0..150.0f64) {
        let s = state(&[("pol", 2), ("spin", 2), ("other", 2)], a);
        let r = CavityEmitterParams::new(0.0, d, 1.0, c).unwrap().reflections();
        let u = phase_unitary("other", theta, phi);
        let lhs = cpf_apply(&s.apply(&u).unwrap(), "pol", "spin", r).unwrap();
        let rhs = cpf_apply(&s, "pol", "spin", r).unwrap().apply(&u).unwrap();
        let diff: f64 = lhs.amplitudes().iter().zip(rhs.amplitudes()).map(|(x, y)| (x - y).norm_sqr()).sum();
        prop_assert!(diff < 1e-24);
    }

    #[test]
    fn reflection_is_passive_and_continuous(d in -200.0..200.0f64, dc in -3.0..3.0f64, c in 0.0..500.0f64) {
        let p = CavityEmitterParams::new(d, d, dc, c).unwrap();
        let r = reflection(&p, SpinBranch::Up);
        prop_assert!(r.norm() <= 1.0 + 1e-12);
        // the derivative in Δ is bounded by 2|∂(1/denominator)|-type terms; a
        // symmetric finite difference must stay finite and match both one-sided ones
        let h = 1e-6;
        let at = |x: f64| reflection(&CavityEmitterParams::new(x, x, dc, c).unwrap(), SpinBranch::Up);
        let fwd = (at(d + h) - r) / h;
        let bwd = (r - at(d - h)) / h;
        prop_assert!((fwd - bwd).norm() < 1e-3 * (1.0 + fwd.norm()));
    }

    #[test]
    fn purification_improves_good_sources(f in 0.5001..0.9999f64) {
        let g = purified_fidelity(SourceFidelity::new(f).unwrap());
        prop_assert!(g > f);
        let g2 = purified_fidelity(SourceFidelity::new(f + 1e-4).unwrap());
        prop_assert!(g2 > g);
    }
}

#[test]
fn cpf_is_unitary_only_for_unit_reflections() {
    assert!(cpf_operator("p", "s", ReflectionPair::IDEAL).unwrap().is_unitary());
    let lossy = CavityEmitterParams::new(0.0, 100.0, 1.5, 150.0).unwrap().reflections();
    assert!(!cpf_operator("p", "s", lossy).unwrap().is_unitary());
}
