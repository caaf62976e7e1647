use num_rational::BigRational;
use proptest::prelude::*;

use lambdalin::harness::{generate_term, normal_form_shape_ok, GenConfig};
use lambdalin::parser::{parse_term, print_term};
use lambdalin::rewrite::Rewriter;
use lambdalin::scalar::{RationalScalar, Scalar, ScalarRing};
use lambdalin::term::{Term, VarName};

fn rational() -> impl Strategy<Value = BigRational> {
    (-12i64..=12, 1i64..=6).prop_map(|(n, d)| BigRational::new(n.into(), d.into()))
}

fn scalar() -> impl Strategy<Value = Scalar> {
    (rational(), rational(), rational(), rational())
        .prop_map(|(a, b, c, d)| Scalar::new(a, b, c, d))
}

fn rational_scalar() -> impl Strategy<Value = RationalScalar> {
    rational().prop_map(RationalScalar)
}

fn close(a: num_complex::Complex64, b: num_complex::Complex64) -> bool {
    (a - b).norm() < 1e-9 * (1.0 + a.norm())
}

fn term(closed_only: bool) -> impl Strategy<Value = Term> {
    (any::<u64>(), 1u32..=6).prop_map(move |(seed, max_depth)| {
        generate_term(&GenConfig {
            max_depth,
            closed_only,
            seed,
            ..GenConfig::default()
        })
    })
}

proptest! {
    #[test]
    fn scalar_field_laws(a in scalar(), b in scalar(), c in scalar()) {
        prop_assert_eq!(a.add(&b), b.add(&a));
        prop_assert_eq!(a.mul(&b), b.mul(&a));
        prop_assert_eq!(a.add(&b).add(&c), a.add(&b.add(&c)));
        prop_assert_eq!(a.mul(&b).mul(&c), a.mul(&b.mul(&c)));
        prop_assert_eq!(a.mul(&b.add(&c)), a.mul(&b).add(&a.mul(&c)));
        prop_assert_eq!(a.add(&Scalar::zero()), a.clone());
        prop_assert_eq!(a.mul(&Scalar::one()), a.clone());
        prop_assert!(a.add(&a.neg()).is_zero());
        match a.inv() {
            Some(inv) => prop_assert!(a.mul(&inv).is_one()),
            None => prop_assert!(a.is_zero()),
        }
    }

    #[test]
    fn scalar_evaluation_is_a_homomorphism(a in scalar(), b in scalar()) {
        prop_assert!(close(a.add(&b).to_complex(), a.to_complex() + b.to_complex()));
        prop_assert!(close(a.mul(&b).to_complex(), a.to_complex() * b.to_complex()));
        if let Some(inv) = a.inv() {
            prop_assert!(close(inv.to_complex() * a.to_complex(), num_complex::Complex64::new(1.0, 0.0)));
        }
    }

    #[test]
    fn scalars_print_and_parse_back(a in scalar()) {
        prop_assert_eq!(Scalar::parse(&a.to_string()).unwrap(), a);
    }

    #[test]
    fn rational_scalar_field_laws(a in rational_scalar(), b in rational_scalar(), c in rational_scalar()) {
        prop_assert_eq!(a.add(&b), b.add(&a));
        prop_assert_eq!(a.mul(&b).mul(&c), a.mul(&b.mul(&c)));
        prop_assert_eq!(a.mul(&b.add(&c)), a.mul(&b).add(&a.mul(&c)));
        prop_assert!(a.add(&a.neg()).is_zero());
        match a.inv() {
            Some(inv) => prop_assert!(a.mul(&inv).is_one()),
            None => prop_assert!(a.is_zero()),
        }
        prop_assert_eq!(RationalScalar::parse(&a.to_string()).unwrap(), a);
    }

    #[test]
    fn shifting_up_then_down_is_identity(t in term(false), cutoff in 0u32..3) {
        prop_assert_eq!(t.shifted(1, cutoff).shifted(-1, cutoff), t);
    }

    #[test]
    fn substituting_an_absent_name_is_identity(t in term(false), b in term(true)) {
        let z = VarName::new("z").unwrap();
        prop_assert_eq!(t.substitute(&z, &b), t);
    }

    #[test]
    fn substitution_removes_the_name(t in term(false), b in term(true)) {
        let a = VarName::new("a").unwrap();
        let out = t.substitute(&a, &b);
        prop_assert!(!out.free_vars().contains(&a));
        let mut expected = t.free_vars();
        expected.remove(&a);
        prop_assert_eq!(out.free_vars(), expected);
    }

    #[test]
    fn sums_are_commutative_and_associative(a in term(false), b in term(false), c in term(false)) {
        prop_assert_eq!(a.clone().plus(b.clone()), b.clone().plus(a.clone()));
        prop_assert_eq!(a.clone().plus(b.clone()).plus(c.clone()), a.plus(b.plus(c)));
    }

    #[test]
    fn normality_flag_agrees_with_enumeration(t in term(false)) {
        let rw = Rewriter::new();
        prop_assert_eq!(t.is_normal(), rw.enumerate_redexes(&t).is_empty());
        prop_assert_eq!(rw.is_normal(&t), t.is_normal());
    }

    #[test]
    fn every_enumerated_redex_applies(t in term(false)) {
        let rw = Rewriter::new();
        for r in rw.enumerate_redexes(&t) {
            prop_assert!(rw.apply_redex(&t, &r).is_ok(), "{:?}", r);
        }
    }

    #[test]
    fn printing_round_trips(t in term(false)) {
        let printed = print_term(&t);
        let back = parse_term(&printed);
        prop_assert!(back.is_ok(), "{} does not parse: {:?}", printed, back);
        prop_assert_eq!(back.unwrap(), t);
    }

    #[test]
    fn closed_normal_forms_have_the_expected_shape(t in term(true)) {
        let out = Rewriter::new().normalize(&t, 10_000);
        if out.is_normal() {
            prop_assert!(normal_form_shape_ok(&out.term), "{}", print_term(&out.term));
        }
    }

    #[test]
    fn deterministic_and_random_strategies_agree(t in term(true), seed in any::<u64>()) {
        use lambdalin::rewrite::Strategy;
        let rw = Rewriter::new();
        let a = rw.normalize_with_strategy(&t, 10_000, Strategy::Deterministic);
        let b = rw.normalize_with_strategy(&t, 10_000, Strategy::RandomSeeded(seed));
        if a.is_normal() && b.is_normal() {
            prop_assert_eq!(a.term, b.term);
        }
    }
}
