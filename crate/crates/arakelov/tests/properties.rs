//! Randomized invariants for the exact paths.

use arakelov::fiber::{self, FiberParams};
use arakelov::heights::{self, ErrMode, Ledger};
use arakelov::rat::{self, Q};
use num_bigint::BigInt;
use proptest::prelude::*;

fn small_prime() -> impl Strategy<Value = u64> {
    prop::sample::select(rat::primes_in(19, 97))
}

fn rational() -> impl Strategy<Value = Q> {
    (-200i64..200, 1i64..40).prop_map(|(n, d)| Q::new(BigInt::from(n), BigInt::from(d)))
}

fn nonneg_rational() -> impl Strategy<Value = Q> {
    (0i64..400, 1i64..40).prop_map(|(n, d)| Q::new(BigInt::from(n), BigInt::from(d)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn closed_form_equals_solver(p in small_prime(), e in 1u32..5, pick in 0usize..1000) {
        let f = fiber::build_special_fiber(FiberParams::new(p, e, 1).unwrap()).unwrap();
        let target = f.component_at(pick % f.component_count());
        let solved = fiber::solve_vertical_divisor(&f, target).unwrap();
        let closed = fiber::closed_form_phi(&f, target).unwrap();
        prop_assert_eq!(solved, closed);
    }

    #[test]
    fn fricke_is_an_involution_on_anything(
        p in small_prime(),
        e in 1u32..4,
        seeds in prop::collection::vec(-20i64..20, 1..40),
    ) {
        let f = fiber::build_special_fiber(FiberParams::new(p, e, 1).unwrap()).unwrap();
        let n = f.component_count();
        let coeffs: Vec<Q> = (0..n)
            .map(|i| Q::new(BigInt::from(seeds[i % seeds.len()]), BigInt::from(3)))
            .collect();
        let div = fiber::VerticalDivisor::from_coeffs(&f, coeffs).unwrap();
        let once = fiber::fricke_involution(&f, &div, None).unwrap();
        let twice = fiber::fricke_involution(&f, &once, None).unwrap();
        prop_assert_eq!(twice.coeffs(), div.coeffs());
    }

    #[test]
    fn bezout_swap_symmetry(
        p in small_prime(),
        dims in (0u32..2, 0u32..2),
        degv in nonneg_rational(),
        degw in nonneg_rational(),
        hv in nonneg_rational(),
        hw in nonneg_rational(),
    ) {
        let ledger = Ledger::default();
        let (dv, dw) = dims;
        prop_assume!((dv + dw) as u64 <= fiber::genus(p).unwrap());
        let a = heights::bezout_bound(p, dv, dw, &degv, &degw, &hv, &hw, &ledger, ErrMode::P3).unwrap();
        let b = heights::bezout_bound(p, dw, dv, &degw, &degv, &hw, &hv, &ledger, ErrMode::P3).unwrap();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn segre_swap_symmetry(
        dv in 0u32..4,
        dw in 0u32..4,
        degv in nonneg_rational(),
        degw in nonneg_rational(),
        hv in nonneg_rational(),
        hw in nonneg_rational(),
    ) {
        let (d1, h1) = heights::segre_degree_height(dv, dw, &degv, &degw, &hv, &hw);
        let (d2, h2) = heights::segre_degree_height(dw, dv, &degw, &degv, &hw, &hv);
        prop_assert_eq!((d1, h1), (d2, h2));
    }

    #[test]
    fn mumford_inversion_round_trip(p in prop::sample::select(rat::primes_in(41, 199)), b in nonneg_rational()) {
        let ledger = Ledger::default();
        prop_assume!(fiber::genus(p).unwrap() >= 3);
        let h = heights::mumford_invert(p, &b, &ledger).unwrap();
        prop_assert_eq!(heights::mumford(p, &h, &h, &ledger).unwrap(), b);
    }

    #[test]
    fn rational_text_round_trip(x in rational()) {
        let s = rat::format_q(&x);
        prop_assert_eq!(rat::parse_q(&s).unwrap(), x);
    }
}
