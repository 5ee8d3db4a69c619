mod common;

use common::strategies::*;
use noether_approx::expr::{parse, print_canonical, Expr, Symbol};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn print_parse_round_trip(e in expr()) {
        let text = print_canonical(&e);
        prop_assert_eq!(parse(&text).unwrap(), e, "{}", text);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn derivative_matches_central_difference(e in expr(), x in point(), which in 0usize..6) {
        let h = 1e-5;
        let v = &symbols()[which];
        let mut lo = env(&x);
        let mut hi = env(&x);
        *lo.get_mut(v).unwrap() -= h;
        *hi.get_mut(v).unwrap() += h;
        let fd = (e.eval(&hi).unwrap() - e.eval(&lo).unwrap()) / (2.0 * h);
        let exact = e.diff(v).eval(&env(&x)).unwrap();
        prop_assert!(close(fd, exact, 1e-6), "{} vs {}", fd, exact);
    }

    #[test]
    fn leibniz_rule(a in expr(), b in expr(), which in 0usize..6) {
        let v = &symbols()[which];
        let lhs = (&a * &b).diff(v);
        let rhs = &(&a.diff(v) * &b) + &(&a * &b.diff(v));
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn products_keep_trig_normal_form(a in expr(), b in expr(), x in point()) {
        let p = &a * &b;
        for (m, _) in p.terms() {
            prop_assert!(m.trig().map_or(true, |t| t.m >= 1));
        }
        let pv = p.eval(&env(&x)).unwrap();
        let want = a.eval(&env(&x)).unwrap() * b.eval(&env(&x)).unwrap();
        prop_assert!(close(pv, want, 1e-9));
    }

    #[test]
    fn total_derivative_is_chain_rule(e in expr()) {
        let d = e.total_derivative();
        let mut want = e.diff(&Symbol::Phi);
        for n in 0..3u8 {
            want += &(&Expr::jet(n + 1) * &e.diff(&Symbol::Jet(n)));
        }
        prop_assert_eq!(d, want);
    }
}
