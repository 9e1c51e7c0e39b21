//! Algebraic invariants checked on random inputs.

use num_bigint::BigInt;
use proptest::prelude::*;

use nevcert::nevanlinna::{counting_function, gauss_norm, RadiusLog};
use nevcert::polyring::hasse_derivative;
use nevcert::truncation::{truncated_count, TruncationLevel};
use nevcert::{MultiIndex, PadicRationals, Polynomial, Rat, TadicFunctionField, ValuedField};

fn poly<F: ValuedField>(f: &F, nvars: usize, terms: &[(Vec<u32>, i64)]) -> Polynomial<F> {
    Polynomial::from_terms(f, nvars, terms.iter().map(|(e, c)| (MultiIndex::new(e[..nvars].to_vec()), f.from_i64(*c))))
}

fn terms() -> impl Strategy<Value = Vec<(Vec<u32>, i64)>> {
    prop::collection::vec((prop::collection::vec(0u32..4, 2), -60i64..60), 1..6)
}

fn radius() -> impl Strategy<Value = RadiusLog> {
    (-6i64..12, 1i64..4).prop_map(|(a, b)| RadiusLog::new(Rat::new(a.into(), b.into())))
}

fn binom(n: u32, k: u32) -> i64 {
    (0..k).fold(BigInt::from(1), |acc, i| acc * (n - i) / (i + 1)).try_into().unwrap()
}

/// `D^j D^i g = C(i + j, i) D^{i+j} g` in one variable.
fn composes<F: ValuedField>(f: &F, a: &[(Vec<u32>, i64)], i: u32, j: u32) -> bool {
    let g = poly(f, 1, a);
    let d = |g: &Polynomial<F>, k: u32| hasse_derivative(g, &MultiIndex::new(vec![k]));
    d(&d(&g, i), j) == d(&g, i + j).mul_monomial(&MultiIndex::zero(1), &f.from_i64(binom(i + j, i)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn gauss_norm_is_multiplicative(p in prop::sample::select(vec![2u64, 3, 5]), a in terms(), b in terms(), rho in radius()) {
        let f = PadicRationals::new(p).unwrap();
        let (g, h) = (poly(&f, 2, &a), poly(&f, 2, &b));
        prop_assume!(!g.is_zero() && !h.is_zero());
        prop_assert_eq!(gauss_norm(&(&g * &h), &rho), gauss_norm(&g, &rho) + gauss_norm(&h, &rho));
    }

    #[test]
    fn counting_is_additive(p in prop::sample::select(vec![2u64, 3]), a in terms(), b in terms(), rho in radius()) {
        let f = TadicFunctionField::new(p).unwrap();
        let (g, h) = (poly(&f, 1, &a), poly(&f, 1, &b));
        prop_assume!(!g.is_zero() && !h.is_zero());
        let sum = counting_function(&g, &rho).unwrap() + counting_function(&h, &rho).unwrap();
        prop_assert_eq!(counting_function(&(&g * &h), &rho).unwrap(), sum);
    }

    #[test]
    fn hasse_derivatives_compose(p in prop::sample::select(vec![0u64, 2, 3, 5]), a in terms(), i in 0u32..4, j in 0u32..4) {
        if p == 0 {
            prop_assert!(composes(&PadicRationals::new(7).unwrap(), &a, i, j));
        } else {
            prop_assert!(composes(&TadicFunctionField::new(p).unwrap(), &a, i, j));
        }
    }

    #[test]
    fn truncation_is_monotone_in_the_level(a in terms(), b in terms(), rho in radius()) {
        let f = TadicFunctionField::new(3).unwrap();
        let g = &poly(&f, 1, &a) * &poly(&f, 1, &b).pow(3);
        prop_assume!(!g.is_zero() && rho.value() >= &Rat::from_integer(0.into()));
        let levels = [TruncationLevel::Finite(1), TruncationLevel::Finite(2), TruncationLevel::Finite(4), TruncationLevel::Infinite];
        let counts: Vec<Rat> = levels.iter().map(|l| truncated_count(&g, &rho, *l).unwrap()).collect();
        prop_assert!(counts.windows(2).all(|w| w[0] <= w[1]), "{:?}", counts);
        prop_assert_eq!(&counts[3], &counting_function(&g, &rho).unwrap());
    }
}
