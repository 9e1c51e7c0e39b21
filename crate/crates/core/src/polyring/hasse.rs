use num_bigint::BigInt;

use super::{MultiIndex, Polynomial, RationalFunction};
use crate::error::{Error, Result};
use crate::valfield::{binomial_in, ValuedField};

/// `D^g f = sum_{a >= g} C(a, g) c_a z^{a-g}`.
pub fn hasse_derivative<F: ValuedField>(f: &Polynomial<F>, gamma: &MultiIndex) -> Polynomial<F> {
    let field = f.field();
    let terms = f.terms().filter_map(|(a, c)| {
        let shifted = a.checked_sub(gamma)?;
        let mut coeff = c.clone();
        for (&ai, &gi) in a.as_slice().iter().zip(gamma.as_slice()) {
            if gi > 0 {
                coeff = field.mul(&coeff, &binomial_in(field, ai as u64, gi as u64));
            }
        }
        Some((shifted, coeff))
    });
    Polynomial::from_terms(field, f.nvars(), terms)
}

/// Ordinary iterated partial derivative `d^g f`.
pub fn partial_derivative<F: ValuedField>(f: &Polynomial<F>, gamma: &MultiIndex) -> Polynomial<F> {
    let field = f.field();
    let terms = f.terms().filter_map(|(a, c)| {
        let shifted = a.checked_sub(gamma)?;
        let mut falling = BigInt::from(1u8);
        for (&ai, &gi) in a.as_slice().iter().zip(gamma.as_slice()) {
            for j in 0..gi {
                falling *= BigInt::from(ai - j);
            }
        }
        Some((shifted, field.mul(c, &field.from_bigint(&falling))))
    });
    Polynomial::from_terms(field, f.nvars(), terms)
}

/// First-order derivative of a quotient, `(h g' - g h') / h^2`.
fn first_order<F: ValuedField>(f: &RationalFunction<F>, var: usize) -> Result<RationalFunction<F>> {
    let e = MultiIndex::unit(f.nvars(), var);
    let (g, h) = (f.numer(), f.denom());
    let num = &(h * &hasse_derivative(g, &e)) - &(g * &hasse_derivative(h, &e));
    RationalFunction::new(num, h.pow(2))
}

/// Hasse derivative extended to rational functions.
///
/// Polynomial inputs (constant denominator) use the defining sum directly.
/// Otherwise the derivative is built along the canonical chain from a unit
/// vector up to `gamma`, dividing by `C(a + e_j, a) = a_j + 1` at each step.
/// Those factors are the same multiset for every chain, so a factor that
/// vanishes mod p rules out all chains at once.
pub fn hasse_on_rational<F: ValuedField>(
    f: &RationalFunction<F>,
    gamma: &MultiIndex,
) -> Result<RationalFunction<F>> {
    let field = f.field();
    if let Some(c) = f.denom().as_constant() {
        let inv = field.inv(&c)?;
        return RationalFunction::new(hasse_derivative(f.numer(), gamma).scale(&inv), Polynomial::one(field, f.nvars()));
    }
    // Descending chain: remove the lowest-index nonzero component first.
    let mut steps = Vec::with_capacity(gamma.degree() as usize);
    let mut cur = gamma.as_slice().to_vec();
    while let Some(j) = cur.iter().position(|&e| e > 0) {
        steps.push(j);
        cur[j] -= 1;
    }
    steps.reverse();
    let mut alpha = vec![0u32; gamma.len()];
    let mut h = f.clone();
    for j in steps {
        let factor = field.from_i64(alpha[j] as i64 + 1);
        if field.is_zero(&factor) {
            return Err(Error::InadmissibleMultiIndex(gamma.as_slice().to_vec()));
        }
        h = first_order(&h, j)?.scale(&field.inv(&factor)?)?;
        alpha[j] += 1;
    }
    Ok(h)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::valfield::{PadicRationals, TadicFunctionField};
    use num_rational::BigRational;

    fn c(n: i64) -> BigRational {
        BigRational::from_integer(n.into())
    }

    fn mi(v: &[u32]) -> MultiIndex {
        MultiIndex::new(v.to_vec())
    }

    #[test]
    fn hasse_examples() {
        let q = PadicRationals::new(5).unwrap();
        let z = Polynomial::var(&q, 1, 0);
        assert_eq!(hasse_derivative(&z.pow(3), &mi(&[1])), z.pow(2).scale(&c(3)));

        let f2 = TadicFunctionField::new(2).unwrap();
        let z2 = Polynomial::var(&f2, 1, 0);
        // C(3,2) = 3 = 1 mod 2
        assert_eq!(hasse_derivative(&z2.pow(3), &mi(&[2])), z2);
        // C(2,1) = 2 = 0 mod 2
        assert!(hasse_derivative(&z2.pow(2), &mi(&[1])).is_zero());
    }

    #[test]
    fn partial_examples() {
        let q = PadicRationals::new(5).unwrap();
        let z = Polynomial::var(&q, 1, 0);
        assert_eq!(partial_derivative(&z.pow(3), &mi(&[2])), z.scale(&c(6)));
        let f2 = TadicFunctionField::new(2).unwrap();
        let z2 = Polynomial::var(&f2, 1, 0);
        assert!(partial_derivative(&z2.pow(3), &mi(&[2])).is_zero());
        let zw = &Polynomial::var(&q, 2, 0) * &Polynomial::var(&q, 2, 1);
        assert_eq!(partial_derivative(&zw, &mi(&[1, 1])), Polynomial::one(&q, 2));
    }

    #[test]
    fn rational_examples() {
        let q = PadicRationals::new(5).unwrap();
        let z = Polynomial::var(&q, 1, 0);
        let one = Polynomial::one(&q, 1);
        let inv_z = RationalFunction::new(one.clone(), z.clone()).unwrap();
        let d1 = hasse_on_rational(&inv_z, &mi(&[1])).unwrap();
        assert_eq!(d1, RationalFunction::new(-&one, z.pow(2)).unwrap());
        // D^2 (1/z) = (2/z^3)/2! = 1/z^3
        let d2 = hasse_on_rational(&inv_z, &mi(&[2])).unwrap();
        assert_eq!(d2, RationalFunction::new(one.clone(), z.pow(3)).unwrap());
        let g = &z.pow(4) - &z.scale(&c(7));
        let lifted = hasse_on_rational(&RationalFunction::from_polynomial(g.clone()), &mi(&[2])).unwrap();
        assert_eq!(lifted, RationalFunction::from_polynomial(hasse_derivative(&g, &mi(&[2]))));
    }

    #[test]
    fn char_zero_hasse_is_scaled_partial() {
        let q = PadicRationals::new(3).unwrap();
        let z = Polynomial::var(&q, 2, 0);
        let w = Polynomial::var(&q, 2, 1);
        let f = &(&z.pow(5) * &w.pow(3)) + &(&z * &w.pow(4));
        for g in MultiIndex::all_up_to(2, 5) {
            let fact: i64 = g.as_slice().iter().map(|&k| (1..=k as i64).product::<i64>()).product();
            assert_eq!(hasse_derivative(&f, &g).scale(&c(fact)), partial_derivative(&f, &g));
        }
    }

    #[test]
    fn inadmissible_chain_is_reported() {
        let f2 = TadicFunctionField::new(2).unwrap();
        let z = Polynomial::var(&f2, 1, 0);
        let inv_z = RationalFunction::new(Polynomial::one(&f2, 1), z).unwrap();
        assert!(hasse_on_rational(&inv_z, &mi(&[1])).is_ok());
        assert_eq!(
            hasse_on_rational(&inv_z, &mi(&[2])),
            Err(Error::InadmissibleMultiIndex(vec![2]))
        );
    }
}
