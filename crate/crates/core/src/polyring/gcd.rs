use super::Polynomial;
use crate::error::Result;
use crate::valfield::ValuedField;

/// Monic greatest common divisor; `gcd(f, 0)` is the monic associate of `f`.
pub fn gcd<F: ValuedField>(f: &Polynomial<F>, g: &Polynomial<F>) -> Result<Polynomial<F>> {
    f.ensure_compatible(g)?;
    Ok(gcd_impl(f, g))
}

/// Monic least common multiple; `lcm(f, 0) = 0`.
pub fn lcm<F: ValuedField>(f: &Polynomial<F>, g: &Polynomial<F>) -> Result<Polynomial<F>> {
    f.ensure_compatible(g)?;
    if f.is_zero() || g.is_zero() {
        return Ok(Polynomial::zero(f.field(), f.nvars()));
    }
    let d = gcd_impl(f, g);
    Ok((f * g).exact_div(&d)?.monic())
}

fn gcd_list<F: ValuedField>(field: &F, nvars: usize, polys: &[Polynomial<F>]) -> Polynomial<F> {
    let mut acc = Polynomial::zero(field, nvars);
    for p in polys {
        acc = gcd_impl(&acc, p);
        if acc.is_constant() && !acc.is_zero() {
            break;
        }
    }
    acc
}

/// Pseudo-remainder of `a` by `b` in the recursive representation
/// (coefficient vectors in one variable). The result is `lc(b)^k a mod b`.
fn pseudo_rem<F: ValuedField>(a: &[Polynomial<F>], b: &[Polynomial<F>]) -> Vec<Polynomial<F>> {
    let db = b.len() - 1;
    let lb = &b[db];
    let mut r: Vec<Polynomial<F>> = a.to_vec();
    while r.len() > db && !r.is_empty() {
        let dr = r.len() - 1;
        let lead = r[dr].clone();
        let shift = dr - db;
        for c in r.iter_mut() {
            *c = &*c * lb;
        }
        for (j, bj) in b.iter().enumerate() {
            r[shift + j] = &r[shift + j] - &(&lead * bj);
        }
        debug_assert!(r[dr].is_zero());
        while r.last().is_some_and(|c| c.is_zero()) {
            r.pop();
        }
    }
    r
}

fn primitive<F: ValuedField>(field: &F, nvars: usize, coeffs: Vec<Polynomial<F>>) -> Vec<Polynomial<F>> {
    let cont = gcd_list(field, nvars, &coeffs);
    let out: Vec<_> = if cont.is_constant() {
        coeffs
    } else {
        coeffs
            .iter()
            .map(|c| c.exact_div(&cont).expect("content divides every coefficient"))
            .collect()
    };
    // Normalize by a field constant to keep coefficient growth in check.
    let lead = out.last().and_then(|c| c.leading().map(|(_, x)| x.clone()));
    match lead {
        Some(l) if !field.is_one(&l) => {
            let inv = field.inv(&l).expect("nonzero leading coefficient");
            out.iter().map(|c| c.scale(&inv)).collect()
        }
        _ => out,
    }
}

pub(super) fn gcd_impl<F: ValuedField>(f: &Polynomial<F>, g: &Polynomial<F>) -> Polynomial<F> {
    let field = f.field();
    let n = f.nvars();
    if f.is_zero() {
        return g.monic();
    }
    if g.is_zero() {
        return f.monic();
    }
    if f.is_constant() || g.is_constant() {
        return Polynomial::one(field, n);
    }
    let var = (0..n)
        .rev()
        .find(|&i| f.degree_in(i).unwrap_or(0) > 0 || g.degree_in(i).unwrap_or(0) > 0)
        .expect("non-constant polynomial has a variable");
    let cf = f.coefficients_in(var);
    let cg = g.coefficients_in(var);
    let cont_f = gcd_list(field, n, &cf);
    let cont_g = gcd_list(field, n, &cg);
    let content = gcd_impl(&cont_f, &cont_g);
    if cf.len() == 1 || cg.len() == 1 {
        // One side does not involve `var`, so its gcd with the other is a gcd of contents.
        let other = if cf.len() == 1 { &cont_g } else { &cont_f };
        let side = if cf.len() == 1 { f } else { g };
        return gcd_impl(side, other);
    }
    let mut a = primitive(field, n, cf);
    let mut b = primitive(field, n, cg);
    if a.len() < b.len() {
        std::mem::swap(&mut a, &mut b);
    }
    loop {
        let r = pseudo_rem(&a, &b);
        if r.is_empty() {
            break;
        }
        if r.len() == 1 {
            return content.monic();
        }
        a = b;
        b = primitive(field, n, r);
    }
    let pp = Polynomial::from_coefficients_in(field, n, var, &b);
    (&content * &pp).monic()
}

impl<F: ValuedField> Polynomial<F> {
    pub fn gcd(&self, other: &Self) -> Result<Self> {
        gcd(self, other)
    }

    pub fn lcm(&self, other: &Self) -> Result<Self> {
        lcm(self, other)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polyring::MultiIndex;
    use crate::valfield::{PadicRationals, TadicFunctionField};
    use num_rational::BigRational;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn q() -> PadicRationals {
        PadicRationals::new(5).unwrap()
    }

    fn c(n: i64) -> BigRational {
        BigRational::from_integer(n.into())
    }

    #[test]
    fn univariate_examples() {
        let f = q();
        let z = Polynomial::var(&f, 1, 0);
        assert_eq!(gcd(&z.pow(2), &z.scale(&c(2))).unwrap(), z);
        let g = &z.pow(3) - &z;
        assert_eq!(gcd(&g, &Polynomial::zero(&f, 1)).unwrap(), g.monic());
        let h = g.scale(&c(7));
        assert_eq!(gcd(&h, &Polynomial::zero(&f, 1)).unwrap(), g);
    }

    // Brute force: the gcd of two monomials is the componentwise minimum.
    #[test]
    fn bivariate_monomials() {
        let f = q();
        let z = Polynomial::var(&f, 2, 0);
        let w = Polynomial::var(&f, 2, 1);
        let a = &z.pow(2) * &w;
        let b = &z * &w.pow(2);
        assert_eq!(gcd(&a, &b).unwrap(), &z * &w);
        assert_eq!(lcm(&a, &b).unwrap(), &z.pow(2) * &w.pow(2));
    }

    #[test]
    fn lcm_examples() {
        let f = q();
        let z = Polynomial::var(&f, 2, 0);
        let w = Polynomial::var(&f, 2, 1);
        let one = Polynomial::one(&f, 2);
        assert_eq!(lcm(&z, &w).unwrap(), &z * &w);
        assert_eq!(lcm(&z.pow(2), &z).unwrap(), z.pow(2));
        let a = &z * &(&z - &one);
        let b = &z * &(&z + &one);
        assert_eq!(lcm(&a, &b).unwrap(), &(&z * &(&z - &one)) * &(&z + &one));
        assert!(lcm(&z, &Polynomial::zero(&f, 2)).unwrap().is_zero());
    }

    fn random_poly<F: ValuedField>(f: &F, n: usize, deg: u32, rng: &mut ChaCha8Rng) -> Polynomial<F> {
        let terms = (0..4).map(|_| {
            let e: Vec<u32> = (0..n).map(|_| rng.gen_range(0..=deg)).collect();
            (MultiIndex::new(e), f.sample(rng, 6))
        });
        Polynomial::from_terms(f, n, terms)
    }

    fn check_common_factor<F: ValuedField>(f: &F, seed: u64) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..25 {
            let a = random_poly(f, 2, 2, &mut rng);
            let b = random_poly(f, 2, 2, &mut rng);
            let h = random_poly(f, 2, 2, &mut rng);
            if a.is_zero() || b.is_zero() || h.is_zero() {
                continue;
            }
            let g = gcd(&(&a * &h), &(&b * &h)).unwrap();
            // h divides the gcd, and the gcd divides both products.
            assert!(g.divides_by(&h).is_some(), "h = {h}, g = {g}");
            assert!((&a * &h).divides_by(&g).is_some());
            assert!((&b * &h).divides_by(&g).is_some());
            let extra = g.exact_div(&h.monic()).unwrap();
            assert_eq!(extra, gcd(&a, &b).unwrap());
        }
    }

    #[test]
    fn gcd_of_products_over_q() {
        check_common_factor(&q(), 1);
    }

    #[test]
    fn gcd_of_products_over_fpt() {
        check_common_factor(&TadicFunctionField::new(3).unwrap(), 2);
        check_common_factor(&TadicFunctionField::new(2).unwrap(), 3);
    }
}
