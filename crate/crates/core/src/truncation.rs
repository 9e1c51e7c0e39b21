//! Radicals, higher radicals, squarefree parts and truncated counting.
//!
//! Everything is built from gcd, lcm and Hasse derivatives; no polynomial
//! is ever factored into irreducibles.

use std::fmt;

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::nevanlinna::{NewtonPolygon, RadiusLog};
use crate::polyring::{hasse_derivative, MultiIndex, Polynomial};
use crate::valfield::ValuedField;
use crate::Rat;

/// Truncation level `l >= 1`, or no truncation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum TruncationLevel {
    Finite(u64),
    Infinite,
}

impl TruncationLevel {
    pub fn finite(l: u64) -> Result<Self> {
        if l == 0 {
            return Err(Error::Input("truncation level must be at least 1".into()));
        }
        Ok(TruncationLevel::Finite(l))
    }
}

impl fmt::Display for TruncationLevel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TruncationLevel::Finite(l) => write!(f, "{l}"),
            TruncationLevel::Infinite => f.write_str("inf"),
        }
    }
}

impl Serialize for TruncationLevel {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

fn nonzero<F: ValuedField>(f: &Polynomial<F>) -> Result<()> {
    if f.is_zero() {
        Err(Error::Input("zero polynomial".into()))
    } else {
        Ok(())
    }
}

/// lcm over `i` of `f / gcd(f, D_i^{order} f)`.
fn derivative_lcm<F: ValuedField>(f: &Polynomial<F>, order: u32) -> Result<Polynomial<F>> {
    let mut acc = Polynomial::one(f.field(), f.nvars());
    for i in 0..f.nvars() {
        let d = hasse_derivative(f, &MultiIndex::unit(f.nvars(), i).scaled(order));
        let g = f.gcd(&d)?;
        acc = acc.lcm(&f.exact_div(&g)?)?;
    }
    Ok(acc)
}

/// `R(f)`: lcm of `f / gcd(f, D^1_j f)`.
pub fn radical<F: ValuedField>(f: &Polynomial<F>) -> Result<Polynomial<F>> {
    nonzero(f)?;
    derivative_lcm(f, 1)
}

/// `q`-th root of a polynomial whose exponents are all divisible by `q = p^s`.
fn prime_power_root<F: ValuedField>(g: &Polynomial<F>, s: u32) -> Result<Polynomial<F>> {
    let field = g.field();
    let q = field.characteristic().pow(s);
    let mut terms = Vec::with_capacity(g.num_terms());
    for (e, c) in g.terms() {
        let exps: Option<Vec<u32>> =
            e.as_slice().iter().map(|&x| (x as u64 % q == 0).then(|| (x as u64 / q) as u32)).collect();
        let root = field.prime_power_root(c, s);
        match (exps, root) {
            (Some(exps), Some(root)) => terms.push((MultiIndex::new(exps), root)),
            _ => return Err(Error::NoRoot(format!("the {q}-th root of {g}"))),
        }
    }
    Ok(Polynomial::from_terms(field, g.nvars(), terms))
}

/// Higher radical `R_{p^s}(f)` in characteristic `p > 0`.
pub fn higher_radical<F: ValuedField>(f: &Polynomial<F>, s: u32) -> Result<Polynomial<F>> {
    nonzero(f)?;
    let p = f.field().characteristic();
    if p == 0 {
        return Err(Error::NeedsPositiveCharacteristic);
    }
    if s == 0 {
        return radical(f);
    }
    let q = p.checked_pow(s).filter(|q| *q <= u32::MAX as u64).ok_or_else(|| {
        Error::Input(format!("radical order {p}^{s} is too large"))
    })?;
    let prev = higher_radical(f, s - 1)?;
    let fbar = f.exact_div(&gcd_with_power(f, &prev, q)?)?;
    let h = derivative_lcm(&fbar, q as u32)?;
    let g = h.exact_div(&gcd_with_power(&h, &higher_radical(&h, s - 1)?, q / p)?)?;
    let root = prime_power_root(&g, s)?;
    prev.lcm(&root)
}

/// `gcd(f, g^e)` without forming the power: `gcd(f, g^k) = gcd(f, gcd(f, g^{k-1}) g)`,
/// and the sequence is constant once its degree stops growing.
fn gcd_with_power<F: ValuedField>(f: &Polynomial<F>, g: &Polynomial<F>, e: u64) -> Result<Polynomial<F>> {
    let mut acc = Polynomial::one(f.field(), f.nvars());
    for _ in 0..e {
        let next = f.gcd(&(&acc * g))?;
        if next.total_degree() == acc.total_degree() {
            break;
        }
        acc = next;
    }
    Ok(acc)
}

/// `S(f)`: the radical in characteristic 0, otherwise the stabilized higher
/// radical `R_{p^s}(f)` with `p^s > deg f`.
pub fn squarefree_part<F: ValuedField>(f: &Polynomial<F>) -> Result<Polynomial<F>> {
    nonzero(f)?;
    let p = f.field().characteristic();
    if p == 0 {
        return radical(f);
    }
    higher_radical(f, stabilization_index(p, f.total_degree().unwrap_or(0)))
}

/// Smallest `s` with `p^s > deg`.
pub fn stabilization_index(p: u64, deg: u64) -> u32 {
    let mut s = 0;
    let mut q = 1u64;
    while q <= deg {
        q = q.saturating_mul(p);
        s += 1;
    }
    s
}

/// `gcd(f, S^l)` by repeated gcd extraction against the squarefree `S`.
pub fn truncated_part<F: ValuedField>(f: &Polynomial<F>, l: u64) -> Result<Polynomial<F>> {
    nonzero(f)?;
    let s = squarefree_part(f)?;
    let mut rest = f.clone();
    let mut acc = Polynomial::one(f.field(), f.nvars());
    for _ in 0..l {
        let g = rest.gcd(&s)?;
        if g.is_constant() {
            break;
        }
        rest = rest.exact_div(&g)?;
        acc = &acc * &g;
    }
    Ok(acc)
}

/// `N^{(l)}_f(0, r) = N_{gcd(f, S(f)^l)}(0, r)`; `l = inf` gives `N_f(0, r)`.
pub fn truncated_count<F: ValuedField>(f: &Polynomial<F>, rho: &RadiusLog, l: TruncationLevel) -> Result<Rat> {
    Ok(truncated_polygon(f, l)?.counting(rho.value()))
}

/// Newton polygon of the truncated polynomial, for repeated evaluation.
///
/// Over a non-perfect field the truncated polynomial may need coefficients
/// outside the field. Its zeros still have well-defined absolute values, so
/// the polygon is then computed for the Frobenius twist of `f`, where every
/// needed root exists, and its values are scaled back by `p^s`. Only the
/// breakpoints and degrees of such a polygon are meaningful, which is all
/// that counting needs.
pub fn truncated_polygon<F: ValuedField>(f: &Polynomial<F>, l: TruncationLevel) -> Result<NewtonPolygon> {
    nonzero(f)?;
    let l = match l {
        TruncationLevel::Infinite => return Ok(NewtonPolygon::of(f).expect("nonzero")),
        TruncationLevel::Finite(l) => l,
    };
    match truncated_part(f, l) {
        Ok(g) => Ok(NewtonPolygon::of(&g).expect("nonzero")),
        Err(Error::NoRoot(_)) => {
            let field = f.field();
            let p = field.characteristic();
            let s = stabilization_index(p, f.total_degree().unwrap_or(0));
            let terms = f
                .terms()
                .map(|(e, c)| field.frobenius_twist(c, s).map(|c| (e.clone(), c)))
                .collect::<Option<Vec<_>>>()
                .ok_or_else(|| Error::InternalConsistency("field has no Frobenius twist".into()))?;
            let twisted = Polynomial::from_terms(field, f.nvars(), terms);
            let g = truncated_part(&twisted, l)?;
            let scale = Rat::from_integer(p.pow(s).into());
            let poly = NewtonPolygon::of(&g).expect("nonzero");
            Ok(NewtonPolygon::from_points(poly.vertices().iter().map(|(k, c)| (*k, c / &scale))).expect("nonempty"))
        }
        Err(e) => Err(e),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polyring::{parse_polynomial, VariableScheme};
    use crate::valfield::{PadicRationals, TadicFunctionField};

    fn q(s: &str) -> Polynomial<PadicRationals> {
        parse_polynomial(s, &PadicRationals::new(5).unwrap(), VariableScheme::Domain(1)).unwrap()
    }

    fn fp(p: u64, s: &str) -> Polynomial<TadicFunctionField> {
        parse_polynomial(s, &TadicFunctionField::new(p).unwrap(), VariableScheme::Domain(1)).unwrap()
    }

    fn r(n: i64) -> Rat {
        Rat::from_integer(n.into())
    }

    #[test]
    fn radical_examples() {
        assert_eq!(radical(&q("z^2")).unwrap(), q("z"));
        assert_eq!(radical(&q("z^2*(z-1)^3")).unwrap(), q("z*(z-1)"));
        assert_eq!(radical(&fp(2, "z^2")).unwrap(), fp(2, "1"));
        assert!(radical(&q("0")).is_err());
    }

    #[test]
    fn higher_radical_examples() {
        assert_eq!(higher_radical(&fp(2, "z^2"), 1).unwrap(), fp(2, "z"));
        assert_eq!(higher_radical(&fp(2, "z"), 1).unwrap(), fp(2, "z"));
        for p in [2, 3, 5] {
            for s in 0..4 {
                assert_eq!(higher_radical(&fp(p, "1"), s).unwrap(), fp(p, "1"));
            }
        }
        assert!(matches!(higher_radical(&q("z"), 1), Err(Error::NeedsPositiveCharacteristic)));
    }

    #[test]
    fn non_perfect_coefficients_are_reported() {
        // z^2 - t is irreducible and inseparable over F_2(t).
        assert!(matches!(squarefree_part(&fp(2, "z^2 - t")), Err(Error::NoRoot(_))));
    }

    #[test]
    fn squarefree_examples() {
        assert_eq!(squarefree_part(&fp(2, "z^4")).unwrap(), fp(2, "z"));
        assert_eq!(stabilization_index(2, 4), 3);
        assert_eq!(squarefree_part(&fp(3, "(z-1)^3*(z+1)")).unwrap(), fp(3, "(z-1)*(z+1)"));
        let f = q("(z-1)*(z+2)*z");
        assert_eq!(squarefree_part(&f).unwrap(), f);
    }

    #[test]
    fn truncated_count_examples() {
        let rho = RadiusLog::from_int(2);
        let f = q("z^3");
        assert_eq!(truncated_count(&f, &rho, TruncationLevel::Finite(1)).unwrap(), r(2));
        assert_eq!(truncated_count(&f, &rho, TruncationLevel::Finite(2)).unwrap(), r(4));
        assert_eq!(truncated_count(&f, &rho, TruncationLevel::Infinite).unwrap(), r(6));
        let g = q("(z-5)^2*z");
        assert_eq!(truncated_count(&g, &RadiusLog::from_int(0), TruncationLevel::Finite(1)).unwrap(), r(1));
        assert!(TruncationLevel::finite(0).is_err());
    }

    #[test]
    fn two_variables() {
        let field = TadicFunctionField::new(3).unwrap();
        let f = parse_polynomial("z1^3*(z1 + z2)^2*(z2 - t)", &field, VariableScheme::Domain(2)).unwrap();
        let s = parse_polynomial("z1*(z1 + z2)*(z2 - t)", &field, VariableScheme::Domain(2)).unwrap();
        assert_eq!(squarefree_part(&f).unwrap(), s.monic());
        let t2 = parse_polynomial("z1^2*(z1 + z2)^2*(z2 - t)", &field, VariableScheme::Domain(2)).unwrap();
        assert_eq!(truncated_part(&f, 2).unwrap(), t2.monic());
    }

    #[test]
    fn counts_inseparable_zeros() {
        // a double zero at sqrt(t), |sqrt(t)| = |t|^(1/2)
        let f = fp(2, "z^2 - t");
        let one = TruncationLevel::Finite(1);
        let half = Rat::new(1.into(), 2.into());
        assert_eq!(truncated_count(&f, &RadiusLog::from_int(0), one).unwrap(), half);
        assert_eq!(truncated_count(&f, &RadiusLog::from_int(1), one).unwrap(), r(3) * &half);
        assert_eq!(truncated_count(&f, &RadiusLog::from_int(1), TruncationLevel::Finite(2)).unwrap(), r(3));
        assert_eq!(truncated_count(&f, &RadiusLog::from_int(1), TruncationLevel::Infinite).unwrap(), r(3));
        let g = fp(3, "(z^3 + t)*(z - 1)^2*z");
        assert_eq!(truncated_count(&g, &RadiusLog::from_int(2), one).unwrap(), r(2) + r(2) + Rat::new(7.into(), 3.into()));
    }
}
