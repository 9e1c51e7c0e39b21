//! Sparse multivariate polynomials and rational functions over a valued field.
//!
//! Terms are kept in a `BTreeMap` ordered by graded-lex order on exponents,
//! so the last entry is the leading term. Canonical forms (for gcds, radicals
//! and rational-function denominators) are monic in that order.

mod gcd;
mod hasse;
mod parse;
mod rational;

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use crate::error::{Error, Result};
use crate::valfield::ValuedField;

pub use hasse::{hasse_derivative, hasse_on_rational, partial_derivative};
pub use parse::{parse_polynomial, VariableScheme};
pub use rational::RationalFunction;

/// Exponent vector `(g_1, ..., g_m)`, ordered graded-lexicographically.
#[derive(Clone, Debug, PartialEq, Eq, Hash, serde::Serialize)]
pub struct MultiIndex(Vec<u32>);

impl MultiIndex {
    pub fn new(exps: Vec<u32>) -> Self {
        MultiIndex(exps)
    }

    pub fn zero(m: usize) -> Self {
        MultiIndex(vec![0; m])
    }

    /// The unit vector `e_i` (0-based `i`).
    pub fn unit(m: usize, i: usize) -> Self {
        let mut v = vec![0; m];
        v[i] = 1;
        MultiIndex(v)
    }

    pub fn as_slice(&self) -> &[u32] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// `|g|`.
    pub fn degree(&self) -> u64 {
        self.0.iter().map(|&e| e as u64).sum()
    }

    /// Componentwise `self >= other`.
    pub fn dominates(&self, other: &MultiIndex) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a >= b)
    }

    pub fn checked_sub(&self, other: &MultiIndex) -> Option<MultiIndex> {
        if !self.dominates(other) {
            return None;
        }
        Some(MultiIndex(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect()))
    }

    pub fn scaled(&self, k: u32) -> MultiIndex {
        MultiIndex(self.0.iter().map(|e| e * k).collect())
    }

    /// All multi-indices of total degree `k` in `m` variables, ascending.
    pub fn all_of_degree(m: usize, k: u32) -> Vec<MultiIndex> {
        fn rec(m: usize, k: u32, prefix: &mut Vec<u32>, out: &mut Vec<MultiIndex>) {
            if prefix.len() + 1 == m {
                prefix.push(k);
                out.push(MultiIndex(prefix.clone()));
                prefix.pop();
                return;
            }
            for e in 0..=k {
                prefix.push(e);
                rec(m, k - e, prefix, out);
                prefix.pop();
            }
        }
        let mut out = Vec::new();
        if m == 0 {
            if k == 0 {
                out.push(MultiIndex(Vec::new()));
            }
            return out;
        }
        rec(m, k, &mut Vec::new(), &mut out);
        out.sort();
        out
    }

    /// All multi-indices with `|g| <= k`, ascending.
    pub fn all_up_to(m: usize, k: u32) -> Vec<MultiIndex> {
        (0..=k).flat_map(|j| Self::all_of_degree(m, j)).collect()
    }

    /// All `a` with `0 <= a <= self` componentwise.
    pub fn divisors(&self) -> Vec<MultiIndex> {
        let mut out = vec![Vec::new()];
        for &e in &self.0 {
            out = out
                .into_iter()
                .flat_map(|pre| {
                    (0..=e).map(move |x| {
                        let mut v = pre.clone();
                        v.push(x);
                        v
                    })
                })
                .collect();
        }
        let mut out: Vec<_> = out.into_iter().map(MultiIndex).collect();
        out.sort();
        out
    }
}

impl Add for &MultiIndex {
    type Output = MultiIndex;
    fn add(self, rhs: &MultiIndex) -> MultiIndex {
        MultiIndex(self.0.iter().zip(&rhs.0).map(|(a, b)| a + b).collect())
    }
}

impl Ord for MultiIndex {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for MultiIndex {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl From<Vec<u32>> for MultiIndex {
    fn from(v: Vec<u32>) -> Self {
        MultiIndex(v)
    }
}

/// Sparse polynomial in `nvars` variables over `F`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Polynomial<F: ValuedField> {
    field: F,
    nvars: usize,
    terms: BTreeMap<MultiIndex, F::Elem>,
}

impl<F: ValuedField> Polynomial<F> {
    pub fn zero(field: &F, nvars: usize) -> Self {
        Polynomial {
            field: field.clone(),
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(field: &F, nvars: usize) -> Self {
        Self::constant(field, nvars, field.one())
    }

    pub fn constant(field: &F, nvars: usize, c: F::Elem) -> Self {
        Self::monomial(field, MultiIndex::zero(nvars), c)
    }

    pub fn monomial(field: &F, exps: MultiIndex, c: F::Elem) -> Self {
        let nvars = exps.len();
        let mut terms = BTreeMap::new();
        if !field.is_zero(&c) {
            terms.insert(exps, c);
        }
        Polynomial {
            field: field.clone(),
            nvars,
            terms,
        }
    }

    /// The variable with 0-based index `i`.
    pub fn var(field: &F, nvars: usize, i: usize) -> Self {
        Self::monomial(field, MultiIndex::unit(nvars, i), field.one())
    }

    /// Collects terms, summing duplicates and dropping zeros.
    pub fn from_terms(
        field: &F,
        nvars: usize,
        terms: impl IntoIterator<Item = (MultiIndex, F::Elem)>,
    ) -> Self {
        let mut out = Self::zero(field, nvars);
        for (e, c) in terms {
            debug_assert_eq!(e.len(), nvars);
            out.add_term(e, &c);
        }
        out
    }

    fn add_term(&mut self, e: MultiIndex, c: &F::Elem) {
        if self.field.is_zero(c) {
            return;
        }
        match self.terms.get_mut(&e) {
            Some(v) => {
                let s = self.field.add(v, c);
                if self.field.is_zero(&s) {
                    self.terms.remove(&e);
                } else {
                    *v = s;
                }
            }
            None => {
                self.terms.insert(e, c.clone());
            }
        }
    }

    pub fn field(&self) -> &F {
        &self.field
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&MultiIndex, &F::Elem)> + '_ {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coeff(&self, e: &MultiIndex) -> F::Elem {
        self.terms.get(e).cloned().unwrap_or_else(|| self.field.zero())
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|e| e.degree() == 0)
    }

    /// Constant term value if the polynomial is constant.
    pub fn as_constant(&self) -> Option<F::Elem> {
        if self.is_constant() {
            Some(self.coeff(&MultiIndex::zero(self.nvars)))
        } else {
            None
        }
    }

    pub fn total_degree(&self) -> Option<u64> {
        self.terms.keys().map(|e| e.degree()).max()
    }

    /// Smallest total degree in the support.
    pub fn min_total_degree(&self) -> Option<u64> {
        self.terms.keys().map(|e| e.degree()).min()
    }

    pub fn degree_in(&self, var: usize) -> Option<u32> {
        self.terms.keys().map(|e| e.0[var]).max()
    }

    pub fn leading(&self) -> Option<(&MultiIndex, &F::Elem)> {
        self.terms.iter().next_back()
    }

    /// Homogeneous degree, or `None` if zero or inhomogeneous.
    pub fn homogeneous_degree(&self) -> Option<u64> {
        let d = self.total_degree()?;
        self.terms.keys().all(|e| e.degree() == d).then_some(d)
    }

    pub fn ensure_compatible(&self, other: &Self) -> Result<()> {
        self.field.ensure_same(&other.field)?;
        if self.nvars != other.nvars {
            return Err(Error::Input(format!(
                "variable counts differ ({} vs {})",
                self.nvars, other.nvars
            )));
        }
        Ok(())
    }

    fn assert_compatible(&self, other: &Self) {
        if let Err(e) = self.ensure_compatible(other) {
            panic!("{e}");
        }
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.ensure_compatible(other)?;
        Ok(self + other)
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        self.ensure_compatible(other)?;
        Ok(self * other)
    }

    pub fn scale(&self, c: &F::Elem) -> Self {
        if self.field.is_zero(c) {
            return Self::zero(&self.field, self.nvars);
        }
        let terms = self
            .terms
            .iter()
            .map(|(e, a)| (e.clone(), self.field.mul(a, c)))
            .collect();
        Polynomial {
            field: self.field.clone(),
            nvars: self.nvars,
            terms,
        }
    }

    pub fn mul_monomial(&self, shift: &MultiIndex, c: &F::Elem) -> Self {
        if self.field.is_zero(c) {
            return Self::zero(&self.field, self.nvars);
        }
        let terms = self
            .terms
            .iter()
            .map(|(e, a)| (e + shift, self.field.mul(a, c)))
            .collect();
        Polynomial {
            field: self.field.clone(),
            nvars: self.nvars,
            terms,
        }
    }

    pub fn pow(&self, mut e: u64) -> Self {
        let mut base = self.clone();
        let mut acc = Self::one(&self.field, self.nvars);
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// Canonical associate: leading coefficient 1 (zero stays zero).
    pub fn monic(&self) -> Self {
        match self.leading() {
            None => self.clone(),
            Some((_, c)) if self.field.is_one(c) => self.clone(),
            Some((_, c)) => {
                let inv = self.field.inv(c).expect("leading coefficient is nonzero");
                self.scale(&inv)
            }
        }
    }

    pub fn is_monic(&self) -> bool {
        self.leading().is_some_and(|(_, c)| self.field.is_one(c))
    }

    /// Exact quotient `self / g`; fails unless `g` divides `self`.
    pub fn exact_div(&self, g: &Self) -> Result<Self> {
        self.ensure_compatible(g)?;
        let (lg, lc) = g.leading().ok_or(Error::DivisionByZero)?;
        let lc_inv = self.field.inv(lc)?;
        let mut rem = self.clone();
        let mut quot = Self::zero(&self.field, self.nvars);
        while let Some((le, lcoef)) = rem.leading() {
            let shift = le.checked_sub(lg).ok_or(Error::NotDivisible)?;
            let c = self.field.mul(lcoef, &lc_inv);
            rem = &rem - &g.mul_monomial(&shift, &c);
            quot.add_term(shift, &c);
        }
        Ok(quot)
    }

    /// Returns `Some(q)` when `g` divides `self`.
    pub fn divides_by(&self, g: &Self) -> Option<Self> {
        self.exact_div(g).ok()
    }

    /// Evaluates at a point of `F^m`.
    pub fn eval(&self, point: &[F::Elem]) -> F::Elem {
        let f = &self.field;
        let mut acc = f.zero();
        for (e, c) in &self.terms {
            let mut t = c.clone();
            for (x, &k) in point.iter().zip(&e.0) {
                if k > 0 {
                    t = f.mul(&t, &f.pow(x, k as u64));
                }
            }
            acc = f.add(&acc, &t);
        }
        acc
    }

    /// Substitutes `values[i]` for variable `i`; all values share one ring.
    pub fn substitute(&self, values: &[Polynomial<F>]) -> Result<Polynomial<F>> {
        if values.len() != self.nvars {
            return Err(Error::Input(format!(
                "expected {} substitution values, got {}",
                self.nvars,
                values.len()
            )));
        }
        let target = values
            .first()
            .map(|v| v.nvars)
            .unwrap_or(0);
        for v in values {
            self.field.ensure_same(&v.field)?;
            if v.nvars != target {
                return Err(Error::Input("substitution values live in different rings".into()));
            }
        }
        let mut powers: Vec<Vec<Polynomial<F>>> = values
            .iter()
            .map(|v| vec![Polynomial::one(&self.field, target), v.clone()])
            .collect();
        let mut acc = Polynomial::zero(&self.field, target);
        for (e, c) in &self.terms {
            let mut t = Polynomial::constant(&self.field, target, c.clone());
            for (i, &k) in e.0.iter().enumerate() {
                let k = k as usize;
                while powers[i].len() <= k {
                    let next = &powers[i][powers[i].len() - 1] * &values[i];
                    powers[i].push(next);
                }
                if k > 0 {
                    t = &t * &powers[i][k];
                }
            }
            acc = &acc + &t;
        }
        Ok(acc)
    }

    /// Coefficients with respect to `var`: `self = sum_k c_k * x_var^k`.
    pub fn coefficients_in(&self, var: usize) -> Vec<Polynomial<F>> {
        let deg = match self.degree_in(var) {
            None => return Vec::new(),
            Some(d) => d as usize,
        };
        let mut out = vec![Polynomial::zero(&self.field, self.nvars); deg + 1];
        for (e, c) in &self.terms {
            let k = e.0[var] as usize;
            let mut e2 = e.clone();
            e2.0[var] = 0;
            out[k].terms.insert(e2, c.clone());
        }
        out
    }

    /// Inverse of [`Self::coefficients_in`].
    pub fn from_coefficients_in(field: &F, nvars: usize, var: usize, coeffs: &[Polynomial<F>]) -> Self {
        let mut out = Self::zero(field, nvars);
        for (k, c) in coeffs.iter().enumerate() {
            for (e, a) in &c.terms {
                let mut e2 = e.clone();
                e2.0[var] += k as u32;
                out.terms.insert(e2, a.clone());
            }
        }
        out
    }

    /// Applies `map` to every exponent vector; `map` must be injective.
    pub fn map_exponents(&self, nvars: usize, map: impl Fn(&MultiIndex) -> MultiIndex) -> Self {
        Polynomial::from_terms(
            &self.field,
            nvars,
            self.terms.iter().map(|(e, c)| (map(e), c.clone())),
        )
    }
}

impl<F: ValuedField> Add for &Polynomial<F> {
    type Output = Polynomial<F>;
    fn add(self, rhs: &Polynomial<F>) -> Polynomial<F> {
        self.assert_compatible(rhs);
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(e.clone(), c);
        }
        out
    }
}

impl<F: ValuedField> Sub for &Polynomial<F> {
    type Output = Polynomial<F>;
    fn sub(self, rhs: &Polynomial<F>) -> Polynomial<F> {
        self.assert_compatible(rhs);
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(e.clone(), &self.field.neg(c));
        }
        out
    }
}

impl<F: ValuedField> Neg for &Polynomial<F> {
    type Output = Polynomial<F>;
    fn neg(self) -> Polynomial<F> {
        self.scale(&self.field.neg(&self.field.one()))
    }
}

impl<F: ValuedField> Mul for &Polynomial<F> {
    type Output = Polynomial<F>;
    fn mul(self, rhs: &Polynomial<F>) -> Polynomial<F> {
        self.assert_compatible(rhs);
        let f = &self.field;
        let mut out = Polynomial::zero(f, self.nvars);
        for (ea, ca) in &self.terms {
            for (eb, cb) in &rhs.terms {
                out.add_term(ea + eb, &f.mul(ca, cb));
            }
        }
        out
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl<F: ValuedField> $tr for Polynomial<F> {
            type Output = Polynomial<F>;
            fn $m(self, rhs: Polynomial<F>) -> Polynomial<F> {
                (&self).$m(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

/// Variable names used when printing.
pub(crate) fn default_var_name(nvars: usize, i: usize, ambient: bool) -> String {
    if ambient {
        format!("x{i}")
    } else if nvars == 1 {
        "z".to_string()
    } else {
        format!("z{}", i + 1)
    }
}

impl<F: ValuedField> Polynomial<F> {
    /// Renders with explicit variable names.
    pub fn display_with(&self, names: &[String]) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let f = &self.field;
        let minus_one = f.neg(&f.one());
        let mut out = String::new();
        for (k, (e, c)) in self.terms.iter().rev().enumerate() {
            let mono: Vec<String> = e
                .0
                .iter()
                .enumerate()
                .filter(|(_, &x)| x > 0)
                .map(|(i, &x)| {
                    if x == 1 {
                        names[i].clone()
                    } else {
                        format!("{}^{}", names[i], x)
                    }
                })
                .collect();
            let mono = mono.join("*");
            let (neg, mag) = if *c == minus_one && f.characteristic() != 2 {
                (true, f.one())
            } else {
                (false, c.clone())
            };
            let cs = mag.to_string();
            let (neg, cs) = match cs.strip_prefix('-') {
                Some(rest) if !neg && !rest.contains(['+', '-', '(']) => (true, rest.to_string()),
                _ => (neg, cs),
            };
            if k > 0 {
                out.push_str(if neg { " - " } else { " + " });
            } else if neg {
                out.push('-');
            }
            let coeff_is_one = cs == "1";
            match (mono.is_empty(), coeff_is_one) {
                (true, _) => out.push_str(&cs),
                (false, true) => out.push_str(&mono),
                (false, false) => {
                    out.push_str(&cs);
                    out.push('*');
                    out.push_str(&mono);
                }
            }
        }
        out
    }
}

impl<F: ValuedField> fmt::Display for Polynomial<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<String> = (0..self.nvars)
            .map(|i| default_var_name(self.nvars, i, false))
            .collect();
        write!(f, "{}", self.display_with(&names))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::valfield::{PadicRationals, TadicFunctionField};
    use num_rational::BigRational;

    fn q5() -> PadicRationals {
        PadicRationals::new(5).unwrap()
    }

    fn c(n: i64) -> BigRational {
        BigRational::from_integer(n.into())
    }

    #[test]
    fn arithmetic_examples() {
        let f = q5();
        let z = Polynomial::var(&f, 1, 0);
        let one = Polynomial::one(&f, 1);
        let prod = &(&z + &one) * &(&z - &one);
        let expected = Polynomial::from_terms(&f, 1, [(MultiIndex::new(vec![2]), c(1)), (MultiIndex::new(vec![0]), c(-1))]);
        assert_eq!(prod, expected);
        assert_eq!(prod.exact_div(&(&z - &one)).unwrap(), &z + &one);
        assert_eq!(prod.exact_div(&(&z - &Polynomial::constant(&f, 1, c(2)))), Err(Error::NotDivisible));
    }

    #[test]
    fn frobenius_in_char_two() {
        let f = TadicFunctionField::new(2).unwrap();
        let z = Polynomial::var(&f, 1, 0);
        let one = Polynomial::one(&f, 1);
        let sq = (&z + &one).pow(2);
        assert_eq!(sq, &z.pow(2) + &one);
    }

    #[test]
    fn grlex_order_and_enumeration() {
        let all = MultiIndex::all_of_degree(2, 2);
        assert_eq!(all, vec![MultiIndex::new(vec![0, 2]), MultiIndex::new(vec![1, 1]), MultiIndex::new(vec![2, 0])]);
        assert_eq!(MultiIndex::all_up_to(3, 2).len(), 10);
        assert!(MultiIndex::new(vec![0, 3]) > MultiIndex::new(vec![2, 0]));
        assert_eq!(MultiIndex::new(vec![1, 2]).divisors().len(), 6);
    }

    #[test]
    fn substitution_and_coefficients() {
        let f = q5();
        let x0 = Polynomial::var(&f, 3, 0);
        let x1 = Polynomial::var(&f, 3, 1);
        let x2 = Polynomial::var(&f, 3, 2);
        let conic = &(&x0 * &x2) - &x1.pow(2);
        let z = Polynomial::var(&f, 1, 0);
        let vals = vec![z.pow(2), z.clone(), Polynomial::one(&f, 1)];
        assert!(conic.substitute(&vals).unwrap().is_zero());
        let g = &(&x0 * &x1.pow(2)) + &x2;
        let cs = g.coefficients_in(1);
        assert_eq!(cs.len(), 3);
        assert_eq!(Polynomial::from_coefficients_in(&f, 3, 1, &cs), g);
    }

    #[test]
    #[should_panic(expected = "different coefficient fields")]
    fn mixed_configs_panic_in_operators() {
        let a = Polynomial::var(&PadicRationals::new(5).unwrap(), 1, 0);
        let b = Polynomial::var(&PadicRationals::new(3).unwrap(), 1, 0);
        let _ = &a + &b;
    }

    #[test]
    fn mixed_configs_error_in_checked_ops() {
        let a = Polynomial::var(&PadicRationals::new(5).unwrap(), 1, 0);
        let b = Polynomial::var(&PadicRationals::new(3).unwrap(), 1, 0);
        assert!(matches!(a.try_add(&b), Err(Error::ConfigMismatch(..))));
    }

    #[test]
    fn display_is_readable() {
        let f = q5();
        let z = Polynomial::var(&f, 1, 0);
        let p = &(&z.pow(2) - &z.scale(&c(5))) - &Polynomial::one(&f, 1);
        assert_eq!(p.to_string(), "z^2 - 5*z - 1");
    }
}
