//! Coefficient fields with a non-Archimedean absolute value.
//!
//! Every field is handled through a small descriptor implementing
//! [`ValuedField`]; elements are plain values and all arithmetic goes through
//! the descriptor. The absolute value is only ever observed through
//! [`ValuedField::logabs`], normalized so that the uniformizer has log `-1`.

mod padic;
mod tadic;

use std::cmp::Ordering;
use std::fmt;
use std::hash::Hash;
use std::ops::Add;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use rand::RngCore;
use serde::{Deserialize, Serialize};

use crate::error::Result;

pub use padic::PadicRationals;
pub use tadic::{FpPoly, FpRatFn, TadicFunctionField};

/// `log|x|` in normalized units, or `-inf` for `x = 0`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum LogValue {
    NegInfinity,
    Finite(BigRational),
}

impl LogValue {
    pub fn finite(v: impl Into<BigRational>) -> Self {
        LogValue::Finite(v.into())
    }

    pub fn from_int(v: i64) -> Self {
        LogValue::Finite(BigRational::from_integer(BigInt::from(v)))
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, LogValue::Finite(_))
    }

    pub fn value(&self) -> Option<&BigRational> {
        match self {
            LogValue::Finite(v) => Some(v),
            LogValue::NegInfinity => None,
        }
    }

    /// The finite value; panics on `-inf`.
    pub fn expect_finite(&self) -> BigRational {
        self.value().cloned().expect("log of zero has no finite value")
    }
}

impl Ord for LogValue {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (LogValue::NegInfinity, LogValue::NegInfinity) => Ordering::Equal,
            (LogValue::NegInfinity, _) => Ordering::Less,
            (_, LogValue::NegInfinity) => Ordering::Greater,
            (LogValue::Finite(a), LogValue::Finite(b)) => a.cmp(b),
        }
    }
}

impl PartialOrd for LogValue {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Add for LogValue {
    type Output = LogValue;
    fn add(self, rhs: LogValue) -> LogValue {
        match (self, rhs) {
            (LogValue::Finite(a), LogValue::Finite(b)) => LogValue::Finite(a + b),
            _ => LogValue::NegInfinity,
        }
    }
}

impl Add<&BigRational> for LogValue {
    type Output = LogValue;
    fn add(self, rhs: &BigRational) -> LogValue {
        match self {
            LogValue::Finite(a) => LogValue::Finite(a + rhs),
            LogValue::NegInfinity => LogValue::NegInfinity,
        }
    }
}

impl fmt::Display for LogValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LogValue::NegInfinity => write!(f, "-inf"),
            LogValue::Finite(v) => write!(f, "{v}"),
        }
    }
}

/// Serializable description of a coefficient field.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum ValuedFieldConfig {
    /// The rationals with the p-adic absolute value (characteristic 0).
    Padic { p: u64 },
    /// `F_p(t)` with the t-adic absolute value (characteristic p).
    Tadic { p: u64 },
}

impl ValuedFieldConfig {
    pub fn prime(&self) -> u64 {
        match *self {
            ValuedFieldConfig::Padic { p } | ValuedFieldConfig::Tadic { p } => p,
        }
    }

    pub fn characteristic(&self) -> u64 {
        match *self {
            ValuedFieldConfig::Padic { .. } => 0,
            ValuedFieldConfig::Tadic { p } => p,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let p = self.prime();
        if !is_prime(p) {
            return Err(crate::Error::Input(format!("{p} is not prime")));
        }
        Ok(())
    }
}

impl fmt::Display for ValuedFieldConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ValuedFieldConfig::Padic { p } => write!(f, "Q with {p}-adic value"),
            ValuedFieldConfig::Tadic { p } => write!(f, "F_{p}(t) with t-adic value"),
        }
    }
}

pub(crate) fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= p {
        if p % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// A computable field with a non-Archimedean absolute value.
///
/// Implementors are cheap descriptors (they hold the prime); elements are
/// canonical, so `==` on elements is field equality.
pub trait ValuedField: Clone + fmt::Debug + PartialEq + Eq + Send + Sync + 'static {
    type Elem: Clone + fmt::Debug + fmt::Display + PartialEq + Eq + Hash + Send + Sync + 'static;

    fn config(&self) -> ValuedFieldConfig;

    fn characteristic(&self) -> u64 {
        self.config().characteristic()
    }

    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn is_zero(&self, a: &Self::Elem) -> bool;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn neg(&self, a: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn inv(&self, a: &Self::Elem) -> Result<Self::Elem>;
    fn from_bigint(&self, n: &BigInt) -> Self::Elem;

    /// Normalized `log|a|`; `-inf` for zero.
    fn logabs(&self, a: &Self::Elem) -> LogValue;

    /// The `p^s`-th root of `a`, if it exists in this field.
    fn prime_power_root(&self, a: &Self::Elem, s: u32) -> Option<Self::Elem>;

    /// An injective endomorphism `sigma` whose image consists of `p^s`-th
    /// powers and which scales `log|.|` by `p^s`. `None` in characteristic 0.
    fn frobenius_twist(&self, _a: &Self::Elem, _s: u32) -> Option<Self::Elem> {
        None
    }

    /// Constants that the polynomial grammar may refer to by name (`t`).
    fn named_constant(&self, name: &str) -> Option<Self::Elem>;

    /// Random element; `spread` loosely controls size and valuation range.
    fn sample(&self, rng: &mut dyn RngCore, spread: u32) -> Self::Elem;

    /// Random element drawn from a pool that grows with `width`; used where
    /// a generic choice is needed (evaluation points, completions).
    fn sample_generic(&self, rng: &mut dyn RngCore, width: u32) -> Self::Elem;

    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        self.add(a, &self.neg(b))
    }

    fn div(&self, a: &Self::Elem, b: &Self::Elem) -> Result<Self::Elem> {
        Ok(self.mul(a, &self.inv(b)?))
    }

    fn from_i64(&self, n: i64) -> Self::Elem {
        self.from_bigint(&BigInt::from(n))
    }

    fn is_one(&self, a: &Self::Elem) -> bool {
        *a == self.one()
    }

    fn pow(&self, a: &Self::Elem, mut e: u64) -> Self::Elem {
        let mut base = a.clone();
        let mut acc = self.one();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            e >>= 1;
            if e > 0 {
                base = self.mul(&base, &base);
            }
        }
        acc
    }

    /// Fails with [`crate::Error::ConfigMismatch`] if the two descriptors differ.
    fn ensure_same(&self, other: &Self) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(crate::Error::ConfigMismatch(
                self.config().to_string(),
                other.config().to_string(),
            ))
        }
    }
}

/// `C(n, k)` as a field element (Lucas' theorem in positive characteristic).
pub fn binomial_in<F: ValuedField>(field: &F, n: u64, k: u64) -> F::Elem {
    if k > n {
        return field.zero();
    }
    let p = field.characteristic();
    if p == 0 {
        return field.from_bigint(&binomial_big(n, k));
    }
    let (mut n, mut k) = (n, k);
    let mut acc: u64 = 1;
    while k > 0 || n > 0 {
        let (ni, ki) = (n % p, k % p);
        if ki > ni {
            return field.zero();
        }
        let c = binomial_big(ni, ki) % BigInt::from(p);
        let c: u64 = c.try_into().expect("residue fits in u64");
        acc = ((acc as u128 * c as u128) % p as u128) as u64;
        n /= p;
        k /= p;
    }
    field.from_i64(acc as i64)
}

/// Exact binomial coefficient.
pub fn binomial_big(n: u64, k: u64) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::from(1u8);
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

/// `p`-adic valuation of a nonzero integer.
pub(crate) fn int_valuation(n: &BigInt, p: u64) -> i64 {
    debug_assert!(!n.is_zero());
    let p = BigInt::from(p);
    let mut n = n.clone();
    let mut v = 0;
    while (&n % &p).is_zero() {
        n /= &p;
        v += 1;
    }
    v
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lucas_matches_direct_reduction() {
        let f = TadicFunctionField::new(3).unwrap();
        for n in 0..30u64 {
            for k in 0..=n {
                let direct = binomial_big(n, k) % BigInt::from(3);
                let direct: i64 = direct.try_into().unwrap();
                assert_eq!(binomial_in(&f, n, k), f.from_i64(direct), "C({n},{k})");
            }
        }
    }

    #[test]
    fn log_value_order_puts_neg_infinity_first() {
        assert!(LogValue::NegInfinity < LogValue::from_int(-100));
        assert!(LogValue::from_int(-1) < LogValue::from_int(0));
        assert_eq!(LogValue::NegInfinity + LogValue::from_int(3), LogValue::NegInfinity);
    }

    #[test]
    fn config_rejects_composite() {
        assert!(ValuedFieldConfig::Padic { p: 4 }.validate().is_err());
        assert!(ValuedFieldConfig::Tadic { p: 5 }.validate().is_ok());
        assert_eq!(ValuedFieldConfig::Tadic { p: 5 }.characteristic(), 5);
        assert_eq!(ValuedFieldConfig::Padic { p: 5 }.characteristic(), 0);
    }
}
