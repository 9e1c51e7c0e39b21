use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::{Rng, RngCore};

use super::{int_valuation, is_prime, LogValue, ValuedField, ValuedFieldConfig};
use crate::error::{Error, Result};

/// The rationals with the `p`-adic absolute value, `log|x| = -v_p(x)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct PadicRationals {
    p: u64,
}

impl PadicRationals {
    pub fn new(p: u64) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::Input(format!("{p} is not prime")));
        }
        Ok(Self { p })
    }

    pub fn prime(&self) -> u64 {
        self.p
    }

    /// `p`-adic valuation, `None` for zero.
    pub fn valuation(&self, x: &BigRational) -> Option<i64> {
        if x.is_zero() {
            return None;
        }
        Some(int_valuation(x.numer(), self.p) - int_valuation(x.denom(), self.p))
    }
}

impl ValuedField for PadicRationals {
    type Elem = BigRational;

    fn config(&self) -> ValuedFieldConfig {
        ValuedFieldConfig::Padic { p: self.p }
    }

    fn zero(&self) -> BigRational {
        BigRational::zero()
    }

    fn one(&self) -> BigRational {
        BigRational::one()
    }

    fn is_zero(&self, a: &BigRational) -> bool {
        a.is_zero()
    }

    fn add(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a + b
    }

    fn neg(&self, a: &BigRational) -> BigRational {
        -a
    }

    fn mul(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a * b
    }

    fn sub(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a - b
    }

    fn inv(&self, a: &BigRational) -> Result<BigRational> {
        if a.is_zero() {
            Err(Error::DivisionByZero)
        } else {
            Ok(a.recip())
        }
    }

    fn from_bigint(&self, n: &BigInt) -> BigRational {
        BigRational::from_integer(n.clone())
    }

    fn logabs(&self, a: &BigRational) -> LogValue {
        match self.valuation(a) {
            None => LogValue::NegInfinity,
            Some(v) => LogValue::from_int(-v),
        }
    }

    fn prime_power_root(&self, _a: &BigRational, _s: u32) -> Option<BigRational> {
        None
    }

    fn named_constant(&self, _name: &str) -> Option<BigRational> {
        None
    }

    fn sample(&self, rng: &mut dyn RngCore, spread: u32) -> BigRational {
        let spread = spread.max(1) as i64;
        let mut num: i64 = rng.gen_range(-spread..=spread);
        while num == 0 {
            num = rng.gen_range(-spread..=spread);
        }
        let den: i64 = rng.gen_range(1..=spread);
        let shift: i32 = rng.gen_range(-2..=2);
        let p = BigInt::from(self.p);
        let mut x = BigRational::new(BigInt::from(num), BigInt::from(den));
        if shift >= 0 {
            x *= BigRational::from_integer(num_traits::pow(p, shift as usize));
        } else {
            x /= BigRational::from_integer(num_traits::pow(p, (-shift) as usize));
        }
        x
    }

    fn sample_generic(&self, rng: &mut dyn RngCore, width: u32) -> BigRational {
        let w = 8i64 << width.min(40);
        BigRational::from_integer(BigInt::from(rng.gen_range(-w..=w)))
    }
}
