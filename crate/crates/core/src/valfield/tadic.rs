use std::fmt;

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use rand::{Rng, RngCore};

use super::{is_prime, LogValue, ValuedField, ValuedFieldConfig};
use crate::error::{Error, Result};

/// Dense univariate polynomial over `F_p`, little-endian, no trailing zeros.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct FpPoly(pub Vec<u64>);

impl FpPoly {
    fn trimmed(mut v: Vec<u64>) -> Self {
        while v.last() == Some(&0) {
            v.pop();
        }
        FpPoly(v)
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.0.len().checked_sub(1)
    }

    /// Exponent of the lowest nonzero term.
    pub fn order(&self) -> Option<usize> {
        self.0.iter().position(|&c| c != 0)
    }

    fn lead(&self) -> u64 {
        *self.0.last().unwrap_or(&0)
    }
}

fn mulmod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

fn invmod(a: u64, p: u64) -> u64 {
    let mut base = a % p;
    let mut e = p - 2;
    let mut acc = 1;
    while e > 0 {
        if e & 1 == 1 {
            acc = mulmod(acc, base, p);
        }
        base = mulmod(base, base, p);
        e >>= 1;
    }
    acc
}

fn padd(a: &FpPoly, b: &FpPoly, p: u64) -> FpPoly {
    let n = a.0.len().max(b.0.len());
    let v = (0..n)
        .map(|i| (a.0.get(i).copied().unwrap_or(0) + b.0.get(i).copied().unwrap_or(0)) % p)
        .collect();
    FpPoly::trimmed(v)
}

fn pneg(a: &FpPoly, p: u64) -> FpPoly {
    FpPoly::trimmed(a.0.iter().map(|&c| (p - c) % p).collect())
}

fn pscale(a: &FpPoly, c: u64, p: u64) -> FpPoly {
    FpPoly::trimmed(a.0.iter().map(|&x| mulmod(x, c, p)).collect())
}

fn pmul(a: &FpPoly, b: &FpPoly, p: u64) -> FpPoly {
    if a.is_zero() || b.is_zero() {
        return FpPoly::default();
    }
    let mut v = vec![0u64; a.0.len() + b.0.len() - 1];
    for (i, &x) in a.0.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.0.iter().enumerate() {
            v[i + j] = (v[i + j] + mulmod(x, y, p)) % p;
        }
    }
    FpPoly::trimmed(v)
}

fn pdivrem(a: &FpPoly, b: &FpPoly, p: u64) -> (FpPoly, FpPoly) {
    let db = b.degree().expect("division by zero polynomial");
    let inv_lead = invmod(b.lead(), p);
    let mut r = a.0.clone();
    if a.0.len() < b.0.len() {
        return (FpPoly::default(), a.clone());
    }
    let mut q = vec![0u64; a.0.len() - db];
    for i in (db..r.len()).rev() {
        let c = mulmod(r[i], inv_lead, p);
        if c == 0 {
            continue;
        }
        q[i - db] = c;
        for (j, &bj) in b.0.iter().enumerate() {
            let k = i - db + j;
            r[k] = (r[k] + p - mulmod(c, bj, p)) % p;
        }
    }
    (FpPoly::trimmed(q), FpPoly::trimmed(r))
}

fn pmonic(a: &FpPoly, p: u64) -> FpPoly {
    if a.is_zero() {
        return a.clone();
    }
    pscale(a, invmod(a.lead(), p), p)
}

fn pgcd(a: &FpPoly, b: &FpPoly, p: u64) -> FpPoly {
    let (mut a, mut b) = (a.clone(), b.clone());
    while !b.is_zero() {
        let (_, r) = pdivrem(&a, &b, p);
        a = b;
        b = r;
    }
    pmonic(&a, p)
}

fn write_fp_poly(f: &mut fmt::Formatter<'_>, a: &FpPoly) -> fmt::Result {
    if a.is_zero() {
        return write!(f, "0");
    }
    let mut first = true;
    for (i, &c) in a.0.iter().enumerate().rev() {
        if c == 0 {
            continue;
        }
        if !first {
            write!(f, " + ")?;
        }
        first = false;
        match (i, c) {
            (0, c) => write!(f, "{c}")?,
            (1, 1) => write!(f, "t")?,
            (1, c) => write!(f, "{c}*t")?,
            (i, 1) => write!(f, "t^{i}")?,
            (i, c) => write!(f, "{c}*t^{i}")?,
        }
    }
    Ok(())
}

/// Reduced element `num/den` of `F_p(t)`; `den` is monic and coprime to `num`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FpRatFn {
    num: FpPoly,
    den: FpPoly,
}

impl FpRatFn {
    pub fn numer(&self) -> &FpPoly {
        &self.num
    }

    pub fn denom(&self) -> &FpPoly {
        &self.den
    }

    fn is_zero(&self) -> bool {
        self.num.is_zero()
    }
}

impl fmt::Display for FpRatFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let simple_num = self.num.0.iter().filter(|&&c| c != 0).count() <= 1;
        if self.den.0 == [1] {
            if simple_num {
                write_fp_poly(f, &self.num)
            } else {
                write!(f, "(")?;
                write_fp_poly(f, &self.num)?;
                write!(f, ")")
            }
        } else {
            write!(f, "(")?;
            write_fp_poly(f, &self.num)?;
            write!(f, ")/(")?;
            write_fp_poly(f, &self.den)?;
            write!(f, ")")
        }
    }
}

/// `F_p(t)` with the t-adic absolute value, `log|x| = -ord_t(x)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct TadicFunctionField {
    p: u64,
}

impl TadicFunctionField {
    pub fn new(p: u64) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::Input(format!("{p} is not prime")));
        }
        Ok(Self { p })
    }

    pub fn prime(&self) -> u64 {
        self.p
    }

    /// Builds and reduces `num/den` from raw coefficient lists.
    pub fn element(&self, num: &[u64], den: &[u64]) -> Result<FpRatFn> {
        let p = self.p;
        let num = FpPoly::trimmed(num.iter().map(|c| c % p).collect());
        let den = FpPoly::trimmed(den.iter().map(|c| c % p).collect());
        self.reduce(num, den)
    }

    /// Checks that an element is already in canonical form.
    pub fn is_canonical(&self, x: &FpRatFn) -> bool {
        let p = self.p;
        let coeffs_ok = x.num.0.iter().chain(&x.den.0).all(|&c| c < p);
        let trimmed = x.num.0.last() != Some(&0) && x.den.0.last() != Some(&0);
        coeffs_ok
            && trimmed
            && !x.den.is_zero()
            && x.den.lead() == 1
            && (if x.num.is_zero() { x.den.0 == [1] } else { pgcd(&x.num, &x.den, p).0 == [1] })
    }

    /// The variable `t`.
    pub fn t(&self) -> FpRatFn {
        FpRatFn {
            num: FpPoly(vec![0, 1]),
            den: FpPoly(vec![1]),
        }
    }

    fn reduce(&self, num: FpPoly, den: FpPoly) -> Result<FpRatFn> {
        let p = self.p;
        if den.is_zero() {
            return Err(Error::DivisionByZero);
        }
        if num.is_zero() {
            return Ok(self.zero());
        }
        let g = pgcd(&num, &den, p);
        let (num, _) = pdivrem(&num, &g, p);
        let (den, _) = pdivrem(&den, &g, p);
        let c = invmod(den.lead(), p);
        Ok(FpRatFn {
            num: pscale(&num, c, p),
            den: pscale(&den, c, p),
        })
    }

    fn random_poly(&self, rng: &mut dyn RngCore, max_deg: usize) -> FpPoly {
        let deg = rng.gen_range(0..=max_deg);
        FpPoly::trimmed((0..=deg).map(|_| rng.gen_range(0..self.p)).collect())
    }

    fn shift(&self, x: FpRatFn, k: i32) -> FpRatFn {
        let mut mono = vec![0u64; k.unsigned_abs() as usize + 1];
        mono[k.unsigned_abs() as usize] = 1;
        let mono = FpPoly(mono);
        let (num, den) = if k >= 0 {
            (pmul(&x.num, &mono, self.p), x.den)
        } else {
            (x.num, pmul(&x.den, &mono, self.p))
        };
        self.reduce(num, den).expect("nonzero denominator")
    }
}

impl ValuedField for TadicFunctionField {
    type Elem = FpRatFn;

    fn config(&self) -> ValuedFieldConfig {
        ValuedFieldConfig::Tadic { p: self.p }
    }

    fn zero(&self) -> FpRatFn {
        FpRatFn {
            num: FpPoly::default(),
            den: FpPoly(vec![1]),
        }
    }

    fn one(&self) -> FpRatFn {
        FpRatFn {
            num: FpPoly(vec![1]),
            den: FpPoly(vec![1]),
        }
    }

    fn is_zero(&self, a: &FpRatFn) -> bool {
        a.is_zero()
    }

    fn add(&self, a: &FpRatFn, b: &FpRatFn) -> FpRatFn {
        let p = self.p;
        if a.is_zero() {
            return b.clone();
        }
        if b.is_zero() {
            return a.clone();
        }
        if a.den == b.den {
            return self.reduce(padd(&a.num, &b.num, p), a.den.clone()).unwrap();
        }
        let num = padd(&pmul(&a.num, &b.den, p), &pmul(&b.num, &a.den, p), p);
        self.reduce(num, pmul(&a.den, &b.den, p)).unwrap()
    }

    fn neg(&self, a: &FpRatFn) -> FpRatFn {
        FpRatFn {
            num: pneg(&a.num, self.p),
            den: a.den.clone(),
        }
    }

    fn mul(&self, a: &FpRatFn, b: &FpRatFn) -> FpRatFn {
        let p = self.p;
        if a.is_zero() || b.is_zero() {
            return self.zero();
        }
        self.reduce(pmul(&a.num, &b.num, p), pmul(&a.den, &b.den, p)).unwrap()
    }

    fn inv(&self, a: &FpRatFn) -> Result<FpRatFn> {
        if a.is_zero() {
            return Err(Error::DivisionByZero);
        }
        self.reduce(a.den.clone(), a.num.clone())
    }

    fn from_bigint(&self, n: &BigInt) -> FpRatFn {
        let p = BigInt::from(self.p);
        let r = ((n % &p) + &p) % &p;
        let r = r.to_u64().expect("residue fits");
        FpRatFn {
            num: FpPoly::trimmed(vec![r]),
            den: FpPoly(vec![1]),
        }
    }

    fn logabs(&self, a: &FpRatFn) -> LogValue {
        match a.num.order() {
            None => LogValue::NegInfinity,
            Some(on) => {
                let od = a.den.order().expect("nonzero denominator");
                LogValue::from_int(od as i64 - on as i64)
            }
        }
    }

    fn prime_power_root(&self, a: &FpRatFn, s: u32) -> Option<FpRatFn> {
        let q = (self.p as usize).checked_pow(s)?;
        let root = |f: &FpPoly| -> Option<FpPoly> {
            let mut out = Vec::new();
            for (i, &c) in f.0.iter().enumerate() {
                if i % q == 0 {
                    out.push(c);
                } else if c != 0 {
                    return None;
                }
            }
            // Frobenius is the identity on F_p.
            Some(FpPoly::trimmed(out))
        };
        Some(FpRatFn {
            num: root(&a.num)?,
            den: root(&a.den)?,
        })
    }

    /// `a(t) -> a(t^(p^s))`.
    fn frobenius_twist(&self, a: &FpRatFn, s: u32) -> Option<FpRatFn> {
        let q = (self.p as usize).checked_pow(s)?;
        let spread = |f: &FpPoly| {
            let mut out = vec![0; (f.0.len().max(1) - 1) * q + 1];
            for (i, &c) in f.0.iter().enumerate() {
                out[i * q] = c;
            }
            FpPoly::trimmed(out)
        };
        Some(FpRatFn { num: spread(&a.num), den: spread(&a.den) })
    }

    fn named_constant(&self, name: &str) -> Option<FpRatFn> {
        (name == "t").then(|| self.t())
    }

    fn sample(&self, rng: &mut dyn RngCore, spread: u32) -> FpRatFn {
        let deg = (spread as usize / 10).clamp(1, 3);
        let mut num = self.random_poly(rng, deg);
        while num.is_zero() {
            num = self.random_poly(rng, deg);
        }
        let mut den = self.random_poly(rng, 1);
        while den.is_zero() {
            den = self.random_poly(rng, 1);
        }
        let x = self.reduce(num, den).unwrap();
        let k: i32 = rng.gen_range(-2..=2);
        self.shift(x, k)
    }

    fn sample_generic(&self, rng: &mut dyn RngCore, width: u32) -> FpRatFn {
        let poly = self.random_poly(rng, width as usize + 1);
        self.reduce(poly, FpPoly(vec![1])).unwrap()
    }
}
