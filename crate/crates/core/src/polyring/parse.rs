use num_bigint::BigInt;

use super::Polynomial;
use crate::error::{Error, Result};
use crate::valfield::ValuedField;

/// Which variable names a polynomial string may use.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum VariableScheme {
    /// `z1..zm` (with `z`, `w` accepted for `z1`, `z2`).
    Domain(usize),
    /// Homogeneous coordinates `x0..xM` (`M + 1` variables).
    Ambient(usize),
}

impl VariableScheme {
    pub fn nvars(&self) -> usize {
        match *self {
            VariableScheme::Domain(m) => m,
            VariableScheme::Ambient(m) => m + 1,
        }
    }

    fn lookup(&self, name: &str) -> Option<usize> {
        match *self {
            VariableScheme::Domain(m) => {
                let idx = match name {
                    "z" => Some(0),
                    "w" => Some(1),
                    _ => name.strip_prefix('z')?.parse::<usize>().ok()?.checked_sub(1),
                }?;
                (idx < m).then_some(idx)
            }
            VariableScheme::Ambient(m) => {
                let idx = name.strip_prefix('x')?.parse::<usize>().ok()?;
                (idx <= m).then_some(idx)
            }
        }
    }

    /// Names used when printing polynomials in this scheme.
    pub fn names(&self) -> Vec<String> {
        match *self {
            VariableScheme::Domain(m) => (1..=m).map(|i| format!("z{i}")).collect(),
            VariableScheme::Ambient(m) => (0..=m).map(|i| format!("x{i}")).collect(),
        }
    }
}

struct Parser<'a, F: ValuedField> {
    src: &'a str,
    bytes: &'a [u8],
    pos: usize,
    field: &'a F,
    scheme: VariableScheme,
}

/// Parses `+ - * / ^`, parentheses, integer literals and variable names.
/// Division is only allowed by constants.
pub fn parse_polynomial<F: ValuedField>(src: &str, field: &F, scheme: VariableScheme) -> Result<Polynomial<F>> {
    let mut p = Parser {
        src,
        bytes: src.as_bytes(),
        pos: 0,
        field,
        scheme,
    };
    let out = p.expr()?;
    p.skip_ws();
    if p.pos < p.bytes.len() {
        return Err(p.error(format!("unexpected character '{}'", p.bytes[p.pos] as char)));
    }
    Ok(out)
}

impl<F: ValuedField> Parser<'_, F> {
    fn error(&self, message: String) -> Error {
        let before = &self.src[..self.pos.min(self.src.len())];
        let line = before.matches('\n').count() + 1;
        let column = before.rsplit('\n').next().map_or(0, |s| s.chars().count()) + 1;
        Error::Parse { line, column, message }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.bytes.get(self.pos).copied()
    }

    fn nvars(&self) -> usize {
        self.scheme.nvars()
    }

    fn expr(&mut self) -> Result<Polynomial<F>> {
        let mut acc = self.term()?;
        while let Some(c @ (b'+' | b'-')) = self.peek() {
            self.pos += 1;
            let rhs = self.term()?;
            acc = if c == b'+' { &acc + &rhs } else { &acc - &rhs };
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<Polynomial<F>> {
        let mut acc = self.unary()?;
        while let Some(c @ (b'*' | b'/')) = self.peek() {
            let at = self.pos;
            self.pos += 1;
            let rhs = self.unary()?;
            if c == b'*' {
                acc = &acc * &rhs;
            } else {
                let Some(k) = rhs.as_constant() else {
                    self.pos = at;
                    return Err(self.error("division by a non-constant".into()));
                };
                let inv = self.field.inv(&k).map_err(|_| {
                    self.pos = at;
                    self.error("division by zero".into())
                })?;
                acc = acc.scale(&inv);
            }
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<Polynomial<F>> {
        match self.peek() {
            Some(b'-') => {
                self.pos += 1;
                Ok(-&self.unary()?)
            }
            Some(b'+') => {
                self.pos += 1;
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<Polynomial<F>> {
        let base = self.atom()?;
        if self.peek() == Some(b'^') {
            self.pos += 1;
            self.skip_ws();
            let start = self.pos;
            while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_digit() {
                self.pos += 1;
            }
            if start == self.pos {
                return Err(self.error("expected a non-negative integer exponent".into()));
            }
            let e: u64 = self.src[start..self.pos]
                .parse()
                .ok()
                .filter(|&e| e <= 100_000)
                .ok_or_else(|| {
                    self.pos = start;
                    self.error("exponent out of range".into())
                })?;
            return Ok(base.pow(e));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Polynomial<F>> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let inner = self.expr()?;
                if self.peek() != Some(b')') {
                    return Err(self.error("expected ')'".into()));
                }
                self.pos += 1;
                Ok(inner)
            }
            Some(c) if c.is_ascii_digit() => {
                let start = self.pos;
                while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_digit() {
                    self.pos += 1;
                }
                let n: BigInt = self.src[start..self.pos].parse().expect("digits parse");
                Ok(Polynomial::constant(self.field, self.nvars(), self.field.from_bigint(&n)))
            }
            Some(c) if c.is_ascii_alphabetic() => {
                let start = self.pos;
                while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_alphanumeric() {
                    self.pos += 1;
                }
                let name = &self.src[start..self.pos];
                if let Some(i) = self.scheme.lookup(name) {
                    return Ok(Polynomial::var(self.field, self.nvars(), i));
                }
                if let Some(k) = self.field.named_constant(name) {
                    return Ok(Polynomial::constant(self.field, self.nvars(), k));
                }
                self.pos = start;
                Err(self.error(format!("unknown identifier '{name}'")))
            }
            Some(c) => Err(self.error(format!("unexpected character '{}'", c as char))),
            None => Err(self.error("unexpected end of input".into())),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::valfield::{PadicRationals, TadicFunctionField};
    use num_rational::BigRational;

    #[test]
    fn parses_domain_and_ambient() {
        let q = PadicRationals::new(5).unwrap();
        let p = parse_polynomial("(z1 + 1)*(z1 - 1)", &q, VariableScheme::Domain(1)).unwrap();
        assert_eq!(p.to_string(), "z^2 - 1");
        let h = parse_polynomial("x0*x2 - x1^2", &q, VariableScheme::Ambient(2)).unwrap();
        assert_eq!(h.homogeneous_degree(), Some(2));
        let r = parse_polynomial("1/2*z - 3/4", &q, VariableScheme::Domain(1)).unwrap();
        assert_eq!(r.coeff(&crate::polyring::MultiIndex::new(vec![0])), BigRational::new((-3).into(), 4.into()));
        let zw = parse_polynomial("z*w", &q, VariableScheme::Domain(2)).unwrap();
        assert_eq!(zw, parse_polynomial("z1 * z2", &q, VariableScheme::Domain(2)).unwrap());
    }

    #[test]
    fn parses_t_coefficients() {
        let f = TadicFunctionField::new(2).unwrap();
        let p = parse_polynomial("(z - t)^2", &f, VariableScheme::Domain(1)).unwrap();
        let q = parse_polynomial("z^2 + t^2", &f, VariableScheme::Domain(1)).unwrap();
        assert_eq!(p, q);
        let r = parse_polynomial("z/(1+t)", &f, VariableScheme::Domain(1)).unwrap();
        assert_eq!(&r * &parse_polynomial("1+t", &f, VariableScheme::Domain(1)).unwrap(), parse_polynomial("z", &f, VariableScheme::Domain(1)).unwrap());
    }

    #[test]
    fn reports_positions() {
        let q = PadicRationals::new(5).unwrap();
        let err = parse_polynomial("z1 + * 2", &q, VariableScheme::Domain(1)).unwrap_err();
        assert_eq!(err, Error::Parse { line: 1, column: 6, message: "unexpected character '*'".into() });
        let err = parse_polynomial("x0 + x3", &q, VariableScheme::Ambient(2)).unwrap_err();
        assert!(matches!(err, Error::Parse { column: 6, .. }));
        let err = parse_polynomial("z/z", &q, VariableScheme::Domain(1)).unwrap_err();
        assert!(matches!(err, Error::Parse { column: 2, .. }));
        let err = parse_polynomial("t", &q, VariableScheme::Domain(1)).unwrap_err();
        assert!(matches!(err, Error::Parse { .. }));
    }
}
