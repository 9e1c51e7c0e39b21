//! Gauss norms, Newton polygons and the Nevanlinna functions `n`, `N`, `m`, `T`.
//!
//! Radii are handled in log coordinates: `r = |u|^(-rho)` for the uniformizer
//! `u`, so `log r = rho`. Every function here is piecewise linear in `rho`
//! with breakpoints read off a Newton polygon, and all values are exact
//! rationals.

use std::fmt;

use num_traits::{Signed, Zero};
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::polyring::{Polynomial, RationalFunction};
use crate::projgeom::{Hypersurface, ProjectiveMap};
use crate::truncation::{truncated_count, TruncationLevel};
use crate::valfield::{LogValue, ValuedField};
use crate::Rat;

/// `rho = log r` in normalized units.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct RadiusLog(pub Rat);

impl RadiusLog {
    pub fn new(rho: Rat) -> Self {
        RadiusLog(rho)
    }

    pub fn from_int(rho: i64) -> Self {
        RadiusLog(Rat::from_integer(rho.into()))
    }

    pub fn value(&self) -> &Rat {
        &self.0
    }
}

impl fmt::Display for RadiusLog {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl Serialize for RadiusLog {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.0.to_string())
    }
}

/// Upper convex hull of the points `(k, c_k)`, where `c_k` is the largest
/// `log|a_g|` over exponents of total degree `k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NewtonPolygon {
    vertices: Vec<(u64, Rat)>,
}

impl NewtonPolygon {
    /// Builds the hull of a point cloud; `None` if it is empty.
    pub fn from_points(points: impl IntoIterator<Item = (u64, Rat)>) -> Option<Self> {
        let mut best: std::collections::BTreeMap<u64, Rat> = Default::default();
        for (k, c) in points {
            best.entry(k)
                .and_modify(|v| {
                    if c > *v {
                        *v = c.clone()
                    }
                })
                .or_insert(c);
        }
        if best.is_empty() {
            return None;
        }
        let mut hull: Vec<(u64, Rat)> = Vec::new();
        for (k, c) in best {
            while hull.len() >= 2 {
                let (k1, c1) = &hull[hull.len() - 2];
                let (k2, c2) = &hull[hull.len() - 1];
                // Drop the middle point unless slopes strictly decrease.
                let lhs = (c2 - c1) * Rat::from_integer((k - k2).into());
                let rhs = (&c - c2) * Rat::from_integer((k2 - k1).into());
                if lhs <= rhs {
                    hull.pop();
                } else {
                    break;
                }
            }
            hull.push((k, c));
        }
        Some(NewtonPolygon { vertices: hull })
    }

    /// Newton polygon of a nonzero polynomial.
    pub fn of<F: ValuedField>(f: &Polynomial<F>) -> Option<Self> {
        let field = f.field();
        Self::from_points(f.terms().map(|(e, c)| (e.degree(), field.logabs(c).expect_finite())))
    }

    pub fn vertices(&self) -> &[(u64, Rat)] {
        &self.vertices
    }

    /// `max_k (c_k + k rho)`.
    pub fn envelope(&self, rho: &Rat) -> Rat {
        self.vertices
            .iter()
            .map(|(k, c)| c + Rat::from_integer((*k).into()) * rho)
            .max()
            .expect("nonempty hull")
    }

    /// Radii where the dominant degree jumps, strictly increasing.
    pub fn breakpoints(&self) -> Vec<Rat> {
        self.vertices
            .windows(2)
            .map(|w| {
                let (k1, c1) = &w[0];
                let (k2, c2) = &w[1];
                -(c2 - c1) / Rat::from_integer((k2 - k1).into())
            })
            .collect()
    }

    /// Largest degree attaining the envelope at `rho`.
    pub fn dominant_degree(&self, rho: &Rat) -> u64 {
        let bps = self.breakpoints();
        let j = bps.iter().take_while(|b| *b <= rho).count();
        self.vertices[j].0
    }

    pub fn lowest_degree(&self) -> u64 {
        self.vertices[0].0
    }

    /// `N(rho) = k_0 rho + sum_{rho_i < rho} (k_{i+1} - k_i)(rho - rho_i)`.
    pub fn counting(&self, rho: &Rat) -> Rat {
        let mut acc = Rat::from_integer(self.lowest_degree().into()) * rho;
        for (w, b) in self.vertices.windows(2).zip(self.breakpoints()) {
            if b < *rho {
                acc += Rat::from_integer((w[1].0 - w[0].0).into()) * (rho - &b);
            }
        }
        acc
    }
}

/// `log|f|_rho`; `-inf` for the zero polynomial.
pub fn gauss_norm<F: ValuedField>(f: &Polynomial<F>, rho: &RadiusLog) -> LogValue {
    match NewtonPolygon::of(f) {
        None => LogValue::NegInfinity,
        Some(np) => LogValue::Finite(np.envelope(&rho.0)),
    }
}

fn polygon<F: ValuedField>(f: &Polynomial<F>) -> Result<NewtonPolygon> {
    NewtonPolygon::of(f).ok_or_else(|| Error::Input("zero polynomial has no zero-counting function".into()))
}

/// `n_f(0, r)`: largest total degree attaining the Gauss norm.
pub fn zero_count<F: ValuedField>(f: &Polynomial<F>, rho: &RadiusLog) -> Result<u64> {
    Ok(polygon(f)?.dominant_degree(&rho.0))
}

/// `n_f(0, 0)`: smallest total degree in the support.
pub fn zero_count_at_origin<F: ValuedField>(f: &Polynomial<F>) -> Result<u64> {
    Ok(polygon(f)?.lowest_degree())
}

/// `N_f(0, r)`.
pub fn counting_function<F: ValuedField>(f: &Polynomial<F>, rho: &RadiusLog) -> Result<Rat> {
    Ok(polygon(f)?.counting(&rho.0))
}

/// `(N_f(0, r), N_f(inf, r))` from numerator and denominator.
pub fn counting_function_rational<F: ValuedField>(
    f: &RationalFunction<F>,
    rho: &RadiusLog,
) -> Result<(Rat, Rat)> {
    if f.is_zero() {
        return Err(Error::Input("zero rational function".into()));
    }
    Ok((counting_function(f.numer(), rho)?, counting_function(f.denom(), rho)?))
}

/// `log|f|_rho` for a nonzero rational function.
pub fn rational_gauss_norm<F: ValuedField>(f: &RationalFunction<F>, rho: &RadiusLog) -> Result<Rat> {
    if f.is_zero() {
        return Err(Error::Input("zero rational function".into()));
    }
    Ok(gauss_norm(f.numer(), rho).expect_finite() - gauss_norm(f.denom(), rho).expect_finite())
}

/// The constant `C_f` with `N(0) - N(inf) = log|f| + C_f` on the whole grid.
pub fn poisson_jensen_constant<F: ValuedField>(f: &RationalFunction<F>, grid: &[RadiusLog]) -> Result<Rat> {
    let mut constant: Option<Rat> = None;
    for rho in grid {
        let (z, p) = counting_function_rational(f, rho)?;
        let c = z - p - rational_gauss_norm(f, rho)?;
        match &constant {
            None => constant = Some(c),
            Some(prev) if *prev != c => {
                return Err(Error::InternalConsistency(format!(
                    "N(0) - N(inf) - log|f| varies over the grid ({prev} vs {c} at rho = {rho})"
                )))
            }
            _ => {}
        }
    }
    constant.ok_or_else(|| Error::Input("empty radius grid".into()))
}

/// Target of a proximity function.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Target<F: ValuedField> {
    Infinity,
    Value(F::Elem),
}

fn log_plus(x: Rat) -> Rat {
    if x.is_positive() {
        x
    } else {
        Rat::zero()
    }
}

/// `m_f(inf, r) = log+|f|_r` and `m_f(a, r) = m_{1/(f-a)}(inf, r)`.
pub fn proximity<F: ValuedField>(f: &RationalFunction<F>, target: &Target<F>, rho: &RadiusLog) -> Result<Rat> {
    match target {
        Target::Infinity => Ok(log_plus(rational_gauss_norm(f, rho)?)),
        Target::Value(a) => {
            let shifted = f.sub(&RationalFunction::from_polynomial(Polynomial::constant(
                f.field(),
                f.nvars(),
                a.clone(),
            )))?;
            if shifted.is_zero() {
                return Err(Error::Input(format!("function is identically {a}")));
            }
            Ok(log_plus(-rational_gauss_norm(&shifted, rho)?))
        }
    }
}

/// `T_f(r) = m_f(inf, r) + N_f(inf, r)`.
pub fn characteristic<F: ValuedField>(f: &RationalFunction<F>, rho: &RadiusLog) -> Result<Rat> {
    let m = proximity(f, &Target::Infinity, rho)?;
    let (_, poles) = counting_function_rational(f, rho)?;
    Ok(m + poles)
}

/// `T_f(r) = log ||f||_r = max_i log|f_i|_r` for a reduced representation.
pub fn map_characteristic<F: ValuedField>(map: &ProjectiveMap<F>, rho: &RadiusLog) -> Result<Rat> {
    map.coordinates()
        .iter()
        .map(|c| gauss_norm(c, rho))
        .max()
        .and_then(|v| v.value().cloned())
        .ok_or_else(|| Error::Input("zero map".into()))
}

/// `m_f(Q, r) = d log||f||_r + log||Q|| - log|Q(f)|_r`.
pub fn map_proximity<F: ValuedField>(map: &ProjectiveMap<F>, q: &Hypersurface<F>, rho: &RadiusLog) -> Result<Rat> {
    let composite = composite_nonzero(map, q)?;
    let t = map_characteristic(map, rho)?;
    Ok(Rat::from_integer(q.degree().into()) * t + q.norm() - gauss_norm(&composite, rho).expect_finite())
}

/// `N^{(l)}_f(Q, r) = N^{(l)}_{Q(f)}(0, r)`.
pub fn map_counting<F: ValuedField>(
    map: &ProjectiveMap<F>,
    q: &Hypersurface<F>,
    rho: &RadiusLog,
    level: TruncationLevel,
) -> Result<Rat> {
    let composite = composite_nonzero(map, q)?;
    truncated_count(&composite, rho, level)
}

fn composite_nonzero<F: ValuedField>(map: &ProjectiveMap<F>, q: &Hypersurface<F>) -> Result<Polynomial<F>> {
    let composite = q.evaluate(map)?;
    if composite.is_zero() {
        return Err(Error::MapInHypersurface(q.to_string()));
    }
    Ok(composite)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polyring::{parse_polynomial, VariableScheme};
    use crate::valfield::PadicRationals;

    fn r(n: i64) -> Rat {
        Rat::from_integer(n.into())
    }

    fn rho(n: i64) -> RadiusLog {
        RadiusLog::from_int(n)
    }

    fn poly(s: &str) -> Polynomial<PadicRationals> {
        parse_polynomial(s, &PadicRationals::new(5).unwrap(), VariableScheme::Domain(1)).unwrap()
    }

    fn rat(num: &str, den: &str) -> RationalFunction<PadicRationals> {
        RationalFunction::new(poly(num), poly(den)).unwrap()
    }

    #[test]
    fn gauss_norm_examples() {
        let f = poly("z^2 - 5*z");
        assert_eq!(gauss_norm(&f, &rho(0)), LogValue::from_int(0));
        assert_eq!(gauss_norm(&f, &rho(-2)), LogValue::from_int(-3));
        let c = poly("25");
        for k in -3..4 {
            assert_eq!(gauss_norm(&c, &rho(k)), LogValue::from_int(-2));
        }
        assert_eq!(gauss_norm(&poly("0"), &rho(1)), LogValue::NegInfinity);
    }

    #[test]
    fn zero_count_examples() {
        let f = poly("z^2 - 5*z");
        assert_eq!(zero_count(&f, &rho(0)).unwrap(), 2);
        assert_eq!(zero_count(&f, &rho(-2)).unwrap(), 1);
        // At the breakpoint the sup picks the larger degree.
        assert_eq!(zero_count(&f, &rho(-1)).unwrap(), 2);
        let m = poly("z^4");
        assert_eq!(zero_count(&m, &rho(-7)).unwrap(), 4);
        assert_eq!(zero_count_at_origin(&m).unwrap(), 4);
        assert!(zero_count(&poly("0"), &rho(0)).is_err());
    }

    #[test]
    fn counting_examples() {
        let f = poly("z^2 - 5*z");
        assert_eq!(counting_function(&f, &rho(0)).unwrap(), r(1));
        assert_eq!(counting_function(&f, &rho(2)).unwrap(), r(5));
        assert_eq!(counting_function(&poly("3"), &rho(9)).unwrap(), r(0));
        assert!(counting_function(&poly("0"), &rho(0)).is_err());
    }

    #[test]
    fn rational_counting_examples() {
        assert_eq!(counting_function_rational(&rat("1", "z"), &rho(1)).unwrap(), (r(0), r(1)));
        assert_eq!(counting_function_rational(&rat("z - 5", "z"), &rho(0)).unwrap(), (r(1), r(0)));
        assert_eq!(counting_function_rational(&rat("7", "1"), &rho(4)).unwrap(), (r(0), r(0)));
    }

    #[test]
    fn poisson_jensen_examples() {
        let grid: Vec<RadiusLog> = (-4..5).map(rho).collect();
        assert_eq!(poisson_jensen_constant(&rat("z^2 - 5*z", "1"), &grid).unwrap(), r(1));
        assert_eq!(poisson_jensen_constant(&rat("50", "1"), &grid).unwrap(), r(2));
        assert_eq!(poisson_jensen_constant(&rat("z", "1"), &grid).unwrap(), r(0));
        assert!(poisson_jensen_constant(&rat("z", "1"), &[]).is_err());
    }

    #[test]
    fn proximity_examples() {
        let z = rat("z", "1");
        assert_eq!(proximity(&z, &Target::Infinity, &rho(2)).unwrap(), r(2));
        assert_eq!(proximity(&z, &Target::Infinity, &rho(-3)).unwrap(), r(0));
        assert_eq!(proximity(&z, &Target::Value(r(0)), &rho(2)).unwrap(), r(0));
        assert!(proximity(&rat("4", "1"), &Target::Value(r(4)), &rho(0)).is_err());
    }

    #[test]
    fn characteristic_example() {
        assert_eq!(characteristic(&rat("z^2 - 5*z", "1"), &rho(2)).unwrap(), r(4));
        assert_eq!(characteristic(&rat("1", "z"), &rho(3)).unwrap(), r(3));
    }

    #[test]
    fn hull_drops_collinear_points() {
        let np = NewtonPolygon::from_points([(0, r(0)), (1, r(1)), (2, r(2)), (3, r(2))]).unwrap();
        assert_eq!(np.vertices(), &[(0, r(0)), (2, r(2)), (3, r(2))]);
        assert_eq!(np.breakpoints(), vec![r(-1), r(0)]);
    }
}
