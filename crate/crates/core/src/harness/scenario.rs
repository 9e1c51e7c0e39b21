//! Scenario files: JSON descriptions of a map, a variety and hypersurfaces.

use num_integer::Integer;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::nevanlinna::RadiusLog;
use crate::polyring::{parse_polynomial, Polynomial, VariableScheme};
use crate::projgeom::{default_degree_bound, Hypersurface, ProjectiveMap, Variety};
use crate::valfield::{ValuedField, ValuedFieldConfig};
use crate::Rat;

/// Grid used when a scenario does not give one.
pub const DEFAULT_GRID: &str = "-2:8:1";

const MAX_GRID_POINTS: usize = 10_000;

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VarietySpec {
    #[serde(default)]
    pub generators: Vec<String>,
    /// Declared dimension; projective space when absent and there are no
    /// generators.
    #[serde(default)]
    pub dim: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum HypersurfaceSpec {
    Text(String),
    Full {
        poly: String,
        #[serde(default)]
        degree: Option<u64>,
    },
}

impl HypersurfaceSpec {
    fn text(&self) -> &str {
        match self {
            HypersurfaceSpec::Text(s) | HypersurfaceSpec::Full { poly: s, .. } => s,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum GridSpec {
    Range(String),
    List(Vec<String>),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    #[serde(default)]
    pub name: Option<String>,
    pub field: ValuedFieldConfig,
    pub ambient_dim: usize,
    pub domain_vars: usize,
    #[serde(default)]
    pub variety: VarietySpec,
    pub map: Vec<String>,
    pub hypersurfaces: Vec<HypersurfaceSpec>,
    #[serde(rename = "N")]
    pub n_sub: usize,
    #[serde(default)]
    pub d: Option<u64>,
    #[serde(default)]
    pub grid: Option<GridSpec>,
    #[serde(default)]
    pub degree_bound: Option<u64>,
    #[serde(default)]
    pub seed: Option<u64>,
}

impl Scenario {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("scenario serializes")
    }

    pub fn display_name(&self) -> String {
        self.name.clone().unwrap_or_else(|| "scenario".into())
    }
}

fn parse_rat(s: &str) -> Result<Rat> {
    let s = s.trim();
    let bad = || Error::Input(format!("'{s}' is not a rational number"));
    match s.split_once('/') {
        Some((a, b)) => {
            let a: num_bigint::BigInt = a.trim().parse().map_err(|_| bad())?;
            let b: num_bigint::BigInt = b.trim().parse().map_err(|_| bad())?;
            if b.is_zero() {
                return Err(bad());
            }
            Ok(Rat::new(a, b))
        }
        None => Ok(Rat::from_integer(s.parse().map_err(|_| bad())?)),
    }
}

/// Parses `"a:b:step"` (inclusive) or a comma-separated list of rationals.
pub fn parse_grid(spec: &str) -> Result<Vec<Rat>> {
    let parts: Vec<&str> = spec.split(':').collect();
    let mut out = match parts.as_slice() {
        [a, b, step] => {
            let (a, b, step) = (parse_rat(a)?, parse_rat(b)?, parse_rat(step)?);
            if !step.is_positive() || b < a {
                return Err(Error::Input(format!("grid '{spec}' needs a <= b and a positive step")));
            }
            let count = ((&b - &a) / &step).floor().to_integer();
            let count: usize = count
                .try_into()
                .ok()
                .filter(|c| *c < MAX_GRID_POINTS)
                .ok_or_else(|| Error::Input(format!("grid '{spec}' has too many points")))?;
            (0..=count).map(|i| &a + &step * Rat::from_integer(i.into())).collect::<Vec<_>>()
        }
        [_] => spec.split(',').map(parse_rat).collect::<Result<Vec<_>>>()?,
        _ => return Err(Error::Input(format!("grid '{spec}' is neither a:b:step nor a list"))),
    };
    out.sort();
    out.dedup();
    if out.is_empty() {
        return Err(Error::Input("empty grid".into()));
    }
    Ok(out)
}

fn resolve_grid(spec: &Option<GridSpec>) -> Result<Vec<Rat>> {
    match spec {
        None => parse_grid(DEFAULT_GRID),
        Some(GridSpec::Range(s)) => parse_grid(s),
        Some(GridSpec::List(items)) => {
            let mut v = items.iter().map(|s| parse_rat(s)).collect::<Result<Vec<_>>>()?;
            v.sort();
            v.dedup();
            if v.is_empty() {
                return Err(Error::Input("empty grid".into()));
            }
            Ok(v)
        }
    }
}

fn locate(what: &str, e: Error) -> Error {
    match e {
        Error::Parse { line, column, message } => Error::Parse { line, column, message: format!("{what}: {message}") },
        other => other,
    }
}

/// A scenario resolved over a concrete coefficient field.
#[derive(Clone, Debug)]
pub struct Problem<F: ValuedField> {
    pub name: String,
    pub field: F,
    pub variety: Variety<F>,
    pub map: ProjectiveMap<F>,
    /// Whether a common factor had to be divided out of the map.
    pub map_was_reduced: bool,
    pub hypersurfaces: Vec<Hypersurface<F>>,
    pub n_sub: usize,
    pub d: u64,
    pub grid: Vec<RadiusLog>,
    pub degree_bound: u64,
    pub seed: u64,
}

impl<F: ValuedField> Problem<F> {
    pub fn build(sc: &Scenario, field: F) -> Result<Self> {
        if field.config() != sc.field {
            return Err(Error::ConfigMismatch(field.config().to_string(), sc.field.to_string()));
        }
        let m_amb = sc.ambient_dim;
        let ambient = VariableScheme::Ambient(m_amb);
        let generators = sc
            .variety
            .generators
            .iter()
            .enumerate()
            .map(|(i, g)| parse_polynomial(g, &field, ambient).map_err(|e| locate(&format!("variety.generators[{i}]"), e)))
            .collect::<Result<Vec<_>>>()?;
        let dim = match sc.variety.dim {
            Some(n) => n,
            None if generators.is_empty() => m_amb,
            None => return Err(Error::Input("variety.dim is required when generators are given".into())),
        };
        let variety = Variety::new(&field, m_amb, generators, dim)?;
        if sc.map.len() != m_amb + 1 {
            return Err(Error::Input(format!("map needs {} coordinates, got {}", m_amb + 1, sc.map.len())));
        }
        let coords = sc
            .map
            .iter()
            .enumerate()
            .map(|(i, c)| {
                parse_polynomial(c, &field, VariableScheme::Domain(sc.domain_vars)).map_err(|e| locate(&format!("map[{i}]"), e))
            })
            .collect::<Result<Vec<Polynomial<F>>>>()?;
        let map = ProjectiveMap::reduced(coords.clone())?;
        let map_was_reduced = map.coordinates() != coords.as_slice();
        variety.check_map(&map)?;
        let hypersurfaces = sc
            .hypersurfaces
            .iter()
            .enumerate()
            .map(|(i, h)| {
                let what = format!("hypersurfaces[{i}]");
                let q = Hypersurface::new(parse_polynomial(h.text(), &field, ambient).map_err(|e| locate(&what, e))?)
                    .map_err(|e| locate(&what, e))?;
                if let HypersurfaceSpec::Full { degree: Some(deg), .. } = h {
                    if *deg != q.degree() {
                        return Err(Error::Input(format!("{what} has degree {} but {deg} was declared", q.degree())));
                    }
                }
                Ok(q)
            })
            .collect::<Result<Vec<_>>>()?;
        if hypersurfaces.is_empty() {
            return Err(Error::Input("no hypersurfaces".into()));
        }
        let lcm = hypersurfaces.iter().fold(1u64, |acc, q| acc.lcm(&q.degree()));
        let d = match sc.d {
            None => lcm,
            Some(d) if d > 0 && d % lcm == 0 => d,
            Some(d) => return Err(Error::Input(format!("d = {d} is not a multiple of every degree (lcm {lcm})"))),
        };
        let grid = resolve_grid(&sc.grid)?.into_iter().map(RadiusLog::new).collect();
        let degree_bound = sc.degree_bound.unwrap_or_else(|| default_degree_bound(&variety, &hypersurfaces));
        Ok(Problem {
            name: sc.display_name(),
            field,
            variety,
            map,
            map_was_reduced,
            hypersurfaces,
            n_sub: sc.n_sub,
            d,
            grid,
            degree_bound,
            seed: sc.seed.unwrap_or(0),
        })
    }

    pub fn q(&self) -> usize {
        self.hypersurfaces.len()
    }

    pub fn n(&self) -> usize {
        self.variety.dim()
    }

    /// The hypersurfaces raised to the common degree `d`.
    pub fn lifted(&self) -> Result<Vec<Hypersurface<F>>> {
        self.hypersurfaces.iter().map(|q| q.lift(self.d)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::valfield::PadicRationals;

    const CONIC: &str = r#"{
        "name": "conic",
        "field": {"kind": "padic", "p": 5},
        "ambient_dim": 2,
        "domain_vars": 1,
        "variety": {"generators": ["x0*x2 - x1^2"], "dim": 1},
        "map": ["z^2", "z", "1"],
        "hypersurfaces": ["x0", "x2", {"poly": "x0 + x1 + x2", "degree": 1}],
        "N": 1,
        "grid": "0:2:1/2"
    }"#;

    #[test]
    fn parses_a_scenario() {
        let sc = Scenario::from_json(CONIC).unwrap();
        let pb = Problem::build(&sc, PadicRationals::new(5).unwrap()).unwrap();
        assert_eq!(pb.q(), 3);
        assert_eq!(pb.d, 1);
        assert_eq!(pb.grid.len(), 5);
        assert!(!pb.map_was_reduced);
        assert_eq!(Scenario::from_json(&sc.to_json()).unwrap(), sc);
    }

    #[test]
    fn reports_positions() {
        let bad = CONIC.replace("\"x2\",", "\"x2 +* x1\",");
        let sc = Scenario::from_json(&bad).unwrap();
        match Problem::build(&sc, PadicRationals::new(5).unwrap()) {
            Err(Error::Parse { column, message, .. }) => {
                assert_eq!(column, 5);
                assert!(message.starts_with("hypersurfaces[1]"));
            }
            other => panic!("{other:?}"),
        }
        assert!(matches!(Scenario::from_json("{\"field\": 3"), Err(Error::Parse { line: 1, .. })));
    }

    #[test]
    fn rejects_maps_off_the_variety() {
        let sc = Scenario::from_json(&CONIC.replace("\"z^2\", \"z\"", "\"z^3\", \"z\"")).unwrap();
        assert!(matches!(Problem::build(&sc, PadicRationals::new(5).unwrap()), Err(Error::Precondition(_))));
    }

    #[test]
    fn grids() {
        assert_eq!(parse_grid("0:1:1/2").unwrap().len(), 3);
        assert_eq!(parse_grid("3, -1/2, 3").unwrap(), vec![Rat::new((-1).into(), 2.into()), Rat::from_integer(3.into())]);
        assert!(parse_grid("1:0:1").is_err());
        assert!(parse_grid("0:1:0").is_err());
        assert!(parse_grid("x").is_err());
    }
}
