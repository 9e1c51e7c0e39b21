//! Seeded property suites run by `nevcert selftest`.

use num_traits::Signed;
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::nevanlinna::{counting_function, gauss_norm, RadiusLog};
use crate::nochka::compute_weights;
use crate::polyring::{hasse_derivative, MultiIndex, Polynomial};
use crate::projgeom::{Hypersurface, ProjectiveMap, Variety};
use crate::truncation::{truncated_count, truncated_part, TruncationLevel};
use crate::valfield::{PadicRationals, TadicFunctionField, ValuedField};
use crate::Rat;

use super::scenario::Problem;
use super::theorem::{check_fmt, evaluate, Mode, Overall};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SuiteResult {
    pub suite: String,
    pub field: String,
    pub cases: usize,
    pub failures: usize,
    pub first_failure: Option<String>,
}

impl SuiteResult {
    pub fn passed(&self) -> bool {
        self.failures == 0
    }
}

fn random_poly<F: ValuedField>(field: &F, rng: &mut dyn RngCore, max_deg: u32) -> Polynomial<F> {
    loop {
        let deg = rng.gen_range(0..=max_deg);
        let mut terms = Vec::new();
        for k in 0..=deg {
            if rng.gen_bool(0.7) {
                terms.push((MultiIndex::new(vec![k]), field.sample(rng, 3)));
            }
        }
        let p = Polynomial::from_terms(field, 1, terms);
        if !p.is_zero() {
            return p;
        }
    }
}

fn random_rho(rng: &mut dyn RngCore) -> Rat {
    Rat::new(rng.gen_range(-8i64..=16).into(), rng.gen_range(1i64..=3).into())
}

fn random_map<F: ValuedField>(field: &F, rng: &mut dyn RngCore) -> Result<ProjectiveMap<F>> {
    loop {
        let coords = vec![random_poly(field, rng, 4), random_poly(field, rng, 4)];
        let map = ProjectiveMap::reduced(coords)?;
        if map.degree() > 0 {
            return Ok(map);
        }
    }
}

/// Random linear forms in two variables, pairwise independent.
fn random_points<F: ValuedField>(field: &F, rng: &mut dyn RngCore, q: usize) -> Result<Vec<Hypersurface<F>>> {
    let mut rows: Vec<[F::Elem; 2]> = Vec::new();
    while rows.len() < q {
        let row = [field.sample(rng, 2), field.sample(rng, 2)];
        let independent = rows.iter().all(|r| {
            let det = field.sub(&field.mul(&r[0], &row[1]), &field.mul(&r[1], &row[0]));
            !field.is_zero(&det)
        });
        if independent && !(field.is_zero(&row[0]) && field.is_zero(&row[1])) {
            rows.push(row);
        }
    }
    rows.into_iter()
        .map(|[a, b]| {
            let p = Polynomial::from_terms(field, 2, [(MultiIndex::unit(2, 0), a), (MultiIndex::unit(2, 1), b)]);
            Hypersurface::new(p)
        })
        .collect()
}

struct Suite {
    result: SuiteResult,
}

impl Suite {
    fn new(name: &str, field: &impl ValuedField) -> Self {
        let field = match field.config() {
            crate::valfield::ValuedFieldConfig::Padic { p } => format!("Q_{p}"),
            crate::valfield::ValuedFieldConfig::Tadic { p } => format!("F_{p}(t)"),
        };
        Suite { result: SuiteResult { suite: name.into(), field, cases: 0, failures: 0, first_failure: None } }
    }

    fn record(&mut self, outcome: Result<Option<String>>) {
        self.result.cases += 1;
        let failure = match outcome {
            Ok(None) => return,
            Ok(Some(msg)) => msg,
            Err(e) => format!("error: {e}"),
        };
        self.result.failures += 1;
        self.result.first_failure.get_or_insert(failure);
    }
}

fn expect(ok: bool, msg: impl FnOnce() -> String) -> Result<Option<String>> {
    Ok((!ok).then(msg))
}

fn suites_for<F: ValuedField>(field: &F, rng: &mut ChaCha8Rng, cases: usize) -> Result<Vec<SuiteResult>> {
    let mut out = Vec::new();

    let mut s = Suite::new("gauss_norm_multiplicative", field);
    for _ in 0..cases {
        let (f, g, rho) = (random_poly(field, rng, 5), random_poly(field, rng, 5), RadiusLog::new(random_rho(rng)));
        let lhs = gauss_norm(&(&f * &g), &rho);
        let rhs = gauss_norm(&f, &rho) + gauss_norm(&g, &rho);
        s.record(expect(lhs == rhs, || format!("|fg| != |f||g| for f = {f}, g = {g}, rho = {rho}")));
    }
    out.push(s.result);

    let mut s = Suite::new("jensen", field);
    for _ in 0..cases {
        let f = random_poly(field, rng, 6);
        let (a, b) = (RadiusLog::new(random_rho(rng)), RadiusLog::new(random_rho(rng)));
        s.record((|| {
            let diff_norm = gauss_norm(&f, &b).expect_finite() - gauss_norm(&f, &a).expect_finite();
            let diff_count = counting_function(&f, &b)? - counting_function(&f, &a)?;
            expect(diff_norm == diff_count, || format!("Jensen fails for {f} between {a} and {b}"))
        })());
    }
    out.push(s.result);

    let mut s = Suite::new("hasse_derivative_bound", field);
    for _ in 0..cases {
        let f = random_poly(field, rng, 6);
        let k = rng.gen_range(1..=3u32);
        let rho = random_rho(rng);
        let df = hasse_derivative(&f, &MultiIndex::new(vec![k]));
        let lhs = gauss_norm(&df, &RadiusLog::new(rho.clone()));
        let rhs = gauss_norm(&f, &RadiusLog::new(rho.clone())) + &(-Rat::from_integer(k.into()) * &rho);
        s.record(expect(lhs <= rhs, || format!("|D^{k} f| > |f| / r^{k} for f = {f}, rho = {rho}")));
    }
    out.push(s.result);

    let mut s = Suite::new("truncation_monotone", field);
    for _ in 0..cases {
        let f = random_poly(field, rng, 5);
        let f = &f * &f.pow(rng.gen_range(0..3));
        let rho = RadiusLog::new(random_rho(rng).abs());
        s.record((|| {
            let levels = [TruncationLevel::Finite(1), TruncationLevel::Finite(2), TruncationLevel::Infinite];
            let counts = levels.iter().map(|&l| truncated_count(&f, &rho, l)).collect::<Result<Vec<Rat>>>()?;
            let divides = match truncated_part(&f, 2) {
                Ok(g) => f.divides_by(&g).is_some(),
                // not defined over a non-perfect field; the counts above still are
                Err(Error::NoRoot(_)) => true,
                Err(e) => return Err(e),
            };
            expect(counts[0] <= counts[1] && counts[1] <= counts[2] && divides, || {
                format!("truncated counts {counts:?} for {f}")
            })
        })());
    }
    out.push(s.result);

    let mut s = Suite::new("first_main_theorem", field);
    let grid: Vec<RadiusLog> = (-2..=6).map(RadiusLog::from_int).collect();
    for _ in 0..cases {
        s.record((|| {
            let map = random_map(field, rng)?;
            let q = random_points(field, rng, 1)?.remove(0);
            if q.evaluate(&map)?.is_zero() {
                return Ok(None);
            }
            check_fmt(&map, &q, &grid).map(|_| None)
        })());
    }
    out.push(s.result);

    let mut s = Suite::new("nochka_weights", field);
    for _ in 0..cases {
        let n = rng.gen_range(1..=2usize);
        let n_sub = n + rng.gen_range(0..=1usize);
        let q = 2 * n_sub - n + 2 + rng.gen_range(0..=2usize);
        s.record((|| {
            let classes: Vec<Vec<F::Elem>> =
                (0..q).map(|_| (0..=n).map(|_| field.sample(rng, 2)).collect()).collect();
            match compute_weights(field, &classes, n_sub, n) {
                Ok(w) => w.verify().map(|_| None),
                // a random configuration may fail the rank precondition
                Err(Error::Precondition(_)) => Ok(None),
                Err(e) => Err(e),
            }
        })());
    }
    out.push(s.result);

    let mut s = Suite::new("second_main_theorem_lines", field);
    for _ in 0..cases.div_ceil(4) {
        s.record((|| {
            let map = random_map(field, rng)?;
            let q = rng.gen_range(3..=5);
            let hyps = random_points(field, rng, q)?;
            if hyps.iter().any(|h| h.evaluate(&map).map(|c| c.is_zero()).unwrap_or(true)) {
                return Ok(None);
            }
            let pb = Problem {
                name: "random".into(),
                field: field.clone(),
                variety: Variety::projective_space(field, 1),
                map,
                map_was_reduced: false,
                hypersurfaces: hyps,
                n_sub: 1,
                d: 1,
                grid: (0..=4).map(RadiusLog::from_int).collect(),
                degree_bound: 4,
                seed: rng.gen(),
            };
            match evaluate(&pb, Mode::Both) {
                Ok(ev) => expect(ev.status == Overall::Certified, || format!("status {:?} for {:?}", ev.status, pb.map)),
                Err(Error::WronskianBound { .. }) => Ok(Some("Wronskian bound reached".into())),
                Err(e) => Err(e),
            }
        })());
    }
    out.push(s.result);

    Ok(out)
}

/// Runs every suite over `Q_5` and `F_3(t)` with `cases` cases each.
pub fn run_selftest(seed: u64, cases: usize) -> Result<Vec<SuiteResult>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = suites_for(&PadicRationals::new(5)?, &mut rng, cases)?;
    out.extend(suites_for(&TadicFunctionField::new(3)?, &mut rng, cases)?);
    Ok(out)
}

pub fn selftest_csv(results: &[SuiteResult]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["suite", "field", "cases", "failures", "first_failure"]).map_err(|e| Error::Io(e.to_string()))?;
    for r in results {
        let rec = [
            r.suite.clone(),
            r.field.clone(),
            r.cases.to_string(),
            r.failures.to_string(),
            r.first_failure.clone().unwrap_or_default(),
        ];
        w.write_record(&rec).map_err(|e| Error::Io(e.to_string()))?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Error::Io(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suites_pass_and_are_deterministic() {
        let a = run_selftest(7, 12).unwrap();
        for r in &a {
            assert!(r.passed(), "{r:?}");
        }
        assert_eq!(a, run_selftest(7, 12).unwrap());
    }
}
