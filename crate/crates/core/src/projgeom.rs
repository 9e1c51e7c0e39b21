//! Projective varieties given by ideal generators, hypersurfaces, and maps.
//!
//! Hilbert functions, emptiness of intersections and ranks in the quotient
//! `H_d / I(V)_d` all come from exact elimination on graded pieces over the
//! monomial basis in graded-lex order.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::{Arc, Mutex};

use itertools::Itertools;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{rank, rref_with_order, Echelon};
use crate::nevanlinna::{NewtonPolygon, RadiusLog};
use crate::polyring::{default_var_name, MultiIndex, Polynomial};
use crate::valfield::ValuedField;
use crate::Rat;

/// A hypersurface `Q = 0` of degree `d` in `P^M`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Hypersurface<F: ValuedField> {
    poly: Polynomial<F>,
    degree: u64,
    norm: Rat,
}

impl<F: ValuedField> Hypersurface<F> {
    pub fn new(poly: Polynomial<F>) -> Result<Self> {
        if poly.is_zero() {
            return Err(Error::Input("hypersurface given by the zero polynomial".into()));
        }
        let degree = poly
            .homogeneous_degree()
            .ok_or_else(|| Error::Input(format!("{} is not homogeneous", Self::show(&poly))))?;
        if degree == 0 {
            return Err(Error::Input("hypersurface of degree 0".into()));
        }
        let field = poly.field().clone();
        let norm = poly.terms().map(|(_, c)| field.logabs(c).expect_finite()).max().expect("nonzero");
        Ok(Hypersurface { poly, degree, norm })
    }

    fn show(poly: &Polynomial<F>) -> String {
        let names: Vec<String> = (0..poly.nvars()).map(|i| default_var_name(poly.nvars(), i, true)).collect();
        poly.display_with(&names)
    }

    pub fn poly(&self) -> &Polynomial<F> {
        &self.poly
    }

    pub fn degree(&self) -> u64 {
        self.degree
    }

    /// `log ||Q|| = max_I log|a_I|`.
    pub fn norm(&self) -> &Rat {
        &self.norm
    }

    pub fn ambient_dim(&self) -> usize {
        self.poly.nvars() - 1
    }

    /// `Q(f_0, ..., f_M)`.
    pub fn evaluate(&self, map: &ProjectiveMap<F>) -> Result<Polynomial<F>> {
        if map.ambient_dim() != self.ambient_dim() {
            return Err(Error::Input(format!(
                "hypersurface lives in P^{} but the map goes to P^{}",
                self.ambient_dim(),
                map.ambient_dim()
            )));
        }
        self.poly.substitute(map.coordinates())
    }

    /// `Q^{d / deg Q}`, a hypersurface of degree `d` with the same zero set.
    pub fn lift(&self, d: u64) -> Result<Self> {
        if d == 0 || d % self.degree != 0 {
            return Err(Error::Input(format!("cannot lift degree {} to degree {d}", self.degree)));
        }
        Hypersurface::new(self.poly.pow(d / self.degree))
    }
}

impl<F: ValuedField> fmt::Display for Hypersurface<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&Self::show(&self.poly))
    }
}

/// A reduced representation `(f_0, ..., f_M)` of a map from `F^m` to `P^M`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProjectiveMap<F: ValuedField> {
    coords: Vec<Polynomial<F>>,
}

impl<F: ValuedField> ProjectiveMap<F> {
    /// Fails unless the coordinates share a ring, are not all zero, and have
    /// no common factor.
    pub fn new(coords: Vec<Polynomial<F>>) -> Result<Self> {
        let g = Self::common_factor(&coords)?;
        if !g.is_constant() {
            return Err(Error::Precondition(format!("map coordinates share the factor {g}")));
        }
        Ok(ProjectiveMap { coords })
    }

    /// Divides out the common factor of the coordinates.
    pub fn reduced(coords: Vec<Polynomial<F>>) -> Result<Self> {
        let g = Self::common_factor(&coords)?;
        let coords = coords.iter().map(|c| c.exact_div(&g)).collect::<Result<Vec<_>>>()?;
        Ok(ProjectiveMap { coords })
    }

    fn common_factor(coords: &[Polynomial<F>]) -> Result<Polynomial<F>> {
        if coords.len() < 2 {
            return Err(Error::Input("a map to P^M needs at least two coordinates".into()));
        }
        let mut g = Polynomial::zero(coords[0].field(), coords[0].nvars());
        for c in coords {
            g = g.gcd(c)?;
        }
        if g.is_zero() {
            return Err(Error::Input("all map coordinates are zero".into()));
        }
        Ok(g)
    }

    pub fn coordinates(&self) -> &[Polynomial<F>] {
        &self.coords
    }

    pub fn ambient_dim(&self) -> usize {
        self.coords.len() - 1
    }

    pub fn domain_vars(&self) -> usize {
        self.coords[0].nvars()
    }

    pub fn field(&self) -> &F {
        self.coords[0].field()
    }

    /// Largest total degree among the coordinates.
    pub fn degree(&self) -> u64 {
        self.coords.iter().filter_map(|c| c.total_degree()).max().unwrap_or(0)
    }

    /// Polygon whose envelope is `log ||f||_rho`.
    pub fn norm_polygon(&self) -> NewtonPolygon {
        union_polygon(&self.coords).expect("map has a nonzero coordinate")
    }
}

/// Polygon of `max_i log|g_i|_rho` over the nonzero members of `polys`.
pub fn union_polygon<F: ValuedField>(polys: &[Polynomial<F>]) -> Option<NewtonPolygon> {
    NewtonPolygon::from_points(polys.iter().flat_map(|g| {
        let field = g.field().clone();
        g.terms().map(move |(e, c)| (e.degree(), field.logabs(c).expect_finite())).collect::<Vec<_>>()
    }))
}

/// Degree-`D` piece of a homogeneous ideal, eliminated with the largest
/// monomials first so the free columns are the smallest standard monomials.
#[derive(Clone, Debug)]
pub struct GradedPiece<F: ValuedField> {
    pub degree: u64,
    pub monomials: Vec<MultiIndex>,
    index: HashMap<MultiIndex, usize>,
    pub echelon: Echelon<F>,
    pub standard: Vec<usize>,
}

impl<F: ValuedField> GradedPiece<F> {
    pub fn compute(field: &F, nvars: usize, generators: &[&Polynomial<F>], degree: u64) -> Self {
        let monomials = MultiIndex::all_of_degree(nvars, degree as u32);
        let index: HashMap<MultiIndex, usize> =
            monomials.iter().enumerate().map(|(i, m)| (m.clone(), i)).collect();
        let mut rows = Vec::new();
        for g in generators {
            let Some(e) = g.homogeneous_degree() else { continue };
            if e > degree {
                continue;
            }
            for shift in MultiIndex::all_of_degree(nvars, (degree - e) as u32) {
                let mut row = vec![field.zero(); monomials.len()];
                for (m, c) in g.terms() {
                    row[index[&(m + &shift)]] = c.clone();
                }
                rows.push(row);
            }
        }
        let order: Vec<usize> = (0..monomials.len()).rev().collect();
        let echelon = rref_with_order(field, rows, monomials.len(), &order);
        let standard = echelon.free_columns();
        GradedPiece { degree, monomials, index, echelon, standard }
    }

    /// `dim H_D - rank`.
    pub fn codimension(&self) -> usize {
        self.standard.len()
    }

    /// Coordinates of the class of `q` on the standard monomials.
    pub fn class_of(&self, q: &Polynomial<F>) -> Result<Vec<F::Elem>> {
        let field = q.field();
        let mut v = vec![field.zero(); self.monomials.len()];
        for (m, c) in q.terms() {
            let i = self.index.get(m).ok_or_else(|| {
                Error::Input(format!("polynomial is not homogeneous of degree {}", self.degree))
            })?;
            v[*i] = c.clone();
        }
        let v = self.echelon.reduce(field, &v);
        Ok(self.standard.iter().map(|&i| v[i].clone()).collect())
    }
}

/// `H_V(d)` together with hypersurfaces whose classes form a basis of
/// `H_d / I(V)_d`.
#[derive(Clone, Debug)]
pub struct HilbertData<F: ValuedField> {
    pub degree: u64,
    pub value: usize,
    pub basis: Vec<Hypersurface<F>>,
}

/// A projective variety `V` in `P^M` cut out by homogeneous generators, with
/// declared dimension `n`.
#[derive(Debug)]
pub struct Variety<F: ValuedField> {
    field: F,
    ambient: usize,
    generators: Vec<Polynomial<F>>,
    dim: usize,
    pieces: Mutex<BTreeMap<u64, Arc<GradedPiece<F>>>>,
}

impl<F: ValuedField> Clone for Variety<F> {
    fn clone(&self) -> Self {
        Variety {
            field: self.field.clone(),
            ambient: self.ambient,
            generators: self.generators.clone(),
            dim: self.dim,
            pieces: Mutex::new(self.pieces.lock().expect("cache lock").clone()),
        }
    }
}

impl<F: ValuedField> Variety<F> {
    pub fn new(field: &F, ambient: usize, generators: Vec<Polynomial<F>>, dim: usize) -> Result<Self> {
        if dim > ambient {
            return Err(Error::Input(format!("dimension {dim} exceeds ambient dimension {ambient}")));
        }
        for g in &generators {
            field.ensure_same(g.field())?;
            if g.nvars() != ambient + 1 {
                return Err(Error::Input(format!("generator {g} is not a form on P^{ambient}")));
            }
            if g.is_zero() || g.homogeneous_degree().is_none() {
                return Err(Error::Input(format!("generator {g} is zero or not homogeneous")));
            }
        }
        Ok(Variety { field: field.clone(), ambient, generators, dim, pieces: Mutex::new(BTreeMap::new()) })
    }

    pub fn projective_space(field: &F, ambient: usize) -> Self {
        Variety::new(field, ambient, Vec::new(), ambient).expect("projective space is valid")
    }

    pub fn field(&self) -> &F {
        &self.field
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn generators(&self) -> &[Polynomial<F>] {
        &self.generators
    }

    /// Cached graded piece of the ideal in degree `d`.
    pub fn piece(&self, d: u64) -> Arc<GradedPiece<F>> {
        if let Some(p) = self.pieces.lock().expect("cache lock").get(&d) {
            return p.clone();
        }
        let gens: Vec<&Polynomial<F>> = self.generators.iter().collect();
        let piece = Arc::new(GradedPiece::compute(&self.field, self.ambient + 1, &gens, d));
        self.pieces.lock().expect("cache lock").entry(d).or_insert(piece).clone()
    }

    pub fn hilbert_function(&self, d: u64) -> Result<HilbertData<F>> {
        if d == 0 {
            return Err(Error::Input("Hilbert function is evaluated at d >= 1".into()));
        }
        let piece = self.piece(d);
        let basis = piece
            .standard
            .iter()
            .map(|&i| {
                Hypersurface::new(Polynomial::monomial(&self.field, piece.monomials[i].clone(), self.field.one()))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(HilbertData { degree: d, value: piece.codimension(), basis })
    }

    /// Classes of degree-`d` hypersurfaces in `H_d / I(V)_d`.
    pub fn classes(&self, qs: &[Hypersurface<F>], d: u64) -> Result<Vec<Vec<F::Elem>>> {
        let piece = self.piece(d);
        qs.iter().map(|q| piece.class_of(q.poly())).collect()
    }

    /// Rank of the classes of `qs`; all must have degree `d`.
    pub fn rank_of(&self, qs: &[Hypersurface<F>], d: u64) -> Result<usize> {
        let classes = self.classes(qs, d)?;
        Ok(rank(&self.field, classes, self.piece(d).codimension()))
    }

    /// Fails unless every generator vanishes on the map.
    pub fn check_map(&self, map: &ProjectiveMap<F>) -> Result<()> {
        if map.ambient_dim() != self.ambient {
            return Err(Error::Input(format!(
                "map goes to P^{} but the variety lives in P^{}",
                map.ambient_dim(),
                self.ambient
            )));
        }
        for g in &self.generators {
            if !g.substitute(map.coordinates())?.is_zero() {
                return Err(Error::Precondition(format!("map does not lie on the generator {g}")));
            }
        }
        Ok(())
    }

    /// Dimension suggested by the Hilbert function on `1..=max_d`: the
    /// number of finite differences needed to reach a constant tail.
    pub fn dimension_hint(&self, max_d: u64) -> Option<usize> {
        let mut values: Vec<i64> = (1..=max_d).map(|d| self.piece(d).codimension() as i64).collect();
        for k in 0..values.len().saturating_sub(2) {
            let tail = &values[values.len().saturating_sub(2)..];
            if tail.len() == 2 && tail[0] == tail[1] && tail[0] != 0 {
                return Some(k);
            }
            values = values.windows(2).map(|w| w[1] - w[0]).collect();
        }
        None
    }
}

/// Outcome of the emptiness test for one intersection.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "lowercase")]
pub enum SubsetVerdict {
    /// The ideal fills `H_D` in this degree.
    Certified { degree: u64 },
    /// A common projective zero, as strings of field elements.
    Fails { zero: Vec<String> },
    Undetermined { degree_bound: u64 },
}

/// Tri-state summary of a certificate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Certified,
    Fails,
    Undetermined,
}

#[derive(Clone, Debug, Serialize)]
pub struct PositionCertificate {
    pub n_sub: usize,
    pub degree_bound: u64,
    pub subsets: Vec<(Vec<usize>, SubsetVerdict)>,
    pub status: Status,
}

/// Default search bound `2 * (sum of degrees) + 2`.
pub fn default_degree_bound<F: ValuedField>(v: &Variety<F>, qs: &[Hypersurface<F>]) -> u64 {
    let gens: u64 = v.generators().iter().filter_map(|g| g.homogeneous_degree()).sum();
    let hyps: u64 = qs.iter().map(|q| q.degree()).sum();
    2 * (gens + hyps) + 2
}

/// Decides whether `V` meets all of `qs`.
pub fn intersection_verdict<F: ValuedField>(
    v: &Variety<F>,
    qs: &[&Hypersurface<F>],
    degree_bound: u64,
) -> SubsetVerdict {
    let field = v.field();
    let nvars = v.ambient_dim() + 1;
    let mut gens: Vec<&Polynomial<F>> = v.generators().iter().collect();
    gens.extend(qs.iter().map(|q| q.poly()));
    if gens.iter().all(|g| g.homogeneous_degree() == Some(1)) {
        let piece = GradedPiece::compute(field, nvars, &gens, 1);
        return match piece.echelon.kernel(field).into_iter().next() {
            None => SubsetVerdict::Certified { degree: 1 },
            Some(zero) => SubsetVerdict::Fails {
                zero: (0..nvars).map(|i| zero[piece.index[&MultiIndex::unit(nvars, i)]].to_string()).collect(),
            },
        };
    }
    let start = gens.iter().filter_map(|g| g.homogeneous_degree()).min().unwrap_or(1).max(1);
    for d in start..=degree_bound {
        if GradedPiece::compute(field, nvars, &gens, d).codimension() == 0 {
            return SubsetVerdict::Certified { degree: d };
        }
    }
    SubsetVerdict::Undetermined { degree_bound }
}

/// Checks `N`-subgeneral position: `V` misses every intersection of
/// `N + 1` of the hypersurfaces.
pub fn position_check<F: ValuedField>(
    v: &Variety<F>,
    qs: &[Hypersurface<F>],
    n_sub: usize,
    degree_bound: u64,
) -> Result<PositionCertificate> {
    if n_sub < v.dim() || qs.len() < n_sub + 1 {
        return Err(Error::Precondition(format!(
            "need q >= N + 1 >= n + 1, got q = {}, N = {n_sub}, n = {}",
            qs.len(),
            v.dim()
        )));
    }
    let mut subsets = Vec::new();
    let mut status = Status::Certified;
    for subset in (0..qs.len()).combinations(n_sub + 1) {
        let chosen: Vec<&Hypersurface<F>> = subset.iter().map(|&i| &qs[i]).collect();
        let verdict = intersection_verdict(v, &chosen, degree_bound);
        match verdict {
            SubsetVerdict::Fails { .. } => status = Status::Fails,
            SubsetVerdict::Undetermined { .. } if status == Status::Certified => status = Status::Undetermined,
            _ => {}
        }
        subsets.push((subset, verdict));
    }
    Ok(PositionCertificate { n_sub, degree_bound, subsets, status })
}

/// Observed and proven bounds for `max_i log|Q_i(f)|_rho - d log||f||_rho`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct NormComparison {
    #[serde(serialize_with = "crate::ser::rat")]
    pub lower: Rat,
    #[serde(serialize_with = "crate::ser::rat")]
    pub upper: Rat,
    /// Value of the difference once every polygon involved is past its last
    /// breakpoint, when that tail is constant.
    #[serde(serialize_with = "crate::ser::opt_rat")]
    pub tail: Option<Rat>,
    pub bounded: bool,
}

pub fn norm_comparison<F: ValuedField>(
    v: &Variety<F>,
    subset: &[Hypersurface<F>],
    map: &ProjectiveMap<F>,
    grid: &[RadiusLog],
) -> Result<NormComparison> {
    let d = subset.first().ok_or_else(|| Error::Input("empty hypersurface subset".into()))?.degree();
    if subset.iter().any(|q| q.degree() != d) {
        return Err(Error::Precondition("hypersurfaces must share one degree".into()));
    }
    if grid.is_empty() {
        return Err(Error::Input("empty radius grid".into()));
    }
    let refs: Vec<&Hypersurface<F>> = subset.iter().collect();
    let bound = default_degree_bound(v, subset);
    if !matches!(intersection_verdict(v, &refs, bound), SubsetVerdict::Certified { .. }) {
        return Err(Error::Precondition("intersection with V is not certified empty".into()));
    }
    let composites = subset.iter().map(|q| q.evaluate(map)).collect::<Result<Vec<_>>>()?;
    let top = union_polygon(&composites)
        .ok_or_else(|| Error::MapInHypersurface(subset[0].to_string()))?;
    let norm = map.norm_polygon();
    let dr = Rat::from_integer(d.into());
    let diff = |rho: &Rat| top.envelope(rho) - &dr * norm.envelope(rho);
    let lower = grid.iter().map(|r| diff(r.value())).min().expect("nonempty grid");
    let upper = subset.iter().map(|q| q.norm().clone()).max().expect("nonempty subset");
    let top_slope = top.vertices().last().expect("nonempty").0;
    let norm_slope = norm.vertices().last().expect("nonempty").0;
    let bounded = top_slope == d * norm_slope;
    let tail = bounded.then(|| {
        let last = top.breakpoints().into_iter().chain(norm.breakpoints()).max().unwrap_or_else(|| Rat::from_integer(0.into()));
        diff(&last)
    });
    Ok(NormComparison { lower, upper, tail, bounded })
}

/// Picks `H_V(d) - n - 1` degree-`d` hypersurfaces `T_j` so that every
/// rank-`(n+1)` subset of `qs` completes to a basis of `H_d / I(V)_d`.
pub fn complete_to_full_rank<F: ValuedField>(
    v: &Variety<F>,
    qs: &[Hypersurface<F>],
    d: u64,
    seed: u64,
) -> Result<Vec<Hypersurface<F>>> {
    const RETRIES: usize = 16;
    if qs.is_empty() {
        return Err(Error::Input("no hypersurfaces to complete".into()));
    }
    let hilbert = v.hilbert_function(d)?;
    let n1 = v.dim() + 1;
    let count = hilbert.value.checked_sub(n1).ok_or_else(|| {
        Error::Precondition(format!("H_V({d}) = {} is smaller than n + 1 = {n1}", hilbert.value))
    })?;
    if count == 0 {
        return Ok(Vec::new());
    }
    let field = v.field();
    let classes = v.classes(qs, d)?;
    let subsets: Vec<Vec<usize>> = (0..qs.len())
        .combinations(n1)
        .filter(|s| rank(field, s.iter().map(|&i| classes[i].clone()).collect(), hilbert.value) == n1)
        .collect();
    for attempt in 0..RETRIES {
        let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(attempt as u64));
        let ts: Vec<Vec<F::Elem>> = (0..count)
            .map(|_| (0..hilbert.value).map(|_| field.sample_generic(&mut rng, attempt as u32)).collect())
            .collect();
        let ok = subsets.iter().all(|s| {
            let mut rows: Vec<Vec<F::Elem>> = s.iter().map(|&i| classes[i].clone()).collect();
            rows.extend(ts.iter().cloned());
            rank(field, rows, hilbert.value) == hilbert.value
        });
        if ok {
            return ts
                .into_iter()
                .map(|coeffs| {
                    let mut acc = Polynomial::zero(field, v.ambient_dim() + 1);
                    for (c, b) in coeffs.iter().zip(&hilbert.basis) {
                        acc = &acc + &b.poly().scale(c);
                    }
                    Hypersurface::new(acc)
                })
                .collect();
        }
    }
    Err(Error::CompletionNotFound(RETRIES))
}
