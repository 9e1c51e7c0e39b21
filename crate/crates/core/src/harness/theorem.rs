//! Evaluation of the second-main-theorem inequalities, the divisibility
//! claim behind the truncated version, and the first main theorem.
//!
//! Every quantity is piecewise linear in `rho` with kinks only at Newton
//! polygon breakpoints, so beyond the last breakpoint each defect is affine.
//! Boundedness is decided from the exact tail slope, and the `O(1)` constant
//! is the extreme value over the finitely many kinks in `[0, inf)`.

use std::collections::BTreeSet;

use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::poly_det;
use crate::nevanlinna::{map_characteristic, map_counting, map_proximity, NewtonPolygon, RadiusLog};
use crate::nochka::{compute_weights, select_subset_log, NochkaWeights, Selection};
use crate::polyring::{hasse_derivative, Polynomial};
use crate::projgeom::{complete_to_full_rank, position_check, Hypersurface, PositionCertificate, ProjectiveMap, Status};
use crate::truncation::{truncated_polygon, TruncationLevel};
use crate::valfield::ValuedField;
use crate::wronskian::{index_s, kappa0, nondegeneracy_check, find_wronskian, rank_f, IndexS, WronskianCertificate};
use crate::Rat;

use super::scenario::Problem;

fn rat(n: i64) -> Rat {
    Rat::from_integer(n.into())
}

fn ratio(a: i64, b: i64) -> Rat {
    Rat::new(a.into(), b.into())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    /// The defect must stay above `-C`.
    BoundedBelow,
    /// The defect must stay below `C`.
    BoundedAbove,
}

/// Exact verdict for a piecewise-linear defect on `rho >= 0`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TailCertificate {
    pub direction: Direction,
    /// Past this radius the defect is affine.
    #[serde(serialize_with = "crate::ser::rat")]
    pub tail_start: Rat,
    #[serde(serialize_with = "crate::ser::rat")]
    pub slope: Rat,
    /// Smallest `C >= 0` making the inequality hold on `[0, inf)`, when it holds.
    #[serde(serialize_with = "crate::ser::rat")]
    pub constant: Rat,
    pub holds: bool,
    /// The tail is flat, i.e. the defect is eventually constant.
    pub eventually_constant: bool,
}

pub fn certify(f: impl Fn(&Rat) -> Rat, breakpoints: &[Rat], direction: Direction) -> Result<TailCertificate> {
    let zero = Rat::zero();
    let start = breakpoints.iter().max().filter(|b| **b > zero).cloned().unwrap_or_else(Rat::zero);
    let one = Rat::one();
    let (f0, f1, f2) = (f(&start), f(&(&start + &one)), f(&(&start + &one + &one)));
    let slope = &f1 - &f0;
    if &f2 - &f1 != slope {
        return Err(Error::InternalConsistency(format!("defect is not affine past rho = {start}")));
    }
    let critical: BTreeSet<Rat> = std::iter::once(zero.clone())
        .chain(breakpoints.iter().filter(|b| **b > zero && **b < start).cloned())
        .chain(std::iter::once(start.clone()))
        .collect();
    let values: Vec<Rat> = critical.iter().map(&f).collect();
    let (holds, constant) = match direction {
        Direction::BoundedBelow => (!slope.is_negative(), (-values.iter().min().unwrap()).max(zero)),
        Direction::BoundedAbove => (!slope.is_positive(), values.iter().max().unwrap().clone().max(zero)),
    };
    Ok(TailCertificate { direction, tail_start: start, eventually_constant: slope.is_zero(), slope, constant, holds })
}

/// `d T - m - N` for one hypersurface; constant in `rho`.
pub fn check_fmt<F: ValuedField>(map: &ProjectiveMap<F>, q: &Hypersurface<F>, grid: &[RadiusLog]) -> Result<Rat> {
    let mut value: Option<Rat> = None;
    for rho in grid {
        let t = map_characteristic(map, rho)?;
        let m = map_proximity(map, q, rho)?;
        let n = map_counting(map, q, rho, TruncationLevel::Infinite)?;
        let c = rat(q.degree() as i64) * t - m - n;
        match &value {
            Some(v) if *v != c => {
                return Err(Error::InternalConsistency(format!("d T - m - N for {q} varies: {v} vs {c} at rho = {rho}")))
            }
            Some(_) => {}
            None => value = Some(c),
        }
    }
    value.ok_or_else(|| Error::Input("empty radius grid".into()))
}

/// Everything computed once before the per-radius evaluation.
#[derive(Clone, Debug, Serialize)]
#[serde(bound = "")]
pub struct TruncatedData<F: ValuedField> {
    pub hilbert: usize,
    pub rank_f: usize,
    pub index_s: IndexS,
    pub kappa0: u64,
    pub weights: NochkaWeights,
    #[serde(serialize_with = "ser_hyps")]
    pub completion: Vec<Hypersurface<F>>,
    pub wronskian: WronskianCertificate<F>,
    /// Number of subsets `R°` whose Wronskian was checked to be a constant
    /// multiple of `W`.
    pub wronskian_multiples_checked: usize,
    #[serde(serialize_with = "crate::ser::rat")]
    pub coef_a: Rat,
    #[serde(serialize_with = "crate::ser::rat")]
    pub coef_b: Rat,
    /// `N (H - 1) / (n d)`.
    #[serde(serialize_with = "crate::ser::rat")]
    pub log_coef: Rat,
    /// `N sum|g| / (n d)` from the certificate.
    #[serde(serialize_with = "crate::ser::rat")]
    pub log_coef_sigma: Rat,
    /// Log coefficient `(N + 1)/(n + 1)` of the hyperplane case, when `V = P^n`, `d = 1`.
    #[serde(serialize_with = "crate::ser::opt_rat")]
    pub hyperplane_log_coef: Option<Rat>,
}

fn ser_hyps<F: ValuedField, S: serde::Serializer>(h: &[Hypersurface<F>], s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(h.iter().map(|q| q.to_string()))
}

/// Builds the weights, completion and Wronskian for the truncated inequality.
pub fn prepare_truncated<F: ValuedField>(pb: &Problem<F>) -> Result<TruncatedData<F>> {
    let (q, n_sub, n, d) = (pb.q(), pb.n_sub, pb.n(), pb.d);
    if n == 0 || n_sub < n || q + n <= 2 * n_sub + 1 {
        return Err(Error::Precondition(format!(
            "the truncated inequality needs 1 <= n <= N and q > 2N - n + 1 (q = {q}, N = {n_sub}, n = {n})"
        )));
    }
    let v = &pb.variety;
    let nd = nondegeneracy_check(&pb.map, v, d)?;
    if let Some(w) = nd.witness {
        return Err(Error::Precondition(format!("map is degenerate over I_{d}(V): {w} vanishes on it")));
    }
    let hilbert = v.hilbert_function(d)?.value;
    let k = rank_f(&pb.map);
    let s = index_s(&pb.map, v, d)?;
    let kappa = kappa0(hilbert, k, s, pb.field.characteristic())?;
    let lifted = pb.lifted()?;
    let classes = v.classes(&lifted, d)?;
    let weights = compute_weights(&pb.field, &classes, n_sub, n)?;
    let completion = complete_to_full_rank(v, &lifted, d, pb.seed)?;
    let wronskian = find_wronskian(&pb.map, v, d, kappa, pb.seed)?;
    let checked = check_wronskian_multiples(pb, &lifted, &weights, &completion, &wronskian)?;
    let (qq, nn, n_, h) = (q as i64, n_sub as i64, n as i64, hilbert as i64);
    let coef_a = rat(qq) - ratio((2 * nn + n_ - 1) * h, n_ + 1);
    let coef_b = rat(qq) - ratio((2 * nn - n_ + 1) * h, n_ + 1);
    let log_coef = ratio(nn * (h - 1), n_ * d as i64);
    let log_coef_sigma = ratio(nn * wronskian.sum_degrees as i64, n_ * d as i64);
    let hyperplane_log_coef =
        (v.generators().is_empty() && v.ambient_dim() == n && d == 1).then(|| ratio(nn + 1, n_ + 1));
    Ok(TruncatedData {
        hilbert,
        rank_f: k,
        index_s: s,
        kappa0: kappa,
        weights,
        completion,
        wronskian,
        wronskian_multiples_checked: checked,
        coef_a,
        coef_b,
        log_coef,
        log_coef_sigma,
        hyperplane_log_coef,
    })
}

/// For subsets `R°` of `n + 1` independent classes, the Wronskian of
/// `Q_{R°}(f), T_l(f)` is a nonzero constant multiple of `W`.
fn check_wronskian_multiples<F: ValuedField>(
    pb: &Problem<F>,
    lifted: &[Hypersurface<F>],
    weights: &NochkaWeights,
    completion: &[Hypersurface<F>],
    cert: &WronskianCertificate<F>,
) -> Result<usize> {
    const LIMIT: usize = 6;
    use itertools::Itertools;
    let mut checked = 0;
    let target = cert.w.monic();
    for subset in (0..pb.q()).combinations(pb.n() + 1) {
        if checked == LIMIT {
            break;
        }
        if weights.rank(&subset) != Some(subset.len()) {
            continue;
        }
        let funcs = subset
            .iter()
            .map(|&i| lifted[i].evaluate(&pb.map))
            .chain(completion.iter().map(|t| t.evaluate(&pb.map)))
            .collect::<Result<Vec<Polynomial<F>>>>()?;
        let rows: Vec<Vec<Polynomial<F>>> =
            cert.gammas.iter().map(|g| funcs.iter().map(|f| hasse_derivative(f, g)).collect()).collect();
        let w = poly_det(&rows);
        if w.is_zero() || w.monic() != target {
            return Err(Error::InternalConsistency(format!("Wronskian for {subset:?} is not a multiple of W")));
        }
        checked += 1;
    }
    Ok(checked)
}

/// Polygons used for the per-radius evaluation.
struct Curves {
    norm: NewtonPolygon,
    comp: Vec<NewtonPolygon>,
    degrees: Vec<u64>,
    norms: Vec<Rat>,
    n_sub: usize,
    t11: Option<Curves11>,
}

struct Curves11 {
    trunc: Vec<NewtonPolygon>,
    lifted: Vec<NewtonPolygon>,
    lifted_trunc: Vec<NewtonPolygon>,
    w: NewtonPolygon,
    weights: NochkaWeights,
    /// `log max ||Q_i^(d/d_i)||`.
    beta: Rat,
    d: u64,
    coef_a: Rat,
    coef_b: Rat,
    log_coef: Rat,
    log_coef_sigma: Rat,
    hyperplane_log_coef: Option<Rat>,
}

/// One row of the per-radius table.
#[derive(Clone, Debug, Serialize)]
pub struct Row {
    #[serde(serialize_with = "crate::ser::rat")]
    pub rho: Rat,
    #[serde(serialize_with = "crate::ser::rat")]
    pub t: Rat,
    #[serde(serialize_with = "crate::ser::rats")]
    pub n: Vec<Rat>,
    #[serde(serialize_with = "crate::ser::rats")]
    pub m: Vec<Rat>,
    /// `d_i T - m_i - N_i`, which must not depend on `rho`.
    #[serde(serialize_with = "crate::ser::rats")]
    pub fmt_consts: Vec<Rat>,
    #[serde(serialize_with = "crate::ser::rat")]
    pub untrunc_lhs: Rat,
    #[serde(serialize_with = "crate::ser::rat")]
    pub untrunc_rhs: Rat,
    #[serde(serialize_with = "crate::ser::rat")]
    pub untrunc_defect: Rat,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub truncated: Option<Row11>,
}

#[derive(Clone, Debug, Serialize)]
pub struct Row11 {
    #[serde(serialize_with = "crate::ser::rats")]
    pub n_trunc: Vec<Rat>,
    #[serde(serialize_with = "crate::ser::rat")]
    pub lhs_a: Rat,
    #[serde(serialize_with = "crate::ser::rat")]
    pub lhs_b: Rat,
    #[serde(serialize_with = "crate::ser::rat")]
    pub rhs: Rat,
    #[serde(serialize_with = "crate::ser::rat")]
    pub rhs_sigma: Rat,
    #[serde(serialize_with = "crate::ser::rat")]
    pub defect_a: Rat,
    #[serde(serialize_with = "crate::ser::rat")]
    pub defect_b: Rat,
    #[serde(serialize_with = "crate::ser::rat")]
    pub defect_b_sigma: Rat,
    #[serde(serialize_with = "crate::ser::rat")]
    pub claim_defect: Rat,
    #[serde(serialize_with = "crate::ser::opt_rat")]
    pub hyperplane_lhs: Option<Rat>,
    #[serde(serialize_with = "crate::ser::opt_rat")]
    pub hyperplane_rhs: Option<Rat>,
    /// The `N + 1` hypersurfaces closest to `f` at this radius and the
    /// subset picked from them.
    pub closest: Vec<usize>,
    pub selection: Selection,
}

impl Curves {
    fn build<F: ValuedField>(pb: &Problem<F>, t11: Option<&TruncatedData<F>>) -> Result<Self> {
        let composites = pb
            .hypersurfaces
            .iter()
            .map(|q| {
                let c = q.evaluate(&pb.map)?;
                if c.is_zero() {
                    Err(Error::MapInHypersurface(q.to_string()))
                } else {
                    Ok(c)
                }
            })
            .collect::<Result<Vec<_>>>()?;
        let comp = composites.iter().map(|c| NewtonPolygon::of(c).expect("nonzero")).collect();
        let t11 = match t11 {
            None => None,
            Some(data) => {
                let level = TruncationLevel::Finite(data.kappa0);
                let trunc = composites.iter().map(|c| truncated_polygon(c, level)).collect::<Result<Vec<_>>>()?;
                let lifted_polys: Vec<Polynomial<F>> = composites
                    .iter()
                    .zip(&pb.hypersurfaces)
                    .map(|(c, q)| c.pow(pb.d / q.degree()))
                    .collect();
                let lifted = lifted_polys.iter().map(|c| NewtonPolygon::of(c).expect("nonzero")).collect();
                let lifted_trunc =
                    lifted_polys.iter().map(|c| truncated_polygon(c, level)).collect::<Result<Vec<_>>>()?;
                let beta = pb.lifted()?.iter().map(|q| q.norm().clone()).max().expect("q > 0");
                Some(Curves11 {
                    trunc,
                    lifted,
                    lifted_trunc,
                    w: NewtonPolygon::of(&data.wronskian.w).expect("W is nonzero"),
                    weights: data.weights.clone(),
                    beta,
                    d: pb.d,
                    coef_a: data.coef_a.clone(),
                    coef_b: data.coef_b.clone(),
                    log_coef: data.log_coef.clone(),
                    log_coef_sigma: data.log_coef_sigma.clone(),
                    hyperplane_log_coef: data.hyperplane_log_coef.clone(),
                })
            }
        };
        Ok(Curves {
            norm: pb.map.norm_polygon(),
            comp,
            degrees: pb.hypersurfaces.iter().map(|q| q.degree()).collect(),
            norms: pb.hypersurfaces.iter().map(|q| q.norm().clone()).collect(),
            n_sub: pb.n_sub,
            t11,
        })
    }

    /// Breakpoints of every curve; the row radii extend past all of them.
    fn breakpoints(&self) -> Vec<Rat> {
        let mut set: BTreeSet<Rat> = self.untrunc_breakpoints().into_iter().collect();
        if let Some(t) = &self.t11 {
            set.extend(self.trunc_breakpoints(t));
            set.extend(Self::claim_breakpoints(t));
        }
        set.into_iter().collect()
    }

    fn union(polys: Vec<&NewtonPolygon>) -> Vec<Rat> {
        let set: BTreeSet<Rat> = polys.into_iter().flat_map(|p| p.breakpoints()).collect();
        set.into_iter().collect()
    }

    fn untrunc_breakpoints(&self) -> Vec<Rat> {
        Self::union(std::iter::once(&self.norm).chain(&self.comp).collect())
    }

    fn trunc_breakpoints(&self, t: &Curves11) -> Vec<Rat> {
        Self::union(std::iter::once(&self.norm).chain(&t.trunc).collect())
    }

    fn claim_breakpoints(t: &Curves11) -> Vec<Rat> {
        Self::union(t.lifted.iter().chain(&t.lifted_trunc).chain(std::iter::once(&t.w)).collect())
    }

    fn t(&self, rho: &Rat) -> Rat {
        self.norm.envelope(rho)
    }

    fn over_degrees<'a>(&'a self, polys: &'a [NewtonPolygon], rho: &'a Rat) -> impl Iterator<Item = Rat> + 'a {
        polys.iter().zip(&self.degrees).map(move |(c, d)| c.counting(rho) / rat(*d as i64))
    }

    fn untrunc_defect(&self, rho: &Rat) -> Rat {
        let q = self.comp.len() as i64;
        self.over_degrees(&self.comp, rho).sum::<Rat>() - rat(q - self.n_sub as i64) * self.t(rho)
    }

    fn rhs(&self, c: &Curves11, rho: &Rat, log_coef: &Rat) -> Rat {
        self.over_degrees(&c.trunc, rho).sum::<Rat>() - log_coef * rho
    }

    fn defect_a(&self, c: &Curves11, rho: &Rat) -> Rat {
        self.rhs(c, rho, &c.log_coef) - &c.coef_a * self.t(rho)
    }

    fn defect_b(&self, c: &Curves11, rho: &Rat) -> Rat {
        self.rhs(c, rho, &c.log_coef) - &c.coef_b * self.t(rho)
    }

    fn defect_b_sigma(&self, c: &Curves11, rho: &Rat) -> Rat {
        self.rhs(c, rho, &c.log_coef_sigma) - &c.coef_b * self.t(rho)
    }

    fn claim(c: &Curves11, rho: &Rat) -> Rat {
        let w = &c.weights.omega;
        let full: Rat = w.iter().zip(&c.lifted).map(|(w, p)| w * p.counting(rho)).sum();
        let trunc: Rat = w.iter().zip(&c.lifted_trunc).map(|(w, p)| w * p.counting(rho)).sum();
        full - c.w.counting(rho) - trunc
    }

    fn select(&self, c: &Curves11, rho: &Rat) -> Result<(Vec<usize>, Selection)> {
        let dt = rat(c.d as i64) * self.t(rho);
        let x: Vec<Rat> = c.lifted.iter().map(|p| &c.beta + &dt - p.envelope(rho)).collect();
        let mut order: Vec<usize> = (0..x.len()).collect();
        order.sort_by(|a, b| x[*b].cmp(&x[*a]).then(a.cmp(b)));
        let mut closest: Vec<usize> = order.into_iter().take(self.n_sub + 1).collect();
        closest.sort();
        let sel = select_subset_log(&c.weights, &x, &closest)?;
        Ok((closest, sel))
    }

    fn row(&self, rho: &Rat) -> Result<Row> {
        let t = self.t(rho);
        let n: Vec<Rat> = self.comp.iter().map(|c| c.counting(rho)).collect();
        let m: Vec<Rat> = self
            .comp
            .iter()
            .zip(&self.degrees)
            .zip(&self.norms)
            .map(|((c, d), nq)| rat(*d as i64) * &t + nq - c.envelope(rho))
            .collect();
        let fmt_consts =
            self.degrees.iter().zip(&m).zip(&n).map(|((d, mi), ni)| rat(*d as i64) * &t - mi - ni).collect();
        let untrunc_rhs: Rat = self.over_degrees(&self.comp, rho).sum();
        let untrunc_lhs = rat(self.comp.len() as i64 - self.n_sub as i64) * &t;
        let truncated = match &self.t11 {
            None => None,
            Some(c) => {
                let lhs_a = &c.coef_a * &t;
                let lhs_b = &c.coef_b * &t;
                let rhs = self.rhs(c, rho, &c.log_coef);
                let rhs_sigma = self.rhs(c, rho, &c.log_coef_sigma);
                let hyperplane_rhs = c.hyperplane_log_coef.as_ref().map(|k| self.rhs(c, rho, k));
                let (closest, selection) = self.select(c, rho)?;
                Some(Row11 {
                    n_trunc: c.trunc.iter().map(|p| p.counting(rho)).collect(),
                    defect_a: &rhs - &lhs_a,
                    defect_b: &rhs - &lhs_b,
                    defect_b_sigma: &rhs_sigma - &lhs_b,
                    claim_defect: Self::claim(c, rho),
                    hyperplane_lhs: hyperplane_rhs.as_ref().map(|_| lhs_b.clone()),
                    hyperplane_rhs,
                    lhs_a,
                    lhs_b,
                    rhs,
                    rhs_sigma,
                    closest,
                    selection,
                })
            }
        };
        Ok(Row { rho: rho.clone(), t, n, m, fmt_consts, untrunc_defect: &untrunc_rhs - &untrunc_lhs, untrunc_lhs, untrunc_rhs, truncated })
    }
}

/// Exact verdicts for the truncated inequality.
#[derive(Clone, Debug, Serialize)]
pub struct TruncatedVerdicts {
    pub variant_a: TailCertificate,
    pub variant_b: TailCertificate,
    /// Variant (B) with the log coefficient from the actual Wronskian orders.
    pub variant_b_sigma: TailCertificate,
    pub claim: TailCertificate,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub hyperplane: Option<TailCertificate>,
}

#[derive(Clone, Debug, Serialize)]
#[serde(bound = "")]
pub struct TruncatedOutcome<F: ValuedField> {
    pub data: TruncatedData<F>,
    pub verdicts: TruncatedVerdicts,
}

/// Which parts of the evaluation to run.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    /// The non-truncated inequality only.
    NonTruncated,
    /// Both; the truncated one is skipped with a note when its
    /// preconditions fail.
    Both,
    /// Both, and a failed precondition of the truncated one is an error.
    RequireTruncated,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Overall {
    Certified,
    Undetermined,
    Violated,
}

#[derive(Clone, Debug, Serialize)]
#[serde(bound = "")]
pub struct Evaluation<F: ValuedField> {
    pub name: String,
    pub field: String,
    pub q: usize,
    pub n_sub: usize,
    pub n: usize,
    pub d: u64,
    pub map_was_reduced: bool,
    pub position: PositionCertificate,
    /// `d_i T - m_i - N_i` per hypersurface.
    #[serde(serialize_with = "crate::ser::rats")]
    pub first_main_theorem: Vec<Rat>,
    pub non_truncated: TailCertificate,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub truncated: Option<TruncatedOutcome<F>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub truncated_skipped: Option<String>,
    /// Radii of the rows, the grid plus two points past the last breakpoint.
    pub rows: Vec<Row>,
    pub status: Overall,
}

/// Runs the first main theorem check, the non-truncated inequality and,
/// depending on `mode`, the truncated inequality with its divisibility claim.
pub fn evaluate<F: ValuedField>(pb: &Problem<F>, mode: Mode) -> Result<Evaluation<F>> {
    if pb.map.degree() == 0 {
        return Err(Error::Precondition("map is constant".into()));
    }
    let position = position_check(&pb.variety, &pb.hypersurfaces, pb.n_sub, pb.degree_bound)?;
    if position.status == Status::Fails {
        let bad: Vec<&Vec<usize>> = position
            .subsets
            .iter()
            .filter(|(_, v)| matches!(v, crate::projgeom::SubsetVerdict::Fails { .. }))
            .map(|(s, _)| s)
            .collect();
        return Err(Error::Precondition(format!(
            "hypersurfaces are not in {}-subgeneral position: V meets {:?}",
            pb.n_sub, bad
        )));
    }
    let (data, skipped) = match mode {
        Mode::NonTruncated => (None, None),
        Mode::RequireTruncated => (Some(prepare_truncated(pb)?), None),
        Mode::Both => match prepare_truncated(pb) {
            Ok(d) => (Some(d), None),
            Err(e @ (Error::Precondition(_) | Error::WronskianBound { .. } | Error::WeightsInfeasible(_))) => {
                (None, Some(e.to_string()))
            }
            Err(e) => return Err(e),
        },
    };
    let curves = Curves::build(pb, data.as_ref())?;
    let bps = curves.breakpoints();
    let mut radii: BTreeSet<Rat> = pb.grid.iter().map(|r| r.value().clone()).collect();
    let last = bps.iter().max().cloned().unwrap_or_else(Rat::zero).max(Rat::zero());
    let past = last.floor() + Rat::one();
    radii.insert(past.clone());
    radii.insert(past + Rat::one());
    let radii: Vec<Rat> = radii.into_iter().collect();
    let rows = radii.par_iter().map(|rho| curves.row(rho)).collect::<Result<Vec<Row>>>()?;

    let first_main_theorem = rows[0].fmt_consts.clone();
    if let Some(bad) = rows.iter().find(|r| r.fmt_consts != first_main_theorem) {
        return Err(Error::InternalConsistency(format!("d T - m - N is not constant (rho = {})", bad.rho)));
    }
    let non_truncated = certify(|r| curves.untrunc_defect(r), &curves.untrunc_breakpoints(), Direction::BoundedBelow)?;
    let truncated = match data {
        None => None,
        Some(data) => {
            let c = curves.t11.as_ref().expect("built with data");
            let tb = curves.trunc_breakpoints(c);
            let verdicts = TruncatedVerdicts {
                variant_a: certify(|r| curves.defect_a(c, r), &tb, Direction::BoundedBelow)?,
                variant_b: certify(|r| curves.defect_b(c, r), &tb, Direction::BoundedBelow)?,
                variant_b_sigma: certify(|r| curves.defect_b_sigma(c, r), &tb, Direction::BoundedBelow)?,
                claim: certify(|r| Curves::claim(c, r), &Curves::claim_breakpoints(c), Direction::BoundedAbove)?,
                hyperplane: match &c.hyperplane_log_coef {
                    Some(k) => Some(certify(|r| curves.rhs(c, r, k) - &c.coef_b * curves.t(r), &tb, Direction::BoundedBelow)?),
                    None => None,
                },
            };
            Some(TruncatedOutcome { data, verdicts })
        }
    };
    let violated = !non_truncated.holds
        || truncated.as_ref().is_some_and(|t| {
            !t.verdicts.variant_b.holds || !t.verdicts.variant_b_sigma.holds || !t.verdicts.claim.holds
        });
    // Without certified position the inequalities need not hold.
    let status = if position.status == Status::Undetermined {
        Overall::Undetermined
    } else if violated {
        Overall::Violated
    } else {
        Overall::Certified
    };
    Ok(Evaluation {
        name: pb.name.clone(),
        field: pb.field.config().to_string(),
        q: pb.q(),
        n_sub: pb.n_sub,
        n: pb.n(),
        d: pb.d,
        map_was_reduced: pb.map_was_reduced,
        position,
        first_main_theorem,
        non_truncated,
        truncated,
        truncated_skipped: skipped,
        rows,
        status,
    })
}

/// The non-truncated inequality on its own.
pub fn run_untruncated<F: ValuedField>(pb: &Problem<F>) -> Result<Evaluation<F>> {
    evaluate(pb, Mode::NonTruncated)
}

/// The truncated inequality; failed preconditions are errors.
pub fn run_truncated<F: ValuedField>(pb: &Problem<F>) -> Result<Evaluation<F>> {
    evaluate(pb, Mode::RequireTruncated)
}

/// Certifies that `sum w_i N(Q_i) - N_W - sum w_i N^(kappa_0)(Q_i)` is
/// bounded above, for the lifted hypersurfaces.
pub fn check_claim<F: ValuedField>(pb: &Problem<F>, data: &TruncatedData<F>) -> Result<TailCertificate> {
    let curves = Curves::build(pb, Some(data))?;
    let c = curves.t11.as_ref().expect("built with data");
    certify(|r| Curves::claim(c, r), &Curves::claim_breakpoints(c), Direction::BoundedAbove)
}

/// A table cell recomputed through the per-call functions.
#[derive(Clone, Debug, Serialize)]
pub struct SpotCheck {
    #[serde(serialize_with = "crate::ser::rat")]
    pub rho: Rat,
    pub column: String,
    #[serde(serialize_with = "crate::ser::rat")]
    pub table: Rat,
    #[serde(serialize_with = "crate::ser::rat")]
    pub recomputed: Rat,
    pub agrees: bool,
}

/// Recomputes `count` random cells of the table independently of the
/// precomputed polygons.
pub fn spot_checks<F: ValuedField>(pb: &Problem<F>, ev: &Evaluation<F>, count: usize) -> Result<Vec<SpotCheck>> {
    let mut rng = ChaCha8Rng::seed_from_u64(pb.seed ^ 0x5107);
    let kappa = ev.truncated.as_ref().map(|t| t.data.kappa0);
    let columns = 1 + 2 * pb.q() + if kappa.is_some() { pb.q() } else { 0 };
    let mut out = Vec::with_capacity(count);
    for _ in 0..count {
        let row = &ev.rows[rng.gen_range(0..ev.rows.len())];
        let rho = RadiusLog::new(row.rho.clone());
        let col = rng.gen_range(0..columns);
        let (column, table, recomputed) = if col == 0 {
            ("T".to_string(), row.t.clone(), map_characteristic(&pb.map, &rho)?)
        } else if col <= pb.q() {
            let i = col - 1;
            let v = map_counting(&pb.map, &pb.hypersurfaces[i], &rho, TruncationLevel::Infinite)?;
            (format!("N_{i}"), row.n[i].clone(), v)
        } else if col <= 2 * pb.q() {
            let i = col - 1 - pb.q();
            (format!("m_{i}"), row.m[i].clone(), map_proximity(&pb.map, &pb.hypersurfaces[i], &rho)?)
        } else {
            let i = col - 1 - 2 * pb.q();
            let level = TruncationLevel::Finite(kappa.expect("column exists"));
            let v = map_counting(&pb.map, &pb.hypersurfaces[i], &rho, level)?;
            let table = row.truncated.as_ref().expect("column exists").n_trunc[i].clone();
            (format!("N_trunc_{i}"), table, v)
        };
        let agrees = table == recomputed;
        out.push(SpotCheck { rho: row.rho.clone(), column, table, recomputed, agrees });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::scenario::Scenario;
    use crate::valfield::{PadicRationals, TadicFunctionField};

    fn problem(json: &str) -> Problem<PadicRationals> {
        let sc = Scenario::from_json(json).unwrap();
        Problem::build(&sc, PadicRationals::new(5).unwrap()).unwrap()
    }

    const LINE: &str = r#"{
        "field": {"kind": "padic", "p": 5},
        "ambient_dim": 1,
        "domain_vars": 1,
        "map": ["z^2 - 5", "z + 1"],
        "hypersurfaces": ["x0", "x1", "x0 + x1", "x0 - 2*x1"],
        "N": 1
    }"#;

    #[test]
    fn certify_piecewise_linear() {
        let bps = [rat(1), rat(3)];
        let f = |r: &Rat| if *r < rat(1) { -r.clone() } else { r - rat(2) };
        let c = certify(f, &bps, Direction::BoundedBelow).unwrap();
        assert_eq!((c.tail_start.clone(), c.slope.clone(), c.constant.clone(), c.holds), (rat(3), rat(1), rat(1), true));
        let c = certify(|r: &Rat| -r.clone(), &[], Direction::BoundedAbove).unwrap();
        assert!(c.holds && c.constant.is_zero());
        assert!(!certify(|r: &Rat| r.clone(), &[], Direction::BoundedAbove).unwrap().holds);
    }

    #[test]
    fn points_on_the_line() {
        let pb = problem(LINE);
        let ev = evaluate(&pb, Mode::Both).unwrap();
        assert_eq!(ev.status, Overall::Certified);
        assert!(ev.truncated_skipped.is_none(), "{:?}", ev.truncated_skipped);
        // sum deg Q_i(f) - (q - N) deg f
        assert_eq!(ev.non_truncated.slope, rat(7 - 6));
        let t = ev.truncated.as_ref().unwrap();
        assert!(t.verdicts.variant_b.holds && t.verdicts.claim.holds);
        assert_eq!(t.data.hilbert, 2);
        assert_eq!(t.data.kappa0, 1);
        assert!(t.data.hyperplane_log_coef.is_some());
        assert!(spot_checks(&pb, &ev, 5).unwrap().iter().all(|c| c.agrees));
    }

    #[test]
    fn first_main_theorem_constant() {
        let pb = problem(LINE);
        for q in &pb.hypersurfaces {
            check_fmt(&pb.map, q, &pb.grid).unwrap();
        }
        let pb = problem(&LINE.replace("\"z^2 - 5\", \"z + 1\"", "\"z\", \"1\""));
        assert_eq!(check_fmt(&pb.map, &pb.hypersurfaces[0], &pb.grid).unwrap(), rat(0));
        let scaled = Hypersurface::new(pb.hypersurfaces[0].poly().scale(&rat(5))).unwrap();
        // m_f(Q) carries ||Q||, so rescaling Q changes nothing
        assert_eq!(check_fmt(&pb.map, &scaled, &pb.grid).unwrap(), rat(0));
    }

    #[test]
    fn composite_in_hypersurface() {
        let pb = problem(
            r#"{"field": {"kind": "padic", "p": 5}, "ambient_dim": 2, "domain_vars": 1,
                "map": ["z^2", "z", "1"], "hypersurfaces": ["x0", "x1", "x2"], "N": 2}"#,
        );
        let conic = Hypersurface::new(crate::polyring::parse_polynomial(
            "x0*x2 - x1^2",
            &pb.field,
            crate::polyring::VariableScheme::Ambient(2),
        ).unwrap())
        .unwrap();
        assert!(matches!(check_fmt(&pb.map, &conic, &pb.grid), Err(Error::MapInHypersurface(_))));
    }

    #[test]
    fn identity_against_four_points() {
        let pb = problem(&LINE.replace("\"z^2 - 5\", \"z + 1\"", "\"z\", \"1\""));
        let data = prepare_truncated(&pb).unwrap();
        assert_eq!((data.hilbert, data.rank_f, data.kappa0), (2, 1, 1));
        // (q - 2) T = 2 rho against sum N^(1) - log r = 3 rho - rho
        let ev = run_truncated(&pb).unwrap();
        let t = ev.truncated.as_ref().unwrap();
        assert!(t.verdicts.variant_b.eventually_constant);
        assert!(check_claim(&pb, &data).unwrap().holds);
    }

    #[test]
    fn conic_lift() {
        let pb = problem(
            r#"{
            "field": {"kind": "padic", "p": 5},
            "ambient_dim": 2,
            "domain_vars": 1,
            "variety": {"generators": ["x0*x2 - x1^2"], "dim": 1},
            "map": ["z^2", "z", "1"],
            "hypersurfaces": ["x0", "x2", "x0 + x1 + x2", "x0 - x2", "x0^2 + 2*x1^2 + 3*x2^2"],
            "N": 1
        }"#,
        );
        let ev = evaluate(&pb, Mode::Both).unwrap();
        assert_eq!(pb.d, 2);
        let t = ev.truncated.as_ref().unwrap();
        assert_eq!(ev.status, Overall::Certified);
        assert!(ev.non_truncated.slope.is_zero());
        assert_eq!(t.data.hilbert, 5);
        assert!(t.data.hyperplane_log_coef.is_none());
        assert!(t.verdicts.claim.holds);
    }

    #[test]
    fn skips_truncated_when_q_is_small() {
        let pb = problem(&LINE.replace(", \"x0 - 2*x1\"", "").replace("\"N\": 1", "\"N\": 2"));
        let ev = evaluate(&pb, Mode::Both).unwrap();
        assert!(ev.truncated.is_none() && ev.truncated_skipped.is_some());
        assert!(matches!(run_truncated(&pb), Err(Error::Precondition(_))));
    }

    #[test]
    fn rejects_bad_position_and_constant_maps() {
        let pb = problem(&LINE.replace("\"x0 + x1\"", "\"2*x0\""));
        assert!(matches!(run_untruncated(&pb), Err(Error::Precondition(_))));
        let pb = problem(&LINE.replace("\"z^2 - 5\", \"z + 1\"", "\"1\", \"2\""));
        assert!(matches!(run_untruncated(&pb), Err(Error::Precondition(_))));
    }

    #[test]
    fn positive_characteristic() {
        let json = r#"{
            "field": {"kind": "tadic", "p": 3},
            "ambient_dim": 1,
            "domain_vars": 1,
            "map": ["z^3", "z^3 + 1"],
            "hypersurfaces": ["x0", "x1", "x0 + x1", "x0 + 2*x1"],
            "N": 1
        }"#;
        let sc = Scenario::from_json(json).unwrap();
        let pb = Problem::build(&sc, TadicFunctionField::new(3).unwrap()).unwrap();
        let ev = evaluate(&pb, Mode::RequireTruncated).unwrap();
        let t = ev.truncated.as_ref().unwrap();
        assert_eq!(t.data.index_s, IndexS::Index(2));
        assert_eq!(t.data.kappa0, 3 * (2 - t.data.rank_f as u64));
        assert!(t.verdicts.claim.holds && t.verdicts.variant_b.holds);
    }
}
