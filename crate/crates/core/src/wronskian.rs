//! Ranks of maps, non-degeneracy over `I_d(V)`, the index of
//! non-degeneracy, and generalized Wronskians.

use std::collections::BTreeSet;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{generic_rank, poly_det, poly_rank, rref};
use crate::polyring::{hasse_derivative, MultiIndex, Polynomial};
use crate::projgeom::{Hypersurface, ProjectiveMap, Variety};
use crate::valfield::ValuedField;

fn first_order_rows<F: ValuedField>(polys: &[Polynomial<F>]) -> Vec<Vec<Polynomial<F>>> {
    let m = polys[0].nvars();
    let mut rows = vec![polys.to_vec()];
    for i in 0..m {
        let e = MultiIndex::unit(m, i);
        rows.push(polys.iter().map(|p| hasse_derivative(p, &e)).collect());
    }
    rows
}

/// `rank f`: rank of `(D^g f_0, ..., D^g f_M)` over `|g| <= 1`, minus one.
pub fn rank_f<F: ValuedField>(map: &ProjectiveMap<F>) -> usize {
    poly_rank(&first_order_rows(map.coordinates())) - 1
}

/// The composites `A_j(f)` for a basis `A_j` of `I_d(V)`.
pub fn composites<F: ValuedField>(map: &ProjectiveMap<F>, basis: &[Hypersurface<F>]) -> Result<Vec<Polynomial<F>>> {
    basis.iter().map(|a| a.evaluate(map)).collect()
}

#[derive(Clone, Debug)]
pub struct Nondegeneracy<F: ValuedField> {
    pub nondegenerate: bool,
    /// A hypersurface with nonzero class that vanishes on the map.
    pub witness: Option<Hypersurface<F>>,
}

/// Decides whether `A_1(f), ..., A_H(f)` are linearly independent over `F`.
pub fn nondegeneracy_check<F: ValuedField>(
    map: &ProjectiveMap<F>,
    v: &Variety<F>,
    d: u64,
) -> Result<Nondegeneracy<F>> {
    let basis = v.hilbert_function(d)?.basis;
    let comps = composites(map, &basis)?;
    let field = v.field();
    let monomials: BTreeSet<&MultiIndex> = comps.iter().flat_map(|c| c.terms().map(|(e, _)| e)).collect();
    let rows: Vec<Vec<F::Elem>> = monomials.iter().map(|m| comps.iter().map(|c| c.coeff(m)).collect()).collect();
    let kernel = rref(field, rows, comps.len()).kernel(field);
    let Some(c) = kernel.into_iter().next() else {
        return Ok(Nondegeneracy { nondegenerate: true, witness: None });
    };
    let mut q = Polynomial::zero(field, v.ambient_dim() + 1);
    for (cj, a) in c.iter().zip(&basis) {
        q = &q + &a.poly().scale(cj);
    }
    Ok(Nondegeneracy { nondegenerate: false, witness: Some(Hypersurface::new(q)?) })
}

/// The `d`-th index of non-degeneracy.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum IndexS {
    /// Characteristic zero: the index plays no role.
    NotApplicable,
    Index(u32),
}

/// Smallest `s >= 1` such that the composites stay independent over the
/// field of fractions of `F[z_1^{p^s}, ..., z_m^{p^s}]`.
///
/// Independence there is full rank of the coordinate matrix in the free
/// basis `z^t`, `t in [0, p^s)^m`.
pub fn index_s<F: ValuedField>(map: &ProjectiveMap<F>, v: &Variety<F>, d: u64) -> Result<IndexS> {
    let p = v.field().characteristic();
    if p == 0 {
        return Ok(IndexS::NotApplicable);
    }
    let basis = v.hilbert_function(d)?.basis;
    let comps = composites(map, &basis)?;
    let max_exp = comps.iter().flat_map(|c| c.terms().flat_map(|(e, _)| e.as_slice().to_vec())).max().unwrap_or(0);
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut s = 1u32;
    loop {
        let q = p.checked_pow(s).ok_or_else(|| Error::Input("index search overflowed".into()))?;
        if coordinate_rank(&comps, q, &mut rng) == comps.len() {
            return Ok(IndexS::Index(s));
        }
        if q > max_exp as u64 {
            return Err(Error::Precondition("map is degenerate over I_d(V)".into()));
        }
        s += 1;
    }
}

fn coordinate_rank<F: ValuedField>(comps: &[Polynomial<F>], q: u64, rng: &mut ChaCha8Rng) -> usize {
    let field = comps[0].field();
    let m = comps[0].nvars();
    let split = |e: &MultiIndex| -> (MultiIndex, MultiIndex) {
        let rem = e.as_slice().iter().map(|&x| (x as u64 % q) as u32).collect();
        let quo = e.as_slice().iter().map(|&x| (x as u64 / q) as u32).collect();
        (MultiIndex::new(rem), MultiIndex::new(quo))
    };
    let taus: Vec<MultiIndex> = comps
        .iter()
        .flat_map(|c| c.terms().map(|(e, _)| split(e).0))
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let matrix: Vec<Vec<Polynomial<F>>> = comps
        .iter()
        .map(|c| {
            let mut row = vec![Polynomial::zero(field, m); taus.len()];
            for (e, coef) in c.terms() {
                let (tau, quo) = split(e);
                let k = taus.binary_search(&tau).expect("tau collected above");
                row[k] = &row[k] + &Polynomial::monomial(field, quo, coef.clone());
            }
            row
        })
        .collect();
    generic_rank(&matrix, rng)
}

/// `kappa_0 = p^{s-1} (H - k)` in characteristic `p > 0`, `H - k` otherwise.
pub fn kappa0(h: usize, k: usize, s: IndexS, p: u64) -> Result<u64> {
    if h == 0 || k >= h {
        return Err(Error::Input(format!("kappa_0 needs 0 <= k < H, got H = {h}, k = {k}")));
    }
    let base = (h - k) as u64;
    match (p, s) {
        (0, IndexS::NotApplicable) => Ok(base),
        (p, IndexS::Index(s)) if p > 0 && s >= 1 => p
            .checked_pow(s - 1)
            .and_then(|x| x.checked_mul(base))
            .ok_or_else(|| Error::Input("kappa_0 overflows".into())),
        _ => Err(Error::Input(format!("index {s:?} does not match characteristic {p}"))),
    }
}

#[derive(Clone, Debug, Serialize)]
#[serde(bound = "")]
pub struct WronskianCertificate<F: ValuedField> {
    pub gammas: Vec<MultiIndex>,
    #[serde(serialize_with = "crate::ser::display")]
    pub w: Polynomial<F>,
    pub sum_degrees: u64,
    pub kappa0: u64,
    pub rank_f: usize,
    /// Rank of the first-order rows of the composites, minus one; bounds `rank f`.
    pub composite_rank: usize,
}

/// Greedy search for `H_V(d)` multi-indices with a nonzero Wronskian,
/// scanning `|g| <= kappa_0` in graded-lex order.
pub fn find_wronskian<F: ValuedField>(
    map: &ProjectiveMap<F>,
    v: &Variety<F>,
    d: u64,
    kappa0: u64,
    seed: u64,
) -> Result<WronskianCertificate<F>> {
    let basis = v.hilbert_function(d)?.basis;
    let comps = composites(map, &basis)?;
    let h = comps.len();
    let rank_f = rank_f(map);
    let composite_rank = poly_rank(&first_order_rows(&comps)) - 1;
    if rank_f > composite_rank {
        return Err(Error::InternalConsistency(format!(
            "rank f = {rank_f} exceeds the composite rank {composite_rank}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let bound = u32::try_from(kappa0).map_err(|_| Error::Input("kappa_0 too large".into()))?;
    let mut rows: Vec<Vec<Polynomial<F>>> = Vec::new();
    let mut gammas = Vec::new();
    for gamma in MultiIndex::all_up_to(map.domain_vars(), bound) {
        if rows.len() == h {
            break;
        }
        let row: Vec<Polynomial<F>> = comps.iter().map(|c| hasse_derivative(c, &gamma)).collect();
        if row.iter().all(|p| p.is_zero()) {
            continue;
        }
        rows.push(row);
        if generic_rank(&rows, &mut rng) == rows.len() {
            gammas.push(gamma);
        } else {
            rows.pop();
        }
    }
    if rows.len() < h {
        return Err(Error::WronskianBound { reached: rows.len(), target: h, kappa0 });
    }
    let w = poly_det(&rows);
    if w.is_zero() {
        return Err(Error::InternalConsistency("selected Wronskian vanishes".into()));
    }
    let sum_degrees = gammas.iter().map(|g| g.degree()).sum();
    Ok(WronskianCertificate { gammas, w, sum_degrees, kappa0, rank_f, composite_rank })
}
