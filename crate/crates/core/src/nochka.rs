//! Nochka-type weights for hypersurfaces in subgeneral position, and the
//! subset selection that goes with them.
//!
//! Weights come from an exact linear program. Besides the sum and range
//! conditions it carries the rank inequalities
//! `sum_{i in S} w_i <= min(rank S, n + 1)` for `#S <= N + 1`; these say that
//! `w` restricted to any `(N+1)`-subset lies in the independence polytope of
//! the rank matroid truncated at `n + 1`, which is exactly what makes the
//! weighted-product selection succeed for every choice of `E`.

use std::collections::HashMap;

use itertools::Itertools;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::rank;
use crate::lp::{LinearProgram, LpOutcome, Relation};
use crate::valfield::ValuedField;
use crate::Rat;

/// Rank of every subset of at most `N + 1` hypersurface classes.
#[derive(Clone, Debug, Default)]
pub struct RankTable {
    ranks: HashMap<u64, usize>,
}

impl RankTable {
    pub fn new<F: ValuedField>(field: &F, classes: &[Vec<F::Elem>], max_size: usize) -> Self {
        let ncols = classes.first().map_or(0, |c| c.len());
        let mut ranks = HashMap::new();
        for k in 0..=max_size.min(classes.len()) {
            for s in (0..classes.len()).combinations(k) {
                let r = rank(field, s.iter().map(|&i| classes[i].clone()).collect(), ncols);
                ranks.insert(mask(&s), r);
            }
        }
        RankTable { ranks }
    }

    pub fn rank(&self, subset: &[usize]) -> Option<usize> {
        self.ranks.get(&mask(subset)).copied()
    }
}

fn mask(s: &[usize]) -> u64 {
    s.iter().fold(0, |m, &i| m | (1 << i))
}

#[derive(Clone, Debug, Serialize)]
pub struct NochkaWeights {
    #[serde(serialize_with = "crate::ser::rats")]
    pub omega: Vec<Rat>,
    #[serde(serialize_with = "crate::ser::rat")]
    pub omega_tilde: Rat,
    pub q: usize,
    pub n_sub: usize,
    pub n: usize,
    /// Whether the fallback program (weights not at the smallest `w~`) was used.
    pub fallback: bool,
    #[serde(skip)]
    pub ranks: RankTable,
}

fn rat(n: i64) -> Rat {
    Rat::from_integer(n.into())
}

/// `(q - 2N + n - 1, (n+1)/(2N-n+1), n/N)`.
fn constants(q: usize, n_sub: usize, n: usize) -> (Rat, Rat, Rat) {
    let (q, nn, n) = (q as i64, n_sub as i64, n as i64);
    (rat(q - 2 * nn + n - 1), Rat::new((n + 1).into(), (2 * nn - n + 1).into()), Rat::new(n.into(), nn.into()))
}

struct Program<'a> {
    q: usize,
    n: usize,
    n_sub: usize,
    ranks: &'a RankTable,
    base: LinearProgram,
    cuts: Vec<(Vec<usize>, usize)>,
}

impl Program<'_> {
    fn tilde(&self) -> usize {
        self.q
    }

    fn t(&self) -> usize {
        self.q + 1
    }

    fn unit(&self, i: usize) -> Vec<Rat> {
        let mut v = vec![Rat::zero(); self.q + 2];
        v[i] = Rat::one();
        v
    }

    /// Solves with the rank inequalities added lazily; returns the optimum.
    fn solve(&mut self, objective: Vec<Rat>) -> Result<(Vec<Rat>, Rat)> {
        loop {
            let mut lp = self.base.clone();
            lp.maximize(objective.clone());
            for (s, r) in &self.cuts {
                lp.constrain_sparse(&s.iter().map(|&i| (i, Rat::one())).collect::<Vec<_>>(), Relation::Le, rat(*r as i64));
            }
            let (x, value) = match lp.solve() {
                LpOutcome::Optimal { x, value } => (x, value),
                LpOutcome::Infeasible => {
                    return Err(Error::WeightsInfeasible(format!(
                        "no weights for q = {}, N = {}, n = {}",
                        self.q, self.n_sub, self.n
                    )))
                }
                LpOutcome::Unbounded => unreachable!("weights are bounded"),
            };
            let violated = self.violated(&x[..self.q]);
            if violated.is_empty() {
                return Ok((x, value));
            }
            self.cuts.extend(violated);
        }
    }

    fn violated(&self, w: &[Rat]) -> Vec<(Vec<usize>, usize)> {
        let mut out = Vec::new();
        for k in 2..=(self.n_sub + 1).min(self.q) {
            for s in (0..self.q).combinations(k) {
                let bound = self.ranks.rank(&s).expect("rank table covers N+1").min(self.n + 1);
                if bound < k && s.iter().map(|&i| &w[i]).sum::<Rat>() > rat(bound as i64) {
                    out.push((s, bound));
                }
            }
        }
        out
    }

    fn fix(&mut self, coeffs: Vec<Rat>, rel: Relation, value: Rat) {
        self.base.constrain(coeffs, rel, value);
    }

    /// Minimizes `w~`, then each `w_i` in turn, under the current rows.
    fn lexicographic(&mut self) -> Result<Vec<Rat>> {
        let tilde = self.unit(self.tilde());
        let (_, v) = self.solve(tilde.iter().map(|c| -c).collect())?;
        self.fix(tilde, Relation::Eq, -v);
        for i in 0..self.q {
            let e = self.unit(i);
            let (_, v) = self.solve(e.iter().map(|c| -c).collect())?;
            self.fix(e, Relation::Eq, -v);
        }
        let (x, _) = self.solve(vec![Rat::zero(); self.q + 2])?;
        Ok(x)
    }
}

/// Computes weights satisfying the four weight conditions and the rank
/// inequalities: smallest `w~` first, then lexicographically smallest `w`.
pub fn compute_weights<F: ValuedField>(
    field: &F,
    classes: &[Vec<F::Elem>],
    n_sub: usize,
    n: usize,
) -> Result<NochkaWeights> {
    let q = classes.len();
    if n_sub < n || n_sub == 0 || q + n <= 2 * n_sub + 1 {
        return Err(Error::Precondition(format!(
            "weights need N >= n and q > 2N - n + 1 (q = {q}, N = {n_sub}, n = {n})"
        )));
    }
    if q > 63 {
        return Err(Error::Input(format!("{q} hypersurfaces is beyond the supported 63")));
    }
    let ranks = RankTable::new(field, classes, n_sub + 1);
    if let Some(i) = (0..q).find(|&i| ranks.rank(&[i]).unwrap() == 0) {
        return Err(Error::Precondition(format!("hypersurface {i} vanishes identically on the variety")));
    }
    if let Some(s) = (0..q).combinations(n_sub + 1).find(|s| ranks.rank(s).unwrap() < n + 1) {
        return Err(Error::Precondition(format!("hypersurfaces {s:?} span fewer than n + 1 = {} classes", n + 1)));
    }
    let (c, lo, hi) = constants(q, n_sub, n);
    let mut base = LinearProgram::new(q + 2);
    let mut sum = vec![Rat::one(); q + 2];
    sum[q] = -c.clone();
    sum[q + 1] = Rat::zero();
    base.constrain(sum, Relation::Eq, rat(n as i64 + 1));
    base.constrain_sparse(&[(q, Rat::one())], Relation::Ge, lo.clone());
    base.constrain_sparse(&[(q, Rat::one())], Relation::Le, hi.clone());
    for i in 0..q {
        base.constrain_sparse(&[(i, Rat::one()), (q, -Rat::one())], Relation::Le, Rat::zero());
        base.constrain_sparse(&[(i, Rat::one()), (q + 1, -Rat::one())], Relation::Ge, Rat::zero());
    }
    let mut prog = Program { q, n, n_sub, ranks: &ranks, base, cuts: Vec::new() };

    // At the smallest w~ the largest weight equals w~ automatically.
    let tilde = prog.unit(prog.tilde());
    let (_, v) = prog.solve(tilde.iter().map(|c| -c).collect())?;
    let w_min = -v;
    let mut at_min = Program { base: prog.base.clone(), cuts: prog.cuts.clone(), ..prog };
    at_min.fix(tilde.clone(), Relation::Eq, w_min);
    let t_unit = at_min.unit(at_min.t());
    let (_, t_best) = at_min.solve(t_unit.clone())?;
    let (x, fallback) = if t_best.is_positive() {
        at_min.fix(t_unit, Relation::Ge, t_best);
        (at_min.lexicographic()?, false)
    } else {
        // Pin the maximum to some index j so that w~ stays the true maximum.
        let mut best: Option<(usize, Rat)> = None;
        for j in 0..q {
            let mut pj = Program { base: prog.base.clone(), cuts: at_min.cuts.clone(), ..at_min };
            let mut pin = pj.unit(j);
            pin[q] = -Rat::one();
            pj.fix(pin, Relation::Eq, Rat::zero());
            let (_, t) = pj.solve(t_unit.clone())?;
            if t.is_positive() && best.as_ref().is_none_or(|(_, b)| t > *b) {
                best = Some((j, t));
            }
        }
        let (j, t) = best.ok_or_else(|| Error::WeightsInfeasible("no strictly positive weights".into()))?;
        let mut pj = Program { base: prog.base.clone(), cuts: at_min.cuts.clone(), ..at_min };
        let mut pin = pj.unit(j);
        pin[q] = -Rat::one();
        pj.fix(pin, Relation::Eq, Rat::zero());
        pj.fix(t_unit, Relation::Ge, t);
        (pj.lexicographic()?, true)
    };
    let omega: Vec<Rat> = x[..q].to_vec();
    let omega_tilde = omega.iter().max().cloned().expect("q > 0");
    let weights = NochkaWeights { omega, omega_tilde, q, n_sub, n, fallback, ranks: ranks.clone() };
    weights.verify()?;
    Ok(weights)
}

impl NochkaWeights {
    /// Re-checks every condition exactly.
    pub fn verify(&self) -> Result<()> {
        let (c, lo, hi) = constants(self.q, self.n_sub, self.n);
        let fail = |what: &str| Err(Error::InternalConsistency(format!("weights violate {what}")));
        if self.omega.iter().any(|w| !w.is_positive() || *w > Rat::one()) {
            return fail("0 < w_i <= 1");
        }
        if self.omega.iter().max() != Some(&self.omega_tilde) {
            return fail("w~ = max w_i");
        }
        if self.omega.iter().sum::<Rat>() != &self.omega_tilde * c + rat(self.n as i64 + 1) {
            return fail("the sum condition");
        }
        if self.omega_tilde < lo || self.omega_tilde > hi {
            return fail("the range of w~");
        }
        for k in 1..=(self.n_sub + 1).min(self.q) {
            for s in (0..self.q).combinations(k) {
                let bound = self.ranks.rank(&s).unwrap().min(self.n + 1);
                if s.iter().map(|&i| &self.omega[i]).sum::<Rat>() > rat(bound as i64) {
                    return fail(&format!("the rank inequality on {s:?}"));
                }
            }
        }
        Ok(())
    }

    pub fn rank(&self, subset: &[usize]) -> Option<usize> {
        self.ranks.rank(subset)
    }

    /// Smallest positive integer `A` with every `A w_i` integral.
    pub fn common_denominator(&self) -> num_bigint::BigInt {
        self.omega.iter().fold(num_bigint::BigInt::one(), |acc, w| acc.lcm(w.denom()))
    }
}

/// Outcome of a subset selection.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Selection {
    pub subset: Vec<usize>,
    /// Whether the greedy choice failed and exhaustive search was needed.
    pub exhaustive: bool,
}

fn check_subset(w: &NochkaWeights, r: &[usize]) -> Result<()> {
    if r.len() != w.n_sub + 1 || !r.iter().all_unique() || r.iter().any(|&i| i >= w.q) {
        return Err(Error::Input(format!("{r:?} is not a set of N + 1 = {} indices below {}", w.n_sub + 1, w.q)));
    }
    Ok(())
}

fn select_by(
    w: &NochkaWeights,
    r: &[usize],
    key: &[Rat],
    holds: impl Fn(&[usize]) -> bool,
) -> Result<Selection> {
    let n1 = w.n + 1;
    let mut order = r.to_vec();
    order.sort_by(|a, b| key[*b].cmp(&key[*a]).then(a.cmp(b)));
    let mut chosen: Vec<usize> = Vec::new();
    for i in order {
        if chosen.len() == n1 {
            break;
        }
        let mut trial = chosen.clone();
        trial.push(i);
        trial.sort();
        if w.rank(&trial) == Some(trial.len()) {
            chosen = trial;
        }
    }
    if chosen.len() == n1 && holds(&chosen) {
        return Ok(Selection { subset: chosen, exhaustive: false });
    }
    let mut sorted = r.to_vec();
    sorted.sort();
    sorted
        .into_iter()
        .combinations(n1)
        .find(|s| w.rank(s) == Some(n1) && holds(s))
        .map(|subset| Selection { subset, exhaustive: true })
        .ok_or_else(|| Error::SubsetSelection(r.to_vec()))
}

/// Finds `R° ⊆ R` of `n + 1` independent classes with
/// `prod_{R} E_i^{w_i} <= prod_{R°} E_i`, compared exactly after raising
/// both sides to the common denominator of the weights.
pub fn select_subset(w: &NochkaWeights, e: &[Rat], r: &[usize]) -> Result<Selection> {
    check_subset(w, r)?;
    if e.len() != w.q || r.iter().any(|&i| e[i] < Rat::one()) {
        return Err(Error::Input("need one value E_i >= 1 per hypersurface".into()));
    }
    let a = Rat::from_integer(w.common_denominator());
    let power = |x: &Rat, k: &Rat| -> Rat {
        let k = k.to_integer();
        let k: usize = k.try_into().expect("exponent fits in usize");
        num_traits::pow(x.clone(), k)
    };
    let lhs: Rat = r.iter().map(|&i| power(&e[i], &(&a * &w.omega[i]))).product();
    select_by(w, r, e, |s| lhs <= s.iter().map(|&i| power(&e[i], &a)).product())
}

/// Log form: `sum_{R} w_i x_i <= sum_{R°} x_i` with `x_i = log E_i >= 0`.
pub fn select_subset_log(w: &NochkaWeights, x: &[Rat], r: &[usize]) -> Result<Selection> {
    check_subset(w, r)?;
    if x.len() != w.q || r.iter().any(|&i| x[i].is_negative()) {
        return Err(Error::Input("need one value log E_i >= 0 per hypersurface".into()));
    }
    let lhs: Rat = r.iter().map(|&i| &w.omega[i] * &x[i]).sum();
    select_by(w, r, x, |s| lhs <= s.iter().map(|&i| x[i].clone()).sum())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::valfield::PadicRationals;

    fn field() -> PadicRationals {
        PadicRationals::new(7).unwrap()
    }

    fn classes(rows: &[&[i64]]) -> Vec<Vec<Rat>> {
        rows.iter().map(|r| r.iter().map(|&x| rat(x)).collect()).collect()
    }

    fn points(q: i64) -> Vec<Vec<Rat>> {
        (0..q).map(|i| vec![rat(1), rat(i)]).collect()
    }

    #[test]
    fn general_position_gives_unit_weights() {
        let w = compute_weights(&field(), &points(5), 1, 1).unwrap();
        assert!(w.omega.iter().all(|x| *x == rat(1)));
        assert_eq!(w.omega_tilde, rat(1));
    }

    #[test]
    fn pinched_range() {
        let w = compute_weights(&field(), &points(6), 2, 1).unwrap();
        assert_eq!(w.omega_tilde, Rat::new(1.into(), 2.into()));
        assert_eq!(w.omega.iter().sum::<Rat>(), rat(3));
        assert!(!w.fallback);
    }

    #[test]
    fn scaling_classes_keeps_weights() {
        let a = points(6);
        let b: Vec<Vec<Rat>> = a.iter().enumerate().map(|(i, r)| r.iter().map(|x| x * rat(i as i64 + 2)).collect()).collect();
        assert_eq!(compute_weights(&field(), &a, 2, 1).unwrap().omega, compute_weights(&field(), &b, 2, 1).unwrap().omega);
    }

    #[test]
    fn repeated_lines_in_the_plane() {
        // Lines in P^2 with x0 repeated: 3-subgeneral but not general position.
        let cl = classes(&[&[1, 0, 0], &[1, 0, 0], &[0, 1, 0], &[0, 0, 1], &[1, 1, 1], &[1, 2, 3], &[1, 3, 2], &[2, 1, 5]]);
        let w = compute_weights(&field(), &cl, 3, 2).unwrap();
        w.verify().unwrap();
        assert!(&w.omega[0] + &w.omega[1] <= rat(1));
    }

    #[test]
    fn preconditions() {
        assert!(compute_weights(&field(), &points(2), 1, 1).is_err());
        let cl = classes(&[&[1, 0], &[1, 0], &[0, 1], &[1, 1]]);
        // The pair {0, 1} spans one class: not in general position.
        assert!(matches!(compute_weights(&field(), &cl, 1, 1), Err(Error::Precondition(_))));
        // A zero class can hide inside spanning subsets when N > n.
        let cl = classes(&[&[0, 0], &[1, 0], &[0, 1], &[1, 1], &[1, 2], &[1, 3]]);
        assert!(matches!(compute_weights(&field(), &cl, 2, 1), Err(Error::Precondition(_))));
    }

    #[test]
    fn selection_examples() {
        let w = compute_weights(&field(), &points(6), 2, 1).unwrap();
        let ones = vec![rat(1); 6];
        assert_eq!(select_subset(&w, &ones, &[0, 1, 2]).unwrap().subset.len(), 2);
        let e = vec![rat(4), rat(2), rat(1), rat(1), rat(1), rat(1)];
        assert_eq!(select_subset(&w, &e, &[0, 1, 2]).unwrap(), Selection { subset: vec![0, 1], exhaustive: false });
        let g = compute_weights(&field(), &points(4), 1, 1).unwrap();
        let e = vec![rat(3), Rat::new(5.into(), 2.into()), rat(9), rat(1)];
        assert_eq!(select_subset(&g, &e, &[1, 3]).unwrap().subset, vec![1, 3]);
        assert!(select_subset(&g, &e, &[1]).is_err());
        let x = vec![rat(2), rat(1), rat(0), rat(0), rat(0), rat(0)];
        assert_eq!(select_subset_log(&w, &x, &[0, 1, 2]).unwrap().subset, vec![0, 1]);
    }
}
