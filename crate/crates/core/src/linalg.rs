//! Exact linear algebra over the coefficient field and over the polynomial
//! ring (fraction-free elimination, so ranks are ranks over the rational
//! function field).

use rand::RngCore;

use crate::polyring::Polynomial;
use crate::valfield::ValuedField;

/// Reduced row echelon form of a matrix over `F`.
#[derive(Clone, Debug)]
pub struct Echelon<F: ValuedField> {
    pub rows: Vec<Vec<F::Elem>>,
    pub pivots: Vec<usize>,
    pub ncols: usize,
}

impl<F: ValuedField> Echelon<F> {
    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    /// Normal form of `v` modulo the row space.
    pub fn reduce(&self, field: &F, v: &[F::Elem]) -> Vec<F::Elem> {
        let mut v = v.to_vec();
        for (row, &pc) in self.rows.iter().zip(&self.pivots) {
            if field.is_zero(&v[pc]) {
                continue;
            }
            let k = v[pc].clone();
            for (x, r) in v.iter_mut().zip(row) {
                if !field.is_zero(r) {
                    *x = field.sub(x, &field.mul(&k, r));
                }
            }
        }
        v
    }

    /// Columns without a pivot, ascending.
    pub fn free_columns(&self) -> Vec<usize> {
        (0..self.ncols).filter(|c| !self.pivots.contains(c)).collect()
    }

    /// Basis of the right kernel `{x : A x = 0}`.
    pub fn kernel(&self, field: &F) -> Vec<Vec<F::Elem>> {
        self.free_columns()
            .into_iter()
            .map(|fc| {
                let mut x = vec![field.zero(); self.ncols];
                x[fc] = field.one();
                for (row, &pc) in self.rows.iter().zip(&self.pivots) {
                    x[pc] = field.neg(&row[fc]);
                }
                x
            })
            .collect()
    }
}

/// Gauss-Jordan elimination with columns scanned in the given order.
pub fn rref_with_order<F: ValuedField>(
    field: &F,
    mut rows: Vec<Vec<F::Elem>>,
    ncols: usize,
    column_order: &[usize],
) -> Echelon<F> {
    let mut pivots = Vec::new();
    let mut r = 0;
    for &c in column_order {
        if r == rows.len() {
            break;
        }
        let Some(pr) = (r..rows.len()).find(|&i| !field.is_zero(&rows[i][c])) else {
            continue;
        };
        rows.swap(r, pr);
        let inv = field.inv(&rows[r][c]).expect("pivot is nonzero");
        for x in rows[r].iter_mut() {
            if !field.is_zero(x) {
                *x = field.mul(x, &inv);
            }
        }
        let pivot_row = rows[r].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i == r || field.is_zero(&row[c]) {
                continue;
            }
            let k = row[c].clone();
            for (x, p) in row.iter_mut().zip(&pivot_row) {
                if !field.is_zero(p) {
                    *x = field.sub(x, &field.mul(&k, p));
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    rows.truncate(r);
    Echelon { rows, pivots, ncols }
}

pub fn rref<F: ValuedField>(field: &F, rows: Vec<Vec<F::Elem>>, ncols: usize) -> Echelon<F> {
    let order: Vec<usize> = (0..ncols).collect();
    rref_with_order(field, rows, ncols, &order)
}

pub fn rank<F: ValuedField>(field: &F, rows: Vec<Vec<F::Elem>>, ncols: usize) -> usize {
    rref(field, rows, ncols).rank()
}

/// Rank over the fraction field of a matrix of polynomials (Bareiss).
pub fn poly_rank<F: ValuedField>(matrix: &[Vec<Polynomial<F>>]) -> usize {
    fraction_free_eliminate(matrix.to_vec()).0
}

/// Determinant of a square polynomial matrix (Bareiss).
pub fn poly_det<F: ValuedField>(matrix: &[Vec<Polynomial<F>>]) -> Polynomial<F> {
    let n = matrix.len();
    assert!(matrix.iter().all(|r| r.len() == n), "square matrix required");
    assert!(n > 0, "empty matrix");
    let (rank, last, swaps) = fraction_free_eliminate(matrix.to_vec());
    let last = last.expect("nonempty matrix");
    let field = matrix[0][0].field();
    let nvars = matrix[0][0].nvars();
    if rank < n {
        return Polynomial::zero(field, nvars);
    }
    if swaps % 2 == 1 {
        -&last
    } else {
        last
    }
}

/// Returns (rank, last pivot, number of row swaps).
fn fraction_free_eliminate<F: ValuedField>(
    mut a: Vec<Vec<Polynomial<F>>>,
) -> (usize, Option<Polynomial<F>>, usize) {
    let nrows = a.len();
    let ncols = a.first().map_or(0, |r| r.len());
    let (field, nvars) = match a.first().and_then(|r| r.first()) {
        Some(p) => (p.field().clone(), p.nvars()),
        None => return (0, None, 0),
    };
    let mut prev = Polynomial::one(&field, nvars);
    let mut r = 0;
    let mut swaps = 0;
    for c in 0..ncols {
        if r == nrows {
            break;
        }
        // Prefer the sparsest nonzero pivot to limit growth.
        let Some(pr) = (r..nrows)
            .filter(|&i| !a[i][c].is_zero())
            .min_by_key(|&i| (a[i][c].num_terms(), i))
        else {
            continue;
        };
        if pr != r {
            a.swap(r, pr);
            swaps += 1;
        }
        let pivot = a[r][c].clone();
        for i in r + 1..nrows {
            let lead = a[i][c].clone();
            for j in c..ncols {
                let val = &(&pivot * &a[i][j]) - &(&lead * &a[r][j]);
                a[i][j] = if prev.is_constant() {
                    let k = prev.as_constant().expect("constant");
                    val.scale(&field.inv(&k).expect("nonzero pivot"))
                } else {
                    val.exact_div(&prev).expect("Bareiss quotient is exact")
                };
            }
        }
        prev = pivot;
        r += 1;
    }
    (r, Some(prev), swaps)
}

/// Rank over the fraction field, using random evaluation as a shortcut.
///
/// The rank at a point never exceeds the generic rank, so a full-rank
/// evaluation is conclusive; anything lower is settled exactly.
pub fn generic_rank<F: ValuedField>(matrix: &[Vec<Polynomial<F>>], rng: &mut dyn RngCore) -> usize {
    let nrows = matrix.len();
    let ncols = matrix.first().map_or(0, |r| r.len());
    if nrows == 0 || ncols == 0 {
        return 0;
    }
    let field = matrix[0][0].field().clone();
    let nvars = matrix[0][0].nvars();
    let point: Vec<F::Elem> = (0..nvars).map(|_| field.sample_generic(rng, 3)).collect();
    let evaluated: Vec<Vec<F::Elem>> = matrix
        .iter()
        .map(|row| row.iter().map(|p| p.eval(&point)).collect())
        .collect();
    let r = rank(&field, evaluated, ncols);
    if r == nrows.min(ncols) {
        return r;
    }
    poly_rank(matrix)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::valfield::{PadicRationals, TadicFunctionField};
    use num_rational::BigRational;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn c(n: i64) -> BigRational {
        BigRational::from_integer(n.into())
    }

    #[test]
    fn rref_rank_and_kernel() {
        let f = PadicRationals::new(5).unwrap();
        let rows = vec![vec![c(1), c(2), c(3)], vec![c(2), c(4), c(6)], vec![c(0), c(1), c(1)]];
        let e = rref(&f, rows.clone(), 3);
        assert_eq!(e.rank(), 2);
        let ker = e.kernel(&f);
        assert_eq!(ker.len(), 1);
        for row in &rows {
            let dot = row.iter().zip(&ker[0]).fold(c(0), |acc, (a, b)| acc + a * b);
            assert_eq!(dot, c(0));
        }
        assert!(e.reduce(&f, &rows[1]).iter().all(|x| *x == c(0)));
    }

    #[test]
    fn polynomial_rank_examples() {
        let f = PadicRationals::new(5).unwrap();
        let z = Polynomial::var(&f, 1, 0);
        let one = Polynomial::one(&f, 1);
        let zero = Polynomial::zero(&f, 1);
        // rows (z^2, z, 1), (2z, 1, 0)
        let m = vec![vec![z.pow(2), z.clone(), one.clone()], vec![z.scale(&c(2)), one.clone(), zero.clone()]];
        assert_eq!(poly_rank(&m), 2);
        let dep = vec![vec![z.clone(), one.clone()], vec![z.pow(2), z.clone()]];
        assert_eq!(poly_rank(&dep), 1);
        assert!(poly_det(&dep).is_zero());
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert_eq!(generic_rank(&dep, &mut rng), 1);
        assert_eq!(generic_rank(&m, &mut rng), 2);
    }

    #[test]
    fn determinant_matches_cofactor_expansion() {
        let f = TadicFunctionField::new(3).unwrap();
        let z = Polynomial::var(&f, 2, 0);
        let w = Polynomial::var(&f, 2, 1);
        let one = Polynomial::one(&f, 2);
        let m = vec![
            vec![z.clone(), w.clone(), one.clone()],
            vec![one.clone(), &z * &w, w.pow(2)],
            vec![z.pow(2), one.clone(), &z + &w],
        ];
        let minor = |a: &Polynomial<_>, b: &Polynomial<_>, cc: &Polynomial<_>, d: &Polynomial<_>| &(a * d) - &(b * cc);
        let expected = &(&(&m[0][0] * &minor(&m[1][1], &m[1][2], &m[2][1], &m[2][2]))
            - &(&m[0][1] * &minor(&m[1][0], &m[1][2], &m[2][0], &m[2][2])))
            + &(&m[0][2] * &minor(&m[1][0], &m[1][1], &m[2][0], &m[2][1]));
        assert_eq!(poly_det(&m), expected);
    }
}
