//! Exact linear algebra over the rationals.
//!
//! Dense systems use fraction-free (Bareiss) elimination on integer rows. The
//! large sparse systems built by the invariant solvers go through
//! [`SparseEchelon`], an incremental fraction-free echelon form keyed by
//! leading column.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::rational::Rational;

/// Scales a rational row to a primitive integer row with the same kernel.
fn integer_row(row: &[Rational]) -> Vec<BigInt> {
    let mut l = BigInt::one();
    for r in row {
        l = l.lcm(r.denom());
    }
    let ints: Vec<BigInt> = row.iter().map(|r| (r * &l).to_integer()).collect();
    make_primitive(ints)
}

fn make_primitive(mut v: Vec<BigInt>) -> Vec<BigInt> {
    let g = v.iter().fold(BigInt::zero(), |g, x| g.gcd(x));
    if !g.is_zero() && !g.is_one() {
        for x in v.iter_mut() {
            *x /= &g;
        }
    }
    v
}

/// Fraction-free row echelon form. Returns the reduced rows together with the
/// pivot column of each row.
fn bareiss_echelon(rows: &[Vec<Rational>], ncols: usize) -> (Vec<Vec<BigInt>>, Vec<usize>) {
    let mut m: Vec<Vec<BigInt>> = rows.iter().map(|r| integer_row(r)).collect();
    let nrows = m.len();
    let mut pivots = Vec::new();
    let mut prev = BigInt::one();
    let mut r = 0;
    for c in 0..ncols {
        if r == nrows {
            break;
        }
        let Some(p) = (r..nrows).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        for i in (r + 1)..nrows {
            for j in (c + 1)..ncols {
                let v = &m[r][c] * &m[i][j] - &m[i][c] * &m[r][j];
                m[i][j] = v / &prev;
            }
            m[i][c] = BigInt::zero();
        }
        // Entries left of column c in row r are already zero; entries in
        // columns skipped earlier stay as computed minors.
        prev = m[r][c].clone();
        pivots.push(c);
        r += 1;
    }
    m.truncate(r);
    (m, pivots)
}

/// Rank of a rational matrix.
pub fn rank(rows: &[Vec<Rational>], ncols: usize) -> usize {
    bareiss_echelon(rows, ncols).1.len()
}

/// Basis of the right nullspace `{v : M v = 0}`. Each basis vector has a 1 in
/// one free column and 0 in the other free columns.
pub fn exact_nullspace(rows: &[Vec<Rational>], ncols: usize) -> Vec<Vec<Rational>> {
    let (ech, pivots) = bareiss_echelon(rows, ncols);
    kernel_from_echelon(&ech, &pivots, ncols)
}

fn kernel_from_echelon(ech: &[Vec<BigInt>], pivots: &[usize], ncols: usize) -> Vec<Vec<Rational>> {
    let is_pivot = {
        let mut v = vec![false; ncols];
        for &p in pivots {
            v[p] = true;
        }
        v
    };
    let mut basis = Vec::new();
    for f in (0..ncols).filter(|&c| !is_pivot[c]) {
        let mut x = vec![Rational::zero(); ncols];
        x[f] = Rational::one();
        for (row, &pc) in ech.iter().zip(pivots).rev() {
            let mut s = Rational::zero();
            for j in (pc + 1)..ncols {
                if !row[j].is_zero() && !x[j].is_zero() {
                    s += Rational::from_integer(row[j].clone()) * &x[j];
                }
            }
            x[pc] = -s / Rational::from_integer(row[pc].clone());
        }
        basis.push(x);
    }
    basis
}

/// Some solution of `A x = b`, or `None` when the system is inconsistent.
/// Free variables are set to zero.
pub fn solve(a: &[Vec<Rational>], b: &[Rational], ncols: usize) -> Option<Vec<Rational>> {
    let aug: Vec<Vec<Rational>> = a
        .iter()
        .zip(b)
        .map(|(row, bi)| {
            let mut r = row.clone();
            r.push(-bi.clone());
            r
        })
        .collect();
    let (ech, pivots) = bareiss_echelon(&aug, ncols + 1);
    if pivots.last() == Some(&ncols) {
        return None;
    }
    let mut x = vec![Rational::zero(); ncols + 1];
    x[ncols] = Rational::one();
    for (row, &pc) in ech.iter().zip(&pivots).rev() {
        let mut s = Rational::zero();
        for j in (pc + 1)..=ncols {
            if !row[j].is_zero() && !x[j].is_zero() {
                s += Rational::from_integer(row[j].clone()) * &x[j];
            }
        }
        x[pc] = -s / Rational::from_integer(row[pc].clone());
    }
    x.truncate(ncols);
    Some(x)
}

/// Coordinates of `target` in the span of `vectors` (unique when the vectors
/// are independent), or `None` if `target` lies outside the span.
pub fn express_in_span(vectors: &[Vec<Rational>], target: &[Rational]) -> Option<Vec<Rational>> {
    let dim = target.len();
    let rows: Vec<Vec<Rational>> = (0..dim)
        .map(|i| vectors.iter().map(|v| v[i].clone()).collect())
        .collect();
    solve(&rows, target, vectors.len())
}

/// `M v` for a dense matrix.
pub fn mat_vec(rows: &[Vec<Rational>], v: &[Rational]) -> Vec<Rational> {
    rows.iter()
        .map(|r| r.iter().zip(v).map(|(a, b)| a * b).sum())
        .collect()
}

/// A sparse integer row: column to nonzero entry.
pub type SparseRow = BTreeMap<usize, BigInt>;

/// Converts a sparse rational row into a primitive integer row.
pub fn sparse_integer_row(row: &BTreeMap<usize, Rational>) -> SparseRow {
    let mut l = BigInt::one();
    for r in row.values() {
        l = l.lcm(r.denom());
    }
    let mut out: SparseRow = row
        .iter()
        .filter(|(_, r)| !r.is_zero())
        .map(|(&c, r)| (c, (r * &l).to_integer()))
        .collect();
    normalize_sparse(&mut out);
    out
}

fn normalize_sparse(row: &mut SparseRow) {
    let g = row.values().fold(BigInt::zero(), |g, x| g.gcd(x));
    if !g.is_zero() && !g.is_one() {
        for x in row.values_mut() {
            *x /= &g;
        }
    }
    if let Some((_, lead)) = row.iter().next() {
        if lead.is_negative() {
            for x in row.values_mut() {
                *x = -x.clone();
            }
        }
    }
}

/// Incremental sparse echelon form. Rows are inserted one at a time and
/// reduced against the stored rows; each stored row has a distinct leading
/// column.
#[derive(Clone, Debug)]
pub struct SparseEchelon {
    ncols: usize,
    rows: BTreeMap<usize, SparseRow>,
}

impl SparseEchelon {
    pub fn new(ncols: usize) -> SparseEchelon {
        SparseEchelon { ncols, rows: BTreeMap::new() }
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn is_full(&self) -> bool {
        self.rows.len() == self.ncols
    }

    /// Reduces `row` against the stored rows. The result is zero or has a
    /// leading column not yet used.
    pub fn reduce(&self, mut row: SparseRow) -> SparseRow {
        row.retain(|_, v| !v.is_zero());
        loop {
            let Some((&lead, _)) = row.iter().next() else {
                return row;
            };
            let Some(piv) = self.rows.get(&lead) else {
                return row;
            };
            let a = row[&lead].clone();
            let b = piv[&lead].clone();
            let g = a.gcd(&b);
            let (fa, fb) = (&b / &g, &a / &g);
            // row <- fa*row - fb*piv, which cancels the leading entry.
            let mut next = SparseRow::new();
            let mut it_r = row.into_iter().peekable();
            let mut it_p = piv.iter().peekable();
            loop {
                match (it_r.peek(), it_p.peek()) {
                    (None, None) => break,
                    (Some((cr, _)), Some((cp, _))) if cr == *cp => {
                        let (c, v) = it_r.next().unwrap();
                        let (_, w) = it_p.next().unwrap();
                        let x = &fa * v - &fb * w;
                        if !x.is_zero() {
                            next.insert(c, x);
                        }
                    }
                    (Some((cr, _)), Some((cp, _))) if cr < *cp => {
                        let (c, v) = it_r.next().unwrap();
                        next.insert(c, &fa * v);
                    }
                    (Some(_), None) => {
                        let (c, v) = it_r.next().unwrap();
                        next.insert(c, &fa * v);
                    }
                    _ => {
                        let (c, w) = it_p.next().unwrap();
                        next.insert(*c, -(&fb * w));
                    }
                }
            }
            normalize_sparse(&mut next);
            row = next;
        }
    }

    /// Inserts a row; returns true if it increased the rank.
    pub fn insert(&mut self, row: SparseRow) -> bool {
        let r = self.reduce(row);
        match r.iter().next() {
            None => false,
            Some((&lead, _)) => {
                self.rows.insert(lead, r);
                true
            }
        }
    }

    pub fn insert_rational(&mut self, row: &BTreeMap<usize, Rational>) -> bool {
        self.insert(sparse_integer_row(row))
    }

    pub fn pivot_columns(&self) -> Vec<usize> {
        self.rows.keys().copied().collect()
    }

    /// Kernel basis, one vector per free column (1 there, 0 on the other free
    /// columns), computed by back substitution in a single pass.
    pub fn kernel(&self) -> Vec<Vec<Rational>> {
        let free: Vec<usize> = (0..self.ncols).filter(|c| !self.rows.contains_key(c)).collect();
        let free_pos: BTreeMap<usize, usize> =
            free.iter().enumerate().map(|(i, &c)| (c, i)).collect();
        // Each variable as a sparse combination of the free variables.
        let mut expr: BTreeMap<usize, BTreeMap<usize, Rational>> = BTreeMap::new();
        for (&f, &i) in &free_pos {
            expr.insert(f, BTreeMap::from([(i, Rational::one())]));
        }
        for (&lead, row) in self.rows.iter().rev() {
            let a = Rational::from_integer(row[&lead].clone());
            let mut acc: BTreeMap<usize, Rational> = BTreeMap::new();
            for (&c, v) in row.iter().skip(1) {
                let coef = Rational::from_integer(v.clone()) / &a;
                if let Some(e) = expr.get(&c) {
                    for (&fi, x) in e {
                        *acc.entry(fi).or_insert_with(Rational::zero) -= &coef * x;
                    }
                }
            }
            acc.retain(|_, x| !x.is_zero());
            expr.insert(lead, acc);
        }
        let mut basis = vec![vec![Rational::zero(); self.ncols]; free.len()];
        for (var, e) in expr {
            for (fi, x) in e {
                basis[fi][var] = x;
            }
        }
        basis
    }
}

/// Kernel of the linear map whose columns are given sparsely, as
/// `(equation key, coefficient)` lists. Equations are grouped by key and
/// inserted in key order, so the result is deterministic.
pub fn kernel_of_columns<K: Ord + Clone>(columns: &[Vec<(K, Rational)>]) -> Vec<Vec<Rational>> {
    let mut rows: BTreeMap<K, BTreeMap<usize, Rational>> = BTreeMap::new();
    for (j, col) in columns.iter().enumerate() {
        for (key, c) in col {
            if c.is_zero() {
                continue;
            }
            *rows
                .entry(key.clone())
                .or_default()
                .entry(j)
                .or_insert_with(Rational::zero) += c;
        }
    }
    let mut ech = SparseEchelon::new(columns.len());
    for row in rows.values() {
        if ech.is_full() {
            break;
        }
        ech.insert_rational(row);
    }
    ech.kernel()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::rational::{int, rat};

    fn m(rows: &[&[i64]]) -> Vec<Vec<Rational>> {
        rows.iter().map(|r| r.iter().map(|&x| int(x)).collect()).collect()
    }

    #[test]
    fn nullspace_examples() {
        let k = exact_nullspace(&m(&[&[1, 2], &[2, 4]]), 2);
        assert_eq!(k, vec![vec![int(-2), int(1)]]);
        assert!(exact_nullspace(&m(&[&[1, 0, 0], &[0, 1, 0], &[0, 0, 1]]), 3).is_empty());
        assert_eq!(exact_nullspace(&m(&[&[0, 0, 0], &[0, 0, 0]]), 3).len(), 3);
        assert_eq!(exact_nullspace(&[], 4).len(), 4);
    }

    #[test]
    fn nullspace_with_skipped_columns() {
        let a = m(&[&[0, 2, 4, 1], &[0, 1, 2, 3], &[0, 3, 6, 4]]);
        let k = exact_nullspace(&a, 4);
        assert_eq!(k.len(), 2);
        for v in &k {
            assert!(mat_vec(&a, v).iter().all(|x| x.is_zero()));
        }
        assert_eq!(rank(&a, 4), 2);
    }

    #[test]
    fn solve_and_span() {
        let a = vec![vec![rat(1, 2), int(1)], vec![int(1), int(-1)]];
        let x = solve(&a, &[int(2), int(1)], 2).unwrap();
        assert_eq!(x, vec![int(2), int(1)]);
        let inconsistent = m(&[&[1, 1], &[2, 2]]);
        assert!(solve(&inconsistent, &[int(1), int(3)], 2).is_none());
        let span = vec![vec![int(1), int(0), int(1)], vec![int(0), int(1), int(1)]];
        assert_eq!(
            express_in_span(&span, &[int(2), int(3), int(5)]),
            Some(vec![int(2), int(3)])
        );
        assert!(express_in_span(&span, &[int(1), int(1), int(1)]).is_none());
    }

    #[test]
    fn sparse_matches_dense() {
        let a = m(&[&[0, 2, 4, 1, 0], &[1, 1, 2, 3, 0], &[1, 3, 6, 4, 0], &[2, 0, 0, 1, 5]]);
        let mut s = SparseEchelon::new(5);
        for r in &a {
            let row: BTreeMap<usize, Rational> = r.iter().cloned().enumerate().collect();
            s.insert_rational(&row);
        }
        assert_eq!(s.rank(), rank(&a, 5));
        let k = s.kernel();
        assert_eq!(k.len(), exact_nullspace(&a, 5).len());
        for v in &k {
            assert!(mat_vec(&a, v).iter().all(|x| x.is_zero()));
        }
    }
}
