//! Dense matrices over a [`Field`]: elimination, kernels, characteristic
//! polynomials and subspace intersection.

use crate::scalar::Field;

#[derive(Clone, Debug, PartialEq)]
pub struct Matrix<E> {
    rows: usize,
    cols: usize,
    data: Vec<E>,
}

impl<E: Clone> Matrix<E> {
    pub fn filled(rows: usize, cols: usize, value: E) -> Self {
        Matrix { rows, cols, data: vec![value; rows * cols] }
    }

    pub fn from_rows(rows: Vec<Vec<E>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        Matrix { rows: r, cols: c, data: rows.into_iter().flatten().collect() }
    }

    /// Builds a matrix whose columns are the given vectors.
    pub fn from_columns(rows: usize, columns: &[Vec<E>], fill: E) -> Self {
        let mut m = Matrix::filled(rows, columns.len(), fill);
        for (j, col) in columns.iter().enumerate() {
            assert_eq!(col.len(), rows);
            for (i, x) in col.iter().enumerate() {
                m[(i, j)] = x.clone();
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[E] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<E> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut data = Vec::with_capacity(self.data.len());
        for j in 0..self.cols {
            for i in 0..self.rows {
                data.push(self[(i, j)].clone());
            }
        }
        Matrix { rows: self.cols, cols: self.rows, data }
    }

    /// The square block on the given row/column indices.
    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> Self {
        let data = rows
            .iter()
            .flat_map(|&i| cols.iter().map(move |&j| (i, j)))
            .map(|ix| self[ix].clone())
            .collect();
        Matrix { rows: rows.len(), cols: cols.len(), data }
    }
}

impl<E> std::ops::Index<(usize, usize)> for Matrix<E> {
    type Output = E;
    fn index(&self, (i, j): (usize, usize)) -> &E {
        &self.data[i * self.cols + j]
    }
}

impl<E> std::ops::IndexMut<(usize, usize)> for Matrix<E> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut E {
        &mut self.data[i * self.cols + j]
    }
}

pub fn zeros<F: Field>(field: &F, rows: usize, cols: usize) -> Matrix<F::Elem> {
    Matrix::filled(rows, cols, field.zero())
}

pub fn identity<F: Field>(field: &F, n: usize) -> Matrix<F::Elem> {
    let mut m = zeros(field, n, n);
    for i in 0..n {
        m[(i, i)] = field.one();
    }
    m
}

pub fn mul<F: Field>(field: &F, a: &Matrix<F::Elem>, b: &Matrix<F::Elem>) -> Matrix<F::Elem> {
    assert_eq!(a.cols, b.rows, "shape mismatch in matrix product");
    let mut out = zeros(field, a.rows, b.cols);
    for i in 0..a.rows {
        for k in 0..a.cols {
            let x = &a[(i, k)];
            if field.is_zero(x) {
                continue;
            }
            for j in 0..b.cols {
                out[(i, j)] = field.add(&out[(i, j)], &field.mul(x, &b[(k, j)]));
            }
        }
    }
    out
}

pub fn mul_vec<F: Field>(field: &F, a: &Matrix<F::Elem>, v: &[F::Elem]) -> Vec<F::Elem> {
    assert_eq!(a.cols, v.len());
    (0..a.rows)
        .map(|i| {
            a.row(i)
                .iter()
                .zip(v)
                .fold(field.zero(), |acc, (x, y)| field.add(&acc, &field.mul(x, y)))
        })
        .collect()
}

fn zip_with<F: Field>(
    a: &Matrix<F::Elem>,
    b: &Matrix<F::Elem>,
    f: impl Fn(&F::Elem, &F::Elem) -> F::Elem,
) -> Matrix<F::Elem> {
    assert!(a.rows == b.rows && a.cols == b.cols, "shape mismatch");
    Matrix {
        rows: a.rows,
        cols: a.cols,
        data: a.data.iter().zip(&b.data).map(|(x, y)| f(x, y)).collect(),
    }
}

pub fn add<F: Field>(field: &F, a: &Matrix<F::Elem>, b: &Matrix<F::Elem>) -> Matrix<F::Elem> {
    zip_with::<F>(a, b, |x, y| field.add(x, y))
}

pub fn sub<F: Field>(field: &F, a: &Matrix<F::Elem>, b: &Matrix<F::Elem>) -> Matrix<F::Elem> {
    zip_with::<F>(a, b, |x, y| field.sub(x, y))
}

pub fn scale<F: Field>(field: &F, a: &Matrix<F::Elem>, c: &F::Elem) -> Matrix<F::Elem> {
    Matrix {
        rows: a.rows,
        cols: a.cols,
        data: a.data.iter().map(|x| field.mul(x, c)).collect(),
    }
}

/// `a - c * I`.
pub fn shift<F: Field>(field: &F, a: &Matrix<F::Elem>, c: &F::Elem) -> Matrix<F::Elem> {
    let mut out = a.clone();
    for i in 0..a.rows.min(a.cols) {
        out[(i, i)] = field.sub(&out[(i, i)], c);
    }
    out
}

pub fn pow<F: Field>(field: &F, a: &Matrix<F::Elem>, mut e: u32) -> Matrix<F::Elem> {
    let mut acc = identity(field, a.rows);
    let mut sq = a.clone();
    while e > 0 {
        if e & 1 == 1 {
            acc = mul(field, &acc, &sq);
        }
        e >>= 1;
        if e > 0 {
            sq = mul(field, &sq, &sq);
        }
    }
    acc
}

pub fn is_zero<F: Field>(field: &F, a: &Matrix<F::Elem>) -> bool {
    a.data.iter().all(|x| field.is_zero(x))
}

pub fn equal<F: Field>(field: &F, a: &Matrix<F::Elem>, b: &Matrix<F::Elem>) -> bool {
    a.rows == b.rows && a.cols == b.cols && is_zero(field, &sub(field, a, b))
}

/// Reduced row echelon form and the pivot columns.
pub fn rref<F: Field>(field: &F, a: &Matrix<F::Elem>) -> (Matrix<F::Elem>, Vec<usize>) {
    let mut m = a.clone();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..m.cols {
        if r == m.rows {
            break;
        }
        let mut best: Option<usize> = None;
        for i in r..m.rows {
            if field.is_zero(&m[(i, c)]) {
                continue;
            }
            match best {
                None => best = Some(i),
                Some(b) if field.better_pivot(&m[(i, c)], &m[(b, c)]) => best = Some(i),
                _ => {}
            }
        }
        let Some(p) = best else { continue };
        for j in 0..m.cols {
            m.data.swap(p * m.cols + j, r * m.cols + j);
        }
        let inv = field.inv(&m[(r, c)]).expect("pivot is nonzero");
        for j in 0..m.cols {
            m[(r, j)] = field.mul(&m[(r, j)], &inv);
        }
        m[(r, c)] = field.one();
        for i in 0..m.rows {
            if i == r || field.is_zero(&m[(i, c)]) {
                continue;
            }
            let factor = m[(i, c)].clone();
            for j in 0..m.cols {
                let v = field.sub(&m[(i, j)], &field.mul(&factor, &m[(r, j)]));
                m[(i, j)] = v;
            }
            m[(i, c)] = field.zero();
        }
        pivots.push(c);
        r += 1;
    }
    (m, pivots)
}

pub fn rank<F: Field>(field: &F, a: &Matrix<F::Elem>) -> usize {
    rref(field, a).1.len()
}

/// A basis of `{x : a x = 0}`.
pub fn kernel<F: Field>(field: &F, a: &Matrix<F::Elem>) -> Vec<Vec<F::Elem>> {
    let (m, pivots) = rref(field, a);
    let mut basis = Vec::new();
    for free in (0..a.cols).filter(|c| !pivots.contains(c)) {
        let mut v = vec![field.zero(); a.cols];
        v[free] = field.one();
        for (row, &pc) in pivots.iter().enumerate() {
            v[pc] = field.neg(&m[(row, free)]);
        }
        basis.push(v);
    }
    basis
}

/// Some solution of `a x = b`, if one exists.
pub fn solve<F: Field>(field: &F, a: &Matrix<F::Elem>, b: &[F::Elem]) -> Option<Vec<F::Elem>> {
    assert_eq!(a.rows, b.len());
    let mut aug = zeros(field, a.rows, a.cols + 1);
    for i in 0..a.rows {
        for j in 0..a.cols {
            aug[(i, j)] = a[(i, j)].clone();
        }
        aug[(i, a.cols)] = b[i].clone();
    }
    let (m, pivots) = rref(field, &aug);
    if pivots.contains(&a.cols) {
        return None;
    }
    let mut x = vec![field.zero(); a.cols];
    for (row, &pc) in pivots.iter().enumerate() {
        x[pc] = m[(row, a.cols)].clone();
    }
    Some(x)
}

pub fn inverse<F: Field>(field: &F, a: &Matrix<F::Elem>) -> Option<Matrix<F::Elem>> {
    assert_eq!(a.rows, a.cols);
    let n = a.rows;
    let mut aug = zeros(field, n, 2 * n);
    for i in 0..n {
        for j in 0..n {
            aug[(i, j)] = a[(i, j)].clone();
        }
        aug[(i, n + i)] = field.one();
    }
    let (m, pivots) = rref(field, &aug);
    if pivots.len() < n || pivots[n - 1] != n - 1 {
        return None;
    }
    let cols: Vec<usize> = (n..2 * n).collect();
    let rows: Vec<usize> = (0..n).collect();
    Some(m.submatrix(&rows, &cols))
}

/// `det(x I - a)`, constant term first, by the division-free Berkowitz algorithm.
pub fn charpoly<F: Field>(field: &F, a: &Matrix<F::Elem>) -> Vec<F::Elem> {
    assert_eq!(a.rows, a.cols);
    let n = a.rows;
    if n == 0 {
        return vec![field.one()];
    }
    // Coefficients from the leading one downwards.
    let mut v = vec![field.one(), field.neg(&a[(n - 1, n - 1)])];
    for r in (0..n - 1).rev() {
        let rest: Vec<usize> = (r + 1..n).collect();
        let m = rest.len();
        let block = a.submatrix(&rest, &rest);
        let row: Vec<F::Elem> = rest.iter().map(|&j| a[(r, j)].clone()).collect();
        let mut col: Vec<F::Elem> = rest.iter().map(|&i| a[(i, r)].clone()).collect();
        let mut toeplitz = vec![field.one(), field.neg(&a[(r, r)])];
        for _ in 0..m {
            let dot = row
                .iter()
                .zip(&col)
                .fold(field.zero(), |acc, (x, y)| field.add(&acc, &field.mul(x, y)));
            toeplitz.push(field.neg(&dot));
            col = mul_vec(field, &block, &col);
        }
        let mut next = vec![field.zero(); m + 2];
        for (i, slot) in next.iter_mut().enumerate() {
            for (j, vj) in v.iter().enumerate() {
                if i >= j {
                    *slot = field.add(slot, &field.mul(&toeplitz[i - j], vj));
                }
            }
        }
        v = next;
    }
    v.reverse();
    v
}

/// Basis of the span of the given vectors (a maximal independent subset).
pub fn independent_subset<F: Field>(field: &F, dim: usize, vectors: &[Vec<F::Elem>]) -> Vec<Vec<F::Elem>> {
    if vectors.is_empty() {
        return Vec::new();
    }
    let m = Matrix::from_columns(dim, vectors, field.zero());
    let (_, pivots) = rref(field, &m);
    pivots.into_iter().map(|j| vectors[j].clone()).collect()
}

/// Basis of `span(u) ∩ span(v)`; both inputs must be linearly independent.
pub fn intersect<F: Field>(
    field: &F,
    dim: usize,
    u: &[Vec<F::Elem>],
    v: &[Vec<F::Elem>],
) -> Vec<Vec<F::Elem>> {
    if u.is_empty() || v.is_empty() {
        return Vec::new();
    }
    let mut columns: Vec<Vec<F::Elem>> = u.to_vec();
    columns.extend(v.iter().map(|x| x.iter().map(|c| field.neg(c)).collect()));
    let m = Matrix::from_columns(dim, &columns, field.zero());
    let combos = kernel(field, &m);
    let vectors: Vec<Vec<F::Elem>> = combos
        .iter()
        .map(|k| {
            (0..dim)
                .map(|i| {
                    u.iter()
                        .zip(k)
                        .fold(field.zero(), |acc, (ui, ki)| field.add(&acc, &field.mul(&ui[i], ki)))
                })
                .collect()
        })
        .collect();
    independent_subset(field, dim, &vectors)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{Rat, Scalar, ScalarField};
    use crate::upoly;

    fn int_matrix(f: &ScalarField, rows: &[&[i64]]) -> Matrix<Scalar> {
        Matrix::from_rows(rows.iter().map(|r| r.iter().map(|&x| f.from_int(x)).collect()).collect())
    }

    #[test]
    fn charpoly_matches_cayley_hamilton() {
        let q = ScalarField::Rational;
        let a = int_matrix(&q, &[&[2, 1, 0], &[-1, 3, 4], &[5, 0, 1]]);
        let p = charpoly(&q, &a);
        assert_eq!(p.len(), 4);
        assert!(q.is_one(&p[3]));
        // evaluate p(a) with Horner's rule
        let mut acc = zeros(&q, 3, 3);
        for c in p.iter().rev() {
            acc = add(&q, &mul(&q, &acc, &a), &scale(&q, &identity(&q, 3), c));
        }
        assert!(is_zero(&q, &acc));
    }

    #[test]
    fn charpoly_two_by_two() {
        let f = ScalarField::Prime(7);
        let a = int_matrix(&f, &[&[1, 2], &[3, 4]]);
        // x^2 - 5x - 2
        assert_eq!(charpoly(&f, &a), vec![f.from_int(-2), f.from_int(-5), f.one()]);
    }

    #[test]
    fn kernel_and_rank() {
        let q = ScalarField::Rational;
        let a = int_matrix(&q, &[&[1, 2, 3], &[2, 4, 6]]);
        assert_eq!(rank(&q, &a), 1);
        let k = kernel(&q, &a);
        assert_eq!(k.len(), 2);
        for v in k {
            assert!(mul_vec(&q, &a, &v).iter().all(|x| q.is_zero(x)));
        }
    }

    #[test]
    fn inverse_and_solve() {
        let f = ScalarField::Prime(5);
        let a = int_matrix(&f, &[&[1, 2], &[3, 4]]);
        let inv = inverse(&f, &a).unwrap();
        assert!(equal(&f, &mul(&f, &a, &inv), &identity(&f, 2)));
        let x = solve(&f, &a, &[f.from_int(1), f.from_int(0)]).unwrap();
        assert_eq!(mul_vec(&f, &a, &x), vec![f.from_int(1), f.from_int(0)]);
        assert!(inverse(&f, &int_matrix(&f, &[&[1, 2], &[2, 4]])).is_none());
    }

    #[test]
    fn intersection_of_planes() {
        let q = ScalarField::Rational;
        let ints = |v: &[i64]| v.iter().map(|&x| q.from_int(x)).collect::<Vec<_>>();
        let u = vec![ints(&[1, 0, 0]), ints(&[0, 1, 0])];
        let v = vec![ints(&[0, 1, 0]), ints(&[0, 0, 1])];
        let w = intersect(&q, 3, &u, &v);
        assert_eq!(w.len(), 1);
        assert!(q.is_zero(&w[0][0]) && q.is_zero(&w[0][2]));
    }

    #[test]
    fn novikov_charpoly() {
        use crate::scalar::NovikovField;
        let field = NovikovField::new(ScalarField::Rational, Rat::from_integer(5));
        let t = field.t_power(Rat::from_integer(1));
        let a = Matrix::from_rows(vec![vec![field.zero(), t.clone()], vec![field.one(), field.zero()]]);
        let p = charpoly(&field, &a);
        assert_eq!(p, vec![field.neg(&t), field.zero(), field.one()]);
        let roots = field.split_roots(&p).unwrap();
        assert_eq!(roots.len(), 2);
        for (r, _) in roots {
            assert!(field.is_zero(&upoly::eval(&field, &p, &r)));
        }
    }
}
