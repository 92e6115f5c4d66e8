//! Finite-dimensional unital algebras given by structure constants.

use rand::Rng;
use thiserror::Error;

use crate::linalg::{self, Matrix};
use crate::scalar::Field;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AlgebraError {
    #[error("element is not invertible")]
    NotInvertible,
    #[error("element is not nilpotent")]
    NotNilpotent,
    #[error("{0} needs division by integers that vanish in characteristic {1}")]
    Characteristic(&'static str, u64),
    #[error("malformed structure constants: {0}")]
    Malformed(String),
}

/// Basis `e_0, ..., e_{d-1}` with `e_i e_j = sum_k table[i][j][k] e_k`.
#[derive(Clone, Debug)]
pub struct FiniteAlgebra<F: Field> {
    field: F,
    dim: usize,
    table: Vec<Vec<Vec<F::Elem>>>,
    unit: Vec<F::Elem>,
}

impl<F: Field> FiniteAlgebra<F> {
    pub fn new(field: F, table: Vec<Vec<Vec<F::Elem>>>, unit: Vec<F::Elem>) -> Result<Self, AlgebraError> {
        let dim = unit.len();
        let shaped = table.len() == dim
            && table.iter().all(|row| row.len() == dim && row.iter().all(|v| v.len() == dim));
        if !shaped {
            return Err(AlgebraError::Malformed(format!("expected a {dim}x{dim}x{dim} table")));
        }
        let alg = FiniteAlgebra { field, dim, table, unit };
        for i in 0..dim {
            let e = alg.basis(i);
            if !alg.equal(&alg.mul(&alg.unit, &e), &e) || !alg.equal(&alg.mul(&e, &alg.unit), &e) {
                return Err(AlgebraError::Malformed("unit is not a two-sided identity".into()));
            }
        }
        Ok(alg)
    }

    pub fn field(&self) -> &F {
        &self.field
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn unit(&self) -> Vec<F::Elem> {
        self.unit.clone()
    }

    pub fn zero(&self) -> Vec<F::Elem> {
        vec![self.field.zero(); self.dim]
    }

    pub fn basis(&self, i: usize) -> Vec<F::Elem> {
        let mut v = self.zero();
        v[i] = self.field.one();
        v
    }

    pub fn from_scalar(&self, c: &F::Elem) -> Vec<F::Elem> {
        self.scale(&self.unit, c)
    }

    pub fn add(&self, a: &[F::Elem], b: &[F::Elem]) -> Vec<F::Elem> {
        a.iter().zip(b).map(|(x, y)| self.field.add(x, y)).collect()
    }

    pub fn sub(&self, a: &[F::Elem], b: &[F::Elem]) -> Vec<F::Elem> {
        a.iter().zip(b).map(|(x, y)| self.field.sub(x, y)).collect()
    }

    pub fn neg(&self, a: &[F::Elem]) -> Vec<F::Elem> {
        a.iter().map(|x| self.field.neg(x)).collect()
    }

    pub fn scale(&self, a: &[F::Elem], c: &F::Elem) -> Vec<F::Elem> {
        a.iter().map(|x| self.field.mul(x, c)).collect()
    }

    pub fn mul(&self, a: &[F::Elem], b: &[F::Elem]) -> Vec<F::Elem> {
        let f = &self.field;
        let mut out = self.zero();
        for (i, x) in a.iter().enumerate() {
            if f.is_zero(x) {
                continue;
            }
            for (j, y) in b.iter().enumerate() {
                if f.is_zero(y) {
                    continue;
                }
                let xy = f.mul(x, y);
                for (k, slot) in out.iter_mut().enumerate() {
                    let c = &self.table[i][j][k];
                    if !f.is_zero(c) {
                        *slot = f.add(slot, &f.mul(&xy, c));
                    }
                }
            }
        }
        out
    }

    pub fn is_zero(&self, a: &[F::Elem]) -> bool {
        a.iter().all(|x| self.field.is_zero(x))
    }

    pub fn equal(&self, a: &[F::Elem], b: &[F::Elem]) -> bool {
        self.is_zero(&self.sub(a, b))
    }

    pub fn pow_u(&self, a: &[F::Elem], e: u64) -> Vec<F::Elem> {
        (0..e).fold(self.unit(), |acc, _| self.mul(&acc, a))
    }

    /// Matrix of `x -> a x`.
    pub fn left_matrix(&self, a: &[F::Elem]) -> Matrix<F::Elem> {
        let columns: Vec<Vec<F::Elem>> = (0..self.dim).map(|j| self.mul(a, &self.basis(j))).collect();
        Matrix::from_columns(self.dim, &columns, self.field.zero())
    }

    pub fn inverse(&self, a: &[F::Elem]) -> Result<Vec<F::Elem>, AlgebraError> {
        let x = linalg::solve(&self.field, &self.left_matrix(a), &self.unit).ok_or(AlgebraError::NotInvertible)?;
        if self.equal(&self.mul(&x, a), &self.unit) {
            Ok(x)
        } else {
            Err(AlgebraError::NotInvertible)
        }
    }

    pub fn pow(&self, a: &[F::Elem], e: i64) -> Result<Vec<F::Elem>, AlgebraError> {
        let base = if e < 0 { self.inverse(a)? } else { a.to_vec() };
        Ok(self.pow_u(&base, e.unsigned_abs()))
    }

    /// Smallest `k` with `a^k = 0`, if any.
    pub fn nilpotency_index(&self, a: &[F::Elem]) -> Option<usize> {
        let mut p = self.unit();
        for k in 0..=self.dim {
            if self.is_zero(&p) {
                return Some(k);
            }
            p = self.mul(&p, a);
        }
        None
    }

    pub fn is_nilpotent(&self, a: &[F::Elem]) -> bool {
        self.nilpotency_index(a).is_some()
    }

    fn integer_inverse(&self, k: i64, what: &'static str) -> Result<F::Elem, AlgebraError> {
        self.field
            .inv(&self.field.from_int(k))
            .ok_or(AlgebraError::Characteristic(what, self.field.characteristic()))
    }

    /// `sum_k a^k / k!` for nilpotent `a`.
    pub fn exp_nilpotent(&self, a: &[F::Elem]) -> Result<Vec<F::Elem>, AlgebraError> {
        let index = self.nilpotency_index(a).ok_or(AlgebraError::NotNilpotent)?;
        let mut term = self.unit();
        let mut sum = self.unit();
        for k in 1..index as i64 {
            term = self.scale(&self.mul(&term, a), &self.integer_inverse(k, "exp")?);
            sum = self.add(&sum, &term);
        }
        Ok(sum)
    }

    /// `log(1 + a) = a - a^2/2 + a^3/3 - ...` for nilpotent `a`.
    pub fn log_one_plus(&self, a: &[F::Elem]) -> Result<Vec<F::Elem>, AlgebraError> {
        let index = self.nilpotency_index(a).ok_or(AlgebraError::NotNilpotent)?;
        let mut power = self.unit();
        let mut sum = self.zero();
        for k in 1..index as i64 {
            power = self.mul(&power, a);
            let c = self.integer_inverse(k, "log")?;
            let c = if k % 2 == 0 { self.field.neg(&c) } else { c };
            sum = self.add(&sum, &self.scale(&power, &c));
        }
        Ok(sum)
    }

    pub fn is_commutative(&self) -> bool {
        (0..self.dim).all(|i| (0..self.dim).all(|j| self.equal(&self.table[i][j], &self.table[j][i])))
    }

    pub fn is_associative(&self) -> bool {
        (0..self.dim).all(|i| {
            (0..self.dim).all(|j| {
                (0..self.dim).all(|k| {
                    let (a, b, c) = (self.basis(i), self.basis(j), self.basis(k));
                    self.equal(&self.mul(&self.mul(&a, &b), &c), &self.mul(&a, &self.mul(&b, &c)))
                })
            })
        })
    }

    pub fn format(&self, a: &[F::Elem]) -> String {
        let parts: Vec<String> = a
            .iter()
            .enumerate()
            .filter(|(_, c)| !self.field.is_zero(c))
            .map(|(i, c)| format!("({})e{i}", self.field.format(c)))
            .collect();
        if parts.is_empty() {
            "0".into()
        } else {
            parts.join(" + ")
        }
    }
}

/// Algebras spanned by monomials `x^a` in a few variables modulo a monomial
/// ideal, given by the list of standard exponent vectors (closed under
/// division). Products of standard monomials that leave the list vanish.
pub fn monomial_algebra<F: Field>(field: F, standard: &[Vec<u32>]) -> FiniteAlgebra<F> {
    let dim = standard.len();
    let mut table = vec![vec![vec![field.zero(); dim]; dim]; dim];
    for (i, a) in standard.iter().enumerate() {
        for (j, b) in standard.iter().enumerate() {
            let prod: Vec<u32> = a.iter().zip(b).map(|(x, y)| x + y).collect();
            if let Some(k) = standard.iter().position(|m| *m == prod) {
                table[i][j][k] = field.one();
            }
        }
    }
    let unit_index = standard.iter().position(|m| m.iter().all(|&e| e == 0)).expect("1 is standard");
    let mut unit = vec![field.zero(); dim];
    unit[unit_index] = field.one();
    FiniteAlgebra::new(field, table, unit).expect("monomial algebras are unital")
}

/// Local commutative algebras `F + N` of dimension at most 4 whose maximal
/// ideal satisfies `N^3 = 0`.
pub fn local_families<F: Field>(field: &F) -> Vec<(&'static str, FiniteAlgebra<F>)> {
    let m = |s: &[&[u32]]| s.iter().map(|v| v.to_vec()).collect::<Vec<_>>();
    vec![
        ("F", monomial_algebra(field.clone(), &m(&[&[0]]))),
        ("F[e]/e^2", monomial_algebra(field.clone(), &m(&[&[0], &[1]]))),
        ("F[e]/e^3", monomial_algebra(field.clone(), &m(&[&[0], &[1], &[2]]))),
        ("F[a,b]/(a,b)^2", monomial_algebra(field.clone(), &m(&[&[0, 0], &[1, 0], &[0, 1]]))),
        ("F[a,b]/(a^2,b^2)", monomial_algebra(field.clone(), &m(&[&[0, 0], &[1, 0], &[0, 1], &[1, 1]]))),
        ("F[a,b]/(a^2,ab,b^3)", monomial_algebra(field.clone(), &m(&[&[0, 0], &[1, 0], &[0, 1], &[0, 2]]))),
        (
            "F[a,b,c]/(a,b,c)^2",
            monomial_algebra(field.clone(), &m(&[&[0, 0, 0], &[1, 0, 0], &[0, 1, 0], &[0, 0, 1]])),
        ),
    ]
}

/// A random element of the span of the non-unit basis vectors; in the
/// monomial algebras above this is the maximal ideal, so the result is
/// nilpotent.
pub fn random_nilpotent<F: Field, R: Rng>(
    alg: &FiniteAlgebra<F>,
    rng: &mut R,
    sample: impl Fn(&mut R) -> F::Elem,
) -> Vec<F::Elem> {
    let unit_index = alg.unit().iter().position(|c| !alg.field().is_zero(c)).unwrap_or(0);
    (0..alg.dim())
        .map(|i| if i == unit_index { alg.field().zero() } else { sample(rng) })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::ScalarField;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn exp_log_on_truncated_polynomials() {
        let q = ScalarField::Rational;
        let alg = monomial_algebra(q.clone(), &[vec![0], vec![1], vec![2]]);
        let eps = alg.basis(1);
        let theta = alg.log_one_plus(&eps).unwrap();
        // log(1 + e) = e - e^2/2
        let half = q.inv(&q.from_int(2)).unwrap();
        let expected = alg.sub(&eps, &alg.scale(&alg.basis(2), &half));
        assert!(alg.equal(&theta, &expected));
        assert!(alg.equal(&alg.exp_nilpotent(&theta).unwrap(), &alg.add(&alg.unit(), &eps)));
    }

    #[test]
    fn characteristic_guard() {
        let f = ScalarField::Prime(2);
        let alg = monomial_algebra(f, &[vec![0], vec![1], vec![2]]);
        assert!(matches!(alg.log_one_plus(&alg.basis(1)), Err(AlgebraError::Characteristic(..))));
        // With square-zero elements the series stops before any division by 2.
        let alg2 = monomial_algebra(ScalarField::Prime(2), &[vec![0], vec![1]]);
        assert!(alg2.log_one_plus(&alg2.basis(1)).is_ok());
    }

    #[test]
    fn families_are_local() {
        let f = ScalarField::Prime(3);
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for (name, alg) in local_families(&f) {
            assert!(alg.is_associative() && alg.is_commutative(), "{name}");
            let n = random_nilpotent(&alg, &mut rng, |r| f.from_int(r.gen_range(0..3)));
            assert!(alg.nilpotency_index(&n).unwrap() <= 3, "{name}");
            let u = alg.add(&alg.unit(), &n);
            let inv = alg.inverse(&u).unwrap();
            assert!(alg.equal(&alg.mul(&u, &inv), &alg.unit()));
        }
    }
}
