//! Simultaneous generalised eigenspaces of the multiplication operators and
//! the data attached to each summand.

use super::{JacobianError, QuotientAlgebra};
use crate::algebra::FiniteAlgebra;
use crate::groupring::{self, Laurent};
use crate::linalg::{self, Matrix};
use crate::scalar::{Field, Rat, ScalarError};

/// One generalised eigensummand `Q` of `A/I`.
#[derive(Clone, Debug)]
pub struct Summand<F: Field> {
    /// `lambda_Q(gamma_i)`.
    pub eigenvalues: Vec<F::Elem>,
    /// `val_Q(gamma_i) = val(lambda_Q(gamma_i))`.
    pub valuation: Vec<Rat>,
    /// `xi_Q(gamma_i) = lambda_Q(gamma_i) / T^{val_Q(gamma_i)}`.
    pub xi: Vec<F::Elem>,
    /// Vectors of `A/I` spanning `Q`; the first is the idempotent `e_Q`.
    pub basis: Vec<Vec<F::Elem>>,
    pub idempotent: Vec<F::Elem>,
    /// `Q` as an algebra with unit `e_Q`, in the coordinates of `basis`.
    pub algebra: FiniteAlgebra<F>,
    /// `rho(gamma_i) = pi_Q([y_i]) T^{-val_Q(gamma_i)}`, the action seen from the
    /// reference fibre `L_Q`.
    pub rho: Vec<Vec<F::Elem>>,
    /// `psi(gamma_i) = rho(gamma_i) / xi_Q(gamma_i) - 1`.
    pub psi: Vec<Vec<F::Elem>>,
    /// `theta = log(1 + psi)`, available in characteristic zero.
    pub theta: Option<Vec<Vec<F::Elem>>>,
    embedding: Matrix<F::Elem>,
}

impl<F: Field> Summand<F> {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn field(&self) -> &F {
        self.algebra.field()
    }

    /// Coordinates in `Q` of an element of `A/I` lying in `Q`.
    pub fn coordinates(&self, a: &[F::Elem]) -> Option<Vec<F::Elem>> {
        linalg::solve(self.field(), &self.embedding, a)
    }

    /// `pi_Q(a) = e_Q a`, in the coordinates of `Q`.
    pub fn project(&self, quotient: &QuotientAlgebra<F>, a: &[F::Elem]) -> Vec<F::Elem> {
        let ea = quotient.algebra().mul(&self.idempotent, a);
        self.coordinates(&ea).expect("e_Q (A/I) = Q")
    }

    /// The element of `A/I` with the given coordinates in `Q`.
    pub fn embed(&self, q: &[F::Elem]) -> Vec<F::Elem> {
        linalg::mul_vec(self.field(), &self.embedding, q)
    }

    /// `rho(gamma)`, extended multiplicatively.
    pub fn rho_of(&self, gamma: &[i64]) -> Vec<F::Elem> {
        gamma.iter().zip(&self.rho).fold(self.algebra.unit(), |acc, (&e, r)| {
            let p = self.algebra.pow(r, e).expect("rho takes unit values");
            self.algebra.mul(&acc, &p)
        })
    }

    /// `xi_Q(gamma)`.
    pub fn xi_of(&self, gamma: &[i64]) -> F::Elem {
        let f = self.field();
        gamma.iter().zip(&self.xi).fold(f.one(), |acc, (&e, x)| {
            f.mul(&acc, &f.pow(x, e).expect("xi takes unit values"))
        })
    }

    /// `<val_Q, gamma>`.
    pub fn valuation_of(&self, gamma: &[i64]) -> Rat {
        gamma.iter().zip(&self.valuation).map(|(&e, v)| v * e).sum()
    }

    /// `rho-hat(f) = sum a_gamma rho(gamma)`.
    pub fn rho_hat(&self, f: &Laurent<F::Elem>) -> Vec<F::Elem> {
        groupring::hat_evaluate(self.field(), f, self.dim(), |g| Some(self.rho_of(g))).expect("total")
    }

    /// `xi-hat(f) = sum a_gamma xi_Q(gamma)`.
    pub fn xi_hat(&self, f: &Laurent<F::Elem>) -> F::Elem {
        groupring::hat_evaluate_scalar(self.field(), f, |g| Some(self.xi_of(g))).expect("total")
    }

    /// Whether `(rho(gamma_i) - xi_Q(gamma_i))^{dim Q} = 0` for every `i`.
    pub fn is_generalised_eigenspace(&self) -> bool {
        let alg = &self.algebra;
        self.rho.iter().zip(&self.xi).all(|(r, l)| {
            let d = alg.sub(r, &alg.from_scalar(l));
            alg.is_zero(&alg.pow_u(&d, self.dim() as u64))
        })
    }

    /// `exp(theta(gamma_i)) = rho(gamma_i) / xi_Q(gamma_i)`, i.e. `1 + psi`.
    pub fn exp_log_holds(&self) -> Option<bool> {
        let theta = self.theta.as_ref()?;
        let alg = &self.algebra;
        Some(theta.iter().zip(&self.psi).all(|(t, p)| {
            alg.exp_nilpotent(t).is_ok_and(|e| alg.equal(&e, &alg.add(&alg.unit(), p)))
        }))
    }

    pub fn theta_or_err(&self) -> Result<&[Vec<F::Elem>], JacobianError> {
        self.theta
            .as_deref()
            .ok_or(JacobianError::NoLogarithm(self.field().characteristic()))
    }
}

/// Splits `A/I` into simultaneous generalised eigenspaces of `M_{gamma_1}, ...,
/// M_{gamma_n}`, refining one operator at a time.
pub fn decompose<F: Field>(q: &QuotientAlgebra<F>) -> Result<Vec<Summand<F>>, JacobianError> {
    let field = q.field();
    let dim = q.dim();
    let whole: Vec<Vec<F::Elem>> = (0..dim).map(|i| q.algebra().basis(i)).collect();
    let mut pieces: Vec<(Vec<F::Elem>, Vec<Vec<F::Elem>>)> = vec![(Vec::new(), whole)];
    for i in 0..q.rank() {
        let m = q.multiplication(i);
        let poly = linalg::charpoly(field, m);
        let roots = field.split_roots(&poly)?;
        let kernels: Vec<(F::Elem, Vec<Vec<F::Elem>>)> = roots
            .into_iter()
            .map(|(c, mult)| {
                let shifted = linalg::shift(field, m, &c);
                let k = linalg::kernel(field, &linalg::pow(field, &shifted, mult as u32));
                (c, k)
            })
            .collect();
        let mut refined = Vec::new();
        for (eigs, space) in &pieces {
            for (c, k) in &kernels {
                let part = linalg::intersect(field, dim, space, k);
                if !part.is_empty() {
                    let mut e = eigs.clone();
                    e.push(c.clone());
                    refined.push((e, part));
                }
            }
        }
        pieces = refined;
    }
    let total: usize = pieces.iter().map(|p| p.1.len()).sum();
    if total != dim {
        return Err(JacobianError::Inconsistent(format!(
            "eigenspaces have total dimension {total}, expected {dim}"
        )));
    }

    // Decompose the unit along the direct sum to obtain the idempotents.
    let columns: Vec<Vec<F::Elem>> = pieces.iter().flat_map(|p| p.1.iter().cloned()).collect();
    let change = Matrix::from_columns(dim, &columns, field.zero());
    let unit = q.algebra().unit();
    let split = linalg::solve(field, &change, &unit)
        .ok_or_else(|| JacobianError::Inconsistent("eigenspaces are not independent".into()))?;
    let mut offset = 0;
    let mut out = Vec::with_capacity(pieces.len());
    for (eigs, space) in pieces {
        let d = space.len();
        let mut e = vec![field.zero(); dim];
        for (k, v) in space.iter().enumerate() {
            for (slot, x) in e.iter_mut().zip(v) {
                *slot = field.add(slot, &field.mul(&split[offset + k], x));
            }
        }
        offset += d;
        out.push(summand_data(q, eigs, e, d)?);
    }
    Ok(out)
}

fn summand_data<F: Field>(
    q: &QuotientAlgebra<F>,
    eigenvalues: Vec<F::Elem>,
    idempotent: Vec<F::Elem>,
    d: usize,
) -> Result<Summand<F>, JacobianError> {
    let field = q.field();
    let a = q.algebra();
    let candidates: Vec<Vec<F::Elem>> = (0..q.dim()).map(|k| a.mul(&idempotent, &a.basis(k))).collect();
    let basis = linalg::independent_subset(field, q.dim(), &candidates);
    if basis.len() != d {
        return Err(JacobianError::Inconsistent(format!(
            "e_Q (A/I) has dimension {}, eigenspace has {d}",
            basis.len()
        )));
    }
    let embedding = Matrix::from_columns(q.dim(), &basis, field.zero());
    let coords = |v: &[F::Elem]| {
        linalg::solve(field, &embedding, v)
            .ok_or_else(|| JacobianError::Inconsistent("Q is not closed under multiplication".into()))
    };
    let mut table = vec![vec![Vec::new(); d]; d];
    for i in 0..d {
        for j in 0..d {
            table[i][j] = coords(&a.mul(&basis[i], &basis[j]))?;
        }
    }
    let unit = coords(&idempotent)?;
    let algebra = FiniteAlgebra::new(field.clone(), table, unit)?;

    let mut rho = Vec::new();
    let mut valuation = Vec::new();
    let mut xi = Vec::new();
    let mut psi = Vec::new();
    for (i, lambda) in eigenvalues.iter().enumerate() {
        let mut g = vec![0; q.rank()];
        g[i] = 1;
        let y = q.laurent_monomial(&g)?;
        let v = field.valuation(lambda).ok_or(ScalarError::DivisionByZero)?;
        let shift = field.t_power(-v);
        let r = algebra.scale(&coords(&a.mul(&idempotent, &y))?, &shift);
        let x = field.mul(lambda, &shift);
        let x_inv = field.inv(&x).ok_or(ScalarError::DivisionByZero)?;
        psi.push(algebra.sub(&algebra.scale(&r, &x_inv), &algebra.unit()));
        rho.push(r);
        valuation.push(v);
        xi.push(x);
    }
    let theta = if field.characteristic() == 0 {
        Some(psi.iter().map(|p| algebra.log_one_plus(p)).collect::<Result<Vec<_>, _>>()?)
    } else {
        None
    };
    Ok(Summand { eigenvalues, valuation, xi, basis, idempotent, algebra, rho, psi, theta, embedding })
}
