//! The Jacobian ring `A/I` of a superpotential, its multiplication operators,
//! and the Kodaira-Spencer classes of the toric divisors.

pub mod eigen;
pub mod mpoly;

use thiserror::Error;

pub use eigen::{decompose, Summand};
use mpoly::{Mono, Poly};

use crate::algebra::{AlgebraError, FiniteAlgebra};
use crate::groupring::{self, Laurent};
use crate::linalg::Matrix;
use crate::scalar::{Field, ScalarError};
use crate::toric::{Superpotential, ToricError};

/// Upper bound on the dimension of a quotient we are prepared to enumerate.
pub const MAX_QUOTIENT_DIM: usize = 4096;
/// Default number of reduction steps allowed to Buchberger's algorithm.
pub const DEFAULT_STEP_BUDGET: usize = 200_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum JacobianError {
    #[error("Groebner step budget of {0} exhausted")]
    Budget(usize),
    #[error("quotient is not finite-dimensional (more than {0} standard monomials)")]
    InfiniteDimensional(usize),
    #[error(transparent)]
    Scalar(#[from] ScalarError),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Toric(#[from] ToricError),
    #[error("inconsistent decomposition: {0}")]
    Inconsistent(String),
    #[error("characteristic {0}: the nilpotent logarithm is undefined, use the psi data instead")]
    NoLogarithm(u64),
}

/// `tau^gamma -> u^m y^{gamma + m(1,...,1)}` with the least `m >= 0` making
/// every exponent nonnegative.
pub fn polynomialize<F: Field>(field: &F, a: &Laurent<F::Elem>) -> Poly<F::Elem> {
    let terms = a
        .terms()
        .map(|(g, c)| {
            let m = (-g.iter().copied().min().unwrap_or(0)).max(0);
            let mut mono: Mono = g.iter().map(|&e| (e + m) as u32).collect();
            mono.push(m as u32);
            (mono, c.clone())
        })
        .collect();
    mpoly::from_terms(field, terms)
}

/// Multiplies by the least monomial `y^k` that makes every exponent nonnegative.
pub fn clear_denominators<F: Field>(field: &F, a: &Laurent<F::Elem>) -> Poly<F::Elem> {
    let n = a.rank();
    let shift: Vec<i64> = (0..n)
        .map(|i| (-a.terms().map(|(g, _)| g[i]).min().unwrap_or(0)).max(0))
        .collect();
    let terms = a
        .terms()
        .map(|(g, c)| {
            let mut mono: Mono = g.iter().zip(&shift).map(|(e, s)| (e + s) as u32).collect();
            mono.push(0);
            (mono, c.clone())
        })
        .collect();
    mpoly::from_terms(field, terms)
}

/// Generators of the Jacobian ideal in `F[y_1, ..., y_n, u]`: the cleared
/// log-derivatives of `W`, followed by the saturation relation `u y_1...y_n - 1`.
pub fn jacobian_ideal<F: Field>(field: &F, w: &Superpotential) -> Vec<Poly<F::Elem>> {
    let n = w.rank();
    let wp = w.polynomial(field);
    let mut gens: Vec<Poly<F::Elem>> = (0..n)
        .map(|j| clear_denominators(field, &groupring::log_derivative(field, &wp, j).expect("axis in range")))
        .filter(|p| !p.is_zero())
        .collect();
    let top: Mono = vec![1; n + 1];
    gens.push(mpoly::from_terms(field, vec![(top, field.one()), (vec![0; n + 1], field.neg(&field.one()))]));
    gens
}

/// `A/I` with its monomial basis and structure constants.
#[derive(Clone, Debug)]
pub struct QuotientAlgebra<F: Field> {
    field: F,
    rank: usize,
    generators: Vec<Poly<F::Elem>>,
    groebner: Vec<Poly<F::Elem>>,
    basis: Vec<Mono>,
    algebra: FiniteAlgebra<F>,
    multiplication: Vec<Matrix<F::Elem>>,
}

impl<F: Field> QuotientAlgebra<F> {
    pub fn new(field: &F, w: &Superpotential, budget: usize) -> Result<Self, JacobianError> {
        let generators = jacobian_ideal(field, w);
        let gb = mpoly::groebner(field, &generators, budget).ok_or(JacobianError::Budget(budget))?;
        Self::from_groebner(field, w.rank(), generators, gb)
    }

    /// Rebuilds the quotient from a previously computed Groebner basis.
    pub fn from_groebner(
        field: &F,
        rank: usize,
        generators: Vec<Poly<F::Elem>>,
        groebner: Vec<Poly<F::Elem>>,
    ) -> Result<Self, JacobianError> {
        let basis = standard_monomials(&groebner, rank + 1)?;
        let dim = basis.len();
        let mut partial = QuotientAlgebra {
            field: field.clone(),
            rank,
            generators,
            groebner,
            basis,
            algebra: FiniteAlgebra::new(field.clone(), Vec::new(), Vec::new())?,
            multiplication: Vec::new(),
        };
        let mut table = vec![vec![Vec::new(); dim]; dim];
        for i in 0..dim {
            for j in 0..dim {
                let m: Mono = partial.basis[i].iter().zip(&partial.basis[j]).map(|(a, b)| a + b).collect();
                table[i][j] = partial.reduce(&mpoly::from_terms(field, vec![(m, field.one())]))?;
            }
        }
        let one = partial.reduce(&mpoly::from_terms(field, vec![(vec![0; rank + 1], field.one())]))?;
        partial.algebra = FiniteAlgebra::new(field.clone(), table, one)?;
        partial.multiplication = (0..rank)
            .map(|i| {
                let mut g = vec![0; rank];
                g[i] = 1;
                let y = partial.laurent_monomial(&g)?;
                Ok(partial.algebra.left_matrix(&y))
            })
            .collect::<Result<_, JacobianError>>()?;
        Ok(partial)
    }

    pub fn field(&self) -> &F {
        &self.field
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn generators(&self) -> &[Poly<F::Elem>] {
        &self.generators
    }

    pub fn groebner(&self) -> &[Poly<F::Elem>] {
        &self.groebner
    }

    pub fn basis(&self) -> &[Mono] {
        &self.basis
    }

    pub fn algebra(&self) -> &FiniteAlgebra<F> {
        &self.algebra
    }

    /// `M_{gamma_i}`, multiplication by `y_i` in the monomial basis.
    pub fn multiplication(&self, i: usize) -> &Matrix<F::Elem> {
        &self.multiplication[i]
    }

    /// Normal form of a polynomial, as coordinates in the monomial basis.
    pub fn reduce(&self, p: &Poly<F::Elem>) -> Result<Vec<F::Elem>, JacobianError> {
        let r = mpoly::reduce(&self.field, p, &self.groebner, DEFAULT_STEP_BUDGET)
            .ok_or(JacobianError::Budget(DEFAULT_STEP_BUDGET))?;
        let mut coords = vec![self.field.zero(); self.dim()];
        for (m, c) in r.remainder.terms() {
            let k = self.basis.iter().position(|b| b == m).ok_or_else(|| {
                JacobianError::Inconsistent(format!("normal form left the monomial basis at {m:?}"))
            })?;
            coords[k] = c.clone();
        }
        Ok(coords)
    }

    pub fn normal_form(&self, p: &Poly<F::Elem>) -> Result<Poly<F::Elem>, JacobianError> {
        let coords = self.reduce(p)?;
        Ok(self.poly_from_coords(&coords))
    }

    pub fn poly_from_coords(&self, coords: &[F::Elem]) -> Poly<F::Elem> {
        let terms = self.basis.iter().cloned().zip(coords.iter().cloned()).collect();
        mpoly::from_terms(&self.field, terms)
    }

    /// The class of a group-ring element.
    pub fn reduce_laurent(&self, a: &Laurent<F::Elem>) -> Result<Vec<F::Elem>, JacobianError> {
        self.reduce(&polynomialize(&self.field, a))
    }

    pub fn laurent_monomial(&self, gamma: &[i64]) -> Result<Vec<F::Elem>, JacobianError> {
        self.reduce_laurent(&groupring::monomial(&self.field, self.field.one(), gamma.to_vec()))
    }

    /// `ks(H_j) = sum_beta <H_j, beta> c_beta T^{omega(beta)} tau^{boundary beta}` modulo `I`.
    pub fn ks_class(&self, w: &Superpotential, divisor: usize) -> Result<Vec<F::Elem>, JacobianError> {
        let pairings = w.pairings(divisor)?;
        let mut acc = Laurent::zero(self.rank);
        for (i, k) in pairings.iter().enumerate() {
            if *k != 0 {
                let term = groupring::scale(&self.field, &w.class_term(&self.field, i), &self.field.from_int(*k));
                acc = groupring::add(&self.field, &acc, &term).expect("same rank");
            }
        }
        self.reduce_laurent(&acc)
    }

    pub fn format(&self, coords: &[F::Elem]) -> String {
        mpoly::format(&self.field, &self.poly_from_coords(coords))
    }
}

fn standard_monomials<E: Clone>(gb: &[Poly<E>], vars: usize) -> Result<Vec<Mono>, JacobianError> {
    let leads: Vec<&Mono> = gb.iter().filter_map(|g| g.lead().map(|t| &t.0)).collect();
    let reducible = |m: &Mono| leads.iter().any(|l| mpoly::divides(l, m));
    let mut out: Vec<Mono> = Vec::new();
    let mut frontier = vec![vec![0u32; vars]];
    if reducible(&frontier[0]) {
        return Ok(out);
    }
    while let Some(m) = frontier.pop() {
        if out.contains(&m) {
            continue;
        }
        out.push(m.clone());
        if out.len() > MAX_QUOTIENT_DIM {
            return Err(JacobianError::InfiniteDimensional(MAX_QUOTIENT_DIM));
        }
        for i in 0..vars {
            let mut next = m.clone();
            next[i] += 1;
            if !reducible(&next) && !out.contains(&next) {
                frontier.push(next);
            }
        }
    }
    out.sort_by(|a, b| mpoly::cmp_mono(a, b));
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{NovikovField, Rat, ScalarField};
    use crate::toric::{fans, Mode};

    fn r(n: i64) -> Rat {
        Rat::from_integer(n)
    }

    #[test]
    fn ideals_of_standard_examples() {
        let q = ScalarField::Rational;
        let cp1 = fans::projective_line(r(1), r(1));
        let w = Superpotential::build(&cp1, &q, Mode::Monotone, vec![]).unwrap();
        let gens = jacobian_ideal(&q, &w);
        let expected = mpoly::from_terms(&q, vec![(vec![2, 0], q.one()), (vec![0, 0], q.from_int(-1))]);
        assert_eq!(gens[0], expected);

        let cp2 = fans::projective_plane([r(1); 3]);
        let w = Superpotential::build(&cp2, &q, Mode::Monotone, vec![]).unwrap();
        let gens = jacobian_ideal(&q, &w);
        let g1 = mpoly::from_terms(&q, vec![(vec![2, 1, 0], q.one()), (vec![0, 0, 0], q.from_int(-1))]);
        let g2 = mpoly::from_terms(&q, vec![(vec![1, 2, 0], q.one()), (vec![0, 0, 0], q.from_int(-1))]);
        assert_eq!(gens[..2], [g1, g2]);

        let nov = NovikovField::new(q.clone(), r(5));
        let cp1 = fans::projective_line(r(1), r(2));
        let w = Superpotential::build(&cp1, &q, Mode::Novikov, vec![]).unwrap();
        let gens = jacobian_ideal(&nov, &w);
        let expected = mpoly::from_terms(
            &nov,
            vec![(vec![2, 0], nov.one()), (vec![0, 0], nov.neg(&nov.t_power(r(1))))],
        );
        assert_eq!(mpoly::monic(&nov, &gens[0]), expected);
    }

    #[test]
    fn normal_forms() {
        let f = ScalarField::Prime(7);
        let cp1 = fans::projective_line(r(1), r(1));
        let w = Superpotential::build(&cp1, &f, Mode::Monotone, vec![]).unwrap();
        let qa = QuotientAlgebra::new(&f, &w, DEFAULT_STEP_BUDGET).unwrap();
        assert_eq!(qa.dim(), 2);
        assert_eq!(qa.laurent_monomial(&[3]).unwrap(), qa.laurent_monomial(&[1]).unwrap());
        assert_eq!(qa.laurent_monomial(&[-1]).unwrap(), qa.laurent_monomial(&[1]).unwrap());
        for g in qa.generators() {
            assert!(qa.algebra().is_zero(&qa.reduce(g).unwrap()));
        }

        let cp2 = fans::projective_plane([r(1); 3]);
        let w = Superpotential::build(&cp2, &f, Mode::Monotone, vec![]).unwrap();
        let qa = QuotientAlgebra::new(&f, &w, DEFAULT_STEP_BUDGET).unwrap();
        assert_eq!(qa.basis(), &[vec![0, 0, 0], vec![1, 0, 0], vec![2, 0, 0]]);
        assert_eq!(qa.laurent_monomial(&[0, 1]).unwrap(), qa.laurent_monomial(&[1, 0]).unwrap());
    }

    #[test]
    fn ks_classes() {
        let f = ScalarField::Prime(5);
        let cp1 = fans::projective_line(r(1), r(1));
        let w = Superpotential::build(&cp1, &f, Mode::Monotone, vec![]).unwrap();
        let qa = QuotientAlgebra::new(&f, &w, DEFAULT_STEP_BUDGET).unwrap();
        let y = qa.laurent_monomial(&[1]).unwrap();
        assert_eq!(qa.ks_class(&w, 0).unwrap(), y);
        assert_eq!(qa.ks_class(&w, 1).unwrap(), y);

        let q = ScalarField::Rational;
        let nov = NovikovField::new(q.clone(), r(5));
        let cp1 = fans::projective_line(r(1), r(2));
        let w = Superpotential::build(&cp1, &q, Mode::Novikov, vec![]).unwrap();
        let qa = QuotientAlgebra::new(&nov, &w, DEFAULT_STEP_BUDGET).unwrap();
        let ty = qa.reduce_laurent(&groupring::monomial(&nov, nov.t_power(r(1)), vec![1])).unwrap();
        assert_eq!(qa.ks_class(&w, 0).unwrap(), ty);
    }
}
