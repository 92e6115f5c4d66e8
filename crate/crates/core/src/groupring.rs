//! The group ring of `Z^n` over a coefficient field, with log-derivatives,
//! evaluation along characters, and the energy filtration.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::scalar::{Field, Rat};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GroupRingError {
    #[error("rank mismatch: {0} vs {1}")]
    RankMismatch(usize, usize),
    #[error("axis {axis} out of range for rank {rank}")]
    AxisOutOfRange { axis: usize, rank: usize },
    #[error("evaluation undefined at exponent {0:?}")]
    Undefined(Vec<i64>),
}

/// A finite sum `sum_gamma a_gamma tau^gamma`. Coefficients are never zero.
#[derive(Clone, Debug, PartialEq)]
pub struct Laurent<E> {
    rank: usize,
    terms: BTreeMap<Vec<i64>, E>,
}

impl<E: Clone> Laurent<E> {
    pub fn zero(rank: usize) -> Self {
        Laurent { rank, terms: BTreeMap::new() }
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<i64>, &E)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, gamma: &[i64]) -> Option<&E> {
        self.terms.get(gamma)
    }
}

pub fn monomial<F: Field>(field: &F, coeff: F::Elem, gamma: Vec<i64>) -> Laurent<F::Elem> {
    let rank = gamma.len();
    let mut out = Laurent::zero(rank);
    if !field.is_zero(&coeff) {
        out.terms.insert(gamma, coeff);
    }
    out
}

pub fn constant<F: Field>(field: &F, rank: usize, c: F::Elem) -> Laurent<F::Elem> {
    monomial(field, c, vec![0; rank])
}

/// Collects `(gamma, coefficient)` pairs, merging repeats.
pub fn from_terms<F: Field>(
    field: &F,
    rank: usize,
    terms: impl IntoIterator<Item = (Vec<i64>, F::Elem)>,
) -> Result<Laurent<F::Elem>, GroupRingError> {
    let mut out = Laurent::zero(rank);
    for (g, c) in terms {
        if g.len() != rank {
            return Err(GroupRingError::RankMismatch(rank, g.len()));
        }
        accumulate(field, &mut out, g, c);
    }
    Ok(out)
}

fn accumulate<F: Field>(field: &F, a: &mut Laurent<F::Elem>, gamma: Vec<i64>, c: F::Elem) {
    use std::collections::btree_map::Entry;
    match a.terms.entry(gamma) {
        Entry::Vacant(slot) => {
            if !field.is_zero(&c) {
                slot.insert(c);
            }
        }
        Entry::Occupied(mut slot) => {
            let sum = field.add(slot.get(), &c);
            if field.is_zero(&sum) {
                slot.remove();
            } else {
                *slot.get_mut() = sum;
            }
        }
    }
}

fn same_rank<E>(a: &Laurent<E>, b: &Laurent<E>) -> Result<(), GroupRingError> {
    if a.rank == b.rank {
        Ok(())
    } else {
        Err(GroupRingError::RankMismatch(a.rank, b.rank))
    }
}

pub fn add<F: Field>(
    field: &F,
    a: &Laurent<F::Elem>,
    b: &Laurent<F::Elem>,
) -> Result<Laurent<F::Elem>, GroupRingError> {
    same_rank(a, b)?;
    let mut out = a.clone();
    for (g, c) in &b.terms {
        accumulate(field, &mut out, g.clone(), c.clone());
    }
    Ok(out)
}

pub fn scale<F: Field>(field: &F, a: &Laurent<F::Elem>, c: &F::Elem) -> Laurent<F::Elem> {
    let mut out = Laurent::zero(a.rank);
    for (g, x) in &a.terms {
        accumulate(field, &mut out, g.clone(), field.mul(x, c));
    }
    out
}

pub fn mul<F: Field>(
    field: &F,
    a: &Laurent<F::Elem>,
    b: &Laurent<F::Elem>,
) -> Result<Laurent<F::Elem>, GroupRingError> {
    same_rank(a, b)?;
    let mut out = Laurent::zero(a.rank);
    for (g1, c1) in &a.terms {
        for (g2, c2) in &b.terms {
            let g: Vec<i64> = g1.iter().zip(g2).map(|(x, y)| x + y).collect();
            accumulate(field, &mut out, g, field.mul(c1, c2));
        }
    }
    Ok(out)
}

/// `d/dx_j` where `y_j = e^{x_j}`: scales `tau^gamma` by `gamma_j`. Axes are 0-based.
pub fn log_derivative<F: Field>(
    field: &F,
    a: &Laurent<F::Elem>,
    axis: usize,
) -> Result<Laurent<F::Elem>, GroupRingError> {
    if axis >= a.rank {
        return Err(GroupRingError::AxisOutOfRange { axis, rank: a.rank });
    }
    let mut out = Laurent::zero(a.rank);
    for (g, c) in &a.terms {
        accumulate(field, &mut out, g.clone(), field.scale_int(c, g[axis]));
    }
    Ok(out)
}

/// Linear extension `sum a_gamma f(gamma)` of a map from exponents into a
/// `dim`-dimensional algebra, with elements given by coordinates.
pub fn hat_evaluate<F: Field>(
    field: &F,
    a: &Laurent<F::Elem>,
    dim: usize,
    mut f: impl FnMut(&[i64]) -> Option<Vec<F::Elem>>,
) -> Result<Vec<F::Elem>, GroupRingError> {
    let mut acc = vec![field.zero(); dim];
    for (g, c) in &a.terms {
        let value = f(g).ok_or_else(|| GroupRingError::Undefined(g.clone()))?;
        if value.len() != dim {
            return Err(GroupRingError::Undefined(g.clone()));
        }
        for (slot, v) in acc.iter_mut().zip(&value) {
            *slot = field.add(slot, &field.mul(c, v));
        }
    }
    Ok(acc)
}

/// Scalar-valued case of [`hat_evaluate`].
pub fn hat_evaluate_scalar<F: Field>(
    field: &F,
    a: &Laurent<F::Elem>,
    mut f: impl FnMut(&[i64]) -> Option<F::Elem>,
) -> Result<F::Elem, GroupRingError> {
    hat_evaluate(field, a, 1, |g| f(g).map(|x| vec![x])).map(|mut v| v.remove(0))
}

/// Evaluation along a character given by its values on the standard basis.
pub fn character<'a, F: Field>(
    field: &'a F,
    values: &'a [F::Elem],
) -> impl Fn(&[i64]) -> Option<F::Elem> + 'a {
    move |g: &[i64]| {
        g.iter().zip(values).try_fold(field.one(), |acc, (&e, v)| {
            field.pow(v, e).map(|p| field.mul(&acc, &p))
        })
    }
}

pub fn format<F: Field>(field: &F, a: &Laurent<F::Elem>) -> String {
    if a.terms.is_empty() {
        return "0".into();
    }
    a.terms
        .iter()
        .map(|(g, c)| {
            let exps = g.iter().map(|e| e.to_string()).collect::<Vec<_>>().join(",");
            format!("({})*tau^({exps})", field.format(c))
        })
        .collect::<Vec<_>>()
        .join(" + ")
}

/// Result of the bounded search behind [`filtration_level`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FiltrationLevel {
    Level(Rat),
    /// No representation of the exponent was found within the search bound.
    Undetermined,
}

/// Filtration level of `T^l tau^gamma`: `l - min sum a_j lambda_j` over
/// `sum a_j nu_j = gamma` with `a_j >= 0` and `sum a_j <= bound`.
pub fn filtration_level(
    l: Rat,
    gamma: &[i64],
    normals: &[Vec<i64>],
    areas: &[Rat],
    bound: usize,
) -> FiltrationLevel {
    fn search(
        j: usize,
        remaining: &mut Vec<i64>,
        budget: usize,
        cost: Rat,
        normals: &[Vec<i64>],
        areas: &[Rat],
        best: &mut Option<Rat>,
    ) {
        if best.is_some_and(|b| cost >= b) {
            return;
        }
        if j == normals.len() {
            if remaining.iter().all(|&x| x == 0) {
                *best = Some(cost);
            }
            return;
        }
        for k in 0..=budget {
            search(j + 1, remaining, budget - k, cost + areas[j] * (k as i64), normals, areas, best);
            if k < budget {
                for (r, n) in remaining.iter_mut().zip(&normals[j]) {
                    *r -= n;
                }
            } else {
                // Undo the k subtractions made above.
                for (r, n) in remaining.iter_mut().zip(&normals[j]) {
                    *r += n * (k as i64);
                }
            }
        }
    }
    let mut remaining = gamma.to_vec();
    let mut best = None;
    search(0, &mut remaining, bound, Rat::from_integer(0), normals, areas, &mut best);
    match best {
        Some(b) => FiltrationLevel::Level(l - b),
        None => FiltrationLevel::Undetermined,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{NovikovField, ScalarField};

    fn q() -> ScalarField {
        ScalarField::Rational
    }

    fn y(f: &ScalarField, e: i64) -> Laurent<crate::scalar::Scalar> {
        monomial(f, f.one(), vec![e])
    }

    #[test]
    fn products() {
        let f = q();
        let a = monomial(&f, f.one(), vec![1, 0]);
        let b = monomial(&f, f.one(), vec![0, 1]);
        assert_eq!(mul(&f, &a, &b).unwrap(), monomial(&f, f.one(), vec![1, 1]));
        let s = add(&f, &y(&f, 1), &y(&f, -1)).unwrap();
        let sq = mul(&f, &s, &s).unwrap();
        let expected = from_terms(
            &f,
            1,
            [(vec![2], f.one()), (vec![0], f.from_int(2)), (vec![-2], f.one())],
        )
        .unwrap();
        assert_eq!(sq, expected);
        assert!(matches!(mul(&f, &a, &y(&f, 1)), Err(GroupRingError::RankMismatch(2, 1))));
    }

    #[test]
    fn novikov_products() {
        let n = NovikovField::new(q(), Rat::from_integer(10));
        let a = monomial(&n, n.t_power(Rat::from_integer(1)), vec![1]);
        let b = monomial(&n, n.t_power(Rat::from_integer(2)), vec![-1]);
        assert_eq!(mul(&n, &a, &b).unwrap(), monomial(&n, n.t_power(Rat::from_integer(3)), vec![0]));
    }

    #[test]
    fn log_derivatives() {
        let f = q();
        let m = monomial(&f, f.one(), vec![2, 1]);
        assert_eq!(log_derivative(&f, &m, 0).unwrap(), monomial(&f, f.from_int(2), vec![2, 1]));
        let m = monomial(&f, f.one(), vec![3, 0]);
        assert!(log_derivative(&f, &m, 1).unwrap().is_empty());
        let s = add(&f, &y(&f, 1), &y(&f, -1)).unwrap();
        let expected = add(&f, &y(&f, 1), &monomial(&f, f.from_int(-1), vec![-1])).unwrap();
        assert_eq!(log_derivative(&f, &s, 0).unwrap(), expected);
        assert!(log_derivative(&f, &s, 1).is_err());
    }

    #[test]
    fn evaluation() {
        let f = ScalarField::Prime(7);
        let a = from_terms(&f, 2, [(vec![1, 0], f.from_int(2)), (vec![0, 1], f.from_int(3))]).unwrap();
        assert_eq!(hat_evaluate_scalar(&f, &a, |_| Some(f.one())).unwrap(), f.from_int(5));
        let c = f.from_int(3);
        let values = [c.clone()];
        let chi = character(&f, &values);
        assert_eq!(hat_evaluate_scalar(&f, &y(&f, 2), &chi).unwrap(), f.from_int(2));
        let n = NovikovField::new(q(), Rat::from_integer(10));
        let t = |e| n.t_power(Rat::from_integer(e));
        let a = from_terms(&n, 1, [(vec![0], t(1)), (vec![1], t(2))]).unwrap();
        let cval = n.from_int(4);
        let got = hat_evaluate_scalar(&n, &a, |g| Some(if g[0] == 0 { n.one() } else { cval.clone() })).unwrap();
        assert_eq!(got, n.add(&t(1), &n.mul(&cval, &t(2))));
    }

    #[test]
    fn filtration_levels() {
        let normals = vec![vec![1], vec![-1]];
        let areas = vec![Rat::from_integer(1), Rat::from_integer(1)];
        let lvl = |l: i64, g: i64| filtration_level(Rat::from_integer(l), &[g], &normals, &areas, 6);
        assert_eq!(lvl(1, 1), FiltrationLevel::Level(Rat::from_integer(0)));
        assert_eq!(lvl(3, 0), FiltrationLevel::Level(Rat::from_integer(3)));
        assert_eq!(lvl(0, 1), FiltrationLevel::Level(Rat::from_integer(-1)));
        let far = filtration_level(Rat::from_integer(0), &[9], &normals, &areas, 4);
        assert_eq!(far, FiltrationLevel::Undetermined);
    }
}
