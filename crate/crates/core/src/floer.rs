//! The degree-one sector of the Floer complex of a toric fibre.
//!
//! Inputs are the generators `b_1, ..., b_n` (equivalently the index-one
//! critical points `z_j` of the pearl model) and outputs are multiples of the
//! unit, so every operation here returns a scalar or an element of the
//! coefficient algebra `S`.

use thiserror::Error;

use crate::algebra::{AlgebraError, FiniteAlgebra};
use crate::groupring::{self, Laurent};
use crate::jacobian::eigen::Summand;
use crate::jacobian::{JacobianError, QuotientAlgebra};
use crate::linalg;
use crate::scalar::{Field, Rat};
use crate::toric::{DiscClass, Superpotential, ToricError};

#[derive(Debug, Error)]
pub enum FloerError {
    #[error("{what}: insertion sum {definition} differs from closed form {closed}")]
    Mismatch { what: String, definition: String, closed: String },
    #[error("the logarithmic cochain needs characteristic zero, not {0}")]
    Characteristic(u64),
    #[error("bounding cochain coefficient for gamma_{0} is not nilpotent")]
    NotNilpotent(usize),
    #[error("rank mismatch: {0}")]
    Rank(String),
    #[error("m_1 does not vanish on b_{index}: {value}")]
    NonzeroDifferential { index: usize, value: String },
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Jacobian(#[from] JacobianError),
    #[error(transparent)]
    Toric(#[from] ToricError),
}

/// `binom(p, c) = p (p - 1) ... (p - c + 1) / c!`, for any integer `p`.
pub fn binomial(p: i64, c: u32) -> i128 {
    let mut b: i128 = 1;
    for i in 0..c as i128 {
        b = b * (p as i128 - i) / (i + 1);
    }
    b
}

fn int<F: Field>(field: &F, n: i128) -> F::Elem {
    field.from_int(i64::try_from(n).expect("binomial coefficient fits in i64"))
}

/// `xi(gamma)` for a character given on the basis `gamma_1, ..., gamma_n`.
pub fn character_value<F: Field>(field: &F, xi: &[F::Elem], gamma: &[i64]) -> F::Elem {
    groupring::character(field, xi)(gamma).expect("characters take unit values")
}

fn coeff<F: Field>(field: &F, beta: &DiscClass) -> F::Elem {
    field.from_scalar(&beta.coeff)
}

/// `W_beta = c_beta tau^{boundary beta}`, without the area weight.
pub fn w_beta<F: Field>(field: &F, beta: &DiscClass) -> Laurent<F::Elem> {
    groupring::monomial(field, coeff(field, beta), beta.boundary.clone())
}

/// `l_{k,beta}(a_1, ..., a_k) = c_beta xi(boundary beta) prod_j (a_j . boundary beta)`,
/// inputs given by their coordinates in `b_1, ..., b_n`.
pub fn lk_beta<F: Field>(field: &F, xi: &[F::Elem], beta: &DiscClass, inputs: &[Vec<F::Elem>]) -> F::Elem {
    inputs.iter().fold(
        field.mul(&coeff(field, beta), &character_value(field, xi, &beta.boundary)),
        |acc, a| {
            let pairing = a
                .iter()
                .zip(&beta.boundary)
                .fold(field.zero(), |s, (x, p)| field.add(&s, &field.scale_int(x, *p)));
            field.mul(&acc, &pairing)
        },
    )
}

/// `d^k W_beta / dx_{j_1} ... dx_{j_k}` evaluated at `xi`.
pub fn derivative_form<F: Field>(field: &F, xi: &[F::Elem], beta: &DiscClass, axes: &[usize]) -> F::Elem {
    let mut w = w_beta(field, beta);
    for &j in axes {
        w = groupring::log_derivative(field, &w, j).expect("axis in range");
    }
    groupring::hat_evaluate_scalar(field, &w, groupring::character(field, xi)).expect("characters are total")
}

/// `m_beta[c] = prod binom(p_j, c_j) W_beta|_xi`.
pub fn binomial_form<F: Field>(field: &F, xi: &[F::Elem], beta: &DiscClass, c: &[u32]) -> F::Elem {
    let b = beta
        .boundary
        .iter()
        .zip(c)
        .fold(field.one(), |acc, (&p, &cj)| field.mul(&acc, &int(field, binomial(p, cj))));
    field.mul(&b, &field.mul(&coeff(field, beta), &character_value(field, xi, &beta.boundary)))
}

/// `y^c d^{|c|} W_beta / dy^c |_xi / c!`, the form of `m_beta[c]` obtained by
/// differentiating in the multiplicative coordinates. Needs `c_j!` invertible.
pub fn y_derivative_form<F: Field>(field: &F, xi: &[F::Elem], beta: &DiscClass, c: &[u32]) -> Option<F::Elem> {
    let mut exponent = beta.boundary.clone();
    let mut value = coeff(field, beta);
    let mut factorial = field.one();
    for (j, &cj) in c.iter().enumerate() {
        for i in 0..cj {
            value = field.scale_int(&value, exponent[j]);
            exponent[j] -= 1;
            factorial = field.scale_int(&factorial, i as i64 + 1);
        }
        exponent[j] += cj as i64;
    }
    let at = field.mul(&value, &character_value(field, xi, &exponent));
    field.div(&at, &factorial)
}

/// Distinct arrangements of the multiset with `c_j` copies of `j`, in
/// lexicographic order.
pub fn unshuffles(c: &[u32]) -> Vec<Vec<usize>> {
    fn rec(left: &mut [u32], prefix: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if left.iter().all(|&x| x == 0) {
            out.push(prefix.clone());
            return;
        }
        for j in 0..left.len() {
            if left[j] > 0 {
                left[j] -= 1;
                prefix.push(j);
                rec(left, prefix, out);
                prefix.pop();
                left[j] += 1;
            }
        }
    }
    let mut out = Vec::new();
    rec(&mut c.to_vec(), &mut Vec::new(), &mut out);
    out
}

/// `m[c] = sum over unshuffles l of m_k(z_{l_1}, ..., z_{l_k})`.
pub fn unshuffle_sum<F: Field>(field: &F, c: &[u32], mut m: impl FnMut(&[usize]) -> F::Elem) -> F::Elem {
    unshuffles(c).iter().fold(field.zero(), |acc, l| field.add(&acc, &m(l)))
}

/// The independent computations of `m_beta[c]`.
#[derive(Debug, Clone)]
pub struct BracketForms<E> {
    pub binomial: E,
    /// Unshuffle sum of supplied individual operations, when given.
    pub unshuffle: Option<E>,
    /// Multiplicative-coordinate derivative form, when the factorials are units.
    pub derivative: Option<E>,
}

impl<E: Clone> BracketForms<E> {
    pub fn agree<F: Field<Elem = E>>(&self, field: &F) -> bool {
        [&self.unshuffle, &self.derivative]
            .into_iter()
            .flatten()
            .all(|v| field.equal(v, &self.binomial))
    }
}

/// All available forms of `m_beta[c]`. `individual`, if given, returns the
/// non-symmetrised `m_{k,beta}` on a tuple of input indices.
pub fn unshuffle_bracket<F: Field>(
    field: &F,
    xi: &[F::Elem],
    beta: &DiscClass,
    c: &[u32],
    individual: Option<&mut dyn FnMut(&[usize]) -> F::Elem>,
) -> BracketForms<F::Elem> {
    BracketForms {
        binomial: binomial_form(field, xi, beta, c),
        unshuffle: individual.map(|m| unshuffle_sum(field, c, m)),
        derivative: y_derivative_form(field, xi, beta, c),
    }
}

/// Every multiplicity vector of length `n` with `|c| <= bound`.
pub fn multiplicities(n: usize, bound: u32) -> Vec<Vec<u32>> {
    let mut out = vec![Vec::new()];
    for _ in 0..n {
        out = out
            .into_iter()
            .flat_map(|v: Vec<u32>| {
                let used: u32 = v.iter().sum();
                (0..=bound - used).map(move |x| {
                    let mut w = v.clone();
                    w.push(x);
                    w
                })
            })
            .collect();
    }
    out
}

/// An action `rho: H -> S^x` whose values have generalised eigenvalues `xi`,
/// with valuation shift `val` used to recentre areas.
#[derive(Clone, Debug)]
pub struct Action<F: Field> {
    pub algebra: FiniteAlgebra<F>,
    pub xi: Vec<F::Elem>,
    pub rho: Vec<Vec<F::Elem>>,
    pub valuation: Vec<Rat>,
}

impl<F: Field> Action<F> {
    pub fn new(algebra: FiniteAlgebra<F>, xi: Vec<F::Elem>, rho: Vec<Vec<F::Elem>>) -> Result<Self, FloerError> {
        if xi.len() != rho.len() {
            return Err(FloerError::Rank(format!("{} eigenvalues for {} generators", xi.len(), rho.len())));
        }
        if rho.iter().any(|r| r.len() != algebra.dim()) {
            return Err(FloerError::Rank("rho value of the wrong dimension".into()));
        }
        let valuation = vec![Rat::from_integer(0); xi.len()];
        Ok(Action { algebra, xi, rho, valuation })
    }

    pub fn from_summand(s: &Summand<F>) -> Self {
        Action {
            algebra: s.algebra.clone(),
            xi: s.xi.clone(),
            rho: s.rho.clone(),
            valuation: s.valuation.clone(),
        }
    }

    pub fn field(&self) -> &F {
        self.algebra.field()
    }

    pub fn rank(&self) -> usize {
        self.xi.len()
    }

    pub fn rho_of(&self, gamma: &[i64]) -> Result<Vec<F::Elem>, FloerError> {
        let alg = &self.algebra;
        gamma.iter().zip(&self.rho).try_fold(alg.unit(), |acc, (&e, r)| Ok(alg.mul(&acc, &alg.pow(r, e)?)))
    }

    pub fn rho_hat(&self, f: &Laurent<F::Elem>) -> Result<Vec<F::Elem>, FloerError> {
        let mut err = None;
        let v = groupring::hat_evaluate(self.field(), f, self.algebra.dim(), |g| match self.rho_of(g) {
            Ok(x) => Some(x),
            Err(e) => {
                err = Some(e);
                None
            }
        });
        match (v, err) {
            (_, Some(e)) => Err(e),
            (Ok(v), None) => Ok(v),
            (Err(e), None) => Err(FloerError::Rank(e.to_string())),
        }
    }

    /// `psi(gamma_i) = rho(gamma_i) / xi(gamma_i) - 1`.
    pub fn psi(&self) -> Result<Vec<Vec<F::Elem>>, FloerError> {
        let f = self.field();
        let alg = &self.algebra;
        self.rho
            .iter()
            .zip(&self.xi)
            .map(|(r, x)| {
                let xi_inv = f.inv(x).ok_or(AlgebraError::NotInvertible)?;
                Ok(alg.sub(&alg.scale(r, &xi_inv), &alg.unit()))
            })
            .collect()
    }

    /// `theta = log(1 + psi)`, characteristic zero only.
    pub fn theta(&self) -> Result<Vec<Vec<F::Elem>>, FloerError> {
        let ch = self.field().characteristic();
        if ch != 0 {
            return Err(FloerError::Characteristic(ch));
        }
        self.psi()?
            .iter()
            .enumerate()
            .map(|(i, p)| self.algebra.log_one_plus(p).map_err(|_| FloerError::NotNilpotent(i)))
            .collect()
    }
}

/// Which cochain deforms the operations.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Model {
    /// `delta = sum b_j theta(gamma_j)`, operations from the de Rham formulas.
    DeRham,
    /// `delta = sum z_j psi(gamma_j)`, operations from the pearl brackets.
    Pearl,
}

impl Model {
    /// Models usable over a field of the given characteristic.
    pub fn available(characteristic: u64) -> Vec<Model> {
        if characteristic == 0 {
            vec![Model::DeRham, Model::Pearl]
        } else {
            vec![Model::Pearl]
        }
    }
}

/// `delta = sum_j b_j (x) coefficient_j` with nilpotent coefficients in `S`.
#[derive(Clone, Debug)]
pub struct BoundingCochain<E> {
    pub model: Model,
    pub coefficients: Vec<Vec<E>>,
    /// `nilpotency[j]` is the least `k` with `coefficient_j^k = 0`.
    pub nilpotency: Vec<usize>,
}

impl<E: Clone> BoundingCochain<E> {
    pub fn new<F: Field<Elem = E>>(
        algebra: &FiniteAlgebra<F>,
        model: Model,
        coefficients: Vec<Vec<E>>,
    ) -> Result<Self, FloerError> {
        let nilpotency = coefficients
            .iter()
            .enumerate()
            .map(|(i, c)| algebra.nilpotency_index(c).ok_or(FloerError::NotNilpotent(i)))
            .collect::<Result<_, _>>()?;
        Ok(BoundingCochain { model, coefficients, nilpotency })
    }

    pub fn for_action<F: Field<Elem = E>>(action: &Action<F>, model: Model) -> Result<Self, FloerError> {
        let coefficients = match model {
            Model::DeRham => action.theta()?,
            Model::Pearl => action.psi()?,
        };
        Self::new(&action.algebra, model, coefficients)
    }
}

/// `m^delta_beta[c]` by inserting `delta = sum z_j psi_j` and summing
/// `m_beta[c + d] prod binom(c_j + d_j, d_j) psi_j^{d_j}`. The undeformed
/// brackets come from `bracket`.
pub fn deformed_bracket_insertion<F: Field>(
    algebra: &FiniteAlgebra<F>,
    delta: &BoundingCochain<F::Elem>,
    c: &[u32],
    mut bracket: impl FnMut(&[u32]) -> F::Elem,
) -> Vec<F::Elem> {
    let field = algebra.field();
    let bounds: Vec<u32> = delta.nilpotency.iter().map(|&k| k.saturating_sub(1) as u32).collect();
    let mut total = algebra.zero();
    let mut d = vec![0u32; c.len()];
    loop {
        let shifted: Vec<u32> = c.iter().zip(&d).map(|(a, b)| a + b).collect();
        let m = bracket(&shifted);
        if !field.is_zero(&m) {
            let mut term = algebra.from_scalar(&m);
            for j in 0..c.len() {
                let w = int(field, binomial(shifted[j] as i64, d[j]));
                term = algebra.scale(&algebra.mul(&term, &algebra.pow_u(&delta.coefficients[j], d[j] as u64)), &w);
            }
            total = algebra.add(&total, &term);
        }
        let mut j = 0;
        loop {
            if j == d.len() {
                return total;
            }
            if d[j] < bounds[j] {
                d[j] += 1;
                break;
            }
            d[j] = 0;
            j += 1;
        }
    }
}

/// Closed form `c_beta prod binom(p_j, c_j) rho(boundary - sum c_j gamma_j) xi(sum c_j gamma_j)`.
pub fn deformed_bracket_closed<F: Field>(action: &Action<F>, beta: &DiscClass, c: &[u32]) -> Result<Vec<F::Elem>, FloerError> {
    let field = action.field();
    let cg: Vec<i64> = c.iter().map(|&x| x as i64).collect();
    let rest: Vec<i64> = beta.boundary.iter().zip(&cg).map(|(p, x)| p - x).collect();
    let scalar = field.mul(
        &binomial_form(field, &vec![field.one(); c.len()], beta, c),
        &character_value(field, &action.xi, &cg),
    );
    Ok(action.algebra.scale(&action.rho_of(&rest)?, &scalar))
}

/// `l^delta_{k,beta}(b_{j_1}, ..., b_{j_k}) = sum_m 1/m! sum_l l_{k+m,beta}(b_j, b_l) theta_{l_1} ... theta_{l_m}`
/// for `delta = sum b_j theta_j`, expanded term by term.
pub fn deformed_l_insertion<F: Field>(
    action: &Action<F>,
    delta: &BoundingCochain<F::Elem>,
    beta: &DiscClass,
    axes: &[usize],
) -> Result<Vec<F::Elem>, FloerError> {
    let field = action.field();
    let alg = &action.algebra;
    let n = action.rank();
    let basis = |j: usize| -> Vec<F::Elem> { (0..n).map(|i| if i == j { field.one() } else { field.zero() }).collect() };
    let mut total = alg.zero();
    let mut factorial = field.one();
    for m in 0..=alg.dim() {
        if m > 0 {
            factorial = field.scale_int(&factorial, m as i64);
        }
        let inv = field.inv(&factorial).ok_or(FloerError::Characteristic(field.characteristic()))?;
        let mut tuple = vec![0usize; m];
        loop {
            let inputs: Vec<Vec<F::Elem>> = axes.iter().chain(&tuple).map(|&j| basis(j)).collect();
            let l = lk_beta(field, &action.xi, beta, &inputs);
            if !field.is_zero(&l) {
                let prod = tuple.iter().fold(alg.unit(), |acc, &j| alg.mul(&acc, &delta.coefficients[j]));
                total = alg.add(&total, &alg.scale(&prod, &field.mul(&l, &inv)));
            }
            let mut i = 0;
            while i < m && tuple[i] + 1 == n {
                tuple[i] = 0;
                i += 1;
            }
            if i == m {
                break;
            }
            tuple[i] += 1;
        }
    }
    Ok(total)
}

/// Closed form `c_beta p_{j_1} ... p_{j_k} rho(boundary beta)`.
pub fn deformed_l_closed<F: Field>(action: &Action<F>, beta: &DiscClass, axes: &[usize]) -> Result<Vec<F::Elem>, FloerError> {
    let field = action.field();
    let scalar = axes
        .iter()
        .fold(coeff(field, beta), |acc, &j| field.scale_int(&acc, beta.boundary[j]));
    Ok(action.algebra.scale(&action.rho_of(&beta.boundary)?, &scalar))
}

/// The degree-one Floer data of one fibre: the superpotential seen from the
/// fibre `L_Q` (areas shifted by `<val_Q, boundary beta>`) and an action.
pub struct FloerModel<'a, F: Field> {
    pub w: &'a Superpotential,
    pub action: &'a Action<F>,
    /// `T^{omega(beta) + <val_Q, boundary beta>}` per class.
    pub weights: Vec<F::Elem>,
}

/// Outcome of comparing the definition against its closed form.
#[derive(Debug, Clone)]
pub struct Checked<E> {
    pub definition: E,
    pub closed: E,
    pub agree: bool,
}

impl<'a, F: Field> FloerModel<'a, F> {
    pub fn new(w: &'a Superpotential, action: &'a Action<F>) -> Result<Self, FloerError> {
        if w.rank() != action.rank() {
            return Err(FloerError::Rank(format!("potential rank {} vs action rank {}", w.rank(), action.rank())));
        }
        let field = action.field();
        let weights = w
            .classes()
            .iter()
            .map(|b| {
                let shift: Rat = b.boundary.iter().zip(&action.valuation).map(|(&p, v)| v * p).sum();
                field.t_power(b.area + shift)
            })
            .collect();
        Ok(FloerModel { w, action, weights })
    }

    fn field(&self) -> &F {
        self.action.field()
    }

    /// The recentred superpotential.
    pub fn polynomial(&self) -> Laurent<F::Elem> {
        let field = self.field();
        self.w.classes().iter().zip(&self.weights).fold(Laurent::zero(self.w.rank()), |acc, (b, t)| {
            let term = groupring::scale(field, &w_beta(field, b), t);
            groupring::add(field, &acc, &term).expect("same rank")
        })
    }

    fn check(&self, what: String, definition: Vec<F::Elem>, closed: Vec<F::Elem>) -> Checked<Vec<F::Elem>> {
        let agree = self.action.algebra.equal(&definition, &closed);
        if !agree {
            log::warn!("{what}: definition and closed form differ");
        }
        Checked { definition, closed, agree }
    }

    /// The deformed operation of class `beta` in the given model, with
    /// multiplicity vector `c` of degree-one inputs.
    pub fn deformed(
        &self,
        delta: &BoundingCochain<F::Elem>,
        beta: &DiscClass,
        c: &[u32],
    ) -> Result<Checked<Vec<F::Elem>>, FloerError> {
        let field = self.field();
        let (definition, closed) = match delta.model {
            Model::Pearl => {
                let ones = vec![field.one(); c.len()];
                let xi_beta = character_value(field, &self.action.xi, &beta.boundary);
                let def = deformed_bracket_insertion(&self.action.algebra, delta, c, |cc| {
                    field.mul(&binomial_form(field, &ones, beta, cc), &xi_beta)
                });
                (def, deformed_bracket_closed(self.action, beta, c)?)
            }
            Model::DeRham => {
                let axes: Vec<usize> = c.iter().enumerate().flat_map(|(j, &k)| std::iter::repeat_n(j, k as usize)).collect();
                (deformed_l_insertion(self.action, delta, beta, &axes)?, deformed_l_closed(self.action, beta, &axes)?)
            }
        };
        Ok(self.check(format!("deformed operation for boundary {:?}, c = {c:?}", beta.boundary), definition, closed))
    }

    fn weighted_sum(
        &self,
        delta: &BoundingCochain<F::Elem>,
        c: &[u32],
        mut factor: impl FnMut(usize) -> i64,
    ) -> Result<(Vec<F::Elem>, bool), FloerError> {
        let alg = &self.action.algebra;
        let mut total = alg.zero();
        let mut agree = true;
        for (i, beta) in self.w.classes().iter().enumerate() {
            let k = factor(i);
            if k == 0 {
                continue;
            }
            let r = self.deformed(delta, beta, c)?;
            agree &= r.agree;
            let w = self.field().scale_int(&self.weights[i], k);
            total = alg.add(&total, &alg.scale(&r.definition, &w));
        }
        Ok((total, agree))
    }

    /// The `S`-potential `sum_beta T^{omega(beta)} m^delta_beta[0]`, checked
    /// against `rho-hat(W)`.
    pub fn weak_bounding_check(&self, delta: &BoundingCochain<F::Elem>) -> Result<Checked<Vec<F::Elem>>, FloerError> {
        let zero = vec![0; self.action.rank()];
        let (definition, agree) = self.weighted_sum(delta, &zero, |_| 1)?;
        let closed = self.action.rho_hat(&self.polynomial())?;
        let mut out = self.check("S-potential".into(), definition, closed);
        out.agree &= agree;
        Ok(out)
    }

    /// `m_1^delta(b_j)` for every `j`, each checked against its closed form:
    /// `rho-hat(dW/dx_j)` in the de Rham model, `(xi_j / rho_j) rho-hat(dW/dx_j)`
    /// in the pearl model.
    pub fn deformed_differential(&self, delta: &BoundingCochain<F::Elem>) -> Result<Vec<Checked<Vec<F::Elem>>>, FloerError> {
        let field = self.field();
        let alg = &self.action.algebra;
        let w = self.polynomial();
        (0..self.action.rank())
            .map(|j| {
                let mut c = vec![0; self.action.rank()];
                c[j] = 1;
                let (definition, agree) = self.weighted_sum(delta, &c, |_| 1)?;
                let dw = self.action.rho_hat(&groupring::log_derivative(field, &w, j).expect("axis in range"))?;
                let closed = match delta.model {
                    Model::DeRham => dw,
                    Model::Pearl => {
                        let ratio = alg.scale(&alg.inverse(&self.action.rho[j])?, &self.action.xi[j]);
                        alg.mul(&ratio, &dw)
                    }
                };
                let mut out = self.check(format!("m_1 on b_{}", j + 1), definition, closed);
                out.agree &= agree;
                Ok(out)
            })
            .collect()
    }

    /// Like [`Self::deformed_differential`] but fails unless every value vanishes.
    pub fn require_zero_differential(&self, delta: &BoundingCochain<F::Elem>) -> Result<(), FloerError> {
        let alg = &self.action.algebra;
        for (j, d) in self.deformed_differential(delta)?.iter().enumerate() {
            if !d.agree {
                return Err(FloerError::Mismatch {
                    what: format!("m_1 on b_{}", j + 1),
                    definition: alg.format(&d.definition),
                    closed: alg.format(&d.closed),
                });
            }
            if !alg.is_zero(&d.definition) {
                return Err(FloerError::NonzeroDifferential { index: j + 1, value: alg.format(&d.definition) });
            }
        }
        Ok(())
    }

    /// `sum_k CO^k(H_j)(delta, ..., delta) = sum_beta <H_j, beta> T^{omega(beta)} m^delta_beta[0]`.
    pub fn co_evaluate(&self, delta: &BoundingCochain<F::Elem>, divisor: usize) -> Result<Checked<Vec<F::Elem>>, FloerError> {
        let pairings = self.w.pairings(divisor)?;
        let zero = vec![0; self.action.rank()];
        let (definition, agree) = self.weighted_sum(delta, &zero, |i| pairings[i])?;
        let ks = self.w.classes().iter().zip(&self.weights).zip(&pairings).fold(
            Laurent::zero(self.w.rank()),
            |acc, ((b, t), &k)| {
                let f = self.field();
                let term = groupring::scale(f, &w_beta(f, b), &f.scale_int(t, k));
                groupring::add(f, &acc, &term).expect("same rank")
            },
        );
        let closed = self.action.rho_hat(&ks)?;
        let mut out = self.check(format!("CO(H_{})", divisor + 1), definition, closed);
        out.agree &= agree;
        Ok(out)
    }
}

/// Comparison of `HH(delta)^0 CO(H_j)` with `pi_Q(ks(H_j))` for every divisor.
#[derive(Debug, Clone)]
pub struct CoComparison<E> {
    pub values: Vec<Vec<E>>,
    pub projections: Vec<Vec<E>>,
    pub agree: bool,
    /// Rank of the subalgebra of `Q` generated by the values.
    pub rank: usize,
}

pub fn co_against_projection<F: Field>(
    model: &FloerModel<'_, F>,
    delta: &BoundingCochain<F::Elem>,
    quotient: &QuotientAlgebra<F>,
    summand: &Summand<F>,
) -> Result<CoComparison<F::Elem>, FloerError> {
    let alg = &model.action.algebra;
    let mut values = Vec::new();
    let mut projections = Vec::new();
    let mut agree = true;
    for j in 0..model.w.basic_count() {
        let v = model.co_evaluate(delta, j)?;
        let p = summand.project(quotient, &quotient.ks_class(model.w, j)?);
        agree &= v.agree && alg.equal(&v.definition, &p);
        values.push(v.definition);
        projections.push(p);
    }
    let rank = generated_rank(alg, &values);
    Ok(CoComparison { values, projections, agree, rank })
}

/// Dimension of the unital subalgebra generated by `gens`. `CO` is a ring map
/// and the divisor classes generate, so this is the rank of `HH(delta)^0 CO`
/// restricted to `Q`.
pub fn generated_rank<F: Field>(alg: &FiniteAlgebra<F>, gens: &[Vec<F::Elem>]) -> usize {
    let field = alg.field();
    let mut span = vec![alg.unit()];
    let mut frontier = span.clone();
    while !frontier.is_empty() {
        let mut next = Vec::new();
        for f in &frontier {
            for g in gens {
                let mut trial = span.clone();
                trial.push(alg.mul(f, g));
                if linalg::independent_subset(field, alg.dim(), &trial).len() == trial.len() {
                    span = trial;
                    next.push(span.last().expect("just pushed").clone());
                }
            }
        }
        frontier = next;
    }
    span.len()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jacobian::{eigen, DEFAULT_STEP_BUDGET};
    use crate::scalar::{Scalar, ScalarField};
    use crate::toric::{fans, Mode};

    fn r(n: i64) -> Rat {
        Rat::from_integer(n)
    }

    fn line_classes(f: &ScalarField) -> Superpotential {
        Superpotential::build(&fans::projective_line(r(1), r(1)), f, Mode::Monotone, vec![]).unwrap()
    }

    #[test]
    fn binomials_with_negative_tops() {
        assert_eq!(binomial(1, 2), 0);
        assert_eq!(binomial(-1, 2), 1);
        assert_eq!(binomial(-1, 3), -1);
        assert_eq!(binomial(-2, 2), 3);
        assert_eq!(binomial(5, 0), 1);
    }

    #[test]
    fn de_rham_brackets_on_the_line() {
        let f = ScalarField::Rational;
        let w = line_classes(&f);
        let xi = vec![f.one()];
        let b1 = vec![vec![f.one()]];
        let (plus, minus) = (&w.classes()[0], &w.classes()[1]);
        assert_eq!(lk_beta(&f, &xi, plus, &b1), f.one());
        assert_eq!(lk_beta(&f, &xi, minus, &b1), f.from_int(-1));
        assert_eq!(lk_beta(&f, &xi, minus, &[b1[0].clone(), b1[0].clone()]), f.one());
        assert_eq!(derivative_form(&f, &xi, plus, &[0]), f.one());
        assert_eq!(derivative_form(&f, &xi, minus, &[0, 0]), f.one());
    }

    #[test]
    fn binomial_brackets() {
        let f = ScalarField::Rational;
        let w = line_classes(&f);
        let xi = vec![f.from_int(3)];
        let (plus, minus) = (&w.classes()[0], &w.classes()[1]);
        assert_eq!(binomial_form(&f, &xi, plus, &[1]), f.from_int(3));
        assert_eq!(binomial_form(&f, &xi, plus, &[2]), f.zero());
        assert_eq!(binomial_form(&f, &xi, minus, &[2]), f.inv(&f.from_int(3)).unwrap());
        for c in 0..6 {
            assert_eq!(y_derivative_form(&f, &xi, minus, &[c]), Some(binomial_form(&f, &xi, minus, &[c])));
        }
    }

    #[test]
    fn unshuffle_counts() {
        assert_eq!(unshuffles(&[2, 1]).len(), 3);
        assert_eq!(unshuffles(&[0, 0]), vec![Vec::<usize>::new()]);
        assert_eq!(unshuffles(&[2, 2]).len(), 6);
        assert_eq!(multiplicities(2, 2).len(), 6);
    }

    #[test]
    fn synthetic_dual_numbers() {
        let f = ScalarField::Prime(5);
        let s = crate::algebra::monomial_algebra(f.clone(), &[vec![0], vec![1]]);
        let eps = s.basis(1);
        let rho = s.add(&s.unit(), &eps);
        let action = Action::new(s.clone(), vec![f.one()], vec![rho]).unwrap();
        let delta = BoundingCochain::for_action(&action, Model::Pearl).unwrap();
        let minus = DiscClass { area: r(1), boundary: vec![-1], coeff: Scalar::Residue(1), pairing: None };
        let w = line_classes(&f);
        let model = FloerModel::new(&w, &action).unwrap();
        let out = model.deformed(&delta, &minus, &[1]).unwrap();
        assert!(out.agree);
        // -(1 + eps)^{-2} = -1 + 2 eps
        assert_eq!(out.closed, vec![f.from_int(-1), f.from_int(2)]);
    }

    #[test]
    fn line_over_f5() {
        let f = ScalarField::Prime(5);
        let w = line_classes(&f);
        let q = QuotientAlgebra::new(&f, &w, DEFAULT_STEP_BUDGET).unwrap();
        let mut potentials = Vec::new();
        for s in eigen::decompose(&q).unwrap() {
            let action = Action::from_summand(&s);
            let model = FloerModel::new(&w, &action).unwrap();
            let delta = BoundingCochain::for_action(&action, Model::Pearl).unwrap();
            let pot = model.weak_bounding_check(&delta).unwrap();
            assert!(pot.agree);
            potentials.push(f.format(&pot.definition[0]));
            model.require_zero_differential(&delta).unwrap();
            let co = co_against_projection(&model, &delta, &q, &s).unwrap();
            assert!(co.agree);
            assert_eq!(co.rank, s.dim());
        }
        potentials.sort();
        assert_eq!(potentials, vec!["2", "3"]);
    }

    #[test]
    fn line_over_f2_nilpotent_summand() {
        let f = ScalarField::Prime(2);
        let w = line_classes(&f);
        let q = QuotientAlgebra::new(&f, &w, DEFAULT_STEP_BUDGET).unwrap();
        let s = eigen::decompose(&q).unwrap().remove(0);
        assert_eq!(s.dim(), 2);
        let action = Action::from_summand(&s);
        let model = FloerModel::new(&w, &action).unwrap();
        let delta = BoundingCochain::for_action(&action, Model::Pearl).unwrap();
        assert!(!s.algebra.is_zero(&delta.coefficients[0]));
        let pot = model.weak_bounding_check(&delta).unwrap();
        assert!(pot.agree && s.algebra.is_zero(&pot.definition));
        let beta1 = model.deformed(&delta, &w.classes()[0], &[0]).unwrap();
        assert!(s.algebra.equal(&beta1.definition, &s.rho[0]));
        model.require_zero_differential(&delta).unwrap();
        let co = co_against_projection(&model, &delta, &q, &s).unwrap();
        assert!(co.agree);
        assert_eq!(co.rank, 2);
    }

    #[test]
    fn invalid_action_has_nonzero_differential() {
        let f = ScalarField::Prime(5);
        let w = line_classes(&f);
        let s = crate::algebra::monomial_algebra(f.clone(), &[vec![0]]);
        let action = Action::new(s, vec![f.from_int(2)], vec![vec![f.from_int(2)]]).unwrap();
        let model = FloerModel::new(&w, &action).unwrap();
        let delta = BoundingCochain::for_action(&action, Model::Pearl).unwrap();
        assert_eq!(model.deformed_differential(&delta).unwrap()[0].definition, vec![f.from_int(4)]);
        assert!(matches!(
            model.require_zero_differential(&delta),
            Err(FloerError::NonzeroDifferential { index: 1, .. })
        ));
    }

    #[test]
    fn theta_path_needs_characteristic_zero() {
        let f = ScalarField::Prime(3);
        let s = crate::algebra::monomial_algebra(f.clone(), &[vec![0]]);
        let action = Action::new(s, vec![f.one()], vec![vec![f.one()]]).unwrap();
        assert!(matches!(BoundingCochain::for_action(&action, Model::DeRham), Err(FloerError::Characteristic(3))));
    }

    #[test]
    fn plane_over_f7() {
        let f = ScalarField::Prime(7);
        let w = Superpotential::build(&fans::projective_plane([r(1), r(1), r(1)]), &f, Mode::Monotone, vec![]).unwrap();
        let q = QuotientAlgebra::new(&f, &w, DEFAULT_STEP_BUDGET).unwrap();
        let mut potentials = Vec::new();
        for s in eigen::decompose(&q).unwrap() {
            let action = Action::from_summand(&s);
            let model = FloerModel::new(&w, &action).unwrap();
            let delta = BoundingCochain::for_action(&action, Model::Pearl).unwrap();
            let pot = model.weak_bounding_check(&delta).unwrap();
            assert!(pot.agree);
            potentials.push(f.format(&pot.definition[0]));
            model.require_zero_differential(&delta).unwrap();
            let co = co_against_projection(&model, &delta, &q, &s).unwrap();
            assert!(co.agree && co.rank == 1);
        }
        potentials.sort();
        assert_eq!(potentials, vec!["3", "5", "6"]);
    }

    #[test]
    fn novikov_line_in_both_models() {
        let base = ScalarField::Rational;
        let nov = crate::scalar::NovikovField::new(base.clone(), r(5));
        let w = Superpotential::build(&fans::projective_line(r(1), r(2)), &base, Mode::Novikov, vec![]).unwrap();
        let q = QuotientAlgebra::new(&nov, &w, DEFAULT_STEP_BUDGET).unwrap();
        for s in eigen::decompose(&q).unwrap() {
            let action = Action::from_summand(&s);
            let model = FloerModel::new(&w, &action).unwrap();
            for m in Model::available(0) {
                let delta = BoundingCochain::for_action(&action, m).unwrap();
                assert!(model.weak_bounding_check(&delta).unwrap().agree);
                model.require_zero_differential(&delta).unwrap();
                let co = co_against_projection(&model, &delta, &q, &s).unwrap();
                assert!(co.agree && co.rank == s.dim());
            }
        }
    }
}
