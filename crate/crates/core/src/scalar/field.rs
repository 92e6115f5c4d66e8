use std::fmt;

use super::{Rat, Scalar, ScalarError, ScalarField};

/// A coefficient field viewed as a ring object: elements are plain values and
/// every operation goes through the field, so runtime-chosen fields (a prime,
/// an extension degree, a Novikov precision) need no type-level encoding.
///
/// Every field here also knows how to interpret the Novikov variable `T`.
/// Exact scalar fields specialise `T` to `1` (the monotone setting) and carry
/// the trivial valuation; [`super::NovikovField`] keeps `T` formal.
pub trait Field: Clone + fmt::Debug {
    type Elem: Clone + fmt::Debug + PartialEq;

    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn from_int(&self, n: i64) -> Self::Elem;
    /// Embeds an element of the underlying exact field.
    fn from_scalar(&self, s: &Scalar) -> Self::Elem;

    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn neg(&self, a: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    /// Multiplicative inverse; `None` exactly when `a` is zero.
    fn inv(&self, a: &Self::Elem) -> Option<Self::Elem>;
    /// Zero test. For truncated series this means "zero modulo the known precision".
    fn is_zero(&self, a: &Self::Elem) -> bool;

    fn characteristic(&self) -> u64;
    /// The exact field the coefficients live in.
    fn base(&self) -> &ScalarField;

    /// `T^e`.
    fn t_power(&self, e: Rat) -> Self::Elem;
    /// Leading exponent in `T`; `None` for zero.
    fn valuation(&self, a: &Self::Elem) -> Option<Rat>;
    /// Coefficient of the leading `T`-power.
    fn leading_coefficient(&self, a: &Self::Elem) -> Option<Scalar>;

    /// Roots in this field together with multiplicities, for a polynomial given
    /// by its coefficients (constant term first). Fails when the polynomial does
    /// not split into linear factors.
    fn split_roots(&self, poly: &[Self::Elem]) -> Result<Vec<(Self::Elem, usize)>, ScalarError>;

    /// Whether `candidate` is a numerically preferable pivot to `current`.
    fn better_pivot(&self, _candidate: &Self::Elem, _current: &Self::Elem) -> bool {
        false
    }

    fn format(&self, a: &Self::Elem) -> String;

    /// Canonical text form, inverted by [`Field::decode`].
    fn encode(&self, a: &Self::Elem) -> String;
    fn decode(&self, s: &str) -> Option<Self::Elem>;

    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        self.add(a, &self.neg(b))
    }

    fn div(&self, a: &Self::Elem, b: &Self::Elem) -> Option<Self::Elem> {
        self.inv(b).map(|bi| self.mul(a, &bi))
    }

    fn equal(&self, a: &Self::Elem, b: &Self::Elem) -> bool {
        self.is_zero(&self.sub(a, b))
    }

    fn is_one(&self, a: &Self::Elem) -> bool {
        self.equal(a, &self.one())
    }

    /// Integer power; negative exponents invert first.
    fn pow(&self, a: &Self::Elem, e: i64) -> Option<Self::Elem> {
        let base = if e < 0 { self.inv(a)? } else { a.clone() };
        Some(self.pow_u(&base, e.unsigned_abs()))
    }

    fn pow_u(&self, a: &Self::Elem, mut e: u64) -> Self::Elem {
        let mut acc = self.one();
        let mut sq = a.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &sq);
            }
            e >>= 1;
            if e > 0 {
                sq = self.mul(&sq, &sq);
            }
        }
        acc
    }

    fn scale_int(&self, a: &Self::Elem, n: i64) -> Self::Elem {
        self.mul(a, &self.from_int(n))
    }

    fn sum<'a, I>(&self, items: I) -> Self::Elem
    where
        I: IntoIterator<Item = &'a Self::Elem>,
        Self::Elem: 'a,
    {
        items
            .into_iter()
            .fold(self.zero(), |acc, x| self.add(&acc, x))
    }
}
