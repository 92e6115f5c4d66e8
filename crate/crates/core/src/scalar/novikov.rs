use std::cmp::Ordering;
use std::fmt;

use num_traits::{One, Signed, Zero};

use super::{Field, Rat, Scalar, ScalarError, ScalarField};
use crate::upoly;

/// Recursion guard for the Newton-Puiseux root search.
const MAX_PUISEUX_DEPTH: usize = 64;
const MAX_NEWTON_STEPS: usize = 64;

/// A truncated Novikov series `sum a_i T^{e_i}` with rational exponents.
///
/// Terms are sorted by strictly increasing exponent with nonzero coefficients.
/// `precision` is `None` for a series known exactly (a finite sum), and
/// `Some(E)` when the element is only known modulo `T^E`; all stored exponents
/// are then below `E`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Novikov {
    terms: Vec<(Rat, Scalar)>,
    precision: Option<Rat>,
}

fn min_opt(a: Option<Rat>, b: Option<Rat>) -> Option<Rat> {
    match (a, b) {
        (None, x) | (x, None) => x,
        (Some(x), Some(y)) => Some(x.min(y)),
    }
}

fn add_opt(a: Option<Rat>, b: Option<Rat>) -> Option<Rat> {
    match (a, b) {
        (Some(x), Some(y)) => Some(x + y),
        _ => None,
    }
}

impl Novikov {
    pub fn zero() -> Self {
        Novikov { terms: Vec::new(), precision: None }
    }

    /// Zero known only modulo `T^precision`.
    pub fn big_o(precision: Rat) -> Self {
        Novikov { terms: Vec::new(), precision: Some(precision) }
    }

    pub fn monomial(base: &ScalarField, coeff: Scalar, exponent: Rat) -> Self {
        Self::from_terms(base, vec![(exponent, coeff)], None)
    }

    pub fn constant(base: &ScalarField, coeff: Scalar) -> Self {
        Self::monomial(base, coeff, Rat::zero())
    }

    /// Normalises an arbitrary list of terms: sorts, merges equal exponents,
    /// drops zero coefficients and terms at or beyond the precision.
    pub fn from_terms(base: &ScalarField, mut terms: Vec<(Rat, Scalar)>, precision: Option<Rat>) -> Self {
        terms.sort_by(|a, b| a.0.cmp(&b.0));
        let mut merged: Vec<(Rat, Scalar)> = Vec::with_capacity(terms.len());
        for (e, c) in terms {
            if precision.is_some_and(|p| e >= p) {
                continue;
            }
            match merged.last_mut() {
                Some((le, lc)) if *le == e => *lc = base.add(lc, &c),
                _ => merged.push((e, c)),
            }
        }
        merged.retain(|(_, c)| !base.is_zero(c));
        Novikov { terms: merged, precision }
    }

    pub fn terms(&self) -> &[(Rat, Scalar)] {
        &self.terms
    }

    pub fn precision(&self) -> Option<Rat> {
        self.precision
    }

    pub fn is_exact(&self) -> bool {
        self.precision.is_none()
    }

    /// Leading exponent; `None` stands for `+infinity`.
    pub fn valuation(&self) -> Option<Rat> {
        self.terms.first().map(|t| t.0)
    }

    pub fn leading_coefficient(&self) -> Option<&Scalar> {
        self.terms.first().map(|t| &t.1)
    }

    /// Coefficient of `T^e` (zero if absent).
    pub fn coefficient(&self, base: &ScalarField, e: Rat) -> Scalar {
        self.terms
            .iter()
            .find(|t| t.0 == e)
            .map(|t| t.1.clone())
            .unwrap_or_else(|| base.zero())
    }

    /// Forgets everything from `T^e` onwards.
    pub fn truncate(&self, e: Rat) -> Self {
        let precision = min_opt(self.precision, Some(e));
        Novikov {
            terms: self.terms.iter().filter(|t| t.0 < e).cloned().collect(),
            precision,
        }
    }

    /// Multiplies by `T^e`.
    pub fn shift(&self, e: Rat) -> Self {
        Novikov {
            terms: self.terms.iter().map(|(x, c)| (x + e, c.clone())).collect(),
            precision: self.precision.map(|p| p + e),
        }
    }

    fn check(&self, base: &ScalarField) -> Result<(), ScalarError> {
        self.terms.iter().try_for_each(|(_, c)| base.check(c))
    }

    fn add_in(&self, base: &ScalarField, other: &Self) -> Self {
        let terms = self.terms.iter().chain(&other.terms).cloned().collect();
        Self::from_terms(base, terms, min_opt(self.precision, other.precision))
    }

    fn mul_in(&self, base: &ScalarField, other: &Self) -> Self {
        let precision = self.product_precision(other);
        let mut terms = Vec::with_capacity(self.terms.len() * other.terms.len());
        for (e1, c1) in &self.terms {
            for (e2, c2) in &other.terms {
                terms.push((e1 + e2, base.mul(c1, c2)));
            }
        }
        Self::from_terms(base, terms, precision)
    }

    /// `min(E_a + val(b), E_b + val(a))`, where the valuation of an inexact zero
    /// is its precision and an exact zero annihilates everything.
    fn product_precision(&self, other: &Self) -> Option<Rat> {
        let exact_zero = |x: &Self| x.terms.is_empty() && x.precision.is_none();
        if exact_zero(self) || exact_zero(other) {
            return None;
        }
        let lower = |x: &Self| x.valuation().or(x.precision);
        min_opt(
            add_opt(self.precision, lower(other)),
            add_opt(other.precision, lower(self)),
        )
    }
}

/// The Novikov field over an exact base field, with a working precision used
/// to truncate the infinite expansions produced by division.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NovikovField {
    base: ScalarField,
    precision: Rat,
}

impl NovikovField {
    pub fn new(base: ScalarField, precision: Rat) -> Self {
        NovikovField { base, precision }
    }

    /// Everything is computed modulo `T^precision`: terms at or beyond the
    /// working precision are dropped and the loss is recorded.
    fn clip(&self, x: Novikov) -> Novikov {
        if x.terms.last().is_some_and(|t| t.0 >= self.precision) {
            x.truncate(self.precision)
        } else {
            x
        }
    }

    pub fn working_precision(&self) -> Rat {
        self.precision
    }

    /// Product with a check that both factors are series over this base field.
    pub fn try_mul(&self, a: &Novikov, b: &Novikov) -> Result<Novikov, ScalarError> {
        a.check(&self.base)?;
        b.check(&self.base)?;
        Ok(self.mul(a, b))
    }

    /// Inverse with `a * result = 1 mod T^e`.
    pub fn invert_to(&self, a: &Novikov, e: Rat) -> Result<Novikov, ScalarError> {
        a.check(&self.base)?;
        let (v, lead) = match (a.valuation(), a.leading_coefficient()) {
            (Some(v), Some(c)) => (v, c.clone()),
            _ => return Err(ScalarError::DivisionByZero),
        };
        let lead_inv = self.base.inv(&lead).ok_or(ScalarError::DivisionByZero)?;
        if a.terms.len() == 1 && a.is_exact() {
            return Ok(Novikov::monomial(&self.base, lead_inv, -v));
        }
        // a = lead T^v (1 + u) with val(u) > 0; the result is known modulo T^target.
        let mut target = e - v;
        if let Some(p) = a.precision {
            target = target.min(p - v - v);
        }
        let relative = target + v;
        let normaliser = Novikov::monomial(&self.base, lead_inv.clone(), -v);
        let u = self
            .add(&self.mul(a, &normaliser), &self.neg(&self.one()))
            .truncate(relative);
        let mut sum = self.one().truncate(relative);
        let mut term = self.one();
        loop {
            term = self.neg(&self.mul(&term, &u)).truncate(relative);
            if term.terms.is_empty() {
                sum = self.add(&sum, &term);
                break;
            }
            sum = self.add(&sum, &term);
        }
        Ok(self.mul(&sum, &normaliser))
    }

    /// Whether `a` and `b` agree modulo `T^e`, given what is known about them.
    /// Returns `None` when the known precision is insufficient to decide.
    pub fn congruent(&self, a: &Novikov, b: &Novikov, e: Rat) -> Option<bool> {
        let d = self.sub(a, b);
        if d.terms.iter().any(|t| t.0 < e) {
            return Some(false);
        }
        match d.precision {
            Some(p) if p < e => None,
            _ => Some(true),
        }
    }

    fn newton_refine(&self, poly: &[Novikov], start: Novikov) -> Novikov {
        let dpoly = upoly::derivative(self, poly);
        let mut x = start;
        for _ in 0..MAX_NEWTON_STEPS {
            let value = upoly::eval(self, poly, &x);
            if value.terms.is_empty() {
                break;
            }
            let slope = upoly::eval(self, &dpoly, &x);
            let step = match self.div(&value, &slope) {
                Some(s) => s,
                None => break,
            };
            if step.terms.is_empty() {
                break;
            }
            x = self.sub(&x, &step).truncate(self.precision);
        }
        x
    }

    fn puiseux_roots(
        &self,
        poly: &[Novikov],
        positive_only: bool,
        depth: usize,
    ) -> Result<Vec<(Novikov, usize)>, ScalarError> {
        if depth > MAX_PUISEUX_DEPTH {
            return Err(ScalarError::PrecisionExhausted(
                "Newton-Puiseux recursion did not separate the roots".into(),
            ));
        }
        let poly = upoly::trim(self, poly.to_vec());
        let mut roots = Vec::new();
        let zeros = poly.iter().take_while(|c| self.is_zero(c)).count();
        if zeros > 0 {
            roots.push((self.zero_like(&poly), zeros));
        }
        let reduced = &poly[zeros..];
        if reduced.len() <= 1 {
            return Ok(roots);
        }
        let points: Vec<(usize, Rat)> = reduced
            .iter()
            .enumerate()
            .filter_map(|(i, c)| c.valuation().map(|v| (i, v)))
            .collect();
        for (start, end) in lower_hull(&points) {
            let (i0, v0) = points[start];
            let (i1, v1) = points[end];
            let slope = (v0 - v1) / Rat::from_integer((i1 - i0) as i64);
            if positive_only && slope <= Rat::zero() {
                continue;
            }
            // Leading-order polynomial on this edge, in z with x = z T^slope.
            let line = v0 + slope * Rat::from_integer(i0 as i64);
            let mut edge = vec![self.base.zero(); i1 - i0 + 1];
            for &(i, v) in &points {
                if i >= i0 && i <= i1 && v + slope * Rat::from_integer(i as i64) == line {
                    edge[i - i0] = reduced[i].leading_coefficient().unwrap().clone();
                }
            }
            let leading = self.base.split_roots(&edge).map_err(|e| match e {
                ScalarError::NotSplit { factor, field } => ScalarError::NotSplit {
                    factor: format!("{factor} (leading order of T^{slope} roots)"),
                    field,
                },
                other => other,
            })?;
            for (a, mult) in leading {
                let t_s = self.t_power(slope);
                let approx = self.mul(&Novikov::constant(&self.base, a.clone()), &t_s);
                if mult == 1 {
                    roots.push((self.newton_refine(&poly, approx), 1));
                    continue;
                }
                // x = T^slope (a + y) with val(y) > 0: refine at the next order.
                let scaled = upoly::scale_variable(self, &poly, &t_s);
                let shifted =
                    upoly::taylor_shift(self, &scaled, &Novikov::constant(&self.base, a.clone()));
                let inner = self.puiseux_roots(&shifted, true, depth + 1)?;
                let found: usize = inner.iter().map(|r| r.1).sum();
                if found != mult {
                    return Err(ScalarError::PrecisionExhausted(format!(
                        "expected {mult} roots near {}T^{slope}, found {found}",
                        self.base.format(&a)
                    )));
                }
                for (y, m) in inner {
                    let x = self.mul(&t_s, &self.add(&Novikov::constant(&self.base, a.clone()), &y));
                    roots.push((x, m));
                }
            }
        }
        Ok(roots)
    }

    fn zero_like(&self, poly: &[Novikov]) -> Novikov {
        match poly.first().and_then(|c| c.precision) {
            Some(_) => Novikov::big_o(self.precision),
            None => Novikov::zero(),
        }
    }
}

/// Edges of the lower convex hull of the Newton polygon, as index pairs into
/// `points` (sorted by abscissa).
fn lower_hull(points: &[(usize, Rat)]) -> Vec<(usize, usize)> {
    let mut hull: Vec<usize> = Vec::new();
    for k in 0..points.len() {
        while hull.len() >= 2 {
            let a = points[hull[hull.len() - 2]];
            let b = points[hull[hull.len() - 1]];
            let c = points[k];
            // Remove b when it lies on or above the segment a-c.
            let cross = (Rat::from_integer(b.0 as i64 - a.0 as i64)) * (c.1 - a.1)
                - (b.1 - a.1) * Rat::from_integer(c.0 as i64 - a.0 as i64);
            if cross <= Rat::zero() {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(k);
    }
    hull.windows(2).map(|w| (w[0], w[1])).collect()
}

impl Field for NovikovField {
    type Elem = Novikov;

    fn zero(&self) -> Novikov {
        Novikov::zero()
    }

    fn one(&self) -> Novikov {
        Novikov::constant(&self.base, self.base.one())
    }

    fn from_int(&self, n: i64) -> Novikov {
        Novikov::constant(&self.base, self.base.from_int(n))
    }

    fn from_scalar(&self, s: &Scalar) -> Novikov {
        Novikov::constant(&self.base, s.clone())
    }

    fn add(&self, a: &Novikov, b: &Novikov) -> Novikov {
        self.clip(a.add_in(&self.base, b))
    }

    fn neg(&self, a: &Novikov) -> Novikov {
        Novikov {
            terms: a.terms.iter().map(|(e, c)| (*e, self.base.neg(c))).collect(),
            precision: a.precision,
        }
    }

    fn mul(&self, a: &Novikov, b: &Novikov) -> Novikov {
        self.clip(a.mul_in(&self.base, b))
    }

    fn inv(&self, a: &Novikov) -> Option<Novikov> {
        self.invert_to(a, self.precision).ok()
    }

    fn is_zero(&self, a: &Novikov) -> bool {
        a.terms.is_empty()
    }

    fn characteristic(&self) -> u64 {
        self.base.characteristic()
    }

    fn base(&self) -> &ScalarField {
        &self.base
    }

    fn t_power(&self, e: Rat) -> Novikov {
        Novikov::monomial(&self.base, self.base.one(), e)
    }

    fn valuation(&self, a: &Novikov) -> Option<Rat> {
        a.valuation()
    }

    fn leading_coefficient(&self, a: &Novikov) -> Option<Scalar> {
        a.leading_coefficient().cloned()
    }

    fn split_roots(&self, poly: &[Novikov]) -> Result<Vec<(Novikov, usize)>, ScalarError> {
        let degree = upoly::degree(self, poly).unwrap_or(0);
        let roots = self.puiseux_roots(poly, false, 0)?;
        let found: usize = roots.iter().map(|r| r.1).sum();
        if found != degree {
            return Err(ScalarError::PrecisionExhausted(format!(
                "found {found} of {degree} roots"
            )));
        }
        Ok(roots)
    }

    fn better_pivot(&self, candidate: &Novikov, current: &Novikov) -> bool {
        match (candidate.valuation(), current.valuation()) {
            (Some(a), Some(b)) => a < b,
            (Some(_), None) => true,
            _ => false,
        }
    }

    /// `e:c` pairs separated by spaces, then `|E` when inexact.
    fn encode(&self, a: &Novikov) -> String {
        let mut out = a
            .terms
            .iter()
            .map(|(e, c)| format!("{e}:{}", self.base.encode(c)))
            .collect::<Vec<_>>()
            .join(" ");
        if let Some(p) = a.precision {
            out.push('|');
            out.push_str(&p.to_string());
        }
        out
    }

    fn decode(&self, s: &str) -> Option<Novikov> {
        let (body, precision) = match s.split_once('|') {
            Some((b, p)) => (b, Some(super::parse_rat(p).ok()?)),
            None => (s, None),
        };
        let terms = body
            .split_whitespace()
            .map(|t| {
                let (e, c) = t.split_once(':')?;
                Some((super::parse_rat(e).ok()?, self.base.decode(c)?))
            })
            .collect::<Option<Vec<_>>>()?;
        Some(Novikov::from_terms(&self.base, terms, precision))
    }

    fn format(&self, a: &Novikov) -> String {
        NovikovDisplay { field: &self.base, value: a }.to_string()
    }
}

struct NovikovDisplay<'a> {
    field: &'a ScalarField,
    value: &'a Novikov,
}

impl fmt::Display for NovikovDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        for (e, c) in &self.value.terms {
            let c = self.field.format(c);
            let part = match e.cmp(&Rat::zero()) {
                Ordering::Equal => c,
                _ if e.is_one() => format!("{c}T"),
                _ if e.is_negative() || !e.is_integer() => format!("{c}T^({e})"),
                _ => format!("{c}T^{e}"),
            };
            parts.push(part);
        }
        if let Some(p) = self.value.precision {
            parts.push(format!("O(T^{p})"));
        }
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", parts.join(" + "))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64, d: i64) -> Rat {
        Rat::new(n, d)
    }

    fn q() -> ScalarField {
        ScalarField::Rational
    }

    fn series(terms: &[(Rat, i64)], precision: Option<Rat>) -> Novikov {
        let base = q();
        Novikov::from_terms(
            &base,
            terms.iter().map(|(e, c)| (*e, base.from_int(*c))).collect(),
            precision,
        )
    }

    #[test]
    fn telescoping_product() {
        let field = NovikovField::new(q(), r(3, 1));
        let a = series(&[(r(0, 1), 1), (r(1, 1), 1)], Some(r(3, 1)));
        let b = series(&[(r(0, 1), 1), (r(1, 1), -1)], Some(r(3, 1)));
        let prod = field.mul(&a, &b);
        assert_eq!(prod, series(&[(r(0, 1), 1), (r(2, 1), -1)], Some(r(3, 1))));
    }

    #[test]
    fn half_powers_multiply() {
        let field = NovikovField::new(q(), r(10, 1));
        let a = series(&[(r(1, 2), 2)], None);
        let b = series(&[(r(1, 2), 3)], None);
        assert_eq!(field.mul(&a, &b), series(&[(r(1, 1), 6)], None));
    }

    #[test]
    fn valuation_of_leading_term() {
        assert_eq!(series(&[(r(3, 2), 1), (r(2, 1), 1)], None).valuation(), Some(r(3, 2)));
        assert_eq!(series(&[(r(2, 1), 3), (r(5, 1), 1)], None).valuation(), Some(r(2, 1)));
        assert_eq!(Novikov::zero().valuation(), None);
        assert_eq!(series(&[(r(0, 1), 5)], None).valuation(), Some(r(0, 1)));
    }

    #[test]
    fn geometric_inverse() {
        let field = NovikovField::new(q(), r(3, 1));
        let a = series(&[(r(0, 1), 1), (r(1, 1), 1)], None);
        let inv = field.invert_to(&a, r(3, 1)).unwrap();
        assert_eq!(inv, series(&[(r(0, 1), 1), (r(1, 1), -1), (r(2, 1), 1)], Some(r(3, 1))));
        let t_inv = field.invert_to(&series(&[(r(1, 1), 1)], None), r(3, 1)).unwrap();
        assert_eq!(t_inv, series(&[(r(-1, 1), 1)], None));
        assert!(matches!(
            field.invert_to(&Novikov::zero(), r(3, 1)),
            Err(ScalarError::DivisionByZero)
        ));
    }

    #[test]
    fn inverse_of_shifted_series_holds_to_precision() {
        let field = NovikovField::new(q(), r(5, 1));
        let a = series(&[(r(1, 2), 2), (r(3, 2), 1), (r(2, 1), -3)], None);
        let inv = field.invert_to(&a, r(5, 1)).unwrap();
        let prod = field.mul(&a, &inv);
        assert_eq!(field.congruent(&prod, &field.one(), r(5, 1)), Some(true));
    }

    #[test]
    fn mismatched_base_field_is_rejected() {
        let field = NovikovField::new(ScalarField::Prime(5), r(3, 1));
        let a = series(&[(r(0, 1), 1)], None);
        assert!(matches!(field.try_mul(&a, &a), Err(ScalarError::FieldMismatch { .. })));
    }

    #[test]
    fn puiseux_square_root_of_t() {
        let field = NovikovField::new(q(), r(5, 1));
        // x^2 - T
        let poly = vec![field.neg(&field.t_power(r(1, 1))), field.zero(), field.one()];
        let mut roots = field.split_roots(&poly).unwrap();
        roots.sort_by_key(|(x, _)| field.format(x));
        assert_eq!(roots.len(), 2);
        for (x, m) in &roots {
            assert_eq!(*m, 1);
            assert_eq!(x.valuation(), Some(r(1, 2)));
            assert!(field.is_zero(&upoly::eval(&field, &poly, x)));
        }
    }

    #[test]
    fn puiseux_lifts_perturbed_roots() {
        let field = NovikovField::new(q(), r(6, 1));
        // (x - 1 - T)(x + 2 + T^2) expanded
        let t = field.t_power(r(1, 1));
        let t2 = field.t_power(r(2, 1));
        let f1 = vec![field.neg(&field.add(&field.one(), &t)), field.one()];
        let f2 = vec![field.add(&field.from_int(2), &t2), field.one()];
        let poly = upoly::mul(&field, &f1, &f2);
        let roots = field.split_roots(&poly).unwrap();
        assert_eq!(roots.len(), 2);
        for (x, _) in &roots {
            let value = upoly::eval(&field, &poly, x);
            assert!(field.is_zero(&value) || value.valuation().unwrap() >= r(6, 1));
        }
    }

    #[test]
    fn non_split_leading_order_is_reported() {
        let field = NovikovField::new(q(), r(4, 1));
        // x^2 + T^2 has leading-order polynomial z^2 + 1
        let poly = vec![field.t_power(r(2, 1)), field.zero(), field.one()];
        assert!(matches!(field.split_roots(&poly), Err(ScalarError::NotSplit { .. })));
    }

    #[test]
    fn repeated_root_in_characteristic_two() {
        let base = ScalarField::Prime(2);
        let field = NovikovField::new(base, r(4, 1));
        // x^2 - T = (x - T^{1/2})^2 in characteristic 2
        let poly = vec![field.neg(&field.t_power(r(1, 1))), field.zero(), field.one()];
        let roots = field.split_roots(&poly).unwrap();
        assert_eq!(roots.len(), 1);
        assert_eq!(roots[0].1, 2);
        assert_eq!(roots[0].0.valuation(), Some(r(1, 2)));
    }
}
