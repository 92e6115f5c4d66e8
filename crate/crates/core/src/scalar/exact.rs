use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::{Field, Rat, ScalarError};
use crate::upoly;

/// Largest field order we are willing to enumerate exhaustively.
pub const MAX_ENUMERABLE_ORDER: u64 = 1 << 20;

/// An element of one of the exact coefficient fields.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Scalar {
    Rational(BigRational),
    /// Residue in `0..p`.
    Residue(u64),
    /// Coordinates in the power basis `1, a, a^2, ...` of `F_p[a]/(f)`.
    Galois(Vec<u64>),
}

/// `F_p[a]/(f)` for a fixed monic irreducible `f` of degree `degree`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GaloisField {
    p: u64,
    degree: usize,
    /// Monic modulus, constant term first, length `degree + 1`.
    modulus: Vec<u64>,
}

impl GaloisField {
    /// Builds `F_{p^k}` using the lexicographically smallest monic irreducible
    /// polynomial of degree `k` (compared from the constant term upwards).
    pub fn new(p: u64, degree: usize) -> Result<Self, ScalarError> {
        if !is_prime(p) {
            return Err(ScalarError::InvalidField(format!("{p} is not prime")));
        }
        if degree < 2 {
            return Err(ScalarError::InvalidField(format!(
                "extension degree must be at least 2, got {degree}"
            )));
        }
        let order = checked_order(p, degree)?;
        for index in 0..order {
            let mut modulus = digits(index, p, degree);
            modulus.push(1);
            if is_irreducible_mod_p(&modulus, p) {
                return Ok(GaloisField { p, degree, modulus });
            }
        }
        Err(ScalarError::InvalidField(format!(
            "no irreducible polynomial of degree {degree} over F_{p}"
        )))
    }

    pub fn with_modulus(p: u64, modulus: Vec<u64>) -> Result<Self, ScalarError> {
        if !is_prime(p) {
            return Err(ScalarError::InvalidField(format!("{p} is not prime")));
        }
        let degree = modulus.len().saturating_sub(1);
        if degree < 2 || modulus[degree] != 1 || !is_irreducible_mod_p(&modulus, p) {
            return Err(ScalarError::InvalidField(format!(
                "modulus {modulus:?} is not monic irreducible over F_{p}"
            )));
        }
        checked_order(p, degree)?;
        Ok(GaloisField { p, degree, modulus })
    }

    pub fn prime(&self) -> u64 {
        self.p
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn modulus(&self) -> &[u64] {
        &self.modulus
    }

    pub fn order(&self) -> u64 {
        self.p.pow(self.degree as u32)
    }

    fn mul(&self, a: &[u64], b: &[u64]) -> Vec<u64> {
        let p = self.p as u128;
        let k = self.degree;
        let mut prod = vec![0u128; 2 * k - 1];
        for (i, &x) in a.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in b.iter().enumerate() {
                prod[i + j] = (prod[i + j] + x as u128 * y as u128) % p;
            }
        }
        for top in (k..prod.len()).rev() {
            let c = prod[top];
            if c == 0 {
                continue;
            }
            prod[top] = 0;
            for (i, &m) in self.modulus[..k].iter().enumerate() {
                let idx = top - k + i;
                prod[idx] = (prod[idx] + (p - c) * m as u128) % p;
            }
        }
        prod.truncate(k);
        prod.into_iter().map(|x| x as u64).collect()
    }

    fn element(&self, index: u64) -> Vec<u64> {
        digits(index, self.p, self.degree)
    }

    pub fn encode(&self, a: &[u64]) -> u64 {
        a.iter().rev().fold(0, |acc, &d| acc * self.p + d)
    }
}

fn checked_order(p: u64, degree: usize) -> Result<u64, ScalarError> {
    let order = (p as u128).checked_pow(degree as u32).unwrap_or(u128::MAX);
    if order > MAX_ENUMERABLE_ORDER as u128 {
        return Err(ScalarError::InvalidField(format!(
            "F_{p}^{degree} is too large to enumerate"
        )));
    }
    Ok(order as u64)
}

fn digits(mut index: u64, p: u64, len: usize) -> Vec<u64> {
    let mut out = Vec::with_capacity(len);
    for _ in 0..len {
        out.push(index % p);
        index /= p;
    }
    out
}

pub(crate) fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= p {
        if p % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

fn is_irreducible_mod_p(f: &[u64], p: u64) -> bool {
    let field = ScalarField::Prime(p);
    let fp: Vec<Scalar> = f.iter().map(|&c| Scalar::Residue(c % p)).collect();
    let deg = f.len() - 1;
    for d in 1..=deg / 2 {
        for index in 0..p.pow(d as u32) {
            let mut g: Vec<Scalar> = digits(index, p, d).into_iter().map(Scalar::Residue).collect();
            g.push(Scalar::Residue(1));
            let (_, r) = upoly::div_rem(&field, &fp, &g);
            if r.is_empty() {
                return false;
            }
        }
    }
    true
}

/// One of the exact coefficient fields: `Q`, `F_p`, or `F_{p^k}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ScalarField {
    Rational,
    Prime(u64),
    Galois(Arc<GaloisField>),
}

impl ScalarField {
    pub fn prime(p: u64) -> Result<Self, ScalarError> {
        if is_prime(p) {
            Ok(ScalarField::Prime(p))
        } else {
            Err(ScalarError::InvalidField(format!("{p} is not prime")))
        }
    }

    /// `F_{p^k}`; degree one gives the prime field.
    pub fn finite(p: u64, degree: usize) -> Result<Self, ScalarError> {
        match degree {
            0 => Err(ScalarError::InvalidField("extension degree 0".into())),
            1 => Self::prime(p),
            k => Ok(ScalarField::Galois(Arc::new(GaloisField::new(p, k)?))),
        }
    }

    pub fn rational(&self, q: BigRational) -> Scalar {
        debug_assert!(matches!(self, ScalarField::Rational));
        Scalar::Rational(q)
    }

    /// Whether `s` is a well-formed element of this field.
    pub fn contains(&self, s: &Scalar) -> bool {
        match (self, s) {
            (ScalarField::Rational, Scalar::Rational(_)) => true,
            (ScalarField::Prime(p), Scalar::Residue(v)) => v < p,
            (ScalarField::Galois(g), Scalar::Galois(v)) => {
                v.len() == g.degree && v.iter().all(|c| *c < g.p)
            }
            _ => false,
        }
    }

    pub fn check(&self, s: &Scalar) -> Result<(), ScalarError> {
        if self.contains(s) {
            Ok(())
        } else {
            Err(ScalarError::FieldMismatch {
                expected: self.to_string(),
                found: format!("{s:?}"),
            })
        }
    }

    /// Number of elements, if finite.
    pub fn order(&self) -> Option<u64> {
        match self {
            ScalarField::Rational => None,
            ScalarField::Prime(p) => Some(*p),
            ScalarField::Galois(g) => Some(g.order()),
        }
    }

    /// All elements of a finite field, in integer-encoding order.
    pub fn elements(&self) -> Option<Vec<Scalar>> {
        match self {
            ScalarField::Rational => None,
            ScalarField::Prime(p) => Some((0..*p).map(Scalar::Residue).collect()),
            ScalarField::Galois(g) => {
                Some((0..g.order()).map(|i| Scalar::Galois(g.element(i))).collect())
            }
        }
    }

    /// Decodes the integer literal convention: residues mod `p`, and base-`p`
    /// digits for extension fields.
    pub fn from_encoded(&self, n: i64) -> Scalar {
        match self {
            ScalarField::Rational => Scalar::Rational(BigRational::from_integer(n.into())),
            ScalarField::Prime(_) => self.from_int(n),
            ScalarField::Galois(g) => {
                let order = g.order() as i64;
                Scalar::Galois(g.element(n.rem_euclid(order) as u64))
            }
        }
    }

    pub fn from_rational(&self, q: &BigRational) -> Result<Scalar, ScalarError> {
        let num = self.from_bigint(q.numer());
        let den = self.from_bigint(q.denom());
        self.div(&num, &den).ok_or(ScalarError::DivisionByZero)
    }

    fn from_bigint(&self, n: &BigInt) -> Scalar {
        match self {
            ScalarField::Rational => Scalar::Rational(BigRational::from_integer(n.clone())),
            ScalarField::Prime(p) => Scalar::Residue(bigint_mod(n, *p)),
            ScalarField::Galois(g) => {
                let mut v = vec![0; g.degree];
                v[0] = bigint_mod(n, g.p);
                Scalar::Galois(v)
            }
        }
    }

    fn rational_roots(&self, poly: &[Scalar]) -> Result<Vec<(Scalar, usize)>, ScalarError> {
        let mut remaining = upoly::trim(self, poly.to_vec());
        let mut roots = Vec::new();
        let zero_mult = remaining.iter().take_while(|c| self.is_zero(c)).count();
        if zero_mult > 0 {
            roots.push((self.zero(), zero_mult));
            remaining.drain(..zero_mult);
        }
        if remaining.len() > 1 {
            let ints = integer_coefficients(&remaining);
            let lead = ints.last().unwrap().abs();
            let constant = ints[0].abs();
            let mut candidates = Vec::new();
            for num in divisors(&constant)? {
                for den in divisors(&lead)? {
                    let q = BigRational::new(num.clone(), den);
                    candidates.push(q.clone());
                    candidates.push(-q);
                }
            }
            candidates.sort();
            candidates.dedup();
            for q in candidates {
                let root = Scalar::Rational(q);
                let mult = upoly::strip_root(self, &mut remaining, &root);
                if mult > 0 {
                    roots.push((root, mult));
                }
                if remaining.len() <= 1 {
                    break;
                }
            }
        }
        if remaining.len() > 1 {
            return Err(ScalarError::NotSplit {
                factor: upoly::format(self, &remaining, "x"),
                field: self.to_string(),
            });
        }
        Ok(roots)
    }

    fn search_roots(&self, poly: &[Scalar]) -> Result<Vec<(Scalar, usize)>, ScalarError> {
        let mut remaining = upoly::trim(self, poly.to_vec());
        let mut roots = Vec::new();
        for candidate in self.elements().expect("finite field") {
            if remaining.len() <= 1 {
                break;
            }
            let mult = upoly::strip_root(self, &mut remaining, &candidate);
            if mult > 0 {
                roots.push((candidate, mult));
            }
        }
        if remaining.len() > 1 {
            return Err(ScalarError::NotSplit {
                factor: upoly::format(self, &remaining, "x"),
                field: self.to_string(),
            });
        }
        Ok(roots)
    }
}

fn bigint_mod(n: &BigInt, p: u64) -> u64 {
    n.mod_floor(&BigInt::from(p)).to_u64().expect("residue fits")
}

fn integer_coefficients(poly: &[Scalar]) -> Vec<BigInt> {
    let rats: Vec<&BigRational> = poly
        .iter()
        .map(|c| match c {
            Scalar::Rational(q) => q,
            _ => unreachable!("rational field"),
        })
        .collect();
    let lcm = rats
        .iter()
        .fold(BigInt::one(), |acc, q| acc.lcm(q.denom()));
    rats.iter()
        .map(|q| (*q * BigRational::from_integer(lcm.clone())).to_integer())
        .collect()
}

fn divisors(n: &BigInt) -> Result<Vec<BigInt>, ScalarError> {
    let n = n.abs();
    let small = n.to_u64().filter(|v| *v <= 1_000_000_000_000).ok_or_else(|| {
        ScalarError::InvalidField(format!("rational root search: coefficient {n} too large"))
    })?;
    let mut out = Vec::new();
    let mut d = 1u64;
    while d * d <= small {
        if small % d == 0 {
            out.push(BigInt::from(d));
            if d * d != small {
                out.push(BigInt::from(small / d));
            }
        }
        d += 1;
    }
    Ok(out)
}

impl fmt::Display for ScalarField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ScalarField::Rational => write!(f, "Q"),
            ScalarField::Prime(p) => write!(f, "F_{p}"),
            ScalarField::Galois(g) => write!(f, "F_{}^{}", g.p, g.degree),
        }
    }
}

impl Field for ScalarField {
    type Elem = Scalar;

    fn zero(&self) -> Scalar {
        self.from_int(0)
    }

    fn one(&self) -> Scalar {
        self.from_int(1)
    }

    fn from_int(&self, n: i64) -> Scalar {
        match self {
            ScalarField::Rational => Scalar::Rational(BigRational::from_integer(n.into())),
            ScalarField::Prime(p) => Scalar::Residue(n.rem_euclid(*p as i64) as u64),
            ScalarField::Galois(g) => {
                let mut v = vec![0; g.degree];
                v[0] = n.rem_euclid(g.p as i64) as u64;
                Scalar::Galois(v)
            }
        }
    }

    fn from_scalar(&self, s: &Scalar) -> Scalar {
        debug_assert!(self.contains(s), "{s:?} is not in {self}");
        s.clone()
    }

    fn add(&self, a: &Scalar, b: &Scalar) -> Scalar {
        match (self, a, b) {
            (ScalarField::Rational, Scalar::Rational(x), Scalar::Rational(y)) => {
                Scalar::Rational(x + y)
            }
            (ScalarField::Prime(p), Scalar::Residue(x), Scalar::Residue(y)) => {
                Scalar::Residue((x + y) % p)
            }
            (ScalarField::Galois(g), Scalar::Galois(x), Scalar::Galois(y)) => {
                Scalar::Galois(x.iter().zip(y).map(|(a, b)| (a + b) % g.p).collect())
            }
            _ => panic!("field mismatch: {a:?} + {b:?} in {self}"),
        }
    }

    fn neg(&self, a: &Scalar) -> Scalar {
        match (self, a) {
            (ScalarField::Rational, Scalar::Rational(x)) => Scalar::Rational(-x),
            (ScalarField::Prime(p), Scalar::Residue(x)) => Scalar::Residue((p - x) % p),
            (ScalarField::Galois(g), Scalar::Galois(x)) => {
                Scalar::Galois(x.iter().map(|a| (g.p - a) % g.p).collect())
            }
            _ => panic!("field mismatch: -{a:?} in {self}"),
        }
    }

    fn mul(&self, a: &Scalar, b: &Scalar) -> Scalar {
        match (self, a, b) {
            (ScalarField::Rational, Scalar::Rational(x), Scalar::Rational(y)) => {
                Scalar::Rational(x * y)
            }
            (ScalarField::Prime(p), Scalar::Residue(x), Scalar::Residue(y)) => {
                Scalar::Residue(((*x as u128 * *y as u128) % *p as u128) as u64)
            }
            (ScalarField::Galois(g), Scalar::Galois(x), Scalar::Galois(y)) => {
                Scalar::Galois(g.mul(x, y))
            }
            _ => panic!("field mismatch: {a:?} * {b:?} in {self}"),
        }
    }

    fn inv(&self, a: &Scalar) -> Option<Scalar> {
        if self.is_zero(a) {
            return None;
        }
        Some(match (self, a) {
            (ScalarField::Rational, Scalar::Rational(x)) => Scalar::Rational(x.recip()),
            (ScalarField::Prime(p), _) => self.pow_u(a, p - 2),
            (ScalarField::Galois(g), _) => self.pow_u(a, g.order() - 2),
            _ => panic!("field mismatch: {a:?}^-1 in {self}"),
        })
    }

    fn is_zero(&self, a: &Scalar) -> bool {
        match a {
            Scalar::Rational(x) => x.is_zero(),
            Scalar::Residue(x) => *x == 0,
            Scalar::Galois(x) => x.iter().all(|c| *c == 0),
        }
    }

    fn characteristic(&self) -> u64 {
        match self {
            ScalarField::Rational => 0,
            ScalarField::Prime(p) => *p,
            ScalarField::Galois(g) => g.p,
        }
    }

    fn base(&self) -> &ScalarField {
        self
    }

    fn t_power(&self, _e: Rat) -> Scalar {
        self.one()
    }

    fn valuation(&self, a: &Scalar) -> Option<Rat> {
        (!self.is_zero(a)).then(|| Rat::from_integer(0))
    }

    fn leading_coefficient(&self, a: &Scalar) -> Option<Scalar> {
        (!self.is_zero(a)).then(|| a.clone())
    }

    fn split_roots(&self, poly: &[Scalar]) -> Result<Vec<(Scalar, usize)>, ScalarError> {
        match self {
            ScalarField::Rational => self.rational_roots(poly),
            _ => self.search_roots(poly),
        }
    }

    fn encode(&self, a: &Scalar) -> String {
        self.format(a)
    }

    fn decode(&self, s: &str) -> Option<Scalar> {
        match self {
            ScalarField::Rational => super::parse_big_rational(s).ok().map(Scalar::Rational),
            _ => {
                let n: u64 = s.trim().parse().ok()?;
                let order = self.order()?;
                (n < order).then(|| self.from_encoded(n as i64))
            }
        }
    }

    fn format(&self, a: &Scalar) -> String {
        match (self, a) {
            (_, Scalar::Rational(x)) => x.to_string(),
            (_, Scalar::Residue(x)) => x.to_string(),
            (ScalarField::Galois(g), Scalar::Galois(x)) => g.encode(x).to_string(),
            _ => format!("{a:?}"),
        }
    }
}

impl Scalar {
    pub fn as_rational(&self) -> Option<&BigRational> {
        match self {
            Scalar::Rational(q) => Some(q),
            _ => None,
        }
    }

    pub fn is_negative_rational(&self) -> bool {
        matches!(self, Scalar::Rational(q) if q.is_negative())
    }
}
