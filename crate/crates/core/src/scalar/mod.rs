//! Exact coefficient fields and truncated Novikov series.

mod exact;
mod field;
mod novikov;

use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use exact::{GaloisField, Scalar, ScalarField, MAX_ENUMERABLE_ORDER};
pub use field::Field;
pub use novikov::{Novikov, NovikovField};

/// Exponents of `T` (energies) and rational vector coordinates.
pub type Rat = num_rational::Ratio<i64>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ScalarError {
    #[error("invalid field: {0}")]
    InvalidField(String),
    #[error("field mismatch: expected an element of {expected}, found {found}")]
    FieldMismatch { expected: String, found: String },
    #[error("division by zero")]
    DivisionByZero,
    #[error("extend field: {factor} does not split over {field}")]
    NotSplit { factor: String, field: String },
    #[error("precision exhausted: {0}")]
    PrecisionExhausted(String),
    #[error("bad scalar literal {0:?}")]
    Literal(String),
}

/// A scalar as written in an input document: an integer, or a `"p/q"` string.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ScalarLiteral {
    Int(i64),
    Text(String),
}

/// A Novikov series literal: `[exponent, coefficient]` pairs plus an optional precision.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NovikovLiteral {
    pub terms: Vec<(ScalarLiteral, ScalarLiteral)>,
    #[serde(default)]
    pub precision: Option<ScalarLiteral>,
}

pub fn parse_big_rational(s: &str) -> Result<BigRational, ScalarError> {
    let bad = || ScalarError::Literal(s.to_string());
    let s = s.trim();
    match s.split_once('/') {
        Some((n, d)) => {
            let n = BigInt::from_str(n.trim()).map_err(|_| bad())?;
            let d = BigInt::from_str(d.trim()).map_err(|_| bad())?;
            if d == BigInt::from(0) {
                return Err(bad());
            }
            Ok(BigRational::new(n, d))
        }
        None => BigInt::from_str(s).map(BigRational::from_integer).map_err(|_| bad()),
    }
}

pub fn parse_rat(s: &str) -> Result<Rat, ScalarError> {
    let bad = || ScalarError::Literal(s.to_string());
    let s = s.trim();
    match s.split_once('/') {
        Some((n, d)) => {
            let n: i64 = n.trim().parse().map_err(|_| bad())?;
            let d: i64 = d.trim().parse().map_err(|_| bad())?;
            if d == 0 {
                return Err(bad());
            }
            Ok(Rat::new(n, d))
        }
        None => s.parse::<i64>().map(Rat::from_integer).map_err(|_| bad()),
    }
}

impl ScalarLiteral {
    pub fn to_rat(&self) -> Result<Rat, ScalarError> {
        match self {
            ScalarLiteral::Int(n) => Ok(Rat::from_integer(*n)),
            ScalarLiteral::Text(s) => parse_rat(s),
        }
    }

    /// Integers use the field's integer encoding (base-`p` digits in extension
    /// fields); strings are rationals mapped into the field.
    pub fn to_scalar(&self, field: &ScalarField) -> Result<Scalar, ScalarError> {
        match self {
            ScalarLiteral::Int(n) => Ok(field.from_encoded(*n)),
            ScalarLiteral::Text(s) => field.from_rational(&parse_big_rational(s)?),
        }
    }
}

impl NovikovLiteral {
    pub fn to_novikov(&self, base: &ScalarField) -> Result<Novikov, ScalarError> {
        let terms = self
            .terms
            .iter()
            .map(|(e, c)| Ok((e.to_rat()?, c.to_scalar(base)?)))
            .collect::<Result<Vec<_>, ScalarError>>()?;
        let precision = self.precision.as_ref().map(|p| p.to_rat()).transpose()?;
        Ok(Novikov::from_terms(base, terms, precision))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn literals() {
        assert_eq!(parse_rat("3/6").unwrap(), Rat::new(1, 2));
        assert_eq!(parse_rat(" -4 ").unwrap(), Rat::from_integer(-4));
        assert!(parse_rat("1/0").is_err());
        assert!(parse_rat("x").is_err());
        let f5 = ScalarField::Prime(5);
        assert_eq!(ScalarLiteral::Text("1/2".into()).to_scalar(&f5).unwrap(), Scalar::Residue(3));
        assert_eq!(ScalarLiteral::Int(-1).to_scalar(&f5).unwrap(), Scalar::Residue(4));
        let f4 = ScalarField::finite(2, 2).unwrap();
        assert_eq!(ScalarLiteral::Int(2).to_scalar(&f4).unwrap(), Scalar::Galois(vec![0, 1]));
    }

    #[test]
    fn novikov_literal() {
        let lit: NovikovLiteral =
            serde_json::from_str(r#"{"terms": [["1/2", 3], [1, "-1"]], "precision": "5"}"#).unwrap();
        let q = ScalarField::Rational;
        let x = lit.to_novikov(&q).unwrap();
        assert_eq!(x.valuation(), Some(Rat::new(1, 2)));
        assert_eq!(x.precision(), Some(Rat::from_integer(5)));
    }

    #[test]
    fn galois_field_uses_smallest_irreducible() {
        // x^2 + x + 1 is the only irreducible quadratic over F_2.
        let g = GaloisField::new(2, 2).unwrap();
        assert_eq!(g.modulus(), &[1, 1, 1]);
        // Over F_3 the smallest is x^2 + 1.
        assert_eq!(GaloisField::new(3, 2).unwrap().modulus(), &[1, 0, 1]);
        assert!(GaloisField::new(4, 2).is_err());
    }

    #[test]
    fn characteristic_tag() {
        for field in [
            ScalarField::Prime(2),
            ScalarField::Prime(7),
            ScalarField::finite(3, 2).unwrap(),
        ] {
            let p = field.characteristic() as i64;
            assert!(field.is_zero(&field.from_int(p)));
            assert!(!field.is_zero(&field.from_int(p - 1)));
        }
        assert_eq!(ScalarField::Rational.characteristic(), 0);
    }

    #[test]
    fn rational_root_test_reports_irreducible_factor() {
        let q = ScalarField::Rational;
        let poly: Vec<Scalar> = [-2, 0, 1].iter().map(|&c| q.from_int(c)).collect();
        match q.split_roots(&poly) {
            Err(ScalarError::NotSplit { field, .. }) => assert_eq!(field, "Q"),
            other => panic!("unexpected {other:?}"),
        }
        let poly: Vec<Scalar> = [-1, 0, 4].iter().map(|&c| q.from_int(c)).collect();
        assert_eq!(q.split_roots(&poly).unwrap().len(), 2);
    }
}
