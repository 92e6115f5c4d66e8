//! Toric input data: facet normals and areas, the moment polytope, monotone
//! normalisation, and assembly of the superpotential.

use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::groupring::{self, Laurent};
use crate::linalg::{self, Matrix};
use crate::scalar::{Field, Rat, Scalar, ScalarField};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ToricError {
    #[error("invalid toric data: {0}")]
    Invalid(String),
    #[error("not monotone-normalizable: {0}")]
    NotMonotone(String),
    #[error("invalid correction: {0}")]
    Correction(String),
    #[error("class {0} has no pairing data")]
    MissingPairing(usize),
}

/// Facet normals `nu_j` and areas `lambda_j` of the polytope
/// `{x : <x, nu_j> >= -lambda_j}`, with the reference fibre over `0`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ToricData {
    dimension: usize,
    normals: Vec<Vec<i64>>,
    areas: Vec<Rat>,
}

fn to_big(r: Rat) -> Scalar {
    Scalar::Rational(BigRational::new((*r.numer()).into(), (*r.denom()).into()))
}

fn from_big(s: &Scalar) -> Option<Rat> {
    let q = s.as_rational()?;
    Some(Rat::new(q.numer().to_i64()?, q.denom().to_i64()?))
}

fn dot(x: &[Rat], nu: &[i64]) -> Rat {
    x.iter().zip(nu).map(|(a, &b)| a * b).sum()
}

impl ToricData {
    pub fn new(dimension: usize, normals: Vec<Vec<i64>>, areas: Vec<Rat>) -> Result<Self, ToricError> {
        let data = ToricData { dimension, normals, areas };
        data.validate()?;
        Ok(data)
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn normals(&self) -> &[Vec<i64>] {
        &self.normals
    }

    pub fn areas(&self) -> &[Rat] {
        &self.areas
    }

    pub fn facets(&self) -> usize {
        self.normals.len()
    }

    fn validate(&self) -> Result<(), ToricError> {
        let n = self.dimension;
        if n == 0 {
            return Err(ToricError::Invalid("dimension must be positive".into()));
        }
        if self.normals.len() != self.areas.len() {
            return Err(ToricError::Invalid(format!(
                "{} normals but {} areas",
                self.normals.len(),
                self.areas.len()
            )));
        }
        if let Some(bad) = self.normals.iter().find(|v| v.len() != n) {
            return Err(ToricError::Invalid(format!("normal {bad:?} does not have length {n}")));
        }
        if let Some(bad) = self.areas.iter().find(|a| !a.is_positive()) {
            return Err(ToricError::Invalid(format!("area {bad} is not positive")));
        }
        if normal_rank(&self.normals, n) < n {
            return Err(ToricError::Invalid("normals do not span".into()));
        }
        if let Some(ray) = self.recession_ray() {
            return Err(ToricError::Invalid(format!("polytope is unbounded along {ray:?}")));
        }
        Ok(())
    }

    /// A nonzero `d` with `<d, nu_j> >= 0` for all `j`, if the polytope is
    /// unbounded. The recession cone is pointed (the normals span), so when it
    /// is nonzero it has an extreme ray cut out by `n - 1` independent normals.
    fn recession_ray(&self) -> Option<Vec<Rat>> {
        let n = self.dimension;
        let q = ScalarField::Rational;
        for subset in subsets(self.normals.len(), n - 1) {
            let rows: Vec<Vec<Scalar>> = subset
                .iter()
                .map(|&j| self.normals[j].iter().map(|&x| q.from_int(x)).collect())
                .collect();
            let kernel = if rows.is_empty() {
                linalg::kernel(&q, &linalg::zeros(&q, 1, n))
            } else {
                linalg::kernel(&q, &Matrix::from_rows(rows))
            };
            if kernel.len() != 1 {
                continue;
            }
            let d: Vec<Rat> = kernel[0].iter().map(|s| from_big(s).expect("small")).collect();
            for sign in [1i64, -1] {
                let ray: Vec<Rat> = d.iter().map(|x| x * sign).collect();
                if self.normals.iter().all(|nu| dot(&ray, nu) >= Rat::zero()) {
                    return Some(ray);
                }
            }
        }
        None
    }

    /// Whether `x` lies in the interior of the moment polytope.
    pub fn interior_contains(&self, x: &[Rat]) -> bool {
        x.len() == self.dimension
            && self
                .normals
                .iter()
                .zip(&self.areas)
                .all(|(nu, l)| dot(x, nu) > -l)
    }

    /// The same polytope seen from the fibre over `x`: areas become
    /// `lambda_j + <x, nu_j>`.
    pub fn recentre(&self, x: &[Rat]) -> Result<ToricData, ToricError> {
        if !self.interior_contains(x) {
            return Err(ToricError::Invalid(format!("{x:?} is not an interior point")));
        }
        let areas = self.normals.iter().zip(&self.areas).map(|(nu, l)| l + dot(x, nu)).collect();
        ToricData::new(self.dimension, self.normals.clone(), areas)
    }

    /// Translates to the point `x*` with `<x*, nu_j> + lambda_j` independent of
    /// `j`, then rescales so that every area is `1`.
    pub fn monotone_normalize(&self) -> Result<Normalized, ToricError> {
        let n = self.dimension;
        let q = ScalarField::Rational;
        // Unknowns (x*, kappa): <x*, nu_j> - kappa = -lambda_j.
        let rows: Vec<Vec<Scalar>> = self
            .normals
            .iter()
            .map(|nu| {
                let mut row: Vec<Scalar> = nu.iter().map(|&x| q.from_int(x)).collect();
                row.push(q.from_int(-1));
                row
            })
            .collect();
        let rhs: Vec<Scalar> = self.areas.iter().map(|l| to_big(-l)).collect();
        let solution = linalg::solve(&q, &Matrix::from_rows(rows), &rhs)
            .ok_or_else(|| ToricError::NotMonotone("areas cannot be equalised by translation".into()))?;
        let solution: Vec<Rat> = solution
            .iter()
            .map(|s| from_big(s).ok_or_else(|| ToricError::NotMonotone("coordinates overflow".into())))
            .collect::<Result<_, _>>()?;
        let (translation, kappa) = (solution[..n].to_vec(), solution[n]);
        if !kappa.is_positive() || !self.interior_contains(&translation) {
            return Err(ToricError::NotMonotone(format!(
                "equalising point {translation:?} is not interior"
            )));
        }
        let data = ToricData::new(n, self.normals.clone(), vec![Rat::from_integer(1); self.facets()])?;
        Ok(Normalized { data, translation, scale: kappa.recip() })
    }

    /// `z_j = T^{lambda_j} tau^{nu_j}`.
    pub fn z_monomial<F: Field>(&self, field: &F, j: usize) -> Laurent<F::Elem> {
        groupring::monomial(field, field.t_power(self.areas[j]), self.normals[j].clone())
    }
}

fn normal_rank(normals: &[Vec<i64>], n: usize) -> usize {
    if normals.is_empty() {
        return 0;
    }
    let q = ScalarField::Rational;
    let rows = normals
        .iter()
        .map(|v| v.iter().map(|&x| q.from_int(x)).take(n).collect())
        .collect();
    linalg::rank(&q, &Matrix::from_rows(rows))
}

/// All `k`-element subsets of `0..n`, in lexicographic order.
pub fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            go(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, n, k, &mut Vec::new(), &mut out);
    out
}

/// Output of [`ToricData::monotone_normalize`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Normalized {
    pub data: ToricData,
    /// The monotone point in the original coordinates.
    pub translation: Vec<Rat>,
    /// Factor applied to the symplectic form.
    pub scale: Rat,
}

/// Whether `T` is kept formal or specialised to `1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Novikov,
    Monotone,
}

/// A disc class `beta` with its area, boundary, and count `c_beta`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DiscClass {
    pub area: Rat,
    pub boundary: Vec<i64>,
    pub coeff: Scalar,
    /// Intersection numbers `<H_j, beta>` with the toric divisors.
    pub pairing: Option<Vec<i64>>,
}

/// `W = sum_beta c_beta T^{omega(beta)} tau^{boundary beta}`. The first
/// `basic` classes are the basic discs, in facet order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Superpotential {
    rank: usize,
    classes: Vec<DiscClass>,
    basic: usize,
    mode: Mode,
    base: ScalarField,
}

impl Superpotential {
    pub fn build(
        toric: &ToricData,
        base: &ScalarField,
        mode: Mode,
        corrections: Vec<DiscClass>,
    ) -> Result<Self, ToricError> {
        if mode == Mode::Monotone && !corrections.is_empty() {
            return Err(ToricError::Correction(
                "the monotone (Fano) superpotential has no corrections".into(),
            ));
        }
        let n = toric.dimension();
        let big_n = toric.facets();
        let mut classes: Vec<DiscClass> = (0..big_n)
            .map(|j| {
                let mut pairing = vec![0; big_n];
                pairing[j] = 1;
                DiscClass {
                    area: toric.areas[j],
                    boundary: toric.normals[j].clone(),
                    coeff: base.one(),
                    pairing: Some(pairing),
                }
            })
            .collect();
        for c in corrections {
            if c.boundary.len() != n {
                return Err(ToricError::Correction(format!("boundary {:?} has wrong rank", c.boundary)));
            }
            if !c.area.is_positive() {
                return Err(ToricError::Correction(format!("area {} is not positive", c.area)));
            }
            base.check(&c.coeff).map_err(|e| ToricError::Correction(e.to_string()))?;
            if base.is_zero(&c.coeff) {
                return Err(ToricError::Correction("zero coefficient".into()));
            }
            if classes[..big_n].iter().any(|b| b.area == c.area && b.boundary == c.boundary) {
                return Err(ToricError::Correction(format!(
                    "class (area {}, boundary {:?}) duplicates a basic class",
                    c.area, c.boundary
                )));
            }
            if let Some(k) = &c.pairing {
                check_pairing(toric, &c, k)?;
            }
            classes.push(c);
        }
        Ok(Superpotential { rank: n, classes, basic: big_n, mode, base: base.clone() })
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn classes(&self) -> &[DiscClass] {
        &self.classes
    }

    pub fn basic_count(&self) -> usize {
        self.basic
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn base(&self) -> &ScalarField {
        &self.base
    }

    /// `c_beta T^{omega(beta)} tau^{boundary beta}` in the given coefficient field.
    pub fn class_term<F: Field>(&self, field: &F, index: usize) -> Laurent<F::Elem> {
        let c = &self.classes[index];
        let coeff = field.mul(&field.from_scalar(&c.coeff), &field.t_power(c.area));
        groupring::monomial(field, coeff, c.boundary.clone())
    }

    pub fn polynomial<F: Field>(&self, field: &F) -> Laurent<F::Elem> {
        (0..self.classes.len()).fold(Laurent::zero(self.rank), |acc, i| {
            groupring::add(field, &acc, &self.class_term(field, i)).expect("same rank")
        })
    }

    /// `<H_j, beta>` for every class.
    pub fn pairings(&self, divisor: usize) -> Result<Vec<i64>, ToricError> {
        self.classes
            .iter()
            .enumerate()
            .map(|(i, c)| {
                c.pairing
                    .as_ref()
                    .map(|k| k[divisor])
                    .ok_or(ToricError::MissingPairing(i))
            })
            .collect()
    }
}

/// A class with divisor pairings `k` must be `sum k_j beta_j` in relative
/// homology: boundary `sum k_j nu_j`, area `sum k_j lambda_j`, and Maslov
/// index `2 sum k_j = 2`.
fn check_pairing(toric: &ToricData, c: &DiscClass, k: &[i64]) -> Result<(), ToricError> {
    if k.len() != toric.facets() {
        return Err(ToricError::Correction(format!("pairing {k:?} has wrong length")));
    }
    let boundary: Vec<i64> = (0..toric.dimension())
        .map(|i| k.iter().zip(&toric.normals).map(|(kj, nu)| kj * nu[i]).sum())
        .collect();
    if boundary != c.boundary {
        return Err(ToricError::Correction(format!(
            "pairing {k:?} gives boundary {boundary:?}, not {:?}",
            c.boundary
        )));
    }
    let area: Rat = k.iter().zip(&toric.areas).map(|(kj, l)| l * *kj).sum();
    if area != c.area {
        return Err(ToricError::Correction(format!("pairing {k:?} gives area {area}, not {}", c.area)));
    }
    let maslov: i64 = 2 * k.iter().sum::<i64>();
    if maslov != 2 {
        return Err(ToricError::Correction(format!("pairing {k:?} has Maslov index {maslov}")));
    }
    Ok(())
}

/// Standard fans used throughout the tests and examples.
pub mod fans {
    use super::*;

    pub fn projective_line(a: Rat, b: Rat) -> ToricData {
        ToricData::new(1, vec![vec![1], vec![-1]], vec![a, b]).expect("valid")
    }

    pub fn projective_plane(areas: [Rat; 3]) -> ToricData {
        ToricData::new(2, vec![vec![1, 0], vec![0, 1], vec![-1, -1]], areas.to_vec()).expect("valid")
    }

    pub fn product_of_lines(areas: [Rat; 4]) -> ToricData {
        ToricData::new(2, vec![vec![1, 0], vec![-1, 0], vec![0, 1], vec![0, -1]], areas.to_vec())
            .expect("valid")
    }

    pub fn ones(k: usize) -> Vec<Rat> {
        vec![Rat::from_integer(1); k]
    }
}

#[cfg(test)]
mod tests {
    use super::fans::*;
    use super::*;
    use crate::scalar::NovikovField;

    fn r(n: i64) -> Rat {
        Rat::from_integer(n)
    }

    #[test]
    fn validation() {
        assert!(ToricData::new(2, vec![vec![1, 0], vec![-1, 0]], vec![r(1), r(1)]).is_err());
        // Spans but unbounded: a quadrant.
        assert!(ToricData::new(2, vec![vec![1, 0], vec![0, 1]], vec![r(1), r(1)]).is_err());
        assert!(ToricData::new(1, vec![vec![1]], vec![r(1)]).is_err());
        assert!(ToricData::new(1, vec![vec![1], vec![-1]], vec![r(1), r(0)]).is_err());
        assert!(ToricData::new(2, vec![vec![1, 0], vec![0, 1], vec![-1, -1]], vec![r(1); 3]).is_ok());
    }

    #[test]
    fn normalisation() {
        let n = projective_line(r(1), r(3)).monotone_normalize().unwrap();
        assert_eq!(n.translation, vec![r(1)]);
        assert_eq!(n.scale, Rat::new(1, 2));
        assert_eq!(n.data.areas(), &[r(1), r(1)]);
        let p = product_of_lines([r(1); 4]).monotone_normalize().unwrap();
        assert_eq!(p.translation, vec![r(0), r(0)]);
        assert_eq!(p.scale, r(1));
        // Hirzebruch-type data whose areas cannot be equalised.
        let f1 = ToricData::new(
            2,
            vec![vec![1, 0], vec![0, 1], vec![-1, 2], vec![0, -1]],
            vec![r(1), r(1), r(2), r(1)],
        )
        .unwrap();
        assert!(matches!(f1.monotone_normalize(), Err(ToricError::NotMonotone(_))));
    }

    #[test]
    fn interior() {
        let t = projective_line(r(1), r(2));
        assert!(t.interior_contains(&[Rat::new(1, 2)]));
        assert!(!t.interior_contains(&[r(-1)]));
    }

    #[test]
    fn superpotentials() {
        let q = ScalarField::Rational;
        let cp2 = projective_plane([r(1); 3]);
        let w = Superpotential::build(&cp2, &q, Mode::Monotone, vec![]).unwrap();
        let expected = groupring::from_terms(
            &q,
            2,
            [(vec![1, 0], q.one()), (vec![0, 1], q.one()), (vec![-1, -1], q.one())],
        )
        .unwrap();
        assert_eq!(w.polynomial(&q), expected);

        let nov = NovikovField::new(q.clone(), r(10));
        let t = |e: i64| nov.t_power(r(e));
        let cp1 = projective_line(r(1), r(2));
        let w = Superpotential::build(&cp1, &q, Mode::Novikov, vec![]).unwrap();
        let expected = groupring::from_terms(&nov, 1, [(vec![1], t(1)), (vec![-1], t(2))]).unwrap();
        assert_eq!(w.polynomial(&nov), expected);

        let corr = DiscClass { area: r(3), boundary: vec![0], coeff: q.from_int(5), pairing: None };
        let w = Superpotential::build(&cp1, &q, Mode::Novikov, vec![corr]).unwrap();
        let expected = groupring::from_terms(
            &nov,
            1,
            [(vec![1], t(1)), (vec![-1], t(2)), (vec![0], nov.scale_int(&t(3), 5))],
        )
        .unwrap();
        assert_eq!(w.polynomial(&nov), expected);
        assert!(matches!(w.pairings(0), Err(ToricError::MissingPairing(2))));
    }

    #[test]
    fn correction_rules() {
        let q = ScalarField::Rational;
        let cp1 = projective_line(r(1), r(2));
        let dup = DiscClass { area: r(1), boundary: vec![1], coeff: q.one(), pairing: None };
        assert!(Superpotential::build(&cp1, &q, Mode::Novikov, vec![dup.clone()]).is_err());
        assert!(Superpotential::build(&cp1, &q, Mode::Monotone, vec![dup]).is_err());
        // beta_1 + (beta_1 + beta_2) would have Maslov index 6.
        let heavy = DiscClass { area: r(4), boundary: vec![1], coeff: q.one(), pairing: Some(vec![2, 1]) };
        assert!(Superpotential::build(&cp1, &q, Mode::Novikov, vec![heavy]).is_err());
        let wrong = DiscClass { area: r(5), boundary: vec![1], coeff: q.one(), pairing: Some(vec![1, 0]) };
        assert!(Superpotential::build(&cp1, &q, Mode::Novikov, vec![wrong]).is_err());
    }

    #[test]
    fn subset_enumeration() {
        assert_eq!(subsets(3, 2), vec![vec![0, 1], vec![0, 2], vec![1, 2]]);
        assert_eq!(subsets(4, 0), vec![Vec::<usize>::new()]);
    }
}
