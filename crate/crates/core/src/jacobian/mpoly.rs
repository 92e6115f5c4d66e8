//! Sparse polynomials in `y_1, ..., y_n, u` for the polynomial model of the
//! Laurent ring, where `u` inverts `y_1 ... y_n`.
//!
//! The monomial order compares the `u` exponent first (so `u` is eliminated)
//! and then uses graded reverse lexicographic order on the `y` block with
//! `y_n > ... > y_1`.

use std::cmp::Ordering;

use crate::scalar::Field;

/// Exponent vector of length `n + 1`; the last slot is `u`.
pub type Mono = Vec<u32>;

pub fn cmp_mono(a: &[u32], b: &[u32]) -> Ordering {
    let n = a.len() - 1;
    a[n].cmp(&b[n]).then_with(|| {
        let da: u32 = a[..n].iter().sum();
        let db: u32 = b[..n].iter().sum();
        da.cmp(&db).then_with(|| {
            for i in 0..n {
                if a[i] != b[i] {
                    return b[i].cmp(&a[i]);
                }
            }
            Ordering::Equal
        })
    })
}

pub fn divides(a: &[u32], b: &[u32]) -> bool {
    a.iter().zip(b).all(|(x, y)| x <= y)
}

pub fn lcm(a: &[u32], b: &[u32]) -> Mono {
    a.iter().zip(b).map(|(x, y)| *x.max(y)).collect()
}

fn quotient(b: &[u32], a: &[u32]) -> Mono {
    b.iter().zip(a).map(|(x, y)| x - y).collect()
}

fn coprime(a: &[u32], b: &[u32]) -> bool {
    a.iter().zip(b).all(|(x, y)| *x == 0 || *y == 0)
}

/// Terms sorted in decreasing monomial order, no zero coefficients.
#[derive(Clone, Debug, PartialEq)]
pub struct Poly<E> {
    terms: Vec<(Mono, E)>,
}

impl<E: Clone> Poly<E> {
    pub fn zero() -> Self {
        Poly { terms: Vec::new() }
    }

    pub fn terms(&self) -> &[(Mono, E)] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn lead(&self) -> Option<&(Mono, E)> {
        self.terms.first()
    }
}

pub fn from_terms<F: Field>(field: &F, mut terms: Vec<(Mono, F::Elem)>) -> Poly<F::Elem> {
    terms.sort_by(|a, b| cmp_mono(&b.0, &a.0));
    let mut out: Vec<(Mono, F::Elem)> = Vec::with_capacity(terms.len());
    for (m, c) in terms {
        match out.last_mut() {
            Some((lm, lc)) if *lm == m => *lc = field.add(lc, &c),
            _ => out.push((m, c)),
        }
    }
    out.retain(|(_, c)| !field.is_zero(c));
    Poly { terms: out }
}

pub fn add<F: Field>(field: &F, a: &Poly<F::Elem>, b: &Poly<F::Elem>) -> Poly<F::Elem> {
    let mut out = Vec::with_capacity(a.terms.len() + b.terms.len());
    let (mut i, mut j) = (0, 0);
    while i < a.terms.len() || j < b.terms.len() {
        let ord = match (a.terms.get(i), b.terms.get(j)) {
            (Some(x), Some(y)) => cmp_mono(&x.0, &y.0),
            (Some(_), None) => Ordering::Greater,
            _ => Ordering::Less,
        };
        match ord {
            Ordering::Greater => {
                out.push(a.terms[i].clone());
                i += 1;
            }
            Ordering::Less => {
                out.push(b.terms[j].clone());
                j += 1;
            }
            Ordering::Equal => {
                let c = field.add(&a.terms[i].1, &b.terms[j].1);
                if !field.is_zero(&c) {
                    out.push((a.terms[i].0.clone(), c));
                }
                i += 1;
                j += 1;
            }
        }
    }
    Poly { terms: out }
}

/// `c * x^m * a`.
pub fn mul_term<F: Field>(field: &F, a: &Poly<F::Elem>, m: &[u32], c: &F::Elem) -> Poly<F::Elem> {
    let terms = a
        .terms
        .iter()
        .map(|(am, ac)| (am.iter().zip(m).map(|(x, y)| x + y).collect(), field.mul(ac, c)))
        .filter(|(_, c)| !field.is_zero(c))
        .collect();
    Poly { terms }
}

pub fn scale<F: Field>(field: &F, a: &Poly<F::Elem>, c: &F::Elem) -> Poly<F::Elem> {
    let zero = vec![0; a.terms.first().map_or(0, |t| t.0.len())];
    mul_term(field, a, &zero, c)
}

pub fn monic<F: Field>(field: &F, a: &Poly<F::Elem>) -> Poly<F::Elem> {
    match a.lead() {
        None => a.clone(),
        Some((_, c)) => {
            let inv = field.inv(c).expect("nonzero leading coefficient");
            let mut out = scale(field, a, &inv);
            // The leading coefficient is exactly one even for truncated series.
            out.terms[0].1 = field.one();
            out
        }
    }
}

/// Outcome of a reduction, counting the elementary steps performed.
pub struct Reduced<E> {
    pub remainder: Poly<E>,
    pub steps: usize,
}

/// Full reduction of `f` by `basis` (whose elements need not be monic).
pub fn reduce<F: Field>(
    field: &F,
    f: &Poly<F::Elem>,
    basis: &[Poly<F::Elem>],
    budget: usize,
) -> Option<Reduced<F::Elem>> {
    let mut rest = f.clone();
    let mut remainder: Vec<(Mono, F::Elem)> = Vec::new();
    let mut steps = 0;
    while let Some((m, c)) = rest.lead().cloned() {
        let divisor = basis
            .iter()
            .find(|g| g.lead().is_some_and(|(gm, _)| divides(gm, &m)));
        match divisor {
            Some(g) => {
                steps += 1;
                if steps > budget {
                    return None;
                }
                let (gm, gc) = g.lead().unwrap();
                let factor = field.neg(&field.div(&c, gc).expect("nonzero leading coefficient"));
                let mut next = add(field, &rest, &mul_term(field, g, &quotient(&m, gm), &factor));
                // The leading monomial cancels by construction.
                if next.lead().is_some_and(|(nm, _)| *nm == m) {
                    next.terms.remove(0);
                }
                rest = next;
            }
            None => {
                remainder.push((m, c));
                rest.terms.remove(0);
            }
        }
    }
    Some(Reduced { remainder: Poly { terms: remainder }, steps })
}

fn s_polynomial<F: Field>(field: &F, f: &Poly<F::Elem>, g: &Poly<F::Elem>) -> Poly<F::Elem> {
    let (fm, fc) = f.lead().unwrap();
    let (gm, gc) = g.lead().unwrap();
    let l = lcm(fm, gm);
    let a = mul_term(field, f, &quotient(&l, fm), &field.inv(fc).unwrap());
    let b = mul_term(field, g, &quotient(&l, gm), &field.neg(&field.inv(gc).unwrap()));
    let mut s = add(field, &a, &b);
    if s.lead().is_some_and(|(m, _)| *m == l) {
        s.terms.remove(0);
    }
    s
}

/// Buchberger's algorithm with the coprime-leading-term criterion, followed by
/// inter-reduction. Returns the reduced Groebner basis, or `None` when the step
/// budget is exhausted.
pub fn groebner<F: Field>(field: &F, generators: &[Poly<F::Elem>], budget: usize) -> Option<Vec<Poly<F::Elem>>> {
    let mut basis: Vec<Poly<F::Elem>> = generators
        .iter()
        .filter(|g| !g.is_zero())
        .map(|g| monic(field, g))
        .collect();
    let mut pairs: Vec<(usize, usize)> = (0..basis.len())
        .flat_map(|j| (0..j).map(move |i| (i, j)))
        .collect();
    let mut spent = 0usize;
    while let Some((i, j)) = select_pair(&basis, &mut pairs) {
        let (fm, gm) = (&basis[i].lead().unwrap().0, &basis[j].lead().unwrap().0);
        if coprime(fm, gm) {
            continue;
        }
        let s = s_polynomial(field, &basis[i], &basis[j]);
        let r = reduce(field, &s, &basis, budget.checked_sub(spent)?)?;
        spent += r.steps + 1;
        if spent > budget {
            return None;
        }
        if !r.remainder.is_zero() {
            let k = basis.len();
            basis.push(monic(field, &r.remainder));
            pairs.extend((0..k).map(|i| (i, k)));
        }
    }
    Some(interreduce(field, basis, budget))
}

/// Picks the pair with the smallest lcm of leading monomials (normal strategy).
fn select_pair<E: Clone>(basis: &[Poly<E>], pairs: &mut Vec<(usize, usize)>) -> Option<(usize, usize)> {
    if pairs.is_empty() {
        return None;
    }
    let key = |&(i, j): &(usize, usize)| lcm(&basis[i].lead().unwrap().0, &basis[j].lead().unwrap().0);
    let best = (0..pairs.len())
        .min_by(|&a, &b| cmp_mono(&key(&pairs[a]), &key(&pairs[b])))
        .unwrap();
    Some(pairs.swap_remove(best))
}

fn interreduce<F: Field>(field: &F, mut basis: Vec<Poly<F::Elem>>, budget: usize) -> Vec<Poly<F::Elem>> {
    // Drop elements whose leading monomial is divisible by another's.
    let mut keep: Vec<Poly<F::Elem>> = Vec::new();
    basis.sort_by(|a, b| cmp_mono(&a.lead().unwrap().0, &b.lead().unwrap().0));
    for g in basis {
        let m = &g.lead().unwrap().0;
        if !keep.iter().any(|h| divides(&h.lead().unwrap().0, m)) {
            keep.push(g);
        }
    }
    // Reduce the tails.
    let mut out = Vec::with_capacity(keep.len());
    for i in 0..keep.len() {
        let others: Vec<Poly<F::Elem>> = keep
            .iter()
            .enumerate()
            .filter(|(j, _)| *j != i)
            .map(|(_, g)| g.clone())
            .collect();
        let g = &keep[i];
        let (head, tail) = (g.terms[0].clone(), Poly { terms: g.terms[1..].to_vec() });
        let reduced = reduce(field, &tail, &others, budget.max(1) * 4)
            .map(|r| r.remainder)
            .unwrap_or(tail);
        let mut terms = vec![head];
        terms.extend(reduced.terms);
        out.push(Poly { terms });
    }
    out
}

pub fn format<F: Field>(field: &F, p: &Poly<F::Elem>) -> String {
    if p.is_zero() {
        return "0".into();
    }
    p.terms
        .iter()
        .map(|(m, c)| {
            let n = m.len() - 1;
            let mut vars: Vec<String> = Vec::new();
            for (i, &e) in m[..n].iter().enumerate() {
                match e {
                    0 => {}
                    1 => vars.push(format!("y{}", i + 1)),
                    _ => vars.push(format!("y{}^{e}", i + 1)),
                }
            }
            match m[n] {
                0 => {}
                1 => vars.push("u".into()),
                e => vars.push(format!("u^{e}")),
            }
            let c = field.format(c);
            if vars.is_empty() {
                format!("({c})")
            } else {
                format!("({c})*{}", vars.join("*"))
            }
        })
        .collect::<Vec<_>>()
        .join(" + ")
}

/// Canonical text: one term per `;`-separated item, `coefficient@e1,e2,...`.
pub fn encode<F: Field>(field: &F, p: &Poly<F::Elem>) -> String {
    p.terms
        .iter()
        .map(|(m, c)| {
            let exps = m.iter().map(|e| e.to_string()).collect::<Vec<_>>().join(",");
            format!("{}@{exps}", field.encode(c))
        })
        .collect::<Vec<_>>()
        .join(";")
}

pub fn decode<F: Field>(field: &F, s: &str, vars: usize) -> Option<Poly<F::Elem>> {
    if s.trim().is_empty() {
        return Some(Poly::zero());
    }
    let terms = s
        .split(';')
        .map(|t| {
            let (c, m) = t.rsplit_once('@')?;
            let m: Mono = m.split(',').map(|e| e.trim().parse().ok()).collect::<Option<_>>()?;
            (m.len() == vars).then_some(())?;
            Some((m, field.decode(c)?))
        })
        .collect::<Option<Vec<_>>>()?;
    Some(from_terms(field, terms))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::ScalarField;

    fn poly(f: &ScalarField, terms: &[(i64, &[u32])]) -> Poly<crate::scalar::Scalar> {
        from_terms(f, terms.iter().map(|(c, m)| (m.to_vec(), f.from_int(*c))).collect())
    }

    #[test]
    fn order_eliminates_u_then_prefers_last_y() {
        assert_eq!(cmp_mono(&[0, 1, 0], &[1, 0, 0]), Ordering::Greater);
        assert_eq!(cmp_mono(&[0, 0, 1], &[5, 5, 0]), Ordering::Greater);
        assert_eq!(cmp_mono(&[2, 0, 0], &[0, 1, 0]), Ordering::Greater);
    }

    #[test]
    fn reduce_cubic() {
        let f = ScalarField::Rational;
        let g = poly(&f, &[(1, &[2, 0]), (-1, &[0, 0])]);
        let y3 = poly(&f, &[(1, &[3, 0])]);
        let r = reduce(&f, &y3, &[g], 100).unwrap();
        assert_eq!(r.remainder, poly(&f, &[(1, &[1, 0])]));
    }

    #[test]
    fn projective_plane_basis() {
        let f = ScalarField::Prime(7);
        let gens = vec![
            poly(&f, &[(1, &[2, 1, 0]), (-1, &[0, 0, 0])]),
            poly(&f, &[(1, &[1, 2, 0]), (-1, &[0, 0, 0])]),
            poly(&f, &[(1, &[1, 1, 1]), (-1, &[0, 0, 0])]),
        ];
        let gb = groebner(&f, &gens, 10_000).unwrap();
        let y2 = poly(&f, &[(1, &[0, 1, 0])]);
        let nf = reduce(&f, &y2, &gb, 100).unwrap().remainder;
        assert_eq!(nf, poly(&f, &[(1, &[1, 0, 0])]));
        let leads: Vec<Mono> = gb.iter().map(|g| g.lead().unwrap().0.clone()).collect();
        assert!(leads.contains(&vec![3, 0, 0]));
    }

    #[test]
    fn budget_is_enforced() {
        let f = ScalarField::Rational;
        let gens = vec![
            poly(&f, &[(1, &[2, 1, 0]), (-1, &[0, 0, 0])]),
            poly(&f, &[(1, &[1, 2, 0]), (-1, &[0, 0, 0])]),
            poly(&f, &[(1, &[1, 1, 1]), (-1, &[0, 0, 0])]),
        ];
        assert!(groebner(&f, &gens, 1).is_none());
    }

    #[test]
    fn text_round_trip() {
        let f = ScalarField::Rational;
        let p = from_terms(
            &f,
            vec![(vec![2, 0, 1], f.from_rational(&"3/4".parse().unwrap()).unwrap()), (vec![0, 0, 0], f.from_int(-1))],
        );
        assert_eq!(decode(&f, &encode(&f, &p), 3).unwrap(), p);
    }
}
