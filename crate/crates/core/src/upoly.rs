//! Dense univariate polynomials over a [`Field`], stored constant term first.
//! The zero polynomial is the empty vector.

use crate::scalar::Field;

pub fn trim<F: Field>(field: &F, mut p: Vec<F::Elem>) -> Vec<F::Elem> {
    while p.last().is_some_and(|c| field.is_zero(c)) {
        p.pop();
    }
    p
}

pub fn degree<F: Field>(field: &F, p: &[F::Elem]) -> Option<usize> {
    p.iter().rposition(|c| !field.is_zero(c))
}

pub fn add<F: Field>(field: &F, a: &[F::Elem], b: &[F::Elem]) -> Vec<F::Elem> {
    let n = a.len().max(b.len());
    let zero = field.zero();
    let out = (0..n)
        .map(|i| field.add(a.get(i).unwrap_or(&zero), b.get(i).unwrap_or(&zero)))
        .collect();
    trim(field, out)
}

pub fn sub<F: Field>(field: &F, a: &[F::Elem], b: &[F::Elem]) -> Vec<F::Elem> {
    let neg: Vec<_> = b.iter().map(|c| field.neg(c)).collect();
    add(field, a, &neg)
}

pub fn scale<F: Field>(field: &F, a: &[F::Elem], c: &F::Elem) -> Vec<F::Elem> {
    trim(field, a.iter().map(|x| field.mul(x, c)).collect())
}

pub fn mul<F: Field>(field: &F, a: &[F::Elem], b: &[F::Elem]) -> Vec<F::Elem> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![field.zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if field.is_zero(x) {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            out[i + j] = field.add(&out[i + j], &field.mul(x, y));
        }
    }
    trim(field, out)
}

/// Euclidean division. Panics if `b` is zero.
pub fn div_rem<F: Field>(
    field: &F,
    a: &[F::Elem],
    b: &[F::Elem],
) -> (Vec<F::Elem>, Vec<F::Elem>) {
    let b = trim(field, b.to_vec());
    let db = b.len().checked_sub(1).expect("division by the zero polynomial");
    let lead_inv = field.inv(&b[db]).expect("nonzero leading coefficient");
    let mut r = trim(field, a.to_vec());
    if r.len() < b.len() {
        return (Vec::new(), r);
    }
    let mut q = vec![field.zero(); r.len() - db];
    while r.len() > db {
        let dr = r.len() - 1;
        let c = field.mul(&r[dr], &lead_inv);
        let shift = dr - db;
        for (i, bc) in b.iter().enumerate() {
            r[shift + i] = field.sub(&r[shift + i], &field.mul(&c, bc));
        }
        q[shift] = c;
        // The leading term cancels by construction; drop it even when the
        // field only knows it to finite precision.
        r.pop();
        r = trim(field, r);
    }
    (trim(field, q), r)
}

pub fn eval<F: Field>(field: &F, p: &[F::Elem], x: &F::Elem) -> F::Elem {
    p.iter()
        .rev()
        .fold(field.zero(), |acc, c| field.add(&field.mul(&acc, x), c))
}

pub fn derivative<F: Field>(field: &F, p: &[F::Elem]) -> Vec<F::Elem> {
    let out = p
        .iter()
        .enumerate()
        .skip(1)
        .map(|(i, c)| field.scale_int(c, i as i64))
        .collect();
    trim(field, out)
}

/// Divides out `(x - root)` as often as it divides exactly; returns the multiplicity.
pub fn strip_root<F: Field>(field: &F, p: &mut Vec<F::Elem>, root: &F::Elem) -> usize {
    let mut mult = 0;
    loop {
        if p.len() <= 1 {
            return mult;
        }
        let (q, r) = synthetic_division(field, p, root);
        if !field.is_zero(&r) {
            return mult;
        }
        *p = q;
        mult += 1;
    }
}

/// Returns `(q, r)` with `p = (x - root) q + r`.
pub fn synthetic_division<F: Field>(
    field: &F,
    p: &[F::Elem],
    root: &F::Elem,
) -> (Vec<F::Elem>, F::Elem) {
    let mut q = vec![field.zero(); p.len().saturating_sub(1)];
    let mut carry = field.zero();
    for i in (0..p.len()).rev() {
        let v = field.add(&p[i], &field.mul(&carry, root));
        if i == 0 {
            return (q, v);
        }
        q[i - 1] = v.clone();
        carry = v;
    }
    (q, carry)
}

/// Monic greatest common divisor.
pub fn gcd<F: Field>(field: &F, a: &[F::Elem], b: &[F::Elem]) -> Vec<F::Elem> {
    let mut a = trim(field, a.to_vec());
    let mut b = trim(field, b.to_vec());
    while !b.is_empty() {
        let (_, r) = div_rem(field, &a, &b);
        a = b;
        b = r;
    }
    monic(field, &a)
}

pub fn monic<F: Field>(field: &F, a: &[F::Elem]) -> Vec<F::Elem> {
    match a.last() {
        None => Vec::new(),
        Some(lead) => {
            let inv = field.inv(lead).expect("nonzero leading coefficient");
            a.iter().map(|c| field.mul(c, &inv)).collect()
        }
    }
}

/// `p(a + y)` as a polynomial in `y`.
pub fn taylor_shift<F: Field>(field: &F, p: &[F::Elem], a: &F::Elem) -> Vec<F::Elem> {
    let mut out: Vec<F::Elem> = Vec::new();
    let lin = vec![a.clone(), field.one()];
    for c in p.iter().rev() {
        out = mul(field, &out, &lin);
        if out.is_empty() {
            out.push(field.zero());
        }
        out[0] = field.add(&out[0], c);
        out = trim(field, out);
    }
    out
}

/// `p(c * y)` as a polynomial in `y`.
pub fn scale_variable<F: Field>(field: &F, p: &[F::Elem], c: &F::Elem) -> Vec<F::Elem> {
    let mut power = field.one();
    let mut out = Vec::with_capacity(p.len());
    for coeff in p {
        out.push(field.mul(coeff, &power));
        power = field.mul(&power, c);
    }
    trim(field, out)
}

pub fn format<F: Field>(field: &F, p: &[F::Elem], var: &str) -> String {
    let terms: Vec<String> = p
        .iter()
        .enumerate()
        .rev()
        .filter(|(_, c)| !field.is_zero(c))
        .map(|(i, c)| match i {
            0 => format!("({})", field.format(c)),
            1 => format!("({}){var}", field.format(c)),
            _ => format!("({}){var}^{i}", field.format(c)),
        })
        .collect();
    if terms.is_empty() {
        "0".to_string()
    } else {
        terms.join(" + ")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::ScalarField;

    fn ints(field: &ScalarField, v: &[i64]) -> Vec<crate::scalar::Scalar> {
        v.iter().map(|&x| field.from_int(x)).collect()
    }

    #[test]
    fn division_and_gcd() {
        let q = ScalarField::Rational;
        // (x^2 - 1) = (x - 1)(x + 1)
        let a = ints(&q, &[-1, 0, 1]);
        let b = ints(&q, &[1, 1]);
        let (quot, rem) = div_rem(&q, &a, &b);
        assert!(rem.is_empty());
        assert_eq!(quot, ints(&q, &[-1, 1]));
        let g = gcd(&q, &a, &ints(&q, &[-1, 1]));
        assert_eq!(g, ints(&q, &[-1, 1]));
    }

    #[test]
    fn shift_matches_evaluation() {
        let f = ScalarField::Prime(7);
        let p = ints(&f, &[3, 0, 2, 5]);
        let a = f.from_int(4);
        let shifted = taylor_shift(&f, &p, &a);
        for y in 0..7 {
            let y = f.from_int(y);
            assert_eq!(eval(&f, &shifted, &y), eval(&f, &p, &f.add(&a, &y)));
        }
    }

    #[test]
    fn strip_root_counts_multiplicity() {
        let f = ScalarField::Prime(2);
        // y^2 - 1 = (y - 1)^2 over F_2
        let mut p = ints(&f, &[-1, 0, 1]);
        assert_eq!(strip_root(&f, &mut p, &f.one()), 2);
        assert_eq!(p.len(), 1);
    }
}
