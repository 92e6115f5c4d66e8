//! Length-truncated Hochschild cochains of finite, curved, `Z/2`-graded
//! A-infinity algebras, deformation by nilpotent bounding cochains, and the
//! map `CC(delta)`.
//!
//! Arguments are always listed as `(a_k, ..., a_1)`, so `args[0]` is `a_k`.
//! Operations are evaluated lazily on basis tuples; composites such as
//! `d(d g)` or `CC(delta)(g)` are views over their ingredients.

use rand::Rng;
use thiserror::Error;

use crate::algebra::FiniteAlgebra;
use crate::linalg;
use crate::scalar::Field;

#[derive(Debug, Error)]
pub enum HochschildError {
    #[error("malformed operation: {0}")]
    Malformed(String),
    #[error("bounding cochain must be odd with nilpotent coefficients: {0}")]
    InvalidCochain(String),
    #[error("arity {requested} exceeds the truncation K_max = {limit}")]
    ArityOverflow { requested: usize, limit: usize },
}

/// A multilinear map on a `Z/2`-graded space with a fixed basis.
pub trait Operation<F: Field> {
    fn field(&self) -> &F;
    /// Parities of the basis vectors.
    fn parities(&self) -> &[u8];
    /// Degree `l` of the cochain, so `|g_k(a_k, ..., a_1)| = l - k + sum |a_i|`.
    fn parity(&self) -> u8;
    /// Components above this arity vanish.
    fn max_arity(&self) -> usize;
    fn eval(&self, args: &[usize]) -> Vec<F::Elem>;
}

/// One argument slot: a basis vector or a homogeneous vector.
pub enum Slot<'a, E> {
    Basis(usize),
    Vector(&'a [E]),
}

impl<E> Clone for Slot<'_, E> {
    fn clone(&self) -> Self {
        *self
    }
}

impl<E> Copy for Slot<'_, E> {}

/// Multilinear extension of `op` to arbitrary slots.
pub fn apply<F: Field, O: Operation<F> + ?Sized>(op: &O, slots: &[Slot<'_, F::Elem>]) -> Vec<F::Elem> {
    let field = op.field();
    let dim = op.parities().len();
    let mut out = vec![field.zero(); dim];
    if slots.len() > op.max_arity() {
        return out;
    }
    let mut args = Vec::with_capacity(slots.len());
    expand(op, slots, &mut args, field.one(), &mut out);
    out
}

fn expand<F: Field, O: Operation<F> + ?Sized>(
    op: &O,
    slots: &[Slot<'_, F::Elem>],
    args: &mut Vec<usize>,
    coeff: F::Elem,
    out: &mut [F::Elem],
) {
    let field = op.field();
    match slots.get(args.len()) {
        None => {
            let v = op.eval(args);
            for (o, x) in out.iter_mut().zip(&v) {
                *o = field.add(o, &field.mul(&coeff, x));
            }
        }
        Some(Slot::Basis(i)) => {
            args.push(*i);
            expand(op, slots, args, coeff, out);
            args.pop();
        }
        Some(Slot::Vector(v)) => {
            for (i, x) in v.iter().enumerate() {
                if !field.is_zero(x) {
                    args.push(i);
                    expand(op, slots, args, field.mul(&coeff, x), out);
                    args.pop();
                }
            }
        }
    }
}

fn check_homogeneous<F: Field>(field: &F, parities: &[u8], v: &[F::Elem]) -> Option<u8> {
    let mut parity = None;
    for (x, &p) in v.iter().zip(parities) {
        if !field.is_zero(x) {
            match parity {
                None => parity = Some(p),
                Some(q) if q != p => return None,
                _ => {}
            }
        }
    }
    Some(parity.unwrap_or(0))
}

/// Dense components `g_0, ..., g_K`; `components[k]` lists outputs for all
/// `d^k` basis tuples.
#[derive(Clone, Debug)]
pub struct Cochain<F: Field> {
    field: F,
    parities: Vec<u8>,
    parity: u8,
    components: Vec<Vec<Vec<F::Elem>>>,
}

fn tuple_index(args: &[usize], dim: usize) -> usize {
    args.iter().fold(0, |acc, &a| acc * dim + a)
}

fn tuples(dim: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for _ in 0..k {
        out = out
            .into_iter()
            .flat_map(|t: Vec<usize>| {
                (0..dim).map(move |i| {
                    let mut u = t.clone();
                    u.push(i);
                    u
                })
            })
            .collect();
    }
    out
}

impl<F: Field> Cochain<F> {
    pub fn zero(field: F, parities: Vec<u8>, parity: u8) -> Self {
        Cochain { field, parities, parity, components: Vec::new() }
    }

    /// Builds a cochain from a rule on basis tuples, up to length `k_max`.
    /// Fails if an output is not of the parity the cochain degree dictates.
    pub fn from_fn(
        field: F,
        parities: Vec<u8>,
        parity: u8,
        k_max: usize,
        mut rule: impl FnMut(&[usize]) -> Vec<F::Elem>,
    ) -> Result<Self, HochschildError> {
        let d = parities.len();
        let mut components = Vec::new();
        for k in 0..=k_max {
            let mut comp = Vec::with_capacity(d.pow(k as u32));
            for t in tuples(d, k) {
                let v = rule(&t);
                if v.len() != d {
                    return Err(HochschildError::Malformed(format!("output of length {} on {t:?}", v.len())));
                }
                let expected = output_parity(&parities, parity, &t);
                if let Some(p) = check_homogeneous(&field, &parities, &v) {
                    if p != expected && v.iter().any(|x| !field.is_zero(x)) {
                        return Err(HochschildError::Malformed(format!("output on {t:?} has the wrong parity")));
                    }
                } else {
                    return Err(HochschildError::Malformed(format!("output on {t:?} is not homogeneous")));
                }
                comp.push(v);
            }
            components.push(comp);
        }
        Ok(Cochain { field, parities, parity, components })
    }

    /// Dense copy of another operation's components up to `k_max`. Reports an
    /// overflow if a longer component is nonzero.
    pub fn materialize<O: Operation<F> + ?Sized>(op: &O, k_max: usize) -> Result<Self, HochschildError> {
        let field = op.field().clone();
        let d = op.parities().len();
        for k in k_max + 1..=op.max_arity() {
            if tuples(d, k).iter().any(|t| op.eval(t).iter().any(|x| !field.is_zero(x))) {
                return Err(HochschildError::ArityOverflow { requested: k, limit: k_max });
            }
        }
        Self::from_fn(field, op.parities().to_vec(), op.parity(), k_max.min(op.max_arity()), |t| op.eval(t))
    }

    /// Random homogeneous cochain with components up to `k_max`.
    pub fn random<R: Rng>(
        field: F,
        parities: Vec<u8>,
        parity: u8,
        k_max: usize,
        rng: &mut R,
        mut sample: impl FnMut(&mut R) -> F::Elem,
    ) -> Self {
        let ps = parities.clone();
        let zero = field.zero();
        Self::from_fn(field, parities, parity, k_max, |t| {
            let expected = output_parity(&ps, parity, t);
            ps.iter().map(|&p| if p == expected { sample(rng) } else { zero.clone() }).collect()
        })
        .expect("outputs are homogeneous by construction")
    }

    pub fn component(&self, k: usize) -> Option<&[Vec<F::Elem>]> {
        self.components.get(k).map(|c| c.as_slice())
    }

    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.components.iter().flatten().flatten().all(|x| self.field.is_zero(x))
    }
}

fn output_parity(parities: &[u8], degree: u8, args: &[usize]) -> u8 {
    let s: usize = args.iter().map(|&a| parities[a] as usize).sum();
    ((degree as usize + args.len() + s) % 2) as u8
}

impl<F: Field> Operation<F> for Cochain<F> {
    fn field(&self) -> &F {
        &self.field
    }
    fn parities(&self) -> &[u8] {
        &self.parities
    }
    fn parity(&self) -> u8 {
        self.parity
    }
    fn max_arity(&self) -> usize {
        self.components.len().saturating_sub(1)
    }
    fn eval(&self, args: &[usize]) -> Vec<F::Elem> {
        match self.components.get(args.len()) {
            Some(c) => c[tuple_index(args, self.parities.len())].clone(),
            None => vec![self.field.zero(); self.parities.len()],
        }
    }
}

/// A curved, strictly unital, `Z/2`-graded A-infinity algebra: the operations
/// `m_0, ..., m_K` form a cochain of even degree.
#[derive(Clone, Debug)]
pub struct FiniteAInfinity<F: Field> {
    pub ops: Cochain<F>,
    pub unit: Vec<F::Elem>,
}

impl<F: Field> FiniteAInfinity<F> {
    pub fn new(ops: Cochain<F>, unit: Vec<F::Elem>) -> Result<Self, HochschildError> {
        if ops.parity != 0 {
            return Err(HochschildError::Malformed("the operations must have even total degree".into()));
        }
        if check_homogeneous(&ops.field, &ops.parities, &unit) != Some(0) {
            return Err(HochschildError::Malformed("the unit must be even".into()));
        }
        Ok(FiniteAInfinity { ops, unit })
    }

    /// `m_2(a_2, a_1) = (-1)^{|a_1|} a_2 a_1` for an associative graded algebra,
    /// so `m_2(a, 1) = a` and `m_2(1, a) = (-1)^{|a|} a`.
    pub fn from_associative(algebra: &FiniteAlgebra<F>, parities: Vec<u8>) -> Result<Self, HochschildError> {
        let field = algebra.field().clone();
        let d = algebra.dim();
        if parities.len() != d {
            return Err(HochschildError::Malformed("parity list has the wrong length".into()));
        }
        let ps = parities.clone();
        let ops = Cochain::from_fn(field.clone(), parities, 0, 2, |t| match t {
            [a2, a1] => {
                let prod = algebra.mul(&algebra.basis(*a2), &algebra.basis(*a1));
                if ps[*a1] == 1 {
                    algebra.neg(&prod)
                } else {
                    prod
                }
            }
            _ => vec![field.zero(); d],
        })?;
        FiniteAInfinity::new(ops, algebra.unit())
    }

    pub fn field(&self) -> &F {
        &self.ops.field
    }

    pub fn dim(&self) -> usize {
        self.ops.parities.len()
    }

    pub fn parities(&self) -> &[u8] {
        &self.ops.parities
    }

    /// Strict unitality on basis tuples up to the stored arity.
    pub fn is_strictly_unital(&self) -> bool {
        let f = self.field();
        let d = self.dim();
        let unit = Slot::Vector(&self.unit);
        for k in 1..=self.ops.max_arity().max(2) {
            for pos in 0..k {
                for rest in tuples(d, k - 1) {
                    let mut slots: Vec<Slot<'_, F::Elem>> = rest.iter().map(|&i| Slot::Basis(i)).collect();
                    slots.insert(pos, unit);
                    let v = apply(&self.ops, &slots);
                    let expected = if k == 2 {
                        let a = rest[0];
                        let mut e = vec![f.zero(); d];
                        e[a] = f.one();
                        // pos 0 is the left slot: m_2(1, a) = (-1)^{|a|} a.
                        if pos == 0 && self.parities()[a] == 1 {
                            e[a] = f.neg(&e[a]);
                        }
                        e
                    } else {
                        vec![f.zero(); d]
                    };
                    if !v.iter().zip(&expected).all(|(x, y)| f.equal(x, y)) {
                        return false;
                    }
                }
            }
        }
        true
    }

    /// The A-infinity relations `sum (-1)^{maltese_p} m(..., m(...), a_p, ..., a_1) = 0`
    /// on every basis tuple of length at most `k_max`.
    pub fn relations_hold(&self, k_max: usize) -> bool {
        let rel = Differential::new(&self.ops, &self.ops, Signs::Standard);
        let f = self.field();
        (0..=k_max).all(|k| {
            tuples(self.dim(), k).iter().all(|t| rel.first_sum(t).iter().all(|x| f.is_zero(x)))
        })
    }
}

/// The sign rule of the differential; `Mutated` drops the `|g|` from the
/// second sum and exists to exercise the `d^2 = 0` guard.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Signs {
    Standard,
    Mutated,
}

/// The Hochschild differential `d g` with respect to operations `m`, as a view.
pub struct Differential<'a, F: Field> {
    m: &'a dyn Operation<F>,
    g: &'a dyn Operation<F>,
    signs: Signs,
}

impl<'a, F: Field> Differential<'a, F> {
    pub fn new(m: &'a dyn Operation<F>, g: &'a dyn Operation<F>, signs: Signs) -> Self {
        Differential { m, g, signs }
    }

    fn maltese(&self, args: &[usize], p: usize) -> usize {
        let k = args.len();
        let par = self.g.parities();
        args[k - p..].iter().map(|&a| par[a] as usize).sum::<usize>() + p
    }

    /// `sum (-1)^{(|g|-1) maltese_p} m_{k-q+1}(a_k, ..., g_q(...), a_p, ..., a_1)`.
    fn first_sum(&self, args: &[usize]) -> Vec<F::Elem> {
        self.sum(args, self.m, self.g, |g_par, mal| (g_par + 1) * mal)
    }

    fn sum(
        &self,
        args: &[usize],
        outer: &dyn Operation<F>,
        inner: &dyn Operation<F>,
        sign: impl Fn(usize, usize) -> usize,
    ) -> Vec<F::Elem> {
        let field = self.g.field();
        let k = args.len();
        let mut out = vec![field.zero(); self.g.parities().len()];
        for p in 0..=k {
            let mal = self.maltese(args, p);
            let s = sign(self.g.parity() as usize, mal);
            for q in 0..=k - p {
                if q > inner.max_arity() || k - q + 1 > outer.max_arity() {
                    continue;
                }
                let inner_args = &args[k - p - q..k - p];
                let v = inner.eval(inner_args);
                if v.iter().all(|x| field.is_zero(x)) {
                    continue;
                }
                let mut slots: Vec<Slot<'_, F::Elem>> = args[..k - p - q].iter().map(|&i| Slot::Basis(i)).collect();
                slots.push(Slot::Vector(&v));
                slots.extend(args[k - p..].iter().map(|&i| Slot::Basis(i)));
                let w = apply(outer, &slots);
                for (o, x) in out.iter_mut().zip(&w) {
                    *o = if s % 2 == 0 { field.add(o, x) } else { field.sub(o, x) };
                }
            }
        }
        out
    }
}

impl<F: Field> Operation<F> for Differential<'_, F> {
    fn field(&self) -> &F {
        self.g.field()
    }
    fn parities(&self) -> &[u8] {
        self.g.parities()
    }
    fn parity(&self) -> u8 {
        (self.g.parity() + 1) % 2
    }
    fn max_arity(&self) -> usize {
        (self.m.max_arity() + self.g.max_arity()).saturating_sub(1)
    }
    fn eval(&self, args: &[usize]) -> Vec<F::Elem> {
        let field = self.g.field();
        let first = self.first_sum(args);
        let signs = self.signs;
        let second = self.sum(args, self.g, self.m, |g_par, mal| match signs {
            Signs::Standard => g_par + mal,
            Signs::Mutated => mal,
        });
        first.iter().zip(&second).map(|(a, b)| field.add(a, b)).collect()
    }
}

/// `S`-multilinear extension of an operation on `A` to `A (x) S`, viewed as a
/// space over the ground field with basis `e_i (x) s_t` at index `i * dim S + t`.
pub struct Extended<'a, F: Field> {
    op: &'a dyn Operation<F>,
    s: &'a FiniteAlgebra<F>,
    parities: Vec<u8>,
}

impl<'a, F: Field> Extended<'a, F> {
    pub fn new(op: &'a dyn Operation<F>, s: &'a FiniteAlgebra<F>) -> Self {
        let parities = op.parities().iter().flat_map(|&p| std::iter::repeat_n(p, s.dim())).collect();
        Extended { op, s, parities }
    }
}

/// `sum_i e_i (x) x_i` as the flattened vector.
pub fn tensor<F: Field>(s: &FiniteAlgebra<F>, a: &[F::Elem], x: &[F::Elem]) -> Vec<F::Elem> {
    let f = s.field();
    a.iter().flat_map(|ai| x.iter().map(move |xt| f.mul(ai, xt))).collect()
}

/// Splits a flattened vector of `A (x) S` into its `S`-coefficients.
pub fn coefficients<F: Field>(s: &FiniteAlgebra<F>, v: &[F::Elem]) -> Vec<Vec<F::Elem>> {
    v.chunks(s.dim()).map(|c| c.to_vec()).collect()
}

impl<F: Field> Operation<F> for Extended<'_, F> {
    fn field(&self) -> &F {
        self.op.field()
    }
    fn parities(&self) -> &[u8] {
        &self.parities
    }
    fn parity(&self) -> u8 {
        self.op.parity()
    }
    fn max_arity(&self) -> usize {
        self.op.max_arity()
    }
    fn eval(&self, args: &[usize]) -> Vec<F::Elem> {
        let ds = self.s.dim();
        let base: Vec<usize> = args.iter().map(|a| a / ds).collect();
        let coeff = args.iter().fold(self.s.unit(), |acc, a| self.s.mul(&acc, &self.s.basis(a % ds)));
        tensor(self.s, &self.op.eval(&base), &coeff)
    }
}

/// Insertion of `delta` in every gap: `sum g(delta^{j_k}, a_k, ..., a_1, delta^{j_0})`.
/// Applied to the operations this is `m^delta`; applied to a cochain it is
/// `CC(delta)(g)`. At most `depth` copies of `delta` are inserted.
pub struct Inserted<'a, F: Field> {
    op: &'a dyn Operation<F>,
    delta: &'a [F::Elem],
    depth: usize,
}

impl<'a, F: Field> Inserted<'a, F> {
    pub fn new(op: &'a dyn Operation<F>, delta: &'a [F::Elem], depth: usize) -> Self {
        Inserted { op, delta, depth }
    }
}

/// Compositions of `total` into `parts` non-negative pieces.
fn compositions(total: usize, parts: usize) -> Vec<Vec<usize>> {
    if parts == 1 {
        return vec![vec![total]];
    }
    (0..=total)
        .flat_map(|first| {
            compositions(total - first, parts - 1).into_iter().map(move |mut rest| {
                rest.insert(0, first);
                rest
            })
        })
        .collect()
}

impl<F: Field> Operation<F> for Inserted<'_, F> {
    fn field(&self) -> &F {
        self.op.field()
    }
    fn parities(&self) -> &[u8] {
        self.op.parities()
    }
    fn parity(&self) -> u8 {
        self.op.parity()
    }
    fn max_arity(&self) -> usize {
        self.op.max_arity()
    }
    fn eval(&self, args: &[usize]) -> Vec<F::Elem> {
        let field = self.op.field();
        let mut out = vec![field.zero(); self.parities().len()];
        let k = args.len();
        for total in 0..=self.depth.min(self.op.max_arity().saturating_sub(k)) {
            for gaps in compositions(total, k + 1) {
                let mut slots = Vec::with_capacity(k + total);
                for (i, &j) in gaps.iter().enumerate() {
                    slots.extend(std::iter::repeat_n(Slot::Vector(self.delta), j));
                    if i < k {
                        slots.push(Slot::Basis(args[i]));
                    }
                }
                let v = apply(self.op, &slots);
                for (o, x) in out.iter_mut().zip(&v) {
                    *o = field.add(o, x);
                }
            }
        }
        out
    }
}

/// `A_delta` over the ground field: `A (x) S` with the deformed operations.
pub struct Deformed<'a, F: Field> {
    pub s: &'a FiniteAlgebra<F>,
    pub extended: Extended<'a, F>,
    pub delta: Vec<F::Elem>,
    pub depth: usize,
}

/// Summary of a deformation.
#[derive(Debug, Clone)]
pub struct DeformationReport<E> {
    /// `m_0^delta` as `S`-coefficients of the basis of `A`.
    pub curvature: Vec<Vec<E>>,
    /// Whether the curvature is `1 (x) W` for some `W` in `S`.
    pub curvature_is_unit_multiple: bool,
    pub potential: Option<Vec<E>>,
    pub differential_squares_to_zero: bool,
}

impl<'a, F: Field> Deformed<'a, F> {
    /// `delta` is given by its `S`-coefficients on the basis of `A`.
    pub fn new(
        a: &'a FiniteAInfinity<F>,
        s: &'a FiniteAlgebra<F>,
        delta: &[Vec<F::Elem>],
    ) -> Result<Self, HochschildError> {
        if delta.len() != a.dim() || delta.iter().any(|c| c.len() != s.dim()) {
            return Err(HochschildError::InvalidCochain("shape does not match A (x) S".into()));
        }
        for (i, c) in delta.iter().enumerate() {
            if s.is_zero(c) {
                continue;
            }
            if a.parities()[i] != 1 {
                return Err(HochschildError::InvalidCochain(format!("component on even e_{i}")));
            }
            if !s.is_nilpotent(c) {
                return Err(HochschildError::InvalidCochain(format!("coefficient of e_{i} is not nilpotent")));
            }
        }
        let flat: Vec<F::Elem> = delta.iter().flatten().cloned().collect();
        Ok(Deformed { s, extended: Extended::new(&a.ops, s), delta: flat, depth: s.dim() })
    }

    pub fn operations(&self) -> Inserted<'_, F> {
        Inserted::new(&self.extended, &self.delta, self.depth)
    }

    /// `CC(delta)(g)` for a cochain `g` on `A`.
    pub fn push<'b>(&'b self, g: &'b Extended<'b, F>) -> Inserted<'b, F> {
        Inserted::new(g, &self.delta, self.depth)
    }

    pub fn report(&self, a: &FiniteAInfinity<F>) -> DeformationReport<F::Elem> {
        let f = self.s.field();
        let ops = self.operations();
        let curvature = coefficients(self.s, &ops.eval(&[]));
        let potential = unit_multiple(f, self.s, &a.unit, &curvature);
        let d = self.extended.parities.len();
        let mut squares = true;
        for i in 0..d {
            let once = ops.eval(&[i]);
            let twice = apply(&ops, &[Slot::Vector(&once)]);
            squares &= twice.iter().all(|x| f.is_zero(x));
        }
        DeformationReport {
            curvature,
            curvature_is_unit_multiple: potential.is_some(),
            potential,
            differential_squares_to_zero: squares,
        }
    }
}

/// `W` with `v = unit (x) W`, if it exists.
fn unit_multiple<F: Field>(
    f: &F,
    s: &FiniteAlgebra<F>,
    unit: &[F::Elem],
    v: &[Vec<F::Elem>],
) -> Option<Vec<F::Elem>> {
    let pivot = unit.iter().position(|x| !f.is_zero(x))?;
    let inv = f.inv(&unit[pivot])?;
    let w = s.scale(&v[pivot], &inv);
    let ok = unit.iter().zip(v).all(|(u, vi)| s.equal(&s.scale(&w, u), vi));
    ok.then_some(w)
}

/// `g_0`.
pub fn length_zero_project<F: Field>(g: &dyn Operation<F>) -> Vec<F::Elem> {
    g.eval(&[])
}

/// `HH(delta)^0(g) = sum_k g_k(delta, ..., delta)`, directly from the formula.
pub fn hh_delta_zero<F: Field>(g: &dyn Operation<F>, s: &FiniteAlgebra<F>, delta: &[F::Elem]) -> Vec<F::Elem> {
    let ext = Extended::new(g, s);
    let field = g.field();
    let mut out = vec![field.zero(); ext.parities().len()];
    for k in 0..=g.max_arity() {
        let v = apply(&ext, &vec![Slot::Vector(delta); k]);
        for (o, x) in out.iter_mut().zip(&v) {
            *o = field.add(o, x);
        }
    }
    out
}

/// Whether two operations agree on every basis tuple of length at most `k_max`.
pub fn agree_up_to<F: Field>(a: &dyn Operation<F>, b: &dyn Operation<F>, k_max: usize) -> bool {
    let f = a.field();
    let d = a.parities().len();
    (0..=k_max).all(|k| tuples(d, k).iter().all(|t| a.eval(t).iter().zip(&b.eval(t)).all(|(x, y)| f.equal(x, y))))
}

/// Whether an operation vanishes on every basis tuple of length at most `k_max`.
pub fn vanishes_up_to<F: Field>(a: &dyn Operation<F>, k_max: usize) -> bool {
    let f = a.field();
    (0..=k_max).all(|k| tuples(a.parities().len(), k).iter().all(|t| a.eval(t).iter().all(|x| f.is_zero(x))))
}

/// `d(d g) = 0` up to length `k_max`.
pub fn square_vanishes<F: Field>(a: &FiniteAInfinity<F>, g: &Cochain<F>, k_max: usize, signs: Signs) -> bool {
    let dg = Differential::new(&a.ops, g, signs);
    let ddg = Differential::new(&a.ops, &dg, signs);
    vanishes_up_to(&ddg, k_max)
}

/// `d_{A_delta}(CC(delta) g) = CC(delta)(d_A g)` up to length `k_max`.
pub fn chain_map_holds<F: Field>(
    a: &FiniteAInfinity<F>,
    s: &FiniteAlgebra<F>,
    delta: &[Vec<F::Elem>],
    g: &Cochain<F>,
    k_max: usize,
) -> Result<bool, HochschildError> {
    let def = Deformed::new(a, s, delta)?;
    let ops = def.operations();
    let g_ext = Extended::new(g, s);
    let pushed = def.push(&g_ext);
    let lhs = Differential::new(&ops, &pushed, Signs::Standard);
    let dg = Differential::new(&a.ops, g, Signs::Standard);
    let dg_ext = Extended::new(&dg, s);
    let rhs = def.push(&dg_ext);
    Ok(agree_up_to(&lhs, &rhs, k_max))
}

/// Small graded associative algebras: `(name, structure, parities)`.
pub fn associative_families<F: Field>(field: &F) -> Vec<(&'static str, FiniteAlgebra<F>, Vec<u8>)> {
    use crate::algebra::monomial_algebra;
    let f = field.clone();
    let mut out = vec![
        ("ground field", monomial_algebra(f.clone(), &[vec![0]]), vec![0]),
        ("dual numbers", monomial_algebra(f.clone(), &[vec![0], vec![1]]), vec![0, 0]),
        ("exterior algebra", monomial_algebra(f.clone(), &[vec![0], vec![1]]), vec![0, 1]),
        ("truncated cubic", monomial_algebra(f.clone(), &[vec![0], vec![1], vec![2]]), vec![0, 0, 0]),
    ];
    let product = |blocks: &[usize]| {
        let d: usize = blocks.iter().sum();
        let mut table = vec![vec![vec![f.zero(); d]; d]; d];
        let mut unit = vec![f.zero(); d];
        let mut offset = 0;
        for &b in blocks {
            // Each block is F[x]/x^b with basis 1, x, ..., x^{b-1}.
            for i in 0..b {
                for j in 0..b {
                    if i + j < b {
                        table[offset + i][offset + j][offset + i + j] = f.one();
                    }
                }
            }
            unit[offset] = f.one();
            offset += b;
        }
        FiniteAlgebra::new(f.clone(), table, unit).expect("products of unital algebras are unital")
    };
    out.push(("split pair", product(&[1, 1]), vec![0, 0]));
    out.push(("split triple", product(&[1, 1, 1]), vec![0, 0, 0]));
    out.push(("field times dual numbers", product(&[1, 2]), vec![0, 0, 0]));
    out.push(("field times exterior algebra", product(&[1, 2]), vec![0, 0, 1]));
    // Upper triangular 2x2 matrices, basis E11, E12, E22.
    let mut table = vec![vec![vec![f.zero(); 3]; 3]; 3];
    table[0][0][0] = f.one();
    table[0][1][1] = f.one();
    table[1][2][1] = f.one();
    table[2][2][2] = f.one();
    out.push((
        "upper triangular",
        FiniteAlgebra::new(f.clone(), table, vec![f.one(), f.zero(), f.one()]).expect("unital"),
        vec![0, 0, 0],
    ));
    // F[x]/(x^2 - 1) with x odd.
    let mut table = vec![vec![vec![f.zero(); 2]; 2]; 2];
    table[0][0][0] = f.one();
    table[0][1][1] = f.one();
    table[1][0][1] = f.one();
    table[1][1][0] = f.one();
    out.push(("odd involution", FiniteAlgebra::new(f.clone(), table, vec![f.one(), f.zero()]).expect("unital"), vec![0, 1]));
    out
}

/// A random parity-preserving change of basis applied to `algebra`.
pub fn random_conjugate<F: Field, R: Rng>(
    algebra: &FiniteAlgebra<F>,
    parities: &[u8],
    rng: &mut R,
    mut sample: impl FnMut(&mut R) -> F::Elem,
) -> FiniteAlgebra<F> {
    let f = algebra.field();
    let d = algebra.dim();
    let p = loop {
        let m = linalg::Matrix::from_rows(
            (0..d)
                .map(|i| (0..d).map(|j| if parities[i] == parities[j] { sample(rng) } else { f.zero() }).collect())
                .collect(),
        );
        if linalg::rank(f, &m) == d {
            break m;
        }
    };
    // New basis vector j is column j of p.
    let new_basis: Vec<Vec<F::Elem>> = (0..d).map(|j| p.column(j)).collect();
    let inv = linalg::inverse(f, &p).expect("full rank");
    let coords = |v: &[F::Elem]| linalg::mul_vec(f, &inv, v);
    let table = (0..d)
        .map(|i| (0..d).map(|j| coords(&algebra.mul(&new_basis[i], &new_basis[j]))).collect())
        .collect();
    FiniteAlgebra::new(f.clone(), table, coords(&algebra.unit())).expect("conjugate of a unital algebra")
}

/// The degree-one sector of the pearl model: basis `1, z_1, ..., z_n`, strict
/// unit, and `m_k(z_{l_1}, ..., z_{l_k}) = bracket(c) 1` on non-decreasing
/// tuples of multiplicity `c`, zero on other orderings (only unshuffle sums are
/// determined, so the whole bracket sits on one representative).
pub fn degree_one_sector<F: Field>(
    field: &F,
    n: usize,
    k_max: usize,
    mut bracket: impl FnMut(&[u32]) -> F::Elem,
) -> Result<FiniteAInfinity<F>, HochschildError> {
    let d = n + 1;
    let mut parities = vec![1u8; d];
    parities[0] = 0;
    let ps = parities.clone();
    let ops = Cochain::from_fn(field.clone(), parities, 0, k_max, |t| {
        let mut out = vec![field.zero(); d];
        if t.contains(&0) {
            if let [a2, a1] = t {
                if *a1 == 0 {
                    out[*a2] = field.one();
                } else if ps[*a1] == 1 {
                    out[*a1] = field.neg(&field.one());
                } else {
                    out[*a1] = field.one();
                }
            }
            return out;
        }
        if t.windows(2).all(|w| w[0] <= w[1]) {
            let mut c = vec![0u32; n];
            for &i in t {
                c[i - 1] += 1;
            }
            out[0] = bracket(&c);
        }
        out
    })?;
    let mut unit = vec![field.zero(); d];
    unit[0] = field.one();
    FiniteAInfinity::new(ops, unit)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::monomial_algebra;
    use crate::scalar::ScalarField;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn f5() -> ScalarField {
        ScalarField::Prime(5)
    }

    fn sampler(f: &ScalarField) -> impl FnMut(&mut ChaCha8Rng) -> crate::scalar::Scalar + '_ {
        move |r: &mut ChaCha8Rng| f.from_int(r.gen_range(-3..4))
    }

    #[test]
    fn families_satisfy_the_relations() {
        let f = f5();
        for (name, alg, par) in associative_families(&f) {
            let a = FiniteAInfinity::from_associative(&alg, par).unwrap();
            assert!(a.relations_hold(3), "{name}");
            assert!(a.is_strictly_unital(), "{name}");
        }
    }

    #[test]
    fn unit_is_a_cocycle() {
        let f = f5();
        for (name, alg, par) in associative_families(&f) {
            let a = FiniteAInfinity::from_associative(&alg, par.clone()).unwrap();
            let u = alg.unit();
            let g = Cochain::from_fn(f.clone(), par, 0, 0, |_| u.clone()).unwrap();
            let dg = Differential::new(&a.ops, &g, Signs::Standard);
            assert!(vanishes_up_to(&dg, 3), "{name}");
        }
    }

    #[test]
    fn square_zero_and_mutation() {
        let f = f5();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let mut mutated_caught = false;
        for (_, alg, par) in associative_families(&f) {
            let alg = random_conjugate(&alg, &par, &mut rng, sampler(&f));
            let a = FiniteAInfinity::from_associative(&alg, par.clone()).unwrap();
            for parity in 0..2 {
                let g = Cochain::random(f.clone(), par.clone(), parity, 2, &mut rng, sampler(&f));
                assert!(square_vanishes(&a, &g, 3, Signs::Standard));
                mutated_caught |= !square_vanishes(&a, &g, 3, Signs::Mutated);
            }
        }
        assert!(mutated_caught);
    }

    #[test]
    fn materialize_reports_overflow() {
        let f = f5();
        let (_, alg, par) = associative_families(&f).remove(2);
        let a = FiniteAInfinity::from_associative(&alg, par.clone()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let g = Cochain::random(f.clone(), par, 1, 2, &mut rng, sampler(&f));
        let dg = Differential::new(&a.ops, &g, Signs::Standard);
        assert!(matches!(Cochain::materialize(&dg, 1), Err(HochschildError::ArityOverflow { .. })));
        assert_eq!(Cochain::materialize(&dg, 3).unwrap().len(), 4);
    }

    #[test]
    fn deformation_and_chain_map() {
        let f = ScalarField::Prime(3);
        let s = monomial_algebra(f.clone(), &[vec![0], vec![1], vec![2]]);
        let (_, alg, par) = associative_families(&f).remove(2);
        let a = FiniteAInfinity::from_associative(&alg, par.clone()).unwrap();
        let delta = vec![s.zero(), s.add(&s.basis(1), &s.basis(2))];
        let def = Deformed::new(&a, &s, &delta).unwrap();
        let report = def.report(&a);
        assert!(report.curvature_is_unit_multiple && report.differential_squares_to_zero);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for parity in 0..2 {
            let g = Cochain::random(f.clone(), par.clone(), parity, 2, &mut rng, sampler(&f));
            assert!(chain_map_holds(&a, &s, &delta, &g, 2).unwrap());
            let pushed_ext = Extended::new(&g, &s);
            let pushed = def.push(&pushed_ext);
            assert_eq!(length_zero_project(&pushed), hh_delta_zero(&g, &s, &def.delta));
        }
    }

    #[test]
    fn even_or_non_nilpotent_cochains_are_rejected() {
        let f = f5();
        let s = monomial_algebra(f.clone(), &[vec![0], vec![1]]);
        let (_, alg, par) = associative_families(&f).remove(2);
        let a = FiniteAInfinity::from_associative(&alg, par).unwrap();
        assert!(Deformed::new(&a, &s, &[s.basis(1), s.zero()]).is_err());
        assert!(Deformed::new(&a, &s, &[s.zero(), s.unit()]).is_err());
    }
}
