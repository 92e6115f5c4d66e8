//! Exact combinatorics of the pearl model on the flat torus `R^n / Z^n`:
//! Morse data, the bound on basic perturbations, class-(a) trajectory counts,
//! and the hypotheses behind the emptiness of the other classes.

use num_integer::Integer;
use num_traits::{Signed, Zero};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::floer;
use crate::scalar::{Field, Rat};
use crate::toric::DiscClass;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PearlError {
    #[error("invalid Morse data: {0}")]
    Invalid(String),
    #[error("perturbation offsets {0:?} are not strictly increasing inside (-lambda, lambda)")]
    Offsets(Vec<String>),
    #[error("no valid Morse data after {0} attempts")]
    Exhausted(usize),
}

/// Morse function with minimum at `p = 0` and maximum at `q`, perturbation
/// direction `V`, and offset bound `lambda`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MorseData {
    pub q: Vec<Rat>,
    pub v: Vec<Rat>,
    pub lambda: Rat,
}

fn r(n: i64) -> Rat {
    Rat::from_integer(n)
}

fn half() -> Rat {
    Rat::new(1, 2)
}

/// Solutions `theta in [0, 1)` of `p theta + shift = target (mod 1)`.
fn circle_solutions(p: i64, shift: Rat, target: Rat) -> Vec<Rat> {
    if p == 0 {
        return Vec::new();
    }
    let base = target - shift;
    let (lo, hi) = if p > 0 { (-base, r(p) - base) } else { (r(p) - base, -base) };
    let mut out: Vec<Rat> = (lo.floor().to_integer()..=hi.ceil().to_integer())
        .map(|a| (base + r(a)) / r(p))
        .filter(|t| !t.is_negative() && *t < r(1))
        .collect();
    out.sort();
    out
}

/// `s` in `[-bound, bound]`, `theta in [0, 1)` with
/// `theta nu_i + s V_i = q_i` and `theta nu_j + s V_j = q_j` modulo `Z`.
fn l2_hits(nu: (i64, i64), v: (Rat, Rat), q: (Rat, Rat), bound: Rat) -> Vec<(Rat, Rat)> {
    let (ni, nj) = (r(nu.0), r(nu.1));
    let det = ni * v.1 - nj * v.0;
    let reach = |n: Rat, vv: Rat| (n.abs() + bound * vv.abs()).ceil().to_integer() + 1;
    let mut hits = Vec::new();
    if !det.is_zero() {
        for a in -reach(ni, v.0)..=reach(ni, v.0) {
            for b in -reach(nj, v.1)..=reach(nj, v.1) {
                let (x, y) = (q.0 + r(a), q.1 + r(b));
                let theta = (x * v.1 - y * v.0) / det;
                let s = (ni * y - nj * x) / det;
                if !theta.is_negative() && theta < r(1) && s.abs() <= bound {
                    hits.push((theta, s));
                }
            }
        }
        return hits;
    }
    if v.0.is_zero() {
        return if v.1.is_zero() { hits } else { l2_hits((nu.1, nu.0), (v.1, v.0), (q.1, q.0), bound) };
    }
    // nu is c V on these coordinates, so the points are u V with
    // u = c theta + s.
    let c = ni / v.0;
    let (lo, hi) = (c.min(r(0)) - bound, c.max(r(0)) + bound);
    let reach_a = (hi.abs().max(lo.abs()) * v.0.abs()).ceil().to_integer() + 1;
    for a in -reach_a..=reach_a {
        let u = (q.0 + r(a)) / v.0;
        if u < lo || u > hi || !(u * v.1 - q.1).is_integer() {
            continue;
        }
        // Any split u = c theta + s with theta in [0, 1) and |s| <= bound.
        if c.is_zero() {
            if u.abs() <= bound {
                hits.push((r(0), u));
            }
        } else {
            let (t_lo, t_hi) = {
                let t1 = (u - bound) / c;
                let t2 = (u + bound) / c;
                (t1.min(t2).max(r(0)), t1.max(t2))
            };
            if t_lo < r(1) && t_lo <= t_hi {
                hits.push((t_lo, u - c * t_lo));
            }
        }
    }
    hits
}

/// One verified condition.
#[derive(Debug, Clone, Serialize, PartialEq, Eq)]
pub struct CheckItem {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl MorseData {
    pub fn new(q: Vec<Rat>, v: Vec<Rat>, lambda: Rat) -> Result<Self, PearlError> {
        if q.len() != v.len() || q.is_empty() {
            return Err(PearlError::Invalid("q and V must have the same positive length".into()));
        }
        if q.iter().any(|x| !x.is_positive() || *x >= r(1)) {
            return Err(PearlError::Invalid("q must lie in (0, 1)^n".into()));
        }
        if !lambda.is_positive() {
            return Err(PearlError::Invalid("lambda must be positive".into()));
        }
        Ok(MorseData { q, v, lambda })
    }

    pub fn dimension(&self) -> usize {
        self.q.len()
    }

    /// (i) `lambda < 1/2`.
    pub fn condition_i(&self) -> bool {
        self.lambda < half()
    }

    /// (ii) `p + [-lambda, lambda] V` misses every `{t_k = q_k}`.
    pub fn condition_ii(&self) -> bool {
        self.q.iter().zip(&self.v).all(|(q, v)| {
            let reach = self.lambda * v.abs();
            reach < *q && reach < r(1) - q
        })
    }

    /// Least `|s|` with `C_m + s V` meeting `L_2`, over all curves.
    pub fn condition_iii_threshold(&self, normals: &[Vec<i64>]) -> Option<Rat> {
        let n = self.dimension();
        let smallest = self.v.iter().filter(|v| !v.is_zero()).map(|v| v.abs()).min()?;
        let big = r(4) / smallest;
        let mut best: Option<Rat> = None;
        for nu in normals {
            for i in 0..n {
                for j in i + 1..n {
                    for (_, s) in l2_hits((nu[i], nu[j]), (self.v[i], self.v[j]), (self.q[i], self.q[j]), big) {
                        best = Some(best.map_or(s.abs(), |b| b.min(s.abs())));
                    }
                }
            }
        }
        best
    }

    /// (iii) `C_m + [-lambda, lambda] V` misses `L_2`; at `lambda = 0` this is
    /// the genericity of `q`.
    pub fn condition_iii(&self, normals: &[Vec<i64>]) -> bool {
        self.condition_iii_threshold(normals).is_none_or(|t| t > self.lambda)
    }

    /// `C_m` itself misses `L_2`.
    pub fn curves_avoid_l2(&self, normals: &[Vec<i64>]) -> bool {
        self.condition_iii_threshold(normals).is_none_or(|t| !t.is_zero())
    }

    /// (iv), in the parameter of `C_m`: pushing the solutions of
    /// `C_m(theta) in {t_k = q_k}` by `epsilon V`, `0 < epsilon <= lambda`,
    /// never lands them on a solution of `C_m(theta) in {t_l = q_l}`.
    pub fn condition_iv(&self, normals: &[Vec<i64>]) -> bool {
        let n = self.dimension();
        normals.iter().all(|nu| {
            (0..n).all(|k| {
                (0..n).all(|l| {
                    if nu[k] == 0 || nu[l] == 0 || self.v[k].is_zero() {
                        return true;
                    }
                    circle_solutions(nu[l], r(0), self.q[l]).iter().all(|theta| {
                        // epsilon V_k = q_k - theta nu_k + a for some integer a.
                        let base = self.q[k] - *theta * r(nu[k]);
                        let top = self.lambda * self.v[k].abs();
                        let lo = (-top - base).floor().to_integer() - 1;
                        let hi = (top - base).ceil().to_integer() + 1;
                        (lo..=hi).all(|a| {
                            let eps = (base + r(a)) / self.v[k];
                            !(eps.is_positive() && eps <= self.lambda)
                        })
                    })
                })
            })
        })
    }

    /// `<b_j, V>` lies in `(0, 1)` for every `j`.
    pub fn direction_valid(&self) -> bool {
        self.v.iter().all(|v| v.is_positive() && *v < r(1))
    }

    pub fn conditions(&self, normals: &[Vec<i64>]) -> Vec<CheckItem> {
        let item = |name: &str, passed: bool, detail: String| CheckItem { name: name.into(), passed, detail };
        vec![
            item("direction", self.direction_valid(), format!("V = {}", fmt_vec(&self.v))),
            item("(i)", self.condition_i(), format!("lambda = {}", self.lambda)),
            item("(ii)", self.condition_ii(), format!("q = {}", fmt_vec(&self.q))),
            item(
                "(iii)",
                self.condition_iii(normals),
                match self.condition_iii_threshold(normals) {
                    Some(t) => format!("threshold {t}"),
                    None => "L_2 is never met".into(),
                },
            ),
            item("(iv)", self.condition_iv(normals), String::new()),
        ]
    }

    pub fn is_valid(&self, normals: &[Vec<i64>]) -> bool {
        self.conditions(normals).iter().all(|c| c.passed)
    }

    /// Checks that offsets are strictly increasing inside `(-lambda, lambda)`.
    pub fn check_offsets(&self, eps: &[Rat]) -> Result<(), PearlError> {
        let inside = eps.iter().all(|e| e.abs() < self.lambda);
        let increasing = eps.windows(2).all(|w| w[0] < w[1]);
        if inside && increasing {
            Ok(())
        } else {
            Err(PearlError::Offsets(eps.iter().map(|e| e.to_string()).collect()))
        }
    }

    /// Evenly spaced offsets `-lambda + 2 lambda r / (k + 1)`.
    pub fn standard_offsets(&self, k: usize) -> Vec<Rat> {
        (1..=k as i64).map(|i| -self.lambda + self.lambda * r(2 * i) / r(k as i64 + 1)).collect()
    }

    /// Random valid offsets on a grid of mesh `lambda / 500`.
    pub fn random_offsets<R: Rng>(&self, k: usize, rng: &mut R) -> Vec<Rat> {
        let grid: Vec<i64> = (1..1000).collect();
        let mut picks: Vec<i64> = grid.choose_multiple(rng, k).cloned().collect();
        picks.sort();
        picks.into_iter().map(|u| -self.lambda + self.lambda * r(u) / r(500)).collect()
    }
}

fn fmt_vec(v: &[Rat]) -> String {
    let parts: Vec<String> = v.iter().map(|x| x.to_string()).collect();
    format!("({})", parts.join(", "))
}

fn primes_above(bound: i64, count: usize, skip: usize) -> Vec<i64> {
    let mut out = Vec::new();
    let mut n = bound + 1;
    let mut seen = 0;
    while out.len() < count {
        if n >= 2 && (2..).take_while(|d| d * d <= n).all(|d| n % d != 0) {
            if seen >= skip {
                out.push(n);
            }
            seen += 1;
        }
        n += 1;
    }
    out
}

/// Picks `q_i = a_i / P_i` with distinct primes `P_i` exceeding every normal
/// entry, a direction `V`, and the largest `lambda = 2^{-j} / 4` that passes
/// (i)-(iv). Deterministic in `seed`.
pub fn choose_morse_data(normals: &[Vec<i64>], seed: u64) -> Result<MorseData, PearlError> {
    const ATTEMPTS: usize = 32;
    let n = normals.first().map_or(0, |v| v.len());
    if n == 0 {
        return Err(PearlError::Invalid("no normals".into()));
    }
    let top = normals.iter().flatten().map(|x| x.abs()).max().unwrap_or(1).max(2);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for attempt in 0..ATTEMPTS {
        let primes = primes_above(top, 2 * n, attempt);
        let q: Vec<Rat> = primes[..n].iter().map(|&p| Rat::new(rng.gen_range(1..p), p)).collect();
        let v: Vec<Rat> = primes[n..].iter().map(|&p| Rat::new(1, p)).collect();
        let mut lambda = Rat::new(1, 4);
        for _ in 0..12 {
            let md = MorseData::new(q.clone(), v.clone(), lambda)?;
            if md.is_valid(normals) {
                return Ok(md);
            }
            lambda /= r(2);
        }
    }
    Err(PearlError::Exhausted(ATTEMPTS))
}

/// Signed count of class-(a) trajectories: tuples `theta_1 < ... < theta_k`
/// in `[0, 1)` with `C_m(theta_r) + eps_r V` on `{t_{l_r} = q_{l_r}}`, each
/// weighted by the sign of `prod p_{l_r}`.
pub fn enumerate_class_a(md: &MorseData, boundary: &[i64], inputs: &[usize], eps: &[Rat]) -> Result<i64, PearlError> {
    if inputs.len() != eps.len() {
        return Err(PearlError::Invalid("one offset per input".into()));
    }
    md.check_offsets(eps)?;
    if inputs.iter().any(|&l| boundary[l] == 0) {
        return Ok(0);
    }
    let sols: Vec<Vec<Rat>> = inputs
        .iter()
        .zip(eps)
        .map(|(&l, e)| circle_solutions(boundary[l], *e * md.v[l], md.q[l]))
        .collect();
    // ways[i] = number of increasing chains ending at sols[r][i].
    let mut ways: Vec<i64> = vec![1; sols.first().map_or(0, |s| s.len())];
    for rr in 1..sols.len() {
        ways = sols[rr]
            .iter()
            .map(|t| sols[rr - 1].iter().zip(&ways).filter(|(s, _)| *s < t).map(|(_, w)| w).sum())
            .collect();
    }
    let count: i64 = if inputs.is_empty() { 1 } else { ways.iter().sum() };
    let negatives = inputs.iter().filter(|&&l| boundary[l] < 0).count();
    Ok(if negatives % 2 == 0 { count } else { -count })
}

/// `(raw, signed)`: for `p > 0` the strictly increasing `c`-tuples from `p`
/// points, for `p < 0` the non-decreasing ones from `|p|` points, counted by
/// enumeration; the signed value carries `sign(p)^c`.
pub fn tuple_counts(p: i64, c: u32) -> (i64, i64) {
    fn count(points: i64, c: u32, start: i64, strict: bool) -> i64 {
        if c == 0 {
            return 1;
        }
        (start..points).map(|i| count(points, c - 1, if strict { i + 1 } else { i }, strict)).sum()
    }
    if p == 0 {
        let v = if c == 0 { 1 } else { 0 };
        return (v, v);
    }
    let raw = count(p.abs(), c, 0, p > 0);
    let signed = if p < 0 && c % 2 == 1 { -raw } else { raw };
    (raw, signed)
}

/// One `(beta, c)` entry of the oracle sweep.
#[derive(Debug, Clone, Serialize)]
pub struct OracleEntry {
    pub facet: usize,
    pub c: Vec<u32>,
    /// Unshuffle-summed signed count, one per offset sample.
    pub counts: Vec<i64>,
    pub binomial: i64,
    /// The bracket with monodromy, from the counts and from the closed form.
    pub bracket: String,
    pub closed_form: String,
    pub passed: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct OracleReport {
    pub samples: usize,
    pub entries: Vec<OracleEntry>,
    pub passed: bool,
}

/// For every basic class and every `c` with `|c| <= bound`: sums class-(a)
/// counts over unshuffles, with fresh offsets per tree, for each of `samples`
/// offset draws; all draws must agree, match `prod binom(p_j, c_j)`, and, with
/// the monodromy `W_beta|_xi`, reproduce every form of `m_beta[c]`.
pub fn oracle_compare<F: Field>(
    md: &MorseData,
    field: &F,
    xi: &[F::Elem],
    basic: &[DiscClass],
    bound: u32,
    samples: usize,
    seed: u64,
) -> Result<OracleReport, PearlError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut entries = Vec::new();
    for (m, beta) in basic.iter().enumerate() {
        for c in floer::multiplicities(md.dimension(), bound) {
            let k: usize = c.iter().map(|&x| x as usize).sum();
            let trees = floer::unshuffles(&c);
            let mut counts = Vec::with_capacity(samples);
            for _ in 0..samples.max(1) {
                let mut total = 0;
                for l in &trees {
                    total += enumerate_class_a(md, &beta.boundary, l, &md.random_offsets(k, &mut rng))?;
                }
                counts.push(total);
            }
            let binomial = c.iter().zip(&beta.boundary).map(|(&cj, &p)| floer::binomial(p, cj)).product::<i128>();
            let monodromy = floer::binomial_form(field, xi, beta, &vec![0; c.len()]);
            let mut individual = |l: &[usize]| {
                let eps = md.standard_offsets(l.len());
                let n = enumerate_class_a(md, &beta.boundary, l, &eps).expect("standard offsets are valid");
                field.mul(&monodromy, &field.from_int(n))
            };
            let forms = floer::unshuffle_bracket(field, xi, beta, &c, Some(&mut individual));
            let bracket = forms.unshuffle.clone().expect("individual operations were supplied");
            let passed = counts.iter().all(|&x| x as i128 == binomial) && forms.agree(field);
            entries.push(OracleEntry {
                facet: m,
                c,
                counts,
                binomial: binomial as i64,
                bracket: field.format(&bracket),
                closed_form: field.format(&forms.binomial),
                passed,
            });
        }
    }
    let passed = entries.iter().all(|e| e.passed);
    Ok(OracleReport { samples, entries, passed })
}

/// The exact hypotheses consumed by the emptiness arguments.
pub fn emptiness_checks(md: &MorseData, normals: &[Vec<i64>]) -> Vec<CheckItem> {
    let item = |name: &str, passed: bool, detail: &str| CheckItem { name: name.into(), passed, detail: detail.into() };
    let mut out = md.conditions(normals);
    out.push(item("C_m avoids L_2", md.curves_avoid_l2(normals), "genericity of q"));
    let iii = md.condition_iii(normals);
    out.push(item("class (b)", true, "the Morse function increases along a branch ending at the minimum"));
    out.push(item("class (c)", iii, "flow from L_2 cannot reach C_m + [-lambda, lambda] V"));
    // Distinct offsets in (-1/2, 1/2) move {t_j = q_j} by (eps - eps') <b_j, V>,
    // a nonzero amount of size below 1 exactly when <b_j, V> is in (0, 1).
    out.push(item("class (d)", md.direction_valid(), "translated hyperplanes {t_j = q_j - eps <b_j, V>} are disjoint"));
    out
}

/// `gcd` of the entries, so callers can reject non-primitive normals.
pub fn content(v: &[i64]) -> i64 {
    v.iter().fold(0i64, |g, x| g.gcd(x))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(a: i64, b: i64) -> Rat {
        Rat::new(a, b)
    }

    fn line() -> Vec<Vec<i64>> {
        vec![vec![1], vec![-1]]
    }

    fn plane() -> Vec<Vec<i64>> {
        vec![vec![1, 0], vec![0, 1], vec![-1, -1]]
    }

    #[test]
    fn line_data_is_valid() {
        let md = MorseData::new(vec![q(2, 5)], vec![q(1, 3)], q(1, 10)).unwrap();
        assert!(md.condition_ii());
        assert!(md.is_valid(&line()));
        let wide = MorseData::new(vec![q(2, 5)], vec![q(1, 3)], q(1, 2)).unwrap();
        assert!(!wide.condition_i());
    }

    #[test]
    fn plane_curves_avoid_l2() {
        let md = MorseData::new(vec![q(2, 5), q(3, 7)], vec![q(1, 11), q(1, 13)], q(1, 100)).unwrap();
        assert!(md.curves_avoid_l2(&plane()));
        assert!(md.is_valid(&plane()));
        let t = md.condition_iii_threshold(&plane()).unwrap();
        let at = MorseData::new(md.q.clone(), md.v.clone(), t).unwrap();
        assert!(!at.condition_iii(&plane()));
    }

    #[test]
    fn class_a_examples() {
        let md = MorseData::new(vec![q(2, 5)], vec![q(1, 3)], q(1, 10)).unwrap();
        assert_eq!(enumerate_class_a(&md, &[2], &[0], &[q(0, 1)]).unwrap(), 2);
        assert_eq!(enumerate_class_a(&md, &[2], &[0, 0], &[q(-1, 20), q(1, 20)]).unwrap(), 1);
        assert_eq!(enumerate_class_a(&md, &[-1], &[0, 0], &[q(-1, 20), q(1, 20)]).unwrap(), 1);
        assert!(enumerate_class_a(&md, &[2], &[0, 0], &[q(1, 20), q(-1, 20)]).is_err());
    }

    #[test]
    fn tuple_count_examples() {
        assert_eq!(tuple_counts(3, 2), (3, 3));
        assert_eq!(tuple_counts(-1, 2), (1, 1));
        assert_eq!(tuple_counts(2, 3), (0, 0));
        for p in -4..=4 {
            for c in 0..5 {
                assert_eq!(tuple_counts(p, c).1 as i128, floer::binomial(p, c), "p={p} c={c}");
            }
        }
    }

    #[test]
    fn chosen_data_is_deterministic() {
        let a = choose_morse_data(&plane(), 11).unwrap();
        assert_eq!(a, choose_morse_data(&plane(), 11).unwrap());
        assert!(emptiness_checks(&a, &plane()).iter().all(|c| c.passed));
    }

    #[test]
    fn degenerate_direction_fails_d() {
        let md = MorseData::new(vec![q(2, 5)], vec![q(0, 1)], q(1, 10)).unwrap();
        let checks = emptiness_checks(&md, &line());
        assert!(!checks.iter().find(|c| c.name == "class (d)").unwrap().passed);
    }

    #[test]
    fn oracle_matches_closed_forms() {
        use crate::scalar::ScalarField;
        use crate::toric::{fans, Mode, Superpotential};
        let field = ScalarField::Rational;
        let toric = fans::projective_line(r(1), r(1));
        let w = Superpotential::build(&toric, &field, Mode::Monotone, Vec::new()).unwrap();
        let md = choose_morse_data(toric.normals(), 3).unwrap();
        let xi = vec![field.from_int(3)];
        let report = oracle_compare(&md, &field, &xi, w.classes(), 4, 5, 9).unwrap();
        assert!(report.passed, "{report:?}");
        assert_eq!(report.entries.len(), 2 * 5);
    }
}
