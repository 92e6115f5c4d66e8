//! The verification battery behind `verify`: desk examples, bracket sweeps,
//! randomized property checks, Hochschild guards, and the pearl oracle.

use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::algebra::{local_families, random_nilpotent, FiniteAlgebra};
use crate::config::Level;
use crate::floer::{self, Action, BoundingCochain, FloerModel, Model};
use crate::hochschild::{self, Cochain, FiniteAInfinity, Signs};
use crate::jacobian::{eigen, QuotientAlgebra, Summand, DEFAULT_STEP_BUDGET};
use crate::pearl;
use crate::scalar::{Field, NovikovField, Rat, ScalarField};
use crate::toric::{fans, DiscClass, Mode, Superpotential, ToricData};

/// Outcome of one acceptance criterion.
#[derive(Debug, Clone, Serialize)]
pub struct CriterionResult {
    pub id: u32,
    pub name: String,
    pub passed: bool,
    pub detail: String,
    pub seconds: f64,
    pub budget_seconds: f64,
}

impl CriterionResult {
    pub fn line(&self) -> String {
        format!(
            "criterion {:>2} {:<4} {} ({:.3}s, budget {:.0}s): {}",
            self.id,
            if self.passed { "PASS" } else { "FAIL" },
            self.name,
            self.seconds,
            self.budget_seconds,
            self.detail
        )
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SuiteSummary {
    pub level: Level,
    pub criteria: Vec<CriterionResult>,
    pub passed: bool,
}

/// Outcome of a check body: pass flag and a short description.
pub type Outcome = (bool, String);

fn timed(id: u32, name: &str, budget: f64, body: impl FnOnce() -> Outcome) -> CriterionResult {
    let start = Instant::now();
    let (ok, detail) = body();
    let seconds = start.elapsed().as_secs_f64();
    let within = Duration::from_secs_f64(seconds) <= Duration::from_secs_f64(budget);
    let detail = if within { detail } else { format!("{detail}; over time budget") };
    CriterionResult { id, name: name.into(), passed: ok && within, detail, seconds, budget_seconds: budget }
}

fn r(n: i64) -> Rat {
    Rat::from_integer(n)
}

/// A desk example: potential, Jacobian ring, and summands.
pub struct Desk<F: Field> {
    pub toric: ToricData,
    pub w: Superpotential,
    pub quotient: QuotientAlgebra<F>,
    pub summands: Vec<Summand<F>>,
}

pub fn desk<F: Field>(field: F, base: &ScalarField, toric: ToricData, mode: Mode) -> Result<Desk<F>, String> {
    let w = Superpotential::build(&toric, base, mode, Vec::new()).map_err(|e| e.to_string())?;
    let quotient = QuotientAlgebra::new(&field, &w, DEFAULT_STEP_BUDGET).map_err(|e| e.to_string())?;
    let summands = eigen::decompose(&quotient).map_err(|e| e.to_string())?;
    Ok(Desk { toric, w, quotient, summands })
}

fn monotone(p: u64, toric: ToricData) -> Result<Desk<ScalarField>, String> {
    let f = ScalarField::prime(p).map_err(|e| e.to_string())?;
    desk(f.clone(), &f, toric, Mode::Monotone)
}

pub fn line_mod(p: u64) -> Result<Desk<ScalarField>, String> {
    monotone(p, fans::projective_line(r(1), r(1)))
}

pub fn plane_mod(p: u64) -> Result<Desk<ScalarField>, String> {
    monotone(p, fans::projective_plane([r(1), r(1), r(1)]))
}

pub fn rational_line() -> Result<Desk<ScalarField>, String> {
    let f = ScalarField::Rational;
    desk(f.clone(), &f, fans::projective_line(r(1), r(1)), Mode::Monotone)
}

/// `CP^1` with areas `(1, 2)` over the Novikov field at precision `5`.
pub fn novikov_line() -> Result<Desk<NovikovField>, String> {
    let base = ScalarField::Rational;
    let f = NovikovField::new(base.clone(), r(5));
    desk(f, &base, fans::projective_line(r(1), r(2)), Mode::Novikov)
}

/// Per summand and model: potential, whether every Floer check passes, and
/// the `CO` rank.
pub struct FloerRun<E> {
    pub dim: usize,
    pub model: Model,
    pub potential: Vec<E>,
    pub checks_pass: bool,
    pub differential_zero: bool,
    pub co_matches: bool,
    pub co_rank: usize,
}

pub fn floer_runs<F: Field>(d: &Desk<F>) -> Result<Vec<FloerRun<F::Elem>>, String> {
    let mut out = Vec::new();
    for s in &d.summands {
        let action = Action::from_summand(s);
        let fm = FloerModel::new(&d.w, &action).map_err(|e| e.to_string())?;
        for model in Model::available(s.field().characteristic()) {
            let delta = BoundingCochain::for_action(&action, model).map_err(|e| e.to_string())?;
            let pot = fm.weak_bounding_check(&delta).map_err(|e| e.to_string())?;
            let diff = fm.deformed_differential(&delta).map_err(|e| e.to_string())?;
            let co = floer::co_against_projection(&fm, &delta, &d.quotient, s).map_err(|e| e.to_string())?;
            let differential_zero = diff.iter().all(|x| action.algebra.is_zero(&x.definition));
            out.push(FloerRun {
                dim: s.dim(),
                model,
                potential: pot.definition,
                checks_pass: pot.agree && diff.iter().all(|x| x.agree),
                differential_zero,
                co_matches: co.agree,
                co_rank: co.rank,
            });
        }
    }
    Ok(out)
}

fn all_good<E>(runs: &[FloerRun<E>]) -> bool {
    runs.iter().all(|x| x.checks_pass && x.differential_zero && x.co_matches && x.co_rank == x.dim)
}

fn sorted_strings(mut v: Vec<String>) -> Vec<String> {
    v.sort();
    v
}

fn or_fail(r: Result<Outcome, String>) -> Outcome {
    r.unwrap_or_else(|e| (false, e))
}

pub fn criterion_line_f5() -> Outcome {
    or_fail((|| {
        let d = line_mod(5)?;
        let f = d.quotient.field().clone();
        let xi = sorted_strings(d.summands.iter().map(|s| f.format(&s.xi[0])).collect());
        let dims: Vec<usize> = d.summands.iter().map(|s| s.dim()).collect();
        let runs = floer_runs(&d)?;
        let pots = sorted_strings(runs.iter().map(|x| f.format(&x.potential[0])).collect());
        let ok = d.quotient.dim() == 2 && dims == [1, 1] && xi == ["1", "4"] && pots == ["2", "3"] && all_good(&runs);
        Ok((ok, format!("dim {}, summands {dims:?}, xi {xi:?}, potentials {pots:?}", d.quotient.dim())))
    })())
}

pub fn criterion_line_f2() -> Outcome {
    or_fail((|| {
        let d = line_mod(2)?;
        let [s] = d.summands.as_slice() else {
            return Ok((false, format!("{} summands", d.summands.len())));
        };
        let alg = &s.algebra;
        let psi_ok = !alg.is_zero(&s.psi[0]) && alg.is_nilpotent(&s.psi[0]);
        let runs = floer_runs(&d)?;
        let pot_zero = runs.iter().all(|x| alg.is_zero(&x.potential));
        let ok = s.dim() == 2 && psi_ok && pot_zero && all_good(&runs);
        Ok((ok, format!("dim {}, psi = {}, potential zero {pot_zero}", s.dim(), alg.format(&s.psi[0]))))
    })())
}

pub fn criterion_plane_f7() -> Outcome {
    or_fail((|| {
        let d = plane_mod(7)?;
        let f = d.quotient.field().clone();
        let xi_ok = d.summands.iter().all(|s| f.equal(&s.xi[0], &s.xi[1]) && s.dim() == 1);
        let xi = sorted_strings(d.summands.iter().map(|s| f.format(&s.xi[0])).collect());
        let runs = floer_runs(&d)?;
        let pots = sorted_strings(runs.iter().map(|x| f.format(&x.potential[0])).collect());
        let split_error = match plane_mod(5) {
            Err(e) => e.contains("extend field"),
            Ok(_) => false,
        };
        let ok = xi_ok && xi == ["1", "2", "4"] && pots == ["3", "5", "6"] && all_good(&runs) && split_error;
        Ok((ok, format!("xi {xi:?}, potentials {pots:?}, F_5 refused {split_error}")))
    })())
}

pub fn criterion_novikov_line() -> Outcome {
    or_fail((|| {
        let d = novikov_line()?;
        let f = d.quotient.field().clone();
        let root = f.t_power(Rat::new(1, 2));
        let mut ok = d.summands.len() == 2;
        let mut vals = Vec::new();
        for s in &d.summands {
            let lam = &s.eigenvalues[0];
            ok &= f.equal(lam, &root) || f.equal(lam, &f.neg(&root));
            ok &= s.valuation == [Rat::new(1, 2)] && d.toric.interior_contains(&s.valuation);
            let z1 = d.quotient.reduce_laurent(&d.toric.z_monomial(&f, 0)).map_err(|e| e.to_string())?;
            let z1q = s.project(&d.quotient, &z1);
            let v = f.valuation(&z1q[0]);
            ok &= v == Some(Rat::new(3, 2));
            vals.push(format!("{}", v.map_or("inf".into(), |x| x.to_string())));
        }
        let runs = floer_runs(&d)?;
        ok &= runs.len() == 4 && all_good(&runs);
        Ok((ok, format!("val z_1 {vals:?}, {} model runs", runs.len())))
    })())
}

/// Three-way bracket check on every basic class of `d`, `|c| <= bound`.
pub fn bracket_sweep<F: Field>(d: &Desk<F>, bound: u32, seed: u64) -> Result<(usize, usize), String> {
    let md = pearl::choose_morse_data(d.toric.normals(), seed).map_err(|e| e.to_string())?;
    let basic = &d.w.classes()[..d.w.basic_count()];
    let (mut total, mut bad) = (0, 0);
    for s in &d.summands {
        let rep = pearl::oracle_compare(&md, s.field(), &s.xi, basic, bound, 1, seed).map_err(|e| e.to_string())?;
        total += rep.entries.len();
        bad += rep.entries.iter().filter(|e| !e.passed).count();
    }
    Ok((total, bad))
}

pub fn criterion_brackets(bound: u32) -> Outcome {
    or_fail((|| {
        let sweeps = [
            ("CP1/F5", bracket_sweep(&line_mod(5)?, bound, 1)?),
            ("CP1/F2", bracket_sweep(&line_mod(2)?, bound, 2)?),
            ("CP2/F7", bracket_sweep(&plane_mod(7)?, bound, 3)?),
            ("CP1/Q", bracket_sweep(&rational_line()?, bound, 4)?),
            ("CP1/Novikov", bracket_sweep(&novikov_line()?, bound, 5)?),
        ];
        let ok = sweeps.iter().all(|(_, (t, b))| *b == 0 && *t > 0);
        let detail: Vec<String> = sweeps.iter().map(|(n, (t, b))| format!("{n} {}/{t}", t - b)).collect();
        Ok((ok, detail.join(", ")))
    })())
}

fn small_int<R: Rng>(f: &ScalarField, rng: &mut R) -> crate::scalar::Scalar {
    f.from_int(rng.gen_range(-3..4))
}

fn unit_sample<R: Rng>(f: &ScalarField, rng: &mut R) -> crate::scalar::Scalar {
    loop {
        let x = small_int(f, rng);
        if !f.is_zero(&x) {
            return x;
        }
    }
}

/// A random action on a random local algebra of dimension at most 4 whose
/// maximal ideal cubes to zero.
pub fn random_action<R: Rng>(f: &ScalarField, n: usize, rng: &mut R) -> Action<ScalarField> {
    let families = local_families(f);
    let (_, s) = &families[rng.gen_range(0..families.len())];
    let xi: Vec<_> = (0..n).map(|_| unit_sample(f, rng)).collect();
    let rho = xi
        .iter()
        .map(|x| {
            let nil = random_nilpotent(s, rng, |g| small_int(f, g));
            s.scale(&s.add(&s.unit(), &nil), x)
        })
        .collect();
    Action::new(s.clone(), xi, rho).expect("consistent shapes")
}

pub fn criterion_deformed_brackets(instances: usize, seed: u64) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let fields = [0u64, 2, 3, 5].map(|p| if p == 0 { ScalarField::Rational } else { ScalarField::Prime(p) });
    let (mut checked, mut failures) = (0, Vec::new());
    for i in 0..instances {
        let f = &fields[i % fields.len()];
        let n = rng.gen_range(1..=2);
        let action = random_action(f, n, &mut rng);
        let toric = if n == 1 { fans::projective_line(r(1), r(1)) } else { fans::projective_plane([r(1), r(1), r(1)]) };
        let w = Superpotential::build(&toric, f, Mode::Monotone, Vec::new()).expect("standard fan");
        let fm = FloerModel::new(&w, &action).expect("ranks agree");
        let beta = DiscClass {
            area: r(1),
            boundary: (0..n).map(|_| rng.gen_range(-3..=3)).collect(),
            coeff: unit_sample(f, &mut rng),
            pairing: None,
        };
        let bound = 3;
        let c: Vec<u32> = loop {
            let c: Vec<u32> = (0..n).map(|_| rng.gen_range(0..=bound)).collect();
            if c.iter().sum::<u32>() <= bound {
                break c;
            }
        };
        for model in Model::available(f.characteristic()) {
            let delta = BoundingCochain::for_action(&action, model).expect("nilpotent by construction");
            match fm.deformed(&delta, &beta, &c) {
                Ok(x) if x.agree => checked += 1,
                Ok(_) => failures.push(format!("#{i} {f} {model:?} boundary {:?} c {c:?}", beta.boundary)),
                Err(e) => failures.push(format!("#{i}: {e}")),
            }
        }
    }
    (failures.is_empty(), format!("{checked} agreements over {instances} algebras; failures {failures:?}"))
}

pub fn criterion_exp_log(instances: usize, seed: u64) -> Outcome {
    let q = ScalarField::Rational;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let families = local_families(&q);
    let mut ok = true;
    for _ in 0..instances {
        let (_, s) = &families[rng.gen_range(0..families.len())];
        let x = random_nilpotent(s, &mut rng, |g| small_int(&q, g));
        ok &= exp_log_round_trip(s, &x);
    }
    let mut summands = 0;
    match (rational_line(), novikov_line()) {
        (Ok(a), Ok(b)) => {
            for holds in a.summands.iter().map(|s| s.exp_log_holds()).chain(b.summands.iter().map(|s| s.exp_log_holds())) {
                ok &= holds == Some(true);
                summands += 1;
            }
        }
        (Err(e), _) | (_, Err(e)) => return (false, e),
    }
    (ok, format!("{instances} random nilpotents, {summands} summands"))
}

/// `exp(log(1 + x)) = 1 + x` and `log(exp(x)) = x`.
pub fn exp_log_round_trip<F: Field>(s: &FiniteAlgebra<F>, x: &[F::Elem]) -> bool {
    let one_plus = s.add(&s.unit(), x);
    let forward = s.log_one_plus(x).and_then(|t| s.exp_nilpotent(&t));
    let backward = s.exp_nilpotent(x).and_then(|e| s.log_one_plus(&s.sub(&e, &s.unit())));
    forward.is_ok_and(|e| s.equal(&e, &one_plus)) && backward.is_ok_and(|l| s.equal(&l, x))
}

/// `d^2 = 0` on random conjugates of the associative families, `CC(delta)`
/// chain-map identity on random instances, and detection of the mutated sign.
pub fn criterion_hochschild(instances: usize, seed: u64) -> Outcome {
    const K_MAX: usize = 4;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let fields = [ScalarField::Prime(3), ScalarField::Prime(5), ScalarField::Rational];
    let (mut squares, mut chains, mut caught) = (0, 0, false);
    let mut failures = Vec::new();
    for i in 0..instances {
        let f = &fields[i % fields.len()];
        let families = hochschild::associative_families(f);
        let (name, alg, par) = &families[rng.gen_range(0..families.len())];
        let alg = hochschild::random_conjugate(alg, par, &mut rng, |g| small_int(f, g));
        let a = FiniteAInfinity::from_associative(&alg, par.clone()).expect("associative");
        let parity = rng.gen_range(0..2);
        // Arity 2 keeps d g within K_MAX = 4 inputs, where it is evaluated in full.
        let g = Cochain::random(f.clone(), par.clone(), parity, 2, &mut rng, |x| small_int(f, x));
        if hochschild::square_vanishes(&a, &g, K_MAX, Signs::Standard) {
            squares += 1;
        } else {
            failures.push(format!("d^2 on {name}"));
        }
        caught |= !hochschild::square_vanishes(&a, &g, K_MAX, Signs::Mutated);
    }
    let odd: Vec<_> = fields
        .iter()
        .flat_map(|f| hochschild::associative_families(f).into_iter().filter(|(_, _, p)| p.contains(&1)).map(move |x| (f.clone(), x)))
        .collect();
    for i in 0..instances {
        let (f, (name, alg, par)) = &odd[i % odd.len()];
        let alg = hochschild::random_conjugate(alg, par, &mut rng, |g| small_int(f, g));
        let a = FiniteAInfinity::from_associative(&alg, par.clone()).expect("associative");
        let families = local_families(f);
        let (_, s) = &families[rng.gen_range(1..families.len())];
        let delta: Vec<Vec<_>> = par
            .iter()
            .map(|&p| if p == 1 { random_nilpotent(s, &mut rng, |g| small_int(f, g)) } else { s.zero() })
            .collect();
        let parity = rng.gen_range(0..2);
        let g = Cochain::random(f.clone(), par.clone(), parity, 2, &mut rng, |x| small_int(f, x));
        match hochschild::chain_map_holds(&a, s, &delta, &g, 2) {
            Ok(true) => chains += 1,
            Ok(false) => failures.push(format!("chain map on {name}")),
            Err(e) => failures.push(format!("{name}: {e}")),
        }
    }
    let ok = failures.is_empty() && caught;
    (ok, format!("d^2 = 0 on {squares}/{instances}, chain map on {chains}/{instances}, mutation caught {caught}; {failures:?}"))
}

/// Pearl counts against binomials, with resampled offsets, for `CP^1` and `CP^2`.
pub fn criterion_pearl(line_bound: u32, plane_bound: u32, samples: usize, seed: u64) -> Outcome {
    let q = ScalarField::Rational;
    let cases = [
        (fans::projective_line(r(1), r(1)), line_bound, vec![q.from_int(2)]),
        (fans::projective_plane([r(1), r(1), r(1)]), plane_bound, vec![q.from_int(2), q.from_int(-3)]),
    ];
    let mut ok = true;
    let mut detail = Vec::new();
    for (toric, bound, xi) in cases {
        let w = Superpotential::build(&toric, &q, Mode::Monotone, Vec::new()).expect("standard fan");
        let md = match pearl::choose_morse_data(toric.normals(), seed) {
            Ok(md) => md,
            Err(e) => return (false, e.to_string()),
        };
        let checks = pearl::emptiness_checks(&md, toric.normals());
        let report = match pearl::oracle_compare(&md, &q, &xi, w.classes(), bound, samples, seed) {
            Ok(rep) => rep,
            Err(e) => return (false, e.to_string()),
        };
        let empty_ok = checks.iter().all(|c| c.passed);
        ok &= empty_ok && report.passed;
        let good = report.entries.iter().filter(|e| e.passed).count();
        detail.push(format!(
            "n={} q={:?} lambda={} entries {good}/{} emptiness {empty_ok}",
            toric.dimension(),
            md.q.iter().map(|x| x.to_string()).collect::<Vec<_>>(),
            md.lambda,
            report.entries.len()
        ));
    }
    (ok, detail.join("; "))
}

pub fn criterion_injectivity() -> Outcome {
    fn ranks<F: Field>(d: Result<Desk<F>, String>) -> Result<(bool, String), String> {
        let runs = floer_runs(&d?)?;
        let ok = runs.iter().all(|x| x.co_rank == x.dim && x.co_matches);
        let pairs: Vec<String> = runs.iter().map(|x| format!("{}/{}", x.co_rank, x.dim)).collect();
        Ok((ok, pairs.join(" ")))
    }
    or_fail((|| {
        let all = [
            ("CP1/F5", ranks(line_mod(5))?),
            ("CP1/F2", ranks(line_mod(2))?),
            ("CP2/F7", ranks(plane_mod(7))?),
            ("CP1/Novikov", ranks(novikov_line())?),
        ];
        let ok = all.iter().all(|(_, (o, _))| *o);
        Ok((ok, all.iter().map(|(n, (_, d))| format!("{n} [{d}]")).collect::<Vec<_>>().join(", ")))
    })())
}

/// Runs the battery. `Quick` uses smaller random samples and skips the
/// Novikov example; `Full` runs every criterion at full size.
pub fn verify_suite(level: Level, seed: u64) -> SuiteSummary {
    let full = level == Level::Full;
    let scale = |n: usize| if full { n } else { (n / 5).max(4) };
    let mut criteria = vec![
        timed(1, "CP1 over F5", 1.0, criterion_line_f5),
        timed(2, "CP1 over F2", 1.0, criterion_line_f2),
        timed(3, "CP2 over F7", 5.0, criterion_plane_f7),
    ];
    if full {
        criteria.push(timed(4, "Novikov CP1", 10.0, criterion_novikov_line));
    }
    criteria.push(timed(5, "bracket sweep", 60.0, || criterion_brackets(if full { 6 } else { 4 })));
    criteria.push(timed(6, "deformed brackets", 60.0, || criterion_deformed_brackets(scale(200), seed)));
    criteria.push(timed(7, "exp log", 30.0, || criterion_exp_log(scale(100), seed)));
    criteria.push(timed(8, "Hochschild guards", 60.0, || criterion_hochschild(scale(50), seed)));
    criteria.push(timed(9, "pearl oracle", 60.0, || criterion_pearl(4, 3, if full { 20 } else { 5 }, seed)));
    criteria.push(timed(10, "injectivity", 10.0, criterion_injectivity));
    let passed = criteria.iter().all(|c| c.passed);
    SuiteSummary { level, criteria, passed }
}
