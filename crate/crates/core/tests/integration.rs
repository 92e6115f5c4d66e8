use toric_core::config::{Overrides, PipelineConfig};
use toric_core::floer::{self, Action, BoundingCochain, FloerModel, Model};
use toric_core::hochschild::{self, coefficients, Deformed, Slot};
use toric_core::pipeline::{self, run_pipeline};
use toric_core::scalar::{Field, Rat, ScalarField};
use toric_core::suite;
use toric_core::toric::{fans, Mode, Superpotential};

fn write(dir: &std::path::Path, name: &str, text: &str) -> std::path::PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

#[test]
fn toml_pipeline_is_cached_and_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "plane.toml", "dimension = 2\nnormals = [[1, 0], [0, 1], [-1, -1]]\nareas = [\"1\", \"1\", \"1\"]\nfield = { char = 7 }\n");
    let run = write(dir.path(), "run.toml", "toric = \"plane.toml\"\nseed = 3\ncache = \"gb\"\nlevel = \"full\"\n");
    let cfg = PipelineConfig::load(&run, &Overrides::default()).unwrap();
    let first = run_pipeline(&cfg).unwrap();
    let cached: Vec<_> = std::fs::read_dir(dir.path().join("gb")).unwrap().collect();
    assert_eq!(cached.len(), 1);
    let second = run_pipeline(&cfg).unwrap();
    assert_eq!(first.to_json(), second.to_json());
    assert!(first.passed);
    let mut pots: Vec<String> = first.summands.iter().map(|s| s.models[0].potential.clone()).collect();
    pots.sort();
    assert_eq!(pots, ["(3)e0", "(5)e0", "(6)e0"]);

    let other = PipelineConfig::load(&run, &Overrides { seed: Some(4), ..Overrides::default() }).unwrap();
    let third = run_pipeline(&other).unwrap();
    // A new seed changes the pearl data but not the Groebner key.
    assert_eq!(std::fs::read_dir(dir.path().join("gb")).unwrap().count(), 1);
    assert_eq!(first.jacobian.groebner, third.jacobian.groebner);
}

#[test]
fn novikov_config_runs() {
    let dir = tempfile::tempdir().unwrap();
    let path = write(
        dir.path(),
        "line.json",
        r#"{"dimension": 1, "normals": [[1], [-1]], "areas": ["1", "2"], "field": "rational", "precision": "5", "mode": "novikov"}"#,
    );
    let mut cfg = PipelineConfig::load(&path, &Overrides::default()).unwrap();
    cfg.level = toric_core::config::Level::Full;
    let report = run_pipeline(&cfg).unwrap();
    assert!(report.passed, "{}", report.to_json());
    assert!(report.summands.iter().all(|s| s.valuation == ["1/2"] && s.models.len() == 2));
}

#[test]
fn corrections_need_valid_pairings() {
    let dir = tempfile::tempdir().unwrap();
    let path = write(
        dir.path(),
        "bad.json",
        r#"{"dimension": 1, "normals": [[1], [-1]], "areas": ["1", "1"], "mode": "novikov", "precision": "4",
            "corrections": [{"area": "3", "boundary": [0], "coeff": "5", "pairing": [1, 1]}]}"#,
    );
    let err = PipelineConfig::load(&path, &Overrides::default()).unwrap_err();
    assert!(err.to_string().contains("pairing"), "{err}");
}

/// The curvature and differential of the degree-one sector deformed by
/// `delta = sum z_j (x) psi_j`, computed by the Hochschild machinery, equal the
/// Floer-side potential and `m_1^delta`.
fn sector_matches_floer<F: Field>(w: &Superpotential, action: &Action<F>) {
    let field = action.field();
    let n = action.rank();
    let s = &action.algebra;
    let fm = FloerModel::new(w, action).unwrap();
    let delta = BoundingCochain::for_action(action, Model::Pearl).unwrap();
    let ones = vec![field.one(); n];
    let bracket = |c: &[u32]| {
        w.classes().iter().zip(&fm.weights).fold(field.zero(), |acc, (b, t)| {
            let xi_b = floer::character_value(field, &action.xi, &b.boundary);
            let v = field.mul(&floer::binomial_form(field, &ones, b, c), &field.mul(&xi_b, t));
            field.add(&acc, &v)
        })
    };
    let sector = hochschild::degree_one_sector(field, n, s.dim() + 1, bracket).unwrap();
    let mut coeffs = vec![s.zero()];
    coeffs.extend(delta.coefficients.iter().cloned());
    let def = Deformed::new(&sector, s, &coeffs).unwrap();
    let report = def.report(&sector);
    let potential = fm.weak_bounding_check(&delta).unwrap();
    assert!(s.equal(report.potential.as_ref().unwrap(), &potential.definition));
    let ops = def.operations();
    for (j, d) in fm.deformed_differential(&delta).unwrap().iter().enumerate() {
        let mut e = vec![field.zero(); n + 1];
        e[j + 1] = field.one();
        let input = hochschild::tensor(s, &e, &s.unit());
        let out = coefficients(s, &hochschild::apply(&ops, &[Slot::Vector(&input)]));
        assert!(s.equal(&out[0], &d.definition), "m_1 on z_{}", j + 1);
    }
}

#[test]
fn hochschild_sector_reproduces_floer_side() {
    let d = suite::line_mod(2).unwrap();
    for s in &d.summands {
        sector_matches_floer(&d.w, &Action::from_summand(s));
    }
    let d = suite::plane_mod(7).unwrap();
    for s in &d.summands {
        sector_matches_floer(&d.w, &Action::from_summand(s));
    }
    // A non-trivial action on F_5[e]/e^3 over CP^2.
    let f = ScalarField::prime(5).unwrap();
    let s = toric_core::algebra::monomial_algebra(f.clone(), &[vec![0], vec![1], vec![2]]);
    let rho = vec![s.add(&s.unit(), &s.basis(1)), s.scale(&s.add(&s.unit(), &s.basis(2)), &f.from_int(2))];
    let action = Action::new(s.clone(), vec![f.one(), f.from_int(2)], rho).unwrap();
    let w = Superpotential::build(&fans::projective_plane([Rat::from_integer(1); 3]), &f, Mode::Monotone, vec![]).unwrap();
    sector_matches_floer(&w, &action);
}

#[test]
fn potential_and_jacobian_views() {
    let dir = tempfile::tempdir().unwrap();
    let path = write(dir.path(), "line.json", r#"{"dimension": 1, "normals": [[1], [-1]], "areas": ["1", "1"], "field": {"char": 5}}"#);
    let cfg = PipelineConfig::load(&path, &Overrides::default()).unwrap();
    let w = pipeline::potential_text(&cfg).unwrap();
    assert_eq!(w, "(1)*tau^(-1) + (1)*tau^(1)");
    assert_eq!(pipeline::jacobian_only(&cfg).unwrap().dim, 2);
}
