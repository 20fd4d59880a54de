use paisc_bench::{
    brute_force, gen_relu_patterns, gen_sphere, gen_torus, make_truth, resolve, Fixture, FixtureStore, Provenance,
    ORACLE_SAMPLES, ORACLE_SEED,
};
use std::f64::consts::{FRAC_PI_2, PI, SQRT_2};

fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    let h = (b - a) / n as f64;
    let mut s = f(a) + f(b);
    for i in 1..n {
        s += if i % 2 == 1 { 4.0 } else { 2.0 } * f(a + i as f64 * h);
    }
    s * h / 3.0
}

fn phi(x: f64) -> f64 {
    (-0.5 * x * x).exp() / (2.0 * PI).sqrt()
}

/// Standard normal mass of `[1 - s, 1 + s]`.
fn slab(s: f64) -> f64 {
    0.5 * (libm::erf((1.0 + s) / SQRT_2) - libm::erf((1.0 - s) / SQRT_2))
}

/// P(|x - 1|^2 <= 1) for x ~ N(0, I_d) by quadrature, d <= 3. The last
/// coordinate is integrated in closed form; the rest use a sine substitution
/// that removes the square-root singularity at the rim.
fn sphere_quadrature(d: usize) -> f64 {
    match d {
        1 => slab(1.0),
        2 => simpson(|t| phi(1.0 + t.sin()) * slab(t.cos()) * t.cos(), -FRAC_PI_2, FRAC_PI_2, 4000),
        3 => simpson(
            |a| {
                let r = a.sin();
                let inner = simpson(|w| phi(1.0 + r * w.cos()) * phi(1.0 + r * w.sin()), 0.0, 2.0 * PI, 400);
                inner * slab(a.cos()) * r * a.cos()
            },
            0.0,
            FRAC_PI_2,
            1000,
        ),
        _ => unreachable!(),
    }
}

#[test]
fn sphere_truths_match_quadrature() {
    for d in 1..=3 {
        let got = gen_sphere(d).unwrap().truth.unwrap().value;
        let want = sphere_quadrature(d);
        assert!(((got - want) / want).abs() < 1e-6, "d={d}: {got} vs {want}");
    }
}

#[test]
fn one_dimensional_sphere_value() {
    let t = gen_sphere(1).unwrap().truth.unwrap();
    assert!((t.value - 0.47725).abs() < 1e-5);
    assert_eq!(t.provenance, Provenance::Analytic);
}

#[test]
fn sphere_truths_decrease_with_dimension() {
    let ts: Vec<f64> = (1..=10).map(|d| gen_sphere(d).unwrap().truth.unwrap().value).collect();
    for w in ts.windows(2) {
        assert!(w[1] < w[0], "{ts:?}");
    }
    assert!(ts[9] > 0.0);
}

#[test]
fn torus_points_and_truth() {
    let t = gen_torus(false);
    assert_eq!(t.constraint.indicator(&[3.0, 0.0, 0.0]), 1);
    assert_eq!(t.constraint.indicator(&[0.0, 0.0, 0.0]), 0);

    let stored = resolve("torus", &FixtureStore::from_env()).unwrap();
    let truth = stored[0].truth.as_ref().unwrap();
    assert!(truth.value > 0.0 && truth.value < 1e-3, "{}", truth.value);
    assert!(matches!(truth.provenance, Provenance::BruteForce { .. }));
}

#[test]
fn relu_pattern_counts_and_atoms() {
    let subjects = gen_relu_patterns(5, 5, 2021).unwrap();
    assert_eq!(subjects.len(), 32);
    for s in &subjects {
        assert_eq!(s.constraint.atoms().len(), 5);
        assert_eq!(s.constraint.dim(), 5);
    }
    assert!(gen_relu_patterns(2, 13, 1).is_err());
}

#[test]
fn single_unit_patterns_partition_the_domain() {
    let subjects = gen_relu_patterns(3, 1, 99).unwrap();
    assert_eq!(subjects.len(), 2);
    let fx = brute_force(&subjects, 200_000, 4).unwrap();
    let total: f64 = fx.iter().map(|f| f.truth).sum();
    assert!((total - 1.0).abs() < 1e-9, "{total}");
}

#[test]
fn cached_fixtures_carry_oracle_settings() {
    let dir = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures");
    let mut n = 0;
    for entry in std::fs::read_dir(dir).unwrap() {
        let text = std::fs::read_to_string(entry.unwrap().path()).unwrap();
        let f: Fixture = serde_json::from_str(&text).unwrap();
        assert_eq!(f.oracle_samples, ORACLE_SAMPLES, "{}", f.subject);
        assert_eq!(f.oracle_seed, ORACLE_SEED, "{}", f.subject);
        assert!(f.truth > 0.0 && f.truth <= 1.0);
        n += 1;
    }
    assert_eq!(n, 34);
}

#[test]
fn relu_fixture_truths_sum_to_one() {
    let subjects = resolve("relu", &FixtureStore::from_env()).unwrap();
    let total: f64 = subjects.iter().map(|s| s.truth.as_ref().unwrap().value).sum();
    assert!((total - 1.0).abs() < 1e-9, "{total}");
}

#[test]
fn make_truth_writes_fixture() {
    let dir = tempfile::tempdir().unwrap();
    let store = FixtureStore::new(dir.path());
    let written = make_truth("torus-correlated", &store, 100_000, 5).unwrap();
    assert_eq!(written.len(), 1);
    let (f, path) = &written[0];
    assert!(path.exists());
    assert_eq!((f.oracle_samples, f.oracle_seed), (100_000, 5));
    let loaded = store.load("torus-correlated").unwrap().unwrap();
    assert_eq!(&loaded, f);
    assert!((loaded.truth - 4.93e-3).abs() < 1.5e-3, "{}", loaded.truth);
}

#[test]
fn unknown_subject_lists_builtins() {
    let err = resolve("no-such-subject", &FixtureStore::from_env()).unwrap_err();
    assert!(err.to_string().contains("sphere-<d>"), "{err}");
}
