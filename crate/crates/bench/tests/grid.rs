use paisc_bench::{
    circle, gen_sphere, resolve, run_grid, summarize, write_csv, CellOutcome, FixtureStore, GridConfig, Method,
    MethodParams, Row, CSV_HEADER,
};

fn config(methods: Vec<Method>, budget: u64, reps: u32, seed: u64) -> GridConfig {
    GridConfig {
        methods,
        budgets: vec![budget],
        repetitions: reps,
        base_seed: seed,
        params: MethodParams::default(),
        timing: false,
    }
}

fn csv_bytes(rows: &[Row]) -> Vec<u8> {
    let mut out = Vec::new();
    write_csv(rows, &mut out).unwrap();
    out
}

fn median_rae(rows: &[Row], m: Method) -> f64 {
    summarize(rows)
        .into_iter()
        .find(|s| s.method == m)
        .and_then(|s| s.median_rae)
        .unwrap()
}

#[test]
fn single_cell_grid_has_one_row() {
    let rows = run_grid(&[circle()], &config(vec![Method::Dmc], 1000, 1, 3)).unwrap();
    assert_eq!(rows.len(), 1);
    let text = String::from_utf8(csv_bytes(&rows)).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), CSV_HEADER.join(","));
    let fields: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(fields.len(), 10);
    assert_eq!(&fields[..4], &["circle", "dmc", "1000", "0"]);
    assert_eq!(fields[9], "");
}

#[test]
fn stratified_on_correlated_torus_is_not_applicable() {
    let subjects = resolve("torus-correlated", &FixtureStore::from_env()).unwrap();
    let rows = run_grid(&subjects, &config(vec![Method::Stratified], 1000, 2, 1)).unwrap();
    assert_eq!(rows.len(), 2);
    for r in &rows {
        assert!(matches!(r.outcome, CellOutcome::NotApplicable(_)));
    }
    let text = String::from_utf8(csv_bytes(&rows)).unwrap();
    assert!(text.lines().nth(1).unwrap().ends_with(",0,NA,NA,NA,"));
    assert!(summarize(&rows)[0].not_applicable);
}

#[test]
fn identical_seed_gives_identical_csv() {
    let subjects = [circle(), gen_sphere(3).unwrap()];
    let cfg = config(vec![Method::Dmc, Method::Stratified, Method::Sympais], 60_000, 2, 77);
    let a = csv_bytes(&run_grid(&subjects, &cfg).unwrap());
    let b = csv_bytes(&run_grid(&subjects, &cfg).unwrap());
    assert_eq!(a, b);
    let other = csv_bytes(&run_grid(&subjects, &config(cfg.methods.clone(), 60_000, 2, 78)).unwrap());
    assert_ne!(a, other);
}

#[test]
fn sympais_beats_dmc_on_two_dimensional_sphere() {
    let rows = run_grid(&[gen_sphere(2).unwrap()], &config(vec![Method::Dmc, Method::Sympais], 100_000, 10, 42)).unwrap();
    let median_var = |m: Method| {
        let mut v: Vec<f64> = rows
            .iter()
            .filter(|r| r.method == m)
            .map(|r| match r.outcome {
                CellOutcome::Estimate { variance, .. } => variance,
                CellOutcome::NotApplicable(_) => unreachable!(),
            })
            .collect();
        v.sort_by(f64::total_cmp);
        0.5 * (v[4] + v[5])
    };
    let (dmc, sym) = (median_var(Method::Dmc), median_var(Method::Sympais));
    assert!(sym < 0.8 * dmc, "sympais {sym} vs dmc {dmc}");
}

#[test]
fn sympais_recovers_correlated_torus_truth() {
    let subjects = resolve("torus-correlated", &FixtureStore::from_env()).unwrap();
    let rows = run_grid(&subjects, &config(vec![Method::Sympais], 100_000, 10, 8)).unwrap();
    let rae = median_rae(&rows, Method::Sympais);
    assert!(rae < 0.1, "median RAE {rae}");
}
