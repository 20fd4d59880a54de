use paisc::distributions::{sample_covariance, Factor};
use paisc::estimators::{box_mass, compose_product, dmc_estimate, stratified_estimate, EstimateReport};
use paisc::interval::pave;
use paisc::{Constraint, Distribution, Interval, IntervalBox, RngStream, Univariate};

/// Composite Simpson rule on [a, b] with n (even) panels.
fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    let h = (b - a) / n as f64;
    let mut s = f(a) + f(b);
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        s += w * f(a + i as f64 * h);
    }
    s * h / 3.0
}

fn circle() -> (Constraint, Distribution) {
    let c = Constraint::parse("x*x + y*y <= 1", "x -2 2\ny -2 2").unwrap();
    let u = Univariate::uniform(-2.0, 2.0).unwrap();
    (c, Distribution::independent(vec![u, u]).unwrap())
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(|a, b| a.total_cmp(b));
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

#[test]
fn univariate_densities_integrate_to_one() {
    let cases = [
        (Univariate::gaussian(1.0, 2.0).unwrap(), -30.0, 30.0),
        (Univariate::student_t(3.0, 0.0, 1.0).unwrap(), -4000.0, 4000.0),
        (Univariate::truncated_gaussian(0.0, 1.0, -0.5, 2.0).unwrap(), -0.5, 2.0),
        (Univariate::uniform(-1.0, 3.0).unwrap(), -1.0, 3.0),
    ];
    for (u, a, b) in cases {
        let z = simpson(|x| u.log_pdf(x).exp(), a, b, 400_000);
        assert!((z - 1.0).abs() < 1e-3, "{u:?} integrates to {z}");
    }
}

#[test]
fn bivariate_densities_integrate_to_one() {
    let mv = Distribution::mv_gaussian(vec![-2.0, -2.0], vec![vec![0.2, 0.1], vec![0.1, 0.2]]).unwrap();
    let chain = Distribution::chain(vec![
        Factor { dist: Univariate::gaussian(0.0, 0.5).unwrap(), loc_from: None },
        Factor { dist: Univariate::gaussian(0.0, 0.5).unwrap(), loc_from: Some(0) },
    ])
    .unwrap();
    for (p, c) in [(mv, -2.0), (chain, 0.0)] {
        let z = simpson(
            |x| simpson(|y| p.log_density(&[x, y]).exp(), c - 6.0, c + 6.0, 600),
            c - 6.0,
            c + 6.0,
            600,
        );
        assert!((z - 1.0).abs() < 1e-3, "{p:?} integrates to {z}");
    }
}

#[test]
fn uniform_sample_mean() {
    let p = Distribution::independent(vec![Univariate::uniform(0.0, 1.0).unwrap()]).unwrap();
    let xs = p.sample(RngStream::new(3, 0), 100_000);
    let m = xs.iter().map(|x| x[0]).sum::<f64>() / xs.len() as f64;
    assert!((m - 0.5).abs() < 0.01, "mean {m}");
}

#[test]
fn mv_gaussian_sample_covariance() {
    let cov = vec![vec![0.2, 0.1], vec![0.1, 0.2]];
    let p = Distribution::mv_gaussian(vec![-2.0, -2.0], cov.clone()).unwrap();
    let s = sample_covariance(&p.sample(RngStream::new(11, 0), 100_000));
    let (mut num, mut den) = (0.0, 0.0);
    for i in 0..2 {
        for j in 0..2 {
            num += (s[(i, j)] - cov[i][j]).powi(2);
            den += cov[i][j].powi(2);
        }
    }
    assert!((num / den).sqrt() < 0.05);
}

#[test]
fn far_tail_truncated_mean_matches_quadrature() {
    let u = Univariate::standard_normal();
    let phi = |x: f64| (-0.5 * x * x).exp();
    let want = simpson(|x| x * phi(x), 5.0, 6.0, 20_000) / simpson(phi, 5.0, 6.0, 20_000);
    let mut rng = RngStream::new(5, 0).rng();
    let n = 100_000;
    let mut sum = 0.0;
    for _ in 0..n {
        let x = u.sample_truncated(5.0, 6.0, &mut rng).unwrap();
        assert!((5.0..=6.0).contains(&x));
        sum += x;
    }
    let got = sum / n as f64;
    // Truncated sd is below 0.2, so 3 standard errors are under 2e-3.
    assert!((got - want).abs() < 2e-3, "{got} vs {want}");
}

#[test]
fn gaussian_box_mass_matches_erf() {
    let p = Distribution::std_normal(1);
    let b = IntervalBox::new(vec![Interval::new(0.0, 2.0)]);
    let want = 0.5 * quad_erf(2.0 / std::f64::consts::SQRT_2);
    assert!((box_mass(&p, &b).unwrap() - want).abs() < 1e-12);
    assert!((want - 0.47725).abs() < 1e-5);
}

/// erf by quadrature of its defining integral.
fn quad_erf(x: f64) -> f64 {
    2.0 / std::f64::consts::PI.sqrt() * simpson(|t| (-t * t).exp(), 0.0, x, 20_000)
}

#[test]
fn product_variance_matches_simulation() {
    let factors = [(0.3, 4e-3), (0.6, 9e-3), (0.8, 1e-3)];
    let reports: Vec<EstimateReport> = factors
        .iter()
        .map(|&(m, v)| EstimateReport { mean: m, variance: v, n_samples: 1, trace: Vec::new() })
        .collect();
    let got = compose_product(&reports);

    let mut rng = RngStream::new(17, 0).rng();
    let gs: Vec<Univariate> = factors
        .iter()
        .map(|&(m, v)| Univariate::gaussian(m, f64::sqrt(v)).unwrap())
        .collect();
    let n = 400_000;
    let (mut s1, mut s2) = (0.0, 0.0);
    for _ in 0..n {
        let prod: f64 = gs.iter().map(|g| g.sample(&mut rng)).product();
        s1 += prod;
        s2 += prod * prod;
    }
    let mean = s1 / n as f64;
    let var = s2 / n as f64 - mean * mean;
    assert!((got.mean - 0.3 * 0.6 * 0.8).abs() < 1e-15);
    assert!((got.variance - var).abs() / var < 0.05, "{} vs {var}", got.variance);
}

#[test]
fn dmc_circle_within_three_std_errors() {
    let (c, p) = circle();
    let r = dmc_estimate(&c, &p, 1_000_000, RngStream::new(2021, 0));
    let truth = std::f64::consts::PI / 16.0;
    assert!((r.mean - truth).abs() < 3.0 * r.std_error(), "{} ± {}", r.mean, r.std_error());
}

#[test]
fn stratified_dominates_dmc_on_circle() {
    let (c, p) = circle();
    let paving = pave(&c, 0.01, 1024);
    let (mut sv, mut dv) = (Vec::new(), Vec::new());
    for rep in 0..20 {
        let s = RngStream::new(rep, 0);
        sv.push(stratified_estimate(&c, &p, &paving, 10_000, s).unwrap().variance);
        dv.push(dmc_estimate(&c, &p, 10_000, s.derive(1)).variance);
    }
    assert!(median(sv) <= median(dv));
}

#[test]
fn estimators_are_deterministic() {
    let (c, p) = circle();
    let a = dmc_estimate(&c, &p, 50_001, RngStream::new(9, 4));
    let b = dmc_estimate(&c, &p, 50_001, RngStream::new(9, 4));
    assert_eq!(a, b);
    let paving = pave(&c, 0.05, 256);
    let a = stratified_estimate(&c, &p, &paving, 20_000, RngStream::new(9, 5)).unwrap();
    let b = stratified_estimate(&c, &p, &paving, 20_000, RngStream::new(9, 5)).unwrap();
    assert_eq!(a, b);
}
