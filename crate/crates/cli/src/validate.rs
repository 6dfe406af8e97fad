//! Self-test battery over the model metrics and the surface kernels,
//! exposed as the `validate` subcommand.

use starflow_core::ambient::{make_metric, DerivativeMode, MetricField, MetricSpec};
use starflow_core::linalg;
use starflow_core::surface::{geometry, RadialSurface, SphereGrid};
use starflow_core::Regime;

use crate::report::CheckRecord;

/// xorshift64*; deterministic across platforms
struct Rng(u64);

impl Rng {
    fn next_u64(&mut self) -> u64 {
        let mut x = self.0;
        x ^= x >> 12;
        x ^= x << 25;
        x ^= x >> 27;
        self.0 = x;
        x.wrapping_mul(0x2545F4914F6CDD1D)
    }

    fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        let u = (self.next_u64() >> 11) as f64 / (1u64 << 53) as f64;
        lo + (hi - lo) * u
    }
}

fn random_point(rng: &mut Rng, r_lo: f64, r_hi: f64) -> [f64; 3] {
    loop {
        let d = [
            rng.uniform(-1.0, 1.0),
            rng.uniform(-1.0, 1.0),
            rng.uniform(-1.0, 1.0),
        ];
        let n = linalg::norm(&d);
        if n > 1e-2 {
            let r = rng.uniform(r_lo, r_hi);
            return [d[0] / n * r, d[1] / n * r, d[2] / n * r];
        }
    }
}

fn metric_point_checks(
    name: &str,
    field: &MetricField<f64>,
    records: &mut Vec<CheckRecord>,
    rng: &mut Rng,
) {
    let r_lo = field.inner_radius() + 0.4;
    let mut worst_identity = 0.0f64;
    let mut worst_symmetry = 0.0f64;
    let mut all_spd = true;
    for _ in 0..100 {
        let p = random_point(rng, r_lo, r_lo + 7.0);
        let data = match field.metric_at(&p) {
            Ok(d) => d,
            Err(_) => {
                all_spd = false;
                continue;
            }
        };
        all_spd &= linalg::is_positive_definite(&data.g);
        let prod = linalg::mat_mul(&data.g_inv, &data.g);
        for i in 0..3 {
            for j in 0..3 {
                let expect = if i == j { 1.0 } else { 0.0 };
                worst_identity = worst_identity.max((prod[i][j] - expect).abs());
                for k in 0..3 {
                    worst_symmetry = worst_symmetry
                        .max((data.christoffel[k][i][j] - data.christoffel[k][j][i]).abs());
                }
            }
        }
    }
    records.push(CheckRecord::new(
        format!("{name}.positive_definite"),
        if all_spd { 1.0 } else { 0.0 },
        1.0,
        all_spd,
    ));
    records.push(CheckRecord::new(
        format!("{name}.inverse_identity"),
        worst_identity,
        1e-10,
        worst_identity <= 1e-10,
    ));
    records.push(CheckRecord::new(
        format!("{name}.christoffel_symmetry"),
        worst_symmetry,
        1e-12,
        worst_symmetry <= 1e-12,
    ));
}

fn scalar_curvature_check(
    name: &str,
    field: &MetricField<f64>,
    expected: f64,
    tol: f64,
    records: &mut Vec<CheckRecord>,
    rng: &mut Rng,
) {
    let r_lo = field.inner_radius() + 1.0;
    let mut worst = 0.0f64;
    for _ in 0..10 {
        let p = random_point(rng, r_lo, r_lo + 6.0);
        match field.curvature_at(&p) {
            Ok(c) => worst = worst.max((c.scalar - expected).abs()),
            Err(_) => worst = f64::INFINITY,
        }
    }
    records.push(CheckRecord::new(
        format!("{name}.scalar_curvature"),
        worst,
        tol,
        worst <= tol,
    ));
}

fn fd_agreement_check(
    name: &str,
    spec: MetricSpec<f64>,
    records: &mut Vec<CheckRecord>,
    rng: &mut Rng,
) {
    let exact = make_metric(spec.clone()).expect("model spec");
    let fd = MetricField::with_mode(spec, DerivativeMode::FiniteDifference { rel_step: 1e-5 })
        .expect("fd mode");
    let mut worst = 0.0f64;
    for _ in 0..20 {
        let p = random_point(rng, exact.inner_radius() + 1.0, exact.inner_radius() + 8.0);
        let (a, b) = match (exact.christoffel(&p), fd.christoffel(&p)) {
            (Ok(a), Ok(b)) => (a, b),
            _ => continue,
        };
        let mut scale = 1e-3f64;
        for k in 0..3 {
            for i in 0..3 {
                for j in 0..3 {
                    scale = scale.max(a[k][i][j].abs());
                }
            }
        }
        for k in 0..3 {
            for i in 0..3 {
                for j in 0..3 {
                    worst = worst.max((a[k][i][j] - b[k][i][j]).abs() / scale);
                }
            }
        }
    }
    records.push(CheckRecord::new(
        format!("{name}.fd_christoffel_agreement"),
        worst,
        1e-5,
        worst <= 1e-5,
    ));
}

type ScalarExpectation = Option<(f64, f64)>;

/// Run the full battery; one record per check.
pub fn run_battery() -> Vec<CheckRecord> {
    let mut records = Vec::new();
    let mut rng = Rng(0x5DEECE66D);

    let cases: Vec<(&str, MetricSpec<f64>, ScalarExpectation)> = vec![
        ("euclidean", MetricSpec::euclidean(), Some((0.0, 1e-10))),
        (
            "schwarzschild",
            MetricSpec::schwarzschild(1.0),
            Some((0.0, 1e-6)),
        ),
        ("hyperbolic", MetricSpec::hyperbolic(), Some((-6.0, 1e-8))),
        (
            "ads_schwarzschild",
            MetricSpec::ads_schwarzschild(0.5),
            Some((-6.0, 1e-6)),
        ),
        (
            "scaled_schwarzschild",
            MetricSpec::scaled(2.0, MetricSpec::schwarzschild(1.0)),
            Some((0.0, 1e-6)),
        ),
    ];
    for (name, spec, scalar) in cases {
        let field = make_metric(spec).expect("model spec builds");
        metric_point_checks(name, &field, &mut records, &mut rng);
        if let Some((expected, tol)) = scalar {
            scalar_curvature_check(name, &field, expected, tol, &mut records, &mut rng);
        }
    }
    fd_agreement_check(
        "schwarzschild",
        MetricSpec::schwarzschild(1.0),
        &mut records,
        &mut rng,
    );
    fd_agreement_check(
        "hyperbolic",
        MetricSpec::hyperbolic(),
        &mut records,
        &mut rng,
    );

    // surface kernels on model spheres
    let grid = SphereGrid::new(32, 64).expect("grid");
    let euclid = make_metric(MetricSpec::<f64>::euclidean()).unwrap();
    let s = RadialSurface::round([0.0; 3], 1.0, grid).unwrap();
    let g = geometry(&s, &euclid).unwrap();
    let pi = std::f64::consts::PI;
    let area_err = (g.area - 4.0 * pi).abs();
    records.push(CheckRecord::new(
        "sphere.area",
        area_err,
        1e-10,
        area_err <= 1e-10,
    ));
    let h_err = (g.h_min - 2.0).abs().max((g.h_max - 2.0).abs());
    records.push(CheckRecord::new(
        "sphere.mean_curvature",
        h_err,
        1e-6,
        h_err <= 1e-6,
    ));
    let margin_err = (g.margin_min - 1.0).abs();
    records.push(CheckRecord::new(
        "sphere.star_margin",
        margin_err,
        1e-8,
        margin_err <= 1e-8,
    ));
    let m_h = starflow_core::surface::hawking_mass(&g, Regime::Flat);
    records.push(CheckRecord::new(
        "sphere.hawking_mass",
        m_h.abs(),
        1e-8,
        m_h.abs() <= 1e-8,
    ));

    let hyp = make_metric(MetricSpec::<f64>::hyperbolic()).unwrap();
    let sh = RadialSurface::round([0.0; 3], 1.0, SphereGrid::new(32, 64).unwrap()).unwrap();
    let gh = geometry(&sh, &hyp).unwrap();
    let area_err = (gh.area - 4.0 * pi * 1.0f64.sinh().powi(2)).abs();
    records.push(CheckRecord::new(
        "hyperbolic_sphere.area",
        area_err,
        1e-8,
        area_err <= 1e-8,
    ));
    let h_exact = 2.0 / 1.0f64.tanh();
    let h_err = (gh.h_min - h_exact).abs().max((gh.h_max - h_exact).abs());
    records.push(CheckRecord::new(
        "hyperbolic_sphere.mean_curvature",
        h_err,
        1e-8,
        h_err <= 1e-8,
    ));
    let mhs = starflow_core::surface::hawking_mass(&gh, Regime::Hyperbolic);
    records.push(CheckRecord::new(
        "hyperbolic_sphere.hawking_mass",
        mhs.abs(),
        1e-8,
        mhs.abs() <= 1e-8,
    ));

    records
}
