//! Acceptance suite: one test per criterion, each printing a pass/fail line
//! with its elapsed time. Run with `cargo test --test acceptance -- --nocapture`
//! to see the lines on success.

use std::f64::consts::TAU;
use std::time::Instant;

use num_complex::Complex64;

use equiflow::decomposition::{
    basin_classify, decompose, h_vector, poincare_polynomial, unstable_dims,
    verify_convergence_condition, verify_hyperbolic, RunSettings,
};
use equiflow::flow::{
    flow_equivariance_check, flow_exact, flow_rk4, limit, limit_by_trajectory,
    time_one_map_eigenvalues, Direction, ExponentTable, TrajectoryOptions,
};
use equiflow::metric::{
    global_field_norm, verify_closed_form_agreement, verify_norm_decay, PartitionOfUnity,
};
use equiflow::models::toric::{hirzebruch_fan, projective_fan};
use equiflow::models::verify::{
    infer_tangential_weights_numeric, verify_all_charts_equivariance, verify_covering,
};
use equiflow::models::{FixedPointId, Model, ModelDescriptor, Point};
use equiflow::sampling::{rng_for, sample_generic_batch, sample_stratified};
use equiflow::torus::parse_rational;
use equiflow::{GeneratorVector, ToleranceSet};

fn cp(n: usize) -> Model {
    Model::from_descriptor(&ModelDescriptor::Projective {
        dimension: n,
        coordinate_weights: None,
    })
    .unwrap()
}

fn sphere(n: usize) -> Model {
    Model::from_descriptor(&ModelDescriptor::Sphere { half_dimension: n }).unwrap()
}

fn toric(fan: equiflow::models::Fan) -> Model {
    Model::from_descriptor(&ModelDescriptor::Toric { fan }).unwrap()
}

fn a0(s: &str) -> GeneratorVector {
    GeneratorVector::parse(s).unwrap()
}

struct Criterion {
    name: &'static str,
    budget_s: f64,
    start: Instant,
}

impl Criterion {
    fn begin(name: &'static str, budget_s: f64) -> Self {
        Criterion {
            name,
            budget_s,
            start: Instant::now(),
        }
    }

    fn finish(self) {
        let elapsed = self.start.elapsed().as_secs_f64();
        println!("PASS {} [{elapsed:.2} s / budget {} s]", self.name, self.budget_s);
        assert!(
            elapsed < self.budget_s,
            "{} exceeded its time budget: {elapsed:.2} s",
            self.name
        );
    }
}

#[test]
fn criterion_01_hyperbolicity_exact_eigenvalue_table() {
    let crit = Criterion::begin("criterion 1 (hyperbolicity, exact pairings and eigenvalues)", 1.0);
    let model = cp(2);
    let gen = a0("1/3,1/7");
    let report = verify_hyperbolic(&model, &gen).unwrap();
    assert!(report.verdict.pass, "{:?}", report.verdict);
    assert_eq!(report.exponent_table.len(), 6);
    for row in &report.exponent_table {
        let q = parse_rational(&row.pairing).unwrap();
        assert!(*q.numer() != 0, "pairing must be nonzero: {row:?}");
    }
    // eigenvalue table: {e^{−a_i}} with multiplicity 2 at each fixed point
    for fp in model.fixed_points() {
        let eig = time_one_map_eigenvalues(&model, &gen, fp.id).unwrap();
        assert_eq!(eig.len(), 4);
        for (i, m) in fp.weights.iter().enumerate() {
            let a = TAU * {
                let q = equiflow::torus::pairing(m, &gen).unwrap();
                *q.numer() as f64 / *q.denom() as f64
            };
            let expected = (-a).exp();
            assert!((eig[2 * i] - expected).abs() < 1e-14);
            assert!((eig[2 * i + 1] - expected).abs() < 1e-14);
            assert!((expected - 1.0).abs() > 1e-9, "hyperbolic: no unit eigenvalue");
        }
    }
    crit.finish();
}

#[test]
fn criterion_02_morse_indices_and_poincare() {
    let crit = Criterion::begin("criterion 2 (Morse indices and Poincaré polynomials)", 5.0);
    let generators = ["1", "1/3,1/7", "1/3,1/7,1/11"];
    for n in 1..=3usize {
        let model = cp(n);
        let gen = a0(generators[n - 1]);
        let mut dims = unstable_dims(&model, &gen).unwrap();
        dims.sort_unstable();
        let expected: Vec<usize> = (0..=n).map(|k| 2 * k).collect();
        assert_eq!(dims, expected, "CP^{n} indices");
        let poincare = poincare_polynomial(&model, &gen).unwrap();
        let mut want = vec![0i64; 2 * n + 1];
        for k in 0..=n {
            want[2 * k] = 1;
        }
        assert_eq!(poincare, want, "CP^{n} Poincaré polynomial");
    }
    let f1 = hirzebruch_fan();
    let hv = h_vector(&f1);
    assert_eq!(hv, vec![1, 2, 1], "independent h-vector of the Hirzebruch fan");
    let model = toric(f1);
    let poincare = poincare_polynomial(&model, &a0("1/3,1/7")).unwrap();
    assert_eq!(poincare, vec![1, 0, 2, 0, 1]);
    for (k, h) in hv.iter().enumerate() {
        assert_eq!(poincare[2 * k], *h, "h_{k} equals the 2k-th Betti coefficient");
    }
    crit.finish();
}

#[test]
fn criterion_03_convergence_condition_10k_samples() {
    let crit = Criterion::begin(
        "criterion 3 (convergence: 10^4 samples, trajectory = analytic on 100%)",
        60.0,
    );
    let model = cp(2);
    let gen = a0("1/3,1/7");
    let tols = ToleranceSet::default();
    assert_eq!(tols.limit_detection, 1e-9);
    let samples = sample_stratified(&model, 10_000, &mut rng_for(1003, 1));
    assert_eq!(samples.len(), 10_000);
    // forward and backward limits land on fixed points, and the
    // trajectory-following classification agrees with the analytic argmin
    let basins = basin_classify(&model, &gen, &samples, &tols).unwrap();
    assert!(basins.agreement.pass, "disagreements: {:?}", basins.agreement.witnesses);
    let classified: usize = basins.basin_counts.values().sum();
    assert_eq!(classified, 10_000);
    let co_classified: usize = basins.co_basin_counts.values().sum();
    assert_eq!(co_classified, 10_000);
    let convergence = verify_convergence_condition(&model, &gen, &samples, &tols).unwrap();
    assert!(convergence.pass(), "{convergence:?}");
    crit.finish();
}

#[test]
fn criterion_04_flow_equivariance_thousand_triples() {
    let crit = Criterion::begin("criterion 4 (flow equivariance on 10^3 triples, 1e-9)", 10.0);
    let model = cp(2);
    let gen = a0("1/3,1/7");
    let v = flow_equivariance_check(&model, &gen, 1000, 1e-9, &mut rng_for(1004, 1)).unwrap();
    assert!(v.pass, "{v:?}");
    crit.finish();
}

#[test]
fn criterion_05_zero_set_equality() {
    let crit = Criterion::begin("criterion 5 (zero set: 0 at fixed points, > 1e-3 generically)", 10.0);
    let model = cp(2);
    let gen = a0("1/3,1/7");
    let table = ExponentTable::new(&model, &gen).unwrap();
    let pou = PartitionOfUnity::default();
    for fp in model.fixed_points() {
        let x = model.fixed_point_position(fp.id).unwrap();
        let norm = global_field_norm(&model, &table, &pou, &x).unwrap();
        assert!(norm < 1e-12, "norm {norm:.3e} at {}", fp.label);
    }
    let samples = sample_generic_batch(&model, 10_000, &mut rng_for(1005, 1));
    for (i, x) in samples.iter().enumerate() {
        let norm = global_field_norm(&model, &table, &pou, x).unwrap();
        assert!(norm > 1e-3, "sample {i} has field norm {norm:.3e}");
    }
    crit.finish();
}

#[test]
fn criterion_06_norm_decay() {
    let crit = Criterion::begin(
        "criterion 6 (norm decay: closed form 1e-10, horizon norm < 1e-6 both directions)",
        30.0,
    );
    let model = cp(2);
    let gen = a0("1/3,1/7");
    let tols = ToleranceSet::default();
    let agreement =
        verify_closed_form_agreement(&model, &gen, 100, tols.metric_closed_form, &mut rng_for(1006, 1))
            .unwrap();
    assert!(agreement.pass, "{agreement:?}");
    assert!(agreement.max_violation < 1e-10);
    let decay = verify_norm_decay(&model, &gen, 100, &tols, &mut rng_for(1006, 2)).unwrap();
    assert!(decay.pass, "{decay:?}");
    assert!(decay.max_violation < 1e-6);
    crit.finish();
}

#[test]
fn criterion_07_covering_and_chart_equivariance() {
    let crit = Criterion::begin(
        "criterion 7 (covering 10^4 samples, chart equivariance 10^3 trials at 1e-10)",
        30.0,
    );
    let models: Vec<(&str, Model)> = vec![
        ("cp1", cp(1)),
        ("cp2", cp(2)),
        ("cp3", cp(3)),
        ("s2", sphere(1)),
        ("s4", sphere(2)),
    ];
    for (name, model) in &models {
        let samples = sample_stratified(model, 10_000, &mut rng_for(1007, 1));
        let covering = verify_covering(model, &samples, None);
        assert!(covering.verdict.pass, "{name}: {} misses", covering.missed);
        assert_eq!(covering.missed, 0, "{name}");
        for (chart, hits) in &covering.per_chart_hits {
            assert!(*hits > 0, "{name}: chart {chart} never hit");
        }
        let eq = verify_all_charts_equivariance(model, 1000, 1e-10, &mut rng_for(1007, 2)).unwrap();
        assert!(eq.pass, "{name}: {eq:?}");
    }
    // the inferred sphere weights are the declared ones, and they are what
    // makes the conjugated north chart equivariant
    for n in [1usize, 2] {
        let model = sphere(n);
        for fp in model.fixed_points() {
            let inferred = infer_tangential_weights_numeric(&model, fp.id, 1e-6).unwrap();
            let mut a = inferred;
            let mut b = fp.weights.clone();
            a.sort();
            b.sort();
            assert_eq!(a, b, "sphere S^{} weights at {}", 2 * n, fp.label);
        }
        let north = infer_tangential_weights_numeric(&model, FixedPointId(0), 1e-6).unwrap();
        assert!(
            north.iter().all(|w| w.0.iter().sum::<i64>() == -1),
            "conjugated north chart carries the negative weights: {north:?}"
        );
    }
    crit.finish();
}

#[test]
fn criterion_08_rk4_oracle_and_order() {
    let crit = Criterion::begin(
        "criterion 8 (RK4 vs exact < 1e-6 at h = 1e-3; halving ratio in [12,20])",
        30.0,
    );
    let gen = a0("1/3,1/7");
    let opts = TrajectoryOptions::default();
    assert_eq!(opts.step, 1e-3);
    for (name, model) in [
        ("cp2", cp(2)),
        ("fan:cp2", toric(projective_fan(2))),
        ("fan:hirzebruch1", toric(hirzebruch_fan())),
    ] {
        let mut rng = rng_for(1008, 1);
        let mut max_dev = 0.0f64;
        for x in sample_generic_batch(&model, 100, &mut rng) {
            let s = 10.0 * rand::Rng::gen_range(&mut rng, 0.1..1.0);
            let exact = flow_exact(&model, &gen, &x, s).unwrap();
            let approx = flow_rk4(&model, &gen, &x, s, &opts).unwrap();
            let d = model.distance(&exact, &approx).unwrap();
            if d > max_dev {
                max_dev = d;
            }
        }
        assert!(max_dev < 1e-6, "{name}: max deviation {max_dev:.3e}");
    }
    // order-4 confirmation on a CP² trajectory
    let model = cp(2);
    let x = match &model {
        Model::Projective(m) => Point::Projective(
            m.normalize(&[
                Complex64::new(1.0, 0.0),
                Complex64::new(1.0, 0.0),
                Complex64::new(1.0, 0.0),
            ])
            .unwrap(),
        ),
        _ => unreachable!(),
    };
    let s = 5.0;
    let exact = flow_exact(&model, &gen, &x, s).unwrap();
    let err = |h: f64| {
        let o = TrajectoryOptions { step: h, ..TrajectoryOptions::default() };
        let approx = flow_rk4(&model, &gen, &x, s, &o).unwrap();
        model.distance(&exact, &approx).unwrap()
    };
    let ratio = err(1e-2) / err(5e-3);
    assert!(
        (12.0..=20.0).contains(&ratio),
        "order-4 halving ratio out of range: {ratio}"
    );
    crit.finish();
}

#[test]
fn criterion_09_duality_under_generator_negation() {
    let crit = Criterion::begin(
        "criterion 9 (a0 ↦ −a0 swaps limits and complements indices)",
        30.0,
    );
    let gen = a0("1/3,1/7");
    let neg = gen.neg();
    let tols = ToleranceSet::default();
    for (name, model) in [("cp2", cp(2)), ("fan:hirzebruch1", toric(hirzebruch_fan()))] {
        let n = model.complex_dim();
        let dims = unstable_dims(&model, &gen).unwrap();
        let dims_neg = unstable_dims(&model, &neg).unwrap();
        for (fp, (d, dn)) in model.fixed_points().iter().zip(dims.iter().zip(&dims_neg)) {
            assert_eq!(d + dn, 2 * n, "{name}: index duality at {}", fp.label);
        }
        let table = ExponentTable::new(&model, &gen).unwrap();
        let neg_table = ExponentTable::new(&model, &neg).unwrap();
        let options = TrajectoryOptions {
            step: tols.rk4_step,
            max_time: tols.horizon_factor,
            switch_margin: tols.switch_margin,
            tolerance: tols.limit_detection,
        };
        let samples = sample_stratified(&model, 2000, &mut rng_for(1009, 1));
        for x in &samples {
            let fwd = limit_by_trajectory(&model, &table, x, Direction::Forward, &options).unwrap();
            let bwd_neg =
                limit_by_trajectory(&model, &neg_table, x, Direction::Backward, &options).unwrap();
            assert_eq!(fwd.fixed_point, bwd_neg.fixed_point, "{name}");
            let bwd = limit_by_trajectory(&model, &table, x, Direction::Backward, &options).unwrap();
            let fwd_neg =
                limit_by_trajectory(&model, &neg_table, x, Direction::Forward, &options).unwrap();
            assert_eq!(bwd.fixed_point, fwd_neg.fixed_point, "{name}");
        }
        // exact route on the projective model: analytic argmin/argmax swap
        if matches!(model, Model::Projective(_)) {
            for x in samples.iter().take(500) {
                let f = limit(&model, &gen, x, Direction::Forward).unwrap();
                let bn = limit(&model, &neg, x, Direction::Backward).unwrap();
                assert_eq!(f.fixed_point, bn.fixed_point);
            }
        }
    }
    crit.finish();
}

#[test]
fn criterion_10_deterministic_reports() {
    let crit = Criterion::begin("criterion 10 (byte-identical reports for identical config)", 60.0);
    let model = cp(2);
    let gen = a0("1/3,1/7");
    let settings = RunSettings {
        seed: 20260811,
        sample_count: 500,
        ..RunSettings::default()
    };
    let a = decompose(&model, &gen, &settings).unwrap();
    let b = decompose(&model, &gen, &settings).unwrap();
    let ja = serde_json::to_string_pretty(&a).unwrap();
    let jb = serde_json::to_string_pretty(&b).unwrap();
    assert_eq!(ja.as_bytes(), jb.as_bytes(), "reports must be byte-identical");
    // a different seed must change the sampled data path but not validity
    let other = decompose(
        &model,
        &gen,
        &RunSettings {
            seed: 7,
            ..settings.clone()
        },
    )
    .unwrap();
    assert!(other.all_pass());
    crit.finish();
}
