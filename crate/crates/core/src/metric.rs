//! Chart metrics, the partition of unity, and norm-decay verification.
//!
//! Each weight chart carries the damped diagonal metric
//! g(∂x^i, ∂x^j) = δ_ij e^{−|x^i|}, g(∂y^i, ∂y^j) = δ_ij e^{−|y^i|},
//! g(∂x^i, ∂y^j) = 0. The metric formula is continuous but not smooth across
//! the coordinate hyperplanes; it is implemented literally and never
//! differentiated. Chart metrics are glued into a global norm with a
//! partition of unity built from polynomial-free bump functions supported in
//! the charts.

use num_complex::Complex64;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::flow::{flow_exact_in_charts, to_chart_point, vector_field_with_table, ExponentTable};
use crate::models::{ChartId, ChartPoint, Model, Point};
use crate::sampling::sample_generic_batch;
use crate::torus::GeneratorVector;
use crate::verdict::{ToleranceSet, Verdict};

/// Which fiber metric a chart carries.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MetricKind {
    /// The damped metric δ_ij e^{−|x^i|} / δ_ij e^{−|y^i|}.
    Damped,
    /// Plain Euclidean metric; useful as a negative control, under which the
    /// field norm does not decay along expanding directions.
    Euclidean,
}

/// Evaluator for the metric of one chart.
#[derive(Debug, Clone)]
pub struct ChartMetric {
    pub chart: ChartId,
    pub kind: MetricKind,
}

impl ChartMetric {
    pub fn damped(chart: ChartId) -> Self {
        ChartMetric {
            chart,
            kind: MetricKind::Damped,
        }
    }

    /// g(u, v) at the point with chart coordinates `at`; tangent vectors are
    /// interleaved reals (u_{x_1}, u_{y_1}, …).
    pub fn eval(&self, at: &[Complex64], u: &[f64], v: &[f64]) -> Result<f64> {
        chart_metric_eval_kind(self.kind, at, u, v)
    }
}

/// The damped chart metric: Σ u_{x_i} v_{x_i} e^{−|x^i|} + Σ u_{y_i} v_{y_i} e^{−|y^i|}.
pub fn chart_metric_eval(at: &[Complex64], u: &[f64], v: &[f64]) -> Result<f64> {
    chart_metric_eval_kind(MetricKind::Damped, at, u, v)
}

pub fn chart_metric_eval_kind(
    kind: MetricKind,
    at: &[Complex64],
    u: &[f64],
    v: &[f64],
) -> Result<f64> {
    let n = at.len();
    if u.len() != 2 * n || v.len() != 2 * n {
        return Err(Error::DimensionMismatch {
            expected: 2 * n,
            got: u.len().max(v.len()),
        });
    }
    let mut acc = 0.0;
    for i in 0..n {
        let (dx, dy) = match kind {
            MetricKind::Damped => ((-at[i].re.abs()).exp(), (-at[i].im.abs()).exp()),
            MetricKind::Euclidean => (1.0, 1.0),
        };
        acc += u[2 * i] * v[2 * i] * dx + u[2 * i + 1] * v[2 * i + 1] * dy;
    }
    Ok(acc)
}

/// Smooth bump supported in ‖w‖ < radius: exp(1/(‖w‖²/R² − 1)), 0 outside.
fn bump(norm_sqr: f64, radius: f64) -> f64 {
    let r2 = norm_sqr / (radius * radius);
    if r2 >= 1.0 {
        0.0
    } else {
        (1.0 / (r2 - 1.0)).exp()
    }
}

/// Partition of unity subordinate to the chart covering: per chart a bump in
/// chart coordinates, normalized to sum to 1.
#[derive(Debug, Clone)]
pub struct PartitionOfUnity {
    pub radius: f64,
}

impl Default for PartitionOfUnity {
    fn default() -> Self {
        PartitionOfUnity { radius: 10.0 }
    }
}

impl PartitionOfUnity {
    pub fn new(radius: f64) -> Self {
        PartitionOfUnity { radius }
    }

    /// Normalized weights (chart, ρ) over the charts whose bump is positive
    /// at x. The weights sum to 1 exactly by construction.
    pub fn weights(&self, model: &Model, x: &Point) -> Result<Vec<(ChartId, f64)>> {
        let mut raw = Vec::new();
        let mut total = 0.0;
        for c in model.chart_ids() {
            if let Ok(coords) = model.chart_map(c, x) {
                let n2: f64 = coords.iter().map(|w| w.norm_sqr()).sum();
                let b = bump(n2, self.radius);
                if b > 0.0 {
                    raw.push((c, b));
                    total += b;
                }
            }
        }
        if total <= 0.0 {
            return Err(Error::OutsideChart(
                "no chart holds the point within the bump radius".into(),
            ));
        }
        Ok(raw.into_iter().map(|(c, b)| (c, b / total)).collect())
    }
}

/// Global norm of the gradient-like field at x:
/// √(Σ_p ρ^{(p)}(x) · g^{(p)}(ξ, ξ)).
pub fn global_field_norm(
    model: &Model,
    table: &ExponentTable,
    pou: &PartitionOfUnity,
    x: &Point,
) -> Result<f64> {
    global_field_norm_kind(MetricKind::Damped, model, table, pou, x)
}

pub fn global_field_norm_kind(
    kind: MetricKind,
    model: &Model,
    table: &ExponentTable,
    pou: &PartitionOfUnity,
    x: &Point,
) -> Result<f64> {
    let mut acc = 0.0;
    for (chart, rho) in pou.weights(model, x)? {
        let coords = model.chart_map(chart, x)?;
        let field = vector_field_with_table(table, &ChartPoint::new(chart, coords.clone()))?;
        acc += rho * chart_metric_eval_kind(kind, &coords, &field, &field)?;
    }
    Ok(acc.sqrt())
}

/// In-chart field norm at the given chart coordinates.
pub fn in_chart_field_norm(kind: MetricKind, coords: &[Complex64], rates: &[f64]) -> f64 {
    let mut acc = 0.0;
    for (w, a) in coords.iter().zip(rates) {
        let (dx, dy) = match kind {
            MetricKind::Damped => ((-w.re.abs()).exp(), (-w.im.abs()).exp()),
            MetricKind::Euclidean => (1.0, 1.0),
        };
        acc += a * a * (w.re * w.re * dx + w.im * w.im * dy);
    }
    acc.sqrt()
}

/// Field norm after flowing the chart coordinates for time s inside the
/// chart (no switching): direct evaluation at the flowed point.
pub fn in_chart_norm_along_flow(
    kind: MetricKind,
    start: &[Complex64],
    rates: &[f64],
    s: f64,
) -> f64 {
    let flowed: Vec<Complex64> = start
        .iter()
        .zip(rates)
        .map(|(w, a)| w * (-a * s).exp())
        .collect();
    in_chart_field_norm(kind, &flowed, rates)
}

/// Closed form of the damped in-chart norm along the flow:
/// ‖ξ‖² = Σ a_i²p_i² e^{−2a_i s − |p_i|e^{−a_i s}} + Σ a_i²q_i² e^{−2a_i s − |q_i|e^{−a_i s}}
/// where (p_i, q_i) are the real/imaginary starting coordinates.
///
/// Exponents are assembled before exponentiation, so the doubly exponential
/// suppression of expanding directions never overflows.
pub fn norm_along_flow_closed_form(start: &[Complex64], rates: &[f64], s: f64) -> f64 {
    let mut acc = 0.0;
    for (w, a) in start.iter().zip(rates) {
        for comp in [w.re, w.im] {
            if comp == 0.0 {
                continue;
            }
            let decay = (-a * s).exp();
            let log_term = -2.0 * a * s - comp.abs() * decay;
            acc += a * a * comp * comp * log_term.exp();
        }
    }
    acc.sqrt()
}

/// Norm decay along flows: the global field norm at the scaled horizon must
/// drop under the threshold for every sample and both time directions
/// (backward via a₀ ↦ −a₀).
pub fn verify_norm_decay(
    model: &Model,
    a0: &GeneratorVector,
    n_samples: usize,
    tols: &ToleranceSet,
    rng: &mut ChaCha8Rng,
) -> Result<Verdict> {
    let table = ExponentTable::new(model, a0)?;
    table.require_generic()?;
    let pou = PartitionOfUnity::new(tols.bump_radius);
    let min_a = table.min_abs_exponent();
    let horizon = tols.decay_horizon_factor / min_a;
    let samples = sample_generic_batch(model, n_samples, rng);
    let mut max_violation = 0.0f64;
    let mut witnesses = Vec::new();
    for (idx, x) in samples.iter().enumerate() {
        for (label, tbl) in [("forward", table.clone()), ("backward", table.negated())] {
            let start = to_chart_point(model, x)?;
            let end = flow_exact_in_charts(model, &tbl, &start, horizon, tols.switch_margin)?;
            let norm = global_field_norm(
                model,
                &tbl,
                &pou,
                &crate::flow::from_chart_point(model, &end)?,
            )?;
            if norm > max_violation {
                max_violation = norm;
            }
            if norm >= tols.norm_decay_final && witnesses.len() < 5 {
                witnesses.push(format!(
                    "sample {idx} ({label}): norm {norm:.3e} at s = {horizon:.2}"
                ));
            }
        }
    }
    Ok(Verdict::from_violation(
        max_violation,
        tols.norm_decay_final,
        witnesses,
    ))
}

/// Agreement of the closed-form norm with direct metric evaluation along
/// in-chart flows, on random (start, s) pairs in random weight charts.
pub fn verify_closed_form_agreement(
    model: &Model,
    a0: &GeneratorVector,
    pairs: usize,
    tol: f64,
    rng: &mut ChaCha8Rng,
) -> Result<Verdict> {
    let table = ExponentTable::new(model, a0)?;
    let n = model.complex_dim();
    let mut max_violation = 0.0f64;
    for _ in 0..pairs {
        let chart = ChartId(rng.gen_range(0..model.chart_count()));
        let rates = table.chart(chart)?.to_vec();
        let start: Vec<Complex64> = (0..n)
            .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect();
        let s: f64 = rng.gen_range(-3.0..3.0);
        let direct = in_chart_norm_along_flow(MetricKind::Damped, &start, &rates, s);
        let closed = norm_along_flow_closed_form(&start, &rates, s);
        let d = (direct - closed).abs();
        if d > max_violation {
            max_violation = d;
        }
    }
    Ok(Verdict::from_violation(max_violation, tol, Vec::new()))
}

/// Decay curve (s, global field norm) along the exact flow, for CSV export.
pub fn decay_curve(
    model: &Model,
    table: &ExponentTable,
    pou: &PartitionOfUnity,
    x: &Point,
    s_grid: &[f64],
    switch_margin: f64,
) -> Result<Vec<(f64, f64)>> {
    let start = to_chart_point(model, x)?;
    let mut out = Vec::with_capacity(s_grid.len());
    for &s in s_grid {
        let p = flow_exact_in_charts(model, table, &start, s, switch_margin)?;
        let norm = global_field_norm(model, table, pou, &crate::flow::from_chart_point(model, &p)?)?;
        out.push((s, norm));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::ModelDescriptor;
    use crate::sampling::{rng_for, sample_stratified};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn cp(n: usize) -> Model {
        Model::from_descriptor(&ModelDescriptor::Projective {
            dimension: n,
            coordinate_weights: None,
        })
        .unwrap()
    }

    fn a0_cp2() -> GeneratorVector {
        GeneratorVector::parse("1/3,1/7").unwrap()
    }

    #[test]
    fn metric_at_origin_is_euclidean() {
        let at = [c(0.0, 0.0)];
        let u = [1.0, 0.0];
        assert!((chart_metric_eval(&at, &u, &u).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn metric_damps_by_exp_of_abs() {
        // x¹ = ln 4 → e^{−ln 4} = 1/4
        let at = [c(4.0f64.ln(), 0.0)];
        let u = [1.0, 0.0];
        assert!((chart_metric_eval(&at, &u, &u).unwrap() - 0.25).abs() < 1e-15);
    }

    #[test]
    fn metric_cross_terms_vanish() {
        let at = [c(0.3, -0.8)];
        let u = [1.0, 0.0];
        let v = [0.0, 1.0];
        assert_eq!(chart_metric_eval(&at, &u, &v).unwrap(), 0.0);
    }

    #[test]
    fn metric_symmetric_positive_definite_random() {
        let mut rng = rng_for(5, 20);
        for _ in 0..500 {
            let at: Vec<Complex64> = (0..2)
                .map(|_| c(rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0)))
                .collect();
            let u: Vec<f64> = (0..4).map(|_| rng.gen_range(-2.0..2.0)).collect();
            let v: Vec<f64> = (0..4).map(|_| rng.gen_range(-2.0..2.0)).collect();
            let guv = chart_metric_eval(&at, &u, &v).unwrap();
            let gvu = chart_metric_eval(&at, &v, &u).unwrap();
            assert!((guv - gvu).abs() < 1e-12);
            if u.iter().any(|&x| x != 0.0) {
                assert!(chart_metric_eval(&at, &u, &u).unwrap() > 0.0);
            }
        }
    }

    #[test]
    fn closed_form_at_zero_time() {
        // start (p₁,q₁) = (1,0), a₁ = 1 → norm = √(e^{−1}) = e^{−1/2}
        let norm = norm_along_flow_closed_form(&[c(1.0, 0.0)], &[1.0], 0.0);
        assert!((norm - (-0.5f64).exp()).abs() < 1e-15);
    }

    #[test]
    fn closed_form_decays_in_both_sign_regimes() {
        let start = [c(0.7, -0.4)];
        // contracting: plain exponential decay
        assert!(norm_along_flow_closed_form(&start, &[1.0], 50.0) < 1e-12);
        // expanding: the doubly exponential damping wins
        assert!(norm_along_flow_closed_form(&start, &[-1.0], 50.0) < 1e-12);
        // and no overflow far beyond f64 exponent range
        assert_eq!(norm_along_flow_closed_form(&start, &[-2.0], 1000.0), 0.0);
    }

    #[test]
    fn closed_form_matches_direct_evaluation() {
        let model = cp(2);
        let mut rng = rng_for(5, 21);
        let v = verify_closed_form_agreement(&model, &a0_cp2(), 100, 1e-10, &mut rng).unwrap();
        assert!(v.pass, "{v:?}");
    }

    #[test]
    fn partition_of_unity_sums_to_one_and_stays_in_range() {
        let model = cp(2);
        let pou = PartitionOfUnity::default();
        let samples = sample_stratified(&model, 500, &mut rng_for(5, 22));
        for x in &samples {
            let w = pou.weights(&model, x).unwrap();
            let total: f64 = w.iter().map(|(_, r)| r).sum();
            assert!((total - 1.0).abs() < 1e-10);
            for (_, r) in &w {
                assert!(*r >= 0.0 && *r <= 1.0);
            }
        }
    }

    #[test]
    fn bump_vanishes_outside_radius() {
        assert_eq!(bump(100.0, 10.0), 0.0);
        assert_eq!(bump(101.0, 10.0), 0.0);
        assert!(bump(81.0, 10.0) > 0.0);
    }

    #[test]
    fn global_norm_zero_at_fixed_points() {
        let model = cp(2);
        let a0 = a0_cp2();
        let table = ExponentTable::new(&model, &a0).unwrap();
        let pou = PartitionOfUnity::default();
        for fp in model.fixed_points() {
            let x = model.fixed_point_position(fp.id).unwrap();
            let norm = global_field_norm(&model, &table, &pou, &x).unwrap();
            assert!(norm < 1e-12, "norm {norm} at {}", fp.label);
        }
    }

    #[test]
    fn global_norm_single_chart_regime_equals_chart_norm() {
        // on CP¹ with |w| < 0.1, the other chart's coordinate exceeds the
        // bump radius, so ρ = 1 on the home chart and the global norm is the
        // bare chart norm √(a²(x²e^{−|x|} + y²e^{−|y|}))
        let model = cp(1);
        let a0 = GeneratorVector::parse("1").unwrap();
        let table = ExponentTable::new(&model, &a0).unwrap();
        let pou = PartitionOfUnity::default();
        let w = c(0.05, 0.02);
        let x = model.chart_unmap(ChartId(0), &[w]).unwrap();
        let global = global_field_norm(&model, &table, &pou, &x).unwrap();
        let a = std::f64::consts::TAU;
        let expected = (a * a
            * (w.re * w.re * (-w.re.abs()).exp() + w.im * w.im * (-w.im.abs()).exp()))
        .sqrt();
        assert!((global - expected).abs() < 1e-12, "{global} vs {expected}");
    }

    #[test]
    fn global_norm_independent_of_representation() {
        let model = Model::from_descriptor(&ModelDescriptor::Toric {
            fan: crate::models::toric::projective_fan(2),
        })
        .unwrap();
        let a0 = a0_cp2();
        let table = ExponentTable::new(&model, &a0).unwrap();
        let pou = PartitionOfUnity::default();
        let mut rng = rng_for(5, 23);
        let samples = sample_generic_batch(&model, 100, &mut rng);
        for x in &samples {
            let base = global_field_norm(&model, &table, &pou, x).unwrap();
            if let Point::Toric(p) = x {
                for c in model.chart_ids() {
                    if let Ok(coords) = model.transition(p.chart, c, &p.coords) {
                        if coords.iter().map(|w| w.norm()).fold(0.0, f64::max) > 1e3 {
                            continue;
                        }
                        let alt = Point::Toric(ChartPoint::new(c, coords));
                        let other = global_field_norm(&model, &table, &pou, &alt).unwrap();
                        assert!(
                            (base - other).abs() < 1e-10 * (1.0 + base),
                            "{base} vs {other}"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn norm_decay_cp2_both_directions() {
        let model = cp(2);
        let mut rng = rng_for(5, 24);
        let v = verify_norm_decay(&model, &a0_cp2(), 50, &ToleranceSet::default(), &mut rng).unwrap();
        assert!(v.pass, "{v:?}");
    }

    #[test]
    fn corrupted_metric_diverges_on_expanding_trajectory() {
        // Euclidean metric, expanding rate: ‖ξ‖ grows without bound in-chart
        let start = [c(0.5, 0.0)];
        let rates = [-1.0];
        let initial = in_chart_norm_along_flow(MetricKind::Euclidean, &start, &rates, 0.0);
        let later = in_chart_norm_along_flow(MetricKind::Euclidean, &start, &rates, 20.0);
        assert!(later > 1e6 * initial, "norm must diverge, got {later}");
        // while the damped metric still decays
        let damped = in_chart_norm_along_flow(MetricKind::Damped, &start, &rates, 20.0);
        assert!(damped < 1e-6);
    }

    #[test]
    fn decay_direction_symmetric() {
        let model = cp(2);
        let a0 = a0_cp2();
        let neg = a0.neg();
        let tols = ToleranceSet::default();
        let va = verify_norm_decay(&model, &a0, 25, &tols, &mut rng_for(5, 25)).unwrap();
        let vb = verify_norm_decay(&model, &neg, 25, &tols, &mut rng_for(5, 25)).unwrap();
        assert_eq!(va.pass, vb.pass);
        assert!(va.pass);
    }
}
