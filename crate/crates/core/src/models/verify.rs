//! Atlas verification: covering, chart equivariance, and numeric recovery of
//! tangential weights by differentiating the action.

use std::collections::BTreeMap;
use std::f64::consts::TAU;

use num_complex::Complex64;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::models::{ChartId, FixedPointId, Model, Point};
use crate::sampling::{sample_generic, sample_torus};
use crate::torus::{character_eval, TorusElement, Weight};
use crate::verdict::Verdict;

/// Covering check result: every sample must lie in at least one chart.
#[derive(Debug, Clone, serde::Serialize)]
pub struct CoveringReport {
    pub verdict: Verdict,
    /// Samples covered by each chart, keyed by chart label.
    pub per_chart_hits: BTreeMap<String, usize>,
    pub total_samples: usize,
    pub missed: usize,
}

/// Check that the given samples are covered by the listed charts (all charts
/// when `charts` is `None`) and count per-chart hits.
pub fn verify_covering(model: &Model, samples: &[Point], charts: Option<&[ChartId]>) -> CoveringReport {
    let chart_ids: Vec<ChartId> = match charts {
        Some(cs) => cs.to_vec(),
        None => model.chart_ids(),
    };
    let mut hits: BTreeMap<String, usize> = chart_ids
        .iter()
        .map(|&c| (model.chart_label(c), 0))
        .collect();
    let mut missed = 0usize;
    let mut witnesses = Vec::new();
    for (idx, p) in samples.iter().enumerate() {
        let mut covered = false;
        for &c in &chart_ids {
            if model.contains_in_chart(c, p).unwrap_or(false) {
                covered = true;
                *hits.get_mut(&model.chart_label(c)).expect("prefilled") += 1;
            }
        }
        if !covered {
            missed += 1;
            if witnesses.len() < 8 {
                witnesses.push(format!("sample {idx} lies in no chart: {p:?}"));
            }
        }
    }
    let verdict = Verdict {
        pass: missed == 0,
        max_violation: missed as f64,
        witnesses,
    };
    CoveringReport {
        verdict,
        per_chart_hits: hits,
        total_samples: samples.len(),
        missed,
    }
}

/// Check that a chart intertwines the ambient action with the diagonal
/// character action of the chart weights:
/// ‖chart(t·x) − ρ(t)·chart(x)‖ < tol for random (t, x).
pub fn verify_chart_equivariance(
    model: &Model,
    chart: ChartId,
    trials: usize,
    tol: f64,
    rng: &mut ChaCha8Rng,
) -> Result<Verdict> {
    let weights = model.chart_weights(chart)?;
    let mut max_violation = 0.0f64;
    let mut witnesses = Vec::new();
    let mut done = 0usize;
    let mut attempts = 0usize;
    while done < trials && attempts < trials * 20 {
        attempts += 1;
        let x = sample_generic(model, rng);
        let t = sample_torus(model.rank(), rng);
        let coords = match model.chart_map(chart, &x) {
            Ok(c) => c,
            Err(_) => continue,
        };
        // keep the comparison scale bounded away from the chart's far end
        if coords.iter().any(|w| w.norm() > 1e3) {
            continue;
        }
        let lhs = model.chart_map(chart, &model.act(&t, &x)?)?;
        let mut violation = 0.0f64;
        for ((l, w), m) in lhs.iter().zip(&coords).zip(&weights) {
            let rhs = character_eval(m, &t)? * w;
            violation = violation.max((l - rhs).norm());
        }
        if violation > max_violation {
            max_violation = violation;
        }
        if violation >= tol && witnesses.len() < 5 {
            witnesses.push(format!(
                "chart {} violation {violation:.3e} at trial {done}",
                model.chart_label(chart)
            ));
        }
        done += 1;
    }
    if done < trials {
        return Err(Error::InvalidModel(format!(
            "could not draw {trials} in-chart samples for chart {}",
            model.chart_label(chart)
        )));
    }
    Ok(Verdict::from_violation(max_violation, tol, witnesses))
}

/// Run the equivariance check over every chart and combine.
pub fn verify_all_charts_equivariance(
    model: &Model,
    trials: usize,
    tol: f64,
    rng: &mut ChaCha8Rng,
) -> Result<Verdict> {
    let mut max_violation = 0.0f64;
    let mut witnesses = Vec::new();
    for chart in model.chart_ids() {
        let v = verify_chart_equivariance(model, chart, trials, tol, rng)?;
        max_violation = max_violation.max(v.max_violation);
        witnesses.extend(v.witnesses);
    }
    Ok(Verdict::from_violation(max_violation, tol, witnesses))
}

/// Recover the integer weight of each chart coordinate by circling each torus
/// angle and measuring the accumulated winding of the coordinate.
///
/// The probe point sits at distance `delta` along one coordinate axis; the
/// winding is summed over `steps` increments, so weights up to `steps/2 − 1`
/// in absolute value are measured without aliasing. Residuals from the
/// nearest integer above `residual_tol` are reported as inference failures,
/// never rounded away.
pub fn infer_tangential_weights_numeric(
    model: &Model,
    fp: FixedPointId,
    residual_tol: f64,
) -> Result<Vec<Weight>> {
    let chart = model.fixed_point(fp)?.chart;
    let n = model.complex_dim();
    let r = model.rank();
    let delta = 0.25;
    let steps = 64usize;
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let mut coords = vec![Complex64::new(0.0, 0.0); n];
        coords[i] = Complex64::new(delta, 0.0);
        let base = model.chart_unmap(chart, &coords)?;
        let mut components = Vec::with_capacity(r);
        for k in 0..r {
            let samples: Vec<Complex64> = (0..steps)
                .map(|j| {
                    let mut angles = vec![0.0; r];
                    angles[k] = j as f64 / steps as f64;
                    let t = TorusElement::from_angles(angles);
                    Ok(model.chart_map(chart, &model.act(&t, &base)?)?[i])
                })
                .collect::<Result<Vec<_>>>()?;
            let mut winding = 0.0f64;
            for j in 0..steps {
                let a = samples[j];
                let b = samples[(j + 1) % steps];
                if a.norm() == 0.0 || b.norm() == 0.0 {
                    return Err(Error::InferenceFailure {
                        residual: f64::INFINITY,
                        tolerance: residual_tol,
                    });
                }
                winding += (b / a).arg();
            }
            let estimate = winding / TAU;
            let rounded = estimate.round();
            let residual = (estimate - rounded).abs();
            if residual >= residual_tol {
                return Err(Error::InferenceFailure {
                    residual,
                    tolerance: residual_tol,
                });
            }
            components.push(rounded as i64);
        }
        out.push(Weight::new(components));
    }
    Ok(out)
}
