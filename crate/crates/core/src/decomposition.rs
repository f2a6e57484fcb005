//! Global decomposition reports: hyperbolicity, Morse indices, Poincaré
//! polynomial, Euler characteristic, basin classification, convergence
//! checks, and the connection poset.

use std::collections::{BTreeMap, BTreeSet};
use std::f64::consts::TAU;

use num_complex::Complex64;
use num_traits::Signed;
use num_traits::Zero;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::flow::{
    flow_equivariance_check_with_table, limit, limit_by_trajectory, time_one_map_eigenvalues,
    vector_field_with_table, Direction, ExponentTable, TrajectoryOptions,
};
use crate::metric::{global_field_norm, PartitionOfUnity};
use crate::models::{verify::verify_all_charts_equivariance, verify::verify_covering};
use crate::models::{ChartPoint, FixedPointId, Model, ModelDescriptor, Point};
use crate::sampling::{rng_for, sample_stratified};
use crate::torus::{format_rational, is_generic, GeneratorVector};
use crate::verdict::{ToleranceSet, Verdict};

/// Exact hyperbolicity check: every tangential weight at every fixed point
/// must pair nonzero with a₀.
#[derive(Debug, Clone, serde::Serialize)]
pub struct HyperbolicityReport {
    pub verdict: Verdict,
    /// (fixed point label, weight, exact pairing) for every tangential weight.
    pub exponent_table: Vec<ExponentRow>,
}

#[derive(Debug, Clone, serde::Serialize)]
pub struct ExponentRow {
    pub fixed_point: String,
    pub weight: Vec<i64>,
    pub pairing: String,
    pub scaled: f64,
}

pub fn verify_hyperbolic(model: &Model, a0: &GeneratorVector) -> Result<HyperbolicityReport> {
    let mut rows = Vec::new();
    let mut witnesses = Vec::new();
    for fp in model.fixed_points() {
        for m in &fp.weights {
            let q = crate::torus::pairing(m, a0)?;
            rows.push(ExponentRow {
                fixed_point: fp.label.clone(),
                weight: m.0.clone(),
                pairing: format_rational(&q),
                scaled: TAU * crate::flow::rational_ratio_to_f64(&q),
            });
            if q.is_zero() {
                witnesses.push(format!("weight {m} at {} pairs to 0", fp.label));
            }
        }
    }
    // the genericity report also flags zero weights (positive-dimensional fixed sets)
    let gen = is_generic(a0, &model.all_tangential_weights())?;
    for w in &gen.zero_weights {
        witnesses.push(format!("zero tangential weight {w} present"));
    }
    Ok(HyperbolicityReport {
        verdict: Verdict {
            pass: witnesses.is_empty(),
            max_violation: witnesses.len() as f64,
            witnesses,
        },
        exponent_table: rows,
    })
}

/// Unstable dimension 2·|{i : a_i < 0}| from exact pairings; a zero exponent
/// is a genericity error.
pub fn unstable_dim_from_pairings(values: &[num_rational::Rational64]) -> Result<usize> {
    let mut negatives = 0usize;
    for v in values {
        if v.is_zero() {
            return Err(Error::NotGeneric("zero exponent in unstable_dim".into()));
        }
        if v.is_negative() {
            negatives += 1;
        }
    }
    Ok(2 * negatives)
}

/// Unstable dimension per fixed point, in fixed-point order.
pub fn unstable_dims(model: &Model, a0: &GeneratorVector) -> Result<Vec<usize>> {
    model
        .fixed_points()
        .iter()
        .map(|fp| {
            let pairings = fp
                .weights
                .iter()
                .map(|m| crate::torus::pairing(m, a0))
                .collect::<Result<Vec<_>>>()?;
            unstable_dim_from_pairings(&pairings)
        })
        .collect()
}

/// Coefficient list of the Poincaré polynomial: coefficient of t^k counts the
/// fixed points of unstable dimension k.
pub fn poincare_polynomial(model: &Model, a0: &GeneratorVector) -> Result<Vec<i64>> {
    let dims = unstable_dims(model, a0)?;
    let mut coeffs = vec![0i64; 2 * model.complex_dim() + 1];
    for d in dims {
        coeffs[d] += 1;
    }
    Ok(coeffs)
}

/// Number of fixed points; equal to the Poincaré polynomial at t = 1.
pub fn euler_characteristic(model: &Model, a0: &GeneratorVector) -> Result<i64> {
    let coeffs = poincare_polynomial(model, a0)?;
    Ok(coeffs.iter().sum())
}

/// h-vector of a complete simplicial fan, computed purely combinatorially:
/// h_k = Σ_{j=k}^n (−1)^{j−k} C(j,k) d_{n−j} with d_i the number of
/// i-dimensional cones. Independent cross-check for the Poincaré coefficients
/// of toric models.
pub fn h_vector(fan: &crate::models::Fan) -> Vec<i64> {
    let n = fan.rank;
    // d[i] = number of i-dimensional cones = distinct i-subsets of maximal cones
    let mut faces: Vec<BTreeSet<Vec<usize>>> = vec![BTreeSet::new(); n + 1];
    for cone in &fan.maximal_cones {
        let mut sorted = cone.clone();
        sorted.sort_unstable();
        for mask in 0u32..(1 << sorted.len()) {
            let subset: Vec<usize> = sorted
                .iter()
                .enumerate()
                .filter(|&(k, _)| mask >> k & 1 == 1)
                .map(|(_, &r)| r)
                .collect();
            faces[subset.len()].insert(subset);
        }
    }
    let d: Vec<i64> = faces.iter().map(|s| s.len() as i64).collect();
    (0..=n)
        .map(|k| {
            (k..=n)
                .map(|j| {
                    let sign = if (j - k) % 2 == 0 { 1 } else { -1 };
                    sign * binomial(j, k) * d[n - j]
                })
                .sum()
        })
        .collect()
}

fn binomial(n: usize, k: usize) -> i64 {
    if k > n {
        return 0;
    }
    let mut acc = 1i64;
    for i in 0..k.min(n - k) {
        acc = acc * (n - i) as i64 / (i + 1) as i64;
    }
    acc
}

/// Forward/backward basin assignment for a set of samples, with the analytic
/// classification cross-check where available (projective models).
#[derive(Debug, Clone, serde::Serialize)]
pub struct BasinReport {
    /// Forward-limit counts per fixed-point label.
    pub basin_counts: BTreeMap<String, usize>,
    /// Backward-limit counts per fixed-point label.
    pub co_basin_counts: BTreeMap<String, usize>,
    /// Per-sample assignments (forward id, backward id).
    pub assignments: Vec<(usize, usize)>,
    /// Agreement between trajectory-following and the analytic rule; passes
    /// vacuously (with a note) when no analytic rule exists.
    pub agreement: Verdict,
    pub total_samples: usize,
}

pub fn basin_classify(
    model: &Model,
    a0: &GeneratorVector,
    samples: &[Point],
    tols: &ToleranceSet,
) -> Result<BasinReport> {
    let table = ExponentTable::new(model, a0)?;
    table.require_generic()?;
    let options = TrajectoryOptions {
        step: tols.rk4_step,
        max_time: tols.horizon_factor,
        switch_margin: tols.switch_margin,
        tolerance: tols.limit_detection,
    };
    let analytic_available = matches!(model, Model::Projective(_));
    let mut basin_counts: BTreeMap<String, usize> = BTreeMap::new();
    let mut co_basin_counts: BTreeMap<String, usize> = BTreeMap::new();
    let mut assignments = Vec::with_capacity(samples.len());
    let mut disagreements = Vec::new();
    for (idx, x) in samples.iter().enumerate() {
        let fwd = limit_by_trajectory(model, &table, x, Direction::Forward, &options)?;
        let bwd = limit_by_trajectory(model, &table, x, Direction::Backward, &options)?;
        if analytic_available {
            let afwd = limit(model, a0, x, Direction::Forward)?;
            let abwd = limit(model, a0, x, Direction::Backward)?;
            if afwd.fixed_point != fwd.fixed_point && disagreements.len() < 8 {
                disagreements.push(format!(
                    "sample {idx}: forward trajectory → {}, analytic → {}",
                    fwd.fixed_point.0, afwd.fixed_point.0
                ));
            }
            if abwd.fixed_point != bwd.fixed_point && disagreements.len() < 8 {
                disagreements.push(format!(
                    "sample {idx}: backward trajectory → {}, analytic → {}",
                    bwd.fixed_point.0, abwd.fixed_point.0
                ));
            }
        }
        let flabel = model.fixed_point(fwd.fixed_point)?.label.clone();
        let blabel = model.fixed_point(bwd.fixed_point)?.label.clone();
        *basin_counts.entry(flabel).or_insert(0) += 1;
        *co_basin_counts.entry(blabel).or_insert(0) += 1;
        assignments.push((fwd.fixed_point.0, bwd.fixed_point.0));
    }
    let agreement = Verdict {
        pass: disagreements.is_empty(),
        max_violation: disagreements.len() as f64,
        witnesses: disagreements,
    };
    Ok(BasinReport {
        basin_counts,
        co_basin_counts,
        assignments,
        agreement,
        total_samples: samples.len(),
    })
}

/// The convergence condition: the field vanishes exactly at the fixed
/// points, stable and unstable directions meet only at the chart origin (and
/// mixed points flow away in both time directions), and every sampled orbit
/// has fixed-point limits in both directions.
#[derive(Debug, Clone, serde::Serialize)]
pub struct ConvergenceReport {
    pub fixed_set_verdict: Verdict,
    pub separatrix_verdict: Verdict,
    pub limits_verdict: Verdict,
}

impl ConvergenceReport {
    pub fn pass(&self) -> bool {
        self.fixed_set_verdict.pass && self.separatrix_verdict.pass && self.limits_verdict.pass
    }
}

pub fn verify_convergence_condition(
    model: &Model,
    a0: &GeneratorVector,
    samples: &[Point],
    tols: &ToleranceSet,
) -> Result<ConvergenceReport> {
    let table = ExponentTable::new(model, a0)?;
    table.require_generic()?;
    let n = model.complex_dim();

    // (1) the field vanishes at every fixed point
    let mut max_norm_at_fixed = 0.0f64;
    let mut fixed_witnesses = Vec::new();
    for fp in model.fixed_points() {
        let origin = ChartPoint::new(fp.chart, vec![Complex64::new(0.0, 0.0); n]);
        let field = vector_field_with_table(&table, &origin)?;
        let norm = field.iter().map(|v| v * v).sum::<f64>().sqrt();
        max_norm_at_fixed = max_norm_at_fixed.max(norm);
        if norm >= tols.zero_set_at_fixed {
            fixed_witnesses.push(format!("field norm {norm:.3e} at {}", fp.label));
        }
    }

    // (2) stable/unstable chart subspaces meet only at the origin, and a
    // point with both a contracted and an expanded coordinate leaves in both
    // time directions
    let mut separatrix_witnesses = Vec::new();
    for (fp, rates) in model.fixed_points().iter().zip(&table.scaled) {
        let stable: Vec<usize> = (0..n).filter(|&i| rates[i] > 0.0).collect();
        let unstable: Vec<usize> = (0..n).filter(|&i| rates[i] < 0.0).collect();
        if stable.len() + unstable.len() != n {
            separatrix_witnesses.push(format!("zero exponent at {}", fp.label));
            continue;
        }
        if stable.is_empty() || unstable.is_empty() {
            continue; // attractor or repeller: one of the manifolds is {p}
        }
        let mut coords = vec![Complex64::new(0.0, 0.0); n];
        coords[stable[0]] = Complex64::new(0.1, 0.0);
        coords[unstable[0]] = Complex64::new(0.1, 0.0);
        let initial: f64 = coords.iter().map(|w| w.norm_sqr()).sum::<f64>().sqrt();
        let min_a = rates.iter().map(|a| a.abs()).fold(f64::INFINITY, f64::min);
        let probe = 3.0 / min_a;
        for s in [probe, -probe] {
            let flowed: Vec<Complex64> = coords
                .iter()
                .zip(rates)
                .map(|(w, a)| w * (-a * s).exp())
                .collect();
            let norm = flowed.iter().map(|w| w.norm_sqr()).sum::<f64>().sqrt();
            if norm <= initial {
                separatrix_witnesses.push(format!(
                    "mixed point near {} fails to leave (s = {s:.2})",
                    fp.label
                ));
            }
        }
    }

    // (3) all sampled orbits converge to fixed points in both directions
    let options = TrajectoryOptions {
        step: tols.rk4_step,
        max_time: tols.horizon_factor,
        switch_margin: tols.switch_margin,
        tolerance: tols.limit_detection,
    };
    let mut limit_witnesses = Vec::new();
    for (idx, x) in samples.iter().enumerate() {
        for dir in [Direction::Forward, Direction::Backward] {
            if let Err(e) = limit_by_trajectory(model, &table, x, dir, &options) {
                if limit_witnesses.len() < 8 {
                    limit_witnesses.push(format!("sample {idx} ({dir:?}): {e}"));
                }
            }
        }
    }

    Ok(ConvergenceReport {
        fixed_set_verdict: Verdict::from_violation(
            max_norm_at_fixed,
            tols.zero_set_at_fixed,
            fixed_witnesses,
        ),
        separatrix_verdict: Verdict {
            pass: separatrix_witnesses.is_empty(),
            max_violation: separatrix_witnesses.len() as f64,
            witnesses: separatrix_witnesses,
        },
        limits_verdict: Verdict {
            pass: limit_witnesses.is_empty(),
            max_violation: limit_witnesses.len() as f64,
            witnesses: limit_witnesses,
        },
    })
}

/// Edge of the connection poset: the flow leaves `source` and arrives at
/// `target`, witnessed by a seed point.
#[derive(Debug, Clone, serde::Serialize)]
pub struct PosetEdge {
    pub source: usize,
    pub target: usize,
    pub witness: String,
}

#[derive(Debug, Clone, serde::Serialize)]
pub struct PosetReport {
    pub edges: Vec<PosetEdge>,
    /// Seeds whose trajectory did not converge within the horizon.
    pub inconclusive: Vec<String>,
    /// Every edge must strictly decrease the unstable dimension.
    pub index_decreasing: Verdict,
}

/// Seed points at the given radius in the purely unstable chart directions of
/// every fixed point, flow them forward, and record the limits as edges.
/// Seeds cover every nonempty subset of the unstable coordinates so that
/// edges lying over coordinate strata are found too.
pub fn connection_poset(
    model: &Model,
    a0: &GeneratorVector,
    per_point_samples: usize,
    tols: &ToleranceSet,
    rng: &mut ChaCha8Rng,
) -> Result<PosetReport> {
    let table = ExponentTable::new(model, a0)?;
    table.require_generic()?;
    let dims = unstable_dims(model, a0)?;
    let n = model.complex_dim();
    let options = TrajectoryOptions {
        step: tols.rk4_step,
        max_time: tols.horizon_factor,
        switch_margin: tols.switch_margin,
        tolerance: tols.limit_detection,
    };
    let mut edges: BTreeMap<(usize, usize), String> = BTreeMap::new();
    let mut inconclusive = Vec::new();
    for (fp, rates) in model.fixed_points().iter().zip(&table.scaled) {
        let unstable: Vec<usize> = (0..n).filter(|&i| rates[i] < 0.0).collect();
        if unstable.is_empty() {
            continue;
        }
        let mut subsets: Vec<Vec<usize>> = (1u32..(1 << unstable.len()))
            .map(|mask| {
                unstable
                    .iter()
                    .enumerate()
                    .filter(|&(k, _)| mask >> k & 1 == 1)
                    .map(|(_, &i)| i)
                    .collect()
            })
            .collect();
        subsets.sort_by_key(|s: &Vec<usize>| (s.len(), s.clone()));
        let seeds_per_subset = (per_point_samples / subsets.len()).max(1);
        for subset in &subsets {
            for _ in 0..seeds_per_subset {
                let mut coords = vec![Complex64::new(0.0, 0.0); n];
                let scale = tols.seeding_radius / (subset.len() as f64).sqrt();
                for &i in subset {
                    let phase: f64 = rng.gen_range(0.0..TAU);
                    coords[i] = Complex64::from_polar(scale, phase);
                }
                let seed = ChartPoint::new(fp.chart, coords);
                let seed_point = crate::flow::from_chart_point(model, &seed)?;
                match limit_by_trajectory(model, &table, &seed_point, Direction::Forward, &options)
                {
                    Ok(outcome) => {
                        let q = outcome.fixed_point.0;
                        if q != fp.id.0 {
                            edges.entry((fp.id.0, q)).or_insert_with(|| {
                                format!(
                                    "seed at radius {:.1e} in coordinates {subset:?} of {}",
                                    tols.seeding_radius, fp.label
                                )
                            });
                        }
                    }
                    Err(e) => inconclusive.push(format!("seed from {}: {e}", fp.label)),
                }
            }
        }
    }
    let mut violations = Vec::new();
    let edge_list: Vec<PosetEdge> = edges
        .into_iter()
        .map(|((source, target), witness)| {
            if dims[source] <= dims[target] {
                violations.push(format!(
                    "edge {source} → {target} has indices {} → {}",
                    dims[source], dims[target]
                ));
            }
            PosetEdge {
                source,
                target,
                witness,
            }
        })
        .collect();
    Ok(PosetReport {
        edges: edge_list,
        inconclusive,
        index_decreasing: Verdict {
            pass: violations.is_empty(),
            max_violation: violations.len() as f64,
            witnesses: violations,
        },
    })
}

/// Per-fixed-point entry of the decomposition report.
#[derive(Debug, Clone, serde::Serialize)]
pub struct FixedPointEntry {
    pub id: usize,
    pub label: String,
    pub chart: String,
    pub weights: Vec<Vec<i64>>,
    /// Exact pairings "p/q" with their 2π-scaled float values.
    pub exponents: Vec<ExponentEntry>,
    pub unstable_dim: usize,
    /// Time-one map eigenvalues e^{−a_i}, each with multiplicity 2.
    pub time_one_eigenvalues: Vec<f64>,
}

#[derive(Debug, Clone, serde::Serialize)]
pub struct ExponentEntry {
    pub pairing: String,
    pub scaled: f64,
}

/// The full decomposition report emitted by the pipeline.
#[derive(Debug, Clone, serde::Serialize)]
pub struct DecompositionReport {
    /// Sign convention statement (every report carries it).
    pub convention: String,
    pub model: ModelDescriptor,
    pub a0: GeneratorVector,
    pub seed: u64,
    pub sample_count: usize,
    pub tolerances: ToleranceSet,
    pub fixed_points: Vec<FixedPointEntry>,
    pub poincare: Vec<i64>,
    pub euler: i64,
    /// Combinatorial h-vector of the fan (toric models only).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub h_vector: Option<Vec<i64>>,
    pub basin_counts: BTreeMap<String, usize>,
    pub co_basin_counts: BTreeMap<String, usize>,
    pub poset_edges: Vec<PosetEdge>,
    pub poset_inconclusive: Vec<String>,
    pub verdicts: BTreeMap<String, Verdict>,
}

impl DecompositionReport {
    pub fn all_pass(&self) -> bool {
        self.verdicts.values().all(|v| v.pass)
    }

    /// DOT digraph of the connection poset.
    pub fn poset_dot(&self) -> String {
        let mut out = String::from("digraph connection_poset {\n");
        for fp in &self.fixed_points {
            out.push_str(&format!(
                "  n{} [label=\"{} (index {})\"];\n",
                fp.id, fp.label, fp.unstable_dim
            ));
        }
        for e in &self.poset_edges {
            out.push_str(&format!("  n{} -> n{};\n", e.source, e.target));
        }
        out.push_str("}\n");
        out
    }
}

/// Run configuration for the decomposition pipeline.
#[derive(Debug, Clone)]
pub struct RunSettings {
    pub seed: u64,
    pub sample_count: usize,
    pub poset_seeds_per_point: usize,
    pub equivariance_trials: usize,
    pub tolerances: ToleranceSet,
}

impl Default for RunSettings {
    fn default() -> Self {
        RunSettings {
            seed: 0,
            sample_count: 2000,
            poset_seeds_per_point: 32,
            equivariance_trials: 300,
            tolerances: ToleranceSet::default(),
        }
    }
}

/// The full pipeline: hyperbolicity gate, indices, polynomial/Euler data,
/// basins, poset, convergence, equivariance, covering, zero-set, norm decay,
/// and the a₀ ↦ −a₀ duality check. Fails with a genericity error before any
/// sampling when a₀ is not generic for the model.
pub fn decompose(model: &Model, a0: &GeneratorVector, settings: &RunSettings) -> Result<DecompositionReport> {
    let hyper = verify_hyperbolic(model, a0)?;
    if !hyper.verdict.pass {
        return Err(Error::NotGeneric(hyper.verdict.witnesses.join("; ")));
    }
    let tols = &settings.tolerances;
    let table = ExponentTable::new(model, a0)?;
    let dims = unstable_dims(model, a0)?;
    let poincare = poincare_polynomial(model, a0)?;
    let euler = euler_characteristic(model, a0)?;
    let n = model.complex_dim();

    let mut fixed_points = Vec::new();
    for (fp, dim) in model.fixed_points().iter().zip(&dims) {
        let exponents = fp
            .weights
            .iter()
            .map(|m| {
                let e = crate::torus::exponent(m, a0)?;
                Ok(ExponentEntry {
                    pairing: format_rational(&e.value),
                    scaled: e.scaled,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        fixed_points.push(FixedPointEntry {
            id: fp.id.0,
            label: fp.label.clone(),
            chart: model.chart_label(fp.chart),
            weights: fp.weights.iter().map(|w| w.0.clone()).collect(),
            exponents,
            unstable_dim: *dim,
            time_one_eigenvalues: time_one_map_eigenvalues(model, a0, fp.id)?,
        });
    }

    let mut verdicts: BTreeMap<String, Verdict> = BTreeMap::new();
    verdicts.insert("hyperbolicity".into(), hyper.verdict.clone());

    // Poincaré structure: even-degree coefficients only, χ = poincare(1)
    let structure_ok = poincare.iter().enumerate().all(|(k, &c)| c == 0 || k % 2 == 0)
        && euler == model.fixed_points().len() as i64;
    let mut structure_witnesses = Vec::new();
    if !structure_ok {
        structure_witnesses.push(format!("poincare = {poincare:?}, euler = {euler}"));
    }
    let hv = match model {
        Model::Toric(t) => {
            let hv = h_vector(t.fan());
            let matches = hv
                .iter()
                .enumerate()
                .all(|(k, &h)| poincare.get(2 * k).copied().unwrap_or(0) == h);
            if !matches {
                structure_witnesses
                    .push(format!("h-vector {hv:?} disagrees with poincare {poincare:?}"));
            }
            Some(hv)
        }
        _ => None,
    };
    verdicts.insert(
        "poincare_structure".into(),
        Verdict {
            pass: structure_witnesses.is_empty(),
            max_violation: structure_witnesses.len() as f64,
            witnesses: structure_witnesses,
        },
    );

    // sampling-based suites
    let samples = sample_stratified(model, settings.sample_count, &mut rng_for(settings.seed, 1));
    let covering = verify_covering(model, &samples, None);
    verdicts.insert("covering".into(), covering.verdict.clone());

    let basins = basin_classify(model, a0, &samples, tols)?;
    verdicts.insert("basin_agreement".into(), basins.agreement.clone());

    let convergence = verify_convergence_condition(model, a0, &samples, tols)?;
    verdicts.insert("convergence_fixed_set".into(), convergence.fixed_set_verdict.clone());
    verdicts.insert("convergence_separatrix".into(), convergence.separatrix_verdict.clone());
    verdicts.insert("convergence_limits".into(), convergence.limits_verdict.clone());

    let mut eq_rng = rng_for(settings.seed, 2);
    verdicts.insert(
        "chart_equivariance".into(),
        verify_all_charts_equivariance(model, settings.equivariance_trials, tols.chart_equivariance, &mut eq_rng)?,
    );
    verdicts.insert(
        "flow_equivariance".into(),
        flow_equivariance_check_with_table(
            model,
            &table,
            settings.equivariance_trials,
            tols.flow_identity,
            &mut eq_rng,
        )?,
    );

    // zero set: the field norm vanishes at fixed points and is bounded away
    // from zero at generic samples
    let pou = PartitionOfUnity::new(tols.bump_radius);
    let mut zero_witnesses = Vec::new();
    let mut max_at_fixed = 0.0f64;
    for fp in model.fixed_points() {
        let x = model.fixed_point_position(fp.id)?;
        let norm = global_field_norm(model, &table, &pou, &x)?;
        max_at_fixed = max_at_fixed.max(norm);
        if norm >= tols.zero_set_at_fixed {
            zero_witnesses.push(format!("norm {norm:.3e} at fixed point {}", fp.label));
        }
    }
    let generic_samples =
        crate::sampling::sample_generic_batch(model, settings.sample_count.min(2000), &mut rng_for(settings.seed, 3));
    let mut min_generic = f64::INFINITY;
    for x in &generic_samples {
        let norm = global_field_norm(model, &table, &pou, x)?;
        if norm < min_generic {
            min_generic = norm;
        }
        if norm <= tols.zero_set_generic_min && zero_witnesses.len() < 8 {
            zero_witnesses.push(format!("generic sample with field norm {norm:.3e}"));
        }
    }
    verdicts.insert(
        "zero_set".into(),
        Verdict {
            pass: zero_witnesses.is_empty(),
            max_violation: max_at_fixed,
            witnesses: zero_witnesses,
        },
    );

    verdicts.insert(
        "norm_decay".into(),
        crate::metric::verify_norm_decay(
            model,
            a0,
            settings.sample_count.min(100),
            tols,
            &mut rng_for(settings.seed, 4),
        )?,
    );

    // duality: negating a₀ complements every index to 2n and swaps limits
    let neg = a0.neg();
    let dims_neg = unstable_dims(model, &neg)?;
    let mut duality_witnesses = Vec::new();
    for (fp, (d, dneg)) in model.fixed_points().iter().zip(dims.iter().zip(&dims_neg)) {
        if d + dneg != 2 * n {
            duality_witnesses.push(format!(
                "indices at {} sum to {} ≠ {}",
                fp.label,
                d + dneg,
                2 * n
            ));
        }
    }
    let duality_samples: Vec<&Point> = samples.iter().take(200).collect();
    let neg_table = ExponentTable::new(model, &neg)?;
    let options = TrajectoryOptions {
        step: tols.rk4_step,
        max_time: tols.horizon_factor,
        switch_margin: tols.switch_margin,
        tolerance: tols.limit_detection,
    };
    for (idx, x) in duality_samples.iter().enumerate() {
        let fwd = limit_by_trajectory(model, &table, x, Direction::Forward, &options)?;
        let bwd_neg = limit_by_trajectory(model, &neg_table, x, Direction::Backward, &options)?;
        if fwd.fixed_point != bwd_neg.fixed_point && duality_witnesses.len() < 8 {
            duality_witnesses.push(format!(
                "sample {idx}: forward(a0) → {} but backward(−a0) → {}",
                fwd.fixed_point.0, bwd_neg.fixed_point.0
            ));
        }
    }
    verdicts.insert(
        "duality".into(),
        Verdict {
            pass: duality_witnesses.is_empty(),
            max_violation: duality_witnesses.len() as f64,
            witnesses: duality_witnesses,
        },
    );

    let poset = connection_poset(
        model,
        a0,
        settings.poset_seeds_per_point,
        tols,
        &mut rng_for(settings.seed, 5),
    )?;
    verdicts.insert("poset_index_decreasing".into(), poset.index_decreasing.clone());

    Ok(DecompositionReport {
        convention: crate::SIGN_CONVENTION.into(),
        model: model.descriptor(),
        a0: a0.clone(),
        seed: settings.seed,
        sample_count: settings.sample_count,
        tolerances: tols.clone(),
        fixed_points,
        poincare,
        euler,
        h_vector: hv,
        basin_counts: basins.basin_counts,
        co_basin_counts: basins.co_basin_counts,
        poset_edges: poset.edges,
        poset_inconclusive: poset.inconclusive,
        verdicts,
    })
}

/// Basins CSV (sample index, forward fixed point, backward fixed point).
pub fn basins_csv(report: &BasinReport, model: &Model) -> String {
    let mut out = String::from("sample,forward,backward\n");
    for (idx, (f, b)) in report.assignments.iter().enumerate() {
        let fl = model
            .fixed_point(FixedPointId(*f))
            .map(|fp| fp.label.clone())
            .unwrap_or_else(|_| f.to_string());
        let bl = model
            .fixed_point(FixedPointId(*b))
            .map(|fp| fp.label.clone())
            .unwrap_or_else(|_| b.to_string());
        out.push_str(&format!("{idx},{fl},{bl}\n"));
    }
    out
}
