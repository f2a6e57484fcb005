//! The gradient-like dynamical system: chart-local vector field, exact
//! diagonal flow with chart switching, an RK4 integrator for cross-checks,
//! and limit computation.
//!
//! In the chart of a fixed point p the field is diagonal,
//! ẋ_i = −a_i x_i, ẏ_i = −a_i y_i with a_i = 2π⟨m_{p,i}, a₀⟩, so the exact
//! flow scales coordinates by e^{−a_i s}. Trajectories that leave a chart are
//! re-expressed through a transition map and continue.

use std::collections::BTreeMap;

use num_complex::Complex64;
use num_rational::Rational64;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::models::{ChartId, ChartPoint, FixedPointId, Model, Point};
use crate::sampling::{sample_generic, sample_torus};
use crate::torus::{exponent, format_rational, rational_to_f64, GeneratorVector};
use crate::verdict::Verdict;

/// Flow direction for limit computation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Forward,
    Backward,
}

/// Integrator parameters.
#[derive(Debug, Clone)]
pub struct TrajectoryOptions {
    /// RK4 step (positive).
    pub step: f64,
    /// Horizon for limit searches.
    pub max_time: f64,
    /// Chart-exit threshold: leave when any |w_i| > 1/switch_margin.
    pub switch_margin: f64,
    /// Chart-local norm below which a trajectory is declared converged.
    pub tolerance: f64,
}

impl Default for TrajectoryOptions {
    fn default() -> Self {
        TrajectoryOptions {
            step: 1e-3,
            max_time: 200.0,
            switch_margin: 0.1,
            tolerance: 1e-9,
        }
    }
}

const MAX_CONSECUTIVE_SWITCHES: usize = 100;

/// Scaled flow exponents a_i per chart, with their exact rational values.
#[derive(Debug, Clone)]
pub struct ExponentTable {
    /// scaled[c][i] = 2π⟨m_{c,i}, a₀⟩ for chart c, coordinate i.
    pub scaled: Vec<Vec<f64>>,
    /// Exact pairings ⟨m_{c,i}, a₀⟩.
    pub values: Vec<Vec<Rational64>>,
}

impl ExponentTable {
    pub fn new(model: &Model, a0: &GeneratorVector) -> Result<Self> {
        if !model.supports_flow() {
            return Err(Error::UnsupportedFlow);
        }
        let mut scaled = Vec::new();
        let mut values = Vec::new();
        for fp in model.fixed_points() {
            let mut s = Vec::new();
            let mut v = Vec::new();
            for m in &fp.weights {
                let e = exponent(m, a0)?;
                s.push(e.scaled);
                v.push(e.value);
            }
            scaled.push(s);
            values.push(v);
        }
        Ok(ExponentTable { scaled, values })
    }

    pub fn chart(&self, c: ChartId) -> Result<&[f64]> {
        self.scaled.get(c.0).map(|v| v.as_slice()).ok_or(Error::UnknownChart(c.0))
    }

    /// Smallest nonzero |a_i| over the whole table; scales horizons.
    pub fn min_abs_exponent(&self) -> f64 {
        self.scaled
            .iter()
            .flatten()
            .map(|a| a.abs())
            .filter(|a| *a > 0.0)
            .fold(f64::INFINITY, f64::min)
    }

    pub fn negated(&self) -> ExponentTable {
        ExponentTable {
            scaled: self
                .scaled
                .iter()
                .map(|row| row.iter().map(|a| -a).collect())
                .collect(),
            values: self
                .values
                .iter()
                .map(|row| row.iter().map(|v| -v).collect())
                .collect(),
        }
    }

    /// Error if any exponent is exactly zero (non-generic generator).
    pub fn require_generic(&self) -> Result<()> {
        use num_traits::Zero;
        for (c, row) in self.values.iter().enumerate() {
            for (i, v) in row.iter().enumerate() {
                if v.is_zero() {
                    return Err(Error::NotGeneric(format!(
                        "exponent of coordinate {i} in chart {c} is exactly 0"
                    )));
                }
            }
        }
        Ok(())
    }
}

/// The gradient-like field in chart coordinates: (−a_1x_1, −a_1y_1, …).
pub fn vector_field(model: &Model, a0: &GeneratorVector, x: &ChartPoint) -> Result<Vec<f64>> {
    let table = ExponentTable::new(model, a0)?;
    vector_field_with_table(&table, x)
}

pub fn vector_field_with_table(table: &ExponentTable, x: &ChartPoint) -> Result<Vec<f64>> {
    let a = table.chart(x.chart)?;
    if a.len() != x.coords.len() {
        return Err(Error::DimensionMismatch {
            expected: a.len(),
            got: x.coords.len(),
        });
    }
    let mut out = Vec::with_capacity(2 * a.len());
    for (w, ai) in x.coords.iter().zip(a) {
        out.push(-ai * w.re);
        out.push(-ai * w.im);
    }
    Ok(out)
}

/// Exact time-s flow. Projective models use the global closed form
/// [z_j·e^{−a^{(j)}s}] (renormalized in log scale); toric models scale chart
/// coordinates and switch charts at domain exits.
pub fn flow_exact(model: &Model, a0: &GeneratorVector, x: &Point, s: f64) -> Result<Point> {
    match (model, x) {
        (Model::Projective(m), Point::Projective(z)) => {
            let rates: Vec<f64> = m
                .coordinate_weights()
                .iter()
                .map(|w| exponent(w, a0).map(|e| e.scaled))
                .collect::<Result<Vec<_>>>()?;
            // log-scale renormalization so large |a·s| cannot overflow
            let mut best = f64::NEG_INFINITY;
            for (zj, aj) in z.iter().zip(&rates) {
                if zj.norm() > 0.0 {
                    let b = zj.norm().ln() - aj * s;
                    if b > best {
                        best = b;
                    }
                }
            }
            let out: Vec<Complex64> = z
                .iter()
                .zip(&rates)
                .map(|(zj, aj)| {
                    if zj.norm() == 0.0 {
                        Complex64::new(0.0, 0.0)
                    } else {
                        let phase = zj / zj.norm();
                        phase * (zj.norm().ln() - aj * s - best).exp()
                    }
                })
                .collect();
            Ok(Point::Projective(out))
        }
        (Model::Toric(_), Point::Toric(p)) => {
            let table = ExponentTable::new(model, a0)?;
            let end = flow_exact_in_charts(model, &table, p, s, TrajectoryOptions::default().switch_margin)?;
            Ok(Point::Toric(end))
        }
        (Model::Sphere(_), _) => Err(Error::UnsupportedFlow),
        _ => Err(Error::InvalidModel("point kind does not match model".into())),
    }
}

/// Exact flow in chart coordinates with analytic chart switching: within a
/// chart each coordinate scales by e^{−a_i s}; the first time a growing
/// coordinate reaches 1/margin the point is re-expressed in the chart that
/// minimizes its largest coordinate and the flow resumes.
pub fn flow_exact_in_charts(
    model: &Model,
    table: &ExponentTable,
    start: &ChartPoint,
    s: f64,
    switch_margin: f64,
) -> Result<ChartPoint> {
    let radius = 1.0 / switch_margin;
    let mut current = start.clone();
    let mut remaining = s.abs();
    let sign = if s >= 0.0 { 1.0 } else { -1.0 };
    let mut consecutive_switches = 0usize;
    while remaining > 0.0 {
        let rates = table.chart(current.chart)?;
        // first exit time of a growing coordinate (rate b_i = sign·a_i < 0)
        let mut exit: f64 = f64::INFINITY;
        for (w, ai) in current.coords.iter().zip(rates) {
            let b = sign * ai;
            let r = w.norm();
            if b < 0.0 && r > 0.0 {
                let dt = (radius / r).ln() / (-b);
                if dt < exit {
                    exit = dt;
                }
            }
        }
        let dt = remaining.min(exit.max(0.0));
        if dt > 0.0 {
            current = scale_coords(&current, rates, sign * dt);
            remaining -= dt;
            consecutive_switches = 0;
        }
        if remaining <= 0.0 {
            break;
        }
        // on the boundary: move to the chart with the most slack
        let next = best_destination(model, &current)?;
        if next.chart == current.chart {
            consecutive_switches += 1;
            if consecutive_switches >= MAX_CONSECUTIVE_SWITCHES {
                return Err(Error::SwitchingThrash(consecutive_switches));
            }
            // nothing grows beyond the radius in this chart; flow the rest
            let rates = table.chart(current.chart)?;
            current = scale_coords(&current, rates, sign * remaining);
            remaining = 0.0;
        } else {
            current = next;
            consecutive_switches += 1;
            if consecutive_switches >= MAX_CONSECUTIVE_SWITCHES {
                return Err(Error::SwitchingThrash(consecutive_switches));
            }
        }
    }
    Ok(current)
}

fn scale_coords(p: &ChartPoint, rates: &[f64], dt: f64) -> ChartPoint {
    let coords = p
        .coords
        .iter()
        .zip(rates)
        .map(|(w, ai)| w * (-ai * dt).exp())
        .collect();
    ChartPoint::new(p.chart, coords)
}

/// The chart (including the current one) minimizing the largest coordinate
/// modulus of the re-expressed point.
fn best_destination(model: &Model, p: &ChartPoint) -> Result<ChartPoint> {
    let mut best = p.clone();
    let mut best_mod = p.max_modulus();
    for c in model.chart_ids() {
        if c == p.chart {
            continue;
        }
        if let Ok(coords) = model.transition(p.chart, c, &p.coords) {
            let cand = ChartPoint::new(c, coords);
            let m = cand.max_modulus();
            if m.is_finite() && m < best_mod {
                best_mod = m;
                best = cand;
            }
        }
    }
    Ok(best)
}

/// Classical fixed-step RK4 on the chart-local field, switching charts when a
/// coordinate passes the margin. Serves as the independent numerical oracle
/// for the exact flow.
pub fn flow_rk4(
    model: &Model,
    a0: &GeneratorVector,
    x: &Point,
    s: f64,
    options: &TrajectoryOptions,
) -> Result<Point> {
    let table = ExponentTable::new(model, a0)?;
    let start = to_chart_point(model, x)?;
    let end = flow_rk4_in_charts(model, &table, &start, s, options)?;
    from_chart_point(model, &end)
}

pub fn flow_rk4_in_charts(
    model: &Model,
    table: &ExponentTable,
    start: &ChartPoint,
    s: f64,
    options: &TrajectoryOptions,
) -> Result<ChartPoint> {
    let radius = 1.0 / options.switch_margin;
    let h = options.step.abs() * if s >= 0.0 { 1.0 } else { -1.0 };
    let mut current = start.clone();
    let mut t = 0.0f64;
    let mut consecutive_switches = 0usize;
    while (s - t).abs() > 1e-12 {
        let rem = s - t;
        let dt = if rem.abs() < h.abs() { rem } else { h };
        let rates = table.chart(current.chart)?;
        current = ChartPoint::new(current.chart, rk4_step(&current.coords, rates, dt));
        t += dt;
        if current.max_modulus() > radius {
            let next = best_destination(model, &current)?;
            if next.chart == current.chart {
                consecutive_switches += 1;
            } else {
                current = next;
                consecutive_switches += 1;
            }
            if consecutive_switches >= MAX_CONSECUTIVE_SWITCHES {
                return Err(Error::SwitchingThrash(consecutive_switches));
            }
        } else {
            consecutive_switches = 0;
        }
    }
    Ok(current)
}

/// One RK4 step of ẇ_i = −a_i w_i (componentwise; the complex coordinate
/// carries both real coordinates).
fn rk4_step(coords: &[Complex64], rates: &[f64], h: f64) -> Vec<Complex64> {
    coords
        .iter()
        .zip(rates)
        .map(|(w, ai)| {
            let f = |v: Complex64| -ai * v;
            let k1 = f(*w);
            let k2 = f(w + 0.5 * h * k1);
            let k3 = f(w + 0.5 * h * k2);
            let k4 = f(w + h * k3);
            w + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        })
        .collect()
}

pub fn to_chart_point(model: &Model, x: &Point) -> Result<ChartPoint> {
    match x {
        Point::Toric(p) => Ok(p.clone()),
        _ => model.best_chart(x),
    }
}

pub fn from_chart_point(model: &Model, p: &ChartPoint) -> Result<Point> {
    model.chart_unmap(p.chart, &p.coords)
}

/// Where the limit search ended.
#[derive(Debug, Clone, serde::Serialize)]
pub struct LimitOutcome {
    pub fixed_point: FixedPointId,
    pub direction: Direction,
    /// Flow time at which the trajectory entered the detection ball (0 for
    /// the analytic route).
    pub s_reached: f64,
}

/// Forward/backward limit of the flow through x.
///
/// Projective models use the analytic rule: the forward limit is the
/// coordinate point minimizing a^{(j)} = 2π⟨w_j, a₀⟩ over the nonzero
/// homogeneous coordinates (backward: maximizing); exact rational comparison,
/// ties are a genericity error. Toric models follow the exact flow until the
/// chart-local norm drops under the detection tolerance.
pub fn limit(model: &Model, a0: &GeneratorVector, x: &Point, direction: Direction) -> Result<LimitOutcome> {
    match (model, x) {
        (Model::Projective(m), Point::Projective(z)) => {
            let mut best: Option<(usize, Rational64)> = None;
            let mut tie: Option<(usize, usize)> = None;
            for (j, zj) in z.iter().enumerate() {
                if zj.norm() == 0.0 {
                    continue;
                }
                let q = crate::torus::pairing(&m.coordinate_weights()[j], a0)?;
                match &best {
                    None => best = Some((j, q)),
                    Some((bj, bq)) => {
                        let better = match direction {
                            Direction::Forward => q < *bq,
                            Direction::Backward => q > *bq,
                        };
                        if q == *bq {
                            tie = Some((*bj, j));
                        } else if better {
                            best = Some((j, q));
                            tie = None;
                        }
                    }
                }
            }
            if let Some((i, j)) = tie {
                return Err(Error::ExponentTie(format!("z_{i} and z_{j}")));
            }
            let (j, _) = best.ok_or_else(|| Error::InvalidModel("zero homogeneous vector".into()))?;
            Ok(LimitOutcome {
                fixed_point: FixedPointId(j),
                direction,
                s_reached: 0.0,
            })
        }
        (Model::Toric(_), Point::Toric(_)) => {
            let table = ExponentTable::new(model, a0)?;
            table.require_generic()?;
            limit_by_trajectory(model, &table, x, direction, &TrajectoryOptions::default())
        }
        (Model::Sphere(_), _) => Err(Error::UnsupportedFlow),
        _ => Err(Error::InvalidModel("point kind does not match model".into())),
    }
}

/// Follow the exact flow until the chart-local norm drops under the detection
/// tolerance, then report the chart's center. The horizon scales with the
/// smallest exponent; exceeding it is a convergence error.
pub fn limit_by_trajectory(
    model: &Model,
    table: &ExponentTable,
    x: &Point,
    direction: Direction,
    options: &TrajectoryOptions,
) -> Result<LimitOutcome> {
    let sign = match direction {
        Direction::Forward => 1.0,
        Direction::Backward => -1.0,
    };
    let min_a = table.min_abs_exponent();
    if !min_a.is_finite() || min_a == 0.0 {
        return Err(Error::NotGeneric("no nonzero exponent in table".into()));
    }
    let horizon = options.max_time / min_a;
    let step = 1.0 / min_a;
    let mut p = to_chart_point(model, x)?;
    let mut s = 0.0f64;
    loop {
        if p.norm() < options.tolerance {
            return Ok(LimitOutcome {
                fixed_point: FixedPointId(p.chart.0),
                direction,
                s_reached: s,
            });
        }
        if s >= horizon {
            return Err(Error::NoConvergence(horizon));
        }
        p = flow_exact_in_charts(model, table, &p, sign * step, options.switch_margin)?;
        s += step;
    }
}

/// Eigenvalues of the time-one map at a fixed point: {e^{−a_i}}, each with
/// multiplicity two. Hyperbolic iff none equals 1.
pub fn time_one_map_eigenvalues(
    model: &Model,
    a0: &GeneratorVector,
    fp: FixedPointId,
) -> Result<Vec<f64>> {
    let record = model.fixed_point(fp)?;
    let mut out = Vec::with_capacity(2 * record.weights.len());
    for m in &record.weights {
        let a = exponent(m, a0)?.scaled;
        let lambda = (-a).exp();
        out.push(lambda);
        out.push(lambda);
    }
    Ok(out)
}

/// Check φ_s(t·x) = t·φ_s(x) on random (t, x, s) triples.
///
/// The flow of t·x is evaluated through a re-randomized chart representation,
/// so a flow that is not well defined across charts (for example one with
/// per-chart inconsistent exponents) fails even though the action and the
/// scaling are both diagonal.
pub fn flow_equivariance_check(
    model: &Model,
    a0: &GeneratorVector,
    trials: usize,
    tol: f64,
    rng: &mut ChaCha8Rng,
) -> Result<Verdict> {
    let table = ExponentTable::new(model, a0)?;
    flow_equivariance_check_with_table(model, &table, trials, tol, rng)
}

pub fn flow_equivariance_check_with_table(
    model: &Model,
    table: &ExponentTable,
    trials: usize,
    tol: f64,
    rng: &mut ChaCha8Rng,
) -> Result<Verdict> {
    let options = TrajectoryOptions::default();
    let mut max_violation = 0.0f64;
    let mut witnesses = Vec::new();
    for trial in 0..trials {
        let x = sample_generic(model, rng);
        let t = sample_torus(model.rank(), rng);
        let s: f64 = rng.gen_range(-5.0..5.0);
        let xp = to_chart_point(model, &x)?;
        let txp = {
            let tx = model.act(&t, &from_chart_point(model, &xp)?)?;
            let tx_chart = to_chart_point(model, &tx)?;
            // re-express through a random chart when possible
            let c = ChartId(rng.gen_range(0..model.chart_count()));
            match model.transition(tx_chart.chart, c, &tx_chart.coords) {
                Ok(coords)
                    if coords.iter().all(|w| w.norm().is_finite())
                        && coords.iter().map(|w| w.norm()).fold(0.0, f64::max) < 1e6 =>
                {
                    ChartPoint::new(c, coords)
                }
                _ => tx_chart,
            }
        };
        let flowed_tx = flow_exact_in_charts(model, table, &txp, s, options.switch_margin)?;
        let flowed_x = flow_exact_in_charts(model, table, &xp, s, options.switch_margin)?;
        let t_flowed_x = model.act(&t, &from_chart_point(model, &flowed_x)?)?;
        let lhs = from_chart_point(model, &flowed_tx)?;
        let d = model.distance(&lhs, &t_flowed_x)?;
        if d > max_violation {
            max_violation = d;
        }
        if d >= tol && witnesses.len() < 5 {
            witnesses.push(format!("trial {trial}: distance {d:.3e} at s = {s:.3}"));
        }
    }
    Ok(Verdict::from_violation(max_violation, tol, witnesses))
}

/// Exponent table rendered with exact values, for reports.
pub fn exponent_table_rows(model: &Model, a0: &GeneratorVector) -> Result<Vec<BTreeMap<String, String>>> {
    let mut rows = Vec::new();
    for fp in model.fixed_points() {
        for (i, m) in fp.weights.iter().enumerate() {
            let e = exponent(m, a0)?;
            let mut row = BTreeMap::new();
            row.insert("fixed_point".into(), fp.label.clone());
            row.insert("coordinate".into(), i.to_string());
            row.insert("weight".into(), format!("{m}"));
            row.insert("pairing".into(), format_rational(&e.value));
            row.insert("scaled".into(), format!("{:.17e}", e.scaled));
            rows.push(row);
        }
    }
    Ok(rows)
}

/// min |a_i| for a model/generator pair (drives horizons).
pub fn min_abs_exponent(model: &Model, a0: &GeneratorVector) -> Result<f64> {
    Ok(ExponentTable::new(model, a0)?.min_abs_exponent())
}

pub fn rational_ratio_to_f64(q: &Rational64) -> f64 {
    rational_to_f64(q)
}
