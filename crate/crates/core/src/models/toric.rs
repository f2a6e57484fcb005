//! Smooth complete toric manifolds described by fans.
//!
//! A fan is given by its primitive ray generators and its maximal cones as
//! ray-index sets. Smoothness means every maximal cone's rays form a ℤ-basis;
//! completeness is checked by facet pairing (every facet of a maximal cone is
//! shared by exactly two maximal cones). Each maximal cone σ contributes one
//! fixed point and one chart whose coordinates transform by the dual basis of
//! σ's rays; transitions between charts are the induced monomial maps.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::torus::Weight;

use super::{ChartId, ChartPoint, FixedPoint, FixedPointId};

/// Rays and maximal cones of a rational polyhedral fan in ℤ^n.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct Fan {
    pub rank: usize,
    pub rays: Vec<Vec<i64>>,
    pub maximal_cones: Vec<Vec<usize>>,
}

/// Violations found by `validate_fan`, grouped by axiom.
#[derive(Debug, Clone, Serialize, Default)]
pub struct FanValidation {
    pub primitivity: Vec<String>,
    pub smoothness: Vec<String>,
    pub completeness: Vec<String>,
    pub structure: Vec<String>,
}

impl FanValidation {
    pub fn is_valid(&self) -> bool {
        self.primitivity.is_empty()
            && self.smoothness.is_empty()
            && self.completeness.is_empty()
            && self.structure.is_empty()
    }

    pub fn all_violations(&self) -> Vec<String> {
        let mut out = Vec::new();
        out.extend(self.structure.iter().cloned());
        out.extend(self.primitivity.iter().cloned());
        out.extend(self.smoothness.iter().cloned());
        out.extend(self.completeness.iter().cloned());
        out
    }
}

/// Check primitivity, smoothness (unimodular maximal cones), and completeness
/// (every facet shared by exactly two maximal cones). Returns all violations.
pub fn validate_fan(fan: &Fan) -> FanValidation {
    let n = fan.rank;
    let mut v = FanValidation::default();
    if n == 0 {
        v.structure.push("rank must be ≥ 1".into());
        return v;
    }
    for (i, ray) in fan.rays.iter().enumerate() {
        if ray.len() != n {
            v.structure
                .push(format!("ray {i} has {} entries, expected {n}", ray.len()));
            continue;
        }
        let g = ray.iter().fold(0i64, |acc, &x| gcd(acc, x.abs()));
        if g != 1 {
            v.primitivity
                .push(format!("ray {i} = {ray:?} is not primitive (gcd {g})"));
        }
    }
    if !v.structure.is_empty() {
        return v;
    }
    let mut seen = BTreeMap::new();
    for (ci, cone) in fan.maximal_cones.iter().enumerate() {
        if cone.len() != n {
            v.structure.push(format!(
                "maximal cone {ci} has {} rays, expected {n}",
                cone.len()
            ));
            continue;
        }
        let mut sorted = cone.clone();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() != n {
            v.structure
                .push(format!("maximal cone {ci} repeats a ray index"));
            continue;
        }
        if sorted.iter().any(|&r| r >= fan.rays.len()) {
            v.structure
                .push(format!("maximal cone {ci} references a missing ray"));
            continue;
        }
        if let Some(prev) = seen.insert(sorted, ci) {
            v.structure
                .push(format!("maximal cones {prev} and {ci} coincide"));
        }
    }
    if !v.structure.is_empty() {
        return v;
    }
    // smoothness: |det| of the ray matrix must be 1
    for (ci, cone) in fan.maximal_cones.iter().enumerate() {
        let mat: Vec<Vec<i64>> = cone.iter().map(|&r| fan.rays[r].clone()).collect();
        let d = int_det(&mat);
        if d.unsigned_abs() != 1 {
            v.smoothness.push(format!(
                "maximal cone {ci} (rays {cone:?}) has determinant {d}, not ±1"
            ));
        }
    }
    // completeness: each facet (n−1 subset) appears in exactly two maximal cones
    let mut facet_count: BTreeMap<Vec<usize>, usize> = BTreeMap::new();
    for cone in &fan.maximal_cones {
        let mut sorted = cone.clone();
        sorted.sort_unstable();
        for drop in 0..n {
            let facet: Vec<usize> = sorted
                .iter()
                .enumerate()
                .filter(|&(k, _)| k != drop)
                .map(|(_, &r)| r)
                .collect();
            *facet_count.entry(facet).or_insert(0) += 1;
        }
    }
    for (facet, count) in &facet_count {
        if *count != 2 {
            v.completeness.push(format!(
                "facet {facet:?} lies in {count} maximal cones, expected 2"
            ));
        }
    }
    v
}

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 {
        a.abs()
    } else {
        gcd(b, a % b)
    }
}

/// Exact integer determinant by cofactor expansion (desk-scale ranks).
fn int_det(rows: &[Vec<i64>]) -> i128 {
    fn go(rows: &[Vec<i128>]) -> i128 {
        let n = rows.len();
        if n == 1 {
            return rows[0][0];
        }
        let mut det = 0i128;
        for (j, &lead) in rows[0].iter().enumerate() {
            if lead == 0 {
                continue;
            }
            let minor: Vec<Vec<i128>> = rows[1..]
                .iter()
                .map(|r| {
                    r.iter()
                        .enumerate()
                        .filter(|&(k, _)| k != j)
                        .map(|(_, &x)| x)
                        .collect()
                })
                .collect();
            let sign = if j % 2 == 0 { 1 } else { -1 };
            det += sign * lead * go(&minor);
        }
        det
    }
    let wide: Vec<Vec<i128>> = rows
        .iter()
        .map(|r| r.iter().map(|&x| x as i128).collect())
        .collect();
    go(&wide)
}

/// Inverse of a unimodular integer matrix (rows of the result are the dual
/// basis covectors of the input columns).
fn unimodular_inverse(cols: &[Vec<i64>]) -> Option<Vec<Vec<i64>>> {
    let n = cols.len();
    // row-major matrix M with M[i][j] = cols[j][i]
    let rows: Vec<Vec<i64>> = (0..n).map(|i| (0..n).map(|j| cols[j][i]).collect()).collect();
    let det = int_det(&rows);
    if det.unsigned_abs() != 1 {
        return None;
    }
    // adjugate: adj[i][j] = (−1)^{i+j} · minor_det(j, i)
    let mut inv = vec![vec![0i64; n]; n];
    for (i, row) in inv.iter_mut().enumerate() {
        for (j, entry) in row.iter_mut().enumerate() {
            let minor: Vec<Vec<i64>> = (0..n)
                .filter(|&r| r != j)
                .map(|r| {
                    (0..n)
                        .filter(|&c| c != i)
                        .map(|c| rows[r][c])
                        .collect()
                })
                .collect();
            let m = if n == 1 { 1 } else { int_det(&minor) };
            let sign = if (i + j) % 2 == 0 { 1 } else { -1 };
            *entry = (sign * m * det) as i64; // det = ±1, so this divides by det
        }
    }
    Some(inv)
}

#[derive(Debug, Clone)]
struct ToricChart {
    /// Ray indices of the maximal cone, in fan order.
    rays: Vec<usize>,
    /// Dual basis: weights[i] pairs to δ_ij with the cone's rays.
    weights: Vec<Weight>,
}

/// Toric manifold of a smooth complete fan, represented through its atlas of
/// maximal-cone charts.
#[derive(Debug, Clone)]
pub struct ToricModel {
    fan: Fan,
    charts: Vec<ToricChart>,
    fixed_points: Vec<FixedPoint>,
}

impl ToricModel {
    pub fn new(fan: Fan) -> Result<Self> {
        let validation = validate_fan(&fan);
        if !validation.is_valid() {
            return Err(Error::InvalidModel(format!(
                "fan is not smooth and complete: {}",
                validation.all_violations().join("; ")
            )));
        }
        let mut charts = Vec::new();
        let mut fixed_points = Vec::new();
        for (ci, cone) in fan.maximal_cones.iter().enumerate() {
            let cols: Vec<Vec<i64>> = cone.iter().map(|&r| fan.rays[r].clone()).collect();
            let inv = unimodular_inverse(&cols)
                .ok_or_else(|| Error::InvalidModel(format!("cone {ci} is not unimodular")))?;
            let weights: Vec<Weight> = inv.into_iter().map(Weight::new).collect();
            charts.push(ToricChart {
                rays: cone.clone(),
                weights: weights.clone(),
            });
            fixed_points.push(FixedPoint {
                id: FixedPointId(ci),
                label: format!(
                    "cone({})",
                    cone.iter()
                        .map(|r| r.to_string())
                        .collect::<Vec<_>>()
                        .join(",")
                ),
                chart: ChartId(ci),
                weights,
            });
        }
        Ok(ToricModel {
            fan,
            charts,
            fixed_points,
        })
    }

    pub fn fan(&self) -> &Fan {
        &self.fan
    }

    pub fn fixed_points(&self) -> &[FixedPoint] {
        &self.fixed_points
    }

    pub fn chart_label(&self, c: ChartId) -> String {
        format!(
            "U_cone({})",
            self.charts[c.0]
                .rays
                .iter()
                .map(|r| r.to_string())
                .collect::<Vec<_>>()
                .join(",")
        )
    }

    /// Exponent matrix of the monomial transition `from → to`:
    /// entry [j][i] = ⟨m^to_j, v^from_i⟩.
    pub fn transition_exponents(&self, from: ChartId, to: ChartId) -> Result<Vec<Vec<i64>>> {
        let (f, t) = (
            self.charts.get(from.0).ok_or(Error::UnknownChart(from.0))?,
            self.charts.get(to.0).ok_or(Error::UnknownChart(to.0))?,
        );
        let n = self.fan.rank;
        let mut exps = vec![vec![0i64; n]; n];
        for (j, m) in t.weights.iter().enumerate() {
            for (i, &ray_idx) in f.rays.iter().enumerate() {
                let ray = &self.fan.rays[ray_idx];
                exps[j][i] = m.0.iter().zip(ray).map(|(a, b)| a * b).sum();
            }
        }
        Ok(exps)
    }

    /// Monomial transition w'_j = Π_i w_i^{e_ji}. A coordinate that is zero
    /// may only appear with nonnegative exponent; otherwise the point lies
    /// outside the target chart.
    pub fn transition(&self, from: ChartId, to: ChartId, coords: &[Complex64]) -> Result<Vec<Complex64>> {
        let n = self.fan.rank;
        if coords.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: coords.len(),
            });
        }
        if from == to {
            return Ok(coords.to_vec());
        }
        let exps = self.transition_exponents(from, to)?;
        let mut out = Vec::with_capacity(n);
        for row in &exps {
            let mut w = Complex64::new(1.0, 0.0);
            for (i, &e) in row.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                if coords[i].norm() == 0.0 {
                    if e < 0 {
                        return Err(Error::OutsideChart(format!(
                            "coordinate {i} is 0 but needs exponent {e}"
                        )));
                    }
                    w = Complex64::new(0.0, 0.0);
                    break;
                }
                w *= coords[i].powi(e as i32);
            }
            out.push(w);
        }
        Ok(out)
    }

    /// Distance between chart representations: compared in the first chart
    /// holding both points, preferring the points' own charts.
    pub fn chart_point_distance(&self, a: &ChartPoint, b: &ChartPoint) -> Result<f64> {
        let mut candidates = vec![a.chart, b.chart];
        candidates.extend((0..self.charts.len()).map(ChartId));
        for c in candidates {
            let ta = self.transition(a.chart, c, &a.coords);
            let tb = self.transition(b.chart, c, &b.coords);
            if let (Ok(ca), Ok(cb)) = (ta, tb) {
                let d = ca
                    .iter()
                    .zip(&cb)
                    .map(|(x, y)| (x - y).norm())
                    .fold(0.0, f64::max);
                return Ok(d);
            }
        }
        Err(Error::OutsideChart(
            "points share no chart; cannot compare".into(),
        ))
    }
}

/// The fan of CP^n: rays e_1,…,e_n and −(e_1+⋯+e_n), maximal cones all
/// n-subsets of the rays.
pub fn projective_fan(n: usize) -> Fan {
    let mut rays: Vec<Vec<i64>> = (0..n)
        .map(|k| {
            let mut v = vec![0i64; n];
            v[k] = 1;
            v
        })
        .collect();
    rays.push(vec![-1i64; n]);
    let maximal_cones = (0..=n)
        .map(|skip| (0..=n).filter(|&r| r != skip).collect())
        .collect();
    Fan {
        rank: n,
        rays,
        maximal_cones,
    }
}

/// The fan of the first Hirzebruch surface: rays e₁, e₂, −e₁+e₂, −e₂ with
/// four 2-dimensional cones between neighbours.
pub fn hirzebruch_fan() -> Fan {
    Fan {
        rank: 2,
        rays: vec![vec![1, 0], vec![0, 1], vec![-1, 1], vec![0, -1]],
        maximal_cones: vec![vec![0, 1], vec![1, 2], vec![2, 3], vec![3, 0]],
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn cp2_fan_is_valid() {
        let v = validate_fan(&projective_fan(2));
        assert!(v.is_valid(), "{v:?}");
    }

    #[test]
    fn hirzebruch_fan_is_valid() {
        let v = validate_fan(&hirzebruch_fan());
        assert!(v.is_valid(), "{v:?}");
    }

    #[test]
    fn non_unimodular_cone_reports_determinant() {
        let fan = Fan {
            rank: 2,
            rays: vec![vec![2, 0], vec![0, 1]],
            maximal_cones: vec![vec![0, 1]],
        };
        let v = validate_fan(&fan);
        assert!(!v.is_valid());
        assert!(v.smoothness.iter().any(|s| s.contains("determinant 2")), "{v:?}");
        assert!(!v.primitivity.is_empty());
        assert!(!v.completeness.is_empty());
    }

    #[test]
    fn incomplete_fan_detected() {
        // drop one maximal cone from the CP² fan
        let mut fan = projective_fan(2);
        fan.maximal_cones.pop();
        let v = validate_fan(&fan);
        assert!(v.smoothness.is_empty());
        assert!(!v.completeness.is_empty());
    }

    #[test]
    fn cp1_fan_valid_and_has_two_fixed_points() {
        let fan = projective_fan(1);
        assert!(validate_fan(&fan).is_valid());
        let m = ToricModel::new(fan).unwrap();
        assert_eq!(m.fixed_points().len(), 2);
    }

    #[test]
    fn dual_basis_weights_cp2() {
        // cones are listed by skipped ray: index 0 = cone{1,2}, index 2 = cone{0,1}
        let m = ToricModel::new(projective_fan(2)).unwrap();
        // cone(e₂, −e₁−e₂): duals are (−1,1) and (−1,0)
        assert_eq!(
            m.fixed_points()[0].weights,
            vec![Weight::new(vec![-1, 1]), Weight::new(vec![-1, 0])]
        );
        // cone(e₁,e₂): dual basis is the standard one
        assert_eq!(
            m.fixed_points()[2].weights,
            vec![Weight::new(vec![1, 0]), Weight::new(vec![0, 1])]
        );
    }

    #[test]
    fn duals_pair_to_identity() {
        for fan in [projective_fan(2), projective_fan(3), hirzebruch_fan()] {
            let m = ToricModel::new(fan.clone()).unwrap();
            for (cone, fp) in fan.maximal_cones.iter().zip(m.fixed_points()) {
                for (i, w) in fp.weights.iter().enumerate() {
                    for (j, &r) in cone.iter().enumerate() {
                        let dot: i64 = w.0.iter().zip(&fan.rays[r]).map(|(a, b)| a * b).sum();
                        assert_eq!(dot, i64::from(i == j));
                    }
                }
            }
        }
    }

    #[test]
    fn cp2_transition_monomial_map() {
        let m = ToricModel::new(projective_fan(2)).unwrap();
        // charts: 0 = cone(e₂,−e₁−e₂) [skip ray 0], wait — cones are built by
        // skipping one ray in order, so chart 0 skips ray 0.
        // Identify the chart of cone {0,1} = cone(e₁,e₂):
        let from = m
            .fan()
            .maximal_cones
            .iter()
            .position(|c| {
                let mut s = c.clone();
                s.sort_unstable();
                s == vec![0, 1]
            })
            .map(ChartId)
            .unwrap();
        let to = m
            .fan()
            .maximal_cones
            .iter()
            .position(|c| {
                let mut s = c.clone();
                s.sort_unstable();
                s == vec![1, 2]
            })
            .map(ChartId)
            .unwrap();
        let w = [c(2.0, 0.0), c(3.0, 0.0)];
        let out = m.transition(from, to, &w).unwrap();
        // dual basis of cone(e₂,−e₁−e₂) in ray order (1,2) is ((−1,1),(−1,0)),
        // so the transition sends (w₁,w₂) to (w₂/w₁, 1/w₁)
        assert!((out[0] - c(1.5, 0.0)).norm() < 1e-15);
        assert!((out[1] - c(0.5, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn transition_rejects_zero_with_negative_exponent() {
        let m = ToricModel::new(projective_fan(2)).unwrap();
        let from = ChartId(0);
        let to = ChartId(1);
        let exps = m.transition_exponents(from, to).unwrap();
        // find a coordinate appearing with a negative exponent and zero it
        let mut w = [c(0.5, 0.0), c(0.5, 0.0)];
        let target = exps
            .iter()
            .flat_map(|row| row.iter().enumerate())
            .find(|&(_, &e)| e < 0)
            .map(|(i, _)| i)
            .expect("some negative exponent exists");
        w[target] = c(0.0, 0.0);
        assert!(matches!(
            m.transition(from, to, &w),
            Err(Error::OutsideChart(_))
        ));
    }

    #[test]
    fn int_det_small_cases() {
        assert_eq!(int_det(&[vec![3]]), 3);
        assert_eq!(int_det(&[vec![1, 2], vec![3, 4]]), -2);
        assert_eq!(
            int_det(&[vec![1, 0, 0], vec![0, 2, 0], vec![0, 0, 5]]),
            10
        );
    }
}
