//! Even spheres S^{2n} ⊂ ℂ^n × ℝ with the coordinate rotation action
//! (t₁,…,t_n)·(z₁,…,z_n, s) = (t₁z₁,…,t_nz_n, s).
//!
//! The two-chart atlas is indexed by the poles: the north chart is the
//! stereographic projection from the north pole composed with componentwise
//! conjugation, u = conj(z)/(1−s) on {s ≠ 1}; the south chart is the plain
//! projection u = z/(1+s) on {s ≠ −1}. The conjugation makes the north chart
//! coordinates transform with weights −e_k; the south chart transforms with
//! +e_k. Sphere models support covering and equivariance verification only,
//! never flows.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::torus::Weight;

use super::{ChartId, FixedPoint, FixedPointId, Point};

pub const NORTH: ChartId = ChartId(0);
pub const SOUTH: ChartId = ChartId(1);

#[derive(Debug, Clone)]
pub struct SphereModel {
    n: usize,
    /// When false, the north chart drops the conjugation (a deliberately
    /// broken atlas used as a negative control in equivariance checks).
    conjugate_north: bool,
    fixed_points: Vec<FixedPoint>,
}

impl SphereModel {
    pub fn new(n: usize) -> Result<Self> {
        Self::build(n, true)
    }

    /// Same sphere, but the north chart is the bare stereographic projection
    /// without the conjugation. Its coordinates do not transform by any
    /// integer weight vector consistently; equivariance checks must fail.
    pub fn without_north_conjugation(n: usize) -> Result<Self> {
        Self::build(n, false)
    }

    fn build(n: usize, conjugate_north: bool) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidModel("sphere half-dimension must be ≥ 1".into()));
        }
        let north_weights: Vec<Weight> = (0..n).map(|k| Weight::basis(n, k).neg()).collect();
        let south_weights: Vec<Weight> = (0..n).map(|k| Weight::basis(n, k)).collect();
        let fixed_points = vec![
            FixedPoint {
                id: FixedPointId(0),
                label: "north".into(),
                chart: NORTH,
                weights: north_weights,
            },
            FixedPoint {
                id: FixedPointId(1),
                label: "south".into(),
                chart: SOUTH,
                weights: south_weights,
            },
        ];
        Ok(SphereModel {
            n,
            conjugate_north,
            fixed_points,
        })
    }

    pub fn half_dimension(&self) -> usize {
        self.n
    }

    pub fn fixed_points(&self) -> &[FixedPoint] {
        &self.fixed_points
    }

    pub fn fixed_point_position(&self, id: FixedPointId) -> Result<Point> {
        let s = match id.0 {
            0 => 1.0,
            1 => -1.0,
            _ => return Err(Error::UnknownFixedPoint(id.0)),
        };
        Ok(Point::Sphere {
            z: vec![Complex64::new(0.0, 0.0); self.n],
            s,
        })
    }

    /// Scale (z, s) onto the unit sphere; rejects near-zero input.
    pub fn normalize(&self, z: &[Complex64], s: f64) -> Result<(Vec<Complex64>, f64)> {
        if z.len() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                got: z.len(),
            });
        }
        let norm = (z.iter().map(|w| w.norm_sqr()).sum::<f64>() + s * s).sqrt();
        if norm < 1e-12 || !norm.is_finite() {
            return Err(Error::InvalidModel("sphere point too close to zero".into()));
        }
        Ok((z.iter().map(|w| w / norm).collect(), s / norm))
    }

    pub fn chart_map(&self, c: ChartId, z: &[Complex64], s: f64) -> Result<Vec<Complex64>> {
        if z.len() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                got: z.len(),
            });
        }
        match c {
            NORTH => {
                if (1.0 - s).abs() < 1e-14 {
                    return Err(Error::OutsideChart("s = 1 is excluded from the north chart".into()));
                }
                Ok(z.iter()
                    .map(|w| {
                        let w = if self.conjugate_north { w.conj() } else { *w };
                        w / (1.0 - s)
                    })
                    .collect())
            }
            SOUTH => {
                if (1.0 + s).abs() < 1e-14 {
                    return Err(Error::OutsideChart("s = −1 is excluded from the south chart".into()));
                }
                Ok(z.iter().map(|w| w / (1.0 + s)).collect())
            }
            _ => Err(Error::UnknownChart(c.0)),
        }
    }

    pub fn chart_unmap(&self, c: ChartId, coords: &[Complex64]) -> Result<(Vec<Complex64>, f64)> {
        if coords.len() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                got: coords.len(),
            });
        }
        let u2: f64 = coords.iter().map(|u| u.norm_sqr()).sum();
        match c {
            NORTH => {
                // s = (|u|²−1)/(|u|²+1), z = conj(u)·(1−s)
                let s = (u2 - 1.0) / (u2 + 1.0);
                let scale = 2.0 / (u2 + 1.0);
                let z = coords
                    .iter()
                    .map(|u| {
                        let u = if self.conjugate_north { u.conj() } else { *u };
                        u * scale
                    })
                    .collect();
                Ok((z, s))
            }
            SOUTH => {
                let s = (1.0 - u2) / (1.0 + u2);
                let scale = 2.0 / (u2 + 1.0);
                Ok((coords.iter().map(|u| u * scale).collect(), s))
            }
            _ => Err(Error::UnknownChart(c.0)),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn poles_are_the_fixed_points() {
        let m = SphereModel::new(2).unwrap();
        assert_eq!(m.fixed_points().len(), 2);
        match m.fixed_point_position(FixedPointId(0)).unwrap() {
            Point::Sphere { z, s } => {
                assert!(z.iter().all(|w| w.norm() == 0.0));
                assert_eq!(s, 1.0);
            }
            _ => panic!(),
        }
    }

    #[test]
    fn south_chart_on_equator_is_identity_scale() {
        // s = 0: u = z/(1+0) = z
        let m = SphereModel::new(1).unwrap();
        let z = [c(1.0, 0.0)];
        let u = m.chart_map(SOUTH, &z, 0.0).unwrap();
        assert!((u[0] - z[0]).norm() < 1e-15);
    }

    #[test]
    fn chart_roundtrip_both_charts() {
        let m = SphereModel::new(2).unwrap();
        let (z, s) = m
            .normalize(&[c(0.3, -0.2), c(0.1, 0.45)], 0.7)
            .unwrap();
        for chart in [NORTH, SOUTH] {
            let u = m.chart_map(chart, &z, s).unwrap();
            let (z2, s2) = m.chart_unmap(chart, &u).unwrap();
            assert!((s - s2).abs() < 1e-12);
            for (a, b) in z.iter().zip(&z2) {
                assert!((a - b).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn north_chart_rejects_north_pole() {
        let m = SphereModel::new(1).unwrap();
        assert!(matches!(
            m.chart_map(NORTH, &[c(0.0, 0.0)], 1.0),
            Err(Error::OutsideChart(_))
        ));
    }

    #[test]
    fn north_to_south_transition_is_inverted_conjugate() {
        // u ↦ conj(u)/|u|² between the two stereographic charts
        let m = SphereModel::new(1).unwrap();
        let u = [c(0.8, 0.6)];
        let (z, s) = m.chart_unmap(NORTH, &u).unwrap();
        let v = m.chart_map(SOUTH, &z, s).unwrap();
        let expected = u[0].conj() / u[0].norm_sqr();
        assert!((v[0] - expected).norm() < 1e-13);
    }
}
