//! Complex projective space CP^n with a coordinate torus action.
//!
//! The rank-n torus acts by t·[z_0:…:z_n] = [α_{w_0}(t)z_0 : … : α_{w_n}(t)z_n]
//! where the coordinate weights default to w_0 = 0, w_i = e_i, matching the
//! action [z_0 : t_1z_1 : … : t_nz_n]. Fixed points are the coordinate
//! points; the chart U_i = {z_i ≠ 0} carries affine coordinates z_j/z_i on
//! which the action is diagonal with weights w_j − w_i.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::torus::{character_eval, TorusElement, Weight};

use super::{ChartId, FixedPoint, FixedPointId, Point};

#[derive(Debug, Clone)]
pub struct ProjectiveModel {
    n: usize,
    coordinate_weights: Vec<Weight>,
    fixed_points: Vec<FixedPoint>,
}

impl ProjectiveModel {
    /// Build CP^n; `coordinate_weights`, when given, must be n+1 weights of
    /// rank n with pairwise-distinct entries (isolated fixed points).
    pub fn new(n: usize, coordinate_weights: Option<Vec<Weight>>) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidModel("projective dimension must be ≥ 1".into()));
        }
        let weights = match coordinate_weights {
            Some(ws) => ws,
            None => {
                let mut ws = vec![Weight::zero(n)];
                ws.extend((0..n).map(|k| Weight::basis(n, k)));
                ws
            }
        };
        if weights.len() != n + 1 {
            return Err(Error::InvalidModel(format!(
                "expected {} coordinate weights, got {}",
                n + 1,
                weights.len()
            )));
        }
        for w in &weights {
            if w.rank() != n {
                return Err(Error::InvalidModel(format!(
                    "coordinate weight {w} has rank {} ≠ {n}",
                    w.rank()
                )));
            }
        }
        for i in 0..weights.len() {
            for j in 0..i {
                if weights[i] == weights[j] {
                    return Err(Error::InvalidModel(format!(
                        "coordinate weights {j} and {i} coincide; fixed points are not isolated"
                    )));
                }
            }
        }
        let fixed_points = (0..=n)
            .map(|i| {
                let tangential: Vec<Weight> = (0..=n)
                    .filter(|&j| j != i)
                    .map(|j| weights[j].sub(&weights[i]).expect("equal ranks"))
                    .collect();
                FixedPoint {
                    id: FixedPointId(i),
                    label: coordinate_point_label(n, i),
                    chart: ChartId(i),
                    weights: tangential,
                }
            })
            .collect();
        Ok(ProjectiveModel {
            n,
            coordinate_weights: weights,
            fixed_points,
        })
    }

    pub fn dimension(&self) -> usize {
        self.n
    }

    pub fn coordinate_weights(&self) -> &[Weight] {
        &self.coordinate_weights
    }

    pub fn fixed_points(&self) -> &[FixedPoint] {
        &self.fixed_points
    }

    pub fn fixed_point_position(&self, id: FixedPointId) -> Result<Point> {
        if id.0 > self.n {
            return Err(Error::UnknownFixedPoint(id.0));
        }
        let mut z = vec![Complex64::new(0.0, 0.0); self.n + 1];
        z[id.0] = Complex64::new(1.0, 0.0);
        Ok(Point::Projective(z))
    }

    /// Normalize homogeneous coordinates so the largest modulus is 1.
    pub fn normalize(&self, z: &[Complex64]) -> Result<Vec<Complex64>> {
        if z.len() != self.n + 1 {
            return Err(Error::DimensionMismatch {
                expected: self.n + 1,
                got: z.len(),
            });
        }
        let m = z.iter().map(|w| w.norm()).fold(0.0, f64::max);
        if m == 0.0 || !m.is_finite() {
            return Err(Error::InvalidModel(
                "homogeneous coordinates must be nonzero and finite".into(),
            ));
        }
        Ok(z.iter().map(|w| w / m).collect())
    }

    /// Affine coordinates (z_j/z_i)_{j≠i} on U_i = {z_i ≠ 0}.
    pub fn chart_map(&self, c: ChartId, z: &[Complex64]) -> Result<Vec<Complex64>> {
        let i = c.0;
        if i > self.n {
            return Err(Error::UnknownChart(i));
        }
        if z.len() != self.n + 1 {
            return Err(Error::DimensionMismatch {
                expected: self.n + 1,
                got: z.len(),
            });
        }
        if z[i].norm() == 0.0 {
            return Err(Error::OutsideChart(format!("z_{i} = 0")));
        }
        Ok((0..=self.n)
            .filter(|&j| j != i)
            .map(|j| z[j] / z[i])
            .collect())
    }

    /// Insert 1 in slot i and renormalize.
    pub fn chart_unmap(&self, c: ChartId, coords: &[Complex64]) -> Result<Vec<Complex64>> {
        let i = c.0;
        if i > self.n {
            return Err(Error::UnknownChart(i));
        }
        if coords.len() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                got: coords.len(),
            });
        }
        let mut z = Vec::with_capacity(self.n + 1);
        let mut it = coords.iter();
        for j in 0..=self.n {
            if j == i {
                z.push(Complex64::new(1.0, 0.0));
            } else {
                z.push(*it.next().expect("length checked"));
            }
        }
        self.normalize(&z)
    }

    /// Coordinatewise character action on homogeneous coordinates.
    pub fn act(&self, t: &TorusElement, z: &[Complex64]) -> Result<Vec<Complex64>> {
        if z.len() != self.n + 1 {
            return Err(Error::DimensionMismatch {
                expected: self.n + 1,
                got: z.len(),
            });
        }
        z.iter()
            .zip(&self.coordinate_weights)
            .map(|(zj, wj)| Ok(character_eval(wj, t)? * zj))
            .collect()
    }
}

fn coordinate_point_label(n: usize, i: usize) -> String {
    let mut parts = vec!["0"; n + 1];
    parts[i] = "1";
    format!("[{}]", parts.join(":"))
}
