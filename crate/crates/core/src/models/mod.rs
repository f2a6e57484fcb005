//! Concrete T-manifolds with equivariant atlases.
//!
//! Three model families are supported: complex projective space with a
//! coordinate torus action, smooth complete toric manifolds described by
//! fans, and even-dimensional spheres S^{2n} ⊂ ℂ^n × ℝ with the coordinate
//! rotation action. Each model owns an atlas indexed by its fixed points;
//! chart coordinates transform diagonally by characters of the chart's
//! weights.

pub mod projective;
pub mod sphere;
pub mod toric;
pub mod verify;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::torus::{character_eval, TorusElement, Weight};

pub use projective::ProjectiveModel;
pub use sphere::SphereModel;
pub use toric::{Fan, FanValidation, ToricModel};

/// Index of a chart in a model's atlas. Charts are indexed by fixed points,
/// so the same index names both.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct ChartId(pub usize);

/// Index of a fixed point; coincides with the index of the chart it labels.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct FixedPointId(pub usize);

/// A fixed point together with its chart and tangential weights.
#[derive(Debug, Clone)]
pub struct FixedPoint {
    pub id: FixedPointId,
    pub label: String,
    /// The chart this fixed point indexes in the covering.
    pub chart: ChartId,
    /// Weights of the T-action on the chart coordinates, m_{p,1..n}.
    pub weights: Vec<Weight>,
}

/// A point expressed in a chart.
#[derive(Debug, Clone, PartialEq)]
pub struct ChartPoint {
    pub chart: ChartId,
    pub coords: Vec<Complex64>,
}

impl ChartPoint {
    pub fn new(chart: ChartId, coords: Vec<Complex64>) -> Self {
        ChartPoint { chart, coords }
    }

    /// Euclidean norm of the coordinate vector.
    pub fn norm(&self) -> f64 {
        self.coords.iter().map(|w| w.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Largest coordinate modulus.
    pub fn max_modulus(&self) -> f64 {
        self.coords.iter().map(|w| w.norm()).fold(0.0, f64::max)
    }

    /// Interleaved real coordinates (x₁, y₁, …, x_n, y_n).
    pub fn reals(&self) -> Vec<f64> {
        self.coords.iter().flat_map(|w| [w.re, w.im]).collect()
    }
}

/// Global coordinates of a point, model-specific.
#[derive(Debug, Clone, PartialEq)]
pub enum Point {
    /// Homogeneous coordinates, normalized so the maximum modulus is 1.
    Projective(Vec<Complex64>),
    /// Toric points carry a chart representation; transitions move it.
    Toric(ChartPoint),
    /// (z, s) with |z|² + s² = 1.
    Sphere { z: Vec<Complex64>, s: f64 },
}

/// Serializable description of a model, the file-level input format.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum ModelDescriptor {
    Projective {
        dimension: usize,
        #[serde(skip_serializing_if = "Option::is_none")]
        coordinate_weights: Option<Vec<Vec<i64>>>,
    },
    Toric {
        fan: Fan,
    },
    Sphere {
        half_dimension: usize,
    },
}

/// A torus manifold with its equivariant atlas.
#[derive(Debug, Clone)]
pub enum Model {
    Projective(ProjectiveModel),
    Toric(ToricModel),
    Sphere(SphereModel),
}

impl Model {
    pub fn from_descriptor(d: &ModelDescriptor) -> Result<Model> {
        match d {
            ModelDescriptor::Projective {
                dimension,
                coordinate_weights,
            } => {
                let weights = coordinate_weights
                    .as_ref()
                    .map(|ws| ws.iter().cloned().map(Weight::new).collect());
                Ok(Model::Projective(ProjectiveModel::new(*dimension, weights)?))
            }
            ModelDescriptor::Toric { fan } => Ok(Model::Toric(ToricModel::new(fan.clone())?)),
            ModelDescriptor::Sphere { half_dimension } => {
                Ok(Model::Sphere(SphereModel::new(*half_dimension)?))
            }
        }
    }

    pub fn descriptor(&self) -> ModelDescriptor {
        match self {
            Model::Projective(m) => ModelDescriptor::Projective {
                dimension: m.dimension(),
                coordinate_weights: Some(
                    m.coordinate_weights().iter().map(|w| w.0.clone()).collect(),
                ),
            },
            Model::Toric(m) => ModelDescriptor::Toric { fan: m.fan().clone() },
            Model::Sphere(m) => ModelDescriptor::Sphere {
                half_dimension: m.half_dimension(),
            },
        }
    }

    /// Rank r of the acting torus.
    pub fn rank(&self) -> usize {
        match self {
            Model::Projective(m) => m.dimension(),
            Model::Toric(m) => m.fan().rank,
            Model::Sphere(m) => m.half_dimension(),
        }
    }

    /// Complex dimension n (charts have n complex coordinates).
    pub fn complex_dim(&self) -> usize {
        match self {
            Model::Projective(m) => m.dimension(),
            Model::Toric(m) => m.fan().rank,
            Model::Sphere(m) => m.half_dimension(),
        }
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            Model::Projective(_) => "projective",
            Model::Toric(_) => "toric",
            Model::Sphere(_) => "sphere",
        }
    }

    /// Flows require every chart to be a weight chart centered at its fixed
    /// point; sphere charts are centered at the opposite pole, and S^{2n}
    /// carries no invariant almost complex structure in general.
    pub fn supports_flow(&self) -> bool {
        !matches!(self, Model::Sphere(_))
    }

    pub fn chart_count(&self) -> usize {
        self.fixed_points().len()
    }

    pub fn chart_ids(&self) -> Vec<ChartId> {
        (0..self.chart_count()).map(ChartId).collect()
    }

    pub fn chart_label(&self, c: ChartId) -> String {
        match self {
            Model::Projective(_) => format!("U{}", c.0),
            Model::Toric(m) => m.chart_label(c),
            Model::Sphere(_) => {
                if c.0 == 0 {
                    "U_north".into()
                } else {
                    "U_south".into()
                }
            }
        }
    }

    /// All fixed points with their tangential weights.
    pub fn fixed_points(&self) -> &[FixedPoint] {
        match self {
            Model::Projective(m) => m.fixed_points(),
            Model::Toric(m) => m.fixed_points(),
            Model::Sphere(m) => m.fixed_points(),
        }
    }

    pub fn fixed_point(&self, id: FixedPointId) -> Result<&FixedPoint> {
        self.fixed_points()
            .get(id.0)
            .ok_or(Error::UnknownFixedPoint(id.0))
    }

    /// Tangential weights at a fixed point.
    pub fn tangential_weights(&self, id: FixedPointId) -> Result<Vec<Weight>> {
        Ok(self.fixed_point(id)?.weights.clone())
    }

    /// Weights by which T acts diagonally on the coordinates of a chart.
    pub fn chart_weights(&self, c: ChartId) -> Result<Vec<Weight>> {
        if c.0 >= self.chart_count() {
            return Err(Error::UnknownChart(c.0));
        }
        self.tangential_weights(FixedPointId(c.0))
    }

    /// Union of all tangential weights over all fixed points (with repeats).
    pub fn all_tangential_weights(&self) -> Vec<Weight> {
        self.fixed_points()
            .iter()
            .flat_map(|fp| fp.weights.iter().cloned())
            .collect()
    }

    /// The global position of a fixed point.
    pub fn fixed_point_position(&self, id: FixedPointId) -> Result<Point> {
        match self {
            Model::Projective(m) => m.fixed_point_position(id),
            Model::Toric(_) => Ok(Point::Toric(ChartPoint::new(
                ChartId(id.0),
                vec![Complex64::new(0.0, 0.0); self.complex_dim()],
            ))),
            Model::Sphere(m) => m.fixed_point_position(id),
        }
    }

    /// Whether a point lies in the (full) domain of a chart.
    pub fn contains_in_chart(&self, c: ChartId, x: &Point) -> Result<bool> {
        Ok(self.chart_map(c, x).is_ok())
    }

    /// Express a point in the given chart.
    pub fn chart_map(&self, c: ChartId, x: &Point) -> Result<Vec<Complex64>> {
        match (self, x) {
            (Model::Projective(m), Point::Projective(z)) => m.chart_map(c, z),
            (Model::Toric(m), Point::Toric(p)) => m.transition(p.chart, c, &p.coords),
            (Model::Sphere(m), Point::Sphere { z, s }) => m.chart_map(c, z, *s),
            _ => Err(Error::InvalidModel("point kind does not match model".into())),
        }
    }

    /// Reconstruct the global point from chart coordinates.
    pub fn chart_unmap(&self, c: ChartId, coords: &[Complex64]) -> Result<Point> {
        match self {
            Model::Projective(m) => Ok(Point::Projective(m.chart_unmap(c, coords)?)),
            Model::Toric(m) => {
                if c.0 >= m.fixed_points().len() {
                    return Err(Error::UnknownChart(c.0));
                }
                if coords.len() != self.complex_dim() {
                    return Err(Error::DimensionMismatch {
                        expected: self.complex_dim(),
                        got: coords.len(),
                    });
                }
                Ok(Point::Toric(ChartPoint::new(c, coords.to_vec())))
            }
            Model::Sphere(m) => {
                let (z, s) = m.chart_unmap(c, coords)?;
                Ok(Point::Sphere { z, s })
            }
        }
    }

    /// Transition map between two charts.
    pub fn transition(&self, from: ChartId, to: ChartId, coords: &[Complex64]) -> Result<Vec<Complex64>> {
        match self {
            Model::Projective(m) => m.chart_map(to, &m.chart_unmap(from, coords)?),
            Model::Toric(m) => m.transition(from, to, coords),
            Model::Sphere(m) => {
                let (z, s) = m.chart_unmap(from, coords)?;
                m.chart_map(to, &z, s)
            }
        }
    }

    /// The torus action t·x.
    pub fn act(&self, t: &TorusElement, x: &Point) -> Result<Point> {
        if t.rank() != self.rank() {
            return Err(Error::DimensionMismatch {
                expected: self.rank(),
                got: t.rank(),
            });
        }
        match (self, x) {
            (Model::Projective(m), Point::Projective(z)) => {
                Ok(Point::Projective(m.act(t, z)?))
            }
            (Model::Toric(_), Point::Toric(p)) => {
                let weights = self.chart_weights(p.chart)?;
                let coords = p
                    .coords
                    .iter()
                    .zip(&weights)
                    .map(|(w, m)| Ok(character_eval(m, t)? * w))
                    .collect::<Result<Vec<_>>>()?;
                Ok(Point::Toric(ChartPoint::new(p.chart, coords)))
            }
            (Model::Sphere(_), Point::Sphere { z, s }) => {
                let z = z
                    .iter()
                    .enumerate()
                    .map(|(k, zk)| Ok(t.coordinate(k) * zk))
                    .collect::<Result<Vec<_>>>()?;
                Ok(Point::Sphere { z, s: *s })
            }
            _ => Err(Error::InvalidModel("point kind does not match model".into())),
        }
    }

    /// A metric-like distance used by verification checks: zero iff the two
    /// points coincide, locally comparable to chart-coordinate distance.
    pub fn distance(&self, x: &Point, y: &Point) -> Result<f64> {
        match (self, x, y) {
            (Model::Projective(_), Point::Projective(a), Point::Projective(b)) => {
                Ok(projective_distance(a, b))
            }
            (Model::Sphere(_), Point::Sphere { z: za, s: sa }, Point::Sphere { z: zb, s: sb }) => {
                let mut d2 = (sa - sb) * (sa - sb);
                for (a, b) in za.iter().zip(zb) {
                    d2 += (a - b).norm_sqr();
                }
                Ok(d2.sqrt())
            }
            (Model::Toric(m), Point::Toric(a), Point::Toric(b)) => m.chart_point_distance(a, b),
            _ => Err(Error::InvalidModel("point kinds do not match model".into())),
        }
    }

    /// Re-express the point through the chart that minimizes the largest
    /// coordinate modulus; this is the canonical evaluation chart.
    pub fn best_chart(&self, x: &Point) -> Result<ChartPoint> {
        let mut best: Option<ChartPoint> = None;
        for c in self.chart_ids() {
            if let Ok(coords) = self.chart_map(c, x) {
                let cand = ChartPoint::new(c, coords);
                let better = match &best {
                    None => true,
                    Some(b) => cand.max_modulus() < b.max_modulus(),
                };
                if better {
                    best = Some(cand);
                }
            }
        }
        best.ok_or_else(|| Error::OutsideChart("point lies in no chart".into()))
    }
}

/// Chordal distance between projective points: the sine of the angle between
/// the lines, computed as a projection residual so that tiny distances do not
/// cancel away.
pub fn projective_distance(a: &[Complex64], b: &[Complex64]) -> f64 {
    let na = a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let nb = b.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if na == 0.0 || nb == 0.0 {
        return f64::INFINITY;
    }
    // <b̂, â> with the Hermitian form conjugating the first slot
    let ip: Complex64 = b
        .iter()
        .zip(a)
        .map(|(bz, az)| bz.conj() * az / (na * nb))
        .sum();
    let mut resid2 = 0.0;
    for (az, bz) in a.iter().zip(b) {
        let r = az / na - ip * bz / nb;
        resid2 += r.norm_sqr();
    }
    resid2.sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn projective_distance_zero_on_rescaled_point() {
        let a = vec![Complex64::new(1.0, 0.0), Complex64::new(0.5, 0.25)];
        let b: Vec<Complex64> = a.iter().map(|z| z * Complex64::new(0.3, -1.2)).collect();
        assert!(projective_distance(&a, &b) < 1e-14);
    }

    #[test]
    fn projective_distance_resolves_small_perturbations() {
        let a = vec![Complex64::new(1.0, 0.0), Complex64::new(0.5, 0.0)];
        let mut b = a.clone();
        b[1] += Complex64::new(1e-9, 0.0);
        let d = projective_distance(&a, &b);
        assert!(d > 1e-10 && d < 1e-8, "d = {d}");
    }

    #[test]
    fn descriptor_roundtrip() {
        let d = ModelDescriptor::Projective {
            dimension: 2,
            coordinate_weights: None,
        };
        let m = Model::from_descriptor(&d).unwrap();
        let d2 = m.descriptor();
        let m2 = Model::from_descriptor(&d2).unwrap();
        assert_eq!(m.descriptor(), m2.descriptor());
        let json = serde_json::to_string(&d2).unwrap();
        let back: ModelDescriptor = serde_json::from_str(&json).unwrap();
        assert_eq!(back, d2);
    }
}
