//! Seeded point samplers.
//!
//! Generic samples are Gaussian (normalized per model); stratified samplers
//! additionally place a deliberate share of samples on the coordinate strata
//! (zeroed coordinate subsets, poles, fixed points), which random generic
//! draws never hit.

use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::models::{ChartId, ChartPoint, Model, Point};

pub fn rng_for(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Standard normal via Box–Muller.
fn std_normal(rng: &mut ChaCha8Rng) -> f64 {
    let u1: f64 = rng.gen_range(f64::MIN_POSITIVE..1.0);
    let u2: f64 = rng.gen();
    (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
}

fn gaussian_complex(rng: &mut ChaCha8Rng) -> Complex64 {
    Complex64::new(std_normal(rng), std_normal(rng))
}

/// One generic sample (no stratum is hit almost surely).
pub fn sample_generic(model: &Model, rng: &mut ChaCha8Rng) -> Point {
    match model {
        Model::Projective(m) => {
            let z: Vec<Complex64> = (0..=m.dimension()).map(|_| gaussian_complex(rng)).collect();
            Point::Projective(m.normalize(&z).expect("gaussian vector is nonzero"))
        }
        Model::Toric(m) => {
            let n = m.fan().rank;
            let chart = ChartId(rng.gen_range(0..m.fixed_points().len()));
            let coords: Vec<Complex64> = (0..n).map(|_| gaussian_complex(rng)).collect();
            let p = ChartPoint::new(chart, coords);
            // randomize the representation through a transition when possible
            let target = ChartId(rng.gen_range(0..m.fixed_points().len()));
            match m.transition(p.chart, target, &p.coords) {
                Ok(coords)
                    if coords
                        .iter()
                        .all(|w| w.norm().is_finite() && w.norm() < 1e3) =>
                {
                    Point::Toric(ChartPoint::new(target, coords))
                }
                _ => Point::Toric(p),
            }
        }
        Model::Sphere(m) => {
            let z: Vec<Complex64> = (0..m.half_dimension()).map(|_| gaussian_complex(rng)).collect();
            let s = std_normal(rng);
            let (z, s) = m.normalize(&z, s).expect("gaussian vector is nonzero");
            Point::Sphere { z, s }
        }
    }
}

pub fn sample_generic_batch(model: &Model, count: usize, rng: &mut ChaCha8Rng) -> Vec<Point> {
    (0..count).map(|_| sample_generic(model, rng)).collect()
}

/// Enumerate the coordinate strata of a model as zero-index sets.
fn strata(model: &Model) -> Vec<Vec<usize>> {
    let slots = match model {
        Model::Projective(m) => m.dimension() + 1,
        Model::Toric(m) => m.fan().rank,
        Model::Sphere(m) => m.half_dimension(),
    };
    // nonempty subsets, smallest first; for projective skip the full set
    let mut subsets: Vec<Vec<usize>> = (1u32..(1 << slots))
        .map(|mask| (0..slots).filter(|k| mask >> k & 1 == 1).collect())
        .collect();
    subsets.sort_by_key(|s: &Vec<usize>| (s.len(), s.clone()));
    if matches!(model, Model::Projective(_)) {
        subsets.retain(|s| s.len() < slots);
    }
    subsets
}

/// A sample lying on the given stratum (exact zeros in the listed slots).
fn sample_on_stratum(model: &Model, zeros: &[usize], rng: &mut ChaCha8Rng) -> Point {
    match model {
        Model::Projective(m) => {
            let z: Vec<Complex64> = (0..=m.dimension())
                .map(|j| {
                    if zeros.contains(&j) {
                        Complex64::new(0.0, 0.0)
                    } else {
                        gaussian_complex(rng)
                    }
                })
                .collect();
            Point::Projective(m.normalize(&z).expect("proper subset keeps a nonzero slot"))
        }
        Model::Toric(m) => {
            let n = m.fan().rank;
            let chart = ChartId(rng.gen_range(0..m.fixed_points().len()));
            let coords: Vec<Complex64> = (0..n)
                .map(|j| {
                    if zeros.contains(&j) {
                        Complex64::new(0.0, 0.0)
                    } else {
                        gaussian_complex(rng)
                    }
                })
                .collect();
            Point::Toric(ChartPoint::new(chart, coords))
        }
        Model::Sphere(m) => {
            let z: Vec<Complex64> = (0..m.half_dimension())
                .map(|j| {
                    if zeros.contains(&j) {
                        Complex64::new(0.0, 0.0)
                    } else {
                        gaussian_complex(rng)
                    }
                })
                .collect();
            let s = std_normal(rng);
            let (z, s) = match m.normalize(&z, s) {
                Ok(p) => p,
                Err(_) => (
                    vec![Complex64::new(0.0, 0.0); m.half_dimension()],
                    1.0,
                ),
            };
            Point::Sphere { z, s }
        }
    }
}

/// `count` samples, roughly 90% generic and 10% spread over strata (poles and
/// fixed points included for the sphere and toric models, the coordinate
/// subspaces for all of them). Deterministic in (model, seed).
pub fn sample_stratified(model: &Model, count: usize, rng: &mut ChaCha8Rng) -> Vec<Point> {
    let strata = strata(model);
    let stratum_total = if strata.is_empty() { 0 } else { (count / 10).min(strata.len() * 8) };
    let mut points = sample_generic_batch(model, count - stratum_total, rng);
    for k in 0..stratum_total {
        points.push(sample_on_stratum(model, &strata[k % strata.len()], rng));
    }
    if let Model::Sphere(_) = model {
        // ensure both poles appear when there is room
        if points.len() >= 2 {
            let n = model.complex_dim();
            let len = points.len();
            points[len - 1] = Point::Sphere {
                z: vec![Complex64::new(0.0, 0.0); n],
                s: 1.0,
            };
            points[len - 2] = Point::Sphere {
                z: vec![Complex64::new(0.0, 0.0); n],
                s: -1.0,
            };
        }
    }
    points
}

/// A random torus element.
pub fn sample_torus(rank: usize, rng: &mut ChaCha8Rng) -> crate::torus::TorusElement {
    crate::torus::TorusElement::from_angles((0..rank).map(|_| rng.gen::<f64>()).collect())
}
