//! Exact arithmetic for the compact torus T = (S¹)^r.
//!
//! Weights live in the character lattice ℤ^r and generator vectors in
//! Lie(T) ≅ ℚ^r, stored exactly so that genericity (no tangential weight
//! pairs to zero) is decidable without tolerances.
//!
//! Exponential convention: exp(a) = (e^{2πi a_1}, …, e^{2πi a_r}), so the
//! character of weight m evaluates as α_m(exp(a)) = e^{2πi⟨m,a⟩} and the
//! flow exponent attached to m is 2π⟨m, a₀⟩.

use std::f64::consts::TAU;
use std::fmt;

use num_complex::Complex64;
use num_rational::Rational64;
use num_traits::{Signed, Zero};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Integer covector in the character lattice ℤ^r.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Weight(pub Vec<i64>);

impl Weight {
    pub fn new(components: Vec<i64>) -> Self {
        Weight(components)
    }

    pub fn rank(&self) -> usize {
        self.0.len()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&c| c == 0)
    }

    /// Componentwise difference `self − other`.
    pub fn sub(&self, other: &Weight) -> Result<Weight> {
        check_len(self.rank(), other.rank())?;
        Ok(Weight(
            self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect(),
        ))
    }

    /// Componentwise sum.
    pub fn add(&self, other: &Weight) -> Result<Weight> {
        check_len(self.rank(), other.rank())?;
        Ok(Weight(
            self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect(),
        ))
    }

    pub fn neg(&self) -> Weight {
        Weight(self.0.iter().map(|&c| -c).collect())
    }

    /// Standard basis covector e_k (0-indexed) of rank `r`.
    pub fn basis(r: usize, k: usize) -> Weight {
        let mut v = vec![0i64; r];
        v[k] = 1;
        Weight(v)
    }

    pub fn zero(r: usize) -> Weight {
        Weight(vec![0i64; r])
    }
}

impl fmt::Display for Weight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

/// Element a₀ of Lie(T) ≅ ℝ^r stored as exact rationals.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GeneratorVector(pub Vec<Rational64>);

impl GeneratorVector {
    pub fn new(components: Vec<Rational64>) -> Self {
        GeneratorVector(components)
    }

    /// Parse from comma-separated "p/q" entries, e.g. `"1/3,1/7"`.
    pub fn parse(s: &str) -> Result<Self> {
        let comps = s
            .split(',')
            .map(|tok| parse_rational(tok.trim()))
            .collect::<Result<Vec<_>>>()?;
        if comps.is_empty() {
            return Err(Error::Parse("empty generator vector".into()));
        }
        Ok(GeneratorVector(comps))
    }

    pub fn rank(&self) -> usize {
        self.0.len()
    }

    pub fn neg(&self) -> GeneratorVector {
        GeneratorVector(self.0.iter().map(|c| -c).collect())
    }

    /// Float image of the components.
    pub fn to_f64(&self) -> Vec<f64> {
        self.0.iter().map(rational_to_f64).collect()
    }
}

impl fmt::Display for GeneratorVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, q) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{}", format_rational(q))?;
        }
        write!(f, ")")
    }
}

/// Point t = (e^{2πiθ_1},…,e^{2πiθ_r}) of the torus, stored by its angles
/// θ_k ∈ [0,1).
#[derive(Debug, Clone, PartialEq)]
pub struct TorusElement(Vec<f64>);

impl TorusElement {
    /// Angles are reduced mod 1 on construction.
    pub fn from_angles(angles: Vec<f64>) -> Self {
        TorusElement(angles.into_iter().map(frac).collect())
    }

    pub fn identity(r: usize) -> Self {
        TorusElement(vec![0.0; r])
    }

    pub fn angles(&self) -> &[f64] {
        &self.0
    }

    pub fn rank(&self) -> usize {
        self.0.len()
    }

    /// Group multiplication (angles add mod 1).
    pub fn mul(&self, other: &TorusElement) -> Result<TorusElement> {
        check_len(self.rank(), other.rank())?;
        Ok(TorusElement(
            self.0
                .iter()
                .zip(&other.0)
                .map(|(a, b)| frac(a + b))
                .collect(),
        ))
    }

    /// exp(s·a₀) under the convention exp(a) = (e^{2πi a_k})_k.
    pub fn exp_scaled(a0: &GeneratorVector, s: f64) -> TorusElement {
        TorusElement(a0.0.iter().map(|q| frac(s * rational_to_f64(q))).collect())
    }

    /// Coordinate k as a unit complex number e^{2πiθ_k}.
    pub fn coordinate(&self, k: usize) -> Complex64 {
        Complex64::from_polar(1.0, TAU * self.0[k])
    }
}

/// Exact flow exponent q = ⟨m, a₀⟩ together with its 2π-scaled float image.
#[derive(Debug, Clone, PartialEq)]
pub struct FlowExponent {
    /// Exact pairing ⟨m, a₀⟩.
    pub value: Rational64,
    /// a = 2π·value; the flow contracts the coordinate forward in time
    /// when a > 0 (w(s) = w·e^{−a s}).
    pub scaled: f64,
}

impl FlowExponent {
    pub fn sign(&self) -> i8 {
        if self.value.is_zero() {
            0
        } else if self.value.is_positive() {
            1
        } else {
            -1
        }
    }
}

/// Exact lattice pairing Σ m_k·(a₀)_k.
pub fn pairing(m: &Weight, a0: &GeneratorVector) -> Result<Rational64> {
    check_len(m.rank(), a0.rank())?;
    let mut acc = Rational64::zero();
    for (c, q) in m.0.iter().zip(&a0.0) {
        acc += Rational64::from_integer(*c) * q;
    }
    Ok(acc)
}

/// Evaluate the character of weight m at t: e^{2πi⟨m,θ⟩}.
pub fn character_eval(m: &Weight, t: &TorusElement) -> Result<Complex64> {
    check_len(m.rank(), t.rank())?;
    let dot: f64 = m
        .0
        .iter()
        .zip(t.angles())
        .map(|(c, th)| *c as f64 * th)
        .sum();
    Ok(Complex64::from_polar(1.0, TAU * dot))
}

/// Flow exponent of weight m under generator a₀.
pub fn exponent(m: &Weight, a0: &GeneratorVector) -> Result<FlowExponent> {
    let value = pairing(m, a0)?;
    Ok(FlowExponent {
        value,
        scaled: TAU * rational_to_f64(&value),
    })
}

/// Outcome of the genericity check for a generator vector against a weight set.
///
/// `zero_weights` are flagged separately: a zero tangential weight signals a
/// positive-dimensional fixed set rather than a bad generator choice.
#[derive(Debug, Clone, Serialize)]
pub struct GenericityReport {
    pub generic: bool,
    /// Nonzero weights whose pairing with a₀ is exactly 0.
    pub null_pairings: Vec<Weight>,
    /// Zero weights present in the input set.
    pub zero_weights: Vec<Weight>,
}

/// Check that ⟨m, a₀⟩ ≠ 0 for every nonzero weight in the set.
///
/// This replaces the topological-generator condition by the finite check the
/// hyperbolicity argument actually needs; the verdict means "generic for this
/// model", nothing stronger.
pub fn is_generic(a0: &GeneratorVector, weights: &[Weight]) -> Result<GenericityReport> {
    let mut null_pairings = Vec::new();
    let mut zero_weights = Vec::new();
    for m in weights {
        if m.is_zero() {
            if !zero_weights.contains(m) {
                zero_weights.push(m.clone());
            }
            continue;
        }
        if pairing(m, a0)?.is_zero() && !null_pairings.contains(m) {
            null_pairings.push(m.clone());
        }
    }
    null_pairings.sort();
    zero_weights.sort();
    Ok(GenericityReport {
        generic: null_pairings.is_empty() && zero_weights.is_empty(),
        null_pairings,
        zero_weights,
    })
}

/// Reduce to [0, 1).
pub fn frac(x: f64) -> f64 {
    let f = x.fract();
    if f < 0.0 {
        f + 1.0
    } else {
        f
    }
}

pub(crate) fn rational_to_f64(q: &Rational64) -> f64 {
    *q.numer() as f64 / *q.denom() as f64
}

/// Parse "p/q" or "p" into an exact rational.
pub fn parse_rational(s: &str) -> Result<Rational64> {
    let bad = |_| Error::Parse(format!("invalid rational '{s}'"));
    match s.split_once('/') {
        Some((p, q)) => {
            let num: i64 = p.trim().parse().map_err(bad)?;
            let den: i64 = q.trim().parse().map_err(bad)?;
            if den == 0 {
                return Err(Error::Parse(format!("zero denominator in '{s}'")));
            }
            Ok(Rational64::new(num, den))
        }
        None => {
            let num: i64 = s.trim().parse().map_err(bad)?;
            Ok(Rational64::from_integer(num))
        }
    }
}

/// Format as "p/q" (or "p" when the denominator is 1).
pub fn format_rational(q: &Rational64) -> String {
    if *q.denom() == 1 {
        format!("{}", q.numer())
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

impl Serialize for GeneratorVector {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let strings: Vec<String> = self.0.iter().map(format_rational).collect();
        strings.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for GeneratorVector {
    fn deserialize<D: Deserializer<'de>>(
        deserializer: D,
    ) -> std::result::Result<Self, D::Error> {
        let strings: Vec<String> = Vec::deserialize(deserializer)?;
        let comps = strings
            .iter()
            .map(|s| parse_rational(s).map_err(|e| D::Error::custom(e.to_string())))
            .collect::<std::result::Result<Vec<_>, _>>()?;
        Ok(GeneratorVector(comps))
    }
}

fn check_len(expected: usize, got: usize) -> Result<()> {
    if expected != got {
        Err(Error::DimensionMismatch { expected, got })
    } else {
        Ok(())
    }
}
