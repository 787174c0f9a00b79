//! JSON input files for curves and pose lists.
//!
//! A curve file holds eight coordinate arrays, coefficients in ascending
//! powers of `t`:
//!
//! ```json
//! { "coordinates": [[0, 0, 0], [22134, 39870, 4440], ...], "metadata": {} }
//! ```
//!
//! A pose file holds two to four Study-parameter tuples:
//!
//! ```json
//! { "poses": [[1, 0, 0, 0, 0, 0, 0, 0], [0, 0, 0, 1, 1, 0, 1, 0]] }
//! ```
//!
//! Integers and `"num/den"` strings are exact; any decimal entry switches
//! the whole object to floating point. Syntax and entry errors carry the
//! line and column reported by the JSON reader.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};
use serde::de::{self, Deserializer, Visitor};
use serde::Deserialize;
use serde_json::{Map, Value};

use crate::interp::{interpolate_poses, verify_interpolation, NodeParam};
use crate::mechanism::file::check_curve;
use crate::mechanism::Curve;
use crate::motionpoly::MotionPolynomial;
use crate::quatcore::{DualQuaternion, Pose, Rational, Scalar};
use crate::{Error, Result};

/// One number of an input file.
#[derive(Clone, Debug, PartialEq)]
pub enum Coefficient {
    Exact(Rational),
    Float(f64),
}

impl Coefficient {
    pub fn to_f64(&self) -> f64 {
        match self {
            Coefficient::Exact(r) => Scalar::to_f64(r),
            Coefficient::Float(v) => *v,
        }
    }

    fn parse(s: &str) -> Option<Self> {
        let s = s.trim();
        let int = |x: &str| x.trim().parse::<BigInt>().ok();
        if let Some((n, d)) = s.split_once('/') {
            let (n, d) = (int(n)?, int(d)?);
            return (!d.is_zero()).then(|| Coefficient::Exact(Rational::new(n, d)));
        }
        if let Some(n) = int(s) {
            return Some(Coefficient::Exact(Rational::from_integer(n)));
        }
        s.parse::<f64>().ok().filter(|v| v.is_finite()).map(Coefficient::Float)
    }
}

impl<'de> Deserialize<'de> for Coefficient {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        struct V;
        impl Visitor<'_> for V {
            type Value = Coefficient;

            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a number or a \"num/den\" string")
            }

            fn visit_i64<E: de::Error>(self, v: i64) -> std::result::Result<Coefficient, E> {
                Ok(Coefficient::Exact(Rational::from_integer(v.into())))
            }

            fn visit_u64<E: de::Error>(self, v: u64) -> std::result::Result<Coefficient, E> {
                Ok(Coefficient::Exact(Rational::from_integer(v.into())))
            }

            fn visit_f64<E: de::Error>(self, v: f64) -> std::result::Result<Coefficient, E> {
                Ok(Coefficient::Float(v))
            }

            fn visit_str<E: de::Error>(self, v: &str) -> std::result::Result<Coefficient, E> {
                Coefficient::parse(v).ok_or_else(|| E::custom(format!("invalid coefficient {v:?}")))
            }
        }
        d.deserialize_any(V)
    }
}

fn eight_rows<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Vec<Vec<Coefficient>>, D::Error> {
    let rows = Vec::<Vec<Coefficient>>::deserialize(d)?;
    if rows.len() != 8 {
        return Err(de::Error::custom(format!("expected 8 coordinate arrays, found {}", rows.len())));
    }
    Ok(rows)
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct CurveFile {
    #[serde(deserialize_with = "eight_rows")]
    coordinates: Vec<Vec<Coefficient>>,
    #[serde(default)]
    metadata: Map<String, Value>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct PosesFile {
    poses: Vec<[Coefficient; 8]>,
    #[serde(default)]
    metadata: Map<String, Value>,
}

#[derive(Clone, Debug)]
pub struct CurveInput {
    pub curve: Curve,
    pub metadata: Map<String, Value>,
}

#[derive(Clone, Debug)]
pub struct PosesInput {
    pub poses: Poses,
    pub metadata: Map<String, Value>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Poses {
    Exact(Vec<DualQuaternion<Rational>>),
    Float(Vec<DualQuaternion<f64>>),
}

/// Interpolant of a pose list with its node parameters (`None` = ∞).
#[derive(Clone, Debug)]
pub struct Interpolant {
    pub curve: Curve,
    pub nodes: Vec<Option<f64>>,
    pub max_residual: f64,
}

fn parse_error(e: serde_json::Error) -> Error {
    Error::ParseError(e.to_string())
}

pub fn parse_curve(text: &str) -> Result<CurveInput> {
    let file: CurveFile = serde_json::from_str(text).map_err(parse_error)?;
    Ok(CurveInput { curve: curve_from_rows(&file.coordinates)?, metadata: file.metadata })
}

pub fn parse_poses(text: &str) -> Result<PosesInput> {
    let file: PosesFile = serde_json::from_str(text).map_err(parse_error)?;
    Ok(PosesInput { poses: poses_from_rows(&file.poses)?, metadata: file.metadata })
}

/// Builds and validates a curve from coordinate rows.
pub fn curve_from_rows(rows: &[Vec<Coefficient>]) -> Result<Curve> {
    if rows.len() != 8 {
        return Err(Error::ParseError(format!("expected 8 coordinate arrays, found {}", rows.len())));
    }
    let exact = rows.iter().flatten().all(|c| matches!(c, Coefficient::Exact(_)));
    let curve = if exact {
        let c: [Vec<Rational>; 8] = std::array::from_fn(|i| {
            rows[i]
                .iter()
                .map(|c| match c {
                    Coefficient::Exact(r) => r.clone(),
                    Coefficient::Float(_) => unreachable!(),
                })
                .collect()
        });
        Curve::Exact(MotionPolynomial::from_coordinates(&c))
    } else {
        let c: [Vec<f64>; 8] = std::array::from_fn(|i| rows[i].iter().map(Coefficient::to_f64).collect());
        Curve::Float(MotionPolynomial::from_coordinates(&c))
    };
    if curve.degree().is_none() {
        return Err(Error::InvalidInput("curve is identically zero".into()));
    }
    check_curve(&curve)?;
    Ok(curve)
}

/// Builds a pose list and checks every pose; failures name the pose index.
pub fn poses_from_rows(rows: &[[Coefficient; 8]]) -> Result<Poses> {
    let exact = rows.iter().flatten().all(|c| matches!(c, Coefficient::Exact(_)));
    let poses = if exact {
        Poses::Exact(
            rows.iter()
                .map(|r| {
                    DualQuaternion::from_array(std::array::from_fn(|i| match &r[i] {
                        Coefficient::Exact(v) => v.clone(),
                        Coefficient::Float(_) => unreachable!(),
                    }))
                })
                .collect(),
        )
    } else {
        Poses::Float(rows.iter().map(|r| DualQuaternion::from_array(std::array::from_fn(|i| r[i].to_f64()))).collect())
    };
    poses.validate()?;
    Ok(poses)
}

fn check_poses<S: Scalar>(poses: &[DualQuaternion<S>]) -> Result<()> {
    for (i, p) in poses.iter().enumerate() {
        Pose::new(p.clone()).map_err(|e| match e {
            Error::StudyViolation { value } => {
                Error::InvalidInput(format!("pose {i} violates the Study condition (a·b = {value})"))
            }
            e => Error::InvalidInput(format!("pose {i}: {e}")),
        })?;
    }
    Ok(())
}

fn interpolant<S: Scalar>(poses: &[DualQuaternion<S>]) -> Result<(Curve, Vec<Option<f64>>, f64)>
where
    Curve: From<MotionPolynomial<S>>,
{
    let r = interpolate_poses(poses)?;
    let report = verify_interpolation(&r, poses);
    let nodes = r.node_params.iter().map(NodeParam::to_f64).collect();
    Ok((Curve::from(r.curve), nodes, report.max_residual))
}

impl Poses {
    pub fn len(&self) -> usize {
        match self {
            Poses::Exact(p) => p.len(),
            Poses::Float(p) => p.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Poses::Exact(p) => check_poses(p),
            Poses::Float(p) => check_poses(p),
        }
    }

    /// Interpolates exactly where possible; exact input whose interpolant
    /// is irrational is retried in floating point.
    pub fn interpolate(&self) -> Result<Interpolant> {
        let (curve, nodes, max_residual) = match self {
            Poses::Exact(p) => match interpolant(p) {
                Err(Error::IrrationalInterpolant) => {
                    interpolant(&p.iter().map(DualQuaternion::to_f64).collect::<Vec<_>>())?
                }
                r => r?,
            },
            Poses::Float(p) => interpolant(p)?,
        };
        Ok(Interpolant { curve, nodes, max_residual })
    }
}

/// Coordinate rows of a curve for writing: exact coefficients as integers
/// or `"num/den"` strings, float coefficients as numbers.
pub fn curve_rows(curve: &Curve) -> Vec<Vec<Value>> {
    match curve {
        Curve::Exact(c) => c
            .coordinates()
            .iter()
            .map(|p| (0..c.coeffs().len()).map(|k| rational_value(&p.coeff(k))).collect())
            .collect(),
        Curve::Float(c) => {
            c.coordinates().iter().map(|p| (0..c.coeffs().len()).map(|k| Value::from(p.coeff(k))).collect()).collect()
        }
    }
}

fn rational_value(r: &Rational) -> Value {
    if r.is_integer() {
        if let Some(i) = r.numer().to_i64() {
            return Value::from(i);
        }
    }
    Value::String(format!("{}/{}", r.numer(), r.denom()))
}
