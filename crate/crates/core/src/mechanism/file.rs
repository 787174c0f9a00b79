//! `.rlmech` persistence: versioned UTF-8 JSON.

use std::path::Path;

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use super::{ConnectionPoints, Curve, RationalMechanism};
use crate::motionpoly::{FactorizationSetup, LinearFactor, MotionFactorization, MotionPolynomial};
use crate::quatcore::{DualQuaternion, Rational};
use crate::{Error, Result};

pub const FORMAT_VERSION: u64 = 1;

#[derive(Serialize, Deserialize)]
struct MechanismFile {
    version: Value,
    curve: Vec<Vec<Value>>,
    branch_a: Vec<[f64; 8]>,
    branch_b: Vec<[f64; 8]>,
    connection_points: Vec<CpEntry>,
    scale: f64,
    #[serde(default)]
    metadata: Map<String, Value>,
}

#[derive(Serialize, Deserialize)]
struct CpEntry {
    joint: usize,
    cp0: f64,
    cp1: f64,
}

/// Integers that fit into `i64` are JSON numbers, larger ones digit strings.
fn int_value(v: &BigInt) -> Value {
    match v.to_i64() {
        Some(i) => Value::from(i),
        None => Value::String(v.to_string()),
    }
}

fn parse_int(v: &Value) -> Result<BigInt> {
    match v {
        Value::Number(n) => {
            n.as_i64().map(BigInt::from).ok_or_else(|| Error::ParseError(format!("{n} is not an integer")))
        }
        Value::String(s) => s.parse().map_err(|_| Error::ParseError(format!("{s:?} is not an integer"))),
        _ => Err(Error::ParseError(format!("expected integer, got {v}"))),
    }
}

/// Decimal text with 17 significant digits; parses back to the same `f64`.
pub fn format_f64(v: f64) -> String {
    format!("{v:.16e}")
}

/// Exact coefficients as `[num, den]`, float coefficients as decimal strings.
pub fn curve_to_json(curve: &Curve) -> Vec<Vec<Value>> {
    match curve {
        Curve::Exact(c) => c
            .coordinates()
            .iter()
            .map(|p| {
                (0..c.coeffs().len())
                    .map(|k| {
                        let r = p.coeff(k);
                        Value::Array(vec![int_value(r.numer()), int_value(r.denom())])
                    })
                    .collect()
            })
            .collect(),
        Curve::Float(c) => c
            .coordinates()
            .iter()
            .map(|p| (0..c.coeffs().len()).map(|k| Value::String(format_f64(p.coeff(k)))).collect())
            .collect(),
    }
}

/// Inverse of [`curve_to_json`]. The curve is exact iff every entry is a pair.
pub fn curve_from_json(coords: &[Vec<Value>]) -> Result<Curve> {
    if coords.len() != 8 {
        return Err(Error::ParseError(format!("curve needs 8 coordinate arrays, got {}", coords.len())));
    }
    let exact = coords.iter().flatten().all(Value::is_array);
    if exact {
        let c: Vec<Vec<Rational>> = coords
            .iter()
            .map(|row| {
                row.iter()
                    .map(|v| {
                        let pair = v
                            .as_array()
                            .filter(|a| a.len() == 2)
                            .ok_or_else(|| Error::ParseError(format!("expected [num, den], got {v}")))?;
                        let den = parse_int(&pair[1])?;
                        if den == BigInt::from(0) {
                            return Err(Error::ParseError("zero denominator".into()));
                        }
                        Ok(Rational::new(parse_int(&pair[0])?, den))
                    })
                    .collect()
            })
            .collect::<Result<_>>()?;
        let arr: [Vec<Rational>; 8] = c.try_into().expect("length checked");
        return Ok(Curve::Exact(MotionPolynomial::from_coordinates(&arr)));
    }
    let c: Vec<Vec<f64>> = coords.iter().map(|row| row.iter().map(parse_f64).collect()).collect::<Result<_>>()?;
    let arr: [Vec<f64>; 8] = c.try_into().expect("length checked");
    Ok(Curve::Float(MotionPolynomial::from_coordinates(&arr)))
}

fn parse_f64(v: &Value) -> Result<f64> {
    let x = match v {
        Value::String(s) => s.trim().parse::<f64>().map_err(|_| Error::ParseError(format!("bad number {s:?}")))?,
        Value::Number(n) => n.as_f64().ok_or_else(|| Error::ParseError(format!("bad number {n}")))?,
        _ => return Err(Error::ParseError(format!("expected number, got {v}"))),
    };
    if !x.is_finite() {
        return Err(Error::ParseError(format!("non-finite number {v}")));
    }
    Ok(x)
}

fn check_version(v: &Value) -> Result<()> {
    let ok = match v {
        Value::Number(n) => n.as_u64() == Some(FORMAT_VERSION),
        Value::String(s) => s.trim() == FORMAT_VERSION.to_string(),
        _ => false,
    };
    if ok {
        Ok(())
    } else {
        Err(Error::FormatVersionMismatch { found: v.to_string() })
    }
}

/// Checks that the curve lies on the Study quadric.
pub(crate) fn check_curve(curve: &Curve) -> Result<()> {
    let r = match curve {
        Curve::Exact(c) => c.norm_polynomial().map(|_| ()),
        Curve::Float(c) => c.norm_polynomial().map(|_| ()),
    };
    r.map_err(|e| match e {
        Error::NotAMotionPolynomial { residual } => Error::StudyViolation { value: residual },
        e => e,
    })
}

impl RationalMechanism {
    pub fn to_json(&self) -> String {
        let hs = |f: &MotionFactorization| f.factors.iter().map(|f| f.h.to_array()).collect();
        let file = MechanismFile {
            version: Value::from(FORMAT_VERSION),
            curve: curve_to_json(&self.curve),
            branch_a: hs(&self.branch_a),
            branch_b: hs(&self.branch_b),
            connection_points: self
                .connection_points
                .iter()
                .enumerate()
                .map(|(joint, c)| CpEntry { joint, cp0: c.cp0, cp1: c.cp1 })
                .collect(),
            scale: self.scale,
            metadata: self.metadata.clone(),
        };
        let mut s = serde_json::to_string_pretty(&file).expect("mechanism serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let raw: Value = serde_json::from_str(text).map_err(|e| Error::ParseError(e.to_string()))?;
        check_version(raw.get("version").unwrap_or(&Value::Null))?;
        let file: MechanismFile = serde_json::from_value(raw).map_err(|e| Error::ParseError(e.to_string()))?;
        let curve = curve_from_json(&file.curve)?;
        check_curve(&curve)?;
        let setup = match &curve {
            Curve::Exact(c) => FactorizationSetup::new(c)?,
            Curve::Float(c) => FactorizationSetup::new(c)?,
        };
        let branch = |hs: &[[f64; 8]]| -> Result<MotionFactorization> {
            let factors =
                hs.iter().map(|h| LinearFactor::new(DualQuaternion::from_array(*h))).collect::<Result<Vec<_>>>()?;
            Ok(MotionFactorization { factors, real_cofactor: setup.cofactor.clone(), leading: setup.leading.clone() })
        };
        let a = branch(&file.branch_a)?;
        let b = branch(&file.branch_b)?;
        let m = Self::assemble(curve, &[a, b])?;
        if !(file.scale > 0.0 && file.scale.is_finite()) {
            return Err(Error::ParseError(format!("scale must be positive, got {}", file.scale)));
        }
        let mut cps = vec![None; m.joint_count()];
        for e in &file.connection_points {
            let slot = cps
                .get_mut(e.joint)
                .ok_or_else(|| Error::ParseError(format!("connection point for unknown joint {}", e.joint)))?;
            *slot = Some(ConnectionPoints { cp0: e.cp0, cp1: e.cp1 });
        }
        let cps = cps
            .into_iter()
            .enumerate()
            .map(|(j, c)| c.ok_or_else(|| Error::ParseError(format!("missing connection points for joint {j}"))))
            .collect::<Result<Vec<_>>>()?;
        let m = Self { scale: file.scale, metadata: file.metadata, ..m };
        m.with_connection_points(cps)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        std::fs::write(path, self.to_json())
            .map_err(|e| Error::InvalidInput(format!("cannot write {}: {e}", path.display())))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::InvalidInput(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }
}
