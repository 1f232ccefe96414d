//! JSON interchange: kernel documents, field documents and knot lists.
//!
//! Exact values are written as `"p/q"` strings (`"p"` when the denominator is
//! one); floating values as shortest round-trip JSON numbers. A document never
//! mixes the two; its `field` tag says which one it holds.

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::divdiff::KnotSequence;
use crate::error::{Error, Result};
use crate::filter::PiecewiseField;
use crate::kernel::SiacKernel;
use crate::numeric::{Rational, Scalar};

pub const LEGENDRE_BASIS: &str = "legendre-modal-[-1,1]";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FieldTag {
    Exact,
    Float,
}

/// A kernel on either scalar field.
#[derive(Debug, Clone, PartialEq)]
pub enum AnyKernel {
    Exact(SiacKernel<Rational>),
    Float(SiacKernel<f64>),
}

impl AnyKernel {
    pub fn degree(&self) -> usize {
        match self {
            AnyKernel::Exact(k) => k.degree(),
            AnyKernel::Float(k) => k.degree(),
        }
    }

    pub fn to_f64(&self) -> SiacKernel<f64> {
        match self {
            AnyKernel::Exact(k) => k.to_f64(),
            AnyKernel::Float(k) => k.clone(),
        }
    }

    pub fn field(&self) -> FieldTag {
        match self {
            AnyKernel::Exact(_) => FieldTag::Exact,
            AnyKernel::Float(_) => FieldTag::Float,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KernelDocument {
    pub degree: usize,
    pub knots: Vec<Value>,
    pub raw_coefficients: Vec<Value>,
    pub normalized_coefficients: Vec<Value>,
    pub field: FieldTag,
    pub provenance: String,
}

fn exact_values(values: &[Rational]) -> Vec<Value> {
    values
        .iter()
        .map(|v| Value::String(v.to_string()))
        .collect()
}

fn float_values(values: &[f64]) -> Result<Vec<Value>> {
    values
        .iter()
        .map(|&v| {
            serde_json::Number::from_f64(v)
                .map(Value::Number)
                .ok_or_else(|| Error::Document(format!("non-finite value {v}")))
        })
        .collect()
}

fn parse_exact(values: &[Value], what: &str) -> Result<Vec<Rational>> {
    values
        .iter()
        .map(|v| match v {
            Value::String(s) => Ok(s.parse()?),
            other => Err(Error::Document(format!(
                "{what}: exact documents store \"p/q\" strings, found {other}"
            ))),
        })
        .collect()
}

fn parse_float(values: &[Value], what: &str) -> Result<Vec<f64>> {
    values
        .iter()
        .map(|v| match v {
            Value::Number(n) => n
                .as_f64()
                .ok_or_else(|| Error::Document(format!("{what}: number {n} is not representable"))),
            other => Err(Error::Document(format!(
                "{what}: float documents store numbers, found {other}"
            ))),
        })
        .collect()
}

impl KernelDocument {
    pub fn from_kernel(kernel: &AnyKernel, provenance: &str) -> Result<Self> {
        let (knots, raw, normalized) = match kernel {
            AnyKernel::Exact(k) => (
                exact_values(k.knots().as_slice()),
                exact_values(k.raw_coefficients()),
                exact_values(k.normalized_coefficients()),
            ),
            AnyKernel::Float(k) => (
                float_values(k.knots().as_slice())?,
                float_values(k.raw_coefficients())?,
                float_values(k.normalized_coefficients())?,
            ),
        };
        Ok(KernelDocument {
            degree: kernel.degree(),
            knots,
            raw_coefficients: raw,
            normalized_coefficients: normalized,
            field: kernel.field(),
            provenance: provenance.to_string(),
        })
    }

    /// Rebuilds the kernel from the stored values, without re-solving.
    pub fn to_kernel(&self) -> Result<AnyKernel> {
        Ok(match self.field {
            FieldTag::Exact => AnyKernel::Exact(SiacKernel::from_parts(
                self.degree,
                KnotSequence::new(parse_exact(&self.knots, "knots")?)?,
                parse_exact(&self.raw_coefficients, "raw_coefficients")?,
                parse_exact(&self.normalized_coefficients, "normalized_coefficients")?,
            )?),
            FieldTag::Float => AnyKernel::Float(SiacKernel::from_parts(
                self.degree,
                KnotSequence::new(parse_float(&self.knots, "knots")?)?,
                parse_float(&self.raw_coefficients, "raw_coefficients")?,
                parse_float(&self.normalized_coefficients, "normalized_coefficients")?,
            )?),
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("kernel documents always serialize")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Document(e.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FieldDocument {
    pub breakpoints: Vec<f64>,
    pub cells: Vec<Vec<f64>>,
    #[serde(default = "default_basis")]
    pub basis: String,
}

fn default_basis() -> String {
    LEGENDRE_BASIS.to_string()
}

impl FieldDocument {
    pub fn from_field(field: &PiecewiseField) -> Self {
        FieldDocument {
            breakpoints: field.breakpoints().to_vec(),
            cells: field.cells().to_vec(),
            basis: default_basis(),
        }
    }

    pub fn to_field(&self) -> Result<PiecewiseField> {
        if self.basis != LEGENDRE_BASIS {
            return Err(Error::Document(format!(
                "unsupported basis {:?}, expected {LEGENDRE_BASIS:?}",
                self.basis
            )));
        }
        PiecewiseField::new(self.breakpoints.clone(), self.cells.clone())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("field documents always serialize")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Document(e.to_string()))
    }
}

/// Parses a JSON array of knots. Entries may be numbers or `"p/q"` strings;
/// numbers are read from their decimal text, so `0.1` becomes exactly `1/10`.
pub fn parse_knot_list(text: &str) -> Result<Vec<Rational>> {
    let value: Value = serde_json::from_str(text).map_err(|e| Error::Document(e.to_string()))?;
    let Value::Array(items) = value else {
        return Err(Error::Document("knot file must hold a JSON array".into()));
    };
    items
        .iter()
        .map(|v| match v {
            Value::Number(n) => Ok(n.to_string().parse()?),
            Value::String(s) => Ok(s.parse()?),
            other => Err(Error::Document(format!(
                "knot entry {other} is neither a number nor a string"
            ))),
        })
        .collect()
}

/// Serializes knots for a knot file in the requested field.
pub fn knot_list_json(knots: &KnotSequence<Rational>, field: FieldTag) -> Result<String> {
    let values = match field {
        FieldTag::Exact => exact_values(knots.as_slice()),
        FieldTag::Float => float_values(
            &knots
                .as_slice()
                .iter()
                .map(Scalar::to_f64)
                .collect::<Vec<_>>(),
        )?,
    };
    Ok(serde_json::to_string(&values).expect("values serialize"))
}
