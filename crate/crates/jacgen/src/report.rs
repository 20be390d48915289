//! The JSON run report: what `generators` emits and `verify` consumes.
//!
//! All big integers are decimal strings. Field order is fixed by the
//! struct definitions, and the operation tallies are deterministic
//! counts rather than wall-clock times, so a rerun with the same input
//! and seed produces byte-identical output.

use num_bigint::BigUint;
use num_traits::Num;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::curvefile::CurveFile;
use crate::field::Field;
use crate::jacobian::{GroupContext, ModelTransform, MumfordDivisor, OpCounts};
use crate::poly::Poly;
use crate::structure::{StructureResult, SylowCertificate};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ReportError {
    #[error("bad integer {0:?} in report")]
    BadInteger(String),
    #[error("report JSON: {0}")]
    Json(String),
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct CurveEcho {
    pub p: String,
    /// Input polynomial, lowest degree first.
    pub f: Vec<String>,
    /// How the input was normalized: "monic_quintic", "scaled" or
    /// "inverted_at_root".
    pub model: String,
    pub n: String,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct GeneratorEntry {
    /// Mumford `u`, lowest degree first; `["1"]` for the identity.
    pub u: Vec<String>,
    /// Mumford `v`, lowest degree first; empty for `v = 0`.
    pub v: Vec<String>,
    pub order: String,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct CertificateEntry {
    pub ell: String,
    pub lambda: String,
    pub zeta: Option<String>,
    pub live: Vec<usize>,
    /// Pairing exponents over the live block, `null` elsewhere.
    pub matrix: Vec<Vec<Option<String>>>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct CertificateReport {
    /// "certified" when every per-prime pattern held, "trivial" for m = 1.
    pub status: String,
    pub per_prime: Vec<CertificateEntry>,
}

/// Operation tallies per primitive class.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct Timings {
    pub orders: u64,
    pub scalar_muls: u64,
    pub pairings: u64,
    pub dlogs: u64,
}

impl From<OpCounts> for Timings {
    fn from(c: OpCounts) -> Timings {
        Timings {
            orders: c.orders,
            scalar_muls: c.scalar_muls,
            pairings: c.pairings,
            dlogs: c.dlogs,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct RunReport {
    pub curve: CurveEcho,
    pub m: String,
    pub generators: Vec<GeneratorEntry>,
    pub certificate: CertificateReport,
    pub seed: u64,
    pub timings: Timings,
}

fn poly_strings(poly: &Poly) -> Vec<String> {
    poly.coeffs().iter().map(|c| c.to_string()).collect()
}

pub fn divisor_entry(d: &MumfordDivisor, order: &BigUint) -> GeneratorEntry {
    GeneratorEntry {
        u: poly_strings(d.u()),
        v: poly_strings(d.v()),
        order: order.to_string(),
    }
}

pub fn certificate_entry(cert: &SylowCertificate) -> CertificateEntry {
    CertificateEntry {
        ell: cert.ell.to_string(),
        lambda: cert.lambda.to_string(),
        zeta: cert.zeta.as_ref().map(|z| z.to_string()),
        live: cert.live.clone(),
        matrix: cert
            .matrix
            .iter()
            .map(|row| {
                row.iter()
                    .map(|cell| cell.as_ref().map(|a| a.to_string()))
                    .collect()
            })
            .collect(),
    }
}

impl RunReport {
    pub fn from_result(
        file: &CurveFile,
        ctx: &GroupContext,
        m: &BigUint,
        result: &StructureResult,
        seed: u64,
    ) -> RunReport {
        let model = match ctx.curve().transform() {
            ModelTransform::Identity => "monic_quintic",
            ModelTransform::Scaled { .. } => "scaled",
            ModelTransform::InvertedAtRoot { .. } => "inverted_at_root",
        };
        RunReport {
            curve: CurveEcho {
                p: file.p.to_string(),
                f: file.f.iter().map(|c| c.to_string()).collect(),
                model: model.to_string(),
                n: ctx.order().to_string(),
            },
            m: m.to_string(),
            generators: result
                .generators
                .iter()
                .zip(result.orders.iter())
                .map(|(g, o)| divisor_entry(g, o))
                .collect(),
            certificate: CertificateReport {
                status: if result.certificates.is_empty() {
                    "trivial".to_string()
                } else {
                    "certified".to_string()
                },
                per_prime: result.certificates.iter().map(certificate_entry).collect(),
            },
            seed,
            timings: ctx.counters().snapshot().into(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn parse(text: &str) -> Result<RunReport, ReportError> {
        serde_json::from_str(text).map_err(|e| ReportError::Json(e.to_string()))
    }

    pub fn parse_biguint(text: &str) -> Result<BigUint, ReportError> {
        BigUint::from_str_radix(text, 10).map_err(|_| ReportError::BadInteger(text.to_string()))
    }

    /// Rebuilds the generator divisors over the given field.
    pub fn generator_divisors(&self, field: &Field) -> Result<Vec<MumfordDivisor>, ReportError> {
        self.generators
            .iter()
            .map(|entry| {
                let parse_poly = |coeffs: &[String]| -> Result<Poly, ReportError> {
                    let values = coeffs
                        .iter()
                        .map(|c| Self::parse_biguint(c))
                        .collect::<Result<Vec<_>, _>>()?;
                    Ok(Poly::from_biguint_coeffs(field, &values))
                };
                Ok(MumfordDivisor::new(
                    parse_poly(&entry.u)?,
                    parse_poly(&entry.v)?,
                ))
            })
            .collect()
    }
}
