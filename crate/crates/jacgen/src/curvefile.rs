//! The line-oriented curve description format:
//!
//! ```text
//! p = 13
//! f = 3,0,0,1,0,1            # coefficients, lowest degree first
//! N = 192
//! N_factors = 2^6,3^1        # optional if N < 2^64
//! ```
//!
//! `#` starts a comment, blank lines are skipped, keys may appear once.
//! Parse errors carry the offending line number.

use num_bigint::BigUint;
use num_traits::Num;
use rand::Rng;
use thiserror::Error;

use crate::jacobian::{CurveError, CurveParams, GroupContext, GroupError};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CurveFileError {
    #[error("line {line}: expected `key = value`, got {text:?}")]
    Malformed { line: usize, text: String },
    #[error("line {line}: unknown key {key:?}")]
    UnknownKey { line: usize, key: String },
    #[error("line {line}: duplicate key {key:?}")]
    DuplicateKey { line: usize, key: String },
    #[error("line {line}: bad integer {text:?}")]
    BadInteger { line: usize, text: String },
    #[error("line {line}: bad factor {text:?}, expected q^e")]
    BadFactor { line: usize, text: String },
    #[error("missing required key {0:?}")]
    MissingKey(&'static str),
}

/// A parsed (but not yet validated) curve description.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CurveFile {
    pub p: BigUint,
    pub f: Vec<BigUint>,
    pub n: BigUint,
    pub n_factors: Option<Vec<(BigUint, u32)>>,
}

fn parse_biguint(text: &str, line: usize) -> Result<BigUint, CurveFileError> {
    BigUint::from_str_radix(text.trim(), 10).map_err(|_| CurveFileError::BadInteger {
        line,
        text: text.trim().to_string(),
    })
}

impl CurveFile {
    pub fn parse(text: &str) -> Result<CurveFile, CurveFileError> {
        let mut p = None;
        let mut f = None;
        let mut n = None;
        let mut n_factors = None;
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let Some((key, value)) = content.split_once('=') else {
                return Err(CurveFileError::Malformed {
                    line,
                    text: content.to_string(),
                });
            };
            let key = key.trim();
            let value = value.trim();
            let dup = |key: &str| CurveFileError::DuplicateKey {
                line,
                key: key.to_string(),
            };
            match key {
                "p" => {
                    if p.replace(parse_biguint(value, line)?).is_some() {
                        return Err(dup(key));
                    }
                }
                "N" => {
                    if n.replace(parse_biguint(value, line)?).is_some() {
                        return Err(dup(key));
                    }
                }
                "f" => {
                    let coeffs = value
                        .split(',')
                        .map(|c| parse_biguint(c, line))
                        .collect::<Result<Vec<_>, _>>()?;
                    if f.replace(coeffs).is_some() {
                        return Err(dup(key));
                    }
                }
                "N_factors" => {
                    let factors = value
                        .split(',')
                        .map(|part| {
                            let (q, e) = part.split_once('^').ok_or(CurveFileError::BadFactor {
                                line,
                                text: part.to_string(),
                            })?;
                            let q = parse_biguint(q, line)?;
                            let e: u32 =
                                e.trim().parse().map_err(|_| CurveFileError::BadFactor {
                                    line,
                                    text: part.to_string(),
                                })?;
                            Ok((q, e))
                        })
                        .collect::<Result<Vec<_>, CurveFileError>>()?;
                    if n_factors.replace(factors).is_some() {
                        return Err(dup(key));
                    }
                }
                other => {
                    return Err(CurveFileError::UnknownKey {
                        line,
                        key: other.to_string(),
                    })
                }
            }
        }
        Ok(CurveFile {
            p: p.ok_or(CurveFileError::MissingKey("p"))?,
            f: f.ok_or(CurveFileError::MissingKey("f"))?,
            n: n.ok_or(CurveFileError::MissingKey("N"))?,
            n_factors,
        })
    }

    pub fn emit(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("p = {}\n", self.p));
        let coeffs: Vec<String> = self.f.iter().map(|c| c.to_string()).collect();
        out.push_str(&format!("f = {}\n", coeffs.join(",")));
        out.push_str(&format!("N = {}\n", self.n));
        if let Some(factors) = &self.n_factors {
            let parts: Vec<String> = factors.iter().map(|(q, e)| format!("{q}^{e}")).collect();
            out.push_str(&format!("N_factors = {}\n", parts.join(",")));
        }
        out
    }

    /// Validates the curve and builds the group context, factoring `N`
    /// when no factorization was supplied.
    pub fn into_context<R: Rng + ?Sized>(self, rng: &mut R) -> Result<GroupContext, ContextError> {
        let curve = CurveParams::new(self.p, &self.f)?;
        let ctx = match self.n_factors {
            Some(factors) => GroupContext::new(curve, self.n, factors, rng)?,
            None => GroupContext::with_computed_factors(curve, self.n, rng)?,
        };
        Ok(ctx)
    }
}

#[derive(Debug, Error)]
pub enum ContextError {
    #[error("invalid curve: {0}")]
    Curve(#[from] CurveError),
    #[error("invalid group data: {0}")]
    Group(#[from] GroupError),
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha12Rng;

    const GOOD: &str = "\
# a tiny test curve
p = 13
f = 3,0,0,1,0,1   # x^5 + x^3 + 3
N = 192
N_factors = 2^6,3^1
";

    #[test]
    fn parses_the_documented_format() {
        let file = CurveFile::parse(GOOD).unwrap();
        assert_eq!(file.p, BigUint::from(13u32));
        assert_eq!(file.f.len(), 6);
        assert_eq!(file.n, BigUint::from(192u32));
        assert_eq!(
            file.n_factors,
            Some(vec![(BigUint::from(2u32), 6), (BigUint::from(3u32), 1)])
        );
        // factors optional
        let file = CurveFile::parse("p = 13\nf = 3,0,0,1,0,1\nN = 192\n").unwrap();
        assert_eq!(file.n_factors, None);
    }

    #[test]
    fn emit_parse_roundtrip() {
        let file = CurveFile::parse(GOOD).unwrap();
        assert_eq!(CurveFile::parse(&file.emit()).unwrap(), file);
    }

    #[test]
    fn errors_carry_line_numbers() {
        let err = CurveFile::parse("p = 13\nzzz\n").unwrap_err();
        assert_eq!(
            err,
            CurveFileError::Malformed {
                line: 2,
                text: "zzz".into()
            }
        );
        let err = CurveFile::parse("p = 13\np = 17\n").unwrap_err();
        assert!(matches!(err, CurveFileError::DuplicateKey { line: 2, .. }));
        let err = CurveFile::parse("p = x\n").unwrap_err();
        assert!(matches!(err, CurveFileError::BadInteger { line: 1, .. }));
        let err = CurveFile::parse("q = 1\n").unwrap_err();
        assert!(matches!(err, CurveFileError::UnknownKey { line: 1, .. }));
        let err = CurveFile::parse("p = 13\nf = 1,1\nN_factors = 6\n").unwrap_err();
        assert!(matches!(err, CurveFileError::BadFactor { line: 3, .. }));
        let err = CurveFile::parse("p = 13\nf = 1,1\n").unwrap_err();
        assert_eq!(err, CurveFileError::MissingKey("N"));
    }

    #[test]
    fn context_construction_validates() {
        let mut rng = ChaCha12Rng::seed_from_u64(7);
        let ctx = CurveFile::parse(GOOD)
            .unwrap()
            .into_context(&mut rng)
            .unwrap();
        assert_eq!(ctx.order(), &BigUint::from(192u32));
        // a wrong N fails the Lagrange spot check
        let bad = CurveFile::parse("p = 13\nf = 3,0,0,1,0,1\nN = 193\n").unwrap();
        assert!(matches!(
            bad.into_context(&mut rng),
            Err(ContextError::Group(_))
        ));
    }
}
