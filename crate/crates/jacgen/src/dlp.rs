//! Discrete logarithms in smooth-order cyclic subgroups of `F_p^x`.
//!
//! Pohlig-Hellman decomposition: CRT over the prime powers dividing the
//! subgroup order, digit-by-digit lifting within each prime power, and
//! baby-step giant-step (plain scan for tiny primes) at each digit.

use std::collections::HashMap;

use num_bigint::BigUint;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::arith::mod_inverse;
use crate::field::FieldElement;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum DlpError {
    #[error("target is not in the subgroup generated by the base")]
    NotInSubgroup,
    #[error("base does not have the stated order")]
    WrongBaseOrder,
}

/// A discrete-log problem `base^alpha = target` in the order-`lambda`
/// subgroup of `F_p^x`, with the factorization of `lambda`.
#[derive(Debug, Clone)]
pub struct DlogInstance {
    pub base: FieldElement,
    pub target: FieldElement,
    pub lambda: BigUint,
    pub lambda_factors: Vec<(BigUint, u32)>,
}

impl DlogInstance {
    pub fn new(
        base: FieldElement,
        target: FieldElement,
        lambda_factors: Vec<(BigUint, u32)>,
    ) -> DlogInstance {
        let lambda = lambda_factors.iter().map(|(q, e)| q.pow(*e)).product();
        DlogInstance {
            base,
            target,
            lambda,
            lambda_factors,
        }
    }
}

/// Below this prime size a linear scan beats the table overhead.
const BSGS_THRESHOLD: u64 = 64;

/// Solves `base^x = target` where `base` has prime order `q`, or `None`
/// if no such `x` exists. Scan for small `q`, baby-step giant-step with
/// a `ceil(sqrt(q))` table otherwise.
fn prime_order_dlog(base: &FieldElement, target: &FieldElement, q: &BigUint) -> Option<BigUint> {
    if target.is_one() {
        return Some(BigUint::zero());
    }
    if q < &BigUint::from(BSGS_THRESHOLD) {
        let mut acc = base.clone();
        let mut x = BigUint::one();
        while &x < q {
            if &acc == target {
                return Some(x);
            }
            acc = &acc * base;
            x += 1u32;
        }
        return None;
    }
    let m = q.sqrt() + 1u32;
    let m_u64: u64 = (&m).try_into().expect("sqrt of a reasonable digit prime");
    let mut table: HashMap<BigUint, u64> = HashMap::with_capacity(m_u64 as usize);
    let mut acc = base.field().one();
    for j in 0..m_u64 {
        table.entry(acc.value().clone()).or_insert(j);
        acc = &acc * base;
    }
    // giant step: base^(-m)
    let stride = base.pow(&m).inverse().expect("group element is invertible");
    let mut gamma = target.clone();
    let mut i = BigUint::zero();
    while &i <= q {
        if let Some(&j) = table.get(gamma.value()) {
            let x = (&i * &m + j) % q;
            return Some(x);
        }
        gamma = &gamma * &stride;
        i += 1u32;
    }
    None
}

/// Pohlig-Hellman: `alpha` in `[0, lambda)` with `base^alpha = target`.
pub fn pohlig_hellman(inst: &DlogInstance) -> Result<BigUint, DlpError> {
    let DlogInstance {
        base,
        target,
        lambda,
        lambda_factors,
    } = inst;
    if !base.pow(lambda).is_one() {
        return Err(DlpError::WrongBaseOrder);
    }
    if !target.pow(lambda).is_one() {
        return Err(DlpError::NotInSubgroup);
    }
    let mut residues: Vec<(BigUint, BigUint)> = Vec::new();
    for (q, e) in lambda_factors {
        let qe = q.pow(*e);
        let cofactor = lambda / &qe;
        let base_q = base.pow(&cofactor);
        let target_q = target.pow(&cofactor);
        // digit lifting: x = x0 + x1 q + ... + x_{e-1} q^{e-1} mod q^e
        let digit_base = base_q.pow(&(q.pow(e - 1))); // order q
        let mut x = BigUint::zero();
        let mut q_pow = BigUint::one();
        for k in 0..*e {
            // peel: (target_q / base_q^x)^(q^(e-1-k)) = digit_base^(x_k)
            let shifted = &target_q * &base_q.pow(&(&qe - &x)).clone();
            let probe = shifted.pow(&q.pow(e - 1 - k));
            let digit = prime_order_dlog(&digit_base, &probe, q).ok_or(DlpError::NotInSubgroup)?;
            x += &digit * &q_pow;
            q_pow *= q;
        }
        residues.push((x, qe));
    }
    // CRT over coprime prime powers
    let mut alpha = BigUint::zero();
    let mut modulus = BigUint::one();
    for (x, qe) in residues {
        if modulus.is_one() {
            alpha = x;
            modulus = qe;
            continue;
        }
        let inv = mod_inverse(&(&modulus % &qe), &qe).expect("coprime moduli");
        let diff = (&x + &qe - (&alpha % &qe)) % &qe;
        alpha += &modulus * ((diff * inv) % &qe);
        modulus *= qe;
    }
    // final check covers targets inside the right cosets of strict subgroups
    if base.pow(&alpha) != *target {
        return Err(DlpError::NotInSubgroup);
    }
    Ok(alpha)
}
