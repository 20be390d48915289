//! Brute-force ground truth for tiny primes (`p <= 64`).
//!
//! The whole Jacobian is enumerated straight from the Mumford condition:
//! a pair `(u, v)` is listed iff `u` is monic of degree at most 2,
//! `deg v < deg u`, and `u | v^2 - f`. No cleverness, so the list is
//! independent of the production arithmetic. Two further anchors keep
//! the oracle honest about itself: the element count must equal the
//! order predicted by the zeta function from point counts over `F_p`
//! and `F_{p^2}`, and the derived group structure must satisfy the
//! genus-2 constraints (rank at most 4, second invariant dividing
//! `p - 1`).
//!
//! All arithmetic in here is plain `u64` modular arithmetic on small
//! coefficient vectors, deliberately disjoint from the `BigUint` stack
//! the production modules use.

use std::collections::{HashMap, HashSet};
use std::fmt::Write as _;

use num_bigint::BigUint;
use thiserror::Error;

use crate::arith::factor_u64;
use crate::jacobian::{CurveParams, MumfordDivisor};
use crate::poly::Poly;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum OracleError {
    #[error("oracle refuses p = {0} (cap is 64): enumeration is O(p^4)")]
    PrimeTooLarge(BigUint),
    #[error("enumerated {enumerated} elements but the zeta count says {zeta}")]
    CountMismatch { enumerated: u64, zeta: u64 },
    #[error("element not in the enumerated group")]
    NotInGroup,
}

/// A divisor in the oracle's own representation: trimmed coefficient
/// vectors, lowest degree first. The identity is `u = [1], v = []`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct OracleDivisor {
    pub u: Vec<u64>,
    pub v: Vec<u64>,
}

impl OracleDivisor {
    fn identity() -> Self {
        OracleDivisor {
            u: vec![1],
            v: vec![],
        }
    }
}

/// The fully enumerated rational Jacobian of a tiny curve.
pub struct EnumeratedGroup {
    p: u64,
    f: Vec<u64>,
    elements: Vec<OracleDivisor>,
    index: HashMap<OracleDivisor, usize>,
}

// -- small mod-p polynomial helpers on u64 vectors ---------------------

fn trim(mut a: Vec<u64>) -> Vec<u64> {
    while a.last() == Some(&0) {
        a.pop();
    }
    a
}

fn pmod(p: u64, x: i128) -> u64 {
    (x.rem_euclid(p as i128)) as u64
}

fn padd(p: u64, a: &[u64], b: &[u64]) -> Vec<u64> {
    let n = a.len().max(b.len());
    trim(
        (0..n)
            .map(|i| (a.get(i).copied().unwrap_or(0) + b.get(i).copied().unwrap_or(0)) % p)
            .collect(),
    )
}

fn psub(p: u64, a: &[u64], b: &[u64]) -> Vec<u64> {
    let n = a.len().max(b.len());
    trim(
        (0..n)
            .map(|i| {
                let x = a.get(i).copied().unwrap_or(0);
                let y = b.get(i).copied().unwrap_or(0);
                (x + p - y) % p
            })
            .collect(),
    )
}

fn pmul(p: u64, a: &[u64], b: &[u64]) -> Vec<u64> {
    if a.is_empty() || b.is_empty() {
        return vec![];
    }
    let mut out = vec![0u64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = (out[i + j] + x * y) % p;
        }
    }
    trim(out)
}

fn pinv(p: u64, a: u64) -> u64 {
    // Fermat; p prime and a nonzero
    let mut result = 1u64;
    let mut base = a % p;
    let mut e = p - 2;
    while e > 0 {
        if e & 1 == 1 {
            result = result * base % p;
        }
        base = base * base % p;
        e >>= 1;
    }
    result
}

fn pdivmod(p: u64, a: &[u64], b: &[u64]) -> (Vec<u64>, Vec<u64>) {
    assert!(!b.is_empty(), "division by zero polynomial");
    if a.len() < b.len() {
        return (vec![], a.to_vec());
    }
    let mut rem = a.to_vec();
    let mut quot = vec![0u64; a.len() - b.len() + 1];
    let lead_inv = pinv(p, *b.last().unwrap());
    for i in (b.len() - 1..a.len()).rev() {
        if rem[i] == 0 {
            continue;
        }
        let factor = rem[i] * lead_inv % p;
        let shift = i + 1 - b.len();
        for (j, &bc) in b.iter().enumerate() {
            rem[shift + j] = pmod(p, rem[shift + j] as i128 - (factor * bc) as i128);
        }
        quot[shift] = factor;
    }
    (trim(quot), trim(rem))
}

fn prem(p: u64, a: &[u64], b: &[u64]) -> Vec<u64> {
    pdivmod(p, a, b).1
}

fn pmonic(p: u64, a: &[u64]) -> Vec<u64> {
    let inv = pinv(p, *a.last().expect("nonzero"));
    a.iter().map(|&c| c * inv % p).collect()
}

/// Monic extended gcd: returns `(g, s, t)` with `g = s a + t b`.
fn pxgcd(p: u64, a: &[u64], b: &[u64]) -> (Vec<u64>, Vec<u64>, Vec<u64>) {
    let mut r0 = a.to_vec();
    let mut r1 = b.to_vec();
    let mut s0 = vec![1u64];
    let mut s1: Vec<u64> = vec![];
    let mut t0: Vec<u64> = vec![];
    let mut t1 = vec![1u64];
    while !r1.is_empty() {
        let (q, r) = pdivmod(p, &r0, &r1);
        let s = psub(p, &s0, &pmul(p, &q, &s1));
        let t = psub(p, &t0, &pmul(p, &q, &t1));
        r0 = r1;
        r1 = r;
        s0 = s1;
        s1 = s;
        t0 = t1;
        t1 = t;
    }
    let inv = pinv(p, *r0.last().expect("gcd of nonzero inputs"));
    let scale = |v: &[u64]| trim(v.iter().map(|&c| c * inv % p).collect());
    (scale(&r0), scale(&s0), scale(&t0))
}

fn peval(p: u64, a: &[u64], x: u64) -> u64 {
    let mut acc = 0u64;
    for &c in a.iter().rev() {
        acc = (acc * x + c) % p;
    }
    acc
}

// -- F_{p^2} as pairs (a, b) = a + b*t with t^2 = s, s a non-residue ----

fn legendre_is_square(p: u64, a: u64) -> bool {
    if a == 0 {
        return true;
    }
    let mut result = 1u64;
    let mut base = a % p;
    let mut e = (p - 1) / 2;
    while e > 0 {
        if e & 1 == 1 {
            result = result * base % p;
        }
        base = base * base % p;
        e >>= 1;
    }
    result == 1
}

struct Fp2 {
    p: u64,
    s: u64,
}

impl Fp2 {
    fn new(p: u64) -> Fp2 {
        let s = (2..p).find(|&a| !legendre_is_square(p, a)).expect("p odd");
        Fp2 { p, s }
    }

    fn mul(&self, a: (u64, u64), b: (u64, u64)) -> (u64, u64) {
        let p = self.p;
        (
            (a.0 * b.0 + a.1 * b.1 % p * self.s) % p,
            (a.0 * b.1 + a.1 * b.0) % p,
        )
    }

    fn add(&self, a: (u64, u64), b: (u64, u64)) -> (u64, u64) {
        ((a.0 + b.0) % self.p, (a.1 + b.1) % self.p)
    }

    fn pow(&self, mut a: (u64, u64), mut e: u64) -> (u64, u64) {
        let mut acc = (1, 0);
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, a);
            }
            a = self.mul(a, a);
            e >>= 1;
        }
        acc
    }

    fn eval_poly(&self, f: &[u64], x: (u64, u64)) -> (u64, u64) {
        let mut acc = (0, 0);
        for &c in f.iter().rev() {
            acc = self.add(self.mul(acc, x), (c % self.p, 0));
        }
        acc
    }

    fn is_square(&self, a: (u64, u64)) -> bool {
        if a == (0, 0) {
            return true;
        }
        let q = self.p * self.p;
        self.pow(a, (q - 1) / 2) == (1, 0)
    }
}

/// `|Jac(C)(F_p)|` from affine point counts over `F_p` and `F_{p^2}`,
/// through the genus-2 zeta relation.
fn zeta_order(p: u64, f: &[u64]) -> u64 {
    // one point at infinity in the degree-5 model
    let mut m1 = 1i128;
    for x in 0..p {
        let fx = peval(p, f, x);
        if fx == 0 {
            m1 += 1;
        } else if legendre_is_square(p, fx) {
            m1 += 2;
        }
    }
    let ext = Fp2::new(p);
    let mut m2 = 1i128;
    for a in 0..p {
        for b in 0..p {
            let fx = ext.eval_poly(f, (a, b));
            if fx == (0, 0) {
                m2 += 1;
            } else if ext.is_square(fx) {
                m2 += 2;
            }
        }
    }
    let p = p as i128;
    let s1 = p + 1 - m1;
    let s2 = p * p + 1 - m2;
    let e2 = (s1 * s1 - s2) / 2;
    let n = p * p + 1 - (p + 1) * s1 + e2;
    u64::try_from(n).expect("positive group order")
}

impl EnumeratedGroup {
    /// Enumerates the full group, checking the count against the zeta
    /// order. `p` must be at most 64.
    pub fn enumerate(curve: &CurveParams) -> Result<EnumeratedGroup, OracleError> {
        let p_big = curve.field().modulus();
        if p_big > &BigUint::from(64u32) {
            return Err(OracleError::PrimeTooLarge(p_big.clone()));
        }
        let p: u64 = p_big.try_into().expect("fits after cap check");
        let f: Vec<u64> = curve
            .f()
            .coeffs()
            .iter()
            .map(|c| c.value().try_into().expect("coefficient below p"))
            .collect();
        let mut elements = vec![OracleDivisor::identity()];
        // weight 1: u = x - a, v = b with b^2 = f(a)
        for a in 0..p {
            let fa = peval(p, &f, a);
            for b in 0..p {
                if b * b % p == fa {
                    elements.push(OracleDivisor {
                        u: vec![(p - a) % p, 1],
                        v: trim(vec![b]),
                    });
                }
            }
        }
        // weight 2: all monic quadratics u, all v of degree <= 1 with u | v^2 - f
        for u0 in 0..p {
            for u1 in 0..p {
                let u = vec![u0, u1, 1];
                let f_mod_u = prem(p, &f, &u);
                for v0 in 0..p {
                    for v1 in 0..p {
                        let v = trim(vec![v0, v1]);
                        let vv = pmul(p, &v, &v);
                        if prem(p, &psub(p, &vv, &f_mod_u), &u).is_empty() {
                            elements.push(OracleDivisor { u: u.clone(), v });
                        }
                    }
                }
            }
        }
        let zeta = zeta_order(p, &f);
        if elements.len() as u64 != zeta {
            return Err(OracleError::CountMismatch {
                enumerated: elements.len() as u64,
                zeta,
            });
        }
        let index = elements
            .iter()
            .cloned()
            .enumerate()
            .map(|(i, d)| (d, i))
            .collect();
        Ok(EnumeratedGroup {
            p,
            f,
            elements,
            index,
        })
    }

    pub fn order(&self) -> u64 {
        self.elements.len() as u64
    }

    pub fn elements(&self) -> &[OracleDivisor] {
        &self.elements
    }

    pub fn identity(&self) -> OracleDivisor {
        OracleDivisor::identity()
    }

    pub fn contains(&self, d: &OracleDivisor) -> bool {
        self.index.contains_key(d)
    }

    /// Cantor addition in the oracle's own arithmetic.
    pub fn add(&self, a: &OracleDivisor, b: &OracleDivisor) -> OracleDivisor {
        let p = self.p;
        let (d0, e1, e2) = pxgcd(p, &a.u, &b.u);
        let v_sum = padd(p, &a.v, &b.v);
        let (d, c1, c2) = if v_sum.is_empty() {
            (pmonic(p, &d0), vec![1u64], vec![])
        } else {
            pxgcd(p, &d0, &v_sum)
        };
        let s1 = pmul(p, &c1, &e1);
        let s2 = pmul(p, &c1, &e2);
        let s3 = c2;
        let (mut u, r) = pdivmod(p, &pmul(p, &a.u, &b.u), &pmul(p, &d, &d));
        assert!(r.is_empty());
        let num = padd(
            p,
            &padd(
                p,
                &pmul(p, &s1, &pmul(p, &a.u, &b.v)),
                &pmul(p, &s2, &pmul(p, &b.u, &a.v)),
            ),
            &pmul(p, &s3, &padd(p, &pmul(p, &a.v, &b.v), &self.f)),
        );
        let (v_pre, r) = pdivmod(p, &num, &d);
        assert!(r.is_empty());
        let mut v = prem(p, &v_pre, &u);
        while u.len() > 3 {
            let vv = pmul(p, &v, &v);
            let (u_next, r) = pdivmod(p, &psub(p, &self.f, &vv), &u);
            assert!(r.is_empty());
            let u_next = pmonic(p, &u_next);
            let neg_v: Vec<u64> = v.iter().map(|&c| (p - c) % p).collect();
            v = prem(p, &trim(neg_v), &u_next);
            u = u_next;
        }
        OracleDivisor {
            u: pmonic(p, &u),
            v,
        }
    }

    pub fn negate(&self, a: &OracleDivisor) -> OracleDivisor {
        let neg_v: Vec<u64> = a.v.iter().map(|&c| (self.p - c) % self.p).collect();
        OracleDivisor {
            u: a.u.clone(),
            v: prem(self.p, &trim(neg_v), &a.u),
        }
    }

    pub fn scalar_mul(&self, n: u64, d: &OracleDivisor) -> OracleDivisor {
        let mut acc = OracleDivisor::identity();
        let mut base = d.clone();
        let mut n = n;
        while n > 0 {
            if n & 1 == 1 {
                acc = self.add(&acc, &base);
            }
            n >>= 1;
            if n > 0 {
                base = self.add(&base, &base);
            }
        }
        acc
    }

    /// Exact order by walking multiples; fine at these group sizes.
    pub fn element_order(&self, d: &OracleDivisor) -> u64 {
        let mut acc = d.clone();
        let mut n = 1u64;
        while acc != OracleDivisor::identity() {
            acc = self.add(&acc, d);
            n += 1;
        }
        n
    }

    /// Size of the subgroup generated by the given elements, by
    /// breadth-first closure.
    pub fn subgroup_span(&self, gens: &[OracleDivisor]) -> Result<u64, OracleError> {
        for g in gens {
            if !self.contains(g) {
                return Err(OracleError::NotInGroup);
            }
        }
        let mut seen = HashSet::new();
        let mut queue = vec![OracleDivisor::identity()];
        seen.insert(OracleDivisor::identity());
        while let Some(x) = queue.pop() {
            for g in gens {
                let y = self.add(&x, g);
                if seen.insert(y.clone()) {
                    queue.push(y);
                }
            }
        }
        Ok(seen.len() as u64)
    }

    /// All elements killed by `m`.
    pub fn torsion_subgroup(&self, m: u64) -> Vec<OracleDivisor> {
        self.elements
            .iter()
            .filter(|d| self.scalar_mul(m, d) == OracleDivisor::identity())
            .cloned()
            .collect()
    }

    /// The invariant factors `(n1, n2, n3, n4)` with `n_i | n_{i+1}`,
    /// reconstructed per prime from the kernel sizes `|G[l^j]|`: the
    /// number of cyclic factors with `l`-exponent at least `j` is
    /// `log_l |G[l^j]| - log_l |G[l^(j-1)]|`.
    pub fn group_structure(&self) -> [u64; 4] {
        let n = self.order();
        // exponents[k] = l-exponent of the k-th largest invariant factor
        let mut factors: Vec<Vec<u32>> = Vec::new();
        let mut primes: Vec<u64> = Vec::new();
        for (ell, e_max) in factor_u64(n) {
            let mut log_kernel = vec![0u32; e_max as usize + 1];
            for j in 1..=e_max {
                let power = ell.pow(j);
                let count = self
                    .elements
                    .iter()
                    .filter(|d| self.scalar_mul(power, d) == OracleDivisor::identity())
                    .count() as u64;
                let mut logv = 0u32;
                let mut c = count;
                while c > 1 {
                    assert_eq!(c % ell, 0, "kernel size must be a power of {ell}");
                    c /= ell;
                    logv += 1;
                }
                log_kernel[j as usize] = logv;
            }
            // multiset of exponents, largest first
            let mut exps: Vec<u32> = Vec::new();
            for j in 1..=e_max as usize {
                let with_at_least_j = log_kernel[j] - log_kernel[j - 1];
                while exps.len() < with_at_least_j as usize {
                    exps.push(0);
                }
                for e in exps.iter_mut().take(with_at_least_j as usize) {
                    *e = j as u32;
                }
            }
            exps.sort_unstable_by(|a, b| b.cmp(a));
            assert!(exps.len() <= 4, "genus-2 Jacobians have rank at most 4");
            primes.push(ell);
            factors.push(exps);
        }
        let mut invariants = [1u64; 4];
        for (ell, exps) in primes.iter().zip(&factors) {
            for (k, &e) in exps.iter().enumerate() {
                // largest invariant factor collects the largest exponents
                invariants[3 - k] *= ell.pow(e);
            }
        }
        invariants
    }

    /// Emits the curve description file for this group, with the
    /// enumeration-verified order and its factorization.
    pub fn curve_file(&self) -> String {
        let mut out = String::new();
        writeln!(out, "p = {}", self.p).unwrap();
        let coeffs: Vec<String> = self.f.iter().map(|c| c.to_string()).collect();
        writeln!(out, "f = {}", coeffs.join(",")).unwrap();
        writeln!(out, "N = {}", self.order()).unwrap();
        let factors: Vec<String> = factor_u64(self.order())
            .iter()
            .map(|(q, e)| format!("{q}^{e}"))
            .collect();
        writeln!(out, "N_factors = {}", factors.join(",")).unwrap();
        out
    }

    /// Converts a production divisor into the oracle representation.
    pub fn from_mumford(&self, d: &MumfordDivisor) -> OracleDivisor {
        let to_u64 = |poly: &Poly| -> Vec<u64> {
            poly.coeffs()
                .iter()
                .map(|c| c.value().try_into().expect("small coefficient"))
                .collect()
        };
        OracleDivisor {
            u: to_u64(d.u()),
            v: to_u64(d.v()),
        }
    }

    /// Converts an oracle divisor into the production representation.
    pub fn to_mumford(&self, curve: &CurveParams, d: &OracleDivisor) -> MumfordDivisor {
        let field = curve.field();
        MumfordDivisor::new(
            Poly::from_u64_coeffs(field, &d.u),
            Poly::from_u64_coeffs(field, &d.v),
        )
    }
}
