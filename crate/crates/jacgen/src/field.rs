//! Arithmetic in the prime field `F_p` and its multiplicative group.
//!
//! Elements carry a shared handle to their modulus, kept as canonical
//! residues in `[0, p)`. The modulus is an odd prime `p > 2`; mixing
//! elements of different fields is a usage bug and panics.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_bigint::BigUint;
use num_traits::{One, Zero};
use rand::Rng;
use thiserror::Error;

use crate::arith::{is_probable_prime, random_below, valuation};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum FieldError {
    #[error("modulus {0} is not an odd prime > 2")]
    NotOddPrime(BigUint),
    #[error("division by zero in F_p")]
    DivisionByZero,
    #[error("{0} does not divide p - 1")]
    NotASubgroupOrder(BigUint),
    #[error("element order precondition failed: a^multiple != 1")]
    OrderPrecondition,
}

/// Shared description of a prime field, cheap to clone.
#[derive(Clone)]
pub struct Field {
    p: Arc<BigUint>,
}

impl PartialEq for Field {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.p, &other.p) || self.p == other.p
    }
}

impl Eq for Field {}

impl fmt::Debug for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "F_{}", self.p)
    }
}

impl Field {
    /// Builds the field `F_p`. Fails unless `p` is an odd probable prime.
    pub fn new(p: BigUint) -> Result<Self, FieldError> {
        if p <= BigUint::from(2u32) || !is_probable_prime(&p) {
            return Err(FieldError::NotOddPrime(p));
        }
        Ok(Field { p: Arc::new(p) })
    }

    pub fn modulus(&self) -> &BigUint {
        &self.p
    }

    /// Canonical element from any integer (reduces mod p).
    pub fn element(&self, value: BigUint) -> FieldElement {
        FieldElement {
            value: value % &*self.p,
            field: self.clone(),
        }
    }

    pub fn from_u64(&self, value: u64) -> FieldElement {
        self.element(BigUint::from(value))
    }

    pub fn zero(&self) -> FieldElement {
        self.element(BigUint::zero())
    }

    pub fn one(&self) -> FieldElement {
        self.element(BigUint::one())
    }

    /// Uniform random element of `F_p`.
    pub fn random_element<R: Rng + ?Sized>(&self, rng: &mut R) -> FieldElement {
        self.element(random_below(rng, &self.p))
    }

    /// Uniform random element of `F_p^×`.
    pub fn random_nonzero<R: Rng + ?Sized>(&self, rng: &mut R) -> FieldElement {
        loop {
            let x = self.random_element(rng);
            if !x.is_zero() {
                return x;
            }
        }
    }

    /// A `zeta` of multiplicative order exactly `lambda`, where `lambda | p-1`
    /// and `lambda_factors` gives its prime factorization. Samples
    /// `x^((p-1)/lambda)` until the order is exact; expected two draws.
    pub fn primitive_root_of_unity<R: Rng + ?Sized>(
        &self,
        lambda: &BigUint,
        lambda_factors: &[(BigUint, u32)],
        rng: &mut R,
    ) -> Result<FieldElement, FieldError> {
        let p_minus_1 = &*self.p - 1u32;
        if lambda.is_zero() || !(&p_minus_1 % lambda).is_zero() {
            return Err(FieldError::NotASubgroupOrder(lambda.clone()));
        }
        if lambda.is_one() {
            return Ok(self.one());
        }
        let cofactor = &p_minus_1 / lambda;
        for _ in 0..256 {
            let x = self.random_nonzero(rng);
            let zeta = x.pow(&cofactor);
            if zeta.is_one() {
                continue;
            }
            let exact = lambda_factors
                .iter()
                .all(|(q, _)| !zeta.pow(&(lambda / q)).is_one());
            if exact {
                return Ok(zeta);
            }
        }
        unreachable!("a fraction >= 1/2 of F_p^x maps onto generators of mu_lambda")
    }
}

/// A residue in `[0, p)` tied to its field.
#[derive(Clone, PartialEq, Eq)]
pub struct FieldElement {
    value: BigUint,
    field: Field,
}

impl fmt::Debug for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

impl std::hash::Hash for FieldElement {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.value.hash(state);
    }
}

impl FieldElement {
    pub fn value(&self) -> &BigUint {
        &self.value
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn is_zero(&self) -> bool {
        self.value.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.value.is_one()
    }

    fn check_same_field(&self, other: &FieldElement) {
        assert!(
            self.field == other.field,
            "mixed moduli: {:?} vs {:?}",
            self.field,
            other.field
        );
    }

    /// `self^e` by square-and-multiply.
    pub fn pow(&self, e: &BigUint) -> FieldElement {
        self.field
            .element(self.value.modpow(e, self.field.modulus()))
    }

    pub fn pow_u64(&self, e: u64) -> FieldElement {
        self.pow(&BigUint::from(e))
    }

    /// Multiplicative inverse; errors on zero.
    pub fn inverse(&self) -> Result<FieldElement, FieldError> {
        if self.is_zero() {
            return Err(FieldError::DivisionByZero);
        }
        let inv = crate::arith::mod_inverse(&self.value, self.field.modulus())
            .expect("nonzero residue mod prime is invertible");
        Ok(self.field.element(inv))
    }

    /// Exact multiplicative order, given a `multiple` of it (as its
    /// factorization). Errors if `self^multiple != 1`.
    pub fn multiplicative_order(
        &self,
        multiple_factors: &[(BigUint, u32)],
    ) -> Result<BigUint, FieldError> {
        let multiple: BigUint = multiple_factors
            .iter()
            .map(|(q, e)| q.pow(*e))
            .product::<BigUint>();
        if self.is_zero() || !self.pow(&multiple).is_one() {
            return Err(FieldError::OrderPrecondition);
        }
        let mut order = multiple;
        for (q, e) in multiple_factors {
            for _ in 0..*e {
                let candidate = &order / q;
                if self.pow(&candidate).is_one() {
                    order = candidate;
                } else {
                    break;
                }
            }
        }
        Ok(order)
    }

    /// Euler-criterion square test (zero counts as a square).
    pub fn is_square(&self) -> bool {
        if self.is_zero() {
            return true;
        }
        let e = (self.field.modulus() - 1u32) >> 1;
        self.pow(&e).is_one()
    }

    /// Tonelli-Shanks square root, `None` for non-residues.
    pub fn sqrt(&self) -> Option<FieldElement> {
        let p = self.field.modulus();
        if self.is_zero() {
            return Some(self.clone());
        }
        if !self.is_square() {
            return None;
        }
        if (p % 4u32) == BigUint::from(3u32) {
            let e = (p + 1u32) >> 2;
            return Some(self.pow(&e));
        }
        let p_minus_1 = p - 1u32;
        let two = BigUint::from(2u32);
        let s = valuation(&p_minus_1, &two);
        let q = &p_minus_1 >> s;
        // smallest non-residue as the Tonelli generator
        let mut z = self.field.from_u64(2);
        while z.is_square() {
            z = self.field.element(z.value + 1u32);
        }
        let mut m = s;
        let mut c = z.pow(&q);
        let mut t = self.pow(&q);
        let mut r = self.pow(&((&q + 1u32) >> 1));
        while !t.is_one() {
            let mut i = 0u32;
            let mut t2 = t.clone();
            while !t2.is_one() {
                t2 = &t2 * &t2;
                i += 1;
            }
            let b = c.pow(&(BigUint::one() << (m - i - 1)));
            m = i;
            c = &b * &b;
            t = &(&t * &b) * &b;
            r = &r * &b;
        }
        Some(r)
    }
}

macro_rules! field_binop {
    ($trait:ident, $method:ident, |$a:ident, $b:ident, $p:ident| $body:expr) => {
        impl<'a, 'b> $trait<&'b FieldElement> for &'a FieldElement {
            type Output = FieldElement;
            fn $method(self, rhs: &'b FieldElement) -> FieldElement {
                self.check_same_field(rhs);
                let $p = self.field.modulus();
                let $a = &self.value;
                let $b = &rhs.value;
                self.field.element($body)
            }
        }
    };
}

field_binop!(Add, add, |a, b, p| (a + b) % p);
field_binop!(Sub, sub, |a, b, p| ((p + a) - b) % p);
field_binop!(Mul, mul, |a, b, p| (a * b) % p);

impl Neg for &FieldElement {
    type Output = FieldElement;
    fn neg(self) -> FieldElement {
        let p = self.field.modulus();
        self.field.element((p - &self.value) % p)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha12Rng;

    fn f7() -> Field {
        Field::new(BigUint::from(7u32)).unwrap()
    }

    #[test]
    fn rejects_bad_modulus() {
        assert!(Field::new(BigUint::from(2u32)).is_err());
        assert!(Field::new(BigUint::from(9u32)).is_err());
        assert!(Field::new(BigUint::from(1u32)).is_err());
    }

    #[test]
    fn add_wraps_and_inverts() {
        let f = f7();
        assert_eq!((&f.from_u64(3) + &f.from_u64(4)).value(), &BigUint::zero());
        let x = f.from_u64(5);
        assert_eq!(&f.zero() + &x, x);
        // a + (p - a) = 0
        assert!((&x + &-&x).is_zero());
    }

    #[test]
    fn inverse_by_exhaustion_mod_7() {
        let f = f7();
        // 3 * 5 = 15 = 1 mod 7, found by scanning all of F_7
        let three = f.from_u64(3);
        let found: Vec<u64> = (1..7)
            .filter(|&b| (&three * &f.from_u64(b)).is_one())
            .collect();
        assert_eq!(found, vec![5]);
        assert_eq!(three.inverse().unwrap(), f.from_u64(5));
        assert_eq!(f.one().inverse().unwrap(), f.one());
        let minus_one = f.from_u64(6);
        assert_eq!(minus_one.inverse().unwrap(), minus_one);
        assert_eq!(f.zero().inverse(), Err(FieldError::DivisionByZero));
    }

    #[test]
    fn pow_basics() {
        let f = f7();
        let a = f.from_u64(3);
        assert!(a.pow_u64(0).is_one());
        assert!(a.pow_u64(6).is_one(), "3^6 = 729 = 1 mod 7");
        assert!(a.pow(&BigUint::from(6u32)).is_one());
        let mut rng = ChaCha12Rng::seed_from_u64(3);
        for _ in 0..20 {
            let x = f.random_nonzero(&mut rng);
            assert!(x.pow(&(f.modulus() - 1u32)).is_one(), "Fermat");
        }
    }

    #[test]
    fn pow_is_homomorphic_in_exponent() {
        let p = BigUint::from(1_000_003u64);
        let f = Field::new(p).unwrap();
        let mut rng = ChaCha12Rng::seed_from_u64(4);
        for _ in 0..50 {
            let a = f.random_nonzero(&mut rng);
            let e1 = BigUint::from(rng.gen::<u64>());
            let e2 = BigUint::from(rng.gen::<u64>());
            assert_eq!(a.pow(&(&e1 + &e2)), &a.pow(&e1) * &a.pow(&e2));
        }
    }

    #[test]
    fn field_axioms_random() {
        let f = Field::new(BigUint::from(10_007u64)).unwrap();
        let mut rng = ChaCha12Rng::seed_from_u64(5);
        for _ in 0..100 {
            let a = f.random_element(&mut rng);
            let b = f.random_element(&mut rng);
            let c = f.random_element(&mut rng);
            assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
            assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
            assert_eq!(&a * &b, &b * &a);
            assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        }
    }

    #[test]
    fn primitive_roots_have_exact_order() {
        let f = f7();
        let mut rng = ChaCha12Rng::seed_from_u64(6);
        let one = BigUint::one();
        assert_eq!(
            f.primitive_root_of_unity(&one, &[], &mut rng).unwrap(),
            f.one()
        );
        let two = BigUint::from(2u32);
        let z2 = f
            .primitive_root_of_unity(&two, &[(two.clone(), 1)], &mut rng)
            .unwrap();
        assert_eq!(z2, f.from_u64(6), "p - 1 is the unique element of order 2");
        let three = BigUint::from(3u32);
        let z3 = f
            .primitive_root_of_unity(&three, &[(three.clone(), 1)], &mut rng)
            .unwrap();
        // elements of order 3 mod 7, by exhaustion: 2 and 4
        assert!(z3 == f.from_u64(2) || z3 == f.from_u64(4));
        assert!(f
            .primitive_root_of_unity(&BigUint::from(5u32), &[(BigUint::from(5u32), 1)], &mut rng)
            .is_err());
    }

    #[test]
    fn primitive_root_order_property() {
        let f = Field::new(BigUint::from(1_000_033u64)).unwrap();
        // p - 1 = 2^5 * 3 * 11 * 947
        let mut rng = ChaCha12Rng::seed_from_u64(7);
        for (lambda, factors) in [
            (BigUint::from(32u32), vec![(BigUint::from(2u32), 5)]),
            (
                BigUint::from(33u32),
                vec![(BigUint::from(3u32), 1), (BigUint::from(11u32), 1)],
            ),
            (BigUint::from(947u32), vec![(BigUint::from(947u32), 1)]),
        ] {
            let z = f
                .primitive_root_of_unity(&lambda, &factors, &mut rng)
                .unwrap();
            assert!(z.pow(&lambda).is_one());
            for (q, _) in &factors {
                assert!(!z.pow(&(&lambda / q)).is_one());
            }
        }
    }

    #[test]
    fn multiplicative_orders_mod_7() {
        let f = f7();
        let six = [(BigUint::from(2u32), 1u32), (BigUint::from(3u32), 1)];
        assert_eq!(f.one().multiplicative_order(&six).unwrap(), BigUint::one());
        assert_eq!(
            f.from_u64(6).multiplicative_order(&six).unwrap(),
            BigUint::from(2u32)
        );
        // 3 is a primitive root mod 7: its powers 3,2,6,4,5,1 exhaust F_7^x
        assert_eq!(
            f.from_u64(3).multiplicative_order(&six).unwrap(),
            BigUint::from(6u32)
        );
        // precondition: a^multiple must be 1
        let err = f
            .from_u64(3)
            .multiplicative_order(&[(BigUint::from(2u32), 1)]);
        assert_eq!(err, Err(FieldError::OrderPrecondition));
    }

    #[test]
    fn sqrt_roundtrip() {
        for p in [7u64, 13, 17, 1_000_033] {
            let f = Field::new(BigUint::from(p)).unwrap();
            let mut rng = ChaCha12Rng::seed_from_u64(p);
            let mut squares = 0;
            for _ in 0..60 {
                let x = f.random_element(&mut rng);
                let sq = &x * &x;
                let r = sq.sqrt().expect("x^2 is a square");
                assert_eq!(&r * &r, sq);
                if x.is_square() {
                    squares += 1;
                }
            }
            assert!(squares > 10, "roughly half of all elements are squares");
        }
    }
}
