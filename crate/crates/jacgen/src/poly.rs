//! Univariate polynomial arithmetic over `F_p`.
//!
//! Coefficients are stored lowest degree first with no trailing zeros,
//! so equality is structural. Degrees in this crate stay tiny (the curve
//! polynomial has degree 5 or 6), so the classical quadratic algorithms
//! are used throughout.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigUint;
use thiserror::Error;

use crate::field::{Field, FieldElement};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PolyError {
    #[error("division by the zero polynomial")]
    DivisionByZero,
    #[error("gcd of two zero polynomials")]
    GcdOfZeros,
}

#[derive(Clone, PartialEq, Eq)]
pub struct Poly {
    field: Field,
    coeffs: Vec<FieldElement>,
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match i {
                0 => write!(f, "{c}")?,
                1 if c.is_one() => write!(f, "x")?,
                1 => write!(f, "{c}*x")?,
                _ if c.is_one() => write!(f, "x^{i}")?,
                _ => write!(f, "{c}*x^{i}")?,
            }
        }
        Ok(())
    }
}

impl Poly {
    pub fn zero(field: &Field) -> Poly {
        Poly {
            field: field.clone(),
            coeffs: Vec::new(),
        }
    }

    pub fn one(field: &Field) -> Poly {
        Poly::constant(field.one())
    }

    pub fn constant(c: FieldElement) -> Poly {
        let field = c.field().clone();
        Poly::from_coeffs(&field, vec![c])
    }

    /// `x`
    pub fn x(field: &Field) -> Poly {
        Poly::from_coeffs(field, vec![field.zero(), field.one()])
    }

    /// Builds a polynomial from coefficients (lowest first), trimming
    /// trailing zeros to canonical form.
    pub fn from_coeffs(field: &Field, mut coeffs: Vec<FieldElement>) -> Poly {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Poly {
            field: field.clone(),
            coeffs,
        }
    }

    pub fn from_u64_coeffs(field: &Field, coeffs: &[u64]) -> Poly {
        Poly::from_coeffs(field, coeffs.iter().map(|&c| field.from_u64(c)).collect())
    }

    pub fn from_biguint_coeffs(field: &Field, coeffs: &[BigUint]) -> Poly {
        Poly::from_coeffs(
            field,
            coeffs.iter().map(|c| field.element(c.clone())).collect(),
        )
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn coeffs(&self) -> &[FieldElement] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs[0].is_one()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    /// Coefficient of `x^i` (zero beyond the stored length).
    pub fn coeff(&self, i: usize) -> FieldElement {
        self.coeffs
            .get(i)
            .cloned()
            .unwrap_or_else(|| self.field.zero())
    }

    /// Leading coefficient; zero for the zero polynomial.
    pub fn leading_coeff(&self) -> FieldElement {
        self.coeffs
            .last()
            .cloned()
            .unwrap_or_else(|| self.field.zero())
    }

    pub fn is_monic(&self) -> bool {
        self.leading_coeff().is_one()
    }

    /// Scalar multiple.
    pub fn scale(&self, c: &FieldElement) -> Poly {
        if c.is_zero() {
            return Poly::zero(&self.field);
        }
        Poly::from_coeffs(&self.field, self.coeffs.iter().map(|a| a * c).collect())
    }

    /// The monic associate; errors on zero.
    pub fn monic(&self) -> Result<Poly, PolyError> {
        if self.is_zero() {
            return Err(PolyError::DivisionByZero);
        }
        if self.is_monic() {
            return Ok(self.clone());
        }
        let inv = self
            .leading_coeff()
            .inverse()
            .expect("leading coefficient nonzero");
        Ok(self.scale(&inv))
    }

    /// Horner evaluation.
    pub fn eval(&self, x: &FieldElement) -> FieldElement {
        let mut acc = self.field.zero();
        for c in self.coeffs.iter().rev() {
            acc = &(&acc * x) + c;
        }
        acc
    }

    pub fn derivative(&self) -> Poly {
        if self.coeffs.len() <= 1 {
            return Poly::zero(&self.field);
        }
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, c)| {
                let i = self.field.element(BigUint::from(i));
                &i * c
            })
            .collect();
        Poly::from_coeffs(&self.field, coeffs)
    }

    /// Euclidean division: `self = q*b + r` with `deg r < deg b`.
    pub fn divmod(&self, b: &Poly) -> Result<(Poly, Poly), PolyError> {
        if b.is_zero() {
            return Err(PolyError::DivisionByZero);
        }
        let db = b.degree().unwrap();
        if self.degree().is_none_or(|da| da < db) {
            return Ok((Poly::zero(&self.field), self.clone()));
        }
        let lead_inv = b.leading_coeff().inverse().expect("nonzero lead");
        let mut rem = self.coeffs.clone();
        let da = rem.len() - 1;
        let mut quot = vec![self.field.zero(); da - db + 1];
        for i in (db..=da).rev() {
            if rem[i].is_zero() {
                continue;
            }
            let factor = &rem[i] * &lead_inv;
            for (j, bc) in b.coeffs.iter().enumerate() {
                let idx = i - db + j;
                rem[idx] = &rem[idx] - &(&factor * bc);
            }
            quot[i - db] = factor;
        }
        Ok((
            Poly::from_coeffs(&self.field, quot),
            Poly::from_coeffs(&self.field, rem),
        ))
    }

    pub fn rem(&self, b: &Poly) -> Result<Poly, PolyError> {
        Ok(self.divmod(b)?.1)
    }

    /// Extended gcd: returns monic `g` and `(s, t)` with `g = s*a + t*b`.
    pub fn xgcd(a: &Poly, b: &Poly) -> Result<(Poly, Poly, Poly), PolyError> {
        if a.is_zero() && b.is_zero() {
            return Err(PolyError::GcdOfZeros);
        }
        let field = &a.field;
        let mut r0 = a.clone();
        let mut r1 = b.clone();
        let mut s0 = Poly::one(field);
        let mut s1 = Poly::zero(field);
        let mut t0 = Poly::zero(field);
        let mut t1 = Poly::one(field);
        while !r1.is_zero() {
            let (q, r) = r0.divmod(&r1)?;
            let s = &s0 - &(&q * &s1);
            let t = &t0 - &(&q * &t1);
            r0 = r1;
            r1 = r;
            s0 = s1;
            s1 = s;
            t0 = t1;
            t1 = t;
        }
        let lead_inv = r0.leading_coeff().inverse().expect("gcd nonzero");
        Ok((
            r0.scale(&lead_inv),
            s0.scale(&lead_inv),
            t0.scale(&lead_inv),
        ))
    }

    pub fn gcd(a: &Poly, b: &Poly) -> Result<Poly, PolyError> {
        if a.is_zero() && b.is_zero() {
            return Err(PolyError::GcdOfZeros);
        }
        let mut r0 = a.clone();
        let mut r1 = b.clone();
        while !r1.is_zero() {
            let r = r0.rem(&r1)?;
            r0 = r1;
            r1 = r;
        }
        r0.monic()
    }

    /// `gcd(f, f') = 1`, the smoothness condition for curve polynomials.
    pub fn is_squarefree(&self) -> bool {
        if self.is_zero() {
            return false;
        }
        if self.degree() == Some(0) {
            return true;
        }
        let d = self.derivative();
        if d.is_zero() {
            // pure p-th power in characteristic p
            return false;
        }
        Poly::gcd(self, &d).is_ok_and(|g| g.is_one())
    }

    /// Resultant via the Euclidean remainder sequence:
    /// `res(a, b) = lc(a)^deg(b) * prod b(alpha_i)` over the roots of `a`.
    ///
    /// Conventions at the edges: `res(a, b) = 0` if either is zero, except
    /// that a nonzero constant `c` gives `res(c, b) = c^deg(b)` and
    /// `res(a, c) = c^deg(a)`.
    pub fn resultant(a: &Poly, b: &Poly) -> FieldElement {
        let field = &a.field;
        if a.is_zero() || b.is_zero() {
            let other = if a.is_zero() { b } else { a };
            return if other.degree() == Some(0) {
                field.one()
            } else {
                field.zero()
            };
        }
        let mut f = a.clone();
        let mut g = b.clone();
        let mut acc = field.one();
        let mut sign_flip = false;
        loop {
            let df = f.degree().unwrap();
            let dg = g.degree().unwrap();
            if dg == 0 {
                // res(f, c) = c^deg f
                acc = &acc * &g.leading_coeff().pow(&BigUint::from(df));
                break;
            }
            if df < dg {
                std::mem::swap(&mut f, &mut g);
                // swapping multiplies by (-1)^(df*dg)
                if df % 2 == 1 && dg % 2 == 1 {
                    sign_flip = !sign_flip;
                }
                continue;
            }
            let r = f.rem(&g).expect("g nonzero");
            if r.is_zero() {
                return field.zero();
            }
            let dr = r.degree().unwrap();
            // res(f, g) = lc(g)^(df - dr) * (-1)^(df*dg) * res(g, r)
            acc = &acc * &g.leading_coeff().pow(&BigUint::from(df - dr));
            if df % 2 == 1 && dg % 2 == 1 {
                sign_flip = !sign_flip;
            }
            f = g;
            g = r;
        }
        if sign_flip {
            -&acc
        } else {
            acc
        }
    }

    /// `self^e mod m` by square-and-multiply; used for `x^p mod f`.
    pub fn pow_mod(&self, e: &BigUint, m: &Poly) -> Result<Poly, PolyError> {
        if m.is_zero() {
            return Err(PolyError::DivisionByZero);
        }
        let mut base = self.rem(m)?;
        let mut acc = Poly::one(&self.field).rem(m)?;
        let bits = e.bits();
        for i in 0..bits {
            if e.bit(i) {
                acc = (&acc * &base).rem(m)?;
            }
            if i + 1 < bits {
                base = (&base * &base).rem(m)?;
            }
        }
        Ok(acc)
    }

    /// All roots in `F_p`, with multiplicity one each (the squarefree part
    /// of the rational-root factor is split). Deterministic: the
    /// equal-degree splitting walks shifts `x + a` for `a = 0, 1, 2, ...`.
    pub fn roots(&self) -> Vec<FieldElement> {
        if self.degree().is_none_or(|d| d == 0) {
            return Vec::new();
        }
        let field = &self.field;
        let p = field.modulus();
        // rational roots live in gcd(f, x^p - x)
        let xp = Poly::x(field).pow_mod(p, self).expect("self nonzero");
        let xp_minus_x = &xp - &Poly::x(field);
        let mut linear_part = if xp_minus_x.is_zero() {
            // self divides x^p - x: all roots rational and simple
            self.monic().expect("nonzero")
        } else {
            Poly::gcd(self, &xp_minus_x).expect("not both zero")
        };
        let mut roots = Vec::new();
        // split off x | f directly
        if linear_part.coeff(0).is_zero()
            && !linear_part.is_zero()
            && linear_part.degree() != Some(0)
        {
            roots.push(field.zero());
            let (q, _) = linear_part.divmod(&Poly::x(field)).unwrap();
            linear_part = q;
        }
        let mut stack = vec![linear_part];
        let half = (p - 1u32) >> 1;
        let mut shift = 0u64;
        while let Some(g) = stack.pop() {
            match g.degree() {
                None | Some(0) => continue,
                Some(1) => {
                    // monic x + c has root -c
                    let c = g.monic().unwrap().coeff(0);
                    roots.push(-&c);
                    continue;
                }
                _ => {}
            }
            // try gcd(g, (x + a)^((p-1)/2) - 1) for successive shifts
            let a = field.from_u64(shift);
            shift += 1;
            let shifted = Poly::from_coeffs(field, vec![a, field.one()]);
            let pw = shifted.pow_mod(&half, &g).expect("g nonzero");
            let candidate = &pw - &Poly::one(field);
            let d = match Poly::gcd(&g, &candidate) {
                Ok(d) => d,
                Err(_) => {
                    stack.push(g);
                    continue;
                }
            };
            if d.is_one() || d.degree() == g.degree() {
                stack.push(g); // unlucky shift, retry with the next one
                continue;
            }
            let (q, _) = g.divmod(&d).unwrap();
            stack.push(d);
            stack.push(q);
        }
        roots.sort_by(|a, b| a.value().cmp(b.value()));
        roots
    }
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let coeffs = (0..n).map(|i| &self.coeff(i) + &rhs.coeff(i)).collect();
        Poly::from_coeffs(&self.field, coeffs)
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let coeffs = (0..n).map(|i| &self.coeff(i) - &rhs.coeff(i)).collect();
        Poly::from_coeffs(&self.field, coeffs)
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly::from_coeffs(&self.field, self.coeffs.iter().map(|c| -c).collect())
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        if self.is_zero() || rhs.is_zero() {
            return Poly::zero(&self.field);
        }
        let mut coeffs = vec![self.field.zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                coeffs[i + j] = &coeffs[i + j] + &(a * b);
            }
        }
        Poly::from_coeffs(&self.field, coeffs)
    }
}
