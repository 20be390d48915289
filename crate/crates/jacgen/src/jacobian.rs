//! The rational divisor class group of a genus-2 curve `y^2 = f(x)`.
//!
//! Internally the curve is kept in the imaginary model: `f` monic of
//! degree 5, one point at infinity. Degree-6 inputs are accepted when
//! they have a rational Weierstrass point, by moving that root to
//! infinity; inputs without one are rejected as unsupported.
//!
//! Group elements are reduced divisors in Mumford form `(u, v)` with
//! `u` monic, `deg u <= 2`, `deg v < deg u` and `u | v^2 - f`. Addition
//! is Cantor's algorithm: gcd-based composition followed by at most one
//! reduction step. The composition and reduction also report the
//! rational functions they divide out, which is exactly what Miller's
//! loop in the pairing module consumes.

use std::fmt;
use std::sync::atomic::{AtomicU64, Ordering};

use num_bigint::BigUint;
use num_traits::{One, Zero};
use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::arith::{factor_biguint, random_below};
use crate::field::{Field, FieldElement};
use crate::poly::Poly;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CurveError {
    #[error("base field: {0}")]
    Field(#[from] crate::field::FieldError),
    #[error("curve polynomial must have degree 5 or 6, got {0:?}")]
    BadDegree(Option<usize>),
    #[error("curve polynomial is not squarefree")]
    NotSquarefree,
    #[error("degree-6 model has no rational Weierstrass point; such curves are not supported")]
    NoRationalRoot,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GroupError {
    #[error("stated factorization multiplies to {product}, not the group order {order}")]
    FactorizationMismatch { product: BigUint, order: BigUint },
    #[error("factor {0} is not prime")]
    FactorNotPrime(BigUint),
    #[error("N * D != identity for a sampled element; the stated group order is wrong")]
    OrderCheckFailed,
    #[error("group order exceeds 2^64; an explicit factorization is required")]
    FactorizationRequired,
    #[error("{0} does not divide the group order")]
    NotAGroupPrime(BigUint),
}

/// How a user-supplied model was normalized to the internal monic quintic.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ModelTransform {
    /// Input was already a monic quintic.
    Identity,
    /// Quintic with leading coefficient `a`: `(x, y) -> (a x, a^2 y)`.
    Scaled { lead: FieldElement },
    /// Sextic with rational root `r`: `(x, y) -> (c/(x-r), c^2 y/(x-r)^3)`
    /// where `c = f'(r)`.
    InvertedAtRoot {
        root: FieldElement,
        scale: FieldElement,
    },
}

/// A validated genus-2 curve over `F_p`.
#[derive(Clone)]
pub struct CurveParams {
    field: Field,
    f: Poly,
    original: Poly,
    transform: ModelTransform,
}

impl fmt::Debug for CurveParams {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(out, "y^2 = {:?} over {:?}", self.f, self.field)
    }
}

impl CurveParams {
    /// Validates `y^2 = f_input(x)` over `F_p` and normalizes the model.
    pub fn new(p: BigUint, f_input: &[BigUint]) -> Result<CurveParams, CurveError> {
        let field = Field::new(p)?;
        let f_in = Poly::from_biguint_coeffs(&field, f_input);
        Self::from_poly(field, f_in)
    }

    pub fn from_poly(field: Field, f_in: Poly) -> Result<CurveParams, CurveError> {
        match f_in.degree() {
            Some(5) | Some(6) => {}
            d => return Err(CurveError::BadDegree(d)),
        }
        if !f_in.is_squarefree() {
            return Err(CurveError::NotSquarefree);
        }
        let (f, transform) = match f_in.degree().unwrap() {
            5 => {
                if f_in.is_monic() {
                    (f_in.clone(), ModelTransform::Identity)
                } else {
                    let a = f_in.leading_coeff();
                    (
                        rescale_to_monic(&f_in, &a),
                        ModelTransform::Scaled { lead: a },
                    )
                }
            }
            _ => {
                // move the smallest rational root to infinity
                let roots = f_in.roots();
                let root = roots.first().cloned().ok_or(CurveError::NoRationalRoot)?;
                let quintic = invert_sextic_at_root(&f_in, &root);
                let c = quintic.leading_coeff();
                (
                    rescale_to_monic(&quintic, &c),
                    ModelTransform::InvertedAtRoot { root, scale: c },
                )
            }
        };
        debug_assert!(f.is_monic() && f.degree() == Some(5) && f.is_squarefree());
        Ok(CurveParams {
            field,
            f,
            original: f_in,
            transform,
        })
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    /// The internal monic quintic.
    pub fn f(&self) -> &Poly {
        &self.f
    }

    /// The polynomial as supplied by the caller.
    pub fn original_poly(&self) -> &Poly {
        &self.original
    }

    pub fn transform(&self) -> &ModelTransform {
        &self.transform
    }

    pub fn identity(&self) -> MumfordDivisor {
        MumfordDivisor {
            u: Poly::one(&self.field),
            v: Poly::zero(&self.field),
        }
    }

    /// The degree-1 divisor of an affine point `(x0, y0)` on the curve.
    pub fn point_divisor(&self, x0: &FieldElement, y0: &FieldElement) -> Option<MumfordDivisor> {
        if (y0 * y0) != self.f.eval(x0) {
            return None;
        }
        Some(MumfordDivisor {
            u: Poly::from_coeffs(&self.field, vec![-x0, self.field.one()]),
            v: Poly::constant(y0.clone()),
        })
    }
}

/// Scale `(x, y) -> (a x, a^2 y)` turning `f` with lead `a` into a monic
/// polynomial of the same degree: coefficient `i` picks up `a^(4-i)`.
fn rescale_to_monic(f: &Poly, lead: &FieldElement) -> Poly {
    let field = f.field().clone();
    let d = f.degree().expect("nonzero");
    debug_assert_eq!(d, 5);
    let inv = lead.inverse().expect("leading coefficient nonzero");
    // a^(4-i) for i <= 4, a^-1 for i = 5
    let coeffs = (0..=d)
        .map(|i| {
            let scale = if i <= 4 {
                lead.pow_u64(4 - i as u64)
            } else {
                inv.clone()
            };
            &f.coeff(i) * &scale
        })
        .collect();
    Poly::from_coeffs(&field, coeffs)
}

/// Substitute `x = r + 1/t` into the sextic `f = (x - r) q(x)` and clear
/// denominators: returns `g(t) = t^5 q(r + 1/t)`, a quintic with leading
/// coefficient `f'(r)`.
fn invert_sextic_at_root(f: &Poly, root: &FieldElement) -> Poly {
    let field = f.field().clone();
    let x_minus_r = Poly::from_coeffs(&field, vec![-root, field.one()]);
    let (q, rem) = f.divmod(&x_minus_r).expect("x - r nonzero");
    debug_assert!(rem.is_zero(), "root of f");
    // g(t) = sum_i q_i t^(5-i) (r t + 1)^i
    let rt_plus_1 = Poly::from_coeffs(&field, vec![field.one(), root.clone()]);
    let mut g = Poly::zero(&field);
    let mut rt_pow = Poly::one(&field);
    for i in 0..=5 {
        let mut term_coeffs = vec![field.zero(); 5 - i];
        term_coeffs.push(field.one());
        let t_pow = Poly::from_coeffs(&field, term_coeffs);
        g = &g + &(&t_pow * &rt_pow).scale(&q.coeff(i));
        rt_pow = &rt_pow * &rt_plus_1;
    }
    g
}

/// A reduced divisor class in Mumford form.
#[derive(Clone, PartialEq, Eq)]
pub struct MumfordDivisor {
    u: Poly,
    v: Poly,
}

impl fmt::Debug for MumfordDivisor {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(out, "{self}")
    }
}

impl fmt::Display for MumfordDivisor {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |poly: &Poly| -> String {
            if poly.is_zero() {
                return "0".to_owned();
            }
            poly.coeffs()
                .iter()
                .map(|c| c.to_string())
                .collect::<Vec<_>>()
                .join(",")
        };
        write!(out, "(u: {}; v: {})", join(&self.u), join(&self.v))
    }
}

impl std::hash::Hash for MumfordDivisor {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        for c in self.u.coeffs() {
            c.hash(state);
        }
        0xffu8.hash(state);
        for c in self.v.coeffs() {
            c.hash(state);
        }
    }
}

impl MumfordDivisor {
    pub fn new(u: Poly, v: Poly) -> MumfordDivisor {
        MumfordDivisor { u, v }
    }

    pub fn u(&self) -> &Poly {
        &self.u
    }

    pub fn v(&self) -> &Poly {
        &self.v
    }

    pub fn is_identity(&self) -> bool {
        self.u.is_one() && self.v.is_zero()
    }

    /// Number of affine points in the support, with multiplicity.
    pub fn weight(&self) -> usize {
        self.u.degree().unwrap_or(0)
    }

    /// The full Mumford condition for this curve.
    pub fn is_valid(&self, curve: &CurveParams) -> bool {
        if !self.u.is_monic() || self.weight() > 2 {
            return false;
        }
        if !self.v.is_zero() && self.v.degree() >= self.u.degree() {
            return false;
        }
        let vv = &self.v * &self.v;
        (&vv - curve.f()).rem(&self.u).is_ok_and(|r| r.is_zero())
    }
}

/// One Cantor addition together with the rational functions it divides
/// out, for consumers that walk the divisor arithmetic (Miller's loop).
///
/// The sum relation is
/// `D_a + D_b = D_c + div( gcd_part(x) * prod (y - v_i(x)) / u_i(x) )`
/// over the recorded reduction steps.
pub struct CantorTrace {
    /// The monic gcd `d(x)` from composition; `1` for disjoint supports.
    pub gcd_part: Poly,
    /// `(v, u')` per reduction step: numerator `y - v(x)`, denominator `u'(x)`.
    pub reductions: Vec<(Poly, Poly)>,
}

/// Running tallies of the primitive operations underneath a computation:
/// element orders, scalar multiples, pairing evaluations, discrete logs.
#[derive(Debug, Default)]
pub struct OpCounters {
    orders: AtomicU64,
    scalar_muls: AtomicU64,
    pairings: AtomicU64,
    dlogs: AtomicU64,
}

/// A plain snapshot of [`OpCounters`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct OpCounts {
    pub orders: u64,
    pub scalar_muls: u64,
    pub pairings: u64,
    pub dlogs: u64,
}

impl OpCounters {
    pub fn bump_orders(&self) {
        self.orders.fetch_add(1, Ordering::Relaxed);
    }
    pub fn bump_scalar_muls(&self) {
        self.scalar_muls.fetch_add(1, Ordering::Relaxed);
    }
    pub fn bump_pairings(&self) {
        self.pairings.fetch_add(1, Ordering::Relaxed);
    }
    pub fn bump_dlogs(&self) {
        self.dlogs.fetch_add(1, Ordering::Relaxed);
    }
    pub fn snapshot(&self) -> OpCounts {
        OpCounts {
            orders: self.orders.load(Ordering::Relaxed),
            scalar_muls: self.scalar_muls.load(Ordering::Relaxed),
            pairings: self.pairings.load(Ordering::Relaxed),
            dlogs: self.dlogs.load(Ordering::Relaxed),
        }
    }
}

/// The ambient group: a curve together with its order `N = |Jac(C)(F_p)|`
/// and the factorization of `N`. Immutable once built and shareable.
#[derive(Debug)]
pub struct GroupContext {
    curve: CurveParams,
    order: BigUint,
    factors: Vec<(BigUint, u32)>,
    counters: OpCounters,
}

impl GroupContext {
    /// Builds a context from a stated order and factorization. The
    /// factorization is checked to multiply out, factors are checked for
    /// primality, and the order is spot-checked on random elements
    /// (`N * D = 0` by Lagrange).
    pub fn new<R: Rng + ?Sized>(
        curve: CurveParams,
        order: BigUint,
        mut factors: Vec<(BigUint, u32)>,
        rng: &mut R,
    ) -> Result<GroupContext, GroupError> {
        factors.sort();
        let product: BigUint = factors.iter().map(|(q, e)| q.pow(*e)).product();
        if product != order {
            return Err(GroupError::FactorizationMismatch { product, order });
        }
        for (q, _) in &factors {
            if !crate::arith::is_probable_prime(q) {
                return Err(GroupError::FactorNotPrime(q.clone()));
            }
        }
        let ctx = GroupContext {
            curve,
            order,
            factors,
            counters: OpCounters::default(),
        };
        for _ in 0..4 {
            let d = ctx.random_element(rng);
            if !ctx.scalar_mul(&ctx.order.clone(), &d).is_identity() {
                return Err(GroupError::OrderCheckFailed);
            }
        }
        Ok(ctx)
    }

    /// Like [`GroupContext::new`] but factoring `N` internally, which is
    /// only attempted for `N < 2^64`.
    pub fn with_computed_factors<R: Rng + ?Sized>(
        curve: CurveParams,
        order: BigUint,
        rng: &mut R,
    ) -> Result<GroupContext, GroupError> {
        let factors = factor_biguint(&order).ok_or(GroupError::FactorizationRequired)?;
        Self::new(curve, order, factors, rng)
    }

    pub fn curve(&self) -> &CurveParams {
        &self.curve
    }

    pub fn field(&self) -> &Field {
        self.curve.field()
    }

    pub fn order(&self) -> &BigUint {
        &self.order
    }

    pub fn order_factors(&self) -> &[(BigUint, u32)] {
        &self.factors
    }

    pub fn counters(&self) -> &OpCounters {
        &self.counters
    }

    pub fn identity(&self) -> MumfordDivisor {
        self.curve.identity()
    }

    /// Cantor addition of reduced divisors.
    pub fn add(&self, a: &MumfordDivisor, b: &MumfordDivisor) -> MumfordDivisor {
        self.add_with_trace(a, b).0
    }

    /// Cantor addition, also reporting the functions divided out.
    pub fn add_with_trace(
        &self,
        a: &MumfordDivisor,
        b: &MumfordDivisor,
    ) -> (MumfordDivisor, CantorTrace) {
        let f = self.curve.f();
        // composition
        let (d0, e1, e2) = Poly::xgcd(&a.u, &b.u).expect("u's nonzero");
        let v_sum = &a.v + &b.v;
        let (d, c1, c2) = Poly::xgcd(&d0, &v_sum).expect("d0 nonzero");
        let s1 = &c1 * &e1;
        let s2 = &c1 * &e2;
        let s3 = c2;
        let dd = &d * &d;
        let (u_comp, rem) = (&a.u * &b.u).divmod(&dd).expect("d nonzero");
        debug_assert!(rem.is_zero(), "d^2 divides u1 u2");
        let numerator =
            &(&(&s1 * &(&a.u * &b.v)) + &(&s2 * &(&b.u * &a.v))) + &(&s3 * &(&(&a.v * &b.v) + f));
        let (v_pre, rem) = numerator.divmod(&d).expect("d nonzero");
        debug_assert!(rem.is_zero(), "d divides the composition numerator");
        let mut u = u_comp;
        let mut v = v_pre.rem(&u).unwrap_or_else(|_| Poly::zero(self.field()));
        let mut trace = CantorTrace {
            gcd_part: d,
            reductions: Vec::new(),
        };
        // reduction: one step suffices for reduced inputs, but loop anyway
        while u.degree().is_some_and(|deg| deg > 2) {
            let vv = &v * &v;
            let (u_next, rem) = (f - &vv).divmod(&u).expect("u nonzero");
            debug_assert!(rem.is_zero(), "u divides f - v^2");
            let u_next = u_next.monic().expect("f - v^2 nonzero for squarefree f");
            let v_next = (-&v).rem(&u_next).expect("u_next nonzero");
            trace.reductions.push((v.clone(), u_next.clone()));
            u = u_next;
            v = v_next;
        }
        let u = u.monic().expect("u nonzero");
        let result = MumfordDivisor { u, v };
        debug_assert!(
            result.is_valid(&self.curve),
            "Cantor output violates the Mumford condition"
        );
        (result, trace)
    }

    pub fn negate(&self, d: &MumfordDivisor) -> MumfordDivisor {
        let v = (-&d.v).rem(&d.u).expect("u nonzero");
        MumfordDivisor { u: d.u.clone(), v }
    }

    /// `n * D` by double-and-add.
    pub fn scalar_mul(&self, n: &BigUint, d: &MumfordDivisor) -> MumfordDivisor {
        self.counters.bump_scalar_muls();
        if n.is_zero() || d.is_identity() {
            return self.identity();
        }
        let mut acc = d.clone();
        let bits = n.bits();
        for i in (0..bits - 1).rev() {
            acc = self.add(&acc, &acc);
            if n.bit(i) {
                acc = self.add(&acc, d);
            }
        }
        acc
    }

    /// Exact order of `D`, using the factored group order: for each prime
    /// power `q^e || N`, reduce the exponent while the power stays trivial.
    pub fn element_order(&self, d: &MumfordDivisor) -> BigUint {
        self.counters.bump_orders();
        let mut order = BigUint::one();
        for (q, e) in &self.factors {
            let cofactor = &self.order / q.pow(*e);
            let mut part = self.scalar_mul(&cofactor, d);
            let mut exponent = 0u32;
            while !part.is_identity() {
                part = self.scalar_mul(q, &part);
                exponent += 1;
            }
            order *= q.pow(exponent);
        }
        order
    }

    /// Order of an element of the Sylow-`l` subgroup: the least `l^j`
    /// killing it. `None` if the element is not `l`-power torsion.
    pub fn order_in_sylow(&self, ell: &BigUint, d: &MumfordDivisor) -> Option<BigUint> {
        self.counters.bump_orders();
        let e = self
            .factors
            .iter()
            .find(|(q, _)| q == ell)
            .map(|(_, e)| *e)?;
        let mut power = d.clone();
        let mut order = BigUint::one();
        for _ in 0..=e {
            if power.is_identity() {
                return Some(order);
            }
            power = self.scalar_mul(ell, &power);
            order *= ell;
        }
        None
    }

    /// A random element of the group: the class of one or two uniformly
    /// sampled points, with random count. Both counts matter: sums of
    /// exactly two point classes stay inside one coset of an index-2
    /// subgroup whenever the 2-descent images of all rational points
    /// share a coset, and single-point classes cover the other side.
    /// The mix meets every coset of every subgroup near-uniformly, which
    /// is what the probabilistic retry loops and Sylow projections need.
    pub fn random_element<R: Rng + ?Sized>(&self, rng: &mut R) -> MumfordDivisor {
        let p1 = self.random_point(rng);
        if rng.gen::<bool>() {
            return p1;
        }
        let p2 = self.random_point(rng);
        self.add(&p1, &p2)
    }

    fn random_point<R: Rng + ?Sized>(&self, rng: &mut R) -> MumfordDivisor {
        let field = self.field();
        for _ in 0..4096 {
            let x0 = field.random_element(rng);
            let fx = self.curve.f().eval(&x0);
            if let Some(y0) = fx.sqrt() {
                let y0 = if rng.gen::<bool>() { y0 } else { -&y0 };
                return self
                    .curve
                    .point_divisor(&x0, &y0)
                    .expect("constructed point is on the curve");
            }
        }
        unreachable!("about half of all x-coordinates lift to curve points")
    }

    /// `(N / N_l) * D`, the projection into the Sylow-`l` subgroup.
    pub fn project_to_sylow(
        &self,
        ell: &BigUint,
        d: &MumfordDivisor,
    ) -> Result<MumfordDivisor, GroupError> {
        let e = self
            .factors
            .iter()
            .find(|(q, _)| q == ell)
            .map(|(_, e)| *e)
            .ok_or_else(|| GroupError::NotAGroupPrime(ell.clone()))?;
        let cofactor = &self.order / ell.pow(e);
        Ok(self.scalar_mul(&cofactor, d))
    }

    /// `l^(v_l(N)) = |Gamma_l|` read off the stored factorization.
    pub fn sylow_order(&self, ell: &BigUint) -> Result<BigUint, GroupError> {
        self.factors
            .iter()
            .find(|(q, _)| q == ell)
            .map(|(q, e)| q.pow(*e))
            .ok_or_else(|| GroupError::NotAGroupPrime(ell.clone()))
    }

    /// A uniformly random scalar in `[0, N)`.
    pub fn random_scalar<R: Rng + ?Sized>(&self, rng: &mut R) -> BigUint {
        random_below(rng, &self.order)
    }
}
