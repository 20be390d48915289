//! The tame Tate pairing `tau_lambda : Gamma[lambda] x Gamma/lambda*Gamma -> mu_lambda`.
//!
//! Miller's double-and-add builds the function `F` with
//! `div(F) = lambda * (eps_g - w*inf)` incrementally out of the
//! functions each Cantor step divides out (see `CantorTrace`), and
//! evaluates it on the fly at a degree-zero divisor `E = eps_1 - eps_2`
//! equivalent to `h`: here `eps_1` is the effective part of `h + R` and
//! `eps_2` that of a random `R`, both required to have weight 2 so the
//! points at infinity cancel. A function `a(x) + y b(x)` is evaluated at
//! a Mumford pair `(U, V)` inside `F_p` as `res(U, a + V b)`, which
//! multiplies the values over the (possibly conjugate) points of `U`.
//!
//! Raising the raw value to `(p-1)/lambda` lands in the group of
//! `lambda`-th roots of unity and removes the choice of `R`.

use num_bigint::BigUint;
use num_traits::Zero;
use rand::Rng;
use thiserror::Error;

use crate::dlp::{pohlig_hellman, DlogInstance};
use crate::field::FieldElement;
use crate::jacobian::{CantorTrace, GroupContext, MumfordDivisor};
use crate::poly::Poly;

/// Support collisions between the evaluation divisor and a Miller step
/// have probability O(1/p) per step; for a field of reasonable size,
/// hitting this many in a row signals a logic error, not bad luck.
const RESAMPLE_BUDGET: usize = 32;

/// Below this modulus the O(1/p) heuristic is meaningless (on F_3 most
/// shift draws collide with something), so the budget grows to keep the
/// overall failure probability negligible. Retries are cheap there: the
/// Miller chain is precomputed, a retry only re-evaluates resultants.
const TINY_FIELD_BOUND: u64 = 17;
const TINY_FIELD_BUDGET: usize = 4096;

fn resample_budget(ctx: &GroupContext) -> usize {
    if ctx.field().modulus() < &BigUint::from(TINY_FIELD_BOUND) {
        TINY_FIELD_BUDGET
    } else {
        RESAMPLE_BUDGET
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PairingError {
    #[error("lambda = {0} does not divide p - 1")]
    LambdaNotInFieldOrder(BigUint),
    #[error("lambda = {0} does not divide the group order")]
    LambdaNotInGroupOrder(BigUint),
    #[error("first argument is not lambda-torsion: lambda * g != 0")]
    NotTorsion,
    #[error("exceeded the retry budget for support collisions; this should be unreachable")]
    RetryBudgetExhausted,
    #[error("pairing value lies outside <zeta>; the pairing or root of unity is inconsistent")]
    ValueNotInSubgroup,
}

/// A value of the tame pairing: an element of `mu_lambda`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PairingValue {
    value: FieldElement,
    lambda: BigUint,
}

impl PairingValue {
    pub fn value(&self) -> &FieldElement {
        &self.value
    }

    pub fn lambda(&self) -> &BigUint {
        &self.lambda
    }

    pub fn is_trivial(&self) -> bool {
        self.value.is_one()
    }
}

/// Numerator/denominator accumulator for one Miller evaluation pass.
struct MillerAccumulator {
    num: FieldElement,
    den: FieldElement,
}

/// The evaluation divisor `E = eps_1 - eps_2`.
struct EvalDivisor {
    plus: MumfordDivisor,
    minus: MumfordDivisor,
}

impl MillerAccumulator {
    fn new(ctx: &GroupContext) -> MillerAccumulator {
        MillerAccumulator {
            num: ctx.field().one(),
            den: ctx.field().one(),
        }
    }

    fn square(&mut self) {
        self.num = &self.num * &self.num;
        self.den = &self.den * &self.den;
    }

    /// Multiplies in the step function from one Cantor addition,
    /// evaluated at `E`. Returns `None` on a support collision.
    fn absorb(&mut self, trace: &CantorTrace, e: &EvalDivisor) -> Option<()> {
        let eval = |target: &MumfordDivisor, poly: &Poly| -> Option<FieldElement> {
            let r = Poly::resultant(target.u(), poly);
            if r.is_zero() {
                None
            } else {
                Some(r)
            }
        };
        if trace.gcd_part.degree() != Some(0) {
            self.num = &self.num * &eval(&e.plus, &trace.gcd_part)?;
            self.den = &self.den * &eval(&e.minus, &trace.gcd_part)?;
        }
        for (v, u_reduced) in &trace.reductions {
            let y_minus_v_at =
                |d: &MumfordDivisor| -> Option<FieldElement> { eval(d, &(d.v() - v)) };
            self.num = &self.num * &y_minus_v_at(&e.plus)?;
            self.den = &self.den * &y_minus_v_at(&e.minus)?;
            self.num = &self.num * &eval(&e.minus, u_reduced)?;
            self.den = &self.den * &eval(&e.plus, u_reduced)?;
        }
        Some(())
    }

    fn finish(self) -> FieldElement {
        &self.num * &self.den.inverse().expect("den checked nonzero throughout")
    }
}

fn check_preconditions(
    ctx: &GroupContext,
    g: &MumfordDivisor,
    lambda: &BigUint,
) -> Result<(), PairingError> {
    let p_minus_1 = ctx.field().modulus() - 1u32;
    if lambda.is_zero() || !(&p_minus_1 % lambda).is_zero() {
        return Err(PairingError::LambdaNotInFieldOrder(lambda.clone()));
    }
    if !(ctx.order() % lambda).is_zero() {
        return Err(PairingError::LambdaNotInGroupOrder(lambda.clone()));
    }
    if !ctx.scalar_mul(lambda, g).is_identity() {
        return Err(PairingError::NotTorsion);
    }
    Ok(())
}

/// One entry of the precomputed Miller chain.
enum MillerStep {
    /// Square the accumulator, then absorb this doubling step.
    Double(CantorTrace),
    /// Absorb this addition-by-`g` step.
    Add(CantorTrace),
}

/// Walks the double-and-add chain for `lambda * g` once, recording the
/// step functions. The chain depends only on `g` and `lambda`, so shift
/// retries can replay it without redoing any Cantor arithmetic.
fn miller_chain(ctx: &GroupContext, g: &MumfordDivisor, lambda: &BigUint) -> Vec<MillerStep> {
    let mut steps = Vec::new();
    let mut walker = g.clone();
    let bits = lambda.bits();
    for i in (0..bits.saturating_sub(1)).rev() {
        let (next, trace) = ctx.add_with_trace(&walker, &walker);
        steps.push(MillerStep::Double(trace));
        walker = next;
        if lambda.bit(i) {
            let (next, trace) = ctx.add_with_trace(&walker, g);
            steps.push(MillerStep::Add(trace));
            walker = next;
        }
    }
    debug_assert!(walker.is_identity(), "lambda * g must close the loop");
    steps
}

/// A representative of the Tate pairing `e_lambda(g, h)` in
/// `F_p^x / (F_p^x)^lambda`. Only well defined up to `lambda`-th powers;
/// use [`tame_tate`] for a canonical value.
pub fn raw_tate<R: Rng + ?Sized>(
    ctx: &GroupContext,
    g: &MumfordDivisor,
    h: &MumfordDivisor,
    lambda: &BigUint,
    rng: &mut R,
) -> Result<FieldElement, PairingError> {
    check_preconditions(ctx, g, lambda)?;
    ctx.counters().bump_pairings();
    let chain = miller_chain(ctx, g, lambda);
    'resample: for _ in 0..resample_budget(ctx) {
        // a fresh shift divisor; both R and h + R must have full weight
        // so that E = eps(h + R) - eps(R) avoids the point at infinity
        let shift = ctx.random_element(rng);
        if shift.weight() != 2 {
            continue;
        }
        let shifted = ctx.add(h, &shift);
        if shifted.weight() != 2 {
            continue;
        }
        let e = EvalDivisor {
            plus: shifted,
            minus: shift,
        };
        let mut acc = MillerAccumulator::new(ctx);
        for step in &chain {
            let trace = match step {
                MillerStep::Double(trace) => {
                    acc.square();
                    trace
                }
                MillerStep::Add(trace) => trace,
            };
            if acc.absorb(trace, &e).is_none() {
                continue 'resample;
            }
        }
        return Ok(acc.finish());
    }
    Err(PairingError::RetryBudgetExhausted)
}

/// The tame Tate pairing: the raw value raised to `(p-1)/lambda`,
/// a canonical element of `mu_lambda` depending only on `g` and the
/// class of `h` modulo `lambda * Gamma`.
pub fn tame_tate<R: Rng + ?Sized>(
    ctx: &GroupContext,
    g: &MumfordDivisor,
    h: &MumfordDivisor,
    lambda: &BigUint,
    rng: &mut R,
) -> Result<PairingValue, PairingError> {
    let raw = raw_tate(ctx, g, h, lambda, rng)?;
    let exponent = (ctx.field().modulus() - 1u32) / lambda;
    let value = raw.pow(&exponent);
    debug_assert!(value.pow(lambda).is_one(), "tame value lies in mu_lambda");
    Ok(PairingValue {
        value,
        lambda: lambda.clone(),
    })
}

/// The exponent `alpha` with `zeta^alpha = value`, for `zeta` of order
/// `lambda = prod q^e` as described by `lambda_factors`.
pub fn pairing_dlog_exponent(
    ctx: &GroupContext,
    value: &PairingValue,
    zeta: &FieldElement,
    lambda_factors: &[(BigUint, u32)],
) -> Result<BigUint, PairingError> {
    ctx.counters().bump_dlogs();
    let inst = DlogInstance::new(zeta.clone(), value.value.clone(), lambda_factors.to_vec());
    pohlig_hellman(&inst).map_err(|_| PairingError::ValueNotInSubgroup)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::factor_u64;
    use crate::jacobian::CurveParams;
    use crate::oracle::EnumeratedGroup;
    use rand::SeedableRng;
    use rand_chacha::ChaCha12Rng;

    fn big(n: u64) -> BigUint {
        BigUint::from(n)
    }

    /// Contexts for the test zoo, with the primes l | gcd(N, p-1).
    fn zoo_contexts(rng: &mut ChaCha12Rng) -> Vec<(GroupContext, Vec<u64>)> {
        crate::oracle::tests::zoo()
            .into_iter()
            .map(|(p, f, n)| {
                let coeffs: Vec<BigUint> = f.iter().map(|&c| big(c)).collect();
                let curve = CurveParams::new(big(p), &coeffs).unwrap();
                let ctx = GroupContext::with_computed_factors(curve, big(n), rng).unwrap();
                let ells = factor_u64(n)
                    .into_iter()
                    .map(|(q, _)| q)
                    .filter(|q| (p - 1) % q == 0)
                    .collect();
                (ctx, ells)
            })
            .collect()
    }

    /// A random element of `Gamma[lambda]`: `(N / lambda) * x`.
    fn random_torsion(
        ctx: &GroupContext,
        lambda: &BigUint,
        rng: &mut ChaCha12Rng,
    ) -> MumfordDivisor {
        let cofactor = ctx.order() / lambda;
        let x = ctx.random_element(rng);
        ctx.scalar_mul(&cofactor, &x)
    }

    #[test]
    fn values_live_in_mu_lambda() {
        let mut rng = ChaCha12Rng::seed_from_u64(50);
        for (ctx, ells) in zoo_contexts(&mut rng) {
            for ell in ells {
                let lambda = big(ell);
                for _ in 0..10 {
                    let g = random_torsion(&ctx, &lambda, &mut rng);
                    let h = ctx.random_element(&mut rng);
                    let t = tame_tate(&ctx, &g, &h, &lambda, &mut rng).unwrap();
                    assert!(t.value().pow(&lambda).is_one());
                }
            }
        }
    }

    #[test]
    fn identity_pairs_trivially() {
        let mut rng = ChaCha12Rng::seed_from_u64(51);
        for (ctx, ells) in zoo_contexts(&mut rng) {
            for ell in ells {
                let lambda = big(ell);
                let h = ctx.random_element(&mut rng);
                let t = tame_tate(&ctx, &ctx.identity(), &h, &lambda, &mut rng).unwrap();
                assert!(t.is_trivial());
                let g = random_torsion(&ctx, &lambda, &mut rng);
                let t = tame_tate(&ctx, &g, &ctx.identity(), &lambda, &mut rng).unwrap();
                assert!(t.is_trivial());
            }
        }
    }

    #[test]
    fn preconditions_enforced() {
        let mut rng = ChaCha12Rng::seed_from_u64(52);
        // N = 36 over F_5: 3 | N but 3 does not divide p - 1 = 4
        let curve =
            CurveParams::new(big(5), &[big(1), big(1), big(0), big(0), big(0), big(1)]).unwrap();
        let ctx = GroupContext::with_computed_factors(curve, big(36), &mut rng).unwrap();
        let g = ctx.identity();
        assert_eq!(
            raw_tate(&ctx, &g, &g, &big(3), &mut rng).unwrap_err(),
            PairingError::LambdaNotInFieldOrder(big(3))
        );
        // 2 | p - 1 but a non-torsion g is rejected
        let x = loop {
            let x = ctx.random_element(&mut rng);
            if !ctx.scalar_mul(&big(2), &x).is_identity() {
                break x;
            }
        };
        assert_eq!(
            raw_tate(&ctx, &x, &g, &big(2), &mut rng).unwrap_err(),
            PairingError::NotTorsion
        );
    }

    #[test]
    fn well_defined_across_shifts() {
        // two runs use independent random shift divisors; the tame value
        // must agree even though the raw values differ
        let mut rng = ChaCha12Rng::seed_from_u64(53);
        for (ctx, ells) in zoo_contexts(&mut rng) {
            for ell in ells {
                let lambda = big(ell);
                for _ in 0..10 {
                    let g = random_torsion(&ctx, &lambda, &mut rng);
                    let h = ctx.random_element(&mut rng);
                    let t1 = tame_tate(&ctx, &g, &h, &lambda, &mut rng).unwrap();
                    let t2 = tame_tate(&ctx, &g, &h, &lambda, &mut rng).unwrap();
                    assert_eq!(t1, t2);
                }
            }
        }
    }

    #[test]
    fn class_invariance() {
        // tau(g, h + lambda*r) = tau(g, h)
        let mut rng = ChaCha12Rng::seed_from_u64(54);
        for (ctx, ells) in zoo_contexts(&mut rng) {
            for ell in ells {
                let lambda = big(ell);
                for _ in 0..10 {
                    let g = random_torsion(&ctx, &lambda, &mut rng);
                    let h = ctx.random_element(&mut rng);
                    let r = ctx.random_element(&mut rng);
                    let shifted = ctx.add(&h, &ctx.scalar_mul(&lambda, &r));
                    let t1 = tame_tate(&ctx, &g, &h, &lambda, &mut rng).unwrap();
                    let t2 = tame_tate(&ctx, &g, &shifted, &lambda, &mut rng).unwrap();
                    assert_eq!(t1, t2);
                }
            }
        }
    }

    #[test]
    fn bilinearity_both_arguments() {
        let mut rng = ChaCha12Rng::seed_from_u64(55);
        for (ctx, ells) in zoo_contexts(&mut rng) {
            for ell in ells {
                let lambda = big(ell);
                for _ in 0..15 {
                    let g1 = random_torsion(&ctx, &lambda, &mut rng);
                    let g2 = random_torsion(&ctx, &lambda, &mut rng);
                    let h = ctx.random_element(&mut rng);
                    let lhs = tame_tate(&ctx, &ctx.add(&g1, &g2), &h, &lambda, &mut rng).unwrap();
                    let t1 = tame_tate(&ctx, &g1, &h, &lambda, &mut rng).unwrap();
                    let t2 = tame_tate(&ctx, &g2, &h, &lambda, &mut rng).unwrap();
                    assert_eq!(lhs.value(), &(t1.value() * t2.value()));

                    let g = random_torsion(&ctx, &lambda, &mut rng);
                    let h1 = ctx.random_element(&mut rng);
                    let h2 = ctx.random_element(&mut rng);
                    let lhs = tame_tate(&ctx, &g, &ctx.add(&h1, &h2), &lambda, &mut rng).unwrap();
                    let t1 = tame_tate(&ctx, &g, &h1, &lambda, &mut rng).unwrap();
                    let t2 = tame_tate(&ctx, &g, &h2, &lambda, &mut rng).unwrap();
                    assert_eq!(lhs.value(), &(t1.value() * t2.value()));
                }
            }
        }
    }

    #[test]
    fn nondegeneracy_against_oracle() {
        // for every nonzero g in Gamma[l] some enumerated h pairs
        // non-trivially with it
        let mut rng = ChaCha12Rng::seed_from_u64(56);
        for (ctx, ells) in zoo_contexts(&mut rng) {
            let oracle = EnumeratedGroup::enumerate(ctx.curve()).unwrap();
            for ell in ells {
                let lambda = big(ell);
                for g_oracle in oracle.torsion_subgroup(ell) {
                    if g_oracle == oracle.identity() {
                        continue;
                    }
                    let g = oracle.to_mumford(ctx.curve(), &g_oracle);
                    let found = oracle.elements().iter().any(|h_oracle| {
                        let h = oracle.to_mumford(ctx.curve(), h_oracle);
                        let t = tame_tate(&ctx, &g, &h, &lambda, &mut rng).unwrap();
                        !t.is_trivial()
                    });
                    assert!(found, "degenerate g = {g} at l = {ell}");
                }
            }
        }
    }

    #[test]
    fn compatible_across_lambda_levels() {
        // tau_l((lambda/l) g, h) = tau_lambda(g, h)^(lambda/l); exercised
        // on the curves with 4 | gcd(N, p-1)
        let mut rng = ChaCha12Rng::seed_from_u64(57);
        for (p, f, n) in crate::oracle::tests::zoo() {
            if n % 4 != 0 || (p - 1) % 4 != 0 {
                continue;
            }
            let coeffs: Vec<BigUint> = f.iter().map(|&c| big(c)).collect();
            let curve = CurveParams::new(big(p), &coeffs).unwrap();
            let ctx = GroupContext::with_computed_factors(curve, big(n), &mut rng).unwrap();
            let four = big(4);
            let two = big(2);
            for _ in 0..10 {
                let g = random_torsion(&ctx, &four, &mut rng);
                let h = ctx.random_element(&mut rng);
                let t4 = tame_tate(&ctx, &g, &h, &four, &mut rng).unwrap();
                let t2 = tame_tate(&ctx, &ctx.scalar_mul(&two, &g), &h, &two, &mut rng).unwrap();
                assert_eq!(t2.value(), &t4.value().pow(&two));
            }
        }
    }

    #[test]
    fn dlog_of_pairing_values() {
        let mut rng = ChaCha12Rng::seed_from_u64(58);
        // F_7 curve with N = 81 = 3^4 and 3 | p - 1
        let curve =
            CurveParams::new(big(7), &[big(3), big(1), big(0), big(0), big(0), big(1)]).unwrap();
        let ctx = GroupContext::with_computed_factors(curve, big(81), &mut rng).unwrap();
        let lambda = big(3);
        let lf = vec![(big(3), 1u32)];
        let zeta = ctx
            .field()
            .primitive_root_of_unity(&lambda, &lf, &mut rng)
            .unwrap();
        for alpha in 0..3u64 {
            let val = PairingValue {
                value: zeta.pow_u64(alpha),
                lambda: lambda.clone(),
            };
            assert_eq!(
                pairing_dlog_exponent(&ctx, &val, &zeta, &lf).unwrap(),
                big(alpha)
            );
        }
        // a value outside <zeta> is flagged
        let outsider = ctx.field().from_u64(3); // order 6, not in mu_3
        let val = PairingValue {
            value: outsider,
            lambda: lambda.clone(),
        };
        assert_eq!(
            pairing_dlog_exponent(&ctx, &val, &zeta, &lf).unwrap_err(),
            PairingError::ValueNotInSubgroup
        );
    }
}
