//! Generators of Sylow subgroups and of the `m`-torsion of the Jacobian.
//!
//! The central routine diagonalizes four candidate elements of a
//! Sylow-`l` subgroup against four probe elements with respect to the
//! tame Tate pairing: working from the highest index down, it picks a
//! probe whose pairing with the current candidate is non-trivial at the
//! `l`-level, then clears the rest of the pairing row by probe updates
//! and the rest of the column by candidate updates. A diagonal matrix
//! with non-trivial diagonal certifies that the surviving candidates
//! span a direct sum; a product-of-orders test promotes that to full
//! generation of the Sylow subgroup, and per-prime generators summed
//! coordinate-wise assemble generators of the whole `m`-torsion.
//!
//! Every step is randomized but driven by a caller-supplied seeded RNG,
//! so identical inputs and seeds reproduce identical outputs. The retry
//! loops are budgeted: on genuinely bad luck (or a misstated group
//! order) they surface a give-up error with diagnostics instead of
//! spinning forever.

use num_bigint::BigUint;
use num_traits::{One, Zero};
use rand::Rng;
use thiserror::Error;

use crate::arith::{mod_inverse, valuation};
use crate::field::FieldElement;
use crate::jacobian::{GroupContext, GroupError, MumfordDivisor};
use crate::pairing::{pairing_dlog_exponent, tame_tate, PairingError, PairingValue};

/// Fresh-element restarts per diagonalization call.
const ELEMENT_RESTARTS: usize = 64;
/// Fresh-probe draws per element attempt.
const PROBE_RESTARTS: usize = 64;
/// Sylow-assembly iterations per prime.
const ASSEMBLY_ITERATIONS: usize = 256;

#[derive(Debug, Error)]
pub enum StructureError {
    #[error("{0} does not divide gcd(N, p-1): not a usable prime here")]
    PrimeNotUsable(BigUint),
    #[error("lambda_nu = {0} is not a power of {1}")]
    NotAPrimePower(BigUint, BigUint),
    #[error(
        "gave up after {element_restarts} element restarts, {probe_refreshes} probe refreshes, \
         {assembly_iterations} assembly iterations"
    )]
    GiveUp {
        element_restarts: usize,
        probe_refreshes: usize,
        assembly_iterations: usize,
    },
    #[error("group: {0}")]
    Group(#[from] GroupError),
    #[error("field: {0}")]
    Field(#[from] crate::field::FieldError),
    #[error("pairing: {0}")]
    Pairing(#[from] PairingError),
}

/// `l^(v_l(N))`, the order of the Sylow-`l` subgroup.
pub fn sylow_order(ell: &BigUint, ctx: &GroupContext) -> Result<BigUint, StructureError> {
    Ok(ctx.sylow_order(ell)?)
}

/// Splits `lambda_nu = l^a` into `(lambda0, lambda)` with `lambda`
/// the largest divisor of `lambda_nu` dividing `p - 1`, i.e.
/// `lambda = l^min(a, v_l(p-1))` and `lambda0 = lambda_nu / lambda`.
pub fn compute_lambda(
    lambda_nu: &BigUint,
    ell: &BigUint,
    p: &BigUint,
) -> Result<(BigUint, BigUint), StructureError> {
    let a = valuation(lambda_nu, ell);
    if ell.pow(a) != *lambda_nu {
        return Err(StructureError::NotAPrimePower(
            lambda_nu.clone(),
            ell.clone(),
        ));
    }
    let vp = valuation(&(p - 1u32), ell);
    if vp == 0 {
        return Err(StructureError::PrimeNotUsable(ell.clone()));
    }
    let lambda = ell.pow(a.min(vp));
    Ok((lambda_nu / &lambda, lambda))
}

/// The primes `l | N` with `l | p - 1`: exactly the primes of `m`.
pub fn qualifying_primes(ctx: &GroupContext) -> Vec<BigUint> {
    let p_minus_1 = ctx.field().modulus() - 1u32;
    ctx.order_factors()
        .iter()
        .map(|(q, _)| q.clone())
        .filter(|q| (&p_minus_1 % q).is_zero())
        .collect()
}

/// `m`: the largest divisor of `N` all of whose prime factors divide
/// `p - 1`.
pub fn torsion_bound(ctx: &GroupContext) -> BigUint {
    ctx.order_factors()
        .iter()
        .filter(|(q, _)| {
            let p_minus_1 = ctx.field().modulus() - 1u32;
            (&p_minus_1 % q).is_zero()
        })
        .map(|(q, e)| q.pow(*e))
        .product()
}

/// Final state of one successful diagonalization run.
#[derive(Debug, Clone)]
pub struct DiagonalizationState {
    pub ell: BigUint,
    /// Candidates in the Sylow-`l` subgroup, zeros first, then ascending order.
    pub candidates: [MumfordDivisor; 4],
    /// Probe elements of the full group, aligned with the candidates.
    pub probes: [MumfordDivisor; 4],
    /// Orders of the candidates.
    pub orders: [BigUint; 4],
    /// First live index, if any candidate is non-zero.
    pub nu: Option<usize>,
    pub lambda0: BigUint,
    /// The pairing order used by the certificate.
    pub lambda: BigUint,
    /// The `lambda`-th root of unity the exponents refer to.
    pub zeta: Option<FieldElement>,
    /// Pairing exponent matrix over the live block, from verification.
    pub alpha: [[Option<BigUint>; 4]; 4],
}

/// Outcome of re-deriving the pairing matrix of a state from scratch.
#[derive(Debug, Clone)]
pub struct DirectSumCertificate {
    pub ok: bool,
    /// Indices of non-zero candidates.
    pub live: Vec<usize>,
    pub lambda: BigUint,
    pub zeta: Option<FieldElement>,
    /// Exponents for the live block; `None` elsewhere.
    pub matrix: [[Option<BigUint>; 4]; 4],
    /// First `(row, col)` violating the diagonal pattern, when `!ok`.
    pub failing_entry: Option<(usize, usize)>,
}

fn empty_matrix() -> [[Option<BigUint>; 4]; 4] {
    Default::default()
}

/// Scales a candidate of order `ord` down to the `lambda`-torsion layer:
/// `(ord / lambda) * candidate`.
fn to_lambda_torsion(
    ctx: &GroupContext,
    candidate: &MumfordDivisor,
    ord: &BigUint,
    lambda: &BigUint,
) -> MumfordDivisor {
    ctx.scalar_mul(&(ord / lambda), candidate)
}

/// `candidate - coeff * (scale * base)`.
fn subtract_multiple(
    ctx: &GroupContext,
    candidate: &MumfordDivisor,
    coeff: &BigUint,
    scale: &BigUint,
    base: &MumfordDivisor,
) -> MumfordDivisor {
    let step = ctx.scalar_mul(&(coeff * scale), base);
    ctx.add(candidate, &ctx.negate(&step))
}

struct Attempt {
    candidates: [MumfordDivisor; 4],
    probes: [MumfordDivisor; 4],
    orders: [BigUint; 4],
}

enum LevelOutcome {
    Done,
    RestartProbes,
    RestartElements,
}

/// One full pass over the levels `k = 3, 2, 1, 0`, mutating candidates
/// and probes in place.
#[allow(clippy::needless_range_loop)] // probes[j] is written while probes[k] is read
fn run_levels<R: Rng + ?Sized>(
    ctx: &GroupContext,
    ell: &BigUint,
    attempt: &mut Attempt,
    rng: &mut R,
) -> Result<LevelOutcome, StructureError> {
    let p = ctx.field().modulus().clone();
    for k in (0..4usize).rev() {
        if attempt.candidates.iter().all(|c| c.is_identity()) {
            return Ok(LevelOutcome::RestartElements);
        }
        // recompute orders for the unfrozen block and sort it ascending,
        // stably, so zeros sink to the front
        for i in 0..=k {
            attempt.orders[i] = ctx
                .order_in_sylow(ell, &attempt.candidates[i])
                .expect("candidates stay in the Sylow subgroup");
        }
        let mut block: Vec<(BigUint, MumfordDivisor)> = (0..=k)
            .map(|i| (attempt.orders[i].clone(), attempt.candidates[i].clone()))
            .collect();
        block.sort_by(|a, b| a.0.cmp(&b.0));
        for (i, (ord, cand)) in block.into_iter().enumerate() {
            attempt.orders[i] = ord;
            attempt.candidates[i] = cand;
        }
        // all of the unfrozen block zero: the frozen suffix is the output
        if attempt.candidates[k].is_identity() {
            return Ok(LevelOutcome::Done);
        }
        let nu = (0..4)
            .find(|&i| !attempt.candidates[i].is_identity())
            .expect("some candidate is non-zero");
        let (_lambda0, lambda) = compute_lambda(&attempt.orders[nu], ell, &p)?;
        let lambda_factors = vec![(ell.clone(), valuation(&lambda, ell))];
        let g_k = to_lambda_torsion(ctx, &attempt.candidates[k], &attempt.orders[k], &lambda);
        // pairing row against the live probes, with the l-level test
        let mut row: Vec<PairingValue> = Vec::with_capacity(k + 1);
        for probe in attempt.probes.iter().take(k + 1) {
            row.push(tame_tate(ctx, &g_k, probe, &lambda, rng)?);
        }
        let ell_level = &lambda / ell;
        let pivot = (0..=k).find(|&j| !row[j].value().pow(&ell_level).is_one());
        let Some(pivot) = pivot else {
            // the probes cannot see this candidate at the l-level
            return Ok(LevelOutcome::RestartProbes);
        };
        attempt.probes.swap(pivot, k);
        row.swap(pivot, k);
        let zeta = ctx
            .field()
            .primitive_root_of_unity(&lambda, &lambda_factors, rng)?;
        let alpha_row: Vec<BigUint> = row
            .iter()
            .map(|val| pairing_dlog_exponent(ctx, val, &zeta, &lambda_factors))
            .collect::<Result<_, _>>()?;
        let akk_inv = mod_inverse(&alpha_row[k], &lambda)
            .expect("diagonal exponent is a unit mod l by pivot choice");
        // clear the row: probes absorb multiples of the pivot probe
        for j in 0..k {
            if alpha_row[j].is_zero() {
                continue;
            }
            let beta = (&akk_inv * &alpha_row[j]) % &lambda;
            attempt.probes[j] = subtract_multiple(
                ctx,
                &attempt.probes[j],
                &beta,
                &BigUint::one(),
                &attempt.probes[k],
            );
        }
        // clear the column: live candidates below k absorb multiples of
        // the pivot candidate, scaled to matching order
        for kappa in 0..k {
            if attempt.candidates[kappa].is_identity() {
                continue;
            }
            let g_kappa = to_lambda_torsion(
                ctx,
                &attempt.candidates[kappa],
                &attempt.orders[kappa],
                &lambda,
            );
            let val = tame_tate(ctx, &g_kappa, &attempt.probes[k], &lambda, rng)?;
            let alpha = pairing_dlog_exponent(ctx, &val, &zeta, &lambda_factors)?;
            if alpha.is_zero() {
                continue;
            }
            let beta = (&akk_inv * &alpha) % &lambda;
            let scale = &attempt.orders[k] / &attempt.orders[kappa];
            attempt.candidates[kappa] = subtract_multiple(
                ctx,
                &attempt.candidates[kappa],
                &beta,
                &scale,
                &attempt.candidates[k],
            );
        }
    }
    Ok(LevelOutcome::Done)
}

/// Runs the pairing diagonalization inside the Sylow-`l` subgroup.
///
/// Returns candidates spanning a direct sum, certified: the state has
/// already passed [`verify_direct_sum`] when it is returned. Candidates
/// are sorted with zeros first and orders ascending.
pub fn diagonalize_sylow<R: Rng + ?Sized>(
    ell: &BigUint,
    ctx: &GroupContext,
    rng: &mut R,
) -> Result<DiagonalizationState, StructureError> {
    let p = ctx.field().modulus().clone();
    if !((&p - 1u32) % ell).is_zero() || ctx.sylow_order(ell).is_err() {
        return Err(StructureError::PrimeNotUsable(ell.clone()));
    }
    let mut probe_refreshes_total = 0usize;
    for element_restart in 0..ELEMENT_RESTARTS {
        let mut candidates: [MumfordDivisor; 4] = std::array::from_fn(|_| {
            let x = ctx.random_element(rng);
            ctx.project_to_sylow(ell, &x).expect("l divides N")
        });
        if candidates.iter().all(|c| c.is_identity()) {
            continue;
        }
        let mut probe_budget = PROBE_RESTARTS;
        'probes: while probe_budget > 0 {
            probe_budget -= 1;
            probe_refreshes_total += 1;
            let probes: [MumfordDivisor; 4] = std::array::from_fn(|_| ctx.random_element(rng));
            let mut attempt = Attempt {
                candidates: candidates.clone(),
                probes,
                orders: std::array::from_fn(|_| BigUint::one()),
            };
            match run_levels(ctx, ell, &mut attempt, rng)? {
                LevelOutcome::RestartElements => break 'probes,
                LevelOutcome::RestartProbes => {
                    // keep the partially cleared candidates, as the level
                    // pass left them, and draw fresh probes
                    candidates = attempt.candidates;
                    continue 'probes;
                }
                LevelOutcome::Done => {}
            }
            let mut state = DiagonalizationState {
                ell: ell.clone(),
                candidates: attempt.candidates,
                probes: attempt.probes,
                orders: std::array::from_fn(|_| BigUint::one()),
                nu: None,
                lambda0: BigUint::one(),
                lambda: BigUint::one(),
                zeta: None,
                alpha: empty_matrix(),
            };
            for i in 0..4 {
                state.orders[i] = ctx
                    .order_in_sylow(ell, &state.candidates[i])
                    .expect("output lies in the Sylow subgroup");
            }
            state.nu = (0..4).find(|&i| !state.candidates[i].is_identity());
            if let Some(nu) = state.nu {
                let (lambda0, lambda) = compute_lambda(&state.orders[nu], ell, &p)?;
                state.lambda0 = lambda0;
                state.lambda = lambda;
            }
            let cert = verify_direct_sum(&state, ctx, rng)?;
            if cert.ok {
                state.zeta = cert.zeta;
                state.alpha = cert.matrix;
                state.lambda = cert.lambda;
                return Ok(state);
            }
            // a stale cleared entry can survive when the minimal order
            // jumps mid-run; rare, and a fresh start fixes it
            log::debug!(
                "diagonalization certificate failed at {:?} (restart {element_restart}), retrying",
                cert.failing_entry
            );
            break 'probes;
        }
    }
    Err(StructureError::GiveUp {
        element_restarts: ELEMENT_RESTARTS,
        probe_refreshes: probe_refreshes_total,
        assembly_iterations: 0,
    })
}

/// Recomputes the pairing matrix of a state from scratch and checks the
/// diagonal certificate: over the live block, off-diagonal values must
/// be trivial (exponent 0 mod `lambda`) and diagonal values non-trivial
/// at the `l`-level. One or zero live candidates certify vacuously.
pub fn verify_direct_sum<R: Rng + ?Sized>(
    state: &DiagonalizationState,
    ctx: &GroupContext,
    rng: &mut R,
) -> Result<DirectSumCertificate, StructureError> {
    let ell = &state.ell;
    let orders: Vec<BigUint> = state
        .candidates
        .iter()
        .map(|c| {
            ctx.order_in_sylow(ell, c)
                .expect("state candidates lie in the Sylow subgroup")
        })
        .collect();
    let live: Vec<usize> = (0..4)
        .filter(|&i| !state.candidates[i].is_identity())
        .collect();
    if live.len() <= 1 {
        return Ok(DirectSumCertificate {
            ok: true,
            live,
            lambda: BigUint::one(),
            zeta: None,
            matrix: empty_matrix(),
            failing_entry: None,
        });
    }
    // live candidates must sit at the top, sorted by ascending order
    let shape_ok = live.iter().copied().eq(4 - live.len()..4)
        && live.windows(2).all(|w| orders[w[0]] <= orders[w[1]]);
    if !shape_ok {
        return Ok(DirectSumCertificate {
            ok: false,
            live,
            lambda: BigUint::one(),
            zeta: None,
            matrix: empty_matrix(),
            failing_entry: None,
        });
    }
    let nu = live[0];
    let p = ctx.field().modulus().clone();
    let (_lambda0, lambda) = compute_lambda(&orders[nu], ell, &p)?;
    let lambda_factors = vec![(ell.clone(), valuation(&lambda, ell))];
    let zeta = match &state.zeta {
        Some(z) if z.pow(&lambda).is_one() && !z.pow(&(&lambda / ell)).is_one() => z.clone(),
        _ => ctx
            .field()
            .primitive_root_of_unity(&lambda, &lambda_factors, rng)?,
    };
    let ell_level = &lambda / ell;
    let mut matrix = empty_matrix();
    let mut failing = None;
    'scan: for &i in &live {
        let g_i = to_lambda_torsion(ctx, &state.candidates[i], &orders[i], &lambda);
        for &j in &live {
            let val = tame_tate(ctx, &g_i, &state.probes[j], &lambda, rng)?;
            let alpha = pairing_dlog_exponent(ctx, &val, &zeta, &lambda_factors)?;
            matrix[i][j] = Some(alpha);
            let entry_ok = if i == j {
                !val.value().pow(&ell_level).is_one()
            } else {
                val.is_trivial()
            };
            if !entry_ok {
                failing = Some((i, j));
                break 'scan;
            }
        }
    }
    Ok(DirectSumCertificate {
        ok: failing.is_none(),
        live,
        lambda,
        zeta: Some(zeta),
        matrix,
        failing_entry: failing,
    })
}

/// What a [`StructureResult`] generates.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StructureTarget {
    /// One Sylow subgroup, of the recorded size.
    Sylow { ell: BigUint, size: BigUint },
    /// The whole `m`-torsion.
    MTorsion { m: BigUint },
}

/// Per-prime certificate data attached to a result.
#[derive(Debug, Clone)]
pub struct SylowCertificate {
    pub ell: BigUint,
    pub lambda: BigUint,
    pub zeta: Option<FieldElement>,
    pub live: Vec<usize>,
    pub matrix: [[Option<BigUint>; 4]; 4],
}

/// Generators with their orders and the certificates that back them.
#[derive(Debug, Clone)]
pub struct StructureResult {
    pub generators: [MumfordDivisor; 4],
    pub orders: [BigUint; 4],
    pub target: StructureTarget,
    pub certificates: Vec<SylowCertificate>,
}

/// Generators of the Sylow-`l` subgroup: diagonalization runs until the
/// product of the output orders equals `|Gamma_l|`, which upgrades the
/// direct-sum certificate to full generation.
pub fn sylow_generators<R: Rng + ?Sized>(
    ell: &BigUint,
    ctx: &GroupContext,
    rng: &mut R,
) -> Result<StructureResult, StructureError> {
    let size = ctx.sylow_order(ell)?;
    for iteration in 0..ASSEMBLY_ITERATIONS {
        let state = diagonalize_sylow(ell, ctx, rng)?;
        let product: BigUint = state.orders.iter().product();
        if product == size {
            return Ok(StructureResult {
                generators: state.candidates.clone(),
                orders: state.orders.clone(),
                target: StructureTarget::Sylow {
                    ell: ell.clone(),
                    size,
                },
                certificates: vec![SylowCertificate {
                    ell: ell.clone(),
                    lambda: state.lambda.clone(),
                    zeta: state.zeta.clone(),
                    live: (0..4)
                        .filter(|&i| !state.candidates[i].is_identity())
                        .collect(),
                    matrix: state.alpha.clone(),
                }],
            });
        }
        log::debug!(
            "sylow assembly for l = {ell}: got order product {product} < {size} \
             (iteration {iteration}), retrying"
        );
    }
    Err(StructureError::GiveUp {
        element_restarts: 0,
        probe_refreshes: 0,
        assembly_iterations: ASSEMBLY_ITERATIONS,
    })
}

/// Generators of the `m`-torsion: per-prime Sylow generators summed
/// coordinate-wise, so orders multiply across the primes.
pub fn m_torsion_generators<R: Rng + ?Sized>(
    ctx: &GroupContext,
    primes: &[BigUint],
    rng: &mut R,
) -> Result<StructureResult, StructureError> {
    let mut primes: Vec<BigUint> = primes.to_vec();
    primes.sort();
    primes.dedup();
    let p_minus_1 = ctx.field().modulus() - 1u32;
    let mut m = BigUint::one();
    for ell in &primes {
        if !(&p_minus_1 % ell).is_zero() {
            return Err(StructureError::PrimeNotUsable(ell.clone()));
        }
        m *= ctx.sylow_order(ell)?;
    }
    let mut generators: [MumfordDivisor; 4] = std::array::from_fn(|_| ctx.identity());
    let mut certificates = Vec::with_capacity(primes.len());
    for ell in &primes {
        let part = sylow_generators(ell, ctx, rng)?;
        for (acc, g) in generators.iter_mut().zip(part.generators.iter()) {
            *acc = ctx.add(acc, g);
        }
        certificates.extend(part.certificates);
    }
    let orders: [BigUint; 4] = std::array::from_fn(|i| ctx.element_order(&generators[i]));
    Ok(StructureResult {
        generators,
        orders,
        target: StructureTarget::MTorsion { m },
        certificates,
    })
}

/// Certifies that externally supplied elements of the Sylow-`l`
/// subgroup are independent, without modifying them: probes are
/// triangularized against the given elements (probe updates only), and
/// the resulting echelon pattern, unit diagonal mod `l` with the
/// below-diagonal block trivial mod `lambda`, forces independence.
#[allow(clippy::needless_range_loop)] // probes[j] is written while probes[k] is read
pub fn certify_independence<R: Rng + ?Sized>(
    elements: &[MumfordDivisor],
    ell: &BigUint,
    ctx: &GroupContext,
    rng: &mut R,
) -> Result<DirectSumCertificate, StructureError> {
    let p = ctx.field().modulus().clone();
    let p_minus_1 = &p - 1u32;
    if !(&p_minus_1 % ell).is_zero() {
        return Err(StructureError::PrimeNotUsable(ell.clone()));
    }
    // live elements sorted ascending by order, remembering source slots
    let mut live: Vec<(usize, BigUint, &MumfordDivisor)> = elements
        .iter()
        .enumerate()
        .filter(|(_, d)| !d.is_identity())
        .map(|(i, d)| {
            let ord = ctx
                .order_in_sylow(ell, d)
                .unwrap_or_else(|| ctx.element_order(d));
            (i, ord, d)
        })
        .collect();
    live.sort_by(|a, b| a.1.cmp(&b.1));
    let n = live.len();
    if n <= 1 {
        return Ok(DirectSumCertificate {
            ok: true,
            live: live.iter().map(|(i, _, _)| *i).collect(),
            lambda: BigUint::one(),
            zeta: None,
            matrix: empty_matrix(),
            failing_entry: None,
        });
    }
    let (_lambda0, lambda) = compute_lambda(&live[0].1, ell, &p)?;
    let lambda_factors = vec![(ell.clone(), valuation(&lambda, ell))];
    let ell_level = &lambda / ell;
    let layers: Vec<MumfordDivisor> = live
        .iter()
        .map(|(_, ord, d)| to_lambda_torsion(ctx, d, ord, &lambda))
        .collect();
    let zeta = ctx
        .field()
        .primitive_root_of_unity(&lambda, &lambda_factors, rng)?;
    'attempt: for _ in 0..PROBE_RESTARTS {
        let mut probes: Vec<MumfordDivisor> = (0..n).map(|_| ctx.random_element(rng)).collect();
        for k in (0..n).rev() {
            let mut row: Vec<PairingValue> = Vec::with_capacity(k + 1);
            for probe in probes.iter().take(k + 1) {
                row.push(tame_tate(ctx, &layers[k], probe, &lambda, rng)?);
            }
            let pivot = (0..=k).find(|&j| !row[j].value().pow(&ell_level).is_one());
            let Some(pivot) = pivot else {
                continue 'attempt;
            };
            probes.swap(pivot, k);
            row.swap(pivot, k);
            let alpha_row: Vec<BigUint> = row
                .iter()
                .map(|val| pairing_dlog_exponent(ctx, val, &zeta, &lambda_factors))
                .collect::<Result<_, _>>()?;
            let akk_inv =
                mod_inverse(&alpha_row[k], &lambda).expect("pivot exponent is a unit mod l");
            for j in 0..k {
                if alpha_row[j].is_zero() {
                    continue;
                }
                let beta = (&akk_inv * &alpha_row[j]) % &lambda;
                probes[j] = subtract_multiple(ctx, &probes[j], &beta, &BigUint::one(), &probes[k]);
            }
        }
        // re-derive the whole matrix fresh and check the echelon pattern
        let mut matrix = empty_matrix();
        let mut failing = None;
        'scan: for k in 0..n {
            for j in 0..n {
                let val = tame_tate(ctx, &layers[k], &probes[j], &lambda, rng)?;
                let alpha = pairing_dlog_exponent(ctx, &val, &zeta, &lambda_factors)?;
                let (slot_k, slot_j) = (live[k].0, live[j].0);
                matrix[slot_k][slot_j] = Some(alpha);
                let entry_ok = if j == k {
                    !val.value().pow(&ell_level).is_one()
                } else if j < k {
                    val.is_trivial()
                } else {
                    true // above the diagonal carries no constraint
                };
                if !entry_ok {
                    failing = Some((slot_k, slot_j));
                    break 'scan;
                }
            }
        }
        if failing.is_none() {
            return Ok(DirectSumCertificate {
                ok: true,
                live: live.iter().map(|(i, _, _)| *i).collect(),
                lambda,
                zeta: Some(zeta),
                matrix,
                failing_entry: None,
            });
        }
        // pairing noise cannot happen (values are deterministic given the
        // divisors), so a failed scan means dependent inputs
        return Ok(DirectSumCertificate {
            ok: false,
            live: live.iter().map(|(i, _, _)| *i).collect(),
            lambda,
            zeta: Some(zeta),
            matrix,
            failing_entry: failing,
        });
    }
    // no probe set ever saw one of the elements: for honest pairings this
    // means the element pairs trivially with everything reachable, which
    // happens for dependent sets; report as uncertified
    Ok(DirectSumCertificate {
        ok: false,
        live: live.iter().map(|(i, _, _)| *i).collect(),
        lambda,
        zeta: Some(zeta),
        matrix: empty_matrix(),
        failing_entry: None,
    })
}

#[cfg(test)]
mod tests {

    use super::*;
    use crate::jacobian::CurveParams;
    use crate::oracle::EnumeratedGroup;
    use rand::SeedableRng;
    use rand_chacha::ChaCha12Rng;

    fn big(n: u64) -> BigUint {
        BigUint::from(n)
    }

    fn zoo_ctx(p: u64, f: &[u64], n: u64, rng: &mut ChaCha12Rng) -> GroupContext {
        let coeffs: Vec<BigUint> = f.iter().map(|&c| big(c)).collect();
        let curve = CurveParams::new(big(p), &coeffs).unwrap();
        GroupContext::with_computed_factors(curve, big(n), rng).unwrap()
    }

    #[test]
    fn lambda_splitting() {
        let ell = big(3);
        // v_3(p - 1) = 1 for p = 7
        assert_eq!(
            compute_lambda(&big(3), &ell, &big(7)).unwrap(),
            (big(1), big(3))
        );
        assert_eq!(
            compute_lambda(&big(27), &ell, &big(7)).unwrap(),
            (big(9), big(3))
        );
        // v_3(p - 1) = 2 for p = 19
        assert_eq!(
            compute_lambda(&big(9), &ell, &big(19)).unwrap(),
            (big(1), big(9))
        );
        assert_eq!(
            compute_lambda(&big(27), &ell, &big(19)).unwrap(),
            (big(3), big(9))
        );
        assert!(compute_lambda(&big(6), &ell, &big(7)).is_err());
        assert!(matches!(
            compute_lambda(&big(25), &big(5), &big(7)),
            Err(StructureError::PrimeNotUsable(_))
        ));
    }

    #[test]
    fn qualifying_primes_and_m() {
        let mut rng = ChaCha12Rng::seed_from_u64(60);
        // N = 192 = 2^6 * 3 over F_13, p - 1 = 12 = 2^2 * 3
        let ctx = zoo_ctx(13, &[3, 0, 0, 1, 0, 1], 192, &mut rng);
        assert_eq!(qualifying_primes(&ctx), vec![big(2), big(3)]);
        assert_eq!(torsion_bound(&ctx), big(192));
        // N = 29 prime over F_3: no qualifying primes, m = 1
        let ctx = zoo_ctx(3, &[1, 2, 0, 0, 0, 1], 29, &mut rng);
        assert!(qualifying_primes(&ctx).is_empty());
        assert_eq!(torsion_bound(&ctx), big(1));
    }

    #[test]
    fn diagonalization_certified_and_independent() {
        // across the zoo: every run passes verification and the oracle
        // confirms span = product of orders
        let mut rng = ChaCha12Rng::seed_from_u64(61);
        for (p, f, n) in crate::oracle::tests::zoo() {
            let ctx = zoo_ctx(p, &f, n, &mut rng);
            let oracle = EnumeratedGroup::enumerate(ctx.curve()).unwrap();
            for ell in qualifying_primes(&ctx) {
                for _ in 0..20 {
                    let state = diagonalize_sylow(&ell, &ctx, &mut rng).unwrap();
                    let cert = verify_direct_sum(&state, &ctx, &mut rng).unwrap();
                    assert!(cert.ok, "p = {p}, l = {ell}");
                    let gens: Vec<_> = state
                        .candidates
                        .iter()
                        .map(|d| oracle.from_mumford(d))
                        .collect();
                    let span = oracle.subgroup_span(&gens).unwrap();
                    let product: BigUint = state.orders.iter().product();
                    assert_eq!(BigUint::from(span), product, "p = {p}, l = {ell}");
                }
            }
        }
    }

    #[test]
    fn tampered_state_fails_verification() {
        let mut rng = ChaCha12Rng::seed_from_u64(62);
        // the F_11 curve has 2-rank 4: plenty of live candidates
        let ctx = zoo_ctx(11, &[0, 2, 5, 2, 1, 1], 128, &mut rng);
        let two = big(2);
        for _ in 0..20 {
            let state = diagonalize_sylow(&two, &ctx, &mut rng).unwrap();
            let live: Vec<usize> = (0..4)
                .filter(|&i| !state.candidates[i].is_identity())
                .collect();
            if live.len() < 2 {
                continue;
            }
            // make two candidates dependent
            let mut bad = state.clone();
            let (a, b) = (live[live.len() - 2], live[live.len() - 1]);
            bad.candidates[a] = bad.candidates[b].clone();
            let cert = verify_direct_sum(&bad, &ctx, &mut rng).unwrap();
            assert!(!cert.ok, "dependent candidates must not certify");
            return;
        }
        panic!("never saw a state with two live candidates");
    }

    #[test]
    fn sylow_generators_match_oracle() {
        let mut rng = ChaCha12Rng::seed_from_u64(63);
        for (p, f, n) in crate::oracle::tests::zoo() {
            let ctx = zoo_ctx(p, &f, n, &mut rng);
            let oracle = EnumeratedGroup::enumerate(ctx.curve()).unwrap();
            for ell in qualifying_primes(&ctx) {
                let result = sylow_generators(&ell, &ctx, &mut rng).unwrap();
                let size = ctx.sylow_order(&ell).unwrap();
                let product: BigUint = result.orders.iter().product();
                assert_eq!(product, size);
                let gens: Vec<_> = result
                    .generators
                    .iter()
                    .map(|d| oracle.from_mumford(d))
                    .collect();
                assert_eq!(BigUint::from(oracle.subgroup_span(&gens).unwrap()), size);
            }
        }
    }

    #[test]
    fn m_torsion_spans_the_full_torsion_subgroup() {
        let mut rng = ChaCha12Rng::seed_from_u64(64);
        for (p, f, n) in crate::oracle::tests::zoo() {
            let ctx = zoo_ctx(p, &f, n, &mut rng);
            let oracle = EnumeratedGroup::enumerate(ctx.curve()).unwrap();
            let primes = qualifying_primes(&ctx);
            let result = m_torsion_generators(&ctx, &primes, &mut rng).unwrap();
            let m = torsion_bound(&ctx);
            assert_eq!(result.target, StructureTarget::MTorsion { m: m.clone() });
            let m_u64: u64 = (&m).try_into().unwrap();
            let torsion_size = oracle.torsion_subgroup(m_u64).len() as u64;
            let gens: Vec<_> = result
                .generators
                .iter()
                .map(|d| oracle.from_mumford(d))
                .collect();
            let span = oracle.subgroup_span(&gens).unwrap();
            assert_eq!(span, torsion_size, "p = {p}");
            // orders multiply across primes and form a divisibility chain
            let product: BigUint = result.orders.iter().product();
            assert_eq!(product, BigUint::from(torsion_size));
            for w in result.orders.windows(2) {
                assert!((&w[1] % &w[0]).is_zero(), "orders: {:?}", result.orders);
            }
        }
    }

    #[test]
    fn m_torsion_with_no_primes_is_trivial() {
        let mut rng = ChaCha12Rng::seed_from_u64(65);
        let ctx = zoo_ctx(3, &[1, 2, 0, 0, 0, 1], 29, &mut rng);
        let result = m_torsion_generators(&ctx, &[], &mut rng).unwrap();
        assert!(result.generators.iter().all(|g| g.is_identity()));
        assert_eq!(result.target, StructureTarget::MTorsion { m: big(1) });
    }

    #[test]
    fn single_prime_m_torsion_equals_sylow() {
        let mut rng = ChaCha12Rng::seed_from_u64(66);
        let ctx = zoo_ctx(7, &[3, 1, 0, 0, 0, 1], 81, &mut rng);
        let result = m_torsion_generators(&ctx, &[big(3)], &mut rng).unwrap();
        let product: BigUint = result.orders.iter().product();
        assert_eq!(product, big(81));
    }

    #[test]
    fn rejects_unusable_primes() {
        let mut rng = ChaCha12Rng::seed_from_u64(67);
        // N = 36 over F_5: 3 | N but 3 does not divide p - 1
        let ctx = zoo_ctx(5, &[1, 1, 0, 0, 0, 1], 36, &mut rng);
        assert!(matches!(
            diagonalize_sylow(&big(3), &ctx, &mut rng),
            Err(StructureError::PrimeNotUsable(_))
        ));
        assert!(matches!(
            m_torsion_generators(&ctx, &[big(3)], &mut rng),
            Err(StructureError::PrimeNotUsable(_))
        ));
        // 7 divides neither
        assert!(matches!(
            diagonalize_sylow(&big(7), &ctx, &mut rng),
            Err(StructureError::PrimeNotUsable(_))
        ));
    }

    #[test]
    fn certify_accepts_honest_and_rejects_tampered() {
        let mut rng = ChaCha12Rng::seed_from_u64(68);
        let ctx = zoo_ctx(11, &[0, 2, 5, 2, 1, 1], 128, &mut rng);
        let oracle = EnumeratedGroup::enumerate(ctx.curve()).unwrap();
        let two = big(2);
        let result = sylow_generators(&two, &ctx, &mut rng).unwrap();
        let cert = certify_independence(&result.generators, &two, &ctx, &mut rng).unwrap();
        assert!(cert.ok);
        // tamper: fold one generator into another; the set becomes dependent
        let live: Vec<usize> = (0..4)
            .filter(|&i| !result.generators[i].is_identity())
            .collect();
        assert!(live.len() >= 2);
        let mut tampered = result.generators.clone();
        let (a, b) = (live[0], live[1]);
        tampered[a] = ctx.add(&tampered[a], &tampered[b]);
        tampered[b] = tampered[a].clone();
        let cert = certify_independence(&tampered, &two, &ctx, &mut rng).unwrap();
        assert!(!cert.ok);
        // cross-check dependence with the oracle
        let gens: Vec<_> = tampered.iter().map(|d| oracle.from_mumford(d)).collect();
        let span = oracle.subgroup_span(&gens).unwrap();
        let product: BigUint = tampered.iter().map(|d| ctx.element_order(d)).product();
        assert!(BigUint::from(span) < product);
    }

    #[test]
    fn all_zero_state_certifies_vacuously() {
        let mut rng = ChaCha12Rng::seed_from_u64(69);
        let ctx = zoo_ctx(5, &[1, 1, 0, 0, 0, 1], 36, &mut rng);
        let state = DiagonalizationState {
            ell: big(2),
            candidates: std::array::from_fn(|_| ctx.identity()),
            probes: std::array::from_fn(|_| ctx.random_element(&mut rng)),
            orders: std::array::from_fn(|_| BigUint::one()),
            nu: None,
            lambda0: BigUint::one(),
            lambda: BigUint::one(),
            zeta: None,
            alpha: Default::default(),
        };
        let cert = verify_direct_sum(&state, &ctx, &mut rng).unwrap();
        assert!(cert.ok);
        assert!(cert.live.is_empty());
    }

    #[test]
    fn deterministic_under_seed() {
        for seed in [1u64, 77, 4096] {
            let run = |seed: u64| {
                let mut rng = ChaCha12Rng::seed_from_u64(seed);
                let ctx = zoo_ctx(13, &[3, 0, 0, 1, 0, 1], 192, &mut rng);
                let primes = qualifying_primes(&ctx);
                let result = m_torsion_generators(&ctx, &primes, &mut rng).unwrap();
                (result.generators.clone(), result.orders.clone())
            };
            assert_eq!(run(seed), run(seed));
        }
    }
}
