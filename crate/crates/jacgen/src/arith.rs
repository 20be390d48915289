//! Integer helpers shared across the crate: primality, factoring,
//! modular inverses and valuations on arbitrary-precision integers.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use rand::Rng;

/// Uniform sample in `[0, bound)` by rejection. `bound` must be nonzero.
pub fn random_below<R: Rng + ?Sized>(rng: &mut R, bound: &BigUint) -> BigUint {
    assert!(!bound.is_zero(), "random_below: zero bound");
    let bits = bound.bits();
    let bytes = bits.div_ceil(8) as usize;
    let top_mask = if bits.is_multiple_of(8) {
        0xff
    } else {
        (1u16 << (bits % 8)) as u8 - 1
    };
    let mut buf = vec![0u8; bytes];
    loop {
        rng.fill_bytes(&mut buf);
        buf[0] &= top_mask;
        let candidate = BigUint::from_bytes_be(&buf);
        if &candidate < bound {
            return candidate;
        }
    }
}

/// Inverse of `a` modulo `m`, if `gcd(a, m) = 1`.
pub fn mod_inverse(a: &BigUint, m: &BigUint) -> Option<BigUint> {
    if m.is_one() {
        return Some(BigUint::zero());
    }
    let a = BigInt::from(a.clone());
    let m_int = BigInt::from(m.clone());
    let ext = a.extended_gcd(&m_int);
    if !ext.gcd.is_one() {
        return None;
    }
    let mut x = ext.x % &m_int;
    if x.is_negative() {
        x += &m_int;
    }
    Some(x.to_biguint().expect("non-negative after reduction"))
}

/// `v_q(n)`: the exponent of `q` in `n`. `n` must be nonzero, `q > 1`.
pub fn valuation(n: &BigUint, q: &BigUint) -> u32 {
    assert!(!n.is_zero());
    let mut n = n.clone();
    let mut v = 0u32;
    while (&n % q).is_zero() {
        n /= q;
        v += 1;
    }
    v
}

/// Miller-Rabin probable-prime test. Deterministic for `n < 2^64`
/// (fixed witness set), 40 pseudorandom witnesses above that.
pub fn is_probable_prime(n: &BigUint) -> bool {
    let two = BigUint::from(2u32);
    if n < &two {
        return false;
    }
    let small: [u32; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    for &q in &small {
        let q = BigUint::from(q);
        if n == &q {
            return true;
        }
        if (n % &q).is_zero() {
            return false;
        }
    }
    let n_minus_1 = n - 1u32;
    let s = valuation(&n_minus_1, &two);
    let d = &n_minus_1 >> s;
    let witness = |a: &BigUint| -> bool {
        // true = composite witness found
        let mut x = a.modpow(&d, n);
        if x.is_one() || x == n_minus_1 {
            return false;
        }
        for _ in 1..s {
            x = x.modpow(&two, n);
            if x == n_minus_1 {
                return false;
            }
        }
        true
    };
    if n.bits() <= 64 {
        small.iter().all(|&a| !witness(&BigUint::from(a)))
    } else {
        // fixed-seed witnesses keep the test deterministic per input
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(0x6a63_6765_6e21);
        (0..40).all(|_| {
            let a = random_below(&mut rng, &(n - 3u32)) + 2u32;
            !witness(&a)
        })
    }
}

fn pollard_rho(n: u128, seed: u64) -> u128 {
    // Brent's cycle variant; n must be odd composite, not a prime power handled outside
    let mul = |a: u128, b: u128| -> u128 { (a % n).wrapping_mul(b % n) % n };
    let g = |x: u128, c: u128| (mul(x, x) + c) % n;
    let mut c = seed as u128 % n;
    loop {
        c = (c + 1) % n;
        if c == 0 {
            c = 1;
        }
        let mut x = 2u128;
        let mut y = 2u128;
        let mut d = 1u128;
        let mut saved = 1u128;
        let mut count = 0u32;
        while d == 1 {
            x = g(x, c);
            y = g(g(y, c), c);
            let diff = x.abs_diff(y);
            if diff == 0 {
                d = 0;
                break;
            }
            saved = mul(saved, diff);
            count += 1;
            if count.is_multiple_of(64) {
                d = gcd_u128(saved, n);
            }
        }
        if d == 1 || d == 0 {
            d = gcd_u128(saved, n);
        }
        if d > 1 && d < n {
            return d;
        }
        // unlucky constant, try another
    }
}

fn gcd_u128(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// Factor `n < 2^64` into sorted `(prime, exponent)` pairs.
/// Trial division for small primes, Pollard rho for the remainder.
pub fn factor_u64(n: u64) -> Vec<(u64, u32)> {
    let mut out: Vec<(u64, u32)> = Vec::new();
    let push = |q: u64, e: u32, out: &mut Vec<(u64, u32)>| {
        if let Some(entry) = out.iter_mut().find(|(p, _)| *p == q) {
            entry.1 += e;
        } else {
            out.push((q, e));
        }
    };
    let mut n = n as u128;
    for q in [2u128, 3, 5] {
        let mut e = 0;
        while n.is_multiple_of(q) {
            n /= q;
            e += 1;
        }
        if e > 0 {
            push(q as u64, e, &mut out);
        }
    }
    let mut q = 7u128;
    let wheel = [4u128, 2, 4, 2, 4, 6, 2, 6];
    let mut wi = 0;
    while q * q <= n && q < 100_000 {
        let mut e = 0;
        while n.is_multiple_of(q) {
            n /= q;
            e += 1;
        }
        if e > 0 {
            push(q as u64, e, &mut out);
        }
        q += wheel[wi];
        wi = (wi + 1) % wheel.len();
    }
    let mut stack = vec![n];
    while let Some(m) = stack.pop() {
        if m == 1 {
            continue;
        }
        if is_probable_prime(&BigUint::from(m as u64)) {
            push(m as u64, 1, &mut out);
            continue;
        }
        // rho can stall on perfect squares, split those directly
        let r = (m as f64).sqrt() as u128;
        let sq = (r.saturating_sub(1)..=r + 1).find(|c| c * c == m);
        if let Some(c) = sq {
            stack.push(c);
            stack.push(c);
        } else {
            let d = pollard_rho(m, 0xdead_beef);
            stack.push(d);
            stack.push(m / d);
        }
    }
    out.sort_unstable();
    out
}

/// Factor an arbitrary-precision integer, only attempted below `2^64`.
pub fn factor_biguint(n: &BigUint) -> Option<Vec<(BigUint, u32)>> {
    if n.is_zero() || n.bits() > 64 {
        return None;
    }
    let n64: u64 = n.try_into().ok()?;
    if n64 == 1 {
        return Some(Vec::new());
    }
    Some(
        factor_u64(n64)
            .into_iter()
            .map(|(q, e)| (BigUint::from(q), e))
            .collect(),
    )
}
