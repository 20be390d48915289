//! The tame Tate pairing: values in the roots of unity, bilinearity in
//! both arguments, and invariance under shifts of the second argument
//! by lambda-multiples.
//!
//! ```bash
//! cargo run --example tate_pairing
//! ```

use num_bigint::BigUint;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;

use jacgen::jacobian::{CurveParams, GroupContext, MumfordDivisor};
use jacgen::pairing::tame_tate;

fn main() {
    // y^2 = x^5 + x + 3 over F_7: the Jacobian is the Sylow-3 group of order 81
    let coeffs: Vec<BigUint> = [3u32, 1, 0, 0, 0, 1].map(BigUint::from).to_vec();
    let curve = CurveParams::new(BigUint::from(7u32), &coeffs).expect("valid curve");
    let mut rng = ChaCha12Rng::seed_from_u64(3);
    let ctx = GroupContext::with_computed_factors(curve, BigUint::from(81u32), &mut rng)
        .expect("group order 81");

    let lambda = BigUint::from(3u32); // 3 divides both N and p - 1
    let torsion = |rng: &mut ChaCha12Rng| -> MumfordDivisor {
        let x = ctx.random_element(rng);
        ctx.scalar_mul(&(ctx.order() / &lambda), &x)
    };

    let g = torsion(&mut rng);
    let h = ctx.random_element(&mut rng);
    let value = tame_tate(&ctx, &g, &h, &lambda, &mut rng).unwrap();
    println!("g = {g}");
    println!("h = {h}");
    println!("tau_3(g, h) = {} (a cube root of unity)", value.value());
    assert!(value.value().pow(&lambda).is_one());

    // bilinearity in the first argument
    let g2 = torsion(&mut rng);
    let sum = tame_tate(&ctx, &ctx.add(&g, &g2), &h, &lambda, &mut rng).unwrap();
    let t2 = tame_tate(&ctx, &g2, &h, &lambda, &mut rng).unwrap();
    println!("\ntau(g + g', h)       = {}", sum.value());
    println!("tau(g, h) tau(g', h) = {}", (value.value() * t2.value()));
    assert_eq!(sum.value(), &(value.value() * t2.value()));

    // the second argument only matters modulo lambda * Gamma
    let r = ctx.random_element(&mut rng);
    let shifted = ctx.add(&h, &ctx.scalar_mul(&lambda, &r));
    let again = tame_tate(&ctx, &g, &shifted, &lambda, &mut rng).unwrap();
    println!("\ntau(g, h + 3r) = {} (unchanged)", again.value());
    assert_eq!(value, again);

    // the identity pairs trivially with everything
    let trivial = tame_tate(&ctx, &ctx.identity(), &h, &lambda, &mut rng).unwrap();
    assert!(trivial.is_trivial());
    println!("tau(0, h)      = {}", trivial.value());
}
