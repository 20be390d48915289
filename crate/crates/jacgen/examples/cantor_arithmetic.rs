//! Divisor class arithmetic on a genus-2 Jacobian: Mumford pairs,
//! Cantor addition, negation, scalar multiples and element orders.
//!
//! ```bash
//! cargo run --example cantor_arithmetic
//! ```

use num_bigint::BigUint;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;

use jacgen::jacobian::{CurveParams, GroupContext};

fn main() {
    // y^2 = x^5 + x^3 + 3 over F_13, with |Jac| = 192 = 2^6 * 3
    let p = BigUint::from(13u32);
    let coeffs: Vec<BigUint> = [3u32, 0, 0, 1, 0, 1].map(BigUint::from).to_vec();
    let curve = CurveParams::new(p, &coeffs).expect("valid curve");
    println!("curve: {curve:?}");

    let mut rng = ChaCha12Rng::seed_from_u64(1);
    let ctx = GroupContext::with_computed_factors(curve, BigUint::from(192u32), &mut rng)
        .expect("192 is the group order");
    println!(
        "group order N = {} = {:?}",
        ctx.order(),
        ctx.order_factors()
    );

    // a divisor from an explicit point: f(0) = 3 = 4^2 mod 13, so (0, 4) is on the curve
    let field = ctx.field().clone();
    let point = ctx
        .curve()
        .point_divisor(&field.from_u64(0), &field.from_u64(4))
        .expect("(0, 4) lies on the curve");
    println!("\npoint class        d = {point}");
    println!("negation          -d = {}", ctx.negate(&point));
    println!("double           2*d = {}", ctx.add(&point, &point));
    println!(
        "scalar multiple 50*d = {}",
        ctx.scalar_mul(&BigUint::from(50u32), &point)
    );
    println!("order of d           = {}", ctx.element_order(&point));

    // random sampling and the group laws
    let a = ctx.random_element(&mut rng);
    let b = ctx.random_element(&mut rng);
    println!("\nrandom a = {a}");
    println!("random b = {b}");
    println!("a + b    = {}", ctx.add(&a, &b));
    assert_eq!(ctx.add(&a, &b), ctx.add(&b, &a));
    assert!(ctx.add(&a, &ctx.negate(&a)).is_identity());
    assert!(ctx.scalar_mul(ctx.order(), &a).is_identity(), "Lagrange");
    println!("\ncommutativity, inverses and N*a = 0 all check out");

    // the projection into a Sylow subgroup
    let two = BigUint::from(2u32);
    let projected = ctx.project_to_sylow(&two, &a).unwrap();
    println!(
        "Sylow-2 projection of a: {projected} (order {})",
        ctx.element_order(&projected)
    );
}
