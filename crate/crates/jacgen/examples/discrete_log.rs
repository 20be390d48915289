//! Discrete logarithms in smooth-order subgroups of `F_p^x` with
//! Pohlig-Hellman, the piece that turns pairing values into exponents.
//!
//! ```bash
//! cargo run --example discrete_log
//! ```

use num_bigint::BigUint;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;

use jacgen::arith::factor_u64;
use jacgen::dlp::{pohlig_hellman, DlogInstance};
use jacgen::field::Field;

fn main() {
    // p - 1 = 2^18 * 3, so F_p^x has a large smooth subgroup
    let p = 786_433u64;
    let field = Field::new(BigUint::from(p)).unwrap();
    let mut rng = ChaCha12Rng::seed_from_u64(4);

    let lambda = 786_432u64; // the full multiplicative group
    let factors: Vec<(BigUint, u32)> = factor_u64(lambda)
        .into_iter()
        .map(|(q, e)| (BigUint::from(q), e))
        .collect();
    println!("p = {p}, lambda = {lambda} = {factors:?}");

    let zeta = field
        .primitive_root_of_unity(&BigUint::from(lambda), &factors, &mut rng)
        .unwrap();
    println!("generator zeta = {zeta}");

    for _ in 0..5 {
        let alpha = BigUint::from(rng.gen_range(0..lambda));
        let target = zeta.pow(&alpha);
        let inst = DlogInstance::new(zeta.clone(), target.clone(), factors.clone());
        let solved = pohlig_hellman(&inst).unwrap();
        println!("log_zeta({target}) = {solved}");
        assert_eq!(solved, alpha);
    }

    // targets outside the subgroup are detected, not mis-solved
    let small = field
        .primitive_root_of_unity(&BigUint::from(3u32), &[(BigUint::from(3u32), 1)], &mut rng)
        .unwrap();
    let inst = DlogInstance::new(
        zeta.pow(&BigUint::from(3u32)), // order lambda / 3
        small,
        factor_u64(lambda / 3)
            .into_iter()
            .map(|(q, e)| (BigUint::from(q), e))
            .collect(),
    );
    println!(
        "\norder-3 target vs index-3 subgroup: {:?}",
        pohlig_hellman(&inst)
    );
}
