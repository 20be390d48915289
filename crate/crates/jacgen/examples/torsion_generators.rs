//! End to end: parse a curve file, compute certified generators of the
//! m-torsion subgroup, and emit the JSON report — the same path the
//! `jacgen generators` command takes. Runs both a tiny curve and a
//! curve over a 64-bit prime.
//!
//! ```bash
//! cargo run --example torsion_generators
//! ```

use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;

use jacgen::curvefile::CurveFile;
use jacgen::report::RunReport;
use jacgen::structure::{m_torsion_generators, qualifying_primes, torsion_bound};

const TINY: &str = include_str!("../tests/fixtures/f13_n192.curve");
const BIG: &str = include_str!("../tests/fixtures/smoke64.curve");

fn run(label: &str, text: &str, seed: u64) {
    println!("== {label} ==");
    let file = CurveFile::parse(text).expect("curve file parses");
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let ctx = file
        .clone()
        .into_context(&mut rng)
        .expect("curve validates");
    let primes = qualifying_primes(&ctx);
    println!("p = {}", file.p);
    println!("N = {}", ctx.order());
    println!("usable primes (dividing both N and p-1): {primes:?}");
    println!("m = {}", torsion_bound(&ctx));

    let result = m_torsion_generators(&ctx, &primes, &mut rng).expect("within budgets");
    for (i, (g, order)) in result.generators.iter().zip(&result.orders).enumerate() {
        println!("gamma_{}: {g}  order {order}", i + 1);
    }

    let m = torsion_bound(&ctx);
    let report = RunReport::from_result(&file, &ctx, &m, &result, seed);
    println!("certificate: {}", report.certificate.status);
    let t = &report.timings;
    println!(
        "work: {} orders, {} scalar multiples, {} pairings, {} dlogs\n",
        t.orders, t.scalar_muls, t.pairings, t.dlogs
    );
}

fn main() {
    run("F_13, N = 192", TINY, 1);
    run("64-bit prime, sextic model, N ~ 2^128", BIG, 2);
}
