//! End-to-end tests of the command-line interface, exercising the curve
//! file format, divisor literals, exit codes and the JSON report.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use num_bigint::BigUint;

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name)
}

fn jacgen(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_jacgen"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

#[test]
fn generators_text_output() {
    let out = jacgen(&[
        "generators",
        fixture("f13_n192.curve").to_str().unwrap(),
        "--seed",
        "42",
    ]);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", stderr(&out));
    let text = stdout(&out);
    assert!(text.contains("m = 192"), "got: {text}");
    assert!(text.contains("gamma_1:"));
    assert!(text.contains("certificate: certified"));
    assert!(text.contains("op counts:"));
}

#[test]
fn generators_trivial_torsion() {
    // no prime of N = 29 divides p - 1 = 2, so m = 1
    let out = jacgen(&["generators", fixture("f3_cyclic29.curve").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("m = 1"), "got: {text}");
    assert!(text.contains("(u: 1; v: 0)"));
}

#[test]
fn generators_json_parses_and_verifies() {
    let dir = std::env::temp_dir().join("jacgen_cli_roundtrip");
    std::fs::create_dir_all(&dir).unwrap();
    let out = jacgen(&[
        "generators",
        fixture("f5_n36.curve").to_str().unwrap(),
        "--json",
        "--seed",
        "7",
    ]);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", stderr(&out));
    let report = jacgen::report::RunReport::parse(&stdout(&out)).unwrap();
    assert_eq!(report.m, "4"); // only l = 2 divides p - 1 = 4
    assert_eq!(report.seed, 7);
    let report_path = dir.join("f5_report.json");
    std::fs::write(&report_path, stdout(&out)).unwrap();
    let verify = jacgen(&[
        "verify",
        fixture("f5_n36.curve").to_str().unwrap(),
        report_path.to_str().unwrap(),
    ]);
    assert_eq!(
        verify.status.code(),
        Some(0),
        "stdout: {} stderr: {}",
        stdout(&verify),
        stderr(&verify)
    );
    assert!(stdout(&verify).contains("CERTIFIED"));
}

#[test]
fn malformed_file_reports_line() {
    let dir = std::env::temp_dir().join("jacgen_cli_malformed");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("bad.curve");
    std::fs::write(&path, "p = 13\nf = 3,0,0,1,0,1\nwhat\nN = 192\n").unwrap();
    let out = jacgen(&["generators", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("line 3"), "got: {}", stderr(&out));
}

#[test]
fn wrong_group_order_rejected() {
    let dir = std::env::temp_dir().join("jacgen_cli_wrong_n");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("wrong_n.curve");
    // N off by one: the Lagrange spot check must catch it
    std::fs::write(&path, "p = 13\nf = 3,0,0,1,0,1\nN = 193\n").unwrap();
    let out = jacgen(&["generators", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(
        stderr(&out).contains("group order"),
        "got: {}",
        stderr(&out)
    );
}

#[test]
fn pair_identity_gives_one() {
    let out = jacgen(&[
        "pair",
        fixture("f5_n36.curve").to_str().unwrap(),
        "u=1;v=0",
        "u=3,1;v=0",
        "--lambda",
        "2",
    ]);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", stderr(&out));
    assert!(stdout(&out).contains("= 1"), "got: {}", stdout(&out));
}

#[test]
fn pair_rejects_bad_lambda() {
    // 3 divides N = 36 but not p - 1 = 4
    let out = jacgen(&[
        "pair",
        fixture("f5_n36.curve").to_str().unwrap(),
        "u=1;v=0",
        "u=3,1;v=0",
        "--lambda",
        "3",
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("does not divide p - 1"));
}

#[test]
fn pair_rejects_non_torsion_and_bad_divisors() {
    // (x, 2) fails the Mumford condition: f(0) = 1 but v(0)^2 = 4
    let out = jacgen(&[
        "pair",
        fixture("f5_n36.curve").to_str().unwrap(),
        "u=0,1;v=2",
        "u=1;v=0",
        "--lambda",
        "2",
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("not a reduced divisor"));
}

#[test]
fn pair_bilinearity_through_the_cli() {
    // over F_5 with f = x^5 + x + 1 = (x-2)(x^2+x+1)(x^2+x+2), the
    // rational 2-torsion is {0, (x-2,0), (x^2+x+1,0), (x^2+x+2,0)} and
    // the third element is the sum of the first two; with zeta = 4 (the
    // element of order 2) the pairing exponents must add up
    let curve = fixture("f5_n36.curve");
    let curve = curve.to_str().unwrap();
    let h = "u=0,1,1;v=1,4"; // the class of the points (0,1) and (4,2)
    let tau = |g: &str| -> BigUint {
        let out = jacgen(&["pair", curve, g, h, "--lambda", "2", "--seed", "99"]);
        assert_eq!(out.status.code(), Some(0), "stderr: {}", stderr(&out));
        let text = stdout(&out);
        let value = text
            .lines()
            .next()
            .unwrap()
            .rsplit('=')
            .next()
            .unwrap()
            .trim();
        value.parse().unwrap()
    };
    let t1 = tau("u=1,1,1;v=0");
    let t2 = tau("u=2,1,1;v=0");
    let t3 = tau("u=3,1;v=0");
    assert_eq!((t1 * t2) % 5u32, t3 % 5u32, "tau(g1)tau(g2) = tau(g1+g2)");
}

#[test]
fn pair_prints_discrete_log() {
    let out = jacgen(&[
        "pair",
        fixture("f5_n36.curve").to_str().unwrap(),
        "u=1,1,1;v=0",
        "u=0,1,1;v=1,4",
        "--lambda",
        "2",
        "--zeta",
        "4",
    ]);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", stderr(&out));
    let text = stdout(&out);
    assert!(text.contains("log_zeta = "), "got: {text}");
    // zeta of the wrong order is rejected
    let out = jacgen(&[
        "pair",
        fixture("f5_n36.curve").to_str().unwrap(),
        "u=1,1,1;v=0",
        "u=0,1,1;v=1,4",
        "--lambda",
        "2",
        "--zeta",
        "2",
    ]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn verify_rejects_tampered_generators() {
    use jacgen::report::RunReport;
    use rand::SeedableRng;

    let dir = std::env::temp_dir().join("jacgen_cli_tamper");
    std::fs::create_dir_all(&dir).unwrap();
    let out = jacgen(&[
        "generators",
        fixture("f11_full2torsion.curve").to_str().unwrap(),
        "--json",
        "--seed",
        "11",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let mut report = RunReport::parse(&stdout(&out)).unwrap();

    // rebuild the context to compute gamma_2 + gamma_3 honestly
    let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(0);
    let text = std::fs::read_to_string(fixture("f11_full2torsion.curve")).unwrap();
    let ctx = jacgen::curvefile::CurveFile::parse(&text)
        .unwrap()
        .into_context(&mut rng)
        .unwrap();
    let divisors = report.generator_divisors(ctx.field()).unwrap();
    // fold gamma_3 into gamma_2 and duplicate: the set becomes dependent
    let tampered = ctx.add(&divisors[1], &divisors[2]);
    let order = ctx.element_order(&tampered);
    report.generators[1] = jacgen::report::divisor_entry(&tampered, &order);
    report.generators[2] = jacgen::report::divisor_entry(&tampered, &order);

    let path = dir.join("tampered.json");
    std::fs::write(&path, report.to_json()).unwrap();
    let verify = jacgen(&[
        "verify",
        fixture("f11_full2torsion.curve").to_str().unwrap(),
        path.to_str().unwrap(),
    ]);
    assert_eq!(verify.status.code(), Some(3), "stdout: {}", stdout(&verify));
    assert!(stdout(&verify).contains("REJECTED"));
}

#[test]
fn verify_rejects_identity_only_set() {
    use jacgen::report::{CertificateReport, CurveEcho, GeneratorEntry, RunReport, Timings};
    let dir = std::env::temp_dir().join("jacgen_cli_identity_only");
    std::fs::create_dir_all(&dir).unwrap();
    let identity = GeneratorEntry {
        u: vec!["1".into()],
        v: vec![],
        order: "1".into(),
    };
    let report = RunReport {
        curve: CurveEcho {
            p: "5".into(),
            f: vec![
                "1".into(),
                "1".into(),
                "0".into(),
                "0".into(),
                "0".into(),
                "1".into(),
            ],
            model: "monic_quintic".into(),
            n: "36".into(),
        },
        m: "4".into(),
        generators: vec![
            identity.clone(),
            identity.clone(),
            identity.clone(),
            identity,
        ],
        certificate: CertificateReport {
            status: "certified".into(),
            per_prime: vec![],
        },
        seed: 0,
        timings: Timings {
            orders: 0,
            scalar_muls: 0,
            pairings: 0,
            dlogs: 0,
        },
    };
    let path = dir.join("identity.json");
    std::fs::write(&path, report.to_json()).unwrap();
    let verify = jacgen(&[
        "verify",
        fixture("f5_n36.curve").to_str().unwrap(),
        path.to_str().unwrap(),
    ]);
    assert_eq!(verify.status.code(), Some(3));
    assert!(stdout(&verify).contains("span too small"));
}

#[test]
fn primes_override_restricts_the_torsion() {
    let out = jacgen(&[
        "generators",
        fixture("f13_n192.curve").to_str().unwrap(),
        "--primes",
        "3",
        "--json",
    ]);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", stderr(&out));
    let report = jacgen::report::RunReport::parse(&stdout(&out)).unwrap();
    assert_eq!(report.m, "3");
    let orders: Vec<&str> = report.generators.iter().map(|g| g.order.as_str()).collect();
    assert!(orders.contains(&"3"));
}

#[test]
fn byte_identical_reports_under_fixed_seed() {
    let run = || {
        let out = jacgen(&[
            "generators",
            fixture("f13_n192.curve").to_str().unwrap(),
            "--json",
            "--seed",
            "31337",
        ]);
        assert_eq!(out.status.code(), Some(0));
        out.stdout
    };
    assert_eq!(run(), run());
}
