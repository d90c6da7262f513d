//! End-to-end checks, one test per numbered criterion. Each prints a
//! single summary line on success; a panic message marks the failing
//! criterion otherwise. Run with --nocapture to see the lines.

use caloop::construct::{
    beta_loop, example1_loop, example2_loop, hora_jed_witness, lie_to_loop, phi_from_beta,
    predicted_center, random_beta_map, random_delta, random_hora_jed, u_isomorphism_check,
    validate_phi_family, BetaMap, DEFAULT_ORDER_CAP,
};
use caloop::formats::loop_from_cayley;
use caloop::gf2::{BitMatrix, BitVector, FieldF2m};
use caloop::lie::{Catalog, LieAlgebraF2, W2PlusMethod};
use caloop::loops::{AutomorphicMethod, FiniteLoop, SplitOutcome, DEFAULT_CLOSURE_BUDGET};
use caloop::search::{
    dense_table_from_pattern, enumerate_flag_nilpotent, sample_flag_nilpotent, table_jacobi_ok,
    table_to_algebra,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::Value;
use std::process::Command;
use std::time::{Duration, Instant};

fn run_cli(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_caloop"))
        .args(args)
        .output()
        .expect("spawn caloop");
    (
        out.status.code().expect("exit code"),
        String::from_utf8(out.stdout).expect("utf8 stdout"),
        String::from_utf8(out.stderr).expect("utf8 stderr"),
    )
}

fn as_u16s(v: &Value) -> Vec<u16> {
    v.as_array()
        .expect("array")
        .iter()
        .map(|x| x.as_u64().unwrap() as u16)
        .collect()
}

const T5_ROWS: [[u16; 5]; 5] = [
    [0, 1, 2, 3, 4],
    [1, 0, 3, 4, 2],
    [2, 3, 4, 0, 1],
    [3, 4, 1, 2, 0],
    [4, 2, 0, 1, 3],
];

fn t5() -> FiniteLoop {
    let table: Vec<Vec<u16>> = T5_ROWS.iter().map(|r| r.to_vec()).collect();
    FiniteLoop::from_table(&table).expect("T5 is a loop")
}

/// The shared corpus for the beta-map criteria: 100 seeded instances
/// with k_dim <= 4 and h_dim <= 3.
fn beta_corpus() -> Vec<BetaMap> {
    let mut rng = ChaCha8Rng::seed_from_u64(1003);
    (0..100)
        .map(|_| {
            let k = rng.gen_range(1..=4);
            let h = rng.gen_range(1..=3);
            random_beta_map(k, h, &mut rng)
        })
        .collect()
}

fn catalog_algebras() -> Vec<LieAlgebraF2> {
    let mut out = vec![
        LieAlgebraF2::catalog_make(Catalog::Abelian(1)).unwrap(),
        LieAlgebraF2::catalog_make(Catalog::Abelian(2)).unwrap(),
        LieAlgebraF2::catalog_make(Catalog::Abelian(3)).unwrap(),
        LieAlgebraF2::catalog_make(Catalog::Abelian(4)).unwrap(),
        LieAlgebraF2::catalog_make(Catalog::Heisenberg).unwrap(),
    ];
    for (gens, class) in [(2, 2), (2, 3), (3, 2), (2, 4)] {
        out.push(LieAlgebraF2::catalog_make(Catalog::FreeNilpotent { gens, class }).unwrap());
    }
    out
}

#[test]
fn criterion_01_example2_smoke() {
    let start = Instant::now();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("ex2.cayley");
    let p = path.to_str().unwrap();

    let (code, _, _) = run_cli(&["construct", "example2", "--m", "2", "--d", "1", "-o", p]);
    assert_eq!(code, 0);
    let (code, stdout, _) = run_cli(&["loop", "analyze", p, "--json"]);
    assert_eq!(code, 0, "an automorphic loop analyzes with exit 0");

    let r: Value = serde_json::from_str(&stdout).unwrap();
    assert_eq!(r["order"], 8);
    assert_eq!(r["commutative"], true);
    assert_eq!(r["exponent2"], true);
    assert_eq!(r["automorphic"], true);
    assert_eq!(r["associative"], false);
    assert_eq!(as_u16s(&r["center"]), vec![0]);
    let n_mu = as_u16s(&r["nucleus_middle"]);
    assert_eq!(n_mu.len(), 4);
    let k_part = as_u16s(&r["split"]["K"]);
    let h_part = as_u16s(&r["split"]["H"]);
    assert_eq!(k_part, n_mu, "the split K part is the middle nucleus");
    assert_eq!(h_part.len(), 2);

    let elapsed = start.elapsed();
    assert!(elapsed < Duration::from_secs(1), "took {elapsed:?}");
    println!("criterion 01: pass (order 8 smoke, {elapsed:?})");
}

#[test]
fn criterion_02_order64_profiles() {
    let check_profile = |q: &FiniteLoop, what: &str| {
        let start = Instant::now();
        let p = q.predicates();
        assert!(p.commutative && p.exponent2 && !p.associative, "{what}");
        assert!(q.is_automorphic(AutomorphicMethod::Direct), "{what}");
        assert_eq!(q.nuclei_and_center().center, vec![0], "{what}");
        let elapsed = start.elapsed();
        assert!(elapsed < Duration::from_secs(5), "{what} took {elapsed:?}");
    };

    let (q, _) = example2_loop(4, 2).unwrap();
    assert_eq!(q.order(), 64);
    check_profile(&q, "example 2 at (4,2)");

    let f = FieldF2m::new(4).unwrap();
    for seed in [1, 2, 3] {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let images = random_delta(&f, 2, &mut rng);
        // Injective linear delta avoiding 1: no combination of the two
        // basis images lands on 0 or 1.
        assert_ne!(images[0], images[1]);
        for combo in [images[0], images[1], images[0] ^ images[1]] {
            assert!(combo != 0 && combo != 1);
        }
        let (q, _) = example1_loop(&f, &images).unwrap();
        assert_eq!(q.order(), 64);
        check_profile(&q, &format!("example 1 seed {seed}"));
    }
    println!("criterion 02: pass (example 2 at order 64, example 1 for 3 seeds)");
}

#[test]
fn criterion_03_u_isomorphism_and_phi_validation() {
    let start = Instant::now();
    let corpus = beta_corpus();
    assert_eq!(corpus.len(), 100);
    for b in &corpus {
        let phi = phi_from_beta(b).unwrap();
        validate_phi_family(&phi).unwrap();
        u_isomorphism_check(b).unwrap();
    }
    let elapsed = start.elapsed();
    assert!(elapsed < Duration::from_secs(60), "took {elapsed:?}");
    println!("criterion 03: pass (100 beta maps, {elapsed:?})");
}

#[test]
fn criterion_04_center_formula() {
    for (idx, b) in beta_corpus().iter().enumerate() {
        let predicted = predicted_center(b).elements(b.k_dim());
        let brute = beta_loop(b).unwrap().nuclei_and_center().center;
        assert_eq!(predicted, brute, "instance {idx}");
    }

    // Nilpotent partial-center case: beta(e0) is the 3x3 shift, whose
    // square is nonzero, so only ker(B^2) of the K part is central.
    let shift = BitMatrix::from_rows(vec![
        BitVector::from_indices(3, &[1]),
        BitVector::from_indices(3, &[2]),
        BitVector::zeros(3),
    ]);
    let b = BetaMap::new(3, 1, vec![shift]).unwrap();
    let q = beta_loop(&b).unwrap();
    assert!(!q.predicates().associative);
    let predicted = predicted_center(&b).elements(3);
    assert_eq!(predicted.len(), 4);
    assert_eq!(predicted, q.nuclei_and_center().center);
    println!("criterion 04: pass (100 instances + partial-center case, |Z| = 4)");
}

#[test]
fn criterion_05_middle_nucleus_annihilator() {
    let mut checked = 0usize;
    let mut algebras: Vec<LieAlgebraF2> = Vec::new();
    for n in 2..=5 {
        algebras.extend(enumerate_flag_nilpotent(n).unwrap());
    }
    algebras.extend(catalog_algebras());
    for l in &algebras {
        let q = lie_to_loop(l, DEFAULT_ORDER_CAP).unwrap();
        let brute: Vec<u64> = q.middle_nucleus().iter().map(|&x| x as u64).collect();
        assert_eq!(brute, l.bracket_annihilator(), "dim {}", l.dim());
        checked += 1;
    }
    assert!(checked >= 467);
    println!("criterion 05: pass ({checked} loops, N_mu = bracket annihilator)");
}

#[test]
fn criterion_06_scan_problem1_slice() {
    let start = Instant::now();
    let (code, stdout, _) = run_cli(&["scan", "problem1", "--dim", "3..5", "--exhaustive", "--json"]);
    assert_eq!(code, 0, "no counterexamples at dims 3..5");
    let reports: Value = serde_json::from_str(&stdout).unwrap();
    let reports = reports.as_array().unwrap();
    assert_eq!(reports.len(), 3);
    assert_eq!(reports[0]["candidates"], 2);
    assert_eq!(reports[1]["candidates"], 16);
    assert_eq!(reports[2]["candidates"], 1024);
    assert_eq!(reports[2]["jacobi_passed"], 448);
    for r in reports {
        assert_eq!(r["counterexamples"].as_array().unwrap().len(), 0);
        assert_eq!(r["consistent"], r["jacobi_passed"]);
    }
    let elapsed = start.elapsed();
    assert!(elapsed < Duration::from_secs(120), "took {elapsed:?}");

    let start6 = Instant::now();
    let (code, stdout, _) = run_cli(&["scan", "problem1", "--dim", "6", "--exhaustive", "--json"]);
    assert_eq!(code, 0, "no counterexamples at dim 6");
    let reports: Value = serde_json::from_str(&stdout).unwrap();
    let r = &reports.as_array().unwrap()[0];
    assert_eq!(r["candidates"], 1 << 20);
    assert_eq!(r["jacobi_passed"], 50176);
    assert_eq!(r["consistent"], 50176);
    assert_eq!(r["counterexamples"].as_array().unwrap().len(), 0);
    let elapsed6 = start6.elapsed();
    assert!(elapsed6 < Duration::from_secs(1800), "took {elapsed6:?}");
    println!("criterion 06: pass (dims 3..5 in {elapsed:?}, dim 6 in {elapsed6:?})");
}

#[test]
fn criterion_07_scan_nonsplit_dim5() {
    let start = Instant::now();
    let (code, stdout, _) = run_cli(&["scan", "nonsplit", "--dim", "5", "--exhaustive", "--json"]);
    assert_eq!(code, 1, "witness found is reported through the exit code");
    let reports: Value = serde_json::from_str(&stdout).unwrap();
    let r = &reports.as_array().unwrap()[0];
    let witnesses = r["witnesses"].as_array().unwrap();
    assert!(!witnesses.is_empty());
    assert_eq!(witnesses.len(), 48);

    // Re-verify the first witness from scratch.
    let q = loop_from_cayley(witnesses[0]["cayley"].as_str().unwrap()).unwrap();
    assert_eq!(q.order(), 32);
    let p = q.predicates();
    assert!(p.commutative && p.exponent2);
    assert!(q.is_automorphic(AutomorphicMethod::Direct));
    assert_eq!(q.middle_nucleus().len() * 4, q.order());
    assert!(matches!(
        q.nuclear_split(DEFAULT_CLOSURE_BUDGET).unwrap(),
        SplitOutcome::NonSplit(_)
    ));

    let elapsed = start.elapsed();
    assert!(elapsed < Duration::from_secs(600), "took {elapsed:?}");
    println!(
        "criterion 07: pass ({} nonsplit witnesses at dim 5, {elapsed:?})",
        witnesses.len()
    );
}

#[test]
fn criterion_08_automorphic_method_agreement() {
    let mut corpus: Vec<FiniteLoop> = Vec::new();
    for n in 2..=5 {
        for l in enumerate_flag_nilpotent(n).unwrap() {
            corpus.push(lie_to_loop(&l, DEFAULT_ORDER_CAP).unwrap());
        }
    }
    for l in sample_flag_nilpotent(6, 12000, 8).unwrap() {
        corpus.push(lie_to_loop(&l, DEFAULT_ORDER_CAP).unwrap());
    }

    corpus.push(example2_loop(2, 1).unwrap().0);
    corpus.push(example2_loop(3, 1).unwrap().0);
    corpus.push(example2_loop(4, 1).unwrap().0);
    corpus.push(example2_loop(4, 2).unwrap().0);
    let f = FieldF2m::new(4).unwrap();
    for seed in [1, 2, 3] {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let images = random_delta(&f, 2, &mut rng);
        corpus.push(example1_loop(&f, &images).unwrap().0);
    }
    for seed in 0..5 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (x, coeffs) = random_hora_jed(4, 2, &mut rng);
        corpus.push(hora_jed_witness(&x, &coeffs).unwrap().0);
    }
    for b in beta_corpus().iter().take(10) {
        corpus.push(beta_loop(b).unwrap());
    }
    corpus.push(t5());

    // Group tables: cyclic groups and S3.
    for n in 2..=8u16 {
        let table: Vec<Vec<u16>> = (0..n)
            .map(|i| (0..n).map(|j| (i + j) % n).collect())
            .collect();
        corpus.push(FiniteLoop::from_table(&table).unwrap());
    }
    let perms: [[u16; 3]; 6] = [
        [0, 1, 2],
        [1, 0, 2],
        [2, 1, 0],
        [0, 2, 1],
        [1, 2, 0],
        [2, 0, 1],
    ];
    let s3: Vec<Vec<u16>> = perms
        .iter()
        .map(|p| {
            perms
                .iter()
                .map(|q| {
                    let composed = [p[q[0] as usize], p[q[1] as usize], p[q[2] as usize]];
                    perms.iter().position(|r| *r == composed).unwrap() as u16
                })
                .collect()
        })
        .collect();
    corpus.push(FiniteLoop::from_table(&s3).unwrap());

    assert!(corpus.len() >= 1000, "corpus has {} loops", corpus.len());
    for (idx, q) in corpus.iter().enumerate() {
        assert_eq!(
            q.is_automorphic(AutomorphicMethod::Direct),
            q.is_automorphic(AutomorphicMethod::SectionConjugation),
            "loop {idx} of order {}",
            q.order()
        );
    }
    println!(
        "criterion 08: pass ({} loops, direct = section conjugation)",
        corpus.len()
    );
}

#[test]
fn criterion_09_t5_negative_control() {
    let q = t5();
    assert!(!q.predicates().associative);
    assert!(!q.is_automorphic(AutomorphicMethod::Direct));
    assert!(!q.is_automorphic(AutomorphicMethod::SectionConjugation));
    let gen = q
        .automorphic_failure(AutomorphicMethod::Direct)
        .expect("some inner generator fails");

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("t5.cayley");
    let rows: Vec<String> = T5_ROWS
        .iter()
        .map(|r| r.map(|x| x.to_string()).join(" "))
        .collect();
    std::fs::write(&path, format!("5\n{}\n", rows.join("\n"))).unwrap();
    let (code, _, _) = run_cli(&["loop", "analyze", path.to_str().unwrap()]);
    assert_eq!(code, 1);
    println!("criterion 09: pass (T5 valid, nonassociative, not automorphic; first failure {gen:?})");
}

#[test]
fn criterion_10_fixed_point_constructions() {
    for seed in 0..50u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let k = 3 + (seed % 3) as usize;
        let h = 1 + (seed % 2) as usize;
        let (x, coeffs) = random_hora_jed(k, h, &mut rng);
        assert!(x.iter().any(|m| !m.is_zero()), "seed {seed} gave X = 0");
        // Success certifies the derived phi family validated.
        let (q, a) = hora_jed_witness(&x, &coeffs).unwrap();
        assert!(!a.is_zero());
        let center = q.nuclei_and_center().center;
        assert!(center.len() > 1, "seed {seed}");
        assert!(center.contains(&(a.low_bits() as u16)), "seed {seed}");
    }
    println!("criterion 10: pass (50 constructions, nontrivial center, fixed vector central)");
}

#[test]
fn criterion_11_w2_certifications() {
    // Basis-quantified W2 against the all-elements quantifier, on every
    // bracket table of dim <= 4 that satisfies Jacobi.
    let start = Instant::now();
    let mut survivors = [0u64; 3];
    for n in 2..=4usize {
        let bits = n * (n * (n - 1) / 2);
        for pattern in 0..1u64 << bits {
            let m = dense_table_from_pattern(n, pattern);
            if !table_jacobi_ok(n, &m) {
                continue;
            }
            survivors[n - 2] += 1;
            let l = table_to_algebra(n, &m);
            assert_eq!(l.check_w2(), l.check_w2_elements(), "dim {n} pattern {pattern}");
        }
    }
    assert_eq!(survivors, [4, 120, 34336]);

    // Both W2+ implementations on everything the other criteria visit.
    let mut agreed = 0usize;
    let mut algebras: Vec<LieAlgebraF2> = Vec::new();
    for n in 2..=6 {
        algebras.extend(enumerate_flag_nilpotent(n).unwrap());
    }
    algebras.extend(catalog_algebras());
    for l in &algebras {
        assert_eq!(
            l.check_w2plus(W2PlusMethod::Direct),
            l.check_w2plus(W2PlusMethod::DerivedSeries)
        );
        agreed += 1;
    }
    let elapsed = start.elapsed();
    println!(
        "criterion 11: pass ({} dim<=4 tables elementwise, {agreed} W2+ agreements, {elapsed:?})",
        survivors.iter().sum::<u64>()
    );
}
