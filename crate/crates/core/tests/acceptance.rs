//! Acceptance suite: one test per criterion, each printing a PASS line
//! with its measured values. Timing-limited criteria assert the wall
//! clock only in optimized builds; run with `cargo test --release --test
//! acceptance -- --nocapture` to see every line.

use std::collections::BTreeMap;
use std::time::Instant;

use num_traits::{One, Signed, Zero};

use homolab_core::betti::{
    incremental_betti, matrix_reduction_betti, ClassicalExactTester, InsertionOrder,
};
use homolab_core::chain::Chain;
use homolab_core::complex::{Simplex, SimplicialComplex};
use homolab_core::corpus;
use homolab_core::families;
use homolab_core::flow::{self, EnergyValue};
use homolab_core::linalg;
use homolab_core::maps;
use homolab_core::snf::{self, rat_to_f64, smith_normal_form};
use homolab_core::span::{self, SpanSimTester};
use homolab_core::spectra::{self, LaplacianKind, DEFAULT_ZERO_TOL};
use homolab_core::{Int, Rat};

fn rat(n: i64) -> Rat {
    Rat::from_integer(Int::from(n))
}

fn pass(criterion: &str, detail: &str) {
    println!("criterion {:<28} [PASS] {}", criterion, detail);
}

/// The witness-identity test set: every program here has at most ten
/// cells, so instances can be enumerated exhaustively.
fn witness_corpus() -> Vec<(String, SimplicialComplex, Chain)> {
    let mut out = Vec::new();
    out.push((
        "closed-triangle".to_string(),
        corpus::closed_simplex(2),
        corpus::boundary_chain(&[0, 1, 2]),
    ));
    out.push((
        "sphere-4".to_string(),
        corpus::tetra_boundary(),
        corpus::boundary_chain(&[0, 1, 2]),
    ));
    out.push(("wheel-6".to_string(), corpus::wheel(6), corpus::wheel_rim(6)));
    out.push((
        "octahedron".to_string(),
        corpus::octahedron(),
        corpus::boundary_chain(&[0, 1, 2]),
    ));
    let fam = families::capacitance_family(2, 1).expect("family");
    out.push(("tower-pair-1".to_string(), fam.complex, fam.gamma_raw));
    out
}

#[test]
fn criterion_01_betti_agreement() {
    let start = Instant::now();
    let mut complexes = 0;
    for seed in 0..50u64 {
        let n_vertices = 4 + (seed % 5) as usize; // 4..=8
        let density = 0.12 + 0.05 * ((seed % 4) as f64);
        let k = families::random_complex(n_vertices, 3, density, seed).expect("random complex");
        complexes += 1;
        for d in 0..=2usize {
            let inc = incremental_betti(&k, d, &ClassicalExactTester, InsertionOrder::Canonical)
                .expect("incremental");
            assert!(inc.consistent());
            let red = matrix_reduction_betti(&k, d).expect("reduction");
            let hodge = spectra::betti_via_hodge(&k, d, DEFAULT_ZERO_TOL).expect("hodge") as i64;
            assert_eq!(inc.betti, red, "seed {} d {}", seed, d);
            assert_eq!(red, hodge, "seed {} d {}", seed, d);
        }
    }
    let elapsed = start.elapsed();
    if !cfg!(debug_assertions) {
        assert!(elapsed.as_secs() < 60, "took {:?}", elapsed);
    }
    pass(
        "01-betti-agreement",
        &format!("{} random complexes, d in 0..=2, {:?}", complexes, elapsed),
    );
}

/// Positive witness size straight from the span-program definition:
/// minimum squared norm of a preimage supported on the selected columns.
fn definition_positive_witness(
    k: &SimplicialComplex,
    gamma: &Chain,
    x: &[bool],
) -> Option<Rat> {
    let d = (gamma.dimension() + 1) as usize;
    let b = k.boundary_matrix(d).expect("boundary");
    let full = b.to_rational();
    let cols: Vec<usize> = (0..x.len()).filter(|&j| x[j]).collect();
    let restricted: Vec<Vec<Rat>> = full
        .iter()
        .map(|row| cols.iter().map(|&j| row[j].clone()).collect())
        .collect();
    let rhs = gamma.to_vector(b.row_simplices());
    let sol = linalg::min_norm_solution(&restricted, &rhs)?;
    Some(sol.iter().map(|v| v * v).sum())
}

/// Negative witness size straight from the definition: minimize the squared
/// norm of `p^T dB` over chains `p` with `p^T dB` vanishing on the selected
/// columns and unit pairing with the target.
fn definition_negative_witness(
    k: &SimplicialComplex,
    gamma: &Chain,
    x: &[bool],
) -> Option<Rat> {
    let d = (gamma.dimension() + 1) as usize;
    let b = k.boundary_matrix(d).expect("boundary");
    let a = b.to_rational();
    let rows = b.nrows();
    let at = linalg::transpose(&a);
    // objective |A^T p|^2 = p^T (A A^T) p
    let m = linalg::mat_mul(&a, &at);
    // constraints: (A^T p)_j = 0 for selected columns, gamma . p = 1
    let mut c: Vec<Vec<Rat>> = Vec::new();
    for (j, &bit) in x.iter().enumerate() {
        if bit {
            c.push(at[j].clone());
        }
    }
    c.push(gamma.to_vector(b.row_simplices()));
    let mut e = vec![Rat::zero(); c.len()];
    *e.last_mut().expect("nonempty") = Rat::one();
    let _ = rows;
    linalg::minimize_quadratic_on_affine(&m, &c, &e).map(|q| q.value)
}

#[test]
fn criterion_02_witness_identities() {
    let start = Instant::now();
    let mut instances = 0u64;
    for (name, k, gamma) in witness_corpus() {
        let program = span::build_span_program(&k, &gamma).expect("program");
        let n = program.cells.len();
        assert!(n <= 10, "{} exceeds the witness corpus cap", name);
        for mask in 0..(1u32 << n) {
            let x: Vec<bool> = (0..n).map(|i| mask & (1 << i) != 0).collect();
            let (wp, wm) = span::witness_sizes(&program, &x).expect("witness sizes");
            let def_p = definition_positive_witness(&k, &gamma, &x);
            let def_m = definition_negative_witness(&k, &gamma, &x);
            match (&wp, def_p) {
                (EnergyValue::Exact(a), Some(b)) => assert_eq!(a, &b, "{} mask {}", name, mask),
                (EnergyValue::Infinite, None) => {}
                other => panic!("{} mask {}: positive mismatch {:?}", name, mask, other.0),
            }
            match (&wm, def_m) {
                (EnergyValue::Exact(a), Some(b)) => assert_eq!(a, &b, "{} mask {}", name, mask),
                (EnergyValue::Infinite, _) => {}
                other => panic!("{} mask {}: negative mismatch {:?}", name, mask, other.0),
            }
            assert!(wp.is_finite() != wm.is_finite());
            instances += 1;
        }
    }
    let elapsed = start.elapsed();
    if !cfg!(debug_assertions) {
        assert!(elapsed.as_secs() < 300, "took {:?}", elapsed);
    }
    pass(
        "02-witness-identities",
        &format!("{} instances exhaustively, {:?}", instances, elapsed),
    );
}

#[test]
fn criterion_03_resistance_growth() {
    // recursion-derived expectations |y_n|^2 = |f_n|^2 + 4 |y_{n-1}|^2,
    // |y_0|^2 = 1, computed from the verified transfer chains
    let mut resistances: Vec<Rat> = Vec::new();
    for n in 1..=5usize {
        let fam = families::resistance_family(2, n).expect("family");
        let mut expect = rat(1);
        for f in &fam.transfer_chains {
            expect = f.norm_sq() + rat(4) * expect;
        }
        assert_eq!(fam.bounding_chain.norm_sq(), expect);
        assert_eq!(fam.gamma_raw.norm_sq(), rat(3), "|d y_n|^2 = 3 exactly");
        let r = flow::effective_resistance(&fam.complex, &fam.gamma_raw).expect("resistance");
        let r = r.resistance.exact().expect("finite").clone();
        // unit-normalized resistance is |y|^2 / 3
        assert_eq!(&r / &fam.gamma_norm_sq, expect.clone() / rat(3));
        assert_eq!(r, expect * fam.gamma_norm_sq.clone() / rat(3));
        resistances.push(r);
    }
    // consecutive growth within [3.5, 4.5] on the tail n >= 2
    for w in resistances[1..].windows(2) {
        let ratio = rat_to_f64(&w[1]) / rat_to_f64(&w[0]);
        assert!((3.5..=4.5).contains(&ratio), "tail ratio {}", ratio);
    }
    let shown: Vec<String> = resistances.iter().map(|r| r.to_string()).collect();
    pass(
        "03-resistance-growth",
        &format!("R_raw(n=1..5) = {:?}, tail ratios in [3.5, 4.5]", shown),
    );
}

#[test]
fn criterion_04_capacitance_growth() {
    // the certificate chain forces every unit potential's energy: reading
    // the twist coefficient epsilon off the verified boundary of the
    // certificate gives the independent expected value 1/epsilon^2
    let mut values = Vec::new();
    for n in 1..=5usize {
        let fam = families::capacitance_family(2, n).expect("family");
        let sub = fam.sub.as_ref().expect("nested pair");
        let certificate = fam.sub_certificate.as_ref().expect("certificate");
        let twist = sub
            .apply_boundary(certificate)
            .expect("boundary")
            .sub(&fam.gamma_raw);
        let base = corpus::boundary_chain(&[0, 1, 2]);
        // twist = epsilon * d(base cell): extract epsilon
        let probe = base.support().next().expect("nonempty");
        let epsilon = twist.coeff(probe) / base.coeff(probe);
        assert_eq!(twist, base.scale(&epsilon), "twist is a multiple of the base boundary");
        let expected = Rat::one() / (&epsilon * &epsilon);
        assert_eq!(expected, rat(4).pow(n as i32), "expected C = 4^n for d = 2");

        let c = flow::effective_capacitance(sub, &fam.complex, &fam.gamma_raw)
            .expect("capacitance");
        let c = c.capacitance.exact().expect("finite").clone();
        assert_eq!(c, expected, "constrained-quadratic oracle at n = {}", n);
        // unit-normalized cycle scales the value by |gamma|^2 = 3
        values.push(c);
    }
    for w in values.windows(2) {
        assert_eq!(&w[1] / &w[0], rat(4), "exact d^2 growth");
    }
    let shown: Vec<String> = values.iter().map(|v| v.to_string()).collect();
    pass(
        "04-capacitance-growth",
        &format!("C_raw(n=1..5) = {:?} = 4^n exactly (unit cycle: 3*4^n)", shown),
    );
}

#[test]
fn criterion_05_spectral_gap_transfer() {
    // 20 complexes: the towers plus small spheres/disks and random ones
    let mut suite: Vec<(String, SimplicialComplex)> = Vec::new();
    for n in 1..=4usize {
        suite.push((
            format!("tower-{}", n),
            families::resistance_family(2, n).expect("family").complex,
        ));
    }
    suite.push(("sphere-4".into(), corpus::tetra_boundary()));
    suite.push(("octahedron".into(), corpus::octahedron()));
    suite.push(("wheel-6".into(), corpus::wheel(6)));
    suite.push(("wheel-8".into(), corpus::wheel(8)));
    suite.push(("closed-3".into(), corpus::closed_simplex(3)));
    suite.push(("torus-7".into(), corpus::torus7()));
    let mut seed = 100u64;
    while suite.len() < 20 {
        let k = families::random_complex(6, 2, 0.35, seed).expect("random");
        seed += 1;
        if k.count(2) >= 2 {
            suite.push((format!("random-{}", seed), k));
        }
    }
    let mut checked = 0;
    for (name, k) in &suite {
        let l = spectra::laplacian(k, 1, LaplacianKind::Up).expect("laplacian");
        let rep = spectra::spectrum(&l, DEFAULT_ZERO_TOL).expect("spectrum");
        let Some(lam) = rep.spectral_gap else { continue };
        // extremal unit boundary cycle: eigenvector of the smallest
        // nonzero eigenvalue
        let sym = nalgebra::SymmetricEigen::new(l.matrix.clone());
        let mut best: Option<(f64, usize)> = None;
        for (i, &ev) in sym.eigenvalues.iter().enumerate() {
            if ev > rep.zero_threshold && best.map_or(true, |(b, _)| ev < b) {
                best = Some((ev, i));
            }
        }
        let (ev, idx) = best.expect("nonzero eigenvalue");
        let v: Vec<f64> = sym.eigenvectors.column(idx).iter().cloned().collect();
        let r = flow::resistance_of_float_cycle(k, 2, &v)
            .expect("float solve")
            .expect("eigenvector of the up Laplacian lies in the boundary image");
        assert!(
            (ev * r - 1.0).abs() <= 1e-7,
            "{}: lambda * R = {}",
            name,
            ev * r
        );
        assert!((ev - lam).abs() <= 1e-9 * lam.max(1.0));
        checked += 1;
    }
    assert!(checked >= 15, "only {} complexes had a nonzero up-gap", checked);

    // gap decay of the towers: factor at most 0.3 per level
    let mut prev: Option<f64> = None;
    for n in 1..=5usize {
        let fam = families::resistance_family(2, n).expect("family");
        let l = spectra::laplacian(&fam.complex, 1, LaplacianKind::Combinatorial).expect("lap");
        let gap = spectra::spectrum(&l, DEFAULT_ZERO_TOL)
            .expect("spectrum")
            .spectral_gap
            .expect("gap");
        if let Some(p) = prev {
            assert!(gap / p <= 0.3, "n = {}: ratio {}", n, gap / p);
        }
        prev = Some(gap);
    }
    pass(
        "05-spectral-gap-transfer",
        &format!("lambda*R = 1 within 1e-7 on {} complexes; tower decay <= 0.3", checked),
    );
}

#[test]
fn criterion_06_laplacian_identities() {
    let mut count = 0;
    let mut suites: Vec<SimplicialComplex> = Vec::new();
    for seed in 0..100u64 {
        let n_vertices = 4 + (seed % 5) as usize;
        let density = 0.15 + 0.05 * ((seed % 3) as f64);
        suites.push(families::random_complex(n_vertices, 3, density, 1000 + seed).expect("random"));
    }
    suites.push(families::resistance_family(2, 2).expect("fam").complex);
    suites.push(families::capacitance_family(2, 2).expect("fam").complex);
    suites.push(families::many_small(2, 1, Some(3)).expect("fam"));
    for k in &suites {
        let Some(dim) = k.dim() else { continue };
        for d in 0..=dim {
            let rep = spectra::verify_spectrum_identities(k, d).expect("identities");
            assert!(rep.all_passed(), "{:?}", rep.checks);
            count += 1;
        }
    }
    // component-union spectra
    let a = corpus::tetra_boundary();
    let b = corpus::wheel(5);
    let union = a.disjoint_union(&b, 100);
    for d in 0..=2 {
        assert!(spectra::union_spectrum_check(&[&a, &b], &union, d, 1e-8).expect("union"));
    }
    pass(
        "06-laplacian-identities",
        &format!("{} (complex, dimension) pairs plus union spectra", count),
    );
}

#[test]
fn criterion_07_snf_correctness() {
    use rand::Rng;
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
    for case in 0..200 {
        let rows = rng.gen_range(1..=12);
        let cols = rng.gen_range(1..=12);
        let m: Vec<Vec<Int>> = (0..rows)
            .map(|_| (0..cols).map(|_| Int::from(rng.gen_range(-3..=3))).collect())
            .collect();
        let ours = smith_normal_form(&m);
        assert!(snf::divisibility_holds(&ours.diagonal), "case {}", case);
        let oracle = snf::snf_naive_oracle(&m);
        assert_eq!(ours.diagonal, oracle, "case {} vs naive oracle", case);
        if rows == cols {
            let det = linalg::det_bigint(&m).abs();
            let product = if ours.rank == rows {
                ours.diagonal.iter().fold(Int::one(), |a, d| a * d)
            } else {
                Int::zero()
            };
            assert_eq!(det, product, "case {}: |det| preserved", case);
        }
    }

    // relative torsion of the projective plane
    let rp2 = corpus::projective_plane();
    let b2 = rp2.boundary_matrix(2).expect("boundary");
    let full = smith_normal_form(&b2.to_bigint());
    assert_eq!(
        full.diagonal.iter().filter(|d| **d == Int::from(2)).count(),
        1,
        "exactly one entry 2"
    );
    assert!(full.diagonal.iter().all(|d| *d == Int::one() || *d == Int::from(2)));
    // a square nonsingular relative submatrix detecting the torsion
    let cols = rp2.simplices(2);
    let rows = rp2.simplices(1);
    let mut found = None;
    'search: for drop in snf::combinations(rows.len(), rows.len() - cols.len()) {
        let excluded: Vec<Simplex> = drop.iter().map(|&i| rows[i].clone()).collect();
        let t = snf::torsion_cardinality(&rp2, &cols, &excluded, 2).expect("torsion");
        if t == Int::from(2) {
            found = Some(excluded);
            break 'search;
        }
    }
    assert!(found.is_some(), "a square relative pair with torsion 2 exists");

    // Hadamard bound over sampled square submatrices of every test complex
    for k in [
        corpus::tetra_boundary(),
        corpus::octahedron(),
        corpus::projective_plane(),
        corpus::torus7(),
        families::resistance_family(2, 1).expect("fam").complex,
    ] {
        let d = k.dim().expect("nonempty");
        let report = snf::bounds_report(&k, d, 500, 99, None).expect("report");
        assert_eq!(report.hadamard_violations, 0, "Hadamard bound violated");
    }
    pass(
        "07-snf-correctness",
        "200 random matrices vs naive oracle; projective-plane torsion 2; Hadamard clean",
    );
}

#[test]
fn criterion_08_chain_map_identities() {
    // subdivision, prism, stellar prism of the closed simplex, d = 1..3
    for d in 1..=3usize {
        let k = corpus::closed_simplex(d);
        let (_, star_set) = maps::stellar_subdivision(&k).expect("subdivision");
        for (sigma, b) in &star_set.cone_maps {
            assert!(maps::verify_cone_identity(b), "cone at {:?}", sigma);
        }
        assert!(maps::verify_commutes_with_boundary(
            star_set.subdivision.as_ref().expect("map")
        ));
        let (_, prism_set) = maps::prism(&k).expect("prism");
        assert!(maps::verify_homotopy_identity(
            prism_set.prism_map.as_ref().expect("map"),
            prism_set.top_inclusion.as_ref().expect("map"),
            prism_set.bottom_inclusion.as_ref().expect("map"),
        ));
        let (_, sp_set) = maps::stellar_prism(&k, None).expect("stellar prism");
        for (sigma, b) in &sp_set.cone_maps {
            assert!(maps::verify_cone_identity(b), "cone at {:?}", sigma);
        }
        assert!(maps::verify_homotopy_identity(
            sp_set.stellar_prism_map.as_ref().expect("map"),
            sp_set.subdivided_top_inclusion.as_ref().expect("map"),
            sp_set.bottom_inclusion.as_ref().expect("map"),
        ));
    }
    // identities survive the vertex identification in the building block
    for d in 2..=3usize {
        let (_, transfer, set) = families::building_block(d).expect("block");
        for (sigma, b) in &set.cone_maps {
            assert!(maps::verify_cone_identity(b), "block cone at {:?}", sigma);
        }
        assert!(maps::verify_homotopy_identity(
            set.stellar_prism_map.as_ref().expect("map"),
            set.subdivided_top_inclusion.as_ref().expect("map"),
            set.bottom_inclusion.as_ref().expect("map"),
        ));
        assert!(!transfer.is_zero());
    }
    pass(
        "08-chain-map-identities",
        "subdivision/prism/stellar-prism identities exact for d = 1..3 and blocks d = 2, 3",
    );
}

#[test]
fn criterion_09_collapse_results() {
    use homolab_core::collapse::{greedy_collapse, greedy_collapse_protected, transport_chain};
    for n in 1..=5usize {
        let fam = families::resistance_family(2, n).expect("family");
        let seq = greedy_collapse(&fam.complex, Some(1));
        assert_eq!(seq.result.dim(), Some(1), "tower n = {}", n);
        assert!(seq.replay_valid());
        let pair = families::capacitance_family(2, n).expect("family");
        let seq = greedy_collapse(pair.sub.as_ref().expect("sub"), Some(1));
        assert_eq!(seq.result.dim(), Some(1), "pair n = {}", n);
    }

    // transport through a protected partial collapse of the tower
    let fam = families::resistance_family(2, 2).expect("family");
    let protected: Vec<Simplex> = fam.gamma_raw.support().cloned().collect();
    let seq = greedy_collapse_protected(&fam.complex, Some(1), &protected);
    let transported =
        transport_chain(&seq, &fam.bounding_chain, &fam.gamma_raw).expect("transport");
    assert_eq!(
        seq.result.apply_boundary(&transported).expect("boundary"),
        fam.gamma_raw
    );

    // solid simplex collapsed onto three faces of its boundary
    let k = corpus::closed_simplex(3);
    let cell = Simplex::new(0..=3).expect("cell");
    let face = Simplex::new([0, 1, 2]).expect("face");
    let result = k.without_simplices(&[cell.clone(), face.clone()]).expect("removal");
    let seq = homolab_core::collapse::CollapseSequence {
        pairs: vec![(cell, face.clone())],
        source: k.clone(),
        result,
        stalled_above_target: false,
    };
    let f = Chain::unit(face);
    let gamma = k.apply_boundary(&f).expect("boundary");
    let moved = transport_chain(&seq, &f, &gamma).expect("transport");
    assert_eq!(seq.result.apply_boundary(&moved).expect("boundary"), gamma);

    // null-homology equivalence across collapses, 30 instances
    let mut checked = 0;
    let mut seed = 0u64;
    while checked < 30 {
        seed += 1;
        let k = families::random_complex(6, 3, 0.3, 5000 + seed).expect("random");
        let seq = greedy_collapse(&k, None);
        if seq.pairs.is_empty() {
            continue;
        }
        let Some(dim) = seq.result.dim() else { continue };
        for d in 1..=dim {
            if let Some(sigma) = seq.result.simplices(d).first() {
                let gamma = corpus::boundary_chain(sigma.vertices());
                let before = flow::is_null_homologous(&k, &gamma).expect("before");
                let after = flow::is_null_homologous(&seq.result, &gamma).expect("after");
                assert_eq!(before, after, "seed {} d {}", seed, d);
                checked += 1;
            }
        }
    }
    pass(
        "09-collapse-results",
        "towers and pairs reach dimension 1 for n <= 5; transport exact; 30 equivalences",
    );
}

#[test]
fn criterion_10_szegedy_structure() {
    let mut workspaces = 0;
    for (name, k, gamma) in witness_corpus() {
        let d = (gamma.dimension() + 1) as usize;
        if k.count(d - 1) * k.count(d) > span::TENSOR_CAP {
            continue;
        }
        let ws = span::build_szegedy_workspace(&k, &gamma).expect("workspace");
        for c in &ws.checks {
            assert!(c.passed, "{}: {} ({})", name, c.name, c.detail);
        }
        workspaces += 1;
    }
    let fam = families::resistance_family(2, 1).expect("family");
    let ws = span::build_szegedy_workspace(&fam.complex, &fam.gamma_raw).expect("workspace");
    for c in &ws.checks {
        assert!(c.passed, "tower-1: {} ({})", c.name, c.detail);
    }
    workspaces += 1;
    pass(
        "10-szegedy-structure",
        &format!(
            "{} workspaces: phases within 1e-9, kernel reflection within 1e-8, phase gap bound",
            workspaces
        ),
    );
}

#[test]
fn criterion_11_simulated_evaluation() {
    let start = Instant::now();
    let mut instances = 0u64;
    for (name, k, gamma) in witness_corpus() {
        let program = span::build_span_program(&k, &gamma).expect("program");
        let n = program.cells.len();
        for mask in 0..(1u32 << n) {
            let x: Vec<bool> = (0..n).map(|i| mask & (1 << i) != 0).collect();
            let truth = program.decide_classically(&x).expect("classical");
            let (decision, _) =
                span::simulate_evaluation(&program, &x, 0.01, mask as u64).expect("simulate");
            assert_eq!(decision, truth, "{} mask {}", name, mask);
            instances += 1;
        }
    }
    // exact initial-state norm identity on ten null-homologous cycles
    let mut identities = 0;
    let mut pairs: Vec<(SimplicialComplex, Chain)> = witness_corpus()
        .into_iter()
        .map(|(_, k, g)| (k, g))
        .collect();
    for n in 1..=3 {
        let fam = families::resistance_family(2, n).expect("family");
        pairs.push((fam.complex, fam.gamma_raw));
    }
    pairs.push((corpus::tetra_boundary(), corpus::boundary_chain(&[0, 1, 3])));
    pairs.push((corpus::octahedron(), corpus::boundary_chain(&[0, 1, 2])));
    for (k, gamma) in pairs.iter().take(10) {
        let init = span::prepare_initial_state(k, gamma).expect("initial state");
        let r = init.resistance.clone();
        assert_eq!(
            init.extended_norm_sq,
            r.clone() / (r + Rat::one()),
            "norm identity exact"
        );
        identities += 1;
    }
    assert_eq!(identities, 10);
    let elapsed = start.elapsed();
    pass(
        "11-simulated-evaluation",
        &format!("{} instances, zero decision errors; 10 exact norm identities; {:?}", instances, elapsed),
    );
}

#[test]
fn criterion_12_duality() {
    // sphere on four triangles: every cycle choice and every subcomplex
    let k = corpus::tetra_boundary();
    let mut comparisons = 0;
    for tau in k.simplices(2) {
        let dual = corpus::sphere_dual_around(&k, &tau).expect("dual data");
        let others: Vec<Simplex> = k.simplices(2).into_iter().collect();
        for mask in 0..(1u32 << others.len()) {
            let remove: Vec<Simplex> = others
                .iter()
                .enumerate()
                .filter(|(i, _)| mask & (1 << i) != 0)
                .map(|(_, s)| s.clone())
                .collect();
            let Ok(sub) = k.without_simplices(&remove) else { continue };
            let check = dual.check_duality(&sub).expect("duality");
            match (&check.capacitance, &check.dual_resistance) {
                (EnergyValue::Exact(_), EnergyValue::Exact(_)) => {
                    assert_eq!(check.difference, Some(Rat::zero()));
                }
                (EnergyValue::Infinite, EnergyValue::Infinite) => {}
                other => panic!("finiteness mismatch {:?}", other.0),
            }
            comparisons += 1;
        }
    }
    assert!(comparisons >= 20);

    // octahedron split along the equator, sampled subcomplexes
    use rand::Rng;
    use rand::SeedableRng;
    let oct = corpus::octahedron();
    let dual = corpus::octahedron_equator_dual().expect("dual data");
    let cells = oct.simplices(2);
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(12);
    let mut oct_comparisons = 0;
    while oct_comparisons < 20 {
        let remove: Vec<Simplex> = cells
            .iter()
            .filter(|_| rng.gen_bool(0.5))
            .cloned()
            .collect();
        let Ok(sub) = oct.without_simplices(&remove) else { continue };
        let check = dual.check_duality(&sub).expect("duality");
        match (&check.capacitance, &check.dual_resistance) {
            (EnergyValue::Exact(_), EnergyValue::Exact(_)) => {
                assert_eq!(check.difference, Some(Rat::zero()));
            }
            (EnergyValue::Infinite, EnergyValue::Infinite) => {}
            other => panic!("finiteness mismatch {:?}", other.0),
        }
        oct_comparisons += 1;
    }

    // planar square: all edge subsets
    let dual = corpus::planar_square_dual().expect("dual data");
    let square = SimplicialComplex::build(
        &[vec![0, 1], vec![1, 2], vec![2, 3], vec![0, 3]],
        None,
    )
    .expect("square");
    let edges = square.simplices(1);
    let mut square_comparisons = 0;
    for mask in 0..(1u32 << edges.len()) {
        let remove: Vec<Simplex> = edges
            .iter()
            .enumerate()
            .filter(|(i, _)| mask & (1 << i) != 0)
            .map(|(_, s)| s.clone())
            .collect();
        let Ok(sub) = square.without_simplices(&remove) else { continue };
        let check = dual.check_duality(&sub).expect("duality");
        match (&check.capacitance, &check.dual_resistance) {
            (EnergyValue::Exact(_), EnergyValue::Exact(_)) => {
                assert_eq!(check.difference, Some(Rat::zero()));
            }
            (EnergyValue::Infinite, EnergyValue::Infinite) => {}
            other => panic!("finiteness mismatch {:?}", other.0),
        }
        square_comparisons += 1;
    }
    assert!(square_comparisons >= 16);
    pass(
        "12-duality",
        &format!(
            "sphere {}, octahedron {}, square {} comparisons, all exactly equal",
            comparisons, oct_comparisons, square_comparisons
        ),
    );
}

#[test]
fn criterion_13_coloring_transfer() {
    let mut transfers = 0;
    for n in 1..=3usize {
        let fam = families::resistance_family(2, n).expect("family");
        let k = &fam.complex;
        let n0 = k.count(0);
        let mut colorings: Vec<BTreeMap<usize, usize>> = Vec::new();
        // the identity coloring is always proper
        colorings.push(
            k.simplices(0)
                .iter()
                .map(|s| (s.vertices()[0], s.vertices()[0]))
                .collect(),
        );
        for budget in [n0, n0.saturating_sub(1)] {
            for seed in 0..4u64 {
                if let Some(found) =
                    families::random_proper_coloring(k, budget, 3000, 31 * seed + n as u64)
                        .expect("search")
                {
                    colorings.push(found.colors);
                }
            }
        }
        let base = spectra::spectrum(
            &spectra::laplacian(k, 1, LaplacianKind::Up).expect("laplacian"),
            DEFAULT_ZERO_TOL,
        )
        .expect("spectrum")
        .spectral_gap
        .expect("gap");
        for colors in &colorings {
            let (pattern, data) = families::pattern_complex(k, colors).expect("pattern");
            assert!(data.proper);
            let gap = spectra::spectrum(
                &spectra::laplacian(&pattern, 1, LaplacianKind::Up).expect("laplacian"),
                DEFAULT_ZERO_TOL,
            )
            .expect("spectrum")
            .spectral_gap
            .expect("gap");
            assert!(
                (gap - base).abs() <= 1e-8 * base.max(1.0),
                "n = {}: {} vs {}",
                n,
                gap,
                base
            );
            transfers += 1;
        }
    }
    pass(
        "13-coloring-transfer",
        &format!("{} proper colorings preserve the up-Laplacian gap to 1e-8", transfers),
    );
}
