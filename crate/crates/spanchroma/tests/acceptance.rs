//! Acceptance suite: one test and one printed pass line per criterion.
//! Run with `--nocapture` to see the lines on success.

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use spanchroma::gf::{self, FVector};
use spanchroma::graph::{
    chromatic_number, clique_number, find_homomorphism, graph_from_edges, Graph, HomMode,
    HomResult,
};
use spanchroma::spancolour::{
    basis_census, brute_force_least_n, build_rep_graph, count_span_extensions, span_chromatic_number,
    validate_colouring, Assignments, SpanColouring, Variant,
};
use spanchroma::sr::{graph_complex, PolyZ2, SimplicialComplex, DEFAULT_TRUNC};
use spanchroma::steenrod::{
    action_from_colouring, classify_two_x, extract_colouring, forced_sq4_search, modp_p1_action,
    p1_coefficient_mod, verify_action, PolyZp, SteenrodAction,
};

fn report(criterion: u32, what: &str, started: Instant, budget_secs: u64) {
    let elapsed = started.elapsed();
    println!("criterion {criterion} ({what}): pass [{elapsed:.2?}]");
    assert!(
        elapsed.as_secs() < budget_secs,
        "criterion {criterion} exceeded its {budget_secs}s budget: {elapsed:?}"
    );
}

fn weak(n: usize, coords: &[&[u8]]) -> SpanColouring {
    let field = gf::make_field(2, 1).unwrap();
    SpanColouring {
        field,
        n,
        data: Assignments::Weak(coords.iter().map(|c| FVector::new(field, c.to_vec())).collect()),
    }
}

fn intermediate(g: &Graph, c: &SpanColouring) -> SpanColouring {
    spanchroma::spancolour::convert_colouring(g, c, Variant::Intermediate).unwrap()
}

#[test]
fn criterion_1_representing_graph_dim_2() {
    let t = Instant::now();
    let field = gf::make_field(2, 1).unwrap();
    let rep = build_rep_graph(field, 2).unwrap();
    assert_eq!(rep.graph.n_vertices(), 6);
    let edges = rep.graph.edges();
    assert_eq!(edges.len(), 3);
    // three disjoint edges: every vertex has degree exactly 1
    assert!((0..6).all(|v| rep.graph.degree(v) == 1));
    // each edge swaps the line and hyperplane of its endpoints
    for &(u, v) in &edges {
        let (lu, hu) = &rep.pairs[u];
        let (lv, hv) = &rep.pairs[v];
        assert_eq!((lu, hu), (hv, lv));
    }
    assert_eq!(chromatic_number(&rep.graph), 2);
    report(1, "A over GF(2)^2: 6 vertices, 3 disjoint edges, chi = 2", t, 1);
}

#[test]
fn criterion_2_representing_graph_dim_3() {
    let t = Instant::now();
    let field = gf::make_field(2, 1).unwrap();
    let rep = build_rep_graph(field, 3).unwrap();
    assert_eq!(rep.graph.n_vertices(), 28);
    assert_eq!(clique_number(&rep.graph), 3);
    match find_homomorphism(&rep.graph, &Graph::complete(3), HomMode::First) {
        HomResult::First(None) => {}
        other => panic!("expected no homomorphism into K3, got {other:?}"),
    }
    // the identity homomorphism realizes a full 3-span colouring
    let identity = SpanColouring {
        field,
        n: 3,
        data: Assignments::Full(rep.pairs.clone()),
    };
    assert!(validate_colouring(&rep.graph, &identity).unwrap().is_none());
    // clique number 3 bounds from below, so the span chromatic number is 3
    report(2, "A over GF(2)^3: 28 vertices, clique 3, no K3 map, s2chi = 3", t, 60);
}

#[test]
fn criterion_3_census() {
    let t = Instant::now();
    for (q, n, bases, fiber) in [(2u64, 2usize, 3u128, 1u128), (2, 3, 28, 3), (3, 2, 12, 2)] {
        let field = gf::make_field(q, 1).unwrap();
        let report = basis_census(field, n).unwrap();
        assert!(report.matches, "({q},{n})");
        assert_eq!(report.quotient_count, bases, "({q},{n}) scaling classes");
        assert_eq!(report.basis_count, report.basis_count_formula, "({q},{n})");
        assert!(report.fiber_counts.iter().all(|&c| c == fiber), "({q},{n}) fibers");
        assert_eq!(report.fiber_formula, fiber, "({q},{n})");
    }
    report(3, "basis census matches formulas for (2,2), (2,3), (3,2)", t, 30);
}

#[test]
fn criterion_4_hexagon_extension_counts() {
    let t = Instant::now();
    let g = graph_from_edges(6, &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (5, 0), (2, 4)]).unwrap();
    let four = intermediate(
        &g,
        &weak(3, &[&[0, 1, 0], &[1, 0, 0], &[0, 1, 0], &[1, 0, 0], &[0, 0, 1], &[1, 0, 0]]),
    );
    let one = intermediate(
        &g,
        &weak(3, &[&[1, 0, 0], &[0, 0, 1], &[0, 1, 0], &[1, 0, 0], &[0, 0, 1], &[0, 1, 0]]),
    );
    let counts = [count_span_extensions(&g, &one).unwrap(), count_span_extensions(&g, &four).unwrap()];
    assert_eq!(counts, [1, 4]);
    report(4, "hexagon-with-chord colourings extend in 1 and 4 ways", t, 1);
}

#[test]
fn criterion_5_sandwich_suite() {
    let t = Instant::now();
    let field = gf::make_field(2, 1).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(20260823);
    for case in 0..200 {
        let n = rng.gen_range(1..=7);
        let mut edges = Vec::new();
        for u in 0..n {
            for v in u + 1..n {
                if rng.gen_bool(0.5) {
                    edges.push((u, v));
                }
            }
        }
        let g = graph_from_edges(n, &edges).unwrap();
        let clique = clique_number(&g);
        let chi = chromatic_number(&g);
        let (s2, witness) = span_chromatic_number(&g, field).unwrap();
        assert!(validate_colouring(&g, &witness).unwrap().is_none(), "case {case}");
        assert!(clique <= s2 && s2 <= chi, "case {case}: {clique} <= {s2} <= {chi}");
        assert_eq!(s2 == 2, chi == 2, "case {case}");
        for variant in [Variant::Weak, Variant::Intermediate, Variant::Full] {
            let least = brute_force_least_n(&g, field, variant, 7).unwrap();
            assert_eq!(least, Some(s2), "case {case}, variant {variant:?}");
        }
    }
    report(5, "200 random graphs: clique <= s2chi <= chi, variants agree", t, 300);
}

#[test]
fn criterion_6_steenrod_round_trip() {
    let t = Instant::now();
    let g = Graph::cycle(5);
    let c = weak(3, &[&[1, 0, 0], &[0, 1, 0], &[1, 0, 0], &[0, 1, 0], &[0, 0, 1]]);
    let action = action_from_colouring(&graph_complex(&g), 3, &c, DEFAULT_TRUNC).unwrap();
    let cert = verify_action(&action);
    assert!(cert.unstable.pass, "{:?}", cert.unstable);
    assert!(cert.ideal.pass, "{:?}", cert.ideal);
    assert!(cert.adem.pass, "{:?}", cert.adem);
    assert!(cert.pmax.pass, "{:?}", cert.pmax);
    let (extracted, rep) = extract_colouring(&action, &g).unwrap();
    assert_eq!(rep.n, 3);
    assert!(validate_colouring(&g, &extracted).unwrap().is_none());
    report(6, "C5, n = 3: built action verifies and round-trips", t, 60);
}

#[test]
fn criterion_7_counterexample_actions() {
    let t = Instant::now();
    let mk = |names: &[&str], degrees: Vec<u32>| {
        spanchroma::sr::free_ring(
            names.iter().map(|s| s.to_string()).collect(),
            degrees,
            DEFAULT_TRUNC,
        )
        .unwrap()
    };
    let poly = |ring: &spanchroma::sr::Ring, terms: &[&[(usize, u16)]]| {
        PolyZ2::from_exps(
            ring,
            terms.iter().map(|t| {
                let mut e = vec![0u16; ring.n_gens()];
                for &(i, x) in *t {
                    e[i] = x;
                }
                e
            }),
        )
    };

    let r3 = mk(&["x1", "x2", "x3", "y1", "y2", "y3"], vec![4, 4, 4, 6, 6, 6]);
    let a3 = SteenrodAction::new(
        r3.clone(),
        vec![
            poly(&r3, &[&[(3, 1)]]),
            poly(&r3, &[&[(4, 1)]]),
            poly(&r3, &[&[(3, 1)], &[(5, 1)]]),
            PolyZ2::zero(&r3),
            PolyZ2::zero(&r3),
            PolyZ2::zero(&r3),
        ],
        vec![
            None,
            None,
            None,
            Some(poly(&r3, &[&[(3, 1), (0, 1)]])),
            Some(poly(&r3, &[&[(4, 1), (1, 1)]])),
            Some(poly(&r3, &[&[(3, 1), (0, 1)], &[(3, 1), (2, 1)], &[(5, 1), (2, 1)]])),
        ],
    )
    .unwrap();
    assert!(verify_action(&a3).all_pass());
    // Sq^4(y3) escapes the principal ideal (y3)
    assert!(a3.sq4_image(5).terms().any(|e| e[5] == 0));

    let r2 = mk(&["x1", "x2", "y1", "y2"], vec![4, 4, 6, 6]);
    let a2 = SteenrodAction::new(
        r2.clone(),
        vec![
            poly(&r2, &[&[(2, 1)]]),
            poly(&r2, &[&[(2, 1)], &[(3, 1)]]),
            PolyZ2::zero(&r2),
            PolyZ2::zero(&r2),
        ],
        vec![
            None,
            None,
            Some(poly(&r2, &[&[(2, 1), (0, 1)]])),
            Some(poly(&r2, &[&[(2, 1), (0, 1)], &[(2, 1), (1, 1)], &[(3, 1), (1, 1)]])),
        ],
    )
    .unwrap();
    assert!(verify_action(&a2).all_pass());
    assert!(a2.sq4_image(3).terms().any(|e| e[3] == 0));
    report(7, "both free-ring counterexamples verify with flagged Sq4 images", t, 10);
}

#[test]
fn criterion_8_exhaustive_converse() {
    let t = Instant::now();
    let (total, valid) = forced_sq4_search(&Graph::cycle(5), 2).unwrap();
    assert_eq!(total, 1024);
    assert_eq!(valid, 0);
    report(8, "C5, n = 2: all 4^5 forced Sq4 assignments fail", t, 60);
}

#[test]
fn criterion_9_two_x_classifier() {
    let t = Instant::now();
    let path = graph_from_edges(3, &[(0, 1), (1, 2)]).unwrap();
    let realizable = spanchroma::sr::a_n_graph(2, &path);
    let verdict = classify_two_x(&realizable).unwrap();
    assert!(verdict.realizable);

    let orphan = SimplicialComplex::new(
        vec!["x1".into(), "x2".into(), "y1".into()],
        vec![4, 4, 6],
        vec![vec![0, 1], vec![2]],
    )
    .unwrap();
    assert_eq!(classify_two_x(&orphan).unwrap().failed_condition, Some(2));

    let torn = SimplicialComplex::new(
        vec!["x1".into(), "x2".into(), "y1".into(), "y2".into()],
        vec![4, 4, 6, 6],
        vec![vec![0, 1, 2], vec![0, 1, 3], vec![2, 3]],
    )
    .unwrap();
    assert_eq!(classify_two_x(&torn).unwrap().failed_condition, Some(3));
    report(9, "two-generator classifier: realizable / fails(2) / fails(3)", t, 1);
}

/// Exact-rational evaluation of the coefficient (-1)^{i2+i3+1}
/// (i2+i3-1)!/(i2! i3!), reduced mod p only at the very end.
fn oracle_coefficient_mod(i2: u64, i3: u64, p: u64) -> u64 {
    let fact = |n: u64| -> i128 { (1..=n as i128).product::<i128>().max(1) };
    let num = fact(i2 + i3 - 1) * if (i2 + i3 + 1) % 2 == 0 { 1 } else { -1 };
    let den = fact(i2) * fact(i3);
    // reduce num/den mod p with Fermat inversion
    let modp = |x: i128| -> u64 { (x.rem_euclid(p as i128)) as u64 };
    let pow = |mut b: u64, mut e: u64| -> u64 {
        let mut acc = 1u64;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * b % p;
            }
            b = b * b % p;
            e >>= 1;
        }
        acc
    };
    modp(num) * pow(modp(den), p - 2) % p
}

#[test]
fn criterion_10_modp_oracle() {
    let t = Instant::now();
    let p = 5u64;
    for target in [p + 1, p + 2] {
        for i3 in 0..=target / 3 {
            let rem = target - 3 * i3;
            if rem % 2 != 0 || rem / 2 + i3 == 0 {
                continue;
            }
            let i2 = rem / 2;
            assert_eq!(
                p1_coefficient_mod(i2, i3, p),
                oracle_coefficient_mod(i2, i3, p),
                "(i2, i3) = ({i2}, {i3})"
            );
        }
    }
    // assemble the single SU(3)-pair images from the oracle and compare
    let field = gf::make_field(5, 1).unwrap();
    let point = graph_complex(&Graph::empty(1));
    let c = SpanColouring {
        field,
        n: 1,
        data: Assignments::Weak(vec![FVector::new(field, vec![1])]),
    };
    let computed = modp_p1_action(5, &point, 1, &c, DEFAULT_TRUNC).unwrap();
    assert!(computed.all_pass());
    let free = computed.p1_y[0].ring.clone();
    // P^1(y): 2 * coeff(2,1) x^2 y; P^1(x): coeff(3,0) x^3 + coeff(0,2) y^2
    let expect_y = PolyZp::from_terms(&free, 5, [(vec![2, 1], 2 * oracle_coefficient_mod(2, 1, 5))]);
    let expect_x = PolyZp::from_terms(
        &free,
        5,
        [
            (vec![3, 0], oracle_coefficient_mod(3, 0, 5)),
            (vec![0, 2], oracle_coefficient_mod(0, 2, 5)),
        ],
    );
    assert_eq!(computed.p1_y[0], expect_y);
    assert_eq!(computed.p1_x[0], expect_x);
    report(10, "p = 5 P^1 images match the exact-rational oracle", t, 1);
}
