use proptest::prelude::*;

use spanchroma::gf::{self, FVector};
use spanchroma::graph::{graph_from_edges, parse_graph, write_graph};
use spanchroma::spancolour::{colouring_from_json, colouring_to_json, Assignments, SpanColouring};
use spanchroma::sr::{complex_from_json, complex_to_json, graph_complex, PolyZ2};
use spanchroma::steenrod::{sq, su3_generator_action};

fn arb_graph() -> impl Strategy<Value = spanchroma::graph::Graph> {
    (1usize..=6).prop_flat_map(|n| {
        let pairs: Vec<(usize, usize)> =
            (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect();
        proptest::collection::vec(any::<bool>(), pairs.len()).prop_map(move |mask| {
            let edges: Vec<(usize, usize)> = pairs
                .iter()
                .zip(&mask)
                .filter(|(_, &keep)| keep)
                .map(|(&e, _)| e)
                .collect();
            graph_from_edges(n, &edges).unwrap()
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn graph_format_round_trips(g in arb_graph()) {
        prop_assert_eq!(&parse_graph(&write_graph(&g)).unwrap(), &g);
    }

    #[test]
    fn complex_json_round_trips(g in arb_graph()) {
        let k = graph_complex(&g);
        let back = complex_from_json(&complex_to_json(&k)).unwrap();
        prop_assert_eq!(back, k);
    }

    #[test]
    fn weak_colouring_json_round_trips(coords in proptest::collection::vec(0u8..2, 1..12)) {
        let field = gf::make_field(2, 1).unwrap();
        let vs: Vec<FVector> = coords
            .chunks(2)
            .filter(|c| c.len() == 2)
            .map(|c| FVector::new(field, c.to_vec()))
            .collect();
        prop_assume!(!vs.is_empty());
        let c = SpanColouring { field, n: 2, data: Assignments::Weak(vs) };
        let back = colouring_from_json(&colouring_to_json(&c)).unwrap();
        prop_assert_eq!(back, c);
    }

    #[test]
    fn cartan_formula_on_random_products(
        ea in proptest::collection::vec((0u16..3, 0u16..3, 0u16..2, 0u16..2), 1..3),
        eb in proptest::collection::vec((0u16..3, 0u16..3, 0u16..2, 0u16..2), 1..3),
        k in 0u32..12,
    ) {
        let action = su3_generator_action(2, 2, 18).unwrap();
        let ring = action.ring().clone();
        let mk = |ts: &[(u16, u16, u16, u16)]| {
            PolyZ2::from_exps(&ring, ts.iter().map(|&(a, b, c, d)| vec![a, b, c, d]))
        };
        let a = mk(&ea);
        let b = mk(&eb);
        let lhs = sq(&action, &a.mul(&b).unwrap(), k).unwrap();
        let mut rhs = PolyZ2::zero(&ring);
        for i in 0..=k {
            let l = sq(&action, &a, i).unwrap();
            let r = sq(&action, &b, k - i).unwrap();
            rhs = rhs.add(&l.mul(&r).unwrap()).unwrap();
        }
        prop_assert_eq!(lhs, rhs);
    }
}
