mod common;

use common::*;
use proptest::prelude::*;
use signtypes::bayes::{
    bayes_node_properties, bayes_type_distribution, class_distribution, edge_type_features, global_sign_prior,
    node_type_distribution, SignPrior, TypeEncoding,
};
use signtypes::graph::{load_edge_list, mask_count, mask_edges, Holdout, NodeId, Sign, SignedDigraph};
use signtypes::nodetypes::{classify_node, interaction_sign, EdgeClass, NodeTypeId, SignConstraint};
use signtypes::structural::{degree_features, triad_features, TriadContext};
use signtypes::{DegreeTally, FeatureExtractor, FeatureRecipe};

fn graphs() -> impl Strategy<Value = SignedDigraph> {
    (2usize..25, 0usize..90, 0.05f64..0.95, 0.0f64..0.5, any::<u64>())
        .prop_map(|(n, m, p, h, seed)| random_graph(n, m, p, h, seed))
}

fn observed_graphs() -> impl Strategy<Value = SignedDigraph> {
    (2usize..40, 0usize..150, 0.05f64..0.95, any::<u64>()).prop_map(|(n, m, p, seed)| random_graph(n, m, p, 0.0, seed))
}

fn tally_of(c: &Counts) -> DegreeTally {
    DegreeTally {
        in_pos: c.in_pos,
        in_neg: c.in_neg,
        in_hidden: c.in_hidden,
        out_pos: c.out_pos,
        out_neg: c.out_neg,
        out_hidden: c.out_hidden,
    }
}

fn class_code(c: EdgeClass) -> u8 {
    match c {
        EdgeClass::None => 0,
        EdgeClass::AllPositive => 1,
        EdgeClass::AllNegative => 2,
        EdgeClass::Mixed => 3,
    }
}

#[test]
fn type_table_is_a_bijection() {
    let mut seen = std::collections::HashSet::new();
    for t in NodeTypeId::all() {
        let pair = (class_code(t.incoming()), class_code(t.outgoing()));
        assert_eq!(TYPE_TABLE[t.index()], pair, "{t}");
        assert!(seen.insert(pair));
        assert_eq!(NodeTypeId::from_classes(t.incoming(), t.outgoing()), t);
    }
    assert_eq!(seen.len(), 16);
}

#[test]
fn kronecker_fixture_three_hop() {
    // a -> x (+), x -> y (hidden), y -> b (-), prior 0.8 positive.
    let g = load_edge_list("a x 1\nx y ?\ny b -1".as_bytes()).unwrap();
    let (x, y) = (g.node_by_label("x").unwrap(), g.node_by_label("y").unwrap());
    let f = edge_type_features(&g, x, y, SignPrior::new(0.8), TypeEncoding::Kronecker).unwrap();
    // revealed +: x is N8, y is N9; revealed -: x is N9, y is N7
    let mut expected = vec![0.0; 256];
    expected[7 * 16 + 8] = 0.8;
    expected[8 * 16 + 6] = 0.2;
    for (a, b) in f.iter().zip(&expected) {
        assert!((a - b).abs() < 1e-12);
    }
}

proptest! {
    #[test]
    fn tallies_match_edge_scan(g in graphs()) {
        let tallies = g.tallies();
        let mut in_sum = 0;
        let mut out_sum = 0;
        for v in 0..g.node_count() as NodeId {
            let c = counts(&g, v);
            prop_assert_eq!(tallies[v as usize], tally_of(&c));
            prop_assert_eq!(g.degree_tally(v).unwrap(), tally_of(&c));
            in_sum += tallies[v as usize].in_degree() as usize;
            out_sum += tallies[v as usize].out_degree() as usize;
        }
        prop_assert_eq!(in_sum, g.edge_count());
        prop_assert_eq!(out_sum, g.edge_count());
        let (p, n, h) = g.sign_counts();
        prop_assert_eq!(p + n + h, g.edge_count());
    }

    #[test]
    fn mask_then_restore_is_identity(g in observed_graphs(), frac in 0.0f64..=1.0, seed in any::<u64>()) {
        let (masked, holdout) = mask_edges(&g, frac, seed).unwrap();
        prop_assert_eq!(holdout.edges.len(), mask_count(frac, g.edge_count()));
        prop_assert_eq!(masked.hidden_edges().len(), holdout.edges.len());
        prop_assert!(holdout.edges.windows(2).all(|w| w[0].edge < w[1].edge));
        for h in &holdout.edges {
            prop_assert_eq!(h.sign, g.sign(h.edge));
        }
        prop_assert!(masked.restore(&holdout).same_as(&g));
        prop_assert!(g.hide(&holdout).same_as(&masked));
        let (again, _) = mask_edges(&g, frac, seed).unwrap();
        prop_assert!(again.same_as(&masked));

        let mut buf = Vec::new();
        holdout.write(&g, &mut buf).unwrap();
        let back = Holdout::read(buf.as_slice(), &g).unwrap();
        prop_assert_eq!(back.edges, holdout.edges);
        prop_assert_eq!(back.seed, seed);
    }

    #[test]
    fn edge_list_round_trip(g in graphs()) {
        let mut buf = Vec::new();
        g.write_edge_list(&mut buf).unwrap();
        let back = load_edge_list(buf.as_slice()).unwrap();
        prop_assert_eq!(back.edge_count(), g.edge_count());
        for (a, b) in g.edges().zip(back.edges()) {
            prop_assert_eq!(g.label(a.source), back.label(b.source));
            prop_assert_eq!(g.label(a.target), back.label(b.target));
            prop_assert_eq!(a.sign, b.sign);
        }
    }

    #[test]
    fn common_neighbours_symmetric(g in graphs()) {
        let n = g.node_count() as NodeId;
        for x in 0..n.min(12) {
            for y in 0..n.min(12) {
                if x == y {
                    continue;
                }
                let a = g.common_neighbors(x, y).unwrap();
                let b = g.common_neighbors(y, x).unwrap();
                prop_assert_eq!(&a, &b);
                prop_assert!(!a.contains(&x) && !a.contains(&y));
                prop_assert_eq!(g.embeddedness(x, y).unwrap(), enumerate_embeddedness(&g, x, y));
            }
        }
    }

    #[test]
    fn classification_is_total(g in graphs()) {
        for v in 0..g.node_count() as NodeId {
            let c = counts(&g, v);
            let t = classify_node(&tally_of(&c), false);
            prop_assert_eq!(t.index(), type_index(class_of(c.in_pos, c.in_neg), class_of(c.out_pos, c.out_neg)));
        }
    }

    #[test]
    fn observed_types_never_contradict_signs(g in observed_graphs()) {
        let types: Vec<NodeTypeId> = g.tallies().iter().map(|t| classify_node(t, false)).collect();
        for e in g.edges() {
            let c = interaction_sign(types[e.source as usize], types[e.target as usize]);
            match c {
                SignConstraint::MustPositive => prop_assert_eq!(e.sign, Sign::Positive),
                SignConstraint::MustNegative => prop_assert_eq!(e.sign, Sign::Negative),
                SignConstraint::Undetermined => {}
                SignConstraint::Forbidden => prop_assert!(false, "observed edge between forbidden types"),
            }
        }
    }

    #[test]
    fn class_distribution_matches_enumeration(obs in 0u8..4, k in 0u32..=10, p in 0.0f64..=1.0) {
        let q = SignPrior::new(p);
        let (pos, neg) = match obs { 0 => (0, 0), 1 => (1, 0), 2 => (0, 1), _ => (1, 1) };
        let observed = EdgeClass::from_counts(pos, neg);
        let got = class_distribution(observed, k, q);
        let want = enumerate_class_distribution(pos, neg, k, q);
        for c in EdgeClass::ALL {
            prop_assert!((got.get(c) - want[class_code(c) as usize]).abs() < 1e-12,
                "{:?} k={} p={}: {} vs {}", c, k, p, got.get(c), want[class_code(c) as usize]);
        }
    }

    #[test]
    fn type_distribution_matches_enumeration(
        in_pos in 0u32..3, in_neg in 0u32..3, in_hidden in 0u32..7,
        out_pos in 0u32..3, out_neg in 0u32..3, out_hidden in 0u32..7,
        p_in in 0.0f64..=1.0, p_out in 0.0f64..=1.0,
    ) {
        let c = Counts { in_pos, in_neg, in_hidden, out_pos, out_neg, out_hidden };
        let (qi, qo) = (SignPrior::new(p_in), SignPrior::new(p_out));
        let got = bayes_type_distribution(&tally_of(&c), qi, qo);
        let want = enumerate_type_distribution(&c, qi, qo);
        for (a, b) in got.as_slice().iter().zip(&want) {
            prop_assert!((a - b).abs() < 1e-12, "{} vs {}", a, b);
        }
        prop_assert!((got.sum() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn node_type_distributions_are_normalised(g in graphs(), p in 0.01f64..0.99) {
        let prior = SignPrior::new(p);
        for t in g.tallies() {
            let d = node_type_distribution(&t, prior);
            prop_assert!(d.as_slice().iter().all(|&v| v >= 0.0));
            prop_assert!((d.sum() - 1.0).abs() < 1e-12);
            let b = bayes_node_properties(&t, prior);
            for v in b.to_array() {
                prop_assert!((0.0..=1.0).contains(&v));
            }
            prop_assert!(b.p_in_pos + b.p_in_neg <= 1.0 + 1e-12);
            prop_assert!(b.p_out_pos + b.p_out_neg <= 1.0 + 1e-12);
        }
    }

    #[test]
    fn hidden_edge_features_are_the_revealed_mixture(g in graphs(), p in 0.01f64..0.99) {
        let prior = SignPrior::new(p);
        for e in g.hidden_edges() {
            let edge = g.edge(e);
            for enc in [TypeEncoding::Concat, TypeEncoding::Kronecker] {
                let got = edge_type_features(&g, edge.source, edge.target, prior, enc).unwrap();
                let want = revealed_mixture(&g, e, prior, |h| {
                    edge_type_features(h, edge.source, edge.target, prior, enc).unwrap()
                });
                for (a, b) in got.iter().zip(&want) {
                    prop_assert!((a - b).abs() < 1e-12);
                }
                let total: f64 = got.iter().sum();
                let expect = if enc == TypeEncoding::Concat { 2.0 } else { 1.0 };
                prop_assert!((total - expect).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn triads_match_triple_loop(g in graphs()) {
        let n = g.node_count() as NodeId;
        for x in 0..n {
            for y in 0..n {
                if x == y {
                    continue;
                }
                let t = triad_features(&g, x, y).unwrap();
                prop_assert_eq!(t, enumerate_triads(&g, x, y));
                let back = triad_features(&g, y, x).unwrap();
                for (i, &count) in t.iter().enumerate() {
                    let c = TriadContext::from_index(i);
                    prop_assert_eq!(c.mirrored().mirrored(), c);
                    prop_assert_eq!(count, back[c.mirrored().index()]);
                }
                prop_assert!(t.iter().sum::<f64>() <= 4.0 * g.embeddedness(x, y).unwrap() as f64);
            }
        }
    }

    #[test]
    fn degree_features_match_counts(g in graphs()) {
        for e in g.edges() {
            let d = degree_features(&g, e.source, e.target).unwrap();
            let cx = counts(&g, e.source);
            let cy = counts(&g, e.target);
            prop_assert_eq!(d[0], cy.in_pos as f64);
            prop_assert_eq!(d[1], cy.in_neg as f64);
            prop_assert_eq!(d[2], cx.out_pos as f64);
            prop_assert_eq!(d[3], cx.out_neg as f64);
            prop_assert_eq!(d[4], enumerate_embeddedness(&g, e.source, e.target) as f64);
            prop_assert!(d[5] >= d[2] + d[3]);
            prop_assert!(d[6] >= d[0] + d[1]);
            prop_assert_eq!(d[5], (cx.out_pos + cx.out_neg + cx.out_hidden) as f64);
            prop_assert_eq!(d[6], (cy.in_pos + cy.in_neg + cy.in_hidden) as f64);
        }
    }

    #[test]
    fn design_rows_have_recipe_width(g in graphs()) {
        prop_assume!(global_sign_prior(&g).is_ok());
        let fx = FeatureExtractor::new(&g).unwrap();
        let recipe: FeatureRecipe = "bntk+bnp+triad+degree".parse().unwrap();
        let all: Vec<usize> = (0..g.edge_count()).collect();
        let d = fx.design(&recipe, &all);
        prop_assert_eq!(d.rows(), g.edge_count());
        prop_assert_eq!(d.cols(), 256 + 8 + 16 + 7);
        prop_assert!(d.check_finite().is_ok());
    }

    #[test]
    fn recipe_display_round_trips(mask in 1u8..32) {
        use signtypes::FeatureFamily;
        let fams: Vec<FeatureFamily> = FeatureFamily::ALL.into_iter().enumerate()
            .filter(|(i, _)| mask & (1 << i) != 0).map(|(_, f)| f).collect();
        match FeatureRecipe::new(fams.clone()) {
            Ok(r) => {
                let back: FeatureRecipe = r.to_string().to_lowercase().parse().unwrap();
                prop_assert_eq!(&back, &r);
                prop_assert_eq!(FeatureRecipe::from_manifest(&r.manifest()).unwrap(), r);
            }
            Err(_) => prop_assert!(fams.contains(&FeatureFamily::Bntc) && fams.contains(&FeatureFamily::Bntk)),
        }
    }
}
