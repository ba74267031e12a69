use degree_ldp::{load_edge_list_str, Graph};
use proptest::prelude::*;

fn arb_graph() -> impl proptest::strategy::Strategy<Value = Graph> {
    (1usize..40).prop_flat_map(|n| {
        proptest::collection::vec((0..n as u32, 0..n as u32), 0..120)
            .prop_map(move |edges| Graph::from_edges(n, edges).unwrap())
    })
}

proptest! {
    #[test]
    fn dump_then_load_is_identity(g in arb_graph()) {
        let mut buf = Vec::new();
        g.write_edge_list(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let reloaded = load_edge_list_str(&text).unwrap();
        prop_assert_eq!(reloaded.node_count(), g.node_count());
        prop_assert_eq!(reloaded.edge_count(), g.edge_count());
        prop_assert_eq!(reloaded.degree_sequence(), g.degree_sequence());
        prop_assert!(g.edges().all(|(a, b)| reloaded.has_edge(a, b)));
    }

    #[test]
    fn adjacency_is_symmetric(g in arb_graph()) {
        let n = g.node_count() as u32;
        for a in 0..n {
            for &b in g.neighbors(a) {
                prop_assert!(a != b);
                prop_assert!(g.has_edge(b, a));
            }
        }
        let total: u32 = g.degree_sequence().iter().sum();
        prop_assert_eq!(total as usize, 2 * g.edge_count());
    }
}

#[test]
fn snap_style_file() {
    let text = "# Directed graph\n# Nodes: 4 Edges: 4\n10\t20\n20 30\n\n30\t10\n40 40\n20 10\n";
    let g = load_edge_list_str(text).unwrap();
    assert_eq!(g.node_count(), 4);
    assert_eq!(g.edge_count(), 3);
    assert_eq!(g.degree(g.node_id("40").unwrap()), 0);
    let err = load_edge_list_str("1 2\n3\n").unwrap_err();
    assert!(err.to_string().contains('2'), "{err}");
}
