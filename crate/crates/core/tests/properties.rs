use mgcbs::graph::{parse_map, serialize_map, InstanceFile};
use mgcbs::harness::gen_instances;
use mgcbs::{Constraint, ConstraintSet, Graph, TimeInterval};
use proptest::prelude::*;

fn grid() -> impl Strategy<Value = Vec<Vec<bool>>> {
    (1usize..8, 1usize..8).prop_flat_map(|(h, w)| prop::collection::vec(prop::collection::vec(any::<bool>(), w), h))
}

proptest! {
    #[test]
    fn adjacency_is_symmetric_and_sorted(rows in grid()) {
        let g = Graph::from_passability(&rows);
        for v in 0..g.vertex_count() {
            let ns = g.neighbors(v);
            prop_assert!(ns.windows(2).all(|p| p[0] < p[1]));
            for &u in ns {
                prop_assert!(g.neighbors(u).contains(&v));
                let (a, b) = (g.coord(u), g.coord(v));
                prop_assert_eq!(a.0.abs_diff(b.0) + a.1.abs_diff(b.1), 1);
            }
        }
        prop_assert_eq!(g.edge_count() * 2, (0..g.vertex_count()).map(|v| g.neighbors(v).len()).sum::<usize>());
    }

    #[test]
    fn map_text_roundtrips(rows in grid()) {
        let g = Graph::from_passability(&rows);
        let back = parse_map(&serialize_map(&g)).unwrap();
        prop_assert_eq!(back.passability(), rows);
    }

    #[test]
    fn instance_json_roundtrips(seed in any::<u64>(), k in 1usize..4, n in 1usize..4) {
        let g = parse_map("type octile\nheight 4\nwidth 5\nmap\n.....\n.@.@.\n.....\n..@..\n").unwrap();
        for inst in gen_instances(&g, "m", k, n, 3, seed).unwrap() {
            let text = InstanceFile::from_instance(&inst, &g).to_json();
            let back = mgcbs::graph::load_instance(&text, &g).unwrap();
            prop_assert_eq!(back, inst);
        }
    }

    #[test]
    fn safe_intervals_are_maximal_and_disjoint(times in prop::collection::vec(0u32..30, 0..10)) {
        let set: ConstraintSet = times.iter().map(|&t| Constraint::Vertex { agent: 0, time: t, at: 2 }).collect();
        let ivs = set.for_agent(0).safe_intervals(2);
        for w in ivs.windows(2) {
            prop_assert!(w[0].hi + 1 < w[1].lo);
        }
        for t in 0..40 {
            let covered = ivs.iter().filter(|iv| iv.contains(t)).count();
            prop_assert_eq!(covered, usize::from(!times.contains(&t)));
        }
        prop_assert!(ivs.last().is_none_or(TimeInterval::is_unbounded));
    }
}
