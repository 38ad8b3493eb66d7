use std::sync::OnceLock;

use hq_core::blocks::{blowup, margin_bracket, mcdiarmid_bound};
use hq_core::certify::{goodman_count, goodman_count_all_triangles, seeded_coloring, EdgeColoring};
use hq_core::field::{Elem, Field};
use hq_core::search::{SearchState, TriangleIndex};
use hq_core::triangles::{classify_triangle, TriangleFamily};
use hq_core::{Graph, IntersectionGraph};
use num_rational::Ratio;
use proptest::prelude::*;

fn h3() -> &'static IntersectionGraph {
    static G: OnceLock<IntersectionGraph> = OnceLock::new();
    G.get_or_init(|| IntersectionGraph::new(3).unwrap())
}

fn fam3() -> &'static TriangleFamily<'static> {
    static F: OnceLock<TriangleFamily<'static>> = OnceLock::new();
    F.get_or_init(|| TriangleFamily::build(h3()).unwrap())
}

fn index3() -> &'static TriangleIndex {
    static I: OnceLock<TriangleIndex> = OnceLock::new();
    I.get_or_init(|| TriangleIndex::build(fam3()).unwrap())
}

fn quadratic_field() -> impl Strategy<Value = Field> {
    prop::sample::select(vec![(2u32, 2u32), (3, 2), (2, 4), (5, 2), (7, 2), (2, 6), (3, 4)])
        .prop_map(|(p, k)| Field::new(p, k).unwrap())
}

fn graph_strategy() -> impl Strategy<Value = Graph> {
    (1usize..24).prop_flat_map(|n| {
        prop::collection::vec((0..n as u32, 0..n as u32), 0..n * 3).prop_map(move |pairs| {
            let edges = pairs.into_iter().filter(|(u, v)| u != v);
            Graph::from_edges(n, edges).unwrap()
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn norm_is_multiplicative_and_lands_in_base(f in quadratic_field(), a in any::<u32>(), b in any::<u32>()) {
        let (x, y) = (Elem(a % f.order()), Elem(b % f.order()));
        let nx = f.norm(x).unwrap();
        prop_assert_eq!(f.norm(f.mul(x, y)).unwrap(), f.mul(nx, f.norm(y).unwrap()));
        prop_assert!(f.base_field_elements().unwrap().contains(&nx));
    }

    #[test]
    fn field_distributes(f in quadratic_field(), a in any::<u32>(), b in any::<u32>(), c in any::<u32>()) {
        let [x, y, z] = [a, b, c].map(|v| Elem(v % f.order()));
        prop_assert_eq!(f.mul(x, f.add(y, z)), f.add(f.mul(x, y), f.mul(x, z)));
        if !y.is_zero() {
            prop_assert_eq!(f.mul(f.div(x, y).unwrap(), y), x);
        }
    }

    #[test]
    fn goodman_identities_hold(seed in any::<u64>()) {
        let g = h3();
        let c = seeded_coloring(g.graph(), seed, 0);
        let t = goodman_count(fam3(), &c).unwrap();
        prop_assert_eq!(3 * t.monochromatic + t.non_monochromatic(), t.sum());
        prop_assert_eq!(goodman_count(fam3(), &c.swapped()).unwrap().monochromatic, t.monochromatic);
        for v in 0..g.n() {
            prop_assert!(t.red[v] + t.blue[v] >= 24 * 2);
        }
    }

    #[test]
    fn classification_ignores_order(a in 0u32..63, b in 0u32..63, c in 0u32..63) {
        prop_assume!(a != b && b != c && a != c);
        let g = h3();
        let k = classify_triangle(g, a, b, c);
        prop_assert_eq!(classify_triangle(g, c, a, b), k);
        prop_assert_eq!(classify_triangle(g, b, c, a), k);
        prop_assert_eq!(classify_triangle(g, b, a, c), k);
    }

    #[test]
    fn incremental_objective_tracks_recount(seed in any::<u64>(), flips in prop::collection::vec(0usize..1008, 1..200)) {
        let index = index3();
        let mut s = SearchState::new(index, seeded_coloring(h3().graph(), seed, 1));
        for e in flips {
            s.flip(index, e);
        }
        prop_assert_eq!(s.objective, index.count_mono(&s.coloring));
        let fresh = SearchState::new(index, s.coloring.clone());
        for e in 0..1008 {
            prop_assert_eq!(s.flip_delta(e), fresh.flip_delta(e));
        }
    }

    #[test]
    fn all_triangle_count_swaps(g in graph_strategy(), seed in any::<u64>()) {
        let c = seeded_coloring(&g, seed, 0);
        let a = goodman_count_all_triangles(&c).unwrap();
        prop_assert_eq!(goodman_count_all_triangles(&c.swapped()).unwrap(), a);
        let all_red = EdgeColoring::monochrome(&g, hq_core::certify::Color::Red);
        prop_assert_eq!(goodman_count_all_triangles(&all_red).unwrap(), g.triangle_count());
    }

    #[test]
    fn blowup_has_mt2_edges(g in graph_strategy(), t in 1usize..4) {
        let b = blowup(&g, t);
        prop_assert_eq!(b.n(), g.n() * t);
        prop_assert_eq!(b.m(), g.m() * t * t);
        if g.is_triangle_free() {
            prop_assert!(b.is_triangle_free());
        }
    }

    #[test]
    fn mcdiarmid_decreases(e in 0.1f64..100.0, d1 in 0.0f64..1.0, d2 in 0.0f64..1.0, k in 1usize..30) {
        let c = vec![1.0; k];
        let (lo, hi) = if d1 < d2 { (d1, d2) } else { (d2, d1) };
        prop_assert!(mcdiarmid_bound(e, &c, hi).ln <= mcdiarmid_bound(e, &c, lo).ln);
        prop_assert!(mcdiarmid_bound(e * 1.5, &c, hi).ln <= mcdiarmid_bound(e, &c, hi).ln);
    }

    #[test]
    fn bracket_decreases_in_delta(num in 0u64..66, d1 in 0.0f64..1.0, d2 in 0.0f64..1.0) {
        let alpha = Ratio::new(num, 100);
        let (lo, hi) = if d1 < d2 { (d1, d2) } else { (d2, d1) };
        prop_assert!(margin_bracket(alpha, hi) <= margin_bracket(alpha, lo) + 1e-15);
    }
}
