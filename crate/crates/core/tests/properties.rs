use num_bigint::BigUint;
use proptest::prelude::*;

use geode_core::checkpoint::{read_checkpoint, write_checkpoint};
use geode_core::geode::GSlice;
use geode_core::grid::SliceGrid;
use geode_core::hypercat::{hyper_catalan, neighbor_ratio, CSlice};
use geode_core::subdigon::{enumerate_trees, PlaneTree};
use geode_core::typevec::{Shape, TypeVector};

fn type_vector(max: u32) -> impl Strategy<Value = TypeVector> {
    prop::array::uniform4(0..=max).prop_map(TypeVector)
}

fn grid(side: usize) -> impl Strategy<Value = SliceGrid> {
    prop::collection::vec(prop::collection::vec(any::<u32>(), 1..4), side * side).prop_map(
        move |cells| {
            let cells = cells
                .into_iter()
                .map(|digits| BigUint::new(digits) + 1u32)
                .collect();
            SliceGrid::from_cells(side, cells)
        },
    )
}

fn slice_pair() -> impl Strategy<Value = (u32, u32, SliceGrid, SliceGrid)> {
    (0u32..5).prop_flat_map(|n| (Just(n), 0..=n, grid(n as usize + 1), grid(n as usize + 1)))
}

proptest! {
    #[test]
    fn euler_relation(m in type_vector(1000)) {
        prop_assert_eq!(m.vertices() + m.faces(), m.edges() + 1);
    }

    #[test]
    fn type_vector_text_round_trip(m in type_vector(u32::MAX)) {
        prop_assert_eq!(m.to_string().parse::<TypeVector>().unwrap(), m);
    }

    #[test]
    fn neighbor_ratio_is_exact(m in type_vector(25), j in 0usize..4, k in 0usize..4) {
        prop_assume!(j < k);
        let (j, k) = (Shape::ALL[j], Shape::ALL[k]);
        prop_assume!(m.get(j) > 0);
        let to = m.decremented(j).unwrap().incremented(k);
        prop_assert_eq!(neighbor_ratio(m, j, k).apply(&hyper_catalan(m)), hyper_catalan(to));
    }

    #[test]
    fn checkpoint_round_trip((n, s, cg, gg) in slice_pair()) {
        let c = CSlice { n, s, grid: cg };
        let g = GSlice { n, s, grid: gg };
        let mut bytes = Vec::new();
        write_checkpoint(&mut bytes, n, s, &c, &g).unwrap();
        let back = read_checkpoint(bytes.as_slice()).unwrap();
        prop_assert_eq!((back.n, back.s), (n, s));
        prop_assert_eq!(back.c, c);
        prop_assert_eq!(back.g, g);
    }

    #[test]
    fn tree_text_round_trip(m in type_vector(2), pick in any::<prop::sample::Index>()) {
        prop_assume!(hyper_catalan(m) <= BigUint::from(2000u32));
        let trees = enumerate_trees(m).unwrap();
        let tree = &trees[pick.index(trees.len())];
        prop_assert_eq!(tree.type_vector(), m);
        prop_assert_eq!(&tree.to_string().parse::<PlaneTree>().unwrap(), tree);
    }
}
