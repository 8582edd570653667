mod common;

use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;

use common::{rule_and_proto, CAP};
use subst_sfc::cantor::{cantor_level, gamma_inf, locate, max_length, Location};
use subst_sfc::ordering::{ordered_children, ordered_supertile};

fn rational() -> impl Strategy<Value = BigRational> {
    (1i64..1_000_000).prop_flat_map(|d| (0..=d, Just(d)))
        .prop_map(|(n, d)| BigRational::new(BigInt::from(n), BigInt::from(d)))
}

fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn levels_follow_supertiles((rule, order, p) in rule_and_proto(), n in 0u32..=5) {
        let level = cantor_level(&rule, &order, p, n, CAP).unwrap();
        let tiles = ordered_supertile(&rule, &order, p, n, CAP).unwrap();
        prop_assert_eq!(level.len() as u128, rule.tile_counts(n)[p.0]);
        for (node, t) in level.nodes.iter().zip(&tiles) {
            prop_assert_eq!(node.label, t.tile.proto);
            prop_assert_eq!(&node.address, &t.address);
            prop_assert_eq!(node.depth, n);
        }
        // Sorted, pairwise disjoint, with the right end always kept.
        prop_assert!(level.nodes.windows(2).all(|w| w[0].hi < w[1].lo));
        prop_assert!(level.nodes.iter().all(|x| x.lo < x.hi));
        prop_assert_eq!(&level.nodes.last().unwrap().hi, &q(1, 1));
        prop_assert_eq!(level.max_length(), max_length(&rule, &order, p, n).unwrap());
    }

    #[test]
    fn children_nest_in_parents((rule, order, p) in rule_and_proto(), n in 1u32..=5) {
        let parents = cantor_level(&rule, &order, p, n - 1, CAP).unwrap();
        let kids = cantor_level(&rule, &order, p, n, CAP).unwrap();
        let mut it = kids.nodes.iter().peekable();
        for parent in &parents.nodes {
            let m = ordered_children(&rule, &order, parent.label).unwrap().len();
            let mine: Vec<_> = std::iter::from_fn(|| it.next_if(|k| parent.address.is_prefix_of(&k.address))).collect();
            prop_assert_eq!(mine.len(), m);
            for k in &mine {
                prop_assert!(parent.lo <= k.lo && k.hi <= parent.hi);
            }
            // 2m-1 equal parts with the odd ones kept; a single child keeps the right half.
            let want = if m == 1 { parent.len() / q(2, 1) } else { parent.len() / q(2 * m as i64 - 1, 1) };
            prop_assert!(mine.iter().all(|k| k.len() == want));
            prop_assert_eq!(&mine[mine.len() - 1].hi, &parent.hi);
        }
        prop_assert!(it.next().is_none());
    }

    #[test]
    fn gamma_inf_is_first_chain((rule, order, p) in rule_and_proto(), n in 0u32..=3) {
        // The infimum of the Cantor set inside a node is the limit of the
        // first-child intervals, which shrink geometrically.
        let level = cantor_level(&rule, &order, p, n, CAP).unwrap();
        for node in &level.nodes {
            let g = gamma_inf(&rule, &order, node).unwrap();
            prop_assert!(node.contains(&g));
            let mut cur = node.clone();
            for _ in 0..24 {
                cur = subst_sfc::cantor::subdivide(&rule, &order, &cur).unwrap().swap_remove(0);
                prop_assert!(cur.contains(&g));
            }
        }
    }

    #[test]
    fn locate_agrees_with_scan((rule, order, p) in rule_and_proto(), n in 0u32..=4, t in rational()) {
        let level = cantor_level(&rule, &order, p, n, CAP).unwrap();
        let inside: Vec<usize> = level.nodes.iter().enumerate().filter(|(_, x)| x.contains(&t)).map(|(i, _)| i + 1).collect();
        match locate(&t, &level) {
            Location::Inside(i) => prop_assert_eq!(inside, vec![i]),
            Location::Gap(i, j) => {
                prop_assert!(inside.is_empty());
                prop_assert_eq!(j, i + 1);
                prop_assert!(level.nodes[i - 1].hi < t && t < level.nodes[j - 1].lo);
            }
            Location::Before => prop_assert!(t < level.nodes[0].lo),
            Location::After => prop_assert!(false, "right end is always covered"),
        }
    }
}
