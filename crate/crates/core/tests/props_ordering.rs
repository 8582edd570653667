mod common;

use proptest::prelude::*;

use common::{rule_and_proto, CAP};
use subst_sfc::ordering::{address_target, address_to_rank, ordered_supertile, power, rank_to_address};
use subst_sfc::substitution::expand_placed;
use subst_sfc::{Address, OrderSpec, PlacedTile, Point, SubstitutionRule, TileId};

/// Induced order built one level at a time from the raw child lists.
fn inductive(rule: &SubstitutionRule, order: &OrderSpec, p: TileId, n: u32) -> Vec<(Address, PlacedTile)> {
    let mut level = vec![(Address::root(), PlacedTile { proto: p, offset: Point::ORIGIN })];
    for _ in 0..n {
        let mut next = Vec::new();
        for (addr, t) in &level {
            let kids = expand_placed(t, rule).unwrap().tiles;
            let perm = order.get(rule, t.proto).unwrap();
            for (k, &j) in perm.iter().enumerate() {
                next.push((addr.child(k as u32 + 1), kids[j]));
            }
        }
        level = next;
    }
    level
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn rank_address_round_trip((rule, order, p) in rule_and_proto(), n in 0u32..=4) {
        let tiles = ordered_supertile(&rule, &order, p, n, CAP).unwrap();
        prop_assert_eq!(tiles.len() as u128, rule.tile_counts(n)[p.0]);
        for (i, t) in tiles.iter().enumerate() {
            let r = i as u128 + 1;
            prop_assert_eq!(address_to_rank(&rule, &order, p, &t.address).unwrap(), r);
            prop_assert_eq!(&rank_to_address(&rule, &order, p, n, r).unwrap(), &t.address);
            prop_assert_eq!(address_target(&rule, &order, p, &t.address).unwrap(), t.tile.proto);
        }
        prop_assert!(rank_to_address(&rule, &order, p, n, 0).is_err());
        prop_assert!(rank_to_address(&rule, &order, p, n, tiles.len() as u128 + 1).is_err());
    }

    #[test]
    fn induced_order_matches_recursion((rule, order, p) in rule_and_proto(), n in 0u32..=4) {
        let tiles = ordered_supertile(&rule, &order, p, n, CAP).unwrap();
        let oracle = inductive(&rule, &order, p, n);
        prop_assert_eq!(tiles.len(), oracle.len());
        for (t, (addr, placed)) in tiles.iter().zip(&oracle) {
            prop_assert_eq!(&t.address, addr);
            prop_assert_eq!(t.tile.proto, placed.proto);
            prop_assert!(t.tile.offset.dist(placed.offset) < 1e-9);
        }
        // Addresses increase lexicographically along the order.
        prop_assert!(tiles.windows(2).all(|w| w[0].address.digits() < w[1].address.digits()));
    }

    #[test]
    fn prefixes_are_contiguous((rule, order, p) in rule_and_proto(), n in 1u32..=4) {
        let deep = ordered_supertile(&rule, &order, p, n, CAP).unwrap();
        let shallow = ordered_supertile(&rule, &order, p, n - 1, CAP).unwrap();
        // Truncating the depth-n order gives the depth-(n-1) order, each
        // parent appearing once as a run of its children.
        let mut parents: Vec<Address> = deep.iter().map(|t| Address(t.address.digits()[..n as usize - 1].to_vec())).collect();
        parents.dedup();
        let want: Vec<Address> = shallow.iter().map(|t| t.address.clone()).collect();
        prop_assert_eq!(parents, want);
        for t in &deep {
            let parent = Address(t.address.digits()[..n as usize - 1].to_vec());
            prop_assert!(parent.is_prefix_of(&t.address));
        }
    }

    #[test]
    fn power_regroups_digits((rule, order, p) in rule_and_proto(), k in 1u32..=2, n in 1u32..=2) {
        let (pw, po) = power(&rule, &order, k, CAP).unwrap();
        let a = ordered_supertile(&rule, &order, p, k * n, CAP).unwrap();
        let b = ordered_supertile(&pw, &po, p, n, CAP).unwrap();
        prop_assert_eq!(a.len(), b.len());
        for (x, y) in a.iter().zip(&b) {
            prop_assert_eq!(x.tile.proto, y.tile.proto);
            prop_assert!(x.tile.offset.dist(y.tile.offset) < 1e-9 * x.tile.offset.norm().max(1.0));
        }
    }
}
