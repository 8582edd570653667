#![allow(dead_code)]

use proptest::prelude::*;

use subst_sfc::io::{builtin_rule, BUILTIN_RULES};
use subst_sfc::{OrderSpec, SubstitutionRule, TileId};

pub const CAP: u128 = 1 << 22;

pub fn builtin(i: usize) -> (SubstitutionRule, OrderSpec) {
    let l = builtin_rule(BUILTIN_RULES[i].0, None).unwrap();
    (l.rule, l.order)
}

/// A builtin rule with every 1-supertile order replaced by a random permutation.
pub fn shuffled_rule() -> impl Strategy<Value = (SubstitutionRule, OrderSpec)> {
    (0..BUILTIN_RULES.len()).prop_flat_map(|i| {
        let (rule, _) = builtin(i);
        let perms: Vec<_> = rule
            .ids()
            .map(|q| Just((0..rule.children(q).len()).collect::<Vec<usize>>()).prop_shuffle())
            .collect();
        (Just(rule), perms).prop_map(|(rule, perms)| {
            let order = OrderSpec::new(&rule, perms.into_iter().map(Some).collect()).unwrap();
            (rule, order)
        })
    })
}

/// A builtin rule with its shipped order, or a shuffled one, plus a prototile.
pub fn rule_and_proto() -> impl Strategy<Value = (SubstitutionRule, OrderSpec, TileId)> {
    let shipped = (0..BUILTIN_RULES.len()).prop_map(builtin);
    prop_oneof![shipped, shuffled_rule()].prop_flat_map(|(rule, order)| {
        let k = rule.len();
        (Just(rule), Just(order), (0..k).prop_map(TileId))
    })
}
