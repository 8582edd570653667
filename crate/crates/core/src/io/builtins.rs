//! Rules and seed patches compiled into the library.

use crate::curve::Seed;
use crate::error::{Error, Result};

use super::format::{parse_seed, parse_substitution, LoadedRule};

/// `(name, JSON source)` of every builtin rule.
pub const BUILTIN_RULES: &[(&str, &str)] = &[
    ("fib2d", include_str!("../../builtins/fib2d.json")),
    ("thue_morse_2d", include_str!("../../builtins/thue_morse_2d.json")),
    ("equithirds_variant", include_str!("../../builtins/equithirds_variant.json")),
];

/// `(name, rule name, JSON source)` of every builtin seed patch.
pub const BUILTIN_SEEDS: &[(&str, &str, &str)] = &[
    ("equithirds_a_pair", "equithirds_variant", include_str!("../../builtins/equithirds_a_pair.json")),
    ("equithirds_b_plus", "equithirds_variant", include_str!("../../builtins/equithirds_b_plus.json")),
];

pub fn builtin_source(name: &str) -> Option<&'static str> {
    BUILTIN_RULES.iter().find(|(n, _)| *n == name).map(|(_, s)| *s)
}

/// Loads and validates a builtin rule, optionally with a named order variant.
pub fn builtin_rule(name: &str, variant: Option<&str>) -> Result<LoadedRule> {
    let src = builtin_source(name).ok_or_else(|| {
        let known: Vec<&str> = BUILTIN_RULES.iter().map(|(n, _)| *n).collect();
        Error::Schema { path: "/".into(), message: format!("no builtin rule {name:?} (have {})", known.join(", ")) }
    })?;
    parse_substitution(src.as_bytes(), variant)
}

/// Loads a builtin seed patch against its rule.
pub fn builtin_seed(name: &str, rule: &LoadedRule) -> Result<Seed> {
    let (_, rule_name, src) = BUILTIN_SEEDS.iter().find(|(n, _, _)| *n == name).ok_or_else(|| {
        let known: Vec<&str> = BUILTIN_SEEDS.iter().map(|(n, _, _)| *n).collect();
        Error::Schema { path: "/".into(), message: format!("no builtin seed {name:?} (have {})", known.join(", ")) }
    })?;
    if rule.rule.name() != *rule_name {
        return Err(Error::SeedMismatch(format!("seed {name} belongs to {rule_name}, not {}", rule.rule.name())));
    }
    parse_seed(src.as_bytes(), &rule.rule)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_builtin_loads_and_validates() {
        for (name, _) in BUILTIN_RULES {
            let l = builtin_rule(name, None).unwrap();
            assert_eq!(l.rule.name(), *name);
            assert!(l.order.entries().iter().all(Option::is_some), "{name} has unordered prototiles");
        }
    }

    #[test]
    fn catalog_shapes() {
        assert_eq!(builtin_rule("fib2d", None).unwrap().rule.len(), 4);
        assert_eq!(builtin_rule("thue_morse_2d", Some("tm")).unwrap().rule.len(), 2);
        assert_eq!(builtin_rule("equithirds_variant", None).unwrap().rule.len(), 48);
        assert!(builtin_rule("thue_morse_2d", Some("hilbert")).is_err());
        assert!(builtin_rule("pinwheel", None).is_err());
    }

    #[test]
    fn seeds_load() {
        let eq = builtin_rule("equithirds_variant", None).unwrap();
        for (name, _, _) in BUILTIN_SEEDS {
            builtin_seed(name, &eq).unwrap();
        }
        let fib = builtin_rule("fib2d", None).unwrap();
        assert!(builtin_seed("equithirds_a_pair", &fib).is_err());
    }

    #[test]
    fn equithirds_b_curves_are_closed() {
        use crate::curve::chain_limit;
        let eq = builtin_rule("equithirds_variant", None).unwrap();
        for name in ["B+", "B-"] {
            let p = eq.rule.id_of(name).unwrap();
            let f0 = chain_limit(&eq.rule, &eq.order, p, false).unwrap();
            let f1 = chain_limit(&eq.rule, &eq.order, p, true).unwrap();
            assert!(f0.dist(f1) < 1e-12, "{name}: {f0:?} vs {f1:?}");
            // Both ends sit on the apex of the unit triangle.
            assert!(f0.dist(crate::geometry::Point::new(0.5, 3f64.sqrt() / 2.0)) < 1e-12);
        }
    }
}
