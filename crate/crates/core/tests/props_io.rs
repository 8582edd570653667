mod common;

use proptest::prelude::*;

use common::shuffled_rule;
use subst_sfc::io::expr::eval_expr;
use subst_sfc::io::{emit_json, emit_svg, load_substitution, RenderOptions, SubstitutionFile, SvgObject};
use subst_sfc::Point;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn rule_files_round_trip((rule, order) in shuffled_rule()) {
        let text = emit_json(&SubstitutionFile::from_rule(&rule, &order)).unwrap();
        let back = load_substitution(text.as_bytes(), None).unwrap();
        prop_assert_eq!(back.rule.lambda(), rule.lambda());
        prop_assert_eq!(back.rule.len(), rule.len());
        for q in rule.ids() {
            prop_assert_eq!(back.rule.name_of(q), rule.name_of(q));
            prop_assert_eq!(back.rule.prototile(q).support.vertices(), rule.prototile(q).support.vertices());
            prop_assert_eq!(back.rule.children(q), rule.children(q));
            prop_assert_eq!(back.order.get(&back.rule, q).unwrap(), order.get(&rule, q).unwrap());
        }
        // Emitting twice gives the same bytes, and so does re-emitting the reload.
        prop_assert_eq!(&text, &emit_json(&SubstitutionFile::from_rule(&rule, &order)).unwrap());
        prop_assert_eq!(&text, &emit_json(&SubstitutionFile::from_rule(&back.rule, &back.order)).unwrap());
    }

    #[test]
    fn expressions_match_arithmetic(a in -1000i32..1000, b in 1i32..1000, c in -20i32..20) {
        let (af, bf, cf) = (a as f64, b as f64, c as f64);
        prop_assert_eq!(eval_expr(&format!("{a} + {b} * {c}")).unwrap(), af + bf * cf);
        prop_assert_eq!(eval_expr(&format!("({a} - {c}) / {b}")).unwrap(), (af - cf) / bf);
        prop_assert_eq!(eval_expr(&format!("-({a})")).unwrap(), -af);
        prop_assert_eq!(eval_expr(&format!("sqrt({b}) * phi")).unwrap(), bf.sqrt() * ((1.0 + 5f64.sqrt()) / 2.0));
    }

    #[test]
    fn svg_is_deterministic(pts in prop::collection::vec((-1e3..1e3f64, -1e3..1e3f64), 2..40), fill: bool) {
        let points: Vec<Point> = pts.into_iter().map(|(x, y)| Point::new(x, y)).collect();
        let objs = [SvgObject::Polyline { points: points.clone(), class: 0 }, SvgObject::Region { points, class: 1 }];
        let opts = RenderOptions { fill, ..RenderOptions::default() };
        let a = emit_svg(&objs, &opts).unwrap();
        prop_assert_eq!(&a, &emit_svg(&objs, &opts).unwrap());
        prop_assert!(a.starts_with("<?xml") && a.ends_with("</svg>\n"));
        prop_assert_eq!(a.matches("<path").count(), 2);
    }
}

/// Every key the schema allows is accepted by the loader, and vice versa.
#[test]
fn schema_matches_loader() {
    let schema: serde_json::Value = serde_json::from_str(include_str!("../schema/substitution.schema.json")).unwrap();
    let mut keys: Vec<&str> = schema["properties"].as_object().unwrap().keys().map(String::as_str).collect();
    keys.sort_unstable();
    let mut want = ["name", "description", "lambda", "prototiles", "children", "order", "order_variants", "default_order"];
    want.sort_unstable();
    assert_eq!(keys, want);
    let full = r#"{"name": "s", "description": "d", "lambda": "2",
        "prototiles": [{"id": "S", "label": "S", "vertices": [[0,0],[1,0],[1,1],[0,1]], "rotations": [0]}],
        "children": {"S": [{"proto": "S", "rotation": 0, "offset": [0,0]}, {"proto": "S", "offset": [1,0]},
                           {"proto": "S", "offset": [1,1]}, {"proto": "S", "offset": [0,1]}]},
        "order_variants": {"z": {"S": [0, 1, 3, 2]}}, "default_order": "z"}"#;
    assert!(load_substitution(full.as_bytes(), None).is_ok());
    let proto_keys: Vec<&str> =
        schema["properties"]["prototiles"]["items"]["properties"].as_object().unwrap().keys().map(String::as_str).collect();
    assert_eq!(proto_keys.len(), 4);
}
