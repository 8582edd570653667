//! The JSON substitution format.
//!
//! ```json
//! {
//!   "name": "example",
//!   "lambda": "sqrt3",
//!   "prototiles": [{"id": "B", "vertices": [[0, 0], [1, 0], ["1/2", "sqrt3/2"]], "rotations": [0, 120, 240]}],
//!   "children": {"B": [{"proto": "B", "rotation": 120, "offset": [0, 0]}]},
//!   "order": {"B": [0]}
//! }
//! ```
//!
//! Scalars are JSON numbers or expression strings (see [`super::expr`]). A
//! prototile with `rotations` expands into one prototile per angle, named
//! `id@angle` (angle 0 keeps `id`); children and orders are written once for
//! the unrotated shape and rotated along with it. Several visit orders may be
//! shipped as `order_variants` with a `default_order`.

use std::collections::BTreeMap;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use super::expr::eval_expr;
use crate::curve::{Orientation, Seed, SeedTile};
use crate::error::{Error, Result};
use crate::geometry::{Point, Polygon, Tolerance};
use crate::ordering::OrderSpec;
use crate::substitution::{validate_substitution, PlacedTile, Prototile, SubstitutionRule, TileId};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Scalar {
    Num(f64),
    Expr(String),
}

impl Scalar {
    pub fn value(&self) -> Result<f64> {
        match self {
            Scalar::Num(v) if v.is_finite() => Ok(*v),
            Scalar::Num(_) => Err(Error::NonFinite),
            Scalar::Expr(s) => eval_expr(s),
        }
    }
}

impl From<f64> for Scalar {
    fn from(v: f64) -> Self {
        Scalar::Num(v)
    }
}

pub type OrderMap = BTreeMap<String, Vec<usize>>;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProtoDef {
    pub id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    pub vertices: Vec<[Scalar; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rotations: Option<Vec<Scalar>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChildDef {
    pub proto: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rotation: Option<Scalar>,
    pub offset: [Scalar; 2],
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SubstitutionFile {
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub description: Option<String>,
    pub lambda: Scalar,
    pub prototiles: Vec<ProtoDef>,
    pub children: BTreeMap<String, Vec<ChildDef>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub order: Option<OrderMap>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub order_variants: Option<BTreeMap<String, OrderMap>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub default_order: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SeedDef {
    pub proto: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rotation: Option<Scalar>,
    pub offset: [Scalar; 2],
    #[serde(default)]
    pub orientation: Orientation,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SeedFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rule: Option<String>,
    pub tiles: Vec<SeedDef>,
}

/// A rule with its visit order and the file it came from.
#[derive(Clone, Debug)]
pub struct LoadedRule {
    pub rule: SubstitutionRule,
    pub order: OrderSpec,
    pub source: SubstitutionFile,
}

fn schema(path: impl Into<String>, message: impl Into<String>) -> Error {
    Error::Schema { path: path.into(), message: message.into() }
}

/// Deserialises with a JSON-pointer path on type errors.
fn from_bytes<T: DeserializeOwned>(bytes: &[u8]) -> Result<T> {
    let mut de = serde_json::Deserializer::from_slice(bytes);
    let value: T = serde_path_to_error::deserialize(&mut de).map_err(|e| {
        let mut pointer = String::new();
        for seg in e.path().iter() {
            use serde_path_to_error::Segment;
            match seg {
                Segment::Seq { index } => pointer.push_str(&format!("/{index}")),
                Segment::Map { key } => pointer.push_str(&format!("/{}", key.replace('~', "~0").replace('/', "~1"))),
                Segment::Enum { variant } => pointer.push_str(&format!("/{variant}")),
                Segment::Unknown => pointer.push_str("/?"),
            }
        }
        schema(if pointer.is_empty() { "/".to_string() } else { pointer }, e.inner().to_string())
    })?;
    de.end().map_err(|e| schema("/", e.to_string()))?;
    Ok(value)
}

/// Angle in `[0, 360)`, snapped to whole degrees when within `1e-9`.
fn normalize_angle(deg: f64) -> f64 {
    let r = deg.rem_euclid(360.0);
    let whole = r.round();
    let r = if (r - whole).abs() < 1e-9 { whole } else { r };
    if r >= 360.0 {
        0.0
    } else {
        r
    }
}

/// Prototile name of `base` rotated by `deg`.
pub fn rotated_name(base: &str, deg: f64) -> String {
    let a = normalize_angle(deg);
    if a == 0.0 {
        base.to_string()
    } else if a.fract() == 0.0 {
        format!("{base}@{}", a as i64)
    } else {
        format!("{base}@{a}")
    }
}

fn point(pair: &[Scalar; 2], path: &str) -> Result<Point> {
    let x = pair[0].value().map_err(|e| schema(format!("{path}/0"), e.to_string()))?;
    let y = pair[1].value().map_err(|e| schema(format!("{path}/1"), e.to_string()))?;
    Ok(Point::new(x, y))
}

impl SubstitutionFile {
    /// Builds the rule and the requested visit order (`variant` picks from
    /// `order_variants`; `None` means `order` or `default_order`).
    pub fn build(&self, variant: Option<&str>) -> Result<(SubstitutionRule, OrderSpec)> {
        let lambda = self.lambda.value().map_err(|e| schema("/lambda", e.to_string()))?;
        let tol = Tolerance::default();

        // Prototiles with their rotation copies: (base index, angle).
        let mut prototiles = Vec::new();
        let mut origin: Vec<(usize, f64)> = Vec::new();
        for (i, def) in self.prototiles.iter().enumerate() {
            let path = format!("/prototiles/{i}");
            // '@' marks generated rotation names, so only a prototile that
            // generates none may carry one (as files written by `from_rule` do).
            if def.id.is_empty() || (def.rotations.is_some() && def.id.contains('@')) {
                return Err(schema(format!("{path}/id"), "ids must be non-empty; ids with rotations must not contain '@'"));
            }
            let verts = def
                .vertices
                .iter()
                .enumerate()
                .map(|(k, v)| point(v, &format!("{path}/vertices/{k}")))
                .collect::<Result<Vec<_>>>()?;
            let base = Polygon::new(verts, tol).map_err(|e| schema(format!("{path}/vertices"), e.to_string()))?;
            let angles = match &def.rotations {
                None => vec![0.0],
                Some(list) => list
                    .iter()
                    .enumerate()
                    .map(|(k, a)| a.value().map_err(|e| schema(format!("{path}/rotations/{k}"), e.to_string())))
                    .collect::<Result<Vec<_>>>()?,
            };
            for a in angles {
                let a = normalize_angle(a);
                prototiles.push(Prototile {
                    name: rotated_name(&def.id, a),
                    label: def.label.clone().unwrap_or_else(|| def.id.clone()),
                    support: if a == 0.0 { base.clone() } else { base.rotate_deg(a) },
                });
                origin.push((i, a));
            }
        }
        for (k, p) in prototiles.iter().enumerate() {
            if prototiles[..k].iter().any(|q| q.name == p.name) {
                let (i, _) = origin[k];
                return Err(schema(format!("/prototiles/{i}/id"), format!("duplicate prototile {:?}", p.name)));
            }
        }
        let index = |name: &str| prototiles.iter().position(|p| p.name == name);

        for key in self.children.keys() {
            if !self.prototiles.iter().any(|d| &d.id == key) {
                return Err(schema(format!("/children/{key}"), format!("unknown prototile {key:?}")));
            }
        }
        let mut children = Vec::with_capacity(prototiles.len());
        for &(base, angle) in &origin {
            let id = &self.prototiles[base].id;
            let defs = self
                .children
                .get(id)
                .ok_or_else(|| schema(format!("/children/{id}"), "missing child list"))?;
            let mut list = Vec::with_capacity(defs.len());
            for (k, c) in defs.iter().enumerate() {
                let path = format!("/children/{id}/{k}");
                let rot = match &c.rotation {
                    None => 0.0,
                    Some(r) => r.value().map_err(|e| schema(format!("{path}/rotation"), e.to_string()))?,
                };
                let name = rotated_name(&c.proto, rot + angle);
                let proto = index(&name).ok_or_else(|| {
                    schema(format!("{path}/proto"), format!("unknown prototile {name:?}"))
                })?;
                let offset = point(&c.offset, &format!("{path}/offset"))?;
                let offset = if angle == 0.0 { offset } else { offset.rotate_deg(angle) };
                list.push(PlacedTile { proto: TileId(proto), offset });
            }
            children.push(list);
        }
        let rule = SubstitutionRule::new(self.name.clone(), lambda, prototiles, children)?;

        let (orders, path) = self.select_order(variant)?;
        let mut entries: Vec<Option<Vec<usize>>> = vec![None; rule.len()];
        if let Some(map) = orders {
            for (key, perm) in map {
                let Some(base) = self.prototiles.iter().position(|d| &d.id == key) else {
                    return Err(schema(format!("{path}/{key}"), format!("unknown prototile {key:?}")));
                };
                for (slot, &(b, _)) in origin.iter().enumerate() {
                    if b == base {
                        entries[slot] = Some(perm.clone());
                    }
                }
            }
        }
        let order = OrderSpec::new(&rule, entries).map_err(|e| schema(path, e.to_string()))?;
        Ok((rule, order))
    }

    fn select_order(&self, variant: Option<&str>) -> Result<(Option<&OrderMap>, String)> {
        let variants = self.order_variants.as_ref();
        match (variant, variants) {
            (Some(v), Some(map)) => map
                .get(v)
                .map(|o| (Some(o), format!("/order_variants/{v}")))
                .ok_or_else(|| {
                    let known: Vec<&str> = map.keys().map(String::as_str).collect();
                    schema("/order_variants", format!("no order variant {v:?} (have {})", known.join(", ")))
                }),
            (Some(v), None) => Err(schema("/order_variants", format!("no order variants; asked for {v:?}"))),
            (None, _) => {
                if let Some(o) = &self.order {
                    return Ok((Some(o), "/order".into()));
                }
                match (&self.default_order, variants) {
                    (Some(d), Some(map)) => map
                        .get(d)
                        .map(|o| (Some(o), format!("/order_variants/{d}")))
                        .ok_or_else(|| schema("/default_order", format!("no order variant {d:?}"))),
                    (Some(d), None) => Err(schema("/default_order", format!("no order variant {d:?}"))),
                    (None, _) => Ok((None, "/order".into())),
                }
            }
        }
    }

    /// A file describing `rule` with plain numbers, one prototile per entry.
    pub fn from_rule(rule: &SubstitutionRule, order: &OrderSpec) -> SubstitutionFile {
        let pair = |p: Point| [Scalar::Num(p.x), Scalar::Num(p.y)];
        let prototiles = rule
            .prototiles()
            .iter()
            .map(|p| ProtoDef {
                id: p.name.clone(),
                label: Some(p.label.clone()),
                vertices: p.support.vertices().iter().map(|&v| pair(v)).collect(),
                rotations: None,
            })
            .collect();
        let children = rule
            .ids()
            .map(|id| {
                let list = rule
                    .children(id)
                    .iter()
                    .map(|c| ChildDef { proto: rule.name_of(c.proto).to_string(), rotation: None, offset: pair(c.offset) })
                    .collect();
                (rule.name_of(id).to_string(), list)
            })
            .collect();
        let orders: OrderMap = rule
            .ids()
            .zip(order.entries())
            .filter_map(|(id, o)| o.clone().map(|o| (rule.name_of(id).to_string(), o)))
            .collect();
        SubstitutionFile {
            name: rule.name().to_string(),
            description: None,
            lambda: Scalar::Num(rule.lambda()),
            prototiles,
            children,
            order: Some(orders),
            order_variants: None,
            default_order: None,
        }
    }
}

/// Parses a rule file without geometric validation.
pub fn load_substitution(bytes: &[u8], variant: Option<&str>) -> Result<LoadedRule> {
    let source: SubstitutionFile = from_bytes(bytes)?;
    let (rule, order) = source.build(variant)?;
    Ok(LoadedRule { rule, order, source })
}

/// Parses and validates a rule file; a failed check yields `Error::Validation`.
pub fn parse_substitution(bytes: &[u8], variant: Option<&str>) -> Result<LoadedRule> {
    let loaded = load_substitution(bytes, variant)?;
    let report = validate_substitution(&loaded.rule, Tolerance::default());
    if !report.passed() {
        return Err(Error::Validation(report));
    }
    Ok(loaded)
}

/// Pretty-printed JSON. Expression strings are written back verbatim.
pub fn emit_json(file: &SubstitutionFile) -> Result<String> {
    Ok(serde_json::to_string_pretty(file)?)
}

/// Parses a seed patch against `rule`.
pub fn parse_seed(bytes: &[u8], rule: &SubstitutionRule) -> Result<Seed> {
    let file: SeedFile = from_bytes(bytes)?;
    if file.tiles.is_empty() {
        return Err(schema("/tiles", "seed patch has no tiles"));
    }
    let mut tiles = Vec::with_capacity(file.tiles.len());
    for (k, t) in file.tiles.iter().enumerate() {
        let path = format!("/tiles/{k}");
        let rot = match &t.rotation {
            None => 0.0,
            Some(r) => r.value().map_err(|e| schema(format!("{path}/rotation"), e.to_string()))?,
        };
        let name = rotated_name(&t.proto, rot);
        let proto = rule.id_of(&name).map_err(|_| schema(format!("{path}/proto"), format!("unknown prototile {name:?}")))?;
        tiles.push(SeedTile { proto, offset: point(&t.offset, &format!("{path}/offset"))?, orientation: t.orientation });
    }
    Ok(Seed::Patch(tiles))
}
