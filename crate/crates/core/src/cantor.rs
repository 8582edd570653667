//! The labelled Cantor hierarchy on `[0, 1]`.
//!
//! An interval labelled `q` with `m = |ω(q)| ≥ 2` children is cut into
//! `2m − 1` equal parts and the odd parts are kept, labelled by the children
//! in visit order. A single child keeps the right half. Endpoints are exact
//! rationals, so the `k`-th interval of level `n` and the `k`-th tile of the
//! induced order share one address.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::ordering::{ordered_children, Address, OrderSpec};
use crate::substitution::{SubstitutionRule, TileId};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntervalNode {
    pub lo: BigRational,
    pub hi: BigRational,
    pub label: TileId,
    pub depth: u32,
    pub address: Address,
}

impl IntervalNode {
    pub fn root(p: TileId) -> Self {
        IntervalNode {
            lo: BigRational::zero(),
            hi: BigRational::one(),
            label: p,
            depth: 0,
            address: Address::root(),
        }
    }

    pub fn len(&self) -> BigRational {
        &self.hi - &self.lo
    }

    pub fn contains(&self, t: &BigRational) -> bool {
        &self.lo <= t && t <= &self.hi
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CantorLevel {
    pub nodes: Vec<IntervalNode>,
}

impl CantorLevel {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// `g`: the longest interval.
    pub fn max_length(&self) -> BigRational {
        self.nodes.iter().map(IntervalNode::len).max().unwrap_or_else(BigRational::zero)
    }
}

/// Kept subintervals of `node`, left to right.
pub fn subdivide(rule: &SubstitutionRule, spec: &OrderSpec, node: &IntervalNode) -> Result<Vec<IntervalNode>> {
    let kids = ordered_children(rule, spec, node.label)?;
    let m = kids.len();
    let depth = node.depth + 1;
    if m == 1 {
        let mid = (&node.lo + &node.hi) / BigRational::from_integer(BigInt::from(2));
        return Ok(vec![IntervalNode {
            lo: mid,
            hi: node.hi.clone(),
            label: kids[0].proto,
            depth,
            address: node.address.child(1),
        }]);
    }
    let step = node.len() / BigRational::from_integer(BigInt::from(2 * m - 1));
    Ok(kids
        .iter()
        .enumerate()
        .map(|(i, c)| {
            let lo = &node.lo + &step * BigRational::from_integer(BigInt::from(2 * i));
            // The last kept part ends exactly at the parent's right end.
            let hi = if i + 1 == m { node.hi.clone() } else { &lo + &step };
            IntervalNode { lo, hi, label: c.proto, depth, address: node.address.child(i as u32 + 1) }
        })
        .collect())
}

/// Level `n` of the hierarchy rooted at `[0, 1]` labelled `p`.
pub fn cantor_level(rule: &SubstitutionRule, spec: &OrderSpec, p: TileId, n: u32, cap: u128) -> Result<CantorLevel> {
    rule.guard(p, n, cap)?;
    let mut nodes = vec![IntervalNode::root(p)];
    for _ in 0..n {
        let mut next = Vec::with_capacity(nodes.len() * 2);
        for node in &nodes {
            next.extend(subdivide(rule, spec, node)?);
        }
        nodes = next;
    }
    Ok(CantorLevel { nodes })
}

/// Where a parameter sits relative to one level. Indices are 1-based.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Location {
    Inside(usize),
    Gap(usize, usize),
    Before,
    After,
}

pub fn locate(t: &BigRational, level: &CantorLevel) -> Location {
    let idx = level.nodes.partition_point(|n| &n.lo <= t);
    if idx == 0 {
        return Location::Before;
    }
    if t <= &level.nodes[idx - 1].hi {
        Location::Inside(idx)
    } else if idx == level.nodes.len() {
        Location::After
    } else {
        Location::Gap(idx, idx + 1)
    }
}

/// `min(Γ ∩ node)`: the limit of the first-child chain below `node`.
///
/// Relative to the node, the chain from `q` contributes `c(q) = a_q + b_q·c(q′)`
/// where `q′` is the first child of `q`. The chain of labels is eventually
/// periodic, so `c` on the cycle is the fixed point of a contraction.
pub fn gamma_inf(rule: &SubstitutionRule, spec: &OrderSpec, node: &IntervalNode) -> Result<BigRational> {
    let half = BigRational::new(BigInt::from(1), BigInt::from(2));
    let step = |q: TileId| -> Result<(BigRational, BigRational, TileId)> {
        let kids = ordered_children(rule, spec, q)?;
        let m = kids.len();
        Ok(if m == 1 {
            (half.clone(), half.clone(), kids[0].proto)
        } else {
            (BigRational::zero(), BigRational::new(BigInt::one(), BigInt::from(2 * m - 1)), kids[0].proto)
        })
    };
    let mut chain: Vec<(TileId, BigRational, BigRational)> = Vec::new();
    let mut q = node.label;
    let start = loop {
        if let Some(pos) = chain.iter().position(|(p, _, _)| *p == q) {
            break pos;
        }
        let (a, b, next) = step(q)?;
        chain.push((q, a, b));
        q = next;
    };
    // Fold the cycle: c_start = A + B·c_start.
    let (mut a_cyc, mut b_cyc) = (BigRational::zero(), BigRational::one());
    for (_, a, b) in &chain[start..] {
        a_cyc += &b_cyc * a;
        b_cyc *= b;
    }
    let mut c = a_cyc / (BigRational::one() - b_cyc);
    for (_, a, b) in chain[..start].iter().rev() {
        c = a + b * c;
    }
    Ok(&node.lo + node.len() * c)
}

/// `max(Γ ∩ node)`. The last kept part always ends at the right end.
pub fn gamma_sup(node: &IntervalNode) -> BigRational {
    node.hi.clone()
}

/// `g` at level `n` without materialising the level.
pub fn max_length(rule: &SubstitutionRule, spec: &OrderSpec, p: TileId, n: u32) -> Result<BigRational> {
    // best[q] = longest level-d interval under a root labelled q.
    let mut best = vec![BigRational::one(); rule.len()];
    for _ in 0..n {
        let mut next = Vec::with_capacity(rule.len());
        for q in rule.ids() {
            let kids = ordered_children(rule, spec, q)?;
            let m = kids.len();
            let factor = if m == 1 {
                BigRational::new(BigInt::one(), BigInt::from(2))
            } else {
                BigRational::new(BigInt::one(), BigInt::from(2 * m - 1))
            };
            let longest = kids.iter().map(|c| &best[c.proto.0]).max().cloned().unwrap_or_else(BigRational::zero);
            next.push(longest * factor);
        }
        best = next;
    }
    Ok(best[p.0].clone())
}

/// `"num/den"` form used by the JSON emitters.
pub fn format_rational(r: &BigRational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// Parses `"num/den"` or an integer.
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let bad = || Error::Expression { expr: s.to_string(), message: "expected num/den".into() };
    let s = s.trim();
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let n: BigInt = n.parse().map_err(|_| bad())?;
    let d: BigInt = d.parse().map_err(|_| bad())?;
    if d.is_zero() {
        return Err(Error::Expression { expr: s.to_string(), message: "zero denominator".into() });
    }
    Ok(BigRational::new(n, d))
}

#[derive(Serialize)]
pub struct IntervalJson {
    pub lo: String,
    pub hi: String,
    pub label: String,
    pub address: Address,
}

/// Serialisable view of a level with prototile names as labels.
pub fn level_json(rule: &SubstitutionRule, level: &CantorLevel) -> Vec<IntervalJson> {
    level
        .nodes
        .iter()
        .map(|n| IntervalJson {
            lo: format_rational(&n.lo),
            hi: format_rational(&n.hi),
            label: rule.name_of(n.label).to_string(),
            address: n.address.clone(),
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{Point, Polygon};
    use crate::substitution::{PlacedTile, Prototile, DEFAULT_TILE_CAP};

    const PHI: f64 = 1.618_033_988_749_895;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    fn proto(name: &str, w: f64, h: f64) -> Prototile {
        Prototile { name: name.into(), label: name.into(), support: Polygon::rect(0.0, 0.0, w, h).unwrap() }
    }

    fn at(i: usize, x: f64, y: f64) -> PlacedTile {
        PlacedTile { proto: TileId(i), offset: Point::new(x, y) }
    }

    fn nu() -> (SubstitutionRule, OrderSpec) {
        let rule = SubstitutionRule::new(
            "nu",
            PHI,
            vec![proto("a", PHI, PHI), proto("b", PHI, 1.0), proto("c", 1.0, PHI), proto("d", 1.0, 1.0)],
            vec![
                vec![at(0, 0.0, 0.0), at(1, 0.0, PHI), at(2, PHI, 0.0), at(3, PHI, PHI)],
                vec![at(0, 0.0, 0.0), at(2, PHI, 0.0)],
                vec![at(0, 0.0, 0.0), at(1, 0.0, PHI)],
                vec![at(0, 0.0, 0.0)],
            ],
        )
        .unwrap();
        let spec = OrderSpec::identity(&rule);
        (rule, spec)
    }

    fn node(lo: BigRational, hi: BigRational, label: usize) -> IntervalNode {
        IntervalNode { lo, hi, label: TileId(label), depth: 1, address: Address(vec![1]) }
    }

    fn spans(nodes: &[IntervalNode]) -> Vec<(BigRational, BigRational, usize)> {
        nodes.iter().map(|n| (n.lo.clone(), n.hi.clone(), n.label.0)).collect()
    }

    #[test]
    fn subdivision_examples() {
        let (rule, spec) = nu();
        let a = subdivide(&rule, &spec, &IntervalNode::root(TileId(0))).unwrap();
        assert_eq!(
            spans(&a),
            vec![(q(0, 1), q(1, 7), 0), (q(2, 7), q(3, 7), 1), (q(4, 7), q(5, 7), 2), (q(6, 7), q(1, 1), 3)]
        );
        let b = subdivide(&rule, &spec, &node(q(2, 7), q(3, 7), 1)).unwrap();
        assert_eq!(spans(&b), vec![(q(2, 7), q(2, 7) + q(1, 21), 0), (q(2, 7) + q(2, 21), q(3, 7), 2)]);
        let d = subdivide(&rule, &spec, &node(q(6, 7), q(1, 1), 3)).unwrap();
        assert_eq!(spans(&d), vec![(q(13, 14), q(1, 1), 0)]);
    }

    #[test]
    fn levels_and_addresses() {
        let (rule, spec) = nu();
        let l0 = cantor_level(&rule, &spec, TileId(2), 0, DEFAULT_TILE_CAP).unwrap();
        assert_eq!(spans(&l0.nodes), vec![(q(0, 1), q(1, 1), 2)]);
        let l2 = cantor_level(&rule, &spec, TileId(0), 2, DEFAULT_TILE_CAP).unwrap();
        assert_eq!(l2.len(), 9);
        assert_eq!((l2.nodes[8].lo.clone(), l2.nodes[8].hi.clone()), (q(13, 14), q(1, 1)));
        assert_eq!(l2.nodes[8].address, Address(vec![4, 1]));
        assert_eq!(l2.max_length(), q(1, 14));
        assert_eq!(max_length(&rule, &spec, TileId(0), 2).unwrap(), q(1, 14));
    }

    #[test]
    fn locate_examples() {
        let (rule, spec) = nu();
        let l1 = cantor_level(&rule, &spec, TileId(0), 1, DEFAULT_TILE_CAP).unwrap();
        assert_eq!(locate(&q(2, 7), &l1), Location::Inside(2));
        assert_eq!(locate(&q(3, 14), &l1), Location::Gap(1, 2));
        let l2 = cantor_level(&rule, &spec, TileId(0), 2, DEFAULT_TILE_CAP).unwrap();
        assert_eq!(locate(&q(1, 1), &l2), Location::Inside(9));
        let ld = cantor_level(&rule, &spec, TileId(3), 1, DEFAULT_TILE_CAP).unwrap();
        assert_eq!(locate(&q(1, 4), &ld), Location::Before);
    }

    #[test]
    fn gamma_inf_follows_first_children() {
        let (rule, spec) = nu();
        // a's first child is a again, so inf stays at lo.
        assert_eq!(gamma_inf(&rule, &spec, &IntervalNode::root(TileId(0))).unwrap(), q(0, 1));
        // d keeps the right half and then behaves like a.
        assert_eq!(gamma_inf(&rule, &spec, &IntervalNode::root(TileId(3))).unwrap(), q(1, 2));
        // Self-loop through the right-half rule: c = 1/2 + c/2, so c = 1.
        let lone = SubstitutionRule::new("l", 2.0, vec![proto("A", 1.0, 1.0)], vec![vec![at(0, 0.5, 0.5)]]).unwrap();
        let id = OrderSpec::identity(&lone);
        assert_eq!(gamma_inf(&lone, &id, &IntervalNode::root(TileId(0))).unwrap(), q(1, 1));
    }

    #[test]
    fn gamma_inf_is_limit_of_levels() {
        let (rule, spec) = nu();
        for p in rule.ids() {
            let exact = gamma_inf(&rule, &spec, &IntervalNode::root(p)).unwrap();
            let l = cantor_level(&rule, &spec, p, 8, DEFAULT_TILE_CAP).unwrap();
            let first = &l.nodes[0];
            assert!(first.contains(&exact));
        }
    }

    #[test]
    fn rational_text_round_trip() {
        let r = q(13, 14);
        assert_eq!(parse_rational(&format_rational(&r)).unwrap(), r);
        assert_eq!(parse_rational("3").unwrap(), q(3, 1));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("x").is_err());
    }
}
