//! Visit orders on 1-supertiles and the orders they induce on n-supertiles.
//!
//! A tile of `ωⁿ(p)` is named by its address: the word of 1-based visit ranks
//! chosen at each descent. The induced order on `ωⁿ(p)` is lexicographic order
//! on addresses, so enumeration just expands tiles in rank order level by level.

use std::fmt;

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::geometry::Point;
use crate::substitution::{PlacedTile, Prototile, SubstitutionRule, TileId};

/// Per prototile, the child indices of `ω(q)` in visit order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrderSpec {
    orders: Vec<Option<Vec<usize>>>,
}

impl OrderSpec {
    /// Each present entry must be a permutation of `0..|ω(q)|`.
    pub fn new(rule: &SubstitutionRule, orders: Vec<Option<Vec<usize>>>) -> Result<Self> {
        if orders.len() != rule.len() {
            return Err(Error::Schema {
                path: "/order".into(),
                message: format!("{} order entries for {} prototiles", orders.len(), rule.len()),
            });
        }
        for (id, entry) in rule.ids().zip(&orders) {
            if let Some(perm) = entry {
                check_permutation(perm, rule.children(id).len())
                    .map_err(|message| Error::InvalidOrder { proto: rule.name_of(id).into(), message })?;
            }
        }
        Ok(OrderSpec { orders })
    }

    /// Children visited in the order they are listed.
    pub fn identity(rule: &SubstitutionRule) -> Self {
        OrderSpec { orders: rule.ids().map(|id| Some((0..rule.children(id).len()).collect())).collect() }
    }

    pub fn get(&self, rule: &SubstitutionRule, q: TileId) -> Result<&[usize]> {
        self.orders
            .get(q.0)
            .and_then(|o| o.as_deref())
            .ok_or_else(|| Error::MissingOrder(rule.name_of(q).to_string()))
    }

    pub fn entries(&self) -> &[Option<Vec<usize>>] {
        &self.orders
    }
}

fn check_permutation(perm: &[usize], m: usize) -> std::result::Result<(), String> {
    if perm.len() != m {
        return Err(format!("{} entries for {} children", perm.len(), m));
    }
    let mut seen = vec![false; m];
    for &i in perm {
        if i >= m {
            return Err(format!("child index {i} out of range"));
        }
        if std::mem::replace(&mut seen[i], true) {
            return Err(format!("child index {i} repeated"));
        }
    }
    Ok(())
}

/// 1-based visit ranks, outermost first.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Address(pub Vec<u32>);

impl Address {
    pub fn root() -> Self {
        Address(Vec::new())
    }

    pub fn depth(&self) -> usize {
        self.0.len()
    }

    pub fn digits(&self) -> &[u32] {
        &self.0
    }

    pub fn child(&self, k: u32) -> Address {
        let mut d = Vec::with_capacity(self.0.len() + 1);
        d.extend_from_slice(&self.0);
        d.push(k);
        Address(d)
    }

    pub fn is_prefix_of(&self, other: &Address) -> bool {
        other.0.starts_with(&self.0)
    }
}

impl fmt::Display for Address {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, d) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{d}")?;
        }
        write!(f, ")")
    }
}

impl Serialize for Address {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.0.serialize(s)
    }
}

/// The children of `ω(q)` in visit order.
pub fn ordered_children(rule: &SubstitutionRule, spec: &OrderSpec, q: TileId) -> Result<Vec<PlacedTile>> {
    let kids = rule.children(q);
    Ok(spec.get(rule, q)?.iter().map(|&i| kids[i]).collect())
}

#[derive(Clone, Debug, PartialEq)]
pub struct OrderedTile {
    pub tile: PlacedTile,
    pub address: Address,
}

/// All tiles of `ωⁿ(p)` in induced order, with their addresses.
pub fn ordered_supertile(
    rule: &SubstitutionRule,
    spec: &OrderSpec,
    p: TileId,
    n: u32,
    cap: u128,
) -> Result<Vec<OrderedTile>> {
    rule.guard(p, n, cap)?;
    let ranked: Vec<Vec<PlacedTile>> =
        rule.ids().map(|q| ordered_children(rule, spec, q)).collect::<Result<_>>()?;
    let lambda = rule.lambda();
    let mut level = vec![OrderedTile {
        tile: PlacedTile { proto: p, offset: Point::ORIGIN },
        address: Address::root(),
    }];
    for _ in 0..n {
        let mut next = Vec::with_capacity(level.len() * 2);
        for t in &level {
            let shift = t.tile.offset * lambda;
            for (k, c) in ranked[t.tile.proto.0].iter().enumerate() {
                next.push(OrderedTile {
                    tile: PlacedTile { proto: c.proto, offset: c.offset + shift },
                    address: t.address.child(k as u32 + 1),
                });
            }
        }
        level = next;
    }
    Ok(level)
}

/// `counts[d][q] = |ω^d(q)|` for `d = 0..=n`.
fn count_table(rule: &SubstitutionRule, n: usize) -> Vec<Vec<u128>> {
    (0..=n as u32).map(|d| rule.tile_counts(d)).collect()
}

/// 1-based position of `addr` in the induced order on `ω^{|addr|}(p)`.
pub fn address_to_rank(rule: &SubstitutionRule, spec: &OrderSpec, p: TileId, addr: &Address) -> Result<u128> {
    let n = addr.depth();
    let counts = count_table(rule, n);
    let mut q = p;
    let mut rank: u128 = 1;
    for (i, &k) in addr.digits().iter().enumerate() {
        let order = spec.get(rule, q)?;
        if k == 0 || k as usize > order.len() {
            return Err(Error::OutOfRange(format!(
                "digit {k} at level {} exceeds {} children of {}",
                i + 1,
                order.len(),
                rule.name_of(q)
            )));
        }
        let kids = rule.children(q);
        let below = &counts[n - i - 1];
        for &j in &order[..k as usize - 1] {
            rank = rank.saturating_add(below[kids[j].proto.0]);
        }
        q = kids[order[k as usize - 1]].proto;
    }
    Ok(rank)
}

/// Inverse of [`address_to_rank`] for `1 ≤ r ≤ |ωⁿ(p)|`.
pub fn rank_to_address(rule: &SubstitutionRule, spec: &OrderSpec, p: TileId, n: u32, r: u128) -> Result<Address> {
    let counts = count_table(rule, n as usize);
    let total = counts[n as usize][p.0];
    if r == 0 || r > total {
        return Err(Error::OutOfRange(format!("rank {r} not in 1..={total}")));
    }
    let mut rest = r - 1;
    let mut q = p;
    let mut digits = Vec::with_capacity(n as usize);
    for level in (0..n as usize).rev() {
        let order = spec.get(rule, q)?;
        let kids = rule.children(q);
        let below = &counts[level];
        let mut chosen = None;
        for (k, &j) in order.iter().enumerate() {
            let size = below[kids[j].proto.0];
            if rest < size {
                chosen = Some((k, j));
                break;
            }
            rest -= size;
        }
        let (k, j) = chosen.expect("rank bounded by subtree sizes");
        digits.push(k as u32 + 1);
        q = kids[j].proto;
    }
    Ok(Address(digits))
}

/// Prototile reached by following `addr` from `p`.
pub fn address_target(rule: &SubstitutionRule, spec: &OrderSpec, p: TileId, addr: &Address) -> Result<TileId> {
    let mut q = p;
    for &k in addr.digits() {
        let order = spec.get(rule, q)?;
        let j = *order
            .get((k as usize).wrapping_sub(1))
            .ok_or_else(|| Error::OutOfRange(format!("digit {k} for {}", rule.name_of(q))))?;
        q = rule.children(q)[j].proto;
    }
    Ok(q)
}

/// The rule `ωᵏ` with children of `q` listed in induced order, paired with
/// the identity order. Addresses of the power group `k` digits at a time.
pub fn power(rule: &SubstitutionRule, spec: &OrderSpec, k: u32, cap: u128) -> Result<(SubstitutionRule, OrderSpec)> {
    if k == 0 {
        return Err(Error::OutOfRange("power must be at least 1".into()));
    }
    let mut children = Vec::with_capacity(rule.len());
    for q in rule.ids() {
        let tiles = ordered_supertile(rule, spec, q, k, cap)?;
        children.push(tiles.into_iter().map(|t| t.tile).collect());
    }
    let prototiles: Vec<Prototile> = rule.prototiles().to_vec();
    let powered = SubstitutionRule::new(
        format!("{}^{}", rule.name(), k),
        rule.lambda().powi(k as i32),
        prototiles,
        children,
    )?;
    let order = OrderSpec::identity(&powered);
    Ok((powered, order))
}

/// Smallest `k ≤ k_max` with `|ωᵏ(q)| > 1` for every `q`.
pub fn normalization_power(rule: &SubstitutionRule, k_max: u32) -> Option<u32> {
    (1..=k_max).find(|&k| rule.tile_counts(k).iter().all(|&c| c > 1))
}
