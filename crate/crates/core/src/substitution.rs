//! Prototiles, substitution rules and supertile expansion.
//!
//! Child placements of `p` are stored in the frame of `λ·supp p`. Expanding a
//! placed tile `q + x` yields the children of `q` shifted by `λ·x`, so the
//! tiles of the n-supertile carry offsets in the frame of `λⁿ·supp p`.

use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{interiors_disjoint, intersection_area, Point, Polygon, Tolerance};
use crate::raster::Grid;

/// Index of a prototile inside its rule.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct TileId(pub usize);

#[derive(Clone, Debug, PartialEq)]
pub struct Prototile {
    pub name: String,
    pub label: String,
    pub support: Polygon,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PlacedTile {
    pub proto: TileId,
    pub offset: Point,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Patch {
    pub tiles: Vec<PlacedTile>,
}

impl Patch {
    pub fn len(&self) -> usize {
        self.tiles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tiles.is_empty()
    }
}

/// Tile-count ceiling used when callers do not supply one.
pub const DEFAULT_TILE_CAP: u128 = 10_000_000;

#[derive(Clone, Debug, PartialEq)]
pub struct SubstitutionRule {
    name: String,
    lambda: f64,
    prototiles: Vec<Prototile>,
    children: Vec<Vec<PlacedTile>>,
}

impl SubstitutionRule {
    /// Checks only structure: `λ > 1`, prototile names unique, one child
    /// list per prototile, every child id in range and every list non-empty.
    /// Geometry is checked by [`validate_substitution`].
    pub fn new(
        name: impl Into<String>,
        lambda: f64,
        prototiles: Vec<Prototile>,
        children: Vec<Vec<PlacedTile>>,
    ) -> Result<Self> {
        if !lambda.is_finite() {
            return Err(Error::NonFinite);
        }
        if !(lambda > 1.0) {
            return Err(Error::Schema {
                path: "/lambda".into(),
                message: format!("expansion factor must exceed 1, got {lambda}"),
            });
        }
        if prototiles.is_empty() {
            return Err(Error::Empty("rule has no prototiles".into()));
        }
        if children.len() != prototiles.len() {
            return Err(Error::Schema {
                path: "/children".into(),
                message: format!(
                    "{} child lists for {} prototiles",
                    children.len(),
                    prototiles.len()
                ),
            });
        }
        for (i, p) in prototiles.iter().enumerate() {
            if prototiles[..i].iter().any(|q| q.name == p.name) {
                return Err(Error::Schema {
                    path: format!("/prototiles/{i}/id"),
                    message: format!("duplicate prototile id {:?}", p.name),
                });
            }
        }
        for (i, list) in children.iter().enumerate() {
            if list.is_empty() {
                return Err(Error::Schema {
                    path: format!("/children/{}", prototiles[i].name),
                    message: "empty child list".into(),
                });
            }
            for c in list {
                if c.proto.0 >= prototiles.len() {
                    return Err(Error::UnknownPrototile(format!("#{}", c.proto.0)));
                }
                if !c.offset.is_finite() {
                    return Err(Error::NonFinite);
                }
            }
        }
        Ok(SubstitutionRule { name: name.into(), lambda, prototiles, children })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn prototiles(&self) -> &[Prototile] {
        &self.prototiles
    }

    pub fn prototile(&self, id: TileId) -> &Prototile {
        &self.prototiles[id.0]
    }

    pub fn ids(&self) -> impl Iterator<Item = TileId> {
        (0..self.prototiles.len()).map(TileId)
    }

    pub fn len(&self) -> usize {
        self.prototiles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.prototiles.is_empty()
    }

    /// The patch `ω(p)` in the frame of `λ·supp p`.
    pub fn children(&self, id: TileId) -> &[PlacedTile] {
        &self.children[id.0]
    }

    pub fn id_of(&self, name: &str) -> Result<TileId> {
        self.prototiles
            .iter()
            .position(|p| p.name == name)
            .map(TileId)
            .ok_or_else(|| Error::UnknownPrototile(name.to_string()))
    }

    pub fn name_of(&self, id: TileId) -> &str {
        &self.prototiles[id.0].name
    }

    /// Support of a placed tile.
    pub fn support(&self, t: &PlacedTile) -> Polygon {
        self.prototiles[t.proto.0].support.translate(t.offset)
    }

    /// `|ωⁿ(p)|` for every prototile, saturating at `u128::MAX`.
    pub fn tile_counts(&self, n: u32) -> Vec<u128> {
        let mut counts = vec![1u128; self.len()];
        for _ in 0..n {
            counts = self
                .children
                .iter()
                .map(|list| list.iter().fold(0u128, |acc, c| acc.saturating_add(counts[c.proto.0])))
                .collect();
        }
        counts
    }

    /// Fails with `TooManyTiles` if `|ωⁿ(p)|` exceeds `cap`.
    pub fn guard(&self, p: TileId, n: u32, cap: u128) -> Result<u128> {
        let predicted = self.tile_counts(n)[p.0];
        if predicted > cap {
            Err(Error::TooManyTiles { predicted, cap })
        } else {
            Ok(predicted)
        }
    }

    /// Boolean incidence: `m[p][q]` iff `ω(p)` contains a copy of `q`.
    pub fn incidence(&self) -> Vec<Vec<bool>> {
        self.children
            .iter()
            .map(|list| {
                let mut row = vec![false; self.len()];
                for c in list {
                    row[c.proto.0] = true;
                }
                row
            })
            .collect()
    }

    /// Prototiles occurring in `ωⁿ(p)`, for every `p`.
    pub fn reachable(&self, n: u32) -> Vec<Vec<bool>> {
        let m = self.incidence();
        let k = self.len();
        let mut r: Vec<Vec<bool>> = (0..k).map(|i| (0..k).map(|j| i == j).collect()).collect();
        for _ in 0..n {
            r = r.iter().map(|row| bool_step(row, &m)).collect();
        }
        r
    }
}

fn bool_step(row: &[bool], m: &[Vec<bool>]) -> Vec<bool> {
    let mut out = vec![false; row.len()];
    for (i, &on) in row.iter().enumerate() {
        if on {
            for (j, &e) in m[i].iter().enumerate() {
                out[j] |= e;
            }
        }
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Check {
    ExpansionFactor,
    AreaSum,
    Disjointness,
    Coverage,
    Connectivity,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckEntry {
    pub prototile: String,
    pub check: Check,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct ValidationReport {
    pub entries: Vec<CheckEntry>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.entries.iter().all(|e| e.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckEntry> {
        self.entries.iter().filter(|e| !e.passed)
    }

    fn push(&mut self, prototile: &str, check: Check, passed: bool, detail: String) {
        self.entries.push(CheckEntry { prototile: prototile.to_string(), check, passed, detail });
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for e in &self.entries {
            writeln!(
                f,
                "{} {} {:?}: {}",
                if e.passed { "ok  " } else { "FAIL" },
                e.prototile,
                e.check,
                e.detail
            )?;
        }
        Ok(())
    }
}

/// Raster resolution for the connectivity check.
const CONNECTIVITY_RESOLUTION: usize = 96;

/// Checks the defining conditions of a substitution for every prototile.
/// Failures are recorded in the report, never raised.
pub fn validate_substitution(rule: &SubstitutionRule, tol: Tolerance) -> ValidationReport {
    let mut report = ValidationReport::default();
    let lambda = rule.lambda();
    let eps = tol.eps();
    for id in rule.ids() {
        let proto = rule.prototile(id);
        let name = proto.name.as_str();
        report.push(name, Check::ExpansionFactor, lambda > 1.0, format!("lambda = {lambda}"));

        let big = proto.support.scale(lambda);
        let target = big.area();
        let scale = eps * big.perimeter().max(1.0);
        let kids: Vec<Polygon> = rule.children(id).iter().map(|c| rule.support(c)).collect();

        let sum: f64 = kids.iter().map(Polygon::area).sum();
        report.push(
            name,
            Check::AreaSum,
            (sum - target).abs() <= scale,
            format!("children {sum:.12} vs expanded {target:.12}"),
        );

        let mut overlaps = Vec::new();
        for i in 0..kids.len() {
            for j in i + 1..kids.len() {
                if !interiors_disjoint(&kids[i], &kids[j], tol) {
                    overlaps.push(format!("{}&{}", i, j));
                }
            }
        }
        report.push(
            name,
            Check::Disjointness,
            overlaps.is_empty(),
            if overlaps.is_empty() {
                "children pairwise interior-disjoint".into()
            } else {
                format!("overlapping children {}", overlaps.join(", "))
            },
        );

        let mut outside = Vec::new();
        let mut covered = 0.0;
        for (i, k) in kids.iter().enumerate() {
            let inside = intersection_area(k, &big);
            covered += inside;
            if k.area() - inside > scale {
                outside.push(i.to_string());
            }
        }
        let deficit = target - covered;
        let cover_ok = outside.is_empty() && deficit.abs() <= scale;
        // Rounding noise would otherwise print as "-0.000000000000".
        let deficit = if deficit.abs() < 5e-13 { 0.0 } else { deficit };
        let detail = if outside.is_empty() {
            format!("area deficit {deficit:.12}")
        } else {
            format!("children {} leave the expanded support; area deficit {deficit:.12}", outside.join(", "))
        };
        report.push(name, Check::Coverage, cover_ok, detail);

        let (parts, holes) = union_topology(&kids);
        report.push(
            name,
            Check::Connectivity,
            parts == 1 && holes == 0,
            format!("{parts} component(s), {holes} hole(s) at raster resolution"),
        );
    }
    report
}

/// Components and holes of a union of polygons, by rasterisation.
fn union_topology(polys: &[Polygon]) -> (usize, usize) {
    let bbox = polys.iter().map(Polygon::bbox).reduce(|a, b| a.union(&b));
    let Some(bbox) = bbox else {
        return (0, 0);
    };
    let mut grid = Grid::covering(bbox, CONNECTIVITY_RESOLUTION);
    // Inclusive sampling: a pixel centre on a shared edge belongs to both
    // neighbours even when float noise separates their copies of the edge.
    let tol = Tolerance::new(grid.pitch() * 1e-6).expect("positive pitch");
    let boxes: Vec<_> = polys.iter().map(Polygon::bbox).collect();
    for j in 0..grid.height() {
        for i in 0..grid.width() {
            let c = grid.center(i, j);
            let probe = crate::geometry::BBox { min: c, max: c };
            let hit = polys.iter().zip(&boxes).any(|(p, b)| b.overlaps(&probe, tol.eps()) && p.contains(c, tol));
            grid.set(i, j, hit);
        }
    }
    // 8-connected tiles against a 4-connected complement, the usual dual pair.
    let parts = grid.components(true, false, true);
    let holes = grid.components(false, true, false).saturating_sub(1);
    (parts, holes)
}

/// `ω′(t) = ω(t.proto) + λ·t.offset`.
pub fn expand_placed(t: &PlacedTile, rule: &SubstitutionRule) -> Result<Patch> {
    if t.proto.0 >= rule.len() {
        return Err(Error::UnknownPrototile(format!("#{}", t.proto.0)));
    }
    let shift = t.offset * rule.lambda();
    Ok(Patch {
        tiles: rule
            .children(t.proto)
            .iter()
            .map(|c| PlacedTile { proto: c.proto, offset: c.offset + shift })
            .collect(),
    })
}

/// The n-supertile `ωⁿ(p)`, children listed in rule order.
pub fn supertile(p: TileId, n: u32, rule: &SubstitutionRule, cap: u128) -> Result<Patch> {
    if p.0 >= rule.len() {
        return Err(Error::UnknownPrototile(format!("#{}", p.0)));
    }
    rule.guard(p, n, cap)?;
    let mut tiles = vec![PlacedTile { proto: p, offset: Point::ORIGIN }];
    let lambda = rule.lambda();
    for _ in 0..n {
        let mut next = Vec::with_capacity(tiles.len() * 2);
        for t in &tiles {
            let shift = t.offset * lambda;
            next.extend(
                rule.children(t.proto)
                    .iter()
                    .map(|c| PlacedTile { proto: c.proto, offset: c.offset + shift }),
            );
        }
        tiles = next;
    }
    Ok(Patch { tiles })
}

/// Smallest `k ≤ k_max` with every prototile occurring in every `ωᵏ(p)`.
pub fn is_primitive(rule: &SubstitutionRule, k_max: u32) -> Option<u32> {
    let m = rule.incidence();
    let mut r: Vec<Vec<bool>> = m.clone();
    for k in 1..=k_max {
        if r.iter().all(|row| row.iter().all(|&b| b)) {
            return Some(k);
        }
        r = r.iter().map(|row| bool_step(row, &m)).collect();
    }
    None
}

/// `dₙ = max{diam t : t ∈ λ⁻ⁿωⁿ(p), p}` for `n = 1..=n_max`.
///
/// Only the set of prototiles occurring at depth `n` matters, so this runs on
/// the incidence matrix and never expands a supertile.
pub fn diameter_decay(rule: &SubstitutionRule, n_max: u32) -> Vec<f64> {
    let diams: Vec<f64> = rule.prototiles().iter().map(|p| p.support.diameter()).collect();
    let m = rule.incidence();
    let mut occurring: Vec<bool> = vec![true; rule.len()];
    let mut out = Vec::with_capacity(n_max as usize);
    for n in 1..=n_max {
        occurring = bool_step(&occurring, &m);
        let d = occurring
            .iter()
            .zip(&diams)
            .filter(|(&on, _)| on)
            .map(|(_, &d)| d)
            .fold(0.0, f64::max);
        out.push(d / rule.lambda().powi(n as i32));
    }
    out
}

/// The same sequence for a single prototile `p`. Unlike the maximum over all
/// prototiles, which can never increase for a finite rule, this one can.
pub fn diameter_decay_from(rule: &SubstitutionRule, p: TileId, n_max: u32) -> Vec<f64> {
    let diams: Vec<f64> = rule.prototiles().iter().map(|p| p.support.diameter()).collect();
    let m = rule.incidence();
    let mut occurring = vec![false; rule.len()];
    occurring[p.0] = true;
    let mut out = Vec::with_capacity(n_max as usize);
    for n in 1..=n_max {
        occurring = bool_step(&occurring, &m);
        let d = occurring
            .iter()
            .zip(&diams)
            .filter(|(&on, _)| on)
            .map(|(_, &d)| d)
            .fold(0.0, f64::max);
        out.push(d / rule.lambda().powi(n as i32));
    }
    out
}

/// Largest scaled tile diameter of `λ⁻ⁿωⁿ(p)` for a single `p`.
pub fn max_scaled_diameter(rule: &SubstitutionRule, p: TileId, n: u32) -> f64 {
    if n == 0 {
        return rule.prototile(p).support.diameter();
    }
    diameter_decay_from(rule, p, n)[n as usize - 1]
}

/// True iff no term exceeds its predecessor by more than a relative `1e-12`.
pub fn is_non_increasing(seq: &[f64]) -> bool {
    seq.windows(2).all(|w| w[1] <= w[0] * (1.0 + 1e-12))
}
