//! The curve: `f` on the Cantor set, its affine extension `F` on the gaps,
//! approximants and the quantitative checks that go with them.
//!
//! Level-`n` tile `J` with prototile `q` and offset `D` (frame `λⁿ·supp p`)
//! is the set `(supp q + D)/λⁿ ⊆ supp p`. Its centre is `(centroid q + D)/λⁿ`,
//! computed in that order so that dyadic inputs stay exact.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::cantor::{cantor_level, gamma_inf, max_length, IntervalNode};
use crate::error::{Error, Result};
use crate::geometry::{BBox, Point, Region, Tolerance};
use crate::ordering::{ordered_children, ordered_supertile, Address, OrderSpec, OrderedTile};
use crate::substitution::{diameter_decay_from, is_non_increasing, max_scaled_diameter, SubstitutionRule, TileId, DEFAULT_TILE_CAP};

/// Depth to which the shrinking-diameter hypothesis is rechecked.
pub const DECAY_CHECK_DEPTH: u32 = 6;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Orientation {
    #[default]
    Forward,
    Reversed,
}

/// One tile of a seed patch, traversed by its own curve.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SeedTile {
    pub proto: TileId,
    pub offset: Point,
    pub orientation: Orientation,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Seed {
    Tile(TileId),
    /// Curves of the listed tiles, concatenated in order.
    Patch(Vec<SeedTile>),
}

#[derive(Clone, Debug)]
pub struct CurveSpec {
    rule: SubstitutionRule,
    order: OrderSpec,
    seed: Seed,
    tol: Tolerance,
    cap: u128,
}

impl CurveSpec {
    /// Rejects seeds whose prototiles fail the diameter hypothesis and seed
    /// patches whose consecutive curves do not meet end to start.
    pub fn new(rule: SubstitutionRule, order: OrderSpec, seed: Seed, tol: Tolerance) -> Result<Self> {
        let cs = CurveSpec { rule, order, seed, tol, cap: DEFAULT_TILE_CAP };
        let pieces = cs.pieces();
        if pieces.is_empty() {
            return Err(Error::Empty("seed patch has no tiles".into()));
        }
        for piece in &pieces {
            if piece.proto.0 >= cs.rule.len() {
                return Err(Error::UnknownPrototile(format!("#{}", piece.proto.0)));
            }
            let d = diameter_decay_from(&cs.rule, piece.proto, DECAY_CHECK_DEPTH);
            if !is_non_increasing(&d) || d.last() >= d.first() {
                return Err(Error::DepthTooShallow(format!(
                    "tile diameters from {} do not shrink: {d:?}",
                    cs.rule.name_of(piece.proto)
                )));
            }
        }
        for (i, w) in pieces.windows(2).enumerate() {
            let end = cs.piece_endpoint(&w[0], true)?;
            let start = cs.piece_endpoint(&w[1], false)?;
            let diam = cs.rule.prototile(w[0].proto).support.diameter();
            if end.dist(start) > tol.eps() * diam.max(1.0) {
                return Err(Error::SeedMismatch(format!(
                    "curve {} ends at {end} but curve {} starts at {start}",
                    i + 1,
                    i + 2
                )));
            }
        }
        Ok(cs)
    }

    pub fn single(rule: SubstitutionRule, order: OrderSpec, p: TileId) -> Result<Self> {
        CurveSpec::new(rule, order, Seed::Tile(p), Tolerance::default())
    }

    pub fn with_cap(mut self, cap: u128) -> Self {
        self.cap = cap;
        self
    }

    pub fn rule(&self) -> &SubstitutionRule {
        &self.rule
    }

    pub fn order(&self) -> &OrderSpec {
        &self.order
    }

    pub fn seed(&self) -> &Seed {
        &self.seed
    }

    pub fn tol(&self) -> Tolerance {
        self.tol
    }

    pub fn cap(&self) -> u128 {
        self.cap
    }

    /// The seed as a list of tiles; a single prototile sits at the origin.
    pub fn pieces(&self) -> Vec<SeedTile> {
        match &self.seed {
            Seed::Tile(p) => vec![SeedTile { proto: *p, offset: Point::ORIGIN, orientation: Orientation::Forward }],
            Seed::Patch(tiles) => tiles.clone(),
        }
    }

    /// Start (`end = false`) or end point of one seed tile's curve.
    fn piece_endpoint(&self, piece: &SeedTile, end: bool) -> Result<Point> {
        let last = end != (piece.orientation == Orientation::Reversed);
        Ok(chain_limit(&self.rule, &self.order, piece.proto, last)? + piece.offset)
    }

    /// `(F(0), F(1))`.
    pub fn endpoints(&self) -> Result<(Point, Point)> {
        let pieces = self.pieces();
        Ok((self.piece_endpoint(&pieces[0], false)?, self.piece_endpoint(&pieces[pieces.len() - 1], true)?))
    }

    /// True iff `F(0) = F(1)` within `ε·diam`.
    pub fn is_closed(&self) -> Result<bool> {
        let (a, b) = self.endpoints()?;
        let diam = self.pieces().iter().map(|p| self.rule.prototile(p.proto).support.diameter()).fold(0.0, f64::max);
        Ok(a.dist(b) <= self.tol.eps() * diam.max(1.0))
    }

    /// Bounding box of the seed's support.
    pub fn support_bbox(&self) -> BBox {
        self.pieces()
            .iter()
            .map(|p| self.rule.prototile(p.proto).support.translate(p.offset).bbox())
            .reduce(|a, b| a.union(&b))
            .expect("seed has at least one tile")
    }

    fn in_support(&self, x: Point) -> bool {
        self.pieces().iter().any(|p| self.rule.prototile(p.proto).support.translate(p.offset).contains(x, self.tol))
    }
}

/// Limit point of the first-child (or last-child) chain below `q`, in the
/// frame of `supp q`: `Σ λ^{-i} dᵢ` over the chain's child offsets. The chain
/// of prototiles is eventually periodic, which closes the series.
pub fn chain_limit(rule: &SubstitutionRule, spec: &OrderSpec, q: TileId, last: bool) -> Result<Point> {
    let mut states: Vec<TileId> = Vec::new();
    let mut offsets: Vec<Point> = Vec::new();
    let mut cur = q;
    let s = loop {
        if let Some(pos) = states.iter().position(|&p| p == cur) {
            break pos;
        }
        states.push(cur);
        let kids = ordered_children(rule, spec, cur)?;
        let c = if last { kids[kids.len() - 1] } else { kids[0] };
        offsets.push(c.offset);
        cur = c.proto;
    };
    let inv = 1.0 / rule.lambda();
    let mut head = Point::ORIGIN;
    let mut w = 1.0;
    for d in &offsets[..s] {
        w *= inv;
        head = head + *d * w;
    }
    let period = offsets.len() - s;
    let mut cyc = Point::ORIGIN;
    let mut v = 1.0;
    for d in &offsets[s..] {
        v *= inv;
        cyc = cyc + *d * v;
    }
    Ok(head + cyc * (w / (1.0 - inv.powi(period as i32))))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EvalResult {
    pub point: Point,
    pub error_bound: f64,
    /// Depth-`n` address when the parameter stays inside the hierarchy.
    pub address: Option<Address>,
}

/// An interval of the hierarchy together with its tile.
#[derive(Clone, Debug)]
struct Cell {
    lo: BigRational,
    hi: BigRational,
    label: TileId,
    offset: Point,
    depth: u32,
    address: Address,
}

impl Cell {
    fn root(p: TileId) -> Cell {
        Cell {
            lo: BigRational::zero(),
            hi: BigRational::one(),
            label: p,
            offset: Point::ORIGIN,
            depth: 0,
            address: Address::root(),
        }
    }

    fn node(&self) -> IntervalNode {
        IntervalNode {
            lo: self.lo.clone(),
            hi: self.hi.clone(),
            label: self.label,
            depth: self.depth,
            address: self.address.clone(),
        }
    }
}

fn split(rule: &SubstitutionRule, spec: &OrderSpec, cell: &Cell) -> Result<Vec<Cell>> {
    let kids = ordered_children(rule, spec, cell.label)?;
    let m = kids.len();
    let shift = cell.offset * rule.lambda();
    let len = &cell.hi - &cell.lo;
    let make = |i: usize, lo: BigRational, hi: BigRational| Cell {
        lo,
        hi,
        label: kids[i].proto,
        offset: kids[i].offset + shift,
        depth: cell.depth + 1,
        address: cell.address.child(i as u32 + 1),
    };
    if m == 1 {
        let mid = &cell.lo + len / BigRational::from_integer(BigInt::from(2));
        return Ok(vec![make(0, mid, cell.hi.clone())]);
    }
    let step = len / BigRational::from_integer(BigInt::from(2 * m - 1));
    Ok((0..m)
        .map(|i| {
            let lo = &cell.lo + &step * BigRational::from_integer(BigInt::from(2 * i));
            let hi = if i + 1 == m { cell.hi.clone() } else { &lo + &step };
            make(i, lo, hi)
        })
        .collect())
}

fn centre(rule: &SubstitutionRule, q: TileId, offset: Point, n: u32) -> Point {
    (rule.prototile(q).support.centroid() + offset) / rule.lambda().powi(n as i32)
}

/// Centre of the depth-`n` tile reached from `cell` by always taking the
/// first (or last) child.
fn edge_centre(rule: &SubstitutionRule, spec: &OrderSpec, cell: &Cell, n: u32, last: bool) -> Result<Point> {
    let (mut q, mut off) = (cell.label, cell.offset);
    for _ in cell.depth..n {
        let kids = ordered_children(rule, spec, q)?;
        let c = if last { kids[kids.len() - 1] } else { kids[0] };
        off = c.offset + off * rule.lambda();
        q = c.proto;
    }
    Ok(centre(rule, q, off, n))
}

fn last_child(rule: &SubstitutionRule, spec: &OrderSpec, cell: &Cell) -> Result<Cell> {
    let mut kids = split(rule, spec, cell)?;
    Ok(kids.pop().expect("non-empty child list"))
}

fn lerp(a: Point, b: Point, t: f64) -> Point {
    a + (b - a) * t
}

fn ratio(t: &BigRational, a: &BigRational, b: &BigRational) -> f64 {
    ((t - a) / (b - a)).to_f64().unwrap_or(0.0).clamp(0.0, 1.0)
}

/// `F(t)` on a single prototile's curve, resolved to depth `n`.
fn eval_tile(rule: &SubstitutionRule, spec: &OrderSpec, p: TileId, t: &BigRational, n: u32) -> Result<(Point, Option<Address>)> {
    let mut cur = Cell::root(p);
    let mut left: Option<Cell> = None;
    for _ in 0..n {
        let kids = split(rule, spec, &cur)?;
        if t < &kids[0].lo {
            // Only a single child leaves a gap at the left end.
            let right_pt = edge_centre(rule, spec, &kids[0], n, false)?;
            return Ok(match &left {
                None => (right_pt, None),
                Some(l) => {
                    let a = l.hi.clone();
                    let b = gamma_inf(rule, spec, &kids[0].node())?;
                    let left_pt = edge_centre(rule, spec, l, n, true)?;
                    (lerp(left_pt, right_pt, ratio(t, &a, &b)), None)
                }
            });
        }
        let j = kids.partition_point(|c| &c.lo <= t) - 1;
        if t > &kids[j].hi {
            let a = kids[j].hi.clone();
            let b = gamma_inf(rule, spec, &kids[j + 1].node())?;
            let left_pt = edge_centre(rule, spec, &kids[j], n, true)?;
            let right_pt = edge_centre(rule, spec, &kids[j + 1], n, false)?;
            return Ok((lerp(left_pt, right_pt, ratio(t, &a, &b)), None));
        }
        left = if j > 0 {
            Some(kids[j - 1].clone())
        } else {
            match &left {
                Some(l) => Some(last_child(rule, spec, l)?),
                None => None,
            }
        };
        cur = kids.into_iter().nth(j).expect("index in range");
    }
    Ok((centre(rule, cur.label, cur.offset, n), Some(cur.address)))
}

/// Which seed tile a global parameter falls in, and the local parameter.
fn seed_local(t: &BigRational, pieces: usize) -> (usize, BigRational) {
    let k = BigRational::from_integer(BigInt::from(pieces));
    let scaled = t * &k;
    let i = scaled.floor().to_integer().to_usize().unwrap_or(0).min(pieces - 1);
    (i, scaled - BigRational::from_integer(BigInt::from(i)))
}

/// Evaluates `F(t)` at depth `n`: the centre of the depth-`n` tile when `t`
/// stays in the hierarchy, else the affine interpolation across its gap.
pub fn eval(cs: &CurveSpec, t: &BigRational, n: u32) -> Result<EvalResult> {
    if t < &BigRational::zero() || t > &BigRational::one() {
        return Err(Error::OutOfRange(format!("parameter {t} outside [0, 1]")));
    }
    let pieces = cs.pieces();
    let (i, mut s) = seed_local(t, pieces.len());
    let piece = pieces[i];
    if piece.orientation == Orientation::Reversed {
        s = BigRational::one() - s;
    }
    let (point, addr) = eval_tile(&cs.rule, &cs.order, piece.proto, &s, n)?;
    let address = addr.map(|a| if matches!(cs.seed, Seed::Patch(_)) { prefixed(i, &a) } else { a });
    Ok(EvalResult {
        point: point + piece.offset,
        error_bound: max_scaled_diameter(&cs.rule, piece.proto, n),
        address,
    })
}

fn prefixed(i: usize, a: &Address) -> Address {
    let mut d = Vec::with_capacity(a.depth() + 1);
    d.push(i as u32 + 1);
    d.extend_from_slice(a.digits());
    Address(d)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Approximant {
    pub vertices: Vec<Point>,
    pub addresses: Vec<Address>,
    /// True when the curve returns to its start, so the loop can be filled.
    pub closed: bool,
}

/// Ordered tiles of `λ⁻ⁿωⁿ(p)` with their centres.
pub fn scaled_tiles(cs: &CurveSpec, p: TileId, n: u32) -> Result<Vec<(OrderedTile, Point)>> {
    let tiles = ordered_supertile(&cs.rule, &cs.order, p, n, cs.cap)?;
    Ok(tiles
        .into_iter()
        .map(|t| {
            let c = centre(&cs.rule, t.tile.proto, t.tile.offset, n);
            (t, c)
        })
        .collect())
}

/// The polyline through the depth-`n` tile centres in visit order. Seed
/// patches concatenate their tiles' polylines, reversed where requested.
pub fn approximant(cs: &CurveSpec, n: u32) -> Result<Approximant> {
    let pieces = cs.pieces();
    let total: u128 = pieces.iter().map(|p| cs.rule.tile_counts(n)[p.proto.0]).sum();
    if total > cs.cap {
        return Err(Error::TooManyTiles { predicted: total, cap: cs.cap });
    }
    let patch = matches!(cs.seed, Seed::Patch(_));
    let mut vertices = Vec::with_capacity(total as usize);
    let mut addresses = Vec::with_capacity(total as usize);
    for (i, piece) in pieces.iter().enumerate() {
        let mut tiles = scaled_tiles(cs, piece.proto, n)?;
        if piece.orientation == Orientation::Reversed {
            tiles.reverse();
        }
        for (t, c) in tiles {
            vertices.push(c + piece.offset);
            addresses.push(if patch { prefixed(i, &t.address) } else { t.address });
        }
    }
    Ok(Approximant { vertices, addresses, closed: cs.is_closed()? })
}

/// `(g_n, h_n)`: longest parameter interval and largest scaled tile
/// diameter at depth `n`. A seed of `k` tiles shares `[0, 1]` equally.
pub fn moduli(cs: &CurveSpec, n: u32) -> Result<(f64, f64)> {
    let pieces = cs.pieces();
    let k = pieces.len() as f64;
    let mut g: f64 = 0.0;
    let mut h: f64 = 0.0;
    for piece in &pieces {
        let len = max_length(&cs.rule, &cs.order, piece.proto, n)?;
        g = g.max(len.to_f64().unwrap_or(f64::INFINITY) / k);
        h = h.max(max_scaled_diameter(&cs.rule, piece.proto, n));
    }
    Ok((g, h))
}

/// A point of the Cantor set with its exact image.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GammaSample {
    #[serde(serialize_with = "ser_rational")]
    pub t: BigRational,
    pub point: Point,
}

fn ser_rational<S: serde::Serializer>(r: &BigRational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&crate::cantor::format_rational(r))
}

/// Both Cantor-set endpoints of every level-`n` interval, with `f` evaluated
/// exactly through the chain limits. Sorted by parameter.
pub fn gamma_samples(cs: &CurveSpec, n: u32) -> Result<Vec<GammaSample>> {
    let pieces = cs.pieces();
    let k = BigRational::from_integer(BigInt::from(pieces.len()));
    let lam_n = cs.rule.lambda().powi(n as i32);
    let mut out = Vec::new();
    for (i, piece) in pieces.iter().enumerate() {
        let level = cantor_level(&cs.rule, &cs.order, piece.proto, n, cs.cap)?;
        let tiles = ordered_supertile(&cs.rule, &cs.order, piece.proto, n, cs.cap)?;
        let base = BigRational::from_integer(BigInt::from(i));
        for (node, t) in level.nodes.iter().zip(&tiles) {
            let q = t.tile.proto;
            let first = (chain_limit(&cs.rule, &cs.order, q, false)? + t.tile.offset) / lam_n + piece.offset;
            let last = (chain_limit(&cs.rule, &cs.order, q, true)? + t.tile.offset) / lam_n + piece.offset;
            for (local, point) in [(gamma_inf(&cs.rule, &cs.order, node)?, first), (node.hi.clone(), last)] {
                let local = if piece.orientation == Orientation::Reversed { BigRational::one() - local } else { local };
                out.push(GammaSample { t: (&base + local) / &k, point });
            }
        }
    }
    out.sort_by(|a, b| a.t.cmp(&b.t));
    out.dedup_by(|a, b| a.t == b.t);
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ContinuityReport {
    pub depth: u32,
    pub g: f64,
    pub h: f64,
    pub samples: usize,
    pub pairs_checked: usize,
    pub violations: usize,
    pub max_distance: f64,
    pub worst_pair: Option<(GammaSample, GammaSample)>,
    pub passed: bool,
}

/// Every pair of level-`n` Cantor endpoints closer than `g_n/2` must have
/// images within `h_n`.
pub fn continuity_check(cs: &CurveSpec, n: u32) -> Result<ContinuityReport> {
    let (g, h) = moduli(cs, n)?;
    let pieces = cs.pieces();
    let mut g_exact = BigRational::zero();
    for piece in &pieces {
        g_exact = g_exact.max(max_length(&cs.rule, &cs.order, piece.proto, n)?);
    }
    let delta = g_exact / BigRational::from_integer(BigInt::from(2 * pieces.len()));
    let samples = gamma_samples(cs, n)?;
    let slack = h * 1e-12 + cs.tol.eps() * 1e-3;
    let mut pairs = 0;
    let mut violations = 0;
    let mut max_distance: f64 = 0.0;
    let mut worst = None;
    for i in 0..samples.len() {
        for j in i + 1..samples.len() {
            if &samples[j].t - &samples[i].t >= delta {
                break;
            }
            pairs += 1;
            let d = samples[i].point.dist(samples[j].point);
            if d > h + slack {
                violations += 1;
            }
            if d > max_distance || worst.is_none() {
                max_distance = d;
                worst = Some((samples[i].clone(), samples[j].clone()));
            }
        }
    }
    Ok(ContinuityReport {
        depth: n,
        g,
        h,
        samples: samples.len(),
        pairs_checked: pairs,
        violations,
        max_distance,
        worst_pair: worst,
        passed: violations == 0,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CoverReport {
    pub depth: u32,
    pub grid: usize,
    pub pitch: f64,
    pub probes: usize,
    pub max_distance: f64,
    pub bound: f64,
    pub passed: bool,
}

/// Largest distance from a grid probe inside the support to the nearest
/// depth-`n` approximant vertex, against the bound `h_n + pitch`.
pub fn cover_check(cs: &CurveSpec, n: u32, m: usize) -> Result<CoverReport> {
    if m == 0 {
        return Err(Error::OutOfRange("grid size must be positive".into()));
    }
    let appr = approximant(cs, n)?;
    let (_, h) = moduli(cs, n)?;
    let bbox = cs.support_bbox();
    let (dx, dy) = (bbox.width() / m as f64, bbox.height() / m as f64);
    let pitch = dx.max(dy);
    let index = VertexIndex::new(&appr.vertices, h.max(pitch));
    let mut probes = 0;
    let mut worst: f64 = 0.0;
    for j in 0..m {
        for i in 0..m {
            let x = Point::new(bbox.min.x + (i as f64 + 0.5) * dx, bbox.min.y + (j as f64 + 0.5) * dy);
            if m > 1 && !cs.in_support(x) {
                continue;
            }
            probes += 1;
            worst = worst.max(index.nearest(x));
        }
    }
    let bound = h + pitch;
    Ok(CoverReport { depth: n, grid: m, pitch, probes, max_distance: worst, bound, passed: worst <= bound })
}

/// Uniform bucket grid for nearest-vertex queries.
struct VertexIndex<'a> {
    pts: &'a [Point],
    bbox: BBox,
    cell: f64,
    nx: usize,
    ny: usize,
    buckets: Vec<Vec<usize>>,
}

impl<'a> VertexIndex<'a> {
    fn new(pts: &'a [Point], cell: f64) -> Self {
        let bbox = BBox::of(pts);
        let cell = cell.max(bbox.width().max(bbox.height()) / 512.0).max(f64::MIN_POSITIVE);
        let nx = (bbox.width() / cell) as usize + 1;
        let ny = (bbox.height() / cell) as usize + 1;
        let mut buckets = vec![Vec::new(); nx * ny];
        for (k, p) in pts.iter().enumerate() {
            let (i, j) = Self::slot(&bbox, cell, nx, ny, *p);
            buckets[j * nx + i].push(k);
        }
        VertexIndex { pts, bbox, cell, nx, ny, buckets }
    }

    fn slot(bbox: &BBox, cell: f64, nx: usize, ny: usize, p: Point) -> (usize, usize) {
        let i = (((p.x - bbox.min.x) / cell).floor().max(0.0) as usize).min(nx - 1);
        let j = (((p.y - bbox.min.y) / cell).floor().max(0.0) as usize).min(ny - 1);
        (i, j)
    }

    fn nearest(&self, q: Point) -> f64 {
        let (ci, cj) = Self::slot(&self.bbox, self.cell, self.nx, self.ny, q);
        let mut best = f64::INFINITY;
        let mut r = 0usize;
        loop {
            let (i0, i1) = (ci.saturating_sub(r), (ci + r).min(self.nx - 1));
            let (j0, j1) = (cj.saturating_sub(r), (cj + r).min(self.ny - 1));
            for j in j0..=j1 {
                for i in i0..=i1 {
                    if i != i0 && i != i1 && j != j0 && j != j1 {
                        continue;
                    }
                    for &k in &self.buckets[j * self.nx + i] {
                        best = best.min(self.pts[k].dist(q));
                    }
                }
            }
            // Everything within r cells of the query's cell has been seen.
            let covered = r as f64 * self.cell;
            let exhausted = i0 == 0 && j0 == 0 && i1 == self.nx - 1 && j1 == self.ny - 1;
            if best <= covered || exhausted {
                return best;
            }
            r += 1;
        }
    }
}

/// The approximant closed by the segment from its last to its first vertex.
pub fn closed_region(appr: &Approximant, tol: Tolerance) -> Result<Region> {
    Region::new(appr.vertices.clone(), tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Polygon;
    use crate::substitution::{PlacedTile, Prototile};

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    fn unit(name: &str) -> Prototile {
        Prototile { name: name.into(), label: name.into(), support: Polygon::rect(0.0, 0.0, 1.0, 1.0).unwrap() }
    }

    fn at(i: usize, x: f64, y: f64) -> PlacedTile {
        PlacedTile { proto: TileId(i), offset: Point::new(x, y) }
    }

    fn lebesgue() -> CurveSpec {
        let rule = SubstitutionRule::new(
            "tm",
            2.0,
            vec![unit("A"), unit("B")],
            vec![
                vec![at(0, 0.0, 0.0), at(1, 0.0, 1.0), at(1, 1.0, 0.0), at(0, 1.0, 1.0)],
                vec![at(1, 0.0, 0.0), at(0, 0.0, 1.0), at(0, 1.0, 0.0), at(1, 1.0, 1.0)],
            ],
        )
        .unwrap();
        let order = OrderSpec::identity(&rule);
        CurveSpec::single(rule, order, TileId(0)).unwrap()
    }

    #[test]
    fn eval_at_zero_is_corner_cell() {
        let cs = lebesgue();
        for n in 1..=6 {
            let r = eval(&cs, &q(0, 1), n).unwrap();
            let s = 0.5f64.powi(n as i32);
            assert_eq!(r.point, Point::new(s / 2.0, s / 2.0));
            assert!((r.error_bound - 2f64.sqrt() * s).abs() < 1e-15);
            assert_eq!(r.address.unwrap(), Address(vec![1; n as usize]));
        }
    }

    #[test]
    fn eval_right_end_of_first_interval() {
        let cs = lebesgue();
        let r = eval(&cs, &q(1, 7), 10).unwrap();
        let mut want = vec![1];
        want.extend(std::iter::repeat_n(4, 9));
        assert_eq!(r.address.unwrap(), Address(want));
        assert!(r.point.dist(Point::new(0.5, 0.5)) < 2f64.sqrt() / 1024.0);
    }

    #[test]
    fn gap_is_affine() {
        let cs = lebesgue();
        // Gap (1/7, 2/7): from the top-right corner of the first quadrant
        // to the bottom-left corner of the second.
        let a = eval(&cs, &q(1, 7), 12).unwrap().point;
        let b = eval(&cs, &q(2, 7), 12).unwrap().point;
        let mid = eval(&cs, &q(3, 14), 12).unwrap();
        assert!(mid.address.is_none());
        assert!(mid.point.dist((a + b) * 0.5) < 1e-12);
    }

    #[test]
    fn chain_limits_are_corners() {
        let cs = lebesgue();
        assert_eq!(chain_limit(cs.rule(), cs.order(), TileId(0), false).unwrap(), Point::ORIGIN);
        let top = chain_limit(cs.rule(), cs.order(), TileId(0), true).unwrap();
        assert!(top.dist(Point::new(1.0, 1.0)) < 1e-15);
        assert!(!cs.is_closed().unwrap());
    }

    #[test]
    fn lebesgue_moduli() {
        let cs = lebesgue();
        for n in 1..=5 {
            let (g, h) = moduli(&cs, n).unwrap();
            assert!((g - 7f64.powi(-(n as i32))).abs() < 1e-18);
            assert!((h - 2f64.sqrt() * 0.5f64.powi(n as i32)).abs() < 1e-15);
        }
    }

    #[test]
    fn lebesgue_continuity_and_cover() {
        let cs = lebesgue();
        let r = continuity_check(&cs, 3).unwrap();
        assert!(r.passed, "{r:?}");
        assert!(r.max_distance <= 2f64.sqrt() / 8.0 + 1e-15);
        let c = cover_check(&cs, 4, 32).unwrap();
        assert!(c.passed, "{c:?}");
        let single = cover_check(&cs, 2, 1).unwrap();
        assert_eq!(single.probes, 1);
        // Box centre (1/2, 1/2) to the nearest 1/8-offset cell centre.
        assert!((single.max_distance - (2.0f64 * 0.125 * 0.125).sqrt()).abs() < 1e-15);
    }

    #[test]
    fn closed_region_rejects_collinear() {
        let appr = Approximant {
            vertices: vec![Point::new(0.0, 0.0), Point::new(1.0, 0.0), Point::new(2.0, 0.0)],
            addresses: vec![],
            closed: false,
        };
        assert!(matches!(closed_region(&appr, Tolerance::default()), Err(Error::DegenerateRegion(_))));
        let tri = Approximant {
            vertices: vec![Point::new(0.0, 0.0), Point::new(1.0, 0.0), Point::new(0.0, 1.0)],
            addresses: vec![],
            closed: true,
        };
        assert_eq!(closed_region(&tri, Tolerance::default()).unwrap().vertices(), &tri.vertices[..]);
    }

    #[test]
    fn out_of_range_parameter() {
        assert!(matches!(eval(&lebesgue(), &q(3, 2), 2), Err(Error::OutOfRange(_))));
    }

    #[test]
    fn mismatched_seed_rejected() {
        let cs = lebesgue();
        let seed = Seed::Patch(vec![
            SeedTile { proto: TileId(0), offset: Point::ORIGIN, orientation: Orientation::Forward },
            SeedTile { proto: TileId(0), offset: Point::new(5.0, 0.0), orientation: Orientation::Forward },
        ]);
        let err = CurveSpec::new(cs.rule().clone(), cs.order().clone(), seed, Tolerance::default());
        assert!(matches!(err, Err(Error::SeedMismatch(_))));
        // Second square reversed and placed so that it starts at (1, 1).
        let ok = Seed::Patch(vec![
            SeedTile { proto: TileId(0), offset: Point::ORIGIN, orientation: Orientation::Forward },
            SeedTile { proto: TileId(0), offset: Point::new(0.0, 0.0), orientation: Orientation::Reversed },
        ]);
        let cs2 = CurveSpec::new(cs.rule().clone(), cs.order().clone(), ok, Tolerance::default()).unwrap();
        assert!(cs2.is_closed().unwrap());
        let appr = approximant(&cs2, 1).unwrap();
        assert_eq!(appr.vertices.len(), 8);
        assert_eq!(appr.addresses[4], Address(vec![2, 4]));
        assert_eq!(eval(&cs2, &q(1, 1), 3).unwrap().point, eval(&cs2, &q(0, 1), 3).unwrap().point);
    }
}
