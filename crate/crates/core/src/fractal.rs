//! Fixed placements and the nested dense-set construction.
//!
//! A fixed placement is a translation `x` with `p + x ∈ ωⁿ(p + x)`. Writing
//! the self-copy of `p` in `ωⁿ(p)` as `p + d`, this reads `x = d + λⁿx`, so
//! `x = d / (1 - λⁿ)`. Given one whose copy stays off the supertile boundary,
//! the filled approximants `F_k` grow into the nested chain
//! `F₁ + x ⊆ λⁿ(F_{n+1} + x) ⊆ λ²ⁿ(F_{2n+1} + x) ⊆ …`, whose union meets
//! every disc of a fixed radius and cuts into finitely many translation
//! classes of pieces along the tiles it covers.
//!
//! The construction needs four conditions, numbered as in the reports:
//!
//! 1. a fixed placement exists;
//! 2. its copy of `p + x` stays off the boundary of `supp ωⁿ(p + x)`;
//! 3. `F₁ + x ⊆ λⁿ(F_{n+1} + x)`;
//! 4. consecutive tiles of every ordered supertile share an edge.

use serde::Serialize;

use crate::curve::{CurveSpec, Seed};
use crate::error::{Error, Result};
use crate::geometry::{crossing_parity, point_segment_distance, segment_distance, shared_edge, BBox, Point, Polygon, Region, Tolerance};
use crate::ordering::{ordered_children, ordered_supertile, OrderSpec};
use crate::raster::Grid;
use crate::substitution::{supertile, PlacedTile, SubstitutionRule, TileId};

/// Fewest pixels the inner region of a nesting test may cover.
pub const MIN_NESTING_PIXELS: usize = 16;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct FixedPlacement {
    pub p: TileId,
    pub n: u32,
    pub x: Point,
    /// Offset of the self-copy of `p` inside `ωⁿ(p)`.
    pub d: Point,
}

/// One candidate per copy of `p` in `ωⁿ(p)`, in supertile order.
pub fn find_fixed_placements(rule: &SubstitutionRule, p: TileId, n: u32, cap: u128) -> Result<Vec<FixedPlacement>> {
    if n == 0 {
        return Err(Error::OutOfRange("power must be at least 1".into()));
    }
    let denom = 1.0 - rule.lambda().powi(n as i32);
    let patch = supertile(p, n, rule, cap)?;
    Ok(patch
        .tiles
        .iter()
        .filter(|t| t.proto == p)
        .map(|t| FixedPlacement { p, n, x: t.offset / denom, d: t.offset })
        .collect())
}

/// Condition (1): some tile of `ωⁿ(p + x)` is `p + x` itself.
pub fn check_fixed_point(fp: &FixedPlacement, rule: &SubstitutionRule, tol: Tolerance, cap: u128) -> Result<bool> {
    let lam_n = rule.lambda().powi(fp.n as i32);
    let shift = fp.x * lam_n;
    let slack = tol.eps() * lam_n.max(1.0) * (1.0 + fp.x.norm());
    let patch = supertile(fp.p, fp.n, rule, cap)?;
    Ok(patch.tiles.iter().any(|t| t.proto == fp.p && (t.offset + shift).dist(fp.x) <= slack))
}

/// Distance from `supp(p + x)` to the boundary of `supp ωⁿ(p + x)`, or 0
/// when the copy is not inside at all.
pub fn interior_margin(fp: &FixedPlacement, rule: &SubstitutionRule, tol: Tolerance) -> f64 {
    let lam_n = rule.lambda().powi(fp.n as i32);
    let small = rule.prototile(fp.p).support.translate(fp.x);
    let big = rule.prototile(fp.p).support.scale(lam_n).translate(fp.x * lam_n);
    if !small.vertices().iter().all(|&v| big.contains(v, tol)) {
        return 0.0;
    }
    let mut best = f64::INFINITY;
    for a in small.edges() {
        for b in big.edges() {
            best = best.min(segment_distance(a, b));
        }
    }
    best
}

/// Condition (2): the copy stays clear of the supertile boundary.
pub fn check_interior(fp: &FixedPlacement, rule: &SubstitutionRule, tol: Tolerance) -> bool {
    interior_margin(fp, rule, tol) > tol.eps()
}

/// Vertices of the depth-`m` approximant of `p`, i.e. the tile centres of
/// `λ^{-m}ω^m(p)` in visit order. Same arithmetic as the approximant, without
/// the addresses, so deep loops stay cheap.
pub fn loop_vertices(rule: &SubstitutionRule, order: &OrderSpec, p: TileId, m: u32, cap: u128) -> Result<Vec<Point>> {
    let total = rule.guard(p, m, cap)?;
    let ranked: Vec<Vec<PlacedTile>> = rule.ids().map(|q| ordered_children(rule, order, q)).collect::<Result<_>>()?;
    let lambda = rule.lambda();
    let lam_m = lambda.powi(m as i32);
    let mut out = Vec::with_capacity(total as usize);
    let mut stack = vec![(PlacedTile { proto: p, offset: Point::ORIGIN }, 0u32)];
    while let Some((t, depth)) = stack.pop() {
        if depth == m {
            out.push((rule.prototile(t.proto).support.centroid() + t.offset) / lam_m);
            continue;
        }
        let shift = t.offset * lambda;
        for c in ranked[t.proto.0].iter().rev() {
            stack.push((PlacedTile { proto: c.proto, offset: c.offset + shift }, depth + 1));
        }
    }
    Ok(out)
}

fn single_proto(cs: &CurveSpec, p: TileId) -> Result<()> {
    match cs.seed() {
        Seed::Tile(q) if *q == p => Ok(()),
        _ => Err(Error::SeedMismatch(format!(
            "curve must be seeded by the single prototile {}",
            cs.rule().name_of(p)
        ))),
    }
}

/// `λ^{kn}(F_{kn+1} + x)` as a closed loop.
pub fn nested_region(fp: &FixedPlacement, cs: &CurveSpec, k: u32) -> Result<Region> {
    let lam_kn = cs.rule().lambda().powi((k * fp.n) as i32);
    let verts = loop_vertices(cs.rule(), cs.order(), fp.p, k * fp.n + 1, cs.cap())?;
    Region::new(verts.into_iter().map(|v| (v + fp.x) * lam_kn).collect(), cs.tol())
}

/// Raster test of `inner ⊆ outer`, with the outer region dilated by one
/// pixel so boundary pixels do not count against it.
pub fn region_contains(outer: &Region, inner: &Region, resolution: usize) -> Result<bool> {
    let bbox = outer.bbox().union(&inner.bbox());
    let mut a = Grid::covering(bbox, resolution);
    let mut b = a.blank();
    a.xor_fill(inner.vertices());
    b.xor_fill(outer.vertices());
    if a.count() < MIN_NESTING_PIXELS {
        return Err(Error::ResolutionTooCoarse(format!(
            "inner region covers {} pixels at resolution {resolution}, need {MIN_NESTING_PIXELS}",
            a.count()
        )));
    }
    Ok(a.is_subset_of(&b.dilate()))
}

/// Link `k` of the nesting chain: `λ^{kn}(F_{kn+1}+x) ⊆ λ^{(k+1)n}(F_{(k+1)n+1}+x)`.
pub fn check_nesting_link(fp: &FixedPlacement, cs: &CurveSpec, k: u32, resolution: usize) -> Result<bool> {
    single_proto(cs, fp.p)?;
    let inner = nested_region(fp, cs, k)?;
    let outer = nested_region(fp, cs, k + 1)?;
    region_contains(&outer, &inner, resolution)
}

/// Condition (3): `F₁ + x ⊆ λⁿ(F_{n+1} + x)`.
pub fn check_nesting(fp: &FixedPlacement, cs: &CurveSpec, resolution: usize) -> Result<bool> {
    check_nesting_link(fp, cs, 0, resolution)
}

/// Condition (4) at one depth: consecutive tiles share an edge. `tiles` are
/// in visit order; polygons may be in any common frame.
pub fn check_adjacency(tiles: &[Polygon], tol: Tolerance) -> bool {
    tiles.windows(2).all(|w| shared_edge(&w[0], &w[1], tol).is_some())
}

/// Condition (4) on `ωᵐ(p)`, in the frame of `λᵐ·supp p`.
pub fn adjacency_at(rule: &SubstitutionRule, order: &OrderSpec, p: TileId, m: u32, tol: Tolerance, cap: u128) -> Result<bool> {
    let tiles = ordered_supertile(rule, order, p, m, cap)?;
    let polys: Vec<Polygon> = tiles.iter().map(|t| rule.support(&t.tile)).collect();
    Ok(check_adjacency(&polys, tol))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConditionReport {
    pub fixed_point: bool,
    pub interior: bool,
    pub interior_margin: f64,
    pub nesting: bool,
    pub resolution: usize,
    /// Depths at which condition (4) held, then failed (if it did).
    pub adjacency_depths: Vec<u32>,
    pub adjacency: bool,
    /// Whether `F(0) = F(1)`, which the construction assumes.
    pub closed: bool,
}

impl ConditionReport {
    pub fn unmet(&self) -> Vec<String> {
        let mut out = Vec::new();
        if !self.fixed_point {
            out.push("(1) fixed placement".to_string());
        }
        if !self.interior {
            out.push("(2) interior".to_string());
        }
        if !self.nesting {
            out.push("(3) nesting".to_string());
        }
        if !self.adjacency {
            let at = self.adjacency_depths.last().copied().unwrap_or(0);
            out.push(format!("(4) adjacency (fails at depth {at})"));
        }
        out
    }
}

/// Evaluates conditions (1)-(4); adjacency is checked at depths
/// `1..=adjacency_depth`, stopping at the first failure.
pub fn check_conditions(fp: &FixedPlacement, cs: &CurveSpec, resolution: usize, adjacency_depth: u32) -> Result<ConditionReport> {
    single_proto(cs, fp.p)?;
    let rule = cs.rule();
    let tol = cs.tol();
    let margin = interior_margin(fp, rule, tol);
    let mut depths = Vec::new();
    let mut adjacency = true;
    for m in 1..=adjacency_depth {
        depths.push(m);
        if !adjacency_at(rule, cs.order(), fp.p, m, tol, cs.cap())? {
            adjacency = false;
            break;
        }
    }
    Ok(ConditionReport {
        fixed_point: check_fixed_point(fp, rule, tol, cs.cap())?,
        interior: margin > tol.eps(),
        interior_margin: margin,
        nesting: check_nesting(fp, cs, resolution)?,
        resolution,
        adjacency_depths: depths,
        adjacency,
        closed: cs.is_closed()?,
    })
}

/// `A_t = F ∩ supp t` for one covering tile `t`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Piece {
    /// The tile in plane coordinates.
    pub tile: PlacedTile,
    /// Closed loop, even-odd filled.
    pub points: Vec<Point>,
    pub class: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DenseSetBuild {
    pub iterations: u32,
    pub n: u32,
    pub x: Point,
    /// `λ^{in}(F_{in+1} + x)` clipped to the window, innermost first.
    pub regions: Vec<Vec<Point>>,
    pub window: BBox,
    pub pieces: Vec<Piece>,
    pub class_count: usize,
    pub conditions: ConditionReport,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DenseSetOptions {
    /// Number of nested regions; 0 behaves as 1.
    pub iterations: u32,
    pub resolution: usize,
    /// Clip window; `None` keeps the outermost region whole.
    pub window: Option<BBox>,
}

impl Default for DenseSetOptions {
    fn default() -> Self {
        DenseSetOptions { iterations: 2, resolution: 512, window: None }
    }
}

/// Builds the nested regions and their piece decomposition after checking
/// conditions (1)-(4). Condition (4) is checked up to the depth of the
/// outermost region.
pub fn build_dense_set(fp: &FixedPlacement, cs: &CurveSpec, opts: &DenseSetOptions) -> Result<DenseSetBuild> {
    let levels = opts.iterations.max(1);
    let top = levels - 1;
    let conditions = check_conditions(fp, cs, opts.resolution, (top * fp.n + 1).max(fp.n))?;
    let unmet = conditions.unmet();
    if !unmet.is_empty() {
        return Err(Error::ConditionsUnmet(unmet));
    }
    let rule = cs.rule();
    let loops: Vec<Region> = (0..levels).map(|k| nested_region(fp, cs, k)).collect::<Result<_>>()?;
    let outer = &loops[top as usize];
    let window = opts.window.unwrap_or_else(|| outer.bbox());
    let window_poly = Polygon::rect(window.min.x, window.min.y, window.max.x, window.max.y)?;
    let regions: Vec<Vec<Point>> = loops.iter().filter_map(|r| r.clip_convex(&window_poly)).collect();

    // The covering tiles at the outermost level: ω^{top·n}(p + x).
    let shift = fp.x * rule.lambda().powi((top * fp.n) as i32);
    let cover = supertile(fp.p, top * fp.n, rule, cs.cap())?;
    let mut pieces: Vec<Piece> = Vec::new();
    let mut reps: Vec<Vec<Point>> = Vec::new();
    for t in &cover.tiles {
        let tile = PlacedTile { proto: t.proto, offset: t.offset + shift };
        let poly = rule.support(&tile);
        if !poly.bbox().overlaps(&window, 0.0) {
            continue;
        }
        let Some(clipped) = clip_piece(outer, &poly, &window_poly) else {
            continue;
        };
        let scale = poly.diameter().max(1.0);
        let key = centred(&clipped);
        let class = match reps.iter().position(|r| cyclic_match(r, &key, 1e-6 * scale)) {
            Some(c) => c,
            None => {
                reps.push(key);
                reps.len() - 1
            }
        };
        pieces.push(Piece { tile, points: clipped, class });
    }
    Ok(DenseSetBuild {
        iterations: opts.iterations,
        n: fp.n,
        x: fp.x,
        regions,
        window,
        pieces,
        class_count: reps.len(),
        conditions,
    })
}

/// `outer ∩ tile ∩ window` as a cleaned loop, or `None` if empty.
///
/// Every covering tile holds loop vertices strictly inside it (the centres
/// of its children), so a clip whose vertices all lie on the tile boundary
/// is either the whole tile or nothing; parity at an interior point decides.
fn clip_piece(outer: &Region, tile: &Polygon, window: &Polygon) -> Option<Vec<Point>> {
    let eps = 1e-9 * tile.diameter().max(1.0);
    let raw = crate::geometry::clip_convex(outer.vertices(), tile.vertices());
    let mut pts = clean_loop(raw, eps);
    if pts.len() >= 3 && pts.iter().all(|&v| tile.boundary_distance(v) <= eps) {
        let probe = tile.centroid();
        if !crossing_parity(outer.vertices(), probe) {
            return None;
        }
        pts = tile.vertices().to_vec();
    }
    if pts.len() < 3 {
        return None;
    }
    let pts = clean_loop(crate::geometry::clip_convex(&pts, window.vertices()), eps);
    (pts.len() >= 3).then_some(pts)
}

/// Drops repeated vertices and vertices where the loop runs straight on or
/// doubles back, until none remain. Zero-area loops vanish entirely.
pub fn clean_loop(mut pts: Vec<Point>, eps: f64) -> Vec<Point> {
    loop {
        let n = pts.len();
        if n < 3 {
            return Vec::new();
        }
        let mut out: Vec<Point> = Vec::with_capacity(n);
        for &p in &pts {
            if out.last().is_none_or(|&q: &Point| q.dist(p) > eps) {
                out.push(p);
            }
        }
        while out.len() > 1 && out[0].dist(out[out.len() - 1]) <= eps {
            out.pop();
        }
        let m = out.len();
        let mut keep = Vec::with_capacity(m);
        for i in 0..m {
            let (a, b, c) = (out[(i + m - 1) % m], out[i], out[(i + 1) % m]);
            // Distance of b from the line through a and c, or from a when
            // a and c coincide.
            let off = if a.dist(c) <= eps { a.dist(b) } else { point_line_distance(b, a, c) };
            if off > eps {
                keep.push(b);
            }
        }
        let stable = keep.len() == n;
        pts = keep;
        if stable {
            return pts;
        }
    }
}

fn point_line_distance(p: Point, a: Point, b: Point) -> f64 {
    let d = b - a;
    ((p - a).cross(d) / d.norm()).abs()
}

fn centred(pts: &[Point]) -> Vec<Point> {
    let mean = pts.iter().fold(Point::ORIGIN, |s, &p| s + p) / pts.len() as f64;
    pts.iter().map(|&p| p - mean).collect()
}

/// Equal as cyclic sequences up to `eps` per vertex.
fn cyclic_match(a: &[Point], b: &[Point], eps: f64) -> bool {
    let n = a.len();
    n == b.len() && (0..n).any(|r| (0..n).all(|i| a[i].dist(b[(i + r) % n]) <= eps))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DensityReport {
    pub radius: f64,
    pub window: BBox,
    pub spacing: f64,
    pub probes: usize,
    pub misses: usize,
    pub worst: Option<Point>,
    pub passed: bool,
}

/// Every disc of radius `R` (the largest prototile diameter) centred in a
/// window of side `10·diam(supp p)` around `p + x` meets the built set.
///
/// Disc centres are sampled on a grid of spacing `s`; each sample is tested
/// with radius `R - s·√2/2`, which covers every centre in its cell.
pub fn relative_density_check(build: &DenseSetBuild, rule: &SubstitutionRule, p: TileId, grid: usize) -> Result<DensityReport> {
    if grid == 0 {
        return Err(Error::OutOfRange("grid size must be positive".into()));
    }
    let support = rule.prototile(p).support.translate(build.x);
    let side = 10.0 * support.diameter();
    let c = support.bbox().center();
    let half = Point::new(side / 2.0, side / 2.0);
    let window = BBox { min: c - half, max: c + half };
    let radius = rule.prototiles().iter().map(|q| q.support.diameter()).fold(0.0, f64::max);
    let spacing = side / grid as f64;
    let r = radius - spacing * std::f64::consts::SQRT_2 / 2.0;
    if r <= 0.0 {
        return Err(Error::ResolutionTooCoarse(format!("grid spacing {spacing} leaves no test radius")));
    }
    let mut probes = 0;
    let mut misses = 0;
    let mut worst = None;
    for j in 0..=grid {
        for i in 0..=grid {
            let q = Point::new(window.min.x + i as f64 * spacing, window.min.y + j as f64 * spacing);
            probes += 1;
            let hit = build.regions.iter().any(|reg| {
                crossing_parity(reg, q) || {
                    let m = reg.len();
                    (0..m).any(|k| point_segment_distance(q, reg[k], reg[(k + 1) % m]) <= r)
                }
            });
            if !hit {
                misses += 1;
                worst.get_or_insert(q);
            }
        }
    }
    Ok(DensityReport { radius, window, spacing, probes, misses, worst, passed: misses == 0 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve::approximant;
    use crate::io::builtin_rule;
    use crate::substitution::Prototile;

    fn tm() -> (SubstitutionRule, OrderSpec) {
        let l = builtin_rule("thue_morse_2d", None).unwrap();
        (l.rule, l.order)
    }

    #[test]
    fn thue_morse_fixed_placements() {
        let (rule, _) = tm();
        let a = rule.id_of("A").unwrap();
        let fps = find_fixed_placements(&rule, a, 1, 1000).unwrap();
        let xs: Vec<Point> = fps.iter().map(|f| f.x).collect();
        // d / (1 - 2) for the A-children at (0,0) and (1,1).
        assert_eq!(xs, vec![Point::new(0.0, 0.0), Point::new(-1.0, -1.0)]);
        for fp in &fps {
            assert!(check_fixed_point(fp, &rule, Tolerance::default(), 1000).unwrap());
            // Both copies sit in a corner of the supertile.
            assert!(!check_interior(fp, &rule, Tolerance::default()));
        }
    }

    #[test]
    fn fib_corner_placement() {
        let l = builtin_rule("fib2d", None).unwrap();
        let a = l.rule.id_of("a").unwrap();
        let fps = find_fixed_placements(&l.rule, a, 1, 1000).unwrap();
        assert_eq!(fps.len(), 1);
        assert_eq!(fps[0].x.norm(), 0.0);
        assert!(!check_interior(&fps[0], &l.rule, Tolerance::default()));
    }

    #[test]
    fn no_self_copy_means_no_placement() {
        let sq = Polygon::rect(0.0, 0.0, 1.0, 1.0).unwrap();
        let pr = |n: &str| Prototile { name: n.into(), label: n.into(), support: sq.clone() };
        let swap = SubstitutionRule::new(
            "swap",
            2.0,
            vec![pr("P"), pr("Q")],
            vec![
                [(0.0, 0.0), (1.0, 0.0), (0.0, 1.0), (1.0, 1.0)]
                    .iter()
                    .map(|&(x, y)| PlacedTile { proto: TileId(1), offset: Point::new(x, y) })
                    .collect(),
                [(0.0, 0.0), (1.0, 0.0), (0.0, 1.0), (1.0, 1.0)]
                    .iter()
                    .map(|&(x, y)| PlacedTile { proto: TileId(0), offset: Point::new(x, y) })
                    .collect(),
            ],
        )
        .unwrap();
        assert!(find_fixed_placements(&swap, TileId(0), 1, 1000).unwrap().is_empty());
        assert_eq!(find_fixed_placements(&swap, TileId(0), 2, 1000).unwrap().len(), 16);
    }

    #[test]
    fn lebesgue_order_is_not_edge_adjacent() {
        let (rule, order) = tm();
        let a = rule.id_of("A").unwrap();
        // Tiles 2 and 3 of the Z meet at a single corner.
        assert!(!adjacency_at(&rule, &order, a, 1, Tolerance::default(), 1000).unwrap());
        assert!(check_adjacency(&[Polygon::rect(0.0, 0.0, 1.0, 1.0).unwrap()], Tolerance::default()));
    }

    #[test]
    fn loop_vertices_match_the_approximant() {
        let eq = builtin_rule("equithirds_variant", None).unwrap();
        let p = eq.rule.id_of("B+").unwrap();
        let cs = CurveSpec::single(eq.rule.clone(), eq.order.clone(), p).unwrap();
        for m in 1..=4 {
            let a = approximant(&cs, m).unwrap();
            let b = loop_vertices(&eq.rule, &eq.order, p, m, 1 << 20).unwrap();
            assert_eq!(a.vertices, b);
        }
    }

    #[test]
    fn region_is_nested_in_itself() {
        let (rule, order) = tm();
        let cs = CurveSpec::single(rule, order, TileId(0)).unwrap();
        let r = closed_square(&cs, 3);
        assert!(region_contains(&r, &r, 128).unwrap());
        let far = r.translate(Point::new(5.0, 0.0));
        assert!(!region_contains(&far, &r, 128).unwrap());
        assert!(matches!(region_contains(&r, &r, 2), Err(Error::ResolutionTooCoarse(_))));
    }

    fn closed_square(cs: &CurveSpec, n: u32) -> Region {
        crate::curve::closed_region(&approximant(cs, n).unwrap(), cs.tol()).unwrap()
    }

    #[test]
    fn clean_loop_removes_degenerate_parts() {
        let p = |x: f64, y: f64| Point::new(x, y);
        // Back and forth along one segment has no area.
        assert!(clean_loop(vec![p(0.0, 0.0), p(1.0, 0.0), p(2.0, 0.0), p(1.0, 0.0)], 1e-9).is_empty());
        let sq = clean_loop(
            vec![p(0.0, 0.0), p(0.5, 0.0), p(1.0, 0.0), p(1.0, 1.0), p(1.0, 1.0), p(0.0, 1.0), p(0.0, 0.0)],
            1e-9,
        );
        assert_eq!(sq, vec![p(0.0, 0.0), p(1.0, 0.0), p(1.0, 1.0), p(0.0, 1.0)]);
    }

    #[test]
    fn cyclic_matching() {
        let p = |x: f64, y: f64| Point::new(x, y);
        let a = vec![p(0.0, 0.0), p(1.0, 0.0), p(0.0, 1.0)];
        let b = vec![p(0.0, 1.0), p(0.0, 0.0), p(1.0, 0.0)];
        assert!(cyclic_match(&a, &b, 1e-9));
        let rev: Vec<Point> = a.iter().rev().copied().collect();
        assert!(!cyclic_match(&a, &[p(0.0, 0.0), p(1.0, 0.0), p(0.0, 1.1)], 1e-9));
        assert!(cyclic_match(&rev, &[p(0.0, 1.0), p(1.0, 0.0), p(0.0, 0.0)], 1e-9));
    }
}
