//! Planar polygon primitives.
//!
//! Coordinates are `f64` and every predicate takes a [`Tolerance`]. Nothing
//! combinatorial downstream (orders, addresses, intervals) depends on these
//! floats; geometry only decides areas, containment and adjacency.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const ORIGIN: Point = Point { x: 0.0, y: 0.0 };

    pub const fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    pub fn dot(self, o: Point) -> f64 {
        self.x * o.x + self.y * o.y
    }

    pub fn cross(self, o: Point) -> f64 {
        self.x * o.y - self.y * o.x
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn dist(self, o: Point) -> f64 {
        (self - o).norm()
    }

    /// Rotates counter-clockwise about the origin. Quarter turns are exact.
    pub fn rotate_deg(self, deg: f64) -> Point {
        let (s, c) = sin_cos_deg(deg);
        Point::new(c * self.x - s * self.y, s * self.x + c * self.y)
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

impl Add for Point {
    type Output = Point;
    fn add(self, o: Point) -> Point {
        Point::new(self.x + o.x, self.y + o.y)
    }
}

impl Sub for Point {
    type Output = Point;
    fn sub(self, o: Point) -> Point {
        Point::new(self.x - o.x, self.y - o.y)
    }
}

impl Mul<f64> for Point {
    type Output = Point;
    fn mul(self, s: f64) -> Point {
        Point::new(self.x * s, self.y * s)
    }
}

impl Div<f64> for Point {
    type Output = Point;
    fn div(self, s: f64) -> Point {
        Point::new(self.x / s, self.y / s)
    }
}

impl Neg for Point {
    type Output = Point;
    fn neg(self) -> Point {
        Point::new(-self.x, -self.y)
    }
}

/// `(sin, cos)` of an angle in degrees, exact at multiples of 90.
pub fn sin_cos_deg(deg: f64) -> (f64, f64) {
    let r = deg.rem_euclid(360.0);
    if r == 0.0 {
        (0.0, 1.0)
    } else if r == 90.0 {
        (1.0, 0.0)
    } else if r == 180.0 {
        (0.0, -1.0)
    } else if r == 270.0 {
        (-1.0, 0.0)
    } else {
        r.to_radians().sin_cos()
    }
}

/// Length scale for geometric predicates.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Tolerance {
    eps: f64,
}

impl Tolerance {
    pub const DEFAULT_EPS: f64 = 1e-9;

    pub fn new(eps: f64) -> Result<Self> {
        if eps > 0.0 && eps.is_finite() {
            Ok(Tolerance { eps })
        } else {
            Err(Error::InvalidTolerance(eps))
        }
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance { eps: Self::DEFAULT_EPS }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Segment {
    pub a: Point,
    pub b: Point,
}

impl Segment {
    pub fn length(&self) -> f64 {
        self.a.dist(self.b)
    }

    /// Endpoints in lexicographic order, so equal segments compare equal.
    fn normalized(self) -> Segment {
        if (self.a.x, self.a.y) <= (self.b.x, self.b.y) {
            self
        } else {
            Segment { a: self.b, b: self.a }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BBox {
    pub min: Point,
    pub max: Point,
}

impl BBox {
    pub fn of(points: &[Point]) -> BBox {
        let mut min = Point::new(f64::INFINITY, f64::INFINITY);
        let mut max = Point::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
        for p in points {
            min.x = min.x.min(p.x);
            min.y = min.y.min(p.y);
            max.x = max.x.max(p.x);
            max.y = max.y.max(p.y);
        }
        BBox { min, max }
    }

    pub fn width(&self) -> f64 {
        self.max.x - self.min.x
    }

    pub fn height(&self) -> f64 {
        self.max.y - self.min.y
    }

    pub fn center(&self) -> Point {
        (self.min + self.max) * 0.5
    }

    pub fn union(&self, o: &BBox) -> BBox {
        BBox {
            min: Point::new(self.min.x.min(o.min.x), self.min.y.min(o.min.y)),
            max: Point::new(self.max.x.max(o.max.x), self.max.y.max(o.max.y)),
        }
    }

    pub fn overlaps(&self, o: &BBox, slack: f64) -> bool {
        self.min.x <= o.max.x + slack
            && o.min.x <= self.max.x + slack
            && self.min.y <= o.max.y + slack
            && o.min.y <= self.max.y + slack
    }

    pub fn corners(&self) -> [Point; 4] {
        [
            self.min,
            Point::new(self.max.x, self.min.y),
            self.max,
            Point::new(self.min.x, self.max.y),
        ]
    }
}

/// A simple polygon with counter-clockwise vertices.
#[derive(Clone, Debug, PartialEq)]
pub struct Polygon {
    vertices: Vec<Point>,
}

impl Polygon {
    /// Validates and orients `vertices`. Clockwise input is reversed.
    pub fn new(mut vertices: Vec<Point>, tol: Tolerance) -> Result<Self> {
        if vertices.len() < 3 {
            return Err(Error::DegeneratePolygon(format!(
                "{} vertices, need at least 3",
                vertices.len()
            )));
        }
        if !vertices.iter().all(|p| p.is_finite()) {
            return Err(Error::NonFinite);
        }
        let a = signed_area(&vertices);
        let eps = tol.eps();
        if a.abs() <= eps * eps {
            return Err(Error::DegeneratePolygon(format!("area {a:e}")));
        }
        if a < 0.0 {
            vertices.reverse();
        }
        check_simple(&vertices, eps)?;
        Ok(Polygon { vertices })
    }

    /// Axis-aligned rectangle `[x0, x1] x [y0, y1]`.
    pub fn rect(x0: f64, y0: f64, x1: f64, y1: f64) -> Result<Self> {
        Polygon::new(
            vec![
                Point::new(x0, y0),
                Point::new(x1, y0),
                Point::new(x1, y1),
                Point::new(x0, y1),
            ],
            Tolerance::default(),
        )
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn edges(&self) -> impl Iterator<Item = Segment> + '_ {
        let n = self.vertices.len();
        (0..n).map(move |i| Segment { a: self.vertices[i], b: self.vertices[(i + 1) % n] })
    }

    pub fn area(&self) -> f64 {
        signed_area(&self.vertices)
    }

    /// Area-weighted centroid.
    pub fn centroid(&self) -> Point {
        polygon_centroid(&self.vertices)
    }

    /// Largest distance between two vertices. For a polygon this is the
    /// diameter of the whole support, convex or not.
    pub fn diameter(&self) -> f64 {
        let v = &self.vertices;
        let mut best = 0.0f64;
        for i in 0..v.len() {
            for j in i + 1..v.len() {
                best = best.max(v[i].dist(v[j]));
            }
        }
        best
    }

    pub fn perimeter(&self) -> f64 {
        self.edges().map(|e| e.length()).sum()
    }

    pub fn bbox(&self) -> BBox {
        BBox::of(&self.vertices)
    }

    pub fn is_convex(&self) -> bool {
        let n = self.vertices.len();
        (0..n).all(|i| {
            let a = self.vertices[i];
            let b = self.vertices[(i + 1) % n];
            let c = self.vertices[(i + 2) % n];
            (b - a).cross(c - b) >= -1e-12 * (b - a).norm() * (c - b).norm()
        })
    }

    pub fn translate(&self, v: Point) -> Polygon {
        Polygon { vertices: self.vertices.iter().map(|&p| p + v).collect() }
    }

    /// Uniform scaling about the origin; `s` must be positive.
    pub fn scale(&self, s: f64) -> Polygon {
        assert!(s > 0.0 && s.is_finite(), "scale factor must be positive");
        Polygon { vertices: self.vertices.iter().map(|&p| p * s).collect() }
    }

    pub fn rotate_deg(&self, deg: f64) -> Polygon {
        Polygon { vertices: self.vertices.iter().map(|&p| p.rotate_deg(deg)).collect() }
    }

    /// Inclusive containment: points within `eps` of the boundary count.
    pub fn contains(&self, p: Point, tol: Tolerance) -> bool {
        if self.boundary_distance(p) <= tol.eps() {
            return true;
        }
        winding_number(&self.vertices, p) != 0
    }

    /// Strict containment: inside and farther than `eps` from the boundary.
    pub fn contains_strictly(&self, p: Point, tol: Tolerance) -> bool {
        self.boundary_distance(p) > tol.eps() && winding_number(&self.vertices, p) != 0
    }

    pub fn boundary_distance(&self, p: Point) -> f64 {
        self.edges().map(|e| point_segment_distance(p, e.a, e.b)).fold(f64::INFINITY, f64::min)
    }

    /// Fan or ear-clipping triangulation, counter-clockwise triangles.
    pub fn triangulate(&self) -> Vec<[Point; 3]> {
        if self.is_convex() {
            let v = &self.vertices;
            return (1..v.len() - 1).map(|i| [v[0], v[i], v[i + 1]]).collect();
        }
        ear_clip(&self.vertices)
    }
}

pub fn signed_area(pts: &[Point]) -> f64 {
    let n = pts.len();
    let mut s = 0.0;
    for i in 0..n {
        s += pts[i].cross(pts[(i + 1) % n]);
    }
    s * 0.5
}

fn polygon_centroid(pts: &[Point]) -> Point {
    let n = pts.len();
    let (mut cx, mut cy, mut a2) = (0.0, 0.0, 0.0);
    for i in 0..n {
        let p = pts[i];
        let q = pts[(i + 1) % n];
        let w = p.cross(q);
        a2 += w;
        cx += (p.x + q.x) * w;
        cy += (p.y + q.y) * w;
    }
    Point::new(cx / (3.0 * a2), cy / (3.0 * a2))
}

/// Winding number of a closed polyline around `p`.
pub fn winding_number(pts: &[Point], p: Point) -> i32 {
    let n = pts.len();
    let mut w = 0;
    for i in 0..n {
        let a = pts[i];
        let b = pts[(i + 1) % n];
        if a.y <= p.y {
            if b.y > p.y && (b - a).cross(p - a) > 0.0 {
                w += 1;
            }
        } else if b.y <= p.y && (b - a).cross(p - a) < 0.0 {
            w -= 1;
        }
    }
    w
}

pub fn point_segment_distance(p: Point, a: Point, b: Point) -> f64 {
    let ab = b - a;
    let len2 = ab.dot(ab);
    if len2 == 0.0 {
        return p.dist(a);
    }
    let t = ((p - a).dot(ab) / len2).clamp(0.0, 1.0);
    p.dist(a + ab * t)
}

pub fn segment_distance(a: Segment, b: Segment) -> f64 {
    if segments_cross(a.a, a.b, b.a, b.b) {
        return 0.0;
    }
    point_segment_distance(a.a, b.a, b.b)
        .min(point_segment_distance(a.b, b.a, b.b))
        .min(point_segment_distance(b.a, a.a, a.b))
        .min(point_segment_distance(b.b, a.a, a.b))
}

fn orient(a: Point, b: Point, c: Point) -> f64 {
    (b - a).cross(c - a)
}

/// Proper crossing test (interiors intersect transversally).
fn segments_cross(p1: Point, p2: Point, q1: Point, q2: Point) -> bool {
    let d1 = orient(q1, q2, p1);
    let d2 = orient(q1, q2, p2);
    let d3 = orient(p1, p2, q1);
    let d4 = orient(p1, p2, q2);
    ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0))
        && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0))
}

fn check_simple(v: &[Point], eps: f64) -> Result<()> {
    let n = v.len();
    for i in 0..n {
        let a = Segment { a: v[i], b: v[(i + 1) % n] };
        if a.length() <= eps {
            return Err(Error::DegeneratePolygon(format!("zero-length edge at vertex {i}")));
        }
        // Spike: consecutive edges folding back onto each other.
        let c = v[(i + 2) % n];
        let (d1, d2) = (a.b - a.a, c - a.b);
        if d1.cross(d2).abs() <= eps * d1.norm().max(d2.norm()) && d1.dot(d2) < 0.0 {
            return Err(Error::NotSimple(format!("edges {i} and {} fold back", (i + 1) % n)));
        }
        for j in i + 2..n {
            if i == 0 && j == n - 1 {
                continue;
            }
            let b = Segment { a: v[j], b: v[(j + 1) % n] };
            if segment_distance(a, b) <= eps {
                return Err(Error::NotSimple(format!("edges {i} and {j} touch")));
            }
        }
    }
    Ok(())
}

fn ear_clip(pts: &[Point]) -> Vec<[Point; 3]> {
    let mut idx: Vec<usize> = (0..pts.len()).collect();
    let mut out = Vec::with_capacity(pts.len().saturating_sub(2));
    let mut guard = 0;
    while idx.len() > 3 && guard < 10 * pts.len() * pts.len() {
        guard += 1;
        let m = idx.len();
        let mut clipped = false;
        for k in 0..m {
            let (ia, ib, ic) = (idx[(k + m - 1) % m], idx[k], idx[(k + 1) % m]);
            let (a, b, c) = (pts[ia], pts[ib], pts[ic]);
            if orient(a, b, c) <= 0.0 {
                continue;
            }
            let blocked = idx.iter().any(|&j| {
                j != ia
                    && j != ib
                    && j != ic
                    && orient(a, b, pts[j]) >= 0.0
                    && orient(b, c, pts[j]) >= 0.0
                    && orient(c, a, pts[j]) >= 0.0
            });
            if !blocked {
                out.push([a, b, c]);
                idx.remove(k);
                clipped = true;
                break;
            }
        }
        if !clipped {
            break;
        }
    }
    if idx.len() == 3 {
        out.push([pts[idx[0]], pts[idx[1]], pts[idx[2]]]);
    }
    out
}

/// Sutherland-Hodgman clip of an arbitrary closed polyline against a convex
/// counter-clockwise polygon. Winding numbers of points inside the clip
/// region are preserved, so both nonzero and even-odd fills survive.
pub fn clip_convex(subject: &[Point], clip: &[Point]) -> Vec<Point> {
    let mut output: Vec<Point> = subject.to_vec();
    let n = clip.len();
    for i in 0..n {
        if output.is_empty() {
            break;
        }
        let (e0, e1) = (clip[i], clip[(i + 1) % n]);
        let input = std::mem::take(&mut output);
        let inside = |p: Point| orient(e0, e1, p) >= 0.0;
        let m = input.len();
        for k in 0..m {
            let cur = input[k];
            let prev = input[(k + m - 1) % m];
            let (ci, pi) = (inside(cur), inside(prev));
            if ci {
                if !pi {
                    output.push(line_intersection(prev, cur, e0, e1));
                }
                output.push(cur);
            } else if pi {
                output.push(line_intersection(prev, cur, e0, e1));
            }
        }
    }
    output
}

fn line_intersection(p: Point, q: Point, a: Point, b: Point) -> Point {
    let d = q - p;
    let e = b - a;
    let denom = d.cross(e);
    if denom == 0.0 {
        return q;
    }
    let t = (a - p).cross(e) / denom;
    p + d * t
}

/// Area of `a ∩ b` for simple polygons.
pub fn intersection_area(a: &Polygon, b: &Polygon) -> f64 {
    if !a.bbox().overlaps(&b.bbox(), 0.0) {
        return 0.0;
    }
    b.triangulate()
        .iter()
        .map(|tri| signed_area(&clip_convex(a.vertices(), tri)))
        .sum::<f64>()
        .max(0.0)
}

/// True iff the interiors of `a` and `b` do not overlap, up to an area
/// slack of `eps` times the larger perimeter.
pub fn interiors_disjoint(a: &Polygon, b: &Polygon, tol: Tolerance) -> bool {
    if !a.bbox().overlaps(&b.bbox(), tol.eps()) {
        return true;
    }
    intersection_area(a, b) <= tol.eps() * a.perimeter().max(b.perimeter())
}

/// The longest segment along which the boundaries of `a` and `b` overlap,
/// if it is longer than `eps`. Point contacts yield `None`.
pub fn shared_edge(a: &Polygon, b: &Polygon, tol: Tolerance) -> Option<Segment> {
    let eps = tol.eps();
    if !a.bbox().overlaps(&b.bbox(), eps) {
        return None;
    }
    let mut pieces: Vec<(Point, Point)> = Vec::new();
    for ea in a.edges() {
        let d = ea.b - ea.a;
        let len = d.norm();
        let u = d / len;
        for eb in b.edges() {
            let off0 = (eb.a - ea.a).cross(u).abs();
            let off1 = (eb.b - ea.a).cross(u).abs();
            if off0 > eps || off1 > eps {
                continue;
            }
            let s0 = (eb.a - ea.a).dot(u);
            let s1 = (eb.b - ea.a).dot(u);
            let lo = s0.min(s1).max(0.0);
            let hi = s0.max(s1).min(len);
            if hi - lo > eps {
                pieces.push((ea.a + u * lo, ea.a + u * hi));
            }
        }
    }
    // Merge collinear pieces that touch, so a shared side split by an extra
    // vertex comes back whole.
    let mut merged: Vec<(Point, Point)> = Vec::new();
    for (p, q) in pieces {
        let mut seg = (p, q);
        loop {
            let pos = merged.iter().position(|&(r, s)| collinear_touching(seg, (r, s), eps));
            match pos {
                Some(i) => {
                    let other = merged.swap_remove(i);
                    seg = farthest_pair([seg.0, seg.1, other.0, other.1]);
                }
                None => break,
            }
        }
        merged.push(seg);
    }
    merged
        .into_iter()
        .map(|(p, q)| Segment { a: p, b: q }.normalized())
        .max_by(|x, y| x.length().total_cmp(&y.length()))
}

fn collinear_touching(s: (Point, Point), t: (Point, Point), eps: f64) -> bool {
    let d = s.1 - s.0;
    let len = d.norm();
    if len == 0.0 {
        return false;
    }
    let u = d / len;
    if (t.0 - s.0).cross(u).abs() > eps || (t.1 - s.0).cross(u).abs() > eps {
        return false;
    }
    let (a, b) = ((t.0 - s.0).dot(u), (t.1 - s.0).dot(u));
    a.max(b) >= -eps && a.min(b) <= len + eps
}

fn farthest_pair(p: [Point; 4]) -> (Point, Point) {
    let mut best = (p[0], p[1]);
    let mut bd = -1.0;
    for i in 0..4 {
        for j in i + 1..4 {
            let d = p[i].dist(p[j]);
            if d > bd {
                bd = d;
                best = (p[i], p[j]);
            }
        }
    }
    best
}

/// A closed polyline filled with the even-odd rule. Unlike [`Polygon`] it may
/// self-intersect or repeat vertices.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Region {
    vertices: Vec<Point>,
}

impl Region {
    /// Fails if fewer than 3 vertices or all vertices are collinear.
    pub fn new(vertices: Vec<Point>, tol: Tolerance) -> Result<Self> {
        if vertices.len() < 3 {
            return Err(Error::DegenerateRegion(format!("{} vertices", vertices.len())));
        }
        if !vertices.iter().all(|p| p.is_finite()) {
            return Err(Error::NonFinite);
        }
        let a = vertices[0];
        let far = vertices
            .iter()
            .copied()
            .max_by(|p, q| p.dist(a).total_cmp(&q.dist(a)))
            .unwrap_or(a);
        let len = far.dist(a);
        let spread = vertices
            .iter()
            .map(|&p| ((far - a).cross(p - a) / len.max(f64::MIN_POSITIVE)).abs())
            .fold(0.0, f64::max);
        if len <= tol.eps() || spread <= tol.eps() {
            return Err(Error::DegenerateRegion("all vertices collinear".into()));
        }
        Ok(Region { vertices })
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn edges(&self) -> impl Iterator<Item = Segment> + '_ {
        let n = self.vertices.len();
        (0..n).map(move |i| Segment { a: self.vertices[i], b: self.vertices[(i + 1) % n] })
    }

    pub fn bbox(&self) -> BBox {
        BBox::of(&self.vertices)
    }

    pub fn contains(&self, p: Point) -> bool {
        crossing_parity(&self.vertices, p)
    }

    pub fn boundary_distance(&self, p: Point) -> f64 {
        self.edges().map(|e| point_segment_distance(p, e.a, e.b)).fold(f64::INFINITY, f64::min)
    }

    pub fn translate(&self, v: Point) -> Region {
        Region { vertices: self.vertices.iter().map(|&p| p + v).collect() }
    }

    pub fn scale(&self, s: f64) -> Region {
        Region { vertices: self.vertices.iter().map(|&p| p * s).collect() }
    }

    /// Clips against a convex counter-clockwise polygon. Parity inside the
    /// clip polygon is unchanged; `None` when nothing is left.
    pub fn clip_convex(&self, clip: &Polygon) -> Option<Vec<Point>> {
        let out = clip_convex(&self.vertices, clip.vertices());
        (out.len() >= 3).then_some(out)
    }
}

impl From<Polygon> for Region {
    fn from(p: Polygon) -> Region {
        Region { vertices: p.vertices }
    }
}

/// Even-odd membership of `p` in the closed polyline `pts`.
pub fn crossing_parity(pts: &[Point], p: Point) -> bool {
    let n = pts.len();
    let mut inside = false;
    for i in 0..n {
        let a = pts[i];
        let b = pts[(i + 1) % n];
        if (a.y > p.y) != (b.y > p.y) {
            let x = a.x + (p.y - a.y) / (b.y - a.y) * (b.x - a.x);
            if p.x < x {
                inside = !inside;
            }
        }
    }
    inside
}
