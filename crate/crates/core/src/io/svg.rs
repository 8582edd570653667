//! Deterministic SVG 1.1 output.
//!
//! The y axis points up in the plane and down in SVG, so coordinates are
//! flipped inside the bounding box. Every number is printed with nine
//! decimals; identical input gives byte-identical output.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::geometry::{BBox, Point};

#[derive(Clone, Debug, PartialEq)]
pub enum SvgObject {
    /// Open polyline, stroked, never filled.
    Polyline { points: Vec<Point>, class: usize },
    /// Closed loop filled with the even-odd rule.
    Region { points: Vec<Point>, class: usize },
    /// Closed outline, stroked only.
    Outline { points: Vec<Point>, class: usize },
}

impl SvgObject {
    fn points(&self) -> &[Point] {
        match self {
            SvgObject::Polyline { points, .. } | SvgObject::Region { points, .. } | SvgObject::Outline { points, .. } => {
                points
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RenderOptions {
    pub stroke_width: f64,
    /// Render regions filled; when false they are drawn as outlines.
    pub fill: bool,
    /// Pixels per plane unit; `None` fits the longer side to 800 pixels.
    pub scale: Option<f64>,
    pub margin: f64,
    pub palette: Vec<String>,
}

impl Default for RenderOptions {
    fn default() -> Self {
        RenderOptions {
            stroke_width: 1.0,
            fill: true,
            scale: None,
            margin: 10.0,
            palette: ["#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f"]
                .iter()
                .map(|s| s.to_string())
                .collect(),
        }
    }
}

fn colour(opts: &RenderOptions, class: usize) -> &str {
    if opts.palette.is_empty() {
        "#000000"
    } else {
        &opts.palette[class % opts.palette.len()]
    }
}

pub fn emit_svg(objects: &[SvgObject], opts: &RenderOptions) -> Result<String> {
    if objects.is_empty() || objects.iter().all(|o| o.points().is_empty()) {
        return Err(Error::Empty("nothing to render".into()));
    }
    if !(opts.stroke_width > 0.0) || !(opts.margin >= 0.0) || opts.scale.is_some_and(|s| !(s > 0.0)) {
        return Err(Error::OutOfRange("render dimensions must be positive".into()));
    }
    let all: Vec<Point> = objects.iter().flat_map(|o| o.points().iter().copied()).collect();
    if !all.iter().all(|p| p.is_finite()) {
        return Err(Error::NonFinite);
    }
    let bbox = BBox::of(&all);
    let side = bbox.width().max(bbox.height());
    let scale = opts.scale.unwrap_or(if side > 0.0 { 800.0 / side } else { 1.0 });
    let width = bbox.width() * scale + 2.0 * opts.margin;
    let height = bbox.height() * scale + 2.0 * opts.margin;
    let map = |p: Point| ((p.x - bbox.min.x) * scale + opts.margin, (bbox.max.y - p.y) * scale + opts.margin);

    let mut out = String::new();
    out.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    let _ = writeln!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{width:.9}\" height=\"{height:.9}\" viewBox=\"0 0 {width:.9} {height:.9}\">"
    );
    for obj in objects {
        let pts = obj.points();
        if pts.is_empty() {
            continue;
        }
        let mut d = String::new();
        for (i, &p) in pts.iter().enumerate() {
            let (x, y) = map(p);
            let _ = write!(d, "{}{x:.9} {y:.9}", if i == 0 { "M" } else { " L" });
        }
        let sw = opts.stroke_width;
        match obj {
            SvgObject::Polyline { class, .. } => {
                let _ = writeln!(
                    out,
                    "<path d=\"{d}\" style=\"fill:none;stroke:{};stroke-width:{sw:.9}\"/>",
                    colour(opts, *class)
                );
            }
            SvgObject::Region { class, .. } if opts.fill => {
                let _ = writeln!(
                    out,
                    "<path d=\"{d} Z\" style=\"fill:{};fill-rule:evenodd;stroke:none\"/>",
                    colour(opts, *class)
                );
            }
            SvgObject::Region { class, .. } | SvgObject::Outline { class, .. } => {
                let _ = writeln!(
                    out,
                    "<path d=\"{d} Z\" style=\"fill:none;stroke:{};stroke-width:{sw:.9}\"/>",
                    colour(opts, *class)
                );
            }
        }
    }
    out.push_str("</svg>\n");
    Ok(out)
}
