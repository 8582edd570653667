//! Boolean pixel grids for approximate region predicates.
//!
//! Pixel `(i, j)` is sampled at its centre. Filling is scanline even-odd with
//! half-open spans, so two regions sharing an edge never both claim a pixel
//! whose centre lies on that edge.

use crate::geometry::{BBox, Point};

#[derive(Clone, Debug, PartialEq)]
pub struct Grid {
    origin: Point,
    pitch: f64,
    width: usize,
    height: usize,
    cells: Vec<bool>,
}

impl Grid {
    /// Square pixels, `resolution` across the longer side of `bbox`.
    pub fn covering(bbox: BBox, resolution: usize) -> Grid {
        let resolution = resolution.max(1);
        let side = bbox.width().max(bbox.height());
        let pitch = if side > 0.0 { side / resolution as f64 } else { 1.0 };
        let width = ((bbox.width() / pitch).ceil() as usize).max(1);
        let height = ((bbox.height() / pitch).ceil() as usize).max(1);
        Grid { origin: bbox.min, pitch, width, height, cells: vec![false; width * height] }
    }

    /// Same frame as `self`, all cells empty.
    pub fn blank(&self) -> Grid {
        Grid { cells: vec![false; self.cells.len()], ..self.clone() }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn pitch(&self) -> f64 {
        self.pitch
    }

    pub fn center(&self, i: usize, j: usize) -> Point {
        Point::new(
            self.origin.x + (i as f64 + 0.5) * self.pitch,
            self.origin.y + (j as f64 + 0.5) * self.pitch,
        )
    }

    pub fn get(&self, i: usize, j: usize) -> bool {
        self.cells[j * self.width + i]
    }

    pub fn set(&mut self, i: usize, j: usize, v: bool) {
        self.cells[j * self.width + i] = v;
    }

    pub fn count(&self) -> usize {
        self.cells.iter().filter(|&&c| c).count()
    }

    /// Toggles every pixel whose centre is inside the closed polyline
    /// (even-odd), so filling several loops yields their symmetric difference.
    pub fn xor_fill(&mut self, pts: &[Point]) {
        let n = pts.len();
        if n < 3 {
            return;
        }
        // Edges are bucketed by the rows whose centre line they cross, so the
        // cost is edges plus crossings rather than edges times rows.
        let mut rows: Vec<Vec<f64>> = vec![Vec::new(); self.height];
        let row_y = |j: usize| self.origin.y + (j as f64 + 0.5) * self.pitch;
        for k in 0..n {
            let a = pts[k];
            let b = pts[(k + 1) % n];
            if a.y == b.y {
                continue;
            }
            let (lo, hi) = (a.y.min(b.y), a.y.max(b.y));
            let first = ((lo - self.origin.y) / self.pitch - 0.5).ceil() - 1.0;
            let last = ((hi - self.origin.y) / self.pitch - 0.5).ceil() + 1.0;
            if last < 0.0 || first >= self.height as f64 {
                continue;
            }
            let j0 = first.max(0.0) as usize;
            let j1 = (last.max(0.0) as usize).min(self.height);
            for (j, row) in rows.iter_mut().enumerate().take(j1).skip(j0) {
                let y = row_y(j);
                if (a.y > y) != (b.y > y) {
                    row.push(a.x + (y - a.y) / (b.y - a.y) * (b.x - a.x));
                }
            }
        }
        for (j, xs) in rows.iter_mut().enumerate() {
            xs.sort_by(f64::total_cmp);
            for span in xs.chunks_exact(2) {
                // Pixel centres with x0 <= cx < x1.
                let i0 = ((span[0] - self.origin.x) / self.pitch - 0.5).ceil().max(0.0) as usize;
                let i1 = ((span[1] - self.origin.x) / self.pitch - 0.5).ceil();
                let i1 = (i1.max(0.0) as usize).min(self.width);
                for i in i0..i1 {
                    let c = &mut self.cells[j * self.width + i];
                    *c = !*c;
                }
            }
        }
    }

    /// Sets every pixel inside the loop (even-odd), leaving others untouched.
    pub fn union_fill(&mut self, pts: &[Point]) {
        let mut tmp = self.blank();
        tmp.xor_fill(pts);
        self.union_with(&tmp);
    }

    pub fn union_with(&mut self, other: &Grid) {
        assert_eq!(self.cells.len(), other.cells.len(), "grids differ in shape");
        for (a, &b) in self.cells.iter_mut().zip(&other.cells) {
            *a |= b;
        }
    }

    /// Grows the filled set by one pixel in all eight directions.
    pub fn dilate(&self) -> Grid {
        let mut out = self.clone();
        for j in 0..self.height {
            for i in 0..self.width {
                if !self.get(i, j) {
                    continue;
                }
                for dj in -1i64..=1 {
                    for di in -1i64..=1 {
                        let (x, y) = (i as i64 + di, j as i64 + dj);
                        if x >= 0 && y >= 0 && (x as usize) < self.width && (y as usize) < self.height {
                            out.set(x as usize, y as usize, true);
                        }
                    }
                }
            }
        }
        out
    }

    pub fn is_subset_of(&self, other: &Grid) -> bool {
        self.cells.iter().zip(&other.cells).all(|(&a, &b)| !a || b)
    }

    /// Number of connected components of cells equal to `value`, 8-connected
    /// if `diagonal` else 4-connected. With `pad` the grid is treated as
    /// surrounded by a ring of `value` cells, which joins every component
    /// touching the border into one.
    pub fn components(&self, value: bool, pad: bool, diagonal: bool) -> usize {
        let (w, h) = if pad { (self.width + 2, self.height + 2) } else { (self.width, self.height) };
        let at = |x: usize, y: usize| -> bool {
            if pad {
                if x == 0 || y == 0 || x == w - 1 || y == h - 1 {
                    value
                } else {
                    self.get(x - 1, y - 1)
                }
            } else {
                self.get(x, y)
            }
        };
        let mut seen = vec![false; w * h];
        let mut count = 0;
        let mut stack = Vec::new();
        for y0 in 0..h {
            for x0 in 0..w {
                if seen[y0 * w + x0] || at(x0, y0) != value {
                    continue;
                }
                count += 1;
                seen[y0 * w + x0] = true;
                stack.push((x0, y0));
                while let Some((x, y)) = stack.pop() {
                    let mut visit = |nx: usize, ny: usize| {
                        if !seen[ny * w + nx] && at(nx, ny) == value {
                            seen[ny * w + nx] = true;
                            stack.push((nx, ny));
                        }
                    };
                    if x > 0 {
                        visit(x - 1, y);
                    }
                    if x + 1 < w {
                        visit(x + 1, y);
                    }
                    if y > 0 {
                        visit(x, y - 1);
                    }
                    if y + 1 < h {
                        visit(x, y + 1);
                    }
                    if diagonal {
                        for (dx, dy) in [(-1i64, -1i64), (1, -1), (-1, 1), (1, 1)] {
                            let (nx, ny) = (x as i64 + dx, y as i64 + dy);
                            if nx >= 0 && ny >= 0 && (nx as usize) < w && (ny as usize) < h {
                                visit(nx as usize, ny as usize);
                            }
                        }
                    }
                }
            }
        }
        count
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn square(x0: f64, y0: f64, s: f64) -> Vec<Point> {
        vec![
            Point::new(x0, y0),
            Point::new(x0 + s, y0),
            Point::new(x0 + s, y0 + s),
            Point::new(x0, y0 + s),
        ]
    }

    fn unit_box() -> BBox {
        BBox { min: Point::new(0.0, 0.0), max: Point::new(1.0, 1.0) }
    }

    #[test]
    fn fill_counts_pixels() {
        let mut g = Grid::covering(unit_box(), 10);
        g.xor_fill(&square(0.0, 0.0, 0.5));
        assert_eq!(g.count(), 25);
    }

    #[test]
    fn shared_edge_pixels_claimed_once() {
        let mut a = Grid::covering(unit_box(), 8);
        let mut b = a.blank();
        a.xor_fill(&square(0.0, 0.0, 0.5));
        b.xor_fill(&square(0.5, 0.0, 0.5));
        let overlap = a.cells.iter().zip(&b.cells).filter(|(&x, &y)| x && y).count();
        assert_eq!(overlap, 0);
    }

    #[test]
    fn dilation_and_subset() {
        let mut small = Grid::covering(unit_box(), 20);
        small.xor_fill(&square(0.3, 0.3, 0.4));
        let mut big = small.blank();
        big.xor_fill(&square(0.33, 0.33, 0.34));
        assert!(!small.is_subset_of(&big));
        assert!(small.is_subset_of(&big.dilate()));
    }

    #[test]
    fn components_and_holes() {
        let mut g = Grid::covering(unit_box(), 20);
        g.union_fill(&square(0.1, 0.1, 0.2));
        g.union_fill(&square(0.6, 0.6, 0.2));
        assert_eq!(g.components(true, false, true), 2);
        assert_eq!(g.components(false, true, false), 1);

        // A frame encloses a hole in its complement.
        let mut f = Grid::covering(unit_box(), 20);
        f.xor_fill(&square(0.1, 0.1, 0.8));
        f.xor_fill(&square(0.3, 0.3, 0.4));
        assert_eq!(f.components(true, false, true), 1);
        assert_eq!(f.components(false, true, false), 2);
    }
}
