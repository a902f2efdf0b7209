//! Coordinate polyrectangles stored as cyclic strings of inner normals and
//! line offsets.
//!
//! The boundary is traversed counterclockwise, so every inner normal is the
//! left-hand normal of the direction of travel. Edge `i` lies on the line
//! `y = offsets[i]` when its normal is `±e2` and on `x = offsets[i]` when its
//! normal is `±e1`; its endpoints are the intersections with the lines of
//! edges `i - 1` and `i + 1`.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::medium::{Axis, ChessboardMedium};
use crate::scalar::{lit, Scalar};

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Point<T> {
    pub x: T,
    pub y: T,
}

impl<T: Scalar> Point<T> {
    pub fn new(x: T, y: T) -> Self {
        Self { x, y }
    }

    pub fn dist(self, o: Self) -> T {
        (self.x - o.x).hypot(self.y - o.y)
    }
}

/// Inner normal of an edge: one of the four coordinate directions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Direction {
    E1,
    E2,
    MinusE1,
    MinusE2,
}

impl Direction {
    /// Next direction in the cyclic order `e1 → e2 → −e1 → −e2 → e1`.
    pub fn successor(self) -> Self {
        match self {
            Direction::E1 => Direction::E2,
            Direction::E2 => Direction::MinusE1,
            Direction::MinusE1 => Direction::MinusE2,
            Direction::MinusE2 => Direction::E1,
        }
    }

    pub fn predecessor(self) -> Self {
        match self {
            Direction::E1 => Direction::MinusE2,
            Direction::E2 => Direction::E1,
            Direction::MinusE1 => Direction::E2,
            Direction::MinusE2 => Direction::MinusE1,
        }
    }

    pub fn opposite(self) -> Self {
        self.successor().successor()
    }

    /// Axis of the edge line carrying this normal.
    pub fn edge_axis(self) -> Axis {
        match self {
            Direction::E1 | Direction::MinusE1 => Axis::Vertical,
            Direction::E2 | Direction::MinusE2 => Axis::Horizontal,
        }
    }

    /// `+1` for `e1`, `e2`; `−1` for `−e1`, `−e2`.
    pub fn sign(self) -> i8 {
        match self {
            Direction::E1 | Direction::E2 => 1,
            Direction::MinusE1 | Direction::MinusE2 => -1,
        }
    }

    pub fn vector(self) -> (i8, i8) {
        match self {
            Direction::E1 => (1, 0),
            Direction::E2 => (0, 1),
            Direction::MinusE1 => (-1, 0),
            Direction::MinusE2 => (0, -1),
        }
    }

    /// Sign of the direction of counterclockwise travel along the edge line.
    pub fn travel_sign(self) -> i8 {
        match self {
            Direction::E2 | Direction::MinusE1 => 1,
            Direction::MinusE2 | Direction::E1 => -1,
        }
    }

    pub fn is_orthogonal(self, o: Self) -> bool {
        self.edge_axis() != o.edge_axis()
    }

    pub fn label(self) -> &'static str {
        match self {
            Direction::E1 => "e1",
            Direction::E2 => "e2",
            Direction::MinusE1 => "-e1",
            Direction::MinusE2 => "-e2",
        }
    }

    fn from_travel(axis: Axis, positive: bool) -> Self {
        match (axis, positive) {
            (Axis::Horizontal, true) => Direction::E2,
            (Axis::Horizontal, false) => Direction::MinusE2,
            (Axis::Vertical, true) => Direction::MinusE1,
            (Axis::Vertical, false) => Direction::E1,
        }
    }
}

/// One edge with everything the calibrability analysis needs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EdgeView<T> {
    pub index: usize,
    pub normal: Direction,
    pub line_offset: T,
    /// Smaller endpoint coordinate along the edge line.
    pub p: T,
    /// Larger endpoint coordinate along the edge line.
    pub q: T,
    pub chi: i8,
    pub n_p: i8,
    pub n_q: i8,
    pub on_grid: bool,
}

impl<T: Scalar> EdgeView<T> {
    pub fn axis(&self) -> Axis {
        self.normal.edge_axis()
    }

    pub fn length(&self) -> T {
        self.q - self.p
    }

    /// Crystalline curvature `χ·2/ℓ`.
    pub fn curvature(&self) -> T {
        lit::<T>(2.0 * self.chi as f64) / self.length()
    }

    /// Same edge with its line moved by `delta` along the inner normal.
    pub fn shifted(&self, delta: T, medium: &ChessboardMedium<T>) -> Self {
        let off = self.line_offset + delta * lit(self.normal.sign() as f64);
        Self {
            line_offset: off,
            on_grid: medium.is_on_grid(off),
            ..*self
        }
    }

    /// A standalone edge used by tests and by the cracking module.
    pub fn detached(
        normal: Direction,
        line_offset: T,
        p: T,
        q: T,
        n_p: i8,
        n_q: i8,
        medium: &ChessboardMedium<T>,
    ) -> Self {
        Self {
            index: 0,
            normal,
            line_offset,
            p,
            q,
            chi: (n_q - n_p) / 2,
            n_p,
            n_q,
            on_grid: medium.is_on_grid(line_offset),
        }
    }
}

/// A closed rectilinear curve.
#[derive(Debug, Clone, PartialEq)]
pub struct Polyrectangle<T> {
    normals: Vec<Direction>,
    offsets: Vec<T>,
}

impl<T: Scalar> Polyrectangle<T> {
    /// Builds from the normal and offset strings; only the combinatorial
    /// constraints are checked (zero-length edges are allowed).
    pub fn new(normals: Vec<Direction>, offsets: Vec<T>) -> Result<Self> {
        if normals.len() != offsets.len() {
            return Err(Error::InvalidPolygon(
                "normal and offset strings differ in length".into(),
            ));
        }
        let m = normals.len();
        if m < 4 || !m.is_multiple_of(2) {
            return Err(Error::InvalidPolygon(format!(
                "{m} edges; need an even count >= 4"
            )));
        }
        for i in 0..m {
            if !normals[i].is_orthogonal(normals[(i + 1) % m]) {
                return Err(Error::InvalidPolygon(format!(
                    "edges {i} and {} are parallel",
                    (i + 1) % m
                )));
            }
        }
        Ok(Self { normals, offsets })
    }

    /// Builds from a counterclockwise vertex list (a clockwise list is
    /// reversed). A repeated closing vertex is accepted.
    pub fn from_vertices(vertices: &[Point<T>]) -> Result<Self> {
        let mut vs: Vec<Point<T>> = vertices.to_vec();
        if vs.len() >= 2 && vs[0] == vs[vs.len() - 1] {
            vs.pop();
        }
        if vs.len() < 4 {
            return Err(Error::InvalidPolygon(format!(
                "{} distinct vertices; cannot close",
                vs.len()
            )));
        }
        if signed_area(&vs) < T::zero() {
            vs.reverse();
        }
        let m = vs.len();
        let mut normals = Vec::with_capacity(m);
        let mut offsets = Vec::with_capacity(m);
        for k in 0..m {
            let (a, b) = (vs[k], vs[(k + 1) % m]);
            let dir = if a.y == b.y && a.x != b.x {
                Direction::from_travel(Axis::Horizontal, b.x > a.x)
            } else if a.x == b.x && a.y != b.y {
                Direction::from_travel(Axis::Vertical, b.y > a.y)
            } else {
                return Err(Error::InvalidPolygon(format!(
                    "segment {k} is not axis-parallel or has zero length"
                )));
            };
            offsets.push(match dir.edge_axis() {
                Axis::Horizontal => a.y,
                Axis::Vertical => a.x,
            });
            normals.push(dir);
        }
        let poly = Self::new(normals, offsets)?;
        if !poly.is_simple() {
            return Err(Error::InvalidPolygon("boundary self-intersects".into()));
        }
        Ok(poly)
    }

    /// Axis-parallel rectangle `[x0, x0 + w] × [y0, y0 + h]`.
    pub fn rectangle(x0: T, y0: T, w: T, h: T) -> Self {
        Self {
            normals: vec![
                Direction::E2,
                Direction::MinusE1,
                Direction::MinusE2,
                Direction::E1,
            ],
            offsets: vec![y0, x0 + w, y0 + h, x0],
        }
    }

    /// Octagon-like staircase: four straight edges of length `straight`
    /// joined at each corner by `steps` stair steps of size `step`. The
    /// bounding box has lower-left corner `(x0, y0)`.
    pub fn staircase_octagon(x0: T, y0: T, straight: T, steps: usize, step: T) -> Result<Self> {
        if !(straight > T::zero() && step > T::zero()) {
            return Err(Error::InvalidPolygon(
                "octagon needs positive straight edge and step".into(),
            ));
        }
        let mut quarter = vec![(straight, T::zero())];
        for _ in 0..steps {
            quarter.push((T::zero(), step));
            quarter.push((step, T::zero()));
        }
        let mut p = Point::new(x0 + T::from_usize(steps).unwrap_or_else(T::zero) * step, y0);
        let (mut normals, mut offsets) = (Vec::new(), Vec::new());
        for turn in 0..4 {
            for &(dx, dy) in &quarter {
                // rotate by `turn` quarter turns counterclockwise
                let (dx, dy) = match turn {
                    0 => (dx, dy),
                    1 => (-dy, dx),
                    2 => (-dx, -dy),
                    _ => (dy, -dx),
                };
                if dy == T::zero() {
                    normals.push(Direction::from_travel(Axis::Horizontal, dx > T::zero()));
                    offsets.push(p.y);
                } else {
                    normals.push(Direction::from_travel(Axis::Vertical, dy > T::zero()));
                    offsets.push(p.x);
                }
                p = Point::new(p.x + dx, p.y + dy);
            }
        }
        Self::new(normals, offsets)
    }

    pub fn len(&self) -> usize {
        self.normals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.normals.is_empty()
    }

    pub fn normals(&self) -> &[Direction] {
        &self.normals
    }

    pub fn offsets(&self) -> &[T] {
        &self.offsets
    }

    pub fn offsets_mut(&mut self) -> &mut [T] {
        &mut self.offsets
    }

    pub fn normal(&self, i: usize) -> Direction {
        self.normals[i]
    }

    pub fn offset(&self, i: usize) -> T {
        self.offsets[i]
    }

    pub fn prev(&self, i: usize) -> usize {
        (i + self.len() - 1) % self.len()
    }

    pub fn next(&self, i: usize) -> usize {
        (i + 1) % self.len()
    }

    /// Length of edge `i` measured along the direction of travel; negative
    /// when the neighbours have crossed.
    pub fn signed_length(&self, i: usize) -> T {
        let d = self.offsets[self.next(i)] - self.offsets[self.prev(i)];
        d * lit(self.normals[i].travel_sign() as f64)
    }

    pub fn length(&self, i: usize) -> T {
        self.signed_length(i).abs()
    }

    /// Start vertex of edge `i` (shared with edge `i − 1`).
    pub fn vertex(&self, i: usize) -> Point<T> {
        let j = self.prev(i);
        match self.normals[i].edge_axis() {
            Axis::Horizontal => Point::new(self.offsets[j], self.offsets[i]),
            Axis::Vertical => Point::new(self.offsets[i], self.offsets[j]),
        }
    }

    pub fn vertices(&self) -> Vec<Point<T>> {
        (0..self.len()).map(|i| self.vertex(i)).collect()
    }

    /// Endpoint values `(n(p), n(q))` of the Cahn–Hoffmann field on edge `i`.
    pub fn boundary_values(&self, i: usize) -> (i8, i8) {
        let (a, b) = (self.prev(i), self.next(i));
        let (at_p, at_q) = if self.normals[i].travel_sign() > 0 {
            (a, b)
        } else {
            (b, a)
        };
        (-self.normals[at_p].sign(), -self.normals[at_q].sign())
    }

    pub fn chi(&self, i: usize) -> i8 {
        let (np, nq) = self.boundary_values(i);
        (nq - np) / 2
    }

    pub fn edge(&self, i: usize, medium: &ChessboardMedium<T>) -> EdgeView<T> {
        let (a, b) = (self.offsets[self.prev(i)], self.offsets[self.next(i)]);
        let (n_p, n_q) = self.boundary_values(i);
        EdgeView {
            index: i,
            normal: self.normals[i],
            line_offset: self.offsets[i],
            p: a.min(b),
            q: a.max(b),
            chi: (n_q - n_p) / 2,
            n_p,
            n_q,
            on_grid: medium.is_on_grid(self.offsets[i]),
        }
    }

    pub fn edges(&self, medium: &ChessboardMedium<T>) -> Vec<EdgeView<T>> {
        (0..self.len()).map(|i| self.edge(i, medium)).collect()
    }

    pub fn area(&self) -> T {
        signed_area(&self.vertices())
    }

    pub fn perimeter(&self) -> T {
        (0..self.len()).fold(T::zero(), |acc, i| acc + self.length(i))
    }

    /// Turn at the end vertex of edge `i`: `+1` convex, `−1` reflex.
    pub fn corner_turn(&self, i: usize) -> i8 {
        let (a, b) = (self.normals[i], self.normals[self.next(i)]);
        if b == a.successor() {
            1
        } else {
            -1
        }
    }

    /// Number of convex corners minus number of reflex corners.
    pub fn turning_number(&self) -> i32 {
        (0..self.len()).map(|i| self.corner_turn(i) as i32).sum()
    }

    /// No two non-adjacent edges of positive length touch.
    pub fn is_simple(&self) -> bool {
        let vs = self.vertices();
        let m = vs.len();
        let seg = |i: usize| (vs[i], vs[(i + 1) % m]);
        // edges joined through zero-length edges only count as adjacent
        let zero: Vec<bool> = (0..m).map(|k| vs[k] == vs[(k + 1) % m]).collect();
        let linked = |i: usize, j: usize| {
            (i + 1..j).all(|k| zero[k]) || (j + 1..m).chain(0..i).all(|k| zero[k])
        };
        for i in 0..m {
            for j in (i + 2)..m {
                if linked(i, j) {
                    continue;
                }
                let (a, b) = seg(i);
                let (c, d) = seg(j);
                if a == b || c == d {
                    continue;
                }
                if axis_segments_touch(a, b, c, d) {
                    return false;
                }
            }
        }
        true
    }

    /// Perimeter plus the exact integral of the forcing over the enclosed
    /// region. Every edge is axis-parallel, so the anisotropic perimeter is
    /// the Euclidean length.
    pub fn energy(&self, medium: &ChessboardMedium<T>) -> Result<T> {
        if self.area() <= T::zero() {
            return Err(Error::InvalidPolygon("empty region".into()));
        }
        Ok(self.perimeter() + self.forcing_integral(medium))
    }

    /// `∫_E g_ε` by horizontal bands that never straddle a grid row.
    pub fn forcing_integral(&self, medium: &ChessboardMedium<T>) -> T {
        let vs = self.vertices();
        let m = vs.len();
        let verticals: Vec<(T, T, T)> = (0..m)
            .filter_map(|k| {
                let (a, b) = (vs[k], vs[(k + 1) % m]);
                (a.x == b.x && a.y != b.y).then(|| (a.x, a.y.min(b.y), a.y.max(b.y)))
            })
            .collect();
        let mut ys: Vec<T> = vs.iter().map(|v| v.y).collect();
        let (ymin, ymax) = ys
            .iter()
            .fold((T::infinity(), T::neg_infinity()), |(lo, hi), &y| {
                (lo.min(y), hi.max(y))
            });
        let h = medium.half_cell();
        let mut k = (ymin / h).ceil();
        while k * h < ymax {
            ys.push(k * h);
            k = k + T::one();
        }
        ys.sort_by(|a, b| a.partial_cmp(b).unwrap());
        ys.dedup();
        let mut total = T::zero();
        for w in ys.windows(2) {
            let (y0, y1) = (w[0], w[1]);
            if y1 <= y0 {
                continue;
            }
            let ym = (y0 + y1) * lit(0.5);
            let mut xs: Vec<T> = verticals
                .iter()
                .filter(|&&(_, lo, hi)| lo < ym && ym < hi)
                .map(|&(x, _, _)| x)
                .collect();
            xs.sort_by(|a, b| a.partial_cmp(b).unwrap());
            let tr = medium.trace(Axis::Horizontal, ym);
            for pair in xs.chunks(2) {
                if let [a, b] = pair {
                    total = total + medium.integral(&tr, *a, *b) * (y1 - y0);
                }
            }
        }
        total
    }

    /// Euclidean Hausdorff distance between the two enclosed regions.
    pub fn hausdorff_distance(&self, other: &Self) -> T {
        hausdorff_polygons(&self.vertices(), &other.vertices())
    }

    /// Vertex-list text: one `x y` pair per line, counterclockwise, first
    /// vertex repeated at the end.
    pub fn to_vertex_text(&self) -> String {
        let vs = self.vertices();
        let mut out = String::new();
        for v in vs.iter().chain(vs.first()) {
            let _ = writeln!(out, "{} {}", v.x, v.y);
        }
        out
    }

    pub fn parse_vertex_text(text: &str) -> Result<Self> {
        let mut vs = Vec::new();
        for (n, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let parts: Vec<&str> = line.split_whitespace().collect();
            let parse = |s: &str| s.parse::<f64>().ok().filter(|v| v.is_finite());
            match parts.as_slice() {
                [x, y] => match (parse(x), parse(y)) {
                    (Some(x), Some(y)) => vs.push(Point::new(lit(x), lit(y))),
                    _ => {
                        return Err(Error::InvalidPolygon(format!(
                            "line {}: malformed number in {line:?}",
                            n + 1
                        )))
                    }
                },
                _ => {
                    return Err(Error::InvalidPolygon(format!(
                        "line {}: expected two numbers, got {line:?}",
                        n + 1
                    )))
                }
            }
        }
        Self::from_vertices(&vs)
    }

    /// Edges `i` with their neighbours' offsets removed and replaced by a
    /// single string; used by the flow when edges vanish.
    #[allow(dead_code)]
    pub(crate) fn from_parts(normals: Vec<Direction>, offsets: Vec<T>) -> Self {
        Self { normals, offsets }
    }
}

fn axis_segments_touch<T: Scalar>(a: Point<T>, b: Point<T>, c: Point<T>, d: Point<T>) -> bool {
    let (x0, x1) = (a.x.min(b.x), a.x.max(b.x));
    let (y0, y1) = (a.y.min(b.y), a.y.max(b.y));
    let (u0, u1) = (c.x.min(d.x), c.x.max(d.x));
    let (v0, v1) = (c.y.min(d.y), c.y.max(d.y));
    x0 <= u1 && u0 <= x1 && y0 <= v1 && v0 <= y1
}

pub fn signed_area<T: Scalar>(vs: &[Point<T>]) -> T {
    let m = vs.len();
    let twice = (0..m).fold(T::zero(), |acc, k| {
        let (a, b) = (vs[k], vs[(k + 1) % m]);
        acc + a.x * b.y - b.x * a.y
    });
    twice * lit(0.5)
}

fn point_segment_distance<T: Scalar>(p: Point<T>, a: Point<T>, b: Point<T>) -> T {
    let (dx, dy) = (b.x - a.x, b.y - a.y);
    let len2 = dx * dx + dy * dy;
    if len2 == T::zero() {
        return p.dist(a);
    }
    let t = (((p.x - a.x) * dx + (p.y - a.y) * dy) / len2)
        .max(T::zero())
        .min(T::one());
    p.dist(Point::new(a.x + t * dx, a.y + t * dy))
}

fn boundary_distance<T: Scalar>(p: Point<T>, poly: &[Point<T>]) -> T {
    let m = poly.len();
    (0..m).fold(T::infinity(), |acc, k| {
        acc.min(point_segment_distance(p, poly[k], poly[(k + 1) % m]))
    })
}

/// Even-odd containment; boundary points count as inside.
pub fn point_in_polygon<T: Scalar>(p: Point<T>, poly: &[Point<T>]) -> bool {
    if boundary_distance(p, poly) <= T::epsilon() * lit(16.0) * (T::one() + p.x.abs() + p.y.abs()) {
        return true;
    }
    let m = poly.len();
    let mut inside = false;
    for k in 0..m {
        let (a, b) = (poly[k], poly[(k + 1) % m]);
        if (a.y > p.y) != (b.y > p.y) {
            let x = a.x + (p.y - a.y) / (b.y - a.y) * (b.x - a.x);
            if p.x < x {
                inside = !inside;
            }
        }
    }
    inside
}

fn distance_to_region<T: Scalar>(p: Point<T>, poly: &[Point<T>]) -> T {
    if point_in_polygon(p, poly) {
        T::zero()
    } else {
        boundary_distance(p, poly)
    }
}

/// `sup_{a ∈ ∂A} dist(a, B)`, evaluated at every vertex of `A` and refined
/// along each edge around the best of a uniform sample. The result is exact
/// when `B` is convex (the distance to a convex set is convex, so its maximum
/// over a polygon is attained at a vertex).
pub fn directed_hausdorff<T: Scalar>(a: &[Point<T>], b: &[Point<T>]) -> T {
    const SAMPLES: usize = 24;
    let m = a.len();
    let mut best = T::zero();
    for k in 0..m {
        let (p0, p1) = (a[k], a[(k + 1) % m]);
        let at = |t: T| Point::new(p0.x + (p1.x - p0.x) * t, p0.y + (p1.y - p0.y) * t);
        let f = |t: T| distance_to_region(at(t), b);
        best = best.max(f(T::zero()));
        if p0 == p1 {
            continue;
        }
        let step = T::one() / lit(SAMPLES as f64);
        let vals: Vec<T> = (0..=SAMPLES).map(|i| f(step * lit(i as f64))).collect();
        for i in 1..SAMPLES {
            if vals[i] >= vals[i - 1] && vals[i] >= vals[i + 1] && vals[i] > T::zero() {
                // golden-section refinement of the local maximum
                let (mut lo, mut hi) = (step * lit((i - 1) as f64), step * lit((i + 1) as f64));
                let g = lit::<T>(0.618_033_988_749_895);
                for _ in 0..60 {
                    let x1 = hi - g * (hi - lo);
                    let x2 = lo + g * (hi - lo);
                    if f(x1) < f(x2) {
                        lo = x1;
                    } else {
                        hi = x2;
                    }
                }
                best = best.max(f((lo + hi) * lit(0.5))).max(vals[i]);
            }
        }
    }
    best
}

/// Euclidean Hausdorff distance between two polygonal regions.
pub fn hausdorff_polygons<T: Scalar>(a: &[Point<T>], b: &[Point<T>]) -> T {
    directed_hausdorff(a, b).max(directed_hausdorff(b, a))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::medium::ChessboardMedium;

    fn med() -> ChessboardMedium<f64> {
        ChessboardMedium::new(-3.0, 1.0, 0.5).unwrap()
    }

    fn pts(v: &[(f64, f64)]) -> Vec<Point<f64>> {
        v.iter().map(|&(x, y)| Point::new(x, y)).collect()
    }

    #[test]
    fn square_has_four_convex_edges() {
        let sq = Polyrectangle::from_vertices(&pts(&[(-1., -1.), (1., -1.), (1., 1.), (-1., 1.)]))
            .unwrap();
        assert_eq!(sq.len(), 4);
        let m = med();
        for e in sq.edges(&m) {
            assert_eq!(e.chi, 1);
            assert_eq!((e.n_p, e.n_q), (-1, 1));
            assert!((e.length() - 2.0).abs() < 1e-15);
        }
        assert_eq!(sq.turning_number(), 4);
        assert!((sq.area() - 4.0).abs() < 1e-15);
    }

    #[test]
    fn staircase_octagon_shape() {
        let o = Polyrectangle::staircase_octagon(0.0, 0.0, 2.0, 3, 0.25).unwrap();
        assert_eq!(o.len(), 28);
        let chis: Vec<i8> = (0..o.len()).map(|i| o.chi(i)).collect();
        assert_eq!(chis.iter().filter(|&&c| c == 1).count(), 4);
        assert!(chis.iter().all(|&c| c == 0 || c == 1));
        // 3.5 x 3.5 box minus four staircase corners of 6 half steps
        assert!((o.area() - (3.5f64 * 3.5 - 4.0 * 6.0 * 0.0625)).abs() < 1e-12);
        assert_eq!(
            Polyrectangle::staircase_octagon(0.0, 0.0, 1.0, 0, 0.25)
                .unwrap()
                .len(),
            4
        );
    }

    #[test]
    fn l_shape_has_one_concave_edge() {
        let l = Polyrectangle::from_vertices(&pts(&[
            (0., 0.),
            (2., 0.),
            (2., 1.),
            (1., 1.),
            (1., 2.),
            (0., 2.),
        ]))
        .unwrap();
        let chis: Vec<i8> = (0..l.len()).map(|i| l.chi(i)).collect();
        assert_eq!(l.len(), 6);
        assert_eq!(chis.iter().filter(|&&c| c == -1).count(), 0);
        // the two edges meeting at the reflex corner are staircase edges
        assert_eq!(chis.iter().filter(|&&c| c == 0).count(), 2);
        let reflex = (0..l.len()).filter(|&i| l.corner_turn(i) == -1).count();
        assert_eq!(reflex, 1);
        assert_eq!(l.turning_number(), 4);
    }

    #[test]
    fn notch_has_a_concave_edge() {
        // U-shape: the bottom of the notch is locally concave
        let u = Polyrectangle::from_vertices(&pts(&[
            (0., 0.),
            (3., 0.),
            (3., 2.),
            (2., 2.),
            (2., 1.),
            (1., 1.),
            (1., 2.),
            (0., 2.),
        ]))
        .unwrap();
        let chis: Vec<i8> = (0..u.len()).map(|i| u.chi(i)).collect();
        assert_eq!(chis.iter().filter(|&&c| c == -1).count(), 1);
        assert_eq!(u.turning_number(), 4);
    }

    #[test]
    fn rejects_bad_vertex_lists() {
        assert!(Polyrectangle::<f64>::from_vertices(&pts(&[(0., 0.), (1., 0.)])).is_err());
        assert!(Polyrectangle::<f64>::from_vertices(&pts(&[
            (0., 0.),
            (1., 1.),
            (0., 1.),
            (1., 0.)
        ]))
        .is_err());
        // figure-eight
        let bad = pts(&[(0., 0.), (2., 0.), (2., 2.), (1., 2.), (1., -1.), (0., -1.)]);
        assert!(Polyrectangle::<f64>::from_vertices(&bad).is_err());
    }

    #[test]
    fn round_trip_and_clockwise_input() {
        let v = pts(&[(0., 0.), (2., 0.), (2., 1.), (1., 1.), (1., 2.), (0., 2.)]);
        let p = Polyrectangle::from_vertices(&v).unwrap();
        assert_eq!(p.vertices(), v);
        let mut rev = v.clone();
        rev.reverse();
        let q = Polyrectangle::from_vertices(&rev).unwrap();
        assert!((q.area() - p.area()).abs() < 1e-15);
        let text = p.to_vertex_text();
        assert_eq!(Polyrectangle::<f64>::parse_vertex_text(&text).unwrap(), p);
    }

    #[test]
    fn parse_errors_name_the_line() {
        let err = Polyrectangle::<f64>::parse_vertex_text("0 0\n1 0\n1 x\n0 1\n").unwrap_err();
        assert!(err.to_string().contains("line 3"), "{err}");
    }

    #[test]
    fn grid_flags() {
        let m = med();
        let sq = Polyrectangle::rectangle(0.0, 0.0, 2.25, 2.25);
        assert!(sq.edges(&m).iter().all(|e| e.on_grid));
        let sh = Polyrectangle::rectangle(0.125, 0.125, 2.25, 2.25);
        assert!(sh.edges(&m).iter().all(|e| !e.on_grid));
        let degenerate = Polyrectangle::new(
            vec![
                Direction::E2,
                Direction::MinusE1,
                Direction::E2,
                Direction::MinusE1,
                Direction::MinusE2,
                Direction::E1,
            ],
            vec![0.0, 1.0, 0.0, 2.0, 1.0, 0.0],
        )
        .unwrap();
        let e = degenerate.edge(1, &m);
        assert_eq!(e.p, e.q);
    }

    #[test]
    fn hausdorff_examples() {
        let a = Polyrectangle::<f64>::rectangle(-1.0, -1.0, 2.0, 2.0);
        assert_eq!(a.hausdorff_distance(&a), 0.0);
        let b = Polyrectangle::rectangle(-0.7, -1.0, 2.0, 2.0);
        assert!((a.hausdorff_distance(&b) - 0.3).abs() < 1e-12);
        let c = Polyrectangle::rectangle(-1.25, -1.25, 2.5, 2.5);
        let expect = 0.25 * 2f64.sqrt();
        assert!((a.hausdorff_distance(&c) - expect).abs() < 1e-12);
        assert!((c.hausdorff_distance(&a) - expect).abs() < 1e-12);
    }

    #[test]
    fn energy_examples() {
        // balanced medium, square made of whole cells: volume term cancels
        let m = ChessboardMedium::new(-1.0, 1.0, 0.5).unwrap();
        let sq = Polyrectangle::<f64>::rectangle(0.0, 0.0, 1.0, 1.0);
        assert!((sq.energy(&m).unwrap() - 4.0).abs() < 1e-14);
        let cell = Polyrectangle::rectangle(0.0, 0.0, 0.25, 0.25);
        assert!((cell.energy(&med()).unwrap() - 0.8125).abs() < 1e-14);
        let flat = Polyrectangle::rectangle(0.0, 0.0, 1.0, 0.0);
        assert!(flat.energy(&m).is_err());
    }
}
