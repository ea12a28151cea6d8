//! Two-user rate-region geometry.
//!
//! Every region handled here is a convex polygon in the `(R₁, R₂)` plane,
//! stored as a counterclockwise vertex list starting at its lexicographically
//! smallest vertex. For regions built from rate pentagons that vertex is the
//! origin, followed by the `R₁`-axis intercept, the dominant face, and the
//! `R₂`-axis intercept.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::format::fmt_sig;

/// Caps within `CAP_SNAP` of zero are round-off around an exact zero and
/// are snapped to zero before the emptiness test.
pub const CAP_SNAP: f64 = 1e-12;

/// Relative cross-product threshold under which three hull points count as collinear.
const COLLINEAR_REL: f64 = 1e-12;

/// Relative concavity tolerated when reading 9-digit exports back.
const PARSE_CONVEXITY_REL: f64 = 1e-8;

pub const CSV_HEADER: &str = "R1_bits,R2_bits";

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub r1: f64,
    pub r2: f64,
}

impl Point {
    pub const ORIGIN: Point = Point { r1: 0.0, r2: 0.0 };

    pub fn new(r1: f64, r2: f64) -> Self {
        Point { r1, r2 }
    }

    fn dot(self, d: (f64, f64)) -> f64 {
        self.r1 * d.0 + self.r2 * d.1
    }
}

fn cross(o: Point, a: Point, b: Point) -> f64 {
    (a.r1 - o.r1) * (b.r2 - o.r2) - (a.r2 - o.r2) * (b.r1 - o.r1)
}

/// `{R₁, R₂ ≥ 0, R₁ ≤ r1_cap, R₂ ≤ r2_cap, R₁ + R₂ ≤ sum_cap}`.
///
/// Caps come straight from the bound expressions and may be negative; a
/// pentagon with any negative cap is empty.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RatePentagon {
    pub r1_cap: f64,
    pub r2_cap: f64,
    pub sum_cap: f64,
}

impl RatePentagon {
    pub fn new(r1_cap: f64, r2_cap: f64, sum_cap: f64) -> Self {
        RatePentagon {
            r1_cap,
            r2_cap,
            sum_cap,
        }
    }

    pub fn caps(&self) -> [f64; 3] {
        [self.r1_cap, self.r2_cap, self.sum_cap]
    }

    fn snapped(&self) -> [f64; 3] {
        self.caps()
            .map(|c| if c.abs() <= CAP_SNAP { 0.0 } else { c })
    }

    pub fn is_empty(&self) -> bool {
        let c = self.snapped();
        !c.iter().all(|&x| x >= 0.0)
    }

    /// Tightest equivalent caps: `sum ≤ r1 + r2` and each per-user cap ≤ sum.
    /// `None` for an empty pentagon.
    pub fn normalized(&self) -> Option<RatePentagon> {
        if self.is_empty() {
            return None;
        }
        let [a, b, c] = self.snapped();
        let c = c.min(a + b);
        Some(RatePentagon::new(a.min(c), b.min(c), c))
    }

    /// Analytic membership test, with `slack` added to every constraint.
    pub fn admits(&self, p: Point, slack: f64) -> bool {
        if self.is_empty() {
            return false;
        }
        let [a, b, c] = self.snapped();
        p.r1 >= -slack
            && p.r2 >= -slack
            && p.r1 <= a + slack
            && p.r2 <= b + slack
            && p.r1 + p.r2 <= c + slack
    }

    /// Vertex polygon of the pentagon; the empty region when any cap is negative.
    pub fn vertices(&self) -> RateRegion {
        pentagon_vertices(self)
    }
}

/// A convex polygon in the rate plane. An empty vertex list is the empty region.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct RateRegion {
    vertices: Vec<Point>,
}

impl RateRegion {
    pub fn empty() -> Self {
        RateRegion::default()
    }

    /// Convex hull of an arbitrary point set.
    pub fn from_points(points: impl IntoIterator<Item = Point>) -> Self {
        RateRegion {
            vertices: convex_hull(points.into_iter().collect()),
        }
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    /// Shoelace area; zero for empty, point and segment regions.
    pub fn area(&self) -> f64 {
        let v = &self.vertices;
        if v.len() < 3 {
            return 0.0;
        }
        let twice: f64 = (0..v.len())
            .map(|i| {
                let (p, q) = (v[i], v[(i + 1) % v.len()]);
                p.r1 * q.r2 - q.r1 * p.r2
            })
            .sum();
        (0.5 * twice).max(0.0)
    }

    /// Support function `max_v ⟨v, d⟩` for a direction in the closed first
    /// quadrant. The empty region is treated as `{(0, 0)}`.
    pub fn support(&self, direction: (f64, f64)) -> Result<f64> {
        let (x, y) = direction;
        if !(x.is_finite() && y.is_finite()) || x < 0.0 || y < 0.0 || (x == 0.0 && y == 0.0) {
            return domain(format!(
                "support direction must be non-zero with nonnegative components, got ({x}, {y})"
            ));
        }
        Ok(self.support_unchecked(direction))
    }

    fn support_unchecked(&self, d: (f64, f64)) -> f64 {
        self.vertices
            .iter()
            .map(|v| v.dot(d))
            .fold(if self.is_empty() { 0.0 } else { f64::NEG_INFINITY }, f64::max)
    }

    /// Euclidean distance from `p` to the region (zero inside).
    pub fn distance_to(&self, p: Point) -> f64 {
        let v = &self.vertices;
        match v.len() {
            0 => f64::INFINITY,
            1 => ((p.r1 - v[0].r1).powi(2) + (p.r2 - v[0].r2).powi(2)).sqrt(),
            2 => segment_distance(p, v[0], v[1]),
            n => {
                let inside = (0..n).all(|i| cross(v[i], v[(i + 1) % n], p) >= 0.0);
                if inside {
                    0.0
                } else {
                    (0..n)
                        .map(|i| segment_distance(p, v[i], v[(i + 1) % n]))
                        .fold(f64::INFINITY, f64::min)
                }
            }
        }
    }

    /// Whether every vertex of `inner` lies within `tol` of `self`. For convex
    /// regions this is containment of `inner` in `self` dilated by `tol`.
    pub fn contains(&self, inner: &RateRegion, tol: f64) -> bool {
        inner.vertices.iter().all(|&p| self.distance_to(p) <= tol)
    }

    /// Largest axis and sum-rate extents: `[max R₁, max R₂, max R₁ + R₂]`.
    pub fn extents(&self) -> [f64; 3] {
        [
            self.support_unchecked((1.0, 0.0)),
            self.support_unchecked((0.0, 1.0)),
            self.support_unchecked((1.0, 1.0)),
        ]
    }

    /// Copy with every coordinate rounded to what the CSV export prints.
    pub fn rounded(&self) -> RateRegion {
        RateRegion {
            vertices: self
                .vertices
                .iter()
                .map(|p| Point::new(crate::format::round_sig(p.r1), crate::format::round_sig(p.r2)))
                .collect(),
        }
    }

    /// Canonical CSV: header line, then one `r1,r2` vertex per line.
    pub fn to_csv(&self) -> String {
        let mut out = String::with_capacity(24 * (self.vertices.len() + 1));
        out.push_str(CSV_HEADER);
        out.push('\n');
        for p in &self.vertices {
            out.push_str(&fmt_sig(p.r1));
            out.push(',');
            out.push_str(&fmt_sig(p.r2));
            out.push('\n');
        }
        out
    }

    /// Parses a canonical region CSV, rejecting vertex lists that are not
    /// counterclockwise, convex, and started at the smallest vertex.
    pub fn from_csv(text: &str) -> Result<RateRegion> {
        let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty());
        match lines.next() {
            Some(h) if h == CSV_HEADER => {}
            Some(h) => return domain(format!("expected header `{CSV_HEADER}`, found `{h}`")),
            None => return domain("region CSV is empty (missing header)"),
        }
        let mut vertices = Vec::new();
        for (i, line) in lines.enumerate() {
            let row = i + 2;
            let parsed: Vec<f64> = line
                .split(',')
                .map(|f| f.trim().parse::<f64>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|e| Error::Domain(format!("line {row}: {e}")))?;
            match parsed[..] {
                [r1, r2] if r1.is_finite() && r2.is_finite() => vertices.push(Point::new(r1, r2)),
                _ => return domain(format!("line {row}: expected two finite numbers")),
            }
        }
        check_canonical(&vertices)?;
        Ok(RateRegion { vertices })
    }
}

fn segment_distance(p: Point, a: Point, b: Point) -> f64 {
    let (dx, dy) = (b.r1 - a.r1, b.r2 - a.r2);
    let len2 = dx * dx + dy * dy;
    let t = if len2 > 0.0 {
        (((p.r1 - a.r1) * dx + (p.r2 - a.r2) * dy) / len2).clamp(0.0, 1.0)
    } else {
        0.0
    };
    let (cx, cy) = (a.r1 + t * dx, a.r2 + t * dy);
    ((p.r1 - cx).powi(2) + (p.r2 - cy).powi(2)).sqrt()
}

fn check_canonical(v: &[Point]) -> Result<()> {
    if v.is_empty() {
        return Ok(());
    }
    let scale = v
        .iter()
        .map(|p| p.r1.abs().max(p.r2.abs()))
        .fold(f64::MIN_POSITIVE, f64::max);
    let first = v[0];
    if v[1..]
        .iter()
        .any(|p| (p.r1, p.r2) < (first.r1, first.r2) || (p.r1, p.r2) == (first.r1, first.r2))
    {
        return domain("first vertex must be the unique lexicographically smallest vertex");
    }
    if v.len() >= 3 {
        let n = v.len();
        let tol = PARSE_CONVEXITY_REL * scale * scale;
        for i in 0..n {
            if cross(v[i], v[(i + 1) % n], v[(i + 2) % n]) < -tol {
                return domain(format!(
                    "vertex list is not convex counterclockwise at vertex {}",
                    (i + 1) % n + 1
                ));
            }
        }
    }
    Ok(())
}

/// Andrew's monotone chain. Output is counterclockwise from the
/// lexicographically smallest point, without duplicate or collinear vertices.
fn convex_hull(mut pts: Vec<Point>) -> Vec<Point> {
    pts.retain(|p| p.r1.is_finite() && p.r2.is_finite());
    pts.sort_by(|a, b| a.r1.total_cmp(&b.r1).then(a.r2.total_cmp(&b.r2)));
    pts.dedup();
    if pts.len() <= 1 {
        return pts;
    }
    let scale = pts
        .iter()
        .map(|p| p.r1.abs().max(p.r2.abs()))
        .fold(f64::MIN_POSITIVE, f64::max);
    let tol = COLLINEAR_REL * scale * scale;

    let mut hull: Vec<Point> = Vec::with_capacity(2 * pts.len());
    for &p in &pts {
        while hull.len() >= 2 && cross(hull[hull.len() - 2], hull[hull.len() - 1], p) <= tol {
            hull.pop();
        }
        hull.push(p);
    }
    let lower_len = hull.len() + 1;
    for &p in pts.iter().rev().skip(1) {
        while hull.len() >= lower_len && cross(hull[hull.len() - 2], hull[hull.len() - 1], p) <= tol
        {
            hull.pop();
        }
        hull.push(p);
    }
    hull.pop();
    hull
}

/// Vertex polygon of a pentagon, or the empty region if any cap is negative.
pub fn pentagon_vertices(p: &RatePentagon) -> RateRegion {
    let Some(n) = p.normalized() else {
        return RateRegion::empty();
    };
    let (a, b, c) = (n.r1_cap, n.r2_cap, n.sum_cap);
    RateRegion::from_points([
        Point::ORIGIN,
        Point::new(a, 0.0),
        Point::new(a, c - a),
        Point::new(c - b, b),
        Point::new(0.0, b),
    ])
}

/// Convex hull of the union of `regions`; empty members are skipped and the
/// result is empty only if every member is.
pub fn hull_union<'a>(regions: impl IntoIterator<Item = &'a RateRegion>) -> RateRegion {
    RateRegion::from_points(
        regions
            .into_iter()
            .flat_map(|r| r.vertices.iter().copied()),
    )
}

/// Convex closure of a family of pentagons.
pub fn hull_of_pentagons<'a>(pentagons: impl IntoIterator<Item = &'a RatePentagon>) -> RateRegion {
    let regions: Vec<RateRegion> = pentagons.into_iter().map(pentagon_vertices).collect();
    hull_union(&regions)
}

/// `n ≥ 2` unit directions evenly spaced in angle over the closed first
/// quadrant, from `(1, 0)` to `(0, 1)`.
pub fn quadrant_directions(n: usize) -> Vec<(f64, f64)> {
    assert!(n >= 2, "need at least the two axis directions");
    (0..n)
        .map(|k| {
            if k == 0 {
                (1.0, 0.0)
            } else if k == n - 1 {
                (0.0, 1.0)
            } else {
                let t = std::f64::consts::FRAC_PI_2 * k as f64 / (n - 1) as f64;
                (t.cos(), t.sin())
            }
        })
        .collect()
}

/// Largest amount by which `inner` pokes out of `outer` along the given
/// directions: `max_d h_inner(d) − h_outer(d)`. Non-positive when `outer`
/// dominates on every direction.
pub fn max_support_deficit(outer: &RateRegion, inner: &RateRegion, dirs: &[(f64, f64)]) -> f64 {
    dirs.iter()
        .map(|&d| inner.support_unchecked(d) - outer.support_unchecked(d))
        .fold(f64::NEG_INFINITY, f64::max)
}

/// Boundary of the plain (not convexified) union of pentagons.
///
/// Every pentagon is down-closed in the quadrant, so the union is too; it is
/// described by its upper envelope `F(R₁) = max_k min(b_k, c_k − R₁)` over the
/// pentagons with `R₁ ≤ a_k`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UnionEnvelope {
    /// Closed boundary walk from the origin along the `R₁` axis, up the
    /// envelope and back down the `R₂` axis; may be non-convex.
    pub boundary: Vec<Point>,
    pub area: f64,
}

pub fn union_envelope(pentagons: &[RatePentagon]) -> UnionEnvelope {
    let caps: Vec<RatePentagon> = pentagons.iter().filter_map(|p| p.normalized()).collect();
    if caps.is_empty() {
        return UnionEnvelope {
            boundary: Vec::new(),
            area: 0.0,
        };
    }
    let right = caps.iter().map(|p| p.r1_cap).fold(0.0, f64::max);
    // Breakpoints: ends of supports, kinks, and horizontal/diagonal crossings.
    let mut xs: Vec<f64> = vec![0.0, right];
    for p in &caps {
        xs.push(p.r1_cap);
        xs.push(p.sum_cap - p.r2_cap);
        for q in &caps {
            xs.push(q.sum_cap - p.r2_cap);
        }
    }
    xs.retain(|x| (0.0..=right).contains(x));
    xs.sort_by(f64::total_cmp);
    xs.dedup();

    let height = |x: f64, strict: bool| -> f64 {
        caps.iter()
            .filter(|p| if strict { p.r1_cap > x } else { p.r1_cap >= x })
            .map(|p| p.r2_cap.min(p.sum_cap - x))
            .fold(0.0, f64::max)
    };

    // Envelope walked right to left so the closed boundary is counterclockwise.
    let mut top: Vec<Point> = Vec::new();
    let mut area = 0.0;
    for w in xs.windows(2) {
        let (x0, x1) = (w[0], w[1]);
        area += 0.5 * (height(x0, true) + height(x1, false)) * (x1 - x0);
    }
    for (i, &x) in xs.iter().enumerate().rev() {
        let at = height(x, false);
        let after = if i + 1 < xs.len() { height(x, true) } else { 0.0 };
        if after != at {
            top.push(Point::new(x, after));
        }
        top.push(Point::new(x, at));
    }
    let mut boundary = vec![Point::ORIGIN];
    boundary.extend(top);
    boundary.push(Point::ORIGIN);
    boundary.dedup();
    boundary.pop();
    UnionEnvelope {
        boundary: drop_collinear(boundary),
        area,
    }
}

fn drop_collinear(v: Vec<Point>) -> Vec<Point> {
    if v.len() < 3 {
        return v;
    }
    let mut out: Vec<Point> = Vec::with_capacity(v.len());
    for p in v {
        while out.len() >= 2 && cross(out[out.len() - 2], out[out.len() - 1], p) == 0.0 {
            out.pop();
        }
        out.push(p);
    }
    out
}
