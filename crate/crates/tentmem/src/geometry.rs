//! Exact convex-polygon engine.
//!
//! Every set argument in the crate (partition regions, images of regions,
//! trapping regions) is convex or a union of two convex pieces, so a single
//! primitive — clipping a convex polygon by a half plane — supports image,
//! intersection, splitting, and containment.
//!
//! Tolerance discipline: constructors merge input vertices closer than
//! [`MERGE_EPS`] and validate convexity at that scale; the internal clipping
//! pipeline, by contrast, only removes duplicate/collinear artifacts at the
//! `1e-15` float-noise scale. The asymmetry is deliberate: admissibility
//! arguments rely on clipped sets never being under-approximated, so
//! near-threshold slivers (areas down to `1e-14`) must survive clipping
//! untouched, while hand-built polygons deserve the coarser sanity check.

use crate::error::{Error, Result};
use crate::linalg::Mat2;
use crate::map::{Alpha, RegionLabel};

/// Vertex-merge tolerance for polygon constructors.
pub const MERGE_EPS: f64 = 1e-9;
/// Below this area an intersection is reported empty.
pub const AREA_EMPTY: f64 = 1e-16;
/// Float-noise scale for clip-output cleanup.
const NOISE_EPS: f64 = 1e-15;

/// A convex polygon with counterclockwise vertices.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct ConvexPolygon {
    verts: Vec<(f64, f64)>,
}

fn signed_area2(verts: &[(f64, f64)]) -> f64 {
    let n = verts.len();
    let mut s = 0.0;
    for i in 0..n {
        let (x1, y1) = verts[i];
        let (x2, y2) = verts[(i + 1) % n];
        s += x1 * y2 - x2 * y1;
    }
    s
}

fn cross(o: (f64, f64), a: (f64, f64), b: (f64, f64)) -> f64 {
    (a.0 - o.0) * (b.1 - o.1) - (a.1 - o.1) * (b.0 - o.0)
}

/// Merge consecutive vertices closer than `eps` and drop collinear vertices
/// (cross product below `cross_eps`); returns `None` if fewer than 3 survive.
fn cleanup(mut vs: Vec<(f64, f64)>, eps: f64, cross_eps: f64) -> Option<Vec<(f64, f64)>> {
    // Merge consecutive near-duplicates (cyclically).
    let mut i = 0;
    while i < vs.len() && vs.len() >= 2 {
        let j = (i + 1) % vs.len();
        let d = ((vs[i].0 - vs[j].0).powi(2) + (vs[i].1 - vs[j].1).powi(2)).sqrt();
        if d <= eps && vs.len() > 1 {
            vs.remove(j);
            if j < i {
                i -= 1;
            }
        } else {
            i += 1;
        }
    }
    // Remove collinear vertices until stable.
    let mut changed = true;
    while changed && vs.len() >= 3 {
        changed = false;
        let n = vs.len();
        for i in 0..n {
            let prev = vs[(i + n - 1) % n];
            let cur = vs[i];
            let next = vs[(i + 1) % n];
            if cross(prev, cur, next).abs() <= cross_eps {
                vs.remove(i);
                changed = true;
                break;
            }
        }
    }
    if vs.len() < 3 {
        None
    } else {
        Some(vs)
    }
}

impl ConvexPolygon {
    /// Build from vertices in boundary order (either orientation; stored
    /// counterclockwise). Vertices closer than [`MERGE_EPS`] are merged;
    /// requires at least 3 surviving vertices and convexity within tolerance.
    pub fn new(vertices: Vec<(f64, f64)>) -> Result<Self> {
        for &(x, y) in &vertices {
            if !x.is_finite() || !y.is_finite() {
                return Err(Error::Domain("non-finite vertex".into()));
            }
        }
        let vs = cleanup(vertices, MERGE_EPS, MERGE_EPS * MERGE_EPS)
            .ok_or_else(|| Error::Domain("fewer than 3 distinct vertices".into()))?;
        let mut poly = ConvexPolygon { verts: vs };
        poly.orient_ccw();
        // Convexity: every turn must be a left turn (up to tolerance).
        let n = poly.verts.len();
        for i in 0..n {
            let c = cross(
                poly.verts[i],
                poly.verts[(i + 1) % n],
                poly.verts[(i + 2) % n],
            );
            if c < -MERGE_EPS {
                return Err(Error::Domain(format!(
                    "vertices are not in convex position (turn {c} at index {i})"
                )));
            }
        }
        Ok(poly)
    }

    /// Convex hull of an arbitrary point set (monotone chain), for building
    /// regions from computed corner points in no particular order.
    pub fn from_unordered(points: &[(f64, f64)]) -> Result<Self> {
        let mut pts: Vec<(f64, f64)> = points.to_vec();
        for &(x, y) in &pts {
            if !x.is_finite() || !y.is_finite() {
                return Err(Error::Domain("non-finite vertex".into()));
            }
        }
        pts.sort_by(|a, b| a.partial_cmp(b).unwrap());
        pts.dedup_by(|a, b| (a.0 - b.0).abs() <= MERGE_EPS && (a.1 - b.1).abs() <= MERGE_EPS);
        if pts.len() < 3 {
            return Err(Error::Domain("fewer than 3 distinct points".into()));
        }
        let mut hull: Vec<(f64, f64)> = Vec::with_capacity(2 * pts.len());
        // Lower hull.
        for &p in &pts {
            while hull.len() >= 2 && cross(hull[hull.len() - 2], hull[hull.len() - 1], p) <= 0.0 {
                hull.pop();
            }
            hull.push(p);
        }
        // Upper hull.
        let lower_len = hull.len() + 1;
        for &p in pts.iter().rev().skip(1) {
            while hull.len() >= lower_len
                && cross(hull[hull.len() - 2], hull[hull.len() - 1], p) <= 0.0
            {
                hull.pop();
            }
            hull.push(p);
        }
        hull.pop();
        ConvexPolygon::new(hull)
    }

    /// Internal: wrap clip-pipeline output. Only float-noise cleanup; no
    /// coarse merging, so thin slivers survive.
    fn from_clip(vs: Vec<(f64, f64)>) -> Option<Self> {
        let vs = cleanup(vs, NOISE_EPS, NOISE_EPS)?;
        let mut poly = ConvexPolygon { verts: vs };
        poly.orient_ccw();
        Some(poly)
    }

    fn orient_ccw(&mut self) {
        if signed_area2(&self.verts) < 0.0 {
            self.verts.reverse();
        }
    }

    /// The closed unit square.
    pub fn unit_square() -> Self {
        ConvexPolygon {
            verts: vec![(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)],
        }
    }

    /// Counterclockwise vertices.
    pub fn vertices(&self) -> &[(f64, f64)] {
        &self.verts
    }

    pub fn area(&self) -> f64 {
        0.5 * signed_area2(&self.verts).abs()
    }

    pub fn centroid(&self) -> (f64, f64) {
        // Area-weighted centroid; falls back to the vertex mean for
        // degenerate slivers.
        let a2 = signed_area2(&self.verts);
        if a2.abs() < AREA_EMPTY {
            let n = self.verts.len() as f64;
            let (sx, sy) = self
                .verts
                .iter()
                .fold((0.0, 0.0), |(sx, sy), &(x, y)| (sx + x, sy + y));
            return (sx / n, sy / n);
        }
        let n = self.verts.len();
        let (mut cx, mut cy) = (0.0, 0.0);
        for i in 0..n {
            let (x1, y1) = self.verts[i];
            let (x2, y2) = self.verts[(i + 1) % n];
            let w = x1 * y2 - x2 * y1;
            cx += (x1 + x2) * w;
            cy += (y1 + y2) * w;
        }
        (cx / (3.0 * a2), cy / (3.0 * a2))
    }

    /// Clip by the half plane `a*x + b*y <= c`; `None` when nothing with at
    /// least 3 vertices survives.
    pub fn clip_half_plane(&self, a: f64, b: f64, c: f64) -> Option<ConvexPolygon> {
        let n = self.verts.len();
        let mut out: Vec<(f64, f64)> = Vec::with_capacity(n + 2);
        for i in 0..n {
            let p = self.verts[i];
            let q = self.verts[(i + 1) % n];
            let dp = a * p.0 + b * p.1 - c;
            let dq = a * q.0 + b * q.1 - c;
            if dp <= 0.0 {
                out.push(p);
            }
            if (dp < 0.0 && dq > 0.0) || (dp > 0.0 && dq < 0.0) {
                let t = dp / (dp - dq);
                out.push((p.0 + t * (q.0 - p.0), p.1 + t * (q.1 - p.1)));
            }
        }
        ConvexPolygon::from_clip(out)
    }

    /// True iff `p` lies inside (or within `tol` of) the polygon: signed
    /// distance to every edge line at least `-tol`.
    pub fn contains_point(&self, p: (f64, f64), tol: f64) -> bool {
        let n = self.verts.len();
        for i in 0..n {
            let a = self.verts[i];
            let b = self.verts[(i + 1) % n];
            let len = ((b.0 - a.0).powi(2) + (b.1 - a.1).powi(2)).sqrt();
            if len < NOISE_EPS {
                continue;
            }
            if cross(a, b, p) / len < -tol {
                return false;
            }
        }
        true
    }

    /// Axis-aligned bounding box `((min_x, min_y), (max_x, max_y))`.
    pub fn bounding_box(&self) -> ((f64, f64), (f64, f64)) {
        let mut lo = (f64::INFINITY, f64::INFINITY);
        let mut hi = (f64::NEG_INFINITY, f64::NEG_INFINITY);
        for &(x, y) in &self.verts {
            lo = (lo.0.min(x), lo.1.min(y));
            hi = (hi.0.max(x), hi.1.max(y));
        }
        (lo, hi)
    }
}

/// The partition regions `(A1, A2)`: the parts of the unit square with
/// `S(x,y) = alpha*y + (1-alpha)*x` below / at-or-above `1/2`, sharing an
/// edge on the partition line.
pub fn region_polygons(alpha: Alpha) -> (ConvexPolygon, ConvexPolygon) {
    let a = alpha.value();
    let square = ConvexPolygon::unit_square();
    let a1 = square
        .clip_half_plane(1.0 - a, a, 0.5)
        .expect("A1 is nonempty for alpha in [0,1)");
    let a2 = square
        .clip_half_plane(-(1.0 - a), -a, -0.5)
        .expect("A2 is nonempty for alpha in [0,1)");
    (a1, a2)
}

/// Which affine piece of the lift (or inverse) a branch object represents.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BranchKind {
    /// Forward branch on region `A_i`.
    Forward(u8),
    /// Inverse of the forward branch (entire-plane affine map).
    Inverse(u8),
}

/// One affine branch of the lift: `p -> linear * p + translation`.
///
/// Forward branch `i` has the branch derivative as linear part:
/// `G1(x,y) = (y, 2(1-a)x + 2a y)`, `G2(x,y) = (y, 2 - 2(1-a)x - 2a y)`.
/// Inverse branches are the exact affine inverses (e.g.
/// `G2^{-1}(u,v) = ((1 - v/2 - a u)/(1-a), u)`), never numerical inversions.
#[derive(Debug, Clone)]
pub struct AffineBranch {
    pub linear: Mat2,
    pub translation: (f64, f64),
    pub kind: BranchKind,
    alpha: Alpha,
}

impl AffineBranch {
    /// Forward branch on `A1`.
    pub fn g1(alpha: Alpha) -> Self {
        let a = alpha.value();
        AffineBranch {
            linear: Mat2::new(0.0, 1.0, 2.0 * (1.0 - a), 2.0 * a),
            translation: (0.0, 0.0),
            kind: BranchKind::Forward(1),
            alpha,
        }
    }

    /// Forward branch on `A2`.
    pub fn g2(alpha: Alpha) -> Self {
        let a = alpha.value();
        AffineBranch {
            linear: Mat2::new(0.0, 1.0, -2.0 * (1.0 - a), -2.0 * a),
            translation: (0.0, 2.0),
            kind: BranchKind::Forward(2),
            alpha,
        }
    }

    /// Exact affine inverse of [`AffineBranch::g1`]:
    /// `(u, v) -> ((v/2 - a u)/(1-a), u)`.
    pub fn g1_inverse(alpha: Alpha) -> Self {
        let a = alpha.value();
        AffineBranch {
            linear: Mat2::new(-a / (1.0 - a), 0.5 / (1.0 - a), 1.0, 0.0),
            translation: (0.0, 0.0),
            kind: BranchKind::Inverse(1),
            alpha,
        }
    }

    /// Exact affine inverse of [`AffineBranch::g2`]:
    /// `(u, v) -> ((1 - v/2 - a u)/(1-a), u)`.
    pub fn g2_inverse(alpha: Alpha) -> Self {
        let a = alpha.value();
        AffineBranch {
            linear: Mat2::new(-a / (1.0 - a), -0.5 / (1.0 - a), 1.0, 0.0),
            translation: (1.0 / (1.0 - a), 0.0),
            kind: BranchKind::Inverse(2),
            alpha,
        }
    }

    pub fn alpha(&self) -> Alpha {
        self.alpha
    }

    /// Apply to a point.
    pub fn apply(&self, p: (f64, f64)) -> (f64, f64) {
        let (x, y) = self.linear.apply(p.0, p.1);
        (x + self.translation.0, y + self.translation.1)
    }

    /// Composition "`self` first, then `next`".
    pub fn then(&self, next: &AffineBranch) -> AffineBranch {
        let linear = next.linear.mul(&self.linear);
        let (tx, ty) = next.linear.apply(self.translation.0, self.translation.1);
        AffineBranch {
            linear,
            translation: (tx + next.translation.0, ty + next.translation.1),
            kind: next.kind, // label of the outermost map
            alpha: self.alpha,
        }
    }

    /// Affine image of a polygon (convexity is preserved; output reoriented
    /// counterclockwise). Forward branches require the polygon to lie in
    /// their domain region within `tol = 1e-9`; callers must split a
    /// straddling polygon at the partition line first. Inverse branches are
    /// entire-plane affine maps with no domain restriction.
    pub fn map_polygon(&self, poly: &ConvexPolygon) -> Result<ConvexPolygon> {
        if let BranchKind::Forward(i) = self.kind {
            let a = self.alpha.value();
            for &(x, y) in poly.vertices() {
                let s = a * y + (1.0 - a) * x;
                let ok = if i == 1 { s <= 0.5 + 1e-9 } else { s >= 0.5 - 1e-9 };
                if !ok {
                    return Err(Error::Domain(format!(
                        "polygon vertex ({x}, {y}) outside domain of branch {i} (S = {s}); split at the partition line first"
                    )));
                }
            }
        }
        let vs: Vec<(f64, f64)> = poly.vertices().iter().map(|&p| self.apply(p)).collect();
        ConvexPolygon::from_clip(vs)
            .ok_or_else(|| Error::Domain("image degenerated below three vertices".into()))
    }
}

/// Split a polygon by the line `a*x + b*y = c` into the `<=` and `>=` pieces
/// (either may be `None`); the pieces share an edge on the line and their
/// union is the input.
pub fn split_by_line(
    poly: &ConvexPolygon,
    a: f64,
    b: f64,
    c: f64,
) -> (Option<ConvexPolygon>, Option<ConvexPolygon>) {
    (
        poly.clip_half_plane(a, b, c),
        poly.clip_half_plane(-a, -b, -c),
    )
}

/// Split at the partition line `S(x,y) = 1/2`; returns `(A1 side, A2 side)`.
pub fn split_by_partition(
    alpha: Alpha,
    poly: &ConvexPolygon,
) -> (Option<ConvexPolygon>, Option<ConvexPolygon>) {
    let a = alpha.value();
    split_by_line(poly, 1.0 - a, a, 0.5)
}

/// Convex intersection via half-plane clipping; `None` when the result has
/// area below [`AREA_EMPTY`] (including the shared-edge degenerate case).
pub fn intersect(a: &ConvexPolygon, b: &ConvexPolygon) -> Option<ConvexPolygon> {
    let mut cur = a.clone();
    let n = b.vertices().len();
    for i in 0..n {
        let p = b.vertices()[i];
        let q = b.vertices()[(i + 1) % n];
        // Interior of a CCW polygon is to the left of each directed edge:
        // keep z with (q.1-p.1)*(z.0-p.0) - (q.0-p.0)*(z.1-p.1) <= 0.
        let ea = q.1 - p.1;
        let eb = -(q.0 - p.0);
        let ec = ea * p.0 + eb * p.1;
        cur = cur.clip_half_plane(ea, eb, ec)?;
    }
    if cur.area() < AREA_EMPTY {
        None
    } else {
        Some(cur)
    }
}

/// True iff every vertex of `a` lies in `b` within `tol`. For convex `b`
/// this implies the whole of `a` is contained (the convex hull of points of
/// `b` stays in `b`), so no separate edge test is needed.
pub fn is_subset(a: &ConvexPolygon, b: &ConvexPolygon, tol: f64) -> bool {
    a.vertices().iter().all(|&p| b.contains_point(p, tol))
}

/// A polygon piece together with the branch itinerary that produced it,
/// in time order (first symbol = branch applied first).
#[derive(Debug, Clone)]
pub struct TrackedPiece {
    pub polygon: ConvexPolygon,
    pub itinerary: Vec<u8>,
}

/// A collection of pairwise interior-disjoint convex pieces, plus counters
/// for pieces dropped as degenerate during iteration.
#[derive(Debug, Clone)]
pub struct PieceSet {
    pub pieces: Vec<TrackedPiece>,
    pub dropped_count: usize,
    pub dropped_area: f64,
}

impl PieceSet {
    pub fn total_area(&self) -> f64 {
        self.pieces.iter().map(|p| p.polygon.area()).sum()
    }
}

/// Apply the lift `k` times to a polygon, splitting every piece at the
/// partition line before each affine application and recording itineraries.
/// Pieces whose area falls below `1e-16` are dropped but counted.
pub fn iterate_set(alpha: Alpha, poly: &ConvexPolygon, k: usize) -> Result<PieceSet> {
    let g1 = AffineBranch::g1(alpha);
    let g2 = AffineBranch::g2(alpha);
    let mut out = PieceSet {
        pieces: vec![TrackedPiece {
            polygon: poly.clone(),
            itinerary: Vec::new(),
        }],
        dropped_count: 0,
        dropped_area: 0.0,
    };
    for _ in 0..k {
        let mut next: Vec<TrackedPiece> = Vec::with_capacity(out.pieces.len() + 4);
        for piece in &out.pieces {
            let (p1, p2) = split_by_partition(alpha, &piece.polygon);
            for (side, branch, symbol) in [(p1, &g1, 1u8), (p2, &g2, 2u8)] {
                if let Some(side) = side {
                    if side.area() < AREA_EMPTY {
                        out.dropped_count += 1;
                        out.dropped_area += side.area();
                        continue;
                    }
                    let img = branch.map_polygon(&side)?;
                    let mut itinerary = piece.itinerary.clone();
                    itinerary.push(symbol);
                    next.push(TrackedPiece {
                        polygon: img,
                        itinerary,
                    });
                }
            }
        }
        out.pieces = next;
    }
    Ok(out)
}

/// Intersection point of the lines `a1*x + b1*y = c1` and `a2*x + b2*y = c2`,
/// `None` if they are parallel at tolerance `1e-14`.
pub fn line_intersect(
    a1: f64,
    b1: f64,
    c1: f64,
    a2: f64,
    b2: f64,
    c2: f64,
) -> Option<(f64, f64)> {
    let det = a1 * b2 - a2 * b1;
    if det.abs() < 1e-14 {
        return None;
    }
    Some(((c1 * b2 - c2 * b1) / det, (a1 * c2 - a2 * c1) / det))
}

/// CSV dump `label,vertex_index,x,y` for a list of labeled polygons.
pub fn polygons_to_csv(items: &[(&str, &ConvexPolygon)]) -> String {
    let mut s = String::from("label,vertex_index,x,y\n");
    for (label, poly) in items {
        for (i, &(x, y)) in poly.vertices().iter().enumerate() {
            s.push_str(&format!("{label},{i},{x},{y}\n"));
        }
    }
    s
}

/// Label for the region a whole polygon lies in, if it lies in one.
pub fn region_of_polygon(alpha: Alpha, poly: &ConvexPolygon, tol: f64) -> Option<RegionLabel> {
    let a = alpha.value();
    let s_vals: Vec<f64> = poly
        .vertices()
        .iter()
        .map(|&(x, y)| a * y + (1.0 - a) * x)
        .collect();
    if s_vals.iter().all(|&s| s <= 0.5 + tol) {
        Some(RegionLabel::A1)
    } else if s_vals.iter().all(|&s| s >= 0.5 - tol) {
        Some(RegionLabel::A2)
    } else {
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::poly_eval;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    fn a(v: f64) -> Alpha {
        Alpha::new(v).unwrap()
    }

    fn close(p: (f64, f64), q: (f64, f64), tol: f64) -> bool {
        (p.0 - q.0).abs() <= tol && (p.1 - q.1).abs() <= tol
    }

    fn same_polygon(a: &ConvexPolygon, b: &ConvexPolygon, tol: f64) -> bool {
        is_subset(a, b, tol) && is_subset(b, a, tol) && (a.area() - b.area()).abs() <= tol
    }

    #[test]
    fn region_polygon_examples() {
        // alpha = 1/2: two triangles split by x + y = 1.
        let (a1, a2) = region_polygons(a(0.5));
        assert!((a1.area() - 0.5).abs() < 1e-12);
        assert!((a2.area() - 0.5).abs() < 1e-12);
        // alpha = 0.25: A1 contains the origin; partition hits x-axis at 2/3.
        let (a1, a2) = region_polygons(a(0.25));
        assert!(a1.contains_point((0.0, 0.0), 1e-12));
        assert!(a1
            .vertices()
            .iter()
            .any(|&v| close(v, (2.0 / 3.0, 0.0), 1e-12)));
        assert!((a1.area() + a2.area() - 1.0).abs() < 1e-12);
        for k in 1..20 {
            let al = a(k as f64 / 20.0);
            let (a1, a2) = region_polygons(al);
            assert!((a1.area() + a2.area() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn affine_branch_point_examples() {
        // G2(1,1) = (1, 0) for every alpha: tau(1) = 0.
        for v in [0.1, 0.3, 0.5, 0.75] {
            let g2 = AffineBranch::g2(a(v));
            assert!(close(g2.apply((1.0, 1.0)), (1.0, 0.0), 1e-12));
        }
        // Inverses really invert.
        for v in [0.2, 0.45, 0.6] {
            let al = a(v);
            let g1 = AffineBranch::g1(al);
            let g2 = AffineBranch::g2(al);
            let g1i = AffineBranch::g1_inverse(al);
            let g2i = AffineBranch::g2_inverse(al);
            for p in [(0.3, 0.4), (0.8, 0.1), (0.5, 0.9)] {
                assert!(close(g1i.apply(g1.apply(p)), p, 1e-12));
                assert!(close(g2i.apply(g2.apply(p)), p, 1e-12));
            }
        }
    }

    #[test]
    fn map_polygon_upper_triangle_half() {
        // At alpha = 1/2 the A2 triangle maps onto itself under (y, 2-x-y).
        let al = a(0.5);
        let (_, a2) = region_polygons(al);
        let img = AffineBranch::g2(al).map_polygon(&a2).unwrap();
        assert!(same_polygon(&img, &a2, 1e-12));
        // Straddling polygon rejected by a forward branch.
        let square = ConvexPolygon::unit_square();
        assert!(AffineBranch::g2(al).map_polygon(&square).is_err());
        // Inverse branches have no domain restriction.
        assert!(AffineBranch::g2_inverse(al).map_polygon(&square).is_ok());
    }

    #[test]
    fn split_examples() {
        let square = ConvexPolygon::unit_square();
        let (lo, hi) = split_by_line(&square, 1.0, 1.0, 1.0);
        let (lo, hi) = (lo.unwrap(), hi.unwrap());
        assert!((lo.area() - 0.5).abs() < 1e-12);
        assert!((hi.area() - 0.5).abs() < 1e-12);
        assert_eq!(lo.vertices().len(), 3);
        assert_eq!(hi.vertices().len(), 3);
        // Polygon strictly on one side passes through unchanged.
        let (lo, hi) = split_by_line(&square, 1.0, 0.0, 2.0);
        assert!(same_polygon(&lo.unwrap(), &square, 1e-12));
        assert!(hi.is_none());
    }

    #[test]
    fn intersect_examples() {
        let square = ConvexPolygon::unit_square();
        let far = ConvexPolygon::new(vec![(2.0, 0.0), (3.0, 0.0), (3.0, 1.0), (2.0, 1.0)]).unwrap();
        assert!(intersect(&square, &far).is_none());
        // A1 and A2 meet only along the partition segment: no area.
        let (a1, a2) = region_polygons(a(0.4));
        assert!(intersect(&a1, &a2).is_none());
        // Intersection is symmetric in area.
        let tri = ConvexPolygon::new(vec![(0.2, 0.2), (1.5, 0.3), (0.4, 1.4)]).unwrap();
        let i1 = intersect(&square, &tri).unwrap();
        let i2 = intersect(&tri, &square).unwrap();
        assert!((i1.area() - i2.area()).abs() < 1e-12);
    }

    #[test]
    fn subset_examples() {
        let square = ConvexPolygon::unit_square();
        let tri = ConvexPolygon::new(vec![(0.2, 0.2), (0.8, 0.3), (0.4, 0.8)]).unwrap();
        assert!(is_subset(&tri, &tri, 1e-12));
        assert!(is_subset(&tri, &square, 1e-12));
        assert!(!is_subset(&square, &tri, 1e-12));
    }

    #[test]
    fn hull_from_unordered() {
        let pts = [
            (1.0, 1.0),
            (0.0, 0.0),
            (0.5, 0.5), // interior
            (1.0, 0.0),
            (0.0, 1.0),
        ];
        let hull = ConvexPolygon::from_unordered(&pts).unwrap();
        assert_eq!(hull.vertices().len(), 4);
        assert!((hull.area() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn iterate_set_identity_at_half() {
        // The A2 triangle at alpha = 1/2 returns to itself after 3 steps.
        let al = a(0.5);
        let (_, a2) = region_polygons(al);
        let ps = iterate_set(al, &a2, 3).unwrap();
        assert_eq!(ps.pieces.len(), 1);
        assert_eq!(ps.pieces[0].itinerary, vec![2, 2, 2]);
        assert!(same_polygon(&ps.pieces[0].polygon, &a2, 1e-12));
        assert_eq!(ps.dropped_count, 0);
    }

    #[test]
    fn iterate_set_area_bookkeeping() {
        // Total area scales by |det DG| = 2(1-alpha) per application.
        let al = a(0.3);
        let square = ConvexPolygon::unit_square();
        for k in 1..=6 {
            let ps = iterate_set(al, &square, k).unwrap();
            let expect = 1.4f64.powi(k as i32);
            let got = ps.total_area();
            assert!(
                (got - expect).abs() < 1e-9 * expect,
                "k={k}: {got} vs {expect}"
            );
        }
    }

    #[test]
    fn second_a2_step_stays_in_a2_above_golden_threshold() {
        // For alpha above (sqrt(5)-1)/4, the part of G(A1) landing in A2 maps
        // into A2 again: a lone A2 visit is impossible.
        for v in [0.32, 0.36, 0.40, 0.44, 0.48] {
            let al = a(v);
            let (a1, a2) = region_polygons(al);
            let img = AffineBranch::g1(al).map_polygon(&a1).unwrap();
            if let Some(q) = intersect(&img, &a2) {
                let next = AffineBranch::g2(al).map_polygon(&q).unwrap();
                assert!(
                    is_subset(&next, &a2, 1e-9),
                    "second step left A2 at alpha {v}"
                );
            }
        }
    }

    #[test]
    fn composed_blend_coefficient_polynomials() {
        // Blend value after the compositions "A2 then A1 three times" and
        // "A2 then A1 twice" is an affine function of the start point whose
        // coefficients are known polynomials in alpha.
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        for _ in 0..200 {
            let av = rng.gen_range(0.01..0.99);
            let al = a(av);
            let g1 = AffineBranch::g1(al);
            let g2 = AffineBranch::g2(al);
            let x = rng.gen_range(0.0..1.0);
            let y = rng.gen_range(0.0..1.0);

            // Three A1 steps after one A2 step.
            let comp = g2.then(&g1).then(&g1).then(&g1);
            let (u, v) = comp.apply((x, y));
            let s = av * v + (1.0 - av) * u;
            let cx = poly_eval(&[-4.0, 12.0, -36.0, 52.0, -40.0, 16.0], av);
            let cy = poly_eval(&[0.0, 4.0, -8.0, -12.0, 16.0, -16.0], av);
            let cc = poly_eval(&[4.0, -8.0, 28.0, -24.0, 16.0], av);
            assert!((s - (cx * x + cy * y + cc)).abs() < 1e-12);

            // Two A1 steps after one A2 step.
            let comp = g2.then(&g1).then(&g1);
            let (u, v) = comp.apply((x, y));
            let s = av * v + (1.0 - av) * u;
            let cx = poly_eval(&[0.0, -8.0, 16.0, -16.0, 8.0], av);
            let cy = poly_eval(&[2.0, -4.0, -2.0, 4.0, -8.0], av);
            let cc = poly_eval(&[0.0, 8.0, -8.0, 8.0], av);
            assert!((s - (cx * x + cy * y + cc)).abs() < 1e-12);
        }
    }

    #[test]
    fn line_intersect_examples() {
        let p = line_intersect(1.0, 0.0, 0.5, 0.0, 1.0, 0.25).unwrap();
        assert!(close(p, (0.5, 0.25), 1e-15));
        assert!(line_intersect(1.0, 1.0, 1.0, 2.0, 2.0, 3.0).is_none());
    }

    #[test]
    fn csv_dump_shape() {
        let square = ConvexPolygon::unit_square();
        let csv = polygons_to_csv(&[("sq", &square)]);
        let lines: Vec<&str> = csv.trim().lines().collect();
        assert_eq!(lines.len(), 5);
        assert_eq!(lines[0], "label,vertex_index,x,y");
        assert!(lines[1].starts_with("sq,0,"));
    }
}
