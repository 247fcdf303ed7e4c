//! Exact lattice polygons: Delzant checks, edge self-intersections, the six
//! moment triangles of `CP(a,b,c)`, corner chopping and homology class
//! assignment by reduction to a minimal model.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::arith::{neg_cf_expand, WeightTriple};
use crate::homlat::{AreaForm, BasisTag, HClass, Lattice};

pub type Q = BigRational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PolygonError {
    #[error("polygon is not strictly convex and counterclockwise at vertex {0}")]
    NotConvex(usize),
    #[error("edge {0} has zero length")]
    DegenerateEdge(usize),
    #[error("vertex {0} is out of range")]
    BadVertex(usize),
    #[error("corner at vertex {0} is already Delzant")]
    DelzantCorner(usize),
    #[error("truncation at vertex {vertex} is invalid: {reason}")]
    ChopsOverlap { vertex: usize, reason: String },
    #[error("edge {0} has a non-Delzant corner")]
    NotDelzantNeighborhood(usize),
    #[error("no −1 edge on a non-minimal polygon with {0} edges")]
    NoMinusOneEdge(usize),
    #[error("class assignment check failed: {0}")]
    Postcondition(String),
    #[error("invalid truncation schedule: {0}")]
    BadSchedule(String),
    #[error("presentation must be in 1..=6, got {0}")]
    BadPresentation(usize),
}

pub fn q_int(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub fn q_frac(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Point {
    pub x: Q,
    pub y: Q,
}

impl Point {
    pub fn new(x: Q, y: Q) -> Self {
        Point { x, y }
    }

    pub fn int(x: i64, y: i64) -> Self {
        Point::new(q_int(x), q_int(y))
    }

    fn dot(&self, u: (i64, i64)) -> Q {
        combine(&self.x, u.0, &self.y, u.1, 1)
    }
}

/// Where an edge of a resolved polygon came from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EdgeOrigin {
    /// A side of the original triangle, named by the opposite vertex label.
    Side(char),
    /// The `j`-th truncation edge (1-based) at the corner with this label.
    Chop(char, usize),
}

impl fmt::Display for EdgeOrigin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EdgeOrigin::Side(c) => write!(f, "N_{}", c.to_ascii_lowercase()),
            EdgeOrigin::Chop(c, j) => write!(f, "{c}_{j}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Edge {
    /// Primitive integral direction from this edge's start vertex to its end.
    pub dir: (i64, i64),
    /// Primitive integral inward normal.
    pub normal: (i64, i64),
    /// Lattice length: edge vector = length · dir.
    pub length: Q,
    pub origin: EdgeOrigin,
}

/// A strictly convex counterclockwise polygon with rational vertices. Edge
/// `i` runs from vertex `i` to vertex `i + 1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LatticePolygon {
    pub vertices: Vec<Point>,
    pub vertex_labels: Vec<String>,
    pub edges: Vec<Edge>,
}

fn det(u: (i64, i64), v: (i64, i64)) -> i64 {
    u.0 * v.1 - u.1 * v.0
}

/// Primitive integral direction from `a` to `b`, with the positive
/// multiplier `t` such that `b − a = t · dir`.
fn primitive(a: &Point, b: &Point) -> Option<((i64, i64), Q)> {
    // (b − a) = (nx/dx, ny/dy), kept unreduced
    let nx = b.x.numer() * a.x.denom() - a.x.numer() * b.x.denom();
    let dx = a.x.denom() * b.x.denom();
    let ny = b.y.numer() * a.y.denom() - a.y.numer() * b.y.denom();
    let dy = a.y.denom() * b.y.denom();
    if nx.is_zero() && ny.is_zero() {
        return None;
    }
    let ix = nx * &dy;
    let iy = ny * &dx;
    let g = ix.gcd(&iy);
    let px: i64 = (&ix / &g).try_into().ok()?;
    let py: i64 = (&iy / &g).try_into().ok()?;
    Some(((px, py), Q::new(g, dx * dy)))
}

impl LatticePolygon {
    /// Build and validate a polygon from counterclockwise vertices.
    pub fn new(
        vertices: Vec<Point>,
        vertex_labels: Vec<String>,
        origins: Vec<EdgeOrigin>,
    ) -> Result<Self, PolygonError> {
        let n = vertices.len();
        let mut edges = Vec::with_capacity(n);
        for i in 0..n {
            let a = &vertices[i];
            let b = &vertices[(i + 1) % n];
            let (dir, length) = primitive(a, b).ok_or(PolygonError::DegenerateEdge(i))?;
            edges.push(Edge {
                dir,
                normal: (-dir.1, dir.0),
                length,
                origin: origins[i].clone(),
            });
        }
        for i in 0..n {
            if det(edges[(i + n - 1) % n].dir, edges[i].dir) <= 0 {
                return Err(PolygonError::NotConvex(i));
            }
        }
        Ok(LatticePolygon {
            vertices,
            vertex_labels,
            edges,
        })
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    fn prev(&self, i: usize) -> usize {
        (i + self.edges.len() - 1) % self.edges.len()
    }

    fn next(&self, i: usize) -> usize {
        (i + 1) % self.edges.len()
    }

    /// `|det|` of the primitive directions meeting at vertex `v`.
    pub fn corner_det(&self, v: usize) -> i64 {
        det(self.edges[self.prev(v)].dir, self.edges[v].dir).abs()
    }

    pub fn is_delzant(&self) -> bool {
        (0..self.vertices.len()).all(|v| self.corner_det(v) == 1)
    }

    /// Twice the Euclidean area (shoelace), exact.
    pub fn double_area(&self) -> Q {
        let n = self.vertices.len();
        let mut s = Q::zero();
        for i in 0..n {
            let a = &self.vertices[i];
            let b = &self.vertices[(i + 1) % n];
            s += &a.x * &b.y - &b.x * &a.y;
        }
        s
    }

    /// Sum of lattice lengths of all edges.
    pub fn perimeter(&self) -> Q {
        self.edges.iter().map(|e| e.length.clone()).sum()
    }

    /// Apply the affine map `x ↦ M x + t` with `M` unimodular.
    pub fn transformed(&self, m: [[i64; 2]; 2], t: (Q, Q)) -> Result<LatticePolygon, PolygonError> {
        let d = m[0][0] * m[1][1] - m[0][1] * m[1][0];
        assert!(d.abs() == 1, "transformation must be unimodular");
        let map = |p: &Point| {
            Point::new(
                &p.x * q_int(m[0][0]) + &p.y * q_int(m[0][1]) + &t.0,
                &p.x * q_int(m[1][0]) + &p.y * q_int(m[1][1]) + &t.1,
            )
        };
        let mut vertices: Vec<Point> = self.vertices.iter().map(map).collect();
        let mut labels = self.vertex_labels.clone();
        let mut origins: Vec<EdgeOrigin> = self.edges.iter().map(|e| e.origin.clone()).collect();
        if d < 0 {
            // orientation reversing: reverse the cycle, keeping edge i between
            // vertices i and i+1
            vertices.reverse();
            labels.reverse();
            let n = vertices.len();
            vertices.rotate_right(1);
            labels.rotate_right(1);
            // old edge between old vertices i, i+1 now runs between new
            // vertices; after reversal+rotation, edge k joins old vertices
            // n-k and n-k-1, i.e. old edge n-k-1
            origins = (0..n).map(|k| self.edges[(2 * n - k - 1) % n].origin.clone()).collect();
        }
        LatticePolygon::new(vertices, labels, origins)
    }
}

/// Corner type `(r, q)`: the corner is integral-affinely `{x ≥ 0, y ≥ (q/r) x}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CornerType {
    pub r: i64,
    pub q: i64,
}

/// Which adjacent edge plays the role of the vertical edge `x = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Orientation {
    /// The edge arriving at the vertex in counterclockwise order.
    #[default]
    Incoming,
    /// The edge leaving the vertex.
    Outgoing,
}

/// Corner normalisation at vertex `v` read from the `start` edge: returns the
/// type, the start and end normals, and the first truncation normal `w` with
/// `end = −q·start + r·w`.
struct CornerFrame {
    ty: CornerType,
    start: (i64, i64),
    end: (i64, i64),
    w: (i64, i64),
}

fn corner_frame(p: &LatticePolygon, v: usize, orientation: Orientation) -> Result<CornerFrame, PolygonError> {
    if v >= p.vertices.len() {
        return Err(PolygonError::BadVertex(v));
    }
    let u_in = p.edges[p.prev(v)].normal;
    let u_out = p.edges[v].normal;
    // work with det or its mirror so that det(start, end) = r > 0
    let (start, end, sign) = match orientation {
        Orientation::Incoming => (u_in, u_out, 1),
        Orientation::Outgoing => (u_out, u_in, -1),
    };
    let sdet = |x: (i64, i64), y: (i64, i64)| sign * det(x, y);
    let r = sdet(start, end);
    debug_assert!(r > 0, "convex counterclockwise polygon");
    let ext = start.0.extended_gcd(&start.1);
    let g = ext.gcd;
    let w0 = (-ext.y * g * sign, ext.x * g * sign);
    debug_assert_eq!(sdet(start, w0), 1);
    let rest = (end.0 - r * w0.0, end.1 - r * w0.1);
    let alpha = if start.0 != 0 {
        rest.0 / start.0
    } else {
        rest.1 / start.1
    };
    if r == 1 {
        return Ok(CornerFrame {
            ty: CornerType { r: 1, q: 0 },
            start,
            end,
            w: w0,
        });
    }
    let q = (-alpha).rem_euclid(r);
    let w = ((end.0 + q * start.0) / r, (end.1 + q * start.1) / r);
    debug_assert_eq!(sdet(start, w), 1);
    Ok(CornerFrame {
        ty: CornerType { r, q },
        start,
        end,
        w,
    })
}

pub fn corner_type(p: &LatticePolygon, v: usize, orientation: Orientation) -> Result<CornerType, PolygonError> {
    Ok(corner_frame(p, v, orientation)?.ty)
}

/// `(s·x + t·y) / d` with a single reduction.
fn combine(x: &Q, s: i64, y: &Q, t: i64, d: i64) -> Q {
    let numer = x.numer() * y.denom() * s + y.numer() * x.denom() * t;
    let denom = x.denom() * y.denom() * d;
    Q::new(numer, denom)
}

fn intersect(u: (i64, i64), lu: &Q, w: (i64, i64), lw: &Q) -> Point {
    let d = det(u, w);
    Point::new(combine(lu, w.1, lw, -u.1, d), combine(lw, u.0, lu, -w.0, d))
}

/// Normals of a corner subdivision with their continued-fraction entries.
pub type Chops = (Vec<(i64, i64)>, Vec<i64>);

/// The normals `u_1, …, u_k` of the Hirzebruch–Jung subdivision at vertex `v`,
/// numbered from the `orientation` side, with the entries `b_1, …, b_k`.
pub fn chop_normals(p: &LatticePolygon, v: usize, orientation: Orientation) -> Result<Chops, PolygonError> {
    let f = corner_frame(p, v, orientation)?;
    if f.ty.r == 1 {
        return Err(PolygonError::DelzantCorner(v));
    }
    let b = neg_cf_expand(f.ty.r, f.ty.q).expect("valid corner type").entries;
    let mut rays = vec![f.w];
    let mut prev = f.start;
    for j in 0..b.len() - 1 {
        let cur = rays[j];
        let nxt = (b[j] * cur.0 - prev.0, b[j] * cur.1 - prev.1);
        prev = cur;
        rays.push(nxt);
    }
    let last = rays[b.len() - 1];
    let before = if b.len() >= 2 { rays[b.len() - 2] } else { f.start };
    let closing = (b[b.len() - 1] * last.0 - before.0, b[b.len() - 1] * last.1 - before.1);
    debug_assert_eq!(closing, f.end);
    Ok((rays, b))
}

/// Replace the corner at `v` by `k` truncation edges, numbered from the
/// `orientation` side. Cut `j` moves the current vertex on the far edge
/// inward by height `eps[j]` measured in the local model of that step.
///
/// Returns the new polygon and the indices of truncation edges `1..=k`.
pub fn chop_corner(
    p: &LatticePolygon,
    v: usize,
    eps: &[Q],
    label: char,
    orientation: Orientation,
) -> Result<(LatticePolygon, Vec<usize>), PolygonError> {
    let (rays, b) = chop_normals(p, v, orientation)?;
    let k = b.len();
    if eps.len() != k {
        return Err(PolygonError::BadSchedule(format!(
            "corner {label} needs {k} truncation heights, got {}",
            eps.len()
        )));
    }
    if eps.iter().any(|e| !e.is_positive()) {
        return Err(PolygonError::BadSchedule("heights must be positive".into()));
    }
    let f = corner_frame(p, v, orientation)?;
    let vtx = &p.vertices[v];
    let l_start = vtx.dot(f.start);
    let l_end = vtx.dot(f.end);
    let mut levels = Vec::with_capacity(k);
    let mut corner = vtx.clone();
    for j in 0..k {
        let lam = corner.dot(rays[j]) + &eps[j];
        corner = intersect(rays[j], &lam, f.end, &l_end);
        levels.push(lam);
    }
    // pts[j] joins cut j and cut j+1 (cut 0 = start edge, cut k+1 = end edge)
    let mut pts = Vec::with_capacity(k + 1);
    pts.push(intersect(f.start, &l_start, rays[0], &levels[0]));
    for j in 0..k - 1 {
        pts.push(intersect(rays[j], &levels[j], rays[j + 1], &levels[j + 1]));
    }
    pts.push(corner);
    // counterclockwise: the new edge after pts[i] is cut i+1 (incoming) or cut k−i
    let (ccw_pts, ccw_cut): (Vec<Point>, Vec<usize>) = match orientation {
        Orientation::Incoming => (pts, (1..=k).collect()),
        Orientation::Outgoing => (pts.into_iter().rev().collect(), (1..=k).rev().collect()),
    };

    let n = p.vertices.len();
    let mut vertices = Vec::with_capacity(n + k);
    let mut labels = Vec::with_capacity(n + k);
    let mut origins = Vec::with_capacity(n + k);
    let mut new_edges = vec![0; k];
    for i in 0..n {
        if i == v {
            for (j, pt) in ccw_pts.iter().enumerate() {
                vertices.push(pt.clone());
                labels.push(format!("{}{}", p.vertex_labels[v], j));
                if j < k {
                    new_edges[ccw_cut[j] - 1] = origins.len();
                    origins.push(EdgeOrigin::Chop(label, ccw_cut[j]));
                } else {
                    origins.push(p.edges[v].origin.clone());
                }
            }
        } else {
            vertices.push(p.vertices[i].clone());
            labels.push(p.vertex_labels[i].clone());
            origins.push(p.edges[i].origin.clone());
        }
    }
    let overlap = |reason: String| PolygonError::ChopsOverlap { vertex: v, reason };
    let q = LatticePolygon::new(vertices, labels, origins).map_err(|e| overlap(e.to_string()))?;
    // every new edge must carry its prescribed normal and the old
    // neighbours must survive with their normals
    for j in 0..k {
        if q.edges[new_edges[j]].normal != rays[j] {
            return Err(overlap(format!("truncation edge {} lost", j + 1)));
        }
    }
    let u_in = p.edges[p.prev(v)].normal;
    let u_out = p.edges[v].normal;
    if q.edges[(v + n + k - 1) % (n + k)].normal != u_in || q.edges[v + k].normal != u_out {
        return Err(overlap("an adjacent edge was consumed".into()));
    }
    for j in 0..k {
        let s = edge_selfint(&q, new_edges[j])?;
        if s != -b[j] {
            return Err(overlap(format!("truncation edge {} has self-intersection {s}", j + 1)));
        }
    }
    Ok((q, new_edges))
}

/// Self-intersection of the sphere over edge `i`, from
/// `n_{i−1} + n_{i+1} = −s_i n_i`.
pub fn edge_selfint(p: &LatticePolygon, i: usize) -> Result<i64, PolygonError> {
    if i >= p.edges.len() {
        return Err(PolygonError::BadVertex(i));
    }
    let j = p.next(i);
    if p.corner_det(i) != 1 || p.corner_det(j) != 1 {
        return Err(PolygonError::NotDelzantNeighborhood(i));
    }
    let a = p.edges[p.prev(i)].normal;
    let c = p.edges[j].normal;
    let b = p.edges[i].normal;
    let sum = (a.0 + c.0, a.1 + c.1);
    // sum = −s b
    let s = if b.0 != 0 { -sum.0 / b.0 } else { -sum.1 / b.1 };
    if (sum.0, sum.1) != (-s * b.0, -s * b.1) {
        return Err(PolygonError::NotDelzantNeighborhood(i));
    }
    Ok(s)
}

/// The triangle `T_i` (1-based) of `CP(a,b,c)` at scale `abc`, counterclockwise,
/// vertices labelled `A`, `B`, `C`.
pub fn presentation(w: &WeightTriple, index: usize) -> Result<LatticePolygon, PolygonError> {
    let (a, b, c) = (w.a as i64, w.b as i64, w.c as i64);
    let (ab, ac, ba, bc, ca, cb) = (
        w.a_b as i64,
        w.a_c as i64,
        w.b_a as i64,
        w.b_c as i64,
        w.c_a as i64,
        w.c_b as i64,
    );
    // (origin label, (0, y) label and y, third label and point)
    let (l0, l1, y1, l2, p2) = match index {
        1 => ('A', 'B', c, 'C', (a * b, ab * b)),
        2 => ('A', 'C', b, 'B', (a * c, ac * c)),
        3 => ('B', 'A', c, 'C', (b * a, ba * a)),
        4 => ('B', 'C', a, 'A', (b * c, bc * c)),
        5 => ('C', 'A', b, 'B', (c * a, ca * a)),
        6 => ('C', 'B', a, 'A', (c * b, cb * b)),
        _ => return Err(PolygonError::BadPresentation(index)),
    };
    // counterclockwise order: origin, third point, (0, y)
    let verts = vec![Point::int(0, 0), Point::int(p2.0, p2.1), Point::int(0, y1)];
    let labels = [l0, l2, l1];
    let side = |x: char, y: char| -> EdgeOrigin {
        let opp = ['A', 'B', 'C']
            .into_iter()
            .find(|&z| z != x && z != y)
            .expect("three labels");
        EdgeOrigin::Side(opp)
    };
    let origins = vec![
        side(labels[0], labels[1]),
        side(labels[1], labels[2]),
        side(labels[2], labels[0]),
    ];
    LatticePolygon::new(verts, labels.iter().map(|c| c.to_string()).collect(), origins)
}

pub fn six_presentations(w: &WeightTriple) -> Result<Vec<LatticePolygon>, PolygonError> {
    (1..=6).map(|i| presentation(w, i)).collect()
}

/// How truncation heights are chosen at a corner.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CornerEps {
    /// `ε_j = fraction · L · ratio^j`, `L` the shortest adjacent edge length.
    Geometric {
        fraction: Q,
        ratio: Q,
    },
    Explicit(Vec<Q>),
}

impl Default for CornerEps {
    fn default() -> Self {
        CornerEps::Geometric {
            fraction: q_frac(1, 4),
            ratio: q_frac(1, 3),
        }
    }
}

impl CornerEps {
    /// Heights for a corner needing `k` cuts whose adjacent edges have lattice
    /// lengths `l1`, `l2`.
    pub fn heights(&self, k: usize, l1: &Q, l2: &Q) -> Vec<Q> {
        match self {
            CornerEps::Geometric { fraction, ratio } => {
                let base = fraction * l1.min(l2).clone();
                let mut out = Vec::with_capacity(k);
                let mut cur = base;
                for _ in 0..k {
                    cur = &cur * ratio;
                    out.push(cur.clone());
                }
                out
            }
            CornerEps::Explicit(v) => v.clone(),
        }
    }
}

/// Truncation heights for the three corners, keyed by vertex label.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct EpsSchedule {
    pub a: CornerEps,
    pub b: CornerEps,
    pub c: CornerEps,
}

impl EpsSchedule {
    pub fn corner(&self, label: char) -> &CornerEps {
        match label {
            'A' => &self.a,
            'B' => &self.b,
            _ => &self.c,
        }
    }
}

fn parse_q(s: &str) -> Result<Q, PolygonError> {
    let bad = || PolygonError::BadSchedule(format!("not a rational: {s:?}"));
    let s = s.trim();
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let n: BigInt = n.parse().map_err(|_| bad())?;
    let d: BigInt = d.parse().map_err(|_| bad())?;
    if d.is_zero() {
        return Err(bad());
    }
    Ok(Q::new(n, d))
}

impl FromStr for EpsSchedule {
    type Err = PolygonError;

    /// `default`, `geom:F:R` (all corners), or `a=e1,e2,…;c=…` with explicit
    /// heights per corner (unlisted corners keep the default).
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if s.is_empty() || s == "default" {
            return Ok(EpsSchedule::default());
        }
        if let Some(rest) = s.strip_prefix("geom:") {
            let (f, r) = rest
                .split_once(':')
                .ok_or_else(|| PolygonError::BadSchedule("expected geom:F:R".into()))?;
            let (fraction, ratio) = (parse_q(f)?, parse_q(r)?);
            if !fraction.is_positive() || !ratio.is_positive() || ratio >= Q::one() {
                return Err(PolygonError::BadSchedule("need F > 0 and 0 < R < 1".into()));
            }
            let g = CornerEps::Geometric { fraction, ratio };
            return Ok(EpsSchedule {
                a: g.clone(),
                b: g.clone(),
                c: g,
            });
        }
        let mut out = EpsSchedule::default();
        for part in s.split(';').filter(|p| !p.trim().is_empty()) {
            let (key, vals) = part
                .split_once('=')
                .ok_or_else(|| PolygonError::BadSchedule(format!("expected corner=values in {part:?}")))?;
            let vals: Vec<Q> = vals.split(',').map(parse_q).collect::<Result<_, _>>()?;
            let slot = match key.trim().to_ascii_lowercase().as_str() {
                "a" => &mut out.a,
                "b" => &mut out.b,
                "c" => &mut out.c,
                other => return Err(PolygonError::BadSchedule(format!("unknown corner {other:?}"))),
            };
            *slot = CornerEps::Explicit(vals);
        }
        Ok(out)
    }
}

/// Which adjacent side truncation edges are numbered from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ChopSide {
    /// Corner `A` from `N_c`, `B` from `N_a`, `C` from `N_b`, whatever the
    /// presentation.
    #[default]
    Intrinsic,
    /// The incoming side in the presentation's counterclockwise order.
    Incoming,
}

impl ChopSide {
    fn orientation(self, t: &LatticePolygon, v: usize, label: char) -> Orientation {
        match self {
            ChopSide::Incoming => Orientation::Incoming,
            ChopSide::Intrinsic => {
                let start = match label {
                    'A' => 'C',
                    'B' => 'A',
                    _ => 'B',
                };
                if t.edges[t.prev(v)].origin == EdgeOrigin::Side(start) {
                    Orientation::Incoming
                } else {
                    Orientation::Outgoing
                }
            }
        }
    }
}

/// Chop all non-Delzant corners of a labelled triangle. Heights are computed
/// from the unchopped triangle so the result does not depend on the order of
/// the corners.
pub fn resolve_triangle(
    t: &LatticePolygon,
    schedule: &EpsSchedule,
    side: ChopSide,
) -> Result<LatticePolygon, PolygonError> {
    let n = t.vertices.len();
    let mut plans = Vec::new();
    for v in 0..n {
        let label = t.vertex_labels[v].chars().next().unwrap_or('?');
        let orientation = side.orientation(t, v, label);
        let f = corner_frame(t, v, orientation)?;
        if f.ty.r == 1 {
            continue;
        }
        let k = neg_cf_expand(f.ty.r, f.ty.q).expect("valid").entries.len();
        let l1 = &t.edges[t.prev(v)].length;
        let l2 = &t.edges[v].length;
        plans.push((label, orientation, schedule.corner(label).heights(k, l1, l2)));
    }
    let mut p = t.clone();
    for (label, orientation, heights) in plans {
        let v = p
            .vertex_labels
            .iter()
            .position(|l| l == &label.to_string())
            .expect("label present");
        p = chop_corner(&p, v, &heights, label, orientation)?.0;
    }
    Ok(p)
}

/// Terminal model reached by contracting −1 edges.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Terminal {
    Cp2,
    Hirzebruch { k: i64 },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassAssignment {
    pub lattice: Lattice,
    /// Class of the sphere over each edge, indexed like `P.edges`.
    pub classes: Vec<HClass>,
    pub area: AreaForm,
    pub selfints: Vec<i64>,
    /// Edges contracted, in order; the `t`-th contraction from the end is the
    /// blowup creating exceptional basis vector `t`.
    pub contractions: Vec<usize>,
    pub terminal: Terminal,
}

/// Reduce `P` to a minimal model by contracting −1 edges (smallest index
/// first) and replay the blowups to assign classes and areas.
pub fn assign_classes(p: &LatticePolygon) -> Result<ClassAssignment, PolygonError> {
    let rank: Vec<usize> = (0..p.num_edges()).collect();
    assign_classes_ranked(p, &rank)
}

/// As [`assign_classes`], contracting the −1 edge of smallest `rank` first.
pub fn assign_classes_ranked(p: &LatticePolygon, rank: &[usize]) -> Result<ClassAssignment, PolygonError> {
    let m = p.num_edges();
    assert_eq!(rank.len(), m, "one rank per edge");
    let selfints: Vec<i64> = (0..m).map(|i| edge_selfint(p, i)).collect::<Result<_, _>>()?;
    let mut active: Vec<usize> = (0..m).collect();
    let mut s = selfints.clone();
    let mut len: Vec<Q> = p.edges.iter().map(|e| e.length.clone()).collect();
    // (contracted edge, left neighbour, right neighbour, length)
    let mut steps: Vec<(usize, usize, usize, Q)> = Vec::new();
    while active.len() > 3 {
        let pos = (0..active.len())
            .filter(|&i| s[active[i]] == -1)
            .min_by_key(|&i| rank[active[i]]);
        let Some(pos) = pos else {
            if active.len() == 4 {
                break;
            }
            return Err(PolygonError::NoMinusOneEdge(active.len()));
        };
        let na = active.len();
        let e = active[pos];
        let l = active[(pos + na - 1) % na];
        let r = active[(pos + 1) % na];
        s[l] += 1;
        s[r] += 1;
        let d = len[e].clone();
        len[l] += &d;
        len[r] += &d;
        steps.push((e, l, r, d));
        active.remove(pos);
    }

    let n = steps.len();
    let (lattice, mut classes, mut values, terminal) = if active.len() == 3 {
        if active.iter().any(|&i| s[i] != 1) {
            return Err(PolygonError::Postcondition("terminal triangle is not CP²".into()));
        }
        let lam = len[active[0]].clone();
        if active.iter().any(|&i| len[i] != lam) {
            return Err(PolygonError::Postcondition(
                "terminal triangle edges differ in length".into(),
            ));
        }
        let lattice = Lattice::cp2(n);
        let mut classes = vec![HClass::zero(lattice.rank); m];
        for &i in &active {
            classes[i] = HClass::basis(lattice.rank, 0);
        }
        (lattice, classes, vec![lam], Terminal::Cp2)
    } else {
        // quadrilateral: opposite edges (0, 2) and (1, 3) in cyclic order
        let fibre_pair = if s[active[0]] == 0 && s[active[2]] == 0 {
            [0, 2]
        } else if s[active[1]] == 0 && s[active[3]] == 0 {
            [1, 3]
        } else {
            return Err(PolygonError::Postcondition(
                "terminal quadrilateral is not Hirzebruch".into(),
            ));
        };
        let others = if fibre_pair == [0, 2] { [1, 3] } else { [0, 2] };
        let (sa, sb) = (active[others[0]], active[others[1]]);
        if s[sa] != -s[sb] {
            return Err(PolygonError::Postcondition(
                "sections of quadrilateral are not opposite".into(),
            ));
        }
        let (neg, pos) = if s[sa] <= 0 { (sa, sb) } else { (sb, sa) };
        let k = -s[neg];
        let lattice = Lattice::hirzebruch(k, n);
        let (f0, f1) = (active[fibre_pair[0]], active[fibre_pair[1]]);
        if len[f0] != len[f1] {
            return Err(PolygonError::Postcondition("fibre edges differ in length".into()));
        }
        let lf = len[f0].clone();
        let ls = len[neg].clone();
        if len[pos] != &ls + &lf * q_int(k) {
            return Err(PolygonError::Postcondition("section lengths inconsistent".into()));
        }
        let mut classes = vec![HClass::zero(lattice.rank); m];
        classes[f0] = HClass::basis(lattice.rank, 0);
        classes[f1] = HClass::basis(lattice.rank, 0);
        classes[neg] = HClass::basis(lattice.rank, 1);
        classes[pos] = HClass::new({
            let mut c = vec![0; lattice.rank];
            c[0] = k;
            c[1] = 1;
            c
        });
        (lattice, classes, vec![lf, ls], Terminal::Hirzebruch { k })
    };

    let first = lattice.first_exceptional();
    for (t, (e, l, r, d)) in steps.iter().rev().enumerate() {
        let idx = first + t;
        let ev = HClass::basis(lattice.rank, idx);
        classes[*e] = ev.clone();
        classes[*l] = classes[*l].sub(&ev);
        classes[*r] = classes[*r].sub(&ev);
        values.push(d.clone());
    }
    let area = AreaForm { values };
    let contractions = steps.iter().map(|st| st.0).collect();
    let out = ClassAssignment {
        lattice,
        classes,
        area,
        selfints,
        contractions,
        terminal,
    };
    verify_assignment(p, &out)?;
    Ok(out)
}

fn verify_assignment(p: &LatticePolygon, a: &ClassAssignment) -> Result<(), PolygonError> {
    let m = p.num_edges();
    let fail = |s: String| Err(PolygonError::Postcondition(s));
    let l = &a.lattice;
    for i in 0..m {
        for j in i..m {
            let want = if i == j {
                a.selfints[i]
            } else if j == (i + 1) % m || i == (j + 1) % m {
                1
            } else {
                0
            };
            let got = l.dot(&a.classes[i], &a.classes[j]);
            if got != want {
                return fail(format!("edges {i}, {j} pair to {got}, expected {want}"));
            }
        }
    }
    let mut total = HClass::zero(l.rank);
    for c in &a.classes {
        total = total.add(c);
    }
    if total.scale(-1) != l.canonical {
        return fail("-K is not the sum of the edge classes".into());
    }
    for (i, c) in a.classes.iter().enumerate() {
        if a.area.area(c) != p.edges[i].length {
            return fail(format!("area of edge {i} does not match its length"));
        }
    }
    if let BasisTag::Cp2 { n } = l.tag {
        if l.square(&l.canonical) != 9 - n as i64 {
            return fail("K² != 9 − n".into());
        }
    }
    Ok(())
}
