//! Exact polygon geometry for direction-generated symmetric polytopes.
//!
//! Purpose
//! - The input to the whole pipeline is a finite set of plane directions
//!   `q_i = λ_i (m_i, n_i)` with `(m_i, n_i)` a primitive integer vector and
//!   `λ_i` a positive rational. Two convex bodies are attached to such a set:
//!   the *generator hull* `B = conv{±q_i}` and the *constraint polygon*
//!   `P = {p : max_i |q_i · p| ≤ 1}`, which are polar duals of one another.
//!   This module computes both exactly over the rationals.
//!
//! Why exact arithmetic
//! - Vertex positions and the strictness margins `1 - |q_j · v_i|` drive the
//!   admissibility of the downstream construction (they bound how much slack
//!   every corrector has). These are yes/no questions about rational data, so
//!   they are answered exactly; floats only appear in the measured-geometry
//!   helpers at the bottom of the file.
//!
//! Conventions
//! - Directions are identified up to sign. The canonical representative has
//!   `m > 0`, or `m = 0` and `n > 0`, and sets are sorted clockwise, i.e. by
//!   decreasing angle within the right half-plane `(-90°, 90°]`.
//! - Vertex lists run clockwise and have length `2m` for `m` directions, with
//!   the second half the antipodes of the first.

use crate::vec2::{v2, Vec2};
use num::{BigInt, BigRational, Integer, Signed, ToPrimitive, Zero};
use std::collections::HashMap;
use std::str::FromStr;
use thiserror::Error;

/// Exact scalar used throughout the polygon layer.
pub type Rat = BigRational;

/// Errors from direction normalization and polygon construction.
#[derive(Debug, Error)]
pub enum PolygonError {
    #[error("direction list is empty")]
    EmptyInput,
    #[error("direction at input index {0} is zero")]
    ZeroDirection(usize),
    #[error("directions at input indices {0} and {1} are parallel")]
    ParallelDirections(usize, usize),
    #[error("directions do not span the plane (need at least two non-parallel directions)")]
    NonSpanning,
    #[error("adjacent directions {0} and {1} do not meet in a single vertex")]
    DegenerateVertex(usize, usize),
    #[error(
        "vertex shared by faces {f0} and {f1} is not strictly inside constraint {offender}: |q·v| = {value} >= 1"
    )]
    StrictnessViolation {
        f0: usize,
        f1: usize,
        offender: usize,
        value: f64,
    },
    #[error("primitive components of direction at input index {0} exceed i64")]
    UnrepresentableDirection(usize),
    #[error("cannot parse rational from {0:?}")]
    BadRational(String),
    #[error("cannot parse direction from {0:?} (expected \"p/q,r/s\")")]
    BadDirection(String),
    #[error("polar dual needs the origin strictly inside the polygon")]
    OriginNotInterior,
}

/// One normalized direction: `q = lambda * (m, n)` with `(m, n)` primitive,
/// canonical sign, and `lambda > 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct Direction {
    pub m: i64,
    pub n: i64,
    pub lambda: Rat,
}

impl Direction {
    /// The rational vector `q = lambda * (m, n)`.
    pub fn q(&self) -> (Rat, Rat) {
        (
            &self.lambda * Rat::from_integer(BigInt::from(self.m)),
            &self.lambda * Rat::from_integer(BigInt::from(self.n)),
        )
    }

    pub fn q_f64(&self) -> Vec2 {
        let l = self.lambda.to_f64().expect("finite rational");
        v2(l * self.m as f64, l * self.n as f64)
    }

    /// Primitive integer part as a float vector.
    pub fn prim_f64(&self) -> Vec2 {
        v2(self.m as f64, self.n as f64)
    }

    /// Unit tangent of the line family running along `(m, n)`.
    pub fn tangent(&self) -> Vec2 {
        self.prim_f64().normalized()
    }

    pub fn lambda_f64(&self) -> f64 {
        self.lambda.to_f64().expect("finite rational")
    }
}

/// A nonempty list of pairwise non-parallel directions in clockwise order.
///
/// Invariant: canonical signs, primitive integer parts, strictly decreasing
/// angle in `(-90°, 90°]`. Produced only by [`normalize_directions`].
#[derive(Clone, Debug)]
pub struct DirectionSet(Vec<Direction>);

impl DirectionSet {
    pub fn directions(&self) -> &[Direction] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Normalize raw rational vectors: primitivize, canonicalize signs, sort
/// clockwise. Fails on zero or pairwise-parallel inputs; the spanning test
/// belongs to [`PolygonSpec::new`], because a single direction is a legal
/// direction (e.g. for support queries) but not a legal polygon.
pub fn normalize_directions(inputs: &[(Rat, Rat)]) -> Result<DirectionSet, PolygonError> {
    if inputs.is_empty() {
        return Err(PolygonError::EmptyInput);
    }
    let mut dirs: Vec<(Direction, usize)> = Vec::with_capacity(inputs.len());
    let mut seen: HashMap<(i64, i64), usize> = HashMap::new();
    for (idx, (a, b)) in inputs.iter().enumerate() {
        if a.is_zero() && b.is_zero() {
            return Err(PolygonError::ZeroDirection(idx));
        }
        // Common denominator, then divide out the content of the integer part.
        let den = a.denom().lcm(b.denom());
        let na = (a * Rat::from_integer(den.clone())).to_integer();
        let nb = (b * Rat::from_integer(den.clone())).to_integer();
        let g = na.gcd(&nb); // gcd(0, x) = |x|, so this is positive here
        let mut pm = &na / &g;
        let mut pn = &nb / &g;
        if pm < BigInt::zero() || (pm.is_zero() && pn < BigInt::zero()) {
            pm = -pm;
            pn = -pn;
        }
        let m = pm
            .to_i64()
            .ok_or(PolygonError::UnrepresentableDirection(idx))?;
        let n = pn
            .to_i64()
            .ok_or(PolygonError::UnrepresentableDirection(idx))?;
        if let Some(prev) = seen.insert((m, n), idx) {
            return Err(PolygonError::ParallelDirections(prev, idx));
        }
        let lambda = Rat::new(g, den);
        debug_assert!(lambda > Rat::zero());
        dirs.push((Direction { m, n, lambda }, idx));
    }
    // Clockwise within the right half-plane: a before b iff cross(a, b) < 0.
    dirs.sort_by(|(a, _), (b, _)| cross_i128((a.m, a.n), (b.m, b.n)).cmp(&0));
    Ok(DirectionSet(dirs.into_iter().map(|(d, _)| d).collect()))
}

#[inline]
fn cross_i128(a: (i64, i64), b: (i64, i64)) -> i128 {
    a.0 as i128 * b.1 as i128 - a.1 as i128 * b.0 as i128
}

/// A vertex of the constraint polygon.
#[derive(Clone, Debug)]
pub struct Vertex {
    pub point: (Rat, Rat),
    /// Unsigned indices of the two active constraints, clockwise order.
    pub faces: (usize, usize),
    /// Signs with `sign * q_face · point = 1` for each active face.
    pub signs: (i8, i8),
}

impl Vertex {
    pub fn point_f64(&self) -> Vec2 {
        v2(
            self.point.0.to_f64().expect("finite rational"),
            self.point.1.to_f64().expect("finite rational"),
        )
    }
}

/// A validated direction set that spans the plane, together with the exact
/// polygon geometry derived from it.
#[derive(Clone, Debug)]
pub struct PolygonSpec {
    dirs: DirectionSet,
}

impl PolygonSpec {
    /// Spanning requires two non-parallel directions; the set is pairwise
    /// non-parallel already, so the check is just `len >= 2`.
    pub fn new(dirs: DirectionSet) -> Result<Self, PolygonError> {
        if dirs.len() < 2 {
            return Err(PolygonError::NonSpanning);
        }
        Ok(PolygonSpec { dirs })
    }

    /// Convenience: normalize then validate.
    pub fn from_raw(inputs: &[(Rat, Rat)]) -> Result<Self, PolygonError> {
        PolygonSpec::new(normalize_directions(inputs)?)
    }

    pub fn directions(&self) -> &[Direction] {
        self.dirs.directions()
    }

    pub fn face_count(&self) -> usize {
        self.dirs.len()
    }

    /// The `2m` signed generators `q_0, …, q_{m-1}, -q_0, …, -q_{m-1}`,
    /// which in this order run clockwise around the full circle.
    fn signed_q(&self) -> Vec<(Rat, Rat)> {
        let m = self.face_count();
        let mut out = Vec::with_capacity(2 * m);
        for d in self.directions() {
            out.push(d.q());
        }
        for j in 0..m {
            let (x, y) = &out[j];
            let neg = (-x.clone(), -y.clone());
            out.push(neg);
        }
        out
    }

    /// Vertices of `P = {p : max_i |q_i · p| ≤ 1}`, clockwise, length `2m`.
    ///
    /// Vertex `j` solves `Q_j · v = Q_{j+1} · v = 1` for angularly adjacent
    /// signed generators; construction fails unless every other constraint
    /// holds *strictly* at every vertex, because the downstream correctors
    /// need positive margin on all inactive faces.
    pub fn vertices(&self) -> Result<Vec<Vertex>, PolygonError> {
        let m = self.face_count();
        let q = self.signed_q();
        let one = Rat::from_integer(BigInt::from(1));
        let mut out = Vec::with_capacity(2 * m);
        for j in 0..2 * m {
            let jn = (j + 1) % (2 * m);
            let (ax, ay) = &q[j];
            let (bx, by) = &q[jn];
            let det = ax * by - ay * bx;
            if det.is_zero() {
                return Err(PolygonError::DegenerateVertex(j % m, jn % m));
            }
            // Cramer for ax·x + ay·y = 1, bx·x + by·y = 1.
            let vx = (by - ay) / &det;
            let vy = (ax - bx) / &det;
            for (k, (kx, ky)) in q.iter().enumerate().take(m) {
                if k == j % m || k == jn % m {
                    continue;
                }
                let val = (kx * &vx + ky * &vy).abs();
                if val >= one {
                    return Err(PolygonError::StrictnessViolation {
                        f0: j % m,
                        f1: jn % m,
                        offender: k,
                        value: val.to_f64().unwrap_or(f64::NAN),
                    });
                }
            }
            out.push(Vertex {
                point: (vx, vy),
                faces: (j % m, jn % m),
                signs: (
                    if j < m { 1 } else { -1 },
                    if jn < m { 1 } else { -1 },
                ),
            });
        }
        Ok(out)
    }

    /// Support function of the generator hull `conv{±q_i}` at `dir`:
    /// `max_i |q_i · dir|`. Exact.
    pub fn support(&self, dir: &(Rat, Rat)) -> Rat {
        let mut best = Rat::zero();
        for d in self.directions() {
            let (qx, qy) = d.q();
            let val = (&qx * &dir.0 + &qy * &dir.1).abs();
            if val > best {
                best = val;
            }
        }
        best
    }

    /// Vertices of the constraint polygon as floats, clockwise.
    pub fn constraint_polygon_f64(&self) -> Result<Vec<Vec2>, PolygonError> {
        Ok(self.vertices()?.iter().map(|v| v.point_f64()).collect())
    }

    /// Vertices of the generator hull as floats (convex hull of `±q_i`).
    pub fn generator_hull_f64(&self) -> Vec<Vec2> {
        let mut pts = Vec::with_capacity(2 * self.face_count());
        for d in self.directions() {
            let q = d.q_f64();
            pts.push(q);
            pts.push(-q);
        }
        convex_hull(&pts)
    }

    /// Margins `1 - |q_k · v|` for all inactive faces at a vertex (f64).
    /// Strictly positive by construction of [`Self::vertices`].
    pub fn margins(&self, vertex: &Vertex) -> Vec<f64> {
        let p = vertex.point_f64();
        self.directions()
            .iter()
            .enumerate()
            .filter(|(k, _)| *k != vertex.faces.0 && *k != vertex.faces.1)
            .map(|(_, d)| 1.0 - d.q_f64().dot(p).abs())
            .collect()
    }
}

/// Parse a rational from `"p/q"` or a plain integer string.
pub fn parse_rational(s: &str) -> Result<Rat, PolygonError> {
    Rat::from_str(s.trim()).map_err(|_| PolygonError::BadRational(s.to_string()))
}

/// Parse a direction from `"p/q,r/s"` (either component may be an integer).
pub fn parse_direction(s: &str) -> Result<(Rat, Rat), PolygonError> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != 2 {
        return Err(PolygonError::BadDirection(s.to_string()));
    }
    Ok((parse_rational(parts[0])?, parse_rational(parts[1])?))
}

// ---------------------------------------------------------------------------
// Float convex geometry for measured bodies.
//
// The homogenization side produces approximate unit balls as float point
// clouds; everything below is the small toolkit needed to compare those with
// the exact bodies above: hulls, support values, polar duals, and Hausdorff
// distances between convex polygons.
// ---------------------------------------------------------------------------

/// Andrew's monotone chain. Returns the hull counterclockwise with collinear
/// points dropped. Fewer than three non-collinear points yield the obvious
/// degenerate list (point or segment).
pub fn convex_hull(points: &[Vec2]) -> Vec<Vec2> {
    let mut pts: Vec<Vec2> = points.to_vec();
    pts.sort_by(|p, q| {
        p.x.partial_cmp(&q.x)
            .unwrap()
            .then(p.y.partial_cmp(&q.y).unwrap())
    });
    pts.dedup();
    if pts.len() <= 2 {
        return pts;
    }
    let build = |iter: &mut dyn Iterator<Item = Vec2>| {
        let mut chain: Vec<Vec2> = Vec::new();
        for p in iter {
            while chain.len() >= 2 {
                let a = chain[chain.len() - 2];
                let b = chain[chain.len() - 1];
                // Keep only strict left turns: collinear points are dropped.
                if (b - a).cross(p - a) <= 0.0 {
                    chain.pop();
                } else {
                    break;
                }
            }
            chain.push(p);
        }
        chain
    };
    let lower = build(&mut pts.iter().copied());
    let upper = build(&mut pts.iter().rev().copied());
    let mut hull = lower;
    hull.pop();
    hull.extend(upper.iter().take(upper.len().saturating_sub(1)));
    hull
}

/// Support value `max_v v · dir` over a point cloud. Callers pass symmetric
/// clouds (both signs present) when they mean the symmetric body.
pub fn support_value(points: &[Vec2], dir: Vec2) -> f64 {
    points
        .iter()
        .map(|p| p.dot(dir))
        .fold(f64::NEG_INFINITY, f64::max)
}

/// Polar dual `{w : w · v ≤ 1 ∀v}` of a convex polygon given by its vertices
/// in counterclockwise order with the origin strictly inside. The dual vertex
/// for edge `(v_i, v_{i+1})` solves `w · v_i = w · v_{i+1} = 1`; the result
/// is again counterclockwise.
pub fn dual_body(hull: &[Vec2]) -> Result<Vec<Vec2>, PolygonError> {
    let n = hull.len();
    if n < 3 {
        return Err(PolygonError::OriginNotInterior);
    }
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let a = hull[i];
        let b = hull[(i + 1) % n];
        // Positive cross for every edge == origin strictly inside a CCW hull.
        let det = a.cross(b);
        if det <= 0.0 {
            return Err(PolygonError::OriginNotInterior);
        }
        out.push(v2((b.y - a.y) / det, (a.x - b.x) / det));
    }
    Ok(out)
}

/// Distance from a point to a convex polygon (as a closed convex set):
/// zero inside, min over edge segments outside. Works for degenerate
/// (point/segment) "polygons" too.
pub fn dist_point_convex(p: Vec2, poly: &[Vec2]) -> f64 {
    match poly.len() {
        0 => f64::INFINITY,
        1 => p.dist(poly[0]),
        2 => dist_point_segment(p, poly[0], poly[1]),
        n => {
            let mut pos = false;
            let mut neg = false;
            let mut best = f64::INFINITY;
            for i in 0..n {
                let a = poly[i];
                let b = poly[(i + 1) % n];
                let s = (b - a).cross(p - a);
                pos |= s > 0.0;
                neg |= s < 0.0;
                best = best.min(dist_point_segment(p, a, b));
            }
            // Strictly one-sided w.r.t. every edge => inside (either
            // orientation); mixed signs => outside, use the edge minimum.
            if pos && neg {
                best
            } else {
                0.0
            }
        }
    }
}

fn dist_point_segment(p: Vec2, a: Vec2, b: Vec2) -> f64 {
    let ab = b - a;
    let len_sq = ab.norm_sq();
    if len_sq == 0.0 {
        return p.dist(a);
    }
    let t = ((p - a).dot(ab) / len_sq).clamp(0.0, 1.0);
    p.dist(a + ab * t)
}

/// Hausdorff distance between two convex polygons (vertex lists in either
/// orientation). For convex sets the supremum over each set is attained at a
/// vertex, so scanning vertices is exact.
pub fn hausdorff(a: &[Vec2], b: &[Vec2]) -> f64 {
    let one_way = |from: &[Vec2], to: &[Vec2]| {
        from.iter()
            .map(|p| dist_point_convex(*p, to))
            .fold(0.0, f64::max)
    };
    one_way(a, b).max(one_way(b, a))
}
