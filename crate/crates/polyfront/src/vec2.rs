//! Plane vectors and 2×2 matrices.
//!
//! Purpose
//! - Minimal f64 linear algebra for the geometry and PDE modules: dot/cross,
//!   rotations, similarity frames, and exact-ish 2×2 solves.
//!
//! Why hand-rolled
//! - Everything downstream needs only `Vec2`/`Mat2` with a handful of ops, and
//!   the solver hot loops benefit from `Copy` types with no generic overhead.
//!   The exact rational work lives in `polygon`; this file is float-only.

use serde::{Deserialize, Serialize};
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub, SubAssign};

/// A point or vector in the plane.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Vec2 {
    pub x: f64,
    pub y: f64,
}

/// Shorthand constructor.
#[inline]
pub const fn v2(x: f64, y: f64) -> Vec2 {
    Vec2 { x, y }
}

impl Vec2 {
    pub const ZERO: Vec2 = v2(0.0, 0.0);
    pub const EX: Vec2 = v2(1.0, 0.0);
    pub const EY: Vec2 = v2(0.0, 1.0);

    #[inline]
    pub fn dot(self, o: Vec2) -> f64 {
        self.x * o.x + self.y * o.y
    }

    /// Signed parallelogram area; positive when `o` is counterclockwise of `self`.
    #[inline]
    pub fn cross(self, o: Vec2) -> f64 {
        self.x * o.y - self.y * o.x
    }

    /// Counterclockwise quarter turn.
    #[inline]
    pub fn perp(self) -> Vec2 {
        v2(-self.y, self.x)
    }

    #[inline]
    pub fn norm_sq(self) -> f64 {
        self.dot(self)
    }

    #[inline]
    pub fn norm(self) -> f64 {
        self.norm_sq().sqrt()
    }

    /// Unit vector in the same direction. Zero input yields NaNs; callers
    /// guard (all our directions are nonzero by construction).
    #[inline]
    pub fn normalized(self) -> Vec2 {
        self / self.norm()
    }

    #[inline]
    pub fn dist(self, o: Vec2) -> f64 {
        (self - o).norm()
    }

    #[inline]
    pub fn lerp(self, o: Vec2, t: f64) -> Vec2 {
        self + (o - self) * t
    }

    /// Angle in (-π, π] measured from the positive x-axis.
    #[inline]
    pub fn angle(self) -> f64 {
        self.y.atan2(self.x)
    }

    /// Unit vector at the given angle.
    #[inline]
    pub fn from_angle(theta: f64) -> Vec2 {
        v2(theta.cos(), theta.sin())
    }
}

impl Add for Vec2 {
    type Output = Vec2;
    #[inline]
    fn add(self, o: Vec2) -> Vec2 {
        v2(self.x + o.x, self.y + o.y)
    }
}

impl Sub for Vec2 {
    type Output = Vec2;
    #[inline]
    fn sub(self, o: Vec2) -> Vec2 {
        v2(self.x - o.x, self.y - o.y)
    }
}

impl Neg for Vec2 {
    type Output = Vec2;
    #[inline]
    fn neg(self) -> Vec2 {
        v2(-self.x, -self.y)
    }
}

impl Mul<f64> for Vec2 {
    type Output = Vec2;
    #[inline]
    fn mul(self, s: f64) -> Vec2 {
        v2(self.x * s, self.y * s)
    }
}

impl Div<f64> for Vec2 {
    type Output = Vec2;
    #[inline]
    fn div(self, s: f64) -> Vec2 {
        v2(self.x / s, self.y / s)
    }
}

impl AddAssign for Vec2 {
    #[inline]
    fn add_assign(&mut self, o: Vec2) {
        *self = *self + o;
    }
}

impl SubAssign for Vec2 {
    #[inline]
    fn sub_assign(&mut self, o: Vec2) {
        *self = *self - o;
    }
}

/// Column-major 2×2 matrix: `M = [a c; b d]`, i.e. columns `(a,b)` and `(c,d)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Mat2 {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

impl Mat2 {
    #[inline]
    pub fn from_cols(col0: Vec2, col1: Vec2) -> Mat2 {
        Mat2 {
            a: col0.x,
            b: col0.y,
            c: col1.x,
            d: col1.y,
        }
    }

    /// Rotation by `theta` (counterclockwise).
    #[inline]
    pub fn rotation(theta: f64) -> Mat2 {
        let (s, c) = theta.sin_cos();
        Mat2 {
            a: c,
            b: s,
            c: -s,
            d: c,
        }
    }

    /// Similarity taking `e_x` to `scale * dir` with `dir` a unit vector:
    /// rotation composed with uniform scaling. Used for the local frames at
    /// network crossings, which must be conformal so that `|D(u ∘ A⁻¹)|`
    /// rescales isotropically.
    #[inline]
    pub fn similarity(dir: Vec2, scale: f64) -> Mat2 {
        Mat2::from_cols(dir * scale, dir.perp() * scale)
    }

    #[inline]
    pub fn det(self) -> f64 {
        self.a * self.d - self.b * self.c
    }

    #[inline]
    pub fn mul_vec(self, v: Vec2) -> Vec2 {
        v2(self.a * v.x + self.c * v.y, self.b * v.x + self.d * v.y)
    }

    /// Inverse; caller guarantees `det != 0` (our frames are similarities
    /// with positive scale).
    #[inline]
    pub fn inverse(self) -> Mat2 {
        let inv_det = 1.0 / self.det();
        Mat2 {
            a: self.d * inv_det,
            b: -self.b * inv_det,
            c: -self.c * inv_det,
            d: self.a * inv_det,
        }
    }

    #[inline]
    pub fn transpose(self) -> Mat2 {
        Mat2 {
            a: self.a,
            b: self.c,
            c: self.b,
            d: self.d,
        }
    }
}

/// Solve `[r0; r1] w = (b0, b1)` for `w`, rows given as vectors.
/// Returns `None` when the rows are (numerically) parallel.
#[inline]
pub fn solve_rows(r0: Vec2, r1: Vec2, b0: f64, b1: f64) -> Option<Vec2> {
    let det = r0.cross(r1);
    if det == 0.0 || !det.is_finite() {
        return None;
    }
    // Cramer on the transposed system: w = (b0*r1 - b1*r0).perp-ish; spelled
    // out to keep signs auditable.
    let x = (b0 * r1.y - b1 * r0.y) / det;
    let y = (b1 * r0.x - b0 * r1.x) / det;
    Some(v2(x, y))
}
