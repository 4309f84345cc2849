//! Closed-form crossing potential.
//!
//! Purpose: the local model for one crossing is the potential
//!
//! ```text
//!     u(x₁, x₂) = C · (x₁⁴ᵏ/C + x₂²)^(1 − 1/4k) + 2x₁
//! ```
//!
//! whose gradient field is smooth away from the origin, equals (2, 0) at the
//! origin, and is exactly Hölder-(1 − 1/2k) there in the transverse
//! direction. Perturbed curves ride this field through a crossing; the speed
//! synthesis divides by its magnitude; the Hölder probe measures its
//! exponent. Everything downstream leans on the closed forms here.
//!
//! Why this design: value and gradient are evaluated from the power rule
//! directly — no interpolation, no tables — so the many consumers (flow
//! tracing, tube calibration, certificates) agree to machine precision. The
//! only numerical routine in this module is a one-dimensional quadrature for
//! the transverse crossing cost, which has no elementary antiderivative for
//! k ≥ 2.

use super::NetworkError;
use crate::quad::adaptive_simpson;
use crate::vec2::{v2, Vec2};

/// Tolerance for the crossing-cost quadrature. The weighted-period
/// certificates compare integrals against rational targets at 1e−8; two
/// orders below that keeps quadrature error invisible.
const CROSSING_COST_TOL: f64 = 1e-12;

/// Validity threshold for the potential constant: C must exceed 2k(4k+1)
/// for the backward-flow cone {0 < x₂ < x₁²ᵏ} to be invariant.
pub fn min_constant(k: u32) -> f64 {
    (2 * k * (4 * k + 1)) as f64
}

/// The model potential at one crossing, in its own frame: the principal
/// line is the x₁-axis, the crossing sits at the origin.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ModelPotential {
    k: u32,
    c: f64,
}

impl ModelPotential {
    /// Requires k ≥ 1 and C > 2k(4k+1).
    pub fn new(k: u32, c: f64) -> Result<Self, NetworkError> {
        assert!(k >= 1, "Hölder index k must be at least 1");
        let min = min_constant(k);
        if !(c > min) {
            return Err(NetworkError::BadConstant { k, c, min });
        }
        Ok(ModelPotential { k, c })
    }

    /// Smallest admissible integer constant: 2k(4k+1) + 1.
    pub fn with_default_constant(k: u32) -> Self {
        ModelPotential::new(k, min_constant(k) + 1.0).expect("threshold + 1 is valid")
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    /// Outer exponent 1 − 1/4k.
    pub fn outer_exponent(&self) -> f64 {
        1.0 - 1.0 / (4.0 * self.k as f64)
    }

    /// The gradient's transverse Hölder exponent at the origin, 1 − 1/2k.
    pub fn holder_exponent(&self) -> f64 {
        1.0 - 1.0 / (2.0 * self.k as f64)
    }

    /// Coefficient of the transverse Hölder law: |Du(0,t) − Du(0,0)| equals
    /// 2(1 − 1/4k)·C·|t|^(1−1/2k) exactly.
    pub fn holder_coeff(&self) -> f64 {
        2.0 * self.outer_exponent() * self.c
    }

    /// S(x) = x₁⁴ᵏ/C + x₂², the radial bracket of the potential.
    fn s_aux(&self, x: Vec2) -> f64 {
        x.x.powi(4 * self.k as i32) / self.c + x.y * x.y
    }

    /// Exact relative rate of the transverse gradient component:
    /// ∂₂u(x) = transverse_rate(x) · x₂ identically, so along an integral
    /// curve the off-axis coordinate contracts (backward) or expands
    /// (forward) at this instantaneous rate. Blows up like 1/|x₁| on the
    /// axis toward the origin — integrators must bound rate·h.
    pub fn transverse_rate(&self, x: Vec2) -> f64 {
        let s = self.s_aux(x);
        if s == 0.0 {
            return f64::INFINITY;
        }
        self.holder_coeff() * s.powf(-1.0 / (4.0 * self.k as f64))
    }

    pub fn value(&self, x: Vec2) -> f64 {
        self.c * self.s_aux(x).powf(self.outer_exponent()) + 2.0 * x.x
    }

    /// Du, closed form. At the origin all power terms vanish and Du = (2, 0).
    pub fn grad(&self, x: Vec2) -> Vec2 {
        let s = self.s_aux(x);
        if s == 0.0 {
            return v2(2.0, 0.0);
        }
        let k = self.k as f64;
        // S^(E−1) with E = 1 − 1/4k, i.e. S^(−1/4k).
        let w = s.powf(-1.0 / (4.0 * k));
        let gx = (4.0 * k - 1.0) * x.x.powi(4 * self.k as i32 - 1) * w + 2.0;
        let gy = 2.0 * self.outer_exponent() * self.c * x.y * w;
        v2(gx, gy)
    }

    /// |Du|.
    pub fn speed(&self, x: Vec2) -> f64 {
        self.grad(x).norm()
    }

    /// u(s, 0) in closed form: C^(1/4k)·|s|^(4k−1) + 2s. The bracket S is
    /// even in s, so the power term keeps no sign.
    pub fn axis_value(&self, s: f64) -> f64 {
        self.c.powf(1.0 / (4.0 * self.k as f64)) * s.abs().powi(4 * self.k as i32 - 1) + 2.0 * s
    }

    /// |∂₁u(s, 0)| = |(4k−1)·C^(1/4k)·sign(s)·|s|^(4k−2) + 2|: the power term
    /// is odd in s, which is what creates the upstream stall point.
    pub fn axis_speed(&self, s: f64) -> f64 {
        let k = self.k as f64;
        let term =
            (4.0 * k - 1.0) * self.c.powf(1.0 / (4.0 * k)) * s.powi(4 * self.k as i32 - 2);
        (term * s.signum() + 2.0).abs()
    }

    /// Signed transverse gradient component Q(0, t) =
    /// 2(1 − 1/4k)·C·sign(t)·|t|^(1−1/2k). ∂₁u(0, t) = 2 for every t, so the
    /// transverse deviation of Du from its origin value is exactly this.
    pub fn transverse_grad(&self, t: f64) -> f64 {
        if t == 0.0 {
            return 0.0;
        }
        self.holder_coeff() * t.signum() * t.abs().powf(self.holder_exponent())
    }

    /// |Du(0, t)| = √(4 + Q(0,t)²).
    pub fn transverse_speed(&self, t: f64) -> f64 {
        let q = self.transverse_grad(t);
        (4.0 + q * q).sqrt()
    }

    /// ∫₀ʳ |Du(0, t)| dt — the one-sided cost of crossing the ball along the
    /// transverse axis at unit speed limit. The integrand has a √-type kink
    /// at t = 0 only for the *two-sided* integral; on [0, r] it is smooth
    /// enough for adaptive refinement. No elementary antiderivative exists
    /// for k ≥ 2, so this is quadrature for all k (tested against the k = 1
    /// closed form).
    pub fn crossing_cost(&self, r: f64) -> f64 {
        assert!(r >= 0.0);
        adaptive_simpson(|t| self.transverse_speed(t), 0.0, r, CROSSING_COST_TOL)
    }

    /// Upstream stall radius: the unique s > 0 with ∂₁u(−s, 0) = 0, i.e.
    /// (2 / ((4k−1)·C^(1/4k)))^(1/(4k−2)). The field vanishes there; every
    /// crossing ball must stay well inside this radius.
    pub fn stall_radius(&self) -> f64 {
        let k = self.k as f64;
        (2.0 / ((4.0 * k - 1.0) * self.c.powf(1.0 / (4.0 * k)))).powf(1.0 / (4.0 * k - 2.0))
    }
}
