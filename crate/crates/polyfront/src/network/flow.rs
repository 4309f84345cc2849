//! Gradient-flow tracing for the crossing potential.
//!
//! Purpose: integral curves of ±Du are the raw material for everything the
//! crossing model promises — the principal axis flow, the backward flows
//! that exhibit infinitely many distinct curves through the origin, and the
//! shooting construction that picks one of them. The tracer is an RKF45
//! integrator with origin-specific guards a classical controller lacks: a
//! step cap proportional to the remaining distance (so arrival is never
//! skated over), a step cap on the transverse contraction rate (so the
//! collapsed off-axis component decays monotonically instead of fluttering
//! in sign below the error tolerance), and a power-law step floor where Du
//! is only Hölder and error control would shrink the step to nothing
//! chasing accuracy that does not exist.
//!
//! Why this design: the field is smooth away from the origin, so adaptive
//! error control does the work almost everywhere; the guards only engage in
//! the terminal approach, where trajectories have already collapsed onto the
//! axis and the only job left is to cover the last distance to the
//! origin-arrival test. Traces store position and exact field velocity at
//! every accepted step, so consumers (splice checks, CSV dumps, the
//! multiplicity certificate) never re-derive tangents from differences.

use super::potential::ModelPotential;
use super::NetworkError;
use crate::vec2::{v2, Vec2};

/// Maximum step, model units. The model ball has unit scale; larger steps
/// would skate past the termination checks between samples.
const H_MAX: f64 = 0.02;

/// Step floor coefficient: h ≥ 3e−5 · min(1, |x|)^(1/2k). Below this scale
/// the field's Hölder modulus dominates the local error estimate and
/// shrinking the step buys nothing; trajectories here are glued to the axis
/// and terminate within a few thousand steps.
const STEP_FLOOR_COEFF: f64 = 3e-5;

/// Inside this radius the step floor is expected to engage; outside it, a
/// floored step that still fails its error test is an integrator failure.
const ORIGIN_GUARD: f64 = 1e-3;

/// Transverse coordinates below this magnitude are snapped to the axis,
/// which is exactly invariant under the flow. This absorbs the harmless
/// sign-flutter of a double-exponentially collapsing component (it reaches
/// 1e−100 and below while the trace is still far from the origin) and keeps
/// the cone membership checks meaningful.
const AXIS_SNAP_EPS: f64 = 1e-60;

/// Traversal direction: forward rides +Du (u increasing), backward −Du.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FlowDir {
    Forward,
    Backward,
}

/// Which side of the axis a through-flow should occupy.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    Upper,
    Lower,
}

/// Why a trace stopped.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Termination {
    /// |x| fell to the origin tolerance.
    Origin,
    /// |x| reached the ball radius; the final point is backtracked onto the
    /// circle.
    BallExit,
    /// Integration time reached the requested span.
    SpanEnd,
    /// x₁ fell below the configured upstream stop.
    UpstreamExit,
    /// Step budget exhausted before any other stop fired.
    StepLimit,
}

#[derive(Clone, Copy, Debug)]
pub struct TraceOptions {
    /// Total integration time (in the potential's natural time, ẋ = ±Du).
    pub span: f64,
    /// Local error tolerance, scaled by (1 + |x|).
    pub tol: f64,
    /// Origin arrival radius.
    pub origin_tol: f64,
    /// Stop when |x| reaches this radius, if set.
    pub ball_radius: Option<f64>,
    /// Stop when x₁ falls below this, if set. Used by shooting classifiers:
    /// once a backward trace is upstream of the origin it can never return
    /// (ẋ₁ = −∂₁u < 0 there, all the way to the stall point), so a definite
    /// miss can be declared without integrating into the stall attractor.
    pub upstream_stop: Option<f64>,
    pub max_steps: usize,
}

impl Default for TraceOptions {
    fn default() -> Self {
        TraceOptions {
            span: f64::INFINITY,
            tol: 1e-10,
            origin_tol: 1e-6,
            ball_radius: None,
            upstream_stop: None,
            max_steps: 2_000_000,
        }
    }
}

/// A traced integral curve: positions, exact field velocities, times.
#[derive(Clone, Debug)]
pub struct FlowTrace {
    pub t: Vec<f64>,
    pub x: Vec<Vec2>,
    /// ξ̇ at each sample — ±Du(ξ) evaluated exactly, not differenced.
    pub v: Vec<Vec2>,
    pub termination: Termination,
}

impl FlowTrace {
    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }

    pub fn start(&self) -> Vec2 {
        self.x[0]
    }

    pub fn end(&self) -> Vec2 {
        *self.x.last().expect("trace has at least its start point")
    }

    /// Height of the (piecewise-linear) trace where it crosses the vertical
    /// section x₁ = `s`, if it does.
    pub fn height_at_section(&self, s: f64) -> Option<f64> {
        for w in self.x.windows(2) {
            let (a, b) = (w[0], w[1]);
            if (a.x - s) * (b.x - s) <= 0.0 && a.x != b.x {
                let f = (s - a.x) / (b.x - a.x);
                return Some(a.y + f * (b.y - a.y));
            }
        }
        None
    }

    /// The same curve traversed in the opposite direction: sample order and
    /// velocities flip, times re-anchor at the old endpoint. The termination
    /// tag still describes the original integration.
    pub fn reversed(mut self) -> FlowTrace {
        let t_end = *self.t.last().expect("nonempty");
        self.x.reverse();
        self.v.reverse();
        for v in &mut self.v {
            *v = -*v;
        }
        self.t.reverse();
        for t in &mut self.t {
            *t = t_end - *t;
        }
        self
    }
}

/// Integrate ξ̇ = ±Du(ξ) from `start` for time `span` at tolerance `tol`,
/// with default origin arrival (1e−6) and no ball stop.
pub fn trace_flow(
    pot: &ModelPotential,
    start: Vec2,
    dir: FlowDir,
    span: f64,
    tol: f64,
) -> Result<FlowTrace, NetworkError> {
    trace_flow_opts(
        pot,
        start,
        dir,
        &TraceOptions {
            span,
            tol,
            ..TraceOptions::default()
        },
    )
}

/// Full-control variant of [`trace_flow`].
pub fn trace_flow_opts(
    pot: &ModelPotential,
    start: Vec2,
    dir: FlowDir,
    opts: &TraceOptions,
) -> Result<FlowTrace, NetworkError> {
    let sign = match dir {
        FlowDir::Forward => 1.0,
        FlowDir::Backward => -1.0,
    };
    let f = |x: Vec2| pot.grad(x) * sign;
    let inv_2k = 1.0 / (2.0 * pot.k() as f64);

    let mut t = 0.0;
    let mut x = start;
    let mut ts = vec![0.0];
    let mut xs = vec![x];
    let mut vs = vec![f(x)];
    let mut h: f64 = 1e-4;

    let termination = loop {
        let dist = x.norm();
        if dist <= opts.origin_tol {
            break Termination::Origin;
        }
        if let Some(r) = opts.ball_radius {
            if dist >= r && xs.len() > 1 {
                // Backtrack the last segment onto the circle |x| = r.
                let a = xs[xs.len() - 2];
                let d = x - a;
                let (aa, ab, bb) = (d.norm_sq(), a.dot(d), a.norm_sq() - r * r);
                let disc = (ab * ab - aa * bb).max(0.0);
                let s = ((-ab + disc.sqrt()) / aa).clamp(0.0, 1.0);
                let xb = a + d * s;
                let n = xs.len();
                xs[n - 1] = xb;
                vs[n - 1] = f(xb);
                ts[n - 1] = ts[n - 2] + s * (ts[n - 1] - ts[n - 2]);
                break Termination::BallExit;
            }
        }
        if t >= opts.span {
            break Termination::SpanEnd;
        }
        if let Some(s) = opts.upstream_stop {
            if x.x < s {
                break Termination::UpstreamExit;
            }
        }
        if xs.len() >= opts.max_steps {
            break Termination::StepLimit;
        }

        // Two step caps guard the origin approach, where the error estimator
        // alone fails. Distance cap: the flow is smooth straight through the
        // arrival ball along the axis, so nothing in the local error stops a
        // step from skating past it into the stall attractor behind; never
        // move more than ~20% of the remaining distance. Transverse cap: the
        // off-axis component contracts at rate(x) per unit time, and the
        // distance cap alone pins rate·h near 3, where the RKF45 stability
        // multiplier is negative — a collapsed component below the error
        // tolerance would flutter in sign across the axis. rate·h ≤ 1.5
        // keeps the multiplier positive (the rate grows at most ~25% within
        // a capped step, staying under the ≈2.3 sign change).
        let speed = vs.last().expect("nonempty").norm();
        let h_cap = (0.2 * dist / speed.max(1e-12))
            .min(1.5 / pot.transverse_rate(x))
            .min(H_MAX);
        let upper = if opts.span.is_finite() {
            h_cap.min(opts.span - t)
        } else {
            h_cap
        };
        let lower = (STEP_FLOOR_COEFF * dist.min(1.0).powf(inv_2k)).min(upper);
        loop {
            h = h.clamp(lower, upper);
            let (x_new, err) = rkf45_step(&f, x, h);
            if !err.is_finite() {
                return Err(NetworkError::StepCollapse {
                    x: x.x,
                    y: x.y,
                    dist,
                });
            }
            let tol_sc = opts.tol * (1.0 + dist);
            let at_floor = h <= lower * (1.0 + 1e-9);
            if err <= tol_sc || at_floor {
                if at_floor && dist > ORIGIN_GUARD && err > 1e6 * tol_sc {
                    return Err(NetworkError::StepCollapse {
                        x: x.x,
                        y: x.y,
                        dist,
                    });
                }
                t += h;
                x = x_new;
                if x.y.abs() < AXIS_SNAP_EPS {
                    // The axis is exactly invariant; see AXIS_SNAP_EPS.
                    x.y = 0.0;
                }
                ts.push(t);
                xs.push(x);
                vs.push(f(x));
                let grow = if err > 0.0 {
                    (0.9 * (tol_sc / err).powf(0.2)).clamp(0.2, 4.0)
                } else {
                    4.0
                };
                h = (h * grow).min(H_MAX);
                break;
            }
            h = (0.9 * h * (tol_sc / err).powf(0.25)).max(lower);
        }
    };

    Ok(FlowTrace {
        t: ts,
        x: xs,
        v: vs,
        termination,
    })
}

/// One Runge–Kutta–Fehlberg 4(5) step: returns the 5th-order solution and
/// the |y5 − y4| error estimate.
fn rkf45_step(f: &impl Fn(Vec2) -> Vec2, x: Vec2, h: f64) -> (Vec2, f64) {
    let k1 = f(x);
    let k2 = f(x + k1 * (h * 0.25));
    let k3 = f(x + (k1 * (3.0 / 32.0) + k2 * (9.0 / 32.0)) * h);
    let k4 = f(x
        + (k1 * (1932.0 / 2197.0) - k2 * (7200.0 / 2197.0) + k3 * (7296.0 / 2197.0)) * h);
    let k5 = f(x
        + (k1 * (439.0 / 216.0) - k2 * 8.0 + k3 * (3680.0 / 513.0) - k4 * (845.0 / 4104.0)) * h);
    let k6 = f(x
        + (-k1 * (8.0 / 27.0) + k2 * 2.0 - k3 * (3544.0 / 2565.0) + k4 * (1859.0 / 4104.0)
            - k5 * (11.0 / 40.0))
            * h);
    let y4 = x
        + (k1 * (25.0 / 216.0) + k3 * (1408.0 / 2565.0) + k4 * (2197.0 / 4104.0) - k5 * 0.2) * h;
    let y5 = x
        + (k1 * (16.0 / 135.0) + k3 * (6656.0 / 12825.0) + k4 * (28561.0 / 56430.0)
            - k5 * (9.0 / 50.0)
            + k6 * (2.0 / 55.0))
            * h;
    (y5, (y5 - y4).norm())
}

/// Backward trace from the ball-boundary point at height `h` (arc position
/// (√(r²−h²), ±h)), reversed into forward orientation if it reaches the
/// origin. Errors with `BisectionFailure` if it misses.
pub fn through_flow_at_entry(
    pot: &ModelPotential,
    side: Side,
    r: f64,
    h: f64,
    origin_tol: f64,
) -> Result<FlowTrace, NetworkError> {
    let (class, trace) = classify_entry(pot, side, r, h, origin_tol)?;
    match class {
        EntryClass::Hit => Ok(trace.reversed()),
        EntryClass::Miss => Err(NetworkError::BisectionFailure {
            context: format!("entry height {h} at radius {r} misses the origin"),
        }),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum EntryClass {
    Hit,
    Miss,
}

fn classify_entry(
    pot: &ModelPotential,
    side: Side,
    r: f64,
    h: f64,
    origin_tol: f64,
) -> Result<(EntryClass, FlowTrace), NetworkError> {
    let sgn = match side {
        Side::Upper => 1.0,
        Side::Lower => -1.0,
    };
    let entry = v2((r * r - h * h).max(0.0).sqrt(), sgn * h);
    let trace = trace_flow_opts(
        pot,
        entry,
        FlowDir::Backward,
        &TraceOptions {
            tol: 1e-10,
            origin_tol,
            // Misses sweep upstream past x₁ = 0 and leave; give them room.
            ball_radius: Some(1.25 * r),
            // Upstream (x₁ < 0, backward time) the backward field has
            // ẋ₁ = −∂₁u < 0 near the axis: once a trace is meaningfully left
            // of the origin it can only drift further left (toward the stall
            // point), so crossing this line is a definitive miss.
            upstream_stop: Some(-0.05 * r),
            max_steps: 400_000,
            ..TraceOptions::default()
        },
    )?;
    match trace.termination {
        Termination::Origin => Ok((EntryClass::Hit, trace)),
        Termination::UpstreamExit => Ok((EntryClass::Miss, trace)),
        Termination::BallExit | Termination::StepLimit if trace.end().x < 0.0 => {
            Ok((EntryClass::Miss, trace))
        }
        other => Err(NetworkError::BisectionFailure {
            context: format!(
                "unclassifiable backward trace from height {h}: {:?} at ({:.3}, {:.3})",
                other,
                trace.end().x,
                trace.end().y
            ),
        }),
    }
}

/// A gradient flow through the origin distinct from the axis flow, on the
/// requested side, found by bisection shooting on the entry height along the
/// ball boundary: low entries collapse onto the axis and reach the origin,
/// high entries sweep past above it. The returned trace is forward-oriented
/// (origin outward), tangent to the axis at the origin.
///
/// `r` must lie strictly inside the stall radius — beyond it the field
/// reverses on the negative axis and the hit/miss dichotomy breaks down.
pub fn secondary_flow_through(
    pot: &ModelPotential,
    side: Side,
    r: f64,
    origin_tol: f64,
) -> Result<FlowTrace, NetworkError> {
    if !(r > 0.0 && r < pot.stall_radius()) {
        return Err(NetworkError::BisectionFailure {
            context: format!(
                "radius {r} outside (0, stall radius {:.4})",
                pot.stall_radius()
            ),
        });
    }
    let (mut lo, mut hi) = (0.0_f64, r * (1.0 - 1e-12));
    let (c_hi, _) = classify_entry(pot, side, r, hi, origin_tol)?;
    if c_hi != EntryClass::Miss {
        return Err(NetworkError::BisectionFailure {
            context: "top-of-ball entry did not miss; no bracket".into(),
        });
    }
    let mut best: Option<FlowTrace> = None;
    // Bisect to an interval of width 1e−10; each midpoint classification is
    // a full backward trace.
    while hi - lo > 1e-10 {
        let mid = 0.5 * (lo + hi);
        let (class, trace) = classify_entry(pot, side, r, mid, origin_tol)?;
        match class {
            EntryClass::Hit => {
                lo = mid;
                best = Some(trace);
            }
            EntryClass::Miss => hi = mid,
        }
    }
    let best = best.ok_or_else(|| NetworkError::BisectionFailure {
        context: "no hitting entry found above zero height".into(),
    })?;
    Ok(best.reversed())
}

/// Backward traces from `n` seeds spread over the open cone section at
/// x₁ = `x1_seed`: heights j·x1_seed^{2k}/(n+1), j = 1..n. Every trace
/// converges to the origin; together they witness the multiplicity of flows
/// through it. Seeds sit at the section rather than spread along the axis so
/// their mutual separations survive the backward contraction to any fixed
/// measurement section.
pub fn multiplicity_traces(
    pot: &ModelPotential,
    n: usize,
    x1_seed: f64,
    origin_tol: f64,
) -> Result<Vec<FlowTrace>, NetworkError> {
    let top = x1_seed.powi(2 * pot.k() as i32);
    (1..=n)
        .map(|j| {
            let y = top * j as f64 / (n + 1) as f64;
            trace_flow_opts(
                pot,
                v2(x1_seed, y),
                FlowDir::Backward,
                &TraceOptions {
                    origin_tol,
                    ..TraceOptions::default()
                },
            )
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pot11() -> ModelPotential {
        ModelPotential::new(1, 11.0).unwrap()
    }

    #[test]
    fn velocities_are_the_exact_field() {
        let p = pot11();
        let tr = trace_flow(&p, v2(0.3, 0.1), FlowDir::Forward, 0.05, 1e-10).unwrap();
        assert_eq!(tr.termination, Termination::SpanEnd);
        for (x, v) in tr.x.iter().zip(&tr.v) {
            assert!((*v - p.grad(*x)).norm() < 1e-15);
        }
        let tb = trace_flow(&p, v2(0.3, 0.1), FlowDir::Backward, 0.05, 1e-10).unwrap();
        for (x, v) in tb.x.iter().zip(&tb.v) {
            assert!((*v + p.grad(*x)).norm() < 1e-15);
        }
    }

    #[test]
    fn axis_trace_matches_scalar_ode_oracle() {
        // On the axis the flow reduces to f′ = 2 + C^(1/4k)(4k−1) f^(4k−2).
        // Independent oracle: classical RK4 on that scalar ODE at a step so
        // small its global error is far below the 1e−8 comparison.
        let p = pot11();
        let span = 0.2;
        let tr = trace_flow(&p, v2(1e-3, 0.0), FlowDir::Forward, span, 1e-12).unwrap();
        assert_eq!(tr.termination, Termination::SpanEnd);
        assert!(tr.x.iter().all(|q| q.y == 0.0), "axis is invariant");
        assert!((tr.t.last().unwrap() - span).abs() < 1e-12);

        let c14 = 11.0_f64.powf(0.25);
        let g = |f: f64| 2.0 + c14 * 3.0 * f * f;
        let n = 200_000;
        let h = span / n as f64;
        let mut f = 1e-3;
        for _ in 0..n {
            let k1 = g(f);
            let k2 = g(f + 0.5 * h * k1);
            let k3 = g(f + 0.5 * h * k2);
            let k4 = g(f + h * k3);
            f += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        }
        let got = tr.end().x;
        assert!((got - f).abs() < 1e-8, "trace {got} vs oracle {f}");
    }

    #[test]
    fn backward_trace_confined_to_the_cone() {
        // Seed (0.5, 0.2) lies in D = {0 < x₂ < x₁²}; the backward flow must
        // reach the origin without leaving D. The transverse component
        // collapses double-exponentially and is snapped to the (boundary)
        // axis once below 1e−60 — membership is checked with closure in x₂.
        let p = pot11();
        let tr = trace_flow(&p, v2(0.5, 0.2), FlowDir::Backward, f64::INFINITY, 1e-10).unwrap();
        assert_eq!(tr.termination, Termination::Origin);
        assert!(tr.end().norm() <= 1e-6);
        for q in &tr.x {
            assert!(q.x <= 0.5 + 1e-12 && q.x > -1e-12, "x₁ escaped: {}", q.x);
            assert!(q.y >= 0.0, "crossed the axis: {}", q.y);
            assert!(q.y <= q.x * q.x * (1.0 + 1e-9) + 1e-15, "left the cone");
        }
    }

    #[test]
    fn negative_axis_forward_flow_approaches_origin() {
        // Inside the stall radius the field on the negative axis points
        // toward the origin and the axis is invariant.
        let p = pot11();
        let tr = trace_flow(&p, v2(-0.3, 0.0), FlowDir::Forward, f64::INFINITY, 1e-10).unwrap();
        assert_eq!(tr.termination, Termination::Origin);
        assert!(tr.x.iter().all(|q| q.y == 0.0 && q.x <= -1e-7));
    }

    #[test]
    fn ball_exit_lands_on_the_circle() {
        let p = pot11();
        let tr = trace_flow_opts(
            &p,
            v2(0.1, 0.05),
            FlowDir::Forward,
            &TraceOptions {
                ball_radius: Some(0.3),
                ..TraceOptions::default()
            },
        )
        .unwrap();
        assert_eq!(tr.termination, Termination::BallExit);
        assert!((tr.end().norm() - 0.3).abs() < 1e-9);
    }

    #[test]
    fn secondary_flow_passes_through_origin_tangent_to_axis() {
        let p = pot11();
        let r = 0.5;
        let tr = secondary_flow_through(&p, Side::Upper, r, 1e-8).unwrap();
        // Forward-oriented: starts at the origin arrival point.
        assert!(tr.start().norm() <= 1e-8);
        // Tangent to the axis at the origin: the arrival happens glued to
        // the axis, so the outgoing velocity is essentially (2, 0).
        let v0 = tr.v[0];
        assert!(v0.x > 0.0);
        assert!((v0.y / v0.x).abs() < 1e-3, "tangent angle {}", v0.y / v0.x);
        // Distinct from the axis flow: strictly above it downstream. The
        // separatrix enters high on the circle (entry x₁ ≈ 0.33 r), so
        // measure at a section the trace certainly crosses.
        let y_mid = tr.height_at_section(0.2 * r).expect("crosses 0.2 r");
        assert!(y_mid > 0.0);
        // Ends back at its boundary entry.
        assert!((tr.end().norm() - r).abs() < 1e-6);
    }

    #[test]
    fn lower_side_mirrors_the_upper_flow() {
        let p = pot11();
        let up = secondary_flow_through(&p, Side::Upper, 0.4, 1e-8).unwrap();
        let dn = secondary_flow_through(&p, Side::Lower, 0.4, 1e-8).unwrap();
        // Section below the separatrix entry abscissa ≈ 0.33·0.4.
        let yu = up.height_at_section(0.08).unwrap();
        let yd = dn.height_at_section(0.08).unwrap();
        // The potential is even in x₂, so the two sides are exact mirrors.
        assert!((yu + yd).abs() < 1e-9, "{yu} vs {yd}");
    }

    #[test]
    fn distinct_entry_heights_give_distinct_flows() {
        // Entry points separated by more than r/10 along the boundary give
        // traces separated by at least 1e−6 at the half-radius section —
        // the backward contraction is strong but not degenerate.
        let p = pot11();
        let r = 0.5;
        let a = through_flow_at_entry(&p, Side::Upper, r, 0.10, 1e-8).unwrap();
        let b = through_flow_at_entry(&p, Side::Upper, r, 0.17, 1e-8).unwrap();
        let ya = a.height_at_section(r / 2.0).unwrap();
        let yb = b.height_at_section(r / 2.0).unwrap();
        assert!((ya - yb).abs() > 1e-6, "sep {}", (ya - yb).abs());
        assert!(ya > 0.0 && yb > 0.0);
    }

    #[test]
    fn multiplicity_family_reaches_origin_separated() {
        // Scaled-down version of the full multiplicity certificate (the
        // acceptance suite runs 20 seeds): every backward trace from the
        // seed section reaches the origin inside the cone, and the traces
        // remain pairwise separated at the measurement section x₁ = 0.5.
        let p = pot11();
        let traces = multiplicity_traces(&p, 8, 0.55, 1e-6).unwrap();
        let mut heights = Vec::new();
        for tr in &traces {
            assert_eq!(tr.termination, Termination::Origin);
            assert!(tr.end().norm() <= 1e-6);
            for q in &tr.x {
                assert!(q.y >= 0.0 && q.y <= q.x * q.x * (1.0 + 1e-9) + 1e-15);
            }
            heights.push(tr.height_at_section(0.5).expect("crosses 0.5"));
        }
        heights.sort_by(f64::total_cmp);
        for w in heights.windows(2) {
            assert!(w[1] - w[0] > 1e-4, "pairwise separation {}", w[1] - w[0]);
        }
    }

    #[test]
    fn radius_outside_stall_is_rejected() {
        let p = pot11();
        let err = secondary_flow_through(&p, Side::Upper, 0.7, 1e-8).unwrap_err();
        assert!(matches!(err, NetworkError::BisectionFailure { .. }));
    }
}
