//! Line placement and intersection enumeration, in exact rational
//! arithmetic.
//!
//! Purpose: the periodic network starts from one line per polygon direction,
//! translated over ℤ². Everything downstream — crossing frames, tube
//! geometry, grid solvers — keys off the intersection points of that
//! arrangement, so they are computed exactly: general position ("no three
//! lines through a point" on the torus) is an equality of rationals, which
//! floating point can certify only with an arbitrary threshold.
//!
//! Why this design: offsets are drawn on the 1/100 grid so that every line
//! of every placement lies on lattice rows of any grid whose spacing divides
//! 1/100 — the eikonal solvers then sample the fast tubes on-axis instead of
//! straddling them. The placement search walks a low-discrepancy (R-sequence)
//! candidate list seeded by the caller and keeps the candidate in general
//! position with the largest minimal intersection spacing `d`: a larger `d`
//! buys a larger perturbation radius and wider speed tubes later, at zero
//! cost here.

use num::{BigInt, FromPrimitive, Integer, Signed, ToPrimitive, Zero};

use super::NetworkError;
use crate::polygon::{PolygonSpec, Rat};
use crate::vec2::{v2, Vec2};

/// Offsets live on this grid (hundredths of the period).
pub const OFFSET_DENOM: i64 = 100;

/// Candidate offset tuples examined per placement before giving up.
const PLACEMENT_ATTEMPTS: usize = 64;

/// Default perturbation radius as a fraction of the minimal spacing. Any
/// value below d/10 keeps the perturbation balls disjoint with room for the
/// tube collars; d/20 leaves a 2× escalation ladder for splice retries.
const DEFAULT_RADIUS_FRACTION: f64 = 0.05;

fn rat_i64(n: i64, d: i64) -> Rat {
    Rat::new(BigInt::from(n), BigInt::from(d))
}

pub(crate) fn rat_to_f64(r: &Rat) -> f64 {
    r.to_f64().expect("rational fits in f64")
}

/// Reduce a rational into [0, 1).
fn frac_mod1(r: &Rat) -> Rat {
    r - r.floor()
}

/// One line per direction, plus the implied ℤ²-translate family. Base
/// points are exact; general position holds by construction (both public
/// constructors verify it).
#[derive(Clone, Debug)]
pub struct LineFamily {
    dirs: Vec<(i64, i64)>,
    offsets: Vec<(Rat, Rat)>,
}

impl LineFamily {
    pub fn len(&self) -> usize {
        self.dirs.len()
    }

    /// Primitive integer direction of family `i`.
    pub fn direction(&self, i: usize) -> (i64, i64) {
        self.dirs[i]
    }

    pub fn direction_f(&self, i: usize) -> Vec2 {
        v2(self.dirs[i].0 as f64, self.dirs[i].1 as f64)
    }

    /// Unit tangent of family `i`.
    pub fn tangent(&self, i: usize) -> Vec2 {
        self.direction_f(i).normalized()
    }

    /// Exact base point on line `i`.
    pub fn offset(&self, i: usize) -> &(Rat, Rat) {
        &self.offsets[i]
    }

    pub fn offset_f(&self, i: usize) -> Vec2 {
        v2(rat_to_f64(&self.offsets[i].0), rat_to_f64(&self.offsets[i].1))
    }

    /// Exact point `o_i + t·(m_i, n_i)` on the base line of family `i`.
    pub fn point_at(&self, i: usize, t: &Rat) -> (Rat, Rat) {
        let (m, n) = self.dirs[i];
        (
            &self.offsets[i].0 + t * rat_i64(m, 1),
            &self.offsets[i].1 + t * rat_i64(n, 1),
        )
    }
}

/// Map a scalar transverse offset to a base point: non-vertical directions
/// (canonical sign has m ≥ 1) take the y-intercept, the vertical family the
/// x-intercept. Every line of the direction is reachable this way.
fn offset_point(dir: (i64, i64), b: Rat) -> (Rat, Rat) {
    if dir.0 != 0 {
        (Rat::zero(), b)
    } else {
        (b, Rat::zero())
    }
}

/// Build the family from explicit base points, verifying general position
/// exactly. Fails with `TriplePoint` naming a coincidence witness.
pub fn line_family_with_offsets(
    spec: &PolygonSpec,
    offsets: &[(Rat, Rat)],
) -> Result<LineFamily, NetworkError> {
    let dirs: Vec<(i64, i64)> = spec.directions().iter().map(|d| (d.m, d.n)).collect();
    assert_eq!(
        dirs.len(),
        offsets.len(),
        "one base point per polygon direction"
    );
    let fam = LineFamily {
        dirs,
        offsets: offsets.to_vec(),
    };
    let records = enumerate_records(&fam);
    if let Some(p) = first_coincidence(&records) {
        return Err(NetworkError::TriplePoint {
            x: p.0.to_string(),
            y: p.1.to_string(),
        });
    }
    Ok(fam)
}

/// Scalar-offset convenience used by the placement search and by callers
/// that think of lines by their intercepts. Intercepts pair with the spec's
/// directions in their *normalized clockwise order*, not input order.
pub fn line_family_with_intercepts(
    spec: &PolygonSpec,
    intercepts: &[Rat],
) -> Result<LineFamily, NetworkError> {
    let pts: Vec<(Rat, Rat)> = spec
        .directions()
        .iter()
        .zip(intercepts)
        .map(|(d, b)| offset_point((d.m, d.n), b.clone()))
        .collect();
    line_family_with_offsets(spec, &pts)
}

/// Deterministic placement: walk an R-sequence of offset tuples on the 1/100
/// grid (phase set by `seed`), certify general position exactly for each,
/// and return the certified candidate with the largest minimal spacing `d`.
/// Fails with `ExhaustedRetries` only if every candidate has a triple point.
pub fn place_lines(spec: &PolygonSpec, seed: u64) -> Result<LineFamily, NetworkError> {
    let m = spec.directions().len();
    let alphas = r_sequence_alphas(m);
    let phases: Vec<f64> = (0..m)
        .map(|i| splitmix64(seed.wrapping_add(i as u64)) as f64 / 2f64.powi(64))
        .collect();

    let mut best: Option<(Rat, LineFamily)> = None;
    for attempt in 0..PLACEMENT_ATTEMPTS {
        let intercepts: Vec<Rat> = (0..m)
            .map(|i| {
                let u = (phases[i] + (attempt as f64 + 1.0) * alphas[i]).fract();
                rat_i64((u * OFFSET_DENOM as f64).floor() as i64, OFFSET_DENOM)
            })
            .collect();
        let Ok(fam) = line_family_with_intercepts(spec, &intercepts) else {
            continue;
        };
        let d_sq = min_spacing_sq(&enumerate_records(&fam));
        if best.as_ref().is_none_or(|(b, _)| d_sq > *b) {
            best = Some((d_sq, fam));
        }
    }
    best.map(|(_, fam)| fam).ok_or(NetworkError::ExhaustedRetries {
        seed,
        attempts: PLACEMENT_ATTEMPTS,
    })
}

/// splitmix64 — the standard 64-bit finalizer; plenty for phase scrambling.
fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e3779b97f4a7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
    z ^ (z >> 31)
}

/// R-sequence step lengths: inverse powers of the generalized golden ratio
/// φ_m (the real root > 1 of x^(m+1) = x + 1). Successive multiples of the
/// vector (α_1, …, α_m) mod 1 fill the offset cube with low discrepancy.
fn r_sequence_alphas(m: usize) -> Vec<f64> {
    let mut phi = 1.5_f64;
    for _ in 0..64 {
        let f = phi.powi(m as i32 + 1) - phi - 1.0;
        let df = (m as f64 + 1.0) * phi.powi(m as i32) - 1.0;
        phi -= f / df;
    }
    (1..=m).map(|i| phi.powi(-(i as i32))).collect()
}

/// One crossing class of the pair (i, j): the base line of family `i` meets
/// the translate `L_j + v`, and the meeting point reduces to `point` in the
/// fundamental domain. Family `i < j` is the principal family of the
/// crossing throughout the crate.
#[derive(Clone, Debug)]
pub struct IntersectionRecord {
    pub i: usize,
    pub j: usize,
    /// Class label l = 0..|D| within the pair; classes step by 1/|D| in the
    /// base-line parameter.
    pub class_index: usize,
    /// The ℤ² translate of the j-line realizing this class on the base
    /// i-line.
    pub translate: (i64, i64),
    /// Exact representative in [0, 1)².
    pub point: (Rat, Rat),
}

impl IntersectionRecord {
    pub fn point_f(&self) -> Vec2 {
        v2(rat_to_f64(&self.point.0), rat_to_f64(&self.point.1))
    }
}

/// All crossing classes in one fundamental domain, with the exact minimal
/// pairwise spacing (periodic wrap included) and the perturbation radius.
#[derive(Clone, Debug)]
pub struct IntersectionSet {
    pub records: Vec<IntersectionRecord>,
    /// Exact squared minimal spacing.
    pub d_sq: Rat,
    /// √d_sq, the paper-facing spacing.
    pub d: f64,
    /// Perturbation radius, default d/20; always < d/10.
    pub r: f64,
}

/// Enumerate all crossing classes. Requires general position (guaranteed by
/// both `LineFamily` constructors); the family always has ≥ 2 directions
/// because a valid polygon spec spans the plane.
pub fn intersections(fam: &LineFamily) -> IntersectionSet {
    let records = enumerate_records(fam);
    debug_assert!(first_coincidence(&records).is_none());
    let d_sq = min_spacing_sq(&records);
    let d = rat_to_f64(&d_sq).sqrt();
    IntersectionSet {
        records,
        d_sq,
        d,
        r: DEFAULT_RADIUS_FRACTION * d,
    }
}

impl IntersectionSet {
    /// Override the perturbation radius (splice retries escalate it; grid
    /// pipelines pin it near the d/10 ceiling). Must stay in (0, d/10).
    pub fn set_radius(&mut self, r: f64) -> Result<(), NetworkError> {
        if !(r > 0.0 && r < self.d / 10.0) {
            return Err(NetworkError::BadRadius { r, d: self.d });
        }
        self.r = r;
        Ok(())
    }

    /// Crossings along the base line of family `i`, sorted by the exact
    /// line parameter t ∈ [0, 1) (one lattice period of the line). Every
    /// record appears on exactly two of these lists.
    pub fn crossings_along(&self, fam: &LineFamily, i: usize) -> Vec<LineCrossing> {
        let (m, n) = fam.direction(i);
        // Bézout p·m + q·n = 1 turns the point back into its parameter:
        // for Δ = point − o_i = t·(m,n) + u with u ∈ ℤ², p·Δx + q·Δy ≡ t
        // (mod 1).
        let eg = BigInt::from(m).extended_gcd(&BigInt::from(n));
        debug_assert!(eg.gcd.abs() == BigInt::from(1));
        let (p, q) = (
            Rat::from_integer(eg.x * eg.gcd.clone()),
            Rat::from_integer(eg.y * eg.gcd),
        );
        let o = fam.offset(i);
        let mut out = Vec::new();
        for (idx, rec) in self.records.iter().enumerate() {
            if rec.i != i && rec.j != i {
                continue;
            }
            let dx = &rec.point.0 - &o.0;
            let dy = &rec.point.1 - &o.1;
            let t = frac_mod1(&(&p * dx + &q * dy));
            out.push(LineCrossing {
                record_index: idx,
                t,
                other: if rec.i == i { rec.j } else { rec.i },
            });
        }
        out.sort_by(|a, b| a.t.cmp(&b.t));
        out
    }
}

/// A crossing as seen from one line: where along the period it happens and
/// which family crosses there.
#[derive(Clone, Debug)]
pub struct LineCrossing {
    pub record_index: usize,
    pub t: Rat,
    pub other: usize,
}

fn enumerate_records(fam: &LineFamily) -> Vec<IntersectionRecord> {
    let mut records = Vec::new();
    for i in 0..fam.len() {
        for j in (i + 1)..fam.len() {
            enumerate_pair(fam, i, j, &mut records);
        }
    }
    records
}

/// Crossing classes of one pair. The base i-line meets the translates of
/// the j-line at parameters t₀ + ℤ/|D| with D = m_i·n_j − n_i·m_j (the
/// translate v shifts t by cross(e_j, v)/(−D), and cross(e_j, ·) is onto ℤ
/// because e_j is primitive); stepping t by 1/|D| exactly |D| times walks
/// every class once, since a full step of 1 shifts the point by e_i ∈ ℤ².
fn enumerate_pair(fam: &LineFamily, i: usize, j: usize, out: &mut Vec<IntersectionRecord>) {
    let (mi, ni) = fam.direction(i);
    let (mj, nj) = fam.direction(j);
    let d_det = mi * nj - ni * mj;
    assert!(d_det != 0, "polygon directions are pairwise non-parallel");
    let (oi, oj) = (fam.offset(i), fam.offset(j));

    // Base crossing parameter on line i: t₀ = cross(e_j, o_j − o_i)/(−D).
    let rel = (&oj.0 - &oi.0, &oj.1 - &oi.1);
    let t0 = (rat_i64(mj, 1) * rel.1 - rat_i64(nj, 1) * rel.0) / rat_i64(-d_det, 1);

    // Bézout for the realizing translate: m_j·v₂ − n_j·v₁ = c.
    let eg = BigInt::from(mj).extended_gcd(&BigInt::from(nj));
    let (p, q) = (
        (eg.x * eg.gcd.clone()).to_i64().expect("small Bézout"),
        (eg.y * eg.gcd).to_i64().expect("small Bézout"),
    );

    let count = d_det.unsigned_abs() as usize;
    for l in 0..count {
        let t = &t0 + rat_i64(l as i64, d_det.abs());
        let raw = fam.point_at(i, &t);
        let point = (frac_mod1(&raw.0), frac_mod1(&raw.1));
        // Class l needs cross(e_j, v) = −sign(D)·l.
        let c = -d_det.signum() * l as i64;
        let translate = (-c * q, c * p);
        out.push(IntersectionRecord {
            i,
            j,
            class_index: l,
            translate,
            point,
        });
    }
}

/// First pair of records sharing an exact point, if any — a triple point,
/// since same-family lines are parallel and within-pair classes are
/// distinct by construction.
fn first_coincidence(records: &[IntersectionRecord]) -> Option<(Rat, Rat)> {
    let mut pts: Vec<&(Rat, Rat)> = records.iter().map(|r| &r.point).collect();
    pts.sort();
    pts.windows(2).find(|w| w[0] == w[1]).map(|w| w[0].clone())
}

/// Exact squared minimal spacing over the periodic point set: every nearest
/// periodic copy of a distinct pair is reached with a shift in {−1,0,1}²
/// (componentwise rounding minimizes each coordinate), and a point's own
/// nearest copy sits at distance exactly 1.
fn min_spacing_sq(records: &[IntersectionRecord]) -> Rat {
    let mut best = Rat::from_integer(BigInt::from(1));
    for (a_idx, a) in records.iter().enumerate() {
        for b in &records[a_idx + 1..] {
            for sx in -1..=1_i64 {
                for sy in -1..=1_i64 {
                    let dx = &a.point.0 - &b.point.0 - rat_i64(sx, 1);
                    let dy = &a.point.1 - &b.point.1 - rat_i64(sy, 1);
                    let dd = &dx * &dx + &dy * &dy;
                    if dd < best {
                        best = dd;
                    }
                }
            }
        }
    }
    best
}
