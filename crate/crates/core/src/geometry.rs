//! Parametric boundary curves: the horseshoe cavity `Γ_D` between two
//! confocal-looking elliptic arcs, and the truncation circle `Γ_tr`.

use alloc::vec::Vec;
use core::f64::consts::{PI, TAU};

#[allow(unused_imports)]
use num_traits::Float;

use crate::{Error, Point, Result};

/// Which boundary a curve belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BoundaryTag {
    /// Sound-soft obstacle boundary (homogeneous Dirichlet).
    GammaD,
    /// Truncation circle carrying the Dirichlet-to-Neumann condition.
    GammaTr,
}

impl BoundaryTag {
    pub fn code(self) -> u8 {
        match self {
            BoundaryTag::GammaD => 1,
            BoundaryTag::GammaTr => 2,
        }
    }

    pub fn from_code(c: u8) -> Option<Self> {
        match c {
            1 => Some(BoundaryTag::GammaD),
            2 => Some(BoundaryTag::GammaTr),
            _ => None,
        }
    }
}

/// Geometric shape of one boundary piece.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Shape {
    /// `(cx + a cos t, cy + b sin t)` traversed from `t0` to `t1` (either direction).
    EllipseArc {
        center: Point,
        a: f64,
        b: f64,
        t0: f64,
        t1: f64,
    },
    /// Straight segment, parameter `t ∈ [0, 1]`.
    Line { p0: Point, p1: Point },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Segment {
    pub shape: Shape,
    pub tag: BoundaryTag,
}

/// Point, unit tangent along the traversal and unit normal pointing out of
/// `Ω_tr`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurvePoint {
    pub point: Point,
    pub tangent: Point,
    pub normal: Point,
}

impl Segment {
    pub fn param_range(&self) -> (f64, f64) {
        match self.shape {
            Shape::EllipseArc { t0, t1, .. } => (t0, t1),
            Shape::Line { .. } => (0.0, 1.0),
        }
    }

    /// Position and (unnormalized) derivative along the traversal.
    pub fn eval(&self, t: f64) -> (Point, Point) {
        match self.shape {
            Shape::EllipseArc { center, a, b, t0, t1 } => {
                let (s, c) = t.sin_cos();
                let dir = if t1 >= t0 { 1.0 } else { -1.0 };
                ([center[0] + a * c, center[1] + b * s], [-a * s * dir, b * c * dir])
            }
            Shape::Line { p0, p1 } => (
                [p0[0] + t * (p1[0] - p0[0]), p0[1] + t * (p1[1] - p0[1])],
                [p1[0] - p0[0], p1[1] - p0[1]],
            ),
        }
    }

    /// Point at the start (`s = 0`) or end (`s = 1`) of the traversal.
    pub fn at_fraction(&self, s: f64) -> Point {
        let (t0, t1) = self.param_range();
        self.eval(t0 + s * (t1 - t0)).0
    }

    pub fn start(&self) -> Point {
        self.at_fraction(0.0)
    }

    pub fn end(&self) -> Point {
        self.at_fraction(1.0)
    }

    /// Arc length by 16-point Gauss on 32 panels (exact for lines).
    pub fn length(&self) -> f64 {
        match self.shape {
            Shape::Line { p0, p1 } => dist(p0, p1),
            Shape::EllipseArc { .. } => {
                let (t0, t1) = self.param_range();
                let panels = 32;
                let h = (t1 - t0) / panels as f64;
                let mut total = 0.0;
                for p in 0..panels {
                    let mid = t0 + (p as f64 + 0.5) * h;
                    for (x, w) in GAUSS8 {
                        let d = self.eval(mid + 0.5 * h * x).1;
                        total += 0.5 * h.abs() * w * d[0].hypot(d[1]);
                    }
                }
                total
            }
        }
    }

    /// Bound on the distance between the curve and the chord over a parameter
    /// interval of width `dt`.
    fn sagitta_bound(&self, dt: f64) -> f64 {
        match self.shape {
            Shape::Line { .. } => 0.0,
            Shape::EllipseArc { a, b, .. } => a.max(b) * dt * dt / 8.0,
        }
    }
}

/// 8-point Gauss–Legendre nodes and weights on [-1, 1].
pub(crate) const GAUSS8: [(f64, f64); 8] = [
    (-0.960_289_856_497_536_3, 0.101_228_536_290_376_26),
    (-0.796_666_477_413_626_7, 0.222_381_034_453_374_47),
    (-0.525_532_409_916_329_0, 0.313_706_645_877_887_3),
    (-0.183_434_642_495_649_8, 0.362_683_783_378_362),
    (0.183_434_642_495_649_8, 0.362_683_783_378_362),
    (0.525_532_409_916_329_0, 0.313_706_645_877_887_3),
    (0.796_666_477_413_626_7, 0.222_381_034_453_374_47),
    (0.960_289_856_497_536_3, 0.101_228_536_290_376_26),
];

/// Evaluates a segment with its normal pointing out of `Ω_tr`.
///
/// Obstacle loops run counterclockwise around the obstacle, so out of `Ω_tr`
/// is to the left of the traversal. The truncation circle runs
/// counterclockwise around `Ω_tr`, so out of it is to the right.
pub fn curve_point(seg: &Segment, t: f64) -> Result<CurvePoint> {
    let (a, b) = seg.param_range();
    let (lo, hi) = (a.min(b), a.max(b));
    let slack = 1e-12 * (1.0 + hi.abs().max(lo.abs()));
    if !(t >= lo - slack && t <= hi + slack) {
        return Err(Error::ParameterOutOfRange { t, lo, hi });
    }
    let (p, d) = seg.eval(t);
    let len = d[0].hypot(d[1]);
    let tangent = [d[0] / len, d[1] / len];
    let normal = match seg.tag {
        BoundaryTag::GammaD => [-tangent[1], tangent[0]],
        BoundaryTag::GammaTr => [tangent[1], -tangent[0]],
    };
    Ok(CurvePoint { point: p, tangent, normal })
}

/// Closed chain of boundary segments.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryCurveSet {
    pub segments: Vec<Segment>,
    pub closed: bool,
}

impl BoundaryCurveSet {
    /// Largest gap between the end of one segment and the start of the next.
    pub fn closure_gap(&self) -> f64 {
        let n = self.segments.len();
        (0..n)
            .map(|i| dist(self.segments[i].end(), self.segments[(i + 1) % n].start()))
            .fold(0.0, f64::max)
    }

    pub fn length(&self) -> f64 {
        self.segments.iter().map(Segment::length).sum()
    }

    /// Full circle of radius `r` about `center`, counterclockwise.
    pub fn circle(center: Point, r: f64, tag: BoundaryTag) -> Self {
        Self::ellipse(center, r, r, tag)
    }

    /// Full axis-aligned ellipse, counterclockwise.
    pub fn ellipse(center: Point, a: f64, b: f64, tag: BoundaryTag) -> Self {
        BoundaryCurveSet {
            segments: alloc::vec![Segment {
                shape: Shape::EllipseArc { center, a, b, t0: -PI, t1: PI },
                tag,
            }],
            closed: true,
        }
    }

    /// Winding number of the loop around `p`, or `None` when `p` lies within
    /// `tol` of the curve.
    pub fn winding_number(&self, p: Point, tol: f64) -> Option<i32> {
        let mut total = 0.0;
        for seg in &self.segments {
            let (t0, t1) = seg.param_range();
            total += swept_angle(seg, p, t0, t1, tol, 0)?;
        }
        Some((total / TAU).round() as i32)
    }

    /// Distance from `p` to the curve, accurate to about 1e-12.
    pub fn distance(&self, p: Point) -> f64 {
        self.segments
            .iter()
            .map(|s| {
                let (t0, t1) = s.param_range();
                seg_distance(s, p, t0, t1, f64::INFINITY, 0)
            })
            .fold(f64::INFINITY, f64::min)
    }
}

fn dist(a: Point, b: Point) -> f64 {
    (a[0] - b[0]).hypot(a[1] - b[1])
}

fn point_segment_distance(p: Point, a: Point, b: Point) -> f64 {
    let d = [b[0] - a[0], b[1] - a[1]];
    let l2 = d[0] * d[0] + d[1] * d[1];
    if l2 == 0.0 {
        return dist(p, a);
    }
    let s = (((p[0] - a[0]) * d[0] + (p[1] - a[1]) * d[1]) / l2).clamp(0.0, 1.0);
    dist(p, [a[0] + s * d[0], a[1] + s * d[1]])
}

/// Angle subtended at `p` by the curve piece `[ta, tb]`. Subdivides until the
/// chord certifies the curve does not pass near `p`.
fn swept_angle(seg: &Segment, p: Point, ta: f64, tb: f64, tol: f64, depth: u32) -> Option<f64> {
    let a = seg.eval(ta).0;
    let b = seg.eval(tb).0;
    let sag = seg.sagitta_bound(tb - ta);
    let d = point_segment_distance(p, a, b);
    if d > sag + tol {
        let a0 = (a[1] - p[1]).atan2(a[0] - p[0]);
        let b0 = (b[1] - p[1]).atan2(b[0] - p[0]);
        let mut da = b0 - a0;
        if da > PI {
            da -= TAU;
        } else if da < -PI {
            da += TAU;
        }
        return Some(da);
    }
    if d + sag <= tol || depth >= 60 {
        // p is on (or numerically indistinguishable from) the curve
        return if seg_distance(seg, p, ta, tb, f64::INFINITY, 0) <= tol { None } else { Some(0.0) };
    }
    let mid = 0.5 * (ta + tb);
    let l = swept_angle(seg, p, ta, mid, tol, depth + 1)?;
    let r = swept_angle(seg, p, mid, tb, tol, depth + 1)?;
    Some(l + r)
}

fn seg_distance(seg: &Segment, p: Point, ta: f64, tb: f64, best: f64, depth: u32) -> f64 {
    let a = seg.eval(ta).0;
    let b = seg.eval(tb).0;
    let sag = seg.sagitta_bound(tb - ta);
    let d = point_segment_distance(p, a, b);
    if d - sag >= best {
        return best;
    }
    if sag < 1e-13 || depth >= 60 {
        return d.min(best);
    }
    let mid = 0.5 * (ta + tb);
    let best = seg_distance(seg, p, ta, mid, best, depth + 1);
    seg_distance(seg, p, mid, tb, best, depth + 1)
}

/// Which of the two standard cavities a spec describes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CavityKind {
    Small,
    Large,
    Custom,
}

impl CavityKind {
    pub fn name(self) -> &'static str {
        match self {
            CavityKind::Small => "small",
            CavityKind::Large => "large",
            CavityKind::Custom => "custom",
        }
    }
}

/// Horseshoe cavity between the inner ellipse arc `(a1 cos t, a2 sin t)`,
/// `|t| ≤ φ0`, and the outer arc `(A1 cos t, A2 sin t)`, `|t| ≤ φ1`, joined by
/// two vertical caps.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CavitySpec {
    pub inner_axes: (f64, f64),
    pub outer_axes: (f64, f64),
    pub phi0: f64,
    pub kind: CavityKind,
    /// Corner fillet radius. Only 0 (sharp corners) is supported.
    pub fillet: f64,
}

impl CavitySpec {
    /// Opening half-angle 7π/10.
    pub fn small() -> Self {
        Self::standard(CavityKind::Small, 0.7 * PI)
    }

    /// Opening half-angle 9π/10.
    pub fn large() -> Self {
        Self::standard(CavityKind::Large, 0.9 * PI)
    }

    fn standard(kind: CavityKind, phi0: f64) -> Self {
        CavitySpec { inner_axes: (1.0, 0.5), outer_axes: (1.3, 0.6), phi0, kind, fillet: 0.0 }
    }

    pub fn by_name(name: &str) -> Option<Self> {
        match name {
            "small" => Some(Self::small()),
            "large" => Some(Self::large()),
            _ => None,
        }
    }

    /// `φ1 = arccos(cos φ0 · a1 / A1)`, so the outer arc ends directly
    /// above the inner one.
    pub fn phi1(&self) -> f64 {
        (self.phi0.cos() * self.inner_axes.0 / self.outer_axes.0).acos()
    }

    pub fn validate(&self) -> Result<()> {
        let (a1, a2) = self.inner_axes;
        let (b1, b2) = self.outer_axes;
        if !(a1 > 0.0 && a2 > 0.0 && b1 > 0.0 && b2 > 0.0) {
            return Err(Error::Geometry("cavity axes must be positive".into()));
        }
        if !(self.phi0 > 0.0 && self.phi0 < PI) {
            return Err(Error::Geometry(alloc::format!("phi0 = {} outside (0, π)", self.phi0)));
        }
        if self.fillet != 0.0 {
            return Err(Error::Geometry("corner fillets are not supported; use fillet = 0".into()));
        }
        if (self.phi0.cos() * a1 / b1).abs() > 1.0 {
            return Err(Error::Geometry("outer arc cannot reach the inner arc endpoint".into()));
        }
        if !(b1 > a1 && b2 > a2) {
            // the outer ellipse must strictly contain the inner one or the arcs cross
            return Err(Error::Geometry("outer ellipse does not contain inner ellipse; curve self-intersects".into()));
        }
        let cap = b2 * self.phi1().sin() - a2 * self.phi0.sin();
        if !(cap > 1e-12) {
            return Err(Error::Geometry("degenerate cap: arc endpoints coincide".into()));
        }
        Ok(())
    }
}

/// Builds the obstacle boundary `Γ_D`, counterclockwise around the obstacle.
pub fn build_cavity(spec: &CavitySpec) -> Result<BoundaryCurveSet> {
    spec.validate()?;
    let (a1, a2) = spec.inner_axes;
    let (b1, b2) = spec.outer_axes;
    let phi0 = spec.phi0;
    let phi1 = spec.phi1();
    let o = [0.0, 0.0];
    let tag = BoundaryTag::GammaD;
    let outer = Segment { shape: Shape::EllipseArc { center: o, a: b1, b: b2, t0: -phi1, t1: phi1 }, tag };
    let inner = Segment { shape: Shape::EllipseArc { center: o, a: a1, b: a2, t0: phi0, t1: -phi0 }, tag };
    let top = Segment { shape: Shape::Line { p0: outer.end(), p1: inner.start() }, tag };
    let bottom = Segment { shape: Shape::Line { p0: inner.end(), p1: outer.start() }, tag };
    let set = BoundaryCurveSet { segments: alloc::vec![outer, top, inner, bottom], closed: true };
    debug_assert!(set.closure_gap() < 1e-12);
    Ok(set)
}

/// `Ω_tr = B(center, R) \ closure(obstacle)`.
#[derive(Debug, Clone, PartialEq)]
pub struct DomainSpec {
    pub obstacle: Option<BoundaryCurveSet>,
    pub truncation_radius: f64,
    pub center: Point,
    /// Cavity parameters when the obstacle came from [`build_cavity`].
    pub cavity: Option<CavitySpec>,
}

/// Points closer than this to any boundary are treated as outside `Ω_tr`.
pub const BOUNDARY_TOL: f64 = 1e-10;

impl DomainSpec {
    pub fn cavity(spec: CavitySpec, radius: f64) -> Result<Self> {
        let obstacle = build_cavity(&spec)?;
        let d = DomainSpec { obstacle: Some(obstacle), truncation_radius: radius, center: [0.0, 0.0], cavity: Some(spec) };
        d.validate()?;
        Ok(d)
    }

    /// Disc without obstacle.
    pub fn disc(radius: f64) -> Self {
        DomainSpec { obstacle: None, truncation_radius: radius, center: [0.0, 0.0], cavity: None }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.truncation_radius > 0.0) {
            return Err(Error::Geometry("truncation radius must be positive".into()));
        }
        if let Some(obs) = &self.obstacle {
            let r = self.truncation_radius;
            let far = sample_loop(obs, 64)
                .into_iter()
                .map(|p| dist(p, self.center))
                .fold(0.0, f64::max);
            if !(far < r) {
                return Err(Error::Geometry(alloc::format!(
                    "obstacle reaches radius {far:.4}, not inside the truncation circle R = {r}"
                )));
            }
        }
        Ok(())
    }

    pub fn truncation_circle(&self) -> BoundaryCurveSet {
        BoundaryCurveSet::circle(self.center, self.truncation_radius, BoundaryTag::GammaTr)
    }

    /// `true` iff `p` is strictly inside the circle and strictly outside the
    /// closed obstacle, both by more than [`BOUNDARY_TOL`].
    pub fn contains(&self, p: Point) -> bool {
        if dist(p, self.center) >= self.truncation_radius - BOUNDARY_TOL {
            return false;
        }
        match &self.obstacle {
            None => true,
            Some(obs) => matches!(obs.winding_number(p, BOUNDARY_TOL), Some(0)),
        }
    }

    /// Area of `Ω_tr`.
    pub fn area(&self) -> f64 {
        let disc = PI * self.truncation_radius * self.truncation_radius;
        disc - self.obstacle.as_ref().map_or(0.0, signed_area)
    }
}

/// Samples `per_segment` points per segment (start points only).
pub fn sample_loop(set: &BoundaryCurveSet, per_segment: usize) -> Vec<Point> {
    let mut out = Vec::new();
    for s in &set.segments {
        for i in 0..per_segment {
            out.push(s.at_fraction(i as f64 / per_segment as f64));
        }
    }
    out
}

/// Enclosed area of a loop by Green's theorem, positive for counterclockwise.
pub fn signed_area(set: &BoundaryCurveSet) -> f64 {
    let mut total = 0.0;
    for seg in &set.segments {
        let (t0, t1) = seg.param_range();
        let panels = 64;
        let h = (t1 - t0) / panels as f64;
        for k in 0..panels {
            let mid = t0 + (k as f64 + 0.5) * h;
            for (x, w) in GAUSS8 {
                let t = mid + 0.5 * h * x;
                let (p, _) = seg.eval(t);
                // eval's derivative follows the traversal; convert to d/dt
                let d = match seg.shape {
                    Shape::EllipseArc { a, b, .. } => [-a * t.sin(), b * t.cos()],
                    Shape::Line { p0, p1 } => [p1[0] - p0[0], p1[1] - p0[1]],
                };
                total += 0.5 * h * w * 0.5 * (p[0] * d[1] - p[1] * d[0]);
            }
        }
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn standard_angles() {
        let s = CavitySpec::small();
        assert!((s.phi0 - 2.199_114_857_512_855).abs() < 1e-12);
        assert!((s.phi1() - 2.039_962_261_493_170_3).abs() < 1e-12);
        assert!((CavitySpec::large().phi0 - 0.9 * PI).abs() < 1e-15);
    }

    #[test]
    fn closure_and_endpoint_identity() {
        for spec in [CavitySpec::small(), CavitySpec::large()] {
            let c = build_cavity(&spec).unwrap();
            assert!(c.closure_gap() < 1e-12);
            assert!((1.3 * spec.phi1().cos() - spec.phi0.cos()).abs() < 1e-12);
        }
    }

    #[test]
    fn obstacle_is_counterclockwise() {
        let c = build_cavity(&CavitySpec::small()).unwrap();
        assert!(signed_area(&c) > 0.0);
    }

    #[test]
    fn curve_point_examples() {
        let c = build_cavity(&CavitySpec::small()).unwrap();
        let inner = &c.segments[2];
        let cp = curve_point(inner, 0.0).unwrap();
        assert!((cp.point[0] - 1.0).abs() < 1e-15 && cp.point[1].abs() < 1e-15);
        assert!((cp.normal[0] - 1.0).abs() < 1e-15 && cp.normal[1].abs() < 1e-15);
        let outer = &c.segments[0];
        assert!((curve_point(outer, 0.0).unwrap().point[0] - 1.3).abs() < 1e-15);
        let circ = DomainSpec::disc(2.0).truncation_circle();
        let cp = curve_point(&circ.segments[0], PI / 2.0).unwrap();
        assert!(cp.point[0].abs() < 1e-15 && (cp.point[1] - 2.0).abs() < 1e-15);
        assert!(cp.normal[0].abs() < 1e-15 && (cp.normal[1] - 1.0).abs() < 1e-15);
        assert!(matches!(curve_point(outer, 3.0), Err(Error::ParameterOutOfRange { .. })));
    }

    #[test]
    fn mirror_symmetry() {
        let c = build_cavity(&CavitySpec::large()).unwrap();
        let outer = &c.segments[0];
        for &t in &[0.1, 0.7, 1.9] {
            let p = curve_point(outer, t).unwrap().point;
            let q = curve_point(outer, -t).unwrap().point;
            assert_eq!(p[0], q[0]);
            assert_eq!(p[1], -q[1]);
        }
    }

    #[test]
    fn membership_examples() {
        let d = DomainSpec::cavity(CavitySpec::small(), 2.0).unwrap();
        assert!(d.contains([0.0, 1.8]));
        assert!(d.contains([0.0, 0.0]));
        assert!(!d.contains([0.0, 3.0]));
        // inside the obstacle wall
        assert!(!d.contains([1.15, 0.0]));
        // on the inner arc
        assert!(!d.contains([1.0, 0.0]));
        assert!(!d.contains([2.0, 0.0]));
    }

    #[test]
    fn membership_agrees_with_analytic_shell() {
        // the obstacle is {x > cos φ0, inside outer ellipse, outside inner}
        let spec = CavitySpec::small();
        let d = DomainSpec::cavity(spec, 2.0).unwrap();
        let xc = spec.phi0.cos();
        let mut state = 12345u64;
        for _ in 0..4000 {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            let x = ((state >> 11) as f64 / (1u64 << 53) as f64) * 3.0 - 1.5;
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            let y = ((state >> 11) as f64 / (1u64 << 53) as f64) * 1.6 - 0.8;
            let inside_outer = (x / 1.3).powi(2) + (y / 0.6).powi(2) < 1.0;
            let outside_inner = x * x + (y / 0.5).powi(2) > 1.0;
            let obstacle = x > xc && inside_outer && outside_inner;
            assert_eq!(d.contains([x, y]), !obstacle, "({x}, {y})");
        }
    }

    #[test]
    fn rejects_bad_specs() {
        let mut s = CavitySpec::small();
        s.phi0 = 0.0;
        assert!(build_cavity(&s).is_err());
        let mut s = CavitySpec::small();
        s.outer_axes = (0.9, 0.6);
        assert!(build_cavity(&s).is_err());
        let mut s = CavitySpec::small();
        s.outer_axes = (1.3, 0.5);
        assert!(build_cavity(&s).is_err());
        assert!(DomainSpec::cavity(CavitySpec::small(), 1.2).is_err());
    }

    #[test]
    fn area_of_domain() {
        let d = DomainSpec::cavity(CavitySpec::small(), 2.0).unwrap();
        let shell = signed_area(d.obstacle.as_ref().unwrap());
        assert!(shell > 0.0 && shell < PI * (1.3 * 0.6 - 0.5));
        assert!((DomainSpec::disc(1.0).area() - PI).abs() < 1e-12);
    }
}
