//! Triangular meshes of `Ω_tr` with tagged boundary edges.
//!
//! [`generate_mesh`] builds a boundary-conforming constrained Delaunay
//! triangulation of the polygonal approximation of the domain and refines it
//! Ruppert-style until every triangle has circumradius-to-shortest-edge ratio
//! at most √2 (minimum angle ≈ 20.7°) and circumradius below
//! `0.6·h(x)`, so edges stay under `1.2·h`. Curved boundary pieces are split at
//! their true parameter midpoints, so every boundary node lies exactly on its
//! curve. The truncation circle is sampled once, uniformly in angle, and never
//! split afterwards; boundary-integral matrices rely on that uniformity.

mod delaunay;
mod locate;

use alloc::vec::Vec;
use core::f64::consts::PI;

#[allow(unused_imports)]
use num_traits::Float;

pub use locate::PointLocator;

use crate::geometry::{BoundaryCurveSet, BoundaryTag, DomainSpec, Segment, Shape};
use crate::{Error, Point, Result};

/// `h = (2π/30)·k^{-3/2}`, the resolution rule used for the cavity experiments.
pub fn meshwidth_rule(k: f64) -> Result<f64> {
    if !(k > 0.0) {
        return Err(Error::NonPositiveArgument { x: k });
    }
    Ok(2.0 * PI / 30.0 * k.powf(-1.5))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryEdge {
    pub nodes: [usize; 2],
    pub tag: BoundaryTag,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Mesh {
    pub nodes: Vec<Point>,
    /// Counterclockwise node triples.
    pub triangles: Vec<[usize; 3]>,
    pub boundary_edges: Vec<BoundaryEdge>,
    /// Longest edge length.
    pub h_max: f64,
}

fn dist(a: Point, b: Point) -> f64 {
    (a[0] - b[0]).hypot(a[1] - b[1])
}

/// Twice the signed area.
fn cross(a: Point, b: Point, c: Point) -> f64 {
    (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])
}

impl Mesh {
    /// Assembles a mesh from raw arrays (e.g. an imported file), checking
    /// index ranges and orientation.
    pub fn from_parts(nodes: Vec<Point>, triangles: Vec<[usize; 3]>, boundary_edges: Vec<BoundaryEdge>) -> Result<Self> {
        let n = nodes.len();
        for (i, t) in triangles.iter().enumerate() {
            if t.iter().any(|&v| v >= n) {
                return Err(Error::InvalidMesh(alloc::format!("triangle {i} references a missing node")));
            }
        }
        for (i, e) in boundary_edges.iter().enumerate() {
            if e.nodes.iter().any(|&v| v >= n) {
                return Err(Error::InvalidMesh(alloc::format!("boundary edge {i} references a missing node")));
            }
        }
        let mut m = Mesh { nodes, triangles, boundary_edges, h_max: 0.0 };
        for t in m.triangles.iter_mut() {
            // accept clockwise input by flipping
            if cross(m.nodes[t[0]], m.nodes[t[1]], m.nodes[t[2]]) < 0.0 {
                t.swap(1, 2);
            }
        }
        m.h_max = m.edges().iter().map(|&(a, b)| dist(m.nodes[a], m.nodes[b])).fold(0.0, f64::max);
        Ok(m)
    }

    pub fn triangle_area(&self, t: usize) -> f64 {
        let [a, b, c] = self.triangles[t];
        0.5 * cross(self.nodes[a], self.nodes[b], self.nodes[c])
    }

    pub fn area(&self) -> f64 {
        (0..self.triangles.len()).map(|t| self.triangle_area(t)).sum()
    }

    /// Unique undirected edges, sorted.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut e: Vec<(usize, usize)> = self
            .triangles
            .iter()
            .flat_map(|t| {
                [(t[0], t[1]), (t[1], t[2]), (t[2], t[0])].map(|(a, b)| if a < b { (a, b) } else { (b, a) })
            })
            .collect();
        e.sort_unstable();
        e.dedup();
        e
    }

    /// Nodes on edges with the given tag, sorted and deduplicated.
    pub fn tagged_nodes(&self, tag: BoundaryTag) -> Vec<usize> {
        let mut v: Vec<usize> = self.boundary_edges.iter().filter(|e| e.tag == tag).flat_map(|e| e.nodes).collect();
        v.sort_unstable();
        v.dedup();
        v
    }

    /// Number of closed loops formed by the edges carrying `tag`.
    pub fn boundary_loops(&self, tag: BoundaryTag) -> usize {
        let edges: Vec<[usize; 2]> = self.boundary_edges.iter().filter(|e| e.tag == tag).map(|e| e.nodes).collect();
        let nodes = self.tagged_nodes(tag);
        // union-find over tagged nodes
        let idx = |v: usize| nodes.binary_search(&v).unwrap();
        let mut parent: Vec<usize> = (0..nodes.len()).collect();
        fn root(p: &mut [usize], mut i: usize) -> usize {
            while p[i] != i {
                p[i] = p[p[i]];
                i = p[i];
            }
            i
        }
        for e in &edges {
            let a = root(&mut parent, idx(e[0]));
            let b = root(&mut parent, idx(e[1]));
            parent[a] = b;
        }
        (0..nodes.len()).filter(|&i| root(&mut parent, i) == i).count()
    }
}

/// Mesh quality summary. Failures are reported, never raised.
#[derive(Debug, Clone, PartialEq)]
pub struct QualityReport {
    /// Smallest interior angle, degrees.
    pub min_angle_deg: f64,
    /// Largest longest-edge / shortest-altitude ratio.
    pub max_aspect_ratio: f64,
    pub h_max: f64,
    /// V − E + F (1 for a disc, 0 for one hole).
    pub euler_characteristic: i64,
    /// Triangles with non-positive signed area.
    pub degenerate: Vec<usize>,
}

impl QualityReport {
    pub fn ok(&self, min_angle_deg: f64) -> bool {
        self.degenerate.is_empty() && self.min_angle_deg >= min_angle_deg
    }
}

pub fn validate_mesh(m: &Mesh) -> QualityReport {
    let mut min_angle = f64::INFINITY;
    let mut max_aspect: f64 = 0.0;
    let mut degenerate = Vec::new();
    for (i, t) in m.triangles.iter().enumerate() {
        let p = t.map(|v| m.nodes[v]);
        let area2 = cross(p[0], p[1], p[2]);
        if !(area2 > 0.0) {
            degenerate.push(i);
            continue;
        }
        let l = [dist(p[1], p[2]), dist(p[2], p[0]), dist(p[0], p[1])];
        for k in 0..3 {
            // law of cosines for the angle opposite edge k
            let (a, b, c) = (l[k], l[(k + 1) % 3], l[(k + 2) % 3]);
            let cosv = ((b * b + c * c - a * a) / (2.0 * b * c)).clamp(-1.0, 1.0);
            min_angle = min_angle.min(cosv.acos().to_degrees());
        }
        let longest = l[0].max(l[1]).max(l[2]);
        let altitude = area2 / longest;
        max_aspect = max_aspect.max(longest / altitude);
    }
    let v = m.nodes.len() as i64;
    let e = m.edges().len() as i64;
    let f = m.triangles.len() as i64;
    QualityReport {
        min_angle_deg: if min_angle.is_finite() { min_angle } else { 0.0 },
        max_aspect_ratio: max_aspect,
        h_max: m.h_max,
        euler_characteristic: v - e + f,
        degenerate,
    }
}

/// Region to mesh: the inside of `outer` minus the insides of `holes`.
#[derive(Debug, Clone, PartialEq)]
pub struct MeshDomain {
    pub outer: BoundaryCurveSet,
    pub holes: Vec<BoundaryCurveSet>,
}

impl MeshDomain {
    pub fn from_domain(d: &DomainSpec) -> Self {
        MeshDomain { outer: d.truncation_circle(), holes: d.obstacle.iter().cloned().collect() }
    }

    /// Interior of a single closed curve.
    pub fn interior_of(boundary: BoundaryCurveSet) -> Self {
        MeshDomain { outer: boundary, holes: Vec::new() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeshOptions {
    /// Circumradius / shortest edge bound (√2 gives ≈ 20.7°).
    pub radius_edge_ratio: f64,
    /// Triangles with circumradius above `size_factor·h(x)` are refined.
    pub size_factor: f64,
    /// Refinement stops with an error beyond this many vertices.
    pub max_points: usize,
}

impl Default for MeshOptions {
    fn default() -> Self {
        MeshOptions { radius_edge_ratio: core::f64::consts::SQRT_2, size_factor: 0.6, max_points: 3_000_000 }
    }
}

/// Sampled boundary loop handed to the triangulator.
pub(crate) struct BoundaryLoop {
    pub points: Vec<Point>,
    /// (segment index within the loop, curve parameter) per point.
    pub params: Vec<(usize, f64)>,
    pub segments: Vec<Segment>,
}

const FINE_STEPS: usize = 2048;

fn sample_loop(set: &BoundaryCurveSet, size: &dyn Fn(Point) -> f64) -> Result<BoundaryLoop> {
    let mut points = Vec::new();
    let mut params = Vec::new();
    for (si, seg) in set.segments.iter().enumerate() {
        let (t0, t1) = seg.param_range();
        let dt = (t1 - t0) / FINE_STEPS as f64;
        // cumulative ∫ ds / h on a fine grid
        let mut cum = Vec::with_capacity(FINE_STEPS + 1);
        cum.push(0.0);
        let mut inv_max: f64 = 0.0;
        let mut total_len = 0.0;
        for i in 0..FINE_STEPS {
            let t = t0 + (i as f64 + 0.5) * dt;
            let (p, d) = seg.eval(t);
            let ds = d[0].hypot(d[1]) * dt.abs();
            let h = size(p);
            if !(h > 0.0) {
                return Err(Error::InvalidArgument(alloc::format!("mesh size must be positive, got {h} at ({}, {})", p[0], p[1])));
            }
            inv_max = inv_max.max(1.0 / h);
            total_len += ds;
            cum.push(cum[i] + ds / h);
        }
        let uniform = seg.tag == BoundaryTag::GammaTr;
        let total = if uniform { total_len * inv_max } else { cum[FINE_STEPS] };
        let pieces = (total.ceil() as usize).max(if uniform { 8 } else { 2 });
        for j in 0..pieces {
            let t = if uniform {
                t0 + (t1 - t0) * j as f64 / pieces as f64
            } else {
                let target = cum[FINE_STEPS] * j as f64 / pieces as f64;
                let i = cum.partition_point(|&c| c <= target).clamp(1, FINE_STEPS) - 1;
                let frac = if cum[i + 1] > cum[i] { (target - cum[i]) / (cum[i + 1] - cum[i]) } else { 0.0 };
                t0 + (i as f64 + frac) * dt
            };
            points.push(seg.eval(t).0);
            params.push((si, t));
        }
    }
    Ok(BoundaryLoop { points, params, segments: set.segments.clone() })
}

/// Uniform-size mesh with target edge length `h_target`.
pub fn generate_mesh(domain: &DomainSpec, h_target: f64) -> Result<Mesh> {
    if !(h_target > 0.0) {
        return Err(Error::NonPositiveArgument { x: h_target });
    }
    domain.validate()?;
    generate_mesh_sized(&MeshDomain::from_domain(domain), &|_| h_target, MeshOptions::default())
}

/// Mesh with a spatially varying target edge length `size(x)`.
pub fn generate_mesh_sized(domain: &MeshDomain, size: &dyn Fn(Point) -> f64, opts: MeshOptions) -> Result<Mesh> {
    let mut loops = Vec::with_capacity(1 + domain.holes.len());
    for set in core::iter::once(&domain.outer).chain(domain.holes.iter()) {
        if set.closure_gap() > 1e-10 {
            return Err(Error::Geometry("boundary loop is not closed".into()));
        }
        for s in &set.segments {
            if let Shape::EllipseArc { a, b, .. } = s.shape {
                if !(a > 0.0 && b > 0.0) {
                    return Err(Error::Geometry("ellipse axes must be positive".into()));
                }
            }
        }
        loops.push(sample_loop(set, size)?);
    }
    let mut tri = delaunay::Triangulator::new(&loops, size, opts);
    tri.triangulate(&loops)?;
    tri.refine()?;
    let out = tri.finish();
    let mut edges = out.edges;
    // loop order, then curve order, then position along the curve
    edges.sort_by(|a, b| a.2.cmp(&b.2).then(a.3.partial_cmp(&b.3).unwrap_or(core::cmp::Ordering::Equal)));
    let boundary_edges = edges.into_iter().map(|(nodes, tag, _, _)| BoundaryEdge { nodes, tag }).collect();
    Mesh::from_parts(out.nodes, out.triangles, boundary_edges)
}
