//! Incremental constrained Delaunay triangulation (Bowyer–Watson cavities that
//! never cross constrained edges) and Ruppert refinement with curved segments.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;
use robust::{incircle, orient2d, Coord};

use super::{BoundaryLoop, MeshOptions};
use crate::geometry::{BoundaryTag, Segment};
use crate::{Error, Point, Result};

const NONE: u32 = u32::MAX;

#[derive(Debug, Clone, Copy)]
struct Tri {
    v: [u32; 3],
    /// `n[i]` is the neighbour across the edge opposite `v[i]`.
    n: [u32; 3],
    /// Edge opposite `v[i]` is constrained.
    c: [bool; 3],
    alive: bool,
    interior: bool,
}

/// A piece of an input curve between two mesh vertices.
#[derive(Debug, Clone, Copy)]
struct SubSeg {
    a: u32,
    b: u32,
    curve: usize,
    ta: f64,
    tb: f64,
}

enum Located {
    Inside(u32),
    Blocked(u32, usize),
}

struct CavityEdge {
    u: u32,
    v: u32,
    outside: u32,
    constrained: bool,
    interior: bool,
}

pub(super) struct Triangulator<'a> {
    pts: Vec<Point>,
    tris: Vec<Tri>,
    free: Vec<u32>,
    /// Some live triangle incident to each vertex.
    vt: Vec<u32>,
    curves: Vec<(Segment, bool)>,
    subsegs: BTreeMap<(u32, u32), SubSeg>,
    size: &'a dyn Fn(Point) -> f64,
    opts: MeshOptions,
    hint: u32,
    walk_rot: usize,
    nsuper: u32,
}

fn coord(p: Point) -> Coord<f64> {
    Coord { x: p[0], y: p[1] }
}

fn key(a: u32, b: u32) -> (u32, u32) {
    if a < b {
        (a, b)
    } else {
        (b, a)
    }
}

pub(super) struct Triangulated {
    pub nodes: Vec<Point>,
    pub triangles: Vec<[usize; 3]>,
    pub edges: Vec<([usize; 2], BoundaryTag, usize, f64)>,
}

impl<'a> Triangulator<'a> {
    pub(super) fn new(loops: &[BoundaryLoop], size: &'a dyn Fn(Point) -> f64, opts: MeshOptions) -> Self {
        let mut lo = [f64::INFINITY; 2];
        let mut hi = [f64::NEG_INFINITY; 2];
        for l in loops {
            for p in &l.points {
                for d in 0..2 {
                    lo[d] = lo[d].min(p[d]);
                    hi[d] = hi[d].max(p[d]);
                }
            }
        }
        let c = [0.5 * (lo[0] + hi[0]), 0.5 * (lo[1] + hi[1])];
        let r = 20.0 * (hi[0] - lo[0]).max(hi[1] - lo[1]).max(1e-3);
        let pts = vec![[c[0] - 2.0 * r, c[1] - r], [c[0] + 2.0 * r, c[1] - r], [c[0], c[1] + 2.0 * r]];
        let tris = vec![Tri { v: [0, 1, 2], n: [NONE; 3], c: [false; 3], alive: true, interior: false }];
        Triangulator {
            pts,
            tris,
            free: Vec::new(),
            vt: vec![0, 0, 0],
            curves: Vec::new(),
            subsegs: BTreeMap::new(),
            size,
            opts,
            hint: 0,
            walk_rot: 0,
            nsuper: 3,
        }
    }

    fn orient(&self, a: u32, b: u32, p: Point) -> f64 {
        orient2d(coord(self.pts[a as usize]), coord(self.pts[b as usize]), coord(p))
    }

    fn in_circle(&self, t: u32, p: Point) -> bool {
        let v = self.tris[t as usize].v;
        incircle(
            coord(self.pts[v[0] as usize]),
            coord(self.pts[v[1] as usize]),
            coord(self.pts[v[2] as usize]),
            coord(p),
        ) > 0.0
    }

    /// Visibility walk towards `p`. Stops at constrained edges when
    /// `respect` is set.
    fn locate(&mut self, p: Point, start: u32, respect: bool) -> Result<Located> {
        let mut t = start;
        if !self.tris[t as usize].alive {
            t = self.any_alive();
        }
        let cap = 4 * self.tris.len() + 100;
        for _ in 0..cap {
            let tri = self.tris[t as usize];
            let mut moved = false;
            self.walk_rot = (self.walk_rot + 1) % 3;
            for k in 0..3 {
                let i = (k + self.walk_rot) % 3;
                let a = tri.v[(i + 1) % 3];
                let b = tri.v[(i + 2) % 3];
                if self.orient(a, b, p) < 0.0 {
                    if (respect && tri.c[i]) || tri.n[i] == NONE {
                        return Ok(Located::Blocked(t, i));
                    }
                    t = tri.n[i];
                    moved = true;
                    break;
                }
            }
            if !moved {
                return Ok(Located::Inside(t));
            }
        }
        Err(Error::Refinement { x: p[0], y: p[1], reason: "point location did not terminate".into() })
    }

    fn any_alive(&self) -> u32 {
        if self.tris[self.hint as usize].alive {
            return self.hint;
        }
        self.tris.iter().position(|t| t.alive).unwrap_or(0) as u32
    }

    /// Bowyer–Watson cavity of `p` grown from `t0` (which must contain `p`).
    fn cavity(&self, p: Point, t0: u32) -> (Vec<u32>, Vec<CavityEdge>) {
        let mut inside = vec![t0];
        let mut edges = Vec::new();
        let mut stack = vec![t0];
        while let Some(t) = stack.pop() {
            let tri = self.tris[t as usize];
            for i in 0..3 {
                let nb = tri.n[i];
                let is_cav = !tri.c[i]
                    && nb != NONE
                    && (inside.contains(&nb) || {
                        let inc = self.in_circle(nb, p);
                        if inc {
                            inside.push(nb);
                            stack.push(nb);
                        }
                        inc
                    });
                if !is_cav {
                    edges.push(CavityEdge {
                        u: tri.v[(i + 1) % 3],
                        v: tri.v[(i + 2) % 3],
                        outside: nb,
                        constrained: tri.c[i],
                        interior: tri.interior,
                    });
                }
            }
        }
        (inside, edges)
    }

    fn alloc_tri(&mut self, t: Tri) -> u32 {
        if let Some(i) = self.free.pop() {
            self.tris[i as usize] = t;
            i
        } else {
            self.tris.push(t);
            (self.tris.len() - 1) as u32
        }
    }

    /// Inserts `p` into the cavity grown from `t0`. Returns the new triangles.
    fn insert_at(&mut self, p: Point, t0: u32) -> Result<(u32, Vec<u32>)> {
        let (cav, edges) = self.cavity(p, t0);
        let pi = self.pts.len() as u32;
        for e in &edges {
            if self.orient(e.u, e.v, p) <= 0.0 {
                return Err(Error::Refinement {
                    x: p[0],
                    y: p[1],
                    reason: "insertion cavity is not star-shaped (point on a constrained edge?)".into(),
                });
            }
        }
        self.pts.push(p);
        self.vt.push(NONE);
        for &t in &cav {
            self.tris[t as usize].alive = false;
        }
        let mut created = Vec::with_capacity(edges.len());
        for e in &edges {
            let nt = self.alloc_tri(Tri {
                v: [e.u, e.v, pi],
                n: [NONE, NONE, e.outside],
                c: [false, false, e.constrained],
                alive: true,
                interior: e.interior,
            });
            created.push(nt);
            if e.outside != NONE {
                let o = &mut self.tris[e.outside as usize];
                for j in 0..3 {
                    let a = o.v[(j + 1) % 3];
                    let b = o.v[(j + 2) % 3];
                    if a == e.v && b == e.u {
                        o.n[j] = nt;
                    }
                }
            }
        }
        // link the fan: (u, v, p) borders (v, w, p) across edge (v, p)
        for (idx, e) in edges.iter().enumerate() {
            let t = created[idx];
            let next = edges.iter().position(|f| f.u == e.v).expect("cavity boundary is a closed loop");
            let tn = created[next];
            self.tris[t as usize].n[0] = tn;
            self.tris[tn as usize].n[1] = t;
        }
        for &t in &cav {
            if !created.contains(&t) {
                self.free.push(t);
            }
        }
        for &t in &created {
            for &v in &self.tris[t as usize].v {
                self.vt[v as usize] = t;
            }
        }
        self.hint = created[0];
        Ok((pi, created))
    }

    fn insert(&mut self, p: Point, start: u32, respect: bool) -> Result<(u32, Vec<u32>)> {
        match self.locate(p, start, respect)? {
            Located::Inside(t) => self.insert_at(p, t),
            Located::Blocked(..) => Err(Error::Refinement {
                x: p[0],
                y: p[1],
                reason: "point not reachable without crossing a boundary".into(),
            }),
        }
    }

    /// Triangle and local index `i` such that the edge opposite `v[i]` runs
    /// from `a` to `b`, if the edge exists.
    fn find_edge(&self, a: u32, b: u32) -> Option<(u32, usize)> {
        let start = self.vt[a as usize];
        if start == NONE {
            return None;
        }
        let mut t = start;
        // rotate one way, then the other if we hit the hull
        for dir in 0..2 {
            for _ in 0..10_000 {
                let tri = &self.tris[t as usize];
                let j = tri.v.iter().position(|&v| v == a)?;
                let x = tri.v[(j + 1) % 3];
                let y = tri.v[(j + 2) % 3];
                if x == b {
                    return Some((t, (j + 2) % 3));
                }
                if y == b {
                    return Some((t, (j + 1) % 3));
                }
                let nxt = if dir == 0 { tri.n[(j + 1) % 3] } else { tri.n[(j + 2) % 3] };
                if nxt == NONE {
                    break;
                }
                t = nxt;
                if t == start {
                    return None;
                }
            }
            t = start;
        }
        None
    }

    fn set_constraint(&mut self, a: u32, b: u32, on: bool) -> bool {
        match self.find_edge(a, b) {
            None => false,
            Some((t, i)) => {
                self.tris[t as usize].c[i] = on;
                let nb = self.tris[t as usize].n[i];
                if nb != NONE {
                    let o = &mut self.tris[nb as usize];
                    for j in 0..3 {
                        let u = o.v[(j + 1) % 3];
                        let w = o.v[(j + 2) % 3];
                        if (u == a && w == b) || (u == b && w == a) {
                            o.c[j] = on;
                        }
                    }
                }
                true
            }
        }
    }

    fn curve_point(&self, s: &SubSeg, t: f64) -> Point {
        self.curves[s.curve].0.eval(t).0
    }

    /// Builds the boundary-conforming Delaunay triangulation of the loops.
    pub(super) fn triangulate(&mut self, loops: &[BoundaryLoop]) -> Result<()> {
        let mut pending = Vec::new();
        for l in loops {
            let base_curve = self.curves.len();
            for s in &l.segments {
                self.curves.push((*s, s.tag == BoundaryTag::GammaTr));
            }
            let first = self.pts.len() as u32;
            let n = l.points.len();
            for i in 0..n {
                let start = self.hint;
                self.insert(l.points[i], start, false)?;
            }
            for i in 0..n {
                let j = (i + 1) % n;
                let (curve, ta) = l.params[i];
                let tb = if j != 0 && l.params[j].0 == curve {
                    l.params[j].1
                } else {
                    self.curves[base_curve + curve].0.param_range().1
                };
                pending.push(SubSeg { a: first + i as u32, b: first + j as u32, curve: base_curve + curve, ta, tb });
            }
        }
        // conforming recovery by splitting at curve midpoints
        let mut guard = 0usize;
        while let Some(s) = pending.pop() {
            guard += 1;
            if guard > self.opts.max_points {
                let p = self.pts[s.a as usize];
                return Err(Error::Refinement { x: p[0], y: p[1], reason: "boundary recovery did not terminate".into() });
            }
            if self.find_edge(s.a, s.b).is_some() {
                self.subsegs.insert(key(s.a, s.b), s);
                continue;
            }
            let tm = 0.5 * (s.ta + s.tb);
            let m = self.curve_point(&s, tm);
            let start = self.vt[s.a as usize];
            let (mi, _) = self.insert(m, start, false)?;
            pending.push(SubSeg { a: s.a, b: mi, curve: s.curve, ta: s.ta, tb: tm });
            pending.push(SubSeg { a: mi, b: s.b, curve: s.curve, ta: tm, tb: s.tb });
        }
        let keys: Vec<(u32, u32)> = self.subsegs.keys().copied().collect();
        for (a, b) in keys {
            if !self.set_constraint(a, b, true) {
                let p = self.pts[a as usize];
                return Err(Error::Refinement { x: p[0], y: p[1], reason: "segment lost during recovery".into() });
            }
        }
        self.classify();
        Ok(())
    }

    /// Flood fill from the super-triangle; crossing a constrained edge flips
    /// inside/outside.
    fn classify(&mut self) {
        let mut seen = vec![false; self.tris.len()];
        let start = self.vt[0];
        let mut stack = vec![(start, false)];
        seen[start as usize] = true;
        while let Some((t, inside)) = stack.pop() {
            self.tris[t as usize].interior = inside;
            let tri = self.tris[t as usize];
            for i in 0..3 {
                let nb = tri.n[i];
                if nb != NONE && !seen[nb as usize] && self.tris[nb as usize].alive {
                    seen[nb as usize] = true;
                    stack.push((nb, inside ^ tri.c[i]));
                }
            }
        }
    }

    fn circumcenter(&self, t: u32) -> (Point, f64) {
        let v = self.tris[t as usize].v;
        let a = self.pts[v[0] as usize];
        let b = self.pts[v[1] as usize];
        let c = self.pts[v[2] as usize];
        let (bx, by) = (b[0] - a[0], b[1] - a[1]);
        let (cx, cy) = (c[0] - a[0], c[1] - a[1]);
        let d = 2.0 * (bx * cy - by * cx);
        let b2 = bx * bx + by * by;
        let c2 = cx * cx + cy * cy;
        let ux = (cy * b2 - by * c2) / d;
        let uy = (bx * c2 - cx * b2) / d;
        ([a[0] + ux, a[1] + uy], ux.hypot(uy))
    }

    fn is_bad(&self, t: u32) -> bool {
        let tri = &self.tris[t as usize];
        if !tri.alive || !tri.interior {
            return false;
        }
        let p: [Point; 3] = [self.pts[tri.v[0] as usize], self.pts[tri.v[1] as usize], self.pts[tri.v[2] as usize]];
        let mut shortest = f64::INFINITY;
        for i in 0..3 {
            let a = p[i];
            let b = p[(i + 1) % 3];
            shortest = shortest.min((a[0] - b[0]).hypot(a[1] - b[1]));
        }
        let (_, r) = self.circumcenter(t);
        let centroid = [(p[0][0] + p[1][0] + p[2][0]) / 3.0, (p[0][1] + p[1][1] + p[2][1]) / 3.0];
        r > self.opts.radius_edge_ratio * shortest || r > self.opts.size_factor * (self.size)(centroid)
    }

    fn protected(&self, s: &SubSeg) -> bool {
        self.curves[s.curve].1
    }

    /// Apex of the interior triangle on edge `s` lies in its diametral circle.
    fn encroached(&self, s: &SubSeg) -> bool {
        let Some((t, i)) = self.find_edge(s.a, s.b) else { return false };
        let a = self.pts[s.a as usize];
        let b = self.pts[s.b as usize];
        let check = |t: u32, i: usize| -> bool {
            let tri = &self.tris[t as usize];
            if !tri.interior {
                return false;
            }
            let c = self.pts[tri.v[i] as usize];
            (a[0] - c[0]) * (b[0] - c[0]) + (a[1] - c[1]) * (b[1] - c[1]) < 0.0
        };
        if check(t, i) {
            return true;
        }
        let nb = self.tris[t as usize].n[i];
        if nb == NONE {
            return false;
        }
        let o = &self.tris[nb as usize];
        (0..3).any(|j| o.v[j] != s.a && o.v[j] != s.b && check(nb, j))
    }

    fn split(&mut self, s: SubSeg, bad: &mut Vec<(u32, [u32; 3])>, segq: &mut Vec<(u32, u32)>) -> Result<()> {
        let (t, _) = self.find_edge(s.a, s.b).ok_or_else(|| {
            let p = self.pts[s.a as usize];
            Error::Refinement { x: p[0], y: p[1], reason: "subsegment missing".into() }
        })?;
        self.set_constraint(s.a, s.b, false);
        self.subsegs.remove(&key(s.a, s.b));
        let tm = 0.5 * (s.ta + s.tb);
        let m = self.curve_point(&s, tm);
        let (mi, created) = self.insert(m, t, true)?;
        let s1 = SubSeg { a: s.a, b: mi, curve: s.curve, ta: s.ta, tb: tm };
        let s2 = SubSeg { a: mi, b: s.b, curve: s.curve, ta: tm, tb: s.tb };
        for ss in [s1, s2] {
            if !self.set_constraint(ss.a, ss.b, true) {
                return Err(Error::Refinement {
                    x: m[0],
                    y: m[1],
                    reason: "curved boundary sampled too coarsely for its curvature".into(),
                });
            }
            self.subsegs.insert(key(ss.a, ss.b), ss);
            segq.push(key(ss.a, ss.b));
        }
        self.after_insert(&created, bad, segq);
        Ok(())
    }

    fn after_insert(&mut self, created: &[u32], bad: &mut Vec<(u32, [u32; 3])>, segq: &mut Vec<(u32, u32)>) {
        for &t in created {
            let tri = self.tris[t as usize];
            bad.push((t, tri.v));
            for i in 0..3 {
                if tri.c[i] {
                    segq.push(key(tri.v[(i + 1) % 3], tri.v[(i + 2) % 3]));
                }
            }
        }
    }

    /// Ruppert refinement until every interior triangle meets the quality and
    /// size targets.
    pub(super) fn refine(&mut self) -> Result<()> {
        let mut segq: Vec<(u32, u32)> = self.subsegs.keys().copied().collect();
        segq.reverse();
        let mut bad: Vec<(u32, [u32; 3])> = (0..self.tris.len() as u32)
            .filter(|&t| self.tris[t as usize].alive)
            .map(|t| (t, self.tris[t as usize].v))
            .collect();
        bad.reverse();
        let mut head = 0usize;
        loop {
            if self.pts.len() > self.opts.max_points {
                let p = self.pts[self.pts.len() - 1];
                return Err(Error::Refinement { x: p[0], y: p[1], reason: "node budget exhausted".into() });
            }
            if let Some(k) = segq.pop() {
                let Some(&s) = self.subsegs.get(&k) else { continue };
                if !self.protected(&s) && self.encroached(&s) {
                    self.split(s, &mut bad, &mut segq)?;
                }
                continue;
            }
            // FIFO over bad triangles keeps insertions spatially spread
            if head >= bad.len() {
                break;
            }
            let (t, verts) = bad[head];
            head += 1;
            if head > 1 << 16 && head * 2 > bad.len() {
                bad.drain(..head);
                head = 0;
            }
            if self.tris[t as usize].v != verts || !self.is_bad(t) {
                continue;
            }
            let (cc, _) = self.circumcenter(t);
            let target = match self.locate(cc, t, true)? {
                Located::Blocked(bt, i) => {
                    let tri = self.tris[bt as usize];
                    let k = key(tri.v[(i + 1) % 3], tri.v[(i + 2) % 3]);
                    match self.subsegs.get(&k).copied() {
                        Some(s) if !self.protected(&s) => {
                            self.split(s, &mut bad, &mut segq)?;
                            bad.push((t, verts));
                            continue;
                        }
                        _ => None,
                    }
                }
                Located::Inside(ct) => Some(ct),
            };
            let target = match target {
                Some(ct) => {
                    let (_, edges) = self.cavity(cc, ct);
                    let mut enc = Vec::new();
                    let mut blocked_by_protected = false;
                    for e in edges.iter().filter(|e| e.constrained) {
                        let a = self.pts[e.u as usize];
                        let b = self.pts[e.v as usize];
                        if (a[0] - cc[0]) * (b[0] - cc[0]) + (a[1] - cc[1]) * (b[1] - cc[1]) < 0.0 {
                            match self.subsegs.get(&key(e.u, e.v)).copied() {
                                Some(s) if !self.protected(&s) => enc.push(s),
                                _ => blocked_by_protected = true,
                            }
                        }
                    }
                    if !enc.is_empty() {
                        for s in enc {
                            if self.subsegs.contains_key(&key(s.a, s.b)) {
                                self.split(s, &mut bad, &mut segq)?;
                            }
                        }
                        bad.push((t, verts));
                        continue;
                    }
                    if blocked_by_protected {
                        None
                    } else {
                        Some((cc, ct))
                    }
                }
                None => None,
            };
            let (p, start) = match target {
                Some(x) => x,
                None => {
                    // protected boundary nearby: fall back to the centroid
                    let v = verts.map(|i| self.pts[i as usize]);
                    ([(v[0][0] + v[1][0] + v[2][0]) / 3.0, (v[0][1] + v[1][1] + v[2][1]) / 3.0], t)
                }
            };
            let (_, created) = self.insert_at(p, start)?;
            self.after_insert(&created, &mut bad, &mut segq);
        }
        Ok(())
    }

    /// Interior triangles with vertices renumbered in insertion order.
    pub(super) fn finish(self) -> Triangulated {
        let mut map = vec![usize::MAX; self.pts.len()];
        let mut used = vec![false; self.pts.len()];
        for t in self.tris.iter().filter(|t| t.alive && t.interior) {
            for &v in &t.v {
                used[v as usize] = true;
            }
        }
        let mut nodes = Vec::new();
        for (i, p) in self.pts.iter().enumerate() {
            if used[i] && i as u32 >= self.nsuper {
                map[i] = nodes.len();
                nodes.push(*p);
            }
        }
        let triangles = self
            .tris
            .iter()
            .filter(|t| t.alive && t.interior)
            .map(|t| [map[t.v[0] as usize], map[t.v[1] as usize], map[t.v[2] as usize]])
            .collect();
        let edges = self
            .subsegs
            .values()
            .map(|s| {
                let (seg, _) = self.curves[s.curve];
                ([map[s.a as usize], map[s.b as usize]], seg.tag, s.curve, s.ta)
            })
            .collect();
        Triangulated { nodes, triangles, edges }
    }
}
