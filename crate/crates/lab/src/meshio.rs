//! ASCII mesh files:
//!
//! ```text
//! HTMESH 1
//! NODES n        then n lines "x y"
//! TRIS m         then m lines "i j k"
//! BEDGES b       then b lines "i j tag"   (tag 1 = Γ_D, 2 = Γ_tr)
//! ```
//!
//! Indices are 0-based. Coordinates use 17 significant digits so a written
//! mesh reads back bit-identically.

use std::fmt::Write as _;

use trapmode_core::geometry::BoundaryTag;
use trapmode_core::mesh::{BoundaryEdge, Mesh};
use trapmode_core::{Error, Result};

use crate::formats::fmt17;

pub fn write_mesh(mesh: &Mesh) -> String {
    let mut s = String::with_capacity(64 * (mesh.nodes.len() + mesh.triangles.len()));
    s.push_str("HTMESH 1\n");
    writeln!(s, "NODES {}", mesh.nodes.len()).unwrap();
    for p in &mesh.nodes {
        writeln!(s, "{} {}", fmt17(p[0]), fmt17(p[1])).unwrap();
    }
    writeln!(s, "TRIS {}", mesh.triangles.len()).unwrap();
    for t in &mesh.triangles {
        writeln!(s, "{} {} {}", t[0], t[1], t[2]).unwrap();
    }
    writeln!(s, "BEDGES {}", mesh.boundary_edges.len()).unwrap();
    for e in &mesh.boundary_edges {
        writeln!(s, "{} {} {}", e.nodes[0], e.nodes[1], e.tag.code()).unwrap();
    }
    s
}

fn bad(line: usize, msg: impl std::fmt::Display) -> Error {
    Error::InvalidMesh(format!("line {line}: {msg}"))
}

pub fn read_mesh(text: &str) -> Result<Mesh> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l.trim())).filter(|(_, l)| !l.is_empty());
    let mut next = |what: &str| lines.next().ok_or_else(|| Error::InvalidMesh(format!("unexpected end of file, expected {what}")));
    let (ln, head) = next("header")?;
    if head != "HTMESH 1" {
        return Err(bad(ln, format!("expected \"HTMESH 1\", found {head:?}")));
    }
    fn count(ln: usize, line: &str, key: &str) -> Result<usize> {
        let mut it = line.split_whitespace();
        if it.next() != Some(key) {
            return Err(bad(ln, format!("expected {key}")));
        }
        it.next().and_then(|n| n.parse().ok()).ok_or_else(|| bad(ln, format!("bad {key} count")))
    }
    fn fields<T: std::str::FromStr>(ln: usize, line: &str, n: usize) -> Result<Vec<T>> {
        let v: Vec<T> = line.split_whitespace().map(|t| t.parse::<T>()).collect::<std::result::Result<_, _>>().map_err(|_| bad(ln, "unparsable entry"))?;
        if v.len() != n {
            return Err(bad(ln, format!("expected {n} entries")));
        }
        Ok(v)
    }
    let (ln, l) = next("NODES")?;
    let n = count(ln, l, "NODES")?;
    let mut nodes = Vec::with_capacity(n);
    for _ in 0..n {
        let (ln, l) = next("node")?;
        let v: Vec<f64> = fields(ln, l, 2)?;
        nodes.push([v[0], v[1]]);
    }
    let (ln, l) = next("TRIS")?;
    let m = count(ln, l, "TRIS")?;
    let mut tris = Vec::with_capacity(m);
    for _ in 0..m {
        let (ln, l) = next("triangle")?;
        let v: Vec<usize> = fields(ln, l, 3)?;
        tris.push([v[0], v[1], v[2]]);
    }
    let (ln, l) = next("BEDGES")?;
    let b = count(ln, l, "BEDGES")?;
    let mut edges = Vec::with_capacity(b);
    for _ in 0..b {
        let (ln, l) = next("boundary edge")?;
        let v: Vec<usize> = fields(ln, l, 3)?;
        let tag = u8::try_from(v[2]).ok().and_then(BoundaryTag::from_code).ok_or_else(|| bad(ln, format!("unknown tag {}", v[2])))?;
        edges.push(BoundaryEdge { nodes: [v[0], v[1]], tag });
    }
    Mesh::from_parts(nodes, tris, edges)
}
