//! Bucket-grid point location for P1 interpolation on a finished mesh.

use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use super::Mesh;
use crate::Point;

pub struct PointLocator<'m> {
    mesh: &'m Mesh,
    lo: Point,
    cell: f64,
    nx: usize,
    ny: usize,
    buckets: Vec<Vec<u32>>,
}

impl<'m> PointLocator<'m> {
    pub fn new(mesh: &'m Mesh) -> Self {
        let mut lo = [f64::INFINITY; 2];
        let mut hi = [f64::NEG_INFINITY; 2];
        for p in &mesh.nodes {
            for d in 0..2 {
                lo[d] = lo[d].min(p[d]);
                hi[d] = hi[d].max(p[d]);
            }
        }
        let n = (mesh.triangles.len().max(1) as f64).sqrt().ceil() as usize;
        let cell = ((hi[0] - lo[0]).max(hi[1] - lo[1]) / n as f64).max(1e-12);
        let nx = ((hi[0] - lo[0]) / cell) as usize + 1;
        let ny = ((hi[1] - lo[1]) / cell) as usize + 1;
        let mut buckets = vec![Vec::new(); nx * ny];
        for (t, tri) in mesh.triangles.iter().enumerate() {
            let ps = tri.map(|v| mesh.nodes[v]);
            let bx0 = ((ps.iter().map(|p| p[0]).fold(f64::INFINITY, f64::min) - lo[0]) / cell) as usize;
            let bx1 = ((ps.iter().map(|p| p[0]).fold(f64::NEG_INFINITY, f64::max) - lo[0]) / cell) as usize;
            let by0 = ((ps.iter().map(|p| p[1]).fold(f64::INFINITY, f64::min) - lo[1]) / cell) as usize;
            let by1 = ((ps.iter().map(|p| p[1]).fold(f64::NEG_INFINITY, f64::max) - lo[1]) / cell) as usize;
            for by in by0..=by1.min(ny - 1) {
                for bx in bx0..=bx1.min(nx - 1) {
                    buckets[by * nx + bx].push(t as u32);
                }
            }
        }
        PointLocator { mesh, lo, cell, nx, ny, buckets }
    }

    /// Containing triangle and barycentric coordinates of `p`.
    pub fn locate(&self, p: Point) -> Option<(usize, [f64; 3])> {
        let fx = (p[0] - self.lo[0]) / self.cell;
        let fy = (p[1] - self.lo[1]) / self.cell;
        if fx < 0.0 || fy < 0.0 {
            return None;
        }
        let (bx, by) = (fx as usize, fy as usize);
        if bx >= self.nx || by >= self.ny {
            return None;
        }
        let tol = -1e-12;
        for &t in &self.buckets[by * self.nx + bx] {
            let [a, b, c] = self.mesh.triangles[t as usize].map(|v| self.mesh.nodes[v]);
            let det = (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0]);
            let l1 = ((p[0] - a[0]) * (c[1] - a[1]) - (p[1] - a[1]) * (c[0] - a[0])) / det;
            let l2 = ((b[0] - a[0]) * (p[1] - a[1]) - (b[1] - a[1]) * (p[0] - a[0])) / det;
            let l0 = 1.0 - l1 - l2;
            if l0 >= tol && l1 >= tol && l2 >= tol {
                return Some((t as usize, [l0, l1, l2]));
            }
        }
        None
    }

    /// P1 interpolant of nodal values at `p`, `None` outside the mesh.
    pub fn interpolate<T>(&self, values: &[T], p: Point) -> Option<T>
    where
        T: Copy + core::ops::Mul<f64, Output = T> + core::ops::Add<Output = T>,
    {
        let (t, l) = self.locate(p)?;
        let v = self.mesh.triangles[t];
        Some(values[v[0]] * l[0] + values[v[1]] * l[1] + values[v[2]] * l[2])
    }
}
