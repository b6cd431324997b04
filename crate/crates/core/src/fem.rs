//! P1 finite elements on `Ω_tr`: stiffness, mass, Dirichlet elimination on
//! `Γ_D`, and the trace coupling to the P1 space on `Γ_tr`.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::TAU;

#[allow(unused_imports)]
use num_traits::Float;

use crate::geometry::BoundaryTag;
use crate::mesh::Mesh;
use crate::sparse::{linear_combination, Csr};
use crate::{Error, Point, Result, C64};

/// Element stiffness `∫ ∇φ_i · ∇φ_j` of an affine triangle.
pub fn element_stiffness(p: [Point; 3]) -> [[f64; 3]; 3] {
    let area2 = (p[1][0] - p[0][0]) * (p[2][1] - p[0][1]) - (p[1][1] - p[0][1]) * (p[2][0] - p[0][0]);
    // ∇φ_i = rot90(edge opposite i) / (2|T|)
    let g = [0, 1, 2].map(|i| {
        let a = p[(i + 1) % 3];
        let b = p[(i + 2) % 3];
        [a[1] - b[1], b[0] - a[0]]
    });
    let mut k = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            k[i][j] = (g[i][0] * g[j][0] + g[i][1] * g[j][1]) / (2.0 * area2);
        }
    }
    k
}

/// Element mass `|T|/12 · (1 + δ_ij)`.
pub fn element_mass(p: [Point; 3]) -> [[f64; 3]; 3] {
    let area = 0.5 * ((p[1][0] - p[0][0]) * (p[2][1] - p[0][1]) - (p[1][1] - p[0][1]) * (p[2][0] - p[0][0]));
    let mut m = [[area / 12.0; 3]; 3];
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = area / 6.0;
    }
    m
}

/// Stiffness and mass on all mesh nodes, before any elimination.
pub fn assemble_full(mesh: &Mesh) -> Result<(Csr<f64>, Csr<f64>)> {
    assemble_on(mesh, &(0..mesh.nodes.len()).map(Some).collect::<Vec<_>>(), mesh.nodes.len())
}

fn assemble_on(mesh: &Mesh, dof_of_node: &[Option<usize>], ndof: usize) -> Result<(Csr<f64>, Csr<f64>)> {
    let mut kt = Vec::with_capacity(9 * mesh.triangles.len());
    let mut mt = Vec::with_capacity(9 * mesh.triangles.len());
    for (ti, tri) in mesh.triangles.iter().enumerate() {
        let p = tri.map(|v| mesh.nodes[v]);
        if !(mesh.triangle_area(ti) > 0.0) {
            return Err(Error::InvalidMesh(alloc::format!("triangle {ti} has non-positive area")));
        }
        let ke = element_stiffness(p);
        let me = element_mass(p);
        for a in 0..3 {
            let Some(i) = dof_of_node[tri[a]] else { continue };
            for b in 0..3 {
                let Some(j) = dof_of_node[tri[b]] else { continue };
                kt.push((i, j, ke[a][b]));
                mt.push((i, j, me[a][b]));
            }
        }
    }
    Ok((Csr::from_triplets(ndof, ndof, &kt)?, Csr::from_triplets(ndof, ndof, &mt)?))
}

/// Uniform P1 boundary space on the truncation circle: node angles ascending
/// counterclockwise, with the volume dofs they coincide with.
#[derive(Debug, Clone, PartialEq)]
pub struct CircleSpace {
    pub radius: f64,
    pub center: Point,
    /// Angle of the first node; node `i` sits at `theta0 + i·2π/M`.
    pub theta0: f64,
    /// Mesh node of boundary basis function `i`.
    pub nodes: Vec<usize>,
}

impl CircleSpace {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// `m` uniform nodes on a circle, standing alone (node ids `0..m`).
    pub fn uniform(center: Point, radius: f64, m: usize) -> Self {
        CircleSpace { radius, center, theta0: 0.0, nodes: (0..m).collect() }
    }

    pub fn spacing(&self) -> f64 {
        TAU / self.nodes.len() as f64
    }

    pub fn angle(&self, i: usize) -> f64 {
        self.theta0 + i as f64 * self.spacing()
    }

    /// Extracts the `Γ_tr` nodes of a mesh and checks they are uniform on a
    /// circle.
    pub fn from_mesh(mesh: &Mesh) -> Result<Self> {
        let ids = mesh.tagged_nodes(BoundaryTag::GammaTr);
        if ids.len() < 3 {
            return Err(Error::InvalidMesh("truncation boundary has fewer than 3 nodes".into()));
        }
        let n = ids.len() as f64;
        let center = [
            ids.iter().map(|&v| mesh.nodes[v][0]).sum::<f64>() / n,
            ids.iter().map(|&v| mesh.nodes[v][1]).sum::<f64>() / n,
        ];
        let mut tagged: Vec<(f64, usize, f64)> = ids
            .iter()
            .map(|&v| {
                let dx = mesh.nodes[v][0] - center[0];
                let dy = mesh.nodes[v][1] - center[1];
                (dy.atan2(dx), v, dx.hypot(dy))
            })
            .collect();
        tagged.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap_or(core::cmp::Ordering::Equal));
        let radius = tagged.iter().map(|t| t.2).sum::<f64>() / n;
        let step = TAU / n;
        for (i, t) in tagged.iter().enumerate() {
            if (t.2 - radius).abs() > 1e-9 * radius {
                return Err(Error::InvalidMesh("truncation boundary nodes are not on a circle".into()));
            }
            let expect = tagged[0].0 + i as f64 * step;
            if (t.0 - expect).abs() > 1e-9 {
                return Err(Error::InvalidMesh("truncation boundary nodes are not uniform in angle".into()));
            }
        }
        let theta0 = tagged[0].0;
        Ok(CircleSpace { radius, center, theta0, nodes: tagged.into_iter().map(|t| t.1).collect() })
    }
}

/// FEM matrices on the retained dofs (all nodes not on `Γ_D`).
#[derive(Debug, Clone, PartialEq)]
pub struct AssembledFem {
    pub k: Csr<f64>,
    pub m: Csr<f64>,
    pub wavenumber: f64,
    pub dof_of_node: Vec<Option<usize>>,
    pub node_of_dof: Vec<usize>,
    /// Dof of each boundary basis function on `Γ_tr` (same order as the
    /// [`CircleSpace`]); empty when the mesh has no truncation boundary.
    pub gamma_tr_dofs: Vec<usize>,
}

impl AssembledFem {
    pub fn ndof(&self) -> usize {
        self.node_of_dof.len()
    }

    /// `A_k = K − k² M`.
    pub fn a_k(&self) -> Csr<C64> {
        let a = linear_combination(1.0, &self.k, -self.wavenumber * self.wavenumber, &self.m)
            .expect("K and M share their pattern");
        a.map(|v| C64::new(v, 0.0))
    }

    /// Expands a dof vector to all mesh nodes (zero on `Γ_D`).
    pub fn to_nodes<T: Copy + num_traits::Zero>(&self, dofs: &[T]) -> Vec<T> {
        self.dof_of_node.iter().map(|d| d.map_or(T::zero(), |i| dofs[i])).collect()
    }
}

/// Assembles `K`, `M` with homogeneous Dirichlet nodes on `Γ_D` eliminated.
pub fn assemble_fem(mesh: &Mesh, k: f64) -> Result<AssembledFem> {
    if !(k > 0.0) {
        return Err(Error::NonPositiveArgument { x: k });
    }
    assemble_fem_static(mesh, k)
}

fn assemble_fem_static(mesh: &Mesh, k: f64) -> Result<AssembledFem> {
    let dirichlet = mesh.tagged_nodes(BoundaryTag::GammaD);
    let mut dof_of_node = vec![None; mesh.nodes.len()];
    let mut node_of_dof = Vec::new();
    for v in 0..mesh.nodes.len() {
        if dirichlet.binary_search(&v).is_err() {
            dof_of_node[v] = Some(node_of_dof.len());
            node_of_dof.push(v);
        }
    }
    if node_of_dof.is_empty() {
        return Err(Error::InvalidMesh("no degrees of freedom after Dirichlet elimination".into()));
    }
    let (kk, mm) = assemble_on(mesh, &dof_of_node, node_of_dof.len())?;
    let gamma_tr_dofs = if mesh.boundary_edges.iter().any(|e| e.tag == BoundaryTag::GammaTr) {
        CircleSpace::from_mesh(mesh)?
            .nodes
            .iter()
            .map(|&v| dof_of_node[v].ok_or_else(|| Error::InvalidMesh("node on both Γ_D and Γ_tr".into())))
            .collect::<Result<Vec<_>>>()?
    } else {
        Vec::new()
    };
    Ok(AssembledFem { k: kk, m: mm, wavenumber: k, dof_of_node, node_of_dof, gamma_tr_dofs })
}

/// Dirichlet-eliminated matrices without a wavenumber (for eigen-oracles).
pub fn assemble_dirichlet(mesh: &Mesh) -> Result<AssembledFem> {
    assemble_fem_static(mesh, 0.0)
}

/// Circulant P1 mass matrix of the circle space, first row `(2/3, 1/6, …, 1/6)·RΔ`.
pub fn boundary_mass_row(space: &CircleSpace) -> Vec<f64> {
    let m = space.len();
    let w = space.radius * space.spacing();
    let mut row = vec![0.0; m];
    row[0] += 2.0 * w / 3.0;
    row[1 % m] += w / 6.0;
    row[(m - 1) % m] += w / 6.0;
    row
}

/// `(Mtr)_{ij} = ⟨γ v_j, ψ_i⟩`: rows are boundary basis functions, columns
/// volume dofs. Boundary elements are the arcs between consecutive nodes.
pub fn assemble_trace(fem: &AssembledFem, space: &CircleSpace) -> Result<Csr<f64>> {
    if fem.gamma_tr_dofs.len() != space.len() {
        return Err(Error::Dimension("boundary space does not match the mesh trace".into()));
    }
    for (i, &node) in space.nodes.iter().enumerate() {
        if fem.dof_of_node.get(node).copied().flatten() != Some(fem.gamma_tr_dofs[i]) {
            return Err(Error::InvalidMesh(alloc::format!("boundary node {i} does not coincide with a volume dof")));
        }
    }
    let row = boundary_mass_row(space);
    let m = space.len();
    let mut trip = Vec::with_capacity(3 * m);
    for i in 0..m {
        for (off, &w) in row.iter().enumerate() {
            if w != 0.0 {
                trip.push((i, fem.gamma_tr_dofs[(i + off) % m], w));
            }
        }
    }
    Csr::from_triplets(m, fem.ndof(), &trip)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{CavitySpec, DomainSpec};
    use crate::mesh::generate_mesh;

    #[test]
    fn reference_element() {
        let k = element_stiffness([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]]);
        let expect = [[1.0, -0.5, -0.5], [-0.5, 0.5, 0.0], [-0.5, 0.0, 0.5]];
        for i in 0..3 {
            for j in 0..3 {
                assert!((k[i][j] - expect[i][j]).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn constants_in_kernel_and_mass_sums_to_area() {
        let d = DomainSpec::cavity(CavitySpec::small(), 1.5).unwrap();
        let mesh = generate_mesh(&d, 0.1).unwrap();
        let (k, m) = assemble_full(&mesh).unwrap();
        let ones = vec![1.0; mesh.nodes.len()];
        let mut y = vec![0.0; mesh.nodes.len()];
        k.matvec(&ones, &mut y);
        assert!(y.iter().all(|v| v.abs() < 1e-12));
        let total: f64 = m.values.iter().sum();
        assert!((total - mesh.area()).abs() < 1e-12);
        assert!(k.max_asymmetry() < 1e-14 && m.max_asymmetry() < 1e-16);
    }

    #[test]
    fn elimination_matches_submatrix() {
        let d = DomainSpec::cavity(CavitySpec::large(), 1.5).unwrap();
        let mesh = generate_mesh(&d, 0.12).unwrap();
        let (kf, mf) = assemble_full(&mesh).unwrap();
        let fem = assemble_fem(&mesh, 3.0).unwrap();
        for (i, &ni) in fem.node_of_dof.iter().enumerate() {
            for (j, &nj) in fem.node_of_dof.iter().enumerate().step_by(7) {
                assert_eq!(fem.k.get(i, j), kf.get(ni, nj));
                assert_eq!(fem.m.get(i, j), mf.get(ni, nj));
            }
        }
        let a = fem.a_k();
        a.for_each(|i, j, v| assert!((v.re - (fem.k.get(i, j) - 9.0 * fem.m.get(i, j))).abs() < 1e-14));
    }

    #[test]
    fn trace_rows_sum_to_support() {
        let d = DomainSpec::cavity(CavitySpec::small(), 2.0).unwrap();
        let mesh = generate_mesh(&d, 0.1).unwrap();
        let fem = assemble_fem(&mesh, 2.0).unwrap();
        let space = CircleSpace::from_mesh(&mesh).unwrap();
        let tr = assemble_trace(&fem, &space).unwrap();
        let l = space.radius * space.spacing();
        for i in 0..space.len() {
            let s: f64 = (tr.indptr[i]..tr.indptr[i + 1]).map(|p| tr.values[p]).sum();
            assert!((s - l).abs() < 1e-14);
        }
        // two hats sharing an element of length L
        let (a, b) = (fem.gamma_tr_dofs[0], fem.gamma_tr_dofs[1]);
        assert!((tr.get(0, b) - l / 6.0).abs() < 1e-15);
        assert!((tr.get(0, a) - 2.0 * l / 3.0).abs() < 1e-15);
        // an interior dof column is zero
        let interior = (0..fem.ndof()).find(|d| !fem.gamma_tr_dofs.contains(d)).unwrap();
        assert!((0..space.len()).all(|i| tr.get(i, interior) == 0.0));
    }
}
