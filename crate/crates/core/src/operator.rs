//! Dense Nyström / collocation matrices for the boundary operators.
//!
//! All matrices carry their quadrature weights, so the discrete eigenproblem
//! is the standard one `A x = mu x`; the plasmonic eigenvalue is
//! `lambda = 1 / mu`.

use std::f64::consts::PI;
use std::io::{self, Write};

use faer::Mat;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::geometry::{dot3, sub3, NodeSet2D, SurfaceMesh3D};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum KernelKind {
    K2d,
    K2dDeflated,
    K3dSingle,
    K3dAdjoint,
}

impl KernelKind {
    pub fn is_2d(self) -> bool {
        matches!(self, KernelKind::K2d | KernelKind::K2dDeflated)
    }
}

/// Which 3D density the matrix acts on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Layer3D {
    /// Charge density `sigma`.
    Single,
    /// Dipole density `tau`.
    Adjoint,
}

#[derive(Debug, Clone)]
pub enum Discretization {
    Contour(NodeSet2D),
    Surface(SurfaceMesh3D),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OperatorError {
    #[error("nodes {0} and {1} coincide")]
    CoincidentNodes(usize, usize),
    #[error("non-finite matrix entry at ({0}, {1})")]
    NonFinite(usize, usize),
}

/// A dense discretized integral operator together with the nodes it lives on.
#[derive(Debug, Clone)]
pub struct DiscreteOperator {
    matrix: Mat<f64>,
    discretization: Discretization,
    kind: KernelKind,
}

impl DiscreteOperator {
    pub fn matrix(&self) -> &Mat<f64> {
        &self.matrix
    }

    pub fn kind(&self) -> KernelKind {
        self.kind
    }

    pub fn discretization(&self) -> &Discretization {
        &self.discretization
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    /// Quadrature weights are always folded into the matrix.
    pub fn weights_included(&self) -> bool {
        true
    }

    pub fn nodes(&self) -> Option<&NodeSet2D> {
        match &self.discretization {
            Discretization::Contour(n) => Some(n),
            Discretization::Surface(_) => None,
        }
    }

    pub fn mesh(&self) -> Option<&SurfaceMesh3D> {
        match &self.discretization {
            Discretization::Surface(m) => Some(m),
            Discretization::Contour(_) => None,
        }
    }

    /// Arc-length weights (2D) or panel areas (3D).
    pub fn weights(&self) -> &[f64] {
        match &self.discretization {
            Discretization::Contour(n) => &n.weights,
            Discretization::Surface(m) => &m.areas,
        }
    }

    /// Matrix-vector product.
    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        let a = &self.matrix;
        (0..a.nrows())
            .map(|i| (0..a.ncols()).map(|j| a[(i, j)] * x[j]).sum())
            .collect()
    }

    /// Transposed matrix-vector product.
    pub fn apply_transpose(&self, x: &[f64]) -> Vec<f64> {
        let a = &self.matrix;
        (0..a.ncols())
            .map(|j| (0..a.nrows()).map(|i| a[(i, j)] * x[i]).sum())
            .collect()
    }

    /// Writes the matrix row-major as little-endian `f64`.
    pub fn write_dump<W: Write>(&self, mut out: W) -> io::Result<()> {
        let a = &self.matrix;
        let mut buf = Vec::with_capacity(8 * a.ncols());
        for i in 0..a.nrows() {
            buf.clear();
            for j in 0..a.ncols() {
                buf.extend_from_slice(&a[(i, j)].to_le_bytes());
            }
            out.write_all(&buf)?;
        }
        Ok(())
    }

    fn from_rows(
        rows: Vec<Result<Vec<f64>, OperatorError>>,
        discretization: Discretization,
        kind: KernelKind,
    ) -> Result<Self, OperatorError> {
        let rows: Vec<Vec<f64>> = rows.into_iter().collect::<Result<_, _>>()?;
        let n = rows.len();
        for (i, row) in rows.iter().enumerate() {
            if let Some(j) = row.iter().position(|x| !x.is_finite()) {
                return Err(OperatorError::NonFinite(i, j));
            }
        }
        Ok(DiscreteOperator {
            matrix: Mat::from_fn(n, n, |i, j| rows[i][j]),
            discretization,
            kind,
        })
    }
}

fn k2d_row(nodes: &NodeSet2D, q: usize, deflate: bool) -> Result<Vec<f64>, OperatorError> {
    let pq = nodes.positions[q];
    let nq = nodes.normals[q];
    let inv_len = 1.0 / nodes.length;
    let mut row = Vec::with_capacity(nodes.len());
    for m in 0..nodes.len() {
        let w = nodes.weights[m];
        let mut a = if m == q {
            nodes.curvatures[q] * w / (2.0 * PI)
        } else {
            let d = [pq[0] - nodes.positions[m][0], pq[1] - nodes.positions[m][1]];
            let r2 = d[0] * d[0] + d[1] * d[1];
            if r2 == 0.0 {
                return Err(OperatorError::CoincidentNodes(q, m));
            }
            (d[0] * nq[0] + d[1] * nq[1]) / r2 * w / PI
        };
        if deflate {
            a -= w * inv_len;
        }
        row.push(a);
    }
    Ok(row)
}

/// `A[q][m] = (1/pi) ((Q - M) . n_Q / |Q - M|^2) w_m`, with the smooth
/// diagonal limit `kappa_q w_q / (2 pi)`.
pub fn assemble_k2d(nodes: &NodeSet2D) -> Result<DiscreteOperator, OperatorError> {
    let rows = (0..nodes.len())
        .into_par_iter()
        .map(|q| k2d_row(nodes, q, false))
        .collect();
    DiscreteOperator::from_rows(rows, Discretization::Contour(nodes.clone()), KernelKind::K2d)
}

/// The 2D operator with the rank-one term `w_m / L` subtracted, which moves
/// the Robin eigenvalue `mu = 1` to zero and leaves the rest of the
/// spectrum unchanged.
pub fn assemble_k2d_deflated(nodes: &NodeSet2D) -> Result<DiscreteOperator, OperatorError> {
    let rows = (0..nodes.len())
        .into_par_iter()
        .map(|q| k2d_row(nodes, q, true))
        .collect();
    DiscreteOperator::from_rows(
        rows,
        Discretization::Contour(nodes.clone()),
        KernelKind::K2dDeflated,
    )
}

fn adjoint_row(mesh: &SurfaceMesh3D, q: usize) -> Result<Vec<f64>, OperatorError> {
    let cq = mesh.centroids[q];
    let mut row = vec![0.0; mesh.len()];
    let mut off = 0.0;
    for m in 0..mesh.len() {
        if m == q {
            continue;
        }
        let d = sub3(mesh.centroids[m], cq);
        let r2 = dot3(d, d);
        if r2 == 0.0 {
            return Err(OperatorError::CoincidentNodes(q, m));
        }
        let v = dot3(d, mesh.normals[m]) / (r2 * r2.sqrt()) * mesh.areas[m] / (2.0 * PI);
        row[m] = v;
        off += v;
    }
    // Gauss: the double-layer potential of a unit density is 1 on the surface.
    row[q] = 1.0 - off;
    Ok(row)
}

/// Centroid collocation for the 3D operators.
///
/// The adjoint (double-layer) matrix is
/// `C[q][m] = (1/2pi) (c_m - c_q) . n_m / r^3 * area_m` with its diagonal
/// fixed by the row-sum identity, so constants are an exact eigenvector.
/// The single-layer matrix is `W^{-1} C^T W` with `W = diag(area)`.
pub fn assemble_k3d(mesh: &SurfaceMesh3D, variant: Layer3D) -> Result<DiscreteOperator, OperatorError> {
    let rows: Vec<Result<Vec<f64>, OperatorError>> = (0..mesh.len())
        .into_par_iter()
        .map(|q| adjoint_row(mesh, q))
        .collect();
    let adj = DiscreteOperator::from_rows(
        rows,
        Discretization::Surface(mesh.clone()),
        KernelKind::K3dAdjoint,
    )?;
    match variant {
        Layer3D::Adjoint => Ok(adj),
        Layer3D::Single => {
            let n = mesh.len();
            let a = &mesh.areas;
            let c = &adj.matrix;
            Ok(DiscreteOperator {
                matrix: Mat::from_fn(n, n, |q, m| c[(m, q)] * a[m] / a[q]),
                discretization: adj.discretization,
                kind: KernelKind::K3dSingle,
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{make_sphere_mesh, Contour2D};

    fn weighted_col_sums(op: &DiscreteOperator) -> Vec<f64> {
        let w = op.weights().to_vec();
        op.apply_transpose(&w)
    }

    #[test]
    fn circle_kernel_is_constant() {
        let nodes = Contour2D::circle(1.0).unwrap().sample(64).unwrap();
        let op = assemble_k2d(&nodes).unwrap();
        let a = op.matrix();
        let expect = 1.0 / 64.0;
        for i in 0..64 {
            let row: f64 = (0..64).map(|j| a[(i, j)]).sum();
            assert!((row - 1.0).abs() < 1e-12);
            for j in 0..64 {
                assert!((a[(i, j)] - expect).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn weighted_transpose_identity() {
        for c in [
            Contour2D::ellipse(2.0, 1.0).unwrap(),
            Contour2D::kite().unwrap(),
            Contour2D::rounded_square(1.0, 0.4).unwrap(),
        ] {
            let nodes = c.sample(256).unwrap();
            let op = assemble_k2d(&nodes).unwrap();
            let s = weighted_col_sums(&op);
            for (x, w) in s.iter().zip(&nodes.weights) {
                assert!((x / w - 1.0).abs() < 1e-8, "{}", x / w);
            }
            let d = assemble_k2d_deflated(&nodes).unwrap();
            for x in weighted_col_sums(&d) {
                assert!(x.abs() < 1e-8);
            }
        }
    }

    #[test]
    fn deflated_circle_vanishes() {
        let nodes = Contour2D::circle(1.3).unwrap().sample(32).unwrap();
        let d = assemble_k2d_deflated(&nodes).unwrap();
        let a = d.matrix();
        for i in 0..32 {
            for j in 0..32 {
                assert!(a[(i, j)].abs() < 1e-14);
            }
        }
    }

    #[test]
    fn scaled_geometry_gives_same_matrix() {
        let c = Contour2D::kite().unwrap();
        let a = assemble_k2d(&c.sample(128).unwrap()).unwrap();
        let b = assemble_k2d(&c.scaled(2.7).unwrap().sample(128).unwrap()).unwrap();
        for i in 0..128 {
            for j in 0..128 {
                assert!((a.matrix()[(i, j)] - b.matrix()[(i, j)]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn sphere_adjoint_rows_sum_to_one() {
        let mesh = make_sphere_mesh(1.0, 2).unwrap();
        let op = assemble_k3d(&mesh, Layer3D::Adjoint).unwrap();
        let ones = vec![1.0; op.dim()];
        for x in op.apply(&ones) {
            assert!((x - 1.0).abs() < 1e-13);
        }
        let single = assemble_k3d(&mesh, Layer3D::Single).unwrap();
        assert_eq!(single.kind(), KernelKind::K3dSingle);
        let w = single.weights().to_vec();
        for (x, a) in single.apply_transpose(&w).iter().zip(&w) {
            assert!((x - a).abs() < 1e-13 * a);
        }
    }

    #[test]
    fn dump_is_row_major_little_endian() {
        let nodes = Contour2D::ellipse(2.0, 1.0).unwrap().sample(16).unwrap();
        let op = assemble_k2d(&nodes).unwrap();
        let mut bytes = Vec::new();
        op.write_dump(&mut bytes).unwrap();
        assert_eq!(bytes.len(), 16 * 16 * 8);
        let x = f64::from_le_bytes(bytes[8 * 17..8 * 18].try_into().unwrap());
        assert_eq!(x, op.matrix()[(1, 1)]);
        let y = f64::from_le_bytes(bytes[8 * 3..8 * 4].try_into().unwrap());
        assert_eq!(y, op.matrix()[(0, 3)]);
    }
}
