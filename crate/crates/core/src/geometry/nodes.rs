use serde::Serialize;

/// Nodes of a closed contour, equispaced in its parameter.
#[derive(Debug, Clone, Serialize)]
pub struct NodeSet2D {
    /// Curve parameter of each node.
    pub params: Vec<f64>,
    pub positions: Vec<[f64; 2]>,
    /// Outward unit normals.
    pub normals: Vec<[f64; 2]>,
    pub curvatures: Vec<f64>,
    /// `|gamma'(t_j)|`.
    pub speeds: Vec<f64>,
    /// Trapezoid weights, `speed * 2 pi / N`.
    pub weights: Vec<f64>,
    /// Total length of the contour.
    pub length: f64,
    step: f64,
}

impl NodeSet2D {
    pub(crate) fn with_capacity(n: usize, step: f64) -> Self {
        NodeSet2D {
            params: Vec::with_capacity(n),
            positions: Vec::with_capacity(n),
            normals: Vec::with_capacity(n),
            curvatures: Vec::with_capacity(n),
            speeds: Vec::with_capacity(n),
            weights: Vec::with_capacity(n),
            length: 0.0,
            step,
        }
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    /// Parameter spacing `2 pi / N`.
    pub fn step(&self) -> f64 {
        self.step
    }

    /// Weighted integral `sum_j f_j w_j`.
    pub fn integrate(&self, values: &[f64]) -> f64 {
        values.iter().zip(&self.weights).map(|(f, w)| f * w).sum()
    }

    /// `sum_j w_j n_j`; vanishes for a closed curve.
    pub fn normal_flux(&self) -> [f64; 2] {
        self.normals
            .iter()
            .zip(&self.weights)
            .fold([0.0; 2], |acc, (n, w)| [acc[0] + w * n[0], acc[1] + w * n[1]])
    }
}
