use std::collections::HashMap;

use serde::Serialize;

use super::{cross3, dot3, sub3, GeometryError};

/// Closed triangulated surface with per-panel collocation data.
#[derive(Debug, Clone, Serialize)]
pub struct SurfaceMesh3D {
    pub vertices: Vec<[f64; 3]>,
    pub triangles: Vec<[usize; 3]>,
    pub centroids: Vec<[f64; 3]>,
    /// Outward unit normals.
    pub normals: Vec<[f64; 3]>,
    pub areas: Vec<f64>,
}

impl SurfaceMesh3D {
    /// Builds and validates a mesh: every edge must be shared by exactly two
    /// consistently oriented triangles, and the orientation must be outward.
    pub fn new(vertices: Vec<[f64; 3]>, triangles: Vec<[usize; 3]>) -> Result<Self, GeometryError> {
        let mut edges: HashMap<(usize, usize), (usize, usize)> = HashMap::new();
        for (t, tri) in triangles.iter().enumerate() {
            if tri.iter().any(|&i| i >= vertices.len()) {
                return Err(GeometryError::BadIndex(t));
            }
            for e in 0..3 {
                let (a, b) = (tri[e], tri[(e + 1) % 3]);
                let key = (a.min(b), a.max(b));
                let entry = edges.entry(key).or_insert((0, 0));
                if a < b {
                    entry.0 += 1;
                } else {
                    entry.1 += 1;
                }
            }
        }
        for (&(a, b), &(fwd, back)) in &edges {
            if fwd + back != 2 {
                return Err(GeometryError::OpenMesh(a, b, fwd + back));
            }
            if fwd != 1 {
                return Err(GeometryError::NonOrientable(a, b));
            }
        }

        let n = triangles.len();
        let mut centroids = Vec::with_capacity(n);
        let mut normals = Vec::with_capacity(n);
        let mut areas = Vec::with_capacity(n);
        let mut volume = 0.0;
        let scale = vertices
            .iter()
            .map(|v| dot3(*v, *v).sqrt())
            .fold(0.0, f64::max)
            .max(f64::MIN_POSITIVE);
        for (t, tri) in triangles.iter().enumerate() {
            let [a, b, c] = tri.map(|i| vertices[i]);
            let cr = cross3(sub3(b, a), sub3(c, a));
            let twice_area = dot3(cr, cr).sqrt();
            if twice_area <= 1e-14 * scale * scale {
                return Err(GeometryError::DegenerateTriangle(t));
            }
            areas.push(0.5 * twice_area);
            normals.push(cr.map(|x| x / twice_area));
            centroids.push([
                (a[0] + b[0] + c[0]) / 3.0,
                (a[1] + b[1] + c[1]) / 3.0,
                (a[2] + b[2] + c[2]) / 3.0,
            ]);
            volume += dot3(a, cross3(b, c)) / 6.0;
        }
        if volume <= 0.0 {
            return Err(GeometryError::InwardOrientation(volume));
        }
        Ok(SurfaceMesh3D {
            vertices,
            triangles,
            centroids,
            normals,
            areas,
        })
    }

    pub fn len(&self) -> usize {
        self.triangles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.triangles.is_empty()
    }

    pub fn total_area(&self) -> f64 {
        self.areas.iter().sum()
    }

    pub fn signed_volume(&self) -> f64 {
        self.triangles
            .iter()
            .map(|t| {
                let [a, b, c] = t.map(|i| self.vertices[i]);
                dot3(a, cross3(b, c)) / 6.0
            })
            .sum()
    }

    /// `sum_t area_t n_t`; vanishes for a closed surface.
    pub fn normal_flux(&self) -> [f64; 3] {
        self.normals
            .iter()
            .zip(&self.areas)
            .fold([0.0; 3], |acc, (n, a)| {
                [acc[0] + a * n[0], acc[1] + a * n[1], acc[2] + a * n[2]]
            })
    }

    /// Copy with every vertex multiplied componentwise by `s`.
    pub fn stretched(&self, s: [f64; 3]) -> Result<Self, GeometryError> {
        for (name, v) in [("sx", s[0]), ("sy", s[1]), ("sz", s[2])] {
            if !(v.is_finite() && v > 0.0) {
                return Err(GeometryError::NonPositiveDimension { name, value: v });
            }
        }
        let vertices = self
            .vertices
            .iter()
            .map(|v| [v[0] * s[0], v[1] * s[1], v[2] * s[2]])
            .collect();
        Self::new(vertices, self.triangles.clone())
    }
}

fn icosahedron() -> (Vec<[f64; 3]>, Vec<[usize; 3]>) {
    let p = (1.0 + 5f64.sqrt()) / 2.0;
    let vertices = vec![
        [-1.0, p, 0.0],
        [1.0, p, 0.0],
        [-1.0, -p, 0.0],
        [1.0, -p, 0.0],
        [0.0, -1.0, p],
        [0.0, 1.0, p],
        [0.0, -1.0, -p],
        [0.0, 1.0, -p],
        [p, 0.0, -1.0],
        [p, 0.0, 1.0],
        [-p, 0.0, -1.0],
        [-p, 0.0, 1.0],
    ];
    let triangles = vec![
        [0, 11, 5],
        [0, 5, 1],
        [0, 1, 7],
        [0, 7, 10],
        [0, 10, 11],
        [1, 5, 9],
        [5, 11, 4],
        [11, 10, 2],
        [10, 7, 6],
        [7, 1, 8],
        [3, 9, 4],
        [3, 4, 2],
        [3, 2, 6],
        [3, 6, 8],
        [3, 8, 9],
        [4, 9, 5],
        [2, 4, 11],
        [6, 2, 10],
        [8, 6, 7],
        [9, 8, 1],
    ];
    (vertices, triangles)
}

fn normalize(v: [f64; 3]) -> [f64; 3] {
    let n = dot3(v, v).sqrt();
    v.map(|x| x / n)
}

/// Unit-sphere vertices and triangles after `refinement` midpoint subdivisions.
fn unit_sphere(refinement: u32) -> (Vec<[f64; 3]>, Vec<[usize; 3]>) {
    let (v, mut triangles) = icosahedron();
    let mut vertices: Vec<[f64; 3]> = v.into_iter().map(normalize).collect();
    for _ in 0..refinement {
        let mut midpoints: HashMap<(usize, usize), usize> = HashMap::new();
        let mut next = Vec::with_capacity(triangles.len() * 4);
        let mut mid = |a: usize, b: usize, vertices: &mut Vec<[f64; 3]>| {
            *midpoints.entry((a.min(b), a.max(b))).or_insert_with(|| {
                let (p, q) = (vertices[a], vertices[b]);
                vertices.push(normalize([p[0] + q[0], p[1] + q[1], p[2] + q[2]]));
                vertices.len() - 1
            })
        };
        for &[a, b, c] in &triangles {
            let ab = mid(a, b, &mut vertices);
            let bc = mid(b, c, &mut vertices);
            let ca = mid(c, a, &mut vertices);
            next.extend([[a, ab, ca], [b, bc, ab], [c, ca, bc], [ab, bc, ca]]);
        }
        triangles = next;
    }
    (vertices, triangles)
}

/// Subdivided icosahedron with vertices on the sphere of radius `r`.
/// `refinement = k` gives `20 * 4^k` triangles.
pub fn make_sphere_mesh(r: f64, refinement: u32) -> Result<SurfaceMesh3D, GeometryError> {
    if !(r.is_finite() && r > 0.0) {
        return Err(GeometryError::NonPositiveDimension { name: "r", value: r });
    }
    if refinement < 1 {
        return Err(GeometryError::InvalidContour(
            "sphere refinement must be at least 1".into(),
        ));
    }
    let (vertices, triangles) = unit_sphere(refinement);
    let vertices = vertices.into_iter().map(|v| v.map(|x| x * r)).collect();
    SurfaceMesh3D::new(vertices, triangles)
}

/// Sphere mesh stretched to semi-axes `(a, b, c)`.
pub fn make_ellipsoid_mesh(
    a: f64,
    b: f64,
    c: f64,
    refinement: u32,
) -> Result<SurfaceMesh3D, GeometryError> {
    make_sphere_mesh(1.0, refinement)?.stretched([a, b, c])
}
