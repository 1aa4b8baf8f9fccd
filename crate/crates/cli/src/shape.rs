use std::fs;
use std::path::Path;

use np_spectra::geometry::{make_ellipsoid_mesh, make_sphere_mesh, Contour2D, SurfaceMesh3D};
use serde::Deserialize;

use crate::output::{input_error, Classify, Failure};

#[derive(Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
enum SurfaceSpec {
    Sphere { r: f64 },
    Ellipsoid { a: f64, b: f64, c: f64 },
}

pub enum Shape {
    Contour(Contour2D),
    Surface(SurfaceMesh3D),
}

pub struct LoadedShape {
    pub shape: Shape,
    /// The parsed file, echoed into reports.
    pub spec: serde_json::Value,
}

pub fn load(path: &Path, refinement: u32) -> Result<LoadedShape, Failure> {
    let text = fs::read_to_string(path).map_err(|e| input_error(format!("cannot read {}: {e}", path.display())))?;
    let spec: serde_json::Value =
        serde_json::from_str(&text).map_err(|e| input_error(format!("{}: {e}", path.display())))?;
    let kind = spec.get("kind").and_then(|k| k.as_str()).unwrap_or_default();
    let shape = match kind {
        "sphere" | "ellipsoid" => {
            let s: SurfaceSpec = serde_json::from_value(spec.clone()).input()?;
            let mesh = match s {
                SurfaceSpec::Sphere { r } => make_sphere_mesh(r, refinement),
                SurfaceSpec::Ellipsoid { a, b, c } => make_ellipsoid_mesh(a, b, c, refinement),
            };
            Shape::Surface(mesh.input()?)
        }
        _ => Shape::Contour(Contour2D::from_json(&text).input()?),
    };
    Ok(LoadedShape { shape, spec })
}
