use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use super::rounded::RoundedRect;
use super::{GeometryError, NodeSet2D};

/// One Fourier harmonic of a star-shaped radius function.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Harmonic {
    pub k: u32,
    #[serde(default)]
    pub cos: f64,
    #[serde(default)]
    pub sin: f64,
}

fn default_skew() -> f64 {
    0.65
}

fn default_stretch() -> f64 {
    1.5
}

/// Shape descriptor, as read from a JSON shape file.
///
/// ```json
/// {"kind": "ellipse", "a": 2.0, "b": 1.0}
/// {"kind": "circle", "r": 1.0}
/// {"kind": "rounded-rectangle", "half_width": 1.0, "half_height": 1.0, "corner_radius": 0.3}
/// {"kind": "fourier-star", "r0": 1.0, "harmonics": [{"k": 5, "cos": 0.2}]}
/// {"kind": "kite", "skew": 0.65, "stretch": 1.5}
/// ```
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum ShapeSpec {
    Circle {
        r: f64,
    },
    Ellipse {
        a: f64,
        b: f64,
    },
    RoundedRectangle {
        half_width: f64,
        half_height: f64,
        corner_radius: f64,
    },
    FourierStar {
        r0: f64,
        #[serde(default)]
        harmonics: Vec<Harmonic>,
    },
    /// `x = cos t + skew (cos 2t - 1)`, `y = stretch sin t`.
    Kite {
        #[serde(default = "default_skew")]
        skew: f64,
        #[serde(default = "default_stretch")]
        stretch: f64,
    },
}

#[derive(Debug, Clone)]
enum Curve {
    Circle(f64),
    Ellipse(f64, f64),
    Rounded(Box<RoundedRect>),
    Star(f64, Vec<Harmonic>),
    Kite(f64, f64),
}

/// A closed, positively oriented, smooth plane curve given as a
/// `2 pi`-periodic map, optionally scaled and rotated about the origin.
#[derive(Debug, Clone)]
pub struct Contour2D {
    spec: ShapeSpec,
    curve: Curve,
    scale: f64,
    rotation: f64,
    length: f64,
}

fn positive(name: &'static str, value: f64) -> Result<f64, GeometryError> {
    if value.is_finite() && value > 0.0 {
        Ok(value)
    } else {
        Err(GeometryError::NonPositiveDimension { name, value })
    }
}

impl Curve {
    /// Position, first and second derivative at parameter `t`.
    fn eval(&self, t: f64) -> ([f64; 2], [f64; 2], [f64; 2]) {
        let (s, c) = t.sin_cos();
        match self {
            Curve::Circle(r) => ([r * c, r * s], [-r * s, r * c], [-r * c, -r * s]),
            Curve::Ellipse(a, b) => ([a * c, b * s], [-a * s, b * c], [-a * c, -b * s]),
            Curve::Rounded(rect) => rect.eval(t),
            Curve::Star(r0, harmonics) => {
                let (mut r, mut dr, mut ddr) = (*r0, 0.0, 0.0);
                for h in harmonics {
                    let k = h.k as f64;
                    let (sk, ck) = (k * t).sin_cos();
                    r += h.cos * ck + h.sin * sk;
                    dr += k * (h.sin * ck - h.cos * sk);
                    ddr -= k * k * (h.cos * ck + h.sin * sk);
                }
                (
                    [r * c, r * s],
                    [dr * c - r * s, dr * s + r * c],
                    [
                        ddr * c - 2.0 * dr * s - r * c,
                        ddr * s + 2.0 * dr * c - r * s,
                    ],
                )
            }
            Curve::Kite(k, h) => {
                let (s2, c2) = (2.0 * t).sin_cos();
                (
                    [c + k * c2 - k, h * s],
                    [-s - 2.0 * k * s2, h * c],
                    [-c - 4.0 * k * c2, -h * s],
                )
            }
        }
    }
}

fn segments_cross(p1: [f64; 2], p2: [f64; 2], q1: [f64; 2], q2: [f64; 2]) -> bool {
    let orient = |a: [f64; 2], b: [f64; 2], c: [f64; 2]| {
        (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])
    };
    let d1 = orient(q1, q2, p1);
    let d2 = orient(q1, q2, p2);
    let d3 = orient(p1, p2, q1);
    let d4 = orient(p1, p2, q2);
    d1 * d2 < 0.0 && d3 * d4 < 0.0
}

impl Contour2D {
    /// Validates a shape descriptor and builds the contour.
    pub fn new(spec: ShapeSpec) -> Result<Self, GeometryError> {
        let curve = match &spec {
            ShapeSpec::Circle { r } => Curve::Circle(positive("r", *r)?),
            ShapeSpec::Ellipse { a, b } => Curve::Ellipse(positive("a", *a)?, positive("b", *b)?),
            ShapeSpec::RoundedRectangle {
                half_width,
                half_height,
                corner_radius,
            } => {
                let w = positive("half_width", *half_width)?;
                let h = positive("half_height", *half_height)?;
                let r = *corner_radius;
                if !(r.is_finite() && r > 0.0 && r <= w.min(h)) {
                    return Err(GeometryError::UnroundableCorner {
                        radius: r,
                        width: 2.0 * w,
                        height: 2.0 * h,
                    });
                }
                Curve::Rounded(Box::new(RoundedRect::new(w, h, r)))
            }
            ShapeSpec::FourierStar { r0, harmonics } => {
                let r0 = positive("r0", *r0)?;
                if harmonics
                    .iter()
                    .any(|h| h.k == 0 || !h.cos.is_finite() || !h.sin.is_finite())
                {
                    return Err(GeometryError::InvalidContour(
                        "harmonics need k >= 1 and finite amplitudes".into(),
                    ));
                }
                Curve::Star(r0, harmonics.clone())
            }
            ShapeSpec::Kite { skew, stretch } => {
                if !skew.is_finite() || *skew < 0.0 {
                    return Err(GeometryError::NonPositiveDimension {
                        name: "skew",
                        value: *skew,
                    });
                }
                Curve::Kite(*skew, positive("stretch", *stretch)?)
            }
        };
        let mut contour = Contour2D {
            spec,
            curve,
            scale: 1.0,
            rotation: 0.0,
            length: 0.0,
        };
        contour.length = contour.compute_length();
        contour.validate()?;
        Ok(contour)
    }

    pub fn circle(r: f64) -> Result<Self, GeometryError> {
        Self::new(ShapeSpec::Circle { r })
    }

    pub fn ellipse(a: f64, b: f64) -> Result<Self, GeometryError> {
        Self::new(ShapeSpec::Ellipse { a, b })
    }

    pub fn kite() -> Result<Self, GeometryError> {
        Self::new(ShapeSpec::Kite {
            skew: default_skew(),
            stretch: default_stretch(),
        })
    }

    pub fn rounded_square(half_side: f64, corner_radius: f64) -> Result<Self, GeometryError> {
        Self::new(ShapeSpec::RoundedRectangle {
            half_width: half_side,
            half_height: half_side,
            corner_radius,
        })
    }

    /// Parses a JSON shape descriptor.
    pub fn from_json(text: &str) -> Result<Self, GeometryError> {
        let spec: ShapeSpec = serde_json::from_str(text)
            .map_err(|e| GeometryError::InvalidContour(format!("bad shape descriptor: {e}")))?;
        Self::new(spec)
    }

    pub fn spec(&self) -> &ShapeSpec {
        &self.spec
    }

    pub fn scale_factor(&self) -> f64 {
        self.scale
    }

    /// Uniformly scaled copy.
    pub fn scaled(&self, factor: f64) -> Result<Self, GeometryError> {
        positive("scale", factor)?;
        let mut c = self.clone();
        c.scale *= factor;
        c.length *= factor;
        Ok(c)
    }

    /// Copy rotated by `angle` radians about the origin.
    pub fn rotated(&self, angle: f64) -> Self {
        let mut c = self.clone();
        c.rotation += angle;
        c
    }

    /// Total length.
    pub fn length(&self) -> f64 {
        self.length
    }

    fn transform(&self, v: [f64; 2]) -> [f64; 2] {
        let (s, c) = self.rotation.sin_cos();
        [c * v[0] - s * v[1], s * v[0] + c * v[1]]
    }

    /// Position, derivative and second derivative in the final frame.
    pub fn derivatives(&self, t: f64) -> ([f64; 2], [f64; 2], [f64; 2]) {
        let (p, d1, d2) = self.curve.eval(t);
        let k = self.scale;
        let p = self.transform(p);
        let d1 = self.transform(d1);
        let d2 = self.transform(d2);
        (
            [k * p[0], k * p[1]],
            [k * d1[0], k * d1[1]],
            [k * d2[0], k * d2[1]],
        )
    }

    pub fn point(&self, t: f64) -> [f64; 2] {
        self.derivatives(t).0
    }

    /// Signed curvature at parameter `t`, positive on convex arcs.
    pub fn curvature(&self, t: f64) -> Result<f64, GeometryError> {
        if !(0.0..TAU).contains(&t) {
            return Err(GeometryError::ParameterOutOfRange(t));
        }
        Ok(self.curvature_unchecked(t))
    }

    fn curvature_unchecked(&self, t: f64) -> f64 {
        let (_, d1, d2) = self.curve.eval(t);
        let speed = d1[0].hypot(d1[1]);
        (d1[0] * d2[1] - d1[1] * d2[0]) / (speed * speed * speed) / self.scale
    }

    fn base_speed(&self, t: f64) -> f64 {
        let (_, d1, _) = self.curve.eval(t);
        d1[0].hypot(d1[1])
    }

    fn compute_length(&self) -> f64 {
        if let Curve::Rounded(rect) = &self.curve {
            return rect.length() * self.scale;
        }
        // Periodic trapezoid rule: spectrally accurate for analytic curves.
        let m = 4096;
        let h = TAU / m as f64;
        (0..m).map(|j| self.base_speed(j as f64 * h)).sum::<f64>() * h * self.scale
    }

    fn validate(&self) -> Result<(), GeometryError> {
        if !(self.length.is_finite() && self.length > 0.0) {
            return Err(GeometryError::InvalidContour("zero length".into()));
        }
        let m = 512;
        let pts: Vec<[f64; 2]> = (0..m)
            .map(|j| self.curve.eval(TAU * j as f64 / m as f64).0)
            .collect();
        let min_speed = (0..m)
            .map(|j| self.base_speed(TAU * j as f64 / m as f64))
            .fold(f64::INFINITY, f64::min);
        if min_speed <= 1e-9 * self.length / self.scale {
            return Err(GeometryError::InvalidContour("parametrization stalls".into()));
        }
        let area: f64 = (0..m)
            .map(|j| {
                let a = pts[j];
                let b = pts[(j + 1) % m];
                a[0] * b[1] - a[1] * b[0]
            })
            .sum::<f64>()
            * 0.5;
        if area <= 0.0 {
            return Err(GeometryError::InvalidContour(
                "curve is not positively oriented".into(),
            ));
        }
        if let Curve::Star(..) = self.curve {
            // Star-shaped curves are simple exactly when the radius stays positive.
            let neg = pts.iter().any(|p| p[0].hypot(p[1]) <= 0.0)
                || (0..m).any(|j| {
                    let t = TAU * j as f64 / m as f64;
                    let (p, _, _) = self.curve.eval(t);
                    p[0] * t.cos() + p[1] * t.sin() <= 0.0
                });
            if neg {
                return Err(GeometryError::InvalidContour(
                    "star radius must stay positive".into(),
                ));
            }
        }
        for i in 0..m {
            for j in (i + 2)..m {
                if i == 0 && j == m - 1 {
                    continue;
                }
                if segments_cross(pts[i], pts[(i + 1) % m], pts[j], pts[(j + 1) % m]) {
                    return Err(GeometryError::InvalidContour("self-intersecting".into()));
                }
            }
        }
        Ok(())
    }

    /// `n` nodes equispaced in the curve parameter, with periodic-trapezoid
    /// weights `|gamma'(t_j)| 2 pi / n`.
    pub fn sample(&self, n: usize) -> Result<NodeSet2D, GeometryError> {
        if n < 16 || !n.is_multiple_of(2) {
            return Err(GeometryError::TooFewNodes(n));
        }
        let h = TAU / n as f64;
        let mut nodes = NodeSet2D::with_capacity(n, h);
        for j in 0..n {
            let t = j as f64 * h;
            let (p, d1, _) = self.curve.eval(t);
            let base_speed = d1[0].hypot(d1[1]);
            let normal = self.transform([d1[1] / base_speed, -d1[0] / base_speed]);
            let p = self.transform(p);
            nodes.params.push(t);
            nodes.positions.push([p[0] * self.scale, p[1] * self.scale]);
            nodes.normals.push(normal);
            nodes.curvatures.push(self.curvature_unchecked(t));
            nodes.speeds.push(base_speed * self.scale);
            nodes.weights.push(base_speed * h * self.scale);
        }
        nodes.length = self.length;
        Ok(nodes)
    }
}
