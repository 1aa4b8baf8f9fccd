//! Rounded rectangle with smoothed corner curvature.
//!
//! The classical construction (straight sides joined by circular arcs) has a
//! curvature jump at every tangency point. Here the piecewise-constant
//! curvature profile is convolved with a Gaussian of width
//! `SMOOTHING_FRACTION * corner_radius`, which keeps every corner turning by
//! exactly a quarter turn while making the curve C-infinity. The curve is
//! stored in arc-length form: tangent angle in closed form, positions by
//! composite Gauss-Legendre integration of the unit tangent.

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, TAU};

/// Gaussian width as a fraction of the corner radius.
pub(crate) const SMOOTHING_FRACTION: f64 = 0.25;

const TABLE_SIZE: usize = 2048;

// 8-point Gauss-Legendre on [-1, 1]; panels are tiny so this is exact to
// rounding.
const GL8_X: [f64; 4] = [
    0.183_434_642_495_649_8,
    0.525_532_409_916_329,
    0.796_666_477_413_626_7,
    0.960_289_856_497_536_3,
];
const GL8_W: [f64; 4] = [
    0.362_683_783_378_362,
    0.313_706_645_877_887_3,
    0.222_381_034_453_374_5,
    0.101_228_536_290_376_3,
];

#[derive(Debug, Clone)]
pub(crate) struct RoundedRect {
    radius: f64,
    delta: f64,
    length: f64,
    /// Arc-length intervals of constant curvature `1/radius` before smoothing,
    /// including periodic images.
    arcs: Vec<(f64, f64)>,
    x0: f64,
    table: Vec<[f64; 2]>,
}

fn std_normal_cdf(x: f64) -> f64 {
    0.5 * libm::erfc(-x * FRAC_1_SQRT_2)
}

fn std_normal_pdf(x: f64) -> f64 {
    (-0.5 * x * x).exp() / (TAU).sqrt()
}

/// Antiderivative of the normal CDF, vanishing at minus infinity.
fn cdf_integral(x: f64) -> f64 {
    x * std_normal_cdf(x) + std_normal_pdf(x)
}

impl RoundedRect {
    /// Smoothing pushes each side outward by a fixed multiple of the radius;
    /// the straight segments are shortened by that amount so the extents
    /// equal the requested half-dimensions.
    pub(crate) fn new(half_width: f64, half_height: f64, radius: f64) -> Self {
        let raw = Self::build(half_width, half_height, radius);
        let ex = raw.position_at(0.0)[0] - half_width;
        let ey = raw.position_at(0.25 * raw.length)[1] - half_height;
        Self::build(half_width - ex, half_height - ey, radius)
    }

    fn build(half_width: f64, half_height: f64, radius: f64) -> Self {
        let q = FRAC_PI_2 * radius;
        let side_x = 2.0 * (half_width - radius);
        let side_y = 2.0 * (half_height - radius);
        let length = 2.0 * side_x + 2.0 * side_y + 4.0 * q;
        let a1 = 0.5 * side_y;
        let a2 = a1 + q + side_x;
        let a3 = a2 + q + side_y;
        let a4 = a3 + q + side_x;
        let mut arcs = Vec::with_capacity(12);
        for shift in [-length, 0.0, length] {
            for a in [a1, a2, a3, a4] {
                arcs.push((a + shift, a + q + shift));
            }
        }
        let mut rect = RoundedRect {
            radius,
            delta: SMOOTHING_FRACTION * radius,
            length,
            arcs,
            x0: 0.0,
            table: Vec::new(),
        };
        rect.build_table();
        rect
    }

    pub(crate) fn length(&self) -> f64 {
        self.length
    }

    pub(crate) fn curvature_at(&self, s: f64) -> f64 {
        let d = self.delta;
        self.arcs
            .iter()
            .map(|&(a, b)| std_normal_cdf((s - a) / d) - std_normal_cdf((s - b) / d))
            .sum::<f64>()
            / self.radius
    }

    pub(crate) fn tangent_angle(&self, s: f64) -> f64 {
        let d = self.delta;
        let turn: f64 = self
            .arcs
            .iter()
            .map(|&(a, b)| {
                cdf_integral((s - a) / d) - cdf_integral((s - b) / d) - cdf_integral(-a / d)
                    + cdf_integral(-b / d)
            })
            .sum();
        FRAC_PI_2 + turn * d / self.radius
    }

    fn integrate_tangent(&self, s0: f64, s1: f64) -> [f64; 2] {
        let mid = 0.5 * (s0 + s1);
        let half = 0.5 * (s1 - s0);
        let mut acc = [0.0; 2];
        for (x, w) in GL8_X.iter().zip(GL8_W.iter()) {
            for sign in [-1.0, 1.0] {
                let th = self.tangent_angle(mid + sign * half * x);
                acc[0] += w * th.cos();
                acc[1] += w * th.sin();
            }
        }
        [acc[0] * half, acc[1] * half]
    }

    fn build_table(&mut self) {
        let h = self.length / TABLE_SIZE as f64;
        let mut table = Vec::with_capacity(TABLE_SIZE + 1);
        let mut p = [0.0, 0.0];
        table.push(p);
        for j in 0..TABLE_SIZE {
            let d = self.integrate_tangent(j as f64 * h, (j + 1) as f64 * h);
            p = [p[0] + d[0], p[1] + d[1]];
            table.push(p);
        }
        // Place the centre of symmetry at the origin: x(L/2) = -x(0).
        self.x0 = -0.5 * table[TABLE_SIZE / 2][0];
        for p in table.iter_mut() {
            p[0] += self.x0;
        }
        self.table = table;
    }

    /// Position at arc length `s` (taken modulo the perimeter).
    pub(crate) fn position_at(&self, s: f64) -> [f64; 2] {
        let s = s.rem_euclid(self.length);
        let h = self.length / TABLE_SIZE as f64;
        let j = ((s / h).floor() as usize).min(TABLE_SIZE - 1);
        let base = self.table[j];
        let s_j = j as f64 * h;
        if s == s_j {
            return base;
        }
        let d = self.integrate_tangent(s_j, s);
        [base[0] + d[0], base[1] + d[1]]
    }

    /// Position and first two derivatives with respect to `t = 2 pi s / L`.
    pub(crate) fn eval(&self, t: f64) -> ([f64; 2], [f64; 2], [f64; 2]) {
        let speed = self.length / TAU;
        let s = t * speed;
        let th = self.tangent_angle(s);
        let kappa = self.curvature_at(s);
        let (sn, cs) = th.sin_cos();
        (
            self.position_at(s),
            [speed * cs, speed * sn],
            [-speed * speed * kappa * sn, speed * speed * kappa * cs],
        )
    }

    #[cfg(test)]
    pub(crate) fn total_turn(&self) -> f64 {
        self.tangent_angle(self.length) - self.tangent_angle(0.0)
    }
}
