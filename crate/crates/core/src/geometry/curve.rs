//! Closed parametrized boundary curves, t ∈ [0, 2π).

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::f64::consts::{PI, TAU};

pub type Point = [f64; 2];

/// Truncated trigonometric series for both coordinates; entry `k` multiplies
/// `cos(kt)` / `sin(kt)`. `*_sin[0]` is ignored.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
pub struct FourierSeries {
    pub x_cos: Vec<f64>,
    pub x_sin: Vec<f64>,
    pub y_cos: Vec<f64>,
    pub y_sin: Vec<f64>,
}

impl FourierSeries {
    /// Star-shaped curve r(θ) = Σ a_k cos kθ + b_k sin kθ, (x, y) = c + r(θ)(cos θ, sin θ).
    pub fn from_polar(center: Point, radial_cos: &[f64], radial_sin: &[f64]) -> Self {
        let deg = radial_cos.len().max(radial_sin.len()) + 1;
        let mut s = FourierSeries {
            x_cos: vec![0.0; deg + 1],
            x_sin: vec![0.0; deg + 1],
            y_cos: vec![0.0; deg + 1],
            y_sin: vec![0.0; deg + 1],
        };
        s.x_cos[0] = center[0];
        s.y_cos[0] = center[1];
        // product-to-sum: cos kθ cos θ = ½(cos(k+1)θ + cos(k−1)θ), etc.
        for (k, &a) in radial_cos.iter().enumerate() {
            add_harmonic(&mut s.x_cos, &mut s.x_sin, k, 1, 0.5 * a, 0.5 * a, 0.0, 0.0);
            // cos kθ sin θ = ½(sin(k+1)θ − sin(k−1)θ)
            add_harmonic(&mut s.y_cos, &mut s.y_sin, k, 1, 0.0, 0.0, 0.5 * a, -0.5 * a);
        }
        for (k, &b) in radial_sin.iter().enumerate() {
            if k == 0 {
                continue;
            }
            // sin kθ cos θ = ½(sin(k+1)θ + sin(k−1)θ)
            add_harmonic(&mut s.x_cos, &mut s.x_sin, k, 1, 0.0, 0.0, 0.5 * b, 0.5 * b);
            // sin kθ sin θ = ½(cos(k−1)θ − cos(k+1)θ)
            add_harmonic(&mut s.y_cos, &mut s.y_sin, k, 1, -0.5 * b, 0.5 * b, 0.0, 0.0);
        }
        s
    }

    fn eval(&self, t: f64) -> (Point, Point, Point) {
        let mut p = [0.0; 2];
        let mut d1 = [0.0; 2];
        let mut d2 = [0.0; 2];
        let n = self.x_cos.len().max(self.x_sin.len()).max(self.y_cos.len()).max(self.y_sin.len());
        let get = |v: &Vec<f64>, k: usize| v.get(k).copied().unwrap_or(0.0);
        for k in 0..n {
            let kf = k as f64;
            let (s, c) = (kf * t).sin_cos();
            let coef = [(get(&self.x_cos, k), get(&self.x_sin, k)), (get(&self.y_cos, k), get(&self.y_sin, k))];
            for (d, &(ac, bs)) in coef.iter().enumerate() {
                let bs = if k == 0 { 0.0 } else { bs };
                p[d] += ac * c + bs * s;
                d1[d] += kf * (-ac * s + bs * c);
                d2[d] += -kf * kf * (ac * c + bs * s);
            }
        }
        (p, d1, d2)
    }
}

#[allow(clippy::too_many_arguments)]
fn add_harmonic(
    cos: &mut [f64],
    sin: &mut [f64],
    k: usize,
    shift: usize,
    cos_up: f64,
    cos_down: f64,
    sin_up: f64,
    sin_down: f64,
) {
    let up = k + shift;
    cos[up] += cos_up;
    sin[up] += sin_up;
    // negative frequencies fold back: cos(−jθ) = cos jθ, sin(−jθ) = −sin jθ
    let down = k as i64 - shift as i64;
    let (idx, sgn) = if down >= 0 { (down as usize, 1.0) } else { ((-down) as usize, -1.0) };
    cos[idx] += cos_down;
    sin[idx] += sgn * sin_down;
}

/// Geometric kind of a boundary curve.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "parameters", rename_all = "snake_case")]
pub enum CurveKind {
    Circle { center: Point, radius: f64 },
    Ellipse { a: f64, b: f64, center: Point, angle: f64 },
    Fourier(FourierSeries),
    /// Closed polygon; with `corner_radius` every corner is replaced by a
    /// tangent circular arc of that radius.
    Polyline { vertices: Vec<Point>, corner_radius: Option<f64> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundaryCurve {
    pub kind: CurveKind,
    /// Direction in which the parametrization is traversed.
    pub counterclockwise: bool,
}

#[derive(Debug, Clone, Copy)]
enum Piece {
    Line { a: Point, b: Point },
    Arc { center: Point, radius: f64, start: f64, sweep: f64 },
}

impl Piece {
    fn length(&self) -> f64 {
        match *self {
            Piece::Line { a, b } => dist(a, b),
            Piece::Arc { radius, sweep, .. } => radius * sweep.abs(),
        }
    }

    /// position, unit tangent and signed curvature at arclength `s` into the piece
    fn eval(&self, s: f64) -> (Point, Point, f64) {
        match *self {
            Piece::Line { a, b } => {
                let l = dist(a, b);
                let u = [(b[0] - a[0]) / l, (b[1] - a[1]) / l];
                ([a[0] + s * u[0], a[1] + s * u[1]], u, 0.0)
            }
            Piece::Arc { center, radius, start, sweep } => {
                let dir = sweep.signum();
                let phi = start + dir * s / radius;
                let (sn, cs) = phi.sin_cos();
                ([center[0] + radius * cs, center[1] + radius * sn], [-dir * sn, dir * cs], dir / radius)
            }
        }
    }
}

fn dist(a: Point, b: Point) -> f64 {
    (a[0] - b[0]).hypot(a[1] - b[1])
}

fn polyline_pieces(vertices: &[Point], radius: Option<f64>) -> Result<Vec<Piece>> {
    let n = vertices.len();
    if n < 3 {
        return Err(Error::InvalidDomain("polyline needs at least 3 vertices".into()));
    }
    let rho = radius.unwrap_or(0.0);
    if rho < 0.0 || !rho.is_finite() {
        return Err(Error::InvalidDomain(format!("corner radius must be non-negative, got {rho}")));
    }
    let unit = |a: Point, b: Point| -> Result<Point> {
        let l = dist(a, b);
        if l <= 0.0 {
            return Err(Error::InvalidDomain("polyline has repeated vertices".into()));
        }
        Ok([(b[0] - a[0]) / l, (b[1] - a[1]) / l])
    };
    // per-corner arc data
    let mut corners = Vec::with_capacity(n);
    for i in 0..n {
        let prev = vertices[(i + n - 1) % n];
        let v = vertices[i];
        let next = vertices[(i + 1) % n];
        let e_in = unit(prev, v)?;
        let e_out = unit(v, next)?;
        let turn = (e_in[0] * e_out[1] - e_in[1] * e_out[0]).atan2(e_in[0] * e_out[0] + e_in[1] * e_out[1]);
        let d = rho * (turn.abs() / 2.0).tan();
        let p1 = [v[0] - d * e_in[0], v[1] - d * e_in[1]];
        let p2 = [v[0] + d * e_out[0], v[1] + d * e_out[1]];
        let left = [-e_in[1], e_in[0]];
        let sgn = turn.signum();
        let center = [p1[0] + sgn * rho * left[0], p1[1] + sgn * rho * left[1]];
        let start = (p1[1] - center[1]).atan2(p1[0] - center[0]);
        corners.push((d, p1, p2, center, start, turn));
    }
    let mut pieces = Vec::with_capacity(2 * n);
    for i in 0..n {
        let (d_i, _, p2, ..) = corners[i];
        let (d_next, p1_next, ..) = corners[(i + 1) % n];
        let edge = dist(vertices[i], vertices[(i + 1) % n]);
        if d_i + d_next > edge * (1.0 + 1e-12) {
            return Err(Error::InvalidDomain(format!("corner radius {rho} too large for edge {i} of length {edge}")));
        }
        if rho > 0.0 {
            let (_, _, _, center, start, turn) = corners[i];
            if turn.abs() > 1e-14 {
                pieces.push(Piece::Arc { center, radius: rho, start, sweep: turn });
            }
        }
        if dist(p2, p1_next) > 0.0 {
            pieces.push(Piece::Line { a: p2, b: p1_next });
        }
    }
    Ok(pieces)
}

/// Pre-processed evaluator; build once and reuse inside loops.
#[derive(Debug, Clone)]
pub struct CurveEvaluator {
    kind: EvalKind,
    reversed: bool,
}

#[derive(Debug, Clone)]
enum EvalKind {
    Circle { center: Point, radius: f64 },
    Ellipse { a: f64, b: f64, center: Point, rot: (f64, f64) },
    Fourier(FourierSeries),
    Pieces { pieces: Vec<Piece>, cumulative: Vec<f64>, length: f64, smooth: bool },
}

/// Position and first two parameter derivatives.
#[derive(Debug, Clone, Copy)]
pub struct CurvePoint {
    pub p: Point,
    pub d1: Point,
    pub d2: Point,
}

impl CurvePoint {
    pub fn speed(&self) -> f64 {
        self.d1[0].hypot(self.d1[1])
    }

    /// Signed curvature in the traversal direction (positive = turning left).
    pub fn curvature(&self) -> f64 {
        let s = self.speed();
        (self.d1[0] * self.d2[1] - self.d1[1] * self.d2[0]) / (s * s * s)
    }
}

impl BoundaryCurve {
    pub fn new(kind: CurveKind) -> Self {
        Self { kind, counterclockwise: true }
    }

    pub fn circle(center: Point, radius: f64) -> Self {
        Self::new(CurveKind::Circle { center, radius })
    }

    pub fn ellipse(a: f64, b: f64) -> Self {
        Self::new(CurveKind::Ellipse { a, b, center: [0.0, 0.0], angle: 0.0 })
    }

    pub fn fourier(series: FourierSeries) -> Self {
        Self::new(CurveKind::Fourier(series))
    }

    pub fn polyline(vertices: Vec<Point>, corner_radius: Option<f64>) -> Self {
        Self::new(CurveKind::Polyline { vertices, corner_radius })
    }

    pub fn reversed(mut self) -> Self {
        self.counterclockwise = !self.counterclockwise;
        self
    }

    /// C² parametrization available (everything except sharp polylines).
    pub fn is_smooth(&self) -> bool {
        !matches!(self.kind, CurveKind::Polyline { corner_radius: None, .. })
    }

    pub fn evaluator(&self) -> Result<CurveEvaluator> {
        let kind = match &self.kind {
            CurveKind::Circle { center, radius } => {
                if !(radius.is_finite() && *radius > 0.0) {
                    return Err(Error::InvalidDomain(format!("circle radius must be positive, got {radius}")));
                }
                EvalKind::Circle { center: *center, radius: *radius }
            }
            CurveKind::Ellipse { a, b, center, angle } => {
                if !(*a > 0.0 && *b > 0.0 && a.is_finite() && b.is_finite()) {
                    return Err(Error::InvalidDomain(format!("ellipse semi-axes must be positive, got a={a}, b={b}")));
                }
                EvalKind::Ellipse { a: *a, b: *b, center: *center, rot: angle.sin_cos() }
            }
            CurveKind::Fourier(s) => EvalKind::Fourier(s.clone()),
            CurveKind::Polyline { vertices, corner_radius } => {
                let pieces = polyline_pieces(vertices, *corner_radius)?;
                let mut cumulative = Vec::with_capacity(pieces.len() + 1);
                let mut acc = 0.0;
                cumulative.push(0.0);
                for p in &pieces {
                    acc += p.length();
                    cumulative.push(acc);
                }
                EvalKind::Pieces { pieces, cumulative, length: acc, smooth: corner_radius.is_some() }
            }
        };
        Ok(CurveEvaluator { kind, reversed: !self.counterclockwise })
    }

    /// Similarity image x ↦ offset + scale·R(angle)·x.
    pub fn transformed(&self, scale: f64, angle: f64, offset: Point) -> Self {
        let (s, c) = angle.sin_cos();
        let map = |p: Point| [offset[0] + scale * (c * p[0] - s * p[1]), offset[1] + scale * (s * p[0] + c * p[1])];
        let kind = match &self.kind {
            CurveKind::Circle { center, radius } => CurveKind::Circle { center: map(*center), radius: scale * radius },
            CurveKind::Ellipse { a, b, center, angle: a0 } => {
                CurveKind::Ellipse { a: scale * a, b: scale * b, center: map(*center), angle: a0 + angle }
            }
            CurveKind::Fourier(f) => {
                let n = f.x_cos.len().max(f.x_sin.len()).max(f.y_cos.len()).max(f.y_sin.len());
                let get = |v: &Vec<f64>, k: usize| v.get(k).copied().unwrap_or(0.0);
                let mut out = FourierSeries {
                    x_cos: vec![0.0; n],
                    x_sin: vec![0.0; n],
                    y_cos: vec![0.0; n],
                    y_sin: vec![0.0; n],
                };
                for k in 0..n {
                    let (xc, yc) = (get(&f.x_cos, k), get(&f.y_cos, k));
                    let (xs, ys) = (get(&f.x_sin, k), get(&f.y_sin, k));
                    out.x_cos[k] = scale * (c * xc - s * yc);
                    out.y_cos[k] = scale * (s * xc + c * yc);
                    out.x_sin[k] = scale * (c * xs - s * ys);
                    out.y_sin[k] = scale * (s * xs + c * ys);
                }
                out.x_cos[0] += offset[0];
                out.y_cos[0] += offset[1];
                CurveKind::Fourier(out)
            }
            CurveKind::Polyline { vertices, corner_radius } => CurveKind::Polyline {
                vertices: vertices.iter().map(|&v| map(v)).collect(),
                corner_radius: corner_radius.map(|r| r * scale),
            },
        };
        Self { kind, counterclockwise: self.counterclockwise }
    }
}

impl CurveEvaluator {
    pub fn eval(&self, t: f64) -> CurvePoint {
        let tt = if self.reversed { TAU - t } else { t };
        let mut cp = self.eval_raw(tt.rem_euclid(TAU));
        if self.reversed {
            cp.d1 = [-cp.d1[0], -cp.d1[1]];
        }
        cp
    }

    pub fn point(&self, t: f64) -> Point {
        self.eval(t).p
    }

    fn eval_raw(&self, t: f64) -> CurvePoint {
        match &self.kind {
            EvalKind::Circle { center, radius } => {
                let (s, c) = t.sin_cos();
                CurvePoint {
                    p: [center[0] + radius * c, center[1] + radius * s],
                    d1: [-radius * s, radius * c],
                    d2: [-radius * c, -radius * s],
                }
            }
            EvalKind::Ellipse { a, b, center, rot } => {
                let (s, c) = t.sin_cos();
                let (rs, rc) = *rot;
                let r = |v: Point| [rc * v[0] - rs * v[1], rs * v[0] + rc * v[1]];
                let p = r([a * c, b * s]);
                CurvePoint { p: [center[0] + p[0], center[1] + p[1]], d1: r([-a * s, b * c]), d2: r([-a * c, -b * s]) }
            }
            EvalKind::Fourier(f) => {
                let (p, d1, d2) = f.eval(t);
                CurvePoint { p, d1, d2 }
            }
            EvalKind::Pieces { pieces, cumulative, length, .. } => {
                let speed = length / TAU;
                let s = t * speed;
                let idx = match cumulative.binary_search_by(|c| c.total_cmp(&s)) {
                    Ok(i) => i.min(pieces.len() - 1),
                    Err(i) => (i - 1).min(pieces.len() - 1),
                };
                let (p, u, kappa) = pieces[idx].eval(s - cumulative[idx]);
                let left = [-u[1], u[0]];
                CurvePoint {
                    p,
                    d1: [u[0] * speed, u[1] * speed],
                    d2: [kappa * left[0] * speed * speed, kappa * left[1] * speed * speed],
                }
            }
        }
    }

    /// Curve has bounded curvature everywhere.
    pub fn is_smooth(&self) -> bool {
        !matches!(self.kind, EvalKind::Pieces { smooth: false, .. })
    }

    /// Quadrature nodes and weights in the parameter t over [0, 2π):
    /// periodic trapezoid for analytic kinds, Gauss–Legendre per piece otherwise.
    pub fn quadrature(&self, n: usize) -> Vec<(f64, f64)> {
        match &self.kind {
            EvalKind::Pieces { cumulative, length, .. } => {
                let (gx, gw) = gauss_legendre(8);
                let pieces = cumulative.len() - 1;
                let mut out = Vec::with_capacity(n.max(8 * pieces));
                for i in 0..pieces {
                    let (s0, s1) = (cumulative[i], cumulative[i + 1]);
                    let sub = ((n as f64 * (s1 - s0) / length / 8.0).ceil() as usize).max(1);
                    let hs = (s1 - s0) / sub as f64;
                    for j in 0..sub {
                        let a = s0 + j as f64 * hs;
                        for (x, w) in gx.iter().zip(&gw) {
                            let s = a + 0.5 * hs * (x + 1.0);
                            let t = s / length * TAU;
                            let wt = 0.5 * hs * w / length * TAU;
                            let t = if self.reversed { (TAU - t).rem_euclid(TAU) } else { t };
                            out.push((t, wt));
                        }
                    }
                }
                out
            }
            _ => {
                let h = TAU / n as f64;
                (0..n).map(|i| (i as f64 * h, h)).collect()
            }
        }
    }

    /// Parameter values of sharp corners (sharp polylines only).
    pub fn corner_parameters(&self) -> Vec<f64> {
        match &self.kind {
            EvalKind::Pieces { cumulative, length, smooth: false, .. } => cumulative[..cumulative.len() - 1]
                .iter()
                .map(|&s| {
                    let t = s / length * TAU;
                    if self.reversed {
                        (TAU - t).rem_euclid(TAU)
                    } else {
                        t
                    }
                })
                .collect(),
            _ => Vec::new(),
        }
    }

    pub fn sample(&self, n: usize) -> Vec<Point> {
        (0..n).map(|i| self.point(TAU * i as f64 / n as f64)).collect()
    }

    /// Parameter of the closest curve point to `p`, refined by Newton from a guess.
    pub fn closest_parameter(&self, p: Point, guess: f64) -> f64 {
        let mut t = guess;
        for _ in 0..30 {
            let c = self.eval(t);
            let r = [c.p[0] - p[0], c.p[1] - p[1]];
            let g = r[0] * c.d1[0] + r[1] * c.d1[1];
            let gp = c.d1[0] * c.d1[0] + c.d1[1] * c.d1[1] + r[0] * c.d2[0] + r[1] * c.d2[1];
            if gp <= 0.0 {
                break;
            }
            let step = (g / gp).clamp(-0.1, 0.1);
            t -= step;
            if step.abs() < 1e-15 {
                break;
            }
        }
        t.rem_euclid(TAU)
    }
}

/// Gauss–Legendre nodes and weights on [−1, 1] by Newton on P_n.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n {
        let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * z * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            let pn = if n == 0 { 1.0 } else if n == 1 { z } else { p1 };
            let pn1 = if n == 1 { 1.0 } else { p0 };
            dp = n as f64 * (z * pn - pn1) / (z * z - 1.0);
            let dz = pn / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = -z;
        w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
    }
    (x, w)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_legendre_integrates_polynomials() {
        let (x, w) = gauss_legendre(5);
        let int: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(8)).sum();
        assert!((int - 2.0 / 9.0).abs() < 1e-14);
        assert!((w.iter().sum::<f64>() - 2.0).abs() < 1e-14);
    }

    #[test]
    fn polar_conversion_reproduces_radius() {
        let s = FourierSeries::from_polar([0.3, -0.2], &[1.0, 0.0, 0.25], &[0.0, 0.1]);
        for i in 0..17 {
            let th = 0.37 * i as f64;
            let r = 1.0 + 0.25 * (2.0 * th).cos() + 0.1 * th.sin();
            let (p, ..) = s.eval(th);
            assert!((p[0] - (0.3 + r * th.cos())).abs() < 1e-14);
            assert!((p[1] - (-0.2 + r * th.sin())).abs() < 1e-14);
        }
    }

    #[test]
    fn ellipse_curvature_peak() {
        let e = BoundaryCurve::ellipse(2.0, 0.5).evaluator().unwrap();
        assert!((e.eval(0.0).curvature() - 8.0).abs() < 1e-12);
        assert!((e.eval(PI / 2.0).curvature() - 0.5 / 4.0).abs() < 1e-12);
    }

    #[test]
    fn rounded_square_has_arc_curvature() {
        let sq = BoundaryCurve::polyline(vec![[-1.0, -1.0], [1.0, -1.0], [1.0, 1.0], [-1.0, 1.0]], Some(0.25));
        let ev = sq.evaluator().unwrap();
        let kmax = ev.quadrature(256).iter().map(|&(t, _)| ev.eval(t).curvature()).fold(f64::MIN, f64::max);
        assert!((kmax - 4.0).abs() < 1e-9);
        let len: f64 = ev.quadrature(256).iter().map(|&(t, w)| w * ev.eval(t).speed()).sum();
        let exact = 4.0 * 1.5 + 2.0 * PI * 0.25;
        assert!((len - exact).abs() < 1e-12);
    }

    #[test]
    fn reversal_flips_curvature_sign() {
        let c = BoundaryCurve::circle([0.0, 0.0], 2.0).reversed().evaluator().unwrap();
        assert!((c.eval(0.4).curvature() + 0.5).abs() < 1e-12);
    }

    #[test]
    fn closest_parameter_on_ellipse() {
        let e = BoundaryCurve::ellipse(3.0, 1.0).evaluator().unwrap();
        let p = e.point(1.1);
        let q = [p[0] * 1.001, p[1] * 1.001];
        let t = e.closest_parameter(q, 1.0);
        assert!((t - 1.1).abs() < 1e-2);
        let back = e.point(t);
        assert!(((back[0] - q[0]).powi(2) + (back[1] - q[1]).powi(2)).sqrt() < 0.01);
    }
}
