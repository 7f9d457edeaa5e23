//! Analytic planar domains and their geometric functionals.

pub mod curve;
pub mod file;
pub mod polygon;
pub mod presets;
pub mod raster;

pub use curve::{BoundaryCurve, CurveEvaluator, CurveKind, CurvePoint, FourierSeries, Point};

use crate::error::{Error, Result};
use raster::Raster;
use serde::{Deserialize, Serialize};
use std::f64::consts::{PI, TAU};

/// Samples per curve used for validity checks and point location.
const CHECK_SAMPLES: usize = 2048;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum BoundaryTag {
    Outer,
    Hole(usize),
}

impl BoundaryTag {
    pub fn code(self) -> usize {
        match self {
            BoundaryTag::Outer => 0,
            BoundaryTag::Hole(j) => j + 1,
        }
    }

    pub fn from_code(code: usize) -> Self {
        if code == 0 {
            BoundaryTag::Outer
        } else {
            BoundaryTag::Hole(code - 1)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DomainSpec {
    pub outer: BoundaryCurve,
    #[serde(default)]
    pub holes: Vec<BoundaryCurve>,
    #[serde(default)]
    pub label: String,
}

/// One boundary component, parametrized so that Ω lies to its left.
#[derive(Debug, Clone)]
pub struct Component {
    pub tag: BoundaryTag,
    pub curve: CurveEvaluator,
}

impl DomainSpec {
    pub fn new(outer: BoundaryCurve, holes: Vec<BoundaryCurve>, label: impl Into<String>) -> Self {
        Self { outer, holes, label: label.into() }
    }

    pub fn is_simply_connected(&self) -> bool {
        self.holes.is_empty()
    }

    pub fn is_smooth(&self) -> bool {
        self.outer.is_smooth() && self.holes.iter().all(BoundaryCurve::is_smooth)
    }

    pub fn curve(&self, tag: BoundaryTag) -> &BoundaryCurve {
        match tag {
            BoundaryTag::Outer => &self.outer,
            BoundaryTag::Hole(j) => &self.holes[j],
        }
    }

    /// Similarity image x ↦ offset + scale·R(angle)·x.
    pub fn transformed(&self, scale: f64, angle: f64, offset: Point) -> Self {
        Self {
            outer: self.outer.transformed(scale, angle, offset),
            holes: self.holes.iter().map(|h| h.transformed(scale, angle, offset)).collect(),
            label: self.label.clone(),
        }
    }

    pub fn scaled(&self, t: f64) -> Self {
        self.transformed(t, 0.0, [0.0, 0.0])
    }

    /// Boundary components with outer counterclockwise and holes clockwise.
    pub fn components(&self) -> Result<Vec<Component>> {
        let mut out = Vec::with_capacity(1 + self.holes.len());
        let tags = std::iter::once(BoundaryTag::Outer).chain((0..self.holes.len()).map(BoundaryTag::Hole));
        for tag in tags {
            let c = self.curve(tag);
            let ev = c.evaluator()?;
            let area = polygon::signed_area(&ev.sample(512));
            let want_ccw = tag == BoundaryTag::Outer;
            let curve = if (area > 0.0) == want_ccw { ev } else { c.clone().reversed().evaluator()? };
            out.push(Component { tag, curve });
        }
        Ok(out)
    }

    /// Closed sample polygons of all components (Ω-positive orientation).
    pub fn sample_loops(&self, n: usize) -> Result<Vec<Vec<Point>>> {
        Ok(self.components()?.iter().map(|c| c.curve.sample(n)).collect())
    }

    /// Checks simplicity, speed, hole placement and clearance.
    pub fn validate(&self) -> Result<()> {
        let comps = self.components()?;
        let loops: Vec<Vec<Point>> = comps.iter().map(|c| c.curve.sample(CHECK_SAMPLES)).collect();
        for (c, poly) in comps.iter().zip(&loops) {
            let name = tag_name(c.tag);
            if poly.iter().any(|p| !p[0].is_finite() || !p[1].is_finite()) {
                return Err(Error::InvalidDomain(format!("{name} boundary evaluates to non-finite points")));
            }
            if let Some((i, j)) = polygon::self_intersection(poly) {
                return Err(Error::InvalidDomain(format!("{name} boundary self-intersects near samples {i} and {j}")));
            }
            if c.curve.is_smooth() {
                let speeds: Vec<f64> =
                    (0..CHECK_SAMPLES).map(|i| c.curve.eval(TAU * i as f64 / CHECK_SAMPLES as f64).speed()).collect();
                let mean = speeds.iter().sum::<f64>() / speeds.len() as f64;
                let min = speeds.iter().cloned().fold(f64::INFINITY, f64::min);
                if !(min > 1e-6 * mean) {
                    return Err(Error::InvalidDomain(format!("{name} boundary has degenerate speed {min:e}")));
                }
            }
        }
        let outer = &loops[0];
        for (j, hole) in loops.iter().enumerate().skip(1) {
            if !polygon::contains(outer, hole[0]) || polygon::polygons_cross(outer, hole) {
                return Err(Error::InvalidDomain(format!("hole {} is not strictly inside the outer boundary", j - 1)));
            }
            for (i, other) in loops.iter().enumerate().skip(j + 1) {
                if polygon::polygons_cross(hole, other)
                    || polygon::contains(hole, other[0])
                    || polygon::contains(other, hole[0])
                {
                    return Err(Error::InvalidDomain(format!("holes {} and {} overlap", j - 1, i - 1)));
                }
            }
        }
        Ok(())
    }

    /// Point location against finely sampled boundaries.
    pub fn contains(&self, p: Point) -> Result<bool> {
        let loops = self.sample_loops(CHECK_SAMPLES)?;
        Ok(polygon::contains(&loops[0], p) && loops[1..].iter().all(|h| !polygon::contains(h, p)))
    }

    pub fn bounding_box(&self) -> Result<(Point, Point)> {
        let loops = self.sample_loops(CHECK_SAMPLES)?;
        Ok(bbox(&loops[0]))
    }
}

fn tag_name(tag: BoundaryTag) -> String {
    match tag {
        BoundaryTag::Outer => "outer".into(),
        BoundaryTag::Hole(j) => format!("hole {j}"),
    }
}

fn bbox(poly: &[Point]) -> (Point, Point) {
    let mut lo = [f64::INFINITY; 2];
    let mut hi = [f64::NEG_INFINITY; 2];
    for p in poly {
        for d in 0..2 {
            lo[d] = lo[d].min(p[d]);
            hi[d] = hi[d].max(p[d]);
        }
    }
    (lo, hi)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeometrySummary {
    /// Green line integral ½∮(x·ν) ds.
    pub area: f64,
    /// Shoelace area of the quadrature-node polygon.
    pub area_shoelace: f64,
    pub area_discrepancy: f64,
    pub perimeter: f64,
    /// Largest signed curvature over all components (`inf` for sharp polylines).
    pub kappa_max: f64,
    pub inradius: f64,
    /// Raster spacing used for the inradius, an upper bound on its error.
    pub inradius_spacing: f64,
    pub r_omega: f64,
    pub star_shaped: bool,
    pub simply_connected: bool,
    pub fraenkel_asymmetry: Option<f64>,
}

#[derive(Debug, Clone, Copy)]
pub struct SummaryOptions {
    pub quadrature_points: usize,
    pub raster_resolution: usize,
    /// Grid resolution of the Fraenkel asymmetry; skipped when `None`.
    pub fraenkel_resolution: Option<usize>,
}

impl Default for SummaryOptions {
    fn default() -> Self {
        Self { quadrature_points: 1024, raster_resolution: 1024, fraenkel_resolution: None }
    }
}

pub fn summarize(domain: &DomainSpec, quadrature_points: usize) -> Result<GeometrySummary> {
    summarize_with(domain, &SummaryOptions { quadrature_points, ..Default::default() })
}

pub fn summarize_with(domain: &DomainSpec, opts: &SummaryOptions) -> Result<GeometrySummary> {
    if opts.quadrature_points < 64 {
        return Err(Error::InvalidInput(format!("quadrature_points must be at least 64, got {}", opts.quadrature_points)));
    }
    domain.validate()?;
    let comps = domain.components()?;
    let mut area = 0.0;
    let mut area_shoelace = 0.0;
    let mut perimeter = 0.0;
    let mut kappa_max = f64::NEG_INFINITY;
    let mut star_shaped = domain.is_simply_connected();
    for c in &comps {
        let q = c.curve.quadrature(opts.quadrature_points);
        let mut nodes = Vec::with_capacity(q.len());
        let mut best = (f64::NEG_INFINITY, 0.0);
        for &(t, w) in &q {
            let cp = c.curve.eval(t);
            // x·ν |x'| with ν = (T_y, −T_x)
            let p_ds = cp.p[0] * cp.d1[1] - cp.p[1] * cp.d1[0];
            area += 0.5 * w * p_ds;
            perimeter += w * cp.speed();
            if c.tag == BoundaryTag::Outer && p_ds < 0.0 {
                star_shaped = false;
            }
            let k = cp.curvature();
            if k > best.0 {
                best = (k, t);
            }
            nodes.push(cp.p);
        }
        area_shoelace += polygon::signed_area(&nodes);
        let k = if !c.curve.is_smooth() {
            f64::INFINITY
        } else {
            let h = TAU / q.len() as f64;
            refine_max(|t| c.curve.eval(t).curvature(), best.1 - h, best.1 + h).max(best.0)
        };
        kappa_max = kappa_max.max(k);
    }
    if !(area > 0.0) {
        return Err(Error::InvalidDomain(format!("non-positive area {area}")));
    }
    let (inradius, inradius_spacing) = inradius(domain, opts.raster_resolution)?;
    let fraenkel_asymmetry = match opts.fraenkel_resolution {
        Some(res) => Some(fraenkel_asymmetry(domain, res)?),
        None => None,
    };
    Ok(GeometrySummary {
        area,
        area_shoelace,
        area_discrepancy: (area - area_shoelace).abs() / area,
        perimeter,
        kappa_max,
        inradius,
        inradius_spacing,
        r_omega: (area / PI).sqrt(),
        star_shaped,
        simply_connected: domain.is_simply_connected(),
        fraenkel_asymmetry,
    })
}

/// Golden-section maximization on a bracket.
fn refine_max(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..80 {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(d);
        }
        if (b - a).abs() < 1e-13 {
            break;
        }
    }
    fc.max(fd)
}

/// Largest inscribed disc radius: distance transform on a raster followed by
/// pattern search on the exact distance to the sampled boundary.
/// Returns `(radius, raster spacing)`.
pub fn inradius(domain: &DomainSpec, resolution: usize) -> Result<(f64, f64)> {
    let loops = domain.sample_loops(CHECK_SAMPLES)?;
    let (lo, hi) = bbox(&loops[0]);
    let pad = 0.01 * (hi[0] - lo[0]).max(hi[1] - lo[1]);
    let r = Raster::fill(&loops, [lo[0] - pad, lo[1] - pad], [hi[0] + pad, hi[1] + pad], resolution);
    let d2 = r.distance_to_outside_sq();
    let (best, _) = d2.iter().enumerate().fold((0, f64::NEG_INFINITY), |acc, (i, &v)| if v > acc.1 { (i, v) } else { acc });
    let start = r.center(best % r.nx, best / r.nx);
    let dist = |p: Point| -> f64 {
        let inside = polygon::contains(&loops[0], p) && loops[1..].iter().all(|h| !polygon::contains(h, p));
        let d = loops.iter().map(|l| polygon::boundary_distance(l, p)).fold(f64::INFINITY, f64::min);
        if inside {
            d
        } else {
            -d
        }
    };
    let (_, val) = pattern_search(dist, start, r.spacing, r.spacing * 1e-4);
    Ok((val, r.spacing))
}

/// Compass search maximizing `f` from `x0`.
fn pattern_search(f: impl Fn(Point) -> f64, x0: Point, step0: f64, min_step: f64) -> (Point, f64) {
    let mut x = x0;
    let mut fx = f(x);
    let mut step = step0;
    let d = std::f64::consts::FRAC_1_SQRT_2;
    let dirs = [[1.0, 0.0], [-1.0, 0.0], [0.0, 1.0], [0.0, -1.0], [d, d], [-d, -d], [d, -d], [-d, d]];
    while step > min_step {
        let mut improved = false;
        for d in &dirs {
            let y = [x[0] + step * d[0], x[1] + step * d[1]];
            let fy = f(y);
            if fy > fx {
                x = y;
                fx = fy;
                improved = true;
                break;
            }
        }
        if !improved {
            step *= 0.5;
        }
    }
    (x, fx)
}

/// Fraenkel asymmetry of the domain rescaled to unit area: the least
/// symmetric-difference area with a unit-area disc, by rasterized counting,
/// grid search over centers and local refinement.
pub fn fraenkel_asymmetry(domain: &DomainSpec, grid_resolution: usize) -> Result<f64> {
    domain.validate()?;
    let area = summarize_area(domain)?;
    let unit = domain.scaled(1.0 / area.sqrt());
    let loops = unit.sample_loops(CHECK_SAMPLES)?;
    let r0 = 1.0 / PI.sqrt();
    let (lo, hi) = bbox(&loops[0]);
    let lo_w = [lo[0] - r0 - 0.05, lo[1] - r0 - 0.05];
    let hi_w = [hi[0] + r0 + 0.05, hi[1] + r0 + 0.05];
    let r = Raster::fill(&loops, lo_w, hi_w, grid_resolution);
    let n_omega = r.count() as f64;
    let cell = r.spacing * r.spacing;
    let sym_diff = |c: Point| -> f64 {
        let i0 = (((c[0] - r0 - r.origin[0]) / r.spacing).floor().max(0.0) as usize).min(r.nx);
        let i1 = (((c[0] + r0 - r.origin[0]) / r.spacing).ceil().max(0.0) as usize).min(r.nx);
        let j0 = (((c[1] - r0 - r.origin[1]) / r.spacing).floor().max(0.0) as usize).min(r.ny);
        let j1 = (((c[1] + r0 - r.origin[1]) / r.spacing).ceil().max(0.0) as usize).min(r.ny);
        let (mut n_disc, mut n_both) = (0usize, 0usize);
        for j in j0..j1 {
            for i in i0..i1 {
                let p = r.center(i, j);
                if (p[0] - c[0]).powi(2) + (p[1] - c[1]).powi(2) < r0 * r0 {
                    n_disc += 1;
                    if r.inside[j * r.nx + i] {
                        n_both += 1;
                    }
                }
            }
        }
        (n_omega + n_disc as f64 - 2.0 * n_both as f64) * cell
    };
    let coarse = 11;
    let mut best = ([0.0, 0.0], f64::INFINITY);
    for a in 0..coarse {
        for b in 0..coarse {
            let c = [
                lo[0] + (hi[0] - lo[0]) * a as f64 / (coarse - 1) as f64,
                lo[1] + (hi[1] - lo[1]) * b as f64 / (coarse - 1) as f64,
            ];
            let v = sym_diff(c);
            if v < best.1 {
                best = (c, v);
            }
        }
    }
    let step = ((hi[0] - lo[0]).max(hi[1] - lo[1]) / (coarse - 1) as f64).max(r.spacing);
    let (_, neg) = pattern_search(|c| -sym_diff(c), best.0, step, 0.5 * r.spacing);
    Ok((-neg).max(0.0))
}

fn summarize_area(domain: &DomainSpec) -> Result<f64> {
    let mut area = 0.0;
    for c in domain.components()? {
        for (t, w) in c.curve.quadrature(1024) {
            let cp = c.curve.eval(t);
            area += 0.5 * w * (cp.p[0] * cp.d1[1] - cp.p[1] * cp.d1[0]);
        }
    }
    Ok(area)
}

/// ℓ(∂Ω) − ∮ p κ ds for a smooth simply connected domain containing the origin.
pub fn minkowski_residual(domain: &DomainSpec) -> Result<f64> {
    minkowski_residual_with(domain, 1024)
}

pub fn minkowski_residual_with(domain: &DomainSpec, quadrature_points: usize) -> Result<f64> {
    if !domain.is_simply_connected() {
        return Err(Error::InvalidDomain("Minkowski residual needs a simply connected domain".into()));
    }
    if !domain.is_smooth() {
        return Err(Error::InvalidDomain("Minkowski residual needs a smooth boundary".into()));
    }
    if !domain.contains([0.0, 0.0])? {
        return Err(Error::InvalidDomain("origin lies outside the domain".into()));
    }
    let comps = domain.components()?;
    let c = &comps[0].curve;
    let mut len = 0.0;
    let mut pk = 0.0;
    for (t, w) in c.quadrature(quadrature_points) {
        let cp = c.eval(t);
        let s = cp.speed();
        let p = (cp.p[0] * cp.d1[1] - cp.p[1] * cp.d1[0]) / s;
        len += w * s;
        pk += w * p * cp.curvature() * s;
    }
    Ok(len - pk)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn disc_summary() {
        let s = summarize(&presets::disc(1.0), 256).unwrap();
        assert!((s.area - PI).abs() < 1e-12);
        assert!((s.perimeter - TAU).abs() < 1e-12);
        assert!((s.kappa_max - 1.0).abs() < 1e-12);
        assert!((s.inradius - 1.0).abs() < 1e-5);
        assert!((s.r_omega - 1.0).abs() < 1e-12);
        assert!(s.star_shaped);
    }

    #[test]
    fn ellipse_curvature_and_area() {
        let s = summarize(&presets::ellipse(2.0, 0.5), 512).unwrap();
        assert!((s.area - PI).abs() < 1e-12);
        assert!((s.kappa_max - 8.0).abs() < 1e-9);
        assert!((s.inradius - 0.5).abs() < 1e-4);
    }

    #[test]
    fn annulus_curvature_uses_outer_circle() {
        let s = summarize(&presets::annulus(0.5, None), 256).unwrap();
        let r2 = 5f64.sqrt() / 2.0;
        assert!((s.area - PI).abs() < 1e-12);
        assert!((s.kappa_max - 1.0 / r2).abs() < 1e-12);
        assert!(!s.star_shaped);
        assert!((s.inradius - (r2 - 0.5) / 2.0).abs() < 1e-4);
    }

    #[test]
    fn minkowski_vanishes_on_disc() {
        assert!(minkowski_residual(&presets::disc(1.0)).unwrap().abs() < 1e-12);
        let off = presets::disc(1.0).transformed(1.0, 0.0, [3.0, 0.0]);
        assert!(matches!(minkowski_residual(&off), Err(Error::InvalidDomain(_))));
    }

    #[test]
    fn bowtie_polyline_rejected() {
        let d = DomainSpec::new(BoundaryCurve::polyline(vec![[0.0, 0.0], [1.0, 1.0], [1.0, 0.0], [0.0, 1.0]], None), vec![], "bow");
        assert!(matches!(summarize(&d, 128), Err(Error::InvalidDomain(_))));
    }

    #[test]
    fn hole_outside_rejected() {
        let d = DomainSpec::new(BoundaryCurve::circle([0.0, 0.0], 1.0), vec![BoundaryCurve::circle([2.0, 0.0], 0.2)], "bad");
        assert!(d.validate().is_err());
    }

    #[test]
    fn fraenkel_of_disc_is_small() {
        let a = fraenkel_asymmetry(&presets::disc(1.3).transformed(1.0, 0.0, [0.4, -0.2]), 400).unwrap();
        assert!(a < 5e-3, "{a}");
    }
}
