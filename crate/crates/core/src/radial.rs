//! One-dimensional oracles: angular-momentum fibers of discs and annuli and
//! the de Gennes half-line model.
//!
//! A fiber with angular momentum m carries the radial operator
//! −u″ − u′/r + (m/r − Br/2)²u, discretized by P1 elements on the weighted
//! form ∫r(u′² + Vu²) / ∫ru² and extrapolated from two grids.

use crate::error::{Error, Result};
use crate::fem::BoundaryCondition;
use serde::{Deserialize, Serialize};
use std::path::Path;
use std::sync::OnceLock;

const GAUSS4_X: [f64; 4] = [-0.861_136_311_594_052_6, -0.339_981_043_584_856_3, 0.339_981_043_584_856_3, 0.861_136_311_594_052_6];
const GAUSS4_W: [f64; 4] = [0.347_854_845_137_453_9, 0.652_145_154_862_546_1, 0.652_145_154_862_546_1, 0.347_854_845_137_453_9];

/// Default number of elements on the coarse grid (the fine grid doubles it).
pub const DEFAULT_ELEMENTS: usize = 4096;

/// Symmetric tridiagonal pencil (K, M).
#[derive(Debug, Clone)]
struct Pencil {
    kd: Vec<f64>,
    ke: Vec<f64>,
    md: Vec<f64>,
    me: Vec<f64>,
}

impl Pencil {
    /// P1 assembly of ∫w(u′v′ + Vuv) and ∫wuv on [a, b] with `n` elements;
    /// `fix_left`/`fix_right` drop the end unknowns (Dirichlet).
    fn assemble(a: f64, b: f64, n: usize, weight: impl Fn(f64) -> f64, pot: impl Fn(f64) -> f64, fix_left: bool, fix_right: bool) -> Pencil {
        let h = (b - a) / n as f64;
        let nodes = n + 1;
        let (mut kd, mut ke, mut md, mut me) = (vec![0.0; nodes], vec![0.0; n], vec![0.0; nodes], vec![0.0; n]);
        for e in 0..n {
            let x0 = a + e as f64 * h;
            let mut k = [[0.0; 2]; 2];
            let mut m = [[0.0; 2]; 2];
            for (&gx, &gw) in GAUSS4_X.iter().zip(&GAUSS4_W) {
                let s = 0.5 * (gx + 1.0);
                let x = x0 + s * h;
                let w = 0.5 * h * gw * weight(x);
                let phi = [1.0 - s, s];
                let dphi = [-1.0 / h, 1.0 / h];
                let v = pot(x);
                for i in 0..2 {
                    for j in 0..2 {
                        k[i][j] += w * (dphi[i] * dphi[j] + v * phi[i] * phi[j]);
                        m[i][j] += w * phi[i] * phi[j];
                    }
                }
            }
            kd[e] += k[0][0];
            kd[e + 1] += k[1][1];
            ke[e] += k[0][1];
            md[e] += m[0][0];
            md[e + 1] += m[1][1];
            me[e] += m[0][1];
        }
        let lo = usize::from(fix_left);
        let hi = nodes - usize::from(fix_right);
        Pencil {
            kd: kd[lo..hi].to_vec(),
            ke: ke[lo..hi - 1].to_vec(),
            md: md[lo..hi].to_vec(),
            me: me[lo..hi - 1].to_vec(),
        }
    }

    fn dim(&self) -> usize {
        self.kd.len()
    }

    /// Number of eigenvalues below σ (Sylvester inertia of K − σM).
    fn count_below(&self, sigma: f64) -> usize {
        let mut count = 0;
        let mut p = 0.0;
        for i in 0..self.dim() {
            let diag = self.kd[i] - sigma * self.md[i];
            p = if i == 0 {
                diag
            } else {
                let off = self.ke[i - 1] - sigma * self.me[i - 1];
                diag - off * off / p
            };
            if p == 0.0 {
                p = -f64::EPSILON * diag.abs().max(1e-300);
            }
            if p < 0.0 {
                count += 1;
            }
        }
        count
    }

    /// k-th smallest eigenvalue (k ≥ 1) by bisection.
    fn eigenvalue(&self, k: usize) -> f64 {
        let mut lo = 0.0;
        let mut hi = 1.0;
        while self.count_below(hi) < k {
            lo = hi;
            hi *= 2.0;
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.count_below(mid) >= k {
                hi = mid;
            } else {
                lo = mid;
            }
            if hi - lo <= 4.0 * f64::EPSILON * hi {
                break;
            }
        }
        0.5 * (lo + hi)
    }

    /// Eigenvector for an (accurate) eigenvalue by two steps of inverse iteration, M-normalized.
    fn eigenvector(&self, lambda: f64) -> Vec<f64> {
        let n = self.dim();
        let shift = lambda * (1.0 + 1e-12) + 1e-14;
        let mut x = vec![1.0; n];
        for _ in 0..3 {
            let rhs = self.mass_mul(&x);
            // Thomas algorithm on K − σM
            let mut c = vec![0.0; n];
            let mut d = vec![0.0; n];
            let mut piv = self.kd[0] - shift * self.md[0];
            for i in 0..n {
                if i > 0 {
                    let off = self.ke[i - 1] - shift * self.me[i - 1];
                    piv = self.kd[i] - shift * self.md[i] - off * c[i - 1];
                    d[i] = (rhs[i] - off * d[i - 1]) / nonzero(piv);
                } else {
                    d[0] = rhs[0] / nonzero(piv);
                }
                if i + 1 < n {
                    c[i] = (self.ke[i] - shift * self.me[i]) / nonzero(piv);
                }
            }
            for i in (0..n - 1).rev() {
                d[i] -= c[i] * d[i + 1];
            }
            let nrm = dot(&d, &self.mass_mul(&d)).sqrt();
            x = d.iter().map(|v| v / nrm).collect();
        }
        if x.iter().sum::<f64>() < 0.0 {
            x.iter_mut().for_each(|v| *v = -*v);
        }
        x
    }

    fn mass_mul(&self, x: &[f64]) -> Vec<f64> {
        let n = self.dim();
        (0..n)
            .map(|i| {
                let mut s = self.md[i] * x[i];
                if i > 0 {
                    s += self.me[i - 1] * x[i - 1];
                }
                if i + 1 < n {
                    s += self.me[i] * x[i + 1];
                }
                s
            })
            .collect()
    }
}

fn nonzero(p: f64) -> f64 {
    if p.abs() < 1e-300 {
        1e-300
    } else {
        p
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// One angular-momentum fiber of a disc (`r_inner = None`) or annulus.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FiberProblem {
    pub m: i64,
    pub b: f64,
    pub r_outer: f64,
    pub r_inner: Option<f64>,
    pub bc: BoundaryCondition,
    /// Elements on the coarse grid.
    pub elements: usize,
}

impl FiberProblem {
    pub fn disc(m: i64, b: f64, r: f64, bc: BoundaryCondition) -> Self {
        Self { m, b, r_outer: r, r_inner: None, bc, elements: DEFAULT_ELEMENTS }
    }

    pub fn annulus(m: i64, b: f64, r1: f64, r2: f64, bc: BoundaryCondition) -> Self {
        Self { m, b, r_outer: r2, r_inner: Some(r1), bc, elements: DEFAULT_ELEMENTS }
    }

    fn potential(&self, r: f64) -> f64 {
        let v = self.m as f64 / r - 0.5 * self.b * r;
        v * v
    }

    /// Interval carrying the low-lying fiber states: the region where V stays
    /// within 3B + 20 of its minimum, padded by 12/√B, clipped to the domain.
    fn interval(&self) -> (f64, bool, f64, bool) {
        let a = self.r_inner.unwrap_or(0.0);
        let b = self.r_outer;
        if self.b <= 0.0 {
            return (a, false, b, false);
        }
        let samples = 4096;
        let r_at = |i: usize| a + (b - a) * (i as f64 + 0.5) / samples as f64;
        let vmin = (0..samples).map(|i| self.potential(r_at(i))).fold(f64::INFINITY, f64::min);
        let cap = vmin + 3.0 * self.b + 20.0;
        let inside: Vec<usize> = (0..samples).filter(|&i| self.potential(r_at(i)) <= cap).collect();
        let (i0, i1) = (inside[0], *inside.last().unwrap_or(&inside[0]));
        let pad = 12.0 / self.b.sqrt() + 2.0 * (b - a) / samples as f64;
        let lo = (r_at(i0) - pad).max(a);
        let hi = (r_at(i1) + pad).min(b);
        (lo, lo > a, hi, hi < b)
    }

    fn pencil(&self, n: usize) -> Pencil {
        let (lo, cut_lo, hi, cut_hi) = self.interval();
        let dirichlet = self.bc == BoundaryCondition::Dirichlet;
        let left_fixed = if cut_lo {
            true
        } else if self.r_inner.is_some() {
            dirichlet
        } else {
            // regularity at the origin
            self.m != 0
        };
        let right_fixed = cut_hi || dirichlet;
        Pencil::assemble(lo, hi, n, |r| r, |r| self.potential(r), left_fixed, right_fixed)
    }

    /// Lowest `k` eigenvalues, Richardson-extrapolated from `elements` and
    /// `2·elements`; also returns the estimated extrapolation error.
    pub fn eigenvalues_with_error(&self, k: usize) -> Result<(Vec<f64>, f64)> {
        if !(self.r_outer > 0.0) || self.r_inner.is_some_and(|r| !(r > 0.0 && r < self.r_outer)) {
            return Err(Error::InvalidInput("fiber radii must satisfy 0 < R1 < R".into()));
        }
        if !(self.b >= 0.0) {
            return Err(Error::InvalidInput(format!("field strength must be non-negative, got {}", self.b)));
        }
        let coarse = self.pencil(self.elements);
        let fine = self.pencil(2 * self.elements);
        let mut out = Vec::with_capacity(k);
        let mut err: f64 = 0.0;
        for j in 1..=k {
            let (lc, lf) = (coarse.eigenvalue(j), fine.eigenvalue(j));
            out.push((4.0 * lf - lc) / 3.0);
            err = err.max((lf - lc).abs() / 3.0);
        }
        Ok((out, err))
    }

    pub fn eigenvalues(&self, k: usize) -> Result<Vec<f64>> {
        Ok(self.eigenvalues_with_error(k)?.0)
    }

    pub fn lowest(&self) -> Result<f64> {
        Ok(self.eigenvalues(1)?[0])
    }
}

fn flux_center(b: f64, r_inner: Option<f64>, r_outer: f64) -> i64 {
    let r2 = match r_inner {
        Some(r1) => 0.5 * (r1 * r1 + r_outer * r_outer),
        None => r_outer * r_outer,
    };
    (0.5 * b * r2).round() as i64
}

fn check_window(m_window: usize) -> Result<()> {
    if m_window < 5 {
        return Err(Error::InvalidInput(format!("m_window must be at least 5, got {m_window}")));
    }
    Ok(())
}

/// Lowest fiber eigenvalue over m ∈ [m_c − w, m_c + w]; fails when the
/// minimum sits on the window edge.
fn windowed_minimum(make: impl Fn(i64) -> FiberProblem + Sync, center: i64, m_window: usize) -> Result<(f64, i64)> {
    use rayon::prelude::*;
    check_window(m_window)?;
    let w = m_window as i64;
    let vals: Vec<(f64, i64)> = (center - w..=center + w)
        .into_par_iter()
        .map(|m| make(m).lowest().map(|v| (v, m)))
        .collect::<Result<Vec<_>>>()?;
    let best = vals.iter().copied().fold((f64::INFINITY, 0), |acc, x| if x.0 < acc.0 { x } else { acc });
    if best.1 == center - w || best.1 == center + w {
        return Err(Error::Window { lo: center - w, hi: center + w, m_star: best.1 });
    }
    Ok(best)
}

/// Lowest eigenvalue of the disc of radius `r` in the symmetric gauge and the minimizing fiber.
pub fn disc_eigenvalue(r: f64, b: f64, bc: BoundaryCondition, m_window: usize) -> Result<(f64, i64)> {
    windowed_minimum(|m| FiberProblem::disc(m, b, r, bc), flux_center(b, None, r), m_window)
}

/// Annulus analogue of [`disc_eigenvalue`].
pub fn annulus_eigenvalue(r1: f64, r2: f64, b: f64, bc: BoundaryCondition, m_window: usize) -> Result<(f64, i64)> {
    if !(r1 > 0.0 && r1 < r2) {
        return Err(Error::InvalidInput(format!("annulus radii must satisfy 0 < R1 < R2, got {r1}, {r2}")));
    }
    windowed_minimum(|m| FiberProblem::annulus(m, b, r1, r2, bc), flux_center(b, Some(r1), r2), m_window)
}

/// Discrete descent over m with step doubling, then a window check around the
/// candidate; fiber values are memoized.
fn auto_window(f: impl Fn(i64) -> Result<f64>, center: i64) -> Result<(f64, i64)> {
    let mut cache = std::collections::HashMap::new();
    let mut eval = |m: i64| -> Result<f64> {
        if let Some(&v) = cache.get(&m) {
            return Ok(v);
        }
        let v = f(m)?;
        cache.insert(m, v);
        Ok(v)
    };
    let mut m = center;
    let mut best = eval(m)?;
    for _ in 0..64 {
        let dir = if eval(m + 1)? < best {
            1
        } else if eval(m - 1)? < best {
            -1
        } else {
            0
        };
        if dir != 0 {
            let mut step = 1;
            while eval(m + dir * step)? < best {
                best = eval(m + dir * step)?;
                m += dir * step;
                step *= 2;
            }
            continue;
        }
        // local minimum: confirm on m ± 5
        let mut moved = false;
        for k in (m - 5)..=(m + 5) {
            let v = eval(k)?;
            if v < best {
                best = v;
                m = k;
                moved = true;
            }
        }
        if !moved {
            return Ok((best, m));
        }
    }
    Err(Error::Numerical("fiber minimum search did not settle".into()))
}

/// [`disc_eigenvalue`] with an automatically enlarged window.
pub fn disc_ground_state(r: f64, b: f64, bc: BoundaryCondition) -> Result<(f64, i64)> {
    auto_window(|m| FiberProblem::disc(m, b, r, bc).lowest(), flux_center(b, None, r))
}

/// [`annulus_eigenvalue`] with an automatically enlarged window.
pub fn annulus_ground_state(r1: f64, r2: f64, b: f64, bc: BoundaryCondition) -> Result<(f64, i64)> {
    if !(r1 > 0.0 && r1 < r2) {
        return Err(Error::InvalidInput(format!("annulus radii must satisfy 0 < R1 < R2, got {r1}, {r2}")));
    }
    auto_window(|m| FiberProblem::annulus(m, b, r1, r2, bc).lowest(), flux_center(b, Some(r1), r2))
}

/// Lowest `count` eigenvalues of the disc over all fibers (with multiplicity), ascending.
pub fn disc_spectrum(r: f64, b: f64, bc: BoundaryCondition, count: usize) -> Result<Vec<(f64, i64)>> {
    let (_, m_star) = disc_ground_state(r, b, bc)?;
    let mut w = 6i64;
    loop {
        let mut all = Vec::new();
        let mut edge = f64::INFINITY;
        for m in m_star - w..=m_star + w {
            let vals = FiberProblem::disc(m, b, r, bc).eigenvalues(count)?;
            if m == m_star - w || m == m_star + w {
                edge = edge.min(vals[0]);
            }
            all.extend(vals.into_iter().map(|v| (v, m)));
        }
        all.sort_by(|a, b| a.0.total_cmp(&b.0));
        all.truncate(count);
        if all.last().is_some_and(|l| l.0 < edge) || w > 400 {
            return Ok(all);
        }
        w *= 2;
    }
}

/// Half-line model −u″ + (t − ξ)²u, u′(0) = 0.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DeGennesGrid {
    /// Elements on the coarse grid.
    pub elements: usize,
    /// Truncation length beyond max(ξ, 0).
    pub truncation: f64,
}

impl Default for DeGennesGrid {
    fn default() -> Self {
        Self { elements: 4096, truncation: 12.0 }
    }
}

fn de_gennes_pencil(xi: f64, len: f64, n: usize) -> Pencil {
    Pencil::assemble(0.0, len, n, |_| 1.0, |t| (t - xi) * (t - xi), false, true)
}

fn de_gennes_len(xi: f64, grid: &DeGennesGrid) -> f64 {
    xi.max(0.0) + grid.truncation
}

/// μ₁(ξ), extrapolated from two grids.
pub fn mu1(xi: f64, grid: &DeGennesGrid) -> f64 {
    mu1_on(xi, de_gennes_len(xi, grid), grid.elements)
}

fn mu1_on(xi: f64, len: f64, n: usize) -> f64 {
    let c = de_gennes_pencil(xi, len, n).eigenvalue(1);
    let f = de_gennes_pencil(xi, len, 2 * n).eigenvalue(1);
    (4.0 * f - c) / 3.0
}

/// dμ₁/dξ of the discrete problem on a fixed interval, via the eigenvector.
fn dmu1_on(xi: f64, len: f64, n: usize) -> f64 {
    let p = de_gennes_pencil(xi, len, n);
    let lam = p.eigenvalue(1);
    let u = p.eigenvector(lam);
    let dk = Pencil::assemble(0.0, len, n, |_| 1.0, |t| -2.0 * (t - xi), false, true);
    let mut s = 0.0;
    for i in 0..u.len() {
        s += (dk.kd[i] - dk.md[i] * 0.0) * u[i] * u[i];
        if i + 1 < u.len() {
            s += 2.0 * dk.ke[i] * u[i] * u[i + 1];
        }
    }
    // ∫(t−ξ)² part has zero derivative of the gradient term; subtract the
    // stiffness contribution of u′ that `assemble` always adds
    let grad = Pencil::assemble(0.0, len, n, |_| 1.0, |_| 0.0, false, true);
    let mut g = 0.0;
    for i in 0..u.len() {
        g += grad.kd[i] * u[i] * u[i];
        if i + 1 < u.len() {
            g += 2.0 * grad.ke[i] * u[i] * u[i + 1];
        }
    }
    s - g
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeGennes {
    pub theta0: f64,
    pub xi_star: f64,
    pub c1_estimate: f64,
    /// Standard error of the fitted constant.
    pub c1_stderr: f64,
    /// Independent value u₀(0)²/3 from the normalized model ground state at ξ*.
    pub c1_from_ground_state: f64,
    /// |μ₁(ξ*) − ξ*²|.
    pub identity_residual: f64,
    pub grid: DeGennesGrid,
    pub fit_b: Vec<f64>,
}

/// Root of the derivative on a fixed interval, by bisection.
fn xi_star_on(len: f64, n: usize, lo: f64, hi: f64) -> f64 {
    let (mut a, mut b) = (lo, hi);
    let fa = dmu1_on(a, len, n);
    for _ in 0..100 {
        let m = 0.5 * (a + b);
        let fm = dmu1_on(m, len, n);
        if (fm < 0.0) == (fa < 0.0) {
            a = m;
        } else {
            b = m;
        }
        if b - a < 1e-14 {
            break;
        }
    }
    0.5 * (a + b)
}

/// (Θ₀, ξ*) on one grid, without the curvature constant.
pub fn de_gennes_minimum(grid: &DeGennesGrid) -> (f64, f64) {
    // golden-section bracket on [0.4, 1.2]
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let (mut a, mut b) = (0.4, 1.2);
    let coarse = DeGennesGrid { elements: (grid.elements / 4).max(256), ..*grid };
    let (mut c, mut d) = (b - g * (b - a), a + g * (b - a));
    let (mut fc, mut fd) = (mu1(c, &coarse), mu1(d, &coarse));
    while b - a > 1e-3 {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = mu1(c, &coarse);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = mu1(d, &coarse);
        }
    }
    // polish with the stationarity condition on a fixed interval, extrapolated in h
    let len = 1.2 + grid.truncation;
    let (lo, hi) = (a - 0.01, b + 0.01);
    let xc = xi_star_on(len, grid.elements, lo, hi);
    let xf = xi_star_on(len, 2 * grid.elements, lo, hi);
    let xi_star = (4.0 * xf - xc) / 3.0;
    let theta0 = mu1_on(xi_star, len, grid.elements);
    (theta0, xi_star)
}

pub fn de_gennes_with(grid: &DeGennesGrid, fit_b: &[f64]) -> Result<DeGennes> {
    let (theta0, xi_star) = de_gennes_minimum(grid);
    let len = 1.2 + grid.truncation;
    let identity_residual = (theta0 - xi_star * xi_star).abs();

    // ground state at ξ*: u(0)² with ∫u² = 1
    let p = de_gennes_pencil(xi_star, len, 2 * grid.elements);
    let u = p.eigenvector(p.eigenvalue(1));
    let c1_from_ground_state = u[0] * u[0] / 3.0;

    let (c1_estimate, c1_stderr) = fit_c1(theta0, fit_b)?;
    Ok(DeGennes {
        theta0,
        xi_star,
        c1_estimate,
        c1_stderr,
        c1_from_ground_state,
        identity_residual,
        grid: *grid,
        fit_b: fit_b.to_vec(),
    })
}

/// Least-squares fit of (Θ₀B − λ(B))·B^{−1/2} = C₁ + c·B^{−1/2} on the unit disc.
fn fit_c1(theta0: f64, fit_b: &[f64]) -> Result<(f64, f64)> {
    use rayon::prelude::*;
    let ys: Vec<(f64, f64)> = fit_b
        .par_iter()
        .map(|&b| {
            disc_ground_state(1.0, b, BoundaryCondition::Neumann).map(|(lam, _)| (b.powf(-0.5), (theta0 * b - lam) / b.sqrt()))
        })
        .collect::<Result<Vec<_>>>()?;
    let n = ys.len() as f64;
    let (sx, sy) = ys.iter().fold((0.0, 0.0), |acc, p| (acc.0 + p.0, acc.1 + p.1));
    let (mx, my) = (sx / n, sy / n);
    let sxx: f64 = ys.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = ys.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    let c1 = my - slope * mx;
    let rss: f64 = ys.iter().map(|p| (p.1 - c1 - slope * p.0).powi(2)).sum();
    let sigma2 = if ys.len() > 2 { rss / (n - 2.0) } else { 0.0 };
    let se = (sigma2 * (1.0 / n + mx * mx / sxx)).sqrt();
    Ok((c1, se))
}

/// Log-spaced field strengths in [200, 2000] used for the C₁ fit.
pub fn default_fit_grid() -> Vec<f64> {
    let k = 10;
    (0..k).map(|i| 200.0 * 10f64.powf(i as f64 / (k - 1) as f64)).collect()
}

/// Cached model constants on the default grid.
pub fn de_gennes() -> &'static DeGennes {
    static CACHE: OnceLock<DeGennes> = OnceLock::new();
    CACHE.get_or_init(|| de_gennes_with(&DeGennesGrid::default(), &default_fit_grid()).expect("de Gennes model solve"))
}

impl DeGennes {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("plain data serializes")
    }

    /// Reads a cached artifact when its grid matches, otherwise computes and writes it.
    pub fn load_or_compute(path: &Path, grid: &DeGennesGrid) -> Result<DeGennes> {
        if let Ok(text) = std::fs::read_to_string(path) {
            if let Ok(d) = serde_json::from_str::<DeGennes>(&text) {
                if d.grid == *grid {
                    return Ok(d);
                }
            }
        }
        let d = de_gennes_with(grid, &default_fit_grid())?;
        std::fs::write(path, d.to_json())?;
        Ok(d)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use BoundaryCondition::{Dirichlet, Neumann};

    #[test]
    fn zero_field_neumann_is_zero() {
        let (l, m) = disc_eigenvalue(1.0, 0.0, Neumann, 5).unwrap();
        assert!(l.abs() < 1e-7, "{l}");
        assert_eq!(m, 0);
    }

    #[test]
    fn bessel_zero_from_dirichlet_fiber() {
        // j_{0,1} = 2.404825557695773
        let (l, m) = disc_eigenvalue(1.0, 0.0, Dirichlet, 5).unwrap();
        assert_eq!(m, 0);
        assert!((l - 2.404_825_557_695_773f64.powi(2)).abs() < 1e-8 * l, "{l}");
    }

    #[test]
    fn fibers_symmetric_at_zero_field() {
        for m in 1..4 {
            let a = FiberProblem::disc(m, 0.0, 1.0, Neumann).lowest().unwrap();
            let b = FiberProblem::disc(-m, 0.0, 1.0, Neumann).lowest().unwrap();
            assert!((a - b).abs() < 1e-10);
        }
    }

    #[test]
    fn second_neumann_eigenvalue_of_disc() {
        // j'_{1,1} = 1.841183781340659, double
        let s = disc_spectrum(1.0, 0.0, Neumann, 3).unwrap();
        let j = 1.841_183_781_340_659f64;
        assert!(s[0].0.abs() < 1e-7, "{s:?}");
        assert!((s[1].0 - j * j).abs() < 1e-8 && (s[2].0 - j * j).abs() < 1e-8, "{s:?}");
    }

    #[test]
    fn small_window_is_reported() {
        let e = disc_eigenvalue(1.0, 400.0, Neumann, 5);
        assert!(matches!(e, Err(Error::Window { .. })), "{e:?}");
    }

    #[test]
    fn half_oscillator_at_zero_shift() {
        let mu = mu1(0.0, &DeGennesGrid::default());
        assert!((mu - 1.0).abs() < 1e-8, "{mu}");
    }

    #[test]
    fn well_limits_on_a_shift_grid() {
        let g = DeGennesGrid::default();
        let deep = mu1(8.0, &g);
        assert!((deep - 1.0).abs() < 1e-8, "{deep}");
        assert!(mu1(-2.0, &g) > 4.0);
        assert!(mu1(0.77, &g) < 1.0);
    }
}
