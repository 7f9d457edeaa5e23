//! Pixel rasterization of polygonal regions and Euclidean distance transforms.

use super::curve::Point;

#[derive(Debug, Clone)]
pub struct Raster {
    pub origin: Point,
    pub spacing: f64,
    pub nx: usize,
    pub ny: usize,
    /// Row-major, `inside[j * nx + i]` for pixel center `origin + (i + ½, j + ½)·spacing`.
    pub inside: Vec<bool>,
}

impl Raster {
    /// Even–odd fill of the union of boundary loops over the window `[lo, hi]`
    /// with `resolution` pixels along the longer side.
    pub fn fill(loops: &[Vec<Point>], lo: Point, hi: Point, resolution: usize) -> Self {
        let extent = (hi[0] - lo[0]).max(hi[1] - lo[1]);
        let spacing = extent / resolution as f64;
        let nx = ((hi[0] - lo[0]) / spacing).ceil().max(1.0) as usize;
        let ny = ((hi[1] - lo[1]) / spacing).ceil().max(1.0) as usize;
        let mut inside = vec![false; nx * ny];
        let mut xs = Vec::new();
        for j in 0..ny {
            let y = lo[1] + (j as f64 + 0.5) * spacing;
            xs.clear();
            for poly in loops {
                let n = poly.len();
                for k in 0..n {
                    let (a, b) = (poly[k], poly[(k + 1) % n]);
                    if (a[1] > y) != (b[1] > y) {
                        xs.push(a[0] + (y - a[1]) / (b[1] - a[1]) * (b[0] - a[0]));
                    }
                }
            }
            xs.sort_by(f64::total_cmp);
            for pair in xs.chunks_exact(2) {
                let i0 = ((pair[0] - lo[0]) / spacing - 0.5).ceil().max(0.0) as usize;
                let i1 = ((pair[1] - lo[0]) / spacing - 0.5).floor();
                if i1 < 0.0 {
                    continue;
                }
                let i1 = (i1 as usize).min(nx - 1);
                if i0 <= i1 {
                    for cell in &mut inside[j * nx + i0..=j * nx + i1] {
                        *cell = true;
                    }
                }
            }
        }
        Raster { origin: lo, spacing, nx, ny, inside }
    }

    pub fn center(&self, i: usize, j: usize) -> Point {
        [self.origin[0] + (i as f64 + 0.5) * self.spacing, self.origin[1] + (j as f64 + 0.5) * self.spacing]
    }

    pub fn count(&self) -> usize {
        self.inside.iter().filter(|&&b| b).count()
    }

    /// Squared distance (pixel units) from each pixel to the nearest outside pixel;
    /// pixels beyond the window count as outside.
    pub fn distance_to_outside_sq(&self) -> Vec<f64> {
        let (nx, ny) = (self.nx + 2, self.ny + 2);
        let big = ((nx * nx + ny * ny) as f64) * 4.0;
        let mut f = vec![0.0; nx * ny];
        for j in 0..self.ny {
            for i in 0..self.nx {
                if self.inside[j * self.nx + i] {
                    f[(j + 1) * nx + i + 1] = big;
                }
            }
        }
        let mut buf = vec![0.0; nx.max(ny)];
        let mut out = vec![0.0; nx.max(ny)];
        for j in 0..ny {
            buf[..nx].copy_from_slice(&f[j * nx..(j + 1) * nx]);
            dt1d(&buf[..nx], &mut out[..nx]);
            f[j * nx..(j + 1) * nx].copy_from_slice(&out[..nx]);
        }
        for i in 0..nx {
            for j in 0..ny {
                buf[j] = f[j * nx + i];
            }
            dt1d(&buf[..ny], &mut out[..ny]);
            for j in 0..ny {
                f[j * nx + i] = out[j];
            }
        }
        let mut res = vec![0.0; self.nx * self.ny];
        for j in 0..self.ny {
            for i in 0..self.nx {
                res[j * self.nx + i] = f[(j + 1) * nx + i + 1];
            }
        }
        res
    }
}

/// Lower envelope of parabolas (Felzenszwalb–Huttenlocher).
fn dt1d(f: &[f64], d: &mut [f64]) {
    let n = f.len();
    let mut v = vec![0usize; n];
    let mut z = vec![0.0f64; n + 1];
    let mut k = 0usize;
    z[0] = f64::NEG_INFINITY;
    z[1] = f64::INFINITY;
    for q in 1..n {
        loop {
            let p = v[k];
            let s = ((f[q] + (q * q) as f64) - (f[p] + (p * p) as f64)) / (2.0 * (q as f64 - p as f64));
            if s <= z[k] && k > 0 {
                k -= 1;
                continue;
            }
            if s <= z[k] {
                // k == 0: replace the only parabola
                v[0] = q;
                z[1] = f64::INFINITY;
                break;
            }
            k += 1;
            v[k] = q;
            z[k] = s;
            z[k + 1] = f64::INFINITY;
            break;
        }
    }
    k = 0;
    for (q, dq) in d.iter_mut().enumerate() {
        while z[k + 1] < q as f64 {
            k += 1;
        }
        let p = v[k];
        let dx = q as f64 - p as f64;
        *dq = dx * dx + f[p];
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dt1d_matches_brute_force() {
        let f = [1e9, 0.0, 1e9, 1e9, 1e9, 0.0, 1e9, 1e9];
        let mut d = [0.0; 8];
        dt1d(&f, &mut d);
        for q in 0..8 {
            let brute = (0..8).map(|p| (q as f64 - p as f64).powi(2) + f[p]).fold(f64::INFINITY, f64::min);
            assert_eq!(d[q], brute);
        }
    }

    #[test]
    fn square_fill_counts() {
        let sq = vec![[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]];
        let r = Raster::fill(&[sq], [-0.5, -0.5], [1.5, 1.5], 200);
        assert_eq!(r.count(), 100 * 100);
        let d = r.distance_to_outside_sq();
        let max = d.iter().cloned().fold(0.0, f64::max).sqrt();
        assert!((max - 50.0).abs() <= 1.0);
    }
}
