//! Triangle quadrature rules in barycentric coordinates; weights sum to 1.

/// Degree-2 rule with interior points.
pub const GAUSS3: [([f64; 3], f64); 3] = [
    ([2.0 / 3.0, 1.0 / 6.0, 1.0 / 6.0], 1.0 / 3.0),
    ([1.0 / 6.0, 2.0 / 3.0, 1.0 / 6.0], 1.0 / 3.0),
    ([1.0 / 6.0, 1.0 / 6.0, 2.0 / 3.0], 1.0 / 3.0),
];

const W1: f64 = 0.223_381_589_678_011;
const W2: f64 = 0.109_951_743_655_322;
const A1: f64 = 0.108_103_018_168_070;
const B1: f64 = 0.445_948_490_915_965;
const A2: f64 = 0.816_847_572_980_459;
const B2: f64 = 0.091_576_213_509_771;

/// Degree-4 Dunavant rule.
pub const DUNAVANT6: [([f64; 3], f64); 6] = [
    ([A1, B1, B1], W1),
    ([B1, A1, B1], W1),
    ([B1, B1, A1], W1),
    ([A2, B2, B2], W2),
    ([B2, A2, B2], W2),
    ([B2, B2, A2], W2),
];

#[cfg(test)]
mod tests {
    use super::*;

    fn integrate(rule: &[([f64; 3], f64)], f: impl Fn(f64, f64) -> f64) -> f64 {
        // reference triangle (0,0),(1,0),(0,1), area 1/2
        rule.iter().map(|(l, w)| 0.5 * w * f(l[1], l[2])).sum()
    }

    #[test]
    fn exactness_degrees() {
        // ∫ x^a y^b over the reference triangle = a! b! / (a + b + 2)!
        let exact = |a: u32, b: u32| {
            let f = |n: u32| (1..=n).map(f64::from).product::<f64>();
            f(a) * f(b) / f(a + b + 2)
        };
        for (a, b) in [(0, 0), (1, 0), (1, 1), (2, 0)] {
            let v = integrate(&GAUSS3, |x, y| x.powi(a as i32) * y.powi(b as i32));
            assert!((v - exact(a, b)).abs() < 1e-15);
        }
        for (a, b) in [(0, 0), (2, 2), (4, 0), (3, 1), (1, 3)] {
            let v = integrate(&DUNAVANT6, |x, y| x.powi(a as i32) * y.powi(b as i32));
            assert!((v - exact(a, b)).abs() < 1e-14, "{a} {b}");
        }
    }
}
