//! Named domains used throughout tests and the command line.

use super::{summarize_area, BoundaryCurve, DomainSpec, FourierSeries};
use crate::error::{Error, Result};
use std::collections::BTreeMap;
use std::f64::consts::PI;

pub fn disc(radius: f64) -> DomainSpec {
    DomainSpec::new(BoundaryCurve::circle([0.0, 0.0], radius), vec![], format!("disc(r={radius})"))
}

pub fn ellipse(a: f64, b: f64) -> DomainSpec {
    DomainSpec::new(BoundaryCurve::ellipse(a, b), vec![], format!("ellipse(a={a},b={b})"))
}

/// Concentric annulus; the default outer radius √(1 + r1²) gives area π.
pub fn annulus(r1: f64, r2: Option<f64>) -> DomainSpec {
    let r2 = r2.unwrap_or((1.0 + r1 * r1).sqrt());
    DomainSpec::new(
        BoundaryCurve::circle([0.0, 0.0], r2),
        vec![BoundaryCurve::circle([0.0, 0.0], r1)],
        format!("annulus(r1={r1},r2={r2})"),
    )
}

/// Star-shaped r(θ) = 1 + ε·cos(kθ), rescaled to area π.
pub fn lobed(lobes: usize, amplitude: f64) -> Result<DomainSpec> {
    let mut radial = vec![0.0; lobes + 1];
    radial[0] = 1.0;
    radial[lobes] += amplitude;
    let d = DomainSpec::new(
        BoundaryCurve::fourier(FourierSeries::from_polar([0.0, 0.0], &radial, &[])),
        vec![],
        format!("lobed(k={lobes},eps={amplitude})"),
    );
    with_area(&d, PI)
}

/// Two-lobe peanut r(θ) = 1 + ε·cos 2θ at area π.
pub fn peanut(amplitude: f64) -> Result<DomainSpec> {
    let mut d = lobed(2, amplitude)?;
    d.label = format!("peanut(eps={amplitude})");
    Ok(d)
}

/// Square with rounded corners of radius `corner_radius` relative to side 2, at area π.
pub fn rounded_square(corner_radius: f64) -> Result<DomainSpec> {
    let v = vec![[-1.0, -1.0], [1.0, -1.0], [1.0, 1.0], [-1.0, 1.0]];
    let rho = if corner_radius > 0.0 { Some(corner_radius) } else { None };
    let d = DomainSpec::new(BoundaryCurve::polyline(v, rho), vec![], format!("square(rho={corner_radius})"));
    with_area(&d, PI)
}

pub fn with_area(domain: &DomainSpec, target: f64) -> Result<DomainSpec> {
    let a = summarize_area(domain)?;
    if !(a > 0.0) {
        return Err(Error::InvalidDomain(format!("cannot rescale a domain of area {a}")));
    }
    Ok(domain.scaled((target / a).sqrt()))
}

/// Simply connected area-π shapes: three ellipses, two Fourier shapes and a rounded square.
pub fn test_shapes() -> Vec<DomainSpec> {
    let mut v: Vec<DomainSpec> = [1.2, 2.0, 3.0].iter().map(|&a| ellipse(a, 1.0 / a)).collect();
    v.push(lobed(3, 0.2).expect("valid shape"));
    v.push(peanut(0.4).expect("valid shape"));
    v.push(rounded_square(0.3).expect("valid shape"));
    v
}

/// Preset by name with numeric parameters, e.g. `ellipse` with `a=2`.
pub fn named(name: &str, params: &BTreeMap<String, f64>) -> Result<DomainSpec> {
    let allowed: &[&str] = match name {
        "disc" => &["r"],
        "ellipse" => &["a", "b"],
        "annulus" => &["r1", "r2"],
        "fourier" | "lobed" => &["k", "eps"],
        "peanut" => &["eps"],
        "square" => &["rho"],
        _ => {
            return Err(Error::Parse(format!(
                "unknown preset '{name}' (expected disc, ellipse, annulus, fourier, peanut, square)"
            )))
        }
    };
    if let Some(bad) = params.keys().find(|k| !allowed.contains(&k.as_str())) {
        return Err(Error::Parse(format!("preset '{name}' has no parameter '{bad}' (allowed: {})", allowed.join(", "))));
    }
    let get = |k: &str, d: f64| params.get(k).copied().unwrap_or(d);
    let d = match name {
        "disc" => disc(get("r", 1.0)),
        "ellipse" => {
            let a = get("a", 2.0);
            ellipse(a, params.get("b").copied().unwrap_or(1.0 / a))
        }
        "annulus" => annulus(get("r1", 0.5), params.get("r2").copied()),
        "fourier" | "lobed" => lobed(get("k", 3.0).round().max(1.0) as usize, get("eps", 0.2))?,
        "peanut" => peanut(get("eps", 0.4))?,
        _ => rounded_square(get("rho", 0.3))?,
    };
    d.validate()?;
    Ok(d)
}

/// Parses `name` or `name:key=value,key=value`.
pub fn parse(spec: &str) -> Result<DomainSpec> {
    let (name, rest) = spec.split_once(':').unwrap_or((spec, ""));
    let mut params = BTreeMap::new();
    for kv in rest.split(',').filter(|s| !s.trim().is_empty()) {
        let (k, v) = kv
            .split_once('=')
            .ok_or_else(|| Error::Parse(format!("preset parameter '{kv}' is not of the form key=value")))?;
        let val: f64 =
            v.trim().parse().map_err(|_| Error::Parse(format!("preset parameter '{}' has non-numeric value '{v}'", k.trim())))?;
        params.insert(k.trim().to_string(), val);
    }
    named(name.trim(), &params)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn test_shapes_have_area_pi() {
        for d in test_shapes() {
            let a = summarize_area(&d).unwrap();
            assert!((a - PI).abs() < 1e-10, "{} {a}", d.label);
            d.validate().unwrap();
        }
    }

    #[test]
    fn parse_inline_presets() {
        let d = parse("ellipse:a=2").unwrap();
        assert!((summarize_area(&d).unwrap() - PI).abs() < 1e-12);
        assert!(parse("ellipse:c=2").is_err());
        assert!(parse("blob").is_err());
        assert!(parse("disc:r=abc").is_err());
    }
}
