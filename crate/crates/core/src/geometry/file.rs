//! Domain description files (TOML or JSON).
//!
//! ```toml
//! label = "thin ellipse"
//! kind = "ellipse"            # disc | circle | ellipse | annulus | fourier | polar | peanut | square | polyline
//! area = 3.141592653589793    # optional: rescale to this area
//! [parameters]
//! a = 2.0
//! b = 0.5
//!
//! [[holes]]
//! kind = "circle"
//! parameters = { center = [0.5, 0.0], radius = 0.1 }
//! ```

use super::{presets, BoundaryCurve, CurveKind, DomainSpec, FourierSeries, Point};
use crate::error::{Error, Result};
use serde_json::{Map, Value};
use std::collections::BTreeSet;
use std::path::Path;

pub fn load(path: &Path) -> Result<DomainSpec> {
    let text = std::fs::read_to_string(path)?;
    let is_json = path.extension().is_some_and(|e| e.eq_ignore_ascii_case("json"));
    parse_str(&text, is_json)
}

pub fn parse_str(text: &str, json: bool) -> Result<DomainSpec> {
    let value: Value = if json {
        serde_json::from_str(text).map_err(|e| Error::Parse(format!("invalid JSON: {e}")))?
    } else {
        toml::from_str(text).map_err(|e| Error::Parse(format!("invalid TOML: {e}")))?
    };
    from_value(&value)
}

struct Obj<'a> {
    map: &'a Map<String, Value>,
    path: String,
    used: BTreeSet<&'static str>,
}

impl<'a> Obj<'a> {
    fn new(v: &'a Value, path: &str) -> Result<Self> {
        let map = v.as_object().ok_or_else(|| Error::Parse(format!("{path}: expected a table")))?;
        Ok(Self { map, path: path.to_string(), used: BTreeSet::new() })
    }

    fn key(&self, k: &str) -> String {
        if self.path.is_empty() {
            k.to_string()
        } else {
            format!("{}.{k}", self.path)
        }
    }

    fn raw(&mut self, k: &'static str) -> Option<&'a Value> {
        self.used.insert(k);
        self.map.get(k)
    }

    fn f64_opt(&mut self, k: &'static str) -> Result<Option<f64>> {
        match self.raw(k) {
            None => Ok(None),
            Some(v) => v
                .as_f64()
                .filter(|x| x.is_finite())
                .map(Some)
                .ok_or_else(|| Error::Parse(format!("{}: expected a finite number", self.key(k)))),
        }
    }

    fn positive(&mut self, k: &'static str, default: Option<f64>) -> Result<f64> {
        let v = match (self.f64_opt(k)?, default) {
            (Some(v), _) => v,
            (None, Some(d)) => d,
            (None, None) => return Err(Error::Parse(format!("{}: missing required key", self.key(k)))),
        };
        if v > 0.0 {
            Ok(v)
        } else {
            Err(Error::Parse(format!("{}: expected a positive number, got {v}", self.key(k))))
        }
    }

    fn point(&mut self, k: &'static str) -> Result<Point> {
        match self.raw(k) {
            None => Ok([0.0, 0.0]),
            Some(v) => to_point(v).ok_or_else(|| Error::Parse(format!("{}: expected [x, y]", self.key(k)))),
        }
    }

    fn list(&mut self, k: &'static str) -> Result<Vec<f64>> {
        match self.raw(k) {
            None => Ok(Vec::new()),
            Some(Value::Array(a)) => a
                .iter()
                .map(|x| x.as_f64().ok_or_else(|| Error::Parse(format!("{}: expected a list of numbers", self.key(k)))))
                .collect(),
            Some(_) => Err(Error::Parse(format!("{}: expected a list of numbers", self.key(k)))),
        }
    }

    fn finish(self) -> Result<()> {
        match self.map.keys().find(|k| !self.used.contains(k.as_str())) {
            Some(k) => Err(Error::Parse(format!("{}: unknown key", self.key(k)))),
            None => Ok(()),
        }
    }
}

fn to_point(v: &Value) -> Option<Point> {
    let a = v.as_array()?;
    if a.len() != 2 {
        return None;
    }
    Some([a[0].as_f64()?, a[1].as_f64()?])
}

fn kind_of(obj: &mut Obj) -> Result<String> {
    let k = obj.key("kind");
    match obj.raw("kind") {
        Some(Value::String(s)) => Ok(s.clone()),
        Some(_) => Err(Error::Parse(format!("{k}: expected a string"))),
        None => Err(Error::Parse(format!("{k}: missing required key"))),
    }
}

/// Curve from `kind` + `parameters`; `annulus` additionally yields a hole.
fn curve(kind: &str, params: Option<&Value>, path: &str) -> Result<(BoundaryCurve, Vec<BoundaryCurve>)> {
    let empty = Value::Object(Map::new());
    let mut p = Obj::new(params.unwrap_or(&empty), &format!("{path}parameters"))?;
    let mut holes = Vec::new();
    let c = match kind {
        "circle" | "disc" => {
            let center = p.point("center")?;
            let r = p.positive("radius", if kind == "disc" { Some(1.0) } else { None })?;
            BoundaryCurve::circle(center, r)
        }
        "ellipse" => {
            let a = p.positive("a", None)?;
            let b = p.positive("b", Some(1.0 / a))?;
            let center = p.point("center")?;
            let angle = p.f64_opt("angle")?.unwrap_or(0.0);
            BoundaryCurve::new(CurveKind::Ellipse { a, b, center, angle })
        }
        "annulus" => {
            let r1 = p.positive("r1", None)?;
            let r2 = p.positive("r2", Some((1.0 + r1 * r1).sqrt()))?;
            let center = p.point("center")?;
            if r2 <= r1 {
                return Err(Error::Parse(format!("{}: must exceed r1", p.key("r2"))));
            }
            holes.push(BoundaryCurve::circle(center, r1));
            BoundaryCurve::circle(center, r2)
        }
        "fourier" if p.map.contains_key("x_cos") || p.map.contains_key("y_sin") || p.map.contains_key("x_sin") => {
            let s = FourierSeries { x_cos: p.list("x_cos")?, x_sin: p.list("x_sin")?, y_cos: p.list("y_cos")?, y_sin: p.list("y_sin")? };
            BoundaryCurve::fourier(s)
        }
        "fourier" | "peanut" => {
            let k = if kind == "peanut" { 2.0 } else { p.positive("lobes", Some(3.0))? };
            let eps = p.f64_opt("amplitude")?.unwrap_or(if kind == "peanut" { 0.4 } else { 0.2 });
            presets::lobed(k.round() as usize, eps)?.outer
        }
        "polar" => {
            let center = p.point("center")?;
            let rc = p.list("radial_cos")?;
            let rs = p.list("radial_sin")?;
            if rc.is_empty() {
                return Err(Error::Parse(format!("{}: missing required key", p.key("radial_cos"))));
            }
            BoundaryCurve::fourier(FourierSeries::from_polar(center, &rc, &rs))
        }
        "square" => {
            let rho = p.f64_opt("corner_radius")?.unwrap_or(0.3);
            presets::rounded_square(rho)?.outer
        }
        "polyline" => {
            let key = p.key("vertices");
            let verts = match p.raw("vertices") {
                Some(Value::Array(a)) => a
                    .iter()
                    .map(|v| to_point(v).ok_or_else(|| Error::Parse(format!("{key}: expected a list of [x, y]"))))
                    .collect::<Result<Vec<_>>>()?,
                _ => return Err(Error::Parse(format!("{key}: expected a list of [x, y]"))),
            };
            let rho = p.f64_opt("corner_radius")?;
            BoundaryCurve::polyline(verts, rho)
        }
        other => {
            return Err(Error::Parse(format!(
                "{path}kind: unknown kind '{other}' (expected disc, circle, ellipse, annulus, fourier, polar, peanut, square, polyline)"
            )))
        }
    };
    p.finish()?;
    Ok((c, holes))
}

pub fn from_value(v: &Value) -> Result<DomainSpec> {
    let mut top = Obj::new(v, "")?;
    let kind = kind_of(&mut top)?;
    let (mut outer, mut holes) = curve(&kind, top.raw("parameters"), "")?;
    if let Some(ccw) = top.raw("counterclockwise") {
        outer.counterclockwise = ccw.as_bool().ok_or_else(|| Error::Parse("counterclockwise: expected a boolean".into()))?;
    }
    if let Some(hv) = top.raw("holes") {
        let arr = hv.as_array().ok_or_else(|| Error::Parse("holes: expected a list of tables".into()))?;
        for (j, h) in arr.iter().enumerate() {
            let path = format!("holes[{j}].");
            let mut ho = Obj::new(h, &format!("holes[{j}]"))?;
            let hk = kind_of(&mut ho)?;
            if matches!(hk.as_str(), "annulus" | "disc" | "square" | "peanut") {
                return Err(Error::Parse(format!("{path}kind: '{hk}' is not allowed for a hole")));
            }
            let (mut c, _) = curve(&hk, ho.raw("parameters"), &path)?;
            if let Some(ccw) = ho.raw("counterclockwise") {
                c.counterclockwise =
                    ccw.as_bool().ok_or_else(|| Error::Parse(format!("{path}counterclockwise: expected a boolean")))?;
            }
            ho.finish()?;
            holes.push(c);
        }
    }
    let label = match top.raw("label") {
        Some(Value::String(s)) => s.clone(),
        Some(_) => return Err(Error::Parse("label: expected a string".into())),
        None => kind.clone(),
    };
    let area = top.f64_opt("area")?;
    top.finish()?;
    let mut d = DomainSpec::new(outer, holes, label);
    if let Some(a) = area {
        if !(a > 0.0) {
            return Err(Error::Parse(format!("area: expected a positive number, got {a}")));
        }
        let label = d.label.clone();
        d = presets::with_area(&d, a)?;
        d.label = label;
    }
    d.validate()?;
    Ok(d)
}

fn curve_value(c: &BoundaryCurve) -> Value {
    let mut v = serde_json::to_value(&c.kind).expect("curve kinds serialize");
    if let CurveKind::Polyline { corner_radius: None, .. } = c.kind {
        if let Some(p) = v.get_mut("parameters").and_then(Value::as_object_mut) {
            p.remove("corner_radius");
        }
    }
    if !c.counterclockwise {
        v.as_object_mut().expect("tagged enum").insert("counterclockwise".into(), Value::Bool(false));
    }
    v
}

/// File representation that [`from_value`] reads back to the same spec.
pub fn to_value(d: &DomainSpec) -> Value {
    let mut v = curve_value(&d.outer);
    let obj = v.as_object_mut().expect("tagged enum");
    obj.insert("label".into(), Value::String(d.label.clone()));
    if !d.holes.is_empty() {
        obj.insert("holes".into(), Value::Array(d.holes.iter().map(curve_value).collect()));
    }
    v
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn toml_ellipse_with_default_b() {
        let d = parse_str("kind = \"ellipse\"\n[parameters]\na = 2.0\n", false).unwrap();
        assert_eq!(d.outer.kind, CurveKind::Ellipse { a: 2.0, b: 0.5, center: [0.0, 0.0], angle: 0.0 });
    }

    #[test]
    fn errors_name_the_key() {
        let e = parse_str("kind = \"ellipse\"\n[parameters]\na = -1.0\n", false).unwrap_err().to_string();
        assert!(e.contains("parameters.a"), "{e}");
        let e = parse_str(r#"{"kind": "disc", "parameters": {"radus": 1}}"#, true).unwrap_err().to_string();
        assert!(e.contains("parameters.radus"), "{e}");
        let e = parse_str(r#"{"kind": "disc", "holes": [{"kind": "circle", "parameters": {"center": [0, 0]}}]}"#, true)
            .unwrap_err()
            .to_string();
        assert!(e.contains("holes[0].parameters.radius"), "{e}");
    }

    #[test]
    fn round_trip_through_json() {
        for d in presets::test_shapes().into_iter().chain([presets::annulus(0.5, None)]) {
            let v = to_value(&d);
            let back = from_value(&v).unwrap();
            assert_eq!(back, d);
        }
    }
}
