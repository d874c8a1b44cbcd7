//! JSON body descriptions.
//!
//! ```json
//! {"type": "minkowski", "dimension": 2, "parts": [
//!   {"weight": 1.0, "rotation": {"angle": 0.5},
//!    "body": {"type": "segment", "endpoints": [[-1, 0], [1, 0]]}},
//!   {"weight": 0.5, "body": {"type": "ball", "center": [0, 0], "radius": 1}}
//! ]}
//! ```
//!
//! Variants: `polytope {vertices}`, `ball {center, radius}`,
//! `ellipsoid {shape}`, `segment {endpoints}`,
//! `harmonic {dimension, constant, terms: [{m, j, coefficient}]}`,
//! `minkowski {dimension, parts: [{weight, rotation?, body}]}`,
//! `linear_image {matrix, base}`, `embedded {base}` (planar body in space),
//! `shadow {axes, base}` (spatial body projected to a coordinate plane). Rotations are given by exactly one of
//! `angle` (plane), `euler_zyz` (space) or `matrix`.

use serde::{Deserialize, Serialize};
use std::sync::Arc;

use super::{coords, point_from_slice, ConvexBody, Summand};
use crate::harmonics::{HarmonicExpansion, HarmonicIndex};
use crate::rotation::{active_rows, embed_rows};
use crate::{Dim, Error, Result, Rotation};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum BodySpec {
    Polytope { vertices: Vec<Vec<f64>> },
    Ball { center: Vec<f64>, radius: f64 },
    Ellipsoid { shape: Vec<Vec<f64>> },
    Segment { endpoints: [Vec<f64>; 2] },
    Harmonic { dimension: usize, constant: f64, terms: Vec<TermSpec> },
    Minkowski { dimension: usize, parts: Vec<PartSpec> },
    LinearImage { matrix: Vec<Vec<f64>>, base: Box<BodySpec> },
    Embedded { base: Box<BodySpec> },
    Shadow { axes: [usize; 2], base: Box<BodySpec> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermSpec {
    pub m: usize,
    pub j: usize,
    pub coefficient: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PartSpec {
    pub weight: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rotation: Option<RotationSpec>,
    pub body: BodySpec,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RotationSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub angle: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub euler_zyz: Option<[f64; 3]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matrix: Option<Vec<Vec<f64>>>,
}

/// Largest harmonic order accepted from a body description.
pub const MAX_SPEC_ORDER: usize = 256;

fn at(path: &str, e: Error) -> Error {
    Error::Parse(format!("{path}: {e}"))
}

impl RotationSpec {
    fn build(&self, dim: Dim, path: &str) -> Result<Rotation> {
        match (self.angle, self.euler_zyz, &self.matrix, dim) {
            (Some(a), None, None, Dim::Two) => Ok(Rotation::planar(a)),
            (None, Some([a, b, g]), None, Dim::Three) => Ok(Rotation::euler_zyz(a, b, g)),
            (None, None, Some(rows), _) => {
                let m = embed_rows(dim, rows).map_err(|e| at(path, e))?;
                Rotation::from_matrix(dim, m).map_err(|e| at(path, e))
            }
            (None, None, None, _) => Err(Error::Parse(format!("{path}: empty rotation"))),
            _ => Err(Error::Parse(format!(
                "{path}: give exactly one of angle (dimension 2), euler_zyz (dimension 3) or matrix"
            ))),
        }
    }
}

impl BodySpec {
    /// Syntax errors carry line and column. Data errors inside tagged
    /// bodies lose their position in serde, so they are reported with the
    /// field path of the innermost body that fails.
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| {
            if e.line() > 0 {
                return Error::Parse(e.to_string());
            }
            match serde_json::from_str::<serde_json::Value>(text).ok().and_then(|v| locate(&v, "body")) {
                Some((path, msg)) => Error::Parse(format!("{path}: {msg}")),
                None => Error::Parse(e.to_string()),
            }
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("body spec serializes")
    }

    pub fn build(&self) -> Result<ConvexBody> {
        self.build_at("body")
    }

    fn build_at(&self, path: &str) -> Result<ConvexBody> {
        let here = |e| at(path, e);
        match self {
            BodySpec::Polytope { vertices } => ConvexBody::polytope_from_points(vertices).map_err(here),
            BodySpec::Ball { center, radius } => {
                let dim = Dim::new(center.len()).map_err(here)?;
                ConvexBody::ball(dim, point_from_slice(dim, center).map_err(here)?, *radius).map_err(here)
            }
            BodySpec::Ellipsoid { shape } => ConvexBody::ellipsoid_from_rows(shape).map_err(here),
            BodySpec::Segment { endpoints: [a, b] } => {
                let dim = Dim::new(a.len()).map_err(here)?;
                let a = point_from_slice(dim, a).map_err(here)?;
                let b = point_from_slice(dim, b).map_err(here)?;
                ConvexBody::segment(dim, a, b).map_err(here)
            }
            BodySpec::Harmonic { dimension, constant, terms } => {
                let dim = Dim::new(*dimension).map_err(here)?;
                let max_order = terms.iter().map(|t| t.m).max().unwrap_or(0);
                if max_order > MAX_SPEC_ORDER {
                    return Err(Error::Parse(format!("{path}.terms: order {max_order} exceeds {MAX_SPEC_ORDER}")));
                }
                let mut e = HarmonicExpansion::zeros(dim, max_order);
                for (k, t) in terms.iter().enumerate() {
                    let tpath = format!("{path}.terms[{k}]");
                    let idx = HarmonicIndex::new(dim, t.m, t.j).map_err(|e| at(&tpath, e))?;
                    if e.get(idx) != 0.0 {
                        return Err(Error::Parse(format!("{tpath}: duplicate term (m = {}, j = {})", t.m, t.j)));
                    }
                    e.set(idx, t.coefficient).map_err(|e| at(&tpath, e))?;
                }
                ConvexBody::harmonic(*constant, e).map_err(here)
            }
            BodySpec::Minkowski { dimension, parts } => {
                let dim = Dim::new(*dimension).map_err(here)?;
                let mut built = Vec::with_capacity(parts.len());
                for (k, p) in parts.iter().enumerate() {
                    let ppath = format!("{path}.parts[{k}]");
                    if !(p.weight >= 0.0 && p.weight.is_finite()) {
                        return Err(Error::Parse(format!(
                            "{ppath}.weight: weights must be finite and nonnegative, got {}",
                            p.weight
                        )));
                    }
                    let body = p.body.build_at(&format!("{ppath}.body"))?;
                    let rotation = match &p.rotation {
                        Some(r) => r.build(dim, &format!("{ppath}.rotation"))?,
                        None => Rotation::identity(dim),
                    };
                    if body.dim() != dim {
                        return Err(at(
                            &ppath,
                            Error::DimensionMismatch { expected: dim.get(), found: body.dim().get() },
                        ));
                    }
                    built.push(Summand { weight: p.weight, rotation, body: Arc::new(body) });
                }
                ConvexBody::minkowski(dim, built).map_err(here)
            }
            BodySpec::LinearImage { matrix, base } => {
                let base = base.build_at(&format!("{path}.base"))?;
                let m = embed_rows(base.dim(), matrix).map_err(|e| at(&format!("{path}.matrix"), e))?;
                ConvexBody::linear_image(m, base).map_err(here)
            }
            BodySpec::Embedded { base } => {
                let base = base.build_at(&format!("{path}.base"))?;
                match base.embed_2d_in_3d().map_err(here)? {
                    ConvexBody::Embedded { base } => Ok(ConvexBody::Embedded { base }),
                    _ => Ok(ConvexBody::Embedded { base: Arc::new(base) }),
                }
            }
            BodySpec::Shadow { axes, base } => {
                let base = base.build_at(&format!("{path}.base"))?;
                if base.dim() != Dim::Three || !(axes[0] < axes[1] && axes[1] < 3) {
                    return Err(Error::Parse(format!("{path}: shadow needs a spatial base and axes i < j < 3")));
                }
                Ok(ConvexBody::Shadow { axes: *axes, base: Arc::new(base) })
            }
        }
    }

    pub fn from_body(body: &ConvexBody) -> Self {
        match body {
            ConvexBody::Polytope { dim, vertices } => {
                BodySpec::Polytope { vertices: vertices.iter().map(|v| coords(*dim, v)).collect() }
            }
            ConvexBody::Ball { dim, center, radius } => {
                BodySpec::Ball { center: coords(*dim, center), radius: *radius }
            }
            ConvexBody::Ellipsoid { dim, shape } => BodySpec::Ellipsoid { shape: active_rows(*dim, shape) },
            ConvexBody::Segment { dim, endpoints: [a, b] } => {
                BodySpec::Segment { endpoints: [coords(*dim, a), coords(*dim, b)] }
            }
            ConvexBody::Harmonic(h) => BodySpec::Harmonic {
                dimension: h.terms().dim().get(),
                constant: h.constant(),
                terms: h
                    .terms()
                    .iter()
                    .filter(|(_, a)| *a != 0.0)
                    .map(|(idx, a)| TermSpec { m: idx.m, j: idx.j, coefficient: a })
                    .collect(),
            },
            ConvexBody::Minkowski { dim, parts } => BodySpec::Minkowski {
                dimension: dim.get(),
                parts: parts
                    .iter()
                    .map(|p| PartSpec {
                        weight: p.weight,
                        rotation: Some(RotationSpec {
                            matrix: Some(active_rows(*dim, p.rotation.matrix())),
                            ..Default::default()
                        }),
                        body: BodySpec::from_body(&p.body),
                    })
                    .collect(),
            },
            ConvexBody::LinearImage { matrix, base } => BodySpec::LinearImage {
                matrix: active_rows(base.dim(), matrix),
                base: Box::new(BodySpec::from_body(base)),
            },
            ConvexBody::Embedded { base } => BodySpec::Embedded { base: Box::new(BodySpec::from_body(base)) },
            ConvexBody::Shadow { axes, base } => {
                BodySpec::Shadow { axes: *axes, base: Box::new(BodySpec::from_body(base)) }
            }
        }
    }
}

/// Innermost object carrying a `type` tag that fails to deserialize.
fn locate(v: &serde_json::Value, path: &str) -> Option<(String, String)> {
    use serde_json::Value;
    let inner = match v {
        Value::Object(map) => map.iter().find_map(|(k, child)| locate(child, &format!("{path}.{k}"))),
        Value::Array(items) => items.iter().enumerate().find_map(|(i, child)| locate(child, &format!("{path}[{i}]"))),
        _ => None,
    };
    if inner.is_some() {
        return inner;
    }
    match v {
        Value::Object(map) if map.contains_key("type") => {
            serde_json::from_value::<BodySpec>(v.clone()).err().map(|e| (path.to_string(), e.to_string()))
        }
        _ => None,
    }
}

impl ConvexBody {
    pub fn from_json(text: &str) -> Result<Self> {
        BodySpec::from_json(text)?.build()
    }

    pub fn to_json(&self) -> String {
        BodySpec::from_body(self).to_json()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn data_errors_name_the_failing_body() {
        let text = r#"{"type":"minkowski","dimension":2,"parts":[
            {"weight":1,"body":{"type":"ball","center":[0,0],"radius":1}},
            {"weight":1,"body":{"type":"ball","center":[0,0],"radius":"one"}}]}"#;
        let msg = BodySpec::from_json(text).unwrap_err().to_string();
        assert!(msg.contains("body.parts[1].body: invalid type"), "{msg}");
        let msg = BodySpec::from_json("{\"type\": \"ball\",\n \"center\": [0, 0]").unwrap_err().to_string();
        assert!(msg.contains("line 2"), "{msg}");
    }

    #[test]
    fn parses_nested_spec() {
        let text = r#"{"type": "minkowski", "dimension": 2, "parts": [
            {"weight": 1.0, "rotation": {"angle": 0.5},
             "body": {"type": "segment", "endpoints": [[-1, 0], [1, 0]]}},
            {"weight": 0.5, "body": {"type": "ball", "center": [0, 0], "radius": 1}}]}"#;
        let body = ConvexBody::from_json(text).unwrap();
        assert_eq!(body.part_count(), 2);
        let again = ConvexBody::from_json(&body.to_json()).unwrap();
        assert_eq!(again, body);
    }

    #[test]
    fn round_trip_all_variants() {
        let texts = [
            r#"{"type":"polytope","vertices":[[0,0,0],[1,0,0],[0,1,0],[0,0,1]]}"#,
            r#"{"type":"ellipsoid","shape":[[2,0.1],[0.1,1]]}"#,
            r#"{"type":"harmonic","dimension":2,"constant":1,"terms":[{"m":3,"j":1,"coefficient":0.177}]}"#,
            r#"{"type":"linear_image","matrix":[[1,0],[0,1.3]],"base":{"type":"ball","center":[0.1,0],"radius":1}}"#,
            r#"{"type":"minkowski","dimension":3,"parts":[{"weight":2,"rotation":{"euler_zyz":[0.1,0.2,0.3]},"body":{"type":"segment","endpoints":[[0,0,0],[1,1,1]]}}]}"#,
        ];
        for t in texts {
            let body = ConvexBody::from_json(t).unwrap();
            let again = ConvexBody::from_json(&body.to_json()).unwrap();
            assert_eq!(again, body, "{t}");
        }
    }

    #[test]
    fn errors_carry_field_paths() {
        let unknown = r#"{"type":"ball","center":[0,0],"radius":1,"colour":"red"}"#;
        assert!(ConvexBody::from_json(unknown).unwrap_err().to_string().contains("colour"));
        let nested = r#"{"type":"minkowski","dimension":2,"parts":[{"weight":1,"body":{"type":"ball","center":[0,0],"radius":-1}}]}"#;
        let msg = ConvexBody::from_json(nested).unwrap_err().to_string();
        assert!(msg.contains("body.parts[0].body"), "{msg}");
        let rot = r#"{"type":"minkowski","dimension":2,"parts":[{"weight":1,"rotation":{"euler_zyz":[0,0,0]},"body":{"type":"ball","center":[0,0],"radius":1}}]}"#;
        assert!(ConvexBody::from_json(rot).unwrap_err().to_string().contains("rotation"));
        let concave = r#"{"type":"harmonic","dimension":2,"constant":1,"terms":[{"m":3,"j":1,"coefficient":0.5}]}"#;
        assert!(ConvexBody::from_json(concave).unwrap_err().to_string().contains("sublinear"));
    }
}
