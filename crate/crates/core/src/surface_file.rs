//! Declarative surface and curve definitions (TOML).
//!
//! ```toml
//! model = "an"          # an | ball | fubini
//! c = -4.0
//! kind = "surface"      # surface | circle
//! domain = [[-0.25, 0.25], [-0.25, 0.25]]
//!
//! [[map]]
//! type = "flow"         # flow | translate | geodesic | sphere_slice
//! xi = [0.8164965809277260, 0.0, 0.5773502691896258, 0.0]   # B, V, JV, Z
//! param = "s"           # "s", "t" or a number
//! ```
//!
//! A circle takes `kappa` and optionally `length`, `start`, `tangent` and
//! `normal` (chart components) instead of `domain` and `map`.

use std::sync::Arc;

use serde::Deserialize;

use crate::ambient::{LeftInvariantVector, Model, SpaceForm};
use crate::catalog::{circle_from, default_domain, CircleSpec};
use crate::error::{GeometryError, Result};
use crate::submanifold::{ComposedMap, Curve, Param, Primitive, SurfacePatch};

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawFile {
    model: Option<String>,
    c: Option<f64>,
    #[serde(default = "surface_kind")]
    kind: String,
    domain: Option<[[f64; 2]; 2]>,
    #[serde(default)]
    map: Vec<RawStep>,
    kappa: Option<f64>,
    length: Option<f64>,
    start: Option<[f64; 4]>,
    tangent: Option<[f64; 4]>,
    normal: Option<[f64; 4]>,
}

fn surface_kind() -> String {
    "surface".into()
}

#[derive(Debug, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
enum RawStep {
    Flow { xi: [f64; 4], param: RawParam },
    Translate { v: [f64; 4], param: RawParam },
    Geodesic { v: [f64; 4], param: RawParam },
    SphereSlice { rho: f64, theta: RawParam, psi: RawParam },
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum RawParam {
    Value(f64),
    Name(String),
}

fn param(p: &RawParam) -> Result<Param> {
    match p {
        RawParam::Value(v) => Ok(Param::Const(*v)),
        RawParam::Name(n) if n == "s" => Ok(Param::S),
        RawParam::Name(n) if n == "t" => Ok(Param::T),
        RawParam::Name(n) => Err(GeometryError::Invalid(format!("unknown parameter '{n}' (expected s, t or a number)"))),
    }
}

/// A parsed definition.
#[derive(Clone, Debug)]
pub enum Definition {
    Surface(SurfacePatch),
    Curve(Curve),
}

/// Parse failure with a source position when one is known.
#[derive(Debug, Clone, PartialEq)]
pub struct ParseError {
    pub line: Option<usize>,
    pub column: Option<usize>,
    pub message: String,
}

impl std::fmt::Display for ParseError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match (self.line, self.column) {
            (Some(l), Some(c)) => write!(f, "line {l}, column {c}: {}", self.message),
            _ => f.write_str(&self.message),
        }
    }
}

impl std::error::Error for ParseError {}

fn position(src: &str, offset: usize) -> (usize, usize) {
    let before = &src[..offset.min(src.len())];
    let line = before.matches('\n').count() + 1;
    let col = before.rfind('\n').map_or(before.len(), |i| before.len() - i - 1) + 1;
    (line, col)
}

fn semantic(e: GeometryError) -> ParseError {
    ParseError {
        line: None,
        column: None,
        message: e.to_string(),
    }
}

/// Parses a definition; `default_c` is used when the file has no `c`.
pub fn parse(src: &str, default_c: Option<f64>) -> std::result::Result<Definition, ParseError> {
    let raw: RawFile = toml::from_str(src).map_err(|e| {
        let (line, column) = match e.span() {
            Some(s) => {
                let (l, c) = position(src, s.start);
                (Some(l), Some(c))
            }
            None => (None, None),
        };
        ParseError {
            line,
            column,
            message: e.message().to_string(),
        }
    })?;
    build(&raw, default_c).map_err(semantic)
}

fn build(raw: &RawFile, default_c: Option<f64>) -> Result<Definition> {
    let c = raw
        .c
        .or(default_c)
        .ok_or_else(|| GeometryError::Invalid("missing curvature 'c'".into()))?;
    let space = match raw.model.as_deref() {
        None => SpaceForm::default_for(c)?,
        Some("an") => SpaceForm::new(c, Model::AnSolvable)?,
        Some("ball") => SpaceForm::new(c, Model::BergmanBall)?,
        Some("fubini") => SpaceForm::new(c, Model::FubiniChart)?,
        Some(m) => return Err(GeometryError::Invalid(format!("unknown model '{m}' (expected an, ball or fubini)"))),
    };
    match raw.kind.as_str() {
        "surface" => {
            if raw.map.is_empty() {
                return Err(GeometryError::Invalid("surface needs at least one [[map]] step".into()));
            }
            let steps = raw
                .map
                .iter()
                .map(|s| {
                    Ok(match s {
                        RawStep::Flow { xi, param: p } => Primitive::Flow {
                            xi: LeftInvariantVector(*xi),
                            param: param(p)?,
                        },
                        RawStep::Translate { v, param: p } => Primitive::Translate { v: *v, param: param(p)? },
                        RawStep::Geodesic { v, param: p } => Primitive::Geodesic { v: *v, param: param(p)? },
                        RawStep::SphereSlice { rho, theta, psi } => Primitive::SphereSlice {
                            rho: *rho,
                            theta: param(theta)?,
                            psi: param(psi)?,
                        },
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            let map = ComposedMap::new(steps);
            map.validate(&space)?;
            let domain = raw.domain.unwrap_or_else(|| default_domain(&space));
            for d in &domain {
                if !(d[0] < d[1]) {
                    return Err(GeometryError::Invalid(format!("empty domain interval {d:?}")));
                }
            }
            Ok(Definition::Surface(SurfacePatch::new(space, domain, Arc::new(map))?))
        }
        "circle" => {
            let kappa = raw
                .kappa
                .ok_or_else(|| GeometryError::Invalid("circle needs 'kappa'".into()))?;
            let mut spec = CircleSpec::default_for(&space, kappa)?;
            if let Some(l) = raw.length {
                spec.length = l;
            }
            if let Some(x) = raw.start {
                space.check_point(&x)?;
                spec.start = x;
            }
            if let Some(t) = raw.tangent {
                spec.tangent = t;
            }
            if let Some(n) = raw.normal {
                spec.normal = n;
            }
            Ok(Definition::Curve(circle_from(&space, &spec)?))
        }
        k => Err(GeometryError::Invalid(format!("unknown kind '{k}' (expected surface or circle)"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn syntax_errors_carry_positions() {
        let err = parse("c = -4\nkind = \n", None).unwrap_err();
        assert_eq!(err.line, Some(2));
        assert!(err.column.is_some());
    }

    #[test]
    fn unknown_fields_and_parameters() {
        assert!(parse("c = -4\ncolour = 1\n", None).is_err());
        let src = "c = -4\n[[map]]\ntype = \"flow\"\nxi = [1, 0, 0, 0]\nparam = \"u\"\n";
        let err = parse(src, None).unwrap_err();
        assert!(err.message.contains("unknown parameter"), "{err}");
    }

    #[test]
    fn circle_definition() {
        match parse("kind = \"circle\"\nc = -4.0\nkappa = 1.0\n", None).unwrap() {
            Definition::Curve(c) => assert!(c.points.len() > 100),
            _ => panic!("expected a curve"),
        }
    }
}
