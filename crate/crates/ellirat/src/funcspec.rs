//! JSON function-spec documents consumed by the CLI.
//!
//! ```json
//! {
//!   "height": 1.0,
//!   "kind": "gauge_power",
//!   "body": [[1, 0, 1], [-1, 0, 1], [0, 1, 1], [0, -1, 1]],
//!   "alpha": 1.0
//! }
//! ```
//!
//! Polytopes are row lists `[a_1, ..., a_n, b]` meaning `⟨a, x⟩ ≤ b`.
//! `truncated_gauge` takes `body` and `t0`; `piecewise_linear` takes
//! `pieces` (rows `[a_1, ..., a_n, b]` meaning the affine piece
//! `⟨a, x⟩ + b`) and `domain`. `shift` is optional where it applies.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{HPolytope, Vector};
use crate::logconcave::{Exponent, LogConcaveFn};

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct FunctionSpec {
    #[serde(default = "default_height")]
    pub height: f64,
    pub kind: Kind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub body: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t0: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub shift: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pieces: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub domain: Option<Vec<Vec<f64>>>,
}

fn default_height() -> f64 {
    1.0
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
pub enum Kind {
    Indicator,
    GaugePower,
    TruncatedGauge,
    PiecewiseLinear,
}

impl FunctionSpec {
    pub fn parse(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::SpecParse(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("spec serialization")
    }

    /// Validate and build the function. Error messages name the offending
    /// field.
    pub fn build(&self) -> Result<LogConcaveFn> {
        if !(self.height > 0.0 && self.height.is_finite()) {
            return Err(Error::SpecParse(format!(
                "field 'height': must be positive and finite, got {}",
                self.height
            )));
        }
        match self.kind {
            Kind::Indicator => {
                let body = self.body_polytope("body")?;
                LogConcaveFn::indicator(self.height, body)
            }
            Kind::GaugePower => {
                let body = self.body_polytope("body")?;
                let alpha = self.alpha.ok_or_else(|| {
                    Error::SpecParse("field 'alpha': required for kind gauge_power".into())
                })?;
                let shift = self.shift_vector(body.dim())?;
                LogConcaveFn::gauge_power(self.height, body, alpha, shift)
            }
            Kind::TruncatedGauge => {
                let body = self.body_polytope("body")?;
                let t0 = self.t0.ok_or_else(|| {
                    Error::SpecParse("field 't0': required for kind truncated_gauge".into())
                })?;
                let shift = self.shift_vector(body.dim())?;
                let f = LogConcaveFn::truncated_gauge(self.height, body, t0)?;
                if shift.norm() == 0.0 {
                    Ok(f)
                } else {
                    match f.exponent() {
                        Exponent::TruncatedGauge { body, plateau, .. } => {
                            LogConcaveFn::truncated_gauge_raw(
                                self.height,
                                body.clone(),
                                *plateau,
                                shift,
                            )
                        }
                        _ => unreachable!(),
                    }
                }
            }
            Kind::PiecewiseLinear => {
                let domain = match &self.domain {
                    Some(rows) => parse_polytope(rows, "domain")?,
                    None => {
                        return Err(Error::SpecParse(
                            "field 'domain': required for kind piecewise_linear".into(),
                        ))
                    }
                };
                let rows = self.pieces.as_ref().ok_or_else(|| {
                    Error::SpecParse("field 'pieces': required for kind piecewise_linear".into())
                })?;
                let mut pieces = Vec::with_capacity(rows.len());
                for (i, row) in rows.iter().enumerate() {
                    if row.len() != domain.dim() + 1 {
                        return Err(Error::SpecParse(format!(
                            "field 'pieces': row {i} has {} entries, expected {}",
                            row.len(),
                            domain.dim() + 1
                        )));
                    }
                    let a =
                        Vector::from_iterator(domain.dim(), row[..domain.dim()].iter().cloned());
                    pieces.push((a, row[domain.dim()]));
                }
                LogConcaveFn::piecewise_linear(self.height, pieces, domain)
            }
        }
    }

    /// Round-trippable spec for a built function.
    pub fn from_function(f: &LogConcaveFn) -> Self {
        let (kind, body, alpha, t0, shift, pieces, domain) = match f.exponent() {
            Exponent::Indicator { body } => (
                Kind::Indicator,
                Some(polytope_rows(body)),
                None,
                None,
                None,
                None,
                None,
            ),
            Exponent::GaugePower { body, alpha, shift } => (
                Kind::GaugePower,
                Some(polytope_rows(body)),
                Some(*alpha),
                None,
                nonzero_shift(shift),
                None,
                None,
            ),
            Exponent::TruncatedGauge {
                body,
                plateau,
                shift,
            } => (
                Kind::TruncatedGauge,
                Some(polytope_rows(body)),
                None,
                Some((plateau - f.dim() as f64).exp()),
                nonzero_shift(shift),
                None,
                None,
            ),
            Exponent::PiecewiseLinear { pieces, domain } => (
                Kind::PiecewiseLinear,
                None,
                None,
                None,
                None,
                Some(
                    pieces
                        .iter()
                        .map(|(a, b)| {
                            let mut row: Vec<f64> = a.iter().cloned().collect();
                            row.push(*b);
                            row
                        })
                        .collect(),
                ),
                Some(polytope_rows(domain)),
            ),
        };
        FunctionSpec {
            height: f.height(),
            kind,
            body,
            alpha,
            t0,
            shift,
            pieces,
            domain,
        }
    }

    fn body_polytope(&self, field: &str) -> Result<HPolytope> {
        match &self.body {
            Some(rows) => parse_polytope(rows, field),
            None => Err(Error::SpecParse(format!(
                "field '{field}': required for kind {:?}",
                self.kind
            ))),
        }
    }

    fn shift_vector(&self, dim: usize) -> Result<Vector> {
        match &self.shift {
            None => Ok(Vector::zeros(dim)),
            Some(v) if v.len() == dim => Ok(Vector::from_iterator(dim, v.iter().cloned())),
            Some(v) => Err(Error::SpecParse(format!(
                "field 'shift': has {} entries, expected {dim}",
                v.len()
            ))),
        }
    }
}

/// Parse a polytope literal: rows `[a_1, ..., a_n, b]`.
pub fn parse_polytope(rows: &[Vec<f64>], field: &str) -> Result<HPolytope> {
    if rows.is_empty() {
        return Err(Error::SpecParse(format!("field '{field}': no rows")));
    }
    let width = rows[0].len();
    if width < 2 {
        return Err(Error::SpecParse(format!(
            "field '{field}': rows need at least 2 entries (a, b)"
        )));
    }
    let dim = width - 1;
    let mut parsed = Vec::with_capacity(rows.len());
    for (i, row) in rows.iter().enumerate() {
        if row.len() != width {
            return Err(Error::SpecParse(format!(
                "field '{field}': row {i} has {} entries, expected {width}",
                row.len()
            )));
        }
        if row.iter().any(|v| !v.is_finite()) {
            return Err(Error::SpecParse(format!(
                "field '{field}': row {i} has non-finite entries"
            )));
        }
        let a = Vector::from_iterator(dim, row[..dim].iter().cloned());
        parsed.push((a, row[dim]));
    }
    HPolytope::from_rows(dim, parsed).map_err(|e| Error::SpecParse(format!("field '{field}': {e}")))
}

fn polytope_rows(k: &HPolytope) -> Vec<Vec<f64>> {
    k.rows()
        .iter()
        .map(|r| {
            let mut row: Vec<f64> = r.normal.iter().cloned().collect();
            row.push(r.offset);
            row
        })
        .collect()
}

fn nonzero_shift(shift: &Vector) -> Option<Vec<f64>> {
    if shift.norm() == 0.0 {
        None
    } else {
        Some(shift.iter().cloned().collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::bodies::cube;

    fn cube_rows() -> Vec<Vec<f64>> {
        vec![
            vec![1.0, 0.0, 1.0],
            vec![-1.0, 0.0, 1.0],
            vec![0.0, 1.0, 1.0],
            vec![0.0, -1.0, 1.0],
        ]
    }

    #[test]
    fn parse_and_build_each_kind() {
        let spec = FunctionSpec {
            height: 2.0,
            kind: Kind::Indicator,
            body: Some(cube_rows()),
            alpha: None,
            t0: None,
            shift: None,
            pieces: None,
            domain: None,
        };
        let f = spec.build().unwrap();
        assert_eq!(f.dim(), 2);
        assert_eq!(f.height(), 2.0);

        let text =
            r#"{"kind": "gauge_power", "body": [[1,0,1],[-1,0,1],[0,1,1],[0,-1,1]], "alpha": 1.5}"#;
        let f = FunctionSpec::parse(text).unwrap().build().unwrap();
        assert_eq!(f.dim(), 2);

        let text = r#"{"kind": "truncated_gauge", "body": [[1,0,1],[-1,0,1],[0,1,1],[0,-1,1]], "t0": 0.5}"#;
        assert!(FunctionSpec::parse(text).unwrap().build().is_ok());

        let text = r#"{"kind": "piecewise_linear",
                       "pieces": [[1,0,0],[-0.5,0.5,-0.2]],
                       "domain": [[1,0,4],[-1,0,4],[0,1,4],[0,-1,4]]}"#;
        assert!(FunctionSpec::parse(text).unwrap().build().is_ok());
    }

    #[test]
    fn round_trip_is_identity() {
        let f = LogConcaveFn::gauge_power(1.25, cube(2), 2.0, Vector::from_vec(vec![0.1, -0.2]))
            .unwrap();
        let spec = FunctionSpec::from_function(&f);
        let text = spec.to_json();
        let reparsed = FunctionSpec::parse(&text).unwrap();
        assert_eq!(spec, reparsed);
        let rebuilt = reparsed.build().unwrap();
        let probe = Vector::from_vec(vec![0.7, 0.3]);
        assert!((rebuilt.evaluate(&probe) - f.evaluate(&probe)).abs() < 1e-12);
    }

    #[test]
    fn errors_name_the_offending_field() {
        let text = r#"{"kind": "gauge_power", "body": [[1,0,1],[-1,0,1],[0,1,1],[0,-1,1]]}"#;
        let err = FunctionSpec::parse(text).unwrap().build().unwrap_err();
        assert!(err.to_string().contains("alpha"), "{err}");

        let text = r#"{"kind": "indicator"}"#;
        let err = FunctionSpec::parse(text).unwrap().build().unwrap_err();
        assert!(err.to_string().contains("body"), "{err}");

        let text = r#"{"kind": "indicator", "body": [[1,0,1],[0,1]]}"#;
        let err = FunctionSpec::parse(text).unwrap().build().unwrap_err();
        assert!(err.to_string().contains("body"), "{err}");

        let text = r#"{"kind": "noodle", "body": []}"#;
        assert!(FunctionSpec::parse(text).is_err());
    }
}
