//! JSON space documents.
//!
//! ```json
//! {
//!   "points": [{"id": "a", "coords": [0.0]}, {"id": "b", "coords": [1.0]}],
//!   "metric": "euclidean",
//!   "measure": [0.5, 0.5],
//!   "weights": {"w": [1.0, 2.718281828459045]}
//! }
//! ```
//!
//! Coordinate metrics (`euclidean`, `l1`, `linf`) store coordinates and the
//! distances are recomputed on load. `graph` and `explicit` documents carry a
//! full `distances` matrix. Floats are written in shortest round-trip form,
//! so saving and loading is bit-exact.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{MetricKind, Space};
use crate::error::{ParseError, SpaceError};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointRecord {
    pub id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coords: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpaceDocument {
    pub points: Vec<PointRecord>,
    pub metric: MetricKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub distances: Option<Vec<Vec<f64>>>,
    pub measure: Vec<f64>,
    #[serde(default)]
    pub weights: BTreeMap<String, Vec<f64>>,
}

impl SpaceDocument {
    pub fn from_space(space: &Space, weights: &BTreeMap<String, Vec<f64>>) -> Self {
        let coords = space.coords().filter(|_| space.metric().is_coordinate());
        let points = space
            .labels()
            .iter()
            .enumerate()
            .map(|(i, id)| PointRecord {
                id: id.clone(),
                coords: coords.map(|c| c[i].clone()),
            })
            .collect();
        let distances = if coords.is_some() {
            None
        } else {
            Some((0..space.len()).map(|i| space.row(i).to_vec()).collect())
        };
        SpaceDocument {
            points,
            metric: space.metric(),
            distances,
            measure: space.measure().to_vec(),
            weights: weights.clone(),
        }
    }

    pub fn into_space(self) -> Result<(Space, BTreeMap<String, Vec<f64>>), SpaceError> {
        let n = self.points.len();
        let labels: Vec<String> = self.points.iter().map(|p| p.id.clone()).collect();
        for (name, w) in &self.weights {
            if w.len() != n {
                return Err(field_error(
                    format!("weights.{name}"),
                    format!("has {} entries, expected {n}", w.len()),
                ));
            }
        }
        let space = if self.metric.is_coordinate() {
            let coords = self
                .points
                .into_iter()
                .enumerate()
                .map(|(i, p)| {
                    p.coords.ok_or_else(|| {
                        field_error(
                            format!("points[{i}].coords"),
                            format!("required for metric {:?}", self.metric),
                        )
                    })
                })
                .collect::<Result<Vec<_>, _>>()?;
            Space::from_coordinates(coords, self.metric, self.measure)?
        } else {
            let rows = self.distances.ok_or_else(|| {
                field_error(
                    "distances".into(),
                    format!("required for metric {:?}", self.metric),
                )
            })?;
            if rows.len() != n {
                return Err(field_error(
                    "distances".into(),
                    format!("has {} rows, expected {n}", rows.len()),
                ));
            }
            let mut space = Space::from_matrix(rows, self.measure)?;
            space.metric = self.metric;
            space
        };
        Ok((space.with_labels(labels), self.weights))
    }
}

fn field_error(field: String, message: String) -> SpaceError {
    SpaceError::Parse(ParseError {
        line: None,
        column: None,
        field: Some(field),
        message,
    })
}

pub fn to_json(space: &Space, weights: &BTreeMap<String, Vec<f64>>) -> String {
    let doc = SpaceDocument::from_space(space, weights);
    let mut out = serde_json::to_string_pretty(&doc).expect("space documents always serialise");
    out.push('\n');
    out
}

pub fn save(
    space: &Space,
    weights: &BTreeMap<String, Vec<f64>>,
    path: impl AsRef<Path>,
) -> Result<(), SpaceError> {
    fs::write(path, to_json(space, weights))?;
    Ok(())
}

pub fn load_str(text: &str) -> Result<(Space, BTreeMap<String, Vec<f64>>), SpaceError> {
    let doc: SpaceDocument = serde_json::from_str(text).map_err(|e| {
        SpaceError::Parse(ParseError {
            line: Some(e.line()),
            column: Some(e.column()),
            field: None,
            message: e.to_string(),
        })
    })?;
    doc.into_space()
}

pub fn load(path: impl AsRef<Path>) -> Result<(Space, BTreeMap<String, Vec<f64>>), SpaceError> {
    load_str(&fs::read_to_string(path)?)
}
