//! Vertex fields and their file formats.

use crate::equations::{EquationDef, NVARS};
use crate::graph::{FaceId, QuadGraph, VertexId};
use crate::scalar::Scalar;
use serde::{Deserialize, Serialize};
use std::path::Path;
use thiserror::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Provenance {
    Initial,
    Propagated,
}

impl Provenance {
    pub fn as_str(self) -> &'static str {
        match self {
            Provenance::Initial => "initial",
            Provenance::Propagated => "propagated",
        }
    }
}

/// Partial assignment of values to the vertices of a graph.
#[derive(Clone, Debug, PartialEq)]
pub struct FieldSolution<T> {
    values: Vec<Option<T>>,
    provenance: Vec<Option<Provenance>>,
}

impl<T: Scalar> FieldSolution<T> {
    pub fn empty(n: usize) -> Self {
        FieldSolution {
            values: vec![None; n],
            provenance: vec![None; n],
        }
    }

    /// A fully assigned field, every value tagged with `tag`.
    pub fn from_values(values: Vec<T>, tag: Provenance) -> Self {
        let n = values.len();
        FieldSolution {
            values: values.into_iter().map(Some).collect(),
            provenance: vec![Some(tag); n],
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn get(&self, v: VertexId) -> Option<&T> {
        self.values.get(v).and_then(|x| x.as_ref())
    }

    pub fn provenance(&self, v: VertexId) -> Option<Provenance> {
        self.provenance.get(v).copied().flatten()
    }

    pub fn set(&mut self, v: VertexId, value: T, tag: Provenance) {
        self.values[v] = Some(value);
        self.provenance[v] = Some(tag);
    }

    pub fn is_assigned(&self, v: VertexId) -> bool {
        self.values[v].is_some()
    }

    pub fn assigned_count(&self) -> usize {
        self.values.iter().filter(|x| x.is_some()).count()
    }

    pub fn is_total(&self) -> bool {
        self.values.iter().all(|x| x.is_some())
    }

    /// All values, if every vertex is assigned.
    pub fn total(&self) -> Option<Vec<T>> {
        self.values.iter().cloned().collect()
    }

    pub fn iter(&self) -> impl Iterator<Item = (VertexId, Option<&T>)> {
        self.values.iter().enumerate().map(|(i, x)| (i, x.as_ref()))
    }
}

/// Value of `Q` on a face, if all four corners are assigned.
pub fn face_residual<T: Scalar>(g: &QuadGraph, eq: &EquationDef, sol: &FieldSolution<T>, f: FaceId) -> Option<T> {
    let x = face_point(g, sol, f)?;
    Some(eq.polynomial().eval(&x))
}

/// `|Q|` divided by the largest term of `Q` (at least 1).
pub fn relative_face_residual<T: Scalar>(g: &QuadGraph, eq: &EquationDef, sol: &FieldSolution<T>, f: FaceId) -> Option<f64> {
    let x = face_point(g, sol, f)?;
    let q = eq.polynomial();
    Some(q.eval(&x).magnitude() / q.term_scale(&x).max(1.0))
}

fn face_point<T: Scalar>(g: &QuadGraph, sol: &FieldSolution<T>, f: FaceId) -> Option<[T; NVARS]> {
    let [v, v1, v12, v2] = g.face(f);
    let (a1, a2) = g.face_params(f);
    Some([
        sol.get(v)?.clone(),
        sol.get(v1)?.clone(),
        sol.get(v2)?.clone(),
        sol.get(v12)?.clone(),
        T::from_rational(a1),
        T::from_rational(a2),
    ])
}

/// Faces whose residual is not negligible, among those fully assigned.
/// Exact values must give exactly zero; floats are compared by relative
/// residual against `tol`.
pub fn violated_faces<T: Scalar>(g: &QuadGraph, eq: &EquationDef, sol: &FieldSolution<T>, tol: f64) -> Vec<FaceId> {
    (0..g.face_count())
        .filter(|&f| {
            let Some(r) = face_residual(g, eq, sol, f) else { return false };
            if T::EXACT {
                !r.is_negligible(&T::one())
            } else {
                relative_face_residual(g, eq, sol, f).unwrap_or(0.0) > tol
            }
        })
        .collect()
}

/// Largest relative residual over fully assigned faces.
pub fn max_relative_residual<T: Scalar>(g: &QuadGraph, eq: &EquationDef, sol: &FieldSolution<T>) -> f64 {
    (0..g.face_count())
        .filter_map(|f| relative_face_residual(g, eq, sol, f))
        .fold(0.0, f64::max)
}

#[derive(Debug, Error)]
pub enum FieldIoError {
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("bad value {0:?}")]
    Value(String),
    #[error("vertex {0} out of range")]
    Vertex(usize),
}

#[derive(Debug, Serialize, Deserialize)]
struct FieldRow {
    vertex: usize,
    x: Option<f64>,
    y: Option<f64>,
    value: String,
    provenance: Option<Provenance>,
}

fn rows<T: Scalar>(g: &QuadGraph, sol: &FieldSolution<T>) -> Vec<FieldRow> {
    sol.iter()
        .filter_map(|(v, x)| {
            let pos = g.vertex(v).pos;
            x.map(|val| FieldRow {
                vertex: v,
                x: pos.map(|p| p[0]),
                y: pos.map(|p| p[1]),
                value: val.to_text(),
                provenance: sol.provenance(v),
            })
        })
        .collect()
}

pub fn field_to_csv<T: Scalar>(g: &QuadGraph, sol: &FieldSolution<T>) -> Result<String, FieldIoError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows(g, sol) {
        w.serialize(r)?;
    }
    let bytes = w.into_inner().map_err(|e| FieldIoError::Io(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

pub fn field_to_json<T: Scalar>(g: &QuadGraph, sol: &FieldSolution<T>) -> Result<String, FieldIoError> {
    Ok(serde_json::to_string_pretty(&rows(g, sol))?)
}

fn from_rows<T: Scalar>(n: usize, rows: Vec<FieldRow>) -> Result<FieldSolution<T>, FieldIoError> {
    let mut sol = FieldSolution::empty(n);
    for r in rows {
        if r.vertex >= n {
            return Err(FieldIoError::Vertex(r.vertex));
        }
        let val = T::parse_text(&r.value).map_err(|_| FieldIoError::Value(r.value.clone()))?;
        sol.set(r.vertex, val, r.provenance.unwrap_or(Provenance::Initial));
    }
    Ok(sol)
}

pub fn field_from_csv<T: Scalar>(n: usize, text: &str) -> Result<FieldSolution<T>, FieldIoError> {
    let mut r = csv::Reader::from_reader(text.as_bytes());
    let rows = r.deserialize().collect::<Result<Vec<FieldRow>, _>>()?;
    from_rows(n, rows)
}

pub fn field_from_json<T: Scalar>(n: usize, text: &str) -> Result<FieldSolution<T>, FieldIoError> {
    from_rows(n, serde_json::from_str(text)?)
}

fn is_csv(path: &Path) -> bool {
    path.extension().is_some_and(|e| e.eq_ignore_ascii_case("csv"))
}

/// Writes CSV or JSON depending on the file extension.
pub fn write_field<T: Scalar>(path: &Path, g: &QuadGraph, sol: &FieldSolution<T>) -> Result<(), FieldIoError> {
    let text = if is_csv(path) { field_to_csv(g, sol)? } else { field_to_json(g, sol)? };
    std::fs::write(path, text)?;
    Ok(())
}

pub fn read_field<T: Scalar>(path: &Path, n: usize) -> Result<FieldSolution<T>, FieldIoError> {
    let text = std::fs::read_to_string(path)?;
    if is_csv(path) {
        field_from_csv(n, &text)
    } else {
        field_from_json(n, &text)
    }
}
