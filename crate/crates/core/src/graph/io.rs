//! JSON interchange for quad-graphs.

use super::{GraphError, QuadGraph, VertexInfo};
use crate::scalar::{format_rational, parse_rational};
use serde::Deserialize;
use std::collections::BTreeMap;

#[derive(Debug, Deserialize)]
struct GraphFile {
    vertices: BTreeMap<String, VertexInfo>,
    faces: Vec<Vec<usize>>,
    #[serde(default)]
    edges: Vec<[usize; 2]>,
    #[serde(default)]
    strip_params: BTreeMap<String, String>,
}

fn numeric_keys<T>(map: BTreeMap<String, T>, what: &str) -> Result<Vec<(usize, T)>, GraphError> {
    let mut out = map
        .into_iter()
        .map(|(k, v)| {
            k.trim()
                .parse::<usize>()
                .map(|i| (i, v))
                .map_err(|_| GraphError::Invalid(format!("{what} id {k:?} is not a number")))
        })
        .collect::<Result<Vec<_>, _>>()?;
    out.sort_by_key(|(i, _)| *i);
    if out.iter().enumerate().any(|(pos, (i, _))| pos != *i) {
        return Err(GraphError::Invalid(format!("{what} ids must be 0..n without gaps")));
    }
    Ok(out)
}

/// Pretty JSON with vertices and strip parameters in id order.
pub fn graph_to_json(g: &QuadGraph) -> String {
    let mut vertices = serde_json::Map::new();
    for (i, v) in g.vertices().iter().enumerate() {
        vertices.insert(i.to_string(), serde_json::to_value(v).expect("vertex serializes"));
    }
    let mut params = serde_json::Map::new();
    for (i, p) in g.strip_params().iter().enumerate() {
        params.insert(i.to_string(), serde_json::Value::String(format_rational(p)));
    }
    let mut value = serde_json::json!({
        "vertices": vertices,
        "faces": g.faces(),
    });
    let dangling = g.dangling_edges();
    if !dangling.is_empty() {
        value["edges"] = serde_json::json!(dangling);
    }
    value["strip_params"] = serde_json::Value::Object(params);
    serde_json::to_string_pretty(&value).expect("json value serializes")
}

/// Parses a graph file, re-traces strips and checks the parameter keys.
pub fn graph_from_json(text: &str) -> Result<QuadGraph, GraphError> {
    let file: GraphFile = serde_json::from_str(text).map_err(|e| GraphError::Invalid(e.to_string()))?;
    let vertices = numeric_keys(file.vertices, "vertex")?.into_iter().map(|(_, v)| v).collect();
    let g = QuadGraph::build_with_edges(vertices, file.faces, file.edges)?;
    if file.strip_params.is_empty() {
        return Ok(g);
    }
    let params = numeric_keys(file.strip_params, "strip")?
        .into_iter()
        .map(|(_, s)| parse_rational(&s).map_err(|e| GraphError::Invalid(e.to_string())))
        .collect::<Result<Vec<_>, _>>()?;
    g.with_strip_params(params)
}
