//! Flow maps keyed by `U:r,c:S`, in grid order.

use crate::Failure;
use hiveflow::{EdgeId, Flow, TriangleGrid};
use indexmap::IndexMap;
use serde_json::Value;
use std::path::Path;
use std::sync::Arc;

pub type FlowMap = IndexMap<String, i64>;

pub fn to_map(f: &Flow) -> FlowMap {
    f.grid().edges().iter().zip(f.deltas()).map(|(e, &d)| (e.to_string(), d)).collect()
}

/// Reads either a bare flow map or a `decide` output with a `flow` field. Missing edges
/// count as zero; the grid size is `n` if given, otherwise the largest row plus one.
pub fn read(path: &Path, n: Option<usize>) -> Result<Flow, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure::invalid(format!("{}: {e}", path.display())))?;
    let value: Value = serde_json::from_str(&text).map_err(|e| Failure::invalid(format!("{}: {e}", path.display())))?;
    let map = match value.get("flow") {
        Some(inner) => inner,
        None => &value,
    };
    let Value::Object(entries) = map else {
        return Err(Failure::invalid("flow file must hold a JSON object"));
    };
    let mut parsed = Vec::with_capacity(entries.len());
    for (key, v) in entries {
        let edge: EdgeId = key.parse().map_err(|e| Failure::invalid(format!("bad edge key {key}: {e}")))?;
        let x = v.as_i64().ok_or_else(|| Failure::invalid(format!("throughput of {key} is not an integer")))?;
        parsed.push((edge, x));
    }
    let n = n.or_else(|| parsed.iter().map(|(e, _)| e.row + 1).max()).unwrap_or(1);
    let grid = Arc::new(TriangleGrid::new(n).map_err(Failure::invalid)?);
    let mut delta = vec![0i64; grid.num_edges()];
    for (edge, x) in parsed {
        let k = grid.edge_index(edge).ok_or_else(|| Failure::invalid(format!("edge {edge} is outside a grid of size {n}")))?;
        delta[k] = x;
    }
    Flow::from_delta(&grid, delta).map_err(Failure::invalid)
}
