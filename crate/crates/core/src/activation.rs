//! `idtact/1` activation dumps.
//!
//! Newline-delimited JSON. The first line is a header
//!
//! ```text
//! {"format":"idtact/1","layer_count":2,"num_classes":2,"meta":{...}}
//! ```
//!
//! followed by one record per graph
//!
//! ```text
//! {"graph":0,"nodes":13,"dims":[64,64],"layers":["<b64>","<b64>"],"output":"<b64>","pred":1}
//! ```
//!
//! where every `<b64>` is standard base64 of little-endian `f32` values,
//! row-major (`nodes × dims[k]` for layer `k`, `num_classes` for the output).
//! `graph` is the 0-based position of the graph in its dataset; records may
//! appear in any order.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use base64::engine::general_purpose::STANDARD;
use base64::Engine;
use serde::{Deserialize, Serialize};

use crate::graph::Dataset;
use crate::{Error, Result};

pub const FORMAT: &str = "idtact/1";

#[derive(Clone, Debug, PartialEq)]
pub struct GraphActivations {
    pub nodes: usize,
    /// hidden dimension per layer
    pub dims: Vec<usize>,
    /// `layers[k]` is the row-major `nodes × dims[k]` matrix `X^(k+1)`
    pub layers: Vec<Vec<f32>>,
    /// graph-level class scores
    pub output: Vec<f32>,
    pub pred: usize,
}

impl GraphActivations {
    /// Row of node `v` in layer `k`.
    pub fn row(&self, k: usize, v: usize) -> &[f32] {
        let d = self.dims[k];
        &self.layers[k][v * d..(v + 1) * d]
    }
}

/// Activations for a whole dataset, `graphs[i]` belonging to graph `i`.
#[derive(Clone, Debug, PartialEq)]
pub struct ActivationDumps {
    pub layer_count: usize,
    pub num_classes: usize,
    /// free-form producer metadata (architecture, seed, ...)
    pub meta: serde_json::Map<String, serde_json::Value>,
    pub graphs: Vec<GraphActivations>,
}

impl ActivationDumps {
    /// Hidden dimension of layer `k` (uniform across graphs once validated).
    pub fn dim(&self, k: usize) -> usize {
        self.graphs.first().map_or(0, |g| g.dims[k])
    }

    /// Predicted classes in dataset order.
    pub fn predictions(&self) -> Vec<usize> {
        self.graphs.iter().map(|g| g.pred).collect()
    }

    /// Keeps the graphs at `indices`, in that order.
    pub fn subset(&self, indices: &[usize]) -> ActivationDumps {
        ActivationDumps {
            layer_count: self.layer_count,
            num_classes: self.num_classes,
            meta: self.meta.clone(),
            graphs: indices.iter().map(|&i| self.graphs[i].clone()).collect(),
        }
    }
}

#[derive(Serialize, Deserialize)]
struct Header {
    format: String,
    layer_count: usize,
    num_classes: usize,
    #[serde(default, skip_serializing_if = "serde_json::Map::is_empty")]
    meta: serde_json::Map<String, serde_json::Value>,
}

#[derive(Serialize, Deserialize)]
struct Record {
    graph: usize,
    nodes: usize,
    dims: Vec<usize>,
    layers: Vec<String>,
    output: String,
    pred: usize,
}

fn encode(values: &[f32]) -> String {
    let mut bytes = Vec::with_capacity(values.len() * 4);
    for v in values {
        bytes.extend_from_slice(&v.to_le_bytes());
    }
    STANDARD.encode(bytes)
}

fn decode(text: &str) -> std::result::Result<Vec<f32>, String> {
    let bytes = STANDARD.decode(text).map_err(|e| format!("bad base64: {e}"))?;
    if bytes.len() % 4 != 0 {
        return Err(format!("{} bytes is not a whole number of f32 values", bytes.len()));
    }
    Ok(bytes
        .chunks_exact(4)
        .map(|c| f32::from_le_bytes([c[0], c[1], c[2], c[3]]))
        .collect())
}

/// Reads and validates a dump against `dataset` (node counts, graph count).
pub fn load_activations(path: impl AsRef<Path>, dataset: &Dataset) -> Result<ActivationDumps> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| {
        if e.kind() == std::io::ErrorKind::NotFound {
            Error::MissingFile(path.to_path_buf())
        } else {
            Error::io(path, e)
        }
    })?;
    read_activations(BufReader::new(file), &path.display().to_string(), Some(dataset))
}

/// Parses a dump from any reader. Without a dataset only internal
/// consistency is checked and graph ids must be `0..count`.
pub fn read_activations(reader: impl BufRead, name: &str, dataset: Option<&Dataset>) -> Result<ActivationDumps> {
    let fail = |line: usize, message: String| Error::format(name, line, message);
    let mut lines = reader.lines().enumerate().filter_map(|(i, l)| match l {
        Ok(text) if text.trim().is_empty() => None,
        other => Some((i + 1, other)),
    });
    let (hline, htext) = match lines.next() {
        Some((n, text)) => (n, text.map_err(|e| Error::io(name, e))?),
        None => return Err(fail(1, "empty activation file".into())),
    };
    let header: Header = serde_json::from_str(&htext).map_err(|e| fail(hline, format!("bad header: {e}")))?;
    if header.format != FORMAT {
        return Err(Error::Version {
            found: header.format,
            expected: FORMAT.into(),
        });
    }
    if header.num_classes == 0 {
        return Err(fail(hline, "num_classes must be positive".into()));
    }

    let mut slots: Vec<Option<GraphActivations>> = match dataset {
        Some(ds) => vec![None; ds.len()],
        None => Vec::new(),
    };
    let mut layer_dims: Option<Vec<usize>> = None;
    for (lineno, text) in lines {
        let text = text.map_err(|e| Error::io(name, e))?;
        let rec: Record = serde_json::from_str(&text).map_err(|e| fail(lineno, format!("bad record: {e}")))?;
        let id = rec.graph;
        if dataset.is_none() && id >= slots.len() {
            slots.resize(id + 1, None);
        }
        if id >= slots.len() {
            return Err(fail(lineno, format!("graph {id} is not in the dataset ({} graphs)", slots.len())));
        }
        if slots[id].is_some() {
            return Err(fail(lineno, format!("graph {id} appears twice")));
        }
        if let Some(ds) = dataset {
            let expected = ds.graphs[id].graph.node_count();
            if rec.nodes != expected {
                return Err(Error::ShapeMismatch(format!(
                    "graph {id}: dump has {} nodes, dataset graph has {expected}",
                    rec.nodes
                )));
            }
        }
        if rec.dims.len() != header.layer_count || rec.layers.len() != header.layer_count {
            return Err(Error::ShapeMismatch(format!(
                "graph {id}: expected {} layers, found {} dims and {} matrices",
                header.layer_count,
                rec.dims.len(),
                rec.layers.len()
            )));
        }
        match &layer_dims {
            None => layer_dims = Some(rec.dims.clone()),
            Some(d) if *d != rec.dims => {
                return Err(Error::ShapeMismatch(format!(
                    "graph {id}: layer dims {:?} differ from {:?}",
                    rec.dims, d
                )))
            }
            Some(_) => {}
        }
        let mut layers = Vec::with_capacity(header.layer_count);
        for (k, enc) in rec.layers.iter().enumerate() {
            let values = decode(enc).map_err(|m| fail(lineno, format!("graph {id} layer {k}: {m}")))?;
            let want = rec.nodes * rec.dims[k];
            if values.len() != want {
                return Err(Error::ShapeMismatch(format!(
                    "graph {id} layer {k}: {} values, expected {} nodes × {} = {want}",
                    values.len(),
                    rec.nodes,
                    rec.dims[k]
                )));
            }
            if let Some(pos) = values.iter().position(|v| !v.is_finite()) {
                return Err(fail(
                    lineno,
                    format!("graph {id} layer {k}: non-finite value at row {} col {}", pos / rec.dims[k].max(1), pos % rec.dims[k].max(1)),
                ));
            }
            layers.push(values);
        }
        let output = decode(&rec.output).map_err(|m| fail(lineno, format!("graph {id} output: {m}")))?;
        if output.len() != header.num_classes {
            return Err(Error::ShapeMismatch(format!(
                "graph {id}: output has {} values, expected {}",
                output.len(),
                header.num_classes
            )));
        }
        if let Some(pos) = output.iter().position(|v| !v.is_finite()) {
            return Err(fail(lineno, format!("graph {id} output: non-finite value at index {pos}")));
        }
        if rec.pred >= header.num_classes {
            return Err(fail(lineno, format!("graph {id}: predicted class {} out of range", rec.pred)));
        }
        slots[id] = Some(GraphActivations {
            nodes: rec.nodes,
            dims: rec.dims,
            layers,
            output,
            pred: rec.pred,
        });
    }
    let mut graphs = Vec::with_capacity(slots.len());
    for (id, s) in slots.into_iter().enumerate() {
        graphs.push(s.ok_or_else(|| Error::ShapeMismatch(format!("no activations for graph {id}")))?);
    }
    Ok(ActivationDumps {
        layer_count: header.layer_count,
        num_classes: header.num_classes,
        meta: header.meta,
        graphs,
    })
}

pub fn write_activations(dumps: &ActivationDumps, mut out: impl Write) -> Result<()> {
    let header = Header {
        format: FORMAT.into(),
        layer_count: dumps.layer_count,
        num_classes: dumps.num_classes,
        meta: dumps.meta.clone(),
    };
    let io = |e| Error::io("<activation writer>", e);
    serde_json::to_writer(&mut out, &header)?;
    out.write_all(b"\n").map_err(io)?;
    for (id, g) in dumps.graphs.iter().enumerate() {
        let rec = Record {
            graph: id,
            nodes: g.nodes,
            dims: g.dims.clone(),
            layers: g.layers.iter().map(|l| encode(l)).collect(),
            output: encode(&g.output),
            pred: g.pred,
        };
        serde_json::to_writer(&mut out, &rec)?;
        out.write_all(b"\n").map_err(io)?;
    }
    out.flush().map_err(io)
}

pub fn save_activations(dumps: &ActivationDumps, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    write_activations(dumps, BufWriter::new(file))
}
