//! TU Dortmund plain-text dataset format.
//!
//! A dataset `DS` is a directory holding `DS_A.txt` (one `i, j` edge per
//! line), `DS_graph_indicator.txt` (graph id per node line),
//! `DS_graph_labels.txt` (label per graph line) and optionally
//! `DS_node_labels.txt` and `DS_node_attributes.txt`. Ids are 1-based on disk.

use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};

use super::{Dataset, FeatureMatrix, Graph, LabeledGraph};
use crate::{Error, Result};

fn dataset_name(dir: &Path) -> Result<String> {
    let entries = fs::read_dir(dir).map_err(|e| Error::io(dir, e))?;
    let mut names: Vec<String> = entries
        .filter_map(|e| e.ok())
        .filter_map(|e| e.file_name().into_string().ok())
        .filter_map(|f| f.strip_suffix("_A.txt").map(str::to_owned))
        .collect();
    names.sort();
    match names.len() {
        0 => {
            let hint = dir
                .file_name()
                .and_then(|s| s.to_str())
                .unwrap_or("DS")
                .to_owned();
            Err(Error::MissingFile(dir.join(format!("{hint}_A.txt"))))
        }
        1 => Ok(names.remove(0)),
        _ => Err(Error::InvalidInput(format!(
            "{} holds several datasets: {}",
            dir.display(),
            names.join(", ")
        ))),
    }
}

struct TextFile {
    name: String,
    content: String,
}

impl TextFile {
    fn read(path: PathBuf, required: bool) -> Result<Option<TextFile>> {
        if !path.exists() {
            return if required { Err(Error::MissingFile(path)) } else { Ok(None) };
        }
        let content = fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
        let name = path.file_name().and_then(|s| s.to_str()).unwrap_or_default().to_owned();
        Ok(Some(TextFile { name, content }))
    }

    /// Non-empty lines with their 1-based line numbers.
    fn lines(&self) -> impl Iterator<Item = (usize, &str)> {
        self.content
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty())
    }

    fn err(&self, line: usize, message: impl Into<String>) -> Error {
        Error::format(&self.name, line, message)
    }

    fn parse_fields<T: std::str::FromStr>(&self, line: usize, text: &str) -> Result<Vec<T>> {
        text.split(',')
            .map(|f| {
                let f = f.trim();
                f.parse::<T>().map_err(|_| self.err(line, format!("cannot parse {f:?}")))
            })
            .collect()
    }
}

/// Loads a TU dataset directory.
///
/// Node labels are one-hot encoded over the distinct values seen in the
/// whole dataset (ascending). Without node labels, a node attribute file
/// whose entries are all 0/1 is taken verbatim as the feature matrix;
/// otherwise a single always-1 column is synthesized. Graph labels that are
/// already in `{0, 1}` are kept; any other label set is remapped to
/// contiguous 0-based indices in ascending order.
pub fn load_tu_dataset(dir: impl AsRef<Path>) -> Result<Dataset> {
    let dir = dir.as_ref();
    let name = dataset_name(dir)?;
    let file = |suffix: &str| dir.join(format!("{name}_{suffix}.txt"));

    let edges_file = TextFile::read(file("A"), true)?.expect("required");
    let indicator_file = TextFile::read(file("graph_indicator"), true)?.expect("required");
    let labels_file = TextFile::read(file("graph_labels"), true)?.expect("required");
    let node_labels_file = TextFile::read(file("node_labels"), false)?;
    let node_attr_file = TextFile::read(file("node_attributes"), false)?;

    let mut raw_labels = Vec::new();
    for (line, text) in labels_file.lines() {
        let v: Vec<i64> = labels_file.parse_fields(line, text)?;
        raw_labels.push(v[0]);
    }
    let graph_count = raw_labels.len();

    // node (0-based global) -> graph (0-based)
    let mut node_graph = Vec::new();
    for (line, text) in indicator_file.lines() {
        let v: Vec<usize> = indicator_file.parse_fields(line, text)?;
        let gid = v[0];
        if gid == 0 || gid > graph_count {
            return Err(indicator_file.err(line, format!("graph id {gid} outside 1..={graph_count}")));
        }
        if let Some(&prev) = node_graph.last() {
            if gid - 1 < prev {
                return Err(indicator_file.err(line, "graph ids must be non-decreasing"));
            }
        }
        node_graph.push(gid - 1);
    }
    let total_nodes = node_graph.len();

    let mut first_node = vec![usize::MAX; graph_count];
    let mut node_counts = vec![0usize; graph_count];
    for (v, &g) in node_graph.iter().enumerate() {
        if first_node[g] == usize::MAX {
            first_node[g] = v;
        }
        node_counts[g] += 1;
    }

    let mut graph_edges: Vec<Vec<(usize, usize)>> = vec![Vec::new(); graph_count];
    for (line, text) in edges_file.lines() {
        let v: Vec<usize> = edges_file.parse_fields(line, text)?;
        if v.len() != 2 {
            return Err(edges_file.err(line, "expected an edge pair \"i, j\""));
        }
        let (a, b) = (v[0], v[1]);
        for id in [a, b] {
            if id == 0 || id > total_nodes {
                return Err(edges_file.err(line, format!("node id {id} outside 1..={total_nodes}")));
            }
        }
        let (ga, gb) = (node_graph[a - 1], node_graph[b - 1]);
        if ga != gb {
            return Err(edges_file.err(
                line,
                format!("edge ({a}, {b}) joins graph {} and graph {}", ga + 1, gb + 1),
            ));
        }
        if a == b {
            return Err(edges_file.err(line, format!("self-loop on node {a}")));
        }
        let base = first_node[ga];
        graph_edges[ga].push((a - 1 - base, b - 1 - base));
    }

    let features = match (&node_labels_file, &node_attr_file) {
        (Some(f), _) => one_hot_node_labels(f, total_nodes)?,
        (None, Some(f)) => binary_attributes(f, total_nodes)?,
        (None, None) => None,
    };
    let (feature_count, node_rows): (usize, Vec<Vec<u8>>) = match features {
        Some(x) => x,
        None => (1, vec![vec![1]; total_nodes]),
    };

    let labels_set: BTreeSet<i64> = raw_labels.iter().copied().collect();
    let (labels, num_classes): (Vec<usize>, usize) = if labels_set.iter().all(|&l| l == 0 || l == 1) {
        (raw_labels.iter().map(|&l| l as usize).collect(), 2)
    } else {
        let order: Vec<i64> = labels_set.iter().copied().collect();
        (
            raw_labels
                .iter()
                .map(|l| order.binary_search(l).expect("present"))
                .collect(),
            order.len(),
        )
    };

    let mut graphs = Vec::with_capacity(graph_count);
    for g in 0..graph_count {
        let n = node_counts[g];
        let graph = Graph::from_edges(n, graph_edges[g].iter().copied()).map_err(|e| match e {
            Error::InvalidGraph(m) => Error::format(&edges_file.name, 0, format!("graph {}: {m}", g + 1)),
            other => other,
        })?;
        let rows = if n == 0 { &[][..] } else { &node_rows[first_node[g]..first_node[g] + n] };
        let features = FeatureMatrix::from_rows(rows, feature_count)?;
        graphs.push(LabeledGraph::new(graph, features, labels[g])?);
    }
    Dataset::new(name, graphs, num_classes, feature_count)
}

fn one_hot_node_labels(f: &TextFile, total_nodes: usize) -> Result<Option<(usize, Vec<Vec<u8>>)>> {
    let mut values = Vec::with_capacity(total_nodes);
    for (line, text) in f.lines() {
        // multi-column node labels: only the first column is used
        let v: Vec<i64> = f.parse_fields(line, text)?;
        values.push(v[0]);
    }
    if values.len() != total_nodes {
        return Err(f.err(values.len(), format!("{} node labels for {total_nodes} nodes", values.len())));
    }
    let distinct: Vec<i64> = values.iter().copied().collect::<BTreeSet<_>>().into_iter().collect();
    let rows = values
        .iter()
        .map(|v| {
            let k = distinct.binary_search(v).expect("present");
            let mut row = vec![0u8; distinct.len()];
            row[k] = 1;
            row
        })
        .collect();
    Ok(Some((distinct.len(), rows)))
}

fn binary_attributes(f: &TextFile, total_nodes: usize) -> Result<Option<(usize, Vec<Vec<u8>>)>> {
    let mut rows = Vec::with_capacity(total_nodes);
    let mut width = None;
    for (line, text) in f.lines() {
        let v: Vec<f64> = match f.parse_fields(line, text) {
            Ok(v) => v,
            Err(_) => return Ok(None),
        };
        if v.iter().any(|&x| x != 0.0 && x != 1.0) {
            return Ok(None);
        }
        match width {
            None => width = Some(v.len()),
            Some(w) if w != v.len() => return Err(f.err(line, format!("expected {w} attributes"))),
            _ => {}
        }
        rows.push(v.iter().map(|&x| x as u8).collect::<Vec<u8>>());
    }
    if rows.len() != total_nodes {
        return Err(f.err(rows.len(), format!("{} attribute rows for {total_nodes} nodes", rows.len())));
    }
    Ok(width.map(|w| (w, rows)))
}

/// Writes `dataset` as `dir/<name>_*.txt`. Features go to
/// `_node_attributes.txt` as 0/1 columns so that arbitrary binary matrices
/// round-trip through [`load_tu_dataset`].
pub fn write_tu_dataset(dataset: &Dataset, dir: impl AsRef<Path>) -> Result<()> {
    use std::fmt::Write as _;

    let dir = dir.as_ref();
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let name = &dataset.name;
    let mut a = String::new();
    let mut indicator = String::new();
    let mut labels = String::new();
    let mut attrs = String::new();
    let mut offset = 1usize;
    for (gi, lg) in dataset.graphs.iter().enumerate() {
        let g = &lg.graph;
        for (x, y) in g.edges() {
            let _ = writeln!(a, "{}, {}", x + offset, y + offset);
            let _ = writeln!(a, "{}, {}", y + offset, x + offset);
        }
        for v in 0..g.node_count() {
            let _ = writeln!(indicator, "{}", gi + 1);
            let row: Vec<&str> = (0..lg.features.cols())
                .map(|j| if lg.features.get(v, j) { "1" } else { "0" })
                .collect();
            let _ = writeln!(attrs, "{}", row.join(", "));
        }
        let _ = writeln!(labels, "{}", lg.label);
        offset += g.node_count();
    }
    for (suffix, body) in [
        ("A", a),
        ("graph_indicator", indicator),
        ("graph_labels", labels),
        ("node_attributes", attrs),
    ] {
        let path = dir.join(format!("{name}_{suffix}.txt"));
        fs::write(&path, body).map_err(|e| Error::io(&path, e))?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn write(dir: &Path, name: &str, body: &str) {
        fs::write(dir.join(name), body).unwrap();
    }

    #[test]
    fn minimal_directory() {
        let tmp = tempfile::tempdir().unwrap();
        write(tmp.path(), "MIN_A.txt", "1, 2\n2, 1\n");
        write(tmp.path(), "MIN_graph_indicator.txt", "1\n1\n");
        write(tmp.path(), "MIN_graph_labels.txt", "1\n");
        let ds = load_tu_dataset(tmp.path()).unwrap();
        assert_eq!(ds.len(), 1);
        assert_eq!(ds.graphs[0].graph.adjacency(), vec![vec![0, 1], vec![1, 0]]);
        assert_eq!(ds.feature_count, 1);
        assert!(ds.graphs[0].features.column(0).iter().all(|&b| b));
        assert_eq!(ds.graphs[0].label, 1);
    }

    #[test]
    fn node_labels_are_one_hot_and_graph_labels_remapped() {
        let tmp = tempfile::tempdir().unwrap();
        write(tmp.path(), "P_A.txt", "1, 2\n3, 4\n");
        write(tmp.path(), "P_graph_indicator.txt", "1\n1\n2\n2\n");
        write(tmp.path(), "P_graph_labels.txt", "-1\n1\n");
        write(tmp.path(), "P_node_labels.txt", "5\n2\n2\n7\n");
        write(tmp.path(), "P_node_attributes.txt", "0.3, 1.5\n1, 1\n0, 0\n2, 2\n");
        let ds = load_tu_dataset(tmp.path()).unwrap();
        assert_eq!(ds.feature_count, 3);
        assert_eq!(ds.labels(), vec![0, 1]);
        let f0 = &ds.graphs[0].features;
        assert!(f0.get(0, 1) && f0.get(1, 0));
        let f1 = &ds.graphs[1].features;
        assert!(f1.get(0, 0) && f1.get(1, 2));
    }

    #[test]
    fn missing_file_is_named() {
        let tmp = tempfile::tempdir().unwrap();
        write(tmp.path(), "X_A.txt", "1, 2\n");
        write(tmp.path(), "X_graph_indicator.txt", "1\n1\n");
        let err = load_tu_dataset(tmp.path()).unwrap_err();
        match err {
            Error::MissingFile(p) => assert!(p.ends_with("X_graph_labels.txt")),
            other => panic!("unexpected {other}"),
        }
    }

    #[test]
    fn cross_graph_edge_reports_line() {
        let tmp = tempfile::tempdir().unwrap();
        write(tmp.path(), "X_A.txt", "1, 2\n2, 3\n");
        write(tmp.path(), "X_graph_indicator.txt", "1\n1\n2\n");
        write(tmp.path(), "X_graph_labels.txt", "0\n1\n");
        match load_tu_dataset(tmp.path()).unwrap_err() {
            Error::Format { line, file, .. } => {
                assert_eq!(line, 2);
                assert_eq!(file, "X_A.txt");
            }
            other => panic!("unexpected {other}"),
        }
    }

    #[test]
    fn symmetrized_lists_load_identically() {
        let a = tempfile::tempdir().unwrap();
        let b = tempfile::tempdir().unwrap();
        for (dir, edges) in [(a.path(), "1, 2\n2, 1\n2, 3\n"), (b.path(), "1, 2\n2, 3\n")] {
            write(dir, "S_A.txt", edges);
            write(dir, "S_graph_indicator.txt", "1\n1\n1\n");
            write(dir, "S_graph_labels.txt", "0\n");
        }
        let da = load_tu_dataset(a.path()).unwrap();
        let db = load_tu_dataset(b.path()).unwrap();
        assert_eq!(da.graphs[0].graph, db.graphs[0].graph);
    }
}
