use std::io::BufReader;

use idt_core::activation::{load_activations, read_activations, write_activations};
use idt_core::graph::{example_graph, Dataset, FeatureMatrix, Graph, LabeledGraph};

const GOLDEN: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/tests/data/golden.idtact");

fn golden_dataset(second_nodes: usize) -> Dataset {
    let (g, u) = example_graph();
    let one = LabeledGraph::new(Graph::empty(second_nodes).unwrap(), FeatureMatrix::ones(second_nodes, 2), 0).unwrap();
    Dataset::new("golden", vec![LabeledGraph::new(g, u, 1).unwrap(), one], 2, 2).unwrap()
}

#[test]
fn golden_file_round_trips_byte_for_byte() {
    let bytes = std::fs::read(GOLDEN).unwrap();
    let dumps = read_activations(BufReader::new(&bytes[..]), "golden", None).unwrap();
    let mut out = Vec::new();
    write_activations(&dumps, &mut out).unwrap();
    assert_eq!(String::from_utf8(out).unwrap(), String::from_utf8(bytes).unwrap());
}

#[test]
fn golden_file_decodes_to_known_values() {
    let dumps = load_activations(GOLDEN, &golden_dataset(1)).unwrap();
    assert_eq!(dumps.layer_count, 2);
    assert_eq!((dumps.dim(0), dumps.dim(1)), (3, 2));
    assert_eq!(dumps.graphs[0].row(0, 2), &[1.5, 1.75, 2.0]);
    assert_eq!(dumps.graphs[0].row(1, 3), &[1e-3, -1e3]);
    assert_eq!(dumps.graphs[1].output, [2.5, -2.5]);
    assert_eq!(dumps.predictions(), [1, 0]);
    assert_eq!(dumps.meta["arch"], "gcn");
}

#[test]
fn node_count_mismatch_names_the_graph() {
    let err = load_activations(GOLDEN, &golden_dataset(2)).unwrap_err().to_string();
    assert!(err.contains("graph 1"), "{err}");
}
