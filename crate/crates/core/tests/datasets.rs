use idt_core::graph::{load_tu_dataset, write_tu_dataset};
use idt_core::logic::{eval_graph, parse_formula};
use idt_core::synth::{gen_bamultishapes, gen_er_dataset};

#[test]
fn generated_datasets_survive_the_tu_format() {
    let dir = tempfile::tempdir().unwrap();
    let psi1 = parse_formula("1((A U0 < 4) | (A U0 > 9)) > 0").unwrap();
    let er = gen_er_dataset(30, 13, 0.5, &psi1, 2).unwrap();
    let path = dir.path().join("psi1");
    write_tu_dataset(&er, &path).unwrap();
    let back = load_tu_dataset(&path).unwrap();
    assert_eq!(back.len(), 30);
    for (a, b) in er.graphs.iter().zip(&back.graphs) {
        assert_eq!(a.graph, b.graph);
        assert_eq!(a.label, b.label);
        assert_eq!(eval_graph(&b.graph, &b.features, &psi1).unwrap() as usize, b.label);
    }

    let ba = gen_bamultishapes(10, 3).unwrap();
    let path = dir.path().join("ba");
    write_tu_dataset(&ba, &path).unwrap();
    let back = load_tu_dataset(&path).unwrap();
    assert_eq!(back.labels(), ba.labels());
    assert!(back.graphs.iter().zip(&ba.graphs).all(|(a, b)| a.graph == b.graph));
}
