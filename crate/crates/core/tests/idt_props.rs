mod common;

use common::{random_formula, random_graph, seeded};
use idt_core::graph::{Dataset, LabeledGraph};
use idt_core::idt::{compact, compile_formula_to_idt, explain_dot, explain_text, idt_predict, learn_idt, FinalTarget, Idt, IdtConfig};
use idt_core::logic::{eval_graph, eval_nodes, parse_formula, render_formula};
use proptest::prelude::*;
use rand::Rng;

fn random_dataset(seed: u64, count: usize) -> Dataset {
    let mut r = seeded(seed);
    let label_rule = random_formula(&mut r, 2, 2);
    let graphs = (0..count)
        .map(|_| {
            let (g, u) = random_graph(&mut r, 9, 2);
            let label = if r.gen_bool(0.9) { eval_graph(&g, &u, &label_rule).unwrap() as usize } else { r.gen_range(0..2) };
            LabeledGraph::new(g, u, label).unwrap()
        })
        .collect();
    Dataset::new("random", graphs, 2, 2).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn compiled_formulas_agree_with_semantics(seed in any::<u64>()) {
        let mut r = seeded(seed);
        let f = random_formula(&mut r, 2, 2);
        let compiled = compile_formula_to_idt(&f, 2).unwrap();
        compiled.idt.validate().unwrap();
        prop_assert!(compiled.idt.layers.len() == f.depth().max(1));
        for _ in 0..10 {
            let (g, u) = random_graph(&mut r, 8, 2);
            prop_assert_eq!(compiled.eval_nodes(&g, &u).unwrap(), eval_nodes(&g, &u, &f).unwrap(), "{}", render_formula(&f));
            prop_assert_eq!(compiled.eval_graph(&g, &u).unwrap(), eval_graph(&g, &u, &f).unwrap());
        }
    }

    #[test]
    fn compaction_and_serialization_preserve_predictions(seed in any::<u64>()) {
        let ds = random_dataset(seed, 40);
        let config = IdtConfig { layers: 2, final_min_rows_leaf: 2, seed, ..IdtConfig::default() };
        let idt = learn_idt(&ds, None, FinalTarget::TrueLabels, &config).unwrap();
        let small = compact(&idt);
        small.validate().unwrap();
        prop_assert!(small.pool_len() <= idt.pool_len());
        let back = Idt::from_json(&idt.to_json().unwrap()).unwrap();
        let mut r = seeded(seed ^ 1);
        for _ in 0..30 {
            let (g, u) = random_graph(&mut r, 10, 2);
            let p = idt_predict(&idt, &g, &u).unwrap();
            prop_assert_eq!(idt_predict(&small, &g, &u).unwrap(), p);
            prop_assert_eq!(idt_predict(&back, &g, &u).unwrap(), p);
        }
    }
}

#[test]
fn learning_is_deterministic() {
    let ds = random_dataset(5, 60);
    let config = IdtConfig { seed: 9, ..IdtConfig::default() };
    let a = learn_idt(&ds, None, FinalTarget::TrueLabels, &config).unwrap();
    let b = learn_idt(&ds, None, FinalTarget::TrueLabels, &config).unwrap();
    assert_eq!(a.to_json().unwrap(), b.to_json().unwrap());
}

#[test]
fn explanations_mention_every_layer() {
    let f = parse_formula("1(A U1 > 1) > 2").unwrap();
    let c = compile_formula_to_idt(&f, 2).unwrap();
    let text = explain_text(&c.idt);
    assert!(text.contains("Layer 0") && text.contains("Layer 1") && text.contains("Layer 2 (final)"), "{text}");
    assert!(text.contains("Class 1"));
    let dot = explain_dot(&c.idt);
    assert!(dot.starts_with("digraph idt {") && dot.trim_end().ends_with('}'));
    assert!(dot.contains("cluster_final"));
}

#[test]
fn corrupt_models_are_rejected() {
    let c = compile_formula_to_idt(&parse_formula("A U0 > 0").unwrap(), 1).unwrap();
    let json = c.idt.to_json().unwrap();
    assert!(Idt::from_json(&json.replace("idt/1", "idt/9")).is_err());
    let mut bad = c.idt.clone();
    bad.layers[0].pool_start += 1;
    assert!(bad.validate().is_err());
}
