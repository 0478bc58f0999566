#![allow(dead_code)]

use idt_core::graph::{FeatureMatrix, Graph};
use idt_core::logic::{Formula, Fraction, Modal};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub use idt_core::rng::rng_for;

pub fn seeded(seed: u64) -> ChaCha8Rng {
    rng_for(seed, &[0xC0FFEE])
}

/// G(n, p) with `n` in `1..=max_nodes`, random `p`, and `atoms` random
/// feature columns.
pub fn random_graph<R: Rng>(r: &mut R, max_nodes: usize, atoms: usize) -> (Graph, FeatureMatrix) {
    let n = r.gen_range(1..=max_nodes);
    let p: f64 = r.gen();
    let edges: Vec<(usize, usize)> = (0..n)
        .flat_map(|a| (a + 1..n).map(move |b| (a, b)))
        .filter(|_| r.gen_bool(p))
        .collect();
    let cols = (0..atoms).map(|_| (0..n).map(|_| r.gen_bool(0.5)).collect()).collect();
    (Graph::from_edges(n, edges).unwrap(), FeatureMatrix::from_columns(n, cols).unwrap())
}

fn fraction<R: Rng>(r: &mut R) -> Fraction {
    let den = r.gen_range(2..=6);
    Fraction::new(r.gen_range(1..den), den).unwrap()
}

fn modal_test<R: Rng>(r: &mut R, child: Formula) -> Formula {
    let modal = *Modal::ALL.choose(r).unwrap();
    if r.gen_bool(0.3) {
        Formula::ratio_gt(modal, child, fraction(r))
    } else {
        Formula::count_gt(modal, child, r.gen_range(0..4))
    }
}

/// Random formula of modal depth at most `depth` over `atoms` atoms.
pub fn random_formula<R: Rng>(r: &mut R, depth: usize, atoms: usize) -> Formula {
    random_sized(r, depth, atoms, 3)
}

fn random_sized<R: Rng>(r: &mut R, depth: usize, atoms: usize, budget: usize) -> Formula {
    let choice = r.gen_range(0..if budget == 0 { 2 } else { 6 });
    match choice {
        0 | 1 if depth == 0 || budget == 0 => {
            if r.gen_bool(0.1) {
                Formula::Top
            } else {
                Formula::Atom(r.gen_range(0..atoms))
            }
        }
        0 | 1 => {
            let child = random_sized(r, depth - 1, atoms, budget - 1);
            modal_test(r, child)
        }
        2 => Formula::not(random_sized(r, depth, atoms, budget - 1)),
        3 => Formula::and(random_sized(r, depth, atoms, budget - 1), random_sized(r, depth, atoms, budget - 1)),
        4 => Formula::or(random_sized(r, depth, atoms, budget - 1), random_sized(r, depth, atoms, budget - 1)),
        _ if depth > 0 => {
            let child = random_sized(r, depth - 1, atoms, budget - 1);
            modal_test(r, child)
        }
        _ => Formula::Atom(r.gen_range(0..atoms)),
    }
}
