//! Semantics-preserving formula simplification.
//!
//! Besides double-negation elimination and constant absorption, Boolean
//! combinations of threshold tests on one `(S, child)` pair are merged into
//! interval form. The thresholds `t1 < … < tk` split the value axis into
//! cells `[0, t1], (t1, t2], …, (tk, ∞)`; a combination is exactly a set of
//! cells, which is re-rendered as a union of runs or the negation of
//! one, whichever prints shorter.

use super::{render_formula, Formula, Fraction, Modal};

pub fn simplify(f: &Formula) -> Formula {
    match f {
        Formula::Atom(_) | Formula::Top => f.clone(),
        Formula::Not(c) => match simplify(c) {
            Formula::Not(inner) => *inner,
            s => Formula::not(s),
        },
        Formula::CountGt { modal, child, n } => {
            let child = simplify(child);
            if *modal == Modal::Zero || is_bottom(&child) {
                Formula::bottom()
            } else {
                Formula::count_gt(*modal, child, *n)
            }
        }
        Formula::RatioGt { modal, child, p } => {
            let child = simplify(child);
            if *modal == Modal::Zero || is_bottom(&child) {
                Formula::bottom()
            } else {
                Formula::ratio_gt(*modal, child, *p)
            }
        }
        Formula::And(..) => combine(f, Op::And),
        Formula::Or(..) => combine(f, Op::Or),
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Op {
    And,
    Or,
}

fn is_bottom(f: &Formula) -> bool {
    matches!(f, Formula::Not(x) if **x == Formula::Top)
}

/// Operand list of a maximal chain of the same connective.
fn flatten<'a>(f: &'a Formula, op: Op, out: &mut Vec<&'a Formula>) {
    match (f, op) {
        (Formula::And(a, b), Op::And) | (Formula::Or(a, b), Op::Or) => {
            flatten(a, op, out);
            flatten(b, op, out);
        }
        _ => out.push(f),
    }
}

fn combine(f: &Formula, op: Op) -> Formula {
    let mut raw = Vec::new();
    flatten(f, op, &mut raw);
    let mut operands = Vec::new();
    for r in raw {
        let s = simplify(r);
        // simplified operands may themselves be chains of the same connective
        let mut inner = Vec::new();
        flatten(&s, op, &mut inner);
        operands.extend(inner.into_iter().cloned());
    }
    let operands = absorb(operands, op);
    let merged = merge_intervals(operands, op);
    let operands = absorb(merged, op);
    rebuild(operands, op)
}

/// Removes identities, detects annihilators, duplicates and complements.
fn absorb(operands: Vec<Formula>, op: Op) -> Vec<Formula> {
    let (identity_is_top, annihilator_is_top) = match op {
        Op::And => (true, false),
        Op::Or => (false, true),
    };
    let annihilator = || if annihilator_is_top { Formula::Top } else { Formula::bottom() };
    let mut out: Vec<Formula> = Vec::with_capacity(operands.len());
    for x in operands {
        let is_top = x == Formula::Top;
        let is_bot = is_bottom(&x);
        if (is_top && identity_is_top) || (is_bot && !identity_is_top) {
            continue;
        }
        if (is_top && annihilator_is_top) || (is_bot && !annihilator_is_top) {
            return vec![annihilator()];
        }
        if out.contains(&x) {
            continue;
        }
        let complement = match &x {
            Formula::Not(inner) => out.iter().any(|y| y == inner.as_ref()),
            _ => out.iter().any(|y| matches!(y, Formula::Not(inner) if inner.as_ref() == &x)),
        };
        if complement {
            return vec![annihilator()];
        }
        out.push(x);
    }
    out
}

fn rebuild(operands: Vec<Formula>, op: Op) -> Formula {
    match op {
        Op::And => Formula::all(operands),
        Op::Or => Formula::any(operands),
    }
}

/// Threshold-test family: every comparison in a pure combination shares it.
#[derive(Clone, PartialEq, Eq)]
struct Key<'a> {
    modal: Modal,
    child: &'a Formula,
    relative: bool,
}

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Bound {
    Count(u32),
    Ratio(Fraction),
}

fn pure_key(f: &Formula) -> Option<Key<'_>> {
    match f {
        Formula::CountGt { modal, child, .. } => Some(Key {
            modal: *modal,
            child,
            relative: false,
        }),
        Formula::RatioGt { modal, child, .. } => Some(Key {
            modal: *modal,
            child,
            relative: true,
        }),
        Formula::Not(c) => pure_key(c),
        Formula::And(a, b) | Formula::Or(a, b) => {
            let ka = pure_key(a)?;
            let kb = pure_key(b)?;
            (ka == kb).then_some(ka)
        }
        Formula::Atom(_) | Formula::Top => None,
    }
}

fn collect_bounds(f: &Formula, out: &mut Vec<Bound>) {
    match f {
        Formula::CountGt { n, .. } => out.push(Bound::Count(*n)),
        Formula::RatioGt { p, .. } => out.push(Bound::Ratio(*p)),
        Formula::Not(c) => collect_bounds(c, out),
        Formula::And(a, b) | Formula::Or(a, b) => {
            collect_bounds(a, out);
            collect_bounds(b, out);
        }
        _ => {}
    }
}

/// Truth of a pure combination on cell `cell` (cell `i` lies above exactly
/// the first `i` bounds).
fn holds_in_cell(f: &Formula, bounds: &[Bound], cell: usize) -> bool {
    match f {
        Formula::CountGt { n, .. } => {
            let pos = bounds.binary_search(&Bound::Count(*n)).expect("collected");
            cell > pos
        }
        Formula::RatioGt { p, .. } => {
            let pos = bounds.binary_search(&Bound::Ratio(*p)).expect("collected");
            cell > pos
        }
        Formula::Not(c) => !holds_in_cell(c, bounds, cell),
        Formula::And(a, b) => holds_in_cell(a, bounds, cell) && holds_in_cell(b, bounds, cell),
        Formula::Or(a, b) => holds_in_cell(a, bounds, cell) || holds_in_cell(b, bounds, cell),
        Formula::Top => true,
        Formula::Atom(_) => unreachable!("pure combinations contain no atoms"),
    }
}

fn merge_intervals(operands: Vec<Formula>, op: Op) -> Vec<Formula> {
    // group operands by key, remembering the first position of each group
    let keys: Vec<Option<Key<'_>>> = operands.iter().map(pure_key).collect();
    let mut groups: Vec<(usize, Vec<usize>)> = Vec::new();
    let mut slots: Vec<Option<usize>> = vec![None; operands.len()];
    for (i, k) in keys.iter().enumerate() {
        let Some(k) = k else { continue };
        match groups.iter_mut().find(|(first, _)| keys[*first].as_ref() == Some(k)) {
            Some((_, members)) => members.push(i),
            None => {
                slots[i] = Some(groups.len());
                groups.push((i, vec![i]));
            }
        }
    }
    let mut out = Vec::with_capacity(operands.len());
    for (i, f) in operands.iter().enumerate() {
        match (&keys[i], slots[i]) {
            (None, _) => out.push(f.clone()),
            (Some(_), None) => {} // merged into an earlier group
            (Some(key), Some(g)) => {
                let members: Vec<Formula> = groups[g].1.iter().map(|&m| operands[m].clone()).collect();
                let combined = rebuild(members, op);
                out.push(canonical_interval(&combined, key));
            }
        }
    }
    out
}

fn canonical_interval(f: &Formula, key: &Key<'_>) -> Formula {
    let mut bounds = Vec::new();
    collect_bounds(f, &mut bounds);
    bounds.sort();
    bounds.dedup();
    let cells: Vec<bool> = (0..=bounds.len()).map(|c| holds_in_cell(f, &bounds, c)).collect();

    // drop bounds separating cells with equal membership
    let mut kept_bounds = Vec::new();
    let mut kept_cells = vec![cells[0]];
    for (i, b) in bounds.iter().enumerate() {
        if cells[i + 1] != *kept_cells.last().expect("non-empty") {
            kept_bounds.push(*b);
            kept_cells.push(cells[i + 1]);
        }
    }
    if kept_bounds.is_empty() {
        return if kept_cells[0] { Formula::Top } else { Formula::bottom() };
    }

    let test = |b: Bound| match b {
        Bound::Count(n) => Formula::count_gt(key.modal, key.child.clone(), n),
        Bound::Ratio(p) => Formula::ratio_gt(key.modal, key.child.clone(), p),
    };
    // cells now alternate; each selected cell is one run
    let runs = |select: bool| -> Vec<Formula> {
        kept_cells
            .iter()
            .enumerate()
            .filter(|(_, &c)| c == select)
            .map(|(i, _)| {
                let lower = (i > 0).then(|| test(kept_bounds[i - 1]));
                let upper = (i < kept_bounds.len()).then(|| Formula::not(test(kept_bounds[i])));
                match (lower, upper) {
                    (Some(l), Some(u)) => Formula::and(l, u),
                    (Some(l), None) => l,
                    (None, Some(u)) => u,
                    (None, None) => Formula::Top,
                }
            })
            .collect()
    };
    // prefer whichever form prints shorter (sugar such as `S c = n` counts)
    let positive = Formula::any(runs(true));
    let negative = Formula::not(Formula::any(runs(false)));
    if render_formula(&positive).len() <= render_formula(&negative).len() {
        positive
    } else {
        negative
    }
}
