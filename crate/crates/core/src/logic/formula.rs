use std::fmt;

use serde::{Deserialize, Serialize};

use super::{Fraction, Modal};

/// Formula of counting modal logic with relative thresholds.
///
/// Only `>` comparisons are represented; `<`, `=`, `>=`, `<=` are sugar
/// handled by the parser and printer.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Formula {
    Atom(usize),
    Top,
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    /// More than `n` vertices of `ε_S(v)` satisfy `child`.
    CountGt { modal: Modal, child: Box<Formula>, n: u32 },
    /// More than `p·|ε_S(v)|` vertices of `ε_S(v)` satisfy `child`.
    RatioGt { modal: Modal, child: Box<Formula>, p: Fraction },
}

impl Formula {
    pub fn atom(j: usize) -> Self {
        Formula::Atom(j)
    }

    pub fn bottom() -> Self {
        Formula::Not(Box::new(Formula::Top))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(f: Formula) -> Self {
        Formula::Not(Box::new(f))
    }

    pub fn and(a: Formula, b: Formula) -> Self {
        Formula::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Formula, b: Formula) -> Self {
        Formula::Or(Box::new(a), Box::new(b))
    }

    pub fn count_gt(modal: Modal, child: Formula, n: u32) -> Self {
        Formula::CountGt {
            modal,
            child: Box::new(child),
            n,
        }
    }

    /// Panics unless `p` lies strictly between 0 and 1.
    pub fn ratio_gt(modal: Modal, child: Formula, p: Fraction) -> Self {
        assert!(p.is_open_unit(), "relative threshold {p} outside (0, 1)");
        Formula::RatioGt {
            modal,
            child: Box::new(child),
            p,
        }
    }

    /// Left-folded conjunction; empty input gives `T`.
    pub fn all(items: impl IntoIterator<Item = Formula>) -> Self {
        items.into_iter().reduce(Formula::and).unwrap_or(Formula::Top)
    }

    /// Left-folded disjunction; empty input gives `!T`.
    pub fn any(items: impl IntoIterator<Item = Formula>) -> Self {
        items.into_iter().reduce(Formula::or).unwrap_or_else(Formula::bottom)
    }

    /// Maximal nesting of modal comparisons.
    pub fn depth(&self) -> usize {
        match self {
            Formula::Atom(_) | Formula::Top => 0,
            Formula::Not(c) => c.depth(),
            Formula::And(a, b) | Formula::Or(a, b) => a.depth().max(b.depth()),
            Formula::CountGt { child, .. } | Formula::RatioGt { child, .. } => 1 + child.depth(),
        }
    }

    /// Largest atom index plus one (0 when no atoms occur).
    pub fn atom_bound(&self) -> usize {
        match self {
            Formula::Atom(j) => j + 1,
            Formula::Top => 0,
            Formula::Not(c) => c.atom_bound(),
            Formula::And(a, b) | Formula::Or(a, b) => a.atom_bound().max(b.atom_bound()),
            Formula::CountGt { child, .. } | Formula::RatioGt { child, .. } => child.atom_bound(),
        }
    }

    /// Number of AST nodes.
    pub fn size(&self) -> usize {
        match self {
            Formula::Atom(_) | Formula::Top => 1,
            Formula::Not(c) => 1 + c.size(),
            Formula::And(a, b) | Formula::Or(a, b) => 1 + a.size() + b.size(),
            Formula::CountGt { child, .. } | Formula::RatioGt { child, .. } => 1 + child.size(),
        }
    }

    pub fn is_modal(&self) -> bool {
        matches!(self, Formula::CountGt { .. } | Formula::RatioGt { .. })
    }
}

/// Maximal nesting of modal comparisons.
pub fn formula_depth(f: &Formula) -> usize {
    f.depth()
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&super::render_formula(self))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::parse_formula;

    #[test]
    fn depth_examples() {
        assert_eq!(parse_formula("A(!(A U1 = 1)) > 1").unwrap().depth(), 2);
        assert_eq!(Formula::Atom(0).depth(), 0);
        assert_eq!(parse_formula("1(A(A U0 > 6) > 0.5) > 0.5").unwrap().depth(), 3);
    }

    #[test]
    #[should_panic]
    fn ratio_rejects_closed_endpoint() {
        Formula::ratio_gt(Modal::One, Formula::Top, Fraction::new(1, 1).unwrap());
    }
}
