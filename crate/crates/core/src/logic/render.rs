//! Printer for the concrete syntax. `parse_formula(render_formula(f)) == f`
//! holds structurally for every formula.

use super::{Formula, Modal};

#[derive(Clone, Copy)]
struct Style {
    not: &'static str,
    and: &'static str,
    or: &'static str,
}

const ASCII: Style = Style {
    not: "!",
    and: " & ",
    or: " | ",
};

const UNICODE: Style = Style {
    not: "¬",
    and: " ∧ ",
    or: " ∨ ",
};

/// ASCII rendering accepted by the parser.
pub fn render_formula(f: &Formula) -> String {
    let mut out = String::new();
    write_formula(&mut out, f, ASCII);
    out
}

/// Rendering with `¬ ∧ ∨`, also accepted by the parser.
pub fn render_formula_unicode(f: &Formula) -> String {
    let mut out = String::new();
    write_formula(&mut out, f, UNICODE);
    out
}

/// Recognized comparison sugar.
enum Sugar<'a> {
    /// `S c = n` from `(S c > n-1) & !(S c > n)`, or `S c = 0` from `!(S c > 0)`.
    Eq(Modal, &'a Formula, u32),
    /// `S c < n+1` from `!(S c > n)`, n > 0.
    Lt(Modal, &'a Formula, u32),
    /// `S c <= p` from `!(S c > p)`.
    RatioLe(Modal, &'a Formula, super::Fraction),
}

fn sugar(f: &Formula) -> Option<Sugar<'_>> {
    match f {
        Formula::Not(inner) => match inner.as_ref() {
            Formula::CountGt { modal, child, n: 0 } => Some(Sugar::Eq(*modal, child, 0)),
            Formula::CountGt { modal, child, n } => Some(Sugar::Lt(*modal, child, n + 1)),
            Formula::RatioGt { modal, child, p } => Some(Sugar::RatioLe(*modal, child, *p)),
            _ => None,
        },
        Formula::And(a, b) => match (a.as_ref(), b.as_ref()) {
            (
                Formula::CountGt { modal: m1, child: c1, n: lo },
                Formula::Not(inner),
            ) => match inner.as_ref() {
                Formula::CountGt { modal: m2, child: c2, n: hi } if m1 == m2 && c1 == c2 && *hi == lo + 1 => {
                    Some(Sugar::Eq(*m1, c1, *hi))
                }
                _ => None,
            },
            _ => None,
        },
        _ => None,
    }
}

/// True when `f` prints as a single comparison (`S c op t`).
fn is_comparison(f: &Formula) -> bool {
    f.is_modal() || sugar(f).is_some()
}

fn write_modal_body(out: &mut String, modal: Modal, child: &Formula, style: Style) {
    out.push_str(modal.symbol());
    match child {
        Formula::Atom(_) | Formula::Top => {
            out.push(' ');
            write_formula(out, child, style);
        }
        _ => {
            out.push('(');
            write_formula(out, child, style);
            out.push(')');
        }
    }
}

fn write_formula(out: &mut String, f: &Formula, style: Style) {
    if let Some(s) = sugar(f) {
        match s {
            Sugar::Eq(m, c, n) => {
                write_modal_body(out, m, c, style);
                out.push_str(&format!(" = {n}"));
            }
            Sugar::Lt(m, c, n) => {
                write_modal_body(out, m, c, style);
                out.push_str(&format!(" < {n}"));
            }
            Sugar::RatioLe(m, c, p) => {
                write_modal_body(out, m, c, style);
                out.push_str(&format!(" <= {p}"));
            }
        }
        return;
    }
    match f {
        Formula::Atom(j) => out.push_str(&format!("U{j}")),
        Formula::Top => out.push('T'),
        Formula::CountGt { modal, child, n } => {
            write_modal_body(out, *modal, child, style);
            out.push_str(&format!(" > {n}"));
        }
        Formula::RatioGt { modal, child, p } => {
            write_modal_body(out, *modal, child, style);
            out.push_str(&format!(" > {p}"));
        }
        Formula::Not(c) => {
            out.push_str(style.not);
            match c.as_ref() {
                Formula::Atom(_) | Formula::Top | Formula::Not(_) if sugar(c).is_none() => {
                    write_formula(out, c, style)
                }
                _ => {
                    out.push('(');
                    write_formula(out, c, style);
                    out.push(')');
                }
            }
        }
        Formula::And(a, b) => {
            write_operand(out, a, style, |x| matches!(x, Formula::Or(..)));
            out.push_str(style.and);
            write_operand(out, b, style, |x| matches!(x, Formula::Or(..) | Formula::And(..)));
        }
        Formula::Or(a, b) => {
            write_operand(out, a, style, |_| false);
            out.push_str(style.or);
            write_operand(out, b, style, |x| matches!(x, Formula::Or(..)));
        }
    }
}

fn write_operand(out: &mut String, f: &Formula, style: Style, needs_parens: impl Fn(&Formula) -> bool) {
    if is_comparison(f) || (needs_parens(f) && sugar(f).is_none()) {
        out.push('(');
        write_formula(out, f, style);
        out.push(')');
    } else {
        write_formula(out, f, style);
    }
}
