//! Recursive-descent parser for the concrete formula syntax.
//!
//! ```text
//! formula := or
//! or      := and ('|' and)*
//! and     := unary ('&' unary)*
//! unary   := '!' unary | '(' formula ')' | atom | modal
//! atom    := 'U' nat | 'T'
//! modal   := S '(' formula ')' cmp | S atom cmp
//! S       := '0' | '1' | 'I' | 'A' | '1-I' | '1-A' | 'I+A' | '1-I-A'
//! cmp     := ('>' | '<' | '=' | '>=' | '<=') number
//! ```
//!
//! `¬ ∧ ∨ ⊤` are accepted for `! & | T`. A threshold written as a decimal
//! or `a/b` fraction is relative and must lie in (0, 1); relative
//! comparisons support `>` and `<=` only.

use super::{Formula, Fraction, Modal};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Cmp {
    Gt,
    Ge,
    Lt,
    Le,
    Eq,
}

enum Threshold {
    Count(u32),
    Ratio(Fraction),
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
}

pub fn parse_formula(text: &str) -> Result<Formula> {
    let mut p = Parser { src: text, pos: 0 };
    let f = p.or()?;
    p.skip_ws();
    if p.pos < p.src.len() {
        return Err(p.error("unexpected trailing input"));
    }
    Ok(f)
}

impl<'a> Parser<'a> {
    fn error(&self, message: impl Into<String>) -> Error {
        Error::Syntax {
            offset: self.pos,
            message: message.into(),
        }
    }

    fn rest(&self) -> &'a str {
        &self.src[self.pos..]
    }

    fn skip_ws(&mut self) {
        let trimmed = self.rest().trim_start();
        self.pos = self.src.len() - trimmed.len();
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.rest().chars().next()
    }

    /// Consumes the first of `options` that prefixes the remaining input.
    fn eat_any(&mut self, options: &[&str]) -> bool {
        self.skip_ws();
        for o in options {
            if self.rest().starts_with(o) {
                self.pos += o.len();
                return true;
            }
        }
        false
    }

    fn expect(&mut self, token: &str) -> Result<()> {
        if self.eat_any(&[token]) {
            Ok(())
        } else {
            Err(self.error(format!("expected {token:?}")))
        }
    }

    fn or(&mut self) -> Result<Formula> {
        let mut f = self.and()?;
        while self.eat_any(&["|", "∨"]) {
            f = Formula::or(f, self.and()?);
        }
        Ok(f)
    }

    fn and(&mut self) -> Result<Formula> {
        let mut f = self.unary()?;
        while self.eat_any(&["&", "∧"]) {
            f = Formula::and(f, self.unary()?);
        }
        Ok(f)
    }

    fn unary(&mut self) -> Result<Formula> {
        match self.peek() {
            Some('!') | Some('¬') => {
                self.eat_any(&["!", "¬"]);
                Ok(Formula::not(self.unary()?))
            }
            Some('(') => {
                self.pos += 1;
                let f = self.or()?;
                self.expect(")")?;
                Ok(f)
            }
            Some('U') | Some('T') | Some('⊤') => self.atom(),
            Some('0') | Some('1') | Some('I') | Some('A') => self.modal(),
            Some(c) => Err(self.error(format!("unexpected character {c:?}"))),
            None => Err(self.error("unexpected end of input")),
        }
    }

    fn atom(&mut self) -> Result<Formula> {
        if self.eat_any(&["T", "⊤"]) {
            return Ok(Formula::Top);
        }
        self.expect("U")?;
        let _ = self.eat_any(&["_"]);
        self.skip_ws();
        let start = self.pos;
        let digits = self.rest().chars().take_while(char::is_ascii_digit).count();
        if digits == 0 {
            return Err(self.error("expected atom index after 'U'"));
        }
        self.pos += digits;
        self.src[start..self.pos]
            .parse()
            .map(Formula::Atom)
            .map_err(|_| Error::Syntax {
                offset: start,
                message: "atom index too large".into(),
            })
    }

    fn modal_symbol(&mut self) -> Result<Modal> {
        let start = self.pos;
        let m = if self.eat_any(&["0"]) {
            Modal::Zero
        } else if self.eat_any(&["1"]) {
            let save = self.pos;
            if self.eat_any(&["-"]) {
                if self.eat_any(&["I"]) {
                    let save = self.pos;
                    if self.eat_any(&["-"]) && self.eat_any(&["A"]) {
                        Modal::OneMinusIdMinusAdj
                    } else {
                        self.pos = save;
                        Modal::OneMinusId
                    }
                } else if self.eat_any(&["A"]) {
                    Modal::OneMinusAdj
                } else {
                    self.pos = save;
                    return Err(self.error("expected 'I' or 'A' after '1-'"));
                }
            } else {
                Modal::One
            }
        } else if self.eat_any(&["I"]) {
            let save = self.pos;
            if self.eat_any(&["+"]) {
                if self.eat_any(&["A"]) {
                    Modal::IdPlusAdj
                } else {
                    self.pos = save;
                    return Err(self.error("expected 'A' after 'I+'"));
                }
            } else {
                Modal::Id
            }
        } else if self.eat_any(&["A"]) {
            Modal::Adj
        } else {
            self.pos = start;
            return Err(self.error("expected modal parameter"));
        };
        Ok(m)
    }

    fn modal(&mut self) -> Result<Formula> {
        let modal = self.modal_symbol()?;
        let child = match self.peek() {
            Some('(') => {
                self.pos += 1;
                let f = self.or()?;
                self.expect(")")?;
                f
            }
            Some('U') | Some('T') | Some('⊤') => self.atom()?,
            _ => return Err(self.error("expected '(' or an atom after modal parameter")),
        };
        let cmp_pos = {
            self.skip_ws();
            self.pos
        };
        let cmp = if self.eat_any(&[">=", "≥"]) {
            Cmp::Ge
        } else if self.eat_any(&["<=", "≤"]) {
            Cmp::Le
        } else if self.eat_any(&[">"]) {
            Cmp::Gt
        } else if self.eat_any(&["<"]) {
            Cmp::Lt
        } else if self.eat_any(&["="]) {
            Cmp::Eq
        } else {
            return Err(self.error("expected comparison operator"));
        };
        let threshold = self.threshold()?;
        desugar(modal, child, cmp, threshold).map_err(|message| Error::Syntax {
            offset: cmp_pos,
            message,
        })
    }

    fn threshold(&mut self) -> Result<Threshold> {
        self.skip_ws();
        let start = self.pos;
        if self.rest().starts_with('-') {
            return Err(self.error("negative threshold"));
        }
        let len = self
            .rest()
            .char_indices()
            .take_while(|(_, c)| c.is_ascii_digit() || *c == '.' || *c == '/')
            .map(|(i, c)| i + c.len_utf8())
            .last()
            .unwrap_or(0);
        if len == 0 {
            return Err(self.error("expected threshold"));
        }
        self.pos += len;
        let text = &self.src[start..self.pos];
        let err = |m: String| Error::Syntax { offset: start, message: m };
        if text.contains('.') || text.contains('/') {
            let p: Fraction = text.parse().map_err(|e: super::fraction::ParseFractionError| err(e.0))?;
            if !p.is_open_unit() {
                return Err(err(format!("relative threshold {text} must lie strictly between 0 and 1")));
            }
            Ok(Threshold::Ratio(p))
        } else {
            text.parse()
                .map(Threshold::Count)
                .map_err(|_| err(format!("invalid count {text:?}")))
        }
    }
}

/// Rewrites sugared comparisons into the `>`-only core:
/// `< n ≡ ¬(> n-1)`, `= n ≡ (> n-1) ∧ ¬(> n)`, `>= n ≡ > n-1`, `<= n ≡ ¬(> n)`.
fn desugar(modal: Modal, child: Formula, cmp: Cmp, t: Threshold) -> std::result::Result<Formula, String> {
    let gt = |n: u32, c: Formula| Formula::count_gt(modal, c, n);
    Ok(match t {
        Threshold::Count(n) => match cmp {
            Cmp::Gt => gt(n, child),
            Cmp::Le => Formula::not(gt(n, child)),
            Cmp::Ge if n == 0 => Formula::Top,
            Cmp::Ge => gt(n - 1, child),
            Cmp::Lt if n == 0 => Formula::bottom(),
            Cmp::Lt => Formula::not(gt(n - 1, child)),
            Cmp::Eq if n == 0 => Formula::not(gt(0, child)),
            Cmp::Eq => Formula::and(gt(n - 1, child.clone()), Formula::not(gt(n, child))),
        },
        Threshold::Ratio(p) => match cmp {
            Cmp::Gt => Formula::ratio_gt(modal, child, p),
            Cmp::Le => Formula::not(Formula::ratio_gt(modal, child, p)),
            _ => return Err("relative thresholds support only '>' and '<='".into()),
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn adj_u1(n: u32) -> Formula {
        Formula::count_gt(Modal::Adj, Formula::Atom(1), n)
    }

    #[test]
    fn nested_equality_example() {
        let f = parse_formula("A(!(A U1 = 1)) > 1").unwrap();
        let eq1 = Formula::and(adj_u1(0), Formula::not(adj_u1(1)));
        assert_eq!(f, Formula::count_gt(Modal::Adj, Formula::not(eq1), 1));
    }

    #[test]
    fn relative_threshold() {
        assert_eq!(
            parse_formula("1 U1 > 0.5").unwrap(),
            Formula::ratio_gt(Modal::One, Formula::Atom(1), Fraction::new(1, 2).unwrap())
        );
    }

    #[test]
    fn terminals_and_aliases() {
        assert_eq!(parse_formula("T").unwrap(), Formula::Top);
        assert_eq!(parse_formula("⊤").unwrap(), Formula::Top);
        assert_eq!(
            parse_formula("¬U0 ∧ U1 ∨ U2").unwrap(),
            parse_formula("(!U0 & U1) | U2").unwrap()
        );
        assert_eq!(parse_formula("AU_1 > 0").unwrap(), adj_u1(0));
    }

    #[test]
    fn all_modal_symbols() {
        for m in Modal::ALL {
            let text = format!("{} T > 2", m.symbol());
            assert_eq!(parse_formula(&text).unwrap(), Formula::count_gt(m, Formula::Top, 2), "{text}");
            let spaced = format!("{} ( U0 ) > 2", m.symbol().replace('-', " - ").replace('+', " + "));
            assert_eq!(
                parse_formula(&spaced).unwrap(),
                Formula::count_gt(m, Formula::Atom(0), 2),
                "{spaced}"
            );
        }
    }

    #[test]
    fn sugar_edge_cases() {
        assert_eq!(parse_formula("A U1 < 0").unwrap(), Formula::bottom());
        assert_eq!(parse_formula("A U1 >= 0").unwrap(), Formula::Top);
        assert_eq!(parse_formula("A U1 = 0").unwrap(), Formula::not(adj_u1(0)));
        assert_eq!(parse_formula("A U1 <= 3").unwrap(), Formula::not(adj_u1(3)));
        assert_eq!(parse_formula("A U1 >= 3").unwrap(), adj_u1(2));
        assert_eq!(parse_formula("A U1 < 4").unwrap(), Formula::not(adj_u1(3)));
    }

    #[test]
    fn errors_carry_offsets() {
        match parse_formula("U0 & ").unwrap_err() {
            Error::Syntax { offset, .. } => assert_eq!(offset, 5),
            e => panic!("{e}"),
        }
        assert!(parse_formula("1 U1 > 1.0").is_err());
        assert!(parse_formula("1 U1 > 0.0").is_err());
        assert!(parse_formula("A U1 > -1").is_err());
        assert!(parse_formula("1 U1 < 0.5").is_err());
        assert!(parse_formula("A U1").is_err());
        assert!(parse_formula("(U0").is_err());
        assert!(parse_formula("U0 U1").is_err());
    }
}
