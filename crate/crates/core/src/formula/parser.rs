use super::Formula;
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Ident(String),
    LParen,
    RParen,
    Not,
    And,
    Or,
    End,
}

const KEYWORDS: &[&str] = &["FPinf", "FP", "F", "X", "U", "R", "true", "false"];

pub(crate) fn is_keyword(s: &str) -> bool {
    KEYWORDS.contains(&s)
}

/// Valid atom name: `[A-Za-z_][A-Za-z0-9_]*` and not a keyword.
pub fn is_atom_name(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_') && !is_keyword(s)
}

fn lex(text: &str) -> Result<Vec<(Tok, usize)>> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        let tok = match c {
            b' ' | b'\t' | b'\n' | b'\r' => {
                i += 1;
                continue;
            }
            b'(' => Tok::LParen,
            b')' => Tok::RParen,
            b'!' => Tok::Not,
            b'&' => Tok::And,
            b'|' => Tok::Or,
            c if c.is_ascii_alphabetic() || c == b'_' => {
                let start = i;
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                out.push((Tok::Ident(text[start..i].to_string()), start));
                continue;
            }
            _ => {
                let ch = text[i..].chars().next().unwrap_or('?');
                return Err(Error::Syntax {
                    pos: i,
                    msg: format!("unexpected character `{ch}`"),
                });
            }
        };
        out.push((tok, i));
        i += 1;
    }
    out.push((Tok::End, text.len()));
    Ok(out)
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    at: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.at].0
    }

    fn pos(&self) -> usize {
        self.toks[self.at].1
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.at].0.clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        t
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T> {
        Err(Error::Syntax {
            pos: self.pos(),
            msg: msg.into(),
        })
    }

    // U and R: right associative, weakest.
    fn binary(&mut self) -> Result<Formula> {
        let lhs = self.disjunction()?;
        match self.peek() {
            Tok::Ident(k) if k == "U" || k == "R" => {
                let until = k == "U";
                self.bump();
                let rhs = self.binary()?;
                Ok(if until {
                    Formula::Until(Box::new(lhs), Box::new(rhs))
                } else {
                    Formula::Release(Box::new(lhs), Box::new(rhs))
                })
            }
            _ => Ok(lhs),
        }
    }

    fn disjunction(&mut self) -> Result<Formula> {
        let mut items = vec![self.conjunction()?];
        while *self.peek() == Tok::Or {
            self.bump();
            items.push(self.conjunction()?);
        }
        Ok(if items.len() == 1 { items.pop().unwrap() } else { Formula::Or(items) })
    }

    fn conjunction(&mut self) -> Result<Formula> {
        let mut items = vec![self.unary()?];
        while *self.peek() == Tok::And {
            self.bump();
            items.push(self.unary()?);
        }
        Ok(if items.len() == 1 { items.pop().unwrap() } else { Formula::And(items) })
    }

    fn unary(&mut self) -> Result<Formula> {
        let pos = self.pos();
        match self.peek().clone() {
            Tok::Not => {
                self.bump();
                match self.unary()? {
                    Formula::Atom(a) => Ok(Formula::NegAtom(a)),
                    Formula::True => Ok(Formula::False),
                    Formula::False => Ok(Formula::True),
                    _ => Err(Error::NegationBelowNonAtom { pos }),
                }
            }
            Tok::Ident(k) if matches!(k.as_str(), "FPinf" | "FP" | "F" | "X") => {
                self.bump();
                let body = Box::new(self.unary()?);
                Ok(match k.as_str() {
                    "FPinf" => Formula::PromptMullerF(body),
                    "FP" => Formula::PromptF(body),
                    "F" => Formula::Finally(body),
                    _ => Formula::Next(body),
                })
            }
            _ => self.primary(),
        }
    }

    fn primary(&mut self) -> Result<Formula> {
        match self.peek().clone() {
            Tok::LParen => {
                self.bump();
                let f = self.binary()?;
                if *self.peek() != Tok::RParen {
                    return self.err("expected `)`");
                }
                self.bump();
                Ok(f)
            }
            Tok::Ident(k) if k == "true" => {
                self.bump();
                Ok(Formula::True)
            }
            Tok::Ident(k) if k == "false" => {
                self.bump();
                Ok(Formula::False)
            }
            Tok::Ident(k) if !is_keyword(&k) => {
                self.bump();
                Ok(Formula::Atom(k))
            }
            Tok::Ident(k) => self.err(format!("keyword `{k}` cannot start an operand")),
            Tok::End => self.err("unexpected end of input"),
            t => self.err(format!("unexpected token {t:?}")),
        }
    }
}

/// Parses the concrete formula syntax.
///
/// Precedence from tightest: `!`, the prefix operators `FPinf FP F X`, `&`,
/// `|`, then the right-associative `U` and `R`.
pub fn parse_formula(text: &str) -> Result<Formula> {
    if text.trim().is_empty() {
        return Err(Error::Syntax {
            pos: 0,
            msg: "empty formula".into(),
        });
    }
    let mut p = Parser {
        toks: lex(text)?,
        at: 0,
    };
    let f = p.binary()?;
    if *p.peek() != Tok::End {
        return p.err("trailing input");
    }
    Ok(f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::render_formula;
    use Formula::*;

    fn fp(f: Formula) -> Formula {
        PromptMullerF(Box::new(f))
    }

    #[test]
    fn either_infinitely_often() {
        assert_eq!(
            parse_formula("FPinf A | FPinf B").unwrap(),
            Or(vec![fp(Formula::atom("A")), fp(Formula::atom("B"))])
        );
    }

    #[test]
    fn constants() {
        assert_eq!(parse_formula("true").unwrap(), True);
        assert_eq!(parse_formula("!true").unwrap(), False);
    }

    #[test]
    fn initialized_query_grant() {
        let f = parse_formula("F (FPinf Query & FPinf Grant)").unwrap();
        assert_eq!(
            f,
            Finally(Box::new(And(vec![fp(Formula::atom("Query")), fp(Formula::atom("Grant"))])))
        );
        assert_eq!(parse_formula(&render_formula(&f)).unwrap(), f);
    }

    #[test]
    fn precedence_and_associativity() {
        let f = parse_formula("a | b & !c U d U e").unwrap();
        let expect = Until(
            Box::new(Or(vec![
                Formula::atom("a"),
                And(vec![Formula::atom("b"), NegAtom("c".into())]),
            ])),
            Box::new(Until(Box::new(Formula::atom("d")), Box::new(Formula::atom("e")))),
        );
        assert_eq!(f, expect);
        // prefix operators bind tighter than binary ones
        assert_eq!(
            parse_formula("X a & b").unwrap(),
            And(vec![Next(Box::new(Formula::atom("a"))), Formula::atom("b")])
        );
    }

    #[test]
    fn errors() {
        assert!(matches!(parse_formula(""), Err(Error::Syntax { .. })));
        assert!(matches!(parse_formula("   "), Err(Error::Syntax { .. })));
        assert!(matches!(parse_formula("a |"), Err(Error::Syntax { .. })));
        assert!(matches!(parse_formula("(a"), Err(Error::Syntax { pos: 2, .. })));
        assert!(matches!(parse_formula("a b"), Err(Error::Syntax { pos: 2, .. })));
        assert!(matches!(parse_formula("a # b"), Err(Error::Syntax { pos: 2, .. })));
        assert!(matches!(parse_formula("U a"), Err(Error::Syntax { .. })));
        assert!(matches!(
            parse_formula("!FPinf a"),
            Err(Error::NegationBelowNonAtom { pos: 0 })
        ));
        assert!(matches!(
            parse_formula("b & !(a | c)"),
            Err(Error::NegationBelowNonAtom { pos: 4 })
        ));
        assert!(matches!(parse_formula("!!a"), Err(Error::NegationBelowNonAtom { .. })));
    }

    #[test]
    fn atom_names() {
        assert!(is_atom_name("_x1"));
        assert!(is_atom_name("Fx"));
        assert!(!is_atom_name("FP"));
        assert!(!is_atom_name("1a"));
        assert!(!is_atom_name("a-b"));
        assert!(!is_atom_name(""));
    }
}
