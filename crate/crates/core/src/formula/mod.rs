//! Prompt-LTL formulas: syntax tree, concrete syntax, fragment classification
//! and the conjunction-free normal forms used by the checkers.

mod normal;
mod parser;

use std::fmt;

pub use normal::{
    build_tree, canonicalize, decompositions, filtrations, CanonicalFormula, FormulaTree,
    Literal, StateFormula, TreeNode,
};
pub use parser::{is_atom_name, parse_formula};

/// Prompt-LTL syntax tree. Negation only ever wraps an atom.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Formula {
    True,
    False,
    Atom(String),
    NegAtom(String),
    Or(Vec<Formula>),
    And(Vec<Formula>),
    Next(Box<Formula>),
    Until(Box<Formula>, Box<Formula>),
    Release(Box<Formula>, Box<Formula>),
    /// `FP φ`: φ holds within `k` steps.
    PromptF(Box<Formula>),
    /// `FPinf φ`: from every position, φ holds within `k` steps.
    PromptMullerF(Box<Formula>),
    Finally(Box<Formula>),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum FragmentClass {
    /// Literals, `&`, `|` and `FPinf` only.
    PromptMuller,
    /// Prompt Muller formula with every atom under some `FPinf`.
    PositivePromptMuller,
    /// `F ψ` with ψ positive prompt Muller.
    InitializedMuller,
    /// Anything else; only the bounded evaluator accepts it.
    EvalOnly,
}

impl FragmentClass {
    pub fn name(self) -> &'static str {
        match self {
            FragmentClass::PromptMuller => "prompt-muller",
            FragmentClass::PositivePromptMuller => "positive-prompt-muller",
            FragmentClass::InitializedMuller => "initialized-muller",
            FragmentClass::EvalOnly => "eval-only",
        }
    }

    /// True for the two classes accepted by the universal Muller procedure.
    pub fn is_muller(self) -> bool {
        matches!(
            self,
            FragmentClass::PromptMuller | FragmentClass::PositivePromptMuller
        )
    }

    pub fn from_name(name: &str) -> Option<Self> {
        [
            FragmentClass::PromptMuller,
            FragmentClass::PositivePromptMuller,
            FragmentClass::InitializedMuller,
            FragmentClass::EvalOnly,
        ]
        .into_iter()
        .find(|c| c.name() == name)
    }
}

impl fmt::Display for FragmentClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl Formula {
    pub fn atom(name: &str) -> Formula {
        Formula::Atom(name.to_string())
    }

    pub fn fpinf(body: Formula) -> Formula {
        Formula::PromptMullerF(Box::new(body))
    }

    /// Only literals, constants, `&`, `|` and `FPinf`.
    pub fn is_muller(&self) -> bool {
        match self {
            Formula::True | Formula::False | Formula::Atom(_) | Formula::NegAtom(_) => true,
            Formula::Or(cs) | Formula::And(cs) => cs.iter().all(Formula::is_muller),
            Formula::PromptMullerF(b) => b.is_muller(),
            _ => false,
        }
    }

    pub fn is_state_formula(&self) -> bool {
        match self {
            Formula::True | Formula::False | Formula::Atom(_) | Formula::NegAtom(_) => true,
            Formula::Or(cs) | Formula::And(cs) => cs.iter().all(Formula::is_state_formula),
            _ => false,
        }
    }

    fn atoms_guarded(&self, guarded: bool) -> bool {
        match self {
            Formula::True | Formula::False => true,
            Formula::Atom(_) | Formula::NegAtom(_) => guarded,
            Formula::Or(cs) | Formula::And(cs) => cs.iter().all(|c| c.atoms_guarded(guarded)),
            Formula::PromptMullerF(b) => b.atoms_guarded(true),
            _ => false,
        }
    }

    pub fn contains_and(&self) -> bool {
        match self {
            Formula::And(_) => true,
            Formula::Or(cs) => cs.iter().any(Formula::contains_and),
            Formula::Next(b)
            | Formula::PromptF(b)
            | Formula::PromptMullerF(b)
            | Formula::Finally(b) => b.contains_and(),
            Formula::Until(l, r) | Formula::Release(l, r) => l.contains_and() || r.contains_and(),
            _ => false,
        }
    }

    /// Number of `FPinf` occurrences.
    pub fn count_fpinf(&self) -> usize {
        match self {
            Formula::PromptMullerF(b) => 1 + b.count_fpinf(),
            Formula::Or(cs) | Formula::And(cs) => cs.iter().map(Formula::count_fpinf).sum(),
            Formula::Next(b) | Formula::PromptF(b) | Formula::Finally(b) => b.count_fpinf(),
            Formula::Until(l, r) | Formula::Release(l, r) => l.count_fpinf() + r.count_fpinf(),
            _ => 0,
        }
    }

    /// Number of syntax-tree nodes.
    pub fn size(&self) -> usize {
        match self {
            Formula::Or(cs) | Formula::And(cs) => 1 + cs.iter().map(Formula::size).sum::<usize>(),
            Formula::Next(b) | Formula::PromptF(b) | Formula::PromptMullerF(b) | Formula::Finally(b) => {
                1 + b.size()
            }
            Formula::Until(l, r) | Formula::Release(l, r) => 1 + l.size() + r.size(),
            _ => 1,
        }
    }

    fn precedence(&self) -> u8 {
        match self {
            Formula::Until(..) | Formula::Release(..) => 0,
            Formula::Or(_) => 1,
            Formula::And(_) => 2,
            Formula::NegAtom(_)
            | Formula::Next(_)
            | Formula::PromptF(_)
            | Formula::PromptMullerF(_)
            | Formula::Finally(_) => 3,
            _ => 4,
        }
    }

    fn write_at(&self, min: u8, out: &mut String) {
        if self.precedence() < min {
            out.push('(');
            self.write_at(0, out);
            out.push(')');
            return;
        }
        let unary = |op: &str, body: &Formula, out: &mut String| {
            out.push_str(op);
            out.push(' ');
            body.write_at(3, out);
        };
        match self {
            Formula::True => out.push_str("true"),
            Formula::False => out.push_str("false"),
            Formula::Atom(a) => out.push_str(a),
            Formula::NegAtom(a) => {
                out.push('!');
                out.push_str(a);
            }
            Formula::Or(cs) | Formula::And(cs) => {
                let (sep, child_min) = match self {
                    Formula::Or(_) => (" | ", 2),
                    _ => (" & ", 3),
                };
                for (i, c) in cs.iter().enumerate() {
                    if i > 0 {
                        out.push_str(sep);
                    }
                    c.write_at(child_min, out);
                }
            }
            Formula::Next(b) => unary("X", b, out),
            Formula::PromptF(b) => unary("FP", b, out),
            Formula::PromptMullerF(b) => unary("FPinf", b, out),
            Formula::Finally(b) => unary("F", b, out),
            Formula::Until(l, r) | Formula::Release(l, r) => {
                l.write_at(1, out);
                out.push_str(if matches!(self, Formula::Until(..)) { " U " } else { " R " });
                r.write_at(0, out);
            }
        }
    }
}

/// Concrete syntax accepted by [`parse_formula`]; parsing the output yields
/// the same tree.
pub fn render_formula(f: &Formula) -> String {
    let mut out = String::new();
    f.write_at(0, &mut out);
    out
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&render_formula(self))
    }
}

/// Most specific fragment containing `f`.
pub fn classify_fragment(f: &Formula) -> FragmentClass {
    if let Formula::Finally(body) = f {
        if body.is_muller() && body.atoms_guarded(false) {
            return FragmentClass::InitializedMuller;
        }
        return FragmentClass::EvalOnly;
    }
    if !f.is_muller() {
        FragmentClass::EvalOnly
    } else if f.atoms_guarded(false) {
        FragmentClass::PositivePromptMuller
    } else {
        FragmentClass::PromptMuller
    }
}

/// Nesting depth of temporal operators; 0 for state formulas.
pub fn rank(f: &Formula) -> usize {
    match f {
        Formula::Or(cs) | Formula::And(cs) => cs.iter().map(rank).max().unwrap_or(0),
        Formula::Next(b) | Formula::PromptF(b) | Formula::PromptMullerF(b) | Formula::Finally(b) => {
            1 + rank(b)
        }
        Formula::Until(l, r) | Formula::Release(l, r) => 1 + rank(l).max(rank(r)),
        _ => 0,
    }
}
