use std::collections::BTreeSet;
use std::fmt;

use super::{classify_fragment, Formula, FragmentClass};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Literal {
    pub atom: String,
    pub positive: bool,
}

impl Literal {
    pub fn holds(&self, labels: &BTreeSet<String>) -> bool {
        labels.contains(&self.atom) == self.positive
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if !self.positive {
            f.write_str("!")?;
        }
        f.write_str(&self.atom)
    }
}

/// Positive Boolean combination of literals, evaluated on one state.
///
/// Filtered formulas only ever produce a disjunction of literals here; the
/// general shape appears in decompositions that keep state-level conjunctions.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum StateFormula {
    Const(bool),
    Lit(Literal),
    And(Vec<StateFormula>),
    Or(Vec<StateFormula>),
}

impl StateFormula {
    /// Flattened, constant-folded disjunction. Empty means `false`.
    pub fn any(items: impl IntoIterator<Item = StateFormula>) -> StateFormula {
        let mut out = Vec::new();
        for it in items {
            match it {
                StateFormula::Const(false) => {}
                StateFormula::Const(true) => return StateFormula::Const(true),
                StateFormula::Or(inner) => out.extend(inner),
                other => out.push(other),
            }
        }
        match out.len() {
            0 => StateFormula::Const(false),
            1 => out.pop().unwrap(),
            _ => StateFormula::Or(out),
        }
    }

    /// Flattened, constant-folded conjunction. Empty means `true`.
    pub fn all(items: impl IntoIterator<Item = StateFormula>) -> StateFormula {
        let mut out = Vec::new();
        for it in items {
            match it {
                StateFormula::Const(true) => {}
                StateFormula::Const(false) => return StateFormula::Const(false),
                StateFormula::And(inner) => out.extend(inner),
                other => out.push(other),
            }
        }
        match out.len() {
            0 => StateFormula::Const(true),
            1 => out.pop().unwrap(),
            _ => StateFormula::And(out),
        }
    }

    pub fn holds(&self, labels: &BTreeSet<String>) -> bool {
        match self {
            StateFormula::Const(b) => *b,
            StateFormula::Lit(l) => l.holds(labels),
            StateFormula::And(cs) => cs.iter().all(|c| c.holds(labels)),
            StateFormula::Or(cs) => cs.iter().any(|c| c.holds(labels)),
        }
    }

    /// The literal set when this is a plain disjunction of literals
    /// (`false` gives the empty set).
    pub fn literals(&self) -> Option<Vec<&Literal>> {
        match self {
            StateFormula::Const(false) => Some(Vec::new()),
            StateFormula::Lit(l) => Some(vec![l]),
            StateFormula::Or(cs) => cs
                .iter()
                .map(|c| match c {
                    StateFormula::Lit(l) => Some(l),
                    _ => None,
                })
                .collect(),
            _ => None,
        }
    }

    pub fn to_formula(&self) -> Formula {
        match self {
            StateFormula::Const(true) => Formula::True,
            StateFormula::Const(false) => Formula::False,
            StateFormula::Lit(l) if l.positive => Formula::Atom(l.atom.clone()),
            StateFormula::Lit(l) => Formula::NegAtom(l.atom.clone()),
            StateFormula::And(cs) => Formula::And(cs.iter().map(Self::to_formula).collect()),
            StateFormula::Or(cs) => Formula::Or(cs.iter().map(Self::to_formula).collect()),
        }
    }
}

impl fmt::Display for StateFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_formula())
    }
}

/// `θ ∨ FPinf ψ_1 ∨ … ∨ FPinf ψ_m` with every ψ_i canonical as well.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CanonicalFormula {
    pub theta: StateFormula,
    pub children: Vec<CanonicalFormula>,
}

impl CanonicalFormula {
    pub fn to_formula(&self) -> Formula {
        let mut items = Vec::with_capacity(1 + self.children.len());
        if self.theta != StateFormula::Const(false) || self.children.is_empty() {
            items.push(self.theta.to_formula());
        }
        items.extend(self.children.iter().map(|c| Formula::fpinf(c.to_formula())));
        if items.len() == 1 {
            items.pop().unwrap()
        } else {
            Formula::Or(items)
        }
    }

    /// The same formula with its state disjunct dropped (replaced by `false`).
    pub fn temporal_part(&self) -> CanonicalFormula {
        CanonicalFormula {
            theta: StateFormula::Const(false),
            children: self.children.clone(),
        }
    }

    pub fn height(&self) -> usize {
        self.children.iter().map(|c| 1 + c.height()).max().unwrap_or(0)
    }
}

impl fmt::Display for CanonicalFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.theta)?;
        for c in &self.children {
            write!(f, " | FPinf ({c})")?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TreeNode {
    pub label: StateFormula,
    pub parent: Option<usize>,
    pub children: Vec<usize>,
}

/// Syntax tree of a canonical formula. Node 0 is the root; indices follow a
/// depth-first, left-to-right traversal.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FormulaTree {
    pub nodes: Vec<TreeNode>,
}

impl FormulaTree {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Strict ancestor relation.
    pub fn is_ancestor(&self, a: usize, b: usize) -> bool {
        let mut cur = self.nodes[b].parent;
        while let Some(p) = cur {
            if p == a {
                return true;
            }
            cur = self.nodes[p].parent;
        }
        false
    }

    pub fn depth(&self, n: usize) -> usize {
        let mut d = 0;
        let mut cur = self.nodes[n].parent;
        while let Some(p) = cur {
            d += 1;
            cur = self.nodes[p].parent;
        }
        d
    }

    pub fn height(&self) -> usize {
        (0..self.len()).map(|n| self.depth(n)).max().unwrap_or(0)
    }

    /// True when `order` is a permutation of the nodes listing every ancestor
    /// before its descendants.
    pub fn is_linear_extension(&self, order: &[usize]) -> bool {
        if order.len() != self.len() {
            return false;
        }
        let mut pos = vec![usize::MAX; self.len()];
        for (i, &n) in order.iter().enumerate() {
            if n >= self.len() || pos[n] != usize::MAX {
                return false;
            }
            pos[n] = i;
        }
        self.nodes
            .iter()
            .enumerate()
            .all(|(n, node)| node.parent.is_none_or(|p| pos[p] < pos[n]))
    }
}

pub fn build_tree(c: &CanonicalFormula) -> FormulaTree {
    fn go(c: &CanonicalFormula, parent: Option<usize>, nodes: &mut Vec<TreeNode>) -> usize {
        let me = nodes.len();
        nodes.push(TreeNode {
            label: c.theta.clone(),
            parent,
            children: Vec::new(),
        });
        for child in &c.children {
            let id = go(child, Some(me), nodes);
            nodes[me].children.push(id);
        }
        me
    }
    let mut nodes = Vec::new();
    go(c, None, &mut nodes);
    FormulaTree { nodes }
}

fn require_muller(f: &Formula) -> Result<()> {
    let class = classify_fragment(f);
    if class.is_muller() {
        Ok(())
    } else {
        Err(Error::WrongFragment {
            expected: FragmentClass::PromptMuller.name().into(),
            found: class.name().into(),
        })
    }
}

fn and_arities(f: &Formula, out: &mut Vec<usize>) {
    match f {
        Formula::And(cs) => {
            out.push(cs.len());
            cs.iter().for_each(|c| and_arities(c, out));
        }
        Formula::Or(cs) => cs.iter().for_each(|c| and_arities(c, out)),
        Formula::PromptMullerF(b) => and_arities(b, out),
        _ => {}
    }
}

// Walks the whole tree so that And nodes keep their preorder index even when
// they sit in a discarded conjunct.
fn apply_choice(f: &Formula, choice: &[usize], next: &mut usize) -> Formula {
    match f {
        Formula::And(cs) => {
            let pick = choice[*next];
            *next += 1;
            let mut chosen = None;
            for (i, c) in cs.iter().enumerate() {
                let g = apply_choice(c, choice, next);
                if i == pick {
                    chosen = Some(g);
                }
            }
            chosen.expect("choice within arity")
        }
        Formula::Or(cs) => Formula::Or(cs.iter().map(|c| apply_choice(c, choice, next)).collect()),
        Formula::PromptMullerF(b) => Formula::fpinf(apply_choice(b, choice, next)),
        other => other.clone(),
    }
}

/// Every formula obtained by replacing each `&` node with one of its
/// children, one result per choice function over the `&` nodes.
///
/// `&` nodes are numbered in preorder; the first one varies slowest, so the
/// leftmost choice comes first.
pub fn filtrations(f: &Formula) -> Result<Vec<Formula>> {
    require_muller(f)?;
    let mut arities = Vec::new();
    and_arities(f, &mut arities);
    let total: usize = arities.iter().product();
    let mut out = Vec::with_capacity(total);
    let mut choice = vec![0usize; arities.len()];
    for _ in 0..total {
        out.push(apply_choice(f, &choice, &mut 0));
        for i in (0..choice.len()).rev() {
            choice[i] += 1;
            if choice[i] < arities[i] {
                break;
            }
            choice[i] = 0;
        }
    }
    Ok(out)
}

/// Flattens a conjunction-free Muller formula into canonical form.
pub fn canonicalize(f: &Formula) -> Result<CanonicalFormula> {
    fn collect(f: &Formula, theta: &mut Vec<StateFormula>, kids: &mut Vec<CanonicalFormula>) -> Result<()> {
        match f {
            Formula::True => theta.push(StateFormula::Const(true)),
            Formula::False => {}
            Formula::Atom(a) => theta.push(StateFormula::Lit(Literal { atom: a.clone(), positive: true })),
            Formula::NegAtom(a) => theta.push(StateFormula::Lit(Literal { atom: a.clone(), positive: false })),
            Formula::Or(cs) => {
                for c in cs {
                    collect(c, theta, kids)?;
                }
            }
            Formula::PromptMullerF(b) => kids.push(canonicalize(b)?),
            Formula::And(_) => {
                return Err(Error::Unsupported(
                    "canonical form requires a conjunction-free formula".into(),
                ))
            }
            other => {
                return Err(Error::WrongFragment {
                    expected: FragmentClass::PromptMuller.name().into(),
                    found: classify_fragment(other).name().into(),
                })
            }
        }
        Ok(())
    }
    let mut theta = Vec::new();
    let mut children = Vec::new();
    collect(f, &mut theta, &mut children)?;
    Ok(CanonicalFormula {
        theta: StateFormula::any(theta),
        children,
    })
}

// Maximal FPinf subformulas of the Boolean skeleton of `f`.
fn temporal_children<'a>(f: &'a Formula, out: &mut Vec<&'a Formula>) {
    match f {
        Formula::PromptMullerF(b) => out.push(b),
        Formula::Or(cs) | Formula::And(cs) => cs.iter().for_each(|c| temporal_children(c, out)),
        _ => {}
    }
}

// State formula of `f` once the temporal children are fixed: those in
// `failing` become false, all others true.
fn residual(f: &Formula, failing: u64, next: &mut usize) -> StateFormula {
    match f {
        Formula::True => StateFormula::Const(true),
        Formula::False => StateFormula::Const(false),
        Formula::Atom(a) => StateFormula::Lit(Literal { atom: a.clone(), positive: true }),
        Formula::NegAtom(a) => StateFormula::Lit(Literal { atom: a.clone(), positive: false }),
        Formula::Or(cs) => StateFormula::any(cs.iter().map(|c| residual(c, failing, next)).collect::<Vec<_>>()),
        Formula::And(cs) => StateFormula::all(cs.iter().map(|c| residual(c, failing, next)).collect::<Vec<_>>()),
        Formula::PromptMullerF(_) => {
            let i = *next;
            *next += 1;
            StateFormula::Const(failing & (1 << i) == 0)
        }
        _ => unreachable!("checked Muller fragment"),
    }
}

const MAX_TEMPORAL_CHILDREN: usize = 20;

/// Canonical decompositions of a Muller formula that may contain `&`.
///
/// At each level a decomposition picks the set of `FPinf` children assumed
/// to fail; the node label is what remains of the Boolean skeleton with the
/// failing children set to false and the others to true. Unlike
/// [`filtrations`], conjunctions of state formulas survive inside labels, so
/// a run falsifies the formula for all large bounds exactly when some
/// decomposition has a realisable avoiding sequence.
pub fn decompositions(f: &Formula) -> Result<Vec<CanonicalFormula>> {
    require_muller(f)?;
    decompose(f)
}

fn decompose(f: &Formula) -> Result<Vec<CanonicalFormula>> {
    let mut temporal = Vec::new();
    temporal_children(f, &mut temporal);
    if temporal.len() > MAX_TEMPORAL_CHILDREN {
        return Err(Error::Unsupported(format!(
            "more than {MAX_TEMPORAL_CHILDREN} FPinf operators at one level"
        )));
    }
    let sub: Vec<Vec<CanonicalFormula>> = temporal.iter().map(|b| decompose(b)).collect::<Result<_>>()?;
    let mut out = Vec::new();
    for failing in 0..(1u64 << temporal.len()) {
        let theta = residual(f, failing, &mut 0);
        if theta == StateFormula::Const(true) {
            continue;
        }
        let chosen: Vec<usize> = (0..temporal.len()).filter(|i| failing & (1 << i) != 0).collect();
        if chosen.iter().any(|&i| sub[i].is_empty()) {
            continue;
        }
        // cartesian product over the failing children's decompositions
        let mut combos: Vec<Vec<CanonicalFormula>> = vec![Vec::new()];
        for &i in &chosen {
            let mut next = Vec::with_capacity(combos.len() * sub[i].len());
            for prefix in &combos {
                for d in &sub[i] {
                    let mut v = prefix.clone();
                    v.push(d.clone());
                    next.push(v);
                }
            }
            combos = next;
        }
        out.extend(combos.into_iter().map(|children| CanonicalFormula {
            theta: theta.clone(),
            children,
        }));
    }
    Ok(out)
}
