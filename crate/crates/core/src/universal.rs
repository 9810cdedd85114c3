//! Universal model checking for the prompt Muller fragment and its
//! initialized variant, with avoiding-sequence witnesses.

use std::collections::HashSet;
use std::fmt;

use rayon::prelude::*;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::formula::{
    build_tree, canonicalize, classify_fragment, decompositions, filtrations, CanonicalFormula, Formula,
    FormulaTree, FragmentClass,
};
use crate::lts::{self, Lts};
use crate::runs::{eval_bounded, k_pump, LassoRun};

/// Default state limit for [`bruteforce_find_avoiding_sequence`].
pub const BRUTEFORCE_LIMIT: usize = 8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Scope {
    WholeLts,
    /// Component index into [`lts::sccs`].
    WithinScc(usize),
}

/// A realisable avoiding sequence for a formula tree.
///
/// `loops[i]` and `connectors[i]` belong to tree node `order[i]`. Connector
/// `i` ends on loop `i`; connector `i + 1` starts on loop `i`. `approach`
/// leads from the initial state to the start of connector 0 (just the
/// initial state in whole-system scope). In SCC scope `closing` leads from
/// the last loop back to that start.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AvoidingSequenceWitness {
    pub filtration: Formula,
    pub tree: FormulaTree,
    pub order: Vec<usize>,
    pub loops: Vec<Vec<usize>>,
    pub connectors: Vec<Vec<usize>>,
    pub scope: Scope,
    pub approach: Vec<usize>,
    pub closing: Vec<usize>,
}

impl AvoidingSequenceWitness {
    pub fn to_json(&self, l: &Lts) -> Value {
        let paths = |ps: &[Vec<usize>]| ps.iter().map(|p| l.names_of(p)).collect::<Vec<_>>();
        let mut doc = json!({
            "filtration": self.filtration.to_string(),
            "order": self.order,
            "loops": paths(&self.loops),
            "connectors": paths(&self.connectors),
            "scope": match self.scope {
                Scope::WholeLts => json!("whole"),
                Scope::WithinScc(id) => json!(id),
            },
        });
        if let Scope::WithinScc(_) = self.scope {
            doc["approach"] = json!(l.names_of(&self.approach));
            doc["closing"] = json!(l.names_of(&self.closing));
        }
        doc
    }

    /// Node label of the tree node visited at order position `i`.
    pub fn label_at(&self, i: usize) -> &crate::formula::StateFormula {
        &self.tree.nodes[self.order[i]].label
    }
}

/// Structural check of a witness against `l`: order, avoidance, paths, and
/// endpoint matching.
pub fn verify_witness(l: &Lts, w: &AvoidingSequenceWitness) -> Result<()> {
    let bad = |m: String| Err(Error::BrokenConnector(m));
    if !w.tree.is_linear_extension(&w.order) {
        return bad("order does not respect the tree".into());
    }
    if w.loops.len() != w.order.len() || w.connectors.len() != w.order.len() {
        return bad("one loop and one connector per node expected".into());
    }
    let region = match w.scope {
        Scope::WholeLts => None,
        Scope::WithinScc(id) => {
            let dec = lts::sccs(l);
            let comp = dec
                .components
                .get(id)
                .ok_or_else(|| Error::BrokenConnector(format!("no component {id}")))?;
            Some(lts::mask(l.len(), &comp.states))
        }
    };
    let inside = |s: usize| region.as_ref().is_none_or(|m| m[s]);
    let path_ok = |p: &[usize]| {
        !p.is_empty() && p.iter().all(|&s| s < l.len()) && p.windows(2).all(|e| l.has_edge(e[0], e[1]))
    };
    if !path_ok(&w.approach) || w.approach[0] != l.init() {
        return bad("approach is not a path from the initial state".into());
    }
    for (i, (lp, conn)) in w.loops.iter().zip(&w.connectors).enumerate() {
        if lp.len() < 2 || lp[0] != lp[lp.len() - 1] || !path_ok(lp) {
            return bad(format!("loop {i} is not a closed path"));
        }
        let label = w.label_at(i);
        if let Some(&s) = lp.iter().find(|&&s| label.holds(l.labels(s))) {
            return bad(format!("loop {i} visits {} which satisfies {label}", l.name(s)));
        }
        if !path_ok(conn) {
            return bad(format!("connector {i} is not a path"));
        }
        if !lp.iter().chain(conn).all(|&s| inside(s)) {
            return bad(format!("step {i} leaves the component"));
        }
        if !lp.contains(conn.last().unwrap()) {
            return bad(format!("connector {i} does not end on loop {i}"));
        }
        let start_ok = if i == 0 {
            conn[0] == *w.approach.last().unwrap()
        } else {
            w.loops[i - 1].contains(&conn[0])
        };
        if !start_ok {
            return bad(format!("connector {i} starts in the wrong place"));
        }
    }
    if let Scope::WithinScc(_) = w.scope {
        let last = w.loops.last().unwrap();
        if !path_ok(&w.closing)
            || !last.contains(&w.closing[0])
            || *w.closing.last().unwrap() != w.connectors[0][0]
            || !w.closing.iter().all(|&s| inside(s))
        {
            return bad("closing path does not return to the first connector".into());
        }
    }
    Ok(())
}

struct Region {
    within: Option<Vec<bool>>,
    approach: Vec<usize>,
}

impl Region {
    fn new(l: &Lts, scope: Scope) -> Option<Region> {
        match scope {
            Scope::WholeLts => Some(Region {
                within: None,
                approach: vec![l.init()],
            }),
            Scope::WithinScc(id) => {
                let dec = lts::sccs(l);
                Region::component(l, &dec.components.get(id)?.states)
            }
        }
    }

    fn component(l: &Lts, states: &[usize]) -> Option<Region> {
        let m = lts::mask(l.len(), states);
        let approach = lts::shortest_path(l, l.init(), |s| m[s], None)?;
        Some(Region {
            within: Some(m),
            approach,
        })
    }

    fn start(&self) -> usize {
        *self.approach.last().unwrap()
    }

    fn inside(&self, s: usize) -> bool {
        self.within.as_ref().is_none_or(|m| m[s])
    }

    fn mask(&self) -> Option<&[bool]> {
        self.within.as_deref()
    }

    // States of the region not satisfying the node label.
    fn avoiding(&self, l: &Lts, tree: &FormulaTree, node: usize) -> Vec<bool> {
        let label = &tree.nodes[node].label;
        (0..l.len()).map(|s| self.inside(s) && !label.holds(l.labels(s))).collect()
    }
}

/// States lying on some cycle of the sub-graph induced by `sub`.
fn on_cycle(l: &Lts, sub: &[bool]) -> Vec<bool> {
    let (comp, count) = lts::tarjan(l, Some(sub));
    let mut size = vec![0usize; count];
    for &c in comp.iter().filter(|&&c| c != usize::MAX) {
        size[c] += 1;
    }
    (0..l.len())
        .map(|s| sub[s] && (size[comp[s]] > 1 || l.has_edge(s, s)))
        .collect()
}

fn available(tree: &FormulaTree, placed: &[bool], n: usize) -> bool {
    !placed[n] && tree.nodes[n].parent.is_none_or(|p| placed[p])
}

struct Greedy<'a> {
    l: &'a Lts,
    tree: &'a FormulaTree,
    region: &'a Region,
    cyc: Vec<Vec<bool>>,
    failed: HashSet<(Vec<bool>, Vec<bool>)>,
    order: Vec<usize>,
    steps: Vec<Vec<bool>>,
}

impl Greedy<'_> {
    // Depth-first over linear extensions in lexicographic order; `frontier`
    // is everything reachable after the loops placed so far.
    fn extend(&mut self, placed: &mut Vec<bool>, frontier: &[bool]) -> bool {
        if self.order.len() == self.tree.len() {
            return true;
        }
        let key = (placed.clone(), frontier.to_vec());
        if self.failed.contains(&key) {
            return false;
        }
        for n in 0..self.tree.len() {
            if !available(self.tree, placed, n) {
                continue;
            }
            let step: Vec<bool> = (0..self.l.len()).map(|s| self.cyc[n][s] && frontier[s]).collect();
            if !step.contains(&true) {
                continue;
            }
            let next = lts::reachable(self.l, &lts::members(&step), self.region.mask());
            placed[n] = true;
            self.order.push(n);
            self.steps.push(step);
            if self.extend(placed, &next) {
                return true;
            }
            self.steps.pop();
            self.order.pop();
            placed[n] = false;
        }
        self.failed.insert(key);
        false
    }
}

fn search(l: &Lts, tree: &FormulaTree, region: &Region, scope: Scope) -> Option<AvoidingSequenceWitness> {
    if tree.is_empty() {
        return None;
    }
    let avoid: Vec<Vec<bool>> = (0..tree.len()).map(|n| region.avoiding(l, tree, n)).collect();
    let cyc: Vec<Vec<bool>> = avoid.iter().map(|a| on_cycle(l, a)).collect();
    if cyc.iter().any(|c| !c.contains(&true)) {
        return None;
    }
    let mut g = Greedy {
        l,
        tree,
        region,
        cyc,
        failed: HashSet::new(),
        order: Vec::new(),
        steps: Vec::new(),
    };
    let start = lts::reachable(l, &[region.start()], region.mask());
    if !g.extend(&mut vec![false; tree.len()], &start) {
        return None;
    }
    let (order, steps) = (g.order, g.steps);

    // walk backwards to pick one entry state per step that still leads on
    let last = order.len() - 1;
    let mut entry = vec![0usize; order.len()];
    entry[last] = lts::members(&steps[last])[0];
    for i in (0..last).rev() {
        entry[i] = lts::members(&steps[i])
            .into_iter()
            .find(|&s| lts::reachable(l, &[s], region.mask())[entry[i + 1]])?;
    }
    let loops = order
        .iter()
        .zip(&entry)
        .map(|(&n, &e)| lts::shortest_loop(l, e, &avoid[n]))
        .collect::<Option<Vec<_>>>()?;
    let mut connectors = Vec::with_capacity(order.len());
    let mut from = region.start();
    for &e in &entry {
        connectors.push(lts::shortest_path(l, from, |s| s == e, region.mask())?);
        from = e;
    }
    let closing = match scope {
        Scope::WholeLts => Vec::new(),
        Scope::WithinScc(_) => lts::shortest_path(l, entry[last], |s| s == region.start(), region.mask())?,
    };
    Some(AvoidingSequenceWitness {
        filtration: tree_formula(tree),
        tree: tree.clone(),
        order,
        loops,
        connectors,
        scope,
        approach: region.approach.clone(),
        closing,
    })
}

fn tree_formula(tree: &FormulaTree) -> Formula {
    fn node(tree: &FormulaTree, n: usize) -> CanonicalFormula {
        CanonicalFormula {
            theta: tree.nodes[n].label.clone(),
            children: tree.nodes[n].children.iter().map(|&c| node(tree, c)).collect(),
        }
    }
    node(tree, 0).to_formula()
}

/// Greedy search for a realisable avoiding sequence of `tree` in `scope`.
pub fn find_avoiding_sequence(l: &Lts, tree: &FormulaTree, scope: Scope) -> Option<AvoidingSequenceWitness> {
    let region = Region::new(l, scope)?;
    search(l, tree, &region, scope)
}

/// Every simple cycle of the sub-graph `sub`, each as a closed path starting
/// at its smallest state.
fn simple_loops(l: &Lts, sub: &[bool]) -> Vec<Vec<usize>> {
    fn dfs(l: &Lts, sub: &[bool], root: usize, path: &mut Vec<usize>, on: &mut [bool], out: &mut Vec<Vec<usize>>) {
        let s = *path.last().unwrap();
        for &t in l.succ(s) {
            if t == root {
                let mut c = path.clone();
                c.push(root);
                out.push(c);
            } else if t > root && sub[t] && !on[t] {
                on[t] = true;
                path.push(t);
                dfs(l, sub, root, path, on, out);
                path.pop();
                on[t] = false;
            }
        }
    }
    let mut out = Vec::new();
    let mut on = vec![false; l.len()];
    for root in (0..l.len()).filter(|&s| sub[s]) {
        on[root] = true;
        dfs(l, sub, root, &mut vec![root], &mut on, &mut out);
        on[root] = false;
    }
    out
}

struct Exhaustive<'a> {
    l: &'a Lts,
    tree: &'a FormulaTree,
    region: &'a Region,
    loops: Vec<Vec<Vec<usize>>>,
    failed: HashSet<(Vec<bool>, Vec<usize>)>,
    order: Vec<usize>,
    chosen: Vec<Vec<usize>>,
    connectors: Vec<Vec<usize>>,
}

impl Exhaustive<'_> {
    fn extend(&mut self, placed: &mut Vec<bool>, sources: &[usize]) -> bool {
        if self.order.len() == self.tree.len() {
            return true;
        }
        let mut key_src = sources.to_vec();
        key_src.sort_unstable();
        key_src.dedup();
        let key = (placed.clone(), key_src);
        if self.failed.contains(&key) {
            return false;
        }
        for n in 0..self.tree.len() {
            if !available(self.tree, placed, n) {
                continue;
            }
            for li in 0..self.loops[n].len() {
                let lp = self.loops[n][li].clone();
                let conn = sources
                    .iter()
                    .find_map(|&s| lts::shortest_path(self.l, s, |t| lp.contains(&t), self.region.mask()));
                let Some(conn) = conn else { continue };
                placed[n] = true;
                self.order.push(n);
                self.connectors.push(conn);
                self.chosen.push(lp.clone());
                if self.extend(placed, &lp[..lp.len() - 1]) {
                    return true;
                }
                self.chosen.pop();
                self.connectors.pop();
                self.order.pop();
                placed[n] = false;
            }
        }
        self.failed.insert(key);
        false
    }
}

/// Exhaustive search over linear extensions and simple avoiding loops, with
/// explicit breadth-first connectors. Independent oracle for
/// [`find_avoiding_sequence`].
pub fn bruteforce_find_avoiding_sequence(
    l: &Lts,
    tree: &FormulaTree,
    scope: Scope,
) -> Result<Option<AvoidingSequenceWitness>> {
    bruteforce_find_avoiding_sequence_with_limit(l, tree, scope, BRUTEFORCE_LIMIT)
}

pub fn bruteforce_find_avoiding_sequence_with_limit(
    l: &Lts,
    tree: &FormulaTree,
    scope: Scope,
    limit: usize,
) -> Result<Option<AvoidingSequenceWitness>> {
    if l.len() > limit {
        return Err(Error::SizeGuard { states: l.len(), limit });
    }
    let Some(region) = Region::new(l, scope) else {
        return Ok(None);
    };
    if tree.is_empty() {
        return Ok(None);
    }
    let loops: Vec<Vec<Vec<usize>>> = (0..tree.len())
        .map(|n| simple_loops(l, &region.avoiding(l, tree, n)))
        .collect();
    let mut ex = Exhaustive {
        l,
        tree,
        region: &region,
        loops,
        failed: HashSet::new(),
        order: Vec::new(),
        chosen: Vec::new(),
        connectors: Vec::new(),
    };
    if !ex.extend(&mut vec![false; tree.len()], &[region.start()]) {
        return Ok(None);
    }
    let closing = match scope {
        Scope::WholeLts => Vec::new(),
        Scope::WithinScc(_) => {
            let last = ex.chosen.last().unwrap();
            let start = region.start();
            last.iter()
                .find_map(|&s| lts::shortest_path(l, s, |t| t == start, region.mask()))
                .ok_or_else(|| Error::InternalWitnessInvalid("component is not strongly connected".into()))?
        }
    };
    Ok(Some(AvoidingSequenceWitness {
        filtration: tree_formula(tree),
        tree: tree.clone(),
        order: ex.order,
        loops: ex.chosen,
        connectors: ex.connectors,
        scope,
        approach: region.approach.clone(),
        closing,
    }))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Mode {
    Universal,
    Fair,
    Weak,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::Universal => "universal",
            Mode::Fair => "fair",
            Mode::Weak => "weak",
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A lasso falsifying the checked formula at bound `k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Counterexample {
    pub run: LassoRun,
    pub k: u64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Verdict {
    pub holds: bool,
    pub mode: Mode,
    pub fragment: FragmentClass,
    /// `|S| + 1`: a bound from which on the answer no longer changes.
    pub bound_threshold: usize,
    pub witness: Option<AvoidingSequenceWitness>,
    pub counterexample: Option<Counterexample>,
    /// Reachable bottom components that violate the formula (fair mode).
    pub bad_bsccs: Vec<Vec<usize>>,
}

impl Verdict {
    pub fn to_json(&self, l: &Lts) -> Value {
        let mut doc = json!({
            "holds": self.holds,
            "mode": self.mode.name(),
            "fragment": self.fragment.name(),
            "bound_threshold": self.bound_threshold,
        });
        if let Some(w) = &self.witness {
            doc["witness"] = w.to_json(l);
        }
        if let Some(c) = &self.counterexample {
            doc["counterexample"] = json!({
                "k": c.k,
                "prefix": l.names_of(&c.run.prefix),
                "cycle": l.names_of(&c.run.cycle),
            });
        }
        if self.mode == Mode::Fair {
            doc["bad_bsccs"] = json!(self.bad_bsccs.iter().map(|b| l.names_of(b)).collect::<Vec<_>>());
        }
        doc
    }
}

#[derive(Clone, Copy, Debug, Default)]
pub struct CheckOptions {
    /// Evaluate independent work items on the rayon pool.
    pub parallel: bool,
}

/// Syntactic filtrations first, then the remaining decompositions, without
/// duplicates. The latter cover conjunctions at state level that the
/// filtrations alone can miss.
fn candidates(f: &Formula) -> Result<Vec<CanonicalFormula>> {
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    let filtered = filtrations(f)?.iter().map(canonicalize).collect::<Result<Vec<_>>>()?;
    for c in filtered.into_iter().chain(decompositions(f)?) {
        if seen.insert(c.clone()) {
            out.push(c);
        }
    }
    Ok(out)
}

fn first_some<T: Sync, R: Send>(items: &[T], parallel: bool, f: impl Fn(&T) -> Option<R> + Sync + Send) -> Option<R> {
    if parallel {
        items.par_iter().find_map_first(f)
    } else {
        items.iter().find_map(f)
    }
}

pub fn universal_check(l: &Lts, f: &Formula) -> Result<Verdict> {
    universal_check_with(l, f, CheckOptions::default())
}

pub fn universal_check_with(l: &Lts, f: &Formula, opts: CheckOptions) -> Result<Verdict> {
    let fragment = classify_fragment(f);
    let witness = match fragment {
        FragmentClass::PromptMuller | FragmentClass::PositivePromptMuller => {
            let init_labels = l.labels(l.init());
            let items: Vec<CanonicalFormula> = candidates(f)?
                .into_iter()
                .filter(|c| !c.theta.holds(init_labels))
                .collect();
            first_some(&items, opts.parallel, |c| {
                let tree = build_tree(&c.temporal_part());
                find_avoiding_sequence(l, &tree, Scope::WholeLts).map(|mut w| {
                    w.filtration = c.to_formula();
                    w
                })
            })
        }
        FragmentClass::InitializedMuller => {
            let Formula::Finally(body) = f else {
                unreachable!("initialized formulas are F-rooted")
            };
            let dec = lts::sccs(l);
            let comps: Vec<usize> = (0..dec.components.len())
                .filter(|&i| dec.components[i].reachable && !dec.components[i].trivial)
                .collect();
            let cands = candidates(body)?;
            let items: Vec<(&CanonicalFormula, usize)> =
                cands.iter().flat_map(|c| comps.iter().map(move |&i| (c, i))).collect();
            first_some(&items, opts.parallel, |&(c, i)| {
                let region = Region::component(l, &dec.components[i].states)?;
                search(l, &build_tree(c), &region, Scope::WithinScc(i)).map(|mut w| {
                    w.filtration = c.to_formula();
                    w
                })
            })
        }
        other => {
            return Err(Error::WrongFragment {
                expected: "PromptMuller or InitializedMuller".into(),
                found: other.name().into(),
            })
        }
    };
    let bound_threshold = l.len() + 1;
    let counterexample = match &witness {
        Some(w) => Some(reverify(l, f, w, bound_threshold as u64)?),
        None => None,
    };
    Ok(Verdict {
        holds: witness.is_none(),
        mode: Mode::Universal,
        fragment,
        bound_threshold,
        witness,
        counterexample,
        bad_bsccs: Vec::new(),
    })
}

/// Pumps the witness at bound `k` and confirms the lasso falsifies `f`.
pub fn reverify(l: &Lts, f: &Formula, w: &AvoidingSequenceWitness, k: u64) -> Result<Counterexample> {
    let invalid = |e: Error| Error::InternalWitnessInvalid(e.to_string());
    verify_witness(l, w).map_err(invalid)?;
    let run = k_pump(l, w, k).map_err(invalid)?;
    run.validate_initialized(l).map_err(invalid)?;
    if eval_bounded(l, &run, k, f)? {
        return Err(Error::InternalWitnessInvalid(format!(
            "pumped lasso satisfies the formula at bound {k}"
        )));
    }
    Ok(Counterexample { run, k })
}

/// Weak-semantics check where it coincides with the strong one: on systems
/// whose reachable part is strongly connected, and for initialized formulas.
pub fn weak_check(l: &Lts, f: &Formula) -> Result<Verdict> {
    let fragment = classify_fragment(f);
    let collapses = fragment == FragmentClass::InitializedMuller
        || (fragment.is_muller() && lts::reachable_part_strongly_connected(l));
    if fragment.is_muller() && !collapses {
        return Err(Error::Unsupported(
            "weak checking needs a strongly connected system or an initialized formula".into(),
        ));
    }
    let mut v = universal_check(l, f)?;
    v.mode = Mode::Weak;
    v.witness = None;
    Ok(v)
}
