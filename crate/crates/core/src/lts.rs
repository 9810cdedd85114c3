//! Finite labeled transition systems and the graph algorithms the checkers
//! run on them.

use std::collections::{BTreeSet, HashMap, HashSet, VecDeque};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::formula::is_atom_name;

/// A validated LTS. States are addressed by their position in the document's
/// `states` array; successor lists are sorted by that position.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Lts {
    names: Vec<String>,
    index: HashMap<String, usize>,
    init: usize,
    succ: Vec<Vec<usize>>,
    pred: Vec<Vec<usize>>,
    labels: Vec<BTreeSet<String>>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct StateDoc {
    pub id: String,
    #[serde(default)]
    pub labels: Vec<String>,
}

/// JSON document form of an LTS.
#[derive(Debug, Serialize, Deserialize)]
pub struct LtsDoc {
    pub states: Vec<StateDoc>,
    pub init: String,
    pub transitions: Vec<(String, String)>,
}

impl Lts {
    /// Builds and validates an LTS from named states, an initial state and
    /// named transitions.
    pub fn new<S: AsRef<str>>(
        states: &[(S, Vec<S>)],
        init: &str,
        transitions: &[(S, S)],
    ) -> Result<Lts> {
        let doc = LtsDoc {
            states: states
                .iter()
                .map(|(id, ls)| StateDoc {
                    id: id.as_ref().to_string(),
                    labels: ls.iter().map(|l| l.as_ref().to_string()).collect(),
                })
                .collect(),
            init: init.to_string(),
            transitions: transitions
                .iter()
                .map(|(a, b)| (a.as_ref().to_string(), b.as_ref().to_string()))
                .collect(),
        };
        Lts::from_doc(doc)
    }

    pub fn from_doc(doc: LtsDoc) -> Result<Lts> {
        if doc.states.is_empty() {
            return Err(Error::InvalidLts("no states".into()));
        }
        let mut names = Vec::with_capacity(doc.states.len());
        let mut index = HashMap::new();
        let mut labels = Vec::with_capacity(doc.states.len());
        for st in doc.states {
            if index.insert(st.id.clone(), names.len()).is_some() {
                return Err(Error::InvalidLts(format!("duplicate state id `{}`", st.id)));
            }
            let mut set = BTreeSet::new();
            for l in st.labels {
                if !is_atom_name(&l) {
                    return Err(Error::InvalidLts(format!(
                        "label `{l}` of state `{}` is not a valid atom name",
                        st.id
                    )));
                }
                if !set.insert(l.clone()) {
                    return Err(Error::InvalidLts(format!("duplicate label `{l}` on state `{}`", st.id)));
                }
            }
            names.push(st.id);
            labels.push(set);
        }
        let init = *index
            .get(&doc.init)
            .ok_or_else(|| Error::InvalidLts(format!("initial state `{}` is not a state", doc.init)))?;
        let n = names.len();
        let mut succ = vec![Vec::new(); n];
        let mut seen = HashSet::new();
        for (a, b) in &doc.transitions {
            let lookup = |s: &String| {
                index
                    .get(s)
                    .copied()
                    .ok_or_else(|| Error::InvalidLts(format!("transition endpoint `{s}` is not a state")))
            };
            let (x, y) = (lookup(a)?, lookup(b)?);
            if !seen.insert((x, y)) {
                return Err(Error::InvalidLts(format!("duplicate transition `{a}` -> `{b}`")));
            }
            succ[x].push(y);
        }
        if let Some(dead) = succ.iter().position(Vec::is_empty) {
            return Err(Error::InvalidLts(format!("state `{}` has no successor", names[dead])));
        }
        let mut pred = vec![Vec::new(); n];
        for (x, ys) in succ.iter_mut().enumerate() {
            ys.sort_unstable();
            for &y in ys.iter() {
                pred[y].push(x);
            }
        }
        Ok(Lts {
            names,
            index,
            init,
            succ,
            pred,
            labels,
        })
    }

    pub fn to_doc(&self) -> LtsDoc {
        LtsDoc {
            states: (0..self.len())
                .map(|s| StateDoc {
                    id: self.names[s].clone(),
                    labels: self.labels[s].iter().cloned().collect(),
                })
                .collect(),
            init: self.names[self.init].clone(),
            transitions: (0..self.len())
                .flat_map(|s| self.succ[s].iter().map(move |&t| (s, t)))
                .map(|(s, t)| (self.names[s].clone(), self.names[t].clone()))
                .collect(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.to_doc()).expect("serializable")
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn init(&self) -> usize {
        self.init
    }

    pub fn name(&self, s: usize) -> &str {
        &self.names[s]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn state(&self, name: &str) -> Result<usize> {
        self.index
            .get(name)
            .copied()
            .ok_or_else(|| Error::UnknownState(name.to_string()))
    }

    pub fn succ(&self, s: usize) -> &[usize] {
        &self.succ[s]
    }

    pub fn pred(&self, s: usize) -> &[usize] {
        &self.pred[s]
    }

    pub fn labels(&self, s: usize) -> &BTreeSet<String> {
        &self.labels[s]
    }

    pub fn has_edge(&self, s: usize, t: usize) -> bool {
        self.succ[s].binary_search(&t).is_ok()
    }

    /// Successor names of the named state, in document order.
    pub fn successors(&self, name: &str) -> Result<Vec<&str>> {
        let s = self.state(name)?;
        Ok(self.succ[s].iter().map(|&t| self.names[t].as_str()).collect())
    }

    pub fn names_of(&self, states: &[usize]) -> Vec<String> {
        states.iter().map(|&s| self.names[s].clone()).collect()
    }

    pub fn indices_of<S: AsRef<str>>(&self, names: &[S]) -> Result<Vec<usize>> {
        names.iter().map(|n| self.state(n.as_ref())).collect()
    }

    /// Sub-system induced by `keep` (which must be closed under successors
    /// for the result to be total), started in `init`.
    pub fn restrict(&self, keep: &[usize], init: usize) -> Result<Lts> {
        let mut member = vec![false; self.len()];
        keep.iter().for_each(|&s| member[s] = true);
        if !member[init] {
            return Err(Error::InvalidLts("initial state outside the restriction".into()));
        }
        let mut kept: Vec<usize> = keep.to_vec();
        kept.sort_unstable();
        kept.dedup();
        let doc = LtsDoc {
            states: kept
                .iter()
                .map(|&s| StateDoc {
                    id: self.names[s].clone(),
                    labels: self.labels[s].iter().cloned().collect(),
                })
                .collect(),
            init: self.names[init].clone(),
            transitions: kept
                .iter()
                .flat_map(|&s| self.succ[s].iter().filter(|&&t| member[t]).map(move |&t| (s, t)))
                .map(|(s, t)| (self.names[s].clone(), self.names[t].clone()))
                .collect(),
        };
        Lts::from_doc(doc)
    }
}

/// Parses and validates an LTS document.
pub fn parse_lts(document: &[u8]) -> Result<Lts> {
    let doc: LtsDoc = serde_json::from_slice(document)?;
    Lts::from_doc(doc)
}

pub fn mask(n: usize, states: &[usize]) -> Vec<bool> {
    let mut m = vec![false; n];
    states.iter().for_each(|&s| m[s] = true);
    m
}

pub fn members(m: &[bool]) -> Vec<usize> {
    m.iter().enumerate().filter(|(_, &b)| b).map(|(s, _)| s).collect()
}

/// States reachable (in zero or more steps) from `sources` while staying
/// inside `within` when given.
pub fn reachable(l: &Lts, sources: &[usize], within: Option<&[bool]>) -> Vec<bool> {
    let mut seen = vec![false; l.len()];
    let mut queue = VecDeque::new();
    for &s in sources {
        if within.is_none_or(|w| w[s]) && !seen[s] {
            seen[s] = true;
            queue.push_back(s);
        }
    }
    while let Some(s) = queue.pop_front() {
        for &t in l.succ(s) {
            if !seen[t] && within.is_none_or(|w| w[t]) {
                seen[t] = true;
                queue.push_back(t);
            }
        }
    }
    seen
}

/// Shortest path from `from` to the first state satisfying `target`, staying
/// inside `within`. A path of one state is returned when `from` qualifies.
pub fn shortest_path(
    l: &Lts,
    from: usize,
    target: impl Fn(usize) -> bool,
    within: Option<&[bool]>,
) -> Option<Vec<usize>> {
    if target(from) {
        return Some(vec![from]);
    }
    let mut parent = vec![usize::MAX; l.len()];
    parent[from] = from;
    let mut queue = VecDeque::from([from]);
    while let Some(s) = queue.pop_front() {
        for &t in l.succ(s) {
            if parent[t] != usize::MAX || !within.is_none_or(|w| w[t]) {
                continue;
            }
            parent[t] = s;
            if target(t) {
                let mut path = vec![t];
                let mut cur = t;
                while cur != from {
                    cur = parent[cur];
                    path.push(cur);
                }
                path.reverse();
                return Some(path);
            }
            queue.push_back(t);
        }
    }
    None
}

/// Shortest loop `s … s` (at least one edge) whose states all lie in `within`.
pub fn shortest_loop(l: &Lts, s: usize, within: &[bool]) -> Option<Vec<usize>> {
    if !within[s] {
        return None;
    }
    if l.has_edge(s, s) {
        return Some(vec![s, s]);
    }
    l.succ(s)
        .iter()
        .filter(|&&t| within[t])
        .filter_map(|&t| shortest_path(l, t, |x| x == s, Some(within)))
        .min_by_key(Vec::len)
        .map(|mut p| {
            p.insert(0, s);
            p
        })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Scc {
    /// Member states in document order.
    pub states: Vec<usize>,
    /// No transition leaves the component.
    pub bottom: bool,
    pub reachable: bool,
    /// Single state without a self-loop: contains no cycle.
    pub trivial: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SccDecomposition {
    /// Ordered by smallest member state.
    pub components: Vec<Scc>,
    pub component_of: Vec<usize>,
}

impl SccDecomposition {
    pub fn bottoms(&self) -> impl Iterator<Item = &Scc> {
        self.components.iter().filter(|c| c.bottom)
    }
}

/// Tarjan's algorithm restricted to the states where `within` holds.
/// Returns the component id for each state (`usize::MAX` outside `within`)
/// and the number of components.
pub fn tarjan(l: &Lts, within: Option<&[bool]>) -> (Vec<usize>, usize) {
    let n = l.len();
    let inside = |s: usize| within.is_none_or(|w| w[s]);
    let mut index = vec![usize::MAX; n];
    let mut low = vec![0usize; n];
    let mut on_stack = vec![false; n];
    let mut comp = vec![usize::MAX; n];
    let mut stack = Vec::new();
    let mut next_index = 0;
    let mut count = 0;
    for root in 0..n {
        if index[root] != usize::MAX || !inside(root) {
            continue;
        }
        // (state, next successor position)
        let mut work = vec![(root, 0usize)];
        index[root] = next_index;
        low[root] = next_index;
        next_index += 1;
        stack.push(root);
        on_stack[root] = true;
        while let Some(&mut (s, ref mut pos)) = work.last_mut() {
            let succ = l.succ(s);
            if *pos < succ.len() {
                let t = succ[*pos];
                *pos += 1;
                if !inside(t) {
                    continue;
                }
                if index[t] == usize::MAX {
                    index[t] = next_index;
                    low[t] = next_index;
                    next_index += 1;
                    stack.push(t);
                    on_stack[t] = true;
                    work.push((t, 0));
                } else if on_stack[t] {
                    low[s] = low[s].min(index[t]);
                }
            } else {
                work.pop();
                if let Some(&(parent, _)) = work.last() {
                    low[parent] = low[parent].min(low[s]);
                }
                if low[s] == index[s] {
                    loop {
                        let t = stack.pop().expect("tarjan stack");
                        on_stack[t] = false;
                        comp[t] = count;
                        if t == s {
                            break;
                        }
                    }
                    count += 1;
                }
            }
        }
    }
    (comp, count)
}

/// Maximal strongly connected components with bottom, reachability and
/// triviality flags.
pub fn sccs(l: &Lts) -> SccDecomposition {
    let (raw, count) = tarjan(l, None);
    // renumber by smallest member so the output follows document order
    let mut renumber = vec![usize::MAX; count];
    let mut next = 0;
    for s in 0..l.len() {
        if renumber[raw[s]] == usize::MAX {
            renumber[raw[s]] = next;
            next += 1;
        }
    }
    let component_of: Vec<usize> = raw.iter().map(|&c| renumber[c]).collect();
    let reach = reachable(l, &[l.init()], None);
    let mut components: Vec<Scc> = (0..count)
        .map(|_| Scc {
            states: Vec::new(),
            bottom: true,
            reachable: false,
            trivial: false,
        })
        .collect();
    for s in 0..l.len() {
        let c = &mut components[component_of[s]];
        c.states.push(s);
        c.reachable |= reach[s];
        if l.succ(s).iter().any(|&t| component_of[t] != component_of[s]) {
            c.bottom = false;
        }
    }
    for c in &mut components {
        c.trivial = c.states.len() == 1 && !l.has_edge(c.states[0], c.states[0]);
    }
    SccDecomposition {
        components,
        component_of,
    }
}

/// Strict predecessors of `u` inside `domain`: domain states whose successors
/// within the domain all lie in `u`.
pub fn spred(l: &Lts, domain: &[usize], u: &[usize]) -> Vec<usize> {
    let dom = mask(l.len(), domain);
    let target = mask(l.len(), u);
    let mut out: Vec<usize> = domain
        .iter()
        .copied()
        .filter(|&s| l.succ(s).iter().filter(|&&t| dom[t]).all(|&t| target[t]))
        .collect();
    out.sort_unstable();
    out.dedup();
    out
}

/// Least fixed point of `V ↦ V ∪ spred(domain, V)` above `u` (the sure
/// attractor of `u` inside `domain`).
pub fn spred_star(l: &Lts, domain: &[usize], u: &[usize]) -> Vec<usize> {
    let dom = mask(l.len(), domain);
    let start = mask(l.len(), u);
    members(&spred_star_mask(l, &dom, &start))
}

/// Mask version of [`spred_star`]; linear in the size of the sub-graph.
pub fn spred_star_mask(l: &Lts, domain: &[bool], u: &[bool]) -> Vec<bool> {
    let n = l.len();
    let mut inside = vec![false; n];
    // successors in the domain that are not yet attracted
    let mut pending = vec![0usize; n];
    let mut queue = Vec::new();
    for s in 0..n {
        if !domain[s] {
            continue;
        }
        if u[s] {
            inside[s] = true;
            queue.push(s);
        }
    }
    for s in 0..n {
        if domain[s] && !inside[s] {
            pending[s] = l.succ(s).iter().filter(|&&t| domain[t] && !u[t]).count();
            if pending[s] == 0 {
                inside[s] = true;
                queue.push(s);
            }
        }
    }
    // propagate from every newly attracted state; the initial members were
    // already discounted above
    let mut frontier: Vec<usize> = queue.into_iter().filter(|&s| !u[s]).collect();
    while let Some(t) = frontier.pop() {
        for &p in l.pred(t) {
            if domain[p] && !inside[p] {
                pending[p] -= 1;
                if pending[p] == 0 {
                    inside[p] = true;
                    frontier.push(p);
                }
            }
        }
    }
    inside
}

/// True when the states reachable from the initial state form one SCC.
pub fn reachable_part_strongly_connected(l: &Lts) -> bool {
    let reach = reachable(l, &[l.init()], None);
    let (comp, _) = tarjan(l, Some(&reach));
    let c0 = comp[l.init()];
    (0..l.len()).filter(|&s| reach[s]).all(|s| comp[s] == c0)
}
