//! Ultimately periodic runs, exact bounded evaluation, and counterexample
//! construction from avoiding-sequence witnesses.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::formula::Formula;
use crate::lts::Lts;
use crate::universal::{AvoidingSequenceWitness, Scope};

/// The run `prefix · cycle^ω`, states given by index.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LassoRun {
    pub prefix: Vec<usize>,
    pub cycle: Vec<usize>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct LassoDoc {
    pub prefix: Vec<String>,
    pub cycle: Vec<String>,
}

impl LassoRun {
    pub fn new(prefix: Vec<usize>, cycle: Vec<usize>) -> LassoRun {
        LassoRun { prefix, cycle }
    }

    /// Number of distinct suffix classes, `|prefix| + |cycle|`.
    pub fn period_len(&self) -> usize {
        self.prefix.len() + self.cycle.len()
    }

    /// State at position `i` of the infinite run.
    pub fn state_at(&self, i: usize) -> usize {
        if i < self.prefix.len() {
            self.prefix[i]
        } else {
            self.cycle[(i - self.prefix.len()) % self.cycle.len()]
        }
    }

    /// The suffix run `ρ[i..]`.
    pub fn suffix(&self, i: usize) -> LassoRun {
        if i <= self.prefix.len() {
            return LassoRun::new(self.prefix[i..].to_vec(), self.cycle.clone());
        }
        let r = (i - self.prefix.len()) % self.cycle.len();
        let mut cycle = self.cycle[r..].to_vec();
        cycle.extend_from_slice(&self.cycle[..r]);
        LassoRun::new(Vec::new(), cycle)
    }

    /// Same run with the cycle entered `r` steps later.
    pub fn rotated(&self, r: usize) -> LassoRun {
        let r = r % self.cycle.len();
        let mut prefix = self.prefix.clone();
        prefix.extend_from_slice(&self.cycle[..r]);
        let mut cycle = self.cycle[r..].to_vec();
        cycle.extend_from_slice(&self.cycle[..r]);
        LassoRun::new(prefix, cycle)
    }

    /// Checks that consecutive states are transitions of `l`.
    pub fn validate(&self, l: &Lts) -> Result<()> {
        if self.cycle.is_empty() {
            return Err(Error::InvalidLasso("empty cycle".into()));
        }
        let n = self.period_len();
        for i in 0..n {
            let s = self.state_at(i);
            if s >= l.len() {
                return Err(Error::InvalidLasso(format!("state index {s} out of range")));
            }
            let t = self.state_at(i + 1);
            if t >= l.len() || !l.has_edge(s, t) {
                return Err(Error::InvalidLasso(format!(
                    "no transition {} -> {}",
                    l.name(s),
                    l.names().get(t).map_or("?", String::as_str)
                )));
            }
        }
        Ok(())
    }

    /// [`validate`](Self::validate) plus the run starting in the initial state.
    pub fn validate_initialized(&self, l: &Lts) -> Result<()> {
        self.validate(l)?;
        if self.state_at(0) != l.init() {
            return Err(Error::InvalidLasso("run does not start in the initial state".into()));
        }
        Ok(())
    }

    pub fn to_doc(&self, l: &Lts) -> LassoDoc {
        LassoDoc {
            prefix: l.names_of(&self.prefix),
            cycle: l.names_of(&self.cycle),
        }
    }

    pub fn from_doc(l: &Lts, doc: &LassoDoc) -> Result<LassoRun> {
        let run = LassoRun::new(l.indices_of(&doc.prefix)?, l.indices_of(&doc.cycle)?);
        run.validate(l)?;
        Ok(run)
    }

    pub fn parse(l: &Lts, document: &[u8]) -> Result<LassoRun> {
        let doc: LassoDoc = serde_json::from_slice(document)?;
        LassoRun::from_doc(l, &doc)
    }
}

/// Finite quotient of a lasso: positions `0..n` with the last one wrapping
/// to the start of the cycle.
struct Quotient<'a> {
    l: &'a Lts,
    run: &'a LassoRun,
    n: usize,
    loop_start: usize,
}

impl Quotient<'_> {
    fn next(&self, i: usize) -> usize {
        if i + 1 < self.n {
            i + 1
        } else {
            self.loop_start
        }
    }

    fn state(&self, i: usize) -> usize {
        self.run.state_at(i)
    }

    // Solves `v[i] = step(i, v[next(i)])` starting from `seed` on the cycle;
    // a least fixpoint for seed false, a greatest one for seed true.
    fn fixpoint(&self, seed: bool, step: impl Fn(usize, bool) -> bool) -> Vec<bool> {
        let mut v = vec![seed; self.n];
        loop {
            let mut changed = false;
            for i in (self.loop_start..self.n).rev() {
                let nv = step(i, v[self.next(i)]);
                if nv != v[i] {
                    v[i] = nv;
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }
        for i in (0..self.loop_start).rev() {
            v[i] = step(i, v[i + 1]);
        }
        v
    }

    fn eval(&self, f: &Formula, k: u64) -> Vec<bool> {
        let n = self.n;
        match f {
            Formula::True => vec![true; n],
            Formula::False => vec![false; n],
            Formula::Atom(a) => (0..n).map(|i| self.l.labels(self.state(i)).contains(a)).collect(),
            Formula::NegAtom(a) => (0..n).map(|i| !self.l.labels(self.state(i)).contains(a)).collect(),
            Formula::Or(cs) | Formula::And(cs) => {
                let conj = matches!(f, Formula::And(_));
                let mut acc = vec![conj; n];
                for c in cs {
                    let v = self.eval(c, k);
                    for i in 0..n {
                        acc[i] = if conj { acc[i] && v[i] } else { acc[i] || v[i] };
                    }
                }
                acc
            }
            Formula::Next(b) => {
                let v = self.eval(b, k);
                (0..n).map(|i| v[self.next(i)]).collect()
            }
            Formula::Until(lhs, rhs) => {
                let (a, b) = (self.eval(lhs, k), self.eval(rhs, k));
                self.fixpoint(false, |i, nx| b[i] || (a[i] && nx))
            }
            Formula::Release(lhs, rhs) => {
                let (a, b) = (self.eval(lhs, k), self.eval(rhs, k));
                self.fixpoint(true, |i, nx| b[i] && (a[i] || nx))
            }
            Formula::Finally(b) => {
                let v = self.eval(b, k);
                self.fixpoint(false, |i, nx| v[i] || nx)
            }
            Formula::PromptF(b) => {
                let v = self.eval(b, k);
                self.within(&v, k)
            }
            Formula::PromptMullerF(b) => {
                let v = self.eval(b, k);
                let w = self.within(&v, k);
                self.fixpoint(true, |i, nx| w[i] && nx)
            }
        }
    }

    // `∃ j ≤ k. v[i + j]`, walking real run steps. After `n + |cycle|` steps
    // every reachable class has been seen.
    fn within(&self, v: &[bool], k: u64) -> Vec<bool> {
        let horizon = (self.n + self.run.cycle.len()) as u64;
        let steps = k.min(horizon);
        (0..self.n)
            .map(|i| {
                let mut p = i;
                for j in 0..=steps {
                    if v[p] {
                        return true;
                    }
                    if j < steps {
                        p = self.next(p);
                    }
                }
                false
            })
            .collect()
    }
}

/// Exact truth of `(run, k) ⊨ f` at position 0.
pub fn eval_bounded(l: &Lts, run: &LassoRun, k: u64, f: &Formula) -> Result<bool> {
    run.validate(l)?;
    let q = Quotient {
        l,
        run,
        n: run.period_len(),
        loop_start: run.prefix.len(),
    };
    Ok(q.eval(f, k)[0])
}

// Path along the loop word from `from` to `to` (both in the loop), excluding
// `from`; empty when they coincide.
fn walk_loop(word: &[usize], from: usize, to: usize) -> Option<Vec<usize>> {
    let start = word.iter().position(|&s| s == from)?;
    let mut out = Vec::new();
    let mut j = start;
    while word[j] != to {
        j = (j + 1) % word.len();
        out.push(word[j]);
        if out.len() > word.len() {
            return None;
        }
    }
    Some(out)
}

fn check_path(l: &Lts, path: &[usize], what: &str) -> Result<()> {
    if path.is_empty() {
        return Err(Error::BrokenConnector(format!("{what} is empty")));
    }
    for w in path.windows(2) {
        if !l.has_edge(w[0], w[1]) {
            return Err(Error::BrokenConnector(format!(
                "{what}: no transition {} -> {}",
                l.name(w[0]),
                l.name(w[1])
            )));
        }
    }
    Ok(())
}

/// Builds the k-pumping `v_0 u_0^k v_1 u_1^k … v_l u_l^k` of a witness.
///
/// In whole-system scope the run then repeats the last loop forever. In SCC
/// scope it returns to the first connector and repeats the whole pumped
/// block, so the counterexample recurs infinitely often.
pub fn k_pump(l: &Lts, w: &AvoidingSequenceWitness, k: u64) -> Result<LassoRun> {
    if k == 0 {
        return Err(Error::Usage("k-pumping needs k >= 1".into()));
    }
    if w.loops.is_empty() || w.loops.len() != w.connectors.len() {
        return Err(Error::BrokenConnector("loops and connectors differ in number".into()));
    }
    check_path(l, &w.approach, "approach")?;
    if w.approach[0] != l.init() {
        return Err(Error::BrokenConnector("approach does not start in the initial state".into()));
    }
    let mut walk = w.approach.clone();
    let last = w.loops.len() - 1;
    for (i, (lp, conn)) in w.loops.iter().zip(&w.connectors).enumerate() {
        check_path(l, conn, "connector")?;
        check_path(l, lp, "loop")?;
        if lp.len() < 2 || lp[0] != lp[lp.len() - 1] {
            return Err(Error::BrokenConnector(format!("loop {i} is not closed")));
        }
        if *walk.last().unwrap() != conn[0] {
            return Err(Error::BrokenConnector(format!("connector {i} starts away from the previous loop")));
        }
        walk.extend_from_slice(&conn[1..]);
        let word = &lp[..lp.len() - 1];
        let entry = *conn.last().unwrap();
        let start = word
            .iter()
            .position(|&s| s == entry)
            .ok_or_else(|| Error::BrokenConnector(format!("connector {i} does not end on its loop")))?;
        // one full traversal from the entry back to itself
        let round: Vec<usize> = (1..=word.len()).map(|d| word[(start + d) % word.len()]).collect();
        for _ in 0..k {
            walk.extend_from_slice(&round);
        }
        let exit = if i < last {
            w.connectors[i + 1][0]
        } else if matches!(w.scope, Scope::WithinScc(_)) {
            *w.closing.first().ok_or_else(|| Error::BrokenConnector("missing closing path".into()))?
        } else {
            entry
        };
        let to_exit = walk_loop(word, entry, exit)
            .ok_or_else(|| Error::BrokenConnector(format!("loop {i} does not visit the next start")))?;
        if i == last && matches!(w.scope, Scope::WholeLts) {
            let prefix = walk;
            return Ok(LassoRun::new(prefix, round));
        }
        walk.extend(to_exit);
    }
    // SCC scope: close the block back to the first connector's start
    check_path(l, &w.closing, "closing path")?;
    walk.extend_from_slice(&w.closing[1..]);
    let anchor = w.approach.len() - 1;
    if *walk.last().unwrap() != walk[anchor] {
        return Err(Error::BrokenConnector("closing path does not return to the first connector".into()));
    }
    walk.pop();
    let cycle = walk.split_off(anchor);
    let run = LassoRun::new(walk, cycle);
    run.validate(l)?;
    Ok(run)
}

/// Every initialized lasso with `|prefix| ≤ max_prefix` and
/// `1 ≤ |cycle| ≤ max_cycle`, ordered by cycle length, then prefix length,
/// then lexicographically by state index.
pub fn enumerate_lassos(
    l: &Lts,
    max_prefix: usize,
    max_cycle: usize,
) -> Result<impl Iterator<Item = LassoRun> + '_> {
    if max_cycle == 0 {
        return Err(Error::Usage("cycle length bound must be at least 1".into()));
    }
    let shapes = (1..=max_cycle).flat_map(move |c| (0..=max_prefix).map(move |p| (p, c)));
    Ok(shapes.flat_map(move |(p, c)| {
        let mut found = Vec::new();
        let mut path = vec![l.init()];
        paths_of_len(l, &mut path, p + c, &mut |path: &[usize]| {
            if l.has_edge(path[p + c - 1], path[p]) {
                found.push(LassoRun::new(path[..p].to_vec(), path[p..].to_vec()));
            }
        });
        found.into_iter()
    }))
}

fn paths_of_len(l: &Lts, path: &mut Vec<usize>, len: usize, emit: &mut impl FnMut(&[usize])) {
    if path.len() == len {
        emit(path);
        return;
    }
    let last = *path.last().unwrap();
    for &t in l.succ(last) {
        path.push(t);
        paths_of_len(l, path, len, emit);
        path.pop();
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::parse_formula;

    fn clique() -> Lts {
        Lts::new(
            &[("a", vec!["A"]), ("b", vec!["B"])],
            "a",
            &[("a", "a"), ("a", "b"), ("b", "a"), ("b", "b")],
        )
        .unwrap()
    }

    fn p(s: &str) -> Formula {
        parse_formula(s).unwrap()
    }

    #[test]
    fn alternating_blocks_defeat_bound() {
        let l = clique();
        let run = LassoRun::new(vec![], vec![0, 0, 0, 0, 1, 1, 1, 1]);
        assert!(!eval_bounded(&l, &run, 3, &p("FPinf A | FPinf B")).unwrap());
        assert!(eval_bounded(&l, &run, 4, &p("FPinf A | FPinf B")).unwrap());
    }

    #[test]
    fn trivial_evaluations() {
        let l = clique();
        let run = LassoRun::new(vec![0], vec![1, 0]);
        assert!(eval_bounded(&l, &run, 17, &p("true")).unwrap());
        assert!(eval_bounded(&l, &LassoRun::new(vec![], vec![0]), 0, &p("FPinf A")).unwrap());
        assert!(!eval_bounded(&l, &LassoRun::new(vec![], vec![0]), 0, &p("FPinf B")).unwrap());
    }

    #[test]
    fn initialized_formula_on_two_components() {
        let l = Lts::new(&[("a", vec!["A"]), ("b", vec!["B"])], "a", &[("a", "a"), ("a", "b"), ("b", "b")]).unwrap();
        let run = LassoRun::new(vec![0], vec![1]);
        assert!(eval_bounded(&l, &run, 1, &p("F (FPinf A | FPinf B)")).unwrap());
    }

    #[test]
    fn classical_operators() {
        let l = clique();
        // a a b (a b)^ω
        let run = LassoRun::new(vec![0, 0, 1], vec![0, 1]);
        assert!(eval_bounded(&l, &run, 0, &p("A U B")).unwrap());
        assert!(!eval_bounded(&l, &run, 0, &p("X X A")).unwrap());
        assert!(eval_bounded(&l, &run, 0, &p("X X B")).unwrap());
        assert!(!eval_bounded(&l, &LassoRun::new(vec![], vec![0]), 0, &p("A U B")).unwrap());
        assert!(eval_bounded(&l, &LassoRun::new(vec![], vec![0]), 0, &p("B R A")).unwrap());
        assert!(!eval_bounded(&l, &run, 0, &p("B R A")).unwrap());
        assert!(eval_bounded(&l, &run, 2, &p("FP B")).unwrap());
        assert!(!eval_bounded(&l, &run, 1, &p("FP B")).unwrap());
        assert!(eval_bounded(&l, &run, 0, &p("F B")).unwrap());
    }

    #[test]
    fn rejects_invalid_lasso() {
        let l = Lts::new(&[("a", vec!["A"]), ("b", vec!["B"])], "a", &[("a", "a"), ("a", "b"), ("b", "b")]).unwrap();
        let bad = LassoRun::new(vec![], vec![1, 0]);
        assert!(matches!(eval_bounded(&l, &bad, 1, &p("true")), Err(Error::InvalidLasso(_))));
        assert!(matches!(
            eval_bounded(&l, &LassoRun::new(vec![0], vec![]), 1, &p("true")),
            Err(Error::InvalidLasso(_))
        ));
    }

    #[test]
    fn suffix_and_rotation() {
        let run = LassoRun::new(vec![5], vec![1, 2, 3]);
        assert_eq!(run.suffix(0), run);
        assert_eq!(run.suffix(1), LassoRun::new(vec![], vec![1, 2, 3]));
        assert_eq!(run.suffix(3), LassoRun::new(vec![], vec![3, 1, 2]));
        assert_eq!(run.rotated(1), LassoRun::new(vec![5, 1], vec![2, 3, 1]));
        for i in 0..10 {
            assert_eq!(run.rotated(2).state_at(i), run.state_at(i));
        }
    }

    #[test]
    fn enumeration_respects_initial_state() {
        let l = clique();
        let all: Vec<LassoRun> = enumerate_lassos(&l, 0, 1).unwrap().collect();
        assert_eq!(all, vec![LassoRun::new(vec![], vec![0])]);
        assert!(enumerate_lassos(&l, 2, 0).is_err());
    }

    #[test]
    fn enumeration_on_single_loop() {
        let l = Lts::new(&[("s", vec![])], "s", &[("s", "s")]).unwrap();
        let all: Vec<(usize, usize)> = enumerate_lassos(&l, 2, 2)
            .unwrap()
            .map(|r| (r.prefix.len(), r.cycle.len()))
            .collect();
        assert_eq!(all, vec![(0, 1), (1, 1), (2, 1), (0, 2), (1, 2), (2, 2)]);
    }

    #[test]
    fn lasso_document_roundtrip() {
        let l = clique();
        let run = LassoRun::parse(&l, br#"{"prefix": ["a"], "cycle": ["b", "a"]}"#).unwrap();
        assert_eq!(run, LassoRun::new(vec![0], vec![1, 0]));
        let doc = serde_json::to_string(&run.to_doc(&l)).unwrap();
        assert_eq!(doc, r#"{"prefix":["a"],"cycle":["b","a"]}"#);
        assert!(LassoRun::parse(&l, br#"{"prefix": [], "cycle": ["zz"]}"#).is_err());
    }
}
