//! Fair (almost-sure) model checking.

use std::collections::HashMap;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::formula::{classify_fragment, Formula, FragmentClass};
use crate::lts::{self, Lts};
use crate::universal::{universal_check_with, CheckOptions, Mode, Verdict};

/// Outcome of the bottom-component fixpoint on one BSCC.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BsccCheckResult {
    pub component: Vec<usize>,
    pub satisfied: Vec<usize>,
}

impl BsccCheckResult {
    pub fn good(&self) -> bool {
        self.satisfied == self.component
    }
}

fn ensure_bscc(l: &Lts, b: &[usize]) -> Result<Vec<bool>> {
    if b.is_empty() || b.iter().any(|&s| s >= l.len()) {
        return Err(Error::NotBscc);
    }
    let m = lts::mask(l.len(), b);
    if b.iter().any(|&s| l.succ(s).iter().any(|&t| !m[t])) {
        return Err(Error::NotBscc);
    }
    let (comp, _) = lts::tarjan(l, Some(&m));
    if b.iter().any(|&s| comp[s] != comp[b[0]]) {
        return Err(Error::NotBscc);
    }
    Ok(m)
}

struct BsccEval<'a> {
    l: &'a Lts,
    domain: Vec<bool>,
    memo: HashMap<&'a Formula, Vec<bool>>,
}

impl<'a> BsccEval<'a> {
    fn eval(&mut self, f: &'a Formula) -> Result<Vec<bool>> {
        if let Some(v) = self.memo.get(f) {
            return Ok(v.clone());
        }
        let n = self.l.len();
        let dom = &self.domain;
        let v = match f {
            Formula::True => dom.clone(),
            Formula::False => vec![false; n],
            Formula::Atom(a) => (0..n).map(|s| dom[s] && self.l.labels(s).contains(a)).collect(),
            Formula::NegAtom(a) => (0..n).map(|s| dom[s] && !self.l.labels(s).contains(a)).collect(),
            Formula::And(cs) | Formula::Or(cs) => {
                let conj = matches!(f, Formula::And(_));
                let mut acc = if conj { self.domain.clone() } else { vec![false; n] };
                for c in cs {
                    let v = self.eval(c)?;
                    for s in 0..n {
                        acc[s] = if conj { acc[s] && v[s] } else { acc[s] || v[s] };
                    }
                }
                acc
            }
            Formula::PromptMullerF(body) => {
                let target = self.eval(body)?;
                let attracted = lts::spred_star_mask(self.l, &self.domain, &target);
                if (0..n).all(|s| !self.domain[s] || attracted[s]) {
                    self.domain.clone()
                } else {
                    vec![false; n]
                }
            }
            other => {
                return Err(Error::Unsupported(format!(
                    "operator in `{other}` is not handled inside a bottom component"
                )))
            }
        };
        self.memo.insert(f, v.clone());
        Ok(v)
    }
}

/// States of the bottom component `b` from which every run satisfies `f`
/// at bound `|S| + 1`.
pub fn check_bscc(l: &Lts, b: &[usize], f: &Formula) -> Result<Vec<usize>> {
    let domain = ensure_bscc(l, b)?;
    let mut ev = BsccEval {
        l,
        domain,
        memo: HashMap::new(),
    };
    Ok(lts::members(&ev.eval(f)?))
}

/// [`check_bscc`] on every bottom component reachable from the initial state.
pub fn check_bsccs(l: &Lts, body: &Formula, parallel: bool) -> Result<Vec<BsccCheckResult>> {
    let dec = lts::sccs(l);
    let comps: Vec<Vec<usize>> = dec
        .bottoms()
        .filter(|c| c.reachable)
        .map(|c| c.states.clone())
        .collect();
    let one = |b: &Vec<usize>| {
        check_bscc(l, b, body).map(|satisfied| BsccCheckResult {
            component: b.clone(),
            satisfied,
        })
    };
    if parallel {
        comps.par_iter().map(one).collect()
    } else {
        comps.iter().map(one).collect()
    }
}

pub fn fair_check(l: &Lts, f: &Formula) -> Result<Verdict> {
    fair_check_with(l, f, CheckOptions::default())
}

pub fn fair_check_with(l: &Lts, f: &Formula, opts: CheckOptions) -> Result<Verdict> {
    let fragment = classify_fragment(f);
    match (fragment, f) {
        (FragmentClass::InitializedMuller, Formula::Finally(body)) => {
            let bad_bsccs: Vec<Vec<usize>> = check_bsccs(l, body, opts.parallel)?
                .into_iter()
                .filter(|r| !r.good())
                .map(|r| r.component)
                .collect();
            Ok(Verdict {
                holds: bad_bsccs.is_empty(),
                mode: Mode::Fair,
                fragment,
                bound_threshold: l.len() + 1,
                witness: None,
                counterexample: None,
                bad_bsccs,
            })
        }
        _ if fragment.is_muller() => {
            let mut v = universal_check_with(l, f, opts)?;
            v.mode = Mode::Fair;
            Ok(v)
        }
        _ => Err(Error::WrongFragment {
            expected: "PromptMuller or InitializedMuller".into(),
            found: fragment.name().into(),
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::parse_formula;

    fn p(s: &str) -> Formula {
        parse_formula(s).unwrap()
    }

    fn request_grant() -> Lts {
        Lts::new(
            &[("a", vec!["Idle"]), ("b", vec!["Query"]), ("c", vec!["Grant"])],
            "a",
            &[("a", "a"), ("a", "b"), ("b", "b"), ("b", "c"), ("c", "b"), ("c", "c")],
        )
        .unwrap()
    }

    fn chain() -> Lts {
        Lts::new(&[("a", vec![]), ("b", vec!["p"])], "a", &[("a", "a"), ("a", "b"), ("b", "b")]).unwrap()
    }

    #[test]
    fn request_grant_component_fails() {
        let l = request_grant();
        assert!(check_bscc(&l, &[1, 2], &p("FPinf Query & FPinf Grant")).unwrap().is_empty());
        assert_eq!(check_bscc(&l, &[1, 2], &p("Query | Grant")).unwrap(), vec![1, 2]);
        assert_eq!(check_bscc(&l, &[1, 2], &p("Query")).unwrap(), vec![1]);
    }

    #[test]
    fn rejects_non_bottom_sets() {
        let l = request_grant();
        assert!(matches!(check_bscc(&l, &[0], &p("Idle")), Err(Error::NotBscc)));
        assert!(matches!(check_bscc(&l, &[0, 1, 2], &p("Idle")), Err(Error::NotBscc)));
        assert!(matches!(check_bscc(&l, &[1, 2], &p("X Query")), Err(Error::Unsupported(_))));
    }

    #[test]
    fn initialized_chain_separates_fair_from_universal() {
        let l = chain();
        let f = p("F (FPinf p)");
        assert!(fair_check(&l, &f).unwrap().holds);
        assert!(!crate::universal::universal_check(&l, &f).unwrap().holds);
    }

    #[test]
    fn muller_fragment_delegates() {
        let l = Lts::new(
            &[("a", vec!["A"]), ("b", vec!["B"])],
            "a",
            &[("a", "a"), ("a", "b"), ("b", "a"), ("b", "b")],
        )
        .unwrap();
        let v = fair_check(&l, &p("FPinf A | FPinf B")).unwrap();
        assert!(!v.holds);
        assert_eq!(v.mode, Mode::Fair);
        assert!(v.witness.is_some());
    }

    #[test]
    fn reports_bad_components() {
        let l = Lts::new(
            &[("s", vec![]), ("t1", vec!["p"]), ("t2", vec![])],
            "s",
            &[("s", "t1"), ("s", "t2"), ("t1", "t1"), ("t2", "t2")],
        )
        .unwrap();
        let v = fair_check(&l, &p("F (FPinf p)")).unwrap();
        assert!(!v.holds);
        assert_eq!(v.bad_bsccs, vec![vec![2]]);
    }
}
