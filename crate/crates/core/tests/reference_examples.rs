mod common;

use common::load;
use num_rational::BigRational;
use promptcheck::fair::{check_bscc, fair_check};
use promptcheck::formula::{build_tree, canonicalize, parse_formula};
use promptcheck::prob::{reach_probabilities, satisfaction_probability};
use promptcheck::runs::{eval_bounded, k_pump, LassoRun};
use promptcheck::universal::{find_avoiding_sequence, universal_check, weak_check, Scope};
use promptcheck::{Error, Formula};

fn p(s: &str) -> Formula {
    parse_formula(s).unwrap()
}

const NESTED: &str = "FPinf (a | FPinf ((b & c) | FPinf d) | (FPinf c & FPinf d))";

#[test]
fn request_grant_system() {
    let l = load("request_grant.json");
    // every query is eventually granted, but not within a uniform bound
    assert!(check_bscc(&l, &[1, 2], &p("FPinf Query & FPinf Grant")).unwrap().is_empty());
    let v = universal_check(&l, &p("FPinf Query & FPinf Grant")).unwrap();
    assert!(!v.holds);
    assert_eq!(reach_probabilities(&l).bsccs, vec![(vec![1, 2], BigRational::from_integer(1.into()))]);
}

#[test]
fn two_state_clique_alternation() {
    let l = load("clique.json");
    let f = p("FPinf A | FPinf B");
    let run = LassoRun::parse(&l, &std::fs::read(common::data("cyc_a4b4.json")).unwrap()).unwrap();
    assert!(!eval_bounded(&l, &run, 3, &f).unwrap());
    assert!(eval_bounded(&l, &run, 4, &f).unwrap());
    assert!(!universal_check(&l, &f).unwrap().holds);
    assert!(!fair_check(&l, &f).unwrap().holds);
    assert!(!weak_check(&l, &f).unwrap().holds);
    assert!(!universal_check(&l, &p("F (FPinf A | FPinf B)")).unwrap().holds);
}

#[test]
fn components_separate_the_obligations() {
    let l = load("split.json");
    let f = p("F (FPinf A | FPinf B)");
    assert!(universal_check(&l, &f).unwrap().holds);
    assert!(fair_check(&l, &f).unwrap().holds);
    assert!(weak_check(&l, &f).unwrap().holds);
    assert!(matches!(weak_check(&l, &p("FPinf A | FPinf B")), Err(Error::Unsupported(_))));
    assert_eq!(satisfaction_probability(&l, &f).unwrap(), BigRational::from_integer(1.into()));
    let tree = build_tree(&canonicalize(&p("FPinf A | FPinf B")).unwrap());
    assert!(find_avoiding_sequence(&l, &tree, Scope::WithinScc(0)).is_none());
}

#[test]
fn nested_formula_on_nested_lts() {
    let l = load("nested.json");
    let v = universal_check(&l, &p(NESTED)).unwrap();
    assert!(!v.holds);
    let w = v.witness.unwrap();
    assert_eq!(w.filtration, p("FPinf (a | FPinf (b | FPinf d) | FPinf c)"));
    let loops: Vec<Vec<String>> = w.loops.iter().map(|lp| l.names_of(lp)).collect();
    let allowed = [
        vec!["s1", "s1"],
        vec!["v2", "s3", "v2"],
        vec!["s3", "v2", "s3"],
        vec!["v1", "s2", "v1"],
        vec!["s2", "v1", "s2"],
        vec!["s4", "s4"],
    ];
    assert!(loops.iter().all(|lp| allowed.iter().any(|a| a == lp)), "{loops:?}");
    let labels: Vec<String> = w.order.iter().map(|&n| w.tree.nodes[n].label.to_string()).collect();
    let pos = |x: &str| labels.iter().position(|s| s == x).unwrap();
    assert!(pos("b") < pos("d"));
    let cx = v.counterexample.unwrap();
    assert_eq!(cx.k, 7);
    assert!(!eval_bounded(&l, &cx.run, 7, &p(NESTED)).unwrap());
}

// Two copies of each loop span only k = 2 positions for the one-state loops,
// one short of a bound-2 window, so this run is a counterexample at bound 1
// but not at bound 2. `k_pump` traverses each loop k times after entering it.
#[test]
fn two_copies_per_loop_cover_bound_one() {
    let l = load("nested.json");
    let names = ["s1", "s1", "v2", "s3", "v2", "s3", "s2", "v1", "s2", "v1", "s2"];
    let run = LassoRun::new(l.indices_of(&names).unwrap(), vec![l.state("s4").unwrap()]);
    run.validate_initialized(&l).unwrap();
    let psi = p("FPinf (a | FPinf (b | FPinf d) | FPinf c)");
    assert!(!eval_bounded(&l, &run, 1, &psi).unwrap());
    assert!(eval_bounded(&l, &run, 2, &psi).unwrap());
}

#[test]
fn pumped_witness_on_nested_lts_for_small_bounds() {
    let l = load("nested.json");
    let psi = p("FPinf (a | FPinf (b | FPinf d) | FPinf c)");
    let tree = build_tree(&canonicalize(&psi).unwrap().temporal_part());
    let w = find_avoiding_sequence(&l, &tree, Scope::WholeLts).unwrap();
    for k in 1..=8 {
        let run = k_pump(&l, &w, k).unwrap();
        assert!(!eval_bounded(&l, &run, k, &psi).unwrap());
    }
    assert!(k_pump(&l, &w, 0).is_err());
}

#[test]
fn initialized_chain_and_diamond() {
    let chain = promptcheck::Lts::new(&[("a", vec![]), ("b", vec!["p"])], "a", &[("a", "a"), ("a", "b"), ("b", "b")])
        .unwrap();
    let f = p("F (FPinf p)");
    assert!(!universal_check(&chain, &f).unwrap().holds);
    assert!(fair_check(&chain, &f).unwrap().holds);
    assert_eq!(satisfaction_probability(&chain, &f).unwrap(), BigRational::from_integer(1.into()));
    let diamond = load("diamond.json");
    assert_eq!(
        satisfaction_probability(&diamond, &f).unwrap(),
        BigRational::new(1.into(), 2.into())
    );
}

#[test]
fn single_self_loop() {
    let l = promptcheck::Lts::new(&[("s", vec!["p"])], "s", &[("s", "s")]).unwrap();
    assert!(universal_check(&l, &p("FPinf p")).unwrap().holds);
}
