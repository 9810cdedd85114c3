//! Exact probabilities under the uniform successor measure.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::fair::check_bscc;
use crate::formula::{classify_fragment, Formula, FragmentClass};
use crate::lts::{self, Lts};

/// Probability of the set of runs starting with `path`.
pub fn cylinder_probability(l: &Lts, path: &[usize]) -> Result<BigRational> {
    if path.is_empty() {
        return Err(Error::InvalidPath("empty path".into()));
    }
    if let Some(&s) = path.iter().find(|&&s| s >= l.len()) {
        return Err(Error::InvalidPath(format!("state index {s} out of range")));
    }
    for w in path.windows(2) {
        if !l.has_edge(w[0], w[1]) {
            return Err(Error::InvalidPath(format!(
                "no transition {} -> {}",
                l.name(w[0]),
                l.name(w[1])
            )));
        }
    }
    if path[0] != l.init() {
        return Ok(BigRational::zero());
    }
    let denom = path[..path.len() - 1]
        .iter()
        .fold(BigInt::one(), |acc, &s| acc * BigInt::from(l.succ(s).len()));
    Ok(BigRational::new(BigInt::one(), denom))
}

/// Probability of eventually entering each reachable bottom component.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReachProfile {
    pub bsccs: Vec<(Vec<usize>, BigRational)>,
    /// Mass not accounted for by any component; always zero.
    pub residual: BigRational,
}

pub fn reach_probabilities(l: &Lts) -> ReachProfile {
    let dec = lts::sccs(l);
    let bottoms: Vec<&lts::Scc> = dec.bottoms().filter(|c| c.reachable).collect();
    let mut bottom_of = vec![usize::MAX; l.len()];
    for (j, b) in bottoms.iter().enumerate() {
        for &s in &b.states {
            bottom_of[s] = j;
        }
    }
    let probs = if bottom_of[l.init()] != usize::MAX {
        let mut v = vec![BigRational::zero(); bottoms.len()];
        v[bottom_of[l.init()]] = BigRational::one();
        v
    } else {
        solve_transient(l, &bottom_of, bottoms.len())
    };
    let total = probs.iter().fold(BigRational::zero(), |a, p| a + p);
    ReachProfile {
        bsccs: bottoms.iter().map(|b| b.states.clone()).zip(probs).collect(),
        residual: BigRational::one() - total,
    }
}

// Absorption probabilities from the initial state into each bottom
// component. The unknowns are the reachable states outside every bottom
// component; component states enter as constants on the right-hand side.
fn solve_transient(l: &Lts, bottom_of: &[usize], nb: usize) -> Vec<BigRational> {
    let reach = lts::reachable(l, &[l.init()], None);
    let transient: Vec<usize> = (0..l.len())
        .filter(|&s| reach[s] && bottom_of[s] == usize::MAX)
        .collect();
    let mut var = vec![usize::MAX; l.len()];
    for (i, &s) in transient.iter().enumerate() {
        var[s] = i;
    }
    let n = transient.len();
    // rows: [A | B] with A = I - Q and one right-hand column per component
    let mut rows: Vec<Vec<BigRational>> = transient
        .iter()
        .map(|&s| {
            let mut row = vec![BigRational::zero(); n + nb];
            row[var[s]] = BigRational::one();
            let w = BigRational::new(BigInt::one(), BigInt::from(l.succ(s).len()));
            for &t in l.succ(s) {
                if var[t] != usize::MAX {
                    row[var[t]] -= &w;
                } else {
                    row[n + bottom_of[t]] += &w;
                }
            }
            row
        })
        .collect();
    for col in 0..n {
        let pivot = (col..n)
            .find(|&r| !rows[r][col].is_zero())
            .expect("absorption system is non-singular");
        rows.swap(col, pivot);
        let inv = rows[col][col].recip();
        for x in rows[col].iter_mut() {
            *x *= &inv;
        }
        let prow = rows[col].clone();
        for (r, row) in rows.iter_mut().enumerate() {
            if r == col || row[col].is_zero() {
                continue;
            }
            let factor = row[col].clone();
            for (x, p) in row.iter_mut().zip(&prow).skip(col) {
                *x -= &factor * p;
            }
        }
    }
    let i0 = var[l.init()];
    rows[i0][n..].to_vec()
}

/// Probability that a run satisfies the initialized formula `f` for some bound.
pub fn satisfaction_probability(l: &Lts, f: &Formula) -> Result<BigRational> {
    let fragment = classify_fragment(f);
    let (FragmentClass::InitializedMuller, Formula::Finally(body)) = (fragment, f) else {
        return Err(Error::WrongFragment {
            expected: FragmentClass::InitializedMuller.name().into(),
            found: fragment.name().into(),
        });
    };
    let mut total = BigRational::zero();
    for (b, p) in reach_probabilities(l).bsccs {
        if check_bscc(l, &b, body)? == b {
            total += p;
        }
    }
    Ok(total)
}

/// `num/den` form, or just `num` for integers.
pub fn format_fraction(r: &BigRational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Decimal expansion rounded half-up to `digits` places.
pub fn format_decimal(r: &BigRational, digits: usize) -> String {
    let scale = BigInt::from(10).pow(digits as u32);
    let scaled = r.abs() * BigRational::from_integer(scale.clone());
    let half = BigRational::new(BigInt::one(), BigInt::from(2));
    let rounded = (scaled + half).floor().to_integer();
    let (int, frac) = rounded.div_rem(&scale);
    let sign = if r.is_negative() && !rounded.is_zero() { "-" } else { "" };
    if digits == 0 {
        format!("{sign}{int}")
    } else {
        format!("{sign}{int}.{:0>width$}", frac.to_string(), width = digits)
    }
}
