//! Certified non-termination of the green walk on a rank-2 exchange matrix.
//!
//! From the initial seed of `[[0, a], [-b, 0]]` every green walk is forced:
//! after each mutation exactly one column is green. Writing `u_s` for the
//! green c-vector mutated at step `s` and `w_s` for the exchange weight used
//! there, the next green vector is `u_{s+1} = w_s u_s - u_{s-1}` and the
//! weights alternate. With `y_s = √w_s · u_s` this becomes
//! `y_{s+1} = c y_s - y_{s-1}` where `c = √(w_s w_{s+1})`. When `c ≥ 2` and
//! `y_s ≥ y_{s-1} ≥ 0` coordinatewise with one strict inequality, the
//! increments never shrink, so the walk stays green forever. The witness is
//! checked exactly as `w_s u_s² ≥ w_{s-1} u_{s-1}²`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::int::Int;
use crate::intmat::{check_index, Matrix};
use crate::pattern::{mutate_bc, vector_sign, Sign};
use crate::seqcalc::MutationSequence;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Rank2Step {
    /// 1-based index mutated at this step.
    pub index: usize,
    /// The green c-vector mutated.
    pub cvec: Vec<Int>,
    /// `[b_{k,other}]_+` of the current exchange matrix.
    pub weight: Int,
    /// `weight · cvec²`, coordinatewise.
    pub scaled: Vec<Int>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Rank2Certificate {
    pub matrix: Matrix,
    pub first: usize,
    pub steps: Vec<Rank2Step>,
    /// 1-based step at which the scaled magnitudes first dominate the
    /// previous step with weight product at least 4.
    pub witness_step: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum Rank2Outcome {
    /// No maximal green sequence starts with `first`.
    Certified(Rank2Certificate),
    /// The forced green walk ends with every column red.
    Terminates { seq: MutationSequence },
    /// Neither happened within the step limit.
    Undecided { steps: usize },
}

fn dominates(later: &[Int], earlier: &[Int]) -> bool {
    later.iter().zip(earlier).all(|(x, y)| x >= y) && later.iter().zip(earlier).any(|(x, y)| x > y)
}

/// Follows the green walk starting with `first` on a 2×2 exchange matrix for
/// at most `max_steps` mutations.
pub fn rank2_certificate(b: &Matrix, first: usize, max_steps: usize) -> Result<Rank2Outcome> {
    if b.n() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            found: b.n(),
        });
    }
    b.require_sign_skew_symmetric()?;
    let mut k = check_index(first, 2)?;
    let mut cur_b = b.clone();
    let mut cur_c = Matrix::identity(2);
    let mut steps: Vec<Rank2Step> = Vec::new();
    let mut dirs = Vec::new();
    let four = Int::from(4);
    for step in 1..=max_steps {
        let cvec = cur_c.column(k);
        if vector_sign(&cvec) != Some(Sign::Plus) {
            return Err(Error::InvariantBreach(format!(
                "step {step}: mutated column is not green"
            )));
        }
        let weight = cur_b[(k, 1 - k)].pos();
        let scaled: Vec<Int> = cvec.iter().map(|x| &(&weight * x) * x).collect();
        steps.push(Rank2Step {
            index: k + 1,
            cvec,
            weight,
            scaled,
        });
        dirs.push(k + 1);
        if let [.., prev, last] = steps.as_slice() {
            if &prev.weight * &last.weight >= four && dominates(&last.scaled, &prev.scaled) {
                return Ok(Rank2Outcome::Certified(Rank2Certificate {
                    matrix: b.clone(),
                    first,
                    steps,
                    witness_step: step,
                }));
            }
        }
        let (nb, nc) = mutate_bc(&cur_b, &cur_c, k);
        cur_b = nb;
        cur_c = nc;
        let green: Vec<usize> = (0..2)
            .filter(|&j| vector_sign(&cur_c.column(j)) == Some(Sign::Plus))
            .collect();
        match green.as_slice() {
            [] => {
                return Ok(Rank2Outcome::Terminates {
                    seq: MutationSequence::new(dirs),
                })
            }
            [j] if *j != k => k = *j,
            _ => {
                return Err(Error::InvariantBreach(format!(
                    "step {step}: green walk is not forced (green columns {green:?})"
                )))
            }
        }
    }
    Ok(Rank2Outcome::Undecided { steps: max_steps })
}
