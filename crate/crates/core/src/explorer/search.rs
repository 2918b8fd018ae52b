//! Breadth-first searches for maximal green and reddening sequences, and
//! depth-first enumeration of short sequences.
//!
//! The continuation of a walk depends only on its current `(B, C)`, so both
//! searches deduplicate on that pair.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use super::rank2::{rank2_certificate, Rank2Certificate, Rank2Outcome};
use super::SearchOptions;
use crate::error::{Error, Result};
use crate::intmat::{check_index, Matrix};
use crate::pattern::{mutate_bc, nonpositive_permutation, positive_permutation, vector_sign, Sign};
use crate::seqcalc::{heavy_arrow_conflict, MutationSequence};

/// Steps the rank-2 certificate may take before giving up.
const RANK2_STEPS: usize = 30;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum SearchOutcome {
    /// A shortest sequence (lexicographically first among the shortest).
    Found { seq: MutationSequence },
    /// Every branch was followed to its end: no sequence exists with the
    /// requested prefix.
    Exhausted,
    /// Proven impossible by the rank-2 growth argument.
    CertifiedNone { certificate: Rank2Certificate },
    /// Some branch was cut by the budget; nothing is claimed.
    BudgetExhausted,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchReport {
    #[serde(flatten)]
    pub outcome: SearchOutcome,
    /// Distinct `(B, C)` states stored.
    pub nodes: usize,
    /// Deepest level reached.
    pub depth: usize,
}

impl SearchReport {
    pub fn found(&self) -> Option<&MutationSequence> {
        match &self.outcome {
            SearchOutcome::Found { seq } => Some(seq),
            _ => None,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Goal {
    MaximalGreen,
    Reddening,
}

struct Node {
    b: Matrix,
    c: Matrix,
    path: Vec<usize>,
}

fn is_green(c: &Matrix, k: usize) -> Result<bool> {
    match vector_sign(&c.column(k)) {
        Some(s) => Ok(s == Sign::Plus),
        None => Err(Error::SignIncoherent {
            what: "column",
            index: k + 1,
        }),
    }
}

/// Whether `(b, c)` ends the search, asserting that a nonpositive C-matrix
/// is a negated permutation matrix.
fn is_goal(c: &Matrix) -> Result<bool> {
    Ok(nonpositive_permutation(c)?.is_some())
}

struct MagnitudeGuard {
    bits: u64,
    prune: bool,
    warned: bool,
}

impl MagnitudeGuard {
    /// `false` if the state must be dropped.
    fn admit(&mut self, b: &Matrix, c: &Matrix, path: &[usize]) -> bool {
        let bits = b.max_entry_bits().max(c.max_entry_bits());
        if bits <= self.bits {
            return true;
        }
        if !self.warned {
            log::warn!(
                "entries reach {bits} bits after {:?}; mutation growth may be unbounded",
                path
            );
            self.warned = true;
        }
        !self.prune
    }
}

fn bfs(b0: &Matrix, goal: Goal, opts: &SearchOptions) -> Result<SearchReport> {
    b0.require_sign_skew_symmetric()?;
    let n = b0.n();
    let budget = opts.budget;
    let mut guard = MagnitudeGuard {
        bits: opts.magnitude_bits,
        prune: opts.prune_on_magnitude,
        warned: false,
    };

    let mut b = b0.clone();
    let mut c = Matrix::identity(n);
    for (step, &k) in opts.forced_prefix.iter().enumerate() {
        let k0 = check_index(k, n)?;
        let blocked = goal == Goal::MaximalGreen
            && (!is_green(&c, k0)?
                || (opts.heavy_pruning && heavy_arrow_conflict(&b, k)?.is_some()));
        if blocked {
            return Ok(SearchReport {
                outcome: SearchOutcome::Exhausted,
                nodes: step + 1,
                depth: step,
            });
        }
        (b, c) = mutate_bc(&b, &c, k0);
        if !b.is_sign_skew_symmetric() {
            return Err(Error::NotTotallyMutable {
                prefix: opts.forced_prefix[..=step].to_vec(),
            });
        }
    }
    let prefix_len = opts.forced_prefix.len();
    if goal == Goal::MaximalGreen && n == 2 && prefix_len > 0 {
        if let Rank2Outcome::Certified(certificate) =
            rank2_certificate(b0, opts.forced_prefix[0], RANK2_STEPS)?
        {
            return Ok(SearchReport {
                outcome: SearchOutcome::CertifiedNone { certificate },
                nodes: 1,
                depth: prefix_len,
            });
        }
    }
    if is_goal(&c)? {
        let seq = MutationSequence::new(opts.forced_prefix.clone());
        return Ok(SearchReport {
            outcome: SearchOutcome::Found { seq },
            nodes: 1,
            depth: prefix_len,
        });
    }

    let mut seen: HashSet<(Matrix, Matrix)> = HashSet::new();
    seen.insert((b.clone(), c.clone()));
    let mut level = vec![Node {
        b,
        c,
        path: opts.forced_prefix.clone(),
    }];
    let mut depth = prefix_len;
    let mut truncated = false;
    while !level.is_empty() {
        if depth >= budget.max_depth {
            truncated = true;
            break;
        }
        let mut next = Vec::new();
        for node in &level {
            for k0 in 0..n {
                if goal == Goal::MaximalGreen {
                    if !is_green(&node.c, k0)? {
                        continue;
                    }
                    if opts.heavy_pruning && heavy_arrow_conflict(&node.b, k0 + 1)?.is_some() {
                        continue;
                    }
                } else if node.path.last() == Some(&(k0 + 1)) {
                    continue;
                }
                let (nb, nc) = mutate_bc(&node.b, &node.c, k0);
                let mut path = node.path.clone();
                path.push(k0 + 1);
                if !nb.is_sign_skew_symmetric() {
                    return Err(Error::NotTotallyMutable { prefix: path });
                }
                if !guard.admit(&nb, &nc, &path) {
                    truncated = true;
                    continue;
                }
                if is_goal(&nc)? {
                    return Ok(SearchReport {
                        outcome: SearchOutcome::Found {
                            seq: MutationSequence::new(path),
                        },
                        nodes: seen.len() + 1,
                        depth: depth + 1,
                    });
                }
                if seen.len() >= budget.max_nodes {
                    truncated = true;
                    continue;
                }
                if seen.insert((nb.clone(), nc.clone())) {
                    next.push(Node { b: nb, c: nc, path });
                }
            }
        }
        level = next;
        depth += 1;
    }
    let outcome = if truncated {
        SearchOutcome::BudgetExhausted
    } else {
        SearchOutcome::Exhausted
    };
    Ok(SearchReport {
        outcome,
        nodes: seen.len(),
        depth,
    })
}

/// Shortest maximal green sequence within the budget, searching green
/// mutations only.
pub fn find_mgs(b0: &Matrix, opts: &SearchOptions) -> Result<SearchReport> {
    bfs(b0, Goal::MaximalGreen, opts)
}

/// Shortest reddening sequence within the budget, over all mutations.
pub fn find_reddening(b0: &Matrix, opts: &SearchOptions) -> Result<SearchReport> {
    bfs(b0, Goal::Reddening, opts)
}

/// All maximal green sequences of length at most `max_len`, in
/// lexicographic order.
pub fn enumerate_mgs(
    b0: &Matrix,
    max_len: usize,
    heavy_pruning: bool,
) -> Result<Vec<MutationSequence>> {
    b0.require_sign_skew_symmetric()?;
    let mut out = Vec::new();
    let mut path = Vec::new();
    green_dfs(
        b0,
        &Matrix::identity(b0.n()),
        max_len,
        heavy_pruning,
        &mut path,
        &mut out,
    )?;
    Ok(out)
}

fn green_dfs(
    b: &Matrix,
    c: &Matrix,
    max_len: usize,
    heavy_pruning: bool,
    path: &mut Vec<usize>,
    out: &mut Vec<MutationSequence>,
) -> Result<()> {
    if is_goal(c)? {
        out.push(MutationSequence::new(path.clone()));
        return Ok(());
    }
    if path.len() >= max_len {
        return Ok(());
    }
    for k0 in 0..b.n() {
        if !is_green(c, k0)? {
            continue;
        }
        if heavy_pruning && heavy_arrow_conflict(b, k0 + 1)?.is_some() {
            continue;
        }
        let (nb, nc) = mutate_bc(b, c, k0);
        path.push(k0 + 1);
        if !nb.is_sign_skew_symmetric() {
            return Err(Error::NotTotallyMutable {
                prefix: path.clone(),
            });
        }
        green_dfs(&nb, &nc, max_len, heavy_pruning, path, out)?;
        path.pop();
    }
    Ok(())
}

/// All reduced (no immediate repetition) reddening sequences of length at
/// most `max_len`, in lexicographic order.
pub fn enumerate_reddening(b0: &Matrix, max_len: usize) -> Result<Vec<MutationSequence>> {
    enumerate_reduced(b0, max_len, |c| Ok(nonpositive_permutation(c)?.is_some()))
}

/// All nonempty reduced greening sequences of length at most `max_len`, in
/// lexicographic order.
pub fn enumerate_greening(b0: &Matrix, max_len: usize) -> Result<Vec<MutationSequence>> {
    enumerate_reduced(b0, max_len, |c| Ok(positive_permutation(c).is_some()))
}

fn enumerate_reduced(
    b0: &Matrix,
    max_len: usize,
    accept: impl Fn(&Matrix) -> Result<bool>,
) -> Result<Vec<MutationSequence>> {
    b0.require_sign_skew_symmetric()?;
    let mut out = Vec::new();
    let mut path = Vec::new();
    reduced_dfs(
        b0,
        &Matrix::identity(b0.n()),
        max_len,
        &accept,
        &mut path,
        &mut out,
    )?;
    Ok(out)
}

fn reduced_dfs(
    b: &Matrix,
    c: &Matrix,
    max_len: usize,
    accept: &impl Fn(&Matrix) -> Result<bool>,
    path: &mut Vec<usize>,
    out: &mut Vec<MutationSequence>,
) -> Result<()> {
    if !path.is_empty() && accept(c)? {
        out.push(MutationSequence::new(path.clone()));
    }
    if path.len() >= max_len {
        return Ok(());
    }
    for k0 in 0..b.n() {
        if path.last() == Some(&(k0 + 1)) {
            continue;
        }
        let (nb, nc) = mutate_bc(b, c, k0);
        path.push(k0 + 1);
        if !nb.is_sign_skew_symmetric() {
            return Err(Error::NotTotallyMutable {
                prefix: path.clone(),
            });
        }
        reduced_dfs(&nb, &nc, max_len, accept, path, out)?;
        path.pop();
    }
    Ok(())
}
