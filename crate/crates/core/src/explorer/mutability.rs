//! Bounded verification that every mutation of a matrix stays
//! sign-skew-symmetric.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::intmat::Matrix;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct MutabilityOptions {
    pub depth: usize,
    /// Cap on distinct matrices visited.
    pub max_nodes: usize,
    /// Explore even when a structural shortcut applies.
    pub force_bfs: bool,
}

impl Default for MutabilityOptions {
    fn default() -> Self {
        MutabilityOptions {
            depth: 6,
            max_nodes: 100_000,
            force_bfs: false,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum MutabilityVerdict {
    /// Acyclic sign-skew-symmetric matrices are totally mutable.
    AcyclicShortcut,
    /// Mutation preserves skew-symmetrizability, hence sign-skew-symmetry.
    SkewSymmetrizableShortcut,
    /// Every mutation path up to `depth` stays sign-skew-symmetric.
    /// `complete` means the mutation class was exhausted before the limit.
    VerifiedToDepth {
        depth: usize,
        matrices: usize,
        complete: bool,
    },
    /// Mutating along `path` leaves the sign-skew-symmetric class.
    Refuted { path: Vec<usize> },
}

pub fn verify_total_mutability(b0: &Matrix, opts: MutabilityOptions) -> Result<MutabilityVerdict> {
    b0.require_sign_skew_symmetric()?;
    if !opts.force_bfs {
        if b0.is_acyclic() {
            return Ok(MutabilityVerdict::AcyclicShortcut);
        }
        if b0.skew_symmetrizer()?.is_some() {
            return Ok(MutabilityVerdict::SkewSymmetrizableShortcut);
        }
    }
    let n = b0.n();
    let mut seen = HashSet::from([b0.clone()]);
    let mut level = vec![(b0.clone(), Vec::<usize>::new())];
    let mut depth = 0;
    let mut capped = false;
    while !level.is_empty() && depth < opts.depth {
        let mut next = Vec::new();
        for (m, path) in &level {
            for k in 0..n {
                if path.last() == Some(&(k + 1)) {
                    continue;
                }
                let child = m.mutate0(k);
                let mut child_path = path.clone();
                child_path.push(k + 1);
                if !child.is_sign_skew_symmetric() {
                    return Ok(MutabilityVerdict::Refuted { path: child_path });
                }
                if seen.len() >= opts.max_nodes {
                    capped = true;
                    continue;
                }
                if seen.insert(child.clone()) {
                    next.push((child, child_path));
                }
            }
        }
        level = next;
        depth += 1;
    }
    Ok(MutabilityVerdict::VerifiedToDepth {
        depth: opts.depth,
        matrices: seen.len(),
        complete: level.is_empty() && !capped,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn shortcuts() {
        let sample3 = Matrix::from_i64([[0, 1, 2], [-1, 0, 1], [-1, -1, 0]]);
        assert_eq!(
            verify_total_mutability(&sample3, MutabilityOptions::default()).unwrap(),
            MutabilityVerdict::AcyclicShortcut
        );
        let cyc = Matrix::from_i64([[0, 1, -1], [-1, 0, 1], [1, -1, 0]]);
        assert_eq!(
            verify_total_mutability(&cyc, MutabilityOptions::default()).unwrap(),
            MutabilityVerdict::SkewSymmetrizableShortcut
        );
        let forced = MutabilityOptions {
            force_bfs: true,
            ..MutabilityOptions::default()
        };
        match verify_total_mutability(&cyc, forced).unwrap() {
            MutabilityVerdict::VerifiedToDepth {
                depth: 6, complete, ..
            } => assert!(complete),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn refutations_replay_to_a_bad_matrix() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let mut refuted = 0;
        for _ in 0..300 {
            let mut m = Matrix::zeros(3);
            for i in 0..3 {
                for j in i + 1..3 {
                    let a = rng.random_range(1..=3i64);
                    let b = rng.random_range(1..=3i64);
                    let s = if rng.random_bool(0.5) { 1 } else { -1 };
                    m[(i, j)] = (s * a).into();
                    m[(j, i)] = (-s * b).into();
                }
            }
            let opts = MutabilityOptions {
                depth: 4,
                ..MutabilityOptions::default()
            };
            if let MutabilityVerdict::Refuted { path } = verify_total_mutability(&m, opts).unwrap()
            {
                refuted += 1;
                let mut cur = m.clone();
                for (s, &k) in path.iter().enumerate() {
                    cur = cur.mutate(k).unwrap();
                    assert_eq!(cur.is_sign_skew_symmetric(), s + 1 < path.len());
                }
            }
        }
        assert!(refuted > 0);
    }
}
