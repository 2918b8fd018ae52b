//! Canonical forms of seeds under relabeling of indices.
//!
//! A relabeling `p` acts on `B` simultaneously and on `C`, `G` by columns
//! (their rows refer to the initial vertex). Since `det C = ±1`, the columns
//! of `C` are pairwise distinct, so sorting them fixes a unique relabeling.
//! The key is the minimum of the `(C, B, G)` row-major entry encoding over
//! all `n!` relabelings: minimizing the `C` block alone already amounts to
//! sorting its columns lexicographically, so the sort reproduces the
//! exhaustive minimum. Seeds with repeated columns, which only arise from
//! corrupted input, fall back to the exhaustive minimization.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::int::Int;
use crate::intmat::{Matrix, Permutation};
use crate::pattern::Seed;

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CanonicalSeedKey {
    #[serde(rename = "B")]
    pub b: Matrix,
    #[serde(rename = "C")]
    pub c: Matrix,
    #[serde(rename = "G")]
    pub g: Matrix,
}

impl CanonicalSeedKey {
    fn of(seed: &Seed) -> CanonicalSeedKey {
        CanonicalSeedKey {
            b: seed.b.clone(),
            c: seed.c.clone(),
            g: seed.g.clone(),
        }
    }

    /// Hex SHA-256 of the JSON encoding.
    pub fn digest(&self) -> String {
        let bytes = serde_json::to_vec(self).expect("key serializes");
        hex::encode(Sha256::digest(&bytes))
    }

    fn encoding(&self) -> Vec<&Int> {
        self.c
            .entries()
            .iter()
            .chain(self.b.entries())
            .chain(self.g.entries())
            .collect()
    }
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur: Vec<usize> = (0..n).collect();
    heap_permute(n, &mut cur, &mut out);
    out
}

fn heap_permute(k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
    if k <= 1 {
        out.push(cur.clone());
        return;
    }
    for i in 0..k - 1 {
        heap_permute(k - 1, cur, out);
        if k.is_multiple_of(2) {
            cur.swap(i, k - 1);
        } else {
            cur.swap(0, k - 1);
        }
    }
    heap_permute(k - 1, cur, out);
}

/// Minimum of the `(C, B, G)` entry encoding over all `n!` relabelings,
/// together with a relabeling attaining it.
fn brute_force(seed: &Seed) -> (CanonicalSeedKey, Permutation) {
    let mut best: Option<(CanonicalSeedKey, Permutation)> = None;
    for images in permutations(seed.n()) {
        let p = Permutation::from_zero_based(images).expect("valid permutation");
        let key = CanonicalSeedKey::of(&seed.relabel(&p));
        let better = match &best {
            None => true,
            Some((b, _)) => key.encoding() < b.encoding(),
        };
        if better {
            best = Some((key, p));
        }
    }
    best.expect("at least one permutation")
}

/// Exhaustive canonical key, equal to the key from [`canonicalize`]; used
/// as a test oracle.
pub fn brute_force_key(seed: &Seed) -> CanonicalSeedKey {
    brute_force(seed).0
}

/// The relabeling `p` with `p · seed` canonical.
pub fn canonical_relabeling(seed: &Seed) -> Permutation {
    let n = seed.n();
    let cols: Vec<Vec<Int>> = (0..n).map(|j| seed.c.column(j)).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| cols[a].cmp(&cols[b]));
    if order.windows(2).any(|w| cols[w[0]] == cols[w[1]]) {
        return brute_force(seed).1;
    }
    let mut images = vec![0; n];
    for (rank, &j) in order.iter().enumerate() {
        images[j] = rank;
    }
    Permutation::from_zero_based(images).expect("valid permutation")
}

pub fn canonicalize(seed: &Seed) -> (CanonicalSeedKey, Permutation) {
    let p = canonical_relabeling(seed);
    (CanonicalSeedKey::of(&seed.relabel(&p)), p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pattern::PatternContext;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn permutation_count() {
        assert_eq!(permutations(4).len(), 24);
        let mut all = permutations(3);
        all.sort();
        all.dedup();
        assert_eq!(all.len(), 6);
    }

    #[test]
    fn relabeled_seeds_share_keys() {
        let b = Matrix::from_i64([[0, 1, 2], [-1, 0, 1], [-1, -1, 0]]);
        let ctx = PatternContext::new(b).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut seeds = Vec::new();
        for _ in 0..40 {
            let len = rng.random_range(0..6);
            let dirs: Vec<usize> = (0..len).map(|_| rng.random_range(1..=3)).collect();
            seeds.push(ctx.walk(&ctx.initial_seed(), &dirs).unwrap().seed);
        }
        for s in &seeds {
            for images in permutations(3) {
                let p = Permutation::from_zero_based(images).unwrap();
                let t = s.relabel(&p);
                assert_eq!(canonicalize(s).0, canonicalize(&t).0);
                assert_eq!(brute_force_key(s), brute_force_key(&t));
            }
            let (key, p) = canonicalize(s);
            assert_eq!(CanonicalSeedKey::of(&s.relabel(&p)), key);
            assert_eq!(key, brute_force_key(s));
        }
        for s in &seeds {
            for t in &seeds {
                assert_eq!(
                    canonicalize(s).0 == canonicalize(t).0,
                    brute_force_key(s) == brute_force_key(t)
                );
            }
        }
    }

    #[test]
    fn repeated_columns_fall_back_to_brute_force() {
        let seed = Seed {
            b: Matrix::from_i64([[0, 1], [-1, 0]]),
            c: Matrix::from_i64([[1, 1], [0, 0]]),
            g: Matrix::identity(2),
        };
        let (key, _) = canonicalize(&seed);
        assert_eq!(key, brute_force_key(&seed));
        assert_eq!(key.digest().len(), 64);
    }
}
