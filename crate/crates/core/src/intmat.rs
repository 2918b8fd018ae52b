//! Square integer matrices, exchange-matrix predicates and matrix mutation.
//!
//! Storage is row-major and 0-based (`m[(i, j)]` is row `i`, column `j`).
//! Every domain-level index (mutation direction, permutation image, index
//! set) crossing the public API is 1-based.

use std::collections::VecDeque;
use std::fmt;
use std::ops::{Index, IndexMut, Mul};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::int::Int;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Matrix {
    n: usize,
    data: Vec<Int>,
}

/// An exchange matrix is just a square integer matrix; the structural
/// predicates below say which ones are admissible.
pub type ExchangeMatrix = Matrix;

pub(crate) fn check_index(k: usize, n: usize) -> Result<usize> {
    if k == 0 || k > n {
        Err(Error::IndexOutOfRange { index: k, n })
    } else {
        Ok(k - 1)
    }
}

impl Matrix {
    pub fn zeros(n: usize) -> Matrix {
        Matrix {
            n,
            data: vec![Int::ZERO; n * n],
        }
    }

    pub fn identity(n: usize) -> Matrix {
        let mut m = Matrix::zeros(n);
        for i in 0..n {
            m[(i, i)] = Int::ONE;
        }
        m
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> Int) -> Matrix {
        let mut data = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                data.push(f(i, j));
            }
        }
        Matrix { n, data }
    }

    pub fn from_rows<T: Into<Int> + Clone>(rows: &[Vec<T>]) -> Result<Matrix> {
        let n = rows.len();
        if n == 0 {
            return Err(Error::EmptyMatrix);
        }
        let mut data = Vec::with_capacity(n * n);
        for row in rows {
            if row.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: row.len(),
                });
            }
            data.extend(row.iter().cloned().map(Into::into));
        }
        Ok(Matrix { n, data })
    }

    /// Convenience constructor for literals in tests and examples.
    pub fn from_i64<const N: usize>(rows: [[i64; N]; N]) -> Matrix {
        Matrix::from_fn(N, |i, j| Int::from(rows[i][j]))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn row(&self, i: usize) -> &[Int] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn column(&self, j: usize) -> Vec<Int> {
        (0..self.n).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn rows(&self) -> Vec<Vec<Int>> {
        (0..self.n).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn entries(&self) -> &[Int] {
        &self.data
    }

    pub fn transpose(&self) -> Matrix {
        Matrix::from_fn(self.n, |i, j| self[(j, i)].clone())
    }

    pub fn neg(&self) -> Matrix {
        Matrix {
            n: self.n,
            data: self.data.iter().map(|x| -x).collect(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Int::is_zero)
    }

    pub fn is_nonpositive(&self) -> bool {
        self.data.iter().all(|x| !x.is_positive())
    }

    pub fn is_nonnegative(&self) -> bool {
        self.data.iter().all(|x| !x.is_negative())
    }

    pub fn max_entry_bits(&self) -> u64 {
        self.data.iter().map(Int::bits).max().unwrap_or(0)
    }

    /// Matrix mutation at the 1-based index `k`.
    pub fn mutate(&self, k: usize) -> Result<Matrix> {
        let k = check_index(k, self.n)?;
        Ok(self.mutate0(k))
    }

    pub(crate) fn mutate0(&self, k: usize) -> Matrix {
        let n = self.n;
        let mut out = self.clone();
        for i in 0..n {
            for j in 0..n {
                if i == k || j == k {
                    out[(i, j)] = -&self[(i, j)];
                } else {
                    let bik = &self[(i, k)];
                    let bkj = &self[(k, j)];
                    if bik.is_zero() || bkj.is_zero() {
                        continue;
                    }
                    let delta = &(&bik.abs() * bkj) + &(bik * &bkj.abs());
                    if !delta.is_zero() {
                        out[(i, j)] = &self[(i, j)] + &delta.half_exact();
                    }
                }
            }
        }
        out
    }

    /// `b_ij * b_ji < 0` or `b_ij = b_ji = 0` for every pair (including the
    /// diagonal, which forces zero diagonal entries).
    pub fn is_sign_skew_symmetric(&self) -> bool {
        self.sign_skew_violation().is_none()
    }

    /// First 1-based pair `(i, j)` violating sign-skew-symmetry.
    pub fn sign_skew_violation(&self) -> Option<(usize, usize)> {
        for i in 0..self.n {
            for j in i..self.n {
                let a = self[(i, j)].signum();
                let b = self[(j, i)].signum();
                let ok = (a == 0 && b == 0) || a * b < 0;
                if !ok {
                    return Some((i + 1, j + 1));
                }
            }
        }
        None
    }

    pub fn require_sign_skew_symmetric(&self) -> Result<()> {
        match self.sign_skew_violation() {
            None => Ok(()),
            Some((i, j)) => Err(Error::NotSignSkewSymmetric { i, j }),
        }
    }

    pub fn is_skew_symmetric(&self) -> bool {
        (0..self.n).all(|i| (0..self.n).all(|j| self[(i, j)] == -&self[(j, i)]))
    }

    /// Smallest positive integer diagonal `d` with `d_i b_ij = -d_j b_ji`,
    /// normalised per connected component of the nonzero-entry graph.
    pub fn skew_symmetrizer(&self) -> Result<Option<Vec<Int>>> {
        self.require_sign_skew_symmetric()?;
        let n = self.n;
        let big = |x: &Int| x.to_bigint();
        let mut ratio: Vec<Option<BigRational>> = vec![None; n];
        let mut component = vec![usize::MAX; n];
        let mut n_components = 0;
        for root in 0..n {
            if ratio[root].is_some() {
                continue;
            }
            ratio[root] = Some(BigRational::one());
            component[root] = n_components;
            let mut queue = VecDeque::from([root]);
            while let Some(i) = queue.pop_front() {
                for j in 0..n {
                    if i == j || self[(i, j)].is_zero() || ratio[j].is_some() {
                        continue;
                    }
                    // d_j = -d_i b_ij / b_ji
                    let di = ratio[i].clone().unwrap();
                    let r = BigRational::new(-big(&self[(i, j)]), big(&self[(j, i)]));
                    ratio[j] = Some(di * r);
                    component[j] = n_components;
                    queue.push_back(j);
                }
            }
            n_components += 1;
        }
        let d: Vec<BigRational> = ratio.into_iter().map(Option::unwrap).collect();
        for i in 0..n {
            for j in 0..n {
                let lhs = &d[i] * BigRational::from(big(&self[(i, j)]));
                let rhs = -(&d[j] * BigRational::from(big(&self[(j, i)])));
                if lhs != rhs {
                    return Ok(None);
                }
            }
        }
        let mut out = vec![Int::ZERO; n];
        for c in 0..n_components {
            let members: Vec<usize> = (0..n).filter(|&i| component[i] == c).collect();
            let lcm = members
                .iter()
                .fold(BigInt::one(), |acc, &i| acc.lcm(d[i].denom()));
            let scaled: Vec<BigInt> = members
                .iter()
                .map(|&i| (&d[i] * BigRational::from(lcm.clone())).to_integer())
                .collect();
            let gcd = scaled.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
            for (&i, v) in members.iter().zip(scaled) {
                out[i] = Int::from((v / &gcd).abs());
            }
        }
        Ok(Some(out))
    }

    pub fn gamma_graph(&self) -> DirectedGraph {
        let mut edges = Vec::new();
        for i in 0..self.n {
            for j in 0..self.n {
                if self[(i, j)].is_positive() {
                    edges.push((i + 1, j + 1));
                }
            }
        }
        DirectedGraph { n: self.n, edges }
    }

    pub fn is_acyclic(&self) -> bool {
        self.gamma_graph().topological_order().is_some()
    }

    /// Row `j` (1-based) is nonnegative.
    pub fn is_source(&self, j: usize) -> Result<bool> {
        let j = check_index(j, self.n)?;
        Ok(self.row(j).iter().all(|x| !x.is_negative()))
    }

    /// Row `j` (1-based) is nonpositive.
    pub fn is_sink(&self, j: usize) -> Result<bool> {
        let j = check_index(j, self.n)?;
        Ok(self.row(j).iter().all(|x| !x.is_positive()))
    }

    /// An admissible sequence of sources, built by repeatedly mutating at the
    /// smallest remaining index that is a source of the current matrix.
    /// `None` when the matrix is not acyclic.
    pub fn admissible_source_sequence(&self) -> Result<Option<Vec<usize>>> {
        self.require_sign_skew_symmetric()?;
        if !self.is_acyclic() {
            return Ok(None);
        }
        let mut current = self.clone();
        let mut used = vec![false; self.n];
        let mut seq = Vec::with_capacity(self.n);
        for _ in 0..self.n {
            let next =
                (0..self.n).find(|&j| !used[j] && current.row(j).iter().all(|x| !x.is_negative()));
            let Some(j) = next else { return Ok(None) };
            used[j] = true;
            seq.push(j + 1);
            current = current.mutate0(j);
        }
        Ok(Some(seq))
    }

    /// Principal submatrix on the 1-based index set `v` (sorted, deduplicated).
    /// Returns the submatrix and the sorted index map (local `a` ↦ `map[a]`).
    pub fn submatrix(&self, v: &[usize]) -> Result<(Matrix, Vec<usize>)> {
        if v.is_empty() {
            return Err(Error::EmptyIndexSet);
        }
        let mut idx = v.to_vec();
        idx.sort_unstable();
        idx.dedup();
        for &i in &idx {
            check_index(i, self.n)?;
        }
        let sub = Matrix::from_fn(idx.len(), |a, b| self[(idx[a] - 1, idx[b] - 1)].clone());
        Ok((sub, idx))
    }

    /// Relabels indices: entry `(i, j)` moves to `(p(i), p(j))`.
    pub fn permute_simultaneous(&self, p: &Permutation) -> Matrix {
        let mut out = Matrix::zeros(self.n);
        for i in 0..self.n {
            for j in 0..self.n {
                out[(p.images[i], p.images[j])] = self[(i, j)].clone();
            }
        }
        out
    }

    /// Relabels columns only: column `j` moves to column `p(j)`.
    pub fn permute_columns(&self, p: &Permutation) -> Matrix {
        let mut out = Matrix::zeros(self.n);
        for i in 0..self.n {
            for j in 0..self.n {
                out[(i, p.images[j])] = self[(i, j)].clone();
            }
        }
        out
    }

    /// Exact determinant by fraction-free (Bareiss) elimination.
    pub fn determinant(&self) -> Int {
        let n = self.n;
        let mut m = self.clone();
        let mut negate = false;
        let mut prev = Int::ONE;
        for k in 0..n {
            if m[(k, k)].is_zero() {
                let Some(p) = (k + 1..n).find(|&i| !m[(i, k)].is_zero()) else {
                    return Int::ZERO;
                };
                for j in 0..n {
                    m.data.swap(k * n + j, p * n + j);
                }
                negate = !negate;
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let v = &(&m[(i, j)] * &m[(k, k)]) - &(&m[(i, k)] * &m[(k, j)]);
                    m[(i, j)] = v.div_exact(&prev);
                }
            }
            prev = m[(k, k)].clone();
        }
        let det = m[(n - 1, n - 1)].clone();
        if negate {
            -det
        } else {
            det
        }
    }

    pub fn is_permutation_matrix(&self) -> Option<Permutation> {
        let mut images = vec![usize::MAX; self.n];
        for j in 0..self.n {
            for i in 0..self.n {
                let x = &self[(i, j)];
                if *x == Int::ONE {
                    if images[j] != usize::MAX {
                        return None;
                    }
                    images[j] = i;
                } else if !x.is_zero() {
                    return None;
                }
            }
            if images[j] == usize::MAX {
                return None;
            }
        }
        Permutation::from_zero_based(images).ok()
    }
}

impl Index<(usize, usize)> for Matrix {
    type Output = Int;
    fn index(&self, (i, j): (usize, usize)) -> &Int {
        &self.data[i * self.n + j]
    }
}

impl IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Int {
        &mut self.data[i * self.n + j]
    }
}

impl Mul for &Matrix {
    type Output = Matrix;
    fn mul(self, rhs: &Matrix) -> Matrix {
        assert_eq!(self.n, rhs.n, "matrix product dimension mismatch");
        let n = self.n;
        let mut out = Matrix::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..n {
                    let b = &rhs[(k, j)];
                    if !b.is_zero() {
                        out[(i, j)] += &(a * b);
                    }
                }
            }
        }
        out
    }
}

impl std::ops::Add for &Matrix {
    type Output = Matrix;
    fn add(self, rhs: &Matrix) -> Matrix {
        assert_eq!(self.n, rhs.n, "matrix sum dimension mismatch");
        Matrix {
            n: self.n,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.rows()).finish()
    }
}

/// Right-aligned, row-major rendering.
impl fmt::Display for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let width = self
            .data
            .iter()
            .map(|x| x.to_string().len())
            .max()
            .unwrap_or(1);
        for i in 0..self.n {
            let cells: Vec<String> = self
                .row(i)
                .iter()
                .map(|x| format!("{:>width$}", x.to_string()))
                .collect();
            writeln!(f, "[ {} ]", cells.join(" "))?;
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
struct MatrixJson {
    n: usize,
    rows: Vec<Vec<Int>>,
}

/// `{"n": int, "rows": [[int, ...], ...]}`.
impl Serialize for Matrix {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        MatrixJson {
            n: self.n,
            rows: self.rows(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Matrix {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = MatrixJson::deserialize(d)?;
        if raw.rows.len() != raw.n {
            return Err(serde::de::Error::custom(format!(
                "\"n\" is {} but {} rows given",
                raw.n,
                raw.rows.len()
            )));
        }
        Matrix::from_rows(&raw.rows).map_err(serde::de::Error::custom)
    }
}

/// `Γ_B`: edge `i → j` iff `b_ij > 0`. Edges are 1-based.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DirectedGraph {
    pub n: usize,
    pub edges: Vec<(usize, usize)>,
}

impl DirectedGraph {
    /// Kahn's algorithm, smallest ready vertex first. `None` on a cycle.
    pub fn topological_order(&self) -> Option<Vec<usize>> {
        let mut indeg = vec![0usize; self.n];
        let mut out: Vec<Vec<usize>> = vec![Vec::new(); self.n];
        for &(a, b) in &self.edges {
            indeg[b - 1] += 1;
            out[a - 1].push(b - 1);
        }
        let mut ready: std::collections::BTreeSet<usize> =
            (0..self.n).filter(|&v| indeg[v] == 0).collect();
        let mut order = Vec::with_capacity(self.n);
        while let Some(v) = ready.pop_first() {
            order.push(v + 1);
            for &w in &out[v] {
                indeg[w] -= 1;
                if indeg[w] == 0 {
                    ready.insert(w);
                }
            }
        }
        (order.len() == self.n).then_some(order)
    }
}

/// A bijection on `[1, n]`. `P_σ` has `e_{σ(j)}` as its `j`-th column.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Permutation {
    images: Vec<usize>,
}

impl Permutation {
    pub fn identity(n: usize) -> Permutation {
        Permutation {
            images: (0..n).collect(),
        }
    }

    pub fn from_one_based(images: Vec<usize>) -> Result<Permutation> {
        let n = images.len();
        if images.iter().any(|&x| x == 0 || x > n) {
            return Err(Error::InvalidPermutation { images, n });
        }
        Permutation::from_zero_based(images.iter().map(|x| x - 1).collect())
            .map_err(|_| Error::InvalidPermutation { images, n })
    }

    pub(crate) fn from_zero_based(images: Vec<usize>) -> Result<Permutation> {
        let n = images.len();
        let mut seen = vec![false; n];
        for &x in &images {
            if x >= n || seen[x] {
                return Err(Error::InvalidPermutation {
                    images: images.iter().map(|x| x + 1).collect(),
                    n,
                });
            }
            seen[x] = true;
        }
        Ok(Permutation { images })
    }

    pub fn n(&self) -> usize {
        self.images.len()
    }

    /// `σ(j)` for 1-based `j`.
    pub fn apply(&self, j: usize) -> usize {
        self.images[j - 1] + 1
    }

    pub(crate) fn apply0(&self, j: usize) -> usize {
        self.images[j]
    }

    pub fn inverse(&self) -> Permutation {
        let mut inv = vec![0; self.images.len()];
        for (i, &x) in self.images.iter().enumerate() {
            inv[x] = i;
        }
        Permutation { images: inv }
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &Permutation) -> Permutation {
        Permutation {
            images: other.images.iter().map(|&x| self.images[x]).collect(),
        }
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, &x)| i == x)
    }

    pub fn one_based(&self) -> Vec<usize> {
        self.images.iter().map(|x| x + 1).collect()
    }

    pub fn matrix(&self) -> Matrix {
        perm_matrix(self)
    }
}

impl Serialize for Permutation {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.one_based().serialize(s)
    }
}

impl<'de> Deserialize<'de> for Permutation {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v = Vec::<usize>::deserialize(d)?;
        Permutation::from_one_based(v).map_err(serde::de::Error::custom)
    }
}

/// `J_j`: identity except `-1` at position `j`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SignedDiagonal {
    pub n: usize,
    pub j: usize,
}

impl SignedDiagonal {
    pub fn new(n: usize, j: usize) -> Result<SignedDiagonal> {
        check_index(j, n)?;
        Ok(SignedDiagonal { n, j })
    }

    pub fn matrix(&self) -> Matrix {
        let mut m = Matrix::identity(self.n);
        m[(self.j - 1, self.j - 1)] = Int::from(-1);
        m
    }
}

/// `[A]_+^{j•}`: zero except row `j`, which holds the positive parts of row
/// `j` of `A`.
pub fn positive_part_row(a: &Matrix, j: usize) -> Result<Matrix> {
    let j = check_index(j, a.n)?;
    let mut out = Matrix::zeros(a.n);
    for k in 0..a.n {
        out[(j, k)] = a[(j, k)].pos();
    }
    Ok(out)
}

pub fn perm_matrix(p: &Permutation) -> Matrix {
    let mut m = Matrix::zeros(p.n());
    for j in 0..p.n() {
        m[(p.apply0(j), j)] = Int::ONE;
    }
    m
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn sample3() -> Matrix {
        Matrix::from_i64([[0, 1, 2], [-1, 0, 1], [-1, -1, 0]])
    }

    fn cyclic3() -> Matrix {
        Matrix::from_i64([[0, 1, -1], [-1, 0, 1], [1, -1, 0]])
    }

    /// Scalar re-implementation of the mutation rule, kept independent of
    /// `Matrix::mutate0`.
    fn mutate_oracle(b: &[Vec<i64>], k: usize) -> Vec<Vec<i64>> {
        let n = b.len();
        let mut out = b.to_vec();
        for i in 0..n {
            for j in 0..n {
                out[i][j] = if i == k || j == k {
                    -b[i][j]
                } else {
                    b[i][j] + (b[i][k].abs() * b[k][j] + b[i][k] * b[k][j].abs()) / 2
                };
            }
        }
        out
    }

    fn to_i64(m: &Matrix) -> Vec<Vec<i64>> {
        m.rows()
            .iter()
            .map(|r| r.iter().map(|x| x.to_i64().unwrap()).collect())
            .collect()
    }

    #[test]
    fn mutation_examples() {
        let b = sample3();
        assert_eq!(
            b.mutate(1).unwrap(),
            Matrix::from_i64([[0, -1, -2], [1, 0, 1], [1, -1, 0]])
        );
        assert_eq!(
            b.mutate(3).unwrap(),
            Matrix::from_i64([[0, 1, -2], [-1, 0, -1], [1, 1, 0]])
        );
        assert_eq!(to_i64(&b.mutate(1).unwrap()), mutate_oracle(&to_i64(&b), 0));
        assert_eq!(to_i64(&b.mutate(3).unwrap()), mutate_oracle(&to_i64(&b), 2));
        assert!(matches!(
            b.mutate(0),
            Err(Error::IndexOutOfRange { index: 0, n: 3 })
        ));
        assert!(matches!(
            b.mutate(4),
            Err(Error::IndexOutOfRange { index: 4, n: 3 })
        ));
    }

    #[test]
    fn sign_skew_symmetry() {
        assert!(sample3().is_sign_skew_symmetric());
        assert!(Matrix::zeros(3).is_sign_skew_symmetric());
        assert!(!Matrix::from_i64([[0, 1], [1, 0]]).is_sign_skew_symmetric());
        assert!(!Matrix::from_i64([[1, 0], [0, 0]]).is_sign_skew_symmetric());
    }

    #[test]
    fn symmetrizers() {
        let skew = Matrix::from_i64([[0, 2, -1], [-2, 0, 3], [1, -3, 0]]);
        let ones: Vec<Int> = vec![Int::ONE; 3];
        assert_eq!(skew.skew_symmetrizer().unwrap(), Some(ones));
        assert_eq!(sample3().skew_symmetrizer().unwrap(), None);
        let d = Matrix::from_i64([[0, 1], [-2, 0]])
            .skew_symmetrizer()
            .unwrap()
            .unwrap();
        assert_eq!(d, vec![Int::from(2), Int::from(1)]);
        assert!(Matrix::from_i64([[0, 1], [1, 0]])
            .skew_symmetrizer()
            .is_err());
    }

    /// Brute force over small diagonals: the smallest (d1, d2) solving the
    /// 2-variable ratio system for [[0,1],[-2,0]] is (2,1).
    #[test]
    fn symmetrizer_brute_force_oracle() {
        let (b12, b21) = (1i64, -2i64);
        let mut best = None;
        'outer: for d1 in 1..=6i64 {
            for d2 in 1..=6i64 {
                if d1 * b12 == -(d2 * b21) {
                    best = Some((d1, d2));
                    break 'outer;
                }
            }
        }
        assert_eq!(best, Some((2, 1)));
    }

    #[test]
    fn gamma_and_acyclicity() {
        let g = sample3().gamma_graph();
        assert_eq!(g.edges, vec![(1, 2), (1, 3), (2, 3)]);
        assert!(sample3().is_acyclic());
        assert!(Matrix::zeros(2).gamma_graph().edges.is_empty());
        assert!(Matrix::zeros(2).is_acyclic());
        assert_eq!(cyclic3().gamma_graph().edges, vec![(1, 2), (2, 3), (3, 1)]);
        assert!(!cyclic3().is_acyclic());
    }

    #[test]
    fn sources_and_sinks() {
        let b = sample3();
        assert!(b.is_source(1).unwrap());
        assert!(!b.is_sink(1).unwrap());
        assert!(b.is_sink(3).unwrap());
        let z = Matrix::zeros(2);
        assert!(z.is_source(2).unwrap() && z.is_sink(2).unwrap());
    }

    #[test]
    fn admissible_sources() {
        assert_eq!(
            sample3().admissible_source_sequence().unwrap(),
            Some(vec![1, 2, 3])
        );
        assert_eq!(
            Matrix::zeros(1).admissible_source_sequence().unwrap(),
            Some(vec![1])
        );
        assert_eq!(cyclic3().admissible_source_sequence().unwrap(), None);
        // oracle: each entry is a source of the matrix mutated along the prefix
        let b = sample3();
        let seq = b.admissible_source_sequence().unwrap().unwrap();
        let mut cur = b.clone();
        for &j in &seq {
            assert!(cur.is_source(j).unwrap());
            cur = cur.mutate(j).unwrap();
        }
    }

    #[test]
    fn submatrices() {
        let b = sample3();
        let (s, map) = b.submatrix(&[1, 3]).unwrap();
        assert_eq!(s, Matrix::from_i64([[0, 2], [-1, 0]]));
        assert_eq!(map, vec![1, 3]);
        assert_eq!(b.submatrix(&[1, 2, 3]).unwrap().0, b);
        assert_eq!(b.submatrix(&[2]).unwrap().0, Matrix::zeros(1));
        assert!(matches!(b.submatrix(&[]), Err(Error::EmptyIndexSet)));
        assert!(b.submatrix(&[4]).is_err());
    }

    #[test]
    fn positive_rows_and_perm_matrices() {
        assert!(positive_part_row(&sample3(), 3).unwrap().is_zero());
        let p = Permutation::from_one_based(vec![2, 3, 1]).unwrap();
        let m = perm_matrix(&p);
        // column j is e_{σ(j)}
        assert_eq!(m.column(0), vec![Int::ZERO, Int::ONE, Int::ZERO]);
        assert_eq!(m.is_permutation_matrix(), Some(p.clone()));
        assert!(p.compose(&p.inverse()).is_identity());
        assert!(Permutation::from_one_based(vec![1, 1]).is_err());
        assert!(Permutation::from_one_based(vec![0, 1]).is_err());
    }

    #[test]
    fn determinants() {
        assert_eq!(Matrix::identity(4).determinant(), Int::ONE);
        assert_eq!(sample3().determinant(), Int::from(1));
        let m = Matrix::from_i64([[0, 1], [1, 0]]);
        assert_eq!(m.determinant(), Int::from(-1));
        let m = Matrix::from_i64([[2, 3, 1], [4, 1, 5], [7, 2, 2]]);
        assert_eq!(
            m.determinant(),
            Int::from(2 * (2 - 10) - 3 * (8 - 35) + (8 - 7))
        );
    }

    #[test]
    fn json_format() {
        let s = serde_json::to_string(&sample3()).unwrap();
        assert_eq!(s, r#"{"n":3,"rows":[[0,1,2],[-1,0,1],[-1,-1,0]]}"#);
        let back: Matrix = serde_json::from_str(&s).unwrap();
        assert_eq!(back, sample3());
        assert!(serde_json::from_str::<Matrix>(r#"{"n":2,"rows":[[0,1],[1]]}"#).is_err());
        assert!(serde_json::from_str::<Matrix>(r#"{"n":3,"rows":[[0,1],[1,0]]}"#).is_err());
    }

    fn arb_matrix(max_n: usize, bound: i64) -> impl Strategy<Value = Matrix> {
        (1..=max_n).prop_flat_map(move |n| {
            prop::collection::vec(-bound..=bound, n * n)
                .prop_map(move |v| Matrix::from_fn(n, |i, j| Int::from(v[i * n + j])))
        })
    }

    /// Random acyclic sign-skew-symmetric matrix: edges only go forward in a
    /// random order.
    fn arb_acyclic(max_n: usize) -> impl Strategy<Value = Matrix> {
        (1..=max_n).prop_flat_map(|n| {
            (
                Just(n),
                Just((0..n).collect::<Vec<_>>()).prop_shuffle(),
                prop::collection::vec((0..=2i64, 1..=3i64, 1..=3i64), n * n),
            )
                .prop_map(|(n, order, w)| {
                    let mut m = Matrix::zeros(n);
                    for a in 0..n {
                        for b in a + 1..n {
                            let (present, x, y) = w[a * n + b];
                            if present > 0 {
                                m[(order[a], order[b])] = Int::from(x);
                                m[(order[b], order[a])] = Int::from(-y);
                            }
                        }
                    }
                    m
                })
        })
    }

    proptest! {
        #[test]
        fn mutation_is_involution(b in arb_matrix(6, 5), k in 0usize..6) {
            let k = k % b.n() + 1;
            prop_assert_eq!(b.mutate(k).unwrap().mutate(k).unwrap(), b);
        }

        #[test]
        fn mutation_matches_scalar_oracle(b in arb_matrix(5, 5).prop_filter("ssk", |b| b.is_sign_skew_symmetric()), k in 0usize..5) {
            let k = k % b.n();
            prop_assert_eq!(to_i64(&b.mutate0(k)), mutate_oracle(&to_i64(&b), k));
        }

        #[test]
        fn acyclic_stays_sign_skew(b in arb_acyclic(5), path in prop::collection::vec(0usize..5, 0..=12)) {
            let mut cur = b;
            for k in path {
                cur = cur.mutate0(k % cur.n());
                prop_assert!(cur.is_sign_skew_symmetric());
            }
        }

        #[test]
        fn source_mutation_negates_row_and_column(b in arb_acyclic(5)) {
            for j in 1..=b.n() {
                let mu = b.mutate(j).unwrap();
                prop_assert_eq!(b.is_source(j).unwrap(), mu.is_sink(j).unwrap());
                if b.is_source(j).unwrap() {
                    let flipped = Matrix::from_fn(b.n(), |r, c| {
                        if r == j - 1 || c == j - 1 { -&b[(r, c)] } else { b[(r, c)].clone() }
                    });
                    prop_assert_eq!(mu, flipped);
                }
            }
        }

        #[test]
        fn symmetrizer_is_mutation_invariant(b in arb_acyclic(4), k in 0usize..4) {
            if let Some(d) = b.skew_symmetrizer().unwrap() {
                let k = k % b.n() + 1;
                prop_assert_eq!(b.mutate(k).unwrap().skew_symmetrizer().unwrap(), Some(d));
            }
        }

        #[test]
        fn positive_part_identities(a in arb_matrix(5, 4), j in 0usize..5, shuffle in Just((0..5).collect::<Vec<usize>>()).prop_shuffle()) {
            let n = a.n();
            let j = j % n + 1;
            let mut a = a;
            a[(j - 1, j - 1)] = Int::ZERO;
            let jj = SignedDiagonal::new(n, j).unwrap().matrix();
            let x = &jj + &positive_part_row(&a, j).unwrap();
            prop_assert_eq!(&x * &x, Matrix::identity(n));

            let images: Vec<usize> = shuffle.into_iter().filter(|&v| v < n).collect();
            let sigma = Permutation::from_zero_based(images).unwrap();
            let p = perm_matrix(&sigma);
            let pt = p.transpose();
            let sj = sigma.inverse().apply(j);
            prop_assert_eq!(&(&pt * &jj) * &p, SignedDiagonal::new(n, sj).unwrap().matrix());
            let lhs = &(&pt * &positive_part_row(&a, j).unwrap()) * &p;
            let rhs = positive_part_row(&(&(&pt * &a) * &p), sj).unwrap();
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn permute_simultaneous_is_conjugation(a in arb_matrix(5, 4), shuffle in Just((0..5).collect::<Vec<usize>>()).prop_shuffle()) {
            let n = a.n();
            let images: Vec<usize> = shuffle.into_iter().filter(|&v| v < n).collect();
            let sigma = Permutation::from_zero_based(images).unwrap();
            let p = perm_matrix(&sigma);
            prop_assert_eq!(a.permute_simultaneous(&sigma), &(&p * &a) * &p.transpose());
            prop_assert_eq!(a.permute_columns(&sigma), &a * &p.transpose());
        }
    }
}
