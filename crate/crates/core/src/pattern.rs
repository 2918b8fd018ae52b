//! Seeds `(B, C, G)` of a matrix pattern, carried together with the seed of
//! the dual pattern (initial matrix `-B0ᵀ`) at the same tree vertex.
//!
//! C-matrix mutation is computed entrywise and, when invariant checks are on,
//! re-derived in the sign-coherent matrix form `C (J_k + [ε_k(C) B]_+^{k•})`;
//! the two must agree. G-matrix mutation is likewise cross-checked against
//! `G (J_k + [-ε_k(C) B]_+^{•k})`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::int::Int;
use crate::intmat::{check_index, Matrix, Permutation};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Sign {
    #[serde(rename = "+")]
    Plus,
    #[serde(rename = "-")]
    Minus,
}

impl Sign {
    pub fn as_i32(self) -> i32 {
        match self {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }

    pub fn flip(self) -> Sign {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }
}

/// Sign of a nonzero sign-coherent vector; `None` for zero or mixed vectors.
pub fn vector_sign(v: &[Int]) -> Option<Sign> {
    let pos = v.iter().any(Int::is_positive);
    let neg = v.iter().any(Int::is_negative);
    match (pos, neg) {
        (true, false) => Some(Sign::Plus),
        (false, true) => Some(Sign::Minus),
        _ => None,
    }
}

/// `ε_k(C)`, the sign of column `k` (1-based).
pub fn column_sign(c: &Matrix, k: usize) -> Result<Sign> {
    let k0 = check_index(k, c.n())?;
    column_sign0(c, k0)
}

pub(crate) fn column_sign0(c: &Matrix, k: usize) -> Result<Sign> {
    vector_sign(&c.column(k)).ok_or(Error::SignIncoherent {
        what: "column",
        index: k + 1,
    })
}

/// `ε_k(G)`, the sign of row `k` (1-based).
pub fn row_sign(g: &Matrix, k: usize) -> Result<Sign> {
    let k0 = check_index(k, g.n())?;
    row_sign0(g, k0)
}

pub(crate) fn row_sign0(g: &Matrix, k: usize) -> Result<Sign> {
    vector_sign(g.row(k)).ok_or(Error::SignIncoherent {
        what: "row",
        index: k + 1,
    })
}

/// `±e_j` test on a vector, with `j` 0-based.
pub(crate) fn unit_index(v: &[Int]) -> Option<(usize, Sign)> {
    let mut found = None;
    for (i, x) in v.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        if found.is_some() {
            return None;
        }
        found = Some((i, *x == Int::ONE, *x == Int::from(-1)));
    }
    match found {
        Some((i, true, _)) => Some((i, Sign::Plus)),
        Some((i, _, true)) => Some((i, Sign::Minus)),
        _ => None,
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Seed {
    #[serde(rename = "B")]
    pub b: Matrix,
    #[serde(rename = "C")]
    pub c: Matrix,
    #[serde(rename = "G")]
    pub g: Matrix,
}

impl Seed {
    pub fn initial(b0: Matrix) -> Seed {
        let n = b0.n();
        Seed {
            b: b0,
            c: Matrix::identity(n),
            g: Matrix::identity(n),
        }
    }

    pub fn n(&self) -> usize {
        self.b.n()
    }

    /// Relabels the seed's indices by `p`: `B` simultaneously, `C` and `G`
    /// by columns. Rows of `C` and `G` refer to the initial vertex and stay.
    pub fn relabel(&self, p: &Permutation) -> Seed {
        Seed {
            b: self.b.permute_simultaneous(p),
            c: self.c.permute_columns(p),
            g: self.g.permute_columns(p),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SeedPair {
    #[serde(flatten)]
    pub seed: Seed,
    pub dual: Seed,
}

impl SeedPair {
    pub fn n(&self) -> usize {
        self.seed.n()
    }

    pub fn relabel(&self, p: &Permutation) -> SeedPair {
        SeedPair {
            seed: self.seed.relabel(p),
            dual: self.dual.relabel(p),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum InvariantChecks {
    Off,
    /// Two-route agreement of the C and G updates only.
    Local,
    /// Local checks plus dualities, sign-coherence and unimodularity after
    /// every mutation.
    Full,
}

/// The initial exchange matrix of a pattern and of its dual.
#[derive(Clone, Debug)]
pub struct PatternContext {
    b0: Matrix,
    dual_b0: Matrix,
    checks: InvariantChecks,
}

impl PatternContext {
    pub fn new(b0: Matrix) -> Result<PatternContext> {
        b0.require_sign_skew_symmetric()?;
        let dual_b0 = b0.transpose().neg();
        let checks = if cfg!(debug_assertions) {
            InvariantChecks::Full
        } else {
            InvariantChecks::Off
        };
        Ok(PatternContext {
            b0,
            dual_b0,
            checks,
        })
    }

    pub fn with_checks(mut self, checks: InvariantChecks) -> PatternContext {
        self.checks = checks;
        self
    }

    pub fn b0(&self) -> &Matrix {
        &self.b0
    }

    pub fn dual_b0(&self) -> &Matrix {
        &self.dual_b0
    }

    pub fn n(&self) -> usize {
        self.b0.n()
    }

    pub fn checks(&self) -> InvariantChecks {
        self.checks
    }

    pub fn initial_seed(&self) -> SeedPair {
        SeedPair {
            seed: Seed::initial(self.b0.clone()),
            dual: Seed::initial(self.dual_b0.clone()),
        }
    }

    /// Mutates both the seed and its dual at the 1-based index `k`.
    pub fn mutate_seed(&self, sp: &SeedPair, k: usize) -> Result<SeedPair> {
        let k0 = check_index(k, sp.n())?;
        if sp.n() != self.n() {
            return Err(Error::DimensionMismatch {
                expected: self.n(),
                found: sp.n(),
            });
        }
        let out = SeedPair {
            seed: mutate_one(&self.b0, &sp.seed, k0, self.checks)?,
            dual: mutate_one(&self.dual_b0, &sp.dual, k0, self.checks)?,
        };
        if self.checks == InvariantChecks::Full {
            if let Err(msg) = check_seed_pair(self, &out) {
                return Err(Error::InvariantBreach(format!(
                    "after mutation at {k}: {msg}"
                )));
            }
        }
        Ok(out)
    }

    /// Seed at the end of `dirs` (1-based) walked from `start`.
    pub fn walk(&self, start: &SeedPair, dirs: &[usize]) -> Result<SeedPair> {
        dirs.iter()
            .try_fold(start.clone(), |sp, &k| self.mutate_seed(&sp, k))
    }
}

fn mutate_one(b0: &Matrix, s: &Seed, k: usize, checks: InvariantChecks) -> Result<Seed> {
    let eps = column_sign0(&s.c, k)?;
    let c = mutate_c_entrywise(&s.b, &s.c, k);
    let g = mutate_g_entrywise(b0, &s.b, &s.c, &s.g, k);
    if checks != InvariantChecks::Off {
        let cm = mutate_c_matrix_form(&s.b, &s.c, k, eps);
        if cm != c {
            return Err(Error::InvariantBreach(format!(
                "entrywise and matrix-form C mutation disagree at {}",
                k + 1
            )));
        }
        let gm = mutate_g_matrix_form(&s.b, &s.g, k, eps);
        if gm != g {
            return Err(Error::InvariantBreach(format!(
                "entrywise and matrix-form G mutation disagree at {}",
                k + 1
            )));
        }
    }
    Ok(Seed {
        b: s.b.mutate0(k),
        c,
        g,
    })
}

/// Mutates only the exchange matrix and C-matrix at the 0-based index `k`;
/// enough for searches, whose continuations depend on `(B, C)` alone.
pub(crate) fn mutate_bc(b: &Matrix, c: &Matrix, k: usize) -> (Matrix, Matrix) {
    (b.mutate0(k), mutate_c_entrywise(b, c, k))
}

/// `c'_ij = -c_ik` for `j = k`, else `c_ij + (|c_ik| b_kj + c_ik |b_kj|) / 2`
/// (the exchange-matrix rule applied to the rows of `C` stacked under `B`).
pub(crate) fn mutate_c_entrywise(b: &Matrix, c: &Matrix, k: usize) -> Matrix {
    let n = c.n();
    let mut out = c.clone();
    for i in 0..n {
        let cik = &c[(i, k)];
        out[(i, k)] = -cik;
        if cik.is_zero() {
            continue;
        }
        for j in 0..n {
            if j == k {
                continue;
            }
            let bkj = &b[(k, j)];
            if bkj.is_zero() {
                continue;
            }
            let delta = &(&cik.abs() * bkj) + &(cik * &bkj.abs());
            if !delta.is_zero() {
                out[(i, j)] = &c[(i, j)] + &delta.half_exact();
            }
        }
    }
    out
}

/// `C (J_k + [ε B]_+^{k•})`: column `k` negated, column `j` gains
/// `[ε b_kj]_+ c_k`.
pub(crate) fn mutate_c_matrix_form(b: &Matrix, c: &Matrix, k: usize, eps: Sign) -> Matrix {
    let n = c.n();
    let mut factor = Matrix::identity(n);
    factor[(k, k)] = Int::from(-1);
    for j in 0..n {
        let v = if eps == Sign::Plus {
            b[(k, j)].clone()
        } else {
            -&b[(k, j)]
        };
        factor[(k, j)] = &factor[(k, j)] + &v.pos();
    }
    c * &factor
}

/// Column `k` becomes `-g_k + Σ_s [-b_sk]_+ g_s - Σ_s [-c_sk]_+ b0_s`, where
/// `b0_s` is column `s` of the pattern's initial matrix.
pub(crate) fn mutate_g_entrywise(
    b0: &Matrix,
    b: &Matrix,
    c: &Matrix,
    g: &Matrix,
    k: usize,
) -> Matrix {
    let n = g.n();
    let mut out = g.clone();
    for i in 0..n {
        let mut v = -&g[(i, k)];
        for s in 0..n {
            let w = (-&b[(s, k)]).pos();
            if !w.is_zero() {
                v += &(&g[(i, s)] * &w);
            }
            let w = (-&c[(s, k)]).pos();
            if !w.is_zero() {
                v = &v - &(&b0[(i, s)] * &w);
            }
        }
        out[(i, k)] = v;
    }
    out
}

/// `G (J_k + [-ε B]_+^{•k})`: only column `k` changes.
pub(crate) fn mutate_g_matrix_form(b: &Matrix, g: &Matrix, k: usize, eps: Sign) -> Matrix {
    let n = g.n();
    let mut factor = Matrix::identity(n);
    factor[(k, k)] = Int::from(-1);
    for s in 0..n {
        let v = if eps == Sign::Plus {
            -&b[(s, k)]
        } else {
            b[(s, k)].clone()
        };
        factor[(s, k)] = &factor[(s, k)] + &v.pos();
    }
    g * &factor
}

/// `G_t B_t = B0 C_t`.
pub fn check_first_duality(sp: &SeedPair, b0: &Matrix) -> bool {
    &sp.seed.g * &sp.seed.b == b0 * &sp.seed.c
}

/// `G̃_tᵀ C_t = I`.
pub fn check_second_duality(sp: &SeedPair) -> bool {
    &sp.dual.g.transpose() * &sp.seed.c == Matrix::identity(sp.n())
}

/// Every seed invariant of a vertex reached from the initial seed. Returns
/// a description of the first violation.
pub fn check_seed_pair(ctx: &PatternContext, sp: &SeedPair) -> std::result::Result<(), String> {
    let n = sp.n();
    if sp.dual.b != sp.seed.b.transpose().neg() {
        return Err("dual exchange matrix is not -Bᵀ".into());
    }
    for k in 0..n {
        let cs = column_sign0(&sp.seed.c, k).map_err(|e| e.to_string())?;
        let dcs = column_sign0(&sp.dual.c, k).map_err(|e| format!("dual {e}"))?;
        if cs != dcs {
            return Err(format!("column {} of C and C̃ have different signs", k + 1));
        }
        let gs = row_sign0(&sp.seed.g, k).map_err(|e| format!("G {e}"))?;
        let dgs = row_sign0(&sp.dual.g, k).map_err(|e| format!("G̃ {e}"))?;
        if gs != dgs {
            return Err(format!("row {} of G and G̃ have different signs", k + 1));
        }
        if unit_index(&sp.seed.c.column(k)).map(|u| u.0)
            != unit_index(&sp.dual.c.column(k)).map(|u| u.0)
        {
            return Err(format!("column {} is ±e_j in only one of C, C̃", k + 1));
        }
        if unit_index(sp.seed.g.row(k)).map(|u| u.0) != unit_index(sp.dual.g.row(k)).map(|u| u.0) {
            return Err(format!("row {} is ±e_jᵀ in only one of G, G̃", k + 1));
        }
    }
    if !check_first_duality(sp, ctx.b0()) {
        return Err("first duality G B = B0 C fails".into());
    }
    let dual_first = &sp.dual.g * &sp.dual.b == ctx.dual_b0() * &sp.dual.c;
    if !dual_first {
        return Err("first duality fails in the dual pattern".into());
    }
    if !check_second_duality(sp) {
        return Err("second duality G̃ᵀ C = I fails".into());
    }
    for (name, m) in [("C", &sp.seed.c), ("G", &sp.seed.g)] {
        let d = m.determinant();
        if d != Int::ONE && d != Int::from(-1) {
            return Err(format!("det {name} = {d}, not ±1"));
        }
    }
    Ok(())
}

/// `C_t^{t1}` for `t1 = μ_j(t0)`:
/// `(J_j + [-ε_j(G_t^{t0}) B_{t0}]_+^{j•}) C_t^{t0}`.
pub fn rebase_c_matrix(ctx: &PatternContext, sp: &SeedPair, j: usize) -> Result<Matrix> {
    let j0 = check_index(j, sp.n())?;
    let eps = row_sign0(&sp.seed.g, j0)?;
    let dual_eps = row_sign0(&sp.dual.g, j0)?;
    if eps != dual_eps {
        return Err(Error::InvariantBreach(format!(
            "row {j} of G and G̃ have different signs"
        )));
    }
    let n = sp.n();
    let b0 = ctx.b0();
    let mut factor = Matrix::identity(n);
    factor[(j0, j0)] = Int::from(-1);
    for s in 0..n {
        let v = if eps == Sign::Plus {
            -&b0[(j0, s)]
        } else {
            b0[(j0, s)].clone()
        };
        factor[(j0, s)] = &factor[(j0, s)] + &v.pos();
    }
    Ok(&factor * &sp.seed.c)
}

/// `Some(σ)` when `C` is nonpositive, in which case it must equal `-P_σ`;
/// `None` when `C` has a positive entry.
pub fn nonpositive_permutation(c: &Matrix) -> Result<Option<Permutation>> {
    if !c.is_nonpositive() {
        return Ok(None);
    }
    match c.neg().is_permutation_matrix() {
        Some(p) => Ok(Some(p)),
        None => Err(Error::InvariantBreach(format!(
            "C is nonpositive but not a negated permutation matrix: {c:?}"
        ))),
    }
}

/// `Some(σ)` when `C = P_σ`.
pub fn positive_permutation(c: &Matrix) -> Option<Permutation> {
    c.is_permutation_matrix()
}

/// `j`-hemisphere of the vertex: `Plus` iff `ε_j(G̃) = +1`.
pub fn hemisphere(sp: &SeedPair, j: usize) -> Result<Sign> {
    row_sign(&sp.dual.g, j)
}
