//! Mutation sequences: traces, reddening/greening classification,
//! conjugation, rotation, conjugation difference, restriction to principal
//! submatrices and the target-before-source checks.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::int::Int;
use crate::intmat::{check_index, Matrix, Permutation};
use crate::pattern::{
    nonpositive_permutation, positive_permutation, unit_index, vector_sign, PatternContext,
    SeedPair, Sign,
};

/// Directions `i_1, …, i_m`, 1-based.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct MutationSequence {
    pub dirs: Vec<usize>,
}

impl MutationSequence {
    pub fn new(dirs: Vec<usize>) -> MutationSequence {
        MutationSequence { dirs }
    }

    pub fn len(&self) -> usize {
        self.dirs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dirs.is_empty()
    }

    pub fn validate(&self, n: usize) -> Result<()> {
        for &k in &self.dirs {
            check_index(k, n)?;
        }
        Ok(())
    }

    pub fn reversed(&self) -> MutationSequence {
        MutationSequence {
            dirs: self.dirs.iter().rev().copied().collect(),
        }
    }

    /// Applies `p` to every direction.
    pub fn relabeled(&self, p: &Permutation) -> MutationSequence {
        MutationSequence {
            dirs: self.dirs.iter().map(|&k| p.apply(k)).collect(),
        }
    }
}

impl From<Vec<usize>> for MutationSequence {
    fn from(dirs: Vec<usize>) -> Self {
        MutationSequence { dirs }
    }
}

/// Parses comma-separated indices, e.g. `"3,2,1"`; the empty string is the
/// empty sequence. Surrounding parentheses and whitespace are ignored.
impl FromStr for MutationSequence {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s
            .trim()
            .trim_start_matches('(')
            .trim_end_matches(')')
            .trim();
        if s.is_empty() {
            return Ok(MutationSequence::default());
        }
        let dirs = s
            .split(',')
            .map(|t| {
                let t = t.trim();
                t.parse::<usize>()
                    .map_err(|_| Error::Precondition(format!("invalid direction {t:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(MutationSequence { dirs })
    }
}

impl fmt::Display for MutationSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.dirs.iter().map(|d| d.to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}

/// The walk `t_0 → t_m` with its seeds and c-vectors.
#[derive(Clone, Debug)]
pub struct SequenceTrace {
    pub dirs: Vec<usize>,
    /// `m + 1` seeds, `seeds[0]` being the start.
    pub seeds: Vec<SeedPair>,
    /// `cvecs[k]` is column `i_{k+1}` of `seeds[k].C`.
    pub cvecs: Vec<Vec<Int>>,
    /// Step indices (0-based) whose c-vector is negative.
    pub red_positions: Vec<usize>,
}

impl SequenceTrace {
    pub fn len(&self) -> usize {
        self.dirs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dirs.is_empty()
    }

    pub fn last(&self) -> &SeedPair {
        self.seeds.last().expect("trace has at least one seed")
    }

    pub fn red_count(&self) -> usize {
        self.red_positions.len()
    }

    pub fn is_red(&self, step: usize) -> bool {
        self.red_positions.binary_search(&step).is_ok()
    }

    pub fn colors(&self) -> Vec<Sign> {
        (0..self.len())
            .map(|s| {
                if self.is_red(s) {
                    Sign::Minus
                } else {
                    Sign::Plus
                }
            })
            .collect()
    }
}

pub fn run_sequence(ctx: &PatternContext, seq: &MutationSequence) -> Result<SequenceTrace> {
    run_from(ctx, &ctx.initial_seed(), &seq.dirs)
}

/// Walks `dirs` from `start`, measuring colors in the pattern of `ctx`.
/// Fails with the offending prefix if an exchange matrix along the way is
/// not sign-skew-symmetric.
pub fn run_from(ctx: &PatternContext, start: &SeedPair, dirs: &[usize]) -> Result<SequenceTrace> {
    let n = ctx.n();
    for &k in dirs {
        check_index(k, n)?;
    }
    let mut seeds = Vec::with_capacity(dirs.len() + 1);
    let mut cvecs = Vec::with_capacity(dirs.len());
    let mut red_positions = Vec::new();
    seeds.push(start.clone());
    for (step, &k) in dirs.iter().enumerate() {
        let cur = &seeds[step];
        let cvec = cur.seed.c.column(k - 1);
        if vector_sign(&cvec) == Some(Sign::Minus) {
            red_positions.push(step);
        }
        let next = ctx.mutate_seed(cur, k)?;
        if !next.seed.b.is_sign_skew_symmetric() {
            return Err(Error::NotTotallyMutable {
                prefix: dirs[..=step].to_vec(),
            });
        }
        cvecs.push(cvec);
        seeds.push(next);
    }
    Ok(SequenceTrace {
        dirs: dirs.to_vec(),
        seeds,
        cvecs,
        red_positions,
    })
}

/// Red-step count of `dirs` walked from `start`, without keeping the trace.
pub fn red_count_from(ctx: &PatternContext, start: &SeedPair, dirs: &[usize]) -> Result<usize> {
    let mut cur = start.clone();
    let mut red = 0;
    for &k in dirs {
        let k0 = check_index(k, ctx.n())?;
        if vector_sign(&cur.seed.c.column(k0)) == Some(Sign::Minus) {
            red += 1;
        }
        cur = ctx.mutate_seed(&cur, k)?;
    }
    Ok(red)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum VerdictKind {
    Reddening,
    Greening,
    Neither,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SequenceVerdict {
    pub kind: VerdictKind,
    /// Number of red steps.
    pub r: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub perm: Option<Permutation>,
}

impl SequenceVerdict {
    pub fn is_maximal_green(&self) -> bool {
        self.kind == VerdictKind::Reddening && self.r == 0
    }

    pub fn is_reddening(&self) -> bool {
        self.kind == VerdictKind::Reddening
    }

    pub fn is_greening(&self) -> bool {
        self.kind == VerdictKind::Greening
    }
}

impl fmt::Display for SequenceVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let perm = |f: &mut fmt::Formatter<'_>| match &self.perm {
            Some(p) => write!(f, ", permutation {:?}", p.one_based()),
            None => Ok(()),
        };
        match self.kind {
            VerdictKind::Reddening if self.r == 0 => {
                write!(f, "maximal green sequence (0-reddening)")?;
                perm(f)
            }
            VerdictKind::Reddening => {
                write!(f, "{}-reddening sequence", self.r)?;
                perm(f)
            }
            VerdictKind::Greening => {
                write!(f, "{}-greening sequence", self.r)?;
                perm(f)
            }
            VerdictKind::Neither => {
                write!(f, "neither reddening nor greening ({} red steps)", self.r)
            }
        }
    }
}

pub fn classify_trace(trace: &SequenceTrace) -> Result<SequenceVerdict> {
    let c = &trace.last().seed.c;
    let r = trace.red_count();
    if let Some(p) = nonpositive_permutation(c)? {
        return Ok(SequenceVerdict {
            kind: VerdictKind::Reddening,
            r,
            perm: Some(p),
        });
    }
    if let Some(p) = positive_permutation(c) {
        return Ok(SequenceVerdict {
            kind: VerdictKind::Greening,
            r,
            perm: Some(p),
        });
    }
    Ok(SequenceVerdict {
        kind: VerdictKind::Neither,
        r,
        perm: None,
    })
}

pub fn classify(ctx: &PatternContext, seq: &MutationSequence) -> Result<SequenceVerdict> {
    classify_trace(&run_sequence(ctx, seq)?)
}

/// Outcome of a verifier: how many items were examined and a description
/// of each violation found.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Report {
    pub checked: usize,
    pub violations: Vec<String>,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }

    fn check(&mut self, ok: bool, msg: impl FnOnce() -> String) {
        self.checked += 1;
        if !ok {
            self.violations.push(msg());
        }
    }

    pub fn merge(&mut self, other: Report) {
        self.checked += other.checked;
        self.violations.extend(other.violations);
    }
}

fn unit_counts(cvecs: &[Vec<Int>], n: usize) -> (Vec<usize>, Vec<usize>) {
    let mut plus = vec![0; n];
    let mut minus = vec![0; n];
    for v in cvecs {
        match unit_index(v) {
            Some((i, Sign::Plus)) => plus[i] += 1,
            Some((i, Sign::Minus)) => minus[i] += 1,
            None => {}
        }
    }
    (plus, minus)
}

/// Structural checks on a classified trace: every index is used and
/// `#e_j = #(-e_j) + 1` for reddening sequences (`e_j` exactly once and
/// never `-e_j` for maximal green ones), `#e_j = #(-e_j)` for greening ones.
pub fn check_reddening_wellformed(verdict: &SequenceVerdict, trace: &SequenceTrace) -> Report {
    let n = trace.seeds[0].n();
    let mut rep = Report::default();
    let (plus, minus) = unit_counts(&trace.cvecs, n);
    match verdict.kind {
        VerdictKind::Reddening => {
            let mut used = vec![false; n];
            for &k in &trace.dirs {
                used[k - 1] = true;
            }
            rep.check(used.iter().all(|&u| u), || {
                let missing: Vec<usize> = (0..n).filter(|&i| !used[i]).map(|i| i + 1).collect();
                format!("indices {missing:?} never mutated")
            });
            rep.check(trace.len() >= n, || {
                format!("length {} < n = {n}", trace.len())
            });
            for j in 0..n {
                rep.check(plus[j] == minus[j] + 1, || {
                    format!(
                        "e_{} appears {} times, -e_{} {} times",
                        j + 1,
                        plus[j],
                        j + 1,
                        minus[j]
                    )
                });
                if verdict.r == 0 {
                    rep.check(plus[j] == 1 && minus[j] == 0, || {
                        format!("maximal green: e_{} appears {} times", j + 1, plus[j])
                    });
                }
            }
        }
        VerdictKind::Greening => {
            for j in 0..n {
                rep.check(plus[j] == minus[j], || {
                    format!(
                        "e_{} appears {} times, -e_{} {} times",
                        j + 1,
                        plus[j],
                        j + 1,
                        minus[j]
                    )
                });
            }
        }
        VerdictKind::Neither => {}
    }
    rep
}

/// Crossings of the `j`-hemispheres happen exactly at steps whose c-vector
/// is `±e_j`, leaving the hemisphere of that sign.
pub fn check_hemisphere_crossings(trace: &SequenceTrace) -> Result<Report> {
    let n = trace.seeds[0].n();
    let mut rep = Report::default();
    for (step, cvec) in trace.cvecs.iter().enumerate() {
        let unit = unit_index(cvec);
        for h in 1..=n {
            let before = crate::pattern::hemisphere(&trace.seeds[step], h)?;
            let after = crate::pattern::hemisphere(&trace.seeds[step + 1], h)?;
            let expected = match unit {
                Some((i, s)) if i + 1 == h => Some(s),
                _ => None,
            };
            rep.check(
                (before != after) == expected.is_some() && expected.is_none_or(|s| before == s),
                || {
                    format!(
                        "step {}: hemisphere {h} went {before:?} -> {after:?}",
                        step + 1
                    )
                },
            );
        }
    }
    Ok(rep)
}

/// A transformed sequence together with the matrix it applies to and the
/// verdict it is predicted to receive there.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Transformed {
    pub seq: MutationSequence,
    pub matrix: Matrix,
    pub expected: SequenceVerdict,
}

fn require_red_or_green(verdict: &SequenceVerdict, what: &str) -> Result<Permutation> {
    match (&verdict.kind, &verdict.perm) {
        (VerdictKind::Reddening | VerdictKind::Greening, Some(p)) => Ok(p.clone()),
        _ => Err(Error::Precondition(format!(
            "{what} needs a reddening or greening sequence, got {verdict}"
        ))),
    }
}

/// `(j, i_1, …, i_m, σ⁻¹(j))`, predicted to be `(r+1)`-reddening (resp.
/// greening) for `μ_j(B0)` with the same permutation.
pub fn conjugate(ctx: &PatternContext, seq: &MutationSequence, j: usize) -> Result<Transformed> {
    check_index(j, ctx.n())?;
    let verdict = classify(ctx, seq)?;
    let sigma = require_red_or_green(&verdict, "conjugation")?;
    let mut dirs = Vec::with_capacity(seq.len() + 2);
    dirs.push(j);
    dirs.extend_from_slice(&seq.dirs);
    dirs.push(sigma.inverse().apply(j));
    Ok(Transformed {
        seq: MutationSequence { dirs },
        matrix: ctx.b0().mutate(j)?,
        expected: SequenceVerdict {
            r: verdict.r + 1,
            ..verdict
        },
    })
}

/// `(i_2, …, i_m, σ⁻¹(i_1))`, predicted to keep the verdict for `μ_{i_1}(B0)`.
pub fn rotate(ctx: &PatternContext, seq: &MutationSequence) -> Result<Transformed> {
    let Some(&first) = seq.dirs.first() else {
        return Err(Error::Precondition(
            "cannot rotate the empty sequence".into(),
        ));
    };
    let verdict = classify(ctx, seq)?;
    let sigma = require_red_or_green(&verdict, "rotation")?;
    let mut dirs = seq.dirs[1..].to_vec();
    dirs.push(sigma.inverse().apply(first));
    Ok(Transformed {
        seq: MutationSequence { dirs },
        matrix: ctx.b0().mutate(first)?,
        expected: verdict,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConjugationDifference {
    pub phi: i64,
    /// Red steps walking the path back from `t` to `t_0`.
    pub path_red: usize,
    /// Red steps walking the relabeled path back from `t⁻` to `t_0⁻`.
    pub shadow_red: usize,
    /// `σ` with `C_{t_0⁻} = -P_σ`.
    pub perm: Permutation,
}

/// Conjugation difference of the vertex `t` reached from `t_0` by `path`,
/// using the end of `reddening` as `t_0⁻`. All colors are measured in the
/// pattern rooted at `t_0`.
pub fn conjugation_difference(
    ctx: &PatternContext,
    path: &MutationSequence,
    reddening: &MutationSequence,
) -> Result<ConjugationDifference> {
    path.validate(ctx.n())?;
    let trace = run_sequence(ctx, reddening)?;
    let verdict = classify_trace(&trace)?;
    let sigma = match (verdict.kind, verdict.perm) {
        (VerdictKind::Reddening, Some(p)) => p,
        _ => {
            return Err(Error::Precondition(format!(
                "{reddening} is not a reddening sequence of the initial matrix"
            )))
        }
    };
    let t0 = ctx.initial_seed();
    let t = ctx.walk(&t0, &path.dirs)?;
    let back = path.reversed();
    let path_red = red_count_from(ctx, &t, &back.dirs)?;

    let inv = sigma.inverse();
    let shadow = path.relabeled(&inv);
    let t_minus = ctx.walk(trace.last(), &shadow.dirs)?;
    let shadow_red = red_count_from(ctx, &t_minus, &shadow.reversed().dirs)?;
    Ok(ConjugationDifference {
        phi: path_red as i64 - shadow_red as i64,
        path_red,
        shadow_red,
        perm: sigma,
    })
}

/// Computes the conjugation difference once per supplied reddening sequence
/// and fails if the values disagree.
pub fn conjugation_difference_checked(
    ctx: &PatternContext,
    path: &MutationSequence,
    reddenings: &[MutationSequence],
) -> Result<ConjugationDifference> {
    let Some((first, rest)) = reddenings.split_first() else {
        return Err(Error::Precondition("no reddening sequence supplied".into()));
    };
    let d = conjugation_difference(ctx, path, first)?;
    for other in rest {
        let e = conjugation_difference(ctx, path, other)?;
        if e.phi != d.phi {
            return Err(Error::InvariantBreach(format!(
                "conjugation difference of {path} is {} via {first} but {} via {other}",
                d.phi, e.phi
            )));
        }
    }
    Ok(d)
}

/// Smallest `k` such that `c_k, …, c_{m-1}` are all nonnegative.
pub fn green_tail(trace: &SequenceTrace) -> usize {
    match trace.red_positions.last() {
        Some(&last) => last + 1,
        None => 0,
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Restriction {
    /// `B0^V`.
    pub matrix: Matrix,
    /// Sorted `V`; local index `a` (1-based) corresponds to `indices[a-1]`.
    pub indices: Vec<usize>,
    pub seq: MutationSequence,
}

/// Sequence induced on the principal submatrix `B0^V` by keeping the steps
/// whose c-vector is supported in `V` and replaying their projections.
pub fn restrict_to_submatrix(
    ctx: &PatternContext,
    seq: &MutationSequence,
    v: &[usize],
) -> Result<Restriction> {
    let (sub, indices) = ctx.b0().submatrix(v)?;
    let trace = run_sequence(ctx, seq)?;
    let sub_ctx = PatternContext::new(sub.clone())?.with_checks(ctx.checks());
    let inside: Vec<bool> = {
        let mut m = vec![false; ctx.n()];
        for &i in &indices {
            m[i - 1] = true;
        }
        m
    };
    let mut cur = sub_ctx.initial_seed();
    let mut dirs = Vec::new();
    for (step, cvec) in trace.cvecs.iter().enumerate() {
        if cvec
            .iter()
            .enumerate()
            .any(|(i, x)| !x.is_zero() && !inside[i])
        {
            continue;
        }
        let projected: Vec<Int> = indices.iter().map(|&i| cvec[i - 1].clone()).collect();
        let matches: Vec<usize> = (0..sub.n())
            .filter(|&a| cur.seed.c.column(a) == projected)
            .collect();
        let a = match matches.as_slice() {
            [a] => *a,
            [] => {
                return Err(Error::Restriction {
                    step: step + 1,
                    reason: format!("no column equals {projected:?}"),
                })
            }
            _ => {
                return Err(Error::Restriction {
                    step: step + 1,
                    reason: format!("several columns equal {projected:?}"),
                })
            }
        };
        dirs.push(a + 1);
        cur = sub_ctx.mutate_seed(&cur, a + 1)?;
    }
    Ok(Restriction {
        matrix: sub,
        indices,
        seq: MutationSequence { dirs },
    })
}

/// Ordered pairs `(i, j)` (1-based) with `b_ji > 0` and `-b_ji b_ij ≥ 4`.
pub fn heavy_pairs(b: &Matrix) -> Vec<(usize, usize)> {
    let n = b.n();
    let four = Int::from(4);
    let mut out = Vec::new();
    for i in 0..n {
        for j in 0..n {
            if i != j && b[(j, i)].is_positive() && -(&b[(j, i)] * &b[(i, j)]) >= four {
                out.push((i + 1, j + 1));
            }
        }
    }
    out
}

/// Some `i` (1-based) making index `j` the target of a heavy arrow:
/// `b_ji > 0` and `-b_ij b_ji ≥ 4`. Maximal green sequences never mutate
/// at such a `j`.
pub fn heavy_arrow_conflict(b: &Matrix, j: usize) -> Result<Option<usize>> {
    let j0 = check_index(j, b.n())?;
    let four = Int::from(4);
    Ok((0..b.n())
        .find(|&i| i != j0 && b[(j0, i)].is_positive() && -(&b[(i, j0)] * &b[(j0, i)]) >= four)
        .map(|i| i + 1))
}

fn require_maximal_green(ctx: &PatternContext, seq: &MutationSequence) -> Result<SequenceTrace> {
    let trace = run_sequence(ctx, seq)?;
    let verdict = classify_trace(&trace)?;
    if !verdict.is_maximal_green() {
        return Err(Error::Precondition(format!(
            "{seq} is not a maximal green sequence: {verdict}"
        )));
    }
    Ok(trace)
}

fn first_position<T: PartialEq>(items: &[T], x: &T) -> Option<usize> {
    items.iter().position(|y| y == x)
}

/// For every heavy pair `(i, j)` of an acyclic `B0`, the first mutation at
/// `i` precedes the first mutation at `j` in the maximal green sequence.
pub fn verify_target_before_source(ctx: &PatternContext, mgs: &MutationSequence) -> Result<Report> {
    if !ctx.b0().is_acyclic() {
        return Err(Error::Precondition("initial matrix is not acyclic".into()));
    }
    require_maximal_green(ctx, mgs)?;
    let mut rep = Report::default();
    for (i, j) in heavy_pairs(ctx.b0()) {
        let q = first_position(&mgs.dirs, &i);
        let p = first_position(&mgs.dirs, &j);
        rep.check(matches!((q, p), (Some(q), Some(p)) if q < p), || {
            format!("pair ({i},{j}): first {i} at {q:?}, first {j} at {p:?} in {mgs}")
        });
    }
    Ok(rep)
}

/// For every heavy pair `(i, j)` of `B0`: if both `e_i` and `e_j` occur in
/// the green tail of the reddening sequence, `e_i` occurs first.
pub fn verify_tbs_cvectors(ctx: &PatternContext, seq: &MutationSequence) -> Result<Report> {
    let trace = run_sequence(ctx, seq)?;
    if !classify_trace(&trace)?.is_reddening() {
        return Err(Error::Precondition(format!(
            "{seq} is not a reddening sequence"
        )));
    }
    let tail: Vec<Option<(usize, Sign)>> = trace.cvecs[green_tail(&trace)..]
        .iter()
        .map(|v| unit_index(v))
        .collect();
    let mut rep = Report::default();
    for (i, j) in heavy_pairs(ctx.b0()) {
        let pi = first_position(&tail, &Some((i - 1, Sign::Plus)));
        let pj = first_position(&tail, &Some((j - 1, Sign::Plus)));
        if let (Some(pi), Some(pj)) = (pi, pj) {
            rep.check(pi < pj, || {
                format!("pair ({i},{j}): e_{j} precedes e_{i} in the green tail of {seq}")
            });
        }
    }
    Ok(rep)
}

/// No step of the maximal green sequence mutates at the target of a heavy
/// arrow of the current exchange matrix.
pub fn verify_no_heavy_target_mutation(
    ctx: &PatternContext,
    mgs: &MutationSequence,
) -> Result<Report> {
    let trace = require_maximal_green(ctx, mgs)?;
    let mut rep = Report::default();
    for (step, &j) in mgs.dirs.iter().enumerate() {
        let conflict = heavy_arrow_conflict(&trace.seeds[step].seed.b, j)?;
        rep.check(conflict.is_none(), || {
            format!(
                "step {}: index {j} is the target of a heavy arrow from {:?}",
                step + 1,
                conflict
            )
        });
    }
    Ok(rep)
}
