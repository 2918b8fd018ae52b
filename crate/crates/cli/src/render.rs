//! Human-readable tables.

use std::fmt::Write;

use mutseq::pattern::column_sign;
use mutseq::{Int, Matrix, Permutation, SequenceTrace, SequenceVerdict, Sign, VerdictKind};

pub fn sign_mark(s: Sign) -> &'static str {
    match s {
        Sign::Plus => "+",
        Sign::Minus => "-",
    }
}

pub fn vector(v: &[Int]) -> String {
    let parts: Vec<String> = v.iter().map(|x| x.to_string()).collect();
    format!("[{}]", parts.join(", "))
}

pub fn indented(m: &Matrix) -> String {
    m.to_string().lines().map(|l| format!("  {l}\n")).collect()
}

/// The matrix with each column's sign (`+` green, `-` red) printed above it.
pub fn colored_c(c: &Matrix) -> String {
    let width = c
        .entries()
        .iter()
        .map(|x| x.to_string().len())
        .max()
        .unwrap_or(1);
    let marks: Vec<String> = (1..=c.n())
        .map(|k| {
            let mark = column_sign(c, k).map(sign_mark).unwrap_or("?");
            format!("{mark:>width$}")
        })
        .collect();
    format!("    {}\n{}", marks.join(" "), indented(c))
}

/// One line per step: direction, color and the c-vector mutated.
pub fn trace_table(trace: &SequenceTrace) -> String {
    let mut out = String::from("step  dir  color  c-vector\n");
    for (s, (dir, cvec)) in trace.dirs.iter().zip(&trace.cvecs).enumerate() {
        let mark = if trace.is_red(s) { "-" } else { "+" };
        let _ = writeln!(
            out,
            "{:>4}  {:>3}  {:>5}  {}",
            s + 1,
            dir,
            mark,
            vector(cvec)
        );
    }
    out
}

pub fn perm(p: &Option<Permutation>) -> String {
    match p {
        Some(p) if p.is_identity() => "id".into(),
        Some(p) => format!("{:?}", p.one_based()),
        None => "none".into(),
    }
}

/// `kind=reddening r=0 perm=id (maximal green sequence)`.
pub fn verdict(v: &SequenceVerdict) -> String {
    let kind = match v.kind {
        VerdictKind::Reddening => "reddening",
        VerdictKind::Greening => "greening",
        VerdictKind::Neither => "neither",
    };
    format!("kind={kind} r={} perm={} ({v})", v.r, perm(&v.perm))
}
