//! Loading matrices, sequences and index lists from arguments and files.

use std::fs;
use std::path::Path;

use mutseq::{Int, Matrix, MutationSequence};

use crate::CliError;

/// A matrix from a file path or from inline JSON. Accepts both
/// `{"n": 2, "rows": [[0, 1], [-1, 0]]}` and a bare `[[0, 1], [-1, 0]]`.
pub fn matrix(arg: &str) -> Result<Matrix, CliError> {
    let text = if Path::new(arg).is_file() {
        fs::read_to_string(arg).map_err(|e| CliError::Usage(format!("cannot read {arg}: {e}")))?
    } else if arg.trim_start().starts_with(['[', '{']) {
        arg.to_string()
    } else {
        return Err(CliError::Usage(format!("{arg}: no such file")));
    };
    parse_matrix(&text).map_err(|e| CliError::Usage(format!("{arg}: {e}")))
}

fn parse_matrix(text: &str) -> Result<Matrix, String> {
    if text.trim_start().starts_with('[') {
        let rows: Vec<Vec<Int>> = serde_json::from_str(text).map_err(|e| e.to_string())?;
        Matrix::from_rows(&rows).map_err(|e| e.to_string())
    } else {
        serde_json::from_str(text).map_err(|e| e.to_string())
    }
}

/// A 1-based sequence such as `"3,2,1"`, `"(3,2,1)"` or `""`.
pub fn sequence(text: &str) -> Result<MutationSequence, CliError> {
    text.parse()
        .map_err(|e| CliError::Usage(format!("bad sequence {text:?}: {e}")))
}

/// Sequence from `--seq-file` when given, else from `--seq`. The file may
/// hold the comma form, a JSON array, or `{"dirs": [...]}`.
pub fn sequence_arg(
    seq: Option<&str>,
    file: Option<&Path>,
    n: usize,
) -> Result<MutationSequence, CliError> {
    let parsed = match (file, seq) {
        (Some(path), _) => {
            let text = fs::read_to_string(path)
                .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
            let text = text.trim();
            if text.starts_with('{') {
                serde_json::from_str(text)
                    .map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?
            } else if text.starts_with('[') {
                let dirs: Vec<usize> = serde_json::from_str(text)
                    .map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
                MutationSequence::new(dirs)
            } else {
                sequence(text)?
            }
        }
        (None, Some(s)) => sequence(s)?,
        (None, None) => {
            return Err(CliError::Usage(
                "one of --seq or --seq-file is required".into(),
            ))
        }
    };
    validated(parsed, n)
}

pub fn validated(seq: MutationSequence, n: usize) -> Result<MutationSequence, CliError> {
    seq.validate(n)
        .map_err(|e| CliError::Usage(e.to_string()))?;
    Ok(seq)
}

/// A list of 1-based indices, in the sequence syntax.
pub fn indices(text: &str, n: usize) -> Result<Vec<usize>, CliError> {
    Ok(validated(sequence(text)?, n)?.dirs)
}
