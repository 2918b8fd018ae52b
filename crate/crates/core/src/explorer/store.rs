//! Versioned JSON-lines persistence for [`ExchangeGraphStore`].
//!
//! Layout: a header line, one line per node, one per edge, one frontier
//! line, and a final line carrying the SHA-256 of every preceding byte.

use std::collections::{HashMap, VecDeque};
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::canon::canonicalize;
use super::graph::{ExchangeGraphStore, GraphEdge, GraphNode};
use super::SearchBudget;
use crate::error::{Error, Result};
use crate::intmat::{Matrix, Permutation};
use crate::pattern::{PatternContext, SeedPair};

pub const STORE_VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
#[allow(clippy::large_enum_variant)]
enum Line {
    Header {
        version: u32,
        b0: Matrix,
        budget: SearchBudget,
        truncated: bool,
    },
    Node {
        id: usize,
        key: String,
        depth: usize,
        path: Vec<usize>,
        relabel: Permutation,
        seed: SeedPair,
    },
    Edge(GraphEdge),
    Frontier {
        nodes: Vec<usize>,
    },
    Checksum {
        sha256: String,
    },
}

fn push_line(out: &mut Vec<u8>, line: &Line) -> Result<()> {
    serde_json::to_writer(&mut *out, line)?;
    out.push(b'\n');
    Ok(())
}

/// Serializes the store to its on-disk byte form.
pub fn encode_store(store: &ExchangeGraphStore) -> Result<Vec<u8>> {
    let mut out = Vec::new();
    push_line(
        &mut out,
        &Line::Header {
            version: STORE_VERSION,
            b0: store.b0().clone(),
            budget: store.budget(),
            truncated: store.is_truncated(),
        },
    )?;
    for node in store.nodes() {
        push_line(
            &mut out,
            &Line::Node {
                id: node.id,
                key: canonicalize(&node.seed.seed).0.digest(),
                depth: node.depth,
                path: node.path.clone(),
                relabel: node.relabel.clone(),
                seed: node.seed.clone(),
            },
        )?;
    }
    for edge in store.edges() {
        push_line(&mut out, &Line::Edge(edge.clone()))?;
    }
    push_line(
        &mut out,
        &Line::Frontier {
            nodes: store.frontier().collect(),
        },
    )?;
    let sha256 = hex::encode(Sha256::digest(&out));
    push_line(&mut out, &Line::Checksum { sha256 })?;
    Ok(out)
}

pub fn save_store(store: &ExchangeGraphStore, path: impl AsRef<Path>) -> Result<()> {
    fs::write(path, encode_store(store)?)?;
    Ok(())
}

pub fn decode_store(bytes: &[u8]) -> Result<ExchangeGraphStore> {
    let body_end = bytes
        .strip_suffix(b"\n")
        .and_then(|b| b.iter().rposition(|&c| c == b'\n'))
        .map(|i| i + 1)
        .ok_or_else(|| Error::StoreFormat("missing checksum line".into()))?;
    let (body, last) = bytes.split_at(body_end);

    let first_line = body.split(|&c| c == b'\n').next().unwrap_or_default();
    let header: serde_json::Value = serde_json::from_slice(first_line)?;
    let version = header.get("version").and_then(|v| v.as_u64()).unwrap_or(0) as u32;
    if version != STORE_VERSION {
        return Err(Error::StoreVersion {
            found: version,
            expected: STORE_VERSION,
        });
    }
    match serde_json::from_slice::<Line>(last)? {
        Line::Checksum { sha256 } if sha256 == hex::encode(Sha256::digest(body)) => {}
        Line::Checksum { .. } => return Err(Error::Checksum),
        _ => return Err(Error::StoreFormat("last line is not a checksum".into())),
    }

    let mut lines = body.split(|&c| c == b'\n').filter(|l| !l.is_empty());
    let Some(Line::Header {
        b0,
        budget,
        truncated,
        ..
    }) = lines
        .next()
        .map(serde_json::from_slice::<Line>)
        .transpose()?
    else {
        return Err(Error::StoreFormat("first line is not a header".into()));
    };
    let ctx = PatternContext::new(b0)?;
    let mut nodes = Vec::new();
    let mut edges = Vec::new();
    let mut frontier = None;
    let mut index = HashMap::new();
    for raw in lines {
        match serde_json::from_slice::<Line>(raw)? {
            Line::Node {
                id,
                key,
                depth,
                path,
                relabel,
                seed,
            } => {
                if id != nodes.len() {
                    return Err(Error::StoreFormat(format!("node {id} out of order")));
                }
                let (canon, p) = canonicalize(&seed.seed);
                if !p.is_identity() || canon.digest() != key {
                    return Err(Error::StoreFormat(format!(
                        "node {id} is not in canonical form"
                    )));
                }
                if index.insert(canon, id).is_some() {
                    return Err(Error::StoreFormat(format!(
                        "node {id} duplicates another node"
                    )));
                }
                nodes.push(GraphNode {
                    id,
                    depth,
                    path,
                    relabel,
                    seed,
                });
            }
            Line::Edge(edge) => {
                if edge.from >= nodes.len() || edge.to >= nodes.len() {
                    return Err(Error::StoreFormat(format!(
                        "edge {edge:?} refers to a missing node"
                    )));
                }
                edges.push(edge);
            }
            Line::Frontier { nodes: f } => {
                if f.iter().any(|&id| id >= nodes.len()) {
                    return Err(Error::StoreFormat(
                        "frontier refers to a missing node".into(),
                    ));
                }
                frontier = Some(VecDeque::from(f));
            }
            Line::Header { .. } | Line::Checksum { .. } => {
                return Err(Error::StoreFormat(
                    "unexpected header or checksum line".into(),
                ))
            }
        }
    }
    let frontier = frontier.ok_or_else(|| Error::StoreFormat("missing frontier line".into()))?;
    if nodes.is_empty() {
        return Err(Error::StoreFormat("store has no nodes".into()));
    }
    if truncated == frontier.is_empty() {
        return Err(Error::StoreFormat(
            "truncation flag disagrees with the frontier".into(),
        ));
    }
    Ok(ExchangeGraphStore {
        ctx,
        budget,
        nodes,
        edges,
        frontier,
        index,
    })
}

pub fn load_store(path: impl AsRef<Path>) -> Result<ExchangeGraphStore> {
    decode_store(&fs::read(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample(max_depth: usize) -> ExchangeGraphStore {
        let b = Matrix::from_i64([[0, 1, 2], [-1, 0, 1], [-1, -1, 0]]);
        ExchangeGraphStore::build(
            b,
            SearchBudget {
                max_depth,
                max_nodes: 400,
            },
            1,
        )
        .unwrap()
    }

    #[test]
    fn round_trip_is_byte_identical() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("graph.jsonl");
        let store = sample(3);
        save_store(&store, &path).unwrap();
        let loaded = load_store(&path).unwrap();
        assert_eq!(loaded, store);
        let again = dir.path().join("again.jsonl");
        save_store(&loaded, &again).unwrap();
        assert_eq!(fs::read(&path).unwrap(), fs::read(&again).unwrap());
    }

    #[test]
    fn resume_after_load_matches_uninterrupted_run() {
        let full = sample(5);
        let bytes = encode_store(&sample(2)).unwrap();
        let mut resumed = decode_store(&bytes).unwrap();
        resumed.expand(full.budget(), 2).unwrap();
        assert_eq!(resumed, full);
    }

    #[test]
    fn corruption_is_detected() {
        let bytes = encode_store(&sample(2)).unwrap();
        let text = String::from_utf8(bytes.clone()).unwrap();
        let tampered = text.replacen("\"color\":\"green\"", "\"color\":\"red\"", 1);
        assert_ne!(tampered, text);
        assert!(matches!(
            decode_store(tampered.as_bytes()),
            Err(Error::Checksum)
        ));

        let mut bad_sum = bytes.clone();
        let pos = bad_sum.len() - 4;
        bad_sum[pos] = if bad_sum[pos] == b'0' { b'1' } else { b'0' };
        assert!(matches!(decode_store(&bad_sum), Err(Error::Checksum)));

        let wrong_version = text.replacen("\"version\":1", "\"version\":9", 1);
        assert!(matches!(
            decode_store(wrong_version.as_bytes()),
            Err(Error::StoreVersion {
                found: 9,
                expected: 1
            })
        ));
        assert!(decode_store(b"").is_err());
    }
}
