//! The exchange graph explored breadth-first from the initial seed.
//!
//! Each node holds a canonical representative seed. A node also records a
//! discovery path of actual directions from the initial vertex, and the
//! relabeling `τ` with `representative = τ · (seed at the end of the path)`.
//! An edge `(X, k, Y, q)` means `μ_k(rep_X) = q⁻¹ · rep_Y`, i.e. `q` relabels
//! the mutated seed into `Y`'s representative.

use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashMap, VecDeque};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::canon::{canonicalize, CanonicalSeedKey};
use super::SearchBudget;
use crate::error::{Error, Result};
use crate::intmat::{Matrix, Permutation};
use crate::pattern::{check_seed_pair, column_sign0, PatternContext, SeedPair, Sign};
use crate::seqcalc::MutationSequence;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EdgeColor {
    Green,
    Red,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GraphNode {
    pub id: usize,
    pub depth: usize,
    pub path: Vec<usize>,
    pub relabel: Permutation,
    pub seed: SeedPair,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphEdge {
    pub from: usize,
    /// Direction in the source representative's labeling, 1-based.
    pub dir: usize,
    pub to: usize,
    pub color: EdgeColor,
    pub perm: Permutation,
}

/// A path from the initial vertex, expressed as actual directions, together
/// with the number of red (opposite) arrows it traverses.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReddeningPath {
    pub seq: MutationSequence,
    pub red: usize,
    pub target: usize,
}

#[derive(Clone, Debug)]
pub struct ExchangeGraphStore {
    pub(super) ctx: PatternContext,
    pub(super) budget: SearchBudget,
    pub(super) nodes: Vec<GraphNode>,
    pub(super) edges: Vec<GraphEdge>,
    pub(super) frontier: VecDeque<usize>,
    pub(super) index: HashMap<CanonicalSeedKey, usize>,
}

impl PartialEq for ExchangeGraphStore {
    fn eq(&self, other: &Self) -> bool {
        self.ctx.b0() == other.ctx.b0()
            && self.budget == other.budget
            && self.nodes == other.nodes
            && self.edges == other.edges
            && self.frontier == other.frontier
    }
}

/// Children of one node, computed without touching the store.
struct Expansion {
    parent: usize,
    children: Vec<(CanonicalSeedKey, Permutation, SeedPair, EdgeColor)>,
}

/// Nodes handed to the worker pool at once, per worker.
const BATCH_PER_WORKER: usize = 32;

impl ExchangeGraphStore {
    /// A store holding only the initial vertex.
    pub fn new(b0: Matrix, budget: SearchBudget) -> Result<ExchangeGraphStore> {
        let ctx = PatternContext::new(b0)?;
        let start = ctx.initial_seed();
        let (key, p) = canonicalize(&start.seed);
        let root = GraphNode {
            id: 0,
            depth: 0,
            path: Vec::new(),
            relabel: p.clone(),
            seed: start.relabel(&p),
        };
        Ok(ExchangeGraphStore {
            ctx,
            budget,
            nodes: vec![root],
            edges: Vec::new(),
            frontier: VecDeque::from([0]),
            index: HashMap::from([(key, 0)]),
        })
    }

    pub fn build(b0: Matrix, budget: SearchBudget, workers: usize) -> Result<ExchangeGraphStore> {
        let mut store = ExchangeGraphStore::new(b0, budget)?;
        store.expand(budget, workers)?;
        Ok(store)
    }

    pub fn b0(&self) -> &Matrix {
        self.ctx.b0()
    }

    pub fn budget(&self) -> SearchBudget {
        self.budget
    }

    pub fn nodes(&self) -> &[GraphNode] {
        &self.nodes
    }

    pub fn edges(&self) -> &[GraphEdge] {
        &self.edges
    }

    pub fn frontier(&self) -> impl Iterator<Item = usize> + '_ {
        self.frontier.iter().copied()
    }

    /// Whether unexpanded nodes remain.
    pub fn is_truncated(&self) -> bool {
        !self.frontier.is_empty()
    }

    /// Node holding the seed, up to relabeling.
    pub fn find(&self, sp: &SeedPair) -> Option<usize> {
        self.index.get(&canonicalize(&sp.seed).0).copied()
    }

    /// Continues the breadth-first expansion under `budget`, which replaces
    /// the stored one. The result does not depend on `workers`.
    pub fn expand(&mut self, budget: SearchBudget, workers: usize) -> Result<()> {
        self.budget = budget;
        let pool = if workers > 1 {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(workers)
                .build()
                .map_err(|e| Error::Precondition(format!("cannot start workers: {e}")))?;
            Some(pool)
        } else {
            None
        };
        let batch_size = BATCH_PER_WORKER * workers.max(1);
        loop {
            let mut batch = Vec::new();
            while batch.len() < batch_size {
                match self.frontier.front() {
                    Some(&id) if self.nodes[id].depth < budget.max_depth => {
                        batch.push(id);
                        self.frontier.pop_front();
                    }
                    _ => break,
                }
            }
            if batch.is_empty() {
                return Ok(());
            }
            let expansions: Vec<Result<Expansion>> = match &pool {
                None => batch.iter().map(|&id| self.expand_node(id)).collect(),
                Some(pool) => {
                    pool.install(|| batch.par_iter().map(|&id| self.expand_node(id)).collect())
                }
            };
            if let Some(first) = batch.first() {
                let sp = &self.nodes[*first].seed;
                check_seed_pair(&self.ctx, sp)
                    .map_err(|m| Error::InvariantBreach(format!("node {first}: {m}")))?;
            }
            for (pos, exp) in expansions.into_iter().enumerate() {
                let exp = exp?;
                if !self.merge(exp, budget.max_nodes) {
                    for &id in batch[pos..].iter().rev() {
                        self.frontier.push_front(id);
                    }
                    return Ok(());
                }
            }
        }
    }

    fn expand_node(&self, id: usize) -> Result<Expansion> {
        let sp = &self.nodes[id].seed;
        let mut children = Vec::with_capacity(sp.n());
        for k in 1..=sp.n() {
            let color = match column_sign0(&sp.seed.c, k - 1)? {
                Sign::Plus => EdgeColor::Green,
                Sign::Minus => EdgeColor::Red,
            };
            let child = self.ctx.mutate_seed(sp, k)?;
            if !child.seed.b.is_sign_skew_symmetric() {
                let mut prefix = self.nodes[id].path.clone();
                prefix.push(self.nodes[id].relabel.inverse().apply(k));
                return Err(Error::NotTotallyMutable { prefix });
            }
            let (key, p) = canonicalize(&child.seed);
            let rep = child.relabel(&p);
            children.push((key, p, rep, color));
        }
        Ok(Expansion {
            parent: id,
            children,
        })
    }

    /// Inserts the children of one node; `false` if that would exceed the
    /// node budget, in which case nothing is inserted.
    fn merge(&mut self, exp: Expansion, max_nodes: usize) -> bool {
        let mut fresh: Vec<&CanonicalSeedKey> = Vec::new();
        for (key, ..) in &exp.children {
            if !self.index.contains_key(key) && !fresh.contains(&key) {
                fresh.push(key);
            }
        }
        if self.nodes.len() + fresh.len() > max_nodes {
            return false;
        }
        let parent = &self.nodes[exp.parent];
        let (depth, path, relabel) = (parent.depth, parent.path.clone(), parent.relabel.clone());
        for (k0, (key, p, rep, color)) in exp.children.into_iter().enumerate() {
            let to = match self.index.get(&key) {
                Some(&to) => to,
                None => {
                    let id = self.nodes.len();
                    let mut child_path = path.clone();
                    child_path.push(relabel.inverse().apply(k0 + 1));
                    self.nodes.push(GraphNode {
                        id,
                        depth: depth + 1,
                        path: child_path,
                        relabel: p.compose(&relabel),
                        seed: rep,
                    });
                    self.index.insert(key, id);
                    self.frontier.push_back(id);
                    id
                }
            };
            self.edges.push(GraphEdge {
                from: exp.parent,
                dir: k0 + 1,
                to,
                color,
                perm: p,
            });
        }
        true
    }

    /// Path from the initial vertex to `target` with the fewest red arrows,
    /// then the fewest steps. `None` if `target` is unreachable in the
    /// explored part.
    pub fn path_to(&self, target: usize) -> Option<ReddeningPath> {
        self.min_red_path(|id| id == target)
    }

    /// Path from the initial vertex to a vertex whose C-matrix is a negated
    /// permutation matrix, with the fewest red arrows.
    pub fn reddening_path(&self) -> Option<ReddeningPath> {
        self.min_red_path(|id| self.nodes[id].seed.seed.c.is_nonpositive())
    }

    fn min_red_path(&self, is_target: impl Fn(usize) -> bool) -> Option<ReddeningPath> {
        let mut out_edges: Vec<Vec<usize>> = vec![Vec::new(); self.nodes.len()];
        for (e, edge) in self.edges.iter().enumerate() {
            out_edges[edge.from].push(e);
        }
        let mut best: Vec<Option<(usize, usize)>> = vec![None; self.nodes.len()];
        let mut via: Vec<Option<usize>> = vec![None; self.nodes.len()];
        let mut heap = BinaryHeap::new();
        best[0] = Some((0, 0));
        heap.push(Reverse((0usize, 0usize, 0usize)));
        while let Some(Reverse((red, len, id))) = heap.pop() {
            if best[id] != Some((red, len)) {
                continue;
            }
            if is_target(id) {
                return Some(self.reconstruct(id, &via, red));
            }
            for &e in &out_edges[id] {
                let edge = &self.edges[e];
                let cost = (red + usize::from(edge.color == EdgeColor::Red), len + 1);
                if best[edge.to].is_none_or(|b| cost < b) {
                    best[edge.to] = Some(cost);
                    via[edge.to] = Some(e);
                    heap.push(Reverse((cost.0, cost.1, edge.to)));
                }
            }
        }
        None
    }

    fn reconstruct(&self, target: usize, via: &[Option<usize>], red: usize) -> ReddeningPath {
        let mut chain = Vec::new();
        let mut cur = target;
        while let Some(e) = via[cur] {
            chain.push(e);
            cur = self.edges[e].from;
        }
        chain.reverse();
        // τ maps actual labels at the current vertex to the representative's
        let mut tau = self.nodes[0].relabel.clone();
        let mut dirs = Vec::with_capacity(chain.len());
        for e in chain {
            let edge = &self.edges[e];
            dirs.push(tau.inverse().apply(edge.dir));
            tau = edge.perm.compose(&tau);
        }
        ReddeningPath {
            seq: MutationSequence::new(dirs),
            red,
            target,
        }
    }
}
