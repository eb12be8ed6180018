//! Choice points of the engine: which leaf of a component tree to reduce
//! next, and which laden node to split off. Any choice gives the same answer;
//! the choice only affects cost.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::tables::VarId;

/// A reducible leaf of a component tree.
#[derive(Clone, Debug)]
pub struct LeafCandidate {
    /// `{x,y,...}` label of the leaf's items.
    pub label: String,
    /// Cells in the leaf's answer: its targets and parameters.
    pub answer_cells: u128,
}

/// A laden node that can be split off its net.
#[derive(Clone, Debug)]
pub struct LadenCandidate {
    pub var: VarId,
    /// Cells in the node's parent set.
    pub parent_cells: u128,
}

/// Picks among non-empty candidate lists by returning an index.
pub trait Strategy {
    fn pick_leaf(&mut self, depth: usize, candidates: &[LeafCandidate]) -> usize;
    fn pick_laden(&mut self, depth: usize, candidates: &[LadenCandidate]) -> usize;
}

/// Smallest answer first for leaves, smallest parent set first for laden
/// nodes; ties go to the earliest candidate.
#[derive(Clone, Debug, Default)]
pub struct SmallestFirst;

impl Strategy for SmallestFirst {
    fn pick_leaf(&mut self, _depth: usize, candidates: &[LeafCandidate]) -> usize {
        argmin(candidates.iter().map(|c| c.answer_cells))
    }

    fn pick_laden(&mut self, _depth: usize, candidates: &[LadenCandidate]) -> usize {
        argmin(candidates.iter().map(|c| (c.parent_cells, c.var)))
    }
}

fn argmin<K: Ord>(keys: impl Iterator<Item = K>) -> usize {
    keys.enumerate().min_by(|a, b| a.1.cmp(&b.1).then(a.0.cmp(&b.0))).map(|(i, _)| i).unwrap_or(0)
}

/// Always the first candidate.
#[derive(Clone, Debug, Default)]
pub struct FirstCandidate;

impl Strategy for FirstCandidate {
    fn pick_leaf(&mut self, _depth: usize, _candidates: &[LeafCandidate]) -> usize {
        0
    }

    fn pick_laden(&mut self, _depth: usize, _candidates: &[LadenCandidate]) -> usize {
        0
    }
}

/// Uniformly random choices from a seeded generator.
#[derive(Clone, Debug)]
pub struct RandomChoice {
    rng: ChaCha8Rng,
}

impl RandomChoice {
    pub fn new(seed: u64) -> Self {
        RandomChoice { rng: ChaCha8Rng::seed_from_u64(seed) }
    }

    fn pick(&mut self, n: usize) -> usize {
        let idx: Vec<usize> = (0..n).collect();
        *idx.choose(&mut self.rng).unwrap_or(&0)
    }
}

impl Strategy for RandomChoice {
    fn pick_leaf(&mut self, _depth: usize, candidates: &[LeafCandidate]) -> usize {
        self.pick(candidates.len())
    }

    fn pick_laden(&mut self, _depth: usize, candidates: &[LadenCandidate]) -> usize {
        self.pick(candidates.len())
    }
}

/// Follows a fixed sequence of leaf labels at the outermost level and
/// defers to [`SmallestFirst`] everywhere else, or once the script runs out
/// or names a leaf that is not available.
#[derive(Clone, Debug)]
pub struct Scripted {
    labels: std::collections::VecDeque<String>,
    fallback: SmallestFirst,
}

impl Scripted {
    pub fn new(labels: impl IntoIterator<Item = impl Into<String>>) -> Self {
        Scripted { labels: labels.into_iter().map(Into::into).collect(), fallback: SmallestFirst }
    }
}

impl Strategy for Scripted {
    fn pick_leaf(&mut self, depth: usize, candidates: &[LeafCandidate]) -> usize {
        if depth == 0 {
            if let Some(want) = self.labels.pop_front() {
                if let Some(i) = candidates.iter().position(|c| c.label == want) {
                    return i;
                }
            }
        }
        self.fallback.pick_leaf(depth, candidates)
    }

    fn pick_laden(&mut self, depth: usize, candidates: &[LadenCandidate]) -> usize {
        self.fallback.pick_laden(depth, candidates)
    }
}
