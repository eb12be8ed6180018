//! Exact inference by recursive decomposition.
//!
//! [`Engine::marginal`] answers P(X, Y = y0 : W). A net whose moral graph
//! has non-trivial clique separators is split into a component tree, and
//! the tree is reduced one leaf at a time: each leaf's answer is grafted
//! onto its neighbour as a binary auxiliary variable observed at 0. A net
//! with no such separators is split at the parent set of an observed leaf,
//! and the two answers are combined by summing over the separator.

use std::collections::BTreeSet;
use std::fmt;

use crate::error::{Error, Result};
use crate::graph::{connected_components, is_complete, nmc_separators, Decomposition, VertexSet};
use crate::semibn::{split_query, Query, SemiBayesNet};
use crate::tables::{Evidence, Potential, VarId, Variable, MAX_MODEL_ID};

mod strategy;
mod tree;

pub use strategy::{FirstCandidate, LadenCandidate, LeafCandidate, RandomChoice, Scripted, SmallestFirst, Strategy};
pub use tree::ComponentTree;

/// Deepest recursion accepted before giving up.
pub const MAX_DEPTH: usize = 512;

/// Largest table the engine will build when evaluating a net directly.
pub const DIRECT_CELL_CAP: u128 = 1 << 26;

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Stats {
    /// Invocations of the main procedure.
    pub calls: usize,
    /// Nets evaluated directly from their joint.
    pub direct_evaluations: usize,
    /// Leaves reduced by serial reduction.
    pub serial_steps: usize,
    /// Splits at the parent set of a laden node.
    pub parallel_splits: usize,
    /// Searches for non-trivial clique separators.
    pub separator_checks: usize,
    /// Separators verified complete in the moral graph of the net they
    /// split, before splitting.
    pub completeness_checks: usize,
    /// Nets with neither separators nor laden nodes, evaluated directly.
    pub fallbacks: usize,
    pub max_depth: usize,
}

/// One leaf reduction at the outermost level.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TraceStep {
    pub step: usize,
    /// Label of the reduced node.
    pub pick: String,
    /// `targets;evidence;params` of the node's query.
    pub query: String,
    /// Label of the node that received the answer, `None` for the last node.
    pub append_to: Option<String>,
}

impl fmt::Display for TraceStep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "STEP {}: pick={} query={} append-to={}", self.step, self.pick, self.query, self.append_to.as_deref().unwrap_or("-"))
    }
}

#[derive(Clone, Debug)]
pub struct Answer {
    pub potential: Potential,
    pub stats: Stats,
    pub trace: Vec<TraceStep>,
    /// With snapshots enabled: the remaining net and query after each
    /// outermost reduction step.
    pub snapshots: Vec<(SemiBayesNet, Query)>,
}

pub struct Engine {
    strategy: Box<dyn Strategy>,
    snapshots: bool,
}

impl Default for Engine {
    fn default() -> Self {
        Engine::new()
    }
}

impl Engine {
    pub fn new() -> Self {
        Engine::with_strategy(SmallestFirst)
    }

    pub fn with_strategy(strategy: impl Strategy + 'static) -> Self {
        Engine { strategy: Box::new(strategy), snapshots: false }
    }

    /// Records the remaining net after every outermost reduction step.
    pub fn record_snapshots(mut self, on: bool) -> Self {
        self.snapshots = on;
        self
    }

    pub fn answer(&mut self, net: &SemiBayesNet, q: &Query) -> Result<Answer> {
        q.validate(net)?;
        let mut run = Run {
            strategy: self.strategy.as_mut(),
            stats: Stats::default(),
            trace: Vec::new(),
            snapshots: self.snapshots.then(Vec::new),
            next_aux: MAX_MODEL_ID,
        };
        let potential = run.main(net, q, 0)?;
        Ok(Answer { potential, stats: run.stats, trace: run.trace, snapshots: run.snapshots.unwrap_or_default() })
    }

    /// P(X, Y = y0 : W).
    pub fn marginal(&mut self, net: &SemiBayesNet, q: &Query) -> Result<Potential> {
        Ok(self.answer(net, q)?.potential)
    }

    /// P(X | Y = y0) for a net without parameters.
    pub fn posterior(&mut self, net: &SemiBayesNet, q: &Query) -> Result<Potential> {
        if !net.params().is_empty() {
            return Err(Error::Contract("posterior needs a net without parameters".into()));
        }
        self.marginal(net, q)?
            .normalize()
            .map_err(|_| Error::ZeroProbabilityEvidence("the evidence has probability zero under the model".into()))
    }
}

/// Non-trivial clique separators of `net`'s moral graph for query `q`.
pub fn nontrivial_separators(net: &SemiBayesNet, q: &Query) -> Result<Vec<VertexSet>> {
    nmc_separators(&net.moral_graph(), &net.laden_nodes(q), net.dag().parent_map())
}

/// The component tree the engine would reduce for `q`, if the net has
/// non-trivial clique separators.
pub fn component_tree(net: &SemiBayesNet, q: &Query) -> Result<Option<ComponentTree>> {
    let seps = nontrivial_separators(net, q)?;
    if seps.is_empty() {
        return Ok(None);
    }
    ComponentTree::build(net, &net.moral_graph(), &seps).map(Some)
}

/// Evaluates `q` on `net` from the product of its restricted items.
pub fn direct_marginal(net: &SemiBayesNet, q: &Query) -> Result<Potential> {
    let tables: Vec<Potential> = net.items().iter().map(|i| i.table().restrict_overlapping(&q.evidence)).collect::<Result<_>>()?;
    let scope: BTreeSet<VarId> = tables.iter().flat_map(|t| t.vars().iter().copied()).collect();
    let cells = net.cells(&scope);
    if cells > DIRECT_CELL_CAP {
        return Err(Error::TooLarge { cells, cap: DIRECT_CELL_CAP });
    }
    let joint = tables.iter().try_fold(Potential::scalar(1.0), |acc, t| acc.multiply(t))?;
    let mut keep = q.targets.clone();
    keep.extend(net.params());
    let out = joint.marginalize_onto(&keep)?;
    let missing: Vec<(VarId, usize)> = net.scope_of(&keep.into_iter().filter(|v| !out.contains(*v)).collect())?;
    out.broadcast(&missing)
}

struct Run<'a> {
    strategy: &'a mut dyn Strategy,
    stats: Stats,
    trace: Vec<TraceStep>,
    snapshots: Option<Vec<(SemiBayesNet, Query)>>,
    next_aux: u32,
}

impl Run<'_> {
    fn main(&mut self, net: &SemiBayesNet, q: &Query, depth: usize) -> Result<Potential> {
        if depth > MAX_DEPTH {
            return Err(Error::Internal(format!("recursion deeper than {MAX_DEPTH}")));
        }
        self.stats.calls += 1;
        self.stats.max_depth = self.stats.max_depth.max(depth);

        let moral = net.moral_graph();
        let comps = connected_components(&moral);
        if comps.len() > 1 {
            let mut out = Potential::scalar(1.0);
            for comp in comps {
                let sub = net.subnet(&comp)?;
                let sq = restrict_query(q, &comp);
                out = out.multiply(&self.main(&sub, &sq, depth + 1)?)?;
            }
            return Ok(out);
        }
        if net.items().is_empty() || net.vertices().len() <= 1 || net.is_simple() {
            self.stats.direct_evaluations += 1;
            return direct_marginal(net, q);
        }

        let laden = net.laden_nodes(q);
        self.stats.separator_checks += 1;
        let seps = nmc_separators(&moral, &laden, net.dag().parent_map())?;
        if !seps.is_empty() {
            let tree = ComponentTree::build(net, &moral, &seps)?;
            self.stats.completeness_checks += tree.completeness_checks();
            if tree.len() >= 2 {
                return self.serial_reduction(tree, q.clone(), depth);
            }
        }
        self.parallel_reduction(net, q, &laden, depth)
    }

    fn serial_reduction(&mut self, mut tree: ComponentTree, mut q: Query, depth: usize) -> Result<Potential> {
        let record = depth == 0;
        let universe = tree.node(tree.live().next().unwrap()).universe().clone();
        let mut k = tree.live().map(|i| tree.node(i).max_aux_index()).max().unwrap_or(0) + 1;

        while tree.len() > 1 {
            let leaves = tree.leaves();
            let mut plans = Vec::with_capacity(leaves.len());
            for &c in &leaves {
                let t = *tree.neighbors(c).iter().next().unwrap();
                let leaf = tree.node(c);
                let s = tree.edge_label(c, t);
                let private: VertexSet = leaf.vertices().difference(&s).copied().collect();
                let ys: VertexSet = q.evidence.keys().copied().filter(|v| s.contains(v)).collect();
                let mut targets: VertexSet = q.targets.intersection(&private).copied().collect();
                targets.extend(s.difference(&ys));
                let evidence: Evidence = q.evidence.iter().filter(|(v, _)| leaf.vertices().contains(v)).map(|(&v, &x)| (v, x)).collect();
                let leaf_q = Query { targets, evidence };
                let cells = leaf.cells(leaf_q.targets.iter().chain(leaf.params().iter()));
                plans.push((c, t, s, private, ys, leaf_q, LeafCandidate { label: leaf.label(), answer_cells: cells }));
            }
            let candidates: Vec<LeafCandidate> = plans.iter().map(|p| p.6.clone()).collect();
            let pick = self.strategy.pick_leaf(depth, &candidates);
            let (c, t, s, private, ys, leaf_q, cand) =
                plans.into_iter().nth(pick).ok_or_else(|| Error::Internal("strategy picked no leaf".into()))?;

            let leaf = tree.node(c).clone();
            let f0 = self.main(&leaf, &leaf_q, depth + 1)?;
            let ys_scope = leaf.scope_of(&ys)?;
            let ys0: Evidence = q.evidence.iter().filter(|(v, _)| ys.contains(v)).map(|(&v, &x)| (v, x)).collect();
            let f = f0.extend_with_evidence_indicator(&ys_scope, &ys0)?;

            while universe.lookup(&format!("v{k}")).is_ok() {
                k += 1;
            }
            let aux = Variable::auxiliary(VarId(self.next_aux), format!("v{k}"));
            self.next_aux = self.next_aux.checked_add(1).ok_or_else(|| Error::Internal("auxiliary ids exhausted".into()))?;
            k += 1;
            let aux_id = aux.id;

            let target = tree.node(t);
            if record {
                self.trace.push(TraceStep {
                    step: self.trace.len() + 1,
                    pick: cand.label,
                    query: leaf_q.describe(&leaf),
                    append_to: Some(target.label()),
                });
            }
            let grown = target.append_answer(&s, f, aux)?;
            tree.replace(t, grown);
            tree.remove_leaf(c)?;
            self.stats.serial_steps += 1;

            q.targets.retain(|v| !private.contains(v));
            q.evidence.retain(|v, _| !private.contains(v));
            q.evidence.insert(aux_id, 0);
            if record {
                if let Some(snaps) = self.snapshots.as_mut() {
                    snaps.push((tree.union_net()?, q.clone()));
                }
            }
        }

        let last = tree.node(tree.live().next().unwrap()).clone();
        if record {
            self.trace.push(TraceStep { step: self.trace.len() + 1, pick: last.label(), query: q.describe(&last), append_to: None });
        }
        self.main(&last, &q, depth + 1)
    }

    fn parallel_reduction(&mut self, net: &SemiBayesNet, q: &Query, laden: &VertexSet, depth: usize) -> Result<Potential> {
        if laden.is_empty() {
            log::warn!("net {} has no clique separator and no observed leaf; evaluating directly", net.label());
            self.stats.fallbacks += 1;
            self.stats.direct_evaluations += 1;
            return direct_marginal(net, q);
        }
        let candidates: Vec<LadenCandidate> =
            laden.iter().map(|&v| LadenCandidate { var: v, parent_cells: net.cells(net.parents(v)) }).collect();
        let pick = self.strategy.pick_laden(depth, &candidates);
        let l = candidates.get(pick).ok_or_else(|| Error::Internal("strategy picked no laden node".into()))?.var;

        let s = net.parents(l).clone();
        self.stats.completeness_checks += 1;
        if !is_complete(&net.moral_graph(), &s) {
            return Err(Error::Internal("parent set of a laden node is not complete".into()));
        }
        let mut v1 = s.clone();
        v1.insert(l);
        let v2: VertexSet = net.vertices().iter().copied().filter(|&v| v != l).collect();
        let d = Decomposition { separator: s.clone(), v1, v2 };
        let (n1, n2) = net.induced_decomposition(&d)?;
        let (split, q1, q2) = split_query(q, &d);
        self.stats.parallel_splits += 1;

        let f1 = self.main(&n1, &q1, depth + 1)?;
        let f2 = self.main(&n2, &q2, depth + 1)?;
        let summed: BTreeSet<VarId> = s.iter().copied().filter(|v| !split.xs.contains(v) && !split.ys.contains(v)).collect();
        f1.multiply(&f2)?.sum_out(&summed)
    }
}

fn restrict_query(q: &Query, keep: &VertexSet) -> Query {
    Query {
        targets: q.targets.intersection(keep).copied().collect(),
        evidence: q.evidence.iter().filter(|(v, _)| keep.contains(v)).map(|(&v, &x)| (v, x)).collect(),
    }
}
