//! Minimal elimination ordering (LEX M) and decomposition by clique
//! separators.
//!
//! The decomposition scans vertices in a minimal elimination ordering. For
//! each vertex, the set of its later neighbours in the filled graph is a
//! candidate separator; when that set is complete in the original graph and
//! cuts the remaining graph, the component holding the vertex is split off
//! as an atom. With a minimal ordering every reported separator is a clique
//! minimal separator of the input graph.

use std::cmp::Reverse;
use std::collections::{BTreeMap, BinaryHeap};

use super::{connected_components, is_complete, UGraph, VertexSet};
use crate::error::{Error, Result};
use crate::tables::VarId;

/// Elimination order (first eliminated first) and the fill graph it induces.
#[derive(Clone, Debug)]
pub struct MinimalOrdering {
    pub order: Vec<VarId>,
    pub filled: UGraph,
}

impl MinimalOrdering {
    pub fn fill_edges(&self, g: &UGraph) -> Vec<(VarId, VarId)> {
        self.filled.edges().filter(|&(a, b)| !g.has_edge(a, b)).collect()
    }
}

// Bottleneck of a path in the LEX M search: the largest label among its
// interior vertices. `Direct` means no interior vertex.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
enum Bottleneck {
    Direct,
    Label(Vec<usize>),
}

/// LEX M (Rose, Tarjan and Lueker). Ties in the label comparison go to the
/// smallest vertex id.
pub fn lex_m(g: &UGraph) -> MinimalOrdering {
    let verts: Vec<VarId> = g.vertices().collect();
    let n = verts.len();
    let index: BTreeMap<VarId, usize> = verts.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let adj: Vec<Vec<usize>> = verts.iter().map(|v| g.neighbors(*v).iter().map(|w| index[w]).collect()).collect();

    let mut label: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut number: Vec<Option<usize>> = vec![None; n];
    let mut filled = g.clone();

    for i in (1..=n).rev() {
        let v = (0..n)
            .filter(|&u| number[u].is_none())
            .max_by(|&a, &b| label[a].cmp(&label[b]).then(b.cmp(&a)))
            .expect("an unnumbered vertex remains");
        number[v] = Some(i);

        // Minimax search over unnumbered vertices: best[w] is the smallest
        // achievable bottleneck of a v..w path.
        let mut best: Vec<Option<Bottleneck>> = vec![None; n];
        let mut heap = BinaryHeap::new();
        for &w in &adj[v] {
            if number[w].is_none() {
                best[w] = Some(Bottleneck::Direct);
                heap.push(Reverse((Bottleneck::Direct, w)));
            }
        }
        while let Some(Reverse((b, u))) = heap.pop() {
            if best[u].as_ref() != Some(&b) {
                continue;
            }
            let through = std::cmp::max(b, Bottleneck::Label(label[u].clone()));
            for &x in &adj[u] {
                if x == v || number[x].is_some() {
                    continue;
                }
                if best[x].as_ref().is_none_or(|cur| through < *cur) {
                    best[x] = Some(through.clone());
                    heap.push(Reverse((through.clone(), x)));
                }
            }
        }
        let reached: Vec<usize> = (0..n)
            .filter(|&w| w != v && number[w].is_none())
            .filter(|&w| match &best[w] {
                Some(Bottleneck::Direct) => true,
                Some(Bottleneck::Label(l)) => *l < label[w],
                None => false,
            })
            .collect();
        for w in reached {
            label[w].push(i);
            filled.add_edge(verts[v], verts[w]);
        }
    }

    let mut order: Vec<(usize, VarId)> = (0..n).map(|u| (number[u].unwrap(), verts[u])).collect();
    order.sort();
    MinimalOrdering { order: order.into_iter().map(|(_, v)| v).collect(), filled }
}

/// Result of splitting a connected graph at its clique separators. Each step
/// records the separator and the atom split off with it; `residual` is the
/// last atom.
#[derive(Clone, Debug)]
pub struct CliqueDecomposition {
    pub steps: Vec<(VertexSet, VertexSet)>,
    pub residual: VertexSet,
}

impl CliqueDecomposition {
    /// Distinct separators in discovery order.
    pub fn separators(&self) -> Vec<VertexSet> {
        let mut out: Vec<VertexSet> = Vec::new();
        for (s, _) in &self.steps {
            if !out.contains(s) {
                out.push(s.clone());
            }
        }
        out
    }

    pub fn atoms(&self) -> Vec<VertexSet> {
        let mut out: Vec<VertexSet> = self.steps.iter().map(|(_, a)| a.clone()).collect();
        out.push(self.residual.clone());
        out
    }
}

pub fn clique_separator_decomposition(g: &UGraph) -> Result<CliqueDecomposition> {
    if !g.is_connected() {
        return Err(Error::Contract("clique separator decomposition needs a connected graph".into()));
    }
    let ordering = lex_m(g);
    let pos: BTreeMap<VarId, usize> = ordering.order.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let mut remaining = g.vertex_set();
    let mut steps = Vec::new();

    for &x in &ordering.order {
        if !remaining.contains(&x) {
            continue;
        }
        let later: VertexSet = ordering.filled.neighbors(x).iter().copied().filter(|w| pos[w] > pos[&x]).collect();
        if !is_complete(g, &later) {
            continue;
        }
        if !later.is_subset(&remaining) {
            return Err(Error::Internal("candidate separator reaches into a removed atom".into()));
        }
        let current = g.induced(&remaining);
        let comp = current.without(&later).component_of(x);
        if comp.len() + later.len() == remaining.len() {
            continue;
        }
        let sep: VertexSet = comp.iter().flat_map(|v| current.neighbors(*v).iter().copied()).filter(|w| later.contains(w)).collect();
        let rest: VertexSet = remaining.iter().copied().filter(|v| !comp.contains(v) && !sep.contains(v)).collect();
        let another_full = connected_components(&current.induced(&rest)).into_iter().any(|c| {
            let nbrs: VertexSet = c.iter().flat_map(|v| current.neighbors(*v).iter().copied()).filter(|w| sep.contains(w)).collect();
            nbrs == sep
        });
        if !another_full {
            continue;
        }
        let atom: VertexSet = comp.union(&sep).copied().collect();
        for v in &comp {
            remaining.remove(v);
        }
        steps.push((sep, atom));
    }
    Ok(CliqueDecomposition { steps, residual: remaining })
}
