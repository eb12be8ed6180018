//! Component trees: a net split at its non-trivial clique separators, with
//! the pieces joined into a tree whose edges are labelled by the shared
//! variables.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::graph::{connected_components, decompose_at, is_complete, UGraph, VertexSet};
use crate::semibn::SemiBayesNet;

#[derive(Clone, Debug)]
pub struct ComponentTree {
    nodes: Vec<Option<SemiBayesNet>>,
    adj: Vec<BTreeSet<usize>>,
    checks: usize,
}

impl ComponentTree {
    /// Splits `net` at each of `separators` (complete separators of `g`, the
    /// net's moral graph) until no piece can be split further, links the
    /// pieces into a tree, and folds pieces holding only auxiliary items
    /// into a neighbour.
    pub fn build(net: &SemiBayesNet, g: &UGraph, separators: &[VertexSet]) -> Result<Self> {
        let mut pieces = vec![net.clone()];
        let mut checks = 0;
        for s in separators {
            while let Some(i) = pieces.iter().position(|p| splits(g, p.vertices(), s)) {
                let gp = g.induced(pieces[i].vertices());
                let d = decompose_at(&gp, s)?;
                checks += 1;
                let (a, b) = pieces[i].induced_decomposition(&d)?;
                pieces.splice(i..=i, [a, b]);
            }
        }
        let mut i = 0;
        while i < pieces.len() {
            let host = (0..pieces.len()).find(|&j| j != i && pieces[i].vertices().is_subset(pieces[j].vertices()));
            match host {
                Some(j) => {
                    pieces[j] = pieces[j].union(&pieces[i])?;
                    pieces.remove(i);
                    i = 0;
                }
                None => i += 1,
            }
        }

        let n = pieces.len();
        let mut adj = vec![BTreeSet::new(); n];
        let start = (0..n).min_by_key(|&i| pieces[i].vertices().iter().next().copied()).unwrap_or(0);
        let mut inside = vec![false; n];
        if n > 0 {
            inside[start] = true;
        }
        for _ in 1..n {
            let mut best: Option<(usize, usize, usize)> = None;
            for c in (0..n).filter(|&c| !inside[c]) {
                for t in (0..n).filter(|&t| inside[t]) {
                    let shared: VertexSet = pieces[c].vertices().intersection(pieces[t].vertices()).copied().collect();
                    if !separators.iter().any(|s| s.is_subset(&shared)) {
                        continue;
                    }
                    if best.is_none_or(|(k, _, _)| shared.len() > k) {
                        best = Some((shared.len(), c, t));
                    }
                }
            }
            let (_, c, t) = best.ok_or_else(|| Error::Internal("component pieces cannot be linked into a tree".into()))?;
            inside[c] = true;
            adj[c].insert(t);
            adj[t].insert(c);
        }

        let mut tree = ComponentTree { nodes: pieces.into_iter().map(Some).collect(), adj, checks };
        tree.check(g)?;
        while tree.len() > 1 {
            let Some(i) = tree.live().find(|&i| tree.node(i).items().iter().all(|it| it.is_auxiliary())) else {
                break;
            };
            tree.merge_into_neighbor(i)?;
        }
        Ok(tree)
    }

    fn merge_into_neighbor(&mut self, i: usize) -> Result<()> {
        let j = *self.adj[i].iter().next().ok_or_else(|| Error::Internal("isolated tree node".into()))?;
        let merged = self.node(j).union(self.node(i))?;
        self.nodes[j] = Some(merged);
        for k in std::mem::take(&mut self.adj[i]) {
            self.adj[k].remove(&i);
            if k != j {
                self.adj[k].insert(j);
                self.adj[j].insert(k);
            }
        }
        self.nodes[i] = None;
        Ok(())
    }

    /// Running intersection, connectivity, and complete edge labels.
    fn check(&mut self, g: &UGraph) -> Result<()> {
        let live: Vec<usize> = self.live().collect();
        for (x, &i) in live.iter().enumerate() {
            for &j in &live[x + 1..] {
                let shared: VertexSet = self.node(i).vertices().intersection(self.node(j).vertices()).copied().collect();
                let path = self.path(i, j).ok_or_else(|| Error::Internal("component tree is disconnected".into()))?;
                if path.iter().any(|&k| !shared.is_subset(self.node(k).vertices())) {
                    return Err(Error::Internal("component tree breaks the running intersection property".into()));
                }
            }
            for &j in &self.adj[i] {
                if !is_complete(g, &self.edge_label(i, j)) {
                    return Err(Error::Internal("component tree edge label is not complete".into()));
                }
                self.checks += 1;
            }
        }
        Ok(())
    }

    fn path(&self, from: usize, to: usize) -> Option<Vec<usize>> {
        let mut prev = vec![usize::MAX; self.nodes.len()];
        let mut queue = std::collections::VecDeque::from([from]);
        prev[from] = from;
        while let Some(u) = queue.pop_front() {
            if u == to {
                let mut out = vec![to];
                let mut cur = to;
                while cur != from {
                    cur = prev[cur];
                    out.push(cur);
                }
                return Some(out);
            }
            for &w in &self.adj[u] {
                if prev[w] == usize::MAX {
                    prev[w] = u;
                    queue.push_back(w);
                }
            }
        }
        None
    }

    /// Separators verified complete in the moral graph while building.
    pub fn completeness_checks(&self) -> usize {
        self.checks
    }

    /// Indices of the nodes still in the tree.
    pub fn live(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.nodes.len()).filter(|&i| self.nodes[i].is_some())
    }

    pub fn len(&self) -> usize {
        self.live().count()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn node(&self, i: usize) -> &SemiBayesNet {
        self.nodes[i].as_ref().expect("live tree node")
    }

    pub fn neighbors(&self, i: usize) -> &BTreeSet<usize> {
        &self.adj[i]
    }

    pub fn edge_label(&self, i: usize, j: usize) -> VertexSet {
        self.node(i).vertices().intersection(self.node(j).vertices()).copied().collect()
    }

    pub fn edges(&self) -> Vec<(usize, usize)> {
        self.live().flat_map(|i| self.adj[i].iter().filter(move |&&j| j > i).map(move |&j| (i, j))).collect()
    }

    pub fn leaves(&self) -> Vec<usize> {
        self.live().filter(|&i| self.adj[i].len() == 1).collect()
    }

    pub fn replace(&mut self, i: usize, net: SemiBayesNet) {
        self.nodes[i] = Some(net);
    }

    pub fn remove_leaf(&mut self, i: usize) -> Result<()> {
        if self.adj[i].len() != 1 {
            return Err(Error::Internal("only leaves can be removed".into()));
        }
        for k in std::mem::take(&mut self.adj[i]) {
            self.adj[k].remove(&i);
        }
        self.nodes[i] = None;
        Ok(())
    }

    /// The union of all live nodes.
    pub fn union_net(&self) -> Result<SemiBayesNet> {
        let mut live = self.live();
        let first = live.next().ok_or_else(|| Error::Internal("empty component tree".into()))?;
        live.try_fold(self.node(first).clone(), |acc, i| acc.union(self.node(i)))
    }
}

fn splits(g: &UGraph, piece: &VertexSet, s: &VertexSet) -> bool {
    s.is_subset(piece) && piece.len() > s.len() && connected_components(&g.induced(piece).without(s)).len() >= 2
}
