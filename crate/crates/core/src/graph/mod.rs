//! Directed and undirected graphs over variable ids.
//!
//! The undirected side carries everything the decomposition needs:
//! moralization, connectivity, completeness tests, and splitting a graph at
//! a complete separator. Clique-separator discovery lives in [`separators`].

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::tables::VarId;

mod separators;

pub use separators::{clique_separator_decomposition, lex_m, CliqueDecomposition, MinimalOrdering};

pub type VertexSet = BTreeSet<VarId>;

/// Acyclic directed graph, stored as parent sets.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct DiGraph {
    parents: BTreeMap<VarId, VertexSet>,
}

impl DiGraph {
    pub fn new(vertices: impl IntoIterator<Item = VarId>, arcs: impl IntoIterator<Item = (VarId, VarId)>) -> Result<Self> {
        let mut parents: BTreeMap<VarId, VertexSet> = vertices.into_iter().map(|v| (v, VertexSet::new())).collect();
        for (from, to) in arcs {
            if !parents.contains_key(&from) || !parents.contains_key(&to) {
                return Err(Error::Contract(format!("arc {from} -> {to} leaves the vertex set")));
            }
            if from == to {
                return Err(Error::Cycle(from.to_string()));
            }
            parents.get_mut(&to).unwrap().insert(from);
        }
        let g = DiGraph { parents };
        g.topological_order()?;
        Ok(g)
    }

    pub fn from_parents(parents: BTreeMap<VarId, VertexSet>) -> Result<Self> {
        let arcs: Vec<(VarId, VarId)> = parents.iter().flat_map(|(&c, ps)| ps.iter().map(move |&p| (p, c))).collect();
        DiGraph::new(parents.keys().copied(), arcs)
    }

    pub fn vertices(&self) -> impl Iterator<Item = VarId> + '_ {
        self.parents.keys().copied()
    }

    pub fn parents(&self, v: VarId) -> &VertexSet {
        static EMPTY: VertexSet = VertexSet::new();
        self.parents.get(&v).unwrap_or(&EMPTY)
    }

    pub fn parent_map(&self) -> &BTreeMap<VarId, VertexSet> {
        &self.parents
    }

    pub fn children(&self, v: VarId) -> VertexSet {
        self.parents.iter().filter(|(_, ps)| ps.contains(&v)).map(|(&c, _)| c).collect()
    }

    pub fn arcs(&self) -> impl Iterator<Item = (VarId, VarId)> + '_ {
        self.parents.iter().flat_map(|(&c, ps)| ps.iter().map(move |&p| (p, c)))
    }

    pub fn leaves(&self) -> VertexSet {
        let with_children: VertexSet = self.parents.values().flatten().copied().collect();
        self.vertices().filter(|v| !with_children.contains(v)).collect()
    }

    pub fn roots(&self) -> VertexSet {
        self.parents.iter().filter(|(_, ps)| ps.is_empty()).map(|(&v, _)| v).collect()
    }

    /// Kahn's algorithm, smallest id first.
    pub fn topological_order(&self) -> Result<Vec<VarId>> {
        let mut indeg: BTreeMap<VarId, usize> = self.parents.iter().map(|(&v, ps)| (v, ps.len())).collect();
        let mut children: BTreeMap<VarId, Vec<VarId>> = BTreeMap::new();
        for (p, c) in self.arcs() {
            children.entry(p).or_default().push(c);
        }
        let mut ready: BTreeSet<VarId> = indeg.iter().filter(|(_, &d)| d == 0).map(|(&v, _)| v).collect();
        let mut order = Vec::with_capacity(indeg.len());
        while let Some(v) = ready.pop_first() {
            order.push(v);
            for &c in children.get(&v).map(Vec::as_slice).unwrap_or(&[]) {
                let d = indeg.get_mut(&c).unwrap();
                *d -= 1;
                if *d == 0 {
                    ready.insert(c);
                }
            }
        }
        if order.len() != indeg.len() {
            let stuck = indeg.iter().find(|(v, _)| !order.contains(v)).map(|(v, _)| *v).unwrap();
            return Err(Error::Cycle(stuck.to_string()));
        }
        Ok(order)
    }
}

/// Simple undirected graph.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct UGraph {
    adj: BTreeMap<VarId, VertexSet>,
}

impl UGraph {
    pub fn new(vertices: impl IntoIterator<Item = VarId>) -> Self {
        UGraph { adj: vertices.into_iter().map(|v| (v, VertexSet::new())).collect() }
    }

    pub fn add_vertex(&mut self, v: VarId) {
        self.adj.entry(v).or_default();
    }

    /// Adds an edge; self-loops are ignored.
    pub fn add_edge(&mut self, a: VarId, b: VarId) {
        if a == b {
            return;
        }
        self.adj.entry(a).or_default().insert(b);
        self.adj.entry(b).or_default().insert(a);
    }

    pub fn has_edge(&self, a: VarId, b: VarId) -> bool {
        self.adj.get(&a).is_some_and(|n| n.contains(&b))
    }

    pub fn contains(&self, v: VarId) -> bool {
        self.adj.contains_key(&v)
    }

    pub fn vertices(&self) -> impl Iterator<Item = VarId> + '_ {
        self.adj.keys().copied()
    }

    pub fn vertex_set(&self) -> VertexSet {
        self.adj.keys().copied().collect()
    }

    pub fn len(&self) -> usize {
        self.adj.len()
    }

    pub fn is_empty(&self) -> bool {
        self.adj.is_empty()
    }

    pub fn neighbors(&self, v: VarId) -> &VertexSet {
        static EMPTY: VertexSet = VertexSet::new();
        self.adj.get(&v).unwrap_or(&EMPTY)
    }

    pub fn edges(&self) -> impl Iterator<Item = (VarId, VarId)> + '_ {
        self.adj.iter().flat_map(|(&a, ns)| ns.iter().filter(move |&&b| a < b).map(move |&b| (a, b)))
    }

    pub fn edge_count(&self) -> usize {
        self.adj.values().map(BTreeSet::len).sum::<usize>() / 2
    }

    /// Subgraph induced by `keep`.
    pub fn induced(&self, keep: &VertexSet) -> UGraph {
        UGraph {
            adj: self.adj.iter().filter(|(v, _)| keep.contains(v)).map(|(&v, ns)| (v, ns.intersection(keep).copied().collect())).collect(),
        }
    }

    /// Subgraph with `drop` deleted.
    pub fn without(&self, drop: &VertexSet) -> UGraph {
        let keep: VertexSet = self.vertices().filter(|v| !drop.contains(v)).collect();
        self.induced(&keep)
    }

    /// Vertices reachable from `start` (inclusive).
    pub fn component_of(&self, start: VarId) -> VertexSet {
        let mut seen = VertexSet::new();
        if !self.contains(start) {
            return seen;
        }
        let mut queue = VecDeque::from([start]);
        seen.insert(start);
        while let Some(u) = queue.pop_front() {
            for &w in self.neighbors(u) {
                if seen.insert(w) {
                    queue.push_back(w);
                }
            }
        }
        seen
    }

    pub fn is_connected(&self) -> bool {
        match self.adj.keys().next() {
            None => true,
            Some(&v) => self.component_of(v).len() == self.len(),
        }
    }

    /// Graphviz rendering, with vertex labels supplied by the caller.
    pub fn to_dot(&self, name: impl Fn(VarId) -> String) -> String {
        let mut out = String::from("graph G {\n");
        for v in self.vertices() {
            let _ = writeln!(out, "  \"{}\";", name(v));
        }
        for (a, b) in self.edges() {
            let _ = writeln!(out, "  \"{}\" -- \"{}\";", name(a), name(b));
        }
        out.push_str("}\n");
        out
    }
}

/// A split of a graph's vertices at a complete separator.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Decomposition {
    pub separator: VertexSet,
    pub v1: VertexSet,
    pub v2: VertexSet,
}

impl Decomposition {
    /// Checks the decomposition conditions against `g`.
    pub fn validate(&self, g: &UGraph) -> Result<()> {
        let all = g.vertex_set();
        let union: VertexSet = self.v1.union(&self.v2).copied().collect();
        let inter: VertexSet = self.v1.intersection(&self.v2).copied().collect();
        if union != all {
            return Err(Error::InvalidSeparator("parts do not cover the graph".into()));
        }
        if inter != self.separator {
            return Err(Error::InvalidSeparator("parts do not meet exactly in the separator".into()));
        }
        if self.v1 == all || self.v2 == all {
            return Err(Error::InvalidSeparator("parts must be proper subsets".into()));
        }
        if !is_complete(g, &self.separator) {
            return Err(Error::InvalidSeparator("separator is not complete".into()));
        }
        let rest = g.without(&self.separator);
        for (a, b) in rest.edges() {
            if self.v1.contains(&a) != self.v1.contains(&b) {
                return Err(Error::InvalidSeparator(format!("edge {a} - {b} crosses the separator")));
            }
        }
        Ok(())
    }
}

/// Moral graph: marry co-parents, drop directions.
pub fn moralize(g: &DiGraph) -> UGraph {
    let mut u = UGraph::new(g.vertices());
    for (c, ps) in g.parent_map() {
        for &p in ps {
            u.add_edge(p, *c);
        }
        let ps: Vec<VarId> = ps.iter().copied().collect();
        for (i, &p) in ps.iter().enumerate() {
            for &q in &ps[i + 1..] {
                u.add_edge(p, q);
            }
        }
    }
    u
}

/// Connected components, ordered by their smallest member.
pub fn connected_components(g: &UGraph) -> Vec<VertexSet> {
    let mut seen = VertexSet::new();
    let mut out = Vec::new();
    for v in g.vertices() {
        if !seen.contains(&v) {
            let comp = g.component_of(v);
            seen.extend(comp.iter().copied());
            out.push(comp);
        }
    }
    out
}

pub fn is_complete(g: &UGraph, s: &VertexSet) -> bool {
    let vs: Vec<VarId> = s.iter().copied().collect();
    vs.iter().enumerate().all(|(i, &a)| vs[i + 1..].iter().all(|&b| g.has_edge(a, b)))
}

/// Splits `g` at the complete separator `s`. The first part is `s` plus the
/// component of `g - s` holding the smallest vertex id; the second part is
/// everything else.
pub fn decompose_at(g: &UGraph, s: &VertexSet) -> Result<Decomposition> {
    decompose_with(g, s, &[0])
}

/// Splits `g` at `s`, putting the listed components of `g - s` (indices
/// into [`connected_components`] order) on the first side.
pub fn decompose_with(g: &UGraph, s: &VertexSet, first_side: &[usize]) -> Result<Decomposition> {
    if let Some(v) = s.iter().find(|v| !g.contains(**v)) {
        return Err(Error::InvalidSeparator(format!("{v} is not a vertex")));
    }
    if !is_complete(g, s) {
        return Err(Error::InvalidSeparator("separator is not complete".into()));
    }
    let comps = connected_components(&g.without(s));
    if comps.len() < 2 {
        return Err(Error::InvalidSeparator("removing the separator leaves the graph connected".into()));
    }
    if first_side.is_empty() || first_side.len() >= comps.len() || first_side.iter().any(|&i| i >= comps.len()) {
        return Err(Error::Contract("first side must take a non-empty proper subset of the components".into()));
    }
    let mut v1 = s.clone();
    let mut v2 = s.clone();
    for (i, c) in comps.into_iter().enumerate() {
        if first_side.contains(&i) {
            v1.extend(c);
        } else {
            v2.extend(c);
        }
    }
    Ok(Decomposition { separator: s.clone(), v1, v2 })
}

/// Clique separators found by [`clique_separator_decomposition`] minus the
/// trivial ones. A separator is trivial when it lies inside the parent set
/// of some laden node and deleting it leaves at most two components.
/// Disconnected graphs are handled one component at a time.
pub fn nmc_separators(g: &UGraph, laden: &VertexSet, parents: &BTreeMap<VarId, VertexSet>) -> Result<Vec<VertexSet>> {
    let mut out: Vec<VertexSet> = Vec::new();
    for comp in connected_components(g) {
        if comp.len() < 3 {
            continue;
        }
        let sub = g.induced(&comp);
        for s in clique_separator_decomposition(&sub)?.separators() {
            if out.contains(&s) {
                continue;
            }
            let trivial =
                laden.iter().any(|l| parents.get(l).is_some_and(|ps| s.is_subset(ps))) && connected_components(&sub.without(&s)).len() <= 2;
            if !trivial {
                out.push(s);
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    // net1 of the worked example: a..h = 0..7
    const A: VarId = VarId(0);
    const B: VarId = VarId(1);
    const C: VarId = VarId(2);
    const D: VarId = VarId(3);
    const E: VarId = VarId(4);
    const F: VarId = VarId(5);
    const G: VarId = VarId(6);
    const H: VarId = VarId(7);

    fn set(vs: &[VarId]) -> VertexSet {
        vs.iter().copied().collect()
    }

    pub(crate) fn net1_dag() -> DiGraph {
        DiGraph::new((0..8).map(VarId), [(C, A), (A, E), (E, F), (F, G), (A, B), (G, B), (B, H), (C, D), (H, D)]).unwrap()
    }

    fn path3() -> UGraph {
        let mut g = UGraph::new((0..3).map(VarId));
        g.add_edge(VarId(0), VarId(1));
        g.add_edge(VarId(1), VarId(2));
        g
    }

    #[test]
    fn moralize_net1_adds_two_marriages() {
        let dag = net1_dag();
        let m = moralize(&dag);
        let arcs: BTreeSet<(VarId, VarId)> = dag.arcs().map(|(a, b)| (a.min(b), a.max(b))).collect();
        let added: BTreeSet<(VarId, VarId)> = m.edges().filter(|e| !arcs.contains(e)).collect();
        assert_eq!(added, [(A, G), (C, H)].into_iter().collect());
    }

    #[test]
    fn moralize_chain_and_collider() {
        let chain = DiGraph::new((0..3).map(VarId), [(VarId(0), VarId(1)), (VarId(1), VarId(2))]).unwrap();
        assert_eq!(moralize(&chain), path3());
        let collider = DiGraph::new((0..3).map(VarId), [(VarId(0), VarId(2)), (VarId(1), VarId(2))]).unwrap();
        let m = moralize(&collider);
        assert_eq!(m.edge_count(), 3);
        assert!(m.has_edge(VarId(0), VarId(1)));
    }

    #[test]
    fn cycle_is_rejected() {
        let r = DiGraph::new((0..2).map(VarId), [(VarId(0), VarId(1)), (VarId(1), VarId(0))]);
        assert!(matches!(r, Err(Error::Cycle(_))));
    }

    #[test]
    fn components_cases() {
        assert_eq!(connected_components(&path3()), vec![set(&[VarId(0), VarId(1), VarId(2)])]);
        let edgeless = UGraph::new((0..4).map(VarId));
        assert_eq!(connected_components(&edgeless).len(), 4);
        let m = moralize(&net1_dag());
        let comps = connected_components(&m.without(&set(&[A, B])));
        assert_eq!(comps, vec![set(&[C, D, H]), set(&[E, F, G])]);
    }

    #[test]
    fn completeness_cases() {
        let m = moralize(&net1_dag());
        assert!(is_complete(&m, &VertexSet::new()));
        assert!(is_complete(&m, &set(&[D])));
        assert!(is_complete(&m, &set(&[A, B])));
        assert!(!is_complete(&m, &set(&[C, G])));
    }

    #[test]
    fn decompose_at_examples() {
        let m = moralize(&net1_dag());
        let d = decompose_at(&m, &set(&[A, B])).unwrap();
        assert_eq!(d.v1, set(&[A, B, C, D, H]));
        assert_eq!(d.v2, set(&[A, B, E, F, G]));
        d.validate(&m).unwrap();

        let d = decompose_at(&path3(), &set(&[VarId(1)])).unwrap();
        assert_eq!(d.v1, set(&[VarId(0), VarId(1)]));
        assert_eq!(d.v2, set(&[VarId(1), VarId(2)]));

        // star: u = 0, leaves x, y, z = 1, 2, 3
        let mut star = UGraph::new((0..4).map(VarId));
        for i in 1..4 {
            star.add_edge(VarId(0), VarId(i));
        }
        let d = decompose_at(&star, &set(&[VarId(0)])).unwrap();
        assert_eq!(d.v1, set(&[VarId(0), VarId(1)]));
        assert_eq!(d.v2, set(&[VarId(0), VarId(2), VarId(3)]));
    }

    #[test]
    fn decompose_at_rejects_bad_separators() {
        let m = moralize(&net1_dag());
        assert!(matches!(decompose_at(&m, &set(&[C, G])), Err(Error::InvalidSeparator(_))));
        // complete but not separating
        assert!(matches!(decompose_at(&m, &set(&[A])), Err(Error::InvalidSeparator(_))));
    }

    #[test]
    fn nmc_separators_net1() {
        let dag = net1_dag();
        let m = moralize(&dag);
        let got: BTreeSet<VertexSet> = nmc_separators(&m, &VertexSet::new(), dag.parent_map()).unwrap().into_iter().collect();
        let want: BTreeSet<VertexSet> = [set(&[C, H]), set(&[A, B]), set(&[A, G])].into_iter().collect();
        assert_eq!(got, want);
    }

    #[test]
    fn nmc_separators_with_laden_leaf() {
        // d observed: d is net1's only leaf, {c, h} = pi(d) and g - {c,h} has 2 components.
        let dag = net1_dag();
        let m = moralize(&dag);
        assert_eq!(dag.leaves(), set(&[D]));
        let got: BTreeSet<VertexSet> = nmc_separators(&m, &set(&[D]), dag.parent_map()).unwrap().into_iter().collect();
        let want: BTreeSet<VertexSet> = [set(&[A, B]), set(&[A, G])].into_iter().collect();
        assert_eq!(got, want);
    }

    #[test]
    fn dot_export_lists_edges() {
        let dot = path3().to_dot(|v| format!("x{}", v.0));
        assert!(dot.contains("\"x0\" -- \"x1\""));
        assert!(dot.starts_with("graph G {"));
    }
}
