//! Semi-Bayesian nets: Bayesian nets whose roots may lack priors, and whose
//! tables may carry parameter variables from outside the net.
//!
//! The prior joint potential of a net is the product of its items. Nets are
//! immutable; decomposition, union and answer appending build new nets that
//! share item tables.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::graph::{moralize, Decomposition, DiGraph, UGraph, VertexSet};
use crate::tables::{Evidence, Potential, Universe, VarId, VarKind, Variable};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ItemKind {
    /// P(child | parents), possibly with parameters.
    Conditional,
    /// The state-0 slice P(v = 0 | parents) of an appended answer. The child
    /// does not appear in the table.
    Auxiliary,
}

#[derive(Clone, Debug)]
pub struct Item {
    child: VarId,
    kind: ItemKind,
    table: Arc<Potential>,
}

impl Item {
    pub fn conditional(child: VarId, table: Potential) -> Self {
        Item { child, kind: ItemKind::Conditional, table: Arc::new(table) }
    }

    pub fn auxiliary(child: VarId, table: Potential) -> Self {
        Item { child, kind: ItemKind::Auxiliary, table: Arc::new(table) }
    }

    pub fn child(&self) -> VarId {
        self.child
    }

    pub fn kind(&self) -> ItemKind {
        self.kind
    }

    pub fn is_auxiliary(&self) -> bool {
        self.kind == ItemKind::Auxiliary
    }

    pub fn table(&self) -> &Potential {
        &self.table
    }

    /// Net variables tied together by this item: the child plus every table
    /// variable that is a vertex of the net.
    pub fn mentions(&self, vertices: &VertexSet) -> VertexSet {
        let mut out: VertexSet = self.table.vars().iter().copied().filter(|v| vertices.contains(v)).collect();
        out.insert(self.child);
        out
    }

    fn same(&self, other: &Item) -> bool {
        self.child == other.child && self.kind == other.kind && Arc::ptr_eq(&self.table, &other.table)
    }
}

/// A query P(X, Y = y0 : W). The parameters W are those of the net the
/// query is posed in and are not stored.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Query {
    pub targets: VertexSet,
    pub evidence: Evidence,
}

impl Query {
    pub fn new(targets: impl IntoIterator<Item = VarId>, evidence: Evidence) -> Result<Self> {
        let targets: VertexSet = targets.into_iter().collect();
        if let Some(v) = targets.iter().find(|v| evidence.contains_key(v)) {
            return Err(Error::Contract(format!("{v} is both a target and observed")));
        }
        Ok(Query { targets, evidence })
    }

    pub fn marginal(targets: impl IntoIterator<Item = VarId>) -> Self {
        Query { targets: targets.into_iter().collect(), evidence: Evidence::new() }
    }

    pub fn observed(&self) -> VertexSet {
        self.evidence.keys().copied().collect()
    }

    /// Checks that the query ranges over `net`'s variables with legal states.
    pub fn validate(&self, net: &SemiBayesNet) -> Result<()> {
        for v in self.targets.iter().chain(self.evidence.keys()) {
            if !net.vertices().contains(v) {
                return Err(Error::Contract(format!("{} is not a variable of the net", net.name_of(*v))));
            }
        }
        for (&v, &s) in &self.evidence {
            let card = net.card(v)?;
            if s >= card {
                return Err(Error::Input(format!("state {s} is not a legal state of {}", net.name_of(v))));
            }
            if net.var(v).is_some_and(|x| x.kind == VarKind::Auxiliary) && s != 0 {
                return Err(Error::Contract(format!("auxiliary {} can only be observed at 0", net.name_of(v))));
            }
        }
        if let Some(v) = self.targets.iter().find(|v| self.evidence.contains_key(v)) {
            return Err(Error::Contract(format!("{} is both a target and observed", net.name_of(*v))));
        }
        Ok(())
    }

    /// `targets;evidence;params` with names, e.g. `a,b;v1=0;e`.
    pub fn describe(&self, net: &SemiBayesNet) -> String {
        let targets: Vec<String> = self.targets.iter().map(|v| net.name_of(*v)).collect();
        let evidence: Vec<String> = self
            .evidence
            .iter()
            .map(|(&v, &s)| {
                let label = net.var(v).and_then(|x| x.states.get(s).cloned()).unwrap_or_else(|| s.to_string());
                format!("{}={}", net.name_of(v), label)
            })
            .collect();
        let params: Vec<String> = net.params().iter().map(|v| net.name_of(*v)).collect();
        format!("{};{};{}", targets.join(","), evidence.join(","), params.join(","))
    }
}

/// How a query's targets and evidence fall on the two sides of a
/// decomposition.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubquerySplit {
    pub separator: VertexSet,
    pub x1: VertexSet,
    pub x2: VertexSet,
    pub xs: VertexSet,
    pub y1: VertexSet,
    pub y2: VertexSet,
    pub ys: VertexSet,
    /// Evidence seen by the second part: YS and Y2.
    pub y_minus_1: Evidence,
    /// Evidence seen by the first part: YS and Y1.
    pub y_minus_2: Evidence,
}

/// Induced subqueries of `q` on the two parts of `d`. The first part's query
/// targets X1 and the unobserved separator variables under evidence YS, Y1;
/// the second part's is symmetric.
pub fn split_query(q: &Query, d: &Decomposition) -> (SubquerySplit, Query, Query) {
    let s = &d.separator;
    let only =
        |part: &VertexSet, set: &VertexSet| -> VertexSet { set.iter().copied().filter(|v| part.contains(v) && !s.contains(v)).collect() };
    let observed = q.observed();
    let x1 = only(&d.v1, &q.targets);
    let x2 = only(&d.v2, &q.targets);
    let xs: VertexSet = q.targets.intersection(s).copied().collect();
    let y1 = only(&d.v1, &observed);
    let y2 = only(&d.v2, &observed);
    let ys: VertexSet = observed.intersection(s).copied().collect();
    let pick = |vars: &VertexSet| -> Evidence { q.evidence.iter().filter(|(v, _)| vars.contains(v)).map(|(&v, &x)| (v, x)).collect() };
    let y_minus_2 = pick(&ys.union(&y1).copied().collect());
    let y_minus_1 = pick(&ys.union(&y2).copied().collect());
    let free_sep: VertexSet = s.difference(&ys).copied().collect();
    let q1 = Query { targets: x1.union(&free_sep).copied().collect(), evidence: y_minus_2.clone() };
    let q2 = Query { targets: x2.union(&free_sep).copied().collect(), evidence: y_minus_1.clone() };
    let split = SubquerySplit { separator: s.clone(), x1, x2, xs, y1, y2, ys, y_minus_1, y_minus_2 };
    (split, q1, q2)
}

#[derive(Clone, Debug)]
pub struct SemiBayesNet {
    universe: Arc<Universe>,
    aux: BTreeMap<VarId, Arc<Variable>>,
    vertices: VertexSet,
    dag: DiGraph,
    items: Vec<Item>,
}

impl SemiBayesNet {
    /// A net over `vertices` of `universe` with one conditional per entry
    /// of `cpts` (child, parents, table). Variables without a conditional are
    /// unspecified roots.
    pub fn from_conditionals(
        universe: Arc<Universe>,
        vertices: impl IntoIterator<Item = VarId>,
        cpts: Vec<(VarId, Vec<VarId>, Potential)>,
    ) -> Result<Self> {
        let vertices: VertexSet = vertices.into_iter().collect();
        let mut arcs = Vec::new();
        let mut items = Vec::new();
        for (child, parents, table) in cpts {
            if !vertices.contains(&child) {
                return Err(Error::Contract(format!("conditional for {child} outside the net")));
            }
            for &p in &parents {
                if !vertices.contains(&p) {
                    return Err(Error::Contract(format!("parent {p} outside the net")));
                }
                arcs.push((p, child));
            }
            items.push(Item::conditional(child, table));
        }
        let dag = DiGraph::new(vertices.iter().copied(), arcs)?;
        Self::assemble(universe, BTreeMap::new(), vertices, dag, items)
    }

    /// An empty net over `universe`.
    pub fn empty(universe: Arc<Universe>) -> Self {
        SemiBayesNet { universe, aux: BTreeMap::new(), vertices: VertexSet::new(), dag: DiGraph::default(), items: Vec::new() }
    }

    fn assemble(
        universe: Arc<Universe>,
        aux: BTreeMap<VarId, Arc<Variable>>,
        vertices: VertexSet,
        dag: DiGraph,
        items: Vec<Item>,
    ) -> Result<Self> {
        let net = SemiBayesNet { universe, aux, vertices, dag, items };
        net.check()?;
        Ok(net)
    }

    fn check(&self) -> Result<()> {
        if self.dag.vertices().collect::<VertexSet>() != self.vertices {
            return Err(Error::Internal("graph and vertex set disagree".into()));
        }
        let mut owners = BTreeSet::new();
        for item in &self.items {
            let child = item.child;
            if !self.vertices.contains(&child) {
                return Err(Error::Contract(format!("item for {} outside the net", self.name_of(child))));
            }
            if !owners.insert(child) {
                return Err(Error::ModelInconsistency(format!("{} has two conditionals", self.name_of(child))));
            }
            for (v, c) in item.table.scope() {
                let var = self.var(v).ok_or_else(|| Error::Contract(format!("table mentions unknown variable {v}")))?;
                if var.card() != c {
                    return Err(Error::ModelInconsistency(format!("{} has {} states but a table uses {c}", var.name, var.card())));
                }
            }
            let in_net: VertexSet = item.table.vars().iter().copied().filter(|v| self.vertices.contains(v)).collect();
            let parents = self.dag.parents(child);
            match item.kind {
                ItemKind::Conditional => {
                    let mut expect = parents.clone();
                    expect.insert(child);
                    if in_net != expect {
                        return Err(Error::ModelInconsistency(format!(
                            "table for {} does not range over the variable and its parents",
                            self.name_of(child)
                        )));
                    }
                }
                ItemKind::Auxiliary => {
                    if in_net != *parents || item.table.contains(child) {
                        return Err(Error::Internal(format!(
                            "auxiliary table for {} must range over its parents only",
                            self.name_of(child)
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn universe(&self) -> &Arc<Universe> {
        &self.universe
    }

    pub fn vertices(&self) -> &VertexSet {
        &self.vertices
    }

    pub fn items(&self) -> &[Item] {
        &self.items
    }

    pub fn item_of(&self, v: VarId) -> Option<&Item> {
        self.items.iter().find(|i| i.child == v)
    }

    pub fn dag(&self) -> &DiGraph {
        &self.dag
    }

    pub fn parents(&self, v: VarId) -> &VertexSet {
        self.dag.parents(v)
    }

    pub fn moral_graph(&self) -> UGraph {
        moralize(&self.dag)
    }

    pub fn var(&self, v: VarId) -> Option<&Arc<Variable>> {
        self.aux.get(&v).or_else(|| self.universe.get(v))
    }

    pub fn name_of(&self, v: VarId) -> String {
        self.var(v).map(|x| x.name.clone()).unwrap_or_else(|| v.to_string())
    }

    pub fn card(&self, v: VarId) -> Result<usize> {
        self.var(v).map(|x| x.card()).ok_or_else(|| Error::Contract(format!("unknown variable {v}")))
    }

    /// Product of cardinalities.
    pub fn cells<'a>(&self, vars: impl IntoIterator<Item = &'a VarId>) -> u128 {
        vars.into_iter().map(|v| self.card(*v).unwrap_or(1) as u128).product()
    }

    pub fn scope_of(&self, vars: &VertexSet) -> Result<Vec<(VarId, usize)>> {
        vars.iter().map(|&v| Ok((v, self.card(v)?))).collect()
    }

    /// Parameters: table variables that are not vertices of the net.
    pub fn params(&self) -> VertexSet {
        self.items.iter().flat_map(|i| i.table.vars().iter().copied()).filter(|v| !self.vertices.contains(v)).collect()
    }

    pub fn auxiliaries(&self) -> VertexSet {
        self.aux.keys().copied().filter(|v| self.vertices.contains(v)).collect()
    }

    pub fn leaves(&self) -> VertexSet {
        self.dag.leaves()
    }

    /// Roots of the graph that have no item.
    pub fn unspecified_roots(&self) -> VertexSet {
        self.dag.roots().into_iter().filter(|v| self.item_of(*v).is_none()).collect()
    }

    /// Every vertex has a conditional and nothing is parametric.
    pub fn is_bayesian(&self) -> bool {
        self.items.len() == self.vertices.len() && self.params().is_empty() && self.aux.is_empty()
    }

    /// One leaf, and every other vertex is a parent of it.
    pub fn is_simple(&self) -> bool {
        let leaves = self.leaves();
        if leaves.len() != 1 {
            return false;
        }
        let leaf = *leaves.iter().next().unwrap();
        self.parents(leaf).len() + 1 == self.vertices.len()
    }

    /// Observed leaves.
    pub fn laden_nodes(&self, q: &Query) -> VertexSet {
        self.leaves().into_iter().filter(|v| q.evidence.contains_key(v)).collect()
    }

    /// `{x,y,...}`: names of the variables whose items this net holds.
    pub fn label(&self) -> String {
        let mut children: Vec<VarId> = self.items.iter().map(|i| i.child).collect();
        children.sort();
        let names: Vec<String> = children.iter().map(|v| self.name_of(*v)).collect();
        format!("{{{}}}", names.join(","))
    }

    pub fn prior_joint_potential(&self) -> Result<Potential> {
        self.items.iter().try_fold(Potential::scalar(1.0), |acc, i| acc.multiply(&i.table))
    }

    /// P(X, Y = y0 : W) evaluated directly from the joint.
    pub fn marginal_potential(&self, q: &Query) -> Result<Potential> {
        crate::oracle::brute_force_marginal(self, q)
    }

    /// The net restricted to `keep`: items whose child is kept and arcs inside
    /// `keep`. Every kept item must mention only kept vertices.
    pub fn subnet(&self, keep: &VertexSet) -> Result<Self> {
        let items: Vec<Item> = self.items.iter().filter(|i| keep.contains(&i.child)).cloned().collect();
        for i in &items {
            if !i.mentions(&self.vertices).is_subset(keep) {
                return Err(Error::Contract(format!("item for {} leaves the kept set", self.name_of(i.child))));
            }
        }
        let arcs: Vec<(VarId, VarId)> = self.dag.arcs().filter(|(p, c)| keep.contains(p) && keep.contains(c)).collect();
        let dag = DiGraph::new(keep.iter().copied(), arcs)?;
        let aux = self.aux.iter().filter(|(v, _)| keep.contains(v)).map(|(&v, x)| (v, x.clone())).collect();
        Self::assemble(self.universe.clone(), aux, keep.clone(), dag, items)
    }

    fn with_items(&self, vertices: &VertexSet, items: Vec<Item>) -> Result<Self> {
        let mentions: Vec<VertexSet> = items.iter().map(|i| i.mentions(&self.vertices)).collect();
        let arcs: Vec<(VarId, VarId)> = self
            .dag
            .arcs()
            .filter(|(p, c)| vertices.contains(p) && vertices.contains(c))
            .filter(|(p, c)| mentions.iter().any(|m| m.contains(p) && m.contains(c)))
            .collect();
        let dag = DiGraph::new(vertices.iter().copied(), arcs)?;
        let aux = self.aux.iter().filter(|(v, _)| vertices.contains(v)).map(|(&v, x)| (v, x.clone())).collect();
        Self::assemble(self.universe.clone(), aux, vertices.clone(), dag, items)
    }

    /// Splits the net along a decomposition of its moral graph. Items that
    /// mention a variable of `v1 - v2` go to the first part, the rest to the
    /// second; each part keeps the arcs whose ends share one of its items.
    pub fn induced_decomposition(&self, d: &Decomposition) -> Result<(Self, Self)> {
        let union: VertexSet = d.v1.union(&d.v2).copied().collect();
        let inter: VertexSet = d.v1.intersection(&d.v2).copied().collect();
        if union != self.vertices || inter != d.separator || d.v1 == self.vertices || d.v2 == self.vertices {
            return Err(Error::Contract("not a decomposition of this net's vertices".into()));
        }
        let only1: VertexSet = d.v1.difference(&d.v2).copied().collect();
        let (p1, p2): (Vec<Item>, Vec<Item>) =
            self.items.iter().cloned().partition(|i| i.mentions(&self.vertices).iter().any(|v| only1.contains(v)));
        for (items, part) in [(&p1, &d.v1), (&p2, &d.v2)] {
            if let Some(i) = items.iter().find(|i| !i.mentions(&self.vertices).is_subset(part)) {
                return Err(Error::Contract(format!("item for {} straddles the separator", self.name_of(i.child))));
            }
        }
        Ok((self.with_items(&d.v1, p1)?, self.with_items(&d.v2, p2)?))
    }

    /// Componentwise union. Shared variables must agree and no variable may
    /// receive two items.
    pub fn union(&self, other: &SemiBayesNet) -> Result<Self> {
        if !Arc::ptr_eq(&self.universe, &other.universe) {
            let same = self.universe.len() == other.universe.len() && self.universe.iter().zip(other.universe.iter()).all(|(a, b)| a == b);
            if !same {
                return Err(Error::ModelInconsistency("nets come from different models".into()));
            }
        }
        let mut aux = self.aux.clone();
        for (&v, x) in &other.aux {
            if let Some(mine) = aux.get(&v) {
                if mine != x {
                    return Err(Error::ModelInconsistency(format!("auxiliary {v} described twice")));
                }
            }
            aux.insert(v, x.clone());
        }
        let vertices: VertexSet = self.vertices.union(&other.vertices).copied().collect();
        let mut items = self.items.clone();
        for i in &other.items {
            match items.iter().find(|j| j.child == i.child) {
                Some(j) if j.same(i) => {}
                Some(_) => return Err(Error::ModelInconsistency(format!("{} has a conditional in both nets", self.name_of(i.child)))),
                None => items.push(i.clone()),
            }
        }
        let arcs: BTreeSet<(VarId, VarId)> = self.dag.arcs().chain(other.dag.arcs()).collect();
        let dag = DiGraph::new(vertices.iter().copied(), arcs)?;
        Self::assemble(self.universe.clone(), aux, vertices, dag, items)
    }

    /// Grafts an answer `f` onto the net: a fresh binary variable `aux`
    /// becomes a child of every member of `s`, with P(aux = 0 | s) = f.
    /// Variables of `f` outside `s` become parameters.
    pub fn append_answer(&self, s: &VertexSet, f: Potential, aux: Variable) -> Result<Self> {
        if !s.is_subset(&self.vertices) {
            return Err(Error::Contract("append target is not a set of the net's variables".into()));
        }
        if let Some(v) = s.iter().find(|v| !f.contains(**v)) {
            return Err(Error::Contract(format!("answer does not range over {}", self.name_of(*v))));
        }
        if let Some(v) = f.vars().iter().find(|v| !s.contains(v) && self.vertices.contains(v)) {
            return Err(Error::Contract(format!("answer mentions net variable {} outside the separator", self.name_of(*v))));
        }
        if aux.kind != VarKind::Auxiliary || aux.card() != 2 {
            return Err(Error::Contract("appended variable must be binary auxiliary".into()));
        }
        let taken = self.var(aux.id).is_some() || self.vertices.iter().chain(self.params().iter()).any(|v| self.name_of(*v) == aux.name);
        if taken {
            return Err(Error::Internal(format!("auxiliary variable {} collides with an existing one", aux.name)));
        }
        let id = aux.id;
        let mut aux_map = self.aux.clone();
        aux_map.insert(id, Arc::new(aux));
        let mut vertices = self.vertices.clone();
        vertices.insert(id);
        let arcs: Vec<(VarId, VarId)> = self.dag.arcs().chain(s.iter().map(|&p| (p, id))).collect();
        let dag = DiGraph::new(vertices.iter().copied(), arcs)?;
        let mut items = self.items.clone();
        items.push(Item::auxiliary(id, f));
        Self::assemble(self.universe.clone(), aux_map, vertices, dag, items)
    }

    /// Largest k among auxiliary variables named `v<k>`.
    pub fn max_aux_index(&self) -> usize {
        self.auxiliaries().iter().filter_map(|v| self.aux[v].name.strip_prefix('v').and_then(|k| k.parse().ok())).max().unwrap_or(0)
    }

    /// Multi-line structural summary.
    pub fn describe(&self) -> String {
        let mut out = String::new();
        for item in &self.items {
            let ps: Vec<String> = self.parents(item.child).iter().map(|p| self.name_of(*p)).collect();
            let params: Vec<String> = item.table.vars().iter().filter(|v| !self.vertices.contains(v)).map(|v| self.name_of(*v)).collect();
            let head = match item.kind {
                ItemKind::Conditional => self.name_of(item.child),
                ItemKind::Auxiliary => format!("{}=0", self.name_of(item.child)),
            };
            let _ = write!(out, "P({head}");
            if !ps.is_empty() {
                let _ = write!(out, " | {}", ps.join(","));
            }
            if !params.is_empty() {
                let _ = write!(out, " : {}", params.join(","));
            }
            out.push_str(")\n");
        }
        for r in self.unspecified_roots() {
            let _ = writeln!(out, "unspecified root {}", self.name_of(r));
        }
        out
    }

    /// Same vertices, arcs and items (tables compared by value).
    pub fn structurally_equal(&self, other: &SemiBayesNet) -> bool {
        if self.vertices != other.vertices || self.dag != other.dag || self.items.len() != other.items.len() {
            return false;
        }
        self.items.iter().all(|i| other.item_of(i.child).is_some_and(|j| j.kind == i.kind && *j.table == *i.table))
    }
}
