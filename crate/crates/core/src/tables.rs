//! Dense discrete potentials and the variables they range over.
//!
//! A [`Potential`] is a table of non-negative reals indexed by the joint
//! states of its scope. The scope is kept sorted by [`VarId`] and the table
//! is stored row-major with the first scope variable varying slowest, so two
//! potentials over the same scope always have the same cell order.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

/// Model variable ids must stay below this bound; ids above it are handed
/// out to auxiliary variables created during inference.
pub const MAX_MODEL_ID: u32 = 1 << 31;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VarId(pub u32);

impl fmt::Display for VarId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum VarKind {
    Net,
    Parameter,
    /// Binary helper variable introduced when an answer is appended to a
    /// component. Only its state 0 is ever evaluated.
    Auxiliary,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Variable {
    pub id: VarId,
    pub name: String,
    pub states: Vec<String>,
    pub kind: VarKind,
}

impl Variable {
    pub fn new(id: VarId, name: impl Into<String>, states: Vec<String>, kind: VarKind) -> Result<Self> {
        let name = name.into();
        if states.is_empty() {
            return Err(Error::Input(format!("variable {name} has no states")));
        }
        let mut seen = BTreeSet::new();
        for s in &states {
            if !seen.insert(s.as_str()) {
                return Err(Error::Input(format!("variable {name} repeats state {s}")));
            }
        }
        Ok(Variable { id, name, states, kind })
    }

    pub fn auxiliary(id: VarId, name: impl Into<String>) -> Self {
        Variable { id, name: name.into(), states: vec!["0".to_string(), "1".to_string()], kind: VarKind::Auxiliary }
    }

    pub fn card(&self) -> usize {
        self.states.len()
    }

    pub fn state_index(&self, label: &str) -> Result<usize> {
        self.states.iter().position(|s| s == label).ok_or_else(|| Error::Input(format!("variable {} has no state {label}", self.name)))
    }
}

/// Registry of the variables of one model. Names and ids are unique.
#[derive(Clone, Debug, Default)]
pub struct Universe {
    vars: Vec<Arc<Variable>>,
    by_name: HashMap<String, VarId>,
}

impl Universe {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, name: &str, states: Vec<String>, kind: VarKind) -> Result<VarId> {
        if self.by_name.contains_key(name) {
            return Err(Error::Input(format!("variable {name} declared twice")));
        }
        let raw = u32::try_from(self.vars.len()).ok().filter(|&i| i < MAX_MODEL_ID);
        let id = VarId(raw.ok_or_else(|| Error::Input("too many variables".into()))?);
        let var = Variable::new(id, name, states, kind)?;
        self.by_name.insert(name.to_string(), id);
        self.vars.push(Arc::new(var));
        Ok(id)
    }

    pub fn get(&self, id: VarId) -> Option<&Arc<Variable>> {
        self.vars.get(id.0 as usize)
    }

    pub fn var(&self, id: VarId) -> Result<&Arc<Variable>> {
        self.get(id).ok_or_else(|| Error::Input(format!("unknown variable {id}")))
    }

    pub fn lookup(&self, name: &str) -> Result<&Arc<Variable>> {
        let id = self.by_name.get(name).ok_or_else(|| Error::Input(format!("unknown variable {name}")))?;
        self.var(*id)
    }

    pub fn iter(&self) -> impl Iterator<Item = &Arc<Variable>> {
        self.vars.iter()
    }

    pub fn len(&self) -> usize {
        self.vars.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vars.is_empty()
    }
}

/// Observed states keyed by variable.
pub type Evidence = BTreeMap<VarId, usize>;

#[derive(Clone, Debug, PartialEq)]
pub struct Potential {
    vars: Vec<VarId>,
    cards: Vec<usize>,
    values: Vec<f64>,
}

fn cell_count(cards: &[usize]) -> usize {
    cards.iter().product()
}

/// Strides of `scope` positions inside a table laid out over `vars`/`cards`;
/// zero for variables the table does not mention.
fn strides_in(target: &[VarId], vars: &[VarId], cards: &[usize]) -> Vec<usize> {
    let mut own = vec![0usize; vars.len()];
    let mut acc = 1;
    for i in (0..vars.len()).rev() {
        own[i] = acc;
        acc *= cards[i];
    }
    target.iter().map(|v| vars.binary_search(v).map(|i| own[i]).unwrap_or(0)).collect()
}

/// Walks every cell of a row-major table over `cards` and reports, for each
/// cell, the offsets into each of the strided source tables.
fn for_each_cell<const K: usize>(cards: &[usize], strides: [&[usize]; K], mut f: impl FnMut([usize; K])) {
    let total = cell_count(cards);
    let mut counter = vec![0usize; cards.len()];
    let mut offsets = [0usize; K];
    for _ in 0..total {
        f(offsets);
        for pos in (0..cards.len()).rev() {
            counter[pos] += 1;
            for k in 0..K {
                offsets[k] += strides[k][pos];
            }
            if counter[pos] < cards[pos] {
                break;
            }
            for k in 0..K {
                offsets[k] -= strides[k][pos] * cards[pos];
            }
            counter[pos] = 0;
        }
    }
}

impl Potential {
    pub fn scalar(value: f64) -> Self {
        Potential { vars: Vec::new(), cards: Vec::new(), values: vec![value] }
    }

    /// Builds a potential whose scope is given in ascending id order.
    pub fn new(scope: Vec<(VarId, usize)>, values: Vec<f64>) -> Result<Self> {
        for w in scope.windows(2) {
            if w[0].0 >= w[1].0 {
                return Err(Error::Contract("potential scope must be strictly ascending by id".into()));
            }
        }
        let (vars, cards): (Vec<_>, Vec<_>) = scope.into_iter().unzip();
        if cards.contains(&0) {
            return Err(Error::Contract("zero cardinality in scope".into()));
        }
        if values.len() != cell_count(&cards) {
            return Err(Error::Contract(format!("table has {} values, scope needs {}", values.len(), cell_count(&cards))));
        }
        if let Some(bad) = values.iter().find(|v| !v.is_finite() || **v < 0.0) {
            return Err(Error::Input(format!("table value {bad} is not a finite non-negative number")));
        }
        Ok(Potential { vars, cards, values })
    }

    /// Builds a potential from values laid out row-major over `scope` in the
    /// given (arbitrary) variable order, re-laying them out in id order.
    pub fn from_layout(scope: &[(VarId, usize)], values: Vec<f64>) -> Result<Self> {
        let mut sorted: Vec<(VarId, usize)> = scope.to_vec();
        sorted.sort_by_key(|&(v, _)| v);
        if sorted.windows(2).any(|w| w[0].0 == w[1].0) {
            return Err(Error::Contract("duplicate variable in scope".into()));
        }
        let given_vars: Vec<VarId> = scope.iter().map(|&(v, _)| v).collect();
        let given_cards: Vec<usize> = scope.iter().map(|&(_, c)| c).collect();
        if values.len() != cell_count(&given_cards) {
            return Err(Error::Contract(format!("table has {} values, scope needs {}", values.len(), cell_count(&given_cards))));
        }
        let sorted_vars: Vec<VarId> = sorted.iter().map(|&(v, _)| v).collect();
        let sorted_cards: Vec<usize> = sorted.iter().map(|&(_, c)| c).collect();
        // Walk the target (sorted) layout and read from the given layout.
        let src = {
            let mut own = vec![0usize; given_vars.len()];
            let mut acc = 1;
            for i in (0..given_vars.len()).rev() {
                own[i] = acc;
                acc *= given_cards[i];
            }
            sorted_vars.iter().map(|v| own[given_vars.iter().position(|g| g == v).unwrap()]).collect::<Vec<_>>()
        };
        let mut out = Vec::with_capacity(values.len());
        for_each_cell(&sorted_cards, [&src], |[o]| out.push(values[o]));
        Potential::new(sorted, out)
    }

    pub fn ones(scope: &[(VarId, usize)]) -> Result<Self> {
        let mut sorted = scope.to_vec();
        sorted.sort_by_key(|&(v, _)| v);
        let n = sorted.iter().map(|&(_, c)| c).product();
        Potential::new(sorted, vec![1.0; n])
    }

    pub fn vars(&self) -> &[VarId] {
        &self.vars
    }

    pub fn cards(&self) -> &[usize] {
        &self.cards
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn scope(&self) -> impl Iterator<Item = (VarId, usize)> + '_ {
        self.vars.iter().copied().zip(self.cards.iter().copied())
    }

    pub fn scope_set(&self) -> BTreeSet<VarId> {
        self.vars.iter().copied().collect()
    }

    pub fn contains(&self, v: VarId) -> bool {
        self.vars.binary_search(&v).is_ok()
    }

    pub fn card_of(&self, v: VarId) -> Option<usize> {
        self.vars.binary_search(&v).ok().map(|i| self.cards[i])
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn is_scalar(&self) -> bool {
        self.vars.is_empty()
    }

    pub fn total(&self) -> f64 {
        self.values.iter().sum()
    }

    /// Value at a full assignment of the scope (extra keys are ignored).
    pub fn get(&self, assignment: &BTreeMap<VarId, usize>) -> Result<f64> {
        let mut idx = 0;
        for (v, c) in self.scope() {
            let s = *assignment.get(&v).ok_or_else(|| Error::Contract(format!("assignment misses {v}")))?;
            if s >= c {
                return Err(Error::Input(format!("state {s} out of range for {v}")));
            }
            idx = idx * c + s;
        }
        Ok(self.values[idx])
    }

    /// All assignments of the scope in cell order.
    pub fn assignments(&self) -> Vec<Vec<usize>> {
        let mut out = Vec::with_capacity(self.len());
        let mut cur = vec![0usize; self.cards.len()];
        for _ in 0..self.len() {
            out.push(cur.clone());
            for pos in (0..cur.len()).rev() {
                cur[pos] += 1;
                if cur[pos] < self.cards[pos] {
                    break;
                }
                cur[pos] = 0;
            }
        }
        out
    }

    pub fn multiply(&self, other: &Potential) -> Result<Potential> {
        let mut scope: BTreeMap<VarId, usize> = self.scope().collect();
        for (v, c) in other.scope() {
            if let Some(&mine) = scope.get(&v) {
                if mine != c {
                    return Err(Error::ModelInconsistency(format!("variable {v} has cardinality {mine} in one table and {c} in another")));
                }
            }
            scope.insert(v, c);
        }
        let vars: Vec<VarId> = scope.keys().copied().collect();
        let cards: Vec<usize> = scope.values().copied().collect();
        let sa = strides_in(&vars, &self.vars, &self.cards);
        let sb = strides_in(&vars, &other.vars, &other.cards);
        let mut values = Vec::with_capacity(cell_count(&cards));
        for_each_cell(&cards, [&sa, &sb], |[a, b]| values.push(self.values[a] * other.values[b]));
        Ok(Potential { vars, cards, values })
    }

    pub fn sum_out(&self, vars: &BTreeSet<VarId>) -> Result<Potential> {
        if let Some(v) = vars.iter().find(|v| !self.contains(**v)) {
            return Err(Error::Contract(format!("cannot sum out {v}: not in scope")));
        }
        if vars.is_empty() {
            return Ok(self.clone());
        }
        let keep: Vec<(VarId, usize)> = self.scope().filter(|(v, _)| !vars.contains(v)).collect();
        let kvars: Vec<VarId> = keep.iter().map(|&(v, _)| v).collect();
        let kcards: Vec<usize> = keep.iter().map(|&(_, c)| c).collect();
        let target = strides_in(&self.vars, &kvars, &kcards);
        let mut values = vec![0.0; cell_count(&kcards)];
        let mut i = 0;
        for_each_cell(&self.cards, [&target], |[t]| {
            values[t] += self.values[i];
            i += 1;
        });
        Ok(Potential { vars: kvars, cards: kcards, values })
    }

    /// Sums out every scope variable not in `keep`.
    pub fn marginalize_onto(&self, keep: &BTreeSet<VarId>) -> Result<Potential> {
        let drop: BTreeSet<VarId> = self.vars.iter().copied().filter(|v| !keep.contains(v)).collect();
        self.sum_out(&drop)
    }

    pub fn restrict(&self, evidence: &Evidence) -> Result<Potential> {
        if evidence.is_empty() {
            return Ok(self.clone());
        }
        let mut base = 0;
        let own = strides_in(&self.vars, &self.vars, &self.cards);
        for (&v, &s) in evidence {
            let i = self.vars.binary_search(&v).map_err(|_| Error::Contract(format!("cannot restrict {v}: not in scope")))?;
            if s >= self.cards[i] {
                return Err(Error::Input(format!("state {s} is not a legal state of {v} (cardinality {})", self.cards[i])));
            }
            base += s * own[i];
        }
        let keep: Vec<usize> = (0..self.vars.len()).filter(|&i| !evidence.contains_key(&self.vars[i])).collect();
        let kvars: Vec<VarId> = keep.iter().map(|&i| self.vars[i]).collect();
        let kcards: Vec<usize> = keep.iter().map(|&i| self.cards[i]).collect();
        let src: Vec<usize> = keep.iter().map(|&i| own[i]).collect();
        let mut values = Vec::with_capacity(cell_count(&kcards));
        for_each_cell(&kcards, [&src], |[o]| values.push(self.values[base + o]));
        Ok(Potential { vars: kvars, cards: kcards, values })
    }

    /// Restricts by the part of `evidence` that falls inside the scope.
    pub fn restrict_overlapping(&self, evidence: &Evidence) -> Result<Potential> {
        let inside: Evidence = evidence.iter().filter(|(v, _)| self.contains(**v)).map(|(&v, &s)| (v, s)).collect();
        self.restrict(&inside)
    }

    pub fn normalize(&self) -> Result<Potential> {
        let total = self.total();
        if total <= 0.0 {
            return Err(Error::ZeroProbabilityEvidence("total mass is zero".into()));
        }
        let scale = 1.0 / total;
        Ok(Potential { vars: self.vars.clone(), cards: self.cards.clone(), values: self.values.iter().map(|v| v * scale).collect() })
    }

    /// Extends a table to the observed variables `ys`: the original value where
    /// every observed variable takes its observed state, zero elsewhere.
    pub fn extend_with_evidence_indicator(&self, ys: &[(VarId, usize)], ys0: &Evidence) -> Result<Potential> {
        if ys.len() != ys0.len() || ys.iter().any(|(v, _)| !ys0.contains_key(v)) {
            return Err(Error::Contract("observed values must cover exactly the observed variables".into()));
        }
        if let Some((v, _)) = ys.iter().find(|(v, _)| self.contains(*v)) {
            return Err(Error::Contract(format!("{v} is already in the table's scope")));
        }
        if ys.is_empty() {
            return Ok(self.clone());
        }
        for &(v, c) in ys {
            if ys0[&v] >= c {
                return Err(Error::Input(format!("state {} is not a legal state of {v}", ys0[&v])));
            }
        }
        let indicator = {
            let mut scope = ys.to_vec();
            scope.sort_by_key(|&(v, _)| v);
            let mut values = vec![0.0; scope.iter().map(|&(_, c)| c).product()];
            let hot = scope.iter().fold(0, |acc, &(v, c)| acc * c + ys0[&v]);
            values[hot] = 1.0;
            Potential::new(scope, values)?
        };
        self.multiply(&indicator)
    }

    /// Adds all-ones dimensions for the given variables not already present.
    pub fn broadcast(&self, extra: &[(VarId, usize)]) -> Result<Potential> {
        let missing: Vec<(VarId, usize)> = extra.iter().copied().filter(|(v, _)| !self.contains(*v)).collect();
        if missing.is_empty() {
            return Ok(self.clone());
        }
        self.multiply(&Potential::ones(&missing)?)
    }

    /// Elementwise comparison: same scope, and every cell satisfies
    /// `|a - b| <= max(rel * max(|a|, |b|), abs)`.
    pub fn approx_eq(&self, other: &Potential, rel: f64, abs: f64) -> bool {
        self.vars == other.vars
            && self.cards == other.cards
            && self.values.iter().zip(&other.values).all(|(a, b)| a == b || (a - b).abs() <= (rel * a.abs().max(b.abs())).max(abs))
    }

    /// Largest relative deviation between two potentials over the same scope.
    pub fn max_rel_diff(&self, other: &Potential) -> f64 {
        if self.vars != other.vars {
            return f64::INFINITY;
        }
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| if a == b { 0.0 } else { (a - b).abs() / a.abs().max(b.abs()) })
            .fold(0.0, f64::max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(i: u32) -> VarId {
        VarId(i)
    }

    fn pot(scope: &[(u32, usize)], values: &[f64]) -> Potential {
        Potential::new(scope.iter().map(|&(i, c)| (v(i), c)).collect(), values.to_vec()).unwrap()
    }

    #[test]
    fn scalar_identity_for_multiply() {
        let p = pot(&[(0, 2), (3, 3)], &[0.1, 0.2, 0.3, 0.4, 0.5, 0.6]);
        assert_eq!(Potential::scalar(1.0).multiply(&p).unwrap(), p);
        assert_eq!(p.multiply(&Potential::scalar(1.0)).unwrap(), p);
    }

    #[test]
    fn constant_factor_scaling() {
        let p = pot(&[(0, 2)], &[0.3, 0.7]);
        let q = pot(&[(0, 2)], &[2.0, 2.0]);
        assert_eq!(p.multiply(&q).unwrap().values(), &[0.6, 1.4]);
    }

    #[test]
    fn multiply_aligns_cells_by_variable() {
        // a = #0 (2 states), b = #1 (3 states)
        let pa = pot(&[(0, 2)], &[2.0, 3.0]);
        let pb = pot(&[(1, 3)], &[1.0, 10.0, 100.0]);
        let prod = pb.multiply(&pa).unwrap();
        assert_eq!(prod.vars(), &[v(0), v(1)]);
        assert_eq!(prod.values(), &[2.0, 20.0, 200.0, 3.0, 30.0, 300.0]);
    }

    #[test]
    fn multiply_rejects_cardinality_clash() {
        let p = pot(&[(0, 2)], &[0.5, 0.5]);
        let q = pot(&[(0, 3)], &[1.0, 1.0, 1.0]);
        assert!(matches!(p.multiply(&q), Err(Error::ModelInconsistency(_))));
    }

    #[test]
    fn sum_out_empty_set_is_identity() {
        let p = pot(&[(0, 2), (1, 2)], &[0.1, 0.2, 0.3, 0.4]);
        assert_eq!(p.sum_out(&BTreeSet::new()).unwrap(), p);
    }

    #[test]
    fn sum_out_full_joint_is_one() {
        let p = pot(&[(0, 2), (1, 2)], &[0.1, 0.2, 0.3, 0.4]);
        let all = p.scope_set();
        let s = p.sum_out(&all).unwrap();
        assert!(s.is_scalar());
        assert!((s.values()[0] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn sum_out_marginal_matches_hand_sum() {
        // a = #0, c = #1. P(c) = (0.4, 0.6); P(a|c) rows: c0 -> (0.9, 0.1), c1 -> (0.2, 0.8).
        let pc = pot(&[(1, 2)], &[0.4, 0.6]);
        // layout over (a, c): a slowest.
        let pac = pot(&[(0, 2), (1, 2)], &[0.9, 0.2, 0.1, 0.8]);
        let joint = pac.multiply(&pc).unwrap();
        let pa = joint.sum_out(&[v(1)].into_iter().collect()).unwrap();
        // hand sums: P(a0) = 0.9*0.4 + 0.2*0.6, P(a1) = 0.1*0.4 + 0.8*0.6
        let expected = [0.9 * 0.4 + 0.2 * 0.6, 0.1 * 0.4 + 0.8 * 0.6];
        for (got, want) in pa.values().iter().zip(expected) {
            assert!((got - want).abs() < 1e-15);
        }
    }

    #[test]
    fn sum_out_unknown_var_is_contract_violation() {
        let p = pot(&[(0, 2)], &[0.5, 0.5]);
        assert!(matches!(p.sum_out(&[v(9)].into_iter().collect()), Err(Error::Contract(_))));
    }

    #[test]
    fn restrict_picks_slice() {
        let p = pot(&[(0, 2), (1, 3)], &[1.0, 2.0, 3.0, 4.0, 5.0, 6.0]);
        assert_eq!(p.restrict(&Evidence::new()).unwrap(), p);
        let r = p.restrict(&[(v(1), 2)].into_iter().collect()).unwrap();
        assert_eq!(r.vars(), &[v(0)]);
        assert_eq!(r.values(), &[3.0, 6.0]);
        let r = p.restrict(&[(v(0), 1)].into_iter().collect()).unwrap();
        assert_eq!(r.values(), &[4.0, 5.0, 6.0]);
    }

    #[test]
    fn restrict_rejects_illegal_state() {
        let p = pot(&[(0, 2)], &[0.5, 0.5]);
        assert!(matches!(p.restrict(&[(v(0), 2)].into_iter().collect()), Err(Error::Input(_))));
        assert!(matches!(p.restrict(&[(v(4), 0)].into_iter().collect()), Err(Error::Contract(_))));
    }

    #[test]
    fn normalize_cases() {
        let p = pot(&[(0, 2)], &[0.2, 0.2]);
        assert_eq!(p.normalize().unwrap().values(), &[0.5, 0.5]);
        let q = pot(&[(0, 2)], &[0.25, 0.75]);
        assert_eq!(q.normalize().unwrap(), q);
        let z = pot(&[(0, 2)], &[0.0, 0.0]);
        assert!(matches!(z.normalize(), Err(Error::ZeroProbabilityEvidence(_))));
    }

    #[test]
    fn extend_with_indicator() {
        let f0 = Potential::scalar(0.4);
        assert_eq!(f0.extend_with_evidence_indicator(&[], &Evidence::new()).unwrap(), f0);
        let ext = f0.extend_with_evidence_indicator(&[(v(7), 2)], &[(v(7), 0)].into_iter().collect()).unwrap();
        assert_eq!(ext.vars(), &[v(7)]);
        assert_eq!(ext.values(), &[0.4, 0.0]);
        let p = pot(&[(0, 2)], &[0.5, 0.5]);
        assert!(matches!(p.extend_with_evidence_indicator(&[(v(0), 2)], &[(v(0), 0)].into_iter().collect()), Err(Error::Contract(_))));
    }

    #[test]
    fn from_layout_reorders_to_id_order() {
        // given order (b=#1 slowest, a=#0 fastest)
        let p = Potential::from_layout(&[(v(1), 2), (v(0), 3)], vec![1.0, 2.0, 3.0, 4.0, 5.0, 6.0]).unwrap();
        assert_eq!(p.vars(), &[v(0), v(1)]);
        // cell (a, b): (0,0)=1 (0,1)=4 (1,0)=2 (1,1)=5 (2,0)=3 (2,1)=6
        assert_eq!(p.values(), &[1.0, 4.0, 2.0, 5.0, 3.0, 6.0]);
    }

    #[test]
    fn rejects_negative_and_wrong_length() {
        assert!(Potential::new(vec![(v(0), 2)], vec![0.5]).is_err());
        assert!(Potential::new(vec![(v(0), 2)], vec![0.5, -0.1]).is_err());
        assert!(Potential::new(vec![(v(1), 2), (v(0), 2)], vec![0.0; 4]).is_err());
    }
}
