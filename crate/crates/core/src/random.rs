//! Seeded generators of random nets and queries for property tests,
//! benchmarks and examples.

use std::ops::RangeInclusive;
use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::semibn::{Query, SemiBayesNet};
use crate::tables::{Evidence, Potential, Universe, VarId, VarKind};

#[derive(Clone, Debug)]
pub struct NetConfig {
    pub vars: RangeInclusive<usize>,
    pub states: RangeInclusive<usize>,
    pub max_parents: usize,
    /// Chance that a root is left without a prior.
    pub unspecified_root_prob: f64,
    /// Parameter variables added to the universe; each is attached to one
    /// or two random conditionals.
    pub params: RangeInclusive<usize>,
}

impl NetConfig {
    /// Bayesian nets with up to `max_vars` variables of 2 or 3 states.
    pub fn bayesian(max_vars: usize) -> Self {
        NetConfig { vars: 4..=max_vars, states: 2..=3, max_parents: 3, unspecified_root_prob: 0.0, params: 0..=0 }
    }

    /// Semi-Bayesian nets, possibly with unspecified roots and parameters.
    pub fn semi_bayesian(max_vars: usize) -> Self {
        NetConfig { vars: 4..=max_vars, states: 2..=3, max_parents: 3, unspecified_root_prob: 0.5, params: 0..=1 }
    }
}

/// A table over `scope` (sorted by id) whose slices along `child` are
/// random strictly positive distributions.
pub fn random_conditional<R: Rng>(rng: &mut R, scope: &[(VarId, usize)], child: VarId) -> Potential {
    let mut sorted = scope.to_vec();
    sorted.sort_by_key(|&(v, _)| v);
    let pos = sorted.iter().position(|&(v, _)| v == child).expect("child in scope");
    let mut layout: Vec<(VarId, usize)> = sorted.iter().copied().filter(|&(v, _)| v != child).collect();
    layout.push(sorted[pos]);
    let child_card = sorted[pos].1;
    let rows: usize = layout[..layout.len() - 1].iter().map(|&(_, c)| c).product();
    let mut values = Vec::with_capacity(rows * child_card);
    for _ in 0..rows {
        let row: Vec<f64> = (0..child_card).map(|_| rng.gen_range(0.05..1.0)).collect();
        let total: f64 = row.iter().sum();
        values.extend(row.iter().map(|x| x / total));
    }
    Potential::from_layout(&layout, values).expect("well-formed random table")
}

/// A random net: variable `i` draws up to `max_parents` parents among
/// variables `0..i`.
pub fn random_net<R: Rng>(rng: &mut R, cfg: &NetConfig) -> SemiBayesNet {
    let n = rng.gen_range(cfg.vars.clone());
    build(rng, n, cfg, |_| None)
}

/// A net of `n` variables where each variable's parents lie among the
/// `width` variables before it, which keeps the tree-width below `width`.
pub fn banded_net<R: Rng>(rng: &mut R, n: usize, width: usize) -> SemiBayesNet {
    let cfg = NetConfig { vars: n..=n, states: 2..=3, max_parents: 2, unspecified_root_prob: 0.0, params: 0..=0 };
    build(rng, n, &cfg, |i| Some(i.saturating_sub(width)))
}

fn build<R: Rng>(rng: &mut R, n: usize, cfg: &NetConfig, window: impl Fn(usize) -> Option<usize>) -> SemiBayesNet {
    let mut u = Universe::new();
    let mut ids = Vec::with_capacity(n);
    for i in 0..n {
        let k = rng.gen_range(cfg.states.clone());
        let states = (0..k).map(|s| format!("s{s}")).collect();
        ids.push(u.add(&format!("x{i}"), states, VarKind::Net).expect("fresh name"));
    }
    let n_params = rng.gen_range(cfg.params.clone());
    let params: Vec<VarId> =
        (0..n_params).map(|i| u.add(&format!("w{i}"), vec!["p0".into(), "p1".into()], VarKind::Parameter).expect("fresh name")).collect();

    let mut parents: Vec<Vec<VarId>> = Vec::with_capacity(n);
    for i in 0..n {
        let lo = window(i).unwrap_or(0);
        let mut pool: Vec<VarId> = ids[lo..i].to_vec();
        pool.shuffle(rng);
        let k = rng.gen_range(0..=cfg.max_parents.min(pool.len()));
        pool.truncate(k);
        pool.sort();
        parents.push(pool);
    }
    let mut with_params: Vec<Vec<VarId>> = vec![Vec::new(); n];
    for &w in &params {
        for _ in 0..rng.gen_range(1..=2) {
            let i = rng.gen_range(0..n);
            if !with_params[i].contains(&w) {
                with_params[i].push(w);
            }
        }
    }

    let mut cpts = Vec::new();
    for i in 0..n {
        if parents[i].is_empty() && rng.gen_bool(cfg.unspecified_root_prob) {
            continue;
        }
        let mut scope: Vec<(VarId, usize)> =
            parents[i].iter().chain(with_params[i].iter()).map(|&v| (v, u.var(v).expect("declared").card())).collect();
        scope.push((ids[i], u.var(ids[i]).expect("declared").card()));
        let table = random_conditional(rng, &scope, ids[i]);
        cpts.push((ids[i], parents[i].clone(), table));
    }
    SemiBayesNet::from_conditionals(Arc::new(u), ids, cpts).expect("random net is well formed")
}

/// Random targets and evidence over disjoint random variables of `net`.
pub fn random_query<R: Rng>(rng: &mut R, net: &SemiBayesNet, targets: RangeInclusive<usize>, evidence: RangeInclusive<usize>) -> Query {
    let mut pool: Vec<VarId> = net.vertices().iter().copied().filter(|v| net.var(*v).is_some_and(|x| x.kind == VarKind::Net)).collect();
    pool.shuffle(rng);
    let nx = rng.gen_range(targets).min(pool.len());
    let x: Vec<VarId> = pool.drain(..nx).collect();
    let ny = rng.gen_range(evidence).min(pool.len());
    let y: Evidence = pool
        .drain(..ny)
        .map(|v| {
            let card = net.card(v).expect("net variable");
            (v, rng.gen_range(0..card))
        })
        .collect();
    Query::new(x, y).expect("disjoint targets and evidence")
}
