//! Reference evaluators used to check the engine: brute-force enumeration of
//! the joint and plain variable elimination. Both compute
//! P(X, Y = y0 : W) for a semi-Bayesian net: the product of all items,
//! restricted to the evidence and summed onto the targets and parameters.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::semibn::{Query, SemiBayesNet};
use crate::tables::{Potential, VarId};

/// Largest joint the brute-force oracle will materialise.
pub const DEFAULT_CELL_CAP: u128 = 1 << 24;

pub fn brute_force_marginal(net: &SemiBayesNet, q: &Query) -> Result<Potential> {
    brute_force_marginal_capped(net, q, DEFAULT_CELL_CAP)
}

pub fn brute_force_marginal_capped(net: &SemiBayesNet, q: &Query, cap: u128) -> Result<Potential> {
    q.validate(net)?;
    let scope: BTreeSet<VarId> = net.items().iter().flat_map(|i| i.table().vars().iter().copied()).collect();
    let cells = net.cells(&scope);
    if cells > cap {
        return Err(Error::TooLarge { cells, cap });
    }
    let joint = net.prior_joint_potential()?;
    finish(net, q, joint.restrict_overlapping(&q.evidence)?)
}

/// Variable elimination in the given order; variables missing from `order`
/// are eliminated afterwards by ascending id. With `None` a greedy
/// smallest-product order is used.
pub fn variable_elimination_marginal(net: &SemiBayesNet, q: &Query, order: Option<&[VarId]>) -> Result<Potential> {
    q.validate(net)?;
    let mut factors: Vec<Potential> = net.items().iter().map(|i| i.table().restrict_overlapping(&q.evidence)).collect::<Result<_>>()?;
    let params = net.params();
    let mut pending: BTreeSet<VarId> =
        factors.iter().flat_map(|f| f.vars().iter().copied()).filter(|v| !q.targets.contains(v) && !params.contains(v)).collect();
    let mut fixed: Vec<VarId> = order.map(|o| o.iter().copied().filter(|v| pending.contains(v)).collect()).unwrap_or_default();
    fixed.reverse();
    while !pending.is_empty() {
        let v = match fixed.pop() {
            Some(v) => v,
            None if order.is_some() => *pending.iter().next().unwrap(),
            None => greedy_pick(&factors, &pending),
        };
        pending.remove(&v);
        let (with, without): (Vec<Potential>, Vec<Potential>) = factors.into_iter().partition(|f| f.contains(v));
        let product = with.iter().try_fold(Potential::scalar(1.0), |acc, f| acc.multiply(f))?;
        factors = without;
        factors.push(product.sum_out(&[v].into_iter().collect())?);
    }
    let joint = factors.iter().try_fold(Potential::scalar(1.0), |acc, f| acc.multiply(f))?;
    finish(net, q, joint)
}

fn greedy_pick(factors: &[Potential], pending: &BTreeSet<VarId>) -> VarId {
    *pending
        .iter()
        .min_by_key(|&&v| {
            let scope: BTreeSet<(VarId, usize)> = factors.iter().filter(|f| f.contains(v)).flat_map(|f| f.scope()).collect();
            (scope.iter().map(|&(_, c)| c as u128).product::<u128>(), v)
        })
        .unwrap()
}

fn finish(net: &SemiBayesNet, q: &Query, restricted: Potential) -> Result<Potential> {
    let mut keep: BTreeSet<VarId> = q.targets.clone();
    keep.extend(net.params());
    let out = restricted.marginalize_onto(&keep)?;
    let missing: Vec<(VarId, usize)> = keep.iter().filter(|v| !out.contains(**v)).map(|&v| Ok((v, net.card(v)?))).collect::<Result<_>>()?;
    out.broadcast(&missing)
}
