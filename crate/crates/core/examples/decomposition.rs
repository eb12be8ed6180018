//! Splits the example net at the separator {a, b} and checks that the two
//! halves reproduce a marginal of the whole net once their answers are
//! multiplied and the separator variable b is summed out.
//!
//! `cargo run --example decomposition`

use ctprop::format::parse_net;
use ctprop::graph::{decompose_at, VertexSet};
use ctprop::oracle::brute_force_marginal;
use ctprop::{Query, SemiBayesNet};

fn ids(net: &SemiBayesNet, names: &[&str]) -> VertexSet {
    names.iter().map(|n| net.universe().lookup(n).expect("known variable").id).collect()
}

fn main() -> ctprop::Result<()> {
    let net = parse_net(include_str!("../fixtures/net1.net"))?;
    let d = decompose_at(&net.moral_graph(), &ids(&net, &["a", "b"]))?;
    let (left, right) = net.induced_decomposition(&d)?;
    println!("left part {}:\n{}", left.label(), left.describe());
    println!("right part {}:\n{}", right.label(), right.describe());

    let p_left = brute_force_marginal(&left, &Query::marginal(ids(&net, &["d", "a", "b"])))?;
    let p_right = brute_force_marginal(&right, &Query::marginal(ids(&net, &["a", "b", "e"])))?;
    let combined = p_left.multiply(&p_right)?.sum_out(&ids(&net, &["b"]))?;
    let whole = brute_force_marginal(&net, &Query::marginal(ids(&net, &["d", "a", "e"])))?;
    println!("P(d, a, e) from the parts vs the whole net: largest relative difference {:.1e}", combined.max_rel_diff(&whole));
    Ok(())
}
