//! Builds the component tree of the example net for the query P(d, e) and
//! prints each node with its conditionals and each edge with its label.
//!
//! `cargo run --example component_tree`

use ctprop::engine::component_tree;
use ctprop::format::parse_net;
use ctprop::Query;

fn main() -> ctprop::Result<()> {
    let net = parse_net(include_str!("../fixtures/net1.net"))?;
    let d = net.universe().lookup("d")?.id;
    let e = net.universe().lookup("e")?.id;
    let Some(tree) = component_tree(&net, &Query::marginal([d, e]))? else {
        println!("the net has no non-trivial separator");
        return Ok(());
    };
    for i in tree.live() {
        println!("node {} {}:\n{}", i, tree.node(i).label(), tree.node(i).describe());
    }
    for (i, j) in tree.edges() {
        let label: Vec<String> = tree.edge_label(i, j).iter().map(|v| net.name_of(*v)).collect();
        println!("edge {} - {} labelled {{{}}}", tree.node(i).label(), tree.node(j).label(), label.join(","));
    }
    println!("leaves: {:?}", tree.leaves().iter().map(|&i| tree.node(i).label()).collect::<Vec<_>>());
    Ok(())
}
