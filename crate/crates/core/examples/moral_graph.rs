//! Moralizes the example net and lists its clique minimal separators, the
//! atoms they cut the graph into, and the separators the engine would use.
//!
//! `cargo run --example moral_graph`

use ctprop::format::parse_net;
use ctprop::graph::{clique_separator_decomposition, moralize, nmc_separators, VertexSet};
use ctprop::SemiBayesNet;

fn names(net: &SemiBayesNet, s: &VertexSet) -> String {
    let v: Vec<String> = s.iter().map(|v| net.name_of(*v)).collect();
    format!("{{{}}}", v.join(","))
}

fn main() -> ctprop::Result<()> {
    let net = parse_net(include_str!("../fixtures/net1.net"))?;
    let moral = moralize(net.dag());
    let arcs: Vec<(String, String)> = net.dag().arcs().map(|(a, b)| (net.name_of(a), net.name_of(b))).collect();
    println!("{} arcs, {} moral edges", arcs.len(), moral.edge_count());
    for (a, b) in moral.edges() {
        if !net.dag().parents(b).contains(&a) && !net.dag().parents(a).contains(&b) {
            println!("  married: {} - {}", net.name_of(a), net.name_of(b));
        }
    }

    let d = clique_separator_decomposition(&moral)?;
    println!("clique minimal separators:");
    for s in d.separators() {
        println!("  {}", names(&net, &s));
    }
    println!("atoms:");
    for a in d.atoms() {
        println!("  {}", names(&net, &a));
    }

    let used = nmc_separators(&moral, &VertexSet::new(), net.dag().parent_map())?;
    println!("non-trivial separators: {}", used.iter().map(|s| names(&net, s)).collect::<Vec<_>>().join(" "));
    println!("\n{}", moral.to_dot(|v| net.name_of(v)));
    Ok(())
}
