//! Answers one leaf of the example net's component tree and appends that
//! answer to its neighbour. The neighbour becomes a parametric net with an
//! auxiliary child whose observed value carries the leaf's evidence.
//!
//! `cargo run --example parametric`

use ctprop::engine::component_tree;
use ctprop::format::parse_net;
use ctprop::graph::VertexSet;
use ctprop::tables::{Variable, MAX_MODEL_ID};
use ctprop::{Engine, Query, VarId};

fn main() -> ctprop::Result<()> {
    let net = parse_net(include_str!("../fixtures/net1.net"))?;
    let id = |n: &str| net.universe().lookup(n).map(|v| v.id);
    let tree = component_tree(&net, &Query::marginal([id("d")?, id("e")?]))?.expect("the example net decomposes");
    let node = |label: &str| tree.live().map(|i| tree.node(i)).find(|n| n.label() == label).expect("node exists");

    let leaf = node("{e,f,g}");
    let f = Engine::new().marginal(leaf, &Query::marginal([id("a")?, id("e")?, id("g")?]))?;
    println!("leaf answer over {} cells", f.len());

    let separator: VertexSet = [id("a")?, id("g")?].into_iter().collect();
    let aux = VarId(MAX_MODEL_ID);
    let grown = node("{b}").append_answer(&separator, f, Variable::auxiliary(aux, "v1"))?;
    println!("{} now reads:\n{}", grown.label(), grown.describe());

    let q = Query::new([id("a")?, id("b")?], [(aux, 0)].into_iter().collect())?;
    println!("query {}", q.describe(&grown));
    let answer = Engine::new().marginal(&grown, &q)?;
    let scope: Vec<String> = answer.vars().iter().map(|v| grown.name_of(*v)).collect();
    println!("answer is a table over ({}), total {:.6}", scope.join(", "), answer.total());
    Ok(())
}
