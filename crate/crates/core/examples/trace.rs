//! Answers P(d, e) on the example net and prints every serial reduction
//! step, the engine counters, and the resulting table.
//!
//! `cargo run --example trace`

use ctprop::engine::Scripted;
use ctprop::format::parse_net;
use ctprop::{Engine, Query};

fn main() -> ctprop::Result<()> {
    let net = parse_net(include_str!("../fixtures/net1.net"))?;
    let d = net.universe().lookup("d")?.id;
    let e = net.universe().lookup("e")?.id;
    let q = Query::marginal([d, e]);

    let mut engine = Engine::with_strategy(Scripted::new(["{e,f,g}", "{b,v1}", "{a,h,v2}"]));
    let answer = engine.answer(&net, &q)?;
    for step in &answer.trace {
        println!("{step}");
    }
    println!("{:?}", answer.stats);
    for (row, value) in answer.potential.assignments().iter().zip(answer.potential.values()) {
        println!("P(d={}, e={}) = {value:.12}", net.var(d).unwrap().states[row[0]], net.var(e).unwrap().states[row[1]]);
    }
    Ok(())
}
