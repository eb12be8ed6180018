#![allow(dead_code)]

use ctprop::format::parse_net;
use ctprop::graph::VertexSet;
use ctprop::{SemiBayesNet, VarId};

pub const NET1: &str = include_str!("../../fixtures/net1.net");
pub const NET1_TRACE: &str = include_str!("../golden/net1_trace.txt");

pub fn net1() -> SemiBayesNet {
    parse_net(NET1).expect("fixture parses")
}

pub fn id(net: &SemiBayesNet, name: &str) -> VarId {
    net.universe().lookup(name).expect("known variable").id
}

pub fn set(net: &SemiBayesNet, names: &[&str]) -> VertexSet {
    names.iter().map(|n| id(net, n)).collect()
}

/// Names of the variables whose items a net holds, sorted.
pub fn item_names(net: &SemiBayesNet) -> Vec<String> {
    let mut names: Vec<String> = net.items().iter().map(|i| net.name_of(i.child())).collect();
    names.sort();
    names
}
