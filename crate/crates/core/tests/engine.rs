mod common;

use common::{id, item_names, net1, set};
use ctprop::engine::{component_tree, nontrivial_separators, Scripted};
use ctprop::format::parse_net;
use ctprop::graph::VertexSet;
use ctprop::oracle::brute_force_marginal;
use ctprop::tables::{Variable, MAX_MODEL_ID};
use ctprop::{Engine, Error, Query, SemiBayesNet, VarId};

fn evidence(net: &SemiBayesNet, obs: &[(&str, usize)]) -> ctprop::tables::Evidence {
    obs.iter().map(|&(n, s)| (id(net, n), s)).collect()
}

fn net1_tree_nodes() -> (SemiBayesNet, Vec<SemiBayesNet>) {
    let net = net1();
    let tree = component_tree(&net, &Query::marginal(set(&net, &["d", "e"]))).unwrap().unwrap();
    let nodes = tree.live().map(|i| tree.node(i).clone()).collect();
    (net, nodes)
}

fn node_with(nodes: &[SemiBayesNet], label: &str) -> SemiBayesNet {
    nodes.iter().find(|n| n.label() == label).cloned().unwrap()
}

#[test]
fn net1_joint_of_d_and_e_matches_enumeration() {
    let net = net1();
    let q = Query::marginal(set(&net, &["d", "e"]));
    let got = Engine::new().marginal(&net, &q).unwrap();
    let want = brute_force_marginal(&net, &q).unwrap();
    assert!(got.approx_eq(&want, 1e-12, 0.0), "{:e}", got.max_rel_diff(&want));
    assert!((got.total() - 1.0).abs() < 1e-12);
}

#[test]
fn full_joint_sums_to_one() {
    let net = net1();
    let all: VertexSet = net.vertices().clone();
    let joint = Engine::new().marginal(&net, &Query::marginal(all)).unwrap();
    assert_eq!(joint.len(), 2usize.pow(7) * 3);
    assert!((joint.total() - 1.0).abs() < 1e-12);
}

#[test]
fn simple_net_is_answered_directly() {
    let net = parse_net("variable a { a0, a1 }\nvariable b { b0, b1 }\ncpt a { 0.4, 0.6 }\ncpt b | a { 0.9, 0.1, 0.2, 0.8 }\n").unwrap();
    assert!(net.is_simple());
    let ans = Engine::new().answer(&net, &Query::marginal([id(&net, "b")])).unwrap();
    assert_eq!(ans.stats.direct_evaluations, 1);
    assert_eq!(ans.stats.serial_steps, 0);
    assert!(ans.trace.is_empty());
    let want = [0.4 * 0.9 + 0.6 * 0.2, 0.4 * 0.1 + 0.6 * 0.8];
    for (g, w) in ans.potential.values().iter().zip(want) {
        assert!((g - w).abs() < 1e-15);
    }
}

#[test]
fn parametric_net_after_first_append_has_no_nontrivial_separator() {
    let (net, nodes) = net1_tree_nodes();
    let first = node_with(&nodes, "{e,f,g}");
    let second = node_with(&nodes, "{b}");
    let f = brute_force_marginal(&first, &Query::marginal(set(&net, &["a", "e", "g"]))).unwrap();
    let aux = Variable::auxiliary(VarId(MAX_MODEL_ID), "v1");
    let grown = second.append_answer(&set(&net, &["a", "g"]), f, aux).unwrap();
    assert_eq!(grown.label(), "{b,v1}");
    assert_eq!(grown.params(), set(&net, &["e"]));
    let q = Query::new(set(&net, &["a", "b"]), [(VarId(MAX_MODEL_ID), 0)].into_iter().collect()).unwrap();
    assert_eq!(q.describe(&grown), "a,b;v1=0;e");
    assert!(nontrivial_separators(&grown, &q).unwrap().is_empty());
}

#[test]
fn remaining_net_after_first_step_is_the_union_of_the_other_components() {
    let (net, nodes) = net1_tree_nodes();
    let q = Query::marginal(set(&net, &["d", "e"]));
    let mut engine = Engine::with_strategy(Scripted::new(["{e,f,g}", "{b,v1}", "{a,h,v2}"])).record_snapshots(true);
    let ans = engine.answer(&net, &q).unwrap();
    let remaining = &ans.snapshots[0].0;
    let aux = *remaining.auxiliaries().iter().next().unwrap();

    let first = node_with(&nodes, "{e,f,g}");
    let f = brute_force_marginal(&first, &Query::marginal(set(&net, &["a", "e", "g"]))).unwrap();
    let grown = node_with(&nodes, "{b}").append_answer(&set(&net, &["a", "g"]), f, Variable::auxiliary(aux, "v1")).unwrap();
    let union = node_with(&nodes, "{c,d}").union(&node_with(&nodes, "{a,h}")).unwrap().union(&grown).unwrap();
    assert_eq!(item_names(&union), ["a", "b", "c", "d", "h", "v1"]);

    assert_eq!(remaining.vertices(), union.vertices());
    assert_eq!(remaining.dag(), union.dag());
    assert_eq!(remaining.items().len(), union.items().len());
    for item in remaining.items() {
        let other = union.item_of(item.child()).unwrap();
        assert_eq!(item.kind(), other.kind());
        assert!(item.table().approx_eq(other.table(), 1e-12, 1e-15));
    }
}

#[test]
fn every_snapshot_answers_the_original_query() {
    let net = net1();
    let q = Query::new(set(&net, &["d"]), evidence(&net, &[("e", 1)])).unwrap();
    let ans = Engine::new().record_snapshots(true).answer(&net, &q).unwrap();
    assert_eq!(ans.snapshots.len(), ans.trace.len() - 1);
    assert!(!ans.snapshots.is_empty());
    for (remaining, rq) in &ans.snapshots {
        let here = brute_force_marginal(remaining, rq).unwrap();
        assert!(here.approx_eq(&ans.potential, 1e-12, 0.0), "{:e}", here.max_rel_diff(&ans.potential));
    }
}

#[test]
fn two_component_tree_takes_one_append() {
    let text = "variable a { a0, a1 }\nvariable b { b0, b1 }\nvariable c { c0, c1 }\nvariable d { d0, d1 }\nvariable e { e0, e1 }\n\
                cpt a { 0.5, 0.5 }\ncpt b | a { 0.3, 0.7, 0.6, 0.4 }\ncpt c | a, b { 0.1, 0.9, 0.2, 0.8, 0.3, 0.7, 0.4, 0.6 }\n\
                cpt d | c { 0.35, 0.65, 0.75, 0.25 }\ncpt e | c, d { 0.5, 0.5, 0.15, 0.85, 0.45, 0.55, 0.05, 0.95 }\n";
    let net = parse_net(text).unwrap();
    let q = Query::marginal([id(&net, "e")]);
    let tree = component_tree(&net, &q).unwrap().unwrap();
    assert_eq!(tree.len(), 2);
    let ans = Engine::new().answer(&net, &q).unwrap();
    assert_eq!(ans.stats.serial_steps, 1);
    assert_eq!(ans.trace.len(), 2);
    assert!(ans.trace[0].append_to.is_some());
    assert!(ans.trace[1].append_to.is_none());
    assert!(ans.potential.approx_eq(&brute_force_marginal(&net, &q).unwrap(), 1e-12, 0.0));
}

#[test]
fn uniform_conditionals_give_uniform_posteriors() {
    let mut text = String::new();
    for v in ["a", "b", "c", "d"] {
        text += &format!("variable {v} {{ {v}0, {v}1, {v}2 }}\n");
    }
    let third = "0.3333333333333333, 0.3333333333333333, 0.3333333333333334";
    text += &format!("cpt a {{ {third} }}\ncpt b | a {{ {} }}\n", [third; 3].join(", "));
    text += &format!("cpt c | a, b {{ {} }}\ncpt d | c {{ {} }}\n", [third; 9].join(", "), [third; 3].join(", "));
    let net = parse_net(&text).unwrap();
    let q = Query::new(set(&net, &["a", "d"]), evidence(&net, &[("b", 2)])).unwrap();
    let post = Engine::new().posterior(&net, &q).unwrap();
    for v in post.values() {
        assert!((v - 1.0 / 9.0).abs() < 1e-12);
    }
}

#[test]
fn root_marginal_is_its_prior() {
    let net = net1();
    let p = Engine::new().marginal(&net, &Query::marginal([id(&net, "c")])).unwrap();
    assert!((p.values()[0] - 0.3).abs() < 1e-15 && (p.values()[1] - 0.7).abs() < 1e-15);
}

#[test]
fn impossible_evidence_is_reported() {
    let net = parse_net("variable a { a0, a1 }\nvariable b { b0, b1 }\ncpt a { 1, 0 }\ncpt b | a { 0.5, 0.5, 0.5, 0.5 }\n").unwrap();
    let q = Query::new([id(&net, "b")], evidence(&net, &[("a", 1)])).unwrap();
    assert!(matches!(Engine::new().posterior(&net, &q), Err(Error::ZeroProbabilityEvidence(_))));
    assert_eq!(Engine::new().marginal(&net, &q).unwrap().total(), 0.0);
}

#[test]
fn empty_query_is_the_scalar_one() {
    let net = net1();
    let p = Engine::new().marginal(&net, &Query::default()).unwrap();
    assert!(p.is_scalar());
    assert!((p.values()[0] - 1.0).abs() < 1e-12);
}

#[test]
fn unknown_variables_in_a_query_are_rejected() {
    let net = net1();
    assert!(Engine::new().marginal(&net, &Query::marginal([VarId(99)])).is_err());
}
