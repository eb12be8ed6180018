use std::collections::BTreeSet;

use ctprop::engine::{component_tree, nontrivial_separators};
use ctprop::graph::{clique_separator_decomposition, connected_components, is_complete, moralize, UGraph, VertexSet};
use ctprop::random::{random_net, NetConfig};
use ctprop::{Query, VarId};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_graph(rng: &mut ChaCha8Rng, n: u32, p: f64) -> UGraph {
    let mut g = UGraph::new((0..n).map(VarId));
    for a in 0..n {
        for b in a + 1..n {
            if rng.gen_bool(p) {
                g.add_edge(VarId(a), VarId(b));
            }
        }
    }
    g
}

/// Minimal separators have at least two full components: components whose
/// neighbourhood is the whole separator.
fn is_minimal_separator(g: &UGraph, s: &VertexSet) -> bool {
    let rest = g.without(s);
    let full = connected_components(&rest)
        .into_iter()
        .filter(|c| {
            let nbrs: VertexSet = c.iter().flat_map(|v| g.neighbors(*v).iter().copied()).filter(|w| s.contains(w)).collect();
            nbrs == *s
        })
        .count();
    full >= 2
}

fn all_clique_minimal_separators(g: &UGraph) -> BTreeSet<VertexSet> {
    let verts: Vec<VarId> = g.vertices().collect();
    let n = verts.len();
    (1u32..(1 << n))
        .map(|mask| (0..n).filter(|i| mask & (1 << i) != 0).map(|i| verts[i]).collect::<VertexSet>())
        .filter(|s| s.len() < n && is_complete(g, s) && is_minimal_separator(g, s))
        .collect()
}

#[test]
fn decomposition_finds_exactly_the_clique_minimal_separators() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut checked = 0;
    while checked < 300 {
        let n = rng.gen_range(3..=10);
        let density = rng.gen_range(0.2..0.6);
        let g = random_graph(&mut rng, n, density);
        if !g.is_connected() {
            continue;
        }
        checked += 1;
        let found: BTreeSet<VertexSet> = clique_separator_decomposition(&g).unwrap().separators().into_iter().collect();
        for s in &found {
            assert!(is_complete(&g, s));
            assert!(is_minimal_separator(&g, s), "{s:?} is not a minimal separator");
        }
        assert_eq!(found, all_clique_minimal_separators(&g));
    }
}

#[test]
fn atoms_have_no_clique_separator() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for _ in 0..200 {
        let g = random_graph(&mut rng, 8, 0.35);
        if !g.is_connected() {
            continue;
        }
        let d = clique_separator_decomposition(&g).unwrap();
        let covered: VertexSet = d.atoms().iter().flatten().copied().collect();
        assert_eq!(covered, g.vertex_set());
        for atom in d.atoms() {
            let sub = g.induced(&atom);
            assert!(clique_separator_decomposition(&sub).unwrap().separators().is_empty());
        }
    }
}

#[test]
fn non_simple_nets_are_decomposable() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let mut seen = 0;
    while seen < 200 {
        let net = random_net(&mut rng, &NetConfig::semi_bayesian(10));
        let g = moralize(net.dag());
        if net.is_simple() || !g.is_connected() {
            continue;
        }
        seen += 1;
        assert!(!clique_separator_decomposition(&g).unwrap().separators().is_empty());
    }
}

#[test]
fn tree_nodes_are_unions_of_atoms() {
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    let mut seen = 0;
    while seen < 100 {
        let net = random_net(&mut rng, &NetConfig::bayesian(10));
        let g = moralize(net.dag());
        if !g.is_connected() {
            continue;
        }
        let q = Query::default();
        let used: BTreeSet<VertexSet> = nontrivial_separators(&net, &q).unwrap().into_iter().collect();
        let Some(tree) = component_tree(&net, &q).unwrap() else {
            assert!(used.is_empty());
            continue;
        };
        seen += 1;
        let nodes: Vec<VertexSet> = tree.live().map(|i| tree.node(i).vertices().clone()).collect();
        for atom in clique_separator_decomposition(&g).unwrap().atoms() {
            assert!(nodes.iter().any(|n| atom.is_subset(n)), "atom {atom:?} split across nodes");
        }
        for (i, a) in nodes.iter().enumerate() {
            for b in &nodes[i + 1..] {
                assert!(!a.is_subset(b) && !b.is_subset(a));
            }
        }
        let covered: VertexSet = nodes.iter().flatten().copied().collect();
        assert_eq!(covered, g.vertex_set());
        assert_eq!(tree.edges().len() + 1, tree.len());
        let labels: BTreeSet<VertexSet> = tree.edges().into_iter().map(|(i, j)| tree.edge_label(i, j)).collect();
        for label in &labels {
            assert!(is_complete(&g, label));
        }
        assert!(labels.is_subset(&used));
    }
}
