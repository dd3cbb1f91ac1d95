#![allow(dead_code)]

use std::collections::BTreeMap;

use grapeqi::cube::SimpleGraph;
use grapeqi::{GrapeBunch, Stem};
use proptest::prelude::*;

/// Parent pointers for a random tree: vertex `i + 1` hangs off `parents[i] % (i + 1)`.
fn tree_edges(parents: &[usize]) -> Vec<(String, String)> {
    parents.iter().enumerate().map(|(i, p)| (format!("v{}", p % (i + 1)), format!("v{}", i + 1))).collect()
}

pub fn stem(max_n: usize) -> impl Strategy<Value = Stem> {
    prop::collection::vec(any::<usize>(), 0..max_n).prop_map(|parents| {
        let n = parents.len() + 1;
        Stem::new((0..n).map(|i| format!("v{i}")), tree_edges(&parents)).unwrap()
    })
}

/// Any bunch on up to `max_n` stem vertices with at most `max_l` grapes per vertex.
pub fn bunch(max_n: usize, max_l: u32) -> impl Strategy<Value = GrapeBunch> {
    (stem(max_n), prop::collection::vec(0..=max_l, max_n)).prop_filter_map("path graph", |(stem, ls)| {
        let loops: BTreeMap<String, u32> = stem.names().iter().cloned().zip(ls).collect();
        GrapeBunch::new(stem, &loops).ok()
    })
}

pub fn large_bunch(max_n: usize, max_l: u32) -> impl Strategy<Value = GrapeBunch> {
    bunch(max_n, max_l).prop_filter("small", |g| g.classify().is_large())
}

pub fn large_normal_bunch(max_n: usize, max_l: u32) -> impl Strategy<Value = GrapeBunch> {
    large_bunch(max_n, max_l).prop_filter("not normal", |g| g.classify().normal)
}

/// Edge count of the realized graph.
pub fn realized_edges(g: &GrapeBunch) -> usize {
    g.stem().edge_count() + 3 * g.loops_sum() as usize
}

pub fn simple_graph(max_n: usize) -> impl Strategy<Value = SimpleGraph> {
    (2..=max_n)
        .prop_flat_map(|n| (Just(n), prop::collection::vec(any::<bool>(), n * (n - 1) / 2)))
        .prop_map(|(n, bits)| {
            let names: Vec<String> = (0..n).map(|i| format!("g{i}")).collect();
            let mut edges = Vec::new();
            let mut k = 0;
            for i in 0..n {
                for j in i + 1..n {
                    if bits[k] {
                        edges.push((names[i].clone(), names[j].clone()));
                    }
                    k += 1;
                }
            }
            SimpleGraph::new(names, edges).unwrap()
        })
}

/// Same bunch with every vertex renamed and the edge list fed in another order.
pub fn relabel(g: &GrapeBunch, tag: &str) -> GrapeBunch {
    let st = g.stem();
    let rename = |i: usize| format!("{tag}{}", st.len() - 1 - i);
    let mut edges: Vec<(String, String)> = st.edges().into_iter().map(|(a, b)| (rename(b), rename(a))).collect();
    edges.reverse();
    let stem = Stem::new((0..st.len()).rev().map(rename), edges).unwrap();
    let loops = (0..st.len()).map(|i| (rename(i), g.loops_at(i))).collect();
    GrapeBunch::new(stem, &loops).unwrap()
}
