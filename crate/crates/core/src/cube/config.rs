use std::collections::{BTreeSet, HashMap};

use crate::error::{Error, Result};
use crate::grape::GrapeBunch;

use super::complex::{Cube, CubeComplex};
use super::graph::SimpleGraph;

/// Whether size guards are enforced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Guard {
    #[default]
    Enforce,
    Override,
}

/// Largest base graph accepted for `UD_n`, by `n`.
pub fn max_base_vertices(n: usize) -> usize {
    match n {
        0..=2 => 40,
        3 => 20,
        _ => 14,
    }
}

/// Cell-count ceiling for any configuration complex.
pub const MAX_CELLS: usize = 1_000_000;

fn fresh(base: String, taken: &mut BTreeSet<String>) -> String {
    let mut name = base;
    while taken.contains(&name) {
        name.push('\'');
    }
    taken.insert(name.clone());
    name
}

/// The realized graph together with, for each of its vertices, the stem
/// vertex it belongs to.
pub(crate) fn realize_with_owners(g: &GrapeBunch) -> (SimpleGraph, Vec<usize>) {
    let stem = g.stem();
    let mut taken: BTreeSet<String> = stem.names().iter().cloned().collect();
    let mut owner_of: HashMap<String, usize> = (0..stem.len()).map(|i| (stem.name(i).to_string(), i)).collect();
    let mut edges: Vec<(String, String)> =
        stem.edges().into_iter().map(|(a, b)| (stem.name(a).to_string(), stem.name(b).to_string())).collect();
    for v in 0..stem.len() {
        let name = stem.name(v);
        for k in 1..=g.loops_at(v) {
            let x = fresh(format!("{name}#{k}a"), &mut taken);
            let y = fresh(format!("{name}#{k}b"), &mut taken);
            owner_of.insert(x.clone(), v);
            owner_of.insert(y.clone(), v);
            edges.push((name.to_string(), x.clone()));
            edges.push((x.clone(), y.clone()));
            edges.push((y, name.to_string()));
        }
    }
    let graph = SimpleGraph::new(stem.names().iter().cloned(), edges).expect("realization is simple");
    let owners = graph.names().iter().map(|n| owner_of[n]).collect();
    (graph, owners)
}

/// Stem edges plus `ℓ(v)` triangles at each vertex `v`. Grape vertices are
/// named `v#ka` and `v#kb`.
pub fn realize_grape(g: &GrapeBunch) -> SimpleGraph {
    realize_with_owners(g).0
}

/// Maximal chains: paths whose interior vertices have degree 2, with their
/// edge indices. A cycle of degree-2 vertices yields one closed chain.
fn chains(gr: &SimpleGraph) -> Vec<(Vec<usize>, Vec<usize>)> {
    let n = gr.vertex_count();
    let mut used = vec![false; gr.edge_count()];
    let mut out = Vec::new();
    let walk = |start: usize, first: usize, used: &mut Vec<bool>| -> (Vec<usize>, Vec<usize>) {
        let mut verts = vec![start, first];
        let mut es = vec![gr.edge_index(start, first).unwrap()];
        used[es[0]] = true;
        loop {
            let cur = *verts.last().unwrap();
            if gr.degree(cur) != 2 || cur == start {
                break;
            }
            let next = gr.neighbors(cur).iter().copied().find(|&w| !used[gr.edge_index(cur, w).unwrap()]);
            let Some(next) = next else { break };
            let e = gr.edge_index(cur, next).unwrap();
            used[e] = true;
            es.push(e);
            verts.push(next);
        }
        (verts, es)
    };
    for v in 0..n {
        if gr.degree(v) == 2 {
            continue;
        }
        for &w in gr.neighbors(v) {
            if !used[gr.edge_index(v, w).unwrap()] {
                out.push(walk(v, w, &mut used));
            }
        }
    }
    for v in 0..n {
        for &w in gr.neighbors(v) {
            if !used[gr.edge_index(v, w).unwrap()] {
                out.push(walk(v, w, &mut used));
            }
        }
    }
    out
}

/// Smallest length each chain must reach for `n` particles.
fn required_lengths(gr: &SimpleGraph, n: usize) -> Vec<(Vec<usize>, Vec<usize>, usize)> {
    chains(gr)
        .into_iter()
        .map(|(verts, es)| {
            let closed = verts[0] == *verts.last().unwrap();
            let need = if closed { n + 1 } else { n.saturating_sub(1) };
            (verts, es, need)
        })
        .collect()
}

/// The first violated subdivision condition for `n` particles, if any.
pub fn subdivision_violation(gr: &SimpleGraph, n: usize) -> Option<String> {
    if n <= 2 {
        return None;
    }
    for (verts, es, need) in required_lengths(gr, n) {
        if es.len() < need {
            let ends = format!("{} .. {}", gr.name(verts[0]), gr.name(*verts.last().unwrap()));
            return Some(if verts[0] == *verts.last().unwrap() {
                format!("cycle through {} has {} edges; needs at least {} (n+1)", gr.name(verts[0]), es.len(), need)
            } else {
                format!("path {ends} between non-bivalent vertices has {} edges; needs at least {} (n-1)", es.len(), need)
            });
        }
    }
    None
}

/// Subdivides edges, as little as possible, so that every chain between
/// non-bivalent vertices has at least `n - 1` edges and every cycle at least
/// `n + 1`. New vertices are named `a~b~k`.
pub fn subdivide_for(gr: &SimpleGraph, n: usize) -> Result<SimpleGraph> {
    if n < 2 {
        return Err(Error::InvalidArgument("number of particles must be at least 2".into()));
    }
    if !gr.is_connected() {
        return Err(Error::Disconnected);
    }
    if n == 2 {
        return Ok(gr.clone());
    }
    let mut extra = vec![0usize; gr.edge_count()];
    for (_, es, need) in required_lengths(gr, n) {
        let k = es.len();
        if k < need {
            let add = need - k;
            for (j, &e) in es.iter().enumerate() {
                extra[e] = add / k + usize::from(j < add % k);
            }
        }
    }
    let mut taken: BTreeSet<String> = gr.names().iter().cloned().collect();
    let mut edges: Vec<(String, String)> = Vec::new();
    for (e, &(a, b)) in gr.edges().iter().enumerate() {
        let (a, b) = (gr.name(a).to_string(), gr.name(b).to_string());
        let mut prev = a.clone();
        for k in 1..=extra[e] {
            let mid = fresh(format!("{a}~{b}~{k}"), &mut taken);
            edges.push((prev, mid.clone()));
            prev = mid;
        }
        edges.push((prev, b));
    }
    SimpleGraph::new(gr.names().iter().cloned(), edges)
}

fn member_name(gr: &SimpleGraph, c: usize) -> String {
    let nv = gr.vertex_count();
    if c < nv {
        gr.name(c).to_string()
    } else {
        let (a, b) = gr.edges()[c - nv];
        format!("{}-{}", gr.name(a), gr.name(b))
    }
}

/// Human-readable name of a configuration: its base cells.
pub fn config_label(gr: &SimpleGraph, members: &[usize]) -> String {
    let parts: Vec<String> = members.iter().map(|&c| member_name(gr, c)).collect();
    format!("{{{}}}", parts.join(", "))
}

/// The unordered discrete configuration space of `n` points.
///
/// Base cells are numbered vertices first, then edges in sorted order; each
/// configuration cell records its members in increasing order.
pub fn build_udn(gr: &SimpleGraph, n: usize) -> Result<CubeComplex> {
    build_udn_with(gr, n, Guard::Enforce)
}

pub fn build_udn_with(gr: &SimpleGraph, n: usize, guard: Guard) -> Result<CubeComplex> {
    if n < 2 {
        return Err(Error::InvalidArgument("number of particles must be at least 2".into()));
    }
    let limit = max_base_vertices(n);
    if guard == Guard::Enforce && gr.vertex_count() > limit {
        return Err(Error::Guard(format!("UD_{n} accepts at most {limit} base vertices, got {}", gr.vertex_count())));
    }
    if let Some(why) = subdivision_violation(gr, n) {
        return Err(Error::Precondition(format!("graph is not sufficiently subdivided: {why}")));
    }
    let nv = gr.vertex_count();
    let ne = gr.edge_count();
    let closure = |c: usize| -> (usize, Option<usize>) {
        if c < nv {
            (c, None)
        } else {
            let (a, b) = gr.edges()[c - nv];
            (a, Some(b))
        }
    };
    let mut by_dim: Vec<Vec<Vec<usize>>> = vec![Vec::new(); n + 1];
    let mut count = 0usize;
    let mut chosen = Vec::with_capacity(n);
    let mut used = vec![false; nv];
    #[allow(clippy::too_many_arguments)]
    fn rec(
        start: usize,
        total: usize,
        n: usize,
        closure: &dyn Fn(usize) -> (usize, Option<usize>),
        chosen: &mut Vec<usize>,
        used: &mut Vec<bool>,
        by_dim: &mut Vec<Vec<Vec<usize>>>,
        count: &mut usize,
        nv: usize,
    ) -> Result<()> {
        if chosen.len() == n {
            let d = chosen.iter().filter(|&&c| c >= nv).count();
            by_dim[d].push(chosen.clone());
            *count += 1;
            if *count > MAX_CELLS {
                return Err(Error::Guard(format!("more than {MAX_CELLS} cells")));
            }
            return Ok(());
        }
        for c in start..total {
            let (a, b) = closure(c);
            if used[a] || b.is_some_and(|b| used[b]) {
                continue;
            }
            used[a] = true;
            if let Some(b) = b {
                used[b] = true;
            }
            chosen.push(c);
            rec(c + 1, total, n, closure, chosen, used, by_dim, count, nv)?;
            chosen.pop();
            used[a] = false;
            if let Some(b) = b {
                used[b] = false;
            }
        }
        Ok(())
    }
    rec(0, nv + ne, n, &closure, &mut chosen, &mut used, &mut by_dim, &mut count, nv)?;
    while by_dim.len() > 1 && by_dim.last().is_some_and(Vec::is_empty) {
        by_dim.pop();
    }
    for list in &mut by_dim {
        list.sort();
    }
    let index: Vec<HashMap<&[usize], usize>> =
        by_dim.iter().map(|list| list.iter().enumerate().map(|(k, m)| (m.as_slice(), k)).collect()).collect();
    let face = |verts: &[usize], edges: &[usize], mask: usize, keep: Option<usize>| -> Vec<usize> {
        let mut m: Vec<usize> = verts.to_vec();
        for (i, &e) in edges.iter().enumerate() {
            if Some(i) == keep {
                m.push(e);
            } else {
                let (a, b) = gr.edges()[e - nv];
                m.push(if mask >> i & 1 == 0 { a } else { b });
            }
        }
        m.sort_unstable();
        m
    };
    let mut cells: Vec<Vec<Cube>> = Vec::with_capacity(by_dim.len());
    for (d, list) in by_dim.iter().enumerate() {
        let mut out = Vec::with_capacity(list.len());
        for (k, members) in list.iter().enumerate() {
            if d == 0 {
                out.push(Cube { vertices: vec![k], edges: Vec::new() });
                continue;
            }
            let (vs, es): (Vec<usize>, Vec<usize>) = members.iter().partition(|&&c| c < nv);
            let vertices = (0..1usize << d).map(|m| index[0][face(&vs, &es, m, None).as_slice()]).collect();
            let mut edges = vec![0; d << (d - 1)];
            for i in 0..d {
                for m in (0..1usize << d).filter(|m| m >> i & 1 == 0) {
                    edges[Cube::slot(d, i, m)] = index[1][face(&vs, &es, m, Some(i)).as_slice()];
                }
            }
            out.push(Cube { vertices, edges });
        }
        cells.push(out);
    }
    let labels = by_dim[0].iter().map(|m| config_label(gr, m)).collect();
    Ok(CubeComplex::from_cells(labels, cells, by_dim))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn star3() -> SimpleGraph {
        SimpleGraph::from_edges([("c", "x"), ("c", "y"), ("c", "z")]).unwrap()
    }

    fn triangle() -> SimpleGraph {
        SimpleGraph::from_edges([("a", "b"), ("b", "c"), ("a", "c")]).unwrap()
    }

    #[test]
    fn realizations() {
        let edge = GrapeBunch::from_edges(&[("u", "v")], &[("u", 1), ("v", 1)]).unwrap();
        let r = realize_grape(&edge);
        assert_eq!((r.vertex_count(), r.edge_count()), (6, 7));
        let tree = GrapeBunch::from_edges(&[("c", "x"), ("c", "y"), ("c", "z")], &[]).unwrap();
        assert_eq!(realize_grape(&tree), star3());
    }

    #[test]
    fn subdivisions() {
        assert_eq!(subdivide_for(&star3(), 2).unwrap(), star3());
        assert_eq!(subdivide_for(&triangle(), 2).unwrap(), triangle());
        let s = subdivide_for(&star3(), 4).unwrap();
        assert_eq!((s.vertex_count(), s.edge_count()), (10, 9));
        assert!(subdivision_violation(&s, 4).is_none());
        assert!(subdivision_violation(&star3(), 4).unwrap().contains("n-1"));
        let t = subdivide_for(&triangle(), 3).unwrap();
        assert_eq!(t.edge_count(), 4);
        assert!(subdivision_violation(&triangle(), 3).unwrap().contains("n+1"));
    }

    #[test]
    fn ud2_examples() {
        let u = build_udn(&star3(), 2).unwrap();
        assert_eq!(u.f_vector(), vec![6, 6]);
        assert_eq!(u.betti(), (1, 1));
        let t = build_udn(&triangle(), 2).unwrap();
        assert_eq!(t.f_vector(), vec![3, 3]);
        assert_eq!(t.betti(), (1, 1));
        let bouquet = GrapeBunch::from_parts(crate::grape::Stem::single("o"), vec![2]);
        let b = build_udn(&realize_grape(&bouquet), 2).unwrap();
        assert_eq!(b.f_vector(), vec![10, 18, 5]);
        assert_eq!(b.betti(), (1, 4));
        assert!(b.links_ok().ok);
        assert!(b.hyperplanes().is_clean());
    }

    #[test]
    fn ud_needs_subdivision() {
        let err = build_udn(&star3(), 3).unwrap_err();
        assert!(matches!(err, Error::Precondition(_)));
        let u = build_udn(&subdivide_for(&star3(), 3).unwrap(), 3).unwrap();
        assert!(u.links_ok().ok);
    }

    #[test]
    fn guard() {
        let names: Vec<String> = (0..41).map(|i| format!("p{i:02}")).collect();
        let edges: Vec<(String, String)> = names.windows(2).map(|w| (w[0].clone(), w[1].clone())).collect();
        let long = SimpleGraph::from_edges(edges).unwrap();
        assert!(matches!(build_udn(&long, 2), Err(Error::Guard(_))));
        assert!(build_udn_with(&long, 2, Guard::Override).is_ok());
    }

    #[test]
    fn labels_list_members() {
        let u = build_udn(&star3(), 2).unwrap();
        assert_eq!(u.label(0), "{c, x}");
    }
}
