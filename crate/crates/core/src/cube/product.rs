use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grape::{GrapeBunch, Twig};
use crate::intersection::covering_path;

use super::complex::CubeComplex;
use super::config::{build_udn, realize_with_owners, Guard};
use super::graph::SimpleGraph;

/// Largest base graph, in edges, for product enumeration.
pub const MAX_PRODUCT_EDGES: usize = 16;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProductPair {
    pub left: SimpleGraph,
    pub right: SimpleGraph,
}

/// A subgraph of a fixed base, as an edge bitmask.
type EdgeMask = u32;

fn mask_vertices(base: &SimpleGraph, mask: EdgeMask) -> u64 {
    let mut v = 0u64;
    for (e, &(a, b)) in base.edges().iter().enumerate() {
        if mask >> e & 1 == 1 {
            v |= 1 << a | 1 << b;
        }
    }
    v
}

fn is_connected_leafless(base: &SimpleGraph, mask: EdgeMask) -> bool {
    let edges: Vec<(usize, usize)> = (0..base.edge_count()).filter(|e| mask >> e & 1 == 1).map(|e| base.edges()[e]).collect();
    let mut deg = vec![0usize; base.vertex_count()];
    for &(a, b) in &edges {
        deg[a] += 1;
        deg[b] += 1;
    }
    if deg.contains(&1) {
        return false;
    }
    let start = edges[0].0;
    let mut seen = 1u64 << start;
    loop {
        let before = seen;
        for &(a, b) in &edges {
            if seen >> a & 1 == 1 || seen >> b & 1 == 1 {
                seen |= 1 << a | 1 << b;
            }
        }
        if seen == before {
            break;
        }
    }
    seen == mask_vertices(base, mask)
}

fn check_size(base: &SimpleGraph, guard: Guard) -> Result<()> {
    if guard == Guard::Enforce && base.edge_count() > MAX_PRODUCT_EDGES {
        return Err(Error::Guard(format!(
            "product enumeration accepts at most {MAX_PRODUCT_EDGES} base edges, got {}",
            base.edge_count()
        )));
    }
    if base.edge_count() > 32 || base.vertex_count() > 64 {
        return Err(Error::Guard("base graph too large for product enumeration".into()));
    }
    Ok(())
}

/// Maximal pairs as edge masks, each pair ordered, the list sorted.
pub(crate) fn maximal_product_masks(base: &SimpleGraph, guard: Guard) -> Result<Vec<(EdgeMask, EdgeMask)>> {
    check_size(base, guard)?;
    let ne = base.edge_count();
    let leafless: Vec<(EdgeMask, u64)> = (1..(1u64 << ne))
        .map(|m| m as EdgeMask)
        .filter(|&m| is_connected_leafless(base, m))
        .map(|m| (m, mask_vertices(base, m)))
        .collect();
    let mut pairs = Vec::new();
    for (i, &(a, va)) in leafless.iter().enumerate() {
        for &(b, vb) in &leafless[i + 1..] {
            if va & vb == 0 {
                pairs.push((a.min(b), a.max(b)));
            }
        }
    }
    let sub = |x: EdgeMask, y: EdgeMask| x & !y == 0;
    let below = |p: (EdgeMask, EdgeMask), q: (EdgeMask, EdgeMask)| {
        p != q && ((sub(p.0, q.0) && sub(p.1, q.1)) || (sub(p.0, q.1) && sub(p.1, q.0)))
    };
    let mut maximal: Vec<(EdgeMask, EdgeMask)> =
        pairs.iter().copied().filter(|&p| !pairs.iter().any(|&q| below(p, q))).collect();
    maximal.sort_unstable();
    Ok(maximal)
}

fn mask_graph(base: &SimpleGraph, mask: EdgeMask) -> SimpleGraph {
    let ids: Vec<usize> = (0..base.edge_count()).filter(|e| mask >> e & 1 == 1).collect();
    base.edge_subgraph(&ids)
}

/// Inclusion-maximal pairs of disjoint connected leafless subgraphs.
pub fn maximal_products(base: &SimpleGraph) -> Result<Vec<ProductPair>> {
    maximal_products_with(base, Guard::Enforce)
}

pub fn maximal_products_with(base: &SimpleGraph, guard: Guard) -> Result<Vec<ProductPair>> {
    Ok(maximal_product_masks(base, guard)?
        .into_iter()
        .map(|(a, b)| ProductPair { left: mask_graph(base, a), right: mask_graph(base, b) })
        .collect())
}

/// Whether base cell `c` (vertices first, then edges) lies in the subgraph.
fn cell_in(base: &SimpleGraph, c: usize, mask: EdgeMask, verts: u64) -> bool {
    let nv = base.vertex_count();
    if c < nv {
        verts >> c & 1 == 1
    } else {
        mask >> (c - nv) & 1 == 1
    }
}

fn in_product(base: &SimpleGraph, members: &[usize], pair: (EdgeMask, EdgeMask)) -> bool {
    let (va, vb) = (mask_vertices(base, pair.0), mask_vertices(base, pair.1));
    let (x, y) = (members[0], members[1]);
    (cell_in(base, x, pair.0, va) && cell_in(base, y, pair.1, vb))
        || (cell_in(base, x, pair.1, vb) && cell_in(base, y, pair.0, va))
}

/// The union of the maximal product subcomplexes inside `UD_2`.
pub fn up2(base: &SimpleGraph) -> Result<CubeComplex> {
    let ud = build_udn(base, 2)?;
    up2_in(base, &ud)
}

fn up2_in(base: &SimpleGraph, ud: &CubeComplex) -> Result<CubeComplex> {
    let pairs = maximal_product_masks(base, Guard::Enforce)?;
    if pairs.is_empty() {
        return Ok(CubeComplex::empty());
    }
    Ok(ud.restrict(|d, k| {
        let m = ud.members(d, k).expect("configuration cells");
        pairs.iter().any(|&p| in_product(base, m, p))
    }))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConvexityReport {
    pub ok: bool,
    /// Vertices of `UP_2` where the link is not a full subcomplex.
    pub violations: Vec<String>,
}

/// Every link of `UP_2` is a full subcomplex of the corresponding `UD_2` link.
pub fn local_convexity_up2(base: &SimpleGraph) -> Result<ConvexityReport> {
    let ud = build_udn(base, 2)?;
    let up = up2_in(base, &ud)?;
    let in_up: BTreeSet<Vec<usize>> = (0..=up.dimension())
        .flat_map(|d| (0..up.cells(d).len()).map(move |k| (d, k)))
        .filter_map(|(d, k)| up.members(d, k).map(<[usize]>::to_vec))
        .collect();
    let mut bad = BTreeSet::new();
    // any UD_2 square at an UP_2 vertex whose corner edges are in UP_2 must be in UP_2
    for sq in ud.cells(2).iter().enumerate() {
        let (k, c) = sq;
        if in_up.contains(ud.members(2, k).unwrap()) {
            continue;
        }
        for m in 0..4 {
            let v = c.vertices[m];
            let corner = [c.edge(0, m), c.edge(1, m)];
            let vm = ud.members(0, v).unwrap();
            if in_up.contains(vm) && corner.iter().all(|&e| in_up.contains(ud.members(1, e).unwrap())) {
                bad.insert(ud.label(v).to_string());
            }
        }
    }
    Ok(ConvexityReport { ok: bad.is_empty(), violations: bad.into_iter().collect() })
}

fn require_large_normal(g: &GrapeBunch) -> Result<()> {
    let c = g.classify();
    if !(c.is_large() && c.normal) {
        return Err(Error::Precondition("requires a large and normal bunch".into()));
    }
    Ok(())
}

/// Realized subgraph over a set of stem vertices, as an edge mask.
fn owned_mask(base: &SimpleGraph, owners: &[usize], stem_set: &[usize]) -> EdgeMask {
    let mut mask = 0;
    for (e, &(a, b)) in base.edges().iter().enumerate() {
        if stem_set.contains(&owners[a]) && stem_set.contains(&owners[b]) {
            mask |= 1 << e;
        }
    }
    mask
}

struct Realized {
    base: SimpleGraph,
    owners: Vec<usize>,
    twig_paths: Vec<Vec<usize>>,
}

impl Realized {
    fn new(g: &GrapeBunch) -> Result<Realized> {
        require_large_normal(g)?;
        let (base, owners) = realize_with_owners(g);
        check_size(&base, Guard::Enforce)?;
        Ok(Realized { base, owners, twig_paths: g.twig_paths() })
    }

    fn predicted(&self, g: &GrapeBunch, path: &[usize]) -> (EdgeMask, EdgeMask) {
        let (a, b) = g.substem_component_sets(path);
        let (ma, mb) = (owned_mask(&self.base, &self.owners, &a), owned_mask(&self.base, &self.owners, &b));
        (ma.min(mb), ma.max(mb))
    }
}

/// Brute-force maximal pairs match the twigs one to one, each pair being the
/// two components left by removing the twig's interior.
pub fn twig_correspondence_check(g: &GrapeBunch) -> Result<bool> {
    let r = Realized::new(g)?;
    let found: BTreeSet<(EdgeMask, EdgeMask)> = maximal_product_masks(&r.base, Guard::Enforce)?.into_iter().collect();
    let predicted: BTreeSet<(EdgeMask, EdgeMask)> = r.twig_paths.iter().map(|p| r.predicted(g, p)).collect();
    Ok(predicted.len() == r.twig_paths.len() && predicted == found)
}

fn subgraph_cells(base: &SimpleGraph, mask: EdgeMask) -> Vec<usize> {
    let nv = base.vertex_count();
    let verts = mask_vertices(base, mask);
    (0..nv + base.edge_count()).filter(|&c| cell_in(base, c, mask, verts)).collect()
}

/// Cells of the product subcomplex of a pair, as sorted member pairs.
fn product_cells(base: &SimpleGraph, pair: (EdgeMask, EdgeMask)) -> BTreeSet<(usize, usize)> {
    let (xs, ys) = (subgraph_cells(base, pair.0), subgraph_cells(base, pair.1));
    let mut out = BTreeSet::new();
    for &x in &xs {
        for &y in &ys {
            out.insert((x.min(y), x.max(y)));
        }
    }
    out
}

/// The maximal product subcomplexes of the given twigs meet exactly when the
/// twigs are colinear, and then in the product over the covering path.
pub fn intersection_lemma_check(g: &GrapeBunch, twigs: &[Twig]) -> Result<bool> {
    if twigs.is_empty() {
        return Err(Error::InvalidArgument("empty twig set".into()));
    }
    let r = Realized::new(g)?;
    let found = maximal_product_masks(&r.base, Guard::Enforce)?;
    let mut ids = Vec::new();
    let mut meet: Option<BTreeSet<(usize, usize)>> = None;
    for t in twigs {
        let mut idx = g.twig_indices(t)?;
        if idx[0] > *idx.last().unwrap() {
            idx.reverse();
        }
        let id = r.twig_paths.binary_search(&idx).expect("twig indices are normalized");
        ids.push(id);
        let pair = r.predicted(g, &r.twig_paths[id]);
        if !found.contains(&pair) {
            return Ok(false);
        }
        let cells = product_cells(&r.base, pair);
        meet = Some(match meet {
            None => cells,
            Some(acc) => acc.intersection(&cells).copied().collect(),
        });
    }
    let meet = meet.unwrap();
    Ok(match covering_path(g, &r.twig_paths, &ids) {
        None => meet.is_empty(),
        Some(path) => meet == product_cells(&r.base, r.predicted(g, &path)),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cube::config::realize_grape;

    fn edge_bunch() -> GrapeBunch {
        GrapeBunch::from_edges(&[("u", "v")], &[("u", 1), ("v", 1)]).unwrap()
    }

    fn rich_star3() -> GrapeBunch {
        GrapeBunch::from_edges(&[("c", "x"), ("c", "y"), ("c", "z")], &[("c", 1), ("x", 1), ("y", 1), ("z", 1)]).unwrap()
    }

    fn rich_path3() -> GrapeBunch {
        GrapeBunch::from_edges(&[("a", "b"), ("b", "c"), ("c", "d")], &[("a", 1), ("b", 1), ("c", 1), ("d", 1)]).unwrap()
    }

    #[test]
    fn products() {
        let tree = SimpleGraph::from_edges([("c", "x"), ("c", "y"), ("c", "z")]).unwrap();
        assert!(maximal_products(&tree).unwrap().is_empty());
        let pairs = maximal_products(&realize_grape(&edge_bunch())).unwrap();
        assert_eq!(pairs.len(), 1);
        assert_eq!(pairs[0].left.edge_count(), 3);
        assert_eq!(pairs[0].right.edge_count(), 3);
        assert_eq!(maximal_products(&realize_grape(&rich_star3())).unwrap().len(), 3);
    }

    #[test]
    fn up2_cases() {
        let small = GrapeBunch::from_edges(&[("c", "x"), ("c", "y"), ("c", "z")], &[("c", 2)]).unwrap();
        assert!(up2(&realize_grape(&small)).unwrap().is_empty());
        let u = up2(&realize_grape(&edge_bunch())).unwrap();
        assert_eq!(u.f_vector(), vec![9, 18, 9]);
        assert_eq!(u.betti(), (1, 2));
        let s = up2(&realize_grape(&rich_star3())).unwrap();
        assert_eq!(s.betti().0, 1);
        assert!(s.links_ok().ok);
        assert!(s.hyperplanes().is_clean());
    }

    #[test]
    fn convexity() {
        assert!(local_convexity_up2(&realize_grape(&edge_bunch())).unwrap().ok);
        assert!(local_convexity_up2(&realize_grape(&rich_star3())).unwrap().ok);
    }

    #[test]
    fn correspondence() {
        assert!(twig_correspondence_check(&edge_bunch()).unwrap());
        assert!(twig_correspondence_check(&rich_star3()).unwrap());
        assert!(twig_correspondence_check(&rich_path3()).unwrap());
    }

    #[test]
    fn intersections() {
        let p = rich_path3();
        assert!(intersection_lemma_check(&p, &[Twig::new(["a", "b"]), Twig::new(["b", "c"])]).unwrap());
        assert!(intersection_lemma_check(&p, &[Twig::new(["c", "d"])]).unwrap());
        let s = rich_star3();
        let three = [Twig::new(["c", "x"]), Twig::new(["c", "y"]), Twig::new(["c", "z"])];
        assert!(intersection_lemma_check(&s, &three).unwrap());
    }
}
