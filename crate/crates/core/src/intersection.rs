//! The labelled reduced intersection complex of a large normal bunch.
//!
//! Vertices are twigs; a set of twigs spans a simplex exactly when the twigs
//! lie on one stem path. Each simplex records its minimal covering path and
//! the grape counts of the two components left after removing the path's
//! interior.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grape::{GrapeBunch, Twig};

/// Longest covering path accepted by [`build_ri`].
pub const MAX_PATH_LENGTH: usize = 24;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum QiType {
    #[serde(rename = "ZxZ")]
    ZxZ,
    #[serde(rename = "ZxF2")]
    ZxF2,
    #[serde(rename = "F2xF2")]
    F2xF2,
}

impl QiType {
    pub fn from_ranks(m1: u64, m2: u64) -> QiType {
        match (m1 == 1) as u8 + (m2 == 1) as u8 {
            2 => QiType::ZxZ,
            1 => QiType::ZxF2,
            _ => QiType::F2xF2,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RiSimplex {
    /// Twig indices, sorted.
    pub vertices: Vec<usize>,
    /// Twig indices in canonical order along `path`.
    pub order: Vec<usize>,
    /// Minimal covering stem path, oriented to match `order`.
    pub path: Vec<String>,
    /// Grape counts of the components at the start and the end of `path`.
    pub ranks: (u64, u64),
    /// Vertex sets of those two components.
    pub sides: [Vec<String>; 2],
}

impl RiSimplex {
    pub fn dim(&self) -> usize {
        self.vertices.len() - 1
    }

    pub fn path_length(&self) -> usize {
        self.path.len() - 1
    }

    pub fn qi_type(&self) -> QiType {
        QiType::from_ranks(self.ranks.0, self.ranks.1)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReducedIntersectionComplex {
    pub twigs: Vec<Twig>,
    /// Sorted by dimension, then by vertex set.
    pub simplices: Vec<RiSimplex>,
    #[serde(skip)]
    index: BTreeMap<Vec<usize>, usize>,
}

impl ReducedIntersectionComplex {
    fn from_simplices(twigs: Vec<Twig>, mut simplices: Vec<RiSimplex>) -> Self {
        simplices.sort_by(|a, b| (a.dim(), &a.vertices).cmp(&(b.dim(), &b.vertices)));
        let index = simplices.iter().enumerate().map(|(i, s)| (s.vertices.clone(), i)).collect();
        ReducedIntersectionComplex { twigs, simplices, index }
    }

    pub fn simplex(&self, vertices: &[usize]) -> Option<&RiSimplex> {
        let mut key = vertices.to_vec();
        key.sort_unstable();
        self.index.get(&key).map(|&i| &self.simplices[i])
    }

    pub fn contains(&self, vertices: &[usize]) -> bool {
        self.simplex(vertices).is_some()
    }

    pub fn dimension(&self) -> Option<usize> {
        self.simplices.iter().map(RiSimplex::dim).max()
    }

    /// Number of simplices of each dimension.
    pub fn f_vector(&self) -> Vec<usize> {
        let mut f = Vec::new();
        for s in &self.simplices {
            if f.len() <= s.dim() {
                f.resize(s.dim() + 1, 0);
            }
            f[s.dim()] += 1;
        }
        f
    }

    pub fn twig_index(&self, t: &Twig) -> Option<usize> {
        let mut rev = t.clone();
        rev.path.reverse();
        self.twigs.iter().position(|x| x == t || *x == rev)
    }

    /// True iff every nonempty vertex subset is a simplex.
    pub fn is_full_simplex(&self) -> bool {
        let n = self.twigs.len();
        n < usize::BITS as usize && self.simplices.len() == (1usize << n) - 1
    }
}

fn require_large_normal(g: &GrapeBunch) -> Result<()> {
    let c = g.classify();
    if !(c.is_large() && c.normal) {
        return Err(Error::Precondition("intersection complex requires a large and normal bunch".into()));
    }
    Ok(())
}

struct Labeller<'a> {
    g: &'a GrapeBunch,
    twig_paths: Vec<Vec<usize>>,
}

impl<'a> Labeller<'a> {
    fn new(g: &'a GrapeBunch) -> Self {
        Labeller { g, twig_paths: g.twig_paths() }
    }

    fn covering_path(&self, twigs: &[usize]) -> Option<Vec<usize>> {
        covering_path(self.g, &self.twig_paths, twigs)
    }

    fn simplex(&self, mut vertices: Vec<usize>, path: Vec<usize>) -> RiSimplex {
        vertices.sort_unstable();
        let position = |t: usize| -> usize {
            let first = self.twig_paths[t][0];
            let last = *self.twig_paths[t].last().unwrap();
            let a = path.iter().position(|&v| v == first).unwrap();
            let b = path.iter().position(|&v| v == last).unwrap();
            a.min(b)
        };
        let mut forward = vertices.clone();
        forward.sort_by_key(|&t| position(t));
        let (side_a, side_b) = self.g.substem_component_sets(&path);
        let (ma, mb) = (sum_loops(self.g, &side_a), sum_loops(self.g, &side_b));
        let backward: Vec<usize> = forward.iter().rev().copied().collect();
        let stem = self.g.stem();
        let keep_forward = match forward[0].cmp(&backward[0]) {
            std::cmp::Ordering::Less => true,
            std::cmp::Ordering::Greater => false,
            // a single twig: smaller rank first, then smaller end id
            std::cmp::Ordering::Equal => (ma, stem.name(path[0])) <= (mb, stem.name(*path.last().unwrap())),
        };
        let names = |set: &[usize]| -> Vec<String> { set.iter().map(|&v| stem.name(v).to_string()).collect() };
        let mut path_names = names(&path);
        if keep_forward {
            RiSimplex { vertices, order: forward, path: path_names, ranks: (ma, mb), sides: [names(&side_a), names(&side_b)] }
        } else {
            path_names.reverse();
            RiSimplex { vertices, order: backward, path: path_names, ranks: (mb, ma), sides: [names(&side_b), names(&side_a)] }
        }
    }
}

fn twig_edges(twig_paths: &[Vec<usize>], t: usize) -> Vec<(usize, usize)> {
    twig_paths[t].windows(2).map(|w| (w[0].min(w[1]), w[0].max(w[1]))).collect()
}

/// Minimal covering path of a twig set, or `None` when not colinear.
pub(crate) fn covering_path(g: &GrapeBunch, twig_paths: &[Vec<usize>], twigs: &[usize]) -> Option<Vec<usize>> {
    let stem = g.stem();
    let mut ends: Vec<usize> = twigs.iter().flat_map(|&t| [twig_paths[t][0], *twig_paths[t].last().unwrap()]).collect();
    ends.sort_unstable();
    ends.dedup();
    let mut best = (0, ends[0], ends[0]);
    for &u in &ends {
        let dist = stem.distances_from(u);
        for &w in &ends {
            if (dist[w], std::cmp::Reverse(u), std::cmp::Reverse(w)) > (best.0, std::cmp::Reverse(best.1), std::cmp::Reverse(best.2)) {
                best = (dist[w], u, w);
            }
        }
    }
    let path = stem.path_between(best.1, best.2);
    let on_path: Vec<(usize, usize)> = path.windows(2).map(|w| (w[0].min(w[1]), w[0].max(w[1]))).collect();
    let all_on = twigs.iter().all(|&t| twig_edges(twig_paths, t).iter().all(|e| on_path.contains(e)));
    all_on.then_some(path)
}

fn sum_loops(g: &GrapeBunch, set: &[usize]) -> u64 {
    set.iter().map(|&v| g.loops_at(v) as u64).sum()
}

pub fn build_ri(g: &GrapeBunch) -> Result<ReducedIntersectionComplex> {
    require_large_normal(g)?;
    if g.stem().diameter() > MAX_PATH_LENGTH {
        return Err(Error::Guard(format!("stem paths longer than {MAX_PATH_LENGTH} are rejected")));
    }
    let lab = Labeller::new(g);
    let twigs = g.twigs();
    let n = twigs.len();
    let mut simplices = Vec::new();
    for e in 0..n {
        for f in e..n {
            let Some(path) = lab.covering_path(&[e, f]) else { continue };
            // twigs strictly between e and f along the path
            let on_path: Vec<usize> = (0..n)
                .filter(|&t| t != e && t != f)
                .filter(|&t| lab.covering_path(&[e, f, t]).is_some_and(|p| p.len() == path.len()))
                .collect();
            for mask in 0u64..(1u64 << on_path.len()) {
                let mut set = vec![e];
                if f != e {
                    set.push(f);
                }
                set.extend(on_path.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, &t)| t));
                simplices.push(lab.simplex(set, path.clone()));
            }
        }
    }
    Ok(ReducedIntersectionComplex::from_simplices(twigs, simplices))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SimplexLabel {
    pub ranks: (u64, u64),
    pub qi_type: QiType,
}

pub fn simplex_label(g: &GrapeBunch, twig_set: &[Twig]) -> Result<SimplexLabel> {
    require_large_normal(g)?;
    if twig_set.is_empty() {
        return Err(Error::InvalidArgument("empty twig set".into()));
    }
    let all = g.twig_paths();
    let mut ids = Vec::new();
    for t in twig_set {
        let mut idx = g.twig_indices(t)?;
        if idx[0] > *idx.last().unwrap() {
            idx.reverse();
        }
        ids.push(all.binary_search(&idx).unwrap());
    }
    let lab = Labeller::new(g);
    let path = lab.covering_path(&ids).ok_or_else(|| Error::InvalidArgument("twigs are not colinear".into()))?;
    let s = lab.simplex(ids, path);
    Ok(SimplexLabel { ranks: s.ranks, qi_type: s.qi_type() })
}

pub fn canonical_order(ri: &ReducedIntersectionComplex, simplex: &[usize]) -> Result<Vec<usize>> {
    ri.simplex(simplex)
        .map(|s| s.order.clone())
        .ok_or_else(|| Error::InvalidArgument(format!("simplex {simplex:?} is not in the complex")))
}

pub fn ri_truncate(ri: &ReducedIntersectionComplex, k: usize) -> Result<ReducedIntersectionComplex> {
    if k < 2 {
        return Err(Error::InvalidArgument("truncation level must be at least 2".into()));
    }
    let kept = ri.simplices.iter().filter(|s| s.path_length() <= k).cloned().collect();
    Ok(ReducedIntersectionComplex::from_simplices(ri.twigs.clone(), kept))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TrichotomyVerdict {
    PathStemAndSimplex,
    NotSimplyConnected,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrichotomyReport {
    pub verdict: TrichotomyVerdict,
    pub full_simplex: bool,
    /// Twigs at a vertex of maximal stem valence; pairwise adjacent in the
    /// level-2 truncation.
    pub clique: Option<Vec<usize>>,
    pub clique_vertex: Option<String>,
}

impl TrichotomyReport {
    pub fn is_consistent(&self) -> bool {
        (self.verdict == TrichotomyVerdict::PathStemAndSimplex) == self.full_simplex
    }
}

pub fn trichotomy(g: &GrapeBunch) -> Result<TrichotomyReport> {
    let ri = build_ri(g)?;
    let full_simplex = ri.is_full_simplex();
    let stem = g.stem();
    if stem.is_path() {
        return Ok(TrichotomyReport { verdict: TrichotomyVerdict::PathStemAndSimplex, full_simplex, clique: None, clique_vertex: None });
    }
    let v = (0..stem.len()).max_by_key(|&v| (stem.degree(v), std::cmp::Reverse(v))).unwrap();
    let twig_paths = g.twig_paths();
    let clique: Vec<usize> =
        (0..twig_paths.len()).filter(|&t| twig_paths[t][0] == v || *twig_paths[t].last().unwrap() == v).collect();
    let low = ri_truncate(&ri, 2)?;
    for (i, &a) in clique.iter().enumerate() {
        for &b in &clique[i + 1..] {
            if !low.contains(&[a, b]) {
                return Err(Error::Precondition(format!("twigs {a} and {b} at {} are not adjacent", stem.name(v))));
            }
        }
    }
    Ok(TrichotomyReport {
        verdict: TrichotomyVerdict::NotSimplyConnected,
        full_simplex,
        clique: Some(clique),
        clique_vertex: Some(stem.name(v).to_string()),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rich_path(n: usize) -> GrapeBunch {
        let names: Vec<String> = (0..=n).map(|i| format!("v{i}")).collect();
        let edges: Vec<(&str, &str)> = names.windows(2).map(|w| (w[0].as_str(), w[1].as_str())).collect();
        let loops: Vec<(&str, u32)> = names.iter().map(|n| (n.as_str(), 1)).collect();
        GrapeBunch::from_edges(&edges, &loops).unwrap()
    }

    fn rich_star3() -> GrapeBunch {
        GrapeBunch::from_edges(&[("c", "x"), ("c", "y"), ("c", "z")], &[("c", 1), ("x", 1), ("y", 1), ("z", 1)]).unwrap()
    }

    #[test]
    fn star_triangle() {
        let ri = build_ri(&rich_star3()).unwrap();
        assert_eq!(ri.f_vector(), vec![3, 3]);
        for s in ri.simplices.iter().filter(|s| s.dim() == 0) {
            assert_eq!(s.ranks, (1, 3));
        }
        for s in ri.simplices.iter().filter(|s| s.dim() == 1) {
            assert_eq!(s.ranks, (1, 1));
        }
    }

    #[test]
    fn path_full_simplex() {
        let ri = build_ri(&rich_path(4)).unwrap();
        assert!(ri.is_full_simplex());
        assert_eq!(ri.f_vector(), vec![4, 6, 4, 1]);
        let edge = build_ri(&rich_path(1)).unwrap();
        assert_eq!(edge.f_vector(), vec![1]);
    }

    #[test]
    fn labels() {
        let edge = rich_path(1);
        let l = simplex_label(&edge, &[Twig::new(["v0", "v1"])]).unwrap();
        assert_eq!((l.ranks, l.qi_type), ((1, 1), QiType::ZxZ));
        let p = rich_path(4);
        let l = simplex_label(&p, &[Twig::new(["v0", "v1"])]).unwrap();
        assert_eq!((l.ranks, l.qi_type), ((1, 4), QiType::ZxF2));
        let l = simplex_label(&p, &[Twig::new(["v1", "v2"])]).unwrap();
        assert_eq!((l.ranks, l.qi_type), ((2, 3), QiType::F2xF2));
        let star = rich_star3();
        let bad = [Twig::new(["c", "x"]), Twig::new(["c", "y"]), Twig::new(["c", "z"])];
        assert!(simplex_label(&star, &bad).is_err());
    }

    #[test]
    fn orders() {
        let ri = build_ri(&rich_path(4)).unwrap();
        assert_eq!(canonical_order(&ri, &[2]).unwrap(), vec![2]);
        assert_eq!(canonical_order(&ri, &[3, 0, 2, 1]).unwrap(), vec![0, 1, 2, 3]);
        assert_eq!(canonical_order(&ri, &[1, 2]).unwrap(), vec![1, 2]);
        let star = build_ri(&rich_star3()).unwrap();
        assert!(canonical_order(&star, &[0, 1, 2]).is_err());
    }

    #[test]
    fn truncations() {
        let ri = build_ri(&rich_path(4)).unwrap();
        let low = ri_truncate(&ri, 2).unwrap();
        assert_eq!(low.f_vector(), vec![4, 3]);
        assert_eq!(ri_truncate(&ri, 4).unwrap(), ri);
        let star = build_ri(&rich_star3()).unwrap();
        assert_eq!(ri_truncate(&star, 2).unwrap(), star);
        assert!(ri_truncate(&ri, 1).is_err());
    }

    #[test]
    fn trichotomy_cases() {
        let r = trichotomy(&rich_path(3)).unwrap();
        assert_eq!(r.verdict, TrichotomyVerdict::PathStemAndSimplex);
        assert!(r.is_consistent());
        let r = trichotomy(&rich_star3()).unwrap();
        assert_eq!(r.verdict, TrichotomyVerdict::NotSimplyConnected);
        assert_eq!(r.clique.as_ref().unwrap().len(), 3);
        assert!(r.is_consistent());
        let four = GrapeBunch::from_edges(
            &[("c", "w"), ("c", "x"), ("c", "y"), ("c", "z")],
            &[("w", 1), ("x", 1), ("y", 1), ("z", 1)],
        )
        .unwrap();
        assert_eq!(trichotomy(&four).unwrap().clique.unwrap().len(), 4);
    }
}
