//! Bunches of grapes: a finite tree (the stem) together with a count of
//! 3-cycles attached at each stem vertex.
//!
//! Vertex ids are opaque strings. Internally every structure stores the ids
//! sorted, so index order and id order agree and every traversal below is
//! deterministic.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A finite tree with string vertex ids.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Stem {
    names: Vec<String>,
    adj: Vec<Vec<usize>>,
}

/// The center of a tree: a single vertex when the diameter is even, an edge
/// when it is odd.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Center {
    Vertex(usize),
    Edge(usize, usize),
}

impl Stem {
    /// Builds a stem from an explicit vertex set and edge list.
    ///
    /// Endpoints of edges are added to the vertex set automatically.
    pub fn new<V, E, S>(vertices: V, edges: E) -> Result<Stem>
    where
        V: IntoIterator<Item = S>,
        E: IntoIterator<Item = (S, S)>,
        S: Into<String>,
    {
        let mut names: BTreeSet<String> = vertices.into_iter().map(Into::into).collect();
        let edges: Vec<(String, String)> =
            edges.into_iter().map(|(a, b)| (a.into(), b.into())).collect();
        for (a, b) in &edges {
            names.insert(a.clone());
            names.insert(b.clone());
        }
        if names.is_empty() {
            return Err(Error::EmptyStem);
        }
        let names: Vec<String> = names.into_iter().collect();
        let mut adj = vec![Vec::new(); names.len()];
        let mut seen = BTreeSet::new();
        let mut dsu = Dsu::new(names.len());
        for (a, b) in &edges {
            if a == b {
                return Err(Error::SelfLoop(a.clone()));
            }
            let i = names.binary_search(a).unwrap();
            let j = names.binary_search(b).unwrap();
            if !seen.insert((i.min(j), i.max(j))) {
                return Err(Error::DuplicateEdge(a.clone(), b.clone()));
            }
            if !dsu.union(i, j) {
                return Err(Error::Cycle(a.clone(), b.clone()));
            }
            adj[i].push(j);
            adj[j].push(i);
        }
        if edges.len() + 1 != names.len() {
            return Err(Error::Disconnected);
        }
        for list in &mut adj {
            list.sort_unstable();
        }
        Ok(Stem { names, adj })
    }

    pub fn from_edges<S: Into<String>>(edges: impl IntoIterator<Item = (S, S)>) -> Result<Stem> {
        Stem::new(std::iter::empty::<String>(), edges.into_iter().map(|(a, b)| (a.into(), b.into())))
    }

    pub fn single(name: impl Into<String>) -> Stem {
        Stem { names: vec![name.into()], adj: vec![Vec::new()] }
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn name(&self, i: usize) -> &str {
        &self.names[i]
    }

    pub fn index(&self, name: &str) -> Option<usize> {
        self.names.binary_search_by(|n| n.as_str().cmp(name)).ok()
    }

    pub(crate) fn require(&self, name: &str) -> Result<usize> {
        self.index(name).ok_or_else(|| Error::UnknownVertex(name.to_string()))
    }

    pub fn neighbors(&self, i: usize) -> &[usize] {
        &self.adj[i]
    }

    pub fn degree(&self, i: usize) -> usize {
        self.adj[i].len()
    }

    pub fn edge_count(&self) -> usize {
        self.names.len() - 1
    }

    /// Edges as index pairs `(i, j)` with `i < j`, sorted.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::with_capacity(self.edge_count());
        for (i, list) in self.adj.iter().enumerate() {
            out.extend(list.iter().filter(|&&j| j > i).map(|&j| (i, j)));
        }
        out
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        self.adj[i].binary_search(&j).is_ok()
    }

    pub fn leaves(&self) -> Vec<usize> {
        (0..self.len()).filter(|&i| self.degree(i) == 1).collect()
    }

    pub fn is_path(&self) -> bool {
        self.adj.iter().all(|l| l.len() <= 2)
    }

    pub fn max_degree(&self) -> usize {
        self.adj.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn distances_from(&self, root: usize) -> Vec<usize> {
        let mut dist = vec![usize::MAX; self.len()];
        dist[root] = 0;
        let mut queue = VecDeque::from([root]);
        while let Some(u) = queue.pop_front() {
            for &w in &self.adj[u] {
                if dist[w] == usize::MAX {
                    dist[w] = dist[u] + 1;
                    queue.push_back(w);
                }
            }
        }
        dist
    }

    /// The unique path from `a` to `b` as a vertex index sequence.
    pub fn path_between(&self, a: usize, b: usize) -> Vec<usize> {
        let mut parent = vec![usize::MAX; self.len()];
        parent[a] = a;
        let mut queue = VecDeque::from([a]);
        while let Some(u) = queue.pop_front() {
            if u == b {
                break;
            }
            for &w in &self.adj[u] {
                if parent[w] == usize::MAX {
                    parent[w] = u;
                    queue.push_back(w);
                }
            }
        }
        let mut path = vec![b];
        let mut cur = b;
        while cur != a {
            cur = parent[cur];
            path.push(cur);
        }
        path.reverse();
        path
    }

    pub fn diameter(&self) -> usize {
        let d0 = self.distances_from(0);
        let far = argmax(&d0);
        *self.distances_from(far).iter().max().unwrap()
    }

    /// Center by iterated deletion of leaves.
    pub fn center(&self) -> Center {
        let n = self.len();
        if n == 1 {
            return Center::Vertex(0);
        }
        let mut deg: Vec<usize> = self.adj.iter().map(Vec::len).collect();
        let mut removed = vec![false; n];
        let mut layer: Vec<usize> = (0..n).filter(|&i| deg[i] <= 1).collect();
        let mut remaining = n;
        while remaining > 2 {
            let mut next = Vec::new();
            for &u in &layer {
                removed[u] = true;
                remaining -= 1;
                for &w in &self.adj[u] {
                    if !removed[w] {
                        deg[w] -= 1;
                        if deg[w] == 1 {
                            next.push(w);
                        }
                    }
                }
            }
            layer = next;
        }
        let rest: Vec<usize> = (0..n).filter(|&i| !removed[i]).collect();
        match rest.as_slice() {
            [v] => Center::Vertex(*v),
            [a, b] => Center::Edge(*a, *b),
            _ => unreachable!("tree center has one or two vertices"),
        }
    }

    /// Vertices of the component of `stem - removed` containing `start`.
    pub(crate) fn component(&self, start: usize, removed: &[bool]) -> Vec<usize> {
        let mut seen = vec![false; self.len()];
        seen[start] = true;
        let mut out = vec![start];
        let mut stack = vec![start];
        while let Some(u) = stack.pop() {
            for &w in &self.adj[u] {
                if !removed[w] && !seen[w] {
                    seen[w] = true;
                    out.push(w);
                    stack.push(w);
                }
            }
        }
        out.sort_unstable();
        out
    }

    /// Induced substem on a connected vertex subset.
    pub(crate) fn induced(&self, keep: &[usize]) -> Stem {
        let mut keep = keep.to_vec();
        keep.sort_unstable();
        keep.dedup();
        let mut map = vec![usize::MAX; self.len()];
        for (new, &old) in keep.iter().enumerate() {
            map[old] = new;
        }
        let adj = keep
            .iter()
            .map(|&old| {
                let mut l: Vec<usize> =
                    self.adj[old].iter().filter(|&&w| map[w] != usize::MAX).map(|&w| map[w]).collect();
                l.sort_unstable();
                l
            })
            .collect();
        let names = keep.iter().map(|&i| self.names[i].clone()).collect();
        Stem { names, adj }
    }

    pub(crate) fn check_path(&self, path: &[String]) -> Result<Vec<usize>> {
        let describe = || path.join(" ");
        if path.len() < 2 {
            return Err(Error::NotAPath(describe()));
        }
        let idx: Vec<usize> = path
            .iter()
            .map(|n| self.index(n).ok_or_else(|| Error::NotAPath(describe())))
            .collect::<Result<_>>()?;
        let distinct: BTreeSet<usize> = idx.iter().copied().collect();
        if distinct.len() != idx.len() || idx.windows(2).any(|w| !self.has_edge(w[0], w[1])) {
            return Err(Error::NotAPath(describe()));
        }
        Ok(idx)
    }
}

fn argmax(values: &[usize]) -> usize {
    let mut best = 0;
    for (i, &v) in values.iter().enumerate() {
        if v > values[best] {
            best = i;
        }
    }
    best
}

struct Dsu(Vec<usize>);

impl Dsu {
    fn new(n: usize) -> Self {
        Dsu((0..n).collect())
    }
    fn find(&mut self, x: usize) -> usize {
        let mut r = x;
        while self.0[r] != r {
            r = self.0[r];
        }
        let mut c = x;
        while self.0[c] != r {
            let next = self.0[c];
            self.0[c] = r;
            c = next;
        }
        r
    }
    fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        self.0[ra] = rb;
        true
    }
}

/// A stem with a grape count at every vertex.
///
/// Bunches built through [`GrapeBunch::new`] are never path graphs. The
/// restrictions returned by the component operations may be (a lone grapeless
/// leaf, say); [`GrapeBunch::is_path_graph`] tells them apart.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GrapeBunch {
    stem: Stem,
    loops: Vec<u32>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Size {
    Small,
    Large,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Classification {
    pub size: Size,
    pub normal: bool,
    pub rich: bool,
}

impl Classification {
    pub fn is_large(&self) -> bool {
        self.size == Size::Large
    }
}

/// A restriction of a bunch to one side of a removed vertex, together with
/// the vertex of that side adjacent to the removed one.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HatComponent {
    pub bunch: GrapeBunch,
    pub attach: String,
}

impl GrapeBunch {
    /// Loops missing from `loops` default to zero.
    pub fn new(stem: Stem, loops: &BTreeMap<String, u32>) -> Result<GrapeBunch> {
        let mut counts = vec![0; stem.len()];
        for (name, &count) in loops {
            counts[stem.require(name)?] = count;
        }
        let g = GrapeBunch { stem, loops: counts };
        if g.is_path_graph() {
            return Err(Error::PathGraph);
        }
        Ok(g)
    }

    /// Convenience constructor from string slices.
    pub fn from_edges(edges: &[(&str, &str)], loops: &[(&str, u32)]) -> Result<GrapeBunch> {
        let mut names: Vec<&str> = loops.iter().map(|(n, _)| *n).collect();
        if edges.is_empty() && names.is_empty() {
            return Err(Error::EmptyStem);
        }
        names.sort_unstable();
        let stem = Stem::new(names, edges.iter().copied())?;
        let map = loops.iter().map(|(n, c)| (n.to_string(), *c)).collect();
        GrapeBunch::new(stem, &map)
    }

    pub(crate) fn from_parts(stem: Stem, loops: Vec<u32>) -> GrapeBunch {
        debug_assert_eq!(stem.len(), loops.len());
        GrapeBunch { stem, loops }
    }

    pub fn stem(&self) -> &Stem {
        &self.stem
    }

    pub fn loops_vec(&self) -> &[u32] {
        &self.loops
    }

    pub fn loops_at(&self, i: usize) -> u32 {
        self.loops[i]
    }

    pub fn loops(&self, v: &str) -> Result<u32> {
        Ok(self.loops[self.stem.require(v)?])
    }

    /// Loop counts keyed by vertex id, including zeros.
    pub fn loops_map(&self) -> BTreeMap<String, u32> {
        self.stem.names.iter().cloned().zip(self.loops.iter().copied()).collect()
    }

    pub fn is_path_graph(&self) -> bool {
        self.loops.iter().all(|&l| l == 0) && self.stem.is_path()
    }

    pub(crate) fn valence_at(&self, i: usize) -> usize {
        self.stem.degree(i) + 2 * self.loops[i] as usize
    }

    pub fn grape_valence(&self, v: &str) -> Result<usize> {
        Ok(self.valence_at(self.stem.require(v)?))
    }

    pub fn loops_sum(&self) -> u64 {
        self.loops.iter().map(|&l| l as u64).sum()
    }

    pub fn grape_vertex_count(&self) -> usize {
        self.loops.iter().filter(|&&l| l > 0).count()
    }

    pub fn classify(&self) -> Classification {
        let size = if self.grape_vertex_count() >= 2 { Size::Large } else { Size::Small };
        let normal = (0..self.stem.len()).all(|i| self.valence_at(i) >= 3);
        let rich = self.loops.iter().all(|&l| l >= 1);
        Classification { size, normal, rich }
    }

    /// Twigs as vertex index paths, each oriented so its first id is the
    /// smaller endpoint, sorted.
    pub(crate) fn twig_paths(&self) -> Vec<Vec<usize>> {
        let mut out = Vec::new();
        for start in 0..self.stem.len() {
            if self.valence_at(start) == 2 {
                continue;
            }
            for &first in self.stem.neighbors(start) {
                let mut path = vec![start, first];
                while self.valence_at(*path.last().unwrap()) == 2 {
                    let n = path.len();
                    let (prev, cur) = (path[n - 2], path[n - 1]);
                    let next = *self.stem.neighbors(cur).iter().find(|&&w| w != prev).unwrap();
                    path.push(next);
                }
                if path[0] < *path.last().unwrap() {
                    out.push(path);
                }
            }
        }
        out.sort();
        out
    }

    pub fn twigs(&self) -> Vec<Twig> {
        self.twig_paths().into_iter().map(|p| Twig { path: self.names_of(&p) }).collect()
    }

    pub(crate) fn names_of(&self, idx: &[usize]) -> Vec<String> {
        idx.iter().map(|&i| self.stem.names[i].clone()).collect()
    }

    pub(crate) fn twig_indices(&self, t: &Twig) -> Result<Vec<usize>> {
        let idx = self.stem.check_path(&t.path).map_err(|_| Error::NotATwig(t.to_string()))?;
        let mut normalized = idx.clone();
        if normalized[0] > *normalized.last().unwrap() {
            normalized.reverse();
        }
        if self.twig_paths().binary_search(&normalized).is_err() {
            return Err(Error::NotATwig(t.to_string()));
        }
        Ok(idx)
    }

    pub fn is_empty_twig(&self, t: &Twig) -> Result<bool> {
        let idx = self.twig_indices(t)?;
        let ends = [idx[0], *idx.last().unwrap()];
        Ok(ends.iter().any(|&e| self.valence_at(e) == 1))
    }

    /// Restriction to a connected vertex subset.
    pub(crate) fn restrict(&self, keep: &[usize]) -> GrapeBunch {
        let mut keep = keep.to_vec();
        keep.sort_unstable();
        keep.dedup();
        let loops = keep.iter().map(|&i| self.loops[i]).collect();
        GrapeBunch { stem: self.stem.induced(&keep), loops }
    }

    /// Components of `stem - v`, as sorted vertex lists paired with the vertex
    /// adjacent to `v`. Sorted by attach vertex.
    pub(crate) fn hat_component_sets(&self, v: usize) -> Vec<(usize, Vec<usize>)> {
        let mut removed = vec![false; self.stem.len()];
        removed[v] = true;
        self.stem
            .neighbors(v)
            .iter()
            .map(|&a| (a, self.stem.component(a, &removed)))
            .collect()
    }

    pub fn hat_components(&self, v: &str) -> Result<Vec<HatComponent>> {
        let vi = self.stem.require(v)?;
        Ok(self
            .hat_component_sets(vi)
            .into_iter()
            .map(|(a, set)| HatComponent {
                bunch: self.restrict(&set),
                attach: self.stem.names[a].clone(),
            })
            .collect())
    }

    /// The two components of the stem minus the interior of `path` that
    /// contain its endpoints, as vertex sets.
    pub(crate) fn substem_component_sets(&self, path: &[usize]) -> (Vec<usize>, Vec<usize>) {
        let mut removed = vec![false; self.stem.len()];
        for &i in &path[1..path.len() - 1] {
            removed[i] = true;
        }
        if path.len() == 2 {
            // removing the open edge: cut it explicitly
            let (a, b) = (path[0], path[1]);
            removed[b] = true;
            let first = self.stem.component(a, &removed);
            removed[b] = false;
            removed[a] = true;
            let second = self.stem.component(b, &removed);
            return (first, second);
        }
        let first = self.stem.component(path[0], &removed);
        let second = self.stem.component(*path.last().unwrap(), &removed);
        (first, second)
    }

    pub fn substem_components(&self, p: &PathSubstem) -> Result<(GrapeBunch, GrapeBunch)> {
        let idx = self.stem.check_path(&p.path)?;
        let (a, b) = self.substem_component_sets(&idx);
        Ok((self.restrict(&a), self.restrict(&b)))
    }

    pub fn canonical_form(&self) -> CanonicalForm {
        let code = match self.stem.center() {
            Center::Vertex(c) => format!("V{}", self.rooted_code(c, usize::MAX)),
            Center::Edge(a, b) => {
                let mut pair = [self.rooted_code(a, b), self.rooted_code(b, a)];
                pair.sort();
                format!("E{}{}", pair[0], pair[1])
            }
        };
        CanonicalForm(code)
    }

    pub fn rooted_canonical_form(&self, root: &str) -> Result<CanonicalForm> {
        let r = self.stem.require(root)?;
        Ok(CanonicalForm(format!("R{}", self.rooted_code(r, usize::MAX))))
    }

    /// Rooted code of the subtree at `v` grown away from `parent`.
    pub(crate) fn rooted_code(&self, v: usize, parent: usize) -> String {
        let mut children: Vec<String> = self
            .stem
            .neighbors(v)
            .iter()
            .filter(|&&w| w != parent)
            .map(|&w| self.rooted_code(w, v))
            .collect();
        children.sort();
        let mut out = format!("({}", self.loops[v]);
        for c in children {
            out.push_str(&c);
        }
        out.push(')');
        out
    }
}

/// A maximal stem path whose interior vertices have grape-valence two.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Twig {
    pub path: Vec<String>,
}

impl Twig {
    pub fn new<S: Into<String>>(path: impl IntoIterator<Item = S>) -> Twig {
        Twig { path: path.into_iter().map(Into::into).collect() }
    }

    pub fn len(&self) -> usize {
        self.path.len().saturating_sub(1)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn endpoints(&self) -> (&str, &str) {
        (&self.path[0], self.path.last().unwrap())
    }
}

impl fmt::Display for Twig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.path.join(" "))
    }
}

/// A path in the stem, at least one edge long.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PathSubstem {
    pub path: Vec<String>,
}

impl PathSubstem {
    pub fn new<S: Into<String>>(path: impl IntoIterator<Item = S>) -> PathSubstem {
        PathSubstem { path: path.into_iter().map(Into::into).collect() }
    }
}

/// Isometry-invariant code of a loop-labelled tree.
///
/// Each vertex is written as `(` loops children `)` with children sorted;
/// the prefix is `V` for a vertex center, `E` for an edge center and `R` for
/// an explicitly rooted form.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct CanonicalForm(pub String);

impl fmt::Display for CanonicalForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}
