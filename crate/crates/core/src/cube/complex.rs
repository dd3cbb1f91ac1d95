use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};

use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A cube of dimension `d`, given by its `2^d` corner vertices (indexed by
/// bitmask) and its `d * 2^(d-1)` edges.
///
/// The edge in direction `i` whose lower corner is `m` (bit `i` clear) sits at
/// slot `i * 2^(d-1) + compress(m, i)`, where `compress` drops bit `i`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Cube {
    pub vertices: Vec<usize>,
    pub edges: Vec<usize>,
}

fn compress(m: usize, i: usize) -> usize {
    let low = m & ((1 << i) - 1);
    let high = (m >> (i + 1)) << i;
    low | high
}

impl Cube {
    pub fn dim(&self) -> usize {
        self.vertices.len().trailing_zeros() as usize
    }

    /// Edge in direction `i` starting at corner `m`; bit `i` of `m` is ignored.
    pub fn edge(&self, i: usize, m: usize) -> usize {
        let d = self.dim();
        self.edges[i * (1 << (d - 1)) + compress(m & !(1 << i), i)]
    }

    pub(crate) fn slot(d: usize, i: usize, m: usize) -> usize {
        i * (1 << (d - 1)) + compress(m & !(1 << i), i)
    }
}

/// A finite cube complex. `cells[d]` lists the `d`-cubes; vertices are the
/// 0-cubes, each with `vertices == [self]`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CubeComplex {
    labels: Vec<String>,
    cells: Vec<Vec<Cube>>,
    /// Per cell, the base-graph cells it is configured from, when known.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    members: Option<Vec<Vec<Vec<usize>>>>,
}

impl CubeComplex {
    pub fn empty() -> CubeComplex {
        CubeComplex { labels: Vec::new(), cells: vec![Vec::new()], members: None }
    }

    /// Builds a complex from vertex labels, edges and cubes of dimension at
    /// least two. Cube faces are not required to be listed.
    pub fn new(labels: Vec<String>, edges: Vec<(usize, usize)>, cubes: Vec<Cube>) -> Result<CubeComplex> {
        let nv = labels.len();
        let mut cells: Vec<Vec<Cube>> = vec![(0..nv).map(|v| Cube { vertices: vec![v], edges: Vec::new() }).collect()];
        let mut ones = Vec::new();
        for (k, &(a, b)) in edges.iter().enumerate() {
            if a >= nv || b >= nv {
                return Err(Error::InvalidArgument(format!("edge {k} has an unknown endpoint")));
            }
            if a == b {
                return Err(Error::InvalidArgument(format!("edge {k} is a loop")));
            }
            ones.push(Cube { vertices: vec![a, b], edges: vec![k] });
        }
        cells.push(ones);
        for (k, c) in cubes.into_iter().enumerate() {
            let d = c.dim();
            if d < 2 || c.vertices.len() != 1 << d || c.edges.len() != d << (d - 1) {
                return Err(Error::InvalidArgument(format!("cube {k} has malformed corner or edge lists")));
            }
            for i in 0..d {
                for m in (0..1usize << d).filter(|m| m >> i & 1 == 0) {
                    let e = c.edge(i, m);
                    let ends = edges.get(e).copied();
                    let want = (c.vertices[m], c.vertices[m | 1 << i]);
                    if ends != Some(want) && ends != Some((want.1, want.0)) {
                        return Err(Error::InvalidArgument(format!("cube {k} edge {e} does not match its corners")));
                    }
                }
            }
            while cells.len() <= d {
                cells.push(Vec::new());
            }
            cells[d].push(c);
        }
        Ok(CubeComplex { labels, cells, members: None })
    }

    pub(crate) fn from_cells(labels: Vec<String>, mut cells: Vec<Vec<Cube>>, members: Vec<Vec<Vec<usize>>>) -> Self {
        while cells.len() > 1 && cells.last().is_some_and(Vec::is_empty) {
            cells.pop();
        }
        let mut members = members;
        members.truncate(cells.len());
        CubeComplex { labels, cells, members: Some(members) }
    }

    pub fn dimension(&self) -> usize {
        self.cells.len().saturating_sub(1)
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn vertex_count(&self) -> usize {
        self.labels.len()
    }

    pub fn edge_count(&self) -> usize {
        self.cells(1).len()
    }

    pub fn square_count(&self) -> usize {
        self.cells(2).len()
    }

    pub fn cells(&self, d: usize) -> &[Cube] {
        self.cells.get(d).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn f_vector(&self) -> Vec<usize> {
        self.cells.iter().map(Vec::len).collect()
    }

    pub fn label(&self, v: usize) -> &str {
        &self.labels[v]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn edge_ends(&self, e: usize) -> (usize, usize) {
        let c = &self.cells[1][e];
        (c.vertices[0], c.vertices[1])
    }

    /// Base cells configuring cell `k` of dimension `d`, if recorded.
    pub fn members(&self, d: usize, k: usize) -> Option<&[usize]> {
        self.members.as_ref().map(|m| m[d][k].as_slice())
    }

    /// Keeps the cells for which `keep(d, k)` holds. The kept set must be
    /// closed under faces.
    pub(crate) fn restrict(&self, keep: impl Fn(usize, usize) -> bool) -> CubeComplex {
        let mut remap: Vec<Vec<Option<usize>>> = Vec::new();
        let mut cells: Vec<Vec<Cube>> = Vec::new();
        let mut members: Vec<Vec<Vec<usize>>> = Vec::new();
        let mut labels = Vec::new();
        for (d, list) in self.cells.iter().enumerate() {
            let mut map = vec![None; list.len()];
            let mut out = Vec::new();
            let mut mem = Vec::new();
            for (k, c) in list.iter().enumerate() {
                if !keep(d, k) {
                    continue;
                }
                let id = out.len();
                map[k] = Some(id);
                let vertices = if d == 0 { vec![id] } else { c.vertices.iter().map(|&v| remap[0][v].expect("face-closed")).collect() };
                let edges = if d == 1 { vec![id] } else { c.edges.iter().map(|&e| remap[1][e].expect("face-closed")).collect() };
                out.push(Cube { vertices, edges });
                if d == 0 {
                    labels.push(self.labels[k].clone());
                }
                if let Some(m) = self.members(d, k) {
                    mem.push(m.to_vec());
                }
            }
            remap.push(map);
            cells.push(out);
            members.push(mem);
        }
        if self.members.is_some() {
            CubeComplex::from_cells(labels, cells, members)
        } else {
            while cells.len() > 1 && cells.last().is_some_and(Vec::is_empty) {
                cells.pop();
            }
            CubeComplex { labels, cells, members: None }
        }
    }

    /// Per vertex, every corner of every cube of dimension at least one, as
    /// the list of edges at that corner.
    fn corners(&self) -> Vec<Vec<Vec<usize>>> {
        let mut out = vec![Vec::new(); self.vertex_count()];
        for list in self.cells.iter().skip(1) {
            for c in list {
                let d = c.dim();
                for m in 0..1usize << d {
                    let edges: Vec<usize> = (0..d).map(|i| c.edge(i, m)).collect();
                    out[c.vertices[m]].push(edges);
                }
            }
        }
        out
    }

    /// Link condition at every vertex: links are simplicial, without repeated
    /// simplices, and flag.
    pub fn links_ok(&self) -> LinkReport {
        let mut problems = Vec::new();
        for (v, corners) in self.corners().into_iter().enumerate() {
            if let Some(reason) = link_problem(corners) {
                problems.push(LinkProblem { vertex: self.labels[v].clone(), reason });
            }
        }
        LinkReport { ok: problems.is_empty(), problems }
    }

    pub fn hyperplanes(&self) -> HyperplaneReport {
        let ne = self.edge_count();
        // parity union-find: parity says whether an edge's stored direction
        // agrees with its class root's
        let mut dsu = ParityDsu::new(ne);
        let mut one_sided_roots = Vec::new();
        for list in self.cells.iter().skip(2) {
            for c in list {
                let d = c.dim();
                for i in 0..d {
                    let bit = 1 << i;
                    let lows: Vec<usize> = (0..1usize << d).filter(|m| m & bit == 0).collect();
                    let first = lows[0];
                    for &m in &lows[1..] {
                        let (e, f) = (c.edge(i, first), c.edge(i, m));
                        let pe = self.edge_ends(e).0 != c.vertices[first];
                        let pf = self.edge_ends(f).0 != c.vertices[m];
                        if !dsu.union(e, f, pe ^ pf) {
                            one_sided_roots.push(e);
                        }
                    }
                }
            }
        }
        let mut class_id = vec![usize::MAX; ne];
        let mut classes: Vec<Vec<usize>> = Vec::new();
        let mut by_root: HashMap<usize, usize> = HashMap::new();
        for (e, slot) in class_id.iter_mut().enumerate() {
            let r = dsu.find(e).0;
            let id = *by_root.entry(r).or_insert_with(|| {
                classes.push(Vec::new());
                classes.len() - 1
            });
            classes[id].push(e);
            *slot = id;
        }
        let nc = classes.len();
        let mut one_sided = vec![false; nc];
        for e in one_sided_roots {
            one_sided[class_id[e]] = true;
        }
        let mut self_intersecting = vec![false; nc];
        let mut crossing: HashSet<(usize, usize)> = HashSet::new();
        for list in self.cells.iter().skip(2) {
            for c in list {
                let d = c.dim();
                let dir_class: Vec<usize> = (0..d).map(|i| class_id[c.edge(i, 0)]).collect();
                for i in 0..d {
                    for j in i + 1..d {
                        let (a, b) = (dir_class[i], dir_class[j]);
                        if a == b {
                            self_intersecting[a] = true;
                        } else {
                            crossing.insert((a.min(b), a.max(b)));
                        }
                    }
                }
            }
        }
        let mut self_osculating = vec![false; nc];
        let mut osculating: HashSet<(usize, usize)> = HashSet::new();
        let mut incident: Vec<Vec<usize>> = vec![Vec::new(); self.vertex_count()];
        for e in 0..ne {
            let (a, b) = self.edge_ends(e);
            incident[a].push(e);
            incident[b].push(e);
        }
        for (v, corners) in self.corners().into_iter().enumerate() {
            let mut spanned: HashSet<(usize, usize)> = HashSet::new();
            for corner in corners.iter().filter(|c| c.len() >= 2) {
                for (x, &e) in corner.iter().enumerate() {
                    for &f in &corner[x + 1..] {
                        spanned.insert((e.min(f), e.max(f)));
                    }
                }
            }
            let inc = &incident[v];
            for (x, &e) in inc.iter().enumerate() {
                for &f in &inc[x + 1..] {
                    if spanned.contains(&(e.min(f), e.max(f))) {
                        continue;
                    }
                    let (a, b) = (class_id[e], class_id[f]);
                    if a == b {
                        self_osculating[a] = true;
                    } else {
                        osculating.insert((a.min(b), a.max(b)));
                    }
                }
            }
        }
        let mut inter_osculating: Vec<(usize, usize)> = crossing.intersection(&osculating).copied().collect();
        inter_osculating.sort_unstable();
        HyperplaneReport { classes, self_intersecting, self_osculating, one_sided, inter_osculating }
    }

    /// `(b0, b1)`; `b1` uses an exact rational rank of the square boundary map.
    pub fn betti(&self) -> (usize, usize) {
        let nv = self.vertex_count();
        let ne = self.edge_count();
        let mut dsu = ParityDsu::new(nv);
        let mut b0 = nv;
        for e in 0..ne {
            let (a, b) = self.edge_ends(e);
            if dsu.find(a).0 != dsu.find(b).0 {
                dsu.union(a, b, false);
                b0 -= 1;
            }
        }
        let rows: Vec<Vec<(usize, i64)>> = self.cells(2).iter().map(|s| self.square_boundary(s)).collect();
        let rank = rational_rank(&rows);
        (b0, ne + b0 - nv - rank)
    }

    fn square_boundary(&self, s: &Cube) -> Vec<(usize, i64)> {
        let mut acc: BTreeMap<usize, i64> = BTreeMap::new();
        // boundary walks 00 -> 10 -> 11 -> 01 -> 00
        let steps = [(0usize, 0usize, 1i64), (1, 1, 1), (0, 2, -1), (1, 0, -1)];
        for (i, m, sign) in steps {
            let e = s.edge(i, m);
            let forward = self.edge_ends(e).0 == s.vertices[m];
            *acc.entry(e).or_insert(0) += if forward { sign } else { -sign };
        }
        acc.into_iter().filter(|&(_, c)| c != 0).collect()
    }

    /// Two squares sharing three of their edges; the link at an interior
    /// corner has a double edge.
    pub fn glued_squares() -> CubeComplex {
        let labels = ["a", "b", "c", "d"].iter().map(|s| s.to_string()).collect();
        // edges: ab, bc, cd, da, da'
        let edges = vec![(0, 1), (1, 2), (3, 2), (0, 3), (0, 3)];
        // corners 00=a 10=b 01=d 11=c; dir 0 edges ab, dc; dir 1 edges ad, bc
        let sq = |left: usize| Cube { vertices: vec![0, 1, 3, 2], edges: vec![0, 2, left, 1] };
        CubeComplex::new(labels, edges, vec![sq(3), sq(4)]).expect("valid construction")
    }

    /// A strip of three squares closed up with a twist.
    pub fn mobius_strip() -> CubeComplex {
        // t0 t1 t2 = 0 1 2, b0 b1 b2 = 3 4 5
        let labels = ["t0", "t1", "t2", "b0", "b1", "b2"].iter().map(|s| s.to_string()).collect();
        let edges = vec![(0, 3), (1, 4), (2, 5), (0, 1), (3, 4), (1, 2), (4, 5), (2, 3), (5, 0)];
        // dir 0 runs along rungs, dir 1 along the strip
        let squares = vec![
            Cube { vertices: vec![0, 3, 1, 4], edges: vec![0, 1, 3, 4] },
            Cube { vertices: vec![1, 4, 2, 5], edges: vec![1, 2, 5, 6] },
            Cube { vertices: vec![2, 5, 3, 0], edges: vec![2, 0, 7, 8] },
        ];
        CubeComplex::new(labels, edges, squares).expect("valid construction")
    }

    pub fn single_square() -> CubeComplex {
        let labels = ["00", "10", "01", "11"].iter().map(|s| s.to_string()).collect();
        let edges = vec![(0, 1), (2, 3), (0, 2), (1, 3)];
        CubeComplex::new(labels, edges, vec![Cube { vertices: vec![0, 1, 2, 3], edges: vec![0, 1, 2, 3] }])
            .expect("valid construction")
    }
}

fn link_problem(corners: Vec<Vec<usize>>) -> Option<String> {
    let mut simplices: BTreeSet<Vec<usize>> = BTreeSet::new();
    let mut adj: BTreeMap<usize, BTreeSet<usize>> = BTreeMap::new();
    for corner in corners {
        let mut s = corner.clone();
        s.sort_unstable();
        s.dedup();
        if s.len() != corner.len() {
            return Some(format!("a cube meets itself along edge {}", corner[0]));
        }
        for (x, &e) in s.iter().enumerate() {
            adj.entry(e).or_default();
            for &f in &s[x + 1..] {
                adj.entry(e).or_default().insert(f);
                adj.entry(f).or_default().insert(e);
            }
        }
        if !simplices.insert(s.clone()) {
            return Some(format!("repeated simplex on edges {s:?}"));
        }
    }
    // every clique of size at least 3 must span a simplex
    let verts: Vec<usize> = adj.keys().copied().collect();
    let mut stack: Vec<Vec<usize>> = verts.iter().map(|&v| vec![v]).collect();
    while let Some(clique) = stack.pop() {
        if clique.len() >= 3 && !simplices.contains(&clique) {
            return Some(format!("edges {clique:?} span an empty simplex"));
        }
        let last = *clique.last().unwrap();
        for &w in adj[&last].range(last + 1..) {
            if clique.iter().all(|u| adj[u].contains(&w)) {
                let mut next = clique.clone();
                next.push(w);
                stack.push(next);
            }
        }
    }
    None
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LinkProblem {
    pub vertex: String,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LinkReport {
    pub ok: bool,
    pub problems: Vec<LinkProblem>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HyperplaneReport {
    /// Parallelism classes of edges, each sorted, ordered by smallest edge.
    pub classes: Vec<Vec<usize>>,
    pub self_intersecting: Vec<bool>,
    pub self_osculating: Vec<bool>,
    pub one_sided: Vec<bool>,
    /// Class pairs that both cross and osculate.
    pub inter_osculating: Vec<(usize, usize)>,
}

impl HyperplaneReport {
    pub fn is_clean(&self) -> bool {
        let none = |v: &[bool]| v.iter().all(|&f| !f);
        none(&self.self_intersecting) && none(&self.self_osculating) && none(&self.one_sided) && self.inter_osculating.is_empty()
    }
}

struct ParityDsu {
    parent: Vec<usize>,
    parity: Vec<bool>,
}

impl ParityDsu {
    fn new(n: usize) -> Self {
        ParityDsu { parent: (0..n).collect(), parity: vec![false; n] }
    }

    fn find(&mut self, x: usize) -> (usize, bool) {
        let p = self.parent[x];
        if p == x {
            return (x, false);
        }
        let (root, par) = self.find(p);
        self.parent[x] = root;
        self.parity[x] ^= par;
        (root, self.parity[x])
    }

    /// Records `parity(a) ^ parity(b) == rel`; false on contradiction.
    fn union(&mut self, a: usize, b: usize, rel: bool) -> bool {
        let (ra, pa) = self.find(a);
        let (rb, pb) = self.find(b);
        if ra == rb {
            return pa ^ pb == rel;
        }
        self.parent[ra] = rb;
        self.parity[ra] = pa ^ pb ^ rel;
        true
    }
}

/// Rank over the rationals of a sparse integer matrix given by rows.
pub fn rational_rank(rows: &[Vec<(usize, i64)>]) -> usize {
    let mut pivots: BTreeMap<usize, BTreeMap<usize, BigRational>> = BTreeMap::new();
    for row in rows {
        let mut r: BTreeMap<usize, BigRational> =
            row.iter().filter(|&&(_, c)| c != 0).map(|&(j, c)| (j, BigRational::from_integer(c.into()))).collect();
        while let Some((lead, coef)) = r.first_key_value().map(|(&k, v)| (k, v.clone())) {
            let Some(p) = pivots.get(&lead) else {
                let inv = BigRational::one() / coef;
                for v in r.values_mut() {
                    *v = &*v * &inv;
                }
                pivots.insert(lead, r);
                break;
            };
            let factor = coef;
            for (&j, pv) in p {
                let entry = r.entry(j).or_insert_with(BigRational::zero);
                *entry = &*entry - &factor * pv;
                if entry.is_zero() {
                    r.remove(&j);
                }
            }
        }
    }
    pivots.len()
}
