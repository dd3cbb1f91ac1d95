use std::collections::BTreeSet;

use crate::error::{Error, Result};

/// A finite simple graph with string vertex ids, stored sorted.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SimpleGraph {
    names: Vec<String>,
    edges: Vec<(usize, usize)>,
    adj: Vec<Vec<usize>>,
}

impl SimpleGraph {
    pub fn new<V, E, S>(vertices: V, edges: E) -> Result<SimpleGraph>
    where
        V: IntoIterator<Item = S>,
        E: IntoIterator<Item = (S, S)>,
        S: Into<String>,
    {
        let mut names: BTreeSet<String> = vertices.into_iter().map(Into::into).collect();
        let raw: Vec<(String, String)> = edges.into_iter().map(|(a, b)| (a.into(), b.into())).collect();
        for (a, b) in &raw {
            names.insert(a.clone());
            names.insert(b.clone());
        }
        let names: Vec<String> = names.into_iter().collect();
        let mut set = BTreeSet::new();
        for (a, b) in &raw {
            if a == b {
                return Err(Error::SelfLoop(a.clone()));
            }
            let i = names.binary_search(a).unwrap();
            let j = names.binary_search(b).unwrap();
            if !set.insert((i.min(j), i.max(j))) {
                return Err(Error::DuplicateEdge(a.clone(), b.clone()));
            }
        }
        Ok(Self::from_index_edges(names, set.into_iter().collect()))
    }

    pub fn from_edges<S: Into<String>>(edges: impl IntoIterator<Item = (S, S)>) -> Result<SimpleGraph> {
        SimpleGraph::new(std::iter::empty::<String>(), edges.into_iter().map(|(a, b)| (a.into(), b.into())))
    }

    /// `names` sorted and unique; `edges` sorted with `i < j`.
    pub(crate) fn from_index_edges(names: Vec<String>, edges: Vec<(usize, usize)>) -> SimpleGraph {
        let mut adj = vec![Vec::new(); names.len()];
        for &(i, j) in &edges {
            adj[i].push(j);
            adj[j].push(i);
        }
        for l in &mut adj {
            l.sort_unstable();
        }
        SimpleGraph { names, edges, adj }
    }

    pub fn vertex_count(&self) -> usize {
        self.names.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
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

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn edge_index(&self, a: usize, b: usize) -> Option<usize> {
        self.edges.binary_search(&(a.min(b), a.max(b))).ok()
    }

    pub fn neighbors(&self, i: usize) -> &[usize] {
        &self.adj[i]
    }

    pub fn degree(&self, i: usize) -> usize {
        self.adj[i].len()
    }

    pub fn is_connected(&self) -> bool {
        if self.names.is_empty() {
            return true;
        }
        let mut seen = vec![false; self.names.len()];
        let mut stack = vec![0];
        seen[0] = true;
        let mut count = 1;
        while let Some(u) = stack.pop() {
            for &w in &self.adj[u] {
                if !seen[w] {
                    seen[w] = true;
                    count += 1;
                    stack.push(w);
                }
            }
        }
        count == self.names.len()
    }

    /// Subgraph on the given edge indices (vertices = their endpoints), with
    /// names preserved.
    pub fn edge_subgraph(&self, edge_ids: &[usize]) -> SimpleGraph {
        let mut verts: BTreeSet<usize> = BTreeSet::new();
        for &e in edge_ids {
            verts.insert(self.edges[e].0);
            verts.insert(self.edges[e].1);
        }
        let verts: Vec<usize> = verts.into_iter().collect();
        let names = verts.iter().map(|&v| self.names[v].clone()).collect();
        let mut edges: Vec<(usize, usize)> = edge_ids
            .iter()
            .map(|&e| {
                let (a, b) = self.edges[e];
                (verts.binary_search(&a).unwrap(), verts.binary_search(&b).unwrap())
            })
            .collect();
        edges.sort_unstable();
        edges.dedup();
        SimpleGraph::from_index_edges(names, edges)
    }
}
