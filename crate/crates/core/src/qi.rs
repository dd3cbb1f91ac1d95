//! Free-rank formulas, the quasi-isometry decision for 2-braid groups over
//! bunches of grapes, its transfer to 4-braid groups over trees, and the two
//! sufficient RAAG criteria.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::cube::SimpleGraph;
use crate::error::{Error, Result};
use crate::grape::{CanonicalForm, GrapeBunch, Stem};
use crate::reductions::quasi_minimal;

/// Free rank of the 2-braid group of an `n`-star with `l` grapes at its center.
pub fn free_rank_formula(n: u64, l: u64) -> Result<u64> {
    if n + l == 0 {
        return Err(Error::InvalidArgument("free rank needs n + l >= 1".into()));
    }
    let (n, l) = (n as i128, l as i128);
    let value = (n + l) * (n + 3 * l - 3) / 2 + 1;
    Ok(value as u64)
}

/// Rank of the free group `B_2(g)` for a small bunch.
pub fn small_rank(g: &GrapeBunch) -> Result<u64> {
    if g.classify().is_large() {
        return Err(Error::Precondition("small rank requires a small bunch".into()));
    }
    let stem = g.stem();
    let mut total = 0;
    for v in 0..stem.len() {
        let (n, l) = (stem.degree(v) as u64, g.loops_at(v) as u64);
        if n + l == 0 {
            continue;
        }
        total += free_rank_formula(n, l)?;
    }
    Ok(total)
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "class", rename_all = "lowercase")]
pub enum QiClassDescriptor {
    /// `min(N, 2)` for the small free rank `N`.
    Small { code: u8 },
    /// Canonical form of the quasi-minimal representative.
    Large { min_form: CanonicalForm },
}

impl std::fmt::Display for QiClassDescriptor {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            QiClassDescriptor::Small { code } => write!(f, "small:{code}"),
            QiClassDescriptor::Large { min_form } => write!(f, "large:{min_form}"),
        }
    }
}

pub fn descriptor(g: &GrapeBunch) -> Result<QiClassDescriptor> {
    if g.grape_vertex_count() <= 1 {
        let n = small_rank(g)?;
        Ok(QiClassDescriptor::Small { code: n.min(2) as u8 })
    } else {
        let (min, _) = quasi_minimal(g)?;
        Ok(QiClassDescriptor::Large { min_form: min.canonical_form() })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QiDecision {
    pub quasi_isometric: bool,
    pub left: QiClassDescriptor,
    pub right: QiClassDescriptor,
}

pub fn decide_qi(g1: &GrapeBunch, g2: &GrapeBunch) -> Result<QiDecision> {
    let left = descriptor(g1)?;
    let right = descriptor(g2)?;
    Ok(QiDecision { quasi_isometric: left == right, left, right })
}

/// The bunch over `t` with `binom(val(v) - 1, 2)` grapes at each vertex.
pub fn grow_from_tree(t: &Stem) -> Result<GrapeBunch> {
    if t.is_path() {
        return Err(Error::PathGraph);
    }
    let loops = (0..t.len())
        .map(|v| {
            let k = t.degree(v).saturating_sub(1) as u32;
            (t.name(v).to_string(), k * k.saturating_sub(1) / 2)
        })
        .collect();
    GrapeBunch::new(t.clone(), &loops)
}

/// Quasi-isometry class of `B_4` over a tree.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "class", rename_all = "lowercase")]
pub enum Tree4Class {
    /// Path trees: the 4-braid group is trivial.
    Trivial,
    Grown { descriptor: QiClassDescriptor },
}

pub fn tree4_class(t: &Stem) -> Result<Tree4Class> {
    if t.edge_count() == 0 {
        return Err(Error::InvalidArgument("tree needs at least one edge".into()));
    }
    if t.is_path() {
        return Ok(Tree4Class::Trivial);
    }
    Ok(Tree4Class::Grown { descriptor: descriptor(&grow_from_tree(t)?)? })
}

pub fn decide_qi_tree4(t1: &Stem, t2: &Stem) -> Result<bool> {
    Ok(tree4_class(t1)? == tree4_class(t2)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RaagValue {
    QiToRaag,
    NotQiToRaag,
    Unknown,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum RaagWitness {
    /// Stem path of the quasi-minimal representative, end to end.
    PathStem { path: Vec<String> },
    /// Four stem leaves spanning a normal affine `D_n` substem.
    AffineD { leaves: [String; 4], n: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RaagVerdict {
    pub value: RaagValue,
    pub witness: Option<RaagWitness>,
}

pub fn raag_qi_check(g: &GrapeBunch) -> Result<RaagVerdict> {
    if !g.classify().is_large() {
        return Err(Error::Precondition("RAAG check requires a large bunch".into()));
    }
    let (min, _) = quasi_minimal(g)?;
    if min.stem().is_path() {
        return Ok(RaagVerdict {
            value: RaagValue::QiToRaag,
            witness: Some(RaagWitness::PathStem { path: path_order(min.stem()) }),
        });
    }
    if let Some((leaves, n)) = find_affine_d(g)? {
        return Ok(RaagVerdict { value: RaagValue::NotQiToRaag, witness: Some(RaagWitness::AffineD { leaves, n }) });
    }
    Ok(RaagVerdict { value: RaagValue::Unknown, witness: None })
}

fn path_order(stem: &Stem) -> Vec<String> {
    if stem.len() == 1 {
        return vec![stem.name(0).to_string()];
    }
    let leaves = stem.leaves();
    stem.path_between(leaves[0], leaves[1]).into_iter().map(|i| stem.name(i).to_string()).collect()
}

const AFFINE_D_LEAF_GUARD: usize = 64;

/// Searches four stem leaves whose spanning subtree is an affine `D_n`
/// (`n >= 5`) over which the restricted bunch is normal.
pub fn find_affine_d(g: &GrapeBunch) -> Result<Option<([String; 4], usize)>> {
    let stem = g.stem();
    let leaves = stem.leaves();
    if leaves.len() > AFFINE_D_LEAF_GUARD {
        return Err(Error::Guard(format!("affine D search allows at most {AFFINE_D_LEAF_GUARD} leaves")));
    }
    let k = leaves.len();
    for a in 0..k {
        for b in a + 1..k {
            for c in b + 1..k {
                for d in c + 1..k {
                    let quad = [leaves[a], leaves[b], leaves[c], leaves[d]];
                    if let Some(n) = affine_d_span(g, &quad) {
                        let names = quad.map(|i| stem.name(i).to_string());
                        return Ok(Some((names, n)));
                    }
                }
            }
        }
    }
    Ok(None)
}

fn affine_d_span(g: &GrapeBunch, quad: &[usize; 4]) -> Option<usize> {
    let stem = g.stem();
    let mut span: BTreeSet<usize> = BTreeSet::new();
    for &x in &quad[1..] {
        span.extend(stem.path_between(quad[0], x));
    }
    let inside = |v: usize| span.contains(&v);
    let deg = |v: usize| stem.neighbors(v).iter().filter(|&&w| inside(w)).count();
    let mut branch = Vec::new();
    for &v in &span {
        match deg(v) {
            1 if quad.contains(&v) => {}
            2 => {}
            3 => branch.push(v),
            _ => return None,
        }
    }
    if branch.len() != 2 {
        return None;
    }
    for &b in &branch {
        let leaf_nbrs = stem.neighbors(b).iter().filter(|w| quad.contains(w)).count();
        if leaf_nbrs != 2 {
            return None;
        }
    }
    let normal = span.iter().all(|&v| deg(v) + 2 * g.loops_at(v) as usize >= 3);
    normal.then_some(span.len() - 1)
}

/// The defining graph of the RAAG `pi_1(UP_2)` for a path stem `v_0 .. v_n`
/// with one grape everywhere: vertices `a_0 .. a_{n-1}` and `b_1 .. b_n`,
/// with `a_j` adjacent to `b_k` exactly when `j < k`. It is the union of the
/// stars `S_{n-j}` centered at `a_j`, which share their leaves.
pub fn raag_presentation_for_path_stem(g: &GrapeBunch) -> Result<SimpleGraph> {
    let stem = g.stem();
    if !stem.is_path() || stem.len() < 2 {
        return Err(Error::Precondition("RAAG presentation needs a path stem with an edge".into()));
    }
    if g.loops_vec().iter().any(|&l| l != 1) {
        return Err(Error::Precondition("RAAG presentation needs exactly one grape at every vertex".into()));
    }
    let n = stem.edge_count();
    let mut edges = Vec::new();
    for j in 0..n {
        for k in j + 1..=n {
            edges.push((format!("a{j}"), format!("b{k}")));
        }
    }
    SimpleGraph::from_edges(edges)
}
