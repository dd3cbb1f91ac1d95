//! Quasi-isometry preserving operations on large bunches of grapes and the
//! pipeline normal -> rich -> quasi-minimal.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grape::{CanonicalForm, Center, GrapeBunch, Stem, Twig};

/// One elementary operation, located by vertex ids.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Step {
    PruneEmptyTwig { twig: Twig },
    SmoothTwig { twig: Twig },
    PickGrape { vertex: String },
    AttachGrape { vertex: String },
    /// Removes the component of `stem - vertex` containing `attach`.
    PruneSubstem { vertex: String, attach: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Summary {
    pub vertices: usize,
    pub loops: u64,
}

impl Summary {
    fn of(g: &GrapeBunch) -> Self {
        Summary { vertices: g.stem().len(), loops: g.loops_sum() }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceEntry {
    pub step: Step,
    pub before: Summary,
    pub after: Summary,
}

/// Ordered record of the steps a reduction applied.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReductionTrace {
    pub steps: Vec<TraceEntry>,
}

impl ReductionTrace {
    fn push(&mut self, step: Step, before: &GrapeBunch, after: &GrapeBunch) {
        self.steps.push(TraceEntry { step, before: Summary::of(before), after: Summary::of(after) });
    }

    fn extend(&mut self, other: ReductionTrace) {
        self.steps.extend(other.steps);
    }

    /// Re-applies every step, in order, to `input`.
    pub fn replay(&self, input: &GrapeBunch) -> Result<GrapeBunch> {
        let mut g = input.clone();
        for entry in &self.steps {
            g = apply_step_unchecked(&g, &entry.step)?;
        }
        Ok(g)
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }
}

fn require_large(g: &GrapeBunch, what: &str) -> Result<()> {
    if !g.classify().is_large() {
        return Err(Error::Precondition(format!("{what} requires a large bunch")));
    }
    Ok(())
}

fn require_large_normal(g: &GrapeBunch, what: &str) -> Result<()> {
    let c = g.classify();
    if !(c.is_large() && c.normal) {
        return Err(Error::Precondition(format!("{what} requires a large and normal bunch")));
    }
    Ok(())
}

fn require_large_rich(g: &GrapeBunch, what: &str) -> Result<()> {
    let c = g.classify();
    if !(c.is_large() && c.rich) {
        return Err(Error::Precondition(format!("{what} requires a large and rich bunch")));
    }
    Ok(())
}

/// Removes the vertices in `drop` (their complement must stay connected).
fn delete_vertices(g: &GrapeBunch, drop: &[usize]) -> GrapeBunch {
    let mut gone = vec![false; g.stem().len()];
    for &d in drop {
        gone[d] = true;
    }
    let keep: Vec<usize> = (0..g.stem().len()).filter(|&i| !gone[i]).collect();
    g.restrict(&keep)
}

pub fn prune_empty_twig(g: &GrapeBunch, t: &Twig) -> Result<GrapeBunch> {
    require_large(g, "pruning an empty twig")?;
    prune_empty_twig_unchecked(g, t)
}

fn prune_empty_twig_unchecked(g: &GrapeBunch, t: &Twig) -> Result<GrapeBunch> {
    let mut idx = g.twig_indices(t)?;
    if g.valence_at(*idx.last().unwrap()) != 1 {
        idx.reverse();
    }
    if g.valence_at(*idx.last().unwrap()) != 1 {
        return Err(Error::NotATwig(format!("{t} is not an empty twig")));
    }
    let out = delete_vertices(g, &idx[1..]);
    if out.is_path_graph() {
        return Err(Error::PathGraph);
    }
    Ok(out)
}

pub fn smooth_twig(g: &GrapeBunch, t: &Twig) -> Result<GrapeBunch> {
    let idx = g.twig_indices(t)?;
    if idx.len() < 3 {
        return Err(Error::InvalidArgument(format!("twig {t} has length 1")));
    }
    let first = idx[0];
    let last = *idx.last().unwrap();
    let interior = &idx[1..idx.len() - 1];
    let stem = g.stem();
    let mut edges: Vec<(String, String)> = stem
        .edges()
        .into_iter()
        .filter(|(a, b)| !interior.contains(a) && !interior.contains(b))
        .map(|(a, b)| (stem.name(a).to_string(), stem.name(b).to_string()))
        .collect();
    edges.push((stem.name(first).to_string(), stem.name(last).to_string()));
    let vertices: Vec<String> = (0..stem.len())
        .filter(|i| !interior.contains(i))
        .map(|i| stem.name(i).to_string())
        .collect();
    let new_stem = Stem::new(vertices, edges)?;
    let loops: BTreeMap<String, u32> = (0..stem.len())
        .filter(|i| !interior.contains(i))
        .map(|i| (stem.name(i).to_string(), g.loops_at(i)))
        .collect();
    Ok(set_loops_on(new_stem, &loops))
}

fn set_loops_on(stem: Stem, loops: &BTreeMap<String, u32>) -> GrapeBunch {
    let counts = stem.names().iter().map(|n| loops.get(n).copied().unwrap_or(0)).collect();
    GrapeBunch::from_parts(stem, counts)
}

fn with_loops(g: &GrapeBunch, v: usize, count: u32) -> GrapeBunch {
    let mut loops = g.loops_vec().to_vec();
    loops[v] = count;
    GrapeBunch::from_parts(g.stem().clone(), loops)
}

/// Removes the component of `stem - v` that contains `attach`.
pub fn prune_substem(g: &GrapeBunch, v: &str, attach: &str) -> Result<GrapeBunch> {
    let vi = g.stem().require(v)?;
    let ai = g.stem().require(attach)?;
    let (_, set) = g
        .hat_component_sets(vi)
        .into_iter()
        .find(|(a, _)| *a == ai)
        .ok_or_else(|| Error::InvalidArgument(format!("{attach} is not adjacent to {v}")))?;
    Ok(delete_vertices(g, &set))
}

/// Applies a step after checking that it is legal for `g`.
pub fn apply_step(g: &GrapeBunch, step: &Step) -> Result<GrapeBunch> {
    if !legal_steps(g).contains(step) {
        return Err(Error::Precondition(format!("step {step:?} is not legal here")));
    }
    apply_step_unchecked(g, step)
}

fn apply_step_unchecked(g: &GrapeBunch, step: &Step) -> Result<GrapeBunch> {
    match step {
        Step::PruneEmptyTwig { twig } => prune_empty_twig_unchecked(g, twig),
        Step::SmoothTwig { twig } => smooth_twig(g, twig),
        Step::PickGrape { vertex } => {
            let v = g.stem().require(vertex)?;
            let l = g.loops_at(v);
            if l == 0 {
                return Err(Error::InvalidArgument(format!("no grape at {vertex}")));
            }
            Ok(with_loops(g, v, l - 1))
        }
        Step::AttachGrape { vertex } => {
            let v = g.stem().require(vertex)?;
            Ok(with_loops(g, v, g.loops_at(v) + 1))
        }
        Step::PruneSubstem { vertex, attach } => prune_substem(g, vertex, attach),
    }
}

/// Every single step whose definition-level precondition holds for `g`.
pub fn legal_steps(g: &GrapeBunch) -> Vec<Step> {
    let mut out = Vec::new();
    let c = g.classify();
    if !c.is_large() {
        return out;
    }
    for path in g.twig_paths() {
        let twig = Twig { path: g.names_of(&path) };
        let ends = [path[0], *path.last().unwrap()];
        if ends.iter().any(|&e| g.valence_at(e) == 1) {
            out.push(Step::PruneEmptyTwig { twig: twig.clone() });
        }
        if path.len() >= 3 {
            out.push(Step::SmoothTwig { twig });
        }
    }
    if c.normal {
        for v in 0..g.stem().len() {
            let val = g.stem().degree(v) as u32;
            let name = g.stem().name(v).to_string();
            if g.loops_at(v) >= 1 && g.loops_at(v) + val >= 4 {
                out.push(Step::PickGrape { vertex: name.clone() });
            }
            if g.loops_at(v) + 1 + val >= 4 {
                out.push(Step::AttachGrape { vertex: name });
            }
        }
    }
    if c.rich {
        for v in 0..g.stem().len() {
            for class in substem_classes_idx(g, v, None) {
                if class.members.len() >= 3 {
                    for &a in &class.members {
                        out.push(Step::PruneSubstem {
                            vertex: g.stem().name(v).to_string(),
                            attach: g.stem().name(a).to_string(),
                        });
                    }
                }
            }
        }
    }
    out
}

pub fn normal_representative(g: &GrapeBunch) -> Result<(GrapeBunch, ReductionTrace)> {
    require_large(g, "the normal representative")?;
    let mut trace = ReductionTrace::default();
    let mut cur = g.clone();
    // pruning can expose new empty twigs, so rescan until none remain
    loop {
        let next = cur.twig_paths().into_iter().find(|p| {
            let ends = [p[0], *p.last().unwrap()];
            ends.iter().any(|&e| cur.valence_at(e) == 1)
        });
        let Some(path) = next else { break };
        let twig = Twig { path: cur.names_of(&path) };
        let out = prune_empty_twig_unchecked(&cur, &twig)?;
        trace.push(Step::PruneEmptyTwig { twig }, &cur, &out);
        cur = out;
    }
    loop {
        let next = cur.twig_paths().into_iter().find(|p| p.len() >= 3);
        let Some(path) = next else { break };
        let twig = Twig { path: cur.names_of(&path) };
        let out = smooth_twig(&cur, &twig)?;
        trace.push(Step::SmoothTwig { twig }, &cur, &out);
        cur = out;
    }
    Ok((cur, trace))
}

/// Target grape count of the rich representative at `v`.
fn rich_target(g: &GrapeBunch, v: usize) -> u32 {
    if g.stem().degree(v) >= 2 {
        1
    } else {
        g.loops_at(v).min(2)
    }
}

pub fn rich_representative(g: &GrapeBunch) -> Result<(GrapeBunch, ReductionTrace)> {
    require_large_normal(g, "the rich representative")?;
    let mut trace = ReductionTrace::default();
    let mut cur = g.clone();
    for v in 0..g.stem().len() {
        let target = rich_target(g, v);
        let name = g.stem().name(v).to_string();
        while cur.loops_at(v) != target {
            let (step, count) = if cur.loops_at(v) > target {
                (Step::PickGrape { vertex: name.clone() }, cur.loops_at(v) - 1)
            } else {
                (Step::AttachGrape { vertex: name.clone() }, cur.loops_at(v) + 1)
            };
            let out = with_loops(&cur, v, count);
            trace.push(step, &cur, &out);
            cur = out;
        }
    }
    Ok((cur, trace))
}

/// An isometry class of extended components at a vertex.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubstemClass {
    /// Rooted form of the extended component, rooted at the shared vertex.
    pub form: CanonicalForm,
    /// Attach vertices (neighbors of the shared vertex), sorted.
    pub attaches: Vec<String>,
    pub overgrown: bool,
}

pub(crate) struct IdxClass {
    pub form: String,
    pub members: Vec<usize>,
}

pub(crate) fn substem_classes_idx(g: &GrapeBunch, v: usize, exclude: Option<usize>) -> Vec<IdxClass> {
    let mut groups: BTreeMap<String, Vec<usize>> = BTreeMap::new();
    for (a, set) in g.hat_component_sets(v) {
        if exclude.is_some_and(|x| set.binary_search(&x).is_ok()) {
            continue;
        }
        let code = format!("R({}{})", g.loops_at(v), g.rooted_code(a, v));
        groups.entry(code).or_default().push(a);
    }
    groups
        .into_iter()
        .map(|(form, mut members)| {
            members.sort_unstable();
            IdxClass { form, members }
        })
        .collect()
}

pub fn overgrown_substem_classes(
    g: &GrapeBunch,
    v: &str,
    exclude_toward: Option<&str>,
) -> Result<Vec<SubstemClass>> {
    let vi = g.stem().require(v)?;
    let ex = exclude_toward.map(|x| g.stem().require(x)).transpose()?;
    Ok(substem_classes_idx(g, vi, ex)
        .into_iter()
        .map(|c| SubstemClass {
            form: CanonicalForm(c.form),
            overgrown: c.members.len() >= 3,
            attaches: c.members.iter().map(|&a| g.stem().name(a).to_string()).collect(),
        })
        .collect())
}

pub fn prune_overgrown_substems_at(
    g: &GrapeBunch,
    v: &str,
    exclude_toward: Option<&str>,
) -> Result<(GrapeBunch, ReductionTrace)> {
    let classes = overgrown_substem_classes(g, v, exclude_toward)?;
    let mut trace = ReductionTrace::default();
    let mut cur = g.clone();
    for class in classes.iter().filter(|c| c.overgrown) {
        // ids are compared as strings, matching the stored vertex order
        for attach in &class.attaches[2..] {
            let out = prune_substem(&cur, v, attach)?;
            trace.push(Step::PruneSubstem { vertex: v.to_string(), attach: attach.clone() }, &cur, &out);
            cur = out;
        }
    }
    Ok((cur, trace))
}

/// True iff no vertex carries three or more isometric extended components.
pub fn is_quasi_minimal_shape(g: &GrapeBunch) -> bool {
    (0..g.stem().len()).all(|v| substem_classes_idx(g, v, None).iter().all(|c| c.members.len() < 3))
}

pub fn quasi_minimal(g: &GrapeBunch) -> Result<(GrapeBunch, ReductionTrace)> {
    require_large(g, "the quasi-minimal representative")?;
    let (normal, mut trace) = normal_representative(g)?;
    let (rich, t2) = rich_representative(&normal)?;
    trace.extend(t2);
    let (out, t3) = sweep_overgrown_substems(&rich)?;
    trace.extend(t3);
    Ok((out, trace))
}

/// Sweeps spheres around the stem center from the outside in, pruning
/// over-grown substems away from the center.
fn sweep_overgrown_substems(rich: &GrapeBunch) -> Result<(GrapeBunch, ReductionTrace)> {
    let stem = rich.stem();
    let d = stem.diameter();
    let r = d.div_ceil(2);
    let center: Vec<String> = match stem.center() {
        Center::Vertex(c) => vec![stem.name(c).to_string()],
        Center::Edge(a, b) => vec![stem.name(a).to_string(), stem.name(b).to_string()],
    };
    let mut cur = rich.clone();
    let mut trace = ReductionTrace::default();
    for i in (0..r).rev() {
        let dist = center_distances(&cur, &center);
        let level: Vec<String> = (0..cur.stem().len())
            .filter(|&v| dist[v] == i)
            .map(|v| cur.stem().name(v).to_string())
            .collect();
        for name in level {
            // the component holding the center (the other center endpoint when
            // `name` is itself on an edge center) is never pruned
            if cur.stem().index(&name).is_none() {
                continue;
            }
            let toward = toward_center(&name, &center);
            let (out, t) = prune_overgrown_substems_at(&cur, &name, toward.as_deref())?;
            cur = out;
            trace.extend(t);
        }
    }
    Ok((cur, trace))
}

fn center_distances(g: &GrapeBunch, center: &[String]) -> Vec<usize> {
    let mut dist = vec![usize::MAX; g.stem().len()];
    for c in center {
        let ci = g.stem().index(c).expect("center survives pruning");
        for (v, d) in g.stem().distances_from(ci).into_iter().enumerate() {
            dist[v] = dist[v].min(d);
        }
    }
    dist
}

fn toward_center(v: &str, center: &[String]) -> Option<String> {
    match center {
        [c] if c == v => None,
        [a, b] if a == v => Some(b.clone()),
        [a, b] if b == v => Some(a.clone()),
        _ => Some(center[0].clone()),
    }
}

/// Prunes over-grown substems one component at a time in an order chosen by
/// `choose(n)`, which must return an index below `n`, until none remain.
/// Unlike [`quasi_minimal`], any vertex and any class may be used.
pub fn prune_substems_with_schedule(
    rich: &GrapeBunch,
    mut choose: impl FnMut(usize) -> usize,
) -> Result<(GrapeBunch, ReductionTrace)> {
    require_large_rich(rich, "pruning over-grown substems")?;
    let mut cur = rich.clone();
    let mut trace = ReductionTrace::default();
    loop {
        let options: Vec<Step> =
            legal_steps(&cur).into_iter().filter(|s| matches!(s, Step::PruneSubstem { .. })).collect();
        if options.is_empty() {
            break;
        }
        let pick = options[choose(options.len())].clone();
        let out = apply_step_unchecked(&cur, &pick)?;
        trace.push(pick, &cur, &out);
        cur = out;
    }
    Ok((cur, trace))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn star(center: u32, leaves: &[u32]) -> GrapeBunch {
        let names: Vec<String> = (0..leaves.len()).map(|i| format!("l{i}")).collect();
        let edges: Vec<(&str, &str)> = names.iter().map(|n| ("c", n.as_str())).collect();
        let mut loops: Vec<(&str, u32)> = names.iter().map(|n| n.as_str()).zip(leaves.iter().copied()).collect();
        loops.push(("c", center));
        GrapeBunch::from_edges(&edges, &loops).unwrap()
    }

    fn path4() -> GrapeBunch {
        GrapeBunch::from_edges(&[("a", "b"), ("b", "c"), ("c", "d")], &[("a", 2), ("c", 1)]).unwrap()
    }

    #[test]
    fn prune_empty_twig_cases() {
        let out = prune_empty_twig(&path4(), &Twig::new(["c", "d"])).unwrap();
        let expected = GrapeBunch::from_edges(&[("a", "b"), ("b", "c")], &[("a", 2), ("c", 1)]).unwrap();
        assert_eq!(out, expected);

        let edge = GrapeBunch::from_edges(&[("a", "b")], &[("a", 1), ("b", 1)]).unwrap();
        assert!(prune_empty_twig(&edge, &Twig::new(["a", "b"])).is_err());

        let s = star(1, &[1, 1, 0]);
        let out = prune_empty_twig(&s, &Twig::new(["c", "l2"])).unwrap();
        assert_eq!(out, star(1, &[1, 1]));
    }

    #[test]
    fn smooth_twig_cases() {
        let g = GrapeBunch::from_edges(&[("a", "b"), ("b", "c")], &[("a", 2), ("c", 1)]).unwrap();
        let out = smooth_twig(&g, &Twig::new(["a", "b", "c"])).unwrap();
        assert_eq!(out, GrapeBunch::from_edges(&[("a", "c")], &[("a", 2), ("c", 1)]).unwrap());
        assert!(smooth_twig(&out, &Twig::new(["a", "c"])).is_err());

        let long = GrapeBunch::from_edges(&[("a", "b"), ("b", "c"), ("c", "d")], &[("a", 1), ("d", 1)]).unwrap();
        let out = smooth_twig(&long, &Twig::new(["a", "b", "c", "d"])).unwrap();
        assert_eq!(out, GrapeBunch::from_edges(&[("a", "d")], &[("a", 1), ("d", 1)]).unwrap());
    }

    #[test]
    fn normal_representative_cases() {
        let (out, trace) = normal_representative(&path4()).unwrap();
        assert_eq!(out, GrapeBunch::from_edges(&[("a", "c")], &[("a", 2), ("c", 1)]).unwrap());
        assert_eq!(trace.replay(&path4()).unwrap(), out);

        let normal = star(0, &[1, 1, 1]);
        let (out, trace) = normal_representative(&normal).unwrap();
        assert_eq!(out, normal);
        assert!(trace.is_empty());

        let (out, _) = normal_representative(&star(1, &[1, 0, 0])).unwrap();
        assert_eq!(out, GrapeBunch::from_edges(&[("c", "l0")], &[("c", 1), ("l0", 1)]).unwrap());

        let small = GrapeBunch::from_edges(&[], &[("v", 2)]).unwrap();
        assert!(matches!(normal_representative(&small), Err(Error::Precondition(_))));
    }

    #[test]
    fn rich_representative_cases() {
        let (out, trace) = rich_representative(&star(0, &[3, 1, 2])).unwrap();
        assert_eq!(out, star(1, &[2, 1, 2]));
        assert_eq!(trace.replay(&star(0, &[3, 1, 2])).unwrap(), out);
        let edge = GrapeBunch::from_edges(&[("a", "b")], &[("a", 1), ("b", 1)]).unwrap();
        assert_eq!(rich_representative(&edge).unwrap().0, edge);
        let p = GrapeBunch::from_edges(&[("a", "b"), ("b", "c")], &[("a", 5), ("b", 7), ("c", 5)]).unwrap();
        let want = GrapeBunch::from_edges(&[("a", "b"), ("b", "c")], &[("a", 2), ("b", 1), ("c", 2)]).unwrap();
        assert_eq!(rich_representative(&p).unwrap().0, want);
        assert!(rich_representative(&path4()).is_err());
    }

    #[test]
    fn substem_classes() {
        let classes = overgrown_substem_classes(&star(1, &[1, 1, 1, 1]), "c", None).unwrap();
        assert_eq!(classes.len(), 1);
        assert_eq!(classes[0].attaches.len(), 4);
        assert!(classes[0].overgrown);

        let classes = overgrown_substem_classes(&star(1, &[2, 1, 1]), "c", None).unwrap();
        let mut sizes: Vec<usize> = classes.iter().map(|c| c.attaches.len()).collect();
        sizes.sort();
        assert_eq!(sizes, vec![1, 2]);
        assert!(classes.iter().all(|c| !c.overgrown));

        let leaf = overgrown_substem_classes(&star(1, &[1, 1, 1]), "l0", None).unwrap();
        assert_eq!(leaf.len(), 1);
        let excluded = overgrown_substem_classes(&star(1, &[1, 1, 1]), "l0", Some("c")).unwrap();
        assert!(excluded.is_empty());
        assert!(overgrown_substem_classes(&star(1, &[1, 1, 1]), "q", None).is_err());
    }

    #[test]
    fn prune_overgrown_cases() {
        let (out, trace) = prune_overgrown_substems_at(&star(1, &[1, 1, 1, 1]), "c", None).unwrap();
        assert_eq!(out, star(1, &[1, 1]));
        assert_eq!(trace.len(), 2);
        let untouched = star(1, &[2, 1, 1]);
        assert_eq!(prune_overgrown_substems_at(&untouched, "c", None).unwrap().0, untouched);
        let (out, _) = prune_overgrown_substems_at(&star(1, &[1; 5]), "c", None).unwrap();
        assert_eq!(out.stem().len(), 3);
    }

    #[test]
    fn quasi_minimal_cases() {
        let (out, trace) = quasi_minimal(&star(0, &[1, 1, 1, 1])).unwrap();
        assert_eq!(out, star(1, &[1, 1]));
        assert_eq!(trace.replay(&star(0, &[1, 1, 1, 1])).unwrap(), out);

        let (out, _) = quasi_minimal(&star(0, &[2, 1, 1])).unwrap();
        assert_eq!(out, star(1, &[2, 1, 1]));

        let (again, trace) = quasi_minimal(&out).unwrap();
        assert_eq!(again, out);
        assert!(trace.is_empty());
    }

    #[test]
    fn schedule_matches_sweep_on_nested_symmetry() {
        // three copies of a 3-star branch hanging off a center
        let mut edges = Vec::new();
        let mut names = Vec::new();
        for b in 0..3 {
            names.push((format!("m{b}"), format!("x{b}"), format!("y{b}")));
        }
        for (m, x, y) in &names {
            edges.push(("c".to_string(), m.clone()));
            edges.push((m.clone(), x.clone()));
            edges.push((m.clone(), y.clone()));
        }
        let stem = Stem::from_edges(edges).unwrap();
        let loops = stem.names().iter().map(|n| (n.clone(), 1)).collect();
        let g = GrapeBunch::new(stem, &loops).unwrap();
        let (qm, _) = quasi_minimal(&g).unwrap();
        let mut k = 0usize;
        let (alt, _) = prune_substems_with_schedule(&g, |n| {
            k += 1;
            k % n
        })
        .unwrap();
        assert_eq!(qm.canonical_form(), alt.canonical_form());
        assert!(is_quasi_minimal_shape(&qm));
    }
}
