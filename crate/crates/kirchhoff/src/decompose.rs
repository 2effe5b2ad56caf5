//! Prime factorization of arborescence enumerators by digraph
//! decomposition.
//!
//! Two rules drive the pipeline. The SCC rule splits a digraph into one
//! component per strongly connected component, each non-initial one rooted
//! at a fresh auxiliary vertex that sources its external in-edges. The
//! domination rule splits a rooted digraph along its dominator tree: the
//! factor at a vertex `u` is the rooted induced digraph on `u` and its
//! immediately dominated vertices, taken in the running graph where each
//! child already stands for its whole dominated set. Applying
//! SCC → domination → SCC yields components whose enumerators are prime,
//! certified structurally by [`is_prime_component`] — no deeper recursion
//! can split anything further.

use crate::digraph::{Digraph, Edge, VertexId};
use serde_json::{json, Value};
use std::collections::{BTreeSet, HashMap};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DecomposeError {
    #[error("digraph has no arborescence (condensation has {initial} initial components)")]
    NoArborescence { initial: usize },
    #[error("primality is undefined for single-vertex components")]
    TrivialComponent,
    #[error("digraph is not rooted")]
    NotRooted,
}

/// Which decomposition rule produced a factor.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FactorRule {
    SccInitial,
    SccNoninitial,
    Domination,
    Trivial,
}

impl FactorRule {
    pub fn as_str(self) -> &'static str {
        match self {
            FactorRule::SccInitial => "scc_initial",
            FactorRule::SccNoninitial => "scc_noninitial",
            FactorRule::Domination => "domination",
            FactorRule::Trivial => "trivial",
        }
    }
}

#[derive(Clone, Debug)]
pub struct Factor {
    pub digraph: Digraph,
    pub rule: FactorRule,
    pub prime: bool,
    pub root: Option<VertexId>,
}

impl Factor {
    pub fn is_trivial(&self) -> bool {
        self.digraph.vertex_count() == 1
    }
}

/// Result of the full three-stage pipeline.
#[derive(Clone, Debug)]
pub struct Factorization {
    pub source: Digraph,
    pub factors: Vec<Factor>,
}

impl Factorization {
    pub fn nontrivial(&self) -> impl Iterator<Item = &Factor> {
        self.factors.iter().filter(|f| !f.is_trivial())
    }

    /// JSON form: one record per factor with vertex list, edge list, rule
    /// tag, root and prime flag.
    pub fn to_json(&self) -> Value {
        let factors: Vec<Value> = self
            .factors
            .iter()
            .map(|f| {
                let g = &f.digraph;
                json!({
                    "rule": f.rule.as_str(),
                    "prime": f.prime,
                    "root": f.root.map(|r| g.vertex_name(r)),
                    "vertices": g.vertices().iter().map(|&v| g.vertex_name(v)).collect::<Vec<_>>(),
                    "edges": g.edges().iter().map(|e| json!({
                        "id": e.id.0,
                        "source": g.vertex_name(e.src),
                        "target": g.vertex_name(e.dst),
                        "label": e.label.to_json_tree(),
                    })).collect::<Vec<_>>(),
                })
            })
            .collect();
        json!({
            "vertices": self.source.vertex_count(),
            "edges": self.source.edge_count(),
            "factors": factors,
        })
    }
}

/// SCC factorization: one component digraph per strongly connected
/// component — the initial SCC verbatim, every other as its component
/// digraph with an auxiliary root. The product of the components'
/// enumerators equals the enumerator of `g`. Factors are normalized.
///
/// Fails when the condensation does not have exactly one initial component.
pub fn scc_factors(g: &Digraph) -> Result<Vec<Digraph>, DecomposeError> {
    let part = g.scc();
    if part.initial.len() != 1 {
        return Err(DecomposeError::NoArborescence {
            initial: part.initial.len(),
        });
    }
    let init = part.initial[0];
    let mut comps: Vec<Option<Digraph>> = g
        .scc_component_digraphs(&part)
        .into_iter()
        .map(Some)
        .collect();
    let mut order: Vec<usize> = Vec::with_capacity(comps.len());
    order.push(init);
    order.extend((0..comps.len()).filter(|&i| i != init));
    Ok(order
        .into_iter()
        .map(|i| {
            comps[i]
                .take()
                .expect("each component taken once")
                .normalize()
        })
        .collect())
}

/// SCC stage of the pipeline: like [`scc_factors`] but recognizing the
/// trivial split. When the initial SCC is a single vertex and the rest is
/// one SCC, the non-initial component is the whole digraph with its root
/// renamed, so the stage returns `g` itself unchanged instead of renaming.
fn scc_stage(g: &Digraph) -> Result<Vec<(Digraph, Option<FactorRule>)>, DecomposeError> {
    let part = g.scc();
    if part.initial.len() != 1 {
        return Err(DecomposeError::NoArborescence {
            initial: part.initial.len(),
        });
    }
    let init = part.initial[0];
    if part.components.len() == 1 {
        return Ok(vec![(g.clone(), Some(FactorRule::SccInitial))]);
    }
    if part.components.len() == 2 && part.components[init].len() == 1 {
        return Ok(vec![(g.clone(), None)]);
    }
    let mut comps: Vec<Option<Digraph>> = g
        .scc_component_digraphs(&part)
        .into_iter()
        .map(Some)
        .collect();
    let mut out = Vec::with_capacity(comps.len());
    out.push((
        comps[init].take().unwrap().normalize(),
        Some(FactorRule::SccInitial),
    ));
    for c in comps.into_iter().flatten() {
        out.push((c.normalize(), Some(FactorRule::SccNoninitial)));
    }
    Ok(out)
}

/// Domination factorization of a rooted digraph along its dominator tree,
/// emitting one factor per vertex in postorder: the rooted induced digraph
/// on the vertex and its immediately dominated children, in the running
/// graph where every dominated set has been contracted into its head.
/// Returns `[g]` unchanged when `g` is not rooted. Factors are normalized.
///
/// Instead of materializing a shrinking working copy, each edge is routed
/// to its factor directly: an edge `x -> y` belongs to the factor at the
/// dominator-tree LCA of `x` and `y` (in-edges of the factor root are
/// dropped, exactly what rooting removes), with `x` standing for the
/// LCA-child whose subtree contains it. This emits the same factors in the
/// same order with one pass over the edges.
pub fn domination_factors(g: &Digraph) -> Vec<Digraph> {
    let root = match g.root() {
        Some(r) => r,
        None => return vec![g.clone()],
    };
    let tree = g
        .dominator_tree(root)
        .expect("rooted digraph has a dominator tree");
    let depths = tree.depths();
    let mut buckets: HashMap<VertexId, Vec<Edge>> = HashMap::new();
    for e in g.edges() {
        let (mut x, mut y) = (e.src, e.dst);
        let (mut below_x, mut below_y) = (x, y);
        while depths[&x] > depths[&y] {
            below_x = x;
            x = tree.parent(x).unwrap();
        }
        while depths[&y] > depths[&x] {
            below_y = y;
            y = tree.parent(y).unwrap();
        }
        while x != y {
            below_x = x;
            x = tree.parent(x).unwrap();
            below_y = y;
            y = tree.parent(y).unwrap();
        }
        let lca = x;
        if e.dst == lca {
            // an in-edge of the factor root; rooting drops it
            continue;
        }
        debug_assert_eq!(
            below_y, e.dst,
            "in-edges enter dominated regions at their head"
        );
        let src = if e.src == lca { lca } else { below_x };
        buckets.entry(lca).or_default().push(Edge {
            id: e.id,
            src,
            dst: e.dst,
            label: e.label.clone(),
        });
    }
    tree.postorder()
        .into_iter()
        .map(|u| {
            let mut vertices = vec![u];
            vertices.extend_from_slice(tree.children(u));
            let edges = buckets.remove(&u).unwrap_or_default();
            g.subgraph_with(vertices, edges).normalize()
        })
        .collect()
}

/// Single application of the domination rule at vertex `u` of a rooted
/// digraph: the pair (root_u(G[dom(u)]), G(dom(u) -> u)), whose enumerators
/// multiply to the enumerator of `g`.
pub fn domination_split(g: &Digraph, u: VertexId) -> Result<(Digraph, Digraph), DecomposeError> {
    let root = g.root().ok_or(DecomposeError::NotRooted)?;
    let tree = g
        .dominator_tree(root)
        .map_err(|_| DecomposeError::NotRooted)?;
    let dom = tree.dominated_set(u);
    let inner = g
        .induced(&dom)
        .root_at(u)
        .expect("u is a member of its dominated set");
    let dom_set: BTreeSet<VertexId> = dom.into_iter().collect();
    let outer = g
        .contract(&dom_set, u)
        .expect("u is a member of its dominated set")
        .normalize();
    Ok((inner, outer))
}

/// Structural primality of a component with at least two vertices: the
/// enumerator is prime when the digraph is strongly connected, or when it
/// is rooted with a strongly connected remainder and a flat dominator tree
/// (no non-trivial dominators). Every non-trivial factor emitted by
/// [`all_factors`] satisfies one of the two.
pub fn is_prime_component(g: &Digraph) -> Result<bool, DecomposeError> {
    if g.vertex_count() < 2 {
        return Err(DecomposeError::TrivialComponent);
    }
    let part = g.scc();
    if part.components.len() == 1 {
        return Ok(true);
    }
    if let Some(root) = g.root() {
        let rest: Vec<VertexId> = g
            .vertices()
            .iter()
            .copied()
            .filter(|&v| v != root)
            .collect();
        let remainder_connected = g.induced(&rest).scc().components.len() == 1;
        if remainder_connected {
            let tree = g.dominator_tree(root).expect("rooted");
            return Ok(tree.is_flat());
        }
    }
    Ok(false)
}

/// Full three-stage pipeline: SCC factors, domination factors of each,
/// SCC factors of each of those. Every returned factor with two or more
/// vertices is prime (and flagged so); single-vertex factors are retained
/// and tagged trivial. Runs in near-linear total time.
pub fn all_factors(g: &Digraph) -> Result<Factorization, DecomposeError> {
    let mut stage2: Vec<(Digraph, Option<FactorRule>)> = Vec::new();
    for (f, rule) in scc_stage(g)? {
        if f.vertex_count() > 1 && f.root().is_some() {
            stage2.extend(
                domination_factors(&f)
                    .into_iter()
                    .map(|d| (d, Some(FactorRule::Domination))),
            );
        } else {
            stage2.push((f, rule));
        }
    }
    let mut finals: Vec<(Digraph, Option<FactorRule>)> = Vec::new();
    for (f, rule) in stage2 {
        if f.vertex_count() > 1 {
            for (h, stage_rule) in scc_stage(&f).expect("stage-2 factors have arborescences") {
                finals.push((h, stage_rule.or(rule)));
            }
        } else {
            finals.push((f, rule));
        }
    }
    let factors = finals
        .into_iter()
        .map(|(f, rule)| {
            let trivial = f.vertex_count() == 1;
            let prime = if trivial {
                false
            } else {
                let p = is_prime_component(&f).expect("non-trivial factor");
                debug_assert!(p, "pipeline output must be prime");
                p
            };
            let root = f.root();
            Factor {
                rule: if trivial {
                    FactorRule::Trivial
                } else {
                    rule.unwrap_or(FactorRule::SccInitial)
                },
                prime,
                root,
                digraph: f,
            }
        })
        .collect();
    Ok(Factorization {
        source: g.clone(),
        factors,
    })
}
