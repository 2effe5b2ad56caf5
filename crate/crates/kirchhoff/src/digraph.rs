//! Core digraph representation and the graph-structural primitives the
//! decomposition pipeline is built from: normalization, strongly connected
//! components, rooting, dominator trees and contraction.
//!
//! Digraphs are immutable after construction; every operation is a pure
//! function returning a new value, so values can be shared freely across
//! threads. Vertex and edge ids are dense integers assigned at parse time
//! and preserved by all derived digraphs, which keeps labels and identities
//! stable through the pipeline. Auxiliary vertices introduced by component
//! extraction live in a reserved id range above [`AUX_BASE`].

use crate::expr::Expr;
use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::fmt;
use std::sync::Arc;
use thiserror::Error;

/// First id of the reserved auxiliary-vertex range.
pub const AUX_BASE: u32 = 1 << 31;

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct VertexId(pub u32);

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct EdgeId(pub u32);

impl VertexId {
    pub fn is_aux(self) -> bool {
        self.0 >= AUX_BASE
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Edge {
    pub id: EdgeId,
    pub src: VertexId,
    pub dst: VertexId,
    pub label: Expr,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("unknown vertex {0}")]
    UnknownVertex(String),
    #[error("unknown edge id {0}")]
    UnknownEdge(u32),
    #[error("vertex set is not a strongly connected component")]
    NotAnScc,
    #[error("contraction target {0} is not in the contracted set")]
    TargetNotInSet(String),
    #[error("vertex {0} is not reachable from the root")]
    UnreachableVertex(String),
    #[error("edge labels are not plain variables; cannot write edge-list form")]
    CompoundLabels,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParseError {
    #[error("line {line}: expected `source target [label]`, found {found} fields")]
    FieldCount { line: usize, found: usize },
    #[error("line {line}: duplicate edge label {label:?}")]
    DuplicateLabel { line: usize, label: String },
    #[error("input contains no vertices")]
    Empty,
}

/// Directed multigraph over dense vertex ids with expression-valued edge
/// labels. Parallel edges and loops are representable so that intermediate
/// results of contraction can be held; [`Digraph::normalize`] restores the
/// simple-digraph invariants.
#[derive(Clone)]
pub struct Digraph {
    names: Arc<Vec<String>>,
    vertices: Vec<VertexId>,
    edges: Vec<Edge>,
    vindex: HashMap<VertexId, usize>,
    // local endpoint indices per edge, so traversals never hash
    ends: Vec<(u32, u32)>,
    // CSR adjacency: edge positions grouped by local endpoint
    in_off: Vec<u32>,
    in_list: Vec<u32>,
    out_off: Vec<u32>,
    out_list: Vec<u32>,
}

impl PartialEq for Digraph {
    fn eq(&self, other: &Self) -> bool {
        self.vertices == other.vertices && self.edges == other.edges
    }
}
impl Eq for Digraph {}

impl std::hash::Hash for Digraph {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.vertices.hash(state);
        for e in &self.edges {
            (e.id, e.src, e.dst, e.label.node_id()).hash(state);
        }
    }
}

impl fmt::Debug for Digraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "Digraph({} vertices, {} edges)",
            self.vertices.len(),
            self.edges.len()
        )
    }
}

impl Digraph {
    fn from_parts(
        names: Arc<Vec<String>>,
        mut vertices: Vec<VertexId>,
        mut edges: Vec<Edge>,
    ) -> Digraph {
        vertices.sort_unstable();
        vertices.dedup();
        edges.sort_by_key(|e| e.id);
        let vindex: HashMap<VertexId, usize> =
            vertices.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        let n = vertices.len();
        let mut ends = Vec::with_capacity(edges.len());
        let mut in_off = vec![0u32; n + 1];
        let mut out_off = vec![0u32; n + 1];
        for e in &edges {
            debug_assert!(vindex.contains_key(&e.src) && vindex.contains_key(&e.dst));
            let (s, d) = (vindex[&e.src], vindex[&e.dst]);
            ends.push((s as u32, d as u32));
            out_off[s + 1] += 1;
            in_off[d + 1] += 1;
        }
        for i in 0..n {
            out_off[i + 1] += out_off[i];
            in_off[i + 1] += in_off[i];
        }
        let mut out_list = vec![0u32; edges.len()];
        let mut in_list = vec![0u32; edges.len()];
        let mut out_cur = out_off.clone();
        let mut in_cur = in_off.clone();
        for (pos, &(s, d)) in ends.iter().enumerate() {
            out_list[out_cur[s as usize] as usize] = pos as u32;
            out_cur[s as usize] += 1;
            in_list[in_cur[d as usize] as usize] = pos as u32;
            in_cur[d as usize] += 1;
        }
        Digraph {
            names,
            vertices,
            edges,
            vindex,
            ends,
            in_off,
            in_list,
            out_off,
            out_list,
        }
    }

    #[inline]
    fn out_positions(&self, local: usize) -> &[u32] {
        &self.out_list[self.out_off[local] as usize..self.out_off[local + 1] as usize]
    }

    #[inline]
    fn in_positions(&self, local: usize) -> &[u32] {
        &self.in_list[self.in_off[local] as usize..self.in_off[local + 1] as usize]
    }

    fn derive(&self, vertices: Vec<VertexId>, edges: Vec<Edge>) -> Digraph {
        Digraph::from_parts(self.names.clone(), vertices, edges)
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn vertices(&self) -> &[VertexId] {
        &self.vertices
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn contains_vertex(&self, v: VertexId) -> bool {
        self.vindex.contains_key(&v)
    }

    pub fn edge(&self, id: EdgeId) -> Option<&Edge> {
        self.edges.iter().find(|e| e.id == id)
    }

    /// Edges with target `v`, in ascending id order.
    pub fn in_edges(&self, v: VertexId) -> impl Iterator<Item = &Edge> {
        self.in_positions(self.vindex[&v])
            .iter()
            .map(move |&p| &self.edges[p as usize])
    }

    /// Edges with source `v`, in ascending id order.
    pub fn out_edges(&self, v: VertexId) -> impl Iterator<Item = &Edge> {
        self.out_positions(self.vindex[&v])
            .iter()
            .map(move |&p| &self.edges[p as usize])
    }

    pub fn in_degree(&self, v: VertexId) -> usize {
        self.in_positions(self.vindex[&v]).len()
    }

    pub fn vertex_name(&self, v: VertexId) -> String {
        if v.is_aux() {
            format!("_aux{}", v.0 - AUX_BASE)
        } else {
            self.names
                .get(v.0 as usize)
                .cloned()
                .unwrap_or_else(|| format!("v{}", v.0))
        }
    }

    /// Looks a vertex up by its display name.
    pub fn vertex_by_name(&self, name: &str) -> Option<VertexId> {
        self.vertices
            .iter()
            .copied()
            .find(|&v| self.vertex_name(v) == name)
    }

    fn next_aux_id(&self) -> VertexId {
        let n = self.vertices.iter().filter(|v| v.is_aux()).count() as u32;
        VertexId(AUX_BASE + n)
    }
}

// ---------------------------------------------------------------------------
// Parsing and export

impl Digraph {
    /// Parses the line-oriented edge-list format: `source target [label]`,
    /// whitespace separated, `#` starting a comment. Missing labels are
    /// assigned `e<k>` by 1-based edge order. Loops and parallel edges are
    /// accepted; run [`Digraph::normalize`] before using the result.
    pub fn parse_edge_list(text: &str) -> Result<Digraph, ParseError> {
        let mut names: Vec<String> = Vec::new();
        let mut ids: HashMap<String, VertexId> = HashMap::new();
        let mut labels_seen: HashMap<String, usize> = HashMap::new();
        let mut edges: Vec<Edge> = Vec::new();
        let mut vertex_of = |tok: &str, names: &mut Vec<String>| -> VertexId {
            if let Some(&v) = ids.get(tok) {
                return v;
            }
            let v = VertexId(names.len() as u32);
            names.push(tok.to_string());
            ids.insert(tok.to_string(), v);
            v
        };
        for (lineno, raw) in text.lines().enumerate() {
            let line = match raw.find('#') {
                Some(i) => &raw[..i],
                None => raw,
            };
            let fields: Vec<&str> = line.split_whitespace().collect();
            match fields.len() {
                0 => continue,
                2 | 3 => {
                    let src = vertex_of(fields[0], &mut names);
                    let dst = vertex_of(fields[1], &mut names);
                    let label = match fields.get(2) {
                        Some(l) => l.to_string(),
                        None => format!("e{}", edges.len() + 1),
                    };
                    if labels_seen.insert(label.clone(), lineno + 1).is_some() {
                        return Err(ParseError::DuplicateLabel {
                            line: lineno + 1,
                            label,
                        });
                    }
                    edges.push(Edge {
                        id: EdgeId(edges.len() as u32),
                        src,
                        dst,
                        label: Expr::var(&label),
                    });
                }
                n => {
                    return Err(ParseError::FieldCount {
                        line: lineno + 1,
                        found: n,
                    })
                }
            }
        }
        if names.is_empty() {
            return Err(ParseError::Empty);
        }
        let vertices: Vec<VertexId> = (0..names.len() as u32).map(VertexId).collect();
        Ok(Digraph::from_parts(Arc::new(names), vertices, edges))
    }

    /// Writes the edge-list form. Fails when some label is not a plain
    /// variable (e.g. after parallel edges were merged).
    pub fn to_edge_list(&self) -> Result<String, GraphError> {
        let mut out = String::new();
        for e in &self.edges {
            let sym = e.label.var_symbol().ok_or(GraphError::CompoundLabels)?;
            out.push_str(&format!(
                "{} {} {}\n",
                self.vertex_name(e.src),
                self.vertex_name(e.dst),
                sym.name()
            ));
        }
        Ok(out)
    }

    /// GraphViz form of the digraph, for inspection.
    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph G {\n");
        for &v in &self.vertices {
            out.push_str(&format!("  \"{}\";\n", self.vertex_name(v)));
        }
        for e in &self.edges {
            out.push_str(&format!(
                "  \"{}\" -> \"{}\" [label=\"{}\"];\n",
                self.vertex_name(e.src),
                self.vertex_name(e.dst),
                e.label.pretty()
            ));
        }
        out.push_str("}\n");
        out
    }
}

// ---------------------------------------------------------------------------
// Builder

/// Incremental construction with string names; used by generators and tests.
#[derive(Default)]
pub struct DigraphBuilder {
    names: Vec<String>,
    ids: HashMap<String, VertexId>,
    edges: Vec<(VertexId, VertexId, Expr)>,
}

impl DigraphBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn vertex(&mut self, name: &str) -> VertexId {
        if let Some(&v) = self.ids.get(name) {
            return v;
        }
        let v = VertexId(self.names.len() as u32);
        self.names.push(name.to_string());
        self.ids.insert(name.to_string(), v);
        v
    }

    pub fn edge(&mut self, src: &str, dst: &str, label: &str) -> EdgeId {
        let s = self.vertex(src);
        let d = self.vertex(dst);
        self.edges.push((s, d, Expr::var(label)));
        EdgeId(self.edges.len() as u32 - 1)
    }

    pub fn edge_expr(&mut self, src: VertexId, dst: VertexId, label: Expr) -> EdgeId {
        self.edges.push((src, dst, label));
        EdgeId(self.edges.len() as u32 - 1)
    }

    pub fn build(self) -> Digraph {
        let vertices: Vec<VertexId> = (0..self.names.len() as u32).map(VertexId).collect();
        let edges = self
            .edges
            .into_iter()
            .enumerate()
            .map(|(i, (src, dst, label))| Edge {
                id: EdgeId(i as u32),
                src,
                dst,
                label,
            })
            .collect();
        Digraph::from_parts(Arc::new(self.names), vertices, edges)
    }
}

// ---------------------------------------------------------------------------
// Normalization

impl Digraph {
    /// Removes loops and merges each parallel bundle into a single edge
    /// labeled with the sum of the bundle's labels (ordered by edge id).
    /// Preserves the enumerator. Idempotent.
    pub fn normalize(&self) -> Digraph {
        let mut bundles: BTreeMap<(VertexId, VertexId), Vec<&Edge>> = BTreeMap::new();
        for e in &self.edges {
            if e.src == e.dst {
                continue;
            }
            bundles.entry((e.src, e.dst)).or_default().push(e);
        }
        let mut edges: Vec<Edge> = Vec::with_capacity(bundles.len());
        for ((src, dst), bundle) in bundles {
            if bundle.len() == 1 {
                edges.push(bundle[0].clone());
            } else {
                let label = Expr::sum(bundle.iter().map(|e| e.label.clone()).collect());
                edges.push(Edge {
                    id: bundle[0].id,
                    src,
                    dst,
                    label,
                });
            }
        }
        self.derive(self.vertices.clone(), edges)
    }

    pub fn is_normalized(&self) -> bool {
        let mut seen = HashSet::new();
        self.edges
            .iter()
            .all(|e| e.src != e.dst && seen.insert((e.src, e.dst)))
    }
}

// ---------------------------------------------------------------------------
// Strongly connected components

/// SCC partition of a digraph together with its condensation.
#[derive(Clone, Debug)]
pub struct SccPartition {
    /// Vertex sets, each sorted; components ordered by minimum vertex id.
    pub components: Vec<Vec<VertexId>>,
    pub component_of: HashMap<VertexId, usize>,
    /// Condensation adjacency: edges between component indices, deduplicated.
    pub condensation: Vec<Vec<usize>>,
    /// Indices of components with no incoming condensation edge.
    pub initial: Vec<usize>,
    // component index per local vertex position of the source digraph
    by_local: Vec<usize>,
}

impl Digraph {
    /// Tarjan's algorithm, iterative. Linear in |V|+|E|.
    pub fn scc(&self) -> SccPartition {
        let n = self.vertices.len();
        let mut index: Vec<Option<u32>> = vec![None; n];
        let mut low: Vec<u32> = vec![0; n];
        let mut on_stack: Vec<bool> = vec![false; n];
        let mut stack: Vec<usize> = Vec::new();
        let mut comps: Vec<Vec<VertexId>> = Vec::new();
        let mut counter: u32 = 0;

        // (local vertex, position in its out list)
        let mut call: Vec<(usize, usize)> = Vec::new();
        for start in 0..n {
            if index[start].is_some() {
                continue;
            }
            call.push((start, 0));
            index[start] = Some(counter);
            low[start] = counter;
            counter += 1;
            stack.push(start);
            on_stack[start] = true;
            while let Some(&mut (v, ref mut pos)) = call.last_mut() {
                let outs = self.out_positions(v);
                if *pos < outs.len() {
                    let epos = outs[*pos] as usize;
                    *pos += 1;
                    let w = self.ends[epos].1 as usize;
                    match index[w] {
                        None => {
                            index[w] = Some(counter);
                            low[w] = counter;
                            counter += 1;
                            stack.push(w);
                            on_stack[w] = true;
                            call.push((w, 0));
                        }
                        Some(wi) => {
                            if on_stack[w] {
                                low[v] = low[v].min(wi);
                            }
                        }
                    }
                } else {
                    call.pop();
                    if low[v] == index[v].unwrap() {
                        let mut comp = Vec::new();
                        loop {
                            let w = stack.pop().expect("tarjan stack underflow");
                            on_stack[w] = false;
                            comp.push(self.vertices[w]);
                            if w == v {
                                break;
                            }
                        }
                        comp.sort_unstable();
                        comps.push(comp);
                    }
                    if let Some(&(p, _)) = call.last() {
                        low[p] = low[p].min(low[v]);
                    }
                }
            }
        }

        comps.sort_by_key(|c| c[0]);
        let mut component_of = HashMap::new();
        let mut by_local = vec![0usize; n];
        for (i, c) in comps.iter().enumerate() {
            for &v in c {
                component_of.insert(v, i);
                by_local[self.vindex[&v]] = i;
            }
        }
        let mut cond: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); comps.len()];
        let mut indeg = vec![false; comps.len()];
        for &(s, d) in &self.ends {
            let (a, b) = (by_local[s as usize], by_local[d as usize]);
            if a != b {
                cond[a].insert(b);
                indeg[b] = true;
            }
        }
        let condensation: Vec<Vec<usize>> =
            cond.into_iter().map(|s| s.into_iter().collect()).collect();
        let initial = (0..comps.len()).filter(|&i| !indeg[i]).collect();
        SccPartition {
            components: comps,
            component_of,
            condensation,
            initial,
            by_local,
        }
    }

    /// True iff the condensation has exactly one initial component — the
    /// necessary and sufficient condition for a spanning arborescence.
    pub fn has_arborescence(&self) -> bool {
        !self.vertices.is_empty() && self.scc().initial.len() == 1
    }
}

// ---------------------------------------------------------------------------
// Component extraction, rooting

impl Digraph {
    /// Digraph on the given vertices and explicit edge list, sharing this
    /// digraph's name table. Endpoints must lie inside `vertices`.
    pub fn subgraph_with(&self, vertices: Vec<VertexId>, edges: Vec<Edge>) -> Digraph {
        self.derive(vertices, edges)
    }

    /// Induced subgraph on `vs`.
    pub fn induced(&self, vs: &[VertexId]) -> Digraph {
        let set: BTreeSet<VertexId> = vs.iter().copied().collect();
        let edges = self
            .edges
            .iter()
            .filter(|e| set.contains(&e.src) && set.contains(&e.dst))
            .cloned()
            .collect();
        self.derive(set.into_iter().collect(), edges)
    }

    /// Component digraph of the SCC `vs`: the induced subgraph itself when
    /// `vs` is the initial SCC, otherwise the induced subgraph plus an
    /// auxiliary vertex sourcing every external in-edge with its original
    /// label and id. Rejects vertex sets that are not an SCC of `self`.
    pub fn comp(&self, vs: &[VertexId]) -> Result<Digraph, GraphError> {
        let part = self.scc();
        let set: BTreeSet<VertexId> = vs.iter().copied().collect();
        let idx = vs
            .first()
            .and_then(|v| part.component_of.get(v).copied())
            .ok_or(GraphError::NotAnScc)?;
        let comp_set: BTreeSet<VertexId> = part.components[idx].iter().copied().collect();
        if comp_set != set {
            return Err(GraphError::NotAnScc);
        }
        if part.initial.contains(&idx) {
            return Ok(self.induced(vs));
        }
        let aux = self.next_aux_id();
        let mut vertices: Vec<VertexId> = set.iter().copied().collect();
        vertices.push(aux);
        let mut edges = Vec::new();
        for e in &self.edges {
            let src_in = set.contains(&e.src);
            let dst_in = set.contains(&e.dst);
            if src_in && dst_in {
                edges.push(e.clone());
            } else if !src_in && dst_in {
                edges.push(Edge {
                    id: e.id,
                    src: aux,
                    dst: e.dst,
                    label: e.label.clone(),
                });
            }
        }
        Ok(self.derive(vertices, edges))
    }

    /// All component digraphs of an SCC partition in one pass over the
    /// edges, aligned with `part.components`: initial components verbatim,
    /// the others with their auxiliary root. Equivalent to calling
    /// [`Digraph::comp`] per component but linear overall.
    pub fn scc_component_digraphs(&self, part: &SccPartition) -> Vec<Digraph> {
        let aux = self.next_aux_id();
        let k = part.components.len();
        let mut initial = vec![false; k];
        for &i in &part.initial {
            initial[i] = true;
        }
        let mut sizes = vec![0usize; k];
        for &(_, d) in &self.ends {
            sizes[part.by_local[d as usize]] += 1;
        }
        let mut buckets: Vec<Vec<Edge>> = sizes.into_iter().map(Vec::with_capacity).collect();
        for (e, &(s, d)) in self.edges.iter().zip(&self.ends) {
            let cd = part.by_local[d as usize];
            if part.by_local[s as usize] == cd {
                buckets[cd].push(e.clone());
            } else {
                buckets[cd].push(Edge {
                    id: e.id,
                    src: aux,
                    dst: e.dst,
                    label: e.label.clone(),
                });
            }
        }
        (0..k)
            .map(|i| {
                let mut vertices = part.components[i].clone();
                if !initial[i] {
                    vertices.push(aux);
                }
                self.derive(vertices, std::mem::take(&mut buckets[i]))
            })
            .collect()
    }

    /// Removes all edges incoming to `v`; every arborescence of the result
    /// is rooted at `v`.
    pub fn root_at(&self, v: VertexId) -> Result<Digraph, GraphError> {
        if !self.contains_vertex(v) {
            return Err(GraphError::UnknownVertex(self.vertex_name(v)));
        }
        let edges = self.edges.iter().filter(|e| e.dst != v).cloned().collect();
        Ok(self.derive(self.vertices.clone(), edges))
    }

    /// The unique root — a vertex with no incoming edges that reaches every
    /// other vertex — if one exists.
    pub fn root(&self) -> Option<VertexId> {
        for (i, &v) in self.vertices.iter().enumerate() {
            if !self.in_positions(i).is_empty() {
                continue;
            }
            if self.reach_count(v) == self.vertices.len() {
                return Some(v);
            }
        }
        None
    }

    fn reach_count(&self, start: VertexId) -> usize {
        let mut seen = vec![false; self.vertices.len()];
        let mut stack = vec![self.vindex[&start]];
        seen[self.vindex[&start]] = true;
        let mut count = 0;
        while let Some(v) = stack.pop() {
            count += 1;
            for &epos in self.out_positions(v) {
                let w = self.ends[epos as usize].1 as usize;
                if !seen[w] {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
        count
    }
}

// ---------------------------------------------------------------------------
// Dominator tree

/// Immediate-dominator tree of a rooted digraph.
#[derive(Clone, Debug)]
pub struct DominatorTree {
    root: VertexId,
    parent: HashMap<VertexId, VertexId>,
    children: BTreeMap<VertexId, Vec<VertexId>>,
}

impl DominatorTree {
    pub fn root(&self) -> VertexId {
        self.root
    }

    /// Immediate dominator of `v`; `None` for the root.
    pub fn parent(&self, v: VertexId) -> Option<VertexId> {
        self.parent.get(&v).copied()
    }

    /// Immediately dominated vertices, ascending.
    pub fn children(&self, v: VertexId) -> &[VertexId] {
        self.children.get(&v).map(Vec::as_slice).unwrap_or(&[])
    }

    /// All tree vertices in postorder (children before parents, ascending
    /// sibling order); the root comes last.
    pub fn postorder(&self) -> Vec<VertexId> {
        let mut out = Vec::with_capacity(self.parent.len() + 1);
        // (vertex, expanded?)
        let mut stack = vec![(self.root, false)];
        while let Some((v, expanded)) = stack.pop() {
            if expanded {
                out.push(v);
            } else {
                stack.push((v, true));
                for &c in self.children(v).iter().rev() {
                    stack.push((c, false));
                }
            }
        }
        out
    }

    /// The set of vertices dominated by `u` (its subtree, including `u`),
    /// sorted ascending.
    pub fn dominated_set(&self, u: VertexId) -> Vec<VertexId> {
        let mut out = vec![u];
        let mut stack = vec![u];
        while let Some(v) = stack.pop() {
            for &c in self.children(v) {
                out.push(c);
                stack.push(c);
            }
        }
        out.sort_unstable();
        out
    }

    /// True when no vertex other than the root dominates anything beyond
    /// itself.
    pub fn is_flat(&self) -> bool {
        self.parent.values().all(|&p| p == self.root)
    }

    /// Number of ordered pairs (u, w) where u non-trivially dominates w.
    pub fn nontrivial_dominator_pairs(&self) -> usize {
        let mut sizes: HashMap<VertexId, usize> = HashMap::new();
        for v in self.postorder() {
            let s = 1 + self.children(v).iter().map(|c| sizes[c]).sum::<usize>();
            sizes.insert(v, s);
        }
        self.parent.keys().map(|&u| sizes[&u] - 1).sum()
    }

    /// Depths keyed by vertex; the root has depth 0.
    pub fn depths(&self) -> HashMap<VertexId, u32> {
        let mut d = HashMap::new();
        d.insert(self.root, 0);
        let mut stack = vec![self.root];
        while let Some(v) = stack.pop() {
            let dv = d[&v];
            for &c in self.children(v) {
                d.insert(c, dv + 1);
                stack.push(c);
            }
        }
        d
    }
}

const UNSET: u32 = u32::MAX;

impl Digraph {
    /// Immediate-dominator tree from `root` by the classical semidominator
    /// algorithm with path compression; near-linear in |V|+|E|.
    /// Fails if some vertex is unreachable from `root`.
    pub fn dominator_tree(&self, root: VertexId) -> Result<DominatorTree, GraphError> {
        if !self.contains_vertex(root) {
            return Err(GraphError::UnknownVertex(self.vertex_name(root)));
        }
        let n = self.vertices.len();
        let root_local = self.vindex[&root];

        // DFS preorder numbering; vertex[i] is the local vertex with dfn i.
        let mut dfn: Vec<u32> = vec![UNSET; n];
        let mut order: Vec<usize> = Vec::with_capacity(n);
        let mut dfs_parent: Vec<u32> = vec![UNSET; n]; // by dfn
        {
            let mut stack: Vec<(usize, usize)> = vec![(root_local, 0)];
            dfn[root_local] = 0;
            order.push(root_local);
            while let Some(&mut (v, ref mut pos)) = stack.last_mut() {
                let outs = self.out_positions(v);
                if *pos < outs.len() {
                    let epos = outs[*pos] as usize;
                    *pos += 1;
                    let w = self.ends[epos].1 as usize;
                    if dfn[w] == UNSET {
                        dfn[w] = order.len() as u32;
                        dfs_parent[order.len()] = dfn[v];
                        order.push(w);
                        stack.push((w, 0));
                    }
                } else {
                    stack.pop();
                }
            }
        }
        if order.len() != n {
            let missing = self
                .vertices
                .iter()
                .find(|v| dfn[self.vindex[v]] == UNSET)
                .unwrap();
            return Err(GraphError::UnreachableVertex(self.vertex_name(*missing)));
        }

        // Everything below runs in dfn space.
        let mut semi: Vec<u32> = (0..n as u32).collect();
        let mut idom: Vec<u32> = vec![UNSET; n];
        let mut bucket: Vec<Vec<u32>> = vec![Vec::new(); n];
        let mut ancestor: Vec<u32> = vec![UNSET; n];
        let mut label: Vec<u32> = (0..n as u32).collect();

        // Iterative path compression over the link forest.
        fn eval(v: u32, ancestor: &mut [u32], label: &mut [u32], semi: &[u32]) -> u32 {
            if ancestor[v as usize] == UNSET {
                return v;
            }
            let mut path = Vec::new();
            let mut x = v;
            while ancestor[x as usize] != UNSET && ancestor[ancestor[x as usize] as usize] != UNSET
            {
                path.push(x);
                x = ancestor[x as usize];
            }
            for &y in path.iter().rev() {
                let a = ancestor[y as usize];
                if semi[label[a as usize] as usize] < semi[label[y as usize] as usize] {
                    label[y as usize] = label[a as usize];
                }
                ancestor[y as usize] = ancestor[a as usize];
            }
            label[v as usize]
        }

        for w in (1..n as u32).rev() {
            let wv = order[w as usize];
            for &epos in self.in_positions(wv) {
                let v = dfn[self.ends[epos as usize].0 as usize];
                let u = eval(v, &mut ancestor, &mut label, &semi);
                if semi[u as usize] < semi[w as usize] {
                    semi[w as usize] = semi[u as usize];
                }
            }
            let p = dfs_parent[w as usize];
            bucket[semi[w as usize] as usize].push(w);
            ancestor[w as usize] = p;
            for v in std::mem::take(&mut bucket[p as usize]) {
                let u = eval(v, &mut ancestor, &mut label, &semi);
                idom[v as usize] = if semi[u as usize] < semi[v as usize] {
                    u
                } else {
                    p
                };
            }
        }
        for w in 1..n as u32 {
            if idom[w as usize] != semi[w as usize] {
                idom[w as usize] = idom[idom[w as usize] as usize];
            }
        }

        let mut parent = HashMap::new();
        let mut children: BTreeMap<VertexId, Vec<VertexId>> = BTreeMap::new();
        for w in 1..n {
            let child = self.vertices[order[w]];
            let dom = self.vertices[order[idom[w] as usize]];
            parent.insert(child, dom);
            children.entry(dom).or_default().push(child);
        }
        for c in children.values_mut() {
            c.sort_unstable();
        }
        Ok(DominatorTree {
            root,
            parent,
            children,
        })
    }
}

// ---------------------------------------------------------------------------
// Contraction, deletion

impl Digraph {
    /// Contraction of `s` into `u`: external edges into `s \ {u}` and all
    /// edges inside `s` are removed, then `s` merges into `u`. Surviving
    /// edges keep their ids and labels; parallel out-edges may result, so
    /// re-normalize before reuse.
    pub fn contract(&self, s: &BTreeSet<VertexId>, u: VertexId) -> Result<Digraph, GraphError> {
        if !s.contains(&u) {
            return Err(GraphError::TargetNotInSet(self.vertex_name(u)));
        }
        for &v in s {
            if !self.contains_vertex(v) {
                return Err(GraphError::UnknownVertex(self.vertex_name(v)));
            }
        }
        let vertices: Vec<VertexId> = self
            .vertices
            .iter()
            .copied()
            .filter(|v| !s.contains(v) || *v == u)
            .collect();
        let mut edges = Vec::new();
        for e in &self.edges {
            let src_in = s.contains(&e.src);
            let dst_in = s.contains(&e.dst);
            if src_in && dst_in {
                continue;
            }
            if !src_in && dst_in && e.dst != u {
                continue;
            }
            if src_in {
                edges.push(Edge {
                    id: e.id,
                    src: u,
                    dst: e.dst,
                    label: e.label.clone(),
                });
            } else {
                edges.push(e.clone());
            }
        }
        Ok(self.derive(vertices, edges))
    }

    pub fn delete_edge(&self, id: EdgeId) -> Result<Digraph, GraphError> {
        if self.edge(id).is_none() {
            return Err(GraphError::UnknownEdge(id.0));
        }
        let edges = self.edges.iter().filter(|e| e.id != id).cloned().collect();
        Ok(self.derive(self.vertices.clone(), edges))
    }

    /// Deletion-contraction partner of [`Digraph::delete_edge`]: contracts
    /// the edge's endpoints into its source and re-normalizes.
    pub fn contract_edge(&self, id: EdgeId) -> Result<Digraph, GraphError> {
        let e = self.edge(id).ok_or(GraphError::UnknownEdge(id.0))?;
        let s: BTreeSet<VertexId> = [e.src, e.dst].into_iter().collect();
        Ok(self.contract(&s, e.src)?.normalize())
    }

    /// Reverses every edge, preserving ids and labels. In-arborescences of
    /// the original are exactly the arborescences of the transpose.
    pub fn transpose(&self) -> Digraph {
        let edges = self
            .edges
            .iter()
            .map(|e| Edge {
                id: e.id,
                src: e.dst,
                dst: e.src,
                label: e.label.clone(),
            })
            .collect();
        self.derive(self.vertices.clone(), edges)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::Expr;

    fn labels(g: &Digraph) -> Vec<String> {
        g.edges().iter().map(|e| e.label.pretty()).collect()
    }

    #[test]
    fn parse_basic() {
        let g =
            Digraph::parse_edge_list("r a o\na b w # tail comment\n# full comment\nb c\n").unwrap();
        assert_eq!(g.vertex_count(), 4);
        assert_eq!(g.edge_count(), 3);
        assert_eq!(labels(&g), vec!["o", "w", "e3"]);
    }

    #[test]
    fn parse_errors() {
        assert!(matches!(
            Digraph::parse_edge_list(""),
            Err(ParseError::Empty)
        ));
        assert!(matches!(
            Digraph::parse_edge_list("a\n"),
            Err(ParseError::FieldCount { line: 1, found: 1 })
        ));
        assert!(matches!(
            Digraph::parse_edge_list("a b x\nc d x\n"),
            Err(ParseError::DuplicateLabel { line: 2, .. })
        ));
    }

    #[test]
    fn normalize_removes_loops() {
        let g = Digraph::parse_edge_list("v v l\n").unwrap();
        let n = g.normalize();
        assert_eq!(n.vertex_count(), 1);
        assert_eq!(n.edge_count(), 0);
    }

    #[test]
    fn scc_partition_properties() {
        use crate::testutil::random_digraph;
        for seed in 0..80u64 {
            let n = 2 + (seed % 6) as usize;
            let g = random_digraph(n, 0.35, 130_000 + seed);
            let part = g.scc();
            // components partition V
            let mut all: Vec<VertexId> = part.components.iter().flatten().copied().collect();
            all.sort_unstable();
            assert_eq!(all, g.vertices());
            assert!(!part.initial.is_empty());
            // every cross edge induces a condensation edge
            for e in g.edges() {
                let (a, b) = (part.component_of[&e.src], part.component_of[&e.dst]);
                if a != b {
                    assert!(part.condensation[a].contains(&b), "seed {seed}");
                }
            }
            // condensation is acyclic: Kahn peeling consumes everything
            let k = part.components.len();
            let mut indeg = vec![0usize; k];
            for outs in &part.condensation {
                for &b in outs {
                    indeg[b] += 1;
                }
            }
            let mut queue: Vec<usize> = (0..k).filter(|&i| indeg[i] == 0).collect();
            let mut seen = 0;
            while let Some(i) = queue.pop() {
                seen += 1;
                for &b in &part.condensation[i] {
                    indeg[b] -= 1;
                    if indeg[b] == 0 {
                        queue.push(b);
                    }
                }
            }
            assert_eq!(seen, k, "seed {seed}: condensation has a cycle");
        }
    }

    #[test]
    fn normalize_merges_parallels() {
        let g = Digraph::parse_edge_list("u v a\nu v b\n").unwrap();
        let n = g.normalize();
        assert_eq!(n.edge_count(), 1);
        let e = &n.edges()[0];
        assert_eq!(e.id, EdgeId(0));
        assert_eq!(e.label, Expr::sum(vec![Expr::var("a"), Expr::var("b")]));
    }

    #[test]
    fn normalize_identity_and_idempotence() {
        let g = Digraph::parse_edge_list("r a x\na b y\nb a z\n").unwrap();
        let n = g.normalize();
        assert_eq!(n, g);
        let loopy = Digraph::parse_edge_list("u v a\nu v b\nv v c\nv u d\n").unwrap();
        let once = loopy.normalize();
        assert_eq!(once.normalize(), once);
        assert!(once.is_normalized());
    }

    #[test]
    fn scc_cycle_and_path() {
        let c3 = Digraph::parse_edge_list("v1 v2 e1\nv2 v3 e2\nv3 v1 e3\n").unwrap();
        let p = c3.scc();
        assert_eq!(p.components.len(), 1);
        assert_eq!(p.components[0].len(), 3);
        assert_eq!(p.initial, vec![0]);

        let path = Digraph::parse_edge_list("r a x\na b y\n").unwrap();
        let p = path.scc();
        assert_eq!(p.components.len(), 3);
        assert_eq!(p.initial.len(), 1);
        assert_eq!(p.components[p.initial[0]], vec![VertexId(0)]);
        // condensation is a DAG: topological order must exist
        let mut indeg = vec![0; p.components.len()];
        for (a, outs) in p.condensation.iter().enumerate() {
            for &b in outs {
                assert_ne!(a, b);
                indeg[b] += 1;
            }
        }
        assert!(indeg.contains(&0));
    }

    #[test]
    fn has_arborescence_examples() {
        let path = Digraph::parse_edge_list("r a x\na b y\n").unwrap();
        assert!(path.has_arborescence());
        let two_cycles = Digraph::parse_edge_list("a b 1\nb a 2\nc d 3\nd c 4\n").unwrap();
        assert!(!two_cycles.has_arborescence());
        // two disjoint 3-cycles: two initial components, oracle finds nothing
        let split = Digraph::parse_edge_list("a b 1\nb c 2\nc a 3\nd e 4\ne f 5\nf d 6\n").unwrap();
        assert!(!split.has_arborescence());
        assert!(crate::oracle::enumerate(&split).unwrap().is_empty());
    }

    #[test]
    fn comp_initial_and_noninitial() {
        let g = Digraph::parse_edge_list("r a o\n").unwrap();
        let r = VertexId(0);
        let init = g.comp(&[r]).unwrap();
        assert_eq!(init.vertex_count(), 1);
        assert_eq!(init.edge_count(), 0);

        // non-initial 2-cycle {b,c} entered by one external edge
        let g = Digraph::parse_edge_list("a b w\nb c x1\nc b x2\n").unwrap();
        let b = g.vertex_by_name("b").unwrap();
        let c = g.vertex_by_name("c").unwrap();
        let comp = g.comp(&[b, c]).unwrap();
        assert_eq!(comp.vertex_count(), 3);
        assert_eq!(comp.edge_count(), 3);
        let aux = comp
            .vertices()
            .iter()
            .copied()
            .find(|v| v.is_aux())
            .unwrap();
        let entry: Vec<_> = comp.out_edges(aux).collect();
        assert_eq!(entry.len(), 1);
        assert_eq!(entry[0].dst, b);
        assert_eq!(entry[0].label.pretty(), "w");
        // label identity preserved: same node
        assert_eq!(entry[0].label, g.edges()[0].label);
    }

    #[test]
    fn comp_two_external_edges() {
        // external edges into both cycle vertices: the component digraph
        // enumerates w1 w2 + w1 x1 + w2 x2
        let g = Digraph::parse_edge_list("a b w1\na c w2\nb c x1\nc b x2\n").unwrap();
        let b = g.vertex_by_name("b").unwrap();
        let c = g.vertex_by_name("c").unwrap();
        let comp = g.comp(&[b, c]).unwrap();
        assert_eq!(comp.vertex_count(), 3);
        assert_eq!(comp.edge_count(), 4);
        let arbs = crate::oracle::enumerate(&comp).unwrap();
        let kappa = crate::oracle::kappa_expr(&comp, &arbs).unwrap();
        let expanded = kappa.expand().unwrap();
        assert_eq!(expanded.len(), 3);
        let mono = |names: [&str; 2]| {
            let mut v: Vec<crate::expr::Symbol> = names
                .iter()
                .map(|n| crate::expr::Symbol::intern(n))
                .collect();
            v.sort();
            v
        };
        assert!(expanded.coeff(&mono(["w1", "w2"])).is_some());
        assert!(expanded.coeff(&mono(["w1", "x1"])).is_some());
        assert!(expanded.coeff(&mono(["w2", "x2"])).is_some());
    }

    #[test]
    fn values_are_shareable_across_threads() {
        fn assert_send_sync<T: Send + Sync>() {}
        assert_send_sync::<Digraph>();
        assert_send_sync::<crate::expr::Expr>();
        assert_send_sync::<DominatorTree>();
        assert_send_sync::<SccPartition>();
    }

    #[test]
    fn comp_rejects_non_scc() {
        let g = Digraph::parse_edge_list("a b w\nb c x1\nc b x2\n").unwrap();
        let a = g.vertex_by_name("a").unwrap();
        let b = g.vertex_by_name("b").unwrap();
        assert_eq!(g.comp(&[a, b]), Err(GraphError::NotAnScc));
    }

    #[test]
    fn root_at_examples() {
        let two = Digraph::parse_edge_list("u v a\nv u b\n").unwrap();
        let u = two.vertex_by_name("u").unwrap();
        let rooted = two.root_at(u).unwrap();
        assert_eq!(rooted.edge_count(), 1);
        assert_eq!(rooted.edges()[0].label.pretty(), "a");

        let path = Digraph::parse_edge_list("r a x\na b y\n").unwrap();
        let r = path.vertex_by_name("r").unwrap();
        assert_eq!(path.root_at(r).unwrap(), path);

        let c3 = Digraph::parse_edge_list("v1 v2 e1\nv2 v3 e2\nv3 v1 e3\n").unwrap();
        let v1 = c3.vertex_by_name("v1").unwrap();
        let rooted = c3.root_at(v1).unwrap();
        assert_eq!(rooted.edge_count(), 2);
        assert_eq!(labels(&rooted), vec!["e1", "e2"]);
    }

    #[test]
    fn root_detection() {
        let path = Digraph::parse_edge_list("r a x\na b y\n").unwrap();
        assert_eq!(path.root(), Some(VertexId(0)));
        let two = Digraph::parse_edge_list("u v a\nv u b\n").unwrap();
        assert_eq!(two.root(), None);
        let dangling = Digraph::parse_edge_list("r a x\nb b l\n")
            .unwrap()
            .normalize();
        assert_eq!(dangling.root(), None);
    }

    #[test]
    fn dominator_chain_and_diamond() {
        let path = Digraph::parse_edge_list("r a x\na b y\n").unwrap();
        let t = path.dominator_tree(VertexId(0)).unwrap();
        assert_eq!(
            t.parent(path.vertex_by_name("a").unwrap()),
            Some(VertexId(0))
        );
        assert_eq!(
            t.parent(path.vertex_by_name("b").unwrap()),
            Some(path.vertex_by_name("a").unwrap())
        );

        let diamond = Digraph::parse_edge_list("r a 1\nr b 2\na c 3\nb c 4\n").unwrap();
        let r = diamond.vertex_by_name("r").unwrap();
        let t = diamond.dominator_tree(r).unwrap();
        for v in ["a", "b", "c"] {
            assert_eq!(t.parent(diamond.vertex_by_name(v).unwrap()), Some(r));
        }
        assert!(t.is_flat());
    }

    #[test]
    fn dominator_two_paths_into_cycle() {
        // r->a, r->b, a<->b: both a and b immediately dominated by r
        let g = Digraph::parse_edge_list("r a 1\nr b 2\na b 3\nb a 4\n").unwrap();
        let r = g.vertex_by_name("r").unwrap();
        let t = g.dominator_tree(r).unwrap();
        assert_eq!(t.parent(g.vertex_by_name("a").unwrap()), Some(r));
        assert_eq!(t.parent(g.vertex_by_name("b").unwrap()), Some(r));
        assert_eq!(t.nontrivial_dominator_pairs(), 0);
    }

    #[test]
    fn dominator_unreachable() {
        let g = Digraph::parse_edge_list("r a x\nb c y\n").unwrap();
        let r = g.vertex_by_name("r").unwrap();
        assert!(matches!(
            g.dominator_tree(r),
            Err(GraphError::UnreachableVertex(_))
        ));
    }

    /// Brute-force domination: u dominates w iff removing u cuts w off.
    fn brute_dominates(g: &Digraph, root: VertexId, u: VertexId, w: VertexId) -> bool {
        if u == w {
            return true;
        }
        if root == u {
            return true;
        }
        if root == w {
            return false;
        }
        let mut seen: BTreeSet<VertexId> = BTreeSet::new();
        let mut stack = vec![root];
        seen.insert(root);
        while let Some(v) = stack.pop() {
            for e in g.out_edges(v) {
                if e.dst == u || seen.contains(&e.dst) {
                    continue;
                }
                seen.insert(e.dst);
                stack.push(e.dst);
            }
        }
        !seen.contains(&w)
    }

    #[test]
    fn dominators_agree_with_brute_force() {
        use crate::testutil::random_digraph;
        let mut checked = 0;
        for seed in 0..160u64 {
            let n = 3 + (seed % 5) as usize; // up to 7
            let g = random_digraph(n, 0.2 + 0.1 * (seed % 4) as f64, seed);
            let root = match g.root() {
                Some(r) => r,
                None => {
                    // root an arbitrary strongly reachable vertex if possible
                    let part = g.scc();
                    if part.initial.len() != 1 {
                        continue;
                    }
                    let v = part.components[part.initial[0]][0];
                    let rooted = g.root_at(v).unwrap();
                    if rooted.dominator_tree(v).is_err() {
                        continue;
                    }
                    let t = rooted.dominator_tree(v).unwrap();
                    for &u in rooted.vertices() {
                        let dom = t.dominated_set(u);
                        for &w in rooted.vertices() {
                            assert_eq!(
                                dom.contains(&w),
                                brute_dominates(&rooted, v, u, w),
                                "seed {seed} u={u:?} w={w:?}"
                            );
                        }
                    }
                    checked += 1;
                    continue;
                }
            };
            let t = g.dominator_tree(root).unwrap();
            for &u in g.vertices() {
                let dom = t.dominated_set(u);
                for &w in g.vertices() {
                    assert_eq!(
                        dom.contains(&w),
                        brute_dominates(&g, root, u, w),
                        "seed {seed} u={u:?} w={w:?}"
                    );
                }
            }
            checked += 1;
        }
        assert!(checked > 40, "too few rooted instances: {checked}");
    }

    #[test]
    fn contract_examples() {
        let path = Digraph::parse_edge_list("r a x\na b y\n").unwrap();
        let a = path.vertex_by_name("a").unwrap();
        let b = path.vertex_by_name("b").unwrap();

        // singleton contraction is identity
        let s: BTreeSet<VertexId> = [a].into_iter().collect();
        assert_eq!(path.contract(&s, a).unwrap(), path);

        // contract {a,b} -> a: r->a survives, a->b removed
        let s: BTreeSet<VertexId> = [a, b].into_iter().collect();
        let c = path.contract(&s, a).unwrap();
        assert_eq!(c.vertex_count(), 2);
        assert_eq!(labels(&c), vec!["x"]);

        // 2-cycle contracted entirely
        let two = Digraph::parse_edge_list("u v a\nv u b\n").unwrap();
        let u = two.vertex_by_name("u").unwrap();
        let v = two.vertex_by_name("v").unwrap();
        let s: BTreeSet<VertexId> = [u, v].into_iter().collect();
        let c = two.contract(&s, u).unwrap();
        assert_eq!(c.vertex_count(), 1);
        assert_eq!(c.edge_count(), 0);

        let err = two.contract(&[u].into_iter().collect(), v);
        assert!(matches!(err, Err(GraphError::TargetNotInSet(_))));
    }

    #[test]
    fn contract_edge_predicates() {
        // For z outside S: zu survives iff present before; sz becomes uz.
        let g = Digraph::parse_edge_list("z u 1\nz w 2\nw u 3\nu w 4\nw q 5\n").unwrap();
        let u = g.vertex_by_name("u").unwrap();
        let w = g.vertex_by_name("w").unwrap();
        let s: BTreeSet<VertexId> = [u, w].into_iter().collect();
        let c = g.contract(&s, u).unwrap();
        // zu kept, zw dropped (into S\{u}), wu/uw internal dropped, wq -> uq
        assert_eq!(labels(&c), vec!["1", "5"]);
        let q = g.vertex_by_name("q").unwrap();
        assert!(c.edges().iter().any(|e| e.src == u && e.dst == q));
    }

    #[test]
    fn contract_edge_predicates_hold_generally() {
        use crate::testutil::random_digraph;
        for seed in 0..120u64 {
            let n = 3 + (seed % 4) as usize;
            let g = random_digraph(n, 0.45, 150_000 + seed);
            if g.edge_count() == 0 {
                continue;
            }
            // contract a random pair plus whichever vertices fall between
            let verts = g.vertices();
            let u = verts[(seed as usize) % verts.len()];
            let extra = verts[(seed as usize * 3 + 1) % verts.len()];
            let s: BTreeSet<VertexId> = [u, extra].into_iter().collect();
            let c = g.contract(&s, u).unwrap();
            for &z in verts {
                if s.contains(&z) {
                    continue;
                }
                // zu in E(G') iff zu in E(G)
                let before = g.edges().iter().any(|e| e.src == z && e.dst == u);
                let after = c.edges().iter().any(|e| e.src == z && e.dst == u);
                assert_eq!(before, after, "seed {seed} z={z:?}");
                // every sz with s in S yields uz in E(G')
                let had_out = g.edges().iter().any(|e| s.contains(&e.src) && e.dst == z);
                let has_out = c.edges().iter().any(|e| e.src == u && e.dst == z);
                assert_eq!(had_out, has_out, "seed {seed} z={z:?}");
            }
        }
    }

    #[test]
    fn delete_and_contract_edge() {
        let two = Digraph::parse_edge_list("u v a\nv u b\n").unwrap();
        let del = two.delete_edge(EdgeId(0)).unwrap();
        assert_eq!(labels(&del), vec!["b"]);
        let con = two.contract_edge(EdgeId(0)).unwrap();
        assert_eq!(con.vertex_count(), 1);
        assert_eq!(con.edge_count(), 0);
        assert!(matches!(
            two.delete_edge(EdgeId(9)),
            Err(GraphError::UnknownEdge(9))
        ));

        // C3: contract e1 merges v2 into v1, leaving a 2-cycle labeled e2,e3
        let c3 = Digraph::parse_edge_list("v1 v2 e1\nv2 v3 e2\nv3 v1 e3\n").unwrap();
        let con = c3.contract_edge(EdgeId(0)).unwrap();
        assert_eq!(con.vertex_count(), 2);
        let mut ls = labels(&con);
        ls.sort();
        assert_eq!(ls, vec!["e2", "e3"]);
    }

    #[test]
    fn transpose_reverses() {
        let g = Digraph::parse_edge_list("r a x\na b y\n").unwrap();
        let t = g.transpose();
        assert_eq!(t.edges()[0].src, g.edges()[0].dst);
        assert_eq!(t.edges()[0].dst, g.edges()[0].src);
        assert_eq!(t.transpose(), g);
    }

    #[test]
    fn edge_list_round_trip() {
        let g = Digraph::parse_edge_list("r a x\na b y\nb a z\n").unwrap();
        let text = g.to_edge_list().unwrap();
        let back = Digraph::parse_edge_list(&text).unwrap();
        assert_eq!(back, g);
        let merged = Digraph::parse_edge_list("u v a\nu v b\n")
            .unwrap()
            .normalize();
        assert!(matches!(
            merged.to_edge_list(),
            Err(GraphError::CompoundLabels)
        ));
    }

    #[test]
    fn dot_export_mentions_all_edges() {
        let g = Digraph::parse_edge_list("r a x\na b y\n").unwrap();
        let dot = g.to_dot();
        assert!(dot.contains("\"r\" -> \"a\""));
        assert!(dot.contains("label=\"y\""));
    }
}
