//! Independent ground truth: brute-force arborescence enumeration via the
//! in-edge product, and determinant-based counting via minors of the
//! Kirchhoff matrix. Every correctness test in the crate checks against
//! one of these two routes.

use crate::digraph::{Digraph, EdgeId, VertexId};
use crate::expr::Expr;
use num_bigint::{BigInt, BigUint};
use num_traits::{One, Signed, Zero};
use thiserror::Error;

/// Default vertex-count cap for enumeration.
pub const DEFAULT_ENUMERATION_CAP: usize = 10;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OracleError {
    #[error("digraph has {vertices} vertices, above the enumeration cap of {cap}")]
    CapExceeded { vertices: usize, cap: usize },
}

/// One spanning arborescence: its root and its edge set (sorted by id).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Arborescence {
    pub root: VertexId,
    pub edges: Vec<EdgeId>,
}

/// All arborescences of a digraph, grouped in enumeration order
/// (roots ascending, then in-edge choices in ascending edge-id order).
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ArborescenceSet {
    pub items: Vec<Arborescence>,
}

impl ArborescenceSet {
    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }
}

/// Enumerates every arborescence with the default cap.
pub fn enumerate(g: &Digraph) -> Result<ArborescenceSet, OracleError> {
    enumerate_capped(g, DEFAULT_ENUMERATION_CAP)
}

/// Enumerates every arborescence of a normalized digraph by taking, for each
/// candidate root, the Cartesian product of in-edge choices over all other
/// vertices and keeping the acyclic selections. Candidate roots are the
/// vertices of the initial SCC; with more than one initial SCC the result
/// is empty.
pub fn enumerate_capped(g: &Digraph, cap: usize) -> Result<ArborescenceSet, OracleError> {
    let n = g.vertex_count();
    if n > cap {
        return Err(OracleError::CapExceeded { vertices: n, cap });
    }
    let mut out = ArborescenceSet::default();
    if n == 0 {
        return Ok(out);
    }
    if n == 1 {
        // The empty digraph is the singleton's only spanning arborescence.
        out.items.push(Arborescence {
            root: g.vertices()[0],
            edges: Vec::new(),
        });
        return Ok(out);
    }
    let part = g.scc();
    if part.initial.len() != 1 {
        return Ok(out);
    }
    let mut roots = part.components[part.initial[0]].clone();
    roots.sort_unstable();
    for root in roots {
        let others: Vec<VertexId> = g
            .vertices()
            .iter()
            .copied()
            .filter(|&v| v != root)
            .collect();
        let choices: Vec<Vec<&crate::digraph::Edge>> =
            others.iter().map(|&v| g.in_edges(v).collect()).collect();
        if choices.iter().any(Vec::is_empty) {
            continue;
        }
        let mut pick = vec![0usize; others.len()];
        'odometer: loop {
            let selection: Vec<&crate::digraph::Edge> =
                pick.iter().zip(&choices).map(|(&i, c)| c[i]).collect();
            if selection_is_acyclic(root, &others, &selection) {
                let mut edges: Vec<EdgeId> = selection.iter().map(|e| e.id).collect();
                edges.sort_unstable();
                out.items.push(Arborescence { root, edges });
            }
            for i in 0..pick.len() {
                pick[i] += 1;
                if pick[i] < choices[i].len() {
                    continue 'odometer;
                }
                pick[i] = 0;
            }
            break;
        }
    }
    Ok(out)
}

/// A selection of one in-edge per non-root vertex spans an arborescence iff
/// following the chosen parents never cycles.
fn selection_is_acyclic(
    root: VertexId,
    others: &[VertexId],
    selection: &[&crate::digraph::Edge],
) -> bool {
    let parent_of = |v: VertexId| -> Option<VertexId> {
        others
            .iter()
            .position(|&x| x == v)
            .map(|i| selection[i].src)
    };
    // 0 = unvisited, 1 = in progress, 2 = done
    let mut state: Vec<u8> = vec![0; others.len()];
    for start in 0..others.len() {
        if state[start] != 0 {
            continue;
        }
        let mut path = Vec::new();
        let mut v = others[start];
        loop {
            if v == root {
                break;
            }
            let i = others.iter().position(|&x| x == v).unwrap();
            match state[i] {
                1 => return false, // hit the current path: a cycle
                2 => break,
                _ => {}
            }
            state[i] = 1;
            path.push(i);
            v = parent_of(v).unwrap();
        }
        for i in path {
            state[i] = 2;
        }
    }
    true
}

/// Sum-of-products expression of the enumerator, built directly from the
/// enumerated arborescences. `None` when there are none (the zero
/// polynomial has no representation).
pub fn kappa_expr(g: &Digraph, arbs: &ArborescenceSet) -> Option<Expr> {
    if arbs.is_empty() {
        return None;
    }
    let terms: Vec<Expr> = arbs
        .items
        .iter()
        .map(|a| {
            Expr::prod(
                a.edges
                    .iter()
                    .map(|&id| g.edge(id).expect("edge from enumeration").label.clone())
                    .collect(),
            )
        })
        .collect();
    Some(Expr::sum(terms))
}

/// Enumerates and builds the enumerator expression in one step.
pub fn kappa_of(g: &Digraph, cap: usize) -> Result<Option<Expr>, OracleError> {
    Ok(kappa_expr(g, &enumerate_capped(g, cap)?))
}

/// Total arborescence count via the Matrix-Tree theorem: the sum over all
/// vertices of the (jj)-minor of the Kirchhoff matrix (in-degree diagonal
/// minus adjacency), evaluated by fraction-free elimination over exact
/// integers. Labels that are merged parallel bundles count with their
/// monomial multiplicity.
pub fn matrix_tree_count(g: &Digraph) -> BigUint {
    g.vertices()
        .iter()
        .map(|&v| matrix_tree_count_rooted(g, v))
        .sum()
}

/// Arborescences rooted at `j`, as the (jj)-minor of the Kirchhoff matrix.
pub fn matrix_tree_count_rooted(g: &Digraph, j: VertexId) -> BigUint {
    let verts = g.vertices();
    let n = verts.len();
    if n == 0 {
        return BigUint::zero();
    }
    if n == 1 {
        return if verts[0] == j {
            BigUint::one()
        } else {
            BigUint::zero()
        };
    }
    let index: std::collections::HashMap<VertexId, usize> =
        verts.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let jj = match index.get(&j) {
        Some(&i) => i,
        None => return BigUint::zero(),
    };
    let mut kirchhoff = vec![vec![BigInt::zero(); n]; n];
    for e in g.edges() {
        if e.src == e.dst {
            continue;
        }
        let w = BigInt::from(e.label.count_monomials());
        let (s, d) = (index[&e.src], index[&e.dst]);
        kirchhoff[d][d] += &w;
        kirchhoff[s][d] -= w;
    }
    let keep: Vec<usize> = (0..n).filter(|&i| i != jj).collect();
    let minor: Vec<Vec<BigInt>> = keep
        .iter()
        .map(|&r| keep.iter().map(|&c| kirchhoff[r][c].clone()).collect())
        .collect();
    let det = bareiss_determinant(minor);
    debug_assert!(!det.is_negative(), "matrix-tree minor must be non-negative");
    det.magnitude().clone()
}

/// Fraction-free (Bareiss) determinant; every intermediate stays integral.
fn bareiss_determinant(mut m: Vec<Vec<BigInt>>) -> BigInt {
    let n = m.len();
    if n == 0 {
        return BigInt::one();
    }
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if m[k][k].is_zero() {
            match (k + 1..n).find(|&r| !m[r][k].is_zero()) {
                Some(r) => {
                    m.swap(k, r);
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let num = &m[i][j] * &m[k][k] - &m[i][k] * &m[k][j];
                m[i][j] = num / &prev;
            }
            m[i][k] = BigInt::zero();
        }
        prev = m[k][k].clone();
    }
    sign * m[n - 1][n - 1].clone()
}
