//! Applications built on the compressed form: greatest common divisor of
//! enumerators, uniform arborescence sampling, and a build-up generator for
//! digraphs whose enumerators factor into small primes.

use crate::decompose::{all_factors, DecomposeError};
use crate::digraph::{Digraph, DigraphBuilder, GraphError, VertexId};
use crate::engine::{compress, CompressConfig, EngineError};
use crate::expr::{poly_equal_with, EqConfig, Expr, Monomial, Symbol};
use num_bigint::{BigUint, RandBigInt};
use num_traits::One;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum OpsError {
    #[error("digraph has no arborescence")]
    NoArborescence,
    #[error("invalid attachment: {0}")]
    InvalidAttachment(String),
    #[error("label namespaces collide on {0:?}")]
    LabelCollision(String),
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

// ---------------------------------------------------------------------------
// GCD

/// GCD of two enumerators, with the exactness of the prime matching.
#[derive(Clone, Debug)]
pub struct GcdResult {
    pub expr: Expr,
    pub exact: bool,
}

/// Expansion cap used when matching individual primes; primes from real
/// decompositions are small, and the randomized fallback keeps the
/// operation total beyond the cap.
const GCD_MATCH_CAP: u64 = 10_000;

/// Greatest common divisor of the enumerators of `g1` and `g2`: both are
/// prime-factorized, the prime factors compressed, and factors matched
/// across the two lists by polynomial equality. Shared primes only arise
/// when the inputs draw edge labels from a common namespace (two rooted
/// variants of one underlying network, say).
pub fn kirchhoff_gcd(g1: &Digraph, g2: &Digraph) -> Result<GcdResult, OpsError> {
    let cfg = CompressConfig::default();
    let parts1 = prime_exprs(g1, &cfg)?;
    let parts2 = prime_exprs(g2, &cfg)?;
    let eq_cfg = EqConfig {
        expansion_cap: GCD_MATCH_CAP,
        ..EqConfig::default()
    };
    let mut used = vec![false; parts2.len()];
    let mut matched = Vec::new();
    let mut exact = true;
    for a in &parts1 {
        let avars = a.vars();
        for (j, b) in parts2.iter().enumerate() {
            if used[j] || avars != b.vars() {
                continue;
            }
            let eq = poly_equal_with(a, b, &eq_cfg);
            if eq.equal {
                used[j] = true;
                matched.push(a.clone());
                exact &= eq.exact;
                break;
            }
        }
    }
    Ok(GcdResult {
        expr: Expr::prod(matched),
        exact,
    })
}

fn prime_exprs(g: &Digraph, cfg: &CompressConfig) -> Result<Vec<Expr>, OpsError> {
    let fz = all_factors(g).map_err(|e| match e {
        DecomposeError::NoArborescence { .. } => OpsError::NoArborescence,
        _ => OpsError::NoArborescence,
    })?;
    let mut out = Vec::new();
    for f in fz.nontrivial() {
        out.push(compress(&f.digraph, cfg)?);
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Uniform sampling

/// Draws one arborescence uniformly at random from a compressed enumerator:
/// every product child is sampled, and each sum child is chosen with
/// probability proportional to its cached monomial count (exact
/// arbitrary-precision arithmetic, so astronomically large counts are
/// fine). Requires the coefficient-1, variable-disjoint shape that
/// [`compress`] produces.
pub fn sample_arborescence<R: Rng>(e: &Expr, rng: &mut R) -> Monomial {
    fn rec<R: Rng>(e: &Expr, rng: &mut R, out: &mut Vec<Symbol>) {
        match e.view() {
            crate::expr::ExprView::One => {}
            crate::expr::ExprView::Var(s, _) => out.push(s),
            crate::expr::ExprView::Prod(children) => {
                for c in children {
                    rec(c, rng, out);
                }
            }
            crate::expr::ExprView::Sum(children) => {
                let total = e.count_monomials();
                let mut draw = rng.gen_biguint_below(&total);
                for c in children {
                    let w = c.count_monomials();
                    if draw < w {
                        rec(c, rng, out);
                        return;
                    }
                    draw -= w;
                }
                unreachable!("weights sum to the cached total");
            }
        }
    }
    let mut vars = Vec::new();
    rec(e, rng, &mut vars);
    vars.sort_unstable();
    Monomial {
        vars,
        coeff: BigUint::one(),
    }
}

// ---------------------------------------------------------------------------
// PE build-up generation

/// Shape of one prime building block: a fresh root with an edge into every
/// vertex of a directed k-cycle. Rooted, strongly connected remainder, flat
/// dominator tree — structurally prime with 2^k - 1 monomials.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum BaseKind {
    Cycle(usize),
}

impl BaseKind {
    fn cycle_len(self) -> usize {
        match self {
            BaseKind::Cycle(k) => k.max(2),
        }
    }
}

/// Build-up plan for generating a practically enumerable digraph: `width`
/// prime components attach to each component of the previous level, down to
/// `depth` levels.
#[derive(Clone, Debug)]
pub struct PeSpec {
    pub depth: usize,
    pub width: usize,
    pub bases: Vec<BaseKind>,
    pub seed: u64,
}

impl PeSpec {
    pub fn new(depth: usize, width: usize) -> PeSpec {
        PeSpec {
            depth,
            width,
            bases: vec![BaseKind::Cycle(2), BaseKind::Cycle(3), BaseKind::Cycle(4)],
            seed: 0,
        }
    }

    pub fn with_bases(mut self, bases: Vec<BaseKind>) -> PeSpec {
        self.bases = bases;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> PeSpec {
        self.seed = seed;
        self
    }
}

/// Intended prime structure of a generated digraph; enough to reconstruct
/// each component's enumerator for round-trip checks.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PeManifest {
    pub depth: usize,
    pub width: usize,
    pub seed: u64,
    pub components: Vec<PeComponent>,
}

/// One intended prime component: the attachment vertex acting as its root
/// plus its edges (source, target, label) in the generated digraph's names.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PeComponent {
    pub root: String,
    pub edges: Vec<(String, String, String)>,
}

impl PeComponent {
    /// Rebuilds the component as a rooted digraph (root = attachment point).
    pub fn to_digraph(&self) -> Digraph {
        let mut b = DigraphBuilder::new();
        for (s, t, l) in &self.edges {
            b.edge(s, t, l);
        }
        b.build()
    }
}

/// Generates a digraph whose enumerator factors into exactly
/// `width + width^2 + ... + width^depth` known prime components, by
/// attaching base components below a root and, recursively, below the
/// components of the previous level. The attachment vertex of each base is
/// chosen by the seeded RNG.
pub fn pe_generate(spec: &PeSpec) -> Result<(Digraph, PeManifest), OpsError> {
    if spec.depth == 0 || spec.width == 0 || spec.bases.is_empty() {
        return Err(OpsError::InvalidAttachment(
            "depth, width and bases must be non-empty".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut builder = DigraphBuilder::new();
    let mut next_vertex = 0usize;
    let mut next_label = 0usize;
    let mut fresh_vertex = |b: &mut DigraphBuilder| {
        let name = format!("n{next_vertex}");
        next_vertex += 1;
        b.vertex(&name);
        name
    };
    let root = fresh_vertex(&mut builder);
    let mut components = Vec::new();
    // vertex names of each component of the previous level
    let mut level: Vec<Vec<String>> = vec![vec![root]];
    for _ in 0..spec.depth {
        let mut next_level = Vec::new();
        for parent in &level {
            for _ in 0..spec.width {
                let attach = parent[rng.gen_range(0..parent.len())].clone();
                let kind = spec.bases[rng.gen_range(0..spec.bases.len())];
                let k = kind.cycle_len();
                let cycle: Vec<String> = (0..k).map(|_| fresh_vertex(&mut builder)).collect();
                let mut edges = Vec::new();
                for c in &cycle {
                    next_label += 1;
                    let label = format!("x{next_label}");
                    builder.edge(&attach, c, &label);
                    edges.push((attach.clone(), c.clone(), label));
                }
                for i in 0..k {
                    next_label += 1;
                    let label = format!("x{next_label}");
                    let (s, t) = (&cycle[i], &cycle[(i + 1) % k]);
                    builder.edge(s, t, &label);
                    edges.push((s.clone(), t.clone(), label));
                }
                components.push(PeComponent {
                    root: attach,
                    edges,
                });
                next_level.push(cycle);
            }
        }
        level = next_level;
    }
    let manifest = PeManifest {
        depth: spec.depth,
        width: spec.width,
        seed: spec.seed,
        components,
    };
    Ok((builder.build(), manifest))
}

/// Attaches `g` below vertex `attach` of the rooted digraph `p` so that
/// every vertex of `g` becomes dominated by `attach` and the enumerators
/// multiply.
///
/// When `entry` is the root of `g`, the root is merged into `attach` (its
/// out-edges re-sourced); the attached component's enumerator is exactly
/// the enumerator of `g`. Otherwise two fresh parallel entry edges are
/// added from `attach` to `entry`, contributing a two-term entry sum.
/// Vertex ids and label namespaces of the two inputs must be disjoint.
pub fn pe_compose(
    p: &Digraph,
    g: &Digraph,
    attach: VertexId,
    entry: VertexId,
) -> Result<Digraph, OpsError> {
    if p.root().is_none() {
        return Err(OpsError::InvalidAttachment(
            "host digraph is not rooted".into(),
        ));
    }
    if !p.contains_vertex(attach) {
        return Err(OpsError::InvalidAttachment(format!(
            "attachment vertex {} not in host",
            p.vertex_name(attach)
        )));
    }
    if !g.contains_vertex(entry) {
        return Err(OpsError::InvalidAttachment(format!(
            "entry vertex {} not in component",
            g.vertex_name(entry)
        )));
    }
    let p_labels: BTreeSet<Symbol> = p.edges().iter().flat_map(|e| e.label.vars()).collect();
    let g_labels: BTreeSet<Symbol> = g.edges().iter().flat_map(|e| e.label.vars()).collect();
    if let Some(shared) = p_labels.intersection(&g_labels).next() {
        return Err(OpsError::LabelCollision(shared.name().to_string()));
    }

    // Rebuild both sides in one namespace: host names first, then the
    // component's (renamed on clash).
    let mut names: Vec<String> = p.vertices().iter().map(|&v| p.vertex_name(v)).collect();
    let taken: BTreeSet<String> = names.iter().cloned().collect();
    let host_index =
        |v: VertexId| -> u32 { p.vertices().iter().position(|&x| x == v).unwrap() as u32 };
    let merge_root = g.root() == Some(entry);
    let mut comp_index: std::collections::HashMap<VertexId, u32> = Default::default();
    for &v in g.vertices() {
        if merge_root && v == entry {
            comp_index.insert(v, host_index(attach));
            continue;
        }
        let base = g.vertex_name(v);
        let mut name = base.clone();
        let mut suffix = 1;
        while taken.contains(&name) || names.iter().skip(p.vertex_count()).any(|n| *n == name) {
            name = format!("{base}_{suffix}");
            suffix += 1;
        }
        comp_index.insert(v, names.len() as u32);
        names.push(name);
    }

    let mut b = DigraphBuilder::new();
    for n in &names {
        b.vertex(n);
    }
    for e in p.edges() {
        b.edge_expr(
            VertexId(host_index(e.src)),
            VertexId(host_index(e.dst)),
            e.label.clone(),
        );
    }
    for e in g.edges() {
        b.edge_expr(
            VertexId(comp_index[&e.src]),
            VertexId(comp_index[&e.dst]),
            e.label.clone(),
        );
    }
    if !merge_root {
        let all_labels: BTreeSet<String> = p_labels
            .iter()
            .chain(g_labels.iter())
            .map(|s| s.name().to_string())
            .collect();
        let mut made = 0;
        let mut k = 0;
        while made < 2 {
            k += 1;
            let cand = format!("w{k}");
            if all_labels.contains(&cand) {
                continue;
            }
            b.edge_expr(
                VertexId(host_index(attach)),
                VertexId(comp_index[&entry]),
                Expr::var(&cand),
            );
            made += 1;
        }
    }
    Ok(b.build())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decompose::is_prime_component;
    use crate::digraph::Digraph;
    use crate::expr::poly_equal;
    use crate::oracle;
    use std::collections::HashMap;

    fn compress_default(g: &Digraph) -> Expr {
        compress(g, &CompressConfig::default()).unwrap()
    }

    #[test]
    fn gcd_of_identical_graphs() {
        let g = Digraph::parse_edge_list("r a x\na b y\nb a z\n").unwrap();
        let result = kirchhoff_gcd(&g, &g).unwrap();
        assert!(result.exact);
        let whole = compress_default(&g);
        assert!(poly_equal(&result.expr, &whole).equal);
    }

    #[test]
    fn gcd_of_disjoint_graphs_is_one() {
        let g1 = Digraph::parse_edge_list("r a x1\na b y1\n").unwrap();
        let g2 = Digraph::parse_edge_list("r a x2\na b y2\n").unwrap();
        let result = kirchhoff_gcd(&g1, &g2).unwrap();
        assert!(result.expr.is_one());
        assert!(result.exact);
    }

    #[test]
    fn gcd_rejects_empty_enumerators() {
        let dead = Digraph::parse_edge_list("a b 1\nb a 2\nc d 3\nd c 4\n").unwrap();
        let live = Digraph::parse_edge_list("r a x\n").unwrap();
        assert!(matches!(
            kirchhoff_gcd(&dead, &live),
            Err(OpsError::NoArborescence)
        ));
    }

    #[test]
    fn gcd_of_composed_pair_is_shared_component() {
        // one shared rooted prime component attached below two different hosts
        let shared = Digraph::parse_edge_list("q0 q1 s1\nq0 q2 s2\nq1 q2 s3\nq2 q1 s4\n").unwrap();
        let host1 = Digraph::parse_edge_list("r a h1\na b h2\nb a h3\n").unwrap();
        let host2 = Digraph::parse_edge_list("r a k1\nr b k2\na b k3\nb a k4\n").unwrap();
        let entry = shared.root().unwrap();
        let g1 = pe_compose(&host1, &shared, host1.vertex_by_name("a").unwrap(), entry).unwrap();
        let g2 = pe_compose(&host2, &shared, host2.vertex_by_name("b").unwrap(), entry).unwrap();
        let result = kirchhoff_gcd(&g1, &g2).unwrap();
        assert!(result.exact);
        let expected = compress_default(&shared);
        let eq = poly_equal(&result.expr, &expected);
        assert!(eq.equal && eq.exact);
    }

    #[test]
    fn sampling_matches_simple_distributions() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let e = Expr::sum(vec![Expr::var("sa"), Expr::var("sb")]);
        let mut counts: HashMap<Vec<Symbol>, usize> = HashMap::new();
        for _ in 0..4000 {
            let m = sample_arborescence(&e, &mut rng);
            *counts.entry(m.vars).or_default() += 1;
        }
        assert_eq!(counts.len(), 2);
        for &c in counts.values() {
            assert!((1600..=2400).contains(&c), "badly skewed: {c}");
        }

        let e = Expr::prod(vec![
            Expr::var("pa"),
            Expr::sum(vec![Expr::var("pb"), Expr::var("pc")]),
        ]);
        let m = sample_arborescence(&e, &mut rng);
        assert_eq!(m.vars.len(), 2);
        assert!(m.vars.contains(&Symbol::intern("pa")));
        assert!(m.coeff.is_one());
    }

    #[test]
    fn samples_are_arborescences() {
        let g =
            Digraph::parse_edge_list("r a 1\nr b 2\na b 3\nb a 4\na c 5\nc a 6\nb c 7\n").unwrap();
        let e = compress_default(&g);
        let expansion = e.expand_capped(10_000).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        for _ in 0..200 {
            let m = sample_arborescence(&e, &mut rng);
            assert!(
                expansion.coeff(&m.vars).is_some(),
                "sampled a non-monomial: {:?}",
                m.vars
            );
        }
    }

    #[test]
    fn pe_generate_structure() {
        let spec = PeSpec::new(2, 3).with_seed(5);
        let (g, manifest) = pe_generate(&spec).unwrap();
        assert_eq!(manifest.components.len(), 3 + 9);
        assert!(g.has_arborescence());
        // every manifest component reconstructs to a rooted prime digraph
        for c in &manifest.components {
            let base = c.to_digraph();
            let root = base.vertex_by_name(&c.root).unwrap();
            assert_eq!(base.root(), Some(root));
            assert!(is_prime_component(&base).unwrap());
        }
    }

    #[test]
    fn pe_generate_round_trip() {
        let spec = PeSpec::new(2, 3).with_seed(11);
        let (g, manifest) = pe_generate(&spec).unwrap();
        let fz = all_factors(&g.normalize()).unwrap();
        let nontrivial: Vec<_> = fz.nontrivial().collect();
        assert_eq!(nontrivial.len(), manifest.components.len());
        let mut used = vec![false; manifest.components.len()];
        for f in &nontrivial {
            let factor_kappa = compress(&f.digraph, &CompressConfig::default()).unwrap();
            let mut matched = false;
            for (i, c) in manifest.components.iter().enumerate() {
                if used[i] {
                    continue;
                }
                let base = c.to_digraph();
                let arbs = oracle::enumerate_capped(&base, base.vertex_count()).unwrap();
                let base_kappa = oracle::kappa_expr(&base, &arbs).unwrap();
                if poly_equal(&factor_kappa, &base_kappa).equal {
                    used[i] = true;
                    matched = true;
                    break;
                }
            }
            assert!(matched, "factor without a manifest partner");
        }
    }

    #[test]
    fn pe_generate_count_is_product() {
        let spec = PeSpec::new(1, 3)
            .with_bases(vec![BaseKind::Cycle(2)])
            .with_seed(3);
        let (g, manifest) = pe_generate(&spec).unwrap();
        let total = crate::engine::count_arborescences(&g.normalize()).unwrap();
        let mut product = BigUint::one();
        for c in &manifest.components {
            let base = c.to_digraph();
            product *= oracle::matrix_tree_count(&base);
        }
        assert_eq!(total, product);
        // 2-cycle bases enumerate 3 ways each
        assert_eq!(total, BigUint::from(27u32));
    }

    #[test]
    fn pe_compose_rooted_merge() {
        // host path r -> a (x); component: rooted 2-cycle entered twice
        let host = Digraph::parse_edge_list("r a x\n").unwrap();
        let comp = Digraph::parse_edge_list("g0 g1 c1\ng0 g2 c2\ng1 g2 c3\ng2 g1 c4\n").unwrap();
        let a = host.vertex_by_name("a").unwrap();
        let composed = pe_compose(&host, &comp, a, comp.root().unwrap()).unwrap();
        assert_eq!(composed.vertex_count(), 4);
        let total = oracle::matrix_tree_count(&composed.normalize());
        // kappa(host) * kappa(comp) = 1 * 3
        assert_eq!(total, BigUint::from(3u32));
        // all component vertices dominated by the attachment vertex
        let root = composed.root().unwrap();
        let tree = composed.normalize().dominator_tree(root).unwrap();
        let attach = composed.vertex_by_name("a").unwrap();
        let dom = tree.dominated_set(attach);
        for name in ["g1", "g2"] {
            assert!(dom.contains(&composed.vertex_by_name(name).unwrap()));
        }
    }

    #[test]
    fn pe_compose_fresh_entries() {
        // unrooted component: a bare 2-cycle, attached via two fresh edges
        let host = Digraph::parse_edge_list("r a x\n").unwrap();
        let comp = Digraph::parse_edge_list("u v c1\nv u c2\n").unwrap();
        let a = host.vertex_by_name("a").unwrap();
        let entry = comp.vertex_by_name("u").unwrap();
        let composed = pe_compose(&host, &comp, a, entry).unwrap();
        let normalized = composed.normalize();
        // entries merge into one two-term sum label: kappa = x (w1+w2) c1
        let kappa = compress_default(&normalized);
        assert_eq!(kappa.count_monomials(), BigUint::from(2u32));
        let oracle_count = oracle::matrix_tree_count(&normalized);
        assert_eq!(oracle_count, BigUint::from(2u32));
        let has_entry_sum = normalized
            .edges()
            .iter()
            .any(|e| e.label.var_symbol().is_none());
        assert!(has_entry_sum);
    }

    #[test]
    fn pe_compose_rejects_label_collisions() {
        let host = Digraph::parse_edge_list("r a x\n").unwrap();
        let comp = Digraph::parse_edge_list("u v x\nv u c2\n").unwrap();
        let a = host.vertex_by_name("a").unwrap();
        let entry = comp.vertex_by_name("u").unwrap();
        assert!(matches!(
            pe_compose(&host, &comp, a, entry),
            Err(OpsError::LabelCollision(_))
        ));
    }

    #[test]
    fn pe_compose_rejects_bad_vertices() {
        let host = Digraph::parse_edge_list("r a x\n").unwrap();
        let comp = Digraph::parse_edge_list("u v c1\nv u c2\n").unwrap();
        let bogus = crate::digraph::VertexId(99);
        assert!(matches!(
            pe_compose(&host, &comp, bogus, comp.vertex_by_name("u").unwrap()),
            Err(OpsError::InvalidAttachment(_))
        ));
        assert!(matches!(
            pe_compose(&host, &comp, host.vertex_by_name("a").unwrap(), bogus),
            Err(OpsError::InvalidAttachment(_))
        ));
    }
}
