//! Seeded random digraph families shared by unit, property and acceptance
//! tests.

use crate::digraph::Digraph;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Simple random digraph on `n` vertices `v0..v{n-1}`: each ordered pair
/// becomes an edge independently with probability `p`. Output is normalized
/// by construction (no loops, no parallels); labels are `e1, e2, ...` in
/// generation order.
pub fn random_digraph(n: usize, p: f64, seed: u64) -> Digraph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut text = String::new();
    let mut k = 0;
    for i in 0..n {
        for j in 0..n {
            if i != j && rng.gen_bool(p) {
                k += 1;
                text.push_str(&format!("v{i} v{j} e{k}\n"));
            }
        }
    }
    if k == 0 {
        // keep at least the vertices present: emit an isolated loop per
        // vertex and normalize it away
        for i in 0..n {
            text.push_str(&format!("v{i} v{i} l{i}\n"));
        }
        return Digraph::parse_edge_list(&text).unwrap().normalize();
    }
    // make sure all n vertices appear even if isolated
    let mut g_text = String::new();
    for i in 0..n {
        g_text.push_str(&format!("v{i} v{i} loop{i}\n"));
    }
    g_text.push_str(&text);
    Digraph::parse_edge_list(&g_text).unwrap().normalize()
}

/// Iterator over a deterministic family of digraphs with sizes cycling
/// through `sizes` and edge probabilities cycling through `ps`.
pub fn seeded_family<'a>(
    count: usize,
    sizes: &'a [usize],
    ps: &'a [f64],
    seed0: u64,
) -> impl Iterator<Item = Digraph> + 'a {
    (0..count).map(move |i| {
        let n = sizes[i % sizes.len()];
        let p = ps[i % ps.len()];
        random_digraph(n, p, seed0 + i as u64)
    })
}
