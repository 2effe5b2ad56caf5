//! Hash-consed expression DAGs over edge-label variables.
//!
//! An [`Expr`] is a node in a global, structurally deduplicated store. The
//! only node kinds are `One`, `Var`, `Sum` and `Prod` — enumerators are
//! homogeneous polynomials with coefficient 1, so nothing else is needed.
//! Every node caches its monomial count and degree at construction, which
//! makes counting, sampling and equality checks cheap even when the
//! expanded polynomial is astronomically large.
//!
//! Construction is serialized through the store; handles are plain `Arc`s
//! and can be shared and read concurrently. The store is grow-only: nodes
//! live for the lifetime of the process.

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{One as _, ToPrimitive, Zero as _};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};
use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::sync::{Arc, Mutex, MutexGuard, OnceLock};
use thiserror::Error;

/// Default limit on the number of monomials [`Expr::expand`] will produce.
pub const DEFAULT_EXPANSION_CAP: u64 = 1_000_000;

/// Modulus for randomized polynomial-identity testing: the Mersenne prime
/// 2^61 - 1. Products of two residues fit in a u128, so arithmetic stays
/// exact in machine words.
pub const FIELD_PRIME: u64 = (1 << 61) - 1;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ExprError {
    #[error("expansion would produce {count} monomials, above the cap of {cap}")]
    ExpansionCapExceeded { count: BigUint, cap: u64 },
    #[error("assignment is missing symbols: {}", .0.join(", "))]
    MissingSymbols(Vec<String>),
    #[error("malformed expression JSON: {0}")]
    Json(String),
}

/// Interned variable symbol. Symbols are global: the same name always maps
/// to the same `Symbol`, and ordering follows creation order.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Symbol(u32);

impl Symbol {
    /// Interns `name` and returns its symbol.
    pub fn intern(name: &str) -> Symbol {
        store().intern_symbol(name)
    }

    pub fn name(self) -> Arc<str> {
        store().sym_names[self.0 as usize].clone()
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.name())
    }
}

enum Kind {
    One,
    Var(Symbol, Arc<str>),
    Sum(Vec<Expr>),
    Prod(Vec<Expr>),
}

struct Node {
    kind: Kind,
    hash: u64,
    degree: Option<u32>,
    count: BigUint,
}

/// Handle to a hash-consed expression node.
///
/// Equality is pointer equality: structurally equal expressions are always
/// the same node, so `==` is both cheap and complete.
#[derive(Clone)]
pub struct Expr(Arc<Node>);

impl PartialEq for Expr {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
    }
}
impl Eq for Expr {}

impl std::hash::Hash for Expr {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        state.write_u64(self.0.hash);
    }
}

impl fmt::Debug for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Expr({})", self.pretty())
    }
}

/// Borrowed view of a node for pattern matching.
pub enum ExprView<'a> {
    One,
    Var(Symbol, &'a str),
    Sum(&'a [Expr]),
    Prod(&'a [Expr]),
}

// ---------------------------------------------------------------------------
// Store

#[derive(PartialEq, Eq, Hash)]
enum NodeKey {
    One,
    Var(Symbol),
    Sum(Vec<usize>),
    Prod(Vec<usize>),
}

#[derive(Default)]
struct Store {
    sym_ids: HashMap<String, Symbol>,
    sym_names: Vec<Arc<str>>,
    nodes: HashMap<NodeKey, Expr>,
}

impl Store {
    fn intern_symbol(&mut self, name: &str) -> Symbol {
        if let Some(&s) = self.sym_ids.get(name) {
            return s;
        }
        let s = Symbol(self.sym_names.len() as u32);
        self.sym_names.push(Arc::from(name));
        self.sym_ids.insert(name.to_string(), s);
        s
    }

    fn intern_node(&mut self, key: NodeKey, node: Node) -> Expr {
        if let Some(e) = self.nodes.get(&key) {
            return e.clone();
        }
        let e = Expr(Arc::new(node));
        self.nodes.insert(key, e.clone());
        e
    }
}

static STORE: OnceLock<Mutex<Store>> = OnceLock::new();

fn store() -> MutexGuard<'static, Store> {
    STORE
        .get_or_init(|| Mutex::new(Store::default()))
        .lock()
        .unwrap_or_else(|e| e.into_inner())
}

// ---------------------------------------------------------------------------
// Stable structural hashing

const TAG_ONE: u64 = 0x9ae1_6a3b_2f90_404f;
const TAG_VAR: u64 = 0x3c79_ac49_2ba7_b653;
const TAG_SUM: u64 = 0x1d8e_4b2a_9c63_7f05;
const TAG_PROD: u64 = 0x60be_e2fe_15ad_3cafu64;

fn mix(a: u64, b: u64) -> u64 {
    let mut x = a ^ b.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    x ^= x >> 30;
    x = x.wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x ^= x >> 27;
    x = x.wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

fn str_hash(s: &str) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in s.as_bytes() {
        h ^= u64::from(*b);
        h = h.wrapping_mul(0x0000_0100_0000_01B3);
    }
    h
}

fn kind_rank(k: &Kind) -> u8 {
    match k {
        Kind::One => 0,
        Kind::Var(..) => 1,
        Kind::Sum(_) => 2,
        Kind::Prod(_) => 3,
    }
}

/// Total order on expression structure, independent of store state.
fn structural_cmp(a: &Expr, b: &Expr) -> Ordering {
    if a == b {
        return Ordering::Equal;
    }
    let (ka, kb) = (&a.0.kind, &b.0.kind);
    kind_rank(ka)
        .cmp(&kind_rank(kb))
        .then_with(|| match (ka, kb) {
            (Kind::Var(_, na), Kind::Var(_, nb)) => na.cmp(nb),
            (Kind::Sum(ca), Kind::Sum(cb)) | (Kind::Prod(ca), Kind::Prod(cb)) => {
                ca.len().cmp(&cb.len()).then_with(|| {
                    for (x, y) in ca.iter().zip(cb) {
                        let o = structural_cmp(x, y);
                        if o != Ordering::Equal {
                            return o;
                        }
                    }
                    Ordering::Equal
                })
            }
            _ => Ordering::Equal,
        })
}

fn canonical_sort(children: &mut [Expr]) {
    children.sort_by(|a, b| a.0.hash.cmp(&b.0.hash).then_with(|| structural_cmp(a, b)));
}

// ---------------------------------------------------------------------------
// Construction

impl Expr {
    pub fn one() -> Expr {
        let node = Node {
            kind: Kind::One,
            hash: TAG_ONE,
            degree: Some(0),
            count: BigUint::one(),
        };
        store().intern_node(NodeKey::One, node)
    }

    pub fn var(name: &str) -> Expr {
        let mut st = store();
        let sym = st.intern_symbol(name);
        let arc = st.sym_names[sym.0 as usize].clone();
        let node = Node {
            kind: Kind::Var(sym, arc),
            hash: mix(TAG_VAR, str_hash(name)),
            degree: Some(1),
            count: BigUint::one(),
        };
        st.intern_node(NodeKey::Var(sym), node)
    }

    /// Canonicalizing sum. Nested sums are flattened and children ordered by
    /// structural hash; a single child is returned as-is.
    ///
    /// Panics on an empty child list: the zero polynomial is not
    /// representable (a digraph without arborescences is reported upstream).
    pub fn sum(children: Vec<Expr>) -> Expr {
        let mut flat = Vec::with_capacity(children.len());
        for c in children {
            match &c.0.kind {
                Kind::Sum(inner) => flat.extend(inner.iter().cloned()),
                _ => flat.push(c),
            }
        }
        assert!(!flat.is_empty(), "empty sum has no representation");
        if flat.len() == 1 {
            return flat.pop().unwrap();
        }
        canonical_sort(&mut flat);
        let hash = flat.iter().fold(TAG_SUM, |h, c| mix(h, c.0.hash));
        let count = flat.iter().fold(BigUint::zero(), |n, c| n + &c.0.count);
        let mut degree = flat[0].0.degree;
        for c in &flat[1..] {
            if degree.is_none() || c.0.degree != degree {
                degree = None;
            }
        }
        let key = NodeKey::Sum(flat.iter().map(Expr::node_id).collect());
        store().intern_node(
            key,
            Node {
                kind: Kind::Sum(flat),
                hash,
                degree,
                count,
            },
        )
    }

    /// Canonicalizing product. Nested products are flattened, `One` children
    /// dropped, and children ordered by structural hash. An empty product is
    /// `One`.
    pub fn prod(children: Vec<Expr>) -> Expr {
        let mut flat = Vec::with_capacity(children.len());
        for c in children {
            match &c.0.kind {
                Kind::Prod(inner) => flat.extend(inner.iter().cloned()),
                Kind::One => {}
                _ => flat.push(c),
            }
        }
        if flat.is_empty() {
            return Expr::one();
        }
        if flat.len() == 1 {
            return flat.pop().unwrap();
        }
        canonical_sort(&mut flat);
        let hash = flat.iter().fold(TAG_PROD, |h, c| mix(h, c.0.hash));
        let count = flat.iter().fold(BigUint::one(), |n, c| n * &c.0.count);
        let degree = flat.iter().try_fold(0u32, |d, c| c.0.degree.map(|x| d + x));
        let key = NodeKey::Prod(flat.iter().map(Expr::node_id).collect());
        store().intern_node(
            key,
            Node {
                kind: Kind::Prod(flat),
                hash,
                degree,
                count,
            },
        )
    }
}

// ---------------------------------------------------------------------------
// Queries

impl Expr {
    pub fn view(&self) -> ExprView<'_> {
        match &self.0.kind {
            Kind::One => ExprView::One,
            Kind::Var(s, n) => ExprView::Var(*s, n),
            Kind::Sum(c) => ExprView::Sum(c),
            Kind::Prod(c) => ExprView::Prod(c),
        }
    }

    /// Stable identity of the underlying node within this process.
    pub fn node_id(&self) -> usize {
        Arc::as_ptr(&self.0) as usize
    }

    pub fn is_one(&self) -> bool {
        matches!(self.0.kind, Kind::One)
    }

    /// The symbol, when this node is a plain variable.
    pub fn var_symbol(&self) -> Option<Symbol> {
        match &self.0.kind {
            Kind::Var(s, _) => Some(*s),
            _ => None,
        }
    }

    /// Number of monomials, counted with multiplicity: the value of the
    /// expression with every variable set to 1. Cached per node.
    pub fn count_monomials(&self) -> BigUint {
        self.0.count.clone()
    }

    /// Common monomial degree, or `None` if some sum mixes degrees.
    pub fn degree(&self) -> Option<u32> {
        self.0.degree
    }

    /// True when every sum node combines children of equal degree.
    pub fn is_homogeneous(&self) -> bool {
        self.0.degree.is_some()
    }

    /// Set of variables appearing in the expression.
    pub fn vars(&self) -> BTreeSet<Symbol> {
        let mut out = BTreeSet::new();
        let mut seen = BTreeSet::new();
        let mut stack = vec![self.clone()];
        while let Some(e) = stack.pop() {
            if !seen.insert(e.node_id()) {
                continue;
            }
            match &e.0.kind {
                Kind::One => {}
                Kind::Var(s, _) => {
                    out.insert(*s);
                }
                Kind::Sum(c) | Kind::Prod(c) => stack.extend(c.iter().cloned()),
            }
        }
        out
    }

    /// True when every product node multiplies variable-disjoint children —
    /// the shape every enumerator built by this crate has.
    pub fn products_variable_disjoint(&self) -> bool {
        fn rec(
            e: &Expr,
            vars: &mut HashMap<usize, BTreeSet<Symbol>>,
            ok: &mut bool,
        ) -> BTreeSet<Symbol> {
            if let Some(v) = vars.get(&e.node_id()) {
                return v.clone();
            }
            let set = match &e.0.kind {
                Kind::One => BTreeSet::new(),
                Kind::Var(s, _) => std::iter::once(*s).collect(),
                Kind::Sum(c) => {
                    let mut set = BTreeSet::new();
                    for x in c {
                        set.extend(rec(x, vars, ok));
                    }
                    set
                }
                Kind::Prod(c) => {
                    let mut set: BTreeSet<Symbol> = BTreeSet::new();
                    for x in c {
                        let sub = rec(x, vars, ok);
                        if !set.is_disjoint(&sub) {
                            *ok = false;
                        }
                        set.extend(sub);
                    }
                    set
                }
            };
            vars.insert(e.node_id(), set.clone());
            set
        }
        let mut ok = true;
        rec(self, &mut HashMap::new(), &mut ok);
        ok
    }
}

// ---------------------------------------------------------------------------
// Monomials and expansion

/// A single monomial: a sorted multiset of variables plus a coefficient.
/// Enumerators only ever produce exponent-1 variables and coefficient 1;
/// the general shape exists so that expansion is total.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Monomial {
    pub vars: Vec<Symbol>,
    pub coeff: BigUint,
}

/// Canonical expansion: monomials keyed by their sorted variable list.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct MonomialSet {
    map: BTreeMap<Vec<Symbol>, BigUint>,
}

impl MonomialSet {
    pub fn add(&mut self, vars: Vec<Symbol>, coeff: BigUint) {
        let slot = self.map.entry(vars).or_insert_with(BigUint::zero);
        *slot += coeff;
    }

    /// Number of distinct monomials.
    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    /// Sum of coefficients (monomials counted with multiplicity).
    pub fn total_count(&self) -> BigUint {
        self.map.values().fold(BigUint::zero(), |a, b| a + b)
    }

    pub fn coeff(&self, vars: &[Symbol]) -> Option<&BigUint> {
        self.map.get(vars)
    }

    pub fn iter(&self) -> impl Iterator<Item = Monomial> + '_ {
        self.map.iter().map(|(v, c)| Monomial {
            vars: v.clone(),
            coeff: c.clone(),
        })
    }

    /// Rebuilds a sum-of-products expression from the expansion.
    /// Returns `None` for the empty set (the unrepresentable zero).
    pub fn to_expr(&self) -> Option<Expr> {
        if self.map.is_empty() {
            return None;
        }
        let mut terms = Vec::with_capacity(self.map.len());
        for (vars, coeff) in &self.map {
            let prod = Expr::prod(vars.iter().map(|s| Expr::var(&s.name())).collect());
            let mut c = coeff.clone();
            while !c.is_zero() {
                terms.push(prod.clone());
                c -= 1u32;
            }
        }
        Some(Expr::sum(terms))
    }
}

fn merge_vars(a: &[Symbol], b: &[Symbol]) -> Vec<Symbol> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        if a[i] <= b[j] {
            out.push(a[i]);
            i += 1;
        } else {
            out.push(b[j]);
            j += 1;
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    out
}

impl Expr {
    /// Full canonical expansion with the default cap.
    pub fn expand(&self) -> Result<MonomialSet, ExprError> {
        self.expand_capped(DEFAULT_EXPANSION_CAP)
    }

    /// Full canonical expansion, refused when the (exactly known) monomial
    /// count exceeds `cap`.
    pub fn expand_capped(&self, cap: u64) -> Result<MonomialSet, ExprError> {
        if self.0.count > BigUint::from(cap) {
            return Err(ExprError::ExpansionCapExceeded {
                count: self.0.count.clone(),
                cap,
            });
        }
        fn rec(e: &Expr, memo: &mut HashMap<usize, Arc<MonomialSet>>) -> Arc<MonomialSet> {
            if let Some(m) = memo.get(&e.node_id()) {
                return m.clone();
            }
            let set = match &e.0.kind {
                Kind::One => {
                    let mut s = MonomialSet::default();
                    s.add(Vec::new(), BigUint::one());
                    s
                }
                Kind::Var(sym, _) => {
                    let mut s = MonomialSet::default();
                    s.add(vec![*sym], BigUint::one());
                    s
                }
                Kind::Sum(children) => {
                    let mut s = MonomialSet::default();
                    for c in children {
                        for m in rec(c, memo).iter() {
                            s.add(m.vars, m.coeff);
                        }
                    }
                    s
                }
                Kind::Prod(children) => {
                    let mut acc = MonomialSet::default();
                    acc.add(Vec::new(), BigUint::one());
                    for c in children {
                        let rhs = rec(c, memo);
                        let mut next = MonomialSet::default();
                        for (lv, lc) in &acc.map {
                            for (rv, rc) in &rhs.map {
                                next.add(merge_vars(lv, rv), lc * rc);
                            }
                        }
                        acc = next;
                    }
                    acc
                }
            };
            let set = Arc::new(set);
            memo.insert(e.node_id(), set.clone());
            set
        }
        let out = rec(self, &mut HashMap::new());
        Ok(Arc::try_unwrap(out).unwrap_or_else(|a| (*a).clone()))
    }

    /// Exact bottom-up evaluation over the rationals, sharing work across
    /// repeated subterms.
    pub fn evaluate(
        &self,
        assignment: &BTreeMap<Symbol, BigRational>,
    ) -> Result<BigRational, ExprError> {
        let missing: Vec<String> = self
            .vars()
            .into_iter()
            .filter(|s| !assignment.contains_key(s))
            .map(|s| s.name().to_string())
            .collect();
        if !missing.is_empty() {
            return Err(ExprError::MissingSymbols(missing));
        }
        fn rec(
            e: &Expr,
            asg: &BTreeMap<Symbol, BigRational>,
            memo: &mut HashMap<usize, BigRational>,
        ) -> BigRational {
            if let Some(v) = memo.get(&e.node_id()) {
                return v.clone();
            }
            let v = match &e.0.kind {
                Kind::One => BigRational::one(),
                Kind::Var(s, _) => asg[s].clone(),
                Kind::Sum(c) => c
                    .iter()
                    .fold(BigRational::zero(), |a, x| a + rec(x, asg, memo)),
                Kind::Prod(c) => c
                    .iter()
                    .fold(BigRational::one(), |a, x| a * rec(x, asg, memo)),
            };
            memo.insert(e.node_id(), v.clone());
            v
        }
        Ok(rec(self, assignment, &mut HashMap::new()))
    }

    /// Evaluation in the prime field `GF(FIELD_PRIME)`.
    pub fn eval_mod(&self, assignment: &BTreeMap<Symbol, u64>) -> u64 {
        fn rec(e: &Expr, asg: &BTreeMap<Symbol, u64>, memo: &mut HashMap<usize, u64>) -> u64 {
            if let Some(&v) = memo.get(&e.node_id()) {
                return v;
            }
            let v = match &e.0.kind {
                Kind::One => 1,
                Kind::Var(s, _) => asg.get(s).copied().unwrap_or(0) % FIELD_PRIME,
                Kind::Sum(c) => c.iter().fold(0u64, |a, x| {
                    let b = rec(x, asg, memo);
                    ((u128::from(a) + u128::from(b)) % u128::from(FIELD_PRIME)) as u64
                }),
                Kind::Prod(c) => c.iter().fold(1u64, |a, x| {
                    let b = rec(x, asg, memo);
                    ((u128::from(a) * u128::from(b)) % u128::from(FIELD_PRIME)) as u64
                }),
            };
            memo.insert(e.node_id(), v);
            v
        }
        rec(self, assignment, &mut HashMap::new())
    }
}

// ---------------------------------------------------------------------------
// Size metrics

/// Size measurements of an expression, as written.
///
/// `var_occurrences` and `symbol_count` refer to the fully unfolded tree
/// (shared subterms counted each time they would be written); a k-ary sum
/// or product contributes k-1 operators. `expanded_symbol_count` is the
/// size of the canonical expansion: `N*(n-1) + N*(n-2) + (N-1)` for N
/// monomials of degree n-1.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SizeMetrics {
    pub var_occurrences: u128,
    pub symbol_count: u128,
    pub monomials: BigUint,
    pub expanded_symbol_count: BigUint,
}

impl Expr {
    pub fn size_metrics(&self) -> SizeMetrics {
        // (vars, operators) of the unfolded tree, per node.
        fn counts(e: &Expr, memo: &mut HashMap<usize, (u128, u128)>) -> (u128, u128) {
            if let Some(&v) = memo.get(&e.node_id()) {
                return v;
            }
            let v = match &e.0.kind {
                Kind::One => (0, 0),
                Kind::Var(..) => (1, 0),
                Kind::Sum(c) | Kind::Prod(c) => {
                    let mut vars = 0u128;
                    let mut ops = (c.len() as u128).saturating_sub(1);
                    for x in c {
                        let (cv, co) = counts(x, memo);
                        vars = vars.saturating_add(cv);
                        ops = ops.saturating_add(co);
                    }
                    (vars, ops)
                }
            };
            memo.insert(e.node_id(), v);
            v
        }
        // Total degree over all monomials of the expansion.
        fn degree_sum(e: &Expr, memo: &mut HashMap<usize, BigUint>) -> BigUint {
            if let Some(v) = memo.get(&e.node_id()) {
                return v.clone();
            }
            let v = match &e.0.kind {
                Kind::One => BigUint::zero(),
                Kind::Var(..) => BigUint::one(),
                Kind::Sum(c) => c
                    .iter()
                    .fold(BigUint::zero(), |a, x| a + degree_sum(x, memo)),
                Kind::Prod(c) => {
                    let mut s = BigUint::zero();
                    let mut n = BigUint::one();
                    for x in c {
                        let xs = degree_sum(x, memo);
                        s = &s * &x.0.count + xs * &n;
                        n *= &x.0.count;
                    }
                    s
                }
            };
            memo.insert(e.node_id(), v.clone());
            v
        }
        let (var_occurrences, ops) = counts(self, &mut HashMap::new());
        let s = degree_sum(self, &mut HashMap::new());
        let expanded = if s.is_zero() {
            BigUint::zero()
        } else {
            &s + &s - BigUint::one()
        };
        SizeMetrics {
            var_occurrences,
            symbol_count: var_occurrences.saturating_add(ops),
            monomials: self.0.count.clone(),
            expanded_symbol_count: expanded,
        }
    }
}

// ---------------------------------------------------------------------------
// Polynomial equality

/// Outcome of a polynomial-identity check. `exact` is false only when the
/// verdict came from randomized field evaluation.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Equivalence {
    pub equal: bool,
    pub exact: bool,
}

#[derive(Clone, Debug)]
pub struct EqConfig {
    pub expansion_cap: u64,
    pub trials: u32,
    pub seed: u64,
}

impl Default for EqConfig {
    fn default() -> Self {
        EqConfig {
            expansion_cap: DEFAULT_EXPANSION_CAP,
            trials: 16,
            seed: 0x5eed_0001,
        }
    }
}

pub fn poly_equal(a: &Expr, b: &Expr) -> Equivalence {
    poly_equal_with(a, b, &EqConfig::default())
}

/// Compares two expressions as polynomials.
///
/// When both expansions fit under `cfg.expansion_cap` the comparison is
/// exact; otherwise both sides are evaluated at `cfg.trials` random points
/// of `GF(FIELD_PRIME)`. A disagreeing evaluation proves inequality, so
/// only an `equal` verdict can be probabilistic.
pub fn poly_equal_with(a: &Expr, b: &Expr, cfg: &EqConfig) -> Equivalence {
    if a == b {
        return Equivalence {
            equal: true,
            exact: true,
        };
    }
    if a.0.count != b.0.count {
        return Equivalence {
            equal: false,
            exact: true,
        };
    }
    let (va, vb) = (a.vars(), b.vars());
    if va != vb {
        // equal polynomials mention the same variables
        return Equivalence {
            equal: false,
            exact: true,
        };
    }
    let cap = BigUint::from(cfg.expansion_cap);
    if a.0.count <= cap && b.0.count <= cap {
        let ea = a.expand_capped(cfg.expansion_cap).expect("under cap");
        let eb = b.expand_capped(cfg.expansion_cap).expect("under cap");
        return Equivalence {
            equal: ea == eb,
            exact: true,
        };
    }
    let vars: BTreeSet<Symbol> = va.union(&vb).copied().collect();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    for _ in 0..cfg.trials {
        let asg: BTreeMap<Symbol, u64> = vars
            .iter()
            .map(|&s| (s, rng.gen_range(0..FIELD_PRIME)))
            .collect();
        if a.eval_mod(&asg) != b.eval_mod(&asg) {
            return Equivalence {
                equal: false,
                exact: true,
            };
        }
    }
    Equivalence {
        equal: true,
        exact: false,
    }
}

// ---------------------------------------------------------------------------
// Printing and JSON

impl Expr {
    /// Human-readable form: products as juxtaposition, sums parenthesized
    /// inside products, e.g. `o a1 a2 (a4+a5)`.
    pub fn pretty(&self) -> String {
        fn go(e: &Expr, out: &mut String) {
            match &e.0.kind {
                Kind::One => out.push('1'),
                Kind::Var(_, n) => out.push_str(n),
                Kind::Sum(c) => {
                    for (i, x) in c.iter().enumerate() {
                        if i > 0 {
                            out.push('+');
                        }
                        go(x, out);
                    }
                }
                Kind::Prod(c) => {
                    for (i, x) in c.iter().enumerate() {
                        if i > 0 {
                            out.push(' ');
                        }
                        if matches!(x.0.kind, Kind::Sum(_)) {
                            out.push('(');
                            go(x, out);
                            out.push(')');
                        } else {
                            go(x, out);
                        }
                    }
                }
            }
        }
        let mut s = String::new();
        go(self, &mut s);
        s
    }

    /// Node-table JSON: `{"nodes":[...],"root":id}`, children referenced by
    /// index. Shared subterms are serialized once.
    pub fn to_json(&self) -> Value {
        let mut ids: HashMap<usize, usize> = HashMap::new();
        let mut nodes: Vec<Value> = Vec::new();
        fn visit(e: &Expr, ids: &mut HashMap<usize, usize>, nodes: &mut Vec<Value>) -> usize {
            if let Some(&i) = ids.get(&e.node_id()) {
                return i;
            }
            let val = match &e.0.kind {
                Kind::One => json!({ "one": true }),
                Kind::Var(_, n) => json!({ "var": n.as_ref() }),
                Kind::Sum(c) => {
                    let args: Vec<usize> = c.iter().map(|x| visit(x, ids, nodes)).collect();
                    json!({ "op": "sum", "args": args })
                }
                Kind::Prod(c) => {
                    let args: Vec<usize> = c.iter().map(|x| visit(x, ids, nodes)).collect();
                    json!({ "op": "prod", "args": args })
                }
            };
            let i = nodes.len();
            nodes.push(val);
            ids.insert(e.node_id(), i);
            i
        }
        let root = visit(self, &mut ids, &mut nodes);
        json!({ "nodes": nodes, "root": root })
    }

    /// Inline tree JSON with nested `args`, suitable for small expressions
    /// such as edge labels.
    pub fn to_json_tree(&self) -> Value {
        match &self.0.kind {
            Kind::One => json!({ "one": true }),
            Kind::Var(_, n) => json!({ "var": n.as_ref() }),
            Kind::Sum(c) => json!({
                "op": "sum",
                "args": c.iter().map(Expr::to_json_tree).collect::<Vec<_>>()
            }),
            Kind::Prod(c) => json!({
                "op": "prod",
                "args": c.iter().map(Expr::to_json_tree).collect::<Vec<_>>()
            }),
        }
    }

    /// Parses either the node-table or the inline tree form.
    pub fn from_json(v: &Value) -> Result<Expr, ExprError> {
        let obj = v
            .as_object()
            .ok_or_else(|| ExprError::Json("expected object".into()))?;
        if obj.contains_key("nodes") {
            let nodes = obj["nodes"]
                .as_array()
                .ok_or_else(|| ExprError::Json("\"nodes\" must be an array".into()))?;
            let root = obj
                .get("root")
                .and_then(Value::as_u64)
                .ok_or_else(|| ExprError::Json("missing \"root\" id".into()))?
                as usize;
            let mut built: Vec<Expr> = Vec::with_capacity(nodes.len());
            for n in nodes {
                let e = Expr::from_json_node(n, Some(&built))?;
                built.push(e);
            }
            return built
                .get(root)
                .cloned()
                .ok_or_else(|| ExprError::Json(format!("root id {root} out of range")));
        }
        Expr::from_json_node(v, None)
    }

    fn from_json_node(v: &Value, table: Option<&[Expr]>) -> Result<Expr, ExprError> {
        let obj = v
            .as_object()
            .ok_or_else(|| ExprError::Json("expected object node".into()))?;
        if obj.get("one").and_then(Value::as_bool) == Some(true) {
            return Ok(Expr::one());
        }
        if let Some(name) = obj.get("var").and_then(Value::as_str) {
            return Ok(Expr::var(name));
        }
        let op = obj
            .get("op")
            .and_then(Value::as_str)
            .ok_or_else(|| ExprError::Json("node lacks \"one\"/\"var\"/\"op\"".into()))?;
        let args = obj
            .get("args")
            .and_then(Value::as_array)
            .ok_or_else(|| ExprError::Json("op node lacks \"args\"".into()))?;
        let mut children = Vec::with_capacity(args.len());
        for a in args {
            let child = match table {
                Some(built) => {
                    let i = a
                        .as_u64()
                        .ok_or_else(|| ExprError::Json("arg must be a node id".into()))?
                        as usize;
                    built
                        .get(i)
                        .cloned()
                        .ok_or_else(|| ExprError::Json(format!("arg id {i} out of range")))?
                }
                None => Expr::from_json_node(a, None)?,
            };
            children.push(child);
        }
        match op {
            "sum" => {
                if children.is_empty() {
                    return Err(ExprError::Json("empty sum".into()));
                }
                Ok(Expr::sum(children))
            }
            "prod" => Ok(Expr::prod(children)),
            other => Err(ExprError::Json(format!("unknown op {other:?}"))),
        }
    }
}

/// log10 of a positive big integer, good to a few ulps even far beyond
/// the range of f64.
pub fn big_log10(n: &BigUint) -> f64 {
    if n.is_zero() {
        return f64::NEG_INFINITY;
    }
    if let Some(x) = n.to_f64() {
        if x.is_finite() {
            return x.log10();
        }
    }
    let bits = n.bits();
    let shift = bits.saturating_sub(53);
    let top = (n >> shift).to_f64().unwrap_or(f64::MAX);
    top.log10() + shift as f64 * std::f64::consts::LOG10_2
}
