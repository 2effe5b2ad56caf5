//! Shared test support: an independent sparse multivariate polynomial type
//! with exact GCD (for checking the factor-matching GCD against ground
//! truth), plus chi-square helpers and oracle-side monomial extraction.

#![allow(dead_code)]

use kirchhoff::digraph::Digraph;
use kirchhoff::expr::{MonomialSet, Symbol};
use kirchhoff::oracle;
use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use std::collections::BTreeMap;
use std::rc::Rc;

/// Sparse polynomial over a fixed variable list; terms are exponent
/// vectors (lex-ordered) with integer coefficients.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Poly {
    pub vars: Rc<Vec<Symbol>>,
    pub terms: BTreeMap<Vec<u32>, BigInt>,
}

impl Poly {
    pub fn zero(vars: Rc<Vec<Symbol>>) -> Poly {
        Poly {
            vars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(vars: Rc<Vec<Symbol>>, c: BigInt) -> Poly {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(vec![0; vars.len()], c);
        }
        Poly { vars, terms }
    }

    pub fn from_monomials(vars: Rc<Vec<Symbol>>, set: &MonomialSet) -> Poly {
        let index: BTreeMap<Symbol, usize> =
            vars.iter().enumerate().map(|(i, &s)| (s, i)).collect();
        let mut terms = BTreeMap::new();
        for m in set.iter() {
            let mut exp = vec![0u32; vars.len()];
            for s in &m.vars {
                exp[index[s]] += 1;
            }
            *terms.entry(exp).or_insert_with(BigInt::zero) += BigInt::from(m.coeff.clone());
        }
        terms.retain(|_, c| !c.is_zero());
        Poly { vars, terms }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|e| e.iter().all(|&x| x == 0))
    }

    fn insert(&mut self, exp: Vec<u32>, c: BigInt) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(exp) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        let mut out = Poly::zero(self.vars.clone());
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                let exp: Vec<u32> = ea.iter().zip(eb).map(|(x, y)| x + y).collect();
                out.insert(exp, ca * cb);
            }
        }
        out
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.insert(e.clone(), -c.clone());
        }
        out
    }

    fn leading(&self) -> Option<(&Vec<u32>, &BigInt)> {
        self.terms.iter().next_back()
    }

    /// Exact division; `None` when `other` does not divide `self`.
    pub fn divide_exact(&self, other: &Poly) -> Option<Poly> {
        if other.is_zero() {
            return None;
        }
        let mut quotient = Poly::zero(self.vars.clone());
        let mut rem = self.clone();
        let (lt_b, lc_b) = other.leading().map(|(e, c)| (e.clone(), c.clone()))?;
        while !rem.is_zero() {
            let (lt_r, lc_r) = rem.leading().map(|(e, c)| (e.clone(), c.clone()))?;
            if lt_r.iter().zip(&lt_b).any(|(r, b)| r < b) {
                return None;
            }
            let (q, r) = lc_r.div_rem(&lc_b);
            if !r.is_zero() {
                return None;
            }
            let exp: Vec<u32> = lt_r.iter().zip(&lt_b).map(|(r, b)| r - b).collect();
            let mut t = Poly::zero(self.vars.clone());
            t.insert(exp.clone(), q.clone());
            quotient.insert(exp, q);
            rem = rem.sub(&t.mul(other));
        }
        Some(quotient)
    }

    pub fn degree_in(&self, var: usize) -> u32 {
        self.terms.keys().map(|e| e[var]).max().unwrap_or(0)
    }

    /// Splits `self = hi * x + lo` with respect to variable index `var`
    /// (requires degree <= 1 in that variable).
    fn split(&self, var: usize) -> (Poly, Poly) {
        let mut hi = Poly::zero(self.vars.clone());
        let mut lo = Poly::zero(self.vars.clone());
        for (e, c) in &self.terms {
            debug_assert!(e[var] <= 1, "split requires multilinearity");
            if e[var] == 1 {
                let mut e2 = e.clone();
                e2[var] = 0;
                hi.insert(e2, c.clone());
            } else {
                lo.insert(e.clone(), c.clone());
            }
        }
        (hi, lo)
    }

    fn constant_value(&self) -> BigInt {
        self.terms
            .get(&vec![0; self.vars.len()])
            .cloned()
            .unwrap_or_else(BigInt::zero)
    }

    /// Sign-normalized copy: leading coefficient positive.
    fn normalized(&self) -> Poly {
        match self.leading() {
            Some((_, c)) if c.is_negative() => {
                let mut out = Poly::zero(self.vars.clone());
                for (e, c) in &self.terms {
                    out.insert(e.clone(), -c.clone());
                }
                out
            }
            _ => self.clone(),
        }
    }
}

/// GCD of two polynomials that are multilinear (every exponent 0 or 1) —
/// the shape of arborescence enumerators. Works variable by variable: a
/// poly linear in x splits as `hi*x + lo`; after removing x-contents, the
/// primitive parts share an x-part iff the cross-difference vanishes.
pub fn poly_gcd(a: &Poly, b: &Poly) -> Poly {
    if a.is_zero() {
        return b.normalized();
    }
    if b.is_zero() {
        return a.normalized();
    }
    let split_var = (0..a.vars.len())
        .rev()
        .find(|&i| a.degree_in(i) > 0 || b.degree_in(i) > 0);
    let x = match split_var {
        None => {
            let g = a.constant_value().gcd(&b.constant_value());
            return Poly::constant(a.vars.clone(), g);
        }
        Some(x) => x,
    };
    let (da, db) = (a.degree_in(x), b.degree_in(x));
    assert!(da <= 1 && db <= 1, "enumerators are multilinear");
    if da == 0 {
        let (b1, b0) = b.split(x);
        return poly_gcd(a, &poly_gcd(&b1, &b0)).normalized();
    }
    if db == 0 {
        let (a1, a0) = a.split(x);
        return poly_gcd(b, &poly_gcd(&a1, &a0)).normalized();
    }
    let (a1, a0) = a.split(x);
    let (b1, b0) = b.split(x);
    let ca = poly_gcd(&a1, &a0);
    let cb = poly_gcd(&b1, &b0);
    let cc = poly_gcd(&ca, &cb);
    let pa1 = a1.divide_exact(&ca).expect("content divides");
    let pa0 = a0.divide_exact(&ca).expect("content divides");
    let pb1 = b1.divide_exact(&cb).expect("content divides");
    let pb0 = b0.divide_exact(&cb).expect("content divides");
    let cross = pa1.mul(&pb0).sub(&pb1.mul(&pa0));
    if cross.is_zero() {
        // primitive parts agree up to sign: gcd = cc * pp(a)
        let pa = a.divide_exact(&ca).expect("content divides");
        cc.mul(&pa).normalized()
    } else {
        cc.normalized()
    }
}

/// Monomial multiset of a digraph's enumerator straight from the
/// enumeration oracle (edge-id sets mapped through labels), kept
/// independent of the expression-expansion machinery wherever labels are
/// plain variables.
pub fn oracle_monomials(g: &Digraph) -> BTreeMap<Vec<Symbol>, BigUint> {
    let arbs = oracle::enumerate_capped(g, g.vertex_count()).expect("within cap");
    let mut out: BTreeMap<Vec<Symbol>, BigUint> = BTreeMap::new();
    for a in &arbs.items {
        let mut vars: Vec<Symbol> = a
            .edges
            .iter()
            .map(|&id| {
                g.edge(id)
                    .unwrap()
                    .label
                    .var_symbol()
                    .expect("plain variable labels")
            })
            .collect();
        vars.sort_unstable();
        *out.entry(vars).or_insert_with(BigUint::zero) += BigUint::one();
    }
    out
}

/// A MonomialSet as a plain map, for comparing against `oracle_monomials`.
pub fn monomial_map(set: &MonomialSet) -> BTreeMap<Vec<Symbol>, BigUint> {
    set.iter().map(|m| (m.vars, m.coeff)).collect()
}

/// Upper critical value of the chi-square distribution by the
/// Wilson-Hilferty approximation; `z` is the standard-normal quantile of
/// the desired significance (3.0902 for 1e-3).
pub fn chi_square_critical(df: usize, z: f64) -> f64 {
    let df = df as f64;
    let t = 1.0 - 2.0 / (9.0 * df) + z * (2.0 / (9.0 * df)).sqrt();
    df * t * t * t
}

/// Chi-square statistic against a uniform distribution over `cells`.
pub fn chi_square_uniform(counts: &[usize], draws: usize) -> f64 {
    let cells = counts.len() as f64;
    let expected = draws as f64 / cells;
    counts
        .iter()
        .map(|&c| {
            let d = c as f64 - expected;
            d * d / expected
        })
        .sum()
}
