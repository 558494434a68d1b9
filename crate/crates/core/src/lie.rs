//! The chainsaw Lie algebra a_d: per node gl(V_l) + gl(V_l) acting on the
//! two-step nilpotent part spanned by p, q, f.
//!
//! Node labels are 0-based residues mod n; matrix indices are 1-based.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::atomic::{AtomicU64, Ordering};

use serde::{Deserialize, Serialize};

use crate::par;
use crate::scalar::Q;
use crate::{Error, Result};

/// Basis labels. The derived order (F < P < Q < E < Eprime < G, then
/// lexicographic on the indices) is the PBW order.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Serialize, Deserialize)]
pub enum BasisIndex {
    F(usize, usize, usize),
    P(usize, usize),
    Q(usize, usize),
    E(usize, usize, usize),
    Eprime(usize, usize, usize),
    G(usize, usize, usize),
}

impl BasisIndex {
    pub fn node(&self) -> usize {
        match *self {
            BasisIndex::F(l, ..)
            | BasisIndex::P(l, _)
            | BasisIndex::Q(l, _)
            | BasisIndex::E(l, ..)
            | BasisIndex::Eprime(l, ..)
            | BasisIndex::G(l, ..) => l,
        }
    }

    pub fn name(&self) -> String {
        match *self {
            BasisIndex::F(l, i, j) => format!("f_{l}_{i}_{j}"),
            BasisIndex::P(l, i) => format!("p_{l}_{i}"),
            BasisIndex::Q(l, i) => format!("q_{l}_{i}"),
            BasisIndex::E(l, i, j) => format!("e_{l}_{i}_{j}"),
            BasisIndex::Eprime(l, i, j) => format!("e'_{l}_{i}_{j}"),
            BasisIndex::G(l, i, j) => format!("g_{l}_{i}_{j}"),
        }
    }

    pub fn parse(s: &str) -> Result<BasisIndex> {
        let bad = || Error::Parse(format!("bad basis letter {s:?}"));
        let mut parts = s.split('_');
        let tag = parts.next().ok_or_else(bad)?;
        let nums: Vec<usize> = parts.map(|p| p.parse().map_err(|_| bad())).collect::<Result<_>>()?;
        Ok(match (tag, nums.as_slice()) {
            ("f", [l, i, j]) => BasisIndex::F(*l, *i, *j),
            ("p", [l, i]) => BasisIndex::P(*l, *i),
            ("q", [l, i]) => BasisIndex::Q(*l, *i),
            ("e", [l, i, j]) => BasisIndex::E(*l, *i, *j),
            ("e'", [l, i, j]) => BasisIndex::Eprime(*l, *i, *j),
            ("g", [l, i, j]) => BasisIndex::G(*l, *i, *j),
            _ => return Err(bad()),
        })
    }
}

impl fmt::Display for BasisIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BasisMode {
    /// Basis e, e' for each gl(V_l) pair.
    Eprime,
    /// Basis e, g = e + e'; the g span the diagonal subalgebra.
    Diag,
}

/// Character of the torus T x sT as an exponent vector.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Serialize, Deserialize)]
pub struct TorusWeight {
    pub t: Vec<i32>,
    pub u: i32,
    pub v: i32,
    /// Exponents of st_{l,i}, node by node.
    pub st: Vec<Vec<i32>>,
}

impl TorusWeight {
    pub fn trivial(d: &[usize]) -> Self {
        TorusWeight { t: vec![0; d.len()], u: 0, v: 0, st: d.iter().map(|&k| vec![0; k]).collect() }
    }

    pub fn mul(&self, o: &TorusWeight) -> TorusWeight {
        TorusWeight {
            t: self.t.iter().zip(&o.t).map(|(a, b)| a + b).collect(),
            u: self.u + o.u,
            v: self.v + o.v,
            st: self.st.iter().zip(&o.st).map(|(a, b)| a.iter().zip(b).map(|(x, y)| x + y).collect()).collect(),
        }
    }

    pub fn inv(&self) -> TorusWeight {
        TorusWeight {
            t: self.t.iter().map(|a| -a).collect(),
            u: -self.u,
            v: -self.v,
            st: self.st.iter().map(|a| a.iter().map(|x| -x).collect()).collect(),
        }
    }

    pub fn is_st_trivial(&self) -> bool {
        self.st.iter().all(|a| a.iter().all(|&x| x == 0))
    }
}

impl fmt::Display for TorusWeight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        let mut push = |name: String, e: i32| {
            if e == 1 {
                parts.push(name);
            } else if e != 0 {
                parts.push(format!("{name}^{e}"));
            }
        };
        for (l, &e) in self.t.iter().enumerate() {
            push(format!("t{l}"), e);
        }
        push("u".into(), self.u);
        push("v".into(), self.v);
        for (l, row) in self.st.iter().enumerate() {
            for (i, &e) in row.iter().enumerate() {
                push(format!("st{l}_{}", i + 1), e);
            }
        }
        if parts.is_empty() {
            write!(f, "1")
        } else {
            write!(f, "{}", parts.join("*"))
        }
    }
}

static NEXT_ID: AtomicU64 = AtomicU64::new(1);

/// Sparse linear combination of basis vectors of one built algebra.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct LieElem {
    pub alg: u64,
    pub terms: BTreeMap<usize, Q>,
}

impl LieElem {
    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_scaled(&mut self, o: &LieElem, c: &Q) {
        for (k, x) in &o.terms {
            let e = self.terms.entry(*k).or_insert_with(Q::zero);
            *e = &*e + &(x * c);
            if e.is_zero() {
                self.terms.remove(k);
            }
        }
    }
}

type Combo = Vec<(BasisIndex, Q)>;

#[derive(Clone, Debug)]
pub struct ChainsawLie {
    id: u64,
    pub n: usize,
    pub d: Vec<usize>,
    pub mode: BasisMode,
    basis: Vec<BasisIndex>,
    index: HashMap<BasisIndex, usize>,
    /// Dense table of brackets of basis pairs as sparse combinations.
    table: Vec<Vec<(usize, Q)>>,
    weights: Vec<TorusWeight>,
}

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq)]
pub struct AlgebraDescriptor {
    pub n: usize,
    pub d: Vec<usize>,
    pub mode: BasisMode,
}

#[derive(Serialize, Debug, Clone)]
pub struct BracketEntry {
    pub x: String,
    pub y: String,
    pub value: Vec<(String, Q)>,
}

fn delta(a: usize, b: usize) -> bool {
    a == b
}

/// Bracket of two basis labels in the e/e' basis.
fn raw_bracket(n: usize, x: BasisIndex, y: BasisIndex) -> Combo {
    use BasisIndex as B;
    let succ = |k: usize| (k + 1) % n;
    let one = Q::one;
    let mone = || -Q::one();
    let mut out: Combo = Vec::new();
    match (x, y) {
        (B::E(l, i, j), B::E(k, a, b)) | (B::Eprime(l, i, j), B::Eprime(k, a, b)) if l == k => {
            let mk = |l, i, j| if matches!(x, B::E(..)) { B::E(l, i, j) } else { B::Eprime(l, i, j) };
            if delta(a, j) {
                out.push((mk(l, i, b), one()));
            }
            if delta(i, b) {
                out.push((mk(l, a, j), mone()));
            }
        }
        (B::E(l, i, j), B::Q(k, m)) if l == k && j == m => out.push((B::Q(k, i), one())),
        (B::Eprime(l, i, j), B::P(k, m)) if l == k && m == i => out.push((B::P(k, j), mone())),
        (B::Q(k, i), B::P(l, j)) if l == succ(k) => out.push((B::F(k, i, j), one())),
        (B::E(l, i, j), B::F(k, a, b)) if l == k && j == a => out.push((B::F(l, i, b), one())),
        (B::Eprime(l, i, j), B::F(k, a, b)) if l == succ(k) && b == i => out.push((B::F(k, a, j), mone())),
        _ => {}
    }
    out
}

/// Antisymmetric closure of `raw_bracket`: the rules above are written with
/// the "acting" letter first.
fn eprime_bracket(n: usize, x: BasisIndex, y: BasisIndex) -> Combo {
    let direct = raw_bracket(n, x, y);
    if !direct.is_empty() {
        return direct;
    }
    let rev = raw_bracket(n, y, x);
    rev.into_iter().map(|(b, c)| (b, -c)).collect()
}

fn merge(c: Combo) -> Combo {
    let mut m: BTreeMap<BasisIndex, Q> = BTreeMap::new();
    for (b, x) in c {
        let e = m.entry(b).or_insert_with(Q::zero);
        *e = &*e + &x;
    }
    m.into_iter().filter(|(_, x)| !x.is_zero()).collect()
}

impl ChainsawLie {
    pub fn build(n: usize, d: &[i64], mode: BasisMode) -> Result<ChainsawLie> {
        if n == 0 || d.len() != n {
            return Err(Error::Precondition(format!("dimension vector must have length n = {n}")));
        }
        if let Some(l) = d.iter().position(|&x| x < 0) {
            return Err(Error::NegativeDimension(l));
        }
        let d: Vec<usize> = d.iter().map(|&x| x as usize).collect();
        let mut basis = Vec::new();
        for l in 0..n {
            let dl = d[l];
            let dn = d[(l + 1) % n];
            for i in 1..=dl {
                for j in 1..=dn {
                    basis.push(BasisIndex::F(l, i, j));
                }
                basis.push(BasisIndex::P(l, i));
                basis.push(BasisIndex::Q(l, i));
                for j in 1..=dl {
                    basis.push(BasisIndex::E(l, i, j));
                    basis.push(match mode {
                        BasisMode::Eprime => BasisIndex::Eprime(l, i, j),
                        BasisMode::Diag => BasisIndex::G(l, i, j),
                    });
                }
            }
        }
        basis.sort();
        let index: HashMap<BasisIndex, usize> = basis.iter().enumerate().map(|(k, b)| (*b, k)).collect();
        let nb = basis.len();
        let expand = |b: BasisIndex| -> Combo {
            match b {
                BasisIndex::G(l, i, j) => vec![(BasisIndex::E(l, i, j), Q::one()), (BasisIndex::Eprime(l, i, j), Q::one())],
                other => vec![(other, Q::one())],
            }
        };
        let contract = |c: Combo| -> Combo {
            if mode == BasisMode::Eprime {
                return c;
            }
            let mut out = Vec::new();
            for (b, x) in c {
                match b {
                    BasisIndex::Eprime(l, i, j) => {
                        out.push((BasisIndex::G(l, i, j), x.clone()));
                        out.push((BasisIndex::E(l, i, j), -x));
                    }
                    other => out.push((other, x)),
                }
            }
            out
        };
        let mut table = vec![Vec::new(); nb * nb];
        for a in 0..nb {
            for b in 0..nb {
                if a == b {
                    continue;
                }
                let mut acc = Vec::new();
                for (x, cx) in expand(basis[a]) {
                    for (y, cy) in expand(basis[b]) {
                        for (z, cz) in eprime_bracket(n, x, y) {
                            acc.push((z, &(&cx * &cy) * &cz));
                        }
                    }
                }
                let combo = merge(contract(merge(acc)));
                table[a * nb + b] = combo.into_iter().map(|(z, c)| (index[&z], c)).collect();
            }
        }
        let mut alg = ChainsawLie {
            id: NEXT_ID.fetch_add(1, Ordering::Relaxed),
            n,
            d,
            mode,
            basis,
            index,
            table,
            weights: Vec::new(),
        };
        alg.weights = alg.basis.iter().map(|b| alg.compute_weight(b)).collect();
        Ok(alg)
    }

    pub fn id(&self) -> u64 {
        self.id
    }

    pub fn descriptor(&self) -> AlgebraDescriptor {
        AlgebraDescriptor { n: self.n, d: self.d.clone(), mode: self.mode }
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[BasisIndex] {
        &self.basis
    }

    pub fn names(&self) -> Vec<String> {
        self.basis.iter().map(|b| b.name()).collect()
    }

    pub fn pos(&self, b: BasisIndex) -> Result<usize> {
        self.index.get(&b).copied().ok_or_else(|| Error::IndexOutOfRange(b.name()))
    }

    pub fn has(&self, b: BasisIndex) -> bool {
        self.index.contains_key(&b)
    }

    /// Bracket of two basis positions.
    pub fn bracket_basis(&self, a: usize, b: usize) -> &[(usize, Q)] {
        &self.table[a * self.basis.len() + b]
    }

    pub fn elem(&self, terms: &[(BasisIndex, Q)]) -> Result<LieElem> {
        let mut e = LieElem { alg: self.id, terms: BTreeMap::new() };
        for (b, c) in terms {
            let k = self.pos(*b)?;
            let entry = e.terms.entry(k).or_insert_with(Q::zero);
            *entry = &*entry + c;
            if entry.is_zero() {
                e.terms.remove(&k);
            }
        }
        Ok(e)
    }

    pub fn basis_elem(&self, b: BasisIndex) -> Result<LieElem> {
        self.elem(&[(b, Q::one())])
    }

    pub fn zero(&self) -> LieElem {
        LieElem { alg: self.id, terms: BTreeMap::new() }
    }

    pub fn bracket(&self, x: &LieElem, y: &LieElem) -> Result<LieElem> {
        if x.alg != self.id || y.alg != self.id {
            return Err(Error::MismatchedAlgebras);
        }
        let mut out = self.zero();
        for (a, ca) in &x.terms {
            for (b, cb) in &y.terms {
                let cab = ca * cb;
                for (z, cz) in self.bracket_basis(*a, *b) {
                    let e = out.terms.entry(*z).or_insert_with(Q::zero);
                    *e = &*e + &(&cab * cz);
                }
            }
        }
        out.terms.retain(|_, c| !c.is_zero());
        Ok(out)
    }

    fn compute_weight(&self, b: &BasisIndex) -> TorusWeight {
        let n = self.n;
        let mut w = TorusWeight::trivial(&self.d);
        match *b {
            BasisIndex::E(l, i, j) | BasisIndex::Eprime(l, i, j) | BasisIndex::G(l, i, j) => {
                w.v = 1;
                w.st[l][i - 1] += 1;
                w.st[l][j - 1] -= 1;
            }
            BasisIndex::F(l, i, j) => {
                w.u = (l == 0) as i32;
                w.st[l][i - 1] += 1;
                w.st[(l + 1) % n][j - 1] -= 1;
            }
            BasisIndex::P(l, i) => {
                w.u = (l == 1 % n) as i32;
                w.v = 1;
                w.t[(l + n - 1) % n] += 1;
                w.st[l][i - 1] -= 1;
            }
            BasisIndex::Q(l, i) => {
                w.t[l] -= 1;
                w.st[l][i - 1] += 1;
            }
        }
        w
    }

    pub fn weight_of(&self, b: BasisIndex) -> Result<TorusWeight> {
        Ok(self.weights[self.pos(b)?].clone())
    }

    pub fn weight_at(&self, k: usize) -> &TorusWeight {
        &self.weights[k]
    }

    /// Functional mu(G(l,i,j)) = mu_l delta_ij on the diagonal subalgebra,
    /// as a vector over the basis (zero away from G letters).
    pub fn diag_character(&self, mu: &[Q]) -> Result<Vec<Q>> {
        if mu.len() != self.n {
            return Err(Error::Precondition(format!("mu must have length {}", self.n)));
        }
        Ok(self
            .basis
            .iter()
            .map(|b| match *b {
                BasisIndex::G(l, i, j) if i == j => mu[l].clone(),
                _ => Q::zero(),
            })
            .collect())
    }

    pub fn diag_positions(&self) -> Vec<usize> {
        (0..self.dim()).filter(|&k| matches!(self.basis[k], BasisIndex::G(..))).collect()
    }

    pub fn structure_constants(&self) -> Vec<BracketEntry> {
        let nb = self.dim();
        let mut out = Vec::new();
        for a in 0..nb {
            for b in a + 1..nb {
                let v = self.bracket_basis(a, b);
                if !v.is_empty() {
                    out.push(BracketEntry {
                        x: self.basis[a].name(),
                        y: self.basis[b].name(),
                        value: v.iter().map(|(z, c)| (self.basis[*z].name(), c.clone())).collect(),
                    });
                }
            }
        }
        out
    }

    /// Antisymmetry failures and Jacobi failures over all basis pairs/triples.
    pub fn jacobi_check(&self) -> JacobiOutcome {
        let nb = self.dim();
        let mut antisym_failures = 0usize;
        for a in 0..nb {
            for b in 0..nb {
                let x = self.bracket_basis(a, b);
                let y = self.bracket_basis(b, a);
                let mut m: BTreeMap<usize, Q> = BTreeMap::new();
                for (z, c) in x.iter().chain(y.iter()) {
                    let e = m.entry(*z).or_insert_with(Q::zero);
                    *e = &*e + c;
                }
                if m.values().any(|c| !c.is_zero()) {
                    antisym_failures += 1;
                }
            }
        }
        let firsts: Vec<usize> = (0..nb).collect();
        let failures: Vec<(usize, usize, usize)> = par::flat_map(&firsts, |&a| {
            let mut bad = Vec::new();
            for b in a + 1..nb {
                for c in b + 1..nb {
                    if !self.jacobiator_zero(a, b, c) {
                        bad.push((a, b, c));
                    }
                }
            }
            bad
        });
        let triples = nb * nb.saturating_sub(1) * nb.saturating_sub(2) / 6;
        JacobiOutcome {
            dim: nb,
            triples,
            antisymmetry_failures: antisym_failures,
            jacobi_failures: failures
                .iter()
                .map(|&(a, b, c)| [self.basis[a].name(), self.basis[b].name(), self.basis[c].name()])
                .collect(),
        }
    }

    fn jacobiator_zero(&self, a: usize, b: usize, c: usize) -> bool {
        let mut acc: BTreeMap<usize, Q> = BTreeMap::new();
        for (x, y, z) in [(a, b, c), (b, c, a), (c, a, b)] {
            for (w, cw) in self.bracket_basis(x, y) {
                for (v, cv) in self.bracket_basis(*w, z) {
                    let e = acc.entry(*v).or_insert_with(Q::zero);
                    *e = &*e + &(cw * cv);
                }
            }
        }
        acc.values().all(|c| c.is_zero())
    }

    /// Weight defect of each nonzero bracket: weight(z) - weight(x) - weight(y)
    /// for every output term z; the bracket is homogeneous iff this set has one
    /// element.
    pub fn bracket_weight_shifts(&self) -> Vec<TorusWeight> {
        let nb = self.dim();
        let mut seen: Vec<TorusWeight> = Vec::new();
        for a in 0..nb {
            for b in 0..nb {
                let wab = self.weights[a].mul(&self.weights[b]);
                for (z, _) in self.bracket_basis(a, b) {
                    let s = self.weights[*z].mul(&wab.inv());
                    if !seen.contains(&s) {
                        seen.push(s);
                    }
                }
            }
        }
        seen
    }
}

#[derive(Serialize, Debug, Clone)]
pub struct JacobiOutcome {
    pub dim: usize,
    pub triples: usize,
    pub antisymmetry_failures: usize,
    pub jacobi_failures: Vec<[String; 3]>,
}

impl JacobiOutcome {
    pub fn passed(&self) -> bool {
        self.antisymmetry_failures == 0 && self.jacobi_failures.is_empty()
    }

    pub fn to_report(&self, shape: &str) -> crate::report::Report {
        use crate::report::{Report, Status};
        let st = |ok: bool| if ok { Status::Pass } else { Status::Fail };
        let mut rep = Report::new();
        rep.push("antisymmetry", shape, st(self.antisymmetry_failures == 0)).detail =
            Some(format!("{} basis pairs", self.dim * self.dim));
        let e = rep.push("jacobi", shape, st(self.jacobi_failures.is_empty()));
        e.detail = Some(format!("{} triples, {} failures", self.triples, self.jacobi_failures.len()));
        rep
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use BasisIndex as B;

    #[test]
    fn paper_brackets() {
        let a = ChainsawLie::build(3, &[0, 1, 1], BasisMode::Eprime).unwrap();
        let x = a.basis_elem(B::Q(1, 1)).unwrap();
        let y = a.basis_elem(B::P(2, 1)).unwrap();
        assert_eq!(a.bracket(&x, &y).unwrap(), a.basis_elem(B::F(1, 1, 1)).unwrap());

        let b = ChainsawLie::build(2, &[1, 1], BasisMode::Eprime).unwrap();
        let p = b.basis_elem(B::P(1, 1)).unwrap();
        let q = b.basis_elem(B::Q(0, 1)).unwrap();
        assert_eq!(b.bracket(&p, &q).unwrap(), b.elem(&[(B::F(0, 1, 1), -Q::one())]).unwrap());

        let s = ChainsawLie::build(2, &[0, 2], BasisMode::Eprime).unwrap();
        let e = s.basis_elem(B::E(1, 1, 2)).unwrap();
        let q2 = s.basis_elem(B::Q(1, 2)).unwrap();
        assert_eq!(s.bracket(&e, &q2).unwrap(), s.basis_elem(B::Q(1, 1)).unwrap());
    }

    #[test]
    fn mismatched() {
        let a = ChainsawLie::build(2, &[0, 1], BasisMode::Eprime).unwrap();
        let b = ChainsawLie::build(2, &[0, 1], BasisMode::Eprime).unwrap();
        let x = a.basis_elem(B::E(1, 1, 1)).unwrap();
        let y = b.basis_elem(B::Q(1, 1)).unwrap();
        assert_eq!(a.bracket(&x, &y), Err(Error::MismatchedAlgebras));
        assert!(matches!(ChainsawLie::build(2, &[0, -1], BasisMode::Eprime), Err(Error::NegativeDimension(1))));
    }

    #[test]
    fn jacobi_and_homogeneity() {
        for (n, d) in [(1usize, vec![2i64]), (2, vec![1, 1]), (2, vec![1, 2]), (3, vec![0, 1, 1]), (3, vec![1, 2, 1])] {
            for mode in [BasisMode::Eprime, BasisMode::Diag] {
                let a = ChainsawLie::build(n, &d, mode).unwrap();
                let j = a.jacobi_check();
                assert!(j.passed(), "{n} {d:?} {mode:?} {:?}", j.jacobi_failures.first());
                let shifts = a.bracket_weight_shifts();
                assert_eq!(shifts.len(), 1, "{n} {d:?}: {shifts:?}");
                assert_eq!(shifts[0].v, -1);
            }
        }
    }
}
