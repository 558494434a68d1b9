//! The enveloping algebra U(a_d) in PBW normal form, reduction modulo the
//! diagonal character, the quadratic ideal R, and the quantum relation suites.
//!
//! Words are nondecreasing sequences of basis positions; the basis is sorted
//! in PBW order, so G letters (diag mode) always sit at the right end.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::sync::{Arc, Mutex, RwLock};

use serde::{Deserialize, Serialize};

use crate::lie::{BasisIndex, BasisMode, ChainsawLie};
use crate::linalg::{self, Echelon, SparseVec};
use crate::par;
use crate::poisson::{deformation_shifts, is_single_node, Generator};
use crate::poly::MultiPoly;
use crate::report::{Report, Status};
use crate::scalar::{binomial, Q};
use crate::{Error, Result};

pub type Word = Vec<u16>;

/// Sparse combination of normal-ordered words.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct UElem {
    terms: BTreeMap<Word, Q>,
}

impl UElem {
    pub fn zero() -> Self {
        UElem::default()
    }

    pub fn scalar(c: Q) -> Self {
        UElem::word(Vec::new(), c)
    }

    pub fn one() -> Self {
        UElem::scalar(Q::one())
    }

    /// A single word; the caller guarantees it is sorted.
    pub fn word(w: Word, c: Q) -> Self {
        let mut e = UElem::zero();
        e.add_term(w, c);
        e
    }

    pub fn terms(&self) -> &BTreeMap<Word, Q> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, w: Word, c: Q) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&w) {
            Some(x) => {
                *x += &c;
                if x.is_zero() {
                    self.terms.remove(&w);
                }
            }
            None => {
                self.terms.insert(w, c);
            }
        }
    }

    pub fn add_scaled(&mut self, o: &UElem, c: &Q) {
        if c.is_zero() {
            return;
        }
        for (w, x) in &o.terms {
            self.add_term(w.clone(), x * c);
        }
    }

    pub fn add(&self, o: &UElem) -> UElem {
        let mut r = self.clone();
        r.add_scaled(o, &Q::one());
        r
    }

    pub fn sub(&self, o: &UElem) -> UElem {
        let mut r = self.clone();
        r.add_scaled(o, &-Q::one());
        r
    }

    pub fn neg(&self) -> UElem {
        self.scale(&-Q::one())
    }

    pub fn scale(&self, c: &Q) -> UElem {
        if c.is_zero() {
            return UElem::zero();
        }
        UElem { terms: self.terms.iter().map(|(w, x)| (w.clone(), x * c)).collect() }
    }

    /// PBW degree (longest word).
    pub fn degree(&self) -> Option<usize> {
        self.terms.keys().map(|w| w.len()).max()
    }

    pub fn coeff(&self, w: &[u16]) -> Q {
        self.terms.get(w).cloned().unwrap_or_else(Q::zero)
    }
}

/// JSON form of one term.
#[derive(Serialize, Deserialize, Debug, Clone, PartialEq)]
pub struct TermJson {
    pub word: Vec<String>,
    pub coeff: Q,
}

/// Linear combination of letters and the unit (`None`).
pub type Lin = Vec<(Option<u16>, Q)>;

const CACHE_CAP: usize = 2_000_000;

/// U(a_d) with a memoized word-times-letter product.
pub struct Uea {
    alg: Arc<ChainsawLie>,
    /// Torus weights with the v-exponent lowered by one per letter, which
    /// makes the commutator homogeneous.
    wt: Vec<Vec<i64>>,
    cache: RwLock<HashMap<(Word, u16), UElem>>,
}

impl std::fmt::Debug for Uea {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Uea(n={}, d={:?}, {:?})", self.alg.n, self.alg.d, self.alg.mode)
    }
}

fn flat_weight(w: &crate::lie::TorusWeight) -> Vec<i64> {
    let mut v: Vec<i64> = w.t.iter().map(|&x| x as i64).collect();
    v.push(w.u as i64);
    v.push(w.v as i64 - 1);
    for row in &w.st {
        v.extend(row.iter().map(|&x| x as i64));
    }
    v
}

impl Uea {
    pub fn new(n: usize, d: &[i64], mode: BasisMode) -> Result<Uea> {
        Ok(Uea::from_algebra(Arc::new(ChainsawLie::build(n, d, mode)?)))
    }

    pub fn from_algebra(alg: Arc<ChainsawLie>) -> Uea {
        let wt = (0..alg.dim()).map(|k| flat_weight(alg.weight_at(k))).collect();
        Uea { alg, wt, cache: RwLock::new(HashMap::new()) }
    }

    pub fn algebra(&self) -> &ChainsawLie {
        &self.alg
    }

    pub fn algebra_arc(&self) -> &Arc<ChainsawLie> {
        &self.alg
    }

    pub fn n(&self) -> usize {
        self.alg.n
    }

    pub fn d(&self) -> &[usize] {
        &self.alg.d
    }

    fn pos(&self, b: BasisIndex) -> Result<u16> {
        Ok(self.alg.pos(b)? as u16)
    }

    /// A letter of either basis as a combination of this algebra's basis.
    pub fn lin(&self, b: BasisIndex) -> Result<Lin> {
        let one = Q::one();
        Ok(match (self.alg.mode, b) {
            (BasisMode::Diag, BasisIndex::Eprime(l, i, j)) => vec![
                (Some(self.pos(BasisIndex::G(l, i, j))?), one.clone()),
                (Some(self.pos(BasisIndex::E(l, i, j))?), -one),
            ],
            (BasisMode::Eprime, BasisIndex::G(l, i, j)) => vec![
                (Some(self.pos(BasisIndex::E(l, i, j))?), one.clone()),
                (Some(self.pos(BasisIndex::Eprime(l, i, j))?), one),
            ],
            _ => vec![(Some(self.pos(b)?), one)],
        })
    }

    pub fn letter(&self, b: BasisIndex) -> Result<UElem> {
        Ok(self.right_mul_lin(&UElem::one(), &self.lin(b)?))
    }

    pub fn letter_name(&self, k: u16) -> String {
        self.alg.basis()[k as usize].name()
    }

    /// Normal form of (sorted word) * letter.
    pub fn mul_word_letter(&self, w: &[u16], x: u16) -> UElem {
        match w.last() {
            None => return UElem::word(vec![x], Q::one()),
            Some(&y) if y <= x => {
                let mut v = w.to_vec();
                v.push(x);
                return UElem::word(v, Q::one());
            }
            _ => {}
        }
        let key = (w.to_vec(), x);
        if let Some(hit) = self.cache.read().expect("cache").get(&key) {
            return hit.clone();
        }
        let y = *w.last().expect("nonempty");
        let head = &w[..w.len() - 1];
        // w x = head y x = head x y + head [y, x]
        let mut out = UElem::zero();
        for (t, c) in &self.mul_word_letter(head, x).terms {
            out.add_scaled(&self.mul_word_letter(t, y), c);
        }
        for (z, cz) in self.alg.bracket_basis(y as usize, x as usize) {
            out.add_scaled(&self.mul_word_letter(head, *z as u16), cz);
        }
        let mut cache = self.cache.write().expect("cache");
        if cache.len() > CACHE_CAP {
            cache.clear();
        }
        cache.insert(key, out.clone());
        out
    }

    pub fn right_mul_letter(&self, a: &UElem, x: u16) -> UElem {
        let mut out = UElem::zero();
        for (w, c) in &a.terms {
            out.add_scaled(&self.mul_word_letter(w, x), c);
        }
        out
    }

    pub fn right_mul_lin(&self, a: &UElem, lin: &[(Option<u16>, Q)]) -> UElem {
        let mut out = UElem::zero();
        for (x, c) in lin {
            match x {
                None => out.add_scaled(a, c),
                Some(x) => out.add_scaled(&self.right_mul_letter(a, *x), c),
            }
        }
        out
    }

    pub fn mul(&self, a: &UElem, b: &UElem) -> UElem {
        let mut out = UElem::zero();
        for (u, cu) in &a.terms {
            for (v, cv) in &b.terms {
                let c = cu * cv;
                if u.last().zip(v.first()).map_or(true, |(x, y)| x <= y) {
                    let mut w = u.clone();
                    w.extend_from_slice(v);
                    out.add_term(w, c);
                    continue;
                }
                let mut acc = UElem::word(u.clone(), Q::one());
                for &x in v {
                    acc = self.right_mul_letter(&acc, x);
                }
                out.add_scaled(&acc, &c);
            }
        }
        out
    }

    pub fn commutator(&self, a: &UElem, b: &UElem) -> UElem {
        self.mul(a, b).sub(&self.mul(b, a))
    }

    /// Normal form of an arbitrary word of letters (e' letters are expanded
    /// in diag mode).
    pub fn pbw_normal_form(&self, letters: &[BasisIndex], c: Q) -> Result<UElem> {
        let mut acc = UElem::scalar(c);
        for b in letters {
            acc = self.right_mul_lin(&acc, &self.lin(*b)?);
        }
        Ok(acc)
    }

    pub fn word_weight(&self, w: &[u16]) -> Vec<i64> {
        let mut acc = vec![0i64; self.wt.first().map_or(0, |x| x.len())];
        for &k in w {
            for (a, b) in acc.iter_mut().zip(&self.wt[k as usize]) {
                *a += b;
            }
        }
        acc
    }

    /// Common weight of all terms, if homogeneous.
    pub fn homogeneous_weight(&self, x: &UElem) -> Option<Vec<i64>> {
        let mut it = x.terms.keys().map(|w| self.word_weight(w));
        let first = it.next()?;
        if it.all(|w| w == first) {
            Some(first)
        } else {
            None
        }
    }

    /// Top-degree symbol in S(a) (same basis).
    pub fn symbol(&self, x: &UElem) -> MultiPoly {
        let vars = Arc::new(self.alg.names());
        let mut p = MultiPoly::zero(&vars);
        let Some(top) = x.degree() else { return p };
        let nv = self.alg.dim();
        for (w, c) in &x.terms {
            if w.len() == top {
                let mut e = vec![0u32; nv];
                for &k in w {
                    e[k as usize] += 1;
                }
                p.add_term(e, c.clone());
            }
        }
        p
    }

    /// Embed a polynomial of S(a) by symmetric (sorted-word) lift.
    pub fn lift(&self, p: &MultiPoly) -> UElem {
        let mut out = UElem::zero();
        for (e, c) in p.terms() {
            let mut w = Vec::new();
            for (k, &m) in e.iter().enumerate() {
                for _ in 0..m {
                    w.push(k as u16);
                }
            }
            out.add_term(w, c.clone());
        }
        out
    }

    pub fn to_json(&self, x: &UElem) -> Vec<TermJson> {
        x.terms
            .iter()
            .map(|(w, c)| TermJson { word: w.iter().map(|&k| self.letter_name(k)).collect(), coeff: c.clone() })
            .collect()
    }

    pub fn from_json(&self, terms: &[TermJson]) -> Result<UElem> {
        let mut out = UElem::zero();
        for t in terms {
            let letters: Vec<BasisIndex> = t.word.iter().map(|s| BasisIndex::parse(s)).collect::<Result<_>>()?;
            out = out.add(&self.pbw_normal_form(&letters, t.coeff.clone())?);
        }
        Ok(out)
    }

    fn e_lin(&self, l: usize, i: usize, j: usize, shift: &Q, prime: bool) -> Result<Lin> {
        let mut lin = self.lin(if prime { BasisIndex::Eprime(l, i, j) } else { BasisIndex::E(l, i, j) })?;
        if i == j && !shift.is_zero() {
            lin.push((None, -shift.clone()));
        }
        Ok(lin)
    }

    /// v * M where v is a row of elements and M the matrix of letters.
    fn row_times(&self, v: &[UElem], l: usize, shift: &Q, prime: bool) -> Result<Vec<UElem>> {
        let dl = self.d()[l];
        (1..=dl)
            .map(|j| {
                let mut acc = UElem::zero();
                for (m, x) in v.iter().enumerate() {
                    if !x.is_zero() {
                        acc = acc.add(&self.right_mul_lin(x, &self.e_lin(l, m + 1, j, shift, prime)?));
                    }
                }
                Ok(acc)
            })
            .collect()
    }

    fn row_times_f(&self, v: &[UElem], l: usize) -> Result<Vec<UElem>> {
        let n = self.n();
        let dn = self.d()[(l + 1) % n];
        (1..=dn)
            .map(|j| {
                let mut acc = UElem::zero();
                for (m, x) in v.iter().enumerate() {
                    if !x.is_zero() {
                        acc = acc.add(&self.right_mul_lin(x, &self.lin(BasisIndex::F(l, m + 1, j))?));
                    }
                }
                Ok(acc)
            })
            .collect()
    }

    fn p_row(&self, l: usize) -> Result<Vec<UElem>> {
        (1..=self.d()[l]).map(|i| self.letter(BasisIndex::P(l, i))).collect()
    }

    fn close_q(&self, v: &[UElem], l: usize) -> Result<UElem> {
        let mut acc = UElem::zero();
        for (m, x) in v.iter().enumerate() {
            acc = acc.add(&self.right_mul_lin(x, &self.lin(BasisIndex::Q(l, m + 1))?));
        }
        Ok(acc)
    }

    /// e^{(r)}_{ij}: the (i, j) entry of the r-th power of the letter matrix.
    pub fn e_power(&self, l: usize, i: usize, j: usize, r: usize) -> Result<UElem> {
        let dl = self.d().get(l).copied().ok_or_else(|| Error::IndexOutOfRange(format!("node {l}")))?;
        if i == 0 || j == 0 || i > dl || j > dl {
            return Err(Error::IndexOutOfRange(format!("e^({r})_{{{i}{j}}} at node {l}")));
        }
        let mut v: Vec<UElem> = (1..=dl).map(|k| UElem::scalar(Q::from((k == i) as i64))).collect();
        for _ in 0..r {
            v = self.row_times(&v, l, &Q::zero(), false)?;
        }
        Ok(v[j - 1].clone())
    }

    /// Quantum generators written as in the classical case, with letters in
    /// the displayed word order; `shifts[l]` is subtracted from diagonal e's.
    pub fn generator(&self, g: &Generator, shifts: &[Q]) -> Result<UElem> {
        let n = self.n();
        if shifts.len() != n {
            return Err(Error::Precondition(format!("shift vector must have length {n}")));
        }
        let node = |l: usize| -> Result<usize> {
            if l >= n {
                Err(Error::IndexOutOfRange(format!("node {l} (n = {n})")))
            } else {
                Ok(self.d()[l])
            }
        };
        match g {
            Generator::A { l, r } => {
                let dl = node(*l)?;
                if *r == 0 {
                    return Ok(UElem::scalar(Q::from(dl)));
                }
                let mut acc = UElem::zero();
                for i in 0..dl {
                    let mut v: Vec<UElem> = (0..dl).map(|k| UElem::scalar(Q::from((k == i) as i64))).collect();
                    for _ in 0..*r {
                        v = self.row_times(&v, *l, &shifts[*l], false)?;
                    }
                    acc = acc.add(&v[i]);
                }
                Ok(acc)
            }
            Generator::B { l, s } | Generator::Bprime { l, s } => {
                node(*l)?;
                let prime = matches!(g, Generator::Bprime { .. });
                let zero = Q::zero();
                let mut v = self.p_row(*l)?;
                for _ in 0..*s {
                    v = self.row_times(&v, *l, if prime { &zero } else { &shifts[*l] }, prime)?;
                }
                let b = self.close_q(&v, *l)?;
                Ok(if prime && s % 2 == 1 { b.neg() } else { b })
            }
            Generator::Chain { start, exps } => {
                node(*start)?;
                if exps.is_empty() {
                    return Err(Error::Precondition("a chain needs at least one exponent".into()));
                }
                let mut l = *start;
                let mut v = self.p_row(l)?;
                for (m, &s) in exps.iter().enumerate() {
                    for _ in 0..s {
                        v = self.row_times(&v, l, &shifts[l], false)?;
                    }
                    if m + 1 < exps.len() {
                        v = self.row_times_f(&v, l)?;
                        l = (l + 1) % n;
                    }
                }
                self.close_q(&v, l)
            }
            Generator::Cycle { exps } => {
                if exps.is_empty() || exps.len() % n != 0 {
                    return Err(Error::Precondition(format!("cycle exponents must be a nonzero multiple of n = {n}")));
                }
                let d0 = self.d()[0];
                let mut acc = UElem::zero();
                for i in 0..d0 {
                    let mut v: Vec<UElem> = (0..d0).map(|k| UElem::scalar(Q::from((k == i) as i64))).collect();
                    let mut l = 0;
                    for &s in exps {
                        for _ in 0..s {
                            v = self.row_times(&v, l, &shifts[l], false)?;
                        }
                        v = self.row_times_f(&v, l)?;
                        l = (l + 1) % n;
                    }
                    acc = acc.add(&v[i]);
                }
                Ok(acc)
            }
        }
    }

    /// (-1)^s p_k (e_k - c_k)^r f_k (e'_l)^s q_l along the edge k -> l = k+1.
    pub fn primed_chain(&self, k: usize, r: usize, s: usize, shifts: &[Q]) -> Result<UElem> {
        let n = self.n();
        if k >= n || shifts.len() != n {
            return Err(Error::IndexOutOfRange(format!("node {k} (n = {n})")));
        }
        let l = (k + 1) % n;
        let mut v = self.p_row(k)?;
        for _ in 0..r {
            v = self.row_times(&v, k, &shifts[k], false)?;
        }
        v = self.row_times_f(&v, k)?;
        for _ in 0..s {
            v = self.row_times(&v, l, &Q::zero(), true)?;
        }
        let c = self.close_q(&v, l)?;
        Ok(if s % 2 == 1 { c.neg() } else { c })
    }

    /// Canonical representative modulo the left ideal generated by
    /// G(l,i,j) - mu_l delta_ij: trailing G letters are replaced by their
    /// character values.
    pub fn reduce(&self, x: &UElem, mu: &[Q]) -> Result<UElem> {
        if self.alg.mode != BasisMode::Diag {
            return Err(Error::Precondition("diagonal reduction needs the diag basis".into()));
        }
        if mu.len() != self.n() {
            return Err(Error::Precondition(format!("mu must have length {}", self.n())));
        }
        let mut out = UElem::zero();
        for (w, c) in &x.terms {
            let mut c = c.clone();
            let mut k = w.len();
            while k > 0 {
                match self.alg.basis()[w[k - 1] as usize] {
                    BasisIndex::G(l, i, j) => {
                        if i != j || mu[l].is_zero() {
                            c = Q::zero();
                            break;
                        }
                        c = &c * &mu[l];
                        k -= 1;
                    }
                    _ => break,
                }
            }
            if !c.is_zero() {
                out.add_term(w[..k].to_vec(), c);
            }
        }
        Ok(out)
    }

    /// Generators of R, indexed (l, b, a): the quantization of the classical
    /// constraint with letters ordered e f, f e', and symmetrized q p.
    pub fn r_generators(&self) -> Result<Vec<((usize, usize, usize), UElem)>> {
        let n = self.n();
        let mut out = Vec::new();
        for l in 0..n {
            let ln = (l + 1) % n;
            let (dl, dn) = (self.d()[l], self.d()[ln]);
            for b in 1..=dl {
                for a in 1..=dn {
                    let mut r = UElem::zero();
                    for m in 1..=dl {
                        r = r.add(&self.pbw_normal_form(&[BasisIndex::E(l, b, m), BasisIndex::F(l, m, a)], Q::one())?);
                    }
                    for m in 1..=dn {
                        r = r.add(&self.pbw_normal_form(&[BasisIndex::F(l, b, m), BasisIndex::Eprime(ln, m, a)], Q::one())?);
                    }
                    let half = Q::frac(1, 2);
                    r = r.add(&self.pbw_normal_form(&[BasisIndex::Q(l, b), BasisIndex::P(ln, a)], half.clone())?);
                    r = r.add(&self.pbw_normal_form(&[BasisIndex::P(ln, a), BasisIndex::Q(l, b)], half)?);
                    out.push(((l, b, a), r));
                }
            }
        }
        Ok(out)
    }

    /// Letters that survive diagonal reduction (everything but G).
    pub fn reduced_letters(&self) -> Vec<u16> {
        (0..self.alg.dim()).filter(|&k| !matches!(self.alg.basis()[k], BasisIndex::G(..))).map(|k| k as u16).collect()
    }

    pub fn diag_letters(&self) -> Vec<u16> {
        self.alg.diag_positions().into_iter().map(|k| k as u16).collect()
    }
}

/// Naive reference normal ordering by repeated adjacent swaps on an explicit
/// list of (word, coefficient) pairs, without memoization.
pub fn brute_force_normal_form(alg: &ChainsawLie, words: &[(Vec<u16>, Q)]) -> UElem {
    let mut stack: Vec<(Vec<u16>, Q)> = words.to_vec();
    let mut out = UElem::zero();
    while let Some((w, c)) = stack.pop() {
        if c.is_zero() {
            continue;
        }
        match (0..w.len().saturating_sub(1)).find(|&i| w[i] > w[i + 1]) {
            None => out.add_term(w, c),
            Some(i) => {
                let (x, y) = (w[i], w[i + 1]);
                let mut swapped = w.clone();
                swapped.swap(i, i + 1);
                stack.push((swapped, c.clone()));
                for (z, cz) in alg.bracket_basis(x as usize, y as usize) {
                    let mut v = w[..i].to_vec();
                    v.push(*z as u16);
                    v.extend_from_slice(&w[i + 2..]);
                    stack.push((v, &c * cz));
                }
            }
        }
    }
    out
}

/// At d = 1 (single node), `[b_1, b_0] = b_0^2` in U(a): once through the
/// memoized product, once by naive expansion of the concatenated words.
pub fn d1_oracle() -> Result<Report> {
    let u = Uea::new(2, &[0, 1], BasisMode::Diag)?;
    let z = [Q::zero(), Q::zero()];
    let b0 = u.generator(&Generator::B { l: 1, s: 0 }, &z)?;
    let b1 = u.generator(&Generator::B { l: 1, s: 1 }, &z)?;
    let mut rep = Report::new();
    let diff = u.commutator(&b1, &b0).sub(&u.mul(&b0, &b0));
    rep.push("[b_1,b_0]=b_0^2", "memoized normal form", if diff.is_zero() { Status::Pass } else { Status::Fail });
    let mut words = Vec::new();
    let mut cat = |x: &UElem, y: &UElem, sign: i64| {
        for (w, c) in x.terms() {
            for (v, e) in y.terms() {
                let mut t = w.clone();
                t.extend_from_slice(v);
                words.push((t, &(c * e) * &Q::int(sign)));
            }
        }
    };
    cat(&b1, &b0, 1);
    cat(&b0, &b1, -1);
    cat(&b0, &b0, -1);
    let naive = brute_force_normal_form(u.algebra(), &words);
    rep.push("[b_1,b_0]=b_0^2", "naive word expansion", if naive.is_zero() { Status::Pass } else { Status::Fail });
    Ok(rep)
}

// ---------------------------------------------------------------------------
// The quantum ideal

/// Result of a membership test in U(R + gl_diag - mu).
#[derive(Clone, Debug, PartialEq)]
pub struct QMembership {
    pub member: bool,
    /// PBW degree bound N used (monomial multipliers of degree <= N - 2).
    pub bound: usize,
    pub method: &'static str,
    /// (multiplier word, generator index, coefficient) with
    /// reduce(x) = sum c * reduce(word * r_index).
    pub certificate: Option<Vec<(Word, usize, Q)>>,
}

type MonoTable = HashMap<Vec<i64>, Vec<Word>>;

/// The left ideal U(a)(R + gl_diag - mu), working on reduced representatives.
pub struct QuantumIdeal<'a> {
    uea: &'a Uea,
    mu: Vec<Q>,
    gens: Vec<((usize, usize, usize), UElem)>,
    gen_wt: Vec<Vec<i64>>,
    monos: Mutex<HashMap<usize, Arc<MonoTable>>>,
    rank_one: Option<Vec<(u16, u16, UElem)>>,
}

impl<'a> QuantumIdeal<'a> {
    pub fn new(uea: &'a Uea, mu: &[Q]) -> Result<Self> {
        let gens: Vec<((usize, usize, usize), UElem)> =
            uea.r_generators()?.into_iter().map(|(k, r)| Ok((k, uea.reduce(&r, mu)?))).collect::<Result<_>>()?;
        let gen_wt = gens
            .iter()
            .map(|(_, r)| uea.homogeneous_weight(r).ok_or_else(|| Error::Inconsistent("inhomogeneous R".into())))
            .collect::<Result<_>>()?;
        let n = uea.n();
        let rank_one = if gens.iter().all(|((l, _, _), _)| uea.d()[*l] == 1 && uea.d()[(l + 1) % n] == 1) {
            let mut rules = Vec::new();
            for ((l, _, _), r) in &gens {
                let p = uea.pos(BasisIndex::P((l + 1) % n, 1))?;
                let q = uea.pos(BasisIndex::Q(*l, 1))?;
                let lead = if p < q { vec![p, q] } else { vec![q, p] };
                let c = r.coeff(&lead);
                if c.is_zero() {
                    return Err(Error::Inconsistent("R generator without its q p term".into()));
                }
                rules.push((p, q, r.scale(&c.recip())));
            }
            Some(rules)
        } else {
            None
        };
        Ok(QuantumIdeal { uea, mu: mu.to_vec(), gens, gen_wt, monos: Mutex::new(HashMap::new()), rank_one })
    }

    pub fn mu(&self) -> &[Q] {
        &self.mu
    }

    pub fn generators(&self) -> &[((usize, usize, usize), UElem)] {
        &self.gens
    }

    pub fn reduce(&self, x: &UElem) -> UElem {
        self.uea.reduce(x, &self.mu).expect("diag algebra")
    }

    /// Reduced normal words of degree <= deg grouped by weight.
    fn monomials(&self, deg: usize) -> Arc<MonoTable> {
        let mut guard = self.monos.lock().expect("monomials");
        if let Some(t) = guard.get(&deg) {
            return t.clone();
        }
        let letters = self.uea.reduced_letters();
        let mut table: MonoTable = HashMap::new();
        let mut cur = Vec::new();
        fn rec(u: &Uea, letters: &[u16], start: usize, left: usize, cur: &mut Vec<u16>, t: &mut MonoTable) {
            t.entry(u.word_weight(cur)).or_default().push(cur.clone());
            if left == 0 {
                return;
            }
            for s in start..letters.len() {
                cur.push(letters[s]);
                rec(u, letters, s, left - 1, cur, t);
                cur.pop();
            }
        }
        rec(self.uea, &letters, 0, deg, &mut cur, &mut table);
        let t = Arc::new(table);
        guard.insert(deg, t.clone());
        t
    }

    /// Every reduce(m * r) of weight `w` with deg m <= bound - 2.
    fn span_rows(&self, w: &[i64], bound: usize) -> Vec<(Word, usize, UElem)> {
        if bound < 2 {
            return Vec::new();
        }
        let table = self.monomials(bound - 2);
        let mut rows = Vec::new();
        for (gi, (_, r)) in self.gens.iter().enumerate() {
            let need: Vec<i64> = w.iter().zip(&self.gen_wt[gi]).map(|(a, b)| a - b).collect();
            if let Some(ms) = table.get(&need) {
                for m in ms {
                    let prod = self.uea.mul(&UElem::word(m.clone(), Q::one()), r);
                    rows.push((m.clone(), gi, self.reduce(&prod)));
                }
            }
        }
        rows
    }

    /// Exact fixed-degree membership by linear algebra.
    pub fn contains_linear(&self, x: &UElem, bound: usize, certify: bool) -> Result<QMembership> {
        let x = self.reduce(x);
        if let Some(d) = x.degree() {
            if d > bound {
                return Err(Error::Precondition(format!("degree bound {bound} below the degree {d} of the element")));
            }
        }
        let mut blocks: BTreeMap<Vec<i64>, UElem> = BTreeMap::new();
        for (w, c) in x.terms() {
            blocks.entry(self.uea.word_weight(w)).or_default().add_term(w.clone(), c.clone());
        }
        let mut cert = Vec::new();
        for (w, target) in blocks {
            let rows = self.span_rows(&w, bound);
            let mut index: HashMap<Word, usize> = HashMap::new();
            let mut ech = Echelon::<Q>::new(certify);
            for (_, _, r) in &rows {
                ech.insert(to_sparse(r, &mut index));
            }
            let (ok, combo) = ech.contains(&to_sparse(&target, &mut index));
            if !ok {
                return Ok(QMembership { member: false, bound, method: "linear algebra", certificate: None });
            }
            if let Some(combo) = combo {
                for (k, c) in combo {
                    let (m, gi, _) = &rows[k];
                    cert.push((m.clone(), *gi, c));
                }
            }
        }
        Ok(QMembership {
            member: true,
            bound,
            method: "linear algebra",
            certificate: if certify { Some(cert) } else { None },
        })
    }

    /// With every block 1x1, rewrite words containing both p_{l+1} and q_l
    /// using the generator of edge l. Returns the reduced remainder.
    pub fn normal_form_rank_one(&self, x: &UElem) -> Option<UElem> {
        let rules = self.rank_one.as_ref()?;
        let mut cur = self.reduce(x);
        loop {
            // Highest-degree word that contains a rule lead.
            let hit = cur
                .terms()
                .iter()
                .rev()
                .filter_map(|(w, c)| {
                    rules.iter().enumerate().find_map(|(ri, (p, q, _))| {
                        let ip = w.iter().position(|x| x == p)?;
                        let iq = w.iter().position(|x| x == q)?;
                        Some((w.len(), w.clone(), c.clone(), ri, ip, iq))
                    })
                })
                .max_by(|a, b| a.0.cmp(&b.0).then_with(|| a.1.cmp(&b.1)));
            let Some((_, w, c, ri, ip, iq)) = hit else { break };
            let mut rest = w.clone();
            let (hi, lo) = if ip > iq { (ip, iq) } else { (iq, ip) };
            rest.remove(hi);
            rest.remove(lo);
            let prod = self.reduce(&self.uea.mul(&UElem::word(rest, Q::one()), &rules[ri].2));
            cur.add_scaled(&prod, &-c);
        }
        Some(cur)
    }

    /// Membership using the rank-one rewriting when available, otherwise
    /// linear algebra at the element's own degree.
    pub fn contains(&self, x: &UElem) -> Result<QMembership> {
        let red = self.reduce(x);
        let deg = red.degree().unwrap_or(0);
        if let Some(nf) = self.normal_form_rank_one(&red) {
            return Ok(QMembership { member: nf.is_zero(), bound: deg, method: "rewriting", certificate: None });
        }
        self.contains_linear(&red, deg.max(2), false)
    }
}

fn to_sparse(x: &UElem, index: &mut HashMap<Word, usize>) -> SparseVec<Q> {
    let mut v = SparseVec::new();
    for (w, c) in x.terms() {
        let next = index.len();
        let k = *index.entry(w.clone()).or_insert(next);
        v.insert(k, c.clone());
    }
    v
}

/// [x, r] lies in span(R) for every basis letter x and generator r.
pub fn check_two_sided(uea: &Uea) -> Result<Report> {
    let gens = uea.r_generators()?;
    let mut index = HashMap::new();
    let mut ech = Echelon::<Q>::new(false);
    for (_, r) in &gens {
        ech.insert(to_sparse(r, &mut index));
    }
    let mut rep = Report::new();
    for k in 0..uea.algebra().dim() {
        let x = UElem::word(vec![k as u16], Q::one());
        let ok = gens.iter().all(|(_, r)| {
            let c = uea.commutator(&x, r);
            c.is_zero() || ech.contains(&to_sparse(&c, &mut index.clone())).0 && c.terms().keys().all(|w| index.contains_key(w))
        });
        rep.push("[x,R] in R", uea.letter_name(k as u16), if ok { Status::Pass } else { Status::Fail });
    }
    Ok(rep)
}

// ---------------------------------------------------------------------------
// Relation suites

#[derive(Clone, Debug)]
enum QInst {
    AA(usize, usize, usize, usize),
    A1B(usize, usize, usize),
    AB(usize, usize, usize, usize),
    BBSame(usize, usize, usize),
    BBprime(usize, usize, usize, usize),
    BBFar(usize, usize, usize, usize),
    Serre(usize, usize, usize, usize, usize),
    Chain(usize, Vec<usize>, usize),
    BprimeShift(usize, usize),
}

/// Quantum relation suites. Single-node shapes are checked as identities in
/// U(a); otherwise each difference is reduced and tested for membership in
/// U(a)(R + gl_diag - mu).
pub fn verify_quantum_relations(n: usize, d: &[i64], mu: &[Q], max_index: usize) -> Result<Report> {
    let uea = Uea::new(n, d, BasisMode::Diag)?;
    let du = uea.d().to_vec();
    if du.iter().sum::<usize>() > 4 {
        return Err(Error::SizeLimit("sum of d_l must be at most 4 for quantum checks".into()));
    }
    if mu.len() != n {
        return Err(Error::Precondition(format!("mu must have length {n}")));
    }
    let shifts = deformation_shifts(&du, mu)?;
    let ideal = QuantumIdeal::new(&uea, mu)?;
    let single = is_single_node(&du);
    let nodes: Vec<usize> = (0..n).filter(|&l| du[l] > 0).collect();
    let mut insts = Vec::new();
    for &k in &nodes {
        for &l in &nodes {
            for r in 1..=max_index {
                for s in 1..=max_index {
                    insts.push(QInst::AA(k, l, r, s));
                }
            }
            for s in 0..=max_index {
                insts.push(QInst::A1B(k, l, s));
                for r in 1..=max_index {
                    insts.push(QInst::AB(k, l, r, s));
                }
            }
            for r in 0..max_index {
                for s in 0..max_index {
                    if k == l {
                        insts.push(QInst::BBSame(k, r, s));
                    } else if n >= 2 && l == (k + 1) % n {
                        insts.push(QInst::BBprime(k, l, r, s));
                    } else if k != (l + 1) % n {
                        insts.push(QInst::BBFar(k, l, r, s));
                    }
                }
            }
            let adjacent = k != l && (l == (k + 1) % n || k == (l + 1) % n);
            if adjacent && n >= 3 {
                for r1 in 0..max_index {
                    for r2 in r1..max_index {
                        for s in 0..max_index {
                            insts.push(QInst::Serre(k, l, r1, r2, s));
                        }
                    }
                }
            }
        }
        for m in 0..=max_index {
            insts.push(QInst::BprimeShift(k, m));
        }
        for len in 1..n.saturating_sub(1) {
            if (0..=len).all(|m| du[(k + m) % n] > 0) {
                for s in 0..max_index.min(2) {
                    for r in 0..max_index.min(2) {
                        let mut e = vec![0; len];
                        e[0] = s;
                        insts.push(QInst::Chain(k, e, r));
                    }
                }
            }
        }
    }
    let rows = par::map(&insts, |inst| eval_quantum(&uea, &ideal, &shifts, single, inst));
    let mut rep = Report::new();
    for row in rows {
        match row {
            Ok(rows) => {
                for (rel, inst, st, deg, detail) in rows {
                    let e = rep.push(rel, inst, st);
                    e.witness_degree = deg;
                    e.detail = Some(detail);
                }
            }
            Err(e) => {
                rep.push("error", "", Status::Fail).detail = Some(e.to_string());
            }
        }
    }
    if n == 2 && nodes.len() == 2 {
        rep.push("serre", "n=2", Status::Skipped).detail = Some("the rank-one affine Serre relation has a different form".into());
    }
    Ok(rep)
}

type Row = (String, String, Status, Option<usize>, String);

fn eval_quantum(uea: &Uea, ideal: &QuantumIdeal, shifts: &[Q], single: bool, inst: &QInst) -> Result<Vec<Row>> {
    let n = uea.n();
    let g = |x: Generator| uea.generator(&x, shifts);
    let a = |l: usize, r: usize| g(Generator::A { l, r });
    let b = |l: usize, s: usize| g(Generator::B { l, s });
    let bp = |l: usize, s: usize| g(Generator::Bprime { l, s });
    let com = |x: &UElem, y: &UElem| uea.commutator(x, y);
    // (relation, instance, difference, must hold as an identity in U)
    let (rel, instance, diff, identity): (&str, String, UElem, bool) = match inst.clone() {
        QInst::AA(k, l, r, s) => ("[a,a]=0", format!("k={k} l={l} r={r} s={s}"), com(&a(k, r)?, &a(l, s)?), single),
        QInst::A1B(k, l, s) => {
            let rhs = if k == l { b(l, s)? } else { UElem::zero() };
            ("[a_1,b_s]=delta b_s", format!("k={k} l={l} s={s}"), com(&a(k, 1)?, &b(l, s)?).sub(&rhs), single)
        }
        QInst::AB(k, l, r, s) => {
            let lhs = com(&a(k, r + 1)?, &b(l, s)?).sub(&com(&a(k, r)?, &b(l, s + 1)?));
            let mut rhs = UElem::zero();
            if k == l {
                rhs = b(l, r + s)?;
                for t in 0..r {
                    rhs = rhs.sub(&uea.mul(&b(l, r + s - t - 1)?, &a(k, t)?));
                }
            }
            (
                "[a_{r+1},b_s]-[a_r,b_{s+1}]=b_{r+s}-sum b a_t",
                format!("k={k} l={l} r={r} s={s}"),
                lhs.sub(&rhs),
                single,
            )
        }
        QInst::BBSame(k, r, s) => {
            let lhs = com(&b(k, r + 1)?, &b(k, s)?).sub(&com(&b(k, r)?, &b(k, s + 1)?));
            let (x, y) = (b(k, r)?, b(k, s)?);
            let rhs = uea.mul(&x, &y).add(&uea.mul(&y, &x));
            ("[b_{r+1},b_s]-[b_r,b_{s+1}]=b_r b_s+b_s b_r", format!("k={k} r={r} s={s}"), lhs.sub(&rhs), single)
        }
        QInst::BBprime(k, l, r, s) => {
            let lhs = com(&b(k, r + 1)?, &bp(l, s)?).sub(&com(&b(k, r)?, &bp(l, s + 1)?));
            let (x, y) = (b(k, r)?, bp(l, s)?);
            let mut rhs = uea.mul(&x, &y).add(&uea.mul(&y, &x)).scale(&Q::frac(-1, 2));
            // Deformation term along the edge k -> l.
            if !shifts[k].is_zero() {
                rhs = rhs.sub(&uea.primed_chain(k, r, s, shifts)?.scale(&shifts[k]));
            }
            (
                "[b_{k,r+1},b'_{l,s}]-[b_{k,r},b'_{l,s+1}]=-(b b'+b' b)/2",
                format!("k={k} l={l} r={r} s={s}"),
                lhs.sub(&rhs),
                false,
            )
        }
        QInst::BBFar(k, l, r, s) => ("[b_k,b_l]=0 far", format!("k={k} l={l} r={r} s={s}"), com(&b(k, r)?, &b(l, s)?), false),
        QInst::Serre(k, l, r1, r2, s) => {
            let (b1, b2, bl) = (b(k, r1)?, b(k, r2)?, b(l, s)?);
            let lhs = com(&b2, &com(&b1, &bl)).add(&com(&b1, &com(&b2, &bl)));
            ("serre", format!("k={k} l={l} r1={r1} r2={r2} s={s}"), lhs, false)
        }
        QInst::Chain(k, exps, r) => {
            let next = (k + exps.len()) % n;
            let lhs = com(&g(Generator::Chain { start: k, exps: exps.clone() })?, &b(next, r)?);
            let mut longer = exps.clone();
            longer.push(r);
            let rhs = g(Generator::Chain { start: k, exps: longer })?;
            ("[b_{kl;s},b_{l+1,r}]=b_{k,l+1;s,r}", format!("k={k} exps={exps:?} r={r}"), lhs.sub(&rhs), false)
        }
        QInst::BprimeShift(l, m) => {
            return bprime_shift_rows(uea, ideal, l, m);
        }
    };
    if identity {
        let ok = diff.is_zero();
        if ok {
            return Ok(vec![(rel.into(), instance, Status::Pass, Some(0), "identity in U(a)".into())]);
        }
    }
    let mem = ideal.contains(&diff)?;
    Ok(vec![(
        rel.into(),
        instance,
        if mem.member { Status::Pass } else { Status::Fail },
        Some(mem.bound),
        format!("{} mod ideal", mem.method),
    )])
}

/// Shift candidates for b'_l(u) = b_l(u + c).
pub fn bprime_candidates(d: usize, mu: &Q) -> Vec<(&'static str, Q)> {
    let d = Q::from(d);
    vec![("d", d.clone()), ("d+mu", &d + mu), ("d-mu", &d - mu)]
}

/// b'_{l,m} = sum_s C(m,s) (-c)^{m-s} b_{l,s}: the coefficient of u^{-m-1}
/// in b_l(u + c). One row per candidate shift.
fn bprime_shift_rows(uea: &Uea, ideal: &QuantumIdeal, l: usize, m: usize) -> Result<Vec<Row>> {
    let zero = vec![Q::zero(); uea.n()];
    let lhs = uea.generator(&Generator::Bprime { l, s: m }, &zero)?;
    let bs: Vec<UElem> = (0..=m).map(|s| uea.generator(&Generator::B { l, s }, &zero)).collect::<Result<_>>()?;
    let mut held = Vec::new();
    let mut seen = BTreeSet::new();
    let mut bound = 0;
    let mut method = "";
    for (name, c) in bprime_candidates(uea.d()[l], &ideal.mu()[l]) {
        if !seen.insert(c.clone()) {
            continue;
        }
        let mut rhs = UElem::zero();
        for (s, bsv) in bs.iter().enumerate() {
            let coef = &binomial(m as i64, (m - s) as u32) * &(-c.clone()).pow((m - s) as u32);
            rhs.add_scaled(bsv, &coef);
        }
        let mem = ideal.contains(&lhs.sub(&rhs))?;
        bound = bound.max(mem.bound);
        method = mem.method;
        if mem.member {
            held.push(format!("{name}={c}"));
        }
    }
    let status = if held.is_empty() { Status::Fail } else { Status::Pass };
    let detail = if held.is_empty() {
        format!("no candidate shift holds ({method} mod ideal)")
    } else {
        format!("holds for c = {} ({method} mod ideal)", held.join(", "))
    };
    Ok(vec![("b'_l(u)=b_l(u+c)".into(), format!("l={l} m={m}"), status, Some(bound), detail)])
}

/// Invariance of the quantum generators under every diag letter, both in
/// U(a) (before reduction) and in the quotient (after reduction). A
/// disagreement between the two readings is flagged in the detail.
pub fn verify_generator_invariance(n: usize, d: &[i64], mu: &[Q], max_index: usize) -> Result<Report> {
    let uea = Uea::new(n, d, BasisMode::Diag)?;
    let ideal = QuantumIdeal::new(&uea, mu)?;
    let du = uea.d().to_vec();
    let zero = vec![Q::zero(); n];
    let mut gens = Vec::new();
    for l in 0..n {
        if du[l] == 0 {
            continue;
        }
        for r in 1..=max_index {
            gens.push(Generator::A { l, r });
        }
        for s in 0..=max_index {
            gens.push(Generator::B { l, s });
            gens.push(Generator::Bprime { l, s });
        }
        if n >= 2 && du[(l + 1) % n] > 0 {
            gens.push(Generator::Chain { start: l, exps: vec![0, 0] });
            gens.push(Generator::Chain { start: l, exps: vec![1, 0] });
        }
    }
    let diag = uea.diag_letters();
    let rows = par::map(&gens, |gen| -> Result<(String, bool, bool)> {
        let x = uea.generator(gen, &zero)?;
        let mut before = true;
        let mut after = true;
        for &gl in &diag {
            let c = uea.commutator(&UElem::word(vec![gl], Q::one()), &x);
            before &= c.is_zero();
            after &= ideal.contains(&c)?.member;
        }
        Ok((gen.to_string(), before, after))
    });
    let mut rep = Report::new();
    for r in rows {
        let (name, before, after) = r?;
        let e = rep.push("[g,x]=0", name, if before && after { Status::Pass } else { Status::Fail });
        e.detail = Some(match (before, after) {
            (true, true) => "invariant before and after reduction".into(),
            (false, true) => "invariant only after reduction".into(),
            (true, false) => "invariant before but not after reduction".into(),
            (false, false) => "not invariant".into(),
        });
    }
    Ok(rep)
}

// ---------------------------------------------------------------------------
// PBW character of the quantized algebra

/// Dimensions of gr Y by PBW degree, refined by classical torus weight.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct GradedTable {
    pub by_degree: Vec<usize>,
    /// (degree, weight exponents [t.., u, v]) -> dimension.
    pub refined: BTreeMap<(usize, Vec<i64>), usize>,
}

/// Dimension of the invariant part of the filtered piece F_m Y in weight
/// `w`, computed as the kernel of all off-diagonal G actions on the quotient.
fn invariant_dim(uea: &Uea, ideal: &QuantumIdeal, w: &[i64], m: usize, words: &[Word]) -> Result<usize> {
    if words.is_empty() {
        return Ok(0);
    }
    let rows = ideal.span_rows(w, m);
    let mut index: HashMap<Word, usize> = HashMap::new();
    // Columns: quotient words first get indices in a fixed order.
    for wd in words {
        let next = index.len();
        index.entry(wd.clone()).or_insert(next);
    }
    let mut ech = Echelon::<Q>::new(false);
    for (_, _, r) in &rows {
        ech.insert(to_sparse(r, &mut index));
    }
    // Quotient basis: words whose unit vector is not reduced to zero is not
    // enough; take residuals of unit vectors and find a basis of their span.
    let mut qbasis: Vec<Word> = Vec::new();
    let mut span = Echelon::<Q>::new(false);
    for wd in words {
        let mut unit = SparseVec::new();
        unit.insert(index[wd], Q::one());
        let (res, _) = ech.reduce(unit);
        if span.insert(res) {
            qbasis.push(wd.clone());
        }
    }
    let off: Vec<u16> = uea
        .diag_letters()
        .into_iter()
        .filter(|&k| matches!(uea.algebra().basis()[k as usize], BasisIndex::G(_, i, j) if i != j))
        .collect();
    if off.is_empty() || qbasis.is_empty() {
        return Ok(qbasis.len());
    }
    // For each off-diagonal letter, residual of reduce([g, w]) modulo the
    // ideal in the target weight.
    let mut matrix: Vec<Vec<Q>> = Vec::new();
    for &gl in &off {
        let tw: Vec<i64> = w.iter().zip(&uea.word_weight(&[gl])).map(|(a, b)| a + b + 0).collect();
        let trows = ideal.span_rows(&tw, m);
        let mut tindex: HashMap<Word, usize> = HashMap::new();
        let mut tech = Echelon::<Q>::new(false);
        for (_, _, r) in &trows {
            tech.insert(to_sparse(r, &mut tindex));
        }
        let mut cols: Vec<SparseVec<Q>> = Vec::new();
        for wd in &qbasis {
            let c = uea.commutator(&UElem::word(vec![gl], Q::one()), &UElem::word(wd.clone(), Q::one()));
            let red = ideal.reduce(&c);
            let (res, _) = tech.reduce(to_sparse(&red, &mut tindex));
            cols.push(res);
        }
        let width = tindex.len();
        for row in 0..width {
            if cols.iter().any(|c| c.contains_key(&row)) {
                matrix.push(cols.iter().map(|c| c.get(&row).cloned().unwrap_or_else(Q::zero)).collect());
            }
        }
    }
    let rank = linalg::rank(&matrix, qbasis.len());
    Ok(qbasis.len() - rank)
}

/// PBW-graded character of Y_d^mu through degree `max_degree`.
pub fn graded_character_y(n: usize, d: &[i64], mu: &[Q], max_degree: usize) -> Result<GradedTable> {
    let uea = Uea::new(n, d, BasisMode::Diag)?;
    if uea.reduced_letters().len() > 16 || max_degree > 6 {
        return Err(Error::SizeLimit("graded character limited to 16 letters and degree 6".into()));
    }
    let ideal = QuantumIdeal::new(&uea, mu)?;
    let nt = n;
    // Weights (t.., u, v', st..). Invariant words have zero st part.
    let all = ideal.monomials(max_degree);
    let mut targets: Vec<Vec<i64>> = all.keys().filter(|w| w[nt + 2..].iter().all(|&x| x == 0)).cloned().collect();
    targets.sort();
    let per: Vec<Result<Vec<(usize, Vec<i64>, usize)>>> = par::map(&targets, |w| {
        let words: Vec<Word> = all[w].clone();
        let mut prev = 0usize;
        let mut out = Vec::new();
        for m in 0..=max_degree {
            let wm: Vec<Word> = words.iter().filter(|x| x.len() <= m).cloned().collect();
            let dim = invariant_dim(&uea, &ideal, w, m, &wm)?;
            if dim > prev {
                // Classical weight: restore one v per PBW degree.
                let mut cw: Vec<i64> = w[..nt + 2].to_vec();
                cw[nt + 1] += m as i64;
                out.push((m, cw, dim - prev));
            }
            prev = dim;
        }
        Ok(out)
    });
    let mut table = GradedTable { by_degree: vec![0; max_degree + 1], refined: BTreeMap::new() };
    for r in per {
        for (m, cw, k) in r? {
            table.by_degree[m] += k;
            *table.refined.entry((m, cw)).or_insert(0) += k;
        }
    }
    Ok(table)
}

#[cfg(test)]
mod tests {
    use super::*;
    use BasisIndex as B;

    fn diag(n: usize, d: &[i64]) -> Uea {
        Uea::new(n, d, BasisMode::Diag).unwrap()
    }

    #[test]
    fn normal_form_examples() {
        let u = diag(2, &[0, 1]);
        let x = u.pbw_normal_form(&[B::Q(1, 1), B::P(1, 1)], Q::one()).unwrap();
        assert_eq!(x, u.pbw_normal_form(&[B::P(1, 1), B::Q(1, 1)], Q::one()).unwrap());
        let v = diag(2, &[1, 1]);
        let x = v.pbw_normal_form(&[B::Q(0, 1), B::P(1, 1)], Q::one()).unwrap();
        let want = v
            .pbw_normal_form(&[B::P(1, 1), B::Q(0, 1)], Q::one())
            .unwrap()
            .add(&v.letter(B::F(0, 1, 1)).unwrap());
        assert_eq!(x, want);
    }

    #[test]
    fn commutator_examples() {
        let u = diag(2, &[0, 1]);
        let z = vec![Q::zero(); 2];
        let e = u.letter(B::E(1, 1, 1)).unwrap();
        let b0 = u.generator(&Generator::B { l: 1, s: 0 }, &z).unwrap();
        let b1 = u.generator(&Generator::B { l: 1, s: 1 }, &z).unwrap();
        assert!(u.commutator(&e, &e).is_zero());
        assert_eq!(u.commutator(&e, &b0), b0);
        assert_eq!(u.commutator(&b1, &b0), u.mul(&b0, &b0));
    }

    #[test]
    fn generator_shapes() {
        let u = diag(2, &[0, 2]);
        let z = vec![Q::zero(); 2];
        assert_eq!(u.e_power(1, 1, 2, 0).unwrap(), UElem::zero());
        assert_eq!(u.e_power(1, 2, 2, 0).unwrap(), UElem::one());
        assert_eq!(u.generator(&Generator::B { l: 1, s: 1 }, &z).unwrap().len(), 6);
        assert_eq!(u.generator(&Generator::A { l: 1, r: 0 }, &z).unwrap(), UElem::scalar(Q::int(2)));
    }

    #[test]
    fn reduction_examples() {
        let u = diag(2, &[0, 1]);
        let g = u.letter(B::G(1, 1, 1)).unwrap();
        assert!(u.reduce(&g, &[Q::zero(), Q::zero()]).unwrap().is_zero());
        assert_eq!(u.reduce(&g, &[Q::zero(), Q::int(3)]).unwrap(), UElem::scalar(Q::int(3)));
        let w = diag(2, &[0, 2]);
        let x = w.pbw_normal_form(&[B::P(1, 1), B::G(1, 1, 2)], Q::one()).unwrap();
        assert!(w.reduce(&x, &[Q::int(5), Q::int(5)]).unwrap().is_zero());
    }

    #[test]
    fn r_generators_and_two_sidedness() {
        let u = diag(3, &[0, 1, 1]);
        let rs = u.r_generators().unwrap();
        assert_eq!(rs.len(), 1);
        let top = u.symbol(&rs[0].1);
        let k = MultiPoly::var(top.vars(), u.algebra().pos(B::Q(1, 1)).unwrap())
            .mul(&MultiPoly::var(top.vars(), u.algebra().pos(B::P(2, 1)).unwrap()));
        assert_eq!(top.coeff(k.terms().keys().next().unwrap()), Q::one());
        assert!(diag(4, &[1, 0, 1, 0]).r_generators().unwrap().is_empty());
        for (n, d) in [(3, vec![0, 1, 1]), (2, vec![1, 1]), (2, vec![2, 1])] {
            let rep = check_two_sided(&diag(n, &d)).unwrap();
            assert!(rep.all_ok(), "{}", rep.to_text());
        }
    }

    #[test]
    fn membership_basics() {
        let u = diag(3, &[0, 1, 1]);
        let mu = vec![Q::zero(); 3];
        let ideal = QuantumIdeal::new(&u, &mu).unwrap();
        let r = ideal.generators()[0].1.clone();
        let m = ideal.contains_linear(&r, 2, true).unwrap();
        assert!(m.member);
        assert_eq!(m.certificate.unwrap().len(), 1);
        assert!(!ideal.contains_linear(&UElem::one(), 2, false).unwrap().member);
        let g = u.letter(B::G(1, 1, 1)).unwrap();
        let c = u.commutator(&g, &u.r_generators().unwrap()[0].1);
        assert!(ideal.contains_linear(&c, 2, false).unwrap().member);
        assert!(ideal.contains_linear(&r, 1, false).is_err());
    }

    #[test]
    fn rewriting_matches_linear_algebra() {
        for (n, d, mu) in [(3, vec![0, 1, 1], vec![Q::zero(); 3]), (2, vec![1, 1], vec![Q::one(), Q::zero()])] {
            let u = diag(n, &d);
            let ideal = QuantumIdeal::new(&u, &mu).unwrap();
            let letters = u.reduced_letters();
            let r = ideal.generators()[0].1.clone();
            let mut samples = Vec::new();
            for &x in &letters {
                let xe = UElem::word(vec![x], Q::one());
                samples.push(u.mul(&xe, &r));
                samples.push(u.mul(&xe, &r).add(&xe));
                for &y in &letters {
                    let ye = UElem::word(vec![y], Q::one());
                    samples.push(u.mul(&u.mul(&ye, &xe), &u.mul(&r, &xe)));
                    samples.push(u.mul(&ye, &xe));
                }
            }
            for s in samples {
                let deg = ideal.reduce(&s).degree().unwrap_or(0).max(2);
                let lin = ideal.contains_linear(&s, deg, false).unwrap().member;
                let rw = ideal.normal_form_rank_one(&s).unwrap().is_zero();
                assert_eq!(lin, rw);
            }
        }
    }

    #[test]
    fn brute_force_agrees() {
        let u = diag(2, &[1, 1]);
        let letters: Vec<u16> = (0..u.algebra().dim() as u16).collect();
        let w: Vec<u16> = vec![letters[7], letters[2], letters[5], letters[0], letters[3]];
        let mut acc = UElem::one();
        for &x in &w {
            acc = u.right_mul_letter(&acc, x);
        }
        assert_eq!(acc, brute_force_normal_form(u.algebra(), &[(w, Q::one())]));
    }

    #[test]
    fn single_node_relations() {
        let rep = verify_quantum_relations(2, &[0, 1], &[Q::zero(), Q::zero()], 3).unwrap();
        assert!(rep.all_ok(), "{}", rep.to_text());
    }

    #[test]
    fn graded_single_node() {
        let t = graded_character_y(2, &[0, 1], &[Q::zero(), Q::zero()], 3).unwrap();
        assert_eq!(t.by_degree, vec![1, 1, 2, 2]);
    }
}
