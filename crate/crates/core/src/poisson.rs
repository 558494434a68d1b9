//! The symmetric algebra S(a_d) with its Lie-Poisson bracket, the constraint
//! variety, invariant generators and the classical relation suites.
//!
//! Matrices follow the row convention: `b_{l,s} = p_l M_l^s q_l` with
//! `(M_l)_{ij} = e_{l,ij}`, and chains read `p_k M_k^{s_k} F_k M_{k+1}^{s_{k+1}} ... q_l`
//! with `(F_k)_{ij} = f_{k,ij}`.

use std::collections::BTreeMap;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::lie::{BasisIndex, BasisMode, ChainsawLie};
use crate::linalg::{self, Mat};
use crate::par;
use crate::poly::MultiPoly;
use crate::report::{Report, Status};
use crate::scalar::{Field, F61, Q};
use crate::{Error, Result};

type PMat = Vec<Vec<MultiPoly>>;

/// S(a_d) in the e/e' basis, with the Lie-Poisson bracket.
#[derive(Clone, Debug)]
pub struct Sym {
    alg: Arc<ChainsawLie>,
    vars: Arc<Vec<String>>,
    /// `lin[a * nb + b]` is [x_a, x_b] as a linear polynomial.
    lin: Vec<MultiPoly>,
}

impl Sym {
    pub fn new(n: usize, d: &[i64]) -> Result<Sym> {
        Sym::from_algebra(Arc::new(ChainsawLie::build(n, d, BasisMode::Eprime)?))
    }

    pub fn from_algebra(alg: Arc<ChainsawLie>) -> Result<Sym> {
        if alg.mode != BasisMode::Eprime {
            return Err(Error::Precondition("symmetric algebra expects the e/e' basis".into()));
        }
        let vars = Arc::new(alg.names());
        let nb = alg.dim();
        let mut lin = Vec::with_capacity(nb * nb);
        for a in 0..nb {
            for b in 0..nb {
                let mut p = MultiPoly::zero(&vars);
                for (z, c) in alg.bracket_basis(a, b) {
                    p.add_scaled(&MultiPoly::var(&vars, *z), c);
                }
                lin.push(p);
            }
        }
        Ok(Sym { alg, vars, lin })
    }

    pub fn algebra(&self) -> &ChainsawLie {
        &self.alg
    }

    pub fn n(&self) -> usize {
        self.alg.n
    }

    pub fn d(&self) -> &[usize] {
        &self.alg.d
    }

    pub fn vars(&self) -> &Arc<Vec<String>> {
        &self.vars
    }

    pub fn zero(&self) -> MultiPoly {
        MultiPoly::zero(&self.vars)
    }

    pub fn constant(&self, c: Q) -> MultiPoly {
        MultiPoly::constant(&self.vars, c)
    }

    pub fn x(&self, b: BasisIndex) -> Result<MultiPoly> {
        Ok(MultiPoly::var(&self.vars, self.alg.pos(b)?))
    }

    fn xu(&self, b: BasisIndex) -> MultiPoly {
        self.x(b).expect("basis letter in range")
    }

    fn owns(&self, f: &MultiPoly) -> bool {
        Arc::ptr_eq(f.vars(), &self.vars) || f.vars() == &self.vars
    }

    /// {f, g} = sum over a, b of d_a f * d_b g * [x_a, x_b].
    pub fn bracket(&self, f: &MultiPoly, g: &MultiPoly) -> Result<MultiPoly> {
        if !self.owns(f) || !self.owns(g) {
            return Err(Error::MismatchedAlgebras);
        }
        let nb = self.alg.dim();
        let sf = f.support_vars();
        let sg = g.support_vars();
        let dg: Vec<(usize, MultiPoly)> = sg.iter().map(|&b| (b, g.derivative_idx(b))).collect();
        let mut out = self.zero();
        for &a in &sf {
            let mut h = self.zero();
            for (b, gb) in &dg {
                let l = &self.lin[a * nb + b];
                if !l.is_zero() {
                    h.add_assign(&gb.mul(l));
                }
            }
            if !h.is_zero() {
                out.add_assign(&f.derivative_idx(a).mul(&h));
            }
        }
        Ok(out)
    }

    pub fn e_matrix(&self, l: usize, shift: &Q) -> PMat {
        let dl = self.d()[l];
        (1..=dl)
            .map(|i| {
                (1..=dl)
                    .map(|j| {
                        let mut x = self.xu(BasisIndex::E(l, i, j));
                        if i == j && !shift.is_zero() {
                            x = x.sub(&self.constant(shift.clone()));
                        }
                        x
                    })
                    .collect()
            })
            .collect()
    }

    pub fn eprime_matrix(&self, l: usize) -> PMat {
        let dl = self.d()[l];
        (1..=dl).map(|i| (1..=dl).map(|j| self.xu(BasisIndex::Eprime(l, i, j))).collect()).collect()
    }

    pub fn f_matrix(&self, l: usize) -> PMat {
        let n = self.n();
        let (dl, dn) = (self.d()[l], self.d()[(l + 1) % n]);
        (1..=dl).map(|i| (1..=dn).map(|j| self.xu(BasisIndex::F(l, i, j))).collect()).collect()
    }

    pub fn p_vec(&self, l: usize) -> Vec<MultiPoly> {
        (1..=self.d()[l]).map(|i| self.xu(BasisIndex::P(l, i))).collect()
    }

    pub fn q_vec(&self, l: usize) -> Vec<MultiPoly> {
        (1..=self.d()[l]).map(|i| self.xu(BasisIndex::Q(l, i))).collect()
    }

    fn row_times(&self, v: &[MultiPoly], m: &PMat, cols: usize) -> Vec<MultiPoly> {
        (0..cols)
            .map(|j| {
                let mut acc = self.zero();
                for (i, x) in v.iter().enumerate() {
                    if !x.is_zero() && !m[i][j].is_zero() {
                        acc.add_assign(&x.mul(&m[i][j]));
                    }
                }
                acc
            })
            .collect()
    }

    fn dot(&self, v: &[MultiPoly], w: &[MultiPoly]) -> MultiPoly {
        let mut acc = self.zero();
        for (x, y) in v.iter().zip(w) {
            acc.add_assign(&x.mul(y));
        }
        acc
    }

    fn check_node(&self, l: usize) -> Result<()> {
        if l >= self.n() {
            return Err(Error::IndexOutOfRange(format!("node {l} (n = {})", self.n())));
        }
        Ok(())
    }

    /// The invariant polynomial of a generator; `shifts[l]` is subtracted from
    /// the diagonal of every `M_l` (zero for the undeformed generators).
    pub fn generator(&self, g: &Generator, shifts: &[Q]) -> Result<MultiPoly> {
        let n = self.n();
        if shifts.len() != n {
            return Err(Error::Precondition(format!("shift vector must have length {n}")));
        }
        match g {
            Generator::A { l, r } => {
                self.check_node(*l)?;
                let dl = self.d()[*l];
                if *r == 0 {
                    return Ok(self.constant(Q::from(dl)));
                }
                let m = self.e_matrix(*l, &shifts[*l]);
                let mut acc = self.zero();
                for i in 0..dl {
                    let mut v: Vec<MultiPoly> = (0..dl).map(|j| self.constant(Q::from((i == j) as i64))).collect();
                    for _ in 0..*r {
                        v = self.row_times(&v, &m, dl);
                    }
                    acc.add_assign(&v[i]);
                }
                Ok(acc)
            }
            Generator::B { l, s } => {
                self.check_node(*l)?;
                let m = self.e_matrix(*l, &shifts[*l]);
                let mut v = self.p_vec(*l);
                for _ in 0..*s {
                    v = self.row_times(&v, &m, self.d()[*l]);
                }
                Ok(self.dot(&v, &self.q_vec(*l)))
            }
            Generator::Bprime { l, s } => {
                self.check_node(*l)?;
                let m = self.eprime_matrix(*l);
                let mut v = self.p_vec(*l);
                for _ in 0..*s {
                    v = self.row_times(&v, &m, self.d()[*l]);
                }
                let b = self.dot(&v, &self.q_vec(*l));
                Ok(if s % 2 == 1 { b.neg() } else { b })
            }
            Generator::Chain { start, exps } => {
                self.check_node(*start)?;
                if exps.is_empty() {
                    return Err(Error::Precondition("a chain needs at least one exponent".into()));
                }
                let mut node = *start;
                let mut v = self.p_vec(node);
                for (m, &s) in exps.iter().enumerate() {
                    let em = self.e_matrix(node, &shifts[node]);
                    for _ in 0..s {
                        v = self.row_times(&v, &em, self.d()[node]);
                    }
                    if m + 1 < exps.len() {
                        let next = (node + 1) % n;
                        v = self.row_times(&v, &self.f_matrix(node), self.d()[next]);
                        node = next;
                    }
                }
                Ok(self.dot(&v, &self.q_vec(node)))
            }
            Generator::Cycle { exps } => {
                if exps.is_empty() || exps.len() % n != 0 {
                    return Err(Error::Precondition(format!("cycle exponents must be a nonzero multiple of n = {n}")));
                }
                let d0 = self.d()[0];
                let mut acc = self.zero();
                for i in 0..d0 {
                    let mut v: Vec<MultiPoly> = (0..d0).map(|j| self.constant(Q::from((i == j) as i64))).collect();
                    let mut node = 0;
                    for &s in exps {
                        let em = self.e_matrix(node, &shifts[node]);
                        for _ in 0..s {
                            v = self.row_times(&v, &em, self.d()[node]);
                        }
                        let next = (node + 1) % n;
                        v = self.row_times(&v, &self.f_matrix(node), self.d()[next]);
                        node = next;
                    }
                    acc.add_assign(&v[i]);
                }
                Ok(acc)
            }
        }
    }

    /// g_{l,ij} = e_{l,ij} + e'_{l,ij}.
    pub fn diag_element(&self, l: usize, i: usize, j: usize) -> Result<MultiPoly> {
        Ok(self.x(BasisIndex::E(l, i, j))?.add(&self.x(BasisIndex::Eprime(l, i, j))?))
    }

    /// Constraint polynomials K_l(b, a), the (a, b) entry of
    /// `B_l A_l + A'_{l+1} B_l + p_{l+1} q_l`, indexed by (l, b, a).
    pub fn constraints(&self) -> Vec<((usize, usize, usize), MultiPoly)> {
        let n = self.n();
        let mut out = Vec::new();
        for l in 0..n {
            let ln = (l + 1) % n;
            let (dl, dn) = (self.d()[l], self.d()[ln]);
            for b in 1..=dl {
                for a in 1..=dn {
                    let mut k = self.xu(BasisIndex::Q(l, b)).mul(&self.xu(BasisIndex::P(ln, a)));
                    for m in 1..=dl {
                        k.add_assign(&self.xu(BasisIndex::E(l, b, m)).mul(&self.xu(BasisIndex::F(l, m, a))));
                    }
                    for m in 1..=dn {
                        k.add_assign(&self.xu(BasisIndex::F(l, b, m)).mul(&self.xu(BasisIndex::Eprime(ln, m, a))));
                    }
                    out.push(((l, b, a), k));
                }
            }
        }
        out
    }

    /// Images of e'_{l,ij} under the moment condition e' = mu_l delta - e.
    pub fn diag_images(&self, mu: &[Q]) -> BTreeMap<usize, MultiPoly> {
        let mut m = BTreeMap::new();
        for (k, b) in self.alg.basis().iter().enumerate() {
            if let BasisIndex::Eprime(l, i, j) = *b {
                let mut img = self.xu(BasisIndex::E(l, i, j)).neg();
                if i == j {
                    img = img.add(&self.constant(mu[l].clone()));
                }
                m.insert(k, img);
            }
        }
        m
    }

    /// Integer grading by polynomial degree.
    fn degree_weights(&self) -> Vec<i64> {
        vec![1; self.vars.len()]
    }
}

/// Invariant generators of the reduction.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Generator {
    A { l: usize, r: usize },
    B { l: usize, s: usize },
    Bprime { l: usize, s: usize },
    Chain { start: usize, exps: Vec<usize> },
    Cycle { exps: Vec<usize> },
}

impl std::fmt::Display for Generator {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let join = |v: &[usize]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",");
        match self {
            Generator::A { l, r } => write!(f, "a_{{{l},{r}}}"),
            Generator::B { l, s } => write!(f, "b_{{{l},{s}}}"),
            Generator::Bprime { l, s } => write!(f, "b'_{{{l},{s}}}"),
            Generator::Chain { start, exps } => write!(f, "b_{{{start}..;{}}}", join(exps)),
            Generator::Cycle { exps } => write!(f, "C_{{{}}}", join(exps)),
        }
    }
}

/// Scalar shifts mu_l / d_l of the deformed generators.
pub fn deformation_shifts(d: &[usize], mu: &[Q]) -> Result<Vec<Q>> {
    if d.len() != mu.len() {
        return Err(Error::Precondition("mu and d must have the same length".into()));
    }
    d.iter()
        .zip(mu)
        .enumerate()
        .map(|(l, (&dl, m))| {
            if dl == 0 {
                if m.is_zero() {
                    Ok(Q::zero())
                } else {
                    Err(Error::Precondition(format!("deformation at node {l} needs d_l > 0 when mu_l != 0")))
                }
            } else {
                Ok(m / &Q::from(dl))
            }
        })
        .collect()
}

/// Affine Cartan entries on Z/n: 2 on the diagonal, -1 per edge.
pub fn cartan(n: usize, k: usize, l: usize) -> i64 {
    let mut c = if k == l { 2 } else { 0 };
    if n >= 2 {
        if l == (k + 1) % n {
            c -= 1;
        }
        if k == (l + 1) % n {
            c -= 1;
        }
    }
    c
}

// ---------------------------------------------------------------------------
// Constraint ideal

/// Outcome of an ideal-membership test.
#[derive(Clone, Debug, PartialEq)]
pub struct Membership {
    pub status: Status,
    pub witness_degree: Option<usize>,
    pub detail: String,
}

/// Size caps for the membership tiers.
#[derive(Clone, Copy, Debug)]
pub struct Caps {
    /// Largest number of candidate monomials for fixed-degree linear algebra.
    pub linear_monomials: usize,
    /// Largest term count handled by the localized substitution.
    pub localized_terms: usize,
    /// Points used by the sampled fallback.
    pub samples: usize,
}

impl Default for Caps {
    fn default() -> Self {
        Caps { linear_monomials: 6000, localized_terms: 60_000, samples: 4 }
    }
}

/// The ideal of the constraint equations, optionally together with the moment
/// condition e' = mu - e (applied by substitution).
pub struct ClassicalIdeal<'a> {
    sym: &'a Sym,
    mu: Option<Vec<Q>>,
    diag_map: BTreeMap<usize, MultiPoly>,
    gens: Vec<((usize, usize, usize), MultiPoly)>,
    pub caps: Caps,
}

impl<'a> ClassicalIdeal<'a> {
    pub fn new(sym: &'a Sym, mu: Option<&[Q]>) -> Self {
        let diag_map = mu.map(|m| sym.diag_images(m)).unwrap_or_default();
        let gens = sym.constraints().into_iter().map(|(k, p)| (k, p.substitute(&diag_map))).collect();
        ClassicalIdeal { sym, mu: mu.map(|m| m.to_vec()), diag_map, gens, caps: Caps::default() }
    }

    pub fn generators(&self) -> &[((usize, usize, usize), MultiPoly)] {
        &self.gens
    }

    /// Apply the moment substitution, if any.
    pub fn prepare(&self, f: &MultiPoly) -> MultiPoly {
        f.substitute(&self.diag_map)
    }

    fn homogeneous(&self) -> bool {
        self.mu.as_ref().map_or(true, |m| m.iter().all(|x| x.is_zero()))
    }

    fn edges(&self) -> Vec<usize> {
        let n = self.sym.n();
        (0..n).filter(|&l| self.sym.d()[l] > 0 && self.sym.d()[(l + 1) % n] > 0).collect()
    }

    pub fn contains(&self, f: &MultiPoly) -> Membership {
        let g = self.prepare(f);
        let deg = g.total_degree().map(|d| d as usize);
        if g.is_zero() {
            return Membership { status: Status::Pass, witness_degree: Some(0), detail: "identity".into() };
        }
        let edges = self.edges();
        if edges.iter().all(|&l| self.sym.d()[l] == 1 && self.sym.d()[(l + 1) % self.sym.n()] == 1) {
            let nf = self.normal_form_rank_one(&g);
            return Membership {
                status: if nf.is_zero() { Status::Pass } else { Status::Fail },
                witness_degree: deg,
                detail: "normal form".into(),
            };
        }
        if self.homogeneous() {
            if let Some(ok) = self.linear_membership(&g) {
                return Membership {
                    status: if ok { Status::Pass } else { Status::Fail },
                    witness_degree: deg,
                    detail: "fixed-degree linear algebra".into(),
                };
            }
        }
        if let Some(ok) = self.localized_membership(&g) {
            return Membership {
                status: if ok { Status::Pass } else { Status::Fail },
                witness_degree: deg,
                detail: "localized at the Sylvester determinant".into(),
            };
        }
        let ok = self.sampled_vanishing(&g);
        Membership {
            status: if ok { Status::Sampled } else { Status::Fail },
            witness_degree: deg,
            detail: format!("{} points over F_p", self.caps.samples),
        }
    }

    /// With every constraint 1x1 the leading monomials q_l p_{l+1} are pairwise
    /// coprime, so the generators form a Groebner basis and rewriting
    /// q_l p_{l+1} -> -(K - q_l p_{l+1}) yields a normal form.
    pub fn normal_form_rank_one(&self, f: &MultiPoly) -> MultiPoly {
        let n = self.sym.n();
        let mut g = f.clone();
        for ((l, _, _), k) in &self.gens {
            let qi = self.sym.alg.pos(BasisIndex::Q(*l, 1)).expect("q");
            let pi = self.sym.alg.pos(BasisIndex::P((l + 1) % n, 1)).expect("p");
            let mut lead = vec![0u32; self.sym.vars.len()];
            lead[qi] += 1;
            lead[pi] += 1;
            let tail = k.sub(&MultiPoly::monomial(&self.sym.vars, lead, Q::one())).neg();
            loop {
                let mut hit = self.sym.zero();
                let mut rest = self.sym.zero();
                for (e, c) in g.terms() {
                    if e[qi] > 0 && e[pi] > 0 {
                        let mut e2 = e.clone();
                        e2[qi] -= 1;
                        e2[pi] -= 1;
                        hit.add_term(e2, c.clone());
                    } else {
                        rest.add_term(e.clone(), c.clone());
                    }
                }
                if hit.is_zero() {
                    break;
                }
                g = rest.add(&hit.mul(&tail));
            }
        }
        g
    }

    /// Exact membership at fixed degree for homogeneous input: f lies in the
    /// ideal iff it lies in the span of monomial multiples of the generators
    /// of the same degree and torus weight. `None` when over the size cap.
    pub fn linear_membership(&self, f: &MultiPoly) -> Option<bool> {
        let sym = self.sym;
        let nv = sym.vars.len();
        let wt: Vec<Vec<i64>> = (0..nv).map(|k| weight_vector(sym.alg.weight_at(k))).collect();
        let parts = f.graded_parts(&sym.degree_weights());
        for (deg, part) in parts {
            if deg < 2 {
                return Some(false);
            }
            let mdeg = (deg - 2) as u32;
            // Variables that can occur: anything not eliminated by the substitution.
            let live: Vec<usize> = (0..nv).filter(|k| !self.diag_map.contains_key(k)).collect();
            let count = multiset_count(live.len(), mdeg as usize);
            if count > self.caps.linear_monomials as u128 {
                return None;
            }
            let monos = monomials(&live, nv, mdeg);
            // Split the target by torus weight; each weight block is independent.
            let mut blocks: BTreeMap<Vec<i64>, MultiPoly> = BTreeMap::new();
            for (e, c) in part.terms() {
                blocks.entry(mono_weight(e, &wt)).or_insert_with(|| sym.zero()).add_term(e.clone(), c.clone());
            }
            for (w, target) in blocks {
                let mut index: BTreeMap<Vec<u32>, usize> = BTreeMap::new();
                let mut rows = Vec::new();
                for (_, k) in &self.gens {
                    let Some((ke, _)) = k.terms().iter().next() else { continue };
                    let kw = mono_weight(ke, &wt);
                    for m in &monos {
                        let mw = mono_weight(m, &wt);
                        if mw.iter().zip(&kw).map(|(a, b)| a + b).ne(w.iter().copied()) {
                            continue;
                        }
                        let prod = k.mul(&MultiPoly::monomial(&sym.vars, m.clone(), Q::one()));
                        rows.push(sparse_row(&prod, &mut index));
                    }
                }
                let mut ech = linalg::Echelon::<Q>::new(false);
                for r in rows {
                    ech.insert(r);
                }
                let t = sparse_row(&target, &mut index);
                if !ech.contains(&t).0 {
                    return Some(false);
                }
            }
        }
        Some(true)
    }

    /// Solve each constraint block for F_l by Cramer's rule over the
    /// polynomial ring, substitute, clear denominators and test for zero.
    /// This decides membership in the saturation of the ideal by the
    /// Sylvester determinants. `None` when over the size cap.
    pub fn localized_membership(&self, f: &MultiPoly) -> Option<bool> {
        let sym = self.sym;
        let n = sym.n();
        let mut images: BTreeMap<usize, MultiPoly> = BTreeMap::new();
        let mut dets: Vec<(Vec<usize>, MultiPoly)> = Vec::new();
        for l in self.edges() {
            let (dl, dn) = (sym.d()[l], sym.d()[(l + 1) % n]);
            if dl * dn > 4 {
                return None;
            }
            let fvars: Vec<usize> = (1..=dl)
                .flat_map(|i| (1..=dn).map(move |j| (i, j)))
                .map(|(i, j)| sym.alg.pos(BasisIndex::F(l, i, j)).expect("f"))
                .collect();
            let block: Vec<&MultiPoly> =
                self.gens.iter().filter(|((k, _, _), _)| *k == l).map(|(_, p)| p).collect();
            let zero_f: BTreeMap<usize, MultiPoly> = fvars.iter().map(|&v| (v, sym.zero())).collect();
            let lmat: PMat = block.iter().map(|k| fvars.iter().map(|&v| k.derivative_idx(v)).collect()).collect();
            let rhs: Vec<MultiPoly> = block.iter().map(|k| k.substitute(&zero_f).neg()).collect();
            let det = poly_det(&lmat, sym);
            if det.is_zero() {
                return None;
            }
            let adj = poly_adjugate(&lmat, sym);
            for (c, &v) in fvars.iter().enumerate() {
                let mut num = sym.zero();
                for (r, x) in rhs.iter().enumerate() {
                    num.add_assign(&adj[c][r].mul(x));
                }
                images.insert(v, num);
            }
            dets.push((fvars, det));
        }
        if f.len() > self.caps.localized_terms {
            return None;
        }
        // Group terms by their F-part, then clear denominators edge by edge.
        let fset: Vec<usize> = images.keys().copied().collect();
        let mut groups: BTreeMap<Vec<u32>, MultiPoly> = BTreeMap::new();
        for (e, c) in f.terms() {
            let key: Vec<u32> = fset.iter().map(|&i| e[i]).collect();
            let mut kept = e.clone();
            for &i in &fset {
                kept[i] = 0;
            }
            groups.entry(key).or_insert_with(|| sym.zero()).add_term(kept, c.clone());
        }
        let edge_deg = |key: &[u32], vars: &[usize]| -> u32 {
            fset.iter().zip(key).filter(|(i, _)| vars.contains(i)).map(|(_, &k)| k).sum()
        };
        let top: Vec<u32> = dets.iter().map(|(vs, _)| groups.keys().map(|k| edge_deg(k, vs)).max().unwrap_or(0)).collect();
        let mut pow_cache: BTreeMap<(usize, u32), MultiPoly> = BTreeMap::new();
        let mut det_cache: BTreeMap<(usize, u32), MultiPoly> = BTreeMap::new();
        let mut total = sym.zero();
        for (key, mut part) in groups {
            for (slot, (&v, &k)) in fset.iter().zip(&key).enumerate() {
                if k > 0 {
                    let pw = pow_cache.entry((slot, k)).or_insert_with(|| images[&v].pow(k)).clone();
                    part = part.mul(&pw);
                }
            }
            for (ei, (vs, det)) in dets.iter().enumerate() {
                let missing = top[ei] - edge_deg(&key, vs);
                if missing > 0 {
                    let pw = det_cache.entry((ei, missing)).or_insert_with(|| det.pow(missing)).clone();
                    part = part.mul(&pw);
                }
            }
            total.add_assign(&part);
            if total.len() > 4 * self.caps.localized_terms {
                return None;
            }
        }
        Some(total.is_zero())
    }

    /// Evaluate at random points of the variety over F_p.
    pub fn sampled_vanishing(&self, f: &MultiPoly) -> bool {
        let sym = self.sym;
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_c1a5);
        let mut done = 0;
        let mut attempts = 0;
        while done < self.caps.samples && attempts < 50 * self.caps.samples {
            attempts += 1;
            let mu: Vec<F61> = match &self.mu {
                Some(m) => m.iter().map(F61::from_q).collect(),
                None => vec![F61::zero(); sym.n()],
            };
            let Ok(pt) = random_point::<F61, _>(sym.n(), sym.d(), self.mu.as_ref().map(|_| mu.as_slice()), &mut rng, |r| {
                F61::new(r.gen_range(0..i64::MAX))
            }) else {
                continue;
            };
            let vals = pt.assignment(sym.algebra());
            if !f.eval_in(&vals).is_zero() {
                return false;
            }
            done += 1;
        }
        done > 0
    }
}

fn weight_vector(w: &crate::lie::TorusWeight) -> Vec<i64> {
    let mut v: Vec<i64> = w.t.iter().map(|&x| x as i64).collect();
    v.push(w.u as i64);
    v.push(w.v as i64);
    for row in &w.st {
        v.extend(row.iter().map(|&x| x as i64));
    }
    v
}

fn mono_weight(e: &[u32], wt: &[Vec<i64>]) -> Vec<i64> {
    let mut acc = vec![0i64; wt.first().map_or(0, |w| w.len())];
    for (k, &x) in e.iter().enumerate() {
        if x > 0 {
            for (a, w) in acc.iter_mut().zip(&wt[k]) {
                *a += x as i64 * w;
            }
        }
    }
    acc
}

fn multiset_count(n: usize, k: usize) -> u128 {
    // C(n + k - 1, k)
    let mut c: u128 = 1;
    for i in 0..k as u128 {
        c = c * (n as u128 + i) / (i + 1);
    }
    c
}

fn monomials(live: &[usize], nv: usize, deg: u32) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    let mut cur = vec![0u32; nv];
    fn rec(live: &[usize], start: usize, left: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if left == 0 {
            out.push(cur.clone());
            return;
        }
        for s in start..live.len() {
            cur[live[s]] += 1;
            rec(live, s, left - 1, cur, out);
            cur[live[s]] -= 1;
        }
    }
    rec(live, 0, deg, &mut cur, &mut out);
    out
}

fn sparse_row(p: &MultiPoly, index: &mut BTreeMap<Vec<u32>, usize>) -> linalg::SparseVec<Q> {
    let mut row = BTreeMap::new();
    for (e, c) in p.terms() {
        let next = index.len();
        let k = *index.entry(e.clone()).or_insert(next);
        row.insert(k, c.clone());
    }
    row
}

fn poly_det(m: &PMat, sym: &Sym) -> MultiPoly {
    let n = m.len();
    match n {
        0 => sym.constant(Q::one()),
        1 => m[0][0].clone(),
        _ => {
            let mut acc = sym.zero();
            for c in 0..n {
                if m[0][c].is_zero() {
                    continue;
                }
                let minor: PMat = m[1..]
                    .iter()
                    .map(|row| row.iter().enumerate().filter(|(j, _)| *j != c).map(|(_, x)| x.clone()).collect())
                    .collect();
                let t = m[0][c].mul(&poly_det(&minor, sym));
                acc = if c % 2 == 0 { acc.add(&t) } else { acc.sub(&t) };
            }
            acc
        }
    }
}

fn poly_adjugate(m: &PMat, sym: &Sym) -> PMat {
    let n = m.len();
    if n == 1 {
        return vec![vec![sym.constant(Q::one())]];
    }
    let mut adj = vec![vec![sym.zero(); n]; n];
    for i in 0..n {
        for j in 0..n {
            let minor: PMat = m
                .iter()
                .enumerate()
                .filter(|(r, _)| *r != i)
                .map(|(_, row)| row.iter().enumerate().filter(|(c, _)| *c != j).map(|(_, x)| x.clone()).collect())
                .collect();
            let c = poly_det(&minor, sym);
            adj[j][i] = if (i + j) % 2 == 0 { c } else { c.neg() };
        }
    }
    adj
}

// ---------------------------------------------------------------------------
// Points of the constraint variety

/// A point of the constraint variety: `B_l A_l + A'_{l+1} B_l + p_{l+1} q_l = 0`.
/// `A_l` is the transpose of the matrix of coordinates e_{l,ij}.
#[derive(Clone, Debug, PartialEq)]
pub struct ConstraintPoint<F: Field> {
    pub n: usize,
    pub d: Vec<usize>,
    pub a: Vec<Mat<F>>,
    pub aprime: Vec<Mat<F>>,
    /// `B_l` has shape d_{l+1} x d_l.
    pub b: Vec<Mat<F>>,
    pub p: Vec<Vec<F>>,
    pub q: Vec<Vec<F>>,
}

impl<F: Field> ConstraintPoint<F> {
    /// Residual `B_l A_l + A'_{l+1} B_l + p_{l+1} q_l` per node.
    pub fn residual(&self) -> Vec<Mat<F>> {
        let n = self.n;
        (0..n)
            .map(|l| {
                let ln = (l + 1) % n;
                let (dl, dn) = (self.d[l], self.d[ln]);
                let ba = linalg::mat_mul(&self.b[l], &self.a[l], dl);
                let ab = linalg::mat_mul(&self.aprime[ln], &self.b[l], dn);
                let mut r = linalg::mat_add(&ba, &ab);
                for i in 0..dn {
                    for j in 0..dl {
                        r[i][j] = r[i][j].add(&self.p[ln][i].mul(&self.q[l][j]));
                    }
                }
                r
            })
            .collect()
    }

    pub fn satisfies_constraints(&self) -> bool {
        self.residual().iter().all(linalg::is_zero_mat)
    }

    /// Values of the coordinates of S(a) (e/e' basis) at this point.
    pub fn assignment(&self, alg: &ChainsawLie) -> Vec<F> {
        alg.basis()
            .iter()
            .map(|b| match *b {
                BasisIndex::E(l, i, j) => self.a[l][j - 1][i - 1].clone(),
                BasisIndex::Eprime(l, i, j) => self.aprime[l][j - 1][i - 1].clone(),
                BasisIndex::G(l, i, j) => self.a[l][j - 1][i - 1].add(&self.aprime[l][j - 1][i - 1]),
                BasisIndex::F(l, i, j) => self.b[l][j - 1][i - 1].clone(),
                BasisIndex::P(l, i) => self.p[l][i - 1].clone(),
                BasisIndex::Q(l, i) => self.q[l][i - 1].clone(),
            })
            .collect()
    }
}

/// Solve `X a + ap X = rhs` for X (rows of ap, columns of a).
pub fn solve_sylvester<F: Field>(a: &Mat<F>, ap: &Mat<F>, rhs: &Mat<F>) -> Option<Mat<F>> {
    let (r, c) = (ap.len(), a.len());
    let nn = r * c;
    if nn == 0 {
        return Some(linalg::zeros(r, c));
    }
    let mut m: Mat<F> = linalg::zeros(nn, nn);
    for i in 0..r {
        for j in 0..c {
            let row = i * c + j;
            for k in 0..c {
                m[row][i * c + k] = m[row][i * c + k].add(&a[k][j]);
            }
            for k in 0..r {
                m[row][k * c + j] = m[row][k * c + j].add(&ap[i][k]);
            }
        }
    }
    if linalg::det(&m).is_zero() {
        return None;
    }
    let b: Vec<F> = (0..r).flat_map(|i| (0..c).map(move |j| (i, j))).map(|(i, j)| rhs[i][j].clone()).collect();
    let x = linalg::solve(&m, nn, &b)?;
    Some((0..r).map(|i| x[i * c..(i + 1) * c].to_vec()).collect())
}

/// Complete (A, A', p, q) to a point of the variety by solving for every B_l.
pub fn solve_constraint_point<F: Field>(
    n: usize,
    d: &[usize],
    a: Vec<Mat<F>>,
    aprime: Vec<Mat<F>>,
    p: Vec<Vec<F>>,
    q: Vec<Vec<F>>,
) -> Result<ConstraintPoint<F>> {
    if d.len() != n || a.len() != n || aprime.len() != n || p.len() != n || q.len() != n {
        return Err(Error::Inconsistent("every node needs A, A', p and q".into()));
    }
    for l in 0..n {
        let dl = d[l];
        let square = |m: &Mat<F>| m.len() == dl && m.iter().all(|r| r.len() == dl);
        if !square(&a[l]) || !square(&aprime[l]) || p[l].len() != dl || q[l].len() != dl {
            return Err(Error::Inconsistent(format!("shape mismatch at node {l}")));
        }
    }
    let mut b = Vec::with_capacity(n);
    for l in 0..n {
        let ln = (l + 1) % n;
        let (dl, dn) = (d[l], d[ln]);
        let rhs: Mat<F> = (0..dn).map(|i| (0..dl).map(|j| p[ln][i].mul(&q[l][j]).neg()).collect()).collect();
        let x = solve_sylvester(&a[l], &aprime[ln], &rhs)
            .ok_or_else(|| Error::SpectralClash(format!("spec(A_{l}) meets spec(-A'_{ln})")))?;
        b.push(x);
    }
    Ok(ConstraintPoint { n, d: d.to_vec(), a, aprime, b, p, q })
}

/// Random point; with `mu` given, A'_l = mu_l - A_l (the moment condition).
pub fn random_point<F: Field, R: Rng>(
    n: usize,
    d: &[usize],
    mu: Option<&[F]>,
    rng: &mut R,
    mut draw: impl FnMut(&mut R) -> F,
) -> Result<ConstraintPoint<F>> {
    let mut mat = |k: usize, rng: &mut R| -> Mat<F> { (0..k).map(|_| (0..k).map(|_| draw(rng)).collect()).collect() };
    let a: Vec<Mat<F>> = d.iter().map(|&k| mat(k, rng)).collect();
    let aprime: Vec<Mat<F>> = match mu {
        Some(m) => a
            .iter()
            .enumerate()
            .map(|(l, x)| {
                x.iter()
                    .enumerate()
                    .map(|(i, row)| row.iter().enumerate().map(|(j, v)| if i == j { m[l].sub(v) } else { v.neg() }).collect())
                    .collect()
            })
            .collect(),
        None => d.iter().map(|&k| mat(k, rng)).collect(),
    };
    let mut vecs = |rng: &mut R| -> Vec<Vec<F>> { d.iter().map(|&k| (0..k).map(|_| draw(rng)).collect()).collect() };
    let p = vecs(rng);
    let q = vecs(rng);
    solve_constraint_point(n, d, a, aprime, p, q)
}

/// Random rational point with small integer entries; retries on spectral clashes.
pub fn sample_constraint_point(n: usize, d: &[i64], seed: u64) -> Result<ConstraintPoint<Q>> {
    let d = checked_dims(n, d)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut last = None;
    for _ in 0..32 {
        match random_point::<Q, _>(n, &d, None, &mut rng, |r| Q::int(r.gen_range(-5..=5))) {
            Ok(p) => return Ok(p),
            Err(e) => last = Some(e),
        }
    }
    Err(last.unwrap_or_else(|| Error::SpectralClash("no admissible sample".into())))
}

fn checked_dims(n: usize, d: &[i64]) -> Result<Vec<usize>> {
    if d.len() != n {
        return Err(Error::Precondition(format!("dimension vector must have length n = {n}")));
    }
    d.iter()
        .enumerate()
        .map(|(l, &x)| if x < 0 { Err(Error::NegativeDimension(l)) } else { Ok(x as usize) })
        .collect()
}

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq)]
pub struct ConstraintPointJson {
    pub n: usize,
    pub d: Vec<usize>,
    #[serde(rename = "A")]
    pub a: Vec<Mat<Q>>,
    #[serde(rename = "Aprime")]
    pub aprime: Vec<Mat<Q>>,
    #[serde(rename = "B")]
    pub b: Vec<Mat<Q>>,
    pub p: Vec<Vec<Q>>,
    pub q: Vec<Vec<Q>>,
}

impl ConstraintPoint<Q> {
    pub fn to_json(&self) -> ConstraintPointJson {
        ConstraintPointJson {
            n: self.n,
            d: self.d.clone(),
            a: self.a.clone(),
            aprime: self.aprime.clone(),
            b: self.b.clone(),
            p: self.p.clone(),
            q: self.q.clone(),
        }
    }

    pub fn from_json(j: &ConstraintPointJson) -> Result<Self> {
        let pt = ConstraintPoint {
            n: j.n,
            d: j.d.clone(),
            a: j.a.clone(),
            aprime: j.aprime.clone(),
            b: j.b.clone(),
            p: j.p.clone(),
            q: j.q.clone(),
        };
        if pt.d.len() != pt.n || pt.b.len() != pt.n {
            return Err(Error::Inconsistent("node count mismatch".into()));
        }
        if !pt.satisfies_constraints() {
            return Err(Error::Inconsistent("point violates the constraint equations".into()));
        }
        Ok(pt)
    }
}

// ---------------------------------------------------------------------------
// Relation suites

/// Whether the shape is the single-node case: one nonzero node, no edges.
pub fn is_single_node(d: &[usize]) -> bool {
    d.len() >= 2 && d.iter().filter(|&&x| x > 0).count() == 1
}

#[derive(Clone, Debug)]
enum Inst {
    AA(usize, usize, usize, usize),
    AB(usize, usize, usize, usize),
    BB(usize, usize, usize, usize),
    Sl2BB(usize, usize, usize),
    Serre(usize, usize, usize, usize, usize),
    Chain(usize, Vec<usize>, usize),
}

struct Check {
    relation: &'static str,
    instance: String,
    diff: MultiPoly,
    modulo: bool,
}

/// Classical relation suites. With `mu` nonzero the generators are the
/// deformed ones and the adjacent relation carries the deformation term
/// `-(mu_l + c_k - c_l) b_{kl;r,s}` per edge k -> l, where c_k = mu_k / d_k.
pub fn verify_poisson_relations(n: usize, d: &[i64], mu: &[Q], max_index: usize) -> Result<Report> {
    let sym = Sym::new(n, d)?;
    let du = sym.d().to_vec();
    if du.iter().sum::<usize>() > 6 {
        return Err(Error::SizeLimit("sum of d_l must be at most 6 for symbolic expansion".into()));
    }
    let shifts = deformation_shifts(&du, mu)?;
    let ideal = ClassicalIdeal::new(&sym, Some(mu));
    let nodes: Vec<usize> = (0..n).filter(|&l| du[l] > 0).collect();
    let mut insts = Vec::new();
    let single = is_single_node(&du);
    for &k in &nodes {
        for &l in &nodes {
            for r in 1..=max_index {
                for s in 1..=max_index {
                    insts.push(Inst::AA(k, l, r, s));
                }
                for s in 0..=max_index {
                    insts.push(Inst::AB(k, l, r, s));
                }
            }
            for r in 0..=max_index {
                for s in 0..=max_index {
                    if single {
                        insts.push(Inst::Sl2BB(k, r, s));
                    } else {
                        insts.push(Inst::BB(k, l, r, s));
                    }
                }
            }
            let adjacent = n >= 3 && (l == (k + 1) % n || k == (l + 1) % n);
            if adjacent {
                for r1 in 0..=max_index {
                    for r2 in r1..=max_index {
                        for s in 0..=max_index {
                            insts.push(Inst::Serre(k, l, r1, r2, s));
                        }
                    }
                }
            }
        }
    }
    // Chains of length len + 1 <= n - 1 through nonzero nodes.
    for &k in &nodes {
        for len in 1..n.saturating_sub(1) {
            let through = (0..=len).all(|m| du[(k + m) % n] > 0);
            if !through {
                continue;
            }
            for s in 0..=max_index.min(2) {
                for r in 0..=max_index.min(2) {
                    let mut head = vec![0; len];
                    head[0] = s;
                    insts.push(Inst::Chain(k, head.clone(), r));
                    if len > 1 {
                        let mut tail = vec![0; len];
                        tail[len - 1] = s;
                        insts.push(Inst::Chain(k, tail, r));
                    }
                }
            }
        }
    }
    let checks: Vec<Result<Check>> = par::map(&insts, |inst| build_check(&sym, &shifts, mu, inst));
    let mut report = Report::new();
    let evaluated: Vec<(String, String, crate::report::Status, Option<usize>, String)> = par::map(&checks, |c| match c {
        Err(e) => ("error".into(), String::new(), Status::Fail, None, e.to_string()),
        Ok(c) => {
            if c.modulo {
                let m = ideal.contains(&c.diff);
                (c.relation.into(), c.instance.clone(), m.status, m.witness_degree, m.detail)
            } else {
                let ok = c.diff.is_zero();
                (
                    c.relation.into(),
                    c.instance.clone(),
                    if ok { Status::Pass } else { Status::Fail },
                    Some(0),
                    "identity in S(a)".into(),
                )
            }
        }
    });
    for (rel, inst, st, w, det) in evaluated {
        let e = report.push(rel, inst, st);
        e.witness_degree = w;
        e.detail = Some(det);
    }
    if n == 2 && nodes.len() == 2 {
        let e = report.push("serre", "n=2", Status::Skipped);
        e.detail = Some("the affine rank-one Serre relation has a different form".into());
    }
    Ok(report)
}

fn build_check(sym: &Sym, shifts: &[Q], mu: &[Q], inst: &Inst) -> Result<Check> {
    let n = sym.n();
    let g = |x: Generator| sym.generator(&x, shifts);
    let a = |l: usize, r: usize| g(Generator::A { l, r });
    let b = |l: usize, s: usize| g(Generator::B { l, s });
    Ok(match inst.clone() {
        Inst::AA(k, l, r, s) => Check {
            relation: "{a,a}=0",
            instance: format!("k={k} l={l} r={r} s={s}"),
            diff: sym.bracket(&a(k, r)?, &a(l, s)?)?,
            modulo: false,
        },
        Inst::AB(k, l, r, s) => {
            let lhs = sym.bracket(&a(k, r)?, &b(l, s)?)?;
            let rhs = if k == l { b(l, r + s - 1)?.scale(&Q::from(r)) } else { sym.zero() };
            Check {
                relation: "{a_r,b_s}=r b_{r+s-1}",
                instance: format!("k={k} l={l} r={r} s={s}"),
                diff: lhs.sub(&rhs),
                modulo: false,
            }
        }
        Inst::Sl2BB(k, r, s) => {
            let lhs = sym.bracket(&b(k, r)?, &b(k, s)?)?;
            let (hi, lo, sign) = if r >= s { (r, s, Q::one()) } else { (s, r, -Q::one()) };
            let mut rhs = sym.zero();
            for m in lo..hi {
                rhs.add_assign(&b(k, m)?.mul(&b(k, hi + lo - m - 1)?));
            }
            Check {
                relation: "{b_r,b_s}=sum b_m b_{r+s-m-1}",
                instance: format!("l={k} r={r} s={s}"),
                diff: lhs.sub(&rhs.scale(&sign)),
                modulo: false,
            }
        }
        Inst::BB(k, l, r, s) => {
            let lhs = sym.bracket(&b(k, r + 1)?, &b(l, s)?)?.sub(&sym.bracket(&b(k, r)?, &b(l, s + 1)?)?);
            let mut rhs = b(k, r)?.mul(&b(l, s)?).scale(&Q::int(cartan(n, k, l)));
            if k != l {
                if l == (k + 1) % n {
                    let c = &(&mu[l] + &shifts[k]) - &shifts[l];
                    rhs = rhs.sub(&g(Generator::Chain { start: k, exps: vec![r, s] })?.scale(&c));
                }
                if k == (l + 1) % n {
                    let c = &(&mu[k] + &shifts[l]) - &shifts[k];
                    rhs = rhs.sub(&g(Generator::Chain { start: l, exps: vec![s, r] })?.scale(&c));
                }
            }
            Check {
                relation: "{b_{k,r+1},b_{l,s}}-{b_{k,r},b_{l,s+1}}=c_kl b_{k,r}b_{l,s}",
                instance: format!("k={k} l={l} r={r} s={s}"),
                diff: lhs.sub(&rhs),
                modulo: k != l,
            }
        }
        Inst::Serre(k, l, r1, r2, s) => {
            let (b1, b2, bl) = (b(k, r1)?, b(k, r2)?, b(l, s)?);
            let lhs = sym.bracket(&b2, &sym.bracket(&b1, &bl)?)?.add(&sym.bracket(&b1, &sym.bracket(&b2, &bl)?)?);
            Check {
                relation: "serre",
                instance: format!("k={k} l={l} r1={r1} r2={r2} s={s}"),
                diff: lhs,
                modulo: true,
            }
        }
        Inst::Chain(k, exps, r) => {
            let len = exps.len();
            let next = (k + len) % n;
            let lhs = sym.bracket(&g(Generator::Chain { start: k, exps: exps.clone() })?, &b(next, r)?)?;
            let mut longer = exps.clone();
            longer.push(r);
            let rhs = g(Generator::Chain { start: k, exps: longer })?;
            Check {
                relation: "{b_{kl;s},b_{l+1,r}}=b_{k,l+1;s,r}",
                instance: format!("k={k} exps={exps:?} r={r}"),
                diff: lhs.sub(&rhs),
                modulo: false,
            }
        }
    })
}

/// {g_{l,ij}, x} = 0 for every generator kind, as identities in S(a).
pub fn verify_generator_invariance(n: usize, d: &[i64], max_index: usize) -> Result<Report> {
    let sym = Sym::new(n, d)?;
    let du = sym.d().to_vec();
    let zero_shift = vec![Q::zero(); n];
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
        if du[(l + 1) % n] > 0 && n >= 2 {
            gens.push(Generator::Chain { start: l, exps: vec![1, 0] });
            gens.push(Generator::Chain { start: l, exps: vec![0, 1] });
        }
    }
    if du.iter().all(|&x| x > 0) {
        gens.push(Generator::Cycle { exps: vec![0; n] });
        let mut e = vec![0; n];
        e[0] = 1;
        gens.push(Generator::Cycle { exps: e });
    }
    let mut diags = Vec::new();
    for l in 0..n {
        for i in 1..=du[l] {
            for j in 1..=du[l] {
                diags.push((l, i, j));
            }
        }
    }
    let rows: Vec<(String, bool)> = par::map(&gens, |gen| {
        let x = sym.generator(gen, &zero_shift).expect("generator");
        let ok = diags.iter().all(|&(l, i, j)| {
            let gd = sym.diag_element(l, i, j).expect("g");
            sym.bracket(&gd, &x).expect("bracket").is_zero()
        });
        (gen.to_string(), ok)
    });
    let mut rep = Report::new();
    for (name, ok) in rows {
        rep.push("{g,x}=0", name, if ok { Status::Pass } else { Status::Fail }).witness_degree = Some(0);
    }
    Ok(rep)
}

/// {x, K} lies in the constraint ideal for every basis letter x and constraint K.
pub fn verify_ideal_invariance(n: usize, d: &[i64]) -> Result<Report> {
    let sym = Sym::new(n, d)?;
    if sym.algebra().dim() > 64 {
        return Err(Error::SizeLimit("algebra too large for the invariance check".into()));
    }
    let ideal = ClassicalIdeal::new(&sym, None);
    let mut rep = Report::new();
    if ideal.generators().is_empty() {
        rep.push("{x,K} in I", "no constraints", Status::Pass).detail = Some("vacuous".into());
        return Ok(rep);
    }
    let pairs: Vec<(usize, usize)> =
        (0..sym.algebra().dim()).flat_map(|x| (0..ideal.generators().len()).map(move |k| (x, k))).collect();
    let rows = par::map(&pairs, |&(x, k)| {
        let xb = sym.algebra().basis()[x];
        let ((l, bb, aa), kp) = &ideal.generators()[k];
        let br = sym.bracket(&sym.xu(xb), kp).expect("bracket");
        let ok = if br.is_zero() { Some(true) } else { ideal.linear_membership(&br) };
        (format!("x={xb} K_{l}({bb},{aa})"), ok)
    });
    for (inst, ok) in rows {
        let st = match ok {
            Some(true) => Status::Pass,
            Some(false) => Status::Fail,
            None => Status::Skipped,
        };
        rep.push("{x,K} in I", inst, st).witness_degree = Some(2);
    }
    Ok(rep)
}

// ---------------------------------------------------------------------------
// Worked examples with one-dimensional spaces (quiver moment convention)

/// Checks the displayed invariant relations of the rank-one examples. The
/// relation R is tested against the equations E_l = B_l D_l + N_l, linear in
/// B_l, by substituting B_l = -N_l / D_l and clearing denominators.
pub fn examples_check() -> Report {
    let mut rep = Report::new();
    // SL(3): single equation B_1 (A_2 - A_1) + p_2 q_1 = 0.
    let v = MultiPoly::with_vars(&["A1", "A2", "B1", "p1", "p2", "q1", "q2"]);
    let x = |s: &str| MultiPoly::var_named(&v, s).expect("var");
    let b10 = x("q1").mul(&x("p1"));
    let b20 = x("q2").mul(&x("p2"));
    let r = x("q2").mul(&x("B1")).mul(&x("p1"));
    let rel = b10.mul(&b20).add(&r.mul(&x("A2").sub(&x("A1"))));
    let ok = clears(&rel, &[("B1", x("A2").sub(&x("A1")), x("p2").mul(&x("q1")))]);
    let e = rep.push("example sl3", "b_{1,0}b_{2,0}+r(A_2-A_1)=0", st(ok));
    e.detail = Some("equation B_1(A_2-A_1)+p_2q_1=0".into());

    // Affine SL(2): B_1(A_0-A_1)+p_0q_1 = 0 = B_0(A_1-A_0)+p_1q_0.
    let w = MultiPoly::with_vars(&["A0", "A1", "B0", "B1", "p0", "p1", "q0", "q1"]);
    let y = |s: &str| MultiPoly::var_named(&w, s).expect("var");
    let eqs = [
        ("B1", y("A0").sub(&y("A1")), y("p0").mul(&y("q1"))),
        ("B0", y("A1").sub(&y("A0")), y("p1").mul(&y("q0"))),
    ];
    let b1 = y("q1").mul(&y("p1"));
    let b0 = y("q0").mul(&y("p0"));
    let s = y("B0").mul(&y("B1"));
    let sq = |a: &MultiPoly, c: &MultiPoly| a.sub(c).pow(2);
    // Index 2 read mod 2 is node 0, so both readings give one polynomial.
    let readings = [
        ("b_{1,0}b_{2,0}-s(A_2-A_1)^2=0 with 2=0 mod 2", b1.mul(&b0).sub(&s.mul(&sq(&y("A0"), &y("A1"))))),
        ("b_{1,0}b_{0,0}-s(A_0-A_1)^2=0", b1.mul(&b0).sub(&s.mul(&sq(&y("A0"), &y("A1"))))),
    ];
    for (name, rel) in readings {
        let ok = clears(&rel, &eqs);
        rep.push("example affine sl2 (displayed sign)", name, st(ok)).detail =
            Some("equations B_1(A_0-A_1)+p_0q_1=0, B_0(A_1-A_0)+p_1q_0=0".into());
    }
    let fixed = b1.mul(&b0).add(&s.mul(&sq(&y("A0"), &y("A1"))));
    rep.push("example affine sl2 (opposite sign)", "b_{1,0}b_{0,0}+s(A_0-A_1)^2=0", st(clears(&fixed, &eqs)));
    rep
}

fn st(ok: bool) -> Status {
    if ok {
        Status::Pass
    } else {
        Status::Fail
    }
}

/// Whether `rel` vanishes after eliminating each named variable B through
/// B * coef + rest = 0.
fn clears(rel: &MultiPoly, eqs: &[(&str, MultiPoly, MultiPoly)]) -> bool {
    let mut cur = rel.clone();
    for (name, coef, rest) in eqs {
        let idx = cur.var_index(name).expect("var");
        let top = cur.terms().keys().map(|e| e[idx]).max().unwrap_or(0);
        // sum_k c_k B^k  ->  sum_k c_k (-rest)^k coef^(top-k)
        let mut acc = MultiPoly::zero(cur.vars());
        for (e, c) in cur.terms() {
            let k = e[idx];
            let mut e2 = e.clone();
            e2[idx] = 0;
            let t = MultiPoly::monomial(cur.vars(), e2, c.clone())
                .mul(&rest.neg().pow(k))
                .mul(&coef.pow(top - k));
            acc.add_assign(&t);
        }
        cur = acc;
    }
    cur.is_zero()
}

// ---------------------------------------------------------------------------
// Etale coordinates

/// Numeric type used by the etale check.
pub trait EtaleField: Field {
    fn close(&self, o: &Self) -> bool;
}

impl EtaleField for Q {
    fn close(&self, o: &Self) -> bool {
        self == o
    }
}

impl EtaleField for f64 {
    fn close(&self, o: &Self) -> bool {
        (self - o).abs() <= 1e-8 * (1.0 + self.abs().max(o.abs()))
    }
}

fn elementary<F: Field>(xs: &[F]) -> Vec<F> {
    // sigma_0..sigma_k
    let mut s = vec![F::one()];
    for x in xs {
        let mut t = s.clone();
        t.push(F::zero());
        for r in 1..t.len() {
            t[r] = t[r].add(&s[r - 1].mul(x));
        }
        s = t;
    }
    s
}

/// Brackets of the coordinates x_{l,i}, y_{l,i} at a point with diagonal A_l
/// and A' = -A, computed by the chain rule from the brackets of a_{l,r},
/// b_{l,s}. `spectra[l]` is the diagonal of A_l.
pub fn etale_bracket_check<F: EtaleField>(
    n: usize,
    spectra: &[Vec<Q>],
    p: &[Vec<Q>],
    q: &[Vec<Q>],
) -> Result<Report> {
    let d: Vec<i64> = spectra.iter().map(|s| s.len() as i64).collect();
    let sym = Sym::new(n, &d)?;
    let du = sym.d().to_vec();
    for (l, sp) in spectra.iter().enumerate() {
        for i in 0..sp.len() {
            for j in 0..i {
                if sp[i] == sp[j] {
                    return Err(Error::Precondition(format!("repeated eigenvalue at node {l}")));
                }
            }
        }
    }
    let diag = |s: &[Q]| -> Mat<Q> {
        (0..s.len()).map(|i| (0..s.len()).map(|j| if i == j { s[i].clone() } else { Q::zero() }).collect()).collect()
    };
    let a: Vec<Mat<Q>> = spectra.iter().map(|s| diag(s)).collect();
    let ap: Vec<Mat<Q>> = spectra.iter().map(|s| diag(&s.iter().map(|x| -x).collect::<Vec<_>>())).collect();
    let pt = solve_constraint_point(n, &du, a, ap, p.to_vec(), q.to_vec())
        .map_err(|_| Error::Precondition("eigenvalue collision between adjacent nodes".into()))?;
    let vals: Vec<F> = pt.assignment(sym.algebra()).iter().map(F::from_q).collect();
    let zero_shift = vec![Q::zero(); n];

    // Coordinates u = (a_{l,1..d_l}, b_{l,0..d_l-1}) for each node.
    let mut coords: Vec<(usize, bool, usize)> = Vec::new();
    for l in 0..n {
        for r in 1..=du[l] {
            coords.push((l, true, r));
        }
        for s in 0..du[l] {
            coords.push((l, false, s));
        }
    }
    let polys: Vec<MultiPoly> = coords
        .iter()
        .map(|&(l, is_a, k)| {
            let g = if is_a { Generator::A { l, r: k } } else { Generator::B { l, s: k } };
            sym.generator(&g, &zero_shift)
        })
        .collect::<Result<_>>()?;
    let m = coords.len();
    let pairs: Vec<(usize, usize)> = (0..m).flat_map(|i| (0..m).map(move |j| (i, j))).collect();
    let brs: Vec<F> = par::map(&pairs, |&(i, j)| sym.bracket(&polys[i], &polys[j]).expect("bracket").eval_in(&vals));
    let bracket_u = |i: usize, j: usize| brs[i * m + j].clone();
    let bvals: Vec<F> = polys.iter().map(|p| p.eval_in(&vals)).collect();

    // Gradients of x_{l,i} and y_{l,i} in the u coordinates.
    let xs: Vec<Vec<F>> = spectra.iter().map(|s| s.iter().map(F::from_q).collect()).collect();
    let mut grads: Vec<(usize, bool, usize, Vec<F>)> = Vec::new();
    let mut yval: BTreeMap<(usize, usize), F> = BTreeMap::new();
    for l in 0..n {
        let dl = du[l];
        if dl == 0 {
            continue;
        }
        let pos_a = |r: usize| coords.iter().position(|&c| c == (l, true, r)).expect("a");
        let pos_b = |s: usize| coords.iter().position(|&c| c == (l, false, s)).expect("b");
        // J[r-1][i] = d a_r / d x_i = r x_i^{r-1}; dx = J^{-1} da.
        let jac: Mat<F> = (1..=dl)
            .map(|r| {
                xs[l].iter()
                    .map(|x| {
                        let mut t = F::from_i64(r as i64);
                        for _ in 0..r - 1 {
                            t = t.mul(x);
                        }
                        t
                    })
                    .collect()
            })
            .collect();
        let jinv = linalg::inverse(&jac).ok_or_else(|| Error::Precondition("singular power-sum Jacobian".into()))?;
        let b_at = |s: usize| bvals[pos_b(s)].clone();
        let mut dx: Vec<Vec<F>> = Vec::new();
        for i in 0..dl {
            let mut g = vec![F::zero(); m];
            for r in 1..=dl {
                g[pos_a(r)] = jinv[i][r - 1].clone();
            }
            dx.push(g.clone());
            grads.push((l, true, i, g));
        }
        for i in 0..dl {
            let others: Vec<F> = (0..dl).filter(|&k| k != i).map(|k| xs[l][k].clone()).collect();
            let sig = elementary(&others);
            let mut g = vec![F::zero(); m];
            let mut y = F::zero();
            for r in 0..dl {
                let c = if r % 2 == 0 { sig[r].clone() } else { sig[r].neg() };
                g[pos_b(dl - 1 - r)] = g[pos_b(dl - 1 - r)].add(&c);
                y = y.add(&c.mul(&b_at(dl - 1 - r)));
            }
            for j in 0..dl {
                if j == i {
                    continue;
                }
                let rest: Vec<F> = (0..dl).filter(|&k| k != i && k != j).map(|k| xs[l][k].clone()).collect();
                let sig2 = elementary(&rest);
                // d y_i / d x_j = sum_r (-1)^r sigma_{r-1}(x without i, j) b_{d-1-r}
                let mut dy = F::zero();
                for r in 1..dl {
                    let t = sig2[r - 1].mul(&b_at(dl - 1 - r));
                    dy = if r % 2 == 0 { dy.add(&t) } else { dy.sub(&t) };
                }
                for (gk, xk) in g.iter_mut().zip(&dx[j]) {
                    *gk = gk.add(&dy.mul(xk));
                }
            }
            yval.insert((l, i), y);
            grads.push((l, false, i, g));
        }
    }
    let pb = |g1: &[F], g2: &[F]| -> F {
        let mut acc = F::zero();
        for i in 0..m {
            if g1[i].is_zero() {
                continue;
            }
            for j in 0..m {
                if !g2[j].is_zero() {
                    acc = acc.add(&g1[i].mul(&g2[j]).mul(&bracket_u(i, j)));
                }
            }
        }
        acc
    };
    let mut rep = Report::new();
    for (k, ka, i, gi) in &grads {
        for (l, la, j, gj) in &grads {
            let got = pb(gi, gj);
            let (name, expect) = match (ka, la) {
                (true, true) => ("{x,x}=0", Some(F::zero())),
                (true, false) => {
                    let e = if k == l && i == j { yval[&(*l, *j)].clone() } else { F::zero() };
                    ("{x_{k,i},y_{l,j}}=delta y", Some(e))
                }
                (false, true) => continue,
                (false, false) => {
                    if k == l && i == j {
                        continue;
                    }
                    let coeff = 2 * (k == l) as i64 - cartan(n, *k, *l);
                    let den = xs[*k][*i].sub(&xs[*l][*j]);
                    if den.is_zero() {
                        if coeff == 0 {
                            ("{y,y}", Some(F::zero()))
                        } else {
                            ("{y,y}", None)
                        }
                    } else {
                        let yy = yval[&(*k, *i)].mul(&yval[&(*l, *j)]).mul(&den.inv());
                        if k != l {
                            // Consistent with the adjacent relation at d = (1, 1): the
                            // coefficient is c_kl, opposite to 2 delta - c.
                            let e = F::from_i64(cartan(n, *k, *l)).mul(&yy);
                            let inst = format!("k={k} i={} l={l} j={}", i + 1, j + 1);
                            rep.push("{y_{k,i},y_{l,j}}=c yy/(x-x), k!=l", inst, st(got.close(&e)));
                        }
                        ("{y_{k,i},y_{l,j}}=(2delta-c)yy/(x-x)", Some(F::from_i64(coeff).mul(&yy)))
                    }
                }
            };
            let inst = format!("k={k} i={} l={l} j={}", i + 1, j + 1);
            match expect {
                Some(e) => {
                    let ok = got.close(&e);
                    let ent = rep.push(name, inst, st(ok));
                    if !ok {
                        ent.detail = Some(format!("got {got:?}, expected {e:?}"));
                    }
                }
                None => {
                    rep.push(name, inst, Status::Skipped).detail = Some("x_{k,i}=x_{l,j}".into());
                }
            }
        }
    }
    Ok(rep)
}

/// Etale check at `count` random points: distinct small-integer spectra per
/// node (disjoint across nodes) and random p, q.
pub fn etale_sampled<F: EtaleField>(n: usize, d: &[i64], count: usize, seed: u64) -> Result<Report> {
    let du = checked_dims(n, d)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rep = Report::new();
    for t in 0..count {
        let total: usize = du.iter().sum();
        let mut pool: Vec<i64> = (-3 * total as i64 - 3..=3 * total as i64 + 3).filter(|&x| x != 0).collect();
        let mut spectra = Vec::new();
        for &dl in &du {
            let mut s = Vec::new();
            for _ in 0..dl {
                let k = rng.gen_range(0..pool.len());
                s.push(Q::frac(pool.swap_remove(k), rng.gen_range(1..=3)));
            }
            spectra.push(s);
        }
        let mut draw = || Q::int(rng.gen_range(1..=7));
        let p: Vec<Vec<Q>> = du.iter().map(|&k| (0..k).map(|_| draw()).collect()).collect();
        let q: Vec<Vec<Q>> = du.iter().map(|&k| (0..k).map(|_| draw()).collect()).collect();
        match etale_bracket_check::<F>(n, &spectra, &p, &q) {
            Ok(r) => {
                for mut e in r.entries {
                    e.instance = format!("point {t}: {}", e.instance);
                    rep.entries.push(e);
                }
            }
            Err(e) => {
                rep.push("etale point", format!("point {t}"), Status::Skipped).detail = Some(e.to_string());
            }
        }
    }
    Ok(rep)
}

// ---------------------------------------------------------------------------
// Spectral pair

/// Result of the spectral-pair construction.
#[derive(Clone, Debug)]
pub struct SpectralPair {
    /// Coefficients e_1..e_d of P(z) = z^d + e_1 z^{d-1} + ... + e_d.
    pub e: Vec<MultiPoly>,
    /// Coefficients f_0..f_{d-1} of Q(z) = sum f_s z^{d-1-s}.
    pub f: Vec<MultiPoly>,
    /// b_0..b_{2d-1}: the given values followed by the recursion.
    pub b: Vec<MultiPoly>,
    /// Coefficients of z^{-1-r} in Q/P, r = 0..2d-1.
    pub expansion: Vec<MultiPoly>,
}

impl SpectralPair {
    pub fn expansion_matches(&self) -> bool {
        self.b.iter().zip(&self.expansion).all(|(x, y)| x.sub(y).is_zero())
    }
}

/// Monic P from power sums by Newton's identities, Q from the f_s, and the
/// Laurent expansion of Q/P at infinity.
pub fn spectral_pair(a_values: &[MultiPoly], b_values: &[MultiPoly]) -> Result<SpectralPair> {
    let d = a_values.len();
    if d == 0 || b_values.len() < d {
        return Err(Error::Inconsistent("need d power sums and at least d values b_s".into()));
    }
    let vars = a_values[0].vars().clone();
    let zero = MultiPoly::zero(&vars);
    let one = MultiPoly::constant(&vars, Q::one());
    // k e_k = -sum_{i=1}^k e_{k-i} p_i with e_0 = 1.
    let mut e = vec![one.clone()];
    for k in 1..=d {
        let mut acc = zero.clone();
        for i in 1..=k {
            acc.add_assign(&e[k - i].mul(&a_values[i - 1]));
        }
        e.push(acc.scale(&Q::frac(-1, k as i64)));
    }
    let mut b: Vec<MultiPoly> = b_values.iter().take(2 * d).cloned().collect();
    while b.len() < 2 * d {
        let s = b.len();
        let mut acc = zero.clone();
        for r in 1..=d {
            acc.add_assign(&e[r].mul(&b[s - r]));
        }
        b.push(acc.neg());
    }
    let f: Vec<MultiPoly> = (0..d)
        .map(|s| {
            let mut acc = b[s].clone();
            for r in 1..=s {
                acc.add_assign(&e[r].mul(&b[s - r]));
            }
            acc
        })
        .collect();
    // Q/P = Q z^{-d} (1 + e_1 z^{-1} + ... )^{-1}, as a series in w = z^{-1}.
    let pser = crate::series::TruncSeries::exact(0, e.clone(), zero.clone());
    let pinv = pser.inv(2 * d + 1)?;
    let qser = crate::series::TruncSeries::exact(0, f.clone(), zero.clone());
    let prod = qser.mul(&pinv);
    let expansion: Vec<MultiPoly> = (0..2 * d).map(|r| prod.coeff(-(r as i64))).collect::<Result<_>>()?;
    Ok(SpectralPair { e: e[1..].to_vec(), f, b, expansion })
}

/// Generic d x d matrix check: a_r = Tr A^r and b_r = q A^r p for r < 2d in
/// fully symbolic entries; Q/P must reproduce every b_r.
pub fn spectral_pair_generic(d: usize) -> Result<SpectralPair> {
    let mut names = Vec::new();
    for i in 0..d {
        for j in 0..d {
            names.push(format!("A{i}{j}"));
        }
    }
    for i in 0..d {
        names.push(format!("p{i}"));
        names.push(format!("q{i}"));
    }
    let vars = Arc::new(names);
    let v = |s: String| MultiPoly::var_named(&vars, &s).expect("var");
    let a: PMat = (0..d).map(|i| (0..d).map(|j| v(format!("A{i}{j}"))).collect()).collect();
    let zero = MultiPoly::zero(&vars);
    let matvec = |m: &PMat, x: &[MultiPoly]| -> Vec<MultiPoly> {
        (0..d)
            .map(|i| {
                let mut acc = zero.clone();
                for j in 0..d {
                    acc.add_assign(&m[i][j].mul(&x[j]));
                }
                acc
            })
            .collect()
    };
    let mut pw: Vec<Vec<MultiPoly>> =
        (0..d).map(|i| (0..d).map(|j| MultiPoly::constant(&vars, Q::from((i == j) as i64))).collect()).collect();
    let mut traces = Vec::new();
    for _ in 1..=d {
        pw = (0..d)
            .map(|i| {
                (0..d)
                    .map(|j| {
                        let mut acc = zero.clone();
                        for k in 0..d {
                            acc.add_assign(&pw[i][k].mul(&a[k][j]));
                        }
                        acc
                    })
                    .collect()
            })
            .collect();
        let mut t = zero.clone();
        for i in 0..d {
            t.add_assign(&pw[i][i]);
        }
        traces.push(t);
    }
    let mut x: Vec<MultiPoly> = (0..d).map(|i| v(format!("p{i}"))).collect();
    let qv: Vec<MultiPoly> = (0..d).map(|i| v(format!("q{i}"))).collect();
    let mut bs = Vec::new();
    for _ in 0..2 * d {
        let mut acc = zero.clone();
        for i in 0..d {
            acc.add_assign(&qv[i].mul(&x[i]));
        }
        bs.push(acc);
        x = matvec(&a, &x);
    }
    let sp = spectral_pair(&traces, &bs[..d])?;
    // The recursion values must agree with the true b_r (Cayley-Hamilton).
    let mut out = sp.clone();
    out.b = bs;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use BasisIndex as B;

    fn q(x: i64) -> Q {
        Q::int(x)
    }

    #[test]
    fn single_node_brackets() {
        let s = Sym::new(2, &[0, 1]).unwrap();
        let e = s.x(B::E(1, 1, 1)).unwrap();
        let p = s.x(B::P(1, 1)).unwrap();
        let qq = s.x(B::Q(1, 1)).unwrap();
        let pq = p.mul(&qq);
        assert_eq!(s.bracket(&e, &pq).unwrap(), pq);
        assert!(s.bracket(&e, &e).unwrap().is_zero());
        let z = vec![Q::zero(); 2];
        assert_eq!(s.generator(&Generator::A { l: 1, r: 1 }, &z).unwrap(), e);
        assert_eq!(s.generator(&Generator::B { l: 1, s: 0 }, &z).unwrap(), pq);
        let b1 = s.generator(&Generator::B { l: 1, s: 1 }, &z).unwrap();
        assert_eq!(s.bracket(&b1, &pq).unwrap(), pq.mul(&pq));
    }

    #[test]
    fn chain_in_coordinates() {
        let s = Sym::new(3, &[0, 1, 1]).unwrap();
        let z = vec![Q::zero(); 3];
        let c = s.generator(&Generator::Chain { start: 1, exps: vec![0, 0] }, &z).unwrap();
        let want = s.x(B::P(1, 1)).unwrap().mul(&s.x(B::F(1, 1, 1)).unwrap()).mul(&s.x(B::Q(2, 1)).unwrap());
        assert_eq!(c, want);
    }

    #[test]
    fn mismatched_algebras() {
        let s = Sym::new(2, &[0, 1]).unwrap();
        let t = Sym::new(2, &[0, 2]).unwrap();
        assert_eq!(s.bracket(&s.zero(), &t.zero()), Err(Error::MismatchedAlgebras));
    }

    #[test]
    fn deformation_requires_dimension() {
        assert!(deformation_shifts(&[0, 1], &[q(1), q(0)]).is_err());
        assert_eq!(deformation_shifts(&[2, 1], &[q(1), q(3)]).unwrap(), vec![Q::frac(1, 2), q(3)]);
    }

    #[test]
    fn sylvester_examples() {
        let one = || vec![vec![q(1)]];
        let empty = || Vec::<Vec<Q>>::new();
        let pt = solve_constraint_point(
            3,
            &[0, 1, 1],
            vec![empty(), one(), one()],
            vec![empty(), one(), one()],
            vec![vec![], vec![q(1)], vec![q(2)]],
            vec![vec![], vec![q(1)], vec![q(1)]],
        )
        .unwrap();
        assert_eq!(pt.b[1], vec![vec![q(-1)]]);
        assert!(pt.satisfies_constraints());
        let clash = solve_constraint_point(
            3,
            &[0, 1, 1],
            vec![empty(), one(), one()],
            vec![empty(), one(), vec![vec![q(-1)]]],
            vec![vec![], vec![q(1)], vec![q(2)]],
            vec![vec![], vec![q(1)], vec![q(1)]],
        );
        assert!(matches!(clash, Err(Error::SpectralClash(_))));
    }

    #[test]
    fn sampled_point_on_variety() {
        let pt = sample_constraint_point(2, &[2, 1], 7).unwrap();
        assert!(pt.satisfies_constraints());
        let back = ConstraintPoint::from_json(&serde_json::from_str(&serde_json::to_string(&pt.to_json()).unwrap()).unwrap())
            .unwrap();
        assert_eq!(back, pt);
        let s = Sym::new(2, &[2, 1]).unwrap();
        let vals = pt.assignment(s.algebra());
        for (_, k) in s.constraints() {
            assert!(k.eval(&vals).is_zero());
        }
    }

    #[test]
    fn membership_tiers_agree() {
        // d = (1,1): normal form, linear algebra and localization must agree.
        let s = Sym::new(3, &[0, 1, 1]).unwrap();
        let mu = vec![Q::zero(); 3];
        let ideal = ClassicalIdeal::new(&s, Some(&mu));
        let (_, k) = &ideal.generators()[0];
        let x = s.x(B::E(1, 1, 1)).unwrap();
        let inside = k.mul(&x).mul(&x);
        let outside = inside.add(&s.x(B::P(1, 1)).unwrap().mul(&x).mul(&x));
        for (f, want) in [(&inside, true), (&outside, false)] {
            assert_eq!(ideal.normal_form_rank_one(f).is_zero(), want);
            assert_eq!(ideal.linear_membership(f), Some(want));
            assert_eq!(ideal.localized_membership(f), Some(want));
            assert_eq!(ideal.sampled_vanishing(f), want);
        }
    }

    #[test]
    fn single_node_relations() {
        let rep = verify_poisson_relations(2, &[0, 2], &[Q::zero(), Q::zero()], 2).unwrap();
        assert!(rep.all_ok(), "{}", rep.to_text());
        assert_eq!(rep.count(Status::Fail), 0);
    }

    #[test]
    fn general_relations_small() {
        let rep = verify_poisson_relations(3, &[0, 1, 1], &vec![Q::zero(); 3], 2).unwrap();
        assert!(rep.all_ok(), "{}", rep.to_text());
        let rep = verify_poisson_relations(2, &[1, 1], &[q(1), q(0)], 1).unwrap();
        assert!(rep.all_ok(), "{}", rep.to_text());
    }

    #[test]
    fn invariance() {
        let rep = verify_generator_invariance(2, &[1, 2], 2).unwrap();
        assert!(rep.all_ok(), "{}", rep.to_text());
        let rep = verify_ideal_invariance(2, &[1, 2]).unwrap();
        assert_eq!(rep.count(Status::Pass), rep.entries.len(), "{}", rep.to_text());
        let rep = verify_ideal_invariance(3, &[0, 1, 0]).unwrap();
        assert_eq!(rep.entries.len(), 1);
    }

    #[test]
    fn examples() {
        let rep = examples_check();
        let status: Vec<Status> = rep.entries.iter().map(|e| e.status).collect();
        assert_eq!(status, vec![Status::Pass, Status::Fail, Status::Fail, Status::Pass]);
    }

    #[test]
    fn etale_single_node() {
        let rep = etale_bracket_check::<Q>(2, &[vec![], vec![q(1), q(2)]], &[vec![], vec![q(3), q(5)]], &[
            vec![],
            vec![q(2), q(7)],
        ])
        .unwrap();
        assert!(rep.all_ok(), "{}", rep.to_text());
        // Across adjacent nodes the displayed coefficient has the wrong sign;
        // the c_kl form holds.
        let rep = etale_sampled::<Q>(3, &[0, 1, 1], 3, 1).unwrap();
        for e in &rep.entries {
            let want = if e.relation.starts_with("{y_{k,i},y_{l,j}}=(2delta") { Status::Fail } else { Status::Pass };
            assert_eq!(e.status, want, "{}", rep.to_text());
        }
        let rep = etale_sampled::<f64>(2, &[0, 3], 2, 2).unwrap();
        assert!(rep.all_ok(), "{}", rep.to_text());
    }

    #[test]
    fn spectral_pair_cases() {
        for d in 1..=3 {
            let sp = spectral_pair_generic(d).unwrap();
            assert!(sp.expansion_matches(), "d = {d}");
        }
        let v = MultiPoly::with_vars(&["x1", "x2", "b0", "b1"]);
        let x = |s| MultiPoly::var_named(&v, s).unwrap();
        let a = vec![x("x1").add(&x("x2")), x("x1").pow(2).add(&x("x2").pow(2))];
        let sp = spectral_pair(&a, &[x("b0"), x("b1")]).unwrap();
        assert_eq!(sp.e[0], x("x1").add(&x("x2")).neg());
        assert_eq!(sp.f[1], x("b1").add(&sp.e[0].mul(&x("b0"))));
        let z = MultiPoly::zero(&v);
        let sp = spectral_pair(&a, &[z.clone(), z.clone()]).unwrap();
        assert!(sp.f.iter().all(|f| f.is_zero()));
    }
}
