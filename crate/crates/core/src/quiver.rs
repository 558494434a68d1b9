//! Chainsaw and handsaw quiver representations as explicit matrices: moment
//! map, cokernel of its differential, stability and costability, walls and
//! slopes, special modules, the collapse to a single node, strata types and
//! the partition dimension bound.

use std::collections::BTreeSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::linalg::{self, Mat};
use crate::poisson::solve_sylvester;
use crate::scalar::{Field, Fp, Q};
use crate::{par, Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Variant {
    /// Edges l -> l+1 for every l mod n.
    Cyclic,
    /// No edge from the last node back to the first.
    Open,
}

/// `A_l: V_l -> V_l`, `B_l: V_l -> V_{l+1}`, `p_l` a column of length d_l and
/// `q_l` a row of length d_l. Matrices are row-major, `m[row][col]`.
#[derive(Clone, Debug, PartialEq)]
pub struct ChainsawRep<F: Field> {
    pub n: usize,
    pub d: Vec<usize>,
    pub variant: Variant,
    pub a: Vec<Mat<F>>,
    /// One per edge: n for cyclic, n-1 for open.
    pub b: Vec<Mat<F>>,
    pub p: Vec<Vec<F>>,
    pub q: Vec<Vec<F>>,
}

fn shaped<F: Field>(m: &Mat<F>, r: usize, c: usize) -> bool {
    m.len() == r && m.iter().all(|row| row.len() == c)
}

/// Shape-aware product; tolerates zero-sized factors.
fn mul<F: Field>(a: &Mat<F>, b: &Mat<F>, rows: usize, inner: usize, cols: usize) -> Mat<F> {
    let mut out: Mat<F> = linalg::zeros(rows, cols);
    for i in 0..rows {
        for k in 0..inner {
            if a[i][k].is_zero() {
                continue;
            }
            for j in 0..cols {
                out[i][j] = out[i][j].add(&a[i][k].mul(&b[k][j]));
            }
        }
    }
    out
}

fn apply<F: Field>(m: &Mat<F>, v: &[F]) -> Vec<F> {
    m.iter()
        .map(|row| row.iter().zip(v).fold(F::zero(), |acc, (x, y)| acc.add(&x.mul(y))))
        .collect()
}

fn transpose<F: Field>(m: &Mat<F>, rows: usize, cols: usize) -> Mat<F> {
    (0..cols).map(|j| (0..rows).map(|i| m[i][j].clone()).collect()).collect()
}

impl<F: Field> ChainsawRep<F> {
    pub fn new(
        n: usize,
        d: Vec<usize>,
        variant: Variant,
        a: Vec<Mat<F>>,
        b: Vec<Mat<F>>,
        p: Vec<Vec<F>>,
        q: Vec<Vec<F>>,
    ) -> Result<Self> {
        let rep = ChainsawRep { n, d, variant, a, b, p, q };
        rep.validate()?;
        Ok(rep)
    }

    /// All data zero.
    pub fn zero(n: usize, d: &[usize], variant: Variant) -> Result<Self> {
        if d.len() != n || n == 0 {
            return Err(Error::Precondition(format!("dimension vector must have length n = {n} >= 1")));
        }
        let mut rep = ChainsawRep {
            n,
            d: d.to_vec(),
            variant,
            a: d.iter().map(|&k| linalg::zeros(k, k)).collect(),
            b: Vec::new(),
            p: d.iter().map(|&k| vec![F::zero(); k]).collect(),
            q: d.iter().map(|&k| vec![F::zero(); k]).collect(),
        };
        rep.b = rep.edges().iter().map(|&(s, t)| linalg::zeros(d[t], d[s])).collect();
        Ok(rep)
    }

    /// Edges `(source, target)`, indexed like `b`.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let m = match self.variant {
            Variant::Cyclic => self.n,
            Variant::Open => self.n.saturating_sub(1),
        };
        (0..m).map(|l| (l, (l + 1) % self.n)).collect()
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.n;
        if n == 0 || self.d.len() != n {
            return Err(Error::Inconsistent(format!("need n >= 1 and d of length n, got n = {n}")));
        }
        if self.a.len() != n || self.p.len() != n || self.q.len() != n {
            return Err(Error::Inconsistent("every node needs A, p and q".into()));
        }
        let edges = self.edges();
        if self.b.len() != edges.len() {
            return Err(Error::Inconsistent(format!("expected {} edge maps, got {}", edges.len(), self.b.len())));
        }
        for l in 0..n {
            let k = self.d[l];
            if !shaped(&self.a[l], k, k) || self.p[l].len() != k || self.q[l].len() != k {
                return Err(Error::Inconsistent(format!("shape mismatch at node {l}")));
            }
        }
        for (e, &(s, t)) in edges.iter().enumerate() {
            if !shaped(&self.b[e], self.d[t], self.d[s]) {
                return Err(Error::Inconsistent(format!("B_{e} must be {}x{}", self.d[t], self.d[s])));
            }
        }
        Ok(())
    }

    pub fn total_dim(&self) -> usize {
        self.d.iter().sum()
    }

    /// `A_{l+1}B_l - B_lA_l + p_{l+1}q_l`, one matrix per edge.
    pub fn moment_map(&self) -> Vec<Mat<F>> {
        self.edges()
            .iter()
            .enumerate()
            .map(|(e, &(s, t))| {
                let (ds, dt) = (self.d[s], self.d[t]);
                let ab = mul(&self.a[t], &self.b[e], dt, dt, ds);
                let ba = mul(&self.b[e], &self.a[s], dt, ds, ds);
                let mut r = linalg::mat_sub(&ab, &ba);
                for i in 0..dt {
                    for j in 0..ds {
                        r[i][j] = r[i][j].add(&self.p[t][i].mul(&self.q[s][j]));
                    }
                }
                r
            })
            .collect()
    }

    pub fn moment_vanishes(&self) -> bool {
        self.moment_map().iter().all(linalg::is_zero_mat)
    }

    /// Basis of solutions `(C_l)_l`, `C_l: V_l -> V_{l-1}`, of
    /// `C_lA_l = A_{l-1}C_l`, `B_{l-1}C_l = 0`, `C_{l+1}B_l = 0`, `q_{l-1}C_l = 0`, `C_lp_l = 0`.
    /// `C_l` is only an unknown when the edge `l-1 -> l` exists; otherwise it is zero.
    pub fn moment_cokernel(&self) -> Result<Vec<Vec<Mat<F>>>> {
        if !self.moment_vanishes() {
            return Err(Error::Precondition("the representation does not satisfy the moment equation".into()));
        }
        let edges = self.edges();
        let mut offset = Vec::with_capacity(edges.len());
        let mut cols = 0;
        for &(s, t) in &edges {
            offset.push(cols);
            cols += self.d[s] * self.d[t];
        }
        let mut rows: Mat<F> = Vec::new();
        for (e, &(s, t)) in edges.iter().enumerate() {
            let (ds, dt) = (self.d[s], self.d[t]);
            // K = C_t has shape ds x dt; unknown K[i][j] sits at column var(i, j).
            let var = |i: usize, j: usize| offset[e] + i * dt + j;
            let (at, as_, b) = (&self.a[t], &self.a[s], &self.b[e]);
            for i in 0..ds {
                for j in 0..dt {
                    let mut row = vec![F::zero(); cols];
                    for k in 0..dt {
                        row[var(i, k)] = row[var(i, k)].add(&at[k][j]);
                    }
                    for k in 0..ds {
                        row[var(k, j)] = row[var(k, j)].sub(&as_[i][k]);
                    }
                    rows.push(row);
                }
            }
            // B K = 0 (dt x dt)
            for i in 0..dt {
                for j in 0..dt {
                    let mut row = vec![F::zero(); cols];
                    for k in 0..ds {
                        row[var(k, j)] = row[var(k, j)].add(&b[i][k]);
                    }
                    rows.push(row);
                }
            }
            // K B = 0 (ds x ds)
            for i in 0..ds {
                for j in 0..ds {
                    let mut row = vec![F::zero(); cols];
                    for k in 0..dt {
                        row[var(i, k)] = row[var(i, k)].add(&b[k][j]);
                    }
                    rows.push(row);
                }
            }
            for j in 0..dt {
                let mut row = vec![F::zero(); cols];
                for k in 0..ds {
                    row[var(k, j)] = row[var(k, j)].add(&self.q[s][k]);
                }
                rows.push(row);
            }
            for i in 0..ds {
                let mut row = vec![F::zero(); cols];
                for k in 0..dt {
                    row[var(i, k)] = row[var(i, k)].add(&self.p[t][k]);
                }
                rows.push(row);
            }
        }
        let basis = if cols == 0 { Vec::new() } else { linalg::nullspace(&rows, cols) };
        Ok(basis
            .into_iter()
            .map(|v| {
                let mut cs: Vec<Mat<F>> =
                    (0..self.n).map(|l| linalg::zeros(self.d[(l + self.n - 1) % self.n], self.d[l])).collect();
                for (e, &(s, t)) in edges.iter().enumerate() {
                    let dt = self.d[t];
                    for i in 0..self.d[s] {
                        for j in 0..dt {
                            cs[t][i][j] = v[offset[e] + i * dt + j].clone();
                        }
                    }
                }
                cs
            })
            .collect())
    }

    /// Smallest graded subspace containing every im p_l and invariant under A, B.
    pub fn stable_closure(&self) -> Vec<Mat<F>> {
        let gens: Vec<Mat<F>> = self.p.iter().map(|v| vec![v.clone()]).collect();
        let mut maps: Vec<(usize, usize, Mat<F>)> = (0..self.n).map(|l| (l, l, self.a[l].clone())).collect();
        for (e, &(s, t)) in self.edges().iter().enumerate() {
            maps.push((s, t, self.b[e].clone()));
        }
        closure(&self.d, gens, &maps)
    }

    /// Smallest graded subspace of the dual containing every q_l and invariant
    /// under the transposes; its annihilator is the largest invariant subspace in ker q.
    pub fn costable_closure(&self) -> Vec<Mat<F>> {
        let gens: Vec<Mat<F>> = self.q.iter().map(|v| vec![v.clone()]).collect();
        let mut maps: Vec<(usize, usize, Mat<F>)> =
            (0..self.n).map(|l| (l, l, transpose(&self.a[l], self.d[l], self.d[l]))).collect();
        for (e, &(s, t)) in self.edges().iter().enumerate() {
            maps.push((t, s, transpose(&self.b[e], self.d[t], self.d[s])));
        }
        closure(&self.d, gens, &maps)
    }

    /// `(stable, costable)` by iterated Krylov closures.
    pub fn stable_costable(&self) -> (bool, bool) {
        let full = |c: &[Mat<F>]| c.iter().zip(&self.d).all(|(b, &k)| b.len() == k);
        (full(&self.stable_closure()), full(&self.costable_closure()))
    }

    fn is_invariant(&self, sub: &[Mat<F>]) -> bool {
        let edges = self.edges();
        for l in 0..self.n {
            if sub[l].iter().any(|v| !in_span(&sub[l], &apply(&self.a[l], v), self.d[l])) {
                return false;
            }
        }
        for (e, &(s, t)) in edges.iter().enumerate() {
            if sub[s].iter().any(|v| !in_span(&sub[t], &apply(&self.b[e], v), self.d[t])) {
                return false;
            }
        }
        true
    }

    fn contains_im_p(&self, sub: &[Mat<F>]) -> bool {
        (0..self.n).all(|l| in_span(&sub[l], &self.p[l], self.d[l]))
    }

    fn inside_ker_q(&self, sub: &[Mat<F>]) -> bool {
        (0..self.n).all(|l| sub[l].iter().all(|v| dot(&self.q[l], v).is_zero()))
    }

    /// Stability and costability from an explicit list of all graded subspaces.
    fn stable_costable_by_search(&self, subspaces: &[Vec<Mat<F>>]) -> (bool, bool) {
        let dims: usize = self.total_dim();
        let mut stable = true;
        let mut costable = true;
        for sub in subspaces {
            if !self.is_invariant(sub) {
                continue;
            }
            let k: usize = sub.iter().map(|b| b.len()).sum();
            if k < dims && self.contains_im_p(sub) {
                stable = false;
            }
            if k > 0 && self.inside_ker_q(sub) {
                costable = false;
            }
        }
        (stable, costable)
    }

    /// Slope comparison over an explicit list of graded subspaces.
    /// Sub-objects are `(V', 0)` with `V'` invariant in ker q, and `(V', W_inf)` with `V'` invariant
    /// containing im p. The full module has slope 0.
    fn zeta_stability_by_search(&self, zeta: &[Q], subspaces: &[Vec<Mat<F>>]) -> Stability {
        let zinf = -pairing(zeta, &self.d);
        let total = self.total_dim();
        let mut worst = Stability::Stable;
        for sub in subspaces {
            if !self.is_invariant(sub) {
                continue;
            }
            let dims: Vec<usize> = sub.iter().map(|b| b.len()).collect();
            let k: usize = dims.iter().sum();
            let base = pairing(zeta, &dims);
            let mut numerators = Vec::new();
            if k > 0 && self.inside_ker_q(sub) {
                numerators.push(base.clone());
            }
            if k < total && self.contains_im_p(sub) {
                numerators.push(&base + &zinf);
            }
            for num in numerators {
                if num.is_negative() {
                    continue;
                }
                if num.is_zero() {
                    worst = worst.min(Stability::StrictlySemistable);
                } else {
                    return Stability::Unstable;
                }
            }
        }
        worst
    }
}

fn dot<F: Field>(a: &[F], b: &[F]) -> F {
    a.iter().zip(b).fold(F::zero(), |acc, (x, y)| acc.add(&x.mul(y)))
}

fn pairing(zeta: &[Q], d: &[usize]) -> Q {
    zeta.iter().zip(d).map(|(z, &k)| z * &Q::from(k)).sum()
}

/// Reduced echelon basis of the span of `vs`.
fn echelon<F: Field>(vs: Mat<F>, dim: usize) -> Mat<F> {
    if dim == 0 {
        return Vec::new();
    }
    let mut m = vs;
    let r = linalg::rref(&mut m, dim).len();
    m.truncate(r);
    m
}

fn in_span<F: Field>(basis: &Mat<F>, v: &[F], dim: usize) -> bool {
    if v.iter().all(|x| x.is_zero()) {
        return true;
    }
    let mut m = basis.clone();
    m.push(v.to_vec());
    linalg::rank(&m, dim) == basis.len()
}

fn closure<F: Field>(d: &[usize], gens: Vec<Mat<F>>, maps: &[(usize, usize, Mat<F>)]) -> Vec<Mat<F>> {
    let mut span: Vec<Mat<F>> = gens.into_iter().zip(d).map(|(g, &k)| echelon(g, k)).collect();
    loop {
        let mut changed = false;
        for (s, t, m) in maps {
            for v in span[*s].clone() {
                let w = apply(m, &v);
                if !in_span(&span[*t], &w, d[*t]) {
                    let mut grown = span[*t].clone();
                    grown.push(w);
                    span[*t] = echelon(grown, d[*t]);
                    changed = true;
                }
            }
        }
        if !changed {
            return span;
        }
    }
}

/// Every subspace of F_p^k, as reduced echelon bases. Only for tiny k.
pub fn all_subspaces_fp<const P: u64>(k: usize) -> Vec<Mat<Fp<P>>> {
    let mut vectors: Vec<Vec<Fp<P>>> = vec![Vec::new()];
    for _ in 0..k {
        vectors = vectors
            .into_iter()
            .flat_map(|v| {
                (0..P).map(move |x| {
                    let mut w = v.clone();
                    w.push(Fp(x));
                    w
                })
            })
            .collect();
    }
    vectors.retain(|v| v.iter().any(|x| x.0 != 0));
    let mut seen: BTreeSet<Vec<Vec<u64>>> = BTreeSet::new();
    let mut out = Vec::new();
    let mut frontier: Vec<Mat<Fp<P>>> = vec![Vec::new()];
    seen.insert(Vec::new());
    out.push(Vec::new());
    // grow subspaces one vector at a time
    while !frontier.is_empty() {
        let mut next = Vec::new();
        for sub in &frontier {
            for v in &vectors {
                if in_span(sub, v, k) {
                    continue;
                }
                let mut g = sub.clone();
                g.push(v.clone());
                let e = echelon(g, k);
                let key: Vec<Vec<u64>> = e.iter().map(|r| r.iter().map(|x| x.0).collect()).collect();
                if seen.insert(key) {
                    out.push(e.clone());
                    next.push(e);
                }
            }
        }
        frontier = next;
    }
    out
}

fn graded_products<F: Field>(per_node: &[Vec<Mat<F>>]) -> Vec<Vec<Mat<F>>> {
    let mut acc: Vec<Vec<Mat<F>>> = vec![Vec::new()];
    for opts in per_node {
        acc = acc
            .into_iter()
            .flat_map(|prefix| {
                opts.iter().map(move |o| {
                    let mut p = prefix.clone();
                    p.push(o.clone());
                    p
                })
            })
            .collect();
    }
    acc
}

/// Largest total dimension for exhaustive subspace search over a finite field.
pub const BRUTE_FORCE_MAX_DIM: usize = 4;

impl<const P: u64> ChainsawRep<Fp<P>> {
    fn graded_subspaces(&self) -> Result<Vec<Vec<Mat<Fp<P>>>>> {
        if self.total_dim() > BRUTE_FORCE_MAX_DIM {
            return Err(Error::SizeLimit(format!("exhaustive search needs sum d <= {BRUTE_FORCE_MAX_DIM}")));
        }
        let per: Vec<Vec<Mat<Fp<P>>>> = self.d.iter().map(|&k| all_subspaces_fp::<P>(k)).collect();
        Ok(graded_products(&per))
    }

    /// `(stable, costable)` by enumerating every graded subspace.
    pub fn stable_costable_brute_force(&self) -> Result<(bool, bool)> {
        Ok(self.stable_costable_by_search(&self.graded_subspaces()?))
    }

    pub fn zeta_stability_brute_force(&self, zeta: &[Q]) -> Result<Stability> {
        check_zeta(zeta, self.n)?;
        Ok(self.zeta_stability_by_search(zeta, &self.graded_subspaces()?))
    }
}

impl ChainsawRep<Q> {
    /// Exact zeta-stability when every d_l <= 1, so graded subspaces are finite in number.
    pub fn zeta_stability(&self, zeta: &[Q]) -> Result<Stability> {
        check_zeta(zeta, self.n)?;
        if self.d.iter().any(|&k| k > 1) {
            return Err(Error::SizeLimit("exact zeta-stability over Q needs every d_l <= 1".into()));
        }
        let per: Vec<Vec<Mat<Q>>> = self
            .d
            .iter()
            .map(|&k| if k == 0 { vec![Vec::new()] } else { vec![Vec::new(), vec![vec![Q::one()]]] })
            .collect();
        Ok(self.zeta_stability_by_search(zeta, &graded_products(&per)))
    }

    /// The point n = 3, d = (0,1,1), A_1 = A_2 = p_1 = q_2 = 1, B_1 = p_2 = q_1 = 0:
    /// the moment vanishes but its differential is not surjective.
    pub fn singular_example() -> Self {
        let one = || vec![vec![Q::one()]];
        let zero = || vec![vec![Q::zero()]];
        ChainsawRep {
            n: 3,
            d: vec![0, 1, 1],
            variant: Variant::Cyclic,
            a: vec![Vec::new(), one(), one()],
            b: vec![vec![Vec::new()], zero(), Vec::new()],
            p: vec![Vec::new(), vec![Q::one()], vec![Q::zero()]],
            q: vec![Vec::new(), vec![Q::zero()], vec![Q::one()]],
        }
    }

    pub fn to_json(&self) -> ChainsawRepJson {
        ChainsawRepJson {
            n: self.n,
            d: self.d.clone(),
            field: "Q".into(),
            variant: self.variant,
            a: self.a.clone(),
            b: self.b.clone(),
            p: self.p.clone(),
            q: self.q.clone(),
        }
    }

    pub fn from_json(j: &ChainsawRepJson) -> Result<Self> {
        if j.field != "Q" {
            return Err(Error::Parse(format!("unsupported field tag {}", j.field)));
        }
        ChainsawRep::new(j.n, j.d.clone(), j.variant, j.a.clone(), j.b.clone(), j.p.clone(), j.q.clone())
    }

    /// Reduce every entry mod p (denominators must be units).
    pub fn reduce<const P: u64>(&self) -> ChainsawRep<Fp<P>> {
        let m = |x: &Mat<Q>| -> Mat<Fp<P>> { x.iter().map(|r| r.iter().map(Fp::<P>::from_q).collect()).collect() };
        let v = |x: &Vec<Q>| -> Vec<Fp<P>> { x.iter().map(Fp::<P>::from_q).collect() };
        ChainsawRep {
            n: self.n,
            d: self.d.clone(),
            variant: self.variant,
            a: self.a.iter().map(m).collect(),
            b: self.b.iter().map(m).collect(),
            p: self.p.iter().map(v).collect(),
            q: self.q.iter().map(v).collect(),
        }
    }
}

/// A point of the moment-zero locus whose loops have pairwise distinct eigenvalues
/// across all nodes: `A_l` conjugate to a random diagonal, B solved from the moment equation.
pub fn sample_moment_point(n: usize, d: &[usize], seed: u64) -> Result<ChainsawRep<Q>> {
    if d.len() != n || n == 0 {
        return Err(Error::Precondition(format!("dimension vector must have length n = {n} >= 1")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let total: usize = d.iter().sum();
    let mut eig: Vec<i64> = Vec::new();
    while eig.len() < total {
        let x = rng.gen_range(-20..=20);
        if !eig.contains(&x) {
            eig.push(x);
        }
    }
    let mut next = eig.into_iter();
    let mut a = Vec::with_capacity(n);
    for &k in d {
        let diag: Vec<i64> = next.by_ref().take(k).collect();
        let mut u: Mat<Q> = linalg::identity(k);
        for i in 0..k {
            for j in i + 1..k {
                u[i][j] = Q::int(rng.gen_range(-3..=3));
            }
        }
        let uinv = linalg::inverse(&u).expect("unipotent");
        let dm: Mat<Q> = (0..k)
            .map(|i| (0..k).map(|j| if i == j { Q::int(diag[i]) } else { Q::zero() }).collect())
            .collect();
        a.push(mul(&mul(&u, &dm, k, k, k), &uinv, k, k, k));
    }
    let vecs = |rng: &mut ChaCha8Rng| -> Vec<Vec<Q>> {
        d.iter().map(|&k| (0..k).map(|_| Q::int(rng.gen_range(-5..=5))).collect()).collect()
    };
    let p = vecs(&mut rng);
    let q = vecs(&mut rng);
    let mut rep = ChainsawRep::zero(n, d, Variant::Cyclic)?;
    rep.a = a;
    rep.p = p;
    rep.q = q;
    for (e, (s, t)) in rep.edges().into_iter().enumerate() {
        let (ds, dt) = (d[s], d[t]);
        // X(-A_s) + A_t X = -p_t q_s
        let neg_as: Mat<Q> = rep.a[s].iter().map(|r| r.iter().map(|x| -x).collect()).collect();
        let rhs: Mat<Q> = (0..dt).map(|i| (0..ds).map(|j| -(&rep.p[t][i] * &rep.q[s][j])).collect()).collect();
        rep.b[e] = solve_sylvester(&neg_as, &rep.a[t], &rhs)
            .ok_or_else(|| Error::SpectralClash(format!("spec(A_{s}) meets spec(A_{t})")))?;
    }
    Ok(rep)
}

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq)]
pub struct ChainsawRepJson {
    pub n: usize,
    pub d: Vec<usize>,
    pub field: String,
    pub variant: Variant,
    #[serde(rename = "A")]
    pub a: Vec<Mat<Q>>,
    #[serde(rename = "B")]
    pub b: Vec<Mat<Q>>,
    pub p: Vec<Vec<Q>>,
    pub q: Vec<Vec<Q>>,
}

// ---------------------------------------------------------------------------
// Stability parameters, walls and slopes

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Stability {
    Unstable,
    StrictlySemistable,
    Stable,
}

fn check_zeta(zeta: &[Q], n: usize) -> Result<()> {
    if zeta.len() != n {
        return Err(Error::Precondition(format!("zeta must have length n = {n}")));
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StabilityParam {
    pub zeta: Vec<Q>,
}

impl StabilityParam {
    pub fn new(zeta: Vec<Q>) -> Self {
        StabilityParam { zeta }
    }

    /// `-<zeta, d>`, recomputed on every call.
    pub fn zeta_inf(&self, d: &[usize]) -> Q {
        -pairing(&self.zeta, d)
    }

    /// `(<zeta, d'> + zeta_inf d_inf') / (|d'| + d_inf')`.
    pub fn slope(&self, d: &[usize], sub: &[usize], sub_inf: usize) -> Result<Q> {
        if d.len() != self.zeta.len() || sub.len() != self.zeta.len() {
            return Err(Error::Precondition("dimension vectors must match zeta".into()));
        }
        let den: usize = sub.iter().sum::<usize>() + sub_inf;
        if den == 0 {
            return Err(Error::Precondition("slope of the zero module".into()));
        }
        let num = pairing(&self.zeta, sub) + self.zeta_inf(d) * Q::from(sub_inf);
        Ok(num / Q::from(den))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WallMode {
    Finite,
    Affine,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Wall {
    /// Nodes start, start+1, ..., end (mod n).
    Interval { start: usize, end: usize },
    /// Sum of all coordinates.
    Total,
}

/// Walls containing zeta. Affine: every cyclic interval (the full cycle once) and H.
/// Finite: intervals inside 1..n-1; zeta_0 is ignored.
pub fn wall_membership(zeta: &StabilityParam, mode: WallMode) -> Vec<Wall> {
    let z = &zeta.zeta;
    let n = z.len();
    let mut out = Vec::new();
    match mode {
        WallMode::Affine => {
            for start in 0..n {
                for len in 1..n {
                    let s: Q = (0..len).map(|k| z[(start + k) % n].clone()).sum();
                    if s.is_zero() {
                        out.push(Wall::Interval { start, end: (start + len - 1) % n });
                    }
                }
            }
            let total: Q = z.iter().cloned().sum();
            if n > 0 && total.is_zero() {
                out.push(Wall::Interval { start: 0, end: n - 1 });
                out.push(Wall::Total);
            }
        }
        WallMode::Finite => {
            for start in 1..n {
                for end in start..n {
                    let s: Q = z[start..=end].iter().cloned().sum();
                    if s.is_zero() {
                        out.push(Wall::Interval { start, end });
                    }
                }
            }
        }
    }
    out
}

// ---------------------------------------------------------------------------
// Special modules (no framing, W_inf = 0)

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum SpecialModule {
    /// One-dimensional at node `node`, A = x.
    #[serde(rename = "L_l")]
    Point { node: usize, x: Q },
    /// One-dimensional at every node, A = x, product of the B equal to y != 0.
    #[serde(rename = "L")]
    Loop { x: Q, y: Q },
    /// Nilpotent uniserial module along nodes start, start+1, ..., start+len-1 (mod n).
    #[serde(rename = "Y")]
    Interval { start: usize, len: usize },
    /// Not computed.
    #[serde(rename = "P")]
    PCirc,
}

fn interval_dims(n: usize, start: usize, len: usize) -> Vec<usize> {
    let mut d = vec![0; n];
    for k in 0..len {
        d[(start + k) % n] += 1;
    }
    d
}

/// Stability of a special module against the slope-zero condition of the framed problem.
pub fn special_module_stability(zeta: &StabilityParam, module: &SpecialModule) -> Result<Stability> {
    let z = &zeta.zeta;
    let n = z.len();
    let verdict = |zero: bool| if zero { Stability::Stable } else { Stability::Unstable };
    match module {
        SpecialModule::Point { node, .. } => {
            if *node >= n {
                return Err(Error::IndexOutOfRange(format!("node {node} with n = {n}")));
            }
            Ok(verdict(z[*node].is_zero()))
        }
        SpecialModule::Loop { y, .. } => {
            if y.is_zero() {
                return Err(Error::Precondition("L(x,y) needs y != 0".into()));
            }
            Ok(verdict(z.iter().cloned().sum::<Q>().is_zero()))
        }
        SpecialModule::Interval { start, len } => interval_stability(z, *start, *len),
        SpecialModule::PCirc => Err(Error::Precondition("the P-circ class is not computed".into())),
    }
}

fn check_interval(n: usize, start: usize, len: usize) -> Result<()> {
    if start >= n || len == 0 {
        return Err(Error::IndexOutOfRange(format!("interval start {start}, length {len}, n = {n}")));
    }
    Ok(())
}

/// Closed-form reading: total sum zero, every proper prefix sum positive (stable) or
/// nonnegative with a zero (strictly semistable).
pub fn interval_stability(zeta: &[Q], start: usize, len: usize) -> Result<Stability> {
    let n = zeta.len();
    check_interval(n, start, len)?;
    let prefix = |m: usize| -> Q { (0..m).map(|k| zeta[(start + k) % n].clone()).sum() };
    if !prefix(len).is_zero() {
        return Ok(Stability::Unstable);
    }
    let mut out = Stability::Stable;
    for m in 1..len {
        let s = prefix(m);
        if s.is_negative() {
            return Ok(Stability::Unstable);
        }
        if s.is_zero() {
            out = Stability::StrictlySemistable;
        }
    }
    Ok(out)
}

/// The criterion exactly as printed: total sum zero and every prefix sum `>= 0`.
pub fn interval_criterion_as_printed(zeta: &[Q], start: usize, len: usize) -> Result<bool> {
    let n = zeta.len();
    check_interval(n, start, len)?;
    let prefix = |m: usize| -> Q { (0..m).map(|k| zeta[(start + k) % n].clone()).sum() };
    Ok(prefix(len).is_zero() && (1..len).all(|m| !prefix(m).is_negative()))
}

/// Builds the nilpotent module as matrices and compares slopes of all its
/// submodules, found by searching invariant subspaces spanned by basis vectors.
pub fn interval_stability_brute_force(zeta: &[Q], start: usize, len: usize) -> Result<Stability> {
    let n = zeta.len();
    check_interval(n, start, len)?;
    let dims = interval_dims(n, start, len);
    let slope = |dv: &[usize]| -> Q {
        let k: usize = dv.iter().sum();
        pairing(zeta, dv) / Q::from(k)
    };
    let whole = slope(&dims);
    if !whole.is_zero() {
        return Ok(Stability::Unstable);
    }
    // basis vector k sits at node start+k; B sends vector k to k+1, the last to 0.
    // A is zero. Enumerate coordinate subsets closed under k -> k+1.
    let mut out = Stability::Stable;
    for mask in 1u64..(1u64 << len) - 1 {
        let closed = (0..len - 1).all(|k| mask & (1 << k) == 0 || mask & (1 << (k + 1)) != 0);
        if !closed {
            continue;
        }
        let sub: Vec<usize> = {
            let mut d = vec![0; n];
            for k in 0..len {
                if mask & (1 << k) != 0 {
                    d[(start + k) % n] += 1;
                }
            }
            d
        };
        let s = slope(&sub);
        if s > whole {
            return Ok(Stability::Unstable);
        }
        if s == whole {
            out = Stability::StrictlySemistable;
        }
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Collapse to one node

/// Single-node data over `V' = V_0` and `W' = W_0 + ... + W_{n-1}`.
/// Column `i` of `p` and row `i` of `q` belong to the i-th framing summand.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SingleNode<F: Field> {
    pub a: Mat<F>,
    pub b: Mat<F>,
    /// d_0 x n.
    pub p: Mat<F>,
    /// n x d_0.
    pub q: Mat<F>,
}

impl<F: Field> SingleNode<F> {
    /// `[A, B] + p q`.
    pub fn moment(&self) -> Mat<F> {
        let k = self.a.len();
        let w = self.q.len();
        let ab = mul(&self.a, &self.b, k, k, k);
        let ba = mul(&self.b, &self.a, k, k, k);
        linalg::mat_add(&linalg::mat_sub(&ab, &ba), &mul(&self.p, &self.q, k, w, k))
    }
}

impl<F: Field> ChainsawRep<F> {
    /// `B' = B_{n-1}...B_0`, p-block i = `B_{n-1}...B_{i+1} p_{i+1}` (p_n = p_0, empty product),
    /// q-block i = `q_i B_{i-1}...B_0`.
    pub fn collapse_to_single_node(&self) -> Result<SingleNode<F>> {
        if self.variant != Variant::Cyclic {
            return Err(Error::Precondition("collapse needs the cyclic quiver".into()));
        }
        let n = self.n;
        let d = &self.d;
        let d0 = d[0];
        // chain(from, to): V_from -> V_to going forward, from <= to <= n (node n is node 0)
        let chain = |from: usize, to: usize| -> Mat<F> {
            let mut m: Mat<F> = linalg::identity(d[from % n]);
            for l in from..to {
                m = mul(&self.b[l], &m, d[(l + 1) % n], d[l], d[from % n]);
            }
            m
        };
        let bprime = chain(0, n);
        let mut p: Mat<F> = linalg::zeros(d0, n);
        let mut q: Mat<F> = linalg::zeros(n, d0);
        for i in 0..n {
            let src = i + 1;
            let col = apply(&chain(src, n), &self.p[src % n]);
            for r in 0..d0 {
                p[r][i] = col[r].clone();
            }
            let c = chain(0, i);
            let row: Vec<F> = (0..d0).map(|j| (0..d[i]).fold(F::zero(), |acc, k| acc.add(&self.q[i][k].mul(&c[k][j])))).collect();
            q[i] = row;
        }
        Ok(SingleNode { a: self.a[0].clone(), b: bprime, p, q })
    }
}

// ---------------------------------------------------------------------------
// Strata and the partition bound

/// Partitions of k in weakly decreasing order.
pub fn partitions(k: usize) -> Vec<Vec<usize>> {
    fn go(k: usize, max: usize, prefix: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if k == 0 {
            out.push(prefix.clone());
            return;
        }
        for part in (1..=k.min(max)).rev() {
            prefix.push(part);
            go(k - part, part, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    go(k, k, &mut Vec::new(), &mut out);
    out
}

pub fn dual_partition(p: &[usize]) -> Vec<usize> {
    let top = p.first().copied().unwrap_or(0);
    (1..=top).map(|i| p.iter().filter(|&&x| x >= i).count()).collect()
}

/// `R + sum L(x_i,y_i)^{m_i} + sum_l sum_j L_l(x_j)^{m_lj}` with `d_l = d'_l + sum m_i + sum_j m_lj`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StratumType {
    pub d_prime: Vec<usize>,
    /// Multiplicities of the L(x,y) summands.
    pub uniform: Vec<usize>,
    /// Multiplicities of the L_l(x) summands at each node.
    pub per_node: Vec<Vec<usize>>,
    /// Number of distinct (x, y) parameters.
    pub pairs: usize,
    /// Number of distinct points x at each node.
    pub points: Vec<usize>,
}

pub fn strata_enumerate(n: usize, d: &[usize]) -> Result<Vec<StratumType>> {
    if d.len() != n || n == 0 {
        return Err(Error::Precondition(format!("dimension vector must have length n = {n} >= 1")));
    }
    let tmax = *d.iter().min().unwrap();
    let mut out = Vec::new();
    for t in 0..=tmax {
        for uniform in partitions(t) {
            let rest: Vec<usize> = d.iter().map(|&k| k - t).collect();
            // every split rest_l = d'_l + (partition of the remainder)
            let mut choices: Vec<Vec<(usize, Vec<usize>)>> = vec![Vec::new()];
            for &r in &rest {
                let opts: Vec<(usize, Vec<usize>)> =
                    (0..=r).rev().flat_map(|dp| partitions(r - dp).into_iter().map(move |p| (dp, p))).collect();
                choices = choices
                    .into_iter()
                    .flat_map(|c| {
                        opts.iter().map(move |o| {
                            let mut c = c.clone();
                            c.push(o.clone());
                            c
                        })
                    })
                    .collect();
            }
            for c in choices {
                let (d_prime, per_node): (Vec<usize>, Vec<Vec<usize>>) = c.into_iter().unzip();
                out.push(StratumType {
                    points: per_node.iter().map(|p| p.len()).collect(),
                    pairs: uniform.len(),
                    uniform: uniform.clone(),
                    d_prime,
                    per_node,
                });
            }
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DimBound {
    pub partitions: Vec<Vec<usize>>,
    pub lhs: i64,
    pub rhs: i64,
    pub holds: bool,
}

/// `sum_l (d_l^2 - sum_i kappa_i^2) + sum_l sum_{i,j} min(p^l_i, p^{l+1}_j) + sum_l max(d_l, d_{l+1})`
/// against `sum_l (d_l^2 + d_l)`, where kappa is the dual of the partition p^l of d_l.
pub fn dimension_bound_check(d: &[usize], parts: &[Vec<usize>]) -> Result<DimBound> {
    let n = d.len();
    if parts.len() != n || n == 0 {
        return Err(Error::Precondition("need one partition per node".into()));
    }
    for (l, p) in parts.iter().enumerate() {
        if p.iter().sum::<usize>() != d[l] || p.contains(&0) || p.windows(2).any(|w| w[0] < w[1]) {
            return Err(Error::Precondition(format!("{p:?} is not a partition of d_{l} = {}", d[l])));
        }
    }
    let mut lhs: i64 = 0;
    for l in 0..n {
        let next = (l + 1) % n;
        let kappa = dual_partition(&parts[l]);
        lhs += (d[l] * d[l]) as i64 - kappa.iter().map(|&k| (k * k) as i64).sum::<i64>();
        for &x in &parts[l] {
            for &y in &parts[next] {
                lhs += x.min(y) as i64;
            }
        }
        lhs += d[l].max(d[next]) as i64;
    }
    let rhs: i64 = d.iter().map(|&k| (k * k + k) as i64).sum();
    Ok(DimBound { partitions: parts.to_vec(), lhs, rhs, holds: lhs <= rhs })
}

/// Every partition tuple for `d`, checked in parallel.
pub fn dimension_bound_batch(d: &[usize]) -> Result<Vec<DimBound>> {
    let mut tuples: Vec<Vec<Vec<usize>>> = vec![Vec::new()];
    for &k in d {
        let ps = partitions(k);
        tuples = tuples
            .into_iter()
            .flat_map(|t| {
                ps.iter().map(move |p| {
                    let mut t = t.clone();
                    t.push(p.clone());
                    t
                })
            })
            .collect();
    }
    par::map(&tuples, |t| dimension_bound_check(d, t)).into_iter().collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(v: &[i64]) -> Vec<Q> {
        v.iter().map(|&x| Q::int(x)).collect()
    }

    #[test]
    fn singular_example_facts() {
        let rep = ChainsawRep::singular_example();
        rep.validate().unwrap();
        assert!(rep.moment_vanishes());
        let ker = rep.moment_cokernel().unwrap();
        assert_eq!(ker.len(), 1);
        assert_eq!(ker[0][2], vec![vec![Q::one()]]);
        assert_eq!(rep.stable_costable(), (false, false));
        let zeta = StabilityParam::new(q(&[0, -1, 2]));
        assert!(wall_membership(&zeta, WallMode::Finite).is_empty());
        assert_eq!(rep.zeta_stability(&zeta.zeta).unwrap(), Stability::Stable);
    }

    #[test]
    fn single_node_unit() {
        let rep = ChainsawRep::new(
            1,
            vec![1],
            Variant::Cyclic,
            vec![vec![vec![Q::zero()]]],
            vec![vec![vec![Q::zero()]]],
            vec![q(&[1])],
            vec![q(&[1])],
        )
        .unwrap();
        assert_eq!(rep.stable_costable(), (true, true));
        let z = ChainsawRep::<Q>::zero(2, &[1, 1], Variant::Cyclic).unwrap();
        assert_eq!(z.stable_costable(), (false, false));
        assert!(z.moment_vanishes());
    }

    #[test]
    fn scalar_moment_formula() {
        let mut rep = ChainsawRep::<Q>::zero(2, &[1, 1], Variant::Cyclic).unwrap();
        rep.a = vec![vec![q(&[2])], vec![q(&[5])]];
        rep.b = vec![vec![q(&[3])], vec![q(&[7])]];
        rep.p = vec![q(&[11]), q(&[13])];
        rep.q = vec![q(&[17]), q(&[19])];
        let m = rep.moment_map();
        // B_l(A_{l+1} - A_l) + p_{l+1} q_l
        assert_eq!(m[0][0][0], Q::int(3 * (5 - 2) + 13 * 17));
        assert_eq!(m[1][0][0], Q::int(7 * (2 - 5) + 11 * 19));
    }

    #[test]
    fn sampled_points_are_smooth() {
        for seed in 0..5 {
            let rep = sample_moment_point(3, &[1, 2, 1], seed).unwrap();
            assert!(rep.moment_vanishes());
            assert!(rep.moment_cokernel().unwrap().is_empty());
        }
    }

    #[test]
    fn walls_and_slopes() {
        let z = StabilityParam::new(q(&[-1, 1]));
        let w = wall_membership(&z, WallMode::Affine);
        assert!(w.contains(&Wall::Total));
        assert!(w.contains(&Wall::Interval { start: 0, end: 1 }));
        assert!(wall_membership(&StabilityParam::new(q(&[1, -2])), WallMode::Affine).is_empty());
        let z = StabilityParam::new(q(&[1, -2, 4]));
        let d = [1, 2, 1];
        assert_eq!(z.slope(&d, &d, 1).unwrap(), Q::zero());
        assert_eq!(z.slope(&d, &[0, 1, 0], 0).unwrap(), Q::int(-2));
        assert_eq!(z.slope(&d, &[1, 0, 0], 1).unwrap(), (Q::int(1) - Q::int(1)) / Q::int(2));
        assert!(z.slope(&d, &[0, 0, 0], 0).is_err());
    }

    #[test]
    fn special_modules() {
        let z = StabilityParam::new(q(&[0, 1, -1]));
        let y = SpecialModule::Interval { start: 1, len: 2 };
        assert_eq!(special_module_stability(&z, &y).unwrap(), Stability::Stable);
        let z2 = StabilityParam::new(q(&[0, -1, 1]));
        assert_eq!(special_module_stability(&z2, &y).unwrap(), Stability::Unstable);
        let l = SpecialModule::Loop { x: Q::zero(), y: Q::int(3) };
        assert_eq!(special_module_stability(&StabilityParam::new(q(&[1, 0, 0])), &l).unwrap(), Stability::Unstable);
        assert_eq!(special_module_stability(&StabilityParam::new(q(&[1, -1, 0])), &l).unwrap(), Stability::Stable);
        assert!(special_module_stability(&z, &SpecialModule::Loop { x: Q::zero(), y: Q::zero() }).is_err());
        assert!(special_module_stability(&z, &SpecialModule::Interval { start: 3, len: 1 }).is_err());
        // strict reading of the prefix condition
        let flat = [Q::int(1), Q::int(-1), Q::int(1), Q::int(-1)];
        assert_eq!(interval_stability(&flat, 0, 4).unwrap(), Stability::StrictlySemistable);
        assert!(interval_criterion_as_printed(&flat, 0, 4).unwrap());
        assert_eq!(interval_stability_brute_force(&flat, 0, 4).unwrap(), Stability::StrictlySemistable);
    }

    #[test]
    fn collapse_examples() {
        let mut rep = ChainsawRep::<Q>::zero(2, &[1, 1], Variant::Cyclic).unwrap();
        rep.a = vec![vec![q(&[2])], vec![q(&[5])]];
        rep.b = vec![vec![q(&[3])], vec![q(&[7])]];
        rep.p = vec![q(&[11]), q(&[13])];
        rep.q = vec![q(&[17]), q(&[19])];
        let c = rep.collapse_to_single_node().unwrap();
        assert_eq!(c.b, vec![q(&[21])]);
        assert_eq!(c.p, vec![q(&[7 * 13, 11])]);
        assert_eq!(c.q, vec![q(&[17]), q(&[19 * 3])]);
        let mut z = ChainsawRep::<Q>::zero(3, &[1, 1, 1], Variant::Cyclic).unwrap();
        z.b = vec![vec![q(&[0])], vec![q(&[1])], vec![q(&[1])]];
        assert_eq!(z.collapse_to_single_node().unwrap().b, vec![q(&[0])]);
        let open = ChainsawRep::<Q>::zero(2, &[1, 1], Variant::Open).unwrap();
        assert!(open.collapse_to_single_node().is_err());
        for seed in 0..3 {
            let pt = sample_moment_point(3, &[2, 1, 1], seed).unwrap();
            assert!(linalg::is_zero_mat(&pt.collapse_to_single_node().unwrap().moment()));
        }
    }

    #[test]
    fn strata_counts() {
        assert_eq!(strata_enumerate(2, &[0, 2]).unwrap().len(), 4);
        let empty = strata_enumerate(2, &[0, 0]).unwrap();
        assert_eq!(empty.len(), 1);
        let aff = strata_enumerate(2, &[1, 1]).unwrap();
        assert!(aff.iter().any(|s| s.uniform == vec![1] && s.d_prime == vec![0, 0]));
        assert_eq!(aff.len(), 5);
    }

    #[test]
    fn partition_bound() {
        let b = dimension_bound_check(&[2, 2], &[vec![2], vec![2]]).unwrap();
        assert_eq!((b.lhs, b.rhs, b.holds), (12, 12, true));
        assert!(dimension_bound_check(&[2, 2], &[vec![1], vec![2]]).is_err());
        let z = dimension_bound_check(&[0, 3], &[vec![], vec![1, 1, 1]]).unwrap();
        assert!(z.holds);
        assert_eq!(partitions(4).len(), 5);
        assert_eq!(dual_partition(&[3, 1]), vec![2, 1, 1]);
    }

    #[test]
    fn fp_subspace_counts() {
        // Gaussian binomials over F_2: 1 + 7 + 7 + 1
        assert_eq!(all_subspaces_fp::<2>(3).len(), 16);
        assert_eq!(all_subspaces_fp::<3>(2).len(), 6);
        assert_eq!(all_subspaces_fp::<2>(0).len(), 1);
    }

    #[test]
    fn json_round_trip() {
        let rep = ChainsawRep::singular_example();
        let s = serde_json::to_string(&rep.to_json()).unwrap();
        let back = ChainsawRep::from_json(&serde_json::from_str(&s).unwrap()).unwrap();
        assert_eq!(back, rep);
    }
}
