//! Exact linear algebra over a `Field`: dense helpers for small matrices and an
//! incremental sparse echelon form for span-membership tests.

use std::collections::BTreeMap;

use crate::scalar::Field;

pub type Mat<F> = Vec<Vec<F>>;
pub type SparseVec<F> = BTreeMap<usize, F>;

pub fn zeros<F: Field>(r: usize, c: usize) -> Mat<F> {
    vec![vec![F::zero(); c]; r]
}

pub fn identity<F: Field>(n: usize) -> Mat<F> {
    let mut m = zeros(n, n);
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = F::one();
    }
    m
}

pub fn mat_mul<F: Field>(a: &Mat<F>, b: &Mat<F>, inner: usize) -> Mat<F> {
    let rows = a.len();
    let cols = b.first().map_or(0, |r| r.len());
    let mut out: Mat<F> = zeros(rows, cols);
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

pub fn mat_add<F: Field>(a: &Mat<F>, b: &Mat<F>) -> Mat<F> {
    a.iter().zip(b).map(|(r, s)| r.iter().zip(s).map(|(x, y)| x.add(y)).collect()).collect()
}

pub fn mat_sub<F: Field>(a: &Mat<F>, b: &Mat<F>) -> Mat<F> {
    a.iter().zip(b).map(|(r, s)| r.iter().zip(s).map(|(x, y)| x.sub(y)).collect()).collect()
}

pub fn is_zero_mat<F: Field>(a: &Mat<F>) -> bool {
    a.iter().all(|r| r.iter().all(|x| x.is_zero()))
}

/// Reduced row echelon form in place; returns pivot columns.
pub fn rref<F: Field>(m: &mut Mat<F>, cols: usize) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r >= m.len() {
            break;
        }
        let Some(p) = (r..m.len()).find(|&i| !m[i][c].is_zero()) else { continue };
        m.swap(r, p);
        let inv = m[r][c].inv();
        for x in m[r].iter_mut() {
            *x = x.mul(&inv);
        }
        for i in 0..m.len() {
            if i != r && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                for j in 0..cols {
                    let t = m[r][j].mul(&f);
                    m[i][j] = m[i][j].sub(&t);
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

pub fn rank<F: Field>(m: &Mat<F>, cols: usize) -> usize {
    let mut a = m.clone();
    rref(&mut a, cols).len()
}

/// Basis of {x : m x = 0}.
pub fn nullspace<F: Field>(m: &Mat<F>, cols: usize) -> Vec<Vec<F>> {
    let mut a = m.clone();
    let piv = rref(&mut a, cols);
    let free: Vec<usize> = (0..cols).filter(|c| !piv.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![F::zero(); cols];
            v[f] = F::one();
            for (row, &pc) in piv.iter().enumerate() {
                v[pc] = a[row][f].neg();
            }
            v
        })
        .collect()
}

/// Some solution of m x = b, if one exists.
pub fn solve<F: Field>(m: &Mat<F>, cols: usize, b: &[F]) -> Option<Vec<F>> {
    let mut aug: Mat<F> = m.iter().zip(b).map(|(r, x)| {
        let mut r = r.clone();
        r.push(x.clone());
        r
    }).collect();
    let piv = rref(&mut aug, cols + 1);
    if piv.contains(&cols) {
        return None;
    }
    let mut x = vec![F::zero(); cols];
    for (row, &pc) in piv.iter().enumerate() {
        x[pc] = aug[row][cols].clone();
    }
    Some(x)
}

pub fn det<F: Field>(m: &Mat<F>) -> F {
    let n = m.len();
    let mut a = m.clone();
    let mut d = F::one();
    for c in 0..n {
        let Some(p) = (c..n).find(|&i| !a[i][c].is_zero()) else { return F::zero() };
        if p != c {
            a.swap(p, c);
            d = d.neg();
        }
        d = d.mul(&a[c][c]);
        let inv = a[c][c].inv();
        for i in c + 1..n {
            if a[i][c].is_zero() {
                continue;
            }
            let f = a[i][c].mul(&inv);
            for j in c..n {
                let t = a[c][j].mul(&f);
                a[i][j] = a[i][j].sub(&t);
            }
        }
    }
    d
}

pub fn inverse<F: Field>(m: &Mat<F>) -> Option<Mat<F>> {
    let n = m.len();
    if n == 0 {
        return Some(Vec::new());
    }
    let mut aug: Mat<F> = m
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let mut r = r.clone();
            r.extend((0..n).map(|j| if i == j { F::one() } else { F::zero() }));
            r
        })
        .collect();
    let piv = rref(&mut aug, 2 * n);
    if piv.len() < n || piv[n - 1] != n - 1 {
        return None;
    }
    Some(aug.into_iter().map(|r| r[n..].to_vec()).collect())
}

/// Incremental echelon basis of a subspace, rows keyed by their pivot column.
///
/// Optionally tracks how each stored row is expressed through the inserted
/// generators so that membership can return a certificate.
#[derive(Clone, Debug)]
pub struct Echelon<F: Field> {
    rows: Vec<SparseVec<F>>,
    combos: Vec<SparseVec<F>>,
    pivots: BTreeMap<usize, usize>,
    track: bool,
    inserted: usize,
}

impl<F: Field> Echelon<F> {
    pub fn new(track: bool) -> Self {
        Echelon { rows: Vec::new(), combos: Vec::new(), pivots: BTreeMap::new(), track, inserted: 0 }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    fn axpy(v: &mut SparseVec<F>, a: &F, w: &SparseVec<F>) {
        for (c, x) in w {
            let t = a.mul(x);
            match v.get_mut(c) {
                Some(y) => {
                    *y = y.add(&t);
                    if y.is_zero() {
                        v.remove(c);
                    }
                }
                None => {
                    if !t.is_zero() {
                        v.insert(*c, t);
                    }
                }
            }
        }
    }

    /// Residual of `v` after eliminating stored pivots, and the combination used.
    pub fn reduce(&self, mut v: SparseVec<F>) -> (SparseVec<F>, SparseVec<F>) {
        let mut combo = SparseVec::new();
        let mut cursor = 0usize;
        loop {
            let hit = v.range(cursor..).find(|(c, _)| self.pivots.contains_key(c)).map(|(c, x)| (*c, x.clone()));
            let Some((c, x)) = hit else { break };
            let r = self.pivots[&c];
            let f = x.neg();
            Self::axpy(&mut v, &f, &self.rows[r]);
            if self.track {
                Self::axpy(&mut combo, &x, &self.combos[r]);
            }
            cursor = c + 1;
        }
        (v, combo)
    }

    /// Insert a generator; returns true if it enlarged the span.
    pub fn insert(&mut self, v: SparseVec<F>) -> bool {
        let id = self.inserted;
        self.inserted += 1;
        let (mut res, combo) = self.reduce(v);
        let Some((&lead, lv)) = res.iter().next() else { return false };
        let inv = lv.inv();
        for x in res.values_mut() {
            *x = x.mul(&inv);
        }
        if self.track {
            // res = v - combo_stuff, so res = gen_id - sum(...)
            let mut c = SparseVec::new();
            c.insert(id, F::one());
            Self::axpy(&mut c, &F::one().neg(), &combo);
            for x in c.values_mut() {
                *x = x.mul(&inv);
            }
            self.combos.push(c);
        }
        self.pivots.insert(lead, self.rows.len());
        self.rows.push(res);
        true
    }

    /// Whether `v` lies in the span; with tracking, the generator combination.
    pub fn contains(&self, v: &SparseVec<F>) -> (bool, Option<SparseVec<F>>) {
        let (res, combo) = self.reduce(v.clone());
        if res.is_empty() {
            (true, if self.track { Some(combo) } else { None })
        } else {
            (false, None)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Q;

    fn qm(rows: &[&[i64]]) -> Mat<Q> {
        rows.iter().map(|r| r.iter().map(|&x| Q::int(x)).collect()).collect()
    }

    #[test]
    fn nullspace_and_solve() {
        let m = qm(&[&[1, 2, 3], &[2, 4, 6]]);
        let ns = nullspace(&m, 3);
        assert_eq!(ns.len(), 2);
        for v in &ns {
            for row in &m {
                let s: Q = row.iter().zip(v).map(|(a, b)| a * b).sum();
                assert!(s.is_zero());
            }
        }
        assert!(solve(&m, 3, &[Q::int(1), Q::int(3)]).is_none());
        assert!(solve(&m, 3, &[Q::int(1), Q::int(2)]).is_some());
        assert_eq!(det(&qm(&[&[2, 1], &[7, 4]])), Q::int(1));
    }

    #[test]
    fn echelon_certificate() {
        let mut e = Echelon::<Q>::new(true);
        let v = |xs: &[(usize, i64)]| xs.iter().map(|&(c, x)| (c, Q::int(x))).collect::<SparseVec<Q>>();
        e.insert(v(&[(0, 1), (1, 1)]));
        e.insert(v(&[(1, 1), (2, 1)]));
        assert!(!e.insert(v(&[(0, 1), (2, -1)])));
        let target = v(&[(0, 2), (1, 3), (2, 1)]);
        let (ok, cert) = e.contains(&target);
        assert!(ok);
        let cert = cert.unwrap();
        assert_eq!(cert.get(&0), Some(&Q::int(2)));
        assert_eq!(cert.get(&1), Some(&Q::int(1)));
        assert!(!e.contains(&v(&[(0, 1)])).0);
    }
}
