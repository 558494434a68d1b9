//! Character of C[Z_d] by the Molien-Weyl constant term, graded by an extra
//! variable z counting polynomial degree, and the sl2 closed form.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::lie::TorusWeight;
use crate::par;
use crate::{Error, Result};

/// Exponents of z, t_0..t_{n-1}, u, v.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Monomial {
    pub z: u32,
    pub t: Vec<i32>,
    pub u: i32,
    pub v: i32,
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        let mut push = |name: String, e: i64| {
            if e == 1 {
                parts.push(name);
            } else if e != 0 {
                parts.push(format!("{name}^{e}"));
            }
        };
        push("z".into(), self.z as i64);
        for (l, &e) in self.t.iter().enumerate() {
            push(format!("t{l}"), e as i64);
        }
        push("u".into(), self.u as i64);
        push("v".into(), self.v as i64);
        if parts.is_empty() {
            write!(f, "1")
        } else {
            write!(f, "{}", parts.join("*"))
        }
    }
}

/// Truncated series in z, t, u, v; z-degree at most `max_degree`.
#[derive(Clone, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct CharacterSeries {
    pub n: usize,
    pub max_degree: usize,
    pub terms: BTreeMap<Monomial, i64>,
}

impl CharacterSeries {
    pub fn coeff(&self, m: &Monomial) -> i64 {
        self.terms.get(m).copied().unwrap_or(0)
    }

    pub fn constant_term(&self) -> i64 {
        self.coeff(&Monomial { z: 0, t: vec![0; self.n], u: 0, v: 0 })
    }

    /// Sum of coefficients at each z-degree.
    pub fn by_degree(&self) -> Vec<i64> {
        let mut out = vec![0; self.max_degree + 1];
        for (m, c) in &self.terms {
            out[m.z as usize] += c;
        }
        out
    }

    /// (z-degree, [t.., u, v]) -> coefficient.
    pub fn refined(&self) -> BTreeMap<(usize, Vec<i64>), i64> {
        self.terms
            .iter()
            .map(|(m, &c)| {
                let mut w: Vec<i64> = m.t.iter().map(|&x| x as i64).collect();
                w.push(m.u as i64);
                w.push(m.v as i64);
                ((m.z as usize, w), c)
            })
            .collect()
    }

    /// Drop z: the T-character through the truncation.
    pub fn forget_z(&self) -> BTreeMap<(Vec<i32>, i32, i32), i64> {
        let mut out = BTreeMap::new();
        for (m, &c) in &self.terms {
            *out.entry((m.t.clone(), m.u, m.v)).or_insert(0) += c;
        }
        out.retain(|_, c| *c != 0);
        out
    }

    pub fn all_nonnegative(&self) -> bool {
        self.terms.values().all(|&c| c >= 0)
    }

    /// JSON object {monomial: coefficient}.
    pub fn to_json(&self) -> serde_json::Value {
        let map: serde_json::Map<String, serde_json::Value> =
            self.terms.iter().map(|(m, c)| (m.to_string(), serde_json::Value::from(*c))).collect();
        serde_json::Value::Object(map)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("z");
        for l in 0..self.n {
            out.push_str(&format!(",t{l}"));
        }
        out.push_str(",u,v,coeff\n");
        for (m, c) in &self.terms {
            out.push_str(&m.z.to_string());
            for e in &m.t {
                out.push_str(&format!(",{e}"));
            }
            out.push_str(&format!(",{},{},{c}\n", m.u, m.v));
        }
        out
    }
}

/// One factor of S (an inverse factor (1 - z w)^{-1}) or of Lambda
/// (a factor (1 - z^2 w)).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Factor {
    pub label: String,
    pub weight: TorusWeight,
    pub z: u32,
    pub inverse: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WeightTables {
    pub s: Vec<Factor>,
    pub lambda: Vec<Factor>,
}

fn check_dims(n: usize, d: &[i64]) -> Result<Vec<usize>> {
    if n == 0 || d.len() != n {
        return Err(Error::Precondition(format!("need n >= 1 and {n} dimensions")));
    }
    d.iter()
        .enumerate()
        .map(|(l, &x)| if x < 0 { Err(Error::NegativeDimension(l)) } else { Ok(x as usize) })
        .collect()
}

/// Factor lists for the matrix entries of A, B, p, q and for the equations.
pub fn weight_tables(n: usize, d: &[i64]) -> Result<WeightTables> {
    let d = check_dims(n, d)?;
    let base = || TorusWeight::trivial(&d);
    let mut s = Vec::new();
    let mut lambda = Vec::new();
    for l in 0..n {
        for i in 0..d[l] {
            for j in 0..d[l] {
                let mut w = base();
                w.v = 1;
                w.st[l][i] += 1;
                w.st[l][j] -= 1;
                s.push(Factor { label: format!("A{l}({},{})", i + 1, j + 1), weight: w, z: 1, inverse: true });
            }
        }
    }
    for l in 0..n {
        let ln = (l + 1) % n;
        for i in 0..d[l] {
            for j in 0..d[ln] {
                let mut w = base();
                w.u = (l == 0) as i32;
                w.st[l][i] += 1;
                w.st[ln][j] -= 1;
                s.push(Factor { label: format!("B{l}({},{})", i + 1, j + 1), weight: w.clone(), z: 1, inverse: true });
                w.v += 1;
                lambda.push(Factor { label: format!("E{l}({},{})", i + 1, j + 1), weight: w, z: 2, inverse: false });
            }
        }
    }
    for l in 0..n {
        for i in 0..d[l] {
            let mut w = base();
            w.u = (l == 1 % n) as i32;
            w.v = 1;
            w.t[(l + n - 1) % n] += 1;
            w.st[l][i] -= 1;
            s.push(Factor { label: format!("p{l}({})", i + 1), weight: w, z: 1, inverse: true });
        }
    }
    for l in 0..n {
        for i in 0..d[l] {
            let mut w = base();
            w.t[l] -= 1;
            w.st[l][i] += 1;
            s.push(Factor { label: format!("q{l}({})", i + 1), weight: w, z: 1, inverse: true });
        }
    }
    Ok(WeightTables { s, lambda })
}

/// Flat exponent key: [z, t.., u, v, st..].
type Key = Vec<i32>;

fn flat(f: &Factor) -> Key {
    let mut k = vec![f.z as i32];
    k.extend(&f.weight.t);
    k.push(f.weight.u);
    k.push(f.weight.v);
    for row in &f.weight.st {
        k.extend(row);
    }
    k
}

fn add_key(a: &[i32], b: &[i32]) -> Key {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

fn bump(map: &mut HashMap<Key, i64>, k: Key, c: i64) -> Result<()> {
    let e = map.entry(k).or_insert(0);
    *e = e.checked_add(c).ok_or_else(|| Error::SizeLimit("character coefficient overflow".into()))?;
    Ok(())
}

/// Weyl denominator prod_{i != j} (1 - st_i / st_j) at one node, as a map
/// from exponent vectors to coefficients.
fn weyl_polynomial(dl: usize) -> HashMap<Vec<i32>, i64> {
    let mut poly: HashMap<Vec<i32>, i64> = HashMap::new();
    poly.insert(vec![0; dl], 1);
    for i in 0..dl {
        for j in 0..dl {
            if i == j {
                continue;
            }
            let mut next = HashMap::new();
            for (e, c) in &poly {
                *next.entry(e.clone()).or_insert(0) += c;
                let mut f = e.clone();
                f[i] += 1;
                f[j] -= 1;
                *next.entry(f).or_insert(0) -= c;
            }
            next.retain(|_, c| *c != 0);
            poly = next;
        }
    }
    poly
}

/// F_d through z-degree `max_degree`: S * Lambda expanded, then the
/// invariant part taken node by node with the Weyl measure.
pub fn molien_weyl_character(n: usize, d: &[i64], max_degree: usize) -> Result<CharacterSeries> {
    let tables = weight_tables(n, d)?;
    let du = check_dims(n, d)?;
    if tables.s.len() > 40 || max_degree > 12 {
        return Err(Error::SizeLimit("Molien-Weyl expansion limited to 40 letters and degree 12".into()));
    }
    let width = 1 + n + 2 + du.iter().sum::<usize>();
    let top = max_degree as i32;
    let mut series: HashMap<Key, i64> = HashMap::new();
    series.insert(vec![0; width], 1);
    for f in &tables.s {
        let step = flat(f);
        let mut next: HashMap<Key, i64> = HashMap::new();
        for (k, &c) in &series {
            let mut cur = k.clone();
            while cur[0] <= top {
                bump(&mut next, cur.clone(), c)?;
                cur = add_key(&cur, &step);
            }
        }
        series = next;
    }
    for f in &tables.lambda {
        let step = flat(f);
        let mut next = series.clone();
        for (k, &c) in &series {
            let m = add_key(k, &step);
            if m[0] <= top {
                bump(&mut next, m, -c)?;
            }
        }
        next.retain(|_, c| *c != 0);
        series = next;
    }
    // Weyl constant term, node by node; each pass removes that node's st
    // columns, so the next node starts at the same offset.
    let offset = 1 + n + 2;
    for &dl in &du {
        if dl == 0 {
            continue;
        }
        let weyl = weyl_polynomial(dl);
        let order: i64 = (1..=dl as i64).product();
        let mut by_deg: Vec<Vec<(Key, i64)>> = vec![Vec::new(); max_degree + 1];
        for (k, c) in series {
            by_deg[k[0] as usize].push((k, c));
        }
        let parts = par::map(&by_deg, |chunk| -> Result<HashMap<Key, i64>> {
            let mut out: HashMap<Key, i64> = HashMap::new();
            for (k, c) in chunk {
                let st: Vec<i32> = k[offset..offset + dl].iter().map(|x| -x).collect();
                if let Some(w) = weyl.get(&st) {
                    let mut key = k.clone();
                    key.drain(offset..offset + dl);
                    let v = c.checked_mul(*w).ok_or_else(|| Error::SizeLimit("character coefficient overflow".into()))?;
                    bump(&mut out, key, v)?;
                }
            }
            Ok(out)
        });
        series = HashMap::new();
        for p in parts {
            for (k, c) in p? {
                if c % order != 0 {
                    return Err(Error::Inconsistent(format!("Weyl average {c}/{order} is not integral")));
                }
                bump(&mut series, k, c / order)?;
            }
        }
        series.retain(|_, c| *c != 0);
    }
    Ok(to_series(n, max_degree, series))
}

fn to_series(n: usize, max_degree: usize, series: HashMap<Key, i64>) -> CharacterSeries {
    let terms = series
        .into_iter()
        .filter(|(_, c)| *c != 0)
        .map(|(k, c)| (Monomial { z: k[0] as u32, t: k[1..1 + n].to_vec(), u: k[1 + n], v: k[2 + n] }, c))
        .collect();
    CharacterSeries { n, max_degree, terms }
}

/// prod_{m=1}^{d} (1 - z^m v^m)^{-1} prod_{m=0}^{d-1} (1 - z^{m+2} w_p w_q v^m)^{-1}
/// for a single active node, with w_p w_q the weight of p q.
pub fn sl2_closed_form_oracle(n: usize, d: &[i64], max_degree: usize) -> Result<CharacterSeries> {
    let du = check_dims(n, d)?;
    let active: Vec<usize> = (0..n).filter(|&l| du[l] > 0).collect();
    if active.len() != 1 || n < 2 {
        return Err(Error::Precondition("the closed form needs exactly one active node and n >= 2".into()));
    }
    let l = active[0];
    let dl = du[l];
    let width = 1 + n + 2;
    let mut gens: Vec<Key> = Vec::new();
    for m in 1..=dl {
        let mut k = vec![0; width];
        k[0] = m as i32;
        k[n + 2] = m as i32;
        gens.push(k);
    }
    for m in 0..dl {
        let mut k = vec![0; width];
        k[0] = m as i32 + 2;
        k[1 + (l + n - 1) % n] += 1;
        k[1 + l] -= 1;
        k[n + 1] = (l == 1 % n) as i32;
        k[n + 2] = m as i32 + 1;
        gens.push(k);
    }
    let top = max_degree as i32;
    let mut series: HashMap<Key, i64> = HashMap::new();
    series.insert(vec![0; width], 1);
    for g in &gens {
        let mut next = HashMap::new();
        for (k, &c) in &series {
            let mut cur = k.clone();
            while cur[0] <= top {
                bump(&mut next, cur.clone(), c)?;
                cur = add_key(&cur, g);
            }
        }
        series = next;
    }
    Ok(to_series(n, max_degree, series))
}

/// Report comparing the Molien-Weyl coefficients with the PBW dimensions of
/// the quantized algebra, degree by degree and weight by weight.
pub fn pbw_comparison(n: usize, d: &[i64], max_degree: usize) -> Result<crate::report::Report> {
    use crate::report::{Report, Status};
    let mw = molien_weyl_character(n, d, max_degree)?;
    let mu = vec![crate::scalar::Q::zero(); n];
    let pbw = crate::uea::graded_character_y(n, d, &mu, max_degree)?;
    let mwr: BTreeMap<(usize, Vec<i64>), usize> =
        mw.refined().into_iter().filter(|(_, c)| *c != 0).map(|(k, c)| (k, c as usize)).collect();
    let mut rep = Report::new();
    for m in 0..=max_degree {
        let pick = |t: &BTreeMap<(usize, Vec<i64>), usize>| -> BTreeMap<Vec<i64>, usize> {
            t.iter().filter(|((k, _), _)| *k == m).map(|((_, w), c)| (w.clone(), *c)).collect()
        };
        let (a, b) = (pick(&mwr), pick(&pbw.refined));
        let ok = a == b;
        rep.push("PBW dimension = Molien-Weyl coefficient", format!("degree {m}"), if ok { Status::Pass } else { Status::Fail })
            .detail = Some(format!("total {} vs {}", b.values().sum::<usize>(), a.values().sum::<usize>()));
    }
    Ok(rep)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tables_sl2() {
        let t = weight_tables(2, &[0, 1]).unwrap();
        assert_eq!(t.s.len(), 3);
        assert!(t.lambda.is_empty());
        assert_eq!(t.s[0].weight.v, 1);
        assert_eq!(t.s[1].weight.u, 1);
        assert_eq!(t.s[1].weight.t, vec![1, 0]);
        assert_eq!(t.s[2].weight.t, vec![0, -1]);
        assert_eq!(weight_tables(3, &[1, 2, 2]).unwrap().lambda.len(), 2 + 4 + 2);
        let aff = weight_tables(2, &[1, 1]).unwrap();
        assert_eq!(aff.lambda.iter().map(|f| f.weight.u).collect::<Vec<_>>(), vec![1, 0]);
    }

    #[test]
    fn single_node_d1() {
        let f = molien_weyl_character(2, &[0, 1], 6).unwrap();
        assert_eq!(f.constant_term(), 1);
        assert_eq!(f, sl2_closed_form_oracle(2, &[0, 1], 6).unwrap());
        assert_eq!(f.by_degree(), vec![1, 1, 2, 2, 3, 3, 4]);
    }

    #[test]
    fn sl2_d2_coefficient() {
        let f = sl2_closed_form_oracle(2, &[0, 2], 4).unwrap();
        let v2 = f.coeff(&Monomial { z: 2, t: vec![0, 0], u: 0, v: 2 });
        assert_eq!(v2, 2);
        assert!(f.terms.keys().all(|m| m.u >= 0));
    }

    #[test]
    fn weyl_denominator() {
        let w = weyl_polynomial(2);
        assert_eq!(w.len(), 3);
        assert_eq!(w[&vec![0, 0]], 2);
        assert_eq!(w[&vec![1, -1]], -1);
    }
}
