//! Sparse multivariate polynomials over exact rationals.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use crate::ring::Ring;
use crate::scalar::{Field, Q};
use crate::{Error, Result};

pub type Exps = Vec<u32>;

/// Sparse polynomial: dense exponent vector per term, sparse term map.
#[derive(Clone, PartialEq, Eq)]
pub struct MultiPoly {
    vars: Arc<Vec<String>>,
    terms: BTreeMap<Exps, Q>,
}

impl MultiPoly {
    pub fn zero(vars: &Arc<Vec<String>>) -> Self {
        MultiPoly { vars: vars.clone(), terms: BTreeMap::new() }
    }

    pub fn with_vars(names: &[&str]) -> Arc<Vec<String>> {
        Arc::new(names.iter().map(|s| s.to_string()).collect())
    }

    pub fn constant(vars: &Arc<Vec<String>>, c: Q) -> Self {
        let mut p = Self::zero(vars);
        if !c.is_zero() {
            p.terms.insert(vec![0; vars.len()], c);
        }
        p
    }

    pub fn var(vars: &Arc<Vec<String>>, idx: usize) -> Self {
        let mut e = vec![0; vars.len()];
        e[idx] = 1;
        Self::monomial(vars, e, Q::one())
    }

    pub fn var_named(vars: &Arc<Vec<String>>, name: &str) -> Result<Self> {
        let idx = vars.iter().position(|v| v == name).ok_or_else(|| Error::UnknownVariable(name.into()))?;
        Ok(Self::var(vars, idx))
    }

    pub fn monomial(vars: &Arc<Vec<String>>, exps: Exps, c: Q) -> Self {
        debug_assert_eq!(exps.len(), vars.len());
        let mut p = Self::zero(vars);
        if !c.is_zero() {
            p.terms.insert(exps, c);
        }
        p
    }

    pub fn from_terms(vars: &Arc<Vec<String>>, terms: impl IntoIterator<Item = (Exps, Q)>) -> Self {
        let mut p = Self::zero(vars);
        for (e, c) in terms {
            p.add_term(e, c);
        }
        p
    }

    pub fn vars(&self) -> &Arc<Vec<String>> {
        &self.vars
    }

    pub fn nvars(&self) -> usize {
        self.vars.len()
    }

    pub fn terms(&self) -> &BTreeMap<Exps, Q> {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, e: Exps, c: Q) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(e) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let s = o.get() + &c;
                if s.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = s;
                }
            }
        }
    }

    pub fn coeff(&self, e: &[u32]) -> Q {
        self.terms.get(e).cloned().unwrap_or_default()
    }

    pub fn constant_term(&self) -> Q {
        self.coeff(&vec![0; self.nvars()])
    }

    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().map(|e| e.iter().sum()).max()
    }

    pub fn min_degree(&self) -> Option<u32> {
        self.terms.keys().map(|e| e.iter().sum()).min()
    }

    fn same_vars(&self, o: &Self) -> bool {
        Arc::ptr_eq(&self.vars, &o.vars) || self.vars == o.vars
    }

    /// Re-express both operands over the union of their variable lists.
    pub fn align(&self, o: &Self) -> (Self, Self) {
        if self.same_vars(o) {
            return (self.clone(), o.with_vars_of(self));
        }
        let mut names: Vec<String> = self.vars.as_ref().clone();
        for v in o.vars.iter() {
            if !names.contains(v) {
                names.push(v.clone());
            }
        }
        let names = Arc::new(names);
        (self.embed(&names), o.embed(&names))
    }

    fn with_vars_of(&self, o: &Self) -> Self {
        MultiPoly { vars: o.vars.clone(), terms: self.terms.clone() }
    }

    /// Embed into a larger variable list containing every current variable.
    pub fn embed(&self, names: &Arc<Vec<String>>) -> Self {
        let map: Vec<usize> =
            self.vars.iter().map(|v| names.iter().position(|w| w == v).expect("variable missing")).collect();
        let mut p = Self::zero(names);
        for (e, c) in &self.terms {
            let mut f = vec![0; names.len()];
            for (i, &k) in e.iter().enumerate() {
                f[map[i]] = k;
            }
            p.terms.insert(f, c.clone());
        }
        p
    }

    pub fn add(&self, o: &Self) -> Self {
        if !self.same_vars(o) {
            let (a, b) = self.align(o);
            return a.add(&b);
        }
        let (big, small) = if self.terms.len() >= o.terms.len() { (self, o) } else { (o, self) };
        let mut r = big.clone();
        for (e, c) in &small.terms {
            r.add_term(e.clone(), c.clone());
        }
        r.vars = self.vars.clone();
        r
    }

    pub fn add_assign(&mut self, o: &Self) {
        if !self.same_vars(o) {
            *self = MultiPoly::add(self, o);
            return;
        }
        for (e, c) in &o.terms {
            self.add_term(e.clone(), c.clone());
        }
    }

    /// self += c * o
    pub fn add_scaled(&mut self, o: &Self, c: &Q) {
        if c.is_zero() {
            return;
        }
        if !self.same_vars(o) {
            *self = MultiPoly::add(self, &o.scale(c));
            return;
        }
        for (e, d) in &o.terms {
            self.add_term(e.clone(), d * c);
        }
    }

    pub fn neg(&self) -> Self {
        MultiPoly { vars: self.vars.clone(), terms: self.terms.iter().map(|(e, c)| (e.clone(), -c)).collect() }
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    pub fn scale(&self, c: &Q) -> Self {
        if c.is_zero() {
            return Self::zero(&self.vars);
        }
        MultiPoly { vars: self.vars.clone(), terms: self.terms.iter().map(|(e, d)| (e.clone(), d * c)).collect() }
    }

    pub fn mul(&self, o: &Self) -> Self {
        if !self.same_vars(o) {
            let (a, b) = self.align(o);
            return a.mul(&b);
        }
        let mut acc: BTreeMap<Exps, Q> = BTreeMap::new();
        for (e1, c1) in &self.terms {
            for (e2, c2) in &o.terms {
                let e: Exps = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                let c = c1 * c2;
                match acc.entry(e) {
                    std::collections::btree_map::Entry::Vacant(v) => {
                        v.insert(c);
                    }
                    std::collections::btree_map::Entry::Occupied(mut oc) => {
                        *oc.get_mut() += &c;
                    }
                }
            }
        }
        acc.retain(|_, c| !c.is_zero());
        MultiPoly { vars: self.vars.clone(), terms: acc }
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut acc = Self::constant(&self.vars, Q::one());
        for _ in 0..k {
            acc = acc.mul(self);
        }
        acc
    }

    pub fn var_index(&self, name: &str) -> Result<usize> {
        self.vars.iter().position(|v| v == name).ok_or_else(|| Error::UnknownVariable(name.into()))
    }

    pub fn derivative(&self, name: &str) -> Result<Self> {
        Ok(self.derivative_idx(self.var_index(name)?))
    }

    pub fn derivative_idx(&self, i: usize) -> Self {
        let mut p = Self::zero(&self.vars);
        for (e, c) in &self.terms {
            if e[i] > 0 {
                let mut f = e.clone();
                f[i] -= 1;
                p.terms.insert(f, c * &Q::int(e[i] as i64));
            }
        }
        p
    }

    /// Indices of variables that actually occur.
    pub fn support_vars(&self) -> Vec<usize> {
        let mut used = vec![false; self.nvars()];
        for e in self.terms.keys() {
            for (i, &k) in e.iter().enumerate() {
                if k > 0 {
                    used[i] = true;
                }
            }
        }
        used.iter().enumerate().filter(|(_, &u)| u).map(|(i, _)| i).collect()
    }

    pub fn eval(&self, point: &[Q]) -> Q {
        assert_eq!(point.len(), self.nvars());
        let mut total = Q::zero();
        for (e, c) in &self.terms {
            let mut t = c.clone();
            for (i, &k) in e.iter().enumerate() {
                if k > 0 {
                    t = &t * &point[i].pow(k);
                }
            }
            total += &t;
        }
        total
    }

    /// Substitute polynomials (over a common variable list) for every variable.
    pub fn compose(&self, images: &[MultiPoly]) -> MultiPoly {
        assert_eq!(images.len(), self.nvars());
        let target = images.first().map(|p| p.vars.clone()).unwrap_or_else(|| self.vars.clone());
        let mut total = MultiPoly::zero(&target);
        for (e, c) in &self.terms {
            let mut t = MultiPoly::constant(&target, c.clone());
            for (i, &k) in e.iter().enumerate() {
                if k > 0 {
                    t = t.mul(&images[i].pow(k));
                }
            }
            total.add_assign(&t);
        }
        total
    }

    /// Substitute polynomials for some variables; the rest are kept. Terms are
    /// grouped by their substituted part so each image power is formed once.
    pub fn substitute(&self, images: &BTreeMap<usize, MultiPoly>) -> MultiPoly {
        if images.is_empty() {
            return self.clone();
        }
        let mut groups: BTreeMap<Vec<u32>, MultiPoly> = BTreeMap::new();
        for (e, c) in &self.terms {
            let key: Vec<u32> = images.keys().map(|&i| e[i]).collect();
            let mut kept = e.clone();
            for &i in images.keys() {
                kept[i] = 0;
            }
            groups.entry(key).or_insert_with(|| MultiPoly::zero(&self.vars)).add_term(kept, c.clone());
        }
        let mut pow_cache: BTreeMap<(usize, u32), MultiPoly> = BTreeMap::new();
        let mut total = MultiPoly::zero(&self.vars);
        for (key, mut part) in groups {
            for ((&i, img), &k) in images.iter().zip(&key) {
                if k == 0 {
                    continue;
                }
                let pw = pow_cache.entry((i, k)).or_insert_with(|| img.pow(k)).clone();
                part = part.mul(&pw);
            }
            total.add_assign(&part);
        }
        total
    }

    /// Evaluate in any field, mapping rational coefficients into it.
    pub fn eval_in<F: Field>(&self, point: &[F]) -> F {
        assert_eq!(point.len(), self.nvars());
        let mut total = F::zero();
        for (e, c) in &self.terms {
            let mut t = F::from_q(c);
            for (i, &k) in e.iter().enumerate() {
                for _ in 0..k {
                    t = t.mul(&point[i]);
                }
            }
            total = total.add(&t);
        }
        total
    }

    /// Split into homogeneous components under integer variable weights.
    pub fn graded_parts(&self, weights: &[i64]) -> BTreeMap<i64, MultiPoly> {
        let mut out: BTreeMap<i64, MultiPoly> = BTreeMap::new();
        for (e, c) in &self.terms {
            let w: i64 = e.iter().zip(weights).map(|(&k, &w)| k as i64 * w).sum();
            out.entry(w).or_insert_with(|| MultiPoly::zero(&self.vars)).add_term(e.clone(), c.clone());
        }
        out
    }

    pub fn map_coeffs(&self, f: impl Fn(&Q) -> Q) -> Self {
        MultiPoly::from_terms(&self.vars, self.terms.iter().map(|(e, c)| (e.clone(), f(c))))
    }
}

impl fmt::Display for MultiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (e, c) in self.terms.iter().rev() {
            let mono: Vec<String> = e
                .iter()
                .enumerate()
                .filter(|(_, &k)| k > 0)
                .map(|(i, &k)| if k == 1 { self.vars[i].clone() } else { format!("{}^{}", self.vars[i], k) })
                .collect();
            let (neg, mag) = if c.is_negative() { (true, -c) } else { (false, c.clone()) };
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { "-" } else { "+" })?;
            }
            first = false;
            if mono.is_empty() {
                write!(f, "{mag}")?;
            } else if mag.is_one() {
                write!(f, "{}", mono.join("*"))?;
            } else {
                write!(f, "{}*{}", mag, mono.join("*"))?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for MultiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl Ring for MultiPoly {
    fn zero_like(&self) -> Self {
        MultiPoly::zero(&self.vars)
    }
    fn one_like(&self) -> Self {
        MultiPoly::constant(&self.vars, Q::one())
    }
    fn add(&self, o: &Self) -> Self {
        MultiPoly::add(self, o)
    }
    fn mul(&self, o: &Self) -> Self {
        MultiPoly::mul(self, o)
    }
    fn scale(&self, c: &Q) -> Self {
        MultiPoly::scale(self, c)
    }
    fn is_zero(&self) -> bool {
        MultiPoly::is_zero(self)
    }
    fn neg(&self) -> Self {
        MultiPoly::neg(self)
    }
    fn try_inv(&self) -> Option<Self> {
        if self.terms.len() == 1 {
            let c = self.constant_term();
            if !c.is_zero() {
                return Some(MultiPoly::constant(&self.vars, c.recip()));
            }
        }
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn difference_of_squares() {
        let v = MultiPoly::with_vars(&["x", "y"]);
        let x = MultiPoly::var(&v, 0);
        let y = MultiPoly::var(&v, 1);
        let lhs = x.add(&y).mul(&x.sub(&y));
        let rhs = x.mul(&x).sub(&y.mul(&y));
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn derivative_and_unknown_var() {
        let v = MultiPoly::with_vars(&["x", "y"]);
        let x = MultiPoly::var(&v, 0);
        let y = MultiPoly::var(&v, 1);
        let f = x.mul(&x).mul(&y);
        assert_eq!(f.derivative("x").unwrap(), x.mul(&y).scale(&Q::int(2)));
        assert!(matches!(f.derivative("z"), Err(Error::UnknownVariable(_))));
    }

    #[test]
    fn auto_merge_variables() {
        let a = MultiPoly::var(&MultiPoly::with_vars(&["x"]), 0);
        let b = MultiPoly::var(&MultiPoly::with_vars(&["y"]), 0);
        let s = a.add(&b);
        assert_eq!(s.nvars(), 2);
        assert_eq!(s.to_string(), "x + y");
        assert_eq!(a.add(&MultiPoly::zero(a.vars())), a);
    }
}
