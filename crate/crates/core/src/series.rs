//! Truncated Laurent series in u^{-1} with pessimistic truncation tracking.
//!
//! A series stores coefficients of u^top, u^{top-1}, ... and either a lowest
//! reliable exponent or the knowledge that it is exact (all omitted lower
//! coefficients vanish). Reading a coefficient below the reliable range is an
//! error, never a silent zero.

use serde::{Deserialize, Serialize};

use crate::ring::Ring;
use crate::scalar::{binomial, Q};
use crate::{Error, Result};

#[derive(Clone, Debug)]
pub struct TruncSeries<R> {
    top: i64,
    coeffs: Vec<R>,
    /// Lowest exponent whose coefficient is reliable; `None` means exact.
    low: Option<i64>,
    zero: R,
}

impl<R: Ring> TruncSeries<R> {
    /// Series with `order` reliable coefficients starting at `u^top`.
    pub fn new(top: i64, coeffs: Vec<R>, order: usize, zero: R) -> Self {
        assert!(order > 0, "truncation order must be positive");
        let mut s = TruncSeries { top, coeffs, low: Some(top - order as i64 + 1), zero };
        s.coeffs.truncate(order);
        s
    }

    /// Finite Laurent polynomial known exactly.
    pub fn exact(top: i64, coeffs: Vec<R>, zero: R) -> Self {
        TruncSeries { top, coeffs, low: None, zero }
    }

    pub fn constant(c: R) -> Self {
        let zero = c.zero_like();
        Self::exact(0, vec![c], zero)
    }

    pub fn zero_series(zero: R) -> Self {
        Self::exact(0, vec![], zero)
    }

    /// u^k times the unit of the ring.
    pub fn monomial(k: i64, unit: R) -> Self {
        let zero = unit.zero_like();
        Self::exact(k, vec![unit], zero)
    }

    pub fn top(&self) -> i64 {
        self.top
    }

    pub fn low(&self) -> Option<i64> {
        self.low
    }

    pub fn is_exact(&self) -> bool {
        self.low.is_none()
    }

    /// Number of reliable coefficients counted from `u^top`.
    pub fn order(&self) -> Option<usize> {
        self.low.map(|l| (self.top - l + 1).max(0) as usize)
    }

    pub fn zero_elem(&self) -> &R {
        &self.zero
    }

    /// Coefficient of u^e.
    pub fn coeff(&self, e: i64) -> Result<R> {
        if let Some(l) = self.low {
            if e < l {
                return Err(Error::Truncation { exponent: e, low: l });
            }
        }
        if e > self.top {
            return Ok(self.zero.clone());
        }
        let k = (self.top - e) as usize;
        Ok(self.coeffs.get(k).cloned().unwrap_or_else(|| self.zero.clone()))
    }

    fn coeff_unchecked(&self, e: i64) -> R {
        if e > self.top {
            return self.zero.clone();
        }
        let k = (self.top - e) as usize;
        self.coeffs.get(k).cloned().unwrap_or_else(|| self.zero.clone())
    }

    /// Lowest exponent carrying a stored (possibly zero) coefficient.
    fn stored_low(&self) -> i64 {
        self.top - self.coeffs.len() as i64 + 1
    }

    /// Lowest exponent that needs to be materialised.
    fn floor(&self) -> i64 {
        match self.low {
            Some(l) => l,
            None => self.stored_low(),
        }
    }

    /// Restrict to `order` reliable coefficients from the top.
    pub fn truncate(&self, order: usize) -> Self {
        let new_low = self.top - order as i64 + 1;
        let low = match self.low {
            Some(l) => l.max(new_low),
            None => new_low,
        };
        self.with_range(self.top, low)
    }

    fn with_range(&self, top: i64, low: i64) -> Self {
        let coeffs = (0..=(top - low).max(-1)).map(|k| self.coeff_unchecked(top - k)).collect();
        TruncSeries { top, coeffs, low: Some(low), zero: self.zero.clone() }
    }

    fn combine_low(a: Option<i64>, b: Option<i64>) -> Option<i64> {
        match (a, b) {
            (None, x) | (x, None) => x,
            (Some(x), Some(y)) => Some(x.max(y)),
        }
    }

    pub fn add(&self, o: &Self) -> Self {
        let top = self.top.max(o.top);
        let low = Self::combine_low(self.low, o.low);
        let bottom = low.unwrap_or_else(|| self.stored_low().min(o.stored_low()));
        let coeffs = (0..=(top - bottom).max(-1))
            .map(|k| self.coeff_unchecked(top - k).add(&o.coeff_unchecked(top - k)))
            .collect();
        TruncSeries { top, coeffs, low, zero: self.zero.clone() }
    }

    pub fn neg(&self) -> Self {
        TruncSeries {
            top: self.top,
            coeffs: self.coeffs.iter().map(|c| c.neg()).collect(),
            low: self.low,
            zero: self.zero.clone(),
        }
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    pub fn scale(&self, c: &Q) -> Self {
        TruncSeries {
            top: self.top,
            coeffs: self.coeffs.iter().map(|x| x.scale(c)).collect(),
            low: self.low,
            zero: self.zero.clone(),
        }
    }

    /// Multiply every coefficient on the left by `c`.
    pub fn left_mul(&self, c: &R) -> Self {
        TruncSeries {
            top: self.top,
            coeffs: self.coeffs.iter().map(|x| c.mul(x)).collect(),
            low: self.low,
            zero: self.zero.clone(),
        }
    }

    /// Multiply every coefficient on the right by `c`.
    pub fn right_mul(&self, c: &R) -> Self {
        TruncSeries {
            top: self.top,
            coeffs: self.coeffs.iter().map(|x| x.mul(c)).collect(),
            low: self.low,
            zero: self.zero.clone(),
        }
    }

    /// Product, preserving the order of coefficient factors.
    pub fn mul(&self, o: &Self) -> Self {
        let top = self.top + o.top;
        let low = match (self.low, o.low) {
            (None, None) => None,
            (Some(a), None) => Some(a + o.top),
            (None, Some(b)) => Some(b + self.top),
            (Some(a), Some(b)) => Some((a + o.top).max(b + self.top)),
        };
        let bottom = low.unwrap_or(self.stored_low() + o.stored_low());
        let n = (top - bottom + 1).max(0) as usize;
        let mut coeffs: Vec<R> = vec![self.zero.clone(); n];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.coeffs.iter().enumerate() {
                let k = i + j;
                if k >= n {
                    break;
                }
                if b.is_zero() {
                    continue;
                }
                coeffs[k] = coeffs[k].add(&a.mul(b));
            }
        }
        TruncSeries { top, coeffs, low, zero: self.zero.clone() }
    }

    /// Multiplicative inverse with at most `max_order` reliable coefficients.
    pub fn inv(&self, max_order: usize) -> Result<Self> {
        let order = match self.order() {
            Some(o) => o.min(max_order),
            None => max_order,
        };
        let lead = self.coeff_unchecked(self.top);
        let lead_inv = lead.try_inv().ok_or(Error::NotInvertible)?;
        let mut c: Vec<R> = Vec::with_capacity(order);
        for k in 0..order {
            if k == 0 {
                c.push(lead_inv.clone());
                continue;
            }
            let mut acc = self.zero.clone();
            for i in 1..=k {
                let a = self.coeff_unchecked(self.top - i as i64);
                if a.is_zero() {
                    continue;
                }
                acc = acc.add(&a.mul(&c[k - i]));
            }
            c.push(lead_inv.mul(&acc).neg());
        }
        Ok(TruncSeries::new(-self.top, c, order.max(1), self.zero.clone()))
    }

    /// Expansion of f(u + c) in u^{-1}, valid to the same reliable exponent.
    pub fn shift(&self, c: &Q) -> Result<Self> {
        if self.low.is_none() && self.stored_low() < 0 && !self.tail_is_zero_below(0) {
            return Err(Error::Precondition(
                "exact series with negative powers has an infinite shifted expansion; truncate first".into(),
            ));
        }
        let bottom = match self.low {
            Some(l) => l,
            None => self.stored_low().min(0),
        };
        let n = (self.top - bottom + 1).max(0) as usize;
        let mut coeffs = vec![self.zero.clone(); n];
        for (i, a) in self.coeffs.iter().enumerate() {
            let k = self.top - i as i64;
            if a.is_zero() {
                continue;
            }
            // (u + c)^k = sum_j C(k, j) c^j u^{k-j}
            let mut j = 0u32;
            loop {
                let e = k - j as i64;
                if e < bottom {
                    break;
                }
                if k >= 0 && j as i64 > k {
                    break;
                }
                let w = &binomial(k, j) * &c.pow(j);
                if !w.is_zero() {
                    let idx = (self.top - e) as usize;
                    coeffs[idx] = coeffs[idx].add(&a.scale(&w));
                }
                j += 1;
            }
        }
        Ok(TruncSeries { top: self.top, coeffs, low: self.low, zero: self.zero.clone() })
    }

    fn tail_is_zero_below(&self, e: i64) -> bool {
        self.coeffs.iter().enumerate().all(|(i, c)| self.top - (i as i64) >= e || c.is_zero())
    }

    /// Drop leading zero coefficients (keeps the reliable range unchanged).
    pub fn normalize_top(&self) -> Self {
        let mut s = self.clone();
        while !s.coeffs.is_empty() && s.coeffs[0].is_zero() && s.low.map_or(true, |l| s.top > l) {
            s.coeffs.remove(0);
            s.top -= 1;
        }
        s
    }

    /// Reliable coefficients from the top down, as (exponent, coefficient).
    pub fn reliable_terms(&self) -> Vec<(i64, R)> {
        let bottom = self.floor();
        (0..=(self.top - bottom).max(-1)).map(|k| (self.top - k, self.coeff_unchecked(self.top - k))).collect()
    }

    pub fn map<S: Ring>(&self, zero: S, f: impl Fn(&R) -> S) -> TruncSeries<S> {
        TruncSeries { top: self.top, coeffs: self.coeffs.iter().map(f).collect(), low: self.low, zero }
    }
}

impl<R: Ring> Ring for TruncSeries<R> {
    fn zero_like(&self) -> Self {
        TruncSeries::zero_series(self.zero.clone())
    }
    fn one_like(&self) -> Self {
        TruncSeries::constant(self.zero.one_like())
    }
    fn add(&self, o: &Self) -> Self {
        TruncSeries::add(self, o)
    }
    fn mul(&self, o: &Self) -> Self {
        TruncSeries::mul(self, o)
    }
    fn scale(&self, c: &Q) -> Self {
        TruncSeries::scale(self, c)
    }
    fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }
}

/// Serialized form: coefficient strings from `u^top` down, plus truncation order.
#[derive(Serialize, Deserialize, Debug, Clone, PartialEq)]
pub struct SeriesJson {
    pub top: i64,
    pub order: Option<usize>,
    pub coeffs: Vec<String>,
}

impl TruncSeries<Q> {
    pub fn to_json(&self) -> SeriesJson {
        SeriesJson {
            top: self.top,
            order: self.order(),
            coeffs: self.reliable_terms().into_iter().map(|(_, c)| c.to_string()).collect(),
        }
    }

    pub fn from_json(j: &SeriesJson) -> Result<Self> {
        let coeffs = j.coeffs.iter().map(|s| s.parse::<Q>()).collect::<Result<Vec<_>>>()?;
        Ok(match j.order {
            Some(o) => TruncSeries::new(j.top, coeffs, o, Q::zero()),
            None => TruncSeries::exact(j.top, coeffs, Q::zero()),
        })
    }

    pub fn scalar(top: i64, coeffs: &[i64], order: usize) -> Self {
        TruncSeries::new(top, coeffs.iter().map(|&c| Q::int(c)).collect(), order, Q::zero())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64) -> Q {
        Q::int(n)
    }

    #[test]
    fn geometric_shift() {
        let f = TruncSeries::new(-1, vec![q(1)], 6, Q::zero());
        let g = f.shift(&q(1)).unwrap();
        let got: Vec<Q> = (1..=6).map(|k| g.coeff(-k).unwrap()).collect();
        let expect: Vec<Q> = (1..=6).map(|k| if k % 2 == 1 { q(1) } else { q(-1) }).collect();
        assert_eq!(got, expect);
        assert!(g.coeff(-7).is_err());
    }

    #[test]
    fn polynomial_shift_is_exact() {
        let f = TruncSeries::exact(1, vec![q(1)], Q::zero());
        let g = f.shift(&Q::frac(1, 2)).unwrap();
        assert!(g.is_exact());
        assert_eq!(g.coeff(1).unwrap(), q(1));
        assert_eq!(g.coeff(0).unwrap(), Q::frac(1, 2));
        assert_eq!(g.coeff(-5).unwrap(), q(0));
    }

    #[test]
    fn inverse_and_truncation() {
        let f = TruncSeries::exact(0, vec![q(1), q(-1)], Q::zero());
        let g = f.inv(5).unwrap();
        for k in 0..5 {
            assert_eq!(g.coeff(-k).unwrap(), q(1));
        }
        let one = f.mul(&g);
        assert_eq!(one.coeff(0).unwrap(), q(1));
        for k in 1..5 {
            assert_eq!(one.coeff(-k).unwrap(), q(0));
        }
        assert!(one.coeff(-5).is_err());
    }
}
