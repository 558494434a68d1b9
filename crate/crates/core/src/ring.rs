//! Coefficient rings for truncated series. Multiplication need not commute.

use crate::scalar::Q;

pub trait Ring: Clone + Send + Sync + std::fmt::Debug {
    fn zero_like(&self) -> Self;
    fn one_like(&self) -> Self;
    fn add(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn scale(&self, c: &Q) -> Self;
    fn is_zero(&self) -> bool;

    fn neg(&self) -> Self {
        self.scale(&-Q::one())
    }
    fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }
    fn scalar_like(&self, c: &Q) -> Self {
        self.one_like().scale(c)
    }
    /// Two-sided inverse when the element is a unit that we know how to invert.
    fn try_inv(&self) -> Option<Self> {
        None
    }
}

impl Ring for Q {
    fn zero_like(&self) -> Self {
        Q::zero()
    }
    fn one_like(&self) -> Self {
        Q::one()
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn scale(&self, c: &Q) -> Self {
        self * c
    }
    fn is_zero(&self) -> bool {
        Q::is_zero(self)
    }
    fn neg(&self) -> Self {
        -self
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn try_inv(&self) -> Option<Self> {
        if Q::is_zero(self) {
            None
        } else {
            Some(self.recip())
        }
    }
}
