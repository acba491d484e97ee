//! Sparse exact-rational chains.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::Zero;

use crate::complex::Simplex;
use crate::Rat;

/// A formal rational combination of simplices of one dimension.
///
/// Zero coefficients are never stored. The `-1`-dimensional zero chain is
/// the boundary of a vertex.
#[derive(Clone, PartialEq, Eq)]
pub struct Chain {
    dimension: i64,
    coeffs: BTreeMap<Simplex, Rat>,
}

impl Chain {
    pub fn zero(dimension: i64) -> Self {
        Self {
            dimension,
            coeffs: BTreeMap::new(),
        }
    }

    /// Single simplex with coefficient 1.
    pub fn unit(s: Simplex) -> Self {
        let mut c = Chain::zero(s.dimension() as i64);
        c.add_term(s, Rat::from_integer(1.into()));
        c
    }

    pub fn from_terms(dimension: i64, terms: impl IntoIterator<Item = (Simplex, Rat)>) -> Self {
        let mut c = Chain::zero(dimension);
        for (s, x) in terms {
            c.add_term(s, x);
        }
        c
    }

    pub fn dimension(&self) -> i64 {
        self.dimension
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn coeff(&self, s: &Simplex) -> Rat {
        self.coeffs.get(s).cloned().unwrap_or_else(Rat::zero)
    }

    pub fn support(&self) -> impl Iterator<Item = &Simplex> {
        self.coeffs.keys()
    }

    pub fn support_len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Simplex, &Rat)> {
        self.coeffs.iter()
    }

    /// Adds `x * s`, dropping the entry if the sum is zero.
    pub fn add_term(&mut self, s: Simplex, x: Rat) {
        debug_assert_eq!(s.dimension() as i64, self.dimension);
        if x.is_zero() {
            return;
        }
        let entry = self.coeffs.entry(s);
        match entry {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(x);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let sum = e.get().clone() + x;
                if sum.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = sum;
                }
            }
        }
    }

    pub fn add(&self, other: &Chain) -> Chain {
        debug_assert_eq!(self.dimension, other.dimension);
        let mut out = self.clone();
        for (s, x) in other.iter() {
            out.add_term(s.clone(), x.clone());
        }
        out
    }

    pub fn sub(&self, other: &Chain) -> Chain {
        self.add(&other.scale(&-Rat::from_integer(1.into())))
    }

    pub fn scale(&self, a: &Rat) -> Chain {
        if a.is_zero() {
            return Chain::zero(self.dimension);
        }
        Chain {
            dimension: self.dimension,
            coeffs: self
                .coeffs
                .iter()
                .map(|(s, x)| (s.clone(), x * a))
                .collect(),
        }
    }

    /// Inner product with another chain in the simplex basis.
    pub fn dot(&self, other: &Chain) -> Rat {
        let mut acc = Rat::zero();
        for (s, x) in self.iter() {
            if let Some(y) = other.coeffs.get(s) {
                acc += x * y;
            }
        }
        acc
    }

    /// Squared Euclidean norm.
    pub fn norm_sq(&self) -> Rat {
        self.coeffs.values().map(|x| x * x).sum()
    }

    /// Coefficient vector against an ordered simplex basis; simplices of the
    /// chain missing from the basis are reported as an error by the caller
    /// (they simply do not appear here).
    pub fn to_vector(&self, basis: &[Simplex]) -> Vec<Rat> {
        basis.iter().map(|s| self.coeff(s)).collect()
    }

    pub fn from_vector(basis: &[Simplex], v: &[Rat], dimension: i64) -> Chain {
        let mut c = Chain::zero(dimension);
        for (s, x) in basis.iter().zip(v) {
            c.add_term(s.clone(), x.clone());
        }
        c
    }
}

impl fmt::Debug for Chain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0");
        }
        for (i, (s, x)) in self.coeffs.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "{}*{:?}", x, s)?;
        }
        Ok(())
    }
}
