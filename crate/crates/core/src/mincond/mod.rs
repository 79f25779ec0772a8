//! Exact arithmetic in CMLs of the form `Q = D × C`, where
//! `D = Z(p₁^∞) ⊕ … ⊕ Z(p_r^∞)` is a finite direct sum of quasicyclic groups
//! and `C` is a finite commutative Moufang loop.
//!
//! These are exactly the CMLs with the minimum condition on subloops. `D`
//! is central, so products are computed componentwise: fractions add modulo
//! 1 in each summand and the finite parts multiply in `C`.

mod complement;
mod descriptor;
mod fraction;
mod series;
mod subloop;
mod truncate;

use std::collections::HashSet;
use std::fmt;

use serde::Serialize;

pub use complement::{complement_obstruction, divisible_complement, verify_complement, Complement, ComplementCheck};
pub use descriptor::{
    ElementDescriptor, FinitePartDescriptor, StructuredDescriptor, SubloopDescriptor,
};
pub use fraction::Fraction;
pub use series::{
    chain_stabilization_index, quasicyclic_factor_series, random_descending_chain,
    series_partitions, FactorKind, SeriesStep, MAX_CHAIN_LENGTH,
};
pub use subloop::{
    adjoin_root_chain, cogenerator_subloop, divisible_part, is_cogenerating, is_normal,
    normal_closure, promote, reduced_split, relevant_primes, s_generate, socle, CogenerationTrial,
    StructuredSubloop, COGENERATION_TRIALS, ROOT_DEPTH_CAP,
};
pub use truncate::{truncate, Truncation};

use crate::error::{Error, Result};
use crate::loops::CayleyLoop;
use crate::perm::Perm;
use crate::structure;

/// `D × C` with `D` given by the primes of its quasicyclic summands.
#[derive(Clone, Debug)]
pub struct StructuredCML {
    summands: Vec<u64>,
    finite: CayleyLoop,
    /// Distinct inner mappings `L(x,y)` of the finite part.
    inner: Vec<Perm>,
}

/// An element `(d, c)` of `D × C`; `div[i]` lies in the `i`-th summand.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct StructuredElement {
    pub div: Vec<Fraction>,
    pub fin: usize,
}

impl fmt::Debug for StructuredElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({:?}; {})", self.div, self.fin)
    }
}

/// 3-height of an element of a structured CML.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub enum Height {
    Finite(u32),
    Infinite,
}

pub(crate) fn is_prime(p: u64) -> bool {
    p >= 2 && (2..).take_while(|d| d * d <= p).all(|d| !p.is_multiple_of(d))
}

impl StructuredCML {
    /// Fails unless every summand is a prime and `finite` is a CML.
    pub fn new(summands: Vec<u64>, mut finite: CayleyLoop) -> Result<StructuredCML> {
        if let Some(&p) = summands.iter().find(|&&p| !is_prime(p)) {
            return Err(Error::InvalidParams(format!("summand {p} is not a prime")));
        }
        if !finite.is_certified_cml() && !finite.certify_cml() {
            return Err(Error::PreconditionViolated(
                "finite part is not a commutative Moufang loop".into(),
            ));
        }
        let n = finite.order();
        let mut seen = HashSet::new();
        let mut inner = Vec::new();
        for x in 0..n {
            for y in 0..n {
                let p = finite.inner_mapping(x, y);
                if !p.is_identity() && seen.insert(p.clone()) {
                    inner.push(p);
                }
            }
        }
        inner.sort();
        Ok(StructuredCML {
            summands,
            finite,
            inner,
        })
    }

    pub fn summands(&self) -> &[u64] {
        &self.summands
    }

    pub fn rank(&self) -> usize {
        self.summands.len()
    }

    pub fn finite_part(&self) -> &CayleyLoop {
        &self.finite
    }

    pub(crate) fn inner_mappings(&self) -> &[Perm] {
        &self.inner
    }

    pub fn identity(&self) -> StructuredElement {
        StructuredElement {
            div: vec![Fraction::ZERO; self.rank()],
            fin: self.finite.identity(),
        }
    }

    /// Validated element constructor.
    pub fn element(&self, div: Vec<Fraction>, fin: usize) -> Result<StructuredElement> {
        if div.len() != self.rank() {
            return Err(Error::InvalidParams(format!(
                "expected {} fractions, got {}",
                self.rank(),
                div.len()
            )));
        }
        for (i, (f, &p)) in div.iter().zip(&self.summands).enumerate() {
            if !f.lies_in(p) {
                return Err(Error::InvalidParams(format!(
                    "{f} is not in summand {i}: denominator is not a power of {p}"
                )));
            }
        }
        if fin >= self.finite.order() {
            return Err(Error::InvalidParams(format!("finite index {fin} out of range")));
        }
        Ok(StructuredElement { div, fin })
    }

    /// `(1/p_i^k)` in summand `i`, identity elsewhere.
    pub fn summand_generator(&self, i: usize, k: u32) -> StructuredElement {
        let mut a = self.identity();
        a.div[i] = Fraction::new(1, self.summands[i].pow(k));
        a
    }

    /// `(d, e)`.
    pub fn divisible_element(&self, div: Vec<Fraction>) -> StructuredElement {
        StructuredElement { div, fin: self.finite.identity() }
    }

    /// `(0, c)`.
    pub fn finite_element(&self, fin: usize) -> StructuredElement {
        StructuredElement {
            div: vec![Fraction::ZERO; self.rank()],
            fin,
        }
    }

    pub fn mul(&self, a: &StructuredElement, b: &StructuredElement) -> StructuredElement {
        StructuredElement {
            div: add_div(&a.div, &b.div),
            fin: self.finite.mul(a.fin, b.fin),
        }
    }

    pub fn inv(&self, a: &StructuredElement) -> StructuredElement {
        StructuredElement {
            div: a.div.iter().map(|&f| -f).collect(),
            fin: self.finite.inverse(a.fin),
        }
    }

    pub fn pow(&self, a: &StructuredElement, k: i64) -> StructuredElement {
        StructuredElement {
            div: a.div.iter().map(|f| f.times(k)).collect(),
            fin: self.finite.power(a.fin, k),
        }
    }

    /// lcm of the fraction denominators and the order of the finite part.
    pub fn order_of(&self, a: &StructuredElement) -> u64 {
        a.div
            .iter()
            .fold(self.finite.order_of(a.fin), |acc, f| num_integer::lcm(acc, f.order()))
    }

    pub fn associator(&self, a: &StructuredElement, b: &StructuredElement, c: &StructuredElement) -> StructuredElement {
        let left = self.mul(a, &self.mul(b, c));
        let right = self.mul(&self.mul(a, b), c);
        StructuredElement {
            div: add_div(&right.div, &neg_div(&left.div)),
            fin: self.finite.left_divide(left.fin, right.fin),
        }
    }

    /// `L(x,y)a`; inner mappings fix the central factor `D`.
    pub fn inner_apply(&self, x: &StructuredElement, y: &StructuredElement, a: &StructuredElement) -> StructuredElement {
        let c = &self.finite;
        StructuredElement {
            div: a.div.clone(),
            fin: c.inner_apply(x.fin, y.fin, c.mul(x.fin, y.fin), a.fin),
        }
    }
}

pub(crate) fn add_div(a: &[Fraction], b: &[Fraction]) -> Vec<Fraction> {
    a.iter().zip(b).map(|(&x, &y)| x + y).collect()
}

pub(crate) fn neg_div(a: &[Fraction]) -> Vec<Fraction> {
    a.iter().map(|&x| -x).collect()
}

/// `s_mul`.
pub fn s_mul(q: &StructuredCML, a: &StructuredElement, b: &StructuredElement) -> StructuredElement {
    q.mul(a, b)
}

pub fn s_inv(q: &StructuredCML, a: &StructuredElement) -> StructuredElement {
    q.inv(a)
}

pub fn s_pow(q: &StructuredCML, a: &StructuredElement, k: i64) -> StructuredElement {
    q.pow(a, k)
}

pub fn s_order(q: &StructuredCML, a: &StructuredElement) -> u64 {
    q.order_of(a)
}

/// 3-height of `a`.
///
/// Every summand of `D` is divisible, so `x^{3^n} = a` is solvable exactly
/// when it is solvable for the finite part in `C`. The images of the
/// cube map on `C` stabilize; `a` has infinite height iff its finite part
/// survives in the stable image, and otherwise the height is the last
/// level whose image contains it.
pub fn height3(q: &StructuredCML, a: &StructuredElement) -> Height {
    let h = structure::height(q.finite_part(), a.fin, 3);
    if h.saturating {
        Height::Infinite
    } else {
        Height::Finite(h.height)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;

    fn prufer3() -> StructuredCML {
        StructuredCML::new(vec![3], catalog::cyclic(1).unwrap()).unwrap()
    }

    fn f(a: i128, b: u64) -> Fraction {
        Fraction::new(a, b)
    }

    #[test]
    fn componentwise_products() {
        let q = prufer3();
        let a = q.element(vec![f(1, 3)], 0).unwrap();
        assert_eq!(q.mul(&a, &a).div, vec![f(2, 3)]);
        let b = q.element(vec![f(1, 9)], 0).unwrap();
        assert_eq!(q.pow(&b, 9), q.identity());
        assert_eq!(q.order_of(&q.summand_generator(0, 3)), 27);
        assert_eq!(q.mul(&b, &q.inv(&b)), q.identity());
    }

    #[test]
    fn element_validation() {
        let q = prufer3();
        assert!(q.element(vec![f(1, 5)], 0).is_err());
        assert!(q.element(vec![], 0).is_err());
        assert!(q.element(vec![f(1, 3)], 1).is_err());
        assert!(StructuredCML::new(vec![4], catalog::cyclic(1).unwrap()).is_err());
        assert!(matches!(
            StructuredCML::new(vec![3], catalog::loop5()),
            Err(Error::PreconditionViolated(_))
        ));
    }

    #[test]
    fn heights() {
        let q = prufer3();
        for k in 1..5 {
            assert_eq!(height3(&q, &q.summand_generator(0, k)), Height::Infinite);
        }
        assert_eq!(height3(&q, &q.identity()), Height::Infinite);

        // no 3-summand: heights come from C = Z9
        let q = StructuredCML::new(vec![5], catalog::cyclic(9).unwrap()).unwrap();
        assert_eq!(height3(&q, &q.finite_element(1)), Height::Finite(0));
        assert_eq!(height3(&q, &q.finite_element(3)), Height::Finite(1));
        assert_eq!(height3(&q, &q.identity()), Height::Infinite);
        let mut a = q.finite_element(3);
        a.div[0] = f(1, 25);
        assert_eq!(height3(&q, &a), Height::Finite(1));
    }

    #[test]
    fn associators_ignore_the_divisible_part() {
        let q = StructuredCML::new(vec![3, 5], catalog::cml81()).unwrap();
        let c = q.finite_part();
        let x = q.element(vec![f(1, 9), f(2, 5)], 5).unwrap();
        let y = q.element(vec![f(2, 27), f(0, 1)], 31).unwrap();
        let z = q.element(vec![f(0, 1), f(1, 25)], 70).unwrap();
        let t = q.associator(&x, &y, &z);
        assert_eq!(t.div, vec![Fraction::ZERO; 2]);
        assert_eq!(t.fin, c.associator(5, 31, 70));
    }
}
