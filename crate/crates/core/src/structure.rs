//! Center, upper central series, primary decomposition and `p`-heights of
//! finite commutative Moufang loops.

use std::collections::BTreeMap;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::loops::CayleyLoop;
use crate::set::ElementSet;
use crate::subloops::{self, SubloopSet};

/// `Z(Q) = {x : (x,y,z) = e for all y, z}`, by exhaustive scan.
pub fn center(q: &CayleyLoop) -> SubloopSet {
    let n = q.order();
    let e = q.identity();
    let central: Vec<usize> = (0..n)
        .into_par_iter()
        .filter(|&x| (0..n).all(|y| (0..n).all(|z| q.associator(x, y, z) == e)))
        .collect();
    let mut z = SubloopSet::from_closed(ElementSet::from_elements(n, central));
    z.verify_normal(q);
    z
}

/// Ascending central series `{e} = Z_0 ⊂ Z_1 ⊂ … ⊂ Z_k = Q`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CentralSeries {
    pub terms: Vec<SubloopSet>,
}

impl CentralSeries {
    /// Nilpotency class: the number of steps from `{e}` to `Q`.
    pub fn class(&self) -> usize {
        self.terms.len() - 1
    }

    pub fn orders(&self) -> Vec<usize> {
        self.terms.iter().map(SubloopSet::order).collect()
    }
}

/// Upper central series: each term is the preimage of the center of the
/// quotient by the previous one.
///
/// Fails with [`Error::SeriesStalled`] if a quotient has trivial center
/// before the whole loop is reached, which cannot happen for a finite CML.
pub fn upper_central_series(q: &CayleyLoop) -> Result<CentralSeries> {
    let n = q.order();
    let mut terms = vec![SubloopSet::trivial(q)];
    loop {
        let current = terms.last().expect("series is never empty");
        if current.order() == n {
            return Ok(CentralSeries { terms });
        }
        let (quotient, projection) = q.quotient(current)?;
        let upper = center(&quotient);
        let members = ElementSet::from_elements(n, (0..n).filter(|&x| upper.contains(projection[x])));
        if members.len() == current.order() {
            return Err(Error::SeriesStalled { order: current.order() });
        }
        let mut next = SubloopSet::from_closed(members);
        next.verify_normal(q);
        terms.push(next);
    }
}

pub fn nilpotency_class(q: &CayleyLoop) -> Result<usize> {
    Ok(upper_central_series(q)?.class())
}

/// Maximal `p`-subloops `Q_p`, one per prime dividing an element order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PrimaryDecomposition {
    pub components: BTreeMap<u64, SubloopSet>,
}

impl PrimaryDecomposition {
    pub fn orders(&self) -> BTreeMap<u64, usize> {
        self.components.iter().map(|(&p, h)| (p, h.order())).collect()
    }
}

/// Splits `Q` into its `p`-components and verifies the splitting: every
/// component is a subloop, the product map `∏ Q_p → Q` is a bijection, and
/// `Q_p` lies in the center for `p ≠ 3`.
pub fn p_decomposition(q: &CayleyLoop) -> Result<PrimaryDecomposition> {
    let n = q.order();
    let z = center(q);
    let mut components = BTreeMap::new();
    for p in subloops::element_primes(q) {
        let elems = subloops::p_elements(q, p);
        let h = subloops::generate(q, &elems);
        if h.order() != elems.len() {
            return Err(Error::DecompositionFailure(format!(
                "{p}-elements are not closed under multiplication"
            )));
        }
        if p != 3 {
            if let Some(x) = elems.iter().find(|&&x| !z.contains(x)) {
                return Err(Error::DecompositionFailure(format!(
                    "{p}-element {x} is not central"
                )));
            }
        }
        components.insert(p, h);
    }

    let total: usize = components.values().map(SubloopSet::order).product();
    if total != n {
        return Err(Error::DecompositionFailure(format!(
            "component orders multiply to {total}, not {n}"
        )));
    }
    let mut hit = ElementSet::empty(n);
    let mut products = vec![q.identity()];
    for h in components.values() {
        products = products
            .iter()
            .flat_map(|&acc| h.members().iter().map(move |x| (acc, x)))
            .map(|(acc, x)| q.mul(acc, x))
            .collect();
    }
    for x in products {
        if !hit.insert(x) {
            return Err(Error::DecompositionFailure(format!(
                "{x} is a product of component elements in two ways"
            )));
        }
    }
    Ok(PrimaryDecomposition { components })
}

/// `p`-height of an element of a finite loop.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct HeightReport {
    /// Largest `k ≤ bound` with `x^{p^k} = a` solvable.
    pub height: u32,
    /// Index from which the images of `x ↦ x^{p^k}` no longer shrink.
    pub bound: u32,
    /// `a` is still a `p^bound`-th power, hence a `p^k`-th power for every `k`:
    /// the finite shadow of infinite height.
    pub saturating: bool,
}

/// Images `I_k = {x^{p^k}}` are nested and stabilize in a finite loop; the
/// height is the last `k` with `a ∈ I_k`, capped at the stabilization index.
pub fn height(q: &CayleyLoop, a: usize, p: u64) -> HeightReport {
    let n = q.order();
    let mut image = ElementSet::full(n);
    let mut k = 0u32;
    let mut height = 0u32;
    loop {
        if image.contains(a) {
            height = k;
        }
        let next = ElementSet::from_elements(n, image.iter().map(|x| q.power(x, p as i64)));
        if next == image {
            return HeightReport {
                height,
                bound: k,
                saturating: image.contains(a),
            };
        }
        image = next;
        k += 1;
    }
}

/// The normal subloop generated by all associators.
pub fn associator_subloop(q: &CayleyLoop) -> SubloopSet {
    let n = q.order();
    let found = (0..n)
        .into_par_iter()
        .map(|x| {
            let mut s = ElementSet::empty(n);
            for y in 0..n {
                for z in 0..n {
                    s.insert(q.associator(x, y, z));
                }
            }
            s
        })
        .reduce(|| ElementSet::empty(n), |a, b| a.union(&b));
    subloops::normal_closure(q, &found.to_vec())
}
