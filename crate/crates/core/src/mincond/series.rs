use std::collections::BTreeSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::subloop::{from_parts, generate_modulo, is_normal, random_element};
use super::{StructuredCML, StructuredElement, StructuredSubloop};
use crate::error::{Error, Result};
use crate::structure;
use crate::subloops;

/// Factor `H_i / H_{i-1}` of a normal series.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum FactorKind {
    Quasicyclic(u64),
    Prime(u64),
}

impl FactorKind {
    /// Size of the factor inside the truncation at level `k`.
    pub fn truncated_order(self, k: u32) -> usize {
        match self {
            FactorKind::Quasicyclic(p) => p.pow(k) as usize,
            FactorKind::Prime(p) => p as usize,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SeriesStep {
    pub subloop: StructuredSubloop,
    pub factor: FactorKind,
}

/// `1 = H₀ ⊂ H₁ ⊂ … ⊂ H_m = Q`, returned as the steps `H₁ … H_m`.
///
/// The summands of `D` come first, one quasicyclic factor each; then `C`
/// is added along its upper central series, each central step refined into
/// prime-order pieces. Normality of every term and primality of every
/// finite factor are checked.
pub fn quasicyclic_factor_series(q: &StructuredCML) -> Result<Vec<SeriesStep>> {
    let c = q.finite_part();
    let mut steps = Vec::new();
    let mut full = BTreeSet::new();
    for (i, &p) in q.summands().iter().enumerate() {
        full.insert(i);
        steps.push(SeriesStep {
            subloop: from_parts(full.clone(), BTreeSet::from([q.identity()])),
            factor: FactorKind::Quasicyclic(p),
        });
    }

    let central = structure::upper_central_series(c)?;
    let mut current = subloops::SubloopSet::trivial(c);
    for term in central.terms.iter().skip(1) {
        while current.order() < term.order() {
            let y = term
                .members()
                .iter()
                .find(|&y| !current.contains(y))
                .expect("term is larger than current");
            // a power of y of prime order modulo `current`
            let mut m = 1u64;
            while !current.contains(c.power(y, m as i64)) {
                m += 1;
            }
            let p = subloops::prime_factors(m)[0];
            let x = c.power(y, (m / p) as i64);
            let next = subloops::extend(c, &current, &[x]);
            if next.order() != current.order() * p as usize {
                return Err(Error::DecompositionFailure(format!(
                    "factor of order {} is not prime",
                    next.order() / current.order()
                )));
            }
            if subloops::is_normal(c, &next).is_err() {
                return Err(Error::NotNormal(format!("series term of order {}", next.order())));
            }
            let h = from_parts(full.clone(), next.members().iter().map(|x| q.finite_element(x)).collect());
            if !is_normal(q, &h) {
                return Err(Error::NotNormal(format!("series term of order {}", next.order())));
            }
            steps.push(SeriesStep {
                subloop: h,
                factor: FactorKind::Prime(p),
            });
            current = next;
        }
    }
    Ok(steps)
}

/// At level `k`: each term's truncated order is its predecessor's times the
/// factor's, and the last term exhausts the truncation.
pub fn series_partitions(q: &StructuredCML, steps: &[SeriesStep], k: u32) -> bool {
    let mut previous = 1usize;
    for step in steps {
        let order = step.subloop.truncated_order(q, k);
        if order != previous * step.factor.truncated_order(k) {
            return false;
        }
        previous = order;
    }
    let whole: usize = q.summands().iter().map(|&p| p.pow(k) as usize).product::<usize>()
        * q.finite_part().order();
    previous == whole
}

/// Longest chain produced by [`random_descending_chain`].
pub const MAX_CHAIN_LENGTH: usize = 64;

/// A strictly descending chain of subloops from a random start.
///
/// The start contains a random set of whole summands and random elements
/// with denominators up to `p³`. A whole summand is replaced by a random
/// finite layer `⟨1/p^k⟩`; a finite subloop passes to the subloop generated
/// by a random element, or by its `p`-th power when that element generates
/// everything.
pub fn random_descending_chain(q: &StructuredCML, seed: u64, cap: usize) -> Result<Vec<StructuredSubloop>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let full: BTreeSet<usize> = (0..q.rank()).filter(|_| rng.gen_bool(0.5)).collect();
    let gens: Vec<StructuredElement> = (0..rng.gen_range(1..=2)).map(|_| random_element(q, &mut rng)).collect();
    let mut chain = vec![generate_modulo(q, &full, &gens, cap)?];
    while chain.len() < MAX_CHAIN_LENGTH {
        let h = chain.last().unwrap();
        if h.is_trivial() {
            break;
        }
        let next = if let Some(&i) = h.full().iter().next() {
            let mut full = h.full().clone();
            full.remove(&i);
            let mut gens = h.generators(q);
            gens.push(q.summand_generator(i, rng.gen_range(0..=3)));
            generate_modulo(q, &full, &gens, cap)?
        } else {
            let items: Vec<&StructuredElement> = h.residual().iter().collect();
            let x = items[rng.gen_range(0..items.len())].clone();
            let cyclic = generate_modulo(q, &full_none(), std::slice::from_ref(&x), cap)?;
            if cyclic.order() != h.order() {
                cyclic
            } else {
                let p = subloops::prime_factors(q.order_of(&x))[0];
                generate_modulo(q, &full_none(), &[q.pow(&x, p as i64)], cap)?
            }
        };
        chain.push(next);
    }
    Ok(chain)
}

fn full_none() -> BTreeSet<usize> {
    BTreeSet::new()
}

/// Least index from which the chain is constant; checks that it descends.
pub fn chain_stabilization_index(chain: &[StructuredSubloop]) -> Result<usize> {
    for (i, w) in chain.windows(2).enumerate() {
        if !w[1].is_subloop_of(&w[0]) {
            return Err(Error::NotDescending(i + 1));
        }
    }
    let mut index = chain.len().saturating_sub(1);
    while index > 0 && chain[index - 1] == chain[index] {
        index -= 1;
    }
    Ok(index)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;

    #[test]
    fn series_of_small_examples() {
        let q = StructuredCML::new(vec![3], catalog::cyclic(1).unwrap()).unwrap();
        let s = quasicyclic_factor_series(&q).unwrap();
        assert_eq!(s.len(), 1);
        assert_eq!(s[0].factor, FactorKind::Quasicyclic(3));

        let q = StructuredCML::new(vec![], catalog::cyclic(9).unwrap()).unwrap();
        let s = quasicyclic_factor_series(&q).unwrap();
        let kinds: Vec<_> = s.iter().map(|x| x.factor).collect();
        assert_eq!(kinds, vec![FactorKind::Prime(3); 2]);
        assert_eq!(s[0].subloop.order(), Some(3));
    }

    #[test]
    fn series_of_prufer_times_cml81() {
        let q = StructuredCML::new(vec![3], catalog::cml81()).unwrap();
        let s = quasicyclic_factor_series(&q).unwrap();
        assert_eq!(s.len(), 5);
        assert_eq!(s[0].factor, FactorKind::Quasicyclic(3));
        assert!(s[1..].iter().all(|x| x.factor == FactorKind::Prime(3)));
        for k in 0..3 {
            assert!(series_partitions(&q, &s, k));
        }
    }

    #[test]
    fn chains_descend_and_stop() {
        let q = StructuredCML::new(vec![3, 5], catalog::cyclic(9).unwrap()).unwrap();
        for seed in 0..20 {
            let chain = random_descending_chain(&q, seed, 1_000_000).unwrap();
            let index = chain_stabilization_index(&chain).unwrap();
            assert_eq!(index, chain.len() - 1);
            assert!(chain.last().unwrap().is_trivial());
            for w in chain.windows(2) {
                assert_ne!(w[0], w[1]);
            }
        }
    }
}
