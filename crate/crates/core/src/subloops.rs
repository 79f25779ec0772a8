//! Subloops of a finite loop: generation, normality, enumeration, layers
//! and cogenerating subloops.

use std::collections::HashSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::loops::CayleyLoop;
use crate::set::ElementSet;

/// A subloop of some [`CayleyLoop`], stored as a bit-set of its members.
///
/// `normal` records the outcome of a normality check when one has been run;
/// equality and hashing look at the members only.
#[derive(Clone, Debug)]
pub struct SubloopSet {
    members: ElementSet,
    normal: Option<bool>,
}

impl PartialEq for SubloopSet {
    fn eq(&self, other: &Self) -> bool {
        self.members == other.members
    }
}

impl Eq for SubloopSet {}

impl std::hash::Hash for SubloopSet {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.members.hash(state);
    }
}

impl SubloopSet {
    /// The subloop generated by `gens`.
    pub fn from_elements<I: IntoIterator<Item = usize>>(q: &CayleyLoop, gens: I) -> SubloopSet {
        let gens: Vec<usize> = gens.into_iter().collect();
        generate(q, &gens)
    }

    /// Wraps a set the caller knows to be closed.
    pub(crate) fn from_closed(members: ElementSet) -> SubloopSet {
        SubloopSet { members, normal: None }
    }

    pub fn trivial(q: &CayleyLoop) -> SubloopSet {
        SubloopSet::from_closed(ElementSet::from_elements(q.order(), [q.identity()]))
    }

    pub fn whole(q: &CayleyLoop) -> SubloopSet {
        SubloopSet {
            members: ElementSet::full(q.order()),
            normal: Some(true),
        }
    }

    pub fn members(&self) -> &ElementSet {
        &self.members
    }

    pub fn order(&self) -> usize {
        self.members.len()
    }

    pub fn contains(&self, x: usize) -> bool {
        self.members.contains(x)
    }

    pub fn is_trivial(&self) -> bool {
        self.order() == 1
    }

    pub fn is_subloop_of(&self, other: &SubloopSet) -> bool {
        self.members.is_subset(&other.members)
    }

    pub fn to_vec(&self) -> Vec<usize> {
        self.members.to_vec()
    }

    /// Outcome of the last normality check, if any.
    pub fn normal_flag(&self) -> Option<bool> {
        self.normal
    }

    /// Runs [`is_normal`] and records the answer.
    pub fn verify_normal(&mut self, q: &CayleyLoop) -> bool {
        let normal = is_normal(q, self).is_ok();
        self.normal = Some(normal);
        normal
    }

    /// Intersection of two subloops (always a subloop).
    pub fn intersection(&self, other: &SubloopSet) -> SubloopSet {
        SubloopSet::from_closed(self.members.intersection(&other.members))
    }
}

/// The least subloop containing `gens` (and the identity).
pub fn generate(q: &CayleyLoop, gens: &[usize]) -> SubloopSet {
    let base = SubloopSet::trivial(q);
    extend(q, &base, gens)
}

/// The subloop generated by a closed subloop `base` together with `extra`.
pub fn extend(q: &CayleyLoop, base: &SubloopSet, extra: &[usize]) -> SubloopSet {
    let mut members = base.members.clone();
    let mut list: Vec<usize> = members.iter().collect();
    let closed_prefix = list.len();
    for &g in extra {
        if members.insert(g) {
            list.push(g);
        }
    }
    let mut i = closed_prefix;
    while i < list.len() {
        let x = list[i];
        let inv = q.inverse(x);
        if members.insert(inv) {
            list.push(inv);
        }
        let mut j = 0;
        while j <= i {
            let y = list[j];
            for p in [q.mul(x, y), q.mul(y, x)] {
                if members.insert(p) {
                    list.push(p);
                }
            }
            j += 1;
        }
        i += 1;
    }
    SubloopSet::from_closed(members)
}

/// Evidence that a subloop is not normal: `L(x,y)h` lies outside it.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NormalityWitness {
    pub x: usize,
    pub y: usize,
    pub h: usize,
}

/// Direct scan: `L(x,y)h ∈ H` for every `x, y ∈ Q` and `h ∈ H`.
pub fn is_normal(q: &CayleyLoop, h: &SubloopSet) -> std::result::Result<(), NormalityWitness> {
    if h.order() == q.order() || h.is_trivial() {
        return Ok(());
    }
    let members: Vec<usize> = h.members.iter().collect();
    let n = q.order();
    let witness = (0..n).into_par_iter().find_map_first(|x| {
        for y in 0..n {
            let xy = q.mul(x, y);
            for &m in &members {
                if !h.contains(q.inner_apply(x, y, xy, m)) {
                    return Some(NormalityWitness { x, y, h: m });
                }
            }
        }
        None
    });
    match witness {
        Some(w) => Err(w),
        None => Ok(()),
    }
}

/// The least normal subloop containing `gens`: alternate generation with
/// adjoining inner-mapping images until nothing new appears.
pub fn normal_closure(q: &CayleyLoop, gens: &[usize]) -> SubloopSet {
    let mut h = generate(q, gens);
    let n = q.order();
    loop {
        let members: Vec<usize> = h.members.iter().collect();
        let images: Vec<usize> = (0..n)
            .into_par_iter()
            .flat_map_iter(|x| {
                let mut found = Vec::new();
                for y in 0..n {
                    let xy = q.mul(x, y);
                    for &m in &members {
                        let z = q.inner_apply(x, y, xy, m);
                        if !h.contains(z) {
                            found.push(z);
                        }
                    }
                }
                found
            })
            .collect();
        if images.is_empty() {
            h.normal = Some(true);
            return h;
        }
        h = extend(q, &h, &images);
    }
}

/// Default bound on the number of subloops enumerated.
pub const DEFAULT_SUBLOOP_CAP: usize = 50_000;

/// Every subloop of `q`, found by breadth-first search over subloops
/// generated by one more element. Sorted by order, then by encoding.
pub fn all_subloops(q: &CayleyLoop, cap: usize) -> Result<Vec<SubloopSet>> {
    let trivial = SubloopSet::trivial(q);
    let mut seen: HashSet<ElementSet> = HashSet::new();
    seen.insert(trivial.members.clone());
    let mut found = vec![trivial];
    let mut i = 0;
    while i < found.len() {
        let h = found[i].clone();
        let next: Vec<SubloopSet> = q
            .elements()
            .into_par_iter()
            .filter(|&x| !h.contains(x))
            .map(|x| extend(q, &h, &[x]))
            .collect();
        for k in next {
            if seen.insert(k.members.clone()) {
                found.push(k);
                if found.len() > cap {
                    return Err(Error::CapExceeded { cap, partial: found.len() });
                }
            }
        }
        i += 1;
    }
    found.sort_by(|a, b| a.order().cmp(&b.order()).then_with(|| a.members.cmp(&b.members)));
    Ok(found)
}

/// All normal subloops, each with its normality flag set.
pub fn normal_subloops(q: &CayleyLoop, cap: usize) -> Result<Vec<SubloopSet>> {
    Ok(all_subloops(q, cap)?
        .into_iter()
        .filter_map(|mut h| h.verify_normal(q).then_some(h))
        .collect())
}

/// Nontrivial normal subloops containing no smaller nontrivial normal subloop.
pub fn minimal_normal_subloops(q: &CayleyLoop) -> Result<Vec<SubloopSet>> {
    let normal: Vec<SubloopSet> = normal_subloops(q, DEFAULT_SUBLOOP_CAP)?
        .into_iter()
        .filter(|h| !h.is_trivial())
        .collect();
    Ok(normal
        .iter()
        .filter(|h| {
            !normal
                .iter()
                .any(|k| k.order() < h.order() && k.is_subloop_of(h))
        })
        .cloned()
        .collect())
}

/// Result of [`layer`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Layer {
    pub subloop: SubloopSet,
    /// `true` when `{x : x^p = e}` was not closed and generation added elements.
    pub closure_added: bool,
}

/// The subloop generated by `{x : x^p = e}`.
pub fn layer(q: &CayleyLoop, p: u64) -> Layer {
    let raw: Vec<usize> = q
        .elements()
        .filter(|&x| q.power(x, p as i64) == q.identity())
        .collect();
    let subloop = generate(q, &raw);
    Layer {
        closure_added: subloop.order() != raw.len(),
        subloop,
    }
}

/// Elements whose order is a power of `p`.
pub fn p_elements(q: &CayleyLoop, p: u64) -> Vec<usize> {
    q.elements()
        .filter(|&x| crate::perm::is_power_of(q.order_of(x), p))
        .collect()
}

/// Distinct primes dividing some element order.
pub fn element_primes(q: &CayleyLoop) -> Vec<u64> {
    let mut primes: Vec<u64> = q
        .elements()
        .flat_map(|x| prime_factors(q.order_of(x)))
        .collect();
    primes.sort_unstable();
    primes.dedup();
    primes
}

pub(crate) fn prime_factors(mut m: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= m {
        if m.is_multiple_of(p) {
            out.push(p);
            while m.is_multiple_of(p) {
                m /= p;
            }
        }
        p += 1;
    }
    if m > 1 {
        out.push(m);
    }
    out
}

/// `∏_p Q_p[p]`: generated by the elements of prime order.
pub fn cogenerator_subloop(q: &CayleyLoop) -> SubloopSet {
    let mut gens = Vec::new();
    for p in element_primes(q) {
        gens.extend(
            p_elements(q, p)
                .into_iter()
                .filter(|&x| q.power(x, p as i64) == q.identity()),
        );
    }
    let mut b = generate(q, &gens);
    b.verify_normal(q);
    b
}

/// Outcome of [`is_cogenerating`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CogenerationCheck {
    pub holds: bool,
    /// Number of nontrivial normal subloops tested.
    pub tested: usize,
    /// Whether all normal subloops were enumerated (otherwise sampled).
    pub exhaustive: bool,
    /// A nontrivial normal subloop meeting `B` trivially.
    pub witness: Option<SubloopSet>,
    pub seed: u64,
}

/// Order up to which [`is_cogenerating`] enumerates all normal subloops.
pub const COGENERATION_ENUMERATION_LIMIT: usize = 100;
/// Number of sampled normal closures above that limit.
pub const COGENERATION_SAMPLES: usize = 200;

/// Checks `B ∩ H ≠ {e}` for every nontrivial normal subloop `H`.
///
/// Enumerates all normal subloops for loops of order at most
/// [`COGENERATION_ENUMERATION_LIMIT`]; larger loops are probed with
/// [`COGENERATION_SAMPLES`] normal closures of random elements.
pub fn is_cogenerating(q: &CayleyLoop, b: &SubloopSet, seed: u64) -> Result<CogenerationCheck> {
    let exhaustive = q.order() <= COGENERATION_ENUMERATION_LIMIT;
    let candidates: Vec<SubloopSet> = if exhaustive {
        normal_subloops(q, DEFAULT_SUBLOOP_CAP)?
            .into_iter()
            .filter(|h| !h.is_trivial())
            .collect()
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..COGENERATION_SAMPLES)
            .map(|_| {
                let mut x = rng.gen_range(0..q.order());
                while x == q.identity() {
                    x = rng.gen_range(0..q.order());
                }
                normal_closure(q, &[x])
            })
            .collect()
    };
    let witness = candidates
        .iter()
        .find(|h| h.intersection(b).is_trivial())
        .cloned();
    Ok(CogenerationCheck {
        holds: witness.is_none(),
        tested: candidates.len(),
        exhaustive,
        witness,
        seed,
    })
}

/// Least index from which the chain of generated subloops is constant.
///
/// Each entry of `chain` is a generating set; every generated subloop must
/// contain the next one.
pub fn chain_stabilizes(q: &CayleyLoop, chain: &[Vec<usize>]) -> Result<usize> {
    let subloops: Vec<SubloopSet> = chain.iter().map(|g| generate(q, g)).collect();
    for (i, w) in subloops.windows(2).enumerate() {
        if !w[1].is_subloop_of(&w[0]) {
            return Err(Error::NotDescending(i + 1));
        }
    }
    let mut index = subloops.len().saturating_sub(1);
    while index > 0 && subloops[index - 1] == subloops[index] {
        index -= 1;
    }
    Ok(index)
}
