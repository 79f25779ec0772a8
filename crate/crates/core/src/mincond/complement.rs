use std::collections::{BTreeMap, BTreeSet, VecDeque};

use serde::Serialize;

use super::subloop::{from_parts, is_normal};
use super::{add_div, neg_div, Fraction, StructuredCML, StructuredElement, StructuredSubloop};
use crate::error::{Error, Result};
use crate::structure;
use crate::subloops;

/// A complement `K = {(ψ(c), c) : c ∈ C}` of `D`, given by `ψ: C → D`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Complement {
    /// `ψ(c)` for every element index `c` of `C`.
    pub psi: Vec<Vec<Fraction>>,
    pub subloop: StructuredSubloop,
}

/// Graph of `c ↦ β(c)` for a finite `B` with `B ∩ D = 1`.
fn graph_of(q: &StructuredCML, b: &StructuredSubloop) -> Result<BTreeMap<usize, Vec<Fraction>>> {
    if !b.is_finite() {
        return Err(Error::PreconditionViolated("B must be finite".into()));
    }
    let mut beta = BTreeMap::new();
    for a in b.residual() {
        if let Some(prev) = beta.insert(a.fin, a.div.clone()) {
            let d = q.divisible_element(add_div(&a.div, &neg_div(&prev)));
            return Err(Error::PreconditionViolated(format!(
                "B ∩ D contains {d:?}"
            )));
        }
    }
    Ok(beta)
}

/// An element `b ∈ B` whose finite part lies in the associator subloop of
/// `C` but whose divisible part is nonzero.
///
/// Every homomorphism `C → D` kills associators (`D` is an abelian group), so
/// such a `b` cannot lie on the graph of any `ψ`; no complement of `D`
/// contains `B`.
pub fn complement_obstruction(q: &StructuredCML, b: &StructuredSubloop) -> Result<Option<StructuredElement>> {
    graph_of(q, b)?;
    let a = structure::associator_subloop(q.finite_part());
    Ok(b
        .residual()
        .iter()
        .find(|x| a.contains(x.fin) && x.div.iter().any(|f| !f.is_zero()))
        .cloned())
}

/// Elements of `D` whose order divides `m`, in a fixed order.
fn targets(q: &StructuredCML, m: u64) -> Vec<Vec<Fraction>> {
    let mut out = vec![Vec::new()];
    for &p in q.summands() {
        let mut pk = 1;
        while m.is_multiple_of(pk * p) {
            pk *= p;
        }
        out = out
            .into_iter()
            .flat_map(|prefix| {
                (0..pk).map(move |a| {
                    let mut v = prefix.clone();
                    v.push(Fraction::new(a as i128, pk));
                    v
                })
            })
            .collect();
    }
    out
}

/// Extends the images of `gens` to a map on the abelian group `g`; `None` on
/// an inconsistency (no homomorphism with these images).
fn extend_hom(
    g: &crate::CayleyLoop,
    gens: &[usize],
    images: &[Vec<Fraction>],
    zero: &[Fraction],
) -> Option<Vec<Option<Vec<Fraction>>>> {
    let mut map: Vec<Option<Vec<Fraction>>> = vec![None; g.order()];
    map[g.identity()] = Some(zero.to_vec());
    let mut queue = VecDeque::from([g.identity()]);
    while let Some(x) = queue.pop_front() {
        let mx = map[x].clone().unwrap();
        for (&s, img) in gens.iter().zip(images) {
            let y = g.mul(x, s);
            let v = add_div(&mx, img);
            match &map[y] {
                Some(w) if *w != v => return None,
                Some(_) => {}
                None => {
                    map[y] = Some(v);
                    queue.push_back(y);
                }
            }
        }
    }
    Some(map)
}

/// A normal complement `K ⊇ B` of the divisible part: `Q = D × K`.
///
/// `B` must be finite with `B ∩ D = 1`. Complements of `D` are graphs of
/// homomorphisms `ψ: C → D`, and these factor through `C/A`, `A` the
/// associator subloop. The search runs over images of a generating set of
/// `C/A` in `D` (orders dividing the generator orders), in a fixed order,
/// and returns the first `ψ` agreeing with `B`.
pub fn divisible_complement(q: &StructuredCML, b: &StructuredSubloop) -> Result<Complement> {
    let beta = graph_of(q, b)?;
    let c = q.finite_part();
    let a = structure::associator_subloop(c);
    let (g, pi) = c.quotient(&a)?;
    let zero = vec![Fraction::ZERO; q.rank()];

    // constraints on the induced map C/A → D
    let mut wanted: Vec<Option<Vec<Fraction>>> = vec![None; g.order()];
    wanted[g.identity()] = Some(zero.clone());
    for (&x, d) in &beta {
        match &wanted[pi[x]] {
            Some(w) if w != d => return Err(Error::NoComplementFound),
            Some(_) => {}
            None => wanted[pi[x]] = Some(d.clone()),
        }
    }

    let mut gens = Vec::new();
    let mut span = subloops::SubloopSet::trivial(&g);
    for x in g.elements() {
        if !span.contains(x) {
            gens.push(x);
            span = subloops::generate(&g, &gens);
        }
    }
    let choices: Vec<Vec<Vec<Fraction>>> = gens.iter().map(|&x| targets(q, g.order_of(x))).collect();

    fn search(
        g: &crate::CayleyLoop,
        gens: &[usize],
        choices: &[Vec<Vec<Fraction>>],
        wanted: &[Option<Vec<Fraction>>],
        zero: &[Fraction],
        images: &mut Vec<Vec<Fraction>>,
    ) -> Option<Vec<Option<Vec<Fraction>>>> {
        let j = images.len();
        let map = extend_hom(g, &gens[..j], images, zero)?;
        let agrees = map
            .iter()
            .zip(wanted)
            .all(|(m, w)| match (m, w) {
                (Some(m), Some(w)) => m == w,
                _ => true,
            });
        if !agrees {
            return None;
        }
        if j == gens.len() {
            return Some(map);
        }
        for img in &choices[j] {
            images.push(img.clone());
            if let Some(found) = search(g, gens, choices, wanted, zero, images) {
                return Some(found);
            }
            images.pop();
        }
        None
    }

    let map = search(&g, &gens, &choices, &wanted, &zero, &mut Vec::new()).ok_or(Error::NoComplementFound)?;
    let psi: Vec<Vec<Fraction>> = (0..c.order())
        .map(|x| map[pi[x]].clone().expect("generators span C/A"))
        .collect();
    let residual: BTreeSet<StructuredElement> = psi
        .iter()
        .enumerate()
        .map(|(x, d)| StructuredElement { div: d.clone(), fin: x })
        .collect();
    let complement = Complement {
        psi,
        subloop: from_parts(BTreeSet::new(), residual),
    };
    if !complement.subloop.residual().iter().all(|x| {
        complement.subloop.residual().iter().all(|y| complement.subloop.contains(&q.mul(x, y)))
    }) {
        return Err(Error::DecompositionFailure("graph of ψ is not closed".into()));
    }
    Ok(complement)
}

/// Findings of [`verify_complement`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ComplementCheck {
    pub order: usize,
    pub contains_b: bool,
    pub normal: bool,
    /// `K ∩ D = 1`.
    pub meets_divisible_trivially: bool,
    /// Per truncation level `k`: every element with denominators dividing
    /// `pᵢ^k` is `d·κ` for exactly one `κ ∈ K`, `d ∈ D`.
    pub bijective: BTreeMap<u32, bool>,
}

impl ComplementCheck {
    pub fn holds(&self) -> bool {
        self.contains_b && self.normal && self.meets_divisible_trivially && self.bijective.values().all(|&b| b)
    }
}

/// Checks `Q = D × K` and `B ⊆ K` on the truncations at `levels`.
pub fn verify_complement(
    q: &StructuredCML,
    b: &StructuredSubloop,
    k: &StructuredSubloop,
    levels: &[u32],
) -> Result<ComplementCheck> {
    let order = k
        .order()
        .ok_or_else(|| Error::PreconditionViolated("complement must be finite".into()))?;
    let meets_divisible_trivially = k
        .residual()
        .iter()
        .filter(|x| x.fin == q.finite_part().identity())
        .all(|x| *x == q.identity());
    let mut bijective = BTreeMap::new();
    for &level in levels {
        let elements = super::truncate::elements_at(q, level);
        let ok = elements.iter().all(|x| {
            k.residual()
                .iter()
                .filter(|kappa| {
                    let d = q.mul(x, &q.inv(kappa));
                    d.fin == q.finite_part().identity()
                })
                .count()
                == 1
        });
        bijective.insert(level, ok);
    }
    Ok(ComplementCheck {
        order,
        contains_b: b.is_subloop_of(k),
        normal: is_normal(q, k),
        meets_divisible_trivially,
        bijective,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;
    use crate::mincond::s_generate;

    fn f(a: i128, b: u64) -> Fraction {
        Fraction::new(a, b)
    }

    #[test]
    fn trivial_b_gives_the_finite_part() {
        let q = StructuredCML::new(vec![3], catalog::cml81()).unwrap();
        let k = divisible_complement(&q, &StructuredSubloop::trivial(&q)).unwrap();
        assert!(k.psi.iter().all(|d| d.iter().all(|x| x.is_zero())));
        let check = verify_complement(&q, &StructuredSubloop::trivial(&q), &k.subloop, &[0, 1]).unwrap();
        assert!(check.holds(), "{check:?}");
        assert_eq!(check.order, 81);
    }

    #[test]
    fn twisted_complement_over_z3() {
        let q = StructuredCML::new(vec![3], catalog::cyclic(3).unwrap()).unwrap();
        let b = s_generate(&q, &[q.element(vec![f(1, 3)], 1).unwrap()], 100).unwrap();
        let k = divisible_complement(&q, &b).unwrap();
        assert_eq!(k.psi, vec![vec![f(0, 1)], vec![f(1, 3)], vec![f(2, 3)]]);
        assert!(verify_complement(&q, &b, &k.subloop, &[0, 1, 2]).unwrap().holds());
    }

    #[test]
    fn preconditions() {
        let q = StructuredCML::new(vec![3], catalog::cyclic(3).unwrap()).unwrap();
        let b = s_generate(&q, &[q.element(vec![f(1, 9)], 1).unwrap()], 100).unwrap();
        assert!(matches!(divisible_complement(&q, &b), Err(Error::PreconditionViolated(_))));
    }

    #[test]
    fn central_associator_twist_is_obstructed() {
        let q = StructuredCML::new(vec![3], catalog::cml81()).unwrap();
        let b = s_generate(&q, &[q.element(vec![f(1, 3)], 1).unwrap()], 1000).unwrap();
        assert!(complement_obstruction(&q, &b).unwrap().is_some());
        assert_eq!(divisible_complement(&q, &b), Err(Error::NoComplementFound));
    }

    #[test]
    fn targets_respect_orders() {
        let q = StructuredCML::new(vec![3, 5], catalog::cyclic(1).unwrap()).unwrap();
        assert_eq!(targets(&q, 3).len(), 3);
        assert_eq!(targets(&q, 15).len(), 15);
        assert_eq!(targets(&q, 2).len(), 1);
    }
}
