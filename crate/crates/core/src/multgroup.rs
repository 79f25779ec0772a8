//! The multiplication group `𝔐(Q) = ⟨L(x)⟩` and the inner mapping group
//! `I(Q) = ⟨L(x,y)⟩` as explicit permutation groups on the loop elements.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::loops::CayleyLoop;
use crate::perm::{is_power_of, Perm, PermGroup};
use crate::set::ElementSet;
use crate::structure;
use crate::subloops::{self, SubloopSet};

/// `⟨L(x) : x ∈ Q⟩`, materialized up to `cap` elements.
pub fn mult_group(q: &CayleyLoop, cap: usize) -> Result<PermGroup> {
    PermGroup::generate_sifted(q.order(), q.elements().map(|x| q.translation(x)), cap)
}

/// `⟨L(x,y) : x, y ∈ Q⟩`, materialized up to `cap` elements.
pub fn inner_group(q: &CayleyLoop, cap: usize) -> Result<PermGroup> {
    let n = q.order();
    let candidates = (0..n).flat_map(|x| (0..n).map(move |y| (x, y)));
    PermGroup::generate_sifted(n, candidates.map(|(x, y)| q.inner_mapping(x, y)), cap)
}

/// `M(S) = ⟨L(s) : s ∈ S⟩`.
pub fn translation_subgroup(q: &CayleyLoop, s: &SubloopSet, cap: usize) -> Result<PermGroup> {
    PermGroup::generate_sifted(q.order(), s.members().iter().map(|x| q.translation(x)), cap)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CenterFormulaCheck {
    pub holds: bool,
    pub group_center_order: usize,
    pub loop_center_order: usize,
    /// An element of `Z(𝔐)` that is not a central translation, or a
    /// central translation outside `Z(𝔐)`, as an image array.
    pub witness: Option<Vec<usize>>,
}

/// Compares `Z(𝔐)` with `{L(a) : a ∈ Z(Q)}` as sets of permutations.
pub fn check_center_formula(q: &CayleyLoop, group: &PermGroup) -> Result<CenterFormulaCheck> {
    let group_center = group.center()?;
    let loop_center = structure::center(q);
    let translations: Vec<Perm> = loop_center.members().iter().map(|a| q.translation(a)).collect();
    let witness = translations
        .iter()
        .find(|t| !group_center.contains(t))
        .or_else(|| {
            group_center
                .elements()
                .ok()
                .and_then(|els| els.iter().find(|g| !translations.contains(g)))
        })
        .map(Perm::images);
    Ok(CenterFormulaCheck {
        holds: witness.is_none(),
        group_center_order: group_center.order()?,
        loop_center_order: loop_center.order(),
        witness,
    })
}

/// Findings for a loop presented as `Q = D × H` with `D` central.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DirectFactorCheck {
    pub group_order: usize,
    pub factor_group_order: usize,
    pub complement_group_order: usize,
    /// `M(D) ⊆ Z(𝔐)`.
    pub factor_group_central: bool,
    /// `M(D) ∩ M(H) = 1`.
    pub trivial_intersection: bool,
    /// Every element of `𝔐` is uniquely `αβ` with `α ∈ M(D)`, `β ∈ M(H)`.
    pub product_is_whole_group: bool,
    /// `a ↦ L(a)` is an isomorphism `D → M(D)`.
    pub translation_isomorphism: bool,
    /// For each prime `p ≠ 3` dividing `|D|`: the `p`-elements of `𝔐` are central.
    pub p_parts_central: BTreeMap<u64, bool>,
}

impl DirectFactorCheck {
    pub fn holds(&self) -> bool {
        self.factor_group_central
            && self.trivial_intersection
            && self.product_is_whole_group
            && self.translation_isomorphism
            && self.p_parts_central.values().all(|&b| b)
    }
}

/// Verifies `𝔐 = M(D) × M(H)`, `M(D) ⊆ Z(𝔐)` and `M(D) ≅ D` for a
/// decomposition `Q = D × H` with `D ⊆ Z(Q)`.
///
/// The decomposition itself is checked first: `D` central, `H` normal,
/// `D ∩ H = {e}` and every element uniquely a product `dh`.
pub fn check_central_factor(
    q: &CayleyLoop,
    d: &SubloopSet,
    h: &SubloopSet,
    cap: usize,
) -> Result<DirectFactorCheck> {
    let n = q.order();
    let z = structure::center(q);
    if !d.is_subloop_of(&z) {
        return Err(Error::NotCentralFactor("D is not contained in the center".into()));
    }
    if subloops::is_normal(q, h).is_err() {
        return Err(Error::NotCentralFactor("H is not normal".into()));
    }
    if !d.intersection(h).is_trivial() || d.order() * h.order() != n {
        return Err(Error::NotCentralFactor("D and H do not split Q".into()));
    }
    let mut hit = ElementSet::empty(n);
    for a in d.members().iter() {
        for b in h.members().iter() {
            if !hit.insert(q.mul(a, b)) {
                return Err(Error::NotCentralFactor("product map D × H → Q is not injective".into()));
            }
        }
    }

    let group = mult_group(q, cap)?;
    let group_center = group.center()?;
    let md = translation_subgroup(q, d, cap)?;
    let mh = translation_subgroup(q, h, cap)?;
    let md_elems = md.elements()?;
    let mh_elems = mh.elements()?;

    let factor_group_central = md_elems.iter().all(|g| group_center.contains(g));
    let trivial_intersection = md_elems.iter().filter(|g| mh.contains(g)).count() == 1;

    let mut product_is_whole_group = md_elems.len() * mh_elems.len() == group.order()?;
    if product_is_whole_group {
        let mut seen = std::collections::HashSet::with_capacity(group.order()?);
        'outer: for a in md_elems {
            for b in mh_elems {
                let ab = a.compose(b);
                if !group.contains(&ab) || !seen.insert(ab) {
                    product_is_whole_group = false;
                    break 'outer;
                }
            }
        }
    }

    let dm: Vec<usize> = d.members().iter().collect();
    let translation_isomorphism = md_elems.len() == dm.len()
        && dm.iter().all(|&a| {
            dm.iter().all(|&b| q.translation(q.mul(a, b)) == q.translation(a).compose(&q.translation(b)))
        })
        && dm.iter().filter(|&&a| q.translation(a).is_identity()).count() == 1;

    let mut p_parts_central = BTreeMap::new();
    for p in subloops::prime_factors(d.order() as u64) {
        if p == 3 {
            continue;
        }
        let central = group
            .elements()?
            .iter()
            .filter(|g| is_power_of(g.order(), p))
            .all(|g| group_center.contains(g));
        p_parts_central.insert(p, central);
    }

    Ok(DirectFactorCheck {
        group_order: group.order()?,
        factor_group_order: md_elems.len(),
        complement_group_order: mh_elems.len(),
        factor_group_central,
        trivial_intersection,
        product_is_whole_group,
        translation_isomorphism,
        p_parts_central,
    })
}

/// For a loop whose elements all have 3-power order: is `𝔐` a 3-group?
pub fn check_three_loop_group(q: &CayleyLoop, cap: usize) -> Result<bool> {
    if let Some(x) = q.elements().find(|&x| !is_power_of(q.order_of(x), 3)) {
        return Err(Error::PreconditionViolated(format!(
            "element {x} has order {}, not a power of 3",
            q.order_of(x)
        )));
    }
    mult_group(q, cap)?.is_p_group(3)
}

/// Summary of `𝔐(Q)` used in reports.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GroupReport {
    pub degree: usize,
    pub order: usize,
    pub is_3_group: bool,
    pub center_order: usize,
    pub derived_order: usize,
    /// `|𝔐| / |Z(𝔐)|`.
    pub central_quotient_order: usize,
    pub inner_order: usize,
    pub census: BTreeMap<u64, u64>,
}

pub fn group_report(q: &CayleyLoop, cap: usize) -> Result<GroupReport> {
    let group = mult_group(q, cap)?;
    let center = group.center()?;
    let derived = group.derived_subgroup()?;
    let inner = inner_group(q, cap)?;
    Ok(GroupReport {
        degree: group.degree(),
        order: group.order()?,
        is_3_group: group.is_p_group(3)?,
        center_order: center.order()?,
        derived_order: derived.order()?,
        central_quotient_order: group.order()? / center.order()?,
        inner_order: inner.order()?,
        census: group.element_order_census()?,
    })
}
