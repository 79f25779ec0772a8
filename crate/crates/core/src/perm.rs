//! Permutations of loop elements and explicitly materialized permutation groups.

use std::collections::BTreeMap;
use std::fmt;

use indexmap::IndexSet;

use crate::error::{Error, Result};

/// A bijection on `0..degree`, stored as its image array.
///
/// Composition follows the operator convention used for translations:
/// `a.compose(&b)` is the map `x ↦ a(b(x))`, so `L(x)L(y)` applies `L(y)` first.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Perm {
    images: Box<[u16]>,
}

impl Perm {
    pub fn identity(degree: usize) -> Perm {
        Perm {
            images: (0..degree).map(|x| x as u16).collect(),
        }
    }

    /// Builds a permutation from its images; `None` if the array is not a bijection.
    pub fn from_images(images: Vec<usize>) -> Option<Perm> {
        let n = images.len();
        let mut seen = vec![false; n];
        for &y in &images {
            if y >= n || seen[y] {
                return None;
            }
            seen[y] = true;
        }
        Some(Perm {
            images: images.into_iter().map(|y| y as u16).collect(),
        })
    }

    /// Caller guarantees the images form a bijection.
    pub(crate) fn from_raw(images: Box<[u16]>) -> Perm {
        Perm { images }
    }

    pub fn degree(&self) -> usize {
        self.images.len()
    }

    #[inline]
    pub fn apply(&self, x: usize) -> usize {
        self.images[x] as usize
    }

    pub fn images(&self) -> Vec<usize> {
        self.images.iter().map(|&y| y as usize).collect()
    }

    /// `x ↦ self(other(x))`.
    pub fn compose(&self, other: &Perm) -> Perm {
        debug_assert_eq!(self.degree(), other.degree());
        Perm {
            images: other.images.iter().map(|&y| self.images[y as usize]).collect(),
        }
    }

    pub fn inverse(&self) -> Perm {
        let mut inv = vec![0u16; self.degree()].into_boxed_slice();
        for (x, &y) in self.images.iter().enumerate() {
            inv[y as usize] = x as u16;
        }
        Perm { images: inv }
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(x, &y)| x == y as usize)
    }

    pub fn commutes_with(&self, other: &Perm) -> bool {
        (0..self.degree()).all(|x| self.apply(other.apply(x)) == other.apply(self.apply(x)))
    }

    /// Least `m > 0` with `self^m = id`: the lcm of the cycle lengths.
    pub fn order(&self) -> u64 {
        let n = self.degree();
        let mut seen = vec![false; n];
        let mut order = 1u64;
        for start in 0..n {
            if seen[start] {
                continue;
            }
            let mut len = 0u64;
            let mut x = start;
            while !seen[x] {
                seen[x] = true;
                x = self.apply(x);
                len += 1;
            }
            order = num_integer::lcm(order, len);
        }
        order
    }
}

impl fmt::Debug for Perm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Perm{:?}", self.images)
    }
}

/// A permutation group given by generators, optionally with its full element list.
///
/// Materialized elements are kept in lexicographic order so iteration and
/// reports do not depend on the order in which the closure discovered them.
#[derive(Clone, Debug)]
pub struct PermGroup {
    degree: usize,
    generators: Vec<Perm>,
    elements: Option<IndexSet<Perm>>,
}

/// Default bound on materialized group orders.
pub const DEFAULT_GROUP_CAP: usize = 10_000_000;

impl PermGroup {
    /// The trivial group of the given degree.
    pub fn trivial(degree: usize) -> PermGroup {
        let mut elements = IndexSet::new();
        elements.insert(Perm::identity(degree));
        PermGroup {
            degree,
            generators: Vec::new(),
            elements: Some(elements),
        }
    }

    /// Closes `generators` under composition by breadth-first search.
    ///
    /// Fails with [`Error::CapExceeded`] as soon as more than `cap` elements
    /// have been found; the count reached is reported.
    pub fn generate(degree: usize, generators: Vec<Perm>, cap: usize) -> Result<PermGroup> {
        let elements = close(degree, &generators, cap)?;
        Ok(PermGroup {
            degree,
            generators,
            elements: Some(elements),
        })
    }

    /// Like [`PermGroup::generate`], but first discards every candidate that
    /// already lies in the group generated by the earlier ones.
    pub fn generate_sifted<I>(degree: usize, candidates: I, cap: usize) -> Result<PermGroup>
    where
        I: IntoIterator<Item = Perm>,
    {
        let mut group = PermGroup::trivial(degree);
        for p in candidates {
            if group.contains(&p) {
                continue;
            }
            let mut gens = group.generators.clone();
            gens.push(p);
            group = PermGroup::generate(degree, gens, cap)?;
        }
        Ok(group)
    }

    /// A group known only by its generators.
    pub fn unmaterialized(degree: usize, generators: Vec<Perm>) -> PermGroup {
        PermGroup {
            degree,
            generators,
            elements: None,
        }
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn generators(&self) -> &[Perm] {
        &self.generators
    }

    pub fn is_materialized(&self) -> bool {
        self.elements.is_some()
    }

    pub fn elements(&self) -> Result<&IndexSet<Perm>> {
        self.elements.as_ref().ok_or(Error::NotMaterialized)
    }

    pub fn order(&self) -> Result<usize> {
        Ok(self.elements()?.len())
    }

    /// Membership; an unmaterialized group only recognizes the identity.
    pub fn contains(&self, p: &Perm) -> bool {
        match &self.elements {
            Some(e) => e.contains(p),
            None => p.is_identity(),
        }
    }

    pub fn is_subgroup_of(&self, other: &PermGroup) -> Result<bool> {
        let mine = self.elements()?;
        other.elements()?;
        Ok(mine.iter().all(|p| other.contains(p)))
    }

    /// Center: the elements commuting with every generator.
    pub fn center(&self) -> Result<PermGroup> {
        let elements = self.elements()?;
        let central: Vec<Perm> = elements
            .iter()
            .filter(|g| self.generators.iter().all(|s| g.commutes_with(s)))
            .cloned()
            .collect();
        PermGroup::generate_sifted(self.degree, central, usize::MAX)
    }

    /// Commutator subgroup: the normal closure of the commutators of the generators.
    pub fn derived_subgroup(&self) -> Result<PermGroup> {
        self.elements()?;
        let mut commutators = Vec::new();
        for (i, a) in self.generators.iter().enumerate() {
            for b in &self.generators[i + 1..] {
                let c = commutator(a, b);
                if !c.is_identity() {
                    commutators.push(c);
                }
            }
        }
        self.normal_closure(commutators)
    }

    /// Least normal subgroup of `self` containing `seeds`.
    pub fn normal_closure(&self, seeds: Vec<Perm>) -> Result<PermGroup> {
        self.elements()?;
        let mut sub = PermGroup::generate_sifted(self.degree, seeds, usize::MAX)?;
        loop {
            let mut extra = Vec::new();
            for h in &sub.generators {
                for g in &self.generators {
                    let conj = g.inverse().compose(h).compose(g);
                    if !sub.contains(&conj) && !extra.contains(&conj) {
                        extra.push(conj);
                    }
                }
            }
            if extra.is_empty() {
                return Ok(sub);
            }
            let candidates: Vec<Perm> = sub.generators.iter().cloned().chain(extra).collect();
            sub = PermGroup::generate_sifted(self.degree, candidates, usize::MAX)?;
        }
    }

    /// `|G| = p^k` and every element has `p`-power order.
    pub fn is_p_group(&self, p: u64) -> Result<bool> {
        let order = self.order()? as u64;
        if !is_power_of(order, p) {
            return Ok(false);
        }
        Ok(self.elements()?.iter().all(|g| is_power_of(g.order(), p)))
    }

    /// Histogram of element orders.
    pub fn element_order_census(&self) -> Result<BTreeMap<u64, u64>> {
        let mut census = BTreeMap::new();
        for g in self.elements()? {
            *census.entry(g.order()).or_insert(0) += 1;
        }
        Ok(census)
    }

    /// Orbit of a point under the generators.
    pub fn orbit(&self, point: usize) -> Vec<usize> {
        let mut seen = vec![false; self.degree];
        seen[point] = true;
        let mut orbit = vec![point];
        let mut i = 0;
        while i < orbit.len() {
            let x = orbit[i];
            for g in &self.generators {
                let y = g.apply(x);
                if !seen[y] {
                    seen[y] = true;
                    orbit.push(y);
                }
            }
            i += 1;
        }
        orbit.sort_unstable();
        orbit
    }

    /// Point stabilizer, filtered from the materialized elements.
    pub fn stabilizer(&self, point: usize) -> Result<Vec<Perm>> {
        Ok(self
            .elements()?
            .iter()
            .filter(|g| g.apply(point) == point)
            .cloned()
            .collect())
    }
}

/// `a⁻¹b⁻¹ab`.
pub fn commutator(a: &Perm, b: &Perm) -> Perm {
    a.inverse().compose(&b.inverse()).compose(a).compose(b)
}

pub fn is_power_of(mut m: u64, p: u64) -> bool {
    if m == 0 {
        return false;
    }
    while m.is_multiple_of(p) {
        m /= p;
    }
    m == 1
}

fn close(degree: usize, generators: &[Perm], cap: usize) -> Result<IndexSet<Perm>> {
    let mut elements = IndexSet::new();
    elements.insert(Perm::identity(degree));
    let mut i = 0;
    while i < elements.len() {
        let g = elements[i].clone();
        for s in generators {
            let h = s.compose(&g);
            if !elements.contains(&h) {
                elements.insert(h);
                if elements.len() > cap {
                    return Err(Error::CapExceeded {
                        cap,
                        partial: elements.len(),
                    });
                }
            }
        }
        i += 1;
    }
    elements.sort_unstable();
    Ok(elements)
}
