use std::collections::{BTreeSet, HashSet};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::{add_div, neg_div, Fraction, StructuredCML, StructuredElement};
use crate::error::{Error, Result};
use crate::subloops;

/// `(⊕_{i ∈ full} Z(pᵢ^∞)) · ⟨residual⟩`.
///
/// `residual` is stored closed: it is the full set of elements of the
/// subloop whose coordinates in the `full` summands are zero.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct StructuredSubloop {
    full: BTreeSet<usize>,
    residual: BTreeSet<StructuredElement>,
}

/// Chains of roots `a, a', a'', …` with `(a')^p = a` longer than this promote
/// the summand to `full` in [`adjoin_root_chain`].
pub const ROOT_DEPTH_CAP: u32 = 8;

impl StructuredSubloop {
    pub fn trivial(q: &StructuredCML) -> StructuredSubloop {
        StructuredSubloop {
            full: BTreeSet::new(),
            residual: BTreeSet::from([q.identity()]),
        }
    }

    pub fn full(&self) -> &BTreeSet<usize> {
        &self.full
    }

    pub fn residual(&self) -> &BTreeSet<StructuredElement> {
        &self.residual
    }

    pub fn is_finite(&self) -> bool {
        self.full.is_empty()
    }

    /// `None` for infinite subloops.
    pub fn order(&self) -> Option<usize> {
        self.is_finite().then_some(self.residual.len())
    }

    pub fn is_trivial(&self) -> bool {
        self.is_finite() && self.residual.len() == 1
    }

    fn project(&self, a: &StructuredElement) -> StructuredElement {
        let mut a = a.clone();
        for &i in &self.full {
            a.div[i] = Fraction::ZERO;
        }
        a
    }

    pub fn contains(&self, a: &StructuredElement) -> bool {
        self.residual.contains(&self.project(a))
    }

    /// Distinct finite parts of elements.
    pub fn finite_parts(&self) -> BTreeSet<usize> {
        self.residual.iter().map(|a| a.fin).collect()
    }

    pub fn is_subloop_of(&self, other: &StructuredSubloop) -> bool {
        self.full.is_subset(&other.full) && self.residual.iter().all(|a| other.contains(a))
    }

    /// Elements with every denominator dividing `pᵢ^k`.
    pub fn truncated_order(&self, q: &StructuredCML, k: u32) -> usize {
        let full: usize = self.full.iter().map(|&i| q.summands()[i].pow(k) as usize).product();
        let bounded = self
            .residual
            .iter()
            .filter(|a| a.div.iter().zip(q.summands()).all(|(f, &p)| p.pow(k) % f.den() == 0))
            .count();
        full * bounded
    }

    /// A generating set for the residual part, chosen greedily in element
    /// order; together with `full` it generates the subloop.
    pub fn generators(&self, q: &StructuredCML) -> Vec<StructuredElement> {
        let mut gens = Vec::new();
        let mut span = StructuredSubloop {
            full: self.full.clone(),
            residual: BTreeSet::from([q.identity()]),
        };
        for a in &self.residual {
            if !span.contains(a) {
                gens.push(a.clone());
                span = generate_modulo(q, &self.full, &gens, usize::MAX)
                    .expect("a subloop of a finite residual is finite");
            }
        }
        gens
    }

    /// A nontrivial element of `self ∩ other`, if any. One of the two must be
    /// finite.
    pub fn common_element(&self, q: &StructuredCML, other: &StructuredSubloop) -> Result<Option<StructuredElement>> {
        let (finite, rest) = match (self.is_finite(), other.is_finite()) {
            (true, _) => (self, other),
            (false, true) => (other, self),
            _ => {
                return Err(Error::PreconditionViolated(
                    "intersection needs a finite operand".into(),
                ))
            }
        };
        Ok(finite
            .residual
            .iter()
            .find(|a| **a != q.identity() && rest.contains(a))
            .cloned())
    }
}

/// Generated subloop modulo the summands in `full`.
///
/// The projection of the subloop to `C` is a subloop `F`; choosing for each
/// `c ∈ F` one divisible coordinate `rep(c)` reached first during the closure,
/// the subloop is `{(rep(c) + k, c)}` where `k` ranges over the subgroup of `D`
/// generated by all defects `rep(c) + rep(c') − rep(cc')`. `C` is commutative,
/// so each unordered pair is visited once.
pub(crate) fn generate_modulo(
    q: &StructuredCML,
    full: &BTreeSet<usize>,
    gens: &[StructuredElement],
    cap: usize,
) -> Result<StructuredSubloop> {
    let c = q.finite_part();
    let n = c.order();
    let zero = vec![Fraction::ZERO; q.rank()];
    let project = |d: &[Fraction]| -> Vec<Fraction> {
        let mut d = d.to_vec();
        for &i in full {
            d[i] = Fraction::ZERO;
        }
        d
    };

    let mut rep: Vec<Option<Vec<Fraction>>> = vec![None; n];
    let mut list = vec![c.identity()];
    rep[c.identity()] = Some(zero.clone());
    let mut defects: Vec<Vec<Fraction>> = Vec::new();
    let mut seen_defects = HashSet::new();
    let mut record = |d: Vec<Fraction>, defects: &mut Vec<Vec<Fraction>>| {
        if d.iter().any(|f| !f.is_zero()) && seen_defects.insert(d.clone()) {
            defects.push(d);
        }
    };

    for g in gens {
        let d = project(&g.div);
        match &rep[g.fin] {
            Some(r) => record(add_div(&d, &neg_div(r)), &mut defects),
            None => {
                rep[g.fin] = Some(d);
                list.push(g.fin);
            }
        }
    }
    let mut i = 0;
    while i < list.len() {
        for j in 0..=i {
            let (x, y) = (list[i], list[j]);
            let z = c.mul(x, y);
            let d = add_div(rep[x].as_ref().unwrap(), rep[y].as_ref().unwrap());
            match &rep[z] {
                Some(r) => record(add_div(&d, &neg_div(r)), &mut defects),
                None => {
                    rep[z] = Some(d);
                    list.push(z);
                }
            }
        }
        i += 1;
    }

    let mut kernel = vec![zero];
    let mut in_kernel: HashSet<Vec<Fraction>> = kernel.iter().cloned().collect();
    for r in defects {
        if in_kernel.contains(&r) {
            continue;
        }
        let base = kernel.clone();
        let mut step = r.clone();
        while !in_kernel.contains(&step) {
            for k in &base {
                let e = add_div(k, &step);
                in_kernel.insert(e.clone());
                kernel.push(e);
            }
            if kernel.len().saturating_mul(list.len()) > cap {
                return Err(Error::CapExceeded {
                    cap,
                    partial: kernel.len() * list.len(),
                });
            }
            step = add_div(&step, &r);
        }
    }
    if kernel.len().saturating_mul(list.len()) > cap {
        return Err(Error::CapExceeded {
            cap,
            partial: kernel.len() * list.len(),
        });
    }

    let mut residual = BTreeSet::new();
    for &x in &list {
        let r = rep[x].as_ref().unwrap();
        for k in &kernel {
            residual.insert(StructuredElement {
                div: add_div(r, k),
                fin: x,
            });
        }
    }
    Ok(StructuredSubloop {
        full: full.clone(),
        residual,
    })
}

/// The (finite) subloop generated by `gens`.
pub fn s_generate(q: &StructuredCML, gens: &[StructuredElement], cap: usize) -> Result<StructuredSubloop> {
    generate_modulo(q, &BTreeSet::new(), gens, cap)
}

/// The least normal subloop containing the summands in `full` and `gens`.
///
/// Inner mappings fix `D`, so `L(x,y)(d,c) = (d,c)·(0, c\L(x,y)c)`; the
/// closure adjoins these correction terms until none is missing.
pub fn normal_closure(
    q: &StructuredCML,
    full: &BTreeSet<usize>,
    gens: &[StructuredElement],
    cap: usize,
) -> Result<StructuredSubloop> {
    let mut gens = gens.to_vec();
    loop {
        let h = generate_modulo(q, full, &gens, cap)?;
        let missing = missing_conjugates(q, &h);
        if missing.is_empty() {
            return Ok(h);
        }
        gens.extend(missing);
    }
}

fn missing_conjugates(q: &StructuredCML, h: &StructuredSubloop) -> Vec<StructuredElement> {
    let c = q.finite_part();
    let mut out = BTreeSet::new();
    for x in h.finite_parts() {
        for phi in q.inner_mappings() {
            let u = q.finite_element(c.left_divide(x, phi.apply(x)));
            if !h.contains(&u) {
                out.insert(u);
            }
        }
    }
    out.into_iter().collect()
}

/// Normality, decided on finite parts: `D` is central and fixed by every
/// inner mapping.
pub fn is_normal(q: &StructuredCML, h: &StructuredSubloop) -> bool {
    missing_conjugates(q, h).is_empty()
}

/// Adds summand `i` to `full`.
pub fn promote(q: &StructuredCML, h: &StructuredSubloop, i: usize, cap: usize) -> Result<StructuredSubloop> {
    let mut full = h.full.clone();
    full.insert(i);
    generate_modulo(q, &full, &h.generators(q), cap)
}

/// Adjoins the root chain `1/pᵢ, 1/pᵢ², …, 1/pᵢ^depth` of summand `i`.
///
/// Beyond [`ROOT_DEPTH_CAP`] the chain is unbounded for all practical
/// purposes and, since every subgroup of `Z(p^∞)` containing elements of
/// arbitrarily large order is the whole group, the summand is promoted.
pub fn adjoin_root_chain(
    q: &StructuredCML,
    h: &StructuredSubloop,
    i: usize,
    depth: u32,
    cap: usize,
) -> Result<StructuredSubloop> {
    if depth > ROOT_DEPTH_CAP {
        return promote(q, h, i, cap);
    }
    let mut gens = h.generators(q);
    gens.push(q.summand_generator(i, depth));
    generate_modulo(q, &h.full, &gens, cap)
}

/// `Q[p]`: bottom layers of the `p`-summands times the layer of `C`.
pub fn socle(q: &StructuredCML, p: u64) -> StructuredSubloop {
    generate_modulo(q, &BTreeSet::new(), &socle_generators(q, p), usize::MAX)
        .expect("socles are finite")
}

fn socle_generators(q: &StructuredCML, p: u64) -> Vec<StructuredElement> {
    let mut gens: Vec<StructuredElement> = (0..q.rank())
        .filter(|&i| q.summands()[i] == p)
        .map(|i| q.summand_generator(i, 1))
        .collect();
    let layer = subloops::layer(q.finite_part(), p).subloop;
    gens.extend(layer.members().iter().map(|x| q.finite_element(x)));
    gens
}

/// Primes of the summands and of element orders in `C`.
pub fn relevant_primes(q: &StructuredCML) -> Vec<u64> {
    let mut primes: Vec<u64> = q.summands().to_vec();
    primes.extend(subloops::element_primes(q.finite_part()));
    primes.sort_unstable();
    primes.dedup();
    primes
}

/// `∏_p Q[p]` over the relevant primes.
pub fn cogenerator_subloop(q: &StructuredCML) -> StructuredSubloop {
    let gens: Vec<StructuredElement> = relevant_primes(q)
        .into_iter()
        .flat_map(|p| socle_generators(q, p))
        .collect();
    generate_modulo(q, &BTreeSet::new(), &gens, usize::MAX).expect("socles are finite")
}

/// Outcome of [`is_cogenerating`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CogenerationTrial {
    pub holds: bool,
    pub trials: usize,
    /// How many sampled subloops contained a whole summand.
    pub infinite_trials: usize,
    pub seed: u64,
    /// Generator of a normal closure meeting `B` trivially.
    pub witness: Option<String>,
}

/// Default number of trials for [`is_cogenerating`].
pub const COGENERATION_TRIALS: usize = 200;

/// Largest denominator exponent used for random elements.
const RANDOM_DEPTH: u32 = 3;

pub(crate) fn random_element(q: &StructuredCML, rng: &mut ChaCha8Rng) -> StructuredElement {
    let div = q
        .summands()
        .iter()
        .map(|&p| {
            let den = p.pow(rng.gen_range(0..=RANDOM_DEPTH));
            Fraction::new(rng.gen_range(0..den) as i128, den)
        })
        .collect();
    StructuredElement {
        div,
        fin: rng.gen_range(0..q.finite_part().order()),
    }
}

/// Tests `B ∩ H ≠ {1}` on `trials` random nontrivial normal subloops `H`:
/// normal closures of a random element, a quarter of them also containing
/// a random whole summand.
pub fn is_cogenerating(
    q: &StructuredCML,
    b: &StructuredSubloop,
    trials: usize,
    seed: u64,
    cap: usize,
) -> Result<CogenerationTrial> {
    if !b.is_finite() {
        return Err(Error::PreconditionViolated("cogenerating subloop must be finite".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut infinite_trials = 0;
    for _ in 0..trials {
        let mut full = BTreeSet::new();
        if q.rank() > 0 && rng.gen_ratio(1, 4) {
            full.insert(rng.gen_range(0..q.rank()));
            infinite_trials += 1;
        }
        let mut x = random_element(q, &mut rng);
        while full.is_empty() && x == q.identity() {
            x = random_element(q, &mut rng);
        }
        let h = normal_closure(q, &full, &[x.clone()], cap)?;
        if b.common_element(q, &h)?.is_none() {
            return Ok(CogenerationTrial {
                holds: false,
                trials,
                infinite_trials,
                seed,
                witness: Some(format!("{x:?} with full {full:?}")),
            });
        }
    }
    Ok(CogenerationTrial {
        holds: true,
        trials,
        infinite_trials,
        seed,
        witness: None,
    })
}

/// The maximal divisible subloop of `H`: its whole summands.
pub fn divisible_part(q: &StructuredCML, h: &StructuredSubloop) -> StructuredSubloop {
    StructuredSubloop {
        full: h.full.clone(),
        residual: BTreeSet::from([q.identity()]),
    }
}

/// `Q = D × C` as the pair (all summands, `{0} × C`).
pub fn reduced_split(q: &StructuredCML) -> (StructuredSubloop, StructuredSubloop) {
    let d = StructuredSubloop {
        full: (0..q.rank()).collect(),
        residual: BTreeSet::from([q.identity()]),
    };
    let c = StructuredSubloop {
        full: BTreeSet::new(),
        residual: q.finite_part().elements().map(|x| q.finite_element(x)).collect(),
    };
    (d, c)
}

pub(crate) fn from_parts(full: BTreeSet<usize>, residual: BTreeSet<StructuredElement>) -> StructuredSubloop {
    StructuredSubloop { full, residual }
}
