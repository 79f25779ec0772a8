//! The commutative Moufang identity and the associator calculus of a CML.
//!
//! Every check here is a scan over element tuples; scans over an outer
//! index run in parallel and report the lexicographically first witness.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::loops::CayleyLoop;

/// Outcome of [`is_cml`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CmlCheck {
    /// First pair with `ab ≠ ba`.
    pub noncommuting_pair: Option<(usize, usize)>,
    /// First triple with `x²·yz ≠ xy·xz`.
    pub moufang_violation: Option<(usize, usize, usize)>,
}

impl CmlCheck {
    pub fn holds(&self) -> bool {
        self.noncommuting_pair.is_none() && self.moufang_violation.is_none()
    }
}

/// Exhaustive test for commutativity and `x²·yz = xy·xz` over all triples.
pub fn is_cml(q: &CayleyLoop) -> CmlCheck {
    let n = q.order();
    let noncommuting_pair = (0..n)
        .find_map(|a| (a + 1..n).find(|&b| q.mul(a, b) != q.mul(b, a)).map(|b| (a, b)));
    let moufang_violation = (0..n).into_par_iter().find_map_first(|x| {
        let xx = q.mul(x, x);
        for y in 0..n {
            let xy = q.mul(x, y);
            for z in 0..n {
                if q.mul(xx, q.mul(y, z)) != q.mul(xy, q.mul(x, z)) {
                    return Some((x, y, z));
                }
            }
        }
        None
    });
    CmlCheck {
        noncommuting_pair,
        moufang_violation,
    }
}

/// Tuning for [`check_identities`].
#[derive(Debug, Clone)]
pub struct IdentityOptions {
    /// Exponents `p, r, s` tried in `(x^p, y^r, z^s) = (x,y,z)^{prs}`.
    pub exponent_grid: Vec<i64>,
    /// The four-variable expansion identity is scanned exhaustively when `n⁴` is at most this.
    pub expansion_budget: u64,
    /// Number of uniformly random quadruples otherwise.
    pub expansion_samples: u64,
    pub seed: u64,
    /// Forces the exhaustive four-variable scan regardless of the budget.
    pub exhaustive: bool,
}

impl Default for IdentityOptions {
    fn default() -> Self {
        IdentityOptions {
            exponent_grid: vec![-2, -1, 0, 1, 2, 3],
            expansion_budget: 40u64.pow(4),
            expansion_samples: 100_000,
            seed: crate::DEFAULT_SEED,
            exhaustive: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IdentityCheck {
    pub name: &'static str,
    pub formula: &'static str,
    pub passed: bool,
    /// Number of tuples examined.
    pub cases: u64,
    pub exhaustive: bool,
    /// First failing tuple (elements, then exponents where relevant).
    pub witness: Option<Vec<i64>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IdentityReport {
    pub checks: Vec<IdentityCheck>,
    pub seed: u64,
}

impl IdentityReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn get(&self, name: &str) -> Option<&IdentityCheck> {
        self.checks.iter().find(|c| c.name == name)
    }
}

pub const INNER_MAPPING: &str = "inner_mapping";
pub const ASSOCIATOR_POWERS: &str = "associator_powers";
pub const ASSOCIATOR_CUBED: &str = "associator_cubed";
pub const ASSOCIATOR_EXPANSION: &str = "associator_expansion";

/// Checks the associator identities of a CML:
///
/// * `inner_mapping`: `L(x,y)z = z·(z,y,x)`, all triples;
/// * `associator_powers`: `(x^p, y^r, z^s) = (x,y,z)^{prs}` over the exponent grid, all triples;
/// * `associator_cubed`: `(x,y,z)³ = e`, all triples;
/// * `associator_expansion`: `(xy,u,v) = (x,u,v)·((x,u,v),x,y)·(y,u,v)·((y,u,v),y,x)`
///   (left-normed), exhaustive or sampled per [`IdentityOptions`].
pub fn check_identities(q: &CayleyLoop, opts: &IdentityOptions) -> IdentityReport {
    IdentityReport {
        checks: vec![
            check_inner_mapping(q),
            check_associator_powers(q, &opts.exponent_grid),
            check_associator_cubed(q),
            check_associator_expansion(q, opts),
        ],
        seed: opts.seed,
    }
}

fn scan_triples<F>(q: &CayleyLoop, violates: F) -> Option<Vec<i64>>
where
    F: Fn(usize, usize, usize) -> bool + Sync,
{
    let n = q.order();
    (0..n).into_par_iter().find_map_first(|x| {
        for y in 0..n {
            for z in 0..n {
                if violates(x, y, z) {
                    return Some(vec![x as i64, y as i64, z as i64]);
                }
            }
        }
        None
    })
}

fn check_inner_mapping(q: &CayleyLoop) -> IdentityCheck {
    let witness = scan_triples(q, |x, y, z| {
        let lhs = q.inner_apply(x, y, q.mul(x, y), z);
        lhs != q.mul(z, q.associator(z, y, x))
    });
    let n = q.order() as u64;
    IdentityCheck {
        name: INNER_MAPPING,
        formula: "L(x,y)z = z(z,y,x)",
        passed: witness.is_none(),
        cases: n.pow(3),
        exhaustive: true,
        witness,
    }
}

/// `table[(k + offset) * n + x] = x^k` for `k` in `-offset..=offset`.
struct PowerTable {
    n: usize,
    offset: i64,
    table: Vec<u16>,
}

impl PowerTable {
    fn new(q: &CayleyLoop, bound: i64) -> Self {
        let n = q.order();
        let mut table = Vec::with_capacity(n * (2 * bound as usize + 1));
        for k in -bound..=bound {
            table.extend(q.elements().map(|x| q.power(x, k) as u16));
        }
        PowerTable { n, offset: bound, table }
    }

    #[inline]
    fn get(&self, x: usize, k: i64) -> usize {
        self.table[(k + self.offset) as usize * self.n + x] as usize
    }
}

fn check_associator_powers(q: &CayleyLoop, grid: &[i64]) -> IdentityCheck {
    let max_exp = grid.iter().map(|k| k.abs()).max().unwrap_or(0);
    let powers = PowerTable::new(q, max_exp.pow(3).max(1));
    let n = q.order();
    let witness = (0..n).into_par_iter().find_map_first(|x| {
        for y in 0..n {
            for z in 0..n {
                let t = q.associator(x, y, z);
                for &p in grid {
                    for &r in grid {
                        for &s in grid {
                            let lhs = q.associator(powers.get(x, p), powers.get(y, r), powers.get(z, s));
                            if lhs != powers.get(t, p * r * s) {
                                return Some(vec![x as i64, y as i64, z as i64, p, r, s]);
                            }
                        }
                    }
                }
            }
        }
        None
    });
    IdentityCheck {
        name: ASSOCIATOR_POWERS,
        formula: "(x^p,y^r,z^s) = (x,y,z)^(prs)",
        passed: witness.is_none(),
        cases: (n as u64).pow(3) * (grid.len() as u64).pow(3),
        exhaustive: true,
        witness,
    }
}

fn check_associator_cubed(q: &CayleyLoop) -> IdentityCheck {
    let e = q.identity();
    let witness = scan_triples(q, |x, y, z| q.power(q.associator(x, y, z), 3) != e);
    IdentityCheck {
        name: ASSOCIATOR_CUBED,
        formula: "(x,y,z)^3 = 1",
        passed: witness.is_none(),
        cases: (q.order() as u64).pow(3),
        exhaustive: true,
        witness,
    }
}

fn expansion_holds(q: &CayleyLoop, x: usize, y: usize, u: usize, v: usize) -> bool {
    let lhs = q.associator(q.mul(x, y), u, v);
    let xuv = q.associator(x, u, v);
    let yuv = q.associator(y, u, v);
    let rhs = q.mul(
        q.mul(q.mul(xuv, q.associator(xuv, x, y)), yuv),
        q.associator(yuv, y, x),
    );
    lhs == rhs
}

fn check_associator_expansion(q: &CayleyLoop, opts: &IdentityOptions) -> IdentityCheck {
    let n = q.order();
    let total = (n as u64).pow(4);
    let exhaustive = opts.exhaustive || total <= opts.expansion_budget;
    let (cases, witness) = if exhaustive {
        let witness = (0..n).into_par_iter().find_map_first(|x| {
            for y in 0..n {
                for u in 0..n {
                    for v in 0..n {
                        if !expansion_holds(q, x, y, u, v) {
                            return Some(vec![x as i64, y as i64, u as i64, v as i64]);
                        }
                    }
                }
            }
            None
        });
        (total, witness)
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
        let mut witness = None;
        for _ in 0..opts.expansion_samples {
            let [x, y, u, v] = [0; 4].map(|_| rng.gen_range(0..n));
            if !expansion_holds(q, x, y, u, v) {
                witness = Some(vec![x as i64, y as i64, u as i64, v as i64]);
                break;
            }
        }
        (opts.expansion_samples, witness)
    };
    IdentityCheck {
        name: ASSOCIATOR_EXPANSION,
        formula: "(xy,u,v) = (x,u,v)((x,u,v),x,y)(y,u,v)((y,u,v),y,x)",
        passed: witness.is_none(),
        cases,
        exhaustive,
        witness,
    }
}
