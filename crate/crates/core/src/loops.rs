//! Finite loops as Cayley tables.
//!
//! Elements are dense indices `0..n`. Besides the multiplication table a
//! validated [`CayleyLoop`] caches its left-division table and inverses, so
//! the associator and inner mappings are plain lookups.

use std::fmt::Write as _;

use crate::error::{Error, Line, Result};
use crate::perm::Perm;
use crate::set::ElementSet;
use crate::subloops::{self, SubloopSet};

/// Largest supported order; element indices are stored as `u16`.
pub const MAX_ORDER: usize = 1 << 16;

#[derive(Clone, PartialEq, Eq)]
pub struct CayleyLoop {
    n: usize,
    table: Vec<u16>,
    ldiv: Vec<u16>,
    inv: Vec<u16>,
    identity: usize,
    name: Option<String>,
    cml: bool,
}

impl std::fmt::Debug for CayleyLoop {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("CayleyLoop")
            .field("name", &self.name)
            .field("order", &self.n)
            .field("identity", &self.identity)
            .field("cml", &self.cml)
            .finish()
    }
}

impl CayleyLoop {
    /// Validates a square table: entries in range, Latin rows and columns,
    /// and a two-sided identity.
    pub fn from_rows(rows: &[Vec<usize>]) -> Result<CayleyLoop> {
        let n = rows.len();
        if n == 0 {
            return Err(Error::Empty);
        }
        if n > MAX_ORDER {
            return Err(Error::TooLarge(n));
        }
        let mut table = Vec::with_capacity(n * n);
        for (r, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(Error::NotSquare { row: r, len: row.len(), expected: n });
            }
            for (c, &v) in row.iter().enumerate() {
                if v >= n {
                    return Err(Error::EntryOutOfRange { row: r, col: c, value: v, n });
                }
                table.push(v as u16);
            }
        }
        Self::from_flat(n, table)
    }

    /// Builds and validates the table `f(a, b)`.
    pub fn from_fn<F: Fn(usize, usize) -> usize>(n: usize, f: F) -> Result<CayleyLoop> {
        if n == 0 {
            return Err(Error::Empty);
        }
        if n > MAX_ORDER {
            return Err(Error::TooLarge(n));
        }
        let mut table = Vec::with_capacity(n * n);
        for a in 0..n {
            for b in 0..n {
                let v = f(a, b);
                if v >= n {
                    return Err(Error::EntryOutOfRange { row: a, col: b, value: v, n });
                }
                table.push(v as u16);
            }
        }
        Self::from_flat(n, table)
    }

    fn from_flat(n: usize, table: Vec<u16>) -> Result<CayleyLoop> {
        let mut seen = vec![u32::MAX; n];
        for r in 0..n {
            for c in 0..n {
                let v = table[r * n + c] as usize;
                if seen[v] == r as u32 {
                    return Err(Error::NotLatinSquare(Line::Row(r)));
                }
                seen[v] = r as u32;
            }
        }
        seen.fill(u32::MAX);
        for c in 0..n {
            for r in 0..n {
                let v = table[r * n + c] as usize;
                if seen[v] == c as u32 {
                    return Err(Error::NotLatinSquare(Line::Column(c)));
                }
                seen[v] = c as u32;
            }
        }
        let identity = (0..n)
            .find(|&e| (0..n).all(|x| table[e * n + x] as usize == x && table[x * n + e] as usize == x))
            .ok_or(Error::NoIdentity)?;

        let mut ldiv = vec![0u16; n * n];
        for a in 0..n {
            for x in 0..n {
                let b = table[a * n + x] as usize;
                ldiv[a * n + b] = x as u16;
            }
        }
        let inv = (0..n).map(|a| ldiv[a * n + identity]).collect();
        Ok(CayleyLoop {
            n,
            table,
            ldiv,
            inv,
            identity,
            name: None,
            cml: false,
        })
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = Some(name.into());
        self
    }

    pub fn name(&self) -> Option<&str> {
        self.name.as_deref()
    }

    pub fn order(&self) -> usize {
        self.n
    }

    pub fn identity(&self) -> usize {
        self.identity
    }

    /// Whether the loop has been verified to be a commutative Moufang loop.
    pub fn is_certified_cml(&self) -> bool {
        self.cml
    }

    /// Runs the exhaustive commutative-Moufang check and records the outcome.
    pub fn certify_cml(&mut self) -> bool {
        self.cml = crate::identities::is_cml(self).holds();
        self.cml
    }

    /// Records the CML property for tables that have it by construction
    /// (abelian groups), skipping the cubic scan.
    pub(crate) fn assume_cml(mut self) -> Self {
        self.cml = true;
        self
    }

    pub fn elements(&self) -> std::ops::Range<usize> {
        0..self.n
    }

    pub fn rows(&self) -> Vec<Vec<usize>> {
        (0..self.n)
            .map(|a| (0..self.n).map(|b| self.mul(a, b)).collect())
            .collect()
    }

    #[inline]
    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.table[a * self.n + b] as usize
    }

    /// The unique `x` with `a·x = b`.
    #[inline]
    pub fn left_divide(&self, a: usize, b: usize) -> usize {
        self.ldiv[a * self.n + b] as usize
    }

    /// Right inverse `a\e`; two-sided in every loop with the inverse property.
    #[inline]
    pub fn inverse(&self, a: usize) -> usize {
        self.inv[a] as usize
    }

    pub fn is_commutative(&self) -> bool {
        (0..self.n).all(|a| (a + 1..self.n).all(|b| self.mul(a, b) == self.mul(b, a)))
    }

    pub fn is_associative(&self) -> bool {
        self.first_nonassociative_triple().is_none()
    }

    pub fn first_nonassociative_triple(&self) -> Option<(usize, usize, usize)> {
        for a in 0..self.n {
            for b in 0..self.n {
                let ab = self.mul(a, b);
                for c in 0..self.n {
                    if self.mul(ab, c) != self.mul(a, self.mul(b, c)) {
                        return Some((a, b, c));
                    }
                }
            }
        }
        None
    }

    /// `(a,b,c)`, defined by `ab·c = (a·bc)·(a,b,c)`.
    #[inline]
    pub fn associator(&self, a: usize, b: usize, c: usize) -> usize {
        let left = self.mul(a, self.mul(b, c));
        let right = self.mul(self.mul(a, b), c);
        self.left_divide(left, right)
    }

    /// Left-normed power `((a·a)·a)…`; negative exponents use the inverse.
    pub fn power(&self, a: usize, k: i64) -> usize {
        let (base, k) = if k < 0 { (self.inverse(a), k.unsigned_abs()) } else { (a, k as u64) };
        // left-normed powers are the orbit of e under right translation by `base`
        let period = self.right_power_period(base);
        let mut acc = self.identity;
        for _ in 0..(k % period) {
            acc = self.mul(acc, base);
        }
        acc
    }

    /// Right-normed power `a·(a·(a…))`.
    pub fn power_right(&self, a: usize, k: i64) -> usize {
        let (base, k) = if k < 0 { (self.inverse(a), k.unsigned_abs()) } else { (a, k as u64) };
        let mut period = 1u64;
        let mut x = base;
        while x != self.identity {
            x = self.mul(base, x);
            period += 1;
        }
        let mut acc = self.identity;
        for _ in 0..(k % period) {
            acc = self.mul(base, acc);
        }
        acc
    }

    fn right_power_period(&self, a: usize) -> u64 {
        let mut period = 1u64;
        let mut x = a;
        while x != self.identity {
            x = self.mul(x, a);
            period += 1;
        }
        period
    }

    /// Least `m > 0` with `a^m = e` (left-normed).
    pub fn order_of(&self, a: usize) -> u64 {
        self.right_power_period(a)
    }

    /// Largest element order.
    pub fn exponent(&self) -> u64 {
        (0..self.n).fold(1, |acc, a| num_integer::lcm(acc, self.order_of(a)))
    }

    /// `L(x): z ↦ x·z`.
    pub fn translation(&self, x: usize) -> Perm {
        Perm::from_raw(self.table[x * self.n..(x + 1) * self.n].into())
    }

    /// `L(x,y) = L(xy)⁻¹ L(x) L(y)`, i.e. `z ↦ (xy)\(x·(y·z))`.
    pub fn inner_mapping(&self, x: usize, y: usize) -> Perm {
        let xy = self.mul(x, y);
        Perm::from_raw(
            (0..self.n)
                .map(|z| self.inner_apply(x, y, xy, z) as u16)
                .collect(),
        )
    }

    /// `L(x,y)z` with `xy` precomputed.
    #[inline]
    pub(crate) fn inner_apply(&self, x: usize, y: usize, xy: usize, z: usize) -> usize {
        self.left_divide(xy, self.mul(x, self.mul(y, z)))
    }

    /// Componentwise product; element `(a, b)` has index `a·|right| + b`.
    pub fn direct_product(left: &CayleyLoop, right: &CayleyLoop) -> CayleyLoop {
        let m = right.n;
        let n = left.n * m;
        assert!(n <= MAX_ORDER, "direct product of order {n} is too large");
        let mut table = Vec::with_capacity(n * n);
        for x in 0..n {
            for y in 0..n {
                let v = left.mul(x / m, y / m) * m + right.mul(x % m, y % m);
                table.push(v as u16);
            }
        }
        let mut product = Self::from_flat(n, table).expect("product of loops is a loop");
        product.cml = left.cml && right.cml;
        product.name = match (&left.name, &right.name) {
            (Some(a), Some(b)) => Some(format!("{a}*{b}")),
            _ => None,
        };
        product
    }

    /// Images of the two factors inside `direct_product(left, right)`.
    pub fn product_embeddings(left: &CayleyLoop, right: &CayleyLoop) -> (Vec<usize>, Vec<usize>) {
        let m = right.n;
        (
            (0..left.n).map(|a| a * m + right.identity).collect(),
            (0..m).map(|b| left.identity * m + b).collect(),
        )
    }

    /// The quotient by a normal subloop, with the projection `x ↦ xH`.
    ///
    /// Normality is checked first; well-definedness of coset multiplication
    /// is then verified over all pairs of elements.
    pub fn quotient(&self, normal: &SubloopSet) -> Result<(CayleyLoop, Vec<usize>)> {
        if let Err(w) = subloops::is_normal(self, normal) {
            return Err(Error::NotNormal(format!(
                "L({}, {}) maps {} outside the subloop",
                w.x, w.y, w.h
            )));
        }
        let members = normal.members();
        let mut class = vec![usize::MAX; self.n];
        let mut reps = Vec::new();
        for x in 0..self.n {
            if class[x] != usize::MAX {
                continue;
            }
            let id = reps.len();
            reps.push(x);
            for h in members.iter() {
                let y = self.mul(x, h);
                if class[y] != usize::MAX && class[y] != id {
                    return Err(Error::NotNormal(format!("cosets of {x} and {y} overlap")));
                }
                class[y] = id;
            }
        }
        let m = reps.len();
        let mut table = Vec::with_capacity(m * m);
        for &a in &reps {
            for &b in &reps {
                table.push(class[self.mul(a, b)] as u16);
            }
        }
        for x in 0..self.n {
            for y in 0..self.n {
                let expected = table[class[x] * m + class[y]] as usize;
                if class[self.mul(x, y)] != expected {
                    return Err(Error::NotNormal(format!(
                        "coset product of {x} and {y} is not well defined"
                    )));
                }
            }
        }
        let mut q = Self::from_flat(m, table)?;
        q.cml = self.cml;
        Ok((q, class))
    }

    /// The subloop on `members` as a loop in its own right, with the
    /// inclusion map (new index ↦ old index).
    pub fn restrict(&self, members: &ElementSet) -> Result<(CayleyLoop, Vec<usize>)> {
        let elems: Vec<usize> = members.iter().collect();
        let mut index = vec![usize::MAX; self.n];
        for (i, &x) in elems.iter().enumerate() {
            index[x] = i;
        }
        let m = elems.len();
        let mut table = Vec::with_capacity(m * m);
        for &a in &elems {
            for &b in &elems {
                let c = index[self.mul(a, b)];
                if c == usize::MAX {
                    return Err(Error::InvalidParams(format!(
                        "{a}·{b} leaves the given subset"
                    )));
                }
                table.push(c as u16);
            }
        }
        let mut sub = Self::from_flat(m, table)?;
        sub.cml = self.cml;
        Ok((sub, elems))
    }

    /// Parses the text format: optional `# name: ...` header, the order `n`,
    /// then `n` rows of `n` whitespace-separated indices.
    pub fn parse(text: &str) -> Result<CayleyLoop> {
        let mut name = None;
        let mut numbers = Vec::new();
        for line in text.lines() {
            let line = line.trim();
            if let Some(comment) = line.strip_prefix('#') {
                if let Some(n) = comment.trim().strip_prefix("name:") {
                    name = Some(n.trim().to_string());
                }
                continue;
            }
            if line.is_empty() {
                continue;
            }
            numbers.push(
                line.split_whitespace()
                    .map(|t| t.parse::<usize>().map_err(|e| Error::Parse(format!("`{t}`: {e}"))))
                    .collect::<Result<Vec<_>>>()?,
            );
        }
        let header = numbers.first().ok_or_else(|| Error::Parse("missing order line".into()))?;
        if header.len() != 1 {
            return Err(Error::Parse("first line must hold the order n".into()));
        }
        let n = header[0];
        let rows = &numbers[1..];
        if rows.len() != n {
            return Err(Error::Parse(format!("expected {n} rows, found {}", rows.len())));
        }
        let mut q = Self::from_rows(rows)?;
        q.name = name;
        Ok(q)
    }

    /// Inverse of [`CayleyLoop::parse`]; output parses back to an equal loop.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        if let Some(name) = &self.name {
            writeln!(out, "# name: {name}").unwrap();
        }
        writeln!(out, "{}", self.n).unwrap();
        for a in 0..self.n {
            let row: Vec<String> = (0..self.n).map(|b| self.mul(a, b).to_string()).collect();
            writeln!(out, "{}", row.join(" ")).unwrap();
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;

    fn z(n: usize) -> CayleyLoop {
        catalog::cyclic(n).unwrap()
    }

    #[test]
    fn validates_cyclic_group() {
        let q = CayleyLoop::from_rows(&[vec![0, 1, 2], vec![1, 2, 0], vec![2, 0, 1]]).unwrap();
        assert_eq!(q.order(), 3);
        assert_eq!(q.identity(), 0);
        assert_eq!(q.mul(1, 2), 0);
    }

    #[test]
    fn identity_need_not_be_zero() {
        let q = CayleyLoop::from_fn(3, |a, b| (a + b + 2) % 3).unwrap();
        assert_eq!(q.identity(), 1);
    }

    #[test]
    fn rejects_bad_tables() {
        assert_eq!(
            CayleyLoop::from_rows(&[vec![0, 0], vec![1, 0]]),
            Err(Error::NotLatinSquare(Line::Row(0)))
        );
        assert_eq!(
            CayleyLoop::from_rows(&[vec![0, 1], vec![0, 1]]),
            Err(Error::NotLatinSquare(Line::Column(0)))
        );
        // x·y = −x − y mod 3 is Latin but has no identity
        assert_eq!(
            CayleyLoop::from_rows(&[vec![0, 2, 1], vec![2, 1, 0], vec![1, 0, 2]]),
            Err(Error::NoIdentity)
        );
        assert!(matches!(
            CayleyLoop::from_rows(&[vec![0, 1], vec![1]]),
            Err(Error::NotSquare { .. })
        ));
        assert!(matches!(
            CayleyLoop::from_rows(&[vec![0, 2], vec![1, 0]]),
            Err(Error::EntryOutOfRange { value: 2, .. })
        ));
        assert_eq!(CayleyLoop::from_rows(&[]), Err(Error::Empty));
    }

    #[test]
    fn division_inverse_power() {
        let q = z(9);
        assert_eq!(q.inverse(4), 5);
        assert_eq!(q.left_divide(4, 4), q.identity());
        assert_eq!(q.power(2, 5), 1);
        assert_eq!(q.power(2, 0), 0);
        assert_eq!(q.power(2, -1), 7);
        assert_eq!(q.power(2, 9_000_001), 2);
        assert_eq!(q.order_of(3), 3);
        assert_eq!(q.order_of(0), 1);
        assert_eq!(q.exponent(), 9);
    }

    #[test]
    fn translations_and_inner_mappings() {
        let q = z(5);
        assert!(q.translation(q.identity()).is_identity());
        assert_eq!(q.translation(2).apply(4), 1);
        for x in q.elements() {
            for y in q.elements() {
                assert!(q.inner_mapping(x, y).is_identity());
            }
        }
    }

    #[test]
    fn direct_product_and_quotient() {
        let p = CayleyLoop::direct_product(&z(3), &z(3));
        assert_eq!(p.order(), 9);
        assert!(p.is_commutative() && p.is_associative());
        let h = SubloopSet::from_elements(&z(9), [0, 3, 6]);
        let (quo, proj) = z(9).quotient(&h).unwrap();
        assert_eq!(quo.order(), 3);
        assert_eq!(proj[4], proj[1]);
        assert_eq!(quo.order_of(proj[1]), 3);
    }

    #[test]
    fn quotient_rejects_non_normal() {
        // S3 as a Cayley table: the order-2 subgroup {id, (01)} is not normal.
        let perms: Vec<Vec<usize>> = vec![
            vec![0, 1, 2],
            vec![1, 0, 2],
            vec![0, 2, 1],
            vec![2, 1, 0],
            vec![1, 2, 0],
            vec![2, 0, 1],
        ];
        let idx = |p: &Vec<usize>| perms.iter().position(|q| q == p).unwrap();
        let s3 = CayleyLoop::from_fn(6, |a, b| {
            let c: Vec<usize> = (0..3).map(|x| perms[a][perms[b][x]]).collect();
            idx(&c)
        })
        .unwrap();
        let h = SubloopSet::from_elements(&s3, [0, 1]);
        assert!(matches!(s3.quotient(&h), Err(Error::NotNormal(_))));
    }

    #[test]
    fn text_round_trip() {
        let text = "# name: Z3\n3\n0 1 2\n1 2 0\n2 0 1\n";
        let q = CayleyLoop::parse(text).unwrap();
        assert_eq!(q.name(), Some("Z3"));
        assert_eq!(q.to_text(), text);
        let bare = "2\n0 1\n1 0\n";
        assert_eq!(CayleyLoop::parse(bare).unwrap().to_text(), bare);
        assert!(matches!(CayleyLoop::parse("3\n0 1 2\n"), Err(Error::Parse(_))));
        assert!(matches!(CayleyLoop::parse("2\n0 x\n1 0\n"), Err(Error::Parse(_))));
    }
}
