//! Built-in loops.
//!
//! Names accepted by [`builtin`]:
//!
//! * `cyclic:n` — the cyclic group of order `n`;
//! * `abelian:a,b,...` — `Z_a × Z_b × ...`;
//! * `cml81` — the nonassociative commutative Moufang loop of order 81;
//! * `loop5` — a noncommutative, non-Moufang loop of order 5;
//! * `A*B*...` — the direct product of any of the above.

use crate::error::{Error, Result};
use crate::loops::CayleyLoop;

/// One catalog entry: the name pattern and a short description.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CatalogEntry {
    pub name: &'static str,
    pub description: &'static str,
}

pub fn catalog() -> Vec<CatalogEntry> {
    vec![
        CatalogEntry { name: "abelian:a,b,...", description: "direct product of cyclic groups Z_a x Z_b x ..." },
        CatalogEntry { name: "cml81", description: "nonassociative commutative Moufang loop of order 81 on Z_3^4" },
        CatalogEntry { name: "cyclic:n", description: "cyclic group Z_n" },
        CatalogEntry { name: "loop5", description: "noncommutative loop of order 5 failing the Moufang identity" },
        CatalogEntry { name: "A*B", description: "direct product of two catalog loops, e.g. cyclic:9*cml81" },
        CatalogEntry {
            name: "structured",
            description: r#"descriptor {"summands":[3,5],"finite_part":{"builtin":"cml81"}} for D x C with D a sum of quasicyclic groups"#,
        },
    ]
}

/// Resolves a catalog name (see the module docs).
pub fn builtin(name: &str) -> Result<CayleyLoop> {
    let name = name.trim();
    if name.contains('*') {
        let mut parts = name.split('*').map(builtin);
        let first = parts.next().expect("split yields at least one part")?;
        return parts.try_fold(first, |acc, next| {
            let next = next?;
            let order = acc.order() * next.order();
            if order > crate::loops::MAX_ORDER {
                return Err(Error::TooLarge(order));
            }
            Ok(CayleyLoop::direct_product(&acc, &next))
        })
        .map(|q| q.with_name(name));
    }
    let (head, params) = match name.split_once(':') {
        Some((h, p)) => (h, Some(p)),
        None => (name, None),
    };
    match (head, params) {
        ("cyclic", Some(p)) => cyclic(parse_positive(p)?),
        ("abelian", Some(p)) => {
            let factors = p.split(',').map(parse_positive).collect::<Result<Vec<_>>>()?;
            abelian(&factors)
        }
        ("cml81", None) => Ok(cml81()),
        ("loop5", None) => Ok(loop5()),
        _ => Err(Error::UnknownName(name.to_string())),
    }
}

fn parse_positive(s: &str) -> Result<usize> {
    match s.trim().parse::<usize>() {
        Ok(n) if n > 0 => Ok(n),
        _ => Err(Error::InvalidParams(format!("`{s}` is not a positive integer"))),
    }
}

pub fn cyclic(n: usize) -> Result<CayleyLoop> {
    if n == 0 {
        return Err(Error::InvalidParams("cyclic order must be positive".into()));
    }
    // abelian groups are CMLs; no scan needed
    Ok(CayleyLoop::from_fn(n, |a, b| (a + b) % n)?
        .with_name(format!("cyclic:{n}"))
        .assume_cml())
}

/// `Z_{f1} × Z_{f2} × ...`, indexed in mixed radix with the first factor most significant.
pub fn abelian(factors: &[usize]) -> Result<CayleyLoop> {
    if factors.is_empty() || factors.contains(&0) {
        return Err(Error::InvalidParams("invariant factors must be positive".into()));
    }
    let n: usize = factors.iter().product();
    if n > crate::loops::MAX_ORDER {
        return Err(Error::TooLarge(n));
    }
    let digits = |mut x: usize| {
        let mut d = vec![0; factors.len()];
        for (i, &f) in factors.iter().enumerate().rev() {
            d[i] = x % f;
            x /= f;
        }
        d
    };
    let q = CayleyLoop::from_fn(n, |a, b| {
        let (da, db) = (digits(a), digits(b));
        factors
            .iter()
            .enumerate()
            .fold(0, |acc, (i, &f)| acc * f + (da[i] + db[i]) % f)
    })?;
    let name = factors.iter().map(|f| f.to_string()).collect::<Vec<_>>().join(",");
    Ok(q.with_name(format!("abelian:{name}")).assume_cml())
}

/// Coordinates `(x1, x2, x3, w)` of an element of [`cml81`]; index is `27·x1 + 9·x2 + 3·x3 + w`.
pub fn cml81_coordinates(index: usize) -> [usize; 4] {
    [index / 27, (index / 9) % 3, (index / 3) % 3, index % 3]
}

pub fn cml81_index(coords: [usize; 4]) -> usize {
    27 * (coords[0] % 3) + 9 * (coords[1] % 3) + 3 * (coords[2] % 3) + coords[3] % 3
}

/// The product on `Z_3^4` with twisting term `s0·(x1 + s1·y1)(x2·y3 + s2·x3·y2)`
/// in the last coordinate, for signs `s = [s0, s1, s2]` in `{1, 2} = {+1, -1}`.
pub fn cml81_product(signs: [usize; 3], a: usize, b: usize) -> usize {
    let [x1, x2, x3, w] = cml81_coordinates(a);
    let [y1, y2, y3, v] = cml81_coordinates(b);
    let [s0, s1, s2] = signs;
    let twist = s0 * ((x1 + s1 * y1) % 3) * ((x2 * y3 + s2 * x3 * y2) % 3);
    cml81_index([x1 + y1, x2 + y2, x3 + y3, w + v + twist])
}

/// Sign choice `(x1 − y1)(x2·y3 − x3·y2)`.
pub const CML81_SIGNS: [usize; 3] = [1, 2, 2];

/// The nonassociative commutative Moufang loop of order 81.
///
/// Elements are `(x1, x2, x3, w) ∈ Z_3^4` with
/// `(x, w)(y, v) = (x + y, w + v + (x1 − y1)(x2·y3 − x3·y2))`.
/// The table is checked exhaustively for the Moufang identity when built;
/// should the primary sign choice fail, the remaining sign variants of the
/// twisting term are tried in a fixed order.
pub fn cml81() -> CayleyLoop {
    let mut variants = vec![CML81_SIGNS];
    for s0 in [1, 2] {
        for s1 in [1, 2] {
            for s2 in [1, 2] {
                if [s0, s1, s2] != CML81_SIGNS {
                    variants.push([s0, s1, s2]);
                }
            }
        }
    }
    for signs in variants {
        let Ok(q) = CayleyLoop::from_fn(81, |a, b| cml81_product(signs, a, b)) else {
            continue;
        };
        let mut q = q.with_name("cml81");
        if q.certify_cml() && !q.is_associative() {
            return q;
        }
    }
    panic!("no sign variant of the order-81 construction is a nonassociative CML");
}

/// A noncommutative loop of order 5 that fails `x²·yz = xy·xz`.
pub fn loop5() -> CayleyLoop {
    let rows = [
        vec![0, 1, 2, 3, 4],
        vec![1, 0, 3, 4, 2],
        vec![2, 4, 0, 1, 3],
        vec![3, 2, 4, 0, 1],
        vec![4, 3, 1, 2, 0],
    ];
    CayleyLoop::from_rows(&rows).expect("valid Latin square").with_name("loop5")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cyclic_and_abelian() {
        let z3 = builtin("cyclic:3").unwrap();
        assert_eq!(z3.order(), 3);
        assert!(z3.is_certified_cml());
        let a = builtin("abelian:3,9").unwrap();
        assert_eq!(a.order(), 27);
        assert!(a.is_commutative() && a.is_associative());
        assert_eq!(a.exponent(), 9);
        assert_eq!(a.name(), Some("abelian:3,9"));
        // the assumed flag agrees with the exhaustive scan
        assert!(crate::identities::is_cml(&a).holds());
        assert!(crate::identities::is_cml(&cyclic(12).unwrap()).holds());
    }

    #[test]
    fn products_and_errors() {
        let q = builtin("cyclic:2*cyclic:9").unwrap();
        assert_eq!(q.order(), 18);
        assert!(q.is_certified_cml());
        assert_eq!(builtin("nope"), Err(Error::UnknownName("nope".into())));
        assert!(matches!(builtin("cyclic:0"), Err(Error::InvalidParams(_))));
        assert!(matches!(builtin("abelian:3,x"), Err(Error::InvalidParams(_))));
        assert!(matches!(builtin("cml81*cml81*cml81"), Err(Error::TooLarge(_))));
    }

    #[test]
    fn cml81_uses_primary_signs() {
        let q = cml81();
        assert_eq!(q.order(), 81);
        assert_eq!(q.identity(), 0);
        assert!(q.is_certified_cml());
        for a in q.elements() {
            for b in q.elements() {
                assert_eq!(q.mul(a, b), cml81_product(CML81_SIGNS, a, b));
            }
        }
    }

    #[test]
    fn catalog_lists_required_names() {
        let names: Vec<_> = catalog().into_iter().map(|e| e.name).collect();
        assert!(names.contains(&"cml81"));
        assert!(names.contains(&"cyclic:n"));
        assert!(names.contains(&"structured"));
    }
}
