//! Structured backend against finite truncations handled by the table code.

use std::collections::BTreeSet;

use cml_core::catalog;
use cml_core::identities;
use cml_core::mincond::{self, Fraction, StructuredCML, StructuredElement};
use cml_core::subloops;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn prufer3_cml81() -> StructuredCML {
    StructuredCML::new(vec![3], catalog::cml81()).unwrap()
}

fn random_element(q: &StructuredCML, rng: &mut ChaCha8Rng, depth: u32) -> StructuredElement {
    let div = q
        .summands()
        .iter()
        .map(|&p| {
            let den = p.pow(rng.gen_range(0..=depth));
            Fraction::new(rng.gen_range(0..den) as i128, den)
        })
        .collect();
    q.element(div, rng.gen_range(0..q.finite_part().order())).unwrap()
}

#[test]
fn truncations_are_cmls_and_products_agree() {
    let q = prufer3_cml81();
    let t = mincond::truncate(&q, 1, 1000).unwrap();
    assert!(identities::is_cml(&t.table).holds());
    let n = t.table.order();
    for x in 0..n {
        for y in 0..n {
            let s = q.mul(&t.embedding[x], &t.embedding[y]);
            assert_eq!(t.index_of(&q, &s), Some(t.table.mul(x, y)));
            assert_eq!(q.mul(&t.embedding[x], &t.embedding[y]), q.mul(&t.embedding[y], &t.embedding[x]));
        }
    }
}

#[test]
fn associators_depend_on_finite_parts_only() {
    let q = prufer3_cml81();
    let t = mincond::truncate(&q, 1, 1000).unwrap();
    let c = q.finite_part();
    let n = t.table.order();
    for x in 0..n {
        for y in 0..n {
            for z in 0..n {
                let a = t.table.associator(x, y, z);
                let (ex, ey, ez) = (&t.embedding[x], &t.embedding[y], &t.embedding[z]);
                assert_eq!(t.embedding[a], q.finite_element(c.associator(ex.fin, ey.fin, ez.fin)));
            }
        }
    }
}

#[test]
fn subgroups_of_prufer_groups_form_a_chain() {
    for p in [2u64, 3, 5] {
        let q = StructuredCML::new(vec![p], catalog::cyclic(1).unwrap()).unwrap();
        let t = mincond::truncate(&q, 5, 10_000).unwrap();
        let layers: Vec<BTreeSet<StructuredElement>> = (0..=5)
            .map(|j| mincond::s_generate(&q, &[q.summand_generator(0, j)], 10_000).unwrap().residual().clone())
            .collect();
        let layer_indices: Vec<BTreeSet<usize>> = layers
            .iter()
            .map(|l| l.iter().map(|a| t.index_of(&q, a).unwrap()).collect())
            .collect();
        // every cyclic subgroup is a layer, so every subgroup (a union of
        // cyclic ones) is the largest layer it contains
        for x in t.table.elements() {
            let mut cyclic = BTreeSet::from([t.table.identity()]);
            let mut y = x;
            while y != t.table.identity() {
                cyclic.insert(y);
                y = t.table.mul(y, x);
            }
            assert!(layer_indices.contains(&cyclic), "p = {p}, x = {x}");
        }
        // direct enumeration where it is cheap
        if p <= 3 {
            let all = subloops::all_subloops(&t.table, 100).unwrap();
            assert_eq!(all.len(), 6, "Z({p}^5)");
            for (h, layer) in all.iter().zip(&layer_indices) {
                assert_eq!(&h.to_vec().into_iter().collect::<BTreeSet<_>>(), layer);
            }
        }
        assert_eq!(mincond::socle(&q, p).residual(), &layers[1]);
    }
}

#[test]
fn finitely_generated_subloops_are_finite() {
    let q = StructuredCML::new(vec![3, 5], catalog::abelian(&[3, 3]).unwrap()).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(cml_core::DEFAULT_SEED);
    for _ in 0..50 {
        let gens: Vec<StructuredElement> = (0..3).map(|_| random_element(&q, &mut rng, 3)).collect();
        let h = mincond::s_generate(&q, &gens, 1_000_000).unwrap();
        assert!(h.is_finite());
        assert!(gens.iter().all(|g| h.contains(g)));
        // the closure is bounded by the truncation at level 3
        assert_eq!(h.truncated_order(&q, 3), h.order().unwrap());
    }
}

#[test]
fn generation_and_normality_agree_with_truncations() {
    let q = prufer3_cml81();
    let t = mincond::truncate(&q, 2, 10_000).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..30 {
        let gens: Vec<StructuredElement> = (0..rng.gen_range(1..=2)).map(|_| random_element(&q, &mut rng, 2)).collect();
        let h = mincond::s_generate(&q, &gens, 100_000).unwrap();
        let idx: Vec<usize> = gens.iter().map(|g| t.index_of(&q, g).unwrap()).collect();
        let table_h = subloops::generate(&t.table, &idx);
        let members: BTreeSet<StructuredElement> = table_h.to_vec().iter().map(|&i| t.embedding[i].clone()).collect();
        assert_eq!(&members, h.residual());
        assert_eq!(mincond::is_normal(&q, &h), subloops::is_normal(&t.table, &table_h).is_ok());
    }
}

#[test]
fn series_partitions_every_truncation() {
    for q in [
        prufer3_cml81(),
        StructuredCML::new(vec![3, 5], catalog::cyclic(9).unwrap()).unwrap(),
        StructuredCML::new(vec![], catalog::builtin("cyclic:2*cml81").unwrap()).unwrap(),
    ] {
        let series = mincond::quasicyclic_factor_series(&q).unwrap();
        for k in 0..4 {
            assert!(mincond::series_partitions(&q, &series, k));
        }
    }
}

#[test]
fn reduced_split_round_trips() {
    let q = StructuredCML::new(vec![3, 5], catalog::cml81()).unwrap();
    let (d, c) = mincond::reduced_split(&q);
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..200 {
        let a = random_element(&q, &mut rng, 3);
        let dp = q.divisible_element(a.div.clone());
        let cp = q.finite_element(a.fin);
        assert!(d.contains(&dp) && c.contains(&cp));
        assert_eq!(q.mul(&dp, &cp), a);
    }
    assert!(c.common_element(&q, &d).unwrap().is_none());
    assert_eq!(mincond::divisible_part(&q, &d), d);
    assert!(mincond::divisible_part(&q, &c).is_trivial());
}

#[test]
fn complements_split_truncations() {
    let q = StructuredCML::new(vec![3, 2], catalog::abelian(&[3, 2]).unwrap()).unwrap();
    // (1/3, 1/2, c) with c of order 6 generates a graph over C
    let b = mincond::s_generate(&q, &[q.element(vec![Fraction::new(1, 3), Fraction::new(1, 2)], 5).unwrap()], 1000)
        .unwrap();
    let k = mincond::divisible_complement(&q, &b).unwrap();
    let check = mincond::verify_complement(&q, &b, &k.subloop, &[0, 1, 2, 3]).unwrap();
    assert!(check.holds(), "{check:?}");
    assert_eq!(check.order, 6);
}
