//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Runs without the libtest harness so every line is printed, whether or not
//! the criterion holds. The process fails if any criterion fails.

use std::collections::{BTreeMap, BTreeSet};
use std::panic::{self, AssertUnwindSafe};
use std::process::Command;
use std::time::{Duration, Instant};

use cml_core::identities::{self, IdentityOptions};
use cml_core::mincond::{self, FactorKind, Fraction, StructuredCML, StructuredSubloop};
use cml_core::perm::is_power_of;
use cml_core::{catalog, multgroup, structure, CayleyLoop, SubloopSet, DEFAULT_SEED};

/// Wall-clock limit for the exhaustive cml81 scan.
const CML81_SCAN_LIMIT: Duration = Duration::from_secs(2);
/// Materialization cap for multiplication groups.
const GROUP_CAP: usize = 10_000_000;
/// Sampled quadruples for the four-variable identity.
const EXPANSION_SAMPLES: u64 = 100_000;
const COGENERATION_TRIALS: usize = 200;
const CHAINS: usize = 100;
const STRUCTURED_CAP: usize = 1_000_000;
const COMPLEMENT_LEVELS: [u32; 3] = [0, 1, 2];

type Verdict = Result<String, String>;
type Criterion = (u32, &'static str, fn() -> Verdict);

fn ensure(ok: bool, msg: impl Into<String>) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn prufer3_cml81() -> StructuredCML {
    StructuredCML::new(vec![3], catalog::cml81()).unwrap()
}

fn prufer3_prufer5_z9() -> StructuredCML {
    StructuredCML::new(vec![3, 5], catalog::cyclic(9).unwrap()).unwrap()
}

fn cml81_exists() -> Verdict {
    let start = Instant::now();
    let q = catalog::cml81();
    let check = identities::is_cml(&q);
    let elapsed = start.elapsed();
    ensure(q.order() == 81, format!("order {}", q.order()))?;
    ensure(check.holds(), format!("{check:?}"))?;
    ensure(q.is_commutative(), "not commutative")?;
    let n = q.order();
    let nonassociative = (0..n).any(|x| (0..n).any(|y| (0..n).any(|z| q.associator(x, y, z) != q.identity())));
    ensure(nonassociative, "every associator is trivial")?;
    ensure(elapsed <= CML81_SCAN_LIMIT, format!("scan took {elapsed:?}"))?;
    Ok(format!("81^3 triples, nontrivial associator, {:.3}s", elapsed.as_secs_f64()))
}

fn identity_suite() -> Verdict {
    let q = catalog::cml81();
    let opts = IdentityOptions { expansion_samples: EXPANSION_SAMPLES, ..IdentityOptions::default() };
    let report = identities::check_identities(&q, &opts);
    for check in &report.checks {
        ensure(check.passed, format!("{} violated at {:?}", check.name, check.witness))?;
    }
    for name in [identities::INNER_MAPPING, identities::ASSOCIATOR_CUBED] {
        let c = report.get(name).unwrap();
        ensure(c.exhaustive && c.cases == 81u64.pow(3), format!("{name} not exhaustive"))?;
    }
    let powers = report.get(identities::ASSOCIATOR_POWERS).unwrap();
    let grid = opts.exponent_grid.len() as u64;
    ensure(powers.cases == 81u64.pow(3) * grid.pow(3), format!("{name} covered {} cases", powers.cases, name = powers.name))?;
    let expansion = report.get(identities::ASSOCIATOR_EXPANSION).unwrap();
    ensure(expansion.cases == EXPANSION_SAMPLES, format!("expansion covered {} cases", expansion.cases))?;
    Ok(format!(
        "{} checks, zero violations, expansion on {} seeded quadruples",
        report.checks.len(),
        expansion.cases
    ))
}

fn cubes_central_and_quotient() -> Verdict {
    let q = catalog::cml81();
    let z = structure::center(&q);
    ensure(q.elements().all(|x| z.contains(q.power(x, 3))), "a cube is not central")?;
    let (g, _) = q.quotient(&z).map_err(|e| e.to_string())?;
    ensure(g.order() == 27, format!("quotient order {}", g.order()))?;
    ensure(g.is_associative() && g.is_commutative(), "quotient is not an abelian group")?;
    ensure(g.exponent() == 3, format!("quotient exponent {}", g.exponent()))?;
    Ok("x^3 central for all 81 x; Q/Z(Q) abelian of order 27, exponent 3".into())
}

fn central_structure() -> Verdict {
    let q = catalog::cml81();
    let series = structure::upper_central_series(&q).map_err(|e| e.to_string())?;
    let center = structure::center(&q).order();
    ensure(center == 3, format!("center order {center}"))?;
    ensure(series.class() == 2, format!("class {}", series.class()))?;
    ensure(series.orders() == vec![1, 3, 81], format!("series {:?}", series.orders()))?;
    Ok("center 3, class 2, series [1, 3, 81]".into())
}

fn primary_decomposition() -> Verdict {
    let q = catalog::builtin("cyclic:2*cyclic:9*cml81").map_err(|e| e.to_string())?;
    let d = structure::p_decomposition(&q).map_err(|e| e.to_string())?;
    ensure(d.orders() == BTreeMap::from([(2, 2), (3, 729)]), format!("orders {:?}", d.orders()))?;
    let z = structure::center(&q);
    ensure(d.components[&2].is_subloop_of(&z), "2-component not central")?;
    let mut hit = BTreeSet::new();
    for a in d.components[&2].to_vec() {
        for b in d.components[&3].to_vec() {
            hit.insert(q.mul(a, b));
        }
    }
    ensure(hit.len() == q.order(), format!("products cover {} of {}", hit.len(), q.order()))?;
    Ok("components {2: 2, 3: 729}, product map bijective, 2-part central".into())
}

fn mult_group_is_3_group() -> Verdict {
    let q = catalog::cml81();
    let report = multgroup::group_report(&q, GROUP_CAP).map_err(|e| e.to_string())?;
    ensure(is_power_of(report.order as u64, 3), format!("|M| = {}", report.order))?;
    ensure(report.is_3_group, "not a 3-group")?;
    ensure(is_power_of(report.derived_order as u64, 3), format!("|M'| = {}", report.derived_order))?;
    ensure(
        is_power_of(report.central_quotient_order as u64, 3),
        format!("|M/Z(M)| = {}", report.central_quotient_order),
    )?;
    ensure(report.census.keys().all(|&k| is_power_of(k, 3)), format!("census {:?}", report.census))?;
    Ok(format!(
        "|M| = {}, |M'| = {}, |M/Z(M)| = {}, census {:?}",
        report.order, report.derived_order, report.central_quotient_order, report.census
    ))
}

fn center_formula() -> Verdict {
    let mut orders = Vec::new();
    for name in ["cyclic:9", "cml81", "cyclic:9*cml81"] {
        let q = catalog::builtin(name).map_err(|e| e.to_string())?;
        let group = multgroup::mult_group(&q, GROUP_CAP).map_err(|e| e.to_string())?;
        let check = multgroup::check_center_formula(&q, &group).map_err(|e| e.to_string())?;
        ensure(check.holds, format!("{name}: {check:?}"))?;
        orders.push(format!("{name}: |Z(M)| = {}", check.group_center_order));
    }
    Ok(orders.join(", "))
}

/// `(D, H)` for the two factors of `left × right`.
fn factors(left: &CayleyLoop, right: &CayleyLoop) -> (CayleyLoop, SubloopSet, SubloopSet) {
    let q = CayleyLoop::direct_product(left, right);
    let (l, r) = CayleyLoop::product_embeddings(left, right);
    let d = SubloopSet::from_elements(&q, l);
    let h = SubloopSet::from_elements(&q, r);
    (q, d, h)
}

fn central_factor() -> Verdict {
    let mut notes = Vec::new();
    for (name, left) in [("Z9 x cml81", catalog::cyclic(9).unwrap()), ("Z2 x cml81", catalog::cyclic(2).unwrap())] {
        let (q, d, h) = factors(&left, &catalog::cml81());
        let check = multgroup::check_central_factor(&q, &d, &h, GROUP_CAP).map_err(|e| format!("{name}: {e}"))?;
        ensure(check.holds(), format!("{name}: {check:?}"))?;
        ensure(check.factor_group_order == left.order(), format!("{name}: |M(D)| = {}", check.factor_group_order))?;
        notes.push(format!("{name}: |M| = {} = {} x {}", check.group_order, check.factor_group_order, check.complement_group_order));
    }
    Ok(notes.join("; "))
}

/// `p^(number of p-summands) · |{c ∈ C : c^p = e}|`.
fn predicted_socle_order(q: &StructuredCML, p: u64) -> usize {
    let c = q.finite_part();
    let divisible = q.summands().iter().filter(|&&s| s == p).count() as u32;
    let finite = c.elements().filter(|&x| c.power(x, p as i64) == c.identity()).count();
    (p as usize).pow(divisible) * finite
}

fn structured_suite() -> Verdict {
    let cases = [
        (
            "Z(3^inf) x cml81",
            prufer3_cml81(),
            vec![FactorKind::Quasicyclic(3), FactorKind::Prime(3), FactorKind::Prime(3), FactorKind::Prime(3), FactorKind::Prime(3)],
        ),
        (
            "Z(3^inf) x Z(5^inf) x Z9",
            prufer3_prufer5_z9(),
            vec![FactorKind::Quasicyclic(3), FactorKind::Quasicyclic(5), FactorKind::Prime(3), FactorKind::Prime(3)],
        ),
    ];
    let mut notes = Vec::new();
    for (name, q, expected_series) in cases {
        for p in mincond::relevant_primes(&q) {
            let socle = mincond::socle(&q, p);
            let predicted = predicted_socle_order(&q, p);
            ensure(socle.order() == Some(predicted), format!("{name}: socle({p}) {:?} vs {predicted}", socle.order()))?;
        }
        let b = mincond::cogenerator_subloop(&q);
        ensure(b.is_finite(), format!("{name}: cogenerator subloop is infinite"))?;
        let trial = mincond::is_cogenerating(&q, &b, COGENERATION_TRIALS, DEFAULT_SEED, STRUCTURED_CAP)
            .map_err(|e| format!("{name}: {e}"))?;
        ensure(trial.holds && trial.trials == COGENERATION_TRIALS, format!("{name}: {trial:?}"))?;

        let series = mincond::quasicyclic_factor_series(&q).map_err(|e| format!("{name}: {e}"))?;
        let tags: Vec<FactorKind> = series.iter().map(|s| s.factor).collect();
        ensure(tags == expected_series, format!("{name}: series {tags:?}"))?;
        let last = &series.last().unwrap().subloop;
        ensure(last.full().len() == q.rank() && last.finite_parts().len() == q.finite_part().order(), format!("{name}: series does not reach Q"))?;
        for k in 0..=3 {
            ensure(mincond::series_partitions(&q, &series, k), format!("{name}: factor orders miss level {k}"))?;
        }

        let mut indices = BTreeMap::new();
        for i in 0..CHAINS {
            let seed = DEFAULT_SEED.wrapping_add(i as u64);
            let chain = mincond::random_descending_chain(&q, seed, STRUCTURED_CAP).map_err(|e| format!("{name}: seed {seed}: {e}"))?;
            let index = mincond::chain_stabilization_index(&chain).map_err(|e| format!("{name}: seed {seed}: {e}"))?;
            *indices.entry(index).or_insert(0) += 1;
        }
        notes.push(format!("{name}: |B| = {}, {} chains stabilized at {:?}", b.order().unwrap(), CHAINS, indices));
    }
    Ok(notes.join("; "))
}

fn complement_case(name: &str, q: &StructuredCML, b: &StructuredSubloop, expected_order: usize) -> Result<String, String> {
    let k = mincond::divisible_complement(q, b).map_err(|e| {
        let obstruction = mincond::complement_obstruction(q, b).ok().flatten();
        format!("{name}: {e} (obstruction {obstruction:?})")
    })?;
    let check = mincond::verify_complement(q, b, &k.subloop, &COMPLEMENT_LEVELS).map_err(|e| format!("{name}: {e}"))?;
    ensure(check.holds(), format!("{name}: {check:?}"))?;
    ensure(check.order == expected_order, format!("{name}: |K| = {}", check.order))?;
    Ok(format!("{name}: |K| = {}", check.order))
}

fn split_and_complements() -> Verdict {
    let q = prufer3_cml81();
    let (d, c) = mincond::reduced_split(&q);
    ensure(c.common_element(&q, &d).map_err(|e| e.to_string())?.is_none(), "D and C meet")?;
    let t = mincond::truncate(&q, 2, STRUCTURED_CAP).map_err(|e| e.to_string())?;
    for a in &t.embedding {
        let dp = q.divisible_element(a.div.clone());
        let cp = q.finite_element(a.fin);
        ensure(d.contains(&dp) && c.contains(&cp) && &q.mul(&dp, &cp) == a, format!("split of {a:?}"))?;
    }

    let mut notes = vec![format!("reduced split round-trips on {} elements", t.embedding.len())];
    let mut failures = Vec::new();

    // B trivial: K = {0} x C
    let trivial = StructuredSubloop::trivial(&q);
    match complement_case("B = 1", &q, &trivial, 81) {
        Ok(n) => notes.push(n),
        Err(e) => failures.push(e),
    }

    // Z(3^inf) x Z3, B = <(1/3, 1)>: K = B
    let small = StructuredCML::new(vec![3], catalog::cyclic(3).unwrap()).unwrap();
    let g = small.element(vec![Fraction::new(1, 3)], 1).unwrap();
    let b = mincond::s_generate(&small, &[g], STRUCTURED_CAP).map_err(|e| e.to_string())?;
    match complement_case("Z(3^inf) x Z3, B = <(1/3, 1)>", &small, &b, 3) {
        Ok(n) => {
            let k = mincond::divisible_complement(&small, &b).unwrap();
            if k.subloop == b {
                notes.push(n)
            } else {
                failures.push("Z(3^inf) x Z3: K differs from B".into())
            }
        }
        Err(e) => failures.push(e),
    }

    // Z(3^inf) x cml81, B = <(1/3, a)> with a central
    let a = structure::center(q.finite_part()).to_vec().into_iter().find(|&x| x != q.finite_part().identity()).unwrap();
    let g = q.element(vec![Fraction::new(1, 3)], a).unwrap();
    let b = mincond::s_generate(&q, &[g], STRUCTURED_CAP).map_err(|e| e.to_string())?;
    match complement_case(&format!("Z(3^inf) x cml81, B = <(1/3, {a})>"), &q, &b, 81) {
        Ok(n) => notes.push(n),
        Err(e) => failures.push(e),
    }

    if failures.is_empty() {
        Ok(notes.join("; "))
    } else {
        Err(format!("{}; passed: {}", failures.join("; "), notes.join("; ")))
    }
}

fn truncation_consistency() -> Verdict {
    let q = prufer3_cml81();
    let t = mincond::truncate(&q, 1, STRUCTURED_CAP).map_err(|e| e.to_string())?;
    ensure(t.table.order() == 243, format!("order {}", t.table.order()))?;
    ensure(identities::is_cml(&t.table).holds(), "truncation is not a CML")?;

    // Z_i(D x C) = D x Z_i(C) with D central
    let c = q.finite_part();
    let d_order = mincond::reduced_split(&q).0.truncated_order(&q, 1);
    let c_series = structure::upper_central_series(c).map_err(|e| e.to_string())?;
    let predicted: Vec<usize> = std::iter::once(1).chain(c_series.orders().into_iter().skip(1).map(|n| d_order * n)).collect();
    let series = structure::upper_central_series(&t.table).map_err(|e| e.to_string())?;
    ensure(series.orders() == predicted, format!("series {:?} vs predicted {predicted:?}", series.orders()))?;

    let z_c = structure::center(c);
    let center: BTreeSet<usize> = structure::center(&t.table).to_vec().into_iter().collect();
    let predicted_center: BTreeSet<usize> = (0..t.table.order()).filter(|&i| z_c.contains(t.embedding[i].fin)).collect();
    ensure(center == predicted_center, "center differs from D x Z(C)")?;
    Ok(format!("order 243, center {}, series {:?}", center.len(), series.orders()))
}

/// The CLI report set compared across runs.
fn cli_suite(seed: u64) -> Result<Vec<u8>, String> {
    let structured = r#"{"summands":[3],"finite_part":{"builtin":"cml81"}}"#;
    let mixed = r#"{"summands":[3,5],"finite_part":{"builtin":"cyclic:9"}}"#;
    let runs: Vec<Vec<&str>> = vec![
        vec!["validate", "--builtin", "cml81"],
        vec!["info", "--builtin", "cyclic:2*cyclic:9*cml81"],
        vec!["check-identities", "--builtin", "cml81"],
        vec!["subloops", "--builtin", "cml81"],
        vec!["cogenerators", "--builtin", "cml81"],
        vec!["multgroup", "--builtin", "cml81"],
        vec!["structured", "--structured", structured],
        vec!["structured", "--structured", mixed],
        vec!["cogenerators", "--structured", mixed],
        vec!["truncate", "--structured", structured, "--level", "1"],
        vec!["complement", "--structured", structured],
        vec!["chain-test", "--structured", mixed],
    ];
    let seed = seed.to_string();
    let mut bytes = Vec::new();
    for args in runs {
        let out = Command::new(env!("CARGO_BIN_EXE_cml"))
            .args(["--json", "--seed", &seed])
            .args(&args)
            .output()
            .map_err(|e| e.to_string())?;
        if !out.status.success() {
            return Err(format!("{args:?} exited with {:?}: {}", out.status.code(), String::from_utf8_lossy(&out.stderr)));
        }
        bytes.extend_from_slice(&out.stdout);
    }
    Ok(bytes)
}

fn determinism() -> Verdict {
    let first = cli_suite(DEFAULT_SEED)?;
    let second = cli_suite(DEFAULT_SEED)?;
    ensure(first == second, "reports differ between runs")?;
    let text = String::from_utf8(first).map_err(|e| e.to_string())?;
    ensure(text.contains(&format!("\"seed\": {DEFAULT_SEED}")), "seed missing from reports")?;
    Ok(format!("{} bytes of JSON identical across two runs", text.len()))
}

fn main() {
    let criteria: [Criterion; 12] = [
        (1, "cml81 is a nonassociative CML", cml81_exists),
        (2, "associator identity suite", identity_suite),
        (3, "cubes are central, central quotient", cubes_central_and_quotient),
        (4, "center and upper central series", central_structure),
        (5, "primary decomposition", primary_decomposition),
        (6, "multiplication group is a 3-group", mult_group_is_3_group),
        (7, "center of the multiplication group", center_formula),
        (8, "central direct factor", central_factor),
        (9, "structured suite", structured_suite),
        (10, "divisible part and complements", split_and_complements),
        (11, "truncation matches structured prediction", truncation_consistency),
        (12, "deterministic reports", determinism),
    ];
    let mut failed = Vec::new();
    for (n, name, run) in criteria {
        let start = Instant::now();
        let verdict = panic::catch_unwind(AssertUnwindSafe(run))
            .unwrap_or_else(|p| Err(p.downcast_ref::<String>().cloned().unwrap_or_else(|| "panicked".into())));
        let secs = start.elapsed().as_secs_f64();
        match verdict {
            Ok(detail) => println!("PASS criterion {n:>2} ({name}) [{secs:.2}s]: {detail}"),
            Err(detail) => {
                println!("FAIL criterion {n:>2} ({name}) [{secs:.2}s]: {detail}");
                failed.push(n);
            }
        }
    }
    if !failed.is_empty() {
        println!("acceptance: {} of 12 criteria failed: {failed:?}", failed.len());
        std::process::exit(1);
    }
    println!("acceptance: all 12 criteria passed");
}
