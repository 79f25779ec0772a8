use std::collections::BTreeMap;

use cml_core::identities::{self, IdentityOptions};
use cml_core::mincond::{self, ElementDescriptor, Height, StructuredCML, SubloopDescriptor};
use cml_core::perm::{is_power_of, DEFAULT_GROUP_CAP};
use cml_core::subloops::{self, DEFAULT_SUBLOOP_CAP};
use cml_core::{catalog, multgroup, structure, CayleyLoop, Error, SubloopSet};
use serde_json::{json, Value};

use crate::{json_argument, Cli, Command, Failure, Loaded, Outcome};

/// Default cap for structured closures and truncations.
const STRUCTURED_CAP: usize = 1_000_000;
/// Truncation levels used by structured checks.
const LEVELS: [u32; 3] = [0, 1, 2];

pub(crate) fn dispatch(cli: &Cli) -> Result<Outcome, Failure> {
    match &cli.command {
        Command::Validate(input) => validate(&input.finite()?),
        Command::Info(input) => info(&input.finite()?),
        Command::CheckIdentities(input) => check_identities(cli, &input.finite()?),
        Command::Center(input) => {
            let z = structure::center(&input.finite()?);
            Ok(Outcome::new(json!({ "order": z.order(), "elements": z.to_vec() }), false))
        }
        Command::Series(input) => series(&input.finite()?),
        Command::Decompose(input) => {
            let d = structure::p_decomposition(&input.finite()?)?;
            let components: BTreeMap<String, Value> = d
                .components
                .iter()
                .map(|(p, h)| (p.to_string(), json!({ "order": h.order(), "elements": h.to_vec() })))
                .collect();
            Ok(Outcome::new(json!({ "components": components }), false))
        }
        Command::Subloops(input) => subloop_census(cli, &input.finite()?),
        Command::NormalClosure { input, gens } => {
            let q = input.finite()?;
            if let Some(g) = gens.iter().find(|&&g| g >= q.order()) {
                return Err(Failure::Usage(format!("element {g} out of range")));
            }
            let h = subloops::normal_closure(&q, gens);
            let normal = subloops::is_normal(&q, &h).is_ok();
            Ok(Outcome::new(
                json!({ "generators": gens, "order": h.order(), "elements": h.to_vec(), "normal": normal }),
                !normal,
            ))
        }
        Command::Cogenerators { input, trials } => match input.load()? {
            Loaded::Finite(q) => finite_cogenerators(cli, &q),
            Loaded::Structured(q) => structured_cogenerators(cli, &q, *trials),
        },
        Command::Multgroup(input) => mult_group(cli, &input.finite()?),
        Command::Structured(input) => structured(cli, &input.structured()?),
        Command::Truncate { input, level } => truncate(cli, &input.structured()?, *level),
        Command::Complement { input, subloop } => complement(cli, &input.structured()?, subloop.as_deref()),
        Command::ChainTest { input, chains } => chain_test(cli, &input.structured()?, *chains),
        Command::Catalog => {
            let entries: Vec<Value> = catalog::catalog()
                .into_iter()
                .map(|e| json!({ "name": e.name, "description": e.description }))
                .collect();
            let text = catalog::catalog()
                .into_iter()
                .map(|e| format!("{:<18} {}\n", e.name, e.description))
                .collect();
            Ok(Outcome {
                result: json!({ "entries": entries }),
                violated: false,
                text: Some(text),
            })
        }
    }
}

fn validate(q: &CayleyLoop) -> Result<Outcome, Failure> {
    let check = identities::is_cml(q);
    Ok(Outcome::new(
        json!({
            "order": q.order(),
            "identity": q.identity(),
            "commutative": check.noncommuting_pair.is_none(),
            "associative": q.is_associative(),
            "cml": check.holds(),
            "noncommuting_pair": check.noncommuting_pair,
            "moufang_violation": check.moufang_violation,
        }),
        !check.holds(),
    ))
}

fn info(q: &CayleyLoop) -> Result<Outcome, Failure> {
    // builtins and their products are certified when built
    let check = if q.is_certified_cml() {
        identities::CmlCheck { noncommuting_pair: None, moufang_violation: None }
    } else {
        identities::is_cml(q)
    };
    if !check.holds() {
        return Ok(Outcome::new(
            json!({ "order": q.order(), "cml": false, "moufang_violation": check.moufang_violation,
                    "noncommuting_pair": check.noncommuting_pair }),
            true,
        ));
    }
    let series = structure::upper_central_series(q)?;
    let primary = structure::p_decomposition(q)?;
    let primary: BTreeMap<String, usize> = primary.orders().into_iter().map(|(p, n)| (p.to_string(), n)).collect();
    Ok(Outcome::new(
        json!({
            "name": q.name(),
            "order": q.order(),
            "cml": true,
            "exponent": q.exponent(),
            "associative": q.is_associative(),
            "center_order": series.terms[1.min(series.class())].order(),
            "class": series.class(),
            "series_orders": series.orders(),
            "primary": primary,
        }),
        false,
    ))
}

fn check_identities(cli: &Cli, q: &CayleyLoop) -> Result<Outcome, Failure> {
    let opts = IdentityOptions {
        seed: cli.seed,
        exhaustive: cli.exhaustive,
        ..IdentityOptions::default()
    };
    let report = identities::check_identities(q, &opts);
    let passed = report.all_passed();
    Ok(Outcome::new(
        json!({ "all_passed": passed, "checks": report.checks }),
        !passed,
    ))
}

fn series(q: &CayleyLoop) -> Result<Outcome, Failure> {
    match structure::upper_central_series(q) {
        Ok(s) => Ok(Outcome::new(
            json!({
                "class": s.class(),
                "orders": s.orders(),
                "terms": s.terms.iter().map(SubloopSet::to_vec).collect::<Vec<_>>(),
            }),
            false,
        )),
        Err(Error::SeriesStalled { order }) => Ok(Outcome::new(json!({ "stalled_at_order": order }), true)),
        Err(e) => Err(e.into()),
    }
}

fn subloop_census(cli: &Cli, q: &CayleyLoop) -> Result<Outcome, Failure> {
    let all = subloops::all_subloops(q, cli.cap.unwrap_or(DEFAULT_SUBLOOP_CAP))?;
    let mut by_order: BTreeMap<String, usize> = BTreeMap::new();
    let mut normal_by_order: BTreeMap<String, usize> = BTreeMap::new();
    let mut normal = Vec::new();
    for h in &all {
        *by_order.entry(h.order().to_string()).or_default() += 1;
        if subloops::is_normal(q, h).is_ok() {
            *normal_by_order.entry(h.order().to_string()).or_default() += 1;
            normal.push(h.clone());
        }
    }
    let minimal: Vec<Vec<usize>> = normal
        .iter()
        .filter(|h| !h.is_trivial())
        .filter(|h| !normal.iter().any(|k| !k.is_trivial() && k.order() < h.order() && k.is_subloop_of(h)))
        .map(SubloopSet::to_vec)
        .collect();
    Ok(Outcome::new(
        json!({
            "count": all.len(),
            "by_order": by_order,
            "normal_count": normal.len(),
            "normal_by_order": normal_by_order,
            "minimal_normal": minimal,
        }),
        false,
    ))
}

fn finite_cogenerators(cli: &Cli, q: &CayleyLoop) -> Result<Outcome, Failure> {
    let b = subloops::cogenerator_subloop(q);
    let check = subloops::is_cogenerating(q, &b, cli.seed)?;
    Ok(Outcome::new(
        json!({
            "order": b.order(),
            "elements": b.to_vec(),
            "holds": check.holds,
            "tested": check.tested,
            "exhaustive": check.exhaustive,
            "witness": check.witness.map(|w| w.to_vec()),
        }),
        !check.holds,
    ))
}

fn cap(cli: &Cli) -> usize {
    cli.cap.unwrap_or(STRUCTURED_CAP)
}

fn structured_cogenerators(cli: &Cli, q: &StructuredCML, trials: usize) -> Result<Outcome, Failure> {
    let b = mincond::cogenerator_subloop(q);
    let trial = mincond::is_cogenerating(q, &b, trials, cli.seed, cap(cli))?;
    Ok(Outcome::new(
        json!({
            "order": b.order(),
            "subloop": SubloopDescriptor::from_subloop(q, &b),
            "trial": trial,
        }),
        !trial.holds,
    ))
}

fn mult_group(cli: &Cli, q: &CayleyLoop) -> Result<Outcome, Failure> {
    let cap = cli.cap.unwrap_or(DEFAULT_GROUP_CAP);
    let report = multgroup::group_report(q, cap)?;
    let group = multgroup::mult_group(q, cap)?;
    let formula = multgroup::check_center_formula(q, &group)?;
    let three_loop = q.elements().all(|x| is_power_of(q.order_of(x), 3));
    let violated = !formula.holds || (three_loop && !report.is_3_group);
    Ok(Outcome::new(
        json!({
            "group": report,
            "three_loop": three_loop,
            "center_formula": formula,
        }),
        violated,
    ))
}

fn height_json(h: Height) -> Value {
    match h {
        Height::Finite(n) => json!(n),
        Height::Infinite => json!("infinite"),
    }
}

fn factor_json(kind: mincond::FactorKind) -> Value {
    match kind {
        mincond::FactorKind::Quasicyclic(p) => json!(format!("quasicyclic({p})")),
        mincond::FactorKind::Prime(p) => json!(format!("prime({p})")),
    }
}

fn structured(cli: &Cli, q: &StructuredCML) -> Result<Outcome, Failure> {
    let primes = mincond::relevant_primes(q);
    let socles: BTreeMap<String, usize> = primes
        .iter()
        .map(|&p| (p.to_string(), mincond::socle(q, p).order().expect("socles are finite")))
        .collect();
    let b = mincond::cogenerator_subloop(q);
    let trial = mincond::is_cogenerating(q, &b, mincond::COGENERATION_TRIALS, cli.seed, cap(cli))?;
    let series = mincond::quasicyclic_factor_series(q)?;
    let partitions: BTreeMap<String, bool> = LEVELS
        .iter()
        .map(|&k| (k.to_string(), mincond::series_partitions(q, &series, k)))
        .collect();
    let heights: Vec<Value> = (0..q.rank())
        .map(|i| height_json(mincond::height3(q, &q.summand_generator(i, 1))))
        .collect();
    let mut finite_heights: BTreeMap<String, usize> = BTreeMap::new();
    for c in q.finite_part().elements() {
        let h = match mincond::height3(q, &q.finite_element(c)) {
            Height::Finite(n) => n.to_string(),
            Height::Infinite => "infinite".to_string(),
        };
        *finite_heights.entry(h).or_default() += 1;
    }
    let violated = !trial.holds || partitions.values().any(|&ok| !ok);
    Ok(Outcome::new(
        json!({
            "summands": q.summands(),
            "finite_order": q.finite_part().order(),
            "socle_orders": socles,
            "cogenerator_order": b.order(),
            "cogeneration": trial,
            "series": series.iter().map(|s| factor_json(s.factor)).collect::<Vec<_>>(),
            "series_partitions": partitions,
            "summand_generator_heights": heights,
            "finite_part_height_census": finite_heights,
        }),
        violated,
    ))
}

fn truncate(cli: &Cli, q: &StructuredCML, level: u32) -> Result<Outcome, Failure> {
    let t = mincond::truncate(q, level, cap(cli))?;
    let check = identities::is_cml(&t.table);
    let mut result = json!({ "level": level, "order": t.table.order(), "cml": check.holds() });
    if check.holds() {
        let s = structure::upper_central_series(&t.table)?;
        result["center_order"] = json!(s.terms[1.min(s.class())].order());
        result["series_orders"] = json!(s.orders());
        result["class"] = json!(s.class());
    }
    Ok(Outcome {
        result,
        violated: !check.holds(),
        text: Some(t.table.to_text()),
    })
}

fn complement(cli: &Cli, q: &StructuredCML, subloop: Option<&str>) -> Result<Outcome, Failure> {
    let b = match subloop {
        Some(arg) => {
            let (text, _) = json_argument(arg)?;
            SubloopDescriptor::from_json(&text)?.to_subloop(q, cap(cli))?
        }
        None => mincond::StructuredSubloop::trivial(q),
    };
    let obstruction = mincond::complement_obstruction(q, &b)?;
    match mincond::divisible_complement(q, &b) {
        Ok(k) => {
            let check = mincond::verify_complement(q, &b, &k.subloop, &LEVELS)?;
            Ok(Outcome::new(
                json!({
                    "found": true,
                    "complement": SubloopDescriptor::from_subloop(q, &k.subloop),
                    "check": check,
                }),
                !check.holds(),
            ))
        }
        Err(Error::NoComplementFound) => Ok(Outcome::new(
            json!({
                "found": false,
                "b_order": b.order(),
                "obstruction": obstruction.as_ref().map(ElementDescriptor::from_element),
            }),
            true,
        )),
        Err(e) => Err(e.into()),
    }
}

fn chain_test(cli: &Cli, q: &StructuredCML, chains: usize) -> Result<Outcome, Failure> {
    let mut indices: BTreeMap<String, usize> = BTreeMap::new();
    let mut failures = Vec::new();
    for i in 0..chains {
        let seed = cli.seed.wrapping_add(i as u64);
        let chain = mincond::random_descending_chain(q, seed, cap(cli))?;
        match mincond::chain_stabilization_index(&chain) {
            Ok(index) => *indices.entry(index.to_string()).or_default() += 1,
            Err(e) => failures.push(json!({ "seed": seed, "error": e.to_string() })),
        }
    }
    Ok(Outcome::new(
        json!({
            "chains": chains,
            "all_stabilized": failures.is_empty(),
            "stabilization_indices": indices,
            "failures": failures,
        }),
        !failures.is_empty(),
    ))
}
