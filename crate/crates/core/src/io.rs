//! JSON documents: economies, allocations, prices, and report fragments.
//!
//! Input documents (economy, allocation, prices) are written at full
//! precision so they reload to equal objects. Report fragments round every
//! number to 12 significant digits.

use std::collections::BTreeSet;

use serde_json::{json, Map, Value};
use sha2::{Digest, Sha256};

use crate::algorithms::{GreedyTrace, Move, SearchOutcome, SearchStatus};
use crate::bundle::Bundle;
use crate::economy::{Allocation, Economy, PriceVector};
use crate::equilibrium::{EquilibriumVerdict, Quality, QualityReport, Witness};
use crate::error::{Error, Result};
use crate::valuation::{SubmodularityIndex, ValuationSpec};

/// `x` rounded to 12 significant digits.
pub fn round12(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    format!("{x:.11e}").parse().unwrap_or(x)
}

/// A report number: rounded, with non-finite values mapped to `"infinite"` or null.
pub fn number(x: f64) -> Value {
    if x.is_finite() {
        json!(round12(x))
    } else if x == f64::INFINITY {
        json!("infinite")
    } else {
        Value::Null
    }
}

pub fn quality_value(q: Quality) -> Value {
    match q {
        Quality::Finite(x) => number(x),
        Quality::Infinite => json!("infinite"),
    }
}

pub fn index_value(a: SubmodularityIndex) -> Value {
    match a {
        SubmodularityIndex::Finite(x) => number(x),
        SubmodularityIndex::Infinite => json!("infinite"),
    }
}

fn schema(msg: impl Into<String>) -> Error {
    Error::Schema(msg.into())
}

fn bundle_names(e: &Economy, b: Bundle) -> Value {
    Value::Array(b.items().map(|j| json!(e.items()[j])).collect())
}

fn names(items: &[String], b: Bundle) -> Value {
    Value::Array(b.items().map(|j| json!(items[j])).collect())
}

// ---------------------------------------------------------------- economy

fn spec_to_json(items: &[String], spec: &ValuationSpec) -> Value {
    let by_item = |w: &[f64]| -> Value {
        Value::Object(
            items
                .iter()
                .zip(w)
                .map(|(n, &x)| (n.clone(), json!(x)))
                .collect(),
        )
    };
    match spec {
        ValuationSpec::Explicit(entries) => {
            let mut sorted = entries.clone();
            sorted.sort_by_key(|(b, _)| (b.len(), b.mask()));
            json!({
                "type": "explicit",
                "table": sorted
                    .iter()
                    .map(|&(b, v)| json!({"bundle": names(items, b), "value": v}))
                    .collect::<Vec<_>>(),
            })
        }
        ValuationSpec::Additive(w) => json!({"type": "additive", "values": by_item(w)}),
        ValuationSpec::UnitDemand(w) => json!({"type": "unit_demand", "values": by_item(w)}),
        ValuationSpec::Symmetric(s) => json!({"type": "symmetric", "by_size": s}),
        ValuationSpec::BudgetedAdditive { values, budget } => json!({
            "type": "budgeted_additive",
            "values": by_item(values),
            "budget": budget,
        }),
    }
}

pub fn economy_to_json(e: &Economy) -> Value {
    json!({
        "items": e.items(),
        "agents": e
            .agents()
            .iter()
            .map(|a| json!({"name": a.name, "valuation": spec_to_json(e.items(), &a.spec)}))
            .collect::<Vec<_>>(),
    })
}

fn as_object<'a>(v: &'a Value, what: &str) -> Result<&'a Map<String, Value>> {
    v.as_object()
        .ok_or_else(|| schema(format!("{what} must be a JSON object")))
}

fn as_array<'a>(v: &'a Value, what: &str) -> Result<&'a Vec<Value>> {
    v.as_array()
        .ok_or_else(|| schema(format!("{what} must be a JSON array")))
}

fn as_number(v: &Value, what: &str) -> Result<f64> {
    v.as_f64()
        .ok_or_else(|| schema(format!("{what} must be a number")))
}

fn as_str<'a>(v: &'a Value, what: &str) -> Result<&'a str> {
    v.as_str()
        .ok_or_else(|| schema(format!("{what} must be a string")))
}

fn field<'a>(obj: &'a Map<String, Value>, key: &str, what: &str) -> Result<&'a Value> {
    obj.get(key)
        .ok_or_else(|| schema(format!("{what} is missing field \"{key}\"")))
}

fn item_of(items: &[String], name: &Value, what: &str) -> Result<usize> {
    let name = as_str(name, what)?;
    items
        .iter()
        .position(|n| n == name)
        .ok_or_else(|| schema(format!("{what} names unknown item \"{name}\"")))
}

fn bundle_from(items: &[String], v: &Value, what: &str) -> Result<Bundle> {
    let mut b = Bundle::EMPTY;
    for name in as_array(v, what)? {
        b = b.with(item_of(items, name, what)?);
    }
    Ok(b)
}

/// Per-item weights given as an object keyed by item name; every item must appear.
fn weights_from(items: &[String], v: &Value, what: &str) -> Result<Vec<f64>> {
    let obj = as_object(v, what)?;
    let mut out = vec![None; items.len()];
    for (name, x) in obj {
        let j = item_of(items, &json!(name), what)?;
        out[j] = Some(as_number(x, &format!("{what}.{name}"))?);
    }
    out.into_iter()
        .zip(items)
        .map(|(x, n)| x.ok_or_else(|| schema(format!("{what} is missing item \"{n}\""))))
        .collect()
}

fn spec_from_json(items: &[String], v: &Value, what: &str) -> Result<ValuationSpec> {
    let obj = as_object(v, what)?;
    let kind = as_str(field(obj, "type", what)?, &format!("{what}.type"))?;
    Ok(match kind {
        "explicit" => {
            let table = as_array(field(obj, "table", what)?, &format!("{what}.table"))?;
            let mut entries = Vec::with_capacity(table.len());
            for (k, entry) in table.iter().enumerate() {
                let ctx = format!("{what}.table[{k}]");
                let eo = as_object(entry, &ctx)?;
                let b = bundle_from(items, field(eo, "bundle", &ctx)?, &format!("{ctx}.bundle"))?;
                let x = as_number(field(eo, "value", &ctx)?, &format!("{ctx}.value"))?;
                entries.push((b, x));
            }
            ValuationSpec::Explicit(entries)
        }
        "additive" => ValuationSpec::Additive(weights_from(
            items,
            field(obj, "values", what)?,
            &format!("{what}.values"),
        )?),
        "unit_demand" => ValuationSpec::UnitDemand(weights_from(
            items,
            field(obj, "values", what)?,
            &format!("{what}.values"),
        )?),
        "symmetric" => {
            let ctx = format!("{what}.by_size");
            ValuationSpec::Symmetric(
                as_array(field(obj, "by_size", what)?, &ctx)?
                    .iter()
                    .map(|x| as_number(x, &ctx))
                    .collect::<Result<_>>()?,
            )
        }
        "budgeted_additive" => ValuationSpec::BudgetedAdditive {
            values: weights_from(
                items,
                field(obj, "values", what)?,
                &format!("{what}.values"),
            )?,
            budget: as_number(field(obj, "budget", what)?, &format!("{what}.budget"))?,
        },
        other => {
            return Err(schema(format!(
                "{what}.type \"{other}\" is not one of explicit, additive, unit_demand, \
                 symmetric, budgeted_additive"
            )))
        }
    })
}

pub fn economy_from_json(v: &Value) -> Result<Economy> {
    let obj = as_object(v, "economy")?;
    let items: Vec<String> = as_array(field(obj, "items", "economy")?, "economy.items")?
        .iter()
        .map(|x| as_str(x, "economy.items[]").map(str::to_string))
        .collect::<Result<_>>()?;
    let agents = as_array(field(obj, "agents", "economy")?, "economy.agents")?;
    let mut specs = Vec::with_capacity(agents.len());
    for (i, a) in agents.iter().enumerate() {
        let ctx = format!("economy.agents[{i}]");
        let ao = as_object(a, &ctx)?;
        let name = as_str(field(ao, "name", &ctx)?, &format!("{ctx}.name"))?.to_string();
        let spec = spec_from_json(
            &items,
            field(ao, "valuation", &ctx)?,
            &format!("{ctx}.valuation"),
        )?;
        specs.push((name, spec));
    }
    Economy::from_specs(items, specs)
}

/// Parses an economy document; JSON syntax errors carry line and column.
pub fn economy_from_str(s: &str) -> Result<Economy> {
    economy_from_json(&serde_json::from_str(s)?)
}

pub fn to_pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("values serialize");
    s.push('\n');
    s
}

/// SHA-256 of the compact canonical economy document, hex encoded.
pub fn fingerprint(e: &Economy) -> String {
    let canonical = serde_json::to_string(&economy_to_json(e)).expect("values serialize");
    hex::encode(Sha256::digest(canonical.as_bytes()))
}

// ------------------------------------------------------ allocation, prices

pub fn allocation_to_json(e: &Economy, f: &Allocation) -> Value {
    let bundles = f.bundles(e.num_agents());
    let assignment: Map<String, Value> = e
        .agents()
        .iter()
        .zip(&bundles)
        .map(|(a, &b)| (a.name.clone(), bundle_names(e, b)))
        .collect();
    json!({
        "assignment": assignment,
        "unallocated": bundle_names(e, f.unallocated_bundle()),
    })
}

/// Agents missing from `assignment` hold nothing; items listed nowhere are
/// unallocated. Listing an item twice is an error.
pub fn allocation_from_json(e: &Economy, v: &Value) -> Result<Allocation> {
    let obj = as_object(v, "allocation")?;
    let assignment = as_object(
        field(obj, "assignment", "allocation")?,
        "allocation.assignment",
    )?;
    let mut f = Allocation::unallocated(e.num_items());
    let mut seen = BTreeSet::new();
    for (agent, items) in assignment {
        let i = e.agent_index(agent).ok_or_else(|| {
            schema(format!(
                "allocation.assignment names unknown agent \"{agent}\""
            ))
        })?;
        let ctx = format!("allocation.assignment.{agent}");
        for name in as_array(items, &ctx)? {
            let j = item_of(e.items(), name, &ctx)?;
            if !seen.insert(j) {
                return Err(schema(format!(
                    "item \"{}\" is assigned more than once",
                    e.items()[j]
                )));
            }
            f.assign(j, Some(i));
        }
    }
    if let Some(un) = obj.get("unallocated") {
        for name in as_array(un, "allocation.unallocated")? {
            let j = item_of(e.items(), name, "allocation.unallocated")?;
            if seen.contains(&j) {
                return Err(schema(format!(
                    "item \"{}\" is both assigned and unallocated",
                    e.items()[j]
                )));
            }
        }
    }
    Ok(f)
}

pub fn prices_to_json(e: &Economy, p: &PriceVector) -> Value {
    Value::Object(
        e.items()
            .iter()
            .zip(p.as_slice())
            .map(|(n, &x)| (n.clone(), json!(x)))
            .collect(),
    )
}

/// Every item must be priced.
pub fn prices_from_json(e: &Economy, v: &Value) -> Result<PriceVector> {
    PriceVector::new(weights_from(e.items(), v, "prices")?)
}

// --------------------------------------------------------------- reports

pub fn quality_report_to_json(e: &Economy, r: &QualityReport) -> Value {
    json!({
        "r_star": quality_value(r.r_star),
        "s_star": quality_value(r.s_star),
        "q": quality_value(r.q()),
        "unallocated_price_ok": r.unallocated_price_ok,
        "binding_ir_agent": r.binding_ir_agent.map(|i| e.agents()[i].name.clone()),
        "binding_os_witness": r.binding_os_witness.map(|(i, b)| json!({
            "agent": e.agents()[i].name,
            "bundle": bundle_names(e, b),
        })),
    })
}

pub fn witness_to_json(e: &Economy, w: &Witness) -> Value {
    let agent = |i: usize| json!(e.agents()[i].name);
    let item = |j: usize| json!(e.items()[j]);
    let mut out = match *w {
        Witness::UnallocatedPriced { item: j, price } => {
            json!({"item": item(j), "price": number(price)})
        }
        Witness::IndividualRationality {
            agent: i,
            value,
            price_total,
        } => json!({"agent": agent(i), "value": number(value), "price_total": number(price_total)}),
        Witness::OutwardStability {
            agent: i,
            bundle,
            marginal,
            price_total,
        }
        | Witness::StrongRationality {
            agent: i,
            bundle,
            marginal,
            price_total,
        } => json!({
            "agent": agent(i),
            "bundle": bundle_names(e, bundle),
            "marginal": number(marginal),
            "price_total": number(price_total),
        }),
        Witness::NoRegret {
            agent: i,
            bundle,
            held_utility,
            bundle_utility,
        } => json!({
            "agent": agent(i),
            "bundle": bundle_names(e, bundle),
            "held_utility": number(held_utility),
            "bundle_utility": number(bundle_utility),
        }),
        Witness::SingleSwap {
            agent: i,
            give,
            take,
            value_loss,
            price_gap,
        } => json!({
            "agent": agent(i),
            "give": item(give),
            "take": item(take),
            "value_loss": number(value_loss),
            "price_gap": number(price_gap),
        }),
        Witness::SingleDrop {
            agent: i,
            item: j,
            value_loss,
            price,
        } => json!({
            "agent": agent(i),
            "item": item(j),
            "value_loss": number(value_loss),
            "price": number(price),
        }),
        Witness::Transfer {
            from,
            to,
            item: j,
            gain,
        } => json!({"from": agent(from), "to": agent(to), "item": item(j), "gain": number(gain)}),
    };
    out["condition"] = json!(w.condition());
    out
}

pub fn verdict_to_json(e: &Economy, v: &EquilibriumVerdict) -> Value {
    json!({
        "holds": v.holds,
        "violations": v.violations.iter().map(|w| witness_to_json(e, w)).collect::<Vec<_>>(),
    })
}

pub fn greedy_trace_to_json(e: &Economy, t: &GreedyTrace) -> Value {
    let stages: Vec<Value> = t
        .order
        .iter()
        .zip(&t.winners)
        .zip(&t.stage_marginals)
        .map(|((&j, &w), marg)| {
            let marginals: Map<String, Value> = e
                .agents()
                .iter()
                .zip(marg)
                .map(|(a, &x)| (a.name.clone(), number(x)))
                .collect();
            json!({
                "item": e.items()[j],
                "winner": e.agents()[w].name,
                "marginals": marginals,
                "price": number(t.prices.get(j)),
            })
        })
        .collect();
    json!({"stages": stages})
}

pub fn move_to_json(e: &Economy, m: &Move) -> Value {
    json!({
        "from": e.agents()[m.from].name,
        "to": e.agents()[m.to].name,
        "item": e.items()[m.item],
        "gain": number(m.gain),
    })
}

pub fn search_status_name(s: SearchStatus) -> &'static str {
    match s {
        SearchStatus::Converged => "converged",
        SearchStatus::MoveCapReached => "move_cap_reached",
    }
}

pub fn search_outcome_to_json(e: &Economy, out: &SearchOutcome) -> Value {
    json!({
        "status": search_status_name(out.status),
        "moves": out.moves.iter().map(|m| move_to_json(e, m)).collect::<Vec<_>>(),
    })
}

/// Report-precision copy of a price vector keyed by item.
pub fn prices_report(e: &Economy, p: &PriceVector) -> Value {
    Value::Object(
        e.items()
            .iter()
            .zip(p.as_slice())
            .map(|(n, &x)| (n.clone(), number(x)))
            .collect(),
    )
}
