use std::fs;
use std::path::Path;

use exchange_lab::algorithms::{
    greedy_allocate, local_optimum_search, optimal_allocation, price_bands, supporting_prices,
    ImprovementRule, PriceRule, SearchPolicy, SearchStatus,
};
use exchange_lab::catalog;
use exchange_lab::economy::{social_value, Allocation, Economy, PriceVector};
use exchange_lab::equilibrium::{
    check_single_improvement, check_single_swap, max_q_for_allocation_with, max_quality,
    max_quasi_q_for_allocation, quasi_walrasian_quality, verify_local_equilibrium,
    verify_strong_ir, verify_walrasian, PriceShape,
};
use exchange_lab::generate::{seeded_economy, EconomyClass};
use exchange_lab::io;
use exchange_lab::lp::dual_prices;
use exchange_lab::SubmodularityIndex;
use serde_json::{json, Map, Value};

use crate::output::{emit, Report, Table};
use crate::{
    AnalyzeArgs, Cli, Command, ExamplesArgs, Policy, Procedure, RunArgs, Shape, SweepArgs,
    VerifyArgs,
};

pub const EXIT_OK: u8 = 0;
pub const EXIT_VERDICT: u8 = 1;
pub const EXIT_INPUT: u8 = 2;
pub const EXIT_NON_CONVERGENCE: u8 = 3;

pub type CliResult<T> = Result<T, String>;

fn lib<T>(r: exchange_lab::Result<T>) -> CliResult<T> {
    r.map_err(|e| e.to_string())
}

fn read_json(path: &Path, what: &str) -> CliResult<Value> {
    let text = fs::read_to_string(path)
        .map_err(|e| format!("cannot read {what} file {}: {e}", path.display()))?;
    serde_json::from_str(&text).map_err(|e| format!("{what} file {}: {e}", path.display()))
}

fn load_economy(path: &Path) -> CliResult<Economy> {
    let v = read_json(path, "economy")?;
    io::economy_from_json(&v).map_err(|e| format!("economy file {}: {e}", path.display()))
}

fn load_allocation(e: &Economy, path: &Path) -> CliResult<Allocation> {
    let v = read_json(path, "allocation")?;
    io::allocation_from_json(e, &v)
        .map_err(|err| format!("allocation file {}: {err}", path.display()))
}

fn load_prices(e: &Economy, path: &Path) -> CliResult<PriceVector> {
    let v = read_json(path, "prices")?;
    io::prices_from_json(e, &v).map_err(|err| format!("prices file {}: {err}", path.display()))
}

fn check_level(name: &str, x: f64) -> CliResult<()> {
    if x.is_finite() && x >= 0.0 {
        Ok(())
    } else {
        Err(format!("--{name} must be finite and nonnegative, got {x}"))
    }
}

pub fn execute(cli: &Cli, echo: Vec<String>) -> CliResult<u8> {
    let (report, code) = match &cli.command {
        Command::Analyze(a) => (analyze(a)?, EXIT_OK),
        Command::Verify(a) => verify(a)?,
        Command::Run(a) => run(a)?,
        Command::Examples(a) => (examples(a)?, EXIT_OK),
        Command::Sweep(a) => {
            let table = sweep(a)?;
            emit(cli, &Report::new(echo, None, table.to_json()), Some(&table))?;
            return Ok(EXIT_OK);
        }
    };
    emit(cli, &report.with_command(echo), None)?;
    Ok(code)
}

// ----------------------------------------------------------------- analyze

fn analyze_results(e: &Economy) -> CliResult<Value> {
    let indices = e.submodularity_indices();
    let max_index = e.submodularity_index();
    let agents: Vec<Value> = e
        .agents()
        .iter()
        .zip(&indices)
        .map(|(a, &idx)| json!({"name": a.name, "submodularity_index": io::index_value(idx)}))
        .collect();
    let (opt, m) = optimal_allocation(e);
    let dual = lib(dual_prices(e))?;
    let mf = dual.objective();
    let gap = if m > 0.0 {
        io::number(mf / m)
    } else {
        Value::Null
    };
    let utilities: Map<String, Value> = e
        .agents()
        .iter()
        .zip(&dual.agent_utilities)
        .map(|(a, &u)| (a.name.clone(), io::number(u)))
        .collect();
    Ok(json!({
        "items": e.items(),
        "agents": agents,
        "max_submodularity_index": io::index_value(max_index),
        "integral_optimum": io::number(m),
        "optimal_allocation": io::allocation_to_json(e, &opt),
        "fractional_optimum": io::number(mf),
        "dual_item_prices": io::prices_report(e, &dual.item_prices),
        "dual_agent_utilities": utilities,
        "integral_gap": gap,
    }))
}

fn analyze(a: &AnalyzeArgs) -> CliResult<Report> {
    let e = load_economy(&a.economy)?;
    Ok(Report::new(Vec::new(), Some(&e), analyze_results(&e)?))
}

// ------------------------------------------------------------------ verify

fn verify(a: &VerifyArgs) -> CliResult<(Report, u8)> {
    check_level("r", a.r)?;
    check_level("s", a.s)?;
    let e = load_economy(&a.economy)?;
    let f = load_allocation(&e, &a.allocation)?;
    let p = load_prices(&e, &a.prices)?;
    let mut results = Map::new();
    let mut all_hold = true;
    let mut record = |key: &str, holds: bool, v: Value, results: &mut Map<String, Value>| {
        all_hold &= holds;
        results.insert(key.into(), v);
    };

    let quality = lib(max_quality(&e, &f, &p))?;
    results.insert("quality".into(), io::quality_report_to_json(&e, &quality));
    results.insert(
        "social_value".into(),
        io::number(lib(social_value(&e, &f))?),
    );
    let local = lib(verify_local_equilibrium(&e, &f, &p, a.r, a.s))?;
    record(
        "local",
        local.holds,
        json!({"r": io::number(a.r), "s": io::number(a.s), "verdict": io::verdict_to_json(&e, &local)}),
        &mut results,
    );
    let strong = a.strong.or(a.all.then_some(1.0));
    if let Some(c) = strong {
        check_level("strong", c)?;
        let v = lib(verify_strong_ir(&e, &f, &p, c))?;
        record(
            "strong_ir",
            v.holds,
            json!({"c": io::number(c), "verdict": io::verdict_to_json(&e, &v)}),
            &mut results,
        );
    }
    if a.walrasian || a.all {
        let v = lib(verify_walrasian(&e, &f, &p))?;
        record(
            "walrasian",
            v.holds,
            io::verdict_to_json(&e, &v),
            &mut results,
        );
    }
    if a.swap || a.all {
        let v = lib(check_single_swap(&e, &f, &p))?;
        record(
            "single_swap",
            v.holds,
            io::verdict_to_json(&e, &v),
            &mut results,
        );
        let v = lib(check_single_improvement(&e, &f, &p))?;
        record(
            "single_improvement",
            v.holds,
            io::verdict_to_json(&e, &v),
            &mut results,
        );
    }
    if a.quasi || a.all {
        let q = lib(quasi_walrasian_quality(&e, &f, &p))?;
        results.insert("quasi_walrasian_quality".into(), io::number(q));
    }
    results.insert("all_verdicts_hold".into(), json!(all_hold));
    let code = if a.strict && !all_hold {
        EXIT_VERDICT
    } else {
        EXIT_OK
    };
    Ok((
        Report::new(Vec::new(), Some(&e), Value::Object(results)),
        code,
    ))
}

// --------------------------------------------------------------------- run

fn parse_order(e: &Economy, csv: Option<&str>) -> CliResult<Vec<usize>> {
    match csv {
        None => Ok((0..e.num_items()).collect()),
        Some(s) => s
            .split(',')
            .map(|name| {
                let name = name.trim();
                e.item_index(name)
                    .ok_or_else(|| format!("--order names unknown item \"{name}\""))
            })
            .collect(),
    }
}

fn require_allocation(e: &Economy, a: &RunArgs, what: &str) -> CliResult<Allocation> {
    let path = a
        .allocation
        .as_ref()
        .ok_or_else(|| format!("{what} needs --allocation"))?;
    load_allocation(e, path)
}

fn run(a: &RunArgs) -> CliResult<(Report, u8)> {
    let e = load_economy(&a.economy)?;
    let rule = lib(PriceRule::new(a.lambda))?;
    let mut results = Map::new();
    let mut code = EXIT_OK;
    results.insert("procedure".into(), json!(procedure_name(a.procedure)));
    let (f, p): (Allocation, Option<PriceVector>) = match a.procedure {
        Procedure::Greedy => {
            let order = parse_order(&e, a.order.as_deref())?;
            let (f, p, trace) = lib(greedy_allocate(&e, &order, rule))?;
            results.insert("lambda".into(), io::number(a.lambda));
            results.insert("trace".into(), io::greedy_trace_to_json(&e, &trace));
            (f, Some(p))
        }
        Procedure::LocalSearch => {
            let f0 = match &a.allocation {
                Some(path) => load_allocation(&e, path)?,
                None => Allocation::all_to(e.num_items(), 0),
            };
            let policy = SearchPolicy {
                rule: match a.policy {
                    Policy::First => ImprovementRule::First,
                    Policy::Best => ImprovementRule::Best,
                    Policy::Random => ImprovementRule::Random,
                },
                seed: a.seed,
                move_cap: a.move_cap,
                ..SearchPolicy::default()
            };
            let out = lib(local_optimum_search(&e, &f0, &policy))?;
            results.insert("search".into(), io::search_outcome_to_json(&e, &out));
            if out.status == SearchStatus::MoveCapReached {
                code = EXIT_NON_CONVERGENCE;
                (out.allocation, None)
            } else {
                let p = lib(supporting_prices(&e, &out.allocation, rule))?;
                results.insert("lambda".into(), io::number(a.lambda));
                (out.allocation, Some(p))
            }
        }
        Procedure::Optimal => {
            let (f, m) = optimal_allocation(&e);
            results.insert("value".into(), io::number(m));
            (f, None)
        }
        Procedure::SupportingPrices => {
            let f = require_allocation(&e, a, "supporting-prices")?;
            let bands = lib(price_bands(&e, &f))?;
            let bands: Map<String, Value> = e
                .items()
                .iter()
                .zip(&bands)
                .map(|(n, &(lo, hi))| {
                    (
                        n.clone(),
                        json!({"lo": io::number(lo), "hi": io::number(hi)}),
                    )
                })
                .collect();
            let p = lib(supporting_prices(&e, &f, rule))?;
            results.insert("lambda".into(), io::number(a.lambda));
            results.insert("bands".into(), Value::Object(bands));
            (f, Some(p))
        }
        Procedure::MaxQ => {
            let f = require_allocation(&e, a, "max-q")?;
            let shape = match a.shape {
                Shape::Free => PriceShape::Free,
                Shape::Uniform => PriceShape::Uniform,
            };
            let res = lib(max_q_for_allocation_with(&e, &f, shape))?;
            results.insert(
                "shape".into(),
                json!(if a.shape == Shape::Free {
                    "free"
                } else {
                    "uniform"
                }),
            );
            results.insert("q_star".into(), io::quality_value(res.q_star));
            (f, Some(res.prices))
        }
        Procedure::MaxQuasiQ => {
            let f = require_allocation(&e, a, "max-quasi-q")?;
            let (q, p) = lib(max_quasi_q_for_allocation(&e, &f))?;
            results.insert("q_star".into(), io::number(q));
            (f, Some(p))
        }
    };
    results.insert("allocation".into(), io::allocation_to_json(&e, &f));
    results.insert(
        "social_value".into(),
        io::number(lib(social_value(&e, &f))?),
    );
    if let Some(p) = &p {
        results.insert("prices".into(), io::prices_report(&e, p));
    }
    if a.verify {
        let p = p.as_ref().ok_or_else(|| {
            format!(
                "--verify needs prices, which {} does not produce",
                procedure_name(a.procedure)
            )
        })?;
        let rep = lib(max_quality(&e, &f, p))?;
        results.insert("quality".into(), io::quality_report_to_json(&e, &rep));
        if a.strict && code == EXIT_OK && !rep.admits(1.0, 1.0) {
            code = EXIT_VERDICT;
        }
    }
    Ok((
        Report::new(Vec::new(), Some(&e), Value::Object(results)),
        code,
    ))
}

fn procedure_name(p: Procedure) -> &'static str {
    match p {
        Procedure::Greedy => "greedy",
        Procedure::LocalSearch => "local-search",
        Procedure::Optimal => "optimal",
        Procedure::SupportingPrices => "supporting-prices",
        Procedure::MaxQ => "max-q",
        Procedure::MaxQuasiQ => "max-quasi-q",
    }
}

// ---------------------------------------------------------------- examples

fn write_doc(path: &Path, v: &Value) -> CliResult<()> {
    fs::write(path, io::to_pretty(v)).map_err(|e| format!("cannot write {}: {e}", path.display()))
}

fn examples(a: &ExamplesArgs) -> CliResult<Report> {
    let names: Vec<&str> = if a.name == "all" {
        catalog::NAMES.to_vec()
    } else {
        vec![a.name.as_str()]
    };
    fs::create_dir_all(&a.dir).map_err(|e| format!("cannot create {}: {e}", a.dir.display()))?;
    let mut written = Vec::new();
    for name in names {
        let param = match name {
            "ex-asubmod" => a.a,
            "ex-smallq" => a.eps,
            _ => None,
        };
        let ex = lib(catalog::by_name(name, param))?;
        let files = [
            ("economy", io::economy_to_json(&ex.economy)),
            (
                "allocation",
                io::allocation_to_json(&ex.economy, &ex.allocation),
            ),
            ("prices", io::prices_to_json(&ex.economy, &ex.prices)),
        ];
        let mut paths = Map::new();
        for (kind, doc) in files {
            let path = a.dir.join(format!("{name}.{kind}.json"));
            write_doc(&path, &doc)?;
            paths.insert(kind.into(), json!(path.display().to_string()));
        }
        written.push(json!({
            "name": name,
            "fingerprint": io::fingerprint(&ex.economy),
            "files": paths,
        }));
    }
    Ok(Report::new(Vec::new(), None, json!({"examples": written})))
}

// ------------------------------------------------------------------- sweep

const SWEEP_COLUMNS: &[&str] = &[
    "class",
    "seed",
    "items",
    "agents",
    "max_submodularity_index",
    "integral_optimum",
    "fractional_optimum",
    "integral_gap",
    "greedy_value",
    "greedy_r_star",
    "greedy_s_star",
    "local_value",
    "local_q",
    "fingerprint",
];

fn cell(v: Value) -> String {
    match v {
        Value::String(s) => s,
        Value::Null => String::new(),
        other => other.to_string(),
    }
}

fn sweep(a: &SweepArgs) -> CliResult<Table> {
    if a.items == 0 || a.agents == 0 {
        return Err("--items and --agents must be positive".into());
    }
    let classes = if a.class.is_empty() {
        EconomyClass::ALL.to_vec()
    } else {
        a.class.clone()
    };
    let mut rows = Vec::new();
    for (c, &class) in classes.iter().enumerate() {
        for k in 0..a.count {
            let seed = a.seed + 1000 * c as u64 + k as u64;
            let e = lib(seeded_economy(class, a.items, a.agents, seed))?;
            let (_, m) = optimal_allocation(&e);
            let mf = lib(dual_prices(&e))?.objective();
            let order: Vec<usize> = (0..e.num_items()).collect();
            let (gf, gp, _) = lib(greedy_allocate(&e, &order, PriceRule::default()))?;
            let g_rep = lib(max_quality(&e, &gf, &gp))?;
            let start = Allocation::all_to(e.num_items(), 0);
            let out = lib(local_optimum_search(&e, &start, &SearchPolicy::default()))?;
            let lp = lib(supporting_prices(&e, &out.allocation, PriceRule::default()))?;
            let l_rep = lib(max_quality(&e, &out.allocation, &lp))?;
            let index = match e.submodularity_index() {
                SubmodularityIndex::Finite(x) => io::number(x),
                SubmodularityIndex::Infinite => json!("infinite"),
            };
            rows.push(vec![
                class.name().to_string(),
                seed.to_string(),
                a.items.to_string(),
                a.agents.to_string(),
                cell(index),
                cell(io::number(m)),
                cell(io::number(mf)),
                cell(if m > 0.0 {
                    io::number(mf / m)
                } else {
                    Value::Null
                }),
                cell(io::number(lib(social_value(&e, &gf))?)),
                cell(io::quality_value(g_rep.r_star)),
                cell(io::quality_value(g_rep.s_star)),
                cell(io::number(lib(social_value(&e, &out.allocation))?)),
                cell(io::quality_value(l_rep.q())),
                io::fingerprint(&e),
            ]);
        }
    }
    Ok(Table {
        columns: SWEEP_COLUMNS.iter().map(|s| s.to_string()).collect(),
        rows,
    })
}
