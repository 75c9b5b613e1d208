use std::collections::BTreeMap;
use std::fs;

use colog_core::collab::{enumerate_sign_cases, eval_scs, Target};
use colog_core::complexity::{
    canonical_spider_network, classify_trio, default_trio_eps, effector_sum, system_complexity, system_state,
    ConditionEffector, Polarity, UncertaintyValue, UnionMode,
};
use colog_core::compliance::EmissionCheck;
use colog_core::emissions::{ChargeMode, Weights};
use colog_core::fixtures::{run_bundled, BUNDLED};
use colog_core::num::{dec, parse_rational, Rational};
use colog_core::pipeline::{run_pipeline_with_warnings, IntentSource, PipelineError, PipelineOptions};
use colog_core::report::{
    assignment_table, compliance_table, emission_table, macro_table, plan_tables, render_long_csv, render_text,
    route_table, Table,
};
use colog_core::routing::RoutingError;
use colog_core::scenario::{parse_scenario, Loaded, Scenario};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Validation(String),
    #[error("{0}")]
    Infeasible(String),
    #[error("{0}")]
    Internal(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Validation(_) => 1,
            CliError::Infeasible(_) => 2,
            CliError::Internal(_) => 3,
            CliError::Usage(_) => 64,
        }
    }
}

impl From<PipelineError> for CliError {
    fn from(e: PipelineError) -> Self {
        let msg = e.to_string();
        match e {
            _ if e.is_infeasible() => CliError::Infeasible(msg),
            PipelineError::Routing { source: RoutingError::UnknownOrder(_), .. } | PipelineError::Emissions { .. } => {
                CliError::Internal(msg)
            }
            _ => CliError::Validation(msg),
        }
    }
}

fn invalid(e: impl ToString) -> CliError {
    CliError::Validation(e.to_string())
}

fn number(text: &str, what: &str) -> Result<Rational, CliError> {
    parse_rational(text.trim()).map_err(|e| invalid(format!("{what}: {e}")))
}

fn load(path: &str, strict: bool) -> Result<Loaded, CliError> {
    let text = fs::read_to_string(path).map_err(|e| invalid(format!("{path}: {e}")))?;
    let loaded = parse_scenario(&text).map_err(|e| invalid(format!("{path}: {e}")))?;
    if strict && !loaded.warnings.is_empty() {
        return Err(invalid(format!("{path}: {}", loaded.warnings.join("; "))));
    }
    for w in &loaded.warnings {
        eprintln!("warning: {w}");
    }
    Ok(loaded)
}

fn render(tables: &[Table], csv: bool) -> String {
    match tables {
        [one] if csv => one.to_csv(),
        _ if csv => render_long_csv(tables),
        _ => render_text(tables),
    }
}

pub fn fixtures(args: &[String]) -> Result<String, CliError> {
    match args {
        [action] if action == "list" => Ok(BUNDLED.iter().map(|b| format!("{}\n", b.name)).collect()),
        [action, name] if action == "run" => {
            let run = run_bundled(name).map_err(invalid)?;
            if run.passed() {
                Ok(run.render())
            } else {
                print!("{}", run.render());
                Err(invalid(format!("fixture `{name}` has failing checks")))
            }
        }
        _ => Err(CliError::Usage("--fixtures expects `list` or `run <name>`".into())),
    }
}

fn blocks_of(s: &Scenario) -> Result<&colog_core::scenario::CollaborationBlocks, CliError> {
    s.blocks.as_ref().ok_or_else(|| invalid("scenario has no collaboration blocks"))
}

pub fn macro_eval(path: &str, case: Option<&str>, strict: bool, csv: bool) -> Result<String, CliError> {
    let s = load(path, strict)?.scenario;
    let blocks = blocks_of(&s)?;
    let picked: Vec<(String, _)> = match case {
        Some(id) => {
            let c = s.cases.iter().find(|c| c.id == id).ok_or_else(|| invalid(format!("no case `{id}`")))?;
            vec![(c.id.clone(), c.signs.clone())]
        }
        None => match &s.signs {
            Some(signs) if s.cases.is_empty() => vec![("signs".to_string(), signs.clone())],
            _ => s.cases.iter().map(|c| (c.id.clone(), c.signs.clone())).collect(),
        },
    };
    if picked.is_empty() {
        return Err(invalid("scenario declares neither signs nor cases"));
    }
    let mut rows = Vec::new();
    for (id, signs) in picked {
        let outcome = eval_scs(blocks, &signs).map_err(invalid)?;
        rows.push((id, signs, outcome));
    }
    Ok(render(&[macro_table(&s.dimensions, &rows)], csv))
}

pub fn macro_enumerate(path: &str, top: usize, target: &str, strict: bool, csv: bool) -> Result<String, CliError> {
    let target: Target = target.parse().map_err(CliError::Usage)?;
    let s = load(path, strict)?.scenario;
    let ranked = enumerate_sign_cases(blocks_of(&s)?, target);
    let rows: Vec<_> =
        ranked.into_iter().take(top).map(|r| (r.case_id.to_string(), r.signs, r.outcome)).collect();
    Ok(render(&[macro_table(&s.dimensions, &rows)], csv))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stage {
    Filter,
    Assign,
    Route,
    Emissions,
    Plan,
}

#[derive(Debug, Default)]
pub struct MicroOptions {
    pub intents: Option<String>,
    pub from_macro: Option<String>,
    pub c3_inverted: bool,
    pub per_distance: bool,
    pub speed: Option<String>,
    pub keep_going: bool,
    pub experimental_sn: bool,
    pub weights: Option<String>,
    pub strict: bool,
    pub csv: bool,
}

fn parse_weights(text: &str) -> Result<Weights, CliError> {
    let mut map = BTreeMap::new();
    for part in text.split(',').filter(|p| !p.trim().is_empty()) {
        let (base, w) = part.split_once('=').ok_or_else(|| invalid(format!("weight `{part}` is not BASE=VALUE")))?;
        map.insert(base.trim().to_string(), number(w, "weight")?);
    }
    Ok(Weights(map))
}

fn intent_source(opts: &MicroOptions, scenario: &Scenario) -> Result<IntentSource, CliError> {
    if let Some(list) = &opts.intents {
        let v = list.split(',').map(|x| number(x, "intent")).collect::<Result<Vec<_>, _>>()?;
        return Ok(IntentSource::Direct(v));
    }
    Ok(match opts.from_macro.as_deref() {
        None => IntentSource::default_for(scenario),
        Some("signs") => IntentSource::ScenarioSigns,
        Some(best) if best == "best" || best.starts_with("best:") => {
            let target = best.strip_prefix("best:").unwrap_or("both");
            IntentSource::BestCase(target.parse().map_err(CliError::Usage)?)
        }
        Some(id) => IntentSource::Case(id.to_string()),
    })
}

pub fn micro(path: &str, stage: Stage, opts: &MicroOptions) -> Result<String, CliError> {
    let loaded = load(path, opts.strict)?;
    let options = PipelineOptions {
        emission_check: if opts.c3_inverted { EmissionCheck::AtMost } else { EmissionCheck::AtLeast },
        charge: if opts.per_distance { ChargeMode::PerDistance } else { ChargeMode::PerTrip },
        speed: opts.speed.as_deref().map(|s| number(s, "speed")).transpose()?,
        keep_going: opts.keep_going,
        use_sn: opts.experimental_sn,
        weights: opts.weights.as_deref().map(parse_weights).transpose()?.unwrap_or_default(),
    };
    let report = run_pipeline_with_warnings(&loaded.scenario, loaded.warnings, &intent_source(opts, &loaded.scenario)?, &options)?;
    let tables = match stage {
        Stage::Filter => vec![compliance_table(&report.compliance)],
        Stage::Assign => vec![assignment_table(
            report.runs.iter().filter_map(|r| r.plan.as_ref().map(|p| (r.coalition.to_string(), p))),
        )],
        Stage::Route => vec![route_table(report.runs.iter().filter_map(|r| r.route.as_ref()))],
        Stage::Emissions => vec![emission_table(&report.emissions, &options.weights)],
        Stage::Plan => plan_tables(&report, &options.weights),
    };
    Ok(render(&tables, opts.csv))
}

fn parse_effector(text: &str) -> Result<ConditionEffector, CliError> {
    let parts: Vec<&str> = text.split(':').collect();
    let [name, pol, n] = parts[..] else {
        return Err(invalid(format!("effector `{text}` is not CONDITION:+|-:N")));
    };
    let polarity = match pol {
        "+" => Polarity::Positive,
        "-" => Polarity::Negative,
        other => return Err(invalid(format!("polarity `{other}` must be + or -"))),
    };
    let n: u32 = n.parse().map_err(|_| invalid(format!("multiplicity `{n}` is not a count")))?;
    ConditionEffector::new(name, polarity, n).map_err(invalid)
}

pub fn effectors(path: Option<&str>, inline: &[String], union: &str) -> Result<String, CliError> {
    let mode = match union {
        "max" => UnionMode::Max,
        "sum" => UnionMode::Sum,
        other => return Err(CliError::Usage(format!("unknown union `{other}` (expected max or sum)"))),
    };
    let mut list = inline.iter().map(|e| parse_effector(e)).collect::<Result<Vec<_>, _>>()?;
    let scenario = path.map(|p| load(p, false)).transpose()?.map(|l| l.scenario);
    if let Some(s) = &scenario {
        for e in &s.uncertainty {
            list.push(ConditionEffector::new(&e.condition, e.polarity, e.multiplicity).map_err(invalid)?);
        }
    }
    if list.is_empty() {
        return Err(invalid("no effectors given"));
    }
    let k = effector_sum(&list).map_err(invalid)?;
    let mut t = Table::new("uncertainty", &["field", "value"]);
    for e in &list {
        let sign = if e.polarity == Polarity::Positive { "+" } else { "-" };
        t.push(vec![format!("effector {}", e.condition.name), format!("{sign} x{}", e.multiplicity)]);
    }
    t.push(vec!["k_o".into(), dec(&k.value())]);
    if let Some(deltas) = scenario.as_ref().and_then(|s| s.city_deltas.as_ref()) {
        let c = system_complexity(k, deltas, mode);
        t.push(vec!["system_complexity".into(), dec(&c)]);
        t.push(vec!["system_state".into(), dec(&system_state(c).map_err(invalid)?)]);
    }
    Ok(t.to_text())
}

pub fn trio(complexity: &str, k: &str, da: &str, de: &str, eps: Option<&str>) -> Result<String, CliError> {
    let k = UncertaintyValue::new(number(k, "k")?).map_err(invalid)?;
    let eps = eps.map(|e| number(e, "eps")).transpose()?.unwrap_or_else(default_trio_eps);
    let state = classify_trio(number(complexity, "complexity")?, k, number(da, "da")?, number(de, "de")?, eps)
        .map_err(invalid)?;
    Ok(format!("{state}\n"))
}

pub fn spider() -> String {
    let mut t = Table::new("spider", &["node", "links", "class"]);
    for (node, class) in canonical_spider_network() {
        t.push(vec![node.kind.to_string(), format!("{:?}/{:?}", node.links.0, node.links.1), class.to_string()]);
    }
    t.to_text()
}
