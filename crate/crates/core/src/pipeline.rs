//! End-to-end operational run: intents, truck filter, trip minimization,
//! routing and emissions, in that order.

use std::collections::{BTreeMap, BTreeSet};

use crate::assignment::{min_trips, window_conflicts, AssignmentError, TripPlan, WindowConflict};
use crate::collab::{eval_scs, rank_sampled_cases, CollabError, CollaborationOutcome, Target};
use crate::compliance::{filter_trucks_with, ComplianceError, ComplianceReport, EmissionCheck};
use crate::emissions::{account_emissions, compare_emissions, ChargeMode, EmissionComparison, EmissionVector, EmissionsError, Weights};
use crate::num::Rational;
use crate::routing::{
    build_routes_with, compare_scenarios, detect_coalitions, validate_schedule, Coalition, CoalitionKind, RouteResult,
    Router, RoutingError, ScenarioComparison, ScheduleViolation,
};
use crate::scenario::{Order, Scenario, ShipperId, SignAssignment, Truck};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PipelineError {
    #[error("invalid input: {0}")]
    Validation(String),
    #[error("macro stage: {0}")]
    Macro(#[from] CollabError),
    #[error("compliance stage: {0}")]
    Compliance(#[from] ComplianceError),
    #[error("assignment stage, {coalition}: {source}")]
    Assignment { coalition: String, source: AssignmentError },
    #[error("routing stage, {coalition}: {source}")]
    Routing { coalition: String, source: RoutingError },
    #[error("emission stage, {coalition}: {source}")]
    Emissions { coalition: String, source: EmissionsError },
}

impl PipelineError {
    /// Errors caused by the data admitting no solution, as opposed to
    /// malformed input.
    pub fn is_infeasible(&self) -> bool {
        matches!(self, PipelineError::Assignment { .. } | PipelineError::Routing { source: RoutingError::Unreachable { .. }, .. })
    }
}

/// Where the compliance intents come from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum IntentSource {
    /// Explicit `(S, E, En)` percentages.
    Direct(Vec<Rational>),
    /// The intents stored in the scenario's compliance rule.
    Rule,
    /// A case declared in the scenario, evaluated on its blocks.
    Case(String),
    /// The scenario's own sign assignment.
    ScenarioSigns,
    /// The best declared case under the given target.
    BestCase(Target),
}

impl IntentSource {
    /// The compliance rule's intents when there is a rule, otherwise the
    /// scenario's own signs.
    pub fn default_for(scenario: &Scenario) -> Self {
        if scenario.compliance.is_none() && scenario.signs.is_some() {
            IntentSource::ScenarioSigns
        } else {
            IntentSource::Rule
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct PipelineOptions {
    pub emission_check: EmissionCheck,
    pub charge: ChargeMode,
    /// Overrides the scenario's speed.
    pub speed: Option<Rational>,
    /// Record per-coalition failures and continue instead of aborting.
    pub keep_going: bool,
    /// Take intents from the SN vector instead of CC. Experimental.
    pub use_sn: bool,
    pub weights: Weights,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MacroStage {
    pub case: String,
    pub signs: SignAssignment,
    pub outcome: CollaborationOutcome,
    pub from_sn: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoalitionRun {
    pub coalition: Coalition,
    pub plan: Option<TripPlan>,
    pub route: Option<RouteResult>,
    pub window_conflicts: Vec<WindowConflict>,
    pub violations: Vec<ScheduleViolation>,
    pub emissions: Option<EmissionVector>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PipelineReport {
    pub warnings: Vec<String>,
    pub macro_stage: Option<MacroStage>,
    pub intents: Vec<Rational>,
    pub compliance: ComplianceReport,
    /// Shippers left out because none of their trucks passed the filter.
    pub unserved: Vec<ShipperId>,
    pub runs: Vec<CoalitionRun>,
    pub routing: ScenarioComparison,
    pub emissions: EmissionComparison,
}

fn resolve_intents(
    scenario: &Scenario,
    source: &IntentSource,
    use_sn: bool,
) -> Result<(Vec<Rational>, Option<MacroStage>), PipelineError> {
    let rule = || scenario.compliance.as_ref().ok_or_else(|| PipelineError::Validation("scenario has no compliance rule".into()));
    let blocks = || scenario.blocks.as_ref().ok_or_else(|| PipelineError::Validation("scenario has no collaboration blocks".into()));
    let (case, signs) = match source {
        IntentSource::Direct(v) => return Ok((v.clone(), None)),
        IntentSource::Rule => return Ok((rule()?.intents.clone(), None)),
        IntentSource::Case(id) => {
            let named = scenario
                .cases
                .iter()
                .find(|c| &c.id == id)
                .ok_or_else(|| PipelineError::Validation(format!("scenario declares no case `{id}`")))?;
            (named.id.clone(), named.signs.clone())
        }
        IntentSource::ScenarioSigns => {
            let signs = scenario.signs.clone().ok_or_else(|| PipelineError::Validation("scenario has no signs".into()))?;
            ("signs".to_string(), signs)
        }
        IntentSource::BestCase(target) => {
            let all: Vec<SignAssignment> = scenario.cases.iter().map(|c| c.signs.clone()).collect();
            let (i, _) = rank_sampled_cases(&all, blocks()?, *target)?;
            (scenario.cases[i].id.clone(), all[i].clone())
        }
    };
    let outcome = eval_scs(blocks()?, &signs)?;
    let intents = if use_sn { outcome.sn.clone() } else { outcome.cc.clone() };
    Ok((intents, Some(MacroStage { case, signs, outcome, from_sn: use_sn })))
}

/// Orders a coalition delivers: every member order for clients it serves.
fn coalition_orders(scenario: &Scenario, c: &Coalition) -> Vec<Order> {
    scenario
        .orders
        .iter()
        .filter(|o| c.members.contains(&o.shipper) && c.served_clients.contains(&o.client))
        .cloned()
        .collect()
}

pub fn run_pipeline(scenario: &Scenario, source: &IntentSource, options: &PipelineOptions) -> Result<PipelineReport, PipelineError> {
    run_pipeline_with_warnings(scenario, Vec::new(), source, options)
}

pub fn run_pipeline_with_warnings(
    scenario: &Scenario,
    warnings: Vec<String>,
    source: &IntentSource,
    options: &PipelineOptions,
) -> Result<PipelineReport, PipelineError> {
    let (intents, macro_stage) = resolve_intents(scenario, source, options.use_sn)?;
    let compliance = match &scenario.compliance {
        Some(rule) => filter_trucks_with(&scenario.trucks, &rule.with_intents(intents.clone()), options.emission_check)?,
        None if scenario.trucks.is_empty() => ComplianceReport::default(),
        None => return Err(PipelineError::Validation("scenario has trucks but no compliance rule".into())),
    };

    let accepted: Vec<Truck> = scenario.trucks.iter().filter(|t| compliance.is_accepted(&t.key)).cloned().collect();
    let owners: BTreeSet<&ShipperId> = accepted.iter().map(|t| t.owner()).collect();
    let served: Vec<_> = scenario.shippers.iter().filter(|s| owners.contains(&s.id)).cloned().collect();
    let unserved = scenario.shippers.iter().filter(|s| !owners.contains(&s.id)).map(|s| s.id.clone()).collect();

    let speed = options.speed.unwrap_or(scenario.routing.speed);
    if speed <= Rational::from_integer(0) {
        return Err(PipelineError::Validation("speed must be positive".into()));
    }
    let router = Router::new(&scenario.network);
    let mut runs = Vec::new();
    for coalition in detect_coalitions(&served) {
        let label = coalition.to_string();
        let orders = coalition_orders(scenario, &coalition);
        let fleet: Vec<Truck> = accepted.iter().filter(|t| coalition.members.contains(t.owner())).cloned().collect();
        let mut run = CoalitionRun {
            coalition: coalition.clone(),
            plan: None,
            route: None,
            window_conflicts: Vec::new(),
            violations: Vec::new(),
            emissions: None,
            error: None,
        };
        let outcome = (|| -> Result<(), PipelineError> {
            let plan = min_trips(&orders, &fleet).map_err(|source| PipelineError::Assignment { coalition: label.clone(), source })?;
            run.window_conflicts = window_conflicts(&plan, &orders);
            let route = build_routes_with(&router, &coalition, &plan, &orders, &scenario.network)
                .map_err(|source| PipelineError::Routing { coalition: label.clone(), source })?;
            run.plan = Some(plan);
            let bound = scenario.routing.travel_bounds.iter().find(|b| b.members == coalition.members).map(|b| &b.window);
            run.violations = validate_schedule(&route, &orders, speed, scenario.routing.departure, bound);
            run.emissions = Some(
                account_emissions(&route, &fleet, options.charge)
                    .map_err(|source| PipelineError::Emissions { coalition: label.clone(), source })?,
            );
            run.route = Some(route);
            Ok(())
        })();
        if let Err(e) = outcome {
            if !options.keep_going {
                return Err(e);
            }
            run.error = Some(e.to_string());
        }
        runs.push(run);
    }

    let routes: Vec<RouteResult> = runs.iter().filter_map(|r| r.route.clone()).collect();
    let routing = compare_scenarios(&routes);
    let mut by_kind: BTreeMap<CoalitionKind, EmissionVector> = BTreeMap::new();
    for run in &runs {
        if let Some(v) = &run.emissions {
            *by_kind.entry(run.coalition.kind).or_default() += v.clone();
        }
    }
    let emissions = compare_emissions(&by_kind, &options.weights);

    Ok(PipelineReport { warnings, macro_stage, intents, compliance, unserved, runs, routing, emissions })
}
