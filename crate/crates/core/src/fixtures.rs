//! Bundled reference scenarios with machine-readable expectations.
//!
//! Each expectation names a quantity, the value printed in the reference
//! tables (`paper_value`) and, where the printed value is known to be wrong,
//! the recomputed `derived_value` with `flagged = true`. A flagged check
//! passes when the computed value equals the derived one.

use std::collections::BTreeMap;

use serde::Deserialize;

use crate::assignment::{min_trips, Trip, TripPlan};
use crate::collab::{enumerate_sign_cases, eval_scs, rank_sampled_cases, CollaborationOutcome, Target};
use crate::complexity::{effector_sum, ConditionEffector};
use crate::compliance::filter_trucks;
use crate::emissions::{account_emissions, compare_emissions, resolve_alternative, ChargeMode, EmissionVector, Weights};
use crate::num::{dec, Rational};
use crate::routing::{build_routes_with, compare_scenarios, Coalition, CoalitionKind, RouteResult, Router};
use crate::scenario::{parse_scenario, ClientId, Scenario, ShipperId, SignAssignment, Truck, TruckKey};

pub struct Bundled {
    pub name: &'static str,
    pub scenario: &'static str,
    pub expect: &'static str,
}

pub const BUNDLED: [Bundled; 3] = [
    Bundled {
        name: "table6",
        scenario: include_str!("../fixtures/table6.scn"),
        expect: include_str!("../fixtures/table6.expect.toml"),
    },
    Bundled {
        name: "sample1",
        scenario: include_str!("../fixtures/sample1.scn"),
        expect: include_str!("../fixtures/sample1.expect.toml"),
    },
    Bundled {
        name: "sample2",
        scenario: include_str!("../fixtures/sample2.scn"),
        expect: include_str!("../fixtures/sample2.expect.toml"),
    },
];

pub fn bundled(name: &str) -> Option<&'static Bundled> {
    BUNDLED.iter().find(|b| b.name == name)
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("fixture `{fixture}`: {message}")]
pub struct FixtureError {
    pub fixture: String,
    pub message: String,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ExpectFile {
    #[serde(default)]
    route_fixture: Vec<RouteFixture>,
    #[serde(default)]
    expect: Vec<Expectation>,
}

/// A fixed schedule as printed in the reference tables: routed as given,
/// without re-solving the assignment.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RouteFixture {
    pub name: String,
    pub kind: String,
    pub members: Vec<String>,
    pub trips: Vec<FixtureTrip>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FixtureTrip {
    /// One truck, or several alternatives (`"S2/T4|S4/T7"`).
    pub truck: String,
    pub clients: Vec<String>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Expectation {
    pub id: String,
    pub kind: String,
    #[serde(default)]
    pub subject: Option<String>,
    #[serde(default)]
    pub paper_value: Option<toml::Value>,
    #[serde(default)]
    pub derived_value: Option<toml::Value>,
    #[serde(default)]
    pub flagged: bool,
    #[serde(default)]
    pub note: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CheckOutcome {
    pub id: String,
    pub expected: String,
    pub actual: String,
    /// Printed value when it differs from the expected one.
    pub paper: Option<String>,
    pub note: Option<String>,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FixtureRun {
    pub name: String,
    pub checks: Vec<CheckOutcome>,
}

impl FixtureRun {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for c in &self.checks {
            let status = if c.passed { "PASS" } else { "FAIL" };
            out.push_str(&format!("{status} {}: expected {}, got {}", c.id, c.expected, c.actual));
            if let Some(p) = &c.paper {
                out.push_str(&format!(" [printed {p}]"));
            }
            out.push('\n');
        }
        let passed = self.checks.iter().filter(|c| c.passed).count();
        out.push_str(&format!("{}: {passed}/{} checks passed\n", self.name, self.checks.len()));
        out
    }
}

fn value_text(v: &toml::Value) -> String {
    match v {
        toml::Value::String(s) => s.clone(),
        toml::Value::Integer(i) => i.to_string(),
        toml::Value::Float(f) => crate::num::from_f64_decimal(*f).map(|r| dec(&r)).unwrap_or_else(|_| f.to_string()),
        toml::Value::Boolean(b) => b.to_string(),
        other => other.to_string(),
    }
}

/// Evaluation context shared by all checks of one fixture.
pub struct Context {
    pub scenario: Scenario,
    pub accepted: Vec<Truck>,
    pub router: Router,
    pub routes: BTreeMap<String, (RouteResult, EmissionVector)>,
    fixtures: Vec<RouteFixture>,
}

impl Context {
    fn outcome(&self, subject: &str) -> Result<CollaborationOutcome, String> {
        let blocks = self.scenario.blocks.as_ref().ok_or("scenario has no blocks")?;
        let signs: SignAssignment = if subject == "signs" {
            self.scenario.signs.clone().ok_or("scenario has no signs")?
        } else {
            self.scenario.cases.iter().find(|c| c.id == subject).ok_or(format!("no case `{subject}`"))?.signs.clone()
        };
        eval_scs(blocks, &signs).map_err(|e| e.to_string())
    }

    fn kind_fixtures(&self, kind: &str) -> Vec<&RouteFixture> {
        self.fixtures.iter().filter(|f| f.kind == kind).collect()
    }

    fn group_members(&self, label: &str) -> Result<Vec<String>, String> {
        self.fixtures
            .iter()
            .find(|f| f.kind == "FC" && f.members.join("-") == label)
            .map(|f| f.members.clone())
            .ok_or(format!("no FC route fixture `{label}`"))
    }

    fn solo_fixture(&self, member: &str) -> Result<&(RouteResult, EmissionVector), String> {
        let f = self
            .fixtures
            .iter()
            .find(|f| f.kind == "NC" && f.members == [member])
            .ok_or(format!("no NC route fixture for `{member}`"))?;
        Ok(&self.routes[&f.name])
    }

    fn evaluate(&self, kind: &str, subject: Option<&str>) -> Result<String, String> {
        let subject_of = || subject.ok_or(format!("`{kind}` needs a subject"));
        let blocks = || self.scenario.blocks.as_ref().ok_or("scenario has no blocks".to_string());
        let join = |v: &[Rational]| v.iter().map(dec).collect::<Vec<_>>().join(",");
        Ok(match kind {
            "sn_weight" => dec(&self.outcome(subject_of()?)?.sn_weight),
            "cc_weight" => dec(&self.outcome(subject_of()?)?.cc_weight),
            "sn_vector" => join(&self.outcome(subject_of()?)?.sn),
            "cc_vector" => join(&self.outcome(subject_of()?)?.cc),
            "case_count" => enumerate_sign_cases(blocks()?, Target::Both).len().to_string(),
            "best_case" => {
                let target: Target = subject.unwrap_or("both").parse()?;
                let cases: Vec<SignAssignment> = self.scenario.cases.iter().map(|c| c.signs.clone()).collect();
                let (i, _) = rank_sampled_cases(&cases, blocks()?, target).map_err(|e| e.to_string())?;
                self.scenario.cases[i].id.clone()
            }
            "effector_k" => {
                let effectors = self
                    .scenario
                    .uncertainty
                    .iter()
                    .map(|e| ConditionEffector::new(&e.condition, e.polarity, e.multiplicity))
                    .collect::<Result<Vec<_>, _>>()
                    .map_err(|e| e.to_string())?;
                dec(&effector_sum(&effectors).map_err(|e| e.to_string())?.value())
            }
            "verdict" | "flags" | "inference" => {
                let key: TruckKey = subject_of()?.parse().map_err(|e: crate::scenario::ScenarioError| e.to_string())?;
                let rule = self.scenario.compliance.as_ref().ok_or("scenario has no compliance rule")?;
                let report = filter_trucks(&self.scenario.trucks, rule).map_err(|e| e.to_string())?;
                let c = report.check(&key).ok_or(format!("no truck {key}"))?;
                match kind {
                    "verdict" => c.verdict().to_string(),
                    "inference" => c.inference().to_string(),
                    _ => [c.c1, c.c2, c.c3].iter().map(|&b| if b { "yes" } else { "no" }).collect::<Vec<_>>().join(","),
                }
            }
            "accepted" => self.accepted.iter().map(|t| t.key.to_string()).collect::<Vec<_>>().join(" "),
            "min_trips" => {
                let shipper = ShipperId::new(subject_of()?);
                let orders: Vec<_> = self.scenario.orders_of(&shipper).cloned().collect();
                let fleet: Vec<Truck> = self.accepted.iter().filter(|t| t.owner() == &shipper).cloned().collect();
                min_trips(&orders, &fleet).map_err(|e| e.to_string())?.trip_count().to_string()
            }
            "shortest_path" => {
                let s = subject_of()?;
                let (a, b) = s.split_once(" -> ").ok_or("shortest_path subject is `from -> to`")?;
                dec(&self.router.shortest_path(a, b).map_err(|e| e.to_string())?.1)
            }
            "route_text" => {
                let (r, _) = self.routes.get(subject_of()?).ok_or("unknown route fixture")?;
                r.routes.iter().map(|x| format!("{}({})", x.describe(), dec(&x.length))).collect::<Vec<_>>().join(" ")
            }
            "route_total" => dec(&self.routes.get(subject_of()?).ok_or("unknown route fixture")?.0.total),
            "triplength" => {
                dec(&self.kind_fixtures(subject_of()?).iter().map(|f| self.routes[&f.name].0.total).sum::<Rational>())
            }
            "triplength_inequality" => {
                let all: Vec<RouteResult> = self.fixtures.iter().map(|f| self.routes[&f.name].0.clone()).collect();
                match compare_scenarios(&all).collaboration_shorter {
                    Some(b) => b.to_string(),
                    None => "n/a".into(),
                }
            }
            "triplength_group" => {
                let label = subject_of()?;
                let members = self.group_members(label)?;
                let fc = &self.routes[&self.kind_fixtures("FC").into_iter().find(|f| f.members == members).unwrap().name].0;
                let solo: Rational = members.iter().map(|m| self.solo_fixture(m).map(|r| r.0.total)).sum::<Result<_, _>>()?;
                format!("{} vs {} ({})", dec(&fc.total), dec(&solo), fc.total < solo)
            }
            "emissions" => {
                let s = subject_of()?;
                if ["FC", "PC", "NC"].contains(&s) {
                    self.kind_fixtures(s).iter().map(|f| self.routes[&f.name].1.clone()).sum::<EmissionVector>().to_string()
                } else {
                    self.routes.get(s).ok_or("unknown route fixture")?.1.to_string()
                }
            }
            "emission_inequality" => {
                let by_kind: BTreeMap<CoalitionKind, EmissionVector> = [CoalitionKind::FC, CoalitionKind::PC, CoalitionKind::NC]
                    .into_iter()
                    .map(|k| (k, self.kind_fixtures(&k.to_string()).iter().map(|f| self.routes[&f.name].1.clone()).sum()))
                    .collect();
                let cmp = compare_emissions(&by_kind, &Weights::default());
                cmp.verdict.map(|(v, _)| v.to_string()).unwrap_or_else(|| "n/a".into())
            }
            "emission_group" => {
                let label = subject_of()?;
                let members = self.group_members(label)?;
                let fc = self.kind_fixtures("FC").into_iter().find(|f| f.members == members).unwrap();
                let solo: EmissionVector =
                    members.iter().map(|m| self.solo_fixture(m).map(|r| r.1.clone())).collect::<Result<Vec<_>, _>>()?.into_iter().sum();
                let by_kind = BTreeMap::from([(CoalitionKind::FC, self.routes[&fc.name].1.clone()), (CoalitionKind::NC, solo.clone())]);
                let v = compare_emissions(&by_kind, &Weights::default()).verdict.map(|(v, _)| v).unwrap_or(false);
                format!("{} vs {} ({v})", self.routes[&fc.name].1, solo)
            }
            other => return Err(format!("unknown expectation kind `{other}`")),
        })
    }
}

fn parse_kind(s: &str) -> Result<CoalitionKind, String> {
    match s {
        "FC" => Ok(CoalitionKind::FC),
        "PC" => Ok(CoalitionKind::PC),
        "NC" => Ok(CoalitionKind::NC),
        other => Err(format!("unknown coalition kind `{other}`")),
    }
}

/// Routes a printed schedule. Trip orders are all member orders for the
/// listed clients; alternatives resolve to the lowest-emission truck.
fn route_fixture(scenario: &Scenario, router: &Router, f: &RouteFixture) -> Result<(RouteResult, EmissionVector), String> {
    let members: Vec<ShipperId> = f.members.iter().map(ShipperId::new).collect();
    let coalition = Coalition {
        kind: parse_kind(&f.kind)?,
        members: members.iter().cloned().collect(),
        served_clients: f.trips.iter().flat_map(|t| t.clients.iter().map(ClientId::new)).collect(),
    };
    let mut trips = Vec::new();
    let mut orders = Vec::new();
    for t in &f.trips {
        let options: Vec<TruckKey> = t
            .truck
            .split('|')
            .map(|s| s.trim().parse().map_err(|e: crate::scenario::ScenarioError| e.to_string()))
            .collect::<Result<_, _>>()?;
        let truck = resolve_alternative(&options, &scenario.trucks, &Weights::default()).map_err(|e| e.to_string())?;
        let picked: Vec<_> = scenario
            .orders
            .iter()
            .filter(|o| members.contains(&o.shipper) && t.clients.iter().any(|c| c == o.client.as_str()))
            .cloned()
            .collect();
        if picked.is_empty() {
            return Err(format!("route fixture `{}` has a trip with no orders", f.name));
        }
        let mut ids: Vec<_> = picked.iter().map(|o| o.id.clone()).collect();
        ids.sort();
        trips.push(Trip { truck: truck.key.clone(), orders: ids, load: picked.iter().map(|o| o.quantity()).sum() });
        orders.extend(picked);
    }
    let plan = TripPlan { trips };
    let result = build_routes_with(router, &coalition, &plan, &orders, &scenario.network).map_err(|e| e.to_string())?;
    let emissions = account_emissions(&result, &scenario.trucks, ChargeMode::PerTrip).map_err(|e| e.to_string())?;
    Ok((result, emissions))
}

pub fn load_context(scenario_text: &str, expect_text: &str) -> Result<(Context, Vec<Expectation>), String> {
    let scenario = parse_scenario(scenario_text).map_err(|e| e.to_string())?.scenario;
    let file: ExpectFile = toml::from_str(expect_text).map_err(|e| e.to_string())?;
    let accepted = match &scenario.compliance {
        Some(rule) => {
            let report = filter_trucks(&scenario.trucks, rule).map_err(|e| e.to_string())?;
            scenario.trucks.iter().filter(|t| report.is_accepted(&t.key)).cloned().collect()
        }
        None => Vec::new(),
    };
    let router = Router::new(&scenario.network);
    let mut routes = BTreeMap::new();
    for f in &file.route_fixture {
        routes.insert(f.name.clone(), route_fixture(&scenario, &router, f)?);
    }
    Ok((Context { scenario, accepted, router, routes, fixtures: file.route_fixture }, file.expect))
}

pub fn run_fixture_text(name: &str, scenario_text: &str, expect_text: &str) -> Result<FixtureRun, FixtureError> {
    let err = |message: String| FixtureError { fixture: name.to_string(), message };
    let (ctx, expectations) = load_context(scenario_text, expect_text).map_err(err)?;
    let mut checks = Vec::new();
    for e in expectations {
        let paper = e.paper_value.as_ref().map(value_text);
        let derived = e.derived_value.as_ref().map(value_text);
        let expected = if e.flagged { derived.clone() } else { paper.clone().or(derived.clone()) }
            .ok_or_else(|| err(format!("expectation `{}` has no value", e.id)))?;
        let actual = ctx.evaluate(&e.kind, e.subject.as_deref()).unwrap_or_else(|m| format!("error: {m}"));
        checks.push(CheckOutcome {
            passed: actual == expected,
            paper: paper.filter(|p| p != &expected),
            id: e.id,
            expected,
            actual,
            note: e.note,
        });
    }
    Ok(FixtureRun { name: name.to_string(), checks })
}

pub fn run_bundled(name: &str) -> Result<FixtureRun, FixtureError> {
    let b = bundled(name).ok_or_else(|| FixtureError { fixture: name.to_string(), message: "no such bundled fixture".into() })?;
    run_fixture_text(b.name, b.scenario, b.expect)
}
