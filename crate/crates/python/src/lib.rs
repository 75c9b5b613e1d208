//! Python bindings. Exact quantities cross the boundary as decimal or
//! `p/q` strings so nothing is rounded; wrap them in `fractions.Fraction`
//! when arithmetic is needed.

use std::collections::BTreeMap;

use pyo3::create_exception;
use pyo3::exceptions::{PyException, PyValueError};
use pyo3::prelude::*;

use colog_core::assignment::min_trips as core_min_trips;
use colog_core::collab::{enumerate_sign_cases, eval_scs, CollaborationOutcome, Target};
use colog_core::complexity::{
    canonical_spider_network, classify_trio as core_classify_trio, default_trio_eps, effector_sum, ConditionEffector,
    Polarity, UncertaintyValue,
};
use colog_core::compliance::EmissionCheck;
use colog_core::emissions::{ChargeMode, Weights};
use colog_core::fixtures::{run_bundled, BUNDLED};
use colog_core::num::{dec, parse_rational, Rational};
use colog_core::pipeline::{run_pipeline_with_warnings, IntentSource, PipelineError, PipelineOptions, PipelineReport};
use colog_core::report::{plan_tables, render_long_csv, render_text};
use colog_core::routing::shortest_path as core_shortest_path;
use colog_core::scenario::{parse_scenario, CollaborationBlocks, ShipperId, SignAssignment};

create_exception!(colog, InfeasibleError, PyException);

type RankedRow = (usize, String, String, String, String);

fn value_err(e: impl ToString) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn rational(text: &str) -> PyResult<Rational> {
    parse_rational(text).map_err(value_err)
}

fn pipeline_err(e: PipelineError) -> PyErr {
    if e.is_infeasible() {
        InfeasibleError::new_err(e.to_string())
    } else {
        value_err(e)
    }
}

fn outcome_dict(o: &CollaborationOutcome) -> BTreeMap<&'static str, Vec<String>> {
    BTreeMap::from([
        ("sn", o.sn.iter().map(dec).collect()),
        ("cc", o.cc.iter().map(dec).collect()),
        ("sn_weight", vec![dec(&o.sn_weight)]),
        ("cc_weight", vec![dec(&o.cc_weight)]),
    ])
}

/// A validated scenario document.
#[pyclass(frozen)]
struct Scenario {
    inner: colog_core::scenario::Scenario,
    #[pyo3(get)]
    warnings: Vec<String>,
}

#[pymethods]
impl Scenario {
    #[staticmethod]
    fn from_toml(text: &str) -> PyResult<Self> {
        let loaded = parse_scenario(text).map_err(value_err)?;
        Ok(Self { inner: loaded.scenario, warnings: loaded.warnings })
    }

    #[staticmethod]
    fn load(path: &str) -> PyResult<Self> {
        let text = std::fs::read_to_string(path).map_err(value_err)?;
        Self::from_toml(&text)
    }

    fn to_toml(&self) -> String {
        self.inner.to_toml_string()
    }

    #[getter]
    fn shippers(&self) -> Vec<String> {
        self.inner.shippers.iter().map(|s| s.id.to_string()).collect()
    }

    #[getter]
    fn trucks(&self) -> Vec<String> {
        self.inner.trucks.iter().map(|t| t.key.to_string()).collect()
    }

    #[getter]
    fn cases(&self) -> Vec<String> {
        self.inner.cases.iter().map(|c| c.id.clone()).collect()
    }

    /// `(path, length)`; the path starts at `start` and is empty when both ends coincide.
    fn shortest_path(&self, start: &str, end: &str) -> PyResult<(Vec<String>, String)> {
        let (path, len) = core_shortest_path(&self.inner.network, start, end).map_err(value_err)?;
        Ok((path, dec(&len)))
    }

    /// Minimum-trip plan for the pooled orders and trucks of `shippers`.
    fn min_trips(&self, shippers: Vec<String>) -> PyResult<Vec<(String, Vec<String>, String)>> {
        let ids: Vec<ShipperId> = shippers.iter().map(|s| ShipperId::from(s.as_str())).collect();
        let orders: Vec<_> = self.inner.orders.iter().filter(|o| ids.contains(&o.shipper)).cloned().collect();
        let trucks: Vec<_> = self.inner.trucks.iter().filter(|t| ids.contains(t.owner())).cloned().collect();
        let plan = core_min_trips(&orders, &trucks).map_err(|e| InfeasibleError::new_err(e.to_string()))?;
        Ok(plan
            .trips
            .iter()
            .map(|t| (t.truck.to_string(), t.orders.iter().map(|o| o.to_string()).collect(), dec(&t.load)))
            .collect())
    }

    /// Best binary sign cases of the scenario's blocks as
    /// `(case_id, b_signs, c_signs, sn_weight, cc_weight)`.
    #[pyo3(signature = (target = "both", top = 10))]
    fn enumerate_cases(&self, target: &str, top: usize) -> PyResult<Vec<RankedRow>> {
        let target: Target = target.parse().map_err(PyValueError::new_err)?;
        let blocks = self.inner.blocks.as_ref().ok_or_else(|| value_err("scenario has no collaboration blocks"))?;
        Ok(enumerate_sign_cases(blocks, target)
            .into_iter()
            .take(top)
            .map(|r| {
                (r.case_id, r.signs.b_string(), r.signs.c_string(), dec(&r.outcome.sn_weight), dec(&r.outcome.cc_weight))
            })
            .collect())
    }

    /// Runs the operational pipeline. `from_macro` is a case id, `signs`
    /// or `best`; without it or `intents` the compliance rule's intents apply.
    #[pyo3(signature = (intents = None, from_macro = None, c3_inverted = false, per_distance = false, keep_going = false, weights = None))]
    fn plan(
        &self,
        intents: Option<Vec<String>>,
        from_macro: Option<String>,
        c3_inverted: bool,
        per_distance: bool,
        keep_going: bool,
        weights: Option<BTreeMap<String, String>>,
    ) -> PyResult<Plan> {
        let source = match (intents, from_macro.as_deref()) {
            (Some(v), _) => IntentSource::Direct(v.iter().map(|x| rational(x)).collect::<PyResult<_>>()?),
            (None, None) => IntentSource::default_for(&self.inner),
            (None, Some("signs")) => IntentSource::ScenarioSigns,
            (None, Some("best")) => IntentSource::BestCase(Target::Both),
            (None, Some(id)) => IntentSource::Case(id.to_string()),
        };
        let weights = Weights(
            weights.unwrap_or_default().iter().map(|(k, v)| Ok((k.clone(), rational(v)?))).collect::<PyResult<_>>()?,
        );
        let options = PipelineOptions {
            emission_check: if c3_inverted { EmissionCheck::AtMost } else { EmissionCheck::AtLeast },
            charge: if per_distance { ChargeMode::PerDistance } else { ChargeMode::PerTrip },
            keep_going,
            weights,
            ..PipelineOptions::default()
        };
        let report = run_pipeline_with_warnings(&self.inner, self.warnings.clone(), &source, &options)
            .map_err(pipeline_err)?;
        Ok(Plan { report, weights: options.weights })
    }
}

/// Result of [`Scenario::plan`].
#[pyclass(frozen)]
struct Plan {
    report: PipelineReport,
    weights: Weights,
}

#[pymethods]
impl Plan {
    #[getter]
    fn intents(&self) -> Vec<String> {
        self.report.intents.iter().map(dec).collect()
    }

    #[getter]
    fn accepted_trucks(&self) -> Vec<String> {
        self.report.compliance.accepted().map(|k| k.to_string()).collect()
    }

    #[getter]
    fn unserved(&self) -> Vec<String> {
        self.report.unserved.iter().map(|s| s.to_string()).collect()
    }

    /// Total trip length per coalition kind.
    #[getter]
    fn triplengths(&self) -> BTreeMap<String, String> {
        let r = &self.report.routing;
        BTreeMap::from([("FC".into(), dec(&r.fc)), ("PC".into(), dec(&r.pc)), ("NC".into(), dec(&r.nc))])
    }

    #[getter]
    fn emissions(&self) -> BTreeMap<String, String> {
        self.report.emissions.by_kind.iter().map(|(k, v)| (k.to_string(), v.to_string())).collect()
    }

    /// Routes as `(coalition, route, length)`.
    #[getter]
    fn routes(&self) -> Vec<(String, String, String)> {
        self.report
            .runs
            .iter()
            .filter_map(|r| r.route.as_ref())
            .flat_map(|res| res.routes.iter().map(move |rt| (res.coalition.to_string(), rt.describe(), dec(&rt.length))))
            .collect()
    }

    fn text(&self) -> String {
        render_text(&plan_tables(&self.report, &self.weights))
    }

    fn csv(&self) -> String {
        render_long_csv(&plan_tables(&self.report, &self.weights))
    }
}

/// SN and CC vectors with their weights for one sign assignment.
#[pyfunction]
fn eval_signs(
    b2b: Vec<i64>,
    b2c: Vec<i64>,
    c2b: Vec<i64>,
    c2c: Vec<i64>,
    b: &str,
    c: &str,
) -> PyResult<BTreeMap<&'static str, Vec<String>>> {
    let blocks = CollaborationBlocks::from_ints(&b2b, &b2c, &c2b, &c2c).map_err(value_err)?;
    let signs = SignAssignment::parse(b, c).map_err(value_err)?;
    Ok(outcome_dict(&eval_scs(&blocks, &signs).map_err(value_err)?))
}

/// `k_o` from `(condition, "+"|"-", multiplicity)` triples.
#[pyfunction]
fn effector_k(effectors: Vec<(String, String, u32)>) -> PyResult<String> {
    let list = effectors
        .iter()
        .map(|(name, pol, n)| {
            let polarity = match pol.as_str() {
                "+" => Polarity::Positive,
                "-" => Polarity::Negative,
                other => return Err(value_err(format!("polarity `{other}` must be + or -"))),
            };
            ConditionEffector::new(name, polarity, *n).map_err(value_err)
        })
        .collect::<PyResult<Vec<_>>>()?;
    Ok(dec(&effector_sum(&list).map_err(value_err)?.value()))
}

#[pyfunction]
#[pyo3(signature = (complexity, k, d_a, d_e, eps = None))]
fn classify_trio(complexity: &str, k: &str, d_a: &str, d_e: &str, eps: Option<&str>) -> PyResult<String> {
    let k = UncertaintyValue::new(rational(k)?).map_err(value_err)?;
    let eps = eps.map(rational).transpose()?.unwrap_or_else(default_trio_eps);
    let state = core_classify_trio(rational(complexity)?, k, rational(d_a)?, rational(d_e)?, eps).map_err(value_err)?;
    Ok(state.to_string())
}

/// `(node, class)` for the eight octagon nodes.
#[pyfunction]
fn spider() -> Vec<(String, String)> {
    canonical_spider_network().into_iter().map(|(n, c)| (n.kind.to_string(), c.to_string())).collect()
}

#[pyfunction]
fn fixture_names() -> Vec<&'static str> {
    BUNDLED.iter().map(|b| b.name).collect()
}

/// `(passed, report)` for a bundled fixture.
#[pyfunction]
fn run_fixture(name: &str) -> PyResult<(bool, String)> {
    let run = run_bundled(name).map_err(value_err)?;
    Ok((run.passed(), run.render()))
}

#[pymodule]
fn colog(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Scenario>()?;
    m.add_class::<Plan>()?;
    m.add("InfeasibleError", m.py().get_type::<InfeasibleError>())?;
    m.add_function(wrap_pyfunction!(eval_signs, m)?)?;
    m.add_function(wrap_pyfunction!(effector_k, m)?)?;
    m.add_function(wrap_pyfunction!(classify_trio, m)?)?;
    m.add_function(wrap_pyfunction!(spider, m)?)?;
    m.add_function(wrap_pyfunction!(fixture_names, m)?)?;
    m.add_function(wrap_pyfunction!(run_fixture, m)?)?;
    Ok(())
}
