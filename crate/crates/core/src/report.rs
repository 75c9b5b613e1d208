//! Tabular rendering shared by the text and CSV reporters. Text and CSV are
//! produced from the same [`Table`] values so both carry identical cells.

use crate::assignment::TripPlan;
use crate::collab::CollaborationOutcome;
use crate::compliance::ComplianceReport;
use crate::emissions::{EmissionComparison, VerdictBasis, Weights};
use crate::num::{dec, Rational};
use crate::pipeline::PipelineReport;
use crate::routing::RouteResult;
use crate::scenario::{Dimension, SignAssignment};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Table {
    pub title: String,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(title: impl Into<String>, header: &[&str]) -> Self {
        Self { title: title.into(), header: header.iter().map(|h| h.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.header).expect("in-memory write");
        for r in &self.rows {
            w.write_record(r).expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 cells")
    }

    /// Left-aligned columns separated by two spaces.
    pub fn to_text(&self) -> String {
        let widths: Vec<usize> = (0..self.header.len())
            .map(|i| self.rows.iter().map(|r| r[i].chars().count()).chain([self.header[i].chars().count()]).max().unwrap_or(0))
            .collect();
        let line = |cells: &[String]| {
            let padded: Vec<String> = cells.iter().zip(&widths).map(|(c, w)| format!("{c:<w$}")).collect();
            padded.join("  ").trim_end().to_string() + "\n"
        };
        let mut out = String::new();
        if !self.title.is_empty() {
            out.push_str(&format!("== {} ==\n", self.title));
        }
        out.push_str(&line(&self.header));
        for r in &self.rows {
            out.push_str(&line(r));
        }
        out
    }
}

fn flag(b: bool) -> String {
    if b { "yes" } else { "no" }.to_string()
}

pub fn macro_table(dims: &[Dimension], cases: &[(String, SignAssignment, CollaborationOutcome)]) -> Table {
    let tokens: Vec<String> = dims.iter().map(|d| d.token().to_ascii_lowercase()).collect();
    let mut header = vec!["case_id".to_string(), "b_signs".into(), "c_signs".into()];
    header.extend(tokens.iter().map(|t| format!("sn_{t}")));
    header.push("sn_weight".into());
    header.extend(tokens.iter().map(|t| format!("cc_{t}")));
    header.push("cc_weight".into());
    let mut t = Table { title: "macro".into(), header, rows: Vec::new() };
    for (id, signs, o) in cases {
        let mut row = vec![id.clone(), signs.b_string(), signs.c_string()];
        row.extend(o.sn.iter().map(dec));
        row.push(dec(&o.sn_weight));
        row.extend(o.cc.iter().map(dec));
        row.push(dec(&o.cc_weight));
        t.push(row);
    }
    t
}

pub fn compliance_table(report: &ComplianceReport) -> Table {
    let mut t = Table::new("compliance", &["shipper", "truck", "c1", "c2", "c3", "verdict", "inference"]);
    for c in &report.checks {
        t.push(vec![
            c.truck.owner.to_string(),
            c.truck.id.clone(),
            flag(c.c1),
            flag(c.c2),
            flag(c.c3),
            c.verdict().to_string(),
            c.inference().to_string(),
        ]);
    }
    t
}

pub fn assignment_table<'a>(plans: impl IntoIterator<Item = (String, &'a TripPlan)>) -> Table {
    let mut t = Table::new("assignment", &["shipper", "trip_index", "truck", "orders", "load_kg"]);
    for (who, plan) in plans {
        for (i, trip) in plan.trips.iter().enumerate() {
            let orders: Vec<&str> = trip.orders.iter().map(|o| o.as_str()).collect();
            t.push(vec![who.clone(), (i + 1).to_string(), trip.truck.to_string(), orders.join(" "), dec(&trip.load)]);
        }
    }
    t
}

pub fn route_table<'a>(results: impl IntoIterator<Item = &'a RouteResult>) -> Table {
    let mut t = Table::new("routes", &["coalition_kind", "members", "route", "length", "total_triplength"]);
    for r in results {
        let total = dec(&r.total);
        if r.routes.is_empty() {
            t.push(vec![r.coalition.kind.to_string(), r.coalition.label(), String::new(), "0".into(), total.clone()]);
        }
        for route in &r.routes {
            t.push(vec![r.coalition.kind.to_string(), r.coalition.label(), route.describe(), dec(&route.length), total.clone()]);
        }
    }
    t
}

pub fn emission_table(cmp: &EmissionComparison, weights: &Weights) -> Table {
    let mut t = Table::new("emissions", &["scenario_type", "base_symbol", "coefficient", "scalarized_total"]);
    for (kind, v) in &cmp.by_kind {
        let total = dec(&v.scalarize(weights));
        if v.is_empty() {
            t.push(vec![kind.to_string(), String::new(), "0".into(), total.clone()]);
        }
        for (base, c) in v.iter() {
            t.push(vec![kind.to_string(), base.to_string(), dec(c), total.clone()]);
        }
    }
    t
}

fn verdict_text(v: Option<bool>) -> String {
    match v {
        Some(true) => "true".into(),
        Some(false) => "false".into(),
        None => "n/a".into(),
    }
}

fn join_rationals(v: &[Rational]) -> String {
    v.iter().map(dec).collect::<Vec<_>>().join(",")
}

pub fn summary_table(report: &PipelineReport) -> Table {
    let mut t = Table::new("summary", &["field", "value"]);
    let mut kv = |k: &str, v: String| t.push(vec![k.to_string(), v]);
    if let Some(m) = &report.macro_stage {
        kv("macro_case", m.case.clone());
        kv("macro_signs", format!("{} {}", m.signs.b_string(), m.signs.c_string()));
        kv("intent_source", if m.from_sn { "SN (experimental)" } else { "CC" }.into());
    }
    kv("intents", join_rationals(&report.intents));
    kv(
        "accepted_trucks",
        report.compliance.accepted().map(|k| k.to_string()).collect::<Vec<_>>().join(" "),
    );
    kv("unserved_shippers", report.unserved.iter().map(|s| s.to_string()).collect::<Vec<_>>().join(" "));
    kv("triplength_fc", dec(&report.routing.fc));
    kv("triplength_pc", dec(&report.routing.pc));
    kv("triplength_nc", dec(&report.routing.nc));
    kv("triplength_fc_pc_below_nc", verdict_text(report.routing.collaboration_shorter));
    for g in &report.routing.groups {
        kv(
            &format!("triplength_group_{}", g.coalition),
            format!("{} vs {} ({})", dec(&g.collaborative), dec(&g.standalone), g.improves()),
        );
    }
    kv("emissions_fc_pc", report.emissions.collaborative.to_string());
    kv("emissions_nc", report.emissions.standalone.to_string());
    kv(
        "emissions_fc_pc_below_nc",
        match report.emissions.verdict {
            Some((v, VerdictBasis::Dominance)) => format!("{v} (dominance)"),
            Some((v, VerdictBasis::Scalarized)) => format!("{v} (scalarized)"),
            None => "n/a".into(),
        },
    );
    for run in &report.runs {
        let who = run.coalition.to_string();
        for c in &run.window_conflicts {
            kv("window_conflict", format!("{who} trip {}: {} / {}", c.trip + 1, c.first, c.second));
        }
        for v in &run.violations {
            kv("schedule_violation", format!("{who} {v}"));
        }
        if let Some(e) = &run.error {
            kv("error", e.clone());
        }
    }
    for w in &report.warnings {
        kv("warning", w.clone());
    }
    t
}

/// Stage tables of a pipeline run in execution order.
pub fn plan_tables(report: &PipelineReport, weights: &Weights) -> Vec<Table> {
    let mut tables = Vec::new();
    if let Some(m) = &report.macro_stage {
        let dims: Vec<Dimension> = [Dimension::S, Dimension::E, Dimension::En].into_iter().take(m.outcome.cc.len()).collect();
        tables.push(macro_table(&dims, &[(m.case.clone(), m.signs.clone(), m.outcome.clone())]));
    }
    tables.push(compliance_table(&report.compliance));
    tables.push(assignment_table(
        report.runs.iter().filter_map(|r| r.plan.as_ref().map(|p| (r.coalition.to_string(), p))),
    ));
    tables.push(route_table(report.runs.iter().filter_map(|r| r.route.as_ref())));
    tables.push(emission_table(&report.emissions, weights));
    tables.push(summary_table(report));
    tables
}

pub fn render_text(tables: &[Table]) -> String {
    tables.iter().map(Table::to_text).collect::<Vec<_>>().join("\n")
}

/// All tables in one long-format CSV: `table, row, column, value`.
pub fn render_long_csv(tables: &[Table]) -> String {
    let mut long = Table::new("", &["table", "row", "column", "value"]);
    for t in tables {
        for (i, r) in t.rows.iter().enumerate() {
            for (h, v) in t.header.iter().zip(r) {
                long.push(vec![t.title.clone(), (i + 1).to_string(), h.clone(), v.clone()]);
            }
        }
    }
    long.to_csv()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_quotes_and_text_aligns() {
        let mut t = Table::new("x", &["a", "b"]);
        t.push(vec!["1,5".into(), "two".into()]);
        assert_eq!(t.to_csv(), "a,b\n\"1,5\",two\n");
        assert_eq!(t.to_text(), "== x ==\na    b\n1,5  two\n");
        let long = render_long_csv(&[t]);
        assert!(long.starts_with("table,row,column,value\nx,1,a,\"1,5\"\n"));
    }
}
