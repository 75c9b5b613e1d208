//! Domain types shared by every stage, and the scenario document they are
//! loaded from.
//!
//! A scenario is a TOML document. Everything downstream consumes the
//! validated [`Scenario`] value and never touches the raw document.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::complexity::{CityDeltas, Polarity};
use crate::num::{dec, from_f64_decimal, int, parse_rational, Rational};

#[derive(Debug, thiserror::Error, Clone, PartialEq, Eq)]
pub enum ScenarioError {
    #[error("schema error: {0}")]
    Schema(String),
    #[error("reference error: {0}")]
    Reference(String),
    #[error("normalization error: {0}")]
    Normalization(String),
}

fn schema(msg: impl Into<String>) -> ScenarioError {
    ScenarioError::Schema(msg.into())
}

// ---------------------------------------------------------------------------
// Identifiers
// ---------------------------------------------------------------------------

/// Compares strings with embedded digit runs by numeric value, so `C9`
/// sorts before `C11`.
pub fn natural_cmp(a: &str, b: &str) -> Ordering {
    fn chunks(s: &str) -> Vec<(bool, &str)> {
        let mut out = Vec::new();
        let mut start = 0;
        let bytes = s.as_bytes();
        for i in 1..=bytes.len() {
            if i == bytes.len() || bytes[i].is_ascii_digit() != bytes[start].is_ascii_digit() {
                out.push((bytes[start].is_ascii_digit(), &s[start..i]));
                start = i;
            }
        }
        out
    }
    let (ca, cb) = (chunks(a), chunks(b));
    for ((da, x), (db, y)) in ca.iter().zip(&cb) {
        let ord = match (da, db) {
            (true, true) => {
                let (x0, y0) = (x.trim_start_matches('0'), y.trim_start_matches('0'));
                x0.len().cmp(&y0.len()).then_with(|| x0.cmp(y0))
            }
            _ => x.cmp(y),
        };
        if ord != Ordering::Equal {
            return ord;
        }
    }
    ca.len().cmp(&cb.len()).then_with(|| a.cmp(b))
}

macro_rules! id_type {
    ($(#[$m:meta])* $name:ident) => {
        $(#[$m])*
        #[derive(Debug, Clone, PartialEq, Eq, Hash)]
        pub struct $name(pub String);

        impl Ord for $name {
            fn cmp(&self, other: &Self) -> Ordering {
                natural_cmp(&self.0, &other.0)
            }
        }

        impl PartialOrd for $name {
            fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
                Some(self.cmp(other))
            }
        }

        impl $name {
            pub fn new(s: impl Into<String>) -> Self {
                Self(s.into())
            }
            pub fn as_str(&self) -> &str {
                &self.0
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(&self.0)
            }
        }

        impl From<&str> for $name {
            fn from(s: &str) -> Self {
                Self(s.to_string())
            }
        }
    };
}

id_type!(ShipperId);
id_type!(ClientId);
id_type!(
    /// Order identifier; defaults to `shipper:client` when the file omits it.
    OrderId
);

/// Trucks are named per shipper (two shippers may both own a `T1`), so a
/// truck is identified by its id together with its owner. Ordering compares
/// the truck id first.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TruckKey {
    pub id: String,
    pub owner: ShipperId,
}

impl Ord for TruckKey {
    fn cmp(&self, other: &Self) -> Ordering {
        natural_cmp(&self.id, &other.id).then_with(|| self.owner.cmp(&other.owner))
    }
}

impl PartialOrd for TruckKey {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl TruckKey {
    pub fn new(owner: impl Into<String>, id: impl Into<String>) -> Self {
        Self { id: id.into(), owner: ShipperId(owner.into()) }
    }
}

impl fmt::Display for TruckKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.owner, self.id)
    }
}

impl FromStr for TruckKey {
    type Err = ScenarioError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (owner, id) = s
            .split_once('/')
            .ok_or_else(|| schema(format!("truck reference `{s}` must be `owner/id`")))?;
        Ok(TruckKey::new(owner, id))
    }
}

// ---------------------------------------------------------------------------
// Macro-level types
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Dimension {
    /// Socio-cultural characteristics.
    S,
    /// Economy.
    E,
    /// Environment.
    En,
}

impl Dimension {
    pub const DEFAULT: [Dimension; 3] = [Dimension::S, Dimension::E, Dimension::En];

    pub fn token(self) -> &'static str {
        match self {
            Dimension::S => "S",
            Dimension::E => "E",
            Dimension::En => "En",
        }
    }
}

impl fmt::Display for Dimension {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.token())
    }
}

impl FromStr for Dimension {
    type Err = ScenarioError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "S" => Ok(Dimension::S),
            "E" => Ok(Dimension::E),
            "En" => Ok(Dimension::En),
            other => Err(schema(format!("unknown dimension `{other}`"))),
        }
    }
}

/// Which of the four subsystem weight vectors a value belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Block {
    B2B,
    B2C,
    C2B,
    C2C,
}

impl Block {
    pub const ALL: [Block; 4] = [Block::B2B, Block::B2C, Block::C2B, Block::C2C];
}

impl fmt::Display for Block {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Block::B2B => "b2b",
            Block::B2C => "b2c",
            Block::C2B => "c2b",
            Block::C2C => "c2c",
        })
    }
}

/// Percentage weights of the four subsystems, one entry per dimension.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CollaborationBlocks {
    pub b2b: Vec<Rational>,
    pub b2c: Vec<Rational>,
    pub c2b: Vec<Rational>,
    pub c2c: Vec<Rational>,
}

impl CollaborationBlocks {
    pub fn new(
        b2b: Vec<Rational>,
        b2c: Vec<Rational>,
        c2b: Vec<Rational>,
        c2c: Vec<Rational>,
    ) -> Result<Self, ScenarioError> {
        let n = b2b.len();
        if n == 0 || [&b2c, &c2b, &c2c].iter().any(|v| v.len() != n) {
            return Err(schema("collaboration blocks must be non-empty and share one length"));
        }
        if [&b2b, &b2c, &c2b, &c2c].iter().any(|v| v.iter().any(Signed::is_negative)) {
            return Err(schema("collaboration block weights must be >= 0"));
        }
        Ok(Self { b2b, b2c, c2b, c2c })
    }

    /// Convenience constructor from integer percentages.
    pub fn from_ints(b2b: &[i64], b2c: &[i64], c2b: &[i64], c2c: &[i64]) -> Result<Self, ScenarioError> {
        let conv = |v: &[i64]| v.iter().map(|&x| int(x as i128)).collect();
        Self::new(conv(b2b), conv(b2c), conv(c2b), conv(c2c))
    }

    pub fn dims(&self) -> usize {
        self.b2b.len()
    }

    pub fn get(&self, block: Block) -> &[Rational] {
        match block {
            Block::B2B => &self.b2b,
            Block::B2C => &self.b2c,
            Block::C2B => &self.c2b,
            Block::C2C => &self.c2c,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Sign {
    Plus,
    Zero,
    Minus,
}

impl Sign {
    pub fn value(self) -> i128 {
        match self {
            Sign::Plus => 1,
            Sign::Zero => 0,
            Sign::Minus => -1,
        }
    }

    pub fn negate(self) -> Sign {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Zero => Sign::Zero,
            Sign::Minus => Sign::Plus,
        }
    }

    pub fn symbol(self) -> char {
        match self {
            Sign::Plus => '+',
            Sign::Zero => '0',
            Sign::Minus => '-',
        }
    }

    pub fn from_symbol(s: &str) -> Result<Sign, ScenarioError> {
        match s {
            "+" | "+1" | "1" => Ok(Sign::Plus),
            "0" => Ok(Sign::Zero),
            "-" | "-1" => Ok(Sign::Minus),
            other => Err(schema(format!("sign must be +, 0 or -, got `{other}`"))),
        }
    }
}

/// Polarity attached to the B-column and C-column blocks per dimension.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SignAssignment {
    pub b: Vec<Sign>,
    pub c: Vec<Sign>,
}

impl SignAssignment {
    pub fn new(b: Vec<Sign>, c: Vec<Sign>) -> Self {
        Self { b, c }
    }

    /// Parses compact strings such as `"+-+"`, `"-0+"`.
    pub fn parse(b: &str, c: &str) -> Result<Self, ScenarioError> {
        let p = |s: &str| -> Result<Vec<Sign>, ScenarioError> {
            s.chars().map(|ch| Sign::from_symbol(&ch.to_string())).collect()
        };
        Ok(Self { b: p(b)?, c: p(c)? })
    }

    pub fn uniform(n: usize, sign: Sign) -> Self {
        Self { b: vec![sign; n], c: vec![sign; n] }
    }

    pub fn negated(&self) -> Self {
        Self {
            b: self.b.iter().map(|s| s.negate()).collect(),
            c: self.c.iter().map(|s| s.negate()).collect(),
        }
    }

    pub fn b_string(&self) -> String {
        self.b.iter().map(|s| s.symbol()).collect()
    }

    pub fn c_string(&self) -> String {
        self.c.iter().map(|s| s.symbol()).collect()
    }
}

/// A user-supplied sign case with a label, as listed in a scenario file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NamedCase {
    pub id: String,
    pub signs: SignAssignment,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NormalizationMode {
    Strict,
    Lenient,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockViolation {
    pub block: Block,
    pub sum: Rational,
}

impl fmt::Display for BlockViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} sums to {} (expected 100)", self.block, dec(&self.sum))
    }
}

/// Reports every block whose components do not sum to 100. The list is the
/// same in both modes; strict callers treat it as fatal, lenient callers as
/// warnings.
pub fn validate_blocks(blocks: &CollaborationBlocks, _strict: bool) -> Vec<BlockViolation> {
    Block::ALL
        .iter()
        .filter_map(|&block| {
            let sum: Rational = blocks.get(block).iter().sum();
            (sum != int(100)).then_some(BlockViolation { block, sum })
        })
        .collect()
}

// ---------------------------------------------------------------------------
// Micro-level types
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TimeWindow {
    /// Minutes after midnight.
    pub start: u32,
    pub end: u32,
}

impl TimeWindow {
    pub fn new(start: u32, end: u32) -> Result<Self, ScenarioError> {
        if start >= end || end > 24 * 60 {
            return Err(schema(format!("time window {start}..{end} must satisfy start < end <= 24:00")));
        }
        Ok(Self { start, end })
    }

    pub fn overlaps(&self, other: &TimeWindow) -> bool {
        self.start < other.end && other.start < self.end
    }
}

pub fn parse_clock(s: &str) -> Result<u32, ScenarioError> {
    let bad = || schema(format!("invalid clock time `{s}`, expected HH:MM"));
    let (h, m) = s.trim().split_once(':').ok_or_else(bad)?;
    let h: u32 = h.parse().map_err(|_| bad())?;
    let m: u32 = m.parse().map_err(|_| bad())?;
    if h > 24 || m > 59 || (h == 24 && m != 0) {
        return Err(bad());
    }
    Ok(h * 60 + m)
}

pub fn format_clock(minutes: u32) -> String {
    format!("{:02}:{:02}", minutes / 60, minutes % 60)
}

impl FromStr for TimeWindow {
    type Err = ScenarioError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (a, b) = s
            .split_once('-')
            .ok_or_else(|| schema(format!("invalid window `{s}`, expected HH:MM-HH:MM")))?;
        TimeWindow::new(parse_clock(a)?, parse_clock(b)?)
    }
}

impl fmt::Display for TimeWindow {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}-{}", format_clock(self.start), format_clock(self.end))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Shipper {
    pub id: ShipperId,
    pub clients: BTreeSet<ClientId>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Order {
    pub id: OrderId,
    pub shipper: ShipperId,
    pub client: ClientId,
    pub packets: u32,
    /// Kilograms per packet.
    pub packet_size: Rational,
    pub window: TimeWindow,
}

impl Order {
    /// Delivered kilograms, always `packets × packet_size`.
    pub fn quantity(&self) -> Rational {
        int(self.packets as i128) * self.packet_size
    }
}

/// Symbolic per-trip emission charge, `multiplier × base`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct EmissionFactor {
    pub base: String,
    pub multiplier: Rational,
}

impl EmissionFactor {
    /// Parses `E1`, `2E2`, `1.5E2` against the declared base symbols. The
    /// longest matching base suffix wins so `E12` is not read as `E1`.
    pub fn parse(text: &str, bases: &[String]) -> Result<Self, ScenarioError> {
        let text = text.trim();
        let base = bases
            .iter()
            .filter(|b| text.ends_with(b.as_str()))
            .max_by_key(|b| b.len())
            .ok_or_else(|| {
                ScenarioError::Reference(format!("emission `{text}` uses no declared base symbol"))
            })?;
        let prefix = text[..text.len() - base.len()].trim().trim_end_matches('*').trim();
        let multiplier = if prefix.is_empty() {
            int(1)
        } else {
            parse_rational(prefix).map_err(|e| schema(e.to_string()))?
        };
        if !multiplier.is_positive() {
            return Err(schema(format!("emission multiplier in `{text}` must be > 0")));
        }
        Ok(Self { base: base.clone(), multiplier })
    }
}

impl fmt::Display for EmissionFactor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.multiplier == int(1) {
            write!(f, "{}", self.base)
        } else {
            write!(f, "{}{}", dec(&self.multiplier), self.base)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Truck {
    pub key: TruckKey,
    pub gains: Rational,
    /// Load capacity in kilograms.
    pub capacity: Rational,
    /// Vehicle size in tons.
    pub size: Rational,
    pub emission: EmissionFactor,
}

impl Truck {
    pub fn owner(&self) -> &ShipperId {
        &self.key.owner
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Edge {
    pub from: String,
    pub to: String,
    pub length: Rational,
}

/// Undirected weighted network of depots and clients.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Network {
    pub nodes: BTreeSet<String>,
    pub edges: Vec<Edge>,
}

impl Network {
    pub fn new(extra_nodes: impl IntoIterator<Item = String>, edges: Vec<Edge>) -> Result<Self, ScenarioError> {
        let mut nodes: BTreeSet<String> = extra_nodes.into_iter().collect();
        for e in &edges {
            if !e.length.is_positive() {
                return Err(schema(format!("edge {}-{} must have positive length", e.from, e.to)));
            }
            if e.from == e.to {
                return Err(schema(format!("edge {}-{} is a self loop", e.from, e.to)));
            }
            nodes.insert(e.from.clone());
            nodes.insert(e.to.clone());
        }
        Ok(Self { nodes, edges })
    }

    pub fn contains(&self, node: &str) -> bool {
        self.nodes.contains(node)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComplianceRule {
    pub max_vehicle_size: Rational,
    pub max_net_profit: Rational,
    /// Collaboration-intent vector on the percent scale, indexed S, E, En.
    pub intents: Vec<Rational>,
}

impl ComplianceRule {
    pub fn new(max_vehicle_size: Rational, max_net_profit: Rational, intents: Vec<Rational>) -> Result<Self, ScenarioError> {
        if !max_vehicle_size.is_positive() {
            return Err(schema("max_vehicle_size_tons must be > 0"));
        }
        Ok(Self { max_vehicle_size, max_net_profit, intents })
    }

    pub fn with_intents(&self, intents: Vec<Rational>) -> Self {
        Self { intents, ..self.clone() }
    }
}

/// One inline effector entry from the `uncertainty` section.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EffectorEntry {
    pub condition: String,
    pub polarity: Polarity,
    pub multiplicity: u32,
}

/// Declared travel-time bound for a coalition, e.g. S1+S6 within 09:00-13:00.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TravelBound {
    pub members: BTreeSet<ShipperId>,
    pub window: TimeWindow,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RoutingConfig {
    /// Distance units per minute.
    pub speed: Rational,
    /// Departure time in minutes; `None` means earliest served window start.
    pub departure: Option<u32>,
    pub travel_bounds: Vec<TravelBound>,
}

impl Default for RoutingConfig {
    fn default() -> Self {
        Self { speed: int(1), departure: None, travel_bounds: Vec::new() }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Scenario {
    pub mode: NormalizationMode,
    pub dimensions: Vec<Dimension>,
    pub emission_bases: Vec<String>,
    pub shippers: Vec<Shipper>,
    pub orders: Vec<Order>,
    pub trucks: Vec<Truck>,
    pub network: Network,
    pub compliance: Option<ComplianceRule>,
    pub blocks: Option<CollaborationBlocks>,
    pub signs: Option<SignAssignment>,
    pub cases: Vec<NamedCase>,
    pub uncertainty: Vec<EffectorEntry>,
    pub city_deltas: Option<CityDeltas>,
    pub routing: RoutingConfig,
}

/// A parsed scenario together with the non-fatal findings of lenient mode.
#[derive(Debug, Clone)]
pub struct Loaded {
    pub scenario: Scenario,
    pub warnings: Vec<String>,
}

impl Scenario {
    pub fn empty() -> Self {
        Self {
            mode: NormalizationMode::Lenient,
            dimensions: Dimension::DEFAULT.to_vec(),
            emission_bases: vec!["E1".into(), "E2".into()],
            shippers: Vec::new(),
            orders: Vec::new(),
            trucks: Vec::new(),
            network: Network::default(),
            compliance: None,
            blocks: None,
            signs: None,
            cases: Vec::new(),
            uncertainty: Vec::new(),
            city_deltas: None,
            routing: RoutingConfig::default(),
        }
    }

    pub fn shipper(&self, id: &ShipperId) -> Option<&Shipper> {
        self.shippers.iter().find(|s| &s.id == id)
    }

    pub fn truck(&self, key: &TruckKey) -> Option<&Truck> {
        self.trucks.iter().find(|t| &t.key == key)
    }

    pub fn orders_of<'a>(&'a self, shipper: &'a ShipperId) -> impl Iterator<Item = &'a Order> + 'a {
        self.orders.iter().filter(move |o| &o.shipper == shipper)
    }

    pub fn trucks_of<'a>(&'a self, shipper: &'a ShipperId) -> impl Iterator<Item = &'a Truck> + 'a {
        self.trucks.iter().filter(move |t| t.owner() == shipper)
    }

    pub fn truck_map(&self) -> BTreeMap<TruckKey, &Truck> {
        self.trucks.iter().map(|t| (t.key.clone(), t)).collect()
    }

    pub fn parse(text: &str) -> Result<Loaded, ScenarioError> {
        parse_scenario(text)
    }

    /// Renders the scenario back into the document format; parsing the
    /// result yields an equal scenario.
    pub fn to_toml_string(&self) -> String {
        let doc = file::ScenarioFile::from_scenario(self);
        toml::to_string(&doc).expect("scenario document always serializes")
    }
}

/// Parses and validates a scenario document.
pub fn parse_scenario(text: &str) -> Result<Loaded, ScenarioError> {
    let doc: file::ScenarioFile = toml::from_str(text).map_err(|e| schema(e.message().to_string()))?;
    doc.into_scenario()
}

/// Raw serde mirror of the document layout.
mod file {
    use super::*;

    /// Numbers may be written as integers, decimals or `"p/q"` strings.
    #[derive(Debug, Clone, Serialize, Deserialize)]
    #[serde(untagged)]
    pub enum Num {
        Int(i64),
        Float(f64),
        Text(String),
    }

    impl Num {
        pub fn to_rational(&self, what: &str) -> Result<Rational, ScenarioError> {
            match self {
                Num::Int(v) => Ok(int(*v as i128)),
                Num::Float(v) => from_f64_decimal(*v).map_err(|e| schema(format!("{what}: {e}"))),
                Num::Text(s) => parse_rational(s).map_err(|e| schema(format!("{what}: {e}"))),
            }
        }

        pub fn from_rational(v: &Rational) -> Num {
            if v.is_integer() {
                if let Ok(i) = i64::try_from(*v.numer()) {
                    return Num::Int(i);
                }
            }
            let text = dec(v);
            if !text.contains('/') {
                if let Ok(f) = text.parse::<f64>() {
                    if from_f64_decimal(f).ok().as_ref() == Some(v) {
                        return Num::Float(f);
                    }
                }
            }
            Num::Text(text)
        }
    }

    fn nums(v: &[Num], what: &str) -> Result<Vec<Rational>, ScenarioError> {
        v.iter().map(|x| x.to_rational(what)).collect()
    }

    fn to_nums(v: &[Rational]) -> Vec<Num> {
        v.iter().map(Num::from_rational).collect()
    }

    #[derive(Debug, Serialize, Deserialize)]
    #[serde(deny_unknown_fields)]
    pub struct Meta {
        pub version: u32,
        #[serde(default = "default_mode")]
        pub mode: String,
        #[serde(default = "default_dims")]
        pub dimensions: Vec<String>,
        #[serde(default = "default_bases")]
        pub emission_bases: Vec<String>,
    }

    fn default_mode() -> String {
        "lenient".into()
    }
    fn default_dims() -> Vec<String> {
        Dimension::DEFAULT.iter().map(|d| d.token().to_string()).collect()
    }
    fn default_bases() -> Vec<String> {
        vec!["E1".into(), "E2".into()]
    }

    #[derive(Debug, Serialize, Deserialize)]
    #[serde(deny_unknown_fields)]
    pub struct ShipperRow {
        pub id: String,
    }

    #[derive(Debug, Serialize, Deserialize)]
    #[serde(deny_unknown_fields)]
    pub struct OrderRow {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        pub id: Option<String>,
        pub shipper: String,
        pub client: String,
        pub packets: u32,
        pub packet_size_kg: Num,
        pub window: String,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        pub quantity_kg: Option<Num>,
    }

    #[derive(Debug, Serialize, Deserialize)]
    #[serde(deny_unknown_fields)]
    pub struct TruckRow {
        pub id: String,
        pub owner: String,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        pub gains: Option<Num>,
        pub capacity_kg: Num,
        pub size_tons: Num,
        pub emission: String,
    }

    #[derive(Debug, Default, Serialize, Deserialize)]
    #[serde(deny_unknown_fields)]
    pub struct NetworkSection {
        #[serde(default, skip_serializing_if = "Vec::is_empty")]
        pub nodes: Vec<String>,
        #[serde(default)]
        pub edges: Vec<(String, String, Num)>,
    }

    #[derive(Debug, Serialize, Deserialize)]
    #[serde(deny_unknown_fields)]
    pub struct ComplianceSection {
        pub max_vehicle_size_tons: Num,
        pub max_net_profit: Num,
        #[serde(default)]
        pub intents: Vec<Num>,
    }

    #[derive(Debug, Serialize, Deserialize)]
    #[serde(deny_unknown_fields)]
    pub struct BlocksSection {
        pub b2b: Vec<Num>,
        pub b2c: Vec<Num>,
        pub c2b: Vec<Num>,
        pub c2c: Vec<Num>,
    }

    #[derive(Debug, Serialize, Deserialize)]
    #[serde(deny_unknown_fields)]
    pub struct SignsSection {
        pub b: Vec<String>,
        pub c: Vec<String>,
    }

    #[derive(Debug, Serialize, Deserialize)]
    #[serde(deny_unknown_fields)]
    pub struct CaseRow {
        pub id: String,
        pub b: Vec<String>,
        pub c: Vec<String>,
    }

    #[derive(Debug, Serialize, Deserialize)]
    #[serde(deny_unknown_fields)]
    pub struct EffectorRow {
        pub condition: String,
        pub polarity: String,
        pub n: u32,
    }

    #[derive(Debug, Serialize, Deserialize)]
    #[serde(deny_unknown_fields)]
    pub struct DeltasSection {
        pub p_o: Num,
        pub s: Num,
        pub i_t: Num,
        pub i: Num,
        pub r: Num,
        pub f_e: Num,
        pub g: Num,
        pub e: Num,
    }

    #[derive(Debug, Serialize, Deserialize)]
    #[serde(deny_unknown_fields)]
    pub struct BoundRow {
        pub members: Vec<String>,
        pub window: String,
    }

    #[derive(Debug, Serialize, Deserialize)]
    #[serde(deny_unknown_fields)]
    pub struct RoutingSection {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        pub speed: Option<Num>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        pub departure: Option<String>,
        #[serde(default, skip_serializing_if = "Vec::is_empty")]
        pub travel_bounds: Vec<BoundRow>,
    }

    #[derive(Debug, Serialize, Deserialize)]
    #[serde(deny_unknown_fields)]
    pub struct ScenarioFile {
        pub meta: Meta,
        #[serde(default)]
        pub shippers: Vec<ShipperRow>,
        #[serde(default)]
        pub orders: Vec<OrderRow>,
        #[serde(default)]
        pub trucks: Vec<TruckRow>,
        #[serde(default)]
        pub network: NetworkSection,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        pub compliance: Option<ComplianceSection>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        pub collaboration_blocks: Option<BlocksSection>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        pub signs: Option<SignsSection>,
        #[serde(default, skip_serializing_if = "Vec::is_empty")]
        pub cases: Vec<CaseRow>,
        #[serde(default, skip_serializing_if = "Vec::is_empty")]
        pub uncertainty: Vec<EffectorRow>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        pub city_deltas: Option<DeltasSection>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        pub routing: Option<RoutingSection>,
    }

    fn signs(v: &[String]) -> Result<Vec<Sign>, ScenarioError> {
        v.iter().map(|s| Sign::from_symbol(s)).collect()
    }

    fn sign_strings(v: &[Sign]) -> Vec<String> {
        v.iter().map(|s| s.symbol().to_string()).collect()
    }

    impl ScenarioFile {
        pub fn into_scenario(self) -> Result<Loaded, ScenarioError> {
            let mut warnings = Vec::new();
            if self.meta.version != 1 {
                return Err(schema(format!("unsupported meta.version {}", self.meta.version)));
            }
            let mode = match self.meta.mode.as_str() {
                "strict" => NormalizationMode::Strict,
                "lenient" => NormalizationMode::Lenient,
                other => return Err(schema(format!("meta.mode must be strict or lenient, got `{other}`"))),
            };
            let dimensions = self
                .meta
                .dimensions
                .iter()
                .map(|d| d.parse())
                .collect::<Result<Vec<Dimension>, _>>()?;
            if dimensions.is_empty() || dimensions.iter().collect::<BTreeSet<_>>().len() != dimensions.len() {
                return Err(schema("meta.dimensions must be non-empty and distinct"));
            }
            let n = dimensions.len();
            let emission_bases = self.meta.emission_bases.clone();
            if emission_bases.iter().collect::<BTreeSet<_>>().len() != emission_bases.len()
                || emission_bases.iter().any(|b| b.trim().is_empty())
            {
                return Err(schema("meta.emission_bases must be distinct non-empty symbols"));
            }

            let mut shipper_ids = BTreeSet::new();
            let mut shipper_order = Vec::new();
            for row in &self.shippers {
                if !shipper_ids.insert(row.id.clone()) {
                    return Err(schema(format!("duplicate shipper id `{}`", row.id)));
                }
                shipper_order.push(row.id.clone());
            }

            let mut orders = Vec::new();
            let mut order_ids = BTreeSet::new();
            for row in self.orders {
                if !shipper_ids.contains(&row.shipper) {
                    return Err(ScenarioError::Reference(format!(
                        "order for client `{}` references unknown shipper `{}`",
                        row.client, row.shipper
                    )));
                }
                let id = row.id.clone().unwrap_or_else(|| format!("{}:{}", row.shipper, row.client));
                if !order_ids.insert(id.clone()) {
                    return Err(schema(format!("duplicate order id `{id}`")));
                }
                let packet_size = row.packet_size_kg.to_rational("packet_size_kg")?;
                if row.packets == 0 || !packet_size.is_positive() {
                    return Err(schema(format!("order `{id}` must have positive packets and packet size")));
                }
                let order = Order {
                    id: OrderId(id.clone()),
                    shipper: ShipperId(row.shipper),
                    client: ClientId(row.client),
                    packets: row.packets,
                    packet_size,
                    window: row.window.parse()?,
                };
                if let Some(q) = &row.quantity_kg {
                    let q = q.to_rational("quantity_kg")?;
                    if q != order.quantity() {
                        let msg = format!(
                            "order `{id}` quantity {} differs from packets x size = {}",
                            dec(&q),
                            dec(&order.quantity())
                        );
                        match mode {
                            NormalizationMode::Strict => return Err(schema(msg)),
                            NormalizationMode::Lenient => warnings.push(format!("{msg}; recomputed")),
                        }
                    }
                }
                orders.push(order);
            }

            let mut trucks: Vec<Truck> = Vec::new();
            for row in self.trucks {
                if !shipper_ids.contains(&row.owner) {
                    return Err(ScenarioError::Reference(format!(
                        "truck `{}` references unknown owner `{}`",
                        row.id, row.owner
                    )));
                }
                let key = TruckKey::new(row.owner, row.id);
                if trucks.iter().any(|t| t.key == key) {
                    return Err(schema(format!("duplicate truck `{key}`")));
                }
                let capacity = row.capacity_kg.to_rational("capacity_kg")?;
                let size = row.size_tons.to_rational("size_tons")?;
                if !capacity.is_positive() || !size.is_positive() {
                    return Err(schema(format!("truck `{key}` must have positive capacity and size")));
                }
                let gains = match &row.gains {
                    Some(g) => g.to_rational("gains")?,
                    None => Rational::zero(),
                };
                trucks.push(Truck {
                    emission: EmissionFactor::parse(&row.emission, &emission_bases)?,
                    key,
                    gains,
                    capacity,
                    size,
                });
            }

            let edges = self
                .network
                .edges
                .iter()
                .map(|(a, b, l)| {
                    Ok(Edge { from: a.clone(), to: b.clone(), length: l.to_rational("edge length")? })
                })
                .collect::<Result<Vec<_>, ScenarioError>>()?;
            let declared_nodes = self.network.nodes.len();
            let node_set: BTreeSet<&String> = self.network.nodes.iter().collect();
            if node_set.len() != declared_nodes {
                return Err(schema("network.nodes must be unique"));
            }
            let network = Network::new(self.network.nodes.clone(), edges)?;

            let compliance = match self.compliance {
                Some(c) => Some(ComplianceRule::new(
                    c.max_vehicle_size_tons.to_rational("max_vehicle_size_tons")?,
                    c.max_net_profit.to_rational("max_net_profit")?,
                    nums(&c.intents, "intents")?,
                )?),
                None => None,
            };

            let blocks = match self.collaboration_blocks {
                Some(b) => {
                    let blocks = CollaborationBlocks::new(
                        nums(&b.b2b, "b2b")?,
                        nums(&b.b2c, "b2c")?,
                        nums(&b.c2b, "c2b")?,
                        nums(&b.c2c, "c2c")?,
                    )?;
                    if blocks.dims() != n {
                        return Err(schema(format!("collaboration blocks have {} entries, expected {n}", blocks.dims())));
                    }
                    let strict = mode == NormalizationMode::Strict;
                    let violations = validate_blocks(&blocks, strict);
                    if strict && !violations.is_empty() {
                        let text: Vec<String> = violations.iter().map(|v| v.to_string()).collect();
                        return Err(ScenarioError::Normalization(text.join("; ")));
                    }
                    warnings.extend(violations.iter().map(|v| format!("block {v}")));
                    Some(blocks)
                }
                None => None,
            };

            let check_len = |s: &SignAssignment, what: &str| -> Result<(), ScenarioError> {
                if s.b.len() != n || s.c.len() != n {
                    return Err(schema(format!("{what} must have {n} signs per column block")));
                }
                Ok(())
            };
            let signs_value = match self.signs {
                Some(s) => {
                    let v = SignAssignment::new(signs(&s.b)?, signs(&s.c)?);
                    check_len(&v, "signs")?;
                    Some(v)
                }
                None => None,
            };
            let mut cases = Vec::new();
            for row in self.cases {
                let v = SignAssignment::new(signs(&row.b)?, signs(&row.c)?);
                check_len(&v, &format!("case `{}`", row.id))?;
                if cases.iter().any(|c: &NamedCase| c.id == row.id) {
                    return Err(schema(format!("duplicate case id `{}`", row.id)));
                }
                cases.push(NamedCase { id: row.id, signs: v });
            }

            let uncertainty = self
                .uncertainty
                .into_iter()
                .map(|e| {
                    let polarity = match e.polarity.as_str() {
                        "+" => Polarity::Positive,
                        "-" => Polarity::Negative,
                        other => return Err(schema(format!("effector polarity must be + or -, got `{other}`"))),
                    };
                    Ok(EffectorEntry { condition: e.condition, polarity, multiplicity: e.n })
                })
                .collect::<Result<Vec<_>, _>>()?;

            let city_deltas = match self.city_deltas {
                Some(d) => Some(CityDeltas::new([
                    d.p_o.to_rational("p_o")?,
                    d.s.to_rational("s")?,
                    d.i_t.to_rational("i_t")?,
                    d.i.to_rational("i")?,
                    d.r.to_rational("r")?,
                    d.f_e.to_rational("f_e")?,
                    d.g.to_rational("g")?,
                    d.e.to_rational("e")?,
                ])
                .map_err(|e| schema(e.to_string()))?),
                None => None,
            };

            let routing = match self.routing {
                Some(r) => {
                    let speed = match &r.speed {
                        Some(s) => s.to_rational("routing.speed")?,
                        None => int(1),
                    };
                    if !speed.is_positive() {
                        return Err(schema("routing.speed must be > 0"));
                    }
                    let departure = r.departure.as_deref().map(parse_clock).transpose()?;
                    let mut travel_bounds = Vec::new();
                    for b in r.travel_bounds {
                        let members: BTreeSet<ShipperId> = b.members.iter().map(|m| ShipperId(m.clone())).collect();
                        if let Some(m) = members.iter().find(|m| !shipper_ids.contains(m.as_str())) {
                            return Err(ScenarioError::Reference(format!("travel bound references unknown shipper `{m}`")));
                        }
                        travel_bounds.push(TravelBound { members, window: b.window.parse()? });
                    }
                    RoutingConfig { speed, departure, travel_bounds }
                }
                None => RoutingConfig::default(),
            };

            let shippers = shipper_order
                .into_iter()
                .map(|id| {
                    let clients = orders
                        .iter()
                        .filter(|o| o.shipper.as_str() == id)
                        .map(|o| o.client.clone())
                        .collect();
                    Shipper { id: ShipperId(id), clients }
                })
                .collect();

            Ok(Loaded {
                scenario: Scenario {
                    mode,
                    dimensions,
                    emission_bases,
                    shippers,
                    orders,
                    trucks,
                    network,
                    compliance,
                    blocks,
                    signs: signs_value,
                    cases,
                    uncertainty,
                    city_deltas,
                    routing,
                },
                warnings,
            })
        }

        pub fn from_scenario(s: &Scenario) -> Self {
            let num = Num::from_rational;
            ScenarioFile {
                meta: Meta {
                    version: 1,
                    mode: match s.mode {
                        NormalizationMode::Strict => "strict".into(),
                        NormalizationMode::Lenient => "lenient".into(),
                    },
                    dimensions: s.dimensions.iter().map(|d| d.token().to_string()).collect(),
                    emission_bases: s.emission_bases.clone(),
                },
                shippers: s.shippers.iter().map(|sh| ShipperRow { id: sh.id.0.clone() }).collect(),
                orders: s
                    .orders
                    .iter()
                    .map(|o| OrderRow {
                        id: (o.id.0 != format!("{}:{}", o.shipper, o.client)).then(|| o.id.0.clone()),
                        shipper: o.shipper.0.clone(),
                        client: o.client.0.clone(),
                        packets: o.packets,
                        packet_size_kg: num(&o.packet_size),
                        window: o.window.to_string(),
                        quantity_kg: Some(num(&o.quantity())),
                    })
                    .collect(),
                trucks: s
                    .trucks
                    .iter()
                    .map(|t| TruckRow {
                        id: t.key.id.clone(),
                        owner: t.key.owner.0.clone(),
                        gains: Some(num(&t.gains)),
                        capacity_kg: num(&t.capacity),
                        size_tons: num(&t.size),
                        emission: t.emission.to_string(),
                    })
                    .collect(),
                network: NetworkSection {
                    nodes: s.network.nodes.iter().cloned().collect(),
                    edges: s
                        .network
                        .edges
                        .iter()
                        .map(|e| (e.from.clone(), e.to.clone(), num(&e.length)))
                        .collect(),
                },
                compliance: s.compliance.as_ref().map(|c| ComplianceSection {
                    max_vehicle_size_tons: num(&c.max_vehicle_size),
                    max_net_profit: num(&c.max_net_profit),
                    intents: to_nums(&c.intents),
                }),
                collaboration_blocks: s.blocks.as_ref().map(|b| BlocksSection {
                    b2b: to_nums(&b.b2b),
                    b2c: to_nums(&b.b2c),
                    c2b: to_nums(&b.c2b),
                    c2c: to_nums(&b.c2c),
                }),
                signs: s.signs.as_ref().map(|sg| SignsSection { b: sign_strings(&sg.b), c: sign_strings(&sg.c) }),
                cases: s
                    .cases
                    .iter()
                    .map(|c| CaseRow { id: c.id.clone(), b: sign_strings(&c.signs.b), c: sign_strings(&c.signs.c) })
                    .collect(),
                uncertainty: s
                    .uncertainty
                    .iter()
                    .map(|e| EffectorRow {
                        condition: e.condition.clone(),
                        polarity: match e.polarity {
                            Polarity::Positive => "+".into(),
                            Polarity::Negative => "-".into(),
                        },
                        n: e.multiplicity,
                    })
                    .collect(),
                city_deltas: s.city_deltas.as_ref().map(|d| {
                    let v = d.values();
                    DeltasSection {
                        p_o: num(&v[0]),
                        s: num(&v[1]),
                        i_t: num(&v[2]),
                        i: num(&v[3]),
                        r: num(&v[4]),
                        f_e: num(&v[5]),
                        g: num(&v[6]),
                        e: num(&v[7]),
                    }
                }),
                routing: (s.routing != RoutingConfig::default()).then(|| RoutingSection {
                    speed: Some(num(&s.routing.speed)),
                    departure: s.routing.departure.map(format_clock),
                    travel_bounds: s
                        .routing
                        .travel_bounds
                        .iter()
                        .map(|b| BoundRow {
                            members: b.members.iter().map(|m| m.0.clone()).collect(),
                            window: b.window.to_string(),
                        })
                        .collect(),
                }),
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::num::ratio;

    const MINIMAL: &str = r#"
[meta]
version = 1
mode = "lenient"
dimensions = ["S", "E", "En"]
emission_bases = ["E1", "E2"]
"#;

    #[test]
    fn ids_sort_naturally() {
        assert_eq!(natural_cmp("C9", "C11"), Ordering::Less);
        assert_eq!(natural_cmp("C10", "C10"), Ordering::Equal);
        assert_eq!(natural_cmp("S2-S3", "S2-S3-S4"), Ordering::Less);
        assert!(TruckKey::new("S5", "T9") < TruckKey::new("S5", "T10"));
        assert!(TruckKey::new("S6", "T1") < TruckKey::new("S1", "T2"));
    }

    fn with(extra: &str) -> String {
        format!("{MINIMAL}\n{extra}")
    }

    #[test]
    fn empty_scenario_is_accepted() {
        let loaded = parse_scenario(MINIMAL).unwrap();
        assert!(loaded.scenario.shippers.is_empty());
        assert!(loaded.scenario.orders.is_empty());
        assert!(loaded.scenario.trucks.is_empty());
        assert!(loaded.warnings.is_empty());
    }

    #[test]
    fn missing_meta_is_a_schema_error() {
        assert!(matches!(parse_scenario("[[shippers]]\nid = \"S1\""), Err(ScenarioError::Schema(_))));
    }

    #[test]
    fn quantity_mismatch_strict_vs_lenient() {
        let body = r#"
[[shippers]]
id = "S1"
[[orders]]
shipper = "S1"
client = "C1"
packets = 10
packet_size_kg = 20
window = "09:00-10:00"
quantity_kg = 150
"#;
        let strict = body.to_string() + "";
        let strict_doc = MINIMAL.replace("lenient", "strict") + &strict;
        assert!(matches!(parse_scenario(&strict_doc), Err(ScenarioError::Schema(_))));

        let loaded = parse_scenario(&with(body)).unwrap();
        assert_eq!(loaded.scenario.orders[0].quantity(), int(200));
        assert_eq!(loaded.warnings.len(), 1);
    }

    #[test]
    fn dangling_references_are_rejected() {
        let order = r#"
[[orders]]
shipper = "S9"
client = "C1"
packets = 1
packet_size_kg = 1
window = "09:00-10:00"
"#;
        assert!(matches!(parse_scenario(&with(order)), Err(ScenarioError::Reference(_))));
        let truck = r#"
[[shippers]]
id = "S1"
[[trucks]]
id = "T1"
owner = "S1"
capacity_kg = 100
size_tons = 200
emission = "E7"
"#;
        assert!(matches!(parse_scenario(&with(truck)), Err(ScenarioError::Reference(_))));
    }

    #[test]
    fn strict_mode_rejects_unnormalized_blocks() {
        let blocks = r#"
[collaboration_blocks]
b2b = [10, 20, 70]
b2c = [10, 40, 60]
c2b = [15, 55, 30]
c2c = [20, 30, 50]
"#;
        let lenient = parse_scenario(&with(blocks)).unwrap();
        assert_eq!(lenient.warnings.len(), 1);
        let strict = MINIMAL.replace("lenient", "strict") + blocks;
        assert!(matches!(parse_scenario(&strict), Err(ScenarioError::Normalization(_))));
    }

    #[test]
    fn block_validation_examples() {
        let sample1 = CollaborationBlocks::from_ints(&[10, 40, 50], &[20, 10, 70], &[20, 40, 40], &[30, 40, 30]).unwrap();
        assert!(validate_blocks(&sample1, true).is_empty());

        let sample2 = CollaborationBlocks::from_ints(&[10, 20, 70], &[10, 40, 60], &[15, 55, 30], &[20, 30, 50]).unwrap();
        let v = validate_blocks(&sample2, true);
        assert_eq!(v, vec![BlockViolation { block: Block::B2C, sum: int(110) }]);
        assert_eq!(validate_blocks(&sample2, false), v);

        let edge = CollaborationBlocks::from_ints(&[0, 0, 100], &[0, 0, 100], &[0, 0, 100], &[0, 0, 100]).unwrap();
        assert!(validate_blocks(&edge, true).is_empty());
    }

    #[test]
    fn emission_factor_parsing() {
        let bases = vec!["E1".to_string(), "E2".to_string()];
        assert_eq!(EmissionFactor::parse("E1", &bases).unwrap(), EmissionFactor { base: "E1".into(), multiplier: int(1) });
        assert_eq!(
            EmissionFactor::parse("1.5E2", &bases).unwrap(),
            EmissionFactor { base: "E2".into(), multiplier: ratio(3, 2) }
        );
        assert_eq!(EmissionFactor::parse("2E2", &bases).unwrap().multiplier, int(2));
        assert!(EmissionFactor::parse("0E1", &bases).is_err());
        assert_eq!(EmissionFactor::parse("1.5E2", &bases).unwrap().to_string(), "1.5E2");
    }

    #[test]
    fn windows_parse_and_reject_inverted_ranges() {
        let w: TimeWindow = "09:00-12:00".parse().unwrap();
        assert_eq!((w.start, w.end), (540, 720));
        assert!("10:00-09:00".parse::<TimeWindow>().is_err());
        assert!("9-10".parse::<TimeWindow>().is_err());
        assert_eq!(w.to_string(), "09:00-12:00");
    }

    #[test]
    fn network_rejects_nonpositive_edges() {
        let net = r#"
[network]
edges = [["A", "B", 0]]
"#;
        assert!(matches!(parse_scenario(&with(net)), Err(ScenarioError::Schema(_))));
    }
}
