//! Symbolic emission accounting per collaboration type and the light-duty
//! emission standards reference table.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, AddAssign};
use std::str::FromStr;

use num_traits::{One, Zero};

use crate::num::{dec, parse_rational, Rational};
use crate::routing::{CoalitionKind, RouteResult};
use crate::scenario::{Truck, TruckKey};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum EmissionsError {
    #[error("trip uses unknown truck `{0}`")]
    UnknownTruck(TruckKey),
    #[error("no alternative trucks given for a trip")]
    NoAlternatives,
    #[error("unknown emission-standard key `{0}`")]
    UnknownKey(String),
}

/// Nonnegative coefficients per base symbol; absent symbols are zero.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct EmissionVector(BTreeMap<String, Rational>);

impl EmissionVector {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_pairs<'a>(pairs: impl IntoIterator<Item = (&'a str, Rational)>) -> Self {
        let mut v = Self::new();
        for (base, c) in pairs {
            v.charge(base, c);
        }
        v
    }

    pub fn charge(&mut self, base: &str, amount: Rational) {
        assert!(amount >= Rational::zero(), "emission charges are nonnegative");
        if amount.is_zero() {
            return;
        }
        *self.0.entry(base.to_string()).or_insert_with(Rational::zero) += amount;
    }

    pub fn get(&self, base: &str) -> Rational {
        self.0.get(base).copied().unwrap_or_else(Rational::zero)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &Rational)> {
        self.0.iter().map(|(k, v)| (k.as_str(), v))
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn scaled(&self, factor: Rational) -> Self {
        assert!(factor > Rational::zero());
        Self(self.0.iter().map(|(k, v)| (k.clone(), v * factor)).collect())
    }

    /// Weighted sum of the coefficients; symbols without a weight count 1.
    pub fn scalarize(&self, weights: &Weights) -> Rational {
        self.0.iter().map(|(k, v)| v * weights.get(k)).sum()
    }

    /// Componentwise `<=`.
    pub fn le(&self, other: &Self) -> bool {
        self.0.iter().all(|(k, v)| *v <= other.get(k))
    }

    /// `<=` componentwise and different somewhere.
    pub fn strictly_below(&self, other: &Self) -> bool {
        self.le(other) && self != other
    }
}

impl Add for EmissionVector {
    type Output = EmissionVector;

    fn add(mut self, rhs: Self) -> Self {
        self += rhs;
        self
    }
}

impl AddAssign for EmissionVector {
    fn add_assign(&mut self, rhs: Self) {
        for (k, v) in rhs.0 {
            self.charge(&k, v);
        }
    }
}

impl std::iter::Sum for EmissionVector {
    fn sum<I: Iterator<Item = Self>>(iter: I) -> Self {
        iter.fold(Self::new(), |a, b| a + b)
    }
}

/// Renders as `E1 + 2E2`, or `0` when empty.
impl fmt::Display for EmissionVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("0");
        }
        let terms: Vec<String> = self
            .0
            .iter()
            .map(|(k, v)| if v.is_one() { k.clone() } else { format!("{}{k}", dec(v)) })
            .collect();
        f.write_str(&terms.join(" + "))
    }
}

/// Scalarization weights per base symbol (default 1).
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Weights(pub BTreeMap<String, Rational>);

impl Weights {
    pub fn get(&self, base: &str) -> Rational {
        self.0.get(base).copied().unwrap_or_else(Rational::one)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ChargeMode {
    /// One emission-factor unit per trip.
    #[default]
    PerTrip,
    /// Emission factor times route length.
    PerDistance,
}

fn find_truck<'a>(trucks: &'a [Truck], key: &TruckKey) -> Result<&'a Truck, EmissionsError> {
    trucks.iter().find(|t| &t.key == key).ok_or_else(|| EmissionsError::UnknownTruck(key.clone()))
}

pub fn account_emissions(result: &RouteResult, trucks: &[Truck], mode: ChargeMode) -> Result<EmissionVector, EmissionsError> {
    let mut v = EmissionVector::new();
    for route in &result.routes {
        let t = find_truck(trucks, &route.truck)?;
        let amount = match mode {
            ChargeMode::PerTrip => t.emission.multiplier,
            ChargeMode::PerDistance => t.emission.multiplier * route.length,
        };
        v.charge(&t.emission.base, amount);
    }
    Ok(v)
}

/// Picks the alternative with the lowest scalarized per-trip charge; ties go
/// to the smallest truck key.
pub fn resolve_alternative<'a>(options: &[TruckKey], trucks: &'a [Truck], weights: &Weights) -> Result<&'a Truck, EmissionsError> {
    let mut best: Option<(Rational, &Truck)> = None;
    for key in options {
        let t = find_truck(trucks, key)?;
        let cost = t.emission.multiplier * weights.get(&t.emission.base);
        let better = match best {
            None => true,
            Some((c, b)) => cost < c || (cost == c && t.key < b.key),
        };
        if better {
            best = Some((cost, t));
        }
    }
    best.map(|(_, t)| t).ok_or(EmissionsError::NoAlternatives)
}

/// Per-trip charge of a trip that may run on any of several trucks.
pub fn charge_alternative(options: &[TruckKey], trucks: &[Truck], weights: &Weights) -> Result<EmissionVector, EmissionsError> {
    let t = resolve_alternative(options, trucks, weights)?;
    Ok(EmissionVector::from_pairs([(t.emission.base.as_str(), t.emission.multiplier)]))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VerdictBasis {
    Dominance,
    Scalarized,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EmissionComparison {
    pub by_kind: BTreeMap<CoalitionKind, EmissionVector>,
    pub collaborative: EmissionVector,
    pub standalone: EmissionVector,
    pub collaborative_total: Rational,
    pub standalone_total: Rational,
    /// Collaborative emissions below stand-alone ones; `None` without NC.
    pub verdict: Option<(bool, VerdictBasis)>,
}

/// Compares FC + PC against NC. Strict componentwise dominance decides when
/// the vectors are comparable; otherwise the scalarized totals do.
pub fn compare_emissions(by_kind: &BTreeMap<CoalitionKind, EmissionVector>, weights: &Weights) -> EmissionComparison {
    let get = |k| by_kind.get(&k).cloned().unwrap_or_default();
    let collaborative = get(CoalitionKind::FC) + get(CoalitionKind::PC);
    let standalone = get(CoalitionKind::NC);
    let verdict = by_kind.contains_key(&CoalitionKind::NC).then(|| {
        if collaborative.le(&standalone) || standalone.le(&collaborative) {
            (collaborative.strictly_below(&standalone), VerdictBasis::Dominance)
        } else {
            (collaborative.scalarize(weights) < standalone.scalarize(weights), VerdictBasis::Scalarized)
        }
    });
    EmissionComparison {
        by_kind: by_kind.clone(),
        collaborative_total: collaborative.scalarize(weights),
        standalone_total: standalone.scalarize(weights),
        collaborative,
        standalone,
        verdict,
    }
}

// ---------------------------------------------------------------------------
// Tier 1 light-duty emission standards, g/mi
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum VehicleCategory {
    PassengerCar,
    LldtUnder3750,
    LldtOver3750,
    HldtUnder5750,
    HldtOver5750,
}

impl VehicleCategory {
    pub const ALL: [VehicleCategory; 5] = [
        VehicleCategory::PassengerCar,
        VehicleCategory::LldtUnder3750,
        VehicleCategory::LldtOver3750,
        VehicleCategory::HldtUnder5750,
        VehicleCategory::HldtOver5750,
    ];

    pub fn label(self) -> &'static str {
        match self {
            VehicleCategory::PassengerCar => "Passenger cars",
            VehicleCategory::LldtUnder3750 => "LLDT, LVW <3,750 lbs",
            VehicleCategory::LldtOver3750 => "LLDT, LVW >3,750 lbs",
            VehicleCategory::HldtUnder5750 => "HLDT, ALVW <5,750 lbs",
            VehicleCategory::HldtOver5750 => "HLDT, ALVW >5,750 lbs",
        }
    }
}

impl FromStr for VehicleCategory {
    type Err = EmissionsError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let key: String = s.to_ascii_lowercase().chars().filter(|c| c.is_ascii_alphanumeric() || *c == '<' || *c == '>').collect();
        Ok(match key.as_str() {
            "passengercar" | "passengercars" | "car" => VehicleCategory::PassengerCar,
            "lldt<3750" | "lldtlvw<3750lbs" => VehicleCategory::LldtUnder3750,
            "lldt>3750" | "lldtlvw>3750lbs" => VehicleCategory::LldtOver3750,
            "hldt<5750" | "hldtalvw<5750lbs" => VehicleCategory::HldtUnder5750,
            "hldt>5750" | "hldtalvw>5750lbs" => VehicleCategory::HldtOver5750,
            _ => return Err(EmissionsError::UnknownKey(s.to_string())),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum MileageBin {
    /// 50,000 miles / 5 years.
    Short,
    /// 100,000 miles / 10 years.
    Long,
}

impl FromStr for MileageBin {
    type Err = EmissionsError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().replace([',', ' '], "").as_str() {
            "50k" | "50000" | "50k/5yr" => Ok(MileageBin::Short),
            "100k" | "100000" | "100k/10yr" => Ok(MileageBin::Long),
            _ => Err(EmissionsError::UnknownKey(s.to_string())),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Pollutant {
    Thc,
    Nmhc,
    Co,
    NoxDiesel,
    NoxGasoline,
    Pm,
}

impl Pollutant {
    pub const ALL: [Pollutant; 6] =
        [Pollutant::Thc, Pollutant::Nmhc, Pollutant::Co, Pollutant::NoxDiesel, Pollutant::NoxGasoline, Pollutant::Pm];
}

impl FromStr for Pollutant {
    type Err = EmissionsError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s.to_ascii_lowercase().replace(['-', '_', ' '], "").as_str() {
            "thc" => Pollutant::Thc,
            "nmhc" => Pollutant::Nmhc,
            "co" => Pollutant::Co,
            "noxdiesel" => Pollutant::NoxDiesel,
            "noxgasoline" => Pollutant::NoxGasoline,
            "pm" => Pollutant::Pm,
            _ => return Err(EmissionsError::UnknownKey(s.to_string())),
        })
    }
}

/// Rows follow [`VehicleCategory::ALL`]; columns are the six pollutants for
/// the short bin followed by the six for the long bin. `None` is a dash.
const TIER1: [[Option<&str>; 12]; 5] = [
    [Some("0.41"), Some("0.25"), Some("3.4"), Some("1.0"), Some("0.4"), Some("0.08"), None, Some("0.31"), Some("4.2"), Some("1.25"), Some("0.6"), Some("1.0")],
    [None, Some("0.25"), Some("3.4"), Some("1.0"), Some("0.4"), Some("0.08"), Some("0.80"), Some("0.31"), Some("4.2"), Some("1.25"), Some("0.6"), Some("0.10")],
    [None, Some("0.32"), Some("4.4"), None, Some("0.7"), Some("0.08"), Some("0.80"), Some("0.40"), Some("5.5"), Some("0.97"), Some("0.97"), Some("0.10")],
    [Some("0.32"), None, Some("4.4"), None, Some("0.7"), None, Some("0.80"), Some("0.46"), Some("6.4"), Some("0.98"), Some("0.98"), Some("0.10")],
    [Some("0.9"), None, Some("5.0"), None, Some("1.1"), None, Some("0.80"), Some("0.56"), Some("7.3"), Some("1.53"), Some("1.53"), Some("0.12")],
];

/// Standard in g/mi, or `None` where the table has no value.
pub fn tier1_lookup(category: VehicleCategory, bin: MileageBin, pollutant: Pollutant) -> Option<Rational> {
    let row = VehicleCategory::ALL.iter().position(|c| *c == category).expect("listed category");
    let col = Pollutant::ALL.iter().position(|p| *p == pollutant).expect("listed pollutant")
        + if bin == MileageBin::Long { 6 } else { 0 };
    TIER1[row][col].map(|s| parse_rational(s).expect("table literal"))
}

/// String-keyed lookup for callers holding user input.
pub fn tier1_lookup_str(category: &str, bin: &str, pollutant: &str) -> Result<Option<Rational>, EmissionsError> {
    Ok(tier1_lookup(category.parse()?, bin.parse()?, pollutant.parse()?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::assignment::{Trip, TripPlan};
    use crate::num::{int, ratio};
    use crate::routing::{build_routes, Coalition};
    use crate::scenario::{ClientId, Edge, EmissionFactor, Network, Order, OrderId, Shipper, ShipperId, TimeWindow};
    use proptest::prelude::*;

    fn truck(owner: &str, id: &str, base: &str, mult: Rational) -> Truck {
        Truck {
            key: TruckKey::new(owner, id),
            gains: int(0),
            capacity: int(100),
            size: int(100),
            emission: EmissionFactor { base: base.into(), multiplier: mult },
        }
    }

    fn routed(trucks: &[&str]) -> RouteResult {
        let network = Network::new(
            Vec::<String>::new(),
            vec![Edge { from: "S1".into(), to: "C1".into(), length: int(4) }],
        )
        .unwrap();
        let order = Order {
            id: OrderId::new("S1:C1"),
            shipper: ShipperId::new("S1"),
            client: ClientId::new("C1"),
            packets: 1,
            packet_size: int(1),
            window: TimeWindow::new(540, 600).unwrap(),
        };
        let plan = TripPlan {
            trips: trucks
                .iter()
                .map(|t| Trip { truck: TruckKey::new("S1", *t), orders: vec![order.id.clone()], load: int(1) })
                .collect(),
        };
        let c = Coalition::single(&Shipper { id: ShipperId::new("S1"), clients: [ClientId::new("C1")].into() });
        build_routes(&c, &plan, &[order], &network).unwrap()
    }

    fn fleet() -> Vec<Truck> {
        vec![truck("S1", "T1", "E1", int(1)), truck("S1", "T2", "E2", int(1)), truck("S1", "T3", "E1", ratio(3, 2))]
    }

    #[test]
    fn one_charge_per_trip() {
        let v = account_emissions(&routed(&["T1", "T1", "T1"]), &fleet(), ChargeMode::PerTrip).unwrap();
        assert_eq!(v, EmissionVector::from_pairs([("E1", int(3))]));
        assert_eq!(v.to_string(), "3E1");
        let v = account_emissions(&routed(&["T1", "T2"]), &fleet(), ChargeMode::PerTrip).unwrap();
        assert_eq!(v.to_string(), "E1 + E2");
        assert!(account_emissions(&routed(&[]), &fleet(), ChargeMode::PerTrip).unwrap().is_empty());
    }

    #[test]
    fn per_distance_scales_by_length() {
        let v = account_emissions(&routed(&["T3"]), &fleet(), ChargeMode::PerDistance).unwrap();
        assert_eq!(v.get("E1"), int(6));
    }

    #[test]
    fn unknown_truck_is_reported() {
        let err = account_emissions(&routed(&["T9"]), &fleet(), ChargeMode::PerTrip).unwrap_err();
        assert_eq!(err, EmissionsError::UnknownTruck(TruckKey::new("S1", "T9")));
    }

    #[test]
    fn alternatives_break_ties_by_key() {
        let t = fleet();
        let opts = [TruckKey::new("S1", "T2"), TruckKey::new("S1", "T1"), TruckKey::new("S1", "T3")];
        assert_eq!(resolve_alternative(&opts, &t, &Weights::default()).unwrap().key.id, "T1");
        let heavy_e1 = Weights([("E1".to_string(), int(5))].into());
        assert_eq!(resolve_alternative(&opts, &t, &heavy_e1).unwrap().key.id, "T2");
        assert_eq!(resolve_alternative(&[], &t, &Weights::default()), Err(EmissionsError::NoAlternatives));
    }

    fn kinds(fc: EmissionVector, nc: EmissionVector) -> BTreeMap<CoalitionKind, EmissionVector> {
        [(CoalitionKind::FC, fc), (CoalitionKind::NC, nc)].into()
    }

    #[test]
    fn identical_vectors_do_not_improve() {
        let v = EmissionVector::from_pairs([("E1", int(2))]);
        let c = compare_emissions(&kinds(v.clone(), v), &Weights::default());
        assert_eq!(c.verdict, Some((false, VerdictBasis::Dominance)));
    }

    #[test]
    fn incomparable_vectors_fall_back_to_totals() {
        let fc = EmissionVector::from_pairs([("E1", int(1)), ("E2", int(2))]);
        let nc = EmissionVector::from_pairs([("E1", int(4))]);
        let c = compare_emissions(&kinds(fc, nc), &Weights::default());
        assert_eq!(c.verdict, Some((true, VerdictBasis::Scalarized)));
        let no_nc: BTreeMap<_, _> = [(CoalitionKind::FC, EmissionVector::new())].into();
        assert_eq!(compare_emissions(&no_nc, &Weights::default()).verdict, None);
    }

    #[test]
    fn tier1_values_and_dashes() {
        use MileageBin::*;
        use Pollutant::*;
        use VehicleCategory::*;
        assert_eq!(tier1_lookup(PassengerCar, Short, Co), Some(ratio(17, 5)));
        assert_eq!(tier1_lookup(LldtOver3750, Long, Co), Some(ratio(11, 2)));
        assert_eq!(tier1_lookup(PassengerCar, Short, Thc), Some(ratio(41, 100)));
        assert_eq!(tier1_lookup(HldtUnder5750, Short, Nmhc), None);
        assert_eq!(tier1_lookup(PassengerCar, Long, Thc), None);
        assert_eq!(tier1_lookup(HldtOver5750, Long, NoxGasoline), Some(ratio(153, 100)));
        assert_eq!(tier1_lookup_str("LLDT>3750", "100k", "CO").unwrap(), Some(ratio(11, 2)));
        assert!(matches!(tier1_lookup_str("bus", "50k", "CO"), Err(EmissionsError::UnknownKey(_))));
        let absent = VehicleCategory::ALL
            .iter()
            .flat_map(|c| [Short, Long].map(move |b| (c, b)))
            .flat_map(|(c, b)| Pollutant::ALL.map(move |p| tier1_lookup(*c, b, p)))
            .filter(Option::is_none)
            .count();
        assert_eq!(absent, 10);
    }

    fn arb_vector() -> impl Strategy<Value = EmissionVector> {
        prop::collection::vec((0usize..3, 0i128..20), 0..4).prop_map(|terms| {
            EmissionVector::from_pairs(terms.into_iter().map(|(b, c)| (["E1", "E2", "E3"][b], int(c))))
        })
    }

    proptest! {
        #[test]
        fn accounting_is_additive(a in prop::collection::vec(0usize..3, 0..6), b in prop::collection::vec(0usize..3, 0..6)) {
            let ids = ["T1", "T2", "T3"];
            let ta: Vec<&str> = a.iter().map(|&i| ids[i]).collect();
            let tb: Vec<&str> = b.iter().map(|&i| ids[i]).collect();
            let both: Vec<&str> = ta.iter().chain(&tb).copied().collect();
            let f = fleet();
            let va = account_emissions(&routed(&ta), &f, ChargeMode::PerTrip).unwrap();
            let vb = account_emissions(&routed(&tb), &f, ChargeMode::PerTrip).unwrap();
            let vab = account_emissions(&routed(&both), &f, ChargeMode::PerTrip).unwrap();
            prop_assert_eq!(vab.clone(), va.clone() + vb);
            prop_assert!(va.le(&vab));
        }

        #[test]
        fn dominance_verdict_survives_rescaling(fc in arb_vector(), nc in arb_vector(), k in 1i128..50) {
            let w = Weights::default();
            let before = compare_emissions(&kinds(fc.clone(), nc.clone()), &w).verdict;
            let after = compare_emissions(&kinds(fc.scaled(ratio(k, 7)), nc.scaled(ratio(k, 7))), &w).verdict;
            prop_assert_eq!(before, after);
        }
    }
}
