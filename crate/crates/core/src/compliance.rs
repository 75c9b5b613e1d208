//! Vehicle usage compliance: the input filter that admits trucks into the
//! city before any goods are assigned.

use std::fmt;

use crate::num::{int, percent_of, Rational};
use crate::scenario::{ComplianceRule, Truck, TruckKey};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ComplianceError {
    #[error("compliance rule needs intents for S, E and En; got {0}")]
    MissingIntent(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Verdict {
    Accept,
    Reject,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Accept => "Accept",
            Verdict::Reject => "Reject",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Inference {
    FullySatisfied,
    PartiallySatisfied,
    Unsatisfied,
}

impl fmt::Display for Inference {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Inference::FullySatisfied => "Fully satisfied",
            Inference::PartiallySatisfied => "Partially satisfied",
            Inference::Unsatisfied => "Unsatisfied",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TruckCheck {
    pub truck: TruckKey,
    /// Vehicle size within the scaled maximum.
    pub c1: bool,
    /// Gains at or above the scaled net-profit threshold.
    pub c2: bool,
    /// Emission multiplier against the environment intent.
    pub c3: bool,
}

impl TruckCheck {
    pub fn verdict(&self) -> Verdict {
        if self.c1 && self.c2 && self.c3 {
            Verdict::Accept
        } else {
            Verdict::Reject
        }
    }

    pub fn inference(&self) -> Inference {
        match [self.c1, self.c2, self.c3].iter().filter(|&&b| b).count() {
            3 => Inference::FullySatisfied,
            0 => Inference::Unsatisfied,
            _ => Inference::PartiallySatisfied,
        }
    }
}

/// Direction of the emission constraint.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum EmissionCheck {
    /// Multiplier must be at least the En-intent fraction.
    #[default]
    AtLeast,
    /// Multiplier must be at most the En-intent fraction.
    AtMost,
}

/// Thresholds derived from a rule: `(max size, min gains, emission bound)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Thresholds {
    pub max_size: Rational,
    pub min_gains: Rational,
    pub emission: Rational,
}

pub fn thresholds(rule: &ComplianceRule) -> Result<Thresholds, ComplianceError> {
    if rule.intents.len() < 3 {
        return Err(ComplianceError::MissingIntent(rule.intents.len()));
    }
    Ok(Thresholds {
        max_size: percent_of(&rule.max_vehicle_size, &rule.intents[0]),
        min_gains: percent_of(&rule.max_net_profit, &rule.intents[1]),
        emission: percent_of(&int(1), &rule.intents[2]),
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ComplianceReport {
    /// `None` when no rule was applied because there were no trucks.
    pub thresholds: Option<Thresholds>,
    pub checks: Vec<TruckCheck>,
}

impl ComplianceReport {
    pub fn accepted(&self) -> impl Iterator<Item = &TruckKey> {
        self.checks.iter().filter(|c| c.verdict() == Verdict::Accept).map(|c| &c.truck)
    }

    pub fn check(&self, key: &TruckKey) -> Option<&TruckCheck> {
        self.checks.iter().find(|c| &c.truck == key)
    }

    pub fn is_accepted(&self, key: &TruckKey) -> bool {
        self.check(key).is_some_and(|c| c.verdict() == Verdict::Accept)
    }
}

pub fn filter_trucks(trucks: &[Truck], rule: &ComplianceRule) -> Result<ComplianceReport, ComplianceError> {
    filter_trucks_with(trucks, rule, EmissionCheck::AtLeast)
}

pub fn filter_trucks_with(
    trucks: &[Truck],
    rule: &ComplianceRule,
    emission: EmissionCheck,
) -> Result<ComplianceReport, ComplianceError> {
    let t = thresholds(rule)?;
    let checks = trucks
        .iter()
        .map(|truck| TruckCheck {
            truck: truck.key.clone(),
            c1: truck.size <= t.max_size,
            c2: truck.gains >= t.min_gains,
            c3: match emission {
                EmissionCheck::AtLeast => truck.emission.multiplier >= t.emission,
                EmissionCheck::AtMost => truck.emission.multiplier <= t.emission,
            },
        })
        .collect();
    Ok(ComplianceReport { thresholds: Some(t), checks })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::num::ratio;
    use crate::scenario::EmissionFactor;
    use proptest::prelude::*;

    fn truck(id: &str, gains: Rational, size: i128, mult: Rational) -> Truck {
        Truck {
            key: TruckKey::new("S1", id),
            gains,
            capacity: int(100),
            size: int(size),
            emission: EmissionFactor { base: "E1".into(), multiplier: mult },
        }
    }

    fn rule(intents: [i128; 3]) -> ComplianceRule {
        ComplianceRule::new(int(600), int(5000), intents.iter().map(|&x| int(x)).collect()).unwrap()
    }

    #[test]
    fn boundary_values_are_inclusive() {
        let r = rule([40, 0, 80]);
        let t = truck("T", int(0), 240, ratio(4, 5));
        let report = filter_trucks(&[t], &r).unwrap();
        assert_eq!(report.checks[0].verdict(), Verdict::Accept);
        assert_eq!(report.checks[0].inference(), Inference::FullySatisfied);
    }

    #[test]
    fn thresholds_scale_by_intent() {
        let t = thresholds(&rule([30, 10, 120])).unwrap();
        assert_eq!(t.max_size, int(180));
        assert_eq!(t.min_gains, int(500));
        assert_eq!(t.emission, ratio(6, 5));
    }

    #[test]
    fn missing_intent_is_an_error() {
        let r = ComplianceRule::new(int(600), int(5000), vec![int(40), int(0)]).unwrap();
        assert_eq!(filter_trucks(&[], &r), Err(ComplianceError::MissingIntent(2)));
    }

    #[test]
    fn inverted_emission_check() {
        let r = rule([100, 0, 120]);
        let t = truck("T", int(0), 10, ratio(11, 10));
        assert!(!filter_trucks(std::slice::from_ref(&t), &r).unwrap().checks[0].c3);
        assert!(filter_trucks_with(&[t], &r, EmissionCheck::AtMost).unwrap().checks[0].c3);
    }

    #[test]
    fn all_constraints_failing_is_unsatisfied() {
        let r = rule([30, 10, 120]);
        let t = truck("T9", int(100), 400, ratio(11, 10));
        let c = &filter_trucks(&[t], &r).unwrap().checks[0];
        assert_eq!((c.c1, c.c2, c.c3), (false, false, false));
        assert_eq!(c.inference(), Inference::Unsatisfied);
    }

    fn arb_truck() -> impl Strategy<Value = Truck> {
        (0i128..1000, 1i128..600, 1i128..30).prop_map(|(g, s, m)| truck("T", int(g), s, ratio(m, 10)))
    }

    proptest! {
        #[test]
        fn social_intent_only_relaxes(trucks in prop::collection::vec(arb_truck(), 0..8), s in 0i128..100, ds in 0i128..100, e in 0i128..50, en in 0i128..200) {
            let lo = filter_trucks(&trucks, &rule([s, e, en])).unwrap();
            let hi = filter_trucks(&trucks, &rule([s + ds, e, en])).unwrap();
            for (a, b) in lo.checks.iter().zip(&hi.checks) {
                prop_assert!(a.verdict() != Verdict::Accept || b.verdict() == Verdict::Accept);
            }
        }

        #[test]
        fn economy_and_environment_intents_only_tighten(trucks in prop::collection::vec(arb_truck(), 0..8), s in 0i128..100, e in 0i128..50, de in 0i128..50, en in 0i128..200, den in 0i128..100) {
            let base = filter_trucks(&trucks, &rule([s, e, en])).unwrap();
            let tighter = filter_trucks(&trucks, &rule([s, e + de, en + den])).unwrap();
            for (a, b) in base.checks.iter().zip(&tighter.checks) {
                prop_assert!(b.verdict() != Verdict::Accept || a.verdict() == Verdict::Accept);
            }
        }

        #[test]
        fn verdicts_are_per_truck(trucks in prop::collection::vec(arb_truck(), 1..8), cut in 0usize..8) {
            let r = rule([40, 5, 80]);
            let full = filter_trucks(&trucks, &r).unwrap();
            let cut = cut.min(trucks.len());
            let part = filter_trucks(&trucks[..cut], &r).unwrap();
            prop_assert_eq!(&full.checks[..cut], &part.checks[..]);
            for c in &full.checks {
                if c.verdict() == Verdict::Reject {
                    prop_assert!(!(c.c1 && c.c2 && c.c3));
                }
            }
        }
    }
}
