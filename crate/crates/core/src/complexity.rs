//! Uncertainty effectors, dynamic system complexity and the spider network
//! of city complexities.

use std::fmt;

use num_traits::{One, Signed, Zero};

use crate::num::{dec, int, parse_rational, ratio, Rational};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ComplexityError {
    #[error("axiom violation: {0}")]
    AxiomViolation(String),
    #[error("unknown condition `{0}`")]
    Registry(String),
    #[error("condition `{0}` only exists as a negative effector")]
    Polarity(String),
    #[error("at least one effector multiplicity must be non-zero")]
    ZeroMultiplicities,
    #[error("singular state: {0}")]
    SingularState(&'static str),
    #[error("ratio {0} lies outside the modelled regime [0, 1 + eps]")]
    OutsideRegime(String),
    #[error("eps must lie in (0, 0.5), got {0}")]
    InvalidEps(String),
    #[error("city deltas must be >= 0")]
    NegativeDelta,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Polarity {
    Positive,
    Negative,
}

impl Polarity {
    fn sign(self) -> i128 {
        match self {
            Polarity::Positive => 1,
            Polarity::Negative => -1,
        }
    }
}

/// Registered condition with its hypothetic magnitude.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Condition {
    pub name: &'static str,
    magnitude: &'static str,
    pub negative_only: bool,
}

impl Condition {
    pub fn magnitude(&self) -> Rational {
        parse_rational(self.magnitude).expect("registry magnitudes are valid decimals")
    }
}

/// The twelve printed conditions. Rows elided in the source table are not
/// registered.
pub const REGISTRY: [Condition; 12] = [
    Condition { name: "Air", magnitude: "1.1", negative_only: false },
    Condition { name: "Dry", magnitude: "1.11", negative_only: false },
    Condition { name: "Wet", magnitude: "1.111", negative_only: false },
    Condition { name: "Wind", magnitude: "11.1", negative_only: false },
    Condition { name: "Snow", magnitude: "111.1", negative_only: false },
    Condition { name: "Water", magnitude: "111.11", negative_only: false },
    Condition { name: "Tornado", magnitude: "1111.1", negative_only: true },
    Condition { name: "Hurricane", magnitude: "1111.11", negative_only: true },
    Condition { name: "Planetoid", magnitude: "11111.11", negative_only: true },
    Condition { name: "Sunlight", magnitude: "11111.1111", negative_only: false },
    Condition { name: "Alien invasion", magnitude: "11111111.1", negative_only: false },
    Condition { name: "Black hole", magnitude: "1111111111.1", negative_only: true },
];

/// Case-insensitive registry lookup; `alien_invasion` and `Alien invasion`
/// both resolve.
pub fn lookup_condition(name: &str) -> Option<&'static Condition> {
    let norm = |s: &str| s.to_ascii_lowercase().replace(['_', '-'], " ");
    let wanted = norm(name.trim());
    REGISTRY.iter().find(|c| norm(c.name) == wanted)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConditionEffector {
    pub condition: &'static Condition,
    pub polarity: Polarity,
    pub multiplicity: u32,
}

impl ConditionEffector {
    pub fn new(condition: &str, polarity: Polarity, multiplicity: u32) -> Result<Self, ComplexityError> {
        let c = lookup_condition(condition).ok_or_else(|| ComplexityError::Registry(condition.to_string()))?;
        if c.negative_only && polarity == Polarity::Positive {
            return Err(ComplexityError::Polarity(c.name.to_string()));
        }
        Ok(Self { condition: c, polarity, multiplicity })
    }

    /// Signed contribution `±k_x · n_x`.
    pub fn contribution(&self) -> Rational {
        self.condition.magnitude() * int(self.polarity.sign() * self.multiplicity as i128)
    }
}

/// Magnitude `k_o` of the uncertainty effect; never exactly 0 or 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct UncertaintyValue(Rational);

impl UncertaintyValue {
    pub fn new(k: Rational) -> Result<Self, ComplexityError> {
        if k.is_negative() {
            return Err(ComplexityError::AxiomViolation(format!("k_o = {} is negative", dec(&k))));
        }
        if k.is_zero() || k.is_one() {
            return Err(ComplexityError::AxiomViolation(format!(
                "k_o = {} (neutrality 1 and nullity 0 are excluded)",
                dec(&k)
            )));
        }
        Ok(Self(k))
    }

    /// The near-neutral value `1 + eps` used for the levity presumption.
    pub fn near_neutral(eps: Rational) -> Result<Self, ComplexityError> {
        Self::new(Rational::one() + eps)
    }

    pub fn value(&self) -> Rational {
        self.0
    }
}

pub const DEFAULT_HLT_EPS: (i128, i128) = (1, 1_000_000);

pub fn default_hlt_eps() -> Rational {
    ratio(DEFAULT_HLT_EPS.0, DEFAULT_HLT_EPS.1)
}

/// `k_o = |Σ polarity · k_x · n_x|`.
pub fn effector_sum(effectors: &[ConditionEffector]) -> Result<UncertaintyValue, ComplexityError> {
    if effectors.iter().all(|e| e.multiplicity == 0) {
        return Err(ComplexityError::ZeroMultiplicities);
    }
    let total: Rational = effectors.iter().map(ConditionEffector::contribution).sum();
    UncertaintyValue::new(total.abs())
}

/// How the union of scalar complexity deltas is aggregated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum UnionMode {
    #[default]
    Max,
    Sum,
}

impl UnionMode {
    pub fn aggregate<'a>(self, values: impl IntoIterator<Item = &'a Rational>) -> Rational {
        let it = values.into_iter();
        match self {
            UnionMode::Max => it.fold(Rational::zero(), |acc, v| if *v > acc { *v } else { acc }),
            UnionMode::Sum => it.sum(),
        }
    }
}

/// The eight individual complexities of a city.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum CityComplexity {
    /// Administrative and government policies.
    Policies,
    Shippers,
    InformationTechnology,
    Infrastructure,
    Residents,
    Freights,
    Goods,
    Environment,
}

impl CityComplexity {
    pub const ALL: [CityComplexity; 8] = [
        CityComplexity::Policies,
        CityComplexity::Shippers,
        CityComplexity::InformationTechnology,
        CityComplexity::Infrastructure,
        CityComplexity::Residents,
        CityComplexity::Freights,
        CityComplexity::Goods,
        CityComplexity::Environment,
    ];

    pub fn symbol(self) -> &'static str {
        match self {
            CityComplexity::Policies => "dPo",
            CityComplexity::Shippers => "dS",
            CityComplexity::InformationTechnology => "dIt",
            CityComplexity::Infrastructure => "dI",
            CityComplexity::Residents => "dR",
            CityComplexity::Freights => "dFe",
            CityComplexity::Goods => "dG",
            CityComplexity::Environment => "dE",
        }
    }
}

impl fmt::Display for CityComplexity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

/// Magnitudes of the eight dynamic city complexities, in [`CityComplexity::ALL`] order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CityDeltas([Rational; 8]);

impl CityDeltas {
    pub fn new(values: [Rational; 8]) -> Result<Self, ComplexityError> {
        if values.iter().any(Signed::is_negative) {
            return Err(ComplexityError::NegativeDelta);
        }
        Ok(Self(values))
    }

    pub fn uniform(v: Rational) -> Result<Self, ComplexityError> {
        Self::new([v; 8])
    }

    pub fn values(&self) -> &[Rational; 8] {
        &self.0
    }

    pub fn get(&self, which: CityComplexity) -> Rational {
        self.0[which as usize]
    }

    pub fn environment(&self) -> Rational {
        self.get(CityComplexity::Environment)
    }

    /// Agglomeration `ΔA`: the union of every delta except the environment.
    pub fn agglomeration(&self, mode: UnionMode) -> Rational {
        mode.aggregate(&self.0[..7])
    }

    pub fn union_all(&self, mode: UnionMode) -> Rational {
        mode.aggregate(&self.0)
    }
}

/// `ΔS_C = k_o × (ΔP_o ∪ … ∪ ΔE)`.
pub fn system_complexity(k: UncertaintyValue, deltas: &CityDeltas, mode: UnionMode) -> Rational {
    k.value() * deltas.union_all(mode)
}

/// `S_T = 1 / ΔS_C`.
pub fn system_state(complexity: Rational) -> Result<Rational, ComplexityError> {
    if complexity.is_zero() {
        return Err(ComplexityError::SingularState("system complexity is zero"));
    }
    Ok(complexity.recip())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TrioState {
    NonChaotic,
    NearChaotic,
    Cataclysmic,
}

impl fmt::Display for TrioState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TrioState::NonChaotic => "non-chaotic",
            TrioState::NearChaotic => "near-chaotic",
            TrioState::Cataclysmic => "cataclysmic",
        })
    }
}

pub fn default_trio_eps() -> Rational {
    ratio(1, 20)
}

/// Classifies the ratio `r = ΔS_C / (k_o × max(ΔA, ΔE))`.
pub fn classify_trio(
    complexity: Rational,
    k: UncertaintyValue,
    d_a: Rational,
    d_e: Rational,
    eps: Rational,
) -> Result<TrioState, ComplexityError> {
    let denom = k.value() * d_a.max(d_e);
    if denom.is_zero() {
        return Err(ComplexityError::SingularState("k_o x (dA u dE) is zero"));
    }
    classify_ratio(complexity / denom, eps)
}

/// Region lookup on the ratio alone.
pub fn classify_ratio(r: Rational, eps: Rational) -> Result<TrioState, ComplexityError> {
    if !(eps.is_positive() && eps < ratio(1, 2)) {
        return Err(ComplexityError::InvalidEps(dec(&eps)));
    }
    let one = Rational::one();
    if r.is_negative() || r > one + eps {
        return Err(ComplexityError::OutsideRegime(dec(&r)));
    }
    if (r - one).abs() <= eps {
        Ok(TrioState::NonChaotic)
    } else if r <= eps {
        Ok(TrioState::Cataclysmic)
    } else {
        Ok(TrioState::NearChaotic)
    }
}

// ---------------------------------------------------------------------------
// Spider network
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Tangibility {
    Tangible,
    Intangible,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum NodeClass {
    Tangible,
    Intangible,
    SemiTangible,
}

impl fmt::Display for NodeClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            NodeClass::Tangible => "tangible",
            NodeClass::Intangible => "intangible",
            NodeClass::SemiTangible => "semi-tangible",
        })
    }
}

/// Direction drawn on a link. Stored for completeness; no computation uses it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LinkDirection {
    Clockwise,
    Anticlockwise,
    Dual,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SpiderLink {
    pub from: CityComplexity,
    pub to: CityComplexity,
    pub tangibility: Tangibility,
    pub direction: LinkDirection,
}

/// A node of the octagon with its two opposite-side links.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SpiderNode {
    pub kind: CityComplexity,
    pub links: (Tangibility, Tangibility),
}

pub fn classify_spider_node(node: &SpiderNode) -> NodeClass {
    match node.links {
        (Tangibility::Tangible, Tangibility::Tangible) => NodeClass::Tangible,
        (Tangibility::Intangible, Tangibility::Intangible) => NodeClass::Intangible,
        _ => NodeClass::SemiTangible,
    }
}

/// Octagon ring order and the tangibility of the link leaving each node
/// clockwise. The arrangement yields one tangible node (residents), three
/// intangible nodes and four semi-tangible nodes.
const RING: [(CityComplexity, Tangibility); 8] = [
    (CityComplexity::Freights, Tangibility::Tangible),
    (CityComplexity::Residents, Tangibility::Tangible),
    (CityComplexity::Shippers, Tangibility::Intangible),
    (CityComplexity::Policies, Tangibility::Intangible),
    (CityComplexity::InformationTechnology, Tangibility::Intangible),
    (CityComplexity::Goods, Tangibility::Tangible),
    (CityComplexity::Infrastructure, Tangibility::Intangible),
    (CityComplexity::Environment, Tangibility::Intangible),
];

pub fn spider_links() -> Vec<SpiderLink> {
    (0..RING.len())
        .map(|i| SpiderLink {
            from: RING[i].0,
            to: RING[(i + 1) % RING.len()].0,
            tangibility: RING[i].1,
            direction: LinkDirection::Dual,
        })
        .collect()
}

pub fn canonical_spider_network() -> Vec<(SpiderNode, NodeClass)> {
    let n = RING.len();
    (0..n)
        .map(|i| {
            let incoming = RING[(i + n - 1) % n].1;
            let outgoing = RING[i].1;
            let node = SpiderNode { kind: RING[i].0, links: (incoming, outgoing) };
            (node, classify_spider_node(&node))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn eff(c: &str, p: Polarity, n: u32) -> ConditionEffector {
        ConditionEffector::new(c, p, n).unwrap()
    }

    #[test]
    fn effector_sum_examples() {
        let k = effector_sum(&[eff("Air", Polarity::Positive, 2)]).unwrap();
        assert_eq!(k.value(), ratio(22, 10));

        let cancel = effector_sum(&[eff("Air", Polarity::Positive, 1), eff("Air", Polarity::Negative, 1)]);
        assert!(matches!(cancel, Err(ComplexityError::AxiomViolation(_))));

        // |-1111.1 + 11.1| = 1100
        let k = effector_sum(&[eff("Tornado", Polarity::Negative, 1), eff("Wind", Polarity::Positive, 1)]).unwrap();
        assert_eq!(k.value(), int(1100));
    }

    #[test]
    fn effector_registry_errors() {
        assert_eq!(
            ConditionEffector::new("Tsunami", Polarity::Negative, 1),
            Err(ComplexityError::Registry("Tsunami".into()))
        );
        for c in ["Tornado", "Hurricane", "Planetoid", "Black hole"] {
            assert!(matches!(ConditionEffector::new(c, Polarity::Positive, 1), Err(ComplexityError::Polarity(_))));
        }
        assert!(ConditionEffector::new("black_hole", Polarity::Negative, 1).is_ok());
        assert_eq!(effector_sum(&[]), Err(ComplexityError::ZeroMultiplicities));
        assert_eq!(effector_sum(&[eff("Air", Polarity::Positive, 0)]), Err(ComplexityError::ZeroMultiplicities));
    }

    #[test]
    fn registry_magnitudes_are_never_zero_or_one() {
        assert_eq!(REGISTRY.len(), 12);
        for c in REGISTRY {
            let m = c.magnitude();
            assert!(!m.is_zero() && !m.is_one(), "{}", c.name);
        }
        assert_eq!(lookup_condition("Black hole").unwrap().magnitude(), ratio(11111111111, 10));
    }

    #[test]
    fn effector_equal_to_one_is_rejected() {
        assert!(matches!(UncertaintyValue::new(int(1)), Err(ComplexityError::AxiomViolation(_))));
        assert!(matches!(UncertaintyValue::new(int(0)), Err(ComplexityError::AxiomViolation(_))));
    }

    #[test]
    fn system_complexity_examples() {
        let eps = default_hlt_eps();
        let k = UncertaintyValue::near_neutral(eps).unwrap();
        let ones = CityDeltas::uniform(int(1)).unwrap();
        assert_eq!(system_complexity(k, &ones, UnionMode::Max), int(1) + eps);

        let two = UncertaintyValue::new(int(2)).unwrap();
        let mut v = [int(1); 8];
        v[0] = int(3);
        assert_eq!(system_complexity(two, &CityDeltas::new(v).unwrap(), UnionMode::Max), int(6));
        assert_eq!(system_complexity(two, &CityDeltas::new(v).unwrap(), UnionMode::Sum), int(20));

        let zeros = CityDeltas::uniform(int(0)).unwrap();
        assert_eq!(system_complexity(two, &zeros, UnionMode::Max), int(0));
    }

    #[test]
    fn agglomeration_excludes_environment() {
        let mut v = [int(1); 8];
        v[7] = int(9);
        let d = CityDeltas::new(v).unwrap();
        assert_eq!(d.agglomeration(UnionMode::Max), int(1));
        assert_eq!(d.union_all(UnionMode::Max), int(9));
        assert_eq!(d.agglomeration(UnionMode::Sum), int(7));
    }

    #[test]
    fn system_state_examples() {
        assert_eq!(system_state(int(2)).unwrap(), ratio(1, 2));
        assert!(matches!(system_state(int(0)), Err(ComplexityError::SingularState(_))));
        let k = UncertaintyValue::new(int(1_000_000_000)).unwrap();
        let c = system_complexity(k, &CityDeltas::uniform(int(1)).unwrap(), UnionMode::Max);
        assert_eq!(system_state(c).unwrap(), ratio(1, 1_000_000_000));
    }

    #[test]
    fn trio_examples() {
        let eps = default_trio_eps();
        assert_eq!(classify_ratio(int(1), eps), Ok(TrioState::NonChaotic));
        assert_eq!(classify_ratio(int(0), eps), Ok(TrioState::Cataclysmic));
        assert_eq!(classify_ratio(ratio(1, 2), eps), Ok(TrioState::NearChaotic));
        assert!(matches!(classify_ratio(ratio(11, 10), eps), Err(ComplexityError::OutsideRegime(_))));
        assert!(matches!(classify_ratio(ratio(1, 2), ratio(1, 2)), Err(ComplexityError::InvalidEps(_))));

        let k = UncertaintyValue::new(int(2)).unwrap();
        assert_eq!(classify_trio(int(4), k, int(1), int(2), eps), Ok(TrioState::NonChaotic));
        assert!(matches!(
            classify_trio(int(4), k, int(0), int(0), eps),
            Err(ComplexityError::SingularState(_))
        ));
    }

    #[test]
    fn spider_node_examples() {
        use Tangibility::*;
        let node = |kind, a, b| SpiderNode { kind, links: (a, b) };
        assert_eq!(classify_spider_node(&node(CityComplexity::Residents, Tangible, Tangible)), NodeClass::Tangible);
        assert_eq!(
            classify_spider_node(&node(CityComplexity::Environment, Intangible, Intangible)),
            NodeClass::Intangible
        );
        assert_eq!(classify_spider_node(&node(CityComplexity::Freights, Tangible, Intangible)), NodeClass::SemiTangible);
    }

    #[test]
    fn canonical_spider_network_matches_component_table() {
        let net = canonical_spider_network();
        assert_eq!(net.len(), 8);
        let class_of = |k| net.iter().find(|(n, _)| n.kind == k).unwrap().1;
        assert_eq!(class_of(CityComplexity::Residents), NodeClass::Tangible);
        for k in [CityComplexity::Policies, CityComplexity::InformationTechnology, CityComplexity::Environment] {
            assert_eq!(class_of(k), NodeClass::Intangible);
        }
        for k in [
            CityComplexity::Shippers,
            CityComplexity::Goods,
            CityComplexity::Infrastructure,
            CityComplexity::Freights,
        ] {
            assert_eq!(class_of(k), NodeClass::SemiTangible);
        }
        for (node, class) in &net {
            assert_eq!(classify_spider_node(node), *class);
        }
        // Each link is shared by exactly the two adjacent nodes.
        let links = spider_links();
        assert_eq!(links.len(), 8);
        for (node, _) in &net {
            assert_eq!(links.iter().filter(|l| l.from == node.kind || l.to == node.kind).count(), 2);
        }
    }

    fn arb_effector() -> impl Strategy<Value = ConditionEffector> {
        (0usize..REGISTRY.len(), any::<bool>(), 1u32..20).prop_map(|(i, neg, n)| {
            let c = &REGISTRY[i];
            let p = if neg || c.negative_only { Polarity::Negative } else { Polarity::Positive };
            ConditionEffector::new(c.name, p, n).unwrap()
        })
    }

    proptest! {
        #[test]
        fn effector_sum_is_permutation_invariant(
            effs in prop::collection::vec(arb_effector(), 1..6),
            seed in any::<u64>(),
        ) {
            let mut shuffled = effs.clone();
            let len = shuffled.len();
            for i in 0..len {
                let j = ((seed.rotate_left(i as u32) as usize) ^ i) % len;
                shuffled.swap(i, j);
            }
            prop_assert_eq!(effector_sum(&effs), effector_sum(&shuffled));
        }

        #[test]
        fn system_state_decreases_in_k(a in 2i128..1_000_000, b in 2i128..1_000_000, d in 1i128..50) {
            prop_assume!(a != b);
            let deltas = CityDeltas::uniform(int(d)).unwrap();
            let (lo, hi) = (a.min(b), a.max(b));
            let s_lo = system_state(system_complexity(UncertaintyValue::new(int(lo)).unwrap(), &deltas, UnionMode::Max)).unwrap();
            let s_hi = system_state(system_complexity(UncertaintyValue::new(int(hi)).unwrap(), &deltas, UnionMode::Max)).unwrap();
            prop_assert!(s_hi < s_lo);
        }
    }
}
