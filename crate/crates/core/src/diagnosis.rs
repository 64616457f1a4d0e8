// SPDX-License-Identifier: Apache-2.0

//! Single-fault dictionary over one four-color group and diagnosis of
//! full-map test reports against it.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::bist::{run_block_test, BlockTestReport, DetectorResponse, Fault, FaultKind, WiredBehavior};
use crate::bumpmap::{
    build_test_map, AdjacencyGraph, BumpId, BumpMap, Color, Lattice, LatticeKind,
    DEFAULT_SHORT_RADIUS_FACTOR,
};
use crate::defect::{
    threshold_row, ComponentKind, ElectricalScenario, FunctionalFaultClass, MagnitudeBound,
    SeverityCurve,
};
use crate::{Error, Result};

/// A fault of the abstract four-color group, independent of bump ids.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum QuadFault {
    StuckAt { color: Color, value: bool },
    /// Colors in ascending [`Color`] order.
    Bridge { a: Color, b: Color },
}

impl QuadFault {
    pub fn bridge(a: Color, b: Color) -> Self {
        QuadFault::Bridge {
            a: a.min(b),
            b: a.max(b),
        }
    }

    fn partner(self, c: Color) -> Option<Color> {
        match self {
            QuadFault::Bridge { a, b } if a == c => Some(b),
            QuadFault::Bridge { a, b } if b == c => Some(a),
            _ => None,
        }
    }
}

impl fmt::Display for QuadFault {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            QuadFault::StuckAt { color, value } => write!(f, "{color} SA-{}", u8::from(*value)),
            QuadFault::Bridge { a, b } => write!(f, "{a}+{b}"),
        }
    }
}

/// The 14 single faults: eight stuck-at, then six unordered color pairs.
pub fn fault_universe() -> Vec<QuadFault> {
    let mut out = Vec::with_capacity(14);
    for c in Color::ALL {
        for value in [false, true] {
            out.push(QuadFault::StuckAt { color: c, value });
        }
    }
    for (i, &a) in Color::ALL.iter().enumerate() {
        for &b in &Color::ALL[i + 1..] {
            out.push(QuadFault::bridge(a, b));
        }
    }
    out
}

/// Response of every color of the group for one fault realization.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Signature(pub BTreeMap<Color, DetectorResponse>);

impl Signature {
    pub fn get(&self, c: Color) -> DetectorResponse {
        self.0.get(&c).copied().unwrap_or(DetectorResponse::PASS)
    }

    pub fn failing(&self) -> impl Iterator<Item = Color> + '_ {
        self.0.iter().filter(|(_, r)| **r != DetectorResponse::PASS).map(|(&c, _)| c)
    }
}

impl fmt::Display for Signature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|(c, r)| format!("{c}: {r}")).collect();
        write!(f, "{{{}}}", parts.join(", "))
    }
}

/// One simulated realization of a universe fault.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Realization {
    pub fault: QuadFault,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub behavior: Option<WiredBehavior>,
    /// Word after wired resolution on the first faulted net.
    pub word: String,
    pub signature: Signature,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FaultDictionary {
    realizations: Vec<Realization>,
    entries: BTreeMap<Signature, BTreeSet<QuadFault>>,
    ambiguous_pairs: BTreeSet<(QuadFault, QuadFault)>,
}

impl FaultDictionary {
    pub fn realizations(&self) -> &[Realization] {
        &self.realizations
    }

    pub fn entries(&self) -> &BTreeMap<Signature, BTreeSet<QuadFault>> {
        &self.entries
    }

    pub fn ambiguous_pairs(&self) -> &BTreeSet<(QuadFault, QuadFault)> {
        &self.ambiguous_pairs
    }

    pub fn universe_size(&self) -> usize {
        self.realizations
            .iter()
            .map(|r| r.fault)
            .collect::<BTreeSet<_>>()
            .len()
    }

    pub fn signatures_of(&self, fault: QuadFault) -> impl Iterator<Item = &Realization> {
        self.realizations.iter().filter(move |r| r.fault == fault)
    }
}

/// A four-bump group with one bump per color, all in a single block and
/// all mutually adjacent. Bump ids follow [`Color::index`].
pub fn one_gut_quad() -> (BumpMap, AdjacencyGraph) {
    let lattice = Lattice::new(LatticeKind::Hexagonal, 2, 2, 1.0).expect("valid lattice");
    let (map, graph) =
        build_test_map(lattice, DEFAULT_SHORT_RADIUS_FACTOR * lattice.pitch_um, 1).expect("quad is 4-colorable");
    debug_assert!(Color::ALL
        .iter()
        .all(|&c| map.color(BumpId(c.index())) == Some(c)));
    (map, graph)
}

fn quad_id(c: Color) -> BumpId {
    BumpId(c.index())
}

/// Concrete fault on [`one_gut_quad`].
pub fn quad_fault_instance(fault: QuadFault, behavior: WiredBehavior) -> Fault {
    match fault {
        QuadFault::StuckAt { color, value: false } => Fault::sa0(quad_id(color)),
        QuadFault::StuckAt { color, value: true } => Fault::sa1(quad_id(color)),
        QuadFault::Bridge { a, b } => Fault::bridge(quad_id(a), quad_id(b), behavior),
    }
}

fn simulate_quad(map: &BumpMap, fault: &Fault) -> (String, Signature) {
    let report = run_block_test(map, std::slice::from_ref(fault))
        .expect("quad faults are simulable")
        .remove(0);
    let signature = Signature(
        report
            .responses
            .iter()
            .map(|(&id, &r)| (map.color(id).expect("colored"), r))
            .collect(),
    );
    let word = report.received[&fault.nets()[0]].to_string();
    (word, signature)
}

/// Simulates all 14 faults on a one-group quad. Bridges contribute one
/// signature per wired behavior.
pub fn build_fault_dictionary() -> FaultDictionary {
    let (map, _) = one_gut_quad();
    let mut realizations = Vec::new();
    for fault in fault_universe() {
        let behaviors: &[Option<WiredBehavior>] = match fault {
            QuadFault::StuckAt { .. } => &[None],
            QuadFault::Bridge { .. } => &[Some(WiredBehavior::WiredAnd), Some(WiredBehavior::WiredOr)],
        };
        for &behavior in behaviors {
            let inst = quad_fault_instance(fault, behavior.unwrap_or(WiredBehavior::WiredAnd));
            let (word, signature) = simulate_quad(&map, &inst);
            realizations.push(Realization {
                fault,
                behavior,
                word,
                signature,
            });
        }
    }

    let mut entries: BTreeMap<Signature, BTreeSet<QuadFault>> = BTreeMap::new();
    for r in &realizations {
        entries.entry(r.signature.clone()).or_default().insert(r.fault);
    }
    let mut ambiguous_pairs = BTreeSet::new();
    for faults in entries.values() {
        let v: Vec<_> = faults.iter().copied().collect();
        for i in 0..v.len() {
            for j in i + 1..v.len() {
                ambiguous_pairs.insert((v[i], v[j]));
            }
        }
    }
    FaultDictionary {
        realizations,
        entries,
        ambiguous_pairs,
    }
}

/// Shared, lazily built dictionary.
pub fn fault_dictionary() -> &'static FaultDictionary {
    static DICT: OnceLock<FaultDictionary> = OnceLock::new();
    DICT.get_or_init(build_fault_dictionary)
}

/// Fraction of distinguishable unordered fault pairs, kept as a reduced
/// fraction alongside its decimal value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Diagnosability {
    pub numerator: u64,
    pub denominator: u64,
}

impl Diagnosability {
    pub fn from_counts(universe_size: u64, ambiguous_pairs: u64) -> Result<Self> {
        let total = universe_size * universe_size.saturating_sub(1) / 2;
        if total == 0 || ambiguous_pairs > total {
            return Err(Error::param(format!(
                "{ambiguous_pairs} ambiguous pairs out of {total}"
            )));
        }
        let num = total - ambiguous_pairs;
        let g = gcd(num, total);
        Ok(Diagnosability {
            numerator: num / g,
            denominator: total / g,
        })
    }

    pub fn value(&self) -> f64 {
        self.numerator as f64 / self.denominator as f64
    }
}

impl fmt::Display for Diagnosability {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{} ≈ {:.5}", self.numerator, self.denominator, self.value())
    }
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a.max(1)
    } else {
        gcd(b, a % b)
    }
}

pub fn diagnosability(dict: &FaultDictionary) -> Diagnosability {
    Diagnosability::from_counts(dict.universe_size() as u64, dict.ambiguous_pairs().len() as u64)
        .expect("dictionary is non-empty")
}

/// A fault on concrete bumps that explains an observation.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum Candidate {
    StuckAt { net: BumpId, value: u8 },
    Bridge { a: BumpId, b: BumpId, behaviors: Vec<WiredBehavior> },
}

impl Candidate {
    /// Whether `fault` is this candidate (bridges match on endpoints and
    /// any of the listed behaviors).
    pub fn matches(&self, fault: &Fault) -> bool {
        match (self, fault.kind) {
            (Candidate::StuckAt { net, value: 0 }, FaultKind::Sa0(n)) => *net == n,
            (Candidate::StuckAt { net, value: 1 }, FaultKind::Sa1(n)) => *net == n,
            (Candidate::Bridge { a, b, behaviors }, FaultKind::Bridge { a: fa, b: fb, behavior }) => {
                (*a, *b) == (fa.min(fb), fa.max(fb)) && behaviors.contains(&behavior)
            }
            _ => false,
        }
    }

    pub fn to_fault(&self) -> Vec<Fault> {
        match self {
            Candidate::StuckAt { net, value: 0 } => vec![Fault::sa0(*net)],
            Candidate::StuckAt { net, .. } => vec![Fault::sa1(*net)],
            Candidate::Bridge { a, b, behaviors } => {
                behaviors.iter().map(|&beh| Fault::bridge(*a, *b, beh)).collect()
            }
        }
    }
}

impl fmt::Display for Candidate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Candidate::StuckAt { net, value } => write!(f, "SA{value}({net})"),
            Candidate::Bridge { a, b, behaviors } => {
                let beh: Vec<_> = behaviors.iter().map(|b| b.short_name()).collect();
                write!(f, "Bridge({a}, {b}, {})", beh.join("|"))
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "status", content = "candidates")]
pub enum BumpOutcome {
    Candidates(Vec<Candidate>),
    /// The failing response matches no single modeled fault.
    Unmodeled,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BumpDiagnosis {
    pub bump: BumpId,
    pub block: usize,
    pub color: Color,
    pub response: DetectorResponse,
    pub outcome: BumpOutcome,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Diagnosis {
    /// Empty when no fault was detected.
    pub failing: Vec<BumpDiagnosis>,
    /// Set when the failures cannot come from one fault, so the
    /// single-fault guarantees do not hold.
    pub multi_fault_warning: bool,
}

impl Diagnosis {
    pub fn fault_detected(&self) -> bool {
        !self.failing.is_empty()
    }

    /// Every candidate across all failing bumps.
    pub fn candidates(&self) -> impl Iterator<Item = &Candidate> {
        self.failing.iter().flat_map(|b| match &b.outcome {
            BumpOutcome::Candidates(c) => c.as_slice(),
            BumpOutcome::Unmodeled => &[],
        })
    }

    pub fn explains(&self, fault: &Fault) -> bool {
        self.candidates().any(|c| c.matches(fault))
    }
}

/// Localizes failing bumps in a set of block reports.
///
/// Each failing bump is matched color-locally against the dictionary.
/// Stuck-at candidates need only the bump's own response to match. Bridge
/// candidates are limited to graph neighbors of the partner color whose
/// observed response matches the partner side of the signature; a partner
/// absent from `reports` does not constrain the match.
pub fn diagnose(reports: &[BlockTestReport], map: &BumpMap, graph: &AdjacencyGraph) -> Result<Diagnosis> {
    let dict = fault_dictionary();
    let mut observed: BTreeMap<BumpId, (usize, DetectorResponse)> = BTreeMap::new();
    for r in reports {
        for (&id, &resp) in &r.responses {
            if !map.contains(id) {
                return Err(Error::param(format!("report references unknown bump {id}")));
            }
            observed.insert(id, (r.block, resp));
        }
    }

    let mut failing = Vec::new();
    for (&bump, &(block, response)) in observed
        .iter()
        .filter(|(_, (_, r))| *r != DetectorResponse::PASS) {
        let color = map
            .color(bump)
            .ok_or_else(|| Error::param("bump map has not been colored"))?;
        let mut stuck: BTreeSet<Candidate> = BTreeSet::new();
        let mut bridges: BTreeMap<(BumpId, BumpId), BTreeSet<WiredBehavior>> = BTreeMap::new();

        for real in dict.realizations() {
            if real.signature.get(color) != response {
                continue;
            }
            match real.fault {
                QuadFault::StuckAt { color: c, value } if c == color => {
                    stuck.insert(Candidate::StuckAt {
                        net: bump,
                        value: u8::from(value),
                    });
                }
                QuadFault::Bridge { .. } => {
                    let Some(partner_color) = real.fault.partner(color) else {
                        continue;
                    };
                    for &nb in graph.neighbors(bump) {
                        if map.color(nb) != Some(partner_color) {
                            continue;
                        }
                        let consistent = observed
                            .get(&nb)
                            .is_none_or(|&(_, r)| r == real.signature.get(partner_color));
                        if consistent {
                            bridges
                                .entry((bump.min(nb), bump.max(nb)))
                                .or_default()
                                .insert(real.behavior.expect("bridges carry a behavior"));
                        }
                    }
                }
                _ => {}
            }
        }

        let mut candidates: Vec<Candidate> = stuck.into_iter().collect();
        candidates.extend(bridges.into_iter().map(|((a, b), beh)| Candidate::Bridge {
            a,
            b,
            behaviors: beh.into_iter().collect(),
        }));
        let outcome = if candidates.is_empty() {
            BumpOutcome::Unmodeled
        } else {
            BumpOutcome::Candidates(candidates)
        };
        failing.push(BumpDiagnosis {
            bump,
            block,
            color,
            response,
            outcome,
        });
    }

    let multi_fault_warning = match failing.as_slice() {
        [] | [_] => false,
        [a, b] => !graph.contains(a.bump, b.bump),
        _ => true,
    };
    Ok(Diagnosis {
        failing,
        multi_fault_warning,
    })
}

/// Geometry interval implied by a magnitude bound through a severity curve,
/// in the curve's x units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeometryBound {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lower: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub upper: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RangeWarning {
    /// The supplied curve is not strictly monotone; no geometry bound.
    NonMonotoneCurve,
    /// A bound endpoint lies outside the curve's range and was dropped.
    BoundOutsideCurveRange,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DefectRangeEstimate {
    pub scenario: ElectricalScenario,
    pub class: FunctionalFaultClass,
    pub magnitude_bound: MagnitudeBound,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub critical_path_nm: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub geometry_bound: Option<GeometryBound>,
    pub warnings: Vec<RangeWarning>,
}

fn scenario_for(fault: &Fault) -> Result<ElectricalScenario> {
    use ElectricalScenario::*;
    let allowed: &[ElectricalScenario] = match fault.kind {
        FaultKind::Sa0(_) => &[ShortToVss, VddOpen],
        FaultKind::Sa1(_) => &[ShortToVdd, VssOpen],
        FaultKind::Bridge { .. } => &[SignalToSignalShort, SignalOpen],
    };
    match &fault.provenance {
        None => Ok(allowed[0]),
        Some(p) if allowed.contains(&p.scenario) => Ok(p.scenario),
        Some(p) => Err(Error::param(format!(
            "{:?} cannot produce fault {fault}",
            p.scenario
        ))),
    }
}

/// Smallest defect path that still produces the hard fault, per component.
fn critical_path_nm(scenario: ElectricalScenario, component: ComponentKind) -> Option<f64> {
    use ElectricalScenario::*;
    match (scenario, component) {
        (ShortToVdd | ShortToVss, ComponentKind::CuPillar) => Some(3.0),
        (ShortToVdd | ShortToVss, ComponentKind::RdlSegment) => Some(2.0),
        (SignalToSignalShort, ComponentKind::CuPillar) => Some(4.0),
        (SignalToSignalShort, ComponentKind::RdlSegment) => Some(3.0),
        (SignalOpen, _) => Some(20.0),
        (VddOpen | VssOpen, _) => None,
    }
}

fn geometry_bound(bound: &MagnitudeBound, curve: &SeverityCurve) -> (Option<GeometryBound>, Vec<RangeWarning>) {
    if !curve.is_monotone() {
        return (None, vec![RangeWarning::NonMonotoneCurve]);
    }
    let increasing = curve.is_increasing();
    let mut warnings = Vec::new();
    let mut g = GeometryBound {
        lower: None,
        upper: None,
    };
    // magnitude < upper maps to x < f⁻¹(upper) on a rising curve and x > f⁻¹(upper) on a falling one
    for (endpoint, is_upper) in [(bound.upper, true), (bound.lower, false)] {
        let Some(y) = endpoint else { continue };
        match curve.invert(y) {
            Ok(x) => {
                if is_upper == increasing {
                    g.upper = Some(x);
                } else {
                    g.lower = Some(x);
                }
            }
            Err(_) => warnings.push(RangeWarning::BoundOutsideCurveRange),
        }
    }
    let any = g.lower.is_some() || g.upper.is_some();
    (any.then_some(g), warnings)
}

/// Attaches the defect-size bound of a diagnosed fault and, given a
/// monotone `magnitude = f(geometry)` curve, the matching geometry bound.
///
/// The scenario comes from the fault's provenance when present; otherwise
/// stuck-at faults are read as shorts to the supply rail and bridges as
/// signal-to-signal shorts.
pub fn map_to_defect_range(
    candidate: &Fault,
    component: ComponentKind,
    curve: Option<&SeverityCurve>,
) -> Result<DefectRangeEstimate> {
    let scenario = scenario_for(candidate)?;
    let row = threshold_row(scenario);
    let (geometry_bound, warnings) = match curve {
        Some(c) => geometry_bound(&row.bound, c),
        None => (None, Vec::new()),
    };
    Ok(DefectRangeEstimate {
        scenario,
        class: row.class,
        magnitude_bound: row.bound,
        critical_path_nm: critical_path_nm(scenario, component),
        geometry_bound,
        warnings,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bist::Provenance;
    use crate::defect::CurveFamily;

    fn sig(pairs: &[(Color, (u8, u8))]) -> Signature {
        let mut m: BTreeMap<Color, DetectorResponse> =
            Color::ALL.iter().map(|&c| (c, DetectorResponse::PASS)).collect();
        for &(c, (x, y)) in pairs {
            m.insert(c, DetectorResponse::new(x == 1, y == 1));
        }
        Signature(m)
    }

    #[test]
    fn universe_has_fourteen() {
        let u = fault_universe();
        assert_eq!(u.len(), 14);
        assert_eq!(u.iter().filter(|f| matches!(f, QuadFault::StuckAt { .. })).count(), 8);
        assert_eq!(u.iter().collect::<BTreeSet<_>>().len(), 14);
    }

    #[test]
    fn dictionary_examples() {
        let d = build_fault_dictionary();
        let g_sa0: Vec<_> = d
            .signatures_of(QuadFault::StuckAt { color: Color::Green, value: false })
            .collect();
        assert_eq!(g_sa0.len(), 1);
        assert_eq!(g_sa0[0].signature, sig(&[(Color::Green, (0, 0))]));
        for r in d.signatures_of(QuadFault::bridge(Color::Green, Color::Blue)) {
            assert_eq!(r.signature, sig(&[(Color::Green, (1, 0)), (Color::Blue, (1, 0))]));
        }
        assert_eq!(d.realizations().len(), 8 + 12);
        assert!(d.entries().values().all(|s| !s.is_empty()));
    }

    #[test]
    fn four_ambiguous_pairs() {
        let d = build_fault_dictionary();
        let sa = |c, v| QuadFault::StuckAt { color: c, value: v };
        let expected: BTreeSet<_> = [
            (sa(Color::Green, true), QuadFault::bridge(Color::Green, Color::Red)),
            (sa(Color::Red, false), QuadFault::bridge(Color::Green, Color::Red)),
            (sa(Color::Blue, true), QuadFault::bridge(Color::Blue, Color::Black)),
            (sa(Color::Black, false), QuadFault::bridge(Color::Blue, Color::Black)),
        ]
        .into_iter()
        .collect();
        assert_eq!(d.ambiguous_pairs(), &expected);
    }

    #[test]
    fn diagnosability_values() {
        let d = diagnosability(&build_fault_dictionary());
        assert_eq!((d.numerator, d.denominator), (87, 91));
        assert!((d.value() - 0.956_043_956).abs() < 1e-9);
        let perfect = Diagnosability::from_counts(14, 0).unwrap();
        assert_eq!(perfect.value(), 1.0);
        assert_eq!(Diagnosability::from_counts(14, 91).unwrap().value(), 0.0);
        assert!(Diagnosability::from_counts(14, 92).is_err());
    }

    fn report(map: &BumpMap, faults: &[Fault]) -> Vec<BlockTestReport> {
        run_block_test(map, faults).unwrap()
    }

    #[test]
    fn all_pass_gives_empty_diagnosis() {
        let (map, graph) = one_gut_quad();
        let d = diagnose(&report(&map, &[]), &map, &graph).unwrap();
        assert!(!d.fault_detected());
        assert!(!d.multi_fault_warning);
    }

    #[test]
    fn green_low_with_black_partner() {
        let (map, graph) = one_gut_quad();
        let g = quad_id(Color::Green);
        let k = quad_id(Color::Black);
        let r = report(&map, &[Fault::bridge(g, k, WiredBehavior::WiredAnd)]);
        let d = diagnose(&r, &map, &graph).unwrap();
        let green = d.failing.iter().find(|b| b.bump == g).unwrap();
        assert_eq!(green.response, DetectorResponse::new(false, false));
        assert_eq!(
            green.outcome,
            BumpOutcome::Candidates(vec![
                Candidate::StuckAt { net: g, value: 0 },
                Candidate::Bridge { a: g, b: k, behaviors: vec![WiredBehavior::WiredAnd] },
            ])
        );
    }

    #[test]
    fn lone_green_one_zero_is_ambiguous() {
        let (map, graph) = one_gut_quad();
        let g = quad_id(Color::Green);
        let r = report(&map, &[Fault::sa1(g)]);
        let d = diagnose(&r, &map, &graph).unwrap();
        assert_eq!(d.failing.len(), 1);
        assert_eq!(
            d.failing[0].outcome,
            BumpOutcome::Candidates(vec![
                Candidate::StuckAt { net: g, value: 1 },
                Candidate::Bridge {
                    a: g,
                    b: quad_id(Color::Red),
                    behaviors: vec![WiredBehavior::WiredAnd]
                },
            ])
        );
    }

    #[test]
    fn soundness_on_universe() {
        let (map, graph) = one_gut_quad();
        for f in fault_universe() {
            for beh in WiredBehavior::BOTH {
                let inst = quad_fault_instance(f, beh);
                let d = diagnose(&report(&map, std::slice::from_ref(&inst)), &map, &graph).unwrap();
                assert!(d.fault_detected(), "{f}");
                assert!(d.explains(&inst), "{f} {beh:?} not in {:?}", d);
                assert!(!d.multi_fault_warning);
                for b in &d.failing {
                    assert_ne!(b.outcome, BumpOutcome::Unmodeled);
                }
            }
        }
    }

    #[test]
    fn non_physical_response_is_unmodeled() {
        let (map, graph) = one_gut_quad();
        let mut r = report(&map, &[]);
        let b = quad_id(Color::Blue);
        r[0].responses.insert(b, DetectorResponse::new(false, true));
        let d = diagnose(&r, &map, &graph).unwrap();
        assert_eq!(d.failing.len(), 1);
        assert_eq!(d.failing[0].outcome, BumpOutcome::Unmodeled);
    }

    #[test]
    fn scattered_failures_warn() {
        let (map, graph) = one_gut_quad();
        let mut r = report(&map, &[]);
        for c in [Color::Blue, Color::Red, Color::Black] {
            r[0].responses.insert(quad_id(c), DetectorResponse::new(false, false));
        }
        let d = diagnose(&r, &map, &graph).unwrap();
        assert_eq!(d.failing.len(), 3);
        assert!(d.multi_fault_warning);
    }

    #[test]
    fn bridge_bound_and_geometry() {
        let bridge = Fault::bridge(BumpId(0), BumpId(1), WiredBehavior::WiredAnd);
        let est = map_to_defect_range(&bridge, ComponentKind::CuPillar, None).unwrap();
        assert_eq!(est.class, FunctionalFaultClass::WiredAnd);
        assert_eq!(est.magnitude_bound.upper, Some(200.0));
        assert_eq!(est.critical_path_nm, Some(4.0));
        assert!(est.geometry_bound.is_none());

        let curve = SeverityCurve::new(CurveFamily::Exponential, vec![1000.0, -1.0], (0.0, 5.0)).unwrap();
        let est = map_to_defect_range(&bridge, ComponentKind::CuPillar, Some(&curve)).unwrap();
        let g = est.geometry_bound.unwrap();
        assert!((g.lower.unwrap() - 5f64.ln()).abs() < 1e-9);
        assert_eq!(g.upper, None);
        assert!(est.warnings.is_empty());
    }

    #[test]
    fn stuck_at_rows_and_provenance() {
        let sa0 = Fault::sa0(BumpId(0));
        let est = map_to_defect_range(&sa0, ComponentKind::RdlSegment, None).unwrap();
        assert_eq!(est.magnitude_bound.upper, Some(600.0));
        assert_eq!(est.critical_path_nm, Some(2.0));

        let open = sa0.clone().with_provenance(Provenance {
            scenario: ElectricalScenario::VddOpen,
            defect: None,
            magnitude: None,
        });
        let est = map_to_defect_range(&open, ComponentKind::CuPillar, None).unwrap();
        assert_eq!(est.class, FunctionalFaultClass::OutputSa0);
        assert_eq!(est.magnitude_bound.lower, Some(0.1e-15));
        assert_eq!(est.magnitude_bound.upper, Some(2e-6));

        let sa1 = Fault::sa1(BumpId(0));
        let est = map_to_defect_range(&sa1, ComponentKind::CuPillar, None).unwrap();
        assert_eq!(est.magnitude_bound.upper, Some(500.0));

        let wrong = Fault::sa1(BumpId(0)).with_provenance(Provenance {
            scenario: ElectricalScenario::VddOpen,
            defect: None,
            magnitude: None,
        });
        assert!(map_to_defect_range(&wrong, ComponentKind::CuPillar, None).is_err());
    }

    #[test]
    fn non_monotone_curve_warns() {
        let bridge = Fault::bridge(BumpId(0), BumpId(1), WiredBehavior::WiredAnd);
        let curve =
            SeverityCurve::new(CurveFamily::Polynomial { degree: 2 }, vec![0.0, 0.0, 500.0], (-1.0, 1.0)).unwrap();
        let est = map_to_defect_range(&bridge, ComponentKind::CuPillar, Some(&curve)).unwrap();
        assert!(est.geometry_bound.is_none());
        assert_eq!(est.warnings, vec![RangeWarning::NonMonotoneCurve]);

        let low = SeverityCurve::new(CurveFamily::Exponential, vec![10.0, -1.0], (0.0, 1.0)).unwrap();
        let est = map_to_defect_range(&bridge, ComponentKind::CuPillar, Some(&low)).unwrap();
        assert_eq!(est.warnings, vec![RangeWarning::BoundOutsideCurveRange]);
    }
}
