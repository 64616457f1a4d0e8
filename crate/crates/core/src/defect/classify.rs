// SPDX-License-Identifier: Apache-2.0

//! Defect-size thresholds for catastrophic (hard) functional faults.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Physical defect as it appears in the package.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PhysicalDefect {
    PillarCrack,
    ResistiveMisalignment,
    CapacitiveMisalignment,
    PillarBridge,
    RdlBridge,
    DamagedRdl,
}

/// The net a defect afflicts, or for bridges the net it shorts a signal to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NetClass {
    Power,
    Ground,
    Signal,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ElectricalScenario {
    VddOpen,
    VssOpen,
    SignalOpen,
    ShortToVdd,
    ShortToVss,
    SignalToSignalShort,
}

impl PhysicalDefect {
    /// Electrical scenario for a defect on `net`. Cracks and capacitive
    /// misalignment are treated as opens, bridges as shorts. Resistive
    /// misalignment and damaged RDL only add series resistance and have no
    /// hard-fault scenario.
    pub fn scenario(self, net: NetClass) -> Option<ElectricalScenario> {
        use ElectricalScenario::*;
        match self {
            PhysicalDefect::PillarCrack | PhysicalDefect::CapacitiveMisalignment => Some(match net {
                NetClass::Power => VddOpen,
                NetClass::Ground => VssOpen,
                NetClass::Signal => SignalOpen,
            }),
            PhysicalDefect::PillarBridge | PhysicalDefect::RdlBridge => Some(match net {
                NetClass::Power => ShortToVdd,
                NetClass::Ground => ShortToVss,
                NetClass::Signal => SignalToSignalShort,
            }),
            PhysicalDefect::ResistiveMisalignment | PhysicalDefect::DamagedRdl => None,
        }
    }
}

impl ElectricalScenario {
    pub fn is_open(self) -> bool {
        matches!(
            self,
            ElectricalScenario::VddOpen | ElectricalScenario::VssOpen | ElectricalScenario::SignalOpen
        )
    }
}

/// Size of a fault element: `R_f` in Ω or `C_f` in F.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum FaultMagnitude {
    #[serde(rename = "r_ohm")]
    Resistance(f64),
    #[serde(rename = "c_farad")]
    Capacitance(f64),
}

impl FaultMagnitude {
    pub fn value(self) -> f64 {
        match self {
            FaultMagnitude::Resistance(v) | FaultMagnitude::Capacitance(v) => v,
        }
    }

    pub fn quantity(self) -> Quantity {
        match self {
            FaultMagnitude::Resistance(_) => Quantity::Resistance,
            FaultMagnitude::Capacitance(_) => Quantity::Capacitance,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Quantity {
    Resistance,
    Capacitance,
}

impl Quantity {
    fn symbol(self) -> &'static str {
        match self {
            Quantity::Resistance => "R_short",
            Quantity::Capacitance => "C_open",
        }
    }

    fn unit(self) -> &'static str {
        match self {
            Quantity::Resistance => "ohm",
            Quantity::Capacitance => "F",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FunctionalFaultClass {
    OutputSa0,
    OutputSa1,
    SignalSa0,
    SignalSa1,
    WiredAnd,
    WiredOr,
    WiredAndOrWiredOr,
    NoHardFault,
}

impl fmt::Display for FunctionalFaultClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            FunctionalFaultClass::OutputSa0 => "OutputSA0",
            FunctionalFaultClass::OutputSa1 => "OutputSA1",
            FunctionalFaultClass::SignalSa0 => "SignalSA0",
            FunctionalFaultClass::SignalSa1 => "SignalSA1",
            FunctionalFaultClass::WiredAnd => "WiredAnd",
            FunctionalFaultClass::WiredOr => "WiredOr",
            FunctionalFaultClass::WiredAndOrWiredOr => "WiredAndOrWiredOr",
            FunctionalFaultClass::NoHardFault => "NoHardFault",
        };
        f.write_str(s)
    }
}

/// Open interval `lower < value < upper`; a missing side is unbounded.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MagnitudeBound {
    pub quantity: Quantity,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lower: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub upper: Option<f64>,
}

impl MagnitudeBound {
    /// Both inequalities are strict.
    pub fn contains(&self, value: f64) -> bool {
        self.lower.is_none_or(|lo| value > lo) && self.upper.is_none_or(|hi| value < hi)
    }
}

impl fmt::Display for MagnitudeBound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sym = self.quantity.symbol();
        let unit = self.quantity.unit();
        match (self.lower, self.upper) {
            (Some(lo), Some(hi)) => write!(f, "{lo:e} {unit} < {sym} < {hi:e} {unit}"),
            (Some(lo), None) => write!(f, "{sym} > {lo:e} {unit}"),
            (None, Some(hi)) => write!(f, "{sym} < {hi:e} {unit}"),
            (None, None) => write!(f, "{sym} unbounded"),
        }
    }
}

/// One row of the defect-size table.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThresholdRow {
    pub scenario: ElectricalScenario,
    pub bound: MagnitudeBound,
    pub class: FunctionalFaultClass,
    pub geometry_note: &'static str,
}

pub const THRESHOLD_TABLE: [ThresholdRow; 6] = [
    ThresholdRow {
        scenario: ElectricalScenario::VddOpen,
        bound: MagnitudeBound {
            quantity: Quantity::Capacitance,
            lower: Some(0.1e-15),
            upper: Some(2e-6),
        },
        class: FunctionalFaultClass::OutputSa0,
        geometry_note: "VDD open: floating supply read as logic 0 by receiving registers",
    },
    ThresholdRow {
        scenario: ElectricalScenario::VssOpen,
        bound: MagnitudeBound {
            quantity: Quantity::Capacitance,
            lower: Some(0.1e-15),
            upper: Some(2e-6),
        },
        class: FunctionalFaultClass::OutputSa1,
        geometry_note: "VSS open: ground pulled up to VDD through the receiving logic",
    },
    ThresholdRow {
        scenario: ElectricalScenario::SignalOpen,
        bound: MagnitudeBound {
            quantity: Quantity::Capacitance,
            lower: None,
            upper: Some(10e-15),
        },
        class: FunctionalFaultClass::WiredAndOrWiredOr,
        geometry_note: "coupling-dominated open beyond a critical misalignment gap of about 20 nm",
    },
    ThresholdRow {
        scenario: ElectricalScenario::ShortToVdd,
        bound: MagnitudeBound {
            quantity: Quantity::Resistance,
            lower: None,
            upper: Some(500.0),
        },
        class: FunctionalFaultClass::SignalSa1,
        geometry_note: "power/ground short: radial path of 3 nm between Cu pillars or 2 nm between RDL lines",
    },
    ThresholdRow {
        scenario: ElectricalScenario::ShortToVss,
        bound: MagnitudeBound {
            quantity: Quantity::Resistance,
            lower: None,
            upper: Some(600.0),
        },
        class: FunctionalFaultClass::SignalSa0,
        geometry_note: "power/ground short: radial path of 3 nm between Cu pillars or 2 nm between RDL lines",
    },
    ThresholdRow {
        scenario: ElectricalScenario::SignalToSignalShort,
        bound: MagnitudeBound {
            quantity: Quantity::Resistance,
            lower: None,
            upper: Some(200.0),
        },
        class: FunctionalFaultClass::WiredAnd,
        geometry_note: "signal-signal short: radial path of 4 nm between Cu pillars or 3 nm between RDL lines",
    },
];

pub fn threshold_row(scenario: ElectricalScenario) -> &'static ThresholdRow {
    THRESHOLD_TABLE
        .iter()
        .find(|r| r.scenario == scenario)
        .expect("every scenario has a row")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ClassificationFlag {
    /// Power/ground open below the lowest characterized capacitance.
    BelowCharacterizedRange,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Classification {
    pub class: FunctionalFaultClass,
    pub geometry_note: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub flag: Option<ClassificationFlag>,
}

/// Maps an electrical defect of a given size onto its functional fault.
/// Opens take `C_open`, shorts take `R_short`; values outside the row's
/// open interval (including the bound itself) are not hard faults.
pub fn classify_defect(scenario: ElectricalScenario, magnitude: FaultMagnitude) -> Result<Classification> {
    let row = threshold_row(scenario);
    if magnitude.quantity() != row.bound.quantity {
        return Err(Error::param(format!(
            "{scenario:?} needs a {:?} magnitude, got {magnitude:?}",
            row.bound.quantity
        )));
    }
    let v = magnitude.value();
    if !(v.is_finite() && v > 0.0) {
        return Err(Error::param(format!("fault magnitude must be positive, got {v}")));
    }
    if row.bound.contains(v) {
        return Ok(Classification {
            class: row.class,
            geometry_note: row.geometry_note,
            flag: None,
        });
    }
    let below = row.bound.lower.is_some_and(|lo| v <= lo);
    Ok(Classification {
        class: FunctionalFaultClass::NoHardFault,
        geometry_note: row.geometry_note,
        flag: below.then_some(ClassificationFlag::BelowCharacterizedRange),
    })
}
