// SPDX-License-Identifier: Apache-2.0

//! Physical defect models for Cu pillars and RDL segments.

mod circuit;
mod classify;
mod curve;
mod parasitics;

pub use circuit::{
    build_faulty_circuit, emit_netlist, DefectMagnitudes, Element, ElementKind, EquivalentCircuit,
};
pub use classify::{
    classify_defect, threshold_row, Classification, ClassificationFlag, ElectricalScenario,
    FaultMagnitude, FunctionalFaultClass, MagnitudeBound, NetClass, PhysicalDefect, Quantity,
    ThresholdRow, THRESHOLD_TABLE,
};
pub use curve::{fit_severity_curve, read_samples_csv, CurveFamily, SeverityCurve};
pub use parasitics::{nominal_parasitics, ComponentKind, NominalParasitics};

pub(crate) const FEMTO: f64 = 1e-15;
pub(crate) const MILLI: f64 = 1e-3;
