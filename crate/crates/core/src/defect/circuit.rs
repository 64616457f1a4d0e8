// SPDX-License-Identifier: Apache-2.0

//! Lumped equivalent circuits and SPICE card emission.

use std::collections::HashSet;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::classify::PhysicalDefect;
use super::parasitics::{nominal_parasitics, ComponentKind};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ElementKind {
    R,
    C,
}

impl ElementKind {
    fn letter(self) -> char {
        match self {
            ElementKind::R => 'R',
            ElementKind::C => 'C',
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Element {
    pub kind: ElementKind,
    /// Suffix after the kind letter, e.g. `"1"` for `R1`.
    pub name: String,
    pub node_a: String,
    pub node_b: String,
    /// Ω or F.
    pub value: f64,
}

impl Element {
    pub fn designator(&self) -> String {
        format!("{}{}", self.kind.letter(), self.name)
    }
}

/// Ordered element list. Reserved nodes are `in`, `out` and `gnd`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EquivalentCircuit {
    elements: Vec<Element>,
}

impl EquivalentCircuit {
    pub fn new(elements: Vec<Element>) -> Result<Self> {
        let circuit = EquivalentCircuit { elements };
        circuit.validate()?;
        Ok(circuit)
    }

    pub fn elements(&self) -> &[Element] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn validate(&self) -> Result<()> {
        if self.elements.is_empty() {
            return Err(Error::param("circuit has no elements"));
        }
        let mut names = HashSet::new();
        for e in &self.elements {
            if !(e.value.is_finite() && e.value > 0.0) {
                return Err(Error::param(format!(
                    "element {} has non-positive value {}",
                    e.designator(),
                    e.value
                )));
            }
            if !names.insert(e.designator()) {
                return Err(Error::param(format!("duplicate element {}", e.designator())));
            }
            for node in [&e.node_a, &e.node_b] {
                if node.is_empty() || node.contains(char::is_whitespace) {
                    return Err(Error::param(format!("bad node label {node:?}")));
                }
            }
        }
        for reserved in ["in", "out"] {
            if !self
                .elements
                .iter()
                .any(|e| e.node_a == reserved || e.node_b == reserved)
            {
                return Err(Error::param(format!("no element touches node {reserved:?}")));
            }
        }
        Ok(())
    }
}

/// Appends elements with per-kind sequential names.
#[derive(Default)]
struct CircuitBuilder {
    elements: Vec<Element>,
    next_r: usize,
    next_c: usize,
}

impl CircuitBuilder {
    fn add(&mut self, kind: ElementKind, a: &str, b: &str, value: f64) -> &mut Self {
        let counter = match kind {
            ElementKind::R => &mut self.next_r,
            ElementKind::C => &mut self.next_c,
        };
        *counter += 1;
        self.elements.push(Element {
            kind,
            name: counter.to_string(),
            node_a: a.to_string(),
            node_b: b.to_string(),
            value,
        });
        self
    }

    fn r(&mut self, a: &str, b: &str, value: f64) -> &mut Self {
        self.add(ElementKind::R, a, b, value)
    }

    fn c(&mut self, a: &str, b: &str, value: f64) -> &mut Self {
        self.add(ElementKind::C, a, b, value)
    }

    fn finish(self) -> Result<EquivalentCircuit> {
        EquivalentCircuit::new(self.elements)
    }
}

/// Fault element values for [`build_faulty_circuit`], in Ω and F.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DefectMagnitudes {
    #[serde(default)]
    pub r_f: Option<f64>,
    #[serde(default)]
    pub c_f: Option<f64>,
    /// Extrinsic contact resistance folded into `R_f` for resistive
    /// misalignment.
    #[serde(default)]
    pub contact_ohm: Option<f64>,
}

fn required(v: Option<f64>, what: &str, defect: PhysicalDefect) -> Result<f64> {
    match v {
        Some(x) if x.is_finite() && x > 0.0 => Ok(x),
        Some(x) => Err(Error::param(format!("{what} must be positive for {defect:?}, got {x}"))),
        None => Err(Error::param(format!("{defect:?} requires {what}"))),
    }
}

/// Nominal lumped model plus the fault elements of `defect`.
///
/// The nominal model is a series R from `in` to `out` with `C_self` from
/// `out` to `gnd`. Internal nodes are numbered `m1`, `m2`, ... along the
/// path. Topologies:
///
/// * crack: `R/2 -> (R_f ∥ C_f) -> R/2`
/// * full break (crack with `C_f` only): `R/2 -> C_f`
/// * resistive misalignment, damaged RDL: `R -> R_f`
/// * capacitive misalignment: `R -> C_f`
/// * bridge: a second line `m1 → m2` with its own nominal R and `C_self`,
///   `R_f` between the two outputs and `C_mutual` beside it when non-zero
pub fn build_faulty_circuit(
    kind: ComponentKind,
    defect: Option<PhysicalDefect>,
    magnitudes: DefectMagnitudes,
    length_um: Option<f64>,
) -> Result<EquivalentCircuit> {
    let nominal = nominal_parasitics(kind, length_um)?;
    let (r, cs, cm) = (
        nominal.resistance,
        nominal.self_capacitance,
        nominal.mutual_capacitance,
    );
    let mut b = CircuitBuilder::default();

    let Some(defect) = defect else {
        b.r("in", "out", r).c("out", "gnd", cs);
        return b.finish();
    };

    let compatible = match defect {
        PhysicalDefect::PillarCrack
        | PhysicalDefect::ResistiveMisalignment
        | PhysicalDefect::CapacitiveMisalignment
        | PhysicalDefect::PillarBridge => kind == ComponentKind::CuPillar,
        PhysicalDefect::RdlBridge | PhysicalDefect::DamagedRdl => kind == ComponentKind::RdlSegment,
    };
    if !compatible {
        return Err(Error::param(format!("{defect:?} does not apply to {kind:?}")));
    }
    if magnitudes.contact_ohm.is_some() && defect != PhysicalDefect::ResistiveMisalignment {
        return Err(Error::param("contact resistance applies only to resistive misalignment"));
    }

    match defect {
        PhysicalDefect::PillarCrack => {
            let c_f = required(magnitudes.c_f, "C_f", defect)?;
            match magnitudes.r_f {
                Some(_) => {
                    let r_f = required(magnitudes.r_f, "R_f", defect)?;
                    b.r("in", "m1", r / 2.0)
                        .r("m1", "m2", r_f)
                        .c("m1", "m2", c_f)
                        .r("m2", "out", r / 2.0);
                }
                None => {
                    b.r("in", "m1", r / 2.0).c("m1", "out", c_f);
                }
            }
            b.c("out", "gnd", cs);
        }
        PhysicalDefect::ResistiveMisalignment => {
            let contact = match magnitudes.contact_ohm {
                Some(c) if c.is_finite() && c >= 0.0 => c,
                Some(c) => return Err(Error::param(format!("contact resistance must be >= 0, got {c}"))),
                None => 0.0,
            };
            let r_f = required(magnitudes.r_f, "R_f", defect)? + contact;
            b.r("in", "m1", r).r("m1", "out", r_f).c("out", "gnd", cs);
        }
        PhysicalDefect::DamagedRdl => {
            let r_f = required(magnitudes.r_f, "R_f", defect)?;
            b.r("in", "m1", r).r("m1", "out", r_f).c("out", "gnd", cs);
        }
        PhysicalDefect::CapacitiveMisalignment => {
            let c_f = required(magnitudes.c_f, "C_f", defect)?;
            b.r("in", "m1", r).c("m1", "out", c_f).c("out", "gnd", cs);
        }
        PhysicalDefect::PillarBridge | PhysicalDefect::RdlBridge => {
            let r_f = required(magnitudes.r_f, "R_f", defect)?;
            b.r("in", "out", r)
                .c("out", "gnd", cs)
                .r("m1", "m2", r)
                .c("m2", "gnd", cs)
                .r("out", "m2", r_f);
            if cm > 0.0 {
                b.c("out", "m2", cm);
            }
        }
    }
    b.finish()
}

/// SPICE card deck: `* <title>`, one card per element with the value in
/// `{:.6e}` SI notation, then `.END`. Lines are LF-separated with no
/// trailing newline.
pub fn emit_netlist(circuit: &EquivalentCircuit, title: &str) -> Result<String> {
    circuit.validate()?;
    if title.contains(['\n', '\r']) {
        return Err(Error::param("netlist title must be a single line"));
    }
    let mut out = format!("* {title}\n");
    for e in circuit.elements() {
        writeln!(
            out,
            "{} {} {} {:.6e}",
            e.designator(),
            e.node_a,
            e.node_b,
            e.value
        )
        .expect("writing to a String");
    }
    out.push_str(".END");
    Ok(out)
}
