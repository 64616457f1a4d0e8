// SPDX-License-Identifier: Apache-2.0

use serde::{Deserialize, Serialize};

use super::{FEMTO, MILLI};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ComponentKind {
    /// Ø20 µm × 20 µm copper pillar.
    CuPillar,
    /// L µm × 2 µm × 2 µm redistribution line.
    RdlSegment,
}

/// Lumped parasitics in SI base units (Ω, F).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NominalParasitics {
    pub resistance: f64,
    pub self_capacitance: f64,
    pub mutual_capacitance: f64,
}

const PILLAR_R: f64 = 1.11 * MILLI;
const PILLAR_C_SELF: f64 = 3.21 * FEMTO;
const RDL_R_PER_UM: f64 = 4.31 * MILLI;
const RDL_C_SELF_BASE: f64 = 0.7e-15;
const RDL_C_SELF_SLOPE: f64 = 0.72;
const RDL_C_MUTUAL_PER_UM: f64 = 0.092 * FEMTO;

/// Extracted nominal R and C of one interconnect component. `length_um` is
/// required for RDL segments and ignored for pillars.
pub fn nominal_parasitics(kind: ComponentKind, length_um: Option<f64>) -> Result<NominalParasitics> {
    match kind {
        ComponentKind::CuPillar => Ok(NominalParasitics {
            resistance: PILLAR_R,
            self_capacitance: PILLAR_C_SELF,
            mutual_capacitance: 0.0,
        }),
        ComponentKind::RdlSegment => {
            let l = length_um.ok_or_else(|| Error::param("RDL segment requires a length"))?;
            if !(l.is_finite() && l > 0.0) {
                return Err(Error::param(format!("RDL length must be positive, got {l}")));
            }
            Ok(NominalParasitics {
                resistance: RDL_R_PER_UM * l,
                self_capacitance: RDL_C_SELF_BASE * (1.0 + (l / 5.0 - 1.0) * RDL_C_SELF_SLOPE),
                mutual_capacitance: RDL_C_MUTUAL_PER_UM * l,
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    #[test]
    fn pillar_values() {
        let p = nominal_parasitics(ComponentKind::CuPillar, None).unwrap();
        assert!(rel(p.resistance, 1.11e-3) < 1e-12);
        assert!(rel(p.self_capacitance, 3.21e-15) < 1e-12);
        assert_eq!(p.mutual_capacitance, 0.0);
        // length is ignored for pillars
        assert_eq!(nominal_parasitics(ComponentKind::CuPillar, Some(-3.0)).unwrap(), p);
    }

    #[test]
    fn rdl_values() {
        let p = nominal_parasitics(ComponentKind::RdlSegment, Some(5.0)).unwrap();
        assert_eq!(p.self_capacitance, 0.7e-15);
        let p = nominal_parasitics(ComponentKind::RdlSegment, Some(100.0)).unwrap();
        assert!(rel(p.resistance, 0.431) < 1e-12);
        assert!(rel(p.self_capacitance, 10.276e-15) < 1e-12);
        assert!(rel(p.mutual_capacitance, 9.2e-15) < 1e-12);
    }

    #[test]
    fn rdl_length_errors() {
        assert!(nominal_parasitics(ComponentKind::RdlSegment, None).is_err());
        assert!(nominal_parasitics(ComponentKind::RdlSegment, Some(0.0)).is_err());
        assert!(nominal_parasitics(ComponentKind::RdlSegment, Some(-1.0)).is_err());
    }

    #[test]
    fn affine_in_length() {
        let at = |l| nominal_parasitics(ComponentKind::RdlSegment, Some(l)).unwrap();
        let (a, b, c) = (at(10.0), at(20.0), at(30.0));
        assert!(((c.resistance - b.resistance) - (b.resistance - a.resistance)).abs() < 1e-15);
        assert!(
            ((c.mutual_capacitance - b.mutual_capacitance)
                - (b.mutual_capacitance - a.mutual_capacitance))
                .abs()
                < 1e-27
        );
    }
}
