// SPDX-License-Identifier: Apache-2.0

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::bumpmap::{BumpId, BumpMap};
use crate::defect::{ElectricalScenario, FaultMagnitude, PhysicalDefect};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WiredBehavior {
    WiredAnd,
    WiredOr,
}

impl WiredBehavior {
    pub const BOTH: [WiredBehavior; 2] = [WiredBehavior::WiredAnd, WiredBehavior::WiredOr];

    pub fn short_name(self) -> &'static str {
        match self {
            WiredBehavior::WiredAnd => "w-A",
            WiredBehavior::WiredOr => "w-O",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum FaultKind {
    Sa0(BumpId),
    Sa1(BumpId),
    Bridge {
        a: BumpId,
        b: BumpId,
        behavior: WiredBehavior,
    },
}

/// Where an injected fault came from physically. Optional, and only used to
/// pick the defect-size row when mapping a diagnosis back to geometry.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Provenance {
    pub scenario: ElectricalScenario,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub defect: Option<PhysicalDefect>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub magnitude: Option<FaultMagnitude>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "FaultRepr", into = "FaultRepr")]
pub struct Fault {
    pub kind: FaultKind,
    pub provenance: Option<Provenance>,
}

impl Fault {
    pub fn sa0(net: BumpId) -> Self {
        FaultKind::Sa0(net).into()
    }

    pub fn sa1(net: BumpId) -> Self {
        FaultKind::Sa1(net).into()
    }

    /// Bridge with endpoints normalized to ascending order.
    pub fn bridge(a: BumpId, b: BumpId, behavior: WiredBehavior) -> Self {
        FaultKind::Bridge {
            a: a.min(b),
            b: a.max(b),
            behavior,
        }
        .into()
    }

    pub fn with_provenance(mut self, provenance: Provenance) -> Self {
        self.provenance = Some(provenance);
        self
    }

    pub fn is_stuck_at(&self) -> bool {
        matches!(self.kind, FaultKind::Sa0(_) | FaultKind::Sa1(_))
    }

    /// Nets touched by the fault.
    pub fn nets(&self) -> Vec<BumpId> {
        match self.kind {
            FaultKind::Sa0(n) | FaultKind::Sa1(n) => vec![n],
            FaultKind::Bridge { a, b, .. } => vec![a, b],
        }
    }

    pub fn validate(&self, map: &BumpMap) -> Result<()> {
        for n in self.nets() {
            if !map.contains(n) {
                return Err(Error::param(format!(
                    "fault {self} references bump {n} outside a {}-bump map",
                    map.len()
                )));
            }
        }
        if let FaultKind::Bridge { a, b, .. } = self.kind {
            if a == b {
                return Err(Error::param(format!("bridge endpoints must differ, got {a}")));
            }
        }
        Ok(())
    }
}

impl From<FaultKind> for Fault {
    fn from(kind: FaultKind) -> Self {
        Fault {
            kind,
            provenance: None,
        }
    }
}

impl fmt::Display for Fault {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            FaultKind::Sa0(n) => write!(f, "SA0({n})"),
            FaultKind::Sa1(n) => write!(f, "SA1({n})"),
            FaultKind::Bridge { a, b, behavior } => {
                write!(f, "Bridge({a}, {b}, {})", behavior.short_name())
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
enum FaultTag {
    Sa0,
    Sa1,
    Bridge,
}

/// Flat JSON form: `{"kind": "sa0", "net": 3}` or
/// `{"kind": "bridge", "a": 1, "b": 2, "behavior": "wired_and"}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct FaultRepr {
    kind: FaultTag,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    net: Option<BumpId>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    a: Option<BumpId>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    b: Option<BumpId>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    behavior: Option<WiredBehavior>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    provenance: Option<Provenance>,
}

impl TryFrom<FaultRepr> for Fault {
    type Error = String;

    fn try_from(r: FaultRepr) -> std::result::Result<Self, String> {
        let kind = match r.kind {
            FaultTag::Sa0 | FaultTag::Sa1 => {
                if r.a.is_some() || r.b.is_some() || r.behavior.is_some() {
                    return Err("stuck-at faults take only `net`".into());
                }
                let net = r.net.ok_or("stuck-at fault requires `net`")?;
                if r.kind == FaultTag::Sa0 {
                    FaultKind::Sa0(net)
                } else {
                    FaultKind::Sa1(net)
                }
            }
            FaultTag::Bridge => {
                if r.net.is_some() {
                    return Err("bridge faults take `a`, `b` and `behavior`, not `net`".into());
                }
                match (r.a, r.b, r.behavior) {
                    (Some(a), Some(b), Some(behavior)) => {
                        return Ok(Fault {
                            provenance: r.provenance,
                            ..Fault::bridge(a, b, behavior)
                        })
                    }
                    _ => return Err("bridge fault requires `a`, `b` and `behavior`".into()),
                }
            }
        };
        Ok(Fault {
            kind,
            provenance: r.provenance,
        })
    }
}

impl From<Fault> for FaultRepr {
    fn from(f: Fault) -> Self {
        let mut r = FaultRepr {
            kind: FaultTag::Sa0,
            net: None,
            a: None,
            b: None,
            behavior: None,
            provenance: f.provenance,
        };
        match f.kind {
            FaultKind::Sa0(n) => r.net = Some(n),
            FaultKind::Sa1(n) => {
                r.kind = FaultTag::Sa1;
                r.net = Some(n);
            }
            FaultKind::Bridge { a, b, behavior } => {
                r.kind = FaultTag::Bridge;
                r.a = Some(a);
                r.b = Some(b);
                r.behavior = Some(behavior);
            }
        }
        r
    }
}
