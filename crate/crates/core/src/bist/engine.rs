// SPDX-License-Identifier: Apache-2.0

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use super::codeword::{pattern_for, Pattern3};
use super::detector::{bump_response, DetectorResponse};
use super::fault::{Fault, FaultKind, WiredBehavior};
use crate::bumpmap::{BumpId, BumpMap};
use crate::{Error, Result};

/// Responses of every bump in one block after its three test cycles.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlockTestReport {
    pub block: usize,
    pub responses: BTreeMap<BumpId, DetectorResponse>,
    /// Word seen at each bump before any detector-side inversion.
    pub received: BTreeMap<BumpId, Pattern3>,
}

impl BlockTestReport {
    pub fn failing(&self) -> impl Iterator<Item = (BumpId, DetectorResponse)> + '_ {
        self.responses
            .iter()
            .filter(|(_, r)| **r != DetectorResponse::PASS)
            .map(|(&id, &r)| (id, r))
    }

    pub fn all_pass(&self) -> bool {
        self.failing().next().is_none()
    }
}

/// Fault list compiled once per run: stuck values per net and the bridge
/// components with their resolved behavior.
struct FaultPlan {
    stuck: HashMap<BumpId, bool>,
    components: Vec<(Vec<BumpId>, WiredBehavior)>,
}

fn find(parent: &mut HashMap<BumpId, BumpId>, x: BumpId) -> BumpId {
    let p = *parent.entry(x).or_insert(x);
    if p == x {
        return x;
    }
    let root = find(parent, p);
    parent.insert(x, root);
    root
}

impl FaultPlan {
    fn compile(map: &BumpMap, faults: &[Fault]) -> Result<Self> {
        let mut stuck = HashMap::new();
        let mut parent: HashMap<BumpId, BumpId> = HashMap::new();
        let mut bridges = Vec::new();
        for f in faults {
            f.validate(map)?;
            match f.kind {
                FaultKind::Sa0(n) | FaultKind::Sa1(n) => {
                    let v = matches!(f.kind, FaultKind::Sa1(_));
                    if let Some(&prev) = stuck.get(&n) {
                        if prev != v {
                            return Err(Error::Simulation(format!(
                                "net {n} is stuck at both 0 and 1"
                            )));
                        }
                    }
                    stuck.insert(n, v);
                }
                FaultKind::Bridge { a, b, behavior } => {
                    let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
                    if ra != rb {
                        parent.insert(ra.max(rb), ra.min(rb));
                    }
                    bridges.push((a, behavior));
                }
            }
        }

        let mut members: BTreeMap<BumpId, Vec<BumpId>> = BTreeMap::new();
        let nodes: Vec<BumpId> = parent.keys().copied().collect();
        for n in nodes {
            let root = find(&mut parent, n);
            members.entry(root).or_default().push(n);
        }
        let mut behavior: BTreeMap<BumpId, WiredBehavior> = BTreeMap::new();
        for (a, beh) in bridges {
            let root = find(&mut parent, a);
            match behavior.insert(root, beh) {
                Some(prev) if prev != beh => {
                    return Err(Error::Simulation(format!(
                        "bridge component containing net {root} mixes wired-AND and wired-OR"
                    )));
                }
                _ => {}
            }
        }
        let components = members
            .into_iter()
            .map(|(root, mut nets)| {
                nets.sort_unstable();
                (nets, behavior[&root])
            })
            .collect();
        Ok(FaultPlan { stuck, components })
    }

    fn resolve(&self, map: &BumpMap, active_block: usize, cycle: usize) -> Result<Vec<bool>> {
        let colors = map.colors()?;
        let blocks = map.blocks()?;
        // drive: active block sends its codeword bit, everyone else 0
        let mut values: Vec<bool> = colors
            .iter()
            .zip(blocks)
            .map(|(&c, &b)| b == active_block && pattern_for(c).bit(cycle))
            .collect();
        for (&n, &v) in &self.stuck {
            values[n.0] = v;
        }
        for (nets, behavior) in &self.components {
            let wired = match behavior {
                WiredBehavior::WiredAnd => nets.iter().all(|n| values[n.0]),
                WiredBehavior::WiredOr => nets.iter().any(|n| values[n.0]),
            };
            for n in nets {
                values[n.0] = wired;
            }
        }
        // a stuck net reads its stuck value even when bridged
        for (&n, &v) in &self.stuck {
            values[n.0] = v;
        }
        Ok(values)
    }
}

/// Logic value on every net during `cycle` of `active_block`'s test.
///
/// Resolution runs in four stages: drive, stuck-at override, wired
/// resolution over each connected bridge component, stuck-at reassert.
pub fn resolve_net_values(
    map: &BumpMap,
    active_block: usize,
    faults: &[Fault],
    cycle: usize,
) -> Result<Vec<bool>> {
    if cycle > 2 {
        return Err(Error::param(format!("cycle must be 0..=2, got {cycle}")));
    }
    if active_block >= map.block_count() {
        return Err(Error::param(format!(
            "block {active_block} out of range for {} blocks",
            map.block_count()
        )));
    }
    FaultPlan::compile(map, faults)?.resolve(map, active_block, cycle)
}

/// Runs the three-cycle test on every block in schedule order.
pub fn run_block_test(map: &BumpMap, faults: &[Fault]) -> Result<Vec<BlockTestReport>> {
    let colors = map.colors()?;
    map.blocks()?;
    let plan = FaultPlan::compile(map, faults)?;
    let mut reports = Vec::with_capacity(map.block_count());
    for block in 0..map.block_count() {
        let cycles = [
            plan.resolve(map, block, 0)?,
            plan.resolve(map, block, 1)?,
            plan.resolve(map, block, 2)?,
        ];
        let mut responses = BTreeMap::new();
        let mut received = BTreeMap::new();
        for id in map.block_members(block) {
            let word = Pattern3::from_bits([cycles[0][id.0], cycles[1][id.0], cycles[2][id.0]]);
            received.insert(id, word);
            responses.insert(id, bump_response(word, colors[id.0]));
        }
        reports.push(BlockTestReport {
            block,
            responses,
            received,
        });
    }
    Ok(reports)
}
