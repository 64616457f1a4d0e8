// SPDX-License-Identifier: Apache-2.0

use serde::{Deserialize, Serialize};

use crate::bumpmap::BumpMap;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FsmState {
    Idle,
    BlockTest { block: usize, cycle: u8 },
    Done,
}

/// One clock of the BIST controller with its control outputs.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScheduleStep {
    pub state: FsmState,
    pub bist_en: bool,
    pub test_en: bool,
    pub block_en: Vec<bool>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TestSchedule {
    pub steps: Vec<ScheduleStep>,
}

impl TestSchedule {
    pub fn total_cycles(&self) -> usize {
        self.steps.len()
    }

    /// Blocks in the order the controller enables them.
    pub fn block_order(&self) -> Vec<usize> {
        let mut order: Vec<usize> = Vec::new();
        for s in &self.steps {
            if let FsmState::BlockTest { block, .. } = s.state {
                if order.last() != Some(&block) {
                    order.push(block);
                }
            }
        }
        order
    }
}

/// Controller sequence: one Idle cycle, three cycles per block in ascending
/// order with exactly that block's enable high, then one Done cycle.
pub fn fsm_schedule(block_count: usize) -> Result<TestSchedule> {
    if block_count == 0 {
        return Err(Error::param("block count must be at least 1"));
    }
    let mut steps = Vec::with_capacity(3 * block_count + 2);
    steps.push(ScheduleStep {
        state: FsmState::Idle,
        bist_en: true,
        test_en: false,
        block_en: vec![false; block_count],
    });
    for block in 0..block_count {
        let mut block_en = vec![false; block_count];
        block_en[block] = true;
        for cycle in 0..3 {
            steps.push(ScheduleStep {
                state: FsmState::BlockTest { block, cycle },
                bist_en: true,
                test_en: true,
                block_en: block_en.clone(),
            });
        }
    }
    steps.push(ScheduleStep {
        state: FsmState::Done,
        bist_en: true,
        test_en: false,
        block_en: vec![false; block_count],
    });
    Ok(TestSchedule { steps })
}

/// Abstract test-logic budget of a blocked map.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct OverheadReport {
    pub detector_count: usize,
    pub tpg_count: usize,
    pub mux_count: usize,
    pub test_cycles: usize,
}

/// Detectors are shared across blocks through a response MUX, so the count
/// is set by the largest block; each block has its own pattern generator.
pub fn overhead_report(map: &BumpMap) -> Result<OverheadReport> {
    let blocks = map.blocks()?;
    let mut sizes = vec![0usize; map.block_count()];
    for &b in blocks {
        sizes[b] += 1;
    }
    let detector_count = sizes.into_iter().max().unwrap_or(0);
    Ok(OverheadReport {
        detector_count,
        tpg_count: map.block_count(),
        mux_count: detector_count,
        test_cycles: fsm_schedule(map.block_count())?.total_cycles(),
    })
}
