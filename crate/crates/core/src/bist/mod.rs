// SPDX-License-Identifier: Apache-2.0

//! Three-cycle codeword BIST for bump interconnects.
//!
//! Each color drives a fixed 3-bit word over cycles T=0..2. On the receiving
//! side a small sequential detector accepts exactly the words `011`, `101`
//! and `110`; Red and Black bumps pass through an inverter first so their
//! complemented words land in the same accept set. Blocks are tested one at
//! a time while every inactive bump is driven to 0.

mod codeword;
mod detector;
mod engine;
mod fault;
mod schedule;

pub use codeword::{inverter_at_detector, pattern_for, Pattern3, CODEWORD_TABLE};
pub use detector::{bump_response, detector_accepts, DetectorResponse, SequentialDetector};
pub use engine::{resolve_net_values, run_block_test, BlockTestReport};
pub use fault::{Fault, FaultKind, Provenance, WiredBehavior};
pub use schedule::{fsm_schedule, overhead_report, FsmState, OverheadReport, ScheduleStep, TestSchedule};
