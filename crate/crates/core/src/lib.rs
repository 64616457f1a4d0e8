// SPDX-License-Identifier: Apache-2.0

//! Fault simulation and built-in self-test (BIST) verification for chiplet
//! interconnects in fan-out wafer-level packages.
//!
//! The crate is organized bottom-up:
//!
//! * [`bumpmap`] builds the I/O bump lattice, its potential-short graph, the
//!   four-codeword coloring and the block partition.
//! * [`defect`] holds the nominal parasitics of Cu pillars and RDL segments,
//!   the defect-size-to-functional-fault classifier, equivalent faulty
//!   circuits with SPICE deck emission, and severity-curve fitting.
//! * [`bist`] is the 3-cycle codeword test: pattern table, sequential
//!   detector, wired-fault resolution and block sequencing.
//! * [`diagnosis`] builds the 14-fault dictionary, computes diagnosability
//!   and localizes failing bumps to candidate faults.
//! * [`campaign`] and [`cli`] wrap everything into seeded, reproducible
//!   fault campaigns with canonical JSON reports.

pub mod bist;
pub mod bumpmap;
pub mod campaign;
pub mod cli;
pub mod defect;
pub mod diagnosis;
mod error;

pub use error::{Error, Result};
