// SPDX-License-Identifier: Apache-2.0

use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::codeword::{inverter_at_detector, Pattern3};
use crate::bumpmap::Color;

/// Cycle-by-cycle model of the receiving-side detector.
///
/// * T=0: `f0 = !b0`
/// * T=1: `f1 = xnor(f0, b1)`
/// * T=2: `f_out = xnor(f1, b2) & (b0 | b1 | b2)`
///
/// The OR term is the loopback path that pulls the output low on an all-zero
/// word. The same OR is exposed as the `x` observation terminal.
#[derive(Debug, Clone, Default)]
pub struct SequentialDetector {
    cycle: u8,
    stage: bool,
    loopback: bool,
}

impl SequentialDetector {
    pub fn new() -> Self {
        Self::default()
    }

    /// Clocks one received bit in. Returns `Some(f_out)` on the third cycle,
    /// after which the detector resets.
    pub fn clock(&mut self, bit: bool) -> Option<bool> {
        self.loopback |= bit;
        match self.cycle {
            0 => {
                self.stage = !bit;
                self.cycle = 1;
                None
            }
            1 => {
                self.stage = self.stage == bit;
                self.cycle = 2;
                None
            }
            _ => {
                let out = (self.stage == bit) && self.loopback;
                *self = Self::default();
                Some(out)
            }
        }
    }

    /// Current value of the loopback OR.
    pub fn loopback(&self) -> bool {
        self.loopback
    }

    /// Runs a whole word through a fresh detector. Returns `(x, y)`.
    pub fn evaluate(word: Pattern3) -> (bool, bool) {
        let mut det = SequentialDetector::new();
        let mut x = false;
        let mut y = false;
        for t in 0..3 {
            if t == 2 {
                // loopback latches the last bit on the same edge as f_out
                x = det.loopback() || word.bit(t);
            }
            if let Some(out) = det.clock(word.bit(t)) {
                y = out;
            }
        }
        (x, y)
    }
}

/// Accept-set form of the detector: `1` iff the word is `011`, `101` or `110`.
pub fn detector_accepts(word: Pattern3) -> bool {
    SequentialDetector::evaluate(word).1
}

/// `(x, y)` observed at one bump. `y = 1` is a pass.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DetectorResponse {
    pub x: bool,
    pub y: bool,
}

impl DetectorResponse {
    pub const PASS: DetectorResponse = DetectorResponse { x: true, y: true };

    pub const fn new(x: bool, y: bool) -> Self {
        DetectorResponse { x, y }
    }

    pub fn passed(self) -> bool {
        self.y
    }
}

impl fmt::Display for DetectorResponse {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", u8::from(self.x), u8::from(self.y))
    }
}

impl Serialize for DetectorResponse {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        [u8::from(self.x), u8::from(self.y)].serialize(s)
    }
}

impl<'de> Deserialize<'de> for DetectorResponse {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let [x, y] = <[u8; 2]>::deserialize(d)?;
        if x > 1 || y > 1 {
            return Err(serde::de::Error::custom("response bits must be 0 or 1"));
        }
        Ok(DetectorResponse::new(x == 1, y == 1))
    }
}

/// Detector response for a bump of `color` receiving `received`.
pub fn bump_response(received: Pattern3, color: Color) -> DetectorResponse {
    let seen = if inverter_at_detector(color) {
        received.complement()
    } else {
        received
    };
    let (x, y) = SequentialDetector::evaluate(seen);
    DetectorResponse { x, y }
}
