// SPDX-License-Identifier: Apache-2.0

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::bumpmap::Color;
use crate::{Error, Result};

/// Three bits applied over cycles T=0, 1, 2. Written `b0b1b2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Pattern3([bool; 3]);

impl Pattern3 {
    pub const ZERO: Pattern3 = Pattern3([false; 3]);

    pub const fn new(b0: bool, b1: bool, b2: bool) -> Self {
        Pattern3([b0, b1, b2])
    }

    pub fn from_bits(bits: [bool; 3]) -> Self {
        Pattern3(bits)
    }

    /// All eight words in ascending binary order.
    pub fn all() -> impl Iterator<Item = Pattern3> {
        (0u8..8).map(|v| Pattern3([v & 4 != 0, v & 2 != 0, v & 1 != 0]))
    }

    pub fn bit(self, cycle: usize) -> bool {
        self.0[cycle]
    }

    pub fn bits(self) -> [bool; 3] {
        self.0
    }

    pub fn complement(self) -> Self {
        Pattern3(self.0.map(|b| !b))
    }

    pub fn and(self, other: Self) -> Self {
        Pattern3([0, 1, 2].map(|i| self.0[i] && other.0[i]))
    }

    pub fn or(self, other: Self) -> Self {
        Pattern3([0, 1, 2].map(|i| self.0[i] || other.0[i]))
    }

    pub fn any(self) -> bool {
        self.0.iter().any(|&b| b)
    }
}

impl fmt::Display for Pattern3 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in self.0 {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl FromStr for Pattern3 {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bytes = s.as_bytes();
        if bytes.len() != 3 {
            return Err(Error::param(format!("pattern must be 3 bits, got {s:?}")));
        }
        let mut bits = [false; 3];
        for (slot, &c) in bits.iter_mut().zip(bytes) {
            *slot = match c {
                b'0' => false,
                b'1' => true,
                _ => return Err(Error::param(format!("pattern must be binary, got {s:?}"))),
            };
        }
        Ok(Pattern3(bits))
    }
}

impl Serialize for Pattern3 {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Pattern3 {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Drive word per color, indexed by [`Color::index`].
pub const CODEWORD_TABLE: [Pattern3; 4] = [
    Pattern3::new(false, true, true),  // green 011
    Pattern3::new(true, false, true),  // blue 101
    Pattern3::new(false, true, false), // red 010
    Pattern3::new(true, false, false), // black 100
];

pub fn pattern_for(color: Color) -> Pattern3 {
    CODEWORD_TABLE[color.index()]
}

/// Red and Black words are complements of Blue and Green, so their
/// detectors see the received word through an inverter.
pub fn inverter_at_detector(color: Color) -> bool {
    matches!(color, Color::Red | Color::Black)
}
