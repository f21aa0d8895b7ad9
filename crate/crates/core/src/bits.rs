//! Classical bit strings `x = x_1 x_2 ... x_n`.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// A classical bit string. Index 0 holds `x_1`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BitString(Vec<bool>);

impl BitString {
    pub fn new(bits: Vec<bool>) -> Self {
        BitString(bits)
    }

    pub fn zeros(n: usize) -> Self {
        BitString(vec![false; n])
    }

    /// The `n`-bit string whose binary value (with `x_1` most significant) is `value`.
    pub fn from_index(value: u64, n: usize) -> Self {
        assert!(
            n <= 64,
            "bit strings built from an index are limited to 64 bits"
        );
        BitString((0..n).map(|i| (value >> (n - 1 - i)) & 1 == 1).collect())
    }

    /// Binary value with `x_1` as the most significant bit.
    pub fn to_index(&self) -> u64 {
        assert!(self.0.len() <= 64);
        self.0.iter().fold(0u64, |acc, &b| (acc << 1) | b as u64)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn bits(&self) -> &[bool] {
        &self.0
    }

    /// Hex form: the string is left-padded with zeros to a multiple of four
    /// bits and each nibble becomes one lowercase hex digit.
    pub fn to_hex(&self) -> String {
        let pad = (4 - self.0.len() % 4) % 4;
        let padded: Vec<bool> = std::iter::repeat_n(false, pad)
            .chain(self.0.iter().copied())
            .collect();
        padded
            .chunks(4)
            .map(|c| {
                let v = c.iter().fold(0u32, |a, &b| (a << 1) | b as u32);
                char::from_digit(v, 16).unwrap()
            })
            .collect()
    }

    /// Inverse of [`BitString::to_hex`] for a known length `n`.
    pub fn from_hex(hex: &str, n: usize) -> Result<Self> {
        let expected_digits = n.div_ceil(4);
        if hex.len() != expected_digits {
            return Err(Error::InvalidArgument(format!(
                "hex string {hex:?} has {} digits, expected {expected_digits} for {n} bits",
                hex.len()
            )));
        }
        let mut bits = Vec::with_capacity(expected_digits * 4);
        for c in hex.chars() {
            let v = c
                .to_digit(16)
                .ok_or_else(|| Error::InvalidArgument(format!("bad hex digit {c:?}")))?;
            bits.extend((0..4).rev().map(|s| (v >> s) & 1 == 1));
        }
        let pad = bits.len() - n;
        if bits[..pad].iter().any(|&b| b) {
            return Err(Error::InvalidArgument(format!(
                "hex string {hex:?} does not fit in {n} bits"
            )));
        }
        Ok(BitString(bits[pad..].to_vec()))
    }
}

impl FromStr for BitString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        s.chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(Error::InvalidArgument(format!("bad bit {other:?}"))),
            })
            .collect::<Result<Vec<_>>>()
            .map(BitString)
    }
}

impl fmt::Display for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.0 {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}
