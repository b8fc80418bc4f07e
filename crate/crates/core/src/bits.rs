//! Bit strings for classical messages and problem inputs.

use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::{Error, Result};

/// A fixed-length string of bits. Bit 0 is the leftmost bit.
#[derive(Clone, Default, PartialEq, Eq, Hash)]
pub struct BitString {
    bits: Vec<bool>,
}

impl BitString {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn zeros(len: usize) -> Self {
        Self { bits: vec![false; len] }
    }

    pub fn from_bools(bits: Vec<bool>) -> Self {
        Self { bits }
    }

    /// Parses a string of `0`/`1` characters.
    pub fn parse(s: &str) -> Result<Self> {
        s.chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(Error::InvalidParameter(format!("not a bit: {other:?}"))),
            })
            .collect::<Result<Vec<_>>>()
            .map(Self::from_bools)
    }

    /// The low `len` bits of `value`, most significant bit first.
    pub fn from_uint(value: u128, len: usize) -> Self {
        let mut s = Self::new();
        s.push_uint(value, len);
        s
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn get(&self, i: usize) -> bool {
        self.bits[i]
    }

    pub fn set(&mut self, i: usize, v: bool) {
        self.bits[i] = v;
    }

    pub fn push(&mut self, b: bool) {
        self.bits.push(b);
    }

    /// Appends `value` as a big-endian field of `width` bits.
    pub fn push_uint(&mut self, value: u128, width: usize) {
        debug_assert!(width >= 128 || value >> width == 0, "{value} does not fit {width} bits");
        for k in (0..width).rev() {
            self.bits.push((value >> k) & 1 == 1);
        }
    }

    /// Reads a big-endian field of `width` bits starting at `offset`.
    pub fn read_uint(&self, offset: usize, width: usize) -> u128 {
        self.bits[offset..offset + width]
            .iter()
            .fold(0u128, |acc, &b| (acc << 1) | b as u128)
    }

    pub fn as_slice(&self) -> &[bool] {
        &self.bits
    }

    pub fn weight(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    pub fn xor(&self, other: &Self) -> Result<Self> {
        if self.len() != other.len() {
            return Err(Error::DimensionMismatch(self.len(), other.len()));
        }
        Ok(Self::from_bools(
            self.bits.iter().zip(&other.bits).map(|(a, b)| a ^ b).collect(),
        ))
    }

    pub fn hamming_distance(&self, other: &Self) -> Result<usize> {
        Ok(self.xor(other)?.weight())
    }

    /// Packs the bits into a `u128`, bit `i` of the string at bit `i` of the word.
    pub fn to_mask(&self) -> u128 {
        assert!(self.len() <= 128, "bit string longer than 128 bits");
        self.bits
            .iter()
            .enumerate()
            .fold(0u128, |acc, (i, &b)| acc | ((b as u128) << i))
    }

    pub fn from_mask(mask: u128, len: usize) -> Self {
        Self::from_bools((0..len).map(|i| (mask >> i) & 1 == 1).collect())
    }

    /// Hex encoding: bits grouped in nibbles from the left, the last nibble zero-padded.
    pub fn to_hex(&self) -> String {
        self.bits
            .chunks(4)
            .map(|chunk| {
                let v = chunk
                    .iter()
                    .enumerate()
                    .fold(0u32, |acc, (k, &b)| acc | ((b as u32) << (3 - k)));
                std::char::from_digit(v, 16).unwrap()
            })
            .collect()
    }

    pub fn from_hex(hex: &str, len: usize) -> Result<Self> {
        if hex.len() != len.div_ceil(4) {
            return Err(Error::Serialization(format!(
                "hex string of {} digits cannot hold exactly {len} bits",
                hex.len()
            )));
        }
        let mut bits = Vec::with_capacity(hex.len() * 4);
        for c in hex.chars() {
            let v = c
                .to_digit(16)
                .ok_or_else(|| Error::Serialization(format!("bad hex digit {c:?}")))?;
            for k in (0..4).rev() {
                bits.push((v >> k) & 1 == 1);
            }
        }
        if bits[len..].iter().any(|&b| b) {
            return Err(Error::Serialization("nonzero padding bits".into()));
        }
        bits.truncate(len);
        Ok(Self { bits })
    }
}

impl fmt::Debug for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitString({self})")
    }
}

impl fmt::Display for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.bits {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl FromIterator<bool> for BitString {
    fn from_iter<I: IntoIterator<Item = bool>>(iter: I) -> Self {
        Self::from_bools(iter.into_iter().collect())
    }
}

/// Serializes as a string of `0`/`1` characters.
impl Serialize for BitString {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for BitString {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        Self::parse(&s).map_err(serde::de::Error::custom)
    }
}

/// `ceil(log2 n)` for `n >= 1`; zero for `n == 1`.
pub fn ceil_log2(n: u128) -> usize {
    assert!(n >= 1);
    (128 - (n - 1).leading_zeros()) as usize
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn uint_fields_round_trip() {
        let mut s = BitString::new();
        s.push_uint(5, 4);
        s.push_uint(1, 1);
        assert_eq!(s.to_string(), "01011");
        assert_eq!(s.read_uint(0, 4), 5);
        assert_eq!(s.read_uint(4, 1), 1);
    }

    #[test]
    fn hex_pads_last_nibble() {
        let s = BitString::parse("10110").unwrap();
        assert_eq!(s.to_hex(), "b0");
        assert_eq!(BitString::from_hex("b0", 5).unwrap(), s);
        assert!(BitString::from_hex("b4", 5).is_err());
        assert!(BitString::from_hex("b", 5).is_err());
    }

    #[test]
    fn ceil_log2_small_values() {
        let got: Vec<_> = [1u128, 2, 3, 4, 5, 8, 9, 16, 40].iter().map(|&n| ceil_log2(n)).collect();
        assert_eq!(got, vec![0, 1, 2, 2, 3, 3, 4, 4, 6]);
    }

    #[test]
    fn mask_round_trip() {
        let s = BitString::parse("1100101").unwrap();
        assert_eq!(BitString::from_mask(s.to_mask(), 7), s);
    }
}
