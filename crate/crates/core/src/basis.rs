//! Computational basis strings.
//!
//! Qubit 1 is the leftmost character of the textual form and the most
//! significant bit of the integer index, so `"011"` is index 3 and qubit 1
//! reads 0. Every module shares this convention.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const MAX_QUBITS: usize = 64;

/// An n-bit computational basis string, 1 ≤ n ≤ 64.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct BasisString {
    n: u8,
    bits: u64,
}

#[inline]
pub(crate) fn low_mask(n: usize) -> u64 {
    if n >= 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

impl BasisString {
    pub fn new(n: usize, bits: u64) -> Result<Self> {
        if n == 0 || n > MAX_QUBITS {
            return Err(Error::InvalidQubitCount(n));
        }
        if bits & !low_mask(n) != 0 {
            return Err(Error::InvalidArgument(format!(
                "index {bits} does not fit in {n} qubits"
            )));
        }
        Ok(Self { n: n as u8, bits })
    }

    /// The all-zero string on `n` qubits.
    pub fn zeros(n: usize) -> Result<Self> {
        Self::new(n, 0)
    }

    pub(crate) fn from_raw(n: usize, bits: u64) -> Self {
        debug_assert!((1..=MAX_QUBITS).contains(&n) && bits & !low_mask(n) == 0);
        Self { n: n as u8, bits }
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n as usize
    }

    /// Integer index of this string in a dense amplitude array.
    #[inline]
    pub fn index(&self) -> u64 {
        self.bits
    }

    #[inline]
    pub fn complement(&self) -> Self {
        Self {
            n: self.n,
            bits: !self.bits & low_mask(self.n()),
        }
    }

    /// Number of 1-bits.
    #[inline]
    pub fn weight(&self) -> u32 {
        self.bits.count_ones()
    }

    #[inline]
    pub fn is_even(&self) -> bool {
        self.weight().is_multiple_of(2)
    }

    /// Bit of qubit `qubit` (1-based, qubit 1 leftmost).
    pub fn bit(&self, qubit: usize) -> Result<u8> {
        let pos = bit_position(self.n(), qubit)?;
        Ok(((self.bits >> pos) & 1) as u8)
    }
}

/// Integer bit position of 1-based `qubit` in an `n`-qubit index.
pub fn bit_position(n: usize, qubit: usize) -> Result<u32> {
    if qubit == 0 || qubit > n {
        return Err(Error::QubitOutOfRange { qubit, n });
    }
    Ok((n - qubit) as u32)
}

impl fmt::Display for BasisString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for q in 0..self.n() {
            let pos = self.n() - 1 - q;
            f.write_str(if (self.bits >> pos) & 1 == 1 { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for BasisString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "|{self}⟩")
    }
}

impl FromStr for BasisString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let n = s.len();
        if n == 0 || n > MAX_QUBITS {
            return Err(Error::InvalidBasisString(s.to_string()));
        }
        let mut bits = 0u64;
        for c in s.chars() {
            bits = (bits << 1)
                | match c {
                    '0' => 0,
                    '1' => 1,
                    _ => return Err(Error::InvalidBasisString(s.to_string())),
                };
        }
        Ok(Self::from_raw(n, bits))
    }
}

impl TryFrom<String> for BasisString {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<BasisString> for String {
    fn from(b: BasisString) -> String {
        b.to_string()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn qubit_one_is_most_significant() {
        let b: BasisString = "011".parse().unwrap();
        assert_eq!(b.index(), 3);
        assert_eq!(b.bit(1).unwrap(), 0);
        assert_eq!(b.bit(3).unwrap(), 1);
        assert_eq!(b.to_string(), "011");
    }

    #[test]
    fn complement_and_weight() {
        let b: BasisString = "0101".parse().unwrap();
        assert_eq!(b.complement().to_string(), "1010");
        assert_eq!(b.weight(), 2);
        let full = BasisString::zeros(64).unwrap();
        assert_eq!(full.complement().weight(), 64);
    }

    #[test]
    fn rejects_bad_input() {
        assert!("".parse::<BasisString>().is_err());
        assert!("0120".parse::<BasisString>().is_err());
        assert!("0".repeat(65).parse::<BasisString>().is_err());
        assert!(BasisString::new(2, 4).is_err());
        assert!(BasisString::new(0, 0).is_err());
        let b: BasisString = "01".parse().unwrap();
        assert_eq!(b.bit(3), Err(Error::QubitOutOfRange { qubit: 3, n: 2 }));
    }

    proptest! {
        #[test]
        fn complement_is_involution(n in 1usize..=64, raw in any::<u64>()) {
            let b = BasisString::new(n, raw & low_mask(n)).unwrap();
            prop_assert_eq!(b.complement().complement(), b);
            prop_assert_eq!(b.weight() + b.complement().weight(), n as u32);
        }

        #[test]
        fn text_round_trip(n in 1usize..=64, raw in any::<u64>()) {
            let b = BasisString::new(n, raw & low_mask(n)).unwrap();
            prop_assert_eq!(b.to_string().parse::<BasisString>().unwrap(), b);
        }
    }
}
