use std::collections::BTreeSet;
use std::fmt;

use num_bigint::BigUint;
use num_traits::Zero;
use serde::{de, Deserialize, Deserializer, Serialize, Serializer};

use super::{Literal, Valuation};
use crate::error::{Error, Result};

/// A full polarity assignment over the ordered literal list: bit `i` of the
/// index is the truth value of literal `i`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Cube {
    index: u32,
    width: usize,
}

/// Largest supported literal count; cube indices must fit in `u32`.
pub const MAX_LITERALS: usize = 31;

impl Cube {
    pub fn new(index: u32, width: usize) -> Result<Self> {
        if width > MAX_LITERALS {
            return Err(Error::contract(format!(
                "{width} literals exceed the supported maximum of {MAX_LITERALS}"
            )));
        }
        if u64::from(index) >= 1u64 << width {
            return Err(Error::contract(format!(
                "cube index {index} out of range for {width} literals"
            )));
        }
        Ok(Cube { index, width })
    }

    pub fn index(self) -> u32 {
        self.index
    }

    pub fn width(self) -> usize {
        self.width
    }

    pub fn polarity(self, i: usize) -> bool {
        self.index >> i & 1 == 1
    }

    /// All `2^width` cubes in index order.
    pub fn all(width: usize) -> impl Iterator<Item = Cube> {
        (0..1u32 << width).map(move |index| Cube { index, width })
    }

    /// The unique cube that holds under a valuation covering every literal variable.
    pub fn of_valuation(lits: &[Literal], full: &Valuation) -> Result<Cube> {
        let mut index = 0u32;
        for (i, l) in lits.iter().enumerate() {
            if l.eval(full)? {
                index |= 1 << i;
            }
        }
        Cube::new(index, lits.len())
    }
}

/// `s0 & !s1 & s2` style rendering.
impl fmt::Display for Cube {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = (0..self.width)
            .map(|i| {
                if self.polarity(i) {
                    format!("s{i}")
                } else {
                    format!("!s{i}")
                }
            })
            .collect();
        f.write_str(&parts.join(" & "))
    }
}

/// The conjunction of (possibly negated) literals denoted by `cube`.
pub fn cube_formula(cube: Cube, lits: &[Literal]) -> Result<Vec<Literal>> {
    if cube.width() != lits.len() {
        return Err(Error::contract(format!(
            "cube width {} does not match {} literals",
            cube.width(),
            lits.len()
        )));
    }
    Ok(lits
        .iter()
        .enumerate()
        .map(|(i, l)| l.with_polarity(cube.polarity(i)))
        .collect())
}

/// A set of cube indices. Ordered lexicographically by ascending members.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ReactionSet(BTreeSet<u32>);

impl ReactionSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, cube: u32) -> bool {
        self.0.insert(cube)
    }

    pub fn contains(&self, cube: u32) -> bool {
        self.0.contains(&cube)
    }

    pub fn iter(&self) -> impl Iterator<Item = u32> + '_ {
        self.0.iter().copied()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn to_bitmask(&self) -> BigUint {
        let mut bits = BigUint::zero();
        for &c in &self.0 {
            bits.set_bit(u64::from(c), true);
        }
        bits
    }

    pub fn from_bitmask(bits: &BigUint) -> Self {
        ReactionSet(
            (0..bits.bits())
                .filter(|&i| bits.bit(i))
                .map(|i| i as u32)
                .collect(),
        )
    }

    /// Hex rendering of the bitmask, e.g. `0x2a` for cubes {1, 3, 5}.
    pub fn to_hex(&self) -> String {
        format!("{:#x}", self.to_bitmask())
    }

    pub fn from_hex(text: &str) -> Result<Self> {
        let digits = text
            .strip_prefix("0x")
            .ok_or_else(|| Error::contract(format!("bitmask `{text}` lacks 0x prefix")))?;
        let bits = BigUint::parse_bytes(digits.as_bytes(), 16)
            .ok_or_else(|| Error::contract(format!("malformed bitmask `{text}`")))?;
        Ok(Self::from_bitmask(&bits))
    }
}

impl FromIterator<u32> for ReactionSet {
    fn from_iter<T: IntoIterator<Item = u32>>(iter: T) -> Self {
        ReactionSet(iter.into_iter().collect())
    }
}

impl fmt::Display for ReactionSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let members: Vec<String> = self.0.iter().map(u32::to_string).collect();
        write!(f, "{{{}}}", members.join(", "))
    }
}

impl Serialize for ReactionSet {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_hex())
    }
}

impl<'de> Deserialize<'de> for ReactionSet {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let text = String::deserialize(d)?;
        ReactionSet::from_hex(&text).map_err(de::Error::custom)
    }
}
