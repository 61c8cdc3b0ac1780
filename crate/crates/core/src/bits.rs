//! Fixed-width bit vectors used for latch states and input vectors.

use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::str::FromStr;

/// Packed fixed-width bit vector. Bit 0 is the first declared latch/input.
///
/// Ordering is lexicographic over bit positions, `false < true`.
#[derive(Clone, Default)]
pub struct BitVector {
    len: usize,
    words: Vec<u64>,
}

impl BitVector {
    pub fn zeros(len: usize) -> Self {
        BitVector {
            len,
            words: vec![0; len.div_ceil(64)],
        }
    }

    pub fn from_bools<I: IntoIterator<Item = bool>>(bits: I) -> Self {
        let mut v = BitVector::zeros(0);
        for b in bits {
            v.push(b);
        }
        v
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        assert!(i < self.len, "bit index {i} out of range {}", self.len);
        self.words[i / 64] >> (i % 64) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, value: bool) {
        assert!(i < self.len, "bit index {i} out of range {}", self.len);
        let mask = 1u64 << (i % 64);
        if value {
            self.words[i / 64] |= mask;
        } else {
            self.words[i / 64] &= !mask;
        }
    }

    pub fn push(&mut self, value: bool) {
        if self.len.is_multiple_of(64) {
            self.words.push(0);
        }
        self.len += 1;
        self.set(self.len - 1, value);
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.len).map(move |i| self.get(i))
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// Bits `0..len` taken from the low bits of `value`.
    pub fn from_u64(value: u64, len: usize) -> Self {
        assert!(len <= 64);
        let mut v = BitVector::zeros(len);
        if len > 0 {
            v.words[0] = if len == 64 { value } else { value & ((1u64 << len) - 1) };
        }
        v
    }

    /// Inverse of [`BitVector::from_u64`]; `None` when wider than 64 bits.
    pub fn to_u64(&self) -> Option<u64> {
        match self.len {
            0 => Some(0),
            1..=64 => Some(self.words[0]),
            _ => None,
        }
    }
}

impl PartialEq for BitVector {
    fn eq(&self, other: &Self) -> bool {
        self.len == other.len && self.words == other.words
    }
}

impl Eq for BitVector {}

impl Hash for BitVector {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.len.hash(state);
        self.words.hash(state);
    }
}

impl Ord for BitVector {
    fn cmp(&self, other: &Self) -> Ordering {
        // reverse_bits puts bit 0 in the most significant position
        let a = self.words.iter().map(|w| w.reverse_bits());
        let b = other.words.iter().map(|w| w.reverse_bits());
        a.cmp(b).then(self.len.cmp(&other.len))
    }
}

impl PartialOrd for BitVector {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for BitVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in self.iter() {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for BitVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, thiserror::Error)]
#[error("invalid bit character {0:?}")]
pub struct BitParseError(pub char);

impl FromStr for BitVector {
    type Err = BitParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut v = BitVector::zeros(0);
        for c in s.chars() {
            match c {
                '0' => v.push(false),
                '1' => v.push(true),
                other => return Err(BitParseError(other)),
            }
        }
        Ok(v)
    }
}

macro_rules! bit_newtype {
    ($(#[$meta:meta])* $name:ident) => {
        $(#[$meta])*
        #[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
        pub struct $name(pub BitVector);

        impl $name {
            pub fn zeros(len: usize) -> Self {
                $name(BitVector::zeros(len))
            }

            pub fn from_bools<I: IntoIterator<Item = bool>>(bits: I) -> Self {
                $name(BitVector::from_bools(bits))
            }

            pub fn from_u64(value: u64, len: usize) -> Self {
                $name(BitVector::from_u64(value, len))
            }

            pub fn len(&self) -> usize {
                self.0.len()
            }

            pub fn is_empty(&self) -> bool {
                self.0.is_empty()
            }

            pub fn get(&self, i: usize) -> bool {
                self.0.get(i)
            }

            pub fn set(&mut self, i: usize, value: bool) {
                self.0.set(i, value)
            }

            pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
                self.0.iter()
            }

            pub fn to_u64(&self) -> Option<u64> {
                self.0.to_u64()
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                self.0.fmt(f)
            }
        }

        impl fmt::Debug for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                write!(f, "{}({})", stringify!($name), self.0)
            }
        }

        impl FromStr for $name {
            type Err = BitParseError;

            fn from_str(s: &str) -> Result<Self, Self::Err> {
                s.parse().map($name)
            }
        }
    };
}

bit_newtype!(
    /// Assignment to the latches, one bit per latch in declaration order.
    State
);
bit_newtype!(
    /// Assignment to the primary inputs, one bit per input in declaration order.
    InputVector
);

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn display_and_parse() {
        let s: State = "1011".parse().unwrap();
        assert!(s.get(0) && !s.get(1) && s.get(2) && s.get(3));
        assert_eq!(s.to_string(), "1011");
        assert!("10x".parse::<State>().is_err());
    }

    #[test]
    fn wide_vectors() {
        let mut v = BitVector::zeros(130);
        v.set(129, true);
        v.set(64, true);
        assert_eq!(v.count_ones(), 2);
        assert!(v.get(129) && v.get(64) && !v.get(63));
    }

    proptest! {
        #[test]
        fn order_is_lexicographic(a in proptest::collection::vec(any::<bool>(), 0..150),
                                  b in proptest::collection::vec(any::<bool>(), 0..150)) {
            let va = BitVector::from_bools(a.iter().copied());
            let vb = BitVector::from_bools(b.iter().copied());
            if a.len() == b.len() {
                prop_assert_eq!(va.cmp(&vb), a.cmp(&b));
            }
            prop_assert_eq!(va == vb, a == b);
        }
    }
}
