//! Serde adapters for the file formats: big integers travel as decimal
//! strings, reveal logs as a string of digit characters.

use num_bigint::BigUint;
use serde::{Deserialize, Deserializer, Serializer};

pub(crate) mod dec_string {
    use super::*;

    pub fn serialize<S: Serializer>(n: &BigUint, ser: S) -> Result<S::Ok, S::Error> {
        ser.serialize_str(&n.to_str_radix(10))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(de: D) -> Result<BigUint, D::Error> {
        let s = String::deserialize(de)?;
        s.parse::<BigUint>()
            .map_err(|e| serde::de::Error::custom(format!("invalid decimal integer {s:?}: {e}")))
    }
}

pub(crate) mod digit_string {
    use super::*;

    pub fn serialize<S: Serializer>(digits: &[u8], ser: S) -> Result<S::Ok, S::Error> {
        let s: String = digits.iter().map(|d| char::from(b'0' + d)).collect();
        ser.serialize_str(&s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(de: D) -> Result<Vec<u8>, D::Error> {
        let s = String::deserialize(de)?;
        s.chars()
            .map(|c| {
                c.to_digit(10)
                    .map(|d| d as u8)
                    .ok_or_else(|| serde::de::Error::custom(format!("non-digit character {c:?} in reveal log")))
            })
            .collect()
    }
}
