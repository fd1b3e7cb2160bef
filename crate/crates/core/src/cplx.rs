//! Serde helpers: complex numbers travel as `[re, im]` pairs.

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::C64;

pub fn to_pair(z: C64) -> [f64; 2] {
    [z.re, z.im]
}

pub fn from_pair(p: [f64; 2]) -> C64 {
    C64::new(p[0], p[1])
}

pub mod pair {
    use super::*;

    pub fn serialize<S: Serializer>(z: &C64, s: S) -> Result<S::Ok, S::Error> {
        to_pair(*z).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<C64, D::Error> {
        Ok(from_pair(<[f64; 2]>::deserialize(d)?))
    }
}

pub mod pairs {
    use super::*;

    pub fn serialize<S: Serializer>(v: &[C64], s: S) -> Result<S::Ok, S::Error> {
        let raw: Vec<[f64; 2]> = v.iter().copied().map(to_pair).collect();
        raw.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<C64>, D::Error> {
        let raw = Vec::<[f64; 2]>::deserialize(d)?;
        Ok(raw.into_iter().map(from_pair).collect())
    }
}

pub mod opt_pairs {
    use super::*;

    pub fn serialize<S: Serializer>(v: &Option<Vec<C64>>, s: S) -> Result<S::Ok, S::Error> {
        let raw: Option<Vec<[f64; 2]>> = v
            .as_ref()
            .map(|v| v.iter().copied().map(to_pair).collect());
        raw.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<Vec<C64>>, D::Error> {
        let raw = Option::<Vec<[f64; 2]>>::deserialize(d)?;
        Ok(raw.map(|v| v.into_iter().map(from_pair).collect()))
    }
}
