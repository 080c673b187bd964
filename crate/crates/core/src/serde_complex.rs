//! Complex numbers in config files: written as `[re, im]`, read from either
//! `[re, im]` or a bare real number.

use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

#[derive(Deserialize)]
#[serde(untagged)]
enum Repr {
    Real(f64),
    Pair([f64; 2]),
}

pub fn serialize<S: Serializer>(z: &Complex64, s: S) -> Result<S::Ok, S::Error> {
    [z.re, z.im].serialize(s)
}

pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Complex64, D::Error> {
    Ok(match Repr::deserialize(d)? {
        Repr::Real(re) => Complex64::new(re, 0.0),
        Repr::Pair([re, im]) => Complex64::new(re, im),
    })
}

/// `[[re, im]; N]` arrays, used for state vectors.
pub mod vec {
    use super::*;

    pub fn serialize<S: Serializer>(v: &[Complex64], s: S) -> Result<S::Ok, S::Error> {
        v.iter().map(|z| [z.re, z.im]).collect::<Vec<_>>().serialize(s)
    }
}
