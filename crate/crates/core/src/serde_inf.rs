//! Serializes `f64` vectors with `+∞` entries as JSON `null`.

use serde::{Deserialize, Deserializer, Serialize, Serializer};

pub fn serialize<S: Serializer>(v: &[f64], s: S) -> Result<S::Ok, S::Error> {
    let opt: Vec<Option<f64>> = v
        .iter()
        .map(|x| if x.is_infinite() { None } else { Some(*x) })
        .collect();
    opt.serialize(s)
}

pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<f64>, D::Error> {
    let opt: Vec<Option<f64>> = Vec::deserialize(d)?;
    Ok(opt.into_iter().map(|x| x.unwrap_or(f64::INFINITY)).collect())
}
