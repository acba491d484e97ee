//! Canonical on-disk JSON formats: complexes (maximal simplices plus
//! optional weights and void data) and chains, with rationals rendered as
//! `p/q` strings and parsed from `p/q` or decimal strings.

use std::collections::BTreeMap;
use std::str::FromStr;

use num_traits::{One, Zero};
use serde::ser::Serializer;
use serde::{Deserialize, Serialize};

use crate::chain::Chain;
use crate::complex::{Simplex, SimplicialComplex};
use crate::error::{Error, Result};
use crate::{Int, Rat};

/// Renders a rational as `p` or `p/q`.
pub fn rat_to_string(x: &Rat) -> String {
    if x.denom().is_one() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

/// Parses `p/q`, an integer, or a plain decimal like `1.5` into an exact
/// rational.
pub fn rat_from_string(s: &str) -> Result<Rat> {
    let s = s.trim();
    if let Some((p, q)) = s.split_once('/') {
        let num = Int::from_str(p.trim())
            .map_err(|e| Error::MalformedInput(format!("bad numerator {:?}: {}", p, e)))?;
        let den = Int::from_str(q.trim())
            .map_err(|e| Error::MalformedInput(format!("bad denominator {:?}: {}", q, e)))?;
        if den.is_zero() {
            return Err(Error::MalformedInput("zero denominator".into()));
        }
        return Ok(Rat::new(num, den));
    }
    if let Some((whole, frac)) = s.split_once('.') {
        let sign = if whole.trim_start().starts_with('-') { -1 } else { 1 };
        let w = Int::from_str(whole)
            .map_err(|e| Error::MalformedInput(format!("bad decimal {:?}: {}", s, e)))?;
        let digits = frac.trim();
        let f = if digits.is_empty() {
            Int::zero()
        } else {
            Int::from_str(digits)
                .map_err(|e| Error::MalformedInput(format!("bad decimal {:?}: {}", s, e)))?
        };
        let scale = Int::from(10u8).pow(digits.len() as u32);
        return Ok(Rat::new(w, Int::one()) + Rat::new(f * Int::from(sign), scale));
    }
    let n = Int::from_str(s)
        .map_err(|e| Error::MalformedInput(format!("bad rational {:?}: {}", s, e)))?;
    Ok(Rat::from_integer(n))
}

pub fn serialize_rat<S: Serializer>(x: &Rat, ser: S) -> std::result::Result<S::Ok, S::Error> {
    ser.serialize_str(&rat_to_string(x))
}

fn simplex_key(s: &Simplex) -> String {
    s.vertices()
        .iter()
        .map(|v| v.to_string())
        .collect::<Vec<_>>()
        .join(",")
}

fn simplex_from_key(key: &str) -> Result<Simplex> {
    let verts: std::result::Result<Vec<usize>, _> =
        key.split(',').map(|t| t.trim().parse::<usize>()).collect();
    Simplex::new(
        verts.map_err(|e| Error::MalformedInput(format!("bad simplex key {:?}: {}", key, e)))?,
    )
}

/// Serialized form of a complex file.
#[derive(Serialize, Deserialize)]
pub struct ComplexFile {
    pub maximal_simplices: Vec<Vec<usize>>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub weights: BTreeMap<String, String>,
    /// Signed void-boundary chains for embedded complexes, one map per
    /// bounded void.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub voids: Vec<BTreeMap<String, String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub provenance: Option<Provenance>,
}

/// Generation stamp for complexes produced by the family generators.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Provenance {
    pub family: String,
    pub d: usize,
    pub n: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

pub fn complex_to_file(k: &SimplicialComplex) -> ComplexFile {
    ComplexFile {
        maximal_simplices: k
            .maximal_simplices()
            .iter()
            .map(|s| s.vertices().to_vec())
            .collect(),
        weights: k
            .stored_weights()
            .iter()
            .map(|(s, w)| (simplex_key(s), rat_to_string(w)))
            .collect(),
        voids: Vec::new(),
        provenance: None,
    }
}

pub fn complex_from_file(file: &ComplexFile) -> Result<SimplicialComplex> {
    let mut weights = BTreeMap::new();
    for (k, v) in &file.weights {
        weights.insert(simplex_from_key(k)?, rat_from_string(v)?);
    }
    SimplicialComplex::build(&file.maximal_simplices, Some(weights))
}

/// Extracts the void chains of a complex file as `(d)`-chains.
pub fn voids_from_file(file: &ComplexFile, d: usize) -> Result<Vec<Chain>> {
    file.voids
        .iter()
        .map(|m| {
            let mut c = Chain::zero(d as i64);
            for (k, v) in m {
                c.add_term(simplex_from_key(k)?, rat_from_string(v)?);
            }
            Ok(c)
        })
        .collect()
}

/// Serialized chain: dimension plus a simplex-key to rational map.
#[derive(Serialize, Deserialize)]
pub struct ChainFile {
    pub dimension: i64,
    pub coefficients: BTreeMap<String, String>,
}

pub fn chain_to_file(c: &Chain) -> ChainFile {
    ChainFile {
        dimension: c.dimension(),
        coefficients: c
            .iter()
            .map(|(s, x)| (simplex_key(s), rat_to_string(x)))
            .collect(),
    }
}

pub fn chain_from_file(file: &ChainFile) -> Result<Chain> {
    let mut c = Chain::zero(file.dimension);
    for (k, v) in &file.coefficients {
        let s = simplex_from_key(k)?;
        if s.dimension() as i64 != file.dimension {
            return Err(Error::MalformedInput(format!(
                "simplex {:?} does not match chain dimension {}",
                s, file.dimension
            )));
        }
        c.add_term(s, rat_from_string(v)?);
    }
    Ok(c)
}

pub fn write_complex(path: &std::path::Path, file: &ComplexFile) -> Result<()> {
    std::fs::write(path, serde_json::to_string_pretty(file)?)?;
    Ok(())
}

pub fn read_complex(path: &std::path::Path) -> Result<ComplexFile> {
    Ok(serde_json::from_str(&std::fs::read_to_string(path)?)?)
}

pub fn read_chain(path: &std::path::Path) -> Result<Chain> {
    let file: ChainFile = serde_json::from_str(&std::fs::read_to_string(path)?)?;
    chain_from_file(&file)
}

/// Rounds a float to 12 significant digits for deterministic reports.
pub fn round_sig(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    let mag = x.abs().log10().floor();
    let scale = 10f64.powf(11.0 - mag);
    (x * scale).round() / scale
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rational_round_trip() {
        for s in ["3/2", "-7", "0.25", "-1.5", "10/4"] {
            let r = rat_from_string(s).unwrap();
            let r2 = rat_from_string(&rat_to_string(&r)).unwrap();
            assert_eq!(r, r2);
        }
        assert_eq!(rat_from_string("1.5").unwrap(), rat_from_string("3/2").unwrap());
    }

    #[test]
    fn complex_file_round_trip() {
        let mut w = BTreeMap::new();
        w.insert(Simplex::new([0, 1, 2]).unwrap(), rat_from_string("3/2").unwrap());
        let k = SimplicialComplex::build(&[vec![0, 1, 2], vec![2, 3]], Some(w)).unwrap();
        let f = complex_to_file(&k);
        let k2 = complex_from_file(&f).unwrap();
        assert_eq!(k, k2);
    }

    #[test]
    fn sig_digit_rounding_is_stable() {
        let x = 0.123456789012345678;
        assert_eq!(round_sig(x), round_sig(round_sig(x)));
    }
}
