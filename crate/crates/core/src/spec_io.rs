//! Sponge specification files: JSON with exact numeric strings.

use crate::model::{AffineMapSpec, RawSponge};
use crate::rational::{format_rational, parse_rational, Rat};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SpecFile {
    pub dimension: usize,
    pub maps: Vec<MapEntry>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub weights: Option<Vec<String>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MapEntry {
    pub ratios: Vec<String>,
    pub translation: Vec<String>,
}

#[derive(Debug, Clone, thiserror::Error)]
pub enum SpecError {
    #[error("invalid JSON: {0}")]
    Json(String),
    #[error("invalid number in `{field}`: {source}")]
    Number {
        field: String,
        source: crate::rational::NumberParseError,
    },
}

pub fn parse_spec(text: &str) -> Result<RawSponge, SpecError> {
    let file: SpecFile = serde_json::from_str(text).map_err(|e| SpecError::Json(e.to_string()))?;
    raw_from_file(&file)
}

pub fn raw_from_file(file: &SpecFile) -> Result<RawSponge, SpecError> {
    let parse_all = |field: &str, values: &[String]| -> Result<Vec<Rat>, SpecError> {
        values
            .iter()
            .map(|v| {
                parse_rational(v).map_err(|source| SpecError::Number {
                    field: field.to_string(),
                    source,
                })
            })
            .collect()
    };
    let mut maps = Vec::with_capacity(file.maps.len());
    for (i, m) in file.maps.iter().enumerate() {
        let ratios = parse_all(&format!("maps[{i}].ratios"), &m.ratios)?;
        let translation = parse_all(&format!("maps[{i}].translation"), &m.translation)?;
        maps.push(AffineMapSpec::new(ratios, translation));
    }
    let weights = match &file.weights {
        None => None,
        Some(ws) => Some(parse_all("weights", ws)?),
    };
    Ok(RawSponge { dimension: file.dimension, maps, weights })
}

/// Canonical echo of a raw sponge: every number in `p/q` form.
pub fn file_from_raw(raw: &RawSponge) -> SpecFile {
    SpecFile {
        dimension: raw.dimension,
        maps: raw
            .maps
            .iter()
            .map(|m| MapEntry {
                ratios: m.ratios.iter().map(format_rational).collect(),
                translation: m.translation.iter().map(format_rational).collect(),
            })
            .collect(),
        weights: raw
            .weights
            .as_ref()
            .map(|ws| ws.iter().map(format_rational).collect()),
    }
}

pub fn spec_to_json(raw: &RawSponge) -> String {
    serde_json::to_string_pretty(&file_from_raw(raw)).expect("spec serialization is infallible")
}
