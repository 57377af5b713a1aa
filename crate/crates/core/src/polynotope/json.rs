use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::Polynotope;
use crate::error::{Error, Result};
use crate::symbols::{self, SymbolId};

/// On-disk record: `R` row-major, `E` as `[row, column, power]` triplets.
#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Record {
    c: Vec<f64>,
    #[serde(rename = "R")]
    r: Vec<Vec<f64>>,
    #[serde(rename = "I")]
    i: Vec<SymbolId>,
    #[serde(rename = "E")]
    e: Vec<(usize, usize, u32)>,
}

impl From<&Polynotope> for Record {
    fn from(p: &Polynotope) -> Self {
        Record {
            c: p.center.iter().copied().collect(),
            r: p.generators.row_iter().map(|row| row.iter().copied().collect()).collect(),
            i: p.ids.clone(),
            e: p.exponent_triplets(),
        }
    }
}

impl TryFrom<Record> for Polynotope {
    type Error = Error;

    fn try_from(rec: Record) -> Result<Self> {
        let n = rec.c.len();
        if rec.r.len() != n {
            return Err(Error::DimensionMismatch {
                op: "load",
                expected: n,
                found: rec.r.len(),
            });
        }
        let m = rec.r.first().map_or(0, Vec::len);
        if let Some(row) = rec.r.iter().find(|row| row.len() != m) {
            return Err(Error::DimensionMismatch {
                op: "load",
                expected: m,
                found: row.len(),
            });
        }
        let generators = DMatrix::from_row_iterator(n, m, rec.r.into_iter().flatten());
        let loaded = Polynotope::new(DVector::from_vec(rec.c), generators, rec.i, &rec.e)?;
        if let Some(&last) = loaded.ids.iter().max() {
            symbols::global().reserve_through(last);
        }
        Ok(loaded)
    }
}

impl Serialize for Polynotope {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        Record::from(self).serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Polynotope {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let rec = Record::deserialize(deserializer)?;
        Polynotope::try_from(rec).map_err(serde::de::Error::custom)
    }
}

impl Polynotope {
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("polynotope serializes")
    }

    pub fn from_json(text: &str) -> Result<Polynotope> {
        Ok(serde_json::from_str(text)?)
    }
}
