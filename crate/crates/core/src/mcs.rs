//! Adaptive modulation and coding lookup.

use std::io::Read;

use serde::Deserialize;

use crate::error::{Error, Result};

const DEFAULT_TABLE: &str = include_str!("../data/mcs_table.csv");

/// SINR thresholds (dB) and the spectral efficiencies (bits/symbol) they
/// unlock. Intervals are left-closed: reaching a threshold grants its
/// efficiency.
#[derive(Debug, Clone, PartialEq)]
pub struct McsTable {
    thresholds_db: Vec<f64>,
    efficiencies: Vec<f64>,
}

#[derive(Deserialize)]
struct Row {
    threshold_db: f64,
    bits_per_symbol: f64,
}

impl Default for McsTable {
    fn default() -> Self {
        McsTable::from_csv(DEFAULT_TABLE.as_bytes()).expect("embedded MCS table is valid")
    }
}

impl McsTable {
    pub fn new(thresholds_db: Vec<f64>, efficiencies: Vec<f64>) -> Result<Self> {
        if thresholds_db.is_empty() || thresholds_db.len() != efficiencies.len() {
            return Err(Error::Mcs(format!(
                "need equally many thresholds and efficiencies, got {} and {}",
                thresholds_db.len(),
                efficiencies.len()
            )));
        }
        let increasing = |v: &[f64]| v.windows(2).all(|w| w[0] < w[1]) && v.iter().all(|x| x.is_finite());
        if !increasing(&thresholds_db) {
            return Err(Error::Mcs("thresholds must be strictly increasing".into()));
        }
        if !increasing(&efficiencies) || efficiencies[0] <= 0.0 {
            return Err(Error::Mcs("efficiencies must be positive and strictly increasing".into()));
        }
        Ok(McsTable {
            thresholds_db,
            efficiencies,
        })
    }

    /// Reads `threshold_db,bits_per_symbol` rows with a header line.
    pub fn from_csv<R: Read>(reader: R) -> Result<Self> {
        let mut thresholds = Vec::new();
        let mut effs = Vec::new();
        for row in csv::Reader::from_reader(reader).deserialize() {
            let row: Row = row?;
            thresholds.push(row.threshold_db);
            effs.push(row.bits_per_symbol);
        }
        McsTable::new(thresholds, effs)
    }

    pub fn thresholds_db(&self) -> &[f64] {
        &self.thresholds_db
    }

    pub fn efficiencies(&self) -> &[f64] {
        &self.efficiencies
    }

    /// Lowest SINR that is still decodable.
    pub fn min_threshold_db(&self) -> f64 {
        self.thresholds_db[0]
    }

    /// Spectral efficiency for an SINR in dB; 0 below the first threshold.
    pub fn efficiency(&self, sinr_db: f64) -> f64 {
        let idx = self.thresholds_db.partition_point(|&t| t <= sinr_db);
        if idx == 0 {
            0.0
        } else {
            self.efficiencies[idx - 1]
        }
    }
}
