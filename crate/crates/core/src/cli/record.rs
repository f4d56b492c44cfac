use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::algorithms::SortReport;

/// CSV header, in column order.
pub const CSV_HEADER: &str = "algo,n,seed,schedule_id,comparisons,swaps,rounds,sorted,wall_ns";

/// One trial of one algorithm at one size.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExperimentRecord {
    pub algo: String,
    pub n: usize,
    pub seed: u64,
    pub schedule_id: Option<String>,
    pub comparisons: u64,
    pub swaps: u64,
    pub rounds: u64,
    pub sorted: bool,
    pub wall_ns: u64,
}

impl ExperimentRecord {
    pub fn from_report(
        algo: &str,
        seed: u64,
        schedule_id: Option<String>,
        report: &SortReport,
        wall_ns: u64,
    ) -> Self {
        Self {
            algo: algo.to_string(),
            n: report.n,
            seed,
            schedule_id,
            comparisons: report.comparisons,
            swaps: report.swaps,
            rounds: report.rounds,
            sorted: report.sorted,
            wall_ns,
        }
    }

    pub fn csv_line(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{}",
            self.algo,
            self.n,
            self.seed,
            self.schedule_id.as_deref().unwrap_or(""),
            self.comparisons,
            self.swaps,
            self.rounds,
            self.sorted,
            self.wall_ns
        )
    }

    pub fn write<W: Write + ?Sized>(&self, out: &mut W, json: bool) -> std::io::Result<()> {
        if json {
            let line = serde_json::to_string(self).map_err(std::io::Error::other)?;
            writeln!(out, "{line}")
        } else {
            writeln!(out, "{}", self.csv_line())
        }
    }
}
