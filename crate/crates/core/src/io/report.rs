use serde::{Deserialize, Serialize};

use crate::env::EpisodeSummary;
use crate::error::{Error, Result};

/// One line of a run report. Per-run rows carry the seed; aggregate rows
/// carry `mean` or `std` in the seed column.
///
/// `d` and `l` are normalized, `aln` is in `[0, 1]`, `hpwl` and `overlap`
/// are raw grid quantities.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub circuit: String,
    pub task: u8,
    pub solver: String,
    pub seed: String,
    pub d: f64,
    pub l: f64,
    pub aln: f64,
    pub hpwl: f64,
    pub overlap: f64,
    pub boundary_sat: f64,
    pub boundary_total: f64,
    pub grouping_sat: f64,
    pub grouping_total: f64,
    pub alignment_sat: f64,
    pub alignment_total: f64,
    /// Steps placed under a relaxed mask.
    pub relaxations: f64,
    pub wall_ms: Option<f64>,
}

impl ReportRow {
    pub fn from_summary(s: &EpisodeSummary, timing: bool) -> Self {
        let sat = &s.satisfaction;
        ReportRow {
            circuit: s.circuit.clone(),
            task: s.task,
            solver: s.solver.clone(),
            seed: s.seed.to_string(),
            d: s.normalized.distance,
            l: s.normalized.adjacency,
            aln: s.normalized.aln,
            hpwl: s.raw.hpwl,
            overlap: s.raw.overlap,
            boundary_sat: sat.boundary.satisfied as f64,
            boundary_total: sat.boundary.total as f64,
            grouping_sat: sat.grouping.satisfied as f64,
            grouping_total: sat.grouping.total as f64,
            alignment_sat: sat.alignment.satisfied as f64,
            alignment_total: sat.alignment.total as f64,
            relaxations: s.relaxations.len() as f64,
            wall_ms: timing.then_some(s.wall_ms),
        }
    }

    fn values(&self) -> [f64; 13] {
        [
            self.d,
            self.l,
            self.aln,
            self.hpwl,
            self.overlap,
            self.boundary_sat,
            self.boundary_total,
            self.grouping_sat,
            self.grouping_total,
            self.alignment_sat,
            self.alignment_total,
            self.relaxations,
            self.wall_ms.unwrap_or(0.0),
        ]
    }

    fn with_values(&self, seed: &str, v: [f64; 13]) -> Self {
        ReportRow {
            circuit: self.circuit.clone(),
            task: self.task,
            solver: self.solver.clone(),
            seed: seed.to_string(),
            d: v[0],
            l: v[1],
            aln: v[2],
            hpwl: v[3],
            overlap: v[4],
            boundary_sat: v[5],
            boundary_total: v[6],
            grouping_sat: v[7],
            grouping_total: v[8],
            alignment_sat: v[9],
            alignment_total: v[10],
            relaxations: v[11],
            wall_ms: self.wall_ms.map(|_| v[12]),
        }
    }

    pub fn is_aggregate(&self) -> bool {
        self.seed == "mean" || self.seed == "std"
    }
}

/// Per-run rows followed by `mean` and population `std` rows for each
/// `(circuit, task, solver)`, in order of first appearance.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub rows: Vec<ReportRow>,
}

impl Report {
    pub fn build(summaries: &[EpisodeSummary], timing: bool) -> Result<Self> {
        if summaries.is_empty() {
            return Err(Error::Empty("no runs to report"));
        }
        let runs: Vec<ReportRow> = summaries
            .iter()
            .map(|s| ReportRow::from_summary(s, timing))
            .collect();
        let mut keys: Vec<(String, u8, String)> = Vec::new();
        for r in &runs {
            let k = (r.circuit.clone(), r.task, r.solver.clone());
            if !keys.contains(&k) {
                keys.push(k);
            }
        }
        let mut rows = runs.clone();
        for (circuit, task, solver) in keys {
            let group: Vec<&ReportRow> = runs
                .iter()
                .filter(|r| r.circuit == circuit && r.task == task && r.solver == solver)
                .collect();
            let n = group.len() as f64;
            let mut mean = [0.0; 13];
            for r in &group {
                for (m, v) in mean.iter_mut().zip(r.values()) {
                    *m += v / n;
                }
            }
            let mut var = [0.0; 13];
            for r in &group {
                for ((s, v), m) in var.iter_mut().zip(r.values()).zip(mean) {
                    *s += (v - m) * (v - m) / n;
                }
            }
            rows.push(group[0].with_values("mean", mean));
            rows.push(group[0].with_values("std", var.map(f64::sqrt)));
        }
        Ok(Report { rows })
    }

    pub fn runs(&self) -> impl Iterator<Item = &ReportRow> {
        self.rows.iter().filter(|r| !r.is_aggregate())
    }

    pub fn aggregate(
        &self,
        circuit: &str,
        task: u8,
        solver: &str,
        which: &str,
    ) -> Option<&ReportRow> {
        self.rows.iter().find(|r| {
            r.circuit == circuit && r.task == task && r.solver == solver && r.seed == which
        })
    }

    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        for r in &self.rows {
            w.serialize(r)?;
        }
        let bytes = w
            .into_inner()
            .map_err(|e| Error::io("<report>", e.into_error()))?;
        Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let mut r = csv::Reader::from_reader(text.as_bytes());
        let rows = r
            .deserialize()
            .collect::<std::result::Result<Vec<ReportRow>, _>>()?;
        Ok(Report { rows })
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)? + "\n")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}
