use std::fs::{File, OpenOptions};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::planner::{Algorithm, Status};
use crate::util::write_atomic;

/// One (instance, algorithm) run. Field order is the CSV column order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub suite_id: String,
    pub grid_size: u32,
    pub agents: u32,
    pub instance_index: u32,
    pub instance_seed: u64,
    pub algorithm: Algorithm,
    pub status: Status,
    pub iterations: u64,
    pub first_solution_time_s: Option<f64>,
    pub first_cost: Option<f64>,
    pub best_cost: Option<f64>,
    pub config_digest: String,
}

impl RunRecord {
    pub fn solved(&self) -> bool {
        self.first_solution_time_s.is_some()
    }

    /// Instance key shared by all algorithms' records for one instance.
    pub fn instance_key(&self) -> (u32, u32, u32, u64) {
        (self.grid_size, self.agents, self.instance_index, self.instance_seed)
    }

    /// Record with the timing column cleared, for comparisons across runs.
    pub fn without_timing(&self) -> RunRecord {
        RunRecord {
            first_solution_time_s: None,
            ..self.clone()
        }
    }

    pub fn check(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::schema("records", format!("{m} ({:?})", self.instance_key())));
        if self.first_solution_time_s.is_some() != self.first_cost.is_some() {
            return bad("first solution time and first cost must be present together");
        }
        if self.first_cost.is_some() != self.best_cost.is_some() {
            return bad("first and best cost must be present together");
        }
        if let (Some(f), Some(b)) = (self.first_cost, self.best_cost) {
            if b > f {
                return bad("best cost exceeds first cost");
            }
        }
        Ok(())
    }
}

/// Append-only CSV sink; every record is flushed as soon as it is written.
pub struct RecordWriter {
    inner: csv::Writer<File>,
}

impl RecordWriter {
    /// Creates (truncating) `path` and writes the header.
    pub fn create(path: &Path) -> Result<Self> {
        let file = File::create(path)?;
        let mut inner = csv::WriterBuilder::new().has_headers(false).from_writer(file);
        inner.write_record(HEADER)?;
        inner.flush()?;
        Ok(RecordWriter { inner })
    }

    /// Opens `path` for appending; the header is written only if the file is empty.
    pub fn append(path: &Path) -> Result<Self> {
        let file = OpenOptions::new().create(true).append(true).open(path)?;
        let empty = file.metadata()?.len() == 0;
        let mut inner = csv::WriterBuilder::new().has_headers(false).from_writer(file);
        if empty {
            inner.write_record(HEADER)?;
            inner.flush()?;
        }
        Ok(RecordWriter { inner })
    }

    pub fn write(&mut self, record: &RunRecord) -> Result<()> {
        self.inner.serialize(record)?;
        self.inner.flush()?;
        Ok(())
    }
}

const HEADER: [&str; 12] = [
    "suite_id",
    "grid_size",
    "agents",
    "instance_index",
    "instance_seed",
    "algorithm",
    "status",
    "iterations",
    "first_solution_time_s",
    "first_cost",
    "best_cost",
    "config_digest",
];

/// Writes all records to `path` atomically.
pub fn write_records(path: &Path, records: &[RunRecord]) -> Result<()> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(Vec::new());
    w.write_record(HEADER)?;
    for r in records {
        w.serialize(r)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
    write_atomic(path, &bytes)?;
    Ok(())
}

pub fn read_records(path: &Path) -> Result<Vec<RunRecord>> {
    let mut rdr = csv::Reader::from_path(path)?;
    let header: Vec<String> = rdr.headers()?.iter().map(str::to_string).collect();
    if header != HEADER {
        return Err(Error::schema("records", format!("unexpected header {header:?}")));
    }
    let mut out = Vec::new();
    for row in rdr.deserialize() {
        let r: RunRecord = row?;
        r.check()?;
        out.push(r);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rec(alg: Algorithm, t: Option<f64>) -> RunRecord {
        RunRecord {
            suite_id: "abc".into(),
            grid_size: 10,
            agents: 2,
            instance_index: 3,
            instance_seed: u64::MAX,
            algorithm: alg,
            status: if t.is_some() { Status::OptimalProven } else { Status::BudgetExhausted },
            iterations: 17,
            first_solution_time_s: t,
            first_cost: t.map(|_| 12.0),
            best_cost: t.map(|_| 10.0),
            config_digest: "d".into(),
        }
    }

    #[test]
    fn csv_round_trip_and_column_order() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("records.csv");
        let rs = vec![rec(Algorithm::Ja, Some(0.25)), rec(Algorithm::IsMaRrtStar, None)];
        write_records(&path, &rs).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), HEADER.join(","));
        assert_eq!(lines.next().unwrap(), "abc,10,2,3,18446744073709551615,ja,optimal_proven,17,0.25,12.0,10.0,d");
        assert_eq!(lines.next().unwrap(), "abc,10,2,3,18446744073709551615,ismarrtstar,budget_exhausted,17,,,,d");
        assert_eq!(read_records(&path).unwrap(), rs);
    }

    #[test]
    fn incremental_writer_appends() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("r.csv");
        RecordWriter::create(&path).unwrap().write(&rec(Algorithm::Ja, None)).unwrap();
        RecordWriter::append(&path).unwrap().write(&rec(Algorithm::MaRrtStar, Some(1.0))).unwrap();
        assert_eq!(read_records(&path).unwrap().len(), 2);
    }

    #[test]
    fn inconsistent_record_is_rejected() {
        let mut r = rec(Algorithm::Ja, Some(1.0));
        r.best_cost = Some(13.0);
        assert!(r.check().is_err());
        r.best_cost = None;
        assert!(r.check().is_err());
    }
}
