//! CSV contract. Column order is fixed; empty cells mean "not applicable".
//! Every column except `wall_time_s` is a deterministic function of the
//! experiment file and seed.

use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

pub const COLUMNS: [&str; 16] = [
    "job",
    "scenario",
    "engine",
    "metric",
    "rate",
    "sigma_l2_db",
    "lambda",
    "m",
    "p_2n",
    "p_u",
    "value",
    "std_error",
    "error_bound",
    "n_realizations",
    "seed",
    "wall_time_s",
];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Row {
    pub job: String,
    pub scenario: String,
    pub engine: String,
    pub metric: String,
    pub rate: Option<f64>,
    pub sigma_l2_db: Option<f64>,
    pub lambda: Option<f64>,
    pub m: Option<u32>,
    pub p_2n: Option<f64>,
    pub p_u: Option<f64>,
    pub value: f64,
    pub std_error: Option<f64>,
    pub error_bound: Option<f64>,
    pub n_realizations: Option<u64>,
    pub seed: Option<u64>,
    pub wall_time_s: f64,
}

impl Row {
    /// Equality on everything but wall time, with floats compared bitwise.
    pub fn same_content(&self, other: &Row) -> bool {
        let bits = |a: Option<f64>, b: Option<f64>| a.map(f64::to_bits) == b.map(f64::to_bits);
        self.job == other.job
            && self.scenario == other.scenario
            && self.engine == other.engine
            && self.metric == other.metric
            && bits(self.rate, other.rate)
            && bits(self.sigma_l2_db, other.sigma_l2_db)
            && bits(self.lambda, other.lambda)
            && self.m == other.m
            && bits(self.p_2n, other.p_2n)
            && bits(self.p_u, other.p_u)
            && self.value.to_bits() == other.value.to_bits()
            && bits(self.std_error, other.std_error)
            && bits(self.error_bound, other.error_bound)
            && self.n_realizations == other.n_realizations
            && self.seed == other.seed
    }
}

pub fn write_rows<W: Write>(out: W, rows: &[Row]) -> csv::Result<()> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(out);
    w.write_record(COLUMNS)?;
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_rows_to_path(path: &Path, rows: &[Row]) -> csv::Result<()> {
    write_rows(std::fs::File::create(path)?, rows)
}

/// Reads rows written by [`write_rows`], rejecting files whose header
/// differs from [`COLUMNS`].
pub fn read_rows<R: Read>(input: R) -> csv::Result<Vec<Row>> {
    let mut r = csv::Reader::from_reader(input);
    let header = r.headers()?.clone();
    if header.iter().ne(COLUMNS) {
        return Err(csv::Error::from(std::io::Error::new(
            std::io::ErrorKind::InvalidData,
            format!("unexpected CSV header: {}", header.iter().collect::<Vec<_>>().join(",")),
        )));
    }
    r.deserialize().collect()
}

pub fn read_rows_from_path(path: &Path) -> csv::Result<Vec<Row>> {
    read_rows(std::fs::File::open(path)?)
}
