//! CSV sensor logs. Headers are fixed and mandatory; floats are written in their shortest
//! round-trip form, so re-emitting a parsed IMU or GNSS file reproduces it byte for byte.
//! Truth attitude is stored as a matrix, so its quaternion survives a round trip to ~1 ulp.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use crate::ins::InsState;
use crate::lie::{So3, Vec3};
use crate::sim::{GnssSample, ImuSample, SensorLog, TruthSample};

pub const IMU_HEADER: [&str; 7] = ["t", "wx", "wy", "wz", "ax", "ay", "az"];
pub const GNSS_HEADER: [&str; 4] = ["t", "px", "py", "pz"];
/// Attitude as a unit quaternion, scalar first.
pub const TRUTH_HEADER: [&str; 17] =
    ["t", "qw", "qx", "qy", "qz", "vx", "vy", "vz", "px", "py", "pz", "bwx", "bwy", "bwz", "bax", "bay", "baz"];

pub const IMU_FILE: &str = "imu.csv";
pub const GNSS_FILE: &str = "gnss.csv";
pub const TRUTH_FILE: &str = "truth.csv";

#[derive(Debug, thiserror::Error)]
pub enum DataError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}:{line}: {message}")]
    Parse { path: PathBuf, line: u64, message: String },
    #[error("{0}")]
    Invalid(String),
}

impl DataError {
    fn parse(path: &Path, line: u64, message: impl Into<String>) -> Self {
        DataError::Parse { path: path.to_path_buf(), line, message: message.into() }
    }
}

/// Shortest representation that parses back to the same value.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:?}")
}

/// Writes a header and rows through one buffered writer.
pub fn write_table<I, R>(path: &Path, header: &[&str], rows: I) -> Result<(), DataError>
where
    I: IntoIterator<Item = R>,
    R: IntoIterator<Item = String>,
{
    let io = |source| DataError::Io { path: path.to_path_buf(), source };
    let file = File::create(path).map_err(io)?;
    let mut w = csv::Writer::from_writer(BufWriter::new(file));
    let csv_err = |e: csv::Error| DataError::Invalid(format!("{}: {e}", path.display()));
    w.write_record(header).map_err(csv_err)?;
    for row in rows {
        w.write_record(row).map_err(csv_err)?;
    }
    w.into_inner().map_err(|e| DataError::Invalid(format!("{}: {e}", path.display())))?.flush().map_err(io)
}

/// Parses a numeric table whose header must equal `header`; returns `(line, values)` rows.
pub fn read_table(path: &Path, header: &[&str]) -> Result<Vec<(u64, Vec<f64>)>, DataError> {
    let file = File::open(path).map_err(|source| DataError::Io { path: path.to_path_buf(), source })?;
    let mut r = csv::ReaderBuilder::new().has_headers(true).from_reader(file);
    let got = r.headers().map_err(|e| DataError::parse(path, 1, e.to_string()))?.clone();
    if got.iter().ne(header.iter().copied()) {
        return Err(DataError::parse(
            path,
            1,
            format!("expected header '{}', found '{}'", header.join(","), got.iter().collect::<Vec<_>>().join(",")),
        ));
    }
    let mut out = Vec::new();
    for rec in r.records() {
        let rec = rec.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line());
            DataError::parse(path, line, e.to_string())
        })?;
        let line = rec.position().map_or(0, |p| p.line());
        let values = rec
            .iter()
            .enumerate()
            .map(|(i, f)| {
                let v: f64 =
                    f.trim().parse().map_err(|_| DataError::parse(path, line, format!("column '{}': '{f}' is not a number", header[i])))?;
                if v.is_finite() {
                    Ok(v)
                } else {
                    Err(DataError::parse(path, line, format!("column '{}' is not finite", header[i])))
                }
            })
            .collect::<Result<Vec<_>, _>>()?;
        out.push((line, values));
    }
    Ok(out)
}

fn v3(v: &[f64]) -> Vec3 {
    Vec3::new(v[0], v[1], v[2])
}

fn cells(vals: impl IntoIterator<Item = f64>) -> Vec<String> {
    vals.into_iter().map(fmt_f64).collect()
}

/// Truth row values after `t`, in [`TRUTH_HEADER`] order.
pub fn state_cells(x: &InsState) -> Vec<String> {
    let q = x.rot.to_quaternion();
    cells(
        q.into_iter()
            .chain(x.vel.iter().copied())
            .chain(x.pos.iter().copied())
            .chain(x.bias_gyro.iter().copied())
            .chain(x.bias_acc.iter().copied()),
    )
}

pub fn write_log(dir: &Path, log: &SensorLog) -> Result<(), DataError> {
    std::fs::create_dir_all(dir).map_err(|source| DataError::Io { path: dir.to_path_buf(), source })?;
    write_table(
        &dir.join(IMU_FILE),
        &IMU_HEADER,
        log.imu.iter().map(|s| cells([s.t, s.gyro.x, s.gyro.y, s.gyro.z, s.acc.x, s.acc.y, s.acc.z])),
    )?;
    write_table(&dir.join(GNSS_FILE), &GNSS_HEADER, log.gnss.iter().map(|s| cells([s.t, s.pos.x, s.pos.y, s.pos.z])))?;
    if !log.truth.is_empty() {
        write_table(
            &dir.join(TRUTH_FILE),
            &TRUTH_HEADER,
            log.truth.iter().map(|s| {
                let mut row = vec![fmt_f64(s.t)];
                row.extend(state_cells(&s.state));
                row
            }),
        )?;
    }
    Ok(())
}

/// Reads `imu.csv`, `gnss.csv` and, when present, `truth.csv` from `dir`.
pub fn read_log(dir: &Path) -> Result<SensorLog, DataError> {
    let imu = read_table(&dir.join(IMU_FILE), &IMU_HEADER)?
        .into_iter()
        .map(|(_, v)| ImuSample { t: v[0], gyro: v3(&v[1..4]), acc: v3(&v[4..7]) })
        .collect();
    let gnss =
        read_table(&dir.join(GNSS_FILE), &GNSS_HEADER)?.into_iter().map(|(_, v)| GnssSample { t: v[0], pos: v3(&v[1..4]) }).collect();
    let truth_path = dir.join(TRUTH_FILE);
    let truth = if truth_path.exists() {
        read_table(&truth_path, &TRUTH_HEADER)?
            .into_iter()
            .map(|(line, v)| {
                let n = (v[1] * v[1] + v[2] * v[2] + v[3] * v[3] + v[4] * v[4]).sqrt();
                if (n - 1.0).abs() > 1e-6 {
                    return Err(DataError::parse(&truth_path, line, format!("quaternion norm {n} is not 1")));
                }
                let state = InsState::new(
                    So3::from_quaternion(v[1], v[2], v[3], v[4]),
                    v3(&v[5..8]),
                    v3(&v[8..11]),
                    v3(&v[11..14]),
                    v3(&v[14..17]),
                );
                Ok(TruthSample { t: v[0], state })
            })
            .collect::<Result<Vec<_>, _>>()?
    } else {
        Vec::new()
    };
    let log = SensorLog { imu, gnss, truth };
    log.validate().map_err(|e| DataError::Invalid(format!("{}: {e}", dir.display())))?;
    Ok(log)
}
