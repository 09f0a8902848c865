use std::collections::BTreeMap;
use std::io::{Read, Write};

use thiserror::Error;

use crate::geometry::Pose2;

/// Header of the columnar attainment table file.
pub const TABLE_HEADER: &str = "sequence_id,waypoint_id,round,frame_id,timestamp,x,y,theta";

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TableError {
    #[error("round {round} for {sequence_id}/{waypoint_id} outside [0, {rounds}]")]
    RoundOutOfRange {
        sequence_id: String,
        waypoint_id: String,
        round: u32,
        rounds: u32,
    },
    #[error("duplicate attainment for {sequence_id}/{waypoint_id} round {round}")]
    Conflict {
        sequence_id: String,
        waypoint_id: String,
        round: u32,
    },
    #[error("records of {sequence_id}/{waypoint_id} mix frames `{first}` and `{second}`")]
    FrameMismatch {
        sequence_id: String,
        waypoint_id: String,
        first: String,
        second: String,
    },
    #[error("table row {row}: {message}")]
    Parse { row: usize, message: String },
    #[error("table i/o: {0}")]
    Io(String),
}

/// One measured pose at one (sequence, waypoint, round).
///
/// `pose == None` records a failed attainment. Round 0 is the priming round
/// and is excluded from evaluation.
#[derive(Debug, Clone, PartialEq)]
pub struct AttainmentRecord {
    pub sequence_id: String,
    pub waypoint_id: String,
    pub round: u32,
    pub frame_id: String,
    pub timestamp: f64,
    pub pose: Option<Pose2<f64>>,
}

impl AttainmentRecord {
    pub fn success(
        sequence_id: impl Into<String>,
        waypoint_id: impl Into<String>,
        round: u32,
        frame_id: impl Into<String>,
        timestamp: f64,
        pose: Pose2<f64>,
    ) -> Self {
        AttainmentRecord {
            sequence_id: sequence_id.into(),
            waypoint_id: waypoint_id.into(),
            round,
            frame_id: frame_id.into(),
            timestamp,
            pose: Some(pose),
        }
    }

    pub fn failure(
        sequence_id: impl Into<String>,
        waypoint_id: impl Into<String>,
        round: u32,
        frame_id: impl Into<String>,
        timestamp: f64,
    ) -> Self {
        AttainmentRecord {
            sequence_id: sequence_id.into(),
            waypoint_id: waypoint_id.into(),
            round,
            frame_id: frame_id.into(),
            timestamp,
            pose: None,
        }
    }

    pub fn is_excluded(&self) -> bool {
        self.round == 0
    }

    pub fn is_success(&self) -> bool {
        self.pose.is_some()
    }

    /// Successful and inside the evaluated rounds.
    pub fn counts(&self) -> bool {
        self.is_success() && !self.is_excluded()
    }
}

/// All records of one waypoint, kept sorted by round.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Cell {
    records: Vec<AttainmentRecord>,
    successes: u32,
}

impl Cell {
    pub fn records(&self) -> &[AttainmentRecord] {
        &self.records
    }

    /// Successful evaluated rounds (M_ki).
    pub fn success_count(&self) -> u32 {
        self.successes
    }

    /// Successful records of rounds 1..=M.
    pub fn evaluated(&self) -> impl Iterator<Item = &AttainmentRecord> {
        self.records.iter().filter(|r| r.counts())
    }

    /// Frame shared by the evaluated records, or `None` when there are none.
    pub fn frame_id(&self) -> Result<Option<&str>, TableError> {
        let mut frame: Option<&AttainmentRecord> = None;
        for r in self.evaluated() {
            match frame {
                None => frame = Some(r),
                Some(f) if f.frame_id != r.frame_id => {
                    return Err(TableError::FrameMismatch {
                        sequence_id: r.sequence_id.clone(),
                        waypoint_id: r.waypoint_id.clone(),
                        first: f.frame_id.clone(),
                        second: r.frame_id.clone(),
                    })
                }
                Some(_) => {}
            }
        }
        Ok(frame.map(|r| r.frame_id.as_str()))
    }
}

/// Attainment records keyed by `(sequence_id, waypoint_id)`.
#[derive(Debug, Clone, PartialEq)]
pub struct AttainmentTable {
    rounds: u32,
    cells: BTreeMap<(String, String), Cell>,
}

impl AttainmentTable {
    pub fn new(rounds: u32) -> Self {
        AttainmentTable {
            rounds,
            cells: BTreeMap::new(),
        }
    }

    /// Number of evaluated rounds M.
    pub fn rounds(&self) -> u32 {
        self.rounds
    }

    /// Makes a waypoint known to the table even if it never gets a record.
    pub fn register_waypoint(&mut self, sequence_id: &str, waypoint_id: &str) {
        self.cells
            .entry((sequence_id.to_string(), waypoint_id.to_string()))
            .or_default();
    }

    pub fn cell(&self, sequence_id: &str, waypoint_id: &str) -> Option<&Cell> {
        self.cells
            .get(&(sequence_id.to_string(), waypoint_id.to_string()))
    }

    pub fn cells(&self) -> impl Iterator<Item = (&str, &str, &Cell)> {
        self.cells
            .iter()
            .map(|((s, w), c)| (s.as_str(), w.as_str(), c))
    }

    pub fn cells_mut(&mut self) -> impl Iterator<Item = (&(String, String), &mut Cell)> {
        self.cells.iter_mut()
    }

    pub fn records(&self) -> impl Iterator<Item = &AttainmentRecord> {
        self.cells.values().flat_map(|c| c.records.iter())
    }

    pub fn success_count(&self, sequence_id: &str, waypoint_id: &str) -> u32 {
        self.cell(sequence_id, waypoint_id)
            .map_or(0, Cell::success_count)
    }

    /// Waypoint count per sequence (N_k).
    pub fn sequence_sizes(&self) -> BTreeMap<&str, usize> {
        let mut sizes = BTreeMap::new();
        for (s, _) in self.cells.keys() {
            *sizes.entry(s.as_str()).or_insert(0) += 1;
        }
        sizes
    }

    pub fn insert(&mut self, record: AttainmentRecord) -> Result<(), TableError> {
        if record.round > self.rounds {
            return Err(TableError::RoundOutOfRange {
                sequence_id: record.sequence_id,
                waypoint_id: record.waypoint_id,
                round: record.round,
                rounds: self.rounds,
            });
        }
        let cell = self
            .cells
            .entry((record.sequence_id.clone(), record.waypoint_id.clone()))
            .or_default();
        let pos = match cell
            .records
            .binary_search_by_key(&record.round, |r| r.round)
        {
            Ok(_) => {
                return Err(TableError::Conflict {
                    sequence_id: record.sequence_id,
                    waypoint_id: record.waypoint_id,
                    round: record.round,
                })
            }
            Err(pos) => pos,
        };
        if record.counts() {
            cell.successes += 1;
        }
        cell.records.insert(pos, record);
        Ok(())
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<(), TableError> {
        let mut w = csv::Writer::from_writer(out);
        let io = |e: csv::Error| TableError::Io(e.to_string());
        w.write_record(TABLE_HEADER.split(',')).map_err(io)?;
        for r in self.records() {
            let (x, y, theta) = match &r.pose {
                Some(p) => (p.x.to_string(), p.y.to_string(), p.heading().to_string()),
                None => (String::new(), String::new(), String::new()),
            };
            w.write_record([
                r.sequence_id.as_str(),
                r.waypoint_id.as_str(),
                &r.round.to_string(),
                r.frame_id.as_str(),
                &r.timestamp.to_string(),
                &x,
                &y,
                &theta,
            ])
            .map_err(io)?;
        }
        w.flush().map_err(|e| TableError::Io(e.to_string()))
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("utf-8 table")
    }

    /// Reads a table file. `rounds` defaults to the largest round present.
    pub fn read_csv<R: Read>(input: R, rounds: Option<u32>) -> Result<Self, TableError> {
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(true)
            .trim(csv::Trim::All)
            .from_reader(input);
        let headers = rdr
            .headers()
            .map_err(|e| TableError::Parse {
                row: 0,
                message: e.to_string(),
            })?
            .iter()
            .collect::<Vec<_>>()
            .join(",");
        if headers != TABLE_HEADER {
            return Err(TableError::Parse {
                row: 0,
                message: format!("expected header `{TABLE_HEADER}`, got `{headers}`"),
            });
        }
        let mut records = Vec::new();
        for (i, row) in rdr.records().enumerate() {
            let row_no = i + 1;
            let err = |message: String| TableError::Parse {
                row: row_no,
                message,
            };
            let row = row.map_err(|e| err(e.to_string()))?;
            if row.len() != 8 {
                return Err(err(format!("expected 8 fields, got {}", row.len())));
            }
            let num = |idx: usize, name: &str| -> Result<f64, TableError> {
                let v: f64 = row[idx]
                    .parse()
                    .map_err(|_| err(format!("{name}: `{}` is not a number", &row[idx])))?;
                if !v.is_finite() {
                    return Err(err(format!("{name} must be finite")));
                }
                Ok(v)
            };
            let round: u32 = row[2].parse().map_err(|_| {
                err(format!(
                    "round: `{}` is not a non-negative integer",
                    &row[2]
                ))
            })?;
            let timestamp = num(4, "timestamp")?;
            let pose = if row[5].is_empty() && row[6].is_empty() && row[7].is_empty() {
                None
            } else {
                Some(Pose2::new(num(5, "x")?, num(6, "y")?, num(7, "theta")?))
            };
            records.push(AttainmentRecord {
                sequence_id: row[0].to_string(),
                waypoint_id: row[1].to_string(),
                round,
                frame_id: row[3].to_string(),
                timestamp,
                pose,
            });
        }
        let rounds = rounds.unwrap_or_else(|| records.iter().map(|r| r.round).max().unwrap_or(0));
        let mut table = AttainmentTable::new(rounds);
        for (i, r) in records.into_iter().enumerate() {
            table.insert(r).map_err(|e| TableError::Parse {
                row: i + 1,
                message: e.to_string(),
            })?;
        }
        Ok(table)
    }
}

/// Adds `record` to `table`; a success in rounds `1..=M` increments M_ki.
pub fn mark_attainment(
    mut table: AttainmentTable,
    record: AttainmentRecord,
) -> Result<AttainmentTable, TableError> {
    table.insert(record)?;
    Ok(table)
}
