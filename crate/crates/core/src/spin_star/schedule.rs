use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

pub const SCHEDULE_CSV_HEADER: &str = "stage,type,duration_s,frequency_rad_s,amplitude_rad_s";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum StageKind {
    AncillaPi,
    FlipFlop,
    ProbeRotation,
    SoftPulse,
}

impl StageKind {
    pub fn name(self) -> &'static str {
        match self {
            StageKind::AncillaPi => "ancilla_pi",
            StageKind::FlipFlop => "flip_flop",
            StageKind::ProbeRotation => "probe_rotation",
            StageKind::SoftPulse => "soft_pulse",
        }
    }
}

impl fmt::Display for StageKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for StageKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        [
            StageKind::AncillaPi,
            StageKind::FlipFlop,
            StageKind::ProbeRotation,
            StageKind::SoftPulse,
        ]
        .into_iter()
        .find(|k| k.name() == s)
        .ok_or_else(|| format!("unknown stage type `{s}`"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScheduleRow {
    pub stage: usize,
    pub kind: StageKind,
    pub duration_s: f64,
    pub frequency_rad_s: f64,
    pub amplitude_rad_s: f64,
}

/// Ordered list of control stages.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Schedule {
    rows: Vec<ScheduleRow>,
}

impl Schedule {
    pub fn push(&mut self, row: ScheduleRow) {
        self.rows.push(row);
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn rows(&self) -> &[ScheduleRow] {
        &self.rows
    }

    pub fn total_duration(&self) -> f64 {
        self.rows.iter().map(|r| r.duration_s).sum()
    }

    /// Header line followed by one line per stage.
    pub fn to_csv(&self) -> String {
        let mut out = String::from(SCHEDULE_CSV_HEADER);
        out.push('\n');
        for r in &self.rows {
            out.push_str(&format!(
                "{},{},{:e},{:e},{:e}\n",
                r.stage, r.kind, r.duration_s, r.frequency_rad_s, r.amplitude_rad_s
            ));
        }
        out
    }

    /// Inverse of [`Schedule::to_csv`]; `#` lines and blank lines are skipped.
    pub fn from_csv(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
        match lines.next() {
            Some((_, SCHEDULE_CSV_HEADER)) => {}
            Some((line, _)) => return Err(parse_err(line, "unexpected header")),
            None => return Err(parse_err(0, "missing header")),
        }
        let mut schedule = Schedule::default();
        for (line, l) in lines {
            let cols: Vec<&str> = l.split(',').map(str::trim).collect();
            if cols.len() != 5 {
                return Err(parse_err(line, format!("expected 5 columns, found {}", cols.len())));
            }
            let stage: usize = cols[0].parse().map_err(|e| parse_err(line, format!("stage: {e}")))?;
            if stage != schedule.len() {
                return Err(parse_err(line, format!("stage {stage} out of order")));
            }
            let kind: StageKind = cols[1].parse().map_err(|e| parse_err(line, e))?;
            let num = |s: &str, what: &str| -> Result<f64> {
                let v: f64 = s.parse().map_err(|e| parse_err(line, format!("{what}: {e}")))?;
                if v.is_finite() {
                    Ok(v)
                } else {
                    Err(parse_err(line, format!("{what} is not finite")))
                }
            };
            let duration_s = num(cols[2], "duration")?;
            if duration_s < 0.0 {
                return Err(parse_err(line, "negative duration"));
            }
            schedule.push(ScheduleRow {
                stage,
                kind,
                duration_s,
                frequency_rad_s: num(cols[3], "frequency")?,
                amplitude_rad_s: num(cols[4], "amplitude")?,
            });
        }
        Ok(schedule)
    }
}

fn parse_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse { line, msg: msg.into() }
}
