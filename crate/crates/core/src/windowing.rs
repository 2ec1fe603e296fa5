//! Analysis time windows.
//!
//! Derived plans anchor at the first commit and advance in calendar months. A
//! span that would hold no commits is skipped: the next window starts at the
//! first commit after the gap instead of emitting empty windows.

use std::collections::BTreeMap;

use chrono::{DateTime, Months};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::repo_io::CommitRecord;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum WindowError {
    #[error("no commits to derive windows from")]
    EmptyHistory,
    #[error("window boundaries must be strictly increasing")]
    NonMonotonicBoundaries,
    #[error("at least two window boundaries are required, got {0}")]
    TooFewBoundaries(usize),
    #[error("window size must be a positive number of months")]
    ZeroWindowSize,
    #[error("timestamp {0} is outside the supported calendar range")]
    TimestampOutOfRange(i64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TimestampBasis {
    Author,
    Committer,
}

impl TimestampBasis {
    pub fn as_str(self) -> &'static str {
        match self {
            TimestampBasis::Author => "author",
            TimestampBasis::Committer => "committer",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TimeWindow {
    pub index: usize,
    pub start_ts: i64,
    pub end_ts: i64,
    #[serde(skip)]
    pub include_end: bool,
}

impl TimeWindow {
    pub fn contains(&self, ts: i64) -> bool {
        ts >= self.start_ts && (ts < self.end_ts || (self.include_end && ts == self.end_ts))
    }
}

/// Adds calendar months to a UTC instant, clamping the day of month.
pub fn add_months(ts: i64, months: u32) -> Result<i64, WindowError> {
    let dt = DateTime::from_timestamp(ts, 0).ok_or(WindowError::TimestampOutOfRange(ts))?;
    dt.checked_add_months(Months::new(months))
        .map(|d| d.timestamp())
        .ok_or(WindowError::TimestampOutOfRange(ts))
}

pub fn derive_windows(
    commits: &[CommitRecord],
    window_months: u32,
    basis: TimestampBasis,
    include_end: bool,
) -> Result<Vec<TimeWindow>, WindowError> {
    let mut ts: Vec<i64> = commits.iter().map(|c| c.ts(basis)).collect();
    derive_windows_from_timestamps(&mut ts, window_months, include_end)
}

pub fn derive_windows_from_timestamps(
    ts: &mut [i64],
    window_months: u32,
    include_end: bool,
) -> Result<Vec<TimeWindow>, WindowError> {
    if window_months == 0 {
        return Err(WindowError::ZeroWindowSize);
    }
    if ts.is_empty() {
        return Err(WindowError::EmptyHistory);
    }
    ts.sort_unstable();
    let inside = |t: i64, end: i64| t < end || (include_end && t == end);

    let mut windows = Vec::new();
    let mut start = ts[0];
    let mut pos = 0;
    loop {
        let end = add_months(start, window_months)?;
        while pos < ts.len() && inside(ts[pos], end) {
            pos += 1;
        }
        windows.push(TimeWindow {
            index: windows.len(),
            start_ts: start,
            end_ts: end,
            include_end,
        });
        if pos == ts.len() {
            break;
        }
        let next_end = add_months(end, window_months)?;
        start = if inside(ts[pos], next_end) {
            end
        } else {
            ts[pos]
        };
    }
    Ok(windows)
}

/// Window `i` spans `[boundaries[i], boundaries[i + 1])`, closed on the right
/// when `include_end` is set.
pub fn explicit_windows(
    boundaries: &[i64],
    include_end: bool,
) -> Result<Vec<TimeWindow>, WindowError> {
    if boundaries.len() < 2 {
        return Err(WindowError::TooFewBoundaries(boundaries.len()));
    }
    if boundaries.windows(2).any(|w| w[0] >= w[1]) {
        return Err(WindowError::NonMonotonicBoundaries);
    }
    Ok(boundaries
        .windows(2)
        .enumerate()
        .map(|(index, w)| TimeWindow {
            index,
            start_ts: w[0],
            end_ts: w[1],
            include_end,
        })
        .collect())
}

#[derive(Debug, Clone, Default)]
pub struct Assignment<'a> {
    /// One bucket per window index, possibly empty.
    pub buckets: BTreeMap<usize, Vec<&'a CommitRecord>>,
    pub unassigned: Vec<&'a CommitRecord>,
}

impl<'a> Assignment<'a> {
    pub fn window_of(&self, hash: &str) -> Option<usize> {
        self.buckets
            .iter()
            .find(|(_, cs)| cs.iter().any(|c| c.hash == hash))
            .map(|(i, _)| *i)
    }
}

/// Places each commit in the earliest window containing its basis timestamp.
pub fn assign_commits<'a>(
    commits: &'a [CommitRecord],
    windows: &[TimeWindow],
    basis: TimestampBasis,
) -> Assignment<'a> {
    let mut out = Assignment {
        buckets: windows.iter().map(|w| (w.index, Vec::new())).collect(),
        unassigned: Vec::new(),
    };
    for c in commits {
        match window_for(windows, c.ts(basis)) {
            Some(i) => out.buckets.entry(i).or_default().push(c),
            None => out.unassigned.push(c),
        }
    }
    out
}

pub fn window_for(windows: &[TimeWindow], ts: i64) -> Option<usize> {
    // windows are ordered; the first one whose end is not before ts is the only candidate
    let first = windows.partition_point(|w| w.end_ts < ts);
    windows[first..]
        .iter()
        .take(2)
        .find(|w| w.contains(ts))
        .map(|w| w.index)
}
