//! Annealing schedules: construction, validation, cost, and the text file
//! format.
//!
//! A schedule is a list of `(temperature, repetitions)` entries with
//! nonincreasing temperatures, terminated by `(0, 0)`. Temperature bounds
//! the index distance between compare-exchange partners; repetitions is the
//! number of partner draws per position per pass.
//!
//! All logarithms here are base 2.

use std::fmt;
use std::io::{BufRead, Write};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default repetitions for the practical preset, frozen from the
/// calibration sweep in `examples/calibrate.rs`.
pub const PRACTICAL_REPETITIONS: u64 = 4;
/// Default minimum length of the `(1, 1)` tail of the practical preset.
pub const PRACTICAL_TAIL_ROUNDS: u64 = 0;

/// Region-size constant used by the Phase 2 analysis (`64 e^2`). Kept
/// separate from [`ScheduleParams::g`], which only shapes the schedule.
pub const ANALYSIS_REGION_CONSTANT: f64 = 64.0 * std::f64::consts::E * std::f64::consts::E;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScheduleEntry {
    pub temperature: u64,
    pub repetitions: u64,
}

impl ScheduleEntry {
    pub const TERMINATOR: ScheduleEntry = ScheduleEntry {
        temperature: 0,
        repetitions: 0,
    };

    pub fn new(temperature: u64, repetitions: u64) -> Self {
        Self {
            temperature,
            repetitions,
        }
    }

    pub fn is_terminator(&self) -> bool {
        self.temperature == 0
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Provenance {
    Theoretical,
    Practical,
    Custom,
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Provenance::Theoretical => "theoretical",
            Provenance::Practical => "practical",
            Provenance::Custom => "custom",
        })
    }
}

/// First problem found by [`AnnealingSchedule::validate`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ScheduleViolation {
    Empty,
    MissingTerminator,
    /// Entry `index` (0-based) has a higher temperature than its predecessor.
    NonMonotone {
        index: usize,
    },
    /// Entry `index` has temperature 0 before the end, or nonzero repetitions
    /// on the terminator.
    MalformedTerminator {
        index: usize,
    },
    /// Entry `index` has `T >= 1` but zero repetitions.
    ZeroRepetitions {
        index: usize,
    },
}

impl fmt::Display for ScheduleViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ScheduleViolation::Empty => write!(f, "schedule has no entries"),
            ScheduleViolation::MissingTerminator => {
                write!(f, "missing terminator: last entry must be (0, 0)")
            }
            ScheduleViolation::NonMonotone { index } => {
                write!(f, "non-monotone temperatures at entry {}", index + 1)
            }
            ScheduleViolation::MalformedTerminator { index } => {
                write!(
                    f,
                    "misplaced or malformed terminator at entry {}",
                    index + 1
                )
            }
            ScheduleViolation::ZeroRepetitions { index } => {
                write!(f, "zero repetitions at entry {}", index + 1)
            }
        }
    }
}

impl std::error::Error for ScheduleViolation {}

/// Constants of the three-phase schedule.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScheduleParams {
    /// Phase 1 floor: Phase 1 stops at `q * log^6 n`.
    pub q: f64,
    /// Phase 1 repetitions (rounded up).
    pub c: f64,
    /// Phase 2 stops at `g * log n`; Phase 3 has `g * log n` entries.
    pub g: f64,
    /// Phase 2 repetitions are `h * log n / log log n`.
    pub h: f64,
}

impl Default for ScheduleParams {
    fn default() -> Self {
        Self {
            q: 1.0,
            c: 10.0,
            g: 1.0,
            h: 1.0,
        }
    }
}

impl ScheduleParams {
    fn check(&self) -> Result<()> {
        let ok = self.q >= 1.0 && self.c > 1.0 && self.g >= 1.0 && self.h >= 1.0;
        let finite = [self.q, self.c, self.g, self.h]
            .iter()
            .all(|v| v.is_finite());
        if ok && finite {
            Ok(())
        } else {
            Err(Error::InvalidParameter(format!(
                "schedule params need q >= 1, c > 1, g >= 1, h >= 1; got {self:?}"
            )))
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnnealingSchedule {
    entries: Vec<ScheduleEntry>,
    provenance: Provenance,
}

impl AnnealingSchedule {
    /// Builds a schedule and validates it.
    pub fn new(entries: Vec<ScheduleEntry>, provenance: Provenance) -> Result<Self> {
        let schedule = Self {
            entries,
            provenance,
        };
        schedule.validate().map_err(Error::InvalidSchedule)?;
        Ok(schedule)
    }

    /// A schedule that only holds the terminator.
    pub fn terminator_only() -> Self {
        Self {
            entries: vec![ScheduleEntry::TERMINATOR],
            provenance: Provenance::Custom,
        }
    }

    /// Wraps entries without validating them; [`validate`](Self::validate)
    /// reports the problems.
    pub fn unchecked(entries: Vec<ScheduleEntry>) -> Self {
        Self {
            entries,
            provenance: Provenance::Custom,
        }
    }

    pub fn entries(&self) -> &[ScheduleEntry] {
        &self.entries
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    /// Entries with `T >= 1`, in order.
    pub fn active(&self) -> impl Iterator<Item = &ScheduleEntry> {
        self.entries.iter().filter(|e| e.temperature >= 1)
    }

    pub fn total_repetitions(&self) -> u64 {
        self.active().map(|e| e.repetitions).sum()
    }

    /// Returns the first violation, checking entries front to back.
    pub fn validate(&self) -> std::result::Result<(), ScheduleViolation> {
        let Some(last) = self.entries.last() else {
            return Err(ScheduleViolation::Empty);
        };
        let last_index = self.entries.len() - 1;
        for (index, entry) in self.entries.iter().enumerate() {
            if index > 0 && entry.temperature > self.entries[index - 1].temperature {
                return Err(ScheduleViolation::NonMonotone { index });
            }
            if entry.temperature == 0 {
                if index != last_index || entry.repetitions != 0 {
                    return Err(ScheduleViolation::MalformedTerminator { index });
                }
            } else if entry.repetitions == 0 {
                return Err(ScheduleViolation::ZeroRepetitions { index });
            }
        }
        if !last.is_terminator() {
            return Err(ScheduleViolation::MissingTerminator);
        }
        Ok(())
    }

    /// Exact compare-exchange count of annealing sort on `n` elements.
    pub fn cost(&self, n: usize) -> u64 {
        if n < 2 {
            return 0;
        }
        2 * (n as u64 - 1) * self.total_repetitions()
    }

    /// Reads the text format: one `T r` pair per line, `#` starts a comment,
    /// blank lines are ignored.
    pub fn read<R: BufRead>(reader: R) -> Result<Self> {
        let mut entries = Vec::new();
        for (index, line) in reader.lines().enumerate() {
            let line = line?;
            let content = line.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let parse_err = |message: String| Error::Parse {
                line: index + 1,
                message,
            };
            let fields: Vec<&str> = content.split_whitespace().collect();
            if fields.len() != 2 {
                return Err(parse_err(format!("expected \"T r\", got {content:?}")));
            }
            let parse = |s: &str| u64::from_str(s).map_err(|e| parse_err(format!("{s:?}: {e}")));
            entries.push(ScheduleEntry::new(parse(fields[0])?, parse(fields[1])?));
        }
        Self::new(entries, Provenance::Custom)
    }

    pub fn write<W: Write>(&self, mut writer: W) -> Result<()> {
        writeln!(writer, "# {} annealing schedule: T r", self.provenance)?;
        for entry in &self.entries {
            writeln!(writer, "{} {}", entry.temperature, entry.repetitions)?;
        }
        Ok(())
    }
}

pub fn schedule_cost(schedule: &AnnealingSchedule, n: usize) -> u64 {
    schedule.cost(n)
}

pub fn validate(schedule: &AnnealingSchedule) -> std::result::Result<(), ScheduleViolation> {
    schedule.validate()
}

fn log2(n: usize) -> f64 {
    (n as f64).log2()
}

fn ceil_u64(x: f64) -> u64 {
    x.ceil() as u64
}

/// The three-phase schedule with the given constants.
///
/// Phase 1 halves from `2n`, each temperature twice, down to the floor
/// `q log^6 n`; Phase 2 halves from the floor to `g log n` with
/// `h log n / log log n` repetitions; Phase 3 is `g log n` entries of
/// `(1, 1)`. When the floor reaches `2n`, Phases 1 and 2 are empty.
pub fn theoretical_schedule(n: usize, params: ScheduleParams) -> Result<AnnealingSchedule> {
    if n < 2 {
        return Err(Error::TooShort { len: n, min: 2 });
    }
    params.check()?;
    let log_n = log2(n);
    let floor = params.q * log_n.powi(6);
    let two_n = 2 * n as u64;
    let mut entries = Vec::new();

    if floor < two_n as f64 {
        let phase1_reps = ceil_u64(params.c);
        let mut t = two_n;
        while t as f64 > floor {
            entries.push(ScheduleEntry::new(t, phase1_reps));
            entries.push(ScheduleEntry::new(t, phase1_reps));
            t = t.div_ceil(2);
        }
        let floor_t = ceil_u64(floor);
        if entries.last().is_some_and(|e| floor_t < e.temperature) {
            entries.push(ScheduleEntry::new(floor_t, phase1_reps));
            entries.push(ScheduleEntry::new(floor_t, phase1_reps));
        }

        let phase2_reps = ceil_u64(params.h * log_n / log_n.log2().max(1.0)).max(1);
        let stop = params.g * log_n;
        let mut halvings = 0i32;
        loop {
            let t = ceil_u64(floor / 2f64.powi(halvings)).max(1);
            entries.push(ScheduleEntry::new(t, phase2_reps));
            if t as f64 <= stop {
                break;
            }
            halvings += 1;
        }
    }

    let phase3_len = ceil_u64(params.g * log_n);
    entries.extend(std::iter::repeat_n(
        ScheduleEntry::new(1, 1),
        phase3_len as usize,
    ));
    entries.push(ScheduleEntry::TERMINATOR);
    AnnealingSchedule::new(entries, Provenance::Theoretical)
}

/// A short schedule for desk-scale use: temperatures `n, ceil(n/2), ..., 2`
/// with `repetitions` each, then `max(tail_rounds, ceil(log n))` entries of
/// `(1, 1)`.
pub fn practical_schedule(
    n: usize,
    repetitions: u64,
    tail_rounds: u64,
) -> Result<AnnealingSchedule> {
    if n < 2 {
        return Err(Error::TooShort { len: n, min: 2 });
    }
    if repetitions < 1 {
        return Err(Error::InvalidParameter(
            "practical schedule needs at least one repetition".into(),
        ));
    }
    let mut entries = Vec::new();
    let mut t = n as u64;
    while t >= 2 {
        entries.push(ScheduleEntry::new(t, repetitions));
        if t == 2 {
            break;
        }
        t = t.div_ceil(2);
    }
    let ceil_log = (n as u64).next_power_of_two().trailing_zeros() as u64;
    let tail = tail_rounds.max(ceil_log);
    entries.extend(std::iter::repeat_n(ScheduleEntry::new(1, 1), tail as usize));
    entries.push(ScheduleEntry::TERMINATOR);
    AnnealingSchedule::new(entries, Provenance::Practical)
}

/// The practical schedule with the calibrated defaults.
pub fn practical_preset(n: usize) -> Result<AnnealingSchedule> {
    practical_schedule(n, PRACTICAL_REPETITIONS, PRACTICAL_TAIL_ROUNDS)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sched(pairs: &[(u64, u64)]) -> AnnealingSchedule {
        AnnealingSchedule::unchecked(
            pairs
                .iter()
                .map(|&(t, r)| ScheduleEntry::new(t, r))
                .collect(),
        )
    }

    fn temps(s: &AnnealingSchedule) -> Vec<u64> {
        s.entries().iter().map(|e| e.temperature).collect()
    }

    #[test]
    fn validate_examples() {
        assert_eq!(sched(&[(4, 1), (2, 1), (0, 0)]).validate(), Ok(()));
        assert_eq!(
            sched(&[(2, 1), (4, 1), (0, 0)]).validate(),
            Err(ScheduleViolation::NonMonotone { index: 1 })
        );
        assert_eq!(
            sched(&[(4, 1), (2, 1)]).validate(),
            Err(ScheduleViolation::MissingTerminator)
        );
        assert_eq!(sched(&[]).validate(), Err(ScheduleViolation::Empty));
        assert_eq!(
            sched(&[(4, 0), (0, 0)]).validate(),
            Err(ScheduleViolation::ZeroRepetitions { index: 0 })
        );
        assert_eq!(
            sched(&[(4, 1), (0, 0), (0, 0)]).validate(),
            Err(ScheduleViolation::MalformedTerminator { index: 1 })
        );
        assert_eq!(
            sched(&[(4, 1), (0, 3)]).validate(),
            Err(ScheduleViolation::MalformedTerminator { index: 1 })
        );
    }

    #[test]
    fn practical_n16() {
        let s = practical_schedule(16, 4, 8).unwrap();
        let expected: Vec<(u64, u64)> = [(16, 4), (8, 4), (4, 4), (2, 4)]
            .into_iter()
            .chain(std::iter::repeat_n((1, 1), 8))
            .chain([(0, 0)])
            .collect();
        let got: Vec<(u64, u64)> = s
            .entries()
            .iter()
            .map(|e| (e.temperature, e.repetitions))
            .collect();
        assert_eq!(got, expected);
        assert_eq!(s.total_repetitions(), 24);
        assert_eq!(schedule_cost(&s, 16), 720);
        assert_eq!(s.provenance(), Provenance::Practical);
    }

    #[test]
    fn practical_smallest() {
        let s = practical_schedule(2, 3, 2).unwrap();
        assert_eq!(temps(&s), vec![2, 1, 1, 0]);
        let s = practical_schedule(2, 3, 0).unwrap();
        assert_eq!(temps(&s), vec![2, 1, 0]);
    }

    #[test]
    fn practical_odd_sizes_halve_by_ceiling() {
        let s = practical_schedule(10, 1, 0).unwrap();
        assert_eq!(temps(&s), vec![10, 5, 3, 2, 1, 1, 1, 1, 0]);
        assert!(practical_schedule(1, 1, 0).is_err());
        assert!(practical_schedule(8, 0, 0).is_err());
    }

    #[test]
    fn terminator_costs_nothing() {
        assert_eq!(AnnealingSchedule::terminator_only().cost(100), 0);
    }

    #[test]
    fn theoretical_collapses_at_desk_scale() {
        // 20^6 = 64_000_000 > 2n = 2_097_152.
        let s = theoretical_schedule(1 << 20, ScheduleParams::default()).unwrap();
        let e = s.entries();
        assert_eq!(e.len(), 21);
        assert!(e[..20].iter().all(|x| *x == ScheduleEntry::new(1, 1)));
        assert_eq!(e[20], ScheduleEntry::TERMINATOR);
    }

    #[test]
    fn theoretical_phase1_present_at_2_pow_30() {
        // 30^6 = 729_000_000 < 2n = 2_147_483_648.
        let n = 1usize << 30;
        let s = theoretical_schedule(n, ScheduleParams::default()).unwrap();
        let e = s.entries();
        let two_n = 2 * n as u64;
        assert_eq!(e[0], ScheduleEntry::new(two_n, 10));
        assert_eq!(e[1], ScheduleEntry::new(two_n, 10));
        assert_eq!(e[2].temperature, n as u64);
        assert_eq!(e[3].temperature, n as u64);
        // 2n, 2n, n, n, then the floor twice.
        assert_eq!(e[4], ScheduleEntry::new(729_000_000, 10));
        assert_eq!(e[5], ScheduleEntry::new(729_000_000, 10));
        // Phase 2 starts at the floor; r = ceil(30 / log2 30) = 7.
        assert_eq!(e[6], ScheduleEntry::new(729_000_000, 7));
        let phase2: Vec<u64> = e
            .iter()
            .filter(|x| x.repetitions == 7)
            .map(|x| x.temperature)
            .collect();
        assert!(*phase2.last().unwrap() as f64 <= 30.0);
        assert!(phase2[phase2.len() - 2] > 30);
        let phase3 = e.iter().filter(|x| **x == ScheduleEntry::new(1, 1)).count();
        assert_eq!(phase3, 30);
        assert_eq!(*e.last().unwrap(), ScheduleEntry::TERMINATOR);
    }

    #[test]
    fn theoretical_small_n() {
        let s = theoretical_schedule(2, ScheduleParams::default()).unwrap();
        assert_eq!(temps(&s), vec![4, 4, 2, 2, 1, 1, 1, 1, 0]);
        assert!(theoretical_schedule(1, ScheduleParams::default()).is_err());
        let bad = ScheduleParams {
            c: 1.0,
            ..Default::default()
        };
        assert!(theoretical_schedule(8, bad).is_err());
    }

    #[test]
    fn file_format_round_trip() {
        let s = practical_schedule(16, 4, 8).unwrap();
        let mut buf = Vec::new();
        s.write(&mut buf).unwrap();
        let back = AnnealingSchedule::read(&buf[..]).unwrap();
        assert_eq!(back.entries(), s.entries());
    }

    #[test]
    fn file_format_errors() {
        let text = "# comment\n8 2  # trailing\n\n4 1\n0 0\n";
        let s = AnnealingSchedule::read(text.as_bytes()).unwrap();
        assert_eq!(temps(&s), vec![8, 4, 0]);
        assert!(matches!(
            AnnealingSchedule::read("8 x\n0 0\n".as_bytes()),
            Err(Error::Parse { line: 1, .. })
        ));
        assert!(matches!(
            AnnealingSchedule::read("8 1 1\n".as_bytes()),
            Err(Error::Parse { line: 1, .. })
        ));
        assert!(matches!(
            AnnealingSchedule::read("8 1\n".as_bytes()),
            Err(Error::InvalidSchedule(ScheduleViolation::MissingTerminator))
        ));
    }
}
