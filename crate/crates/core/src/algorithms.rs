//! Spin-the-bottle sort, Annealing sort, and the baselines they are
//! measured against.
//!
//! Every sort takes an optional [`Trace`] recorder. For the data-oblivious
//! configurations (fixed-budget Spin-the-bottle and Annealing sort) the
//! recorded trace is a function of `(n, seed, parameters)` only.

use serde::{Deserialize, Serialize};

use crate::element::{gate, is_sorted, TaggedElement};
use crate::error::{Error, Result};
use crate::metrics::inversion_total;
use crate::rng::RngStream;
use crate::schedule::AnnealingSchedule;
use crate::trace::Trace;

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SortReport {
    pub n: usize,
    /// Compare-exchange operations performed by the algorithm.
    pub comparisons: u64,
    pub swaps: u64,
    pub rounds: u64,
    /// Comparisons spent on sortedness scans; not part of `comparisons`.
    pub scan_comparisons: u64,
    pub sorted: bool,
    pub initial_inversions: u64,
    pub final_inversions: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum TerminationMode {
    /// Scan for sortedness after every round; data dependent.
    CheckSorted,
    /// Run exactly this many rounds; data oblivious.
    FixedBudget(u64),
}

/// Counts of one pass or round.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct PassCounts {
    pub comparisons: u64,
    pub swaps: u64,
}

impl std::ops::AddAssign for PassCounts {
    fn add_assign(&mut self, rhs: Self) {
        self.comparisons += rhs.comparisons;
        self.swaps += rhs.swaps;
    }
}

/// Default round budget for oblivious Spin-the-bottle:
/// `ceil(4n + 2 n ln n)`.
pub fn default_spin_budget(n: usize) -> u64 {
    if n < 2 {
        return 0;
    }
    let n = n as f64;
    (4.0 * n + 2.0 * n * n.ln()).ceil() as u64
}

fn check_recorder(recorder: &Option<&mut Trace>, n: usize) -> Result<()> {
    match recorder {
        Some(trace) if trace.wires() != n => Err(Error::LengthMismatch {
            expected: trace.wires(),
            actual: n,
        }),
        _ => Ok(()),
    }
}

#[inline]
fn apply(
    array: &mut [TaggedElement],
    lo: usize,
    hi: usize,
    counts: &mut PassCounts,
    recorder: &mut Option<&mut Trace>,
) {
    counts.comparisons += 1;
    if gate(array, lo, hi) {
        counts.swaps += 1;
    }
    if let Some(trace) = recorder.as_deref_mut() {
        trace.record(lo, hi);
    }
}

/// Scan of sortedness, charging `n - 1` scan comparisons.
fn scan(array: &[TaggedElement], report: &mut SortReport) -> bool {
    report.scan_comparisons += array.len().saturating_sub(1) as u64;
    is_sorted(array)
}

/// One round: every position `i` is compared with a partner drawn uniformly
/// from the other `n - 1` positions.
pub fn spin_round(
    array: &mut [TaggedElement],
    rng: &mut RngStream,
    mut recorder: Option<&mut Trace>,
) -> Result<PassCounts> {
    let n = array.len();
    if n < 2 {
        return Err(Error::TooShort { len: n, min: 2 });
    }
    check_recorder(&recorder, n)?;
    let mut counts = PassCounts::default();
    for i in 0..n {
        // Partner over the other n - 1 positions: draw u, skip past i.
        let u = rng.index_in(0, n - 2);
        let s = u + usize::from(u >= i);
        apply(array, i.min(s), i.max(s), &mut counts, &mut recorder);
    }
    Ok(counts)
}

pub fn spin_the_bottle_sort(
    array: &mut [TaggedElement],
    rng: &mut RngStream,
    mode: TerminationMode,
    mut recorder: Option<&mut Trace>,
) -> Result<SortReport> {
    let n = array.len();
    check_recorder(&recorder, n)?;
    let mut report = SortReport {
        n,
        initial_inversions: inversion_total(array),
        ..Default::default()
    };
    let mut counts = PassCounts::default();
    if n >= 2 {
        match mode {
            TerminationMode::CheckSorted => {
                while !scan(array, &mut report) {
                    counts += spin_round(array, rng, recorder.as_deref_mut())?;
                    report.rounds += 1;
                }
            }
            TerminationMode::FixedBudget(rounds) => {
                for _ in 0..rounds {
                    counts += spin_round(array, rng, recorder.as_deref_mut())?;
                }
                report.rounds = rounds;
            }
        }
    }
    Ok(finish(report, counts, array))
}

/// One schedule entry: an up-pass then a down-pass, each drawing
/// `repetitions` partners per position within distance `temperature`.
pub fn annealing_pass(
    array: &mut [TaggedElement],
    temperature: u64,
    repetitions: u64,
    rng: &mut RngStream,
    mut recorder: Option<&mut Trace>,
) -> Result<PassCounts> {
    let n = array.len();
    if n < 2 {
        return Err(Error::TooShort { len: n, min: 2 });
    }
    if temperature < 1 || repetitions < 1 {
        return Err(Error::InvalidParameter(format!(
            "annealing pass needs T >= 1 and r >= 1, got T = {temperature}, r = {repetitions}"
        )));
    }
    check_recorder(&recorder, n)?;
    let t = usize::try_from(temperature).unwrap_or(usize::MAX);
    let mut counts = PassCounts::default();
    // 0-based: up-pass partners in [i+1, min(n-1, i+T)].
    for i in 0..n - 1 {
        let hi = i.saturating_add(t).min(n - 1);
        for _ in 0..repetitions {
            let s = rng.index_in(i + 1, hi);
            apply(array, i, s, &mut counts, &mut recorder);
        }
    }
    // Down-pass partners in [max(0, i-T), i-1].
    for i in (1..n).rev() {
        let lo = i.saturating_sub(t);
        for _ in 0..repetitions {
            let s = rng.index_in(lo, i - 1);
            apply(array, s, i, &mut counts, &mut recorder);
        }
    }
    Ok(counts)
}

pub fn annealing_sort(
    array: &mut [TaggedElement],
    schedule: &AnnealingSchedule,
    rng: &mut RngStream,
    mut recorder: Option<&mut Trace>,
) -> Result<SortReport> {
    schedule.validate().map_err(Error::InvalidSchedule)?;
    let n = array.len();
    check_recorder(&recorder, n)?;
    let mut report = SortReport {
        n,
        initial_inversions: inversion_total(array),
        ..Default::default()
    };
    let mut counts = PassCounts::default();
    if n >= 2 {
        for entry in schedule.active() {
            counts += annealing_pass(
                array,
                entry.temperature,
                entry.repetitions,
                rng,
                recorder.as_deref_mut(),
            )?;
            report.rounds += 1;
        }
    }
    Ok(finish(report, counts, array))
}

/// Random pairs until sorted or out of budget. Sortedness is checked before
/// the first draw and after every `n` draws.
pub fn guess_sort(
    array: &mut [TaggedElement],
    rng: &mut RngStream,
    max_comparisons: u64,
) -> Result<SortReport> {
    let n = array.len();
    if n < 2 {
        return Err(Error::TooShort { len: n, min: 2 });
    }
    let mut report = SortReport {
        n,
        initial_inversions: inversion_total(array),
        ..Default::default()
    };
    let mut counts = PassCounts::default();
    let mut none = None;
    while counts.comparisons < max_comparisons && !scan(array, &mut report) {
        let block = (n as u64).min(max_comparisons - counts.comparisons);
        for _ in 0..block {
            let i = rng.index_in(0, n - 1);
            let u = rng.index_in(0, n - 2);
            let s = u + usize::from(u >= i);
            apply(array, i.min(s), i.max(s), &mut counts, &mut none);
        }
        report.rounds += 1;
    }
    Ok(finish(report, counts, array))
}

/// Classic bubble sort: full adjacent passes until a pass makes no swap.
pub fn bubble_sort(array: &mut [TaggedElement]) -> SortReport {
    let n = array.len();
    let mut report = SortReport {
        n,
        initial_inversions: inversion_total(array),
        ..Default::default()
    };
    let mut counts = PassCounts::default();
    let mut none = None;
    if n >= 2 {
        loop {
            let before = counts.swaps;
            for i in 0..n - 1 {
                apply(array, i, i + 1, &mut counts, &mut none);
            }
            report.rounds += 1;
            if counts.swaps == before {
                break;
            }
        }
    }
    finish(report, counts, array)
}

/// Ground-truth sort by `(key, origin)`.
pub fn oracle_sort(array: &[TaggedElement]) -> Vec<TaggedElement> {
    let mut out = array.to_vec();
    out.sort_unstable();
    out
}

fn finish(mut report: SortReport, counts: PassCounts, array: &[TaggedElement]) -> SortReport {
    report.comparisons = counts.comparisons;
    report.swaps = counts.swaps;
    report.final_inversions = inversion_total(array);
    report.sorted = report.final_inversions == 0;
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::element::{keys, tag};
    use crate::schedule::practical_schedule;

    fn iota(n: usize) -> Vec<TaggedElement> {
        tag(&(1..=n as i64).collect::<Vec<_>>())
    }

    #[test]
    fn spin_round_n2_only_has_one_pair() {
        for seed in 0..10 {
            let mut a = tag(&[2, 1]);
            let mut trace = Trace::new(2);
            let c = spin_round(&mut a, &mut RngStream::new(seed), Some(&mut trace)).unwrap();
            assert_eq!(c.comparisons, 2);
            assert_eq!(trace.ops(), &[(1, 2), (1, 2)]);
            assert_eq!(keys(&a), vec![1, 2]);
        }
    }

    #[test]
    fn spin_round_sorted_input() {
        let mut a = iota(8);
        let c = spin_round(&mut a, &mut RngStream::new(5), None).unwrap();
        assert_eq!(
            c,
            PassCounts {
                comparisons: 8,
                swaps: 0
            }
        );
        assert!(spin_round(&mut iota(1), &mut RngStream::new(5), None).is_err());
    }

    #[test]
    fn spin_round_never_pairs_i_with_itself() {
        let mut a = iota(5);
        let mut trace = Trace::new(5);
        let mut rng = RngStream::new(11);
        for _ in 0..200 {
            spin_round(&mut a, &mut rng, Some(&mut trace)).unwrap();
        }
        // Position i is the first gate of slot i in each round.
        for (k, &(lo, hi)) in trace.ops().iter().enumerate() {
            let i = (k % 5) as u32 + 1;
            assert!(lo == i || hi == i);
            assert!(lo < hi);
        }
    }

    #[test]
    fn spin_sort_edge_cases() {
        let mut one = iota(1);
        let r = spin_the_bottle_sort(
            &mut one,
            &mut RngStream::new(0),
            TerminationMode::CheckSorted,
            None,
        )
        .unwrap();
        assert_eq!((r.comparisons, r.sorted), (0, true));

        let mut a = tag(&[3, 1, 2]);
        let r = spin_the_bottle_sort(
            &mut a,
            &mut RngStream::new(0),
            TerminationMode::FixedBudget(0),
            None,
        )
        .unwrap();
        assert_eq!((r.comparisons, r.sorted, r.rounds), (0, false, 0));
        assert_eq!(r.initial_inversions, 2);
    }

    #[test]
    fn spin_sort_check_sorted_terminates_sorted() {
        let mut a = tag(&[5, 3, 9, 1, 1, 7, 2, 8]);
        let r = spin_the_bottle_sort(
            &mut a,
            &mut RngStream::new(3),
            TerminationMode::CheckSorted,
            None,
        )
        .unwrap();
        assert!(r.sorted);
        assert_eq!(r.comparisons, 8 * r.rounds);
        assert_eq!(r.scan_comparisons, 7 * (r.rounds + 1));
        assert!(is_sorted(&a));
    }

    #[test]
    fn default_budget_formula() {
        assert_eq!(default_spin_budget(1), 0);
        // 4 * 16 + 2 * 16 * ln 16 = 64 + 88.72...
        assert_eq!(default_spin_budget(16), 153);
    }

    #[test]
    fn annealing_pass_degenerate_window_is_bubble() {
        let mut a = tag(&[2, 1, 3, 4, 5, 6, 7, 8]);
        let mut trace = Trace::new(8);
        let c = annealing_pass(&mut a, 1, 1, &mut RngStream::new(77), Some(&mut trace)).unwrap();
        assert_eq!(
            c,
            PassCounts {
                comparisons: 14,
                swaps: 1
            }
        );
        assert!(is_sorted(&a));
        let up: Vec<(u32, u32)> = (1..8).map(|i| (i, i + 1)).collect();
        let down: Vec<(u32, u32)> = (1..8).rev().map(|i| (i, i + 1)).collect();
        assert_eq!(trace.ops(), [up, down].concat().as_slice());
    }

    #[test]
    fn annealing_pass_structural_count() {
        let mut rng = RngStream::new(9);
        for input in [iota(16), tag(&(0..16).rev().collect::<Vec<_>>())] {
            let mut a = input;
            let c = annealing_pass(&mut a, 16, 4, &mut rng, None).unwrap();
            assert_eq!(c.comparisons, 120);
        }
    }

    #[test]
    fn annealing_pass_windows_respect_temperature() {
        let mut a = iota(30);
        let mut trace = Trace::new(30);
        annealing_pass(&mut a, 3, 5, &mut RngStream::new(2), Some(&mut trace)).unwrap();
        assert!(trace
            .ops()
            .iter()
            .all(|&(lo, hi)| hi - lo >= 1 && hi - lo <= 3));
    }

    #[test]
    fn annealing_pass_rejects_bad_params() {
        let mut a = iota(4);
        let mut rng = RngStream::new(0);
        assert!(annealing_pass(&mut a, 0, 1, &mut rng, None).is_err());
        assert!(annealing_pass(&mut a, 1, 0, &mut rng, None).is_err());
        assert!(annealing_pass(&mut iota(1), 1, 1, &mut rng, None).is_err());
    }

    #[test]
    fn annealing_sort_terminator_only() {
        let mut a = tag(&[3, 1, 2]);
        let r = annealing_sort(
            &mut a,
            &AnnealingSchedule::terminator_only(),
            &mut RngStream::new(0),
            None,
        )
        .unwrap();
        assert_eq!(r.comparisons, 0);
        assert_eq!(keys(&a), vec![3, 1, 2]);
    }

    #[test]
    fn annealing_sort_rejects_invalid_schedule() {
        use crate::schedule::ScheduleEntry;
        let bad = AnnealingSchedule::unchecked(vec![ScheduleEntry::new(2, 1)]);
        assert!(matches!(
            annealing_sort(&mut iota(4), &bad, &mut RngStream::new(0), None),
            Err(Error::InvalidSchedule(_))
        ));
    }

    #[test]
    fn recorder_length_must_match() {
        let s = practical_schedule(4, 2, 0).unwrap();
        let mut t = Trace::new(5);
        assert!(annealing_sort(&mut iota(4), &s, &mut RngStream::new(0), Some(&mut t)).is_err());
    }

    #[test]
    fn guess_sort_cases() {
        let mut a = iota(10);
        let r = guess_sort(&mut a, &mut RngStream::new(1), 1000).unwrap();
        assert!(r.sorted && r.comparisons <= 10);

        let mut a = tag(&[2, 1, 3]);
        let r = guess_sort(&mut a, &mut RngStream::new(1), 0).unwrap();
        assert_eq!((r.comparisons, r.sorted), (0, false));

        let mut a = tag(&[4, 3, 2, 1, 0]);
        let r = guess_sort(&mut a, &mut RngStream::new(1), 7).unwrap();
        assert!(r.comparisons <= 7);

        let mut a = tag(&[9, 4, 3, 2, 1, 0, 5]);
        let r = guess_sort(&mut a, &mut RngStream::new(1), u64::MAX).unwrap();
        assert!(r.sorted);
    }

    #[test]
    fn bubble_sort_counts() {
        let mut a = tag(&(1..=8).rev().collect::<Vec<_>>());
        let r = bubble_sort(&mut a);
        assert_eq!(r.comparisons, 56);
        assert_eq!(r.swaps, 28);
        assert_eq!(r.rounds, 8);
        assert!(r.sorted);

        let mut a = iota(8);
        let r = bubble_sort(&mut a);
        assert_eq!((r.rounds, r.swaps, r.comparisons), (1, 0, 7));
    }

    #[test]
    fn oracle_sort_orders_by_key_then_origin() {
        let a = tag(&[3, 1, 3, 0]);
        let s = oracle_sort(&a);
        assert_eq!(
            s,
            vec![
                TaggedElement::new(0, 4),
                TaggedElement::new(1, 2),
                TaggedElement::new(3, 1),
                TaggedElement::new(3, 3),
            ]
        );
    }
}
