//! Randomized data-oblivious sorting by round-robin random compare-exchange.
//!
//! Two algorithms are provided. [`spin_the_bottle_sort`] compares every
//! position with a uniformly random partner, round after round.
//! [`annealing_sort`] restricts partners to a window (the temperature) that
//! shrinks along an [`AnnealingSchedule`], repeating each draw a scheduled
//! number of times. With a fixed round budget or schedule, the sequence of
//! compare-exchange pairs depends only on the array length and the seed, so
//! a run can be recorded as a [`Trace`] and checked as a sorting network.
//!
//! ```
//! use oblivisort::{annealing_sort, practical_preset, random_permutation, RngStream};
//!
//! let mut array = random_permutation(64, &mut RngStream::derive(7, 1));
//! let schedule = practical_preset(64).unwrap();
//! let report = annealing_sort(&mut array, &schedule, &mut RngStream::new(7), None).unwrap();
//! assert_eq!(report.comparisons, schedule.cost(64));
//! ```

pub mod algorithms;
pub mod cli;
pub mod element;
pub mod error;
pub mod metrics;
pub mod rng;
pub mod schedule;
pub mod trace;

pub use algorithms::{
    annealing_pass, annealing_sort, bubble_sort, default_spin_budget, guess_sort, oracle_sort,
    spin_round, spin_the_bottle_sort, PassCounts, SortReport, TerminationMode,
};
pub use element::{compare_exchange, is_sorted, keys, tag, TaggedElement};
pub use error::{Error, Result};
pub use metrics::{
    adversarial_input, desired_dirtiness, inversion_count, inversion_total, leaf_dirtiness,
    random_permutation, region_report, reverse_input, sorted_input, spin_phase_of, zero_one,
    InversionProfile, Placement, Region, RegionClass, RegionReport, SpinPhase,
};
pub use rng::RngStream;
pub use schedule::{
    practical_preset, practical_schedule, schedule_cost, theoretical_schedule, AnnealingSchedule,
    Provenance, ScheduleEntry, ScheduleParams, ScheduleViolation,
};
pub use trace::{
    network_depth, obliviousness_check, replay, verify_zero_one, verify_zero_one_capped,
    AlgoConfig, NetworkStats, ObliviousnessVerdict, Trace, ZeroOneVerdict,
};
