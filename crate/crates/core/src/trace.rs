//! Compare-exchange traces viewed as sorting networks.
//!
//! A [`Trace`] is the ordered list of gates an oblivious run performed.
//! Gates are stored normalized as `(lo, hi)` with 1-based `lo < hi`; the
//! smaller element always ends up on wire `lo`.

use std::fmt;
use std::io::{BufRead, Write};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::algorithms::{annealing_sort, spin_the_bottle_sort, TerminationMode};
use crate::element::{gate, TaggedElement};
use crate::error::{Error, Result};
use crate::rng::RngStream;
use crate::schedule::AnnealingSchedule;

/// Default wire cap for exhaustive zero-one verification (2^20 inputs).
pub const DEFAULT_WIRE_CAP: usize = 20;

#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Trace {
    n: usize,
    ops: Vec<(u32, u32)>,
}

impl Trace {
    pub fn new(n: usize) -> Self {
        Self { n, ops: Vec::new() }
    }

    /// Builds a trace from 1-based pairs in any orientation.
    pub fn from_ops<I>(n: usize, ops: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let mut trace = Self::new(n);
        for (i, j) in ops {
            trace.push(i, j)?;
        }
        Ok(trace)
    }

    pub fn wires(&self) -> usize {
        self.n
    }

    pub fn ops(&self) -> &[(u32, u32)] {
        &self.ops
    }

    pub fn len(&self) -> usize {
        self.ops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }

    /// Appends a gate on 1-based wires `i` and `j`.
    pub fn push(&mut self, i: usize, j: usize) -> Result<()> {
        for index in [i, j] {
            if index == 0 || index > self.n {
                return Err(Error::IndexOutOfBounds { index, len: self.n });
            }
        }
        if i == j {
            return Err(Error::SameIndex(i));
        }
        self.record(i.min(j) - 1, i.max(j) - 1);
        Ok(())
    }

    /// Records a gate given 0-based `lo < hi`.
    #[inline]
    pub(crate) fn record(&mut self, lo: usize, hi: usize) {
        self.ops.push((lo as u32 + 1, hi as u32 + 1));
    }

    /// Applies every gate in order.
    pub fn replay(&self, array: &mut [TaggedElement]) -> Result<()> {
        if array.len() != self.n {
            return Err(Error::LengthMismatch {
                expected: self.n,
                actual: array.len(),
            });
        }
        for &(lo, hi) in &self.ops {
            gate(array, lo as usize - 1, hi as usize - 1);
        }
        Ok(())
    }

    /// Index of the first gate where `self` and `other` differ, or `None`
    /// when they are identical.
    pub fn first_difference(&self, other: &Trace) -> Option<usize> {
        if self == other {
            return None;
        }
        let common = self.ops.len().min(other.ops.len());
        Some(
            (0..common)
                .find(|&k| self.ops[k] != other.ops[k])
                .unwrap_or(common),
        )
    }

    /// Reads the text format: `wires N ops M`, then `M` lines of `i j`.
    pub fn read<R: BufRead>(reader: R) -> Result<Self> {
        let mut lines = reader.lines().enumerate();
        let parse_err = |line: usize, message: String| Error::Parse { line, message };

        let (_, header) = lines
            .next()
            .ok_or_else(|| parse_err(1, "missing header".into()))?;
        let header = header?;
        let fields: Vec<&str> = header.split(' ').collect();
        let (n, m) = match fields.as_slice() {
            ["wires", n, "ops", m] => (
                n.parse::<usize>()
                    .map_err(|e| parse_err(1, format!("wire count {n:?}: {e}")))?,
                m.parse::<usize>()
                    .map_err(|e| parse_err(1, format!("op count {m:?}: {e}")))?,
            ),
            _ => {
                return Err(parse_err(
                    1,
                    format!("expected \"wires N ops M\", got {header:?}"),
                ))
            }
        };

        let mut trace = Self::new(n);
        trace.ops.reserve(m);
        for (index, line) in lines {
            let line = line?;
            let line_no = index + 1;
            if trace.ops.len() == m {
                if line.is_empty() {
                    continue;
                }
                return Err(parse_err(line_no, format!("more than {m} ops")));
            }
            let pair = line
                .split_once(' ')
                .and_then(|(a, b)| Some((a.parse::<usize>().ok()?, b.parse::<usize>().ok()?)));
            let (i, j) =
                pair.ok_or_else(|| parse_err(line_no, format!("expected \"i j\", got {line:?}")))?;
            trace
                .push(i, j)
                .map_err(|e| parse_err(line_no, e.to_string()))?;
        }
        if trace.ops.len() != m {
            return Err(parse_err(
                m + 1,
                format!("header declares {m} ops, found {}", trace.ops.len()),
            ));
        }
        Ok(trace)
    }

    pub fn write<W: Write>(&self, mut writer: W) -> Result<()> {
        writeln!(writer, "wires {} ops {}", self.n, self.ops.len())?;
        for (i, j) in &self.ops {
            writeln!(writer, "{i} {j}")?;
        }
        Ok(())
    }

    pub fn to_text(&self) -> String {
        let mut buf = Vec::with_capacity(16 + self.ops.len() * 8);
        self.write(&mut buf).expect("writing to a Vec cannot fail");
        String::from_utf8(buf).expect("trace text is ASCII")
    }
}

impl fmt::Display for Trace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

pub fn replay(trace: &Trace, array: &[TaggedElement]) -> Result<Vec<TaggedElement>> {
    let mut out = array.to_vec();
    trace.replay(&mut out)?;
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NetworkStats {
    pub size: usize,
    pub depth: usize,
}

/// Greedy layering: each gate goes in the first layer after the last layer
/// that touches either of its wires.
pub fn network_depth(trace: &Trace) -> NetworkStats {
    let mut last_layer = vec![0usize; trace.wires() + 1];
    let mut depth = 0;
    for &(lo, hi) in trace.ops() {
        let (lo, hi) = (lo as usize, hi as usize);
        let layer = last_layer[lo].max(last_layer[hi]) + 1;
        last_layer[lo] = layer;
        last_layer[hi] = layer;
        depth = depth.max(layer);
    }
    NetworkStats {
        size: trace.len(),
        depth,
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ZeroOneVerdict {
    pub certified: bool,
    /// First failing 0-1 input in lexicographic order (wire 1 most
    /// significant).
    pub counterexample: Option<Vec<u8>>,
}

pub fn verify_zero_one(trace: &Trace) -> Result<ZeroOneVerdict> {
    verify_zero_one_capped(trace, DEFAULT_WIRE_CAP)
}

/// Replays the trace on all `2^n` zero-one inputs.
///
/// Inputs are bit-sliced 64 at a time: each wire holds one bit of 64
/// different inputs, and a gate becomes `(lo & hi, lo | hi)`.
pub fn verify_zero_one_capped(trace: &Trace, cap: usize) -> Result<ZeroOneVerdict> {
    let n = trace.wires();
    if n > cap || n >= 64 {
        return Err(Error::WireCapExceeded { wires: n, cap });
    }
    if n <= 1 {
        return Ok(ZeroOneVerdict {
            certified: true,
            counterexample: None,
        });
    }
    let total: u64 = 1 << n;
    let batches = total.div_ceil(64);
    let ops: Vec<(usize, usize)> = trace
        .ops()
        .iter()
        .map(|&(lo, hi)| (lo as usize - 1, hi as usize - 1))
        .collect();

    let first_failure = (0..batches)
        .into_par_iter()
        .filter_map(|batch| failing_lane(&ops, n, batch, total))
        .min();

    Ok(match first_failure {
        None => ZeroOneVerdict {
            certified: true,
            counterexample: None,
        },
        Some(v) => ZeroOneVerdict {
            certified: false,
            counterexample: Some((0..n).map(|w| ((v >> (n - 1 - w)) & 1) as u8).collect()),
        },
    })
}

/// Smallest input index in `batch` that the network fails to sort.
fn failing_lane(ops: &[(usize, usize)], n: usize, batch: u64, total: u64) -> Option<u64> {
    let base = batch * 64;
    let lanes = (total - base).min(64);
    let live = if lanes == 64 {
        u64::MAX
    } else {
        (1u64 << lanes) - 1
    };
    // Lane l encodes input v = base + l; wire w carries bit (n - 1 - w) of v.
    let mut wires = vec![0u64; n];
    for lane in 0..lanes {
        let v = base + lane;
        for (w, slot) in wires.iter_mut().enumerate() {
            *slot |= ((v >> (n - 1 - w)) & 1) << lane;
        }
    }
    for &(lo, hi) in ops {
        let (a, b) = (wires[lo], wires[hi]);
        wires[lo] = a & b;
        wires[hi] = a | b;
    }
    let bad = wires.windows(2).fold(0u64, |acc, w| acc | (w[0] & !w[1])) & live;
    (bad != 0).then(|| base + bad.trailing_zeros() as u64)
}

/// An algorithm configuration whose trace should not depend on the keys.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AlgoConfig {
    SpinTheBottle(TerminationMode),
    Annealing(AnnealingSchedule),
}

impl AlgoConfig {
    /// Runs the configured sort on `array` with the algorithm stream of
    /// `seed`, returning the recorded trace.
    pub fn record(&self, seed: u64, array: &mut [TaggedElement]) -> Result<Trace> {
        let mut trace = Trace::new(array.len());
        let mut rng = RngStream::new(seed);
        match self {
            AlgoConfig::SpinTheBottle(TerminationMode::CheckSorted) => {
                return Err(Error::DataDependentMode)
            }
            AlgoConfig::SpinTheBottle(mode) => {
                spin_the_bottle_sort(array, &mut rng, *mode, Some(&mut trace))?;
            }
            AlgoConfig::Annealing(schedule) => {
                annealing_sort(array, schedule, &mut rng, Some(&mut trace))?;
            }
        }
        Ok(trace)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ObliviousnessVerdict {
    pub identical: bool,
    /// `(input index, gate index)` of the first trace that differs from the
    /// trace of input 0.
    pub first_mismatch: Option<(usize, usize)>,
    pub trace_len: usize,
}

/// Runs `config` once per input under the same seed and compares traces.
pub fn obliviousness_check(
    config: &AlgoConfig,
    seed: u64,
    inputs: &[Vec<TaggedElement>],
) -> Result<ObliviousnessVerdict> {
    if let AlgoConfig::SpinTheBottle(TerminationMode::CheckSorted) = config {
        return Err(Error::DataDependentMode);
    }
    let Some(first) = inputs.first() else {
        return Err(Error::InvalidParameter("no inputs to compare".into()));
    };
    if let Some(bad) = inputs.iter().find(|a| a.len() != first.len()) {
        return Err(Error::LengthMismatch {
            expected: first.len(),
            actual: bad.len(),
        });
    }
    let reference = config.record(seed, &mut first.clone())?;
    for (index, input) in inputs.iter().enumerate().skip(1) {
        let trace = config.record(seed, &mut input.clone())?;
        if let Some(gate) = reference.first_difference(&trace) {
            return Ok(ObliviousnessVerdict {
                identical: false,
                first_mismatch: Some((index, gate)),
                trace_len: reference.len(),
            });
        }
    }
    Ok(ObliviousnessVerdict {
        identical: true,
        first_mismatch: None,
        trace_len: reference.len(),
    })
}
