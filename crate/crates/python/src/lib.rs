//! Python bindings. Keys cross the boundary as lists of ints; arrays are
//! tagged on entry so equal keys keep a strict order.

use pyo3::exceptions::{PyOSError, PyValueError};
use pyo3::prelude::*;

use oblivisort as core;
use oblivisort::{AnnealingSchedule, RngStream, ScheduleEntry, TerminationMode};

fn to_py(e: core::Error) -> PyErr {
    match e {
        core::Error::Io(io) => PyOSError::new_err(io.to_string()),
        other => PyValueError::new_err(other.to_string()),
    }
}

/// Counters of one sort run.
#[pyclass(name = "SortReport", frozen, get_all, skip_from_py_object)]
#[derive(Clone)]
struct PySortReport {
    n: usize,
    comparisons: u64,
    swaps: u64,
    rounds: u64,
    scan_comparisons: u64,
    sorted: bool,
    initial_inversions: u64,
    final_inversions: u64,
}

impl From<core::SortReport> for PySortReport {
    fn from(r: core::SortReport) -> Self {
        Self {
            n: r.n,
            comparisons: r.comparisons,
            swaps: r.swaps,
            rounds: r.rounds,
            scan_comparisons: r.scan_comparisons,
            sorted: r.sorted,
            initial_inversions: r.initial_inversions,
            final_inversions: r.final_inversions,
        }
    }
}

#[pymethods]
impl PySortReport {
    fn __repr__(&self) -> String {
        format!(
            "SortReport(n={}, comparisons={}, swaps={}, rounds={}, sorted={})",
            self.n,
            self.comparisons,
            self.swaps,
            self.rounds,
            if self.sorted { "True" } else { "False" }
        )
    }
}

/// Nonincreasing temperatures with repetition counts, ending in `(0, 0)`.
#[pyclass(name = "Schedule", frozen, from_py_object)]
#[derive(Clone)]
struct PySchedule(AnnealingSchedule);

#[pymethods]
impl PySchedule {
    /// Builds a custom schedule from `(temperature, repetitions)` pairs,
    /// including the terminator.
    #[new]
    fn new(entries: Vec<(u64, u64)>) -> PyResult<Self> {
        let entries = entries
            .into_iter()
            .map(|(t, r)| ScheduleEntry::new(t, r))
            .collect();
        AnnealingSchedule::new(entries, core::Provenance::Custom)
            .map(Self)
            .map_err(to_py)
    }

    #[staticmethod]
    #[pyo3(signature = (n, repetitions = None, tail_rounds = None))]
    fn practical(n: usize, repetitions: Option<u64>, tail_rounds: Option<u64>) -> PyResult<Self> {
        let schedule = match (repetitions, tail_rounds) {
            (None, None) => core::practical_preset(n),
            (r, t) => core::practical_schedule(
                n,
                r.unwrap_or(core::schedule::PRACTICAL_REPETITIONS),
                t.unwrap_or(core::schedule::PRACTICAL_TAIL_ROUNDS),
            ),
        };
        schedule.map(Self).map_err(to_py)
    }

    #[staticmethod]
    #[pyo3(signature = (n, q = 1.0, c = 10.0, g = 1.0, h = 1.0))]
    fn theoretical(n: usize, q: f64, c: f64, g: f64, h: f64) -> PyResult<Self> {
        core::theoretical_schedule(n, core::ScheduleParams { q, c, g, h })
            .map(Self)
            .map_err(to_py)
    }

    #[getter]
    fn entries(&self) -> Vec<(u64, u64)> {
        self.0
            .entries()
            .iter()
            .map(|e| (e.temperature, e.repetitions))
            .collect()
    }

    /// Comparisons an annealing sort of length `n` spends on this schedule.
    fn cost(&self, n: usize) -> u64 {
        self.0.cost(n)
    }

    fn to_text(&self) -> PyResult<String> {
        let mut buf = Vec::new();
        self.0.write(&mut buf).map_err(to_py)?;
        Ok(String::from_utf8(buf).expect("schedule text is ASCII"))
    }

    #[staticmethod]
    fn from_text(text: &str) -> PyResult<Self> {
        AnnealingSchedule::read(text.as_bytes())
            .map(Self)
            .map_err(to_py)
    }

    fn __len__(&self) -> usize {
        self.0.entries().len()
    }

    fn __repr__(&self) -> String {
        format!("Schedule({:?})", self.entries())
    }
}

/// A recorded compare-exchange sequence over `wires` positions.
#[pyclass(name = "Trace", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyTrace(core::Trace);

#[pymethods]
impl PyTrace {
    /// `ops` are 1-based `(i, j)` pairs; each is stored as `(min, max)`.
    #[new]
    #[pyo3(signature = (wires, ops = Vec::new()))]
    fn new(wires: usize, ops: Vec<(usize, usize)>) -> PyResult<Self> {
        core::Trace::from_ops(wires, ops).map(Self).map_err(to_py)
    }

    #[getter]
    fn wires(&self) -> usize {
        self.0.wires()
    }

    #[getter]
    fn ops(&self) -> Vec<(u32, u32)> {
        self.0.ops().to_vec()
    }

    fn __len__(&self) -> usize {
        self.0.len()
    }

    fn __eq__(&self, other: &Self) -> bool {
        self.0 == other.0
    }

    fn replay(&self, keys: Vec<i64>) -> PyResult<Vec<i64>> {
        let out = core::replay(&self.0, &core::tag(&keys)).map_err(to_py)?;
        Ok(core::keys(&out))
    }

    /// `(size, depth)` with greedy layering.
    fn depth(&self) -> (usize, usize) {
        let s = core::network_depth(&self.0);
        (s.size, s.depth)
    }

    /// Checks all `2^wires` zero-one inputs. Returns `None` when the trace
    /// sorts them all, else the first failing input.
    #[pyo3(signature = (cap = core::trace::DEFAULT_WIRE_CAP))]
    fn verify_zero_one(&self, py: Python<'_>, cap: usize) -> PyResult<Option<Vec<u32>>> {
        let verdict = py
            .detach(|| core::verify_zero_one_capped(&self.0, cap))
            .map_err(to_py)?;
        // A list of bits rather than bytes.
        Ok(verdict
            .counterexample
            .map(|bits| bits.into_iter().map(u32::from).collect()))
    }

    fn to_text(&self) -> String {
        self.0.to_text()
    }

    #[staticmethod]
    fn from_text(text: &str) -> PyResult<Self> {
        core::Trace::read(text.as_bytes()).map(Self).map_err(to_py)
    }

    fn __repr__(&self) -> String {
        format!("Trace(wires={}, ops={})", self.0.wires(), self.0.len())
    }
}

type Sorted = (Vec<i64>, PySortReport);
type Recorded = (Vec<i64>, PySortReport, Option<PyTrace>);

/// Spin-the-bottle sort. With `budget` it runs that many rounds and is
/// data oblivious; without, it stops once sorted.
#[pyfunction]
#[pyo3(signature = (keys, seed, budget = None, record = false))]
fn spin_the_bottle_sort(
    keys: Vec<i64>,
    seed: u64,
    budget: Option<u64>,
    record: bool,
) -> PyResult<Recorded> {
    let mut array = core::tag(&keys);
    let mode = budget.map_or(TerminationMode::CheckSorted, TerminationMode::FixedBudget);
    let mut trace = record.then(|| core::Trace::new(array.len()));
    let report =
        core::spin_the_bottle_sort(&mut array, &mut RngStream::new(seed), mode, trace.as_mut())
            .map_err(to_py)?;
    Ok((core::keys(&array), report.into(), trace.map(PyTrace)))
}

/// Annealing sort; the practical preset when no schedule is given.
#[pyfunction]
#[pyo3(signature = (keys, seed, schedule = None, record = false))]
fn annealing_sort(
    keys: Vec<i64>,
    seed: u64,
    schedule: Option<PySchedule>,
    record: bool,
) -> PyResult<Recorded> {
    let mut array = core::tag(&keys);
    let schedule = match schedule {
        Some(s) => s.0,
        None if array.len() < 2 => AnnealingSchedule::terminator_only(),
        None => core::practical_preset(array.len()).map_err(to_py)?,
    };
    let mut trace = record.then(|| core::Trace::new(array.len()));
    let report = core::annealing_sort(
        &mut array,
        &schedule,
        &mut RngStream::new(seed),
        trace.as_mut(),
    )
    .map_err(to_py)?;
    Ok((core::keys(&array), report.into(), trace.map(PyTrace)))
}

#[pyfunction]
fn guess_sort(keys: Vec<i64>, seed: u64, max_comparisons: u64) -> PyResult<Sorted> {
    let mut array = core::tag(&keys);
    let report =
        core::guess_sort(&mut array, &mut RngStream::new(seed), max_comparisons).map_err(to_py)?;
    Ok((core::keys(&array), report.into()))
}

#[pyfunction]
fn bubble_sort(keys: Vec<i64>) -> Sorted {
    let mut array = core::tag(&keys);
    let report = core::bubble_sort(&mut array);
    (core::keys(&array), report.into())
}

/// Applies one compare-exchange at 1-based positions; returns whether it
/// swapped.
#[pyfunction]
fn compare_exchange(keys: Vec<i64>, i: usize, j: usize) -> PyResult<(Vec<i64>, bool)> {
    let mut array = core::tag(&keys);
    let swapped = core::compare_exchange(&mut array, i, j).map_err(to_py)?;
    Ok((core::keys(&array), swapped))
}

/// `(total, per_index)`; `per_index` is `None` above the tally limit.
#[pyfunction]
fn inversion_count(keys: Vec<i64>) -> (u64, Option<Vec<u64>>) {
    let profile = core::inversion_count(&core::tag(&keys));
    (profile.total, profile.per_index)
}

#[pyfunction]
fn adversarial_input(n: usize) -> PyResult<Vec<i64>> {
    core::adversarial_input(n)
        .map(|a| core::keys(&a))
        .map_err(to_py)
}

#[pyfunction]
fn random_permutation(n: usize, seed: u64) -> Vec<i64> {
    let a = core::random_permutation(n, &mut RngStream::derive(seed, core::rng::INPUT_STREAM));
    core::keys(&a)
}

#[pyfunction]
fn leaf_dirtiness(bits: Vec<i64>) -> PyResult<u64> {
    core::leaf_dirtiness(&bits).map_err(to_py)
}

#[pyfunction]
fn default_spin_budget(n: usize) -> u64 {
    core::default_spin_budget(n)
}

/// Runs the configuration once per input under `seed`. Returns `None` when
/// every trace matches, else `(input index, op index)` of the first mismatch.
#[pyfunction]
#[pyo3(signature = (inputs, seed, schedule = None, budget = None))]
fn obliviousness_check(
    py: Python<'_>,
    inputs: Vec<Vec<i64>>,
    seed: u64,
    schedule: Option<PySchedule>,
    budget: Option<u64>,
) -> PyResult<Option<(usize, usize)>> {
    let config = match (schedule, budget) {
        (Some(s), None) => core::AlgoConfig::Annealing(s.0),
        (None, Some(b)) => core::AlgoConfig::SpinTheBottle(TerminationMode::FixedBudget(b)),
        _ => {
            return Err(PyValueError::new_err(
                "pass exactly one of schedule (annealing) or budget (spin)",
            ))
        }
    };
    let tagged: Vec<_> = inputs.iter().map(|k| core::tag(k)).collect();
    let verdict = py
        .detach(|| core::obliviousness_check(&config, seed, &tagged))
        .map_err(to_py)?;
    Ok(verdict.first_mismatch)
}

#[pymodule]
fn pyoblivisort(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PySortReport>()?;
    m.add_class::<PySchedule>()?;
    m.add_class::<PyTrace>()?;
    m.add_function(wrap_pyfunction!(spin_the_bottle_sort, m)?)?;
    m.add_function(wrap_pyfunction!(annealing_sort, m)?)?;
    m.add_function(wrap_pyfunction!(guess_sort, m)?)?;
    m.add_function(wrap_pyfunction!(bubble_sort, m)?)?;
    m.add_function(wrap_pyfunction!(compare_exchange, m)?)?;
    m.add_function(wrap_pyfunction!(inversion_count, m)?)?;
    m.add_function(wrap_pyfunction!(adversarial_input, m)?)?;
    m.add_function(wrap_pyfunction!(random_permutation, m)?)?;
    m.add_function(wrap_pyfunction!(leaf_dirtiness, m)?)?;
    m.add_function(wrap_pyfunction!(default_spin_budget, m)?)?;
    m.add_function(wrap_pyfunction!(obliviousness_check, m)?)?;
    Ok(())
}
