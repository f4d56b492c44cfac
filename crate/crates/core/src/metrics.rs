//! Inversion counting, input generators, and the zero-one region
//! diagnostics used to watch Annealing sort make progress.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::element::{tag, TaggedElement};
use crate::error::{Error, Result};
use crate::rng::RngStream;

/// Largest `n` for which the per-position tally is computed.
pub const PER_INDEX_LIMIT: usize = 4096;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InversionProfile {
    pub total: u64,
    /// Inversions involving each position; `None` above [`PER_INDEX_LIMIT`].
    pub per_index: Option<Vec<u64>>,
}

/// Inversion total by merge sort, plus the per-position tally for small
/// arrays.
pub fn inversion_count<T: Ord + Clone>(array: &[T]) -> InversionProfile {
    let total = inversion_total(array);
    let per_index = (array.len() <= PER_INDEX_LIMIT).then(|| per_index_tally(array));
    InversionProfile { total, per_index }
}

/// Number of pairs `i < j` with `array[i] > array[j]`, in `O(n log n)`.
pub fn inversion_total<T: Ord + Clone>(array: &[T]) -> u64 {
    if array.len() < 2 {
        return 0;
    }
    let mut work = array.to_vec();
    let mut buf = array.to_vec();
    merge_count(&mut work, &mut buf)
}

fn merge_count<T: Ord + Clone>(a: &mut [T], buf: &mut [T]) -> u64 {
    let n = a.len();
    if n < 2 {
        return 0;
    }
    let mid = n / 2;
    let mut count = {
        let (left, right) = a.split_at_mut(mid);
        let (bl, br) = buf.split_at_mut(mid);
        merge_count(left, bl) + merge_count(right, br)
    };
    let (mut i, mut j, mut k) = (0, mid, 0);
    while i < mid && j < n {
        if a[j] < a[i] {
            // Every element left in the first half exceeds a[j].
            count += (mid - i) as u64;
            buf[k] = a[j].clone();
            j += 1;
        } else {
            buf[k] = a[i].clone();
            i += 1;
        }
        k += 1;
    }
    buf[k..k + mid - i].clone_from_slice(&a[i..mid]);
    k += mid - i;
    buf[k..].clone_from_slice(&a[j..]);
    a.clone_from_slice(&buf[..n]);
    count
}

fn per_index_tally<T: Ord>(array: &[T]) -> Vec<u64> {
    let n = array.len();
    let mut tally = vec![0u64; n];
    for i in 0..n {
        for j in i + 1..n {
            if array[i] > array[j] {
                tally[i] += 1;
                tally[j] += 1;
            }
        }
    }
    tally
}

/// `(2, 1, 4, 3, ..., n, n-1)`: `n/2` inversions, one per element.
pub fn adversarial_input(n: usize) -> Result<Vec<TaggedElement>> {
    if !n.is_multiple_of(2) {
        return Err(Error::InvalidParameter(format!(
            "adversarial input pairs elements; n = {n} is odd"
        )));
    }
    let keys: Vec<i64> = (0..n as i64)
        .map(|i| if i % 2 == 0 { i + 2 } else { i })
        .collect();
    Ok(tag(&keys))
}

pub fn sorted_input(n: usize) -> Vec<TaggedElement> {
    tag(&(1..=n as i64).collect::<Vec<_>>())
}

pub fn reverse_input(n: usize) -> Vec<TaggedElement> {
    tag(&(1..=n as i64).rev().collect::<Vec<_>>())
}

/// Uniform permutation of `1..=n` (Fisher-Yates).
pub fn random_permutation(n: usize, rng: &mut RngStream) -> Vec<TaggedElement> {
    let mut keys: Vec<i64> = (1..=n as i64).collect();
    shuffle(&mut keys, rng);
    tag(&keys)
}

fn shuffle<T>(items: &mut [T], rng: &mut RngStream) {
    for i in (1..items.len()).rev() {
        let j = rng.index_in(0, i);
        items.swap(i, j);
    }
}

/// Where the ones go in [`zero_one`].
pub enum Placement<'a> {
    /// Uniformly random positions.
    Random(&'a mut RngStream),
    /// Zeroes first, then ones (already sorted).
    OnesLast,
    /// Ones first, then zeroes.
    OnesFirst,
}

/// 0-1 keys with exactly `ones` ones.
pub fn zero_one(n: usize, ones: usize, placement: Placement<'_>) -> Result<Vec<i64>> {
    if ones > n {
        return Err(Error::InvalidParameter(format!(
            "cannot place {ones} ones in {n} cells"
        )));
    }
    let mut keys: Vec<i64> = (0..n).map(|i| i64::from(i >= n - ones)).collect();
    match placement {
        Placement::OnesLast => {}
        Placement::OnesFirst => keys.reverse(),
        Placement::Random(rng) => shuffle(&mut keys, rng),
    }
    Ok(keys)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum SpinPhase {
    Phase1,
    Phase2,
    Phase3,
}

/// Spin-the-bottle analysis phase for `inversions` remaining out of `n`:
/// Phase 1 at `12 n log n` and above, Phase 3 below `12 n`.
pub fn spin_phase_of(inversions: u64, n: usize) -> SpinPhase {
    let n = n as f64;
    let m = inversions as f64;
    if m >= 12.0 * n * n.log2() {
        SpinPhase::Phase1
    } else if m >= 12.0 * n {
        SpinPhase::Phase2
    } else {
        SpinPhase::Phase3
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum RegionClass {
    Low,
    High,
    Mixed,
}

impl fmt::Display for RegionClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RegionClass::Low => "low",
            RegionClass::High => "high",
            RegionClass::Mixed => "mixed",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Region {
    /// 0-based half-open cell range.
    pub start: usize,
    pub end: usize,
    pub class: RegionClass,
    /// Wrong-type values held: ones for low, zeroes for high, size for
    /// mixed.
    pub dirtiness: u64,
    /// Regions between this one and the crossover, counting this one; 0 for
    /// mixed.
    pub distance: usize,
    pub desired_bound: u64,
}

impl Region {
    pub fn len(&self) -> usize {
        self.end - self.start
    }

    pub fn is_empty(&self) -> bool {
        self.start == self.end
    }

    pub fn within_bound(&self) -> bool {
        self.dirtiness <= self.desired_bound
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RegionReport {
    pub depth: u32,
    pub ones: usize,
    pub regions: Vec<Region>,
}

impl RegionReport {
    pub fn total_dirtiness(&self) -> u64 {
        self.regions
            .iter()
            .filter(|r| r.class != RegionClass::Mixed)
            .map(|r| r.dirtiness)
            .sum()
    }
}

/// Desired dirtiness bound for a region `distance` regions from the
/// crossover at tree depth `depth`; `distance == 0` is a mixed region.
pub fn desired_dirtiness(n: usize, depth: u32, distance: usize, region_size: usize) -> u64 {
    let n = n as u64;
    match distance {
        0 => region_size as u64,
        1 => n / (5u64 << depth.min(61)),
        j => {
            let shift = depth as u64 + j as u64 + 3;
            if shift >= 64 {
                0
            } else {
                n >> shift
            }
        }
    }
}

fn check_zero_one(keys: &[i64]) -> Result<usize> {
    let mut ones = 0;
    for (position, &key) in keys.iter().enumerate() {
        match key {
            0 => {}
            1 => ones += 1,
            _ => return Err(Error::NotZeroOne { position, key }),
        }
    }
    Ok(ones)
}

/// Splits a 0-1 array into `2^depth` contiguous regions and classifies each
/// against the crossover at cell `n - k` (`k` = number of ones).
pub fn region_report(keys: &[i64], depth: u32) -> Result<RegionReport> {
    let n = keys.len();
    let ones = check_zero_one(keys)?;
    if depth >= usize::BITS || (1usize << depth) > n {
        return Err(Error::InvalidParameter(format!(
            "depth {depth} gives more than {n} regions"
        )));
    }
    let count = 1usize << depth;
    let crossover = n - ones;
    let bounds: Vec<(usize, usize)> = (0..count)
        .map(|r| (r * n / count, (r + 1) * n / count))
        .collect();
    let classes: Vec<RegionClass> = bounds
        .iter()
        .map(|&(start, end)| {
            if end <= crossover {
                RegionClass::Low
            } else if start >= crossover {
                RegionClass::High
            } else {
                RegionClass::Mixed
            }
        })
        .collect();
    // The first high or mixed region sits just right of the crossover.
    let pivot = classes
        .iter()
        .position(|&c| c != RegionClass::Low)
        .unwrap_or(count);
    let mixed = classes.get(pivot) == Some(&RegionClass::Mixed);

    let regions = bounds
        .iter()
        .zip(&classes)
        .enumerate()
        .map(|(r, (&(start, end), &class))| {
            let cells = &keys[start..end];
            let (dirtiness, distance) = match class {
                RegionClass::Low => (cells.iter().filter(|&&k| k == 1).count() as u64, pivot - r),
                RegionClass::High => (
                    cells.iter().filter(|&&k| k == 0).count() as u64,
                    if mixed { r - pivot } else { r - pivot + 1 },
                ),
                RegionClass::Mixed => ((end - start) as u64, 0),
            };
            Region {
                start,
                end,
                class,
                dirtiness,
                distance,
                desired_bound: desired_dirtiness(n, depth, distance, end - start),
            }
        })
        .collect();
    Ok(RegionReport {
        depth,
        ones,
        regions,
    })
}

/// Total dirtiness at cell level: ones left of the crossover plus zeroes
/// right of it.
pub fn leaf_dirtiness(keys: &[i64]) -> Result<u64> {
    let ones = check_zero_one(keys)?;
    let crossover = keys.len() - ones;
    let (low, high) = keys.split_at(crossover);
    Ok(low.iter().filter(|&&k| k == 1).count() as u64
        + high.iter().filter(|&&k| k == 0).count() as u64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::element::keys;

    #[test]
    fn sorted_has_no_inversions() {
        let p = inversion_count(&sorted_input(8));
        assert_eq!(p.total, 0);
        assert_eq!(p.per_index, Some(vec![0; 8]));
    }

    #[test]
    fn adversarial_profile() {
        let a = adversarial_input(8).unwrap();
        assert_eq!(keys(&a), vec![2, 1, 4, 3, 6, 5, 8, 7]);
        let p = inversion_count(&a);
        assert_eq!(p.total, 4);
        assert_eq!(p.per_index, Some(vec![1; 8]));
        assert_eq!(keys(&adversarial_input(4).unwrap()), vec![2, 1, 4, 3]);
        assert_eq!(keys(&adversarial_input(2).unwrap()), vec![2, 1]);
        assert!(adversarial_input(5).is_err());
    }

    #[test]
    fn adversarial_total_is_half_n() {
        for n in (0..=1 << 14).step_by(2).filter(|n| n % 512 == 0 || *n < 64) {
            let a = adversarial_input(n).unwrap();
            assert_eq!(inversion_total(&a), n as u64 / 2);
        }
    }

    #[test]
    fn per_index_omitted_for_large_arrays() {
        let p = inversion_count(&reverse_input(PER_INDEX_LIMIT + 1));
        assert!(p.per_index.is_none());
        let n = PER_INDEX_LIMIT as u64 + 1;
        assert_eq!(p.total, n * (n - 1) / 2);
    }

    #[test]
    fn generators() {
        assert_eq!(zero_one(4, 0, Placement::OnesLast).unwrap(), vec![0; 4]);
        assert_eq!(zero_one(4, 4, Placement::OnesFirst).unwrap(), vec![1; 4]);
        assert_eq!(
            zero_one(4, 1, Placement::OnesFirst).unwrap(),
            vec![1, 0, 0, 0]
        );
        assert!(zero_one(4, 5, Placement::OnesLast).is_err());
        let mut rng = RngStream::new(4);
        let z = zero_one(50, 17, Placement::Random(&mut rng)).unwrap();
        assert_eq!(z.iter().sum::<i64>(), 17);

        let a = random_permutation(6, &mut RngStream::new(31));
        let b = random_permutation(6, &mut RngStream::new(31));
        assert_eq!(a, b);
        let mut k = keys(&a);
        k.sort();
        assert_eq!(k, vec![1, 2, 3, 4, 5, 6]);
        assert_eq!(keys(&reverse_input(3)), vec![3, 2, 1]);
    }

    #[test]
    fn phase_thresholds() {
        assert_eq!(spin_phase_of(0, 17), SpinPhase::Phase3);
        assert_eq!(spin_phase_of(24_576, 256), SpinPhase::Phase1);
        assert_eq!(spin_phase_of(24_575, 256), SpinPhase::Phase2);
        assert_eq!(spin_phase_of(3072, 256), SpinPhase::Phase2);
        assert_eq!(spin_phase_of(3071, 256), SpinPhase::Phase3);
    }

    #[test]
    fn desired_bounds() {
        assert_eq!(desired_dirtiness(1024, 3, 0, 128), 128);
        assert_eq!(desired_dirtiness(1024, 3, 1, 128), 25);
        assert_eq!(desired_dirtiness(1024, 3, 2, 128), 4);
        assert_eq!(desired_dirtiness(1024, 3, 80, 128), 0);
    }

    #[test]
    fn regions_reversed_halves() {
        let r = region_report(&[1, 1, 1, 1, 0, 0, 0, 0], 1).unwrap();
        let got: Vec<(RegionClass, u64, usize)> = r
            .regions
            .iter()
            .map(|x| (x.class, x.dirtiness, x.distance))
            .collect();
        assert_eq!(
            got,
            vec![(RegionClass::Low, 4, 1), (RegionClass::High, 4, 1)]
        );
        // n / (5 * 2) = 0 at this size.
        assert_eq!(r.regions[0].desired_bound, 0);
        assert_eq!(r.total_dirtiness(), 8);
    }

    #[test]
    fn regions_clean_halves() {
        let r = region_report(&[0, 0, 0, 0, 1, 1, 1, 1], 1).unwrap();
        let d: Vec<u64> = r.regions.iter().map(|x| x.dirtiness).collect();
        assert_eq!(d, vec![0, 0]);
    }

    #[test]
    fn regions_with_mixed_middle() {
        // k = 3 over n = 8 at depth 2: crossover at cell 5, inside region 2.
        let r = region_report(&[0, 0, 0, 0, 0, 1, 1, 1], 2).unwrap();
        let got: Vec<(RegionClass, u64, usize)> = r
            .regions
            .iter()
            .map(|x| (x.class, x.dirtiness, x.distance))
            .collect();
        assert_eq!(
            got,
            vec![
                (RegionClass::Low, 0, 2),
                (RegionClass::Low, 0, 1),
                (RegionClass::Mixed, 2, 0),
                (RegionClass::High, 0, 1),
            ]
        );
    }

    #[test]
    fn regions_uneven_sizes() {
        let keys = vec![0i64; 10];
        let r = region_report(&keys, 2).unwrap();
        let sizes: Vec<usize> = r.regions.iter().map(Region::len).collect();
        assert_eq!(sizes, vec![2, 3, 2, 3]);
        assert!(r.regions.iter().all(|x| x.class == RegionClass::Low));
        let distances: Vec<usize> = r.regions.iter().map(|x| x.distance).collect();
        assert_eq!(distances, vec![4, 3, 2, 1]);
    }

    #[test]
    fn region_errors() {
        assert!(matches!(
            region_report(&[0, 2, 1], 0),
            Err(Error::NotZeroOne {
                position: 1,
                key: 2
            })
        ));
        assert!(region_report(&[0, 1, 1], 2).is_err());
    }

    #[test]
    fn leaf_dirtiness_counts_both_sides() {
        assert_eq!(leaf_dirtiness(&[0, 0, 1, 1]).unwrap(), 0);
        assert_eq!(leaf_dirtiness(&[1, 0, 0, 1]).unwrap(), 2);
        assert_eq!(leaf_dirtiness(&[1, 1, 0, 0]).unwrap(), 4);
        let r = region_report(&[1, 0, 0, 1], 2).unwrap();
        assert_eq!(r.total_dirtiness(), 2);
    }
}
