//! Sweeps the practical schedule's repetition count and tail length, and
//! prints the failure count over random permutations for each setting.
//!
//!     cargo run --release --example calibrate -- [trials]

use rayon::prelude::*;

use oblivisort::rng::{trial_seed, INPUT_STREAM};
use oblivisort::{annealing_sort, practical_schedule, random_permutation, RngStream};

fn failures(n: usize, repetitions: u64, tail: u64, trials: u64, master: u64) -> u64 {
    let schedule = practical_schedule(n, repetitions, tail).expect("valid schedule");
    (0..trials)
        .into_par_iter()
        .filter(|&t| {
            let seed = trial_seed(master, n, t);
            let mut array = random_permutation(n, &mut RngStream::derive(seed, INPUT_STREAM));
            let report = annealing_sort(&mut array, &schedule, &mut RngStream::new(seed), None)
                .expect("sort runs");
            !report.sorted
        })
        .count() as u64
}

fn main() {
    let trials: u64 = std::env::args()
        .nth(1)
        .map(|s| s.parse().expect("trial count"))
        .unwrap_or(1000);
    println!("n,c_rep,tail_rounds,total_repetitions,failures,trials");
    for n in [256usize, 1024] {
        for repetitions in 1..=10u64 {
            for tail in [0u64, 8, 16, 32] {
                let total = practical_schedule(n, repetitions, tail)
                    .unwrap()
                    .total_repetitions();
                let failed = failures(n, repetitions, tail, trials, 0xC0FFEE);
                println!("{n},{repetitions},{tail},{total},{failed},{trials}");
            }
        }
    }
}
