//! Seeded random generic linkages with integer lengths.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::Error;
use crate::linkage::Linkage;
use crate::verify::{verify, Check, VerifyOptions};

pub const DEFAULT_SEED: u64 = 0x5eed;

#[derive(Clone, Debug)]
pub struct FuzzOptions {
    pub seed: u64,
    pub min_n: usize,
    pub max_n: usize,
    pub cases: usize,
    /// Lengths are drawn uniformly from `1..=max_length`.
    pub max_length: i64,
}

impl Default for FuzzOptions {
    fn default() -> Self {
        FuzzOptions { seed: DEFAULT_SEED, min_n: 3, max_n: 7, cases: 24, max_length: 12 }
    }
}

/// Generated linkages plus the number of rejected draws.
#[derive(Clone, Debug, Default, Serialize)]
pub struct Sample {
    #[serde(skip)]
    pub linkages: Vec<Linkage>,
    pub rejected_degenerate: usize,
    pub rejected_empty: usize,
}

/// Draws `cases` generic linkages, cycling `n` through `min_n..=max_n`.
/// Degenerate draws and draws with an empty moduli space are discarded and
/// counted.
pub fn sample(opts: &FuzzOptions) -> Sample {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut out = Sample::default();
    if opts.max_n < opts.min_n {
        return out;
    }
    let span = opts.max_n - opts.min_n + 1;
    for i in 0..opts.cases {
        let n = opts.min_n + i % span;
        loop {
            let lengths: Vec<i64> = (0..n).map(|_| rng.gen_range(1..=opts.max_length)).collect();
            match Linkage::from_integers(&lengths) {
                Ok(l) => {
                    out.linkages.push(l);
                    break;
                }
                Err(Error::DegenerateLinkage { .. }) => out.rejected_degenerate += 1,
                Err(_) => out.rejected_empty += 1,
            }
        }
    }
    out
}

#[derive(Clone, Debug, Serialize)]
pub struct FuzzCase {
    pub index: usize,
    pub lengths: String,
    pub n: usize,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub failure: Option<Check>,
}

#[derive(Clone, Debug, Serialize)]
pub struct FuzzSummary {
    pub seed: u64,
    pub cases: Vec<FuzzCase>,
    pub passed: usize,
    pub failed: usize,
    pub rejected_degenerate: usize,
    pub rejected_empty: usize,
}

impl FuzzSummary {
    pub fn all_passed(&self) -> bool {
        self.failed == 0
    }
}

/// Samples and verifies, one case per thread, results in case order. Every
/// sampled linkage has at most `max_n` edges, so the size guard never
/// triggers.
pub fn run(opts: &FuzzOptions, verify_opts: &VerifyOptions) -> FuzzSummary {
    let sample = sample(opts);
    let cases: Vec<FuzzCase> = sample
        .linkages
        .par_iter()
        .enumerate()
        .map(|(index, l)| {
            let (pass, failure) = match verify(l, verify_opts) {
                Ok(report) => (report.passed(), report.first_failure().cloned()),
                Err(e) => (
                    false,
                    Some(Check { name: "input", pass: false, detail: e.to_string(), kind: Some("implementation") }),
                ),
            };
            FuzzCase { index, lengths: l.input_text(), n: l.n(), pass, failure }
        })
        .collect();
    let passed = cases.iter().filter(|c| c.pass).count();
    FuzzSummary {
        seed: opts.seed,
        failed: cases.len() - passed,
        passed,
        cases,
        rejected_degenerate: sample.rejected_degenerate,
        rejected_empty: sample.rejected_empty,
    }
}
