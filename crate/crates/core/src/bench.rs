//! Random-query benchmark over every EA query variant.
//!
//! All variants answer the same queries; their answers must agree exactly.
//! The report lists the mean work counters and latency per variant.

use std::fmt;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::generator::DAY;
use crate::index::EaIndex;
use crate::query::{EaAnswer, EaQuery, EaVariant, Engine, QueryError, QueryStats};
use crate::timetable::{StopId, Time, Timetable, INFINITY};

/// Random `(s, t, τ)` queries: stops uniform, τ uniform over
/// `[0, last event time of the first day]`.
pub fn random_queries(tt: &Timetable, n: usize, seed: u64) -> Vec<EaQuery> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let stops = tt.num_stops() as u32;
    if stops == 0 {
        return Vec::new();
    }
    let horizon = tt
        .events()
        .iter()
        .map(|e| e.time)
        .filter(|&t| t < DAY)
        .max()
        .unwrap_or(0);
    (0..n)
        .map(|_| {
            EaQuery::new(
                StopId(rng.gen_range(0..stops)),
                StopId(rng.gen_range(0..stops)),
                rng.gen_range(0..=horizon),
            )
        })
        .collect()
}

/// Order-sensitive fingerprint of a sequence of arrival times.
pub fn checksum(arrivals: impl IntoIterator<Item = Time>) -> u64 {
    arrivals.into_iter().fold(0xcbf2_9ce4_8422_2325, |acc, a| {
        (acc ^ a as u64).wrapping_mul(0x0000_0100_0000_01b3)
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VariantReport {
    pub variant: EaVariant,
    pub name: String,
    pub labels_scanned: f64,
    pub hubs_scanned: f64,
    pub hubs_matched: f64,
    pub latency_us: f64,
    pub checksum: u64,
}

/// Per-query comparisons between variants that differ in one flag.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct MonotonicityReport {
    /// Queries where enabling pruning increased hubs or labels scanned.
    pub pruning_violations: usize,
    /// Queries where binary search scanned more labels than linear search.
    pub binary_search_label_violations: usize,
    /// Variant pairs (linear, binary) whose mean labels scanned went up.
    pub binary_search_mean_violations: usize,
    pub comparisons: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchReport {
    pub queries: usize,
    pub reachable: usize,
    pub variants: Vec<VariantReport>,
    pub monotonicity: MonotonicityReport,
}

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("variant {variant} answered {got} for {query:?}, expected {expected}")]
    Disagreement {
        query: EaQuery,
        variant: String,
        expected: Time,
        got: Time,
    },
    #[error(transparent)]
    Query(#[from] QueryError),
}

fn mean(sum: u64, n: usize) -> f64 {
    if n == 0 {
        0.0
    } else {
        sum as f64 / n as f64
    }
}

/// Runs every query through all 16 variants.
pub fn run_bench(index: &EaIndex, queries: &[EaQuery]) -> Result<BenchReport, BenchError> {
    let variants = EaVariant::all();
    let mut answers: Vec<Vec<EaAnswer>> = Vec::with_capacity(variants.len());
    let mut latencies = Vec::with_capacity(variants.len());
    for &v in &variants {
        let start = Instant::now();
        let mut out = Vec::with_capacity(queries.len());
        for &q in queries {
            out.push(index.ea(q, v)?);
        }
        latencies.push(start.elapsed().as_secs_f64() * 1e6);
        answers.push(out);
    }

    for (k, &v) in variants.iter().enumerate().skip(1) {
        for (qi, &q) in queries.iter().enumerate() {
            let (expected, got) = (answers[0][qi].arrival, answers[k][qi].arrival);
            if expected != got {
                return Err(BenchError::Disagreement {
                    query: q,
                    variant: v.name(),
                    expected,
                    got,
                });
            }
        }
    }

    let position = |v: EaVariant| variants.iter().position(|&w| w == v).unwrap();
    let mut mono = MonotonicityReport::default();
    let sum = |k: usize, f: fn(&QueryStats) -> u64| answers[k].iter().map(|a| f(&a.stats)).sum::<u64>();
    for &v in &variants {
        if !v.pruning {
            let pruned = position(EaVariant { pruning: true, ..v });
            let plain = position(v);
            for (a, b) in answers[plain].iter().zip(&answers[pruned]) {
                let (a, b) = (&a.stats, &b.stats);
                mono.comparisons += 1;
                if b.hubs_scanned > a.hubs_scanned || b.labels_scanned > a.labels_scanned {
                    mono.pruning_violations += 1;
                }
            }
        }
        if !v.binary_search {
            let linear = position(v);
            let binary = position(EaVariant { binary_search: true, ..v });
            for (l, b) in answers[linear].iter().zip(&answers[binary]) {
                mono.comparisons += 1;
                if b.stats.labels_scanned > l.stats.labels_scanned {
                    mono.binary_search_label_violations += 1;
                }
            }
            if sum(binary, |s| s.labels_scanned) > sum(linear, |s| s.labels_scanned) {
                mono.binary_search_mean_violations += 1;
            }
        }
    }

    let n = queries.len();
    let reports = variants
        .iter()
        .enumerate()
        .map(|(k, &v)| VariantReport {
            variant: v,
            name: v.name(),
            labels_scanned: mean(sum(k, |s| s.labels_scanned), n),
            hubs_scanned: mean(sum(k, |s| s.hubs_scanned), n),
            hubs_matched: mean(sum(k, |s| s.hubs_matched), n),
            latency_us: if n == 0 { 0.0 } else { latencies[k] / n as f64 },
            checksum: checksum(answers[k].iter().map(|a| a.arrival)),
        })
        .collect();
    Ok(BenchReport {
        queries: n,
        reachable: answers
            .first()
            .map_or(0, |a| a.iter().filter(|x| x.arrival != INFINITY).count()),
        variants: reports,
        monotonicity: mono,
    })
}

fn mark(on: bool) -> &'static str {
    if on {
        "x"
    } else {
        " "
    }
}

impl fmt::Display for BenchReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{} queries, {} reachable", self.queries, self.reachable)?;
        writeln!(
            f,
            "{:<7} {:>4} {:>4} {:>4} {:>9} {:>10} {:>7} {:>10}  {:<16}",
            "labels", "Prn", "Hash", "Bin", "Lbls", "Hubs", "=", "time [µs]", "checksum"
        )?;
        for r in &self.variants {
            let engine = match r.variant.engine {
                Engine::EventLabels => "event",
                Engine::StopLabels => "stop",
            };
            writeln!(
                f,
                "{:<7} {:>4} {:>4} {:>4} {:>9.1} {:>10.1} {:>7.2} {:>10.2}  {:016x}",
                engine,
                mark(r.variant.pruning),
                mark(r.variant.hashing),
                mark(r.variant.binary_search),
                r.labels_scanned,
                r.hubs_scanned,
                r.hubs_matched,
                r.latency_us,
                r.checksum
            )?;
        }
        let m = &self.monotonicity;
        write!(
            f,
            "pruning violations: {}, binary-search label violations: {} per query, {} in the mean",
            m.pruning_violations, m.binary_search_label_violations, m.binary_search_mean_violations
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::labeling::VertexOrdering;
    use crate::tsv::parse_timetable;

    #[test]
    fn empty_run() {
        let tt = parse_timetable("#stops\nA\t0\nB\t0\n#trips\nx\tA@10>B@20\n").unwrap();
        let index = EaIndex::build(tt, VertexOrdering::Degree).unwrap();
        let report = run_bench(&index, &[]).unwrap();
        assert_eq!(report.queries, 0);
        assert!(report.variants.iter().all(|v| v.labels_scanned == 0.0));
    }

    #[test]
    fn queries_are_deterministic() {
        let tt = parse_timetable("#stops\nA\t0\nB\t0\n#trips\nx\tA@10>B@20\ny\tB@90000>A@90100\n").unwrap();
        let a = random_queries(&tt, 50, 4);
        assert_eq!(a, random_queries(&tt, 50, 4));
        assert!(a.iter().all(|q| q.departure <= 20));
    }
}
