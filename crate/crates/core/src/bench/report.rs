use std::fmt::Write as _;
use std::io;
use std::path::Path;

use crate::graph::NodeId;
use crate::khop::KHopMode;

pub const DETAIL_HEADER: &str = "k,seed,count,elapsed_us";
pub const SUMMARY_HEADER: &str = "k,n_seeds,mean_us,median_us,p99_us,mean_count";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Sample {
    pub seed: NodeId,
    pub count: usize,
    pub elapsed_ns: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KHopGroup {
    pub k: usize,
    pub samples: Vec<Sample>,
}

/// Summary statistics. Times are nanoseconds, `mean_count_milli` is the
/// mean count times 1000, all rounded half up.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct KHopSummary {
    pub k: usize,
    pub n_seeds: usize,
    pub mean_ns: u64,
    pub median_ns: u64,
    pub p99_ns: u64,
    pub mean_count_milli: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KHopReport {
    pub mode: KHopMode,
    pub groups: Vec<KHopGroup>,
}

fn div_round(num: u128, den: u128) -> u64 {
    ((2 * num + den) / (2 * den)) as u64
}

impl KHopGroup {
    pub fn summary(&self) -> KHopSummary {
        let n = self.samples.len();
        let mut times: Vec<u64> = self.samples.iter().map(|s| s.elapsed_ns).collect();
        times.sort_unstable();
        let (mean_ns, median_ns, p99_ns, mean_count_milli) = if n == 0 {
            (0, 0, 0, 0)
        } else {
            let total: u128 = times.iter().map(|&t| t as u128).sum();
            let median = if n % 2 == 1 {
                times[n / 2]
            } else {
                div_round(times[n / 2 - 1] as u128 + times[n / 2] as u128, 2)
            };
            // nearest rank
            let rank = (99 * n).div_ceil(100);
            let counts: u128 = self.samples.iter().map(|s| s.count as u128).sum();
            (
                div_round(total, n as u128),
                median,
                times[rank - 1],
                div_round(counts * 1000, n as u128),
            )
        };
        KHopSummary {
            k: self.k,
            n_seeds: n,
            mean_ns,
            median_ns,
            p99_ns,
            mean_count_milli,
        }
    }
}

fn micros(ns: u64) -> String {
    format!("{}.{:03}", ns / 1000, ns % 1000)
}

impl KHopReport {
    pub fn summaries(&self) -> Vec<KHopSummary> {
        self.groups.iter().map(KHopGroup::summary).collect()
    }

    pub fn rows(&self) -> usize {
        self.groups.iter().map(|g| g.samples.len()).sum()
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        out.push_str(DETAIL_HEADER);
        out.push('\n');
        for g in &self.groups {
            for s in &g.samples {
                let _ = writeln!(out, "{},{},{},{}", g.k, s.seed, s.count, micros(s.elapsed_ns));
            }
        }
        out.push_str(SUMMARY_HEADER);
        out.push('\n');
        for s in self.summaries() {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{}",
                s.k,
                s.n_seeds,
                micros(s.mean_ns),
                micros(s.median_ns),
                micros(s.p99_ns),
                micros(s.mean_count_milli),
            );
        }
        out
    }
}

pub fn report_csv(report: &KHopReport, path: impl AsRef<Path>) -> io::Result<()> {
    std::fs::write(path, report.to_csv())
}
