//! Helpers shared by the integration tests. Each test binary uses a subset.
#![allow(dead_code)]

mod goldens;

#[allow(unused_imports)]
pub use goldens::{PARSER_GOLDEN, PROTOCOL_GOLDEN};

use std::collections::BTreeMap;

use matgraph::server::{handle_request, GraphRegistry};
use matgraph::sparse::{mxm, vxm, BitVector, Semiring, SparseMatrix};
use matgraph::{Properties, PropertyGraph, PropertyValue};
use rand::Rng;

// ---- dense oracles ----

pub type Dense = Vec<Vec<bool>>;

pub fn random_tuples<R: Rng>(rng: &mut R, nrows: usize, ncols: usize, density: f64) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for r in 0..nrows {
        for c in 0..ncols {
            if rng.random_bool(density) {
                out.push((r, c));
            }
        }
    }
    out
}

pub fn to_dense(nrows: usize, ncols: usize, tuples: &[(usize, usize)]) -> Dense {
    let mut d = vec![vec![false; ncols]; nrows];
    for &(r, c) in tuples {
        d[r][c] = true;
    }
    d
}

pub fn dense_of(m: &SparseMatrix) -> Dense {
    (0..m.nrows())
        .map(|r| (0..m.ncols()).map(|c| m.contains(r, c)).collect())
        .collect()
}

pub fn dense_vxm(v: &[bool], a: &Dense, ncols: usize, mask: Option<&[bool]>, complement: bool) -> Vec<bool> {
    (0..ncols)
        .map(|j| {
            let allowed = match mask {
                None => true,
                Some(m) => m[j] != complement,
            };
            allowed && v.iter().zip(a).any(|(&vi, row)| vi && row[j])
        })
        .collect()
}

pub fn dense_mxm(a: &Dense, b: &Dense, mask: Option<&Dense>) -> Dense {
    let n = a.len();
    let m = b.first().map_or(0, Vec::len);
    let inner = b.len();
    (0..n)
        .map(|i| {
            (0..m)
                .map(|j| {
                    mask.is_none_or(|mk| mk[i][j]) && (0..inner).any(|k| a[i][k] && b[k][j])
                })
                .collect()
        })
        .collect()
}

/// One random masked vxm checked against the dense oracle.
pub fn vxm_instance<R: Rng>(rng: &mut R, density: f64) -> bool {
    let n = rng.random_range(1..=64);
    let m = rng.random_range(1..=64);
    let a_t = random_tuples(rng, n, m, density);
    let a = SparseMatrix::build(n, m, &a_t).unwrap();
    let v_idx: Vec<usize> = (0..n).filter(|_| rng.random_bool(density.max(0.05))).collect();
    let v = BitVector::from_indices(n, v_idx.clone()).unwrap();
    let mut v_dense = vec![false; n];
    v_idx.iter().for_each(|&i| v_dense[i] = true);
    let (mask, mask_dense) = match rng.random_range(0..3) {
        0 => (None, None),
        _ => {
            let idx: Vec<usize> = (0..m).filter(|_| rng.random_bool(0.5)).collect();
            let mut d = vec![false; m];
            idx.iter().for_each(|&i| d[i] = true);
            (Some(BitVector::from_indices(m, idx).unwrap()), Some(d))
        }
    };
    let complement = rng.random_bool(0.5);
    let got = vxm(&v, &a, mask.as_ref(), complement).unwrap();
    if got.check_invariants().is_err() {
        return false;
    }
    let want = dense_vxm(&v_dense, &to_dense(n, m, &a_t), m, mask_dense.as_deref(), complement);
    (0..m).all(|j| got.contains(j) == want[j])
}

/// One random boolean mxm (optionally masked) checked against the dense oracle.
pub fn mxm_instance<R: Rng>(rng: &mut R, density: f64) -> bool {
    let n = rng.random_range(1..=64);
    let k = rng.random_range(1..=64);
    let m = rng.random_range(1..=64);
    let a_t = random_tuples(rng, n, k, density);
    let b_t = random_tuples(rng, k, m, density);
    let a = SparseMatrix::build(n, k, &a_t).unwrap();
    let b = SparseMatrix::build(k, m, &b_t).unwrap();
    let mask_t = rng.random_bool(0.5).then(|| random_tuples(rng, n, m, 0.5));
    let mask = mask_t.as_ref().map(|t| SparseMatrix::build(n, m, t).unwrap());
    let got = mxm(&a, &b, Semiring::BOOLEAN, mask.as_ref()).unwrap();
    if got.check_invariants().is_err() {
        return false;
    }
    let mask_d = mask_t.as_ref().map(|t| to_dense(n, m, t));
    let want = dense_mxm(&to_dense(n, k, &a_t), &to_dense(k, m, &b_t), mask_d.as_ref());
    dense_of(&got) == want
}

// ---- random property graphs ----

const LABELS: &[&str] = &["Person", "Admin", "weird label", "tab\there", "üñí", "50%"];
const RELS: &[&str] = &["KNOWS", "LIKES", "has space", "a,b", "x:y"];
const KEYS: &[&str] = &["name", "age", "w", "ok", "odd key", "semi;colon", "eq=sign"];

fn random_value<R: Rng>(rng: &mut R) -> PropertyValue {
    match rng.random_range(0..4) {
        0 => PropertyValue::Int(rng.random_range(-1_000_000..1_000_000)),
        1 => PropertyValue::Float(match rng.random_range(0..4) {
            0 => 0.1,
            1 => -2.5e-300,
            2 => 1.0e20,
            _ => rng.random_range(-1.0e6..1.0e6),
        }),
        2 => PropertyValue::Bool(rng.random_bool(0.5)),
        _ => {
            let len = rng.random_range(0..8);
            let alphabet: Vec<char> = "ab Z09%;:,\t\n=é'\"\\".chars().collect();
            PropertyValue::Str((0..len).map(|_| alphabet[rng.random_range(0..alphabet.len())]).collect())
        }
    }
}

fn random_props<R: Rng>(rng: &mut R) -> Properties {
    let mut props = BTreeMap::new();
    for _ in 0..rng.random_range(0..4) {
        props.insert(KEYS[rng.random_range(0..KEYS.len())].to_string(), random_value(rng));
    }
    props
}

pub fn random_graph<R: Rng>(rng: &mut R) -> PropertyGraph {
    let mut g = PropertyGraph::new();
    let n = rng.random_range(0..40);
    for _ in 0..n {
        let labels: Vec<&str> = (0..rng.random_range(0..3))
            .map(|_| LABELS[rng.random_range(0..LABELS.len())])
            .collect();
        let props = random_props(rng);
        g.create_node(&labels, props);
    }
    if n > 0 {
        for _ in 0..rng.random_range(0..3 * n) {
            let (s, d) = (rng.random_range(0..n), rng.random_range(0..n));
            let rel = RELS[rng.random_range(0..RELS.len())];
            let props = random_props(rng);
            g.create_edge(s, rel, d, props).unwrap();
        }
    }
    g.flush();
    g
}

// ---- protocol ----

/// Replays the golden session; returns mismatch descriptions.
pub fn protocol_mismatches(mut send: impl FnMut(&str) -> String) -> Vec<String> {
    PROTOCOL_GOLDEN
        .iter()
        .filter_map(|(req, want)| {
            let got = send(req);
            (got != *want).then(|| format!("{req:?}\n  want {want:?}\n  got  {got:?}"))
        })
        .collect()
}

pub fn in_process(registry: &GraphRegistry) -> impl FnMut(&str) -> String + '_ {
    move |line| handle_request(line, registry).text
}

// ---- CSV recomputation ----

#[derive(Debug, PartialEq)]
pub struct CsvReport {
    pub details: Vec<[String; 4]>,
    pub summaries: Vec<[String; 6]>,
}

fn fields<const N: usize>(line: &str) -> Result<[String; N], String> {
    let parts: Vec<String> = line.split(',').map(String::from).collect();
    parts.try_into().map_err(|_| format!("expected {N} fields in {line:?}"))
}

pub fn parse_csv(text: &str) -> Result<CsvReport, String> {
    if text.contains('\r') || !text.ends_with('\n') {
        return Err("expected LF line endings".into());
    }
    let mut lines = text.lines();
    if lines.next() != Some("k,seed,count,elapsed_us") {
        return Err("bad detail header".into());
    }
    let mut details = Vec::new();
    let mut summaries = Vec::new();
    let mut in_summary = false;
    for line in lines {
        if line == "k,n_seeds,mean_us,median_us,p99_us,mean_count" {
            in_summary = true;
        } else if in_summary {
            summaries.push(fields::<6>(line)?);
        } else {
            details.push(fields::<4>(line)?);
        }
    }
    if !in_summary {
        return Err("missing summary header".into());
    }
    Ok(CsvReport { details, summaries })
}

/// "12.345" -> 12345 (thousandths), exact.
fn thousandths(s: &str) -> Result<u128, String> {
    let (int, frac) = s.split_once('.').ok_or_else(|| format!("no decimal point in {s:?}"))?;
    if frac.len() != 3 {
        return Err(format!("expected 3 decimals in {s:?}"));
    }
    let i: u128 = int.parse().map_err(|_| format!("bad number {s:?}"))?;
    let f: u128 = frac.parse().map_err(|_| format!("bad number {s:?}"))?;
    Ok(i * 1000 + f)
}

fn show(thou: u128) -> String {
    format!("{}.{:03}", thou / 1000, thou % 1000)
}

fn rounded_div(num: u128, den: u128) -> u128 {
    // half rounds up
    (num * 2 + den) / (den * 2)
}

/// Recomputes the summary rows from the detail rows.
pub fn recompute_summaries(details: &[[String; 4]]) -> Result<Vec<[String; 6]>, String> {
    let mut groups: Vec<(String, Vec<u128>, Vec<u128>)> = Vec::new();
    for [k, _seed, count, elapsed] in details {
        let t = thousandths(elapsed)?;
        let c: u128 = count.parse().map_err(|_| format!("bad count {count:?}"))?;
        match groups.last_mut() {
            Some((gk, times, counts)) if gk == k => {
                times.push(t);
                counts.push(c);
            }
            _ => groups.push((k.clone(), vec![t], vec![c])),
        }
    }
    Ok(groups
        .into_iter()
        .map(|(k, mut times, counts)| {
            let n = times.len() as u128;
            times.sort();
            let mean = rounded_div(times.iter().sum(), n);
            let mid = times.len() / 2;
            let median = if times.len() % 2 == 1 {
                times[mid]
            } else {
                rounded_div(times[mid - 1] + times[mid], 2)
            };
            let rank = (times.len() * 99).div_ceil(100).max(1);
            let p99 = times[rank - 1];
            let mean_count = rounded_div(counts.iter().sum::<u128>() * 1000, n);
            [k, n.to_string(), show(mean), show(median), show(p99), show(mean_count)]
        })
        .collect())
}
