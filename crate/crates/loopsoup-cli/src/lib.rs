//! File formats and report serialization for the `loopsoup` command-line
//! tool.
//!
//! The weight matrix file is a JSON object `{"n": <int>, "q": [[entry, ...],
//! ...]}` with `n` rows of `n` entries each; an entry is `[re, im]`, the
//! real shorthand `[re]`, or a bare number.

use std::fmt;

use num_complex::Complex64;
use serde_json::{json, Value};

use loopsoup::report::VerificationReport;
use loopsoup::sampler::BubbleSample;
use loopsoup::WeightMatrix;

/// A failure with the exit code it should produce: 1 for domain errors and
/// verification failures, 2 for unusable input.
#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.message)
    }
}

impl Failure {
    pub fn usage(message: impl Into<String>) -> Self {
        Failure { code: 2, message: message.into() }
    }

    pub fn domain(message: impl Into<String>) -> Self {
        Failure { code: 1, message: message.into() }
    }
}

impl From<loopsoup::Error> for Failure {
    fn from(e: loopsoup::Error) -> Self {
        Failure::domain(e.to_string())
    }
}

/// Parses the weight matrix file format.
pub fn parse_matrix(text: &str) -> Result<WeightMatrix, Failure> {
    let value: Value = serde_json::from_str(text).map_err(|e| {
        Failure::usage(format!(
            "matrix file is not valid JSON (line {}, column {}): {e}",
            e.line(),
            e.column()
        ))
    })?;
    let obj = value
        .as_object()
        .ok_or_else(|| Failure::usage("matrix file must be a JSON object"))?;
    let n = obj
        .get("n")
        .and_then(Value::as_u64)
        .ok_or_else(|| Failure::usage("matrix file needs a positive integer field \"n\""))?
        as usize;
    if n == 0 {
        return Err(Failure::usage("\"n\" must be positive"));
    }
    let rows = obj
        .get("q")
        .and_then(Value::as_array)
        .ok_or_else(|| Failure::usage("matrix file needs an array field \"q\""))?;
    if rows.len() != n {
        return Err(Failure::usage(format!("\"q\" has {} rows, expected {n}", rows.len())));
    }
    let mut data = Vec::with_capacity(n * n);
    for (i, row) in rows.iter().enumerate() {
        let entries = row
            .as_array()
            .ok_or_else(|| Failure::usage(format!("row {} of \"q\" is not an array", i + 1)))?;
        if entries.len() != n {
            return Err(Failure::usage(format!(
                "row {} of \"q\" has {} entries, expected {n}",
                i + 1,
                entries.len()
            )));
        }
        for (j, entry) in entries.iter().enumerate() {
            data.push(parse_entry(entry).ok_or_else(|| {
                Failure::usage(format!(
                    "entry ({},{}) must be a number, [re], or [re, im]",
                    i + 1,
                    j + 1
                ))
            })?);
        }
    }
    WeightMatrix::new(n, data).map_err(|e| Failure::usage(e.to_string()))
}

fn parse_entry(entry: &Value) -> Option<Complex64> {
    match entry {
        Value::Number(x) => Some(Complex64::new(x.as_f64()?, 0.0)),
        Value::Array(parts) => match parts.as_slice() {
            [re] => Some(Complex64::new(re.as_f64()?, 0.0)),
            [re, im] => Some(Complex64::new(re.as_f64()?, im.as_f64()?)),
            _ => None,
        },
        _ => None,
    }
}

/// Writes the full `[re, im]` form of the matrix file.
pub fn matrix_to_json(q: &WeightMatrix) -> Value {
    let n = q.n();
    let rows: Vec<Value> = (0..n)
        .map(|u| {
            let row: Vec<Value> = (0..n)
                .map(|v| {
                    let z = q.entry(u, v);
                    json!([z.re, z.im])
                })
                .collect();
            Value::Array(row)
        })
        .collect();
    json!({ "n": n, "q": rows })
}

/// Parses per-coordinate grid axes: comma-separated values, semicolon
/// between coordinates, e.g. `0.5,1,2;0.5,1,2`.
pub fn parse_grid(spec: &str) -> Result<Vec<Vec<f64>>, Failure> {
    spec.split(';')
        .map(|axis| {
            axis.split(',')
                .map(|x| {
                    x.trim()
                        .parse::<f64>()
                        .map_err(|_| Failure::usage(format!("bad grid value {x:?}")))
                })
                .collect()
        })
        .collect()
}

/// Parses an occupation point: comma-separated nonnegative reals.
pub fn parse_point(spec: &str) -> Result<Vec<f64>, Failure> {
    spec.split(',')
        .map(|x| {
            x.trim()
                .parse::<f64>()
                .map_err(|_| Failure::usage(format!("bad coordinate {x:?}")))
        })
        .collect()
}

/// Parses a sparse current entry `u,v,count` with 1-based vertices.
pub fn parse_current_entry(spec: &str) -> Result<(usize, usize, u64), Failure> {
    let parts: Vec<&str> = spec.split(',').map(str::trim).collect();
    if parts.len() != 3 {
        return Err(Failure::usage(format!("current entry {spec:?} must be u,v,count")));
    }
    let u: usize = parts[0]
        .parse()
        .map_err(|_| Failure::usage(format!("bad vertex {:?}", parts[0])))?;
    let v: usize = parts[1]
        .parse()
        .map_err(|_| Failure::usage(format!("bad vertex {:?}", parts[1])))?;
    let count: u64 = parts[2]
        .parse()
        .map_err(|_| Failure::usage(format!("bad count {:?}", parts[2])))?;
    if u == 0 || v == 0 {
        return Err(Failure::usage("vertices are 1-based"));
    }
    Ok((u - 1, v - 1, count))
}

/// Assembles sparse 1-based entries into a current over `n` vertices.
pub fn build_current(
    n: usize,
    entries: &[(usize, usize, u64)],
) -> Result<loopsoup::loops::Current, Failure> {
    let mut counts = vec![0u64; n * n];
    for &(u, v, c) in entries {
        if u >= n || v >= n {
            return Err(Failure::usage(format!(
                "vertex {} out of range for n={n}",
                u.max(v) + 1
            )));
        }
        counts[u * n + v] += c;
    }
    loopsoup::loops::Current::from_counts(n, counts)
        .map_err(|e| Failure::domain(e.to_string()))
}

pub fn complex_json(z: Complex64) -> Value {
    json!({ "re": z.re, "im": z.im })
}

pub fn report_json(report: &VerificationReport) -> Value {
    json!({
        "suite": report.suite,
        "params": report.params,
        "passed": report.passed(),
        "checks": report.checks.iter().map(|c| json!({
            "label": c.label,
            "lhs": c.lhs,
            "rhs": c.rhs,
            "discrepancy": c.discrepancy,
            "bound": c.bound,
            "passed": c.passed,
        })).collect::<Vec<Value>>(),
    })
}

pub fn report_text(report: &VerificationReport, out: &mut String) {
    use std::fmt::Write;
    let status = if report.passed() { "PASS" } else { "FAIL" };
    let _ = writeln!(out, "suite {}: {status} ({})", report.suite, report.params);
    for c in &report.checks {
        let mark = if c.passed { "ok " } else { "FAIL" };
        let _ = writeln!(
            out,
            "  [{mark}] {} | discrepancy {} bound {} | {} vs {}",
            c.label, c.discrepancy, c.bound, c.lhs, c.rhs
        );
    }
}

/// One line of the sample dump: index, loop tuple, sparse current triplets
/// (1-based), and the occupation vector.
pub fn sample_record(index: usize, bubble: &BubbleSample, occupation: &[f64]) -> String {
    let loops: Vec<String> = bubble
        .loops
        .iter()
        .map(|l| {
            let verts: Vec<String> =
                l.vertices().iter().map(|v| (v + 1).to_string()).collect();
            format!("[{}]", verts.join(","))
        })
        .collect();
    let n = bubble.current.n();
    let mut triplets = Vec::new();
    for u in 0..n {
        for v in 0..n {
            let c = bubble.current.entry(u, v);
            if c > 0 {
                triplets.push(format!("{},{},{c}", u + 1, v + 1));
            }
        }
    }
    let occ: Vec<String> = occupation.iter().map(|x| x.to_string()).collect();
    format!(
        "{index}\tloops={}\tcurrent={}\tocc={}",
        loops.join(""),
        triplets.join(";"),
        occ.join(",")
    )
}
