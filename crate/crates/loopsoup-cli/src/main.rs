//! Command-line driver: validation, exact computation, verification suites,
//! and Monte Carlo sampling over weight matrix files.

use std::fs;
use std::io::Write;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde_json::{json, Value};

use loopsoup::current_field::{nu_c, occupation_density_series};
use loopsoup::enumeration::{nu_c_oracle_bubble, nu_c_oracle_loopsoup};
use loopsoup::gff::density_f_abs_z2;
use loopsoup::rng::CounterRng;
use loopsoup::sampler;
use loopsoup::verify::{self, VerifyOptions};
use loopsoup::weights::green;
use loopsoup::WeightMatrix;

use loopsoup_cli::{
    build_current, complex_json, matrix_to_json, parse_current_entry, parse_grid, parse_matrix,
    parse_point, report_json, report_text, sample_record, Failure,
};

#[derive(Parser)]
#[command(name = "loopsoup", version, about = "Loop soups, currents, and complex Gaussian free fields on weighted digraphs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Report basic predicates of a weight matrix file.
    Validate {
        #[arg(long)]
        input: String,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Evaluate the current field at a current given as sparse u,v,count
    /// triplets (1-based).
    Current {
        /// Sparse entries, e.g. --entry 1,2,1 --entry 2,1,1
        #[arg(long = "entry", required = true)]
        entries: Vec<String>,
        #[arg(long)]
        input: String,
        /// Also run both enumeration oracles.
        #[arg(long)]
        oracles: bool,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Evaluate the continuous occupation density at a point, through the
    /// truncated current series and through the |Z|^2 quadrature.
    Density {
        /// Occupation point, e.g. 1.0,1.0
        point: String,
        #[arg(long)]
        input: String,
        #[arg(long = "max-total", default_value_t = 20)]
        max_total: u64,
        #[arg(long = "quad", default_value_t = 64)]
        quad: usize,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Run a verification suite; nonzero exit on failure.
    Verify {
        /// One of: proposition, lemma, identities, green, isomorphism,
        /// moments, indicator, montecarlo, all.
        suite: String,
        /// Optional weight matrix fed to the suites that accept one.
        #[arg(long)]
        input: Option<String>,
        #[arg(long = "max-total", default_value_t = 20)]
        max_total: u64,
        #[arg(long = "quad", default_value_t = 64)]
        quad: usize,
        #[arg(long, default_value_t = 100_000)]
        samples: usize,
        #[arg(long, default_value_t = 0x100F_50E7)]
        seed: u64,
        /// Override the suite's headline tolerance (in (0, 1)).
        #[arg(long)]
        tol: Option<f64>,
        /// Isomorphism grid for the input matrix: per-coordinate lists,
        /// e.g. 0.5,1,2;0.5,1,2
        #[arg(long)]
        grid: Option<String>,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Draw bubble-soup samples with occupation points; writes one record
    /// per line to --out and a summary to stdout.
    Sample {
        #[arg(long)]
        input: String,
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Path for the line-oriented sample records.
        #[arg(long)]
        out: Option<String>,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => code,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code as u8)
        }
    }
}

fn read_matrix(path: &str) -> Result<WeightMatrix, Failure> {
    let text = fs::read_to_string(path)
        .map_err(|e| Failure::usage(format!("cannot read {path}: {e}")))?;
    parse_matrix(&text)
}

fn run(command: Command) -> Result<ExitCode, Failure> {
    match command {
        Command::Validate { input, format } => cmd_validate(&input, format),
        Command::Current { entries, input, oracles, format } => {
            cmd_current(&entries, &input, oracles, format)
        }
        Command::Density { point, input, max_total, quad, format } => {
            cmd_density(&point, &input, max_total, quad, format)
        }
        Command::Verify { suite, input, max_total, quad, samples, seed, tol, grid, format } => {
            cmd_verify(&suite, input.as_deref(), max_total, quad, samples, seed, tol, grid.as_deref(), format)
        }
        Command::Sample { input, samples, seed, out, format } => {
            cmd_sample(&input, samples, seed, out.as_deref(), format)
        }
    }
}

fn cmd_validate(input: &str, format: Format) -> Result<ExitCode, Failure> {
    let q = read_matrix(input)?;
    let rho = q.spectral_radius_abs();
    let samplable = sampler::samplable_entries(&q);
    let samplable_reason = samplable.as_ref().err().map(|e| e.to_string());
    let row_sums = q.row_sums();
    match format {
        Format::Json => {
            let doc = json!({
                "command": "validate",
                "input": input,
                "n": q.n(),
                "rho_abs": rho,
                "integrable": q.is_integrable(),
                "hermitian": q.is_hermitian(),
                "row_sums": row_sums.iter().map(|&z| complex_json(z)).collect::<Vec<Value>>(),
                "samplable": samplable.is_ok(),
                "samplable_reason": samplable_reason,
                "matrix": matrix_to_json(&q),
            });
            println!("{doc}");
        }
        Format::Text => {
            println!("input: {input}");
            println!("n: {}", q.n());
            println!("rho_abs: {rho}");
            println!("integrable: {}", q.is_integrable());
            println!("hermitian: {}", q.is_hermitian());
            let sums: Vec<String> = row_sums.iter().map(|z| format_complex(*z)).collect();
            println!("row_sums: [{}]", sums.join(", "));
            match samplable_reason {
                None => println!("samplable: true"),
                Some(reason) => println!("samplable: false ({reason})"),
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn format_complex(z: Complex64) -> String {
    format!("{}{}{}i", z.re, if z.im < 0.0 { "-" } else { "+" }, z.im.abs())
}

fn cmd_current(
    entries: &[String],
    input: &str,
    oracles: bool,
    format: Format,
) -> Result<ExitCode, Failure> {
    let q = read_matrix(input)?;
    let parsed: Vec<(usize, usize, u64)> = entries
        .iter()
        .map(|e| parse_current_entry(e))
        .collect::<Result<_, _>>()?;
    let current = build_current(q.n(), &parsed)?;
    let closed = nu_c(&q, &current)?;
    let bubble = if oracles { Some(nu_c_oracle_bubble(&q, &current)?) } else { None };
    let soup = if oracles { Some(nu_c_oracle_loopsoup(&q, &current)?) } else { None };
    match format {
        Format::Json => {
            let mut doc = json!({
                "command": "current",
                "input": input,
                "current": parsed.iter().map(|&(u, v, c)| json!([u + 1, v + 1, c])).collect::<Vec<Value>>(),
                "nu_c": complex_json(closed),
            });
            if let Some(b) = bubble {
                doc["bubble_oracle"] = complex_json(b);
            }
            if let Some(s) = soup {
                doc["loopsoup_oracle"] = complex_json(s);
            }
            println!("{doc}");
        }
        Format::Text => {
            println!("nu_c: {}", format_complex(closed));
            if let Some(b) = bubble {
                println!("bubble_oracle: {}", format_complex(b));
            }
            if let Some(s) = soup {
                println!("loopsoup_oracle: {}", format_complex(s));
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_density(
    point: &str,
    input: &str,
    max_total: u64,
    quad: usize,
    format: Format,
) -> Result<ExitCode, Failure> {
    let q = read_matrix(input)?;
    let t = parse_point(point)?;
    let series = occupation_density_series(&q, &t, max_total)?;
    // The quadrature route needs a Hermitian weight; report it when it
    // applies.
    let quadrature = if q.is_hermitian() { Some(density_f_abs_z2(&q, &t, quad)?) } else { None };
    match format {
        Format::Json => {
            let mut doc = json!({
                "command": "density",
                "input": input,
                "point": t,
                "series": {
                    "re": series.value.re,
                    "im": series.value.im,
                    "max_total": series.max_total,
                    "tail_bound": series.tail_bound,
                },
            });
            if let Some(d) = &quadrature {
                doc["quadrature"] = json!({
                    "value": d.value,
                    "error_estimate": d.error_estimate,
                    "points_per_dim": d.points_per_dim,
                });
            }
            println!("{doc}");
        }
        Format::Text => {
            println!(
                "series: {} (max_total {}, tail_bound {})",
                format_complex(series.value),
                series.max_total,
                series.tail_bound
            );
            match &quadrature {
                Some(d) => println!(
                    "quadrature: {} (points_per_dim {}, error_estimate {})",
                    d.value, d.points_per_dim, d.error_estimate
                ),
                None => println!("quadrature: skipped (weight is not Hermitian)"),
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

#[allow(clippy::too_many_arguments)]
fn cmd_verify(
    suite: &str,
    input: Option<&str>,
    max_total: u64,
    quad: usize,
    samples: usize,
    seed: u64,
    tol: Option<f64>,
    grid: Option<&str>,
    format: Format,
) -> Result<ExitCode, Failure> {
    if let Some(t) = tol {
        if !(0.0 < t && t < 1.0) {
            return Err(Failure::usage("per the run configuration, --tol must lie in (0, 1)"));
        }
    }
    let extra = input.map(read_matrix).transpose()?;
    let opts = VerifyOptions {
        max_total,
        quad_points: quad,
        samples,
        seed,
        tol,
        grid: grid.map(parse_grid).transpose()?,
    };
    let extra_ref = extra.as_ref();
    let reports = match suite {
        "proposition" => vec![verify::proposition_suite(extra_ref, &opts)?],
        "lemma" => vec![verify::lemma_suite(extra_ref, &opts)?],
        "identities" => vec![verify::identities_suite(&opts)?],
        "green" => vec![verify::green_suite(&opts)?],
        "isomorphism" => vec![verify::isomorphism_suite(extra_ref, &opts)?],
        "moments" => vec![verify::moments_suite(extra_ref, &opts)?],
        "indicator" => vec![verify::indicator_suite(&opts)?],
        "montecarlo" => vec![verify::montecarlo_suite(extra_ref, &opts)?],
        "all" => verify::all_suites(extra_ref, &opts)?,
        other => {
            return Err(Failure::usage(format!(
                "unknown suite {other:?}; expected proposition, lemma, identities, green, \
                 isomorphism, moments, indicator, montecarlo, or all"
            )))
        }
    };
    let passed = reports.iter().all(|r| r.passed());
    match format {
        Format::Json => {
            let doc = json!({
                "command": "verify",
                "suite": suite,
                "passed": passed,
                "reports": reports.iter().map(report_json).collect::<Vec<Value>>(),
            });
            println!("{doc}");
        }
        Format::Text => {
            let mut out = String::new();
            for r in &reports {
                report_text(r, &mut out);
            }
            print!("{out}");
            println!("overall: {}", if passed { "PASS" } else { "FAIL" });
        }
    }
    Ok(if passed { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn cmd_sample(
    input: &str,
    samples: usize,
    seed: u64,
    out: Option<&str>,
    format: Format,
) -> Result<ExitCode, Failure> {
    let q = read_matrix(input)?;
    sampler::samplable_entries(&q)?;
    let n = q.n();
    let g = green(&q)?;
    let mut dump: Option<std::io::BufWriter<fs::File>> = out
        .map(|path| -> Result<_, Failure> {
            let file = fs::File::create(path)
                .map_err(|e| Failure::usage(format!("cannot create {path}: {e}")))?;
            Ok(std::io::BufWriter::new(file))
        })
        .transpose()?;
    let mut occupation_sums = vec![0.0f64; n];
    let mut trivial = 0usize;
    for i in 0..samples {
        let mut rng = CounterRng::stream(seed, i as u64);
        let (bubble, occupation) = sampler::sample_occupied_bubble(&q, &mut rng)?;
        if bubble.current.is_zero() {
            trivial += 1;
        }
        for (acc, &x) in occupation_sums.iter_mut().zip(&occupation) {
            *acc += x;
        }
        if let Some(w) = dump.as_mut() {
            writeln!(w, "{}", sample_record(i, &bubble, &occupation))
                .map_err(|e| Failure::usage(format!("write failed: {e}")))?;
        }
    }
    if let Some(mut w) = dump {
        w.flush().map_err(|e| Failure::usage(format!("write failed: {e}")))?;
    }
    let mean: Vec<f64> = occupation_sums.iter().map(|s| s / samples as f64).collect();
    let green_diag: Vec<f64> = (0..n).map(|u| g.entry(u, u).re).collect();
    match format {
        Format::Json => {
            let doc = json!({
                "command": "sample",
                "input": input,
                "samples": samples,
                "seed": seed,
                "mean_occupation": mean,
                "green_diagonal": green_diag,
                "empty_current_fraction": trivial as f64 / samples as f64,
                "out": out,
            });
            println!("{doc}");
        }
        Format::Text => {
            println!("samples: {samples} (seed {seed})");
            println!("mean_occupation: {mean:?}");
            println!("green_diagonal: {green_diag:?}");
            println!("empty_current_fraction: {}", trivial as f64 / samples as f64);
            if let Some(path) = out {
                println!("records: {path}");
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}
