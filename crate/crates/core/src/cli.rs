//! The `skm` command line front end.
//!
//! Exit codes: 0 success, 1 usage error, 2 verification failure.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigUint;
use serde_json::{json, Value};

use crate::asymptotics::{AsymptoticError, AsymptoticReport, DEFAULT_CHECK_N};
use crate::closedforms::{gf_marked, integer_sequence, Generator};
use crate::dpcount::{height_distribution, marked_distribution, CountOptions, CountTable};
use crate::path::{EnumFilter, Enumerator, Path, DEFAULT_ORACLE_LIMIT};
use crate::precision::DEFAULT_DIGITS;
use crate::sampler::{sample_uniform, sample_uniform_parallel, SampleSet, SamplerSpec};
use crate::series::MarkCap;
use crate::verify::{run_battery, VerifyOptions};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_VERIFY: i32 = 2;

/// Version tag of every JSON document.
pub const SCHEMA: &str = "1";

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Bfile,
    Text,
}

#[derive(Debug, Parser)]
#[command(
    name = "skm",
    version,
    about = "Exact counting and verification for skew Motzkin paths"
)]
pub struct Cli {
    #[command(flatten)]
    pub config: Config,
    #[command(subcommand)]
    pub command: Command,
}

/// Settings shared by every subcommand. Flags override the environment,
/// which overrides the defaults.
#[derive(Clone, Debug, Args)]
pub struct Config {
    /// z-truncation order of closed-form series.
    #[arg(long, global = true, env = "SKM_ORDER", default_value_t = 64)]
    pub order: usize,
    /// Decimal digits of floating-point work.
    #[arg(long, global = true, env = "SKM_DIGITS", default_value_t = DEFAULT_DIGITS)]
    pub digits: u32,
    /// Longest length the brute-force oracle will enumerate.
    #[arg(long, global = true, default_value_t = DEFAULT_ORACLE_LIMIT)]
    pub oracle_limit: usize,
    #[arg(long, global = true, env = "SKM_FORMAT", value_enum, default_value_t = Format::Text)]
    pub format: Format,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Exact counts from the layer DP.
    Count {
        #[arg(long)]
        length: usize,
        /// Final level (default 0).
        #[arg(long, conflicts_with = "all_levels")]
        level: Option<usize>,
        #[arg(long)]
        max_height: Option<usize>,
        /// One row per final level.
        #[arg(long)]
        all_levels: bool,
        /// Split counts by the layer of the last step.
        #[arg(long)]
        by_layer: bool,
    },
    /// Coefficients of a closed-form generating function.
    Series {
        /// sm, total, marked, level:J, bounded:H or layer:X:J.
        #[arg(long)]
        gf: String,
    },
    /// List or count paths with the brute-force oracle.
    Enumerate {
        #[arg(long)]
        length: usize,
        /// Final level (default 0).
        #[arg(long)]
        level: Option<usize>,
        /// Print every path, not only the count.
        #[arg(long)]
        print: bool,
    },
    /// Height profile of return paths.
    Heights {
        #[arg(long)]
        length: usize,
        /// Include the exact expected height.
        #[arg(long)]
        expected: bool,
    },
    /// (flats, lefts) distribution of return paths.
    Stats {
        #[arg(long)]
        length: usize,
    },
    /// Singularity constants and leading-order estimates.
    Asymptotics {
        /// Lengths for the estimate tables.
        #[arg(long = "check-n", num_args = 1..)]
        check_n: Vec<usize>,
    },
    /// Uniform random paths.
    Sample {
        #[arg(long)]
        length: usize,
        /// Final level; any level when omitted.
        #[arg(long)]
        level: Option<usize>,
        #[arg(long)]
        count: usize,
        #[arg(long)]
        seed: u64,
        /// Worker threads; 1 is the reproducibility baseline.
        #[arg(long, default_value_t = 1)]
        threads: usize,
    },
    /// Run the full cross-check battery.
    Verify {
        #[arg(long, default_value_t = 12)]
        max_length: usize,
    },
}

/// A command failure with its exit code.
#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Failure {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }
}

type Outcome = Result<String, Failure>;

/// Parses `argv` (including the program name), runs the command and writes
/// its output. Returns the process exit code.
pub fn run<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = out.write_all(text.as_bytes());
                    EXIT_OK
                }
                _ => {
                    let _ = err.write_all(text.as_bytes());
                    EXIT_USAGE
                }
            };
        }
    };
    let code = match execute(&cli, err) {
        Ok(text) => {
            let _ = out.write_all(text.as_bytes());
            EXIT_OK
        }
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            f.code
        }
    };
    let _ = out.flush();
    code
}

fn execute(cli: &Cli, err: &mut dyn Write) -> Outcome {
    let cfg = &cli.config;
    match &cli.command {
        Command::Count {
            length,
            level,
            max_height,
            all_levels,
            by_layer,
        } => count(cfg, *length, *level, *max_height, *all_levels, *by_layer),
        Command::Series { gf } => series(cfg, gf),
        Command::Enumerate {
            length,
            level,
            print,
        } => enumerate(cfg, *length, level.unwrap_or(0), *print),
        Command::Heights { length, expected } => heights(cfg, *length, *expected),
        Command::Stats { length } => stats(cfg, *length),
        Command::Asymptotics { check_n } => asymptotics(cfg, check_n),
        Command::Sample {
            length,
            level,
            count,
            seed,
            threads,
        } => sample(
            cfg,
            &SamplerSpec {
                n: *length,
                final_level: *level,
                seed: *seed,
                count: *count,
            },
            *threads,
        ),
        Command::Verify { max_length } => verify(cfg, *max_length, err),
    }
}

fn json_doc(command: &str, mut body: Value) -> String {
    let obj = body.as_object_mut().expect("json object");
    obj.insert("schema".into(), json!(SCHEMA));
    obj.insert("command".into(), json!(command));
    let mut s = serde_json::to_string_pretty(&body).expect("serializable");
    s.push('\n');
    s
}

fn unsupported(format: Format, command: &str) -> Failure {
    Failure::usage(format!("format {format:?} is not supported by {command}").to_lowercase())
}

fn layer_json(cells: &[BigUint; 4]) -> Value {
    json!({
        "F": cells[0].to_string(),
        "G": cells[1].to_string(),
        "H": cells[2].to_string(),
        "K": cells[3].to_string(),
    })
}

fn count(
    cfg: &Config,
    n: usize,
    level: Option<usize>,
    max_height: Option<usize>,
    all_levels: bool,
    by_layer: bool,
) -> Outcome {
    let options = CountOptions {
        height_cap: max_height,
    };
    let table = CountTable::build(n, options);
    let levels: Vec<usize> = if all_levels {
        (0..=table.top_level(n).expect("in table")).collect()
    } else {
        vec![level.unwrap_or(0)]
    };
    let layers = |n: usize, j: usize| -> [BigUint; 4] {
        let c = table.layers(n, j).expect("in table");
        [c[0].clone(), c[1].clone(), c[2].clone(), c[3].clone()]
    };
    let total = |n: usize, j: usize| table.count(n, j).expect("in table");
    let mut out = String::new();
    match cfg.format {
        Format::Text => {
            for &j in &levels {
                let mut line = String::new();
                if all_levels {
                    let _ = write!(line, "{j} ");
                }
                if by_layer {
                    let c = layers(n, j);
                    let _ = write!(line, "F={} G={} H={} K={} ", c[0], c[1], c[2], c[3]);
                }
                let _ = writeln!(out, "{line}{}", total(n, j));
            }
        }
        Format::Csv => {
            out.push_str("n,j,f,g,h,k,total\n");
            for &j in &levels {
                let c = layers(n, j);
                let _ = writeln!(
                    out,
                    "{n},{j},{},{},{},{},{}",
                    c[0],
                    c[1],
                    c[2],
                    c[3],
                    total(n, j)
                );
            }
        }
        Format::Bfile => {
            if all_levels {
                for &j in &levels {
                    let _ = writeln!(out, "{j} {}", total(n, j));
                }
            } else {
                let j = levels[0];
                for m in 0..=n {
                    let _ = writeln!(out, "{m} {}", total(m, j));
                }
            }
        }
        Format::Json => {
            let rows: Vec<Value> = levels
                .iter()
                .map(|&j| {
                    let mut row = json!({"j": j, "count": total(n, j).to_string()});
                    if by_layer {
                        row["layers"] = layer_json(&layers(n, j));
                    }
                    row
                })
                .collect();
            let mut body = json!({"n": n, "max_height": max_height});
            if all_levels {
                body["levels"] = json!(rows);
            } else {
                let row = &rows[0];
                body["level"] = row["j"].clone();
                body["count"] = row["count"].clone();
                if by_layer {
                    body["layers"] = row["layers"].clone();
                }
            }
            out = json_doc("count", body);
        }
    }
    Ok(out)
}

fn series(cfg: &Config, gf: &str) -> Outcome {
    let order = cfg.order;
    if gf == "marked" {
        return marked_series(cfg);
    }
    let generator: Generator = gf.parse().map_err(Failure::usage)?;
    let s = generator.evaluate(order);
    let coeffs = integer_sequence(&s, order);
    let mut out = String::new();
    match cfg.format {
        Format::Text => {
            let list: Vec<String> = coeffs.iter().map(ToString::to_string).collect();
            let _ = writeln!(out, "{}", list.join(","));
        }
        Format::Csv => {
            out.push_str("n,coefficient\n");
            for (n, c) in coeffs.iter().enumerate() {
                let _ = writeln!(out, "{n},{c}");
            }
        }
        Format::Bfile => {
            for (n, c) in coeffs.iter().enumerate() {
                let _ = writeln!(out, "{n} {c}");
            }
        }
        Format::Json => {
            let list: Vec<String> = coeffs.iter().map(ToString::to_string).collect();
            out = json_doc(
                "series",
                json!({"gf": generator.name(), "order": order, "coeffs": list}),
            );
        }
    }
    Ok(out)
}

fn marked_series(cfg: &Config) -> Outcome {
    let order = cfg.order;
    let s = gf_marked(order, Some(MarkCap(order as u32)));
    let coeff = |n: usize| s.coeff(n as i64).expect("computed to order");
    let mut out = String::new();
    match cfg.format {
        Format::Text => {
            for n in 0..=order {
                let _ = writeln!(out, "{n}: {}", coeff(n));
            }
        }
        Format::Csv => {
            out.push_str("n,flats,lefts,coefficient\n");
            for n in 0..=order {
                for (&(a, b), c) in coeff(n).terms() {
                    let _ = writeln!(out, "{n},{a},{b},{c}");
                }
            }
        }
        Format::Bfile => return Err(unsupported(Format::Bfile, "series --gf marked")),
        Format::Json => {
            let rows: Vec<Value> = (0..=order)
                .map(|n| {
                    let terms: Vec<Value> = coeff(n)
                        .terms()
                        .map(|(&(a, b), c)| json!({"flats": a, "lefts": b, "count": c.to_string()}))
                        .collect();
                    json!({"n": n, "terms": terms})
                })
                .collect();
            out = json_doc(
                "series",
                json!({"gf": "marked", "order": order, "coeffs": rows}),
            );
        }
    }
    Ok(out)
}

fn enumerate(cfg: &Config, n: usize, level: usize, print: bool) -> Outcome {
    let oracle = Enumerator::with_limit(cfg.oracle_limit);
    let filter = EnumFilter::at_level(level);
    let paths: Vec<Path> = if print || cfg.format == Format::Csv {
        oracle.enumerate(n, filter)
    } else {
        Ok(Vec::new())
    }
    .map_err(|e| Failure::usage(e.to_string()))?;
    let count = if print || cfg.format == Format::Csv {
        paths.len() as u64
    } else {
        oracle
            .count(n, filter)
            .map_err(|e| Failure::usage(e.to_string()))?
    };
    let mut out = String::new();
    match cfg.format {
        Format::Text => {
            for p in &paths {
                let _ = writeln!(out, "{p}");
            }
            let _ = writeln!(out, "{count}");
        }
        Format::Csv => {
            out.push_str("word,level,height,flats,lefts,layer\n");
            for p in &paths {
                let j = p.to_json();
                let _ = writeln!(
                    out,
                    "{},{},{},{},{},{}",
                    j.word, j.level, j.height, j.flats, j.lefts, j.layer
                );
            }
        }
        Format::Bfile => return Err(unsupported(Format::Bfile, "enumerate")),
        Format::Json => {
            let mut body = json!({"n": n, "level": level, "count": count.to_string()});
            if print {
                body["paths"] = json!(paths.iter().map(Path::to_json).collect::<Vec<_>>());
            }
            out = json_doc("enumerate", body);
        }
    }
    Ok(out)
}

fn heights(cfg: &Config, n: usize, expected: bool) -> Outcome {
    let profile = height_distribution(n);
    let mut out = String::new();
    match cfg.format {
        Format::Text => {
            for (h, c) in profile.at_most.iter().enumerate() {
                let _ = writeln!(out, "{h} {c}");
            }
            if expected {
                let _ = writeln!(out, "expected_height {}", profile.expected_height);
            }
        }
        Format::Csv => {
            out.push_str("n,H,at_most\n");
            for (h, c) in profile.at_most.iter().enumerate() {
                let _ = writeln!(out, "{n},{h},{c}");
            }
            if expected {
                let _ = writeln!(out, "{n},expected_height,{}", profile.expected_height);
            }
        }
        Format::Bfile => {
            for (h, c) in profile.at_most.iter().enumerate() {
                let _ = writeln!(out, "{h} {c}");
            }
        }
        Format::Json => {
            let at_most: Vec<String> = profile.at_most.iter().map(ToString::to_string).collect();
            let mut body = json!({"n": n, "at_most": at_most});
            if expected {
                body["expected_height"] = json!(profile.expected_height.to_string());
            }
            out = json_doc("heights", body);
        }
    }
    Ok(out)
}

fn stats(cfg: &Config, n: usize) -> Outcome {
    let dist = marked_distribution(n);
    let mut out = String::new();
    match cfg.format {
        Format::Text => {
            for (&(a, b), c) in &dist {
                let _ = writeln!(out, "{a} {b} {c}");
            }
        }
        Format::Csv => {
            out.push_str("flats,lefts,count\n");
            for (&(a, b), c) in &dist {
                let _ = writeln!(out, "{a},{b},{c}");
            }
        }
        Format::Bfile => return Err(unsupported(Format::Bfile, "stats")),
        Format::Json => {
            let rows: Vec<Value> = dist
                .iter()
                .map(|(&(a, b), c)| json!({"flats": a, "lefts": b, "count": c.to_string()}))
                .collect();
            out = json_doc("stats", json!({"n": n, "distribution": rows}));
        }
    }
    Ok(out)
}

fn asymptotics(cfg: &Config, check_n: &[usize]) -> Outcome {
    let ns: Vec<usize> = if check_n.is_empty() {
        DEFAULT_CHECK_N.to_vec()
    } else {
        check_n.to_vec()
    };
    let report = AsymptoticReport::build(cfg.digits, &ns).map_err(|e| match e {
        AsymptoticError::Unstable { .. } => Failure {
            code: EXIT_VERIFY,
            message: e.to_string(),
        },
        _ => Failure::usage(e.to_string()),
    })?;
    let mut out = String::new();
    match cfg.format {
        Format::Text => {
            let _ = writeln!(out, "digits {}", report.digits);
            for c in report.constants.iter().chain(&report.limit_checks) {
                let _ = writeln!(
                    out,
                    "{} {} reference {} delta {}",
                    c.name, c.value, c.reference, c.delta
                );
            }
            let _ = writeln!(
                out,
                "ladder agreement {:.1} digits",
                report.ladder_agreement_digits
            );
            for r in &report.counts {
                let rel = r.rel_error.as_deref().unwrap_or("-");
                let _ = writeln!(
                    out,
                    "count n={} exact={} estimate={} rel_error={rel}",
                    r.n, r.exact, r.estimate
                );
            }
            for r in &report.heights {
                let rel = r.rel_error.as_deref().unwrap_or("-");
                let _ = writeln!(
                    out,
                    "height n={} exact={} estimate={} rel_error={rel}",
                    r.n, r.exact, r.estimate
                );
            }
        }
        Format::Csv => out = report.counts_csv(),
        Format::Bfile => return Err(unsupported(Format::Bfile, "asymptotics")),
        Format::Json => {
            out = json_doc(
                "asymptotics",
                serde_json::to_value(&report).expect("serializable"),
            );
        }
    }
    Ok(out)
}

fn sample(cfg: &Config, spec: &SamplerSpec, threads: usize) -> Outcome {
    let paths = if threads == 1 {
        sample_uniform(spec)
    } else {
        sample_uniform_parallel(spec, threads)
    }
    .map_err(|e| Failure::usage(e.to_string()))?;
    let mut out = String::new();
    match cfg.format {
        Format::Text => {
            for p in &paths {
                let _ = writeln!(out, "{p}");
            }
        }
        Format::Csv => {
            out.push_str("word,level,height,flats,lefts,layer\n");
            for p in &paths {
                let j = p.to_json();
                let _ = writeln!(
                    out,
                    "{},{},{},{},{},{}",
                    j.word, j.level, j.height, j.flats, j.lefts, j.layer
                );
            }
        }
        Format::Bfile => return Err(unsupported(Format::Bfile, "sample")),
        Format::Json => {
            let set = SampleSet::new(spec, &paths);
            out = json_doc("sample", serde_json::to_value(&set).expect("serializable"));
        }
    }
    Ok(out)
}

fn verify(cfg: &Config, max_length: usize, err: &mut dyn Write) -> Outcome {
    let options = VerifyOptions {
        oracle_limit: cfg.oracle_limit,
        ..VerifyOptions::with_max_length(max_length)
    };
    let report = run_battery(&options).map_err(|e| Failure::usage(e.to_string()))?;
    let body = match cfg.format {
        Format::Json => json_doc(
            "verify",
            serde_json::to_value(&report).expect("serializable"),
        ),
        Format::Text | Format::Csv => report.to_text(),
        Format::Bfile => return Err(unsupported(Format::Bfile, "verify")),
    };
    if let Some((check, m)) = report.first_failure() {
        // The report goes to stdout even on failure; the diff to stderr.
        let _ = err.write_all(body.as_bytes());
        return Err(Failure {
            code: EXIT_VERIFY,
            message: format!("check {check} failed: {m}"),
        });
    }
    Ok(body)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_str(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let argv = std::iter::once("skm").chain(args.iter().copied());
        let code = run(argv, &mut out, &mut err);
        (
            code,
            String::from_utf8(out).unwrap(),
            String::from_utf8(err).unwrap(),
        )
    }

    #[test]
    fn count_level_one() {
        let (code, out, _) = run_str(&["count", "--length", "5", "--level", "1"]);
        assert_eq!((code, out.trim()), (0, "36"));
    }

    #[test]
    fn unknown_subcommand_is_usage_error() {
        let (code, _, err) = run_str(&["frobnicate"]);
        assert_eq!(code, EXIT_USAGE);
        assert!(!err.is_empty());
    }

    #[test]
    fn help_exits_zero() {
        let (code, out, _) = run_str(&["--help"]);
        assert_eq!(code, 0);
        assert!(out.contains("verify"));
    }

    #[test]
    fn bad_generator_is_usage_error() {
        let (code, _, err) = run_str(&["series", "--gf", "layer:Z:1", "--order", "3"]);
        assert_eq!(code, EXIT_USAGE);
        assert!(err.contains("unknown layer"));
    }
}
