use std::fmt::Debug;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sbar_core::complex::parse_complex_with_action;
use sbar_core::field::{format_rational, parse_rational};
use sbar_core::genfun::{
    build_qn, critical_spectrum, identity_suite, index_signature, maslov_index_check,
    rotation_barcode, smith_fixed_locus_check, GFTuple, DEFAULT_N0, DEFAULT_TOL,
};
use sbar_core::periodic::{
    beta_stats, betamax_validate, betatot_integral, expand_window, homological_count, hz_certificate,
    periodic_window_dimension, smith_barcode_check, smith_sample_windows,
};
use sbar_core::pjoin::{associativity_sweep, pj_pullback, pj_pushforward, ProjClass};
use sbar_core::{
    bottleneck_distance, compute_barcode, smith_dimension_check, window_dimension, Barcode, Extended,
    FieldSpec, PeriodicBarcode, Rational,
};

mod svg;

#[derive(Parser)]
#[command(name = "sbar", version, about = "Barcodes, periodic barcodes on CP^d and generating-function checks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Barcode of a filtered complex file.
    Barcode {
        file: PathBuf,
        /// Recompute over another field (from a complex over Q).
        #[arg(long)]
        field: Option<String>,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
        /// Window for SVG output.
        #[arg(long, num_args = 2, value_names = ["A", "B"], allow_hyphen_values = true)]
        window: Option<Vec<String>>,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Bars containing exactly one of `a`, `b`.
    Window {
        barcode: PathBuf,
        #[arg(allow_hyphen_values = true)]
        a: String,
        #[arg(allow_hyphen_values = true)]
        b: String,
    },
    Bottleneck { first: PathBuf, second: PathBuf },
    /// Bar lengths, K, N and the β_max validator of a periodic barcode.
    PeriodicStats {
        pbarcode: PathBuf,
        /// Also render the expanded window as SVG.
        #[arg(long, num_args = 2, value_names = ["A", "B"], allow_hyphen_values = true)]
        window: Option<Vec<String>>,
        #[arg(long)]
        svg: Option<PathBuf>,
    },
    BetatotIntegral {
        pbarcode: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        a: String,
        #[arg(long)]
        n: u32,
    },
    /// Smith inequalities between a barcode and its p-th iterate over F_p.
    Smith {
        pbarcode: PathBuf,
        iterate: PathBuf,
        #[arg(long)]
        p: u32,
        #[arg(long, default_value_t = 16)]
        samples: u32,
        /// Length of the sampled windows.
        #[arg(long, default_value = "1/2")]
        len: String,
        #[arg(long, num_args = 2, value_names = ["A", "B"], allow_hyphen_values = true)]
        window: Option<Vec<String>>,
    },
    /// Smallest prime forcing more periodic points than the fixed points allow.
    Hz {
        #[arg(long)]
        d: u32,
        #[arg(long)]
        betatot: String,
        #[arg(long)]
        n: u64,
        #[arg(long = "B")]
        bound: String,
        /// `a..b` (inclusive) or a comma list.
        #[arg(long, default_value = "2..100")]
        primes: String,
    },
    /// Real index, coindex and nullity of Q_n on (C^{d+1})^n.
    Qindex {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        d: usize,
        #[arg(long)]
        tol: Option<f64>,
    },
    Maslov {
        #[arg(long)]
        d: usize,
        #[arg(long)]
        m: usize,
        #[arg(long, allow_hyphen_values = true)]
        t: f64,
        #[arg(long, default_value_t = DEFAULT_N0)]
        n0: usize,
        #[arg(long)]
        tol: Option<f64>,
    },
    /// Barcode of a diagonal rotation of CP^d from its generating functions.
    Rotation {
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        coeffs: Vec<f64>,
        #[arg(long)]
        m: usize,
        #[arg(long, default_value_t = 3)]
        n: usize,
        #[arg(long, default_value_t = DEFAULT_N0)]
        n0: usize,
        #[arg(long, default_value_t = 256)]
        grid: usize,
        #[arg(long)]
        tol: Option<f64>,
    },
    /// Critical values and indices of the generating function of a tuple file.
    Spectrum {
        tuple: PathBuf,
        #[arg(long)]
        m: usize,
        #[arg(long, default_value_t = 256)]
        grid: usize,
        #[arg(long, default_value_t = DEFAULT_N0)]
        n0: usize,
        #[arg(long)]
        tol: Option<f64>,
    },
    VerifyIdentities {
        #[arg(long, value_enum, default_value_t = Suite::All)]
        suite: Suite,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 100)]
        seeds: u64,
    },
    /// Smith dimension inequality on a complex file with an `act` block.
    SmithComplex { file: PathBuf },
    Pjoin {
        #[command(subcommand)]
        op: PjoinOp,
    },
}

#[derive(Subcommand)]
enum PjoinOp {
    /// pj^* u^k in H^*(CP^m × CP^n).
    Pullback { k: u32, m: u32, n: u32 },
    /// [CP^i] × [CP^j] in CP^{i+j+1}.
    Push { i: u32, j: u32 },
    /// Both bracketings for all i, j, k ≤ max.
    AssocSweep { max: u32 },
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Svg,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Suite {
    All,
    Bmn,
    Finverse,
    Fcyclic,
    Antisymmetry,
    Smith,
    Smith2,
}

const RESIDUAL_BOUND: f64 = 1e-8;

enum Failure {
    Input { kind: String, message: String },
    Violation { check: &'static str, report: String },
}

type Outcome = Result<String, Failure>;

fn kind_of<E: Debug>(e: &E) -> String {
    let name: String = format!("{e:?}").chars().take_while(|c| c.is_alphanumeric()).collect();
    let mut out = String::new();
    for (i, c) in name.chars().enumerate() {
        if c.is_uppercase() && i > 0 {
            out.push('-');
        }
        out.push(c.to_ascii_lowercase());
    }
    out
}

fn input<E: Debug + std::fmt::Display>(e: E) -> Failure {
    Failure::Input {
        kind: kind_of(&e),
        message: e.to_string(),
    }
}

fn usage(message: impl Into<String>) -> Failure {
    Failure::Input {
        kind: "usage".into(),
        message: message.into(),
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::Input {
        kind: "io".into(),
        message: format!("{}: {e}", path.display()),
    })
}

fn write(path: &Path, text: &str) -> Result<(), Failure> {
    std::fs::write(path, text).map_err(|e| Failure::Input {
        kind: "io".into(),
        message: format!("{}: {e}", path.display()),
    })
}

fn rational(s: &str) -> Result<Rational, Failure> {
    parse_rational(s).map_err(input)
}

fn window(w: &[String]) -> Result<(Rational, Rational), Failure> {
    Ok((rational(&w[0])?, rational(&w[1])?))
}

/// `--tol`, then `SB_TOL`, then the library default.
fn tolerance(flag: Option<f64>) -> Result<f64, Failure> {
    let tol = match flag {
        Some(t) => t,
        None => match std::env::var("SB_TOL") {
            Ok(v) => v.trim().parse().map_err(|_| usage(format!("SB_TOL is not a number: {v}")))?,
            Err(_) => DEFAULT_TOL,
        },
    };
    if tol.is_finite() && tol > 0.0 {
        Ok(tol)
    } else {
        Err(usage(format!("tolerance must be positive, got {tol}")))
    }
}

fn verdict(holds: bool, check: &'static str, report: String) -> Outcome {
    if holds {
        Ok(report)
    } else {
        Err(Failure::Violation { check, report })
    }
}

fn load_barcode(path: &Path) -> Result<Barcode, Failure> {
    Barcode::from_json(&read(path)?).map_err(input)
}

fn load_periodic(path: &Path) -> Result<PeriodicBarcode, Failure> {
    PeriodicBarcode::from_json(&read(path)?).map_err(input)
}

fn parse_primes(s: &str) -> Result<Vec<u32>, Failure> {
    let bad = || usage(format!("cannot read prime list `{s}`"));
    let candidates: Vec<u32> = if let Some((a, b)) = s.split_once("..") {
        let a: u32 = a.trim().parse().map_err(|_| bad())?;
        let b: u32 = b.trim().trim_start_matches('=').parse().map_err(|_| bad())?;
        (a..=b).filter(|&p| sbar_core::field::is_prime(p as u64)).collect()
    } else {
        s.split(',').map(|x| x.trim().parse().map_err(|_| bad())).collect::<Result<_, _>>()?
    };
    if candidates.is_empty() {
        return Err(bad());
    }
    Ok(candidates)
}

fn default_window(b: &Barcode) -> (Rational, Rational) {
    let mut ends: Vec<Rational> = Vec::new();
    for bar in b.bars() {
        ends.push(bar.birth.clone());
        if let Extended::Finite(d) = &bar.death {
            ends.push(d.clone());
        }
    }
    let lo = ends.iter().min().cloned().unwrap_or_default().floor();
    let hi = ends.iter().max().cloned().unwrap_or_default().floor() + Rational::from_integer(1.into());
    (lo, hi)
}

fn run(command: Command) -> Outcome {
    match command {
        Command::Barcode {
            file,
            field,
            format,
            window: w,
            output,
        } => {
            let parsed = parse_complex_with_action(&read(&file)?).map_err(input)?;
            let complex = match field {
                Some(f) => {
                    let spec: FieldSpec = f.parse().map_err(input)?;
                    parsed.complex.over_field(spec).map_err(input)?
                }
                None => parsed.complex,
            };
            let barcode = compute_barcode(&complex);
            let text = match format {
                Format::Json => barcode.to_json(),
                Format::Svg => {
                    let (lo, hi) = match w {
                        Some(w) => window(&w)?,
                        None => default_window(&barcode),
                    };
                    svg::render(&barcode, &lo, &hi)
                }
            };
            match output {
                Some(path) => {
                    write(&path, &text)?;
                    Ok(String::new())
                }
                None => Ok(text),
            }
        }
        Command::Window { barcode, a, b } => {
            let text = read(&barcode)?;
            let (a, b) = (rational(&a)?, rational(&b)?);
            let dim = match Barcode::from_json(&text) {
                Ok(bc) => window_dimension(&bc, &a, &b).map_err(input)?,
                Err(e) => match PeriodicBarcode::from_json(&text) {
                    Ok(pb) => periodic_window_dimension(&pb, &a, &b).map_err(input)?,
                    Err(_) => return Err(input(e)),
                },
            };
            Ok(format!("dim={dim}"))
        }
        Command::Bottleneck { first, second } => {
            let d = bottleneck_distance(&load_barcode(&first)?, &load_barcode(&second)?);
            Ok(format!("distance={d}"))
        }
        Command::PeriodicStats { pbarcode, window: w, svg } => {
            let pb = load_periodic(&pbarcode)?;
            let stats = beta_stats(&pb);
            let report = betamax_validate(&pb);
            if let Some(path) = svg {
                let Some(w) = w else {
                    return Err(usage("--svg needs --window A B"));
                };
                let (a, b) = window(&w)?;
                let expanded = expand_window(&pb, &a, &b).map_err(input)?;
                write(&path, &svg::render(&expanded, &a, &b))?;
            }
            let betas: Vec<String> = stats.betas.iter().map(format_rational).collect();
            let bounds: Vec<String> = report.refined_bounds.iter().map(format_rational).collect();
            let text = format!(
                "betas=[{}]\nbeta_max={}\nbeta_tot={}\nK={}\nN={}\nbound_1={}\nrefined_bounds=[{}]\nbetamax_validate={}",
                betas.join(","),
                format_rational(&stats.beta_max),
                format_rational(&stats.beta_tot),
                stats.k,
                homological_count(&pb),
                report.bound_1,
                bounds.join(","),
                if report.holds { "holds" } else { "violated" }
            );
            verdict(report.holds, "betamax", text)
        }
        Command::BetatotIntegral { pbarcode, a, n } => {
            let pb = load_periodic(&pbarcode)?;
            let r = betatot_integral(&pb, &rational(&a)?, n).map_err(input)?;
            let direct = beta_stats(&pb).beta_tot;
            let text = format!(
                "integral={}\nbeta_tot_integral={}\nbeta_tot={}",
                format_rational(&r.integral),
                format_rational(&r.beta_tot),
                format_rational(&direct)
            );
            verdict(r.beta_tot == direct, "betatot-integral", text)
        }
        Command::Smith {
            pbarcode,
            iterate,
            p,
            samples,
            len,
            window: w,
        } => {
            let pb = load_periodic(&pbarcode)?;
            let pbp = load_periodic(&iterate)?;
            let windows = match w {
                Some(w) => vec![window(&w)?],
                None => smith_sample_windows(&pb, &pbp, p, samples, &rational(&len)?),
            };
            let r = smith_barcode_check(&pb, &pbp, p, &windows).map_err(input)?;
            let mut lines = vec![format!(
                "beta_tot={} beta_tot_p={} total={}",
                format_rational(&r.beta_tot),
                format_rational(&r.beta_tot_p),
                if r.total_holds { "holds" } else { "violated" }
            )];
            for win in &r.windows {
                lines.push(format!(
                    "window ({}, {}): lhs={} rhs={} {}",
                    format_rational(&win.a),
                    format_rational(&win.b),
                    win.lhs,
                    win.rhs,
                    if win.holds { "holds" } else { "violated" }
                ));
            }
            verdict(r.holds, "smith", lines.join("\n"))
        }
        Command::Hz {
            d,
            betatot,
            n,
            bound,
            primes,
        } => {
            let primes = parse_primes(&primes)?;
            let cert = hz_certificate(d, &rational(&betatot)?, n, &rational(&bound)?, &primes).map_err(input)?;
            match cert.min_prime_a {
                Some(a) => Ok(format!("A={a}")),
                None => verdict(
                    false,
                    "hz",
                    format!("A=none (threshold {} not exceeded)", format_rational(&cert.threshold)),
                ),
            }
        }
        Command::Qindex { n, d, tol } => {
            let q = build_qn(n, d).map_err(input)?;
            let s = index_signature(&q, tolerance(tol)?).map_err(input)?.real();
            Ok(format!("ind={} coind={} null={}", s.minus, s.plus, s.zero))
        }
        Command::Maslov { d, m, t, n0, tol } => {
            let r = maslov_index_check(d, m, t, n0, tolerance(tol)?).map_err(input)?;
            let text = format!(
                "ind(t)={} null(t)={} ind(0)={} null(0)={}\nnonpositive_difference={} expected={}\nstrict_difference={}\n{}",
                r.at_t.minus,
                r.at_t.zero,
                r.at_zero.minus,
                r.at_zero.zero,
                r.kappa_difference,
                r.expected,
                r.strict_difference,
                if r.holds { "holds" } else { "violated" }
            );
            verdict(r.holds, "maslov", text)
        }
        Command::Rotation {
            coeffs,
            m,
            n,
            n0,
            grid,
            tol,
        } => {
            let r = rotation_barcode(&coeffs, m, n, n0, grid, tolerance(tol)?).map_err(input)?;
            let stats = beta_stats(&r.barcode);
            let reps: Vec<String> = r.representatives.iter().map(|x| format!("{x:.10}")).collect();
            let bm = betamax_validate(&r.barcode).holds;
            let text = format!(
                "representatives=[{}]\nmax_action_deviation={:.3e}\nK={}\nN={}\nbetamax_validate={}\n{}",
                reps.join(","),
                r.max_action_deviation,
                stats.k,
                homological_count(&r.barcode),
                if bm { "holds" } else { "violated" },
                r.barcode.to_json()
            );
            verdict(bm, "betamax", text)
        }
        Command::Spectrum { tuple, m, grid, n0, tol } => {
            let sigma = GFTuple::from_json(&read(&tuple)?).map_err(input)?;
            let s = critical_spectrum(&sigma, m, grid, n0, tolerance(tol)?).map_err(input)?;
            let points: Vec<serde_json::Value> = s
                .points
                .iter()
                .map(|p| {
                    serde_json::json!({
                        "t": p.t,
                        "morse_index": p.morse_index,
                        "line": p.line.iter().map(|c| [c.re, c.im]).collect::<Vec<_>>(),
                    })
                })
                .collect();
            let doc = serde_json::json!({ "points": points, "non_converged": s.non_converged });
            Ok(serde_json::to_string(&doc).expect("plain data"))
        }
        Command::VerifyIdentities { suite, seed, seeds } => verify_identities(suite, seed, seeds),
        Command::SmithComplex { file } => {
            let parsed = parse_complex_with_action(&read(&file)?).map_err(input)?;
            let action = parsed.action.ok_or_else(|| usage("the complex file has no `act` block"))?;
            let r = smith_dimension_check(&parsed.complex, &action).map_err(input)?;
            let text = format!("dim_total={} dim_fixed={}", r.dim_total, r.dim_fixed);
            verdict(r.holds, "smith-complex", text)
        }
        Command::Pjoin { op } => match op {
            PjoinOp::Pullback { k, m, n } => Ok(pj_pullback(k, m, n).map_err(input)?.to_string()),
            PjoinOp::Push { i, j } => {
                let a = ProjClass::basis(i, i).map_err(input)?;
                let b = ProjClass::basis(j, j).map_err(input)?;
                Ok(pj_pushforward(&a, &b).map_err(input)?.to_string())
            }
            PjoinOp::AssocSweep { max } => {
                let failures = associativity_sweep(max).map_err(input)?;
                let total = (max as u64 + 1).pow(3);
                verdict(
                    failures.is_empty(),
                    "associativity",
                    format!("{} of {total} triples associate{}", total - failures.len() as u64, if failures.is_empty() { String::new() } else { format!("; failures {failures:?}") }),
                )
            }
        },
    }
}

fn verify_identities(suite: Suite, seed: u64, seeds: u64) -> Outcome {
    let wants = |s: Suite| suite == Suite::All || suite == s;
    let names = ["bmn", "finverse", "fcyclic", "antisymmetry", "smith", "smith2"];
    let mut worst = [0.0f64; 6];
    for k in 0..seeds {
        let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(k));
        let d = rng.random_range(0..=2usize);
        let n = [1usize, 3, 5][rng.random_range(0..3)];
        let m = [1usize, 3, 5][rng.random_range(0..3)];
        let s = GFTuple::random_quadratic(d, n, 0.3, &mut rng);
        let s2 = GFTuple::random_quadratic(d, m, 0.3, &mut rng);
        let t: f64 = rng.random_range(-1.0..1.0);
        let sample_seed = rng.random();
        if wants(Suite::Bmn) || wants(Suite::Finverse) || wants(Suite::Fcyclic) || wants(Suite::Antisymmetry) {
            let r = identity_suite(&s, &s2, 4, sample_seed).map_err(input)?;
            for (slot, v) in [r.bmn.unwrap_or(0.0), r.finverse, r.fcyclic, r.antisymmetry].into_iter().enumerate() {
                worst[slot] = worst[slot].max(v);
            }
        }
        if wants(Suite::Smith) {
            for p in [3u32, 5] {
                let h = (p as i64 - 1) / 2;
                for q in -h..=h {
                    let r = smith_fixed_locus_check(&s, 1, t, DEFAULT_N0, p, q, 2, sample_seed).map_err(input)?;
                    worst[4] = worst[4].max(r.max());
                }
            }
        }
        if wants(Suite::Smith2) {
            for q in 0..=1 {
                let r = smith_fixed_locus_check(&s, 1, t, DEFAULT_N0, 2, q, 2, sample_seed).map_err(input)?;
                worst[5] = worst[5].max(r.max());
            }
        }
    }
    let selected: Vec<usize> = (0..6)
        .filter(|&i| {
            wants([Suite::Bmn, Suite::Finverse, Suite::Fcyclic, Suite::Antisymmetry, Suite::Smith, Suite::Smith2][i])
        })
        .collect();
    let lines: Vec<String> = selected
        .iter()
        .map(|&i| format!("{}={:.3e} {}", names[i], worst[i], if worst[i] < RESIDUAL_BOUND { "ok" } else { "violated" }))
        .collect();
    verdict(selected.iter().all(|&i| worst[i] < RESIDUAL_BOUND), "identities", lines.join("\n"))
}

/// Writes to stdout, ignoring a closed pipe.
fn emit(text: &str) {
    let mut out = std::io::stdout().lock();
    let _ = writeln!(out, "{}", text.trim_end());
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return ExitCode::SUCCESS;
            }
            let msg = e.to_string();
            eprintln!("E:usage: {}", msg.lines().next().unwrap_or("").trim_start_matches("error: "));
            return ExitCode::from(2);
        }
    };
    match run(cli.command) {
        Ok(text) => {
            if !text.is_empty() {
                emit(&text);
            }
            ExitCode::SUCCESS
        }
        Err(Failure::Violation { check, report }) => {
            emit(&report);
            eprintln!("E:violation: {check}");
            ExitCode::from(1)
        }
        Err(Failure::Input { kind, message }) => {
            eprintln!("E:{kind}: {message}");
            ExitCode::from(2)
        }
    }
}
