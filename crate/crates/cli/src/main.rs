use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use clap::{Parser, Subcommand, ValueEnum};
use num_bigint::BigUint;
use serde::Serialize;
use serde_json::{json, Value};

use vdw::bounds::{self, CandidateWindow};
use vdw::cnf::{self, InstanceMeta, SatResult};
use vdw::search::{self, Budget, Coloring, SearchOutcome};
use vdw::{radix, registry, report, Error, VdwCertificate};

#[derive(Parser)]
#[command(name = "vdw", version, about = "Localization, bounds and exact search for van der Waerden numbers")]
struct Cli {
    /// Output format: human-readable text, or one JSON object per line.
    #[arg(long, value_enum, global = true, default_value_t = Format::Text)]
    format: Format,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Radix expansion of a value.
    Expand {
        #[arg(value_parser = big)]
        value: BigUint,
        #[arg(long, value_parser = big)]
        base: BigUint,
    },
    /// Power interval [b^n, b^(n+1)) containing a value.
    Localize {
        #[arg(value_parser = big)]
        value: BigUint,
        #[arg(long, value_parser = big)]
        base: BigUint,
    },
    /// Real exponent log_base(value).
    Delta {
        #[arg(value_parser = big)]
        value: BigUint,
        #[arg(long, value_parser = big)]
        base: BigUint,
    },
    /// Split log_base(value) into n + eps1 + eps2.
    Decompose {
        #[arg(value_parser = big)]
        value: BigUint,
        #[arg(long, value_parser = big)]
        base: BigUint,
    },
    /// Least n with r^(n+1) > a + (k-1)d/2.
    ApBound {
        #[arg(long, value_parser = big)]
        a: BigUint,
        #[arg(long, value_parser = big)]
        d: BigUint,
        #[arg(long)]
        k: u64,
        #[arg(long)]
        r: u64,
    },
    /// Least n with r^(n+1) > k^m.
    CrossBound {
        #[arg(long)]
        m: u64,
        #[arg(long)]
        k: u64,
        #[arg(long)]
        r: u64,
    },
    /// Least exponent of any W exceeding a lower bound.
    ExpFloor {
        #[arg(value_parser = big)]
        lower: BigUint,
        #[arg(long, value_parser = big)]
        base: BigUint,
    },
    /// Check n <= k^2 - 1 and w < r^(k^2).
    Condition {
        #[arg(value_parser = big)]
        w: BigUint,
        #[arg(long)]
        r: u64,
        #[arg(long)]
        k: u64,
    },
    /// n-th root envelope base <= value^(1/n) < base((n+1)b_n)^(1/n).
    Roots {
        #[arg(value_parser = big)]
        value: BigUint,
        #[arg(long, value_parser = big)]
        base: BigUint,
        /// Take the root of this order instead of the leading exponent.
        #[arg(long)]
        n: Option<u64>,
    },
    /// Consecutive power intervals for exponents min..=max.
    Window {
        #[arg(long, value_parser = big)]
        base: BigUint,
        #[arg(long)]
        min: u64,
        #[arg(long)]
        max: u64,
    },
    /// Exponent and localization tables for the dataset.
    Table {
        /// Dataset CSV; the bundled one by default.
        #[arg(long)]
        dataset: Option<PathBuf>,
    },
    /// Compute W(r,k) exactly and write a certificate.
    Search {
        #[arg(long)]
        r: u8,
        #[arg(long)]
        k: u64,
        #[arg(long)]
        max_nodes: Option<u64>,
        /// Wall-clock limit in seconds.
        #[arg(long)]
        time_limit: Option<f64>,
        /// Worker threads for exhaustive steps; 1 gives reproducible node counts.
        #[arg(long, default_value_t = 1)]
        threads: usize,
        /// Certificate path; defaults to w<r>_<k>.cert.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Re-verify a certificate file or a single coloring.
    Verify {
        #[arg(long, conflicts_with_all = ["coloring", "r"])]
        cert: Option<PathBuf>,
        /// Digit string such as 12211221 (comma-separated when r > 9).
        #[arg(long, requires_all = ["r", "k"])]
        coloring: Option<String>,
        #[arg(long)]
        r: Option<u8>,
        #[arg(long)]
        k: Option<u64>,
    },
    /// DIMACS CNF for colorings of [1, n] without a monochromatic k-AP.
    Cnf {
        #[arg(long)]
        r: u8,
        #[arg(long)]
        k: u64,
        #[arg(long)]
        n: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Decode SAT solver output for an exported instance.
    Ingest {
        #[arg(long)]
        r: u8,
        #[arg(long)]
        k: u64,
        #[arg(long)]
        n: u64,
        /// Solver output for the instance with n points.
        #[arg(long)]
        output: PathBuf,
        /// Solver id recorded for UNSAT answers (overrides the comment line).
        #[arg(long)]
        solver: Option<String>,
        /// SAT output for n - 1 points; with an UNSAT answer this yields a certificate.
        #[arg(long)]
        witness_output: Option<PathBuf>,
        /// Where to write the combined certificate.
        #[arg(long, requires = "witness_output")]
        out: Option<PathBuf>,
    },
    /// Recompute every derived column of the dataset and compare with
    /// published digits.
    Audit {
        #[arg(long)]
        dataset: Option<PathBuf>,
    },
}

fn big(s: &str) -> Result<BigUint, String> {
    if s.is_empty() || !s.bytes().all(|b| b.is_ascii_digit()) {
        return Err(format!("expected a nonnegative integer, found {s:?}"));
    }
    BigUint::parse_bytes(s.as_bytes(), 10).ok_or_else(|| "invalid integer".to_string())
}

struct Output {
    text: String,
    payload: Value,
    exit: u8,
}

impl Output {
    fn new(text: impl Into<String>, payload: impl Serialize) -> Self {
        Output {
            text: text.into(),
            payload: serde_json::to_value(payload).expect("payloads serialize"),
            exit: 0,
        }
    }
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Expand { .. } => "expand",
        Command::Localize { .. } => "localize",
        Command::Delta { .. } => "delta",
        Command::Decompose { .. } => "decompose",
        Command::ApBound { .. } => "ap-bound",
        Command::CrossBound { .. } => "cross-bound",
        Command::ExpFloor { .. } => "exp-floor",
        Command::Condition { .. } => "condition",
        Command::Roots { .. } => "roots",
        Command::Window { .. } => "window",
        Command::Table { .. } => "table",
        Command::Search { .. } => "search",
        Command::Verify { .. } => "verify",
        Command::Cnf { .. } => "cnf",
        Command::Ingest { .. } => "ingest",
        Command::Audit { .. } => "audit",
    }
}

fn load_dataset(path: Option<PathBuf>) -> vdw::Result<Vec<registry::KnownValueRecord>> {
    match path {
        Some(p) => registry::load(p),
        None => registry::bundled(),
    }
}

fn window_output(window: CandidateWindow) -> Output {
    Output::new(report::window_text(&window), window)
}

fn run(command: Command) -> vdw::Result<Output> {
    Ok(match command {
        Command::Expand { value, base } => {
            let e = radix::expand(value, base)?;
            Output::new(format!("{e}\n"), &e)
        }
        Command::Localize { value, base } => {
            let i = radix::localize(&value, &base)?;
            let text = format!(
                "{value} in {i} = [{base}^{e}, {base}^{})\n",
                i.exponent() + 1,
                e = i.exponent()
            );
            Output::new(text, &i)
        }
        Command::Delta { value, base } => {
            let d = radix::delta(&value, &base)?;
            let text = format!("log_{base} {value} = {}\n", report::fmt_real(d));
            Output::new(text, json!({"value": value.to_string(), "base": base.to_string(), "delta": d}))
        }
        Command::Decompose { value, base } => {
            let d = bounds::decompose_log(&radix::expand(value.clone(), base.clone())?);
            let text = format!(
                "log_{base} {value} = {} + {} + {} = {}\n",
                d.n,
                report::fmt_real(d.eps1),
                report::fmt_real(d.eps2),
                report::fmt_real(d.total)
            );
            Output::new(text, d)
        }
        Command::ApBound { a, d, k, r } => {
            let n = bounds::ap_lower_bound_n(&a, &d, k, r)?;
            let text = format!("least n with {r}^(n+1) > {a} + ({k}-1)*{d}/2: {n}\n");
            Output::new(text, json!({"a": a.to_string(), "d": d.to_string(), "k": k, "r": r, "n": n}))
        }
        Command::CrossBound { m, k, r } => {
            let n = bounds::cross_base_lower_bound(m, k, r)?;
            let text = format!("least n with {r}^(n+1) > {k}^{m}: {n}\n");
            Output::new(text, json!({"m": m, "k": k, "r": r, "n": n}))
        }
        Command::ExpFloor { lower, base } => {
            let n = bounds::exponent_floor_from_lower_bound(&lower, &base)?;
            let text = format!("W > {lower} implies n >= {n} in base {base}\n");
            Output::new(text, json!({"lower": lower.to_string(), "base": base.to_string(), "n_min": n}))
        }
        Command::Condition { w, r, k } => {
            let c = bounds::check_square_condition(&w, r, k)?;
            Output::new(format!("{c}\n"), &c)
        }
        Command::Roots { value, base, n } => match n {
            Some(n) => {
                let root = bounds::nth_root(&value, n)?;
                let text = format!("{value}^(1/{n}) = {}\n", report::fmt_real(root));
                Output::new(text, json!({"value": value.to_string(), "n": n, "root": root}))
            }
            None => {
                let env = bounds::nth_root_envelope(&radix::expand(value.clone(), base)?)?;
                let text = format!(
                    "{} <= {value}^(1/{}) = {} < {}\n",
                    report::fmt_real(env.lower),
                    env.n,
                    report::fmt_real(env.root),
                    report::fmt_real(env.upper)
                );
                Output::new(text, env)
            }
        },
        Command::Window { base, min, max } => {
            window_output(bounds::enumerate_candidate_intervals(&base, min, max)?)
        }
        Command::Table { dataset } => {
            let audit = registry::audit(&load_dataset(dataset)?)?;
            Output::new(report::tables(&audit.rows), &audit.rows)
        }
        Command::Search {
            r,
            k,
            max_nodes,
            time_limit,
            threads,
            out,
        } => search_command(r, k, max_nodes, time_limit, threads, out)?,
        Command::Verify { cert, coloring, r, k } => verify_command(cert, coloring, r, k)?,
        Command::Cnf { r, k, n, out } => {
            let cnf = cnf::cnf_export(r, k, n)?;
            let summary = json!({"r": r, "k": k, "n": n, "num_vars": cnf.num_vars, "num_clauses": cnf.num_clauses()});
            match out {
                Some(path) => {
                    fs::write(&path, cnf.to_dimacs())?;
                    let text = format!(
                        "wrote {} variables, {} clauses to {}\n",
                        cnf.num_vars,
                        cnf.num_clauses(),
                        path.display()
                    );
                    Output::new(text, summary)
                }
                None => Output::new(cnf.to_dimacs(), summary),
            }
        }
        Command::Ingest {
            r,
            k,
            n,
            output,
            solver,
            witness_output,
            out,
        } => ingest_command(InstanceMeta { r, k, n_points: n }, output, solver, witness_output, out)?,
        Command::Audit { dataset } => {
            let audit = registry::audit(&load_dataset(dataset)?)?;
            let mut text = String::new();
            for row in &audit.rows {
                let kind = if row.exact { "=" } else { ">" };
                text.push_str(&format!(
                    "W({},{}) {kind} {}: n={} delta={} in [{}, {}) condition={} certified={}\n",
                    row.r,
                    row.k,
                    row.value,
                    row.n,
                    report::fmt_real(row.delta),
                    row.r_pow_n,
                    row.r_pow_n_plus_1,
                    row.condition.all_hold(),
                    row.certified
                ));
            }
            for m in &audit.mismatches {
                text.push_str(&format!(
                    "mismatch W({},{}) {}: printed {} computed {}\n",
                    m.r,
                    m.k,
                    m.column.name(),
                    m.printed,
                    m.computed
                ));
            }
            Output::new(text, &audit)
        }
    })
}

fn search_command(
    r: u8,
    k: u64,
    max_nodes: Option<u64>,
    time_limit: Option<f64>,
    threads: usize,
    out: Option<PathBuf>,
) -> vdw::Result<Output> {
    let mut budget = Budget::unlimited();
    if let Some(n) = max_nodes {
        budget = budget.with_nodes(n);
    }
    if let Some(t) = time_limit {
        let t = Duration::try_from_secs_f64(t)
            .map_err(|_| Error::InvalidArgument(format!("bad time limit {t}")))?;
        budget = budget.with_time(t);
    }
    let start = Instant::now();
    let outcome = search::search_exact_parallel(r, k, budget, threads)?;
    let seconds = start.elapsed().as_secs_f64();
    Ok(match outcome {
        SearchOutcome::Exact(cert) => {
            let path = out.unwrap_or_else(|| PathBuf::from(format!("w{r}_{k}.cert")));
            fs::write(&path, cert.render())?;
            let text = format!(
                "W({r},{k}) = {}\nwitness: {}\nexhaustion: {}\ncertificate: {}\n",
                cert.w(),
                cert.witness(),
                cert.exhaustion(),
                path.display()
            );
            Output::new(
                text,
                json!({"status": "exact", "w": cert.w(), "seconds": seconds, "certificate": cert, "path": path}),
            )
        }
        SearchOutcome::BudgetExceeded(partial) => {
            let text = format!(
                "budget exceeded after {} nodes: W({r},{k}) > {}\nwitness: {}\n",
                partial.nodes, partial.lower_bound, partial.witness
            );
            Output::new(
                text,
                json!({"status": "budget-exceeded", "seconds": seconds, "partial": partial}),
            )
        }
    })
}

fn verify_command(
    cert: Option<PathBuf>,
    coloring: Option<String>,
    r: Option<u8>,
    k: Option<u64>,
) -> vdw::Result<Output> {
    if let Some(path) = cert {
        let cert = VdwCertificate::parse(&fs::read_to_string(path)?)?;
        let text = format!(
            "W({},{}) = {}: witness on [1, {}] has no monochromatic {}-term progression; exhaustion {}\n",
            cert.r(),
            cert.k(),
            cert.w(),
            cert.w() - 1,
            cert.k(),
            cert.exhaustion()
        );
        return Ok(Output::new(text, json!({"valid": true, "certificate": cert})));
    }
    let (Some(text), Some(r), Some(k)) = (coloring, r, k) else {
        return Err(Error::InvalidArgument("give --cert, or --coloring with --r and --k".into()));
    };
    let coloring = Coloring::parse(&text, r)?;
    let found = search::verify(&coloring, k)?;
    let mut out = match &found {
        None => Output::new(
            format!(
                "valid: no monochromatic {k}-term progression in [1, {}]\n",
                coloring.n_points()
            ),
            json!({"valid": true, "progression": null}),
        ),
        Some(ap) => Output::new(
            format!("invalid: monochromatic progression {ap}\n"),
            json!({"valid": false, "progression": ap}),
        ),
    };
    if found.is_some() {
        out.exit = 1;
    }
    Ok(out)
}

fn ingest_command(
    meta: InstanceMeta,
    output: PathBuf,
    solver: Option<String>,
    witness_output: Option<PathBuf>,
    out: Option<PathBuf>,
) -> vdw::Result<Output> {
    let result = cnf::ingest_sat_result(meta, &fs::read_to_string(output)?)?;
    match result {
        SatResult::Satisfiable(coloring) => {
            if witness_output.is_some() {
                return Err(Error::InvalidArgument(
                    "--witness-output only combines with an UNSATISFIABLE answer".into(),
                ));
            }
            let text = format!("SATISFIABLE: verified coloring {coloring}\n");
            Ok(Output::new(text, json!({"status": "satisfiable", "coloring": coloring})))
        }
        SatResult::Unsatisfiable(mut unsat) => {
            if let Some(id) = solver {
                unsat.solver_id = id;
            }
            let Some(witness_path) = witness_output else {
                let text = format!(
                    "UNSATISFIABLE: no valid {}-coloring of [1, {}] (solver {})\n",
                    unsat.r, unsat.n_points, unsat.solver_id
                );
                return Ok(Output::new(text, json!({"status": "unsatisfiable", "attestation": unsat})));
            };
            let witness_meta = InstanceMeta {
                n_points: meta.n_points - 1,
                ..meta
            };
            let witness = match cnf::ingest_sat_result(witness_meta, &fs::read_to_string(witness_path)?)? {
                SatResult::Satisfiable(c) => c,
                SatResult::Unsatisfiable(_) => {
                    return Err(Error::CertificateRejected(format!(
                        "witness output claims [1, {}] is unsatisfiable",
                        witness_meta.n_points
                    )))
                }
            };
            let cert = VdwCertificate::from_unsat(witness.normalized(), meta.k, &unsat)?;
            let path = out.unwrap_or_else(|| PathBuf::from(format!("w{}_{}.cert", meta.r, meta.k)));
            fs::write(&path, cert.render())?;
            let text = format!("W({},{}) = {}: certificate {}\n", cert.r(), cert.k(), cert.w(), path.display());
            Ok(Output::new(text, json!({"status": "certificate", "certificate": cert, "path": path})))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let name = command_name(&cli.command);
    match run(cli.command) {
        Ok(out) => {
            match cli.format {
                Format::Text => print!("{}", out.text),
                Format::Json => println!("{}", json!({"command": name, "payload": out.payload})),
            }
            ExitCode::from(out.exit)
        }
        Err(e) => {
            match cli.format {
                Format::Text => eprintln!("error: {e}"),
                Format::Json => eprintln!("{}", json!({"command": name, "error": e.to_string()})),
            }
            ExitCode::from(1)
        }
    }
}
