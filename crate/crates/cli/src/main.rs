//! `linkage-morse`: build the perfect discrete Morse function of a planar
//! polygon space and check it.
//!
//! Exit codes: 0 when every check passes, 1 when a check fails, 2 on invalid
//! input.

use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use linkage_morse::complex::SizeGuard;
use linkage_morse::export::{critical_export, field_export, hasse_dot, hasse_export};
use linkage_morse::fuzz::{self, FuzzOptions, DEFAULT_SEED};
use linkage_morse::homology::{betti_from_short_sets, betti_mod2, bijection_map};
use linkage_morse::linkage::LinkageSummary;
use linkage_morse::paths::{path_dot, DEFAULT_PATH_CAP};
use linkage_morse::reversal::{apply_reversals, check_survivors, plan_reversals};
use linkage_morse::verify::{verify_complex, VerifyOptions};
use linkage_morse::{Complex, Error, Linkage, Severity, VectorField};

#[derive(Parser, Debug)]
#[command(name = "linkage-morse", version, about = "Perfect discrete Morse functions on planar polygon spaces")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Edge lengths, comma separated; each `p` or `p/q`.
    #[arg(long, global = true)]
    lengths: Option<String>,

    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,

    /// Refuse complexes with more edges than this unless --force is given.
    #[arg(long, global = true, default_value_t = 9, value_parser = clap::value_parser!(u64).range(3..=24))]
    max_n: u64,

    /// Lift the size guards.
    #[arg(long, global = true)]
    force: bool,

    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    seed: u64,

    /// Most paths materialized per critical pair.
    #[arg(long, global = true, default_value_t = DEFAULT_PATH_CAP)]
    path_cap: usize,

    /// Write output to a file instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Cell counts per dimension and the Euler characteristic.
    Cells,
    /// The matching (initial stage by default).
    Field {
        #[arg(long, value_enum, default_value_t = Stage::Initial)]
        stage: Stage,
    },
    /// Critical cells with their shapes.
    Critical {
        #[arg(long, value_enum, default_value_t = Stage::Final)]
        stage: Stage,
    },
    /// The reversed gradient paths.
    Reverse,
    /// Betti numbers from the chain complex and from short sets.
    Betti,
    /// Run every check.
    Verify,
    /// Short sets containing n and their two critical cells.
    Bijection,
    /// Verify random generic linkages.
    Fuzz {
        #[arg(long, default_value_t = 24)]
        cases: usize,
    },
    /// The Hasse diagram with the matching.
    Export {
        #[arg(long, value_enum, default_value_t = Stage::Final)]
        stage: Stage,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Text,
    Dot,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Stage {
    Initial,
    Final,
}

/// What a command produced: the body and whether its checks passed.
struct Outcome {
    body: String,
    failure: Option<String>,
}

impl Outcome {
    fn ok(body: String) -> Self {
        Outcome { body, failure: None }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(outcome) => {
            if let Err(e) = emit(&cli, &outcome.body) {
                eprintln!("error: {e}");
                return ExitCode::from(2);
            }
            match outcome.failure {
                None => ExitCode::SUCCESS,
                Some(why) => {
                    eprintln!("check failed: {why}");
                    ExitCode::from(1)
                }
            }
        }
        Err(e) => match e.severity() {
            Severity::InvalidInput => {
                eprintln!("error: {e}");
                ExitCode::from(2)
            }
            Severity::ImplementationFault => {
                eprintln!("implementation fault: {e}");
                ExitCode::from(1)
            }
            Severity::Falsification => {
                eprintln!("falsification: {e}");
                ExitCode::from(1)
            }
        },
    }
}

fn emit(cli: &Cli, body: &str) -> std::io::Result<()> {
    match &cli.out {
        Some(path) => std::fs::write(path, body),
        None => {
            print!("{body}");
            Ok(())
        }
    }
}

fn run(cli: &Cli) -> Result<Outcome, Error> {
    match &cli.command {
        Command::Fuzz { cases } => cmd_fuzz(cli, *cases),
        command => {
            let text = cli.lengths.as_deref().ok_or_else(|| Error::Parse("--lengths is required".into()))?;
            let linkage = Linkage::parse(text)?;
            let guard = if cli.force { SizeGuard::unlimited() } else { SizeGuard::limit(cli.max_n as usize) };
            let cx = Complex::with_guard(&linkage, guard)?;
            match command {
                Command::Cells => cmd_cells(cli, &cx),
                Command::Field { stage } => cmd_field(cli, &cx, *stage),
                Command::Critical { stage } => cmd_critical(cli, &cx, *stage),
                Command::Reverse => cmd_reverse(cli, &cx),
                Command::Betti => cmd_betti(cli, &cx),
                Command::Verify => cmd_verify(cli, &cx),
                Command::Bijection => cmd_bijection(cli, &cx),
                Command::Export { stage } => cmd_export(cli, &cx, *stage),
                Command::Fuzz { .. } => unreachable!("handled above"),
            }
        }
    }
}

fn to_json(value: &impl serde::Serialize) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable");
    s.push('\n');
    s
}

fn base_json(cx: &Complex) -> Value {
    json!({
        "linkage": LinkageSummary::from(cx.linkage()),
        "n": cx.n(),
    })
}

fn merge(mut base: Value, extra: Value) -> Value {
    if let (Value::Object(b), Value::Object(e)) = (&mut base, extra) {
        b.extend(e);
    }
    base
}

fn join<T: ToString>(values: &[T]) -> String {
    values.iter().map(T::to_string).collect::<Vec<_>>().join(",")
}

fn field_for(cx: &Complex, stage: Stage, path_cap: usize) -> Result<VectorField, Error> {
    let field = VectorField::build(cx)?;
    if stage == Stage::Initial {
        return Ok(field);
    }
    let plan = plan_reversals(cx, &field, path_cap)?;
    let reversed = apply_reversals(cx, &field, &plan)?;
    check_survivors(cx, &field, &reversed)?;
    Ok(reversed)
}

fn stage_name(stage: Stage) -> &'static str {
    match stage {
        Stage::Initial => "initial",
        Stage::Final => "final",
    }
}

fn cmd_cells(cli: &Cli, cx: &Complex) -> Result<Outcome, Error> {
    let counts = cx.cells_per_dim();
    if cli.format == Format::Json {
        let cells: Vec<Vec<String>> =
            (0..=cx.top_dim()).map(|d| cx.cells_of_dim(d).map(|c| cx.label(c).to_string()).collect()).collect();
        let v = merge(
            base_json(cx),
            json!({ "cells_per_dim": counts, "euler": cx.euler_characteristic(), "cells": cells }),
        );
        return Ok(Outcome::ok(to_json(&v)));
    }
    let parts: Vec<String> = counts.iter().enumerate().map(|(d, c)| format!("dim {d}: {c}")).collect();
    Ok(Outcome::ok(format!("{}; chi = {}\n", parts.join("; "), cx.euler_characteristic())))
}

fn cmd_field(cli: &Cli, cx: &Complex, stage: Stage) -> Result<Outcome, Error> {
    let field = field_for(cx, stage, cli.path_cap)?;
    match cli.format {
        Format::Dot => Ok(Outcome::ok(hasse_dot(cx, &field, cli.force)?)),
        Format::Json => {
            let v = merge(base_json(cx), json!({ "stage": stage_name(stage), "field": field_export(cx, &field) }));
            Ok(Outcome::ok(to_json(&v)))
        }
        Format::Text => {
            let export = field_export(cx, &field);
            let mut out = String::new();
            for p in &export.pairs {
                let _ = writeln!(out, "{} -> {}  ({} {})", p.0, p.1, p.3, p.2);
            }
            let _ =
                writeln!(out, "pairs: {}; critical per dim: {}", export.pairs.len(), join(&field.critical_counts(cx)));
            Ok(Outcome::ok(out))
        }
    }
}

fn cmd_critical(cli: &Cli, cx: &Complex, stage: Stage) -> Result<Outcome, Error> {
    let field = field_for(cx, stage, cli.path_cap)?;
    let groups = critical_export(cx, &field)?;
    let counts: Vec<usize> = groups.iter().map(Vec::len).collect();
    let total: usize = counts.iter().sum();
    if cli.format == Format::Json {
        let v = merge(
            base_json(cx),
            json!({ "stage": stage_name(stage), "per_dim": counts, "total": total, "cells": groups }),
        );
        return Ok(Outcome::ok(to_json(&v)));
    }
    let mut out = String::new();
    for group in &groups {
        for e in group {
            let _ = writeln!(out, "dim {}  {}  {}", e.dim, e.label, e.class.name());
        }
    }
    let _ = writeln!(out, "{} critical cells ({}); per dim {}", total, stage_name(stage), join(&counts));
    Ok(Outcome::ok(out))
}

fn cmd_reverse(cli: &Cli, cx: &Complex) -> Result<Outcome, Error> {
    let field = VectorField::build(cx)?;
    let plan = plan_reversals(cx, &field, cli.path_cap)?;
    match cli.format {
        Format::Dot => Ok(Outcome::ok(plan.reversals.iter().map(|r| path_dot(cx, &field, &r.path)).collect())),
        Format::Json => {
            let v = merge(base_json(cx), json!({ "reversals": plan.export(cx) }));
            Ok(Outcome::ok(to_json(&v)))
        }
        Format::Text => {
            let mut out = String::new();
            for r in plan.export(cx) {
                let _ = writeln!(out, "{} => {}  (j = {}, {} cells)", r.beta, r.alpha, r.moved, r.path.len());
                let _ = writeln!(out, "    {}", r.path.join(" "));
            }
            let _ = writeln!(out, "{} reversed paths", plan.len());
            Ok(Outcome::ok(out))
        }
    }
}

fn cmd_betti(cli: &Cli, cx: &Complex) -> Result<Outcome, Error> {
    let cellular = betti_mod2(cx);
    let short = betti_from_short_sets(cx.linkage());
    let failure = (cellular != short).then(|| format!("cellular ({cellular}) differs from short sets ({short})"));
    let body = if cli.format == Format::Json {
        to_json(&merge(
            base_json(cx),
            json!({ "betti_cellular": cellular, "betti_shortsets": short, "euler": cx.euler_characteristic() }),
        ))
    } else {
        format!("cellular:   {cellular}\nshort sets: {short}\n")
    };
    Ok(Outcome { body, failure })
}

fn cmd_verify(cli: &Cli, cx: &Complex) -> Result<Outcome, Error> {
    let opts = VerifyOptions { path_cap: cli.path_cap, seed: cli.seed, ..VerifyOptions::default() };
    let report = verify_complex(cx, &opts);
    let failure =
        report.first_failure().map(|c| format!("{} ({}): {}", c.name, c.kind.unwrap_or("implementation"), c.detail));
    if cli.format == Format::Json {
        return Ok(Outcome { body: to_json(&report), failure });
    }
    let mut out = String::new();
    let _ = writeln!(out, "linkage {} (sorted {})", cx.linkage().input_text(), cx.linkage().lengths_text());
    let _ = writeln!(out, "cells per dim:     {}", join(&report.cells_per_dim));
    let _ = writeln!(out, "critical initial:  {}", join(&report.critical_initial_per_dim));
    let _ = writeln!(out, "critical final:    {}", join(&report.critical_final_per_dim));
    let _ = writeln!(out, "betti (cellular):  {}", join(&report.betti_cellular));
    let _ = writeln!(out, "betti (short sets): {}", join(&report.betti_shortsets));
    let _ = writeln!(out, "euler: {}; perfect: {}", report.euler, report.perfect);
    for c in &report.checks {
        let _ = writeln!(out, "[{}] {}: {}", if c.pass { "pass" } else { "FAIL" }, c.name, c.detail);
    }
    Ok(Outcome { body: out, failure })
}

fn cmd_bijection(cli: &Cli, cx: &Complex) -> Result<Outcome, Error> {
    let linkage = cx.linkage();
    let field = field_for(cx, Stage::Final, cli.path_cap)?;
    let mut rows = Vec::new();
    let mut hit = std::collections::BTreeSet::new();
    let mut problems = Vec::new();
    for j_set in linkage.short_sets_with_n() {
        let (t1, t2) = bijection_map(linkage, j_set)?;
        for t in [&t1, &t2] {
            match cx.id(t) {
                Some(id) if field.is_critical(id) => {
                    if !hit.insert(id) {
                        problems.push(format!("{t} is hit twice"));
                    }
                }
                _ => problems.push(format!("{t} is not a final critical cell")),
            }
        }
        rows.push(json!({
            "short_set": j_set.to_string(),
            "type1": t1.to_string(),
            "type1_dim": t1.dim(),
            "type2": t2.to_string(),
            "type2_dim": t2.dim(),
        }));
    }
    let missed: Vec<String> = field
        .critical_cells(cx)
        .into_iter()
        .flatten()
        .filter(|c| !hit.contains(c))
        .map(|c| cx.label(c).to_string())
        .collect();
    if !missed.is_empty() {
        problems.push(format!("not hit: {}", missed.join(" ")));
    }
    let failure = (!problems.is_empty()).then(|| problems.join("; "));
    if cli.format == Format::Json {
        let v = merge(base_json(cx), json!({ "rows": rows, "unmatched": missed, "surjective": missed.is_empty() }));
        return Ok(Outcome { body: to_json(&v), failure });
    }
    let mut out = String::new();
    for r in &rows {
        let _ = writeln!(
            out,
            "{:<14} {} (dim {})  |  {} (dim {})",
            r["short_set"].as_str().unwrap_or_default(),
            r["type1"].as_str().unwrap_or_default(),
            r["type1_dim"],
            r["type2"].as_str().unwrap_or_default(),
            r["type2_dim"]
        );
    }
    let _ = writeln!(out, "{} rows; surjective: {}", rows.len(), missed.is_empty());
    Ok(Outcome { body: out, failure })
}

fn cmd_fuzz(cli: &Cli, cases: usize) -> Result<Outcome, Error> {
    let opts = FuzzOptions { seed: cli.seed, max_n: cli.max_n as usize, cases, ..FuzzOptions::default() };
    let verify_opts = VerifyOptions {
        guard: SizeGuard::limit(cli.max_n as usize),
        path_cap: cli.path_cap,
        seed: cli.seed,
        ..VerifyOptions::default()
    };
    let summary = fuzz::run(&opts, &verify_opts);
    let failure =
        (!summary.all_passed()).then(|| format!("{} of {} cases failed", summary.failed, summary.cases.len()));
    if cli.format == Format::Json {
        return Ok(Outcome { body: to_json(&summary), failure });
    }
    let mut out = String::new();
    for c in &summary.cases {
        let status = match &c.failure {
            None => "pass".to_string(),
            Some(f) => format!("FAIL {}: {}", f.name, f.detail),
        };
        let _ = writeln!(out, "case {:>3}  n = {}  {:<28} {}", c.index, c.n, c.lengths, status);
    }
    let _ = writeln!(
        out,
        "seed {}: {} passed, {} failed; rejected {} degenerate and {} empty draws",
        summary.seed, summary.passed, summary.failed, summary.rejected_degenerate, summary.rejected_empty
    );
    Ok(Outcome { body: out, failure })
}

fn cmd_export(cli: &Cli, cx: &Complex, stage: Stage) -> Result<Outcome, Error> {
    let field = field_for(cx, stage, cli.path_cap)?;
    if cli.format == Format::Dot {
        return Ok(Outcome::ok(hasse_dot(cx, &field, cli.force)?));
    }
    let v = merge(
        base_json(cx),
        json!({ "stage": stage_name(stage), "hasse": hasse_export(cx, &field), "field": field_export(cx, &field) }),
    );
    Ok(Outcome::ok(to_json(&v)))
}
