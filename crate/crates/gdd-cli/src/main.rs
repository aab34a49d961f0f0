//! `gdd` — construct, search for, compose, and verify group divisible
//! designs with block size 4.
//!
//! Subcommands mirror the library modules: admissibility queries, expected
//! block counts, catalogue expansion, exhaustive verification, algebraic
//! constructions (transversal designs and their relatives), the exact-cover
//! solver, the recursive compositions, the planner, and the persistent
//! design store.  Exit codes: 0 for success or a passing check, 1 for a
//! negative result (verification failure, unsatisfiable or undecided search,
//! unresolved plan, nonexistent type) or an operational error, 2 for usage
//! errors.
//!
//! Design-producing commands print the design file format on standard
//! output (or write it with `--out`) so they can be piped straight into
//! `gdd verify -`; diagnostics go to standard error.

use std::collections::BTreeMap;
use std::io::Read;
use std::path::{Path, PathBuf};
use std::time::Duration;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use gdd_core::admissibility::{check_gum, Existence};
use gdd_core::algebra;
use gdd_core::appendix::Catalogue;
use gdd_core::construct::{
    thm_fill_groups, thm_fundamental, thm_hole_fill, thm_scalar_inflate, thm_wilson_inflate,
    FundamentalFillers, FundamentalParams,
};
use gdd_core::cover::{solve_with_restarts, SolveOptions, SolveOutcome};
use gdd_core::derived::{dgdd_transpose, rtd_to_dgdd, weight_by};
use gdd_core::plan::{execute_plan, plan_gum, ExecOptions, Method, PlanNode};
use gdd_core::registry::{Registry, REGISTRY_ENV};
use gdd_core::verify::verify;
use gdd_core::{expected_block_count, DesignKind, GroupedDesign, TypeSignature};

#[derive(Parser)]
#[command(
    name = "gdd",
    version,
    about = "Construct and verify group divisible designs with block size 4"
)]
struct Cli {
    /// Output style: human-readable text or stable machine-readable JSON.
    #[arg(long, global = true, value_enum, default_value_t = Format::Human)]
    format: Format,

    /// Design store directory (default: $GDD_REGISTRY, else ./gdd-registry).
    #[arg(long, global = true, value_name = "DIR")]
    registry: Option<PathBuf>,

    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum Format {
    Human,
    Structured,
}

#[derive(Subcommand)]
enum Cmd {
    /// Check the necessary conditions for a 4-GDD of type g^u m^1.
    Admissible { g: u32, u: u32, m: u32 },

    /// Print the exact block count a 4-GDD of type g^u m^1 must have.
    Blocks { g: u32, u: u32, m: u32 },

    /// Expand a catalogue entry (by name or type) from its base blocks.
    Expand {
        /// Entry name or type string, e.g. "9^4 18^1 15^1".
        entry: String,
        #[arg(long, value_name = "FILE")]
        out: Option<PathBuf>,
    },

    /// Exhaustively verify design files ("-" reads standard input).
    Verify {
        /// Design files to check, in reporting order.
        #[arg(required = true)]
        files: Vec<String>,
        /// Emit one JSON object per input line instead of prose.
        #[arg(long, value_name = "STYLE")]
        report: Option<ReportStyle>,
        /// Verify this many files in parallel (output stays in input order).
        #[arg(long, value_name = "N")]
        jobs: Option<usize>,
    },

    /// Build an algebraic design directly.
    #[command(subcommand)]
    Construct(ConstructCmd),

    /// Swap the group and hole partitions of a double GDD.
    Transpose {
        file: PathBuf,
        #[arg(long, value_name = "FILE")]
        out: Option<PathBuf>,
    },

    /// Inflate every point of a design by a weight w (overlay TD(4,w)).
    Inflate {
        file: PathBuf,
        w: u32,
        #[arg(long, value_name = "FILE")]
        out: Option<PathBuf>,
    },

    /// Search for a design of the given type by exact cover.
    Solve {
        /// Target type, e.g. "3^9".
        r#type: String,
        /// Hole profile for a double GDD search, e.g. "5^4".
        #[arg(long, value_name = "TYPE")]
        holes: Option<String>,
        /// Base random seed for row shuffling (restarts increment it).
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Total time budget in seconds, split across restarts.
        #[arg(long, default_value_t = 30, value_name = "SECONDS")]
        budget: u64,
        /// Number of seed-incrementing restarts within the budget.
        #[arg(long, default_value_t = 1)]
        attempts: u32,
        #[arg(long, value_name = "FILE")]
        out: Option<PathBuf>,
    },

    /// Apply one of the recursive constructions to ingredient designs.
    Compose {
        #[arg(value_enum)]
        theorem: Theorem,
        /// Numeric parameters as comma-separated key=value pairs.
        #[arg(long, value_delimiter = ',', value_name = "K=V")]
        params: Vec<String>,
        /// Ingredient designs as role=path pairs (repeatable).
        #[arg(long, value_name = "ROLE=PATH")]
        ingredient: Vec<String>,
        #[arg(long, value_name = "FILE")]
        out: Option<PathBuf>,
    },

    /// Derive a construction tree for type g^u m^1; optionally execute it.
    Plan {
        g: u32,
        u: u32,
        m: u32,
        /// Build every step, storing results in the registry.
        #[arg(long)]
        execute: bool,
        /// Base seed for any search leaves.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Time budget per search leaf in seconds.
        #[arg(long, default_value_t = 30, value_name = "SECONDS")]
        budget: u64,
        /// Write the finished design here as well as into the registry.
        #[arg(long, value_name = "FILE")]
        out: Option<PathBuf>,
    },

    /// Inspect or update the persistent design store.
    #[command(subcommand)]
    Catalog(CatalogCmd),
}

#[derive(Subcommand)]
enum ConstructCmd {
    /// Transversal design TD(k,q) from the order-q finite field.
    Td {
        k: u32,
        q: u32,
        #[arg(long, value_name = "FILE")]
        out: Option<PathBuf>,
    },
    /// Resolvable transversal design RTD(k,q) with its parallel classes.
    Rtd {
        k: u32,
        q: u32,
        #[arg(long, value_name = "FILE")]
        out: Option<PathBuf>,
    },
    /// Double GDD of type (n,1^n)^4 from RTD(4,n).
    DgddRtd {
        n: u32,
        #[arg(long, value_name = "FILE")]
        out: Option<PathBuf>,
    },
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum Theorem {
    /// Parallel-class inflation: (va+b)^u (ct+d)^1 from an RGDD.
    Thm33,
    /// Group refinement: g^u m^1 from (3g)^{u/3} (m-g)^1.
    Thm41,
    /// Point inflation by u with per-size group fillers.
    Thm42,
    /// Hole filling of a (g,1^g)^u double GDD.
    Thm43,
    /// Scalar inflation by r.
    Thm44,
}

#[derive(Subcommand)]
enum CatalogCmd {
    /// List every stored design.
    List,
    /// List stored designs whose type or path matches the query.
    Search { query: String },
    /// Verify a design file and add it to the store.
    Import { file: PathBuf },
    /// Copy the best stored design of the given type to a file.
    Export {
        /// Type string, e.g. "39^8 120^1".
        r#type: String,
        dest: PathBuf,
        /// Design kind to match.
        #[arg(long, value_name = "KIND", default_value = "gdd")]
        kind: String,
        /// Hole profile for double GDD lookups.
        #[arg(long, value_name = "TYPE")]
        holes: Option<String>,
    },
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum ReportStyle {
    JsonLines,
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            let _ = e.print();
            std::process::exit(code);
        }
    };
    std::process::exit(run(cli));
}

fn run(cli: Cli) -> i32 {
    let format = cli.format;
    let registry_dir = cli
        .registry
        .or_else(|| std::env::var_os(REGISTRY_ENV).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("gdd-registry"));
    let result = match cli.cmd {
        Cmd::Admissible { g, u, m } => cmd_admissible(g, u, m, format),
        Cmd::Blocks { g, u, m } => cmd_blocks(g, u, m, format),
        Cmd::Expand { entry, out } => cmd_expand(&entry, out.as_deref(), format),
        Cmd::Verify { files, report, jobs } => cmd_verify(&files, report, jobs, format),
        Cmd::Construct(c) => cmd_construct(c, format),
        Cmd::Transpose { file, out } => {
            product(|| dgdd_transpose(&read_design(&file)?), out.as_deref(), format)
        }
        Cmd::Inflate { file, w, out } => {
            product(|| weight_by(&read_design(&file)?, w), out.as_deref(), format)
        }
        Cmd::Solve { r#type, holes, seed, budget, attempts, out } => {
            cmd_solve(&r#type, holes.as_deref(), seed, budget, attempts, out.as_deref(), format)
        }
        Cmd::Compose { theorem, params, ingredient, out } => {
            cmd_compose(theorem, &params, &ingredient, out.as_deref(), format)
        }
        Cmd::Plan { g, u, m, execute, seed, budget, out } => {
            cmd_plan(g, u, m, execute, seed, budget, out.as_deref(), &registry_dir, format)
        }
        Cmd::Catalog(c) => cmd_catalog(c, &registry_dir, format),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            if e.is::<UsageError>() {
                2
            } else {
                1
            }
        }
    }
}

type CmdResult = Result<i32, Box<dyn std::error::Error>>;

fn cmd_admissible(g: u32, u: u32, m: u32, format: Format) -> CmdResult {
    let verdict = check_gum(g, u, m);
    let sig = signature_gum(g, u, m);
    let (status, rule) = match &verdict.existence {
        _ if !verdict.admissible => ("inadmissible", String::new()),
        Existence::KnownExists { rule } => ("known to exist", rule.clone()),
        Existence::KnownNonexistent { rule } => ("known nonexistent", rule.clone()),
        Existence::OpenOrExternal { rule } => ("open or external", rule.clone()),
    };
    let negative = !verdict.admissible
        || matches!(verdict.existence, Existence::KnownNonexistent { .. });
    match format {
        Format::Human => {
            if verdict.admissible {
                println!("type {sig}: admissible; {status} ({rule})");
            } else {
                println!(
                    "type {sig}: not admissible: {}",
                    verdict.failed_conditions.join("; ")
                );
            }
            for note in &verdict.notes {
                eprintln!("note: {note}");
            }
        }
        Format::Structured => {
            emit(json!({
                "type": sig.to_string(),
                "admissible": verdict.admissible,
                "existence": existence_tag(&verdict),
                "rule": rule,
                "failed_conditions": verdict.failed_conditions,
                "notes": verdict.notes,
            }));
        }
    }
    Ok(if negative { 1 } else { 0 })
}

fn cmd_blocks(g: u32, u: u32, m: u32, format: Format) -> CmdResult {
    match expected_block_count(g as u64, u as u64, m as u64) {
        Ok(n) => {
            match format {
                Format::Human => println!("{n}"),
                Format::Structured => emit(json!({
                    "type": signature_gum(g, u, m).to_string(),
                    "blocks": n,
                })),
            }
            Ok(0)
        }
        Err(e) => {
            println!("type {}: {e}", signature_gum(g, u, m));
            Ok(1)
        }
    }
}

fn cmd_expand(query: &str, out: Option<&Path>, format: Format) -> CmdResult {
    let Some(entry) = Catalogue::builtin().find(query) else {
        return Err(format!("no catalogue entry matches \"{query}\"").into());
    };
    let design = entry.expand()?;
    deliver(&design, out, format)
}

fn cmd_verify(
    files: &[String],
    report: Option<ReportStyle>,
    jobs: Option<usize>,
    format: Format,
) -> CmdResult {
    let structured = format == Format::Structured || report.is_some();
    // Load sequentially (stdin can only be read here), verify in parallel.
    let loaded: Vec<(String, Result<GroupedDesign, String>)> = files
        .iter()
        .map(|name| {
            let design = if name == "-" {
                let mut text = String::new();
                std::io::stdin()
                    .read_to_string(&mut text)
                    .map_err(|e| e.to_string())
                    .and_then(|_| GroupedDesign::from_text(&text).map_err(|e| e.to_string()))
            } else {
                read_design(Path::new(name)).map_err(|e| e.to_string())
            };
            (name.clone(), design)
        })
        .collect();
    let reports: Vec<(String, Result<(GroupedDesign, gdd_core::VerificationReport), String>)> = {
        let work = |(name, loaded): &(String, Result<GroupedDesign, String>)| {
            let out = loaded
                .as_ref()
                .map(|d| (d.clone(), verify(d)))
                .map_err(|e| e.clone());
            (name.clone(), out)
        };
        match jobs {
            Some(n) if n > 1 => {
                let pool = rayon::ThreadPoolBuilder::new().num_threads(n).build()?;
                pool.install(|| {
                    use rayon::prelude::*;
                    loaded.par_iter().map(work).collect()
                })
            }
            _ => loaded.iter().map(work).collect(),
        }
    };
    let mut all_passed = true;
    for (name, outcome) in &reports {
        match outcome {
            Ok((design, report)) => {
                all_passed &= report.passed;
                if structured {
                    let violations: Vec<String> =
                        report.violations.iter().take(10).map(|v| v.to_string()).collect();
                    emit(json!({
                        "input": name,
                        "type": design.signature().to_string(),
                        "kind": design.kind().as_str(),
                        "passed": report.passed,
                        "blocks": report.blocks_checked,
                        "pairs_required": report.pairs_required,
                        "violations": report.total_violations,
                        "first_violations": violations,
                    }));
                } else if files.len() == 1 {
                    println!("{}", report.summary());
                } else {
                    println!("{name}: {}", report.summary());
                }
            }
            Err(e) => {
                all_passed = false;
                if structured {
                    emit(json!({ "input": name, "error": e }));
                } else {
                    println!("{name}: error: {e}");
                }
            }
        }
    }
    Ok(if all_passed { 0 } else { 1 })
}

fn cmd_construct(cmd: ConstructCmd, format: Format) -> CmdResult {
    match cmd {
        ConstructCmd::Td { k, q, out } => product(|| algebra::td(k, q), out.as_deref(), format),
        ConstructCmd::Rtd { k, q, out } => product(|| algebra::rtd(k, q), out.as_deref(), format),
        ConstructCmd::DgddRtd { n, out } => product(|| rtd_to_dgdd(n), out.as_deref(), format),
    }
}

fn cmd_solve(
    type_text: &str,
    holes: Option<&str>,
    seed: u64,
    budget: u64,
    attempts: u32,
    out: Option<&Path>,
    format: Format,
) -> CmdResult {
    let signature = TypeSignature::parse(type_text)?;
    let holes = holes.map(TypeSignature::parse).transpose()?;
    let opts = SolveOptions {
        seed,
        budget: Duration::from_secs(budget),
        ..SolveOptions::default()
    };
    let outcome = solve_with_restarts(&signature, holes.as_ref(), &opts, attempts)?;
    match outcome {
        SolveOutcome::Solved(design) => deliver(&design, out, format),
        SolveOutcome::Unsat => {
            match format {
                Format::Human => println!(
                    "unsat: exhaustive search proves no such design exists ({signature})"
                ),
                Format::Structured => emit(json!({
                    "type": signature.to_string(),
                    "outcome": "unsat",
                })),
            }
            Ok(1)
        }
        SolveOutcome::Timeout => {
            match format {
                Format::Human => println!(
                    "timeout: budget of {budget}s exhausted without a decision ({signature})"
                ),
                Format::Structured => emit(json!({
                    "type": signature.to_string(),
                    "outcome": "timeout",
                })),
            }
            Ok(1)
        }
    }
}

fn cmd_compose(
    theorem: Theorem,
    params: &[String],
    ingredients: &[String],
    out: Option<&Path>,
    format: Format,
) -> CmdResult {
    let params = parse_params(params)?;
    let mut designs: Vec<(String, GroupedDesign)> = Vec::new();
    for spec in ingredients {
        let (role, path) = spec
            .split_once('=')
            .ok_or_else(|| usage(format!("ingredient \"{spec}\" is not role=path")))?;
        designs.push((role.to_string(), read_design(Path::new(path))?));
    }
    let find = |role: &str| designs.iter().find(|(r, _)| r == role).map(|(_, d)| d);
    let need = |role: &str| {
        find(role).ok_or_else(|| usage(format!("missing required ingredient \"{role}=path\"")))
    };
    let (valid_params, valid_roles): (&[&str], &[&str]) = match theorem {
        Theorem::Thm33 => (
            &["a", "b", "c", "d", "t", "u", "v"],
            &["rgdd", "class-with-points", "class-plain", "group-a", "group-b"],
        ),
        Theorem::Thm41 => (&["g"], &["big", "td"]),
        Theorem::Thm42 => (&["u", "m"], &["small", "dgdd", "filler"]),
        Theorem::Thm43 => (&["m"], &["dgdd", "filler"]),
        Theorem::Thm44 => (&["r"], &["design", "td"]),
    };
    for key in params.keys() {
        if !valid_params.contains(&key.as_str()) {
            return Err(usage(format!(
                "unknown parameter \"{key}\"; valid: {}",
                valid_params.join(", ")
            )));
        }
    }
    for (role, _) in &designs {
        if !valid_roles.contains(&role.as_str()) {
            return Err(usage(format!(
                "unknown ingredient role \"{role}\"; valid: {}",
                valid_roles.join(", ")
            )));
        }
    }
    let get = |key: &str| {
        params
            .get(key)
            .copied()
            .ok_or_else(|| usage(format!("missing parameter {key}= (valid: {})", valid_params.join(", "))))
    };
    let design = match theorem {
        Theorem::Thm33 => {
            let fillers = FundamentalFillers {
                class_with_points: find("class-with-points"),
                class_plain: find("class-plain"),
                group_a: find("group-a"),
                group_b: find("group-b"),
            };
            thm_fundamental(
                FundamentalParams {
                    a: get("a")?,
                    b: get("b")?,
                    c: get("c")?,
                    d: get("d")?,
                    t: get("t")?,
                },
                get("u")?,
                get("v")?,
                need("rgdd")?,
                &fillers,
            )?
        }
        Theorem::Thm41 => thm_fill_groups(need("big")?, get("g")?, need("td")?)?,
        Theorem::Thm42 => {
            let fillers: Vec<&GroupedDesign> = designs
                .iter()
                .filter(|(r, _)| r == "filler")
                .map(|(_, d)| d)
                .collect();
            if fillers.is_empty() {
                return Err(usage("missing required ingredient \"filler=path\"".into()));
            }
            thm_wilson_inflate(need("small")?, get("u")?, need("dgdd")?, &fillers, get("m")?)?
        }
        Theorem::Thm43 => {
            let (design, warnings) = thm_hole_fill(need("dgdd")?, need("filler")?, get("m")?)?;
            for w in warnings {
                eprintln!("warning: {w}");
            }
            design
        }
        Theorem::Thm44 => thm_scalar_inflate(need("design")?, get("r")?, need("td")?)?,
    };
    deliver(&design, out, format)
}

#[allow(clippy::too_many_arguments)]
fn cmd_plan(
    g: u32,
    u: u32,
    m: u32,
    execute: bool,
    seed: u64,
    budget: u64,
    out: Option<&Path>,
    registry_dir: &Path,
    format: Format,
) -> CmdResult {
    let plan = match plan_gum(g, u, m) {
        Ok(plan) => plan,
        Err(e) => {
            println!("no plan: {e}");
            return Ok(1);
        }
    };
    if !execute {
        match format {
            Format::Human => {
                print!("{}", plan.render());
                let imports = plan.imports();
                if imports.is_empty() {
                    eprintln!("plan is self-contained ({} steps)", plan.node_count());
                } else {
                    eprintln!("plan needs {} external ingredient(s):", imports.len());
                    for node in imports {
                        eprintln!("  {}", node.goal);
                    }
                }
            }
            Format::Structured => emit(json!({
                "type": signature_gum(g, u, m).to_string(),
                "self_contained": plan.is_self_contained(),
                "steps": plan.node_count(),
                "plan": plan_json(&plan),
            })),
        }
        return Ok(0);
    }
    let registry = Registry::open(registry_dir)?;
    let opts = ExecOptions {
        seed,
        budget: Duration::from_secs(budget),
        ..ExecOptions::default()
    };
    let outcome = execute_plan(&plan, &registry, &opts)?;
    for note in &outcome.notes {
        eprintln!("note: {note}");
    }
    match outcome.design {
        Some(design) => {
            if let Some(path) = out {
                design.write_to(path)?;
            }
            let report = verify(&design);
            match format {
                Format::Human => println!(
                    "built {} [{}]: {}; stored under {}",
                    design.signature(),
                    design.kind(),
                    report.summary(),
                    registry.root().display()
                ),
                Format::Structured => emit(json!({
                    "type": design.signature().to_string(),
                    "kind": design.kind().as_str(),
                    "blocks": design.blocks().len(),
                    "passed": report.passed,
                    "registry": registry.root().display().to_string(),
                })),
            }
            Ok(if report.passed { 0 } else { 1 })
        }
        None => {
            match format {
                Format::Human => {
                    println!("unresolved plan: missing ingredients");
                    for miss in &outcome.missing {
                        println!("  {miss}");
                    }
                }
                Format::Structured => {
                    let missing: Vec<Value> = outcome
                        .missing
                        .iter()
                        .map(|miss| {
                            json!({
                                "type": miss.signature.to_string(),
                                "kind": miss.kind.as_str(),
                                "holes": miss.holes.as_ref().map(|h| h.to_string()),
                                "rule": miss.rule,
                                "reason": miss.reason,
                            })
                        })
                        .collect();
                    emit(json!({
                        "type": signature_gum(g, u, m).to_string(),
                        "outcome": "missing-ingredients",
                        "missing": missing,
                    }));
                }
            }
            Ok(1)
        }
    }
}

fn cmd_catalog(cmd: CatalogCmd, registry_dir: &Path, format: Format) -> CmdResult {
    match cmd {
        CatalogCmd::List => {
            let registry = Registry::open(registry_dir)?;
            for entry in registry.list()? {
                print_entry(&entry, format);
            }
            Ok(0)
        }
        CatalogCmd::Search { query } => {
            let registry = Registry::open(registry_dir)?;
            let canonical = TypeSignature::parse(&query).ok().map(|s| s.to_string());
            let mut hits = 0;
            for entry in registry.list()? {
                let matched = canonical.as_deref() == Some(entry.signature.as_str())
                    || entry.signature.contains(&query)
                    || entry.path.contains(&query);
                if matched {
                    hits += 1;
                    print_entry(&entry, format);
                }
            }
            Ok(if hits > 0 { 0 } else { 1 })
        }
        CatalogCmd::Import { file } => {
            let registry = Registry::open(registry_dir)?;
            let design = registry.import(&file)?;
            match format {
                Format::Human => println!(
                    "imported {} [{}] ({} blocks)",
                    design.signature(),
                    design.kind(),
                    design.blocks().len()
                ),
                Format::Structured => emit(json!({
                    "type": design.signature().to_string(),
                    "kind": design.kind().as_str(),
                    "blocks": design.blocks().len(),
                })),
            }
            Ok(0)
        }
        CatalogCmd::Export { r#type, dest, kind, holes } => {
            let registry = Registry::open(registry_dir)?;
            let signature = TypeSignature::parse(&r#type)?;
            let kind = DesignKind::parse(&kind.to_uppercase())?;
            let holes = holes.as_deref().map(TypeSignature::parse).transpose()?;
            registry.export(&signature, kind, holes.as_ref(), &dest)?;
            if format == Format::Human {
                eprintln!("exported {signature} to {}", dest.display());
            }
            Ok(0)
        }
    }
}

fn print_entry(entry: &gdd_core::registry::IndexEntry, format: Format) {
    match format {
        Format::Human => println!(
            "{}\t{}\t{}\t{}",
            entry.signature,
            entry.kind.as_str(),
            entry.source.as_str(),
            entry.path
        ),
        Format::Structured => emit(json!({
            "type": entry.signature,
            "kind": entry.kind.as_str(),
            "holes": entry.holes,
            "source": entry.source.as_str(),
            "path": entry.path,
        })),
    }
}

/// Runs a design-producing operation and delivers its output.
fn product<F>(build: F, out: Option<&Path>, format: Format) -> CmdResult
where
    F: FnOnce() -> gdd_core::Result<GroupedDesign>,
{
    deliver(&build()?, out, format)
}

/// Prints or writes a finished design.  Stdout stays clean design text in
/// human mode so commands compose with `verify -`.
fn deliver(design: &GroupedDesign, out: Option<&Path>, format: Format) -> CmdResult {
    match (out, format) {
        (Some(path), Format::Human) => {
            design.write_to(path)?;
            println!(
                "wrote {} [{}] ({} blocks) to {}",
                design.signature(),
                design.kind(),
                design.blocks().len(),
                path.display()
            );
        }
        (Some(path), Format::Structured) => {
            design.write_to(path)?;
            emit(json!({
                "type": design.signature().to_string(),
                "kind": design.kind().as_str(),
                "blocks": design.blocks().len(),
                "out": path.display().to_string(),
            }));
        }
        (None, Format::Human) => print!("{}", design.to_text()),
        (None, Format::Structured) => emit(json!({
            "type": design.signature().to_string(),
            "kind": design.kind().as_str(),
            "blocks": design.blocks().len(),
            "design": design.to_text(),
        })),
    }
    Ok(0)
}

fn plan_json(node: &PlanNode) -> Value {
    let method = match &node.method {
        Method::Appendix { name } => json!({ "appendix": name }),
        Method::Algebra { op, params } => json!({ "algebra": op, "params": params_json(params) }),
        Method::Derived { op, params } => json!({ "derived": op, "params": params_json(params) }),
        Method::Theorem { name, params, .. } => {
            json!({ "theorem": name, "params": params_json(params) })
        }
        Method::Import => json!("import"),
        Method::Search => json!("search"),
    };
    let children: Vec<Value> = match &node.method {
        Method::Theorem { children, .. } => children.iter().map(plan_json).collect(),
        _ => Vec::new(),
    };
    json!({
        "goal": {
            "type": node.goal.signature.to_string(),
            "kind": node.goal.kind.as_str(),
            "holes": node.goal.holes.as_ref().map(|h| h.to_string()),
        },
        "method": method,
        "rule": node.rule,
        "children": children,
    })
}

fn params_json(params: &[(String, u64)]) -> Value {
    Value::Object(
        params
            .iter()
            .map(|(k, v)| (k.clone(), Value::from(*v)))
            .collect(),
    )
}

fn parse_params(specs: &[String]) -> Result<BTreeMap<String, u32>, Box<dyn std::error::Error>> {
    let mut map = BTreeMap::new();
    for spec in specs {
        let (key, value) = spec
            .split_once('=')
            .ok_or_else(|| usage(format!("parameter \"{spec}\" is not key=value")))?;
        let value: u32 = value
            .parse()
            .map_err(|_| usage(format!("parameter \"{spec}\" needs an integer value")))?;
        map.insert(key.trim().to_string(), value);
    }
    Ok(map)
}

fn signature_gum(g: u32, u: u32, m: u32) -> TypeSignature {
    TypeSignature::new([(g, u), (m, 1)])
}

fn existence_tag(verdict: &gdd_core::admissibility::AdmissibilityVerdict) -> &'static str {
    match verdict.existence {
        Existence::KnownExists { .. } => "known-exists",
        Existence::KnownNonexistent { .. } => "known-nonexistent",
        Existence::OpenOrExternal { .. } => "open-or-external",
    }
}

fn read_design(path: &Path) -> gdd_core::Result<GroupedDesign> {
    GroupedDesign::read_from(path)
}

fn emit(value: Value) {
    println!("{value}");
}

/// A malformed invocation discovered after clap parsing (bad key=value
/// payloads, unknown roles).  Reported like clap usage errors: exit code 2.
fn usage(message: String) -> Box<dyn std::error::Error> {
    Box::new(UsageError(message))
}

#[derive(Debug)]
struct UsageError(String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl std::error::Error for UsageError {}
