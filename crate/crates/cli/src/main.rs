//! Command-line driver for the `covermatch` library.
//!
//! Every subcommand is a pure function of its inputs and flags: identical
//! invocations produce byte-identical artifacts. Randomized commands require
//! an explicit `--seed`; thresholds and coefficients are written as exact
//! rationals `p/q` (a bare integer `p` is accepted as `p/1`), never floats.
//!
//! Exit codes: `0` success, `1` property violation or negative result
//! (an expansion violation, an uncoverable set, a lost game, a failed
//! verification, an invalid trace, a satisfiable formula), `2` usage error
//! (bad flags, unreadable or malformed input files, exceeded caps).

use std::error::Error;
use std::fs;
use std::io::{BufRead, BufReader};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use covermatch::cnf::{adjacency_graph, random_3cnf, tr_cnf, Cnf, Polynomial};
use covermatch::covergame::{mu, play, Adversary, BudgetMode, GameParams, GameState, Move};
use covermatch::graphs::{is_expander, BipartiteGraph, ExpansionResult, Hypergraph};
use covermatch::matchings::{counterexample, find_cover_matching, matching_to_json, CoverOutcome};
use covermatch::oracle::exists_two_path_cover;
use covermatch::proofspace::{
    naive_res_refuter, res_trace_to_jsonl, PcrChecker, PcrStep, RefutationOutcome, ResChecker,
    ResStep, SpaceReport,
};
use covermatch::ratio::{format_ratio, parse_ratio};
use covermatch::strategies::{
    enumerate_families, free_family_from_strategy, lower_bound_report, verify_free_family,
    verify_winning_strategy, GameStrategy, MuProvenance, Strategy,
};
use covermatch::sweep::hall_sweep;
use covermatch::Limits;

#[derive(Parser)]
#[command(
    name = "covermatch",
    version,
    about = "Exact degree-bounded cover matchings, expansion certificates, \
             cover games, and refutation-space measurement"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct OutputOpts {
    /// Write the main artifact here instead of stdout.
    #[arg(long, global = false)]
    out: Option<PathBuf>,
    /// Emit the report in machine-readable JSON.
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct CapOpts {
    /// Largest ground-set size for which exhaustive subset enumeration runs.
    #[arg(long, default_value_t = 20)]
    subset_cap: usize,
    /// Run exhaustive enumerations even above the cap.
    #[arg(long)]
    force: bool,
}

impl CapOpts {
    fn limits(&self) -> Limits {
        Limits { subset_cap: self.subset_cap, force: self.force }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Generate a random 3-CNF with floor(delta * vars) clauses.
    GenCnf {
        /// Number of variables.
        #[arg(long)]
        vars: u32,
        /// Clause density as a rational `p/q`.
        #[arg(long)]
        delta: String,
        /// RNG seed; identical seeds give identical formulas.
        #[arg(long)]
        seed: u64,
        #[command(flatten)]
        output: OutputOpts,
    },
    /// Print the clause/variable adjacency graph of a CNF in `bip` format.
    AdjGraph {
        /// DIMACS CNF file.
        #[arg(long)]
        cnf: PathBuf,
        #[command(flatten)]
        output: OutputOpts,
    },
    /// Certify that every left set of size at most the cap expands by
    /// the given factor, or print a violating set.
    CheckExpansion {
        /// Bipartite graph in `bip` format.
        #[arg(long)]
        graph: PathBuf,
        /// Largest left-set size that must expand.
        #[arg(long)]
        size_cap: usize,
        /// Required expansion factor as a rational `p/q`.
        #[arg(long)]
        delta: String,
        #[command(flatten)]
        caps: CapOpts,
        #[command(flatten)]
        output: OutputOpts,
    },
    /// Search for a cover matching: a forest with components of at most
    /// `k` edges giving each requested left vertex degree exactly `h`.
    FindMatching {
        /// Bipartite graph in `bip` format.
        #[arg(long)]
        graph: PathBuf,
        /// Left vertices to cover: comma-separated indices, or `all`.
        #[arg(long, default_value = "all")]
        cover: String,
        /// Required degree of each covered left vertex.
        #[arg(long, default_value_t = 2)]
        h: u32,
        /// Largest number of edges per component.
        #[arg(long, default_value_t = 4)]
        k: u32,
        #[command(flatten)]
        output: OutputOpts,
    },
    /// Decide whether the selected hyperedges admit a 2-path cover.
    TwoPathCover {
        /// Hypergraph in `hyp` format.
        #[arg(long)]
        hypergraph: PathBuf,
        /// Edge indices to cover: comma-separated, or `all`.
        #[arg(long, default_value = "all")]
        edges: String,
        #[command(flatten)]
        caps: CapOpts,
        #[command(flatten)]
        output: OutputOpts,
    },
    /// Construct a hypergraph with vertex/edge ratio at least 2 - epsilon
    /// and no full 2-path cover, with a brute-force certificate log.
    Counterexample {
        /// Target epsilon as a rational `p/q`; must exceed 1/3.
        #[arg(long)]
        epsilon: String,
        /// Write the certificate log here instead of stdout.
        #[arg(long)]
        log: Option<PathBuf>,
        #[command(flatten)]
        caps: CapOpts,
        #[command(flatten)]
        output: OutputOpts,
    },
    /// Exhaustively sweep all small graphs and report every certified
    /// expander that lacks a full cover matching (there should be none).
    VerifyHall {
        /// Largest left side to enumerate (at most 5).
        #[arg(long)]
        max_left: u32,
        /// Right side size (at most 7).
        #[arg(long)]
        max_right: u32,
        /// Expansion slack as a rational `p/q`.
        #[arg(long, default_value = "1/24")]
        epsilon: String,
        /// Worker threads; never changes the report.
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        #[command(flatten)]
        output: OutputOpts,
    },
    /// Play the cover game on a graph and write the transcript.
    PlayCovergame {
        /// Bipartite graph in `bip` format.
        #[arg(long)]
        graph: PathBuf,
        /// Robustness slack as a rational `p/q`.
        #[arg(long)]
        epsilon: String,
        /// Size budget for robustness checks.
        #[arg(long)]
        size_cap: usize,
        /// Right-degree bound; defaults to the graph's maximum.
        #[arg(long)]
        degree_cap: Option<u32>,
        /// Override the component budget instead of deriving it.
        #[arg(long)]
        budget: Option<usize>,
        /// Adversary kind.
        #[arg(long, value_parser = ["random", "greedy", "script"], default_value = "random")]
        adversary: String,
        /// RNG seed; required for the random adversary.
        #[arg(long)]
        seed: Option<u64>,
        /// Number of adversary moves for random/greedy play.
        #[arg(long, default_value_t = 20)]
        moves: usize,
        /// JSON-lines move file for the scripted adversary.
        #[arg(long)]
        script: Option<PathBuf>,
        /// Skip the per-move exhaustive robustness audit.
        #[arg(long)]
        no_robust_check: bool,
        #[command(flatten)]
        caps: CapOpts,
        #[command(flatten)]
        output: OutputOpts,
    },
    /// Enumerate every assignment family the game-backed strategy can reach.
    BuildStrategy {
        #[command(flatten)]
        strategy: StrategyOpts,
        #[command(flatten)]
        output: OutputOpts,
    },
    /// Exhaustively verify the game-backed strategy: restriction closure
    /// and an extension for every encoded polynomial.
    VerifyStrategy {
        #[command(flatten)]
        strategy: StrategyOpts,
        #[command(flatten)]
        output: OutputOpts,
    },
    /// Derive the piecewise-assignment family from the strategy and verify
    /// its consistency, retraction, and extension properties.
    FreeFamily {
        #[command(flatten)]
        strategy: StrategyOpts,
        /// Piece budget; defaults to one below the component budget.
        #[arg(long)]
        level: Option<usize>,
        #[command(flatten)]
        output: OutputOpts,
    },
    /// Compute the space lower bounds implied by a component budget.
    BoundReport {
        /// DIMACS CNF file.
        #[arg(long)]
        cnf: PathBuf,
        /// Component budget as a rational `p/q`; alternative to the triple.
        #[arg(long)]
        mu: Option<String>,
        /// Robustness slack `p/q`; combined with --size-cap and --degree-cap.
        #[arg(long)]
        epsilon: Option<String>,
        /// Size budget for the derived component budget.
        #[arg(long)]
        size_cap: Option<usize>,
        /// Right-degree bound for the derived component budget.
        #[arg(long)]
        degree_cap: Option<u32>,
        /// Mark the budget as verified rather than merely claimed.
        #[arg(long)]
        verified: bool,
        #[command(flatten)]
        output: OutputOpts,
    },
    /// Stream a refutation trace through the space-measuring checker.
    CheckTrace {
        /// Proof system of the trace.
        #[arg(long, value_parser = ["res", "pcr"])]
        system: String,
        /// DIMACS CNF file; clause inputs for res, twin-encoded inputs for pcr.
        #[arg(long)]
        cnf: Option<PathBuf>,
        /// JSON-lines polynomial file as explicit pcr inputs.
        #[arg(long)]
        inputs: Option<PathBuf>,
        /// JSON-lines trace file.
        #[arg(long)]
        trace: PathBuf,
        #[command(flatten)]
        output: OutputOpts,
    },
    /// Saturate a CNF under resolution and emit a checker-validated trace.
    RefuteNaive {
        /// DIMACS CNF file.
        #[arg(long)]
        cnf: PathBuf,
        /// Largest number of distinct clauses the saturation may retain.
        #[arg(long, default_value_t = 100_000)]
        cap: usize,
        #[command(flatten)]
        output: OutputOpts,
    },
}

/// Flags shared by the strategy-pipeline subcommands. The size budget
/// defaults to `48 * rights + lefts`, which makes exhaustive certification
/// cover every subset and keeps every robustness counterexample within its
/// size bound.
#[derive(Args)]
struct StrategyOpts {
    /// DIMACS CNF file.
    #[arg(long)]
    cnf: PathBuf,
    /// Robustness slack as a rational `p/q`.
    #[arg(long, default_value = "1/24")]
    epsilon: String,
    /// Size budget; defaults to 48 * rights + lefts.
    #[arg(long)]
    size_cap: Option<usize>,
    /// Component budget override; without it the derived budget is used.
    #[arg(long)]
    budget: Option<usize>,
    /// Largest number of distinct game positions to enumerate.
    #[arg(long, default_value_t = 500_000)]
    position_cap: usize,
    /// Skip the per-move exhaustive robustness audit.
    #[arg(long)]
    no_robust_check: bool,
    #[command(flatten)]
    caps: CapOpts,
}

impl StrategyOpts {
    fn build(&self) -> Result<(Cnf, GameStrategy, Value), Box<dyn Error>> {
        let phi = Cnf::from_dimacs(&fs::read_to_string(&self.cnf)?)?;
        let graph = adjacency_graph(&phi).graph;
        let epsilon = parse_ratio(&self.epsilon)?;
        let s = self
            .size_cap
            .unwrap_or(48 * graph.right_count() as usize + graph.left_count() as usize);
        let d = graph.max_right_degree() as u32;
        let params = GameParams::new(epsilon.clone(), s, d)?;
        let invocation = json!({
            "cnf": self.cnf.display().to_string(),
            "epsilon": format_ratio(&epsilon),
            "size_cap": s,
            "degree_cap": d,
            "budget": self.budget,
            "position_cap": self.position_cap,
            "robust_check": !self.no_robust_check,
        });
        let strategy = GameStrategy::new(
            phi.clone(),
            params,
            self.budget,
            !self.no_robust_check,
            self.caps.limits(),
        )?;
        Ok((phi, strategy, invocation))
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(2)
        }
    }
}

fn emit(out: Option<&Path>, content: &str) -> Result<(), Box<dyn Error>> {
    match out {
        Some(path) => fs::write(path, content)?,
        None => print!("{content}"),
    }
    Ok(())
}

/// Parse `all` or a comma-separated index list against an exclusive bound.
fn parse_indices(spec: &str, count: usize, what: &str) -> Result<Vec<u32>, Box<dyn Error>> {
    if spec == "all" {
        return Ok((0..count as u32).collect());
    }
    let mut out = Vec::new();
    for tok in spec.split(',') {
        let idx: u32 = tok
            .trim()
            .parse()
            .map_err(|_| format!("bad {what} index {tok:?}"))?;
        if idx as usize >= count {
            return Err(format!("{what} index {idx} out of range (count {count})").into());
        }
        out.push(idx);
    }
    Ok(out)
}

fn space_report_text(report: &SpaceReport) -> String {
    let mut text = format!(
        "steps: {}\ntotal space: {}\nmax width: {}\nbest configuration: \
         {} clauses of width >= {}\n",
        report.steps,
        report.total_space,
        report.max_width,
        report.best_config_profile.0,
        report.best_config_profile.1,
    );
    if let Some(m) = report.monomial_space {
        text.push_str(&format!("monomial space: {m}\n"));
    }
    text
}

fn run(command: Command) -> Result<u8, Box<dyn Error>> {
    match command {
        Command::GenCnf { vars, delta, seed, output } => {
            let density = parse_ratio(&delta)?;
            let phi = random_3cnf(vars, &density, seed)?;
            let artifact = format!(
                "c covermatch gen-cnf --vars {vars} --delta {} --seed {seed}\n{}",
                format_ratio(&density),
                phi.to_dimacs()
            );
            emit(output.out.as_deref(), &artifact)?;
            Ok(0)
        }

        Command::AdjGraph { cnf, output } => {
            let phi = Cnf::from_dimacs(&fs::read_to_string(&cnf)?)?;
            let adj = adjacency_graph(&phi);
            if output.json {
                let report = json!({
                    "invocation": {"cnf": cnf.display().to_string()},
                    "graph": adj.graph.to_text(),
                    "clause_labels": adj.clause_labels,
                    "variable_labels": adj.variable_labels,
                });
                emit(output.out.as_deref(), &format!("{report:#}\n"))?;
            } else {
                emit(output.out.as_deref(), &adj.graph.to_text())?;
            }
            Ok(0)
        }

        Command::CheckExpansion { graph, size_cap, delta, caps, output } => {
            let g = BipartiteGraph::from_text(&fs::read_to_string(&graph)?)?;
            let factor = parse_ratio(&delta)?;
            let result = is_expander(&g, size_cap, &factor, &caps.limits())?;
            let invocation = json!({
                "graph": graph.display().to_string(),
                "size_cap": size_cap,
                "delta": format_ratio(&factor),
            });
            match result {
                ExpansionResult::Certified => {
                    if output.json {
                        let report =
                            json!({"invocation": invocation, "certified": true});
                        emit(output.out.as_deref(), &format!("{report}\n"))?;
                    } else {
                        emit(
                            output.out.as_deref(),
                            &format!(
                                "certified: every left set of size <= {size_cap} has at least \
                                 {} times as many neighbors\n",
                                format_ratio(&factor)
                            ),
                        )?;
                    }
                    Ok(0)
                }
                ExpansionResult::Violation(set) => {
                    if output.json {
                        let report = json!({
                            "invocation": invocation,
                            "certified": false,
                            "violating_set": set,
                        });
                        emit(output.out.as_deref(), &format!("{report}\n"))?;
                    } else {
                        let list: Vec<String> = set.iter().map(u32::to_string).collect();
                        emit(
                            output.out.as_deref(),
                            &format!("violation: left set {{{}}} does not expand\n", list.join(", ")),
                        )?;
                    }
                    Ok(1)
                }
            }
        }

        Command::FindMatching { graph, cover, h, k, output } => {
            let g = BipartiteGraph::from_text(&fs::read_to_string(&graph)?)?;
            let lefts = parse_indices(&cover, g.left_count() as usize, "left")?;
            let invocation = json!({
                "graph": graph.display().to_string(),
                "cover": lefts,
                "h": h,
                "k": k,
            });
            match find_cover_matching(&g, &lefts, h, k)? {
                CoverOutcome::Covered(f) => {
                    let components = matching_to_json(&f)?;
                    if output.json {
                        let report = json!({
                            "invocation": invocation,
                            "covered": true,
                            "components": components,
                        });
                        emit(output.out.as_deref(), &format!("{report}\n"))?;
                    } else {
                        emit(output.out.as_deref(), &format!("covered: {components}\n"))?;
                    }
                    Ok(0)
                }
                CoverOutcome::Uncoverable(reason) => {
                    if output.json {
                        let report = json!({
                            "invocation": invocation,
                            "covered": false,
                            "reason": format!("{reason:?}"),
                        });
                        emit(output.out.as_deref(), &format!("{report}\n"))?;
                    } else {
                        emit(output.out.as_deref(), &format!("uncoverable: {reason:?}\n"))?;
                    }
                    Ok(1)
                }
            }
        }

        Command::TwoPathCover { hypergraph, edges, caps, output } => {
            let hg = Hypergraph::from_text(&fs::read_to_string(&hypergraph)?)?;
            let chosen: Vec<usize> = parse_indices(&edges, hg.edge_count(), "edge")?
                .into_iter()
                .map(|e| e as usize)
                .collect();
            let mut sorted = chosen.clone();
            sorted.sort_unstable();
            sorted.dedup();
            if sorted.len() != chosen.len() {
                return Err("edge list contains duplicates".into());
            }
            let exists = exists_two_path_cover(&hg, &sorted, &caps.limits())?;
            if output.json {
                let report = json!({
                    "invocation": {
                        "hypergraph": hypergraph.display().to_string(),
                        "edges": sorted,
                    },
                    "coverable": exists,
                });
                emit(output.out.as_deref(), &format!("{report}\n"))?;
            } else {
                emit(
                    output.out.as_deref(),
                    if exists { "coverable\n" } else { "no 2-path cover\n" },
                )?;
            }
            Ok(if exists { 0 } else { 1 })
        }

        Command::Counterexample { epsilon, log, caps, output } => {
            let eps = parse_ratio(&epsilon)?;
            let witness = counterexample(&eps)?;
            let hg = &witness.hypergraph;
            let limits = caps.limits();

            // Brute-force certificate: the full edge set is uncoverable and
            // every drop-one subset is coverable (coverability is downward
            // closed, so this settles all proper subsets).
            let full: Vec<usize> = (0..hg.edge_count()).collect();
            let mut log_lines = vec![format!(
                "counterexample for epsilon {}: {} vertices, {} edges, ratio {}, \
                 {} amplification step(s)",
                format_ratio(&eps),
                hg.vertex_count(),
                hg.edge_count(),
                format_ratio(&witness.ratio),
                witness.amplifications,
            )];
            let full_cover = exists_two_path_cover(hg, &full, &limits)?;
            log_lines.push(format!(
                "full edge set: {}",
                if full_cover { "COVERABLE (violation!)" } else { "no 2-path cover" }
            ));
            let mut all_proper_coverable = true;
            for drop in 0..hg.edge_count() {
                let subset: Vec<usize> =
                    (0..hg.edge_count()).filter(|&e| e != drop).collect();
                let coverable = exists_two_path_cover(hg, &subset, &limits)?;
                all_proper_coverable &= coverable;
                log_lines.push(format!(
                    "without edge {drop}: {}",
                    if coverable { "coverable" } else { "STILL UNCOVERABLE (violation!)" }
                ));
            }
            let certified = !full_cover && all_proper_coverable;
            log_lines.push(format!(
                "certificate: {}",
                if certified { "VALID" } else { "INVALID" }
            ));

            emit(output.out.as_deref(), &hg.to_text())?;
            let log_text = log_lines.join("\n") + "\n";
            match &log {
                Some(path) => fs::write(path, &log_text)?,
                None if output.out.is_some() => print!("{log_text}"),
                None => eprint!("{log_text}"),
            }
            Ok(if certified { 0 } else { 1 })
        }

        Command::VerifyHall { max_left, max_right, epsilon, jobs, output } => {
            let eps = parse_ratio(&epsilon)?;
            let report = hall_sweep(max_left, max_right, &eps, jobs)?;
            if output.json {
                emit(output.out.as_deref(), &format!("{}\n", report.to_json()))?;
            } else {
                emit(output.out.as_deref(), &report.to_text())?;
            }
            Ok(if report.counterexample_count() == 0 { 0 } else { 1 })
        }

        Command::PlayCovergame {
            graph,
            epsilon,
            size_cap,
            degree_cap,
            budget,
            adversary,
            seed,
            moves,
            script,
            no_robust_check,
            caps,
            output,
        } => {
            let g = BipartiteGraph::from_text(&fs::read_to_string(&graph)?)?;
            let eps = parse_ratio(&epsilon)?;
            let d = degree_cap.unwrap_or(g.max_right_degree() as u32);
            let params = GameParams::new(eps, size_cap, d)?;
            let budget_mode = match budget {
                Some(m) => BudgetMode::MaxComponents(m),
                None => BudgetMode::Mu,
            };
            let adversary = match adversary.as_str() {
                "random" => Adversary::Random {
                    seed: seed.ok_or("--seed is required for the random adversary")?,
                    moves,
                },
                "greedy" => Adversary::Greedy { moves },
                "script" => {
                    let path = script.ok_or("--script is required for the scripted adversary")?;
                    let mut parsed = Vec::new();
                    for (idx, line) in fs::read_to_string(&path)?.lines().enumerate() {
                        if line.trim().is_empty() {
                            continue;
                        }
                        let value: Value = serde_json::from_str(line)
                            .map_err(|e| format!("script line {}: {e}", idx + 1))?;
                        parsed.push(
                            Move::from_json(&value)
                                .map_err(|e| format!("script line {}: {e}", idx + 1))?,
                        );
                    }
                    Adversary::Scripted(parsed)
                }
                _ => unreachable!("clap validates the adversary kind"),
            };
            let state = GameState::new(g, params, budget_mode, !no_robust_check, caps.limits())?;
            let (transcript, _) = play(state, &adversary)?;
            let lost = transcript.cover_lost();
            emit(output.out.as_deref(), &transcript.to_jsonl())?;
            if output.out.is_some() {
                println!("{}", if lost { "cover lost" } else { "cover survived" });
            }
            Ok(if lost { 1 } else { 0 })
        }

        Command::BuildStrategy { strategy, output } => {
            let (phi, game, invocation) = strategy.build()?;
            let k = game.k();
            let families =
                enumerate_families(&Strategy::Game(game), &phi, strategy.position_cap)?;
            if output.json {
                let listed: Vec<Value> = families
                    .iter()
                    .map(|h| {
                        Value::Array(
                            h.members().iter().map(|m| Value::String(m.to_string())).collect(),
                        )
                    })
                    .collect();
                let report = json!({
                    "invocation": invocation,
                    "component_budget": k,
                    "family_count": families.len(),
                    "families": listed,
                });
                emit(output.out.as_deref(), &format!("{report}\n"))?;
            } else {
                let mut text = format!(
                    "component budget: {k}\nreachable families: {}\n",
                    families.len()
                );
                for h in &families {
                    let members: Vec<String> =
                        h.members().iter().map(ToString::to_string).collect();
                    text.push_str(&format!("{{{}}}\n", members.join(", ")));
                }
                emit(output.out.as_deref(), &text)?;
            }
            Ok(0)
        }

        Command::VerifyStrategy { strategy, output } => {
            let (phi, game, invocation) = strategy.build()?;
            let k = game.k();
            let polys = tr_cnf(&phi);
            let report = verify_winning_strategy(
                &Strategy::Game(game),
                &phi,
                &polys,
                k,
                strategy.position_cap,
            )?;
            let passed = report.passed();
            if output.json {
                let value = json!({
                    "invocation": invocation,
                    "component_budget": k,
                    "families": report.families,
                    "extension_checks": report.extension_checks,
                    "passed": passed,
                    "violation": report.violation.as_ref().map(|v| format!("{v:?}")),
                });
                emit(output.out.as_deref(), &format!("{value}\n"))?;
            } else {
                let mut text = format!(
                    "component budget: {k}\nfamilies: {}\nextension checks: {}\n",
                    report.families, report.extension_checks
                );
                match &report.violation {
                    None => text.push_str("winning strategy: verified\n"),
                    Some(v) => text.push_str(&format!("violation: {v:?}\n")),
                }
                emit(output.out.as_deref(), &text)?;
            }
            Ok(if passed { 0 } else { 1 })
        }

        Command::FreeFamily { strategy, level, output } => {
            let (phi, game, invocation) = strategy.build()?;
            let k = game.k();
            let r = level.unwrap_or(k.saturating_sub(1));
            let family = free_family_from_strategy(
                &Strategy::Game(game),
                &phi,
                r,
                strategy.position_cap,
            )?;
            let report = verify_free_family(&family, &phi, r);
            let passed = report.passed();
            if output.json {
                let members: Vec<String> = family.members().map(ToString::to_string).collect();
                let value = json!({
                    "invocation": invocation,
                    "piece_budget": r,
                    "members": members,
                    "extension_checks": report.extension_checks,
                    "passed": passed,
                    "violation": report.violation.as_ref().map(|v| format!("{v:?}")),
                });
                emit(output.out.as_deref(), &format!("{value}\n"))?;
            } else {
                let mut text = format!(
                    "piece budget: {r}\nmembers: {}\nextension checks: {}\n",
                    report.members, report.extension_checks
                );
                for member in family.members() {
                    text.push_str(&format!("{member}\n"));
                }
                match &report.violation {
                    None => text.push_str("free family: verified\n"),
                    Some(v) => text.push_str(&format!("violation: {v:?}\n")),
                }
                emit(output.out.as_deref(), &text)?;
            }
            Ok(if passed { 0 } else { 1 })
        }

        Command::BoundReport {
            cnf,
            mu: mu_flag,
            epsilon,
            size_cap,
            degree_cap,
            verified,
            output,
        } => {
            let phi = Cnf::from_dimacs(&fs::read_to_string(&cnf)?)?;
            let budget = match (&mu_flag, &epsilon, size_cap, degree_cap) {
                (Some(text), None, None, None) => parse_ratio(text)?,
                (None, Some(eps), Some(s), Some(d)) => mu(&parse_ratio(eps)?, s, d)?,
                _ => {
                    return Err("pass either --mu, or all of --epsilon, --size-cap, \
                                and --degree-cap"
                        .into())
                }
            };
            let provenance =
                if verified { MuProvenance::Verified } else { MuProvenance::Claimed };
            let report = lower_bound_report(&phi, &budget, provenance);
            if output.json {
                emit(output.out.as_deref(), &format!("{}\n", report.to_json()))?;
            } else {
                emit(output.out.as_deref(), &report.to_text())?;
            }
            Ok(0)
        }

        Command::CheckTrace { system, cnf, inputs, trace, output } => {
            let reader = BufReader::new(fs::File::open(&trace)?);
            let invocation = json!({
                "system": system,
                "trace": trace.display().to_string(),
            });
            let finished: Result<SpaceReport, String> = match system.as_str() {
                "res" => {
                    let path = cnf.as_ref().ok_or("--cnf is required for res traces")?;
                    let phi = Cnf::from_dimacs(&fs::read_to_string(path)?)?;
                    stream_trace(reader, ResChecker::new(&phi), ResStep::from_json, ResChecker::apply)
                        .and_then(|checker| checker.finish().map_err(|e| e.to_string()))
                }
                "pcr" => {
                    let polys = match (&cnf, &inputs) {
                        (Some(path), None) => {
                            tr_cnf(&Cnf::from_dimacs(&fs::read_to_string(path)?)?)
                        }
                        (None, Some(path)) => {
                            let mut out = Vec::new();
                            for (idx, line) in
                                fs::read_to_string(path)?.lines().enumerate()
                            {
                                if line.trim().is_empty() {
                                    continue;
                                }
                                let value: Value = serde_json::from_str(line)
                                    .map_err(|e| format!("inputs line {}: {e}", idx + 1))?;
                                out.push(
                                    Polynomial::from_json(&value)
                                        .map_err(|e| format!("inputs line {}: {e}", idx + 1))?,
                                );
                            }
                            out
                        }
                        _ => {
                            return Err(
                                "pcr traces need exactly one of --cnf or --inputs".into()
                            )
                        }
                    };
                    stream_trace(reader, PcrChecker::new(&polys), PcrStep::from_json, PcrChecker::apply)
                        .and_then(|checker| checker.finish().map_err(|e| e.to_string()))
                }
                _ => unreachable!("clap validates the system"),
            };
            match finished {
                Ok(report) => {
                    if output.json {
                        let value = json!({
                            "invocation": invocation,
                            "valid": true,
                            "report": report.to_json(),
                        });
                        emit(output.out.as_deref(), &format!("{value}\n"))?;
                    } else {
                        emit(
                            output.out.as_deref(),
                            &format!("valid refutation\n{}", space_report_text(&report)),
                        )?;
                    }
                    Ok(0)
                }
                Err(reason) => {
                    if output.json {
                        let value = json!({
                            "invocation": invocation,
                            "valid": false,
                            "reason": reason,
                        });
                        emit(output.out.as_deref(), &format!("{value}\n"))?;
                    } else {
                        emit(output.out.as_deref(), &format!("invalid trace: {reason}\n"))?;
                    }
                    Ok(1)
                }
            }
        }

        Command::RefuteNaive { cnf, cap, output } => {
            let phi = Cnf::from_dimacs(&fs::read_to_string(&cnf)?)?;
            match naive_res_refuter(&phi, cap)? {
                RefutationOutcome::Refuted(steps) => {
                    let report = covermatch::proofspace::check_res_trace(&phi, &steps)
                        .expect("refuter output must validate");
                    emit(output.out.as_deref(), &res_trace_to_jsonl(&steps))?;
                    let summary = if output.json {
                        format!(
                            "{}\n",
                            json!({
                                "invocation": {
                                    "cnf": cnf.display().to_string(),
                                    "cap": cap,
                                },
                                "refuted": true,
                                "report": report.to_json(),
                            })
                        )
                    } else {
                        format!("refuted\n{}", space_report_text(&report))
                    };
                    if output.out.is_some() {
                        print!("{summary}");
                    } else {
                        eprint!("{summary}");
                    }
                    Ok(0)
                }
                RefutationOutcome::Satisfiable => {
                    if output.json {
                        let value = json!({
                            "invocation": {"cnf": cnf.display().to_string(), "cap": cap},
                            "refuted": false,
                        });
                        emit(output.out.as_deref(), &format!("{value}\n"))?;
                    } else {
                        emit(output.out.as_deref(), "satisfiable: no refutation exists\n")?;
                    }
                    Ok(1)
                }
            }
        }
    }
}

/// Fold a JSON-lines trace through a checker one step at a time, so memory
/// use depends on configuration size rather than trace length.
fn stream_trace<C, S>(
    reader: impl BufRead,
    mut checker: C,
    parse: impl Fn(&Value) -> Result<S, String>,
    apply: impl Fn(&mut C, &S) -> Result<(), covermatch::proofspace::TraceError>,
) -> Result<C, String> {
    let mut line_no = 0usize;
    for line in reader.lines() {
        line_no += 1;
        let line = line.map_err(|e| format!("line {line_no}: {e}"))?;
        if line.trim().is_empty() {
            continue;
        }
        let value: Value =
            serde_json::from_str(&line).map_err(|e| format!("line {line_no}: {e}"))?;
        let step = parse(&value).map_err(|e| format!("line {line_no}: {e}"))?;
        apply(&mut checker, &step).map_err(|e| format!("line {line_no}: {e}"))?;
    }
    Ok(checker)
}
