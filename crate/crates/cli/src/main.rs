use std::path::{Path, PathBuf};
use std::process::ExitCode;

use bellpoly_cli::experiments::{conjecture2_grid, CONJECTURE2_GRID, THEOREM1_GRID};
use bellpoly_cli::cache::{DEFAULT_DIR, ENV_VAR};
use bellpoly_cli::{Cache, CliError, CliResult, ExperimentReport, Runner, SCHEMA};
use bellpoly_core::families::{make, registry};
use bellpoly_core::polytope::DEFAULT_MAX_VERTICES;
use bellpoly_core::scenario::{DeterministicStrategy, Scenario};
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

#[derive(Parser)]
#[command(name = "bellpoly", version, about = "Exact facet enumeration and classification for Bell local polytopes")]
struct Cli {
    /// Cache directory for facet enumerations
    #[arg(long, global = true, env = ENV_VAR, default_value = DEFAULT_DIR)]
    cache: PathBuf,
    /// Recompute instead of reading the cache
    #[arg(long, global = true)]
    force: bool,
    /// Human-readable output instead of JSON
    #[arg(long, global = true)]
    pretty: bool,
    /// Refuse scenarios with more local vertices than this
    #[arg(long, global = true, default_value_t = DEFAULT_MAX_VERTICES)]
    max_vertices: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Count (and optionally list) the deterministic vertices of a scenario
    Vertices {
        #[arg(long)]
        scenario: PathBuf,
        /// Print every vertex (1-based outcomes)
        #[arg(long)]
        list: bool,
    },
    /// Enumerate and classify the facets of a scenario
    Facets {
        #[arg(long)]
        scenario: PathBuf,
    },
    /// Run a named experiment
    Experiment {
        id: ExperimentId,
        /// Include the heaviest runs (tripartite scenario, larger grids)
        #[arg(long)]
        long: bool,
        /// theorem4: smallest n
        #[arg(long, default_value_t = 2)]
        n_min: usize,
        /// theorem4: largest n
        #[arg(long, default_value_t = 6)]
        n_max: usize,
        /// theorem1: sweep all second-party profiles with at most this many settings
        #[arg(long, requires = "max_outcomes")]
        max_settings: Option<usize>,
        /// theorem1: and at most this many outcomes per setting
        #[arg(long, requires = "max_settings")]
        max_outcomes: Option<usize>,
        /// fine-lemma: random cases per scenario
        #[arg(long, default_value_t = 500)]
        cases: usize,
        /// fine-lemma: RNG seed
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
    /// List the inequality families
    Families,
}

#[derive(Clone, Copy, ValueEnum)]
enum ExperimentId {
    Theorem1,
    Conjecture2,
    Observation3,
    Theorem4,
    FineLemma,
}

fn read_scenario(path: &Path) -> CliResult<Scenario> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Scenario(path.to_owned(), e.to_string()))?;
    let trimmed = text.trim();
    // JSON object, or the bracket notation `[(2 2),(2 3)]`
    let parsed = if trimmed.starts_with('{') {
        serde_json::from_str::<Scenario>(trimmed).map_err(|e| e.to_string())
    } else {
        trimmed.parse::<Scenario>().map_err(|e| e.to_string())
    };
    parsed.map_err(|e| CliError::Scenario(path.to_owned(), e))
}

/// Nondecreasing outcome profiles with 2..=settings entries in 2..=outcomes.
fn profiles(settings: usize, outcomes: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut stack: Vec<Vec<usize>> = (2..=outcomes).map(|w| vec![w]).collect();
    while let Some(p) = stack.pop() {
        if p.len() >= 2 {
            out.push(p.clone());
        }
        if p.len() < settings {
            let last = *p.last().expect("nonempty");
            for w in last..=outcomes {
                let mut q = p.clone();
                q.push(w);
                stack.push(q);
            }
        }
    }
    out.sort();
    out
}

fn emit(value: &serde_json::Value) {
    println!("{}", serde_json::to_string_pretty(value).expect("values serialize"));
}

fn emit_report(r: &ExperimentReport, pretty: bool) {
    if pretty {
        print!("{}", r.render_table());
    } else {
        println!("{}", r.to_json());
    }
}

fn run(cli: Cli) -> CliResult<bool> {
    let mut runner = Runner::new(Cache::new(&cli.cache));
    runner.force = cli.force;
    runner.max_vertices = cli.max_vertices;
    let report = match cli.command {
        Command::Vertices { scenario, list } => {
            let s = read_scenario(&scenario)?;
            let count = s.num_vertices();
            if cli.pretty {
                println!("{s}: {count} vertices, dimension {}", s.dimension());
            }
            let vertices = list.then(|| {
                DeterministicStrategy::enumerate(&s)
                    .into_iter()
                    .map(|v| v.choices.iter().map(|c| c.iter().map(|a| a + 1).collect::<Vec<_>>()).collect::<Vec<_>>())
                    .collect::<Vec<_>>()
            });
            if cli.pretty {
                for v in vertices.iter().flatten() {
                    println!("  {v:?}");
                }
            } else {
                emit(&json!({ "schema": SCHEMA, "scenario": s, "dimension": s.dimension(), "count": count, "vertices": vertices }));
            }
            return Ok(true);
        }
        Command::Facets { scenario } => runner.cmd_facets(&read_scenario(&scenario)?)?,
        Command::Families => {
            let entries: Vec<serde_json::Value> = registry()
                .into_iter()
                .map(|id| {
                    let i = make(&id)?;
                    Ok(json!({
                        "id": id,
                        "name": id.to_string(),
                        "inequality": i.to_json(),
                        "text": i.render(),
                        "local_bound": i.local_max(),
                    }))
                })
                .collect::<CliResult<_>>()?;
            if cli.pretty {
                for e in &entries {
                    println!("{:<48} {}", e["name"].as_str().unwrap_or_default(), e["text"].as_str().unwrap_or_default());
                }
            } else {
                emit(&json!({ "schema": SCHEMA, "families": entries }));
            }
            return Ok(true);
        }
        Command::Experiment { id, long, n_min, n_max, max_settings, max_outcomes, cases, seed } => match id {
            ExperimentId::Theorem1 => {
                let grid = match (max_settings, max_outcomes) {
                    (Some(n), Some(w)) => profiles(n, w),
                    _ => THEOREM1_GRID.iter().map(|w| w.to_vec()).collect(),
                };
                runner.theorem1(&grid)?
            }
            ExperimentId::Conjecture2 => {
                // the larger grid extends the default sizes to 4
                let grid = if long { conjecture2_grid(4) } else { CONJECTURE2_GRID.to_vec() };
                runner.conjecture2(&grid)?
            }
            ExperimentId::Observation3 => runner.observation3(long)?,
            ExperimentId::Theorem4 => {
                if n_min < 2 || n_max < n_min {
                    return Err(CliError::Usage(format!("need 2 <= n-min <= n-max, got {n_min}..{n_max}")));
                }
                runner.theorem4(&(n_min..=n_max).collect::<Vec<_>>())?
            }
            ExperimentId::FineLemma => runner.fine_lemma(
                &[Scenario::bipartite(&[2, 2], &[2, 2]), Scenario::bipartite(&[2, 2], &[3, 2])],
                cases,
                seed,
            )?,
        },
    };
    emit_report(&report, cli.pretty);
    Ok(report.passed)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("bellpoly: {e}");
            ExitCode::from(2)
        }
    }
}
