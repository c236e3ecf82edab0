use std::fs::File;
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use fppcm::config::{ConfigError, Mode, Profile, Suite};
use fppcm::record::{read_csv, write_csv};
use fppcm::report::summarize;
use fppcm::runner::{run_fpp, run_limits, run_tree, write_graph, write_limits_csv, write_tree_csv};
use fppcm::validate::Validator;
use fppcm::{CliError, ExperimentConfig};
use fppcm_core::par;

#[derive(Parser)]
#[command(name = "fppcm", version, about = "First passage percolation experiments on the configuration model")]
struct Cli {
    /// TOML experiment configuration; defaults apply when omitted.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Master seed, overriding the configuration.
    #[arg(long, global = true, value_name = "U64")]
    seed: Option<u64>,
    /// Worker threads; 0 uses all cores.
    #[arg(long, global = true, value_name = "N", default_value_t = 0)]
    workers: usize,
    /// Output directory, overriding the configuration.
    #[arg(long, global = true, value_name = "DIR")]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write one weighted configuration-model graph per grid size.
    Gen,
    /// Tree-flow experiment: generation and split time of a random leaf.
    Tree,
    /// Bilateral shortest-weight growth between random vertex pairs.
    Fpp {
        #[arg(long)]
        mode: Option<Mode>,
    },
    /// Draw from the limit laws of the weight.
    Limits,
    /// Run the validation suite; exits nonzero if any selected criterion fails.
    Validate {
        #[arg(long)]
        profile: Option<Profile>,
        /// Comma-separated criterion numbers.
        #[arg(long, value_delimiter = ',')]
        criteria: Vec<u8>,
    },
    /// Summarize an existing replicate CSV.
    Report { input: PathBuf },
    /// Run the suite named in the configuration.
    Run,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let workers = cli.workers;
    match par::with_workers(workers, move || execute(cli)) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn execute(cli: Cli) -> Result<bool, CliError> {
    let mut cfg = match &cli.config {
        Some(p) => ExperimentConfig::from_path(p)?,
        None => ExperimentConfig::default(),
    };
    if let Some(s) = cli.seed {
        cfg.master_seed = s;
    }
    if let Some(o) = cli.out {
        cfg.out_dir = o;
    }
    match cli.command {
        Command::Gen => gen(&cfg),
        Command::Tree => tree(&cfg),
        Command::Fpp { mode } => {
            if let Some(m) = mode {
                cfg.mode = m;
            }
            fpp(&cfg)
        }
        Command::Limits => limits(&cfg),
        Command::Validate { profile, criteria } => {
            if let Some(p) = profile {
                cfg.profile = p;
            }
            if !criteria.is_empty() {
                if let Some(&bad) = criteria.iter().find(|&&c| !(1..=12).contains(&c)) {
                    return Err(ConfigError::UnknownCriterion(bad).into());
                }
                let mut c = criteria;
                c.sort_unstable();
                c.dedup();
                cfg.criteria = c;
            }
            validate(&cfg)
        }
        Command::Report { input } => report(&cfg, &input),
        Command::Run => match cfg.suite {
            Suite::Fpp => fpp(&cfg),
            Suite::Tree => tree(&cfg),
            Suite::Limits => limits(&cfg),
            Suite::ValidateAll => validate(&cfg),
        },
    }
}

fn create(dir: &Path, name: &str) -> Result<BufWriter<File>, CliError> {
    std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    let p = dir.join(name);
    File::create(&p).map(BufWriter::new).map_err(|e| CliError::io(&p, e))
}

fn write_text(dir: &Path, name: &str, body: &str) -> Result<(), CliError> {
    std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    let p = dir.join(name);
    std::fs::write(&p, body).map_err(|e| CliError::io(&p, e))
}

fn gen(cfg: &ExperimentConfig) -> Result<bool, CliError> {
    for &n in &cfg.n_grid {
        let name = format!("graph-n{n}.txt");
        let s = write_graph(create(&cfg.out_dir, &name)?, &cfg.dist, n, cfg.master_seed)
            .map_err(|e| CliError::io(&cfg.out_dir.join(&name), e))?;
        println!(
            "n={} seed={} edges={} self_loops={} parity_fixed={} -> {}",
            s.n,
            s.seed,
            s.edges,
            s.self_loops,
            s.parity_fixed,
            cfg.out_dir.join(name).display()
        );
    }
    Ok(true)
}

fn tree(cfg: &ExperimentConfig) -> Result<bool, CliError> {
    let rows = run_tree(cfg);
    write_tree_csv(create(&cfg.out_dir, "tree.csv")?, &cfg.dist.label(), &rows)?;
    let k = rows.len() as f64;
    let mean = |f: &dyn Fn(&fppcm::runner::TreeRecord) -> f64| rows.iter().map(f).sum::<f64>() / k;
    println!(
        "m={} replicates={} mean generation {:.4}, mean hat generation {:.4} (harmonic {:.4}), mean T_m {:.4}",
        cfg.tree_length,
        rows.len(),
        mean(&|r| r.generation as f64),
        mean(&|r| r.hat_generation as f64),
        fppcm_core::special::harmonic(cfg.tree_length as u64),
        mean(&|r| r.weight)
    );
    Ok(true)
}

fn fpp(cfg: &ExperimentConfig) -> Result<bool, CliError> {
    let records = run_fpp(cfg);
    write_csv(create(&cfg.out_dir, "replicates.csv")?, &records)?;
    let rep = summarize(&records);
    write_text(&cfg.out_dir, "report.txt", &rep.text)?;
    write_text(&cfg.out_dir, "report.kv", &rep.kv_text())?;
    print!("{}", rep.text);
    Ok(true)
}

fn limits(cfg: &ExperimentConfig) -> Result<bool, CliError> {
    let rows = run_limits(cfg)?;
    write_limits_csv(create(&cfg.out_dir, "limits.csv")?, &cfg.dist, &rows)?;
    let ok: Vec<&Vec<f64>> = rows.iter().filter_map(|r| r.values.as_ref().ok()).collect();
    let cols = fppcm::runner::limit_columns(&cfg.dist);
    let means: Vec<String> = (0..3)
        .map(|j| {
            let m = ok.iter().map(|v| v[j]).sum::<f64>() / ok.len().max(1) as f64;
            format!("mean {} {m:.4}", cols[3 + j])
        })
        .collect();
    println!("{} draws, {} failed; {}", rows.len(), rows.len() - ok.len(), means.join(", "));
    Ok(true)
}

fn validate(cfg: &ExperimentConfig) -> Result<bool, CliError> {
    let mut v = Validator::new(cfg.master_seed, cfg.profile, &cfg.out_dir);
    v.on_result = Some(Box::new(|r| println!("{} [{:.1} s]", r.line(), r.seconds)));
    let run = v.run(&cfg.criteria)?;
    run.write(&cfg.out_dir)?;
    let passed = run.results.iter().filter(|r| r.pass).count();
    println!("{passed}/{} criteria pass", run.results.len());
    Ok(run.all_pass())
}

fn report(cfg: &ExperimentConfig, input: &Path) -> Result<bool, CliError> {
    let file = File::open(input).map_err(|e| CliError::io(input, e))?;
    let records = read_csv(std::io::BufReader::new(file))?;
    let rep = summarize(&records);
    write_text(&cfg.out_dir, "report.txt", &rep.text)?;
    write_text(&cfg.out_dir, "report.kv", &rep.kv_text())?;
    print!("{}", rep.text);
    Ok(true)
}
