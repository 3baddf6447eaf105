use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use regnet::attractor::{detect_attractor, ComponentRule, DetectOptions};
use regnet::ensembles::{sample_initial, EnsembleSeed};
use regnet::error::{Error, Result};
use regnet::harness::{emit_grid, read_stats, run_ensemble, write_stats, EnsembleSpec};
use regnet::io::{self, InstanceDto, ReportDto, SubnetworkDto};
use regnet::modularity::{build_embedding, conjugacy_defect};
use regnet::symmetry::{paired_ensemble_symmetry, SymmetrySpec};

/// Discrete-time regulatory networks on random digraphs: simulate single
/// instances, sweep seeded ensembles, and check the modularity and sign
/// symmetry conjugacies.
#[derive(Parser)]
#[command(name = "regnet", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct CommonRun {
    /// Root seed (overrides the seed in spec files; seeds missing initial
    /// conditions in instance files)
    #[arg(long)]
    seed: Option<u64>,
    /// Worker count; falls back to REGNET_THREADS, then to all cores.
    /// Results are seed-determined, never thread-determined.
    #[arg(long)]
    threads: Option<usize>,
    /// Step budget per orbit
    #[arg(long)]
    max_steps: Option<usize>,
    /// Output directory
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Run one instance file and print its attractor report as JSON
    Simulate {
        #[command(flatten)]
        common: CommonRun,
        /// Dump the orbit to CSV (t,v,x_v) with an instance sidecar
        #[arg(long)]
        trace: Option<PathBuf>,
        /// Steps to trace (default 200)
        #[arg(long, default_value_t = 200)]
        trace_steps: usize,
        /// Component counting rule for the oscillatory subnetwork
        #[arg(long, value_enum, default_value = "weak")]
        component_rule: RuleArg,
        instance: PathBuf,
    },
    /// Run a grid ensemble spec and emit stats.json, grid.csv, grid.json
    Ensemble {
        #[command(flatten)]
        common: CommonRun,
        spec: PathBuf,
    },
    /// Run the paired eta <-> 1-eta ensemble comparison
    SymmetryCheck {
        #[command(flatten)]
        common: CommonRun,
        spec: PathBuf,
    },
    /// Build a module embedding from a witness instance and verify it
    ModularityCheck {
        #[command(flatten)]
        common: CommonRun,
        /// Sampled rectangle points per check
        #[arg(long, default_value_t = 100)]
        samples: usize,
        /// Conjugacy iteration length per sample
        #[arg(long, default_value_t = 1000)]
        steps: usize,
        witness: PathBuf,
        module: PathBuf,
    },
    /// Re-emit grid.csv/grid.json from a stats.json file
    EmitGrid {
        #[command(flatten)]
        common: CommonRun,
        stats: PathBuf,
    },
}

#[derive(Clone, Copy, clap::ValueEnum)]
enum RuleArg {
    Weak,
    Cycle,
}

impl From<RuleArg> for ComponentRule {
    fn from(r: RuleArg) -> Self {
        match r {
            RuleArg::Weak => ComponentRule::Weak,
            RuleArg::Cycle => ComponentRule::Cycle,
        }
    }
}

fn threads_from(common: &CommonRun) -> Option<usize> {
    common.threads.or_else(|| {
        std::env::var("REGNET_THREADS")
            .ok()
            .and_then(|v| v.parse().ok())
    })
}

fn out_dir(common: &CommonRun) -> PathBuf {
    common.out.clone().unwrap_or_else(|| PathBuf::from("out"))
}

fn cmd_simulate(
    common: &CommonRun,
    trace: Option<&Path>,
    trace_steps: usize,
    rule: ComponentRule,
    instance_path: &Path,
) -> Result<()> {
    let dto: InstanceDto = io::read_json(instance_path)?;
    let (net, x0) = dto.to_network()?;
    let x0 = match x0 {
        Some(x0) => x0,
        None => {
            let seed = common.seed.ok_or_else(|| {
                Error::domain("instance has no x0; provide one or pass --seed")
            })?;
            let mut rng = EnsembleSeed::new(seed).orbit_stream(0, 0);
            sample_initial(net.vertex_count(), &mut rng)
        }
    };
    let mut opts: DetectOptions<f64> = DetectOptions::default();
    if let Some(ms) = common.max_steps {
        opts.max_steps = ms;
    }
    let report = detect_attractor(&net, &x0, &opts)?;
    if let Some(path) = trace {
        io::write_orbit_trace(&net, &x0, trace_steps, path)?;
    }
    print!("{}", io::to_pretty_json(&ReportDto::from_report(&net, &report, rule)?));
    Ok(())
}

fn cmd_ensemble(common: &CommonRun, spec_path: &Path) -> Result<()> {
    let mut spec: EnsembleSpec = io::read_json(spec_path)?;
    if let Some(seed) = common.seed {
        spec.root_seed = seed;
    }
    if let Some(ms) = common.max_steps {
        spec.max_steps = ms;
    }
    let dir = common
        .out
        .clone()
        .or_else(|| spec.output_dir.clone())
        .unwrap_or_else(|| PathBuf::from("out"));
    let stats = run_ensemble(&spec, threads_from(common))?;
    let stats_path = write_stats(&stats, &dir)?;
    let (csv_path, json_path) = emit_grid(&stats, &dir)?;
    eprintln!(
        "wrote {}, {}, {}",
        stats_path.display(),
        csv_path.display(),
        json_path.display()
    );
    Ok(())
}

fn cmd_symmetry(common: &CommonRun, spec_path: &Path) -> Result<()> {
    let mut spec: SymmetrySpec = io::read_json(spec_path)?;
    if let Some(seed) = common.seed {
        spec.root_seed = seed;
    }
    if let Some(ms) = common.max_steps {
        spec.max_steps = ms;
    }
    let run = || paired_ensemble_symmetry(&spec);
    let report = match threads_from(common) {
        Some(n) => rayon_pool(n)?.install(run)?,
        None => run()?,
    };
    print!("{}", io::to_pretty_json(&report));
    Ok(())
}

fn rayon_pool(n: usize) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build()
        .map_err(|e| Error::construction(format!("thread pool: {e}")))
}

#[derive(serde::Serialize)]
struct ModularityReportDto {
    epsilon: f64,
    extension: io::GraphDto,
    module: SubnetworkDto,
    /// extension signs for the witness module signs, in arrow order
    signs: Vec<i8>,
    external_levels: Vec<u32>,
    phi_a_slopes: Vec<f64>,
    phi_a_constants: Vec<f64>,
    phi_v_slopes: Vec<f64>,
    phi_v_constants: Vec<f64>,
    rect_thresholds: Vec<(f64, f64)>,
    rect_initial: Vec<(f64, f64)>,
    surjectivity_exact: bool,
    samples: usize,
    steps: usize,
    max_defect: f64,
    frozen_violations: usize,
}

fn cmd_modularity(
    common: &CommonRun,
    samples: usize,
    steps: usize,
    witness_path: &Path,
    module_path: &Path,
) -> Result<()> {
    let dto: InstanceDto = io::read_json(witness_path)?;
    let (net, x0) = dto.to_network()?;
    let x0 = x0.ok_or_else(|| Error::domain("witness instance must include x0"))?;
    let module = io::read_json::<SubnetworkDto>(module_path)?.to_subnetwork()?;
    let mut opts: DetectOptions<f64> = DetectOptions::default();
    if let Some(ms) = common.max_steps {
        opts.max_steps = ms;
    }
    let report = detect_attractor(&net, &x0, &opts)?;
    let emb = build_embedding(&net, &report, &module)?;
    let surjectivity_exact = emb.surjectivity_check().is_ok();

    let seed = EnsembleSeed::new(common.seed.unwrap_or(0));
    let signs = emb.witness_module_signs().clone();
    let mut max_defect = 0.0f64;
    let mut frozen_violations = 0usize;
    for s in 0..samples {
        let mut rng = seed.stream("modularity", &[s as u64]);
        let (t, x) = emb.rectangles().sample(&mut rng);
        let run = conjugacy_defect(&emb, &signs, &t, &x, steps)?;
        max_defect = max_defect.max(run.defect);
        frozen_violations += run.frozen_violations;
    }

    let dense = emb.module_dense();
    let out = ModularityReportDto {
        epsilon: emb.epsilon(),
        extension: io::GraphDto::from_digraph(emb.extension()),
        module: SubnetworkDto::from_subnetwork(emb.module()),
        signs: emb.extended_signs(&signs)?.values().to_vec(),
        external_levels: emb.external_levels().to_vec(),
        phi_a_slopes: (0..dense.arrow_count()).map(|j| emb.phi_a_coeffs(j).0).collect(),
        phi_a_constants: (0..dense.arrow_count()).map(|j| emb.phi_a_coeffs(j).1).collect(),
        phi_v_slopes: (0..dense.vertex_count()).map(|k| emb.phi_v_coeffs(k).0).collect(),
        phi_v_constants: (0..dense.vertex_count()).map(|k| emb.phi_v_coeffs(k).1).collect(),
        rect_thresholds: emb.rectangles().thresholds.clone(),
        rect_initial: emb.rectangles().initial.clone(),
        surjectivity_exact,
        samples,
        steps,
        max_defect,
        frozen_violations,
    };
    print!("{}", io::to_pretty_json(&out));
    if let Some(dir) = &common.out {
        std::fs::create_dir_all(dir)?;
        io::write_json(&dir.join("embedding.json"), &out)?;
    }
    Ok(())
}

fn cmd_emit_grid(common: &CommonRun, stats_path: &Path) -> Result<()> {
    let stats = read_stats(stats_path)?;
    let dir = out_dir(common);
    let (csv_path, json_path) = emit_grid(&stats, &dir)?;
    eprintln!("wrote {}, {}", csv_path.display(), json_path.display());
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    match &cli.command {
        Command::Simulate {
            common,
            trace,
            trace_steps,
            component_rule,
            instance,
        } => cmd_simulate(
            common,
            trace.as_deref(),
            *trace_steps,
            (*component_rule).into(),
            instance,
        ),
        Command::Ensemble { common, spec } => cmd_ensemble(common, spec),
        Command::SymmetryCheck { common, spec } => cmd_symmetry(common, spec),
        Command::ModularityCheck {
            common,
            samples,
            steps,
            witness,
            module,
        } => cmd_modularity(common, *samples, *steps, witness, module),
        Command::EmitGrid { common, stats } => cmd_emit_grid(common, stats),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
