use std::fmt::Write as _;
use std::fs::{self, File};
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use signtypes::experiment::{cross_dataset, dataset_stats, run_holdout_experiment};
use signtypes::graph::{mask_edges, EdgeId};
use signtypes::model::{fit, sign_for, Solver};
use signtypes::synth::{generate, SynthConfig};
use signtypes::{
    ExperimentConfig, ExperimentReport, FeatureExtractor, FeatureRecipe, FitOptions, Holdout, Sign,
    SignedDigraph, TrainedModel,
};

mod registry;

use registry::{read_graph, Registry};

#[derive(Parser)]
#[command(name = "signtypes", version, about = "Edge sign prediction in signed directed networks")]
struct Cli {
    /// Key-value config file (cache_dir, dataset.<name>.{url,path,edges}).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Dataset cache directory; overrides the config and SIGNTYPES_CACHE.
    #[arg(long, global = true)]
    cache_dir: Option<PathBuf>,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Download and normalise registered datasets into the cache.
    Fetch {
        #[arg(required = true)]
        names: Vec<String>,
    },
    /// Dataset statistics: sizes, sign balance, embeddedness, node types.
    Stats {
        #[command(flatten)]
        source: Source,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Mask a fraction of edge signs; writes the holdout file.
    Holdout {
        #[command(flatten)]
        source: Source,
        #[arg(long, default_value_t = 0.1)]
        fraction: f64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Holdout file (stdout when absent).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also write the masked graph here.
        #[arg(long)]
        masked: Option<PathBuf>,
    },
    /// Feature rows as CSV.
    Features {
        #[command(flatten)]
        source: Source,
        #[arg(long)]
        recipe: FeatureRecipe,
        #[arg(long, value_enum, default_value_t = EdgeSet::All)]
        edges: EdgeSet,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Fit a model on the observed edges of a graph.
    Train {
        #[command(flatten)]
        source: Source,
        #[arg(long)]
        recipe: FeatureRecipe,
        #[command(flatten)]
        fit: FitArgs,
        /// Model JSON (stdout when absent).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Score edges of a graph with a trained model.
    Predict {
        #[command(flatten)]
        source: Source,
        #[arg(long)]
        model: PathBuf,
        /// Hide these edges before scoring and report accuracy on them.
        #[arg(long)]
        holdout: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = EdgeSet::Hidden)]
        edges: EdgeSet,
        #[arg(long, default_value_t = 0.5)]
        threshold: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Repeated holdout evaluation of one or more recipes.
    Evaluate {
        #[command(flatten)]
        source: Source,
        /// Repeatable; families joined by '+', e.g. bntk+bnp+triad.
        #[arg(long = "recipe", default_value = "bntk+bnp+triad")]
        recipes: Vec<FeatureRecipe>,
        #[command(flatten)]
        exp: ExperimentArgs,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Train on one dataset, test on others.
    Crosseval {
        /// Dataset name or edge-list path; repeatable.
        #[arg(long = "train", required = true)]
        train: Vec<String>,
        /// Dataset name or edge-list path; repeatable.
        #[arg(long = "test", required = true)]
        test: Vec<String>,
        #[arg(long, default_value = "bntk+bnp+triad")]
        recipe: FeatureRecipe,
        #[command(flatten)]
        exp: ExperimentArgs,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write a seeded synthetic signed digraph.
    Generate {
        #[arg(long, default_value_t = 2000)]
        nodes: usize,
        #[arg(long, default_value_t = 20000)]
        edges: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct Source {
    /// Registered dataset name.
    #[arg(long, conflicts_with = "input")]
    dataset: Option<String>,
    /// Edge-list file.
    #[arg(long)]
    input: Option<PathBuf>,
}

#[derive(Args)]
struct FitArgs {
    #[arg(long, default_value_t = 1e-4)]
    l2: f64,
    /// Gradient max-norm stopping tolerance.
    #[arg(long, default_value_t = 1e-6)]
    tolerance: f64,
    #[arg(long, default_value_t = 5000)]
    max_iter: usize,
    #[arg(long, value_enum, default_value_t = SolverArg::Lbfgs)]
    solver: SolverArg,
    /// Start from seeded noise instead of zero.
    #[arg(long)]
    init_seed: Option<u64>,
}

#[derive(Args)]
struct ExperimentArgs {
    #[arg(long, default_value_t = 0.1)]
    fraction: f64,
    /// Uses seeds 1..=N unless --seeds is given.
    #[arg(long, default_value_t = 5)]
    repeats: u64,
    #[arg(long, value_delimiter = ',')]
    seeds: Option<Vec<u64>>,
    #[command(flatten)]
    fit: FitArgs,
    /// Choose L2 per fit from this comma-separated grid.
    #[arg(long, value_delimiter = ',')]
    l2_grid: Vec<f64>,
    #[arg(long, default_value_t = 0.5)]
    threshold: f64,
    /// Write the accuracy-vs-embeddedness curve CSV here.
    #[arg(long)]
    curve: Option<PathBuf>,
    /// Highest minimum-embeddedness level on the curve.
    #[arg(long, default_value_t = 25)]
    curve_max: usize,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum EdgeSet {
    All,
    Observed,
    Hidden,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum SolverArg {
    Lbfgs,
    Gd,
}

impl FitArgs {
    fn options(&self) -> FitOptions {
        FitOptions {
            l2: self.l2,
            tolerance: self.tolerance,
            max_iterations: self.max_iter,
            seed: self.init_seed,
            solver: match self.solver {
                SolverArg::Lbfgs => Solver::Lbfgs,
                SolverArg::Gd => Solver::GradientDescent,
            },
        }
    }
}

impl ExperimentArgs {
    fn config(&self) -> ExperimentConfig {
        ExperimentConfig {
            fraction: self.fraction,
            seeds: self.seeds.clone().unwrap_or_else(|| (1..=self.repeats).collect()),
            fit: self.fit.options(),
            curve_levels: if self.curve.is_some() {
                (0..=self.curve_max).collect()
            } else {
                Vec::new()
            },
            l2_grid: self.l2_grid.clone(),
            threshold: self.threshold,
        }
    }
}

fn file_stem(p: &Path) -> String {
    p.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| p.display().to_string())
}

impl Source {
    fn load(&self, reg: &Registry) -> Result<(String, SignedDigraph)> {
        match (&self.dataset, &self.input) {
            (Some(name), None) => Ok((name.to_ascii_lowercase(), reg.load_graph(name)?)),
            (None, Some(path)) => Ok((file_stem(path), read_graph(path)?)),
            _ => bail!("give exactly one of --dataset or --input"),
        }
    }
}

/// A registered dataset name, else a path.
fn load_named(reg: &Registry, spec: &str) -> Result<(String, SignedDigraph)> {
    if reg.datasets.contains_key(&spec.to_ascii_lowercase()) {
        Ok((spec.to_ascii_lowercase(), reg.load_graph(spec)?))
    } else {
        let p = Path::new(spec);
        if !p.exists() {
            bail!("{spec:?} is neither a registered dataset nor an existing file");
        }
        Ok((file_stem(p), read_graph(p)?))
    }
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            let stdout = io::stdout();
            let mut lock = stdout.lock();
            lock.write_all(text.as_bytes())?;
            lock.flush()?;
            Ok(())
        }
    }
}

fn writer(out: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match out {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).with_context(|| format!("creating {}", p.display()))?,
        )),
        None => Box::new(BufWriter::new(io::stdout())),
    })
}

fn select_edges(g: &SignedDigraph, set: EdgeSet) -> Vec<EdgeId> {
    match set {
        EdgeSet::All => (0..g.edge_count()).collect(),
        EdgeSet::Observed => g.observed_edges(),
        EdgeSet::Hidden => g.hidden_edges(),
    }
}

fn reports_csv(reports: &[ExperimentReport]) -> String {
    let mut s =
        String::from("dataset,train_dataset,recipe,repeats,mean_accuracy,std_accuracy,mean_all_positive_accuracy\n");
    for r in reports {
        let _ = writeln!(
            s,
            "{},{},{},{},{},{},{}",
            r.dataset,
            r.train_dataset.as_deref().unwrap_or(""),
            r.recipe,
            r.repeats,
            r.mean_accuracy,
            r.std_accuracy,
            r.mean_all_positive_accuracy
        );
    }
    s
}

fn curves_csv(reports: &[ExperimentReport]) -> String {
    let mut s = String::from("dataset,train_dataset,recipe,min_embeddedness,n_test,accuracy,low_support\n");
    for r in reports {
        for p in r.curve.iter().flatten() {
            let acc = p.accuracy.map(|a| a.to_string()).unwrap_or_default();
            let _ = writeln!(
                s,
                "{},{},{},{},{},{},{}",
                r.dataset,
                r.train_dataset.as_deref().unwrap_or(""),
                r.recipe,
                p.min_embeddedness,
                p.n_test,
                acc,
                p.low_support
            );
        }
    }
    s
}

fn render_reports(reports: &[ExperimentReport], format: Format) -> Result<String> {
    Ok(match format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(reports)?;
            s.push('\n');
            s
        }
        Format::Csv => reports_csv(reports),
        Format::Text => {
            let mut s = String::new();
            for (i, r) in reports.iter().enumerate() {
                if i > 0 {
                    s.push('\n');
                }
                s.push_str(&r.to_text());
            }
            s
        }
    })
}

fn cross_matrix_text(reports: &[ExperimentReport]) -> String {
    let mut trains: Vec<&str> = Vec::new();
    let mut tests: Vec<&str> = Vec::new();
    for r in reports {
        let t = r.train_dataset.as_deref().unwrap_or("");
        if !trains.contains(&t) {
            trains.push(t);
        }
        if !tests.contains(&r.dataset.as_str()) {
            tests.push(&r.dataset);
        }
    }
    let mut s = String::from("accuracy (%), rows = training set, columns = test set\n");
    let _ = write!(s, "{:<16}", "");
    for t in &tests {
        let _ = write!(s, "{t:>14}");
    }
    s.push('\n');
    for tr in &trains {
        let _ = write!(s, "{tr:<16}");
        for te in &tests {
            match reports
                .iter()
                .find(|r| r.train_dataset.as_deref() == Some(tr) && r.dataset == *te)
            {
                Some(r) => {
                    let _ = write!(s, "{:>14.2}", 100.0 * r.mean_accuracy);
                }
                None => {
                    let _ = write!(s, "{:>14}", "-");
                }
            }
        }
        s.push('\n');
    }
    s
}

fn run(cli: Cli) -> Result<()> {
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .context("configuring thread pool")?;
    }
    let reg = Registry::load(cli.config.as_deref(), cli.cache_dir.as_deref())?;

    match cli.command {
        Command::Fetch { names } => {
            for name in names {
                let path = reg.ensure(&name)?;
                println!("{}\t{}", reg.entry(&name)?.name, path.display());
            }
        }
        Command::Stats { source, format, out } => {
            let (_, g) = source.load(&reg)?;
            let stats = dataset_stats(&g);
            let text = match format {
                Format::Text => stats.to_text(),
                Format::Csv => stats.type_fraction_csv(),
                Format::Json => serde_json::to_string_pretty(&stats)? + "\n",
            };
            emit(out.as_deref(), &text)?;
        }
        Command::Holdout {
            source,
            fraction,
            seed,
            out,
            masked,
        } => {
            let (_, g) = source.load(&reg)?;
            let (m, holdout) = mask_edges(&g, fraction, seed)?;
            let mut w = writer(out.as_deref())?;
            holdout.write(&g, &mut w)?;
            w.flush()?;
            if let Some(p) = masked {
                let mut w = writer(Some(&p))?;
                m.write_edge_list(&mut w)?;
                w.flush()?;
            }
        }
        Command::Features {
            source,
            recipe,
            edges,
            out,
        } => {
            let (_, g) = source.load(&reg)?;
            let fx = FeatureExtractor::new(&g)?;
            let ids = select_edges(&g, edges);
            let design = fx.design(&recipe, &ids);
            let mut w = writer(out.as_deref())?;
            writeln!(w, "source,target,sign,{}", recipe.manifest().join(","))?;
            let mut line = String::new();
            for (i, &e) in ids.iter().enumerate() {
                let edge = g.edge(e);
                line.clear();
                let _ = write!(line, "{},{},{}", g.label(edge.source), g.label(edge.target), edge.sign);
                for v in design.dense_row(i) {
                    let _ = write!(line, ",{v}");
                }
                writeln!(w, "{line}")?;
            }
            w.flush()?;
        }
        Command::Train {
            source,
            recipe,
            fit: fit_args,
            out,
        } => {
            let (_, g) = source.load(&reg)?;
            let fx = FeatureExtractor::new(&g)?;
            let train = g.observed_edges();
            let x = fx.design(&recipe, &train);
            let y: Vec<f64> = train
                .iter()
                .map(|&e| if g.sign(e) == Sign::Positive { 1.0 } else { 0.0 })
                .collect();
            let model = fit(&x, &y, &fit_args.options(), recipe.manifest())?;
            if !model.metadata.converged {
                eprintln!(
                    "warning: stopped after {} iterations with gradient max-norm {:.3e}",
                    model.metadata.iterations, model.metadata.gradient_max_norm
                );
            }
            emit(out.as_deref(), &(model.to_json()? + "\n"))?;
        }
        Command::Predict {
            source,
            model,
            holdout,
            edges,
            threshold,
            out,
        } => {
            let (_, g) = source.load(&reg)?;
            let text = fs::read_to_string(&model).with_context(|| format!("reading {}", model.display()))?;
            let model = TrainedModel::from_json(&text)?;
            let recipe = FeatureRecipe::from_manifest(&model.manifest)?;
            let holdout = match holdout {
                Some(p) => {
                    let f = File::open(&p).with_context(|| format!("opening {}", p.display()))?;
                    Some(Holdout::read(BufReader::new(f), &g)?)
                }
                None => None,
            };
            let g = match &holdout {
                Some(h) => g.hide(h),
                None => g,
            };
            let fx = FeatureExtractor::new(&g)?;
            let ids = select_edges(&g, edges);
            let proba = model.predict_design(&fx.design(&recipe, &ids))?;
            let mut w = writer(out.as_deref())?;
            writeln!(w, "source,target,probability,prediction")?;
            for (&e, &p) in ids.iter().zip(&proba) {
                let edge = g.edge(e);
                writeln!(
                    w,
                    "{},{},{},{}",
                    g.label(edge.source),
                    g.label(edge.target),
                    p,
                    sign_for(p, threshold)
                )?;
            }
            w.flush()?;
            if let Some(h) = holdout {
                let scored: std::collections::HashMap<EdgeId, f64> = ids.iter().copied().zip(proba).collect();
                let (mut n, mut ok) = (0usize, 0usize);
                for he in &h.edges {
                    if let Some(&p) = scored.get(&he.edge) {
                        n += 1;
                        ok += (sign_for(p, threshold) == he.sign) as usize;
                    }
                }
                eprintln!("accuracy {:.4} on {n} held-out edges", ok as f64 / n.max(1) as f64);
            }
        }
        Command::Evaluate {
            source,
            recipes,
            exp,
            format,
            out,
        } => {
            let (name, g) = source.load(&reg)?;
            let reports = run_holdout_experiment(&g, &name, &recipes, &exp.config())?;
            emit(out.as_deref(), &render_reports(&reports, format)?)?;
            if let Some(p) = &exp.curve {
                emit(Some(p), &curves_csv(&reports))?;
            }
        }
        Command::Crosseval {
            train,
            test,
            recipe,
            exp,
            format,
            out,
        } => {
            let tests: Vec<(String, SignedDigraph)> =
                test.iter().map(|t| load_named(&reg, t)).collect::<Result<_>>()?;
            let test_refs: Vec<(&str, &SignedDigraph)> = tests.iter().map(|(n, g)| (n.as_str(), g)).collect();
            let config = exp.config();
            let mut reports = Vec::new();
            for t in &train {
                let (name, g) = load_named(&reg, t)?;
                reports.extend(cross_dataset((&name, &g), &test_refs, &recipe, &config)?);
            }
            let mut text = render_reports(&reports, format)?;
            if format == Format::Text {
                text.push('\n');
                text.push_str(&cross_matrix_text(&reports));
            }
            emit(out.as_deref(), &text)?;
            if let Some(p) = &exp.curve {
                emit(Some(p), &curves_csv(&reports))?;
            }
        }
        Command::Generate { nodes, edges, seed, out } => {
            let g = generate(&SynthConfig {
                nodes,
                edges,
                seed,
                ..Default::default()
            });
            let mut w = writer(out.as_deref())?;
            g.write_edge_list(&mut w)?;
            w.flush()?;
        }
    }
    Ok(())
}

fn main() {
    let cli = Cli::parse();
    if let Err(e) = run(cli) {
        eprintln!("error: {e:#}");
        std::process::exit(1);
    }
}
