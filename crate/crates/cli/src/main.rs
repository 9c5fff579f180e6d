use std::collections::HashSet;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use ndarray::{Array2, Axis};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use kappa_core::cluster::{fit_rfk, RfkConfig};
use kappa_core::curvature::{
    delta_hyperbolicity, delta_hyperbolicity_sampled, greedy_signature_search, holdout_split, relative_delta,
    sectional_curvature_nodes, DistortionPipeline, GreedyConfig,
};
use kappa_core::embed::{avg_distortion, fit_coordinates, mean_average_precision, EmbedConfig};
use kappa_core::io;
use kappa_core::kappa_models::{
    get_a_hat, to_stereographic, Activation, KappaGcn, KappaGcnConfig, KernelPerceptron, Mode, Targets, TrainConfig,
};
use kappa_core::optim::RsgdConfig;
use kappa_core::sampling::{gaussian_mixture, MixtureConfig, Task};
use kappa_core::trees::{accuracy, mse, ForestConfig, ProductDT, ProductRF, TreeConfig};
use kappa_core::{Error, Result, Signature};

#[derive(Parser)]
#[command(name = "kappa", version, about = "Embedding, curvature estimation and learning on product manifolds")]
struct Cli {
    /// Seed for every random draw.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Worker threads (defaults to KAPPA_THREADS, then the number of CPUs).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Fit coordinates to a distance matrix or graph.
    Embed(EmbedArgs),
    /// δ-hyperbolicity, sectional curvature or greedy signature search.
    Curvature(CurvatureArgs),
    /// Train a predictor on embeddings.
    Fit(FitArgs),
    /// Riemannian fuzzy K-means.
    Cluster(ClusterArgs),
    /// Sample a labeled Gaussian mixture.
    Genmix(GenmixArgs),
    /// Run a benchmark grid from a TOML spec.
    Benchmark(BenchmarkArgs),
}

#[derive(Args)]
struct EmbedArgs {
    /// Edge list, or a distance matrix when the name ends in `.csv`.
    #[arg(long)]
    distances: PathBuf,
    #[arg(long)]
    signature: Signature,
    #[arg(long, default_value_t = 1000)]
    epochs: usize,
    /// Burn-in epochs (default: 10% of epochs).
    #[arg(long)]
    burn_in: Option<usize>,
    #[arg(long, default_value_t = 0.01)]
    lr: f64,
    /// Burn-in learning rate (default: lr / 10).
    #[arg(long)]
    burn_in_lr: Option<f64>,
    #[arg(long)]
    learn_curvature: bool,
    #[arg(long, default_value_t = 0.01)]
    curvature_lr: f64,
    /// Indices held out from influencing the training points, one per line.
    #[arg(long)]
    test_indices: Option<PathBuf>,
    /// Cap on each point's geodesic step length.
    #[arg(long)]
    max_step: Option<f64>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
#[group(id = "what", required = true, multiple = false)]
struct CurvatureWhat {
    #[arg(long, group = "what")]
    delta: bool,
    #[arg(long, group = "what")]
    sectional: bool,
    #[arg(long, group = "what")]
    greedy: bool,
}

#[derive(Args)]
struct CurvatureArgs {
    #[arg(long)]
    distances: PathBuf,
    #[command(flatten)]
    what: CurvatureWhat,
    /// Sample this many triples instead of the exact computation.
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long, default_value_t = 0)]
    base: usize,
    /// Candidate components for the greedy search.
    #[arg(long, default_value = "H2@-1,E2,S2@1")]
    candidates: Signature,
    #[arg(long, default_value_t = 3)]
    max_components: usize,
    /// Embedding epochs per greedy evaluation.
    #[arg(long, default_value_t = 300)]
    epochs: usize,
    #[arg(long, default_value_t = 0.01)]
    lr: f64,
    /// Cap on each point's geodesic step length during embedding.
    #[arg(long)]
    max_step: Option<f64>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Model {
    Kgcn,
    Kmlp,
    Kmlr,
    Perceptron,
    Dt,
    Rf,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Cls,
    Reg,
    Link,
}

#[derive(Args)]
struct FitArgs {
    #[arg(long, value_enum)]
    model: Model,
    #[arg(long)]
    embeddings: PathBuf,
    #[arg(long)]
    labels: Option<PathBuf>,
    /// Square CSV adjacency matrix (required by kgcn and link mode).
    #[arg(long)]
    adjacency: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "cls")]
    mode: ModeArg,
    /// Hidden layers for kgcn and kmlp.
    #[arg(long, default_value_t = 2)]
    layers: usize,
    #[arg(long, default_value_t = 200)]
    epochs: usize,
    #[arg(long, default_value_t = 0.025)]
    lr: f64,
    #[arg(long, default_value_t = 3)]
    max_depth: usize,
}

#[derive(Args)]
struct ClusterArgs {
    #[arg(long)]
    embeddings: PathBuf,
    /// Must agree with the embedding file header when given.
    #[arg(long)]
    signature: Option<Signature>,
    #[arg(long)]
    clusters: usize,
    #[arg(long, default_value_t = 2.0)]
    fuzziness: f64,
    #[arg(long, default_value_t = 2000)]
    max_iters: usize,
    /// Membership matrix output (CSV).
    #[arg(long)]
    out: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
enum TaskArg {
    Cls,
    Reg,
}

#[derive(Args)]
struct GenmixArgs {
    #[arg(long)]
    signature: Signature,
    #[arg(long, default_value_t = 1000)]
    samples: usize,
    #[arg(long, default_value_t = 2)]
    clusters: usize,
    /// Number of classes (default: number of clusters).
    #[arg(long)]
    classes: Option<usize>,
    #[arg(long, value_enum, default_value = "cls")]
    task: TaskArg,
    #[arg(long, default_value_t = 1.0)]
    variance: f64,
    #[arg(long, default_value = "mixture.csv")]
    out: PathBuf,
    #[arg(long, default_value = "mixture_labels.txt")]
    labels_out: PathBuf,
}

#[derive(Args)]
struct BenchmarkArgs {
    #[arg(long)]
    spec: PathBuf,
    /// Report path (default: standard output).
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let threads = cli.threads.or_else(|| std::env::var("KAPPA_THREADS").ok().and_then(|v| v.parse().ok()));
    if let Some(n) = threads {
        // Fails only if a pool already exists, which cannot happen this early.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    let result = match cli.command {
        Command::Embed(a) => embed(a, cli.seed),
        Command::Curvature(a) => curvature(a, cli.seed),
        Command::Fit(a) => fit(a, cli.seed),
        Command::Cluster(a) => cluster(a, cli.seed),
        Command::Genmix(a) => genmix(a, cli.seed),
        Command::Benchmark(a) => benchmark(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let msg = e.to_string().replace('\n', " ");
            eprintln!("error: {}: {msg}", e.kind());
            ExitCode::FAILURE
        }
    }
}

fn embed(a: EmbedArgs, seed: u64) -> Result<()> {
    let (d, graph) = io::load_distances_any(&a.distances)?;
    let mut schedule = RsgdConfig::with_defaults(a.lr, a.epochs);
    if let Some(b) = a.burn_in {
        schedule.burn_in_epochs = b;
    }
    if let Some(lr) = a.burn_in_lr {
        schedule.burn_in_lr = lr;
    }
    let cfg = EmbedConfig {
        schedule,
        curvature_lr: if a.learn_curvature { a.curvature_lr } else { 0.0 },
        test_indices: a.test_indices.as_deref().map(io::load_indices).transpose()?,
        max_step: a.max_step,
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let res = fit_coordinates(&d, &a.signature, &cfg, &mut rng)?;
    io::save_embeddings(&a.out, &res.signature, res.x.view())?;
    println!("signature={}", res.signature);
    println!("final_loss={}", res.loss_history.last().copied().unwrap_or(f64::NAN));
    println!("d_avg={}", avg_distortion(&res.signature, res.x.view(), &d)?);
    if let Some(g) = graph {
        if g.is_unit_weight() {
            println!("map={}", mean_average_precision(&res.signature, res.x.view(), &g)?);
        }
    }
    Ok(())
}

fn curvature(a: CurvatureArgs, seed: u64) -> Result<()> {
    let (d, graph) = io::load_distances_any(&a.distances)?;
    if a.what.delta {
        let delta = match a.samples {
            Some(n) => delta_hyperbolicity_sampled(&d, a.base, n, &mut ChaCha8Rng::seed_from_u64(seed))?,
            None => delta_hyperbolicity(&d, a.base)?,
        };
        println!("delta={delta}");
        println!("relative_delta={}", relative_delta(&d, delta)?);
    } else if a.what.sectional {
        let g = graph.ok_or_else(|| Error::InvalidInput("sectional curvature needs an edge list".into()))?;
        let mut out = String::from("node,curvature\n");
        for (m, v) in sectional_curvature_nodes(&d, &g)?.into_iter().enumerate() {
            match v {
                Some(v) => out.push_str(&format!("{m},{v}\n")),
                None => out.push_str(&format!("{m},\n")),
            }
        }
        emit(&out);
    } else {
        let cfg = GreedyConfig {
            candidates: a.candidates.components().to_vec(),
            max_components: a.max_components,
            seed,
        };
        let mut embed = EmbedConfig::new(a.lr, a.epochs);
        embed.max_step = a.max_step;
        let pipeline = DistortionPipeline { distances: &d, embed };
        let res = greedy_signature_search(&pipeline, &cfg)?;
        println!("signature={}", res.signature);
        for (i, l) in res.losses.iter().enumerate() {
            println!("step{}_loss={l}", i + 1);
        }
    }
    Ok(())
}

fn class_indices(y: &[f64]) -> (Vec<f64>, Vec<usize>) {
    let mut classes = y.to_vec();
    classes.sort_by(f64::total_cmp);
    classes.dedup();
    let idx = y.iter().map(|v| classes.binary_search_by(|c| c.total_cmp(v)).unwrap()).collect();
    (classes, idx)
}

fn pick<T: Copy>(v: &[T], idx: &[usize]) -> Vec<T> {
    idx.iter().map(|&i| v[i]).collect()
}

fn report(task: Task, train: (&[f64], &[f64]), test: (&[f64], &[f64])) {
    match task {
        Task::Classification => {
            println!("train_accuracy={}", accuracy(train.0, train.1));
            println!("test_accuracy={}", accuracy(test.0, test.1));
        }
        Task::Regression => {
            println!("train_mse={}", mse(train.0, train.1));
            println!("test_mse={}", mse(test.0, test.1));
        }
    }
}

fn fit(a: FitArgs, seed: u64) -> Result<()> {
    let (sig, x) = io::load_embeddings(&a.embeddings)?;
    let mode = match a.mode {
        ModeArg::Cls => Mode::Classify,
        ModeArg::Reg => Mode::Regress,
        ModeArg::Link => Mode::Link,
    };
    let task = if mode == Mode::Regress { Task::Regression } else { Task::Classification };
    let adjacency = a.adjacency.as_deref().map(io::load_matrix).transpose()?;
    if mode == Mode::Link {
        return fit_link(&a, &sig, &x, adjacency, seed);
    }
    let labels_path = a.labels.as_deref().ok_or_else(|| Error::InvalidInput("--labels is required for this mode".into()))?;
    let y = io::load_labels(labels_path)?;
    if y.len() != x.nrows() {
        return Err(Error::DimensionMismatch { expected: x.nrows(), found: y.len() });
    }
    let (train, test) = holdout_split(y.len());
    let (ytr, yte) = (pick(&y, &train), pick(&y, &test));
    let xtr = x.select(Axis(0), &train);
    let xte = x.select(Axis(0), &test);
    let (ptr, pte) = match a.model {
        Model::Dt => {
            let cfg = TreeConfig { max_depth: a.max_depth, ..TreeConfig::default() };
            let t = ProductDT::fit(&sig, xtr.view(), &ytr, task, &cfg)?;
            (t.predict(xtr.view())?, t.predict(xte.view())?)
        }
        Model::Rf => {
            let cfg = ForestConfig { seed, tree: TreeConfig { max_depth: a.max_depth, feature_fraction: 0.5, ..TreeConfig::default() }, ..ForestConfig::default() };
            let f = ProductRF::fit(&sig, xtr.view(), &ytr, task, &cfg)?;
            (f.predict(xtr.view())?, f.predict(xte.view())?)
        }
        Model::Perceptron => {
            let (classes, _) = class_indices(&y);
            if classes.len() != 2 || task != Task::Classification {
                return Err(Error::InvalidInput("the perceptron needs exactly two classes".into()));
            }
            let to_pm = |v: &[f64]| v.iter().map(|l| if *l == classes[0] { -1.0 } else { 1.0 }).collect::<Vec<_>>();
            let from_pm = |v: Vec<f64>| v.into_iter().map(|s| if s < 0.0 { classes[0] } else { classes[1] }).collect::<Vec<_>>();
            let p = KernelPerceptron::fit(&sig, xtr.view(), &to_pm(&ytr), 1.0, 1.0, a.epochs)?;
            println!("converged={}", p.state.converged);
            (from_pm(p.predict(xtr.view())?), from_pm(p.predict(xte.view())?))
        }
        Model::Kgcn | Model::Kmlp | Model::Kmlr => {
            let s = to_stereographic(&sig, x.view())?;
            let (classes, idx) = class_indices(&y);
            let hidden = if matches!(a.model, Model::Kmlr) { 0 } else { a.layers };
            let cfg = KappaGcnConfig {
                signature: sig.clone(),
                hidden_layers: hidden,
                n_outputs: if task == Task::Classification { classes.len() } else { 1 },
                use_bias: false,
                activation: Activation::Relu,
                mode,
            };
            let mut model = KappaGcn::new(cfg, &mut ChaCha8Rng::seed_from_u64(seed))?;
            let (a_train, a_full) = match a.model {
                Model::Kgcn => {
                    let adj = adjacency.ok_or_else(|| Error::InvalidInput("kgcn needs --adjacency".into()))?;
                    if adj.dim() != (x.nrows(), x.nrows()) {
                        return Err(Error::DimensionMismatch { expected: x.nrows(), found: adj.nrows() });
                    }
                    let sub = adj.select(Axis(0), &train).select(Axis(1), &train);
                    (get_a_hat(sub.view())?, get_a_hat(adj.view())?)
                }
                _ => (Array2::eye(train.len()), Array2::eye(x.nrows())),
            };
            let str_ = s.select(Axis(0), &train);
            let targets = match task {
                Task::Classification => Targets::Classes(pick(&idx, &train)),
                Task::Regression => Targets::Values(ytr.clone()),
            };
            let hist = model.train(str_.view(), a_train.view(), &targets, &TrainConfig::new(a.epochs, a.lr))?;
            println!("final_loss={}", hist.last().copied().unwrap_or(f64::NAN));
            let full: Vec<f64> = match task {
                Task::Classification => {
                    model.predict_classes(s.view(), a_full.view())?.into_iter().map(|c| classes[c]).collect()
                }
                Task::Regression => model.forward_regress(s.view(), a_full.view())?,
            };
            (pick(&full, &train), pick(&full, &test))
        }
    };
    report(task, (&ptr, &ytr), (&pte, &yte));
    Ok(())
}

fn fit_link(a: &FitArgs, sig: &Signature, x: &Array2<f64>, adjacency: Option<Array2<f64>>, seed: u64) -> Result<()> {
    if !matches!(a.model, Model::Kgcn | Model::Kmlp | Model::Kmlr) {
        return Err(Error::InvalidInput("link mode needs kgcn, kmlp or kmlr".into()));
    }
    let adj = adjacency.ok_or_else(|| Error::InvalidInput("link mode needs --adjacency".into()))?;
    let n = x.nrows();
    if adj.dim() != (n, n) {
        return Err(Error::DimensionMismatch { expected: n, found: adj.nrows() });
    }
    let mut edges = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if adj[[i, j]] > 0.0 || adj[[j, i]] > 0.0 {
                edges.push((i, j));
            }
        }
    }
    let graph = kappa_core::Graph::from_unweighted(n, &edges)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let split = io::link_prediction_split(&graph, 0.2, &mut rng)?;
    let train_graph = kappa_core::Graph::from_edges(n, &split.train_edges)?;
    let mut train_adj = Array2::zeros((n, n));
    for (u, v, _) in train_graph.edges() {
        train_adj[[u, v]] = 1.0;
    }
    let a_hat = if matches!(a.model, Model::Kgcn) { get_a_hat(train_adj.view())? } else { Array2::eye(n) };
    // Training negatives: as many non-edges as training edges, avoiding held-out pairs.
    let mut pairs: Vec<(usize, usize)> = train_graph.edges().iter().map(|e| (e.0, e.1)).collect();
    let mut labels = vec![1.0; pairs.len()];
    let mut excluded: HashSet<(usize, usize)> = split.test_neg.iter().copied().collect();
    let available = n * (n - 1) / 2 - graph.edge_count() - excluded.len();
    let want = pairs.len().min(available);
    let mut added = 0;
    while added < want {
        let (u, v) = (rng.random_range(0..n), rng.random_range(0..n));
        let (u, v) = (u.min(v), u.max(v));
        if u != v && !graph.has_edge(u, v) && excluded.insert((u, v)) {
            pairs.push((u, v));
            labels.push(0.0);
            added += 1;
        }
    }
    let cfg = KappaGcnConfig {
        signature: sig.clone(),
        hidden_layers: if matches!(a.model, Model::Kmlr) { 0 } else { a.layers },
        n_outputs: 1,
        use_bias: false,
        activation: Activation::Relu,
        mode: Mode::Link,
    };
    let s = to_stereographic(sig, x.view())?;
    let mut model = KappaGcn::new(cfg, &mut ChaCha8Rng::seed_from_u64(seed))?;
    let hist = model.train(s.view(), a_hat.view(), &Targets::Links { pairs, labels }, &TrainConfig::new(a.epochs, a.lr))?;
    println!("final_loss={}", hist.last().copied().unwrap_or(f64::NAN));
    let test_pairs: Vec<(usize, usize)> = split.test_pos.iter().chain(&split.test_neg).copied().collect();
    let truth: Vec<f64> = split.test_pos.iter().map(|_| 1.0).chain(split.test_neg.iter().map(|_| 0.0)).collect();
    let probs = model.link_probs(s.view(), a_hat.view(), &test_pairs)?;
    let pred: Vec<f64> = probs.iter().map(|p| if *p >= 0.5 { 1.0 } else { 0.0 }).collect();
    println!("test_pairs={}", test_pairs.len());
    println!("test_accuracy={}", accuracy(&pred, &truth));
    Ok(())
}

fn cluster(a: ClusterArgs, seed: u64) -> Result<()> {
    let (sig, x) = io::load_embeddings(&a.embeddings)?;
    if let Some(s) = &a.signature {
        if *s != sig {
            return Err(Error::InvalidInput(format!("--signature {s} does not match the file's signature {sig}")));
        }
    }
    let cfg = RfkConfig { max_iters: a.max_iters, seed, ..RfkConfig::new(a.clusters, a.fuzziness) };
    let res = fit_rfk(&sig, x.view(), &cfg)?;
    io::save_matrix(&a.out, res.memberships.view())?;
    println!("objective={}", res.objective_history.last().copied().unwrap_or(f64::NAN));
    println!("iterations={}", res.iterations);
    let labels = res.hard_labels();
    let mut sizes = vec![0usize; a.clusters];
    for l in labels {
        sizes[l] += 1;
    }
    println!("cluster_sizes={}", sizes.iter().map(ToString::to_string).collect::<Vec<_>>().join(","));
    Ok(())
}

fn genmix(a: GenmixArgs, seed: u64) -> Result<()> {
    let cfg = MixtureConfig {
        n_samples: a.samples,
        n_clusters: a.clusters,
        n_classes: a.classes.unwrap_or(a.clusters),
        variance_scale: a.variance,
        task: match a.task {
            TaskArg::Cls => Task::Classification,
            TaskArg::Reg => Task::Regression,
        },
    };
    let data = gaussian_mixture(&a.signature, &cfg, &mut ChaCha8Rng::seed_from_u64(seed))?;
    io::save_embeddings(&a.out, &a.signature, data.x.view())?;
    io::save_labels(&a.labels_out, &data.y)?;
    println!("rows={}", data.x.nrows());
    println!("embeddings={}", a.out.display());
    println!("labels={}", a.labels_out.display());
    Ok(())
}

fn benchmark(a: BenchmarkArgs) -> Result<()> {
    let spec = io::BenchmarkSpec::load(&a.spec)?;
    let report = io::format_report(&io::run_benchmark(&spec));
    match &a.out {
        Some(p) => write_text(p, &report),
        None => {
            emit(&report);
            Ok(())
        }
    }
}

/// Writes to stdout, treating a closed pipe (e.g. `| head`) as success.
fn emit(text: &str) {
    let mut out = std::io::stdout().lock();
    if let Err(e) = out.write_all(text.as_bytes()).and_then(|_| out.flush()) {
        if e.kind() != std::io::ErrorKind::BrokenPipe {
            eprintln!("error: io: {e}");
            std::process::exit(1);
        }
    }
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|source| Error::Io { path: path.to_path_buf(), source })
}
