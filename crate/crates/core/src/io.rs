//! File formats, link-prediction splits and the benchmark harness.
//!
//! Floats are written with Rust's shortest round-trip formatting, so
//! `load ∘ save` is exact.

use std::collections::HashSet;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use ndarray::{Array2, ArrayView2, Axis};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Deserialize;

use crate::curvature::holdout_split;
use crate::embed::{avg_distortion, fit_coordinates, EmbedConfig};
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::manifolds::{DistanceMatrix, Signature};
use crate::rng::derive_seed;
use crate::sampling::Task;
use crate::trees::{ForestConfig, ProductDT, ProductRF, TreeConfig};

const SIGNATURE_HEADER: &str = "# signature:";

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|source| Error::Io { path: path.to_path_buf(), source })
}

fn write(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|source| Error::Io { path: path.to_path_buf(), source })
}

/// Parsed edge list: node count is one past the largest id.
#[derive(Debug, Clone, PartialEq)]
pub struct EdgeList {
    pub n_nodes: usize,
    pub edges: Vec<(usize, usize, f64)>,
}

impl EdgeList {
    pub fn to_graph(&self) -> Result<Graph> {
        Graph::from_edges(self.n_nodes, &self.edges)
    }
}

/// `src<TAB>dst[<TAB>weight]` per line; `#` starts a comment.
pub fn parse_edge_list(text: &str) -> Result<EdgeList> {
    let mut edges = Vec::new();
    let mut n = 0;
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').map(str::trim).collect();
        if fields.len() < 2 || fields.len() > 3 {
            return Err(Error::Parse { line: line_no, message: format!("expected 2 or 3 tab-separated fields, found {}", fields.len()) });
        }
        let node = |s: &str| {
            s.parse::<usize>().map_err(|_| Error::Parse { line: line_no, message: format!("invalid node id `{s}`") })
        };
        let (u, v) = (node(fields[0])?, node(fields[1])?);
        let w = match fields.get(2) {
            Some(s) => {
                let w: f64 = s.parse().map_err(|_| Error::Parse { line: line_no, message: format!("invalid weight `{s}`") })?;
                if !(w > 0.0) || !w.is_finite() {
                    return Err(Error::Parse { line: line_no, message: format!("weight must be positive, got {w}") });
                }
                w
            }
            None => 1.0,
        };
        if u == v {
            return Err(Error::Parse { line: line_no, message: format!("self-loop on node {u}") });
        }
        n = n.max(u + 1).max(v + 1);
        edges.push((u, v, w));
    }
    Ok(EdgeList { n_nodes: n, edges })
}

pub fn load_edge_list(path: &Path) -> Result<EdgeList> {
    parse_edge_list(&read(path)?)
}

pub fn format_edge_list(edges: &[(usize, usize, f64)]) -> String {
    let mut out = String::new();
    for &(u, v, w) in edges {
        if w == 1.0 {
            let _ = writeln!(out, "{u}\t{v}");
        } else {
            let _ = writeln!(out, "{u}\t{v}\t{w}");
        }
    }
    out
}

pub fn save_edge_list(path: &Path, edges: &[(usize, usize, f64)]) -> Result<()> {
    write(path, &format_edge_list(edges))
}

fn parse_rows(text: &str, line_offset: usize) -> Result<Vec<Vec<f64>>> {
    let mut reader = csv::ReaderBuilder::new().has_headers(false).comment(Some(b'#')).trim(csv::Trim::All).from_reader(text.as_bytes());
    let mut rows = Vec::new();
    for rec in reader.records() {
        let rec = rec.map_err(|e| Error::Parse {
            line: e.position().map_or(0, |p| p.line() as usize) + line_offset,
            message: e.to_string(),
        })?;
        let line = rec.position().map_or(0, |p| p.line() as usize) + line_offset;
        let row = rec
            .iter()
            .map(|f| f.parse::<f64>().map_err(|_| Error::Parse { line, message: format!("invalid number `{f}`") }))
            .collect::<Result<Vec<_>>>()?;
        rows.push(row);
    }
    Ok(rows)
}

fn rows_to_array(rows: Vec<Vec<f64>>) -> Result<Array2<f64>> {
    let ncols = rows.first().map_or(0, Vec::len);
    for (i, r) in rows.iter().enumerate() {
        if r.len() != ncols {
            return Err(Error::Parse { line: i + 1, message: format!("expected {ncols} columns, found {}", r.len()) });
        }
    }
    let n = rows.len();
    Array2::from_shape_vec((n, ncols), rows.into_iter().flatten().collect()).map_err(|e| Error::invalid(e.to_string()))
}

/// Headerless CSV of reals.
pub fn parse_matrix(text: &str) -> Result<Array2<f64>> {
    rows_to_array(parse_rows(text, 0)?)
}

pub fn load_matrix(path: &Path) -> Result<Array2<f64>> {
    parse_matrix(&read(path)?)
}

pub fn format_matrix(m: ArrayView2<'_, f64>) -> String {
    let mut out = String::new();
    for row in m.rows() {
        let cells: Vec<String> = row.iter().map(|v| format!("{v:?}")).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

pub fn save_matrix(path: &Path, m: ArrayView2<'_, f64>) -> Result<()> {
    write(path, &format_matrix(m))
}

pub fn load_distance_matrix(path: &Path) -> Result<DistanceMatrix> {
    DistanceMatrix::new(load_matrix(path)?)
}

/// Distances from either a CSV matrix (`.csv`) or an edge list (anything else).
pub fn load_distances_any(path: &Path) -> Result<(DistanceMatrix, Option<Graph>)> {
    if path.extension().is_some_and(|e| e == "csv") {
        Ok((load_distance_matrix(path)?, None))
    } else {
        let g = load_edge_list(path)?.to_graph()?;
        Ok((g.distance_matrix()?, Some(g)))
    }
}

pub fn format_embeddings(sig: &Signature, x: ArrayView2<'_, f64>) -> String {
    format!("{SIGNATURE_HEADER} {}\n{}", sig.to_pairs_string(), format_matrix(x))
}

pub fn parse_embeddings(text: &str) -> Result<(Signature, Array2<f64>)> {
    let (first, rest) = text.split_once('\n').unwrap_or((text, ""));
    let spec = first
        .trim()
        .strip_prefix(SIGNATURE_HEADER)
        .ok_or_else(|| Error::Parse { line: 1, message: format!("expected `{SIGNATURE_HEADER} [(kappa,dim),...]` header") })?;
    let sig = Signature::parse_pairs(spec.trim()).map_err(|e| Error::Parse { line: 1, message: e.to_string() })?;
    let x = rows_to_array(parse_rows(rest, 1)?)?;
    if x.nrows() > 0 && x.ncols() != sig.ambient_dim() {
        return Err(Error::Parse {
            line: 2,
            message: format!("row width {} does not match signature {sig} (ambient dimension {})", x.ncols(), sig.ambient_dim()),
        });
    }
    for (i, row) in x.rows().into_iter().enumerate() {
        sig.check_point(&row.to_vec()).map_err(|e| Error::Parse { line: i + 2, message: e.to_string() })?;
    }
    Ok((sig, x))
}

pub fn load_embeddings(path: &Path) -> Result<(Signature, Array2<f64>)> {
    parse_embeddings(&read(path)?)
}

pub fn save_embeddings(path: &Path, sig: &Signature, x: ArrayView2<'_, f64>) -> Result<()> {
    write(path, &format_embeddings(sig, x))
}

/// One real per line.
pub fn parse_labels(text: &str) -> Result<Vec<f64>> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        out.push(line.parse::<f64>().map_err(|_| Error::Parse { line: i + 1, message: format!("invalid label `{line}`") })?);
    }
    Ok(out)
}

pub fn load_labels(path: &Path) -> Result<Vec<f64>> {
    parse_labels(&read(path)?)
}

pub fn format_labels(y: &[f64]) -> String {
    y.iter().map(|v| format!("{v:?}\n")).collect()
}

pub fn save_labels(path: &Path, y: &[f64]) -> Result<()> {
    write(path, &format_labels(y))
}

/// One index per line.
pub fn load_indices(path: &Path) -> Result<Vec<usize>> {
    parse_labels(&read(path)?)?
        .into_iter()
        .enumerate()
        .map(|(i, v)| {
            if v >= 0.0 && v.fract() == 0.0 {
                Ok(v as usize)
            } else {
                Err(Error::Parse { line: i + 1, message: format!("invalid index {v}") })
            }
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct LinkSplit {
    pub train_edges: Vec<(usize, usize, f64)>,
    pub test_pos: Vec<(usize, usize)>,
    pub test_neg: Vec<(usize, usize)>,
}

/// Holds out `round(test_fraction·|E|)` edges, never touching a random
/// spanning tree, and pairs them with as many sampled non-edges.
pub fn link_prediction_split<R: Rng + ?Sized>(graph: &Graph, test_fraction: f64, rng: &mut R) -> Result<LinkSplit> {
    if !(0.0..0.5).contains(&test_fraction) {
        return Err(Error::OutOfDomain { what: "test fraction (must lie in [0, 0.5))", value: test_fraction });
    }
    let n = graph.node_count();
    if n < 3 {
        return Err(Error::invalid("link prediction needs at least 3 nodes"));
    }
    let comps = graph.components();
    if comps.len() > 1 {
        return Err(Error::Disconnected { components: comps });
    }
    let mut edges = graph.edges();
    edges.shuffle(rng);
    let mut uf = petgraph::unionfind::UnionFind::<usize>::new(n);
    let (mut tree, mut free) = (Vec::new(), Vec::new());
    for e in edges {
        if uf.union(e.0, e.1) {
            tree.push(e);
        } else {
            free.push(e);
        }
    }
    let wanted = (test_fraction * graph.edge_count() as f64).round() as usize;
    let k = wanted.min(free.len());
    let n_non_edges = n * (n - 1) / 2 - graph.edge_count();
    if n_non_edges < k {
        return Err(Error::invalid("graph too dense to sample negative pairs"));
    }
    let test: Vec<_> = free.drain(..k).collect();
    let mut train_edges: Vec<_> = tree.into_iter().chain(free).collect();
    train_edges.sort_by(|a, b| (a.0, a.1).cmp(&(b.0, b.1)));
    let mut test_pos: Vec<(usize, usize)> = test.iter().map(|e| (e.0, e.1)).collect();
    test_pos.sort_unstable();
    let mut seen = HashSet::new();
    let mut test_neg = Vec::with_capacity(k);
    while test_neg.len() < k {
        let (u, v) = (rng.random_range(0..n), rng.random_range(0..n));
        let (u, v) = (u.min(v), u.max(v));
        if u != v && !graph.has_edge(u, v) && seen.insert((u, v)) {
            test_neg.push((u, v));
        }
    }
    Ok(LinkSplit { train_edges, test_pos, test_neg })
}

#[derive(Debug, Clone, Deserialize)]
pub struct BenchmarkDataset {
    pub name: String,
    /// Edge list, or a distance matrix when the extension is `.csv`.
    pub path: PathBuf,
    pub labels: Option<PathBuf>,
}

fn default_epochs() -> usize {
    300
}

fn default_lr() -> f64 {
    0.01
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BenchmarkSpec {
    #[serde(default)]
    pub datasets: Vec<BenchmarkDataset>,
    #[serde(default)]
    pub signatures: Vec<String>,
    /// `embed` (average distortion), `dt` or `rf` (held-out accuracy).
    #[serde(default)]
    pub models: Vec<String>,
    #[serde(default)]
    pub seeds: Vec<u64>,
    #[serde(default = "default_epochs")]
    pub epochs: usize,
    #[serde(default = "default_lr")]
    pub lr: f64,
}

impl BenchmarkSpec {
    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Parse {
            line: e.span().map_or(0, |s| text[..s.start].matches('\n').count() + 1),
            message: e.message().to_string(),
        })
    }

    /// Parses and resolves relative dataset paths against the file's directory.
    pub fn load(path: &Path) -> Result<Self> {
        let mut spec = Self::parse(&read(path)?)?;
        let base = path.parent().unwrap_or(Path::new("."));
        for d in &mut spec.datasets {
            if d.path.is_relative() {
                d.path = base.join(&d.path);
            }
            if let Some(l) = &mut d.labels {
                if l.is_relative() {
                    *l = base.join(&*l);
                }
            }
        }
        Ok(spec)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchmarkRow {
    pub dataset: String,
    pub signature: String,
    pub model: String,
    pub seed: u64,
    /// Metric name, or `error:<kind>` for a failed cell.
    pub metric: String,
    pub value: f64,
    pub wall_time_ms: u128,
}

pub const BENCHMARK_HEADER: &str = "dataset,signature,model,seed,metric,value,wall_time_ms";

pub fn format_report(rows: &[BenchmarkRow]) -> String {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(Vec::new());
    for r in rows {
        w.write_record([
            r.dataset.as_str(),
            r.signature.as_str(),
            r.model.as_str(),
            &r.seed.to_string(),
            r.metric.as_str(),
            &format!("{:?}", r.value),
            &r.wall_time_ms.to_string(),
        ])
        .expect("writing to memory");
    }
    let body = String::from_utf8(w.into_inner().expect("in-memory writer")).expect("utf-8");
    format!("{BENCHMARK_HEADER}\n{body}")
}

fn run_cell(spec: &BenchmarkSpec, ds: &BenchmarkDataset, sig_text: &str, model: &str, seed: u64) -> Result<(String, f64)> {
    let (d, _) = load_distances_any(&ds.path)?;
    let sig = Signature::parse(sig_text)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let emb = fit_coordinates(&d, &sig, &EmbedConfig::new(spec.lr, spec.epochs), &mut rng)?;
    match model {
        "embed" => Ok(("d_avg".into(), avg_distortion(&emb.signature, emb.x.view(), &d)?)),
        "dt" | "rf" => {
            let labels_path = ds.labels.as_ref().ok_or_else(|| Error::invalid(format!("dataset `{}` has no labels", ds.name)))?;
            let y = load_labels(labels_path)?;
            if y.len() != d.len() {
                return Err(Error::DimensionMismatch { expected: d.len(), found: y.len() });
            }
            let (train, test) = holdout_split(y.len());
            let xtr = emb.x.select(Axis(0), &train);
            let xte = emb.x.select(Axis(0), &test);
            let ytr: Vec<f64> = train.iter().map(|&i| y[i]).collect();
            let yte: Vec<f64> = test.iter().map(|&i| y[i]).collect();
            let acc = if model == "dt" {
                ProductDT::fit(&emb.signature, xtr.view(), &ytr, Task::Classification, &TreeConfig::default())?.score(xte.view(), &yte)?
            } else {
                let cfg = ForestConfig { seed: derive_seed(seed, &[1]), ..ForestConfig::default() };
                ProductRF::fit(&emb.signature, xtr.view(), &ytr, Task::Classification, &cfg)?.score(xte.view(), &yte)?
            };
            Ok(("accuracy".into(), acc))
        }
        other => Err(Error::invalid(format!("unknown benchmark model `{other}`"))),
    }
}

/// Runs every dataset × signature × model × seed cell. Failed cells become
/// `error:<kind>` rows with a NaN value.
pub fn run_benchmark(spec: &BenchmarkSpec) -> Vec<BenchmarkRow> {
    let mut cells = Vec::new();
    for ds in &spec.datasets {
        for s in &spec.signatures {
            for m in &spec.models {
                for &seed in &spec.seeds {
                    cells.push((ds, s, m, seed));
                }
            }
        }
    }
    cells
        .par_iter()
        .map(|&(ds, s, m, seed)| {
            let start = Instant::now();
            let (metric, value) = match run_cell(spec, ds, s, m, seed) {
                Ok(v) => v,
                Err(e) => (format!("error:{}", e.kind()), f64::NAN),
            };
            BenchmarkRow {
                dataset: ds.name.clone(),
                signature: s.clone(),
                model: m.clone(),
                seed,
                metric,
                value,
                wall_time_ms: start.elapsed().as_millis(),
            }
        })
        .collect()
}
