//! `idt`: generate benchmarks, distill IDTs, check and compile formulas.
//!
//! Exit codes: 0 success, 2 usage, 3 data or format error, 4 internal
//! invariant violation.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use idt_core::activation::{load_activations, ActivationDumps};
use idt_core::graph::{load_tu_dataset, write_tu_dataset, Dataset};
use idt_core::harness::{run_experiment, ExperimentConfig, FoldPlan, Variant};
use idt_core::idt::{
    class_rules, compact, compile_formula_to_idt, explain_dot, explain_text, idt_predict_all, learn_idt, FinalTarget, Idt,
    IdtConfig,
};
use idt_core::logic::{eval_graph, eval_nodes, parse_formula, render_formula};
use idt_core::synth::GeneratorSpec;
use idt_core::Error;
use serde_json::json;

#[derive(Parser)]
#[command(name = "idt", version, about = "Iterated decision trees over counting modal logic")]
struct Cli {
    /// worker threads for folds and per-layer trees
    #[arg(long, global = true, default_value_t = 1)]
    jobs: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic dataset in TU format plus a manifest
    GenData {
        #[command(subcommand)]
        kind: GenKind,
    },
    /// Learn IDTs with k-fold cross-validation and report metrics
    Distill(DistillArgs),
    /// Evaluate a formula on every graph of a dataset
    Check {
        #[arg(long)]
        dataset: PathBuf,
        #[arg(long)]
        formula: String,
        /// also print per-node truth vectors
        #[arg(long)]
        nodes: bool,
    },
    /// Compile a formula into an equivalent IDT
    Compile {
        #[arg(long)]
        formula: String,
        /// number of node features; defaults to what the formula mentions
        #[arg(long)]
        atoms: Option<usize>,
        /// compare the compiled IDT with direct evaluation on this dataset
        #[arg(long)]
        verify: Option<PathBuf>,
        #[arg(long, short)]
        out: Option<PathBuf>,
    },
    /// Render a saved IDT as text trees and rules (and optionally DOT)
    Explain {
        model: PathBuf,
        /// write a Graphviz rendering here
        #[arg(long)]
        dot: Option<PathBuf>,
        /// explain the model as stored instead of its compaction
        #[arg(long)]
        no_compact: bool,
    },
}

#[derive(Subcommand)]
enum GenKind {
    /// Erdős–Rényi graphs labeled by a formula
    Er {
        #[arg(long, default_value_t = 1000)]
        count: usize,
        #[arg(long, default_value_t = 13)]
        n: usize,
        #[arg(long, default_value_t = 0.5)]
        p: f64,
        #[arg(long, default_value = "1 U1 > 0.5")]
        formula: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, short)]
        out: PathBuf,
    },
    /// Barabási–Albert graphs with wheel/house/grid motifs
    Bamulti {
        #[arg(long, default_value_t = 1000)]
        count: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, short)]
        out: PathBuf,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum VariantArg {
    True,
    Gnn,
    #[value(name = "gnn+true")]
    GnnTrue,
}

impl From<VariantArg> for Variant {
    fn from(v: VariantArg) -> Self {
        match v {
            VariantArg::True => Variant::True,
            VariantArg::Gnn => Variant::Gnn,
            VariantArg::GnnTrue => Variant::GnnTrue,
        }
    }
}

#[derive(Args)]
struct DistillArgs {
    #[arg(long)]
    dataset: PathBuf,
    /// model variants; repeat or comma-separate
    #[arg(long, value_enum, value_delimiter = ',', default_value = "true")]
    variant: Vec<VariantArg>,
    /// activation dump, once per fold (a single dump is shared by all folds)
    #[arg(long)]
    activations: Vec<PathBuf>,
    /// fold count; 1 trains a single model on the whole dataset
    #[arg(long, default_value_t = 10)]
    folds: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// output directory for models, rules and the report
    #[arg(long, short)]
    out: Option<PathBuf>,
    #[arg(long, default_value_t = 4)]
    trees_per_layer: usize,
    #[arg(long, default_value_t = 2)]
    layer_depth: usize,
    /// intermediate layers when learning from labels only
    #[arg(long, default_value_t = 3)]
    layers: usize,
    #[arg(long, default_value_t = 0.005)]
    ccp_alpha: f64,
    #[arg(long, default_value_t = 0.5)]
    feature_rate: f64,
    #[arg(long, default_value_t = 5)]
    final_min_rows_leaf: usize,
}

enum Failure {
    Usage(String),
    Core(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Usage(m) => f.write_str(m),
            Failure::Core(e) => e.fmt(f),
        }
    }
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 2,
            Failure::Core(Error::Invariant(_)) => 4,
            Failure::Core(_) => 3,
        }
    }
}

type CmdResult = Result<(), Failure>;

fn write_file(path: &Path, body: &str) -> Result<(), Error> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent).map_err(|e| io_error(parent, e))?;
    }
    fs::write(path, body).map_err(|e| io_error(path, e))
}

fn io_error(path: &Path, source: std::io::Error) -> Error {
    Error::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn manifest(command: &str, params: serde_json::Value) -> String {
    let doc = json!({
        "tool": "idt",
        "version": env!("CARGO_PKG_VERSION"),
        "command": command,
        "parallel_backend": idt_core::par::is_parallel(),
        "params": params,
    });
    serde_json::to_string_pretty(&doc).expect("manifest serializes") + "\n"
}

fn gen_data(kind: GenKind) -> CmdResult {
    let (spec, out) = match kind {
        GenKind::Er {
            count,
            n,
            p,
            formula,
            seed,
            out,
        } => (GeneratorSpec::erdos_renyi(count, n, p, &parse_formula(&formula)?, seed), out),
        GenKind::Bamulti { count, seed, out } => (GeneratorSpec::bamultishapes(count, seed), out),
    };
    let mut ds = spec.generate()?;
    if let Some(name) = out.file_name().and_then(|s| s.to_str()) {
        ds.name = name.to_owned();
    }
    write_tu_dataset(&ds, &out)?;
    write_file(&out.join("manifest.json"), &manifest("gen-data", serde_json::to_value(&spec).map_err(Error::from)?))?;
    let ones = ds.labels().iter().filter(|&&l| l == 1).count();
    println!("wrote {} graphs to {} ({} in class 1)", ds.len(), out.display(), ones);
    Ok(())
}

fn load_dumps(paths: &[PathBuf], ds: &Dataset, folds: usize) -> Result<Option<Vec<ActivationDumps>>, Failure> {
    match paths.len() {
        0 => Ok(None),
        1 => {
            let d = load_activations(&paths[0], ds)?;
            Ok(Some(vec![d; folds]))
        }
        n if n == folds => Ok(Some(paths.iter().map(|p| load_activations(p, ds)).collect::<Result<_, _>>()?)),
        n => Err(Failure::Usage(format!("{n} activation dumps given for {folds} folds; pass one or one per fold"))),
    }
}

fn rules_text(idt: &Idt) -> String {
    class_rules(idt)
        .into_iter()
        .map(|(c, f)| format!("class {c}: {}\n", render_formula(&f)))
        .collect()
}

fn distill(args: DistillArgs) -> CmdResult {
    let variants: Vec<Variant> = args.variant.iter().map(|&v| v.into()).collect();
    if args.activations.is_empty() {
        if let Some(v) = variants.iter().find(|v| v.needs_activations()) {
            return Err(Failure::Usage(format!("{v} needs --activations")));
        }
    }
    if args.folds == 0 {
        return Err(Failure::Usage("--folds must be at least 1".into()));
    }
    let ds = load_tu_dataset(&args.dataset)?;
    let config = IdtConfig {
        trees_per_layer: args.trees_per_layer,
        layer_depth: args.layer_depth,
        layers: args.layers,
        ccp_alpha: args.ccp_alpha,
        feature_rate: args.feature_rate,
        final_min_rows_leaf: args.final_min_rows_leaf,
        seed: args.seed,
        ..IdtConfig::default()
    };
    let dumps = load_dumps(&args.activations, &ds, args.folds)?;
    let params = json!({
        "dataset": args.dataset,
        "graphs": ds.len(),
        "variants": variants,
        "activations": args.activations,
        "folds": args.folds,
        "idt": config,
    });

    if args.folds == 1 {
        return distill_once(&ds, &variants, dumps.as_ref().map(|d| &d[0]), &config, args.out.as_deref(), params);
    }

    let plan = FoldPlan::new(ds.len(), args.folds, args.seed)?;
    let report = run_experiment(&ds, &variants, &plan, dumps.as_deref(), &ExperimentConfig { idt: config })?;
    print!("{}", report.to_table());
    for v in &report.variants {
        println!("{} fold 0 rules:", v.variant);
        for r in &v.folds[0].rules {
            println!("  {r}");
        }
    }
    if let Some(out) = args.out {
        write_file(&out.join("report.txt"), &report.to_table())?;
        write_file(&out.join("report.json"), &(report.to_json()? + "\n"))?;
        for (v, arg) in report.variants.iter().zip(&args.variant) {
            let tag = arg.to_possible_value().expect("named").get_name().replace('+', "_");
            for f in &v.folds {
                let stem = out.join(format!("{tag}_fold{}", f.fold));
                if let (Some(model), Some(small)) = (&f.model, &f.compacted) {
                    write_file(&stem.with_extension("idt.json"), &model.to_json()?)?;
                    write_file(&stem.with_extension("compact.idt.json"), &small.to_json()?)?;
                    write_file(&stem.with_extension("rules.txt"), &rules_text(small))?;
                }
            }
        }
        write_file(&out.join("manifest.json"), &manifest("distill", params))?;
    }
    Ok(())
}

fn distill_once(
    ds: &Dataset,
    variants: &[Variant],
    dumps: Option<&ActivationDumps>,
    config: &IdtConfig,
    out: Option<&Path>,
    params: serde_json::Value,
) -> CmdResult {
    for &v in variants {
        let target = if v == Variant::Gnn { FinalTarget::GnnOutput } else { FinalTarget::TrueLabels };
        let acts = dumps.filter(|_| v.needs_activations());
        let model = learn_idt(ds, acts, target, config)?;
        let small = compact(&model);
        let preds = idt_predict_all(&small, &ds.graphs)?;
        let train_acc = idt_core::harness::accuracy(&preds, &ds.labels())?;
        println!("{v}: training accuracy {train_acc:.4}");
        print!("{}", rules_text(&small));
        if let Some(out) = out {
            let tag = format!("{v:?}").to_lowercase();
            write_file(&out.join(format!("{tag}.idt.json")), &model.to_json()?)?;
            write_file(&out.join(format!("{tag}.compact.idt.json")), &small.to_json()?)?;
            write_file(&out.join(format!("{tag}.rules.txt")), &rules_text(&small))?;
        }
    }
    if let Some(out) = out {
        write_file(&out.join("manifest.json"), &manifest("distill", params))?;
    }
    Ok(())
}

fn check(dataset: &Path, formula: &str, nodes: bool) -> CmdResult {
    let ds = load_tu_dataset(dataset)?;
    let f = parse_formula(formula)?;
    let mut satisfied = 0;
    let mut matches = 0;
    for (i, lg) in ds.graphs.iter().enumerate() {
        let truth = eval_graph(&lg.graph, &lg.features, &f)?;
        satisfied += truth as usize;
        matches += (truth as usize == lg.label) as usize;
        if nodes {
            let bits: String = eval_nodes(&lg.graph, &lg.features, &f)?.iter().map(|&b| if b { '1' } else { '0' }).collect();
            println!("graph {i}: {} label {} nodes {bits}", truth as u8, lg.label);
        } else {
            println!("graph {i}: {} label {}", truth as u8, lg.label);
        }
    }
    println!("{satisfied}/{} graphs satisfy {}", ds.len(), render_formula(&f));
    println!("{matches}/{} agree with the stored labels", ds.len());
    Ok(())
}

fn compile(formula: &str, atoms: Option<usize>, verify: Option<&Path>, out: Option<&Path>) -> CmdResult {
    let f = parse_formula(formula)?;
    let ds = verify.map(load_tu_dataset).transpose()?;
    let atoms = atoms.or(ds.as_ref().map(|d| d.feature_count)).unwrap_or_else(|| f.atom_bound().max(1));
    let compiled = compile_formula_to_idt(&f, atoms)?;
    let json = compiled.idt.to_json()?;
    match out {
        Some(path) => write_file(path, &json)?,
        None => println!("{json}"),
    }
    eprintln!(
        "compiled {} into {} layer(s); node truth is pool column {}",
        render_formula(&f),
        compiled.idt.layers.len(),
        compiled.formula_index
    );
    if let Some(ds) = ds {
        let (mut node_ok, mut node_total, mut graph_ok) = (0usize, 0usize, 0usize);
        for lg in &ds.graphs {
            let want = eval_nodes(&lg.graph, &lg.features, &f)?;
            let got = compiled.eval_nodes(&lg.graph, &lg.features)?;
            node_total += want.len();
            node_ok += want.iter().zip(&got).filter(|(a, b)| a == b).count();
            graph_ok += (compiled.eval_graph(&lg.graph, &lg.features)? == eval_graph(&lg.graph, &lg.features, &f)?) as usize;
        }
        let pct = |a: usize, b: usize| 100.0 * a as f64 / b.max(1) as f64;
        eprintln!(
            "verify: nodes {node_ok}/{node_total} ({:.2}%), graphs {graph_ok}/{} ({:.2}%)",
            pct(node_ok, node_total),
            ds.len(),
            pct(graph_ok, ds.len())
        );
        if node_ok != node_total || graph_ok != ds.len() {
            return Err(Failure::Core(Error::Invariant("compiled IDT disagrees with direct evaluation".into())));
        }
    }
    Ok(())
}

fn explain(model: &Path, dot: Option<&Path>, no_compact: bool) -> CmdResult {
    let text = fs::read_to_string(model).map_err(|e| io_error(model, e))?;
    let mut idt = Idt::from_json(&text)?;
    if !no_compact {
        idt = compact(&idt);
    }
    print!("{}", explain_text(&idt));
    if let Some(path) = dot {
        write_file(path, &explain_dot(&idt))?;
    }
    Ok(())
}

fn run(cli: Cli) -> CmdResult {
    match cli.command {
        Command::GenData { kind } => gen_data(kind),
        Command::Distill(args) => distill(args),
        Command::Check { dataset, formula, nodes } => check(&dataset, &formula, nodes),
        Command::Compile {
            formula,
            atoms,
            verify,
            out,
        } => compile(&formula, atoms, verify.as_deref(), out.as_deref()),
        Command::Explain { model, dot, no_compact } => explain(&model, dot.as_deref(), no_compact),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if cli.jobs == 0 {
        eprintln!("error: --jobs must be at least 1");
        return ExitCode::from(2);
    }
    if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(cli.jobs).build_global() {
        eprintln!("error: cannot start worker pool: {e}");
        return ExitCode::from(4);
    }
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code())
        }
    }
}
