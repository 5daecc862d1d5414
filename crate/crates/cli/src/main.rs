use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use qpi_core::canonical::{canonical_basis, check_slice, CanonicalElement, MonomialOrder};
use qpi_core::checks::crystal_axioms;
use qpi_core::crystal::Crystal;
use qpi_core::export::{self, PiMode};
use qpi_core::golden::{self, Check};
use qpi_core::graded::{Depth, Graded, Kashiwara};
use qpi_core::half::HalfAlgebra;
use qpi_core::module::{HighestWeightModule, DEFAULT_BUDGET};
use qpi_core::tensor::{check_tensor_rule, Coproduct, TensorLattice, TensorModule};
use qpi_core::{CartanDatum, QpiError};

#[derive(Parser)]
#[command(name = "qpi", version, about = "Crystal and canonical bases of quantum covering groups")]
struct Args {
    #[command(subcommand)]
    command: Command,

    /// Builtin datum name or path to a JSON datum.
    #[arg(long, global = true, default_value = "osp14")]
    datum: String,

    /// Dominant weight as comma-separated integers.
    #[arg(long, global = true)]
    lambda: Option<String>,

    /// Height cutoff.
    #[arg(long, global = true)]
    cutoff: Option<usize>,

    /// Dimension budget for highest weight modules.
    #[arg(long, global = true, default_value_t = DEFAULT_BUDGET)]
    budget: usize,

    /// Print scalars with pi formal, or specialized to +1 or -1.
    #[arg(long, global = true, default_value = "formal", allow_hyphen_values = true)]
    pi: String,

    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,

    /// Write output here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Worker threads.
    #[arg(long, global = true)]
    jobs: Option<usize>,

    /// Include the pi-multiples of every basis element.
    #[arg(long, global = true)]
    maximal: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Check the Cartan datum conditions.
    Validate,
    /// Crystal graph of U^- up to the cutoff.
    CrystalBinf {
        /// Also verify the crystal axioms.
        #[arg(long)]
        check: bool,
    },
    /// Crystal graph of V(lambda).
    CrystalBla {
        #[arg(long)]
        check: bool,
    },
    /// Canonical basis of U^-, or of V(lambda) when --lambda is given.
    Canonical {
        #[arg(long, value_enum, default_value_t = Order::Lex)]
        order: Order,
    },
    /// Gram matrix of the polarization at one depth.
    Gram {
        /// Depth as comma-separated integers.
        #[arg(long)]
        depth: String,
    },
    /// Weight spaces, action matrices and Gram matrices of V(lambda).
    Module,
    /// Compare the tensor product rule with the Kashiwara operators on V(lambda) (x) V(mu).
    TensorRule {
        #[arg(long)]
        mu: String,
    },
    /// Reproduce the worked examples and print a pass/fail table.
    PaperExamples,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
    Dot,
    Tex,
}

#[derive(Clone, Copy, ValueEnum)]
enum Order {
    Lex,
    ReverseLex,
}

enum Failure {
    Input(String),
    Check(String),
}

impl From<QpiError> for Failure {
    fn from(e: QpiError) -> Self {
        match e {
            QpiError::InvalidDatum(_)
            | QpiError::Parse(_)
            | QpiError::NonDominantWeight(_)
            | QpiError::IndexOutOfRange(_)
            | QpiError::CutoffExceeded { .. }
            | QpiError::DimensionBudgetExceeded(_)
            | QpiError::Cache(_) => Failure::Input(e.to_string()),
            _ => Failure::Check(e.to_string()),
        }
    }
}

const DEFAULT_CUTOFF: usize = 4;

type Outcome = std::result::Result<Output, Failure>;

/// Rendered output plus the failures that make the run exit 1.
struct Output {
    text: String,
    failures: Vec<String>,
}

impl Output {
    fn ok(text: String) -> Self {
        Output { text, failures: Vec::new() }
    }
}

fn parse_ints<T: std::str::FromStr>(what: &str, s: &str) -> Result<Vec<T>, Failure> {
    s.split(',')
        .map(|t| t.trim().parse::<T>())
        .collect::<Result<Vec<T>, _>>()
        .map_err(|_| Failure::Input(format!("{what} must be comma-separated integers, got {s:?}")))
}

fn raw_datum(source: &str) -> Result<CartanDatum, Failure> {
    if CartanDatum::builtin_names().contains(&source) || source.starts_with("osp(") {
        return Ok(CartanDatum::builtin(source)?);
    }
    let text = std::fs::read_to_string(source)
        .map_err(|e| Failure::Input(format!("cannot read datum {source:?}: {e}")))?;
    let mut raw: CartanDatum =
        serde_json::from_str(&text).map_err(|e| Failure::Input(format!("datum {source:?} is not valid JSON: {e}")))?;
    if raw.name.is_empty() {
        raw.name = Path::new(source)
            .file_stem()
            .map_or("custom".to_string(), |s| s.to_string_lossy().into_owned());
    }
    Ok(raw)
}

fn load_datum(source: &str) -> Result<CartanDatum, Failure> {
    let raw = raw_datum(source)?;
    Ok(CartanDatum::new(&raw.name, raw.a, raw.parity, raw.d)?)
}

fn weight(datum: &CartanDatum, s: &str) -> Result<Vec<i64>, Failure> {
    let l: Vec<i64> = parse_ints("lambda", s)?;
    if l.len() != datum.rank() {
        return Err(Failure::Input(format!(
            "lambda has {} entries but the datum has rank {}",
            l.len(),
            datum.rank()
        )));
    }
    if l.iter().any(|&x| x < 0) {
        return Err(Failure::Input(format!("lambda {l:?} is not dominant")));
    }
    Ok(l)
}

fn require_lambda(args: &Args, datum: &CartanDatum) -> Result<Vec<i64>, Failure> {
    match &args.lambda {
        Some(s) => weight(datum, s),
        None => Err(Failure::Input("--lambda is required".to_string())),
    }
}

fn module(args: &Args, datum: &CartanDatum, lambda: &[i64]) -> Result<Arc<HighestWeightModule>, Failure> {
    let v = match args.cutoff {
        Some(h) => HighestWeightModule::truncated(datum, lambda, h, args.budget)?,
        None => HighestWeightModule::with_budget(datum, lambda, args.budget)?,
    };
    Ok(Arc::new(v))
}

fn module_crystal(v: &Arc<HighestWeightModule>) -> Result<Crystal<HighestWeightModule>, Failure> {
    Ok(Crystal::build(Arc::new(Kashiwara::new(v.clone())), v.depth_height())?)
}

fn cache_dir() -> Option<PathBuf> {
    std::env::var_os("QPI_CACHE_DIR").filter(|s| !s.is_empty()).map(PathBuf::from)
}

/// U^- up to the cutoff, reading and refreshing the weight-space cache when configured.
fn half(datum: &CartanDatum, cutoff: usize) -> Result<Arc<HalfAlgebra>, Failure> {
    let u = Arc::new(HalfAlgebra::new(datum.clone(), cutoff));
    let dir = cache_dir();
    if let Some(d) = &dir {
        u.load_cache(d)?;
    }
    u.prefetch(cutoff)?;
    if let Some(d) = &dir {
        u.save_cache(d)?;
    }
    Ok(u)
}

fn wrong_format(cmd: &str, f: Format) -> Failure {
    let name = match f {
        Format::Text => "text",
        Format::Json => "json",
        Format::Dot => "dot",
        Format::Tex => "tex",
    };
    Failure::Input(format!("{cmd} has no {name} output"))
}

fn pretty(v: &Value) -> String {
    serde_json::to_string_pretty(v).expect("JSON values serialize") + "\n"
}

fn render_crystal<M: Graded>(
    args: &Args,
    pi: PiMode,
    c: &Crystal<M>,
    complete: bool,
    check: bool,
) -> Outcome {
    let text = match args.format {
        Format::Json => pretty(&export::crystal_json(c, pi, args.maximal)),
        Format::Dot => export::crystal_dot(c, pi, args.maximal),
        Format::Text => export::crystal_text(c, pi, args.maximal),
        Format::Tex => return Err(wrong_format("crystal", args.format)),
    };
    let failures = if check { crystal_axioms(c, complete)?.failures } else { Vec::new() };
    Ok(Output { text, failures })
}

fn validate(args: &Args) -> Outcome {
    let raw = raw_datum(&args.datum)?;
    let report = raw.validate();
    let text = match args.format {
        Format::Json => pretty(&serde_json::to_value(&report).expect("report serializes")),
        Format::Text => {
            let mut s = format!("datum {}\n", raw.name);
            for c in &report.0 {
                s += &format!("{:<4} {:<40} {}\n", if c.ok { "ok" } else { "FAIL" }, c.condition, c.detail);
            }
            s
        }
        f => return Err(wrong_format("validate", f)),
    };
    let failures = report
        .0
        .iter()
        .filter(|c| !c.ok)
        .map(|c| format!("condition violated: {}: {}", c.condition, c.detail))
        .collect();
    Ok(Output { text, failures })
}

fn render_canonical<M: Graded>(
    args: &Args,
    pi: PiMode,
    c: &Crystal<M>,
    basis: &BTreeMap<Depth, Vec<CanonicalElement>>,
) -> Outcome {
    let text = match args.format {
        Format::Json => pretty(&export::canonical_json(c, basis, pi, args.maximal)),
        Format::Tex => export::canonical_tex(c, basis, pi, args.maximal),
        Format::Text => export::canonical_text(c, basis, pi, args.maximal),
        Format::Dot => return Err(wrong_format("canonical", args.format)),
    };
    let mut failures = Vec::new();
    for elems in basis.values() {
        failures.extend(check_slice(c, elems)?);
    }
    Ok(Output { text, failures })
}

fn canonical(args: &Args, pi: PiMode, order: Order) -> Outcome {
    let datum = load_datum(&args.datum)?;
    let order = match order {
        Order::Lex => MonomialOrder::Lex,
        Order::ReverseLex => MonomialOrder::ReverseLex,
    };
    if args.lambda.is_some() {
        let l = require_lambda(args, &datum)?;
        let v = module(args, &datum, &l)?;
        let c = module_crystal(&v)?;
        let basis = canonical_basis(&c, order)?;
        render_canonical(args, pi, &c, &basis)
    } else {
        let u = half(&datum, args.cutoff.unwrap_or(DEFAULT_CUTOFF))?;
        let c = Crystal::build(Arc::new(Kashiwara::new(u.clone())), u.cutoff())?;
        let basis = canonical_basis(&c, order)?;
        render_canonical(args, pi, &c, &basis)
    }
}

fn render_gram<M: Graded>(args: &Args, pi: PiMode, m: &M, n: &[u32], words: Vec<Vec<usize>>) -> Outcome {
    let g = m.gram(n)?;
    let words: Vec<Vec<usize>> = words.into_iter().map(|w| w.iter().map(|i| i + 1).collect()).collect();
    let text = match args.format {
        Format::Json => pretty(&json!({
            "depth": n,
            "basis": words,
            "gram": export::matrix_json(&g, pi),
        })),
        Format::Tex => export::matrix_tex(&g, pi),
        Format::Text => {
            let mut s = format!("depth {n:?}, dimension {}\n", g.rows());
            for (k, w) in words.iter().enumerate() {
                s += &format!("basis {k}: F{w:?}\n");
            }
            s + &export::matrix_text(&g, pi)
        }
        Format::Dot => return Err(wrong_format("gram", args.format)),
    };
    Ok(Output::ok(text))
}

fn gram(args: &Args, pi: PiMode, depth: &str) -> Outcome {
    let datum = load_datum(&args.datum)?;
    let n: Vec<u32> = parse_ints("depth", depth)?;
    if n.len() != datum.rank() {
        return Err(Failure::Input(format!(
            "depth has {} entries but the datum has rank {}",
            n.len(),
            datum.rank()
        )));
    }
    if args.lambda.is_some() {
        let l = require_lambda(args, &datum)?;
        let v = module(args, &datum, &l)?;
        let words = (0..v.dim_at(&n)).map(|k| v.basis_word(&n, k)).collect();
        render_gram(args, pi, v.as_ref(), &n, words)
    } else {
        let u = half(&datum, n.iter().sum::<u32>() as usize)?;
        let words = u.space(&n)?.chosen_words.clone();
        render_gram(args, pi, u.as_ref(), &n, words)
    }
}

fn tensor_rule(args: &Args, mu: &str) -> Outcome {
    let datum = load_datum(&args.datum)?;
    let l = require_lambda(args, &datum)?;
    let m = weight(&datum, mu)?;
    let va = module(args, &datum, &l)?;
    let vb = module(args, &datum, &m)?;
    let ca = module_crystal(&va)?;
    let cb = module_crystal(&vb)?;
    let t = Arc::new(TensorModule::new(va, vb, Coproduct::Delta)?);
    let kash = Kashiwara::new(t.clone());
    let lat = TensorLattice::new(&t, &ca, &cb);
    let rep = check_tensor_rule(&lat, &kash)?;
    let text = match args.format {
        Format::Json => pretty(&json!({
            "lambda": l,
            "mu": m,
            "checked": rep.checked,
            "mismatches": rep.mismatches,
        })),
        Format::Text => format!(
            "B({l:?}) (x) B({m:?}): {} operator values checked, {} mismatches\n",
            rep.checked,
            rep.mismatches.len()
        ),
        f => return Err(wrong_format("tensor-rule", f)),
    };
    Ok(Output {
        text,
        failures: rep.mismatches.iter().map(|s| format!("tensor product rule: {s}")).collect(),
    })
}

fn examples_table(args: &Args) -> Outcome {
    let mut groups: Vec<(&str, Vec<Check>)> = Vec::new();
    groups.push(("osp(1|2) strings", golden::rank_one_strings(8)?));
    let mut tensors = Vec::new();
    for n in 1..=4 {
        tensors.extend(golden::odd_rank_one_tensor(n)?);
    }
    groups.push(("osp(1|2) tensor products with V(1)", tensors));
    groups.push(("osp(1|4) at depth (4,1)", golden::osp14_depth_41()?.checks));
    groups.push(("two orthogonal odd roots", golden::odd_orthogonal_pair()?));
    let failures: Vec<String> = groups
        .iter()
        .flat_map(|(g, cs)| cs.iter().filter(|c| !c.ok).map(move |c| format!("{g}: {}", c.label)))
        .collect();
    let text = match args.format {
        Format::Json => pretty(&json!(groups
            .iter()
            .map(|(g, cs)| json!({"group": g, "checks": cs}))
            .collect::<Vec<_>>())),
        Format::Text => {
            let mut s = String::new();
            for (g, cs) in &groups {
                s += &format!("== {g}\n");
                for c in cs {
                    s += &format!("{}  {}\n", if c.ok { "PASS" } else { "FAIL" }, c.label);
                }
            }
            let total: usize = groups.iter().map(|(_, cs)| cs.len()).sum();
            s + &format!("{} of {total} checks pass\n", total - failures.len())
        }
        f => return Err(wrong_format("paper-examples", f)),
    };
    Ok(Output { text, failures })
}

fn run(args: &Args) -> Outcome {
    let pi = PiMode::parse(&args.pi)
        .ok_or_else(|| Failure::Input(format!("--pi must be formal, +1 or -1, got {:?}", args.pi)))?;
    match &args.command {
        Command::Validate => validate(args),
        Command::CrystalBinf { check } => {
            let datum = load_datum(&args.datum)?;
            let u = half(&datum, args.cutoff.unwrap_or(DEFAULT_CUTOFF))?;
            let c = Crystal::build(Arc::new(Kashiwara::new(u.clone())), u.cutoff())?;
            render_crystal(args, pi, &c, false, *check)
        }
        Command::CrystalBla { check } => {
            let datum = load_datum(&args.datum)?;
            let l = require_lambda(args, &datum)?;
            let v = module(args, &datum, &l)?;
            let c = module_crystal(&v)?;
            render_crystal(args, pi, &c, v.is_complete(), *check)
        }
        Command::Canonical { order } => canonical(args, pi, *order),
        Command::Gram { depth } => gram(args, pi, depth),
        Command::Module => {
            if args.format != Format::Json {
                return Err(wrong_format("module", args.format));
            }
            let datum = load_datum(&args.datum)?;
            let l = require_lambda(args, &datum)?;
            let v = module(args, &datum, &l)?;
            Ok(Output::ok(pretty(&export::module_json(&v, pi)?)))
        }
        Command::TensorRule { mu } => tensor_rule(args, mu),
        Command::PaperExamples => examples_table(args),
    }
}

fn main() -> ExitCode {
    let args = Args::parse();
    if let Some(j) = args.jobs {
        if j == 0 {
            eprintln!("error: --jobs must be positive");
            return ExitCode::from(2);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(j).build_global() {
            eprintln!("error: thread pool: {e}");
            return ExitCode::from(2);
        }
    }
    match run(&args) {
        Ok(out) => {
            let written = match &args.out {
                Some(p) => std::fs::write(p, &out.text).map_err(|e| format!("cannot write {}: {e}", p.display())),
                None => {
                    print!("{}", out.text);
                    Ok(())
                }
            };
            if let Err(e) = written {
                eprintln!("error: {e}");
                return ExitCode::from(2);
            }
            if out.failures.is_empty() {
                ExitCode::SUCCESS
            } else {
                for f in &out.failures {
                    eprintln!("failed: {f}");
                }
                ExitCode::from(1)
            }
        }
        Err(Failure::Input(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
        Err(Failure::Check(e)) => {
            eprintln!("failed: {e}");
            ExitCode::from(1)
        }
    }
}
