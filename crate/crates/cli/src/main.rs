//! `obstruct`: designs, `f_H` evaluation and border-rank certificates from the shell.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value as Json};

use obstruct_core::algebra::{rat, PartitionTriple, QMatrix, Rational};
use obstruct_core::bounds::{
    certify_lower_bound, check_certificate, chromatic_index_exact_with, chromatic_index_greedy, greedy_coloring,
    BoundCertificate, CertifyOptions, ChromaticLimits, Strategy,
};
use obstruct_core::designs::{count_classes, enumerate_designs, ObstructionDesign, SearchLimits};
use obstruct_core::hwv::{
    check_unipotent_invariance, check_weight_scaling, eval_fh, eval_fh_dense, eval_fh_hook, eval_fh_symbolic,
    kronecker_coefficient, span_rank, Route, Value, DEFAULT_EVAL_BUDGET,
};
use obstruct_core::latin::{alon_tarsi_difference, Method};
use obstruct_core::matmul::{self, matmul_bound};
use obstruct_core::tensors::{mamu_tensor, random_lower_unitriangular, tensor_from_json, tensor_to_json, unit_tensor};
use obstruct_core::Error;

#[derive(Parser)]
#[command(name = "obstruct", version, about = "Obstruction designs and border-rank lower bounds")]
struct Cli {
    /// Node or labeling budget for searches and evaluations
    #[arg(long, global = true, value_parser = clap::value_parser!(u64).range(1..))]
    budget: Option<u64>,

    /// Seed for randomized subcommands
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Worker threads (default: all cores)
    #[arg(long, global = true, env = "OBSTRUCT_THREADS", value_parser = clap::value_parser!(u64).range(1..))]
    threads: Option<u64>,

    /// Write the JSON result to this file instead of stdout
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Matrix multiplication tensor M_m with its m³-term decomposition
    Mamu {
        #[arg(long)]
        m: usize,
    },
    /// Unit tensor ⟨n⟩
    Unit {
        #[arg(long)]
        n: usize,
    },
    #[command(subcommand)]
    Design(DesignCommand),
    /// Chromatic index with an optimal coloring
    Chromatic {
        #[arg(long)]
        design: PathBuf,
        /// Greedy upper bound only
        #[arg(long)]
        greedy: bool,
    },
    /// Evaluate f_H at a tensor
    Eval {
        #[arg(long)]
        design: PathBuf,
        #[arg(long)]
        tensor: PathBuf,
        /// Evaluate at diag(X)·w with indeterminates X
        #[arg(long)]
        symbolic: bool,
        #[arg(long, value_enum, default_value_t = EvalRoute::Labeling)]
        route: EvalRoute,
    },
    #[command(subcommand)]
    Hwv(HwvCommand),
    /// Kronecker coefficient of a partition triple
    Kron {
        #[arg(long)]
        lambda: String,
        #[arg(long, value_enum, default_value_t = Via::Characters)]
        via: Via,
        /// Tensor dimension for --via span (default: longest component)
        #[arg(long)]
        n: Option<usize>,
    },
    #[command(subcommand)]
    Bound(BoundCommand),
    /// Even minus odd Latin squares of order n
    Alontarsi {
        #[arg(long)]
        n: usize,
        #[arg(long, value_enum, default_value_t = AtMethod::Both)]
        method: AtMethod,
    },
}

#[derive(Subcommand)]
enum DesignCommand {
    /// Check a design file
    Validate { file: PathBuf },
    /// Type of a design
    Type { file: PathBuf },
    /// All designs of a type
    Enumerate {
        #[arg(long = "type")]
        lambda: String,
        /// One canonical representative per equivalence class
        #[arg(long)]
        canonical: bool,
    },
    /// Number of equivalence classes of a type
    Count {
        #[arg(long = "type")]
        lambda: String,
    },
}

#[derive(Subcommand)]
enum HwvCommand {
    /// Weight scaling and lower-unitriangular invariance on seeded inputs
    Check {
        #[arg(long)]
        design: PathBuf,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        /// Tensor dimension (default: max of longest component and largest slice)
        #[arg(long)]
        n: Option<usize>,
    },
}

#[derive(Subcommand)]
enum BoundCommand {
    /// Certificate for R̲(tensor) ≥ χ′(design)
    Certify {
        #[arg(long)]
        design: PathBuf,
        #[arg(long)]
        tensor: PathBuf,
        #[arg(long, value_enum, default_value_t = CertStrategy::Direct)]
        strategy: CertStrategy,
    },
    /// Re-verify a certificate
    Check { file: PathBuf },
    /// Hook-design certificate for M_m, m odd
    Matmul {
        #[arg(long)]
        m: usize,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum EvalRoute {
    Labeling,
    Dense,
    Hook,
}

#[derive(Clone, Copy, ValueEnum)]
enum Via {
    Characters,
    Span,
}

#[derive(Clone, Copy, ValueEnum)]
enum CertStrategy {
    Direct,
    Symbolic,
}

#[derive(Clone, Copy, ValueEnum)]
enum AtMethod {
    Eval,
    Enumerate,
    Both,
}

/// Failure of a run, mapped to the process exit code.
enum Failure {
    /// exit 1
    Verification(String),
    /// exit 2
    Usage(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Parse(_)
            | Error::InvalidDesign(_)
            | Error::InvalidPartition(_)
            | Error::InvalidSet(_)
            | Error::DimensionMismatch(_)
            | Error::NonSquare { .. }
            | Error::IntersectionViolation { .. }
            | Error::BlockTooLarge { .. } => Failure::Usage(e.to_string()),
            _ => Failure::Verification(e.to_string()),
        }
    }
}

type Outcome = std::result::Result<Json, Failure>;

struct Config {
    budget: Option<u64>,
    seed: Option<u64>,
}

impl Config {
    fn seed(&self, cmd: &str) -> std::result::Result<u64, Failure> {
        self.seed.ok_or_else(|| Failure::Usage(format!("{cmd} is randomized and requires --seed")))
    }

    fn eval_budget(&self) -> u64 {
        self.budget.unwrap_or(DEFAULT_EVAL_BUDGET)
    }

    fn search_limits(&self) -> SearchLimits {
        let mut l = SearchLimits::default();
        if let Some(b) = self.budget {
            l.node_budget = b;
        }
        l
    }

    fn chromatic_limits(&self) -> ChromaticLimits {
        let mut l = ChromaticLimits::default();
        if let Some(b) = self.budget {
            l.node_budget = b;
        }
        l
    }
}

fn read(path: &Path) -> std::result::Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn load_design(path: &Path) -> std::result::Result<ObstructionDesign, Failure> {
    Ok(ObstructionDesign::from_json_str(&read(path)?)?)
}

fn parse_type(s: &str) -> std::result::Result<PartitionTriple, Failure> {
    s.parse().map_err(|e: Error| Failure::Usage(format!("--type/--lambda {s:?}: {e}")))
}

fn design_json(h: &ObstructionDesign) -> Json {
    serde_json::to_value(h.to_json()).expect("serializable")
}

fn run(cmd: Command, cfg: &Config) -> Outcome {
    match cmd {
        Command::Mamu { m } => {
            if m == 0 {
                return Err(Failure::Usage("--m must be positive".into()));
            }
            let (t, dec) = mamu_tensor(m);
            Ok(serde_json::from_str(&tensor_to_json(&t, Some(&dec))).expect("valid json"))
        }
        Command::Unit { n } => {
            if n == 0 {
                return Err(Failure::Usage("--n must be positive".into()));
            }
            let (t, dec) = unit_tensor(n);
            Ok(serde_json::from_str(&tensor_to_json(&t, Some(&dec))).expect("valid json"))
        }
        Command::Design(d) => run_design(d, cfg),
        Command::Chromatic { design, greedy } => {
            let h = load_design(&design)?;
            if greedy {
                let c = greedy_coloring(&h);
                return Ok(json!({
                    "greedy_upper_bound": chromatic_index_greedy(&h).to_string(),
                    "coloring": c.colors,
                }));
            }
            let r = chromatic_index_exact_with(&h, &cfg.chromatic_limits())?;
            Ok(json!({
                "chromatic_index": r.index.to_string(),
                "coloring": r.coloring.colors,
                "clique": r.clique,
            }))
        }
        Command::Eval { design, tensor, symbolic, route } => {
            let h = load_design(&design)?;
            let (t, dec) = tensor_from_json(&read(&tensor)?)?;
            let budget = cfg.eval_budget();
            if symbolic {
                let dec = dec.ok_or_else(|| Failure::Usage("--symbolic needs a tensor with a decomposition".into()))?;
                let r = eval_fh_symbolic(&h, &dec, budget)?;
                let Value::Symbolic(p) = &r.value else { unreachable!() };
                return Ok(json!({
                    "value": p.to_string(),
                    "labelings_visited": r.labelings_visited.to_string(),
                    "labelings_pruned": r.labelings_pruned.to_string(),
                }));
            }
            match route {
                EvalRoute::Labeling => {
                    let dec = dec.unwrap_or_else(|| t.basis_decomposition());
                    let r = eval_fh(&h, &dec, budget)?;
                    Ok(json!({
                        "value": r.numeric().expect("numeric").to_string(),
                        "labelings_visited": r.labelings_visited.to_string(),
                        "labelings_pruned": r.labelings_pruned.to_string(),
                    }))
                }
                EvalRoute::Dense => Ok(json!({ "value": eval_fh_dense(&h, &t, budget)?.to_string() })),
                EvalRoute::Hook => {
                    let kappa = (h.degree().saturating_sub(1)) / 3;
                    if !matmul::is_hook(&h, kappa) {
                        return Err(Failure::Usage("--route hook needs a hook design".into()));
                    }
                    Ok(json!({ "value": eval_fh_hook(kappa, &t)?.to_string() }))
                }
            }
        }
        Command::Hwv(HwvCommand::Check { design, trials, n }) => {
            let seed = cfg.seed("hwv check")?;
            let h = load_design(&design)?;
            let n = n.unwrap_or_else(|| h.design_type().max_len().max(h.max_slice_size()));
            hwv_check(&h, n, trials, seed, cfg.eval_budget())
        }
        Command::Kron { lambda, via, n } => {
            let lam = parse_type(&lambda)?;
            if lam.common_size().is_none() {
                return Err(Failure::Usage(format!("--lambda {lambda:?}: components have different sizes")));
            }
            match via {
                Via::Characters => Ok(json!({
                    "lambda": lam.to_string(),
                    "kronecker_coefficient": kronecker_coefficient(&lam)?.to_string(),
                })),
                Via::Span => {
                    let seed = cfg.seed("kron --via span")?;
                    let limits = cfg.search_limits();
                    let n = n.unwrap_or_else(|| lam.max_len()).max(1);
                    let classes = count_classes(&lam, &limits)?;
                    let r = span_rank(&lam, n, classes + 2, seed, &limits)?;
                    Ok(json!({
                        "lambda": lam.to_string(),
                        "span_rank": r.to_string(),
                        "classes": classes.to_string(),
                    }))
                }
            }
        }
        Command::Bound(b) => run_bound(b, cfg),
        Command::Alontarsi { n, method } => {
            let method = match method {
                AtMethod::Eval => Method::Eval,
                AtMethod::Enumerate => Method::Enumerate,
                AtMethod::Both => Method::Both,
            };
            let r = alon_tarsi_difference(n, method, cfg.eval_budget())?;
            let mut v = serde_json::to_value(&r).expect("serializable");
            v["value"] = Json::String(r.value().to_string());
            Ok(v)
        }
    }
}

fn run_design(cmd: DesignCommand, cfg: &Config) -> Outcome {
    match cmd {
        DesignCommand::Validate { file } => {
            let h = load_design(&file)?;
            Ok(json!({ "valid": true, "degree": h.degree().to_string() }))
        }
        DesignCommand::Type { file } => Ok(json!({ "type": load_design(&file)?.design_type().to_string() })),
        DesignCommand::Enumerate { lambda, canonical } => {
            let lam = parse_type(&lambda)?;
            let hs = enumerate_designs(&lam, canonical, &cfg.search_limits())?;
            Ok(json!({
                "type": lam.to_string(),
                "count": hs.len().to_string(),
                "designs": hs.iter().map(design_json).collect::<Vec<_>>(),
            }))
        }
        DesignCommand::Count { lambda } => {
            let lam = parse_type(&lambda)?;
            Ok(json!({ "type": lam.to_string(), "value": count_classes(&lam, &cfg.search_limits())?.to_string() }))
        }
    }
}

fn random_pm(rng: &mut ChaCha8Rng) -> Rational {
    rat([-3, -2, -1, 1, 2, 3][rng.gen_range(0..6)])
}

fn hwv_check(h: &ObstructionDesign, n: usize, trials: usize, seed: u64, budget: u64) -> Outcome {
    let lam = h.design_type();
    if n < lam.max_len() {
        return Err(Failure::Usage(format!("--n {n} is below the length of the type {lam}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut weight_ok, mut unipotent_ok, mut nonzero) = (0usize, 0usize, 0usize);
    let mut first_failure = None;
    for trial in 0..trials {
        let r = rng.gen_range(1..=h.degree().max(2));
        let (_, t) = obstruct_core::tensors::random_low_rank_with(&mut rng, [n; 3], r, 3);
        let alpha: [Vec<Rational>; 3] = std::array::from_fn(|_| (0..n).map(|_| random_pm(&mut rng)).collect());
        let v = check_weight_scaling(h, &t, &alpha, Route::Labeling, budget)?;
        if !v.lhs.is_zero() {
            nonzero += 1;
        }
        if v.holds() {
            weight_ok += 1;
        } else if first_failure.is_none() {
            first_failure = Some(json!({ "trial": trial, "check": "weight", "lhs": v.lhs.to_string(), "rhs": v.rhs.to_string() }));
        }
        let l: [QMatrix; 3] = std::array::from_fn(|_| random_lower_unitriangular(&mut rng, n, 3));
        let v = check_unipotent_invariance(h, &t, &l, Route::Labeling, budget)?;
        if v.holds() {
            unipotent_ok += 1;
        } else if first_failure.is_none() {
            first_failure = Some(json!({ "trial": trial, "check": "unipotent", "lhs": v.lhs.to_string(), "rhs": v.rhs.to_string() }));
        }
    }
    let out = json!({
        "type": lam.to_string(),
        "n": n.to_string(),
        "trials": trials.to_string(),
        "weight_scaling_holds": weight_ok.to_string(),
        "unipotent_invariance_holds": unipotent_ok.to_string(),
        "nonzero_values": nonzero.to_string(),
    });
    match first_failure {
        None => Ok(out),
        Some(f) => Err(Failure::Verification(format!("HWV property violated: {f}"))),
    }
}

fn cert_json(c: &BoundCertificate) -> Json {
    serde_json::from_str(&c.to_json_string()).expect("valid json")
}

fn run_bound(cmd: BoundCommand, cfg: &Config) -> Outcome {
    let mut opts = CertifyOptions { chromatic: cfg.chromatic_limits(), eval_budget: cfg.eval_budget(), ..Default::default() };
    match cmd {
        BoundCommand::Certify { design, tensor, strategy } => {
            let h = load_design(&design)?;
            let (t, dec) = tensor_from_json(&read(&tensor)?)?;
            let dec = dec.unwrap_or_else(|| t.basis_decomposition());
            opts.strategy = match strategy {
                CertStrategy::Direct => Strategy::Direct,
                CertStrategy::Symbolic => Strategy::Symbolic,
            };
            if opts.strategy == Strategy::Direct {
                opts.seed = cfg.seed("bound certify --strategy direct")?;
            }
            Ok(cert_json(&certify_lower_bound(&h, &dec, &opts)?))
        }
        BoundCommand::Check { file } => {
            let cert = BoundCertificate::from_json_str(&read(&file)?)?;
            check_certificate(&cert, &opts)?;
            Ok(json!({ "valid": true, "implied_bound": cert.implied_bound.to_string() }))
        }
        BoundCommand::Matmul { m } => match matmul_bound(m) {
            Ok(c) => Ok(cert_json(&c)),
            Err(Error::CancellationDetected(msg)) => {
                let a = matmul::MatrixTripleA::new(m)?;
                let per_set: Vec<Json> = matmul::valid_set_coefficients(&a)?
                    .into_iter()
                    .map(|(s, c)| json!({ "set": s, "coefficient": c.to_string() }))
                    .collect();
                Err(Failure::Verification(format!(
                    "per-valid-set coefficients differ ({msg}); no certificate emitted\n{}",
                    serde_json::to_string_pretty(&per_set).expect("serializable")
                )))
            }
            Err(e) => Err(e.into()),
        },
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(t) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(t as usize).build_global() {
            eprintln!("error: --threads: {e}");
            return ExitCode::from(2);
        }
    }
    let cfg = Config { budget: cli.budget, seed: cli.seed };
    match run(cli.command, &cfg) {
        Ok(v) => {
            let mut text = serde_json::to_string_pretty(&v).expect("serializable");
            text.push('\n');
            match &cli.out {
                Some(path) => {
                    if let Err(e) = std::fs::write(path, text) {
                        eprintln!("error: {}: {e}", path.display());
                        return ExitCode::from(2);
                    }
                }
                None => print!("{text}"),
            }
            ExitCode::SUCCESS
        }
        Err(Failure::Verification(msg)) => {
            eprintln!("verification failed: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
