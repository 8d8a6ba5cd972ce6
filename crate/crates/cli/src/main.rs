//! `sqdiff`: construct and verify square-difference-free sets, compute exact
//! additive energies of rational sets, check the gcd-colouring decomposition
//! bounds, extract large spectra, and run the density-increment iteration.
//! All results are emitted as deterministic single-line JSON.

mod json;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use sqdiff_core::config::ConstantsConfig;
use sqdiff_core::decomposition::{optimal_t, verify_decomposition_bounds, SignConvention};
use sqdiff_core::energy::{energy_report, EnergyBackend};
use sqdiff_core::error::{Error, Result};
use sqdiff_core::fourier::{correlation_count, exp_sum, extract_spectrum};
use sqdiff_core::increment::{find_increment, iterate, nu_of_alpha, theorem_bound};
use sqdiff_core::sdf::{greedy_sdf, is_sdf, planted_sdf, random_sdf};
use sqdiff_core::weights::WeightFunction;
use sqdiff_core::{IntegerSet, RationalSet};

#[derive(Parser)]
#[command(name = "sqdiff", version, about)]
struct Cli {
    /// Constants file (key = value); falls back to $SQDIFF_CONSTANTS, then
    /// built-in defaults.
    #[arg(long, global = true)]
    constants: Option<PathBuf>,

    /// Worker threads for the parallel kernels (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,

    /// Accepted for compatibility; output is always JSON.
    #[arg(long, global = true, default_value_t = true)]
    json: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ConstructKind {
    Greedy,
    Planted,
    Random,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum BackendArg {
    Brute,
    Mitm,
    Convolution,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum OmegaArg {
    /// Constant weight 1.
    One,
    /// tau_3 squared.
    Tau3sq,
    /// tau_3 fourth power.
    Tau3quad,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum SignArg {
    Minus,
    Plus,
}

#[derive(Subcommand)]
enum Command {
    /// Build an SDF set and write it to a file.
    Construct {
        #[arg(long, value_enum)]
        kind: ConstructKind,
        #[arg(long)]
        n: u64,
        /// Plant modulus (planted kind).
        #[arg(long, default_value_t = 2)]
        q: u64,
        /// Plant residue (planted kind).
        #[arg(long, default_value_t = 1)]
        r: u64,
        /// Keep probability (random kind).
        #[arg(long, default_value_t = 0.5)]
        keep_prob: f64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Check the square-difference-free property of a set file.
    Verify {
        #[arg(long)]
        set: PathBuf,
    },
    /// Exact 2m-fold additive energy of a rational set file.
    Energy {
        #[arg(long)]
        set: PathBuf,
        #[arg(long, default_value_t = 2)]
        m: u32,
        #[arg(long, value_enum, default_value_t = BackendArg::Mitm)]
        backend: BackendArg,
        /// Optional constant for the reference bound (log Q)^(C^m) (Qn)^m.
        #[arg(long)]
        c: Option<f64>,
    },
    /// Verify the gcd-colouring edge-decomposition bounds on rational sets.
    Decompose {
        #[arg(long)]
        a: PathBuf,
        #[arg(long)]
        b: PathBuf,
        #[arg(long)]
        c_set: PathBuf,
        /// Popularity threshold; omitted = balanced optimum.
        #[arg(long)]
        t: Option<f64>,
        #[arg(long, value_enum, default_value_t = OmegaArg::One)]
        omega: OmegaArg,
        /// Denominator cap L for B.
        #[arg(long)]
        l: u64,
        /// Per-denominator cap n for B.
        #[arg(long)]
        n_cap: u64,
        #[arg(long, value_enum, default_value_t = SignArg::Minus)]
        sign: SignArg,
    },
    /// Extract the large spectrum of a set's balanced function.
    Spectrum {
        #[arg(long)]
        set: PathBuf,
        /// Override for the constant C in K = ceil(C alpha^-2 log N).
        #[arg(long)]
        c: Option<f64>,
        /// Optional CSV dump of (gamma, |1_A-hat(gamma)|) samples.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// One density-increment step at a fixed denominator.
    Increment {
        #[arg(long)]
        set: PathBuf,
        #[arg(long)]
        q: u64,
        #[arg(long, default_value_t = 1.0)]
        k: f64,
        /// Increment strength; "auto" derives it from the density.
        #[arg(long, default_value = "auto")]
        nu: String,
        /// Where to write the rescaled set.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Full density-increment iteration; one JSON line per step.
    Iterate {
        #[arg(long)]
        set: PathBuf,
    },
    /// Combined summary of a set: density, SDF status, bound comparison.
    Report {
        #[arg(long)]
        set: PathBuf,
    },
}

fn load_config(path: &Option<PathBuf>) -> Result<ConstantsConfig> {
    if let Some(path) = path {
        return ConstantsConfig::load(path);
    }
    if let Ok(env_path) = std::env::var("SQDIFF_CONSTANTS") {
        return ConstantsConfig::load(std::path::Path::new(&env_path));
    }
    Ok(ConstantsConfig::default())
}

fn omega_of(arg: OmegaArg) -> WeightFunction {
    match arg {
        OmegaArg::One => WeightFunction::one(),
        OmegaArg::Tau3sq => WeightFunction::tau3_pow(2),
        OmegaArg::Tau3quad => WeightFunction::tau3_pow(4),
    }
}

fn emit(value: Value) {
    println!("{}", json::render(value));
}

/// Exit 1 means a property check failed (witness already printed); other
/// errors map to exit 2 usage/runtime failures.
struct PropertyFailure;

fn run(cli: Cli) -> Result<std::result::Result<(), PropertyFailure>> {
    let config = load_config(&cli.constants)?;
    match cli.command {
        Command::Construct {
            kind,
            n,
            q,
            r,
            keep_prob,
            out,
        } => {
            let set = match kind {
                ConstructKind::Greedy => greedy_sdf(n)?,
                ConstructKind::Planted => planted_sdf(n, q, r, Some(config.seed))?,
                ConstructKind::Random => random_sdf(n, keep_prob, config.seed)?,
            };
            set.write_to(&out)?;
            emit(json!({
                "command": "construct",
                "kind": format!("{kind:?}").to_lowercase(),
                "n": set.n(),
                "size": set.len(),
                "alpha": set.density(),
                "out": out.display().to_string(),
            }));
        }
        Command::Verify { set } => {
            let set = IntegerSet::read_from(&set)?;
            let witness = is_sdf(&set);
            let sdf = witness.is_none();
            emit(json!({
                "command": "verify",
                "n": set.n(),
                "size": set.len(),
                "alpha": set.density(),
                "sdf": sdf,
                "witness": serde_json::to_value(&witness).map_err(|e| Error::Parse(e.to_string()))?,
                "correlation": correlation_count(&set),
            }));
            if !sdf {
                return Ok(Err(PropertyFailure));
            }
        }
        Command::Energy { set, m, backend, c } => {
            let set = RationalSet::read_from(&set)?;
            let backend = match backend {
                BackendArg::Brute => EnergyBackend::Brute,
                BackendArg::Mitm => EnergyBackend::Mitm,
                BackendArg::Convolution => EnergyBackend::Convolution,
            };
            let report = energy_report(&set, m, backend, c)?;
            let mut value =
                serde_json::to_value(&report).map_err(|e| Error::Parse(e.to_string()))?;
            if let Value::Object(map) = &mut value {
                map.insert("command".into(), json!("energy"));
            }
            emit(value);
        }
        Command::Decompose {
            a,
            b,
            c_set,
            t,
            omega,
            l,
            n_cap,
            sign,
        } => {
            let a = RationalSet::read_from(&a)?;
            let b = RationalSet::read_from(&b)?;
            let c_set = RationalSet::read_from(&c_set)?;
            let omega = omega_of(omega);
            let t = match t {
                Some(t) => t,
                None => optimal_t(&a, &c_set, &omega, l, n_cap)?,
            };
            let sign = match sign {
                SignArg::Minus => SignConvention::Minus,
                SignArg::Plus => SignConvention::Plus,
            };
            let report = verify_decomposition_bounds(&a, &b, &c_set, t, &omega, l, n_cap, sign)?;
            let passed = report.passed();
            let mut value =
                serde_json::to_value(&report).map_err(|e| Error::Parse(e.to_string()))?;
            if let Value::Object(map) = &mut value {
                map.insert("command".into(), json!("decompose"));
                map.insert("threshold".into(), json!(t));
            }
            emit(value);
            if !passed {
                return Ok(Err(PropertyFailure));
            }
        }
        Command::Spectrum { set, c, csv } => {
            let set = IntegerSet::read_from(&set)?;
            let mut config = config.clone();
            if let Some(c) = c {
                config.c_kdef = c;
            }
            let report = extract_spectrum(&set, &config)?;
            if let Some(csv_path) = csv {
                use std::io::Write;
                let samples = 4096.min(4 * set.n()).max(16);
                let mut file = std::fs::File::create(csv_path)?;
                writeln!(file, "gamma,magnitude")?;
                for j in 0..samples {
                    let gamma = j as f64 / samples as f64;
                    writeln!(
                        file,
                        "{},{}",
                        json::format_f64(gamma),
                        json::format_f64(exp_sum(&set, gamma).norm())
                    )?;
                }
            }
            let mut value =
                serde_json::to_value(&report).map_err(|e| Error::Parse(e.to_string()))?;
            if let Value::Object(map) = &mut value {
                map.insert("command".into(), json!("spectrum"));
            }
            emit(value);
        }
        Command::Increment {
            set,
            q,
            k,
            nu,
            out,
        } => {
            let set = IntegerSet::read_from(&set)?;
            let nu = if nu == "auto" {
                nu_of_alpha(set.density(), config.c_nu)?
            } else {
                nu.parse::<f64>()
                    .map_err(|e| Error::Parse(format!("bad --nu: {e}")))?
            };
            let result = find_increment(&set, q, k, nu, &config)?;
            if let Some(out) = out {
                result.a_prime.write_to(&out)?;
            }
            let mut value =
                serde_json::to_value(&result).map_err(|e| Error::Parse(e.to_string()))?;
            if let Value::Object(map) = &mut value {
                map.insert("command".into(), json!("increment"));
            }
            emit(value);
        }
        Command::Iterate { set } => {
            let set = IntegerSet::read_from(&set)?;
            let log = iterate(&set, &config)?;
            for step in &log.steps {
                let mut value =
                    serde_json::to_value(step).map_err(|e| Error::Parse(e.to_string()))?;
                if let Value::Object(map) = &mut value {
                    map.insert("command".into(), json!("iterate-step"));
                }
                emit(value);
            }
            emit(json!({
                "command": "iterate",
                "termination": log.termination,
                "steps": log.steps.len(),
                "step_bound": log.step_bound,
                "initial_alpha": log.initial_alpha,
            }));
        }
        Command::Report { set } => {
            let set = IntegerSet::read_from(&set)?;
            let witness = is_sdf(&set);
            let bound = theorem_bound(set.n(), 1.0).ok();
            emit(json!({
                "command": "report",
                "n": set.n(),
                "size": set.len(),
                "alpha": set.density(),
                "sdf": witness.is_none(),
                "witness": serde_json::to_value(&witness).map_err(|e| Error::Parse(e.to_string()))?,
                "correlation": correlation_count(&set),
                "bound_c1": bound,
                "size_over_bound": bound.map(|b| set.len() as f64 / b),
            }));
        }
    }
    Ok(Ok(()))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(threads) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
        {
            eprintln!("failed to configure thread pool: {e}");
            return ExitCode::from(2);
        }
    }
    match run(cli) {
        Ok(Ok(())) => ExitCode::SUCCESS,
        Ok(Err(PropertyFailure)) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
