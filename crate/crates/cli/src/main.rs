use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand};

use bndent_core::measures::targets::{targets_from_beta, DEFAULT_DENOMINATOR_BOUND};
use bndent_core::measures::{
    check_absorbing, check_generating, default_generators, design_tau, drift, parse_rational, DesignConfig, DriftVector, MeasureFile,
    StepMeasure,
};
use bndent_core::pipeline::{run_walk, WalkConfig};
use bndent_core::report::{render_csv, RunManifest};
use bndent_core::spectrum::enumerate_spectrum;
use bndent_core::walk::{FamilyRegistry, StationarityConfig, DEFAULT_FAMILY};
use bndent_core::{AffineElement, Error, FiniteMeasure, PrimeSet};

/// Designed boundary-entropy spectra for random walks on Z[1/p_1,...,1/p_l] ⋊ S
#[derive(Debug, Parser)]
#[command(name = "bndent", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Build a finitely supported, generating, absorbing measure with prescribed drifts
    Design(DesignArgs),
    /// Verify absorption, generation and drift of a measure file
    Check(CheckArgs),
    /// Enumerate the exact boundary-entropy spectrum of a measure file
    Spectrum(SpectrumArgs),
    /// Simulate the walk and test drift, stationarity and entropy
    Walk(WalkArgs),
}

#[derive(Debug, Args)]
struct DesignArgs {
    /// Comma-separated primes, e.g. 2,3
    #[arg(long)]
    primes: String,
    /// Rational drift coefficients c_j (beta_j = c_j log p_j), e.g. 1,1/2
    #[arg(long, conflicts_with = "beta_float", required_unless_present = "beta_float")]
    targets: Option<String>,
    /// Float entropies beta_j, rationalized within --tol
    #[arg(long)]
    beta_float: Option<String>,
    #[arg(long, default_value_t = 1e-6)]
    tol: f64,
    #[arg(long, default_value_t = DEFAULT_DENOMINATOR_BOUND)]
    denominator_bound: u64,
    /// Step measure: `biased-coin` or `w:x,...` (e.g. 3/4:1,1/4:-1)
    #[arg(long, default_value = "biased-coin")]
    sigma: String,
    /// Semicolon-separated generators `(r, [n1,...])`; default (±1,1), (0,p_i^±1)
    #[arg(long)]
    generators: Option<String>,
    /// Measure file to write (stdout if absent)
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct CheckArgs {
    measure: PathBuf,
    /// Semicolon-separated generators to reach; default (±1,1), (0,p_i^±1)
    #[arg(long)]
    generators: Option<String>,
    /// Longest product searched when checking generation
    #[arg(long, default_value_t = 3)]
    depth: usize,
    /// Largest |u| tried in the absorption check (default 2·max s_plus)
    #[arg(long)]
    shift_range: Option<u64>,
    /// Print every coset comparison
    #[arg(long)]
    transcript: bool,
}

#[derive(Debug, Args)]
struct SpectrumArgs {
    measure: PathBuf,
    /// Directory for spectrum.csv and manifest.txt
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct WalkArgs {
    measure: PathBuf,
    /// Walk length for drift and slope estimates
    #[arg(long, default_value_t = 10_000)]
    steps: usize,
    /// Independent walks for the drift estimate
    #[arg(long, default_value_t = 50)]
    trials: usize,
    /// Boundary samples for the stationarity test
    #[arg(long, default_value_t = 1_000)]
    samples: usize,
    /// Certified p-adic digits per boundary point
    #[arg(long, default_value_t = 32)]
    precision: u32,
    /// Increment draws per entropy estimate
    #[arg(long, default_value_t = 100_000)]
    draws: u64,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Restrict reports to prime p_j (1-based)
    #[arg(long)]
    prime_index: Option<usize>,
    /// Stationarity test-function family
    #[arg(long, default_value = DEFAULT_FAMILY)]
    family: String,
    /// Pass threshold in standard errors
    #[arg(long, default_value_t = 4.0)]
    sigmas: f64,
    #[arg(long, default_value = "bndent-out")]
    out: PathBuf,
}

enum Failure {
    /// A checked property does not hold.
    Violated(String),
    /// Bad input or usage.
    Usage(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::DriftHypothesis { .. } | Error::InsufficientPrecision { .. } => Failure::Violated(e.to_string()),
            _ => Failure::Usage(e.to_string()),
        }
    }
}

type CmdResult = Result<bool, Failure>;

fn io_error(path: &Path, e: std::io::Error) -> Failure {
    Failure::Usage(format!("{}: {e}", path.display()))
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| io_error(path, e))
}

fn write(path: &Path, contents: &str) -> Result<(), Failure> {
    fs::write(path, contents).map_err(|e| io_error(path, e))
}

fn load_group(path: &Path) -> Result<(String, FiniteMeasure<AffineElement>), Failure> {
    let text = read(path)?;
    let tau = MeasureFile::parse(&text)?.into_group()?;
    Ok((text, tau))
}

fn tau_primes(tau: &FiniteMeasure<AffineElement>) -> &PrimeSet {
    tau.support().next().expect("parsed measures are non-empty").primes()
}

fn parse_generators(primes: &PrimeSet, text: Option<&str>) -> Result<Vec<AffineElement>, Failure> {
    match text {
        None => Ok(default_generators(primes)),
        Some(t) => Ok(t
            .split(';')
            .filter(|g| !g.trim().is_empty())
            .map(|g| AffineElement::parse(primes, g))
            .collect::<Result<Vec<_>, _>>()?),
    }
}

fn drift_table(d: &DriftVector) -> String {
    let mut out = String::from("prime  drift      drift·log p_j\n");
    for (j, c) in d.coeffs.iter().enumerate() {
        out.push_str(&format!("{:<5}  {:<9}  {:.12}\n", d.primes.prime(j), c.to_string(), d.phi_f64(j)));
    }
    out
}

fn manifest(seed: u64) -> RunManifest {
    let mut m = RunManifest::new(seed);
    m.command = std::env::args().collect();
    m.timestamp = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs().to_string()).unwrap_or_default();
    m
}

fn cmd_design(a: &DesignArgs) -> CmdResult {
    let primes = PrimeSet::parse(&a.primes)?;
    let mut report = String::new();
    let targets = match (&a.targets, &a.beta_float) {
        (Some(t), _) => t
            .split(',')
            .map(|c| parse_rational(c).ok_or_else(|| Error::InvalidArgument(format!("`{}` is not a rational target", c.trim()))))
            .collect::<Result<Vec<_>, Error>>()?,
        (None, Some(b)) => {
            let betas = b
                .split(',')
                .map(|x| x.trim().parse::<f64>().map_err(|_| Error::InvalidArgument(format!("`{x}` is not a number"))))
                .collect::<Result<Vec<_>, _>>()?;
            let rat = targets_from_beta(&primes, &betas, a.tol, a.denominator_bound)?;
            report.push_str("prime  beta        c_j          |c_j·log p_j - beta|\n");
            for (p, r) in primes.iter().zip(&rat) {
                report.push_str(&format!("{p:<5}  {:<10}  {:<11}  {:.3e}\n", r.beta, r.coeff.to_string(), r.error));
            }
            rat.into_iter().map(|r| r.coeff).collect()
        }
        (None, None) => return Err(Failure::Usage("one of --targets or --beta-float is required".into())),
    };
    let mut config = DesignConfig::new(&primes, targets);
    config.sigma = StepMeasure::parse(&a.sigma)?;
    config.generators = parse_generators(&primes, a.generators.as_deref())?;
    let design = design_tau(&primes, &config)?;
    report.push_str(&format!("sigma = {}\n", config.sigma));
    for (p, iota) in primes.iter().zip(&design.iotas) {
        report.push_str(&format!("p = {p}: N = {}, w = {}, iota = {}\n", iota.n, iota.w, iota.measure.iter().map(|(n, w)| format!("{w}:{n}")).collect::<Vec<_>>().join(",")));
    }
    report.push_str(&format!("atoms = {}\n", design.tau.len()));
    report.push_str(&drift_table(&drift(&design.tau)));
    let text = MeasureFile::Group(design.tau).render();
    match &a.out {
        Some(path) => {
            write(path, &text)?;
            print!("{report}");
            println!("wrote {}", path.display());
        }
        None => {
            eprint!("{report}");
            print!("{text}");
        }
    }
    Ok(true)
}

fn cmd_check(a: &CheckArgs) -> CmdResult {
    let (_, tau) = load_group(&a.measure)?;
    let primes = tau_primes(&tau).clone();
    let mut ok = true;

    let probability = tau.is_probability();
    ok &= probability;
    println!("atoms: {}", tau.len());
    println!("probability: {probability} (total mass {})", tau.total_mass());

    let rep = check_absorbing(&tau, a.shift_range);
    ok &= rep.holds;
    println!("absorbing: {}", rep.holds);
    println!(
        "  {} support cosets, {} comparisons, shifts |u| <= {}",
        rep.support_cosets,
        rep.transcript.len(),
        rep.shift_range
    );
    println!("  {}", rep.sufficiency_note());
    if let Some(v) = &rep.first_violation {
        println!("  witness: {}", rep.describe(v));
    }
    if a.transcript {
        for c in &rep.transcript {
            println!("  {}", rep.describe(c));
        }
    }

    let gens = parse_generators(&primes, a.generators.as_deref())?;
    let verdict = check_generating(&tau, &gens, a.depth);
    println!("generating: {verdict}");

    let d = drift(&tau);
    let negative = d.is_negative();
    ok &= negative;
    print!("{}", drift_table(&d));
    println!("negative drift: {negative}");
    Ok(ok)
}

fn cmd_spectrum(a: &SpectrumArgs) -> CmdResult {
    let (text, tau) = load_group(&a.measure)?;
    let d = drift(&tau);
    let rep = enumerate_spectrum(&d)?;
    let l = d.primes.len();
    print!("{}", rep.to_table(l));
    if let Some(dir) = &a.out {
        fs::create_dir_all(dir).map_err(|e| io_error(dir, e))?;
        let mut m = manifest(0);
        m.input("measure", text.as_bytes());
        let hash = m.hash();
        let rows = rep.distinct.iter().map(|e| {
            vec![format!("{:0l$b}", e.subset), e.value.coeff_string(), bndent_core::report::fmt_f64(e.value.to_f64())]
        });
        write(&dir.join("spectrum.csv"), &render_csv(&hash, &["subset", "coefficients", "value"], rows))?;
        write(&dir.join("manifest.txt"), &m.render())?;
    }
    Ok(true)
}

fn cmd_walk(a: &WalkArgs) -> CmdResult {
    let (text, tau) = load_group(&a.measure)?;
    FamilyRegistry::with_defaults().get(&a.family)?;
    let prime_index = match a.prime_index {
        Some(j) if j == 0 || j > tau_primes(&tau).len() => {
            return Err(Failure::Usage(format!("--prime-index {j} is outside 1..={}", tau_primes(&tau).len())))
        }
        other => other.map(|j| j - 1),
    };
    let config = WalkConfig {
        steps: a.steps,
        trials: a.trials,
        samples: a.samples,
        precision: a.precision,
        draws: a.draws,
        seed: a.seed,
        prime_index,
        family: a.family.clone(),
        stationarity: StationarityConfig { sigmas: a.sigmas, ..StationarityConfig::default() },
        ..WalkConfig::default()
    };
    let mut m = manifest(a.seed);
    m.input("measure", text.as_bytes());
    let run = run_walk(&tau, &config, m)?;
    fs::create_dir_all(&a.out).map_err(|e| io_error(&a.out, e))?;
    for (name, contents) in &run.files {
        write(&a.out.join(name), contents)?;
    }
    write(&a.out.join("manifest.txt"), &run.manifest.render())?;
    for line in &run.lines {
        println!("{line}");
    }
    println!("manifest {} written to {}", run.manifest.hash(), a.out.display());
    Ok(run.pass)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Design(a) => cmd_design(a),
        Command::Check(a) => cmd_check(a),
        Command::Spectrum(a) => cmd_spectrum(a),
        Command::Walk(a) => cmd_walk(a),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Failure::Violated(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
