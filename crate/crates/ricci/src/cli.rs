//! Command-line front end: build or load a chain, run the curvature and
//! bound pipeline, emit CSV/JSON reports, and certify against the oracles.


use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::curvature::{self, PairMode};
use crate::dobrushin;
use crate::error::{Result, RicciError};
use crate::geometry;
use crate::markov::{ChainSpec, Distribution};
use crate::mcmc;
use crate::oracle::{self, Claim};
use crate::zoo;

/// Exit code for failed certification.
pub const EXIT_CERTIFY_FAILED: i32 = 1;
/// Exit code for invalid input.
pub const EXIT_INVALID_INPUT: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "ricci",
    about = "Multi-step coarse Ricci curvature certificates for finite Markov chains"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Curvature profile, geometry, and every derived bound for one chain
    Analyze(AnalyzeArgs),
    /// Data panels for the forbidden-cube curvature recursion
    CubeFigure(CubeFigureArgs),
    /// MCMC error bounds with a Monte Carlo comparison
    Mcmc(McmcArgs),
    /// List the built-in models and their parameters
    ModelList,
    /// Run the bundled bound-vs-oracle certification across the model zoo
    CertifyAll(CertifyAllArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ScanArg {
    Random,
    Systemic,
}

impl From<ScanArg> for zoo::Scan {
    fn from(s: ScanArg) -> Self {
        match s {
            ScanArg::Random => zoo::Scan::Random,
            ScanArg::Systemic => zoo::Scan::Systemic,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    AllPairs,
    Geodesic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FormatArg {
    Csv,
    Json,
}

/// Chain source: a named model with parameters, or a JSON file.
#[derive(Debug, Args)]
pub struct ModelArgs {
    /// built-in model: two-state | split-merge | curie-weiss | ising-1d | binary-cube
    #[arg(long)]
    pub model: Option<String>,
    /// chain JSON document (alternative to --model)
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// two-state transition probability P(0,1)
    #[arg(long, default_value_t = 0.25)]
    pub a: f64,
    /// two-state transition probability P(1,0)
    #[arg(long, default_value_t = 0.25)]
    pub b: f64,
    /// size parameter (partitions of N, spins, cube dimension)
    #[arg(long = "N", default_value_t = 5)]
    pub n: usize,
    /// forbidden-region level for binary-cube
    #[arg(long = "R", default_value_t = 1)]
    pub r: usize,
    /// inverse temperature
    #[arg(long, default_value_t = 0.5)]
    pub beta: f64,
    /// external field
    #[arg(long, default_value_t = 0.0)]
    pub h: f64,
    /// Glauber scan order
    #[arg(long, value_enum, default_value_t = ScanArg::Random)]
    pub scan: ScanArg,
}

impl ModelArgs {
    pub fn build(&self) -> Result<(String, ChainSpec)> {
        if let Some(path) = &self.input {
            let text = std::fs::read_to_string(path)?;
            let chain = crate::markov::load_chain_json(&text)?;
            return Ok((format!("input:{}", path.display()), chain));
        }
        let name = self.model.as_deref().ok_or_else(|| {
            RicciError::InvalidInput("provide --model or --input".into())
        })?;
        let chain = match name {
            "two-state" => zoo::two_state_chain(self.a, self.b)?,
            "split-merge" => zoo::split_merge_chain(self.n as u32)?.chain,
            "curie-weiss" => zoo::curie_weiss_chain(self.n, self.beta, self.h, self.scan.into())?,
            "ising-1d" => zoo::ising1d_chain(self.n, self.beta, self.h, self.scan.into())?,
            "binary-cube" => zoo::binary_cube_chain(self.n, self.r)?,
            other => {
                return Err(RicciError::InvalidInput(format!(
                    "unknown model '{other}' (see model-list)"
                )))
            }
        };
        Ok((name.to_string(), chain))
    }
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    /// profile horizon K
    #[arg(long = "K", default_value_t = 8)]
    pub horizon: usize,
    /// TV thresholds for the mixing bounds
    #[arg(long, num_args = 1.., value_delimiter = ',', default_values_t = vec![0.25, 0.125])]
    pub eps: Vec<f64>,
    /// pair set for the curvature infimum
    #[arg(long, value_enum, default_value_t = ModeArg::AllPairs)]
    pub mode: ModeArg,
    /// link length for geodesic mode
    #[arg(long, default_value_t = 1.0)]
    pub geodesic_eps: f64,
    /// output directory
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
    /// stdout report format
    #[arg(long, value_enum, default_value_t = FormatArg::Csv)]
    pub format: FormatArg,
    /// compare every bound against the exact oracles; exit 1 on failure
    #[arg(long)]
    pub certify: bool,
    /// largest lag for the pseudo-spectral-gap oracle
    #[arg(long, default_value_t = 4)]
    pub oracle_kmax: usize,
    /// seed for the certification observables
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct CubeFigureArgs {
    #[arg(long = "N", default_value_t = 500)]
    pub n: usize,
    #[arg(long = "R", default_value_t = 100)]
    pub r: usize,
    #[arg(long = "K", default_value_t = 500)]
    pub k: usize,
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct McmcArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    /// profile horizon K for the curvature inputs
    #[arg(long = "K", default_value_t = 8)]
    pub horizon: usize,
    /// chain length N
    #[arg(long, default_value_t = 1000)]
    pub chain_len: usize,
    /// burn-in t0
    #[arg(long, default_value_t = 0)]
    pub t0: usize,
    /// block lag (defaults to the variance-minimizing lag)
    #[arg(long)]
    pub k_lag: Option<usize>,
    /// initial distribution: stationary | uniform | delta:<state>
    #[arg(long, default_value = "stationary")]
    pub q: String,
    /// Monte Carlo replicas
    #[arg(long, default_value_t = 10_000)]
    pub replicas: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// deviations t for the tail table
    #[arg(long, num_args = 1.., value_delimiter = ',', default_values_t = vec![0.05, 0.1, 0.2])]
    pub t: Vec<f64>,
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct CertifyAllArgs {
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

/// Parses argv and runs; returns the process exit code.
pub fn run_from_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.exit_code() == 0 { 0 } else { EXIT_INVALID_INPUT };
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            EXIT_INVALID_INPUT
        }
    }
}

pub fn run(cli: Cli) -> Result<i32> {
    match cli.command {
        Command::Analyze(args) => cmd_analyze(&args),
        Command::CubeFigure(args) => cmd_cube_figure(&args),
        Command::Mcmc(args) => cmd_mcmc(&args),
        Command::ModelList => {
            print_model_list();
            Ok(0)
        }
        Command::CertifyAll(args) => cmd_certify_all(&args),
    }
}

#[derive(Debug, Serialize)]
struct BoundsReport {
    model: String,
    states: usize,
    reversible: bool,
    d0: f64,
    diam: f64,
    kappa: Vec<f64>,
    m_sup: f64,
    kappa_sigma_c_upper: Option<f64>,
    mixing_bound: Vec<MixingEntry>,
    spectral_gap_bound: Option<f64>,
    pseudo_spectral_gap_bound: Option<f64>,
    diameter_bound: Option<f64>,
    eccentricity_bound_max: Option<f64>,
    variance_bound: Option<f64>,
    moment_bound_p2: Option<f64>,
    gaussian_tail: Option<crate::concentration::TailBound>,
    nonreversible_tail: Option<crate::concentration::TailBound>,
}

#[derive(Debug, Serialize)]
struct MixingEntry {
    eps: f64,
    k: Option<usize>,
}

fn write_file(dir: &Path, name: &str, contents: &str) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    std::fs::write(dir.join(name), contents)?;
    Ok(())
}

fn profile_for(chain: &ChainSpec, horizon: usize, mode: ModeArg, eps: f64) -> Result<curvature::CurvatureProfile> {
    let mode = match mode {
        ModeArg::AllPairs => PairMode::AllPairs,
        ModeArg::Geodesic => PairMode::GeodesicNeighbors(eps),
    };
    curvature::curvature_profile(chain, horizon, mode)
}

fn cmd_analyze(args: &AnalyzeArgs) -> Result<i32> {
    let (model, chain) = args.model.build()?;
    let profile = profile_for(&chain, args.horizon, args.mode, args.geodesic_eps)?;
    let summary = geometry::geometry(&chain, &[1, args.horizon]);

    let mixing_bound: Vec<MixingEntry> = args
        .eps
        .iter()
        .map(|&eps| MixingEntry {
            eps,
            k: geometry::mixing_time_bound(&profile, chain.space(), eps).ok(),
        })
        .collect();
    let spectral = if chain.reversible() {
        geometry::spectral_gap_bound(&chain, &profile).ok().map(|b| b.best)
    } else {
        None
    };
    let pseudo = {
        let reversed = chain.reversed()?;
        let profile_star = profile_for(&reversed, args.horizon, args.mode, args.geodesic_eps)?;
        geometry::pseudo_spectral_gap_bound(&profile, &profile_star).ok()
    };
    let best_k = profile.decay_cert().map(|c| c.k);
    let bm = best_k.and_then(|k| geometry::bonnet_myers(&summary, &profile, k).ok());
    let variance = crate::concentration::variance_bound(&chain, &profile, &summary).ok();
    let moment2 = if chain.reversible() {
        crate::concentration::moment_bound_reversible(&chain, &profile, &summary, 2).ok()
    } else {
        None
    };
    let gaussian = if chain.reversible() {
        profile.kappa_sigma_c_upper().ok().map(|sc| {
            let d = sc * summary.sigma_hat_max * summary.sigma_hat_max;
            crate::concentration::TailBound::new(d, f64::INFINITY, 0.0)
        })
    } else {
        None
    };
    let nonrev = crate::concentration::tail_nonreversible(&profile, &summary, 1.0, 0.0)
        .ok()
        .map(|(b, _)| b);

    let report = BoundsReport {
        model: model.clone(),
        states: chain.len(),
        reversible: chain.reversible(),
        d0: chain.space().d0(),
        diam: chain.space().diam(),
        kappa: profile.kappas().to_vec(),
        m_sup: profile.m_sup(),
        kappa_sigma_c_upper: profile.kappa_sigma_c_upper().ok(),
        mixing_bound,
        spectral_gap_bound: spectral,
        pseudo_spectral_gap_bound: pseudo,
        diameter_bound: bm.as_ref().map(|b| b.diam),
        eccentricity_bound_max: bm
            .as_ref()
            .map(|b| b.ecc.iter().copied().fold(0.0, f64::max)),
        variance_bound: variance,
        moment_bound_p2: moment2,
        gaussian_tail: gaussian,
        nonreversible_tail: nonrev,
    };

    write_file(&args.out, "profile.csv", &profile.to_csv())?;
    write_file(&args.out, "geometry.csv", &summary.to_csv())?;
    let bounds_json = serde_json::to_string_pretty(&report)?;
    write_file(&args.out, "bounds.json", &bounds_json)?;

    match args.format {
        FormatArg::Csv => print!("{}", profile.to_csv()),
        FormatArg::Json => println!("{bounds_json}"),
    }

    if !args.certify {
        return Ok(0);
    }
    let claims = certification_claims(&model, &chain, &profile, &summary, args)?;
    let report = oracle::certify(claims);
    write_file(&args.out, "verdicts.csv", &report.to_csv())?;
    write_file(&args.out, "verdicts.json", &report.to_json()?)?;
    for v in &report.verdicts {
        println!(
            "[{}] {} (bound {:.6e}, oracle {:.6e}, slack {:.3e})",
            if v.pass { "PASS" } else { "FAIL" },
            v.claim.name,
            v.claim.bound,
            v.claim.oracle,
            v.slack
        );
    }
    Ok(if report.all_pass() { 0 } else { EXIT_CERTIFY_FAILED })
}

fn certification_claims(
    model: &str,
    chain: &ChainSpec,
    profile: &curvature::CurvatureProfile,
    summary: &geometry::GeometrySummary,
    args: &AnalyzeArgs,
) -> Result<Vec<Claim>> {
    let mut claims = Vec::new();
    let gaps = oracle::exact_gaps(chain, args.oracle_kmax.min(args.horizon))?;
    if chain.reversible() {
        if let (Ok(bound), Some(gs)) = (
            geometry::spectral_gap_bound(chain, profile),
            gaps.gamma_star,
        ) {
            claims.push(Claim::lower("spectral_gap_bound <= gamma*", bound.best, gs));
        }
    }
    {
        let reversed = chain.reversed()?;
        let profile_star = profile_for(&reversed, args.horizon, args.mode, args.geodesic_eps)?;
        if let Ok(b) = geometry::pseudo_spectral_gap_bound(profile, &profile_star) {
            claims.push(Claim::lower("pseudo_gap_bound <= gamma_ps", b, gaps.gamma_ps));
        }
    }
    let t_exact = oracle::exact_mixing(chain, &args.eps, None, 200_000)?;
    for (i, &eps) in args.eps.iter().enumerate() {
        if let Ok(k) = geometry::mixing_time_bound(profile, chain.space(), eps) {
            claims.push(Claim::upper(
                format!("mixing_bound(eps={eps}) >= t_mix"),
                k as f64,
                t_exact[i].1 as f64,
            ));
            // converse: curvature recovered from the mixing time
            let t_half = oracle::exact_mixing(chain, &[eps / 2.0], None, 200_000)?[0].1;
            let (lag, kappa_lb) =
                geometry::kappa_from_mixing(t_half, eps, chain.space().d0(), chain.space().diam());
            if lag >= 1 && lag <= profile.horizon() {
                claims.push(Claim::lower(
                    format!("kappa_from_mixing(eps={eps}) <= kappa_k"),
                    kappa_lb,
                    profile.kappa(lag),
                ));
            }
        }
    }
    if let Some(cert) = profile.decay_cert() {
        if let Ok(bm) = geometry::bonnet_myers(summary, profile, cert.k) {
            claims.push(Claim::upper("bonnet_myers diam >= true diam", bm.diam, chain.space().diam()));
            let worst_ecc_gap = summary
                .ecc
                .iter()
                .zip(bm.ecc.iter())
                .map(|(t, b)| b - t)
                .fold(f64::INFINITY, f64::min);
            claims.push(Claim::upper(
                "eccentricity bound >= E(x) (worst state)",
                worst_ecc_gap,
                0.0,
            ));
        }
    }
    // Variance bound against exact variances of seeded 1-Lipschitz observables.
    if let Ok(vb) = crate::concentration::variance_bound(chain, profile, summary) {
        let mut worst = 0.0f64;
        for trial in 0..8 {
            let f = random_lipschitz(chain, args.seed.wrapping_add(trial));
            worst = worst.max(oracle::exact_variance(chain, &f));
        }
        claims.push(Claim::upper("variance_bound >= exact Var (8 observables)", vb, worst));
    }
    if model == "split-merge" {
        let n = args.model.n as f64;
        claims.push(Claim::lower(
            "kappa_1 >= 2/N^2",
            2.0 / (n * n),
            profile.kappa(1),
        ));
    }
    Ok(claims)
}

/// Deterministic 1-Lipschitz observable: a min-extension of seeded anchor
/// values, shifted to start at zero.
pub fn random_lipschitz(chain: &ChainSpec, seed: u64) -> Vec<f64> {
    let n = chain.len();
    let space = chain.space();
    let rng = mcmc::CounterRng::new(seed);
    let anchors = (n / 3).clamp(1, 12);
    let anchor_ids: Vec<usize> = (0..anchors)
        .map(|i| (rng.draw(1, i as u64) % n as u64) as usize)
        .collect();
    let values: Vec<f64> = (0..anchors)
        .map(|i| rng.uniform(2, i as u64) * space.diam())
        .collect();
    let mut f: Vec<f64> = (0..n)
        .map(|x| {
            anchor_ids
                .iter()
                .zip(values.iter())
                .map(|(&a, &g)| g + space.dist(x, a))
                .fold(f64::INFINITY, f64::min)
        })
        .collect();
    let base = f[0];
    for v in f.iter_mut() {
        *v -= base;
    }
    f
}

fn cmd_cube_figure(args: &CubeFigureArgs) -> Result<i32> {
    let table = zoo::cube_recursion(args.n, args.r, args.k)?;
    let panel = |k: usize| -> String {
        let mut out = String::from("j,kappa_tilde\n");
        let hi = (args.r + 30).min(args.n);
        for j in args.r..hi {
            out.push_str(&format!("{},{}\n", j, table.kappa_tilde[(k - 1, j - args.r)]));
        }
        out
    };
    let k_mid = 100.min(args.k);
    let k_hi = args.k;
    write_file(&args.out, "panel_k1.csv", &panel(1))?;
    write_file(&args.out, &format!("panel_k{k_mid}.csv"), &panel(k_mid))?;
    write_file(&args.out, &format!("panel_k{k_hi}.csv"), &panel(k_hi))?;
    let mut series = String::from("k,min_kappa_tilde\n");
    for (k, v) in table.min_tilde_per_k().iter().enumerate() {
        series.push_str(&format!("{},{}\n", k + 1, v));
    }
    write_file(&args.out, "panel_min_over_k.csv", &series)?;
    write_file(&args.out, "cube_table.csv", &table.to_csv())?;
    println!(
        "N = {}, R = {}: kappa_tilde_1(R) = {}, rho = {}, first positive lag = {:?}",
        args.n,
        args.r,
        table.kappa_tilde[(0, 0)],
        table.rho,
        table.first_positive_k()
    );
    Ok(0)
}

#[derive(Debug, Serialize)]
struct McmcReport {
    model: String,
    chain_len: usize,
    t0: usize,
    k_lag: usize,
    w1_q_pi: f64,
    bias_bound: f64,
    variance_bound: f64,
    empirical_mean: f64,
    empirical_variance: f64,
    se_mean: f64,
    exact_mean: f64,
    tails: Vec<TailRow>,
}

#[derive(Debug, Serialize)]
struct TailRow {
    t: f64,
    bound: f64,
    bound2: f64,
    empirical: f64,
    stderr: f64,
}

fn cmd_mcmc(args: &McmcArgs) -> Result<i32> {
    let (model, chain) = args.model.build()?;
    let profile = curvature::curvature_profile(&chain, args.horizon, PairMode::AllPairs)?;
    let summary = geometry::geometry(&chain, &[1]);
    let q = parse_initial(&args.q, &chain)?;
    let k_lag = match args.k_lag {
        Some(k) => k,
        None => mcmc::choose_block_lag(&profile)?,
    };
    let plan = mcmc::McmcPlan::new(&chain, &profile, q, args.chain_len, args.t0, k_lag, 1.0)?;

    // observable: distance to state 0 (1-Lipschitz on any space)
    let f: Vec<f64> = (0..chain.len()).map(|x| chain.space().dist(x, 0)).collect();
    let exact_mean: f64 = f
        .iter()
        .enumerate()
        .map(|(x, v)| chain.pi().get(x) * v)
        .sum();

    let bias = mcmc::bias_bound(&plan, &profile)?;
    let var_bound = mcmc::mcmc_variance_bound(&chain, &plan, &profile, &summary, None)?;
    let sim = mcmc::simulate(&chain, &plan, &f, args.replicas, args.seed)?;
    let emp = sim.tail(exact_mean, &args.t);

    let mut tails = Vec::new();
    let mut ok = true;
    for (i, &t) in args.t.iter().enumerate() {
        let (_, b1) = mcmc::mcmc_tail_bound(&plan, &profile, &summary, t)?;
        let (_, b2) = mcmc::mcmc_tail_bound2(&chain, &plan, &profile, &summary, None, t)?;
        let (_, p, se) = emp[i];
        if p - 3.0 * se > b1.min(2.0) || p - 3.0 * se > b2.min(2.0) {
            ok = false;
        }
        tails.push(TailRow {
            t,
            bound: b1,
            bound2: b2,
            empirical: p,
            stderr: se,
        });
    }
    let var_ok = sim.variance <= var_bound + 3.0 * variance_se(&sim);
    if !var_ok {
        ok = false;
    }

    let report = McmcReport {
        model,
        chain_len: args.chain_len,
        t0: args.t0,
        k_lag,
        w1_q_pi: plan.w1_q_pi,
        bias_bound: bias,
        variance_bound: var_bound,
        empirical_mean: sim.mean,
        empirical_variance: sim.variance,
        se_mean: sim.se_mean,
        exact_mean,
        tails,
    };
    let json = serde_json::to_string_pretty(&report)?;
    write_file(&args.out, "mcmc.json", &json)?;
    let mut csv = String::from("t,bound,bound2,empirical,stderr\n");
    for row in &report.tails {
        csv.push_str(&format!(
            "{},{},{},{},{}\n",
            row.t, row.bound, row.bound2, row.empirical, row.stderr
        ));
    }
    write_file(&args.out, "mcmc_tails.csv", &csv)?;
    println!("{json}");
    Ok(if ok { 0 } else { EXIT_CERTIFY_FAILED })
}

/// Rough standard error of a sample variance under near-normal Z.
fn variance_se(sim: &mcmc::SimulationReport) -> f64 {
    let r = sim.z.len() as f64;
    sim.variance * (2.0 / (r - 1.0)).sqrt()
}

fn parse_initial(spec: &str, chain: &ChainSpec) -> Result<Distribution> {
    match spec {
        "stationary" => Ok(chain.pi().clone()),
        "uniform" => Ok(Distribution::uniform(chain.len())),
        other => {
            if let Some(state) = other.strip_prefix("delta:") {
                let x: usize = state.parse().map_err(|_| {
                    RicciError::InvalidInput(format!("bad state index '{state}'"))
                })?;
                if x >= chain.len() {
                    return Err(RicciError::InvalidInput(format!(
                        "state {x} out of range for {} states",
                        chain.len()
                    )));
                }
                Ok(Distribution::dirac(chain.len(), x))
            } else {
                Err(RicciError::InvalidInput(format!(
                    "unknown initial distribution '{other}'"
                )))
            }
        }
    }
}

fn print_model_list() {
    println!("two-state      --a P(0,1) --b P(1,0)");
    println!("split-merge    --N partitions of N (2..=30)");
    println!("curie-weiss    --N spins (<= 12 dense) --beta --h --scan random|systemic");
    println!("ising-1d       --N spins (<= 12 dense) --beta --h --scan random|systemic");
    println!("binary-cube    --N dimension --R forbidden level (dense cap 4096 states)");
}

fn cmd_certify_all(args: &CertifyAllArgs) -> Result<i32> {
    let mut claims = Vec::new();

    // two-state closed forms
    {
        let chain = zoo::two_state_chain(0.25, 0.25)?;
        let profile = curvature::curvature_profile(&chain, 8, PairMode::AllPairs)?;
        let summary = geometry::geometry(&chain, &[1]);
        let gaps = oracle::exact_gaps(&chain, 3)?;
        let spectral = geometry::spectral_gap_bound(&chain, &profile)?;
        claims.push(Claim::lower(
            "two-state: spectral bound <= gamma*",
            spectral.best,
            gaps.gamma_star.unwrap(),
        ));
        let t = oracle::exact_mixing(&chain, &[0.25], None, 1000)?[0].1;
        let k = geometry::mixing_time_bound(&profile, chain.space(), 0.25)?;
        claims.push(Claim::upper("two-state: mixing bound >= t_mix", k as f64, t as f64));
        let vb = crate::concentration::variance_bound(&chain, &profile, &summary)?;
        claims.push(Claim::upper(
            "two-state: variance bound >= exact Var",
            vb,
            oracle::exact_variance(&chain, &[0.0, 1.0]),
        ));
    }

    // split-merge at N = 5
    {
        let sm = zoo::split_merge_chain(5)?;
        let profile = curvature::curvature_profile(&sm.chain, 10, PairMode::AllPairs)?;
        claims.push(Claim::lower(
            "split-merge N=5: 2/N^2 <= kappa_1",
            2.0 / 25.0,
            profile.kappa(1),
        ));
        let gaps = oracle::exact_gaps(&sm.chain, 4)?;
        let spectral = geometry::spectral_gap_bound(&sm.chain, &profile)?;
        claims.push(Claim::lower(
            "split-merge N=5: spectral bound <= gamma*",
            spectral.best,
            gaps.gamma_star.unwrap(),
        ));
        let summary = geometry::geometry(&sm.chain, &[1, profile.decay_cert().unwrap().k]);
        let bm = geometry::bonnet_myers(&summary, &profile, profile.decay_cert().unwrap().k)?;
        claims.push(Claim::upper(
            "split-merge N=5: diameter bound >= N-1",
            bm.diam,
            4.0,
        ));
    }

    // Curie-Weiss N = 4: Dobrushin bound below exact curvature
    {
        let chain = zoo::curie_weiss_chain(4, 0.5, 0.0, zoo::Scan::Random)?;
        let profile = curvature::curvature_profile(&chain, 3, PairMode::AllPairs)?;
        let model = dobrushin::CurieWeissModel {
            n: 4,
            beta: 0.5,
            h: 0.0,
        };
        let data = dobrushin::estimate_dobrushin(&model, true)?;
        let rs = dobrushin::random_scan_bound(&data.a, 1)?;
        claims.push(Claim::lower(
            "curie-weiss N=4: Dobrushin kappa_1 bound <= exact",
            rs.kappa_lower,
            profile.kappa(1),
        ));
        let closed = dobrushin::curie_weiss_closed_forms(4, 0.5)?;
        claims.push(Claim::lower(
            "curie-weiss N=4: closed-form rand bound <= exact kappa_1",
            closed.kappa_rand_lower,
            profile.kappa(1),
        ));
        let gaps = oracle::exact_gaps(&chain, 3)?;
        claims.push(Claim::lower(
            "curie-weiss N=4: (1-sp(A))/N <= gamma*",
            rs.gap_lower,
            gaps.gamma_star.unwrap(),
        ));
    }

    // 1D Ising N = 4: tight matrix against the closed band
    {
        let closed = dobrushin::ising1d_closed_forms(4, 0.25, 0.0)?;
        let model = dobrushin::Ising1dModel {
            n: 4,
            beta: 0.25,
            h: 0.0,
            boundary: dobrushin::IsingBoundary::Pinned,
        };
        let data = dobrushin::estimate_dobrushin(&model, true)?;
        let mut worst = 0.0f64;
        for i in 0..4usize {
            for j in 0..4usize {
                let expect = if i.abs_diff(j) == 1 { closed.rho - 0.5 } else { 0.0 };
                worst = worst.max((data.a[(i, j)] - expect).abs());
            }
        }
        claims.push(Claim::lower("ising-1d N=4: tight matrix matches band", worst, 0.0));
        let chain = zoo::ising1d_chain(4, 0.25, 0.0, zoo::Scan::Systemic)?;
        let gaps = oracle::exact_gaps(&chain, 3)?;
        claims.push(Claim::lower(
            "ising-1d N=4: closed-form gamma_ps bound <= oracle",
            closed.gamma_ps_lower,
            gaps.gamma_ps,
        ));
    }

    // binary cube N=6 R=3: boundary curvature and recursion
    {
        let chain = zoo::binary_cube_chain(6, 3)?;
        let profile = curvature::curvature_profile_with_pairs(&chain, 3, PairMode::GeodesicNeighbors(1.0))?;
        // find a neighbour pair on the boundary level
        let labels = chain.space().labels();
        let pair = profile
            .per_pair()
            .unwrap()
            .pairs
            .iter()
            .copied()
            .find(|&(x, y)| {
                let ones = |idx: usize| labels[idx].chars().filter(|&c| c == '1').count();
                ones(x).min(ones(y)) == 3
            })
            .unwrap();
        let k1 = profile.kappa_pair_at(pair.0, pair.1, 1).unwrap();
        let expect = (2.0 - 3.0) / 12.0;
        claims.push(Claim::lower(
            "binary-cube N=6 R=3: kappa_1 boundary pair matches (2-R)/(2N)",
            (k1 - expect).abs(),
            0.0,
        ));
        let table = zoo::cube_recursion(6, 3, 3)?;
        for k in 1..=3usize {
            claims.push(Claim::lower(
                format!("binary-cube N=6 R=3: recursion k={k} <= exact kappa_k"),
                table.min_tilde(k),
                profile.kappa(k),
            ));
        }
    }

    let _ = args.seed;
    let report = oracle::certify(claims);
    write_file(&args.out, "certify_all.csv", &report.to_csv())?;
    write_file(&args.out, "certify_all.json", &report.to_json()?)?;
    for v in &report.verdicts {
        println!(
            "[{}] {} (bound {:.6e}, oracle {:.6e}, slack {:.3e})",
            if v.pass { "PASS" } else { "FAIL" },
            v.claim.name,
            v.claim.bound,
            v.claim.oracle,
            v.slack
        );
    }
    println!("{} passed, {} failed", report.passed, report.failed);
    Ok(if report.all_pass() { 0 } else { EXIT_CERTIFY_FAILED })
}
