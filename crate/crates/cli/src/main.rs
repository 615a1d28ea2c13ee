mod report;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use magic_iop::arrangement::{enumerate_regions_with_stats, Hyperplane, InsideOutPolytope};
use magic_iop::ehrhart::{
    count_inside_out_direct, count_lattice_points, ehrhart_quasipolynomial, iop_count_regions,
    verify_quasipolynomial,
};
use magic_iop::gfun::{gf_simplify_grouped, qp_to_gf, GroupingStrategy};
use magic_iop::magic::{
    brute_force_count, build_magic_iop, magic_gf, region_generating_functions, sample_counts,
    symmetry_factor_check, MagicSpec, Variant,
};
use magic_iop::polytope::io::{parse_hrep, parse_hyperplanes};
use magic_iop::run::{run_magic, RunConfig, RunOptions};
use magic_iop::{Error, Result};

use report::{Format, Report};

#[derive(Parser)]
#[command(name = "magic-iop", version, about = "Exact counting for inside-out polytopes and magic squares")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Counting function and generating function of a magic-square problem.
    Magic(MagicArgs),
    /// Ehrhart quasipolynomial of a polytope in H-representation.
    Ehrhart(EhrhartArgs),
    /// Regions of a polytope cut by a hyperplane arrangement.
    Regions(RegionsArgs),
    /// Brute-force count of magic squares at one dilation.
    Brute(BruteArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum VariantArg {
    Affine,
    Cubical,
}

impl From<VariantArg> for Variant {
    fn from(v: VariantArg) -> Self {
        match v {
            VariantArg::Affine => Variant::Affine,
            VariantArg::Cubical => Variant::Cubical,
        }
    }
}

#[derive(Args)]
struct Common {
    /// Output format.
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
}

#[derive(Args)]
struct Parallel {
    /// Worker threads.
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    /// Levels of the region tree expanded before work is distributed
    /// [default: 0, or min(8, hyperplanes) with more than one job].
    #[arg(long)]
    split_depth: Option<usize>,
}

impl Parallel {
    fn depth(&self) -> usize {
        self.split_depth
            .unwrap_or(if self.jobs > 1 { 8 } else { 0 })
    }
}

#[derive(Args)]
struct MagicArgs {
    #[arg(long)]
    n: usize,
    #[arg(long, value_enum)]
    variant: VariantArg,
    #[command(flatten)]
    parallel: Parallel,
    /// Print the first N series coefficients (t = 0 … N−1).
    #[arg(long, value_name = "N")]
    series: Option<usize>,
    /// Check the result against direct counts at two extra dilates per
    /// residue class.
    #[arg(long)]
    verify: bool,
    /// Permit problems with n ≥ 4.
    #[arg(long)]
    allow_long: bool,
    /// Append progress to this file and resume from it.
    #[arg(long, value_name = "PATH")]
    checkpoint: Option<PathBuf>,
    /// Regions between checkpoint records.
    #[arg(long, default_value_t = 64, value_name = "K")]
    checkpoint_every: u64,
    /// Stop each subproblem after R regions.
    #[arg(long, value_name = "R")]
    max_regions: Option<u64>,
    /// Sum region counts at this single dilation instead of computing the
    /// full counting function.
    #[arg(long, value_name = "T")]
    count_at: Option<u64>,
    /// Compare the generating-function grouping strategies.
    #[arg(long)]
    grouping: bool,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct EhrhartArgs {
    /// H-representation file.
    hrep: PathBuf,
    #[arg(long, value_name = "N")]
    series: Option<usize>,
    #[arg(long)]
    verify: bool,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct RegionsArgs {
    /// H-representation file.
    hrep: PathBuf,
    /// Hyperplane file, one `b a1 … ad` line per hyperplane `a·x = b`.
    hyperplanes: PathBuf,
    #[command(flatten)]
    parallel: Parallel,
    /// Print each region's constraints and lineage.
    #[arg(long)]
    show_regions: bool,
    /// Also compute the inside-out counting function.
    #[arg(long)]
    count: bool,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct BruteArgs {
    #[arg(long)]
    n: usize,
    #[arg(long, value_enum)]
    variant: VariantArg,
    #[arg(long)]
    t: u64,
    #[command(flatten)]
    common: Common,
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Parse { .. } | Error::InvalidInput(_) => 2,
        Error::EmptyPolyhedron
        | Error::UnboundedPolyhedron
        | Error::NoLatticeCompatibleOrigin
        | Error::DegenerateArrangement { .. } => 3,
        Error::VerificationFailure(_) | Error::SymmetryViolation(_) => 4,
        Error::Overflow | Error::Checkpoint(_) => 1,
    }
}

fn read(path: &PathBuf) -> Result<String> {
    std::fs::read_to_string(path)
        .map_err(|e| Error::InvalidInput(format!("cannot read {}: {e}", path.display())))
}

fn cmd_magic(a: &MagicArgs) -> Result<Report> {
    let spec = MagicSpec::new(a.n, a.variant.into());
    if a.n >= 4 && !a.allow_long {
        return Err(Error::InvalidInput(format!(
            "n = {} is a long-running problem; pass --allow-long to run it",
            a.n
        )));
    }
    let mut config = RunConfig::new(spec, a.parallel.depth());
    config.max_regions = a.max_regions;
    config.count_at = a.count_at;
    let options = RunOptions {
        worker_budget: a.parallel.jobs.max(1),
        checkpoint: a.checkpoint.clone(),
        checkpoint_every: a.checkpoint_every,
    };
    let outcome = run_magic(&config, &options)?;
    let mut report = Report::magic(&outcome);

    if let Some(q) = &outcome.quasipolynomial {
        let clock = Instant::now();
        let gf = magic_gf(q);
        report.timing("generating function", clock.elapsed());
        if let Some(n) = a.series {
            report.series(gf.series(n.saturating_sub(1)));
        }
        report.generating_function(&gf);

        let samples = sample_counts(q, 1..=(3 * q.period() as u64).max(36))?;
        report.symmetry(symmetry_factor_check(&spec, &samples)?);

        if a.verify && a.max_regions.is_none() {
            let clock = Instant::now();
            let iop = build_magic_iop(&spec);
            let checked = verify_quasipolynomial(q, |t| count_inside_out_direct(&iop, t))?;
            report.verified(checked);
            report.timing("verify", clock.elapsed());
        }
        if a.grouping {
            let gfs = region_generating_functions(&spec, config.split_depth, options.worker_budget)?;
            let mut rows = Vec::new();
            for strategy in GroupingStrategy::ALL {
                let (sum, metrics) = gf_simplify_grouped(&gfs, strategy);
                if sum != gf {
                    return Err(Error::VerificationFailure(format!(
                        "{strategy:?} grouping disagrees with the region sum"
                    )));
                }
                rows.push(metrics);
            }
            report.grouping(rows);
        }
    }
    Ok(report)
}

fn cmd_ehrhart(a: &EhrhartArgs) -> Result<Report> {
    let p = parse_hrep(&read(&a.hrep)?)?;
    let clock = Instant::now();
    let q = ehrhart_quasipolynomial(&p)?;
    let mut report = Report::ehrhart(&q);
    report.timing("quasipolynomial", clock.elapsed());
    let gf = qp_to_gf(&q);
    if let Some(n) = a.series {
        report.series(gf.series(n.saturating_sub(1)));
    }
    report.generating_function(&gf);
    if a.verify {
        report.verified(verify_quasipolynomial(&q, |t| count_lattice_points(&p, t))?);
    }
    Ok(report)
}

fn cmd_regions(a: &RegionsArgs) -> Result<Report> {
    let p = parse_hrep(&read(&a.hrep)?)?;
    let hs = parse_hyperplanes(&read(&a.hyperplanes)?, p.dim())?
        .into_iter()
        .map(|(n, b)| Hyperplane::new(n, b))
        .collect();
    let iop = InsideOutPolytope::new(p, hs);
    let reduced = iop.reduce()?;
    let depth = a.parallel.depth().min(reduced.iop.hyperplanes.len());
    let clock = Instant::now();
    let (regions, stats) = enumerate_regions_with_stats(&reduced.iop, depth, a.parallel.jobs.max(1))?;
    let mut report = Report::regions(&reduced, &regions, a.show_regions);
    report.timing("regions", clock.elapsed());
    report.walk(stats);
    if a.count {
        let step = reduced.embedding.step.to_string().parse::<usize>().map_err(|_| Error::Overflow)?;
        let q = iop_count_regions(&regions)?.stretch(step).normalize();
        report.inside_out(&q);
    }
    Ok(report)
}

fn cmd_brute(a: &BruteArgs) -> Result<Report> {
    let spec = MagicSpec::new(a.n, a.variant.into());
    let clock = Instant::now();
    let count = brute_force_count(&spec, a.t)?;
    let mut report = Report::brute(&spec, a.t, count);
    report.timing("brute force", clock.elapsed());
    Ok(report)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (result, format) = match &cli.command {
        Command::Magic(a) => (cmd_magic(a), a.common.format),
        Command::Ehrhart(a) => (cmd_ehrhart(a), a.common.format),
        Command::Regions(a) => (cmd_regions(a), a.common.format),
        Command::Brute(a) => (cmd_brute(a), a.common.format),
    };
    match result {
        Ok(report) => {
            report.print(format);
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
