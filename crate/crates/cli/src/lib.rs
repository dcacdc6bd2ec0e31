//! Command dispatch for the `convreg` binary.

pub mod instance;
pub mod report;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use convreg::chip::{chip_report_at, points_of_interest, ChipOptions};
use convreg::lab::{cyclic_projection, verify, VerifyParams, THEOREM_IDS};
use convreg::rational::{parse_rat, RVec, Rat};
use convreg::regularity::{compute_constants, default_tol, ConstantsOptions, SamplingParams};
use convreg::set::ConvexSet;
use convreg::{inverse_sum, GeomError, HPolyhedron, Mode, NormKind};
use rayon::prelude::*;

use instance::{Instance, InstanceError, SetSpec};
use report::RunInfo;

/// Process exit codes.
pub mod exit {
    pub const OK: i32 = 0;
    pub const USAGE: i32 = 1;
    pub const EMPTY: i32 = 2;
    pub const UNSUPPORTED: i32 = 3;
}

#[derive(Debug, Parser)]
#[command(
    name = "convreg",
    version,
    about = "Regularity constants, CHIP analysis and theorem checks for convex sets"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Normality, dual, generating and error-bound constants.
    Constants {
        #[command(flatten)]
        common: Common,
        /// Comma-separated δ values for the uniform normality constant.
        #[arg(long, value_name = "CSV", value_parser = parse_rat, value_delimiter = ',')]
        delta_grid: Option<Vec<Rat>>,
    },
    /// CHIP-family properties at points of the intersection.
    Chip {
        #[command(flatten)]
        common: Common,
        /// Point to analyse (repeatable); defaults to the instance's points
        /// and the vertices of the intersection.
        #[arg(long, value_name = "CSV", value_parser = parse_rat_list, allow_hyphen_values = true)]
        point: Vec<Vec<Rat>>,
    },
    /// Checks the regularity results on the instance.
    Verify {
        #[command(flatten)]
        common: Common,
        /// Comma-separated theorem ids; all by default.
        #[arg(long, value_name = "IDS", value_delimiter = ',')]
        theorems: Vec<String>,
        /// Comma-separated δ values for the uniform normality constant.
        #[arg(long, value_name = "CSV", value_parser = parse_rat, value_delimiter = ',')]
        delta_grid: Option<Vec<Rat>>,
        /// Point for the pointwise checks (repeatable).
        #[arg(long, value_name = "CSV", value_parser = parse_rat_list, allow_hyphen_values = true)]
        point: Vec<Vec<Rat>>,
    },
    /// Cyclic projections through the sets.
    Cyclic {
        #[command(flatten)]
        common: Common,
        /// Starting point; defaults to the first point of interest.
        #[arg(
            long,
            value_name = "CSV",
            value_parser = parse_rat,
            value_delimiter = ',',
            allow_hyphen_values = true
        )]
        start: Option<Vec<Rat>>,
        #[arg(long, default_value_t = 50)]
        cycles: usize,
    },
    /// Inverse sum of the sets, as an instance set descriptor.
    InverseSum {
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Debug, Args)]
pub struct Common {
    /// Instance file.
    pub instance: PathBuf,
    /// Bisection tolerance.
    #[arg(long, value_name = "RAT", value_parser = parse_rat)]
    pub tol: Option<Rat>,
    /// Sample count; overrides the instance file.
    #[arg(long)]
    pub samples: Option<usize>,
    /// Seed; overrides the instance file.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Restricts sampling to the ball of this radius.
    #[arg(long, value_name = "RAT", value_parser = parse_rat)]
    pub rho: Option<Rat>,
    /// Parallel sampling; output bytes are unchanged.
    #[arg(long)]
    pub parallel: bool,
    /// Directory for report files; stdout when absent.
    #[arg(long, value_name = "DIR")]
    pub out: Option<PathBuf>,
}

fn parse_rat_list(s: &str) -> Result<Vec<Rat>, String> {
    s.split(',').map(parse_rat).collect()
}

/// A failed command with its exit code.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Failure {
            code: exit::USAGE,
            message: message.into(),
        }
    }

    fn unsupported(message: impl Into<String>) -> Self {
        Failure {
            code: exit::UNSUPPORTED,
            message: message.into(),
        }
    }

    fn geom(command: &str, e: GeomError) -> Self {
        let code = match e {
            GeomError::Empty(_) => exit::EMPTY,
            GeomError::Unsupported(_) => exit::UNSUPPORTED,
            _ => exit::USAGE,
        };
        Failure {
            code,
            message: format!("{command}: {e}"),
        }
    }
}

impl From<InstanceError> for Failure {
    fn from(e: InstanceError) -> Self {
        let code = match e {
            InstanceError::Empty(_) => exit::EMPTY,
            InstanceError::Invalid(_) => exit::USAGE,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

/// A report ready to be written.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Output {
    pub file_name: &'static str,
    pub contents: String,
}

struct Run<'a> {
    command: &'static str,
    inst: Instance,
    common: &'a Common,
}

impl Run<'_> {
    fn sampling(&self, points: &[Vec<Rat>]) -> SamplingParams {
        SamplingParams {
            samples: self.common.samples.unwrap_or(self.inst.file.samples),
            seed: self.common.seed.unwrap_or(self.inst.file.seed),
            rho: self.common.rho.clone(),
            points: self
                .inst
                .points()
                .into_iter()
                .chain(points.iter().cloned())
                .collect(),
            parallel: self.common.parallel,
        }
    }

    fn tol(&self) -> Rat {
        self.common.tol.clone().unwrap_or_else(default_tol)
    }

    fn geom(&self, e: GeomError) -> Failure {
        Failure::geom(self.command, e)
    }

    /// Commands that inflate by norm balls need a sampled Euclidean norm.
    fn reject_exact_l2(&self) -> Result<(), Failure> {
        let norm = self.inst.collection.norm();
        if norm.kind == NormKind::L2 && norm.mode == Mode::Exact {
            return Err(Failure::unsupported(format!(
                "{}: the l2 norm has no exact ball inflation; use mode \"float\" or a polyhedral norm",
                self.command
            )));
        }
        Ok(())
    }

    fn check_points(&self, points: &[Vec<Rat>]) -> Result<(), Failure> {
        let dim = self.inst.collection.dim();
        match points.iter().find(|p| p.len() != dim) {
            Some(p) => Err(Failure::usage(format!(
                "{}: point has {} coordinates, the instance lives in dimension {dim}",
                self.command,
                p.len()
            ))),
            None => Ok(()),
        }
    }
}

fn constants(run: &Run<'_>, delta_grid: &Option<Vec<Rat>>) -> Result<Output, Failure> {
    run.reject_exact_l2()?;
    let opts = ConstantsOptions {
        tol: run.tol(),
        delta_grid: delta_grid
            .clone()
            .unwrap_or_else(|| VerifyParams::default().delta_grid),
        sampling: run.sampling(&[]),
    };
    let r = compute_constants(&run.inst.collection, &opts).map_err(|e| run.geom(e))?;
    Ok(Output {
        file_name: "constants.csv",
        contents: report::constants_csv(&run.inst.name, &r),
    })
}

fn chip(run: &Run<'_>, point: &[Vec<Rat>]) -> Result<Output, Failure> {
    run.reject_exact_l2()?;
    run.check_points(point)?;
    let c = &run.inst.collection;
    let points: Vec<RVec> = if point.is_empty() {
        points_of_interest(c, &run.inst.points())
    } else {
        point.to_vec()
    };
    if points.is_empty() {
        return Err(Failure::unsupported(
            "chip: no point of the intersection to test; pass --point",
        ));
    }
    let opts = ChipOptions {
        tol: run.tol(),
        dual_samples: VerifyParams::default().dual_samples,
        sampling: run.sampling(&[]),
    };
    let reports = points
        .iter()
        .map(|x| chip_report_at(c, x, &opts))
        .collect::<Result<Vec<_>, _>>();
    Ok(Output {
        file_name: "chip.csv",
        contents: report::chip_csv(&run.inst.name, &reports.map_err(|e| run.geom(e))?),
    })
}

fn theorems(
    run: &Run<'_>,
    ids: &[String],
    delta_grid: &Option<Vec<Rat>>,
    point: &[Vec<Rat>],
) -> Result<Output, Failure> {
    run.reject_exact_l2()?;
    run.check_points(point)?;
    let ids: Vec<&str> = if ids.is_empty() {
        THEOREM_IDS.to_vec()
    } else {
        ids.iter().map(|s| s.trim()).collect()
    };
    if let Some(bad) = ids.iter().find(|id| !THEOREM_IDS.contains(id)) {
        return Err(Failure::usage(format!(
            "verify: unknown theorem id '{bad}' (known: {})",
            THEOREM_IDS.join(", ")
        )));
    }
    let defaults = VerifyParams::default();
    let params = VerifyParams {
        tol: run.tol(),
        delta_grid: delta_grid.clone().unwrap_or(defaults.delta_grid),
        sampling: run.sampling(point),
        dual_samples: defaults.dual_samples,
    };
    let c = &run.inst.collection;
    let results: Vec<_> = if run.common.parallel {
        ids.par_iter().map(|id| verify(id, c, &params)).collect()
    } else {
        ids.iter().map(|id| verify(id, c, &params)).collect()
    };
    let reports = results
        .into_iter()
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| run.geom(e))?;
    let norm = c.norm();
    let info = RunInfo {
        instance: &run.inst.name,
        norm: format!("{} ({})", norm.kind.name(), norm.mode.name()),
        samples: params.sampling.samples,
        seed: params.sampling.seed,
    };
    Ok(Output {
        file_name: "theorems.md",
        contents: report::theorems_markdown(&info, &reports),
    })
}

fn cyclic(run: &Run<'_>, start: &Option<Vec<Rat>>, cycles: usize) -> Result<Output, Failure> {
    let x0 = match start {
        Some(s) => s.clone(),
        None => run.inst.points().into_iter().next().ok_or_else(|| {
            Failure::usage("cyclic: no starting point; pass --start or list points_of_interest")
        })?,
    };
    run.check_points(std::slice::from_ref(&x0))?;
    let t = cyclic_projection(&run.inst.collection, &x0, cycles).map_err(|e| run.geom(e))?;
    Ok(Output {
        file_name: "trajectory.csv",
        contents: report::trajectory_csv(&t),
    })
}

fn inverse_sum_of_sets(run: &Run<'_>) -> Result<Output, Failure> {
    let c = &run.inst.collection;
    let polys = c
        .sets()
        .iter()
        .map(|s| match s {
            ConvexSet::Ball(_) | ConvexSet::ShrinkingIntervals => Err(Failure::unsupported(
                format!("inverse-sum: {} sets are not polyhedral", s.kind_name()),
            )),
            _ => Ok(s.to_h().expect("polyhedral sets have an H-form")),
        })
        .collect::<Result<Vec<HPolyhedron>, _>>()?;
    let mut acc = polys[0].clone();
    for p in &polys[1..] {
        acc = inverse_sum(&acc, p).map_err(|e| run.geom(e))?;
    }
    let spec = SetSpec(ConvexSet::HPoly(acc.canonical()));
    let mut contents = serde_json::to_string_pretty(&spec).expect("set descriptors serialize");
    contents.push('\n');
    Ok(Output {
        file_name: "inverse_sum.json",
        contents,
    })
}

/// Runs a parsed command and returns its report.
pub fn execute(cli: &Cli) -> Result<Output, Failure> {
    let (command, common) = match &cli.command {
        Command::Constants { common, .. } => ("constants", common),
        Command::Chip { common, .. } => ("chip", common),
        Command::Verify { common, .. } => ("verify", common),
        Command::Cyclic { common, .. } => ("cyclic", common),
        Command::InverseSum { common } => ("inverse-sum", common),
    };
    let inst = Instance::load(&common.instance)?;
    let run = Run {
        command,
        inst,
        common,
    };
    match &cli.command {
        Command::Constants { delta_grid, .. } => constants(&run, delta_grid),
        Command::Chip { point, .. } => chip(&run, point),
        Command::Verify {
            theorems: ids,
            delta_grid,
            point,
            ..
        } => theorems(&run, ids, delta_grid, point),
        Command::Cyclic { start, cycles, .. } => cyclic(&run, start, *cycles),
        Command::InverseSum { .. } => inverse_sum_of_sets(&run),
    }
}

fn out_dir(cli: &Cli) -> Option<&PathBuf> {
    match &cli.command {
        Command::Constants { common, .. }
        | Command::Chip { common, .. }
        | Command::Verify { common, .. }
        | Command::Cyclic { common, .. }
        | Command::InverseSum { common } => common.out.as_ref(),
    }
}

/// Parses `args` (program name first), runs the command and writes the
/// report to `--out` or `stdout`. Returns the exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() {
                exit::USAGE
            } else {
                exit::OK
            };
            let sink: &mut dyn Write = if e.use_stderr() { stderr } else { stdout };
            let _ = write!(sink, "{}", e.render());
            return code;
        }
    };
    let output = match execute(&cli) {
        Ok(o) => o,
        Err(f) => {
            let _ = writeln!(stderr, "error: {}", f.message);
            return f.code;
        }
    };
    match out_dir(&cli) {
        Some(dir) => {
            let path = dir.join(output.file_name);
            let written =
                std::fs::create_dir_all(dir).and_then(|_| std::fs::write(&path, &output.contents));
            if let Err(e) = written {
                let _ = writeln!(stderr, "error: cannot write {}: {e}", path.display());
                return exit::USAGE;
            }
        }
        None => {
            let _ = stdout.write_all(output.contents.as_bytes());
        }
    }
    exit::OK
}
