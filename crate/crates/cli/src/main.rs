use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use calderon::error::Error;
use calderon::harness::{self, selftest, FieldSide, Settings, StudyConfig};

const EXIT_USAGE: u8 = 2;
const EXIT_NUMERICAL: u8 = 3;
const EXIT_IO: u8 = 4;

#[derive(Parser, Debug)]
#[command(name = "calderon", version, about = "Staggered-grid Nyström solvers for the 2D Helmholtz equation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Solve once on the largest N of the ladder and print the boundary data.
    Solve {
        #[command(flatten)]
        study: StudyArgs,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        out: Format,
        #[arg(long)]
        output: Option<PathBuf>,
        /// Write V.txt, K.txt, J.txt and W.txt into this directory.
        #[arg(long, value_name = "DIR")]
        dump_matrices: Option<PathBuf>,
    },
    /// Run the N ladder and print errors with e.c.r.
    Convergence {
        #[command(flatten)]
        study: StudyArgs,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        out: Format,
        #[arg(long)]
        output: Option<PathBuf>,
        /// Omit wall time and other run metadata.
        #[arg(long)]
        no_meta: bool,
    },
    /// Evaluate the discrete field on a lattice (`x,y,re,im` CSV).
    Field {
        #[command(flatten)]
        study: StudyArgs,
        #[arg(long, value_enum, default_value_t = Side::Exterior)]
        side: Side,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Check special functions and the N = 4 circle fixtures.
    Selftest {
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        out: Format,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Side {
    Exterior,
    Interior,
}

/// Flags mirror the config-file keys and override them.
#[derive(Args, Debug, Default)]
struct StudyArgs {
    /// `key = value` file; flags given on the command line win.
    #[arg(long)]
    config: Option<PathBuf>,
    /// e.g. `paper_ellipse`, `circle 1`, `ellipse 2 1 0.1 0.2`, `fourier coeffs.txt`
    #[arg(long)]
    curve: Option<String>,
    #[arg(long)]
    k: Option<String>,
    #[arg(long)]
    eps: Option<String>,
    /// Comma-separated ladder, e.g. `10,20,40`.
    #[arg(long = "N", value_name = "N")]
    n: Option<String>,
    /// dD01 … iN02, `transmission` or `burton_miller`
    #[arg(long)]
    method: Option<String>,
    /// Burton–Miller coupling, e.g. `-2i` or `0,-2`.
    #[arg(long, allow_hyphen_values = true)]
    coupling: Option<String>,
    #[arg(long)]
    c: Option<String>,
    #[arg(long)]
    alpha: Option<String>,
    /// `x y`
    #[arg(long, allow_hyphen_values = true)]
    x0: Option<String>,
    /// `x y`
    #[arg(long, allow_hyphen_values = true)]
    d: Option<String>,
    /// `x y; x y; ...`
    #[arg(long, allow_hyphen_values = true)]
    observe: Option<String>,
    /// `unscaled` or `mesh`
    #[arg(long)]
    bm_scaling: Option<String>,
    /// Allow eps = 1/2 (unstable companion grid).
    #[arg(long)]
    unstable_eps: bool,
    /// `kernel` or `as_printed`
    #[arg(long)]
    normals: Option<String>,
    /// `xmin xmax ymin ymax nx ny`
    #[arg(long, allow_hyphen_values = true)]
    lattice: Option<String>,
    /// Minimum distance to the boundary in units of the largest cell length.
    #[arg(long)]
    clearance: Option<String>,
    #[arg(long)]
    sequential: bool,
}

impl StudyArgs {
    fn settings(&self) -> Result<Settings, Error> {
        let mut s = match &self.config {
            Some(p) => Settings::load(p)?,
            None => Settings::new(),
        };
        let pairs = [
            ("curve", &self.curve),
            ("k", &self.k),
            ("eps", &self.eps),
            ("N", &self.n),
            ("method", &self.method),
            ("coupling", &self.coupling),
            ("c", &self.c),
            ("alpha", &self.alpha),
            ("x0", &self.x0),
            ("d", &self.d),
            ("observe", &self.observe),
            ("bm_scaling", &self.bm_scaling),
            ("normals", &self.normals),
            ("lattice", &self.lattice),
            ("clearance", &self.clearance),
        ];
        for (key, value) in pairs {
            if let Some(v) = value {
                s.set(key, v.clone())?;
            }
        }
        if self.unstable_eps {
            s.set("unstable_eps", "true")?;
        }
        if self.sequential {
            s.set("sequential", "true")?;
        }
        Ok(s)
    }

    fn study(&self) -> Result<StudyConfig, Error> {
        StudyConfig::from_settings(&self.settings()?)
    }
}

fn open_output(path: Option<&Path>) -> Result<Box<dyn Write>, Error> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).map_err(|e| Error::Io(format!("{}: {e}", p.display())))?,
        )),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn finish(mut w: Box<dyn Write>) -> Result<(), Error> {
    w.flush().map_err(Error::from)
}

fn solve_once(cfg: &StudyConfig, out: Format, output: Option<&Path>, dump: Option<&Path>) -> Result<(), Error> {
    let n = *cfg.ladder.last().expect("nonempty ladder");
    let grid = harness::grid_for(cfg, n)?;
    let case = harness::solve_case(cfg, &grid).map_err(|e| Error::AtLadder { n, source: Box::new(e) })?;
    if let Some(dir) = dump {
        let ops = calderon::operators::assemble_all_with(
            &grid,
            cfg.problem.k(),
            calderon::operators::AssemblyOptions {
                exec: cfg.exec,
                normals: cfg.normals,
            },
        )?;
        ops.dump(dir)?;
    }
    for w in &case.warnings {
        eprintln!("warning: {w}");
    }
    let summary = harness::summarize(cfg, &case);
    let mut w = open_output(output)?;
    match out {
        Format::Csv => summary.write_csv(&mut w)?,
        Format::Json => {
            serde_json::to_writer_pretty(&mut w, &summary).map_err(|e| Error::Io(e.to_string()))?;
            writeln!(w)?;
        }
    }
    finish(w)
}

fn convergence(cfg: &StudyConfig, out: Format, output: Option<&Path>, no_meta: bool) -> Result<(), Error> {
    let mut report = harness::run_study(cfg)?;
    if no_meta {
        report.meta = None;
    }
    for w in &report.warnings {
        eprintln!("warning: {w}");
    }
    let mut w = open_output(output)?;
    match out {
        Format::Csv => report.write_csv(&mut w)?,
        Format::Json => report.write_json(&mut w)?,
    }
    finish(w)
}

fn field(cfg: &StudyConfig, side: Side, output: Option<&Path>) -> Result<(), Error> {
    let lattice = cfg
        .lattice
        .clone()
        .ok_or_else(|| Error::Config("field export needs `lattice = xmin xmax ymin ymax nx ny`".into()))?;
    let n = *cfg.ladder.last().expect("nonempty ladder");
    let grid = harness::grid_for(cfg, n)?;
    let case = harness::solve_case(cfg, &grid).map_err(|e| Error::AtLadder { n, source: Box::new(e) })?;
    let side = match side {
        Side::Exterior => FieldSide::Exterior,
        Side::Interior => FieldSide::Interior,
    };
    let mut w = open_output(output)?;
    harness::export_field(cfg, &case.solution, &lattice, side, &mut w)?;
    finish(w)
}

fn run_selftest(out: Format) -> Result<bool, Error> {
    let report = selftest::run();
    let mut w = open_output(None)?;
    match out {
        Format::Csv => {
            writeln!(w, "check,result,detail")?;
            for c in &report.checks {
                writeln!(w, "{},{},{}", c.name, if c.passed { "pass" } else { "FAIL" }, c.detail)?;
            }
        }
        Format::Json => {
            serde_json::to_writer_pretty(&mut w, &report).map_err(|e| Error::Io(e.to_string()))?;
            writeln!(w)?;
        }
    }
    finish(w)?;
    Ok(report.passed())
}

fn exit_code(e: &Error) -> u8 {
    if e.is_io() {
        EXIT_IO
    } else if e.is_numerical() {
        EXIT_NUMERICAL
    } else {
        EXIT_USAGE
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match &cli.command {
        Command::Solve {
            study,
            out,
            output,
            dump_matrices,
        } => study
            .study()
            .and_then(|cfg| solve_once(&cfg, *out, output.as_deref(), dump_matrices.as_deref())),
        Command::Convergence {
            study,
            out,
            output,
            no_meta,
        } => study
            .study()
            .and_then(|cfg| convergence(&cfg, *out, output.as_deref(), *no_meta)),
        Command::Field { study, side, output } => study.study().and_then(|cfg| field(&cfg, *side, output.as_deref())),
        Command::Selftest { out } => match run_selftest(*out) {
            Ok(true) => Ok(()),
            Ok(false) => {
                eprintln!("error: self test failed");
                return ExitCode::from(EXIT_NUMERICAL);
            }
            Err(e) => Err(e),
        },
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            if let Error::Config(_) | Error::InvalidParameter(_) = e {
                eprintln!("run `calderon --help` for usage");
            }
            ExitCode::from(exit_code(&e))
        }
    }
}
