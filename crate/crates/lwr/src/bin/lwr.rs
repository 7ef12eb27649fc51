use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use lwr::gallery::{parse_job, prepare, run_prepared, JobConfig, Suite};
use lwr::surface::format_sci;
use lwr::LwrError;

#[derive(Parser)]
#[command(name = "lwr", version, about = "Minimal and CMC-1 surfaces from loop Weierstrass potentials")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build the surface, run the job's checks and write its meshes.
    Generate {
        #[arg(short, long)]
        config: PathBuf,
    },
    /// Run check suites without writing meshes.
    Check {
        #[arg(short, long)]
        config: PathBuf,
        #[arg(long, value_enum, default_value = "all")]
        suite: SuiteArg,
    },
    /// Print the monodromy of one generating loop.
    Monodromy {
        #[arg(short, long)]
        config: PathBuf,
        #[arg(long = "loop")]
        index: usize,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum SuiteArg {
    Conformality,
    Closing,
    Hopf,
    All,
}

impl SuiteArg {
    fn suites(self) -> Vec<Suite> {
        match self {
            SuiteArg::Conformality => vec![Suite::Conformality],
            SuiteArg::Closing => vec![Suite::Closing],
            SuiteArg::Hopf => vec![Suite::Hopf],
            SuiteArg::All => Suite::ALL.to_vec(),
        }
    }
}

fn load(path: &Path) -> Result<JobConfig, LwrError> {
    let text = std::fs::read_to_string(path)?;
    parse_job(&text)
}

fn init_threads() -> Result<(), LwrError> {
    if let Ok(v) = std::env::var("LWR_THREADS") {
        let n: usize = v
            .trim()
            .parse()
            .ok()
            .filter(|n| *n > 0)
            .ok_or_else(|| LwrError::config("", format!("LWR_THREADS must be a positive integer, got {v:?}")))?;
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| LwrError::config("", format!("cannot configure thread pool: {e}")))?;
    }
    Ok(())
}

fn fmt_c(z: num_complex::Complex64) -> String {
    format!("{},{}", format_sci(z.re), format_sci(z.im))
}

fn run(cli: Cli) -> Result<bool, LwrError> {
    init_threads()?;
    match cli.command {
        Command::Generate { config } => {
            let job = load(&config)?;
            let suites = Suite::from_names(&job.suites);
            let report = run_prepared(&prepare(&job)?, &job, &suites)?;
            for line in report.summary() {
                println!("{line}");
            }
            let base = config.parent().unwrap_or(Path::new("."));
            for path in report.write_outputs(&job, base)? {
                println!("wrote={}", path.display());
            }
            Ok(report.passed())
        }
        Command::Check { config, suite } => {
            let job = load(&config)?;
            let report = run_prepared(&prepare(&job)?, &job, &suite.suites())?;
            for line in report.summary() {
                println!("{line}");
            }
            Ok(report.passed())
        }
        Command::Monodromy { config, index } => {
            let job = load(&config)?;
            let prepared = prepare(&job)?;
            let con = &prepared.construction;
            if index >= con.loops.len() {
                return Err(LwrError::config(
                    "",
                    format!("loop index {index} out of range; the surface has {} loops", con.loops.len()),
                ));
            }
            let ms = prepared.monodromies()?;
            let verdict = lwr::transform::check_closing(&ms, &con.ev, con.target, job.tolerances.closing);
            let m = &ms[index];
            println!("loop={index}");
            for (k, lambda) in m.lambdas.iter().enumerate() {
                let a = m.m[k];
                let (e1, e2) = a.eigenvalues();
                println!("lambda={}", fmt_c(*lambda));
                println!("m=[[{}],[{}]];[[{}],[{}]]", fmt_c(a.a), fmt_c(a.b), fmt_c(a.c), fmt_c(a.d));
                println!("eigenvalues={};{}", fmt_c(e1), fmt_c(e2));
                if let Some((_, d)) = m.derivatives.iter().find(|(j, _)| *j == k) {
                    println!("dm=[[{}],[{}]];[[{}],[{}]]", fmt_c(d.a), fmt_c(d.b), fmt_c(d.c), fmt_c(d.d));
                }
            }
            let v = &verdict.loops[index];
            println!("m0_residual={}", format_sci(v.m0_residual()));
            if let Some(r) = v.e3_residual {
                println!("e3_residual={}", format_sci(r));
            }
            if let Some(r) = v.h3_residual {
                println!("h3_residual={}", format_sci(r));
            }
            let ok = v.passes(con.target);
            println!("closing={}", if ok { "pass" } else { "fail" });
            Ok(ok)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
