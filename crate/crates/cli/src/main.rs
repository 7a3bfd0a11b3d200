mod commands;
mod config;
mod report;
mod suites;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Result;
use clap::{Parser, Subcommand};
use heckekit::field::{Fp, Rational};
use heckekit::realization::FieldKind;

use commands::StdCheck;
use config::{FileConfig, Format, Overrides, RunConfig};

/// Computations in the diagrammatic Hecke category.
#[derive(Parser, Debug)]
#[command(name = "heckekit", version)]
struct Cli {
    /// JSON configuration document.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Built-in Cartan type such as A2, B2 or A1xA1.
    #[arg(long = "type", global = true)]
    cartan_type: Option<String>,
    /// Coefficient field: Q, F2, F3, F5, F7, F11 or F13.
    #[arg(long, global = true)]
    field: Option<String>,
    /// Degree window for Hom tables and perversity checks.
    #[arg(long, global = true)]
    window: Option<i32>,
    /// Subset of W: a list such as `e,s,st`, or `<=w`, `<w`.
    #[arg(long, global = true)]
    subset: Option<String>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Directory for the Kazhdan–Lusztig cache.
    #[arg(long, global = true)]
    cache: Option<PathBuf>,
    /// Worker threads for independent checks.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand, Debug)]
pub enum Cmd {
    /// Coxeter system, realization and validation summary.
    Info,
    /// Graded rank of Hom(B_v, B_w), optionally in the quotient for --subset.
    Homrank { v: String, w: String },
    /// Light leaves from a word to an element.
    Lightleaves { word: String, x: String },
    /// The Kazhdan–Lusztig polynomial P_{x,w}.
    Klpoly { x: String, w: String },
    /// Standard complex of a reduced word.
    Standard {
        word: String,
        #[arg(long, value_enum, value_delimiter = ',')]
        check: Vec<StdCheck>,
    },
    /// Costandard complex of a reduced word.
    Costandard {
        word: String,
        #[arg(long, value_enum, value_delimiter = ',')]
        check: Vec<StdCheck>,
    },
    /// Convolution of factors `D:word`, `N:word` or `B:word`, minimized.
    Convolve {
        #[arg(required = true, allow_hyphen_values = true)]
        factors: Vec<String>,
    },
    /// Perversity check of a convolution of factors.
    Perverse {
        #[arg(required = true)]
        factors: Vec<String>,
        /// Check in the right-equivariant category.
        #[arg(long)]
        re: bool,
    },
    /// Checks the simple candidate built from a reduced word.
    Simplecheck { word: String },
    /// Cone of the rex move between two reduced words.
    Rexcone { a: String, b: String },
    /// The Ringel functor applied to a costandard object.
    Ringel { x: String },
    /// Runs a verification suite (`all` for every suite).
    Verify {
        suite: String,
        /// Cartan type, overriding the configuration.
        #[arg(value_name = "TYPE")]
        type_name: Option<String>,
    },
}

impl Cmd {
    fn name(&self) -> &'static str {
        match self {
            Cmd::Info => "info",
            Cmd::Homrank { .. } => "homrank",
            Cmd::Lightleaves { .. } => "lightleaves",
            Cmd::Klpoly { .. } => "klpoly",
            Cmd::Standard { .. } => "standard",
            Cmd::Costandard { .. } => "costandard",
            Cmd::Convolve { .. } => "convolve",
            Cmd::Perverse { .. } => "perverse",
            Cmd::Simplecheck { .. } => "simplecheck",
            Cmd::Rexcone { .. } => "rexcone",
            Cmd::Ringel { .. } => "ringel",
            Cmd::Verify { .. } => "verify",
        }
    }
}

fn dispatch(cfg: &RunConfig, cmd: &Cmd) -> Result<report::Report> {
    match cfg.realization.field_kind()? {
        FieldKind::Rational => commands::run::<Rational>(cfg, cmd),
        FieldKind::Prime(2) => commands::run::<Fp<2>>(cfg, cmd),
        FieldKind::Prime(3) => commands::run::<Fp<3>>(cfg, cmd),
        FieldKind::Prime(5) => commands::run::<Fp<5>>(cfg, cmd),
        FieldKind::Prime(7) => commands::run::<Fp<7>>(cfg, cmd),
        FieldKind::Prime(11) => commands::run::<Fp<11>>(cfg, cmd),
        FieldKind::Prime(13) => commands::run::<Fp<13>>(cfg, cmd),
        FieldKind::Prime(p) => anyhow::bail!("unsupported characteristic {p}"),
    }
}

fn resolve(cli: &Cli) -> Result<RunConfig> {
    let file = cli.config.as_deref().map(FileConfig::load).transpose()?;
    let type_override = match &cli.cmd {
        Cmd::Verify { type_name: Some(t), .. } => Some(t.clone()),
        _ => cli.cartan_type.clone(),
    };
    let o = Overrides {
        cartan_type: type_override,
        field: cli.field.clone(),
        window: cli.window,
        subset: cli.subset.clone(),
        format: cli.format,
        cache: cli.cache.clone(),
        jobs: cli.jobs,
    };
    RunConfig::resolve(file, o)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let name = cli.cmd.name();
    let format = cli.format.unwrap_or(Format::Text);
    let outcome = resolve(&cli).and_then(|cfg| {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(cfg.jobs).build()?;
        let report = pool.install(|| dispatch(&cfg, &cli.cmd))?;
        Ok((cfg.format, report))
    });
    match outcome {
        Ok((format, report)) => {
            println!("{}", report.render(format));
            if report.ok() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            match format {
                Format::Json => println!("{}", report::error_json(name, &e)),
                Format::Text => eprintln!("error: {e:#}"),
            }
            ExitCode::from(2)
        }
    }
}
