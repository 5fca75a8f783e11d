mod commands;
mod config;
mod suite;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{CommandFactory, Parser, Subcommand, ValueEnum};
use contact_forge::contact::DiskModel;
use contact_forge::report::Report;
use contact_forge::words::BraidWord;

use crate::commands::MonodromyArgs;
use crate::config::Config;

const AFTER_HELP: &str = "\
Reports are JSON on stdout; exit status is 0 iff every check is PASS, 1 otherwise, 2 on usage errors.
Defaults come from --config, else the file named by CONTACT_FORGE_CONFIG (TOML, or JSON by extension).
Cutoff expressions and braid words follow the grammars in docs/grammar.md.";

#[derive(Parser, Debug)]
#[command(name = "contact-forge", version, about = "Verification reports for contact forms, braid monodromies and Milnor fibres", after_help = AFTER_HELP)]
struct Cli {
    /// Config file (TOML, or JSON when the extension is .json).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Also write the report to this file.
    #[arg(long, global = true, value_name = "PATH")]
    json: Option<PathBuf>,
    #[command(subcommand)]
    command: Cmd,
}

fn parse_matrix(s: &str) -> Result<[i64; 4], String> {
    let v: Vec<i64> =
        s.split(',').map(|x| x.trim().parse::<i64>().map_err(|e| format!("'{x}': {e}"))).collect::<Result<_, _>>()?;
    v.try_into().map_err(|v: Vec<i64>| format!("expected 4 entries a,b,c,d, got {}", v.len()))
}

fn parse_model(s: &str) -> Result<DiskModel, String> {
    s.parse().map_err(|_| format!("unknown model '{s}' (disk3d | disk5d)"))
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Suite {
    Desk,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Contact condition along the deformation family and its integrable limit.
    VerifyFamily {
        #[arg(long)]
        m: Option<i64>,
        /// Comma-separated t values in [0, 1].
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        t: Option<Vec<f64>>,
        #[arg(long)]
        grid: Option<usize>,
    },
    /// Symplectic cylinder over the mapping torus of a hyperbolic matrix.
    CheckAnosov {
        #[arg(long, value_parser = parse_matrix, allow_hyphen_values = true)]
        matrix: Option<[i64; 4]>,
        #[arg(long)]
        grid: Option<usize>,
    },
    /// Singular points of the characteristic foliation of a model disk.
    Charfol {
        #[arg(long, value_parser = parse_model)]
        model: DiskModel,
        #[arg(long)]
        seeds: Option<usize>,
    },
    /// Pullback identity and divergent integral of the plastikstufe family.
    CheckPlastikstufe {
        #[arg(long)]
        eps: Option<f64>,
        #[arg(long, value_parser = parse_matrix, allow_hyphen_values = true)]
        matrix: Option<[i64; 4]>,
    },
    /// Modified contactization of the boundary contact form of a mapping torus.
    VerifyContactization {
        #[arg(long)]
        eps: Option<f64>,
        #[arg(long, value_parser = parse_matrix, allow_hyphen_values = true)]
        matrix: Option<[i64; 4]>,
        #[arg(long)]
        grid: Option<usize>,
    },
    /// Braid monodromy of the critical values of f_{m,k}.
    BraidMonodromy {
        #[arg(long)]
        m: usize,
        #[arg(long, value_delimiter = ',', required = true)]
        k: Vec<u32>,
        #[arg(long)]
        eps: Option<f64>,
        /// Write the tracked root paths as CSV.
        #[arg(long, value_name = "PATH")]
        dump_paths: Option<PathBuf>,
        /// Additional braid word to compare against, e.g. "(s1 s2)^6 s1".
        #[arg(long)]
        expect: Option<String>,
        /// Re-run at doubled initial resolution and require the same word.
        #[arg(long)]
        doubling: bool,
    },
    /// SL(2,Z) utilities.
    Sl2 {
        #[command(subcommand)]
        op: Sl2Cmd,
    },
    /// Critical points of the Milnor fibre projection and its Euler characteristic.
    EulerChar {
        #[arg(long)]
        m: usize,
        #[arg(long, value_delimiter = ',', required = true)]
        k: Vec<u32>,
        #[arg(long)]
        delta: Option<f64>,
        #[arg(long)]
        radius: Option<f64>,
    },
    /// Exact resultant identity for m = 1.
    VerifyDiscriminant {
        #[arg(long, default_value_t = 1)]
        m: usize,
        #[arg(long)]
        k: u32,
    },
    /// Exact elimination identities for m = 2.
    VerifyM2 {
        #[arg(long, value_delimiter = ',', required = true)]
        k: Vec<u32>,
        #[arg(long)]
        delta: Option<f64>,
        #[arg(long)]
        radius: Option<f64>,
    },
    /// Runs a named suite of all checks.
    VerifyAll {
        #[arg(long, value_enum, default_value_t = Suite::Desk)]
        suite: Suite,
    },
    /// Prints the effective configuration as TOML.
    PrintConfig,
}

#[derive(Subcommand, Debug)]
enum Sl2Cmd {
    /// Conjugate a hyperbolic matrix to R L^{k_1} ... R L^{k_m}.
    NormalForm {
        #[arg(long, value_parser = parse_matrix, allow_hyphen_values = true)]
        matrix: [i64; 4],
    },
    /// Euler characteristic of the filling attached to A_{m,k}.
    Chi {
        #[arg(long)]
        m: usize,
        #[arg(long, value_delimiter = ',', required = true)]
        k: Vec<u32>,
    },
}

const GRAMMAR_HINT: &str = "Expression and braid-word grammars: docs/grammar.md";

fn exit_with(e: clap::Error) -> ! {
    let _ = e.print();
    if e.use_stderr() {
        eprintln!("{GRAMMAR_HINT}");
    }
    std::process::exit(e.exit_code())
}

fn usage(kind: ErrorKind, msg: impl std::fmt::Display) -> ! {
    exit_with(Cli::command().error(kind, msg))
}

fn check_mk(m: usize, k: &[u32]) {
    if !(1..=2).contains(&m) {
        usage(ErrorKind::ValueValidation, format!("--m must be 1 or 2, got {m}"));
    }
    if k.len() != m {
        usage(ErrorKind::ValueValidation, format!("--k needs {m} comma-separated exponents, got {}", k.len()));
    }
}

fn run(cmd: Cmd, mut cfg: Config) -> Report {
    match cmd {
        Cmd::VerifyFamily { m, t, grid } => {
            if let Some(m) = m {
                cfg.family.model.m = m;
            }
            if let Some(t) = t {
                cfg.family.ts = t;
            }
            if let Some(g) = grid {
                cfg.family.model.grid = g;
            }
            commands::family(&cfg)
        }
        Cmd::CheckAnosov { matrix, grid } => {
            cfg.anosov.matrix = matrix.unwrap_or(cfg.anosov.matrix);
            cfg.anosov.grid = grid.unwrap_or(cfg.anosov.grid);
            commands::anosov(&cfg)
        }
        Cmd::Charfol { model, seeds } => {
            cfg.charfol.search.seeds_per_axis = seeds.unwrap_or(cfg.charfol.search.seeds_per_axis);
            commands::charfol(&cfg, model)
        }
        Cmd::CheckPlastikstufe { eps, matrix } => {
            cfg.plastikstufe.eps = eps.unwrap_or(cfg.plastikstufe.eps);
            cfg.plastikstufe.matrix = matrix.unwrap_or(cfg.plastikstufe.matrix);
            commands::plastikstufe(&cfg)
        }
        Cmd::VerifyContactization { eps, matrix, grid } => {
            let sec = &mut cfg.contactization;
            sec.eps = eps.unwrap_or(sec.eps);
            sec.matrix = matrix.unwrap_or(sec.matrix);
            sec.grid = grid.unwrap_or(sec.grid);
            commands::contactization(&cfg)
        }
        Cmd::BraidMonodromy { m, k, eps, dump_paths, expect, doubling } => {
            check_mk(m, &k);
            cfg.monodromy.eps = eps.unwrap_or(cfg.monodromy.eps);
            let expect = expect.map(|src| {
                BraidWord::parse(&src, m + 2).unwrap_or_else(|e| {
                    usage(ErrorKind::ValueValidation, format!("--expect: {e} (braid grammar: docs/grammar.md)"))
                })
            });
            let args = MonodromyArgs { m, k, expect, dump_paths: dump_paths.as_deref(), doubling };
            commands::braid_monodromy(&cfg, &args)
        }
        Cmd::Sl2 { op: Sl2Cmd::NormalForm { matrix } } => commands::sl2_normal_form(&cfg, matrix),
        Cmd::Sl2 { op: Sl2Cmd::Chi { m, k } } => {
            if k.len() != m || m == 0 {
                usage(ErrorKind::ValueValidation, format!("--k needs {m} comma-separated exponents, got {}", k.len()));
            }
            commands::sl2_chi(&cfg, m, &k)
        }
        Cmd::EulerChar { m, k, delta, radius } => {
            check_mk(m, &k);
            cfg.milnor.delta = delta.unwrap_or(cfg.milnor.delta);
            cfg.milnor.radius = radius.unwrap_or(cfg.milnor.radius);
            commands::euler_char(&cfg, m, &k)
        }
        Cmd::VerifyDiscriminant { m, k } => {
            if m != 1 {
                usage(ErrorKind::ValueValidation, "verify-discriminant handles m = 1; use verify-m2 for m = 2");
            }
            commands::discriminant(&cfg, k)
        }
        Cmd::VerifyM2 { k, delta, radius } => {
            check_mk(2, &k);
            cfg.milnor.delta = delta.unwrap_or(cfg.milnor.delta);
            cfg.milnor.radius = radius.unwrap_or(cfg.milnor.radius);
            commands::m2(&cfg, k[0], k[1])
        }
        Cmd::VerifyAll { suite: Suite::Desk } => suite::run_suite("desk", &suite::desk_jobs(), &cfg),
        Cmd::PrintConfig => unreachable!("handled before dispatch"),
    }
}

fn write_report(report: &Report, path: Option<&Path>) -> std::io::Result<()> {
    let text = serde_json::to_string_pretty(report).expect("report serializes") + "\n";
    if let Some(p) = path {
        std::fs::write(p, &text)?;
    }
    print!("{text}");
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::try_parse().unwrap_or_else(|e| exit_with(e));
    let cfg = match Config::load(cli.config.as_deref()) {
        Ok(c) => c,
        Err(e) => usage(ErrorKind::InvalidValue, e),
    };
    if let Cmd::PrintConfig = cli.command {
        print!("{}", toml::to_string(&cfg).expect("config serializes"));
        return ExitCode::SUCCESS;
    }
    let report = run(cli.command, cfg);
    if let Err(e) = write_report(&report, cli.json.as_deref()) {
        eprintln!("error: cannot write report: {e}");
        return ExitCode::FAILURE;
    }
    if report.all_pass() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
