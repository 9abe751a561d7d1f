use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use formulary_core::replace::{load_rules, rewrite_document, DEFAULT_MAX_PASSES};
use formulary_core::repo::{build, load_build, load_sources, RepoError, Repository, SourcePaths};
use formulary_core::search::{parse_query, SearchError};
use formulary_core::translate::export;
use formulary_core::ExportFormat;
use formulary_server::{bind, Config, DEFAULT_RESULTS};

#[derive(Parser)]
#[command(name = "formulary", version, about = "Build, search and serve a semantic formula repository")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check the dictionary, bibliography and seed files.
    Validate {
        srcdir: PathBuf,
        #[command(flatten)]
        paths: PathFlags,
    },
    /// Validate, then write pages, the search index and the manifest.
    Build {
        srcdir: PathBuf,
        outdir: PathBuf,
        #[command(flatten)]
        paths: PathFlags,
    },
    /// Rewrite plain LaTeX into semantic macros.
    Replace {
        rulefile: PathBuf,
        infile: PathBuf,
        outfile: PathBuf,
        #[arg(long, default_value_t = DEFAULT_MAX_PASSES)]
        max_passes: usize,
    },
    /// Query a built repository; prints `id<TAB>score` lines.
    Search {
        outdir: PathBuf,
        query: String,
        #[arg(long, default_value_t = DEFAULT_RESULTS)]
        k: usize,
    },
    /// Print one formula in an export format.
    Export {
        outdir: PathBuf,
        id: String,
        /// tex, semantic-tex, mathml, mathematica, maple or sage
        #[arg(long, default_value = "semantic-tex")]
        format: ExportFormat,
    },
    /// Serve the HTTP API and pages of a built repository.
    Serve {
        outdir: PathBuf,
        #[arg(long, default_value_t = 8080)]
        port: u16,
        /// Annotation log; defaults to annotations.log beside OUTDIR.
        #[arg(long)]
        annotations: Option<PathBuf>,
    },
}

#[derive(Args)]
struct PathFlags {
    /// Macro dictionary [default: SRCDIR/macros.dict]
    #[arg(long)]
    dict: Option<PathBuf>,
    /// Bibliography [default: SRCDIR/bibliography.bib]
    #[arg(long)]
    bib: Option<PathBuf>,
}

impl PathFlags {
    fn resolve(&self, srcdir: &Path) -> SourcePaths {
        let mut paths = SourcePaths::in_dir(srcdir);
        if let Some(d) = &self.dict {
            paths.dict = d.clone();
        }
        if let Some(b) = &self.bib {
            paths.bib = b.clone();
        }
        paths
    }
}

/// A failed command: exit 1 for content errors, 2 for usage and I/O.
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn content(message: impl ToString) -> Failure {
        Failure { code: 1, message: message.to_string() }
    }

    fn usage(message: impl ToString) -> Failure {
        Failure { code: 2, message: message.to_string() }
    }
}

impl From<RepoError> for Failure {
    fn from(e: RepoError) -> Failure {
        match e {
            RepoError::Content(issues) => {
                let mut message = String::new();
                for issue in &issues {
                    message.push_str(&format!("{issue}\n"));
                }
                message.push_str(&format!("{} errors", issues.len()));
                Failure::content(message)
            }
            other => Failure::usage(other),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("{}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn run(command: Command) -> Result<(), Failure> {
    match command {
        Command::Validate { srcdir, paths } => {
            let repo = load(&srcdir, &paths)?;
            println!("{} formulae, 0 errors", repo.records.len());
            Ok(())
        }
        Command::Build { srcdir, outdir, paths } => {
            let repo = load(&srcdir, &paths)?;
            let summary = build(&repo, &outdir)?;
            for (a, b) in &summary.duplicates {
                eprintln!("warning: duplicate formula: {a} and {b}");
            }
            println!("built {} pages in {}", summary.pages, outdir.display());
            Ok(())
        }
        Command::Replace { rulefile, infile, outfile, max_passes } => {
            replace(&rulefile, &infile, &outfile, max_passes)
        }
        Command::Search { outdir, query, k } => {
            let loaded = load_build(&outdir)?;
            let query = parse_query(&query, &loaded.repo.table).map_err(|e| match e {
                SearchError::BadQuery(_) => Failure::usage(e),
                other => Failure::content(other),
            })?;
            for (id, score) in loaded.index.execute(&query, k) {
                println!("{id}\t{score:.6}");
            }
            Ok(())
        }
        Command::Export { outdir, id, format } => {
            let loaded = load_build(&outdir)?;
            let record = loaded
                .repo
                .record(&id)
                .ok_or_else(|| Failure::content(format!("no formula with id {id}")))?;
            let text = export(record, format, &loaded.repo.table).map_err(Failure::content)?;
            println!("{text}");
            Ok(())
        }
        Command::Serve { outdir, port, annotations } => serve(outdir, port, annotations),
    }
}

fn load(srcdir: &Path, flags: &PathFlags) -> Result<Repository, Failure> {
    if !srcdir.is_dir() {
        return Err(Failure::usage(format!("{}: not a directory", srcdir.display())));
    }
    Ok(load_sources(&flags.resolve(srcdir))?)
}

fn replace(rulefile: &Path, infile: &Path, outfile: &Path, max_passes: usize) -> Result<(), Failure> {
    let read = |p: &Path| std::fs::read_to_string(p).map_err(|e| Failure::usage(format!("{}: {e}", p.display())));
    let rules = load_rules(&read(rulefile)?).map_err(|e| Failure::content(format!("{}: {e}", rulefile.display())))?;
    let input = read(infile)?;
    let (output, reports) = rewrite_document(&input, &rules, max_passes)
        .map_err(|e| Failure::content(format!("{}: {e}", infile.display())))?;
    std::fs::write(outfile, &output).map_err(|e| Failure::usage(format!("{}: {e}", outfile.display())))?;
    let mut total = 0;
    let mut passes = 0;
    for r in &reports {
        let n = r.report.applications.len();
        total += n;
        passes = passes.max(r.report.passes);
        if n > 0 {
            println!("{} {}: {n} applications in {} passes", r.source, r.tag, r.report.passes);
        }
    }
    println!("{} bodies, {total} applications, at most {passes} passes", reports.len());
    Ok(())
}

fn serve(outdir: PathBuf, port: u16, annotations: Option<PathBuf>) -> Result<(), Failure> {
    let mut config = Config::new(outdir);
    config.annotations = annotations;
    let runtime = tokio::runtime::Runtime::new().map_err(Failure::usage)?;
    runtime.block_on(async {
        let (addr, server) = bind(config, SocketAddr::from(([127, 0, 0, 1], port)))
            .await
            .map_err(Failure::usage)?;
        println!("listening on http://{addr}");
        server.await.map_err(Failure::usage)
    })
}
