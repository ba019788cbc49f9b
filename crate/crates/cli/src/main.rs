use std::io::Read;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use comvar::analysis::{
    self, analyze, build_document, components, count_document, lift_document, presets,
};
use comvar::document::parse_document;

/// Exact computations with complexes of projective modules over bound
/// quiver algebras: rank strata, homology realizations, fibre dimensions,
/// irreducible components, and finite-field point counts.
#[derive(Parser)]
#[command(name = "comvar", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Profile, fibre dimensions and the dimension calculus of an instance.
    Analyze {
        /// Instance document (JSON file, or `-` for stdin).
        doc: PathBuf,
        /// Emit the machine-readable report.
        #[arg(long)]
        json: bool,
        /// Override the document seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Override the enumeration budget.
        #[arg(long)]
        budget: Option<u128>,
    },
    /// Irreducible components of the presentable homology locus.
    Components {
        doc: PathBuf,
        #[arg(long)]
        json: bool,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        budget: Option<u128>,
    },
    /// Lift the document's complex payload to a point with explicit homology.
    Lift {
        doc: PathBuf,
        #[arg(long)]
        json: bool,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Resolve the document's homology payload into a complex with the
    /// requested rank profile.
    Build {
        doc: PathBuf,
        #[arg(long)]
        json: bool,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Exhaustive point counts over the document's primes, binned by rank
    /// profile, with exact count polynomials.
    Count {
        doc: PathBuf,
        #[arg(long)]
        json: bool,
        /// Comma-separated primes overriding the document.
        #[arg(long, value_delimiter = ',')]
        primes: Option<Vec<u64>>,
        #[arg(long)]
        budget: Option<u128>,
    },
    /// Print a built-in example document (no id: list them).
    Preset { id: Option<String> },
}

fn read_doc(path: &PathBuf) -> Result<String, String> {
    if path.as_os_str() == "-" {
        let mut buf = String::new();
        std::io::stdin()
            .read_to_string(&mut buf)
            .map_err(|e| format!("stdin: {e}"))?;
        Ok(buf)
    } else {
        std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))
    }
}

fn run() -> Result<i32, (i32, String)> {
    let cli = Cli::parse();
    let usage = |msg: String| (1, msg);
    let from_err = |e: comvar::Error| (e.exit_code(), e.to_string());

    match cli.command {
        Command::Preset { id } => {
            match id {
                None => {
                    for p in presets() {
                        println!("{:<16} {}", p.id, p.title);
                    }
                }
                Some(id) => {
                    let preset = presets()
                        .into_iter()
                        .find(|p| p.id == id)
                        .ok_or_else(|| (1, format!("unknown preset `{id}`")))?;
                    print!("{}", preset.json);
                }
            }
            Ok(0)
        }
        Command::Analyze {
            doc,
            json,
            seed,
            budget,
        } => {
            let text = read_doc(&doc).map_err(usage)?;
            let mut doc = parse_document(&text).map_err(from_err)?;
            if let Some(s) = seed {
                doc.seed = s;
            }
            if let Some(b) = budget {
                doc.budgets.enumeration = b;
            }
            let report = analyze(&doc).map_err(from_err)?;
            if json {
                println!("{}", serde_json::to_string_pretty(&report).unwrap());
            } else {
                print!("{}", analysis::render_analyze(&report));
            }
            Ok(report.exit_status())
        }
        Command::Components {
            doc,
            json,
            seed,
            budget,
        } => {
            let text = read_doc(&doc).map_err(usage)?;
            let mut doc = parse_document(&text).map_err(from_err)?;
            if let Some(s) = seed {
                doc.seed = s;
            }
            if let Some(b) = budget {
                doc.budgets.enumeration = b;
            }
            let report = components(&doc).map_err(from_err)?;
            if json {
                println!("{}", serde_json::to_string_pretty(&report).unwrap());
            } else {
                print!("{}", analysis::render_components(&report));
            }
            Ok(0)
        }
        Command::Lift { doc, json, seed } => {
            let text = read_doc(&doc).map_err(usage)?;
            let mut doc = parse_document(&text).map_err(from_err)?;
            if let Some(s) = seed {
                doc.seed = s;
            }
            let report = lift_document(&doc).map_err(from_err)?;
            if json {
                println!("{}", serde_json::to_string_pretty(&report).unwrap());
            } else {
                print!("{}", analysis::render_lift(&report));
            }
            Ok(0)
        }
        Command::Build { doc, json, seed } => {
            let text = read_doc(&doc).map_err(usage)?;
            let mut doc = parse_document(&text).map_err(from_err)?;
            if let Some(s) = seed {
                doc.seed = s;
            }
            let report = build_document(&doc).map_err(from_err)?;
            if json {
                println!("{}", serde_json::to_string_pretty(&report).unwrap());
            } else {
                print!("{}", analysis::render_build(&report));
            }
            Ok(0)
        }
        Command::Count {
            doc,
            json,
            primes,
            budget,
        } => {
            let text = read_doc(&doc).map_err(usage)?;
            let mut doc = parse_document(&text).map_err(from_err)?;
            if let Some(b) = budget {
                doc.budgets.enumeration = b;
            }
            let report = count_document(&doc, primes.as_deref()).map_err(from_err)?;
            if json {
                println!("{}", serde_json::to_string_pretty(&report).unwrap());
            } else {
                print!("{}", analysis::render_count(&report));
            }
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    match run() {
        Ok(code) => ExitCode::from(code as u8),
        Err((code, msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(code as u8)
        }
    }
}
