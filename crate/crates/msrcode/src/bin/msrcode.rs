//! Command-line front end: construct codes, encode files across node files,
//! corrupt/repair/reconstruct, report metrics, and tabulate the column-length
//! trade-off. All node indices are 0-based. Commands exit nonzero on any
//! verification failure.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use msrcode::construction::{
    build_general, build_general_auto, build_optimal_update, build_optimal_update_auto,
    build_two_parity, CodeSpec,
};
use msrcode::store::NodeStore;
use msrcode::verify::compute_metrics;
use msrcode::{access_lowering, Field};

#[derive(Parser)]
#[command(
    name = "msrcode",
    version,
    about = "MDS array codes with optimal repair bandwidth"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum FamilyArg {
    General,
    TwoParity,
    OptimalUpdate,
}

#[derive(Subcommand)]
enum Command {
    /// Build a code, verify it, and write its JSON description.
    Construct {
        #[arg(long, value_enum)]
        family: FamilyArg,
        /// Number of parity nodes (general family only; the others fix r = 2).
        #[arg(short, long)]
        r: Option<usize>,
        #[arg(short, long)]
        m: usize,
        /// Prime field order; omitted: smallest field that works.
        #[arg(short = 'q', long)]
        field: Option<u32>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Apply the access-lowering change of basis to the result.
        #[arg(long)]
        lower_access: bool,
        #[arg(short, long, default_value = "codespec.json")]
        out: PathBuf,
    },
    /// Encode a file into a node-file store directory.
    Encode {
        #[arg(long)]
        codespec: PathBuf,
        input: PathBuf,
        store: PathBuf,
        /// Skip re-verification of the code (benchmarking only).
        #[arg(long)]
        skip_verify: bool,
    },
    /// Delete node files, simulating failures.
    Corrupt {
        store: PathBuf,
        #[arg(required = true)]
        nodes: Vec<usize>,
    },
    /// Repair a single missing node with optimal bandwidth.
    Repair {
        store: PathBuf,
        node: usize,
        /// Write the repair transcript as JSON.
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Restore all missing nodes (at most r).
    Reconstruct { store: PathBuf },
    /// Decode the original file from a complete store.
    Decode { store: PathBuf, output: PathBuf },
    /// Verify a code and print its metrics as JSON.
    Metrics { codespec: PathBuf },
    /// CSV table of column length l against parity count r for fixed k.
    Tradeoff {
        #[arg(short)]
        k: u64,
        #[arg(long)]
        max_r: u64,
    },
}

fn load_codespec(path: &PathBuf) -> Result<CodeSpec, msrcode::Error> {
    CodeSpec::from_json(&fs::read_to_string(path)?)
}

fn run() -> Result<(), msrcode::Error> {
    let cli = Cli::parse();
    match cli.command {
        Command::Construct {
            family,
            r,
            m,
            field,
            seed,
            lower_access,
            out,
        } => {
            let mut code = match family {
                FamilyArg::General => {
                    let r = r.unwrap_or(2);
                    match field {
                        Some(q) => build_general(r, m, Field::prime(q)?, seed, 4096)?,
                        None => build_general_auto(r, m, seed)?,
                    }
                }
                FamilyArg::TwoParity => build_two_parity(m)?,
                FamilyArg::OptimalUpdate => match field {
                    Some(q) => build_optimal_update(m, Field::prime(q)?, seed, 4096)?,
                    None => build_optimal_update_auto(m, seed)?,
                },
            };
            if lower_access {
                code = access_lowering(&code)?;
            }
            let metrics = compute_metrics(&code)?;
            fs::write(&out, code.to_json()?)?;
            println!(
                "({}, {}, {}) code over field of order {}",
                code.n(),
                code.k,
                code.l,
                code.field.order()
            );
            println!(
                "{}",
                serde_json::to_string_pretty(&metrics).expect("metrics serialize")
            );
            if !metrics.mds || !metrics.subspace_property {
                return Err(msrcode::Error::NotMds(
                    "constructed code failed verification".into(),
                ));
            }
            println!("wrote {}", out.display());
        }
        Command::Encode {
            codespec,
            input,
            store,
            skip_verify,
        } => {
            let code = load_codespec(&codespec)?;
            let bytes = fs::read(&input)?;
            let s = NodeStore::create(&store, &code, &bytes, skip_verify)?;
            println!(
                "encoded {} bytes into {} stripes across {} nodes (expansion {:.2}x)",
                bytes.len(),
                s.manifest.stripes,
                code.n(),
                s.manifest.expansion_factor
            );
        }
        Command::Corrupt { store, nodes } => {
            let s = NodeStore::open(&store)?;
            s.corrupt(&nodes)?;
            println!("deleted node files {nodes:?}");
        }
        Command::Repair {
            store,
            node,
            report,
        } => {
            let s = NodeStore::open(&store)?;
            let rep = s.repair(node)?;
            let json = serde_json::to_string_pretty(&rep).expect("report serialize");
            if let Some(path) = report {
                fs::write(path, &json)?;
            }
            println!(
                "repaired node {node}: transmitted {}/{} surviving symbols (fraction {}, optimal: {})",
                rep.symbols_transmitted,
                rep.surviving_symbols,
                rep.bandwidth_fraction,
                rep.bandwidth_optimal
            );
            s.verify_checksums()?;
        }
        Command::Reconstruct { store } => {
            let s = NodeStore::open(&store)?;
            let restored = s.reconstruct()?;
            s.verify_checksums()?;
            println!("restored nodes {restored:?}");
        }
        Command::Decode { store, output } => {
            let s = NodeStore::open(&store)?;
            let bytes = s.decode()?;
            fs::write(&output, &bytes)?;
            println!("decoded {} bytes to {}", bytes.len(), output.display());
        }
        Command::Metrics { codespec } => {
            let code = load_codespec(&codespec)?;
            let metrics = compute_metrics(&code)?;
            println!(
                "{}",
                serde_json::to_string_pretty(&metrics).expect("metrics serialize")
            );
            if !metrics.mds || !metrics.subspace_property {
                return Err(msrcode::Error::NotMds("code failed verification".into()));
            }
        }
        Command::Tradeoff { k, max_r } => {
            println!("r,l_highrate,l_lowrate");
            for r in 1..=max_r {
                // High-rate regime: l = r^(k/(r+1)) (fractional exponents
                // rounded to the nearest integer for display); low-rate
                // constructions achieve l = r.
                let l_high = (r as f64).powf(k as f64 / (r as f64 + 1.0)).round() as u64;
                println!("{r},{l_high},{r}");
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run() {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
