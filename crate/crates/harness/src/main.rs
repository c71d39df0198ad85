use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use lzhm_core::complexity::max_distinct_parse;
use lzhm_core::entropy::DEFAULT_BLOCK_CAP;
use lzhm_core::markov::InitialDist;
use lzhm_harness::container::{self, Codec};
use lzhm_harness::epoch::{epoch_experiment, DEFAULT_TRACK_CAP};
use lzhm_harness::experiments::{rate_estimate, rate_experiment};
use lzhm_harness::model_file::{load_model, validation_report};
use lzhm_harness::textio::format_symbol_text;
use lzhm_harness::{Error, Result};

#[derive(Parser)]
#[command(
    name = "lzhm",
    version,
    about = "Compression laboratory for hidden Markov sources"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum CodecArg {
    Lz,
    Ih,
}

impl From<CodecArg> for Codec {
    fn from(value: CodecArg) -> Self {
        match value {
            CodecArg::Lz => Codec::Lz,
            CodecArg::Ih => Codec::Ih,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Validate a model file and report the chain's structure
    Validate { model: PathBuf },

    /// Sample a path from a model
    Sample {
        model: PathBuf,
        /// Number of symbols to draw
        #[arg(short = 'n', long = "length")]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Print tab-separated "symbol state" lines instead of symbol text
        #[arg(long)]
        with_states: bool,
        /// Write to a file instead of stdout
        #[arg(short, long)]
        out: Option<PathBuf>,
    },

    /// Compress a symbol text file into a container
    Compress {
        #[arg(long, value_enum)]
        codec: CodecArg,
        /// Model file supplying the alphabet (and, for ih, the codebook)
        #[arg(long)]
        model: PathBuf,
        /// Block length (required by the ih codec)
        #[arg(short = 'L', long = "block-len")]
        block_len: Option<usize>,
        input: PathBuf,
        output: PathBuf,
    },

    /// Decompress a container back into symbol text
    Decompress {
        /// Model file; must match the one used to compress
        #[arg(long)]
        model: Option<PathBuf>,
        input: PathBuf,
        output: PathBuf,
    },

    /// Compress stationary samples with both codecs across a ladder of
    /// lengths and seeds; write bits-per-symbol rows to a CSV file
    RateExperiment {
        model: PathBuf,
        /// Comma-separated sample lengths (each a multiple of the block length)
        #[arg(long, value_delimiter = ',', required = true)]
        lengths: Vec<usize>,
        #[arg(long, value_delimiter = ',', required = true)]
        seeds: Vec<u64>,
        #[arg(short = 'L', long = "block-len")]
        block_len: usize,
        /// Slack for the good-compressor threshold rate*(1+eps)
        #[arg(long, default_value_t = 0.25)]
        eps: f64,
        /// Estimation depth for hidden models (default: deepest within 2^16 blocks)
        #[arg(long)]
        rate_lmax: Option<usize>,
        #[arg(long)]
        csv: PathBuf,
    },

    /// Epoch concentration statistics; write per-seed rows to a CSV file
    EpochStats {
        model: PathBuf,
        #[arg(short = 'L', long = "block-len")]
        block_len: usize,
        /// Sample length (a multiple of the block length)
        #[arg(short = 'n', long = "length")]
        n: usize,
        #[arg(long, value_delimiter = ',', required = true)]
        seeds: Vec<u64>,
        /// Maximum number of tracked blocks
        #[arg(long, default_value_t = DEFAULT_TRACK_CAP)]
        track_cap: usize,
        #[arg(long)]
        csv: PathBuf,
    },

    /// Report the L-step mixing deficit max_a sum_b |p(b|a,L) - pi(b)|
    Mixing {
        model: PathBuf,
        #[arg(short = 'L', long = "block-len")]
        block_len: u32,
    },

    /// Check whether a block length is compressive: H_L + 1 <= rate*(1+eps)*L
    Compressive {
        model: PathBuf,
        #[arg(short = 'L', long = "block-len")]
        block_len: usize,
        #[arg(long)]
        eps: f64,
        /// Estimation depth for hidden models
        #[arg(long)]
        rate_lmax: Option<usize>,
    },

    /// Exact string complexity of a literal (each character one symbol)
    Complexity {
        string: String,
        /// Exact-search length cap
        #[arg(long, default_value_t = 24)]
        cap: usize,
    },
}

fn write_output(path: Option<&PathBuf>, content: &str) -> Result<()> {
    match path {
        Some(path) => std::fs::write(path, content).map_err(|source| Error::Io {
            path: path.clone(),
            source,
        }),
        None => {
            std::io::stdout()
                .write_all(content.as_bytes())
                .map_err(|source| Error::Io {
                    path: PathBuf::from("<stdout>"),
                    source,
                })
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Validate { model } => {
            let hmm = load_model(&model)?;
            let report = validation_report(&hmm)?;
            println!("states: {}", hmm.state_count());
            println!("alphabet: {:?}", hmm.alphabet().symbols());
            println!("row_stochastic: {}", report.row_stochastic);
            println!("irreducible: {}", report.irreducible);
            println!("aperiodic: {}", report.aperiodic);
            match report.period {
                Some(p) => println!("period: {p}"),
                None => println!("period: undefined (not irreducible)"),
            }
            let pi = hmm.chain().stationary_distribution()?;
            println!(
                "stationary: [{}]",
                pi.iter()
                    .map(|v| format!("{v:.6}"))
                    .collect::<Vec<_>>()
                    .join(", ")
            );
            Ok(())
        }

        Command::Sample {
            model,
            n,
            seed,
            with_states,
            out,
        } => {
            let hmm = load_model(&model)?;
            let path = hmm.sample_path(n, seed, InitialDist::Explicit)?;
            let content = if with_states {
                let mut s = String::new();
                for (sym, state) in path.symbols.iter().zip(&path.states) {
                    s.push_str(hmm.alphabet().symbol(*sym));
                    s.push('\t');
                    s.push_str(&state.to_string());
                    s.push('\n');
                }
                s
            } else {
                format_symbol_text(&path.symbols, hmm.alphabet())
            };
            write_output(out.as_ref(), &content)
        }

        Command::Compress {
            codec,
            model,
            block_len,
            input,
            output,
        } => {
            let hmm = load_model(&model)?;
            container::compress_file(&input, &output, &hmm, codec.into(), block_len)
        }

        Command::Decompress {
            model,
            input,
            output,
        } => {
            let model = model.ok_or(Error::ModelRequired)?;
            let hmm = load_model(&model)?;
            container::decompress_file(&input, &output, &hmm)
        }

        Command::RateExperiment {
            model,
            lengths,
            seeds,
            block_len,
            eps,
            rate_lmax,
            csv,
        } => {
            let hmm = load_model(&model)?;
            let experiment = rate_experiment(&hmm, &lengths, &seeds, block_len, eps, rate_lmax)?;
            write_output(Some(&csv), &experiment.to_csv())?;
            println!(
                "rate_estimate: {:.6} bits/symbol, threshold: {:.6}",
                experiment.rate_estimate, experiment.eps_threshold
            );
            for &n in &lengths {
                if let Some(median) = experiment.median_lz_bps(n) {
                    println!("n={n}: median lz_bps {median:.6}");
                }
            }
            Ok(())
        }

        Command::EpochStats {
            model,
            block_len,
            n,
            seeds,
            track_cap,
            csv,
        } => {
            let hmm = load_model(&model)?;
            let experiment = epoch_experiment(&hmm, block_len, n, &seeds, track_cap)?;
            write_output(Some(&csv), &experiment.to_csv())?;
            let worst_state = experiment
                .per_seed
                .iter()
                .map(|(_, s)| s.max_state_dev)
                .fold(0.0, f64::max);
            let worst_pair = experiment
                .per_seed
                .iter()
                .map(|(_, s)| s.max_pair_dev)
                .fold(0.0, f64::max);
            println!(
                "epochs: {}, tracked blocks: {}",
                experiment.epochs,
                experiment.expectations.tracked_blocks.len()
            );
            println!("worst state deviation: {worst_state:.6}");
            println!("worst pair deviation: {worst_pair:.6}");
            Ok(())
        }

        Command::Mixing { model, block_len } => {
            let hmm = load_model(&model)?;
            let deficit = hmm.chain().mixing_deficit(block_len)?;
            println!("mixing deficit at L={block_len}: {deficit:.12e}");
            Ok(())
        }

        Command::Compressive {
            model,
            block_len,
            eps,
            rate_lmax,
        } => {
            let hmm = load_model(&model)?;
            let rate = rate_estimate(&hmm, rate_lmax)?;
            let check = lzhm_core::entropy::compressive_check(
                &hmm,
                block_len,
                eps,
                rate,
                DEFAULT_BLOCK_CAP,
            )?;
            println!("rate: {rate:.6} bits/symbol");
            println!("H_{}: {:.6} bits", check.block_len, check.block_entropy);
            println!("budget rate*(1+eps)*L: {:.6} bits", check.budget);
            println!("compressive: {}", check.compressive);
            println!("minimum compressive L: {:.2}", check.min_block_len);
            Ok(())
        }

        Command::Complexity { string, cap } => {
            let symbols: Vec<u16> = {
                let mut chars: Vec<char> = string.chars().collect();
                let mut ordered = chars.clone();
                ordered.sort_unstable();
                ordered.dedup();
                chars
                    .drain(..)
                    .map(|c| ordered.binary_search(&c).unwrap() as u16)
                    .collect()
            };
            let (t, witness) = max_distinct_parse(&symbols, cap)?;
            println!("complexity: {t}");
            let mut start = 0;
            let chars: Vec<char> = string.chars().collect();
            for piece in &witness.pieces {
                let text: String = chars[start..start + piece.len()].iter().collect();
                println!("  {text:?}");
                start += piece.len();
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::FAILURE
        }
    }
}
