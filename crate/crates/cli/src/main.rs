mod bench;
mod input;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use gdcan::preset::train;
use gdcan::record::write_raw_log;
use gdcan::{
    capacity_for, compress_records, compressed_size_report, decompress_records, mdf4, Accounting,
    Chunking, ChunkingConfig, CodecConfig, DynamicDictionary, Error, FingerprintAlgo, Mode, Result,
    SizeReport,
};

use input::parse_budget;

#[derive(Parser)]
#[command(name = "gdcan", version, about = "Compress CAN-bus logs under RAM and flash budgets")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compress an .mf4 or .gdr log into a .gdcb container.
    Compress(CompressArgs),
    /// Restore a .gdcb container to a .gdr log (or .mf4 if the output says so).
    Decompress(DecompressArgs),
    /// Build a preset dictionary pair (.gdpd for compressing, .gdpb for decompressing).
    Train(TrainArgs),
    /// Report gains over a grid of modes and budgets.
    Bench(BenchArgs),
}

#[derive(Clone, Copy, Default, ValueEnum)]
enum ReportFormat {
    #[default]
    Text,
    Kv,
}

/// Settings that shape the chunk stream and must match between training and use.
#[derive(Args)]
struct StreamArgs {
    /// half, full or multi:N
    #[arg(long, default_value = "half")]
    chunking: Chunking,
    /// crc32 or fnv64
    #[arg(long = "fp", default_value = "crc32")]
    fp: FingerprintAlgo,
    /// Store absolute timestamps instead of differences.
    #[arg(long)]
    no_delta_ts: bool,
}

impl StreamArgs {
    fn config(&self, mode: Mode) -> Result<CodecConfig> {
        Ok(CodecConfig {
            mode,
            chunking: ChunkingConfig::new(self.chunking)?,
            algo: self.fp,
            delta_timestamps: !self.no_delta_ts,
        })
    }
}

#[derive(Args)]
struct CompressArgs {
    input: PathBuf,
    #[arg(short, long)]
    output: Option<PathBuf>,
    /// ram, flash or hybrid
    #[arg(long, default_value = "ram")]
    mode: Mode,
    /// RAM budget for the dynamic dictionary, e.g. 20k.
    #[arg(long, default_value = "20k", value_parser = parse_budget)]
    ram: usize,
    /// Preset dictionary (.gdpd or .gdpb); required by flash and hybrid.
    #[arg(long)]
    dict: Option<PathBuf>,
    /// paper or uniform
    #[arg(long, default_value = "uniform")]
    accounting: Accounting,
    #[command(flatten)]
    stream: StreamArgs,
    #[arg(long, value_enum, default_value_t)]
    report: ReportFormat,
}

#[derive(Args)]
struct DecompressArgs {
    input: PathBuf,
    /// Output path; a .mf4 extension writes an MDF4 file instead of a raw log.
    #[arg(short, long)]
    output: Option<PathBuf>,
    /// Decompressor-side dictionary (.gdpb) for flash and hybrid containers.
    #[arg(long)]
    dict: Option<PathBuf>,
}

#[derive(Args)]
struct TrainArgs {
    #[arg(required = true)]
    inputs: Vec<PathBuf>,
    /// Flash budget for the compressor-side dictionary, e.g. 10k.
    #[arg(long, value_parser = parse_budget)]
    flash: usize,
    /// Output path stem; writes STEM.gdpd and STEM.gdpb.
    #[arg(long, default_value = "dict")]
    dict_out: PathBuf,
    #[command(flatten)]
    stream: StreamArgs,
    #[arg(long, value_enum, default_value_t)]
    report: ReportFormat,
}

#[derive(Args)]
struct BenchArgs {
    #[arg(required = true)]
    inputs: Vec<PathBuf>,
    /// Comma-separated modes.
    #[arg(long, value_delimiter = ',', default_value = "ram,flash,hybrid")]
    mode: Vec<Mode>,
    /// Comma-separated RAM budgets.
    #[arg(long, value_delimiter = ',', default_value = "1k,20k,100k", value_parser = parse_budget)]
    ram: Vec<usize>,
    /// Comma-separated flash budgets.
    #[arg(long, value_delimiter = ',', default_value = "0,10k,100k", value_parser = parse_budget)]
    flash: Vec<usize>,
    /// Files to train the preset on; defaults to the inputs themselves.
    #[arg(long, num_args = 1..)]
    train: Vec<PathBuf>,
    /// External compressor reading stdin and writing stdout, e.g. "xz -9".
    /// Repeatable.
    #[arg(long)]
    external: Vec<String>,
    #[arg(long, default_value = "uniform")]
    accounting: Accounting,
    #[command(flatten)]
    stream: StreamArgs,
    #[arg(long, value_enum, default_value_t)]
    report: ReportFormat,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Compress(a) => cmd_compress(a),
        Command::Decompress(a) => cmd_decompress(a),
        Command::Train(a) => cmd_train(a),
        Command::Bench(a) => cmd_bench(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error[{}]: {e}", e.category());
            ExitCode::FAILURE
        }
    }
}

fn gain_str(gain: Option<f64>) -> String {
    gain.map_or_else(|| "n/a".into(), |g| format!("{g:.3}"))
}

fn print_report(input: &Path, output: &Path, r: &SizeReport, format: ReportFormat) {
    let h = &r.header;
    match format {
        ReportFormat::Text => {
            println!(
                "{} -> {}: {} records, {} B -> {} B, gain {}",
                input.display(),
                output.display(),
                h.record_count,
                r.raw_bytes,
                r.total_bytes,
                gain_str(r.gain)
            );
            println!(
                "  mode {}, chunking {} {}, fingerprint {}, delta timestamps {}",
                h.mode,
                h.chunking.chunking,
                h.chunking.code,
                h.algo,
                if h.delta_timestamps { "on" } else { "off" }
            );
            println!(
                "  tokens: {} primary refs, {} RAM refs, {} new bases ({} B), {} resets",
                r.tokens.ref_primary, r.tokens.ref_ram, r.tokens.new_basis, r.basis_bytes, r.tokens.reset
            );
        }
        ReportFormat::Kv => {
            let lines = [
                ("input", input.display().to_string()),
                ("output", output.display().to_string()),
                ("mode", h.mode.to_string()),
                ("chunking", h.chunking.chunking.to_string()),
                ("code", h.chunking.code.to_string()),
                ("fp", h.algo.to_string()),
                ("delta_ts", (h.delta_timestamps as u8).to_string()),
                ("dict_id", format!("{:016x}", h.dict_id)),
                ("records", h.record_count.to_string()),
                ("raw_bytes", r.raw_bytes.to_string()),
                ("compressed_bytes", r.total_bytes.to_string()),
                ("gain", r.gain.map_or_else(|| "n/a".into(), |g| format!("{g:.6}"))),
                ("ref_primary", r.tokens.ref_primary.to_string()),
                ("ref_ram", r.tokens.ref_ram.to_string()),
                ("new_basis", r.tokens.new_basis.to_string()),
                ("basis_bytes", r.basis_bytes.to_string()),
                ("reset", r.tokens.reset.to_string()),
            ];
            for (k, v) in lines {
                println!("{k}={v}");
            }
        }
    }
}

fn cmd_compress(a: CompressArgs) -> Result<()> {
    let config = a.stream.config(a.mode)?;
    let preset = match (a.mode.uses_preset(), &a.dict) {
        (true, Some(path)) => Some(input::read_dictionary(path)?),
        (true, None) => return Err(Error::Config(format!("{} mode needs --dict", a.mode))),
        (false, Some(_)) => return Err(Error::Config(format!("{} mode takes no --dict", a.mode))),
        (false, None) => None,
    };
    let records = input::read_records(&a.input)?;
    let mut dynamic = a
        .mode
        .uses_dynamic()
        .then(|| DynamicDictionary::new(capacity_for(a.ram, config.algo.len(), a.accounting)));
    let container = compress_records(&records, &config, preset.as_ref(), dynamic.as_mut())?;
    let output = input::output_path(a.output.as_deref(), &a.input, "gdcb");
    input::write(&output, &container)?;
    print_report(&a.input, &output, &compressed_size_report(&container)?, a.report);
    Ok(())
}

fn cmd_decompress(a: DecompressArgs) -> Result<()> {
    let container = std::fs::read(&a.input)
        .map_err(|e| Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", a.input.display()))))?;
    let preset = a.dict.as_deref().map(input::read_dictionary).transpose()?;
    let (_, records) = decompress_records(&container, preset.as_ref())?;
    let output = input::output_path(a.output.as_deref(), &a.input, "gdr");
    let bytes = if output.extension().is_some_and(|e| e.eq_ignore_ascii_case("mf4")) {
        mdf4::write_fixture(&records)
    } else {
        let mut buf = Vec::with_capacity(records.len() * gdcan::RECORD_LEN);
        write_raw_log(&mut buf, &records)?;
        buf
    };
    input::write(&output, &bytes)?;
    println!("{} -> {}: {} records", a.input.display(), output.display(), records.len());
    Ok(())
}

fn cmd_train(a: TrainArgs) -> Result<()> {
    let config = a.stream.config(Mode::FlashOnly)?;
    let chunk_files = a
        .inputs
        .iter()
        .map(|p| {
            let records = input::read_records(p)?;
            Ok(gdcan::codec::records_to_chunks(&records, config.delta_timestamps, &config.chunking))
        })
        .collect::<Result<Vec<_>>>()?;
    let dict = train(chunk_files.iter().map(|c| c.iter()), a.flash, &config.chunking.code, config.algo)?;
    let gdpd = a.dict_out.with_extension("gdpd");
    let gdpb = a.dict_out.with_extension("gdpb");
    input::write(&gdpd, &dict.to_compressor_bytes())?;
    input::write(&gdpb, &dict.to_decompressor_bytes()?)?;
    match a.report {
        ReportFormat::Text => println!(
            "{} entries ({} {}, {}), dict id {:016x}: {}, {}",
            dict.len(),
            config.chunking.chunking,
            dict.code(),
            dict.algo(),
            dict.dict_id(),
            gdpd.display(),
            gdpb.display()
        ),
        ReportFormat::Kv => {
            println!("entries={}", dict.len());
            println!("dict_id={:016x}", dict.dict_id());
            println!("chunking={}", config.chunking.chunking);
            println!("code={}", dict.code());
            println!("fp={}", dict.algo());
            println!("compressor_dict={}", gdpd.display());
            println!("decompressor_dict={}", gdpb.display());
        }
    }
    Ok(())
}

fn cmd_bench(a: BenchArgs) -> Result<()> {
    let config = a.stream.config(Mode::RamOnly)?;
    let files = a
        .inputs
        .iter()
        .map(|p| Ok((p.clone(), input::read_records(p)?)))
        .collect::<Result<Vec<_>>>()?;
    let bench = bench::Bench {
        config,
        accounting: a.accounting,
        points: bench::grid(&a.mode, &a.ram, &a.flash),
        externals: &a.external,
    };
    let needs_preset = bench.points.iter().any(|p| p.flash.is_some());
    let ranked = if !needs_preset {
        Vec::new()
    } else if a.train.is_empty() {
        bench.rank(&files.iter().map(|(_, r)| r.as_slice()).collect::<Vec<_>>())?
    } else {
        let corpus = a.train.iter().map(|p| input::read_records(p)).collect::<Result<Vec<_>>>()?;
        bench.rank(&corpus.iter().map(Vec::as_slice).collect::<Vec<_>>())?
    };
    let rows = bench.run(&files, &ranked)?;
    match a.report {
        ReportFormat::Text => bench::print_text(&rows),
        ReportFormat::Kv => bench::print_kv(&rows),
    }
    Ok(())
}
