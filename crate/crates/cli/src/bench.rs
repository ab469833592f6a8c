use std::io::Write;
use std::path::PathBuf;
use std::process::{Command, Stdio};

use gdcan::preset::{count_frequencies, merge_round_robin, truncate_to_flash, RankedEntry};
use gdcan::{
    capacity_for, compress, compression_gain, Accounting, Bits, CanRecord, CodecConfig,
    DynamicDictionary, Mode, PresetDictionary, Result, RECORD_LEN,
};
use rayon::prelude::*;

/// One point of the budget grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GridPoint {
    pub mode: Mode,
    pub ram: Option<usize>,
    pub flash: Option<usize>,
}

pub fn grid(modes: &[Mode], rams: &[usize], flashes: &[usize]) -> Vec<GridPoint> {
    let mut out = Vec::new();
    for &mode in modes {
        let rams: Vec<Option<usize>> = if mode.uses_dynamic() {
            rams.iter().copied().map(Some).collect()
        } else {
            vec![None]
        };
        let flashes: Vec<Option<usize>> = if mode.uses_preset() {
            flashes.iter().copied().map(Some).collect()
        } else {
            vec![None]
        };
        for &ram in &rams {
            for &flash in &flashes {
                out.push(GridPoint { mode, ram, flash });
            }
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub label: String,
    pub point: Option<GridPoint>,
    pub files: usize,
    /// (avg, min, max) over files with a defined gain.
    pub gains: Option<(f64, f64, f64)>,
}

fn summarize(gains: &[Option<f64>]) -> Option<(f64, f64, f64)> {
    let defined: Vec<f64> = gains.iter().flatten().copied().collect();
    if defined.is_empty() {
        return None;
    }
    let avg = defined.iter().sum::<f64>() / defined.len() as f64;
    let min = defined.iter().copied().fold(f64::INFINITY, f64::min);
    let max = defined.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    Some((avg, min, max))
}

pub struct Bench<'a> {
    pub config: CodecConfig,
    pub accounting: Accounting,
    pub points: Vec<GridPoint>,
    pub externals: &'a [String],
}

impl Bench<'_> {
    /// Ranked preset candidates from a training corpus, one list per file.
    pub fn rank(&self, corpus: &[&[CanRecord]]) -> Result<Vec<RankedEntry>> {
        let per_file = corpus
            .par_iter()
            .map(|records| {
                let chunks = self.chunks(records);
                count_frequencies(&chunks, &self.config.chunking.code, self.config.algo)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(merge_round_robin(&per_file))
    }

    fn chunks(&self, records: &[CanRecord]) -> Vec<Bits> {
        gdcan::codec::records_to_chunks(records, self.config.delta_timestamps, &self.config.chunking)
    }

    pub fn run(&self, files: &[(PathBuf, Vec<CanRecord>)], ranked: &[RankedEntry]) -> Result<Vec<Row>> {
        let mut flashes: Vec<usize> = self.points.iter().filter_map(|p| p.flash).collect();
        flashes.sort_unstable();
        flashes.dedup();
        let presets = flashes
            .iter()
            .map(|&f| {
                let dict = truncate_to_flash(ranked, f, &self.config.chunking.code, self.config.algo)?;
                Ok((f, dict.compressor_side()))
            })
            .collect::<Result<Vec<(usize, PresetDictionary)>>>()?;
        let preset_for = |f: usize| presets.iter().find(|(b, _)| *b == f).map(|(_, d)| d);

        // gains[file][point]
        let gains = files
            .par_iter()
            .map(|(_, records)| {
                let chunks = self.chunks(records);
                self.points
                    .iter()
                    .map(|p| {
                        let config = CodecConfig { mode: p.mode, ..self.config.clone() };
                        let mut dynamic = p.ram.map(|r| {
                            DynamicDictionary::new(capacity_for(r, config.algo.len(), self.accounting))
                        });
                        let preset = p.flash.and_then(preset_for);
                        let out = compress(&chunks, &config, records.len() as u64, preset, dynamic.as_mut())?;
                        Ok(compression_gain((records.len() * RECORD_LEN) as u64, out.len() as u64))
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;

        let mut rows: Vec<Row> = self
            .points
            .iter()
            .enumerate()
            .map(|(i, p)| {
                let column: Vec<Option<f64>> = gains.iter().map(|g| g[i]).collect();
                Row {
                    label: p.mode.to_string(),
                    point: Some(*p),
                    files: files.len(),
                    gains: summarize(&column),
                }
            })
            .collect();

        for cmd in self.externals {
            match self.external(cmd, files) {
                Ok(column) => rows.push(Row {
                    label: format!("external:{cmd}"),
                    point: None,
                    files: files.len(),
                    gains: summarize(&column),
                }),
                Err(why) => eprintln!("warning: external compressor {cmd:?} skipped: {why}"),
            }
        }
        Ok(rows)
    }

    /// Gains of an external compressor fed the same (delta-coded) raw records.
    fn external(&self, cmd: &str, files: &[(PathBuf, Vec<CanRecord>)]) -> std::result::Result<Vec<Option<f64>>, String> {
        let mut parts = cmd.split_whitespace();
        let program = parts.next().ok_or("empty command")?;
        let args: Vec<&str> = parts.collect();
        files
            .par_iter()
            .map(|(_, records)| {
                let mut coded = records.clone();
                if self.config.delta_timestamps {
                    gdcan::record::delta_encode_timestamps(&mut coded);
                }
                let raw: Vec<u8> = coded.iter().flat_map(|r| r.to_bytes()).collect();
                let out_len = pipe_through(program, &args, raw)?;
                Ok(compression_gain((records.len() * RECORD_LEN) as u64, out_len as u64))
            })
            .collect()
    }
}

fn pipe_through(program: &str, args: &[&str], input: Vec<u8>) -> std::result::Result<usize, String> {
    let mut child = Command::new(program)
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::null())
        .spawn()
        .map_err(|e| e.to_string())?;
    let mut stdin = child.stdin.take().expect("piped stdin");
    let writer = std::thread::spawn(move || stdin.write_all(&input));
    let output = child.wait_with_output().map_err(|e| e.to_string())?;
    writer
        .join()
        .map_err(|_| "writer thread panicked".to_string())?
        .map_err(|e| e.to_string())?;
    if !output.status.success() {
        return Err(format!("exited with {}", output.status));
    }
    Ok(output.stdout.len())
}

fn budget(b: Option<usize>) -> String {
    b.map_or_else(|| "-".into(), |b| b.to_string())
}

pub fn print_text(rows: &[Row]) {
    println!("{:<24} {:>10} {:>10} {:>6} {:>8} {:>8} {:>8}", "mode", "ram", "flash", "files", "avg", "min", "max");
    for row in rows {
        let (ram, flash) = row.point.map_or(("-".into(), "-".into()), |p| (budget(p.ram), budget(p.flash)));
        let [avg, min, max] = match row.gains {
            Some((a, lo, hi)) => [a, lo, hi].map(|g| format!("{g:.3}")),
            None => ["n/a"; 3].map(String::from),
        };
        println!("{:<24} {ram:>10} {flash:>10} {:>6} {avg:>8} {min:>8} {max:>8}", row.label, row.files);
    }
}

pub fn print_kv(rows: &[Row]) {
    for row in rows {
        let (ram, flash) = row.point.map_or(("-".into(), "-".into()), |p| (budget(p.ram), budget(p.flash)));
        let gains = match row.gains {
            Some((a, lo, hi)) => format!("avg_gain={a:.6} min_gain={lo:.6} max_gain={hi:.6}"),
            None => "avg_gain=n/a min_gain=n/a max_gain=n/a".into(),
        };
        println!("mode={} ram={ram} flash={flash} files={} {gains}", row.label, row.files);
    }
}
