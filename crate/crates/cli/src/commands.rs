use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;
use stegograph::{
    capacity_bits, comb_score, compare, decode, encode, histogram, slot_count, BitsPerSlot,
    CombReport, CompareReport, TransformSpec,
};

use crate::args::{Cli, Command};
use crate::error::CliError;
use crate::io::{file_stem, load_image, StagedOutputs};

#[derive(Debug, Clone)]
pub struct JobConfig {
    pub chunk_size: usize,
    pub bits_per_slot: BitsPerSlot,
    pub transform: TransformSpec,
    pub out_dir: PathBuf,
    pub overwrite: bool,
    pub json_out: Option<PathBuf>,
}

impl JobConfig {
    pub fn from_cli(cli: &Cli) -> Result<Self, CliError> {
        let transform = match &cli.xor_key {
            None => TransformSpec::Identity,
            Some(text) => {
                let key = hex::decode(text.trim())
                    .map_err(|e| CliError::Usage(format!("--xor-key: {e}")))?;
                let spec = TransformSpec::xor_keystream(key);
                spec.validate()?;
                spec
            }
        };
        Ok(Self {
            chunk_size: cli.chunk_size as usize,
            bits_per_slot: BitsPerSlot::new(cli.bits)?,
            transform,
            out_dir: cli.out.clone(),
            overwrite: cli.overwrite,
            json_out: cli.json_out.clone(),
        })
    }
}

pub fn execute(cli: &Cli, out: &mut dyn Write, err: &mut dyn Write) -> Result<(), CliError> {
    let config = JobConfig::from_cli(cli)?;
    match &cli.command {
        Command::Encode { payloads, covers } => cmd_encode(&config, covers, payloads, out),
        Command::Decode { stegos } => cmd_decode(&config, stegos, out, err),
        Command::Capacity { covers } => cmd_capacity(&config, covers, out),
        Command::Analyze { compare, images } => {
            let pair = compare.as_ref().map(|v| (v[0].as_path(), v[1].as_path()));
            cmd_analyze(&config, images, pair, out)
        }
    }
}

fn say(out: &mut dyn Write, text: std::fmt::Arguments<'_>) {
    // stdout going away (closed pipe) is not worth failing the job for
    let _ = out.write_fmt(text);
    let _ = out.write_all(b"\n");
}

macro_rules! say {
    ($out:expr, $($arg:tt)*) => { say($out, format_args!($($arg)*)) };
}

fn write_json(config: &JobConfig, value: &impl Serialize) -> Result<(), CliError> {
    let Some(path) = &config.json_out else {
        return Ok(());
    };
    let mut text = serde_json::to_vec(value).expect("summary serialization is infallible");
    text.push(b'\n');
    fs::write(path, text).map_err(|source| CliError::Io {
        path: path.clone(),
        source,
    })
}

fn load_all(paths: &[PathBuf]) -> Result<Vec<stegograph::RgbImage>, CliError> {
    paths.iter().map(|p| load_image(p)).collect()
}

#[derive(Serialize)]
struct EncodeSummary {
    command: &'static str,
    bits_per_slot: u8,
    chunk_size: usize,
    transform: &'static str,
    capacity_bits: u64,
    payload_bytes: u64,
    overhead_bytes: u64,
    segment_bytes: u64,
    used_slots: u64,
    utilization: f64,
    overhead_fraction: f64,
    covers: Vec<CoverSummary>,
}

#[derive(Serialize)]
struct CoverSummary {
    path: String,
    output: String,
    capacity_bits: u64,
    chunks: usize,
    payload_bytes: u64,
    segment_bytes: u64,
}

pub fn cmd_encode(
    config: &JobConfig,
    covers: &[PathBuf],
    payloads: &[PathBuf],
    out: &mut dyn Write,
) -> Result<(), CliError> {
    let cover_images = load_all(covers)?;
    let payload_images = load_all(payloads)?;
    let mut staged = StagedOutputs::new(&config.out_dir, config.overwrite)?;
    let names: Vec<String> = covers
        .iter()
        .map(|p| format!("{}.stego.png", file_stem(p)))
        .collect();
    for name in &names {
        staged.reserve(name)?;
    }

    let k = config.bits_per_slot;
    let encoded = encode(
        &payload_images,
        &cover_images,
        config.chunk_size,
        k,
        &config.transform,
    )?;
    let plan = &encoded.plan;

    let mut cover_summaries = Vec::with_capacity(covers.len());
    for ((path, name), (stego, cover_plan)) in covers
        .iter()
        .zip(&names)
        .zip(encoded.stegos.iter().zip(&plan.covers))
    {
        let target = staged.add_png(name, stego)?;
        cover_summaries.push(CoverSummary {
            path: path.display().to_string(),
            output: target.display().to_string(),
            capacity_bits: cover_plan.capacity_bits,
            chunks: cover_plan.chunks.len(),
            payload_bytes: cover_plan.payload_bytes,
            segment_bytes: cover_plan.segment_bytes,
        });
    }
    staged.commit()?;

    say!(
        out,
        "plan: {} payload(s) into {} cover(s), k={}, chunk size {}",
        payloads.len(),
        covers.len(),
        k.get(),
        config.chunk_size
    );
    for c in &cover_summaries {
        say!(
            out,
            "  {} -> {}: {} chunk(s), {} of {} bytes",
            c.path,
            c.output,
            c.chunks,
            c.segment_bytes,
            c.capacity_bits / 8
        );
    }
    let total_slots: u64 = cover_images.iter().map(slot_count).sum();
    say!(
        out,
        "capacity: {} slots, {} bytes",
        total_slots,
        plan.total_capacity_bits / 8
    );
    say!(out, "payload: {} bytes", plan.total_payload_bytes);
    say!(
        out,
        "overhead: {} bytes ({:.2}%)",
        plan.total_overhead_bytes,
        plan.overhead_fraction() * 100.0
    );
    say!(out, "utilization: {:.2}%", plan.utilization * 100.0);

    write_json(
        config,
        &EncodeSummary {
            command: "encode",
            bits_per_slot: k.get(),
            chunk_size: config.chunk_size,
            transform: config.transform.name(),
            capacity_bits: plan.total_capacity_bits,
            payload_bytes: plan.total_payload_bytes,
            overhead_bytes: plan.total_overhead_bytes,
            segment_bytes: plan.total_segment_bytes(),
            used_slots: plan.used_slots(),
            utilization: plan.utilization,
            overhead_fraction: plan.overhead_fraction(),
            covers: cover_summaries,
        },
    )
}

#[derive(Serialize)]
struct DecodeSummary {
    command: &'static str,
    num_cover_images: u32,
    covers_seen: Vec<u32>,
    payloads: Vec<PayloadSummary>,
    skipped: Vec<String>,
}

#[derive(Serialize)]
struct PayloadSummary {
    payload_id: usize,
    width: u32,
    height: u32,
    output: String,
}

pub fn cmd_decode(
    config: &JobConfig,
    stegos: &[PathBuf],
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Result<(), CliError> {
    let images = load_all(stegos)?;
    let decoded = decode(&images, config.bits_per_slot, &config.transform)?;
    let skipped: Vec<String> = decoded
        .warnings
        .iter()
        .map(|w| stegos[w.input_index].display().to_string())
        .collect();
    for (w, path) in decoded.warnings.iter().zip(&skipped) {
        say!(err, "warning: {path}: {}", w.message);
    }

    let mut staged = StagedOutputs::new(&config.out_dir, config.overwrite)?;
    let mut summaries = Vec::with_capacity(decoded.payloads.len());
    for (id, payload) in decoded.payloads.iter().enumerate() {
        let target = staged.add_png(&format!("payload_{id}.png"), payload)?;
        summaries.push(PayloadSummary {
            payload_id: id,
            width: payload.width(),
            height: payload.height(),
            output: target.display().to_string(),
        });
    }
    staged.commit()?;

    say!(
        out,
        "read {} of {} cover(s)",
        decoded.covers_seen.len(),
        decoded.num_cover_images
    );
    for p in &summaries {
        say!(
            out,
            "payload {}: {}x{} -> {}",
            p.payload_id,
            p.width,
            p.height,
            p.output
        );
    }
    write_json(
        config,
        &DecodeSummary {
            command: "decode",
            num_cover_images: decoded.num_cover_images,
            covers_seen: decoded.covers_seen.clone(),
            payloads: summaries,
            skipped,
        },
    )
}

#[derive(Serialize)]
struct CapacitySummary {
    command: &'static str,
    bits_per_slot: u8,
    covers: Vec<CapacityLine>,
    total_slots: u64,
    total_bits: u64,
    total_bytes: u64,
}

#[derive(Serialize)]
struct CapacityLine {
    path: String,
    width: u32,
    height: u32,
    slots: u64,
    bits: u64,
    bytes: u64,
}

pub fn cmd_capacity(
    config: &JobConfig,
    covers: &[PathBuf],
    out: &mut dyn Write,
) -> Result<(), CliError> {
    let k = config.bits_per_slot;
    let mut lines = Vec::with_capacity(covers.len());
    for path in covers {
        let img = load_image(path)?;
        let bits = capacity_bits(&img, k);
        lines.push(CapacityLine {
            path: path.display().to_string(),
            width: img.width(),
            height: img.height(),
            slots: slot_count(&img),
            bits,
            bytes: bits / 8,
        });
    }
    for l in &lines {
        say!(
            out,
            "{}: {}x{}, {} slots, {} bytes ({} bits at k={})",
            l.path,
            l.width,
            l.height,
            l.slots,
            l.bytes,
            l.bits,
            k.get()
        );
    }
    let total_slots = lines.iter().map(|l| l.slots).sum();
    let total_bits = lines.iter().map(|l| l.bits).sum::<u64>();
    say!(
        out,
        "total: {} slots, {} bytes ({} bits at k={})",
        total_slots,
        total_bits / 8,
        total_bits,
        k.get()
    );
    write_json(
        config,
        &CapacitySummary {
            command: "capacity",
            bits_per_slot: k.get(),
            covers: lines,
            total_slots,
            total_bits,
            total_bytes: total_bits / 8,
        },
    )
}

#[derive(Serialize)]
struct AnalyzeSummary {
    command: &'static str,
    images: Vec<ImageAnalysis>,
    #[serde(skip_serializing_if = "Option::is_none")]
    compare: Option<ComparePair>,
}

#[derive(Serialize)]
struct ImageAnalysis {
    path: String,
    width: u32,
    height: u32,
    histogram_csv: String,
    comb: CombReport,
}

#[derive(Serialize)]
struct ComparePair {
    original: String,
    stego: String,
    report: CompareReport,
    original_comb: CombReport,
    stego_comb: CombReport,
}

pub fn cmd_analyze(
    config: &JobConfig,
    images: &[PathBuf],
    pair: Option<(&Path, &Path)>,
    out: &mut dyn Write,
) -> Result<(), CliError> {
    if images.is_empty() && pair.is_none() {
        return Err(CliError::Usage(
            "analyze needs at least one image or --compare A B".into(),
        ));
    }
    let k = config.bits_per_slot;
    let mut staged = StagedOutputs::new(&config.out_dir, config.overwrite)?;
    let mut analyses = Vec::with_capacity(images.len());
    for path in images {
        let img = load_image(path)?;
        let hist = histogram(&img);
        let csv = staged.add_bytes(
            &format!("{}.histogram.csv", file_stem(path)),
            hist.to_csv().as_bytes(),
        )?;
        analyses.push(ImageAnalysis {
            path: path.display().to_string(),
            width: img.width(),
            height: img.height(),
            histogram_csv: csv.display().to_string(),
            comb: comb_score(&hist, k),
        });
    }

    let compared = match pair {
        None => None,
        Some((a, b)) => {
            let original = load_image(a)?;
            let stego = load_image(b)?;
            let report = compare(&original, &stego)?;
            Some(ComparePair {
                original: a.display().to_string(),
                stego: b.display().to_string(),
                report,
                original_comb: comb_score(&histogram(&original), k),
                stego_comb: comb_score(&histogram(&stego), k),
            })
        }
    };
    staged.commit()?;

    for a in &analyses {
        let c = &a.comb;
        say!(
            out,
            "{}: comb statistic {:.1} (effect {:.5}, verdict {:.3}), gaps r/g/b {:.3}/{:.3}/{:.3}, max bin {}{}",
            a.path,
            c.statistic,
            c.effect,
            c.verdict,
            c.gap_fraction[0],
            c.gap_fraction[1],
            c.gap_fraction[2],
            c.combined_max_bin,
            if c.degenerate { ", degenerate" } else { "" }
        );
    }
    if let Some(p) = &compared {
        let r = &p.report;
        say!(out, "compare {} vs {}:", p.original, p.stego);
        say!(
            out,
            "  max delta r/g/b: {}/{}/{}",
            r.max_delta[0],
            r.max_delta[1],
            r.max_delta[2]
        );
        say!(
            out,
            "  mean |delta| r/g/b: {:.4}/{:.4}/{:.4}, changed {:.2}%",
            r.mean_abs_delta[0],
            r.mean_abs_delta[1],
            r.mean_abs_delta[2],
            r.changed_fraction * 100.0
        );
        say!(
            out,
            "  combined max bin: {} -> {} (ratio {:.3})",
            r.max_bin_original,
            r.max_bin_stego,
            r.max_bin_ratio
        );
        say!(
            out,
            "  comb statistic: {:.1} -> {:.1}",
            p.original_comb.statistic,
            p.stego_comb.statistic
        );
    }
    write_json(
        config,
        &AnalyzeSummary {
            command: "analyze",
            images: analyses,
            compare: compared,
        },
    )
}
