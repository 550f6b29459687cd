use std::path::PathBuf;

use clap::{Parser, Subcommand};

#[derive(Debug, Parser)]
#[command(
    name = "stegograph",
    version,
    about = "Hide images across images with LSB insertion and a JSON mapping graph"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Chunk size in bytes.
    #[arg(long, global = true, default_value_t = 512, value_parser = clap::value_parser!(u32).range(1..))]
    pub chunk_size: u32,

    /// Low-order bits replaced per channel byte (1-3).
    #[arg(long = "bits", global = true, default_value_t = 2, value_parser = clap::value_parser!(u8).range(1..=3))]
    pub bits: u8,

    /// Hex key; enables the xor-keystream payload transform.
    #[arg(long, global = true, value_name = "HEX")]
    pub xor_key: Option<String>,

    /// Output directory.
    #[arg(long, global = true, value_name = "DIR", default_value = ".")]
    pub out: PathBuf,

    /// Replace existing output files.
    #[arg(long, global = true)]
    pub overwrite: bool,

    /// Also write a machine-readable JSON summary.
    #[arg(long, global = true, value_name = "PATH")]
    pub json_out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Hide payload images in covers; cover order is fill order.
    Encode {
        /// Payload image (repeatable).
        #[arg(short = 'p', long = "payload", value_name = "PAYLOAD", required = true)]
        payloads: Vec<PathBuf>,
        #[arg(value_name = "COVER", required = true)]
        covers: Vec<PathBuf>,
    },
    /// Recover payloads from stego images given in any order.
    Decode {
        #[arg(value_name = "STEGO", required = true)]
        stegos: Vec<PathBuf>,
    },
    /// Report slot and byte capacity of covers.
    Capacity {
        #[arg(value_name = "COVER", required = true)]
        covers: Vec<PathBuf>,
    },
    /// Histogram CSVs and comb-artifact scores.
    Analyze {
        /// Compare a cover with its stego image.
        #[arg(long, num_args = 2, value_names = ["ORIGINAL", "STEGO"])]
        compare: Option<Vec<PathBuf>>,
        #[arg(value_name = "IMAGE")]
        images: Vec<PathBuf>,
    },
}
