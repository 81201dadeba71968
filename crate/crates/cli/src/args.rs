use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use exproj::ratmath::{parse_rational, Rational};

#[derive(Parser, Debug)]
#[command(name = "exproj", version, about = "Exceptional-set bounds for orthogonal projections")]
pub struct Cli {
    /// Write the main output here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Output format; each command has its own default.
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Seed for randomized steps.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Svg,
    Text,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Best upper and lower bounds at one point (a, s).
    Bounds(BoundsArgs),
    /// Sweep the admissible (a, s) rectangle on a rational grid.
    Region(RegionArgs),
    /// Exhaustive integer checks of the main inequality and the closed form for m.
    Verify(VerifyArgs),
    /// Brascamp-Lieb exponent of a configuration file.
    Bl(BlArgs),
    /// Projection counts of the integer grid example.
    Simulate(SimulateArgs),
    /// Broad-narrow descent on a point set.
    Broadnarrow(BroadNarrowArgs),
}

fn rational(text: &str) -> Result<Rational, String> {
    parse_rational(text).map_err(|e| e.to_string())
}

#[derive(Args, Debug)]
pub struct BoundsArgs {
    #[arg(long)]
    pub n: i64,
    #[arg(long)]
    pub k: i64,
    #[arg(long, value_parser = rational)]
    pub a: Rational,
    #[arg(long, value_parser = rational)]
    pub s: Rational,
}

#[derive(Args, Debug)]
pub struct RegionArgs {
    #[arg(long)]
    pub n: i64,
    #[arg(long)]
    pub k: i64,
    /// Grid denominator: a and s range over multiples of 1/grid.
    #[arg(long, default_value_t = 20)]
    pub grid: i64,
    /// Also write the gap heatmap to this file.
    #[arg(long)]
    pub svg: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    #[arg(long, default_value_t = 12)]
    pub nmax: i64,
}

#[derive(Args, Debug)]
pub struct BlArgs {
    /// Config file: "n J p" followed by J subspace blocks.
    pub config: PathBuf,
    /// Override the exponent in the file.
    #[arg(long, value_parser = rational)]
    pub p: Option<Rational>,
    /// Candidate family cap for the lattice closure.
    #[arg(long, default_value_t = exproj::brascamplieb::DEFAULT_CAP)]
    pub cap: usize,
}

#[derive(Args, Debug)]
pub struct SimulateArgs {
    /// One or more grid sizes, comma separated.
    #[arg(long = "N", value_delimiter = ',', required = true)]
    pub n: Vec<u64>,
    #[arg(long, value_parser = rational)]
    pub a: Rational,
    #[arg(long, value_parser = rational)]
    pub s: Rational,
    /// Exceptional when the count is at most threshold * floor(N^s).
    #[arg(long, default_value_t = 5.0)]
    pub threshold: f64,
}

#[derive(Args, Debug)]
pub struct BroadNarrowArgs {
    /// Point set file ("dim count delta" then rows). Without it a random
    /// Cantor set is drawn, see --cantor.
    pub points: Option<PathBuf>,
    #[arg(long, value_parser = rational)]
    pub tau: Rational,
    #[arg(long, value_parser = rational, default_value = "1/10")]
    pub eps: Rational,
    #[arg(long = "K", default_value_t = 4)]
    pub k: u64,
    /// Number of levels M.
    #[arg(long)]
    pub levels: Option<u32>,
    /// Leading threshold constant.
    #[arg(long)]
    pub c0: Option<f64>,
    /// Random Cantor set "K,keep,depth" used when no file is given.
    #[arg(long, value_delimiter = ',', num_args = 3, default_value = "4,2,6")]
    pub cantor: Vec<u64>,
}
