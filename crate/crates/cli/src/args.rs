use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

#[derive(Parser, Debug)]
#[command(
    name = "conekit",
    version,
    about = "Walls, chambers and orbits in hyperbolic lattices"
)]
pub struct Cli {
    /// Worker threads (output does not depend on this)
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Lattice properties
    #[command(subcommand)]
    Lattice(LatticeCmd),
    /// Primitive vectors of a fixed square in a height window
    Enum(EnumArgs),
    /// Orbit decomposition of wall vectors
    Orbits(OrbitArgs),
    /// Chambers of a finite wall arrangement
    #[command(subcommand)]
    Chambers(ChamberCmd),
    /// Hyperbolic geometry probes
    #[command(subcommand)]
    Hyp(HypCmd),
    /// Picard sublattices
    #[command(subcommand)]
    Period(PeriodCmd),
}

#[derive(Args, Debug, Clone)]
pub struct LatticeArg {
    /// Preset name, `diag:a,b,...`, or path to a lattice JSON file
    #[arg(long, allow_hyphen_values = true)]
    pub lattice: Option<String>,
    /// Preset name (alias of --lattice)
    #[arg(long)]
    pub preset: Option<String>,
}

#[derive(Args, Debug, Clone)]
pub struct Output {
    /// Write the JSON report here instead of standard output
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
pub enum LatticeCmd {
    /// Rank, signature and determinant
    Info {
        #[command(flatten)]
        lattice: LatticeArg,
        #[command(flatten)]
        output: Output,
    },
}

#[derive(Args, Debug, Clone)]
pub struct WindowArgs {
    /// Anchor `h` of the height window (default: a small positive vector)
    #[arg(long, allow_hyphen_values = true)]
    pub anchor: Option<String>,
    /// Bound on `q(h, z)`
    #[arg(long)]
    pub height: u64,
}

#[derive(Args, Debug)]
pub struct EnumArgs {
    #[command(flatten)]
    pub lattice: LatticeArg,
    #[command(flatten)]
    pub window: WindowArgs,
    /// Target square; `-2` and `2` both select `q(z,z) = -2`, `0` selects
    /// isotropic vectors
    #[arg(long, allow_negative_numbers = true)]
    pub square: i64,
    /// Write the JSON summary here (otherwise it goes to standard error)
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug, Clone)]
pub struct GroupArgs {
    /// `reflections` or a JSON file `{"name": ..., "generators": [[[..]]]}`
    #[arg(long, default_value = "reflections")]
    pub group: String,
    /// Word-length cap for element searches
    #[arg(long, default_value_t = 3)]
    pub word_cap: usize,
    /// Height window for orbit closures (default: the vector window)
    #[arg(long)]
    pub height_cap: Option<u64>,
    /// Height window of the reflection generators (default: the vector window)
    #[arg(long)]
    pub group_height: Option<u64>,
}

#[derive(Args, Debug)]
pub struct OrbitArgs {
    #[command(flatten)]
    pub lattice: LatticeArg,
    #[command(flatten)]
    pub window: WindowArgs,
    /// Values `d` with `q(z,z) = -d`, comma separated
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub squares: Vec<i64>,
    #[command(flatten)]
    pub group: GroupArgs,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Args, Debug, Clone)]
pub struct ArrangementArgs {
    #[command(flatten)]
    pub lattice: LatticeArg,
    #[command(flatten)]
    pub window: WindowArgs,
    /// Values `d` of the wall squares `q(z,z) = -d`
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub squares: Vec<i64>,
    /// Positive point selecting the chamber, e.g. `2,1` or `3/2,1`
    /// (default: the perturbed anchor)
    #[arg(long, allow_hyphen_values = true)]
    pub point: Option<String>,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Subcommand, Debug)]
pub enum ChamberCmd {
    /// Sign vector of a point
    Locate(ArrangementArgs),
    /// Face test for every wall, with witnesses
    Faces(ArrangementArgs),
    /// Neighbouring chamber across a face
    Cross {
        #[command(flatten)]
        arr: ArrangementArgs,
        /// Wall to cross
        #[arg(long, allow_hyphen_values = true)]
        wall: String,
    },
    /// Faces grouped into orbits of the chamber stabilizer
    AutOrbits {
        #[command(flatten)]
        arr: ArrangementArgs,
        #[command(flatten)]
        group: GroupArgs,
    },
}

#[derive(Subcommand, Debug)]
pub enum HypCmd {
    /// Largest distance from sampled points to the nearest wall, per square bound
    Density(DensityArgs),
    /// Closed geodesics cut out by walls (rank 3)
    Geodesic(GeodesicArgs),
    /// Cusp heights along closed geodesics (rank 3)
    Cusps {
        #[command(flatten)]
        geo: GeodesicArgs,
        /// Height window for cusps
        #[arg(long, default_value_t = 5)]
        cusp_height: u64,
        #[arg(long, default_value_t = 256)]
        samples_per_period: usize,
    },
}

#[derive(Args, Debug)]
pub struct DensityArgs {
    #[command(flatten)]
    pub lattice: LatticeArg,
    #[arg(long, allow_hyphen_values = true)]
    pub anchor: Option<String>,
    /// Largest `d`; the schedule is `1..=d_max`
    #[arg(long, default_value_t = 20)]
    pub d_max: i64,
    #[arg(long, default_value_t = 1.5)]
    pub radius: f64,
    #[arg(long, default_value_t = 2000)]
    pub samples: usize,
    #[arg(long, default_value_t = 7)]
    pub seed: u64,
    /// Wall height window is `window_base + window_slope * D`
    #[arg(long, default_value_t = 2)]
    pub window_base: u64,
    #[arg(long, default_value_t = 1)]
    pub window_slope: u64,
    /// Write the CSV curve here instead of standard output
    #[arg(long)]
    pub csv: Option<PathBuf>,
    /// Write the JSON report here (otherwise it is not written)
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct GeodesicArgs {
    #[command(flatten)]
    pub lattice: LatticeArg,
    /// A single wall
    #[arg(long, allow_hyphen_values = true)]
    pub wall: Option<String>,
    /// Otherwise every wall of these squares in the window
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub squares: Vec<i64>,
    #[arg(long, allow_hyphen_values = true)]
    pub anchor: Option<String>,
    #[arg(long, default_value_t = 3)]
    pub height: u64,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Args, Debug)]
pub struct PeriodArgs {
    #[command(flatten)]
    pub lattice: LatticeArg,
    /// Integral classes, `0,1,0;0,0,1`
    #[arg(long, allow_hyphen_values = true)]
    pub classes: String,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Subcommand, Debug)]
pub enum PeriodCmd {
    /// Saturated span of the classes
    Picard(PeriodArgs),
    /// Whether the saturated span contains a vector of positive square
    Projective(PeriodArgs),
    /// Projective primitive extension of corank two
    Deform {
        #[command(flatten)]
        args: PeriodArgs,
        /// Coordinate bound for extension vectors beyond the basis
        #[arg(long, default_value_t = 1)]
        bound: i64,
    },
}
