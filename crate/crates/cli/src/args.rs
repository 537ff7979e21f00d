use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use latpoly::enumeration::Model;
use latpoly::lattice::AnimalConvention;
use serde::Serialize;

#[derive(Parser, Debug)]
#[command(name = "latpoly", version, about = "Lattice trees, animals and walks at an adsorbing surface")]
pub struct Cli {
    #[command(flatten)]
    pub common: Common,
    #[command(subcommand)]
    pub cmd: Cmd,
}

#[derive(Args, Debug, Serialize)]
pub struct Common {
    /// Defaults to tree, or to the only model a command supports.
    #[arg(long, global = true, value_enum)]
    pub model: Option<ModelArg>,
    #[arg(long, global = true, default_value_t = 2)]
    pub dim: usize,
    /// Size: sites for trees and animals, steps for walks.
    #[arg(long, global = true)]
    pub n: Option<usize>,
    /// translation-classes, contains-origin, half-space, lex-star or bridge.
    #[arg(long, global = true)]
    pub constraint: Option<String>,
    #[arg(long, global = true, allow_negative_numbers = true, conflicts_with = "beta_grid")]
    pub beta: Option<f64>,
    #[arg(long, global = true, allow_hyphen_values = true, value_delimiter = ',')]
    pub beta_grid: Option<Vec<f64>>,
    #[arg(long, global = true, value_enum)]
    pub animal_convention: Option<ConventionArg>,
    #[arg(long, global = true, default_value_t = 1)]
    pub seed: u64,
    /// Worker threads; defaults to the available parallelism.
    #[arg(long, global = true, env = "LATPOLY_THREADS")]
    #[serde(skip)]
    pub threads: Option<usize>,
    #[arg(long, global = true, default_value = "latpoly-out")]
    #[serde(skip)]
    pub out: PathBuf,
    #[arg(long, global = true, value_enum, default_value = "csv")]
    pub format: Format,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelArg {
    Tree,
    Animal,
    Walk,
}

impl From<ModelArg> for Model {
    fn from(m: ModelArg) -> Self {
        match m {
            ModelArg::Tree => Model::Tree,
            ModelArg::Animal => Model::Animal,
            ModelArg::Walk => Model::Walk,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ConventionArg {
    Site,
    Subgraph,
}

impl ConventionArg {
    pub fn name(&self) -> &'static str {
        AnimalConvention::from(*self).name()
    }
}

impl From<ConventionArg> for AnimalConvention {
    fn from(c: ConventionArg) -> Self {
        match c {
            ConventionArg::Site => AnimalConvention::Site,
            ConventionArg::Subgraph => AnimalConvention::Subgraph,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SurfaceArg {
    Impenetrable,
    Penetrable,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum MethodArg {
    Rosenbluth,
    Perm,
    Regraft,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum TargetArg {
    Free,
    Bridge,
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Cmd {
    /// Exact count of an ensemble, with the table for every smaller size.
    Enumerate {
        /// Abort (exit 3) once more than this many members are generated.
        #[arg(long)]
        limit: Option<u64>,
        /// Count table to read from and extend.
        #[arg(long)]
        #[serde(skip)]
        table: Option<PathBuf>,
    },
    /// Histogram of the number of surface contacts.
    Profile {
        /// Count surface edges of walks instead of surface sites.
        #[arg(long)]
        edges: bool,
    },
    /// Span histogram and the small-span fraction.
    Spans,
    /// Partition function, free energy and mean contacts.
    Partition {
        #[arg(long, value_enum, default_value = "impenetrable")]
        surface: SurfaceArg,
        /// Weight walk edges lying in the surface instead of surface sites.
        #[arg(long)]
        edge_contacts: bool,
    },
    /// Rigorous one-sided bounds on the growth constant from exact counts.
    Growth,
    /// Exhaustive checks of the injective constructions.
    Verify {
        #[command(subcommand)]
        which: VerifyCmd,
    },
    /// Marked-tree bound chain for adsorbing trees.
    Theorem1 {
        /// Largest number of marks.
        #[arg(long, default_value_t = 2)]
        j: usize,
    },
    /// Edge-weighted bound chain for adsorbing walks.
    Theorem3 {
        #[arg(long, default_value_t = 2)]
        j: usize,
    },
    /// Monte Carlo estimates beyond exact reach.
    Sample {
        #[arg(long, value_enum, default_value = "perm")]
        method: MethodArg,
        #[arg(long, value_enum, default_value = "free")]
        target: TargetArg,
        /// Tours for walk growth, measured steps for the tree chain.
        #[arg(long, default_value_t = 100_000)]
        size: u64,
        #[arg(long, default_value_t = 20)]
        batches: usize,
    },
    /// Small-span fractions against `N^-delta`.
    SpanReport {
        #[arg(long, value_delimiter = ',', required = true)]
        n_list: Vec<usize>,
        #[arg(long, value_delimiter = ',', default_value = "0.5,1")]
        deltas: Vec<f64>,
        /// Sizes up to this are enumerated exactly.
        #[arg(long, default_value_t = 8)]
        exact_max: usize,
        #[arg(long, default_value_t = 100_000)]
        size: u64,
    },
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum VerifyCmd {
    /// Mark attachment (trees, or walks with `--model walk`).
    Marks {
        #[arg(long, default_value_t = 2)]
        j: u32,
    },
    /// Lex-star tree concatenation.
    Concat {
        #[arg(long)]
        m: usize,
    },
    /// Bridge concatenation.
    Bridge {
        #[arg(long)]
        m: usize,
    },
    /// Assembly of walks from bridge classes.
    Zeta {
        #[arg(long, default_value_t = 2)]
        k: usize,
    },
    /// Trees with one surface site against half-space trees.
    SingleContact,
    /// Super- or submultiplicativity of counts up to `N + M <= n`.
    Supermult,
}

impl Cmd {
    pub fn name(&self) -> String {
        match self {
            Cmd::Enumerate { .. } => "enumerate".into(),
            Cmd::Profile { .. } => "profile".into(),
            Cmd::Spans => "spans".into(),
            Cmd::Partition { .. } => "partition".into(),
            Cmd::Growth => "growth".into(),
            Cmd::Verify { which } => format!(
                "verify {}",
                match which {
                    VerifyCmd::Marks { .. } => "marks",
                    VerifyCmd::Concat { .. } => "concat",
                    VerifyCmd::Bridge { .. } => "bridge",
                    VerifyCmd::Zeta { .. } => "zeta",
                    VerifyCmd::SingleContact => "single-contact",
                    VerifyCmd::Supermult => "supermult",
                }
            ),
            Cmd::Theorem1 { .. } => "theorem1".into(),
            Cmd::Theorem3 { .. } => "theorem3".into(),
            Cmd::Sample { .. } => "sample".into(),
            Cmd::SpanReport { .. } => "span-report".into(),
        }
    }
}

impl Cli {
    /// Snapshot of everything that determines the output.
    pub fn config(&self) -> serde_json::Value {
        serde_json::json!({ "common": self.common, "command": self.cmd })
    }
}
