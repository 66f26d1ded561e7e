use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("state has zero norm")]
    ZeroNorm,
    #[error("box width {width} is narrower than 8 grid cells ({min})")]
    BoxTooNarrow { width: f64, min: f64 },
    #[error("box [{lo}, {hi}] does not fit inside the grid domain")]
    BoxOutOfDomain { lo: f64, hi: f64 },
    #[error("sigma {sigma} is smaller than 2 grid cells ({min})")]
    SigmaTooSmall { sigma: f64, min: f64 },
    #[error("packet amplitude {edge:e} at the domain edge exceeds 1e-10")]
    TailTruncation { edge: f64 },
    #[error("states live on different grids")]
    GridMismatch,
    #[error("amplitude count {got} does not match grid size {expected}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("two-particle states require equal masses and hbar")]
    UnequalMasses,
    #[error("softening length must be positive, got {0}")]
    NonpositiveSoftening(f64),
    #[error("time step {dt} exceeds the spectral limit {limit}")]
    TimestepTooLarge { dt: f64, limit: f64 },
    #[error("invalid duration: {0}")]
    InvalidDuration(String),
    #[error("record stride {stride} does not divide the {steps} steps of the run")]
    InvalidStride { stride: usize, steps: usize },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("every grid point falls below the density floor")]
    AllMasked,
    #[error("continuity residual needs at least 3 snapshots, got {0}")]
    TooFewSnapshots(usize),
    #[error("evolution has no snapshots")]
    EmptyEvolution,
    #[error("cell partition not aligned with the sampling lattice: {0}")]
    MisalignedPartition(String),
    #[error("trajectories do not share a sampling cadence")]
    CadenceMismatch,
    #[error("an ensemble needs at least 2 trajectories, got {0}")]
    TooFewTrajectories(usize),
    #[error("reference point {0} lies in a masked region")]
    MaskedReference(usize),
    #[error("unmasked support splits into {components} disconnected components")]
    DisconnectedSupport { components: usize },
    #[error("boxes {first} and {second} overlap or are closer than 4 softening lengths")]
    OverlappingBoxes { first: usize, second: usize },
    #[error("branch expansion leaves residual {residual:e}")]
    IncompleteBranchBasis { residual: f64 },
    #[error("region `{0}` carries no probability")]
    EmptyRegion(String),
}
