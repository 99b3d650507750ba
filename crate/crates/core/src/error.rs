use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("empty period word")]
    EmptyPeriod,
    #[error("symbol chain {chain} outside alphabet of {chains} chain(s)")]
    ChainOutOfRange { chain: u32, chains: u32 },
    #[error("cyclic order needs three distinct points")]
    NotDistinct,
    #[error("parse error: {0}")]
    Parse(String),
    #[error("invalid portrait: {0}")]
    InvalidPortrait(String),
    #[error("boundary address; supply side")]
    BoundaryNeedsSide,
    #[error("arc contains the cut point; boundary set is infinite")]
    ArcContainsCut,
    #[error("arc between chains {lo} and {hi} contains a whole chain; boundary set is infinite")]
    ArcContainsChain { lo: u32, hi: u32 },
    #[error("sector walk did not close after {steps} steps")]
    SectorWalk { steps: usize },
    #[error("input sets overlap")]
    Overlap,
    #[error("address is not periodic")]
    NotPeriodic,
    #[error("portrait is not simple: {0}")]
    NotSimple(String),
    #[error("itinerary not realizable: {0}")]
    NotRealizable(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("point is not fixed (residual {0:e})")]
    NotFixed(f64),
}

pub type Result<T> = std::result::Result<T, Error>;
