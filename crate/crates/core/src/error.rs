use std::io;

/// Errors reported by every structure in this crate.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("index {index} out of range for length {len}")]
    OutOfRange { index: u64, len: u64 },

    #[error("input is not sorted at position {position}")]
    Unsorted { position: usize },

    #[error("duplicate value {value} at position {position}")]
    Duplicate { position: usize, value: u64 },

    #[error("value {value} exceeds universe bound {universe}")]
    OutOfUniverse { value: u64, universe: u64 },

    #[error("universe bound {0} exceeds the supported maximum 2^63 - 1")]
    UniverseTooLarge(u64),

    #[error("input must contain at least one value")]
    Empty,

    #[error("rank/select index is missing or stale")]
    StaleIndex,

    #[error("value {value} does not fit in {width} bits")]
    ValueTooWide { value: u64, width: u32 },

    #[error("block store capacity exceeded: requested {requested} bits, limit {limit}")]
    Capacity { requested: usize, limit: usize },

    #[error("appended value {value} is not above the current maximum {max}")]
    NonMonotone { value: u64, max: u64 },

    #[error("structure is frozen and accepts no further appends")]
    Frozen,

    #[error("invalid serialized data: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_index(index: usize, len: usize) -> Result<()> {
    if index < len {
        Ok(())
    } else {
        Err(Error::OutOfRange {
            index: index as u64,
            len: len as u64,
        })
    }
}
