use std::io;

use crate::tags::Channel;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("duration of {duration} s does not fit in 64-bit ticks of {clock_quantum} s")]
    DurationOverflow { duration: f64, clock_quantum: f64 },

    #[error("unsorted-input: channel {channel} tag #{index} precedes its predecessor")]
    UnsortedInput { channel: Channel, index: usize },

    #[error("empty-channel: channel {0} has no tags")]
    EmptyChannel(Channel),

    #[error("zero-rate: channel {0} recorded no events")]
    ZeroRate(Channel),

    #[error("zero central coincidence count, cannot normalize")]
    ZeroCentralCount,

    #[error("no coincidences at lag {lag} s, cannot normalize")]
    ZeroCoincidences { lag: f64 },

    #[error("format error at byte {offset}: {message}")]
    Format { offset: u64, message: String },

    #[error("unsorted-input at byte {offset}: tick {tick} precedes {previous}")]
    UnsortedFile { offset: u64, tick: u64, previous: u64 },

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error(transparent)]
    Io(#[from] io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidConfig(msg.into())
}
