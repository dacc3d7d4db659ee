//! Detection channels and in-memory time-tag streams.

use std::fmt;
use std::ops::{Index, IndexMut};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// Detector channel: the heralding idler arm and the two outputs of the
/// signal-arm beam splitter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Channel {
    I = 0,
    S1 = 1,
    S2 = 2,
}

impl Channel {
    pub const ALL: [Channel; 3] = [Channel::I, Channel::S1, Channel::S2];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(i: u8) -> Option<Channel> {
        match i {
            0 => Some(Channel::I),
            1 => Some(Channel::S1),
            2 => Some(Channel::S2),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Channel::I => "i",
            Channel::S1 => "s1",
            Channel::S2 => "s2",
        }
    }
}

impl fmt::Display for Channel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Channel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "i" | "0" | "idler" => Ok(Channel::I),
            "s1" | "1" => Ok(Channel::S1),
            "s2" | "2" => Ok(Channel::S2),
            other => Err(invalid(format!("unknown channel {other:?}"))),
        }
    }
}

/// One value per channel.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Channels<T> {
    pub i: T,
    pub s1: T,
    pub s2: T,
}

impl<T: Clone> Channels<T> {
    pub fn splat(v: T) -> Self {
        Channels { i: v.clone(), s1: v.clone(), s2: v }
    }
}

impl<T> Channels<T> {
    pub fn map<U>(&self, mut f: impl FnMut(&T) -> U) -> Channels<U> {
        Channels { i: f(&self.i), s1: f(&self.s1), s2: f(&self.s2) }
    }

    pub fn iter(&self) -> impl Iterator<Item = (Channel, &T)> {
        Channel::ALL.into_iter().map(move |c| (c, &self[c]))
    }
}

impl<T> Index<Channel> for Channels<T> {
    type Output = T;

    fn index(&self, c: Channel) -> &T {
        match c {
            Channel::I => &self.i,
            Channel::S1 => &self.s1,
            Channel::S2 => &self.s2,
        }
    }
}

impl<T> IndexMut<Channel> for Channels<T> {
    fn index_mut(&mut self, c: Channel) -> &mut T {
        match c {
            Channel::I => &mut self.i,
            Channel::S1 => &mut self.s1,
            Channel::S2 => &mut self.s2,
        }
    }
}

/// A single detection event.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TimeTag {
    pub tick: u64,
    pub channel: Channel,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StreamHeader {
    /// Tick size, seconds.
    pub clock_quantum: f64,
    /// Acquisition length, ticks.
    pub duration_ticks: u64,
    /// Hash of the generating configuration, when known.
    pub config_hash: Option<u64>,
}

impl StreamHeader {
    /// Acquisition time in seconds; the exposure used for rate normalization.
    pub fn duration(&self) -> f64 {
        self.duration_ticks as f64 * self.clock_quantum
    }
}

/// Time tags split per channel, each sorted by tick.
#[derive(Debug, Clone, PartialEq)]
pub struct TagStream {
    pub header: StreamHeader,
    tags: Channels<Vec<u64>>,
}

impl TagStream {
    /// Checks per-channel sortedness and the duration bound.
    pub fn new(header: StreamHeader, tags: Channels<Vec<u64>>) -> Result<Self> {
        if !(header.clock_quantum > 0.0) {
            return Err(invalid("clock_quantum must be > 0"));
        }
        for (c, v) in tags.iter() {
            if let Some(index) = v.windows(2).position(|w| w[1] < w[0]) {
                return Err(Error::UnsortedInput { channel: c, index: index + 1 });
            }
            if let Some(&last) = v.last() {
                if last > header.duration_ticks {
                    return Err(invalid(format!("channel {c} tick {last} beyond duration {}", header.duration_ticks)));
                }
            }
        }
        Ok(TagStream { header, tags })
    }

    /// Builds a stream from tags in any order.
    pub fn from_unsorted(header: StreamHeader, tags: impl IntoIterator<Item = TimeTag>) -> Result<Self> {
        let mut per: Channels<Vec<u64>> = Channels::default();
        for t in tags {
            per[t.channel].push(t.tick);
        }
        for c in Channel::ALL {
            per[c].sort_unstable();
        }
        Self::new(header, per)
    }

    pub fn channel(&self, c: Channel) -> &[u64] {
        &self.tags[c]
    }

    pub fn count(&self, c: Channel) -> usize {
        self.tags[c].len()
    }

    pub fn counts(&self) -> Channels<u64> {
        self.tags.map(|v| v.len() as u64)
    }

    pub fn len(&self) -> usize {
        Channel::ALL.iter().map(|&c| self.count(c)).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// All tags merged in (tick, channel) order.
    pub fn merged(&self) -> Vec<TimeTag> {
        let mut out: Vec<TimeTag> = Vec::with_capacity(self.len());
        for c in Channel::ALL {
            out.extend(self.tags[c].iter().map(|&tick| TimeTag { tick, channel: c }));
        }
        out.sort_unstable();
        out
    }

    pub fn into_channels(self) -> Channels<Vec<u64>> {
        self.tags
    }
}

/// Tags final up to (excluding) `horizon`; later chunks of the same stream
/// hold only ticks at or above it.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct TagChunk {
    pub tags: Channels<Vec<u64>>,
    pub horizon: u64,
}
