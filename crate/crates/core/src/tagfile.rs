//! On-disk tag files.
//!
//! Binary layout, little-endian:
//!
//! | bytes | field |
//! |-------|-------|
//! | 4 | magic `HTAG` |
//! | 2 | version, `u16` = 1 |
//! | 8 | clock quantum in femtoseconds, `u64` |
//! | 8 | duration in ticks, `u64` |
//! | 1 | channel count, `u8` = 3 |
//!
//! followed by 9-byte records `(channel u8, tick u64)` in non-decreasing tick
//! order; equal ticks are written in channel order. Channels are numbered
//! `i = 0`, `s1 = 1`, `s2 = 2`.
//!
//! The CSV form is a `channel,tick` header followed by one row per tag.
//! It carries no clock quantum or duration; readers supply them.

use std::io::{self, BufRead, Read, Write};

use crate::error::{invalid, Error, Result};
use crate::tag_stream_sim::MAX_TICKS;
use crate::tags::{Channel, Channels, StreamHeader, TagChunk, TagStream, TimeTag};

pub const MAGIC: &[u8; 4] = b"HTAG";
pub const VERSION: u16 = 1;
pub const HEADER_LEN: u64 = 23;
pub const RECORD_LEN: u64 = 9;
const CHANNELS: u8 = 3;

fn to_fs(q: f64) -> Result<u64> {
    let fs = (q * 1e15).round();
    if !(fs >= 1.0 && fs < u64::MAX as f64) || ((fs / 1e15) / q - 1.0).abs() > 1e-9 {
        return Err(invalid(format!("clock quantum {q} s is not a whole number of femtoseconds")));
    }
    Ok(fs as u64)
}

/// Streaming binary writer.
pub struct TagWriter<W: Write> {
    out: W,
    header: StreamHeader,
    last: Option<TimeTag>,
    written: u64,
}

impl<W: Write> TagWriter<W> {
    pub fn new(mut out: W, header: StreamHeader) -> Result<Self> {
        out.write_all(MAGIC)?;
        out.write_all(&VERSION.to_le_bytes())?;
        out.write_all(&to_fs(header.clock_quantum)?.to_le_bytes())?;
        out.write_all(&header.duration_ticks.to_le_bytes())?;
        out.write_all(&[CHANNELS])?;
        Ok(TagWriter { out, header, last: None, written: 0 })
    }

    pub fn write_tag(&mut self, tag: TimeTag) -> Result<()> {
        if self.last.is_some_and(|l| tag < l) {
            return Err(invalid(format!("tag at tick {} written out of order", tag.tick)));
        }
        if tag.tick > self.header.duration_ticks {
            return Err(invalid(format!("tick {} beyond duration", tag.tick)));
        }
        let mut rec = [0u8; RECORD_LEN as usize];
        rec[0] = tag.channel.index() as u8;
        rec[1..].copy_from_slice(&tag.tick.to_le_bytes());
        self.out.write_all(&rec)?;
        self.last = Some(tag);
        self.written += 1;
        Ok(())
    }

    /// Writes one chunk; chunks must arrive in time order.
    pub fn write_chunk(&mut self, chunk: &Channels<Vec<u64>>) -> Result<()> {
        let mut merged: Vec<TimeTag> =
            Channel::ALL.iter().flat_map(|&c| chunk[c].iter().map(move |&tick| TimeTag { tick, channel: c })).collect();
        merged.sort_unstable();
        for t in merged {
            self.write_tag(t)?;
        }
        Ok(())
    }

    pub fn written(&self) -> u64 {
        self.written
    }

    pub fn finish(mut self) -> Result<W> {
        self.out.flush()?;
        Ok(self.out)
    }
}

pub fn write_stream<W: Write>(out: W, stream: &TagStream) -> Result<()> {
    let mut w = TagWriter::new(out, stream.header)?;
    for t in stream.merged() {
        w.write_tag(t)?;
    }
    w.finish()?;
    Ok(())
}

/// Fills `buf` completely; `Ok(false)` on a clean end of input before the
/// first byte, a format error on a partial read.
fn read_exact_or_eof<R: Read>(r: &mut R, buf: &mut [u8], offset: u64, what: &str) -> Result<bool> {
    let mut got = 0;
    while got < buf.len() {
        match r.read(&mut buf[got..]) {
            Ok(0) => break,
            Ok(n) => got += n,
            Err(e) if e.kind() == io::ErrorKind::Interrupted => {}
            Err(e) => return Err(e.into()),
        }
    }
    match got {
        0 => Ok(false),
        n if n == buf.len() => Ok(true),
        n => Err(Error::Format { offset: offset + n as u64, message: format!("truncated {what}") }),
    }
}

/// Streaming binary reader validating order and ranges as it goes.
pub struct TagReader<R: Read> {
    input: R,
    header: StreamHeader,
    offset: u64,
    last: Option<u64>,
    peeked: Option<TimeTag>,
}

impl<R: Read> TagReader<R> {
    pub fn new(mut input: R) -> Result<Self> {
        let mut h = [0u8; HEADER_LEN as usize];
        if !read_exact_or_eof(&mut input, &mut h, 0, "header")? {
            return Err(Error::Format { offset: 0, message: "empty file".into() });
        }
        if &h[..4] != MAGIC {
            return Err(Error::Format { offset: 0, message: "bad magic, expected HTAG".into() });
        }
        let version = u16::from_le_bytes([h[4], h[5]]);
        if version != VERSION {
            return Err(Error::Format { offset: 4, message: format!("unsupported version {version}") });
        }
        let fs = u64::from_le_bytes(h[6..14].try_into().unwrap());
        if fs == 0 {
            return Err(Error::Format { offset: 6, message: "zero clock quantum".into() });
        }
        let duration_ticks = u64::from_le_bytes(h[14..22].try_into().unwrap());
        if duration_ticks >= MAX_TICKS {
            return Err(Error::Format { offset: 14, message: "duration exceeds 2^62 ticks".into() });
        }
        if h[22] != CHANNELS {
            return Err(Error::Format { offset: 22, message: format!("expected 3 channels, found {}", h[22]) });
        }
        Ok(TagReader {
            input,
            header: StreamHeader { clock_quantum: fs as f64 / 1e15, duration_ticks, config_hash: None },
            offset: HEADER_LEN,
            last: None,
            peeked: None,
        })
    }

    pub fn header(&self) -> StreamHeader {
        self.header
    }

    /// Next record, or `None` at end of file.
    pub fn next_tag(&mut self) -> Result<Option<TimeTag>> {
        if let Some(t) = self.peeked.take() {
            return Ok(Some(t));
        }
        let mut rec = [0u8; RECORD_LEN as usize];
        let at = self.offset;
        if !read_exact_or_eof(&mut self.input, &mut rec, at, "record")? {
            return Ok(None);
        }
        self.offset += RECORD_LEN;
        let channel = Channel::from_index(rec[0])
            .ok_or_else(|| Error::Format { offset: at, message: format!("unknown channel {}", rec[0]) })?;
        let tick = u64::from_le_bytes(rec[1..].try_into().unwrap());
        if let Some(previous) = self.last {
            if tick < previous {
                return Err(Error::UnsortedFile { offset: at, tick, previous });
            }
        }
        if tick > self.header.duration_ticks {
            return Err(Error::Format { offset: at, message: format!("tick {tick} beyond duration") });
        }
        self.last = Some(tick);
        Ok(Some(TimeTag { tick, channel }))
    }

    /// Reads at least `min_tags` tags (fewer at end of file) and extends
    /// the chunk to the end of the last tick so the chunk horizon is exact.
    pub fn next_chunk(&mut self, min_tags: usize) -> Result<Option<TagChunk>> {
        let mut chunk = TagChunk::default();
        let mut n = 0;
        let mut last_tick = None;
        while let Some(t) = self.next_tag()? {
            if n >= min_tags && last_tick.is_some_and(|l| t.tick > l) {
                self.peeked = Some(t);
                chunk.horizon = t.tick;
                return Ok(Some(chunk));
            }
            chunk.tags[t.channel].push(t.tick);
            last_tick = Some(t.tick);
            n += 1;
        }
        if n == 0 {
            return Ok(None);
        }
        chunk.horizon = self.header.duration_ticks + 1;
        Ok(Some(chunk))
    }

    pub fn read_stream(mut self) -> Result<TagStream> {
        let mut tags: Channels<Vec<u64>> = Channels::default();
        while let Some(t) = self.next_tag()? {
            tags[t.channel].push(t.tick);
        }
        TagStream::new(self.header, tags)
    }
}

pub fn read_stream<R: Read>(input: R) -> Result<TagStream> {
    TagReader::new(input)?.read_stream()
}

pub fn write_csv<W: Write>(out: W, stream: &TagStream) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let err = |e: csv::Error| Error::Io(e.into());
    w.write_record(["channel", "tick"]).map_err(err)?;
    for t in stream.merged() {
        w.write_record([t.channel.name().to_string(), t.tick.to_string()]).map_err(err)?;
    }
    w.flush()?;
    Ok(())
}

/// Reads `channel,tick` rows. The duration defaults to the last tick.
pub fn read_csv<R: Read>(input: R, clock_quantum: f64, duration_ticks: Option<u64>) -> Result<TagStream> {
    let mut rd = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(input);
    let fmt = |offset: u64, message: String| Error::Format { offset, message };
    let headers = rd.headers().map_err(|e| fmt(0, e.to_string()))?.clone();
    if headers.len() != 2 || &headers[0] != "channel" || &headers[1] != "tick" {
        return Err(fmt(0, "expected header channel,tick".into()));
    }
    let mut tags: Channels<Vec<u64>> = Channels::default();
    let mut previous: Option<u64> = None;
    for rec in rd.records() {
        let rec = rec.map_err(|e| fmt(e.position().map(|p| p.byte()).unwrap_or(0), e.to_string()))?;
        let offset = rec.position().map(|p| p.byte()).unwrap_or(0);
        if rec.len() != 2 {
            return Err(fmt(offset, format!("expected 2 fields, found {}", rec.len())));
        }
        let channel: Channel = rec[0].parse().map_err(|e: Error| fmt(offset, e.to_string()))?;
        let tick: u64 = rec[1].parse().map_err(|_| fmt(offset, format!("bad tick {:?}", &rec[1])))?;
        if let Some(p) = previous {
            if tick < p {
                return Err(Error::UnsortedFile { offset, tick, previous: p });
            }
        }
        previous = Some(tick);
        tags[channel].push(tick);
    }
    let header = StreamHeader {
        clock_quantum,
        duration_ticks: duration_ticks.unwrap_or(previous.unwrap_or(0)),
        config_hash: None,
    };
    TagStream::new(header, tags)
}

/// Picks the binary or CSV reader from the first bytes.
pub fn read_any<R: BufRead>(mut input: R, csv_clock_quantum: f64) -> Result<TagStream> {
    if input.fill_buf()?.starts_with(MAGIC) {
        read_stream(input)
    } else {
        read_csv(input, csv_clock_quantum, None)
    }
}
