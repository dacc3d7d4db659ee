//! Heralded single-photon source coherence: analytic model, detector
//! averaging, time-tag simulation and coincidence estimation.

// `!(x > 0.0)` style checks are deliberate: they reject NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod coincidence_engine;
pub mod compare;
pub mod curve;
pub mod error;
pub mod gaussian_model;
pub mod piecewise;
pub mod tag_stream_sim;
pub mod tagfile;
pub mod tags;
pub mod time_averaging;

pub use coincidence_engine::{CoincidenceAccumulator, Coincidences, EstimatorConfig, LagGrid, LagHistogram};
pub use compare::{compare, CompareReport};
pub use curve::{CoherenceCurve, CurveKind, ParamsSnapshot};
pub use error::{Error, Result};
pub use gaussian_model::SpdcParams;
pub use tag_stream_sim::{simulate, SimConfig, Simulator};
pub use tags::{Channel, Channels, StreamHeader, TagChunk, TagStream, TimeTag};
pub use time_averaging::{Averager, DetectorParams, ResponseModel, WindowParams};
