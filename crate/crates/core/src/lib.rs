//! Rate regions, outer bounds, capacity gaps and multiplexing gains for a
//! full-duplex base station serving an uplink mobile M1 and a downlink mobile
//! M2, where M1 can use an orthogonal side-channel to help M2 cancel the
//! inter-node interference.
//!
//! Four cancellation schemes are modelled: bin-and-cancel (BC),
//! compress-and-cancel (CC), decode-and-cancel (DC) and estimate-and-cancel
//! (EC), alongside the plain Z-channel without a side-channel.

pub mod analysis;
pub mod bounds;
pub mod error;
pub mod geometry;
pub mod model;
pub mod optimize;
pub mod schemes;
pub mod verify;

pub use error::{Error, Result};
pub use model::{
    cap, classify_regime, db_to_linear, linear_to_db, side_cap, ChannelParams, EcScale,
    PowerSplit, Regime, Split,
};
pub use schemes::{MacComponentRegions, RatePentagon, Scheme};
