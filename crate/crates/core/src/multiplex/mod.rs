//! Source multiplexing: block multiplexing, binary delay networks with
//! collisions, relative-time matching and dump-the-pump cascades.

mod dtp;
mod matching;
mod network;
mod stream;

pub use dtp::{dtp_success_prob, simulate_dtp, DtpParams, DtpProbabilities};
pub use matching::{
    matching_rmux, maximum_matching, multi_stream_match, sliding_rmux, sliding_window_match, DelaySides, MatchResult, Pair,
};
pub use network::{
    extinction_to_z_error, route_with_delays, Collision, CollisionPolicy, DelayNetwork, RouteResult, SwitchModel,
};
pub use stream::{block_multiplex, standard_mux_pair_yield, standard_mux_prob, PhotonStream, RLE_HEADER};
