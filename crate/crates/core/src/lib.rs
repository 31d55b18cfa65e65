//! Polar codes with belief-propagation and successive-cancellation decoding
//! on permuted factor graphs.
//!
//! Permuting the `n` layers of the polar factor graph is equivalent to
//! permuting the bit indices of the code. This crate builds on that: an
//! ensemble of layer permutations is realised by permuting channel LLRs and
//! the frozen set, running an ordinary decoder, and undoing the index
//! permutation on the decisions.
//!
//! ```
//! use polar_perm::{bp_decode, AwgnChannel, BpConfig, PolarCode};
//! use polar_perm::channel::frame_rng;
//!
//! let code = PolarCode::construct(64, 32, 2.0).unwrap();
//! let payload = vec![1u8; 32];
//! let x = code.encode(&payload).unwrap();
//! let mut rng = frame_rng(7, 0, 0);
//! let llrs = AwgnChannel::from_ebno(6.0, code.rate()).unwrap().transmit(&x, &mut rng);
//! let res = bp_decode(&llrs, &code, BpConfig::default()).unwrap();
//! assert_eq!(code.extract_message(&res.u_hat).unwrap(), payload);
//! ```

pub mod bp;
pub mod channel;
pub mod crc;
pub mod ensemble;
pub mod error;
pub mod permutations;
pub mod polar_code;
pub mod sc;
pub mod selection;
pub mod sim;

pub use bp::{bp_decode, BpConfig, BpDecoder, BpResult, BpState, CheckRule, Termination};
pub use channel::AwgnChannel;
pub use crc::CrcSpec;
pub use ensemble::{pbp_decode, psc_decode, EnsemblePlan, EnsembleResult, PbpDecoder, PscDecoder};
pub use error::{Error, Result};
pub use permutations::{
    cyclic_shift_set, form_permutation_set, random_perm_set, IndexMap, LayerPermutation, PermFile,
};
pub use polar_code::{polar_transform, PolarCode};
pub use sc::{sc_decode, ScDecoder, ScResult};
pub use selection::{search_permutations, RankedPermSet, SearchConfig};
pub use sim::{run_point, run_sweep, DecoderSpec, FerRecord, LatencyModel, SimConfig};
