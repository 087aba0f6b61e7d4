//! Exact simulation of entanglement purification for logic-qubit Bell pairs,
//! where each logic qubit is an n-qubit GHZ state.
//!
//! The primary engine evolves mixed states as explicit ensembles of pure
//! branches ([`state::Ensemble`]). [`oracle`] is an independent dense
//! density-matrix path used to check it. [`harness`] drives sweeps,
//! Monte Carlo sampling and the verification suite behind the CLI.

pub mod density;
pub mod error;
pub mod gates;
pub mod harness;
pub mod noise;
pub mod oracle;
pub mod protocol;
pub mod register;
pub mod state;

pub use error::{Error, Result};
pub use noise::{ErrorKind, ErrorModel, LogicQubit};
pub use protocol::{ErrorBasis, ProtocolOutcome, PurifyConfig};
pub use state::{Bell, Ensemble, PureState};
