//! LOCC preparation of the families from pre-shared singlets.
//!
//! Each party is a separate holder of qubits. The only cross-party resources
//! are the `Φ+` singlets registered at set-up and classical messages, and every
//! step is logged so a run can be audited and its ebits counted afterwards.

mod network;
mod protocol;
mod transcript;

pub use network::{init_network, NetworkState, RandomTape, Singlet, TeleportBranch};
pub use protocol::{
    prepare_bcabe, EnsembleBranch, EnsembleResult, Preparation, ProtocolMode, MAX_EXACT_QUBITS, MAX_PROTOCOL_QUBITS,
};
pub use transcript::{ebit_accounting, locc_audit, AuditOutcome, EbitAccount, Event, PartyId, ProtocolTranscript};
