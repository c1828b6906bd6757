//! Construction, cut analysis and LOCC preparation of Bell-correlated
//! activable bound entangled (BCABE) multi-qubit states.

pub mod cuts;
pub mod error;
pub mod locc;
pub mod states;
pub mod tensor;

pub use cuts::{Classification, CostCertificate, Cut, CutConstraintSet, CutReport, EdgeWeights};
pub use error::{Error, Result};
pub use locc::{PartyId, ProtocolMode, ProtocolTranscript};
pub use states::{BellLabel, FamilyLabel, Pairing};
pub use tensor::{DensityMatrix, Pauli, PureState, QubitSubset};
