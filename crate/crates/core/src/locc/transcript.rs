//! Event log of a protocol run, its line-delimited JSON form, the LOCC audit
//! and ebit accounting.

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::cuts::EdgeWeights;
use crate::error::{Error, Result};
use crate::states::BellLabel;

/// One of the spatially separated parties, numbered from 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PartyId(usize);

impl PartyId {
    pub fn new(index: usize, num_parties: usize) -> Result<Self> {
        if index == 0 || index > num_parties {
            return Err(Error::PartyOutOfRange(index));
        }
        Ok(Self(index))
    }

    pub fn index(self) -> usize {
        self.0
    }
}

impl fmt::Display for PartyId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "A{}", self.0)
    }
}

/// Qubit ids in events are network-global and never reused.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Event {
    NetworkInit {
        parties: usize,
    },
    /// A pre-shared `Φ+` pair; `qubits[0]` belongs to `party`, `qubits[1]` to `peer`.
    SingletShared {
        party: PartyId,
        peer: PartyId,
        qubits: [usize; 2],
    },
    BellGenerated {
        party: PartyId,
        qubits: [usize; 2],
        label: BellLabel,
    },
    TapeRead {
        party: PartyId,
        bits: Vec<u8>,
    },
    LocalUnitary {
        party: PartyId,
        qubits: Vec<usize>,
        name: String,
    },
    /// Destructive: the measured qubits leave the network.
    LocalMeasurement {
        party: PartyId,
        qubits: Vec<usize>,
        bits: Vec<u8>,
        probability: f64,
    },
    ClassicalMessage {
        party: PartyId,
        peer: PartyId,
        bits: Vec<u8>,
    },
    SingletConsumed {
        party: PartyId,
        peer: PartyId,
        qubits: [usize; 2],
    },
}

impl Event {
    pub fn kind(&self) -> &'static str {
        match self {
            Event::NetworkInit { .. } => "network_init",
            Event::SingletShared { .. } => "singlet_shared",
            Event::BellGenerated { .. } => "bell_generated",
            Event::TapeRead { .. } => "tape_read",
            Event::LocalUnitary { .. } => "local_unitary",
            Event::LocalMeasurement { .. } => "local_measurement",
            Event::ClassicalMessage { .. } => "classical_message",
            Event::SingletConsumed { .. } => "singlet_consumed",
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ProtocolTranscript {
    events: Vec<Event>,
}

impl ProtocolTranscript {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_events(events: Vec<Event>) -> Self {
        Self { events }
    }

    pub fn push(&mut self, event: Event) {
        self.events.push(event);
    }

    pub fn events(&self) -> &[Event] {
        &self.events
    }

    pub fn len(&self) -> usize {
        self.events.len()
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }

    /// One JSON object per line, each terminated by a newline.
    pub fn to_jsonl(&self) -> String {
        let mut out = String::new();
        for e in &self.events {
            out.push_str(&serde_json::to_string(e).expect("events serialize"));
            out.push('\n');
        }
        out
    }

    pub fn from_jsonl(text: &str) -> Result<Self> {
        let events = text
            .lines()
            .enumerate()
            .filter(|(_, l)| !l.trim().is_empty())
            .map(|(i, l)| serde_json::from_str(l).map_err(|e| Error::Transcript(format!("line {}: {e}", i + 1))))
            .collect::<Result<_>>()?;
        Ok(Self { events })
    }

    /// SHA-256 of the line-delimited form, hex encoded.
    pub fn digest(&self) -> String {
        hex::encode(Sha256::digest(self.to_jsonl().as_bytes()))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "result", rename_all = "snake_case")]
pub enum AuditOutcome {
    Pass,
    Violation {
        event_index: usize,
        kind: String,
        description: String,
    },
}

impl AuditOutcome {
    pub fn passed(&self) -> bool {
        matches!(self, AuditOutcome::Pass)
    }
}

#[derive(Clone, Copy, PartialEq)]
enum QubitStatus {
    Owned(PartyId),
    Retired,
}

struct SingletRecord {
    parties: (PartyId, PartyId),
    qubits: [usize; 2],
    consumed: bool,
}

/// Replays ownership from the transcript and checks that every quantum event
/// is local, every singlet was registered at set-up and none is spent twice.
pub fn locc_audit(transcript: &ProtocolTranscript) -> AuditOutcome {
    let mut parties: Option<usize> = None;
    let mut qubits: HashMap<usize, QubitStatus> = HashMap::new();
    let mut singlets: Vec<SingletRecord> = Vec::new();

    for (index, event) in transcript.events().iter().enumerate() {
        let violation = |kind: &str, description: String| AuditOutcome::Violation {
            event_index: index,
            kind: kind.to_string(),
            description,
        };

        if let Event::NetworkInit { parties: p } = event {
            if parties.is_some() {
                return violation("repeated network init", "network initialized twice".into());
            }
            parties = Some(*p);
            continue;
        }
        let Some(n) = parties else {
            return violation("missing network init", format!("{} before network_init", event.kind()));
        };

        let mut involved = Vec::new();
        match event {
            Event::SingletShared { party, peer, .. }
            | Event::ClassicalMessage { party, peer, .. }
            | Event::SingletConsumed { party, peer, .. } => involved.extend([*party, *peer]),
            Event::BellGenerated { party, .. }
            | Event::TapeRead { party, .. }
            | Event::LocalUnitary { party, .. }
            | Event::LocalMeasurement { party, .. } => involved.push(*party),
            Event::NetworkInit { .. } => unreachable!(),
        }
        if let Some(p) = involved.iter().find(|p| p.index() == 0 || p.index() > n) {
            return violation("party out of range", format!("{p} in a {n}-party network"));
        }

        match event {
            Event::SingletShared {
                party,
                peer,
                qubits: pair,
            } => {
                if party == peer {
                    return violation("invalid singlet", format!("singlet from {party} to itself"));
                }
                for (q, owner) in [(pair[0], *party), (pair[1], *peer)] {
                    if qubits.insert(q, QubitStatus::Owned(owner)).is_some() {
                        return violation("qubit reuse", format!("qubit {q} allocated twice"));
                    }
                }
                singlets.push(SingletRecord {
                    parties: (*party, *peer),
                    qubits: *pair,
                    consumed: false,
                });
            }
            Event::BellGenerated {
                party, qubits: pair, ..
            } => {
                for q in pair {
                    if qubits.insert(*q, QubitStatus::Owned(*party)).is_some() {
                        return violation("qubit reuse", format!("qubit {q} allocated twice"));
                    }
                }
            }
            Event::LocalUnitary {
                party, qubits: touched, ..
            }
            | Event::LocalMeasurement {
                party, qubits: touched, ..
            } => {
                for q in touched {
                    match qubits.get(q) {
                        Some(QubitStatus::Owned(owner)) if owner == party => {}
                        Some(QubitStatus::Owned(owner)) => {
                            return violation(
                                "nonlocal quantum operation",
                                format!("{party} acts on qubit {q} held by {owner}"),
                            );
                        }
                        Some(QubitStatus::Retired) => {
                            return violation("retired qubit", format!("{party} acts on measured-out qubit {q}"));
                        }
                        None => return violation("unknown qubit", format!("qubit {q} was never allocated")),
                    }
                }
                if matches!(event, Event::LocalMeasurement { .. }) {
                    for q in touched {
                        qubits.insert(*q, QubitStatus::Retired);
                    }
                }
            }
            Event::SingletConsumed {
                party,
                peer,
                qubits: pair,
            } => {
                let record = singlets.iter_mut().find(|s| {
                    let same_parties = s.parties == (*party, *peer) || s.parties == (*peer, *party);
                    let same_qubits = s.qubits == *pair || s.qubits == [pair[1], pair[0]];
                    same_parties && same_qubits
                });
                match record {
                    None => {
                        return violation(
                            "unregistered singlet",
                            format!("{party}-{peer} consumed a singlet on {pair:?} that was never shared"),
                        );
                    }
                    Some(r) if r.consumed => {
                        return violation(
                            "singlet double-spend",
                            format!("singlet {party}-{peer} on {pair:?} consumed twice"),
                        );
                    }
                    Some(r) => r.consumed = true,
                }
            }
            Event::TapeRead { .. } | Event::ClassicalMessage { .. } | Event::NetworkInit { .. } => {}
        }
    }
    AuditOutcome::Pass
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EbitAccount {
    pub total: usize,
    pub breakdown: EdgeWeights,
}

/// One ebit per consumed singlet, keyed by party pair.
pub fn ebit_accounting(transcript: &ProtocolTranscript) -> Result<EbitAccount> {
    let n = transcript
        .events()
        .iter()
        .find_map(|e| match e {
            Event::NetworkInit { parties } => Some(*parties),
            _ => None,
        })
        .unwrap_or(0);
    let mut breakdown = EdgeWeights::zeros(n);
    let mut total = 0;
    for e in transcript.events() {
        if let Event::SingletConsumed { party, peer, .. } = e {
            breakdown.add(party.index(), peer.index(), 1.0)?;
            total += 1;
        }
    }
    Ok(EbitAccount { total, breakdown })
}
