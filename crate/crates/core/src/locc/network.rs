use num_complex::Complex64;

use super::transcript::{Event, PartyId, ProtocolTranscript};
use crate::cuts::correction_for;
use crate::error::{Error, Result};
use crate::states::{BellLabel, Pairing};
use crate::tensor::{
    apply_unitary_on_subset, tensor_product, CMatrix, CVector, PureState, QubitSubset, MAX_QUBITS,
    MIN_BRANCH_PROBABILITY,
};

/// Finite shared random string read front to back.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RandomTape {
    bits: Vec<bool>,
    cursor: usize,
}

impl RandomTape {
    pub fn new(bits: Vec<bool>) -> Self {
        Self { bits, cursor: 0 }
    }

    /// The low `len` bits of `value`, most significant first.
    pub fn from_value(value: usize, len: usize) -> Self {
        Self::new((0..len).rev().map(|k| (value >> k) & 1 == 1).collect())
    }

    pub fn remaining(&self) -> usize {
        self.bits.len() - self.cursor
    }

    pub fn read(&mut self, k: usize) -> Result<Vec<bool>> {
        if k > self.remaining() {
            return Err(Error::TapeExhausted {
                requested: k,
                remaining: self.remaining(),
            });
        }
        let out = self.bits[self.cursor..self.cursor + k].to_vec();
        self.cursor += k;
        Ok(out)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Singlet {
    pub parties: (PartyId, PartyId),
    /// Qubit ids, in the same order as `parties`.
    pub qubits: (usize, usize),
    pub consumed: bool,
}

/// Parties, their qubits, the global pure state and the singlet registry of a
/// single branch.
#[derive(Debug, Clone, PartialEq)]
pub struct NetworkState {
    num_parties: usize,
    /// Live qubit ids; `qubits[k]` is qubit `k+1` of `state`.
    qubits: Vec<usize>,
    owners: Vec<PartyId>,
    state: PureState,
    singlets: Vec<Singlet>,
    tapes: Vec<RandomTape>,
    next_qubit: usize,
    transcript: ProtocolTranscript,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TeleportBranch {
    pub outcome: BellLabel,
    pub probability: f64,
    /// Id of the receiver's qubit now carrying the teleported state.
    pub target_qubit: usize,
    pub network: NetworkState,
}

/// One `Φ+` singlet per pair of `pairing`; every party gets a copy of `tape`.
pub fn init_network(two_n: usize, pairing: &Pairing, tape: RandomTape) -> Result<NetworkState> {
    if pairing.num_qubits() != two_n || two_n < 2 {
        return Err(Error::InvalidPairing(format!(
            "pairing covers {} parties, network has {two_n}",
            pairing.num_qubits()
        )));
    }
    let mut transcript = ProtocolTranscript::new();
    transcript.push(Event::NetworkInit { parties: two_n });
    let phi = BellLabel::PhiPlus.state();
    let mut state: Option<PureState> = None;
    let mut qubits = Vec::new();
    let mut owners = Vec::new();
    let mut singlets = Vec::new();
    let mut next_qubit = 1;
    for &(a, b) in pairing.pairs() {
        let (pa, pb) = (PartyId::new(a, two_n)?, PartyId::new(b, two_n)?);
        let ids = (next_qubit, next_qubit + 1);
        next_qubit += 2;
        state = Some(match state {
            None => phi.clone(),
            Some(s) => tensor_product(&s, &phi)?,
        });
        qubits.extend([ids.0, ids.1]);
        owners.extend([pa, pb]);
        singlets.push(Singlet {
            parties: (pa, pb),
            qubits: ids,
            consumed: false,
        });
        transcript.push(Event::SingletShared {
            party: pa,
            peer: pb,
            qubits: [ids.0, ids.1],
        });
    }
    Ok(NetworkState {
        num_parties: two_n,
        qubits,
        owners,
        state: state.expect("pairing is nonempty"),
        singlets,
        tapes: vec![tape; two_n],
        next_qubit,
        transcript,
    })
}

impl NetworkState {
    pub fn num_parties(&self) -> usize {
        self.num_parties
    }

    pub fn party(&self, index: usize) -> Result<PartyId> {
        PartyId::new(index, self.num_parties)
    }

    pub fn live_qubits(&self) -> &[usize] {
        &self.qubits
    }

    pub fn owner(&self, qubit: usize) -> Option<PartyId> {
        self.position(qubit).map(|k| self.owners[k])
    }

    pub fn qubits_of(&self, party: PartyId) -> Vec<usize> {
        self.qubits
            .iter()
            .zip(&self.owners)
            .filter(|(_, o)| **o == party)
            .map(|(q, _)| *q)
            .collect()
    }

    pub fn state(&self) -> &PureState {
        &self.state
    }

    pub fn singlets(&self) -> &[Singlet] {
        &self.singlets
    }

    pub fn transcript(&self) -> &ProtocolTranscript {
        &self.transcript
    }

    pub fn into_transcript(self) -> ProtocolTranscript {
        self.transcript
    }

    fn position(&self, qubit: usize) -> Option<usize> {
        self.qubits.iter().position(|&q| q == qubit)
    }

    fn check_party(&self, party: PartyId) -> Result<()> {
        PartyId::new(party.index(), self.num_parties).map(|_| ())
    }

    /// Reads `k` bits from `party`'s copy of the shared tape.
    pub fn read_tape(&mut self, party: PartyId, k: usize) -> Result<Vec<bool>> {
        self.check_party(party)?;
        let bits = self.tapes[party.index() - 1].read(k)?;
        self.transcript.push(Event::TapeRead {
            party,
            bits: bits.iter().map(|&b| u8::from(b)).collect(),
        });
        Ok(bits)
    }

    /// Appends two fresh qubits in `label`, both held by `party`.
    pub fn bell_generate(&mut self, party: PartyId, label: BellLabel) -> Result<(usize, usize)> {
        self.check_party(party)?;
        if self.qubits.len() + 2 > MAX_QUBITS {
            return Err(Error::TooManyQubits(self.qubits.len() + 2));
        }
        let ids = (self.next_qubit, self.next_qubit + 1);
        self.next_qubit += 2;
        self.state = tensor_product(&self.state, &label.state())?;
        self.qubits.extend([ids.0, ids.1]);
        self.owners.extend([party, party]);
        self.transcript.push(Event::BellGenerated {
            party,
            qubits: [ids.0, ids.1],
            label,
        });
        Ok(ids)
    }

    /// Generator driven by the next two tape bits (`psi`, `minus`).
    pub fn bell_generate_from_tape(&mut self, party: PartyId) -> Result<(BellLabel, (usize, usize))> {
        let bits = self.read_tape(party, 2)?;
        let label = BellLabel::from_bits(bits[0], bits[1]);
        Ok((label, self.bell_generate(party, label)?))
    }

    /// Single-qubit unitary by the qubit's owner.
    pub fn local_unitary(&mut self, party: PartyId, qubit: usize, u: &CMatrix, name: &str) -> Result<()> {
        let k = self.owned_position(party, qubit)?;
        self.state = apply_unitary_on_subset(&self.state, u, &QubitSubset::single(k + 1)?)?;
        self.transcript.push(Event::LocalUnitary {
            party,
            qubits: vec![qubit],
            name: name.to_string(),
        });
        Ok(())
    }

    fn owned_position(&self, party: PartyId, qubit: usize) -> Result<usize> {
        self.check_party(party)?;
        match self.position(qubit) {
            Some(k) if self.owners[k] == party => Ok(k),
            _ => Err(Error::QubitNotOwned {
                qubit,
                party: party.index(),
            }),
        }
    }

    /// Projects qubits at positions `a < b` onto `label` and removes them.
    fn measure_bell(&self, a: usize, b: usize, label: BellLabel) -> (CVector, f64) {
        let n = self.qubits.len();
        let (bit_a, bit_b) = (1usize << (n - 1 - a), 1usize << (n - 1 - b));
        let amps = self.state.amplitudes();
        let mut out = CVector::zeros(1 << (n - 2));
        for (x, amp) in amps.iter().enumerate() {
            let w = label.amplitude(x & bit_a != 0, x & bit_b != 0);
            if w == 0.0 {
                continue;
            }
            // Drop the two measured bits, keeping the others in order.
            let mut r = 0usize;
            for k in 0..n {
                if k != a && k != b {
                    r = (r << 1) | ((x >> (n - 1 - k)) & 1);
                }
            }
            out[r] += amp * w;
        }
        let p = out.norm_squared();
        (out, p)
    }

    /// Teleports `qubit` from `sender` to `receiver` over their first unused
    /// singlet, returning every measurement branch with its probability.
    pub fn teleport(&self, sender: PartyId, receiver: PartyId, qubit: usize) -> Result<Vec<TeleportBranch>> {
        self.check_party(receiver)?;
        let q_pos = self.owned_position(sender, qubit)?;
        let (s_idx, s_half, r_half) = self
            .singlets
            .iter()
            .enumerate()
            .find_map(|(i, s)| match s.parties {
                _ if s.consumed => None,
                (x, y) if x == sender && y == receiver => Some((i, s.qubits.0, s.qubits.1)),
                (x, y) if x == receiver && y == sender => Some((i, s.qubits.1, s.qubits.0)),
                _ => None,
            })
            .ok_or(Error::NoAvailableSinglet(sender.index(), receiver.index()))?;
        if s_half == qubit {
            return Err(Error::InvalidArgument(format!(
                "qubit {qubit} is the singlet half itself"
            )));
        }
        let s_pos = self.position(s_half).expect("unconsumed singlet halves are live");

        let mut branches = Vec::with_capacity(4);
        for outcome in BellLabel::ALL {
            // Exchanging the two measured qubits only flips the sign of Ψ-,
            // a global phase, so position order does not matter.
            let (lo, hi) = (q_pos.min(s_pos), q_pos.max(s_pos));
            let (amps, probability) = self.measure_bell(lo, hi, outcome);
            if probability < MIN_BRANCH_PROBABILITY {
                continue;
            }
            let mut next = self.clone();
            next.state = PureState::from_vector_unchecked(amps / Complex64::new(probability.sqrt(), 0.0));
            for pos in [hi, lo] {
                next.qubits.remove(pos);
                next.owners.remove(pos);
            }
            let (x, z) = outcome.to_bits();
            let bits = vec![u8::from(x), u8::from(z)];
            next.singlets[s_idx].consumed = true;
            next.transcript.push(Event::SingletConsumed {
                party: sender,
                peer: receiver,
                qubits: [s_half, r_half],
            });
            next.transcript.push(Event::LocalMeasurement {
                party: sender,
                qubits: vec![qubit, s_half],
                bits: bits.clone(),
                probability,
            });
            next.transcript.push(Event::ClassicalMessage {
                party: sender,
                peer: receiver,
                bits,
            });
            let correction = correction_for(outcome);
            next.local_unitary(receiver, r_half, &correction.matrix(), correction.name())?;
            branches.push(TeleportBranch {
                outcome,
                probability,
                target_qubit: r_half,
                network: next,
            });
        }
        Ok(branches)
    }

    /// Final state with qubits reordered so that party `k` holds qubit `k`.
    /// Requires every party to hold exactly one live qubit.
    pub fn party_ordered_state(&self) -> Result<PureState> {
        let n = self.qubits.len();
        if n != self.num_parties {
            return Err(Error::InvalidArgument(format!(
                "{n} live qubits for {} parties",
                self.num_parties
            )));
        }
        // perm[k] = state position of party k+1's qubit.
        let mut perm = vec![usize::MAX; n];
        for (pos, owner) in self.owners.iter().enumerate() {
            let slot = &mut perm[owner.index() - 1];
            if *slot != usize::MAX {
                return Err(Error::InvalidArgument(format!("{owner} holds more than one qubit")));
            }
            *slot = pos;
        }
        let amps = self.state.amplitudes();
        let v = CVector::from_fn(1 << n, |y, _| {
            let mut x = 0usize;
            for (k, &pos) in perm.iter().enumerate() {
                if (y >> (n - 1 - k)) & 1 == 1 {
                    x |= 1 << (n - 1 - pos);
                }
            }
            amps[x]
        });
        Ok(PureState::from_vector_unchecked(v))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::locc::transcript::{ebit_accounting, locc_audit};
    use approx::assert_abs_diff_eq;

    fn two_party() -> NetworkState {
        init_network(2, &Pairing::consecutive(2).unwrap(), RandomTape::new(vec![])).unwrap()
    }

    fn overlap(a: &PureState, b: &PureState) -> f64 {
        a.inner(b).unwrap().norm()
    }

    #[test]
    fn initial_ownership() {
        let net = init_network(4, &Pairing::consecutive(4).unwrap(), RandomTape::new(vec![])).unwrap();
        assert_eq!(net.singlets().len(), 2);
        assert_eq!(net.live_qubits(), &[1, 2, 3, 4]);
        for q in 1..=4 {
            assert_eq!(net.owner(q).unwrap().index(), q);
        }
        assert!(Pairing::new(vec![(1, 2), (2, 3)], 4).is_err());
    }

    #[test]
    fn teleport_arbitrary_qubit() {
        // A rotated half of a generated pair stands in for an arbitrary qubit;
        // the pair it forms with the kept half must survive teleportation.
        let mut net = two_party();
        let a1 = net.party(1).unwrap();
        let a2 = net.party(2).unwrap();
        let (g1, g2) = net.bell_generate(a1, BellLabel::PhiPlus).unwrap();
        let theta = 0.7f64;
        let phase = Complex64::from_polar(1.0, 0.3);
        let (c, s) = (Complex64::new(theta.cos(), 0.0), Complex64::new(theta.sin(), 0.0));
        let u = nalgebra::DMatrix::from_row_slice(2, 2, &[c, -s * phase.conj(), s * phase, c]);
        net.local_unitary(a1, g2, &u, "R").unwrap();
        let before = net.state().clone();

        let branches = net.teleport(a1, a2, g2).unwrap();
        assert_eq!(branches.len(), 4);
        let reference = branches[0].network.party_ordered_state().unwrap();
        for b in &branches {
            assert_abs_diff_eq!(b.probability, 0.25, epsilon = 1e-12);
            assert_eq!(b.network.owner(b.target_qubit).unwrap(), a2);
            assert!(b.network.owner(g2).is_none());
            assert_eq!(b.network.owner(g1).unwrap(), a1);
            let st = b.network.party_ordered_state().unwrap();
            assert_abs_diff_eq!(overlap(&st, &reference), 1.0, epsilon = 1e-12);
        }
        // (g1, teleported qubit) afterwards equals (g1, g2) before; the
        // singlet occupies qubits 1 and 2 before teleporting.
        let kept = crate::tensor::partial_trace(&before.projector(), &QubitSubset::new(vec![1, 2]).unwrap()).unwrap();
        let after = reference.projector();
        assert!(crate::tensor::trace_distance(&kept, &after).unwrap() < 1e-12);
    }

    #[test]
    fn no_second_teleport() {
        let mut net = two_party();
        let (a1, a2) = (net.party(1).unwrap(), net.party(2).unwrap());
        let (_, g2) = net.bell_generate(a1, BellLabel::PhiPlus).unwrap();
        let mut next = net.teleport(a1, a2, g2).unwrap().remove(0).network;
        let (_, h2) = next.bell_generate(a1, BellLabel::PhiPlus).unwrap();
        assert_eq!(next.teleport(a1, a2, h2).unwrap_err(), Error::NoAvailableSinglet(1, 2));
        assert!(locc_audit(next.transcript()).passed());
        assert_eq!(ebit_accounting(next.transcript()).unwrap().total, 1);
    }

    #[test]
    fn sender_must_own_qubit() {
        let net = two_party();
        let (a1, a2) = (net.party(1).unwrap(), net.party(2).unwrap());
        assert_eq!(
            net.teleport(a1, a2, 2).unwrap_err(),
            Error::QubitNotOwned { qubit: 2, party: 1 }
        );
    }

    #[test]
    fn correlated_generation() {
        let tape = RandomTape::new(vec![true, false, false, true]);
        let mut net = init_network(4, &Pairing::consecutive(4).unwrap(), tape).unwrap();
        let (a1, a3) = (net.party(1).unwrap(), net.party(3).unwrap());
        let (l1, _) = net.bell_generate_from_tape(a1).unwrap();
        let (l3, _) = net.bell_generate_from_tape(a3).unwrap();
        assert_eq!(l1, l3);
        assert_eq!(l1, BellLabel::from_bits(true, false));
        assert!(net.read_tape(a1, 3).is_err());
    }

    #[test]
    fn generations_commute() {
        let mut a = two_party();
        let mut b = two_party();
        let (p1, p2) = (a.party(1).unwrap(), a.party(2).unwrap());
        a.bell_generate(p1, BellLabel::PhiPlus).unwrap();
        a.bell_generate(p2, BellLabel::PsiMinus).unwrap();
        b.bell_generate(p2, BellLabel::PsiMinus).unwrap();
        b.bell_generate(p1, BellLabel::PhiPlus).unwrap();
        // Same factors, different qubit ids: compare after swapping the two generated pairs.
        let rho_a = a.state().projector();
        let rho_b = b.state().projector().permute_qubits(&[1, 2, 5, 6, 3, 4]).unwrap();
        assert!(crate::tensor::trace_distance(&rho_a, &rho_b).unwrap() < 1e-12);
    }
}
