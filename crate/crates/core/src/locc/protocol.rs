use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::network::{init_network, NetworkState, RandomTape};
use super::transcript::{ebit_accounting, ProtocolTranscript};
use crate::error::{Error, Result};
use crate::states::{bell_tuple_decomposition, build_family, BellDecomposition, BellLabel, FamilyLabel, Pairing};
use crate::tensor::{trace_distance, CMatrix, DensityMatrix, PureState, STATE_TOL};

/// Largest register for which exact branch enumeration is offered.
pub const MAX_EXACT_QUBITS: usize = 6;
/// Largest register the simulator can prepare: the target plus one generated
/// pair must fit in the dense limit.
pub const MAX_PROTOCOL_QUBITS: usize = crate::tensor::MAX_QUBITS - 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum ProtocolMode {
    /// Every tape value and every teleportation outcome.
    Exact,
    /// Tape values drawn from a seeded generator, one Born-sampled branch each.
    Sampled { samples: usize, seed: u64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleBranch {
    pub probability: f64,
    pub tape_value: usize,
    /// Party `k` holds qubit `k`.
    pub state: PureState,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleResult {
    pub branches: Vec<EnsembleBranch>,
    pub mixed: DensityMatrix,
    pub singlets_used: usize,
}

impl EnsembleResult {
    pub fn total_probability(&self) -> f64 {
        self.branches.iter().map(|b| b.probability).sum()
    }
}

#[derive(Debug, Clone)]
pub struct Preparation {
    pub two_n: usize,
    pub label: FamilyLabel,
    pub mode: ProtocolMode,
    pub ensemble: EnsembleResult,
    /// One transcript per branch, in branch order.
    pub transcripts: Vec<ProtocolTranscript>,
    /// Bell tuples the shared tape selects from.
    pub support: BellDecomposition,
}

impl Preparation {
    pub fn distance_to_target(&self) -> Result<f64> {
        trace_distance(&self.ensemble.mixed, &build_family(self.two_n, self.label)?)
    }
}

/// Tape-selected Bell tuples generated by each pair's first party, with the
/// second half teleported to its partner over their singlet.
pub fn prepare_bcabe(two_n: usize, label: FamilyLabel, mode: ProtocolMode) -> Result<Preparation> {
    if two_n < 4 || !two_n.is_multiple_of(2) || two_n > MAX_PROTOCOL_QUBITS {
        return Err(Error::InvalidSize(two_n));
    }
    match mode {
        ProtocolMode::Exact if two_n > MAX_EXACT_QUBITS => {
            return Err(Error::Unsupported(format!(
                "exact enumeration is limited to {MAX_EXACT_QUBITS} qubits; use sampled mode"
            )));
        }
        ProtocolMode::Sampled { samples: 0, .. } => {
            return Err(Error::InvalidArgument("sampled mode needs at least one sample".into()));
        }
        _ => {}
    }

    let pairing = Pairing::consecutive(two_n)?;
    let support = bell_tuple_decomposition(&build_family(two_n, label)?, &pairing)?;
    let tape_bits = two_n - 2;
    let tape_values = 1usize << tape_bits;
    let uniform = 1.0 / tape_values as f64;
    if support.terms.len() != tape_values || support.terms.iter().any(|t| (t.weight - uniform).abs() > STATE_TOL) {
        return Err(Error::Unsupported(format!(
            "{label} is not a uniform mixture of {tape_values} Bell tuples"
        )));
    }
    let tuples: Vec<&[BellLabel]> = support.terms.iter().map(|t| t.tuple.as_slice()).collect();

    let runs: Vec<(f64, usize, NetworkState)> = match mode {
        ProtocolMode::Exact => (0..tape_values)
            .into_par_iter()
            .map(|t| {
                let runs = run_protocol(two_n, &pairing, &tuples, t, None)?;
                Ok(runs
                    .into_iter()
                    .map(|(p, net)| (p * uniform, t, net))
                    .collect::<Vec<_>>())
            })
            .collect::<Result<Vec<_>>>()?
            .into_iter()
            .flatten()
            .collect(),
        ProtocolMode::Sampled { samples, seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let w = 1.0 / samples as f64;
            let mut out = Vec::with_capacity(samples);
            for _ in 0..samples {
                let t = rng.random_range(0..tape_values);
                let (_, net) = run_protocol(two_n, &pairing, &tuples, t, Some(&mut rng))?
                    .pop()
                    .expect("one sampled branch");
                out.push((w, t, net));
            }
            out
        }
    };

    let dim = 1usize << two_n;
    let mut mixed = CMatrix::zeros(dim, dim);
    let mut branches = Vec::with_capacity(runs.len());
    let mut transcripts = Vec::with_capacity(runs.len());
    let mut singlets_used = 0;
    for (probability, tape_value, net) in runs {
        let state = net.party_ordered_state()?;
        add_outer(&mut mixed, &state, probability);
        let transcript = net.into_transcript();
        singlets_used = singlets_used.max(ebit_accounting(&transcript)?.total);
        transcripts.push(transcript);
        branches.push(EnsembleBranch {
            probability,
            tape_value,
            state,
        });
    }
    Ok(Preparation {
        two_n,
        label,
        mode,
        ensemble: EnsembleResult {
            branches,
            mixed: DensityMatrix::from_matrix_unchecked(mixed),
            singlets_used,
        },
        transcripts,
        support,
    })
}

/// One round per pair: the first party reads the whole tape, generates its
/// entry of the selected tuple and teleports the second half. With `rng`, a
/// single Born-sampled branch is followed and carries weight 1.
fn run_protocol(
    two_n: usize,
    pairing: &Pairing,
    tuples: &[&[BellLabel]],
    tape_value: usize,
    mut rng: Option<&mut ChaCha8Rng>,
) -> Result<Vec<(f64, NetworkState)>> {
    let tape_bits = two_n - 2;
    let net = init_network(two_n, pairing, RandomTape::from_value(tape_value, tape_bits))?;
    let mut live = vec![(1.0, net)];
    for (k, &(a, b)) in pairing.pairs().iter().enumerate() {
        let mut next = Vec::with_capacity(live.len() * 4);
        for (p, mut net) in live {
            let (sender, receiver) = (net.party(a)?, net.party(b)?);
            let bits = net.read_tape(sender, tape_bits)?;
            let index = bits.iter().fold(0usize, |acc, &bit| (acc << 1) | usize::from(bit));
            let (_, carried) = net.bell_generate(sender, tuples[index][k])?;
            let mut branches = net.teleport(sender, receiver, carried)?;
            match rng.as_deref_mut() {
                None => next.extend(branches.into_iter().map(|br| (p * br.probability, br.network))),
                Some(rng) => {
                    let u: f64 = rng.random();
                    let mut acc = 0.0;
                    let last = branches.len() - 1;
                    let pick = branches
                        .iter()
                        .position(|br| {
                            acc += br.probability;
                            u < acc
                        })
                        .unwrap_or(last);
                    next.push((p, branches.swap_remove(pick).network));
                }
            }
        }
        live = next;
    }
    Ok(live)
}

fn add_outer(m: &mut CMatrix, psi: &PureState, w: f64) {
    let v = psi.amplitudes();
    let dim = v.len();
    for c in 0..dim {
        let vc = v[c].conj() * w;
        if vc.norm_sqr() == 0.0 {
            continue;
        }
        for r in 0..dim {
            m[(r, c)] += v[r] * vc;
        }
    }
}
