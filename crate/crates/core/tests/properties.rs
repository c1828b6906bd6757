use bcabe_core::cuts::{analyze_cut, enumerate_cuts, lp_lower_bound, Classification, CutConstraintSet};
use bcabe_core::locc::{init_network, RandomTape};
use bcabe_core::states::{build_family, pauli_connection_search, BellLabel, FamilyLabel, Pairing};
use bcabe_core::tensor::{
    apply_unitary_on_subset, max_abs, partial_trace, partial_transpose, tensor_product, trace_distance, CMatrix,
    DensityMatrix, QubitSubset,
};
use num_complex::Complex64;
use proptest::prelude::*;

fn qubit_state(theta: f64, phi: f64, purity: f64) -> DensityMatrix {
    // Bloch vector of length `purity`.
    let (x, y, z) = (
        purity * theta.sin() * phi.cos(),
        purity * theta.sin() * phi.sin(),
        purity * theta.cos(),
    );
    let m = CMatrix::from_row_slice(
        2,
        2,
        &[
            Complex64::new((1.0 + z) / 2.0, 0.0),
            Complex64::new(x / 2.0, -y / 2.0),
            Complex64::new(x / 2.0, y / 2.0),
            Complex64::new((1.0 - z) / 2.0, 0.0),
        ],
    );
    DensityMatrix::new(m).unwrap()
}

fn product(params: &[(f64, f64, f64)]) -> DensityMatrix {
    params[1..]
        .iter()
        .fold(qubit_state(params[0].0, params[0].1, params[0].2), |acc, &(t, p, r)| {
            tensor_product(&acc, &qubit_state(t, p, r)).unwrap()
        })
}

fn rotation(theta: f64, a: f64, b: f64) -> CMatrix {
    let (c, s) = (Complex64::new(theta.cos(), 0.0), Complex64::new(theta.sin(), 0.0));
    let (ea, eb) = (Complex64::from_polar(1.0, a), Complex64::from_polar(1.0, b));
    CMatrix::from_row_slice(2, 2, &[c, -s * eb.conj(), s * ea, c * ea * eb.conj()])
}

fn bloch() -> impl Strategy<Value = (f64, f64, f64)> {
    (0.0..std::f64::consts::PI, 0.0..std::f64::consts::TAU, 0.0..=1.0f64)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn teleported_branches_agree(theta in 0.0..3.2f64, a in 0.0..6.3f64, b in 0.0..6.3f64) {
        let mut net = init_network(2, &Pairing::consecutive(2).unwrap(), RandomTape::new(vec![])).unwrap();
        let (a1, a2) = (net.party(1).unwrap(), net.party(2).unwrap());
        let (_, carried) = net.bell_generate(a1, BellLabel::PhiPlus).unwrap();
        net.local_unitary(a1, carried, &rotation(theta, a, b), "U").unwrap();
        let reference = partial_trace(&net.state().projector(), &QubitSubset::new(vec![1, 2]).unwrap()).unwrap();

        let branches = net.teleport(a1, a2, carried).unwrap();
        prop_assert_eq!(branches.len(), 4);
        let first = branches[0].network.party_ordered_state().unwrap();
        for br in &branches {
            prop_assert!((br.probability - 0.25).abs() < 1e-12);
            let st = br.network.party_ordered_state().unwrap();
            prop_assert!((1.0 - st.inner(&first).unwrap().norm()).abs() < 1e-12);
            prop_assert!(trace_distance(&st.projector(), &reference).unwrap() < 1e-12);
        }
    }

    #[test]
    fn partial_transpose_is_an_involution(
        params in prop::collection::vec(bloch(), 2..=4),
        mask in 0usize..16,
    ) {
        let rho = product(&params);
        let n = params.len();
        let side = QubitSubset::new((1..=n).filter(|q| mask & (1 << (q - 1)) != 0).collect()).unwrap();
        let once = DensityMatrix::new(partial_transpose(&rho, &side).unwrap()).unwrap();
        let twice = partial_transpose(&once, &side).unwrap();
        prop_assert!(max_abs(&(twice - rho.matrix())) < 1e-15);
    }

    #[test]
    fn partial_trace_inverts_tensor(left in prop::collection::vec(bloch(), 1..=3), right in prop::collection::vec(bloch(), 1..=2)) {
        let (a, b) = (product(&left), product(&right));
        let joint = tensor_product(&a, &b).unwrap();
        let (n, m) = (left.len(), right.len());
        let keep_a = partial_trace(&joint, &QubitSubset::new((n + 1..=n + m).collect()).unwrap()).unwrap();
        let keep_b = partial_trace(&joint, &QubitSubset::all(n)).unwrap();
        prop_assert!(max_abs(&(keep_a.matrix() - a.matrix())) < 1e-13);
        prop_assert!(max_abs(&(keep_b.matrix() - b.matrix())) < 1e-13);
    }

    #[test]
    fn local_unitaries_preserve_cut_class(theta in 0.0..3.2f64, a in 0.0..6.3f64, b in 0.0..6.3f64, q in 1usize..=4) {
        let rho = build_family(4, FamilyLabel::RhoPlus).unwrap();
        let rotated = apply_unitary_on_subset(&rho, &rotation(theta, a, b), &QubitSubset::single(q).unwrap()).unwrap();
        for cut in enumerate_cuts(4, None).unwrap() {
            let before = analyze_cut(&rho, &cut).unwrap();
            let after = analyze_cut(&rotated, &cut).unwrap();
            prop_assert_eq!(before.classification, after.classification);
            prop_assert!((before.negativity - after.negativity).abs() < 1e-10);
        }
    }

    #[test]
    fn lp_witness_matches_optimum(reqs in prop::collection::vec(0.0..3.0f64, 6)) {
        let mut set = CutConstraintSet::new(6);
        for (cut, r) in enumerate_cuts(6, Some(1)).unwrap().into_iter().zip(&reqs) {
            set.push(cut, *r).unwrap();
        }
        let lb = lp_lower_bound(&set).unwrap();
        prop_assert!(set.is_satisfied_by(&lb.witness, 1e-9));
        prop_assert!((lb.witness.total() - lb.value).abs() < 1e-9);
        // Each edge covers two 1:5 cuts, so half the total requirement is a floor.
        let floor = reqs.iter().sum::<f64>() / 2.0;
        prop_assert!(lb.value >= floor - 1e-9);
        let largest = reqs.iter().cloned().fold(0.0, f64::max);
        prop_assert!(lb.value >= largest - 1e-9);
    }
}

#[test]
fn pauli_connections_exist_for_every_pair() {
    for two_n in [4, 6] {
        for a in FamilyLabel::ALL {
            for b in FamilyLabel::ALL {
                if a == b {
                    assert!(pauli_connection_search(a, b, two_n).is_err());
                    continue;
                }
                let conn = pauli_connection_search(a, b, two_n).unwrap().expect("connection");
                let moved = apply_unitary_on_subset(
                    &build_family(two_n, a).unwrap(),
                    &conn.pauli.matrix(),
                    &QubitSubset::single(conn.qubit).unwrap(),
                )
                .unwrap();
                assert!(trace_distance(&moved, &build_family(two_n, b).unwrap()).unwrap() < 1e-12);
            }
        }
    }
}

#[test]
fn intermediate_cuts_are_reported() {
    // Three-versus-three cuts carry no expected class; they must still analyze.
    let rho = build_family(6, FamilyLabel::SigmaMinus).unwrap();
    let cuts = enumerate_cuts(6, Some(3)).unwrap();
    assert_eq!(cuts.len(), 10);
    for cut in cuts {
        let r = analyze_cut(&rho, &cut).unwrap();
        assert_eq!(r.negativity == 0.0, r.classification == Classification::Ppt);
    }
}
