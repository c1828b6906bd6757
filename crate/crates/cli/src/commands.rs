use std::path::Path;

use bcabe_core::cuts::{analyze_cuts, cost_certificate, enumerate_cuts, EXACTNESS_TOL};
use bcabe_core::locc::{locc_audit, ProtocolMode};
use bcabe_core::states::{
    build_family, enumerate_parity_strings, ghz_basis, pauli_connection_search, recursion_rhs, smolin_state,
    PairPlacement, StringFamily,
};
use bcabe_core::tensor::{apply_unitary_on_subset, max_abs, trace_distance, CMatrix};
use bcabe_core::{DensityMatrix, FamilyLabel, QubitSubset};
use serde_json::json;

use crate::files::{write_text, Check, ReportFile, StateFile};
use crate::Failure;

/// Sampled preparations are compared with the target at this distance unless overridden.
const SAMPLED_TOLERANCE: f64 = 0.05;

fn finish(report: ReportFile, out: Option<&Path>) -> Result<(), Failure> {
    report.emit(out)?;
    if let Some(path) = out {
        let failed = report.payload.checks.iter().filter(|c| !c.passed).count();
        println!(
            "{}: {} checks, {failed} failed, report at {}",
            report.payload.command,
            report.payload.checks.len(),
            path.display()
        );
    }
    if report.payload.passed {
        Ok(())
    } else {
        Err(Failure::Check)
    }
}

pub fn state(size: usize, family: FamilyLabel, out: &Path) -> Result<(), Failure> {
    let rho = build_family(size, family)?;
    StateFile::from_density(&rho).write(out)?;
    println!("state: {family} on {size} qubits written to {}", out.display());
    Ok(())
}

pub fn verify(size: usize, tolerance: f64, out: Option<&Path>, tamper: bool) -> Result<(), Failure> {
    let mut families = Vec::with_capacity(4);
    for label in FamilyLabel::ALL {
        let mut rho = build_family(size, label)?;
        if tamper && label == FamilyLabel::RhoPlus {
            let noise = DensityMatrix::maximally_mixed(size)?;
            rho = DensityMatrix::mixture([(0.99, &rho), (0.01, &noise)])?;
        }
        families.push((label, rho));
    }
    let family = |l: FamilyLabel| &families.iter().find(|(x, _)| *x == l).expect("all four built").1;

    let mut checks = Vec::new();
    for (label, rho) in &families {
        for placement in [PairPlacement::Leading, PairPlacement::Trailing] {
            let d = trace_distance(rho, &recursion_rhs(size, *label, placement)?)?;
            checks.push(Check::below(format!("recursion {label} {placement:?}"), d, tolerance));
        }
    }

    for (i, (a, rho_a)) in families.iter().enumerate() {
        for (b, rho_b) in &families[i + 1..] {
            let overlap = (rho_a.matrix() * rho_b.matrix()).trace().norm();
            checks.push(Check::below(format!("orthogonality {a} {b}"), overlap, tolerance));
        }
    }

    let basis = ghz_basis(size)?;
    let cols: Vec<_> = basis.iter().map(|g| g.state().amplitudes().clone()).collect();
    let m = CMatrix::from_columns(&cols);
    let dim = 1usize << size;
    let gram = max_abs(&(m.adjoint() * &m - CMatrix::identity(dim, dim)));
    checks.push(Check::below("ghz basis gram residual", gram, tolerance));

    let mut connections = Vec::new();
    for a in FamilyLabel::ALL {
        for b in FamilyLabel::ALL.into_iter().filter(|&b| b != a) {
            let found = pauli_connection_search(a, b, size)?;
            let distance = match found {
                Some(c) => {
                    let moved = apply_unitary_on_subset(family(a), &c.pauli.matrix(), &QubitSubset::single(c.qubit)?)?;
                    trace_distance(&moved, family(b))?
                }
                None => 1.0,
            };
            connections.push(json!({ "from": a, "to": b, "connection": found }));
            checks.push(Check::below(
                format!("pauli connection {a} -> {b}"),
                distance,
                tolerance,
            ));
        }
    }

    for (label, rho) in &families {
        let mut worst = 0.0f64;
        for i in 1..=size {
            for j in (i + 1)..=size {
                let mut order: Vec<usize> = (1..=size).collect();
                order.swap(i - 1, j - 1);
                worst = worst.max(trace_distance(rho, &rho.permute_qubits(&order)?)?);
            }
        }
        checks.push(Check::below(
            format!("permutation invariance {label}"),
            worst,
            tolerance,
        ));
    }

    if size == 4 {
        let d = trace_distance(family(FamilyLabel::RhoPlus), &smolin_state())?;
        checks.push(Check::below("smolin equivalence", d, tolerance));
    }

    let strings = json!({
        "even_zero_count": enumerate_parity_strings(size, StringFamily::P)?.len(),
        "odd_zero_count": enumerate_parity_strings(size, StringFamily::Q)?.len(),
    });
    let report = ReportFile::new(
        "verify",
        json!({ "size": size }),
        json!({ "parity_strings": strings, "pauli_connections": connections }),
        json!({ "distance": tolerance }),
        checks,
    );
    finish(report, out)
}

pub fn cuts(size: usize, family: FamilyLabel, tolerance: f64, out: Option<&Path>) -> Result<(), Failure> {
    let rho = build_family(size, family)?;
    let reports = analyze_cuts(&rho, &enumerate_cuts(size, None)?)?;
    let mut checks = Vec::new();
    for r in &reports {
        match r.cut.smaller_side() {
            1 => checks.push(Check::below(format!("{} NPT", r.cut), r.min_pt_eigenvalue, -tolerance)),
            2 => checks.push(Check::at_least(
                format!("{} PPT", r.cut),
                r.min_pt_eigenvalue,
                -tolerance,
            )),
            _ => {}
        }
    }
    let report = ReportFile::new(
        "cuts",
        json!({ "size": size, "family": family }),
        json!({ "cuts": reports }),
        json!({ "npt_threshold": -tolerance }),
        checks,
    );
    finish(report, out)
}

pub fn certify(
    size: usize,
    family: FamilyLabel,
    mode: ProtocolMode,
    tolerance: Option<f64>,
    out: Option<&Path>,
    transcript_path: Option<&Path>,
) -> Result<(), Failure> {
    let tolerance = tolerance.unwrap_or(match mode {
        ProtocolMode::Exact => 1e-12,
        ProtocolMode::Sampled { .. } => SAMPLED_TOLERANCE,
    });
    let run = cost_certificate(size, family, mode)?;
    let cert = &run.certificate;
    let prep = &run.preparation;

    if let (Some(path), Some(first)) = (transcript_path, prep.transcripts.first()) {
        write_text(path, &first.to_jsonl())?;
    }
    let audit_failures = prep.transcripts.iter().filter(|t| !locc_audit(t).passed()).count();

    let mut checks = vec![
        Check::below(
            "lower bound equals achieved cost",
            (cert.lower_bound - cert.achieved).abs(),
            EXACTNESS_TOL,
        ),
        Check::below("transcripts failing the audit", audit_failures as f64, 0.5),
        Check::below("prepared state distance", cert.state_distance, tolerance),
    ];
    for j in &run.justifications {
        checks.push(Check::at_least(
            format!("{} requires one ebit", j.cut),
            j.required_ebits,
            1.0,
        ));
    }

    let report = ReportFile::new(
        "certify",
        json!({ "size": size, "family": family, "mode": mode }),
        json!({
            "certificate": cert,
            "justifications": run.justifications,
            "protocol": {
                "branches": prep.ensemble.branches.len(),
                "singlets_used": prep.ensemble.singlets_used,
                "support_tuples": prep.support.terms.len(),
                "transcript_path": transcript_path.map(|p| p.display().to_string()),
            },
        }),
        json!({ "state_distance": tolerance, "exactness": EXACTNESS_TOL }),
        checks,
    );
    finish(report, out)
}
