//! GME witness built from the detector: W = Phi_3(|GHZ><GHZ|), together with
//! its local-observable (Pauli) decomposition and the measurement-setting
//! count that makes it experimentally cheap.

use std::collections::BTreeMap;

use crate::detector::{apply_phi, phi_spec, DetectorError};
use crate::linalg::{pauli_expand, pauli_reconstruct, ComplexMatrix, PauliLabel};
use crate::states::{ghz, DensityState, GhzSign};

/// Hermitian witness operator with its Pauli expansion attached.
#[derive(Clone, Debug)]
pub struct WitnessOperator {
    matrix: ComplexMatrix,
    n_qubits: usize,
    pauli_terms: BTreeMap<PauliLabel, f64>,
}

impl WitnessOperator {
    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn pauli_terms(&self) -> &BTreeMap<PauliLabel, f64> {
        &self.pauli_terms
    }

    /// Tr(W rho). The product of two Hermitian operators has real trace.
    pub fn expectation(&self, rho: &DensityState) -> Result<f64, DetectorError> {
        if rho.dim() != self.matrix.dim() {
            return Err(DetectorError::Map(
                crate::maps::MapError::DimensionMismatch(format!(
                    "witness dim {} vs state dim {}",
                    self.matrix.dim(),
                    rho.dim()
                )),
            ));
        }
        Ok(self.matrix.trace_product_re(rho.matrix()))
    }

    /// JSON export: { "pauli_terms": { "<label>": coefficient } }.
    pub fn to_json(&self) -> String {
        let terms: BTreeMap<String, f64> = self
            .pauli_terms
            .iter()
            .map(|(label, &coef)| (label.to_string(), coef))
            .collect();
        serde_json::to_string_pretty(&serde_json::json!({ "pauli_terms": terms }))
            .expect("serializable")
    }
}

/// The tripartite witness Phi_3(|GHZ><GHZ|).
pub fn build_witness() -> Result<WitnessOperator, DetectorError> {
    build_witness_n(3)
}

/// Witness from the same pipeline for any qubit count: Phi_N(|GHZ_N><GHZ_N|).
pub fn build_witness_n(n_qubits: usize) -> Result<WitnessOperator, DetectorError> {
    let spec = phi_spec(n_qubits, None)?;
    let ghz_state = ghz(n_qubits, GhzSign::Plus)?;
    let matrix = apply_phi(&spec, ghz_state.matrix())?;
    let pauli_terms = pauli_expand(&matrix, n_qubits)?;
    Ok(WitnessOperator {
        matrix,
        n_qubits,
        pauli_terms,
    })
}

/// Grouping of the witness's correlation terms into measurement settings.
#[derive(Clone, Debug)]
pub struct MeasurementSettings {
    /// labels built from I and Z only; one Z-basis setting covers all of them
    pub z_basis_labels: Vec<PauliLabel>,
    /// remaining correlation labels, one setting each
    pub correlation_labels: Vec<PauliLabel>,
    /// total settings: (1 if any Z-basis label) + one per correlation label
    pub setting_count: usize,
}

/// Non-identity terms of the witness, partitioned by measurement basis.
pub fn measurement_settings(w: &WitnessOperator) -> MeasurementSettings {
    let mut z_basis_labels = Vec::new();
    let mut correlation_labels = Vec::new();
    for label in w.pauli_terms().keys() {
        if label.is_identity() {
            continue;
        }
        if label.is_z_type() {
            z_basis_labels.push(label.clone());
        } else {
            correlation_labels.push(label.clone());
        }
    }
    let setting_count = usize::from(!z_basis_labels.is_empty()) + correlation_labels.len();
    MeasurementSettings {
        z_basis_labels,
        correlation_labels,
        setting_count,
    }
}

/// Rebuild the witness matrix from its stored coefficients (used by tests to
/// pin the decomposition round trip).
pub fn reconstruct(w: &WitnessOperator) -> ComplexMatrix {
    pauli_reconstruct(w.pauli_terms(), w.n_qubits())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::detector::DETECT_TOL;
    use crate::linalg::{hermitian_eigenvalues, HERMITICITY_TOL};
    use crate::states::{maximally_mixed, random_biseparable};

    fn label(s: &str) -> PauliLabel {
        s.parse().unwrap()
    }

    #[test]
    fn witness_pauli_coefficients() {
        let w = build_witness().unwrap();
        let expect = [
            ("III", 7.0 / 8.0),
            ("ZZI", 1.0 / 8.0),
            ("ZIZ", 1.0 / 8.0),
            ("IZZ", 1.0 / 8.0),
            ("XXX", 3.0 / 8.0),
            ("XYY", -3.0 / 8.0),
            ("YXY", -3.0 / 8.0),
            ("YYX", -3.0 / 8.0),
        ];
        assert_eq!(w.pauli_terms().len(), expect.len());
        for (s, coef) in expect {
            let got = w.pauli_terms()[&label(s)];
            assert!((got - coef).abs() <= 1e-12, "{s}: {got} vs {coef}");
        }
    }

    #[test]
    fn witness_spectrum_and_trace() {
        let w = build_witness().unwrap();
        assert!((w.matrix().trace().re - 7.0).abs() <= 1e-12);
        let eigs = hermitian_eigenvalues(w.matrix(), HERMITICITY_TOL).unwrap();
        assert!((eigs[0] + 0.25).abs() <= 1e-9);
    }

    #[test]
    fn witness_reconstruction_round_trip() {
        let w = build_witness().unwrap();
        assert!(reconstruct(&w).max_abs_diff(w.matrix()) <= 1e-10);
    }

    #[test]
    fn expectation_values() {
        let w = build_witness().unwrap();
        let minus = ghz(3, GhzSign::Minus).unwrap();
        assert!((w.expectation(&minus).unwrap() + 0.25).abs() <= 1e-12);
        let mixed = maximally_mixed(3);
        assert!((w.expectation(&mixed).unwrap() - 0.875).abs() <= 1e-12);
        let plus = ghz(3, GhzSign::Plus).unwrap();
        assert!((w.expectation(&plus).unwrap() - 2.75).abs() <= 1e-12);
    }

    #[test]
    fn expectation_rejects_dimension_mismatch() {
        let w = build_witness().unwrap();
        let two_qubit = crate::states::bell_phi_plus();
        assert!(w.expectation(&two_qubit).is_err());
    }

    #[test]
    fn settings_grouping() {
        let w = build_witness().unwrap();
        let settings = measurement_settings(&w);
        assert_eq!(
            settings.z_basis_labels,
            vec![label("IZZ"), label("ZIZ"), label("ZZI")]
        );
        assert_eq!(settings.correlation_labels.len(), 4);
        assert_eq!(settings.setting_count, 5);
        assert!(settings.setting_count < 27);
    }

    #[test]
    fn witness_nonnegative_on_biseparable_samples() {
        let w = build_witness().unwrap();
        for seed in 0..100u64 {
            let sample = random_biseparable(3, 3, seed);
            let v = w.expectation(&sample.realized).unwrap();
            assert!(v >= -1e-9, "seed {seed}: {v}");
        }
    }

    #[test]
    fn adjointness_under_trace_inner_product() {
        // Tr[Phi(ghz) rho] = Tr[Phi(rho) ghz]
        let spec = phi_spec(3, None).unwrap();
        let ghz3 = ghz(3, GhzSign::Plus).unwrap();
        let phi_ghz = apply_phi(&spec, ghz3.matrix()).unwrap();
        for seed in 0..20u64 {
            let rho = random_biseparable(3, 2, seed).realized;
            let lhs = phi_ghz.trace_product_re(rho.matrix());
            let phi_rho = apply_phi(&spec, rho.matrix()).unwrap();
            let rhs = phi_rho.trace_product_re(ghz3.matrix());
            assert!((lhs - rhs).abs() <= 1e-12);
        }
    }

    #[test]
    fn quadripartite_witness_regression() {
        let w = build_witness_n(4).unwrap();
        assert!((w.matrix().trace().re - 31.0).abs() <= 1e-12);
        let eigs = hermitian_eigenvalues(w.matrix(), HERMITICITY_TOL).unwrap();
        assert!((eigs[0] + 0.625).abs() <= 1e-9);
        let iiii = w.pauli_terms()[&label("IIII")];
        assert!((iiii - 31.0 / 16.0).abs() <= 1e-12);
        assert!(reconstruct(&w).max_abs_diff(w.matrix()) <= 1e-10);
    }

    #[test]
    fn witness_has_negative_eigenvalue_and_detects() {
        let w = build_witness().unwrap();
        let minus = ghz(3, GhzSign::Minus).unwrap();
        let v = w.expectation(&minus).unwrap();
        assert!(v < -DETECT_TOL);
    }
}
