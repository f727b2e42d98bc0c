//! The projection map and its relatives: single-qubit map specifications,
//! lifting to chosen qubit slots of an N-qubit operator, Choi matrices, the
//! Lindblad-form construction, and the analytic minimum output eigenvalue.

use std::collections::BTreeMap;

use num_complex::Complex64;
use thiserror::Error;

use crate::linalg::{ComplexMatrix, Pauli};

#[derive(Debug, Error)]
pub enum MapError {
    #[error("post-unitary is not unitary: |U U† - I| = {0:.3e}")]
    NotUnitary(f64),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("qubit index {qubit} out of range for {n_qubits} qubits")]
    QubitOutOfRange { qubit: usize, n_qubits: usize },
    #[error("parameter out of range: {0}")]
    OutOfRange(String),
}

#[derive(Clone, Debug, PartialEq)]
pub enum MapKind {
    Identity,
    Projection,
    /// Lambda = I + L with L the Lindblad dissipator built from the three
    /// Pauli jump operators weighted by (g1, g2, g3).
    Lindblad {
        g1: f64,
        g2: f64,
        g3: f64,
    },
}

/// A single-qubit linear map, optionally followed by a unitary conjugation.
#[derive(Clone, Debug, PartialEq)]
pub struct QubitMapSpec {
    kind: MapKind,
    post_unitary: Option<ComplexMatrix>,
}

impl QubitMapSpec {
    pub fn identity() -> Self {
        Self {
            kind: MapKind::Identity,
            post_unitary: None,
        }
    }

    pub fn projection() -> Self {
        Self {
            kind: MapKind::Projection,
            post_unitary: None,
        }
    }

    /// Lindblad-generated map with time-independent coefficients; the choice
    /// (1/4, 1/4, -1/4) reproduces the projection map on every input.
    pub fn lindblad(g1: f64, g2: f64, g3: f64) -> Self {
        Self {
            kind: MapKind::Lindblad { g1, g2, g3 },
            post_unitary: None,
        }
    }

    pub fn with_post_unitary(mut self, u: ComplexMatrix) -> Result<Self, MapError> {
        if u.dim() != 2 {
            return Err(MapError::DimensionMismatch(format!(
                "post-unitary must be 2x2, got {}x{}",
                u.dim(),
                u.dim()
            )));
        }
        let defect = u
            .matmul(&u.dagger())
            .sub(&ComplexMatrix::identity(2))
            .frobenius_norm();
        if defect > 1e-12 {
            return Err(MapError::NotUnitary(defect));
        }
        self.post_unitary = Some(u);
        Ok(self)
    }

    pub fn kind(&self) -> &MapKind {
        &self.kind
    }

    pub fn post_unitary(&self) -> Option<&ComplexMatrix> {
        self.post_unitary.as_ref()
    }

    /// Action on an arbitrary 2x2 matrix (linear on all of M2, not just states).
    pub fn apply(&self, x: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(x.dim(), 2, "single-qubit map acts on 2x2 matrices");
        let base = match &self.kind {
            MapKind::Identity => x.clone(),
            MapKind::Projection => {
                let avg = (x[(0, 0)] + x[(1, 1)]) * Complex64::new(0.5, 0.0);
                let mut out = x.clone();
                out[(0, 0)] = avg;
                out[(1, 1)] = avg;
                out
            }
            MapKind::Lindblad { g1, g2, g3 } => {
                // Lambda(X) = X + sum_i g_i (s_i X s_i - X), since s_i^2 = I.
                let mut out = x.clone();
                for (g, p) in [(g1, Pauli::X), (g2, Pauli::Y), (g3, Pauli::Z)] {
                    let s = p.matrix();
                    let term = s.matmul(x).matmul(&s).sub(x).scale_re(*g);
                    out = out.add(&term);
                }
                out
            }
        };
        match &self.post_unitary {
            Some(u) => u.matmul(&base).matmul(&u.dagger()),
            None => base,
        }
    }
}

/// Free-function alias for [`QubitMapSpec::lindblad`].
pub fn lindblad_projection(g1: f64, g2: f64, g3: f64) -> QubitMapSpec {
    QubitMapSpec::lindblad(g1, g2, g3)
}

/// An assignment of single-qubit maps to qubit slots; unassigned slots act
/// as the identity. Qubit 0 is the leftmost tensor factor.
#[derive(Clone, Debug)]
pub struct LiftedTerm {
    n_qubits: usize,
    assignment: BTreeMap<usize, QubitMapSpec>,
}

impl LiftedTerm {
    pub fn new(
        n_qubits: usize,
        assignment: impl IntoIterator<Item = (usize, QubitMapSpec)>,
    ) -> Result<Self, MapError> {
        let assignment: BTreeMap<usize, QubitMapSpec> = assignment.into_iter().collect();
        for &qubit in assignment.keys() {
            if qubit >= n_qubits {
                return Err(MapError::QubitOutOfRange { qubit, n_qubits });
            }
        }
        Ok(Self {
            n_qubits,
            assignment,
        })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn assigned_qubits(&self) -> impl Iterator<Item = usize> + '_ {
        self.assignment.keys().copied()
    }

    /// Apply the lifted map by matrix-unit substitution on each assigned
    /// qubit in turn; maps on distinct slots commute so order is irrelevant.
    pub fn apply(&self, rho: &ComplexMatrix) -> Result<ComplexMatrix, MapError> {
        let dim = 1usize << self.n_qubits;
        if rho.dim() != dim {
            return Err(MapError::DimensionMismatch(format!(
                "matrix dim {} does not match 2^{}",
                rho.dim(),
                self.n_qubits
            )));
        }
        let mut out = rho.clone();
        for (&qubit, spec) in &self.assignment {
            out = apply_on_qubit(spec, &out, qubit, self.n_qubits);
        }
        Ok(out)
    }
}

/// Apply a single-qubit map to one slot: group the matrix entries into 2x2
/// blocks indexed by the remaining qubits and substitute the map's action.
fn apply_on_qubit(
    spec: &QubitMapSpec,
    rho: &ComplexMatrix,
    qubit: usize,
    n_qubits: usize,
) -> ComplexMatrix {
    let dim = 1usize << n_qubits;
    let shift = n_qubits - 1 - qubit;
    let mask = 1usize << shift;
    let mut out = ComplexMatrix::zeros(dim);
    let mut block = ComplexMatrix::zeros(2);
    for rest_r in (0..dim).filter(|i| i & mask == 0) {
        for rest_c in (0..dim).filter(|j| j & mask == 0) {
            for a in 0..2 {
                for b in 0..2 {
                    block[(a, b)] = rho[(rest_r | (a << shift), rest_c | (b << shift))];
                }
            }
            let mapped = spec.apply(&block);
            for a in 0..2 {
                for b in 0..2 {
                    out[(rest_r | (a << shift), rest_c | (b << shift))] = mapped[(a, b)];
                }
            }
        }
    }
    out
}

/// Choi matrix C = (I ⊗ Λ)(|φ+><φ+|) with |φ+> = (|00> + |11>)/sqrt(2).
pub fn choi_matrix(spec: &QubitMapSpec) -> ComplexMatrix {
    let s = Complex64::new(1.0 / 2.0_f64.sqrt(), 0.0);
    let zero = Complex64::new(0.0, 0.0);
    let phi = ComplexMatrix::outer(&[s, zero, zero, s]);
    let term = LiftedTerm::new(2, [(1, spec.clone())]).expect("qubit 1 of 2");
    term.apply(&phi).expect("dimension matches")
}

/// Analytic minimum output eigenvalue of (I ⊗ P) on the pure state
/// sqrt(nu1)|00> + sqrt(nu2)|11> with nu2 = 1 - nu1:
/// (1 - sqrt(1 + 12 nu1 nu2)) / 4.
pub fn eta_min_analytic(nu1: f64) -> Result<f64, MapError> {
    if !(0.0..=1.0).contains(&nu1) {
        return Err(MapError::OutOfRange(format!("nu1 = {nu1} outside [0, 1]")));
    }
    let nu2 = 1.0 - nu1;
    Ok(0.25 * (1.0 - (1.0 + 12.0 * nu1 * nu2).sqrt()))
}
