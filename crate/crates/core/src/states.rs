//! Constructors for the state families used throughout the crate, a random
//! biseparable-state sampler for property testing, and density-matrix
//! validity checks.
//!
//! Qubit 0 is the leftmost (most significant) tensor factor everywhere.

use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::{
    hermitian_eigenvalues, kron, pauli_operator, permute_qubits, ComplexMatrix, LinalgError,
    PauliLabel, HERMITICITY_TOL,
};

#[derive(Debug, Error)]
pub enum StateError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("not a valid density matrix: {0}")]
    NotDensity(String),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error("state file error: {0}")]
    Io(String),
}

/// Bloch components of a single qubit.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BlochVector {
    pub p1: f64,
    pub p2: f64,
    pub p3: f64,
}

impl BlochVector {
    pub fn new(p1: f64, p2: f64, p3: f64) -> Result<Self, StateError> {
        let norm_sq = p1 * p1 + p2 * p2 + p3 * p3;
        if norm_sq > 1.0 + 1e-12 {
            return Err(StateError::InvalidParameter(format!(
                "Bloch vector norm^2 = {norm_sq} exceeds 1"
            )));
        }
        Ok(Self { p1, p2, p3 })
    }
}

/// A validated N-qubit density matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityState {
    n_qubits: usize,
    matrix: ComplexMatrix,
}

impl DensityState {
    /// Wrap a matrix after checking Hermiticity, unit trace, and positivity.
    pub fn new(n_qubits: usize, matrix: ComplexMatrix) -> Result<Self, StateError> {
        let dim = 1usize << n_qubits;
        if matrix.dim() != dim {
            return Err(StateError::NotDensity(format!(
                "dimension {} does not match 2^{}",
                matrix.dim(),
                n_qubits
            )));
        }
        check_density(&matrix, 1e-10)?;
        Ok(Self { n_qubits, matrix })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn purity(&self) -> f64 {
        self.matrix.trace_product_re(&self.matrix)
    }

    /// Normalized pure state from a raw amplitude vector.
    pub fn from_amplitudes(n_qubits: usize, amps: &[Complex64]) -> Result<Self, StateError> {
        let dim = 1usize << n_qubits;
        if amps.len() != dim {
            return Err(StateError::InvalidParameter(format!(
                "amplitude vector length {} does not match 2^{}",
                amps.len(),
                n_qubits
            )));
        }
        let norm_sq: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
        if norm_sq <= 1e-24 {
            return Err(StateError::InvalidParameter(
                "amplitude vector is zero".into(),
            ));
        }
        let scale = 1.0 / norm_sq.sqrt();
        let normalized: Vec<Complex64> = amps.iter().map(|a| a * scale).collect();
        DensityState::new(n_qubits, ComplexMatrix::outer(&normalized))
    }
}

/// Check Hermiticity, unit trace, and positive semidefiniteness; the error
/// names the first failed check.
pub fn check_density(m: &ComplexMatrix, tol: f64) -> Result<(), StateError> {
    if let Err(e) = m.check_hermitian(HERMITICITY_TOL.max(tol * 0.01)) {
        return Err(StateError::NotDensity(e.to_string()));
    }
    let tr = m.trace();
    if (tr.re - 1.0).abs() > 1e-12 || tr.im.abs() > 1e-12 {
        return Err(StateError::NotDensity(format!(
            "trace = {} + {}i, expected 1",
            tr.re, tr.im
        )));
    }
    let eigs = hermitian_eigenvalues(m, HERMITICITY_TOL.max(tol)).map_err(StateError::from)?;
    if eigs[0] < -tol {
        return Err(StateError::NotDensity(format!(
            "negative eigenvalue {}",
            eigs[0]
        )));
    }
    Ok(())
}

/// Verdict-only wrapper around [`check_density`].
pub fn is_density(m: &ComplexMatrix, tol: f64) -> (bool, Option<String>) {
    match check_density(m, tol) {
        Ok(()) => (true, None),
        Err(e) => (false, Some(e.to_string())),
    }
}

/// Single-qubit state from Bloch components: (I + p·σ)/2.
pub fn qubit_from_bloch(v: BlochVector) -> DensityState {
    let c = Complex64::new;
    let m = ComplexMatrix::from_rows(&[
        vec![c((1.0 + v.p3) / 2.0, 0.0), c(v.p1 / 2.0, -v.p2 / 2.0)],
        vec![c(v.p1 / 2.0, v.p2 / 2.0), c((1.0 - v.p3) / 2.0, 0.0)],
    ]);
    DensityState::new(1, m).expect("Bloch ball point is always a valid state")
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GhzSign {
    Plus,
    Minus,
}

/// (|0...0> ± |1...1>)/sqrt(2) on n qubits.
pub fn ghz(n: usize, sign: GhzSign) -> Result<DensityState, StateError> {
    if n < 2 {
        return Err(StateError::InvalidParameter(format!(
            "GHZ needs at least 2 qubits, got {n}"
        )));
    }
    let dim = 1usize << n;
    let s = 1.0 / 2.0_f64.sqrt();
    let mut amps = vec![Complex64::new(0.0, 0.0); dim];
    amps[0] = Complex64::new(s, 0.0);
    amps[dim - 1] = Complex64::new(if sign == GhzSign::Plus { s } else { -s }, 0.0);
    DensityState::from_amplitudes(n, &amps)
}

/// cos(theta)|000> + sin(theta)|111>.
pub fn gen_ghz(theta: f64) -> DensityState {
    let mut amps = vec![Complex64::new(0.0, 0.0); 8];
    amps[0] = Complex64::new(theta.cos(), 0.0);
    amps[7] = Complex64::new(theta.sin(), 0.0);
    DensityState::from_amplitudes(3, &amps).expect("unit vector")
}

/// (|001> + |010> + |100>)/sqrt(3).
pub fn w_state() -> DensityState {
    let s = 1.0 / 3.0_f64.sqrt();
    let mut amps = vec![Complex64::new(0.0, 0.0); 8];
    for idx in [1usize, 2, 4] {
        amps[idx] = Complex64::new(s, 0.0);
    }
    DensityState::from_amplitudes(3, &amps).expect("unit vector")
}

/// Two-qubit maximally entangled state (|00> + |11>)/sqrt(2).
pub fn bell_phi_plus() -> DensityState {
    let s = 1.0 / 2.0_f64.sqrt();
    let amps = [
        Complex64::new(s, 0.0),
        Complex64::new(0.0, 0.0),
        Complex64::new(0.0, 0.0),
        Complex64::new(s, 0.0),
    ];
    DensityState::from_amplitudes(2, &amps).expect("unit vector")
}

/// Werner state p |phi+><phi+| + (1-p)/4 I.
pub fn werner(p: f64) -> Result<DensityState, StateError> {
    if !(0.0..=1.0).contains(&p) {
        return Err(StateError::InvalidParameter(format!(
            "Werner parameter p = {p} outside [0, 1]"
        )));
    }
    white_noise_mix(&bell_phi_plus(), p)
}

/// x * pure + (1-x) * I / 2^N.
pub fn white_noise_mix(pure: &DensityState, x: f64) -> Result<DensityState, StateError> {
    if !(0.0..=1.0).contains(&x) {
        return Err(StateError::InvalidParameter(format!(
            "noise mixing parameter x = {x} outside [0, 1]"
        )));
    }
    let dim = pure.dim();
    let m = pure
        .matrix()
        .scale_re(x)
        .add(&ComplexMatrix::identity(dim).scale_re((1.0 - x) / dim as f64));
    DensityState::new(pure.n_qubits(), m)
}

/// Maximally mixed state I / 2^N.
pub fn maximally_mixed(n_qubits: usize) -> DensityState {
    let dim = 1usize << n_qubits;
    DensityState::new(
        n_qubits,
        ComplexMatrix::identity(dim).scale_re(1.0 / dim as f64),
    )
    .expect("maximally mixed is a state")
}

/// Three-qubit family
/// (1/8)(III + r1(ZZI + ZIZ + IZZ) + r2 XXX + r3(XYY + YXY + YYX)) with
/// r1 = p1+p2-p3, r2 = p1-p2+3p3, r3 = -p1+p2+p3 under p1+p2+3p3 = 1.
///
/// All seven Pauli words commute, so the family diagonalizes in the GHZ-type
/// basis (|abc> ± |a̅b̅c̅>)/sqrt(2); its spectrum is {p1, p2, p3 x3, 0 x3},
/// so every point of the parameter simplex is a state. The constructor still
/// validates numerically as a cross-check.
pub fn bound_entangled(p1: f64, p2: f64, p3: f64) -> Result<DensityState, StateError> {
    for (name, p) in [("p1", p1), ("p2", p2), ("p3", p3)] {
        if !(0.0..=1.0).contains(&p) {
            return Err(StateError::InvalidParameter(format!(
                "{name} = {p} outside [0, 1]"
            )));
        }
    }
    let constraint = p1 + p2 + 3.0 * p3;
    if (constraint - 1.0).abs() > 1e-12 {
        return Err(StateError::InvalidParameter(format!(
            "p1 + p2 + 3 p3 = {constraint}, expected 1"
        )));
    }
    let r1 = p1 + p2 - p3;
    let r2 = p1 - p2 + 3.0 * p3;
    let r3 = -p1 + p2 + p3;
    let term = |label: &str| pauli_operator(&label.parse::<PauliLabel>().unwrap());
    let mut m = ComplexMatrix::identity(8);
    for label in ["ZZI", "ZIZ", "IZZ"] {
        m = m.add(&term(label).scale_re(r1));
    }
    m = m.add(&term("XXX").scale_re(r2));
    for label in ["XYY", "YXY", "YYX"] {
        m = m.add(&term(label).scale_re(r3));
    }
    m = m.scale_re(1.0 / 8.0);
    match check_density(&m, 1e-10) {
        Ok(()) => Ok(DensityState {
            n_qubits: 3,
            matrix: m,
        }),
        Err(e) => Err(StateError::NotDensity(format!(
            "bound-entangled point (p1={p1}, p2={p2}, p3={p3}) rejected: {e}"
        ))),
    }
}

/// Quadripartite SLOCC-class state with amplitudes
/// (a+d)/2 on |0000>, |1111>; (a-d)/2 on |0011>, -(a-d)/2 on |1100>;
/// (b+c)/2 on |0101>, |1010>; (b-c)/2 on |0110>, |1001>; normalized.
pub fn g_abcd(
    a: Complex64,
    b: Complex64,
    c: Complex64,
    d: Complex64,
) -> Result<DensityState, StateError> {
    let half = Complex64::new(0.5, 0.0);
    let apd = (a + d) * half;
    let amd = (a - d) * half;
    let bpc = (b + c) * half;
    let bmc = (b - c) * half;
    let mut amps = vec![Complex64::new(0.0, 0.0); 16];
    amps[0b0000] = apd;
    amps[0b1111] = apd;
    amps[0b0011] = amd;
    amps[0b1100] = -amd;
    amps[0b0101] = bpc;
    amps[0b1010] = bpc;
    amps[0b0110] = bmc;
    amps[0b1001] = bmc;
    DensityState::from_amplitudes(4, &amps)
        .map_err(|_| StateError::InvalidParameter("G_abcd parameters are all zero".into()))
}

/// One term of a biseparable mixture: weight * (state on `partition`) tensor
/// (state on the complement), reassembled in global qubit order.
#[derive(Clone, Debug)]
pub struct BiseparableTerm {
    pub weight: f64,
    pub partition: Vec<usize>,
    pub left: DensityState,
    pub right: DensityState,
}

/// A sampled biseparable state together with its decomposition record.
#[derive(Clone, Debug)]
pub struct BiseparableSample {
    pub n_qubits: usize,
    pub terms: Vec<BiseparableTerm>,
    pub realized: DensityState,
}

fn random_pure(rng: &mut ChaCha8Rng, n_qubits: usize) -> DensityState {
    let dim = 1usize << n_qubits;
    let amps: Vec<Complex64> = (0..dim)
        .map(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
        .collect();
    DensityState::from_amplitudes(n_qubits, &amps).expect("Gaussian vector is nonzero a.s.")
}

/// Assemble left (on `partition`, sorted) tensor right (on the complement)
/// back into global qubit order.
pub fn assemble_bipartite(
    n_qubits: usize,
    partition: &[usize],
    left: &DensityState,
    right: &DensityState,
) -> ComplexMatrix {
    let complement: Vec<usize> = (0..n_qubits).filter(|q| !partition.contains(q)).collect();
    let product = kron(left.matrix(), right.matrix());
    let mut perm: Vec<usize> = partition.to_vec();
    perm.extend(&complement);
    permute_qubits(&product, &perm)
}

/// Deterministic sampler over the biseparable set: each term draws a uniform
/// nonempty proper bipartition, Haar-like pure factors on both sides, and
/// simplex-uniform weights.
pub fn random_biseparable(n_qubits: usize, n_terms: usize, seed: u64) -> BiseparableSample {
    assert!(n_qubits >= 2, "biseparability needs at least 2 qubits");
    assert!(n_terms >= 1, "need at least one term");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let full = (1usize << n_qubits) - 1;

    let mut weights: Vec<f64> = (0..n_terms)
        .map(|_| -(rng.gen_range(1e-12..1.0_f64)).ln())
        .collect();
    let total: f64 = weights.iter().sum();
    for w in &mut weights {
        *w /= total;
    }

    let dim = 1usize << n_qubits;
    let mut realized = ComplexMatrix::zeros(dim);
    let mut terms = Vec::with_capacity(n_terms);
    for weight in weights {
        let subset_mask = rng.gen_range(1..full); // nonempty proper subset
        let partition: Vec<usize> = (0..n_qubits)
            .filter(|q| subset_mask >> q & 1 == 1)
            .collect();
        let left = random_pure(&mut rng, partition.len());
        let right = random_pure(&mut rng, n_qubits - partition.len());
        let product = assemble_bipartite(n_qubits, &partition, &left, &right);
        realized = realized.add(&product.scale_re(weight));
        terms.push(BiseparableTerm {
            weight,
            partition,
            left,
            right,
        });
    }
    let realized =
        DensityState::new(n_qubits, realized).expect("convex mixture of product states is a state");
    BiseparableSample {
        n_qubits,
        terms,
        realized,
    }
}

/// On-disk JSON representation: row-major entries as [re, im] pairs.
#[derive(Serialize, Deserialize)]
pub struct StateFile {
    pub n_qubits: usize,
    pub matrix: Vec<Vec<[f64; 2]>>,
}

impl StateFile {
    pub fn from_state(state: &DensityState) -> Self {
        let dim = state.dim();
        let matrix = (0..dim)
            .map(|i| {
                (0..dim)
                    .map(|j| {
                        let z = state.matrix()[(i, j)];
                        [z.re, z.im]
                    })
                    .collect()
            })
            .collect();
        Self {
            n_qubits: state.n_qubits(),
            matrix,
        }
    }

    pub fn into_state(self) -> Result<DensityState, StateError> {
        let dim = 1usize << self.n_qubits;
        if self.matrix.len() != dim || self.matrix.iter().any(|row| row.len() != dim) {
            return Err(StateError::Io(format!(
                "matrix shape does not match n_qubits = {}",
                self.n_qubits
            )));
        }
        let m = ComplexMatrix::from_fn(dim, |i, j| {
            Complex64::new(self.matrix[i][j][0], self.matrix[i][j][1])
        });
        DensityState::new(self.n_qubits, m)
    }
}

impl DensityState {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&StateFile::from_state(self)).expect("serializable")
    }

    pub fn from_json(text: &str) -> Result<Self, StateError> {
        let file: StateFile =
            serde_json::from_str(text).map_err(|e| StateError::Io(e.to_string()))?;
        file.into_state()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_4, PI};

    #[test]
    fn bloch_origin_is_maximally_mixed() {
        let rho = qubit_from_bloch(BlochVector::new(0.0, 0.0, 0.0).unwrap());
        assert!(
            rho.matrix()
                .max_abs_diff(&ComplexMatrix::identity(2).scale_re(0.5))
                <= 0.0
        );
    }

    #[test]
    fn bloch_north_pole_is_ground_state() {
        let rho = qubit_from_bloch(BlochVector::new(0.0, 0.0, 1.0).unwrap());
        assert_eq!(rho.matrix()[(0, 0)].re, 1.0);
        assert_eq!(rho.matrix()[(1, 1)].re, 0.0);
    }

    #[test]
    fn bloch_surface_point_is_pure() {
        let s = 1.0 / 3.0_f64.sqrt();
        let rho = qubit_from_bloch(BlochVector::new(s, s, s).unwrap());
        let eigs = hermitian_eigenvalues(rho.matrix(), HERMITICITY_TOL).unwrap();
        assert!(eigs[0].abs() <= 1e-12);
        assert!((eigs[1] - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn bloch_rejects_outside_ball() {
        assert!(BlochVector::new(1.0, 0.5, 0.0).is_err());
    }

    #[test]
    fn ghz_corners() {
        let rho = ghz(3, GhzSign::Plus).unwrap();
        for (i, j) in [(0, 0), (0, 7), (7, 0), (7, 7)] {
            assert!((rho.matrix()[(i, j)].re - 0.5).abs() <= 1e-15);
        }
        let minus = ghz(3, GhzSign::Minus).unwrap();
        assert!((minus.matrix()[(0, 7)].re + 0.5).abs() <= 1e-15);
        assert!((minus.matrix()[(7, 0)].re + 0.5).abs() <= 1e-15);
    }

    #[test]
    fn ghz4_is_pure() {
        let rho = ghz(4, GhzSign::Plus).unwrap();
        assert!((rho.purity() - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn ghz_rejects_single_qubit() {
        assert!(ghz(1, GhzSign::Plus).is_err());
    }

    #[test]
    fn gen_ghz_at_quarter_pi_is_ghz() {
        let a = gen_ghz(FRAC_PI_4);
        let b = ghz(3, GhzSign::Plus).unwrap();
        assert!(a.matrix().max_abs_diff(b.matrix()) <= 1e-12);
    }

    #[test]
    fn gen_ghz_endpoints_and_coherence() {
        let zero = gen_ghz(0.0);
        assert!((zero.matrix()[(0, 0)].re - 1.0).abs() <= 1e-15);
        let t = gen_ghz(0.6);
        let expect = 0.6_f64.cos() * 0.6_f64.sin();
        assert!((expect - 0.46601954768).abs() <= 1e-8);
        assert!((t.matrix()[(0, 7)].re - expect).abs() <= 1e-12);
    }

    #[test]
    fn w_state_layout() {
        let rho = w_state();
        let third = 1.0 / 3.0;
        for k in 0..8 {
            let expect = if [1, 2, 4].contains(&k) { third } else { 0.0 };
            assert!((rho.matrix()[(k, k)].re - expect).abs() <= 1e-12);
        }
        assert!((rho.purity() - 1.0).abs() <= 1e-12);
        for (i, j) in [(1, 2), (1, 4), (2, 4), (2, 1), (4, 1), (4, 2)] {
            assert!((rho.matrix()[(i, j)].re - third).abs() <= 1e-12);
        }
    }

    #[test]
    fn werner_limits_and_midpoint() {
        let mixed = werner(0.0).unwrap();
        assert!(
            mixed
                .matrix()
                .max_abs_diff(&ComplexMatrix::identity(4).scale_re(0.25))
                <= 1e-15
        );
        let pure = werner(1.0).unwrap();
        assert!(pure.matrix().max_abs_diff(bell_phi_plus().matrix()) <= 1e-15);
        let mid = werner(0.5).unwrap();
        for (k, expect) in [0.375, 0.125, 0.125, 0.375].iter().enumerate() {
            assert!((mid.matrix()[(k, k)].re - expect).abs() <= 1e-15);
        }
        assert!((mid.matrix()[(0, 3)].re - 0.25).abs() <= 1e-15);
        assert!(werner(1.2).is_err());
    }

    #[test]
    fn white_noise_mix_cases() {
        let ghz3 = ghz(3, GhzSign::Plus).unwrap();
        let same = white_noise_mix(&ghz3, 1.0).unwrap();
        assert!(same.matrix().max_abs_diff(ghz3.matrix()) <= 1e-15);
        let mixed = white_noise_mix(&ghz3, 0.0).unwrap();
        assert!(mixed.matrix().max_abs_diff(maximally_mixed(3).matrix()) <= 1e-15);
        let half = white_noise_mix(&ghz3, 0.5).unwrap();
        assert!((half.matrix()[(0, 7)].re - 0.25).abs() <= 1e-15);
        assert!((half.matrix()[(0, 0)].re - 0.3125).abs() <= 1e-15);
        for k in 1..7 {
            assert!((half.matrix()[(k, k)].re - 0.0625).abs() <= 1e-15);
        }
        assert!(white_noise_mix(&ghz3, -0.1).is_err());
    }

    #[test]
    fn bound_entangled_reference_point() {
        // p1 = p2 = 0, p3 = 1/3 gives r = (-1/3, 1, 1/3)
        let rho = bound_entangled(0.0, 0.0, 1.0 / 3.0).unwrap();
        assert!((rho.matrix().trace().re - 1.0).abs() <= 1e-12);
        let coeffs = crate::linalg::pauli_expand(rho.matrix(), 3).unwrap();
        let get = |s: &str| coeffs[&s.parse::<PauliLabel>().unwrap()];
        assert!((get("III") - 0.125).abs() <= 1e-14);
        for label in ["ZZI", "ZIZ", "IZZ"] {
            assert!((get(label) - (-1.0 / 3.0) / 8.0).abs() <= 1e-14);
        }
        assert!((get("XXX") - 0.125).abs() <= 1e-14);
        for label in ["XYY", "YXY", "YYX"] {
            assert!((get(label) - (1.0 / 3.0) / 8.0).abs() <= 1e-14);
        }
        assert_eq!(coeffs.len(), 8);
    }

    #[test]
    fn bound_entangled_rejects_constraint_violation() {
        assert!(bound_entangled(0.5, 0.5, 0.5).is_err());
    }

    #[test]
    fn bound_entangled_spectrum_closed_form() {
        // spectrum {p1, p2, p3 x3, 0 x3} from the common GHZ-type eigenbasis
        for (p1, p2) in [(0.0, 0.0), (0.1, 0.3), (0.25, 0.25), (0.0, 0.9), (0.7, 0.1)] {
            let p3 = (1.0 - p1 - p2) / 3.0;
            let rho = bound_entangled(p1, p2, p3).unwrap();
            let mut expect = [p1, p2, p3, p3, p3, 0.0, 0.0, 0.0];
            expect.sort_by(|a, b| a.partial_cmp(b).unwrap());
            let eigs = hermitian_eigenvalues(rho.matrix(), HERMITICITY_TOL).unwrap();
            for (e, n) in expect.iter().zip(&eigs) {
                assert!((e - n).abs() <= 1e-12, "({p1},{p2}): {e} vs {n}");
            }
        }
    }

    #[test]
    fn bound_entangled_ppt_region_on_grid() {
        // All three partial transposes share the spectrum
        // {(p1+p2±p3)/2, (p3±(p1-p2))/2, p3 x2, 0 x2}, so the family is PPT
        // exactly when p3 <= 1/4 and |p1 - p2| <= p3. The numeric route must
        // agree with that condition at every grid point.
        use crate::linalg::partial_transpose;
        let mut ppt_points = 0;
        let mut npt_points = 0;
        for i in 0..=20 {
            for j in 0..=20 {
                let p1 = i as f64 * 0.05;
                let p2 = j as f64 * 0.05;
                let p3 = (1.0 - p1 - p2) / 3.0;
                if p3 < 0.0 {
                    continue;
                }
                let rho = bound_entangled(p1, p2, p3).unwrap();
                let analytic_ppt = p3 <= 0.25 + 1e-9 && (p1 - p2).abs() <= p3 + 1e-9;
                let mut min_pt = f64::INFINITY;
                for q in 0..3 {
                    let pt = partial_transpose(rho.matrix(), q, 3).unwrap();
                    min_pt = min_pt.min(hermitian_eigenvalues(&pt, HERMITICITY_TOL).unwrap()[0]);
                }
                let numeric_ppt = min_pt >= -1e-9;
                assert_eq!(
                    numeric_ppt, analytic_ppt,
                    "({p1},{p2}): min PT eigenvalue {min_pt}"
                );
                if analytic_ppt {
                    ppt_points += 1;
                } else {
                    npt_points += 1;
                }
            }
        }
        // both sides of the boundary must actually be exercised
        assert!(ppt_points > 20, "{ppt_points}");
        assert!(npt_points > 20, "{npt_points}");
    }

    #[test]
    fn g_abcd_reduces_to_ghz4() {
        let s = Complex64::new(1.0 / 2.0_f64.sqrt(), 0.0);
        let zero = Complex64::new(0.0, 0.0);
        let rho = g_abcd(s, zero, zero, s).unwrap();
        let ghz4 = ghz(4, GhzSign::Plus).unwrap();
        assert!(rho.matrix().max_abs_diff(ghz4.matrix()) <= 1e-12);
    }

    #[test]
    fn g_abcd_equal_parameters() {
        let q = Complex64::new(0.5, 0.0);
        let rho = g_abcd(q, q, q, q).unwrap();
        // (|0000> + |0101> + |1010> + |1111>)/2
        for idx in [0b0000usize, 0b0101, 0b1010, 0b1111] {
            assert!((rho.matrix()[(idx, idx)].re - 0.25).abs() <= 1e-12);
        }
        assert!((rho.matrix().trace().re - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn g_abcd_rejects_all_zero() {
        let z = Complex64::new(0.0, 0.0);
        assert!(g_abcd(z, z, z, z).is_err());
    }

    #[test]
    fn random_biseparable_is_self_consistent() {
        for seed in 0..5u64 {
            let sample = random_biseparable(3, 4, seed);
            let mut rebuilt = ComplexMatrix::zeros(8);
            let mut total = 0.0;
            for term in &sample.terms {
                total += term.weight;
                let product = assemble_bipartite(3, &term.partition, &term.left, &term.right);
                rebuilt = rebuilt.add(&product.scale_re(term.weight));
            }
            assert!((total - 1.0).abs() <= 1e-12);
            assert!(sample.realized.matrix().max_abs_diff(&rebuilt) <= 1e-12);
        }
    }

    #[test]
    fn random_biseparable_is_deterministic() {
        let a = random_biseparable(4, 3, 99);
        let b = random_biseparable(4, 3, 99);
        assert!(a.realized.matrix().max_abs_diff(b.realized.matrix()) <= 0.0);
    }

    #[test]
    fn single_product_term_has_rank_one() {
        let sample = random_biseparable(3, 1, 5);
        assert!((sample.realized.purity() - 1.0).abs() <= 1e-10);
    }

    #[test]
    fn is_density_verdicts() {
        let (ok, _) = is_density(&ComplexMatrix::identity(4).scale_re(0.25), 1e-10);
        assert!(ok);
        let bad = ComplexMatrix::from_fn(2, |i, j| {
            if i == j {
                Complex64::new(if i == 0 { 1.5 } else { -0.5 }, 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        });
        let (ok, diag) = is_density(&bad, 1e-10);
        assert!(!ok);
        assert!(diag.unwrap().contains("negative eigenvalue"));
        let (ok, _) = is_density(werner(0.3).unwrap().matrix(), 1e-10);
        assert!(ok);
    }

    #[test]
    fn state_json_round_trip() {
        let rho = gen_ghz(PI / 5.0);
        let text = rho.to_json();
        let back = DensityState::from_json(&text).unwrap();
        assert!(back.matrix().max_abs_diff(rho.matrix()) <= 1e-15);
        assert_eq!(back.n_qubits(), 3);
    }
}
