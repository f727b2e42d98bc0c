//! The lifted GME detector Phi_N: one projection-map term per bipartition
//! representative plus a kappa_N * I * Tr term, with verdicts, noise
//! thresholds, and the parameter sweeps that generate plot-ready CSV data.

use num_complex::Complex64;
use thiserror::Error;

use crate::linalg::{hermitian_eigenvalues, ComplexMatrix, LinalgError, HERMITICITY_TOL};
use crate::maps::{LiftedTerm, MapError, QubitMapSpec};
use crate::states::{bound_entangled, g_abcd, gen_ghz, white_noise_mix, DensityState, StateError};

/// Detection tolerance: outputs are exact-arithmetic constructions, so
/// anything below this is eigensolver noise.
pub const DETECT_TOL: f64 = 1e-9;

#[derive(Debug, Error)]
pub enum DetectorError {
    #[error("detector needs at least 2 qubits, got {0}")]
    TooFewQubits(usize),
    #[error("state is not detected at x = 1; no noise threshold exists in [0, 1]")]
    NotDetectedPure,
    #[error("min eigenvalue vs x is not monotone through zero: {0} sign changes on the scan grid")]
    NonMonotoneThreshold(usize),
    #[error(transparent)]
    Map(#[from] MapError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    State(#[from] StateError),
}

/// A full detector: lifted terms plus the kappa * I * Tr constant.
#[derive(Clone, Debug)]
pub struct PhiSpec {
    n_qubits: usize,
    terms: Vec<LiftedTerm>,
    kappa: f64,
}

impl PhiSpec {
    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn terms(&self) -> &[LiftedTerm] {
        &self.terms
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    /// Same terms, different kappa. Used by the self-test to show the
    /// canonical kappa is tight.
    pub fn with_kappa(mut self, kappa: f64) -> Self {
        self.kappa = kappa;
        self
    }
}

/// Canonical detector for `n_qubits` parties: one term per bipartition
/// representative (the smaller side; equal sizes keep the side containing
/// qubit 0) with kappa = (2^(N-1) - 2)/4. An optional post-unitary is
/// conjugated after each projection.
pub fn phi_spec(
    n_qubits: usize,
    post_unitary: Option<&ComplexMatrix>,
) -> Result<PhiSpec, DetectorError> {
    if n_qubits < 2 {
        return Err(DetectorError::TooFewQubits(n_qubits));
    }
    let base = match post_unitary {
        Some(u) => QubitMapSpec::projection().with_post_unitary(u.clone())?,
        None => QubitMapSpec::projection(),
    };
    let full = (1usize << n_qubits) - 1;
    let mut terms = Vec::new();
    for mask in 1..full {
        let size = (mask as u32).count_ones() as usize;
        let comp = n_qubits - size;
        let keep = size < comp || (size == comp && mask & 1 == 1);
        if !keep {
            continue;
        }
        let assignment = (0..n_qubits)
            .filter(|q| mask >> q & 1 == 1)
            .map(|q| (q, base.clone()));
        terms.push(LiftedTerm::new(n_qubits, assignment)?);
    }
    debug_assert_eq!(terms.len(), (1usize << (n_qubits - 1)) - 1);
    let kappa = ((1u64 << (n_qubits - 1)) as f64 - 2.0) / 4.0;
    Ok(PhiSpec {
        n_qubits,
        terms,
        kappa,
    })
}

/// Phi(rho) = sum of lifted terms plus kappa * Tr(rho) * I.
pub fn apply_phi(spec: &PhiSpec, rho: &ComplexMatrix) -> Result<ComplexMatrix, DetectorError> {
    let dim = 1usize << spec.n_qubits;
    if rho.dim() != dim {
        return Err(DetectorError::Map(MapError::DimensionMismatch(format!(
            "matrix dim {} does not match 2^{}",
            rho.dim(),
            spec.n_qubits
        ))));
    }
    let mut out = ComplexMatrix::identity(dim).scale(rho.trace() * Complex64::new(spec.kappa, 0.0));
    for term in &spec.terms {
        out = out.add(&term.apply(rho)?);
    }
    Ok(out)
}

/// Outcome of a detection run.
#[derive(Clone, Debug)]
pub struct DetectionReport {
    pub min_eigenvalue: f64,
    pub spectrum: Vec<f64>,
    pub detected: bool,
    pub tolerance: f64,
}

/// Build the canonical detector for the state's qubit count, apply it, and
/// report the spectrum. A minimum eigenvalue below -tol certifies GME.
pub fn detect(
    rho: &DensityState,
    post_unitary: Option<&ComplexMatrix>,
    tol: f64,
) -> Result<DetectionReport, DetectorError> {
    let spec = phi_spec(rho.n_qubits(), post_unitary)?;
    let out = apply_phi(&spec, rho.matrix())?;
    let spectrum = hermitian_eigenvalues(&out, HERMITICITY_TOL)?;
    let min_eigenvalue = spectrum[0];
    Ok(DetectionReport {
        min_eigenvalue,
        spectrum,
        detected: min_eigenvalue < -tol,
        tolerance: tol,
    })
}

fn min_eig_noisy(spec: &PhiSpec, pure: &DensityState, x: f64) -> Result<f64, DetectorError> {
    let mixed = white_noise_mix(pure, x)?;
    let out = apply_phi(spec, mixed.matrix())?;
    Ok(hermitian_eigenvalues(&out, HERMITICITY_TOL)?[0])
}

/// Largest noise-mixing parameter x at which the detector still reports a
/// nonnegative spectrum, found by bisection after a 101-point monotonicity
/// scan of min-eigenvalue vs x.
pub fn noise_threshold(
    pure: &DensityState,
    post_unitary: Option<&ComplexMatrix>,
    tol: f64,
) -> Result<f64, DetectorError> {
    let spec = phi_spec(pure.n_qubits(), post_unitary)?;
    if min_eig_noisy(&spec, pure, 1.0)? >= -tol {
        return Err(DetectorError::NotDetectedPure);
    }
    // the zero crossing must be unique for bisection to be meaningful
    let mut signs = Vec::with_capacity(101);
    for k in 0..=100 {
        let x = k as f64 / 100.0;
        signs.push(min_eig_noisy(&spec, pure, x)? >= 0.0);
    }
    let changes = signs.windows(2).filter(|w| w[0] != w[1]).count();
    if changes != 1 {
        return Err(DetectorError::NonMonotoneThreshold(changes));
    }
    let (mut lo, mut hi) = (0.0_f64, 1.0_f64); // f(lo) >= 0, f(hi) < 0
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if min_eig_noisy(&spec, pure, mid)? >= 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// One point of a parameter sweep.
#[derive(Clone, Debug)]
pub struct SweepRow {
    pub parameters: Vec<(String, f64)>,
    pub min_eigenvalue: f64,
}

/// 15 significant digits, stable across platforms.
pub fn fmt_sig15(v: f64) -> String {
    format!("{v:.14e}")
}

/// Serialize rows as CSV: header names the parameters then `min_eigenvalue`.
pub fn sweep_to_csv(rows: &[SweepRow]) -> String {
    let mut out = String::new();
    if let Some(first) = rows.first() {
        for (name, _) in &first.parameters {
            out.push_str(name);
            out.push(',');
        }
        out.push_str("min_eigenvalue\n");
    }
    for row in rows {
        for (_, v) in &row.parameters {
            out.push_str(&fmt_sig15(*v));
            out.push(',');
        }
        out.push_str(&fmt_sig15(row.min_eigenvalue));
        out.push('\n');
    }
    out
}

/// Min eigenvalue of Phi_3 applied to the generalized GHZ state, per theta.
pub fn sweep_gen_ghz(theta_grid: &[f64]) -> Result<Vec<SweepRow>, DetectorError> {
    let spec = phi_spec(3, None)?;
    theta_grid
        .iter()
        .map(|&theta| {
            let rho = gen_ghz(theta);
            let out = apply_phi(&spec, rho.matrix())?;
            let min = hermitian_eigenvalues(&out, HERMITICITY_TOL)?[0];
            Ok(SweepRow {
                parameters: vec![("theta".into(), theta)],
                min_eigenvalue: min,
            })
        })
        .collect()
}

/// Zero crossings of min-eigenvalue vs theta, refined by local bisection on
/// each sign change of the grid.
pub fn gen_ghz_crossings(theta_grid: &[f64]) -> Result<Vec<f64>, DetectorError> {
    let spec = phi_spec(3, None)?;
    let f = |theta: f64| -> Result<f64, DetectorError> {
        let out = apply_phi(&spec, gen_ghz(theta).matrix())?;
        Ok(hermitian_eigenvalues(&out, HERMITICITY_TOL)?[0])
    };
    let mut crossings = Vec::new();
    let mut prev = f(theta_grid[0])?;
    for w in theta_grid.windows(2) {
        let next = f(w[1])?;
        if (prev < 0.0) != (next < 0.0) {
            let (mut lo, mut hi) = (w[0], w[1]);
            let mut flo = prev;
            for _ in 0..60 {
                let mid = 0.5 * (lo + hi);
                let fm = f(mid)?;
                if (fm < 0.0) == (flo < 0.0) {
                    lo = mid;
                    flo = fm;
                } else {
                    hi = mid;
                }
            }
            crossings.push(0.5 * (lo + hi));
        }
        prev = next;
    }
    Ok(crossings)
}

/// Reference closed-form eigenvalue formulas for the bound-entangled sweep's
/// analytic column, as a function of (p1, p2) with p3 = (1 - p1 - p2)/3:
/// l1 = l2 = l3 = 3/4 (-1 + 2 p1 + 2 p2), l4 = 1/4 (3 + 22 p1 - 18 p2),
/// l5 = 1/4 (3 - 18 p1 + 22 p2), l6 = l7 = l8 = (31 - 22 p1 - 22 p2)/12.
///
/// These formulas do NOT agree with the numeric spectrum of [`apply_phi`] on
/// this family (see the sweep's analytic_min vs min_eigenvalue columns), and
/// they cannot: l1 reaches -3/4 at p1 = p2 = 0, below the -1/4 floor that
/// holds for every state (three terms bounded by -1/4 each plus kappa_3 =
/// 1/2). The true spectrum, from the common eigenbasis of the family's seven
/// Pauli words, is (3 + 8 p1 - 4 p2)/4, (3 - 4 p1 + 8 p2)/4,
/// (17 - 8(p1+p2))/12 x3, (5 + 4(p1+p2))/12 x3. The reference formulas are
/// kept verbatim so the sweep exposes the discrepancy instead of hiding it.
pub fn bound_entangled_eigs_analytic(p1: f64, p2: f64) -> Result<[f64; 8], DetectorError> {
    // snap rounding noise at the p1 + p2 = 1 edge to exactly zero
    let mut p3 = (1.0 - p1 - p2) / 3.0;
    if p3.abs() <= 1e-12 {
        p3 = 0.0;
    }
    for (name, p) in [("p1", p1), ("p2", p2), ("p3", p3)] {
        if !(0.0..=1.0).contains(&p) {
            return Err(DetectorError::Map(MapError::OutOfRange(format!(
                "{name} = {p} outside [0, 1]"
            ))));
        }
    }
    let l1 = 0.75 * (-1.0 + 2.0 * p1 + 2.0 * p2);
    let l4 = 0.25 * (3.0 + 22.0 * p1 - 18.0 * p2);
    let l5 = 0.25 * (3.0 - 18.0 * p1 + 22.0 * p2);
    let l6 = (31.0 - 22.0 * p1 - 22.0 * p2) / 12.0;
    Ok([l1, l1, l1, l4, l5, l6, l6, l6])
}

/// Row of the bound-entangled sweep: both eigenvalue routes plus the three
/// reference negativity-region flags.
#[derive(Clone, Debug)]
pub struct BoundSweepRow {
    pub p1: f64,
    pub p2: f64,
    /// false when the state at this point is not positive semidefinite
    pub valid: bool,
    pub analytic_min: f64,
    pub numeric_min: f64,
    pub in_region_l1: bool,
    pub in_region_l4: bool,
    pub in_region_l5: bool,
}

/// Negativity region of l1: 0 <= p1 < 1/2 and 0 <= p2 < (1 - 2 p1)/2.
pub fn in_region_l1(p1: f64, p2: f64) -> bool {
    (0.0..0.5).contains(&p1) && p2 >= 0.0 && p2 < 0.5 * (1.0 - 2.0 * p1)
}

/// Negativity region of l4: 0 <= p1 < 3/8 and (3 + 22 p1)/18 <= p2 < 1 - p1.
pub fn in_region_l4(p1: f64, p2: f64) -> bool {
    (0.0..0.375).contains(&p1) && p2 >= (3.0 + 22.0 * p1) / 18.0 && p2 < 1.0 - p1
}

/// Negativity region of l5: 1/6 < p1 <= 5/8 and 0 <= p2 < (-3 + 18 p1)/22.
pub fn in_region_l5(p1: f64, p2: f64) -> bool {
    p1 > 1.0 / 6.0 && p1 <= 0.625 && p2 >= 0.0 && p2 < (-3.0 + 18.0 * p1) / 22.0
}

/// Sweep the (p1, p2) grid; points where the family is not a state are kept
/// in the output but marked invalid (their eigenvalue fields are NaN).
pub fn sweep_bound_entangled(
    p1_grid: &[f64],
    p2_grid: &[f64],
) -> Result<Vec<BoundSweepRow>, DetectorError> {
    let spec = phi_spec(3, None)?;
    let mut rows = Vec::new();
    for &p1 in p1_grid {
        for &p2 in p2_grid {
            let p3 = (1.0 - p1 - p2) / 3.0;
            let state = if (0.0..=1.0).contains(&p3) {
                bound_entangled(p1, p2, p3).ok()
            } else {
                None
            };
            let row = match state {
                Some(rho) => {
                    let analytic = bound_entangled_eigs_analytic(p1, p2)?;
                    let analytic_min = analytic.iter().cloned().fold(f64::INFINITY, f64::min);
                    let out = apply_phi(&spec, rho.matrix())?;
                    let numeric_min = hermitian_eigenvalues(&out, HERMITICITY_TOL)?[0];
                    BoundSweepRow {
                        p1,
                        p2,
                        valid: true,
                        analytic_min,
                        numeric_min,
                        in_region_l1: in_region_l1(p1, p2),
                        in_region_l4: in_region_l4(p1, p2),
                        in_region_l5: in_region_l5(p1, p2),
                    }
                }
                None => BoundSweepRow {
                    p1,
                    p2,
                    valid: false,
                    analytic_min: f64::NAN,
                    numeric_min: f64::NAN,
                    in_region_l1: false,
                    in_region_l4: false,
                    in_region_l5: false,
                },
            };
            rows.push(row);
        }
    }
    Ok(rows)
}

pub fn bound_sweep_to_csv(rows: &[BoundSweepRow]) -> String {
    let mut out =
        String::from("p1,p2,valid,analytic_min,region_l1,region_l4,region_l5,min_eigenvalue\n");
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{}\n",
            fmt_sig15(r.p1),
            fmt_sig15(r.p2),
            r.valid,
            if r.valid {
                fmt_sig15(r.analytic_min)
            } else {
                "nan".into()
            },
            r.in_region_l1,
            r.in_region_l4,
            r.in_region_l5,
            if r.valid {
                fmt_sig15(r.numeric_min)
            } else {
                "nan".into()
            },
        ));
    }
    out
}

/// Sweep the quadripartite G_abcd family over (a, c) with d = a and b fixed.
/// All-zero parameter points are skipped.
pub fn sweep_g_abcd(
    a_grid: &[f64],
    c_grid: &[f64],
    b: f64,
) -> Result<Vec<SweepRow>, DetectorError> {
    let spec = phi_spec(4, None)?;
    let mut rows = Vec::new();
    for &a in a_grid {
        for &c in c_grid {
            let state = g_abcd(
                Complex64::new(a, 0.0),
                Complex64::new(b, 0.0),
                Complex64::new(c, 0.0),
                Complex64::new(a, 0.0),
            );
            let Ok(rho) = state else {
                continue; // all-zero point
            };
            let out = apply_phi(&spec, rho.matrix())?;
            let min = hermitian_eigenvalues(&out, HERMITICITY_TOL)?[0];
            rows.push(SweepRow {
                parameters: vec![("a".into(), a), ("c".into(), c)],
                min_eigenvalue: min,
            });
        }
    }
    Ok(rows)
}

/// Evenly spaced grid of `points` values covering [lo, hi].
pub fn linspace(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    assert!(points >= 1);
    if points == 1 {
        return vec![lo];
    }
    (0..points)
        .map(|k| lo + (hi - lo) * k as f64 / (points - 1) as f64)
        .collect()
}
