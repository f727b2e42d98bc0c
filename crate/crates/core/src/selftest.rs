//! Randomized property suites runnable from the CLI: biseparable positivity
//! at several qubit counts, projection-map positivity, Choi negativity, the
//! Lindblad equivalence, the analytic minimum-eigenvalue grid, witness
//! adjointness, and the kappa tightness probe.

use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::detector::{apply_phi, phi_spec, DetectorError};
use crate::linalg::{hermitian_eigenvalues, kron, ComplexMatrix, Pauli, HERMITICITY_TOL};
use crate::maps::{choi_matrix, eta_min_analytic, LiftedTerm, QubitMapSpec};
use crate::states::{
    bell_phi_plus, ghz, qubit_from_bloch, random_biseparable, BlochVector, DensityState, GhzSign,
};
use crate::witness::build_witness;

/// Result of one property suite.
#[derive(Clone, Debug)]
pub struct SuiteOutcome {
    pub name: String,
    pub samples: usize,
    pub failures: usize,
    pub counterexample: Option<String>,
}

impl SuiteOutcome {
    pub fn passed(&self) -> bool {
        self.failures == 0
    }

    fn pass(name: &str, samples: usize) -> Self {
        Self {
            name: name.into(),
            samples,
            failures: 0,
            counterexample: None,
        }
    }

    fn fail(name: &str, samples: usize, failures: usize, counterexample: String) -> Self {
        Self {
            name: name.into(),
            samples,
            failures,
            counterexample: Some(counterexample),
        }
    }
}

fn biseparable_suite(
    name: &str,
    n_qubits: usize,
    samples: usize,
    seed: u64,
    post_unitary: Option<&ComplexMatrix>,
    kappa3_override: Option<f64>,
) -> Result<SuiteOutcome, DetectorError> {
    let mut spec = phi_spec(n_qubits, post_unitary)?;
    if let Some(kappa) = kappa3_override {
        if n_qubits == 3 {
            spec = spec.with_kappa(kappa);
        }
    }
    let mut failures = 0;
    let mut counterexample = None;
    // the tightness witness |phi+> ⊗ |0...0> goes first so a lowered kappa
    // fails immediately
    let mut extremal = bell_phi_plus().matrix().clone();
    for _ in 2..n_qubits {
        let mut ket0 = ComplexMatrix::zeros(2);
        ket0[(0, 0)] = Complex64::new(1.0, 0.0);
        extremal = kron(&extremal, &ket0);
    }
    let mut check = |tag: String, rho: &ComplexMatrix| -> Result<(), DetectorError> {
        let out = apply_phi(&spec, rho)?;
        let min = hermitian_eigenvalues(&out, HERMITICITY_TOL)?[0];
        if min < -1e-9 {
            failures += 1;
            if counterexample.is_none() {
                counterexample = Some(format!("{tag}: min eigenvalue {min}"));
            }
        }
        Ok(())
    };
    check("bell ⊗ |0..0>".into(), &extremal)?;
    for k in 0..samples {
        let sample = random_biseparable(n_qubits, 3, seed.wrapping_add(k as u64));
        check(
            format!("seed {}", seed.wrapping_add(k as u64)),
            sample.realized.matrix(),
        )?;
    }
    Ok(match counterexample {
        None => SuiteOutcome::pass(name, samples + 1),
        Some(ce) => SuiteOutcome::fail(name, samples + 1, failures, ce),
    })
}

/// Run every suite. `samples` scales the biseparable sampling (N=3 gets the
/// full count, N=4 gets 3/10 of it, N=5 one tenth). `kappa3_override`, when
/// set, replaces kappa_3 in the N=3 biseparable suite so tampered constants
/// are caught.
pub fn run_selftest(
    seed: u64,
    samples: usize,
    kappa3_override: Option<f64>,
) -> Result<Vec<SuiteOutcome>, DetectorError> {
    let mut outcomes = Vec::new();
    let sx = Pauli::X.matrix();

    outcomes.push(biseparable_suite(
        "biseparable positivity N=3",
        3,
        samples,
        seed,
        None,
        kappa3_override,
    )?);
    outcomes.push(biseparable_suite(
        "biseparable positivity N=4",
        4,
        (samples * 3) / 10,
        seed.wrapping_add(10_000),
        None,
        None,
    )?);
    outcomes.push(biseparable_suite(
        "biseparable positivity N=5",
        5,
        samples / 10,
        seed.wrapping_add(20_000),
        None,
        None,
    )?);
    outcomes.push(biseparable_suite(
        "biseparable positivity N=3 with sigma_x",
        3,
        samples / 2,
        seed.wrapping_add(30_000),
        Some(&sx),
        None,
    )?);

    // projection positivity on random Bloch-ball points
    {
        let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(40_000));
        let p = QubitMapSpec::projection();
        let mut worst: Option<String> = None;
        let mut failures = 0;
        let n = 1000;
        for _ in 0..n {
            let (p1, p2, p3) = loop {
                let v: [f64; 3] = [
                    rng.gen_range(-1.0..1.0),
                    rng.gen_range(-1.0..1.0),
                    rng.gen_range(-1.0..1.0),
                ];
                if v.iter().map(|x| x * x).sum::<f64>() <= 1.0 {
                    break (v[0], v[1], v[2]);
                }
            };
            let rho = qubit_from_bloch(BlochVector::new(p1, p2, p3).unwrap());
            let out = p.apply(rho.matrix());
            let min = hermitian_eigenvalues(&out, HERMITICITY_TOL)?[0];
            if min < -1e-12 {
                failures += 1;
                worst.get_or_insert(format!("bloch ({p1},{p2},{p3}): {min}"));
            }
        }
        outcomes.push(match worst {
            None => SuiteOutcome::pass("projection positivity", n),
            Some(ce) => SuiteOutcome::fail("projection positivity", n, failures, ce),
        });
    }

    // Choi negativity of the projection map
    {
        let eigs =
            hermitian_eigenvalues(&choi_matrix(&QubitMapSpec::projection()), HERMITICITY_TOL)?;
        outcomes.push(if (eigs[0] + 0.25).abs() <= 1e-10 {
            SuiteOutcome::pass("Choi eigenvalue -1/4", 1)
        } else {
            SuiteOutcome::fail(
                "Choi eigenvalue -1/4",
                1,
                1,
                format!("min eigenvalue {}", eigs[0]),
            )
        });
    }

    // Lindblad (1/4, 1/4, -1/4) equals projection
    {
        let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(50_000));
        let l = QubitMapSpec::lindblad(0.25, 0.25, -0.25);
        let p = QubitMapSpec::projection();
        let mut worst: Option<String> = None;
        let mut failures = 0;
        let n = 100;
        for k in 0..n {
            let x = ComplexMatrix::from_fn(2, |_, _| {
                Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
            });
            let diff = l.apply(&x).max_abs_diff(&p.apply(&x));
            if diff > 1e-12 {
                failures += 1;
                worst.get_or_insert(format!("input {k}: max diff {diff}"));
            }
        }
        outcomes.push(match worst {
            None => SuiteOutcome::pass("Lindblad(1/4,1/4,-1/4) = projection", n),
            Some(ce) => SuiteOutcome::fail("Lindblad(1/4,1/4,-1/4) = projection", n, failures, ce),
        });
    }

    // analytic vs numeric minimum output eigenvalue on a 101-point grid
    {
        let term = LiftedTerm::new(2, [(1, QubitMapSpec::projection())])?;
        let mut worst: Option<String> = None;
        let mut failures = 0;
        let mut global_min = f64::INFINITY;
        for k in 0..=100 {
            let nu1 = k as f64 / 100.0;
            let amps = [
                Complex64::new(nu1.sqrt(), 0.0),
                Complex64::new(0.0, 0.0),
                Complex64::new(0.0, 0.0),
                Complex64::new((1.0 - nu1).sqrt(), 0.0),
            ];
            let psi = DensityState::from_amplitudes(2, &amps).expect("unit vector");
            let out = term.apply(psi.matrix())?;
            let numeric = hermitian_eigenvalues(&out, HERMITICITY_TOL)?[0];
            let analytic = eta_min_analytic(nu1).expect("in range");
            global_min = global_min.min(numeric);
            if (numeric - analytic).abs() > 1e-9 {
                failures += 1;
                worst.get_or_insert(format!(
                    "nu1 = {nu1}: numeric {numeric} vs analytic {analytic}"
                ));
            }
        }
        if (global_min + 0.25).abs() > 1e-9 {
            failures += 1;
            worst.get_or_insert(format!("global minimum {global_min}, expected -1/4"));
        }
        outcomes.push(match worst {
            None => SuiteOutcome::pass("minimum output eigenvalue grid", 101),
            Some(ce) => SuiteOutcome::fail("minimum output eigenvalue grid", 101, failures, ce),
        });
    }

    // witness adjointness under the trace inner product
    {
        let w = build_witness()?;
        let spec = phi_spec(3, None)?;
        let ghz3 = ghz(3, GhzSign::Plus)?;
        let mut worst: Option<String> = None;
        let mut failures = 0;
        let n = 50;
        for k in 0..n {
            let rho = random_biseparable(3, 2, seed.wrapping_add(60_000 + k as u64)).realized;
            let lhs = w.matrix().trace_product_re(rho.matrix());
            let rhs = apply_phi(&spec, rho.matrix())?.trace_product_re(ghz3.matrix());
            if (lhs - rhs).abs() > 1e-12 {
                failures += 1;
                worst.get_or_insert(format!("sample {k}: {lhs} vs {rhs}"));
            }
        }
        outcomes.push(match worst {
            None => SuiteOutcome::pass("witness adjointness", n),
            Some(ce) => SuiteOutcome::fail("witness adjointness", n, failures, ce),
        });
    }

    Ok(outcomes)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn selftest_passes_with_small_sample_count() {
        let outcomes = run_selftest(7, 30, None).unwrap();
        for o in &outcomes {
            assert!(o.passed(), "{}: {:?}", o.name, o.counterexample);
        }
    }

    #[test]
    fn selftest_is_deterministic() {
        let a = run_selftest(7, 10, None).unwrap();
        let b = run_selftest(7, 10, None).unwrap();
        let fmt = |v: &[SuiteOutcome]| {
            v.iter()
                .map(|o| format!("{}:{}:{}", o.name, o.samples, o.failures))
                .collect::<Vec<_>>()
                .join(";")
        };
        assert_eq!(fmt(&a), fmt(&b));
    }

    #[test]
    fn tampered_kappa_fails_biseparable_suite() {
        let outcomes = run_selftest(7, 10, Some(0.4)).unwrap();
        let n3 = outcomes
            .iter()
            .find(|o| o.name == "biseparable positivity N=3")
            .unwrap();
        assert!(!n3.passed());
        assert!(n3.counterexample.as_ref().unwrap().contains("bell"));
    }
}
