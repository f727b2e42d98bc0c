//! Dense complex matrix algebra for multi-qubit operators.
//!
//! Everything here works on small matrices (dimension at most a few tens),
//! so the implementations favor clarity and determinism over asymptotics.
//! The Hermitian eigensolver is a cyclic Jacobi iteration.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use thiserror::Error;

/// Hermiticity tolerance used by constructors and checks throughout the crate.
pub const HERMITICITY_TOL: f64 = 1e-12;

#[derive(Debug, Error)]
pub enum LinalgError {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error(
        "matrix is not Hermitian: |m[{row}][{col}] - conj(m[{col}][{row}])| = {delta:.3e} exceeds tolerance {tol:.3e}"
    )]
    NotHermitian {
        row: usize,
        col: usize,
        delta: f64,
        tol: f64,
    },
    #[error("qubit index {qubit} out of range for {n_qubits} qubits")]
    QubitOutOfRange { qubit: usize, n_qubits: usize },
    #[error("invalid Pauli letter '{0}', expected one of I, X, Y, Z")]
    BadPauliLetter(char),
    #[error("empty Pauli label")]
    EmptyPauliLabel,
}

/// Dense square matrix of complex numbers, row-major storage.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    dim: usize,
    data: Vec<Complex64>,
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix(dim={})", self.dim)?;
        for i in 0..self.dim {
            write!(f, "  [")?;
            for j in 0..self.dim {
                let z = self[(i, j)];
                write!(f, " {:+.4}{:+.4}i", z.re, z.im)?;
            }
            writeln!(f, " ]")?;
        }
        Ok(())
    }
}

impl ComplexMatrix {
    pub fn zeros(dim: usize) -> Self {
        assert!(dim > 0, "matrix dimension must be positive");
        Self {
            dim,
            data: vec![Complex64::new(0.0, 0.0); dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m[(i, i)] = Complex64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            for j in 0..dim {
                m[(i, j)] = f(i, j);
            }
        }
        m
    }

    /// Build from nested rows; all rows must have length equal to the row count.
    pub fn from_rows(rows: &[Vec<Complex64>]) -> Self {
        let dim = rows.len();
        assert!(rows.iter().all(|r| r.len() == dim), "rows must be square");
        Self::from_fn(dim, |i, j| rows[i][j])
    }

    /// Outer product v v† of a (not necessarily normalized) column vector.
    pub fn outer(v: &[Complex64]) -> Self {
        Self::from_fn(v.len(), |i, j| v[i] * v[j].conj())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim, "add: dimension mismatch");
        Self {
            dim: self.dim,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim, "sub: dimension mismatch");
        Self {
            dim: self.dim,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().map(|a| a * c).collect(),
        }
    }

    pub fn scale_re(&self, c: f64) -> Self {
        self.scale(Complex64::new(c, 0.0))
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim, "matmul: dimension mismatch");
        let n = self.dim;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self[(i, k)];
                if a.norm_sqr() == 0.0 {
                    continue;
                }
                for j in 0..n {
                    out[(i, j)] += a * other[(k, j)];
                }
            }
        }
        out
    }

    /// Conjugate transpose.
    pub fn dagger(&self) -> Self {
        Self::from_fn(self.dim, |i, j| self[(j, i)].conj())
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|i| self[(i, i)]).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Largest entrywise deviation from Hermiticity together with its location.
    pub fn hermiticity_defect(&self) -> (f64, usize, usize) {
        let mut worst = (0.0_f64, 0, 0);
        for i in 0..self.dim {
            for j in i..self.dim {
                let d = (self[(i, j)] - self[(j, i)].conj()).norm();
                if d > worst.0 {
                    worst = (d, i, j);
                }
            }
        }
        worst
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermiticity_defect().0 <= tol
    }

    pub fn check_hermitian(&self, tol: f64) -> Result<(), LinalgError> {
        let (delta, row, col) = self.hermiticity_defect();
        if delta <= tol {
            Ok(())
        } else {
            Err(LinalgError::NotHermitian {
                row,
                col,
                delta,
                tol,
            })
        }
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.dim, other.dim);
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Re(Tr(self · other)) computed without forming the product.
    pub fn trace_product_re(&self, other: &Self) -> f64 {
        assert_eq!(self.dim, other.dim);
        let mut acc = Complex64::new(0.0, 0.0);
        for i in 0..self.dim {
            for k in 0..self.dim {
                acc += self[(i, k)] * other[(k, i)];
            }
        }
        acc.re
    }

    pub fn trace_product(&self, other: &Self) -> Complex64 {
        assert_eq!(self.dim, other.dim);
        let mut acc = Complex64::new(0.0, 0.0);
        for i in 0..self.dim {
            for k in 0..self.dim {
                acc += self[(i, k)] * other[(k, i)];
            }
        }
        acc
    }
}

impl std::ops::Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.dim + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.dim + j]
    }
}

/// Kronecker product a ⊗ b.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let (na, nb) = (a.dim(), b.dim());
    let mut out = ComplexMatrix::zeros(na * nb);
    for i in 0..na {
        for j in 0..na {
            let aij = a[(i, j)];
            if aij.norm_sqr() == 0.0 {
                continue;
            }
            for k in 0..nb {
                for l in 0..nb {
                    out[(i * nb + k, j * nb + l)] = aij * b[(k, l)];
                }
            }
        }
    }
    out
}

/// Eigenvalues of a Hermitian matrix, ascending, via cyclic Jacobi rotations.
///
/// Rejects inputs whose Hermiticity defect exceeds `tol`. Converges when the
/// off-diagonal Frobenius mass drops below 1e-14 relative to the matrix scale.
pub fn hermitian_eigenvalues(m: &ComplexMatrix, tol: f64) -> Result<Vec<f64>, LinalgError> {
    m.check_hermitian(tol)?;
    let n = m.dim();
    // Work on the exactly Hermitian part (m + m†)/2.
    let mut a = m.add(&m.dagger()).scale_re(0.5);
    let scale = a.frobenius_norm().max(1.0);
    let target = 1e-14 * scale;

    for _sweep in 0..100 {
        let mut off = 0.0;
        for p in 0..n {
            for q in (p + 1)..n {
                off += a[(p, q)].norm_sqr();
            }
        }
        if (2.0 * off).sqrt() <= target {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[(p, q)];
                let b = apq.norm();
                if b <= target / (n as f64 * n as f64) {
                    continue;
                }
                // Phase out the pivot, then a real Jacobi rotation.
                let phase = apq / b;
                let app = a[(p, p)].re;
                let aqq = a[(q, q)].re;
                let tau = (aqq - app) / (2.0 * b);
                let t = if tau >= 0.0 {
                    1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                let pc = phase.conj();
                for k in 0..n {
                    if k == p || k == q {
                        continue;
                    }
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    let nkp = akp * c - akq * pc * s;
                    let nkq = akp * s + akq * pc * c;
                    a[(k, p)] = nkp;
                    a[(k, q)] = nkq;
                    a[(p, k)] = nkp.conj();
                    a[(q, k)] = nkq.conj();
                }
                a[(p, p)] = Complex64::new(app - t * b, 0.0);
                a[(q, q)] = Complex64::new(aqq + t * b, 0.0);
                a[(p, q)] = Complex64::new(0.0, 0.0);
                a[(q, p)] = Complex64::new(0.0, 0.0);
            }
        }
    }

    let mut eigs: Vec<f64> = (0..n).map(|i| a[(i, i)].re).collect();
    eigs.sort_by(|x, y| x.partial_cmp(y).unwrap());
    Ok(eigs)
}

/// Transpose the indices of a single qubit slot. Qubit 0 is the leftmost
/// (most significant) tensor factor.
pub fn partial_transpose(
    m: &ComplexMatrix,
    qubit: usize,
    n_qubits: usize,
) -> Result<ComplexMatrix, LinalgError> {
    let dim = 1usize << n_qubits;
    if m.dim() != dim {
        return Err(LinalgError::DimensionMismatch(format!(
            "matrix dim {} does not match 2^{}",
            m.dim(),
            n_qubits
        )));
    }
    if qubit >= n_qubits {
        return Err(LinalgError::QubitOutOfRange { qubit, n_qubits });
    }
    let shift = n_qubits - 1 - qubit;
    let mask = 1usize << shift;
    let mut out = ComplexMatrix::zeros(dim);
    for i in 0..dim {
        for j in 0..dim {
            let bi = i & mask;
            let bj = j & mask;
            let ni = (i & !mask) | bj;
            let nj = (j & !mask) | bi;
            out[(ni, nj)] = m[(i, j)];
        }
    }
    Ok(out)
}

/// Reorder tensor factors. `perm[k]` names the global qubit that occupies
/// factor slot `k` of the input matrix; the output is in global qubit order.
pub fn permute_qubits(m: &ComplexMatrix, perm: &[usize]) -> ComplexMatrix {
    let n = perm.len();
    let dim = 1usize << n;
    assert_eq!(m.dim(), dim, "permute_qubits: dimension mismatch");
    let local_index = |g: usize| -> usize {
        let mut l = 0usize;
        for &q in perm {
            let bit = (g >> (n - 1 - q)) & 1;
            l = (l << 1) | bit;
        }
        l
    };
    let mut out = ComplexMatrix::zeros(dim);
    for i in 0..dim {
        let li = local_index(i);
        for j in 0..dim {
            out[(i, j)] = m[(li, local_index(j))];
        }
    }
    out
}

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Debug, Hash)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub const ALL: [Pauli; 4] = [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z];

    pub fn matrix(self) -> ComplexMatrix {
        let z = |re: f64, im: f64| Complex64::new(re, im);
        let rows = match self {
            Pauli::I => [[z(1.0, 0.0), z(0.0, 0.0)], [z(0.0, 0.0), z(1.0, 0.0)]],
            Pauli::X => [[z(0.0, 0.0), z(1.0, 0.0)], [z(1.0, 0.0), z(0.0, 0.0)]],
            Pauli::Y => [[z(0.0, 0.0), z(0.0, -1.0)], [z(0.0, 1.0), z(0.0, 0.0)]],
            Pauli::Z => [[z(1.0, 0.0), z(0.0, 0.0)], [z(0.0, 0.0), z(-1.0, 0.0)]],
        };
        ComplexMatrix::from_rows(&[rows[0].to_vec(), rows[1].to_vec()])
    }

    pub fn letter(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }
}

/// Tensor-product Pauli word, one letter per qubit, leftmost = qubit 0.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Debug, Hash)]
pub struct PauliLabel(Vec<Pauli>);

impl PauliLabel {
    pub fn new(letters: Vec<Pauli>) -> Result<Self, LinalgError> {
        if letters.is_empty() {
            return Err(LinalgError::EmptyPauliLabel);
        }
        Ok(Self(letters))
    }

    pub fn letters(&self) -> &[Pauli] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().all(|&p| p == Pauli::I)
    }

    /// True when every letter is I or Z (all terms measurable in one Z-basis setting).
    pub fn is_z_type(&self) -> bool {
        self.0.iter().all(|&p| p == Pauli::I || p == Pauli::Z)
    }
}

impl FromStr for PauliLabel {
    type Err = LinalgError;
    fn from_str(s: &str) -> Result<Self, LinalgError> {
        let letters = s
            .chars()
            .map(|c| match c {
                'I' => Ok(Pauli::I),
                'X' => Ok(Pauli::X),
                'Y' => Ok(Pauli::Y),
                'Z' => Ok(Pauli::Z),
                other => Err(LinalgError::BadPauliLetter(other)),
            })
            .collect::<Result<Vec<_>, _>>()?;
        PauliLabel::new(letters)
    }
}

impl fmt::Display for PauliLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for p in &self.0 {
            write!(f, "{}", p.letter())?;
        }
        Ok(())
    }
}

/// Kronecker chain of the label's base matrices.
pub fn pauli_operator(label: &PauliLabel) -> ComplexMatrix {
    let mut out = label.letters()[0].matrix();
    for p in &label.letters()[1..] {
        out = kron(&out, &p.matrix());
    }
    out
}

fn all_labels(n_qubits: usize) -> impl Iterator<Item = PauliLabel> {
    (0..4usize.pow(n_qubits as u32)).map(move |mut code| {
        let mut letters = vec![Pauli::I; n_qubits];
        for slot in (0..n_qubits).rev() {
            letters[slot] = Pauli::ALL[code % 4];
            code /= 4;
        }
        PauliLabel(letters)
    })
}

/// Expand a Hermitian matrix over the Pauli word basis.
///
/// Returns c_s = Tr(m P_s) / 2^N for every label with |c_s| >= 1e-12, so
/// that m = sum c_s P_s.
pub fn pauli_expand(
    m: &ComplexMatrix,
    n_qubits: usize,
) -> Result<BTreeMap<PauliLabel, f64>, LinalgError> {
    let dim = 1usize << n_qubits;
    if m.dim() != dim {
        return Err(LinalgError::DimensionMismatch(format!(
            "matrix dim {} does not match 2^{}",
            m.dim(),
            n_qubits
        )));
    }
    m.check_hermitian(HERMITICITY_TOL)?;
    let norm = 1.0 / dim as f64;
    let mut coeffs = BTreeMap::new();
    for label in all_labels(n_qubits) {
        let op = pauli_operator(&label);
        let c = m.trace_product_re(&op) * norm;
        if c.abs() >= 1e-12 {
            coeffs.insert(label, c);
        }
    }
    Ok(coeffs)
}

/// Rebuild sum c_s P_s from an expansion.
pub fn pauli_reconstruct(coeffs: &BTreeMap<PauliLabel, f64>, n_qubits: usize) -> ComplexMatrix {
    let dim = 1usize << n_qubits;
    let mut out = ComplexMatrix::zeros(dim);
    for (label, &c) in coeffs {
        out = out.add(&pauli_operator(label).scale_re(c));
    }
    out
}
