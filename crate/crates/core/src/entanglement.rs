//! Residual three-way entanglement of a pure three-qubit state, from the
//! concurrence spectra of its two-qubit reductions, and the Cayley
//! hyperdeterminant as an independent check.

use nalgebra::{DMatrix, Matrix4};
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::gates::ThreeQubitState;

/// Eigenvalues of rho rho~ with |Re| below this are treated as exact zeros.
pub const EIGENVALUE_DUST: f64 = 1e-10;
/// Largest imaginary part tolerated in the spectrum of rho rho~.
pub const IMAGINARY_TOLERANCE: f64 = 1e-8;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    rho: DMatrix<Complex64>,
}

impl DensityMatrix {
    /// Checks Hermiticity and unit trace to 1e-12 and positivity to -1e-10.
    pub fn new(rho: DMatrix<Complex64>) -> Result<Self> {
        let d = rho.nrows();
        if rho.ncols() != d || !(d == 4 || d == 8 || d == 2) {
            return Err(Error::InvalidParameter { name: "rho", reason: format!("unsupported shape {}x{}", d, rho.ncols()) });
        }
        let herm = (&rho - rho.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max);
        if herm > 1e-12 {
            return Err(Error::InvalidParameter { name: "rho", reason: format!("not Hermitian (deviation {herm:e})") });
        }
        let tr = rho.trace();
        if (tr - Complex64::new(1.0, 0.0)).norm() > 1e-12 {
            return Err(Error::InvalidParameter { name: "rho", reason: format!("trace {tr} != 1") });
        }
        let min = rho.clone().symmetric_eigenvalues().min();
        if min < -EIGENVALUE_DUST {
            return Err(Error::NegativeSpectrum(min));
        }
        Ok(Self { rho })
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.rho
    }

    pub fn dim(&self) -> usize {
        self.rho.nrows()
    }
}

pub fn density_matrix(s: &ThreeQubitState) -> DensityMatrix {
    let a = s.amplitudes();
    DensityMatrix { rho: DMatrix::from_fn(8, 8, |i, j| a[i] * a[j].conj()) }
}

/// Which two of P, S, T survive the partial trace.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Pair {
    PS,
    PT,
    ST,
}

impl Pair {
    fn qubits(self) -> (usize, usize, usize) {
        // (kept, kept, traced), as bit positions counted from P = 0
        match self {
            Pair::PS => (0, 1, 2),
            Pair::PT => (0, 2, 1),
            Pair::ST => (1, 2, 0),
        }
    }
}

fn compose(k: [(usize, usize); 3]) -> usize {
    k.iter().map(|(q, v)| v << (2 - q)).sum()
}

pub fn partial_trace(rho: &DensityMatrix, keep: Pair) -> DensityMatrix {
    assert_eq!(rho.dim(), 8, "partial trace expects a three-qubit density matrix");
    let (a, b, t) = keep.qubits();
    let m = &rho.rho;
    let out = DMatrix::from_fn(4, 4, |r, c| {
        let (ra, rb, ca, cb) = (r >> 1, r & 1, c >> 1, c & 1);
        (0..2)
            .map(|v| m[(compose([(a, ra), (b, rb), (t, v)]), compose([(a, ca), (b, cb), (t, v)]))])
            .sum()
    });
    DensityMatrix { rho: out }
}

/// Single-qubit reduction of P.
pub fn reduce_to_probe(rho: &DensityMatrix) -> DensityMatrix {
    assert_eq!(rho.dim(), 8);
    let m = &rho.rho;
    let out = DMatrix::from_fn(2, 2, |r, c| (0..4).map(|v| m[((r << 2) | v, (c << 2) | v)]).sum());
    DensityMatrix { rho: out }
}

fn as_matrix4(rho: &DensityMatrix) -> Matrix4<Complex64> {
    assert_eq!(rho.dim(), 4, "two-qubit density matrix expected");
    Matrix4::from_fn(|i, j| rho.rho[(i, j)])
}

/// (sigma_y (x) sigma_y) rho* (sigma_y (x) sigma_y).
pub fn spin_flip(rho: &DensityMatrix) -> Matrix4<Complex64> {
    let yy = Matrix4::from_fn(|i, j| {
        // sigma_y (x) sigma_y is real: -1 on the anti-diagonal except +1 at the
        // |01>,|10> corners
        if i + j == 3 {
            if i == 1 || i == 2 { Complex64::new(1.0, 0.0) } else { Complex64::new(-1.0, 0.0) }
        } else {
            ZERO
        }
    });
    yy * as_matrix4(rho).conjugate() * yy
}

/// Square roots of the eigenvalues of rho rho~, descending.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LambdaSpectrum(pub [f64; 4]);

impl LambdaSpectrum {
    pub fn concurrence(&self) -> f64 {
        let [l1, l2, l3, l4] = self.0;
        (l1 - l2 - l3 - l4).max(0.0)
    }
}

pub fn lambda_spectrum(rho: &DensityMatrix, rho_tilde: &Matrix4<Complex64>) -> Result<LambdaSpectrum> {
    let product = as_matrix4(rho) * rho_tilde;
    let ev = product
        .schur()
        .eigenvalues()
        .ok_or(Error::ComplexSpectrum { re: f64::NAN, im: f64::NAN })?;
    let mut out = [0.0; 4];
    for (o, z) in out.iter_mut().zip(ev.iter()) {
        if z.im.abs() > IMAGINARY_TOLERANCE {
            return Err(Error::ComplexSpectrum { re: z.re, im: z.im });
        }
        if z.re < -EIGENVALUE_DUST {
            return Err(Error::NegativeSpectrum(z.re));
        }
        *o = if z.re.abs() <= EIGENVALUE_DUST { 0.0 } else { z.re.sqrt() };
    }
    out.sort_by(|a, b| b.total_cmp(a));
    Ok(LambdaSpectrum(out))
}

fn pair_spectrum(rho: &DensityMatrix, pair: Pair) -> Result<LambdaSpectrum> {
    let reduced = partial_trace(rho, pair);
    let flipped = spin_flip(&reduced);
    lambda_spectrum(&reduced, &flipped)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ResidualEntanglement {
    pub zeta: f64,
    pub lambda_ps: LambdaSpectrum,
    pub lambda_pt: LambdaSpectrum,
}

/// zeta = 2 (l1 l2 of rho_PS + l1 l2 of rho_PT).
pub fn residual_entanglement(s: &ThreeQubitState) -> Result<ResidualEntanglement> {
    let rho = density_matrix(s);
    let lambda_ps = pair_spectrum(&rho, Pair::PS)?;
    let lambda_pt = pair_spectrum(&rho, Pair::PT)?;
    let zeta = 2.0 * (lambda_ps.0[0] * lambda_ps.0[1] + lambda_pt.0[0] * lambda_pt.0[1]);
    Ok(ResidualEntanglement { zeta, lambda_ps, lambda_pt })
}

/// C^2_{P(ST)} - C^2_{PS} - C^2_{PT}, with C^2_{P(ST)} = 4 det rho_P.
pub fn residual_entanglement_from_concurrences(s: &ThreeQubitState) -> Result<f64> {
    let rho = density_matrix(s);
    let rp = reduce_to_probe(&rho);
    let det = (rp.rho[(0, 0)] * rp.rho[(1, 1)] - rp.rho[(0, 1)] * rp.rho[(1, 0)]).re;
    let c_ps = pair_spectrum(&rho, Pair::PS)?.concurrence();
    let c_pt = pair_spectrum(&rho, Pair::PT)?.concurrence();
    Ok(4.0 * det - c_ps * c_ps - c_pt * c_pt)
}

/// 4 |d1 - 2 d2 + 4 d3|.
pub fn three_tangle_oracle(s: &ThreeQubitState) -> f64 {
    let a = |i: usize, j: usize, k: usize| s.amplitudes()[4 * i + 2 * j + k];
    let d1 = (a(0, 0, 0) * a(1, 1, 1)).powi(2)
        + (a(0, 0, 1) * a(1, 1, 0)).powi(2)
        + (a(0, 1, 0) * a(1, 0, 1)).powi(2)
        + (a(1, 0, 0) * a(0, 1, 1)).powi(2);
    let d2 = a(0, 0, 0) * a(1, 1, 1) * a(0, 1, 1) * a(1, 0, 0)
        + a(0, 0, 0) * a(1, 1, 1) * a(1, 0, 1) * a(0, 1, 0)
        + a(0, 0, 0) * a(1, 1, 1) * a(1, 1, 0) * a(0, 0, 1)
        + a(0, 1, 1) * a(1, 0, 0) * a(1, 0, 1) * a(0, 1, 0)
        + a(0, 1, 1) * a(1, 0, 0) * a(1, 1, 0) * a(0, 0, 1)
        + a(1, 0, 1) * a(0, 1, 0) * a(1, 1, 0) * a(0, 0, 1);
    let d3 = a(0, 0, 0) * a(1, 1, 0) * a(1, 0, 1) * a(0, 1, 1) + a(1, 1, 1) * a(0, 0, 1) * a(0, 1, 0) * a(1, 0, 0);
    4.0 * (d1 - d2 * 2.0 + d3 * 4.0).norm()
}
