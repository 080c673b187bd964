//! Three-qubit polarization phase gate, single-qubit rotations on the
//! trigger and comparison of gates up to phases.
//!
//! Basis order is |P S T>, P being the most significant bit; |0> is sigma-
//! and |1> is sigma+.

use nalgebra::{Matrix2, SMatrix};
use num_complex::Complex64;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::propagation::PhaseTable;

pub type Matrix8 = SMatrix<Complex64, 8, 8>;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThreeQubitState {
    amp: [Complex64; 8],
}

impl ThreeQubitState {
    pub const NORM_TOLERANCE: f64 = 1e-12;

    pub fn new(amp: [Complex64; 8]) -> Result<Self> {
        let norm = amp.iter().map(|a| a.norm_sqr()).sum::<f64>();
        if (norm - 1.0).abs() > Self::NORM_TOLERANCE {
            return Err(Error::NotNormalized(norm));
        }
        Ok(Self { amp })
    }

    /// Rescales to unit norm; fails only for the zero vector.
    pub fn normalized(amp: [Complex64; 8]) -> Result<Self> {
        let norm = amp.iter().map(|a| a.norm_sqr()).sum::<f64>();
        if !(norm > 0.0) || !norm.is_finite() {
            return Err(Error::NotNormalized(norm));
        }
        let s = norm.sqrt().recip();
        Ok(Self { amp: amp.map(|a| a * s) })
    }

    pub fn basis(index: usize) -> Self {
        let mut amp = [ZERO; 8];
        amp[index] = ONE;
        Self { amp }
    }

    /// Equal superposition of all eight basis states, |+++>.
    pub fn plus() -> Self {
        Self { amp: [Complex64::new(8f64.sqrt().recip(), 0.0); 8] }
    }

    pub fn amplitudes(&self) -> &[Complex64; 8] {
        &self.amp
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GateMatrix(pub Matrix8);

impl GateMatrix {
    pub fn identity() -> Self {
        Self(Matrix8::identity())
    }

    pub fn diagonal(entries: [Complex64; 8]) -> Self {
        Self(Matrix8::from_diagonal(&entries.into()))
    }

    /// diag(1, ..., 1, -1): a pure pi phase on |111>.
    pub fn controlled_controlled_z() -> Self {
        let mut d = [ONE; 8];
        d[7] = -ONE;
        Self::diagonal(d)
    }

    pub fn unitarity_error(&self) -> f64 {
        max_abs(&(self.0.adjoint() * self.0 - Matrix8::identity()))
    }

    pub fn is_unitary(&self) -> bool {
        self.unitarity_error() < 1e-12
    }

    pub fn entry(&self, row: usize, col: usize) -> Complex64 {
        self.0[(row, col)]
    }
}

impl Serialize for GateMatrix {
    /// Rows of `[re, im]` pairs.
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let rows: Vec<Vec<[f64; 2]>> =
            (0..8).map(|r| (0..8).map(|c| [self.0[(r, c)].re, self.0[(r, c)].im]).collect()).collect();
        rows.serialize(s)
    }
}

fn max_abs(m: &Matrix8) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Diagonal gate whose |abc> entry is exp(-i (phi_P + phi_S + phi_T)) for
/// that polarization row.
pub fn build_qpg(table: &PhaseTable) -> Result<GateMatrix> {
    let rows = table.ordered_rows()?;
    Ok(GateMatrix::diagonal(rows.map(|r| Complex64::from_polar(1.0, -r.total()))))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SingleQubitRotation {
    pub theta: f64,
    pub phi: f64,
    pub matrix: Matrix2<Complex64>,
}

pub fn rotation(theta: f64, phi: f64) -> SingleQubitRotation {
    let (s, c) = (theta / 2.0).sin_cos();
    let matrix = Matrix2::new(
        Complex64::new(c, 0.0),
        I * Complex64::from_polar(s, -phi),
        -I * Complex64::from_polar(s, phi),
        Complex64::new(-c, 0.0),
    );
    SingleQubitRotation { theta, phi, matrix }
}

/// I (x) I (x) m, acting on the trigger qubit.
fn on_trigger(m: &Matrix2<Complex64>) -> Matrix8 {
    let mut out = Matrix8::zeros();
    for block in 0..4 {
        let o = 2 * block;
        for r in 0..2 {
            for c in 0..2 {
                out[(o + r, o + c)] = m[(r, c)];
            }
        }
    }
    out
}

/// (I (x) I (x) R) U (I (x) I (x) R)^-1, with the inverse taken as R^dagger.
pub fn conjugate_on_trigger(u: &GateMatrix, r: &SingleQubitRotation) -> GateMatrix {
    let rt = on_trigger(&r.matrix);
    GateMatrix(rt * u.0 * rt.adjoint())
}

/// Standard CCX: swaps |110> and |111>.
pub fn toffoli_reference() -> GateMatrix {
    let mut m = Matrix8::identity();
    m[(6, 6)] = ZERO;
    m[(7, 7)] = ZERO;
    m[(6, 7)] = ONE;
    m[(7, 6)] = ONE;
    GateMatrix(m)
}

pub fn apply(u: &GateMatrix, s: &ThreeQubitState) -> ThreeQubitState {
    let v = u.0 * nalgebra::SVector::<Complex64, 8>::from(s.amp);
    ThreeQubitState { amp: v.into() }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum EquivalenceMode {
    Global,
    LocalDiagonal,
}

/// Phases relating two gates. For the local mode, `left[q]` and `right[q]`
/// are the diagonal phase gates diag(e^{i x0}, e^{i x1}) on qubit q = P, S, T
/// with A = (L_P (x) L_S (x) L_T) B (R_P (x) R_S (x) R_T); any global phase is
/// absorbed into them.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum Witness {
    Global { lambda: f64 },
    LocalDiagonal { left: [[f64; 2]; 3], right: [[f64; 2]; 3] },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Equivalence {
    pub equivalent: bool,
    /// Max-norm distance achieved by the best alignment found.
    pub residual: f64,
    pub witness: Option<Witness>,
}

pub fn equivalent_up_to_phase(a: &GateMatrix, b: &GateMatrix, mode: EquivalenceMode, tol: f64) -> Equivalence {
    let (residual, witness) = match mode {
        EquivalenceMode::Global => {
            let overlap: Complex64 = a.0.iter().zip(b.0.iter()).map(|(x, y)| x * y.conj()).sum();
            let lambda = if overlap.norm() == 0.0 { 0.0 } else { overlap.arg() };
            let r = max_abs(&(a.0 - b.0 * Complex64::from_polar(1.0, lambda)));
            (r, Witness::Global { lambda })
        }
        EquivalenceMode::LocalDiagonal => local_alignment(&a.0, &b.0),
    };
    let equivalent = residual < tol;
    Equivalence { equivalent, residual, witness: equivalent.then_some(witness) }
}

fn bit(index: usize, qubit: usize) -> usize {
    (index >> (2 - qubit)) & 1
}

fn phase_of(p: &[[f64; 2]; 3], index: usize) -> f64 {
    (0..3).map(|q| p[q][bit(index, q)]).sum()
}

fn scaled(b: &Matrix8, left: &[[f64; 2]; 3], right: &[[f64; 2]; 3]) -> Matrix8 {
    Matrix8::from_fn(|i, j| b[(i, j)] * Complex64::from_polar(1.0, phase_of(left, i) + phase_of(right, j)))
}

/// Block-coordinate least squares over the twelve local phases; every update
/// is the exact minimizer arg(sum A conj(rest)) of its sub-problem.
fn local_alignment(a: &Matrix8, b: &Matrix8) -> (f64, Witness) {
    const STARTS: usize = 8;
    const SWEEPS: usize = 400;
    let mut best = (f64::INFINITY, [[0.0; 2]; 3], [[0.0; 2]; 3]);

    for start in 0..STARTS {
        // deterministic spread of initial phases
        let seed = |k: usize| ((start * 12 + k) as f64 * 0.618_033_988_749_895).fract() * std::f64::consts::TAU;
        let mut left = [[0.0; 2]; 3];
        let mut right = [[0.0; 2]; 3];
        if start > 0 {
            for q in 0..3 {
                for v in 0..2 {
                    left[q][v] = seed(4 * q + v);
                    right[q][v] = seed(4 * q + 2 + v);
                }
            }
        }
        let mut prev = f64::INFINITY;
        for _ in 0..SWEEPS {
            for side in 0..2 {
                for q in 0..3 {
                    for v in 0..2 {
                        let mut acc = ZERO;
                        for i in 0..8 {
                            for j in 0..8 {
                                let idx = if side == 0 { i } else { j };
                                if bit(idx, q) != v {
                                    continue;
                                }
                                let own = if side == 0 { left[q][v] } else { right[q][v] };
                                let rest = b[(i, j)]
                                    * Complex64::from_polar(1.0, phase_of(&left, i) + phase_of(&right, j) - own);
                                acc += a[(i, j)] * rest.conj();
                            }
                        }
                        if acc.norm() > 0.0 {
                            let target = if side == 0 { &mut left } else { &mut right };
                            target[q][v] = acc.arg();
                        }
                    }
                }
            }
            let r = max_abs(&(a - scaled(b, &left, &right)));
            if r < 1e-15 || (prev - r).abs() <= 1e-16 {
                prev = r;
                break;
            }
            prev = r;
        }
        if prev < best.0 {
            best = (prev, left, right);
        }
        if best.0 < 1e-14 {
            break;
        }
    }
    let wrap = |p: [[f64; 2]; 3]| p.map(|x| x.map(|v| v.rem_euclid(std::f64::consts::TAU)));
    (best.0, Witness::LocalDiagonal { left: wrap(best.1), right: wrap(best.2) })
}
